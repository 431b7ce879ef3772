//! Command-line surface for the arborab toolkit. Every run prints exactly
//! one JSON document on stdout. Exit codes: 0 for a successful or decided
//! run, 1 for usage and computation errors, 2 for an Undecided verdict.

mod cache;

use std::io::Write;
use std::path::{Path, PathBuf};

use arborab::dynamo::{self, OrbitOutcome, OrbitReport, SpecialPairKind};
use arborab::heights;
use arborab::obstruct::{self, Verdict};
use arborab::poly::IntPolynomial;
use arborab::treeaut::{self, TreeAut};
use arborab::{Integer, Rational};
use cache::Cache;
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "arborab",
    version,
    about = "abelianity obstructions, tree actions, and heights for quadratic pairs (x^2 + c, alpha) over Q"
)]
struct Cli {
    /// JSON output (the default and only mode; accepted for compatibility).
    #[arg(long, global = true)]
    json: bool,
    /// Working precision in bits for numeric subcommands.
    #[arg(long, global = true, default_value_t = 256)]
    prec: u32,
    /// Depth, level count, or iteration budget where a subcommand needs one.
    #[arg(long, global = true)]
    depth: Option<u32>,
    /// Cache directory for expensive artifacts; defaults to $ARBORAB_CACHE.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Forward orbit of x0 under x^2 + c (budget from --depth, default 64).
    Orbit {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
    },
    /// Decide whether the critical orbit of x^2 + c is finite.
    Pcf {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
    },
    /// Adjusted post-critical orbit of (c, alpha), levels 1..=--depth (default 8).
    AdjustedOrbit {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    /// Decide abelianity of the arboreal image of (x^2 + c, alpha).
    Abelian {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    /// Exact solution set of the local condition at c = -1.
    LocalSieve,
    /// Binary tree automorphism utilities.
    #[command(subcommand)]
    Tree(TreeCommand),
    /// Height computations.
    #[command(subcommand)]
    Height(HeightCommand),
    /// Certified Mahler measure and house of an integer polynomial.
    Mahler {
        /// Coefficients low-to-high as a JSON array of integer strings.
        #[arg(long)]
        poly: String,
    },
    /// Averaged root heights over preimage levels 1..=n of alpha.
    Az {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        n: u32,
    },
    /// Classify (x^2 + c, alpha) as a special pair.
    Special {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    /// House and denominator bounds for the whole backward orbit of alpha.
    Bounds {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    /// Cyclotomic polynomials dividing an integer polynomial.
    CycloScan {
        /// Coefficients low-to-high as a JSON array of integer strings.
        #[arg(long)]
        poly: String,
    },
    /// Height-gap term lower bound at level n for degree d.
    FzBound {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u32,
    },
}

#[derive(Subcommand)]
enum TreeCommand {
    /// Check at --depth (2..=4, default 3) that first-level-active elements
    /// with independent parity vectors never commute.
    VerifyCommutation,
    /// Leaf permutation of a portrait, in cycle notation.
    Act {
        /// Comma-separated level bitstrings, e.g. 1,01,1010.
        #[arg(long)]
        portrait: String,
        /// Must match the portrait depth when given.
        #[arg(long)]
        level: Option<usize>,
    },
    /// Compose two portraits (lhs applied after rhs).
    Compose {
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
}

#[derive(Subcommand)]
enum HeightCommand {
    /// Weil height of a rational.
    Weil {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Canonical height of gamma under x^2 + c, to tolerance --eps.
    Canonical {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[arg(long, default_value_t = 1e-12)]
        eps: f64,
    },
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let code = run(&args, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}

fn run(args: &[String], out: &mut dyn Write, errw: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => return emit_error(out, &e.to_string()),
    };
    match dispatch(cli, errw) {
        Ok((doc, code)) => {
            let _ = writeln!(out, "{doc}");
            code
        }
        Err(msg) => emit_error(out, &msg),
    }
}

fn emit_error(out: &mut dyn Write, msg: &str) -> i32 {
    let doc = json!({ "error": msg });
    let _ = writeln!(out, "{doc}");
    1
}

fn dispatch(cli: Cli, errw: &mut dyn Write) -> Result<(Value, i32), String> {
    // JSON is the only output mode, so the flag carries no information.
    let _ = cli.json;
    let prec = cli.prec;
    if !(32..=1 << 20).contains(&prec) {
        return Err("--prec must be between 32 and 1048576 bits".into());
    }
    let mut cache = open_cache(cli.cache.as_deref(), errw);
    match cli.command {
        Command::Orbit { c, x0 } => {
            let c = parse_rational(&c)?;
            let x0 = parse_rational(&x0)?;
            let budget = cli.depth.unwrap_or(64) as usize;
            Ok((orbit_json(&dynamo::orbit(&c, &x0, budget)), 0))
        }
        Command::Pcf { c } => {
            let c = parse_rational(&c)?;
            let report = dynamo::is_pcf(&c);
            Ok((
                json!({ "pcf": report.pcf, "certificate": orbit_json(&report.certificate) }),
                0,
            ))
        }
        Command::AdjustedOrbit { c, alpha } => {
            let c = parse_rational(&c)?;
            let alpha = parse_rational(&alpha)?;
            let n = cli.depth.unwrap_or(8).max(1) as usize;
            Ok((
                json!({ "values": rationals_json(&dynamo::adjusted_orbit(&c, &alpha, n)) }),
                0,
            ))
        }
        Command::Abelian { c, alpha } => {
            let c = parse_rational(&c)?;
            let alpha = parse_rational(&alpha)?;
            let cap = cli.depth.unwrap_or(obstruct::DEFAULT_DEPTH_CAP);
            let cert = obstruct::decide_abelian_q(&c, &alpha, cap).map_err(|e| e.to_string())?;
            let code = if cert.verdict == Verdict::Undecided {
                2
            } else {
                0
            };
            Ok((cert.to_json(), code))
        }
        Command::LocalSieve => Ok((
            json!({ "candidates": rationals_json(&obstruct::local_sieve().candidates) }),
            0,
        )),
        Command::Tree(cmd) => tree_command(cmd, cli.depth),
        Command::Height(cmd) => height_command(cmd, prec),
        Command::Mahler { poly } => mahler_command(&poly, prec, &mut cache, errw),
        Command::Az { c, alpha, n } => az_command(&c, &alpha, n, prec, &mut cache, errw),
        Command::Special { c, alpha } => {
            let c = parse_rational(&c)?;
            let alpha = parse_rational(&alpha)?;
            let kind = match dynamo::special_pair_detect(&c, &alpha) {
                Err(_) => "Exceptional",
                Ok(SpecialPairKind::PowerSpecial) => "Power",
                Ok(SpecialPairKind::ChebyshevSpecial) => "Chebyshev",
                Ok(SpecialPairKind::NotSpecial) => "NotSpecial",
            };
            Ok((json!({ "kind": kind }), 0))
        }
        Command::Bounds { c, alpha } => {
            let c = parse_rational(&c)?;
            let alpha = parse_rational(&alpha)?;
            Ok((heights::backward_bounds(&c, &alpha, prec).to_json(), 0))
        }
        Command::CycloScan { poly } => {
            let p = parse_poly(&poly)?;
            if p.degree() > 1 << 10 {
                return Err("degree cap for the cyclotomic scan is 1024".into());
            }
            Ok((json!({ "orders": heights::cyclotomic_scan(&p) }), 0))
        }
        Command::FzBound { n, d } => {
            if n < 2 || d < 2 {
                return Err("fz-bound needs --n >= 2 and --d >= 2".into());
            }
            Ok((json!({ "bound": obstruct::fz_term_bound(n, d) }), 0))
        }
    }
}

fn tree_command(cmd: TreeCommand, depth: Option<u32>) -> Result<(Value, i32), String> {
    match cmd {
        TreeCommand::VerifyCommutation => {
            let depth = depth.unwrap_or(3) as usize;
            if !(2..=4).contains(&depth) {
                return Err("--depth must be 2, 3, or 4".into());
            }
            let report = treeaut::verify_commutation_criterion(depth);
            let violations: Vec<Value> = report
                .violations
                .iter()
                .map(|(s, t)| json!({ "lhs": s.to_string(), "rhs": t.to_string() }))
                .collect();
            Ok((
                json!({
                    "depth": report.depth,
                    "pairs_checked": report.pairs_checked,
                    "qualifying_pairs": report.qualifying_pairs,
                    "violations": violations,
                }),
                0,
            ))
        }
        TreeCommand::Act { portrait, level } => {
            let aut = TreeAut::parse(&portrait).map_err(|e| e.to_string())?;
            if let Some(level) = level {
                if level != aut.depth() {
                    return Err(format!(
                        "level {level} does not match the portrait depth {}",
                        aut.depth()
                    ));
                }
            }
            Ok((json!({ "cycles": aut.cycle_notation() }), 0))
        }
        TreeCommand::Compose { lhs, rhs } => {
            let l = TreeAut::parse(&lhs).map_err(|e| e.to_string())?;
            let r = TreeAut::parse(&rhs).map_err(|e| e.to_string())?;
            if l.depth() != r.depth() {
                return Err("portraits must share a depth to compose".into());
            }
            let prod = l.compose(&r);
            Ok((
                json!({ "portrait": prod.to_string(), "cycles": prod.cycle_notation() }),
                0,
            ))
        }
    }
}

fn height_command(cmd: HeightCommand, prec: u32) -> Result<(Value, i32), String> {
    match cmd {
        HeightCommand::Weil { x } => {
            let x = parse_rational(&x)?;
            Ok((heights::weil_height(&x, prec).to_json(), 0))
        }
        HeightCommand::Canonical { c, gamma, eps } => {
            let c = parse_rational(&c)?;
            let gamma = parse_rational(&gamma)?;
            if !(eps > 0.0 && eps.is_finite()) {
                return Err("--eps must be a positive tolerance".into());
            }
            Ok((
                heights::canonical_height(&c, &gamma, eps, prec).to_json(),
                0,
            ))
        }
    }
}

fn mahler_command(
    poly: &str,
    prec: u32,
    cache: &mut Option<Cache>,
    errw: &mut dyn Write,
) -> Result<(Value, i32), String> {
    let p = parse_poly(poly)?;
    let deg = p.degree();
    if deg == 0 {
        return Err("the Mahler report needs a nonconstant polynomial".into());
    }
    if deg > 1 << 10 {
        return Err("degree cap for root finding is 1024".into());
    }
    let coeff_key = p.to_json().to_string();
    let keys = [
        format!("mahler:{prec}:{coeff_key}"),
        format!("house:{prec}:{coeff_key}"),
        format!("average:{prec}:{coeff_key}"),
    ];
    if let Some(cache) = cache.as_ref() {
        if let (Some(m), Some(h), Some(a)) = (
            cache.get(&keys[0]),
            cache.get(&keys[1]),
            cache.get(&keys[2]),
        ) {
            return Ok((
                json!({ "degree": deg, "mahler": m, "house": h, "average": a }),
                0,
            ));
        }
    }
    let report = heights::roots_mahler_house(&p, prec).map_err(|e| e.to_string())?;
    let average = heights::average_from_mahler(&report.mahler, deg as u32);
    let (mj, hj, aj) = (
        report.mahler.to_json(),
        report.house.to_json(),
        average.to_json(),
    );
    if let Some(cache) = cache.as_mut() {
        cache.put(&keys[0], mj.clone(), errw);
        cache.put(&keys[1], hj.clone(), errw);
        cache.put(&keys[2], aj.clone(), errw);
    }
    Ok((
        json!({ "degree": deg, "mahler": mj, "house": hj, "average": aj }),
        0,
    ))
}

fn az_command(
    c_s: &str,
    alpha_s: &str,
    n: u32,
    prec: u32,
    cache: &mut Option<Cache>,
    errw: &mut dyn Write,
) -> Result<(Value, i32), String> {
    let c = parse_rational(c_s)?;
    let alpha = parse_rational(alpha_s)?;
    if !(1..=10).contains(&n) {
        return Err("--n must be between 1 and 10 (level 10 already has degree 1024)".into());
    }
    let level_key = |k: u32| format!("az:{prec}:{c}:{alpha}:{k}");
    if let Some(cache) = cache.as_ref() {
        let hits: Vec<&Value> = (1..=n).filter_map(|k| cache.get(&level_key(k))).collect();
        if hits.len() == n as usize {
            return Ok((json!({ "levels": hits }), 0));
        }
    }
    let levels = heights::az_estimate(&c, &alpha, n, prec).map_err(|e| e.to_string())?;
    let docs: Vec<Value> = levels.iter().map(|e| e.to_json()).collect();
    if let Some(cache) = cache.as_mut() {
        for (k, doc) in docs.iter().enumerate() {
            cache.put(&level_key(k as u32 + 1), doc.clone(), errw);
        }
        // The level polynomials are reusable artifacts in their own right.
        for k in 1..=n {
            let key = format!("preimage:{c}:{alpha}:{k}");
            if cache.get(&key).is_none() {
                let poly = heights::preimage_polynomial(&c, &alpha, k).to_json();
                cache.put(&key, poly, errw);
            }
        }
    }
    Ok((json!({ "levels": docs }), 0))
}

fn open_cache(flag: Option<&Path>, errw: &mut dyn Write) -> Option<Cache> {
    let dir: Option<PathBuf> = flag
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("ARBORAB_CACHE").map(PathBuf::from));
    dir.map(|d| Cache::open(&d, errw))
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (t, None),
    };
    let n: Integer = num
        .parse()
        .map_err(|_| format!("malformed rational: {s}"))?;
    let d: Integer = match den {
        Some(d) => d.parse().map_err(|_| format!("malformed rational: {s}"))?,
        None => Integer::from(1),
    };
    if d == Integer::from(0) {
        return Err(format!("malformed rational (zero denominator): {s}"));
    }
    Ok(Rational::new(n, d))
}

fn parse_poly(s: &str) -> Result<IntPolynomial, String> {
    let v: Value = serde_json::from_str(s).map_err(|_| format!("malformed polynomial: {s}"))?;
    IntPolynomial::from_json(&v).ok_or_else(|| {
        "polynomial must be a nonzero JSON array of integer strings, low to high".to_string()
    })
}

fn rationals_json(values: &[Rational]) -> Value {
    Value::Array(
        values
            .iter()
            .map(|q| Value::String(q.to_string()))
            .collect(),
    )
}

fn orbit_json(report: &OrbitReport) -> Value {
    let outcome = match &report.outcome {
        OrbitOutcome::Cycle { preperiod, period } => {
            json!({ "type": "Cycle", "preperiod": preperiod, "period": period })
        }
        OrbitOutcome::Escaped { step } => json!({ "type": "Escaped", "step": step }),
        OrbitOutcome::BudgetExhausted => json!({ "type": "BudgetExhausted" }),
    };
    json!({ "points": rationals_json(&report.points), "outcome": outcome })
}
