//! Heights attached to the quadratic family: exact Weil heights, canonical
//! heights split into an archimedean escape estimate plus exact local
//! contributions, and Mahler/house measurements of preimage polynomials
//! through a certified root finder. Every inexact result carries an error
//! bound that accounts for both truncation and rounding.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_integer::Integer as IntegerOps;
use num_traits::{One, Pow, Signed, Zero};
use rug::{Complex, Float};

use crate::exactnum::{self, padic_valuation};
use crate::poly::{IntPolynomial, Polynomial};
use crate::{Integer, Rational};

mod aberth;

/// Default working precision, in bits, for height computations.
pub const DEFAULT_PRECISION: u32 = 256;

/// How a `HeightEstimate` was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateMethod {
    /// The value is exact up to the final rounding (or exactly zero).
    Exact,
    /// Orbit iteration with a telescoping bound on the discarded tail.
    EscapeTail,
    /// Interval around certified polynomial roots.
    RootFinder,
}

impl EstimateMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimateMethod::Exact => "Exact",
            EstimateMethod::EscapeTail => "EscapeTail",
            EstimateMethod::RootFinder => "RootFinder",
        }
    }
}

/// A real number known to lie within `error_bound` of `value`.
#[derive(Clone, Debug)]
pub struct HeightEstimate {
    pub value: Float,
    pub error_bound: Float,
    pub method: EstimateMethod,
}

impl HeightEstimate {
    fn exact_zero(prec: u32) -> Self {
        HeightEstimate {
            value: Float::with_val(prec, 0),
            error_bound: Float::with_val(64, 0),
            method: EstimateMethod::Exact,
        }
    }

    /// Midpoint and half-width of an interval `[low, high]`.
    fn from_interval(low: Float, high: Float, method: EstimateMethod) -> Self {
        let prec = low.prec();
        let value = Float::with_val(prec, &low + &high) / 2u32;
        let error_bound = (Float::with_val(64, &high - &low) / 2u32).abs();
        HeightEstimate {
            value,
            error_bound,
            method,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        map.insert("value".into(), float_json(&self.value));
        map.insert("error".into(), float_json(&self.error_bound));
        map.insert(
            "method".into(),
            serde_json::Value::String(self.method.as_str().into()),
        );
        serde_json::Value::Object(map)
    }
}

fn float_json(f: &Float) -> serde_json::Value {
    serde_json::Value::String(f.to_string_radix(10, None))
}

/// A rational as a correctly rounded binary float.
pub(crate) fn rat_to_float(q: &Rational, prec: u32) -> Float {
    let r = rug::Rational::from((aberth::big_to_rug(q.numer()), aberth::big_to_rug(q.denom())));
    Float::with_val(prec, &r)
}

/// ln |n| for nonzero n.
fn int_ln(n: &Integer, prec: u32) -> Float {
    Float::with_val(prec, aberth::big_to_rug(n)).abs().ln()
}

/// 2^exp as a Float.
fn pow2(prec: u32, exp: i32) -> Float {
    Float::with_val(prec, Float::i_exp(1, exp))
}

fn int_pow(base: &Integer, exp: u32) -> Integer {
    Pow::pow(base, exp)
}

// ---- Weil height ----

/// h(p/q) = ln max(|p|, q) for p/q in lowest terms. Exact apart from one
/// rounding of the logarithm.
pub fn weil_height(q: &Rational, prec: u32) -> HeightEstimate {
    let big = if q.numer().magnitude() > q.denom().magnitude() {
        q.numer().magnitude()
    } else {
        q.denom().magnitude()
    };
    let value = int_ln(&Integer::from(big.clone()), prec);
    let error_bound = pow2(64, 8 - prec as i32) * (Float::with_val(64, value.abs_ref()) + 1u32);
    HeightEstimate {
        value,
        error_bound,
        method: EstimateMethod::Exact,
    }
}

// ---- Preimage polynomials ----

/// Primitive integer polynomial whose roots are the n-th preimages of alpha
/// under x^2 + c, built denominator-free: with c = p/q the iterate numerators
/// f^k = N_k / q^(e_k) obey N_1 = q x^2 + p, N_{k+1} = N_k^2 + p q^(2 e_k - 1),
/// e_{k+1} = 2 e_k, and the result is the primitive part of w N_n - u q^(e_n)
/// for alpha = u/w. Degree is always 2^n.
pub fn preimage_polynomial(c: &Rational, alpha: &Rational, n: u32) -> IntPolynomial {
    assert!(n >= 1, "preimage level must be at least 1");
    assert!(
        n <= 16,
        "dense preimage polynomials stop being tractable past level 16"
    );
    let p = c.numer();
    let q = c.denom();
    let mut num = Polynomial::new(vec![p.clone(), Integer::zero(), q.clone()]);
    let mut e: u32 = 1;
    for _ in 1..n {
        let shift = p * int_pow(q, 2 * e - 1);
        num = num.mul(&num).add(&Polynomial::constant(shift));
        e *= 2;
    }
    let result = num
        .scale(alpha.denom())
        .sub(&Polynomial::constant(alpha.numer() * int_pow(q, e)));
    IntPolynomial::new(result.coeffs().to_vec()).expect("leading coefficient w q^e is nonzero")
}

// ---- Certified roots, Mahler measure, house ----

/// Roots of an integer polynomial with certified enclosures, plus interval
/// estimates of the Mahler measure and the house (largest root modulus).
pub struct RootReport {
    pub roots: Vec<Complex>,
    /// Distance bounds: a true root lies within `radii[i]` of `roots[i]`.
    pub radii: Vec<Float>,
    /// Bounds on |P(roots[i])|.
    pub residuals: Vec<Float>,
    pub mahler: HeightEstimate,
    pub house: HeightEstimate,
    /// Working precision of the accepted pass, in bits.
    pub precision: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootFindError {
    /// The precision ladder gave up; `precision` is the last width tried.
    NonConvergence { precision: u32 },
}

impl fmt::Display for RootFindError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootFindError::NonConvergence { precision } => {
                write!(f, "root refinement failed to certify at {precision} bits")
            }
        }
    }
}

impl std::error::Error for RootFindError {}

/// Finds all complex roots of p with certified radii and derives Mahler
/// measure and house intervals from them.
pub fn roots_mahler_house(p: &IntPolynomial, prec: u32) -> Result<RootReport, RootFindError> {
    let comp = aberth::find_roots(p, prec, None).map_err(|e| RootFindError::NonConvergence {
        precision: e.precision,
    })?;
    Ok(assemble_report(p, comp, prec))
}

fn assemble_report(p: &IntPolynomial, comp: aberth::RootComputation, prec: u32) -> RootReport {
    let one = Float::with_val(prec, 1);
    let zero = Float::with_val(prec, 0);
    let lead = Float::with_val(prec, aberth::big_to_rug(p.leading()));
    let mut m_low = lead.clone();
    let mut m_high = lead;
    let mut h_low = zero.clone();
    let mut h_high = zero.clone();
    for (z, r) in comp.roots.iter().zip(&comp.radii) {
        let a = Float::with_val(prec, z.abs_ref());
        let rr = Float::with_val(prec, r);
        let lo = Float::with_val(prec, &a - &rr).max(&zero);
        let hi = a + rr;
        m_low *= lo.clone().max(&one);
        m_high *= hi.clone().max(&one);
        h_low = h_low.max(&lo);
        h_high = h_high.max(&hi);
    }
    // One multiplication per root rounds at most once; widen accordingly.
    let slop = pow2(prec, 8 - prec as i32) * (p.degree() as f64 + 2.0);
    let shrink = Float::with_val(prec, 1) - &slop;
    let grow = Float::with_val(prec, 1) + &slop;
    let mahler =
        HeightEstimate::from_interval(m_low * &shrink, m_high * &grow, EstimateMethod::RootFinder);
    let house =
        HeightEstimate::from_interval(h_low * &shrink, h_high * &grow, EstimateMethod::RootFinder);
    RootReport {
        roots: comp.roots,
        radii: comp.radii,
        residuals: comp.residuals,
        mahler,
        house,
        precision: comp.precision,
    }
}

/// ln M / deg derived from a certified Mahler interval; the average height
/// of the roots of the degree-deg polynomial the interval came from.
pub fn average_from_mahler(mahler: &HeightEstimate, deg: u32) -> HeightEstimate {
    let prec = mahler.value.prec();
    let low = Float::with_val(prec, &mahler.value - &mahler.error_bound).ln() / deg;
    let high = Float::with_val(prec, &mahler.value + &mahler.error_bound).ln() / deg;
    HeightEstimate::from_interval(low, high, EstimateMethod::RootFinder)
}

/// Average height of the roots of p: ln M(p) divided by the degree. The
/// Mahler interval stays above zero because the leading coefficient is a
/// positive integer and every root factor is clamped at 1.
pub fn average_root_height(p: &IntPolynomial, prec: u32) -> Result<HeightEstimate, RootFindError> {
    assert!(
        p.degree() >= 1,
        "average over the roots of a constant is empty"
    );
    let report = roots_mahler_house(p, prec)?;
    Ok(average_from_mahler(&report.mahler, p.degree() as u32))
}

// ---- Averaged preimage heights ----

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AzError {
    /// The basepoint has finite forward orbit, so the preimage averages
    /// degenerate.
    PreperiodicBasepoint,
    Roots(RootFindError),
}

impl fmt::Display for AzError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AzError::PreperiodicBasepoint => {
                write!(f, "basepoint is preperiodic; preimage averages degenerate")
            }
            AzError::Roots(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for AzError {}

/// A_n = ln M(P_n) / 2^n for the preimage polynomials P_n of alpha, with
/// each level's roots seeding the next as the two square roots of r - c.
/// Warm starts are dropped automatically when a level picks up a zero root
/// and the deflated degree stops matching.
pub fn az_estimate(
    c: &Rational,
    alpha: &Rational,
    n_max: u32,
    prec: u32,
) -> Result<Vec<HeightEstimate>, AzError> {
    assert!(n_max >= 1, "need at least one level");
    if matches!(classify_orbit(c, alpha), OrbitClass::Preperiodic) {
        return Err(AzError::PreperiodicBasepoint);
    }
    let mut warm: Option<Vec<Complex>> = None;
    let mut out = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let pn = preimage_polynomial(c, alpha, n);
        let comp = aberth::find_roots(&pn, prec, warm.take()).map_err(|e| {
            AzError::Roots(RootFindError::NonConvergence {
                precision: e.precision,
            })
        })?;
        if n < n_max {
            let wp = comp.precision;
            let cf = Complex::with_val(wp, rat_to_float(c, wp));
            let mut seeds = Vec::with_capacity(comp.roots.len() * 2);
            for r in &comp.roots {
                let s = Complex::with_val(wp, r - &cf).sqrt();
                seeds.push(-s.clone());
                seeds.push(s);
            }
            warm = Some(seeds);
        }
        let report = assemble_report(&pn, comp, prec);
        out.push(average_from_mahler(&report.mahler, pn.degree() as u32));
    }
    Ok(out)
}

// ---- Canonical height ----

enum OrbitClass {
    Preperiodic,
    Wandering(WanderingAnchor),
}

/// Proof of escape extracted from the exact phase: the orbit point `anchor`
/// at index `step`, primes that have already escaped with their valuations,
/// and primes dividing den(c) that still need watching.
struct WanderingAnchor {
    anchor: Rational,
    step: u32,
    escaped: Vec<(Integer, i64, u32)>,
    pending: Vec<(Integer, i64)>,
}

/// Runs the orbit exactly until it either revisits a point (preperiodic) or
/// provably escapes. Escape means |x| > 1 + |c| at the archimedean place, or
/// v_p(x) < 0 with 2 v_p(x) < v_p(c) at a finite place; both force the
/// height to grow from then on. The loop terminates because non-escaped
/// points live in a finite set: |x| is bounded and den(x)^2 divides den(c).
fn classify_orbit(c: &Rational, gamma: &Rational) -> OrbitClass {
    let mut live: Vec<(Integer, Option<i64>)> = Vec::new();
    for d in [c.denom(), gamma.denom()] {
        if d.is_one() {
            continue;
        }
        let f = exactnum::factor(d).expect("orbit denominator resists factoring");
        for p in f.factors.keys() {
            if live.iter().any(|(q, _)| q == p) {
                continue;
            }
            let vc = if c.is_zero() {
                None
            } else {
                Some(padic_valuation(c, p).expect("valuation of nonzero c at a prime"))
            };
            live.push((p.clone(), vc));
        }
    }
    let bound = Rational::one() + c.abs();
    let mut escaped: Vec<(Integer, i64, u32)> = Vec::new();
    let mut seen: HashSet<Rational> = HashSet::new();
    let mut x = gamma.clone();
    let mut step: u32 = 0;
    loop {
        if !x.is_zero() {
            let mut i = 0;
            while i < live.len() {
                let v = padic_valuation(&x, &live[i].0).expect("valuation of nonzero x");
                let esc = v < 0 && live[i].1.map_or(true, |vc| 2 * v < vc);
                if esc {
                    let (p, _) = live.remove(i);
                    escaped.push((p, v, step));
                } else {
                    i += 1;
                }
            }
        }
        if !escaped.is_empty() || x.abs() > bound {
            // Primes with v_p(c) >= 0 can never escape once they survive to
            // this point, so only the negative ones stay pending.
            let pending = live
                .into_iter()
                .filter_map(|(p, vc)| match vc {
                    Some(v) if v < 0 => Some((p, v)),
                    _ => None,
                })
                .collect();
            return OrbitClass::Wandering(WanderingAnchor {
                anchor: x,
                step,
                escaped,
                pending,
            });
        }
        if !seen.insert(x.clone()) {
            return OrbitClass::Preperiodic;
        }
        assert!(
            seen.len() <= 2_000_000,
            "orbit failed to resolve within budget"
        );
        x = &x * &x + c;
        step += 1;
    }
}

/// Canonical height of gamma for x^2 + c: the limit of h(f^n(gamma))/2^n.
/// Preperiodic points get an exact zero. Wandering points get the
/// archimedean escape estimate plus exact contributions from every escaped
/// prime, with the tolerance `eps` steering how many tail steps are taken.
pub fn canonical_height(c: &Rational, gamma: &Rational, eps: f64, prec: u32) -> HeightEstimate {
    assert!(eps > 0.0 && eps.is_finite(), "tolerance must be positive");
    match classify_orbit(c, gamma) {
        OrbitClass::Preperiodic => HeightEstimate::exact_zero(prec),
        OrbitClass::Wandering(anchor) => wandering_height(c, anchor, eps, prec),
    }
}

fn wandering_height(c: &Rational, a: WanderingAnchor, eps: f64, prec: u32) -> HeightEstimate {
    let m = a.step;
    // One archimedean step changes log+|x| by at most ln(2(1 + |c|)).
    let arch_defect = {
        let two_one_c = (Rational::one() + c.abs()) * Rational::from_integer(Integer::from(2));
        rat_to_float(&two_one_c, 64).ln()
    };
    // Everything the tail could still contribute, before the 2^-(m+k) factor.
    let mut tail_mass = arch_defect.clone();
    for (p, vcp) in &a.pending {
        tail_mass += int_ln(p, 64) * vcp.unsigned_abs() as f64;
    }
    let k_steps = {
        let mass = tail_mass.to_f64().max(1.0);
        let need = (2.0 * mass / eps).log2().ceil() as i64 - m as i64 + 2;
        need.max(96) as u32
    };
    // Past |x| >= max(2, 2|c|) the square dominates and the recursion can
    // run on y = ln|x| alone, immune to exponent overflow.
    let resc_rat = {
        let two = Rational::from_integer(Integer::from(2));
        let t = c.abs() * &two;
        if t > two {
            t
        } else {
            two
        }
    };
    let resc_log2 = rat_to_float(&resc_rat, 64).log2().to_f64();
    let w = prec
        .max(192)
        .max((k_steps as f64 * (2.0 * resc_log2 + 4.0)).ceil() as u32 + 192);
    let cf = rat_to_float(c, w);
    let resc = rat_to_float(&resc_rat, w);
    let mut z = rat_to_float(&a.anchor, w);
    let mut ylog: Option<Float> = None;
    let mut t_last = Float::with_val(64, 0);
    let mut trackers: Vec<PadicTracker> = a
        .pending
        .iter()
        .map(|(p, vcp)| PadicTracker::new(p.clone(), *vcp, c, &a.anchor))
        .collect();
    for _ in 0..k_steps {
        match ylog.take() {
            None => {
                z = z.square() + &cf;
                if Float::with_val(64, z.abs_ref()) >= resc {
                    ylog = Some(z.clone().abs().ln());
                }
            }
            Some(y) => {
                let damp = Float::with_val(w, &y * -2f64).exp();
                let t = Float::with_val(w, &cf * &damp);
                let mut next = y * 2u32;
                t_last = Float::with_val(64, t.abs_ref());
                next += t.ln_1p();
                ylog = Some(next);
            }
        }
        for tr in trackers.iter_mut() {
            tr.step();
        }
    }
    let n_total = m + k_steps;
    let scale = pow2(w, -(n_total as i32));
    let mut err = Float::with_val(64, 0);
    let mut total = match ylog {
        Some(y) => {
            // Discarded log-recursion tail, geometric with ratio below 1/2.
            err += t_last * pow2(64, -(n_total as i32));
            y * &scale
        }
        None => {
            // Still inside the bounded region: fall back on the uniform
            // telescoping bound from the per-step defect.
            err += arch_defect.clone() * pow2(64, -(n_total as i32));
            let az = z.clone().abs();
            if az > 1u32 {
                az.ln() * &scale
            } else {
                Float::with_val(w, 0)
            }
        }
    };
    for (p, v, n) in &a.escaped {
        total += int_ln(p, w) * (-*v) as f64 * pow2(w, -(*n as i32));
    }
    for tr in &trackers {
        match tr.outcome() {
            TrackerOutcome::Escaped { v, at } => {
                total += int_ln(&tr.p, w) * (-v) as f64 * pow2(w, -((m + at) as i32));
            }
            TrackerOutcome::Open => {
                err +=
                    int_ln(&tr.p, 64) * tr.vc.unsigned_abs() as f64 * pow2(64, -(n_total as i32));
            }
            TrackerOutcome::Unresolved { at } => {
                err +=
                    int_ln(&tr.p, 64) * tr.vc.unsigned_abs() as f64 * pow2(64, -((m + at) as i32));
            }
        }
    }
    // Float drift across k steps plus the final rounding, both far below
    // the tail terms by the choice of w.
    let drift_exp = ((k_steps as f64 * (2.0 * resc_log2 + 4.0)) as i64 + 48 - w as i64)
        .max(-(2_000_000_000)) as i32;
    err += pow2(64, drift_exp) * (Float::with_val(64, total.abs_ref()) + 1u32);
    HeightEstimate {
        value: Float::with_val(prec, &total),
        error_bound: err,
        method: EstimateMethod::EscapeTail,
    }
}

enum TrackerOutcome {
    Escaped { v: i64, at: u32 },
    Open,
    Unresolved { at: u32 },
}

/// Follows v_p along the orbit for a prime with v_p(c) < 0, carrying the
/// unit part of x modulo p^digits. Squaring is exact on valuations; adding c
/// can cancel when 2 v_p(x) = v_p(c), and each cancelled digit spends one
/// digit of precision. When too few trusted digits remain the tracker
/// replays the whole stretch from the exact anchor with twice the digits.
struct PadicTracker {
    p: Integer,
    vc: i64,
    c: Rational,
    anchor: Rational,
    digits: u32,
    modulus: Integer,
    unit_c: Integer,
    v: i64,
    unit: Integer,
    valid: u32,
    steps_done: u32,
    escaped: Option<(i64, u32)>,
    unresolved: Option<u32>,
}

impl PadicTracker {
    fn new(p: Integer, vc: i64, c: &Rational, anchor: &Rational) -> Self {
        debug_assert!(vc < 0);
        let mut t = PadicTracker {
            p,
            vc,
            c: c.clone(),
            anchor: anchor.clone(),
            digits: 64,
            modulus: Integer::one(),
            unit_c: Integer::zero(),
            v: 0,
            unit: Integer::zero(),
            valid: 0,
            steps_done: 0,
            escaped: None,
            unresolved: None,
        };
        t.reset_state();
        t
    }

    fn reset_state(&mut self) {
        self.modulus = int_pow(&self.p, self.digits);
        self.unit_c = unit_part(&self.c, &self.p, &self.modulus);
        self.v = rational_valuation(&self.anchor, &self.p);
        self.unit = unit_part(&self.anchor, &self.p, &self.modulus);
        self.valid = self.digits;
    }

    /// Advances to the next orbit index, replaying from the anchor at
    /// doubled precision whenever a cancellation eats the trusted digits.
    fn step(&mut self) {
        if self.escaped.is_some() || self.unresolved.is_some() {
            return;
        }
        let target = self.steps_done + 1;
        loop {
            if self.advance() {
                if self.escaped.is_some() || self.steps_done >= target {
                    return;
                }
            } else {
                if self.digits >= (1 << 14) {
                    self.unresolved = Some(self.steps_done + 1);
                    return;
                }
                self.digits *= 2;
                self.reset_state();
                self.steps_done = 0;
            }
        }
    }

    /// One exact p-adic step x -> x^2 + c on (v, unit). False when the
    /// cancellation cannot be resolved at the current precision.
    fn advance(&mut self) -> bool {
        let v2 = 2 * self.v;
        // A surviving point has 2 v_p(x) >= v_p(c); strict escape would have
        // been flagged already.
        debug_assert!(v2 >= self.vc);
        let u2 = (&self.unit * &self.unit).mod_floor(&self.modulus);
        let (nv, nu) = if v2 > self.vc {
            let lift = u2 * int_pow(&self.p, (v2 - self.vc) as u32);
            (self.vc, (lift + &self.unit_c).mod_floor(&self.modulus))
        } else {
            let sum = (u2 + &self.unit_c).mod_floor(&self.modulus);
            let trusted = sum.mod_floor(&int_pow(&self.p, self.valid));
            if trusted.is_zero() {
                return false;
            }
            let t = int_valuation(&trusted, &self.p);
            if self.valid - t < 16 {
                return false;
            }
            self.valid -= t;
            (self.vc + t as i64, trusted / int_pow(&self.p, t))
        };
        self.v = nv;
        self.unit = nu;
        self.steps_done += 1;
        if nv < 0 && 2 * nv < self.vc {
            self.escaped = Some((nv, self.steps_done));
        }
        true
    }

    fn outcome(&self) -> TrackerOutcome {
        if let Some((v, at)) = self.escaped {
            TrackerOutcome::Escaped { v, at }
        } else if let Some(at) = self.unresolved {
            TrackerOutcome::Unresolved { at }
        } else {
            TrackerOutcome::Open
        }
    }
}

/// v_p of a nonzero integer.
fn int_valuation(n: &Integer, p: &Integer) -> u32 {
    debug_assert!(!n.is_zero());
    let mut v = 0;
    let mut rest = n.clone();
    loop {
        let (q, r) = rest.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        rest = q;
        v += 1;
    }
}

fn rational_valuation(q: &Rational, p: &Integer) -> i64 {
    int_valuation(q.numer(), p) as i64 - int_valuation(q.denom(), p) as i64
}

/// The unit u with q = u p^v modulo `modulus` (a power of p), using a
/// modular inverse for the denominator.
fn unit_part(q: &Rational, p: &Integer, modulus: &Integer) -> Integer {
    let vn = int_valuation(q.numer(), p);
    let vd = int_valuation(q.denom(), p);
    let num = q.numer() / int_pow(p, vn);
    let den = q.denom() / int_pow(p, vd);
    (num * mod_inverse(&den, modulus)).mod_floor(modulus)
}

fn mod_inverse(a: &Integer, m: &Integer) -> Integer {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one() || e.gcd == -Integer::one());
    (e.x * e.gcd.signum()).mod_floor(m)
}

// ---- Backward orbit bounds ----

/// Everything in the backward orbit of alpha stays inside |z| <= house_bound
/// and, after the monic rescale by denominator_bound, inside the algebraic
/// integers.
pub struct BoundsReport {
    pub house_bound: Float,
    pub denominator_bound: Integer,
}

impl BoundsReport {
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        map.insert("house_bound".into(), float_json(&self.house_bound));
        map.insert(
            "denominator_bound".into(),
            serde_json::Value::String(self.denominator_bound.to_string()),
        );
        serde_json::Value::Object(map)
    }
}

/// H = max(|alpha|, rho) with rho = (1 + sqrt(1 + 4|c|))/2 the escape
/// radius fixed by |z|^2 - |c| > |z|, and D = lcm(den c, den alpha): any
/// preimage z of a point inside the disk stays inside, and D z is an
/// algebraic integer for every z in the backward orbit.
pub fn backward_bounds(c: &Rational, alpha: &Rational, prec: u32) -> BoundsReport {
    let four_c = Rational::one() + c.abs() * Rational::from_integer(Integer::from(4));
    let rho = (Float::with_val(prec, 1) + rat_to_float(&four_c, prec).sqrt()) / 2u32;
    let house_bound = rat_to_float(&alpha.abs(), prec).max(&rho);
    BoundsReport {
        house_bound,
        denominator_bound: c.denom().lcm(alpha.denom()),
    }
}

/// P(y/d) d^deg divided through by the leading coefficient, when that
/// division is exact: a monic polynomial whose roots are d times the roots
/// of P. None when the leading coefficient does not divide the rest.
pub fn monic_rescale(p: &IntPolynomial, d: &Integer) -> Option<Polynomial<Integer>> {
    assert!(d.is_positive(), "scale factor must be positive");
    let deg = p.degree();
    let scaled: Vec<Integer> = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, a)| a * int_pow(d, (deg - i) as u32))
        .collect();
    let lead = scaled[deg].clone();
    let mut out = Vec::with_capacity(deg + 1);
    for t in &scaled {
        let (q, r) = t.div_rem(&lead);
        if !r.is_zero() {
            return None;
        }
        out.push(q);
    }
    Some(Polynomial::new(out))
}

// ---- Cyclotomic factors ----

/// The m-th cyclotomic polynomial. Built over the radical one prime at a
/// time via Phi_{qp}(x) = Phi_q(x^p) / Phi_q(x), then inflated by m/rad(m).
pub fn cyclotomic_polynomial(m: u64) -> Polynomial<Integer> {
    assert!(m >= 1);
    let mut memo = HashMap::new();
    cyclotomic_from_primes(&prime_factors(m), m, &mut memo)
}

fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            out.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

fn cyclotomic_from_primes(
    primes: &[u64],
    m: u64,
    memo: &mut HashMap<u64, Polynomial<Integer>>,
) -> Polynomial<Integer> {
    let rad: u64 = primes.iter().product();
    let rad = rad.max(1);
    let base = squarefree_cyclotomic(primes, memo);
    inflate(&base, m / rad)
}

fn squarefree_cyclotomic(
    primes: &[u64],
    memo: &mut HashMap<u64, Polynomial<Integer>>,
) -> Polynomial<Integer> {
    let key: u64 = primes.iter().product();
    if let Some(f) = memo.get(&key) {
        return f.clone();
    }
    let f = match primes.split_last() {
        None => Polynomial::new(vec![-Integer::one(), Integer::one()]),
        Some((&p, rest)) => {
            let prev = squarefree_cyclotomic(rest, memo);
            let (q, r) = inflate(&prev, p)
                .div_rem_by_monic(&prev)
                .expect("cyclotomic polynomials are monic");
            debug_assert!(r.is_zero());
            q
        }
    };
    memo.insert(key, f.clone());
    f
}

/// p(x^k).
fn inflate(p: &Polynomial<Integer>, k: u64) -> Polynomial<Integer> {
    if k == 1 {
        return p.clone();
    }
    let deg = p.degree().expect("inflating the zero polynomial");
    let mut coeffs = vec![Integer::zero(); deg * k as usize + 1];
    for (i, a) in p.coeffs().iter().enumerate() {
        coeffs[i * k as usize] = a.clone();
    }
    Polynomial::new(coeffs)
}

/// Sieve of smallest prime factors for 0..=cap.
fn smallest_factor_sieve(cap: usize) -> Vec<u32> {
    let mut spf = vec![0u32; cap + 1];
    let mut i = 2;
    while i <= cap {
        if spf[i] == 0 {
            let mut j = i;
            while j <= cap {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
        i += 1;
    }
    spf
}

fn phi_and_primes(mut m: u64, spf: &[u32]) -> (u64, Vec<u64>) {
    let mut phi = 1;
    let mut primes = Vec::new();
    while m > 1 {
        let p = spf[m as usize] as u64;
        primes.push(p);
        let mut pk = 1;
        while m % p == 0 {
            m /= p;
            pk *= p;
        }
        phi *= pk - pk / p;
    }
    (phi, primes)
}

/// Orders m with Phi_m dividing p. Since phi(m) >= sqrt(m/2), only
/// m <= 2 deg^2 can contribute, and within that range only m with
/// phi(m) <= deg are tried.
pub fn cyclotomic_scan(p: &IntPolynomial) -> Vec<u64> {
    let deg = p.degree() as u64;
    if deg == 0 {
        return Vec::new();
    }
    let cap = 2 * deg * deg;
    let spf = smallest_factor_sieve(cap as usize);
    let mut memo = HashMap::new();
    let mut found = Vec::new();
    for m in 1..=cap {
        let (phi, primes) = phi_and_primes(m, &spf);
        if phi > deg {
            continue;
        }
        let cyc = cyclotomic_from_primes(&primes, m, &mut memo);
        if let Some((_, r)) = p.poly().div_rem_by_monic(&cyc) {
            if r.is_zero() {
                found.push(m);
            }
        }
    }
    found
}
