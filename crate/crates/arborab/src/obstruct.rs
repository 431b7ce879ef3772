//! Abelianity obstructions for (x² + c, α) over ℚ, and the decision
//! pipeline that assembles them into machine-checkable certificates.
//!
//! The underlying facts, all specialized to ℚ:
//!
//! * Kernel test: the arboreal image lies in ker(⊕_{i∈I} φ_i) exactly when
//!   ∏_{i∈I} c_{i,α} is a rational square ([`prop_b_membership`]).
//! * 1-dimensionality: when x² + c - α is irreducible (c_{1,α} = α - c a
//!   nonsquare) and the image is abelian, the square classes of the adjusted
//!   post-critical orbit span at most a line in ℚ*/ℚ*²; F₂-dimension ≥ 2 is
//!   therefore a non-abelianity witness ([`one_dim_certificate`]).
//! * Abelian image forces the map itself to be post-critically finite, which
//!   over ℚ pins c to {0, -1, -2}; a non-PCF map is non-abelian outright.
//! * For c = -1 an abelian image forces v_p(α) = v_p(α + 1) = 0 at every odd
//!   prime, which has exactly five rational solutions ([`local_sieve`]).
//! * Splitting-field containment: f^m(β) = α embeds the level-n field of
//!   (f, β) into the level-(n+m) field of (f, α), so a non-abelian witness at
//!   β transfers to α ([`CertificateReason::BackwardTransfer`]).

use std::collections::HashSet;
use std::fmt;

use num_traits::{One, Zero};

use crate::dynamo::{self, OrbitReport, SpecialPairKind};
use crate::exactnum::{
    self, is_rational_square, F2Span, FactorError, SquareClass, DEFAULT_FACTOR_BUDGET,
};
use crate::{Integer, Rational};

/// Default level/recursion cap for [`decide_abelian_q`]: witnesses appear at
/// tiny levels in every scanned case, and the cap keeps factoring cheap.
pub const DEFAULT_DEPTH_CAP: u32 = 16;

/// Adjusted-orbit entries beyond this bit size are not worth factoring; the
/// witness search stops there and the pipeline falls back to other evidence.
const WITNESS_BIT_LIMIT: u64 = 512;

// ---- Certificates ----

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Abelian,
    NonAbelian,
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Abelian => "Abelian",
            Verdict::NonAbelian => "NonAbelian",
            Verdict::Undecided => "Undecided",
        })
    }
}

/// Which of α, α + 1 carries the odd-prime valuation in a sieve witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SieveTarget {
    Alpha,
    AlphaPlusOne,
}

/// Evidence backing a verdict. Every variant is recomputable from (c, α).
#[derive(Clone, Debug, PartialEq)]
pub enum CertificateReason {
    /// (x², ±1) or (x² - 2, ζ + ζ⁻¹): abelian by the sufficiency direction.
    SpecialPair { kind: SpecialPairKind },
    /// Adjusted-orbit square classes at `indices` (1-based levels) span an
    /// F₂-space of dimension ≥ 2 while c_{1,α} is a nonsquare.
    SquareClassWitness {
        indices: Vec<usize>,
        classes: Vec<SquareClass>,
    },
    /// c = -1 and v_p ≠ 0 for the recorded odd prime on the recorded target.
    LocalSieveWitness {
        prime: Integer,
        target: SieveTarget,
        valuation: i64,
    },
    /// f^m(β) = α, and the inner certificate is non-abelian at β.
    BackwardTransfer {
        beta: Rational,
        m: u32,
        inner: Box<AbelianityCertificate>,
    },
    /// The critical orbit is infinite (escape or unbounded denominators), so
    /// the image is non-abelian; no finite-level witness is attached.
    TheoreticalPcf { escape: OrbitReport },
    /// The map is x² or x² - 2 but α is not of torsion type, so the
    /// classification of abelian pairs for power/Chebyshev maps rules the
    /// pair out even when the square classes span only a line.
    SpecialMapNonSpecialBasepoint { kind: SpecialPairKind },
}

/// Verdict, evidence, and the inputs it speaks about.
#[derive(Clone, Debug, PartialEq)]
pub struct AbelianityCertificate {
    pub verdict: Verdict,
    /// None only for Undecided.
    pub reason: Option<CertificateReason>,
    pub c: Rational,
    pub alpha: Rational,
    pub depth_cap: u32,
}

impl AbelianityCertificate {
    /// Stable JSON: {"verdict", "reason", reason-specific keys}.
    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = serde_json::Map::new();
        obj.insert("verdict".into(), self.verdict.to_string().into());
        match &self.reason {
            None => {}
            Some(CertificateReason::SpecialPair { kind }) => {
                obj.insert("reason".into(), "SpecialPair".into());
                obj.insert("kind".into(), special_kind_str(*kind).into());
            }
            Some(CertificateReason::SquareClassWitness { indices, .. }) => {
                obj.insert("reason".into(), "SquareClassWitness".into());
                obj.insert("indices".into(), indices.clone().into());
            }
            Some(CertificateReason::LocalSieveWitness {
                prime,
                target,
                valuation,
            }) => {
                obj.insert("reason".into(), "LocalSieveWitness".into());
                obj.insert("prime".into(), prime.to_string().into());
                obj.insert(
                    "target".into(),
                    match target {
                        SieveTarget::Alpha => "alpha",
                        SieveTarget::AlphaPlusOne => "alpha_plus_one",
                    }
                    .into(),
                );
                obj.insert("valuation".into(), (*valuation).into());
            }
            Some(CertificateReason::BackwardTransfer { beta, m, inner }) => {
                obj.insert("reason".into(), "BackwardTransfer".into());
                obj.insert("beta".into(), beta.to_string().into());
                obj.insert("m".into(), (*m).into());
                obj.insert("inner".into(), inner.to_json());
            }
            Some(CertificateReason::TheoreticalPcf { escape }) => {
                obj.insert("reason".into(), "TheoreticalPCF".into());
                let points: Vec<serde_json::Value> =
                    escape.points.iter().map(|p| p.to_string().into()).collect();
                obj.insert("critical_orbit".into(), points.into());
            }
            Some(CertificateReason::SpecialMapNonSpecialBasepoint { kind }) => {
                obj.insert("reason".into(), "SpecialMapNonSpecialBasepoint".into());
                obj.insert("kind".into(), special_kind_str(*kind).into());
            }
        }
        serde_json::Value::Object(obj)
    }
}

fn special_kind_str(kind: SpecialPairKind) -> &'static str {
    match kind {
        SpecialPairKind::PowerSpecial => "Power",
        SpecialPairKind::ChebyshevSpecial => "Chebyshev",
        SpecialPairKind::NotSpecial => "NotSpecial",
    }
}

// ---- Kernel membership ----

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MembershipError {
    EmptyIndexSet,
    /// The named 1-based level has c_{i,α} = 0; the kernel statement does not
    /// apply there.
    Degenerate(usize),
}

impl fmt::Display for MembershipError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MembershipError::EmptyIndexSet => write!(f, "index set must be nonempty"),
            MembershipError::Degenerate(i) => {
                write!(f, "adjusted orbit vanishes at level {i}")
            }
        }
    }
}

/// Whether the arboreal image of (x² + c, α) is predicted to lie in
/// ker(⊕_{i∈I} φ_i): true iff ∏_{i∈I} c_{i,α} is a rational square. Exact,
/// no factorization.
pub fn prop_b_membership(
    c: &Rational,
    alpha: &Rational,
    indices: &[usize],
) -> Result<bool, MembershipError> {
    if indices.is_empty() {
        return Err(MembershipError::EmptyIndexSet);
    }
    let max = *indices.iter().max().unwrap();
    assert!(indices.iter().all(|&i| i >= 1), "levels are 1-based");
    let orbit = dynamo::adjusted_orbit(c, alpha, max);
    let mut product = Rational::one();
    for &i in indices {
        let entry = &orbit[i - 1];
        if entry.is_zero() {
            return Err(MembershipError::Degenerate(i));
        }
        product *= entry;
    }
    Ok(is_rational_square(&product))
}

// ---- 1-dimensionality ----

/// F₂-dimension of the square classes of the first `n` adjusted-orbit
/// entries (zero entries skipped), with the 1-based pivot levels. Dimension
/// ≥ 2 plus c_{1,α} a nonsquare is a non-abelianity witness; dimension ≤ 1
/// is consistent with an abelian image. Requires n ≥ 2.
pub fn one_dim_certificate(
    c: &Rational,
    alpha: &Rational,
    n: usize,
) -> Result<(usize, Vec<usize>), FactorError> {
    assert!(n >= 2, "the criterion needs at least two levels");
    let mut span = F2Span::new();
    for entry in dynamo::adjusted_orbit(c, alpha, n) {
        let class = exactnum::try_squarefree_part(&entry, DEFAULT_FACTOR_BUDGET)?;
        span.insert_class(&class, DEFAULT_FACTOR_BUDGET)?;
    }
    Ok((span.dimension(), span.witness().to_vec()))
}

// ---- Local sieve at c = -1 ----

/// All rational solutions of "v_p(α) = v_p(α + 1) = 0 at every odd p".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveResult {
    pub candidates: Vec<Rational>,
}

fn pm_power_of_two(q: &Rational) -> bool {
    // 0 imposes no odd-prime condition; otherwise both |numerator| and
    // denominator must be powers of two.
    if q.is_zero() {
        return true;
    }
    let num = q.numer().magnitude();
    let den = q.denom().magnitude();
    num.count_ones() == 1 && den.count_ones() == 1
}

/// True iff no odd prime divides numerator or denominator of α or α + 1.
pub fn local_condition(alpha: &Rational) -> bool {
    pm_power_of_two(alpha) && pm_power_of_two(&(alpha + Rational::one()))
}

/// Solves the local condition exactly. Both α and α + 1 must be 0 or ±2^k,
/// and δ2^b - ε2^a = 1 forces min(a, b) ≤ 0 (both sides would be even), so
/// the case split over a ≤ 0 and b ≤ 0 is finite and yields five solutions.
pub fn local_sieve() -> SieveResult {
    let r = |n: i64, d: i64| Rational::new(Integer::from(n), Integer::from(d));
    let candidates = vec![r(0, 1), r(-1, 1), r(1, 1), r(-2, 1), r(-1, 2)];
    debug_assert!(candidates.iter().all(local_condition));
    SieveResult { candidates }
}

// ---- Decision pipeline ----

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecisionError {
    /// (0, 0): the backward orbit is finite and the tree never branches.
    ExceptionalPair,
}

impl fmt::Display for DecisionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecisionError::ExceptionalPair => {
                write!(f, "exceptional pair: the backward orbit of α is finite")
            }
        }
    }
}

/// Smallest-level square-class witness: walks the adjusted orbit, inserting
/// classes into an incremental span, and stops at the first level where the
/// dimension reaches 2. Returns None when c_{1,α} is zero or a square (then
/// x² + c - α is reducible and the criterion does not apply), when entries
/// outgrow the factoring budget, or when the cap is exhausted.
fn square_class_witness(
    c: &Rational,
    alpha: &Rational,
    depth_cap: u32,
) -> Option<(Vec<usize>, Vec<SquareClass>)> {
    let mut span = F2Span::new();
    let mut classes: Vec<SquareClass> = Vec::new();
    let mut raw = -c.clone(); // c₁ = -c
    for level in 1..=depth_cap as usize {
        let adjusted = if level == 1 {
            &raw + alpha
        } else {
            raw = &raw * &raw + c;
            &raw - alpha
        };
        if adjusted.numer().bits() > WITNESS_BIT_LIMIT
            || adjusted.denom().bits() > WITNESS_BIT_LIMIT
        {
            return None;
        }
        let class = match exactnum::try_squarefree_part(&adjusted, DEFAULT_FACTOR_BUDGET) {
            Ok(class) => class,
            Err(_) => return None,
        };
        if level == 1 {
            match &class {
                SquareClass::Of(k) if !k.is_one() => {}
                // c_{1,α} zero or square: f - α reducible, criterion void.
                _ => return None,
            }
        }
        classes.push(class.clone());
        if span.insert_class(&class, DEFAULT_FACTOR_BUDGET).is_err() {
            return None;
        }
        if span.dimension() >= 2 {
            let indices: Vec<usize> = span.witness().iter().take(2).copied().collect();
            let witness_classes = indices.iter().map(|&i| classes[i - 1].clone()).collect();
            return Some((indices, witness_classes));
        }
    }
    None
}

/// Some odd prime p with v_p(q) ≠ 0, with the valuation. None when q is 0 or
/// ±2^k, or when its odd part resists the factoring budget.
fn odd_prime_valuation(q: &Rational) -> Option<(Integer, i64)> {
    if q.is_zero() {
        return None;
    }
    for part in [q.numer().magnitude(), q.denom().magnitude()] {
        let odd = part >> part.trailing_zeros().unwrap_or(0);
        if odd.count_ones() == 1 {
            continue; // odd part is 1
        }
        let factored =
            exactnum::factor_with_budget(&Integer::from(odd.clone()), DEFAULT_FACTOR_BUDGET)
                .ok()?;
        let p = factored
            .odd_exponent_primes()
            .first()
            .cloned()
            .or_else(|| factored.factors.keys().next().cloned())?;
        let v = exactnum::padic_valuation(q, &p).ok()?;
        if v != 0 {
            return Some((p, v));
        }
    }
    None
}

/// Full decision pipeline for (x² + c, α) over ℚ. Every verdict carries a
/// recomputable certificate; Undecided appears only when `depth_cap` is too
/// small to finish a witness search or a backward-transfer recursion.
pub fn decide_abelian_q(
    c: &Rational,
    alpha: &Rational,
    depth_cap: u32,
) -> Result<AbelianityCertificate, DecisionError> {
    if dynamo::is_exceptional(c, alpha) {
        return Err(DecisionError::ExceptionalPair);
    }
    let mut visited = HashSet::new();
    Ok(decide_inner(c, alpha, depth_cap, &mut visited))
}

fn certificate(
    c: &Rational,
    alpha: &Rational,
    depth_cap: u32,
    verdict: Verdict,
    reason: Option<CertificateReason>,
) -> AbelianityCertificate {
    AbelianityCertificate {
        verdict,
        reason,
        c: c.clone(),
        alpha: alpha.clone(),
        depth_cap,
    }
}

fn decide_inner(
    c: &Rational,
    alpha: &Rational,
    depth_cap: u32,
    visited: &mut HashSet<Rational>,
) -> AbelianityCertificate {
    // 1. Special pairs are abelian by the sufficiency classification.
    let kind = dynamo::special_pair_detect(c, alpha)
        .expect("exceptional pair is rejected before the pipeline");
    if kind != SpecialPairKind::NotSpecial {
        return certificate(
            c,
            alpha,
            depth_cap,
            Verdict::Abelian,
            Some(CertificateReason::SpecialPair { kind }),
        );
    }

    // 2. Non-PCF maps are non-abelian; prefer a finite-level witness.
    let pcf = dynamo::is_pcf(c);
    if !pcf.pcf {
        let reason = match square_class_witness(c, alpha, depth_cap) {
            Some((indices, classes)) => CertificateReason::SquareClassWitness { indices, classes },
            None => CertificateReason::TheoreticalPcf {
                escape: pcf.certificate,
            },
        };
        return certificate(c, alpha, depth_cap, Verdict::NonAbelian, Some(reason));
    }

    // 3. PCF with c ∈ {0, -2}: the map is a power or Chebyshev map on the
    // nose and the basepoint is not of torsion type (that was step 1), so
    // the pair is non-abelian; report a square-class witness when one
    // exists.
    let minus_two = Rational::from(Integer::from(-2));
    if c.is_zero() || *c == minus_two {
        let map_kind = if c.is_zero() {
            SpecialPairKind::PowerSpecial
        } else {
            SpecialPairKind::ChebyshevSpecial
        };
        let reason = match square_class_witness(c, alpha, depth_cap) {
            Some((indices, classes)) => CertificateReason::SquareClassWitness { indices, classes },
            None => CertificateReason::SpecialMapNonSpecialBasepoint { kind: map_kind },
        };
        return certificate(c, alpha, depth_cap, Verdict::NonAbelian, Some(reason));
    }

    // 4. c = -1. An abelian image forces the local condition at every odd
    // prime; its failures are certified by the offending prime.
    debug_assert_eq!(*c, -Rational::one(), "the only remaining PCF value");
    if !local_condition(alpha) {
        let (target, q);
        if !pm_power_of_two(alpha) {
            target = SieveTarget::Alpha;
            q = alpha.clone();
        } else {
            target = SieveTarget::AlphaPlusOne;
            q = alpha + Rational::one();
        }
        if let Some((prime, valuation)) = odd_prime_valuation(&q) {
            return certificate(
                c,
                alpha,
                depth_cap,
                Verdict::NonAbelian,
                Some(CertificateReason::LocalSieveWitness {
                    prime,
                    target,
                    valuation,
                }),
            );
        }
        // The offending odd part resisted factoring: no certificate.
        return certificate(c, alpha, depth_cap, Verdict::Undecided, None);
    }

    // α is one of the five sieve survivors. Three of them carry direct
    // square-class witnesses; for the other two x² - 1 - α is reducible and
    // the witness transfers backward along rational preimages.
    if let Some((indices, classes)) = square_class_witness(c, alpha, depth_cap) {
        return certificate(
            c,
            alpha,
            depth_cap,
            Verdict::NonAbelian,
            Some(CertificateReason::SquareClassWitness { indices, classes }),
        );
    }

    visited.insert(alpha.clone());
    let shifted = alpha + Rational::one(); // β² = α - c = α + 1
    if is_rational_square(&shifted) && depth_cap >= 1 {
        let root = sqrt_exact(&shifted);
        let mut betas = vec![root.clone()];
        if !root.is_zero() {
            betas.push(-root);
        }
        for beta in betas {
            if visited.contains(&beta) {
                continue;
            }
            let inner = decide_inner(c, &beta, depth_cap - 1, visited);
            if inner.verdict == Verdict::NonAbelian {
                return certificate(
                    c,
                    alpha,
                    depth_cap,
                    Verdict::NonAbelian,
                    Some(CertificateReason::BackwardTransfer {
                        beta,
                        m: 1,
                        inner: Box::new(inner),
                    }),
                );
            }
        }
    }
    certificate(c, alpha, depth_cap, Verdict::Undecided, None)
}

/// Exact square root of a rational square (checked by the caller).
fn sqrt_exact(q: &Rational) -> Rational {
    Rational::new(q.numer().sqrt(), q.denom().sqrt())
}

// ---- Unlikely-intersection term bound ----

/// (1/log 5)((n - 2)·log d - log 2016): a lower bound on the number of terms
/// of the n-th iterate of a degree-d map composed with a polynomial, valid
/// when the map is not power/Chebyshev-conjugate. Negative values are
/// vacuous; n = 2 is the degenerate anchor -log 2016/log 5.
pub fn fz_term_bound(n: u32, d: u32) -> f64 {
    assert!(n >= 2, "the bound is stated for n ≥ 2");
    assert!(d >= 2, "degree must be at least 2");
    ((n as f64 - 2.0) * (d as f64).ln() - 2016f64.ln()) / 5f64.ln()
}
