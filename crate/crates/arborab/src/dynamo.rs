//! Exact dynamics of quadratic polynomials over ℚ: iteration, orbits with
//! guaranteed termination, post-critical finiteness as a decision procedure,
//! adjusted post-critical orbits, Chebyshev polynomials, affine conjugacy
//! normal forms, and special-pair / exceptional-point detection.
//!
//! Every quadratic is studied in the centered monic form f = x² + c. The
//! decision procedures rest on two exact facts:
//!
//! * escape: once |x| > 1 + |c| the absolute values increase strictly, so
//!   the orbit can never return (|x² + c| ≥ |x|² - |c| > |x|);
//! * denominators: for monic integer-coefficient-free c, a negative p-adic
//!   valuation doubles at each step, so a non-integral orbit value rules out
//!   any cycle from that point on.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::{Integer, RatPolynomial, Rational};

/// The object of study: f = x² + c with basepoint α.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticPair {
    pub c: Rational,
    pub alpha: Rational,
}

impl QuadraticPair {
    pub fn new(c: Rational, alpha: Rational) -> Self {
        QuadraticPair { c, alpha }
    }

    /// x ↦ x² + c.
    pub fn apply(&self, x: &Rational) -> Rational {
        x * x + &self.c
    }

    /// f as a polynomial.
    pub fn polynomial(&self) -> RatPolynomial {
        RatPolynomial::new(vec![self.c.clone(), Rational::zero(), Rational::one()])
    }
}

// ---- Iteration ----

/// The n-fold composition f ∘ ... ∘ f; degree (deg f)^n.
///
/// Pre: deg f ≥ 1 (panics otherwise), n ≥ 1.
pub fn iterate(f: &RatPolynomial, n: u32) -> RatPolynomial {
    assert!(
        f.degree().is_some_and(|d| d >= 1),
        "iterate needs a non-constant polynomial"
    );
    assert!(n >= 1, "iterate needs n >= 1");
    let mut acc = f.clone();
    for _ in 1..n {
        acc = f.compose(&acc);
    }
    acc
}

// ---- Orbits ----

/// How an orbit run ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitOutcome {
    /// points[preperiod + period] = points[preperiod]; the orbit is eventually
    /// periodic and fully listed.
    Cycle { preperiod: usize, period: usize },
    /// points[step] satisfies |x| > 1 + |c|; absolute values grow strictly
    /// from there, so the orbit is infinite.
    Escaped { step: usize },
    /// Neither happened within the budget.
    BudgetExhausted,
}

/// Orbit points together with the reason iteration stopped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitReport {
    pub points: Vec<Rational>,
    pub outcome: OrbitOutcome,
}

/// Iterates x ↦ x² + c from x0 until a value repeats (Cycle), the escape
/// criterion fires (Escaped), or the budget runs out. The repeated value
/// resp. the escaping value is kept as the last entry of `points`.
pub fn orbit(c: &Rational, x0: &Rational, budget: usize) -> OrbitReport {
    let escape = Rational::one() + c.abs();
    let mut points: Vec<Rational> = Vec::new();
    let mut seen: HashMap<Rational, usize> = HashMap::new();
    let mut x = x0.clone();
    for step in 0..=budget {
        if let Some(&first) = seen.get(&x) {
            points.push(x);
            return OrbitReport {
                points,
                outcome: OrbitOutcome::Cycle {
                    preperiod: first,
                    period: step - first,
                },
            };
        }
        if x.abs() > escape {
            points.push(x);
            return OrbitReport {
                points,
                outcome: OrbitOutcome::Escaped { step },
            };
        }
        seen.insert(x.clone(), step);
        points.push(x.clone());
        x = &x * &x + c;
    }
    OrbitReport {
        points,
        outcome: OrbitOutcome::BudgetExhausted,
    }
}

// ---- PCF detection ----

/// Verdict of [`is_pcf`] with the orbit evidence backing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcfReport {
    pub pcf: bool,
    pub certificate: OrbitReport,
}

/// Decides whether the critical orbit 0 ↦ c ↦ c² + c ↦ ... is finite.
///
/// Terminating by construction: a non-integral c doubles the negative
/// valuation of the orbit denominators at every step (certificate: the first
/// two denominators, in the reported points), and an integral orbit either
/// escapes past 1 + |c| or revisits a value inside a finite box.
pub fn is_pcf(c: &Rational) -> PcfReport {
    if !c.denom().is_one() {
        let x1 = c.clone();
        let x2 = &x1 * &x1 + c;
        return PcfReport {
            pcf: false,
            certificate: OrbitReport {
                points: vec![Rational::zero(), x1, x2],
                outcome: OrbitOutcome::BudgetExhausted,
            },
        };
    }
    // Integer orbit: from any |x| ≥ max(3, |c|+2) the square term dominates,
    // so the loop below revisits or escapes within a handful of steps.
    let report = orbit(c, &Rational::zero(), 32);
    match report.outcome {
        OrbitOutcome::Cycle { .. } => PcfReport {
            pcf: true,
            certificate: report,
        },
        OrbitOutcome::Escaped { .. } => PcfReport {
            pcf: false,
            certificate: report,
        },
        OrbitOutcome::BudgetExhausted => {
            unreachable!("integer critical orbits decide within the fixed budget")
        }
    }
}

// ---- Adjusted post-critical orbit ----

/// [c_{1,α}, ..., c_{N,α}] where c₁ = -c, cₙ = f(cₙ₋₁), c_{1,α} = c₁ + α
/// and c_{n,α} = cₙ - α for n ≥ 2.
pub fn adjusted_orbit(c: &Rational, alpha: &Rational, n: usize) -> Vec<Rational> {
    assert!(n >= 1, "adjusted orbit needs at least one entry");
    let mut out = Vec::with_capacity(n);
    let mut cn = -c.clone();
    out.push(&cn + alpha);
    for _ in 2..=n {
        cn = &cn * &cn + c;
        out.push(&cn - alpha);
    }
    out
}

// ---- Chebyshev polynomials ----

/// Monic Chebyshev polynomial normalized by T_d(x + 1/x) = x^d + x^{-d}:
/// T₁ = x, T₂ = x² - 2, T_{d+1} = x·T_d - T_{d-1}.
pub fn chebyshev(d: u32) -> RatPolynomial {
    assert!(d >= 1, "chebyshev needs d >= 1");
    let x = RatPolynomial::x();
    let mut prev = RatPolynomial::constant(Rational::from_integer(Integer::from(2)));
    let mut cur = x.clone();
    for _ in 1..d {
        let next = x.mul(&cur).sub(&prev);
        prev = cur;
        cur = next;
    }
    cur
}

// ---- Affine conjugacy ----

/// m(x) = a·x + b with a ≠ 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub a: Rational,
    pub b: Rational,
}

impl AffineMap {
    pub fn identity() -> Self {
        AffineMap {
            a: Rational::one(),
            b: Rational::zero(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        &self.a * x + &self.b
    }

    /// m⁻¹(y) = (y - b)/a.
    pub fn apply_inverse(&self, y: &Rational) -> Rational {
        (y - &self.b) / &self.a
    }

    pub fn as_polynomial(&self) -> RatPolynomial {
        RatPolynomial::new(vec![self.b.clone(), self.a.clone()])
    }
}

/// Failure modes of [`normal_form`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormalFormError {
    ConstantOrLinear,
    /// Degree > 2 inputs are only centered, and only when monic.
    NonMonicHigherDegree,
}

impl fmt::Display for NormalFormError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalFormError::ConstantOrLinear => {
                write!(f, "normal form needs degree at least 2")
            }
            NormalFormError::NonMonicHigherDegree => {
                write!(f, "degree > 2 is centered only for monic input")
            }
        }
    }
}

/// Monic centered conjugate g = m⁻¹ ∘ f ∘ m with its affine witness, so that
/// f ∘ m = m ∘ g exactly.
///
/// For quadratics g = x² + c with a = 1/e₂, b = -e₁/(2e₂). Higher degrees
/// are centered (the x^{d-1} term is killed) when monic; conjugacy
/// classification beyond degree 2 is out of scope.
pub fn normal_form(f: &RatPolynomial) -> Result<(RatPolynomial, AffineMap), NormalFormError> {
    let d = f.degree().unwrap_or(0);
    if d < 2 {
        return Err(NormalFormError::ConstantOrLinear);
    }
    if d == 2 {
        let e2 = f.coeff(2);
        let e1 = f.coeff(1);
        let e0 = f.coeff(0);
        let a = e2.recip();
        let b = -&e1 / (&e2 + &e2);
        // Constant-term matching: e₂b² + e₁b + e₀ = a·c + b.
        let c = (&e2 * &b * &b + &e1 * &b + &e0 - &b) * &e2;
        let g = RatPolynomial::new(vec![c, Rational::zero(), Rational::one()]);
        return Ok((g, AffineMap { a, b }));
    }
    if !f.leading().unwrap().is_one() {
        return Err(NormalFormError::NonMonicHigherDegree);
    }
    // Monic centering: m(x) = x + b with b = -e_{d-1}/d kills the subleading
    // term, and g = f(x + b) - b.
    let b = -f.coeff(d - 1) / Rational::from_integer(Integer::from(d as i64));
    let m = AffineMap {
        a: Rational::one(),
        b,
    };
    let g = f
        .compose(&m.as_polynomial())
        .sub(&RatPolynomial::constant(m.b.clone()));
    Ok((g, m))
}

// ---- Special pairs and exceptional points ----

/// Outcome of [`special_pair_detect`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecialPairKind {
    /// (x² , ζ) with ζ a rational root of unity, i.e. c = 0, α ∈ {±1}.
    PowerSpecial,
    /// (x² - 2, ζ + ζ⁻¹) with the sum rational, i.e. c = -2, α ∈ {0,±1,±2}.
    ChebyshevSpecial,
    NotSpecial,
}

/// The input pair was the exceptional one (0, 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionalPairError;

impl fmt::Display for ExceptionalPairError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "the pair (0, 0) has a finite backward orbit")
    }
}

/// True iff α has finite backward orbit under x² + c: the fiber f⁻¹(α) must
/// be the double point α itself, forcing x² + c - α = (x - α)², so α = 0 and
/// c = 0.
pub fn is_exceptional(c: &Rational, alpha: &Rational) -> bool {
    c.is_zero() && alpha.is_zero()
}

fn is_small_int(x: &Rational, values: &[i64]) -> bool {
    x.denom().is_one() && values.iter().any(|&v| x.numer() == &Integer::from(v))
}

/// Classifies (x² + c, α) against the rational special pairs. Over ℚ the
/// roots of unity are ±1 and the rational values of ζ + ζ⁻¹ are 0, ±1, ±2
/// (orders 4, 3 and 6, 1 and 2).
pub fn special_pair_detect(
    c: &Rational,
    alpha: &Rational,
) -> Result<SpecialPairKind, ExceptionalPairError> {
    if is_exceptional(c, alpha) {
        return Err(ExceptionalPairError);
    }
    if c.is_zero() && is_small_int(alpha, &[1, -1]) {
        return Ok(SpecialPairKind::PowerSpecial);
    }
    if is_small_int(c, &[-2]) && is_small_int(alpha, &[0, 1, -1, 2, -2]) {
        return Ok(SpecialPairKind::ChebyshevSpecial);
    }
    Ok(SpecialPairKind::NotSpecial)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(Integer::from(n), Integer::from(d))
    }

    fn int(n: i64) -> Rational {
        Rational::from_integer(Integer::from(n))
    }

    fn poly(coeffs: &[(i64, i64)]) -> RatPolynomial {
        RatPolynomial::new(coeffs.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    // ---- iterate ----

    #[test]
    fn iterate_squares() {
        let f = poly(&[(0, 1), (0, 1), (1, 1)]); // x²
        assert_eq!(iterate(&f, 3), RatPolynomial::monomial(int(1), 8));
    }

    #[test]
    fn iterate_basilica() {
        let f = poly(&[(-1, 1), (0, 1), (1, 1)]); // x² - 1
        assert_eq!(
            iterate(&f, 2),
            poly(&[(0, 1), (0, 1), (-2, 1), (0, 1), (1, 1)])
        );
        assert_eq!(
            iterate(&f, 3),
            poly(&[
                (-1, 1),
                (0, 1),
                (0, 1),
                (0, 1),
                (4, 1),
                (0, 1),
                (-4, 1),
                (0, 1),
                (1, 1)
            ])
        );
    }

    // ---- orbit ----

    #[test]
    fn orbit_cycle_of_basilica() {
        let report = orbit(&int(-1), &int(0), 10);
        assert_eq!(report.points, vec![int(0), int(-1), int(0)]);
        assert_eq!(
            report.outcome,
            OrbitOutcome::Cycle {
                preperiod: 0,
                period: 2
            }
        );
    }

    #[test]
    fn orbit_preperiodic_fixed_point() {
        let report = orbit(&int(-2), &int(0), 10);
        assert_eq!(report.points, vec![int(0), int(-2), int(2), int(2)]);
        assert_eq!(
            report.outcome,
            OrbitOutcome::Cycle {
                preperiod: 2,
                period: 1
            }
        );
    }

    #[test]
    fn orbit_escapes() {
        let report = orbit(&int(1), &int(0), 10);
        assert_eq!(report.points, vec![int(0), int(1), int(2), int(5)]);
        assert_eq!(report.outcome, OrbitOutcome::Escaped { step: 3 });
    }

    // ---- is_pcf ----

    #[test]
    fn pcf_classification_over_integers() {
        assert!(is_pcf(&int(0)).pcf);
        assert!(is_pcf(&int(-1)).pcf);
        assert!(is_pcf(&int(-2)).pcf);
        for c in [-10i64, -7, -5, -4, -3, 1, 2, 3, 10] {
            assert!(!is_pcf(&int(c)).pcf, "c = {c}");
        }
    }

    #[test]
    fn pcf_denominator_certificate() {
        let report = is_pcf(&rat(1, 2));
        assert!(!report.pcf);
        let denominators: Vec<_> = report
            .certificate
            .points
            .iter()
            .map(|p| p.denom().clone())
            .collect();
        assert_eq!(
            denominators,
            vec![Integer::from(1), Integer::from(2), Integer::from(4)]
        );
    }

    // ---- adjusted_orbit ----

    #[test]
    fn adjusted_orbit_worked_example() {
        assert_eq!(
            adjusted_orbit(&int(-1), &rat(-1, 2), 3),
            vec![rat(1, 2), rat(1, 2), rat(-1, 2)]
        );
    }

    #[test]
    fn adjusted_orbit_more_examples() {
        assert_eq!(
            adjusted_orbit(&int(-1), &int(1), 3),
            vec![int(2), int(-1), int(-2)]
        );
        assert_eq!(
            adjusted_orbit(&int(-2), &int(1), 3),
            vec![int(3), int(1), int(1)]
        );
    }

    // ---- chebyshev ----

    #[test]
    fn chebyshev_first_few() {
        assert_eq!(chebyshev(1), RatPolynomial::x());
        assert_eq!(chebyshev(2), poly(&[(-2, 1), (0, 1), (1, 1)]));
        assert_eq!(chebyshev(3), poly(&[(0, 1), (-3, 1), (0, 1), (1, 1)]));
    }

    #[test]
    fn chebyshev_functional_identity() {
        // T_d(x + 1/x)·x^d = x^{2d} + 1, multiplied through by x^d:
        // sum_k t_k (x² + 1)^k x^{d-k} = x^{2d} + 1.
        for d in 1..=10u32 {
            let t = chebyshev(d);
            let x2p1 = poly(&[(1, 1), (0, 1), (1, 1)]);
            let mut lhs = RatPolynomial::zero();
            let mut power = RatPolynomial::one();
            for k in 0..=d as usize {
                let term = power
                    .scale(&t.coeff(k))
                    .mul(&RatPolynomial::monomial(int(1), d as usize - k));
                lhs = lhs.add(&term);
                power = power.mul(&x2p1);
            }
            let mut rhs = RatPolynomial::monomial(int(1), 2 * d as usize);
            rhs = rhs.add(&RatPolynomial::one());
            assert_eq!(lhs, rhs, "d = {d}");
        }
    }

    // ---- normal_form ----

    #[test]
    fn normal_form_examples() {
        let (g, m) = normal_form(&poly(&[(3, 1), (2, 1), (1, 1)])).unwrap();
        assert_eq!(g, poly(&[(3, 1), (0, 1), (1, 1)]));
        assert_eq!(
            m,
            AffineMap {
                a: int(1),
                b: int(-1)
            }
        );

        let (g, m) = normal_form(&poly(&[(-1, 1), (0, 1), (2, 1)])).unwrap();
        assert_eq!(g, poly(&[(-2, 1), (0, 1), (1, 1)]));
        assert_eq!(
            m,
            AffineMap {
                a: rat(1, 2),
                b: int(0)
            }
        );

        let (g, m) = normal_form(&poly(&[(2, 1), (0, 1), (-1, 1)])).unwrap();
        assert_eq!(g, poly(&[(-2, 1), (0, 1), (1, 1)]));
        assert_eq!(
            m,
            AffineMap {
                a: int(-1),
                b: int(0)
            }
        );

        let f = poly(&[(5, 1), (0, 1), (1, 1)]);
        let (g, m) = normal_form(&f).unwrap();
        assert_eq!(g, f);
        assert!(m.is_identity());
    }

    #[test]
    fn normal_form_witness_identity() {
        for f in [
            poly(&[(3, 1), (2, 1), (1, 1)]),
            poly(&[(-1, 1), (0, 1), (2, 1)]),
            poly(&[(1, 2), (5, 3), (-7, 4)]),
        ] {
            let (g, m) = normal_form(&f).unwrap();
            let fm = f.compose(&m.as_polynomial());
            let mg = m.as_polynomial().compose(&g);
            assert_eq!(fm, mg, "f ∘ m = m ∘ g for {f:?}");
        }
    }

    #[test]
    fn normal_form_rejects_low_degree() {
        assert_eq!(
            normal_form(&poly(&[(1, 1), (1, 1)])),
            Err(NormalFormError::ConstantOrLinear)
        );
    }

    #[test]
    fn normal_form_centers_monic_cubic() {
        // x³ + 3x² + 1 centers to x³ - 3x + 3 via m(x) = x - 1.
        let f = poly(&[(1, 1), (0, 1), (3, 1), (1, 1)]);
        let (g, m) = normal_form(&f).unwrap();
        assert_eq!(
            m,
            AffineMap {
                a: int(1),
                b: int(-1)
            }
        );
        assert_eq!(g.coeff(2), int(0));
        let fm = f.compose(&m.as_polynomial());
        let mg = m.as_polynomial().compose(&g);
        assert_eq!(fm, mg);
    }

    // ---- special pairs ----

    #[test]
    fn special_pair_examples() {
        assert_eq!(
            special_pair_detect(&int(-2), &int(1)),
            Ok(SpecialPairKind::ChebyshevSpecial)
        );
        assert_eq!(
            special_pair_detect(&int(0), &int(-1)),
            Ok(SpecialPairKind::PowerSpecial)
        );
        assert_eq!(
            special_pair_detect(&int(-1), &int(0)),
            Ok(SpecialPairKind::NotSpecial)
        );
        assert_eq!(
            special_pair_detect(&int(0), &int(0)),
            Err(ExceptionalPairError)
        );
        assert_eq!(
            special_pair_detect(&int(0), &rat(1, 2)),
            Ok(SpecialPairKind::NotSpecial)
        );
        assert_eq!(
            special_pair_detect(&int(-2), &int(3)),
            Ok(SpecialPairKind::NotSpecial)
        );
    }

    #[test]
    fn exceptional_examples() {
        assert!(is_exceptional(&int(0), &int(0)));
        assert!(!is_exceptional(&int(0), &int(1)));
        assert!(!is_exceptional(&int(-1), &int(0)));
    }
}
