//! Exact arithmetic layer: integer factorization, p-adic valuations, square
//! classes of rationals, and F₂ linear algebra inside ℚ*/ℚ*².
//!
//! A nonzero rational q determines a class in ℚ*/ℚ*², represented here by
//! the unique squarefree signed integer s with q/s a rational square. The
//! group ℚ*/ℚ*² is an F₂-vector space with basis {-1, 2, 3, 5, 7, ...};
//! [`F2Span`] row-reduces class vectors against that basis incrementally and
//! keeps a maximal independent subset of the inserted positions as witness.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::{Integer, Rational};

// ---- Errors ----

/// Failure modes of [`factor`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorError {
    /// 0 has no prime factorization.
    Zero,
    /// The rho splitter ran out of budget; carries the unsplit cofactor.
    BudgetExhausted(Integer),
}

impl fmt::Display for FactorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorError::Zero => write!(f, "0 has no factorization"),
            FactorError::BudgetExhausted(c) => {
                write!(f, "factorization budget exhausted on cofactor {c}")
            }
        }
    }
}

/// Failure modes of [`padic_valuation`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValuationError {
    /// v_p(0) = +∞ is not representable.
    ZeroArgument,
    /// The given p is not prime.
    NotPrime(Integer),
}

impl fmt::Display for ValuationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValuationError::ZeroArgument => write!(f, "valuation of 0 is infinite"),
            ValuationError::NotPrime(p) => write!(f, "{p} is not prime"),
        }
    }
}

// ---- FactoredInteger ----

/// Complete prime factorization of a nonzero integer: sign · ∏ p^e.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredInteger {
    /// +1 or -1.
    pub sign: i8,
    /// prime -> exponent, every exponent ≥ 1.
    pub factors: BTreeMap<Integer, u32>,
}

impl FactoredInteger {
    /// Multiplies the factorization back out.
    pub fn reconstruct(&self) -> Integer {
        let mut n = Integer::from(self.sign);
        for (p, e) in &self.factors {
            n *= p.pow(*e);
        }
        n
    }

    /// Product of the primes with odd exponent, carrying the sign: the
    /// squarefree integer representing the same class in ℚ*/ℚ*².
    pub fn squarefree_kernel(&self) -> Integer {
        let mut s = Integer::from(self.sign);
        for (p, e) in &self.factors {
            if e % 2 == 1 {
                s *= p;
            }
        }
        s
    }

    /// Primes with odd exponent, ascending.
    pub fn odd_exponent_primes(&self) -> Vec<Integer> {
        self.factors
            .iter()
            .filter(|(_, e)| *e % 2 == 1)
            .map(|(p, _)| p.clone())
            .collect()
    }

    /// JSON form {"sign": ±1, "factors": {"p": e}}.
    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .factors
            .iter()
            .map(|(p, e)| (p.to_string(), serde_json::Value::from(*e)))
            .collect();
        serde_json::json!({ "sign": self.sign, "factors": map })
    }

    /// Inverse of [`Self::to_json`].
    pub fn from_json(v: &serde_json::Value) -> Option<Self> {
        let sign = v.get("sign")?.as_i64()?;
        if sign != 1 && sign != -1 {
            return None;
        }
        let mut factors = BTreeMap::new();
        for (p, e) in v.get("factors")?.as_object()? {
            let p: Integer = p.parse().ok()?;
            let e = u32::try_from(e.as_u64()?).ok()?;
            factors.insert(p, e);
        }
        Some(FactoredInteger {
            sign: sign as i8,
            factors,
        })
    }
}

// ---- Primality ----

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        const BOUND: usize = 1 << 14;
        let mut sieve = vec![true; BOUND];
        sieve[0] = false;
        sieve[1] = false;
        let mut p = 2;
        while p * p < BOUND {
            if sieve[p] {
                let mut q = p * p;
                while q < BOUND {
                    sieve[q] = false;
                    q += p;
                }
            }
            p += 1;
        }
        (0..BOUND).filter(|&i| sieve[i]).map(|i| i as u64).collect()
    })
}

/// Deterministic Miller-Rabin with the fixed witness set {2, 3, ..., 37}.
/// Proven correct below 3.3·10²⁴; used as a strong compositeness filter for
/// the few-hundred-digit inputs arising at desk scale beyond that.
pub fn is_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    for &p in &[2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let p = BigUint::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    // n - 1 = d · 2^s with d odd
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &a in &[2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// ---- Factorization ----

/// Default iteration budget for the rho splitter inside [`factor`].
pub const DEFAULT_FACTOR_BUDGET: u64 = 1 << 23;

/// Brent-style Pollard rho on odd composite n with iteration budget.
/// Returns a nontrivial factor, or None when the budget ran out.
fn brent_rho(n: &BigUint, budget: &mut u64) -> Option<BigUint> {
    // x -> x² + c mod n, retrying with the next c when a cycle degenerates.
    for c in 1u64.. {
        let c = BigUint::from(c);
        let mut y = BigUint::from(2u32);
        let mut r: u64 = 1;
        let mut q = BigUint::one();
        let (mut x, mut ys) = (y.clone(), y.clone());
        let mut g = BigUint::one();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = (&y * &y + &c) % n;
            }
            let mut k: u64 = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let batch = 128.min(r - k);
                if *budget < batch {
                    return None;
                }
                *budget -= batch;
                for _ in 0..batch {
                    y = (&y * &y + &c) % n;
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (&q * &diff) % n;
                }
                g = q.gcd(n);
                k += batch;
            }
            r *= 2;
        }
        if g == *n {
            // Batch overshot a factor; replay one step at a time.
            loop {
                ys = (&ys * &ys + &c) % n;
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if g != *n {
            return Some(g);
        }
        // g == n: the whole cycle collapsed for this c; try the next one.
    }
    unreachable!()
}

/// Complete prime factorization of a nonzero integer with an explicit rho
/// iteration budget. Trial division below 2¹⁴, then Brent rho splitting with
/// Miller-Rabin primality on cofactors.
pub fn factor_with_budget(n: &Integer, mut budget: u64) -> Result<FactoredInteger, FactorError> {
    if n.is_zero() {
        return Err(FactorError::Zero);
    }
    let sign: i8 = if n.is_negative() { -1 } else { 1 };
    let mut m = n.magnitude().clone();
    let mut factors: BTreeMap<Integer, u32> = BTreeMap::new();
    for &p in small_primes() {
        if m.is_one() {
            break;
        }
        let p = BigUint::from(p);
        if &p * &p > m {
            break;
        }
        let mut e = 0u32;
        loop {
            let (q, r) = m.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            m = q;
            e += 1;
        }
        if e > 0 {
            factors.insert(Integer::from(p), e);
        }
    }
    // Split what trial division left with rho, keeping a composite stack.
    let mut pending = Vec::new();
    if !m.is_one() {
        pending.push(m);
    }
    while let Some(m) = pending.pop() {
        if is_prime(&m) {
            *factors.entry(Integer::from(m)).or_insert(0) += 1;
            continue;
        }
        // Perfect squares arise from the recursion; peel them cheaply.
        let r = m.sqrt();
        if &r * &r == m {
            pending.push(r.clone());
            pending.push(r);
            continue;
        }
        match brent_rho(&m, &mut budget) {
            Some(d) => {
                pending.push(&m / &d);
                pending.push(d);
            }
            None => return Err(FactorError::BudgetExhausted(Integer::from(m))),
        }
    }
    Ok(FactoredInteger { sign, factors })
}

/// [`factor_with_budget`] at the default budget.
pub fn factor(n: &Integer) -> Result<FactoredInteger, FactorError> {
    factor_with_budget(n, DEFAULT_FACTOR_BUDGET)
}

// ---- Square classes ----

/// An element of ℚ*/ℚ*² as its squarefree signed integer representative,
/// or the marker for a zero entry (which represents no class at all).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SquareClass {
    /// Degenerate entry: the represented rational was 0.
    Zero,
    /// Squarefree signed nonzero integer.
    Of(Integer),
}

impl SquareClass {
    /// The trivial class of squares.
    pub fn one() -> Self {
        SquareClass::Of(Integer::one())
    }

    pub fn is_zero_marker(&self) -> bool {
        matches!(self, SquareClass::Zero)
    }

    /// True for the class of squares.
    pub fn is_trivial(&self) -> bool {
        matches!(self, SquareClass::Of(v) if v.is_one())
    }

    pub fn value(&self) -> Option<&Integer> {
        match self {
            SquareClass::Zero => None,
            SquareClass::Of(v) => Some(v),
        }
    }

    /// Group law of ℚ*/ℚ*²; Zero absorbs. With a, b squarefree the product
    /// (a/g)(b/g) with g = gcd(a, b) is again squarefree.
    pub fn product(&self, other: &SquareClass) -> SquareClass {
        match (self, other) {
            (SquareClass::Zero, _) | (_, SquareClass::Zero) => SquareClass::Zero,
            (SquareClass::Of(a), SquareClass::Of(b)) => {
                let g = a.gcd(b);
                SquareClass::Of((a / &g) * (b / &g))
            }
        }
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SquareClass::Zero => write!(f, "ZERO"),
            SquareClass::Of(v) => write!(f, "{v}"),
        }
    }
}

/// Exact test for q being the square of a rational: both numerator and
/// denominator must be perfect squares. No factorization involved.
pub fn is_rational_square(q: &Rational) -> bool {
    if q.is_negative() {
        return false;
    }
    let num = q.numer().magnitude();
    let den = q.denom().magnitude();
    let rn = num.sqrt();
    let rd = den.sqrt();
    &rn * &rn == *num && &rd * &rd == *den
}

/// Squarefree part with an explicit factorization budget.
///
/// q = num/den in lowest terms has the same class as num·den, and the
/// squarefree kernels of num and den are coprime, so their product is the
/// squarefree representative directly.
pub fn try_squarefree_part(q: &Rational, budget: u64) -> Result<SquareClass, FactorError> {
    if q.is_zero() {
        return Ok(SquareClass::Zero);
    }
    let num = factor_with_budget(q.numer(), budget)?;
    let den = factor_with_budget(q.denom(), budget)?;
    Ok(SquareClass::Of(
        num.squarefree_kernel() * den.squarefree_kernel(),
    ))
}

/// The unique squarefree integer s with q/s a rational square (sign of s
/// matching q), or the Zero marker for q = 0.
///
/// Panics if the default factorization budget runs out; use
/// [`try_squarefree_part`] where graceful degradation is needed.
pub fn squarefree_part(q: &Rational) -> SquareClass {
    try_squarefree_part(q, DEFAULT_FACTOR_BUDGET).expect("factorization budget exhausted")
}

// ---- p-adic valuations ----

fn valuation_of_integer(n: &Integer, p: &Integer) -> i64 {
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// v with q = p^v · u/w where p divides neither u nor w.
pub fn padic_valuation(q: &Rational, p: &Integer) -> Result<i64, ValuationError> {
    if q.is_zero() {
        return Err(ValuationError::ZeroArgument);
    }
    if p.is_negative() || !is_prime(p.magnitude()) {
        return Err(ValuationError::NotPrime(p.clone()));
    }
    Ok(valuation_of_integer(q.numer(), p) - valuation_of_integer(q.denom(), p))
}

// ---- F₂ span of square classes ----

/// Incremental row reduction of square classes inside ℚ*/ℚ*².
///
/// Coordinates over F₂: index 0 is the sign (class of -1), and each new prime
/// seen gets the next index. Inserted positions are counted 1-based so the
/// witness indices can name levels of an adjusted post-critical orbit
/// directly.
#[derive(Clone, Debug, Default)]
pub struct F2Span {
    prime_coord: BTreeMap<Integer, usize>,
    basis: Vec<Vec<u64>>,
    witness: Vec<usize>,
    inserted: usize,
}

fn xor_into(target: &mut Vec<u64>, src: &[u64]) {
    if target.len() < src.len() {
        target.resize(src.len(), 0);
    }
    for (t, s) in target.iter_mut().zip(src) {
        *t ^= s;
    }
}

fn highest_bit(v: &[u64]) -> Option<usize> {
    for (i, w) in v.iter().enumerate().rev() {
        if *w != 0 {
            return Some(i * 64 + 63 - w.leading_zeros() as usize);
        }
    }
    None
}

impl F2Span {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of classes inserted so far (Zero markers included).
    pub fn len(&self) -> usize {
        self.inserted
    }

    pub fn is_empty(&self) -> bool {
        self.inserted == 0
    }

    /// Dimension of the span.
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// 1-based positions of a maximal independent subset, in insertion order.
    pub fn witness(&self) -> &[usize] {
        &self.witness
    }

    /// Advances the position counter for a Zero entry, which carries no class.
    pub fn insert_zero_marker(&mut self) {
        self.inserted += 1;
    }

    /// Inserts a class given directly by its sign and odd-exponent primes.
    /// Returns true when the class enlarged the span.
    pub fn insert_factored(&mut self, negative: bool, odd_primes: &[Integer]) -> bool {
        self.inserted += 1;
        let mut vec: Vec<u64> = Vec::new();
        let set = |bit: usize, vec: &mut Vec<u64>| {
            if vec.len() <= bit / 64 {
                vec.resize(bit / 64 + 1, 0);
            }
            vec[bit / 64] ^= 1u64 << (bit % 64);
        };
        if negative {
            set(0, &mut vec);
        }
        for p in odd_primes {
            let next = self.prime_coord.len() + 1;
            let coord = *self.prime_coord.entry(p.clone()).or_insert(next);
            set(coord, &mut vec);
        }
        // Reduce against the basis; a surviving vector is a new pivot.
        for b in &self.basis {
            if let (Some(hb), Some(hv)) = (highest_bit(b), highest_bit(&vec)) {
                if hb == hv {
                    xor_into(&mut vec, b);
                }
            }
        }
        if highest_bit(&vec).is_none() {
            return false;
        }
        // Keep the basis ordered by pivot so a single pass reduces fully.
        self.basis.push(vec);
        self.basis
            .sort_by_key(|b| std::cmp::Reverse(highest_bit(b)));
        self.witness.push(self.inserted);
        true
    }

    /// Factors the class representative and inserts it.
    pub fn insert_class(&mut self, class: &SquareClass, budget: u64) -> Result<bool, FactorError> {
        match class {
            SquareClass::Zero => {
                self.insert_zero_marker();
                Ok(false)
            }
            SquareClass::Of(v) => {
                let f = factor_with_budget(v, budget)?;
                Ok(self.insert_factored(f.sign < 0, &f.odd_exponent_primes()))
            }
        }
    }
}

/// Dimension of the F₂-span of the classes inside ℚ*/ℚ*², plus a maximal
/// independent subset of 1-based input positions. Zero markers are skipped,
/// the class 1 is the zero vector.
pub fn f2_span_dimension(classes: &[SquareClass]) -> (usize, Vec<usize>) {
    let mut span = F2Span::new();
    for class in classes {
        span.insert_class(class, DEFAULT_FACTOR_BUDGET)
            .expect("factorization budget exhausted");
    }
    (span.dimension(), span.witness().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(Integer::from(n), Integer::from(d))
    }

    fn class_of(n: i64) -> SquareClass {
        SquareClass::Of(Integer::from(n))
    }

    // ---- squarefree_part ----

    #[test]
    fn squarefree_part_examples() {
        assert_eq!(squarefree_part(&rat(1, 2)), class_of(2));
        assert_eq!(squarefree_part(&rat(-1, 2)), class_of(-2));
        assert_eq!(squarefree_part(&rat(18, 1)), class_of(2));
        assert_eq!(squarefree_part(&rat(1, 1)), class_of(1));
        assert_eq!(squarefree_part(&rat(0, 1)), SquareClass::Zero);
    }

    #[test]
    fn squarefree_part_quotient_is_square() {
        for n in [-50i64, -48, -7, 5, 12, 72, 360] {
            for d in [1i64, 2, 9, 25] {
                let q = rat(n, d);
                let s = squarefree_part(&q);
                let s = Rational::from_integer(s.value().unwrap().clone());
                assert!(is_rational_square(&(&q / &s)), "q = {q}");
            }
        }
    }

    // ---- factor ----

    #[test]
    fn factor_examples() {
        let f = factor(&Integer::from(2016)).unwrap();
        assert_eq!(f.sign, 1);
        assert_eq!(
            f.factors,
            [(2, 5u32), (3, 2), (7, 1)]
                .iter()
                .map(|(p, e)| (Integer::from(*p), *e))
                .collect()
        );
        let f = factor(&Integer::from(-12)).unwrap();
        assert_eq!(f.sign, -1);
        assert_eq!(f.reconstruct(), Integer::from(-12));
        let f = factor(&Integer::from(1)).unwrap();
        assert_eq!(f.sign, 1);
        assert!(f.factors.is_empty());
        assert_eq!(factor(&Integer::zero()), Err(FactorError::Zero));
    }

    #[test]
    fn factor_semiprime_beyond_trial_division() {
        // 1000003 and 1000033 are primes above the trial division bound.
        let n = Integer::from(1000003i64) * Integer::from(1000033i64);
        let f = factor(&n).unwrap();
        assert_eq!(f.reconstruct(), n);
        assert_eq!(f.factors.len(), 2);
        assert!(f.factors.values().all(|&e| e == 1));
    }

    #[test]
    fn factor_prime_square() {
        let p = Integer::from(1000003i64);
        let f = factor(&(&p * &p)).unwrap();
        assert_eq!(f.factors.get(&p), Some(&2));
    }

    #[test]
    fn factor_roundtrips_json() {
        let f = factor(&Integer::from(-360)).unwrap();
        assert_eq!(FactoredInteger::from_json(&f.to_json()), Some(f));
    }

    // ---- primality ----

    #[test]
    fn is_prime_small_table() {
        let primes: Vec<u64> = (0..100u64).filter(|&n| is_prime(&n.into())).collect();
        assert_eq!(
            primes,
            vec![
                2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79,
                83, 89, 97
            ]
        );
    }

    #[test]
    fn is_prime_carmichael() {
        assert!(!is_prime(&BigUint::from(561u32)));
        assert!(!is_prime(&BigUint::from(1729u32)));
        assert!(!is_prime(&BigUint::from_u64(3215031751).unwrap()));
    }

    // ---- padic_valuation ----

    #[test]
    fn valuation_examples() {
        let p3 = Integer::from(3);
        let p2 = Integer::from(2);
        let p5 = Integer::from(5);
        assert_eq!(padic_valuation(&rat(18, 1), &p3), Ok(2));
        assert_eq!(padic_valuation(&rat(-1, 2), &p2), Ok(-1));
        assert_eq!(padic_valuation(&rat(-1, 2), &p5), Ok(0));
        assert_eq!(
            padic_valuation(&rat(0, 1), &p2),
            Err(ValuationError::ZeroArgument)
        );
        assert_eq!(
            padic_valuation(&rat(1, 2), &Integer::from(6)),
            Err(ValuationError::NotPrime(Integer::from(6)))
        );
    }

    // ---- f2_span_dimension ----

    #[test]
    fn span_of_worked_triple() {
        // Classes of {1/2, 1/2, -1/2}.
        let classes = vec![class_of(2), class_of(2), class_of(-2)];
        let (dim, witness) = f2_span_dimension(&classes);
        assert_eq!(dim, 2);
        assert_eq!(witness, vec![1, 3]);
    }

    #[test]
    fn span_trivial_and_mixed() {
        assert_eq!(f2_span_dimension(&[class_of(1)]), (0, vec![]));
        let (dim, _) = f2_span_dimension(&[class_of(2), class_of(3), class_of(6)]);
        assert_eq!(dim, 2);
        let (dim, witness) = f2_span_dimension(&[
            SquareClass::Zero,
            class_of(5),
            SquareClass::Zero,
            class_of(5),
        ]);
        assert_eq!(dim, 1);
        assert_eq!(witness, vec![2]);
    }

    #[test]
    fn class_product_is_squarefree() {
        let a = class_of(6);
        let b = class_of(10);
        assert_eq!(a.product(&b), class_of(15));
        assert_eq!(a.product(&SquareClass::Zero), SquareClass::Zero);
        assert_eq!(class_of(-2).product(&class_of(-2)), class_of(1));
    }
}
