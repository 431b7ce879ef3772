//! Dense univariate polynomials, generic over the coefficient scalar.
//!
//! Coefficients are stored low-to-high with trailing zeros trimmed, so the
//! zero polynomial is the empty vector and `degree` is `None` for it. The
//! same core is instantiated at [`Rational`] (dynamics, Chebyshev forms), at
//! [`Integer`] (denominator-cleared preimage polynomials, cyclotomics), and
//! at `f64` in tests.

use num_integer::Integer as _;
use num_traits::{FromPrimitive, One, Signed, Zero};

use crate::{Integer, Rational};

/// Dense polynomial over T, low-to-high coefficients, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

/// Polynomial over the exact rationals.
pub type RatPolynomial = Polynomial<Rational>;

impl<T: Zero> Polynomial<T> {
    /// Builds from low-to-high coefficients, trimming trailing zeros.
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn constant(c: T) -> Self {
        Polynomial::new(vec![c])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }
}

impl<T: Zero + Clone> Polynomial<T> {
    /// Coefficient of x^k (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }
}

impl<T: Zero + One> Polynomial<T> {
    pub fn one() -> Self {
        Polynomial::new(vec![T::one()])
    }

    pub fn x() -> Self {
        Polynomial::new(vec![T::zero(), T::one()])
    }

    /// c · x^k.
    pub fn monomial(c: T, k: usize) -> Self {
        let mut coeffs = Vec::with_capacity(k + 1);
        for _ in 0..k {
            coeffs.push(T::zero());
        }
        coeffs.push(c);
        Polynomial::new(coeffs)
    }
}

impl<T> Polynomial<T>
where
    T: Zero + Clone,
{
    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) + other.coeff(k));
        }
        Polynomial::new(coeffs)
    }
}

impl<T> Polynomial<T>
where
    T: Zero + Clone + std::ops::Neg<Output = T>,
{
    pub fn neg(&self) -> Self {
        Polynomial::new(self.coeffs.iter().cloned().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

impl<T> Polynomial<T>
where
    T: Zero + Clone + std::ops::Mul<Output = T>,
{
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                let prod = a.clone() * b.clone();
                let slot = std::mem::replace(&mut coeffs[i + j], T::zero());
                coeffs[i + j] = slot + prod;
            }
        }
        Polynomial::new(coeffs)
    }

    pub fn scale(&self, s: &T) -> Self {
        Polynomial::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    /// self ∘ inner, by Horner over the outer coefficients.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = Polynomial::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&Polynomial::constant(c.clone()));
        }
        acc
    }
}

impl<T> Polynomial<T>
where
    T: Zero + Clone + std::ops::Mul<Output = T> + FromPrimitive,
{
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.clone() * T::from_usize(k).expect("small index fits in scalar"))
            .collect();
        Polynomial::new(coeffs)
    }
}

impl<T> Polynomial<T>
where
    T: Zero + One + Clone + PartialEq + std::ops::Mul<Output = T> + std::ops::Sub<Output = T>,
{
    /// Long division by a monic divisor, exact over any commutative ring.
    /// Returns None when the divisor is not monic (or is constant zero).
    pub fn div_rem_by_monic(&self, divisor: &Self) -> Option<(Self, Self)> {
        if divisor.leading() != Some(&T::one()) {
            return None;
        }
        let d = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= d {
            return Some((Polynomial::zero(), self.clone()));
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![T::zero(); self.coeffs.len() - d];
        for k in (d..rem.len()).rev() {
            let q = rem[k].clone();
            if q.is_zero() {
                continue;
            }
            quot[k - d] = q.clone();
            rem[k] = T::zero();
            for (j, b) in divisor.coeffs.iter().take(d).enumerate() {
                let sub = q.clone() * b.clone();
                rem[k - d + j] = rem[k - d + j].clone() - sub;
            }
        }
        rem.truncate(d);
        Some((Polynomial::new(quot), Polynomial::new(rem)))
    }
}

// ---- Rational-specific helpers ----

impl Polynomial<Rational> {
    /// JSON array of rational strings, low-to-high.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.coeffs
                .iter()
                .map(|c| serde_json::Value::String(c.to_string()))
                .collect(),
        )
    }

    pub fn from_json(v: &serde_json::Value) -> Option<Self> {
        let coeffs = v
            .as_array()?
            .iter()
            .map(|c| c.as_str()?.parse::<Rational>().ok())
            .collect::<Option<Vec<_>>>()?;
        Some(Polynomial::new(coeffs))
    }
}

// ---- IntPolynomial ----

/// Primitive integer polynomial: content 1, positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial(Polynomial<Integer>);

impl IntPolynomial {
    /// Normalizes any nonzero integer polynomial: divides out the content and
    /// flips the sign so the leading coefficient is positive. None on zero.
    pub fn new(coeffs: Vec<Integer>) -> Option<Self> {
        let p = Polynomial::new(coeffs);
        if p.is_zero() {
            return None;
        }
        let mut content = Integer::zero();
        for c in p.coeffs() {
            content = content.gcd(c);
        }
        if p.leading().unwrap().is_negative() {
            content = -content;
        }
        Some(IntPolynomial(Polynomial::new(
            p.coeffs().iter().map(|c| c / &content).collect(),
        )))
    }

    /// Clears denominators of a nonzero rational polynomial.
    pub fn from_rational(p: &Polynomial<Rational>) -> Option<Self> {
        let mut lcm = Integer::one();
        for c in p.coeffs() {
            lcm = lcm.lcm(c.denom());
        }
        Some(
            Self::new(
                p.coeffs()
                    .iter()
                    .map(|c| c.numer() * (&lcm / c.denom()))
                    .collect(),
            )
            .expect("nonzero input stays nonzero"),
        )
    }

    pub fn poly(&self) -> &Polynomial<Integer> {
        &self.0
    }

    pub fn coeffs(&self) -> &[Integer] {
        self.0.coeffs()
    }

    pub fn degree(&self) -> usize {
        self.0.degree().expect("IntPolynomial is nonzero")
    }

    pub fn leading(&self) -> &Integer {
        self.0.leading().expect("IntPolynomial is nonzero")
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    /// Product of primitive polynomials is primitive (Gauss), so no
    /// renormalization is needed.
    pub fn mul(&self, other: &Self) -> Self {
        IntPolynomial(self.0.mul(&other.0))
    }

    /// Exact quotient by a monic divisor, when the remainder vanishes.
    pub fn div_exact_monic(&self, divisor: &Self) -> Option<Self> {
        let (q, r) = self.0.div_rem_by_monic(&divisor.0)?;
        if !r.is_zero() {
            return None;
        }
        Some(IntPolynomial(q))
    }

    /// JSON array of integer strings, low-to-high.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.coeffs()
                .iter()
                .map(|c| serde_json::Value::String(c.to_string()))
                .collect(),
        )
    }

    pub fn from_json(v: &serde_json::Value) -> Option<Self> {
        let coeffs = v
            .as_array()?
            .iter()
            .map(|c| c.as_str()?.parse::<Integer>().ok())
            .collect::<Option<Vec<_>>>()?;
        Self::new(coeffs)
    }
}
