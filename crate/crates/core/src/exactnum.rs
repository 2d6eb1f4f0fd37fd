//! Exact rational scalars and dense univariate polynomials over them.
//!
//! Every moment identity is checked in this arithmetic, so nothing here
//! touches floating point except the explicit `*_f64` conversions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always reduced with a positive denominator.
pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Exact conversion of a finite double to a rational.
pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("finite float")
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Renders `r` as `p/q`, also for integers (`3/1`).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p`, `p/q`, or a decimal literal such as `0.25` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: `{s}`"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let numer: BigInt = digits.parse().map_err(|_| bad())?;
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        let value = Rational::new(numer, denom);
        return Ok(if negative { -value } else { value });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

/// Factorials `0!..=size-1` computed once.
#[derive(Debug, Clone)]
pub struct FactorialTable {
    facts: Vec<BigInt>,
}

impl FactorialTable {
    pub const DEFAULT_N_MAX: usize = 128;

    /// Table covering `(2·n_max + 16)!`, enough for every Beta coefficient
    /// with `n ≤ n_max` and moment power `j ≤ n_max + 15`.
    pub fn with_n_max(n_max: usize) -> Self {
        let size = 2 * n_max + 17;
        let mut facts = Vec::with_capacity(size);
        let mut acc = BigInt::one();
        facts.push(acc.clone());
        for m in 1..size {
            acc *= m;
            facts.push(acc.clone());
        }
        Self { facts }
    }

    /// Process-wide table with the default `n_max`.
    pub fn global() -> &'static FactorialTable {
        static TABLE: OnceLock<FactorialTable> = OnceLock::new();
        TABLE.get_or_init(|| FactorialTable::with_n_max(Self::DEFAULT_N_MAX))
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn factorial(&self, m: usize) -> BigInt {
        match self.facts.get(m) {
            Some(f) => f.clone(),
            None => {
                let mut acc = self.facts.last().cloned().unwrap_or_else(BigInt::one);
                for i in self.facts.len().max(1)..=m {
                    acc *= i;
                }
                acc
            }
        }
    }

    pub fn binomial(&self, n: usize, k: i64) -> BigInt {
        if k < 0 || k as usize > n {
            return BigInt::zero();
        }
        let k = k as usize;
        self.factorial(n) / (self.factorial(k) * self.factorial(n - k))
    }
}

pub fn factorial(m: usize) -> BigInt {
    FactorialTable::global().factorial(m)
}

/// `C(n, k)`, zero when `k < 0` or `k > n`.
pub fn binomial(n: usize, k: i64) -> Rational {
    Rational::from_integer(FactorialTable::global().binomial(n, k))
}

/// Dense polynomial in `x`; `coeffs[i]` multiplies `x^i`.
///
/// The coefficient list never ends in a zero; the zero polynomial is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    /// `c · x^power`.
    pub fn monomial(c: Rational, power: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); power + 1];
        coeffs[power] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `x^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coefficient(&self) -> Result<&Rational> {
        self.coeffs.last().ok_or(Error::ZeroPolynomial)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// Integer numerators over the least common denominator.
    fn integer_form(&self) -> (Vec<BigInt>, BigInt) {
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, a| acc.lcm(a.denom()));
        let nums = self
            .coeffs
            .iter()
            .map(|a| a.numer() * (&den / a.denom()))
            .collect();
        (nums, den)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let Some(degree) = self.degree() else {
            return Rational::zero();
        };
        // Homogeneous Horner in p/q keeps every step in the integers.
        let (nums, den) = self.integer_form();
        let (p, q) = (x.numer(), x.denom());
        let mut qpow = BigInt::one();
        let mut acc = nums[degree].clone();
        for a in nums[..degree].iter().rev() {
            qpow *= q;
            acc = acc * p + a * &qpow;
        }
        Rational::new(acc, den * qpow)
    }

    /// Exact evaluation at the rational value of `x`, rounded once at the end.
    pub fn eval_f64(&self, x: f64) -> f64 {
        to_f64(&self.eval(&from_f64(x)))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// `p(1 − x)`.
    pub fn reflect(&self) -> Self {
        let one_minus_x = Self::from_ints(&[1, -1]);
        self.coeffs.iter().rev().fold(Self::zero(), |acc, a| {
            &(&acc * &one_minus_x) + &Self::constant(a.clone())
        })
    }

    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(format_rational).collect()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let abs = c.abs();
            match i {
                0 => write!(f, "{abs}")?,
                _ if abs.is_one() => {}
                _ => write!(f, "{abs}·")?,
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::from_coeffs((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::from_coeffs((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let (lhs, ld) = self.integer_form();
        let (rhs, rd) = rhs.integer_form();
        let mut out = vec![BigInt::zero(); lhs.len() + rhs.len() - 1];
        for (i, a) in lhs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        let den = ld * rd;
        Polynomial::from_coeffs(
            out.into_iter()
                .map(|c| Rational::new(c, den.clone()))
                .collect(),
        )
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial::from_coeffs(self.coeffs.iter().map(|a| -a).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                (&self).$method(rhs)
            }
        }
        impl $tr<Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                self.$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

/// `φ²(x) = x(1 − x)`.
pub fn phi_squared() -> Polynomial {
    Polynomial::from_ints(&[0, 1, -1])
}

/// Exact expansion of `C(n,k)·x^k·(1−x)^(n−k)`; zero outside `0 ≤ k ≤ n`.
pub fn bernstein_poly(n: usize, k: i64) -> Polynomial {
    if k < 0 || k as usize > n {
        return Polynomial::zero();
    }
    let k = k as usize;
    let c = binomial(n, k as i64);
    let mut coeffs = vec![Rational::zero(); n + 1];
    for i in 0..=n - k {
        let term = &c * binomial(n - k, i as i64);
        coeffs[k + i] = if i % 2 == 0 { term } else { -term };
    }
    Polynomial::from_coeffs(coeffs)
}

/// Power-basis form of `Σ_r b[r]·p_{m,r}(x)` with `m = b.len() − 1`.
///
/// Uses `[x^i] = C(m,i)·Δ^i b_0`, so the cost is `O(m²)` rational
/// subtractions and no polynomial products.
pub fn bernstein_to_power(b: &[Rational]) -> Polynomial {
    if b.is_empty() {
        return Polynomial::zero();
    }
    let m = b.len() - 1;
    let mut diffs = b.to_vec();
    let mut out = Vec::with_capacity(m + 1);
    for i in 0..=m {
        out.push(binomial(m, i as i64) * &diffs[0]);
        for r in 0..m - i {
            diffs[r] = &diffs[r + 1] - &diffs[r];
        }
    }
    Polynomial::from_coeffs(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(4, 2), int(6));
        assert_eq!(binomial(5, -1), int(0));
        assert_eq!(binomial(7, 3), int(35));
        assert_eq!(binomial(3, 4), int(0));
    }

    #[test]
    fn binomial_symmetry_and_pascal() {
        for n in 0..=64usize {
            for k in 0..=n as i64 {
                assert_eq!(binomial(n, k), binomial(n, n as i64 - k));
                if n > 0 {
                    assert_eq!(binomial(n, k), binomial(n - 1, k) + binomial(n - 1, k - 1));
                }
            }
        }
    }

    #[test]
    fn factorial_past_table_end() {
        let table = FactorialTable::with_n_max(2);
        assert_eq!(table.len(), 21);
        assert_eq!(table.factorial(25), factorial(25));
        assert_eq!(table.binomial(30, 15), BigInt::from(155_117_520u64));
    }

    #[test]
    fn poly_arith_examples() {
        let one = Polynomial::from_ints(&[1]);
        let x = Polynomial::x();
        assert_eq!(&one + &x, Polynomial::from_ints(&[1, 1]));
        assert_eq!(&x * &Polynomial::from_ints(&[1, -1]), phi_squared());
        assert_eq!(
            Polynomial::from_ints(&[0, 0, 1]).derivative(),
            Polynomial::from_ints(&[0, 2])
        );
        assert_eq!(phi_squared().eval(&rat(1, 2)), rat(1, 4));
        assert_eq!(&x - &x, Polynomial::zero());
        assert_eq!(Polynomial::from_ints(&[1, 2, 0, 0]).degree(), Some(1));
        assert_eq!(Polynomial::zero().degree(), None);
        assert_eq!(
            Polynomial::zero().leading_coefficient(),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn bernstein_poly_examples() {
        assert_eq!(bernstein_poly(1, 0), Polynomial::from_ints(&[1, -1]));
        assert_eq!(bernstein_poly(2, 1), Polynomial::from_ints(&[0, 2, -2]));
        assert!(bernstein_poly(3, 5).is_zero());
        assert!(bernstein_poly(3, -1).is_zero());
    }

    #[test]
    fn bernstein_partition_of_unity() {
        for n in 0..=64usize {
            let sum =
                (0..=n as i64).fold(Polynomial::zero(), |acc, k| &acc + &bernstein_poly(n, k));
            assert_eq!(sum, Polynomial::one(), "n = {n}");
        }
    }

    #[test]
    fn bernstein_to_power_matches_expansion() {
        let b: Vec<Rational> = [3, -1, 4, 1, -5, 9].iter().map(|&v| rat(v, 7)).collect();
        let m = b.len() - 1;
        let direct = b
            .iter()
            .enumerate()
            .fold(Polynomial::zero(), |acc, (r, c)| {
                &acc + &bernstein_poly(m, r as i64).scale(c)
            });
        assert_eq!(bernstein_to_power(&b), direct);
    }

    #[test]
    fn reflect_and_pow() {
        let p = Polynomial::from_ints(&[1, 2, 3]);
        // p(1−x) = 1 + 2(1−x) + 3(1−x)² = 6 − 8x + 3x²
        assert_eq!(p.reflect(), Polynomial::from_ints(&[6, -8, 3]));
        assert_eq!(
            Polynomial::from_ints(&[1, 1]).pow(3),
            Polynomial::from_ints(&[1, 3, 3, 1])
        );
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-1").unwrap(), int(-1));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), rat(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(format_rational(&int(3)), "3/1");
        assert_eq!(format_rational(&rat(-2, 4)), "-1/2");
    }

    #[test]
    fn to_f64_rounds_correctly() {
        let third = rat(1, 3);
        assert_eq!(to_f64(&third), 1.0 / 3.0);
        assert_eq!(to_f64(&from_f64(0.1)), 0.1);
    }

    fn small_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((-20i64..20, 1i64..6), 0..=9).prop_map(|cs| {
            Polynomial::from_coeffs(cs.into_iter().map(|(p, q)| rat(p, q)).collect())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn ring_axioms(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn derivative_is_linear_and_leibniz(a in small_poly(), b in small_poly()) {
            prop_assert_eq!((&a + &b).derivative(), &a.derivative() + &b.derivative());
            prop_assert_eq!((&a * &b).derivative(), &(&a.derivative() * &b) + &(&a * &b.derivative()));
        }

        #[test]
        fn eval_is_a_ring_homomorphism(a in small_poly(), b in small_poly(), p in -9i64..9, q in 1i64..9) {
            let x = rat(p, q);
            prop_assert_eq!((&a * &b).eval(&x), a.eval(&x) * b.eval(&x));
            prop_assert_eq!((&a - &b).eval(&x), a.eval(&x) - b.eval(&x));
        }
    }
}
