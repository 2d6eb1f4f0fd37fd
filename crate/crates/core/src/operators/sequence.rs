use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{format_rational, int, parse_rational, to_f64, Polynomial, Rational};

/// `c + d/n` with exact rational parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineInvN {
    pub c: Rational,
    pub d: Rational,
}

impl AffineInvN {
    pub fn constant(c: Rational) -> Self {
        Self {
            c,
            d: Rational::zero(),
        }
    }

    pub fn at(&self, n: usize) -> Rational {
        &self.c + &self.d / int(n as i64)
    }
}

impl fmt::Display for AffineInvN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.d.is_zero() {
            write!(f, "{}", format_rational(&self.c))
        } else {
            write!(
                f,
                "{} + {} / n",
                format_rational(&self.c),
                format_rational(&self.d)
            )
        }
    }
}

/// Accepts `p/q` or `p/q + r/s / n` (also `p/q - r/s / n`).
impl FromStr for AffineInvN {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some(body) = s.strip_suffix("/ n").or_else(|| s.strip_suffix("/n")) else {
            return Ok(Self::constant(parse_rational(s)?));
        };
        // split at the last top-level '+' or '-' that is not a leading sign
        let body = body.trim_end();
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(i, ch)| {
                (ch == '+' || ch == '-') && !body[..i].trim_end().ends_with(['/', '+', '-'])
            })
            .map(|(i, _)| i)
            .last()
            .ok_or_else(|| Error::Parse(format!("cannot parse sequence term `{s}`")))?;
        let c = parse_rational(&body[..split])?;
        let d = parse_rational(&body[split + 1..])?;
        let d = if body.as_bytes()[split] == b'-' {
            -d
        } else {
            d
        };
        Ok(Self { c, d })
    }
}

/// The pair `(a0(n), a1(n))` defining `a(x, n) = a1(n)·x + a0(n)`.
///
/// Construction enforces `2·a0(n) + a1(n) = 1` identically in `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SequencePair {
    a0: AffineInvN,
    a1: AffineInvN,
}

impl SequencePair {
    pub fn new(a0: AffineInvN, a1: AffineInvN) -> Result<Self> {
        let two = int(2);
        let c_sum = &two * &a0.c + &a1.c;
        let d_sum = &two * &a0.d + &a1.d;
        if !c_sum.is_one() || !d_sum.is_zero() {
            let value = if d_sum.is_zero() {
                format_rational(&c_sum)
            } else {
                format!(
                    "{} + {} / n",
                    format_rational(&c_sum),
                    format_rational(&d_sum)
                )
            };
            return Err(Error::Constraint { value });
        }
        Ok(Self { a0, a1 })
    }

    /// Constant sequences `(a0, a1)`.
    pub fn constant(a0: Rational, a1: Rational) -> Result<Self> {
        Self::new(AffineInvN::constant(a0), AffineInvN::constant(a1))
    }

    /// Parses the two sequence strings.
    pub fn parse(a0: &str, a1: &str) -> Result<Self> {
        Self::new(a0.parse()?, a1.parse()?)
    }

    /// `(1, −1)`: reduces the modified operator to classical Durrmeyer.
    pub fn classical() -> Self {
        Self::constant(int(1), int(-1)).expect("constraint holds")
    }

    pub fn a0(&self) -> &AffineInvN {
        &self.a0
    }

    pub fn a1(&self) -> &AffineInvN {
        &self.a1
    }

    pub fn at(&self, n: usize) -> (Rational, Rational) {
        (self.a0.at(n), self.a1.at(n))
    }

    pub fn at_f64(&self, n: usize) -> (f64, f64) {
        let (a0, a1) = self.at(n);
        (to_f64(&a0), to_f64(&a1))
    }

    /// `a(x, n)` as an exact polynomial in `x`.
    pub fn weight_poly(&self, n: usize) -> Polynomial {
        let (a0, a1) = self.at(n);
        Polynomial::from_coeffs(vec![a0, a1])
    }

    /// `a0 ≥ 0` and `a0 + a1 ≥ 0` at `n`, i.e. `a(x, n) ≥ 0` on `[0, 1]`.
    pub fn nonnegative_at(&self, n: usize) -> bool {
        let (a0, a1) = self.at(n);
        a0 >= Rational::zero() && &a0 + &a1 >= Rational::zero()
    }
}

impl fmt::Display for SequencePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a0, self.a1)
    }
}
