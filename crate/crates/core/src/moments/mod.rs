//! Exact images of monomials under every operator, central moments, and
//! identity verification against printed closed forms.
//!
//! Everything here is computed from the Beta-integral coefficients
//! `(n+1)∫ p_{n,k}(u)u^j du` with exact rational arithmetic. The only
//! polynomial products are the weight factors `a(x,n)`; each Bernstein sum
//! is converted to power form through forward differences.

pub mod errata;

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::monomial_coefficient;
use crate::error::{Error, Result};
use crate::exactnum::{
    bernstein_poly, bernstein_to_power, binomial, format_rational, int, phi_squared, rat,
    Polynomial, Rational,
};
use crate::operators::{OperatorDescriptor, OperatorKind, OperatorSpec, SequencePair};

pub use errata::{run_errata, ErrataConfig, ErrataEntry, ErrataLedger};

/// Size limits for the exact engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactCaps {
    pub max_power: usize,
    pub max_n: usize,
}

impl Default for ExactCaps {
    fn default() -> Self {
        Self {
            max_power: 12,
            max_n: 128,
        }
    }
}

impl ExactCaps {
    fn check(&self, n: usize, power: usize) -> Result<()> {
        if power > self.max_power {
            return Err(Error::CapExceeded {
                what: "power",
                value: power,
                cap: self.max_power,
            });
        }
        if n > self.max_n {
            return Err(Error::CapExceeded {
                what: "n",
                value: n,
                cap: self.max_n,
            });
        }
        Ok(())
    }
}

/// `c_k = (n+1)∫ p_{n,k} t^j` for `k = 0..=n`.
pub fn beta_coefficients(n: usize, j: usize) -> Vec<Rational> {
    (0..=n)
        .map(|k| monomial_coefficient(n, k, j).expect("k ≤ n"))
        .collect()
}

/// Weight polynomials `(a_0, a_1, a_2)(x, n)` of the second-order operator.
pub fn m2_weight_polys(n: usize) -> [Polynomial; 3] {
    let c = phi_squared().scale(&int(n as i64 + 8));
    let a0 = Polynomial::from_coeffs(vec![rat(3, 2), int(-2)]) - &c;
    let a1 = c.scale(&int(2));
    let a2 = Polynomial::from_coeffs(vec![rat(-1, 2), int(2)]) - &c;
    [a0, a1, a2]
}

/// Exact `A_jc(t^j; x) = Σ_r p_{n−2,r}(x)·c_{r+jc}` for `jc ∈ {0,1,2}`.
pub fn component_monomial(jc: usize, n: usize, j: usize) -> Result<Polynomial> {
    if n < 3 {
        return Err(Error::Domain(format!("components need n ≥ 3, got {n}")));
    }
    if jc > 2 {
        return Err(Error::Domain(format!("component index {jc} not in 0..=2")));
    }
    let c = beta_coefficients(n, j);
    Ok(bernstein_to_power(&c[jc..jc + n - 1]))
}

/// Exact `Operator(t^j; x)` with the default caps.
pub fn operator_monomial(spec: &OperatorSpec, j: usize) -> Result<Polynomial> {
    operator_monomial_capped(spec, j, ExactCaps::default())
}

pub fn operator_monomial_capped(
    spec: &OperatorSpec,
    j: usize,
    caps: ExactCaps,
) -> Result<Polynomial> {
    let n = spec.n();
    caps.check(n, j)?;
    match spec.kind() {
        OperatorKind::Bernstein => {
            let b: Vec<Rational> = (0..=n)
                .map(|k| num_traits::pow(rat(k as i64, n as i64), j))
                .collect();
            Ok(bernstein_to_power(&b))
        }
        OperatorKind::Durrmeyer => Ok(bernstein_to_power(&beta_coefficients(n, j))),
        OperatorKind::M1 => {
            let seq = spec.seq().expect("m1 carries a sequence");
            let c = beta_coefficients(n, j);
            let a = seq.weight_poly(n);
            let left = bernstein_to_power(&c[..n]);
            let right = bernstein_to_power(&c[1..]);
            Ok(&a * &left + &a.reflect() * &right)
        }
        OperatorKind::M2 => {
            let weights = m2_weight_polys(n);
            let mut out = Polynomial::zero();
            for (jc, a) in weights.iter().enumerate() {
                out = out + a * &component_monomial(jc, n, j)?;
            }
            Ok(out)
        }
        OperatorKind::Bezier => {
            let mu = spec.mu();
            if mu.fract() != 0.0 {
                return Err(Error::Domain(format!(
                    "exact engine needs an integer Bézier exponent, got {mu}"
                )));
            }
            let seq = spec.seq().expect("bezier carries a sequence");
            let c = beta_coefficients(n, j);
            // Σ_k c_k (J_k^μ − J_{k+1}^μ) = c_0 + Σ_{k≥1} (c_k − c_{k−1}) J_k^μ
            let rows = m1_weight_polys(n, seq);
            let mut tail = Polynomial::zero();
            let mut out = Polynomial::zero();
            for k in (1..=n).rev() {
                tail = tail + &rows[k];
                let diff = &c[k] - &c[k - 1];
                if !diff.is_zero() {
                    out = out + tail.pow(mu as u32).scale(&diff);
                }
            }
            Ok(out + Polynomial::constant(c[0].clone()))
        }
    }
}

/// Exact `p^{M,1}_{n,k}` rows as polynomials.
pub fn m1_weight_polys(n: usize, seq: &SequencePair) -> Vec<Polynomial> {
    let a = seq.weight_poly(n);
    let ar = a.reflect();
    (0..=n)
        .map(|k| &a * &bernstein_poly(n - 1, k as i64) + &ar * &bernstein_poly(n - 1, k as i64 - 1))
        .collect()
}

/// `Σ_{i=0}^{m} C(m,i)(−x)^{m−i}·raw[i]`.
fn centralize(raw: &[Polynomial], m: usize) -> Polynomial {
    let mut out = Polynomial::zero();
    for (i, p) in raw.iter().enumerate().take(m + 1) {
        let mut c = binomial(m, i as i64);
        if (m - i) % 2 == 1 {
            c = -c;
        }
        out = out + &Polynomial::monomial(c, m - i) * p;
    }
    out
}

/// Exact `Operator((t − x)^m; x)`.
pub fn central_moment(spec: &OperatorSpec, m: usize) -> Result<Polynomial> {
    let raw = (0..=m)
        .map(|j| operator_monomial(spec, j))
        .collect::<Result<Vec<_>>>()?;
    Ok(centralize(&raw, m))
}

/// Exact `A_jc((t − x)^m; x)`.
pub fn component_central_moment(jc: usize, n: usize, m: usize) -> Result<Polynomial> {
    let raw = (0..=m)
        .map(|j| component_monomial(jc, n, j))
        .collect::<Result<Vec<_>>>()?;
    Ok(centralize(&raw, m))
}

/// Highest-degree coefficient of a nonzero polynomial.
pub fn leading_coefficient(p: &Polynomial) -> Result<Rational> {
    p.leading_coefficient().cloned()
}

/// `Π_{j=1}^{k} (n−j−1)/(n+j+1)`.
pub fn product_formula(n: usize, k: usize) -> Rational {
    (1..=k).fold(Rational::one(), |acc, j| {
        acc * rat(n as i64 - j as i64 - 1, (n + j + 1) as i64)
    })
}

/// Raw and central images of monomials for one operator.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub spec: OperatorDescriptor,
    pub n: usize,
    pub entries: BTreeMap<usize, Polynomial>,
    pub central_entries: BTreeMap<usize, Polynomial>,
    /// `A_jc(t^k)` keyed by `(jc, k)`; filled for the second-order operator.
    pub components: BTreeMap<(usize, usize), Polynomial>,
}

impl MomentTable {
    /// A table with no entries.
    pub fn empty(spec: &OperatorSpec) -> Self {
        Self {
            spec: spec.descriptor(),
            n: spec.n(),
            entries: BTreeMap::new(),
            central_entries: BTreeMap::new(),
            components: BTreeMap::new(),
        }
    }

    /// Entries and central entries for powers `0..=max_power`.
    pub fn build(spec: &OperatorSpec, max_power: usize) -> Result<Self> {
        let raw: Vec<Polynomial> = (0..=max_power)
            .into_par_iter()
            .map(|j| operator_monomial(spec, j))
            .collect::<Result<_>>()?;
        let mut table = Self::empty(spec);
        for m in 0..=max_power {
            table.central_entries.insert(m, centralize(&raw, m));
        }
        table.entries = raw.into_iter().enumerate().collect();
        if spec.kind() == OperatorKind::M2 {
            let n = spec.n();
            let cells: Vec<((usize, usize), Polynomial)> = (0..3)
                .flat_map(|jc| (0..=max_power).map(move |k| (jc, k)))
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|(jc, k)| Ok(((jc, k), component_monomial(jc, n, k)?)))
                .collect::<Result<_>>()?;
            table.components = cells.into_iter().collect();
        }
        Ok(table)
    }

    pub fn entry(&self, j: usize) -> Result<&Polynomial> {
        self.entries
            .get(&j)
            .ok_or_else(|| Error::MissingEntry(format!("operator image of t^{j}")))
    }

    pub fn central(&self, m: usize) -> Result<&Polynomial> {
        self.central_entries
            .get(&m)
            .ok_or_else(|| Error::MissingEntry(format!("central moment of order {m}")))
    }

    pub fn component(&self, jc: usize, k: usize) -> Result<&Polynomial> {
        self.components
            .get(&(jc, k))
            .ok_or_else(|| Error::MissingEntry(format!("component A_{jc}(t^{k})")))
    }

    /// `(power, coefficients as "p/q")` rows, ascending in power.
    pub fn rows(&self) -> Vec<(usize, Vec<String>)> {
        self.entries
            .iter()
            .map(|(j, p)| (*j, p.coeff_strings()))
            .collect()
    }
}

/// Right side of the moment recurrence divided by `(n+k+2)`:
///
/// `(n+k+2)D(t^{k+1}) = φ²·D'(t^k) + (k+3+(n−2)x)·D(t^k)
///     − φ²(a_0'μ_k + a_1'λ_k + a_2'η_k) − 2a_0μ_k − a_1λ_k`
///
/// with `μ_k, λ_k, η_k = A_0, A_1, A_2` applied to `t^k`.
pub fn recurrence_step(n: usize, k: usize, table: &MomentTable) -> Result<Polynomial> {
    if table.spec.kind != OperatorKind::M2 {
        return Err(Error::InvalidPairing {
            theorem: "moment recurrence".into(),
            kind: table.spec.kind.to_string(),
        });
    }
    if table.n != n {
        return Err(Error::Domain(format!(
            "table is for n = {}, not {n}",
            table.n
        )));
    }
    let d = table.entry(k)?;
    let mu = table.component(0, k)?;
    let lambda = table.component(1, k)?;
    let eta = table.component(2, k)?;
    let [a0, a1, a2] = m2_weight_polys(n);
    let phi2 = phi_squared();
    let lin = Polynomial::from_coeffs(vec![int(k as i64 + 3), int(n as i64 - 2)]);
    let corrections = &(&a0.derivative() * mu + &a1.derivative() * lambda) + &a2.derivative() * eta;
    let rhs = &phi2 * &d.derivative() + &lin * d
        - &phi2 * &corrections
        - (&a0 * mu).scale(&int(2))
        - &a1 * lambda;
    Ok(rhs.scale(&rat(1, (n + k + 2) as i64)))
}

/// `T_r = A_jc((t−x)^r; x)` and `φ²·d/dw A_jc((t−x)^r; w)|_{w=x}`, with `x`
/// held fixed inside `(t−x)^r` while differentiating.
fn central_with_derivative(jc: usize, n: usize, r: usize) -> Result<[Polynomial; 3]> {
    let raw = (0..=r + 1)
        .map(|j| component_monomial(jc, n, j))
        .collect::<Result<Vec<_>>>()?;
    let mut partial = Polynomial::zero();
    for (i, p) in raw.iter().enumerate().take(r + 1) {
        let mut c = binomial(r, i as i64);
        if (r - i) % 2 == 1 {
            c = -c;
        }
        partial = partial + &Polynomial::monomial(c, r - i) * &p.derivative();
    }
    let previous = if r == 0 {
        Polynomial::zero()
    } else {
        centralize(&raw, r - 1)
    };
    Ok([centralize(&raw, r), previous, &phi_squared() * &partial])
}

/// Printed central-moment recurrence for `A_0`, right side divided by `(n+r+2)`:
///
/// `φ²·T_r' − x·T_r + ((r+1)(1−2x) + rφ²)·T_{r−1}`.
pub fn component_central_recurrence_step(n: usize, r: usize) -> Result<Polynomial> {
    if r == 0 {
        return Err(Error::Domain("recurrence needs r ≥ 1".into()));
    }
    let [current, previous, dphi] = central_with_derivative(0, n, r)?;
    let r_ = r as i64;
    let factor = Polynomial::from_ints(&[r_ + 1, -2 * (r_ + 1)]) + phi_squared().scale(&int(r_));
    let rhs = dphi - &Polynomial::x() * &current + &factor * &previous;
    Ok(rhs.scale(&rat(1, (n + r + 2) as i64)))
}

/// Central-moment recurrence for `A_jc` derived from
/// `φ²(u)p'_{n,k}(u) = (k − nu)p_{n,k}(u)` and integration by parts:
///
/// `(n+r+2)T_{r+1} = φ²·T_r' + ((r+1)(1−2x) − 2x + jc)·T_r + rφ²·T_{r−1}`.
pub fn component_central_recurrence_corrected(jc: usize, n: usize, r: usize) -> Result<Polynomial> {
    if r == 0 {
        return Err(Error::Domain("recurrence needs r ≥ 1".into()));
    }
    let [current, previous, dphi] = central_with_derivative(jc, n, r)?;
    let r_ = r as i64;
    let factor = Polynomial::from_ints(&[r_ + 1 + jc as i64, -2 * (r_ + 1) - 2]);
    let rhs = dphi + &factor * &current + (&phi_squared() * &previous).scale(&int(r_));
    Ok(rhs.scale(&rat(1, (n + r + 2) as i64)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Confirmed,
    Refuted,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Confirmed => "confirmed",
            Verdict::Refuted => "refuted",
        })
    }
}

/// Comparison of a printed closed form against the exact engine.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub identity_name: String,
    pub n: Option<usize>,
    pub sequence: Option<String>,
    pub printed_form: Polynomial,
    pub oracle_form: Polynomial,
    pub residual: Polynomial,
    pub verdict: Verdict,
}

impl IdentityReport {
    pub fn at(mut self, n: usize, sequence: Option<&SequencePair>) -> Self {
        self.n = Some(n);
        self.sequence = sequence.map(ToString::to_string);
        self
    }

    pub fn entry(&self) -> ErrataEntry {
        ErrataEntry {
            identity_name: self.identity_name.clone(),
            n: self.n,
            sequence: self.sequence.clone(),
            verdict: self.verdict,
            residual_coefficients: self.residual.coeffs().iter().map(format_rational).collect(),
        }
    }
}

/// `residual = oracle − printed`; confirmed iff the residual is zero.
pub fn verify_identity(name: &str, oracle: Polynomial, printed: Polynomial) -> IdentityReport {
    let residual = &oracle - &printed;
    let verdict = if residual.is_zero() {
        Verdict::Confirmed
    } else {
        Verdict::Refuted
    };
    IdentityReport {
        identity_name: name.to_string(),
        n: None,
        sequence: None,
        printed_form: printed,
        oracle_form: oracle,
        residual,
        verdict,
    }
}
