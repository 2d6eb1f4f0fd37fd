//! Batch verification of printed moment formulas.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    central_moment, component_central_moment, component_central_recurrence_corrected,
    component_central_recurrence_step, component_monomial, m2_weight_polys, operator_monomial,
    product_formula, recurrence_step, verify_identity, IdentityReport, MomentTable, Verdict,
};
use crate::error::Result;
use crate::exactnum::{int, phi_squared, rat, Polynomial};
use crate::operators::{OperatorSpec, SequencePair};

/// One line of the JSON errata report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrataEntry {
    pub identity_name: String,
    pub n: Option<usize>,
    pub sequence: Option<String>,
    pub verdict: Verdict,
    pub residual_coefficients: Vec<String>,
}

/// Ordered collection of identity reports.
#[derive(Debug, Clone, Default)]
pub struct ErrataLedger {
    reports: Vec<IdentityReport>,
}

impl ErrataLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, report: IdentityReport) {
        self.reports.push(report);
    }

    pub fn extend(&mut self, reports: impl IntoIterator<Item = IdentityReport>) {
        self.reports.extend(reports);
    }

    pub fn reports(&self) -> &[IdentityReport] {
        &self.reports
    }

    pub fn entries(&self) -> Vec<ErrataEntry> {
        self.reports.iter().map(IdentityReport::entry).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.entries()).expect("entries serialize")
    }

    /// Reports for one identity name.
    pub fn by_name<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a IdentityReport> + 'a {
        self.reports.iter().filter(move |r| r.identity_name == name)
    }

    /// `name → (confirmed, refuted)` counts.
    pub fn summary(&self) -> BTreeMap<String, (usize, usize)> {
        let mut out: BTreeMap<String, (usize, usize)> = BTreeMap::new();
        for r in &self.reports {
            let slot = out.entry(r.identity_name.clone()).or_default();
            match r.verdict {
                Verdict::Confirmed => slot.0 += 1,
                Verdict::Refuted => slot.1 += 1,
            }
        }
        out
    }
}

/// Ranges covered by [`run_errata`].
#[derive(Debug, Clone)]
pub struct ErrataConfig {
    pub m2_n: RangeInclusive<usize>,
    pub m1_n: RangeInclusive<usize>,
    pub m1_sequences: Vec<SequencePair>,
    pub recurrence_n: Vec<usize>,
    pub recurrence_k: usize,
    pub product_n: Vec<usize>,
    pub product_k: usize,
}

impl Default for ErrataConfig {
    fn default() -> Self {
        Self {
            m2_n: 3..=60,
            m1_n: 3..=40,
            m1_sequences: test_sequences(),
            recurrence_n: vec![3, 4, 5, 10, 20, 40, 60],
            recurrence_k: 5,
            product_n: vec![5, 10, 20, 40, 60],
            product_k: 6,
        }
    }
}

/// `(1, −1)`, `(0, 1)`, `(1/2, 0)`.
pub fn test_sequences() -> Vec<SequencePair> {
    vec![
        SequencePair::classical(),
        SequencePair::constant(int(0), int(1)).expect("valid"),
        SequencePair::constant(rat(1, 2), int(0)).expect("valid"),
    ]
}

fn denom23(n: usize) -> crate::exactnum::Rational {
    rat(1, ((n + 2) * (n + 3)) as i64)
}

/// Printed second-order identities at one `n`.
fn m2_checks(n: usize) -> Result<Vec<IdentityReport>> {
    let spec = OperatorSpec::m2(n)?;
    let n_ = n as i64;
    let mut out = vec![];
    let [a0, a1, a2] = m2_weight_polys(n);
    out.push(verify_identity(
        "M2-weights-sum",
        &(&a0 + &a1) + &a2,
        Polynomial::one(),
    ));
    let e0 = operator_monomial(&spec, 0)?;
    out.push(verify_identity("M2-e0", e0, Polynomial::one()));
    let e1 = operator_monomial(&spec, 1)?;
    out.push(verify_identity(
        "M2-e1-as-printed",
        e1.clone(),
        Polynomial::one(),
    ));
    out.push(verify_identity("M2-e1-corrected", e1, Polynomial::x()));
    let printed = Polynomial::from_coeffs(vec![rat(-3, (n_ + 2) * (n_ + 3)), int(0), int(1)]);
    out.push(verify_identity(
        "M2-e2",
        operator_monomial(&spec, 2)?,
        printed,
    ));
    out.push(verify_identity(
        "M2-central-1",
        central_moment(&spec, 1)?,
        Polynomial::zero(),
    ));
    out.push(verify_identity(
        "M2-central-2",
        central_moment(&spec, 2)?,
        Polynomial::constant(rat(-3, (n_ + 2) * (n_ + 3))),
    ));
    for jc in 0..3usize {
        let j = jc as i64;
        let e1 = Polynomial::from_ints(&[j + 1, n_ - 2]).scale(&rat(1, n_ + 2));
        out.push(verify_identity(
            &format!("A{jc}-e1"),
            component_monomial(jc, n, 1)?,
            e1,
        ));
        let e2 = Polynomial::from_ints(&[
            (j + 1) * (j + 2),
            (2 * j + 4) * (n_ - 2),
            n_ * n_ - 5 * n_ + 6,
        ])
        .scale(&denom23(n));
        out.push(verify_identity(
            &format!("A{jc}-e2"),
            component_monomial(jc, n, 2)?,
            e2,
        ));
        let (lin, c0) = [(n_ - 7, 2), (n_ - 12, 6), (n_ - 17, 12)][jc];
        let central = Polynomial::from_ints(&[c0, 2 * lin, -2 * (n_ - 12)]).scale(&denom23(n));
        out.push(verify_identity(
            &format!("A{jc}-second-central-moment"),
            component_central_moment(jc, n, 2)?,
            central,
        ));
    }
    Ok(out.into_iter().map(|r| r.at(n, None)).collect())
}

/// Printed first and second moments of the modified operator of order one.
fn m1_checks(n: usize, seq: &SequencePair) -> Result<Vec<IdentityReport>> {
    let spec = OperatorSpec::m1(n, seq.clone())?;
    let (a0, a1) = seq.at(n);
    let first = central_moment(&spec, 1)?;
    let one_minus_2x = Polynomial::from_ints(&[1, -2]);
    let corrected = one_minus_2x
        .scale(&(int(3) * &a0 + int(2) * &a1))
        .scale(&rat(1, n as i64 + 2));
    let printed = &corrected * &Polynomial::x();
    let second = central_moment(&spec, 2)?;
    let x = Polynomial::x();
    let x2 = Polynomial::monomial(int(1), 2);
    let inner = Polynomial::constant(int(3) * &a1 + int(4) * &a0) - x.scale(&(int(11) * &a1))
        + x2.scale(&(int(14) * &a0))
        + x2.scale(&(int(11) * &a1))
        - x.scale(&(int(14) * &a0));
    let tail = phi_squared().scale(&((int(2) * &a0 + &a1) * int(n as i64)));
    let printed_second = (inner + tail).scale(&(int(2) * denom23(n)));
    Ok(vec![
        verify_identity("M1-first-moment-as-printed", first.clone(), printed),
        verify_identity("M1-first-moment-corrected", first, corrected),
        verify_identity("M1-second-moment-as-printed", second, printed_second),
    ]
    .into_iter()
    .map(|r| r.at(n, Some(seq)))
    .collect())
}

/// Recurrence and leading-coefficient checks at one `n`.
fn recurrence_checks(n: usize, max_k: usize) -> Result<Vec<IdentityReport>> {
    let spec = OperatorSpec::m2(n)?;
    let table = MomentTable::build(&spec, max_k + 1)?;
    let mut out = vec![];
    for k in 0..=max_k {
        let step = recurrence_step(n, k, &table)?;
        out.push(verify_identity(
            &format!("M2-recurrence-k{k}"),
            table.entry(k + 1)?.clone(),
            step,
        ));
    }
    for r in 1..=max_k.min(4) {
        let oracle = component_central_moment(0, n, r + 1)?;
        out.push(verify_identity(
            &format!("A0-central-recurrence-as-printed-r{r}"),
            oracle,
            component_central_recurrence_step(n, r)?,
        ));
        for jc in 0..3 {
            out.push(verify_identity(
                &format!("A{jc}-central-recurrence-corrected-r{r}"),
                component_central_moment(jc, n, r + 1)?,
                component_central_recurrence_corrected(jc, n, r)?,
            ));
        }
    }
    Ok(out.into_iter().map(|r| r.at(n, None)).collect())
}

fn product_checks(n: usize, max_k: usize) -> Result<Vec<IdentityReport>> {
    let spec = OperatorSpec::m2(n)?;
    let mut out = vec![];
    for k in 1..=max_k {
        let printed = Polynomial::constant(product_formula(n, k));
        // coefficient of x^k, which is zero when the product has a vanishing factor
        let a0 = component_monomial(0, n, k)?.coeff(k);
        out.push(verify_identity(
            &format!("product-formula-vs-A0-k{k}"),
            Polynomial::constant(a0),
            printed.clone(),
        ));
        let d = operator_monomial(&spec, k)?.coeff(k);
        out.push(verify_identity(
            &format!("product-formula-vs-M2-k{k}"),
            Polynomial::constant(d),
            printed,
        ));
    }
    Ok(out.into_iter().map(|r| r.at(n, None)).collect())
}

fn collect_parallel<T: Sync>(
    items: &[T],
    f: impl Fn(&T) -> Result<Vec<IdentityReport>> + Sync + Send,
) -> Result<Vec<IdentityReport>> {
    let groups: Vec<Vec<IdentityReport>> = items.par_iter().map(f).collect::<Result<_>>()?;
    Ok(groups.into_iter().flatten().collect())
}

/// Runs every identity check; the report order depends only on the config.
pub fn run_errata(config: &ErrataConfig) -> Result<ErrataLedger> {
    let mut ledger = ErrataLedger::new();
    let m2_n: Vec<usize> = config.m2_n.clone().collect();
    ledger.extend(collect_parallel(&m2_n, |&n| m2_checks(n))?);
    let m1_cells: Vec<(SequencePair, usize)> = config
        .m1_sequences
        .iter()
        .flat_map(|s| config.m1_n.clone().map(move |n| (s.clone(), n)))
        .collect();
    ledger.extend(collect_parallel(&m1_cells, |(s, n)| m1_checks(*n, s))?);
    ledger.extend(collect_parallel(&config.recurrence_n, |&n| {
        recurrence_checks(n, config.recurrence_k)
    })?);
    ledger.extend(collect_parallel(&config.product_n, |&n| {
        product_checks(n, config.product_k)
    })?);
    Ok(ledger)
}
