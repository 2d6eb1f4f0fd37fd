//! Bernstein basis rows in floating point, exact Beta-integral coefficients,
//! and the Gauss–Legendre rule used for the average-value integrals.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exactnum::{factorial, Rational};
use crate::operators::FunctionSpec;

/// One row `p_{n,0}(x) .. p_{n,n}(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisRow {
    pub n: usize,
    pub x: f64,
    pub values: Vec<f64>,
}

pub(crate) fn check_unit(x: f64, what: &str) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} = {x} is outside [0, 1]")))
    }
}

/// Evaluates the degree-`n` Bernstein basis at `x`.
pub fn basis_row(n: usize, x: f64) -> Result<BasisRow> {
    check_unit(x, "x")?;
    Ok(BasisRow {
        n,
        x,
        values: basis_values(n, x),
    })
}

/// Unchecked variant of [`basis_row`]; `x` must lie in `[0, 1]`.
pub(crate) fn basis_values(n: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    fill_basis(n, x, &mut out);
    out
}

/// Writes `p_{n,k}(x)` into `out[0..=n]`.
///
/// Forward ratio recurrence from `(1−x)^n` for `x ≤ 1/2`, mirrored for
/// `x > 1/2` (where `1 − x` is exact). The running value carries a separate
/// binary exponent so nothing underflows before the final scaling, and the
/// rounding of `1 − x` and of the ratio `x/(1−x)` is corrected to first order.
pub(crate) fn fill_basis(n: usize, x: f64, out: &mut [f64]) {
    let out = &mut out[..=n];
    out.fill(0.0);
    if x <= 0.0 {
        out[0] = 1.0;
        return;
    }
    if x >= 1.0 {
        out[n] = 1.0;
        return;
    }
    if x > 0.5 {
        fill_basis(n, 1.0 - x, out);
        out.reverse();
        return;
    }

    let q = 1.0 - x;
    // 1 − x = q + q_err exactly (Fast2Sum, |1| ≥ |x|).
    let q_err = (1.0 - q) - x;
    let ratio = x / q;
    // x − ratio·q is exact, so ratio + ratio_err = x/q to double-double accuracy.
    let ratio_err = (-ratio).mul_add(q, x) / q;
    let eta = q_err / q;
    let rho = ratio_err / ratio;

    let (mut m, mut e) = pow_scaled(q, n);
    let nf = n as f64;
    out[0] = ldexp(m, e) * (1.0 + nf * eta);
    for k in 0..n {
        m *= ((n - k) as f64 * ratio) / (k + 1) as f64;
        renormalize(&mut m, &mut e);
        let kk = (k + 1) as f64;
        out[k + 1] = ldexp(m, e) * (1.0 + kk * rho + (nf - kk) * eta);
    }
}

const SCALE_BITS: i64 = 512;

fn pow2(k: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&k));
    f64::from_bits(((1023 + k) as u64) << 52)
}

fn renormalize(m: &mut f64, e: &mut i64) {
    if *m == 0.0 {
        return;
    }
    while m.abs() < pow2(-SCALE_BITS) {
        *m *= pow2(SCALE_BITS);
        *e -= SCALE_BITS;
    }
    while m.abs() > pow2(SCALE_BITS) {
        *m *= pow2(-SCALE_BITS);
        *e += SCALE_BITS;
    }
}

/// `m · 2^e`. Steps of `2^±1000` keep intermediates normal whenever the
/// result is.
fn ldexp(mut m: f64, mut e: i64) -> f64 {
    while e > 1000 {
        m *= pow2(1000);
        e -= 1000;
    }
    while e < -1000 {
        m *= pow2(-1000);
        e += 1000;
        if m == 0.0 {
            return 0.0;
        }
    }
    m * pow2(e)
}

/// `q^n` as `(mantissa, binary exponent)` using double-double products.
fn pow_scaled(q: f64, n: usize) -> (f64, i64) {
    fn two_prod(a: f64, b: f64) -> (f64, f64) {
        let p = a * b;
        (p, a.mul_add(b, -p))
    }
    fn dd_mul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
        let (p, err) = two_prod(a.0, b.0);
        let err = err + (a.0 * b.1 + a.1 * b.0);
        let hi = p + err;
        (hi, err - (hi - p))
    }
    fn dd_renorm(v: &mut (f64, f64), e: &mut i64) {
        while v.0.abs() < pow2(-SCALE_BITS) && v.0 != 0.0 {
            v.0 *= pow2(SCALE_BITS);
            v.1 *= pow2(SCALE_BITS);
            *e -= SCALE_BITS;
        }
    }

    let mut acc = (1.0, 0.0);
    let mut acc_e = 0i64;
    let mut base = (q, 0.0);
    let mut base_e = 0i64;
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            acc = dd_mul(acc, base);
            acc_e += base_e;
            dd_renorm(&mut acc, &mut acc_e);
        }
        k >>= 1;
        if k > 0 {
            base = dd_mul(base, base);
            base_e *= 2;
            dd_renorm(&mut base, &mut base_e);
        }
    }
    (acc.0 + acc.1, acc_e)
}

/// `(n+1)·∫₀¹ p_{n,k}(u)·u^j du = (n+1)!·(k+j)! / (k!·(n+j+1)!)`, exactly.
pub fn monomial_coefficient(n: usize, k: usize, j: usize) -> Result<Rational> {
    if k > n {
        return Err(Error::Domain(format!("k = {k} exceeds n = {n}")));
    }
    let numer: BigInt = factorial(n + 1) * factorial(k + j);
    let denom: BigInt = factorial(k) * factorial(n + j + 1);
    Ok(Rational::new(numer, denom))
}

/// Gauss–Legendre rule mapped to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes an `m`-point rule by Newton iteration on `P_m`.
    pub fn new(m: usize) -> Self {
        assert!(m >= 1, "a quadrature rule needs at least one node");
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        let half = m.div_ceil(2);
        for i in 0..half {
            // Tricomi-style initial guess for the i-th largest root.
            let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(m, t);
                dp = d;
                let step = p / d;
                t -= step;
                if step.abs() <= 1e-15 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(m, t);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - t * t) * dp * dp);
            // map [-1, 1] → [0, 1]
            nodes[m - 1 - i] = 0.5 * (1.0 + t);
            nodes[i] = 0.5 * (1.0 - t);
            weights[m - 1 - i] = 0.5 * w;
            weights[i] = 0.5 * w;
        }
        if m % 2 == 1 {
            nodes[m / 2] = 0.5;
        }
        Self { nodes, weights }
    }

    /// Shared, lazily built rule for `m` nodes.
    pub fn cached(m: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(rule) = cache.lock().expect("quadrature cache poisoned").get(&m) {
            return Arc::clone(rule);
        }
        let rule = Arc::new(GaussLegendre::new(m));
        let mut guard = cache.lock().expect("quadrature cache poisoned");
        Arc::clone(guard.entry(m).or_insert(rule))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&u, &w)| w * f(u))
            .sum()
    }
}

fn legendre_with_derivative(m: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// Default node count for degree `n`: `n + 16`.
pub fn default_nodes(n: usize) -> usize {
    n + 16
}

/// Gauss–Legendre approximation of `(n+1)·∫₀¹ p_{n,k}(u)·f(u) du`.
pub fn quadrature_coefficient(n: usize, k: usize, f: &FunctionSpec, nodes: usize) -> Result<f64> {
    if k > n {
        return Err(Error::Domain(format!("k = {k} exceeds n = {n}")));
    }
    if nodes == 0 {
        return Err(Error::Domain("quadrature needs at least one node".into()));
    }
    let rule = GaussLegendre::cached(nodes);
    let mut row = vec![0.0; n + 1];
    let mut acc = 0.0;
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        fill_basis(n, u, &mut row);
        acc += w * row[k] * f.eval(u);
    }
    Ok((n + 1) as f64 * acc)
}

/// All coefficients `c_k(f) = (n+1)·∫ p_{n,k} f`, `k = 0..=n`, in one pass
/// over the quadrature nodes.
pub fn coefficient_row(n: usize, f: impl Fn(f64) -> f64, nodes: usize) -> Vec<f64> {
    let rule = GaussLegendre::cached(nodes.max(1));
    let mut row = vec![0.0; n + 1];
    let mut acc = vec![0.0; n + 1];
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        let wf = w * f(u);
        if wf == 0.0 {
            continue;
        }
        fill_basis(n, u, &mut row);
        for (a, p) in acc.iter_mut().zip(&row) {
            *a += wf * p;
        }
    }
    let scale = (n + 1) as f64;
    acc.iter_mut().for_each(|a| *a *= scale);
    acc
}

/// `∫₀¹ u^j du = 1/(j+1)`.
#[cfg(test)]
fn exact_moment(j: usize) -> Rational {
    Rational::new(BigInt::from(1), BigInt::from(j + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{binomial, from_f64, rat, to_f64};
    use crate::operators::registry;
    use approx::assert_abs_diff_eq;
    use num_traits::{One, ToPrimitive};

    /// Exact `p_{n,k}(x)` at the rational value of the double `x = m/2^e`,
    /// kept as unreduced integer ratios.
    fn exact_row(n: usize, x: f64) -> Vec<f64> {
        let xr = from_f64(x);
        let (m, d) = (xr.numer().clone(), xr.denom().clone());
        let q = &d - &m;
        let mut mp = vec![BigInt::one()];
        let mut qp = vec![BigInt::one()];
        for i in 1..=n {
            mp.push(&mp[i - 1] * &m);
            qp.push(&qp[i - 1] * &q);
        }
        let denom = num_traits::pow(d, n);
        (0..=n)
            .map(|k| {
                let num = binomial(n, k as i64).numer() * &mp[k] * &qp[n - k];
                Rational::new_raw(num, denom.clone()).to_f64().unwrap()
            })
            .collect()
    }

    #[test]
    fn basis_row_examples() {
        assert_eq!(basis_row(2, 0.5).unwrap().values, vec![0.25, 0.5, 0.25]);
        assert_eq!(basis_row(3, 0.0).unwrap().values, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(basis_row(3, 1.0).unwrap().values, vec![0.0, 0.0, 0.0, 1.0]);
        let row = basis_row(4, 0.25).unwrap();
        assert_abs_diff_eq!(row.values[2], 0.2109375, epsilon = 1e-16);
        assert_eq!(basis_row(0, 0.3).unwrap().values, vec![1.0]);
    }

    #[test]
    fn basis_row_rejects_outside_unit_interval() {
        assert!(matches!(basis_row(3, -0.1), Err(Error::Domain(_))));
        assert!(matches!(basis_row(3, 1.5), Err(Error::Domain(_))));
        assert!(matches!(basis_row(3, f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn basis_row_relative_accuracy_against_exact_oracle() {
        let xs = [1e-3, 0.1, 1.0 / 3.0, 0.43, 0.5, 0.77, 0.999];
        for &n in &[1usize, 7, 64, 255, 600, 1024] {
            for &x in &xs {
                let got = basis_values(n, x);
                let want = exact_row(n, x);
                for (k, (g, w)) in got.iter().zip(&want).enumerate() {
                    if *w < 1e-290 {
                        assert!(*g < 1e-280, "n={n} x={x} k={k}: {g} vs {w}");
                        continue;
                    }
                    let rel = ((g - w) / w).abs();
                    assert!(rel <= 1e-13, "n={n} x={x} k={k}: rel err {rel:e}");
                }
            }
        }
    }

    #[test]
    fn basis_row_sums_to_one() {
        for n in (0..=512).step_by(17).chain([512]) {
            for i in 0..=100 {
                let x = i as f64 / 100.0;
                let s: f64 = basis_values(n, x).iter().sum();
                assert!((s - 1.0).abs() <= 1e-12, "n={n} x={x} sum={s}");
            }
        }
    }

    #[test]
    fn basis_row_entries_in_unit_interval() {
        for n in [1usize, 10, 100, 1000] {
            for i in 0..=50 {
                let x = i as f64 / 50.0;
                assert!(basis_values(n, x).iter().all(|v| (0.0..=1.0).contains(v)));
            }
        }
    }

    #[test]
    fn basis_symmetry() {
        for n in [3usize, 20, 129] {
            // dyadic points so that 1 − x is exact
            for x in [0.0625, 0.1875, 0.375, 0.5, 0.609375] {
                let a = basis_values(n, x);
                let b = basis_values(n, 1.0 - x);
                for k in 0..=n {
                    let tol = 1e-13 * a[k].abs().max(1e-300);
                    assert!(
                        (a[k] - b[n - k]).abs() <= tol.max(1e-300),
                        "n={n} x={x} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn monomial_coefficient_examples() {
        for n in 0..10 {
            for k in 0..=n {
                assert_eq!(monomial_coefficient(n, k, 0).unwrap(), Rational::one());
            }
        }
        assert_eq!(monomial_coefficient(3, 1, 1).unwrap(), rat(2, 5));
        assert_eq!(monomial_coefficient(2, 2, 2).unwrap(), rat(3, 5));
        assert!(monomial_coefficient(2, 3, 0).is_err());
    }

    #[test]
    fn monomial_coefficient_matches_beta_formula() {
        // Beta oracle: (n+1) C(n,k) B(k+j+1, n−k+1) = (n+1) C(n,k) (k+j)! (n−k)! / (n+j+1)!
        for n in 0..12usize {
            for k in 0..=n {
                for j in 0..5usize {
                    let beta =
                        Rational::new(factorial(k + j) * factorial(n - k), factorial(n + j + 1));
                    let want =
                        Rational::from_integer(BigInt::from(n + 1)) * binomial(n, k as i64) * beta;
                    assert_eq!(monomial_coefficient(n, k, j).unwrap(), want);
                }
            }
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for m in [1usize, 2, 5, 16, 40, 129] {
            let rule = GaussLegendre::new(m);
            let wsum: f64 = rule.weights.iter().sum();
            assert_abs_diff_eq!(wsum, 1.0, epsilon = 1e-14);
            for j in 0..2 * m {
                let got = rule.integrate(|u| u.powi(j as i32));
                let want = to_f64(&exact_moment(j));
                assert!((got - want).abs() <= 1e-14, "m={m} j={j}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn gauss_legendre_cache_returns_same_rule() {
        let a = GaussLegendre::cached(23);
        let b = GaussLegendre::cached(23);
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(*a, GaussLegendre::new(23));
    }

    #[test]
    fn quadrature_coefficient_examples() {
        let e0 = registry::get("e0").unwrap();
        let e1 = registry::get("e1").unwrap();
        let e2 = registry::get("e2").unwrap();
        assert_abs_diff_eq!(
            quadrature_coefficient(3, 1, &e1, 16).unwrap(),
            0.4,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            quadrature_coefficient(5, 0, &e0, 8).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        let want = to_f64(&monomial_coefficient(10, 4, 2).unwrap());
        assert_abs_diff_eq!(
            quadrature_coefficient(10, 4, &e2, 24).unwrap(),
            want,
            epsilon = 1e-13
        );
        assert!(quadrature_coefficient(3, 4, &e0, 8).is_err());
        assert!(quadrature_coefficient(3, 1, &e0, 0).is_err());
    }

    #[test]
    fn quadrature_agrees_with_exact_coefficients() {
        for n in 0..=64usize {
            for j in 0..=6usize {
                let row = coefficient_row(n, |u| u.powi(j as i32), n + 8);
                for (k, got) in row.iter().enumerate() {
                    let want = to_f64(&monomial_coefficient(n, k, j).unwrap());
                    assert!((got - want).abs() <= 1e-12, "n={n} k={k} j={j}");
                }
                if n == 64 {
                    let single =
                        quadrature_coefficient(n, 7, &registry::monomial(j).unwrap(), n + 8)
                            .unwrap();
                    assert_eq!(single, row[7]);
                }
            }
        }
    }
}
