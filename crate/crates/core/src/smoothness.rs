//! Grid estimates of the modulus of continuity and the Ditzian–Totik
//! modulus with step weight `φ(x) = √(x(1−x))`.
//!
//! Grid sups are lower bounds of the true moduli. Callers that put a modulus
//! on the large side of an inequality use the refined variants, which
//! double the grids until the value settles and then inflate it by 5%.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::binomial;
use crate::exactnum::to_f64;
use crate::operators::FunctionSpec;

pub const DEFAULT_XS: usize = 512;
pub const DEFAULT_HS: usize = 128;
pub const MAX_ORDER: usize = 6;

/// Relative change below which refinement stops.
pub const REFINE_TOLERANCE: f64 = 0.01;
pub const INFLATION: f64 = 1.05;
const MAX_REFINEMENTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusEstimate {
    pub value: f64,
    pub x_samples: usize,
    pub h_samples: usize,
    pub order: usize,
}

/// Which modulus a [`ModulusProfile`] tabulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModulusKind {
    /// `sup |f(x+h) − f(x)|`.
    Classical,
    /// `sup |Δ^k_{hφ(x)} f(x)|` of the given order.
    DitzianTotik(usize),
}

impl ModulusKind {
    fn order(self) -> usize {
        match self {
            ModulusKind::Classical => 1,
            ModulusKind::DitzianTotik(k) => k,
        }
    }
}

/// Modulus values on the step grid `h_j = j·max_step/hs`, `j = 1..=hs`,
/// as a running maximum so that lookups are monotone in the step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusProfile {
    pub kind: ModulusKind,
    pub max_step: f64,
    pub x_samples: usize,
    pub values: Vec<f64>,
}

impl ModulusProfile {
    pub fn new(
        f: &FunctionSpec,
        kind: ModulusKind,
        max_step: f64,
        xs: usize,
        hs: usize,
    ) -> Result<Self> {
        if !(max_step > 0.0 && max_step.is_finite()) {
            return Err(Error::Domain(format!("step {max_step} must be positive")));
        }
        if xs == 0 || hs == 0 {
            return Err(Error::Domain("grids need at least one interval".into()));
        }
        let order = kind.order();
        if !(1..=MAX_ORDER).contains(&order) {
            return Err(Error::Domain(format!(
                "order {order} not in 1..={MAX_ORDER}"
            )));
        }
        let weights = difference_weights(order);
        let steps: Vec<f64> = (1..=hs).map(|j| max_step * j as f64 / hs as f64).collect();
        // per-step sup over x, reduced in parallel over x
        let per_step = (0..=xs)
            .into_par_iter()
            .map(|i| {
                let x = i as f64 / xs as f64;
                steps
                    .iter()
                    .map(|&h| match kind {
                        ModulusKind::Classical => {
                            if x + h <= 1.0 {
                                (f.eval(x + h) - f.eval(x)).abs()
                            } else {
                                0.0
                            }
                        }
                        ModulusKind::DitzianTotik(k) => {
                            symmetric_difference(f, x, h * (x * (1.0 - x)).sqrt(), k, &weights)
                        }
                    })
                    .collect::<Vec<f64>>()
            })
            .reduce(
                || vec![0.0; hs],
                |a, b| a.iter().zip(&b).map(|(u, v)| u.max(*v)).collect(),
            );
        let mut running = 0.0f64;
        let values = per_step
            .into_iter()
            .map(|v| {
                running = running.max(v);
                running
            })
            .collect();
        Ok(Self {
            kind,
            max_step,
            x_samples: xs,
            values,
        })
    }

    /// Doubles both grids until the top value changes by less than 1%,
    /// then multiplies every value by 1.05.
    pub fn refined(f: &FunctionSpec, kind: ModulusKind, max_step: f64) -> Result<Self> {
        let (mut xs, mut hs) = (DEFAULT_XS, DEFAULT_HS);
        let mut current = Self::new(f, kind, max_step, xs, hs)?;
        for _ in 0..MAX_REFINEMENTS {
            xs *= 2;
            hs *= 2;
            let next = Self::new(f, kind, max_step, xs, hs)?;
            let (a, b) = (current.top(), next.top());
            current = next;
            if (b - a).abs() <= REFINE_TOLERANCE * b.abs().max(f64::MIN_POSITIVE) {
                break;
            }
        }
        current.values.iter_mut().for_each(|v| *v *= INFLATION);
        Ok(current)
    }

    pub fn h_samples(&self) -> usize {
        self.values.len()
    }

    /// Value at `max_step`.
    pub fn top(&self) -> f64 {
        *self.values.last().expect("nonempty")
    }

    /// Value at the smallest grid step `≥ delta`; monotone in `delta`.
    pub fn at(&self, delta: f64) -> Result<f64> {
        if delta.is_nan() || delta <= 0.0 {
            return Err(Error::Domain(format!("step {delta} must be positive")));
        }
        let hs = self.values.len();
        let j = (delta / self.max_step * hs as f64).ceil() as usize;
        if j > hs {
            // tolerate rounding right at the top of the grid
            if delta <= self.max_step * (1.0 + 1e-12) {
                return Ok(self.top());
            }
            return Err(Error::Domain(format!(
                "step {delta} exceeds the profile range {}",
                self.max_step
            )));
        }
        Ok(self.values[j.max(1) - 1])
    }

    pub fn estimate(&self) -> ModulusEstimate {
        ModulusEstimate {
            value: self.top(),
            x_samples: self.x_samples,
            h_samples: self.h_samples(),
            order: self.kind.order(),
        }
    }
}

/// `(−1)^i C(k,i)` for `i = 0..=k`.
fn difference_weights(k: usize) -> Vec<f64> {
    (0..=k)
        .map(|i| {
            let c = to_f64(&binomial(k, i as i64));
            if i % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect()
}

/// `|Σ_i (−1)^i C(k,i) f(x + (k/2 − i)·step)|`, or 0 if a node leaves `[0, 1]`.
fn symmetric_difference(f: &FunctionSpec, x: f64, step: f64, k: usize, weights: &[f64]) -> f64 {
    let half = k as f64 / 2.0;
    if x - half * step < 0.0 || x + half * step > 1.0 {
        return 0.0;
    }
    weights
        .iter()
        .enumerate()
        .map(|(i, w)| w * f.eval(x + (half - i as f64) * step))
        .sum::<f64>()
        .abs()
}

/// Grid estimate of `ω(f, δ)`.
pub fn modulus(f: &FunctionSpec, delta: f64, xs: usize, hs: usize) -> Result<ModulusEstimate> {
    Ok(ModulusProfile::new(f, ModulusKind::Classical, delta, xs, hs)?.estimate())
}

/// Grid estimate of `ω^k_φ(f, t)`.
pub fn dt_modulus(
    f: &FunctionSpec,
    t: f64,
    order: usize,
    xs: usize,
    hs: usize,
) -> Result<ModulusEstimate> {
    Ok(ModulusProfile::new(f, ModulusKind::DitzianTotik(order), t, xs, hs)?.estimate())
}

/// Refined and inflated `ω(f, δ)`.
pub fn modulus_refined(f: &FunctionSpec, delta: f64) -> Result<ModulusEstimate> {
    Ok(ModulusProfile::refined(f, ModulusKind::Classical, delta)?.estimate())
}

/// Refined and inflated `ω^k_φ(f, t)`.
pub fn dt_modulus_refined(f: &FunctionSpec, t: f64, order: usize) -> Result<ModulusEstimate> {
    Ok(ModulusProfile::refined(f, ModulusKind::DitzianTotik(order), t)?.estimate())
}
