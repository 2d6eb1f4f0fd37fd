//! Test functions on `[0, 1]` with optional analytic derivatives.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Smoothness {
    C0,
    C1,
    C2,
    C6,
    /// Continuous with a derivative of bounded variation.
    BvDerivative,
}

pub type RealFn = fn(f64) -> f64;
pub type DerivativeFn = fn(usize, f64) -> f64;

/// A named function on `[0, 1]`.
#[derive(Clone, Copy)]
pub struct FunctionSpec {
    pub name: &'static str,
    eval: RealFn,
    derivatives: Option<(DerivativeFn, usize)>,
    pub smoothness: Smoothness,
}

impl fmt::Debug for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSpec")
            .field("name", &self.name)
            .field("max_derivative", &self.max_derivative())
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

impl FunctionSpec {
    pub fn new(name: &'static str, eval: RealFn, smoothness: Smoothness) -> Self {
        Self {
            name,
            eval,
            derivatives: None,
            smoothness,
        }
    }

    /// Attaches `deriv(order, x)` valid for `1 ≤ order ≤ max_order`.
    pub fn with_derivatives(mut self, deriv: DerivativeFn, max_order: usize) -> Self {
        self.derivatives = Some((deriv, max_order.min(6)));
        self
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn max_derivative(&self) -> usize {
        self.derivatives.map_or(0, |(_, m)| m)
    }

    pub fn derivative(&self, order: usize, x: f64) -> Result<f64> {
        if order == 0 {
            return Ok(self.eval(x));
        }
        match self.derivatives {
            Some((d, max)) if order <= max => Ok(d(order, x)),
            _ => Err(Error::MissingDerivative {
                function: self.name.to_string(),
                order,
            }),
        }
    }

    /// Sup norm estimated on a uniform grid of `points + 1` nodes.
    pub fn sup_norm(&self, points: usize) -> f64 {
        (0..=points)
            .map(|i| self.eval(i as f64 / points as f64).abs())
            .fold(0.0, f64::max)
    }

    /// Checks every provided derivative against central differences of the
    /// next-lower order at 0.25, 0.5, 0.75 (step 1e-4, relative error ≤ 1e-5).
    pub fn check_derivatives(&self) -> std::result::Result<(), String> {
        const STEP: f64 = 1e-4;
        for order in 1..=self.max_derivative() {
            for x in [0.25, 0.5, 0.75] {
                let lower = |t: f64| self.derivative(order - 1, t).expect("lower order present");
                let fd = (lower(x + STEP) - lower(x - STEP)) / (2.0 * STEP);
                let exact = self.derivative(order, x).expect("order present");
                let scale = exact.abs().max(1.0);
                if (fd - exact).abs() > 1e-5 * scale {
                    return Err(format!(
                        "{}: derivative {order} at {x}: analytic {exact}, finite difference {fd}",
                        self.name
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Built-in function registry.
pub mod registry {
    use super::*;

    pub const NAMES: [&str; 9] = [
        "e0", "e1", "e2", "e3", "sin_pi", "expx", "abs_mid", "runge", "sqrtx",
    ];

    fn e0(_: f64) -> f64 {
        1.0
    }
    fn e1(x: f64) -> f64 {
        x
    }
    fn e2(x: f64) -> f64 {
        x * x
    }
    fn e3(x: f64) -> f64 {
        x * x * x
    }

    fn monomial_derivative(power: i32, order: usize, x: f64) -> f64 {
        let order = order as i32;
        if order > power {
            return 0.0;
        }
        let falling: f64 = ((power - order + 1)..=power).map(f64::from).product();
        falling * x.powi(power - order)
    }
    fn d_e0(order: usize, x: f64) -> f64 {
        monomial_derivative(0, order, x)
    }
    fn d_e1(order: usize, x: f64) -> f64 {
        monomial_derivative(1, order, x)
    }
    fn d_e2(order: usize, x: f64) -> f64 {
        monomial_derivative(2, order, x)
    }
    fn d_e3(order: usize, x: f64) -> f64 {
        monomial_derivative(3, order, x)
    }

    fn sin_pi(x: f64) -> f64 {
        (PI * x).sin()
    }
    fn d_sin_pi(order: usize, x: f64) -> f64 {
        PI.powi(order as i32) * (PI * x + order as f64 * PI / 2.0).sin()
    }

    fn expx(x: f64) -> f64 {
        x.exp()
    }
    fn d_expx(_: usize, x: f64) -> f64 {
        x.exp()
    }

    fn abs_mid(x: f64) -> f64 {
        (x - 0.5).abs()
    }

    fn runge(x: f64) -> f64 {
        let u = x - 0.5;
        1.0 / (1.0 + 25.0 * u * u)
    }
    /// With t = 5(x − 1/2) and θ = atan2(1, t):
    /// d^m/dx^m = 5^m (−1)^m m! sin((m+1)θ) / (1+t²)^((m+1)/2).
    fn d_runge(order: usize, x: f64) -> f64 {
        let t = 5.0 * (x - 0.5);
        let theta = 1.0f64.atan2(t);
        let m = order as i32;
        let fact: f64 = (1..=m).map(f64::from).product();
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        sign * 5f64.powi(m) * fact * ((m + 1) as f64 * theta).sin()
            / (1.0 + t * t).powf((m + 1) as f64 / 2.0)
    }

    fn sqrtx(x: f64) -> f64 {
        x.sqrt()
    }

    /// `e_power(x) = x^power` for `power ≤ 12`.
    pub fn monomial(power: usize) -> Option<FunctionSpec> {
        fn pick(power: usize) -> Option<(&'static str, RealFn)> {
            const NAMES: [&str; 13] = [
                "e0", "e1", "e2", "e3", "e4", "e5", "e6", "e7", "e8", "e9", "e10", "e11", "e12",
            ];
            let f: RealFn = match power {
                0 => e0,
                1 => e1,
                2 => e2,
                3 => e3,
                4 => |x| x.powi(4),
                5 => |x| x.powi(5),
                6 => |x| x.powi(6),
                7 => |x| x.powi(7),
                8 => |x| x.powi(8),
                9 => |x| x.powi(9),
                10 => |x| x.powi(10),
                11 => |x| x.powi(11),
                12 => |x| x.powi(12),
                _ => return None,
            };
            Some((NAMES[power], f))
        }
        let (name, f) = pick(power)?;
        let spec = FunctionSpec::new(name, f, Smoothness::C6);
        Some(match power {
            0 => spec.with_derivatives(d_e0, 6),
            1 => spec.with_derivatives(d_e1, 6),
            2 => spec.with_derivatives(d_e2, 6),
            3 => spec.with_derivatives(d_e3, 6),
            _ => spec,
        })
    }

    pub fn get(name: &str) -> Option<FunctionSpec> {
        let spec = match name {
            "e0" | "e1" | "e2" | "e3" => return monomial(name[1..].parse().ok()?),
            "sin_pi" => {
                FunctionSpec::new("sin_pi", sin_pi, Smoothness::C6).with_derivatives(d_sin_pi, 6)
            }
            "expx" => FunctionSpec::new("expx", expx, Smoothness::C6).with_derivatives(d_expx, 6),
            "abs_mid" => FunctionSpec::new("abs_mid", abs_mid, Smoothness::BvDerivative),
            "runge" => {
                FunctionSpec::new("runge", runge, Smoothness::C6).with_derivatives(d_runge, 6)
            }
            "sqrtx" => FunctionSpec::new("sqrtx", sqrtx, Smoothness::C0),
            _ => return None,
        };
        Some(spec)
    }

    pub fn lookup(name: &str) -> Result<FunctionSpec> {
        get(name).ok_or_else(|| {
            Error::Domain(format!(
                "unknown function `{name}` (known: {})",
                NAMES.join(", ")
            ))
        })
    }

    pub fn all() -> Vec<FunctionSpec> {
        NAMES.iter().filter_map(|n| get(n)).collect()
    }
}
