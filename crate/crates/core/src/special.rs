//! Exponential integral E1.

use crate::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const MAX_ITERATIONS: usize = 1000;
const TINY: f64 = 1e-300;

/// `E1(x) = ∫_x^∞ e^{-t}/t dt` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    check_argument(x)?;
    if x <= 1.0 {
        Ok(e1_series(x))
    } else {
        Ok((-x).exp() * scaled_continued_fraction(x))
    }
}

/// `e^x E1(x)`, finite for every `x > 0` (behaves like `1/x` for large x).
pub fn scaled_exp_integral_e1(x: f64) -> Result<f64> {
    check_argument(x)?;
    if x <= 1.0 {
        Ok(x.exp() * e1_series(x))
    } else {
        Ok(scaled_continued_fraction(x))
    }
}

fn check_argument(x: f64) -> Result<()> {
    if x > 0.0 && !x.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain(format!("E1 needs a positive argument, got {x}")))
    }
}

// E1(x) = -γ - ln x - Σ_{k≥1} (-x)^k / (k k!)
fn e1_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..MAX_ITERATIONS {
        let kf = k as f64;
        term *= -x / kf;
        let contribution = term / kf;
        sum += contribution;
        if contribution.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

// Modified Lentz evaluation of the continued fraction
// e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...))).
fn scaled_continued_fraction(x: f64) -> f64 {
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITERATIONS {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}
