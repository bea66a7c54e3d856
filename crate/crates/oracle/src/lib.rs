//! Reference numerics for validating closed-form results.
//!
//! Nothing here shares code with `xlmimo-core`: integrals are evaluated by
//! adaptive Gauss-Kronrod quadrature or by plain Riemann sums, and finite sums
//! by compensated summation. Test suites compare the library's closed forms
//! against these routines.

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of a 15-point Kronrod rule with its embedded 7-point Gauss estimate.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * KRONROD_WEIGHTS[7];
    let mut gauss = fc * GAUSS_WEIGHTS[3];
    for i in 0..7 {
        let dx = half * KRONROD_NODES[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += KRONROD_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss-Kronrod integration of `f` over the finite interval `[a, b]`.
///
/// Intervals are bisected until the Kronrod/Gauss difference meets
/// `max(abs_tol, rel_tol * |I|)`. Endpoints are never evaluated, so integrable
/// endpoint singularities are fine.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let (first, first_err) = gk15(&f, lo, hi);
    let mut segments = vec![(lo, hi, first, first_err)];
    for _ in 0..20_000 {
        let total: f64 = kahan_sum(segments.iter().map(|s| s.2));
        let error: f64 = segments.iter().map(|s| s.3).sum();
        if error <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("at least one segment");
        let (s_lo, s_hi, _, _) = segments.swap_remove(worst);
        let mid = 0.5 * (s_lo + s_hi);
        if mid <= s_lo || mid >= s_hi {
            // cannot split further in floating point
            segments.push((s_lo, s_hi, gk15(&f, s_lo, s_hi).0, 0.0));
            continue;
        }
        let (left, left_err) = gk15(&f, s_lo, mid);
        let (right, right_err) = gk15(&f, mid, s_hi);
        segments.push((s_lo, mid, left, left_err));
        segments.push((mid, s_hi, right, right_err));
    }
    sign * kahan_sum(segments.iter().map(|s| s.2))
}

/// Integral of `f` over `[a, ∞)` via the substitution `t = a + u / (1 - u)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, rel_tol: f64, abs_tol: f64) -> f64 {
    integrate(
        |u| {
            let one_minus = 1.0 - u;
            let t = a + u / one_minus;
            f(t) / (one_minus * one_minus)
        },
        0.0,
        1.0,
        rel_tol,
        abs_tol,
    )
}

/// Composite midpoint rule with `points` equal cells.
pub fn midpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, points: usize) -> f64 {
    let h = (b - a) / points as f64;
    h * kahan_sum((0..points).map(|i| f(a + (i as f64 + 0.5) * h)))
}

/// Neumaier-compensated summation.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut compensation = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}

/// Exponential integral E1(x) by quadrature of `∫_{ln x}^{∞} exp(-e^v) dv`.
///
/// The log substitution makes the integrand bounded and smooth, so the adaptive
/// rule reaches near machine precision for any `x > 0`.
pub fn exp_integral_e1(x: f64) -> f64 {
    assert!(x > 0.0, "E1 oracle needs x > 0");
    let lower = x.ln();
    // exp(-e^v) < 1e-300 once e^v > 700; cut there.
    let upper = lower.max(700f64.ln()) + 1.0;
    integrate(|v| (-v.exp()).exp(), lower, upper, 1e-15, 0.0)
}
