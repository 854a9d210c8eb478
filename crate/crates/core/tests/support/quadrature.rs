//! Reference integrators used as test oracles.
#![allow(dead_code)]

// Gauss-Kronrod 7-15 abscissae (non-negative half) and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod on `[a, b]` with absolute tolerance `tol`.
pub fn adaptive(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let mut stack = vec![(a, b, tol, 0u32)];
    let mut total = 0.0;
    while let Some((lo, hi, t, depth)) = stack.pop() {
        let (value, err) = gk15(&mut f, lo, hi);
        if err <= t || depth >= 50 {
            total += value;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * t, depth + 1));
            stack.push((mid, hi, 0.5 * t, depth + 1));
        }
    }
    total
}

/// Tanh-sinh quadrature on `[0, 1]`. The integrand receives `(x, 1 - x)`,
/// both accurate near the endpoints, so algebraic endpoint singularities are
/// handled. Levels are refined until successive estimates agree to `rel`.
pub fn tanh_sinh_unit(mut f: impl FnMut(f64, f64) -> f64, rel: f64) -> f64 {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut eval = |t: f64| -> f64 {
        let u = half_pi * t.sinh();
        // x = 1 / (1 + e^{-2u}), 1 - x = 1 / (1 + e^{2u})
        let x = 1.0 / (1.0 + (-2.0 * u).exp());
        let xc = 1.0 / (1.0 + (2.0 * u).exp());
        if x <= 0.0 || xc <= 0.0 {
            return 0.0;
        }
        let w = 2.0 * x * xc * half_pi * t.cosh();
        if w == 0.0 {
            0.0
        } else {
            w * f(x, xc)
        }
    };
    let t_max = 6.5;
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while k as f64 * h <= t_max {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut estimate = sum * h;
    for _ in 0..10 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= t_max {
            let t = k as f64 * h;
            sum += eval(t) + eval(-t);
            k += 2;
        }
        let next = sum * h;
        if (next - estimate).abs() <= rel * next.abs() {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Independent evaluation of a zero-mean Gaussian density in one or two
/// dimensions; `cov` is `[s11]` or `[s11, s12, s22]`.
pub fn gaussian_density(cov: &[f64]) -> impl Fn(f64, f64) -> f64 + Copy {
    let (a, b, c) = match *cov {
        [s] => (s, 0.0, 1.0),
        [a, b, c] => (a, b, c),
        _ => panic!("1-D or 2-D only"),
    };
    let one_d = cov.len() == 1;
    let det = a * c - b * b;
    move |x: f64, y: f64| {
        if one_d {
            (-0.5 * x * x / a).exp() / (2.0 * std::f64::consts::PI * a).sqrt()
        } else {
            let m = (c * x * x - 2.0 * b * x * y + a * y * y) / det;
            (-0.5 * m).exp() / (2.0 * std::f64::consts::PI * det.sqrt())
        }
    }
}

/// Golden-section maximization on `[lo, hi]` of a unimodal function.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Rényi heterogeneity of a zero-mean Gaussian from its density alone:
/// `(∫ f^q)^{1/(1-q)}`, `exp(-∫ f ln f)` at `q = 1` and `1 / max f` at
/// `q = ∞`. `cov` as in [`gaussian_density`].
pub fn gaussian_renyi_by_quadrature(cov: &[f64], q: f64) -> f64 {
    let f = gaussian_density(cov);
    let two_d = cov.len() == 3;
    let sx = cov[0].sqrt();
    let sy = if two_d { cov[2].sqrt() } else { 1.0 };
    if q.is_infinite() {
        // coordinate ascent; the density is log-concave
        let (mut x, mut y) = (3.0 * sx, if two_d { -2.0 * sy } else { 0.0 });
        for _ in 0..60 {
            x = golden_max(|t| f(t, y), -12.0 * sx, 12.0 * sx);
            if two_d {
                y = golden_max(|t| f(x, t), -12.0 * sy, 12.0 * sy);
            }
        }
        return 1.0 / f(x, y);
    }
    let peak = f(0.0, 0.0);
    let g = move |v: f64| -> f64 {
        if v <= 0.0 {
            0.0
        } else if q == 1.0 {
            -v * v.ln()
        } else {
            v.powf(q)
        }
    };
    let spread = 14.0 / q.min(1.0).sqrt();
    let scale = if q == 1.0 { 1.0 + peak.ln().abs() } else { peak.powf(q - 1.0) };
    let tol = 1e-13 * scale;
    let integral = if two_d {
        adaptive(
            |x| adaptive(|y| g(f(x, y)), -spread * sy, spread * sy, tol * 1e-2),
            -spread * sx,
            spread * sx,
            tol,
        )
    } else {
        adaptive(|x| g(f(x, 0.0)), -spread * sx, spread * sx, tol)
    };
    if q == 1.0 {
        integral.exp()
    } else {
        integral.powf(1.0 / (1.0 - q))
    }
}

/// Unnormalized beta density evaluated from `(x, 1 - x)`.
pub fn beta_kernel(a: f64, b: f64) -> impl Fn(f64, f64) -> f64 + Copy {
    move |x: f64, xc: f64| {
        if x <= 0.0 || xc <= 0.0 {
            0.0
        } else {
            x.powf(a - 1.0) * xc.powf(b - 1.0)
        }
    }
}

/// `E|X - Y|` for independent beta variables by nested tanh-sinh quadrature,
/// splitting the inner integral at `y = x`. Normalizers are computed by
/// quadrature too.
pub fn beta_abs_distance_by_quadrature(a: (f64, f64), b: (f64, f64)) -> f64 {
    let rel = 1e-13;
    let ka = beta_kernel(a.0, a.1);
    let kb = beta_kernel(b.0, b.1);
    let za = tanh_sinh_unit(ka, rel);
    let zb = tanh_sinh_unit(kb, rel);
    let inner = |x: f64, xc: f64| -> f64 {
        // y = x s on [0, x]: x - y = x (1 - s), 1 - y = xc + x (1 - s)
        let below = tanh_sinh_unit(|s, sc| x * sc * kb(x * s, xc + x * sc) * x, rel);
        // y = x + xc s on [x, 1]: y - x = xc s, 1 - y = xc (1 - s)
        let above = tanh_sinh_unit(|s, sc| xc * s * kb(x + xc * s, xc * sc) * xc, rel);
        below + above
    };
    tanh_sinh_unit(|x, xc| ka(x, xc) * inner(x, xc), rel) / (za * zb)
}
