//! Adaptive Gauss–Kronrod (7/15) quadrature and composite Simpson on samples.

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
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Integrates `f` over [a, b] to absolute tolerance `abs_tol`.
/// Returns (value, error estimate).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> (f64, f64) {
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        tol: f64,
        whole: (f64, f64),
        depth: u32,
    ) -> (f64, f64) {
        if whole.1 <= tol || depth >= 40 {
            return whole;
        }
        let m = 0.5 * (a + b);
        let l = gk15(f, a, m);
        let r = gk15(f, m, b);
        let (lv, le) = rec(f, a, m, 0.5 * tol, l, depth + 1);
        let (rv, re) = rec(f, m, b, 0.5 * tol, r, depth + 1);
        (lv + rv, le + re)
    }
    let whole = gk15(&f, a, b);
    rec(&f, a, b, abs_tol, whole, 0)
}

/// Composite Simpson rule on uniformly spaced samples (odd count).
pub fn simpson_uniform(ys: &[f64], dx: f64) -> f64 {
    assert!(
        ys.len() >= 3 && ys.len() % 2 == 1,
        "Simpson needs an odd number of samples"
    );
    let n = ys.len() - 1;
    let mut s = ys[0] + ys[n];
    for (i, y) in ys.iter().enumerate().take(n).skip(1) {
        s += if i % 2 == 1 { 4.0 * y } else { 2.0 * y };
    }
    s * dx / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_kronrod_polynomial_and_oscillatory() {
        let (v, _) = integrate(|x| x.powi(5) - 2.0 * x, 0.0, 2.0, 1e-12);
        assert!((v - (64.0 / 6.0 - 4.0)).abs() < 1e-12);
        let (v, _) = integrate(
            |x| (10.0 * x).sin().powi(2),
            0.0,
            std::f64::consts::PI,
            1e-12,
        );
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-11);
    }

    #[test]
    fn simpson_exponential() {
        let n = 2001;
        let dx = 10.0 / (n - 1) as f64;
        let ys: Vec<f64> = (0..n).map(|i| (-(i as f64) * dx).exp()).collect();
        let v = simpson_uniform(&ys, dx);
        assert!((v - (1.0 - (-10f64).exp())).abs() < 1e-10);
    }
}
