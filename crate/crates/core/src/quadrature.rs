//! One-dimensional quadrature rules shared by the engines.

use num_complex::Complex64 as C64;

/// Trapezoid rule on a recorded grid. `xs` must be sorted; returns 0 for
/// fewer than two samples.
pub fn trapezoid<T>(xs: &[f64], ys: &[T]) -> T
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    assert_eq!(xs.len(), ys.len(), "grid and samples differ in length");
    xs.windows(2)
        .zip(ys.windows(2))
        .fold(T::default(), |acc, (x, y)| acc + (y[0] + y[1]) * (0.5 * (x[1] - x[0])))
}

// 8-point Gauss–Legendre on [-1, 1].
#[allow(clippy::excessive_precision)]
const GL8_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
#[allow(clippy::excessive_precision)]
const GL8_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Composite 8-point Gauss–Legendre integral of a complex function over
/// `[a, b]` split into `panels` equal pieces.
pub fn gauss_legendre(f: impl Fn(f64) -> C64, a: f64, b: f64, panels: usize) -> C64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut total = C64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let mut acc = C64::new(0.0, 0.0);
        for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
            acc += f(mid + 0.5 * h * x) * *w;
        }
        total += acc * (0.5 * h);
    }
    total
}

/// Uniform grid of `n` points spanning `[a, b]` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Log-spaced grid of `n` points from `a` to `b` (both positive).
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}

/// `sin(x)/x` with the removable singularity filled.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `(1/T) ∫_0^T e^{-iωt} dt = e^{-iωT/2} sinc(ωT/2)`.
pub fn window_average_of_phase(omega: f64, window: f64) -> C64 {
    C64::from_polar(sinc(0.5 * omega * window), -0.5 * omega * window)
}
