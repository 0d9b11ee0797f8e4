//! Generators and independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use nritt::matrixkit::{CMatrix, NormKind, Operator};
use nritt::regions::rotation;
use nritt::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest Stolz angle for order `n`.
pub fn stolz_top(n: usize) -> f64 {
    (PI / n as f64).min(FRAC_PI_2)
}

/// A point of `B_{n,α}` built as `1 − u_j(1 − w)` with `w` a convex
/// combination of `1` and a point of the disc `D(0, 0.9 sin α)`, kept at
/// least `s_min` of the way from the vertex.
pub fn stolz_point(rng: &mut ChaCha8Rng, n: usize, alpha: f64, s_min: f64) -> Complex64 {
    let j = rng.gen_range(0..n);
    let radius = 0.9 * alpha.sin() * rng.gen::<f64>().sqrt();
    let q = Complex64::from_polar(radius, rng.gen_range(0.0..2.0 * PI));
    let s = rng.gen_range(s_min..1.0);
    let w = 1.0 + (q - 1.0) * s;
    1.0 - rotation(n, j) * (1.0 - w)
}

/// `I + E` with `E` entries uniform in the complex square of half-width
/// `0.3/√d`; well conditioned.
pub fn similarity(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    let h = 0.3 / (d as f64).sqrt();
    CMatrix::from_fn(d, d, |i, j| {
        let e = c(rng.gen_range(-h..h), rng.gen_range(-h..h));
        if i == j {
            e + 1.0
        } else {
            e
        }
    })
}

/// `V diag(eigenvalues) V⁻¹` with spectral metadata.
pub fn random_ritt(rng: &mut ChaCha8Rng, n: usize, d: usize, alpha: f64) -> Operator {
    let eig: Vec<Complex64> = (0..d).map(|_| stolz_point(rng, n, alpha, 0.05)).collect();
    let v = similarity(rng, d);
    Operator::from_spectral(&eig, v, NormKind::P2).expect("well-conditioned similarity")
}

/// Spectral oracle `V diag(f(λ_i)) V⁻¹` from the operator's metadata.
pub fn spectral_oracle(t: &Operator, f: impl Fn(Complex64) -> Complex64) -> CMatrix {
    let meta = t.spectral().expect("spectral metadata");
    let v = &meta.similarity;
    let scaled = CMatrix::from_fn(v.rows(), v.cols(), |i, j| v[(i, j)] * f(meta.eigenvalues[j]));
    &scaled * &v.inverse().expect("invertible similarity")
}

/// Adaptive Simpson quadrature of a real function on `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 60)
}
