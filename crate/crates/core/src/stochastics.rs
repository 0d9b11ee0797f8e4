//! Rademacher averages, R-bound estimation and quadratic calculus estimates.
//!
//! `‖(x_k)‖_Rad = (E ‖Σ ε_k x_k‖²)^{1/2}` with independent uniform signs
//! `ε_k`. Up to [`EXHAUSTIVE_MAX`] vectors the expectation is an exact sum
//! over all sign patterns; beyond that it is a Monte Carlo mean.
//!
//! Random streams: every stream is a `ChaCha8Rng` seeded with
//! `seed_from_u64(seed)` and switched to a numbered stream with
//! `set_stream`. Monte Carlo chunk `c` uses stream `c`; R-bound trial `t`
//! uses stream `t` for its vectors and a hash of `(t, operator indices)` for
//! the hill climb. Chunks and trials run in parallel and are combined in
//! index order, so results depend only on the seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::{apply_auto, shell_points, CalculusParams};
use crate::error::{Error, Result};
use crate::funclass::{sup_over_boundary, HoloFn, SUP_SAMPLES_PER_PIECE};
use crate::matrixkit::{CMatrix, NormKind, Operator};
use crate::regions::{Region, RegionKind};

/// Largest number of vectors averaged exhaustively.
pub const EXHAUSTIVE_MAX: usize = 14;
/// Default Monte Carlo sample count.
pub const DEFAULT_MC_SAMPLES: usize = 100_000;
/// Default seed of every random stream.
pub const DEFAULT_SEED: u64 = 0x5eed;
/// Samples per Monte Carlo chunk.
const CHUNK: usize = 4096;
/// Largest number of operator tuples enumerated per R-bound trial.
const MAX_TUPLES: usize = 256;

/// Signs `ε_k ∈ {+1, −1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignPattern {
    signs: Vec<i8>,
}

impl SignPattern {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().all(|&s| s == 1 || s == -1) {
            Ok(SignPattern { signs })
        } else {
            Err(Error::DomainError("signs must be +1 or -1".into()))
        }
    }

    /// Pattern number `bits`: bit `k` set means `ε_k = −1`.
    pub fn from_bits(bits: u64, len: usize) -> Self {
        SignPattern { signs: (0..len).map(|k| if bits >> k & 1 == 1 { -1 } else { 1 }).collect() }
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// `Σ ε_k x_k`.
    pub fn combine(&self, vectors: &[Vec<Complex64>]) -> Vec<Complex64> {
        let d = vectors.first().map_or(0, Vec::len);
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for (&s, x) in self.signs.iter().zip(vectors) {
            for (o, &v) in out.iter_mut().zip(x) {
                *o += v * s as f64;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum RadMethod {
    Exhaustive { patterns: u64 },
    MonteCarlo { samples: usize, stderr: f64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadNormResult {
    pub value: f64,
    pub method: RadMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadMode {
    /// Exhaustive up to [`EXHAUSTIVE_MAX`] vectors, Monte Carlo beyond.
    Auto { samples: usize, seed: u64 },
    Exhaustive,
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for RadMode {
    fn default() -> Self {
        RadMode::Auto { samples: DEFAULT_MC_SAMPLES, seed: DEFAULT_SEED }
    }
}

fn check_vectors(vectors: &[Vec<Complex64>]) -> Result<usize> {
    let d = vectors
        .first()
        .ok_or_else(|| Error::Precondition("Rademacher average of an empty list".into()))?
        .len();
    if vectors.iter().any(|x| x.len() != d) {
        return Err(Error::DimensionMismatch("vectors of different lengths".into()));
    }
    Ok(d)
}

fn combine_bits(bits: u64, vectors: &[Vec<Complex64>], buf: &mut [Complex64]) {
    buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
    for (k, x) in vectors.iter().enumerate() {
        let s = if bits >> k & 1 == 1 { -1.0 } else { 1.0 };
        for (o, &v) in buf.iter_mut().zip(x) {
            *o += v * s;
        }
    }
}

/// Rademacher norm of `vectors` measured in `norm`.
pub fn rad_norm(vectors: &[Vec<Complex64>], norm: NormKind, mode: RadMode) -> Result<RadNormResult> {
    let d = check_vectors(vectors)?;
    let n = vectors.len();
    let exhaustive = match mode {
        RadMode::Exhaustive => {
            if n > EXHAUSTIVE_MAX {
                return Err(Error::Precondition(format!(
                    "exhaustive average needs at most {EXHAUSTIVE_MAX} vectors, got {n}"
                )));
            }
            true
        }
        RadMode::Auto { .. } => n <= EXHAUSTIVE_MAX,
        RadMode::MonteCarlo { .. } => false,
    };
    if exhaustive {
        // ε and −ε give the same norm, so fix ε_{N−1} = +1.
        let half = 1u64 << (n - 1);
        let mut buf = vec![Complex64::new(0.0, 0.0); d];
        let mut sum = 0.0;
        for bits in 0..half {
            combine_bits(bits, vectors, &mut buf);
            sum += norm.vector_norm(&buf).powi(2);
        }
        return Ok(RadNormResult {
            value: (sum / half as f64).sqrt(),
            method: RadMethod::Exhaustive { patterns: 1u64 << n },
        });
    }
    let (samples, seed) = match mode {
        RadMode::Auto { samples, seed } | RadMode::MonteCarlo { samples, seed } => (samples, seed),
        RadMode::Exhaustive => unreachable!(),
    };
    if samples < 2 {
        return Err(Error::Precondition("Monte Carlo needs at least two samples".into()));
    }
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut buf = vec![Complex64::new(0.0, 0.0); d];
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
                for x in vectors {
                    let s = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                    for (o, &v) in buf.iter_mut().zip(x) {
                        *o += v * s;
                    }
                }
                let q = norm.vector_norm(&buf).powi(2);
                s1 += q;
                s2 += q * q;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = partial.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let m = samples as f64;
    let mean = s1 / m;
    let var = ((s2 / m - mean * mean) * m / (m - 1.0)).max(0.0);
    let value = mean.sqrt();
    // Delta method for the square root of the mean.
    let stderr = if value > 0.0 { (var / m).sqrt() / (2.0 * value) } else { 0.0 };
    Ok(RadNormResult { value, method: RadMethod::MonteCarlo { samples, stderr, seed } })
}

/// Search settings of [`estimate_r_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RBoundConfig {
    pub trials: usize,
    /// Largest family length `N` drawn per trial.
    pub family_size_max: usize,
    /// Hill-climbing steps per operator tuple.
    pub climb_steps: usize,
    pub seed: u64,
    pub mode: RadMode,
}

impl Default for RBoundConfig {
    fn default() -> Self {
        RBoundConfig {
            trials: 16,
            family_size_max: 4,
            climb_steps: 200,
            seed: DEFAULT_SEED,
            mode: RadMode::Exhaustive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RWitness {
    /// Index into the operator list for each `T_k`.
    pub op_indices: Vec<usize>,
    /// The vectors `x_k` as `[re, im]` pairs.
    pub vectors: Vec<Vec<[f64; 2]>>,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RBoundEstimate {
    /// Largest observed `‖(T_k x_k)‖_Rad / ‖(x_k)‖_Rad`; a lower bound of the
    /// R-bound of the family.
    pub c_lower: f64,
    pub witness: RWitness,
    pub trials: usize,
    pub seed: u64,
}

fn gaussian_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex64> {
    (0..d)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

fn rad_ratio(ops: &[&CMatrix], xs: &[Vec<Complex64>], norm: NormKind, mode: RadMode) -> Result<f64> {
    let images: Vec<Vec<Complex64>> = ops.iter().zip(xs).map(|(t, x)| t.mul_vec(x)).collect();
    let den = rad_norm(xs, norm, mode)?.value;
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok(rad_norm(&images, norm, mode)?.value / den)
}

/// Deterministic stream id for a tuple of operator indices within a trial.
fn tuple_stream(trial: usize, tuple: &[usize]) -> u64 {
    // FNV-1a over the trial number and indices.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in std::iter::once(trial).chain(tuple.iter().copied()) {
        for b in (v as u64).to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

/// Hill climb on the vectors for a fixed operator tuple.
fn climb(
    ops: &[&CMatrix],
    start: &[Vec<Complex64>],
    norm: NormKind,
    config: &RBoundConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, Vec<Vec<Complex64>>)> {
    let mut xs = start.to_vec();
    let mut best = rad_ratio(ops, &xs, norm, config.mode)?;
    let mut step = 0.5;
    let d = xs[0].len();
    for _ in 0..config.climb_steps {
        let k = rng.gen_range(0..xs.len());
        let scale = xs[k].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
        let noise = gaussian_vector(rng, d);
        let mut trial = xs.clone();
        for (t, e) in trial[k].iter_mut().zip(noise) {
            *t += e * (step * scale / (d as f64).sqrt());
        }
        let r = rad_ratio(ops, &trial, norm, config.mode)?;
        if r > best {
            best = r;
            xs = trial;
            step = (step * 1.5).min(1.0);
        } else {
            step = (step * 0.8).max(1e-6);
        }
    }
    Ok((best, xs))
}

/// Lower estimate of the R-bound of `ops`.
///
/// Each trial draws a family length `N ≤ family_size_max` and Gaussian
/// vectors from its own stream. All `|E|^N` operator tuples are tried when
/// there are at most 256 of them (otherwise 256 tuples are drawn), each
/// refined by a hill climb whose stream depends only on the trial and the
/// tuple. With full enumeration, appending operators to `ops` never lowers
/// the estimate.
pub fn estimate_r_bound(ops: &[Operator], config: &RBoundConfig) -> Result<RBoundEstimate> {
    let first = ops.first().ok_or_else(|| Error::Precondition("empty operator family".into()))?;
    let d = first.dim();
    let norm = first.norm_kind();
    if ops.iter().any(|t| t.dim() != d || t.norm_kind() != norm) {
        return Err(Error::DimensionMismatch("operators must share dimension and norm".into()));
    }
    if config.trials == 0 || config.family_size_max == 0 {
        return Err(Error::Precondition("trials and family size must be positive".into()));
    }
    let mats: Vec<&CMatrix> = ops.iter().map(Operator::matrix).collect();
    let per_trial: Vec<(f64, RWitness)> = (0..config.trials)
        .into_par_iter()
        .map(|trial| -> Result<(f64, RWitness)> {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(trial as u64);
            let n = rng.gen_range(1..=config.family_size_max);
            let xs: Vec<Vec<Complex64>> = (0..n).map(|_| gaussian_vector(&mut rng, d)).collect();
            let total = (ops.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
            let tuples: Vec<Vec<usize>> = if total <= MAX_TUPLES as u128 {
                (0..total as usize)
                    .map(|mut code| {
                        (0..n)
                            .map(|_| {
                                let i = code % ops.len();
                                code /= ops.len();
                                i
                            })
                            .collect()
                    })
                    .collect()
            } else {
                let mut pick = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9e37_79b9_7f4a_7c15);
                pick.set_stream(trial as u64);
                (0..MAX_TUPLES)
                    .map(|_| (0..n).map(|_| pick.gen_range(0..ops.len())).collect())
                    .collect()
            };
            let mut best: Option<(f64, RWitness)> = None;
            for tuple in tuples {
                let chosen: Vec<&CMatrix> = tuple.iter().map(|&i| mats[i]).collect();
                let mut climb_rng = ChaCha8Rng::seed_from_u64(config.seed);
                climb_rng.set_stream(tuple_stream(trial, &tuple));
                let (ratio, vecs) = climb(&chosen, &xs, norm, config, &mut climb_rng)?;
                if best.as_ref().is_none_or(|b| ratio > b.0) {
                    let vectors = vecs.iter().map(|x| x.iter().map(|v| [v.re, v.im]).collect()).collect();
                    best = Some((ratio, RWitness { op_indices: tuple, vectors, ratio }));
                }
            }
            Ok(best.expect("at least one tuple"))
        })
        .collect::<Result<_>>()?;
    let (c_lower, witness) = per_trial
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("at least one trial");
    Ok(RBoundEstimate { c_lower, witness, trials: config.trials, seed: config.seed })
}

/// The sampled resolvent family `{(λ − v) R(λ, T)}` on the shells outside
/// the region of angle `angle`, where `v` is the vertex (`1` for Stolz
/// domains, `0` for sectors). At most `max_ops` evenly strided samples are
/// kept.
pub fn resolvent_family(t: &Operator, region: &Region, density: usize, max_ops: usize) -> Result<Vec<Operator>> {
    let pts = shell_points(region, density)?;
    let stride = pts.len().div_ceil(max_ops.max(1)).max(1);
    let vertex = match region.kind() {
        RegionKind::NStolz => Complex64::new(1.0, 0.0),
        RegionKind::NSector => Complex64::new(0.0, 0.0),
    };
    pts.iter()
        .step_by(stride)
        .map(|&lambda| {
            let r = t.resolvent(lambda)?;
            Operator::new(r.value.scale(lambda - vertex), t.norm_kind())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadraticEstimate {
    /// Largest observed `‖(g_k(A) x)_k‖_Rad / (‖x‖ · sup (Σ|g_k|²)^{1/2})`.
    pub c_lower: f64,
    /// Maximizing `x` as `[re, im]` pairs.
    pub witness: Vec<[f64; 2]>,
    /// Sampled `sup_z (Σ_k |g_k(z)|²)^{1/2}` over the region.
    pub square_sum_sup: f64,
    pub x_samples: usize,
    pub seed: u64,
}

/// Lower estimate of the quadratic calculus constant with a single vector
/// `x_k = x` for every `k`.
///
/// The functions are evaluated at the operator through [`apply_auto`] on the
/// region of kind `kind`, order `params.n` and angle `params.gamma`.
pub fn estimate_quadratic_calculus(
    op: &Operator,
    kind: RegionKind,
    g_family: &[HoloFn],
    params: &CalculusParams,
    x_samples: usize,
    seed: u64,
    mode: RadMode,
) -> Result<QuadraticEstimate> {
    if g_family.is_empty() || x_samples == 0 {
        return Err(Error::Precondition("need functions and at least one sample vector".into()));
    }
    let region = Region::new(kind, params.n, params.gamma.value())?;
    for g in g_family {
        g.check_bounded_on(&region)?;
    }
    let square_sum_sup = sup_over_boundary(&region, SUP_SAMPLES_PER_PIECE, |z| {
        let mut s = 0.0;
        for g in g_family {
            s += g.eval(z)?.norm_sqr();
        }
        Ok(s.sqrt())
    })?
    .value;
    let d = op.dim();
    let norm = op.norm_kind();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<Vec<Complex64>> = (0..x_samples).map(|_| gaussian_vector(&mut rng, d)).collect();
    if square_sum_sup == 0.0 {
        let witness = xs[0].iter().map(|v| [v.re, v.im]).collect();
        return Ok(QuadraticEstimate { c_lower: 0.0, witness, square_sum_sup, x_samples, seed });
    }
    let applied: Vec<CMatrix> = g_family
        .iter()
        .map(|g| Ok(apply_auto(op, g, kind, params)?.operator.matrix().clone()))
        .collect::<Result<_>>()?;
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, x) in xs.iter().enumerate() {
        let images: Vec<Vec<Complex64>> = applied.iter().map(|g| g.mul_vec(x)).collect();
        let rad = rad_norm(&images, norm, mode)?.value;
        let ratio = rad / (norm.vector_norm(x) * square_sum_sup);
        if ratio > best.0 {
            best = (ratio, i);
        }
    }
    let witness = xs[best.1].iter().map(|v| [v.re, v.im]).collect();
    Ok(QuadraticEstimate { c_lower: best.0, witness, square_sum_sup, x_samples, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rad_norm_examples() {
        let x = vec![vec![c(3.0, 0.0), c(0.0, 4.0)]];
        for kind in [NormKind::P1, NormKind::P2, NormKind::PInf] {
            let r = rad_norm(&x, kind, RadMode::Exhaustive).unwrap();
            assert_eq!(r.value, kind.vector_norm(&x[0]));
        }
        let e = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]];
        assert_eq!(rad_norm(&e, NormKind::P1, RadMode::Exhaustive).unwrap().value, 2.0);
        let xs = vec![vec![c(1.0, 2.0), c(-0.5, 0.0)], vec![c(0.3, 0.3), c(2.0, -1.0)], vec![c(0.0, 1.0), c(1.0, 1.0)]];
        let hilbert = xs.iter().map(|x| NormKind::P2.vector_norm(x).powi(2)).sum::<f64>().sqrt();
        let r = rad_norm(&xs, NormKind::P2, RadMode::Exhaustive).unwrap();
        assert!((r.value - hilbert).abs() < 1e-14 * hilbert);
    }

    #[test]
    fn monte_carlo_is_seeded_and_close() {
        let xs: Vec<Vec<Complex64>> = (0..16).map(|k| vec![c(k as f64, 1.0), c(1.0, -(k as f64))]).collect();
        let mode = RadMode::MonteCarlo { samples: 20_000, seed: 7 };
        let a = rad_norm(&xs, NormKind::P1, mode).unwrap();
        let b = rad_norm(&xs, NormKind::P1, mode).unwrap();
        assert_eq!(a, b);
        let exact = rad_norm(&xs[..14], NormKind::P1, RadMode::Exhaustive).unwrap().value;
        let mc = rad_norm(&xs[..14], NormKind::P1, RadMode::MonteCarlo { samples: 20_000, seed: 7 }).unwrap();
        let RadMethod::MonteCarlo { stderr, .. } = mc.method else { panic!() };
        assert!((mc.value - exact).abs() < 4.0 * stderr + 1e-12);
        assert!(rad_norm(&[], NormKind::P2, RadMode::default()).is_err());
    }

    #[test]
    fn r_bound_examples() {
        let id = Operator::new(CMatrix::identity(3), NormKind::P2).unwrap();
        let cfg = RBoundConfig { trials: 4, ..RBoundConfig::default() };
        let est = estimate_r_bound(&[id], &cfg).unwrap();
        assert!((est.c_lower - 1.0).abs() < 1e-10);
        let t = Operator::new(
            CMatrix::from_rows(vec![vec![c(0.5, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.5, 0.0)]]).unwrap(),
            NormKind::P2,
        )
        .unwrap();
        let est = estimate_r_bound(&[t.clone()], &RBoundConfig { trials: 8, ..RBoundConfig::default() }).unwrap();
        assert!((est.c_lower - t.op_norm()).abs() < 1e-2);
        assert!(est.c_lower <= t.op_norm() + 1e-12);
        let p = Operator::diagonal(&[c(1.0, 0.0), c(0.0, 0.0)], NormKind::P2);
        let q = Operator::diagonal(&[c(0.0, 0.0), c(1.0, 0.0)], NormKind::P2);
        let est = estimate_r_bound(&[p, q], &cfg).unwrap();
        assert!(est.c_lower <= 1.0 + 1e-12);
    }

    #[test]
    fn r_bound_monotone_in_family() {
        let a = Operator::diagonal(&[c(0.5, 0.0), c(0.2, 0.1)], NormKind::P1);
        let b = Operator::new(
            CMatrix::from_rows(vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.3, 0.0), c(0.0, 0.0)]]).unwrap(),
            NormKind::P1,
        )
        .unwrap();
        let cfg = RBoundConfig { trials: 4, family_size_max: 3, climb_steps: 20, ..RBoundConfig::default() };
        let one = estimate_r_bound(&[a.clone()], &cfg).unwrap().c_lower;
        let two = estimate_r_bound(&[a, b], &cfg).unwrap().c_lower;
        assert!(two >= one);
    }

    #[test]
    fn quadratic_scalar_and_zero() {
        let a = Operator::diagonal(&[c(0.4, 0.0)], NormKind::P2);
        let params = CalculusParams::new(1, 0.2, 1.5, 1e-10).unwrap();
        let g1 = HoloFn::rational(
            crate::poly::Poly::from_real(&[0.0, 1.0]),
            crate::poly::Poly::from_real(&[1.0, 2.0, 1.0]),
        )
        .unwrap();
        let g2 = g1.pow(2);
        let est = estimate_quadratic_calculus(&a, RegionKind::NSector, &[g1.clone(), g2.clone()], &params, 4, 1, RadMode::Exhaustive)
            .unwrap();
        let at = |g: &HoloFn| g.eval(c(0.4, 0.0)).unwrap().norm_sqr();
        let expected = (at(&g1) + at(&g2)).sqrt() / est.square_sum_sup;
        assert!((est.c_lower - expected).abs() < 1e-8);
        assert!(est.c_lower <= 1.0);
        let zero = HoloFn::constant(c(0.0, 0.0));
        let est = estimate_quadratic_calculus(&a, RegionKind::NSector, &[zero], &params, 2, 1, RadMode::Exhaustive).unwrap();
        assert_eq!(est.c_lower, 0.0);
    }

    #[test]
    fn resolvent_family_of_zero_operator() {
        let zero = Operator::new(CMatrix::zeros(2, 2), NormKind::P2).unwrap();
        let region = Region::n_stolz(1, 0.5).unwrap();
        let fam = resolvent_family(&zero, &region, 4, 10).unwrap();
        assert!(!fam.is_empty() && fam.len() <= 10);
    }
}
