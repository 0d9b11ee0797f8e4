//! Dense complex matrices as the operator model.
//!
//! An [`Operator`] is a `d × d` complex matrix acting on `C^d` equipped with
//! one of the p-norms `p ∈ {1, 2, ∞}`. Spectra are never computed by a general
//! eigensolver: an operator either carries [`SpectralMeta`] from construction
//! or is enclosed by Gershgorin discs (see [`Operator::enclosure`]).

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;

/// Relative pivot threshold below which an LU factorization is singular.
pub const PIVOT_TOL: f64 = 1e-14;
/// Maximum accepted `‖(λI − T)X − I‖_max` for a resolvent sample.
pub const RESOLVENT_RESIDUAL_TOL: f64 = 1e-8;
/// Relative reconstruction tolerance for spectral metadata.
pub const SPECTRAL_TOL: f64 = 1e-10;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(CMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let data = (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).map(|(i, j)| f(i, j)).collect();
        CMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| v * s).collect() }
    }

    /// `self += s · other`.
    pub fn add_scaled(&mut self, other: &CMatrix, s: Complex64) {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self[(i, j)].norm() == 0.0))
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.adjoint().is_upper_triangular()
    }

    /// Block-diagonal `diag(self, other)`.
    pub fn block_diag(&self, other: &CMatrix) -> CMatrix {
        let mut m = CMatrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)];
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m[(self.rows + i, self.cols + j)] = other[(i, j)];
            }
        }
        m
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest singular value, from a dense SVD.
    pub fn norm_2(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        let m = nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data);
        m.singular_values().max()
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        match kind {
            NormKind::P1 => self.norm_1(),
            NormKind::P2 => self.norm_2(),
            NormKind::PInf => self.norm_inf(),
        }
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> Result<Lu> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!("LU of {}×{} matrix", self.rows, self.cols)));
        }
        let n = self.rows;
        let scale = self.max_abs();
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, a[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= PIVOT_TOL * scale || pivot == 0.0 {
                return Err(Error::SingularResolvent { lambda: Complex64::new(f64::NAN, f64::NAN) });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    a.data.swap(p * n + j, k * n + j);
                }
            }
            let inv = Complex64::new(1.0, 0.0) / a[(k, k)];
            for i in k + 1..n {
                let factor = a[(i, k)] * inv;
                a[(i, k)] = factor;
                if factor.norm() == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    let v = a[(k, j)];
                    a[(i, j)] -= factor * v;
                }
            }
        }
        Ok(Lu { lu: a, perm })
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        Ok(self.lu()?.solve_matrix(&CMatrix::identity(self.rows)))
    }

    /// Horner evaluation `p(self)`.
    pub fn poly_eval(&self, p: &Poly) -> CMatrix {
        let n = self.rows;
        p.coeffs().iter().rev().fold(CMatrix::zeros(n, n), |acc, &c| {
            let mut next = &acc * self;
            for i in 0..n {
                next[(i, i)] += c;
            }
            next
        })
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in mul");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }
}

/// Packed LU factors `P A = L U` with unit-diagonal `L`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.rows;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: Complex64 = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: Complex64 = (i + 1..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        x
    }

    pub fn solve_matrix(&self, b: &CMatrix) -> CMatrix {
        let n = self.lu.rows;
        let mut out = CMatrix::zeros(n, b.cols);
        for j in 0..b.cols {
            let col: Vec<Complex64> = (0..n).map(|i| b[(i, j)]).collect();
            for (i, v) in self.solve_vec(&col).into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum NormKind {
    #[serde(rename = "p1")]
    P1,
    #[default]
    #[serde(rename = "p2")]
    P2,
    #[serde(rename = "pinf")]
    PInf,
}

impl NormKind {
    pub fn vector_norm(self, x: &[Complex64]) -> f64 {
        match self {
            NormKind::P1 => x.iter().map(|v| v.norm()).sum(),
            NormKind::P2 => x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt(),
            NormKind::PInf => x.iter().map(|v| v.norm()).fold(0.0, f64::max),
        }
    }
}

/// Eigen-decomposition `T = V diag(λ) V⁻¹` known from construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeta {
    pub eigenvalues: Vec<Complex64>,
    pub similarity: CMatrix,
}

/// Certified region containing the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumEnclosure {
    /// The spectrum itself.
    Points(Vec<Complex64>),
    /// Gershgorin discs `(center, radius)`.
    Discs(Vec<(Complex64, f64)>),
}

impl SpectrumEnclosure {
    /// Every point of the enclosure as a `(center, radius)` disc; exact
    /// eigenvalues are discs of radius zero.
    pub fn discs(&self) -> Vec<(Complex64, f64)> {
        match self {
            SpectrumEnclosure::Points(p) => p.iter().map(|&z| (z, 0.0)).collect(),
            SpectrumEnclosure::Discs(d) => d.clone(),
        }
    }
}

/// A bounded operator on `(C^d, ‖·‖_p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: CMatrix,
    spectral: Option<SpectralMeta>,
    norm: NormKind,
}

/// `R(λ, T) = (λI − T)⁻¹` together with its solve residual.
#[derive(Debug, Clone)]
pub struct ResolventSample {
    pub lambda: Complex64,
    pub value: CMatrix,
    pub solve_residual: f64,
}

impl Operator {
    pub fn new(matrix: CMatrix, norm: NormKind) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "operator matrix must be square, got {}×{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Operator { matrix, spectral: None, norm })
    }

    pub fn diagonal(eigenvalues: &[Complex64], norm: NormKind) -> Self {
        Operator {
            matrix: CMatrix::from_diag(eigenvalues),
            spectral: Some(SpectralMeta {
                eigenvalues: eigenvalues.to_vec(),
                similarity: CMatrix::identity(eigenvalues.len()),
            }),
            norm,
        }
    }

    /// `V diag(eigenvalues) V⁻¹`.
    pub fn from_spectral(eigenvalues: &[Complex64], similarity: CMatrix, norm: NormKind) -> Result<Self> {
        if similarity.rows() != eigenvalues.len() || !similarity.is_square() {
            return Err(Error::DimensionMismatch("similarity must be d×d with d eigenvalues".into()));
        }
        let inv = similarity.inverse().map_err(|_| Error::Precondition("similarity is singular".into()))?;
        let scaled = CMatrix::from_fn(similarity.rows(), similarity.cols(), |i, j| similarity[(i, j)] * eigenvalues[j]);
        let matrix = &scaled * &inv;
        Ok(Operator {
            matrix,
            spectral: Some(SpectralMeta { eigenvalues: eigenvalues.to_vec(), similarity }),
            norm,
        })
    }

    /// Attaches spectral metadata to an explicit matrix after checking the
    /// reconstruction residual.
    pub fn with_spectral(matrix: CMatrix, meta: SpectralMeta, norm: NormKind) -> Result<Self> {
        let rebuilt = Operator::from_spectral(&meta.eigenvalues, meta.similarity.clone(), norm)?;
        let scale = matrix.max_abs().max(f64::MIN_POSITIVE);
        let residual = rebuilt.matrix.max_abs_diff(&matrix);
        if residual >= SPECTRAL_TOL * scale && residual > 0.0 {
            return Err(Error::Precondition(format!(
                "spectral metadata does not reconstruct the matrix (residual {residual:e})"
            )));
        }
        Ok(Operator { matrix, spectral: Some(meta), norm })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn spectral(&self) -> Option<&SpectralMeta> {
        self.spectral.as_ref()
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm
    }

    pub fn with_norm(mut self, norm: NormKind) -> Self {
        self.norm = norm;
        self
    }

    /// Operator norm for the operator's own norm kind.
    pub fn op_norm(&self) -> f64 {
        self.matrix.norm(self.norm)
    }

    /// `R(λ, T)` by an LU solve of `(λI − T) X = I`.
    pub fn resolvent(&self, lambda: Complex64) -> Result<ResolventSample> {
        let n = self.dim();
        let mut shifted = self.matrix.scale(Complex64::new(-1.0, 0.0));
        for i in 0..n {
            shifted[(i, i)] += lambda;
        }
        let lu = shifted.lu().map_err(|_| Error::SingularResolvent { lambda })?;
        let value = lu.solve_matrix(&CMatrix::identity(n));
        let residual = (&shifted * &value).max_abs_diff(&CMatrix::identity(n));
        if !(residual < RESOLVENT_RESIDUAL_TOL) {
            return Err(Error::SingularResolvent { lambda });
        }
        Ok(ResolventSample { lambda, value, solve_residual: residual })
    }

    /// Gershgorin discs by rows.
    pub fn gershgorin(&self) -> Vec<(Complex64, f64)> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let r = (0..n).filter(|&j| j != i).map(|j| self.matrix[(i, j)].norm()).sum();
                (self.matrix[(i, i)], r)
            })
            .collect()
    }

    /// Spectral metadata if present, the diagonal of a triangular matrix,
    /// otherwise Gershgorin discs.
    pub fn enclosure(&self) -> SpectrumEnclosure {
        if let Some(meta) = &self.spectral {
            return SpectrumEnclosure::Points(meta.eigenvalues.clone());
        }
        if self.matrix.is_upper_triangular() || self.matrix.is_lower_triangular() {
            return SpectrumEnclosure::Points(self.matrix.diag());
        }
        SpectrumEnclosure::Discs(self.gershgorin())
    }

    /// `a I + b T`, spectral metadata mapped accordingly.
    pub fn affine(&self, a: Complex64, b: Complex64) -> Operator {
        let mut matrix = self.matrix.scale(b);
        for i in 0..self.dim() {
            matrix[(i, i)] += a;
        }
        let spectral = self.spectral.as_ref().map(|m| SpectralMeta {
            eigenvalues: m.eigenvalues.iter().map(|&l| a + b * l).collect(),
            similarity: m.similarity.clone(),
        });
        Operator { matrix, spectral, norm: self.norm }
    }

    /// `rT`.
    pub fn scaled(&self, r: f64) -> Operator {
        self.affine(Complex64::new(0.0, 0.0), Complex64::new(r, 0.0))
    }

    /// `I − T`.
    pub fn one_minus(&self) -> Operator {
        self.affine(Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0))
    }

    /// `S = diag(T, 2I − T)` on `X ⊕_p X`.
    ///
    /// With `T = V D V⁻¹`, `2I − T = V (2 − D) V⁻¹`, so `S` carries the
    /// similarity `diag(V, V)` and spectrum `σ(T) ∪ (2 − σ(T))`.
    pub fn direct_sum_p(&self, norm: NormKind) -> Operator {
        let reflected = self.affine(Complex64::new(2.0, 0.0), Complex64::new(-1.0, 0.0));
        let matrix = self.matrix.block_diag(&reflected.matrix);
        let spectral = self.spectral.as_ref().map(|m| {
            let mut eigenvalues = m.eigenvalues.clone();
            eigenvalues.extend(m.eigenvalues.iter().map(|&l| 2.0 - l));
            SpectralMeta { eigenvalues, similarity: m.similarity.block_diag(&m.similarity) }
        });
        Operator { matrix, spectral, norm }
    }
}

/// Operator wire form
/// `{"dim":d,"re":[[...]],"im":[[...]],"norm":"p1"|"p2"|"pinf","spectral":{...}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub norm: NormKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralSpec>,
}

/// `{"eig_re":[...],"eig_im":[...],"v_re":[[...]],"v_im":[[...]]}`; the
/// similarity defaults to the identity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralSpec {
    pub eig_re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eig_im: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_re: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_im: Option<Vec<Vec<f64>>>,
}

fn join_re_im(dim: usize, re: &[Vec<f64>], im: Option<&Vec<Vec<f64>>>) -> Result<CMatrix> {
    if re.len() != dim || re.iter().any(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch(format!("expected {dim}×{dim} real part")));
    }
    if let Some(im) = im {
        if im.len() != dim || im.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch(format!("expected {dim}×{dim} imaginary part")));
        }
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| {
        Complex64::new(re[i][j], im.map_or(0.0, |m| m[i][j]))
    }))
}

fn split_re_im(m: &CMatrix) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let re = (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)].re).collect()).collect();
    let im = (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)].im).collect()).collect();
    (re, im)
}

impl TryFrom<OperatorSpec> for Operator {
    type Error = Error;

    fn try_from(spec: OperatorSpec) -> Result<Self> {
        let matrix = join_re_im(spec.dim, &spec.re, spec.im.as_ref())?;
        match spec.spectral {
            None => Operator::new(matrix, spec.norm),
            Some(s) => {
                let d = s.eig_re.len();
                if d != spec.dim {
                    return Err(Error::DimensionMismatch("eigenvalue count differs from dim".into()));
                }
                let eigenvalues = (0..d)
                    .map(|k| Complex64::new(s.eig_re[k], s.eig_im.as_ref().map_or(0.0, |v| v.get(k).copied().unwrap_or(0.0))))
                    .collect();
                let similarity = match &s.v_re {
                    Some(v_re) => join_re_im(d, v_re, s.v_im.as_ref())?,
                    None => CMatrix::identity(d),
                };
                Operator::with_spectral(matrix, SpectralMeta { eigenvalues, similarity }, spec.norm)
            }
        }
    }
}

impl From<&Operator> for OperatorSpec {
    fn from(op: &Operator) -> Self {
        let (re, im) = split_re_im(&op.matrix);
        let spectral = op.spectral.as_ref().map(|m| {
            let (v_re, v_im) = split_re_im(&m.similarity);
            SpectralSpec {
                eig_re: m.eigenvalues.iter().map(|z| z.re).collect(),
                eig_im: Some(m.eigenvalues.iter().map(|z| z.im).collect()),
                v_re: Some(v_re),
                v_im: Some(v_im),
            }
        });
        OperatorSpec { dim: op.dim(), re, im: Some(im), norm: op.norm, spectral }
    }
}

impl Serialize for Operator {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorSpec::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let spec = OperatorSpec::deserialize(deserializer)?;
        Operator::try_from(spec).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_resolvent() {
        let t = Operator::diagonal(&[c(0.5, 0.0), c(0.9, 0.0)], NormKind::P2);
        let r = t.resolvent(c(2.0, 0.0)).unwrap();
        assert!((r.value[(0, 0)] - c(1.0 / 1.5, 0.0)).norm() < 1e-15);
        assert!((r.value[(1, 1)] - c(1.0 / 1.1, 0.0)).norm() < 1e-15);
        assert!(r.value[(0, 1)].norm() == 0.0);
        assert!(r.solve_residual < RESOLVENT_RESIDUAL_TOL);
        assert!(matches!(t.resolvent(c(0.9, 0.0)), Err(Error::SingularResolvent { .. })));
    }

    #[test]
    fn norms_of_small_examples() {
        let d = Operator::diagonal(&[c(0.5, 0.0), c(-0.9, 0.0)], NormKind::P2);
        assert!((d.op_norm() - 0.9).abs() < 1e-12);
        let nil = CMatrix::from_rows(vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]).unwrap();
        assert_eq!(nil.norm_1(), 1.0);
        assert_eq!(nil.norm_inf(), 1.0);
        assert!((nil.norm_2() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn norm_2_with_rank_one_matrix() {
        let m = CMatrix::from_rows(vec![vec![c(1.0, 0.0), c(-1.0, 0.0)], vec![c(1.0, 0.0), c(-1.0, 0.0)]]).unwrap();
        assert!((m.norm_2() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn lu_solves_and_inverts() {
        let m = CMatrix::from_rows(vec![
            vec![c(0.0, 1.0), c(2.0, 0.0), c(0.5, -0.5)],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(3.0, 1.0)],
            vec![c(-2.0, 0.5), c(1.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).max_abs_diff(&CMatrix::identity(3)) < 1e-14);
        assert!(CMatrix::zeros(2, 2).lu().is_err());
    }

    #[test]
    fn direct_sum_spectrum_and_norms() {
        let t = Operator::diagonal(&[c(0.5, 0.0)], NormKind::P1);
        let s = t.direct_sum_p(NormKind::P1);
        assert_eq!(s.matrix().diag(), vec![c(0.5, 0.0), c(1.5, 0.0)]);
        assert_eq!(s.spectral().unwrap().eigenvalues, vec![c(0.5, 0.0), c(1.5, 0.0)]);
    }

    #[test]
    fn triangular_enclosure_is_exact() {
        let j = CMatrix::from_rows(vec![vec![c(0.5, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.5, 0.0)]]).unwrap();
        let op = Operator::new(j, NormKind::P2).unwrap();
        assert_eq!(op.enclosure(), SpectrumEnclosure::Points(vec![c(0.5, 0.0), c(0.5, 0.0)]));
    }

    #[test]
    fn operator_json_round_trip() {
        let v = CMatrix::from_rows(vec![vec![c(1.0, 0.0), c(0.5, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]).unwrap();
        let op = Operator::from_spectral(&[c(0.5, 0.0), c(0.9, 0.0)], v, NormKind::PInf).unwrap();
        let text = serde_json::to_string(&op).unwrap();
        let back: Operator = serde_json::from_str(&text).unwrap();
        assert!(back.matrix().max_abs_diff(op.matrix()) < 1e-15);
        assert_eq!(back.norm_kind(), NormKind::PInf);
        assert!(back.spectral().is_some());

        let plain: Operator = serde_json::from_str(r#"{"dim":2,"re":[[0.5,0],[0,0.9]],"norm":"p1"}"#).unwrap();
        assert!(plain.spectral().is_none());
        let bad = serde_json::from_str::<Operator>(
            r#"{"dim":2,"re":[[0.5,0],[0,0.9]],"spectral":{"eig_re":[0.5,0.8]}}"#,
        );
        assert!(bad.is_err());
    }
}
