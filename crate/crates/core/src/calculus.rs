//! Contour-integral functional calculi for n-Ritt and n-sectorial matrices.
//!
//! * `φ(T) = (1/2πi) ∮_{∂B_{n,β}} φ(λ) R(λ, T) dλ` for `φ` with Stolz decay,
//! * `f(A) = (1/2πi) ∫_{∂S_{n,ν}} f(z) R(z, A) dz` for `f` with sector decay,
//! * `ψ(T) = c I + φ(T)` for `ψ = c + φ`.
//!
//! Classification searches an angle grid for the smallest angle whose closed
//! region contains the spectrum enclosure, then samples the resolvent on
//! shells outside the larger regions of the grid. The reported bounds are
//! sample maxima, not proofs.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::contours::{integrate_with_budget, sector_boundary, stolz_boundary, DEFAULT_NODE_BUDGET};
use crate::error::{Error, Result};
use crate::funclass::{decompose_polynomial, sup_norm, DecayCertificate, HoloFn};
use crate::matrixkit::{CMatrix, Operator, SpectrumEnclosure};
use crate::poly::Poly;
use crate::regions::{log_space, max_angle, Angle, Region, RegionKind};

/// Boundary offsets of the resolvent sampling shells.
pub const SHELL_OFFSETS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
/// Radii of the far-field sampling circles.
pub const FAR_FIELD: [f64; 3] = [2.0, 10.0, 100.0];
/// Default number of grid angles.
pub const DEFAULT_GRID_ANGLES: usize = 64;
/// Default boundary samples per contour piece on each shell.
pub const DEFAULT_SHELL_DENSITY: usize = 32;
/// Tolerance for treating enclosure points as lying on a closed region.
const CLOSURE_EPS: f64 = 1e-12;
/// A spectral point this close to the vertex is treated as the vertex.
const VERTEX_EPS: f64 = 1e-15;
/// Radial extent of the sampled sector shells.
const SECTOR_SHELL_RADII: (f64, f64) = (1e-4, 1e4);

/// Sampling record of a classification run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub angles: Vec<f64>,
    pub offsets: Vec<f64>,
    pub far_field: Vec<f64>,
    pub density: usize,
    /// Resolvent evaluations performed.
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleBound {
    pub angle: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalculusReport {
    pub n: usize,
    pub kind: RegionKind,
    /// Smallest grid angle whose closed region contains the enclosure.
    pub type_angle: Angle,
    /// Largest sampled `‖(λ−1)R(λ,T)‖` (Ritt) or `‖zR(z,A)‖` (sectorial)
    /// over all shells of grid angles above `type_angle`; infinite when no
    /// such angle exists.
    pub resolvent_bound: f64,
    pub admissible: bool,
    pub per_angle: Vec<AngleBound>,
    pub grid: GridSpec,
}

/// The `count`-angle default grid for the kind and order.
pub fn default_grid(kind: RegionKind, n: usize) -> Vec<Angle> {
    crate::regions::default_angle_grid(kind, n, DEFAULT_GRID_ANGLES)
}

/// Whether the disc `(c, r)` lies in the closure of `region`.
fn disc_in_closure(region: &Region, c: Complex64, r: f64) -> bool {
    if r == 0.0 {
        region.contains_closed(c, CLOSURE_EPS)
    } else {
        region.contains(c) && region.boundary_distance(c) >= r
    }
}

fn vertex(kind: RegionKind) -> Complex64 {
    match kind {
        RegionKind::NStolz => Complex64::new(1.0, 0.0),
        RegionKind::NSector => Complex64::new(0.0, 0.0),
    }
}

/// Checks that the enclosure lies strictly inside `region`, except for
/// spectral points at the vertex.
fn check_strictly_inside(enclosure: &SpectrumEnclosure, region: &Region) -> Result<()> {
    let v = vertex(region.kind());
    for (c, r) in enclosure.discs() {
        let at_vertex = r == 0.0 && (c - v).norm() <= VERTEX_EPS;
        let inside = region.contains(c) && region.boundary_distance(c) > r;
        if !(at_vertex || inside) {
            return Err(Error::Precondition(format!(
                "spectrum enclosure disc ({c}, {r:e}) is not strictly inside {region:?}"
            )));
        }
    }
    Ok(())
}

/// Resolvent sampling points outside the closure of `region`: boundary points
/// pushed along the outward normal by each of [`SHELL_OFFSETS`], plus
/// `density·8` points on each far-field circle.
pub fn shell_points(region: &Region, density: usize) -> Result<Vec<Complex64>> {
    let density = density.max(2);
    let n = region.n();
    let mut base: Vec<(Complex64, Complex64)> = Vec::new();
    match region.kind() {
        RegionKind::NStolz => {
            let contour = stolz_boundary(n, region.angle())?;
            for piece in contour.pieces() {
                let (s0, s1) = piece.param_range();
                for k in 0..density {
                    let s = s0 + (s1 - s0) * (k as f64 + 0.5) / density as f64;
                    base.push((piece.point(s), piece.derivative(s)));
                }
            }
        }
        RegionKind::NSector => {
            let contour = sector_boundary(n, region.angle(), SECTOR_SHELL_RADII.1)?;
            let radii = log_space(SECTOR_SHELL_RADII.0, SECTOR_SHELL_RADII.1, density);
            for piece in contour.pieces() {
                for &r in &radii {
                    let (s0, s1) = piece.param_range();
                    let tangent = piece.derivative(0.5 * (s0 + s1)) * (s1 - s0).signum();
                    base.push((piece.point(r), tangent));
                }
            }
        }
    }
    let mut out = Vec::with_capacity(base.len() * SHELL_OFFSETS.len() + FAR_FIELD.len() * 8 * density);
    for &(p, d) in &base {
        // Counterclockwise orientation: the region is on the left, so the
        // outward normal is −i times the unit tangent.
        let normal = Complex64::new(0.0, -1.0) * d / d.norm();
        for &delta in &SHELL_OFFSETS {
            let scale = match region.kind() {
                RegionKind::NStolz => 1.0,
                RegionKind::NSector => p.norm().max(SECTOR_SHELL_RADII.0),
            };
            out.push(p + normal * (delta * scale));
        }
    }
    for &radius in &FAR_FIELD {
        let m = 8 * density;
        for k in 0..m {
            out.push(Complex64::from_polar(radius, 2.0 * PI * (k as f64 + 0.5) / m as f64));
        }
    }
    out.retain(|&z| !region.contains_closed(z, 0.0));
    Ok(out)
}

/// Quantity bounded by the resolvent condition at `λ`.
fn resolvent_quantity(op: &Operator, kind: RegionKind, lambda: Complex64) -> Result<f64> {
    let r = op.resolvent(lambda)?;
    let factor = lambda - vertex(kind);
    let m = r.value.scale(factor);
    Ok(m.norm(op.norm_kind()))
}

fn classify(op: &Operator, kind: RegionKind, n: usize, grid: &[Angle], density: usize) -> Result<CalculusReport> {
    if n == 0 {
        return Err(Error::InvalidOrder(n));
    }
    if grid.is_empty() {
        return Err(Error::Precondition("empty angle grid".into()));
    }
    let top = max_angle(kind, n);
    let mut angles: Vec<Angle> = grid.iter().map(|a| a.check_below(top)).collect::<Result<_>>()?;
    angles.sort_by(|a, b| a.value().total_cmp(&b.value()));
    angles.dedup();

    let enclosure = op.enclosure();
    let discs = enclosure.discs();
    let contains_all = |a: Angle| -> Result<bool> {
        let region = Region::new(kind, n, a.value())?;
        Ok(discs.iter().all(|&(c, r)| disc_in_closure(&region, c, r)))
    };
    let mut type_angle = None;
    for &a in &angles {
        if contains_all(a)? {
            type_angle = Some(a);
            break;
        }
    }
    let type_angle = type_angle.ok_or_else(|| {
        Error::NotClassifiable(format!(
            "spectrum enclosure escapes the closed {kind:?} region of order {n} at the largest grid angle {}",
            angles.last().map(|a| a.value()).unwrap_or(0.0)
        ))
    })?;

    let above: Vec<Angle> = angles.iter().copied().filter(|a| a.value() > type_angle.value()).collect();
    let per_angle: Vec<(AngleBound, usize, bool)> = above
        .par_iter()
        .map(|&beta| -> Result<(AngleBound, usize, bool)> {
            let region = Region::new(kind, n, beta.value())?;
            let pts = shell_points(&region, density)?;
            let mut bound: f64 = 0.0;
            let mut finite = true;
            for &lambda in &pts {
                match resolvent_quantity(op, kind, lambda) {
                    Ok(v) if v.is_finite() => bound = bound.max(v),
                    Ok(_) | Err(Error::SingularResolvent { .. }) => finite = false,
                    Err(e) => return Err(e),
                }
            }
            if !finite {
                bound = f64::INFINITY;
            }
            Ok((AngleBound { angle: beta.value(), bound }, pts.len(), finite))
        })
        .collect::<Result<_>>()?;

    let samples = per_angle.iter().map(|x| x.1).sum();
    let all_finite = per_angle.iter().all(|x| x.2);
    let admissible = !per_angle.is_empty() && all_finite;
    let resolvent_bound = if per_angle.is_empty() {
        f64::INFINITY
    } else {
        per_angle.iter().map(|x| x.0.bound).fold(0.0, f64::max)
    };
    Ok(CalculusReport {
        n,
        kind,
        type_angle,
        resolvent_bound,
        admissible,
        per_angle: per_angle.into_iter().map(|x| x.0).collect(),
        grid: GridSpec {
            angles: angles.iter().map(|a| a.value()).collect(),
            offsets: SHELL_OFFSETS.to_vec(),
            far_field: FAR_FIELD.to_vec(),
            density,
            samples,
        },
    })
}

/// n-Ritt classification of `T` on an angle grid of Stolz angles.
pub fn classify_ritt(t: &Operator, n: usize, grid: &[Angle], density: usize) -> Result<CalculusReport> {
    classify(t, RegionKind::NStolz, n, grid, density)
}

/// n-sectorial classification of `A` on an angle grid of sector angles.
pub fn classify_sectorial(a: &Operator, n: usize, grid: &[Angle], density: usize) -> Result<CalculusReport> {
    classify(a, RegionKind::NSector, n, grid, density)
}

/// Result of a contour-integral evaluation.
#[derive(Debug, Clone)]
pub struct Applied {
    pub operator: Operator,
    /// Angle of the integration contour.
    pub contour_angle: Angle,
    /// Integrand evaluations spent.
    pub nodes: usize,
}

/// Angles and accuracy for the contour calculi.
///
/// `alpha` is the type angle of the operator, `gamma` the angle on which the
/// function is certified, and `beta ∈ (alpha, gamma)` the contour angle
/// (midpoint when `None`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalculusParams {
    pub n: usize,
    pub alpha: Angle,
    pub gamma: Angle,
    pub beta: Option<Angle>,
    /// Absolute max-entry tolerance of the integral.
    pub tol: f64,
    pub budget: usize,
}

impl CalculusParams {
    pub fn new(n: usize, alpha: f64, gamma: f64, tol: f64) -> Result<Self> {
        Ok(CalculusParams {
            n,
            alpha: Angle::new(alpha)?,
            gamma: Angle::new(gamma)?,
            beta: None,
            tol,
            budget: DEFAULT_NODE_BUDGET,
        })
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        self.beta = Some(Angle::new(beta)?);
        Ok(self)
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    fn contour_angle(&self, kind: RegionKind) -> Result<Angle> {
        if self.n == 0 {
            return Err(Error::InvalidOrder(self.n));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Precondition(format!("tolerance must be positive, got {}", self.tol)));
        }
        let gamma = self.gamma.check_below(max_angle(kind, self.n))?;
        let beta = match self.beta {
            Some(b) => b,
            None => Angle::new(0.5 * (self.alpha.value() + gamma.value()))?,
        };
        if !(self.alpha.value() < beta.value() && beta.value() < gamma.value()) {
            return Err(Error::Precondition(format!(
                "contour angle must satisfy α < β < γ, got α={}, β={}, γ={}",
                self.alpha.value(),
                beta.value(),
                gamma.value()
            )));
        }
        Ok(beta)
    }
}

/// Checks that `f` carries a certificate of the expected kind on a region of
/// order `n` with angle at least `gamma`, and returns its constants.
fn certificate_on(f: &HoloFn, kind: RegionKind, n: usize, gamma: Angle) -> Result<(f64, f64)> {
    let cert = f
        .decay()
        .ok_or_else(|| Error::Precondition("function carries no decay certificate".into()))?;
    let region = cert.region;
    let kind_ok = cert.certificate.region_kind() == kind;
    if !kind_ok || region.n() != n || region.angle().value() < gamma.value() {
        return Err(Error::Precondition(format!(
            "certificate {:?} on {region:?} does not cover the {kind:?} region of order {n} and angle {}",
            cert.certificate,
            gamma.value()
        )));
    }
    Ok(cert.certificate.constants())
}

fn two_pi_i() -> Complex64 {
    Complex64::new(0.0, 2.0 * PI)
}

/// `φ(T)` for `φ` with a Stolz decay certificate on `B_{n,γ}`.
pub fn apply_ritt(t: &Operator, phi: &HoloFn, params: &CalculusParams) -> Result<Applied> {
    let beta = params.contour_angle(RegionKind::NStolz)?;
    certificate_on(phi, RegionKind::NStolz, params.n, params.gamma)?;
    let region = Region::n_stolz(params.n, beta.value())?;
    check_strictly_inside(&t.enclosure(), &region)?;
    let contour = stolz_boundary(params.n, beta)?;
    let integral = integrate_with_budget(
        &contour,
        |lambda| {
            let r = t.resolvent(lambda)?;
            Ok(r.value.scale(phi.eval(lambda)?))
        },
        params.tol * 2.0 * PI,
        params.budget,
    )?;
    let value = integral.value.scale(Complex64::new(1.0, 0.0) / two_pi_i());
    Ok(Applied { operator: Operator::new(value, t.norm_kind())?, contour_angle: beta, nodes: integral.nodes })
}

/// Upper bound of `‖A‖₂`, which dominates the max-entry norm of any matrix
/// function of `A` in every norm kind used here.
fn norm2_upper(a: &CMatrix) -> f64 {
    (a.norm_1() * a.norm_inf()).sqrt()
}

/// Ray truncation radius for a sector-decay certificate `(c, s)`.
///
/// For `r ≥ 2‖A‖`, `‖R(z,A)‖ ≤ 2/r`, so the discarded tails of the `2n`
/// rays contribute at most `2nc / (π s R^s)` after the `1/2πi` factor. The
/// radius makes this a tenth of `tol`.
pub fn sector_truncation(a: &CMatrix, n: usize, c: f64, s: f64, tol: f64) -> f64 {
    let from_decay = (20.0 * n as f64 * c / (PI * s * tol)).powf(1.0 / s);
    from_decay.max(2.0 * norm2_upper(a)).max(1.0)
}

/// `f(A)` for `f` with a sector decay certificate on `S_{n,θ}`; here
/// `params.alpha` is the sectorial type `ω`, `params.gamma` is `θ` and the
/// contour angle is `ν`.
pub fn apply_sectorial(a: &Operator, f: &HoloFn, params: &CalculusParams) -> Result<Applied> {
    let nu = params.contour_angle(RegionKind::NSector)?;
    let (c, s) = certificate_on(f, RegionKind::NSector, params.n, params.gamma)?;
    let region = Region::n_sector(params.n, nu.value())?;
    check_strictly_inside(&a.enclosure(), &region)?;
    let r_max = sector_truncation(a.matrix(), params.n, c, s, params.tol);
    let contour = sector_boundary(params.n, nu, r_max)?;
    let integral = integrate_with_budget(
        &contour,
        |z| {
            let r = a.resolvent(z)?;
            Ok(r.value.scale(f.eval(z)?))
        },
        params.tol * 2.0 * PI * 0.9,
        params.budget,
    )?;
    let value = integral.value.scale(Complex64::new(1.0, 0.0) / two_pi_i());
    Ok(Applied { operator: Operator::new(value, a.norm_kind())?, contour_angle: nu, nodes: integral.nodes })
}

/// Splits `ψ = c + φ` with `φ` Stolz-certified on `B_{n,γ}`. Polynomials use
/// the exact decomposition `p(λ) = p(1) + (λ − 1) p̃(λ)`.
pub fn split_extended(psi: &HoloFn, n: usize, gamma: Angle) -> Result<(Complex64, HoloFn)> {
    let region = Region::n_stolz(n, gamma.value())?;
    match psi.as_polynomial() {
        Some(p) => {
            let (q, at_one) = decompose_polynomial(&p);
            let phi = HoloFn::poly(Poly::from_real(&[-1.0, 1.0]).mul(&q));
            if q.is_zero() {
                let zero = phi.certify(DecayCertificate::StolzDecay { c: f64::MIN_POSITIVE, s: 1.0 }, region)?;
                return Ok((at_one, zero));
            }
            Ok((at_one, phi.fit_stolz_certificate(region)?))
        }
        None => psi.extended_split(region),
    }
}

/// `ψ(T) = c I + φ(T)` for `ψ = c + φ`.
pub fn apply_extended(t: &Operator, psi: &HoloFn, params: &CalculusParams) -> Result<Applied> {
    let (c, phi) = split_extended(psi, params.n, params.gamma)?;
    let mut applied = apply_ritt(t, &phi, params)?;
    let mut m = applied.operator.matrix().clone();
    m.add_scaled(&CMatrix::identity(t.dim()), c);
    applied.operator = Operator::new(m, t.norm_kind())?;
    Ok(applied)
}

/// Evaluates `f` at the operator through the calculus matching `kind`.
///
/// Stolz: [`apply_ritt`] when `f` carries a Stolz certificate, otherwise
/// [`apply_extended`]. Sector: [`apply_sectorial`], fitting a sector
/// certificate on `S_{n,γ}` first if `f` has none.
pub fn apply_auto(op: &Operator, f: &HoloFn, kind: RegionKind, params: &CalculusParams) -> Result<Applied> {
    let own = f.decay().map(|c| c.certificate.region_kind());
    match kind {
        RegionKind::NStolz if own == Some(RegionKind::NStolz) => apply_ritt(op, f, params),
        RegionKind::NStolz => apply_extended(op, f, params),
        RegionKind::NSector if own == Some(RegionKind::NSector) => apply_sectorial(op, f, params),
        RegionKind::NSector => {
            let region = Region::n_sector(params.n, params.gamma.value())?;
            apply_sectorial(op, &f.clone().fit_sector_certificate(region)?, params)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RLimitRow {
    pub r: f64,
    /// `‖φ(rT) − φ(T)‖`.
    pub deviation: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RLimitReport {
    pub rows: Vec<RLimitRow>,
    /// Largest sampled `‖(λ−1)R(λ, rT)‖` over the shells of `B_{n,β}` and
    /// all `r` in the sequence.
    pub uniform_bound: f64,
}

/// `‖φ(rT) − φ(T)‖` along `r_sequence`.
///
/// Every `rT` must have its spectrum strictly inside the contour region;
/// this always holds for `n = 1` since `B_β` is convex and contains `0`.
pub fn approximate_r_limit(
    t: &Operator,
    phi: &HoloFn,
    params: &CalculusParams,
    r_sequence: &[f64],
    density: usize,
) -> Result<RLimitReport> {
    let base = apply_ritt(t, phi, params)?;
    let beta = base.contour_angle;
    let shells = shell_points(&Region::n_stolz(params.n, beta.value())?, density)?;
    let mut rows = Vec::with_capacity(r_sequence.len());
    let mut uniform_bound: f64 = 0.0;
    for &r in r_sequence {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::DomainError(format!("r must lie in (0, 1], got {r}")));
        }
        let rt = t.scaled(r);
        let applied = apply_ritt(&rt, phi, &CalculusParams { beta: Some(beta), ..*params })?;
        let diff = applied.operator.matrix() - base.operator.matrix();
        rows.push(RLimitRow { r, deviation: diff.norm(t.norm_kind()), nodes: applied.nodes });
        for &lambda in &shells {
            uniform_bound = uniform_bound.max(resolvent_quantity(&rt, RegionKind::NStolz, lambda)?);
        }
    }
    Ok(RLimitReport { rows, uniform_bound })
}

#[derive(Debug, Clone)]
pub struct TransferResult {
    /// `f(I − T)` from the sector calculus.
    pub lhs: Operator,
    /// `(f ∘ (1 − ·))(T)` from the Stolz calculus.
    pub rhs: Operator,
    /// `‖lhs − rhs‖`.
    pub deviation: f64,
    pub nodes: usize,
}

/// Compares `f(I − T)` with `φ(T)`, `φ(λ) = f(1 − λ)`.
///
/// The sector certificate `(c, s)` of `f` on `S_{n,γ}` transfers to the Stolz
/// certificate `|φ(λ)| ≤ c|1 − λ|^s` on `B_{n,γ}`, because
/// `1 − B_{n,γ} ⊆ S_{n,γ}`; it is re-validated before use. Both integrals use
/// the same `α`, `β`, `γ`.
pub fn transfer_check(t: &Operator, f: &HoloFn, params: &CalculusParams) -> Result<TransferResult> {
    let (c, s) = certificate_on(f, RegionKind::NSector, params.n, params.gamma)?;
    let lhs = apply_sectorial(&t.one_minus(), f, params)?;
    let stolz = Region::n_stolz(params.n, params.gamma.value())?;
    let phi = f
        .compose_one_minus()
        .certify(DecayCertificate::StolzDecay { c, s }, stolz)?;
    let rhs = apply_ritt(t, &phi, params)?;
    let deviation = (lhs.operator.matrix() - rhs.operator.matrix()).norm(t.norm_kind());
    Ok(TransferResult { lhs: lhs.operator, rhs: rhs.operator, deviation, nodes: lhs.nodes + rhs.nodes })
}

#[derive(Debug, Clone, Serialize)]
pub struct CalculusNormEstimate {
    /// Largest `‖φ(T)‖ / ‖φ‖_∞` over the family.
    pub k_lower: f64,
    /// Same maximum over the polynomial members, if any.
    pub k_poly_lower: Option<f64>,
    /// Family index of the maximizer.
    pub witness: usize,
    pub family_size: usize,
    pub ratios: Vec<f64>,
    pub nodes: usize,
}

/// Lower estimate of the calculus constant of `T` on `B_{n,γ}`.
///
/// Members with a Stolz certificate go through [`apply_ritt`]; all others
/// through [`apply_extended`]. Members with zero sup norm are skipped.
pub fn estimate_calculus_norm(t: &Operator, family: &[HoloFn], params: &CalculusParams) -> Result<CalculusNormEstimate> {
    if family.is_empty() {
        return Err(Error::Precondition("empty function family".into()));
    }
    let region = Region::n_stolz(params.n, params.gamma.value())?;
    let mut ratios = Vec::with_capacity(family.len());
    let mut nodes = 0;
    for phi in family {
        let applied = apply_auto(t, phi, RegionKind::NStolz, params)?;
        nodes += applied.nodes;
        let sup = sup_norm(phi, &region)?.value;
        ratios.push(if sup > 0.0 { applied.operator.op_norm() / sup } else { 0.0 });
    }
    let (witness, k_lower) = ratios
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
    let k_poly_lower = family
        .iter()
        .zip(&ratios)
        .filter(|(f, _)| f.as_polynomial().is_some())
        .map(|(_, &r)| r)
        .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
    Ok(CalculusNormEstimate { k_lower, k_poly_lower, witness, family_size: family.len(), ratios, nodes })
}
