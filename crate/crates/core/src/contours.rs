//! Oriented boundary contours and composite Gauss-Legendre path integrals.
//!
//! A [`Contour`] is an ordered list of [`PathPiece`]s. Every piece has a real
//! parameter running from `start_param` to `end_param` (the direction encodes
//! the orientation), a point map and its derivative, so
//! `∫_piece F(λ) dλ = ∫ F(p(s)) p'(s) ds` is a real integral over an oriented
//! interval.
//!
//! [`integrate`] splits each piece into initial panels (uniform for segments
//! and arcs, geometrically graded for rays), applies the 16-point rule, and
//! bisects any panel whose value differs from the sum of its halves by more
//! than its share of the tolerance.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrixkit::CMatrix;
use crate::quadrature::{GaussLegendre, PANEL_NODES};
use crate::regions::{max_angle, rotation, Angle, RegionKind};

/// Default total node budget of [`integrate`].
pub const DEFAULT_NODE_BUDGET: usize = 1 << 20;
/// Ray truncation used when no decay information is available.
pub const DEFAULT_RAY_TRUNCATION: f64 = 1e3;
/// Chaining tolerance between consecutive pieces.
pub const CHAIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathPiece {
    /// Straight segment from `a` to `b`.
    Segment { a: Complex64, b: Complex64 },
    /// `center + radius·e^{iθ}` for θ from `theta_start` to `theta_end`.
    Arc { center: Complex64, radius: f64, theta_start: f64, theta_end: f64 },
    /// `origin + r·direction` for `r ∈ [r_min, r_max]`, traversed towards the
    /// origin when `inward`.
    Ray { origin: Complex64, direction: Complex64, r_min: f64, r_max: f64, inward: bool },
}

impl PathPiece {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            PathPiece::Segment { a, b } => a != b,
            PathPiece::Arc { radius, theta_start, theta_end, .. } => radius > 0.0 && theta_start != theta_end,
            PathPiece::Ray { direction, r_min, r_max, .. } => {
                (direction.norm() - 1.0).abs() < 1e-12 && r_min >= 0.0 && r_min < r_max
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Precondition(format!("degenerate path piece {self:?}")))
        }
    }

    /// Oriented parameter interval.
    pub fn param_range(&self) -> (f64, f64) {
        match *self {
            PathPiece::Segment { .. } => (0.0, 1.0),
            PathPiece::Arc { theta_start, theta_end, .. } => (theta_start, theta_end),
            PathPiece::Ray { r_min, r_max, inward, .. } => {
                if inward {
                    (r_max, r_min)
                } else {
                    (r_min, r_max)
                }
            }
        }
    }

    pub fn point(&self, s: f64) -> Complex64 {
        match *self {
            PathPiece::Segment { a, b } => a + (b - a) * s,
            PathPiece::Arc { center, radius, .. } => center + Complex64::from_polar(radius, s),
            PathPiece::Ray { origin, direction, .. } => origin + direction * s,
        }
    }

    /// `dp/ds`.
    pub fn derivative(&self, s: f64) -> Complex64 {
        match *self {
            PathPiece::Segment { a, b } => b - a,
            PathPiece::Arc { radius, .. } => Complex64::new(0.0, 1.0) * Complex64::from_polar(radius, s),
            PathPiece::Ray { direction, .. } => direction,
        }
    }

    pub fn start(&self) -> Complex64 {
        self.point(self.param_range().0)
    }

    pub fn end(&self) -> Complex64 {
        self.point(self.param_range().1)
    }

    /// The same path traversed backwards.
    pub fn reversed(&self) -> PathPiece {
        match *self {
            PathPiece::Segment { a, b } => PathPiece::Segment { a: b, b: a },
            PathPiece::Arc { center, radius, theta_start, theta_end } => {
                PathPiece::Arc { center, radius, theta_start: theta_end, theta_end: theta_start }
            }
            PathPiece::Ray { origin, direction, r_min, r_max, inward } => {
                PathPiece::Ray { origin, direction, r_min, r_max, inward: !inward }
            }
        }
    }

    /// Image under `λ ↦ c + u·λ` with `|u| = 1`.
    fn rigid(&self, c: Complex64, u: Complex64) -> PathPiece {
        let du = u.arg();
        match *self {
            PathPiece::Segment { a, b } => PathPiece::Segment { a: c + u * a, b: c + u * b },
            PathPiece::Arc { center, radius, theta_start, theta_end } => PathPiece::Arc {
                center: c + u * center,
                radius,
                theta_start: theta_start + du,
                theta_end: theta_end + du,
            },
            PathPiece::Ray { origin, direction, r_min, r_max, inward } => {
                PathPiece::Ray { origin: c + u * origin, direction: u * direction, r_min, r_max, inward }
            }
        }
    }

    /// Initial panel breakpoints in parameter space, in traversal order.
    fn initial_breaks(&self) -> Vec<f64> {
        let (s0, s1) = self.param_range();
        match *self {
            PathPiece::Segment { .. } => uniform(s0, s1, 2),
            PathPiece::Arc { theta_start, theta_end, .. } => {
                let panels = (((theta_end - theta_start).abs() / (PI / 4.0)).ceil() as usize).max(1);
                uniform(s0, s1, panels)
            }
            PathPiece::Ray { r_min, r_max, inward, .. } => {
                // Geometric grading towards r_min so that the panel width
                // follows the distance from the vertex.
                let floor = if r_min > 0.0 { r_min } else { (r_max * 1e-12).min(1e-6) };
                let mut breaks = vec![r_max];
                let mut r = r_max;
                while r / 2.0 > floor {
                    r /= 2.0;
                    breaks.push(r);
                }
                breaks.push(r_min);
                if !inward {
                    breaks.reverse();
                }
                breaks
            }
        }
    }
}

fn uniform(a: f64, b: f64, panels: usize) -> Vec<f64> {
    (0..=panels).map(|k| a + (b - a) * k as f64 / panels as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContourLabel {
    SectorBoundary { n: usize, nu: f64, r_max: f64 },
    StolzBoundary { n: usize, beta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pieces: Vec<PathPiece>,
    label: ContourLabel,
}

impl Contour {
    pub fn pieces(&self) -> &[PathPiece] {
        &self.pieces
    }

    pub fn label(&self) -> ContourLabel {
        self.label
    }

    pub fn is_closed(&self) -> bool {
        matches!(self.label, ContourLabel::StolzBoundary { .. })
    }

    /// Largest gap between the end of a piece and the start of the next one.
    ///
    /// Stolz boundaries are closed, so the last piece is compared with the
    /// first. Sector boundaries are compared only within each rotated copy
    /// (in-ray then out-ray); consecutive copies are joined at infinity.
    pub fn chain_residual(&self) -> f64 {
        let pairs: Vec<(usize, usize)> = match self.label {
            ContourLabel::StolzBoundary { .. } => {
                let m = self.pieces.len();
                (0..m).map(|k| (k, (k + 1) % m)).collect()
            }
            ContourLabel::SectorBoundary { .. } => (0..self.pieces.len() / 2).map(|j| (2 * j, 2 * j + 1)).collect(),
        };
        pairs
            .into_iter()
            .map(|(a, b)| (self.pieces[a].end() - self.pieces[b].start()).norm())
            .fold(0.0, f64::max)
    }

    /// Every piece reversed, in reverse order.
    pub fn reversed(&self) -> Contour {
        Contour { pieces: self.pieces.iter().rev().map(PathPiece::reversed).collect(), label: self.label }
    }

    /// `(1/2πi) ∮ dλ / (λ − z)`.
    pub fn winding_number(&self, z: Complex64, tol: f64) -> Result<Complex64> {
        let integral = integrate(self, |lambda| Ok(1.0 / (lambda - z)), tol)?;
        Ok(integral.value / Complex64::new(0.0, 2.0 * PI))
    }

    /// CSV polyline with columns `piece_index,t,re,im`; `t ∈ [0, 1]` is the
    /// normalized parameter of each piece.
    pub fn to_csv(&self, points_per_piece: usize) -> String {
        let m = points_per_piece.max(2);
        let mut out = String::from("piece_index,t,re,im\n");
        for (k, piece) in self.pieces.iter().enumerate() {
            let (s0, s1) = piece.param_range();
            for i in 0..m {
                let t = i as f64 / (m - 1) as f64;
                let z = piece.point(s0 + (s1 - s0) * t);
                let _ = writeln!(out, "{k},{t},{},{}", z.re, z.im);
            }
        }
        out
    }
}

/// Counterclockwise boundary of `B_{n,β}`.
///
/// The base loop `Γ¹ ⊕ Γ² ⊕ Γ³` runs from `1` along the upper tangent to
/// `sin β·e^{i(π/2−β)}`, around the circle `|λ| = sin β` to the lower tangent
/// point `sin β·e^{i(3π/2+β)}`, and back to `1`. Copy `j` is its image under
/// `λ ↦ 1 − e^{2ijπ/n}(1 − λ)` for `j = 0, …, n−1`.
pub fn stolz_boundary(n: usize, beta: Angle) -> Result<Contour> {
    if n == 0 {
        return Err(Error::InvalidOrder(n));
    }
    let b = beta.check_below(max_angle(RegionKind::NStolz, n))?.value();
    let rho = b.sin();
    let one = Complex64::new(1.0, 0.0);
    let upper = Complex64::from_polar(rho, FRAC_PI_2 - b);
    let lower = Complex64::from_polar(rho, 1.5 * PI + b);
    let base = [
        PathPiece::Segment { a: one, b: upper },
        PathPiece::Arc { center: Complex64::new(0.0, 0.0), radius: rho, theta_start: FRAC_PI_2 - b, theta_end: 1.5 * PI + b },
        PathPiece::Segment { a: lower, b: one },
    ];
    let mut pieces = Vec::with_capacity(3 * n);
    for j in 0..n {
        let u = rotation(n, j);
        // 1 − u(1 − λ) = (1 − u) + uλ
        pieces.extend(base.iter().map(|p| p.rigid(one - u, u)));
    }
    for p in &pieces {
        p.validate()?;
    }
    Ok(Contour { pieces, label: ContourLabel::StolzBoundary { n, beta: b } })
}

/// Boundary of `S_{n,ν}` truncated at radius `r_max`, oriented
/// anticlockwise: for each `j`, in along angle `2jπ/n + ν` from `r_max` to
/// `0`, then out along `2jπ/n − ν`.
pub fn sector_boundary(n: usize, nu: Angle, r_max: f64) -> Result<Contour> {
    if n == 0 {
        return Err(Error::InvalidOrder(n));
    }
    let v = nu.check_below(max_angle(RegionKind::NSector, n))?.value();
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(Error::InvalidTruncation(r_max));
    }
    let origin = Complex64::new(0.0, 0.0);
    let mut pieces = Vec::with_capacity(2 * n);
    for j in 0..n {
        let base = 2.0 * PI * j as f64 / n as f64;
        pieces.push(PathPiece::Ray {
            origin,
            direction: Complex64::from_polar(1.0, base + v),
            r_min: 0.0,
            r_max,
            inward: true,
        });
        pieces.push(PathPiece::Ray {
            origin,
            direction: Complex64::from_polar(1.0, base - v),
            r_min: 0.0,
            r_max,
            inward: false,
        });
    }
    Ok(Contour { pieces, label: ContourLabel::SectorBoundary { n, nu: v, r_max } })
}

/// Values that can be accumulated by the quadrature: complex scalars and
/// complex matrices.
pub trait Integrand: Clone + Send + Sync {
    fn scaled(&self, s: Complex64) -> Self;
    fn add_scaled(&mut self, other: &Self, s: Complex64);
    fn max_abs_diff(&self, other: &Self) -> f64;
}

impl Integrand for Complex64 {
    fn scaled(&self, s: Complex64) -> Self {
        self * s
    }

    fn add_scaled(&mut self, other: &Self, s: Complex64) {
        *self += other * s;
    }

    fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
}

impl Integrand for CMatrix {
    fn scaled(&self, s: Complex64) -> Self {
        self.scale(s)
    }

    fn add_scaled(&mut self, other: &Self, s: Complex64) {
        CMatrix::add_scaled(self, other, s)
    }

    fn max_abs_diff(&self, other: &Self) -> f64 {
        CMatrix::max_abs_diff(self, other)
    }
}

/// Result of [`integrate`].
#[derive(Debug, Clone)]
pub struct Integral<M> {
    pub value: M,
    /// Integrand evaluations spent.
    pub nodes: usize,
    /// Panels in the final partition.
    pub panels: usize,
}

#[derive(Clone, Copy)]
struct Panel {
    piece: usize,
    a: f64,
    b: f64,
    depth: u32,
}

/// `∫_contour F(λ) dλ` with an absolute max-norm tolerance `tol`, using the
/// default node budget.
pub fn integrate<M, F>(contour: &Contour, f: F, tol: f64) -> Result<Integral<M>>
where
    M: Integrand,
    F: Fn(Complex64) -> Result<M> + Sync,
{
    integrate_with_budget(contour, f, tol, DEFAULT_NODE_BUDGET)
}

/// As [`integrate`] with an explicit node budget.
///
/// Panels are refined in rounds; within a round they are evaluated in
/// parallel, and accepted panel values are summed in a fixed order, so the
/// result does not depend on the number of threads.
pub fn integrate_with_budget<M, F>(contour: &Contour, f: F, tol: f64, budget: usize) -> Result<Integral<M>>
where
    M: Integrand,
    F: Fn(Complex64) -> Result<M> + Sync,
{
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!("quadrature tolerance must be positive, got {tol}")));
    }
    let rule = GaussLegendre::panel();
    let panel_value = |p: &Panel| -> Result<M> {
        let piece = &contour.pieces[p.piece];
        let mut acc: Option<M> = None;
        for (s, w) in rule.mapped(p.a, p.b) {
            let v = f(piece.point(s))?;
            let weight = piece.derivative(s) * w;
            match acc.as_mut() {
                None => acc = Some(v.scaled(weight)),
                Some(a) => a.add_scaled(&v, weight),
            }
        }
        Ok(acc.expect("rule has nodes"))
    };

    let mut active: Vec<Panel> = Vec::new();
    for (k, piece) in contour.pieces.iter().enumerate() {
        let breaks = piece.initial_breaks();
        for w in breaks.windows(2) {
            active.push(Panel { piece: k, a: w[0], b: w[1], depth: 0 });
        }
    }
    let initial = active.len().max(1) as f64;
    let mut nodes = active.len() * PANEL_NODES;
    if nodes > budget {
        return Err(Error::NoConvergence { nodes, budget });
    }
    let values: Vec<M> = active.par_iter().map(panel_value).collect::<Result<_>>()?;
    let mut active: Vec<(Panel, M)> = active.into_iter().zip(values).collect();
    // (ordering key, value) of accepted panels
    let mut accepted: Vec<((usize, f64), M)> = Vec::new();

    while !active.is_empty() {
        nodes += active.len() * 2 * PANEL_NODES;
        if nodes > budget {
            return Err(Error::NoConvergence { nodes, budget });
        }
        let halves: Vec<(Panel, M, Panel, M)> = active
            .par_iter()
            .map(|(p, _)| {
                let mid = 0.5 * (p.a + p.b);
                let left = Panel { piece: p.piece, a: p.a, b: mid, depth: p.depth + 1 };
                let right = Panel { piece: p.piece, a: mid, b: p.b, depth: p.depth + 1 };
                Ok((left, panel_value(&left)?, right, panel_value(&right)?))
            })
            .collect::<Result<_>>()?;
        let mut next = Vec::new();
        for ((whole, whole_value), (left, lv, right, rv)) in active.into_iter().zip(halves) {
            let mut refined = lv.clone();
            refined.add_scaled(&rv, Complex64::new(1.0, 0.0));
            let local_tol = tol / (initial * 2f64.powi(whole.depth as i32));
            if refined.max_abs_diff(&whole_value) <= local_tol {
                accepted.push(((whole.piece, order_key(contour, &whole)), refined));
            } else {
                next.push((left, lv));
                next.push((right, rv));
            }
        }
        active = next;
    }

    accepted.sort_by(|x, y| x.0 .0.cmp(&y.0 .0).then(x.0 .1.total_cmp(&y.0 .1)));
    let panels = accepted.len();
    let mut iter = accepted.into_iter();
    let (_, mut value) = iter.next().ok_or_else(|| Error::Precondition("empty contour".into()))?;
    for (_, v) in iter {
        value.add_scaled(&v, Complex64::new(1.0, 0.0));
    }
    Ok(Integral { value, nodes, panels })
}

/// Position of a panel along its piece in traversal order.
fn order_key(contour: &Contour, p: &Panel) -> f64 {
    let (s0, s1) = contour.pieces[p.piece].param_range();
    if s1 >= s0 {
        p.a
    } else {
        -p.a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::Region;
    use std::f64::consts::FRAC_PI_4;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn angle(v: f64) -> Angle {
        Angle::new(v).unwrap()
    }

    #[test]
    fn stolz_tangent_point_and_chaining() {
        let contour = stolz_boundary(1, angle(FRAC_PI_4)).unwrap();
        let first = contour.pieces()[0];
        assert!((first.start() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((first.end() - c(0.5, 0.5)).norm() < 1e-15);
        // Tangency: (p − 1) ⟂ p.
        let p = first.end();
        assert!(((p - 1.0) * p.conj()).re.abs() < 1e-15);
        assert!(contour.chain_residual() < CHAIN_TOL);
    }

    #[test]
    fn winding_numbers() {
        let contour = stolz_boundary(1, angle(FRAC_PI_4)).unwrap();
        let w = contour.winding_number(c(0.3, 0.0), 1e-10).unwrap();
        assert!((w - c(1.0, 0.0)).norm() < 1e-6);
        let contour = stolz_boundary(2, angle(PI / 6.0)).unwrap();
        let w = contour.winding_number(c(5.0, 0.0), 1e-10).unwrap();
        assert!(w.norm() < 1e-6);
    }

    #[test]
    fn sector_boundary_layout() {
        let contour = sector_boundary(1, angle(FRAC_PI_4), 10.0).unwrap();
        assert_eq!(contour.pieces().len(), 2);
        assert!((contour.pieces()[0].start() - Complex64::from_polar(10.0, FRAC_PI_4)).norm() < 1e-12);
        assert!((contour.pieces()[1].end() - Complex64::from_polar(10.0, -FRAC_PI_4)).norm() < 1e-12);
        let contour = sector_boundary(2, angle(PI / 6.0), 10.0).unwrap();
        let mut angles: Vec<f64> = contour
            .pieces()
            .iter()
            .map(|p| match p {
                PathPiece::Ray { direction, .. } => direction.arg().rem_euclid(2.0 * PI),
                _ => unreachable!(),
            })
            .collect();
        angles.sort_by(f64::total_cmp);
        let mut expected = [PI / 6.0, 2.0 * PI - PI / 6.0, PI + PI / 6.0, PI - PI / 6.0];
        expected.sort_by(f64::total_cmp);
        for (a, e) in angles.iter().zip(expected) {
            assert!((a - e).abs() < 1e-12);
        }
        assert!(contour.chain_residual() < CHAIN_TOL);
        assert!(matches!(sector_boundary(1, angle(0.5), 0.0), Err(Error::InvalidTruncation(_))));
    }

    #[test]
    fn cauchy_on_unit_circle() {
        let pieces = (0..4)
            .map(|k| PathPiece::Arc {
                center: c(0.0, 0.0),
                radius: 1.0,
                theta_start: k as f64 * PI / 2.0,
                theta_end: (k + 1) as f64 * PI / 2.0,
            })
            .collect();
        let circle = Contour { pieces, label: ContourLabel::StolzBoundary { n: 1, beta: 0.0 } };
        let r = integrate(&circle, |z| Ok(1.0 / z), 1e-12).unwrap();
        assert!((r.value - c(0.0, 2.0 * PI)).norm() < 1e-10);
    }

    #[test]
    fn closed_contour_integrals() {
        let contour = stolz_boundary(1, angle(FRAC_PI_4)).unwrap();
        let r = integrate(&contour, |_| Ok(c(1.0, 0.0)), 1e-12).unwrap();
        assert!(r.value.norm() < 1e-10);
        let contour = stolz_boundary(1, angle(PI / 3.0)).unwrap();
        assert!(Region::n_stolz(1, PI / 3.0).unwrap().contains(c(0.5, 0.0)));
        let r = integrate(&contour, |z| Ok(z / (z - 0.5)), 1e-12).unwrap();
        assert!((r.value - c(0.0, PI)).norm() < 1e-8);
    }

    #[test]
    fn sector_residue() {
        // z e^{-z}/(z − 2): pole at 2 inside Σ_ν, decays on both rays.
        let g = |z: Complex64| Ok(z * (-z).exp() / (z - 2.0));
        let contour = sector_boundary(1, angle(0.6), 60.0).unwrap();
        let r = integrate(&contour, g, 1e-12).unwrap();
        let expected = c(0.0, 2.0 * PI) * 2.0 * (-2.0f64).exp();
        assert!((r.value - expected).norm() < 1e-9, "{} vs {expected}", r.value);

        // Difference of two nested sectors picks up a pole between them.
        let p = Complex64::from_polar(2.0, 0.8);
        let h = |z: Complex64| Ok(z * (-z).exp() / (z - p));
        let inner = integrate(&sector_boundary(1, angle(0.5), 60.0).unwrap(), h, 1e-12).unwrap();
        let outer = integrate(&sector_boundary(1, angle(1.1), 60.0).unwrap(), h, 1e-12).unwrap();
        let residue = p * (-p).exp();
        assert!((outer.value - inner.value - c(0.0, 2.0 * PI) * residue).norm() < 1e-9);
    }

    #[test]
    fn reversal_negates() {
        let contour = stolz_boundary(3, angle(0.5)).unwrap();
        let f = |z: Complex64| Ok(z * z / (z - 0.2));
        let fwd = integrate(&contour, f, 1e-12).unwrap().value;
        let bwd = integrate(&contour.reversed(), f, 1e-12).unwrap().value;
        assert!((fwd + bwd).norm() < 1e-11);
    }

    #[test]
    fn budget_exhaustion_reports_no_convergence() {
        let contour = stolz_boundary(1, angle(FRAC_PI_4)).unwrap();
        let near = contour.pieces()[1].point(PI) + c(1e-9, 0.0);
        let r = integrate_with_budget(&contour, |z| Ok(1.0 / (z - near)), 1e-12, 4096);
        assert!(matches!(r, Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn csv_export_shape() {
        let contour = stolz_boundary(1, angle(0.4)).unwrap();
        let csv = contour.to_csv(5);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "piece_index,t,re,im");
        assert_eq!(lines.len(), 1 + 3 * 5);
        assert!(lines[1].starts_with("0,0,1,0"));
    }
}
