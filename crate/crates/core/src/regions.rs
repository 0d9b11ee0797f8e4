//! Sectors, Stolz domains and their n-fold rotated unions.
//!
//! * `Σ_ω = {z ≠ 0 : |arg z| < ω}` and `S_{n,ω} = ∪_j e^{2ijπ/n} Σ_ω`.
//! * `B_γ` is the interior of the convex hull of `1` and the disc
//!   `D(0, sin γ)`; `B_{n,γ} = 1 − ∪_j e^{2ijπ/n} (1 − B_γ)`.
//!
//! All membership queries are for the OPEN region. Closure queries go through
//! [`Region::contains_closed`], which accepts points within a distance
//! tolerance of the boundary.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A type or aperture angle in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    /// Accepts any finite angle in `(0, π)`; the tighter `π/n` bound is
    /// enforced when the angle is attached to a [`Region`].
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value < PI {
            Ok(Angle(value))
        } else {
            Err(Error::InvalidAngle { angle: value, upper: PI })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Checks `0 < self < upper`.
    pub fn check_below(self, upper: f64) -> Result<Self> {
        if self.0 < upper {
            Ok(self)
        } else {
            Err(Error::InvalidAngle { angle: self.0, upper })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionKind {
    #[serde(rename = "nsector")]
    NSector,
    #[serde(rename = "nstolz")]
    NStolz,
}

/// `e^{2ijπ/n}`.
pub fn rotation(n: usize, j: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)
}

/// Largest admissible angle for a region of the given kind and order.
///
/// Sectors allow `(0, π/n)`. Stolz domains additionally stop at `π/2`: for
/// `n = 1` the hull of `1` and `D(0, sin γ)` is not monotone in `γ` past
/// `π/2`.
pub fn max_angle(kind: RegionKind, n: usize) -> f64 {
    let base = PI / n as f64;
    match kind {
        RegionKind::NSector => base,
        RegionKind::NStolz => base.min(FRAC_PI_2),
    }
}

/// Evenly spaced grid of `count` angles strictly inside `(0, max_angle)`.
pub fn default_angle_grid(kind: RegionKind, n: usize, count: usize) -> Vec<Angle> {
    let top = max_angle(kind, n);
    (1..=count)
        .map(|k| Angle(top * k as f64 / (count + 1) as f64))
        .collect()
}

/// An open n-sector or n-Stolz domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RegionSpec", into = "RegionSpec")]
pub struct Region {
    kind: RegionKind,
    n: usize,
    angle: Angle,
}

/// Wire form `{"kind":"nstolz"|"nsector","n":int,"angle":float}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionSpec {
    pub kind: RegionKind,
    pub n: usize,
    pub angle: f64,
}

impl TryFrom<RegionSpec> for Region {
    type Error = Error;

    fn try_from(spec: RegionSpec) -> Result<Self> {
        Region::new(spec.kind, spec.n, spec.angle)
    }
}

impl From<Region> for RegionSpec {
    fn from(r: Region) -> Self {
        RegionSpec { kind: r.kind, n: r.n, angle: r.angle.0 }
    }
}

impl Region {
    pub fn new(kind: RegionKind, n: usize, angle: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidOrder(n));
        }
        let angle = Angle::new(angle)?.check_below(max_angle(kind, n))?;
        Ok(Region { kind, n, angle })
    }

    pub fn n_sector(n: usize, angle: f64) -> Result<Self> {
        Self::new(RegionKind::NSector, n, angle)
    }

    pub fn n_stolz(n: usize, angle: f64) -> Result<Self> {
        Self::new(RegionKind::NStolz, n, angle)
    }

    pub fn kind(&self) -> RegionKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn angle(&self) -> Angle {
        self.angle
    }

    /// Same kind and order, different angle.
    pub fn with_angle(&self, angle: f64) -> Result<Self> {
        Self::new(self.kind, self.n, angle)
    }

    /// Open membership.
    pub fn contains(&self, z: Complex64) -> bool {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return false;
        }
        let a = self.angle.0;
        match self.kind {
            RegionKind::NSector => {
                if z == Complex64::new(0.0, 0.0) {
                    return false;
                }
                (0..self.n).any(|j| (z * rotation(self.n, j).conj()).arg().abs() < a)
            }
            RegionKind::NStolz => (0..self.n).any(|j| {
                let w = Complex64::new(1.0, 0.0) - rotation(self.n, j).conj() * (1.0 - z);
                in_stolz_base(w, a)
            }),
        }
    }

    /// Membership in the closure, up to an absolute distance `eps`.
    pub fn contains_closed(&self, z: Complex64, eps: f64) -> bool {
        self.contains(z) || self.boundary_distance(z) <= eps
    }

    /// Euclidean distance from `z` to the boundary of the region.
    ///
    /// The boundary consists of segments, circular arcs and rays, so the
    /// distance is computed piece by piece in closed form.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        let a = self.angle.0;
        match self.kind {
            RegionKind::NSector => (0..self.n)
                .flat_map(|j| {
                    let base = 2.0 * PI * j as f64 / self.n as f64;
                    [base + a, base - a]
                })
                .map(|phi| ray_distance(z, Complex64::from_polar(1.0, phi)))
                .fold(f64::INFINITY, f64::min),
            RegionKind::NStolz => (0..self.n)
                .map(|j| {
                    let w = Complex64::new(1.0, 0.0) - rotation(self.n, j).conj() * (1.0 - z);
                    stolz_base_distance(w, a)
                })
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Samples of the boundary.
    ///
    /// Stolz domains: `per_piece` points on each of the three pieces of every
    /// component (endpoints included). Sectors: `per_piece` log-spaced radii
    /// in `[r_lo, r_hi]` on each of the `2n` rays, plus the vertex `0`.
    pub fn boundary_points(&self, per_piece: usize, r_lo: f64, r_hi: f64) -> Vec<Complex64> {
        let per_piece = per_piece.max(2);
        let a = self.angle.0;
        let one = Complex64::new(1.0, 0.0);
        match self.kind {
            RegionKind::NStolz => {
                let rho = a.sin();
                let upper = Complex64::from_polar(rho, FRAC_PI_2 - a);
                let lower = Complex64::from_polar(rho, 1.5 * PI + a);
                let mut base = Vec::with_capacity(3 * per_piece);
                for k in 0..per_piece {
                    let t = k as f64 / (per_piece - 1) as f64;
                    base.push(one + (upper - one) * t);
                    let theta = (FRAC_PI_2 - a) + t * (PI + 2.0 * a);
                    base.push(Complex64::from_polar(rho, theta));
                    base.push(lower + (one - lower) * t);
                }
                (0..self.n)
                    .flat_map(|j| {
                        let r = rotation(self.n, j);
                        base.iter().map(move |&w| one - r * (one - w))
                    })
                    .collect()
            }
            RegionKind::NSector => {
                let radii = log_space(r_lo, r_hi, per_piece);
                let mut out = vec![Complex64::new(0.0, 0.0)];
                for j in 0..self.n {
                    let base = 2.0 * PI * j as f64 / self.n as f64;
                    for phi in [base + a, base - a] {
                        let u = Complex64::from_polar(1.0, phi);
                        out.extend(radii.iter().map(|&r| u * r));
                    }
                }
                out
            }
        }
    }

    /// Deterministic interior samples on a polar-style grid of size
    /// roughly `density²` per component.
    pub fn interior_points(&self, density: usize, r_lo: f64, r_hi: f64) -> Vec<Complex64> {
        let density = density.max(2);
        let a = self.angle.0;
        let one = Complex64::new(1.0, 0.0);
        let mut base = Vec::new();
        match self.kind {
            RegionKind::NStolz => {
                // Convex combinations of the vertex 1 and points of the disc
                // D(0, 0.999·sin γ) sweep out the open hull.
                let rho = 0.999 * a.sin();
                for i in 0..density {
                    let radius = rho * (i as f64 + 0.5) / density as f64;
                    for k in 0..density {
                        let theta = 2.0 * PI * k as f64 / density as f64;
                        let q = Complex64::from_polar(radius, theta);
                        for s in [0.25, 0.5, 0.75, 1.0] {
                            base.push(one + (q - one) * s);
                        }
                    }
                }
                (0..self.n)
                    .flat_map(|j| {
                        let r = rotation(self.n, j);
                        base.iter().map(move |&w| one - r * (one - w))
                    })
                    .collect()
            }
            RegionKind::NSector => {
                let radii = log_space(r_lo, r_hi, density);
                for &r in &radii {
                    for k in 0..density {
                        let phi = -a + 2.0 * a * (k as f64 + 0.5) / density as f64;
                        base.push(Complex64::from_polar(r, phi));
                    }
                }
                (0..self.n)
                    .flat_map(|j| {
                        let r = rotation(self.n, j);
                        base.iter().map(move |&w| r * w)
                    })
                    .collect()
            }
        }
    }
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Membership in the single Stolz domain `B_γ`.
///
/// `B_γ` is the open disc `|w| < sin γ` together with the open triangle
/// spanned by `1` and the two tangent points `sin γ · e^{±i(π/2−γ)}`. The
/// triangle is the part of the cone `|arg(1 − w)| < γ` to the right of the
/// chord `Re w = sin² γ`.
pub(crate) fn in_stolz_base(w: Complex64, gamma: f64) -> bool {
    let rho = gamma.sin();
    if w.norm() < rho {
        return true;
    }
    let v = Complex64::new(1.0, 0.0) - w;
    v.re > 0.0 && w.re > rho * rho && v.im.abs() < v.re * gamma.tan()
}

fn segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let t = ((z - a) * d.conj()).re / d.norm_sqr();
    let t = t.clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

/// Distance to the ray `{t·u : t ≥ 0}`.
fn ray_distance(z: Complex64, u: Complex64) -> f64 {
    let p = z * u.conj();
    if p.re <= 0.0 {
        z.norm()
    } else {
        p.im.abs()
    }
}

fn stolz_base_distance(w: Complex64, gamma: f64) -> f64 {
    let rho = gamma.sin();
    let one = Complex64::new(1.0, 0.0);
    let upper = Complex64::from_polar(rho, FRAC_PI_2 - gamma);
    let lower = Complex64::from_polar(rho, 1.5 * PI + gamma);
    let d_seg = segment_distance(w, one, upper).min(segment_distance(w, lower, one));
    // The arc is the major arc on the left, angles [π/2−γ, 3π/2+γ].
    let theta = w.arg().rem_euclid(2.0 * PI);
    let on_arc_sector = theta >= FRAC_PI_2 - gamma && theta <= 1.5 * PI + gamma;
    let d_arc = if on_arc_sector && w.norm() > 0.0 {
        (w.norm() - rho).abs()
    } else {
        (w - upper).norm().min((w - lower).norm())
    };
    d_seg.min(d_arc)
}
