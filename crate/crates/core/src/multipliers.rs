//! Diagonal multipliers of bounded-variation sequences, the `I_θ` integral,
//! and the Carleson separation product.
//!
//! For `γ = (γ_m)` the multiplier `T_γ` acts on the standard basis as
//! `e_m ↦ γ_m e_m`. With `γ` real, increasing and in `[0, 1)`, the sequence
//! `γ(θ)_m = 1/(e^{iθ} − γ_m)` has variation at most
//! `I_θ = ∫₀¹ dt / |e^{iθ} − t|²`, which gives
//! `‖(e^{iθ}−1) R(e^{iθ}, T_γ)‖ ≤ |e^{iθ}−1| (1/|e^{iθ}−γ_0| + I_θ)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrixkit::{NormKind, Operator};

/// A finite sequence with its total variation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BVSequence {
    values: Vec<Complex64>,
    bv_norm: f64,
}

impl BVSequence {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DomainError("empty sequence".into()));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::DomainError("sequence entries must be finite".into()));
        }
        let bv_norm = variation(&values);
        Ok(BVSequence { values, bv_norm })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// `γ_m = 1 − c q^m` for `m = 0, …, d−1`.
    pub fn geometric(c: f64, q: f64, d: usize) -> Result<Self> {
        if !(c > 0.0 && c <= 1.0 && q > 0.0 && q < 1.0) || d == 0 {
            return Err(Error::DomainError(format!(
                "need c ∈ (0, 1], q ∈ (0, 1), d ≥ 1; got c={c}, q={q}, d={d}"
            )));
        }
        Self::from_real(&(0..d).map(|m| 1.0 - c * q.powi(m as i32)).collect::<Vec<_>>())
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `Σ_{m≥1} |γ_m − γ_{m−1}|`.
    pub fn bv_norm(&self) -> f64 {
        self.bv_norm
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Checks that the sequence is real, non-decreasing and in `[0, 1)`.
    pub fn check_monotone_unit(&self) -> Result<()> {
        let real = self.values.iter().all(|v| v.im == 0.0);
        let range = self.values.iter().all(|v| v.re >= 0.0 && v.re < 1.0);
        let increasing = self.values.windows(2).all(|w| w[1].re >= w[0].re);
        if real && range && increasing {
            Ok(())
        } else {
            Err(Error::DomainError("sequence must be real, non-decreasing and in [0, 1)".into()))
        }
    }

    /// `γ(θ)_m = 1/(e^{iθ} − γ_m)`.
    pub fn theta_sequence(&self, theta: f64) -> Result<BVSequence> {
        let e = Complex64::from_polar(1.0, theta);
        let mut out = Vec::with_capacity(self.values.len());
        for &g in &self.values {
            let d = e - g;
            if d.norm() == 0.0 {
                return Err(Error::SingularResolvent { lambda: e });
            }
            out.push(1.0 / d);
        }
        BVSequence::new(out)
    }
}

fn variation(values: &[Complex64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// The diagonal multiplier `T_γ` with its spectral data.
pub fn multiplier(gamma: &BVSequence, norm: NormKind) -> Operator {
    Operator::diagonal(gamma.values(), norm)
}

fn check_theta(theta: f64) -> Result<()> {
    if theta.is_finite() && theta != 0.0 && theta > -PI && theta <= PI {
        Ok(())
    } else {
        Err(Error::DomainError(format!("θ must lie in (−π, 0) ∪ (0, π], got {theta}")))
    }
}

/// `I_θ = ∫₀¹ dt / |e^{iθ} − t|² = (π − |θ|) / (2 sin |θ|)`, with the value
/// `1/2` of the integral at `θ = π`.
pub fn i_theta(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let a = theta.abs();
    if a == PI {
        return Ok(0.5);
    }
    Ok((PI - a) / (2.0 * a.sin()))
}

/// `|e^{iθ} − 1| · I_θ = (π − |θ|) / (2 cos(θ/2))`, equal to `1` at `θ = π`.
pub fn ritt_profile(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let a = theta.abs();
    if a == PI {
        return Ok(1.0);
    }
    Ok((PI - a) / (2.0 * (a / 2.0).cos()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileRow {
    pub theta: f64,
    /// `‖(e^{iθ}−1) R(e^{iθ}, T_γ)‖`.
    pub actual: f64,
    /// `|e^{iθ}−1| I_θ`.
    pub profile: f64,
    /// `|e^{iθ}−1| (1/|e^{iθ}−γ_0| + I_θ)`.
    pub bound: f64,
    /// Variation of `γ(θ)`.
    pub theta_bv: f64,
    pub i_theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RittProfile {
    pub rows: Vec<ProfileRow>,
    pub sup_actual: f64,
    pub sup_bound: f64,
}

/// Unit-circle resolvent quantities of `T_γ` against the `I_θ` bound.
pub fn ritt_bound_profile(gamma: &BVSequence, thetas: &[f64], norm: NormKind) -> Result<RittProfile> {
    gamma.check_monotone_unit()?;
    let t = multiplier(gamma, norm);
    let g0 = gamma.values()[0];
    let mut rows = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let i = i_theta(theta)?;
        let e = Complex64::from_polar(1.0, theta);
        let r = t.resolvent(e)?;
        let actual = r.value.scale(e - 1.0).norm(norm);
        let factor = (e - 1.0).norm();
        rows.push(ProfileRow {
            theta,
            actual,
            profile: ritt_profile(theta)?,
            bound: factor * (1.0 / (e - g0).norm() + i),
            theta_bv: gamma.theta_sequence(theta)?.bv_norm(),
            i_theta: i,
        });
    }
    let sup_actual = rows.iter().map(|r| r.actual).fold(0.0, f64::max);
    let sup_bound = rows.iter().map(|r| r.bound).fold(0.0, f64::max);
    Ok(RittProfile { rows, sup_actual, sup_bound })
}

fn check_points(points: &[Complex64]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::DomainError("empty point list".into()));
    }
    for (i, z) in points.iter().enumerate() {
        if !(z.re > 0.0) || !z.im.is_finite() {
            return Err(Error::DomainError(format!("point {z} is not in the open right half-plane")));
        }
        if points[..i].contains(z) {
            return Err(Error::DomainError(format!("duplicate point {z}")));
        }
    }
    Ok(())
}

/// `∏_{i≠j} |(z_i − z_j)/(z_i + z̄_j)|`, the product of pseudo-hyperbolic
/// distances in the right half-plane. Agrees with the unconjugated form on
/// real points.
pub fn carleson_delta(points: &[Complex64], j: usize) -> Result<f64> {
    check_points(points)?;
    let zj = *points
        .get(j)
        .ok_or_else(|| Error::DomainError(format!("index {j} out of range")))?;
    Ok(points
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != j)
        .map(|(_, &zi)| ((zi - zj) / (zi + zj.conj())).norm())
        .product())
}

/// Minimum of [`carleson_delta`] over `j`, with the minimizing index.
pub fn carleson_delta_min(points: &[Complex64]) -> Result<(f64, usize)> {
    check_points(points)?;
    let mut best = (f64::INFINITY, 0);
    for j in 0..points.len() {
        let d = carleson_delta(points, j)?;
        if d < best.0 {
            best = (d, j);
        }
    }
    Ok(best)
}
