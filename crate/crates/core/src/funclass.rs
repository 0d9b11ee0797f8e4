//! Evaluable holomorphic functions with decay certificates.
//!
//! A [`HoloFn`] is an expression tree over constants, the identity, sums,
//! products, quotients, integer powers, and the precompositions
//! `z ↦ 1 − z` and `z ↦ r z`. Every tree is a rational function; the
//! normalized numerator/denominator pair is kept alongside the tree so that
//! the pole list can be checked against a [`Region`].
//!
//! Decay classes:
//!
//! * sector decay `|f(z)| ≤ c |z|^s / (1 + |z|^{2s})` on `S_{n,θ}`,
//! * Stolz decay `|φ(λ)| ≤ c |1 − λ|^s` on `B_{n,γ}`.
//!
//! A certificate is attached with [`HoloFn::certify`], which rejects it
//! unless 10⁴ samples of the closed region satisfy the bound.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrixkit::CMatrix;
use crate::poly::Poly;
use crate::regions::{Region, RegionKind};

/// Denominators smaller than this in modulus count as a pole hit.
pub const POLE_TOL: f64 = 1e-30;
/// Relative slack allowed when validating a certificate.
pub const CERTIFICATE_MARGIN: f64 = 1e-9;
/// Number of samples used to validate a certificate.
pub const CERTIFICATE_SAMPLES: usize = 10_000;
/// Poles closer than this to the closed region make a function unbounded.
const POLE_CLEARANCE: f64 = 1e-9;
/// Safety factor applied to sampled constants when fitting certificates.
const FIT_SAFETY: f64 = 1.001;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Identity,
    Poly(Poly),
    Rational { num: Poly, den: Poly },
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    /// `z ↦ inner(1 − z)`.
    OneMinus(Box<Expr>),
    /// `z ↦ inner(r z)`.
    Scale(f64, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Identity => z,
            Expr::Poly(p) => p.eval(z),
            Expr::Rational { num, den } => {
                let d = den.eval(z);
                if d.norm() < POLE_TOL {
                    return Err(Error::PoleHit { z });
                }
                num.eval(z) / d
            }
            Expr::Add(a, b) => a.eval(z)? + b.eval(z)?,
            Expr::Mul(a, b) => a.eval(z)? * b.eval(z)?,
            Expr::Div(a, b) => {
                let d = b.eval(z)?;
                if d.norm() < POLE_TOL {
                    return Err(Error::PoleHit { z });
                }
                a.eval(z)? / d
            }
            Expr::Pow(a, k) => {
                let v = a.eval(z)?;
                if *k < 0 && v.norm() < POLE_TOL {
                    return Err(Error::PoleHit { z });
                }
                v.powi(*k)
            }
            Expr::OneMinus(inner) => inner.eval(1.0 - z)?,
            Expr::Scale(r, inner) => inner.eval(z * *r)?,
        })
    }

    /// Numerator and denominator polynomials (not reduced).
    fn rational_form(&self) -> (Poly, Poly) {
        let one = Poly::constant(Complex64::new(1.0, 0.0));
        match self {
            Expr::Const(c) => (Poly::constant(*c), one),
            Expr::Identity => (Poly::identity(), one),
            Expr::Poly(p) => (p.clone(), one),
            Expr::Rational { num, den } => (num.clone(), den.clone()),
            Expr::Add(a, b) => {
                let ((an, ad), (bn, bd)) = (a.rational_form(), b.rational_form());
                if ad == bd {
                    (an.add(&bn), ad)
                } else {
                    (an.mul(&bd).add(&bn.mul(&ad)), ad.mul(&bd))
                }
            }
            Expr::Mul(a, b) => {
                let ((an, ad), (bn, bd)) = (a.rational_form(), b.rational_form());
                (an.mul(&bn), ad.mul(&bd))
            }
            Expr::Div(a, b) => {
                let ((an, ad), (bn, bd)) = (a.rational_form(), b.rational_form());
                (an.mul(&bd), ad.mul(&bn))
            }
            Expr::Pow(a, k) => {
                let (n, d) = a.rational_form();
                let e = k.unsigned_abs();
                if *k >= 0 {
                    (n.pow(e), d.pow(e))
                } else {
                    (d.pow(e), n.pow(e))
                }
            }
            Expr::OneMinus(inner) => {
                let (n, d) = inner.rational_form();
                let (a, b) = (Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0));
                (n.compose_affine(a, b), d.compose_affine(a, b))
            }
            Expr::Scale(r, inner) => {
                let (n, d) = inner.rational_form();
                let (a, b) = (Complex64::new(0.0, 0.0), Complex64::new(*r, 0.0));
                (n.compose_affine(a, b), d.compose_affine(a, b))
            }
        }
    }

    /// Direct substitution of a matrix into the tree. Quotients are formed
    /// by LU solves, which is exact algebra because all factors commute.
    pub fn substitute(&self, t: &CMatrix) -> Result<CMatrix> {
        let n = t.rows();
        let ident = CMatrix::identity(n);
        Ok(match self {
            Expr::Const(c) => ident.scale(*c),
            Expr::Identity => t.clone(),
            Expr::Poly(p) => t.poly_eval(p),
            Expr::Rational { num, den } => divide(&t.poly_eval(num), &t.poly_eval(den))?,
            Expr::Add(a, b) => &a.substitute(t)? + &b.substitute(t)?,
            Expr::Mul(a, b) => &a.substitute(t)? * &b.substitute(t)?,
            Expr::Div(a, b) => divide(&a.substitute(t)?, &b.substitute(t)?)?,
            Expr::Pow(a, k) => {
                let base = a.substitute(t)?;
                let base = if *k < 0 { singular_as_domain(base.inverse())? } else { base };
                (0..k.unsigned_abs()).fold(ident, |acc, _| &acc * &base)
            }
            Expr::OneMinus(inner) => inner.substitute(&(&ident - t))?,
            Expr::Scale(r, inner) => inner.substitute(&t.scale(Complex64::new(*r, 0.0)))?,
        })
    }
}

fn singular_as_domain(m: Result<CMatrix>) -> Result<CMatrix> {
    m.map_err(|_| Error::DomainError("denominator is singular at the operator".into()))
}

/// `a · b⁻¹` for commuting `a`, `b`.
fn divide(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let inv = singular_as_domain(b.inverse())?;
    Ok(a * &inv)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DecayCertificate {
    /// `|f(z)| ≤ c |z|^s / (1 + |z|^{2s})` on a sector.
    SectorDecay { c: f64, s: f64 },
    /// `|φ(λ)| ≤ c |1 − λ|^s` on a Stolz domain.
    StolzDecay { c: f64, s: f64 },
}

impl DecayCertificate {
    pub fn envelope(&self, z: Complex64) -> f64 {
        match *self {
            DecayCertificate::SectorDecay { c, s } => {
                let r = z.norm();
                c * r.powf(s) / (1.0 + r.powf(2.0 * s))
            }
            DecayCertificate::StolzDecay { c, s } => c * (1.0 - z).norm().powf(s),
        }
    }

    pub fn region_kind(&self) -> RegionKind {
        match self {
            DecayCertificate::SectorDecay { .. } => RegionKind::NSector,
            DecayCertificate::StolzDecay { .. } => RegionKind::NStolz,
        }
    }

    pub fn constants(&self) -> (f64, f64) {
        match *self {
            DecayCertificate::SectorDecay { c, s } | DecayCertificate::StolzDecay { c, s } => (c, s),
        }
    }
}

/// A validated certificate together with the region it was checked on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certified {
    pub certificate: DecayCertificate,
    pub region: Region,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoloFn {
    expr: Expr,
    num: Poly,
    den: Poly,
    poles: Vec<Complex64>,
    decay: Option<Certified>,
}

/// Sampled supremum of `|f|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupNorm {
    /// Lower-bound estimate of the supremum.
    pub value: f64,
    /// Number of sample points used.
    pub samples: usize,
}

impl HoloFn {
    pub fn new(expr: Expr) -> Self {
        let (num, den) = expr.rational_form();
        let poles = den.roots();
        HoloFn { expr, num, den, poles, decay: None }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(Expr::Const(c))
    }

    pub fn identity() -> Self {
        Self::new(Expr::Identity)
    }

    pub fn poly(p: Poly) -> Self {
        Self::new(Expr::Poly(p))
    }

    pub fn rational(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DomainError("zero denominator".into()));
        }
        Ok(Self::new(Expr::Rational { num, den }))
    }

    /// `λ ↦ self(1 − λ)`. A sector certificate of `self` becomes a Stolz
    /// certificate with the same constants, since
    /// `|f(1−λ)| ≤ c|1−λ|^s / (1 + |1−λ|^{2s}) ≤ c |1−λ|^s`; it is
    /// re-validated on the corresponding Stolz domain.
    pub fn compose_one_minus(&self) -> HoloFn {
        HoloFn::new(Expr::OneMinus(Box::new(self.expr.clone())))
    }

    /// `z ↦ self(r z)`.
    pub fn scale_arg(&self, r: f64) -> HoloFn {
        HoloFn::new(Expr::Scale(r, Box::new(self.expr.clone())))
    }

    pub fn add(&self, other: &HoloFn) -> HoloFn {
        HoloFn::new(Expr::Add(Box::new(self.expr.clone()), Box::new(other.expr.clone())))
    }

    pub fn mul(&self, other: &HoloFn) -> HoloFn {
        HoloFn::new(Expr::Mul(Box::new(self.expr.clone()), Box::new(other.expr.clone())))
    }

    pub fn scale(&self, s: Complex64) -> HoloFn {
        HoloFn::new(Expr::Mul(Box::new(Expr::Const(s)), Box::new(self.expr.clone())))
    }

    pub fn pow(&self, k: i32) -> HoloFn {
        HoloFn::new(Expr::Pow(Box::new(self.expr.clone()), k))
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    pub fn decay(&self) -> Option<&Certified> {
        self.decay.as_ref()
    }

    /// `Some(p)` when the function is a polynomial.
    pub fn as_polynomial(&self) -> Option<Poly> {
        if self.den.degree() == 0 && !self.den.is_zero() {
            Some(self.num.scale(Complex64::new(1.0, 0.0) / self.den.coeffs()[0]))
        } else {
            None
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.expr.eval(z)
    }

    /// `f(T)` by direct substitution.
    pub fn substitute(&self, t: &CMatrix) -> Result<CMatrix> {
        self.expr.substitute(t)
    }

    /// Fails with `Unbounded` if a pole lies in the closed region, or if the
    /// function grows at infinity on an unbounded region.
    pub fn check_bounded_on(&self, region: &Region) -> Result<()> {
        for &p in &self.poles {
            if region.contains_closed(p, POLE_CLEARANCE) {
                return Err(Error::Unbounded(format!("pole {p} lies in the closure of {region:?}")));
            }
        }
        if region.kind() == RegionKind::NSector && self.num.degree() > self.den.degree() && !self.num.is_zero() {
            return Err(Error::Unbounded("function grows at infinity on a sector".into()));
        }
        Ok(())
    }

    /// Deterministic sample set of the closed region used for certificate
    /// checks: roughly half boundary points, half interior points.
    fn certificate_samples(region: &Region) -> Vec<Complex64> {
        let pieces = match region.kind() {
            RegionKind::NStolz => 3 * region.n(),
            RegionKind::NSector => 2 * region.n(),
        };
        let per_piece = (CERTIFICATE_SAMPLES / 2 / pieces).max(8);
        let interior_density = match region.kind() {
            RegionKind::NStolz => ((CERTIFICATE_SAMPLES / 2 / (4 * region.n())) as f64).sqrt() as usize,
            RegionKind::NSector => ((CERTIFICATE_SAMPLES / 2 / region.n()) as f64).sqrt() as usize,
        };
        let mut pts = region.boundary_points(per_piece, 1e-6, 1e6);
        pts.extend(region.interior_points(interior_density.max(4), 1e-6, 1e6));
        pts
    }

    /// Validates and attaches a decay certificate on `region`.
    pub fn certify(mut self, certificate: DecayCertificate, region: Region) -> Result<HoloFn> {
        if certificate.region_kind() != region.kind() {
            return Err(Error::CertificateRejected(format!(
                "{certificate:?} does not apply to a {:?} region",
                region.kind()
            )));
        }
        let (c, s) = certificate.constants();
        if !(c > 0.0 && s > 0.0 && c.is_finite() && s.is_finite()) {
            return Err(Error::CertificateRejected(format!("constants must be positive, got c={c}, s={s}")));
        }
        self.check_bounded_on(&region)?;
        for z in Self::certificate_samples(&region) {
            let v = self.eval(z).map_err(|_| Error::Unbounded(format!("pole hit at {z}")))?.norm();
            let bound = certificate.envelope(z) * (1.0 + CERTIFICATE_MARGIN);
            if v > bound && v > 1e-300 {
                return Err(Error::CertificateRejected(format!(
                    "|f({z})| = {v:e} exceeds envelope {bound:e}"
                )));
            }
        }
        self.decay = Some(Certified { certificate, region });
        Ok(self)
    }

    /// Fits and validates a sector certificate: `s` is the smaller of the
    /// vanishing order at `0` and the decay order at `∞`, and `c` the sampled
    /// maximum of `|f(z)| (1 + |z|^{2s}) / |z|^s` with a small safety factor.
    pub fn fit_sector_certificate(self, region: Region) -> Result<HoloFn> {
        if region.kind() != RegionKind::NSector {
            return Err(Error::CertificateRejected("sector certificate needs a sector".into()));
        }
        self.check_bounded_on(&region)?;
        let zero_order = leading_zeros(&self.num) as i64 - leading_zeros(&self.den) as i64;
        let inf_order = self.den.degree() as i64 - self.num.degree() as i64;
        let s = zero_order.min(inf_order);
        if self.num.is_zero() {
            return self.certify(DecayCertificate::SectorDecay { c: f64::MIN_POSITIVE, s: 1.0 }, region);
        }
        if s <= 0 {
            return Err(Error::CertificateRejected(format!(
                "no sector decay: vanishing order {zero_order} at 0, decay order {inf_order} at ∞"
            )));
        }
        let s = s as f64;
        let mut c: f64 = 0.0;
        for z in Self::certificate_samples(&region) {
            let r = z.norm();
            if r == 0.0 {
                continue;
            }
            let v = self.eval(z).map_err(|_| Error::Unbounded(format!("pole hit at {z}")))?.norm();
            c = c.max(v * (1.0 + r.powf(2.0 * s)) / r.powf(s));
        }
        let c = (c * FIT_SAFETY).max(f64::MIN_POSITIVE);
        self.certify(DecayCertificate::SectorDecay { c, s }, region)
    }

    /// Fits and validates a Stolz certificate with `s` the vanishing order at
    /// `1` and `c` the sampled maximum of `|φ(λ)| / |1 − λ|^s`.
    pub fn fit_stolz_certificate(self, region: Region) -> Result<HoloFn> {
        if region.kind() != RegionKind::NStolz {
            return Err(Error::CertificateRejected("Stolz certificate needs a Stolz domain".into()));
        }
        self.check_bounded_on(&region)?;
        if self.num.is_zero() {
            return self.certify(DecayCertificate::StolzDecay { c: f64::MIN_POSITIVE, s: 1.0 }, region);
        }
        let order = vanishing_order_at_one(&self.num) as i64 - vanishing_order_at_one(&self.den) as i64;
        if order <= 0 {
            return Err(Error::CertificateRejected("function does not vanish at 1".into()));
        }
        let s = order as f64;
        let mut c: f64 = 0.0;
        for z in Self::certificate_samples(&region) {
            let d = (1.0 - z).norm();
            if d < 1e-6 {
                continue;
            }
            let v = self.eval(z).map_err(|_| Error::Unbounded(format!("pole hit at {z}")))?.norm();
            c = c.max(v / d.powf(s));
        }
        let c = (c * FIT_SAFETY).max(f64::MIN_POSITIVE);
        self.certify(DecayCertificate::StolzDecay { c, s }, region)
    }

    /// Splits `ψ = ψ(1) + φ` with `φ` Stolz-certified on `region`.
    pub fn extended_split(&self, region: Region) -> Result<(Complex64, HoloFn)> {
        self.check_bounded_on(&region)?;
        let at_one = self.eval(Complex64::new(1.0, 0.0))?;
        let phi = self.add(&HoloFn::constant(-at_one));
        Ok((at_one, phi.fit_stolz_certificate(region)?))
    }
}

fn leading_zeros(p: &Poly) -> usize {
    p.coeffs().iter().take_while(|c| c.norm() == 0.0).count()
}

/// Multiplicity of `1` as a root, detected by repeated synthetic division
/// with a relative remainder test.
fn vanishing_order_at_one(p: &Poly) -> usize {
    let mut order = 0;
    let mut q = p.clone();
    while !q.is_zero() {
        let scale = q.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        let (next, rem) = q.divide_by_z_minus_one();
        if rem.norm() > 1e-12 * scale * (q.degree() + 1) as f64 {
            break;
        }
        order += 1;
        q = next;
    }
    order
}

/// `p(z) = (z − 1) p̃(z) + p(1)`.
pub fn decompose_polynomial(p: &Poly) -> (Poly, Complex64) {
    p.divide_by_z_minus_one()
}

/// Maximum of `g` over boundary samples of `region`.
///
/// Bounded regions are covered by the maximum principle. Sectors are sampled
/// on log-spaced radii in `[1e-8, 1e8]`.
pub fn sup_over_boundary(
    region: &Region,
    per_piece: usize,
    g: impl Fn(Complex64) -> Result<f64>,
) -> Result<SupNorm> {
    let pts = region.boundary_points(per_piece, 1e-8, 1e8);
    let mut value: f64 = 0.0;
    for &z in &pts {
        value = value.max(g(z)?);
    }
    Ok(SupNorm { value, samples: pts.len() })
}

/// Default boundary samples per piece for [`sup_norm`].
pub const SUP_SAMPLES_PER_PIECE: usize = 2000;

/// Sampled `‖f‖_{∞, region}`.
pub fn sup_norm(f: &HoloFn, region: &Region) -> Result<SupNorm> {
    sup_norm_with(f, region, SUP_SAMPLES_PER_PIECE)
}

pub fn sup_norm_with(f: &HoloFn, region: &Region, per_piece: usize) -> Result<SupNorm> {
    f.check_bounded_on(region)?;
    sup_over_boundary(region, per_piece, |z| Ok(f.eval(z)?.norm()))
}

/// Built-in test families with analytic certificates.
pub mod library {
    use super::*;

    /// `z^{nk} / (1 + z^n)^{2k}` on `S_{n,θ}`.
    ///
    /// With `w = z^n`, `|arg w| < nθ < π`, and
    /// `|1 + w|² ≥ (1 + |w|²)(1 − max(0, −cos nθ))`, which yields the sector
    /// certificate `c = (1 − max(0, −cos nθ))^{−k}`, `s = nk`.
    pub fn sector_bump(n: usize, k: u32, theta: f64) -> Result<HoloFn> {
        let region = Region::n_sector(n, theta)?;
        let zn = Expr::Pow(Box::new(Expr::Identity), n as i32);
        let num = Expr::Pow(Box::new(zn.clone()), k as i32);
        let den = Expr::Pow(
            Box::new(Expr::Add(Box::new(Expr::Const(Complex64::new(1.0, 0.0))), Box::new(zn))),
            2 * k as i32,
        );
        let f = HoloFn::new(Expr::Div(Box::new(num), Box::new(den)));
        let m = (-(n as f64 * theta).cos()).max(0.0);
        let c = (1.0 - m).powi(-(k as i32));
        f.certify(DecayCertificate::SectorDecay { c, s: (n as u32 * k) as f64 }, region)
    }

    /// `(1 − λ)^k q(λ)` on `B_{n,γ}`, `q` pole-free on the closed domain.
    /// The constant is `sup |q|` sampled on the boundary (maximum principle),
    /// times a small safety factor.
    pub fn stolz_factor(k: u32, q: &HoloFn, region: Region) -> Result<HoloFn> {
        if region.kind() != RegionKind::NStolz {
            return Err(Error::CertificateRejected("Stolz family needs a Stolz domain".into()));
        }
        let q_sup = sup_norm(q, &region)?.value;
        let factor = HoloFn::poly(Poly::from_real(&[1.0, -1.0])).pow(k as i32);
        let f = factor.mul(q);
        let c = (q_sup * FIT_SAFETY).max(f64::MIN_POSITIVE);
        f.certify(DecayCertificate::StolzDecay { c, s: k as f64 }, region)
    }
}

/// Coefficient: a real number or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Coeff> for Complex64 {
    fn from(c: Coeff) -> Self {
        match c {
            Coeff::Real(r) => Complex64::new(r, 0.0),
            Coeff::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

/// Function wire form:
/// `{"type":"poly","coeffs":[...]}`, `{"type":"rational","num":[...],"den":[...]}`,
/// `{"type":"compose_1minus","inner":spec}`, `{"type":"scale","r":float,"inner":spec}`.
/// Coefficients are in ascending order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FunctionSpec {
    Poly { coeffs: Vec<Coeff> },
    Rational { num: Vec<Coeff>, den: Vec<Coeff> },
    #[serde(rename = "compose_1minus")]
    Compose1Minus { inner: Box<FunctionSpec> },
    Scale { r: f64, inner: Box<FunctionSpec> },
}

fn to_poly(c: &[Coeff]) -> Poly {
    Poly::new(c.iter().map(|&v| v.into()).collect())
}

impl FunctionSpec {
    fn to_expr(&self) -> Result<Expr> {
        Ok(match self {
            FunctionSpec::Poly { coeffs } => Expr::Poly(to_poly(coeffs)),
            FunctionSpec::Rational { num, den } => {
                let den = to_poly(den);
                if den.is_zero() {
                    return Err(Error::DomainError("zero denominator".into()));
                }
                Expr::Rational { num: to_poly(num), den }
            }
            FunctionSpec::Compose1Minus { inner } => Expr::OneMinus(Box::new(inner.to_expr()?)),
            FunctionSpec::Scale { r, inner } => {
                if !(*r > 0.0 && *r < 1.0) {
                    return Err(Error::DomainError(format!("scale factor must lie in (0, 1), got {r}")));
                }
                Expr::Scale(*r, Box::new(inner.to_expr()?))
            }
        })
    }
}

impl TryFrom<&FunctionSpec> for HoloFn {
    type Error = Error;

    fn try_from(spec: &FunctionSpec) -> Result<Self> {
        Ok(HoloFn::new(spec.to_expr()?))
    }
}
