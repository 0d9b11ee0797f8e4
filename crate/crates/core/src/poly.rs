//! Dense complex polynomials, coefficients in ascending order.

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    /// Trailing zero coefficients are dropped; the zero polynomial has no
    /// coefficients.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    /// The monomial `z`.
    pub fn identity() -> Self {
        Self::from_real(&[0.0, 1.0])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        Poly::new(
            (0..len)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(zero) + other.coeffs.get(k).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::constant(Complex64::new(1.0, 0.0)), |acc, _| acc.mul(self))
    }

    /// `z ↦ p(a + b z)`.
    pub fn compose_affine(&self, a: Complex64, b: Complex64) -> Poly {
        let lin = Poly::new(vec![a, b]);
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, &c| acc.mul(&lin).add(&Poly::constant(c)))
    }

    /// Synthetic division by `z − 1`: returns `(q, p(1))` with
    /// `p(z) = (z − 1) q(z) + p(1)`.
    pub fn divide_by_z_minus_one(&self) -> (Poly, Complex64) {
        if self.coeffs.len() <= 1 {
            let c = self.coeffs.first().copied().unwrap_or_default();
            return (Poly::zero(), c);
        }
        let n = self.coeffs.len();
        let mut q = vec![Complex64::new(0.0, 0.0); n - 1];
        let mut carry = self.coeffs[n - 1];
        q[n - 2] = carry;
        for k in (1..n - 1).rev() {
            carry = self.coeffs[k] + carry;
            q[k - 1] = carry;
        }
        let remainder = self.coeffs[0] + carry;
        (Poly::new(q), remainder)
    }

    /// All complex roots by the Aberth-Ehrlich iteration.
    ///
    /// Returns an empty list for constants. Roots are polished to roughly
    /// machine precision relative to their magnitude for well-separated
    /// roots; clustered roots converge linearly.
    pub fn roots(&self) -> Vec<Complex64> {
        let deg = self.degree();
        if self.is_zero() || deg == 0 {
            return Vec::new();
        }
        let lead = self.coeffs[deg];
        let monic: Vec<Complex64> = self.coeffs.iter().map(|&c| c / lead).collect();
        // Strip exact zero roots first.
        let zeros = monic.iter().take_while(|c| c.norm() == 0.0).count();
        let reduced = Poly::new(monic[zeros..].to_vec());
        let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
        let m = reduced.degree();
        if m == 0 {
            return roots;
        }
        let deriv = reduced.derivative();
        // Cauchy bound for the initial circle.
        let bound = 1.0 + reduced.coeffs[..m].iter().map(|c| c.norm()).fold(0.0, f64::max);
        let radius = bound.min(
            reduced.coeffs[0].norm().powf(1.0 / m as f64).max(1e-3),
        );
        let mut z: Vec<Complex64> = (0..m)
            .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / m as f64))
            .collect();
        for _ in 0..500 {
            let mut max_step: f64 = 0.0;
            for i in 0..m {
                let p = reduced.eval(z[i]);
                if p.norm() == 0.0 {
                    continue;
                }
                let ratio = p / deriv.eval(z[i]);
                let repulsion: Complex64 = (0..m)
                    .filter(|&j| j != i)
                    .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                    .sum();
                let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
                if step.re.is_finite() && step.im.is_finite() {
                    z[i] -= step;
                    max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
                }
            }
            if max_step < 1e-15 {
                break;
            }
        }
        roots.extend(z);
        roots
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn synthetic_division_examples() {
        let (q, r) = Poly::from_real(&[0.0, 0.0, 1.0]).divide_by_z_minus_one();
        assert_eq!(q, Poly::from_real(&[1.0, 1.0]));
        assert_eq!(r, c(1.0, 0.0));
        let (q, r) = Poly::from_real(&[1.0]).divide_by_z_minus_one();
        assert!(q.is_zero());
        assert_eq!(r, c(1.0, 0.0));
    }

    #[test]
    fn roots_of_known_polynomial() {
        // (z - 2)(z + 0.5i)(z - 1 - i)
        let p = Poly::new(vec![c(-2.0, 0.0), c(1.0, 0.0)])
            .mul(&Poly::new(vec![c(0.0, 0.5), c(1.0, 0.0)]))
            .mul(&Poly::new(vec![c(-1.0, -1.0), c(1.0, 0.0)]));
        let mut roots = p.roots();
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        let expected = [c(0.0, -0.5), c(1.0, 1.0), c(2.0, 0.0)];
        for (r, e) in roots.iter().zip(expected) {
            assert!((r - e).norm() < 1e-12, "{r} vs {e}");
        }
    }

    #[test]
    fn roots_with_zero_root_and_double_root() {
        // z (z + 1)^2
        let p = Poly::from_real(&[0.0, 1.0, 2.0, 1.0]);
        let roots = p.roots();
        assert_eq!(roots.len(), 3);
        assert!(roots.iter().any(|r| r.norm() < 1e-14));
        assert_eq!(roots.iter().filter(|r| (**r + 1.0).norm() < 1e-6).count(), 2);
    }

    #[test]
    fn compose_affine_matches_eval() {
        let p = Poly::new(vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0), c(2.0, -1.0)]);
        let q = p.compose_affine(c(1.0, 0.0), c(-1.0, 0.0));
        for z in [c(0.3, 0.1), c(-2.0, 1.0), c(5.0, -4.0)] {
            assert!((q.eval(z) - p.eval(1.0 - z)).norm() < 1e-12 * (1.0 + p.eval(1.0 - z).norm()));
        }
    }
}
