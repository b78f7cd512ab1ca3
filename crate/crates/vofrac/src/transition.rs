//! Exponential order transitions and the VO kernel transforms.
//!
//! The order transition `α(t) = α₂ + (α₁ − α₂)e^{−ct}` starts at `α₁`,
//! decays exponentially at rate `c`, and settles at `α₂`.  Its Laplace
//! transform is `A(s) = (α₂c + α₁s)/(s(c + s))`, and the VO kernels are
//! defined in the Laplace domain as `Ψ(s) = s^{−sA(s)}` and
//! `Φ(s) = s^{sA(s)−1}` on the principal branch (cut on the negative real
//! axis).

use crate::error::{Result, VofracError};
use num_complex::Complex64;

/// A point in the complex plane.  Backed by [`num_complex::Complex64`];
/// construct with [`cplx`] or `Complex64::new(re, im)`.
pub type ComplexPoint = Complex64;

/// Convenience constructor for [`ComplexPoint`].
#[inline]
pub fn cplx(re: f64, im: f64) -> ComplexPoint {
    Complex64::new(re, im)
}

/// Abstract order transition: anything exposing the Laplace transform of
/// `α(t)`.  The crate ships one implementer, [`ExponentialTransition`];
/// the kernel machinery is written against this interface so other
/// transition families can slot in.
pub trait OrderTransition {
    /// Laplace transform `A(s)` of the order function `α(t)`.
    fn laplace_order(&self, s: ComplexPoint) -> Result<ComplexPoint>;

    /// The product `s·A(s)`, finite wherever `A` has only its `1/s` pole.
    fn s_alpha_product(&self, s: ComplexPoint) -> Result<ComplexPoint>;
}

/// The exponential order transition `α(t) = α₂ + (α₁ − α₂)e^{−ct}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialTransition {
    alpha1: f64,
    alpha2: f64,
    c: f64,
}

impl ExponentialTransition {
    /// Build a transition with initial order `alpha1`, final order
    /// `alpha2` (both in `(0, 1)`) and rate `c > 0`.  `alpha1 == alpha2`
    /// is permitted and degenerates to the constant-order case.
    pub fn new(alpha1: f64, alpha2: f64, c: f64) -> Result<Self> {
        for (name, v) in [("alpha1", alpha1), ("alpha2", alpha2)] {
            if !(v.is_finite() && 0.0 < v && v < 1.0) {
                return Err(VofracError::InvalidArgument(format!(
                    "{name} must lie in (0, 1), got {v}"
                )));
            }
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(VofracError::InvalidArgument(format!(
                "c must be positive, got {c}"
            )));
        }
        Ok(Self { alpha1, alpha2, c })
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// The order `α(t) = α₂ + (α₁ − α₂)e^{−ct}` at time `t ≥ 0`.
    pub fn order_at(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(VofracError::InvalidArgument(format!(
                "order_at requires finite t >= 0, got {t}"
            )));
        }
        Ok(self.alpha2 + (self.alpha1 - self.alpha2) * (-self.c * t).exp())
    }

    /// The kernel transform `Ψ(s) = s^{−sA(s)} = exp(−sA(s)·Log s)` on the
    /// principal branch.  Errors on the cut `s ∈ (−∞, 0]`.
    pub fn psi_hat(&self, s: ComplexPoint) -> Result<ComplexPoint> {
        check_off_cut(s)?;
        let p = self.s_alpha_product(s)?;
        Ok((-p * s.ln()).exp())
    }

    /// The complementary kernel transform `Φ(s) = s^{sA(s)−1}`, forming a
    /// Sonine pair with `Ψ`: `Ψ(s)·Φ(s) = 1/s`.
    pub fn phi_hat(&self, s: ComplexPoint) -> Result<ComplexPoint> {
        check_off_cut(s)?;
        let p = self.s_alpha_product(s)?;
        Ok(((p - 1.0) * s.ln()).exp())
    }

    /// The step-scaled generating transform `Ψ^[h](ξ) = Ψ((1−ξ)/h)`,
    /// analytic in `ℂ` except the real ray `[1, +∞)`.
    pub fn psi_hat_h(&self, h: f64, xi: ComplexPoint) -> Result<ComplexPoint> {
        check_step(h)?;
        if xi.im == 0.0 && xi.re >= 1.0 {
            return Err(VofracError::BranchCut(format!(
                "psi_hat_h is singular on the real ray [1, inf), got xi = {xi}"
            )));
        }
        self.psi_hat((Complex64::new(1.0, 0.0) - xi) / h)
    }

    /// The magnitude decomposition of `Ψ^[h]` at `ξ = x + iy`:
    ///
    /// `|Ψ^[h](ξ)| = exp( A(x,y)·(ln h − ½ ln((1−x)² + y²)) + θ_ξ·B(x,y) )`
    ///
    /// with `θ_ξ = arg(1−ξ)` and
    ///
    /// * `A(x,y) = [α₁y² + (ch + 1−x)(α₁(1−x) + α₂ch)] / ((ch + 1−x)² + y²)`
    /// * `B(x,y) = (α₂ − α₁)·ch·y / ((ch + 1−x)² + y²)`.
    ///
    /// For `α₁ = α₂` this collapses to `A ≡ α₁`, `B ≡ 0`.
    pub fn magnitude_decomposition(&self, h: f64, xi: ComplexPoint) -> Result<MagnitudeParts> {
        check_step(h)?;
        if xi.im == 0.0 && xi.re >= 1.0 {
            return Err(VofracError::BranchCut(format!(
                "magnitude decomposition undefined on the real ray [1, inf), got xi = {xi}"
            )));
        }
        let (x, y) = (xi.re, xi.im);
        let ch = self.c * h;
        let one_x = 1.0 - x;
        let denom = (ch + one_x) * (ch + one_x) + y * y;
        let a_xy = (self.alpha1 * y * y + (ch + one_x) * (self.alpha1 * one_x + self.alpha2 * ch))
            / denom;
        let b_xy = (self.alpha2 - self.alpha1) * ch * y / denom;
        let theta = (Complex64::new(1.0, 0.0) - xi).arg();
        let magnitude =
            (a_xy * (h.ln() - 0.5 * (one_x * one_x + y * y).ln()) + theta * b_xy).exp();
        Ok(MagnitudeParts {
            a_xy,
            b_xy,
            theta,
            magnitude,
        })
    }

    /// The circle bound `M_r = |Ψ^[h](r)|`: for `0 < h < 1 − r` the real
    /// point `r` maximizes `|Ψ^[h]|` over every circle `|ξ| = ρ ≤ r`.
    pub fn circle_bound(&self, h: f64, r: f64) -> Result<f64> {
        check_step(h)?;
        if !(0.0 < r && r < 1.0) {
            return Err(VofracError::InvalidArgument(format!(
                "circle_bound requires r in (0, 1), got {r}"
            )));
        }
        if h >= 1.0 - r {
            return Err(VofracError::InvalidArgument(format!(
                "circle_bound requires h < 1 - r (h = {h}, r = {r})"
            )));
        }
        Ok(self.psi_hat_h(h, cplx(r, 0.0))?.norm())
    }

    /// Closed form of the leading Taylor coefficient of `Ψ^[h]`:
    /// `ω₀ = Ψ^[h](0) = h^{(α₂ch + α₁)/(ch + 1)}`.
    pub fn omega0(&self, h: f64) -> Result<f64> {
        check_step(h)?;
        let ch = self.c * h;
        Ok(h.powf((self.alpha2 * ch + self.alpha1) / (ch + 1.0)))
    }
}

impl OrderTransition for ExponentialTransition {
    /// `A(s) = (α₂c + α₁s)/(s(c+s))`; poles at `s = 0` and `s = −c`.
    fn laplace_order(&self, s: ComplexPoint) -> Result<ComplexPoint> {
        if s.norm() == 0.0 || (s + self.c).norm() == 0.0 {
            return Err(VofracError::Pole(s));
        }
        Ok((self.alpha2 * self.c + self.alpha1 * s) / (s * (self.c + s)))
    }

    /// `sA(s) = (α₂c + α₁s)/(c+s)`, evaluated through the cancellation-free
    /// decompositions
    ///
    /// * `sA(s) = α₁ + B(s)`, `B(s) = (α₂−α₁)c/(c+s)`  (used for `|s| ≥ c`),
    /// * `sA(s) = α₂ + C(s)`, `C(s) = (α₁−α₂)s/(c+s)`  (used for `|s| < c`),
    ///
    /// so that the limits `sA(s) → α₁` (`s → ∞`) and `sA(0) = α₂` are exact
    /// to machine precision.  Only `s = −c` is a pole.
    fn s_alpha_product(&self, s: ComplexPoint) -> Result<ComplexPoint> {
        if (s + self.c).norm() == 0.0 {
            return Err(VofracError::Pole(s));
        }
        if s.norm() >= self.c {
            Ok(self.alpha1 + (self.alpha2 - self.alpha1) * self.c / (self.c + s))
        } else {
            Ok(self.alpha2 + (self.alpha1 - self.alpha2) * s / (self.c + s))
        }
    }
}

/// Result of [`ExponentialTransition::magnitude_decomposition`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnitudeParts {
    /// The exponent factor `A(x, y)` multiplying `ln h − ½ln((1−x)²+y²)`.
    pub a_xy: f64,
    /// The exponent factor `B(x, y)` multiplying `θ_ξ`.
    pub b_xy: f64,
    /// `θ_ξ = arg(1 − ξ)`.
    pub theta: f64,
    /// `|Ψ^[h](ξ)|` assembled from the decomposition.
    pub magnitude: f64,
}

fn check_off_cut(s: ComplexPoint) -> Result<()> {
    if s.im == 0.0 && s.re <= 0.0 {
        return Err(VofracError::BranchCut(format!(
            "principal branch undefined on the negative real axis, got s = {s}"
        )));
    }
    Ok(())
}

fn check_step(h: f64) -> Result<()> {
    if !(h.is_finite() && h > 0.0) {
        return Err(VofracError::InvalidArgument(format!(
            "step h must be positive, got {h}"
        )));
    }
    Ok(())
}
