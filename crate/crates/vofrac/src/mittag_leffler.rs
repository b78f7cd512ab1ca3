//! Mittag-Leffler relaxation curves of the constant-order theory.
//!
//! Only what the comparison studies need: `E_β(z)` for moderate negative
//! real arguments via the power series, and the relaxation curve
//! `y(t) = E_α(−λt^α)·y₀` for arbitrary `t` through Laplace inversion of
//! `s^{α−1}/(s^α + λ)`.

use crate::error::{Result, VofracError};
use crate::laplace_inversion::{invert, ContourSpec};
use statrs::function::gamma::gamma;

/// A batch evaluation request for a relaxation curve.
#[derive(Debug, Clone)]
pub struct MlQuery {
    pub beta: f64,
    pub lam: f64,
    pub ts: Vec<f64>,
}

impl MlQuery {
    pub fn new(beta: f64, lam: f64, ts: Vec<f64>) -> Result<Self> {
        if !(0.0 < beta && beta <= 1.0) {
            return Err(VofracError::InvalidArgument(format!(
                "beta must lie in (0, 1], got {beta}"
            )));
        }
        if !(lam > 0.0) {
            return Err(VofracError::InvalidArgument(format!(
                "lambda must be positive, got {lam}"
            )));
        }
        if ts.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(VofracError::InvalidArgument(
                "time points must be finite and >= 0".into(),
            ));
        }
        Ok(Self { beta, lam, ts })
    }
}

/// `E_β(z) = Σ_{k≥0} z^k / Γ(βk + 1)` by direct summation.
///
/// Reliable for `|z| ≤ 5` (the alternating series loses accuracy beyond);
/// larger arguments are rejected.
pub fn ml_series(beta: f64, z: f64, tol: f64) -> Result<f64> {
    if !(0.0 < beta && beta <= 1.0) {
        return Err(VofracError::InvalidArgument(format!(
            "beta must lie in (0, 1], got {beta}"
        )));
    }
    if z.abs() > 5.0 {
        return Err(VofracError::InvalidArgument(format!(
            "ml_series restricted to |z| <= 5, got {z}"
        )));
    }
    if tol < 1e-14 {
        return Err(VofracError::InvalidArgument(format!(
            "tol must be >= 1e-14, got {tol}"
        )));
    }
    let mut sum = 0.0;
    let mut zk = 1.0;
    for k in 0..400 {
        let term = zk / gamma(beta * k as f64 + 1.0);
        sum += term;
        // Γ(βk+1) grows superexponentially, so once terms drop below tol
        // the tail is geometrically dominated by the current term.
        if k > 0 && term.abs() < tol {
            return Ok(sum);
        }
        zk *= z;
    }
    Err(VofracError::Numerical(format!(
        "ml_series did not reach tol {tol} for beta {beta}, z {z}"
    )))
}

/// The constant-order relaxation curve `y(t) = E_α(−λt^α)·y₀` computed by
/// inverting `𝓔_α(s; λ) = s^{α−1}/(s^α + λ)`.  `t = 0` is returned as `y₀`
/// exactly.
pub fn relaxation_co(alpha: f64, lam: f64, y0: f64, ts: &[f64]) -> Result<Vec<f64>> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(VofracError::InvalidArgument(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if !(lam > 0.0) {
        return Err(VofracError::InvalidArgument(format!(
            "lambda must be positive, got {lam}"
        )));
    }
    let mut out = Vec::with_capacity(ts.len());
    for &t in ts {
        if !(t.is_finite() && t >= 0.0) {
            return Err(VofracError::InvalidArgument(format!(
                "time points must be finite and >= 0, got {t}"
            )));
        }
        if t == 0.0 {
            out.push(y0);
            continue;
        }
        let contour = ContourSpec::default_parabolic(t, t)?;
        // For 0 < α < 1 the roots of s^α + λ sit off the principal sheet,
        // so the only singularities are on the cut; shift 0 is valid.
        let v = invert(
            |s| {
                let sa = (alpha * s.ln()).exp();
                Ok(sa / s / (sa + lam))
            },
            &[t],
            &contour,
        )?;
        out.push(v[0] * y0);
    }
    Ok(out)
}

/// Exact integer-order relaxation `E_1(−λt) = e^{−λt}`, kept as an oracle.
pub fn relaxation_classical(lam: f64, y0: f64, t: f64) -> f64 {
    y0 * (-lam * t).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn query_validation() {
        assert!(MlQuery::new(0.5, 1.0, vec![0.0, 1.0]).is_ok());
        assert!(MlQuery::new(0.0, 1.0, vec![]).is_err());
        assert!(MlQuery::new(1.2, 1.0, vec![]).is_err());
        assert!(MlQuery::new(0.5, 0.0, vec![]).is_err());
        assert!(MlQuery::new(0.5, 1.0, vec![-1.0]).is_err());
    }

    #[test]
    fn series_beta_one_is_exp() {
        let v = ml_series(1.0, -1.0, 1e-14).unwrap();
        assert!((v - (-1.0_f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn series_at_zero_is_one() {
        // E_α(0) = 1/Γ(1) exactly; allow one ulp from the Γ evaluation.
        for &b in &[0.2, 0.5, 0.8, 1.0] {
            assert!((ml_series(b, 0.0, 1e-14).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn series_half_order_erfc_identity() {
        // E_{1/2}(−1) = e·erfc(1) = 0.4275835761558070 (frozen oracle).
        let v = ml_series(0.5, -1.0, 1e-14).unwrap();
        assert!((v - 0.427_583_576_155_807).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn series_range_and_tol_guards() {
        assert!(ml_series(0.5, 5.5, 1e-12).is_err());
        assert!(ml_series(0.5, -1.0, 1e-15).is_err());
    }

    #[test]
    fn relaxation_matches_series() {
        for &(alpha, lam) in &[(0.6, 1.0), (0.8, 2.0), (0.3, 0.5)] {
            let ts = [0.1, 0.5, 1.0, 2.0];
            let got = relaxation_co(alpha, lam, 1.0, &ts).unwrap();
            for (&t, &g) in ts.iter().zip(&got) {
                let z = -lam * t.powf(alpha);
                if z.abs() <= 5.0 {
                    let e = ml_series(alpha, z, 1e-14).unwrap();
                    assert!((g - e).abs() < 1e-8, "alpha={alpha} t={t}: {g} vs {e}");
                }
            }
        }
    }

    #[test]
    fn relaxation_at_zero_is_initial_value() {
        let got = relaxation_co(0.6, 1.0, 3.5, &[0.0]).unwrap();
        assert_eq!(got[0], 3.5);
    }

    #[test]
    fn relaxation_near_integer_order() {
        // α close to 1 tracks the classical e^{−λt} curve.
        let got = relaxation_co(0.999, 1.0, 1.0, &[2.0]).unwrap();
        let classical = relaxation_classical(1.0, 1.0, 2.0);
        assert!((got[0] - classical).abs() < 5e-3, "{} vs {classical}", got[0]);
    }

    #[test]
    fn relaxation_monotone_and_bounded() {
        let ts: Vec<f64> = (0..60).map(|k| 0.1 * k as f64).collect();
        let ys = relaxation_co(0.6, 1.0, 1.0, &ts).unwrap();
        for w in ys.windows(2) {
            assert!(w[1] < w[0], "not strictly decreasing: {} -> {}", w[0], w[1]);
        }
        for &y in &ys {
            assert!(y > 0.0 && y <= 1.0);
        }
    }
}
