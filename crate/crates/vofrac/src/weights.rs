//! Convolution-quadrature weights for the VO Grünwald–Letnikov scheme.
//!
//! The weights `ω_n` are the Taylor coefficients of the generating
//! transform `Ψ^[h](ξ) = Ψ((1−ξ)/h)`, recovered through the Cauchy
//! integral on a circle of radius `ρ < 1`, discretized by the compound
//! trapezoidal rule on `L` nodes and evaluated with one FFT pass:
//!
//! `ω_n ≈ ρ^{−n}/L · Σ_{k=0}^{L−1} Ψ^[h](ρ e^{2πik/L}) e^{−2πikn/L}`.
//!
//! Two error sources drive the plan selection:
//!
//! * discretization: bounded per index by `M·ρ^{−n} / ((r/ρ)^L − 1)` where
//!   `M` bounds `|Ψ^[h]|` on the circle `|ξ| = r`, `ρ < r < 1`;
//! * round-off: amplified by `ρ^{−N}`, modeled as `ε·M_r·ρ^{−N}`, which the
//!   radius selection keeps below a safety fraction `F_s` of the target
//!   tolerance `τ` (so `ρ` is a *lower* bound — pushing `ρ` toward 1 cuts
//!   the amplification).

use crate::error::{Result, VofracError};
use crate::transition::ExponentialTransition;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::io::{Read, Write};

/// Default coefficient tolerance τ.
pub const DEFAULT_TAU: f64 = 1e-13;
/// Default round-off safety factor F_s.
pub const DEFAULT_SAFETY: f64 = 0.1;
/// Binary64 unit roundoff used by the round-off model.
pub const DEFAULT_EPS: f64 = 2.22e-16;
/// Node count for sampling `|Ψ^[h]|` on the outer circle.
pub const CIRCLE_SAMPLES: usize = 4096;
/// Hard cap on the quadrature length.
pub const MAX_L: usize = 1 << 26;

/// The parameter bundle resolved by the planning pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightPlan {
    /// Time step.
    pub h: f64,
    /// Highest weight index.
    pub n: usize,
    /// Target coefficient tolerance τ.
    pub tau: f64,
    /// Round-off safety factor F_s ∈ (0, 1).
    pub safety: f64,
    /// Outer (bounding) radius r ∈ (0, 1).
    pub r: f64,
    /// Quadrature circle radius ρ ∈ (0, r).
    pub rho: f64,
    /// Trapezoidal node count (a power of two ≥ n + 1).
    pub l: usize,
    /// Machine-precision model ε.
    pub eps: f64,
    /// Closed-form bound `|Ψ^[h](r)|`, valid as a circle bound when
    /// `h < 1 − r`; `None` when that lemma precondition fails (the sampled
    /// estimate below still bounds the quadrature error).
    pub m_r: Option<f64>,
    /// Sampled maximum of `|Ψ^[h]|` over the circle `|ξ| = r`.
    pub m_estimate: f64,
}

impl WeightPlan {
    /// Certified per-coefficient bound: the discretization term plus the
    /// round-off allowance τ (the radius selection keeps the amplified
    /// round-off below `F_s·τ`, so τ dominates it with margin).
    pub fn error_bound_at(&self, idx: usize) -> f64 {
        error_bound(self.m_estimate, self.rho, self.r, self.l, idx) + self.tau
    }
}

/// The weights `ω₀..ω_N` with their plan and certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    omegas: Vec<f64>,
    plan: WeightPlan,
    transition: ExponentialTransition,
}

impl WeightTable {
    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn plan(&self) -> &WeightPlan {
        &self.plan
    }

    pub fn transition(&self) -> &ExponentialTransition {
        &self.transition
    }

    /// Certified per-index discretization bound.
    pub fn error_bound_at(&self, idx: usize) -> f64 {
        self.plan.error_bound_at(idx)
    }

    /// A stable content checksum (FNV-1a over the raw weight bits), used
    /// for trajectory provenance.
    pub fn checksum(&self) -> u64 {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |bits: u64| {
            for b in bits.to_le_bytes() {
                hash ^= b as u64;
                hash = hash.wrapping_mul(0x1000_0000_01b3);
            }
        };
        for &w in &self.omegas {
            eat(w.to_bits());
        }
        eat(self.plan.h.to_bits());
        hash
    }

    /// Serialize as the binary interchange format: header
    /// `(α₁, α₂, c, h, N, τ)` as IEEE-754 binary64 little-endian, followed
    /// by the `N + 1` weights as binary64 little-endian.
    pub fn dump<W: Write>(&self, mut out: W) -> Result<()> {
        let header = [
            self.transition.alpha1(),
            self.transition.alpha2(),
            self.transition.c(),
            self.plan.h,
            self.plan.n as f64,
            self.plan.tau,
        ];
        for v in header.iter().chain(self.omegas.iter()) {
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    /// Read back a table produced by [`WeightTable::dump`].  The plan is
    /// re-derived from the header parameters (deterministically identical
    /// to the one used at dump time).
    pub fn load<R: Read>(mut input: R) -> Result<WeightTable> {
        let read_f64 = |input: &mut R| -> Result<f64> {
            let mut buf = [0u8; 8];
            input.read_exact(&mut buf)?;
            Ok(f64::from_le_bytes(buf))
        };
        let a1 = read_f64(&mut input)?;
        let a2 = read_f64(&mut input)?;
        let c = read_f64(&mut input)?;
        let h = read_f64(&mut input)?;
        let nf = read_f64(&mut input)?;
        let tau = read_f64(&mut input)?;
        if !(nf.is_finite() && nf >= 0.0 && nf.fract() == 0.0) {
            return Err(VofracError::InvalidArgument(format!(
                "corrupt weight table header: N = {nf}"
            )));
        }
        let n = nf as usize;
        let transition = ExponentialTransition::new(a1, a2, c)?;
        let mut omegas = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            omegas.push(read_f64(&mut input)?);
        }
        let plan = plan_weights(&transition, h, n, tau, DEFAULT_SAFETY)?;
        Ok(WeightTable {
            omegas,
            plan,
            transition,
        })
    }
}

/// Radius selection from the round-off model: `ρ = exp(−(1/N)·ln(F_sτ/(M_r ε)))`.
///
/// The result is a lower bound; if it reaches or exceeds the outer radius
/// `r` the caller must increase `r` (signalled by comparing the returned
/// value against `r`).
pub fn select_radius(n: usize, tau: f64, safety: f64, m_r: f64, eps: f64) -> Result<f64> {
    if n == 0 {
        return Err(VofracError::InvalidArgument(
            "select_radius needs N >= 1".into(),
        ));
    }
    for (name, v) in [("tau", tau), ("safety", safety), ("M_r", m_r), ("eps", eps)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(VofracError::InvalidArgument(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    Ok((-(1.0 / n as f64) * (safety * tau / (m_r * eps)).ln()).exp())
}

/// Sampled maximum of `|Ψ^[h]|` over the circle `|ξ| = r` (`samples`
/// points).  By the maximum-modulus principle this bounds `|Ψ^[h]|` on
/// every circle of radius ≤ r, which is what the discretization bound
/// needs; when `h < 1 − r` additionally the real point `r` itself is the
/// maximizer and [`ExponentialTransition::circle_bound`] is a closed-form
/// cross-check.
pub fn estimate_m(
    tr: &ExponentialTransition,
    h: f64,
    r: f64,
    samples: usize,
) -> Result<f64> {
    if !(0.0 < r && r < 1.0) {
        return Err(VofracError::InvalidArgument(format!(
            "estimate_m requires r in (0, 1), got {r}"
        )));
    }
    if samples < 8 {
        return Err(VofracError::InvalidArgument(format!(
            "estimate_m needs at least 8 samples, got {samples}"
        )));
    }
    let mut m = 0.0_f64;
    for k in 0..samples {
        let th = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
        let xi = Complex64::from_polar(r, th);
        m = m.max(tr.psi_hat_h(h, xi)?.norm());
    }
    Ok(m)
}

/// Smallest power of two `L ≥ max(N+1, (ln(Mρ^{−N} + τ) − ln τ)/(ln r − ln ρ))`
/// making the discretization bound at index `N` fall below `τ`.
pub fn select_node_count(m: f64, rho: f64, r: f64, tau: f64, n: usize) -> Result<usize> {
    if !(0.0 < rho && rho < r && r < 1.0) {
        return Err(VofracError::InvalidArgument(format!(
            "need 0 < rho < r < 1, got rho = {rho}, r = {r}"
        )));
    }
    let required = ((m * rho.powi(-(n as i32)) + tau).ln() - tau.ln()) / (r.ln() - rho.ln());
    let floor = (n + 1).max(required.ceil().max(1.0) as usize);
    let mut l = 1usize;
    while l < floor {
        l *= 2;
        if l > MAX_L {
            return Err(VofracError::InfeasiblePlan(format!(
                "required node count {floor} exceeds the cap {MAX_L}"
            )));
        }
    }
    Ok(l)
}

/// Per-index discretization bound `M·ρ^{−n} / ((r/ρ)^L − 1)`.
pub fn error_bound(m: f64, rho: f64, r: f64, l: usize, n: usize) -> f64 {
    m * rho.powi(-(n as i32)) / ((r / rho).powi(l as i32) - 1.0)
}

/// Resolve the full plan (outer radius, quadrature radius, node count,
/// magnitude estimates) without computing the weights.
///
/// `r` starts at 0.99; whenever the round-off radius demands `ρ ≥ r`, the
/// gap to 1 is halved (`r ← 1 − (1−r)/2`).  Feasibility is declared once
/// `ρ < r`; the loop is finite because `ρ` is fixed by `(N, τ, F_s, M_r, ε)`
/// up to the slowly varying `M_r`.
pub fn plan_weights(
    tr: &ExponentialTransition,
    h: f64,
    n: usize,
    tau: f64,
    safety: f64,
) -> Result<WeightPlan> {
    if !(h.is_finite() && h > 0.0) {
        return Err(VofracError::InvalidArgument(format!(
            "step h must be positive, got {h}"
        )));
    }
    if n == 0 {
        // Degenerate single-coefficient table: ω₀ has a closed form and no
        // quadrature is involved; give it a trivial certified plan.
        return Ok(WeightPlan {
            h,
            n,
            tau,
            safety,
            r: 0.99,
            rho: 0.5,
            l: 1,
            eps: DEFAULT_EPS,
            m_r: None,
            m_estimate: tr.omega0(h)?,
        });
    }
    let mut r = 0.99_f64;
    let mut guard = 0;
    let rho = loop {
        let m_point = tr.psi_hat_h(h, Complex64::new(r, 0.0))?.norm();
        let rho = select_radius(n, tau, safety, m_point, DEFAULT_EPS)?;
        if rho < r {
            break rho;
        }
        let next = 1.0 - (1.0 - r) / 2.0;
        guard += 1;
        // `rho >= 1` means even a lossless quadrature circle cannot meet
        // the round-off budget; halving the gap further only inflates the
        // circle bound, so bail out early instead of walking r into 1.0.
        if rho >= 1.0 || next >= 1.0 || next <= r || guard > 60 {
            return Err(VofracError::InfeasiblePlan(format!(
                "no outer radius r < 1 admits rho < r for h = {h}, N = {n}, tau = {tau}; \
                 relax tau or reduce the weight count"
            )));
        }
        r = next;
    };
    let m_estimate = estimate_m(tr, h, r, CIRCLE_SAMPLES)?;
    let l = select_node_count(m_estimate, rho, r, tau, n)?;
    let m_r = if h < 1.0 - r {
        Some(tr.circle_bound(h, r)?)
    } else {
        None
    };
    Ok(WeightPlan {
        h,
        n,
        tau,
        safety,
        r,
        rho,
        l,
        eps: DEFAULT_EPS,
        m_r,
        m_estimate,
    })
}

/// Compute the weight table `ω₀..ω_N` for the given transition and step.
///
/// Runs the full pipeline: plan, sample `Ψ^[h]` on the quadrature circle,
/// one FFT pass, scale index `n` by `ρ^{−n}`.  The imaginary residue of
/// every coefficient is verified `< τ` before truncation to real values.
pub fn compute_weights(
    tr: &ExponentialTransition,
    h: f64,
    n: usize,
    tau: f64,
    safety: f64,
) -> Result<WeightTable> {
    let plan = plan_weights(tr, h, n, tau, safety)?;
    let omegas = weights_for_plan(tr, &plan, plan.l)?;
    Ok(WeightTable {
        omegas,
        plan,
        transition: *tr,
    })
}

/// Same as [`compute_weights`] with the default τ and F_s.
pub fn compute_weights_default(
    tr: &ExponentialTransition,
    h: f64,
    n: usize,
) -> Result<WeightTable> {
    compute_weights(tr, h, n, DEFAULT_TAU, DEFAULT_SAFETY)
}

/// Evaluate the quadrature of a resolved plan with an explicit node count
/// (used by the refinement cross-checks, e.g. `4L` vs `L`).
pub fn weights_for_plan(
    tr: &ExponentialTransition,
    plan: &WeightPlan,
    l: usize,
) -> Result<Vec<f64>> {
    if plan.n == 0 {
        return Ok(vec![tr.omega0(plan.h)?]);
    }
    if l < plan.n + 1 {
        return Err(VofracError::InvalidArgument(format!(
            "node count {l} below N + 1 = {}",
            plan.n + 1
        )));
    }
    let mut buf: Vec<Complex64> = (0..l)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / l as f64;
            tr.psi_hat_h(plan.h, Complex64::from_polar(plan.rho, th))
        })
        .collect::<Result<_>>()?;
    // Forward DFT: c_n = Σ_k v_k e^{−2πikn/L}; the Taylor coefficient is
    // c_n/L scaled by ρ^{−n}.
    FftPlanner::new().plan_fft_forward(l).process(&mut buf);
    let mut omegas = Vec::with_capacity(plan.n + 1);
    for (idx, v) in buf.iter().take(plan.n + 1).enumerate() {
        let coeff = v / l as f64 * plan.rho.powi(-(idx as i32));
        if coeff.im.abs() > plan.tau {
            return Err(VofracError::Numerical(format!(
                "imaginary residue {} of omega_{idx} exceeds tau {}",
                coeff.im, plan.tau
            )));
        }
        omegas.push(coeff.re);
    }
    Ok(omegas)
}

/// Constant-order Grünwald–Letnikov weights: the Taylor coefficients of
/// `(1−ξ)^{−α}` through the stable recurrence `w₀ = 1`,
/// `w_j = w_{j−1}(j−1+α)/j`.  The caller applies the `h^α` factor.
pub fn co_weights(alpha: f64, n: usize) -> Result<Vec<f64>> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(VofracError::InvalidArgument(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let mut w = Vec::with_capacity(n + 1);
    w.push(1.0);
    for j in 1..=n {
        let prev = w[j - 1];
        w.push(prev * (j as f64 - 1.0 + alpha) / j as f64);
    }
    Ok(w)
}
