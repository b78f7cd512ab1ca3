//! Certified convolution-quadrature weights.
//!
//! Resolves a weight plan (outer radius r, quadrature radius ρ, FFT
//! length L), computes the weights, and prints the first few together
//! with their certified error bounds.  Also shows the constant-order
//! cross-check: for α₁ = α₂ the FFT weights equal the scaled binomial
//! recurrence.

use vofrac::transition::ExponentialTransition;
use vofrac::weights::{co_weights, compute_weights_default};

fn main() -> vofrac::Result<()> {
    let tr = ExponentialTransition::new(0.6, 0.8, 2.0)?;
    let (h, n) = (2.0_f64.powi(-6), 128);
    let table = compute_weights_default(&tr, h, n)?;
    let plan = table.plan();
    println!("plan for h = {h}, N = {n}:");
    println!("  r = {}, rho = {}, L = {}", plan.r, plan.rho, plan.l);
    println!("  sampled circle bound M = {:.6e}", plan.m_estimate);
    println!("  checksum = {:016x}", table.checksum());

    println!("\n n    omega_n              certified bound");
    for idx in [0usize, 1, 2, 3, 16, 64, 128] {
        println!("{idx:3}  {:.16e}  {:.3e}", table.omegas()[idx], plan.error_bound_at(idx));
    }

    // Constant-order oracle: omega_n = h^alpha * w_n.
    let alpha = 0.5;
    let co_tr = ExponentialTransition::new(alpha, alpha, 1.0)?;
    let co_table = compute_weights_default(&co_tr, h, 32)?;
    let oracle = co_weights(alpha, 32)?;
    let worst = co_table
        .omegas()
        .iter()
        .zip(&oracle)
        .map(|(&got, &w)| (got - h.powf(alpha) * w).abs())
        .fold(0.0_f64, f64::max);
    println!("\nconstant-order cross-check (alpha = {alpha}): max deviation {worst:.3e}");
    Ok(())
}
