//! Exponential order transitions and their Laplace-domain kernels.
//!
//! Builds the transition α(t) = α₂ + (α₁ − α₂)e^{−ct}, prints the order
//! function at a few times, and evaluates the kernel transforms Ψ(s) and
//! Φ(s), checking the Sonine identity Ψ(s)·Φ(s) = 1/s on the spot.

use vofrac::transition::{cplx, ExponentialTransition, OrderTransition};

fn main() -> vofrac::Result<()> {
    let tr = ExponentialTransition::new(0.6, 0.8, 2.0)?;
    println!("order transition: alpha1 = {}, alpha2 = {}, c = {}", tr.alpha1(), tr.alpha2(), tr.c());

    println!("\n t        alpha(t)");
    for &t in &[0.0, 0.1, 0.5, 1.0, 2.0, 5.0] {
        println!("{t:5.2}  {:10.6}", tr.order_at(t)?);
    }

    println!("\n s            Psi(s)                    Phi(s)                    |Psi*Phi - 1/s|");
    for &s in &[cplx(0.5, 0.0), cplx(1.0, 1.0), cplx(2.0, -3.0)] {
        let psi = tr.psi_hat(s)?;
        let phi = tr.phi_hat(s)?;
        let defect = (psi * phi - 1.0 / s).norm();
        println!("{s:10}  {psi:24.16}  {phi:24.16}  {defect:.2e}");
    }

    // The product s·A(s) interpolates between the two orders.
    println!("\n |s|      s*A(s) on the positive real axis");
    for &x in &[1e-3, 0.1, 1.0, 10.0, 1e3] {
        println!("{x:8.3}  {:10.6}", tr.s_alpha_product(cplx(x, 0.0))?.re);
    }
    Ok(())
}
