//! Time-domain verification of the Sonine property.
//!
//! The kernel pair (ψ, φ) satisfies ∫₀^t φ(t−τ)ψ(τ)dτ = 1 for every
//! t > 0.  Both kernels are produced by numerical Laplace inversion and
//! convolved with tanh-sinh quadrature, which absorbs the integrable
//! endpoint singularities.

use vofrac::analysis::sonine_convolution;
use vofrac::transition::ExponentialTransition;

fn main() -> vofrac::Result<()> {
    let tr = ExponentialTransition::new(0.6, 0.8, 2.0)?;
    println!(" t       convolution         |conv - 1|");
    for &t in &[0.1, 0.5, 1.0, 2.0, 5.0] {
        let conv = sonine_convolution(&tr, t, 61)?;
        println!("{t:5.2}   {conv:.14}  {:.2e}", (conv - 1.0).abs());
    }
    Ok(())
}
