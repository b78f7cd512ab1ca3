//! Constant-order relaxation through the Mittag-Leffler function.
//!
//! Evaluates y(t) = E_α(−λ t^α)·y₀ two independent ways — the power
//! series (small arguments) and the Laplace inversion of
//! s^{α−1}/(s^α + λ) — and prints both with their disagreement.

use vofrac::mittag_leffler::{ml_series, relaxation_co};

fn main() -> vofrac::Result<()> {
    let (alpha, lam, y0) = (0.6, 1.0, 1.0);
    let ts: Vec<f64> = vec![0.1, 0.25, 0.5, 1.0, 1.5, 2.0];
    let via_inversion = relaxation_co(alpha, lam, y0, &ts)?;

    println!("alpha = {alpha}, lambda = {lam}, y0 = {y0}");
    println!("\n t      series            inversion         |diff|");
    for (&t, &inv) in ts.iter().zip(&via_inversion) {
        let series = y0 * ml_series(alpha, -lam * t.powf(alpha), 1e-14)?;
        println!("{t:5.2}  {series:.14}  {inv:.14}  {:.2e}", (series - inv).abs());
    }
    Ok(())
}
