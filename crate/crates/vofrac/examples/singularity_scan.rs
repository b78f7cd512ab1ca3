//! Singularities of the relaxation transform H(s) as λ varies.
//!
//! Sweeps λ over a multiplicative grid and prints, per λ, the certified
//! roots of 1 + λΨ(s) (residual < 1e−10, conjugate pairs).  The roots hug
//! the branch cut on the negative real axis and drift as λ grows.

use vofrac::analysis::{scan_singularities, SearchBox};
use vofrac::transition::ExponentialTransition;

fn main() -> vofrac::Result<()> {
    let tr = ExponentialTransition::new(0.6, 0.8, 2.0)?;
    let scan = scan_singularities(&tr, 0.5, 4.0, 1.6, &SearchBox::default())?;
    for (lam, roots) in scan.lambda_grid.iter().zip(&scan.found) {
        println!("lambda = {lam:.4}: {} root(s)", roots.len());
        for r in roots.iter().filter(|r| r.s.im >= 0.0) {
            println!(
                "  s = {:+.6} {:+.6}i  (and conjugate)   residual {:.2e}",
                r.s.re, r.s.im, r.residual
            );
        }
    }
    Ok(())
}
