//! Convergence table for the nonlinear scalar problem.
//!
//! Runs the GL scheme on D^{α(t)} y = 1 − 3y² over an h-ladder against a
//! fine self-reference and prints errors with estimated orders of
//! convergence (EOC = log₂ of consecutive error ratios).

use vofrac::solver::{eoc, preset_problem, solve_gl, Preset, StepSolverOptions};
use vofrac::transition::ExponentialTransition;

fn main() -> vofrac::Result<()> {
    let tr = ExponentialTransition::new(0.6, 0.8, 2.0)?;
    let t_end = 2.0;
    let problem = preset_problem(Preset::Nonlinear13y2, tr, vec![0.85], t_end)?;
    let opts = StepSolverOptions::default();
    let reference = solve_gl(&problem, 2.0_f64.powi(-10), &opts)?.final_state()[0];
    println!("self-reference y({t_end}) at h = 2^-10: {reference:.14}");

    let mut prev: Option<f64> = None;
    println!("\n h        error       EOC");
    for p in 2..=7 {
        let h = 2.0_f64.powi(-p);
        let err = (solve_gl(&problem, h, &opts)?.final_state()[0] - reference).abs();
        match prev {
            Some(e) => println!("2^-{p}    {err:.3e}   {:.3}", eoc(e, err)?),
            None => println!("2^-{p}    {err:.3e}"),
        }
        prev = Some(err);
    }
    Ok(())
}
