//! VO relaxation equation: GL stepper vs Laplace-domain reference.
//!
//! Solves D^{α(t)} y = −λy, y(0) = 1 with the implicit Grünwald-Letnikov
//! scheme and compares the terminal value against the contour-integral
//! reference y*(T) obtained by inverting H(s) = (1/s)(1 + λΨ(s))^{−1}.

use vofrac::analysis::{reference_relaxation, RelaxationSpec};
use vofrac::laplace_inversion::ContourSpec;
use vofrac::solver::{preset_problem, solve_gl, Preset, StepSolverOptions};
use vofrac::transition::ExponentialTransition;

fn main() -> vofrac::Result<()> {
    let tr = ExponentialTransition::new(0.6, 0.8, 2.0)?;
    let (lam, t_end) = (1.0, 4.0);
    let spec = RelaxationSpec::new(tr, lam, 1.0)?;
    let contour = ContourSpec::default_parabolic(t_end, t_end)?;
    let reference = reference_relaxation(&spec, &[t_end], &contour)?[0];
    println!("reference y*({t_end}) = {reference:.14}");

    let problem = preset_problem(Preset::Relaxation { lam }, tr, vec![1.0], t_end)?;
    let opts = StepSolverOptions::default();
    println!("\n h          y_h(T)            |y_h - y*|");
    for p in 2..=7 {
        let h = 2.0_f64.powi(-p);
        let traj = solve_gl(&problem, h, &opts)?;
        let y = traj.final_state()[0];
        println!("2^-{p}      {y:.14}  {:.3e}", (y - reference).abs());
    }
    Ok(())
}
