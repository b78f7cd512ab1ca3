//! VO Brusselator phase portraits, with constant-order comparators.
//!
//! Integrates the two-species Brusselator under the VO derivative in the
//! limit-cycle regime (μ = 4) and overlays the constant-order solutions
//! of orders α₁ and α₂, writing an SVG phase-plane plot.

use vofrac::plot::{line_chart, Series};
use vofrac::solver::{preset_problem, solve_co_gl, solve_gl, Preset, StepSolverOptions};
use vofrac::transition::ExponentialTransition;

fn main() -> vofrac::Result<()> {
    let tr = ExponentialTransition::new(0.6, 0.8, 2.0)?;
    let problem = preset_problem(
        Preset::Brusselator { a: 1.0, mu: 4.0 },
        tr,
        vec![0.9, 2.1],
        120.0,
    )?;
    let h = 2.0_f64.powi(-5);
    let opts = StepSolverOptions::default();
    let vo = solve_gl(&problem, h, &opts)?;
    let co1 = solve_co_gl(0.6, &problem, h, &opts)?;
    let co2 = solve_co_gl(0.8, &problem, h, &opts)?;

    let phase = |t: &vofrac::solver::Trajectory| -> Vec<(f64, f64)> {
        t.ys.iter().map(|y| (y[0], y[1])).collect()
    };
    let (pv, p1, p2) = (phase(&vo), phase(&co1), phase(&co2));
    let svg = line_chart(
        "Brusselator limit cycle (mu = 4)",
        "x",
        "y",
        &[
            Series { label: "VO", points: &pv },
            Series { label: "CO alpha1 = 0.6", points: &p1 },
            Series { label: "CO alpha2 = 0.8", points: &p2 },
        ],
    );
    std::fs::write("brusselator_phase.svg", svg)?;
    println!("wrote brusselator_phase.svg ({} VO points)", pv.len());
    let last = vo.final_state();
    println!("VO terminal state: ({:.6}, {:.6})", last[0], last[1]);
    Ok(())
}
