//! Variable-order fractional calculus toolkit.
//!
//! Implements Scarpi-type variable-order (VO) integral and differential
//! operators whose order follows an exponential transition
//! `α(t) = α₂ + (α₁ − α₂)e^{−ct}`.  The operators are defined purely in the
//! Laplace domain through the kernel transforms `Ψ(s) = s^{−sA(s)}` and
//! `Φ(s) = s^{sA(s)−1}` (a Sonine pair, `Ψ·Φ = 1/s`), where `A(s)` is the
//! Laplace transform of `α(t)`.
//!
//! The crate provides:
//!
//! * [`transition`] — the exponential order transition, its Laplace
//!   transform, the kernel transforms with principal-branch handling, and
//!   the magnitude estimates used by the weight engine;
//! * [`laplace_inversion`] — numerical inverse Laplace transform on
//!   deformed (parabolic / hyperbolic) contours;
//! * [`mittag_leffler`] — `E_β(−λt^β)` relaxation curves of the
//!   constant-order theory, used as comparators;
//! * [`weights`] — convolution-quadrature weights `ω_n` computed as Taylor
//!   coefficients of `Ψ((1−ξ)/h)` via an FFT-accelerated Cauchy integral,
//!   with certified discretization-error bounds and a round-off-aware
//!   radius selection;
//! * [`solver`] — the VO Grünwald–Letnikov implicit time stepper for scalar
//!   and vector problems, its constant-order counterpart, and EOC tooling;
//! * [`analysis`] — the relaxation transform `H(s)`, its singularities,
//!   kernel-ratio curves and VO-vs-CO relaxation differences;
//! * [`cli`] — the command-line front end (subcommands `solve`, `table`,
//!   `figure`, `weights`, `singularities`) emitting CSV and SVG artifacts.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod laplace_inversion;
pub mod mittag_leffler;
pub mod plot;
pub mod solver;
pub mod transition;
pub mod weights;

pub use error::{Result, VofracError};
pub use transition::ExponentialTransition;
