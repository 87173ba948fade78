//! Self-normalized importance sampling (SNIS) for exponentially tilted
//! distributions, with accuracy diagnostics and scaling-limit verification
//! harnesses.
//!
//! Tilting a law by e^{theta^T g(x)} and renormalizing biases mass toward
//! large theta^T g(x); the SNIS estimator R_{n,theta} approximates the tilted
//! law from untilted draws. Its fidelity is governed by the second-moment
//! ratio M_theta = E[e^{2 theta^T g(X)}] / E[e^{theta^T g(X)}]^2: depending
//! on whether M_theta/n tends to 0, a constant, or infinity along a schedule
//! (theta_n, n), the estimator is accurate, critical, or undersampled, and
//! the rescaled estimator converges to a Gamma law, a Poisson-random-measure
//! functional, or an extreme-value law. This crate implements the estimator,
//! the diagnostics, and Monte Carlo checks for each of those limits at desk
//! scale.
//!
//! Module map:
//! - [`dist`]: distribution families, samplers, CDFs, tail metadata.
//! - [`tilt`]: SNIS weights, resampling, M_theta (empirical/analytic),
//!   exact tilted laws in one dimension.
//! - [`diagnostics`]: KS distances (weighted, two-sample, rectangle) and
//!   regime classification of (n, M_theta) schedules.
//! - [`asym1d`] / [`asymhd`]: Karamata asymptotics of M_theta and the
//!   multivariate regular-variation calculus.
//! - [`limits`] / [`limitlab`]: scaling-limit target laws, the limiting
//!   Gaussian field, the Poisson random measure, and the critical-regime
//!   limit sampler.
//! - [`unbounded`]: Laplace-method asymptotics for unbounded statistics.
//! - [`figures`] / [`verify`]: deterministic figure-data generation and the
//!   twelve acceptance suites.
//! - [`io`]: CSV/JSON ingestion and emission (parse-emit round trips).
//! - [`numerics`]: log-sum-exp, incomplete gamma/beta, Gauss-Kronrod.
//! - [`points`]: flat row-major sample container.
//! - [`rng`]: seeded, stream-split ChaCha8 generators.

pub mod asym1d;
pub mod asymhd;
pub mod diagnostics;
pub mod dist;
pub mod error;
pub mod figures;
pub mod io;
pub mod limitlab;
pub mod limits;
pub mod numerics;
pub mod points;
pub mod rng;
pub mod tilt;
pub mod unbounded;
pub mod verify;

pub use error::{Error, Result};
pub use points::Points;
