//! Numerical verification core for relativistic electromagnetic continua.
//!
//! Layers, bottom up:
//! - [`tensor`]: pointwise Lorentzian tensor and exterior algebra;
//! - [`grid`], [`calculus`]: chart grids, finite-difference operators,
//!   connection and curvature;
//! - [`em`]: observer-relative E/B and D/H splits, Poynting form, Maxwell SEM;
//! - [`constitutive`]: energy-density models, their partials and derived fields;
//! - [`sem`]: stress-energy-momentum tensor in three writings, splittings,
//!   balance, Maxwell and ponderomotive residuals;
//! - [`junction`]: interface geometry, junction and Einstein residuals;
//! - [`convergence`]: refinement-ratio judgement;
//! - [`sampling`]: seeded random metrics, observers, forms and smooth fields.

pub mod calculus;
pub mod constitutive;
pub mod convergence;
pub mod em;
pub mod grid;
pub mod junction;
pub mod parallel;
pub mod sampling;
pub mod sem;
pub mod tensor;
