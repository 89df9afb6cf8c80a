//! Entropy flow of an ideal, phase-diffusing laser beam.
//!
//! A laser beam with Poissonian photon statistics and a diffusing phase is a
//! mixture of coherent states. Its Rényi-2 entropy grows linearly in time and
//! the growth rate is computed here by independent routes:
//!
//! * [`beam`]: closed-form asymptotic flow `k_B √(Ṅℓ)`, parameter algebra and
//!   the reduced (dimensionless) problem;
//! * [`spectral`]: the ground eigenvalue of the periodic Feynman–Kac operator,
//!   exact at finite coherence;
//! * [`stochastic`]: Monte Carlo evaluation of the Feynman–Kac path functional
//!   and a fit of its decay rate;
//! * [`fock`]: truncated number-basis density matrices and purities, used as a
//!   brute-force oracle for short beam segments;
//! * [`thermal`]: the unidirectional thermal beam used for comparison.

pub mod beam;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod quad;
pub mod spectral;
pub mod stats;
pub mod stochastic;
pub mod thermal;

pub use beam::{
    asymptotic_entropy_flow, asymptotic_entropy_flow_power_form, beam_from_cavity, beam_from_rates,
    heuristic_branching, reduce, Advisory, BeamParams, Coherence, EntropyFlow, HeuristicBreakdown,
    PhysicalConstants, ReducedProblem, UnitSystem,
};
pub use error::{Error, Result};
