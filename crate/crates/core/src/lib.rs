//! Pseudo-spectral Landau–Lifshitz–Bloch solver on the periodic cube, with a
//! Littlewood–Paley toolkit for Besov norms and a randomized inequality lab.
//!
//! The runnable programs under `examples/` are the main entry points; the
//! `llb` binary wraps the experiment drivers in [`experiment`].

pub mod spectral;
pub mod littlewood_paley;
pub mod lab;
pub mod solver;
pub mod experiment;
