//! Flat geometry of meromorphic quadratic differentials on the Riemann sphere,
//! and the combinatorial/cluster structures they induce.
//!
//! The crate has five layers:
//!
//! * [`surface`] — marked bordered surfaces, ideal and tagged triangulations,
//!   flips, exchange matrices.
//! * [`quiver`] — quivers with potential from triangulations, cyclic
//!   derivatives, seeds and mutation.
//! * [`qdiff`] — the numerical engine: critical data of a rational quadratic
//!   differential, horizontal trajectories, strip decompositions, WKB
//!   triangulations, periods, and the octagon contour identity.
//! * [`teich`] — cross ratios, cluster (Fock–Goncharov) coordinates, the flip
//!   transformation law and seed-level chart gluing.
//! * [`vortex`] — a grid solver for the vortex form of the Bochner equation,
//!   pullback-metric length functionals, and the length-asymptotics
//!   experiment.
//!
//! The `teichflow` binary exposes all of this as reproducible command-line
//! experiments; see the book under `book/` for a guided tour.

pub mod cpoly;
pub mod quiver;
pub mod surface;
pub mod teich;

pub mod qdiff;
pub mod vortex;

pub mod io;
pub mod render;

mod book;
