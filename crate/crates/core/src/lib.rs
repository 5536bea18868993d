//! Toric orbifold spectral geometry: forward heat invariants of labeled
//! polytopes and their inversion.

pub mod csc;
pub mod error;
pub mod football;
pub mod geometry;
pub mod heat;
pub mod inversion;
pub mod lattice;
pub mod minkowski;
pub mod polytope;
pub mod rational;

pub use csc::CurvatureIntegrals;
pub use error::{Error, Result};
pub use heat::{HeatExpansion, Mode, TorusElement};
pub use inversion::{FitResult, SpectralSamples};
pub use lattice::{FiniteAbelianGroup, IntegerMatrix};
pub use minkowski::MinkowskiInput;
pub use polytope::{Face, FacetDatum, LabeledHalfspace, LabeledPolytope};
pub use rational::Rat;
