//! Fixtures shared by the benchmarks.

use orbihear_core::polytope::random::random_generic_polytope;
use orbihear_core::polytope::facet_fingerprint;
use orbihear_core::{LabeledPolytope, MinkowskiInput};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn polytope(seed: u64, dim: usize, facets: usize) -> LabeledPolytope {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_generic_polytope(&mut rng, dim, facets, 5).expect("fixture polytope")
}

pub fn minkowski_input(seed: u64, dim: usize, facets: usize) -> MinkowskiInput {
    let p = polytope(seed, dim, facets);
    MinkowskiInput::from_fingerprint(&facet_fingerprint(&p).expect("fingerprint")).expect("balanced input")
}
