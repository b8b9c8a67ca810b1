//! Forward simulation: latent coordinates, the geometric hypergraph, and
//! independent per-edge noise.

mod latents;
mod noise;

pub use latents::{sample_latents, LatentGenerator, LatentPrior, MixtureComponent};
pub use noise::{apply_modification, apply_modification_from, NoiseParams};
pub(crate) use noise::all_k_subsets;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{build_nsrgh, LatentConfiguration, RadiusSchedule};
use crate::hypercore::Hypergraph;

/// Samples `U`, builds the geometric hypergraph and perturbs it.
pub fn sample_hypergraph<R: Rng + ?Sized>(
    prior: &LatentPrior,
    radii: &RadiusSchedule,
    noise: &NoiseParams,
    n: usize,
    rng: &mut R,
) -> Result<(Hypergraph, LatentConfiguration)> {
    if noise.max_order() != radii.max_order() {
        return Err(Error::Dimension("noise and radii cover different orders".into()));
    }
    let u = sample_latents(prior, n, rng)?;
    let g = build_nsrgh(&u, radii)?;
    let g = apply_modification(&g, noise, rng)?;
    Ok((g, u))
}
