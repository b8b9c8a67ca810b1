//! Smallest enclosing balls, Čech-complex layers, and the non-simplicial
//! random geometric hypergraph built from latent coordinates and ordered radii.

mod cech;
mod latent;
mod miniball;

pub use cech::{build_nsrgh, build_nsrgh_limited, cech_k_layer, hyperedge_present, local_sets, CechEnumeration};
pub use latent::{Ball, LatentConfiguration, RadiusSchedule, DEFAULT_MAX_ORDER};
pub use miniball::miniball;
pub(crate) use miniball::{miniball_radius, Point};
