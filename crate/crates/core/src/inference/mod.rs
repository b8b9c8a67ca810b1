//! Likelihoods, full conditionals, Metropolis–Hastings kernels,
//! initialization and the Metropolis-within-Gibbs driver.

mod gibbs;
mod init;
mod likelihood;
mod mcmc;
mod priors;
mod state;

pub use gibbs::{gibbs_mu, gibbs_psi, gibbs_sigma, sample_inverse_wishart, sample_truncated_beta, sample_wishart, sigma_posterior};
pub use init::{abc_summary, classical_mds, init_abc, init_latents_gmds, init_noise, init_radii, shortest_paths, AbcConfig};
pub use likelihood::{
    log_likelihood, log_likelihood_asymmetric, log_likelihood_symmetric, order_log_likelihood_asymmetric,
    order_log_likelihood_symmetric,
};
pub use mcmc::{
    co_members, explained_fraction, initialize, latent_blocks, run_chains, run_mcmc, run_mcmc_from, sigma_from_upper, InitialState,
    MCMCConfig, PosteriorSummary, PosteriorTrace, TraceRow, TraceSink,
};
pub use priors::{NoisePrior, Priors};
pub use state::{latent_proposal, mh_jump_latent, mh_update_latents, mh_update_radii, radius_proposal, ChainState, Proposal};
