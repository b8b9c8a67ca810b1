use lsh_core::inference::initialize;
use lsh_core::rng::SeedTree;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::model;
use crate::output::{join, latents_csv};

pub fn run(cfg: &RunConfig, seed: u64) -> CliResult<()> {
    let h = super::input(cfg)?;
    let k = h.max_order();
    let d = model::dim(cfg)?;
    let priors = model::priors(cfg, d, k)?;
    let mcfg = model::mcmc(cfg, k)?;
    let init = initialize(&h, &priors, &mcfg, &mut SeedTree::new(seed).stream("init"))?;

    let mut out = super::outputs(cfg)?;
    out.write("init_latents.csv", &latents_csv(&init.u))?;
    let mut p = String::new();
    p.push_str(&format!("noise_mode={}\n", if init.noise.is_symmetric() { "symmetric" } else { "asymmetric" }));
    p.push_str(&format!("anchors={}\n", join(init.u.anchors().unwrap_or(&[]))));
    p.push_str(&format!("mu={}\n", join(init.mu.iter())));
    p.push_str(&format!("sigma={}\n", join(init.sigma.transpose().iter())));
    p.push_str(&format!("radii={}\n", join(init.radii.as_slice())));
    p.push_str(&format!("psi0={}\n", join(init.noise.psi0_all())));
    p.push_str(&format!("psi1={}\n", join(init.noise.psi1_all())));
    out.write("init_params.txt", &p)?;
    out.finish("init", cfg, seed)
}
