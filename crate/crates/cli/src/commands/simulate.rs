use lsh_core::baselines::{sample_beta_model, sample_lca_model};
use lsh_core::genmodel::{apply_modification, sample_latents};
use lsh_core::geometry::{build_nsrgh_limited, DEFAULT_MAX_ORDER};
use lsh_core::hypercore::{serialize_hypergraph, Hypergraph};
use lsh_core::rng::SeedTree;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::model;
use crate::output::{join, latents_csv, Outputs};

fn note_counts(out: &mut Outputs, h: &Hypergraph) {
    out.note("nodes", h.n_nodes());
    out.note("max_order", h.max_order());
    out.note("edges_per_order", join(h.orders().map(|k| h.n_edges_of_order(k))));
}

pub fn run(cfg: &RunConfig, seed: u64) -> CliResult<()> {
    let seeds = SeedTree::new(seed);
    let kind = cfg.raw("model").unwrap_or("lsh").to_string();
    // validate everything before touching the output directory
    let mut out;
    match kind.as_str() {
        "lsh" => {
            let prior = model::latent_prior(cfg)?;
            let radii = model::radii(cfg)?;
            let noise = model::noise(cfg, radii.max_order())?;
            let n: usize = cfg.get_or("n", 0)?;
            let limit = cfg.get_or("max_order_limit", DEFAULT_MAX_ORDER)?;
            // latents and noise draw from separate streams
            let u = sample_latents(&prior, n, &mut seeds.stream("latents"))?;
            let g = build_nsrgh_limited(&u, &radii, limit)?;
            let h = apply_modification(&g, &noise, &mut seeds.stream("noise"))?;
            out = super::outputs(cfg)?;
            out.write("hypergraph.txt", &serialize_hypergraph(&h))?;
            out.write("latents.csv", &latents_csv(&u))?;
            note_counts(&mut out, &h);
        }
        "beta" => {
            let p = model::beta_params(cfg)?;
            let h = sample_beta_model(&p, &mut seeds.stream("beta"))?;
            out = super::outputs(cfg)?;
            out.write("hypergraph.txt", &serialize_hypergraph(&h))?;
            note_counts(&mut out, &h);
        }
        "lca" => {
            let p = model::lca_params(cfg)?;
            let s = sample_lca_model(&p, &mut seeds.stream("lca"))?;
            out = super::outputs(cfg)?;
            out.write("hypergraph.txt", &serialize_hypergraph(&s.hypergraph))?;
            let mut csv = String::from("edge,topic,size_cluster,members\n");
            for (j, m) in s.members.iter().enumerate() {
                let members = m.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
                csv.push_str(&format!("{j},{},{},{members}\n", s.topics[j] + 1, s.sizes[j] + 1));
            }
            out.write("lca_memberships.csv", &csv)?;
            out.note("raw_draws", s.raw_sizes.len());
            note_counts(&mut out, &s.hypergraph);
        }
        other => {
            return Err(RunConfig::error("model", format!("expected lsh, beta or lca, got {other:?}")));
        }
    }
    out.note("model", &kind);
    out.finish("simulate", cfg, seed)
}
