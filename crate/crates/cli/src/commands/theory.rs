use lsh_core::genmodel::LatentPrior;
use lsh_core::predictive::prior_predictive_degrees;
use lsh_core::rng::SeedTree;
use lsh_core::theory::{degree_dist_order2, degree_dist_order3, p_edge_mc, p_edge_order2, sweep, DegreeDistribution};

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::model;

fn default_radii() -> Vec<f64> {
    (1..=20).map(|i| i as f64 * 0.05).collect()
}

fn pmf_csv(theory: &DegreeDistribution, empirical: &DegreeDistribution) -> String {
    let len = theory.pmf.len().max(empirical.pmf.len());
    let mut s = String::from("degree,pmf,empirical\n");
    for x in 0..len {
        let t = theory.pmf.get(x).copied().unwrap_or(0.0);
        let e = empirical.pmf.get(x).copied().unwrap_or(0.0);
        s.push_str(&format!("{x},{t},{e}\n"));
    }
    s
}

pub fn run(cfg: &RunConfig, seed: u64) -> CliResult<()> {
    let d = model::dim(cfg)?;
    let mu = model::mu(cfg, d)?;
    let sigma = model::sigma(cfg, d)?;
    let orders: Vec<usize> = cfg.list("theory_orders")?.unwrap_or(vec![2, 3, 4]);
    if let Some(&k) = orders.iter().find(|&&k| k < 2) {
        return Err(RunConfig::error("theory_orders", format!("order {k} < 2")));
    }
    let radii: Vec<f64> = cfg.list("theory_radii")?.unwrap_or_else(default_radii);
    let samples: usize = cfg.get_or("theory_samples", 10_000)?;
    let seeds = SeedTree::new(seed);

    let points = sweep(&mu, &sigma, &orders, &radii, samples, &mut seeds.stream("sweep"))?;
    let mut out = super::outputs(cfg)?;
    let mut csv = String::from("k,r,p_hat,std_err\n");
    for p in &points {
        csv.push_str(&format!("{},{},{},{}\n", p.order, p.radius, p.p_hat, p.std_error));
    }
    out.write("theory_sweep.csv", &csv)?;

    // degree laws need a full model: n, radii and symmetric noise
    if cfg.has("n") && cfg.has("radii") {
        let n: usize = cfg.require("n")?;
        let r = model::radii(cfg)?;
        if !model::symmetric_mode(cfg)? {
            return Err(RunConfig::error("noise_mode", "degree laws are stated for symmetric noise"));
        }
        let noise = model::noise(cfg, r.max_order())?;
        let reps: usize = cfg.get_or("theory_reps", 1000)?;
        let prior = LatentPrior::gaussian(mu.clone(), sigma.clone())?;
        let sims = prior_predictive_degrees(&prior, &r, &noise, n, reps, &seeds.child("theory", 0))?;
        let pooled = |k: usize| -> Vec<usize> { sims.iter().flat_map(|d| d.column(k)).collect() };

        let p2 = p_edge_order2(&sigma, r.get(2))?;
        let law2 = degree_dist_order2(n, p2.value, noise.phi(2))?;
        let emp2 = DegreeDistribution::empirical(&pooled(2), law2.pmf.len());
        out.write("theory_pmf_order2.csv", &pmf_csv(&law2, &emp2))?;
        out.note("p_edge_2", p2.value);
        out.note("tv_order2", law2.total_variation(&emp2));
        if r.max_order() >= 3 {
            let p3 = p_edge_mc(&mu, &sigma, r.get(3), 3, samples, &mut seeds.stream("p3"))?;
            let law3 = degree_dist_order3(n, p3.value, noise.phi(3))?;
            let emp3 = DegreeDistribution::empirical(&pooled(3), law3.pmf.len());
            out.write("theory_pmf_order3.csv", &pmf_csv(&law3, &emp3))?;
            out.note("p_edge_3", p3.value);
            out.note("p_edge_3_std_err", p3.std_error());
            out.note("tv_order3", law3.total_variation(&emp3));
        }
        out.note("theory_reps", reps);
    }
    out.finish("theory", cfg, seed)
}
