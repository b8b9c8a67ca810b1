use std::path::{Path, PathBuf};

use lsh_core::genmodel::NoiseParams;
use lsh_core::geometry::RadiusSchedule;
use lsh_core::hypercore::{degree_sequence, DegreeVector};
use lsh_core::linalg::{cholesky, sample_mvn};
use lsh_core::predictive::{
    default_motifs, median_qq_gap, motifs_by_name, new_coordinates, pooled_degrees, predictive_degrees, predictive_motifs,
    prior_predictive_degrees, qq_table, FittedModel, Placement,
};
use lsh_core::rng::SeedTree;
use nalgebra::{DMatrix, DVector};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::model;
use crate::output::{parse_floats, read_key_values, read_latents_csv};

fn artifact(dir: &Path, name: &str) -> CliResult<PathBuf> {
    let p = dir.join(name);
    if !p.exists() {
        return Err(CliError::Data(format!(
            "fit artifact {} is missing; run `lsh fit` first or set fit_dir",
            p.display()
        )));
    }
    Ok(p)
}

fn load_fit(dir: &Path, n_nodes: usize) -> CliResult<FittedModel> {
    let post = artifact(dir, "posterior.txt")?;
    let u = read_latents_csv(&artifact(dir, "posterior_latents.csv")?)?;
    let kv = read_key_values(&post)?;
    let d = u.dim();
    if u.n_nodes() != n_nodes {
        return Err(CliError::Data(format!("fit has {} nodes, input has {n_nodes}", u.n_nodes())));
    }
    let mu = parse_floats(&post, &kv, "mu")?;
    let sigma = parse_floats(&post, &kv, "sigma")?;
    if mu.len() != d || sigma.len() != d * d {
        return Err(CliError::Data(format!("{}: mu/sigma do not match dimension {d}", post.display())));
    }
    let bad = |e: lsh_core::Error| CliError::Data(format!("{}: {e}", post.display()));
    let radii = RadiusSchedule::new(parse_floats(&post, &kv, "radii")?).map_err(bad)?;
    let psi0 = parse_floats(&post, &kv, "psi0")?;
    let psi1 = parse_floats(&post, &kv, "psi1")?;
    let noise = match kv.get("noise_mode").map(String::as_str) {
        Some("asymmetric") => NoiseParams::asymmetric(psi0, psi1),
        _ => NoiseParams::symmetric(psi0),
    }
    .map_err(bad)?;
    Ok(FittedModel {
        u,
        mu: DVector::from_vec(mu),
        sigma: DMatrix::from_row_slice(d, d, &sigma),
        radii,
        noise,
    })
}

/// Redraws the N + N* Gaussian points behind one peripheral placement and
/// checks that the kept ones are the N* farthest from μ.
fn peripheral_holds(model: &FittedModel, n: usize, n_star: usize, seeds: &SeedTree) -> CliResult<bool> {
    let mut a = seeds.stream("placement-check");
    let mut b = a.clone();
    let kept = new_coordinates(&model.mu, &model.sigma, n, n_star, Placement::Peripheral, &mut a)?;
    let l = cholesky(&model.sigma)?.l();
    let dist = |p: &[f64]| p.iter().zip(model.mu.iter()).map(|(x, m)| (x - m).powi(2)).sum::<f64>().sqrt();
    let min_kept = kept.rows().map(dist).fold(f64::INFINITY, f64::min);
    let mut dropped = 0;
    for _ in 0..n + n_star {
        let p = sample_mvn(&mut b, &model.mu, &l);
        if !kept.rows().any(|q| q == p.as_slice()) {
            dropped += 1;
            if dist(p.as_slice()) > min_kept {
                return Ok(false);
            }
        }
    }
    Ok(dropped == n)
}

fn histogram_csv(reps: &[DegreeVector], orders: impl Iterator<Item = usize> + Clone) -> String {
    let top = reps
        .iter()
        .flat_map(|d| orders.clone().flat_map(move |k| d.column(k)))
        .max()
        .unwrap_or(0);
    let mut s = String::from("rep,order");
    for x in 0..=top {
        s.push_str(&format!(",deg_{x}"));
    }
    s.push('\n');
    for (i, d) in reps.iter().enumerate() {
        for k in orders.clone() {
            let mut h = vec![0usize; top + 1];
            for x in d.column(k) {
                h[x] += 1;
            }
            s.push_str(&format!("{i},{k},{}\n", h.iter().map(usize::to_string).collect::<Vec<_>>().join(",")));
        }
    }
    s
}

pub fn run(cfg: &RunConfig, seed: u64) -> CliResult<()> {
    let h = super::input(cfg)?;
    let fit_dir = cfg
        .path("fit_dir")?
        .or(cfg.path("out_dir")?)
        .unwrap_or_else(|| PathBuf::from("."));
    let fitted = load_fit(&fit_dir, h.n_nodes())?;
    if fitted.radii.max_order() != h.max_order() {
        return Err(CliError::Data("fit and input cover different orders".into()));
    }
    let n_star: usize = cfg.get_or("n_star", 10)?;
    let n_rep: usize = cfg.get_or("n_rep", 100)?;
    let qq_points: usize = cfg.get_or("qq_points", 50)?;
    let placement = model::placement(cfg.raw("placement").unwrap_or("gaussian"))?;
    let specs = match cfg.list::<String>("motifs")? {
        Some(names) => motifs_by_name(&names.iter().map(String::as_str).collect::<Vec<_>>()).map_err(|e| RunConfig::error("motifs", e))?,
        None => default_motifs(),
    };
    let prior_check = cfg.bool_or("prior_check", false)?;
    let seeds = SeedTree::new(seed);
    let n = h.n_nodes();
    let k = h.max_order();

    let degrees = predictive_degrees(&h, &fitted, n_star, n_rep, placement, &seeds)?;
    let motifs = predictive_motifs(&h, &fitted, n_star, n_rep, &specs, placement, &seeds)?;

    let (reference, reference_kind) = if prior_check {
        let prior = model::latent_prior(cfg)?;
        let radii = model::radii(cfg)?;
        let noise = model::noise(cfg, radii.max_order())?;
        if radii.max_order() != k {
            return Err(RunConfig::error("radii", "the prior model must cover the input's orders"));
        }
        (prior_predictive_degrees(&prior, &radii, &noise, n + n_star, n_rep, &seeds.child("prior", 0))?, "prior_predictive")
    } else {
        (vec![degree_sequence(&h)], "observed")
    };

    let mut out = super::outputs(cfg)?;
    out.write("predictive_degrees.csv", &histogram_csv(&degrees, 2..=k))?;
    let mut m = String::from("rep,motif,new,total\n");
    for (i, r) in motifs.iter().enumerate() {
        for (j, spec) in specs.iter().enumerate() {
            m.push_str(&format!("{i},{},{},{}\n", spec.name, r.new[j], r.total[j]));
        }
    }
    out.write("predictive_motifs.csv", &m)?;

    let mut qq = format!("order,prob,{reference_kind},posterior_predictive\n");
    let mut gaps = Vec::new();
    for kk in 2..=k {
        let rows = qq_table(&pooled_degrees(&reference, kk), &pooled_degrees(&degrees, kk), qq_points);
        gaps.push(format!("{:.6}", median_qq_gap(&rows)));
        for row in rows {
            qq.push_str(&format!("{kk},{},{},{}\n", row.prob, row.a, row.b));
        }
    }
    out.write("qq.csv", &qq)?;

    out.note("n_star", n_star);
    out.note("n_rep", n_rep);
    out.note("qq_reference", reference_kind);
    out.note("median_qq_gap_per_order", gaps.join(","));
    match placement {
        Placement::Gaussian => out.note("placement", "gaussian"),
        Placement::Peripheral => {
            out.note("placement", "peripheral");
            let ok = n_star == 0 || peripheral_holds(&fitted, n, n_star, &seeds)?;
            out.note(
                "placement_invariant",
                if ok { "verified: new nodes are the N* farthest of N+N* draws" } else { "VIOLATED" },
            );
            if !ok {
                return Err(CliError::Numeric("peripheral placement check failed".into()));
            }
        }
    }
    out.finish("predict", cfg, seed)
}
