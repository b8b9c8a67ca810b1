use std::fs::File;
use std::io::{BufWriter, Write};

use lsh_core::geometry::{build_nsrgh_limited, LatentConfiguration, RadiusSchedule};
use lsh_core::inference::{explained_fraction, initialize, run_mcmc_from, PosteriorSummary, PosteriorTrace, TraceRow, TraceSink};
use lsh_core::rng::SeedTree;
use lsh_core::Result as CoreResult;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::model;
use crate::output::{join, latents_csv};

/// Streams rows to CSV while keeping the in-memory trace for the summary.
struct CsvSink {
    trace: PosteriorTrace,
    rows: BufWriter<File>,
    latents: BufWriter<File>,
    header_done: bool,
}

fn trace_header(row: &TraceRow) -> String {
    let d = row.mu.len();
    let mut cols = vec!["iteration".to_string(), "loglik".to_string()];
    cols.extend((1..=d).map(|i| format!("mu_{i}")));
    for i in 1..=d {
        for j in i..=d {
            cols.push(format!("sigma_{i}{j}"));
        }
    }
    let ks = 2..row.radii.len() + 2;
    cols.extend(ks.clone().map(|k| format!("r_{k}")));
    cols.extend(ks.clone().map(|k| format!("psi0_{k}")));
    cols.extend(ks.map(|k| format!("psi1_{k}")));
    cols.push("accept_r".into());
    cols.extend((1..=row.accept_u.len()).map(|l| format!("accept_u_{l}")));
    cols.join(",")
}

impl TraceSink for CsvSink {
    fn record(&mut self, row: &TraceRow) -> CoreResult<()> {
        if !self.header_done {
            writeln!(self.rows, "{}", trace_header(row))?;
            self.header_done = true;
        }
        writeln!(
            self.rows,
            "{},{},{},{},{},{},{},{},{}",
            row.iteration,
            row.loglik,
            join(&row.mu),
            join(&row.sigma),
            join(&row.radii),
            join(&row.psi0),
            join(&row.psi1),
            row.accept_r as u8,
            join(row.accept_u.iter().map(|&b| b as u8)),
        )?;
        self.trace.record(row)
    }

    fn latent(&mut self, iteration: usize, u: &LatentConfiguration) -> CoreResult<()> {
        for (i, r) in u.rows().enumerate() {
            writeln!(self.latents, "{iteration},{i},{}", join(r))?;
        }
        self.trace.latent(iteration, u)
    }
}

fn mean_loglik(t: &PosteriorTrace) -> f64 {
    let kept: Vec<f64> = t.rows.iter().filter(|r| r.iteration > t.burn_in).map(|r| r.loglik).collect();
    if kept.is_empty() {
        f64::NEG_INFINITY
    } else {
        kept.iter().sum::<f64>() / kept.len() as f64
    }
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ")
}

pub fn run(cfg: &RunConfig, seed: u64) -> CliResult<()> {
    let h = super::input(cfg)?;
    let k = h.max_order();
    let d = model::dim(cfg)?;
    let priors = model::priors(cfg, d, k)?;
    let mcfg = model::mcmc(cfg, k)?;
    let chains: usize = cfg.get_or("chains", 1)?;
    if chains == 0 {
        return Err(RunConfig::error("chains", "need at least one chain"));
    }
    let seeds = SeedTree::new(seed);
    let mut out = super::outputs(cfg)?;

    let mut traces = Vec::with_capacity(chains);
    for c in 0..chains {
        // same streams as the library's multi-chain runner
        let mut rng = seeds.child("chain", c as u64).stream("mcmc");
        let init = initialize(&h, &priors, &mcfg, &mut rng)?;
        let trace_name = format!("trace_chain{c}.csv");
        let latent_name = format!("latent_snapshots_chain{c}.csv");
        let mut latents = BufWriter::new(File::create(out.path(&latent_name))?);
        writeln!(latents, "iteration,node,{}", join((1..=d).map(|j| format!("u{j}"))))?;
        let mut sink = CsvSink {
            trace: PosteriorTrace {
                burn_in: mcfg.burn_in,
                ..Default::default()
            },
            rows: BufWriter::new(File::create(out.path(&trace_name))?),
            latents,
            header_done: false,
        };
        run_mcmc_from(&h, &priors, &mcfg, init, &mut rng, &mut sink)?;
        sink.rows.flush()?;
        sink.latents.flush()?;
        out.write_existing(&trace_name);
        out.write_existing(&latent_name);
        traces.push(sink.trace);
    }

    let scores: Vec<f64> = traces.iter().map(mean_loglik).collect();
    let best = (0..chains).fold(0, |b, c| if scores[c] > scores[b] { c } else { b });
    let summaries: Vec<PosteriorSummary> = traces.iter().map(|t| t.summary()).collect::<Result<_, _>>()?;
    let s = &summaries[best];
    let u_hat = s.latents.clone().ok_or_else(|| {
        RunConfig::error("thin_latent", "no latent snapshot after burn-in; lower thin_latent or burn_in")
    })?;
    let radii = RadiusSchedule::new(s.radii.clone()).map_err(|e| CliError::Numeric(format!("posterior mean radii: {e}")))?;
    let g = build_nsrgh_limited(&u_hat, &radii, k)?;
    let explained = explained_fraction(&h, &g)?;

    let mut post = String::new();
    post.push_str(&format!("noise_mode={}\n", if priors.noise.is_symmetric() { "symmetric" } else { "asymmetric" }));
    post.push_str(&format!("chain={best}\n"));
    post.push_str(&format!("mu={}\n", join(s.mu.iter())));
    post.push_str(&format!("sigma={}\n", join(s.sigma.transpose().iter())));
    post.push_str(&format!("radii={}\n", join(&s.radii)));
    post.push_str(&format!("psi0={}\n", join(&s.psi0)));
    post.push_str(&format!("psi1={}\n", join(&s.psi1)));
    out.write("posterior.txt", &post)?;
    out.write("posterior_latents.csv", &latents_csv(&u_hat))?;

    let mut r = String::new();
    r.push_str(&format!("input: {} nodes, orders 2..={k}, {} hyperedges\n", h.n_nodes(), h.n_edges()));
    r.push_str(&format!("chains: {chains}, selected chain {best} (highest mean post-burn-in log-likelihood)\n"));
    for (c, (sum, score)) in summaries.iter().zip(&scores).enumerate() {
        r.push_str(&format!(
            "  chain {c}: mean loglik {score:.4}, radius acceptance {:.4}, latent acceptance [{}]\n",
            sum.accept_r,
            fmt_vec(&sum.accept_u)
        ));
    }
    r.push_str(&format!("\nposterior means over {} retained iterations\n", s.n_rows));
    r.push_str(&format!("mu     = [{}]\n", fmt_vec(s.mu.as_slice())));
    for i in 0..d {
        let row: Vec<f64> = (0..d).map(|j| s.sigma[(i, j)]).collect();
        r.push_str(&format!("{} [{}]\n", if i == 0 { "sigma  =" } else { "        " }, fmt_vec(&row)));
    }
    r.push_str(&format!("radii  = [{}]  (orders 2..={k})\n", fmt_vec(&s.radii)));
    if priors.noise.is_symmetric() {
        r.push_str(&format!("phi    = [{}]\n", fmt_vec(&s.psi0)));
    } else {
        r.push_str(&format!("psi0   = [{}]\n", fmt_vec(&s.psi0)));
        r.push_str(&format!("psi1   = [{}]\n", fmt_vec(&s.psi1)));
    }
    r.push_str("\nexplained fraction (observed hyperedges present in g(U_hat, r_hat))\n");
    for (kk, f) in h.orders().zip(&explained) {
        r.push_str(&format!("  order {kk}: {f:.4} of {}\n", h.n_edges_of_order(kk)));
    }
    r.push_str(&format!("\nacceptance rates: radii {:.4}, latent blocks [{}]\n", s.accept_r, fmt_vec(&s.accept_u)));
    out.write("report.txt", &r)?;

    out.note("chains", chains);
    out.note("selected_chain", best);
    out.note("explained", join(explained.iter().map(|f| format!("{f:.6}"))));
    out.finish("fit", cfg, seed)
}
