use std::path::Path;

use lsh_core::predictive::{default_motifs, motifs_by_name, summarize, SummaryPanel, PERCENTILES};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

fn pct(v: &[f64; 5]) -> String {
    v.iter().map(|x| format!("{x:>8.2}")).collect::<String>()
}

fn text(p: &SummaryPanel, n: usize, k: usize, edges: &[usize]) -> String {
    let mut s = String::new();
    s.push_str(&format!("{:<28}{n}\n", "nodes"));
    s.push_str(&format!("{:<28}{k}\n", "max order"));
    for (i, (e, dens)) in edges.iter().zip(&p.densities).enumerate() {
        s.push_str(&format!("{:<28}{e:>8}  density {dens:.6}\n", format!("order {} hyperedges", i + 2)));
    }
    s.push_str(&format!("{:<28}{}\n", "percentiles", PERCENTILES.iter().map(|q| format!("{:>8}", format!("p{q}"))).collect::<String>()));
    s.push_str(&format!("{:<28}{}\n", "  total degree", pct(&p.degree_percentiles)));
    for (i, v) in p.degree_percentiles_by_order.iter().enumerate() {
        s.push_str(&format!("{:<28}{}\n", format!("  order {} degree", i + 2), pct(v)));
    }
    s.push_str(&format!("{:<28}{}\n", "  hyperedge order", pct(&p.order_percentiles)));
    s.push_str("motifs\n");
    for (name, c) in &p.motifs {
        s.push_str(&format!("  {name:<26}{c:>8}\n"));
    }
    s
}

fn csv(p: &SummaryPanel) -> String {
    let mut s = String::from("statistic,value\n");
    for (i, d) in p.densities.iter().enumerate() {
        s.push_str(&format!("density_order{},{d}\n", i + 2));
    }
    for (q, v) in PERCENTILES.iter().zip(&p.degree_percentiles) {
        s.push_str(&format!("degree_p{q},{v}\n"));
    }
    for (i, vs) in p.degree_percentiles_by_order.iter().enumerate() {
        for (q, v) in PERCENTILES.iter().zip(vs) {
            s.push_str(&format!("degree_order{}_p{q},{v}\n", i + 2));
        }
    }
    for (q, v) in PERCENTILES.iter().zip(&p.order_percentiles) {
        s.push_str(&format!("order_p{q},{v}\n"));
    }
    for (name, c) in &p.motifs {
        s.push_str(&format!("motif_{name},{c}\n"));
    }
    s
}

/// Prints the panel; with `out_dir` set also writes summary.txt/.csv and a
/// manifest there.
pub fn run(cfg: &RunConfig, seed: u64, csv_path: Option<&Path>) -> CliResult<()> {
    let p = cfg.path("input")?.expect("set by the caller");
    if !p.exists() {
        return Err(CliError::Data(format!("{} does not exist", p.display())));
    }
    let h = super::input(cfg)?;
    let specs = match cfg.list::<String>("motifs")? {
        Some(names) => motifs_by_name(&names.iter().map(String::as_str).collect::<Vec<_>>()).map_err(|e| RunConfig::error("motifs", e))?,
        None => default_motifs(),
    };
    let panel = summarize(&h, &specs)?;
    let edges: Vec<usize> = h.orders().map(|k| h.n_edges_of_order(k)).collect();
    let t = text(&panel, h.n_nodes(), h.max_order(), &edges);
    print!("{t}");
    if let Some(path) = csv_path {
        std::fs::write(path, csv(&panel))?;
    }
    if cfg.has("out_dir") {
        let mut out = super::outputs(cfg)?;
        out.write("summary.txt", &t)?;
        out.write("summary.csv", &csv(&panel))?;
        out.finish("summarize", cfg, seed)?;
    }
    Ok(())
}
