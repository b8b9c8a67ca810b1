use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn lsh(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lsh"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("run lsh")
}

fn ok(o: &Output) {
    assert!(
        o.status.success(),
        "exit {:?}\nstdout:\n{}\nstderr:\n{}",
        o.status.code(),
        String::from_utf8_lossy(&o.stdout),
        String::from_utf8_lossy(&o.stderr)
    );
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const TOY: &str = "# five nodes\nnodes=5 max_order=3\n0,1\n1,2\n0,2\n2,3\n0,1,2\n3,4\n";

fn toy_dir() -> TempDir {
    let t = TempDir::new().unwrap();
    std::fs::write(t.path().join("toy.txt"), TOY).unwrap();
    t
}

const TOY_FIT: &[&str] = &[
    "--set", "input=toy.txt",
    "--set", "iterations=50",
    "--set", "burn_in=25",
    "--set", "thin_latent=5",
    "--set", "blocks=2",
];

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

fn manifest(dir: &Path, command: &str) -> BTreeMap<String, String> {
    std::fs::read_to_string(dir.join(format!("{command}.manifest.txt")))
        .unwrap()
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

#[test]
fn toy_fit_produces_a_complete_report() {
    let t = toy_dir();
    let mut args = vec!["fit", "-o", "fit"];
    args.extend_from_slice(TOY_FIT);
    ok(&lsh(&args, t.path()));
    let out = t.path().join("fit");
    let report = std::fs::read_to_string(out.join("report.txt")).unwrap();
    for needle in ["mu     =", "sigma  =", "radii  =", "phi    =", "order 2:", "order 3:", "acceptance rates"] {
        assert!(report.contains(needle), "report lacks {needle:?}:\n{report}");
    }
    let trace = std::fs::read_to_string(out.join("trace_chain0.csv")).unwrap();
    let mut lines = trace.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("iteration,loglik,mu_1,mu_2,sigma_11,sigma_12,sigma_22,r_2,r_3,psi0_2,psi0_3,psi1_2,psi1_3,accept_r,accept_u_1"));
    let width = header.split(',').count();
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 50);
    assert!(rows.iter().all(|r| r.split(',').count() == width));
    let latents = std::fs::read_to_string(out.join("posterior_latents.csv")).unwrap();
    assert_eq!(latents.lines().count(), 6);
    let m = manifest(&out, "fit");
    assert_eq!(m["command"], "fit");
    assert_eq!(m["seed"], "1");
    assert_eq!(m["config_sha256"].len(), 64);
    assert!(m.contains_key("version"));
}

#[test]
fn missing_input_is_a_data_error() {
    let t = TempDir::new().unwrap();
    let o = lsh(&["fit", "--set", "input=nope.txt", "-o", "x"], t.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("nope.txt"));
    let o = lsh(&["summarize", "nope.txt"], t.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn config_errors_name_the_key() {
    let t = TempDir::new().unwrap();
    std::fs::write(t.path().join("c.cfg"), "n = 10\nradius = 0.3\n").unwrap();
    let o = lsh(&["simulate", "-c", "c.cfg"], t.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`radius`"));

    let o = lsh(&["simulate", "--set", "n=10", "--set", "radii=0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"], t.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("size limit"), "{}", stderr(&o));

    let o = lsh(&["simulate", "--set", "n=abc", "--set", "radii=0.1"], t.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`n`"));
}

#[test]
fn simulate_lsh_case_writes_hypergraph_and_coordinates() {
    let t = TempDir::new().unwrap();
    std::fs::write(
        t.path().join("case2.cfg"),
        "# no correlation in sigma\nn = 50\nmu = 0,0\nsigma = 0.25,0,0,0.25\nradii = 0.18,0.3,0.35\nphi = 0.01\n",
    )
    .unwrap();
    ok(&lsh(&["simulate", "-c", "case2.cfg", "-o", "s"], t.path()));
    let s = t.path().join("s");
    let h = std::fs::read_to_string(s.join("hypergraph.txt")).unwrap();
    assert!(h.starts_with("nodes=50 max_order=4"));
    assert_eq!(std::fs::read_to_string(s.join("latents.csv")).unwrap().lines().count(), 51);
    let eff = std::fs::read_to_string(s.join("simulate.config.txt")).unwrap();
    assert!(eff.contains("seed=1") && eff.contains("radii=0.18,0.3,0.35"));
}

#[test]
fn baseline_models_simulate() {
    let t = TempDir::new().unwrap();
    ok(&lsh(&["simulate", "--model", "beta", "--set", "n=12", "--set", "beta_case=2", "--set", "max_order=3", "-o", "b"], t.path()));
    assert!(std::fs::read_to_string(t.path().join("b/hypergraph.txt")).unwrap().starts_with("nodes=12 max_order=3"));
    ok(&lsh(
        &["simulate", "--model", "lca", "--set", "n=30", "--set", "lca_case=2", "--set", "lca_edges=40", "-o", "l"],
        t.path(),
    ));
    let members = std::fs::read_to_string(t.path().join("l/lca_memberships.csv")).unwrap();
    assert_eq!(members.lines().count(), 41);
    let o = lsh(&["simulate", "--model", "beta", "--set", "n=200", "--set", "beta=0", "--set", "max_order=6", "--set", "max_order_limit=6"], t.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn predict_without_new_nodes_reproduces_observed_degrees() {
    let t = toy_dir();
    let mut args = vec!["fit", "-o", "fit"];
    args.extend_from_slice(TOY_FIT);
    ok(&lsh(&args, t.path()));
    ok(&lsh(
        &["predict", "--set", "input=toy.txt", "--set", "fit_dir=fit", "--set", "n_star=0", "--set", "n_rep=4", "-o", "p"],
        t.path(),
    ));
    let csv = std::fs::read_to_string(t.path().join("p/predictive_degrees.csv")).unwrap();
    // toy degrees: order 2 = (2,2,3,2,1), order 3 = (1,1,1,0,0)
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 8);
    for r in rows {
        let f: Vec<&str> = r.splitn(3, ',').collect();
        match f[1] {
            "2" => assert_eq!(f[2], "0,1,3,1"),
            "3" => assert_eq!(f[2], "2,3,0,0"),
            _ => panic!("{r}"),
        }
    }
    let motifs = std::fs::read_to_string(t.path().join("p/predictive_motifs.csv")).unwrap();
    assert!(motifs.lines().skip(1).all(|l| l.split(',').nth(2) == Some("0")));
}

#[test]
fn predict_peripheral_records_the_placement_check_and_qq() {
    let t = toy_dir();
    let mut args = vec!["fit", "-o", "fit"];
    args.extend_from_slice(TOY_FIT);
    ok(&lsh(&args, t.path()));
    ok(&lsh(
        &["predict", "--set", "input=toy.txt", "--set", "n_rep=10", "--placement", "peripheral", "-o", "fit"],
        t.path(),
    ));
    let m = manifest(&t.path().join("fit"), "predict");
    assert_eq!(manifest(&t.path().join("fit"), "fit")["command"], "fit");
    assert_eq!(m["placement"], "peripheral");
    assert!(m["placement_invariant"].starts_with("verified"));
    let qq = std::fs::read_to_string(t.path().join("fit/qq.csv")).unwrap();
    assert!(qq.starts_with("order,prob,observed,posterior_predictive"));
    assert_eq!(qq.lines().count(), 1 + 2 * 50);
}

#[test]
fn predict_needs_fit_artifacts() {
    let t = toy_dir();
    let o = lsh(&["predict", "--set", "input=toy.txt", "-o", "empty"], t.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("posterior.txt"));
}

#[test]
fn theory_sweep_is_monotone_and_ordered() {
    let t = TempDir::new().unwrap();
    ok(&lsh(
        &["theory", "--set", "theory_orders=2,3,4", "--set", "theory_radii=0.3,0.6,0.9,1.2", "--set", "theory_samples=20000", "-o", "th"],
        t.path(),
    ));
    let csv = std::fs::read_to_string(t.path().join("th/theory_sweep.csv")).unwrap();
    let mut p: BTreeMap<(usize, String), (f64, f64)> = BTreeMap::new();
    for l in csv.lines().skip(1) {
        let f: Vec<&str> = l.split(',').collect();
        p.insert((f[0].parse().unwrap(), f[1].to_string()), (f[2].parse().unwrap(), f[3].parse().unwrap()));
    }
    let radii = ["0.3", "0.6", "0.9", "1.2"];
    for k in 2..=4 {
        for w in radii.windows(2) {
            assert!(p[&(k, w[1].to_string())].0 > p[&(k, w[0].to_string())].0);
        }
    }
    for r in radii {
        for k in 2..4 {
            let (a, sa) = p[&(k, r.to_string())];
            let (b, sb) = p[&(k + 1, r.to_string())];
            assert!(a - b > -3.0 * (sa * sa + sb * sb).sqrt());
        }
    }
    ok(&lsh(&["theory", "--set", "theory_radii=", "-o", "empty"], t.path()));
    assert_eq!(std::fs::read_to_string(t.path().join("empty/theory_sweep.csv")).unwrap(), "k,r,p_hat,std_err\n");
}

#[test]
fn theory_writes_pmf_tables() {
    let t = TempDir::new().unwrap();
    ok(&lsh(
        &["theory", "--set", "n=20", "--set", "radii=0.1,0.15", "--set", "phi=0.01,0.001", "--set", "theory_reps=300", "--set", "theory_radii=", "-o", "th"],
        t.path(),
    ));
    for k in [2, 3] {
        let csv = std::fs::read_to_string(t.path().join(format!("th/theory_pmf_order{k}.csv"))).unwrap();
        assert!(csv.starts_with("degree,pmf,empirical\n"));
        let (mut a, mut b) = (0.0, 0.0);
        for l in csv.lines().skip(1) {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            a += f[1];
            b += f[2];
        }
        assert!((a - 1.0).abs() < 1e-9 && (b - 1.0).abs() < 1e-9);
    }
    let m = manifest(&t.path().join("th"), "theory");
    assert!(m.contains_key("tv_order2") && m.contains_key("tv_order3"));
}

#[test]
fn summarize_prints_and_writes_csv() {
    let t = toy_dir();
    let o = lsh(&["summarize", "toy.txt", "--csv", "s.csv"], t.path());
    ok(&o);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("order 2 hyperedges") && text.contains("triangle"));
    let csv = std::fs::read_to_string(t.path().join("s.csv")).unwrap();
    assert!(csv.contains("motif_triangle,1\n"));
    assert!(csv.contains("density_order3,0.1\n"));
}

#[test]
fn init_writes_coordinates_and_parameters() {
    let t = toy_dir();
    ok(&lsh(&["init", "--set", "input=toy.txt", "-o", "i"], t.path()));
    let p = std::fs::read_to_string(t.path().join("i/init_params.txt")).unwrap();
    for key in ["mu=", "sigma=", "radii=", "psi0=", "anchors="] {
        assert!(p.contains(key));
    }
    assert_eq!(std::fs::read_to_string(t.path().join("i/init_latents.csv")).unwrap().lines().count(), 6);
}

fn run_twice(cmds: &[Vec<&str>], out_flag_dir: &str) -> (BTreeMap<String, Vec<u8>>, BTreeMap<String, Vec<u8>>) {
    let mut results = Vec::new();
    for _ in 0..2 {
        let t = toy_dir();
        for c in cmds {
            ok(&lsh(c, t.path()));
        }
        results.push(files(&PathBuf::from(t.path()).join(out_flag_dir)));
    }
    let b = results.pop().unwrap();
    (results.pop().unwrap(), b)
}

#[test]
fn every_command_is_deterministic() {
    let mut fit = vec!["fit", "-o", "o", "--chains", "2", "--seed", "9"];
    fit.extend_from_slice(TOY_FIT);
    let cases: Vec<Vec<Vec<&str>>> = vec![
        vec![vec!["simulate", "--set", "n=25", "--set", "radii=0.3,0.4", "--set", "phi=0.01", "--seed", "5", "-o", "o"]],
        vec![vec!["simulate", "--model", "lca", "--set", "n=20", "--set", "lca_case=4", "--set", "lca_edges=30", "-o", "o"]],
        vec![fit.clone()],
        vec![fit.clone(), vec!["predict", "--set", "input=toy.txt", "--set", "n_rep=8", "-o", "o"]],
        vec![vec!["theory", "--set", "theory_radii=0.5,1", "--set", "n=10", "--set", "radii=0.2,0.3", "--set", "theory_reps=50", "-o", "o"]],
        vec![vec!["init", "--set", "input=toy.txt", "-o", "o"]],
        vec![vec!["summarize", "toy.txt", "-o", "o"]],
    ];
    for c in &cases {
        let (a, b) = run_twice(c, "o");
        assert!(!a.is_empty());
        assert_eq!(a, b, "{c:?}");
    }
}
