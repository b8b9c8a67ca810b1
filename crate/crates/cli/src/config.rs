//! Flat `key = value` run configuration.
//!
//! One setting per line, `#` starts a comment, lists are comma separated and
//! matrices are given row-major. Unknown and repeated keys are rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Every accepted key with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("seed", "root seed for every random stream"),
    ("out_dir", "directory receiving outputs"),
    ("input", "hypergraph file to fit, predict or initialize from"),
    ("fit_dir", "directory holding fit outputs for predict (default out_dir)"),
    ("model", "simulate: lsh, beta or lca"),
    ("n", "number of nodes"),
    ("d", "latent dimension when mu is not given"),
    ("max_order", "maximum hyperedge order K; checked against radii"),
    ("max_order_limit", "refuse K above this (default 6)"),
    ("mu", "latent mean"),
    ("sigma", "latent covariance: scalar, diagonal or full row-major"),
    ("radii", "r_2,...,r_K"),
    ("noise_mode", "symmetric or asymmetric"),
    ("phi", "symmetric flip probabilities per order (scalar broadcasts)"),
    ("psi0", "absent-to-present flip probabilities per order"),
    ("psi1", "present-to-absent flip probabilities per order"),
    ("caps", "upper bounds on the noise parameters per order"),
    ("generator", "latent generator: gaussian, mixture or poisson"),
    ("mixture_weights", "mixture component weights"),
    ("mixture_means", "component means, concatenated"),
    ("mixture_covs", "component covariances, concatenated row-major"),
    ("poisson_lower", "lower corner of the Poisson-process box"),
    ("poisson_upper", "upper corner of the Poisson-process box"),
    ("poisson_intensity", "points per unit volume"),
    ("beta", "beta model: per-node parameters (scalar broadcasts)"),
    ("beta_case", "beta model: study case 1 or 2 instead of beta"),
    ("lca_case", "LCA: study case 1-4"),
    ("lca_blocks", "LCA: sizes of node blocks A,B,C"),
    ("lca_edges", "LCA: number of hyperedges M"),
    ("lca_alpha", "LCA: size weights (last must be 1)"),
    ("lca_phi", "LCA: N x T membership probabilities, row-major"),
    ("lca_pi", "LCA: topic probabilities"),
    ("lca_tau", "LCA: size probabilities"),
    ("prior_mu_mean", "prior mean of mu"),
    ("prior_mu_cov", "prior covariance of mu"),
    ("prior_sigma_scale", "inverse-Wishart scale Phi"),
    ("prior_sigma_dof", "inverse-Wishart degrees of freedom nu"),
    ("prior_radius_rates", "exponential rates lambda_k"),
    ("prior_noise_a", "symmetric noise Beta a_k"),
    ("prior_noise_b", "symmetric noise Beta b_k"),
    ("prior_psi0_a", "asymmetric psi0 Beta a"),
    ("prior_psi0_b", "asymmetric psi0 Beta b"),
    ("prior_psi1_a", "asymmetric psi1 Beta a"),
    ("prior_psi1_b", "asymmetric psi1 Beta b"),
    ("iterations", "MCMC iterations i_max"),
    ("burn_in", "MCMC burn-in"),
    ("blocks", "latent blocks L"),
    ("sigma_u", "latent random-walk step"),
    ("sigma_r", "radius random-walk step"),
    ("thin", "keep every thin-th trace row"),
    ("thin_latent", "keep every thin_latent-th latent snapshot"),
    ("anchors", "Bookstein anchor nodes"),
    ("gmds_weight", "GMDS shortest-path weight"),
    ("abc_samples", "ABC accepted samples"),
    ("abc_epsilon", "ABC tolerance"),
    ("abc_max_attempts", "ABC attempt budget"),
    ("jump_prob", "probability of a neighbour-jump latent move"),
    ("adapt", "tune step sizes during burn-in (true/false)"),
    ("chains", "independent MCMC chains"),
    ("n_star", "new nodes per predictive replicate"),
    ("n_rep", "predictive replicates"),
    ("placement", "gaussian or peripheral"),
    ("motifs", "motif names to count"),
    ("qq_points", "rows of the qq table"),
    ("prior_check", "predict: compare against the prior predictive of the model keys"),
    ("theory_orders", "orders of the connection-probability sweep"),
    ("theory_radii", "radii of the sweep"),
    ("theory_samples", "Monte Carlo samples per sweep point"),
    ("theory_reps", "simulated hypergraphs for the degree pmf tables"),
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

fn known(key: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == key)
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !known(k) {
                return Err(CliError::Config(format!("line {}: unknown key `{k}`", i + 1)));
            }
            if values.insert(k.to_string(), v.to_string()).is_some() {
                return Err(CliError::Config(format!("line {}: key `{k}` given twice", i + 1)));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Applies a `key=value` override.
    pub fn set(&mut self, assignment: &str) -> CliResult<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override `{assignment}` is not key=value")))?;
        let k = k.trim();
        if !known(k) {
            return Err(CliError::Config(format!("unknown key `{k}`")));
        }
        self.values.insert(k.to_string(), v.trim().to_string());
        Ok(())
    }

    pub fn insert(&mut self, key: &str, value: impl ToString) {
        debug_assert!(known(key));
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Sorted `key=value` lines; the form that is echoed and hashed.
    pub fn canonical(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }

    fn bad(key: &str, msg: impl std::fmt::Display) -> CliError {
        CliError::Config(format!("key `{key}`: {msg}"))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Self::bad(key, format!("cannot parse {v:?}"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> CliResult<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> CliResult<T> {
        self.get(key)?.ok_or_else(|| Self::bad(key, "required"))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> CliResult<Option<Vec<T>>> {
        match self.raw(key) {
            None => Ok(None),
            Some("") => Ok(Some(Vec::new())),
            Some(v) => v
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| Self::bad(key, format!("cannot parse {:?}", t.trim()))))
                .collect::<CliResult<Vec<T>>>()
                .map(Some),
        }
    }

    pub fn require_list<T: FromStr>(&self, key: &str) -> CliResult<Vec<T>> {
        self.list(key)?.ok_or_else(|| Self::bad(key, "required"))
    }

    /// A per-order list of length `len`; a single value is broadcast.
    pub fn per_order(&self, key: &str, len: usize) -> CliResult<Option<Vec<f64>>> {
        match self.list::<f64>(key)? {
            None => Ok(None),
            Some(v) if v.len() == 1 => Ok(Some(vec![v[0]; len])),
            Some(v) if v.len() == len => Ok(Some(v)),
            Some(v) => Err(Self::bad(key, format!("expected 1 or {len} values, got {}", v.len()))),
        }
    }

    pub fn path(&self, key: &str) -> CliResult<Option<PathBuf>> {
        Ok(self.raw(key).map(PathBuf::from))
    }

    /// A path that must exist when the command starts; a missing file is a
    /// data error.
    pub fn existing_path(&self, key: &str) -> CliResult<PathBuf> {
        let p = self.path(key)?.ok_or_else(|| Self::bad(key, "required"))?;
        if !p.exists() {
            return Err(CliError::Data(format!("key `{key}`: {} does not exist", p.display())));
        }
        Ok(p)
    }

    pub fn bool_or(&self, key: &str, default: bool) -> CliResult<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => Err(Self::bad(key, format!("expected true or false, got {v:?}"))),
        }
    }

    pub fn error(key: &str, msg: impl std::fmt::Display) -> CliError {
        Self::bad(key, msg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_blank_lines_and_whitespace() {
        let c = RunConfig::parse("# header\n\n n = 20  # nodes\nradii=0.1, 0.2\n").unwrap();
        assert_eq!(c.require::<usize>("n").unwrap(), 20);
        assert_eq!(c.require_list::<f64>("radii").unwrap(), vec![0.1, 0.2]);
        assert_eq!(c.canonical(), "n=20\nradii=0.1, 0.2\n");
    }

    #[test]
    fn unknown_and_repeated_keys_are_rejected() {
        let e = RunConfig::parse("n=3\nnodes=4\n").unwrap_err();
        assert!(e.to_string().contains("`nodes`"));
        assert!(RunConfig::parse("n=3\nn=4\n").is_err());
        assert!(RunConfig::parse("n 3\n").is_err());
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn typed_access_names_the_key() {
        let c = RunConfig::parse("n=abc\nphi=0.1\n").unwrap();
        assert!(c.require::<usize>("n").unwrap_err().to_string().contains("`n`"));
        assert_eq!(c.per_order("phi", 3).unwrap().unwrap(), vec![0.1; 3]);
        assert!(c.per_order("phi", 3).is_ok());
        assert!(c.require::<usize>("iterations").is_err());
    }

    #[test]
    fn hash_ignores_layout() {
        let a = RunConfig::parse("n=3\nseed=1\n").unwrap();
        let b = RunConfig::parse("# x\nseed = 1\nn=3\n").unwrap();
        assert_eq!(a.sha256(), b.sha256());
        assert_eq!(a.sha256().len(), 64);
    }
}
