use crate::error::{Error, Result};
use crate::genmodel::NoiseParams;
use crate::hypercore::{DiscrepancyCounts, OrderCounts};

/// `n · ln p` with `0 · ln 0 = 0`.
fn xlogp(n: u64, p: f64) -> f64 {
    if n == 0 {
        0.0
    } else if p == 0.0 {
        f64::NEG_INFINITY
    } else {
        n as f64 * p.ln()
    }
}

fn check_prob(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("probability {p} outside [0, 1]")))
    }
}

fn check_orders(counts: &DiscrepancyCounts, len: usize) -> Result<()> {
    if counts.max_order() != len + 1 {
        return Err(Error::Dimension(format!(
            "counts cover orders up to {} but {} noise parameters were given",
            counts.max_order(),
            len
        )));
    }
    Ok(())
}

/// Symmetric-noise log-likelihood for one order.
pub fn order_log_likelihood_symmetric(c: &OrderCounts, phi: f64) -> f64 {
    let d = c.d10 + c.d01;
    xlogp(d, phi) + xlogp(c.total() - d, 1.0 - phi)
}

/// Asymmetric-noise log-likelihood for one order.
pub fn order_log_likelihood_asymmetric(c: &OrderCounts, psi0: f64, psi1: f64) -> f64 {
    xlogp(c.d10, psi1) + xlogp(c.d11, 1.0 - psi1) + xlogp(c.d01, psi0) + xlogp(c.d00, 1.0 - psi0)
}

/// `Σ_k [d_k ln φ_k + (C(N,k) − d_k) ln(1 − φ_k)]`, `d_k = d10 + d01`.
pub fn log_likelihood_symmetric(counts: &DiscrepancyCounts, phi: &[f64]) -> Result<f64> {
    check_orders(counts, phi.len())?;
    phi.iter().try_for_each(|&p| check_prob(p))?;
    Ok(counts
        .iter()
        .zip(phi)
        .map(|((_, c), &p)| order_log_likelihood_symmetric(c, p))
        .sum())
}

/// `Σ_k [d10 ln ψ¹ + d11 ln(1−ψ¹) + d01 ln ψ⁰ + d00 ln(1−ψ⁰)]`.
pub fn log_likelihood_asymmetric(counts: &DiscrepancyCounts, psi0: &[f64], psi1: &[f64]) -> Result<f64> {
    check_orders(counts, psi0.len())?;
    check_orders(counts, psi1.len())?;
    psi0.iter().chain(psi1).try_for_each(|&p| check_prob(p))?;
    Ok(counts
        .iter()
        .zip(psi0.iter().zip(psi1))
        .map(|((_, c), (&p0, &p1))| order_log_likelihood_asymmetric(c, p0, p1))
        .sum())
}

/// Dispatches on the noise mode.
pub fn log_likelihood(counts: &DiscrepancyCounts, noise: &NoiseParams) -> Result<f64> {
    if noise.is_symmetric() {
        log_likelihood_symmetric(counts, noise.psi0_all())
    } else {
        log_likelihood_asymmetric(counts, noise.psi0_all(), noise.psi1_all())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercore::{discrepancy_counts, Hypergraph};

    fn three_node() -> DiscrepancyCounts {
        let g = Hypergraph::from_edges(3, 2, [[0, 1]]).unwrap();
        let h = Hypergraph::from_edges(3, 2, [[0, 1], [1, 2]]).unwrap();
        discrepancy_counts(&g, &h).unwrap()
    }

    #[test]
    fn hand_enumerated_instance() {
        let c = three_node();
        let want = 0.081f64.ln();
        assert!((log_likelihood_symmetric(&c, &[0.1]).unwrap() - want).abs() < 1e-14);
        assert!((log_likelihood_asymmetric(&c, &[0.1], &[0.1]).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn half_noise_ignores_counts() {
        let c = three_node();
        let v = log_likelihood_symmetric(&c, &[0.5]).unwrap();
        assert!((v + 3.0 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn boundary_conventions() {
        let g = Hypergraph::from_edges(3, 2, [[0, 1]]).unwrap();
        let c = discrepancy_counts(&g, &g).unwrap();
        assert_eq!(log_likelihood_symmetric(&c, &[0.0]).unwrap(), 0.0);
        assert_eq!(log_likelihood_symmetric(&three_node(), &[0.0]).unwrap(), f64::NEG_INFINITY);
        assert!(log_likelihood_symmetric(&c, &[1.5]).is_err());
        assert!(log_likelihood_symmetric(&c, &[0.1, 0.1]).is_err());
    }
}
