//! Expressibility and entangling capability of parametrized circuits.
//!
//! Expressibility is the Jensen-Shannon distance (base-2, so it lies in `[0, 1]`) between the
//! histogram of pairwise state fidelities and the Haar fidelity law
//! `P(F) = (N - 1)(1 - F)^(N - 2)`, integrated exactly over each bin. Entangling capability is the
//! Meyer-Wallach measure `2 (1 - mean_k Tr rho_k^2)` averaged over uniform parameter draws.

use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::Circuit;
use crate::error::{Error, Result};
use crate::seeding::{self, Purpose};

pub const DEFAULT_SAMPLES: usize = 5000;
pub const DEFAULT_BINS: usize = 75;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub n_samples: usize,
    pub n_bins: usize,
    pub seed: u64,
}

impl SamplingConfig {
    pub fn new(seed: u64) -> Self {
        SamplingConfig {
            n_samples: DEFAULT_SAMPLES,
            n_bins: DEFAULT_BINS,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::Argument("n_samples must be >= 1".into()));
        }
        if self.n_bins == 0 {
            return Err(Error::Argument("n_bins must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FidelityHistogram {
    pub n_bins: usize,
    pub counts: Vec<u64>,
    pub n_samples: usize,
}

impl FidelityHistogram {
    pub fn from_fidelities(fids: &[f64], n_bins: usize) -> Self {
        let mut counts = vec![0u64; n_bins];
        for &f in fids {
            counts[bin_of(f, n_bins)] += 1;
        }
        FidelityHistogram {
            n_bins,
            counts,
            n_samples: fids.len(),
        }
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let total: u64 = self.counts.iter().sum();
        self.counts.iter().map(|&c| c as f64 / total as f64).collect()
    }
}

fn bin_of(f: f64, n_bins: usize) -> usize {
    let f = f.clamp(0.0, 1.0);
    ((f * n_bins as f64) as usize).min(n_bins - 1)
}

/// Haar probability mass of fidelity bin `bin` (of `n_bins` uniform bins on `[0, 1]`) for
/// Hilbert-space dimension `dim`.
pub fn haar_fidelity_bin_mass(bin: usize, n_bins: usize, dim: usize) -> Result<f64> {
    if dim < 2 {
        return Err(Error::Argument(format!("Hilbert dimension must be >= 2, got {dim}")));
    }
    if bin >= n_bins {
        return Err(Error::Index(format!("bin {bin} out of range for {n_bins} bins")));
    }
    let lo = bin as f64 / n_bins as f64;
    let hi = (bin + 1) as f64 / n_bins as f64;
    let e = (dim - 1) as i32;
    // antiderivative of (N-1)(1-F)^(N-2) is -(1-F)^(N-1)
    Ok((1.0 - lo).powi(e) - (1.0 - hi).powi(e))
}

pub fn haar_bin_masses(n_bins: usize, dim: usize) -> Result<Vec<f64>> {
    (0..n_bins).map(|b| haar_fidelity_bin_mass(b, n_bins, dim)).collect()
}

fn random_params(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.0..TAU)).collect()
}

/// Fidelities of `n_samples` independent state pairs, in sample order.
pub fn sample_fidelities(circuit: &Circuit, n_samples: usize, seed: u64) -> Result<Vec<f64>> {
    (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeding::stream(seed, Purpose::FidelityPairs, i as u64);
            let theta = random_params(circuit.n_params, &mut rng);
            let phi = random_params(circuit.n_params, &mut rng);
            let a = circuit.run_from_zero(&theta)?;
            let b = circuit.run_from_zero(&phi)?;
            a.fidelity(&b)
        })
        .collect()
}

pub fn sample_fidelity_histogram(circuit: &Circuit, config: &SamplingConfig) -> Result<FidelityHistogram> {
    config.validate()?;
    let fids = sample_fidelities(circuit, config.n_samples, config.seed)?;
    Ok(FidelityHistogram::from_fidelities(&fids, config.n_bins))
}

/// Base-2 Jensen-Shannon divergence of two discrete distributions. Zero-probability terms
/// contribute nothing.
pub fn jensen_shannon_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Shape(format!("distributions of length {} and {}", p.len(), q.len())));
    }
    let kl_to_mid = |x: f64, m: f64| if x > 0.0 { x * (x / m).log2() } else { 0.0 };
    let js: f64 = p
        .iter()
        .zip(q)
        .map(|(&a, &b)| {
            let m = 0.5 * (a + b);
            0.5 * kl_to_mid(a, m) + 0.5 * kl_to_mid(b, m)
        })
        .sum();
    Ok(js.max(0.0))
}

pub fn jensen_shannon_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    Ok(jensen_shannon_divergence(p, q)?.sqrt())
}

pub fn expressibility_of_histogram(hist: &FidelityHistogram, dim: usize) -> Result<f64> {
    let haar = haar_bin_masses(hist.n_bins, dim)?;
    jensen_shannon_distance(&hist.frequencies(), &haar)
}

/// Lower is more expressive.
pub fn expressibility(circuit: &Circuit, config: &SamplingConfig) -> Result<f64> {
    let hist = sample_fidelity_histogram(circuit, config)?;
    expressibility_of_histogram(&hist, 1 << circuit.n_qubits)
}

/// Meyer-Wallach entanglement of one parameter setting.
pub fn meyer_wallach(circuit: &Circuit, params: &[f64]) -> Result<f64> {
    let s = circuit.run_from_zero(params)?;
    let n = circuit.n_qubits;
    let mut purity = 0.0;
    for k in 0..n {
        purity += s.reduced_density_single(k)?.purity();
    }
    Ok(2.0 * (1.0 - purity / n as f64))
}

pub fn entangling_capability(circuit: &Circuit, n_samples: usize, seed: u64) -> Result<f64> {
    if circuit.n_qubits < 2 {
        return Err(Error::Argument("entangling capability needs at least 2 qubits".into()));
    }
    if n_samples == 0 {
        return Err(Error::Argument("n_samples must be >= 1".into()));
    }
    let values = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeding::stream(seed, Purpose::Entanglement, i as u64);
            meyer_wallach(circuit, &random_params(circuit.n_params, &mut rng))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.iter().sum::<f64>() / n_samples as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub layout: String,
    pub block: String,
    pub layers: usize,
    pub n_qubits: usize,
    pub n_params: usize,
    pub config: SamplingConfig,
    pub expressibility: f64,
    pub entangling_capability: f64,
}

pub const REPORT_CSV_HEADER: &str =
    "layout,block,layers,n_samples,n_bins,seed,expressibility,entangling_capability";

impl AnalysisReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.12},{:.12}",
            self.layout,
            self.block,
            self.layers,
            self.config.n_samples,
            self.config.n_bins,
            self.config.seed,
            self.expressibility,
            self.entangling_capability
        )
    }
}

pub fn analyze(circuit: &Circuit, config: &SamplingConfig) -> Result<AnalysisReport> {
    Ok(AnalysisReport {
        layout: circuit.layout.to_string(),
        block: circuit.block.map(|b| b.to_string()).unwrap_or_else(|| "none".into()),
        layers: circuit.layers,
        n_qubits: circuit.n_qubits,
        n_params: circuit.n_params,
        config: *config,
        expressibility: expressibility(circuit, config)?,
        entangling_capability: entangling_capability(circuit, config.n_samples, config.seed)?,
    })
}
