//! Finite-blocklength Monte Carlo of the superposition, rate-splitting and
//! double-binning scheme: codebook generation, mutual-covering encoding,
//! joint-typicality decoding and exact-posterior leakage estimation.

mod leakage;
mod scheme;
mod typical;

pub use leakage::{estimate_leakage, Leakage, POSTERIOR_CAP};
pub use scheme::{
    compliant_rates, decode, encode, gen_codebook, transmit, Codebook, Encoding, Layout, Rates, SimConfig, AUX_AXES,
    CODEWORD_CAP,
};
pub use typical::{delta_n, is_cond_typical, is_typical};

use crate::error::Result;
use crate::rng::{derive_seed, rng_for};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const TRIAL_STREAM: u64 = 1;
const LEAKAGE_STREAM: u64 = 2;

/// Empirical error frequency with its Wilson 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub errors: usize,
    pub trials: usize,
    pub rate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Proportion {
    pub fn new(errors: usize, trials: usize) -> Self {
        let (lower, upper) = wilson(errors, trials);
        let rate = if trials == 0 { 0.0 } else { errors as f64 / trials as f64 };
        Self { errors, trials, rate, lower, upper }
    }
}

/// Wilson score interval at 95% confidence.
pub fn wilson(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    const Z: f64 = 1.959_963_984_540_054;
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let den = 1.0 + Z * Z / n;
    let centre = (p + Z * Z / (2.0 * n)) / den;
    let half = Z * (p * (1.0 - p) / n + Z * Z / (4.0 * n * n)).sqrt() / den;
    let lower = if k == 0.0 { 0.0 } else { (centre - half).max(0.0) };
    let upper = if k == n { 1.0 } else { (centre + half).min(1.0) };
    (lower, upper)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub n: usize,
    pub layout: Layout,
    pub trials_run: usize,
    /// Errors of user 1 on `(W0, W1)`; encoding failures count as errors.
    pub pe1: Proportion,
    pub pe2: Proportion,
    /// Fraction of trials in which no jointly typical satellite pair existed.
    pub enc_fail_rate: f64,
    /// `None` when `leakage_samples` is zero.
    pub leakage: Option<Leakage>,
    /// Per-trial outcomes in trial order; not serialized.
    #[serde(skip)]
    pub log: Vec<Trial>,
}

/// Outcome of a single trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trial {
    pub message: [usize; 3],
    /// A jointly typical satellite pair was found.
    pub covered: bool,
    /// Receiver `j` recovered `(W0, Wj)`.
    pub ok: [bool; 2],
}

/// Generates the codebook of `cfg`, runs `cfg.trials` independent
/// transmissions of uniform message triples and estimates leakage.
pub fn run(cfg: &SimConfig) -> Result<SimResult> {
    let cb = gen_codebook(cfg)?;
    let lay = &cb.layout;
    let base = derive_seed(cfg.seed, TRIAL_STREAM);
    let outcomes: Vec<Trial> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(base, t as u64);
            let mut rng = rng_for(seed, 2);
            let w =
                [rng.random_range(0..lay.bins0), rng.random_range(0..lay.bins[0]), rng.random_range(0..lay.bins[1])];
            let enc = encode(&cb, cfg, w, seed)?;
            let (y1, y2, _) = transmit(&enc.x, &cfg.channel, seed)?;
            let d1 = decode(&cb, cfg, 1, &y1)?;
            let d2 = decode(&cb, cfg, 2, &y2)?;
            Ok(Trial {
                message: w,
                covered: enc.covered,
                ok: [enc.covered && d1 == Some((w[0], w[1])), enc.covered && d2 == Some((w[0], w[2]))],
            })
        })
        .collect::<Result<_>>()?;
    let errs = |j: usize| outcomes.iter().filter(|t| !t.ok[j]).count();
    let fails = outcomes.iter().filter(|t| !t.covered).count();
    let leakage = if cfg.leakage_samples == 0 {
        None
    } else {
        Some(estimate_leakage(&cb, cfg, cfg.leakage_samples, derive_seed(cfg.seed, LEAKAGE_STREAM))?)
    };
    Ok(SimResult {
        n: cfg.n,
        layout: lay.clone(),
        trials_run: cfg.trials,
        pe1: Proportion::new(errs(0), cfg.trials),
        pe2: Proportion::new(errs(1), cfg.trials),
        enc_fail_rate: if cfg.trials == 0 { 0.0 } else { fails as f64 / cfg.trials as f64 },
        leakage,
        log: outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::scheme::tests::{aux_from, config, rates};
    use super::*;
    use crate::probcore::{make_bsc, WiretapBc};

    #[test]
    fn wilson_interval() {
        let (lo, hi) = wilson(0, 100);
        assert_eq!(lo, 0.0);
        assert_eq!(wilson(7, 7).1, 1.0);
        assert!((hi - 0.036_994).abs() < 1e-5);
        let (lo, hi) = wilson(50, 100);
        assert!((lo - 0.403_832).abs() < 1e-5 && (hi - 0.596_168).abs() < 1e-5);
    }

    #[test]
    fn single_message_run() {
        let w = make_bsc(0.05).unwrap();
        let ch = WiretapBc::new(w.clone(), w.clone(), w).unwrap();
        let mut cfg = config(ch, aux_from([[0.25, 0.25], [0.25, 0.25]]), 60, rates([0.0; 3], [0.0; 3], [0.0; 2]));
        cfg.trials = 50;
        let r = run(&cfg).unwrap();
        assert_eq!(r.pe1.errors, 0);
        assert_eq!(r.pe2.errors, 0);
        assert_eq!(r.leakage.unwrap().rate, 0.0);
        assert_eq!(run(&cfg).unwrap(), r);
    }

    #[test]
    fn rate_above_mutual_information_fails() {
        // I(U1;Y1) = 1 - h2(0.3) ~ 0.12, code rate 0.2
        let w = make_bsc(0.3).unwrap();
        let ch = WiretapBc::new(w.clone(), w.clone(), w).unwrap();
        let mut cfg =
            config(ch, aux_from([[0.25, 0.25], [0.25, 0.25]]), 60, rates([0.0, 0.2, 0.0], [0.0, 0.2, 0.0], [0.0; 2]));
        cfg.trials = 100;
        cfg.leakage_samples = 0;
        let r = run(&cfg).unwrap();
        assert!(r.pe1.rate >= 0.5, "{:?}", r.pe1);
        assert!(r.leakage.is_none());
    }
}
