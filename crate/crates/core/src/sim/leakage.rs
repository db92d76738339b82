//! Information leaked to the eavesdropper, from exact message posteriors.

use super::scheme::{covering_pairs, encode, transmit_rows, Codebook, SimConfig};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_for};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest number of `(s0, s1, s2)` index triples enumerated per posterior.
pub const POSTERIOR_CAP: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Leakage {
    /// Estimated `I(W0 W1 W2; Z^n) / n` in bits.
    pub rate: f64,
    /// Monte Carlo standard error of `rate`.
    pub stderr: f64,
    pub samples: usize,
}

/// One reachable codeword triple with its encoder probability given the message.
struct Branch {
    s: [usize; 3],
    message: usize,
    log_weight: f64,
}

/// Every triple the encoder can emit, weighted by the probability that it
/// is emitted for its own message.
fn branches(cb: &Codebook, cfg: &SimConfig) -> Vec<Branch> {
    let lay = &cb.layout;
    let delta = cfg.delta();
    (0..lay.q_words())
        .into_par_iter()
        .flat_map_iter(|s0| {
            let mut out = Vec::new();
            let w0 = s0 % lay.bins0;
            let base = -((lay.per_bin0 * lay.subbins[0] * lay.subbins[1]) as f64).ln();
            for w1 in 0..lay.bins[0] {
                for w2 in 0..lay.bins[1] {
                    let message = (w0 * lay.bins[0] + w1) * lay.bins[1] + w2;
                    for l1 in 0..lay.subbins[0] {
                        for l2 in 0..lay.subbins[1] {
                            let mut pairs = covering_pairs(cb, s0, [w1, w2], [l1, l2], delta);
                            if pairs.is_empty() {
                                pairs = (0..lay.per_subbin[0])
                                    .flat_map(|a| (0..lay.per_subbin[1]).map(move |b| (a, b)))
                                    .collect();
                            }
                            let lw = base - (pairs.len() as f64).ln();
                            out.extend(pairs.into_iter().map(|(m1, m2)| Branch {
                                s: [s0, lay.u_index(0, w1, l1, m1), lay.u_index(1, w2, l2, m2)],
                                message,
                                log_weight: lw,
                            }));
                        }
                    }
                }
            }
            out
        })
        .collect()
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Monte Carlo estimate of `I(W; Z^n) / n` for uniformly drawn message
/// triples. For each sampled `z^n` the posterior over messages is computed
/// exactly by enumerating every cloud word, sub-bin choice and covering
/// pair the encoder could have used.
pub fn estimate_leakage(cb: &Codebook, cfg: &SimConfig, samples: usize, seed: u64) -> Result<Leakage> {
    let lay = &cb.layout;
    let triples = lay.q_words().saturating_mul(lay.u_words(0)).saturating_mul(lay.u_words(1));
    if triples > POSTERIOR_CAP {
        return Err(Error::CapExceeded(format!("{triples} codeword triples exceed {POSTERIOR_CAP}")));
    }
    if samples < 2 {
        return Err(Error::InvalidArgument("leakage estimation needs at least 2 samples".into()));
    }
    let m = lay.messages();
    let h_w = (m as f64).log2();
    if m == 1 {
        return Ok(Leakage { rate: 0.0, stderr: 0.0, samples });
    }
    let branches = branches(cb, cfg);
    let laws = &cb.laws;
    let nz = laws.out_sizes[2];
    let (_, n2, _) = cfg.channel.output_sizes();
    let log_g: Vec<f64> = laws.z_given_quu.iter().map(|p| p.ln()).collect();

    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let trial = derive_seed(seed, i as u64);
            let mut rng = rng_for(trial, 2);
            let w =
                [rng.random_range(0..lay.bins0), rng.random_range(0..lay.bins[0]), rng.random_range(0..lay.bins[1])];
            let enc = encode(cb, cfg, w, trial)?;
            let (_, _, z) = transmit_rows(&enc.x, &laws.out_rows, n2, nz, trial)?;
            let mut per_message: Vec<Vec<f64>> = vec![Vec::new(); m];
            for b in &branches {
                let (q, u1, u2) = (cb.q_word(b.s[0]), cb.u_word(0, b.s[0], b.s[1]), cb.u_word(1, b.s[0], b.s[2]));
                let mut ll = b.log_weight;
                for k in 0..lay.n {
                    ll += log_g[laws.cell(q[k], u1[k], u2[k]) * nz + z[k] as usize];
                    if ll == f64::NEG_INFINITY {
                        break;
                    }
                }
                per_message[b.message].push(ll);
            }
            let log_post: Vec<f64> = per_message.iter().map(|v| log_sum_exp(v)).collect();
            let norm = log_sum_exp(&log_post);
            let h_post: f64 = log_post
                .iter()
                .map(|&lp| {
                    let p = (lp - norm).exp();
                    if p > 0.0 {
                        -p * (lp - norm) / std::f64::consts::LN_2
                    } else {
                        0.0
                    }
                })
                .sum();
            Ok(h_w - h_post)
        })
        .collect::<Result<_>>()?;
    let s = samples as f64;
    let mean = values.iter().sum::<f64>() / s;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (s - 1.0);
    let n = lay.n as f64;
    Ok(Leakage { rate: mean / n, stderr: (var / s).sqrt() / n, samples })
}
