//! Binned superposition codebook, mutual-covering encoder, channel and
//! joint-typicality decoders.

use super::typical::{delta_n, joint_typical};
use crate::error::{Error, Result};
use crate::probcore::{JointPmf, WiretapBc};
use crate::rng::{categorical, derive_seed, rng_for};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest number of stored codewords, `N0 (1 + N1 + N2)`.
pub const CODEWORD_CAP: usize = 1 << 20;

/// Variables of the auxiliary law, in table order.
pub const AUX_AXES: [&str; 4] = ["Q", "U1", "U2", "X"];

const U_STREAM: [u64; 2] = [1, 2];

/// Codebook exponents and message-split rates, all in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    /// `(T0, T1, T2)`: codebook size exponents of the cloud and the two satellites.
    pub t: [f64; 3],
    /// `(R01, R02)`: parts of the private messages carried by the common layer.
    pub r0_split: [f64; 2],
    /// `(R0, R1, R2)` after splitting: common rate and the private remainders.
    pub rbar: [f64; 3],
    /// `(R~1, R~2)`: sub-bin index rates.
    pub rtilde: [f64; 2],
}

fn default_delta() -> f64 {
    1.0
}

fn default_leakage_samples() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub channel: WiretapBc,
    /// Joint law of `(Q, U1, U2, X)` with axes in that order.
    pub aux: JointPmf,
    /// Blocklength.
    pub n: usize,
    pub rates: Rates,
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_delta")]
    pub delta_coefficient: f64,
    #[serde(default = "default_leakage_samples")]
    pub leakage_samples: usize,
}

/// Realized partition of every index set. Codeword counts are rounded
/// powers of two, so the exponents actually used are reported alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub n: usize,
    /// Bins of the cloud codebook (common messages).
    pub bins0: usize,
    /// Cloud words per bin.
    pub per_bin0: usize,
    /// Bins of each satellite codebook (private messages).
    pub bins: [usize; 2],
    /// Sub-bins per bin.
    pub subbins: [usize; 2],
    /// Words per sub-bin.
    pub per_subbin: [usize; 2],
    /// `log2(count) / n` for `(T0, T1, T2)`.
    pub realized_t: [f64; 3],
    /// `log2(count) / n` for `(R0, R1, R2)`.
    pub realized_rbar: [f64; 3],
    /// `log2(count) / n` for `(R~1, R~2)`.
    pub realized_rtilde: [f64; 2],
}

impl Layout {
    pub fn q_words(&self) -> usize {
        self.bins0 * self.per_bin0
    }

    pub fn u_words(&self, j: usize) -> usize {
        self.bins[j] * self.subbins[j] * self.per_subbin[j]
    }

    /// Number of equiprobable message triples.
    pub fn messages(&self) -> usize {
        self.bins0 * self.bins[0] * self.bins[1]
    }

    /// Satellite index of word `m` in sub-bin `l` of bin `w`.
    pub fn u_index(&self, j: usize, w: usize, l: usize, m: usize) -> usize {
        w + self.bins[j] * (l + self.subbins[j] * m)
    }

    /// `(bin, sub-bin)` of satellite index `s`.
    pub fn u_bin(&self, j: usize, s: usize) -> (usize, usize) {
        (s % self.bins[j], (s / self.bins[j]) % self.subbins[j])
    }
}

fn count(n: usize, rate: f64) -> Result<usize> {
    let e = n as f64 * rate;
    if e > 40.0 {
        return Err(Error::CapExceeded(format!("2^{e:.1} codewords")));
    }
    Ok((e.exp2().round() as usize).max(1))
}

fn exponent(n: usize, c: usize) -> f64 {
    (c as f64).log2() / n as f64
}

impl SimConfig {
    /// Validates rates, alphabets and caps and returns the realized layout.
    pub fn layout(&self) -> Result<Layout> {
        const SLACK: f64 = 1e-9;
        let r = &self.rates;
        if self.n == 0 {
            return Err(Error::InvalidArgument("blocklength must be positive".into()));
        }
        if !(self.delta_coefficient > 0.0) {
            return Err(Error::Domain { what: "delta coefficient", value: self.delta_coefficient });
        }
        let all = r.t.iter().chain(&r.r0_split).chain(&r.rbar).chain(&r.rtilde);
        if let Some(&v) = all.clone().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Domain { what: "rate", value: v });
        }
        if (r.rbar[0] - r.r0_split[0] - r.r0_split[1]).abs() > SLACK {
            return Err(Error::InvalidArgument(format!(
                "common rate {} differs from R01 + R02 = {}",
                r.rbar[0],
                r.r0_split[0] + r.r0_split[1]
            )));
        }
        if r.t[0] < r.rbar[0] - SLACK {
            return Err(Error::InvalidArgument(format!("T0 = {} is below the common rate {}", r.t[0], r.rbar[0])));
        }
        for j in 0..2 {
            if r.rtilde[j] > r.t[j + 1] - r.rbar[j + 1] + SLACK {
                return Err(Error::InvalidArgument(format!(
                    "sub-bin rate {} exceeds T{} - R{} = {}",
                    r.rtilde[j],
                    j + 1,
                    j + 1,
                    r.t[j + 1] - r.rbar[j + 1]
                )));
            }
        }
        let names: Vec<&str> = self.aux.axes().iter().map(|a| a.name.as_str()).collect();
        if names != AUX_AXES {
            return Err(Error::InvalidArgument(format!("aux axes must be {AUX_AXES:?}, got {names:?}")));
        }
        if self.aux.axis_size("X")? != self.channel.input_size() {
            return Err(Error::DimensionMismatch("aux X alphabet differs from the channel input".into()));
        }
        let (a, b, c) = self.channel.output_sizes();
        if self.aux.sizes().iter().chain([a, b, c].iter()).any(|&s| s > 256) {
            return Err(Error::CapExceeded("simulated alphabets are limited to 256 symbols".into()));
        }

        let n = self.n;
        let bins0 = count(n, r.rbar[0])?;
        let per_bin0 = count(n, (r.t[0] - r.rbar[0]).max(0.0))?;
        let bins = [count(n, r.rbar[1])?, count(n, r.rbar[2])?];
        let subbins = [count(n, r.rtilde[0])?, count(n, r.rtilde[1])?];
        let per_subbin = [
            count(n, (r.t[1] - r.rbar[1] - r.rtilde[0]).max(0.0))?,
            count(n, (r.t[2] - r.rbar[2] - r.rtilde[1]).max(0.0))?,
        ];
        let layout = Layout {
            n,
            bins0,
            per_bin0,
            bins,
            subbins,
            per_subbin,
            realized_t: [
                exponent(n, bins0 * per_bin0),
                exponent(n, bins[0] * subbins[0] * per_subbin[0]),
                exponent(n, bins[1] * subbins[1] * per_subbin[1]),
            ],
            realized_rbar: [exponent(n, bins0), exponent(n, bins[0]), exponent(n, bins[1])],
            realized_rtilde: [exponent(n, subbins[0]), exponent(n, subbins[1])],
        };
        let total = layout.q_words().saturating_mul(1 + layout.u_words(0) + layout.u_words(1));
        if total > CODEWORD_CAP {
            return Err(Error::CapExceeded(format!("{total} codewords exceed {CODEWORD_CAP}")));
        }
        Ok(layout)
    }

    pub fn delta(&self) -> f64 {
        delta_n(self.n, self.delta_coefficient)
    }
}

/// Codebook exponents for target rates `(R1, R2)` without rate splitting
/// (`R0 = 0`) that meet every secrecy inequality of the scheme with margin
/// `slack`. Sub-bin rates are zero, which leaves the whole in-bin
/// randomization to the covering step and keeps each count a single
/// rounding. Layers with a one-symbol alphabet get no margin, since a
/// constant layer needs no randomization.
pub fn compliant_rates(ch: &WiretapBc, aux: &JointPmf, r: [f64; 2], slack: f64) -> Result<Rates> {
    if r.iter().chain([slack].iter()).any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidArgument(format!("rates {r:?} and slack {slack} must be nonnegative")));
    }
    let j = aux.append_outputs("X", ["Y1", "Y2", "Z"], ch)?;
    let i = |a: &[&str], b: &[&str], c: &[&str]| j.conditional_mi(a, b, c);
    let margin = |name: &str| -> Result<f64> { Ok(if j.axis_size(name)? > 1 { slack } else { 0.0 }) };
    let t0 = i(&["Q"], &["Z"], &[])? + margin("Q")?;
    let mut t1 = r[0] + i(&["U1"], &["Z"], &["Q"])? + margin("U1")?;
    let mut t2 = r[1] + i(&["U2"], &["Z"], &["Q"])? + margin("U2")?;
    let cover = i(&["U1"], &["U2"], &["Q"])?;
    // joint condition on both satellite layers
    let need = i(&["U1", "U2"], &["Z"], &["Q"])? + cover + margin("U1")?.max(margin("U2")?);
    let short = need - (t1 - r[0]) - (t2 - r[1]);
    if short > 0.0 {
        t1 += short / 2.0;
        t2 += short / 2.0;
    }
    Ok(Rates { t: [t0, t1, t2], r0_split: [0.0, 0.0], rbar: [0.0, r[0], r[1]], rtilde: [0.0, 0.0] })
}

/// Tables derived from the auxiliary law and the channel.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Laws {
    /// `|Q|, |U1|, |U2|, |X|`.
    pub sizes: [usize; 4],
    pub out_sizes: [usize; 3],
    pub p_q: Vec<f64>,
    /// `P(u_j | q)`, rows indexed by `q`.
    pub u_given_q: [Vec<f64>; 2],
    /// `P(q, u1, u2)`.
    pub p_quu: Vec<f64>,
    /// `P(x | q, u1, u2)`, rows indexed by the `(q, u1, u2)` cell.
    pub x_given_quu: Vec<f64>,
    /// `P(q, u_j, y_j)`.
    pub p_quy: [Vec<f64>; 2],
    /// `P(z | q, u1, u2)` after averaging over `X`.
    pub z_given_quu: Vec<f64>,
    /// Joint output rows `P(y1, y2, z | x)`.
    pub out_rows: Vec<Vec<f64>>,
}

fn conditional(joint: &[f64], rows: usize, cols: usize, fallback: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let row = &joint[r * cols..(r + 1) * cols];
        let t: f64 = row.iter().sum();
        if t > 0.0 {
            out.extend(row.iter().map(|p| p / t));
        } else {
            out.extend_from_slice(fallback);
        }
    }
    out
}

impl Laws {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        let aux = &cfg.aux;
        let s = aux.sizes();
        let sizes = [s[0], s[1], s[2], s[3]];
        let (a, b, c) = cfg.channel.output_sizes();
        let p_q = aux.marginal(&["Q"])?.table().to_vec();
        let p_x = aux.marginal(&["X"])?.table().to_vec();
        let mut u_given_q = [Vec::new(), Vec::new()];
        let mut p_quy = [Vec::new(), Vec::new()];
        for (j, (u, y)) in [("U1", "Y1"), ("U2", "Y2")].into_iter().enumerate() {
            let qu = aux.marginal(&["Q", u])?;
            let pu = aux.marginal(&[u])?.table().to_vec();
            u_given_q[j] = conditional(qu.table(), sizes[0], sizes[j + 1], &pu);
            let w = if j == 0 { &cfg.channel.ch_y1 } else { &cfg.channel.ch_y2 };
            p_quy[j] =
                aux.marginal(&["Q", u, "X"])?.append_channel("X", y, w)?.marginal(&["Q", u, y])?.table().to_vec();
        }
        let cells = sizes[0] * sizes[1] * sizes[2];
        let x_given_quu = conditional(aux.table(), cells, sizes[3], &p_x);
        let p_quu = aux.marginal(&["Q", "U1", "U2"])?.table().to_vec();
        let wz = &cfg.channel.ch_z;
        let z_given_quu = (0..cells)
            .flat_map(|k| {
                let xr = &x_given_quu[k * sizes[3]..(k + 1) * sizes[3]];
                (0..c).map(move |z| xr.iter().enumerate().map(|(x, px)| px * wz.prob(x, z)).sum::<f64>())
            })
            .collect();
        let out_rows = (0..sizes[3]).map(|x| cfg.channel.output_row(x)).collect();
        Ok(Self { sizes, out_sizes: [a, b, c], p_q, u_given_q, p_quu, x_given_quu, p_quy, z_given_quu, out_rows })
    }

    pub fn cell(&self, q: u8, u1: u8, u2: u8) -> usize {
        (q as usize * self.sizes[1] + u1 as usize) * self.sizes[2] + u2 as usize
    }
}

/// All codewords of one random code. Symbols are stored as bytes,
/// row-major per word.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub layout: Layout,
    pub(crate) laws: Laws,
    q: Vec<u8>,
    u: [Vec<u8>; 2],
}

impl Codebook {
    pub fn q_word(&self, s0: usize) -> &[u8] {
        let n = self.layout.n;
        &self.q[s0 * n..(s0 + 1) * n]
    }

    pub fn u_word(&self, j: usize, s0: usize, sj: usize) -> &[u8] {
        let n = self.layout.n;
        let k = s0 * self.layout.u_words(j) + sj;
        &self.u[j][k * n..(k + 1) * n]
    }
}

/// Draws the cloud words i.i.d. from `P_Q` and, for each cloud word, the
/// satellite words symbolwise from `P_{Uj|Q}`. Word `i` of a layer lies in
/// bin `i mod (bin count)`.
pub fn gen_codebook(cfg: &SimConfig) -> Result<Codebook> {
    let layout = cfg.layout()?;
    let laws = Laws::new(cfg)?;
    let n = cfg.n;
    let cb_seed = derive_seed(cfg.seed, 0);
    let nq = layout.q_words();
    let q: Vec<u8> = (0..nq)
        .into_par_iter()
        .flat_map_iter(|s0| {
            let mut rng = rng_for(cb_seed, s0 as u64);
            (0..n).map(|_| categorical(&mut rng, &laws.p_q) as u8).collect::<Vec<_>>()
        })
        .collect();
    let mut u = [Vec::new(), Vec::new()];
    for j in 0..2 {
        let nu = layout.u_words(j);
        let size = laws.sizes[j + 1];
        let seed = derive_seed(cb_seed, U_STREAM[j]);
        let (q, laws) = (&q, &laws);
        u[j] = (0..nq * nu)
            .into_par_iter()
            .flat_map_iter(|k| {
                let s0 = k / nu;
                let mut rng = rng_for(seed, k as u64);
                (0..n)
                    .map(|i| {
                        let qs = q[s0 * n + i] as usize;
                        categorical(&mut rng, &laws.u_given_q[j][qs * size..(qs + 1) * size]) as u8
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    Ok(Codebook { layout, laws, q, u })
}

/// Outcome of one encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoding {
    pub x: Vec<u8>,
    /// Chosen cloud and satellite indices `(s0, s1, s2)`.
    pub s: [usize; 3],
    /// Chosen sub-bins `(l1, l2)`.
    pub l: [usize; 2],
    /// Whether a jointly typical pair existed in the product sub-bin. When
    /// none did, a pair is drawn uniformly from the sub-bin and sent anyway.
    pub covered: bool,
}

fn check_message(layout: &Layout, w: [usize; 3]) -> Result<()> {
    let lim = [layout.bins0, layout.bins[0], layout.bins[1]];
    for k in 0..3 {
        if w[k] >= lim[k] {
            return Err(Error::InvalidArgument(format!("message part {k} = {} out of range {}", w[k], lim[k])));
        }
    }
    Ok(())
}

/// Jointly typical `(m1, m2)` positions of the product sub-bin `(l1, l2)`
/// of message `(w1, w2)` under cloud word `s0`.
pub(crate) fn covering_pairs(
    cb: &Codebook,
    s0: usize,
    w: [usize; 2],
    l: [usize; 2],
    delta: f64,
) -> Vec<(usize, usize)> {
    let lay = &cb.layout;
    let laws = &cb.laws;
    let q = cb.q_word(s0);
    let sizes = [laws.sizes[0], laws.sizes[1], laws.sizes[2]];
    let mut counts = vec![0u32; laws.p_quu.len()];
    let mut out = Vec::new();
    for m1 in 0..lay.per_subbin[0] {
        let u1 = cb.u_word(0, s0, lay.u_index(0, w[0], l[0], m1));
        for m2 in 0..lay.per_subbin[1] {
            let u2 = cb.u_word(1, s0, lay.u_index(1, w[1], l[1], m2));
            if joint_typical(&[q, u1, u2], &sizes, &laws.p_quu, delta, &mut counts) {
                out.push((m1, m2));
            }
        }
    }
    out
}

/// Encodes message triple `w = (w0, w1, w2)`: a cloud word uniformly from
/// bin `w0`, sub-bins uniformly, then a jointly typical satellite pair
/// uniformly among those in the product sub-bin, and finally `X` symbolwise
/// from `P_{X|Q U1 U2}`.
pub fn encode(cb: &Codebook, cfg: &SimConfig, w: [usize; 3], trial_seed: u64) -> Result<Encoding> {
    let lay = &cb.layout;
    check_message(lay, w)?;
    let mut rng = rng_for(trial_seed, 0);
    let s0 = w[0] + lay.bins0 * rng.random_range(0..lay.per_bin0);
    let l = [rng.random_range(0..lay.subbins[0]), rng.random_range(0..lay.subbins[1])];
    let pairs = covering_pairs(cb, s0, [w[1], w[2]], l, cfg.delta());
    let covered = !pairs.is_empty();
    let (m1, m2) = if covered {
        pairs[rng.random_range(0..pairs.len())]
    } else {
        (rng.random_range(0..lay.per_subbin[0]), rng.random_range(0..lay.per_subbin[1]))
    };
    let s = [s0, lay.u_index(0, w[1], l[0], m1), lay.u_index(1, w[2], l[1], m2)];
    let (q, u1, u2) = (cb.q_word(s[0]), cb.u_word(0, s0, s[1]), cb.u_word(1, s0, s[2]));
    let nx = cb.laws.sizes[3];
    let x = (0..lay.n)
        .map(|i| {
            let k = cb.laws.cell(q[i], u1[i], u2[i]);
            categorical(&mut rng, &cb.laws.x_given_quu[k * nx..(k + 1) * nx]) as u8
        })
        .collect();
    Ok(Encoding { x, s, l, covered })
}

/// Passes `x` through the memoryless channel, one joint output draw per symbol.
pub fn transmit(x: &[u8], ch: &WiretapBc, trial_seed: u64) -> Result<(Vec<u8>, Vec<u8>, Vec<u8>)> {
    let rows: Vec<Vec<f64>> = (0..ch.input_size()).map(|a| ch.output_row(a)).collect();
    let (_, n2, nz) = ch.output_sizes();
    transmit_rows(x, &rows, n2, nz, trial_seed)
}

pub(crate) fn transmit_rows(
    x: &[u8],
    rows: &[Vec<f64>],
    n2: usize,
    nz: usize,
    trial_seed: u64,
) -> Result<(Vec<u8>, Vec<u8>, Vec<u8>)> {
    let mut rng = rng_for(trial_seed, 1);
    let (mut y1, mut y2, mut z) =
        (Vec::with_capacity(x.len()), Vec::with_capacity(x.len()), Vec::with_capacity(x.len()));
    for &a in x {
        let row =
            rows.get(a as usize).ok_or_else(|| Error::InvalidArgument(format!("input symbol {a} out of range")))?;
        let k = categorical(&mut rng, row);
        y1.push((k / (n2 * nz)) as u8);
        y2.push(((k / nz) % n2) as u8);
        z.push((k % nz) as u8);
    }
    Ok((y1, y2, z))
}

/// Decoder of user `j` (1 or 2): the unique `(s0, sj)` whose words are
/// jointly typical with `y`, mapped to `(w0, wj)`. `None` when no pair or
/// more than one pair is typical.
pub fn decode(cb: &Codebook, cfg: &SimConfig, j: usize, y: &[u8]) -> Result<Option<(usize, usize)>> {
    if !(1..=2).contains(&j) {
        return Err(Error::InvalidArgument(format!("user must be 1 or 2, got {j}")));
    }
    if y.len() != cb.layout.n {
        return Err(Error::DimensionMismatch(format!("received {} symbols, blocklength {}", y.len(), cb.layout.n)));
    }
    let j = j - 1;
    let lay = &cb.layout;
    let laws = &cb.laws;
    let sizes = [laws.sizes[0], laws.sizes[j + 1], laws.out_sizes[j]];
    let p = &laws.p_quy[j];
    let delta = cfg.delta();
    let mut counts = vec![0u32; p.len()];
    let mut found = None;
    for s0 in 0..lay.q_words() {
        let q = cb.q_word(s0);
        for sj in 0..lay.u_words(j) {
            if joint_typical(&[q, cb.u_word(j, s0, sj), y], &sizes, p, delta, &mut counts) {
                if found.is_some() {
                    return Ok(None);
                }
                found = Some((s0, sj));
            }
        }
    }
    Ok(found.map(|(s0, sj)| (s0 % lay.bins0, lay.u_bin(j, sj).0)))
}
