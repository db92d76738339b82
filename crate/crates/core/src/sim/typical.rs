//! Strong typicality tests on symbol sequences.

use crate::error::{Error, Result};
use crate::probcore::{Dmc, Pmf};

/// Typicality slack `c n^{-1/3}`: it vanishes while `sqrt(n) delta_n` grows.
pub fn delta_n(n: usize, c: f64) -> f64 {
    c * (n as f64).powf(-1.0 / 3.0)
}

/// Strong typicality from symbol counts against the probability table `p`.
pub(crate) fn counts_typical(counts: &[u32], n: usize, p: &[f64], delta: f64) -> bool {
    let n = n as f64;
    counts.iter().zip(p).all(|(&c, &q)| if q == 0.0 { c == 0 } else { (c as f64 / n - q).abs() <= delta })
}

/// Joint typicality of several aligned sequences against a row-major joint
/// table with the given alphabet sizes. `counts` is scratch space of the
/// table's length.
pub(crate) fn joint_typical(seqs: &[&[u8]], sizes: &[usize], p: &[f64], delta: f64, counts: &mut [u32]) -> bool {
    counts.iter_mut().for_each(|c| *c = 0);
    let n = seqs[0].len();
    for i in 0..n {
        let mut k = 0;
        for (s, &size) in seqs.iter().zip(sizes) {
            k = k * size + s[i] as usize;
        }
        counts[k] += 1;
    }
    counts_typical(counts, n, p, delta)
}

/// `true` iff every symbol frequency is within `delta` of `p` and symbols of
/// probability zero do not occur. Empty sequences are not typical.
pub fn is_typical(seq: &[u8], p: &Pmf, delta: f64) -> bool {
    if seq.is_empty() {
        return false;
    }
    let mut counts = vec![0u32; p.len()];
    for &s in seq {
        match counts.get_mut(s as usize) {
            Some(c) => *c += 1,
            None => return false,
        }
    }
    counts_typical(&counts, seq.len(), p.probs(), delta)
}

/// Conditional typicality of `y` given `x` through `w`:
/// `|N(a,b)/n - N(a)/n W(b|a)| <= delta` for all pairs, and no pair with
/// `W(b|a) = 0` occurs.
pub fn is_cond_typical(y: &[u8], x: &[u8], w: &Dmc, delta: f64) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!("x has {} symbols, y has {}", x.len(), y.len())));
    }
    if x.is_empty() {
        return Ok(false);
    }
    let (nx, ny) = (w.input_size(), w.output_size());
    let mut joint = vec![0u32; nx * ny];
    let mut single = vec![0u32; nx];
    for (&a, &b) in x.iter().zip(y) {
        let (a, b) = (a as usize, b as usize);
        if a >= nx || b >= ny {
            return Ok(false);
        }
        joint[a * ny + b] += 1;
        single[a] += 1;
    }
    let n = x.len() as f64;
    for a in 0..nx {
        for b in 0..ny {
            let c = joint[a * ny + b];
            let wab = w.prob(a, b);
            if wab == 0.0 && c > 0 {
                return Ok(false);
            }
            if (c as f64 / n - single[a] as f64 / n * wab).abs() > delta {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probcore::make_bsc;
    use crate::rng::{categorical, rng_for};

    #[test]
    fn delta_examples() {
        assert!((delta_n(8, 1.0) - 0.5).abs() < 1e-15);
        assert!((delta_n(1000, 1.0) - 0.1).abs() < 1e-15);
        assert!((delta_n(77, 2.0) - 2.0 * delta_n(77, 1.0)).abs() < 1e-15);
    }

    #[test]
    fn exact_type_and_zero_rule() {
        let p = Pmf::new(vec![0.25, 0.75, 0.0]).unwrap();
        assert!(is_typical(&[0, 1, 1, 1], &p, 0.0));
        assert!(!is_typical(&[0, 1, 1, 2], &p, 1.0));
        assert!(!is_typical(&[0, 1, 1, 3], &p, 1.0));
        assert!(!is_typical(&[], &p, 1.0));
    }

    #[test]
    fn iid_sequences_are_typical() {
        let p = Pmf::new(vec![0.2, 0.5, 0.3]).unwrap();
        let delta = delta_n(1000, 1.0);
        let mut rng = rng_for(1, 0);
        let hits = (0..10_000)
            .filter(|_| {
                let s: Vec<u8> = (0..1000).map(|_| categorical(&mut rng, p.probs()) as u8).collect();
                is_typical(&s, &p, delta)
            })
            .count();
        assert!(hits >= 9900, "{hits}");
    }

    #[test]
    fn conditional_typicality() {
        let id = Dmc::identity(2).unwrap();
        let x = [0u8, 1, 1, 0, 1];
        assert!(is_cond_typical(&x, &x, &id, 0.0).unwrap());
        assert!(!is_cond_typical(&[0, 1, 1, 0, 0], &x, &id, 1.0).unwrap());
        assert!(is_cond_typical(&[0], &x, &id, 1.0).is_err());

        let w = make_bsc(0.2).unwrap();
        let delta = delta_n(1000, 1.0);
        let mut rng = rng_for(2, 0);
        let hits = (0..2000)
            .filter(|_| {
                let x: Vec<u8> = (0..1000).map(|_| categorical(&mut rng, &[0.5, 0.5]) as u8).collect();
                let y: Vec<u8> = x.iter().map(|&a| categorical(&mut rng, w.row(a as usize)) as u8).collect();
                is_cond_typical(&y, &x, &w, delta).unwrap()
            })
            .count();
        assert!(hits >= 1980, "{hits}");
    }
}
