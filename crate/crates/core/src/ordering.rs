//! Channel orderings: degraded, less-noisy and more-capable, plus the
//! BEC/BSC classification bands.
//!
//! Degradedness is decided by a linear program. The two information
//! orderings quantify over all input laws and are tested by sampling, so a
//! pass is reported with `sampled = true`.

use crate::error::{Error, Result};
use crate::probcore::{h2, mi_raw, Dmc, Pmf};
use crate::rng::{dirichlet, rng_for};
use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Slack allowed on the information inequalities.
pub const INFO_TOL: f64 = 1e-9;
pub const DEFAULT_DEGRADED_TOL: f64 = 1e-7;
pub const DEFAULT_SAMPLES: usize = 2000;
pub const DEFAULT_GRID: usize = 64;

const CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Degraded,
    LessNoisy,
    MoreCapable,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Holds {
    Proved,
    Refuted,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// Degrading kernel `Q` with `w_strong * Q = w_weak`, or the best
    /// approximation when degradedness is refuted.
    Kernel(Dmc),
    /// Input law at which `I(X;Y) < I(X;Z)`.
    Input(Pmf),
    /// Pair of input laws whose midpoint breaks concavity of `I(X;Y) - I(X;Z)`.
    MidpointPair(Pmf, Pmf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub relation: Relation,
    pub holds: Holds,
    pub witness: Option<Witness>,
    /// L1 defect of the degrading kernel, or the size of the worst violation
    /// found for the sampled orderings (0 when none was found).
    pub residual: f64,
    /// True when `holds` rests on finite sampling rather than an exact test.
    pub sampled: bool,
    pub diagnostics: Option<String>,
}

fn same_inputs(a: &Dmc, b: &Dmc) -> Result<()> {
    if a.input_size() != b.input_size() {
        return Err(Error::DimensionMismatch(format!("input sizes differ: {} vs {}", a.input_size(), b.input_size())));
    }
    Ok(())
}

/// L1 distance between `w_strong * q` and `w_weak`, summed over all entries.
pub fn cascade_defect(w_strong: &Dmc, q: &Dmc, w_weak: &Dmc) -> f64 {
    let mut total = 0.0;
    for x in 0..w_strong.input_size() {
        for z in 0..w_weak.output_size() {
            let got: f64 = w_strong.row(x).iter().enumerate().map(|(y, &a)| a * q.prob(y, z)).sum();
            total += (got - w_weak.prob(x, z)).abs();
        }
    }
    total
}

/// Decides whether `w_weak` is a degraded version of `w_strong` by
/// minimizing the L1 residual of `w_strong * Q = w_weak` over row-stochastic `Q`.
pub fn check_degraded(w_strong: &Dmc, w_weak: &Dmc, tol: f64) -> Result<OrderingReport> {
    same_inputs(w_strong, w_weak)?;
    let report = |holds, q: Option<Dmc>, residual, diagnostics| OrderingReport {
        relation: Relation::Degraded,
        holds,
        witness: q.map(Witness::Kernel),
        residual,
        sampled: false,
        diagnostics,
    };
    if w_strong == w_weak {
        return Ok(report(Holds::Proved, Some(Dmc::identity(w_strong.output_size())?), 0.0, None));
    }

    let (nx, ny, nz) = (w_strong.input_size(), w_strong.output_size(), w_weak.output_size());
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let q: Vec<Vec<_>> = (0..ny).map(|_| (0..nz).map(|_| lp.add_var(0.0, (0.0, 1.0))).collect()).collect();
    for row in &q {
        let mut e = LinearExpr::empty();
        for &v in row {
            e.add(v, 1.0);
        }
        lp.add_constraint(e, ComparisonOp::Eq, 1.0);
    }
    for x in 0..nx {
        for z in 0..nz {
            let plus = lp.add_var(1.0, (0.0, f64::INFINITY));
            let minus = lp.add_var(1.0, (0.0, f64::INFINITY));
            let mut e = LinearExpr::empty();
            for (y, &a) in w_strong.row(x).iter().enumerate() {
                if a != 0.0 {
                    e.add(q[y][z], a);
                }
            }
            e.add(plus, -1.0);
            e.add(minus, 1.0);
            lp.add_constraint(e, ComparisonOp::Eq, w_weak.prob(x, z));
        }
    }
    let sol = match lp.solve() {
        Ok(s) => s,
        Err(e) => return Ok(report(Holds::Undetermined, None, f64::NAN, Some(format!("LP solver: {e}")))),
    };

    // project the solver output back onto the stochastic matrices before judging it
    let mut flat = Vec::with_capacity(ny * nz);
    for row in &q {
        let vals: Vec<f64> = row.iter().map(|&v| sol.var_value(v).max(0.0)).collect();
        let t: f64 = vals.iter().sum();
        if t > 0.0 {
            flat.extend(vals.iter().map(|v| v / t));
        } else {
            flat.extend((0..nz).map(|_| 1.0 / nz as f64));
        }
    }
    let kernel = Dmc::from_flat(ny, nz, flat);
    let residual = cascade_defect(w_strong, &kernel, w_weak);
    let holds = if residual <= tol {
        Holds::Proved
    } else if residual > 10.0 * tol {
        Holds::Refuted
    } else {
        Holds::Undetermined
    };
    let diag = (holds == Holds::Undetermined)
        .then(|| format!("residual {residual:e} between tol and 10*tol; LP objective {:e}", sol.objective()));
    Ok(report(holds, Some(kernel), residual, diag))
}

/// All points of the simplex with coordinates in multiples of `1/res`.
pub fn simplex_grid(n: usize, res: usize) -> Vec<Vec<f64>> {
    fn rec(n: usize, left: usize, res: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() == n - 1 {
            cur.push(left);
            out.push(cur.iter().map(|&c| c as f64 / res as f64).collect());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(n, left - k, res, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 && res > 0 {
        rec(n, res, res, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

fn vertices(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v
        })
        .collect()
}

fn to_pmf(v: &[f64]) -> Pmf {
    Pmf::normalize(v).expect("sampled simplex point")
}

fn gap(px: &[f64], w_y: &Dmc, w_z: &Dmc) -> f64 {
    mi_raw(px, w_y) - mi_raw(px, w_z)
}

/// Midpoint concavity defect of `F = I(X;Y) - I(X;Z)`: positive when
/// `F(mid) < (F(a) + F(b)) / 2`.
fn midpoint_defect(a: &[f64], b: &[f64], w_y: &Dmc, w_z: &Dmc) -> f64 {
    let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
    0.5 * (gap(a, w_y, w_z) + gap(b, w_y, w_z)) - gap(&mid, w_y, w_z)
}

fn worst<T: Send>(items: impl ParallelIterator<Item = (f64, T)>) -> Option<(f64, T)> {
    items.reduce_with(|a, b| if b.0 > a.0 { b } else { a })
}

/// Tests whether `w_y` is less noisy than `w_z` through midpoint concavity of
/// `I(X;Y) - I(X;Z)` in the input law.
pub fn check_less_noisy(w_y: &Dmc, w_z: &Dmc, samples: usize, seed: u64) -> Result<OrderingReport> {
    same_inputs(w_y, w_z)?;
    let n = w_y.input_size();
    let mut points = vertices(n);
    let res = match n {
        0..=2 => DEFAULT_GRID,
        3 => 16,
        _ => 0,
    };
    if res > 0 {
        points = simplex_grid(n, res);
    }
    let pairs: Vec<(usize, usize)> =
        (0..points.len()).flat_map(|i| (i + 1..points.len()).map(move |j| (i, j))).collect();
    let det =
        worst(pairs.par_iter().map(|&(i, j)| {
            (midpoint_defect(&points[i], &points[j], w_y, w_z), (points[i].clone(), points[j].clone()))
        }));
    let chunks = samples.div_ceil(CHUNK);
    let rnd = worst((0..chunks).into_par_iter().filter_map(|c| {
        let mut rng = rng_for(seed, c as u64);
        let count = CHUNK.min(samples - c * CHUNK);
        (0..count)
            .map(|_| {
                let a = dirichlet(&mut rng, n, 1.0);
                let b = dirichlet(&mut rng, n, 1.0);
                (midpoint_defect(&a, &b, w_y, w_z), (a, b))
            })
            .max_by(|x, y| x.0.total_cmp(&y.0))
    }));
    let found = [det, rnd].into_iter().flatten().max_by(|x, y| x.0.total_cmp(&y.0));
    Ok(match found {
        Some((d, (a, b))) if d > INFO_TOL => OrderingReport {
            relation: Relation::LessNoisy,
            holds: Holds::Refuted,
            witness: Some(Witness::MidpointPair(to_pmf(&a), to_pmf(&b))),
            residual: d,
            sampled: false,
            diagnostics: None,
        },
        _ => OrderingReport {
            relation: Relation::LessNoisy,
            holds: Holds::Proved,
            witness: None,
            residual: 0.0,
            sampled: true,
            diagnostics: Some(format!("{} grid pairs and {samples} random pairs", pairs.len())),
        },
    })
}

/// Tests `I(X;Y) >= I(X;Z)` on a simplex grid of resolution `1/grid`
/// (input sizes up to 3) plus [`DEFAULT_SAMPLES`] random inputs.
pub fn check_more_capable(w_y: &Dmc, w_z: &Dmc, grid: usize, seed: u64) -> Result<OrderingReport> {
    same_inputs(w_y, w_z)?;
    let n = w_y.input_size();
    let mut points = vertices(n);
    if n <= 3 && grid > 0 {
        points = simplex_grid(n, grid);
    }
    let det = worst(points.par_iter().map(|p| (-gap(p, w_y, w_z), p.clone())));
    let chunks = DEFAULT_SAMPLES.div_ceil(CHUNK);
    let rnd = worst((0..chunks).into_par_iter().filter_map(|c| {
        let mut rng = rng_for(seed, c as u64);
        let count = CHUNK.min(DEFAULT_SAMPLES - c * CHUNK);
        (0..count)
            .map(|_| {
                let p = dirichlet(&mut rng, n, 1.0);
                (-gap(&p, w_y, w_z), p)
            })
            .max_by(|x, y| x.0.total_cmp(&y.0))
    }));
    let found = [det, rnd].into_iter().flatten().max_by(|x, y| x.0.total_cmp(&y.0));
    Ok(match found {
        Some((d, p)) if d > INFO_TOL => OrderingReport {
            relation: Relation::MoreCapable,
            holds: Holds::Refuted,
            witness: Some(Witness::Input(to_pmf(&p))),
            residual: d,
            sampled: false,
            diagnostics: None,
        },
        _ => OrderingReport {
            relation: Relation::MoreCapable,
            holds: Holds::Proved,
            witness: None,
            residual: 0.0,
            sampled: true,
            diagnostics: Some(format!("{} grid points and {DEFAULT_SAMPLES} random points", points.len())),
        },
    })
}

/// Ordering between BEC(e) and BSC(p). In the first three bands the BEC is
/// the stronger channel; in the last the BSC is essentially less noisy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BecBscClass {
    Degraded,
    LessNoisy,
    MoreCapable,
    EssentiallyLessNoisy,
}

pub fn classify_bec_bsc(e: f64, p: f64) -> Result<BecBscClass> {
    if !(0.0..=1.0).contains(&e) {
        return Err(Error::Domain { what: "classify_bec_bsc (e)", value: e });
    }
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::Domain { what: "classify_bec_bsc (p)", value: p });
    }
    Ok(if e <= 2.0 * p {
        BecBscClass::Degraded
    } else if e <= 4.0 * p * (1.0 - p) {
        BecBscClass::LessNoisy
    } else if e <= h2(p) {
        BecBscClass::MoreCapable
    } else {
        BecBscClass::EssentiallyLessNoisy
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probcore::{cascade, make_bec, make_bsc};

    #[test]
    fn bsc_degraded_witness() {
        let r = check_degraded(&make_bsc(0.1).unwrap(), &make_bsc(0.25).unwrap(), 1e-7).unwrap();
        assert_eq!(r.holds, Holds::Proved);
        let Some(Witness::Kernel(q)) = r.witness else { panic!("no kernel") };
        assert!((q.prob(0, 1) - 0.1875).abs() < 1e-9);
        assert!((q.prob(1, 0) - 0.1875).abs() < 1e-9);
    }

    #[test]
    fn bsc_reverse_is_refuted() {
        let r = check_degraded(&make_bsc(0.25).unwrap(), &make_bsc(0.1).unwrap(), 1e-7).unwrap();
        assert_eq!(r.holds, Holds::Refuted);
        assert!(r.residual > 1e-6);
    }

    #[test]
    fn same_channel_uses_identity() {
        let w = make_bec(0.3).unwrap();
        let r = check_degraded(&w, &w, 1e-7).unwrap();
        assert_eq!(r.holds, Holds::Proved);
        assert_eq!(r.witness, Some(Witness::Kernel(Dmc::identity(3).unwrap())));
    }

    #[test]
    fn degraded_dimension_mismatch() {
        let w = Dmc::identity(3).unwrap();
        assert!(check_degraded(&w, &make_bsc(0.1).unwrap(), 1e-7).is_err());
    }

    #[test]
    fn cascades_are_degraded() {
        let w = Dmc::new(vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.3, 0.6]]).unwrap();
        let q = Dmc::new(vec![vec![0.5, 0.5], vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        let r = check_degraded(&w, &cascade(&w, &q).unwrap(), 1e-7).unwrap();
        assert_eq!(r.holds, Holds::Proved);
        assert!(r.residual <= 1e-9);
    }

    #[test]
    fn less_noisy_examples() {
        let clean = Dmc::identity(2).unwrap();
        let r = check_less_noisy(&clean, &make_bsc(0.2).unwrap(), 500, 1).unwrap();
        assert_eq!(r.holds, Holds::Proved);
        assert!(r.sampled);
        let r = check_less_noisy(&make_bsc(0.1).unwrap(), &make_bsc(0.25).unwrap(), 500, 1).unwrap();
        assert_eq!(r.holds, Holds::Proved);
        let r = check_less_noisy(&make_bsc(0.25).unwrap(), &make_bsc(0.1).unwrap(), 500, 1).unwrap();
        assert_eq!(r.holds, Holds::Refuted);
        assert!(matches!(r.witness, Some(Witness::MidpointPair(..))));
    }

    #[test]
    fn bec_bsc_less_noisy_band() {
        // 2p < e <= 4p(1-p): BEC less noisy than BSC but not degraded
        let (bec, bsc) = (make_bec(0.45).unwrap(), make_bsc(0.2).unwrap());
        assert_eq!(check_less_noisy(&bec, &bsc, 500, 3).unwrap().holds, Holds::Proved);
        assert_eq!(check_degraded(&bec, &bsc, 1e-7).unwrap().holds, Holds::Refuted);
        // 4p(1-p) < e <= h2(p): more capable but not less noisy
        let bec = make_bec(0.68).unwrap();
        assert_eq!(check_less_noisy(&bec, &bsc, 500, 3).unwrap().holds, Holds::Refuted);
        assert_eq!(check_more_capable(&bec, &bsc, 64, 3).unwrap().holds, Holds::Proved);
        // beyond h2(p): not more capable
        let bec = make_bec(0.8).unwrap();
        assert_eq!(check_more_capable(&bec, &bsc, 64, 3).unwrap().holds, Holds::Refuted);
    }

    #[test]
    fn more_capable_examples() {
        let w = make_bsc(0.3).unwrap();
        assert_eq!(check_more_capable(&w, &w, 64, 0).unwrap().holds, Holds::Proved);
        let r = check_more_capable(&make_bec(0.3).unwrap(), &make_bsc(0.1).unwrap(), 64, 0).unwrap();
        assert_eq!(r.holds, Holds::Proved);
        let clean = Dmc::identity(3).unwrap();
        let other = Dmc::new(vec![vec![0.5, 0.5], vec![0.1, 0.9], vec![1.0, 0.0]]).unwrap();
        assert_eq!(check_more_capable(&clean, &other, 32, 0).unwrap().holds, Holds::Proved);
    }

    #[test]
    fn sampled_checks_are_deterministic() {
        let (a, b) = (make_bsc(0.25).unwrap(), make_bsc(0.1).unwrap());
        assert_eq!(check_less_noisy(&a, &b, 700, 9).unwrap(), check_less_noisy(&a, &b, 700, 9).unwrap());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_bec_bsc(0.2, 0.25).unwrap(), BecBscClass::Degraded);
        assert_eq!(classify_bec_bsc(0.6, 0.25).unwrap(), BecBscClass::LessNoisy);
        assert_eq!(classify_bec_bsc(0.95, 0.25).unwrap(), BecBscClass::EssentiallyLessNoisy);
        assert_eq!(classify_bec_bsc(0.5, 0.25).unwrap(), BecBscClass::Degraded);
        assert_eq!(classify_bec_bsc(0.8, 0.25).unwrap(), BecBscClass::MoreCapable);
        assert!(classify_bec_bsc(0.2, 0.6).is_err());
        assert!(classify_bec_bsc(1.2, 0.2).is_err());
    }

    #[test]
    fn grid_counts() {
        assert_eq!(simplex_grid(2, 4).len(), 5);
        assert_eq!(simplex_grid(3, 4).len(), 15);
        for p in simplex_grid(3, 5) {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
