use super::bounds::{
    inner_constraints, outer_cor_constraints, outer_thm1_constraints, Constraints, INNER_AUX, OUTER_COR_AUX,
    OUTER_THM1_AUX,
};
use super::hull::{sweep_lambdas, RatePoint, RateRegion};
use super::model::{AuxSpec, FactorModel, ModelShape};
use crate::error::{Error, Result};
use crate::probcore::{JointPmf, WiretapBc};
use crate::rng::{derive_seed, rng_for};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_BUDGET: usize = 2000;

/// Sub-stream reserved for refinement so it never collides with sample indices.
const REFINE_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    Inner,
    OuterCor,
    OuterThm1,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub region: RateRegion,
    /// Joints evaluated, including refinement moves.
    pub evaluated: usize,
    /// Joints rejected by a feasibility condition.
    pub infeasible: usize,
}

/// Samples `budget` joints of `shape`, evaluates each with `eval` (`None`
/// marks an infeasible joint) and returns the hull of the union. With
/// `refine`, the best joint in each sweep direction is then improved by
/// `budget / 16` local moves.
pub(crate) fn run_search<F>(
    shape: &ModelShape,
    eval: F,
    budget: usize,
    seed: u64,
    refine: bool,
) -> Result<SearchOutcome>
where
    F: Fn(&JointPmf) -> Result<Option<Constraints>> + Sync,
{
    if budget == 0 {
        return Err(Error::InvalidArgument("search budget must be positive".into()));
    }
    let samples: Vec<(FactorModel, Option<Constraints>)> = (0..budget)
        .into_par_iter()
        .map(|i| {
            let model = FactorModel::sample(shape, &mut rng_for(seed, i as u64));
            let c = eval(&model.joint()?)?;
            Ok((model, c))
        })
        .collect::<Result<_>>()?;

    let mut points: Vec<RatePoint> = Vec::with_capacity(2 * budget);
    let mut infeasible = 0;
    for (_, c) in &samples {
        match c {
            Some(c) => points.extend(c.corners()),
            None => infeasible += 1,
        }
    }
    let mut evaluated = budget;

    let steps = if refine { budget / 16 } else { 0 };
    if steps > 0 {
        let refine_seed = derive_seed(seed, REFINE_STREAM);
        let runs: Vec<(Vec<RatePoint>, usize, usize)> = sweep_lambdas()
            .par_iter()
            .enumerate()
            .map(|(d, &lambda)| {
                let best = samples.iter().filter_map(|(m, c)| c.as_ref().map(|c| (m, c.support(lambda)))).fold(
                    None,
                    |acc: Option<(&FactorModel, f64)>, (m, s)| match acc {
                        Some((_, bs)) if bs >= s => acc,
                        _ => Some((m, s)),
                    },
                );
                let Some((start, mut score)) = best else {
                    return Ok((Vec::new(), 0, 0));
                };
                let mut current = start.clone();
                let mut rng = rng_for(refine_seed, d as u64);
                let mut pts = Vec::new();
                let mut bad = 0;
                for _ in 0..steps {
                    let cand = current.perturb(&mut rng);
                    match eval(&cand.joint()?)? {
                        Some(c) => {
                            pts.extend(c.corners());
                            let s = c.support(lambda);
                            if s > score {
                                score = s;
                                current = cand;
                            }
                        }
                        None => bad += 1,
                    }
                }
                Ok((pts, steps, bad))
            })
            .collect::<Result<_>>()?;
        for (pts, n, bad) in runs {
            points.extend(pts);
            evaluated += n;
            infeasible += bad;
        }
    }
    Ok(SearchOutcome { region: RateRegion::from_points(points), evaluated, infeasible })
}

/// Sampling shape and per-joint evaluator of a general bound.
fn bound_shape(ch: &WiretapBc, aux: &AuxSpec, bound: Bound) -> Result<ModelShape> {
    let n = ch.input_size();
    match bound {
        Bound::Inner => ModelShape::chain(aux, &INNER_AUX, n, None),
        Bound::OuterCor => ModelShape::chain(aux, &OUTER_COR_AUX, n, None),
        Bound::OuterThm1 => ModelShape::chain(aux, &OUTER_THM1_AUX, n, Some(&["U1", "U2", "S1", "S2"])),
    }
}

fn bound_eval(ch: &WiretapBc, bound: Bound, joint: &JointPmf) -> Result<Option<Constraints>> {
    match bound {
        Bound::Inner => {
            let (c, side) = inner_constraints(ch, joint)?;
            Ok(side.holds().then_some(c))
        }
        Bound::OuterCor => outer_cor_constraints(ch, joint).map(Some),
        Bound::OuterThm1 => outer_thm1_constraints(ch, joint).map(Some),
    }
}

/// Union over sampled auxiliary joints of the chosen bound, with local
/// refinement. For the outer bounds this approximates the union from
/// inside; it is not a certified outer region.
pub fn search_region(ch: &WiretapBc, aux: &AuxSpec, bound: Bound, budget: usize, seed: u64) -> Result<RateRegion> {
    Ok(search_region_outcome(ch, aux, bound, budget, seed, true)?.region)
}

/// [`search_region`] with evaluation counts and optional refinement.
pub fn search_region_outcome(
    ch: &WiretapBc,
    aux: &AuxSpec,
    bound: Bound,
    budget: usize,
    seed: u64,
    refine: bool,
) -> Result<SearchOutcome> {
    let shape = bound_shape(ch, aux, bound)?;
    run_search(&shape, |j| bound_eval(ch, bound, j), budget, seed, refine)
}
