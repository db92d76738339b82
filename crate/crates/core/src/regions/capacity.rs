//! Secrecy capacity regions of the channel classes whose inner and outer
//! bounds meet. Each evaluator first verifies its ordering premises and
//! refuses to run when they fail.

use super::bounds::{with_outputs, Constraints};
use super::hull::{RatePoint, RateRegion};
use super::info::Info;
use super::model::{AuxSpec, ModelShape, VarSpec};
use super::search::run_search;
use crate::error::{Error, Result};
use crate::ordering::{
    check_degraded, check_less_noisy, simplex_grid, Holds, Witness, DEFAULT_DEGRADED_TOL, DEFAULT_SAMPLES,
};
use crate::probcore::{Dmc, JointPmf, Receiver, WiretapBc, PRODUCT_ALPHABET_CAP};
use rayon::prelude::*;

/// Largest simplex grid swept by [`capacity_deterministic`].
pub const GRID_POINT_CAP: usize = 2_000_000;

/// Marginal tolerance when attaching a coupling built from an LP witness.
const COUPLING_TOL: f64 = 1e-6;

fn var(name: &str, size: usize, parents: &[&str]) -> VarSpec {
    VarSpec { name: name.into(), size, parents: parents.iter().map(|s| s.to_string()).collect() }
}

fn require_less_noisy(strong: &Dmc, weak: &Dmc, what: &str, seed: u64) -> Result<()> {
    let r = check_less_noisy(strong, weak, DEFAULT_SAMPLES, seed)?;
    if r.holds == Holds::Refuted {
        return Err(Error::Premise(format!("{what} (concavity violated by {:e})", r.residual)));
    }
    Ok(())
}

fn require_degraded(strong: &Dmc, weak: &Dmc, what: &str) -> Result<Dmc> {
    let r = check_degraded(strong, weak, DEFAULT_DEGRADED_TOL)?;
    match (r.holds, r.witness) {
        (Holds::Proved, Some(Witness::Kernel(q))) => Ok(q),
        _ => Err(Error::Premise(format!("{what} (degradation residual {:e})", r.residual))),
    }
}

/// Region of a deterministic BC (both legitimate outputs functions of X)
/// with an arbitrary eavesdropper, swept over input laws on a simplex grid
/// of resolution `1/grid`.
pub fn capacity_deterministic(ch: &WiretapBc, grid: usize) -> Result<RateRegion> {
    if !ch.ch_y1.is_deterministic() {
        return Err(Error::NotDeterministic("y1"));
    }
    if !ch.ch_y2.is_deterministic() {
        return Err(Error::NotDeterministic("y2"));
    }
    if grid == 0 {
        return Err(Error::InvalidArgument("grid resolution must be positive".into()));
    }
    let n = ch.input_size();
    let count = binomial(grid + n - 1, n - 1);
    if count > GRID_POINT_CAP {
        return Err(Error::CapExceeded(format!("{count} grid points exceed {GRID_POINT_CAP}")));
    }
    let points: Vec<RatePoint> = simplex_grid(n, grid)
        .par_iter()
        .map(|px| {
            let j = JointPmf::new(vec![crate::probcore::Axis::new("X", n)], px.clone())?;
            Ok(deterministic_constraints(ch, &j)?.corners())
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(RateRegion::from_points(points))
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    let mut r: usize = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// `R1 <= H(Y1|Z)`, `R2 <= H(Y2|Z)`, `R1 + R2 <= H(Y1 Y2|Z)` for a joint over `X`.
pub fn deterministic_constraints(ch: &WiretapBc, joint: &JointPmf) -> Result<Constraints> {
    let j = with_outputs(ch, joint, &[])?;
    let f = Info::new(&j)?;
    Ok(Constraints {
        r1: vec![f.h(&["Y1"], &["Z"])?],
        r2: vec![f.h(&["Y2"], &["Z"])?],
        sum: vec![f.h(&["Y1", "Y2"], &["Z"])?],
    })
}

/// Constraints of the semi-deterministic region on a joint over `(Q, U, X)`.
pub fn semidet_constraints(ch: &WiretapBc, joint: &JointPmf) -> Result<Constraints> {
    let j = with_outputs(ch, joint, &["Q", "U"])?;
    let f = Info::new(&j)?;
    let r2 = f.i(&["U"], &["Y2"], &["Q"])? - f.i(&["U"], &["Z"], &["Q"])?;
    Ok(Constraints {
        r1: vec![f.h(&["Y1"], &["Z", "Q"])?],
        r2: vec![r2],
        sum: vec![f.h(&["Y1"], &["Z", "Q", "U"])? + r2],
    })
}

/// Region of the semi-deterministic BC (Y1 a function of X) whose second
/// receiver is less noisy than the eavesdropper. Searches `P_Q P_{U|Q} P_{X|U}`.
pub fn capacity_semidet(ch: &WiretapBc, aux: &AuxSpec, budget: usize, seed: u64) -> Result<RateRegion> {
    if !ch.ch_y1.is_deterministic() {
        return Err(Error::NotDeterministic("y1"));
    }
    require_less_noisy(&ch.ch_y2, &ch.ch_z, "Y2 is not less noisy than Z", seed)?;
    let shape = ModelShape::new(vec![
        var("Q", aux.card("Q"), &[]),
        var("U", aux.card("U"), &["Q"]),
        var("X", ch.input_size(), &["U"]),
    ])?;
    Ok(run_search(&shape, |j| semidet_constraints(ch, j).map(Some), budget, seed, true)?.region)
}

/// Constraints of the degraded region on a joint over `(T, U, X)`.
pub fn degraded_constraints(ch: &WiretapBc, joint: &JointPmf) -> Result<Constraints> {
    let j = with_outputs(ch, joint, &["T", "U"])?;
    let f = Info::new(&j)?;
    Ok(Constraints {
        r1: vec![f.i(&["X"], &["Y1"], &["T", "U"])? - f.i(&["X"], &["Z"], &["T", "U"])?],
        r2: vec![f.i(&["U"], &["Y2"], &["T"])? - f.i(&["U"], &["Z"], &["T"])?],
        sum: Vec::new(),
    })
}

/// Region of the degraded WBC: Y2 degraded with respect to Y1 and both
/// receivers less noisy than the eavesdropper. Searches general `P_{TUX}`.
pub fn capacity_degraded(ch: &WiretapBc, aux: &AuxSpec, budget: usize, seed: u64) -> Result<RateRegion> {
    require_degraded(&ch.ch_y1, &ch.ch_y2, "Y2 is not degraded with respect to Y1")?;
    require_less_noisy(&ch.ch_y1, &ch.ch_z, "Y1 is not less noisy than Z", seed)?;
    require_less_noisy(&ch.ch_y2, &ch.ch_z, "Y2 is not less noisy than Z", seed)?;
    let shape = ModelShape::new(vec![
        var("T", aux.card("T"), &[]),
        var("U", aux.card("U"), &["T"]),
        var("X", ch.input_size(), &["T", "U"]),
    ])?;
    Ok(run_search(&shape, |j| degraded_constraints(ch, j).map(Some), budget, seed, true)?.region)
}

/// Constraints of the less-noisy region on a joint over `(T, U, X)`. The
/// term `I(X;Y1|ZUT)` depends on how Z is coupled to Y1; callers should pass
/// a channel coupled through the degrading kernel.
pub fn less_noisy_constraints(ch: &WiretapBc, joint: &JointPmf) -> Result<Constraints> {
    let j = with_outputs(ch, joint, &["T", "U"])?;
    let f = Info::new(&j)?;
    let r2 = f.i(&["U"], &["Y2"], &["T"])? - f.i(&["U"], &["Z"], &["T"])?;
    Ok(Constraints { r1: Vec::new(), r2: vec![r2], sum: vec![f.i(&["X"], &["Y1"], &["Z", "U", "T"])? + r2] })
}

/// Verifies the less-noisy premises and returns the channel with Z coupled
/// to Y1 through the degrading kernel.
pub fn less_noisy_premises(ch: &WiretapBc, seed: u64) -> Result<WiretapBc> {
    require_less_noisy(&ch.ch_y1, &ch.ch_y2, "Y1 is not less noisy than Y2", seed)?;
    let q = require_degraded(&ch.ch_y1, &ch.ch_z, "Z is not degraded with respect to Y1")?;
    ch.clone().with_z_through(Receiver::Y1, &q, COUPLING_TOL)
}

/// Region of the WBC with Y1 less noisy than Y2 and Z degraded with respect
/// to Y1. Searches `P_T P_{U|T} P_{X|U}`.
pub fn capacity_less_noisy(ch: &WiretapBc, aux: &AuxSpec, budget: usize, seed: u64) -> Result<RateRegion> {
    let coupled = less_noisy_premises(ch, seed)?;
    let shape = ModelShape::new(vec![
        var("T", aux.card("T"), &[]),
        var("U", aux.card("U"), &["T"]),
        var("X", ch.input_size(), &["U"]),
    ])?;
    Ok(run_search(&shape, |j| less_noisy_constraints(&coupled, j).map(Some), budget, seed, true)?.region)
}

/// Constraints of the product region on a joint over `(U1, X1, U2, X2)`.
/// Component 1 feeds `(Y1, T1, Z1)` and component 2 feeds `(Y2, T2, Z2)`,
/// where receiver 1 observes `(Y1, Y2)` and receiver 2 observes `(T1, T2)`.
pub fn product_constraints(bc1: &WiretapBc, bc2: &WiretapBc, joint: &JointPmf) -> Result<Constraints> {
    for name in ["U1", "X1", "U2", "X2"] {
        joint.axis_index(name)?;
    }
    if joint.axes().len() != 4 {
        return Err(Error::InvalidArgument("product joint must have exactly U1, X1, U2, X2".into()));
    }
    let defect = joint.independence_defect(&["U1", "X1"], &["U2", "X2"])?;
    if defect > 1e-9 {
        return Err(Error::Factorization(format!("(U1, X1) and (U2, X2) are dependent (defect {defect:e})")));
    }
    let j1 = joint.marginal(&["U1", "X1"])?.append_outputs("X1", ["Y1", "T1", "Z1"], bc1)?;
    let j2 = joint.marginal(&["U2", "X2"])?.append_outputs("X2", ["Y2", "T2", "Z2"], bc2)?;
    let (f1, f2) = (Info::new(&j1)?, Info::new(&j2)?);
    let r1 = f1.i(&["X1"], &["Y1"], &["Z1"])? + f2.i(&["U2"], &["Y2"], &[])? - f2.i(&["U2"], &["Z2"], &[])?;
    let r2 = f2.i(&["X2"], &["T2"], &["Z2"])? + f1.i(&["U1"], &["T1"], &[])? - f1.i(&["U1"], &["Z1"], &[])?;
    Ok(Constraints {
        r1: vec![r1],
        r2: vec![r2],
        sum: vec![r1 + f2.i(&["X2"], &["T2"], &["Z2", "U2"])?, r2 + f1.i(&["X1"], &["Y1"], &["Z1", "U1"])?],
    })
}

pub fn eval_product(bc1: &WiretapBc, bc2: &WiretapBc, joint: &JointPmf) -> Result<RateRegion> {
    Ok(product_constraints(bc1, bc2, joint)?.region())
}

/// Verifies the component orderings of the product theorem and returns both
/// components with their eavesdropper coupled through the degrading kernel.
pub fn product_premises(bc1: &WiretapBc, bc2: &WiretapBc, seed: u64) -> Result<(WiretapBc, WiretapBc)> {
    let n = bc1.input_size().saturating_mul(bc2.input_size());
    if n > PRODUCT_ALPHABET_CAP {
        return Err(Error::CapExceeded(format!("product input alphabet {n} exceeds {PRODUCT_ALPHABET_CAP}")));
    }
    require_less_noisy(&bc1.ch_y1, &bc1.ch_y2, "component 1: Y1 is not less noisy than T1", seed)?;
    require_less_noisy(&bc1.ch_y2, &bc1.ch_z, "component 1: T1 is not less noisy than Z1", seed)?;
    let q1 = require_degraded(&bc1.ch_y1, &bc1.ch_z, "component 1: Z1 is not degraded with respect to Y1")?;
    require_less_noisy(&bc2.ch_y2, &bc2.ch_y1, "component 2: T2 is not less noisy than Y2", seed)?;
    require_less_noisy(&bc2.ch_y1, &bc2.ch_z, "component 2: Y2 is not less noisy than Z2", seed)?;
    let q2 = require_degraded(&bc2.ch_y2, &bc2.ch_z, "component 2: Z2 is not degraded with respect to T2")?;
    Ok((
        bc1.clone().with_z_through(Receiver::Y1, &q1, COUPLING_TOL)?,
        bc2.clone().with_z_through(Receiver::Y2, &q2, COUPLING_TOL)?,
    ))
}

/// Region of the product of two inversely less-noisy WBCs. Searches
/// `P_{U1 X1} P_{U2 X2}`.
pub fn capacity_product(
    bc1: &WiretapBc,
    bc2: &WiretapBc,
    aux: &AuxSpec,
    budget: usize,
    seed: u64,
) -> Result<RateRegion> {
    let (c1, c2) = product_premises(bc1, bc2, seed)?;
    let shape = ModelShape::new(vec![
        var("U1", aux.card("U1"), &[]),
        var("X1", bc1.input_size(), &["U1"]),
        var("U2", aux.card("U2"), &[]),
        var("X2", bc2.input_size(), &["U2"]),
    ])?;
    Ok(run_search(&shape, |j| product_constraints(&c1, &c2, j).map(Some), budget, seed, true)?.region)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::becbsc::{secrecy_corner, BecBscParams};
    use crate::probcore::{h2, make_bec, make_bsc, make_deterministic, star, Axis};
    use crate::regions::hull::{hausdorff, sweep_lambdas};

    fn bec_bsc() -> WiretapBc {
        WiretapBc::new(make_bec(0.2).unwrap(), make_bsc(0.1).unwrap(), make_bsc(0.25).unwrap()).unwrap()
    }

    fn closed_form(params: &BecBscParams) -> RateRegion {
        RateRegion::from_points(
            (0..=2000)
                .map(|k| {
                    let (a, b) = secrecy_corner(params, 0.5 * k as f64 / 2000.0);
                    RatePoint::new(a, b)
                })
                .collect(),
        )
    }

    #[test]
    fn deterministic_examples() {
        let id = Dmc::identity(2).unwrap();
        let ch = WiretapBc::new(id.clone(), id.clone(), Dmc::constant(2).unwrap()).unwrap();
        let r = capacity_deterministic(&ch, 64).unwrap();
        assert!((r.support(1.0) - 1.0).abs() < 1e-12);
        let ch = WiretapBc::new(id.clone(), id.clone(), id.clone()).unwrap();
        assert_eq!(capacity_deterministic(&ch, 64).unwrap().hull(), RateRegion::origin().hull());
        let noisy = WiretapBc::new(make_bsc(0.1).unwrap(), id.clone(), id).unwrap();
        assert!(matches!(capacity_deterministic(&noisy, 8), Err(Error::NotDeterministic("y1"))));
    }

    #[test]
    fn blackwell_channel_matches_entropy_oracle() {
        let y1 = make_deterministic(&[0, 1, 1], 2).unwrap();
        let y2 = make_deterministic(&[0, 0, 1], 2).unwrap();
        let ch = WiretapBc::new(y1, y2, Dmc::constant(3).unwrap()).unwrap();
        let r = capacity_deterministic(&ch, 256).unwrap();
        // oracle: max over the same grid of H(Y1) + lambda H(Y2) capped by H(X)
        for lambda in [0.0, 0.5, 1.0, 2.0] {
            let mut best: f64 = 0.0;
            for p in simplex_grid(3, 256) {
                let (hy1, hy2) = (h2(p[1] + p[2]), h2(p[2]));
                let hx: f64 = p.iter().filter(|&&q| q > 0.0).map(|&q| -q * q.log2()).sum();
                let pts = [(hy1, (hx - hy1).min(hy2)), ((hx - hy2).min(hy1), hy2)];
                for (a, b) in pts {
                    best = best.max(a + lambda * b);
                }
            }
            assert!((r.support(lambda) - best).abs() < 1e-9, "lambda {lambda}");
        }
        assert!((r.support(1.0) - 3f64.log2()).abs() < 1e-3);
    }

    #[test]
    fn less_noisy_matches_closed_form() {
        let params = BecBscParams::new(0.2, 0.1, 0.25).unwrap();
        let r = capacity_less_noisy(&bec_bsc(), &AuxSpec::default(), 1000, 11).unwrap();
        let d = hausdorff(&r, &closed_form(&params));
        assert!(d < 0.02, "hausdorff {d}");
    }

    #[test]
    fn less_noisy_matched_parameterization() {
        // U uniform binary, X = U xor Bern(x): the constraint polygon reproduces the closed-form corner
        let params = BecBscParams::new(0.2, 0.1, 0.25).unwrap();
        let coupled = less_noisy_premises(&bec_bsc(), 0).unwrap();
        for x in [0.0, 0.1, 0.3, 0.5] {
            let j = JointPmf::from_fn(vec![Axis::new("T", 1), Axis::new("U", 2), Axis::new("X", 2)], |i| {
                0.5 * if i[1] == i[2] { 1.0 - x } else { x }
            })
            .unwrap();
            let c = less_noisy_constraints(&coupled, &j).unwrap();
            let (r1, r2) = secrecy_corner(&params, x);
            assert!((c.r2[0] - r2).abs() < 1e-6);
            assert!((c.sum[0] - (r1 + r2)).abs() < 1e-6);
        }
    }

    #[test]
    fn less_noisy_premise_failure() {
        // Z = BSC(0.05) is not degraded with respect to BEC(0.2)
        let ch = WiretapBc::new(make_bec(0.2).unwrap(), make_bsc(0.1).unwrap(), make_bsc(0.05).unwrap()).unwrap();
        assert!(matches!(capacity_less_noisy(&ch, &AuxSpec::default(), 10, 0), Err(Error::Premise(_))));
    }

    #[test]
    fn less_noisy_collapses_when_z_copies_receivers() {
        let w = make_bsc(0.2).unwrap();
        let ch = WiretapBc::new(w.clone(), w.clone(), w).unwrap();
        let r = capacity_less_noisy(&ch, &AuxSpec::default(), 50, 0).unwrap();
        assert!(r.support(1.0) < 1e-9);
    }

    #[test]
    fn degraded_bsc_cascade_matches_parametric_sweep() {
        let ch = WiretapBc::new(make_bsc(0.05).unwrap(), make_bsc(0.15).unwrap(), make_bsc(0.3).unwrap()).unwrap();
        let r = capacity_degraded(&ch, &AuxSpec::new([("U", 2)]).unwrap(), 1500, 2).unwrap();
        // U uniform, X = U xor Bern(x)
        let oracle = RateRegion::from_points(
            (0..=1000)
                .map(|k| {
                    let x = 0.5 * k as f64 / 1000.0;
                    let r1 = h2(star(0.05, x)) - h2(0.05) - h2(star(0.3, x)) + h2(0.3);
                    let r2 = h2(star(0.3, x)) - h2(star(0.15, x));
                    RatePoint::new(r1, r2)
                })
                .collect(),
        );
        let d = hausdorff(&r, &oracle);
        assert!(d < 0.01, "hausdorff {d}");
    }

    #[test]
    fn degraded_u_equal_x_gives_user_two_only() {
        let ch = WiretapBc::new(make_bsc(0.05).unwrap(), make_bsc(0.15).unwrap(), make_bsc(0.3).unwrap()).unwrap();
        let j = JointPmf::from_fn(vec![Axis::new("T", 1), Axis::new("U", 2), Axis::new("X", 2)], |i| {
            if i[1] == i[2] {
                0.5
            } else {
                0.0
            }
        })
        .unwrap();
        let c = degraded_constraints(&ch, &j).unwrap();
        assert!(c.r1[0].abs() < 1e-12);
        assert!((c.r2[0] - (h2(0.3) - h2(0.15))).abs() < 1e-12);
    }

    #[test]
    fn semidet_constant_z() {
        let ch = WiretapBc::new(Dmc::identity(2).unwrap(), make_bsc(0.1).unwrap(), Dmc::constant(2).unwrap()).unwrap();
        let j = JointPmf::from_fn(vec![Axis::new("Q", 2), Axis::new("U", 2), Axis::new("X", 2)], |i| {
            [0.3, 0.7][i[0]] * 0.5 * if i[1] == i[2] { 0.8 } else { 0.2 }
        })
        .unwrap();
        let c = semidet_constraints(&ch, &j).unwrap();
        let want = j.conditional_entropy(&["X"], &["Q"]).unwrap();
        assert!((c.r1[0] - want).abs() < 1e-12);
        let r = capacity_semidet(&ch, &AuxSpec::default(), 200, 1).unwrap();
        let s = r.support(0.0);
        assert!(s <= 1.0 + 1e-12 && s > 0.99, "{s}");
    }

    #[test]
    fn semidet_inside_deterministic_when_both_deterministic() {
        let id = Dmc::identity(2).unwrap();
        let ch = WiretapBc::new(id.clone(), id, make_bsc(0.3).unwrap()).unwrap();
        let det = capacity_deterministic(&ch, 128).unwrap();
        let semi = capacity_semidet(&ch, &AuxSpec::default(), 400, 3).unwrap();
        assert!(semi.support_excess(&det, &sweep_lambdas()) <= 1e-3);
    }

    #[test]
    fn semidet_premise_checks() {
        let ch = WiretapBc::new(make_bsc(0.1).unwrap(), make_bsc(0.1).unwrap(), make_bsc(0.2).unwrap()).unwrap();
        assert!(matches!(capacity_semidet(&ch, &AuxSpec::default(), 10, 0), Err(Error::NotDeterministic("y1"))));
        let ch = WiretapBc::new(Dmc::identity(2).unwrap(), make_bsc(0.3).unwrap(), make_bsc(0.1).unwrap()).unwrap();
        assert!(matches!(capacity_semidet(&ch, &AuxSpec::default(), 10, 0), Err(Error::Premise(_))));
    }

    fn trivial() -> WiretapBc {
        let one = Dmc::identity(1).unwrap();
        WiretapBc::new(one.clone(), one.clone(), one).unwrap()
    }

    #[test]
    fn product_with_trivial_component_is_less_noisy_region() {
        let aux = AuxSpec::new([("U1", 4), ("U2", 1), ("U", 4)]).unwrap();
        let prod = capacity_product(&bec_bsc(), &trivial(), &aux, 800, 4).unwrap();
        let ln = capacity_less_noisy(&bec_bsc(), &aux, 800, 4).unwrap();
        assert!(hausdorff(&prod, &ln) < 0.01, "{}", hausdorff(&prod, &ln));
    }

    #[test]
    fn product_with_copied_eavesdroppers_is_origin() {
        let w = make_bsc(0.1).unwrap();
        let bc = WiretapBc::new(w.clone(), w.clone(), w).unwrap();
        let r = capacity_product(&bc, &bc, &AuxSpec::default(), 100, 0).unwrap();
        assert!(r.support(1.0) < 1e-9);
    }

    #[test]
    fn product_rejects_correlated_inputs() {
        let j = JointPmf::from_fn(
            vec![Axis::new("U1", 2), Axis::new("X1", 2), Axis::new("U2", 2), Axis::new("X2", 2)],
            |i| if i[0] == i[2] && i[1] == i[3] && i[0] == i[1] { 0.5 } else { 0.0 },
        )
        .unwrap();
        assert!(matches!(eval_product(&bec_bsc(), &bec_bsc(), &j), Err(Error::Factorization(_))));
    }
}
