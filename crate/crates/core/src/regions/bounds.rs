use super::hull::{pentagon_corners, RatePoint, RateRegion};
use super::info::Info;
use crate::error::{Error, Result};
use crate::probcore::{JointPmf, WiretapBc};
use serde::{Deserialize, Serialize};

pub(crate) const OUTPUTS: [&str; 3] = ["Y1", "Y2", "Z"];

/// Raw right-hand sides of a rate region's constraints, before clamping:
/// `r1 <= each of r1`, `r2 <= each of r2`, `r1 + r2 <= each of sum`.
/// An empty list means the rate is unconstrained by that family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraints {
    pub r1: Vec<f64>,
    pub r2: Vec<f64>,
    pub sum: Vec<f64>,
}

fn tightest(v: &[f64]) -> f64 {
    v.iter().map(|&x| x.max(0.0)).fold(f64::INFINITY, f64::min)
}

impl Constraints {
    /// Tightest clamped bounds `(r1, r2, sum)`.
    pub fn bounds(&self) -> (f64, f64, f64) {
        let (a, b, s) = (tightest(&self.r1), tightest(&self.r2), tightest(&self.sum));
        let s = s.min(a + b);
        (a, b, s)
    }

    /// The two nontrivial corner points of the polygon.
    pub fn corners(&self) -> [RatePoint; 2] {
        let (a, b, s) = self.bounds();
        pentagon_corners(a, b, s)
    }

    pub fn region(&self) -> RateRegion {
        RateRegion::from_points(self.corners().to_vec())
    }

    /// Support value of the polygon in direction `lambda`.
    pub fn support(&self, lambda: f64) -> f64 {
        self.corners()
            .iter()
            .map(|p| if lambda.is_infinite() { p.r2 } else { p.r1 + lambda * p.r2 })
            .fold(0.0, f64::max)
    }
}

/// Checks that `joint` has exactly the axes `aux` plus `X`, with `X`
/// matching the channel input, then appends the channel outputs.
pub(crate) fn with_outputs(ch: &WiretapBc, joint: &JointPmf, aux: &[&str]) -> Result<JointPmf> {
    for name in aux.iter().chain(["X"].iter()) {
        joint.axis_index(name)?;
    }
    if let Some(extra) = joint.axes().iter().find(|a| a.name != "X" && !aux.contains(&a.name.as_str())) {
        return Err(Error::InvalidArgument(format!("unexpected axis `{}`", extra.name)));
    }
    if joint.axis_size("X")? != ch.input_size() {
        return Err(Error::DimensionMismatch(format!(
            "X has {} symbols, channel input has {}",
            joint.axis_size("X")?,
            ch.input_size()
        )));
    }
    joint.append_outputs("X", OUTPUTS, ch)
}

/// Feasibility side condition of the inner bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideCondition {
    /// `I(U2;Y2|TQ) + I(U1;Y1|QT)`
    pub lhs: f64,
    /// `I(U1;U2|TQ)`
    pub rhs: f64,
}

impl SideCondition {
    pub fn holds(&self) -> bool {
        self.lhs >= self.rhs - 1e-12
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InnerEval {
    Feasible(RateRegion),
    Infeasible(SideCondition),
}

impl InnerEval {
    pub fn region(&self) -> Option<&RateRegion> {
        match self {
            InnerEval::Feasible(r) => Some(r),
            InnerEval::Infeasible(_) => None,
        }
    }
}

pub const INNER_AUX: [&str; 4] = ["T", "Q", "U1", "U2"];
pub const OUTER_COR_AUX: [&str; 5] = ["T", "V1", "V2", "U1", "U2"];
pub const OUTER_THM1_AUX: [&str; 7] = ["T", "V1", "V2", "U1", "U2", "S1", "S2"];

/// Constraints of the superposition / double-binning inner bound on a joint
/// over `(T, Q, U1, U2, X)`, together with its side condition.
pub fn inner_constraints(ch: &WiretapBc, joint: &JointPmf) -> Result<(Constraints, SideCondition)> {
    let j = with_outputs(ch, joint, &INNER_AUX)?;
    let f = Info::new(&j)?;
    let mi = |a: &[&str], b: &[&str], c: &[&str]| f.i(a, b, c);

    let qu1_y1 = mi(&["Q", "U1"], &["Y1"], &["T"])?;
    let qu2_y2 = mi(&["Q", "U2"], &["Y2"], &["T"])?;
    let qu1_z = mi(&["Q", "U1"], &["Z"], &["T"])?;
    let qu2_z = mi(&["Q", "U2"], &["Z"], &["T"])?;
    let u1_y1 = mi(&["U1"], &["Y1"], &["T", "Q"])?;
    let u2_y2 = mi(&["U2"], &["Y2"], &["T", "Q"])?;
    let all_z = mi(&["Q", "U1", "U2"], &["Z"], &["T"])?;
    let cover = mi(&["U1"], &["U2"], &["T", "Q"])?;
    let q_z = mi(&["Q"], &["Z"], &["T"])?;

    let c = Constraints {
        r1: vec![qu1_y1 - qu1_z],
        r2: vec![qu2_y2 - qu2_z],
        sum: vec![
            u1_y1 + qu2_y2 - all_z - cover,
            u2_y2 + qu1_y1 - all_z - cover,
            qu1_y1 + qu2_y2 - all_z - cover - q_z,
        ],
    };
    Ok((c, SideCondition { lhs: u2_y2 + u1_y1, rhs: cover }))
}

/// Inner bound region for one joint, or the violated side condition.
pub fn eval_inner(ch: &WiretapBc, joint: &JointPmf) -> Result<InnerEval> {
    let (c, side) = inner_constraints(ch, joint)?;
    Ok(if side.holds() { InnerEval::Feasible(c.region()) } else { InnerEval::Infeasible(side) })
}

/// Constraints of the reduced outer bound on a joint over `(T, V1, V2, U1, U2, X)`.
pub fn outer_cor_constraints(ch: &WiretapBc, joint: &JointPmf) -> Result<Constraints> {
    let j = with_outputs(ch, joint, &OUTER_COR_AUX)?;
    let f = Info::new(&j)?;
    let mi = |a: &[&str], b: &[&str], c: &[&str]| f.i(a, b, c);
    Ok(Constraints {
        r1: vec![mi(&["U1"], &["Y1"], &["T", "V1"])? - mi(&["U1"], &["Z"], &["T", "V1"])?],
        r2: vec![mi(&["U2"], &["Y2"], &["T", "V2"])? - mi(&["U2"], &["Z"], &["T", "V2"])?],
        sum: vec![
            mi(&["X"], &["Y2"], &["T", "Z", "V1"])? + mi(&["U1"], &["Y1"], &["T", "V1"])?
                - mi(&["U1"], &["Z", "Y2"], &["T", "V1"])?,
            mi(&["X"], &["Y1"], &["T", "Z", "V2"])? + mi(&["U2"], &["Y2"], &["T", "V2"])?
                - mi(&["U2"], &["Z", "Y1"], &["T", "V2"])?,
        ],
    })
}

pub fn eval_outer_cor(ch: &WiretapBc, joint: &JointPmf) -> Result<RateRegion> {
    Ok(outer_cor_constraints(ch, joint)?.region())
}

/// Largest deviation of `joint` from `P(aux) P(X | U1 U2 S1 S2)`, measured as
/// the conditional mutual information `I(T V1 V2; X | U1 U2 S1 S2)`.
pub fn thm1_factorization_defect(joint: &JointPmf) -> Result<f64> {
    joint.conditional_mi(&["T", "V1", "V2"], &["X"], &["U1", "U2", "S1", "S2"])
}

/// Constraints of the general outer bound on a joint over
/// `(T, V1, V2, U1, U2, S1, S2, X)` with `X` depending on `(U1, U2, S1, S2)` only.
pub fn outer_thm1_constraints(ch: &WiretapBc, joint: &JointPmf) -> Result<Constraints> {
    let j = with_outputs(ch, joint, &OUTER_THM1_AUX)?;
    let defect = thm1_factorization_defect(joint)?;
    if defect > 1e-9 {
        return Err(Error::Factorization(format!("I(T V1 V2; X | U1 U2 S1 S2) = {defect:e}")));
    }
    let f = Info::new(&j)?;
    let mi = |a: &[&str], b: &[&str], c: &[&str]| f.i(a, b, c);
    let sec = |u: &str, y: &[&str], c: &[&str]| -> Result<f64> { Ok(mi(&[u], y, c)? - mi(&[u], &["Z"], c)?) };
    Ok(Constraints {
        r1: vec![
            sec("U1", &["Y1"], &["T", "V1"])?,
            sec("U1", &["Y1", "Y2"], &["T", "V1", "V2"])?,
            sec("U1", &["Y1"], &["T", "V1", "U2"])?,
            sec("U1", &["Y1", "Y2"], &["T", "V1", "U2", "V2"])?,
        ],
        r2: vec![
            sec("U2", &["Y2"], &["T", "V2"])?,
            sec("U2", &["Y2", "Y1"], &["T", "V1", "V2"])?,
            sec("U2", &["Y2"], &["T", "V2", "U1"])?,
            sec("U2", &["Y2", "Y1"], &["T", "U1", "V1", "V2"])?,
        ],
        sum: vec![
            mi(&["X"], &["Y2"], &["T", "Z", "V1"])? + mi(&["U1", "S1"], &["Y1"], &["T", "V1"])?
                - mi(&["U1", "S1"], &["Z", "Y2"], &["T", "V1"])?,
            mi(&["X"], &["Y2"], &["T", "Z", "V1", "V2"])? + mi(&["U1", "S1"], &["Y1", "Y2"], &["T", "V1", "V2"])?
                - mi(&["U1", "S1"], &["Z", "Y2"], &["T", "V1", "V2"])?,
            mi(&["X"], &["Y1"], &["T", "Z", "V2"])? + mi(&["U2", "S2"], &["Y2"], &["T", "V2"])?
                - mi(&["U2", "S2"], &["Z", "Y1"], &["T", "V2"])?,
            mi(&["X"], &["Y1"], &["T", "Z", "V1", "V2"])? + mi(&["U2", "S2"], &["Y2", "Y1"], &["T", "V1", "V2"])?
                - mi(&["U2", "S2"], &["Z", "Y1"], &["T", "V1", "V2"])?,
        ],
    })
}

pub fn eval_outer_thm1(ch: &WiretapBc, joint: &JointPmf) -> Result<RateRegion> {
    Ok(outer_thm1_constraints(ch, joint)?.region())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::becbsc::{secrecy_corner, BecBscParams};
    use crate::probcore::{make_bec, make_bsc, Axis, Dmc};
    use crate::regions::model::{AuxSpec, FactorModel, ModelShape};
    use crate::rng::rng_for;

    fn bec_bsc() -> WiretapBc {
        WiretapBc::new(make_bec(0.2).unwrap(), make_bsc(0.1).unwrap(), make_bsc(0.25).unwrap()).unwrap()
    }

    fn random_joint(aux: &[&str], x_parents: Option<&[&str]>, seed: u64) -> JointPmf {
        let shape = ModelShape::chain(&AuxSpec::new(aux.iter().map(|&a| (a, 2))).unwrap(), aux, 2, x_parents).unwrap();
        FactorModel::sample(&shape, &mut rng_for(seed, 0)).joint().unwrap()
    }

    /// Joint with every auxiliary constant and `X ~ px`.
    fn constant_aux(aux: &[&str], px: &[f64]) -> JointPmf {
        let mut axes: Vec<Axis> = aux.iter().map(|a| Axis::new(*a, 1)).collect();
        axes.push(Axis::new("X", px.len()));
        JointPmf::new(axes, px.to_vec()).unwrap()
    }

    #[test]
    fn z_equal_y1_kills_rate_one() {
        let w = make_bsc(0.15).unwrap();
        let ch = WiretapBc::new(w.clone(), make_bsc(0.3).unwrap(), w).unwrap();
        for seed in 0..10 {
            let j = random_joint(&INNER_AUX, None, seed);
            let (c, _) = inner_constraints(&ch, &j).unwrap();
            assert!(c.r1[0] <= 1e-12);
            let j = random_joint(&OUTER_COR_AUX, None, seed);
            assert!(outer_cor_constraints(&ch, &j).unwrap().r1[0] <= 1e-12);
        }
    }

    #[test]
    fn useless_eavesdropper_removes_secrecy_terms() {
        let ch = WiretapBc::new(make_bsc(0.01).unwrap(), make_bsc(0.02).unwrap(), Dmc::constant(2).unwrap()).unwrap();
        // T = Q = const, U1 = U2 = X
        let j = JointPmf::from_fn(
            vec![Axis::new("T", 1), Axis::new("Q", 1), Axis::new("U1", 2), Axis::new("U2", 2), Axis::new("X", 2)],
            |i| if i[2] == i[4] && i[3] == i[4] { 0.5 } else { 0.0 },
        )
        .unwrap();
        let (c, side) = inner_constraints(&ch, &j).unwrap();
        let c1 = 1.0 - crate::probcore::h2(0.01);
        let c2 = 1.0 - crate::probcore::h2(0.02);
        assert!((c.r1[0] - c1).abs() < 1e-12);
        assert!((c.r2[0] - c2).abs() < 1e-12);
        // Marton sum: I(U1;Y1) + I(U2;Y2) - I(U1;U2)
        assert!((c.sum[2] - (c1 + c2 - 1.0)).abs() < 1e-12);
        assert!(side.holds());
    }

    #[test]
    fn inner_matches_closed_form_corner() {
        // Q = U uniform, U2 = const, U1 = X = U xor Bern(x)
        let ch = bec_bsc();
        let params = BecBscParams::new(0.2, 0.1, 0.25).unwrap();
        for x in [0.0, 0.05, 0.2, 0.37, 0.5] {
            let j = JointPmf::from_fn(
                vec![Axis::new("T", 1), Axis::new("Q", 2), Axis::new("U1", 2), Axis::new("U2", 1), Axis::new("X", 2)],
                |i| if i[2] == i[4] { 0.5 * if i[1] == i[4] { 1.0 - x } else { x } } else { 0.0 },
            )
            .unwrap();
            let (c, side) = inner_constraints(&ch, &j).unwrap();
            assert!(side.holds());
            let (r1, r2) = secrecy_corner(&params, x);
            let region = c.region();
            assert!(region.contains(RatePoint::new(r1, r2), 1e-9), "x = {x}");
            assert!((region.support(1.0) - (r1 + r2)).abs() < 1e-9);
            assert!((region.support(f64::INFINITY) - r2).abs() < 1e-9);
        }
    }

    #[test]
    fn outer_cor_degenerate_aux() {
        // T, V1, V2 constant and U1 = U2 = X: single rates reduce to I(X;Yj) - I(X;Z)
        let ch = bec_bsc();
        let px = [0.3, 0.7];
        let j = JointPmf::from_fn(
            vec![
                Axis::new("T", 1),
                Axis::new("V1", 1),
                Axis::new("V2", 1),
                Axis::new("U1", 2),
                Axis::new("U2", 2),
                Axis::new("X", 2),
            ],
            |i| if i[3] == i[5] && i[4] == i[5] { px[i[5]] } else { 0.0 },
        )
        .unwrap();
        let c = outer_cor_constraints(&ch, &j).unwrap();
        let x = constant_aux(&[], &px).append_outputs("X", OUTPUTS, &ch).unwrap();
        let m = |y: &str| x.mutual_information(&["X"], &[y]).unwrap();
        assert!((c.r1[0] - (m("Y1") - m("Z"))).abs() < 1e-12);
        assert!((c.r2[0] - (m("Y2") - m("Z"))).abs() < 1e-12);
        // all auxiliaries constant: every single-rate bound vanishes
        let c = outer_cor_constraints(&ch, &constant_aux(&OUTER_COR_AUX, &px)).unwrap();
        assert_eq!((c.r1[0], c.r2[0]), (0.0, 0.0));
    }

    #[test]
    fn outer_cor_matches_term_oracle() {
        let ch = bec_bsc();
        for seed in 0..5 {
            let j = random_joint(&OUTER_COR_AUX, None, seed);
            let c = outer_cor_constraints(&ch, &j).unwrap();
            let jx = j.append_outputs("X", OUTPUTS, &ch).unwrap();
            let m = |a: &[&str], b: &[&str], c: &[&str]| jx.conditional_mi(a, b, c).unwrap();
            let r1 = m(&["U1"], &["Y1"], &["T", "V1"]) - m(&["U1"], &["Z"], &["T", "V1"]);
            let s1 = m(&["X"], &["Y2"], &["T", "Z", "V1"]) + m(&["U1"], &["Y1"], &["T", "V1"])
                - m(&["U1"], &["Z", "Y2"], &["T", "V1"]);
            assert!((c.r1[0] - r1).abs() < 1e-12);
            assert!((c.sum[0] - s1).abs() < 1e-12);
        }
    }

    #[test]
    fn thm1_with_constant_s_is_inside_cor() {
        let ch = bec_bsc();
        for seed in 0..10 {
            // X depends only on U1, U2 here so the factorization holds
            let base = {
                let shape = ModelShape::chain(&AuxSpec::default(), &OUTER_COR_AUX, 2, Some(&["U1", "U2"])).unwrap();
                FactorModel::sample(&shape, &mut rng_for(seed, 1)).joint().unwrap()
            };
            let mut axes = base.axes().to_vec();
            axes.insert(5, Axis::new("S1", 1));
            axes.insert(6, Axis::new("S2", 1));
            let j = JointPmf::new(axes, base.table().to_vec()).unwrap();
            let thm1 = eval_outer_thm1(&ch, &j).unwrap();
            let cor = eval_outer_cor(&ch, &base).unwrap();
            assert!(thm1.excess_over(&cor) <= 1e-12);
        }
    }

    #[test]
    fn thm1_rejects_bad_factorization() {
        let ch = bec_bsc();
        let mut axes: Vec<Axis> = OUTER_THM1_AUX.iter().map(|a| Axis::new(*a, 1)).collect();
        axes[0] = Axis::new("T", 2);
        axes.push(Axis::new("X", 2));
        // X copies T
        let j = JointPmf::from_fn(axes, |i| if i[0] == i[7] { 0.5 } else { 0.0 }).unwrap();
        assert!(matches!(eval_outer_thm1(&ch, &j), Err(Error::Factorization(_))));
    }

    #[test]
    fn thm1_is_symmetric_under_relabeling() {
        let ch = WiretapBc::new(make_bsc(0.1).unwrap(), make_bsc(0.2).unwrap(), make_bsc(0.3).unwrap()).unwrap();
        let swapped_ch = WiretapBc::new(ch.ch_y2.clone(), ch.ch_y1.clone(), ch.ch_z.clone()).unwrap();
        for seed in 0..5 {
            let j = random_joint(&OUTER_THM1_AUX, Some(&["U1", "U2", "S1", "S2"]), seed);
            let mut axes = j.axes().to_vec();
            for a in axes.iter_mut() {
                a.name = match a.name.as_str() {
                    "V1" => "V2",
                    "V2" => "V1",
                    "U1" => "U2",
                    "U2" => "U1",
                    "S1" => "S2",
                    "S2" => "S1",
                    n => n,
                }
                .to_string();
            }
            let relabeled = JointPmf::new(axes, j.table().to_vec()).unwrap();
            let a = outer_thm1_constraints(&ch, &j).unwrap();
            let b = outer_thm1_constraints(&swapped_ch, &relabeled).unwrap();
            for (x, y) in a.r1.iter().zip(&b.r2) {
                assert!((x - y).abs() < 1e-12);
            }
            for (x, y) in a.sum[..2].iter().zip(&b.sum[2..]) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn everyone_equal_gives_origin() {
        let w = make_bsc(0.2).unwrap();
        let ch = WiretapBc::new(w.clone(), w.clone(), w).unwrap();
        let j = random_joint(&OUTER_THM1_AUX, Some(&["U1", "U2", "S1", "S2"]), 3);
        let r = eval_outer_thm1(&ch, &j).unwrap();
        assert!(r.support(1.0) < 1e-12);
    }

    #[test]
    fn axis_checks() {
        let ch = bec_bsc();
        let j = constant_aux(&["T", "Q", "U1"], &[0.5, 0.5]);
        assert!(matches!(eval_inner(&ch, &j), Err(Error::UnknownAxis(_))));
        let j = constant_aux(&["T", "Q", "U1", "U2", "V1"], &[0.5, 0.5]);
        assert!(eval_inner(&ch, &j).is_err());
        let j = constant_aux(&INNER_AUX, &[0.2, 0.3, 0.5]);
        assert!(matches!(eval_inner(&ch, &j), Err(Error::DimensionMismatch(_))));
    }
}
