use wbc_core::becbsc::{secrecy_curve, BecBscParams};
use wbc_core::probcore::{cascade, make_bec, make_bsc, Axis, Dmc, JointPmf, WiretapBc};
use wbc_core::regions::{
    capacity_degraded, capacity_less_noisy, eval_outer_cor, eval_outer_thm1, hausdorff, search_region, sweep_lambdas,
    AuxSpec, Bound, FactorModel, ModelShape, RatePoint, RateRegion, OUTER_COR_AUX,
};
use wbc_core::rng::{mixed_row, rng_for};

fn random_dmc(seed: u64, rows: usize, cols: usize) -> Dmc {
    let mut rng = rng_for(seed, 7);
    Dmc::new((0..rows).map(|_| mixed_row(&mut rng, cols)).collect()).unwrap()
}

/// `X -> Y1 -> Y2 -> Z` with random binary-output links.
fn degraded_chain(seed: u64) -> WiretapBc {
    let y1 = random_dmc(seed, 2, 2);
    let y2 = cascade(&y1, &random_dmc(seed + 1000, 2, 2)).unwrap();
    let z = cascade(&y2, &random_dmc(seed + 2000, 2, 2)).unwrap();
    WiretapBc::new(y1, y2, z).unwrap()
}

#[test]
fn inner_search_lies_inside_outer_search() {
    // the outer bound has more auxiliaries, so its search needs a much larger budget to converge
    for seed in 0..3 {
        let ch = degraded_chain(seed);
        let aux = AuxSpec::default();
        let inner = search_region(&ch, &aux, Bound::Inner, 2000, seed).unwrap();
        let outer = search_region(&ch, &aux, Bound::OuterCor, 40_000, seed).unwrap();
        let excess = inner.support_excess(&outer, &sweep_lambdas());
        assert!(excess <= 1e-6, "seed {seed}: {excess}");
    }
}

#[test]
fn thm1_with_constant_s_inside_cor() {
    let ch = degraded_chain(3);
    let shape = ModelShape::chain(&AuxSpec::default(), &OUTER_COR_AUX, 2, Some(&["U1", "U2"])).unwrap();
    for seed in 0..20 {
        let base = FactorModel::sample(&shape, &mut rng_for(seed, 0)).joint().unwrap();
        let mut axes = base.axes().to_vec();
        axes.insert(5, Axis::new("S1", 1));
        axes.insert(6, Axis::new("S2", 1));
        let j = JointPmf::new(axes, base.table().to_vec()).unwrap();
        let thm1 = eval_outer_thm1(&ch, &j).unwrap();
        let cor = eval_outer_cor(&ch, &base).unwrap();
        assert!(thm1.excess_over(&cor) <= 1e-10, "seed {seed}");
    }
}

#[test]
fn less_noisy_capacity_tracks_closed_form() {
    let ch = WiretapBc::new(make_bec(0.2).unwrap(), make_bsc(0.1).unwrap(), make_bsc(0.25).unwrap()).unwrap();
    let region = capacity_less_noisy(&ch, &AuxSpec::default(), 600, 1).unwrap();
    let curve = secrecy_curve(&BecBscParams::new(0.2, 0.1, 0.25).unwrap(), 129).unwrap();
    let closed = RateRegion::from_points(curve.iter().map(|c| RatePoint::new(c.r1, c.r2)).collect());
    assert!(hausdorff(&region, &closed) < 0.03);
}

#[test]
fn degraded_capacity_inside_outer_search() {
    let ch = degraded_chain(8);
    let aux = AuxSpec::default();
    let cap = capacity_degraded(&ch, &aux, 300, 2).unwrap();
    let inner = search_region(&ch, &aux, Bound::Inner, 300, 2).unwrap();
    // the capacity region is achievable, so a good inner search approaches it from below
    assert!(inner.support_excess(&cap, &sweep_lambdas()) <= 5e-3);
}
