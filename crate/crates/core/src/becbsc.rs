//! Closed-form secrecy region of the wiretap BC with a BEC(e) to receiver 1,
//! a BSC(p2) to receiver 2 and a BSC(p) to the eavesdropper, plus numerical
//! checks of its convexity and of the series bounds used in the converse.

use crate::error::{Error, Result};
use crate::probcore::{h2, star};
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

/// Default number of points on the `x` grid (endpoints included).
pub const DEFAULT_POINTS: usize = 257;

/// Side condition adopted for admissibility. The capacity statement prints
/// the reverse inequality; the convexity proof needs this one.
pub const SIDE_CONDITION_NOTE: &str = "a^2 + a2^2 <= 1 (appendix form, equivalently 1 - 4p(1-p) <= 4p2(1-p2); \
     the capacity statement prints the reverse inequality, which the convexity proof does not support)";

/// `V_k` as used by the difference computation.
pub const SERIES_NOTE: &str = "V_k = e a^2 a2^2 S_{k-2}, as required by the difference T_k - V_k; \
     the appendix prints e a2^2 a2 (...) instead";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BecBscParams {
    pub e: f64,
    pub p2: f64,
    pub p: f64,
}

impl BecBscParams {
    pub fn new(e: f64, p2: f64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&e) {
            return Err(Error::Domain { what: "erasure probability", value: e });
        }
        for (name, v) in [("p2", p2), ("p", p)] {
            if !(0.0..=0.5).contains(&v) {
                return Err(Error::Domain { what: name, value: v });
            }
        }
        Ok(Self { e, p2, p })
    }

    /// `1 - 2p`.
    pub fn a(&self) -> f64 {
        1.0 - 2.0 * self.p
    }

    /// `1 - 2p2`.
    pub fn a2(&self) -> f64 {
        1.0 - 2.0 * self.p2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub admissible: bool,
    /// Every violated inequality, in words.
    pub violations: Vec<String>,
    pub side_condition: String,
}

/// Checks `2 p2 <= e <= min(2p, 4 p2 (1 - p2))` and `a^2 + a2^2 <= 1`.
pub fn admissible(params: &BecBscParams) -> Admissibility {
    const SLACK: f64 = 1e-12;
    let BecBscParams { e, p2, p } = *params;
    let mut violations = Vec::new();
    if e < 2.0 * p2 - SLACK {
        violations.push(format!("e >= 2 p2 violated: e = {e} < {}", 2.0 * p2));
    }
    if e > 2.0 * p + SLACK {
        violations.push(format!("e <= 2 p violated: e = {e} > {}", 2.0 * p));
    }
    let cap = 4.0 * p2 * (1.0 - p2);
    if e > cap + SLACK {
        violations.push(format!("e <= 4 p2 (1 - p2) violated: e = {e} > {cap}"));
    }
    let s = params.a().powi(2) + params.a2().powi(2);
    if s > 1.0 + SLACK {
        violations.push(format!("a^2 + a2^2 <= 1 violated (appendix form): {s}"));
    }
    Admissibility { admissible: violations.is_empty(), violations, side_condition: SIDE_CONDITION_NOTE.into() }
}

fn require_admissible(params: &BecBscParams) -> Result<()> {
    let adm = admissible(params);
    if adm.admissible {
        Ok(())
    } else {
        Err(Error::Inadmissible(adm.violations))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub r1: f64,
    pub r2: f64,
}

/// Unclamped corner `(f1(x), f2(x))` of the secrecy region:
/// `f1 = (1-e) h2(x) + h2(p) - h2(p*x)`, `f2 = h2(p*x) - h2(p2*x)`.
pub fn secrecy_corner(params: &BecBscParams, x: f64) -> (f64, f64) {
    let px = star(params.p, x);
    ((1.0 - params.e) * h2(x) + h2(params.p) - h2(px), h2(px) - h2(star(params.p2, x)))
}

/// Uniform grid of `n` points on `[0, 0.5]`.
pub fn x_grid(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("grid needs at least 2 points, got {n}")));
    }
    Ok((0..n).map(|i| 0.5 * i as f64 / (n - 1) as f64).collect())
}

fn clamp_rate(v: f64, what: &str, x: f64) -> Result<f64> {
    if v < -1e-12 {
        return Err(Error::InvalidArgument(format!("{what} = {v} is negative at x = {x}")));
    }
    Ok(v.max(0.0))
}

fn secrecy_points(params: &BecBscParams, n: usize) -> Result<Vec<CurvePoint>> {
    x_grid(n)?
        .into_iter()
        .map(|x| {
            let (r1, r2) = secrecy_corner(params, x);
            Ok(CurvePoint { x, r1: clamp_rate(r1, "r1", x)?, r2: clamp_rate(r2, "r2", x)? })
        })
        .collect()
}

/// Corner points of the secrecy region on an `n`-point grid of `x`.
pub fn secrecy_curve(params: &BecBscParams, n: usize) -> Result<Vec<CurvePoint>> {
    require_admissible(params)?;
    secrecy_points(params, n)
}

/// Corner points of the region without secrecy constraints:
/// `r1 = (1-e) h2(x)`, `r2 = 1 - h2(p2*x)`.
pub fn standard_curve(e: f64, p2: f64, n: usize) -> Result<Vec<CurvePoint>> {
    BecBscParams::new(e, p2, 0.5)?;
    Ok(x_grid(n)?.into_iter().map(|x| CurvePoint { x, r1: (1.0 - e) * h2(x), r2: 1.0 - h2(star(p2, x)) }).collect())
}

/// One sweep value of [`figure7_data`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure7Block {
    pub p: f64,
    pub e: f64,
    pub admissibility: Admissibility,
    pub secrecy: Vec<CurvePoint>,
    pub standard: Vec<CurvePoint>,
}

/// Sweeps `p` over `n_p` evenly spaced values of `[p_min, p_max]` with
/// `e = 2p`. Every block carries its admissibility verdict; curves are
/// evaluated for inadmissible values too so the sweep stays complete.
pub fn figure7_data(p2: f64, p_min: f64, p_max: f64, n_p: usize, n_points: usize) -> Result<Vec<Figure7Block>> {
    if p2 > p_min || p_min > p_max || p_max > 0.5 {
        return Err(Error::InvalidArgument(format!("need p2 <= p_min <= p_max <= 0.5, got {p2}, {p_min}, {p_max}")));
    }
    if n_p == 0 {
        return Err(Error::InvalidArgument("empty p sweep".into()));
    }
    (0..n_p)
        .map(|i| {
            let p = if n_p == 1 { p_min } else { p_min + (p_max - p_min) * i as f64 / (n_p - 1) as f64 };
            let params = BecBscParams::new((2.0 * p).min(1.0), p2, p)?;
            Ok(Figure7Block {
                p,
                e: params.e,
                admissibility: admissible(&params),
                secrecy: secrecy_points(&params, n_points)?,
                standard: standard_curve(params.e, p2, n_points)?,
            })
        })
        .collect()
}

/// First and second derivatives of `f1` and `f2` at `x` in `(0, 0.5)`.
pub fn derivatives(params: &BecBscParams, x: f64) -> [f64; 4] {
    let logit = |u: f64| ((1.0 - u) / u).log2();
    let curv = |u: f64| 1.0 / (u * (1.0 - u) * LN_2);
    let (a, a2) = (params.a(), params.a2());
    let (u, u2) = (star(params.p, x), star(params.p2, x));
    let f1p = (1.0 - params.e) * logit(x) - a * logit(u);
    let f1pp = -(1.0 - params.e) * curv(x) + a * a * curv(u);
    let f2p = a * logit(u) - a2 * logit(u2);
    let f2pp = -a * a * curv(u) + a2 * a2 * curv(u2);
    [f1p, f1pp, f2p, f2pp]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub params: BecBscParams,
    pub grid: usize,
    /// Largest value of `f2'' f1' - f1'' f2'` over the grid (must be `<= 0`).
    pub max_violation: f64,
    pub worst_x: f64,
    /// `f1' >= 0` on the grid.
    pub f1_nondecreasing: bool,
    /// Grid points where the finite-difference curvature and the analytic
    /// expression are both resolved and disagree in sign.
    pub sign_mismatches: usize,
    pub passes: bool,
}

/// Tolerance on the convexity expression.
pub const CONVEXITY_TOL: f64 = 1e-9;

/// Evaluates `N(x) = f2''(x) f1'(x) - f1''(x) f2'(x)` on `n_grid` interior
/// points of `(0, 0.5)` and cross-checks its sign against the curvature of
/// the parametric curve from second differences.
pub fn verify_convexity(params: &BecBscParams, n_grid: usize) -> Result<ConvexityReport> {
    if n_grid < 16 {
        return Err(Error::InvalidArgument(format!("convexity grid needs at least 16 points, got {n_grid}")));
    }
    let s = params.a().powi(2) + params.a2().powi(2);
    if s > 1.0 + 1e-12 {
        return Err(Error::Inadmissible(vec![format!("a^2 + a2^2 <= 1 violated (appendix form): {s}")]));
    }
    let mut max_violation = f64::NEG_INFINITY;
    let mut worst_x = 0.0;
    let mut f1_nondecreasing = true;
    let mut sign_mismatches = 0;
    for i in 1..=n_grid {
        let x = 0.5 * i as f64 / (n_grid + 1) as f64;
        let [f1p, f1pp, f2p, f2pp] = derivatives(params, x);
        let n = f2pp * f1p - f1pp * f2p;
        if n > max_violation {
            max_violation = n;
            worst_x = x;
        }
        if f1p < -CONVEXITY_TOL {
            f1_nondecreasing = false;
        }
        // chord cross product of three nearby curve points ~ N h^3
        let h = 1e-3 * x.min(0.5 - x);
        let c = |t: f64| secrecy_corner(params, t);
        let (l, m, r) = (c(x - h), c(x), c(x + h));
        let cross = ((m.0 - l.0) * (r.1 - m.1) - (m.1 - l.1) * (r.0 - m.0)) / h.powi(3);
        let scale = (f2pp * f1p).abs() + (f1pp * f2p).abs();
        if n.abs() > 1e-3 * scale && cross.abs() > 1e-3 * scale && (n > 0.0) != (cross > 0.0) {
            sign_mismatches += 1;
        }
    }
    Ok(ConvexityReport {
        params: *params,
        grid: n_grid,
        max_violation,
        worst_x,
        f1_nondecreasing,
        sign_mismatches,
        passes: max_violation <= CONVEXITY_TOL && sign_mismatches == 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTerms {
    pub k: usize,
    /// `S_k` from the recursion.
    pub s_k: f64,
    /// `S_k` from the finite sum.
    pub s_k_sum: f64,
    /// `S_k` from the ratio, when `a != a2`.
    pub s_k_ratio: Option<f64>,
    pub t_k: f64,
    pub v_k: f64,
}

fn check_series_args(a: f64, a2: f64, e: f64) -> Result<()> {
    for (what, v) in [("a", a), ("a2", a2)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain { what, value: v });
        }
    }
    if a > a2 {
        return Err(Error::InvalidArgument(format!("need a <= a2, got a = {a}, a2 = {a2}")));
    }
    if !(0.0..=1.0).contains(&e) {
        return Err(Error::Domain { what: "erasure probability", value: e });
    }
    Ok(())
}

/// `S_k` for odd `k >= 1` via `S_1 = 0`, `S_k = a^{k-3} + a2^2 S_{k-2}`.
fn s_recursive(a: f64, a2: f64, k: usize) -> f64 {
    let mut s = 0.0;
    let mut j = 3;
    while j <= k {
        s = a.powi(j as i32 - 3) + a2 * a2 * s;
        j += 2;
    }
    s
}

fn s_sum(a: f64, a2: f64, k: usize) -> f64 {
    let s = (k - 1) / 2;
    (0..s).map(|j| a2.powi(2 * j as i32) * a.powi(2 * (s - 1 - j) as i32)).sum()
}

pub fn series_terms(a: f64, a2: f64, e: f64, k: usize) -> Result<SeriesTerms> {
    check_series_args(a, a2, e)?;
    if k < 3 || k % 2 == 0 {
        return Err(Error::InvalidArgument(format!("k must be odd and >= 3, got {k}")));
    }
    let s_k = s_recursive(a, a2, k);
    let d = a2 * a2 - a * a;
    let s_k_ratio = (d.abs() > 1e-6).then(|| (a2.powi(k as i32 - 1) - a.powi(k as i32 - 1)) / d);
    let aa = a * a * a2 * a2;
    Ok(SeriesTerms {
        k,
        s_k,
        s_k_sum: s_sum(a, a2, k),
        s_k_ratio,
        t_k: (1.0 - e) * (1.0 - s_recursive(a, a2, k + 2)) + aa * s_k,
        v_k: e * aa * s_recursive(a, a2, k - 2),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub a: f64,
    pub a2: f64,
    pub e: f64,
    pub k_max: usize,
    /// `T_k >= V_k >= 0` for every odd `3 <= k <= k_max`.
    pub claim1: bool,
    /// `V_k` non-increasing over odd `k >= 5`; only claimed when `a^2 + a2^2 <= 1`.
    pub claim2: bool,
    pub claim2_applies: bool,
    /// Partial sums match the telescoped form and approach `-2/3`.
    pub claim3: bool,
    pub min_t_minus_v: f64,
    pub max_v_increase: f64,
    pub partial_sum: f64,
    pub telescoped: f64,
    /// Largest disagreement between the recursive, summed and ratio forms of `S_k`.
    pub s_form_defect: f64,
    pub all_pass: bool,
    pub note: String,
}

/// Partial sum over odd `k` in `5..=k_max` of `1/(k-2) - 1/k - 1/(k-4) + 1/(k-2)`.
pub fn claim3_partial_sum(k_max: usize) -> f64 {
    (5..=k_max)
        .step_by(2)
        .map(|k| {
            let k = k as f64;
            1.0 / (k - 2.0) - 1.0 / k - 1.0 / (k - 4.0) + 1.0 / (k - 2.0)
        })
        .sum()
}

/// Closed form of [`claim3_partial_sum`]: `-2/3 - 1/K + 1/(K-2)`.
pub fn claim3_telescoped(k_max: usize) -> f64 {
    let k = k_max as f64;
    -2.0 / 3.0 - 1.0 / k + 1.0 / (k - 2.0)
}

pub fn verify_series(a: f64, a2: f64, e: f64, k_max: usize) -> Result<SeriesReport> {
    check_series_args(a, a2, e)?;
    if k_max < 7 || k_max % 2 == 0 {
        return Err(Error::InvalidArgument(format!("k_max must be odd and >= 7, got {k_max}")));
    }
    let terms: Vec<SeriesTerms> = (3..=k_max).step_by(2).map(|k| series_terms(a, a2, e, k)).collect::<Result<_>>()?;
    let min_t_minus_v = terms.iter().map(|t| t.t_k - t.v_k).fold(f64::INFINITY, f64::min);
    let min_v = terms.iter().map(|t| t.v_k).fold(f64::INFINITY, f64::min);
    let claim1 = min_t_minus_v >= -1e-12 && min_v >= -1e-12;
    let max_v_increase =
        terms.windows(2).filter(|w| w[0].k >= 5).map(|w| w[1].v_k - w[0].v_k).fold(f64::NEG_INFINITY, f64::max);
    let claim2_applies = a * a + a2 * a2 <= 1.0 + 1e-12;
    let claim2 = !claim2_applies || max_v_increase <= 1e-15;
    let partial_sum = claim3_partial_sum(k_max);
    let telescoped = claim3_telescoped(k_max);
    let approaching = (5..k_max)
        .step_by(2)
        .all(|k| (claim3_telescoped(k + 2) + 2.0 / 3.0).abs() < (claim3_telescoped(k) + 2.0 / 3.0).abs());
    let claim3 = (partial_sum - telescoped).abs() <= 1e-9 && approaching;
    let s_form_defect = terms
        .iter()
        .map(|t| {
            let d = (t.s_k - t.s_k_sum).abs();
            t.s_k_ratio.map_or(d, |r| d.max((t.s_k - r).abs()))
        })
        .fold(0.0, f64::max);
    Ok(SeriesReport {
        a,
        a2,
        e,
        k_max,
        claim1,
        claim2,
        claim2_applies,
        claim3,
        min_t_minus_v,
        max_v_increase,
        partial_sum,
        telescoped,
        s_form_defect,
        all_pass: claim1 && claim2 && claim3 && s_form_defect <= 1e-9,
        note: SERIES_NOTE.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_for;
    use rand::Rng;

    fn base() -> BecBscParams {
        BecBscParams::new(0.2, 0.1, 0.25).unwrap()
    }

    /// Rejection sample of an admissible triple.
    fn random_admissible<R: Rng>(rng: &mut R) -> BecBscParams {
        loop {
            let p2: f64 = rng.random_range(0.0..0.5);
            let p: f64 = rng.random_range(p2..=0.5);
            let hi = (2.0 * p).min(4.0 * p2 * (1.0 - p2));
            if hi < 2.0 * p2 {
                continue;
            }
            let params = BecBscParams::new(rng.random_range(2.0 * p2..=hi), p2, p).unwrap();
            if admissible(&params).admissible {
                return params;
            }
        }
    }

    #[test]
    fn admissibility_examples() {
        assert!(admissible(&base()).admissible);
        let a = admissible(&BecBscParams::new(0.1, 0.1, 0.25).unwrap());
        assert!(!a.admissible && a.violations.len() == 1 && a.violations[0].contains("2 p2"));
        let a = admissible(&BecBscParams::new(0.4, 0.1, 0.15).unwrap());
        assert!(a.violations.iter().any(|v| v.contains("e <= 2 p")));
        assert!(BecBscParams::new(0.2, 0.6, 0.1).is_err());
    }

    #[test]
    fn endpoints() {
        let c = secrecy_curve(&base(), DEFAULT_POINTS).unwrap();
        assert_eq!(c.len(), 257);
        assert!(c[0].r1.abs() < 1e-12);
        assert!((c[0].r2 - (h2(0.25) - h2(0.1))).abs() < 1e-12);
        assert!((c[0].r2 - 0.342282).abs() < 1e-6);
        let last = c.last().unwrap();
        assert_eq!(last.x, 0.5);
        assert_eq!(last.r2, 0.0);
        assert!((last.r1 - 0.611278).abs() < 1e-6);
        assert!((last.r1 - (h2(0.25) - 0.2)).abs() < 1e-12);
    }

    #[test]
    fn inadmissible_curve_is_rejected() {
        let p = BecBscParams::new(0.1, 0.1, 0.25).unwrap();
        assert!(matches!(secrecy_curve(&p, 10), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn standard_endpoints_and_gap() {
        let s = standard_curve(0.2, 0.1, DEFAULT_POINTS).unwrap();
        assert!((s[0].r2 - (1.0 - h2(0.1))).abs() < 1e-15 && s[0].r1 == 0.0);
        assert!((s[256].r1 - 0.8).abs() < 1e-15 && s[256].r2.abs() < 1e-15);
        let c = secrecy_curve(&base(), DEFAULT_POINTS).unwrap();
        for (a, b) in s.iter().zip(&c) {
            assert!((a.r1 + a.r2 - b.r1 - b.r2 - (1.0 - h2(0.25))).abs() < 1e-9);
            assert!(b.r1 <= a.r1 + 1e-9 && b.r2 <= a.r2 + 1e-9);
        }
    }

    #[test]
    fn monotone_along_x() {
        let c = secrecy_curve(&base(), 1001).unwrap();
        for w in c.windows(2) {
            assert!(w[1].r1 >= w[0].r1 - 1e-9);
            assert!(w[1].r2 <= w[0].r2 + 1e-9);
        }
    }

    #[test]
    fn figure7_features() {
        let blocks = figure7_data(0.1, 0.1, 0.5, 9, 129).unwrap();
        assert_eq!(blocks.len(), 9);
        let first = &blocks[0];
        assert!(first.secrecy.iter().all(|p| p.r2 <= 1e-12));
        assert!(!first.admissibility.admissible);
        for b in &blocks {
            let last = b.secrecy.last().unwrap();
            assert!((last.r1 - (h2(b.p) - 2.0 * b.p)).abs() < 1e-9);
        }
    }

    #[test]
    fn convexity_on_base_instance() {
        let r = verify_convexity(&base(), 512).unwrap();
        assert!(r.max_violation <= CONVEXITY_TOL, "{r:?}");
        assert!(r.passes && r.f1_nondecreasing);
        assert!(verify_convexity(&base(), 8).is_err());
    }

    #[test]
    fn convexity_degenerate_identical_bsc() {
        // p = p2 makes f2 vanish identically
        let p = BecBscParams { e: 0.3, p2: 0.3, p: 0.3 };
        let r = verify_convexity(&p, 64).unwrap();
        assert!(r.max_violation.abs() < 1e-9);
    }

    #[test]
    fn convexity_random_admissible() {
        let mut rng = rng_for(42, 0);
        for _ in 0..20 {
            let p = random_admissible(&mut rng);
            let r = verify_convexity(&p, 256).unwrap();
            assert!(r.max_violation <= CONVEXITY_TOL, "{r:?}");
            assert_eq!(r.sign_mismatches, 0, "{r:?}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = base();
        let x = 0.17;
        let h = 1e-5;
        let d = derivatives(&p, x);
        let (l, m, r) = (secrecy_corner(&p, x - h), secrecy_corner(&p, x), secrecy_corner(&p, x + h));
        assert!((d[0] - (r.0 - l.0) / (2.0 * h)).abs() < 1e-6);
        assert!((d[1] - (r.0 - 2.0 * m.0 + l.0) / (h * h)).abs() < 1e-3);
        assert!((d[2] - (r.1 - l.1) / (2.0 * h)).abs() < 1e-6);
        assert!((d[3] - (r.1 - 2.0 * m.1 + l.1) / (h * h)).abs() < 1e-3);
    }

    #[test]
    fn series_examples() {
        let t = series_terms(0.5, 0.8, 0.2, 5).unwrap();
        assert!((t.s_k - 0.89).abs() < 1e-12 && (t.s_k_sum - 0.89).abs() < 1e-12);
        assert!((t.s_k_ratio.unwrap() - 0.89).abs() < 1e-12);
        assert_eq!(series_terms(0.3, 0.7, 0.1, 3).unwrap().s_k, 1.0);
        // equal parameters: sum form gives s a^{2(s-1)}
        let t = series_terms(0.6, 0.6, 0.1, 9).unwrap();
        assert!(t.s_k_ratio.is_none());
        assert!((t.s_k - 4.0 * 0.6f64.powi(6)).abs() < 1e-12);
        assert!(series_terms(0.5, 0.8, 0.2, 4).is_err());
        assert!(series_terms(0.9, 0.8, 0.2, 5).is_err());
    }

    #[test]
    fn series_claims() {
        let r = verify_series(0.5, 0.8, 0.2, 41).unwrap();
        assert!(r.all_pass, "{r:?}");
        assert!((claim3_partial_sum(5) + 8.0 / 15.0).abs() < 1e-15);
        let z = verify_series(0.0, 0.8, 0.2, 41).unwrap();
        assert!(z.all_pass);
        assert!((3..=41).step_by(2).all(|k| series_terms(0.0, 0.8, 0.2, k).unwrap().v_k == 0.0));
        assert!(verify_series(0.5, 0.8, 0.2, 5).is_err());
    }

    #[test]
    fn domination_needs_the_channel_constraints() {
        // inside 2 p2 <= e <= min(2p, 4 p2 (1 - p2)) every admissible draw passes
        let mut rng = rng_for(4, 0);
        for _ in 0..500 {
            let p = random_admissible(&mut rng);
            let r = verify_series(p.a(), p.a2(), p.e, 41).unwrap();
            assert!(r.claim1 && r.claim2 && r.claim3, "{p:?}");
        }
        // a nearly erased BEC is outside them and T_k < V_k shows up
        assert!(!verify_series(0.5312, 0.6409, 0.9976, 41).unwrap().claim1);
    }

    #[test]
    fn series_forms_agree_randomly() {
        let mut rng = rng_for(9, 0);
        for _ in 0..1000 {
            let (x, y): (f64, f64) = (rng.random(), rng.random());
            let (a, a2) = (x.min(y), x.max(y));
            let k = 2 * rng.random_range(1..20usize) + 1;
            let t = series_terms(a, a2, 0.5, k).unwrap();
            assert!((t.s_k - t.s_k_sum).abs() <= 1e-12);
            if let Some(r) = t.s_k_ratio {
                assert!((t.s_k - r).abs() <= 1e-9 * t.s_k.max(1.0), "{a} {a2} {k}");
            }
        }
    }
}
