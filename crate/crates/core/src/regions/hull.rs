use serde::{Deserialize, Serialize};

/// Values this close to zero from below are treated as zero.
const NEG_SLACK: f64 = 1e-12;

/// An achievable (or bounding) rate pair in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
}

impl RatePoint {
    /// Clamps slightly negative or negative coordinates to zero.
    pub fn new(r1: f64, r2: f64) -> Self {
        Self { r1: clamp0(r1), r2: clamp0(r2) }
    }

    fn sub(self, o: RatePoint) -> (f64, f64) {
        (self.r1 - o.r1, self.r2 - o.r2)
    }
}

fn clamp0(x: f64) -> f64 {
    if x.is_nan() || x < NEG_SLACK {
        0.0
    } else {
        x.max(0.0)
    }
}

fn cross(o: RatePoint, a: RatePoint, b: RatePoint) -> f64 {
    let (ax, ay) = a.sub(o);
    let (bx, by) = b.sub(o);
    ax * by - ay * bx
}

fn lex(a: &RatePoint, b: &RatePoint) -> std::cmp::Ordering {
    a.r1.total_cmp(&b.r1).then(a.r2.total_cmp(&b.r2))
}

/// Convex hull in counter-clockwise order, collinear points dropped.
fn monotone_chain(mut pts: Vec<RatePoint>) -> Vec<RatePoint> {
    pts.sort_by(lex);
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<RatePoint> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<RatePoint> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn dist_to_segment(p: RatePoint, a: RatePoint, b: RatePoint) -> f64 {
    let (dx, dy) = b.sub(a);
    let (px, py) = p.sub(a);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 { ((px * dx + py * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let (ex, ey) = (px - t * dx, py - t * dy);
    (ex * ex + ey * ey).sqrt()
}

/// Downward-closed convex region in the nonnegative quadrant, generated by a
/// finite set of rate points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRegion {
    points: Vec<RatePoint>,
    hull: Vec<RatePoint>,
}

impl RateRegion {
    /// The region `{(0, 0)}`.
    pub fn origin() -> Self {
        Self::from_points(Vec::new())
    }

    /// Downward-closed convex hull of `points` together with their axis
    /// projections and the origin.
    pub fn from_points(points: Vec<RatePoint>) -> Self {
        let points: Vec<RatePoint> = points.into_iter().map(|p| RatePoint::new(p.r1, p.r2)).collect();
        let mut gen = Vec::with_capacity(3 * points.len() + 1);
        gen.push(RatePoint::new(0.0, 0.0));
        for p in &points {
            gen.push(*p);
            gen.push(RatePoint::new(p.r1, 0.0));
            gen.push(RatePoint::new(0.0, p.r2));
        }
        let mut hull = monotone_chain(gen);
        hull.sort_by(lex);
        Self { points, hull }
    }

    /// Polygon `{r1 <= a, r2 <= b, r1 + r2 <= s}` in the quadrant; negative
    /// bounds are clamped to zero and infinite ones are allowed as long as
    /// the polygon stays bounded.
    pub fn pentagon(a: f64, b: f64, s: f64) -> Self {
        Self::from_points(pentagon_corners(a, b, s).to_vec())
    }

    pub fn points(&self) -> &[RatePoint] {
        &self.points
    }

    /// Hull vertices sorted by `r1`, then `r2`.
    pub fn hull(&self) -> &[RatePoint] {
        &self.hull
    }

    /// Union of two regions (hull of all generating points).
    pub fn union(&self, other: &RateRegion) -> RateRegion {
        let mut pts = self.points.clone();
        pts.extend_from_slice(&other.points);
        Self::from_points(pts)
    }

    /// Rebuilds the region from its own hull vertices.
    pub fn rehull(&self) -> RateRegion {
        Self::from_points(self.hull.clone())
    }

    /// `max r1 + lambda * r2` over the region; `lambda = inf` gives `max r2`.
    pub fn support(&self, lambda: f64) -> f64 {
        self.hull.iter().map(|p| if lambda.is_infinite() { p.r2 } else { p.r1 + lambda * p.r2 }).fold(0.0, f64::max)
    }

    fn ccw(&self) -> Vec<RatePoint> {
        monotone_chain(self.hull.clone())
    }

    /// Euclidean distance from `p` to the region (0 inside).
    pub fn distance(&self, p: RatePoint) -> f64 {
        let poly = self.ccw();
        match poly.len() {
            0 => (p.r1 * p.r1 + p.r2 * p.r2).sqrt(),
            1 => dist_to_segment(p, poly[0], poly[0]),
            2 => dist_to_segment(p, poly[0], poly[1]),
            n => {
                let inside = (0..n).all(|i| cross(poly[i], poly[(i + 1) % n], p) >= 0.0);
                if inside {
                    0.0
                } else {
                    (0..n).map(|i| dist_to_segment(p, poly[i], poly[(i + 1) % n])).fold(f64::INFINITY, f64::min)
                }
            }
        }
    }

    pub fn contains(&self, p: RatePoint, tol: f64) -> bool {
        self.distance(p) <= tol
    }

    /// Largest distance from a point of `self` to `other`. Attained at a
    /// vertex because the distance to a convex set is convex.
    pub fn excess_over(&self, other: &RateRegion) -> f64 {
        self.hull.iter().map(|&v| other.distance(v)).fold(0.0, f64::max)
    }

    /// Support-function containment: `self ⊆ other` up to `tol` in each
    /// direction of `lambdas`.
    pub fn support_excess(&self, other: &RateRegion, lambdas: &[f64]) -> f64 {
        lambdas.iter().map(|&l| self.support(l) - other.support(l)).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Corner points of `{r1 <= a, r2 <= b, r1 + r2 <= s}` in the quadrant.
pub(crate) fn pentagon_corners(a: f64, b: f64, s: f64) -> [RatePoint; 2] {
    let (a, b, s) = (clamp0(a), clamp0(b), clamp0(s));
    let a = a.min(s);
    let b = b.min(s);
    [RatePoint::new(a, b.min(s - a)), RatePoint::new(a.min(s - b), b)]
}

/// Hausdorff distance between two regions.
pub fn hausdorff(a: &RateRegion, b: &RateRegion) -> f64 {
    a.excess_over(b).max(b.excess_over(a))
}

/// The sweep directions used by searches and containment checks:
/// `0, 1/8, 1/4, 1/2, 1, 2, 4, 8` and their interleavings, plus infinity.
pub fn sweep_lambdas() -> [f64; 16] {
    [0.0, 0.125, 0.25, 0.375, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0, 8.0, f64::INFINITY]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<RatePoint> {
        v.iter().map(|&(a, b)| RatePoint::new(a, b)).collect()
    }

    #[test]
    fn unit_square() {
        let r = RateRegion::from_points(pts(&[(1.0, 1.0)]));
        assert_eq!(r.hull(), pts(&[(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]).as_slice());
        assert_eq!(r.support(1.0), 2.0);
        assert_eq!(r.support(0.0), 1.0);
        assert_eq!(r.support(f64::INFINITY), 1.0);
        assert!(r.contains(RatePoint::new(0.5, 0.99), 0.0));
        assert!(!r.contains(RatePoint::new(1.01, 0.5), 1e-3));
        assert!((r.distance(RatePoint::new(2.0, 1.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn collinear_points_dropped() {
        let r = RateRegion::from_points(pts(&[(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)]));
        assert_eq!(r.hull(), pts(&[(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)]).as_slice());
    }

    #[test]
    fn degenerate_regions() {
        let o = RateRegion::origin();
        assert_eq!(o.hull(), pts(&[(0.0, 0.0)]).as_slice());
        assert!(o.contains(RatePoint::new(0.0, 0.0), 0.0));
        let seg = RateRegion::from_points(pts(&[(0.0, 0.7)]));
        assert_eq!(seg.hull().len(), 2);
        assert!(seg.contains(RatePoint::new(0.0, 0.3), 1e-15));
        assert!((seg.distance(RatePoint::new(0.2, 0.3)) - 0.2).abs() < 1e-15);
        // negative inputs clamp to the origin
        let neg = RateRegion::from_points(pts(&[(-0.4, -1e-13)]));
        assert_eq!(neg.hull(), pts(&[(0.0, 0.0)]).as_slice());
    }

    #[test]
    fn pentagon_shapes() {
        let p = RateRegion::pentagon(0.6, 0.5, 0.8);
        let want = pts(&[(0.0, 0.0), (0.0, 0.5), (0.3, 0.5), (0.6, 0.0), (0.6, 0.2)]);
        assert_eq!(p.hull().len(), want.len());
        for (a, b) in p.hull().iter().zip(&want) {
            assert!((a.r1 - b.r1).abs() < 1e-12 && (a.r2 - b.r2).abs() < 1e-12);
        }
        let q = RateRegion::pentagon(f64::INFINITY, 0.5, 0.8);
        assert_eq!(q.support(0.0), 0.8);
        let z = RateRegion::pentagon(0.6, -0.1, 0.8);
        assert_eq!(z.hull(), pts(&[(0.0, 0.0), (0.6, 0.0)]).as_slice());
    }

    #[test]
    fn members_are_inside_and_hull_is_idempotent() {
        let mut s = 1u64;
        let mut v = Vec::new();
        for _ in 0..200 {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
            let a = (s >> 40) as f64 / (1u64 << 24) as f64;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
            let b = (s >> 40) as f64 / (1u64 << 24) as f64;
            v.push(RatePoint::new(a, b * (1.0 - a)));
        }
        let r = RateRegion::from_points(v.clone());
        for p in &v {
            assert!(r.contains(*p, 1e-9));
            assert!(r.contains(RatePoint::new(p.r1 * 0.5, p.r2 * 0.3), 1e-9));
        }
        assert_eq!(r.rehull().hull(), r.hull());
    }

    #[test]
    fn hausdorff_examples() {
        let a = RateRegion::from_points(pts(&[(1.0, 1.0)]));
        let b = RateRegion::from_points(pts(&[(1.0, 0.5)]));
        assert!((hausdorff(&a, &b) - 0.5).abs() < 1e-15);
        assert_eq!(hausdorff(&a, &a), 0.0);
        assert_eq!(b.excess_over(&a), 0.0);
        assert!(b.support_excess(&a, &sweep_lambdas()) <= 0.0);
    }

    #[test]
    fn union_is_monotone() {
        let a = RateRegion::from_points(pts(&[(1.0, 0.2)]));
        let b = RateRegion::from_points(pts(&[(0.1, 0.9)]));
        let u = a.union(&b);
        for l in sweep_lambdas() {
            assert!(u.support(l) >= a.support(l).max(b.support(l)));
        }
    }
}
