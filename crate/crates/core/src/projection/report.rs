use serde::Serialize;

use crate::curve::{ops::wrap_angle, Curve};
use crate::scalar::{dot, Real};

/// Relative zero band for the cross-product sign test.
pub const CONVEXITY_BAND: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionReport<S> {
    pub is_injective: bool,
    pub is_convex: bool,
    /// `max |p - q| / |P p - P q|` over vertex pairs; `None` when two
    /// vertices share a projection.
    pub slope_constant_m: Option<S>,
    /// `min (x_s^2 + y_s^2)` over vertices.
    pub horizontal_floor_delta: S,
    /// Turning number of the projected polygon.
    pub winding: i64,
    pub degenerate: bool,
}

impl<S: Real> ProjectionReport<S> {
    /// Convex and one-to-one.
    pub fn passes(&self) -> bool {
        self.is_convex && self.is_injective
    }
}

pub(crate) fn projected<S: Real>(curve: &Curve<S>) -> Vec<[S; 2]> {
    curve.points().map(|p| [p[0], p[1]]).collect()
}

fn cross<S: Real>(a: [S; 2], b: [S; 2]) -> S {
    a[0] * b[1] - a[1] * b[0]
}

fn sub<S: Real>(a: [S; 2], b: [S; 2]) -> [S; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn projection_report<S: Real>(curve: &Curve<S>) -> ProjectionReport<S> {
    let xy = projected(curve);
    let n = xy.len();
    let scale = curve.max_radius_about(&curve.centroid()).max(S::min_positive_value());
    let degenerate = xy
        .iter()
        .all(|p| (p[0] - xy[0][0]).hypot(p[1] - xy[0][1]) <= S::lit(1e-10) * scale);

    let edges: Vec<[S; 2]> = (0..n).map(|i| sub(xy[(i + 1) % n], xy[i])).collect();
    let max_edge2 = edges
        .iter()
        .map(|e| e[0] * e[0] + e[1] * e[1])
        .fold(S::zero(), |a, b| a.max(b));
    let band = S::lit(CONVEXITY_BAND) * max_edge2;
    let (mut pos, mut neg) = (0usize, 0usize);
    for i in 0..n {
        let c = cross(edges[i], edges[(i + 1) % n]);
        if c > band {
            pos += 1;
        } else if c < -band {
            neg += 1;
        }
    }
    let winding = turning_number(&edges);
    let is_convex = !degenerate && (pos == 0 || neg == 0) && pos + neg >= 3 && winding.abs() == 1;
    let is_injective = !degenerate && (is_convex || polygon_is_simple(&xy));

    ProjectionReport {
        is_injective,
        is_convex,
        slope_constant_m: if degenerate { None } else { slope_constant(curve) },
        horizontal_floor_delta: horizontal_floor(curve),
        winding,
        degenerate,
    }
}

fn turning_number<S: Real>(edges: &[[S; 2]]) -> i64 {
    let angles: Vec<S> = edges
        .iter()
        .filter(|e| e[0] != S::zero() || e[1] != S::zero())
        .map(|e| e[1].atan2(e[0]))
        .collect();
    let m = angles.len();
    if m < 2 {
        return 0;
    }
    let total = (0..m)
        .map(|i| wrap_angle(angles[(i + 1) % m] - angles[i]))
        .sum::<S>();
    (total / S::TAU()).round().to_i64().unwrap_or(0)
}

/// Exhaustive check that no two edges of the closed polygon meet except
/// consecutive ones at their shared vertex.
pub fn polygon_is_simple<S: Real>(xy: &[[S; 2]]) -> bool {
    let n = xy.len();
    for i in 0..n {
        let (a, b) = (xy[i], xy[(i + 1) % n]);
        if a == b {
            return false;
        }
        for j in i + 1..n {
            let (c, d) = (xy[j], xy[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // consecutive edges may only share their common vertex
                let (shared, p, q) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                let u = sub(p, shared);
                let v = sub(q, shared);
                if cross(u, v) == S::zero() && dot(&u, &v) > S::zero() {
                    return false;
                }
                continue;
            }
            if segments_meet(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

fn orient<S: Real>(a: [S; 2], b: [S; 2], c: [S; 2]) -> S {
    cross(sub(b, a), sub(c, a))
}

fn on_segment<S: Real>(a: [S; 2], b: [S; 2], p: [S; 2]) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

fn segments_meet<S: Real>(a: [S; 2], b: [S; 2], c: [S; 2], d: [S; 2]) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    let z = S::zero();
    if ((o1 > z && o2 < z) || (o1 < z && o2 > z)) && ((o3 > z && o4 < z) || (o3 < z && o4 > z)) {
        return true;
    }
    (o1 == z && on_segment(a, b, c))
        || (o2 == z && on_segment(a, b, d))
        || (o3 == z && on_segment(c, d, a))
        || (o4 == z && on_segment(c, d, b))
}

fn slope_constant<S: Real>(curve: &Curve<S>) -> Option<S> {
    let n = curve.len();
    let dim = curve.dim();
    let mut best = S::one();
    for i in 0..n {
        let p = curve.point(i);
        for j in i + 1..n {
            let q = curve.point(j);
            let dx = p[0] - q[0];
            let dy = p[1] - q[1];
            let flat = dx * dx + dy * dy;
            let mut full = flat;
            for k in 2..dim {
                let d = p[k] - q[k];
                full = full + d * d;
            }
            if flat == S::zero() {
                return None;
            }
            let r = full / flat;
            if r > best {
                best = r;
            }
        }
    }
    Some(best.sqrt())
}

fn horizontal_floor<S: Real>(curve: &Curve<S>) -> S {
    let n = curve.len();
    let mut best = S::one();
    for i in 0..n {
        let a = curve.point(curve.prev(i));
        let b = curve.point(curve.next(i));
        let mut full = S::zero();
        for k in 0..curve.dim() {
            let d = b[k] - a[k];
            full = full + d * d;
        }
        let dx = b[0] - a[0];
        let dy = b[1] - a[1];
        best = best.min((dx * dx + dy * dy) / full);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::fixtures::circle;

    fn wave_figure_eight(n: usize, eps: f64) -> Curve<f64> {
        Curve::<f64>::from_fn(n, |u| vec![eps * u.cos(), eps * u.sin(), u.cos(), 0.0, (2.0 * u).sin()]).unwrap()
    }

    /// Independent pair scan in plain loops.
    fn brute_m(c: &Curve<f64>) -> f64 {
        let pts: Vec<&[f64]> = c.points().collect();
        let mut m = 1.0f64;
        for a in &pts {
            for b in &pts {
                let full: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                let flat = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                if flat > 0.0 {
                    m = m.max(full / flat);
                }
            }
        }
        m
    }

    #[test]
    fn planar_circle() {
        let r = projection_report(&circle(128, 1.0).embedded(3));
        assert!(r.is_convex && r.is_injective);
        assert!((r.slope_constant_m.unwrap() - 1.0).abs() < 1e-9);
        assert!((r.horizontal_floor_delta - 1.0).abs() < 1e-6);
        assert_eq!(r.winding, 1);
    }

    #[test]
    fn planar_figure_eight_is_not_injective() {
        let c = Curve::<f64>::from_fn(128, |u| vec![u.cos(), (2.0 * u).sin(), 0.0]).unwrap();
        let r = projection_report(&c);
        assert!(!r.is_injective && !r.is_convex);
    }

    #[test]
    fn wave_perturbed_figure_eight() {
        let c = wave_figure_eight(128, 1.0);
        let r = projection_report(&c);
        assert!(r.is_convex && r.is_injective);
        assert!((r.slope_constant_m.unwrap() - brute_m(&c)).abs() < 1e-12);
        assert!(r.horizontal_floor_delta > 0.0 && r.horizontal_floor_delta < 1.0);
    }

    #[test]
    fn segment_traversed_twice() {
        let c = Curve::<f64>::from_fn(64, |u| vec![u.cos(), 0.0, (2.0 * u).sin()]).unwrap();
        let r = projection_report(&c);
        assert!(!r.is_injective);
        assert!(r.slope_constant_m.is_none());
    }

    #[test]
    fn simple_nonconvex_polygon_is_injective() {
        let c = Curve::<f64>::from_fn(200, |u| {
            let r = 1.0 + 0.3 * (3.0 * u).cos();
            vec![r * u.cos(), r * u.sin()]
        })
        .unwrap();
        let r = projection_report(&c);
        assert!(!r.is_convex && r.is_injective);
    }
}
