//! Independent safety checks for routes and a 2D reference router.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::crossing::segment_profile;
use crate::error::{Error, Result};
use crate::geom::{segment_subdivisions, Point, Polyline, Segment};
use crate::obstacle::{Instance, Obstacle, Shape};
use crate::scalar::Scalar;

const MAX_RECORDED: usize = 10_000;

/// A sample that failed the check.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation<S> {
    pub point: Point<S>,
    /// Offending obstacle; `None` when the point lies outside `U`.
    pub obstacle: Option<usize>,
    /// Signed margin against the failed test (negative).
    pub margin: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport<S> {
    pub pass: bool,
    pub violations: Vec<Violation<S>>,
    pub samples_checked: usize,
    /// Smallest `g + class_eps` over the route and all obstacles, where `g`
    /// is the signed gap function. Positive iff nothing classifies Interior.
    /// Infinite for an empty family.
    pub min_margin: S,
}

/// Checks that `r` stays in the closed region `U` and never classifies
/// Interior for any obstacle.
///
/// Each edge is sampled at spacing at most `step` wherever it comes near an
/// obstacle, and every (edge, obstacle) pair is additionally checked exactly
/// through its convex gap profile.
pub fn verify_route<S: Scalar>(
    r: &Polyline<S>,
    inst: &Instance<S>,
    step: S,
) -> Result<VerifyReport<S>> {
    if !(step > S::zero()) {
        return Err(Error::Parameter(format!(
            "sampling step {step} must be positive"
        )));
    }
    let eps = inst.tol.class_eps;
    let mut violations = Vec::new();
    let mut samples = 0usize;
    let mut min_margin = S::infinity();
    let mut failed = false;

    for v in r.vertices() {
        samples += 1;
        let m = inst.region.margin(v);
        if m > eps {
            failed = true;
            record(
                Violation {
                    point: v.clone(),
                    obstacle: None,
                    margin: eps - m,
                },
                &mut violations,
            );
        }
    }

    for e in r.edges() {
        for ob in &inst.obstacles {
            let sampled = sample_near(&e, ob, inst, step, |x, g| {
                if g + eps < S::zero() {
                    failed = true;
                    record(
                        Violation {
                            point: x,
                            obstacle: Some(ob.id),
                            margin: g + eps,
                        },
                        &mut violations,
                    );
                }
            });
            samples += sampled.0;
            min_margin = min_margin.min(sampled.1 + eps);
            if e.is_degenerate() {
                continue;
            }
            if let Ok(pr) = segment_profile(&e, ob, &inst.norm, &inst.tol) {
                let m = pr.f_min + eps;
                min_margin = min_margin.min(m);
                if m < S::zero() || pr.overlaps_interior() {
                    failed = true;
                    record(
                        Violation {
                            point: e.at(pr.t_min),
                            obstacle: Some(ob.id),
                            margin: m,
                        },
                        &mut violations,
                    );
                }
            }
        }
    }
    Ok(VerifyReport {
        pass: !failed,
        violations,
        samples_checked: samples,
        min_margin,
    })
}

fn record<S>(v: Violation<S>, violations: &mut Vec<Violation<S>>) {
    if violations.len() < MAX_RECORDED {
        violations.push(v);
    }
}

// Samples the part of `e` inside the obstacle's bounding box (grown by
// `step`), returning the sample count and the smallest gap seen.
fn sample_near<S: Scalar>(
    e: &Segment<S>,
    ob: &Obstacle<S>,
    inst: &Instance<S>,
    step: S,
    mut visit: impl FnMut(Point<S>, S),
) -> (usize, S) {
    let (lo, hi) = ob.bounds(&inst.norm);
    let mut t0 = S::zero();
    let mut t1 = S::one();
    for k in 0..lo.len() {
        let (a, b) = (e.a[k], e.b[k]);
        let (l, h) = (lo[k] - step, hi[k] + step);
        let d = b - a;
        if d == S::zero() {
            if a < l || a > h {
                return (0, S::infinity());
            }
            continue;
        }
        let (mut u, mut w) = ((l - a) / d, (h - a) / d);
        if u > w {
            std::mem::swap(&mut u, &mut w);
        }
        t0 = t0.max(u);
        t1 = t1.min(w);
    }
    if t0 > t1 {
        return (0, S::infinity());
    }
    let len = e.length(&inst.norm) * (t1 - t0);
    let n = segment_subdivisions(len, step);
    let mut best = S::infinity();
    for i in 0..=n {
        let t = t0 + (t1 - t0) * S::from_usize(i).unwrap() / S::from_usize(n).unwrap();
        let x = e.at(t);
        let g = ob.gap(&x, &inst.norm);
        best = best.min(g);
        visit(x, g);
    }
    (n + 1, best)
}

/// Angular resolution of the reference router's arc nodes: `π / 64`.
const ARC_NODES: usize = 128;

/// Independent existence oracle for planar disc instances under ℓ2.
///
/// Places nodes around every disc (inflated by `class_eps`) at angular steps
/// of `π/64`, connects mutually visible nodes and runs a best-first search
/// from `x` to `y`. Returns `None` when the discretised graph has no path.
pub fn reference_route_2d<S: Scalar>(
    x: &Point<S>,
    y: &Point<S>,
    inst: &Instance<S>,
) -> Result<Option<Polyline<S>>> {
    if inst.dim != 2 {
        return Err(Error::Unsupported(format!(
            "reference router needs d = 2, instance has d = {}",
            inst.dim
        )));
    }
    if !inst.norm.is_euclidean() {
        return Err(Error::Unsupported(
            "reference router needs the Euclidean norm".into(),
        ));
    }
    let mut discs = Vec::with_capacity(inst.obstacles.len());
    for ob in &inst.obstacles {
        match &ob.shape {
            Shape::Ball { center, radius } => discs.push((center[0], center[1], *radius)),
            Shape::Box(_) => {
                return Err(Error::Unsupported(
                    "reference router handles discs only".into(),
                ))
            }
        }
    }
    if x == y {
        return Ok(Some(Polyline::point(x.clone())));
    }
    let eps = inst.tol.class_eps;
    let half = eps / S::lit(2.0);
    let clear = |px: S, py: S, qx: S, qy: S| -> bool {
        discs.iter().all(|&(cx, cy, r)| {
            let lim = r + half;
            if px.max(qx) < cx - lim
                || px.min(qx) > cx + lim
                || py.max(qy) < cy - lim
                || py.min(qy) > cy + lim
            {
                return true;
            }
            seg_point_dist(px, py, qx, qy, cx, cy) >= lim
        })
    };

    let mut nodes: Vec<(S, S)> = vec![(x[0], x[1])];
    let n = S::from_usize(ARC_NODES).unwrap();
    let cos = (S::PI() / n).cos();
    for &(cx, cy, r) in &discs {
        let rr = (r + eps) / cos;
        for k in 0..ARC_NODES {
            let a = S::lit(2.0) * S::PI() * S::from_usize(k).unwrap() / n;
            let p = (cx + rr * a.cos(), cy + rr * a.sin());
            let pt = Point::raw(vec![p.0, p.1]);
            let inside_other = discs
                .iter()
                .any(|&(ox, oy, or)| ((p.0 - ox).powi(2) + (p.1 - oy).powi(2)).sqrt() < or + eps);
            if !inside_other && inst.region.margin(&pt) < S::zero() {
                nodes.push(p);
            }
        }
    }
    let target = (y[0], y[1]);
    let h = |p: (S, S)| ((p.0 - target.0).powi(2) + (p.1 - target.1).powi(2)).sqrt();

    let mut parent: Vec<Option<usize>> = vec![None; nodes.len()];
    let mut seen = vec![false; nodes.len()];
    let mut open = BinaryHeap::new();
    seen[0] = true;
    open.push(Entry {
        key: h(nodes[0]),
        node: 0,
    });
    while let Some(Entry { node: u, .. }) = open.pop() {
        let pu = nodes[u];
        if clear(pu.0, pu.1, target.0, target.1) {
            let mut chain = vec![Point::raw(vec![target.0, target.1])];
            let mut cur = Some(u);
            while let Some(c) = cur {
                chain.push(if c == 0 {
                    x.clone()
                } else {
                    Point::raw(vec![nodes[c].0, nodes[c].1])
                });
                cur = parent[c];
            }
            chain.reverse();
            *chain.last_mut().unwrap() = y.clone();
            return Ok(Some(Polyline::new(chain)?));
        }
        for v in 1..nodes.len() {
            if !seen[v] && clear(pu.0, pu.1, nodes[v].0, nodes[v].1) {
                seen[v] = true;
                parent[v] = Some(u);
                open.push(Entry {
                    key: h(nodes[v]),
                    node: v,
                });
            }
        }
    }
    Ok(None)
}

fn seg_point_dist<S: Scalar>(px: S, py: S, qx: S, qy: S, cx: S, cy: S) -> S {
    let (dx, dy) = (qx - px, qy - py);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == S::zero() {
        S::zero()
    } else {
        (((cx - px) * dx + (cy - py) * dy) / len2)
            .max(S::zero())
            .min(S::one())
    };
    let (ex, ey) = (px + t * dx - cx, py + t * dy - cy);
    (ex * ex + ey * ey).sqrt()
}

// Min-heap entry on `key`, ties broken by node index.
struct Entry<S> {
    key: S,
    node: usize,
}

impl<S: Scalar> PartialEq for Entry<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for Entry<S> {}

impl<S: Scalar> PartialOrd for Entry<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for Entry<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .partial_cmp(&self.key)
            .unwrap_or(Ordering::Equal)
            .then(other.node.cmp(&self.node))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::NormSpec;
    use crate::obstacle::{AaBox, TolerancePolicy};

    fn pt(c: &[f64]) -> Point<f64> {
        Point::new(c.to_vec()).unwrap()
    }

    fn inst(obs: Vec<Obstacle<f64>>) -> Instance<f64> {
        let u = AaBox::new(pt(&[-10.0, -10.0]), pt(&[10.0, 10.0])).unwrap();
        Instance::new(NormSpec::euclidean(), u, obs, TolerancePolicy::default()).unwrap()
    }

    #[test]
    fn clear_segment_reports_clearance() {
        let i = inst(vec![Obstacle::ball(0, pt(&[0.0, 0.0]), 1.0)]);
        let p = Polyline::new(vec![pt(&[-5.0, 3.0]), pt(&[5.0, 3.0])]).unwrap();
        let r = verify_route(&p, &i, 0.1).unwrap();
        assert!(r.pass);
        assert!((r.min_margin - 2.0).abs() < 1e-6);
    }

    #[test]
    fn segment_through_center_fails() {
        let i = inst(vec![Obstacle::ball(0, pt(&[0.0, 0.0]), 1.0)]);
        let p = Polyline::new(vec![pt(&[-5.0, 0.0]), pt(&[5.0, 0.0])]).unwrap();
        let r = verify_route(&p, &i, 0.1).unwrap();
        assert!(!r.pass);
        assert!(r.violations.iter().any(|v| v.point[0].abs() < 0.05));
    }

    #[test]
    fn outside_region_fails() {
        let i = inst(vec![]);
        let p = Polyline::new(vec![pt(&[-5.0, 0.0]), pt(&[15.0, 0.0])]).unwrap();
        let r = verify_route(&p, &i, 0.1).unwrap();
        assert!(!r.pass);
        assert_eq!(r.violations[0].obstacle, None);
    }

    #[test]
    fn reference_router_detours() {
        let i = inst(vec![Obstacle::ball(0, pt(&[0.0, 0.0]), 1.0)]);
        let x = pt(&[-3.0, 0.0]);
        let y = pt(&[3.0, 0.0]);
        let r = reference_route_2d(&x, &y, &i).unwrap().unwrap();
        assert_eq!(r.first(), &x);
        assert_eq!(r.last(), &y);
        assert!(verify_route(&r, &i, 0.01).unwrap().pass);
        assert_eq!(reference_route_2d(&x, &x, &i).unwrap().unwrap().len(), 1);
    }

    #[test]
    fn reference_router_finds_sealed_corridor() {
        // A wall of overlapping discs across U: no path.
        let obs = (0..11)
            .map(|k| Obstacle::ball(k, pt(&[0.0, -10.0 + 2.0 * k as f64]), 1.2))
            .collect();
        let i = inst(obs);
        let r = reference_route_2d(&pt(&[-5.0, 0.5]), &pt(&[5.0, 0.5]), &i).unwrap();
        assert!(r.is_none());
    }

    #[test]
    fn reference_router_rejects_other_settings() {
        let u = AaBox::new(pt(&[-10.0, -10.0, -10.0]), pt(&[10.0, 10.0, 10.0])).unwrap();
        let i =
            Instance::new(NormSpec::euclidean(), u, vec![], TolerancePolicy::default()).unwrap();
        let x = pt(&[0.0, 0.0, 0.0]);
        assert!(matches!(
            reference_route_2d(&x, &x, &i),
            Err(Error::Unsupported(_))
        ));
        let mut j = inst(vec![]);
        j.norm = NormSpec::Max;
        let x = pt(&[0.0, 0.0]);
        assert!(matches!(
            reference_route_2d(&x, &x, &j),
            Err(Error::Unsupported(_))
        ));
    }
}
