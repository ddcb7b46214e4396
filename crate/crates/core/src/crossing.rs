//! Segment–boundary crossings, interior overlap and the U–M check.

use crate::error::{Error, Result};
use crate::geom::{NormSpec, Point, Polyline, Segment};
use crate::obstacle::{Instance, Obstacle, Shape, TolerancePolicy};
use crate::roots::{bisect, convex_min};
use crate::scalar::Scalar;

/// Everything the schedule needs to know about one (segment, obstacle) pair.
///
/// The gap function `f(t) = g(z(t))` is convex, so the set where the segment
/// lies strictly inside the obstacle is a single parameter run.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentProfile<S> {
    /// Boundary parameters, strictly increasing, merged within `t_eps`.
    pub crossings: Vec<S>,
    pub t_min: S,
    pub f_min: S,
    /// Parameter run classified Interior, when the segment dips deeper than
    /// `class_eps`. Its ends are crossings, or `0` / `1` when the segment
    /// starts or ends inside.
    pub interior: Option<(S, S)>,
}

impl<S: Scalar> SegmentProfile<S> {
    fn empty(t_min: S, f_min: S) -> Self {
        SegmentProfile {
            crossings: Vec::new(),
            t_min,
            f_min,
            interior: None,
        }
    }

    /// Whether the piece of the segment just after crossing `t` is Interior.
    pub fn enters_at(&self, t: S) -> bool {
        matches!(self.interior, Some((lo, hi)) if lo <= t && t < hi)
    }

    pub fn overlaps_interior(&self) -> bool {
        self.interior.is_some()
    }
}

/// Analyses the segment against one obstacle.
///
/// Fails with a U–M violation when the segment runs inside the boundary of a
/// polyhedral obstacle over a parameter interval longer than `10·t_eps`. The
/// returned error carries edge index `0`; callers relabel it.
pub fn segment_profile<S: Scalar>(
    s: &Segment<S>,
    ob: &Obstacle<S>,
    norm: &NormSpec<S>,
    tol: &TolerancePolicy<S>,
) -> Result<SegmentProfile<S>> {
    let eps = tol.class_eps;
    let f = |t: S| ob.gap(&s.at(t), norm);
    let f0 = f(S::zero());
    let f1 = f(S::one());

    let euclid = match &ob.shape {
        Shape::Ball { center, radius } if norm.is_euclidean() => {
            Some(Quadratic::new(s, center, *radius))
        }
        _ => None,
    };
    let (mut tm, mut fm) = match &euclid {
        Some(q) => {
            let tm = q.argmin();
            (tm, f(tm))
        }
        None => convex_min(f),
    };
    if f0 < fm {
        (tm, fm) = (S::zero(), f0);
    }
    if f1 < fm {
        (tm, fm) = (S::one(), f1);
    }

    if fm > eps {
        return Ok(SegmentProfile::empty(tm, fm));
    }

    if fm.abs() <= eps && ob.has_flat_faces(norm) {
        let scale = S::one() + ob.scale().max(coord_scale(&s.a)).max(coord_scale(&s.b));
        let noise = (eps / S::lit(8.0)).min(S::noise(256.0) * scale);
        let run = |level: S| {
            let lo = if f0 <= level {
                S::zero()
            } else {
                bisect(S::zero(), tm, |t| f(t) <= level)
            };
            let hi = if f1 <= level {
                S::one()
            } else {
                bisect(tm, S::one(), |t| f(t) > level)
            };
            (lo, hi)
        };
        let (lo, hi) = run(fm + noise);
        let (lo2, hi2) = run(fm + noise / S::lit(16.0));
        let flat = hi2 - lo2 > (hi - lo) / S::lit(2.0);
        if flat && hi - lo > S::lit(10.0) * tol.t_eps {
            return Err(Error::UmViolation {
                edge: 0,
                obstacle: ob.id,
                t_lo: lo.as_f64(),
                t_hi: hi.as_f64(),
            });
        }
    }

    if fm >= S::zero() {
        return Ok(SegmentProfile {
            crossings: vec![tm],
            t_min: tm,
            f_min: fm,
            interior: None,
        });
    }

    let (left, right) = match &euclid {
        Some(q) => q.roots(tm, f0, f1, eps),
        None => {
            let left = if f0 > S::zero() {
                Some(bisect(S::zero(), tm, |t| f(t) <= S::zero()))
            } else if f0 >= -eps {
                Some(S::zero())
            } else {
                None
            };
            let right = if f1 > S::zero() {
                Some(bisect(tm, S::one(), |t| f(t) > S::zero()))
            } else if f1 >= -eps {
                Some(S::one())
            } else {
                None
            };
            (left, right)
        }
    };

    let mut crossings = Vec::with_capacity(2);
    crossings.extend(left);
    if let Some(r) = right {
        match crossings.last() {
            Some(&l) if r - l <= tol.t_eps => {}
            _ => crossings.push(r),
        }
    }
    let interior = (fm < -eps).then(|| (left.unwrap_or(S::zero()), right.unwrap_or(S::one())));
    Ok(SegmentProfile {
        crossings,
        t_min: tm,
        f_min: fm,
        interior,
    })
}

/// Cheap rejection: true when the bounding boxes of `s` and the obstacle are
/// so far apart along some axis that the gap exceeds `2·eps` on all of `s`.
pub(crate) fn far_from<S: Scalar>(
    s: &Segment<S>,
    ob: &Obstacle<S>,
    norm: &NormSpec<S>,
    eps: S,
) -> bool {
    let (lo, hi) = ob.bounds(norm);
    let two = S::lit(2.0) * eps;
    (0..lo.len()).any(|k| {
        let a = s.a[k].min(s.b[k]);
        let b = s.a[k].max(s.b[k]);
        let sep = (lo[k] - b).max(a - hi[k]);
        sep > S::zero() && sep * norm.axis_norm(k).min(S::one()) > two
    })
}

/// [`segment_profile`] with the bounding-box shortcut for distant pairs.
pub(crate) fn profile_or_miss<S: Scalar>(
    s: &Segment<S>,
    ob: &Obstacle<S>,
    norm: &NormSpec<S>,
    tol: &TolerancePolicy<S>,
) -> Result<Option<SegmentProfile<S>>> {
    if far_from(s, ob, norm, tol.class_eps) {
        return Ok(None);
    }
    segment_profile(s, ob, norm, tol).map(Some)
}

fn coord_scale<S: Scalar>(p: &Point<S>) -> S {
    p.coords().iter().fold(S::zero(), |m, c| m.max(c.abs()))
}

// |u + t d|² − r² = A t² + 2 B t + C
struct Quadratic<S> {
    a: S,
    b: S,
    c: S,
}

impl<S: Scalar> Quadratic<S> {
    fn new(s: &Segment<S>, center: &Point<S>, radius: S) -> Self {
        let u = s.a.sub(center);
        let d = s.direction();
        let nu = u.dot(&u).sqrt();
        Quadratic {
            a: d.dot(&d),
            b: u.dot(&d),
            c: (nu - radius) * (nu + radius),
        }
    }

    fn argmin(&self) -> S {
        if self.a == S::zero() {
            return S::zero();
        }
        (-self.b / self.a).max(S::zero()).min(S::one())
    }

    fn roots(&self, tm: S, f0: S, f1: S, eps: S) -> (Option<S>, Option<S>) {
        let disc = (self.b * self.b - self.a * self.c).max(S::zero()).sqrt();
        let q = if self.b >= S::zero() {
            -(self.b + disc)
        } else {
            -self.b + disc
        };
        let (mut r1, mut r2) = if q == S::zero() {
            (tm, tm)
        } else {
            (q / self.a, self.c / q)
        };
        if r1 > r2 {
            std::mem::swap(&mut r1, &mut r2);
        }
        let clamp = |t: S, lo: S, hi: S| t.max(lo).min(hi);
        let left = if f0 > S::zero() {
            Some(clamp(r1, S::zero(), tm))
        } else if f0 >= -eps {
            Some(S::zero())
        } else {
            None
        };
        let right = if f1 > S::zero() {
            Some(clamp(r2, tm, S::one()))
        } else if f1 >= -eps {
            Some(S::one())
        } else {
            None
        };
        (left, right)
    }
}

/// All parameters at which `s` meets `∂S`, strictly increasing.
pub fn boundary_crossings<S: Scalar>(
    s: &Segment<S>,
    ob: &Obstacle<S>,
    norm: &NormSpec<S>,
    tol: &TolerancePolicy<S>,
) -> Result<Vec<S>> {
    Ok(segment_profile(s, ob, norm, tol)?.crossings)
}

/// Whether some point of `s` classifies Interior for `ob`.
pub fn interior_overlap<S: Scalar>(
    s: &Segment<S>,
    ob: &Obstacle<S>,
    norm: &NormSpec<S>,
    tol: &TolerancePolicy<S>,
) -> Result<bool> {
    Ok(segment_profile(s, ob, norm, tol)?.overlaps_interior())
}

/// One U–M failure: an edge running along an obstacle boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct UmViolationEntry {
    pub edge: usize,
    pub obstacle: usize,
    pub t_lo: f64,
    pub t_hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UmReport {
    pub pass: bool,
    /// Total boundary crossings per edge, over all obstacles.
    pub counts: Vec<usize>,
    pub violations: Vec<UmViolationEntry>,
}

impl UmReport {
    /// The first violation as an error, if any.
    pub fn to_error(&self) -> Option<Error> {
        self.violations.first().map(|v| Error::UmViolation {
            edge: v.edge,
            obstacle: v.obstacle,
            t_lo: v.t_lo,
            t_hi: v.t_hi,
        })
    }
}

/// Runs the crossing analysis on every (edge, obstacle) pair of `p`.
pub fn check_um<S: Scalar>(p: &Polyline<S>, inst: &Instance<S>) -> UmReport {
    let mut counts = Vec::with_capacity(p.edge_count());
    let mut violations = Vec::new();
    for (j, e) in p.edges().enumerate() {
        let mut count = 0;
        if !e.is_degenerate() {
            for ob in &inst.obstacles {
                match profile_or_miss(&e, ob, &inst.norm, &inst.tol) {
                    Ok(pr) => count += pr.map_or(0, |pr| pr.crossings.len()),
                    Err(Error::UmViolation {
                        obstacle,
                        t_lo,
                        t_hi,
                        ..
                    }) => violations.push(UmViolationEntry {
                        edge: j,
                        obstacle,
                        t_lo,
                        t_hi,
                    }),
                    Err(_) => {}
                }
            }
        }
        counts.push(count);
    }
    UmReport {
        pass: violations.is_empty(),
        counts,
        violations,
    }
}
