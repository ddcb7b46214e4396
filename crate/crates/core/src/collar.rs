//! Collar widths and detours that hug an obstacle boundary.

use crate::error::{Error, Result};
use crate::geom::{NormSpec, Point, Polyline, Segment};
use crate::obstacle::{closure_gap, region_clearance, AaBox, Instance, Shape};
use crate::roots::convex_min;
use crate::scalar::Scalar;

const FIRST_SUBDIVISION: usize = 8;
const MAX_SUBDIVISION: usize = 1 << 14;

/// The band `K_δ` of points outside every obstacle but within `δ` of `∂S_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Collar<S> {
    pub obstacle: usize,
    /// `δ_i`
    pub width: S,
    /// Radius of the sphere detours run on (balls only): `r + δ/2`.
    pub routing_radius: Option<S>,
    /// Per-axis inflation of the box detour surface (boxes only).
    pub margin: Option<S>,
}

/// `δ_i = ½ · min(dist(S̄_i, S̄_j) for j ≠ i, dist(S̄_i, ∂U))`.
pub fn collar_width<S: Scalar>(i: usize, inst: &Instance<S>) -> Collar<S> {
    let ob = inst.obstacle(i);
    let mut m = region_clearance(ob, &inst.region, &inst.norm);
    for other in inst.obstacles.iter().filter(|o| o.id != i) {
        m = m.min(closure_gap(ob, other, &inst.norm));
    }
    let width = m / S::lit(2.0);
    let (routing_radius, margin) = match &ob.shape {
        Shape::Ball { radius, .. } => (Some(*radius + width / S::lit(2.0)), None),
        Shape::Box(_) => {
            let ones = vec![S::one(); inst.dim];
            (
                None,
                Some(width / (S::lit(2.0) * inst.norm.eval_unchecked(&ones))),
            )
        }
    };
    Collar {
        obstacle: i,
        width,
        routing_radius,
        margin,
    }
}

pub fn collar_widths<S: Scalar>(inst: &Instance<S>) -> Vec<Collar<S>> {
    (0..inst.obstacles.len())
        .map(|i| collar_width(i, inst))
        .collect()
}

/// A detour inside one collar.
#[derive(Debug, Clone, PartialEq)]
pub struct CollarRoute<S> {
    pub path: Polyline<S>,
    /// The endpoint directions were nearly opposite and an intermediate
    /// axis direction was inserted.
    pub antipodal: bool,
    /// Chords per interpolated direction pair (balls); 0 for boxes.
    pub subdivision: usize,
}

/// Routes from `p` to `q` inside the collar of `col.obstacle`.
///
/// Both points must lie outside the obstacle and within `δ` of its boundary.
/// The first and last vertex are `p` and `q` exactly.
pub fn collar_route<S: Scalar>(
    p: &Point<S>,
    q: &Point<S>,
    col: &Collar<S>,
    inst: &Instance<S>,
) -> Result<CollarRoute<S>> {
    let ob = inst.obstacle(col.obstacle);
    for (name, x) in [("start", p), ("end", q)] {
        let g = ob.gap(x, &inst.norm);
        if g < -inst.tol.class_eps || g >= col.width {
            return Err(Error::Collar(format!(
                "{name} point is not in the collar of obstacle {} (gap {g}, width {})",
                col.obstacle, col.width
            )));
        }
    }
    if p == q {
        return Ok(CollarRoute {
            path: Polyline::point(p.clone()),
            antipodal: false,
            subdivision: 0,
        });
    }
    match &ob.shape {
        Shape::Ball { center, radius } => ball_route(p, q, center, *radius, col, &inst.norm),
        Shape::Box(b) => {
            let m = col.margin.expect("box collar has a margin");
            box_route(p, q, b, m, inst.tol.class_eps)
        }
    }
}

fn ball_route<S: Scalar>(
    p: &Point<S>,
    q: &Point<S>,
    c: &Point<S>,
    r: S,
    col: &Collar<S>,
    norm: &NormSpec<S>,
) -> Result<CollarRoute<S>> {
    let rho = col
        .routing_radius
        .expect("ball collar has a routing radius");
    let unit = |x: &Point<S>| -> Result<Point<S>> {
        let v = x.sub(c);
        let n = v.dot(&v).sqrt();
        if n == S::zero() {
            return Err(Error::Collar(
                "direction through the ball center is undefined".into(),
            ));
        }
        Ok(v.scale(S::one() / n))
    };
    let up = unit(p)?;
    let uq = unit(q)?;

    let mut dirs = vec![up.clone()];
    let avg = up.add(&uq).scale(S::lit(0.5));
    let antipodal = avg.dot(&avg).sqrt() < S::lit(0.25);
    if antipodal {
        let k = (0..up.dim())
            .min_by(|&a, &b| {
                up[a]
                    .abs()
                    .partial_cmp(&up[b].abs())
                    .unwrap()
                    .then(a.cmp(&b))
            })
            .unwrap();
        let mut e = Point::zeros(up.dim()).into_coords();
        e[k] = S::one();
        dirs.push(Point::raw(e));
    }
    dirs.push(uq);
    let arcs: Vec<Slerp<S>> = dirs
        .windows(2)
        .map(|w| Slerp::new(&w[0], &w[1]))
        .collect::<Result<_>>()?;

    let floor = col.width / S::lit(4.0);
    let gap = |x: &Point<S>| norm.dist(x, c) - r;
    let mut k = FIRST_SUBDIVISION;
    loop {
        let mut arc = Vec::with_capacity(k * (dirs.len() - 1) + 1);
        for (i, a) in arcs.iter().enumerate() {
            let start = if i == 0 { 0 } else { 1 };
            for j in start..=k {
                let v = a.at(S::from_usize(j).unwrap() / S::from_usize(k).unwrap());
                arc.push(c.add_scaled(&v, rho / norm.of(&v)));
            }
        }
        let ok = arc.windows(2).all(|w| {
            let s = Segment::new(w[0].clone(), w[1].clone());
            convex_min(|t| gap(&s.at(t))).1 >= floor
        });
        if ok {
            let mut v = Vec::with_capacity(arc.len() + 2);
            v.push(p.clone());
            v.extend(arc);
            v.push(q.clone());
            return Ok(CollarRoute {
                path: Polyline::new(v)?.normalized(),
                antipodal,
                subdivision: k,
            });
        }
        if k >= MAX_SUBDIVISION {
            return Err(Error::Collar(format!(
                "no chord subdivision up to {MAX_SUBDIVISION} keeps the detour around obstacle {} in its collar",
                col.obstacle
            )));
        }
        k *= 2;
    }
}

// Directions from `a` to `b` at uniform angular steps in the plane they span.
struct Slerp<S> {
    a: Point<S>,
    b: Point<S>,
    theta: S,
}

impl<S: Scalar> Slerp<S> {
    fn new(a: &Point<S>, b: &Point<S>) -> Result<Self> {
        let cos = a.dot(b).max(-S::one()).min(S::one());
        let theta = cos.acos();
        if theta > S::PI() - S::lit(1e-6) {
            return Err(Error::Collar(
                "direction interpolation passes through the center".into(),
            ));
        }
        Ok(Slerp {
            a: a.clone(),
            b: b.clone(),
            theta,
        })
    }

    fn at(&self, t: S) -> Point<S> {
        if t == S::zero() {
            return self.a.clone();
        }
        if t == S::one() {
            return self.b.clone();
        }
        let s = self.theta.sin();
        if s < S::lit(1e-9) {
            return Point::lerp(&self.a, &self.b, t);
        }
        let wa = ((S::one() - t) * self.theta).sin() / s;
        let wb = (t * self.theta).sin() / s;
        self.a.scale(wa).add_scaled(&self.b, wb)
    }
}

fn box_route<S: Scalar>(
    p: &Point<S>,
    q: &Point<S>,
    b: &AaBox<S>,
    m: S,
    eps: S,
) -> Result<CollarRoute<S>> {
    let d = b.dim();
    let lo: Vec<S> = b.lo.coords().iter().map(|&x| x - m).collect();
    let hi: Vec<S> = b.hi.coords().iter().map(|&x| x + m).collect();
    let lift = |x: &Point<S>| -> Point<S> {
        Point::raw(
            (0..d)
                .map(|k| {
                    if x[k] <= b.lo[k] + eps {
                        lo[k]
                    } else if x[k] >= b.hi[k] - eps {
                        hi[k]
                    } else {
                        x[k]
                    }
                })
                .collect(),
        )
    };
    let side = |x: &Point<S>, k: usize| -> Option<bool> {
        if x[k] == lo[k] {
            Some(false)
        } else if x[k] == hi[k] {
            Some(true)
        } else {
            None
        }
    };
    let corner = |x: &Point<S>| -> Point<S> {
        Point::raw(
            (0..d)
                .map(|k| match side(x, k) {
                    Some(_) => x[k],
                    None if x[k] - lo[k] <= hi[k] - x[k] => lo[k],
                    None => hi[k],
                })
                .collect(),
        )
    };

    let pl = lift(p);
    let ql = lift(q);
    let mut v = vec![p.clone(), pl.clone()];
    let shared = (0..d).any(|k| side(&pl, k).is_some() && side(&pl, k) == side(&ql, k));
    if !shared {
        let mut cur = corner(&pl);
        let target = corner(&ql);
        v.push(cur.clone());
        for k in 0..d {
            if cur[k] != target[k] {
                let mut next = cur.clone().into_coords();
                next[k] = target[k];
                cur = Point::raw(next);
                v.push(cur.clone());
            }
        }
    }
    v.push(ql);
    v.push(q.clone());
    Ok(CollarRoute {
        path: Polyline::new(v)?.normalized(),
        antipodal: false,
        subdivision: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::polyline_sample;
    use crate::obstacle::{Obstacle, TolerancePolicy};

    fn pt(c: &[f64]) -> Point<f64> {
        Point::new(c.to_vec()).unwrap()
    }

    fn inst(norm: NormSpec<f64>, obs: Vec<Obstacle<f64>>) -> Instance<f64> {
        let u = AaBox::new(pt(&[-10.0, -10.0]), pt(&[10.0, 10.0])).unwrap();
        Instance::new(norm, u, obs, TolerancePolicy::default()).unwrap()
    }

    fn assert_in_collar(r: &Polyline<f64>, col: &Collar<f64>, inst: &Instance<f64>) {
        let ob = inst.obstacle(col.obstacle);
        for x in polyline_sample(r, col.width / 20.0, &inst.norm) {
            let g = ob.gap(&x, &inst.norm);
            assert!(g >= -inst.tol.class_eps && g < col.width, "gap {g}");
        }
    }

    #[test]
    fn widths() {
        let one = inst(
            NormSpec::euclidean(),
            vec![Obstacle::ball(0, pt(&[0.0, 0.0]), 1.0)],
        );
        assert_eq!(collar_width(0, &one).width, 4.5);
        let two = inst(
            NormSpec::euclidean(),
            vec![
                Obstacle::ball(0, pt(&[0.0, 0.0]), 1.0),
                Obstacle::ball(1, pt(&[3.0, 0.0]), 1.0),
            ],
        );
        assert_eq!(collar_width(0, &two).width, 0.5);
        assert_eq!(collar_width(1, &two).width, 0.5);
    }

    fn half_collar() -> (Instance<f64>, Collar<f64>) {
        let two = inst(
            NormSpec::euclidean(),
            vec![
                Obstacle::ball(0, pt(&[0.0, 0.0]), 1.0),
                Obstacle::ball(1, pt(&[3.0, 0.0]), 1.0),
            ],
        );
        let col = collar_width(0, &two);
        (two, col)
    }

    #[test]
    fn antipodal_detour() {
        let (inst, col) = half_collar();
        let r = collar_route(&pt(&[-1.0, 0.0]), &pt(&[1.0, 0.0]), &col, &inst).unwrap();
        assert!(r.antipodal);
        assert_eq!(r.path.first(), &pt(&[-1.0, 0.0]));
        assert_eq!(r.path.last(), &pt(&[1.0, 0.0]));
        assert!(r
            .path
            .vertices()
            .iter()
            .any(|v| (v[0].abs() < 1e-12) && (v[1] - 1.25).abs() < 1e-12));
        for x in polyline_sample(&r.path, 0.025, &inst.norm) {
            let n = inst.norm.of(&x);
            assert!(n >= 1.0 + 1e-9 || x == pt(&[-1.0, 0.0]) || x == pt(&[1.0, 0.0]));
            assert!(n <= 1.5);
        }
        assert_in_collar(&r.path, &col, &inst);
    }

    #[test]
    fn degenerate_route() {
        let (inst, col) = half_collar();
        let r = collar_route(&pt(&[1.0, 0.0]), &pt(&[1.0, 0.0]), &col, &inst).unwrap();
        assert_eq!(r.path.len(), 1);
    }

    #[test]
    fn quarter_arc() {
        let (inst, col) = half_collar();
        let r = collar_route(&pt(&[1.0, 0.0]), &pt(&[0.0, 1.0]), &col, &inst).unwrap();
        assert!(!r.antipodal);
        assert_eq!(r.subdivision, 8);
        let rho = 1.25f64;
        let bound = rho * (std::f64::consts::PI / 32.0).cos();
        assert!(bound > 1.0);
        let v = r.path.vertices();
        for w in v[1..v.len() - 1].windows(2) {
            let mid = Point::lerp(&w[0], &w[1], 0.5);
            assert!(inst.norm.of(&mid) >= bound - 1e-12);
        }
    }

    #[test]
    fn other_norms_stay_in_collar() {
        for n in [
            NormSpec::P(1.5),
            NormSpec::P(3.0),
            NormSpec::Max,
            NormSpec::P(1.0),
        ] {
            let i = inst(n.clone(), vec![Obstacle::ball(0, pt(&[1.0, 2.0]), 2.0)]);
            let col = collar_width(0, &i);
            let ob = i.obstacle(0);
            let on = |x: f64, y: f64| {
                let v = pt(&[x, y]);
                let s = 2.0 / n.of(&v);
                pt(&[1.0 + x * s, 2.0 + y * s])
            };
            for (a, b) in [
                ((1.0, 0.0), (-1.0, 0.1)),
                ((0.3, 1.0), (0.2, -1.0)),
                ((1.0, 1.0), (1.0, 0.9)),
            ] {
                let p = on(a.0, a.1);
                let q = on(b.0, b.1);
                assert!(ob.gap(&p, &n).abs() < 1e-12);
                let r = collar_route(&p, &q, &col, &i).unwrap();
                assert_in_collar(&r.path, &col, &i);
            }
        }
    }

    #[test]
    fn box_detour_walks_faces() {
        let b = Obstacle::open_box(0, pt(&[-1.0, -1.0, -1.0]), pt(&[1.0, 1.0, 2.0])).unwrap();
        let u = AaBox::new(pt(&[-10.0, -10.0, -10.0]), pt(&[10.0, 10.0, 10.0])).unwrap();
        for n in [NormSpec::euclidean(), NormSpec::Max, NormSpec::P(1.0)] {
            let i =
                Instance::new(n, u.clone(), vec![b.clone()], TolerancePolicy::default()).unwrap();
            let col = collar_width(0, &i);
            let p = pt(&[-1.0, 0.2, 0.5]);
            let q = pt(&[1.0, -0.3, 1.1]);
            let r = collar_route(&p, &q, &col, &i).unwrap();
            assert_eq!(r.path.first(), &p);
            assert_eq!(r.path.last(), &q);
            assert_in_collar(&r.path, &col, &i);
            let corner = pt(&[1.0, 1.0, 2.0]);
            let r = collar_route(&corner, &q, &col, &i).unwrap();
            assert_in_collar(&r.path, &col, &i);
        }
    }

    #[test]
    fn rejects_points_outside_collar() {
        let (inst, col) = half_collar();
        assert!(collar_route(&pt(&[0.0, 0.0]), &pt(&[1.0, 0.0]), &col, &inst).is_err());
        assert!(collar_route(&pt(&[-5.0, 0.0]), &pt(&[1.0, 0.0]), &col, &inst).is_err());
    }
}
