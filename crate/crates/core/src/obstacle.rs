//! Obstacle shapes, the instance container and the classification tolerance.

use crate::error::{Error, Result};
use crate::geom::{NormSpec, Point, Region};
use crate::scalar::Scalar;

/// Open axis-aligned box `{x : lo < x < hi}` (componentwise).
#[derive(Debug, Clone, PartialEq)]
pub struct AaBox<S> {
    pub lo: Point<S>,
    pub hi: Point<S>,
}

impl<S: Scalar> AaBox<S> {
    pub fn new(lo: Point<S>, hi: Point<S>) -> Result<Self> {
        if lo.dim() != hi.dim() {
            return Err(Error::Instance("box corners of mixed dimension".into()));
        }
        if lo.coords().iter().zip(hi.coords()).any(|(a, b)| !(a < b)) {
            return Err(Error::Instance("box requires lo < hi componentwise".into()));
        }
        Ok(AaBox { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    /// Componentwise clamp of `p` into the closed box.
    pub fn clamp(&self, p: &Point<S>) -> Point<S> {
        Point::raw(
            p.coords()
                .iter()
                .zip(self.lo.coords().iter().zip(self.hi.coords()))
                .map(|(&x, (&l, &h))| x.max(l).min(h))
                .collect(),
        )
    }

    /// Largest signed face violation: negative inside, zero on the boundary.
    pub fn margin(&self, p: &Point<S>) -> S {
        p.coords()
            .iter()
            .zip(self.lo.coords().iter().zip(self.hi.coords()))
            .fold(S::neg_infinity(), |m, (&x, (&l, &h))| {
                m.max(l - x).max(x - h)
            })
    }

    /// Norm distance from an interior point to the complement of the box.
    /// Negative when `p` lies outside.
    pub fn inner_clearance(&self, p: &Point<S>, norm: &NormSpec<S>) -> S {
        (0..self.dim())
            .map(|k| (p[k] - self.lo[k]).min(self.hi[k] - p[k]) * norm.axis_norm(k))
            .fold(S::infinity(), S::min)
    }
}

/// Geometry of one obstacle `S_i`.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape<S> {
    /// Open norm ball under the instance norm.
    Ball { center: Point<S>, radius: S },
    /// Open axis-aligned box.
    Box(AaBox<S>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Obstacle<S> {
    pub id: usize,
    pub shape: Shape<S>,
}

impl<S: Scalar> Obstacle<S> {
    pub fn ball(id: usize, center: Point<S>, radius: S) -> Self {
        Obstacle {
            id,
            shape: Shape::Ball { center, radius },
        }
    }

    pub fn open_box(id: usize, lo: Point<S>, hi: Point<S>) -> Result<Self> {
        Ok(Obstacle {
            id,
            shape: Shape::Box(AaBox::new(lo, hi)?),
        })
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::Ball { center, .. } => center.dim(),
            Shape::Box(b) => b.dim(),
        }
    }

    /// Signed gap function: `‖p − c‖ − r` for balls and the componentwise
    /// margin for boxes. Negative exactly on the open set, convex in `p`.
    #[inline]
    pub fn gap(&self, p: &Point<S>, norm: &NormSpec<S>) -> S {
        match &self.shape {
            Shape::Ball { center, radius } => norm.dist(p, center) - *radius,
            Shape::Box(b) => b.margin(p),
        }
    }

    /// Norm distance from `p` to `∂S`.
    pub fn boundary_distance(&self, p: &Point<S>, norm: &NormSpec<S>) -> S {
        match &self.shape {
            Shape::Ball { center, radius } => (norm.dist(p, center) - *radius).abs(),
            Shape::Box(b) => {
                if b.margin(p) > S::zero() {
                    norm.dist(p, &b.clamp(p))
                } else {
                    b.inner_clearance(p, norm).abs()
                }
            }
        }
    }

    /// Whether the boundary may contain flat pieces a segment can run along.
    pub fn has_flat_faces(&self, norm: &NormSpec<S>) -> bool {
        match self.shape {
            Shape::Ball { .. } => !norm.is_strictly_convex(),
            Shape::Box(_) => true,
        }
    }

    /// Axis-aligned bounding box of the closure.
    pub fn bounds(&self, norm: &NormSpec<S>) -> (Vec<S>, Vec<S>) {
        match &self.shape {
            Shape::Ball { center, radius } => {
                let reach: Vec<S> = (0..center.dim())
                    .map(|k| *radius / norm.axis_norm(k))
                    .collect();
                (
                    center
                        .coords()
                        .iter()
                        .zip(&reach)
                        .map(|(&c, &r)| c - r)
                        .collect(),
                    center
                        .coords()
                        .iter()
                        .zip(&reach)
                        .map(|(&c, &r)| c + r)
                        .collect(),
                )
            }
            Shape::Box(b) => (b.lo.coords().to_vec(), b.hi.coords().to_vec()),
        }
    }

    /// Largest coordinate magnitude of the defining data; sets noise floors.
    pub(crate) fn scale(&self) -> S {
        let m = |p: &Point<S>| p.coords().iter().fold(S::zero(), |m, c| m.max(c.abs()));
        match &self.shape {
            Shape::Ball { center, radius } => m(center).max(*radius),
            Shape::Box(b) => m(&b.lo).max(m(&b.hi)),
        }
    }
}

/// Numerical tolerances governing every classification in an instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolerancePolicy<S> {
    /// Half-width of the boundary band for point classification.
    pub class_eps: S,
    /// Parameter-merge tolerance for crossing roots.
    pub t_eps: S,
    /// Minimum separation required between closures and from `∂U`.
    pub sep: S,
}

impl<S: Scalar> Default for TolerancePolicy<S> {
    fn default() -> Self {
        TolerancePolicy {
            class_eps: S::lit(1e-9),
            t_eps: S::lit(1e-10),
            sep: S::lit(1e-6),
        }
    }
}

impl<S: Scalar> TolerancePolicy<S> {
    pub fn validate(&self) -> Result<()> {
        let ok = S::zero() < self.t_eps && self.t_eps < self.class_eps && self.class_eps < self.sep;
        if !ok {
            return Err(Error::Instance(format!(
                "tolerances must satisfy 0 < t_eps < class_eps < sep (got {}, {}, {})",
                self.t_eps, self.class_eps, self.sep
            )));
        }
        Ok(())
    }
}

/// Region `U`, a finite obstacle family and the tolerance policy.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<S> {
    pub dim: usize,
    pub norm: NormSpec<S>,
    pub region: AaBox<S>,
    pub obstacles: Vec<Obstacle<S>>,
    pub tol: TolerancePolicy<S>,
}

impl<S: Scalar> Instance<S> {
    /// Assembles an instance after structural checks. Geometric hypotheses
    /// (separation, clearance) are checked separately by
    /// [`crate::validate::validate_family`].
    pub fn new(
        norm: NormSpec<S>,
        region: AaBox<S>,
        obstacles: Vec<Obstacle<S>>,
        tol: TolerancePolicy<S>,
    ) -> Result<Self> {
        let dim = region.dim();
        if dim < 2 {
            return Err(Error::Instance(format!(
                "dimension {dim} rejected: removing an obstacle from a line disconnects it"
            )));
        }
        norm.validate(dim)?;
        tol.validate()?;
        for (k, ob) in obstacles.iter().enumerate() {
            if ob.id != k {
                return Err(Error::Instance(format!(
                    "obstacle at position {k} has id {}; ids must be 0, 1, 2, ... in order",
                    ob.id
                )));
            }
            if ob.dim() != dim {
                return Err(Error::Instance(format!(
                    "obstacle {k} has dimension {}, region has {dim}",
                    ob.dim()
                )));
            }
            if let Shape::Ball { radius, .. } = &ob.shape {
                if !radius.is_finite() {
                    return Err(Error::Instance(format!("obstacle {k}: non-finite radius")));
                }
            }
        }
        Ok(Instance {
            dim,
            norm,
            region,
            obstacles,
            tol,
        })
    }

    pub fn obstacle(&self, id: usize) -> &Obstacle<S> {
        &self.obstacles[id]
    }

    /// The obstacle whose open set classifies `p` as Interior, if any.
    pub fn containing_obstacle(&self, p: &Point<S>) -> Option<usize> {
        self.obstacles
            .iter()
            .find(|ob| classify_point(p, ob, &self.norm, &self.tol) == Region::Interior)
            .map(|ob| ob.id)
    }

    /// Whether `p` lies in the closed region `Ū` up to `class_eps`.
    pub fn in_region(&self, p: &Point<S>) -> bool {
        self.region.margin(p) <= self.tol.class_eps
    }
}

/// Interior / boundary / exterior classification at tolerance `class_eps`.
pub fn classify_point<S: Scalar>(
    p: &Point<S>,
    ob: &Obstacle<S>,
    norm: &NormSpec<S>,
    tol: &TolerancePolicy<S>,
) -> Region {
    classify_gap(ob.gap(p, norm), tol.class_eps)
}

#[inline]
pub(crate) fn classify_gap<S: Scalar>(g: S, eps: S) -> Region {
    if g < -eps {
        Region::Interior
    } else if g <= eps {
        Region::Boundary
    } else {
        Region::Exterior
    }
}

/// `dist(S̄_a, S̄_b)` under the instance norm; non-positive when closures meet.
pub fn closure_gap<S: Scalar>(a: &Obstacle<S>, b: &Obstacle<S>, norm: &NormSpec<S>) -> S {
    match (&a.shape, &b.shape) {
        (
            Shape::Ball {
                center: c1,
                radius: r1,
            },
            Shape::Ball {
                center: c2,
                radius: r2,
            },
        ) => norm.dist(c1, c2) - *r1 - *r2,
        (Shape::Ball { center, radius }, Shape::Box(bx))
        | (Shape::Box(bx), Shape::Ball { center, radius }) => {
            norm.dist(center, &bx.clamp(center)) - *radius
        }
        (Shape::Box(p), Shape::Box(q)) => {
            let v: Vec<S> = (0..p.dim())
                .map(|k| (p.lo[k] - q.hi[k]).max(q.lo[k] - p.hi[k]).max(S::zero()))
                .collect();
            norm.eval_unchecked(&v)
        }
    }
}

/// `dist(S̄, ∂U)` when `S̄ ⊂ U`; non-positive otherwise.
pub fn region_clearance<S: Scalar>(ob: &Obstacle<S>, region: &AaBox<S>, norm: &NormSpec<S>) -> S {
    match &ob.shape {
        Shape::Ball { center, radius } => region.inner_clearance(center, norm) - *radius,
        Shape::Box(b) => (0..region.dim())
            .map(|k| (b.lo[k] - region.lo[k]).min(region.hi[k] - b.hi[k]) * norm.axis_norm(k))
            .fold(S::infinity(), S::min),
    }
}
