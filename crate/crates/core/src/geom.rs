//! Points, norms, segments and polylines in ℝ^d.

use std::ops::Index;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A point (or free vector) of ℝ^d with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<S> {
    coords: Vec<S>,
}

impl<S: Scalar> Point<S> {
    /// Builds a point, rejecting non-finite coordinates and `d < 2`.
    pub fn new(coords: Vec<S>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::Instance(format!(
                "dimension {} rejected: d >= 2 required",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Instance("non-finite coordinate".into()));
        }
        Ok(Point { coords })
    }

    /// Builds a point without validation. Callers guarantee finiteness.
    pub(crate) fn raw(coords: Vec<S>) -> Self {
        Point { coords }
    }

    pub fn zeros(dim: usize) -> Self {
        Point {
            coords: vec![S::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<S> {
        self.coords
    }

    pub fn sub(&self, other: &Self) -> Self {
        Point::raw(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| a - b)
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        Point::raw(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| a + b)
                .collect(),
        )
    }

    pub fn scale(&self, k: S) -> Self {
        Point::raw(self.coords.iter().map(|&a| a * k).collect())
    }

    /// `self + k * dir`
    pub fn add_scaled(&self, dir: &Self, k: S) -> Self {
        Point::raw(
            self.coords
                .iter()
                .zip(&dir.coords)
                .map(|(&a, &d)| a + k * d)
                .collect(),
        )
    }

    pub fn dot(&self, other: &Self) -> S {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| a * b)
            .sum()
    }

    /// `(1 - t) a + t b`, coordinatewise. Exact at `t = 0` and `t = 1`.
    pub fn lerp(a: &Self, b: &Self, t: S) -> Self {
        let s = S::one() - t;
        Point::raw(
            a.coords
                .iter()
                .zip(&b.coords)
                .map(|(&x, &y)| s * x + t * y)
                .collect(),
        )
    }
}

impl<S> Index<usize> for Point<S> {
    type Output = S;

    fn index(&self, k: usize) -> &S {
        &self.coords[k]
    }
}

/// Which norm ‖·‖ on ℝ^d an instance measures distances with.
#[derive(Debug, Clone, PartialEq)]
pub enum NormSpec<S> {
    /// ℓp with `1 <= p < ∞`.
    P(S),
    /// ℓ∞.
    Max,
    /// `(Σ w_k |v_k|^p)^(1/p)` with strictly positive weights.
    WeightedP { p: S, weights: Vec<S> },
}

impl<S: Scalar> NormSpec<S> {
    pub fn euclidean() -> Self {
        NormSpec::P(S::lit(2.0))
    }

    /// Checks the norm parameters against ambient dimension `dim`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        let check_p = |p: S| {
            if !(p.is_finite() && p >= S::one()) {
                Err(Error::Instance(format!(
                    "norm exponent p = {p} outside [1, inf)"
                )))
            } else {
                Ok(())
            }
        };
        match self {
            NormSpec::P(p) => check_p(*p),
            NormSpec::Max => Ok(()),
            NormSpec::WeightedP { p, weights } => {
                check_p(*p)?;
                if weights.len() != dim {
                    return Err(Error::Instance(format!(
                        "weight vector has length {}, instance dimension is {dim}",
                        weights.len()
                    )));
                }
                if weights.iter().any(|w| !(w.is_finite() && *w > S::zero())) {
                    return Err(Error::Instance(
                        "norm weights must be strictly positive".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Evaluates ‖v‖.
    pub fn eval(&self, v: &[S]) -> Result<S> {
        if let NormSpec::WeightedP { weights, .. } = self {
            if weights.len() != v.len() {
                return Err(Error::Instance(format!(
                    "vector of length {} evaluated under a {}-dimensional weighted norm",
                    v.len(),
                    weights.len()
                )));
            }
        }
        Ok(self.eval_unchecked(v))
    }

    /// Evaluates ‖v‖ assuming the dimension was validated upstream.
    pub fn eval_unchecked(&self, v: &[S]) -> S {
        match self {
            NormSpec::Max => v.iter().fold(S::zero(), |m, x| m.max(x.abs())),
            NormSpec::P(p) => lp(*p, v.iter().map(|x| x.abs())),
            NormSpec::WeightedP { p, weights } => {
                let inv = S::one() / *p;
                lp(
                    *p,
                    v.iter().zip(weights).map(|(x, w)| w.powf(inv) * x.abs()),
                )
            }
        }
    }

    pub fn of(&self, v: &Point<S>) -> S {
        self.eval_unchecked(v.coords())
    }

    pub fn dist(&self, a: &Point<S>, b: &Point<S>) -> S {
        self.eval_unchecked(&a.sub(b).coords)
    }

    /// ‖e_k‖ for the k-th unit coordinate vector.
    ///
    /// For the absolute norms supported here the distance from a point to the
    /// hyperplane `x_k = h` is `|x_k - h| * ‖e_k‖`.
    pub fn axis_norm(&self, k: usize) -> S {
        match self {
            NormSpec::P(_) | NormSpec::Max => S::one(),
            NormSpec::WeightedP { p, weights } => weights[k].powf(S::one() / *p),
        }
    }

    /// True for norms whose unit sphere contains no segment (1 < p < ∞).
    pub fn is_strictly_convex(&self) -> bool {
        match self {
            NormSpec::P(p) | NormSpec::WeightedP { p, .. } => *p > S::one(),
            NormSpec::Max => false,
        }
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self, NormSpec::P(p) if *p == S::lit(2.0))
    }
}

// Scaled by the largest component so large exponents neither overflow nor underflow.
fn lp<S: Scalar>(p: S, abs: impl Iterator<Item = S> + Clone) -> S {
    let m = abs.clone().fold(S::zero(), |m, x| m.max(x));
    if m == S::zero() {
        return S::zero();
    }
    if p == S::one() {
        return abs.sum();
    }
    if p == S::lit(2.0) {
        let s: S = abs.map(|x| (x / m) * (x / m)).sum();
        return m * s.sqrt();
    }
    let s: S = abs.map(|x| (x / m).powf(p)).sum();
    m * s.powf(S::one() / p)
}

/// Free-function form of [`NormSpec::eval`].
pub fn norm_eval<S: Scalar>(v: &[S], n: &NormSpec<S>) -> Result<S> {
    n.eval(v)
}

/// The closed segment `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment<S> {
    pub a: Point<S>,
    pub b: Point<S>,
}

impl<S: Scalar> Segment<S> {
    pub fn new(a: Point<S>, b: Point<S>) -> Self {
        Segment { a, b }
    }

    /// `(1 - t) a + t b` with no range check; used by root finders.
    #[inline]
    pub fn at(&self, t: S) -> Point<S> {
        Point::lerp(&self.a, &self.b, t)
    }

    pub fn direction(&self) -> Point<S> {
        self.b.sub(&self.a)
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    pub fn length(&self, norm: &NormSpec<S>) -> S {
        norm.dist(&self.b, &self.a)
    }
}

/// Evaluates the segment at `t ∈ [0, 1]`.
pub fn segment_point<S: Scalar>(s: &Segment<S>, t: S) -> Result<Point<S>> {
    if !(t >= S::zero() && t <= S::one()) {
        return Err(Error::Parameter(format!(
            "segment parameter {t} outside [0, 1]"
        )));
    }
    Ok(s.at(t))
}

/// A polygonal line through an ordered list of vertices.
///
/// A single vertex is allowed and stands for the degenerate path from a point
/// to itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline<S> {
    vertices: Vec<Point<S>>,
}

impl<S: Scalar> Polyline<S> {
    pub fn new(vertices: Vec<Point<S>>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::Input("polyline needs at least one vertex".into()));
        };
        let d = first.dim();
        if vertices.iter().any(|v| v.dim() != d) {
            return Err(Error::Instance(
                "polyline vertices of mixed dimension".into(),
            ));
        }
        Ok(Polyline { vertices })
    }

    pub fn point(p: Point<S>) -> Self {
        Polyline { vertices: vec![p] }
    }

    pub fn vertices(&self) -> &[Point<S>] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Point<S>> {
        self.vertices
    }

    pub fn first(&self) -> &Point<S> {
        &self.vertices[0]
    }

    pub fn last(&self) -> &Point<S> {
        &self.vertices[self.vertices.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn edge(&self, j: usize) -> Segment<S> {
        Segment::new(self.vertices[j].clone(), self.vertices[j + 1].clone())
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment<S>> + '_ {
        self.vertices
            .windows(2)
            .map(|w| Segment::new(w[0].clone(), w[1].clone()))
    }

    /// Drops consecutive duplicate vertices. First and last vertex survive
    /// unchanged.
    pub fn normalized(&self) -> Self {
        self.normalized_with_map().0
    }

    /// Like [`Polyline::normalized`], also returning for each surviving edge
    /// the index of the original edge it came from.
    pub fn normalized_with_map(&self) -> (Self, Vec<usize>) {
        let mut out = vec![self.vertices[0].clone()];
        let mut map = Vec::new();
        for (j, v) in self.vertices.iter().enumerate().skip(1) {
            if v != out.last().unwrap() {
                out.push(v.clone());
                map.push(j - 1);
            }
        }
        (Polyline { vertices: out }, map)
    }

    pub fn length(&self, norm: &NormSpec<S>) -> S {
        self.edges().map(|e| e.length(norm)).sum()
    }
}

/// Samples `p` at consecutive norm-distance at most `step`, keeping every vertex.
pub fn polyline_sample<S: Scalar>(p: &Polyline<S>, step: S, norm: &NormSpec<S>) -> Vec<Point<S>> {
    let mut out = Vec::new();
    for e in p.edges() {
        let n = segment_subdivisions(e.length(norm), step);
        let inv = S::one() / S::from_usize(n).unwrap();
        for i in 0..n {
            out.push(e.at(S::from_usize(i).unwrap() * inv));
        }
    }
    out.push(p.last().clone());
    out
}

/// Number of equal pieces needed so each has length at most `step`.
pub(crate) fn segment_subdivisions<S: Scalar>(len: S, step: S) -> usize {
    let k = (len / step).ceil();
    k.to_usize().unwrap_or(1).max(1)
}

/// Position of a point relative to a set at a fixed tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Interior,
    Boundary,
    Exterior,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> Point<f64> {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn norm_examples() {
        let v = [3.0, -4.0];
        assert_eq!(norm_eval(&[3.0, 4.0], &NormSpec::P(2.0)).unwrap(), 5.0);
        assert_eq!(norm_eval(&v, &NormSpec::Max).unwrap(), 4.0);
        assert_eq!(norm_eval(&v, &NormSpec::P(1.0)).unwrap(), 7.0);
        assert_eq!(norm_eval(&[0.0, 0.0], &NormSpec::P(3.0)).unwrap(), 0.0);
    }

    #[test]
    fn weighted_norm_dimension_mismatch() {
        let n = NormSpec::WeightedP {
            p: 2.0,
            weights: vec![1.0, 4.0],
        };
        assert_eq!(n.eval(&[1.0, 1.0]).unwrap(), 5f64.sqrt());
        assert!(matches!(n.eval(&[1.0, 1.0, 1.0]), Err(Error::Instance(_))));
        assert!(n.validate(3).is_err());
        assert!(NormSpec::WeightedP {
            p: 2.0,
            weights: vec![1.0, 0.0]
        }
        .validate(2)
        .is_err());
        assert_eq!(n.axis_norm(1), 2.0);
    }

    #[test]
    fn dimension_one_rejected() {
        assert!(Point::new(vec![1.0f64]).is_err());
        assert!(Point::new(vec![f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn segment_point_examples() {
        let s = Segment::new(pt(&[0.0, 0.0]), pt(&[2.0, 0.0]));
        assert_eq!(segment_point(&s, 0.5).unwrap(), pt(&[1.0, 0.0]));
        let s = Segment::new(pt(&[-2.0, 0.0]), pt(&[2.0, 0.0]));
        assert_eq!(segment_point(&s, 0.0).unwrap(), pt(&[-2.0, 0.0]));
        assert_eq!(segment_point(&s, 1.0).unwrap(), pt(&[2.0, 0.0]));
        let s = Segment::new(pt(&[-3.0, 0.0]), pt(&[3.0, 0.0]));
        let z = segment_point(&s, 1.0 / 6.0).unwrap();
        assert!((z[0] + 2.0).abs() < 1e-15 && z[1] == 0.0);
        assert!(matches!(segment_point(&s, 1.5), Err(Error::Parameter(_))));
        assert!(segment_point(&s, f64::NAN).is_err());
    }

    #[test]
    fn sampling_examples() {
        let n = NormSpec::euclidean();
        let p = Polyline::new(vec![pt(&[0.0, 0.0]), pt(&[1.0, 0.0])]).unwrap();
        let s = polyline_sample(&p, 0.5, &n);
        assert!(s.len() >= 3);
        assert_eq!(s.first().unwrap(), p.first());
        assert_eq!(s.last().unwrap(), p.last());

        let s = polyline_sample(&p, 0.3, &n);
        for w in s.windows(2) {
            assert!(n.dist(&w[0], &w[1]) <= 0.3);
        }

        let q = Polyline::new(vec![pt(&[0.0, 0.0]), pt(&[1.0, 0.0]), pt(&[1.0, 1.0])]).unwrap();
        let s = polyline_sample(&q, 10.0, &n);
        for v in q.vertices() {
            assert!(s.contains(v));
        }
    }

    #[test]
    fn normalization_drops_repeats() {
        let p = Polyline::new(vec![
            pt(&[0.0, 0.0]),
            pt(&[0.0, 0.0]),
            pt(&[1.0, 0.0]),
            pt(&[1.0, 0.0]),
        ])
        .unwrap();
        let (q, map) = p.normalized_with_map();
        assert_eq!(q.len(), 2);
        assert_eq!(map, vec![1]);
        assert_eq!(q.normalized(), q);
    }
}
