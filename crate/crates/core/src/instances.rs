//! Instance and route files, and seeded instance generation.
//!
//! Files are pretty-printed JSON with numbers in shortest round-trip form.
//! Unknown fields are rejected.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{NormSpec, Point, Polyline};
use crate::obstacle::{
    closure_gap, region_clearance, AaBox, Instance, Obstacle, Shape, TolerancePolicy,
};
use crate::reroute::{CaseTag, Piece, PieceTag, RouteResult};
use crate::verify::VerifyReport;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum NormDto {
    #[serde(rename = "p")]
    P { p: f64 },
    #[serde(rename = "max")]
    Max,
    #[serde(rename = "weighted_p")]
    WeightedP { p: f64, weights: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionDto {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", deny_unknown_fields)]
pub enum ObstacleDto {
    #[serde(rename = "ball")]
    Ball {
        id: usize,
        center: Vec<f64>,
        radius: f64,
    },
    #[serde(rename = "box")]
    Box {
        id: usize,
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesDto {
    pub class_eps: f64,
    pub t_eps: f64,
    pub sep: f64,
}

impl Default for TolerancesDto {
    fn default() -> Self {
        TolerancePolicy::default().into()
    }
}

impl From<TolerancePolicy<f64>> for TolerancesDto {
    fn from(t: TolerancePolicy<f64>) -> Self {
        TolerancesDto {
            class_eps: t.class_eps,
            t_eps: t.t_eps,
            sep: t.sep,
        }
    }
}

impl From<TolerancesDto> for TolerancePolicy<f64> {
    fn from(t: TolerancesDto) -> Self {
        TolerancePolicy {
            class_eps: t.class_eps,
            t_eps: t.t_eps,
            sep: t.sep,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryDto {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polyline: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    pub dim: usize,
    pub norm: NormDto,
    pub region: RegionDto,
    pub obstacles: Vec<ObstacleDto>,
    #[serde(default)]
    pub tolerances: TolerancesDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query: Option<QueryDto>,
}

/// A route request: endpoints and the polyline joining them.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub x: Point<f64>,
    pub y: Point<f64>,
    pub polyline: Polyline<f64>,
}

fn point(v: &[f64], what: &str) -> Result<Point<f64>> {
    Point::new(v.to_vec()).map_err(|e| Error::Instance(format!("{what}: {e}")))
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

impl InstanceFile {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let f: InstanceFile = serde_json::from_slice(bytes).map_err(parse_err)?;
        if f.version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported instance format version {} (expected {FORMAT_VERSION})",
                f.version
            )));
        }
        Ok(f)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = serde_json::to_vec_pretty(self).expect("instance files serialize");
        v.push(b'\n');
        v
    }

    pub fn instance(&self) -> Result<Instance<f64>> {
        if self.dim < 2 {
            return Err(Error::Instance(format!(
                "dimension {} rejected: d >= 2 required",
                self.dim
            )));
        }
        let norm = match &self.norm {
            NormDto::P { p } => NormSpec::P(*p),
            NormDto::Max => NormSpec::Max,
            NormDto::WeightedP { p, weights } => NormSpec::WeightedP {
                p: *p,
                weights: weights.clone(),
            },
        };
        let region = AaBox::new(
            point(&self.region.lo, "region")?,
            point(&self.region.hi, "region")?,
        )?;
        if region.dim() != self.dim {
            return Err(Error::Instance(format!(
                "region has dimension {}, file declares {}",
                region.dim(),
                self.dim
            )));
        }
        let obstacles = self
            .obstacles
            .iter()
            .map(|o| match o {
                ObstacleDto::Ball { id, center, radius } => Ok(Obstacle::ball(
                    *id,
                    point(center, &format!("obstacle {id}"))?,
                    *radius,
                )),
                ObstacleDto::Box { id, lo, hi } => Obstacle::open_box(
                    *id,
                    point(lo, &format!("obstacle {id}"))?,
                    point(hi, &format!("obstacle {id}"))?,
                ),
            })
            .collect::<Result<Vec<_>>>()?;
        Instance::new(norm, region, obstacles, self.tolerances.into())
    }

    pub fn query(&self) -> Result<Option<Query>> {
        let Some(q) = &self.query else {
            return Ok(None);
        };
        let x = point(&q.x, "query x")?;
        let y = point(&q.y, "query y")?;
        let polyline = match &q.polyline {
            Some(v) => Polyline::new(
                v.iter()
                    .map(|c| point(c, "query polyline"))
                    .collect::<Result<_>>()?,
            )?,
            None => Polyline::new(vec![x.clone(), y.clone()])?,
        };
        Ok(Some(Query { x, y, polyline }))
    }

    pub fn from_instance(inst: &Instance<f64>, query: Option<&Query>) -> Self {
        let norm = match &inst.norm {
            NormSpec::P(p) => NormDto::P { p: *p },
            NormSpec::Max => NormDto::Max,
            NormSpec::WeightedP { p, weights } => NormDto::WeightedP {
                p: *p,
                weights: weights.clone(),
            },
        };
        let obstacles = inst
            .obstacles
            .iter()
            .map(|o| match &o.shape {
                Shape::Ball { center, radius } => ObstacleDto::Ball {
                    id: o.id,
                    center: center.coords().to_vec(),
                    radius: *radius,
                },
                Shape::Box(b) => ObstacleDto::Box {
                    id: o.id,
                    lo: b.lo.coords().to_vec(),
                    hi: b.hi.coords().to_vec(),
                },
            })
            .collect();
        InstanceFile {
            version: FORMAT_VERSION,
            dim: inst.dim,
            norm,
            region: RegionDto {
                lo: inst.region.lo.coords().to_vec(),
                hi: inst.region.hi.coords().to_vec(),
            },
            obstacles,
            tolerances: inst.tol.into(),
            query: query.map(|q| QueryDto {
                x: q.x.coords().to_vec(),
                y: q.y.coords().to_vec(),
                polyline: Some(
                    q.polyline
                        .vertices()
                        .iter()
                        .map(|v| v.coords().to_vec())
                        .collect(),
                ),
            }),
        }
    }
}

/// Parses an instance file into an [`Instance`].
pub fn load(bytes: &[u8]) -> Result<Instance<f64>> {
    InstanceFile::parse(bytes)?.instance()
}

/// Canonical serialization of an instance without a query.
pub fn save(inst: &Instance<f64>) -> Vec<u8> {
    InstanceFile::from_instance(inst, None).to_bytes()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case", deny_unknown_fields)]
pub enum PieceDto {
    OriginalEdge {
        edge: usize,
        start: usize,
        end: usize,
    },
    BridgeSegment {
        edge: usize,
        v: usize,
        start: usize,
        end: usize,
    },
    CollarArc {
        obstacle: usize,
        edge: usize,
        v: usize,
        start: usize,
        end: usize,
    },
}

impl From<&Piece> for PieceDto {
    fn from(p: &Piece) -> Self {
        let (start, end) = (p.start, p.end);
        match p.tag {
            PieceTag::OriginalEdge { edge } => PieceDto::OriginalEdge { edge, start, end },
            PieceTag::BridgeSegment { edge, v } => PieceDto::BridgeSegment {
                edge,
                v,
                start,
                end,
            },
            PieceTag::CollarArc { obstacle, edge, v } => PieceDto::CollarArc {
                obstacle,
                edge,
                v,
                start,
                end,
            },
        }
    }
}

impl From<&PieceDto> for Piece {
    fn from(p: &PieceDto) -> Self {
        match *p {
            PieceDto::OriginalEdge { edge, start, end } => Piece {
                tag: PieceTag::OriginalEdge { edge },
                start,
                end,
            },
            PieceDto::BridgeSegment {
                edge,
                v,
                start,
                end,
            } => Piece {
                tag: PieceTag::BridgeSegment { edge, v },
                start,
                end,
            },
            PieceDto::CollarArc {
                obstacle,
                edge,
                v,
                start,
                end,
            } => Piece {
                tag: PieceTag::CollarArc { obstacle, edge, v },
                start,
                end,
            },
        }
    }
}

fn case_name(c: CaseTag) -> &'static str {
    match c {
        CaseTag::Untouched => "untouched",
        CaseTag::BridgeBothOut => "bridge_both_out",
        CaseTag::BridgeInOut => "bridge_in_out",
        CaseTag::BridgeOutIn => "bridge_out_in",
        CaseTag::BridgeBothIn => "bridge_both_in",
        CaseTag::Gamma1 => "gamma1",
        CaseTag::Gamma2 => "gamma2",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeCaseDto {
    pub edge: usize,
    pub endpoints: String,
    pub continuation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsDto {
    pub original_edges: usize,
    pub bridge_segments: usize,
    pub collar_arcs: usize,
    pub antipodal_arcs: usize,
    pub vertices: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyDto {
    pub pass: bool,
    pub step: f64,
    pub samples_checked: usize,
    /// `null` for an obstacle-free instance.
    pub min_margin: Option<f64>,
    pub violations: usize,
}

impl VerifyDto {
    pub fn new(r: &VerifyReport<f64>, step: f64) -> Self {
        VerifyDto {
            pass: r.pass,
            step,
            samples_checked: r.samples_checked,
            min_margin: r.min_margin.is_finite().then_some(r.min_margin),
            violations: r.violations.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteFile {
    pub version: u32,
    pub untouched: bool,
    pub path: Vec<Vec<f64>>,
    pub pieces: Vec<PieceDto>,
    pub cases: Vec<EdgeCaseDto>,
    pub stats: StatsDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyDto>,
}

impl RouteFile {
    pub fn new(r: &RouteResult<f64>, verify: Option<VerifyDto>) -> Self {
        RouteFile {
            version: FORMAT_VERSION,
            untouched: r.is_untouched(),
            path: r
                .path
                .vertices()
                .iter()
                .map(|v| v.coords().to_vec())
                .collect(),
            pieces: r.pieces.iter().map(PieceDto::from).collect(),
            cases: r
                .cases
                .iter()
                .map(|c| EdgeCaseDto {
                    edge: c.edge,
                    endpoints: case_name(c.endpoints).into(),
                    continuation: case_name(c.continuation).into(),
                })
                .collect(),
            stats: StatsDto {
                original_edges: r.stats.original_edges,
                bridge_segments: r.stats.bridge_segments,
                collar_arcs: r.stats.collar_arcs,
                antipodal_arcs: r.stats.antipodal_arcs,
                vertices: r.path.len(),
                length: r.stats.length,
            },
            verify,
        }
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let f: RouteFile = serde_json::from_slice(bytes).map_err(parse_err)?;
        if f.version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported route format version {}",
                f.version
            )));
        }
        Ok(f)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = serde_json::to_vec_pretty(self).expect("route files serialize");
        v.push(b'\n');
        v
    }

    pub fn polyline(&self) -> Result<Polyline<f64>> {
        Polyline::new(
            self.path
                .iter()
                .map(|c| point(c, "route"))
                .collect::<Result<_>>()?,
        )
    }

    pub fn pieces(&self) -> Vec<Piece> {
        self.pieces.iter().map(Piece::from).collect()
    }
}

/// Parameters of [`generate`]. Obstacles are balls under `norm` in the cube
/// `[region.0, region.1]^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub dim: usize,
    pub count: usize,
    pub norm: NormSpec<f64>,
    pub radius: (f64, f64),
    pub region: (f64, f64),
    /// Minimum closure gap and boundary clearance; raised to at least
    /// `4·sep`.
    pub min_gap: f64,
    pub tol: TolerancePolicy<f64>,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            dim: 2,
            count: 5,
            norm: NormSpec::euclidean(),
            radius: (0.3, 1.0),
            region: (-10.0, 10.0),
            min_gap: 0.0,
            tol: TolerancePolicy::default(),
        }
    }
}

const MAX_REJECTIONS: usize = 10_000;
const MAX_DENSITY: f64 = 0.3;

/// Volume of the unit ball of `norm` in `ℝ^d`.
pub fn unit_ball_volume(norm: &NormSpec<f64>, d: usize) -> f64 {
    let df = d as f64;
    match norm {
        NormSpec::Max => 2f64.powf(df),
        NormSpec::P(p) => (2.0 * libm::tgamma(1.0 + 1.0 / p)).powf(df) / libm::tgamma(1.0 + df / p),
        NormSpec::WeightedP { p, weights } => {
            let scale: f64 = weights.iter().map(|w| w.powf(1.0 / p)).product();
            (2.0 * libm::tgamma(1.0 + 1.0 / p)).powf(df) / libm::tgamma(1.0 + df / p) / scale
        }
    }
}

/// Rejection-samples a separated ball family. Deterministic in `seed`.
pub fn generate(seed: u64, params: &GenParams) -> Result<Instance<f64>> {
    let GenParams {
        dim,
        count,
        ref norm,
        radius: (rmin, rmax),
        region: (lo, hi),
        min_gap,
        tol,
    } = *params;
    if dim < 2 {
        return Err(Error::Generation(format!("dimension {dim} < 2")));
    }
    if !(0.0 < rmin && rmin <= rmax && lo < hi) {
        return Err(Error::Generation("radius range or region is empty".into()));
    }
    norm.validate(dim)?;
    let density = count as f64 * unit_ball_volume(norm, dim) * rmax.powi(dim as i32)
        / (hi - lo).powi(dim as i32);
    if density >= MAX_DENSITY {
        return Err(Error::Generation(format!(
            "requested density {density:.3} exceeds {MAX_DENSITY}"
        )));
    }
    let region = AaBox::new(Point::new(vec![lo; dim])?, Point::new(vec![hi; dim])?)?;
    let gap = min_gap.max(4.0 * tol.sep);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut obstacles: Vec<Obstacle<f64>> = Vec::with_capacity(count);
    let mut rejections = 0;
    while obstacles.len() < count {
        let r = if rmin == rmax {
            rmin
        } else {
            rng.gen_range(rmin..rmax)
        };
        let c: Vec<f64> = (0..dim).map(|_| rng.gen_range(lo..hi)).collect();
        let cand = Obstacle::ball(obstacles.len(), Point::raw(c), r);
        let ok = region_clearance(&cand, &region, norm) >= gap
            && obstacles.iter().all(|o| closure_gap(o, &cand, norm) >= gap);
        if ok {
            obstacles.push(cand);
        } else {
            rejections += 1;
            if rejections > MAX_REJECTIONS {
                return Err(Error::Generation(format!(
                    "gave up after {MAX_REJECTIONS} rejections with {} of {count} obstacles placed",
                    obstacles.len()
                )));
            }
        }
    }
    Instance::new(norm.clone(), region, obstacles, tol)
}

/// A random query polyline with `vertices` vertices: endpoints at gap at
/// least `margin` from every closure and from `∂U`, interior vertices
/// uniform in `U`.
pub fn generate_query(
    seed: u64,
    inst: &Instance<f64>,
    vertices: usize,
    margin: f64,
) -> Result<Query> {
    if vertices < 2 {
        return Err(Error::Generation(
            "a query polyline needs at least 2 vertices".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = inst.dim;
    let uniform = |rng: &mut ChaCha8Rng| -> Point<f64> {
        Point::raw(
            (0..d)
                .map(|k| rng.gen_range(inst.region.lo[k]..inst.region.hi[k]))
                .collect(),
        )
    };
    let endpoint = |rng: &mut ChaCha8Rng| -> Result<Point<f64>> {
        for _ in 0..MAX_REJECTIONS {
            let p = uniform(rng);
            let clear = inst.region.inner_clearance(&p, &inst.norm) > margin
                && inst
                    .obstacles
                    .iter()
                    .all(|o| o.gap(&p, &inst.norm) > margin);
            if clear {
                return Ok(p);
            }
        }
        Err(Error::Generation("no free endpoint found".into()))
    };
    let x = endpoint(&mut rng)?;
    let mut v = vec![x.clone()];
    for _ in 2..vertices {
        v.push(uniform(&mut rng));
    }
    let y = endpoint(&mut rng)?;
    v.push(y.clone());
    Ok(Query {
        x,
        y,
        polyline: Polyline::new(v)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::validate_family;

    #[test]
    fn ball_volumes() {
        let e = unit_ball_volume(&NormSpec::euclidean(), 2);
        assert!((e - std::f64::consts::PI).abs() < 1e-12);
        assert!((unit_ball_volume(&NormSpec::P(1.0), 2) - 2.0).abs() < 1e-12);
        assert_eq!(unit_ball_volume(&NormSpec::Max, 3), 8.0);
        let w = NormSpec::WeightedP {
            p: 2.0,
            weights: vec![4.0, 1.0],
        };
        assert!((unit_ball_volume(&w, 2) - std::f64::consts::PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn generated_family_validates() {
        let p = GenParams::default();
        let inst = generate(1, &p).unwrap();
        assert_eq!(inst.obstacles.len(), 5);
        assert!(validate_family(&inst).pass);
        assert_eq!(generate(1, &p).unwrap(), inst);
        let empty = generate(
            1,
            &GenParams {
                count: 0,
                ..p.clone()
            },
        )
        .unwrap();
        assert!(empty.obstacles.is_empty());
    }

    #[test]
    fn dense_request_fails() {
        let p = GenParams {
            count: 500,
            ..GenParams::default()
        };
        assert!(matches!(generate(1, &p), Err(Error::Generation(_))));
    }

    #[test]
    fn round_trip() {
        let inst = generate(7, &GenParams::default()).unwrap();
        let bytes = save(&inst);
        assert_eq!(load(&bytes).unwrap(), inst);
        assert_eq!(save(&load(&bytes).unwrap()), bytes);
    }

    #[test]
    fn unknown_field_rejected_with_position() {
        let text = br#"{"version": 1, "dim": 2, "extra": 3}"#;
        match load(text) {
            Err(Error::Parse(m)) => assert!(m.contains("extra") && m.contains("line"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dimension_one_rejected() {
        let text = br#"{"version": 1, "dim": 1, "norm": {"kind": "p", "p": 2.0},
            "region": {"lo": [-1.0], "hi": [1.0]}, "obstacles": []}"#;
        assert!(matches!(load(text), Err(Error::Instance(_))));
    }

    #[test]
    fn query_generation() {
        let inst = generate(3, &GenParams::default()).unwrap();
        let q = generate_query(3, &inst, 6, 0.01).unwrap();
        assert_eq!(q.polyline.len(), 6);
        assert_eq!(q.polyline.first(), &q.x);
        assert_eq!(q.polyline.last(), &q.y);
    }
}
