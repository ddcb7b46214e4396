//! Assembles an obstacle-free polyline from original edges, bridge segments
//! and collar detours.
//!
//! The engine walks the input edges in order. An edge that never enters an
//! obstacle is copied. An edge of `J` is replaced by its bridge: straight
//! pieces between the entry/exit points of its schedule and a collar detour
//! around each visited obstacle. When such an edge ends inside an obstacle
//! `S*`, the walk jumps to the last later edge that meets `∂S*`, joining the
//! two through the collar of `S*`, and resumes in the middle of that edge.

use crate::collar::{collar_route, collar_widths, Collar};
use crate::crossing::{boundary_crossings, check_um};
use crate::error::{Error, Result};
use crate::geom::{Point, Polyline, Segment};
use crate::obstacle::Instance;
use crate::scalar::Scalar;
use crate::schedule::{check_clear, compute_edge_schedule, compute_j, EdgeSchedule, Event};
use crate::validate::validate_family;

/// What a run of output vertices was built from. Edge indices refer to the
/// input polyline; `v` counts events from 1, with `v = 0` for a lead-in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PieceTag {
    /// An input edge copied verbatim.
    OriginalEdge { edge: usize },
    /// A straight bridge piece on input edge `edge`, leaving event `v`.
    BridgeSegment { edge: usize, v: usize },
    /// A detour in the collar of `obstacle` for event `v` of input edge
    /// `edge`. `v = v₀ + 1` marks the jump out of an obstacle containing
    /// the edge's end vertex.
    CollarArc {
        obstacle: usize,
        edge: usize,
        v: usize,
    },
}

/// A run of output vertices `path[start..=end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Piece {
    pub tag: PieceTag,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    Untouched,
    /// Edge starts and ends outside every obstacle.
    BridgeBothOut,
    /// Edge starts inside an obstacle (or resumes on its boundary) and ends outside.
    BridgeInOut,
    /// Edge starts outside and ends inside an obstacle.
    BridgeOutIn,
    BridgeBothIn,
    /// The walk continues with the next edge.
    Gamma1,
    /// The end vertex is inside an obstacle; the walk jumps ahead.
    Gamma2,
}

/// How one rerouted edge was handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeCase {
    pub edge: usize,
    pub endpoints: CaseTag,
    pub continuation: CaseTag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteStats<S> {
    pub original_edges: usize,
    pub bridge_segments: usize,
    pub collar_arcs: usize,
    pub antipodal_arcs: usize,
    pub length: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteResult<S> {
    pub path: Polyline<S>,
    pub pieces: Vec<Piece>,
    pub cases: Vec<EdgeCase>,
    pub stats: RouteStats<S>,
}

impl<S: Scalar> RouteResult<S> {
    /// True when the input never met an obstacle and was returned as is.
    pub fn is_untouched(&self) -> bool {
        self.cases.is_empty()
    }
}

/// A tagged polyline contributed to the output.
#[derive(Debug, Clone, PartialEq)]
pub struct Span<S> {
    pub tag: PieceTag,
    pub path: Polyline<S>,
    pub antipodal: bool,
}

impl<S: Scalar> Span<S> {
    fn segment(tag: PieceTag, a: Point<S>, b: Point<S>) -> Self {
        Span {
            tag,
            path: Polyline::new(vec![a, b]).expect("two points of equal dimension"),
            antipodal: false,
        }
    }
}

/// Where the walk re-enters an edge after a jump: parameter `t` and the
/// exact point the preceding detour ended at.
#[derive(Debug, Clone, PartialEq)]
pub struct Resume<S> {
    pub edge: usize,
    pub t: S,
    pub point: Point<S>,
}

/// The bridge replacing one edge of `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bridge<S> {
    pub spans: Vec<Span<S>>,
    pub endpoints: CaseTag,
    /// Obstacle containing the edge's end vertex, if any.
    pub lands_in: Option<usize>,
    /// Exit point of the last event.
    pub last_exit: Option<Point<S>>,
}

fn collar_span<S: Scalar>(
    p: &Point<S>,
    q: &Point<S>,
    col: &Collar<S>,
    inst: &Instance<S>,
    tag: PieceTag,
) -> Result<Span<S>> {
    let r = collar_route(p, q, col, inst)?;
    Ok(Span {
        tag,
        path: r.path,
        antipodal: r.antipodal,
    })
}

/// Builds the bridge for input edge `edge` with schedule `sched`.
///
/// With `entry`, the walk arrives mid-edge at `entry.point`: events ending
/// before it are dropped and no lead-in is emitted.
pub fn build_bridge<S: Scalar>(
    edge: usize,
    sched: &EdgeSchedule<S>,
    inst: &Instance<S>,
    collars: &[Collar<S>],
    entry: Option<&Resume<S>>,
) -> Result<Bridge<S>> {
    let seg = &sched.edge;
    let lands_in = inst.containing_obstacle(&seg.b);
    let starts_in = entry.is_some() || inst.containing_obstacle(&seg.a).is_some();
    if entry.is_none() && starts_in {
        return Err(Error::Engine(format!(
            "edge {edge} starts inside an obstacle without a preceding detour"
        )));
    }
    let endpoints = match (starts_in, lands_in.is_some()) {
        (false, false) => CaseTag::BridgeBothOut,
        (true, false) => CaseTag::BridgeInOut,
        (false, true) => CaseTag::BridgeOutIn,
        (true, true) => CaseTag::BridgeBothIn,
    };

    // (1-based event number, event, entry point)
    let mut events: Vec<(usize, Event<S>, Point<S>)> = Vec::new();
    for (v, ev) in sched.events.iter().enumerate() {
        match entry {
            Some(r) if ev.t_exit < r.t => continue,
            Some(r) if events.is_empty() => {
                let mut ev = *ev;
                ev.t_enter = ev.t_enter.max(r.t);
                events.push((v + 1, ev, r.point.clone()));
            }
            _ => events.push((v + 1, *ev, sched.z_enter(v))),
        }
    }

    let mut spans = Vec::new();
    let mut cursor = match entry {
        Some(r) => r.point.clone(),
        None => seg.a.clone(),
    };
    let mut last_v = 0;
    let mut last_exit = None;
    for (v, ev, z_in) in &events {
        if cursor != *z_in {
            spans.push(Span::segment(
                PieceTag::BridgeSegment { edge, v: last_v },
                cursor.clone(),
                z_in.clone(),
            ));
        }
        let z_out = if ev.t_enter == ev.t_exit {
            z_in.clone()
        } else {
            seg.at(ev.t_exit)
        };
        spans.push(collar_span(
            z_in,
            &z_out,
            &collars[ev.obstacle],
            inst,
            PieceTag::CollarArc {
                obstacle: ev.obstacle,
                edge,
                v: *v,
            },
        )?);
        cursor = z_out;
        last_v = *v;
        last_exit = Some(cursor.clone());
    }
    if lands_in.is_none() && cursor != seg.b {
        spans.push(Span::segment(
            PieceTag::BridgeSegment { edge, v: last_v },
            cursor,
            seg.b.clone(),
        ));
    }
    for s in &spans {
        if let PieceTag::BridgeSegment { .. } = s.tag {
            check_clear(
                &Segment::new(s.path.first().clone(), s.path.last().clone()),
                inst,
            )?;
        }
    }
    Ok(Bridge {
        spans,
        endpoints,
        lands_in,
        last_exit,
    })
}

/// The jump out of obstacle `S*` containing the end vertex of edge `edge`.
///
/// Finds the last later edge meeting `∂S*`, its first crossing `z*`, and
/// returns the collar detour from the last exit point on `edge` to `z*`
/// together with the place the walk resumes.
pub fn build_gamma2<S: Scalar>(
    edge: usize,
    sched: &EdgeSchedule<S>,
    inst: &Instance<S>,
    collars: &[Collar<S>],
    polyline: &Polyline<S>,
    tag_edge: usize,
) -> Result<(Vec<Span<S>>, Resume<S>)> {
    let seg = &sched.edge;
    let star = inst
        .containing_obstacle(&seg.b)
        .ok_or_else(|| Error::Engine(format!("edge {edge} does not end inside an obstacle")))?;
    let last = sched.events.last().expect("schedules are nonempty");
    if last.obstacle != star {
        return Err(Error::Engine(format!(
            "edge {edge} ends inside obstacle {star} but its last event is obstacle {}",
            last.obstacle
        )));
    }
    let ob = inst.obstacle(star);
    let mut found = None;
    for l in (edge + 1..polyline.edge_count()).rev() {
        let e = polyline.edge(l);
        let c = boundary_crossings(&e, ob, &inst.norm, &inst.tol).map_err(|err| err.on_edge(l))?;
        if let Some(&t) = c.first() {
            found = Some((l, t, e.at(t)));
            break;
        }
    }
    let Some((l, t, z)) = found else {
        return Err(Error::Engine(format!(
            "no edge after {edge} leaves obstacle {star}; the end point cannot lie outside it"
        )));
    };
    let from = sched.z_exit(sched.v0() - 1);
    let span = collar_span(
        &from,
        &z,
        &collars[star],
        inst,
        PieceTag::CollarArc {
            obstacle: star,
            edge: tag_edge,
            v: sched.v0() + 1,
        },
    )?;
    Ok((
        vec![span],
        Resume {
            edge: l,
            t,
            point: z,
        },
    ))
}

struct Builder<S> {
    vertices: Vec<Point<S>>,
    pieces: Vec<Piece>,
    antipodal: usize,
}

impl<S: Scalar> Builder<S> {
    fn push(&mut self, span: Span<S>) -> Result<()> {
        let v = span.path.into_vertices();
        if v.len() < 2 {
            return Ok(());
        }
        if v[0] != *self.vertices.last().unwrap() {
            return Err(Error::Engine(format!(
                "{:?} does not start where the path ends",
                span.tag
            )));
        }
        let start = self.vertices.len() - 1;
        self.vertices.extend(v.into_iter().skip(1));
        self.pieces.push(Piece {
            tag: span.tag,
            start,
            end: self.vertices.len() - 1,
        });
        if span.antipodal {
            self.antipodal += 1;
        }
        Ok(())
    }
}

fn stats<S: Scalar>(
    path: &Polyline<S>,
    pieces: &[Piece],
    antipodal: usize,
    inst: &Instance<S>,
) -> RouteStats<S> {
    let count = |f: fn(&PieceTag) -> bool| pieces.iter().filter(|p| f(&p.tag)).count();
    RouteStats {
        original_edges: count(|t| matches!(t, PieceTag::OriginalEdge { .. })),
        bridge_segments: count(|t| matches!(t, PieceTag::BridgeSegment { .. })),
        collar_arcs: count(|t| matches!(t, PieceTag::CollarArc { .. })),
        antipodal_arcs: antipodal,
        length: path.length(&inst.norm),
    }
}

/// Checks the route query: endpoints of `p`, clear of every closure, in `U`.
pub fn check_query<S: Scalar>(
    x: &Point<S>,
    y: &Point<S>,
    p: &Polyline<S>,
    inst: &Instance<S>,
) -> Result<()> {
    if p.first() != x || p.last() != y {
        return Err(Error::Input(
            "the polyline must start at x and end at y".into(),
        ));
    }
    if x.dim() != inst.dim {
        return Err(Error::Input(format!(
            "query has dimension {}, instance has {}",
            x.dim(),
            inst.dim
        )));
    }
    for (name, e) in [("x", x), ("y", y)] {
        if !(inst.region.margin(e) < S::zero()) {
            return Err(Error::Input(format!(
                "x, y ∈ U∖(∪ S_i) required: {name} is not inside U"
            )));
        }
        for ob in &inst.obstacles {
            let g = ob.gap(e, &inst.norm);
            if g <= inst.tol.class_eps {
                return Err(Error::Input(format!(
                    "x, y ∈ U∖(∪ S_i) required: {name} is within {} of obstacle {} (gap {g})",
                    inst.tol.class_eps, ob.id
                )));
            }
        }
    }
    if let Some(k) = p.vertices().iter().position(|v| !inst.in_region(v)) {
        return Err(Error::Input(format!(
            "vertex {k} of the polyline lies outside U"
        )));
    }
    Ok(())
}

/// Reroutes `p` from `x` to `y` around every obstacle of `inst`.
///
/// Fails with [`Error::Input`] for a bad query, [`Error::Hypothesis`] when
/// the family is not separated, and [`Error::UmViolation`] when an edge runs
/// along an obstacle boundary.
pub fn assemble_route<S: Scalar>(
    x: &Point<S>,
    y: &Point<S>,
    p: &Polyline<S>,
    inst: &Instance<S>,
) -> Result<RouteResult<S>> {
    check_query(x, y, p, inst)?;
    let report = validate_family(inst);
    if !report.pass {
        let msg: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(Error::Hypothesis(msg.join("; ")));
    }
    let (q, map) = p.normalized_with_map();
    if let Some(err) = check_um(&q, inst).to_error() {
        return Err(match err {
            Error::UmViolation {
                edge,
                obstacle,
                t_lo,
                t_hi,
            } => Error::UmViolation {
                edge: map[edge],
                obstacle,
                t_lo,
                t_hi,
            },
            other => other,
        });
    }
    let j = compute_j(&q, inst)?;
    if j.is_empty() {
        let pieces: Vec<Piece> = (0..p.edge_count())
            .map(|e| Piece {
                tag: PieceTag::OriginalEdge { edge: e },
                start: e,
                end: e + 1,
            })
            .collect();
        let stats = stats(p, &pieces, 0, inst);
        return Ok(RouteResult {
            path: p.clone(),
            pieces,
            cases: Vec::new(),
            stats,
        });
    }

    let collars = collar_widths(inst);
    let mut out = Builder {
        vertices: vec![x.clone()],
        pieces: Vec::new(),
        antipodal: 0,
    };
    let mut cases = Vec::new();
    let mut e = 0;
    let mut entry: Option<Resume<S>> = None;
    while e < q.edge_count() {
        let seg = q.edge(e);
        let tag_edge = map[e];
        if !j.contains(e) {
            match entry.take() {
                None => out.push(Span::segment(
                    PieceTag::OriginalEdge { edge: tag_edge },
                    seg.a,
                    seg.b,
                ))?,
                Some(r) => {
                    if r.point != seg.b {
                        check_clear(&Segment::new(r.point.clone(), seg.b.clone()), inst)?;
                        out.push(Span::segment(
                            PieceTag::BridgeSegment {
                                edge: tag_edge,
                                v: 0,
                            },
                            r.point,
                            seg.b,
                        ))?;
                    }
                }
            }
            e += 1;
            continue;
        }
        let sched = compute_edge_schedule(&seg, inst).map_err(|err| err.on_edge(tag_edge))?;
        let bridge = build_bridge(tag_edge, &sched, inst, &collars, entry.as_ref())?;
        for s in bridge.spans {
            out.push(s)?;
        }
        match bridge.lands_in {
            None => {
                cases.push(EdgeCase {
                    edge: tag_edge,
                    endpoints: bridge.endpoints,
                    continuation: CaseTag::Gamma1,
                });
                entry = None;
                e += 1;
            }
            Some(_) => {
                cases.push(EdgeCase {
                    edge: tag_edge,
                    endpoints: bridge.endpoints,
                    continuation: CaseTag::Gamma2,
                });
                let (spans, resume) = build_gamma2(e, &sched, inst, &collars, &q, tag_edge)?;
                for s in spans {
                    out.push(s)?;
                }
                e = resume.edge;
                entry = Some(resume);
            }
        }
    }
    if out.vertices.last() != Some(y) {
        return Err(Error::Engine("assembled path does not end at y".into()));
    }
    let path = Polyline::new(out.vertices)?;
    let stats = stats(&path, &out.pieces, out.antipodal, inst);
    Ok(RouteResult {
        path,
        pieces: out.pieces,
        cases,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::NormSpec;
    use crate::obstacle::{AaBox, Obstacle, TolerancePolicy};

    fn pt(c: &[f64]) -> Point<f64> {
        Point::new(c.to_vec()).unwrap()
    }

    fn inst(obs: Vec<Obstacle<f64>>) -> Instance<f64> {
        let u = AaBox::new(pt(&[-10.0, -10.0]), pt(&[10.0, 10.0])).unwrap();
        Instance::new(NormSpec::euclidean(), u, obs, TolerancePolicy::default()).unwrap()
    }

    fn route(i: &Instance<f64>, v: &[&[f64]]) -> Result<RouteResult<f64>> {
        let p = Polyline::new(v.iter().map(|c| pt(c)).collect()).unwrap();
        assemble_route(p.first(), p.last(), &p, i)
    }

    fn assert_safe(r: &RouteResult<f64>, i: &Instance<f64>) {
        for e in r.path.edges() {
            if e.is_degenerate() {
                continue;
            }
            for ob in &i.obstacles {
                let pr = crate::crossing::segment_profile(&e, ob, &i.norm, &i.tol).unwrap();
                assert!(
                    pr.f_min >= -i.tol.class_eps,
                    "enters obstacle {}: {}",
                    ob.id,
                    pr.f_min
                );
            }
        }
        for w in r.pieces.windows(2) {
            assert_eq!(w[0].end, w[1].start);
        }
    }

    #[test]
    fn untouched_is_identity() {
        let i = inst(vec![Obstacle::ball(0, pt(&[0.0, 0.0]), 1.0)]);
        let r = route(&i, &[&[-5.0, 5.0], &[5.0, 5.0], &[5.0, 5.0], &[5.0, -5.0]]).unwrap();
        assert!(r.is_untouched());
        assert_eq!(r.path.len(), 4);
    }

    #[test]
    fn diameter_route() {
        let i = inst(vec![Obstacle::ball(0, pt(&[0.0, 0.0]), 1.0)]);
        let r = route(&i, &[&[-3.0, 0.0], &[3.0, 0.0]]).unwrap();
        let tags: Vec<_> = r.pieces.iter().map(|p| p.tag).collect();
        assert_eq!(
            tags,
            vec![
                PieceTag::BridgeSegment { edge: 0, v: 0 },
                PieceTag::CollarArc {
                    obstacle: 0,
                    edge: 0,
                    v: 1
                },
                PieceTag::BridgeSegment { edge: 0, v: 1 },
            ]
        );
        assert_eq!(r.path.vertices()[1], pt(&[-1.0, 0.0]));
        assert_eq!(r.cases[0].endpoints, CaseTag::BridgeBothOut);
        assert_safe(&r, &i);
        assert_eq!(r.path.first(), &pt(&[-3.0, 0.0]));
        assert_eq!(r.path.last(), &pt(&[3.0, 0.0]));
    }

    #[test]
    fn vertex_inside_takes_jump() {
        let i = inst(vec![Obstacle::ball(0, pt(&[0.0, 0.0]), 1.0)]);
        let r = route(&i, &[&[-3.0, 0.5], &[0.0, 0.0], &[0.2, 3.0], &[4.0, 4.0]]).unwrap();
        assert_eq!(r.cases[0].continuation, CaseTag::Gamma2);
        assert!(!r.path.vertices().contains(&pt(&[0.0, 0.0])));
        assert_safe(&r, &i);
    }

    #[test]
    fn jump_lands_on_edge_needing_bridge() {
        let i = inst(vec![
            Obstacle::ball(0, pt(&[0.0, 0.0]), 1.0),
            Obstacle::ball(1, pt(&[0.0, 4.0]), 1.0),
        ]);
        let r = route(&i, &[&[-3.0, 0.0], &[0.0, 0.0], &[0.0, 6.0], &[5.0, 6.0]]).unwrap();
        assert_safe(&r, &i);
        assert!(r
            .pieces
            .iter()
            .any(|p| matches!(p.tag, PieceTag::CollarArc { obstacle: 1, .. })));
    }

    #[test]
    fn swallowed_edges_and_boundary_vertices() {
        let i = inst(vec![Obstacle::ball(0, pt(&[0.0, 0.0]), 2.0)]);
        let r = route(
            &i,
            &[
                &[-5.0, 0.0],
                &[-1.0, 0.0],
                &[0.5, 0.5],
                &[0.0, 2.0],
                &[0.0, 5.0],
                &[5.0, 5.0],
            ],
        )
        .unwrap();
        assert_safe(&r, &i);
        assert_eq!(r.path.last(), &pt(&[5.0, 5.0]));
    }

    #[test]
    fn rejects_bad_queries() {
        let i = inst(vec![Obstacle::ball(0, pt(&[0.0, 0.0]), 1.0)]);
        assert!(matches!(
            route(&i, &[&[0.0, 0.0], &[3.0, 0.0]]),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            route(&i, &[&[1.0, 0.0], &[3.0, 0.0]]),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            route(&i, &[&[11.0, 0.0], &[3.0, 0.0]]),
            Err(Error::Input(_))
        ));
        let touching = inst(vec![
            Obstacle::ball(0, pt(&[0.0, 0.0]), 1.0),
            Obstacle::ball(1, pt(&[2.0, 0.0]), 1.0),
        ]);
        assert!(matches!(
            route(&touching, &[&[-5.0, 5.0], &[5.0, 5.0]]),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn idempotent_on_output() {
        let i = inst(vec![
            Obstacle::ball(0, pt(&[-1.5, 0.0]), 0.5),
            Obstacle::ball(1, pt(&[1.5, 0.0]), 0.5),
        ]);
        let r = route(&i, &[&[-3.0, 0.0], &[3.0, 0.0]]).unwrap();
        let again = assemble_route(r.path.first(), r.path.last(), &r.path, &i).unwrap();
        assert!(again.is_untouched());
        assert_eq!(again.path, r.path);
    }
}
