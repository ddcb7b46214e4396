//! Per-edge entry/exit schedules and the set `J` of edges needing a detour.

use crate::crossing::profile_or_miss;
use crate::error::{Error, Result};
use crate::geom::{Point, Polyline, Segment};
use crate::obstacle::Instance;
use crate::scalar::Scalar;

/// Edges (0-based) on which some obstacle is both crossed and entered.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeIndexSetJ {
    pub members: Vec<usize>,
}

impl EdgeIndexSetJ {
    /// Largest member.
    pub fn j0(&self) -> Option<usize> {
        self.members.last().copied()
    }

    /// `k_m`, the `m`-th smallest member (0-based rank).
    pub fn k(&self, m: usize) -> usize {
        self.members[m]
    }

    pub fn contains(&self, j: usize) -> bool {
        self.members.binary_search(&j).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Whether edge `e` belongs to `J`.
pub fn edge_in_j<S: Scalar>(e: &Segment<S>, inst: &Instance<S>) -> Result<bool> {
    if e.is_degenerate() {
        return Ok(false);
    }
    for ob in &inst.obstacles {
        if let Some(pr) = profile_or_miss(e, ob, &inst.norm, &inst.tol)? {
            if !pr.crossings.is_empty() && pr.overlaps_interior() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

pub fn compute_j<S: Scalar>(p: &Polyline<S>, inst: &Instance<S>) -> Result<EdgeIndexSetJ> {
    let mut members = Vec::new();
    for (j, e) in p.edges().enumerate() {
        if edge_in_j(&e, inst).map_err(|err| err.on_edge(j))? {
            members.push(j);
        }
    }
    Ok(EdgeIndexSetJ { members })
}

/// `L_i` for one obstacle of `Q_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleCrossings<S> {
    pub obstacle: usize,
    pub crossings: Vec<S>,
    pub t_min: S,
    pub t_max: S,
    /// Parameter run the edge spends inside the obstacle.
    pub interior: (S, S),
}

impl<S: Scalar> ObstacleCrossings<S> {
    fn enters_at(&self, t: S) -> bool {
        self.interior.0 <= t && t < self.interior.1
    }
}

/// One visit `(i_v, t_v, t_v,max)` of the entry/exit sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event<S> {
    pub obstacle: usize,
    pub t_enter: S,
    pub t_exit: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSchedule<S> {
    pub edge: Segment<S>,
    /// `Q_m`, ordered by obstacle id.
    pub active: Vec<ObstacleCrossings<S>>,
    pub events: Vec<Event<S>>,
}

impl<S: Scalar> EdgeSchedule<S> {
    /// `v₀`, the number of events.
    pub fn v0(&self) -> usize {
        self.events.len()
    }

    /// `z_v`, where event `v` (0-based) begins.
    pub fn z_enter(&self, v: usize) -> Point<S> {
        self.edge.at(self.events[v].t_enter)
    }

    /// `z_v,max`, where event `v` (0-based) ends.
    pub fn z_exit(&self, v: usize) -> Point<S> {
        self.edge.at(self.events[v].t_exit)
    }

    pub fn crossings_of(&self, obstacle: usize) -> Option<&ObstacleCrossings<S>> {
        self.active.iter().find(|c| c.obstacle == obstacle)
    }
}

/// Builds the entry/exit sequence for an edge of `J`.
///
/// The first event is the obstacle of `Q_m` with the smallest crossing.
/// Each later event is the smallest crossing past the previous exit, among
/// unvisited obstacles, after which the edge runs inside that obstacle.
pub fn compute_edge_schedule<S: Scalar>(
    edge: &Segment<S>,
    inst: &Instance<S>,
) -> Result<EdgeSchedule<S>> {
    if edge.is_degenerate() {
        return Err(Error::Schedule("zero-length edge".into()));
    }
    let mut active = Vec::new();
    for ob in &inst.obstacles {
        let Some(pr) = profile_or_miss(edge, ob, &inst.norm, &inst.tol)? else {
            continue;
        };
        if let (Some(interior), Some(&t_min), Some(&t_max)) =
            (pr.interior, pr.crossings.first(), pr.crossings.last())
        {
            active.push(ObstacleCrossings {
                obstacle: ob.id,
                crossings: pr.crossings,
                t_min,
                t_max,
                interior,
            });
        }
    }
    if active.is_empty() {
        return Err(Error::Schedule(
            "edge meets no obstacle both on its boundary and inside".into(),
        ));
    }
    check_disjoint(&active, inst.tol.t_eps)?;

    let first = active
        .iter()
        .min_by(|a, b| a.t_min.partial_cmp(&b.t_min).unwrap())
        .unwrap();
    let mut events = vec![Event {
        obstacle: first.obstacle,
        t_enter: first.t_min,
        t_exit: first.t_max,
    }];
    loop {
        let last = *events.last().unwrap();
        let next = active
            .iter()
            .filter(|c| !events.iter().any(|e| e.obstacle == c.obstacle))
            .flat_map(|c| {
                c.crossings
                    .iter()
                    .filter(move |&&t| t > last.t_exit && c.enters_at(t))
                    .map(move |&t| (t, c))
            })
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        match next {
            Some((t, c)) => events.push(Event {
                obstacle: c.obstacle,
                t_enter: t,
                t_exit: c.t_max,
            }),
            None => break,
        }
    }
    for w in events.windows(2) {
        if !(w[0].t_exit < w[1].t_enter) {
            return Err(Error::Schedule(format!(
                "events of obstacles {} and {} overlap",
                w[0].obstacle, w[1].obstacle
            )));
        }
    }
    Ok(EdgeSchedule {
        edge: edge.clone(),
        active,
        events,
    })
}

fn check_disjoint<S: Scalar>(active: &[ObstacleCrossings<S>], t_eps: S) -> Result<()> {
    for (i, a) in active.iter().enumerate() {
        for b in &active[i + 1..] {
            for &s in &a.crossings {
                if b.crossings.iter().any(|&t| (s - t).abs() <= t_eps) {
                    return Err(Error::Schedule(format!(
                        "obstacles {} and {} share the crossing parameter {s}",
                        a.obstacle, b.obstacle
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Straight pieces of the bridge: the lead-in when the edge starts outside
/// every obstacle, the gaps between consecutive events, and the lead-out
/// when the edge ends outside. Zero-length pieces are dropped. Each piece is
/// checked to avoid every obstacle interior.
pub fn bridge_gap_segments<S: Scalar>(
    sched: &EdgeSchedule<S>,
    inst: &Instance<S>,
) -> Result<Vec<Segment<S>>> {
    let mut out = Vec::new();
    let e = &sched.edge;
    let v0 = sched.v0();
    if inst.containing_obstacle(&e.a).is_none() {
        out.push(Segment::new(e.a.clone(), sched.z_enter(0)));
    }
    for v in 1..v0 {
        out.push(Segment::new(sched.z_exit(v - 1), sched.z_enter(v)));
    }
    if inst.containing_obstacle(&e.b).is_none() {
        out.push(Segment::new(sched.z_exit(v0 - 1), e.b.clone()));
    }
    out.retain(|s| !s.is_degenerate());
    for s in &out {
        check_clear(s, inst)?;
    }
    Ok(out)
}

/// Fails unless `s` avoids every obstacle interior.
pub(crate) fn check_clear<S: Scalar>(s: &Segment<S>, inst: &Instance<S>) -> Result<()> {
    for ob in &inst.obstacles {
        if let Some(pr) = profile_or_miss(s, ob, &inst.norm, &inst.tol)? {
            if pr.overlaps_interior() {
                return Err(Error::Schedule(format!(
                    "bridge segment enters obstacle {} (depth {})",
                    ob.id, -pr.f_min
                )));
            }
        }
    }
    Ok(())
}
