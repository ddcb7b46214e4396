//! Checks that an obstacle family satisfies the rerouting hypotheses.

use std::fmt;

use crate::collar::{collar_widths, Collar};
use crate::obstacle::{closure_gap, region_clearance, Instance, Shape};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum HypothesisViolation<S> {
    Dimension {
        dim: usize,
    },
    NonPositiveRadius {
        obstacle: usize,
        radius: S,
    },
    ClosuresNotDisjoint {
        a: usize,
        b: usize,
        gap: S,
        sep: S,
    },
    NotInsideRegion {
        obstacle: usize,
        clearance: S,
        sep: S,
    },
    EmptyCollar {
        obstacle: usize,
        width: S,
    },
}

impl<S: Scalar> fmt::Display for HypothesisViolation<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HypothesisViolation::Dimension { dim } => {
                write!(f, "ambient dimension {dim} < 2")
            }
            HypothesisViolation::NonPositiveRadius { obstacle, radius } => {
                write!(f, "obstacle {obstacle} has radius {radius}; the open set must be nonempty")
            }
            HypothesisViolation::ClosuresNotDisjoint { a, b, gap, sep } => write!(
                f,
                "disjoint closures required: obstacles {a} and {b} are {gap} apart (need > {sep})"
            ),
            HypothesisViolation::NotInsideRegion {
                obstacle,
                clearance,
                sep,
            } => write!(
                f,
                "closure inside int(U) required: obstacle {obstacle} clears the region boundary by {clearance} (need > {sep})"
            ),
            HypothesisViolation::EmptyCollar { obstacle, width } => write!(
                f,
                "positive collar width required: obstacle {obstacle} gets width {width}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport<S> {
    pub pass: bool,
    pub violations: Vec<HypothesisViolation<S>>,
    /// `(i, j, dist(S̄_i, S̄_j))` for every pair `i < j`.
    pub gaps: Vec<(usize, usize, S)>,
    /// `dist(S̄_i, ∂U)` per obstacle.
    pub clearances: Vec<S>,
    pub collars: Vec<Collar<S>>,
}

impl<S: Scalar> ValidationReport<S> {
    /// Smallest collar width, or `None` for an empty family.
    pub fn min_width(&self) -> Option<S> {
        self.collars.iter().map(|c| c.width).reduce(S::min)
    }
}

pub fn validate_family<S: Scalar>(inst: &Instance<S>) -> ValidationReport<S> {
    let norm = &inst.norm;
    let sep = inst.tol.sep;
    let mut violations = Vec::new();
    if inst.dim < 2 {
        violations.push(HypothesisViolation::Dimension { dim: inst.dim });
    }
    for ob in &inst.obstacles {
        if let Shape::Ball { radius, .. } = &ob.shape {
            if !(*radius > S::zero()) {
                violations.push(HypothesisViolation::NonPositiveRadius {
                    obstacle: ob.id,
                    radius: *radius,
                });
            }
        }
    }
    let mut gaps = Vec::new();
    for (i, a) in inst.obstacles.iter().enumerate() {
        for b in &inst.obstacles[i + 1..] {
            let gap = closure_gap(a, b, norm);
            if !(gap > sep) {
                violations.push(HypothesisViolation::ClosuresNotDisjoint {
                    a: a.id,
                    b: b.id,
                    gap,
                    sep,
                });
            }
            gaps.push((a.id, b.id, gap));
        }
    }
    let clearances: Vec<S> = inst
        .obstacles
        .iter()
        .map(|ob| region_clearance(ob, &inst.region, norm))
        .collect();
    for (ob, &clearance) in inst.obstacles.iter().zip(&clearances) {
        if !(clearance > sep) {
            violations.push(HypothesisViolation::NotInsideRegion {
                obstacle: ob.id,
                clearance,
                sep,
            });
        }
    }
    let collars = collar_widths(inst);
    for c in &collars {
        if !(c.width > S::zero()) {
            violations.push(HypothesisViolation::EmptyCollar {
                obstacle: c.obstacle,
                width: c.width,
            });
        }
    }
    ValidationReport {
        pass: violations.is_empty(),
        violations,
        gaps,
        clearances,
        collars,
    }
}
