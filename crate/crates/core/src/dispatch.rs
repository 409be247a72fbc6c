//! Picking the UAV that reaches a destination first.
//!
//! One all-pairs run serves every source, so the cost of a dispatch does not
//! grow with the number of candidate UAVs beyond the cheap extraction step.

use std::collections::BTreeMap;

use crate::apsp::{floyd, reconstruct_path, ApspResult, Path};
use crate::error::{Error, Result};
use crate::field::{CellId, Field};
use crate::visibility::{build_weight_matrix, WeightMatrix};

/// The two expensive stages of a dispatch. The default methods are the
/// library's own; benchmarks override them to time or count invocations.
pub trait Planner {
    fn weights(&mut self, field: &Field) -> Result<WeightMatrix> {
        build_weight_matrix(field)
    }

    fn all_pairs(&mut self, weights: &WeightMatrix) -> Result<ApspResult> {
        floyd(weights)
    }
}

/// Planner using the default stages unchanged.
#[derive(Debug, Default, Clone, Copy)]
pub struct StandardPlanner;

impl Planner for StandardPlanner {}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceOutcome {
    /// Shortest-path distance, infinite when unreachable.
    pub distance: f64,
    /// `None` when there is no route.
    pub path: Option<Path>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispatchResult {
    pub destination: CellId,
    pub per_source: BTreeMap<CellId, SourceOutcome>,
    /// Closest source; ties go to the smallest cell id. `None` when no
    /// source can reach the destination.
    pub winner: Option<CellId>,
}

pub fn dispatch(field: &Field, sources: &[CellId], destination: CellId) -> Result<DispatchResult> {
    dispatch_with(field, sources, destination, &mut StandardPlanner)
}

pub fn dispatch_with<P: Planner + ?Sized>(
    field: &Field,
    sources: &[CellId],
    destination: CellId,
    planner: &mut P,
) -> Result<DispatchResult> {
    validate(field, sources, destination)?;
    let weights = planner.weights(field)?;
    let apsp = planner.all_pairs(&weights)?;
    drop(weights);
    select(field, &apsp, sources, destination)
}

fn validate(field: &Field, sources: &[CellId], destination: CellId) -> Result<()> {
    if sources.is_empty() {
        return Err(Error::Argument("at least one source is required".into()));
    }
    for &cell in sources.iter().chain(std::iter::once(&destination)) {
        if field.is_obstacle(cell)? {
            return Err(Error::InvalidPlacement(cell));
        }
    }
    Ok(())
}

/// Extraction step: reads each source's distance and path from a finished
/// all-pairs result and picks the winner.
pub fn select(
    field: &Field,
    apsp: &ApspResult,
    sources: &[CellId],
    destination: CellId,
) -> Result<DispatchResult> {
    validate(field, sources, destination)?;
    let mut per_source = BTreeMap::new();
    for &source in sources {
        if per_source.contains_key(&source) {
            continue;
        }
        let path = reconstruct_path(apsp, field, source, destination)?;
        let distance = apsp.distance(source, destination);
        per_source.insert(source, SourceOutcome { distance, path });
    }

    // BTreeMap iterates in id order and the comparison is strict, so the
    // smallest id wins ties.
    let mut winner: Option<(CellId, f64)> = None;
    for (&source, outcome) in &per_source {
        if outcome.distance.is_finite() && winner.is_none_or(|(_, best)| outcome.distance < best) {
            winner = Some((source, outcome.distance));
        }
    }

    Ok(DispatchResult {
        destination,
        per_source,
        winner: winner.map(|(cell, _)| cell),
    })
}
