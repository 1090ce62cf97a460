//! User-triggered re-clustering of a hierarchy node.
//!
//! Two criteria reshape the regrown subtree:
//! * stratification stop: a unit holding `n_k <= alpha * n_I` samples does
//!   not spawn a child map, and its map gets one extra insertion round instead;
//! * error-driven insertion: a winner unit with
//!   `qe_k >= beta * tau1 * sum(qe_y for winners y)` makes its map grow in place.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::hierarchy::{path_seed, GrowthEvent, GrowthMode, GrowthParams, Grower, Hierarchy, InsertReason};
use crate::path::{PathLabel, UnitPath};
use crate::som::SampleSource;

/// True when a unit with `n_k` of `n_input` samples must not be stratified further.
pub fn case1_stop(n_k: usize, n_input: usize, alpha: f64) -> Result<bool> {
    if n_input == 0 {
        return Err(contract("n_I must be at least 1"));
    }
    if n_k > n_input {
        return Err(contract(format!("n_k ({n_k}) exceeds n_I ({n_input})")));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(contract("alpha must lie in [0, 1]"));
    }
    Ok(n_k as f64 <= alpha * n_input as f64)
}

/// True when winner unit error `qe_k` is large enough to trigger an insertion.
pub fn case2_insert(qe_k: f64, winner_qes: &[f64], beta: f64, tau1: f64) -> Result<bool> {
    if winner_qes.is_empty() {
        return Err(contract("winner set is empty"));
    }
    if !(beta > 0.0 && tau1 > 0.0) {
        return Err(contract("beta and tau1 must be positive"));
    }
    if !winner_qes.contains(&qe_k) {
        return Err(contract("qe_k does not belong to a winner unit"));
    }
    let total: f64 = winner_qes.iter().sum();
    Ok(qe_k >= beta * tau1 * total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineRequest {
    /// Path label of the touched node.
    pub target: String,
    pub params: GrowthParams,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineReport {
    pub target: UnitPath,
    /// Node whose map was regrown.
    pub scope: UnitPath,
    pub scope_size: usize,
    pub scope_size_after: usize,
    /// Map layers under the scope node.
    pub depth_before: usize,
    pub depth_after: usize,
    pub hierarchy_depth_before: usize,
    pub hierarchy_depth_after: usize,
    pub case1_stops: usize,
    pub case2_insertions: usize,
    pub duration_ms: u64,
}

/// Regrows the map containing the target node, and everything under it, with
/// both interactive criteria active. Nodes outside that subtree are kept as is.
pub fn refine<S: SampleSource + Sync + ?Sized>(
    h: &Hierarchy,
    data: &S,
    req: &RefineRequest,
) -> Result<(Hierarchy, RefineReport)> {
    let started = Instant::now();
    req.params.validate()?;
    if data.len() != h.dataset_size() {
        return Err(contract(format!(
            "hierarchy covers {} samples, data has {}",
            h.dataset_size(),
            data.len()
        )));
    }
    let label: PathLabel = req.target.parse()?;
    let target = label.path;
    if h.node(&target).is_none() {
        return Err(Error::NotFound(format!("no node at {target}")));
    }
    let scope = target.parent().unwrap_or_else(UnitPath::root);
    let owner = h.node(&scope).expect("parent of an existing node exists");
    let scope_samples = owner.sample_indices.clone();
    let depth_before = owner.depth();

    let seed = path_seed(req.seed, &target);
    let grower = Grower {
        data,
        params: req.params,
        qe0: h.qe0(),
        n_input: h.dataset_size(),
        mode: GrowthMode::Interactive,
        seed,
    };
    let (child, events) = grower.grow_map(&scope, &scope_samples, owner.qe)?;

    let case1_stops = events.iter().filter(|e| matches!(e, GrowthEvent::Case1Stop { .. })).count();
    let case2_insertions = events
        .iter()
        .filter(|e| matches!(e, GrowthEvent::Inserted { reason: InsertReason::Case2, .. }))
        .count();

    let mut out = h.clone();
    out.push_events([GrowthEvent::Regrown { scope: scope.clone(), target: target.clone(), seed: req.seed, params: req.params }]);
    out.push_events(events);
    let node = out.node_mut(&scope).expect("scope node exists in the clone");
    node.child = Some(child);
    let depth_after = node.depth();
    let scope_size_after = node.child.as_ref().map_or(0, |c| c.map.mapped_total());

    let report = RefineReport {
        target,
        scope,
        scope_size: scope_samples.len(),
        scope_size_after,
        depth_before,
        depth_after,
        hierarchy_depth_before: h.depth(),
        hierarchy_depth_after: out.depth(),
        case1_stops,
        case2_insertions,
        duration_ms: started.elapsed().as_millis() as u64,
    };
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::grow;

    #[test]
    fn case1_examples() {
        assert!(case1_stop(12, 500, 0.03).unwrap());
        assert!(!case1_stop(16, 500, 0.03).unwrap());
        assert!(!case1_stop(1, 10, 0.0).unwrap());
        assert!(case1_stop(1, 0, 0.5).is_err());
        assert!(case1_stop(11, 10, 0.5).is_err());
        assert!(case1_stop(1, 10, 1.5).is_err());
    }

    #[test]
    fn case2_examples() {
        assert!(case2_insert(2.5, &[2.5, 7.5], 2.0, 0.1).unwrap());
        assert!(!case2_insert(1.9, &[1.9, 8.1], 2.0, 0.1).unwrap());
        assert!(!case2_insert(0.0, &[0.0, 10.0], 2.0, 0.1).unwrap());
        assert!(case2_insert(1.0, &[], 2.0, 0.1).is_err());
        assert!(case2_insert(1.0, &[2.0], 2.0, 0.1).is_err());
        assert!(case2_insert(1.0, &[1.0], 0.0, 0.1).is_err());
    }

    fn grid_data() -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for i in 0..8 {
            for j in 0..8 {
                let cx = if i < 4 { 0.0 } else { 10.0 };
                out.push(vec![cx + i as f64 * 0.3, j as f64 * 0.7]);
            }
        }
        out
    }

    #[test]
    fn alpha_one_collapses_root() {
        let data = grid_data();
        let params = GrowthParams { lambda: 20, ..Default::default() };
        let h = grow(&data, params, 3).unwrap();
        let req = RefineRequest { target: "[R]".into(), params: GrowthParams { alpha: 1.0, ..params }, seed: 8 };
        let (after, report) = refine(&h, &data, &req).unwrap();
        assert_eq!(after.depth(), 1);
        assert_eq!(report.scope_size, 64);
        assert_eq!(report.scope_size_after, 64);
        after.validate().unwrap();
    }

    #[test]
    fn unknown_target() {
        let data = grid_data();
        let params = GrowthParams { lambda: 10, ..Default::default() };
        let h = grow(&data, params, 3).unwrap();
        let req = RefineRequest { target: "[R][99]".into(), params, seed: 1 };
        assert!(matches!(refine(&h, &data, &req), Err(Error::NotFound(_))));
        let req = RefineRequest { target: "R".into(), params, seed: 1 };
        assert!(matches!(refine(&h, &data, &req), Err(Error::MalformedPath(_))));
    }
}
