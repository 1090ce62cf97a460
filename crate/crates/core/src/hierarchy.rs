//! Growing hierarchical SOM: layer-0 statistics, horizontal growth of each map
//! against `tau1`, vertical expansion against `tau2`, and path addressing.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::interactive;
use crate::path::{PathLabel, UnitPath};
use crate::som::{euclidean, GridLimits, Insertion, SampleSource, SomMap, TrainConfig};

/// Path labels carry one digit per coordinate, so no map side may exceed ten units.
pub const MAX_GRID_SIDE: usize = 10;

const GRID_LIMITS: GridLimits = GridLimits { max_rows: MAX_GRID_SIDE, max_cols: MAX_GRID_SIDE };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GrowthParams {
    /// Horizontal growth threshold.
    pub tau1: f64,
    /// Vertical expansion threshold.
    pub tau2: f64,
    /// Training epochs per growth step.
    pub lambda: usize,
    /// Stratification stop factor for interactive refinement.
    pub alpha: f64,
    /// Unit-insertion factor for interactive refinement.
    pub beta: f64,
    pub max_depth: usize,
    /// Structural cap on row/column insertions per map.
    pub max_insertions: usize,
    pub initial_learning_rate: f64,
}

impl Default for GrowthParams {
    fn default() -> Self {
        GrowthParams {
            tau1: 0.1,
            tau2: 0.01,
            lambda: 100,
            alpha: 0.03,
            beta: 2.0,
            max_depth: 6,
            max_insertions: 20,
            initial_learning_rate: 0.5,
        }
    }
}

impl GrowthParams {
    /// Rejects out-of-range values; returns warnings for settings that are
    /// legal but unlikely to give a meaningful hierarchy.
    pub fn validate(&self) -> Result<Vec<String>> {
        let open_unit = |x: f64| x > 0.0 && x < 1.0;
        if !open_unit(self.tau1) || !open_unit(self.tau2) {
            return Err(contract("tau1 and tau2 must lie in (0, 1)"));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(contract("alpha must lie in [0, 1]"));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(contract("beta must be positive"));
        }
        if self.lambda == 0 || self.max_depth == 0 {
            return Err(contract("lambda and max_depth must be positive"));
        }
        let mut warnings = Vec::new();
        if self.tau2 > self.tau1 {
            warnings.push(format!("tau2 ({}) exceeds tau1 ({})", self.tau2, self.tau1));
        }
        for w in &warnings {
            log::warn!("{w}");
        }
        Ok(warnings)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InsertReason {
    /// Map MQE still at or above `tau1` times the parent error.
    Tau1,
    /// A winner unit carried too large a share of the map error.
    Case2,
    /// Extra round granted after stratification was suppressed.
    Case1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapReason {
    Insertions,
    GridSize,
}

/// Audit trail entry. `map` fields name the path of the unit owning the map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum GrowthEvent {
    Trained { map: UnitPath, rows: usize, cols: usize, scope: usize, mapped: usize, mqe: f64, threshold: f64 },
    Inserted { map: UnitPath, unit: UnitPath, insertion: Insertion, reason: InsertReason },
    Converged { map: UnitPath, mqe: f64, threshold: f64 },
    CapReached { map: UnitPath, reason: CapReason, insertions: usize, mqe: f64, threshold: f64 },
    Case2Fired { map: UnitPath, unit: UnitPath, qe_k: f64, winner_qes: Vec<f64>, beta: f64, tau1: f64 },
    Case1Stop { unit: UnitPath, n_k: usize, n_input: usize, alpha: f64 },
    Expanded { unit: UnitPath, qe_k: f64, threshold: f64, map_mqe: f64, n_k: usize },
    Regrown { scope: UnitPath, target: UnitPath, seed: u64, params: GrowthParams },
}

/// A unit of some map (or the root) and its optional child map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyNode {
    pub path: UnitPath,
    pub sample_indices: Vec<usize>,
    /// Quantization error of the owning unit; `qe0` at the root.
    #[serde(with = "crate::exact::scalar")]
    pub qe: f64,
    pub child: Option<ChildMap>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChildMap {
    pub map: SomMap,
    /// One node per map unit, row-major.
    pub units: Vec<HierarchyNode>,
}

impl HierarchyNode {
    pub fn n(&self) -> usize {
        self.sample_indices.len()
    }

    pub fn is_leaf(&self) -> bool {
        self.child.is_none()
    }

    /// `[R][..]` form.
    pub fn path_label(&self) -> String {
        self.path.to_string()
    }

    /// `[R][..]:n` form used in leaf listings.
    pub fn leaf_label(&self) -> String {
        self.path.label_with_count(self.n())
    }

    /// Number of map layers at and below this node.
    pub fn depth(&self) -> usize {
        match &self.child {
            None => 0,
            Some(c) => 1 + c.units.iter().map(HierarchyNode::depth).max().unwrap_or(0),
        }
    }

    pub fn descendants(&self) -> Vec<&HierarchyNode> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            if let Some(c) = &out[i].child {
                out.extend(c.units.iter());
            }
            i += 1;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hierarchy {
    params: GrowthParams,
    seed: u64,
    dataset_size: usize,
    #[serde(with = "crate::exact::scalar")]
    qe0: f64,
    #[serde(with = "crate::exact::vec")]
    mean: Vec<f64>,
    root: HierarchyNode,
    audit: Vec<GrowthEvent>,
}

impl Hierarchy {
    pub fn params(&self) -> &GrowthParams {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dataset_size(&self) -> usize {
        self.dataset_size
    }

    /// Sum of distances from every sample to the dataset mean.
    pub fn qe0(&self) -> f64 {
        self.qe0
    }

    pub fn layer0_mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn root(&self) -> &HierarchyNode {
        &self.root
    }

    pub fn audit(&self) -> &[GrowthEvent] {
        &self.audit
    }

    /// Number of map layers.
    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// Every node in breadth-first order, root first.
    pub fn nodes(&self) -> Vec<&HierarchyNode> {
        self.root.descendants()
    }

    pub fn leaves(&self) -> Vec<&HierarchyNode> {
        self.nodes().into_iter().filter(|n| n.is_leaf() && !n.path.is_root()).collect()
    }

    pub fn map_count(&self) -> usize {
        self.nodes().iter().filter(|n| n.child.is_some()).count()
    }

    pub fn node(&self, path: &UnitPath) -> Option<&HierarchyNode> {
        let mut node = &self.root;
        for hop in path.hops() {
            let c = node.child.as_ref()?;
            let (r, col) = (hop.row as usize, hop.col as usize);
            if r >= c.map.rows() || col >= c.map.cols() {
                return None;
            }
            node = &c.units[c.map.index_of(r, col)];
        }
        Some(node)
    }

    pub(crate) fn node_mut(&mut self, path: &UnitPath) -> Option<&mut HierarchyNode> {
        let mut node = &mut self.root;
        for hop in path.hops() {
            let c = node.child.as_mut()?;
            let (r, col) = (hop.row as usize, hop.col as usize);
            if r >= c.map.rows() || col >= c.map.cols() {
                return None;
            }
            let i = c.map.index_of(r, col);
            node = &mut c.units[i];
        }
        Some(node)
    }

    /// Resolves a `[R][..]` label (an optional `:n` suffix is ignored).
    pub fn resolve_path(&self, label: &str) -> Result<&HierarchyNode> {
        let parsed: PathLabel = label.parse()?;
        self.node(&parsed.path).ok_or_else(|| Error::NotFound(format!("no node at {label}")))
    }

    /// Leaf path of every sample, indexed by sample.
    pub fn leaf_assignments(&self) -> Vec<UnitPath> {
        let mut out = vec![UnitPath::root(); self.dataset_size];
        for leaf in self.leaves() {
            for &i in &leaf.sample_indices {
                out[i] = leaf.path.clone();
            }
        }
        out
    }

    pub(crate) fn push_events(&mut self, events: impl IntoIterator<Item = GrowthEvent>) {
        self.audit.extend(events);
    }

    /// Checks the structural invariants: grid/node correspondence, path
    /// consistency, scope nesting and the global sample partition.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Snapshot(m));
        if self.root.sample_indices != (0..self.dataset_size).collect::<Vec<_>>() {
            return bad("root does not hold every sample".into());
        }
        if self.root.child.is_none() {
            return bad("root has no map".into());
        }
        let mut seen = vec![false; self.dataset_size];
        for node in self.nodes() {
            if node.path.len() > self.params.max_depth {
                return bad(format!("{} is deeper than max_depth", node.path));
            }
            match &node.child {
                None => {
                    for &i in &node.sample_indices {
                        if i >= self.dataset_size || std::mem::replace(&mut seen[i], true) {
                            return bad(format!("sample {i} is not partitioned at {}", node.path));
                        }
                    }
                }
                Some(c) => {
                    if c.units.len() != c.map.rows() * c.map.cols() {
                        return bad(format!("map under {} has a unit/node mismatch", node.path));
                    }
                    let mut union = Vec::new();
                    for (u, child) in c.map.units().iter().zip(&c.units) {
                        if child.path != node.path.child(u.row, u.col) || child.sample_indices != u.mapped {
                            return bad(format!("node {} disagrees with its map unit", child.path));
                        }
                        union.extend_from_slice(&u.mapped);
                    }
                    union.sort_unstable();
                    let mut scope = node.sample_indices.clone();
                    scope.sort_unstable();
                    if union != scope {
                        return bad(format!("map under {} does not partition its scope", node.path));
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return bad("some samples are not reachable through a leaf".into());
        }
        Ok(())
    }
}

/// Trains a complete hierarchy over every sample of `data`.
pub fn grow<S: SampleSource + Sync + ?Sized>(data: &S, params: GrowthParams, seed: u64) -> Result<Hierarchy> {
    params.validate()?;
    let n = data.len();
    if n == 0 {
        return Err(contract("cannot grow a hierarchy over an empty dataset"));
    }
    let dim = data.dim();
    let mut mean = vec![0.0; dim];
    for i in 0..n {
        for (m, x) in mean.iter_mut().zip(data.sample(i)) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let qe0: f64 = (0..n).map(|i| euclidean(data.sample(i), &mean)).sum();

    let grower = Grower { data, params, qe0, n_input: n, mode: GrowthMode::Standard, seed };
    let scope: Vec<usize> = (0..n).collect();
    let root_path = UnitPath::root();
    let (child, audit) = grower.grow_map(&root_path, &scope, qe0)?;
    Ok(Hierarchy {
        params,
        seed,
        dataset_size: n,
        qe0,
        mean,
        root: HierarchyNode { path: root_path, sample_indices: scope, qe: qe0, child: Some(child) },
        audit,
    })
}

/// Outcome of the vertical-expansion test for one unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionDecision {
    Leaf,
    Expand,
    /// Eligible for expansion but stopped by the stratification criterion.
    Suppressed,
}

/// Decides whether a unit at `unit_depth` (its path length) spawns a child map.
/// `stratification_stop` carries `(n_input, alpha)` in interactive mode.
pub fn classify_unit(
    n_k: usize,
    qe_k: f64,
    unit_depth: usize,
    params: &GrowthParams,
    qe0: f64,
    stratification_stop: Option<(usize, f64)>,
) -> ExpansionDecision {
    let eligible = qe0 > 0.0 && qe_k > params.tau2 * qe0 && n_k > 1 && unit_depth < params.max_depth;
    if !eligible {
        return ExpansionDecision::Leaf;
    }
    match stratification_stop {
        Some((n_input, alpha)) if interactive::case1_stop(n_k, n_input, alpha).unwrap_or(false) => {
            ExpansionDecision::Suppressed
        }
        _ => ExpansionDecision::Expand,
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum GrowthMode {
    Standard,
    Interactive,
}

pub(crate) struct Grower<'a, S: ?Sized> {
    pub data: &'a S,
    pub params: GrowthParams,
    pub qe0: f64,
    pub n_input: usize,
    pub mode: GrowthMode,
    pub seed: u64,
}

struct MapState {
    map: SomMap,
    step: u64,
    insertions: usize,
    seed: u64,
}

impl<S: SampleSource + Sync + ?Sized> Grower<'_, S> {
    /// Grows the map owned by `owner` over `scope`, then its descendants.
    pub(crate) fn grow_map(&self, owner: &UnitPath, scope: &[usize], qe_ref: f64) -> Result<(ChildMap, Vec<GrowthEvent>)> {
        let mut events = Vec::new();
        let seed = path_seed(self.seed, owner);
        let map = SomMap::init_from_samples(2, 2, self.data, scope, seed)?;
        let mut st = MapState { map, step: 0, insertions: 0, seed };
        self.train(&mut st, owner, scope, qe_ref, &mut events)?;
        if self.qe0 > 0.0 {
            self.grow_horizontally(&mut st, owner, scope, qe_ref, &mut events)?;
        }

        let interactive = matches!(self.mode, GrowthMode::Interactive);
        let mut decisions = self.classify(&st.map, owner);
        if interactive && decisions.contains(&ExpansionDecision::Suppressed) && st.insertions < self.params.max_insertions {
            let e = st.map.error_unit()?;
            if let Some(insertion) = st.map.insert_near(e, GRID_LIMITS)? {
                events.push(GrowthEvent::Inserted {
                    map: owner.clone(),
                    unit: unit_path(owner, &st.map, e),
                    insertion,
                    reason: InsertReason::Case1,
                });
                st.insertions += 1;
                self.train(&mut st, owner, scope, qe_ref, &mut events)?;
                self.grow_horizontally(&mut st, owner, scope, qe_ref, &mut events)?;
                decisions = self.classify(&st.map, owner);
            }
        }

        let map_mqe = st.map.mqe();
        for (u, d) in st.map.units().iter().zip(&decisions) {
            let unit = owner.child(u.row, u.col);
            match d {
                ExpansionDecision::Expand => events.push(GrowthEvent::Expanded {
                    unit,
                    qe_k: u.qe,
                    threshold: self.params.tau2 * self.qe0,
                    map_mqe,
                    n_k: u.n(),
                }),
                ExpansionDecision::Suppressed => events.push(GrowthEvent::Case1Stop {
                    unit,
                    n_k: u.n(),
                    n_input: self.n_input,
                    alpha: self.params.alpha,
                }),
                ExpansionDecision::Leaf => {}
            }
        }

        let grown: Vec<(HierarchyNode, Vec<GrowthEvent>)> = st
            .map
            .units()
            .par_iter()
            .zip(decisions.par_iter())
            .map(|(u, d)| {
                let path = owner.child(u.row, u.col);
                let mut node = HierarchyNode { path, sample_indices: u.mapped.clone(), qe: u.qe, child: None };
                let mut sub = Vec::new();
                if *d == ExpansionDecision::Expand {
                    let (c, evs) = self.grow_map(&node.path, &u.mapped, u.qe)?;
                    node.child = Some(c);
                    sub = evs;
                }
                Ok((node, sub))
            })
            .collect::<Result<_>>()?;

        let mut units = Vec::with_capacity(grown.len());
        for (node, sub) in grown {
            units.push(node);
            events.extend(sub);
        }
        Ok((ChildMap { map: st.map, units }, events))
    }

    fn classify(&self, map: &SomMap, owner: &UnitPath) -> Vec<ExpansionDecision> {
        let stop = match self.mode {
            GrowthMode::Standard => None,
            GrowthMode::Interactive => Some((self.n_input, self.params.alpha)),
        };
        map.units()
            .iter()
            .map(|u| classify_unit(u.n(), u.qe, owner.len() + 1, &self.params, self.qe0, stop))
            .collect()
    }

    fn grow_horizontally(
        &self,
        st: &mut MapState,
        owner: &UnitPath,
        scope: &[usize],
        qe_ref: f64,
        events: &mut Vec<GrowthEvent>,
    ) -> Result<()> {
        let threshold = self.params.tau1 * qe_ref;
        loop {
            let mqe = st.map.mqe();
            let (target, reason) = if mqe >= threshold {
                (st.map.error_unit()?, InsertReason::Tau1)
            } else if let (GrowthMode::Interactive, Some(v)) = (self.mode, self.case2_violator(&st.map)) {
                (v, InsertReason::Case2)
            } else {
                events.push(GrowthEvent::Converged { map: owner.clone(), mqe, threshold });
                return Ok(());
            };
            if st.insertions >= self.params.max_insertions {
                log::info!("map under {owner} stopped at the insertion cap");
                events.push(GrowthEvent::CapReached {
                    map: owner.clone(),
                    reason: CapReason::Insertions,
                    insertions: st.insertions,
                    mqe,
                    threshold,
                });
                return Ok(());
            }
            let case2_snapshot = (reason == InsertReason::Case2).then(|| GrowthEvent::Case2Fired {
                map: owner.clone(),
                unit: unit_path(owner, &st.map, target),
                qe_k: st.map.units()[target].qe,
                winner_qes: st.map.winner_set().iter().map(|&w| st.map.units()[w].qe).collect(),
                beta: self.params.beta,
                tau1: self.params.tau1,
            });
            let unit = unit_path(owner, &st.map, target);
            let Some(insertion) = st.map.insert_near(target, GRID_LIMITS)? else {
                log::info!("map under {owner} stopped at the grid size cap");
                events.push(GrowthEvent::CapReached {
                    map: owner.clone(),
                    reason: CapReason::GridSize,
                    insertions: st.insertions,
                    mqe,
                    threshold,
                });
                return Ok(());
            };
            events.extend(case2_snapshot);
            events.push(GrowthEvent::Inserted { map: owner.clone(), unit, insertion, reason });
            st.insertions += 1;
            self.train(st, owner, scope, qe_ref, events)?;
        }
    }

    // Winner unit with the largest error among those satisfying the insertion
    // criterion. Single-sample units and error-free maps never qualify.
    fn case2_violator(&self, map: &SomMap) -> Option<usize> {
        let winners = map.winner_set();
        let qes: Vec<f64> = winners.iter().map(|&w| map.units()[w].qe).collect();
        if qes.iter().sum::<f64>() <= 0.0 {
            return None;
        }
        let mut best: Option<usize> = None;
        for &w in &winners {
            let u = &map.units()[w];
            let fires = interactive::case2_insert(u.qe, &qes, self.params.beta, self.params.tau1).unwrap_or(false);
            if fires && u.n() >= 2 && best.is_none_or(|b| u.qe > map.units()[b].qe) {
                best = Some(w);
            }
        }
        best
    }

    fn train(
        &self,
        st: &mut MapState,
        owner: &UnitPath,
        scope: &[usize],
        qe_ref: f64,
        events: &mut Vec<GrowthEvent>,
    ) -> Result<()> {
        let side = st.map.rows().max(st.map.cols()) as f64;
        let cfg = TrainConfig {
            epochs: self.params.lambda,
            initial_learning_rate: self.params.initial_learning_rate,
            initial_radius: (side / 2.0).max(1.0),
            rng_seed: mix(st.seed, st.step),
        };
        st.step += 1;
        st.map.train(self.data, scope, &cfg)?;
        events.push(GrowthEvent::Trained {
            map: owner.clone(),
            rows: st.map.rows(),
            cols: st.map.cols(),
            scope: scope.len(),
            mapped: st.map.mapped_total(),
            mqe: st.map.mqe(),
            threshold: self.params.tau1 * qe_ref,
        });
        Ok(())
    }
}

fn unit_path(owner: &UnitPath, map: &SomMap, index: usize) -> UnitPath {
    let u = &map.units()[index];
    owner.child(u.row, u.col)
}

/// SplitMix64 finalizer over `seed ^ f(x)`.
pub(crate) fn mix(seed: u64, x: u64) -> u64 {
    let mut z = seed ^ x.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the map owned by `path`; independent of traversal order.
pub(crate) fn path_seed(seed: u64, path: &UnitPath) -> u64 {
    path.hops()
        .iter()
        .fold(mix(seed, path.len() as u64), |acc, h| mix(acc, (h.row as u64) << 8 | h.col as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs(seed: u64, per: usize) -> Vec<Vec<f64>> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let centers = [(0.0, 0.0), (6.0, 0.0), (0.0, 6.0), (6.0, 6.0)];
        let mut out = Vec::new();
        for (cx, cy) in centers {
            for _ in 0..per {
                out.push(vec![cx + rng.random_range(-1.0..1.0), cy + rng.random_range(-1.0..1.0)]);
            }
        }
        out
    }

    #[test]
    fn identical_samples_stay_flat() {
        let data = vec![vec![2.0, 3.0]; 12];
        let h = grow(&data, GrowthParams::default(), 1).unwrap();
        assert_eq!(h.qe0(), 0.0);
        assert_eq!(h.depth(), 1);
        let root_map = &h.root().child.as_ref().unwrap().map;
        assert_eq!((root_map.rows(), root_map.cols()), (2, 2));
        assert!(root_map.units().iter().all(|u| u.qe == 0.0));
        h.validate().unwrap();
    }

    #[test]
    fn empty_dataset_rejected() {
        let data: Vec<Vec<f64>> = Vec::new();
        assert!(grow(&data, GrowthParams::default(), 1).is_err());
    }

    #[test]
    fn high_tau2_prevents_expansion() {
        let data = blobs(3, 20);
        let params = GrowthParams { tau2: 0.99, lambda: 30, ..Default::default() };
        let h = grow(&data, params, 5).unwrap();
        assert_eq!(h.depth(), 1);
        h.validate().unwrap();
    }

    #[test]
    fn growth_invariants_on_blobs() {
        let data = blobs(7, 25);
        let params = GrowthParams { lambda: 40, ..Default::default() };
        let h = grow(&data, params, 11).unwrap();
        h.validate().unwrap();
        assert!(h.depth() >= 2);
        for e in h.audit() {
            if let GrowthEvent::Trained { scope, mapped, .. } = e {
                assert_eq!(scope, mapped);
            }
            if let GrowthEvent::Expanded { qe_k, threshold, .. } = e {
                assert!(qe_k > threshold);
            }
        }
        for node in h.nodes() {
            if let Some(c) = &node.child {
                for u in &c.units {
                    assert!(u.sample_indices.iter().all(|i| node.sample_indices.contains(i)));
                }
            }
        }
    }

    #[test]
    fn same_seed_same_hierarchy() {
        let data = blobs(1, 15);
        let params = GrowthParams { lambda: 20, ..Default::default() };
        assert_eq!(grow(&data, params, 9).unwrap(), grow(&data, params, 9).unwrap());
    }

    #[test]
    fn resolve_paths() {
        let data = blobs(2, 15);
        let h = grow(&data, GrowthParams { lambda: 20, ..Default::default() }, 4).unwrap();
        assert!(h.resolve_path("[R]").unwrap().path.is_root());
        for node in h.nodes() {
            assert_eq!(h.resolve_path(&node.path_label()).unwrap().path, node.path);
            assert_eq!(h.resolve_path(&node.leaf_label()).unwrap().path, node.path);
        }
        assert!(matches!(h.resolve_path("[R][99]"), Err(Error::NotFound(_))));
        assert!(matches!(h.resolve_path("[R][9"), Err(Error::MalformedPath(_))));
    }

    #[test]
    fn depth_cap_respected() {
        let data = blobs(4, 20);
        let params = GrowthParams { max_depth: 1, lambda: 20, ..Default::default() };
        assert_eq!(grow(&data, params, 3).unwrap().depth(), 1);
    }

    #[test]
    fn param_validation() {
        assert!(GrowthParams { tau1: 0.0, ..Default::default() }.validate().is_err());
        assert!(GrowthParams { alpha: 1.5, ..Default::default() }.validate().is_err());
        let warn = GrowthParams { tau1: 0.05, tau2: 0.2, ..Default::default() }.validate().unwrap();
        assert_eq!(warn.len(), 1);
    }

    #[test]
    fn classification_rules() {
        let p = GrowthParams::default();
        assert_eq!(classify_unit(10, 5.0, 1, &p, 100.0, None), ExpansionDecision::Expand);
        assert_eq!(classify_unit(1, 5.0, 1, &p, 100.0, None), ExpansionDecision::Leaf);
        assert_eq!(classify_unit(10, 0.5, 1, &p, 100.0, None), ExpansionDecision::Leaf);
        assert_eq!(classify_unit(10, 5.0, 6, &p, 100.0, None), ExpansionDecision::Leaf);
        assert_eq!(classify_unit(10, 5.0, 1, &p, 100.0, Some((500, 0.03))), ExpansionDecision::Suppressed);
        assert_eq!(classify_unit(16, 5.0, 1, &p, 100.0, Some((500, 0.03))), ExpansionDecision::Expand);
    }
}
