//! Analysis sessions: uploaded inputs, the current hierarchy, an append-only
//! audit log and snapshot persistence.
//!
//! Writers (uploads, train, refine, import) are exclusive and never queue: a
//! second writer gets [`Error::Conflict`]. Writers compute on a copy of the
//! state and publish it with a single swap, so readers only ever observe the
//! state before or after a write.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::c45::{extract_rules, induce, instances_from_hierarchy, DecisionTree};
use crate::color::{channel_ranges, fit_pca, unit_color, RgbColor};
use crate::data::{build_features, parse_records, Attribute, Dataset, RecordAttributes, TouristRecord};
use crate::error::{Error, Result};
use crate::filter::{emit, FilterRule, MemorySink, OutgoingMessage, RuleSet};
use crate::hierarchy::{grow, GrowthParams, Hierarchy, HierarchyNode};
use crate::interactive::{refine, RefineReport, RefineRequest};
use crate::path::UnitPath;
use crate::text::{build_corpus, comment_features, Corpus, TopLConfig};

pub const SNAPSHOT_VERSION: &str = "ighsom-snapshot/1";

/// Minimum instances per branch of a C4.5 split.
pub const DEFAULT_MIN_LEAF: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum SessionEvent {
    DataUploaded { records: usize, fingerprint: String },
    CorpusUploaded { documents: usize, fingerprint: String },
    Trained { params: GrowthParams, seed: u64 },
    Refined { target: String, params: GrowthParams, seed: u64 },
    RulesExtracted { rules: usize },
    SnapshotImported { fingerprint: String },
}

/// Partial parameter set; absent fields keep the session value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    pub tau1: Option<f64>,
    pub tau2: Option<f64>,
    pub lambda: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub max_depth: Option<usize>,
    pub max_insertions: Option<usize>,
    pub initial_learning_rate: Option<f64>,
}

impl ParamOverrides {
    pub fn apply(&self, base: GrowthParams) -> GrowthParams {
        GrowthParams {
            tau1: self.tau1.unwrap_or(base.tau1),
            tau2: self.tau2.unwrap_or(base.tau2),
            lambda: self.lambda.unwrap_or(base.lambda),
            alpha: self.alpha.unwrap_or(base.alpha),
            beta: self.beta.unwrap_or(base.beta),
            max_depth: self.max_depth.unwrap_or(base.max_depth),
            max_insertions: self.max_insertions.unwrap_or(base.max_insertions),
            initial_learning_rate: self.initial_learning_rate.unwrap_or(base.initial_learning_rate),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusDocumentInput {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusUpload {
    pub documents: Vec<CorpusDocumentInput>,
    #[serde(default)]
    pub top_l: Option<TopLConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSummary {
    pub records: usize,
    pub schema: Vec<String>,
    pub fingerprint: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub documents: usize,
    pub terms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSummary {
    pub rows: usize,
    pub cols: usize,
    pub mqe: f64,
    pub units: Vec<NodeSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSummary {
    pub path: UnitPath,
    /// `path:count`.
    pub label: String,
    pub count: usize,
    pub qe: f64,
    /// Absent for the root, which has no weight vector.
    pub color: Option<RgbColor>,
    pub map: Option<MapSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchySummary {
    pub depth: usize,
    pub map_count: usize,
    pub leaf_count: usize,
    pub qe0: f64,
    pub params: GrowthParams,
    pub root: NodeSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub index: usize,
    pub record: TouristRecord,
    pub tfidf_max: f64,
    pub tfidf_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RulesReport {
    pub tree: DecisionTree,
    pub tree_text: String,
    pub rules: Vec<FilterRule>,
    /// Human-readable form of each rule.
    pub rule_text: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterRequest {
    pub records: Vec<TouristRecord>,
    /// Hand-loaded rules; the tree-derived rules are used when absent.
    #[serde(default)]
    pub rules: Option<Vec<FilterRule>>,
    /// Column the bare `tfidf` attribute refers to.
    #[serde(default = "default_tfidf_alias")]
    pub tfidf_alias: Attribute,
}

fn default_tfidf_alias() -> Attribute {
    Attribute::TfidfSum
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub messages: Vec<OutgoingMessage>,
    /// Records that matched no rule.
    pub unmatched: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineOutcome {
    pub report: RefineReport,
    pub hierarchy: HierarchySummary,
}

/// Persisted hierarchy. Doubles in the tree are stored as exact bit patterns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchySnapshot {
    pub version: String,
    pub params: GrowthParams,
    pub fingerprint: String,
    pub hierarchy: Hierarchy,
    /// Unit colors by path label.
    pub colors: std::collections::BTreeMap<String, RgbColor>,
}

impl HierarchySnapshot {
    pub fn new(dataset: &Dataset, hierarchy: &Hierarchy) -> Result<Self> {
        let colors = unit_colors(dataset, hierarchy)?.into_iter().map(|(p, c)| (p.to_string(), c)).collect();
        Ok(HierarchySnapshot {
            version: SNAPSHOT_VERSION.to_string(),
            params: *hierarchy.params(),
            fingerprint: dataset.fingerprint(),
            hierarchy: hierarchy.clone(),
            colors,
        })
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        Ok(serde_json::to_vec_pretty(self)?)
    }

    /// Parses and checks a snapshot against the dataset it must describe.
    pub fn load(bytes: &[u8], dataset: &Dataset) -> Result<Self> {
        let snap: HierarchySnapshot = serde_json::from_slice(bytes)?;
        if snap.version != SNAPSHOT_VERSION {
            return Err(Error::Snapshot(format!("unsupported snapshot version {:?}", snap.version)));
        }
        let found = dataset.fingerprint();
        if snap.fingerprint != found {
            return Err(Error::Fingerprint { expected: snap.fingerprint, found });
        }
        if snap.hierarchy.dataset_size() != dataset.len() {
            return Err(Error::Snapshot("hierarchy size does not match the dataset".into()));
        }
        snap.hierarchy.validate().map_err(|e| Error::Snapshot(e.to_string()))?;
        Ok(snap)
    }
}

/// Colors for every map unit, by PCA over the dataset features and min-max
/// scaling over all unit weights in the hierarchy.
pub fn unit_colors(dataset: &Dataset, hierarchy: &Hierarchy) -> Result<Vec<(UnitPath, RgbColor)>> {
    let basis = fit_pca(dataset)?;
    let mut units = Vec::new();
    for node in hierarchy.nodes() {
        if let Some(child) = &node.child {
            for (unit, sub) in child.map.units().iter().zip(&child.units) {
                units.push((sub.path.clone(), unit.weight.as_slice()));
            }
        }
    }
    let ranges = channel_ranges(units.iter().map(|(_, w)| *w), &basis);
    Ok(units.into_iter().map(|(p, w)| (p, unit_color(w, &basis, &ranges))).collect())
}

pub fn summarize(dataset: &Dataset, hierarchy: &Hierarchy) -> Result<HierarchySummary> {
    let colors: HashMap<UnitPath, RgbColor> = unit_colors(dataset, hierarchy)?.into_iter().collect();
    fn walk(node: &HierarchyNode, colors: &HashMap<UnitPath, RgbColor>) -> NodeSummary {
        NodeSummary {
            path: node.path.clone(),
            label: node.leaf_label(),
            count: node.n(),
            qe: node.qe,
            color: colors.get(&node.path).copied(),
            map: node.child.as_ref().map(|c| MapSummary {
                rows: c.map.rows(),
                cols: c.map.cols(),
                mqe: c.map.mqe(),
                units: c.units.iter().map(|u| walk(u, colors)).collect(),
            }),
        }
    }
    Ok(HierarchySummary {
        depth: hierarchy.depth(),
        map_count: hierarchy.map_count(),
        leaf_count: hierarchy.leaves().len(),
        qe0: hierarchy.qe0(),
        params: *hierarchy.params(),
        root: walk(hierarchy.root(), &colors),
    })
}

/// C4.5 over raw attributes with leaf labels as classes, plus its rules.
pub fn extract(dataset: &Dataset, hierarchy: &Hierarchy, min_leaf: usize) -> Result<RulesReport> {
    let instances = instances_from_hierarchy(dataset, hierarchy)?;
    let tree = induce(dataset.schema(), &instances, min_leaf)?;
    let rules = extract_rules(&tree);
    Ok(RulesReport {
        tree_text: tree.to_text(),
        rule_text: rules.iter().map(|r| r.to_string()).collect(),
        rules,
        tree,
    })
}

/// Re-runs the train and refine events recorded after the last input upload.
pub fn replay<'a>(dataset: &Dataset, audit: impl IntoIterator<Item = &'a SessionEvent>) -> Result<Option<Hierarchy>> {
    let mut current: Option<Hierarchy> = None;
    for event in audit {
        match event {
            SessionEvent::DataUploaded { .. } | SessionEvent::CorpusUploaded { .. } => current = None,
            SessionEvent::Trained { params, seed } => current = Some(grow(dataset, *params, *seed)?),
            SessionEvent::Refined { target, params, seed } => {
                let h = current.as_ref().ok_or_else(|| Error::Precondition("refine before train in audit".into()))?;
                let req = RefineRequest { target: target.clone(), params: *params, seed: *seed };
                current = Some(refine(h, dataset, &req)?.0);
            }
            SessionEvent::RulesExtracted { .. } => {}
            SessionEvent::SnapshotImported { .. } => {
                return Err(Error::Precondition("audit contains a snapshot import and cannot be replayed".into()));
            }
        }
    }
    Ok(current)
}

/// Everything a session holds; replaced wholesale by each write.
#[derive(Debug, Clone, Default)]
pub struct SessionState {
    pub records: Vec<TouristRecord>,
    pub corpus: Option<Corpus>,
    pub top_l: TopLConfig,
    /// `(max, sum)` comment scores per record.
    pub tfidf: Vec<(f64, f64)>,
    pub dataset: Option<Dataset>,
    pub hierarchy: Option<Hierarchy>,
    pub params: GrowthParams,
    pub rules: Option<RulesReport>,
    pub audit: Vec<SessionEvent>,
}

impl SessionState {
    fn dataset(&self) -> Result<&Dataset> {
        self.dataset.as_ref().ok_or_else(|| Error::Precondition("no data uploaded".into()))
    }

    fn hierarchy(&self) -> Result<&Hierarchy> {
        self.hierarchy.as_ref().ok_or_else(|| Error::Precondition("no hierarchy trained".into()))
    }

    fn score(&self, comment: &str) -> Result<(f64, f64)> {
        match &self.corpus {
            Some(c) => {
                let f = comment_features(comment, c, &self.top_l)?;
                Ok((f.max, f.sum))
            }
            None => Ok((0.0, 0.0)),
        }
    }

    fn rebuild_features(&mut self) -> Result<()> {
        self.hierarchy = None;
        self.rules = None;
        if self.records.is_empty() {
            self.dataset = None;
            self.tfidf.clear();
            return Ok(());
        }
        self.tfidf = self.records.iter().map(|r| self.score(&r.comment)).collect::<Result<_>>()?;
        self.dataset = Some(build_features(&self.records, &self.tfidf)?);
        Ok(())
    }
}

pub struct Session {
    id: String,
    state: RwLock<Arc<SessionState>>,
    busy: AtomicBool,
}

struct WriteGuard<'a>(&'a AtomicBool);

impl Drop for WriteGuard<'_> {
    fn drop(&mut self) {
        self.0.store(false, Ordering::Release);
    }
}

impl Session {
    pub fn new(id: impl Into<String>) -> Self {
        Session { id: id.into(), state: RwLock::new(Arc::new(SessionState::default())), busy: AtomicBool::new(false) }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Current state; never a partially applied write.
    pub fn state(&self) -> Arc<SessionState> {
        self.state.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    pub fn is_busy(&self) -> bool {
        self.busy.load(Ordering::Acquire)
    }

    fn write<T>(&self, f: impl FnOnce(&mut SessionState) -> Result<T>) -> Result<T> {
        if self.busy.compare_exchange(false, true, Ordering::AcqRel, Ordering::Acquire).is_err() {
            return Err(Error::Conflict(format!("session {} is busy", self.id)));
        }
        let _guard = WriteGuard(&self.busy);
        let mut next = (*self.state()).clone();
        let out = f(&mut next)?;
        *self.state.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(next);
        Ok(out)
    }

    pub fn upload_data(&self, csv_text: &str) -> Result<DataSummary> {
        let records = parse_records(csv_text)?;
        if records.is_empty() {
            return Err(Error::Validation { line: 1, message: "no records".into() });
        }
        self.write(|s| {
            s.records = records;
            s.rebuild_features()?;
            let ds = s.dataset()?;
            let summary = DataSummary { records: ds.len(), schema: ds.schema().to_vec(), fingerprint: ds.fingerprint() };
            s.audit.push(SessionEvent::DataUploaded { records: summary.records, fingerprint: summary.fingerprint.clone() });
            Ok(summary)
        })
    }

    pub fn upload_corpus(&self, upload: CorpusUpload) -> Result<CorpusSummary> {
        let corpus = build_corpus(upload.documents.iter().map(|d| (d.id.as_str(), d.text.as_str())))?;
        self.set_corpus(corpus, upload.top_l.unwrap_or_default())
    }

    /// Installs an already built corpus and rescores every record.
    pub fn set_corpus(&self, corpus: Corpus, top_l: TopLConfig) -> Result<CorpusSummary> {
        if top_l.l == 0 {
            return Err(Error::Validation { line: 0, message: "top_l.l must be at least 1".into() });
        }
        self.write(|s| {
            let summary = CorpusSummary { documents: corpus.document_count(), terms: corpus.vocabulary_size() };
            s.corpus = Some(corpus);
            s.top_l = top_l;
            s.rebuild_features()?;
            let fingerprint = s.dataset.as_ref().map(Dataset::fingerprint).unwrap_or_default();
            s.audit.push(SessionEvent::CorpusUploaded { documents: summary.documents, fingerprint });
            Ok(summary)
        })
    }

    pub fn train(&self, params: GrowthParams, seed: u64) -> Result<HierarchySummary> {
        self.write(|s| {
            let ds = s.dataset()?;
            let h = grow(ds, params, seed)?;
            let summary = summarize(ds, &h)?;
            s.hierarchy = Some(h);
            s.params = params;
            s.rules = None;
            s.audit.push(SessionEvent::Trained { params, seed });
            Ok(summary)
        })
    }

    pub fn refine(&self, target: &str, overrides: ParamOverrides, seed: u64) -> Result<RefineOutcome> {
        self.write(|s| {
            let ds = s.dataset()?;
            let h = s.hierarchy()?;
            let params = overrides.apply(s.params);
            let req = RefineRequest { target: target.to_string(), params, seed };
            let (next, report) = refine(h, ds, &req)?;
            let summary = summarize(ds, &next)?;
            s.hierarchy = Some(next);
            s.rules = None;
            s.audit.push(SessionEvent::Refined { target: target.to_string(), params, seed });
            Ok(RefineOutcome { report, hierarchy: summary })
        })
    }

    pub fn hierarchy(&self) -> Result<HierarchySummary> {
        let s = self.state();
        summarize(s.dataset()?, s.hierarchy()?)
    }

    pub fn samples(&self, path: &str) -> Result<Vec<SampleRow>> {
        let s = self.state();
        let node = s.hierarchy()?.resolve_path(path)?;
        Ok(node
            .sample_indices
            .iter()
            .map(|&i| SampleRow {
                index: i,
                record: s.records[i].clone(),
                tfidf_max: s.tfidf[i].0,
                tfidf_sum: s.tfidf[i].1,
            })
            .collect())
    }

    /// Induces (or returns the cached) tree and rules for the current hierarchy.
    pub fn rules(&self) -> Result<RulesReport> {
        let s = self.state();
        if let Some(r) = &s.rules {
            return Ok(r.clone());
        }
        s.hierarchy()?;
        self.write(|s| {
            let report = extract(s.dataset()?, s.hierarchy()?, DEFAULT_MIN_LEAF)?;
            s.audit.push(SessionEvent::RulesExtracted { rules: report.rules.len() });
            s.rules = Some(report.clone());
            Ok(report)
        })
    }

    pub fn filter(&self, req: FilterRequest) -> Result<FilterReport> {
        let rules = match req.rules {
            Some(r) => r,
            None => self.rules()?.rules,
        };
        let set = RuleSet::compile(rules, req.tfidf_alias)?;
        let s = self.state();
        let mut sink = MemorySink::default();
        let mut unmatched = Vec::new();
        for (i, record) in req.records.iter().enumerate() {
            record.validate(i + 1)?;
            let (max, sum) = s.score(&record.comment)?;
            match set.evaluate(&RecordAttributes::new(record, max, sum)) {
                Some(area) => {
                    emit(record, area, &mut sink)?;
                }
                None => unmatched.push(record.id),
            }
        }
        Ok(FilterReport { messages: sink.messages, unmatched })
    }

    pub fn export_snapshot(&self) -> Result<Vec<u8>> {
        let s = self.state();
        HierarchySnapshot::new(s.dataset()?, s.hierarchy()?)?.to_bytes()
    }

    pub fn import_snapshot(&self, bytes: &[u8]) -> Result<HierarchySummary> {
        self.write(|s| {
            let ds = s.dataset()?;
            let snap = HierarchySnapshot::load(bytes, ds)?;
            let summary = summarize(ds, &snap.hierarchy)?;
            s.params = snap.params;
            s.hierarchy = Some(snap.hierarchy);
            s.rules = None;
            s.audit.push(SessionEvent::SnapshotImported { fingerprint: snap.fingerprint });
            Ok(summary)
        })
    }

    pub fn audit(&self) -> Vec<SessionEvent> {
        self.state().audit.clone()
    }
}

/// In-memory registry of live sessions.
#[derive(Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Session>>>,
    next: AtomicU64,
}

impl SessionStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn create(&self) -> Arc<Session> {
        let n = self.next.fetch_add(1, Ordering::Relaxed) + 1;
        let id = format!("s{n:06}");
        let session = Arc::new(Session::new(id.clone()));
        self.sessions.write().unwrap_or_else(|e| e.into_inner()).insert(id, session.clone());
        session
    }

    pub fn get(&self, id: &str) -> Result<Arc<Session>> {
        self.sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(id)
            .cloned()
            .ok_or_else(|| Error::NotFound(format!("no session {id}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv(n: usize) -> String {
        let mut out = crate::data::CSV_HEADER.join(",");
        out.push('\n');
        for i in 0..n {
            let (lat, lon) = if i % 2 == 0 { (34.3, 132.3) } else { (34.4, 133.2) };
            let jitter = (i as f64 * 0.37).sin() * 0.01;
            out.push_str(&format!(
                "{},{},{},{},site{},{},nice view {}\n",
                i + 1,
                lat + jitter,
                lon - jitter,
                10.0 + i as f64,
                i % 2,
                i % 5,
                i % 3
            ));
        }
        out
    }

    #[test]
    fn train_requires_data() {
        let s = Session::new("t");
        assert!(matches!(s.train(GrowthParams::default(), 1), Err(Error::Precondition(_))));
        assert!(matches!(s.rules(), Err(Error::Precondition(_))));
    }

    #[test]
    fn overrides_merge() {
        let o = ParamOverrides { alpha: Some(1.0), ..Default::default() };
        let p = o.apply(GrowthParams::default());
        assert_eq!(p.alpha, 1.0);
        assert_eq!(p.tau1, GrowthParams::default().tau1);
    }

    #[test]
    fn busy_session_rejects_writers() {
        let s = Session::new("t");
        s.upload_data(&csv(20)).unwrap();
        s.busy.store(true, Ordering::Release);
        assert!(matches!(s.train(GrowthParams::default(), 1), Err(Error::Conflict(_))));
        s.busy.store(false, Ordering::Release);
        s.train(GrowthParams::default(), 1).unwrap();
    }

    #[test]
    fn failed_write_leaves_state_untouched() {
        let s = Session::new("t");
        s.upload_data(&csv(20)).unwrap();
        s.train(GrowthParams::default(), 1).unwrap();
        let before = s.state();
        assert!(s.refine("[R][99]", ParamOverrides::default(), 1).is_err());
        assert!(Arc::ptr_eq(&before, &s.state()));
        assert!(!s.is_busy());
    }

    #[test]
    fn snapshot_round_trip_and_replay() {
        let s = Session::new("t");
        s.upload_data(&csv(40)).unwrap();
        s.train(GrowthParams { lambda: 30, ..Default::default() }, 5).unwrap();
        s.refine("[R][00]", ParamOverrides { alpha: Some(0.2), ..Default::default() }, 9).unwrap();
        let bytes = s.export_snapshot().unwrap();
        s.import_snapshot(&bytes).unwrap();
        assert_eq!(s.export_snapshot().unwrap(), bytes);

        let st = s.state();
        let events: Vec<_> = st.audit.iter().filter(|e| !matches!(e, SessionEvent::SnapshotImported { .. })).collect();
        let replayed = replay(st.dataset().unwrap(), events).unwrap().unwrap();
        let again = HierarchySnapshot::new(st.dataset().unwrap(), &replayed).unwrap().to_bytes().unwrap();
        assert_eq!(again, bytes);
    }

    #[test]
    fn snapshot_fingerprint_mismatch() {
        let a = Session::new("a");
        a.upload_data(&csv(20)).unwrap();
        a.train(GrowthParams::default(), 1).unwrap();
        let bytes = a.export_snapshot().unwrap();
        let b = Session::new("b");
        b.upload_data(&csv(21)).unwrap();
        assert!(matches!(b.import_snapshot(&bytes), Err(Error::Fingerprint { .. })));
    }

    #[test]
    fn corpus_changes_features_and_clears_hierarchy() {
        let s = Session::new("t");
        s.upload_data(&csv(10)).unwrap();
        s.train(GrowthParams::default(), 1).unwrap();
        let docs = (0..9)
            .map(|i| CorpusDocumentInput { id: format!("d{i}"), text: format!("view {i} temple") })
            .collect();
        let summary = s.upload_corpus(CorpusUpload { documents: docs, top_l: None }).unwrap();
        assert_eq!(summary.documents, 9);
        let st = s.state();
        assert!(st.hierarchy.is_none());
        assert!(st.tfidf.iter().any(|&(m, _)| m > 0.0));
    }

    #[test]
    fn store_lookup() {
        let store = SessionStore::new();
        let a = store.create();
        let b = store.create();
        assert_ne!(a.id(), b.id());
        assert!(Arc::ptr_eq(&store.get(a.id()).unwrap(), &a));
        assert!(matches!(store.get("nope"), Err(Error::NotFound(_))));
    }
}
