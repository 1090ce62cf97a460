//! Headless pipeline: train, extract rules and filter, writing every artifact
//! to an output directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::data::export_kml;
use crate::error::Result;
use crate::filter::{parse_rule_file, JsonLinesSink, MessageSink};
use crate::hierarchy::GrowthParams;
use crate::session::{CorpusUpload, FilterRequest, Session};
use crate::text::{load_corpus_dir, TopLConfig};

#[derive(Debug, Clone)]
pub struct BatchOptions {
    pub data: PathBuf,
    /// Directory of `*.txt` documents, or a JSON corpus upload.
    pub corpus: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub params: GrowthParams,
    pub top_l: TopLConfig,
    /// Hand-written rule file used for filtering instead of the tree rules.
    pub rules: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BatchSummary {
    pub records: usize,
    pub depth: usize,
    pub leaves: usize,
    pub rules: usize,
    pub messages: usize,
}

pub const OUTPUT_FILES: [&str; 8] = [
    "hierarchy.json",
    "snapshot.json",
    "tree.txt",
    "rules.json",
    "rules.txt",
    "messages.jsonl",
    "records.kml",
    "audit.json",
];

pub fn run(opts: &BatchOptions) -> Result<BatchSummary> {
    let session = Session::new("batch");
    session.upload_data(&fs::read_to_string(&opts.data)?)?;
    if let Some(corpus) = &opts.corpus {
        load_corpus(&session, corpus, opts.top_l)?;
    }
    let summary = session.train(opts.params, opts.seed)?;
    let rules = session.rules()?;

    let state = session.state();
    let filter_rules = match &opts.rules {
        Some(p) => Some(parse_rule_file(&fs::read_to_string(p)?)?),
        None => None,
    };
    let report = session.filter(FilterRequest {
        records: state.records.clone(),
        rules: filter_rules,
        tfidf_alias: crate::data::Attribute::TfidfSum,
    })?;

    let out = &opts.out;
    fs::create_dir_all(out)?;
    write_json(&out.join("hierarchy.json"), &summary)?;
    fs::write(out.join("snapshot.json"), session.export_snapshot()?)?;
    fs::write(out.join("tree.txt"), &rules.tree_text)?;
    write_json(&out.join("rules.json"), &rules.rules)?;
    fs::write(out.join("rules.txt"), rules.rule_text.join("\n") + "\n")?;
    let mut sink = JsonLinesSink::new(fs::File::create(out.join("messages.jsonl"))?);
    for m in &report.messages {
        sink.deliver(m).map_err(|reason| crate::filter::DeliveryError { message: m.clone(), reason })?;
    }
    fs::write(out.join("records.kml"), export_kml(&state.records))?;
    write_json(&out.join("audit.json"), &session.audit())?;

    Ok(BatchSummary {
        records: state.records.len(),
        depth: summary.depth,
        leaves: summary.leaf_count,
        rules: rules.rules.len(),
        messages: report.messages.len(),
    })
}

fn load_corpus(session: &Session, path: &Path, top_l: TopLConfig) -> Result<()> {
    if path.is_dir() {
        session.set_corpus(load_corpus_dir(path)?, top_l)?;
    } else {
        let mut upload: CorpusUpload = serde_json::from_str(&fs::read_to_string(path)?)?;
        upload.top_l.get_or_insert(top_l);
        session.upload_corpus(upload)?;
    }
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    fs::write(path, bytes)?;
    Ok(())
}
