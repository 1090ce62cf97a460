//! Filter rules over record attributes, and emission of accepted messages
//! with the campaign hashtag to a pluggable sink.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Attribute, RecordAttributes, TouristRecord};
use crate::error::{Error, Result};

pub const HASHTAG: &str = "#KankouMap";
pub const MAX_MESSAGE_CHARS: usize = 140;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<=", alias = "≤")]
    Le,
    #[serde(rename = ">=", alias = "≥")]
    Ge,
}

impl Comparator {
    pub fn holds(self, x: f64, threshold: f64) -> bool {
        match self {
            Comparator::Lt => x < threshold,
            Comparator::Gt => x > threshold,
            Comparator::Le => x <= threshold,
            Comparator::Ge => x >= threshold,
        }
    }

    /// Whether the comparator bounds the attribute from below.
    pub fn is_lower_bound(self) -> bool {
        matches!(self, Comparator::Gt | Comparator::Ge)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Lt => "<",
            Comparator::Gt => ">",
            Comparator::Le => "<=",
            Comparator::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub attr: String,
    pub op: Comparator,
    pub value: f64,
}

impl Condition {
    pub fn new(attr: impl Into<String>, op: Comparator, value: f64) -> Self {
        Condition { attr: attr.into(), op, value }
    }
}

/// Conjunctive rule: when every condition holds, the record belongs to `consequent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterRule {
    #[serde(rename = "if")]
    pub antecedent: Vec<Condition>,
    #[serde(rename = "then")]
    pub consequent: String,
}

impl FilterRule {
    /// At most one lower and one upper bound per attribute, with lower < upper.
    pub fn validate(&self) -> Result<()> {
        let mut seen: Vec<(&str, Option<f64>, Option<f64>)> = Vec::new();
        for c in &self.antecedent {
            if !c.value.is_finite() {
                return Err(Error::Config(format!("threshold for `{}` is not finite", c.attr)));
            }
            let entry = match seen.iter_mut().find(|(a, _, _)| *a == c.attr) {
                Some(e) => e,
                None => {
                    seen.push((&c.attr, None, None));
                    seen.last_mut().expect("just pushed")
                }
            };
            let slot = if c.op.is_lower_bound() { &mut entry.1 } else { &mut entry.2 };
            if slot.replace(c.value).is_some() {
                return Err(Error::Config(format!("`{}` has two bounds on the same side", c.attr)));
            }
        }
        for (attr, lo, hi) in seen {
            if let (Some(lo), Some(hi)) = (lo, hi) {
                if lo >= hi {
                    return Err(Error::Config(format!("`{attr}` bounds are empty: {lo} >= {hi}")));
                }
            }
        }
        Ok(())
    }

    /// Evaluates the antecedent; attributes the lookup cannot supply fail the rule.
    pub fn matches_with(&self, lookup: impl Fn(&str) -> Option<f64>) -> bool {
        self.antecedent.iter().all(|c| lookup(&c.attr).is_some_and(|x| c.op.holds(x, c.value)))
    }
}

impl fmt::Display for FilterRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("IF ")?;
        if self.antecedent.is_empty() {
            f.write_str("true")?;
        }
        for (i, c) in self.antecedent.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "`{}' {} {}", c.attr, c.op.symbol(), c.value)?;
        }
        write!(f, " THEN Area is `{}'.", self.consequent)
    }
}

/// Reads the JSON rule file format: `[{"if": [{"attr", "op", "value"}...], "then": area}]`.
pub fn parse_rule_file(json: &str) -> Result<Vec<FilterRule>> {
    Ok(serde_json::from_str(json)?)
}

/// Rules with attribute names resolved, ready to evaluate against records.
#[derive(Debug, Clone)]
pub struct RuleSet {
    rules: Vec<FilterRule>,
    resolved: Vec<Vec<(Attribute, Comparator, f64)>>,
}

impl RuleSet {
    /// Resolves attribute names. The bare name `tfidf` maps to `tfidf_alias`.
    pub fn compile(rules: Vec<FilterRule>, tfidf_alias: Attribute) -> Result<Self> {
        let mut resolved = Vec::with_capacity(rules.len());
        for rule in &rules {
            rule.validate()?;
            let conds = rule
                .antecedent
                .iter()
                .map(|c| {
                    let attr = match c.attr.as_str() {
                        "tfidf" => Some(tfidf_alias),
                        name => Attribute::parse(name),
                    };
                    attr.map(|a| (a, c.op, c.value))
                        .ok_or_else(|| Error::Config(format!("unknown attribute `{}`", c.attr)))
                })
                .collect::<Result<Vec<_>>>()?;
            resolved.push(conds);
        }
        Ok(RuleSet { rules, resolved })
    }

    pub fn rules(&self) -> &[FilterRule] {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Consequent of the first rule whose antecedent holds.
    pub fn evaluate(&self, attrs: &RecordAttributes) -> Option<&str> {
        self.resolved
            .iter()
            .position(|conds| conds.iter().all(|&(a, op, t)| op.holds(attrs.get(a), t)))
            .map(|i| self.rules[i].consequent.as_str())
    }
}

pub fn evaluate<'a>(rules: &'a RuleSet, record: &RecordAttributes) -> Option<&'a str> {
    rules.evaluate(record)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutgoingMessage {
    pub record_id: u64,
    pub area: String,
    pub text: String,
}

/// Comment plus hashtag, truncating the comment so the text fits the length limit.
pub fn format_message(record: &TouristRecord, area: &str) -> OutgoingMessage {
    let budget = MAX_MESSAGE_CHARS - HASHTAG.chars().count() - 1;
    let comment: String = record.comment.trim().chars().take(budget).collect();
    let comment = comment.trim_end();
    let text = if comment.is_empty() { HASHTAG.to_string() } else { format!("{comment} {HASHTAG}") };
    OutgoingMessage { record_id: record.id, area: area.to_string(), text }
}

/// Failed delivery; carries the message so the caller can retry.
#[derive(Debug, Error)]
#[error("delivery of message for record {} failed: {reason}", .message.record_id)]
pub struct DeliveryError {
    pub message: OutgoingMessage,
    pub reason: String,
}

pub trait MessageSink {
    fn deliver(&mut self, message: &OutgoingMessage) -> std::result::Result<(), String>;
}

/// Formats and delivers one message, exactly once.
pub fn emit(
    record: &TouristRecord,
    area: &str,
    sink: &mut dyn MessageSink,
) -> std::result::Result<OutgoingMessage, DeliveryError> {
    let message = format_message(record, area);
    match sink.deliver(&message) {
        Ok(()) => Ok(message),
        Err(reason) => Err(DeliveryError { message, reason }),
    }
}

/// Prints each message text on its own line.
#[derive(Debug, Default)]
pub struct StdoutSink;

impl MessageSink for StdoutSink {
    fn deliver(&mut self, message: &OutgoingMessage) -> std::result::Result<(), String> {
        let mut out = std::io::stdout().lock();
        writeln!(out, "{}", message.text).map_err(|e| e.to_string())
    }
}

/// Writes one `{"record_id", "area", "text"}` JSON object per line.
pub struct JsonLinesSink<W: Write> {
    writer: W,
}

impl<W: Write> JsonLinesSink<W> {
    pub fn new(writer: W) -> Self {
        JsonLinesSink { writer }
    }

    pub fn into_inner(self) -> W {
        self.writer
    }
}

impl<W: Write> MessageSink for JsonLinesSink<W> {
    fn deliver(&mut self, message: &OutgoingMessage) -> std::result::Result<(), String> {
        let line = serde_json::to_string(message).map_err(|e| e.to_string())?;
        writeln!(self.writer, "{line}").and_then(|_| self.writer.flush()).map_err(|e| e.to_string())
    }
}

/// Collects messages in memory.
#[derive(Debug, Default)]
pub struct MemorySink {
    pub messages: Vec<OutgoingMessage>,
}

impl MessageSink for MemorySink {
    fn deliver(&mut self, message: &OutgoingMessage) -> std::result::Result<(), String> {
        self.messages.push(message.clone());
        Ok(())
    }
}
