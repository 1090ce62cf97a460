//! C4.5 decision-tree induction over numeric attributes, using hierarchy
//! leaf labels as the class, and conversion of tree paths to filter rules.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{contract, Result};
use crate::filter::{Comparator, Condition, FilterRule};
use crate::hierarchy::Hierarchy;

const EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledInstance {
    pub values: Vec<f64>,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DecisionNode {
    Leaf {
        label: String,
        support: usize,
    },
    /// Instances with `value <= threshold` go left.
    Split {
        attribute: usize,
        name: String,
        threshold: f64,
        left: Box<DecisionNode>,
        right: Box<DecisionNode>,
    },
}

impl DecisionNode {
    pub fn node_count(&self) -> usize {
        match self {
            DecisionNode::Leaf { .. } => 1,
            DecisionNode::Split { left, right, .. } => 1 + left.node_count() + right.node_count(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            DecisionNode::Leaf { .. } => 1,
            DecisionNode::Split { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            DecisionNode::Leaf { .. } => 0,
            DecisionNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn classify(&self, values: &[f64]) -> &str {
        let mut node = self;
        loop {
            match node {
                DecisionNode::Leaf { label, .. } => return label,
                DecisionNode::Split { attribute, threshold, left, right, .. } => {
                    node = if values[*attribute] <= *threshold { left } else { right };
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub attributes: Vec<String>,
    pub min_leaf: usize,
    pub root: DecisionNode,
}

impl DecisionTree {
    pub fn classify(&self, values: &[f64]) -> &str {
        self.root.classify(values)
    }

    pub fn node_count(&self) -> usize {
        self.root.node_count()
    }

    /// Indented printout in the classic decision-tree style.
    pub fn to_text(&self) -> String {
        fn walk(node: &DecisionNode, depth: usize, out: &mut String) {
            let DecisionNode::Split { name, threshold, left, right, .. } = node else {
                return;
            };
            for (op, child) in [("<=", left), (">", right)] {
                out.push_str(&"|   ".repeat(depth));
                let _ = write!(out, "{name} {op} {threshold}");
                match child.as_ref() {
                    DecisionNode::Leaf { label, support } => {
                        let _ = writeln!(out, ": {label} ({support})");
                    }
                    split => {
                        out.push_str(":\n");
                        walk(split, depth + 1, out);
                    }
                }
            }
        }
        let mut out = String::new();
        match &self.root {
            DecisionNode::Leaf { label, support } => {
                let _ = writeln!(out, "{label} ({support})");
            }
            split => walk(split, 0, &mut out),
        }
        out
    }
}

/// Entropy in bits of a class-count vector.
pub fn entropy(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitChoice {
    pub attribute: usize,
    pub threshold: f64,
    pub gain: f64,
    pub gain_ratio: f64,
}

struct Problem<'a> {
    instances: &'a [LabeledInstance],
    classes: Vec<usize>,
    class_names: Vec<&'a str>,
    n_attrs: usize,
    min_leaf: usize,
}

impl<'a> Problem<'a> {
    fn new(attributes: usize, instances: &'a [LabeledInstance], min_leaf: usize) -> Result<Self> {
        if instances.is_empty() {
            return Err(contract("cannot induce a tree from zero instances"));
        }
        if attributes == 0 {
            return Err(contract("need at least one attribute"));
        }
        if min_leaf == 0 {
            return Err(contract("min_leaf must be at least 1"));
        }
        for inst in instances {
            if inst.values.len() != attributes {
                return Err(contract("instance width does not match the attribute list"));
            }
            if inst.values.iter().any(|v| !v.is_finite()) {
                return Err(contract("attribute values must be finite"));
            }
            if inst.label.is_empty() {
                return Err(contract("instance label is empty"));
            }
        }
        let mut names: Vec<&str> = instances.iter().map(|i| i.label.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let classes = instances.iter().map(|i| index[i.label.as_str()]).collect();
        Ok(Problem { instances, classes, class_names: names, n_attrs: attributes, min_leaf })
    }

    fn counts(&self, idx: &[usize]) -> Vec<usize> {
        let mut c = vec![0; self.class_names.len()];
        for &i in idx {
            c[self.classes[i]] += 1;
        }
        c
    }

    fn value(&self, i: usize, a: usize) -> f64 {
        self.instances[i].values[a]
    }

    // Every admissible (attribute, midpoint) split, attribute-major, thresholds ascending.
    fn candidates(&self, idx: &[usize]) -> Vec<SplitChoice> {
        let parent = self.counts(idx);
        let h = entropy(&parent);
        let n = idx.len();
        let mut out = Vec::new();
        let mut sorted = idx.to_vec();
        for a in 0..self.n_attrs {
            sorted.sort_by(|&x, &y| self.value(x, a).total_cmp(&self.value(y, a)).then(x.cmp(&y)));
            let mut left = vec![0; parent.len()];
            for k in 0..n.saturating_sub(1) {
                left[self.classes[sorted[k]]] += 1;
                let (v, next) = (self.value(sorted[k], a), self.value(sorted[k + 1], a));
                let nl = k + 1;
                let nr = n - nl;
                if v == next || nl < self.min_leaf || nr < self.min_leaf {
                    continue;
                }
                let threshold = (v + next) / 2.0;
                if !(v < threshold && threshold < next) {
                    continue;
                }
                let right: Vec<usize> = parent.iter().zip(&left).map(|(p, l)| p - l).collect();
                let (fl, fr) = (nl as f64 / n as f64, nr as f64 / n as f64);
                let gain = h - fl * entropy(&left) - fr * entropy(&right);
                let split_info = entropy(&[nl, nr]);
                out.push(SplitChoice { attribute: a, threshold, gain, gain_ratio: gain / split_info });
            }
        }
        out
    }

    fn best_split(&self, idx: &[usize], allow_lookahead: bool) -> Option<SplitChoice> {
        let cands = self.candidates(idx);
        if cands.is_empty() {
            return None;
        }
        let mean_gain = cands.iter().map(|c| c.gain).sum::<f64>() / cands.len() as f64;
        let mut best: Option<SplitChoice> = None;
        for c in cands.iter().filter(|c| c.gain >= mean_gain - EPS) {
            if best.is_none_or(|b| c.gain_ratio > b.gain_ratio + EPS) {
                best = Some(*c);
            }
        }
        let best = best?;
        if best.gain > EPS {
            return Some(best);
        }
        if !allow_lookahead {
            return None;
        }
        // No split is informative on its own; accept the first one whose two
        // halves can each be split informatively (parity-style structure).
        cands.into_iter().find(|c| {
            let (l, r) = self.partition(idx, c);
            self.best_split(&l, false).is_some() && self.best_split(&r, false).is_some()
        })
    }

    fn partition(&self, idx: &[usize], s: &SplitChoice) -> (Vec<usize>, Vec<usize>) {
        idx.iter().partition(|&&i| self.value(i, s.attribute) <= s.threshold)
    }

    fn majority(&self, counts: &[usize]) -> usize {
        let mut best = 0;
        for (c, &n) in counts.iter().enumerate() {
            if n > counts[best] {
                best = c;
            }
        }
        best
    }

    fn build(&self, idx: Vec<usize>, names: &[String]) -> DecisionNode {
        let counts = self.counts(&idx);
        let leaf = || DecisionNode::Leaf {
            label: self.class_names[self.majority(&counts)].to_string(),
            support: idx.len(),
        };
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || idx.len() < 2 * self.min_leaf {
            return leaf();
        }
        let Some(split) = self.best_split(&idx, true) else {
            return leaf();
        };
        let (l, r) = self.partition(&idx, &split);
        DecisionNode::Split {
            attribute: split.attribute,
            name: names[split.attribute].clone(),
            threshold: split.threshold,
            left: Box::new(self.build(l, names)),
            right: Box::new(self.build(r, names)),
        }
    }
}

/// The split C4.5 would choose for the whole instance list, if any.
pub fn best_split(attributes: &[String], instances: &[LabeledInstance], min_leaf: usize) -> Result<Option<SplitChoice>> {
    let p = Problem::new(attributes.len(), instances, min_leaf)?;
    let idx: Vec<usize> = (0..instances.len()).collect();
    let counts = p.counts(&idx);
    if counts.iter().filter(|&&c| c > 0).count() <= 1 {
        return Ok(None);
    }
    Ok(p.best_split(&idx, true))
}

/// Grows an unpruned tree. `min_leaf` bounds the size of each branch of a split.
pub fn induce(attributes: &[String], instances: &[LabeledInstance], min_leaf: usize) -> Result<DecisionTree> {
    let p = Problem::new(attributes.len(), instances, min_leaf)?;
    let root = p.build((0..instances.len()).collect(), attributes);
    Ok(DecisionTree { attributes: attributes.to_vec(), min_leaf, root })
}

/// Raw attribute rows labeled with each sample's leaf path in the hierarchy.
pub fn instances_from_hierarchy(dataset: &Dataset, hierarchy: &Hierarchy) -> Result<Vec<LabeledInstance>> {
    if dataset.len() != hierarchy.dataset_size() {
        return Err(contract("hierarchy was grown on a different dataset"));
    }
    Ok(hierarchy
        .leaf_assignments()
        .into_iter()
        .zip(dataset.raw())
        .map(|(path, row)| LabeledInstance { values: row.clone(), label: path.to_string() })
        .collect())
}

/// One rule per root-to-leaf path, with same-attribute tests collapsed to the
/// tightest interval.
pub fn extract_rules(tree: &DecisionTree) -> Vec<FilterRule> {
    // (lower bound exclusive, upper bound inclusive) per attribute, in first-seen order.
    type Bounds = Vec<(usize, Option<f64>, Option<f64>)>;

    fn walk(node: &DecisionNode, names: &[String], bounds: &mut Bounds, out: &mut Vec<FilterRule>) {
        match node {
            DecisionNode::Leaf { label, .. } => {
                let mut antecedent = Vec::new();
                for &(a, lo, hi) in bounds.iter() {
                    if let Some(lo) = lo {
                        antecedent.push(Condition::new(names[a].clone(), Comparator::Gt, lo));
                    }
                    if let Some(hi) = hi {
                        antecedent.push(Condition::new(names[a].clone(), Comparator::Le, hi));
                    }
                }
                out.push(FilterRule { antecedent, consequent: label.clone() });
            }
            DecisionNode::Split { attribute, threshold, left, right, .. } => {
                for (upper, child) in [(true, left), (false, right)] {
                    let saved = bounds.clone();
                    let pos = match bounds.iter().position(|b| b.0 == *attribute) {
                        Some(p) => p,
                        None => {
                            bounds.push((*attribute, None, None));
                            bounds.len() - 1
                        }
                    };
                    let entry = &mut bounds[pos];
                    if upper {
                        entry.2 = Some(entry.2.map_or(*threshold, |h| h.min(*threshold)));
                    } else {
                        entry.1 = Some(entry.1.map_or(*threshold, |l| l.max(*threshold)));
                    }
                    walk(child, names, bounds, out);
                    *bounds = saved;
                }
            }
        }
    }

    let mut out = Vec::new();
    walk(&tree.root, &tree.attributes, &mut Vec::new(), &mut out);
    out
}
