//! A single rectangular self-organizing map: online training, best-matching
//! unit search, quantization errors and error-driven row/column insertion.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{contract, Result};

/// Read access to feature rows by sample index.
pub trait SampleSource {
    fn sample(&self, index: usize) -> &[f64];
    fn dim(&self) -> usize;
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl SampleSource for Dataset {
    fn sample(&self, index: usize) -> &[f64] {
        Dataset::sample(self, index)
    }

    fn dim(&self) -> usize {
        Dataset::dim(self)
    }

    fn len(&self) -> usize {
        Dataset::len(self)
    }
}

impl SampleSource for [Vec<f64>] {
    fn sample(&self, index: usize) -> &[f64] {
        &self[index]
    }

    fn dim(&self) -> usize {
        self.first().map_or(0, Vec::len)
    }

    fn len(&self) -> usize {
        <[Vec<f64>]>::len(self)
    }
}

impl SampleSource for Vec<Vec<f64>> {
    fn sample(&self, index: usize) -> &[f64] {
        &self[index]
    }

    fn dim(&self) -> usize {
        self.as_slice().dim()
    }

    fn len(&self) -> usize {
        Vec::len(self)
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Training schedule for one map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub initial_learning_rate: f64,
    pub initial_radius: f64,
    pub rng_seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { epochs: 100, initial_learning_rate: 0.5, initial_radius: 1.0, rng_seed: 0 }
    }
}

impl TrainConfig {
    pub const FINAL_LEARNING_RATE: f64 = 0.01;
    pub const FINAL_RADIUS: f64 = 0.5;

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(contract("epochs must be positive"));
        }
        if !(self.initial_learning_rate > 0.0 && self.initial_learning_rate <= 1.0) {
            return Err(contract("initial learning rate must lie in (0, 1]"));
        }
        if !(self.initial_radius >= 0.5) {
            return Err(contract("initial radius must be at least 0.5"));
        }
        Ok(())
    }

    /// Learning rate and radius for `epoch`, decaying linearly to the final values.
    pub fn schedule(&self, epoch: usize) -> (f64, f64) {
        let t = if self.epochs > 1 { epoch as f64 / (self.epochs - 1) as f64 } else { 0.0 };
        let lr = self.initial_learning_rate + (Self::FINAL_LEARNING_RATE - self.initial_learning_rate) * t;
        let radius = self.initial_radius + (Self::FINAL_RADIUS - self.initial_radius) * t;
        (lr, radius)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unit {
    pub row: usize,
    pub col: usize,
    #[serde(with = "crate::exact::vec")]
    pub weight: Vec<f64>,
    /// Sample indices whose best-matching unit is this one.
    pub mapped: Vec<usize>,
    /// Sum of distances from `weight` to the mapped samples.
    #[serde(with = "crate::exact::scalar")]
    pub qe: f64,
}

impl Unit {
    pub fn n(&self) -> usize {
        self.mapped.len()
    }
}

/// Where a row or column was inserted: between index `after` and `after + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "after")]
pub enum Insertion {
    Row(usize),
    Column(usize),
}

/// Upper bounds on grid size honored by insertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridLimits {
    pub max_rows: usize,
    pub max_cols: usize,
}

impl GridLimits {
    pub const UNBOUNDED: GridLimits = GridLimits { max_rows: usize::MAX, max_cols: usize::MAX };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SomMap {
    rows: usize,
    cols: usize,
    dim: usize,
    /// Row-major.
    units: Vec<Unit>,
    /// False after an insertion until the next training pass.
    assigned: bool,
}

impl SomMap {
    /// Builds a map from row-major weight vectors.
    pub fn from_weights(rows: usize, cols: usize, weights: Vec<Vec<f64>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(contract("map needs at least one row and one column"));
        }
        if weights.len() != rows * cols {
            return Err(contract(format!("{} weights for a {rows}x{cols} map", weights.len())));
        }
        let dim = weights[0].len();
        if weights.iter().any(|w| w.len() != dim) {
            return Err(contract("weight vectors differ in length"));
        }
        let units = weights
            .into_iter()
            .enumerate()
            .map(|(i, weight)| Unit { row: i / cols, col: i % cols, weight, mapped: Vec::new(), qe: 0.0 })
            .collect();
        Ok(SomMap { rows, cols, dim, units, assigned: false })
    }

    /// Initializes weights with samples drawn from `scope`, without replacement
    /// when the scope is large enough.
    pub fn init_from_samples<S: SampleSource + ?Sized>(
        rows: usize,
        cols: usize,
        data: &S,
        scope: &[usize],
        seed: u64,
    ) -> Result<Self> {
        if scope.is_empty() {
            return Err(contract("cannot initialize a map from zero samples"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_units = rows * cols;
        let picks: Vec<usize> = if scope.len() >= n_units {
            scope.choose_multiple(&mut rng, n_units).copied().collect()
        } else {
            (0..n_units).map(|_| scope[rng.random_range(0..scope.len())]).collect()
        };
        Self::from_weights(rows, cols, picks.into_iter().map(|i| data.sample(i).to_vec()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    pub fn unit(&self, row: usize, col: usize) -> Option<&Unit> {
        (row < self.rows && col < self.cols).then(|| &self.units[row * self.cols + col])
    }

    pub fn index_of(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub fn is_assigned(&self) -> bool {
        self.assigned
    }

    /// Best-matching unit as `(row, col)`; ties go to the earliest unit in row-major order.
    pub fn bmu(&self, x: &[f64]) -> Result<(usize, usize)> {
        if x.len() != self.dim {
            return Err(contract(format!("sample has {} values, map expects {}", x.len(), self.dim)));
        }
        let u = &self.units[self.bmu_index(x)];
        Ok((u.row, u.col))
    }

    fn bmu_index(&self, x: &[f64]) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, u) in self.units.iter().enumerate() {
            let d = squared_distance(&u.weight, x);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Online training over `scope`, then assignment of every sample to its BMU.
    pub fn train<S: SampleSource + ?Sized>(&mut self, data: &S, scope: &[usize], cfg: &TrainConfig) -> Result<()> {
        self.train_with(data, scope, cfg, |_, _| {})
    }

    /// As [`SomMap::train`], calling `on_epoch(epoch, map)` after each epoch's updates.
    pub fn train_with<S, F>(&mut self, data: &S, scope: &[usize], cfg: &TrainConfig, mut on_epoch: F) -> Result<()>
    where
        S: SampleSource + ?Sized,
        F: FnMut(usize, &SomMap),
    {
        cfg.validate()?;
        if scope.is_empty() {
            return Err(contract("cannot train on an empty sample set"));
        }
        if data.dim() != self.dim {
            return Err(contract(format!("data has {} attributes, map expects {}", data.dim(), self.dim)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        let mut order = scope.to_vec();
        for epoch in 0..cfg.epochs {
            let (lr, radius) = cfg.schedule(epoch);
            let denom = 2.0 * radius * radius;
            order.shuffle(&mut rng);
            for &i in &order {
                let x = data.sample(i);
                let b = self.bmu_index(x);
                let (br, bc) = (self.units[b].row as f64, self.units[b].col as f64);
                for u in &mut self.units {
                    let dr = u.row as f64 - br;
                    let dc = u.col as f64 - bc;
                    let h = (-(dr * dr + dc * dc) / denom).exp();
                    let step = lr * h;
                    for (w, &xv) in u.weight.iter_mut().zip(x) {
                        *w += step * (xv - *w);
                    }
                }
            }
            on_epoch(epoch, self);
        }
        self.assign(data, scope);
        Ok(())
    }

    /// Maps every sample in `scope` to its BMU and recomputes all quantization errors.
    pub fn assign<S: SampleSource + ?Sized>(&mut self, data: &S, scope: &[usize]) {
        for u in &mut self.units {
            u.mapped.clear();
            u.qe = 0.0;
        }
        for &i in scope {
            let x = data.sample(i);
            let b = self.bmu_index(x);
            let u = &mut self.units[b];
            u.qe += euclidean(&u.weight, x);
            u.mapped.push(i);
        }
        self.assigned = true;
    }

    /// Quantization error of every unit recomputed from scratch.
    pub fn recomputed_qe<S: SampleSource + ?Sized>(&self, data: &S) -> Vec<f64> {
        self.units
            .iter()
            .map(|u| u.mapped.iter().map(|&i| euclidean(&u.weight, data.sample(i))).sum())
            .collect()
    }

    /// Row-major indices of units with at least one mapped sample.
    pub fn winner_set(&self) -> Vec<usize> {
        (0..self.units.len()).filter(|&i| !self.units[i].mapped.is_empty()).collect()
    }

    /// Mean quantization error over the winner set (0 when nothing is mapped).
    pub fn mqe(&self) -> f64 {
        let winners: Vec<f64> = self.units.iter().filter(|u| !u.mapped.is_empty()).map(|u| u.qe).collect();
        if winners.is_empty() {
            0.0
        } else {
            winners.iter().sum::<f64>() / winners.len() as f64
        }
    }

    pub fn mapped_total(&self) -> usize {
        self.units.iter().map(Unit::n).sum()
    }

    /// Unit with the largest quantization error, first in row-major order on ties.
    pub fn error_unit(&self) -> Result<usize> {
        if !self.assigned || self.mapped_total() == 0 {
            return Err(contract("map has no assigned samples"));
        }
        let mut best = 0;
        for (i, u) in self.units.iter().enumerate() {
            if u.qe > self.units[best].qe {
                best = i;
            }
        }
        Ok(best)
    }

    /// Grows the map by one row or column next to the highest-error unit.
    pub fn insert_row_or_col(&mut self) -> Result<Insertion> {
        let e = self.error_unit()?;
        self.insert_near(e, GridLimits::UNBOUNDED)?
            .ok_or_else(|| contract("error unit has no grid neighbor"))
    }

    /// Inserts a row or column between unit `e` and its most dissimilar
    /// 4-neighbor among those the limits allow. Returns `None` when no
    /// neighbor qualifies. Sample assignments are cleared.
    pub fn insert_near(&mut self, e: usize, limits: GridLimits) -> Result<Option<Insertion>> {
        if !self.assigned || self.mapped_total() == 0 {
            return Err(contract("map has no assigned samples"));
        }
        let (er, ec) = (self.units[e].row, self.units[e].col);
        let mut candidates = Vec::with_capacity(4);
        if er > 0 {
            candidates.push((er - 1, ec));
        }
        if ec > 0 {
            candidates.push((er, ec - 1));
        }
        if ec + 1 < self.cols {
            candidates.push((er, ec + 1));
        }
        if er + 1 < self.rows {
            candidates.push((er + 1, ec));
        }
        let can_add_row = self.rows < limits.max_rows;
        let can_add_col = self.cols < limits.max_cols;
        let mut best: Option<((usize, usize), f64)> = None;
        for (r, c) in candidates {
            let allowed = if r != er { can_add_row } else { can_add_col };
            if !allowed {
                continue;
            }
            let d = euclidean(&self.units[e].weight, &self.units[self.index_of(r, c)].weight);
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some(((r, c), d));
            }
        }
        let Some(((dr, dc), _)) = best else {
            return Ok(None);
        };
        let insertion = if dr != er { Insertion::Row(er.min(dr)) } else { Insertion::Column(ec.min(dc)) };
        self.apply_insertion(insertion);
        Ok(Some(insertion))
    }

    fn apply_insertion(&mut self, insertion: Insertion) {
        let (rows, cols) = match insertion {
            Insertion::Row(_) => (self.rows + 1, self.cols),
            Insertion::Column(_) => (self.rows, self.cols + 1),
        };
        let mut weights = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let w = match insertion {
                    Insertion::Row(a) if r == a + 1 => mean(self.weight(a, c), self.weight(a + 1, c)),
                    Insertion::Row(a) => self.weight(if r > a + 1 { r - 1 } else { r }, c).to_vec(),
                    Insertion::Column(a) if c == a + 1 => mean(self.weight(r, a), self.weight(r, a + 1)),
                    Insertion::Column(a) => self.weight(r, if c > a + 1 { c - 1 } else { c }).to_vec(),
                };
                weights.push(w);
            }
        }
        *self = SomMap::from_weights(rows, cols, weights).expect("insertion keeps the grid consistent");
    }

    fn weight(&self, row: usize, col: usize) -> &[f64] {
        &self.units[self.index_of(row, col)].weight
    }
}

fn mean(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| (x + y) / 2.0).collect()
}
