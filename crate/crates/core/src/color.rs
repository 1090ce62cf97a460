//! Unit coloring: project weights on the top three principal components of
//! the data, scale each projection into a color channel, and compute hue.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{contract, Result};
use crate::som::SampleSource;

/// Relative eigenvalue below which a component counts as absent.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaBasis {
    pub mean: Vec<f64>,
    /// Unit vectors, descending eigenvalue order. Zero vectors when the data
    /// has fewer than three dimensions.
    pub components: [Vec<f64>; 3],
    pub eigenvalues: [f64; 3],
    /// Fewer than three informative directions were found.
    pub degenerate: bool,
}

impl PcaBasis {
    pub fn project(&self, x: &[f64]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.iter().zip(x).zip(&self.mean).map(|((c, x), m)| c * (x - m)).sum();
        }
        out
    }
}

/// Principal components of the population covariance of `data`.
pub fn fit_pca<S: SampleSource + ?Sized>(data: &S) -> Result<PcaBasis> {
    let (n, d) = (data.len(), data.dim());
    if n == 0 || d == 0 {
        return Err(contract("PCA needs at least one sample and one dimension"));
    }
    let mut mean = vec![0.0; d];
    for i in 0..n {
        for (m, v) in mean.iter_mut().zip(data.sample(i)) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let mut cov = DMatrix::<f64>::zeros(d, d);
    for i in 0..n {
        let x = data.sample(i);
        for a in 0..d {
            let da = x[a] - mean[a];
            for b in a..d {
                cov[(a, b)] += da * (x[b] - mean[b]);
            }
        }
    }
    for a in 0..d {
        for b in a..d {
            let v = cov[(a, b)] / n as f64;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));

    let top = eig.eigenvalues[order[0]].max(0.0);
    let mut components: [Vec<f64>; 3] = Default::default();
    let mut eigenvalues = [0.0; 3];
    let mut degenerate = d < 3;
    for k in 0..3 {
        let Some(&idx) = order.get(k) else {
            components[k] = vec![0.0; d];
            continue;
        };
        let lambda = eig.eigenvalues[idx].max(0.0);
        if lambda <= RANK_TOL * top.max(1.0) {
            degenerate = true;
        }
        eigenvalues[k] = lambda;
        let mut v: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        // Fix the sign so the largest entry is positive.
        let pivot = v.iter().copied().fold(0.0_f64, |a, b| if b.abs() > a.abs() { b } else { a });
        if pivot < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        components[k] = v;
    }
    Ok(PcaBasis { mean, components, eigenvalues, degenerate })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RgbColor {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl RgbColor {
    pub fn new(r: u8, g: u8, b: u8) -> Self {
        RgbColor { r, g, b }
    }
}

impl fmt::Display for RgbColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02x}{:02x}{:02x}", self.r, self.g, self.b)
    }
}

impl std::str::FromStr for RgbColor {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || contract(format!("not a #rrggbb color: {s}"));
        let hex = s.strip_prefix('#').filter(|h| h.len() == 6 && h.is_ascii()).ok_or_else(bad)?;
        let ch = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).map_err(|_| bad());
        Ok(RgbColor { r: ch(0)?, g: ch(2)?, b: ch(4)? })
    }
}

impl Serialize for RgbColor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RgbColor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Per-component (min, max) of the projections of `weights`.
pub fn channel_ranges<'a>(weights: impl IntoIterator<Item = &'a [f64]>, basis: &PcaBasis) -> [(f64, f64); 3] {
    let mut out = [(f64::INFINITY, f64::NEG_INFINITY); 3];
    for w in weights {
        for (r, p) in out.iter_mut().zip(basis.project(w)) {
            r.0 = r.0.min(p);
            r.1 = r.1.max(p);
        }
    }
    out
}

fn scale_channel(p: f64, (lo, hi): (f64, f64)) -> u8 {
    if !(hi > lo) {
        return 128;
    }
    let t = ((p - lo) / (hi - lo)).clamp(0.0, 1.0);
    (t * 255.0 + 0.5).floor() as u8
}

pub fn unit_color(weight: &[f64], basis: &PcaBasis, ranges: &[(f64, f64); 3]) -> RgbColor {
    let p = basis.project(weight);
    RgbColor {
        r: scale_channel(p[0], ranges[0]),
        g: scale_channel(p[1], ranges[1]),
        b: scale_channel(p[2], ranges[2]),
    }
}

/// Hue angle in degrees, in `[0, 360)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct HueAngle(pub f64);

impl HueAngle {
    pub fn degrees(self) -> f64 {
        self.0
    }
}

/// `atan2(sqrt(3)(G - B), 2R - G - B)`; gray maps to 0.
pub fn hue(c: RgbColor) -> HueAngle {
    let (r, g, b) = (c.r as f64, c.g as f64, c.b as f64);
    if c.r == c.g && c.g == c.b {
        return HueAngle(0.0);
    }
    let deg = (3f64.sqrt() * (g - b)).atan2(2.0 * r - g - b).to_degrees();
    let deg = deg.rem_euclid(360.0);
    HueAngle(if deg >= 360.0 { 0.0 } else { deg })
}
