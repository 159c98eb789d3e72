//! Rubric ratings from humans and models, and agreement between two raters.

use std::collections::HashMap;
use std::io;

use logichint_prompt::{Dimension, RubricScores};
use rand::seq::index;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stats::{bonferroni_threshold, qwk, spearman, StatsError};

pub const SCALE_MIN: u8 = 1;
pub const SCALE_MAX: u8 = 4;
/// Family-wise alpha before the per-dimension correction.
pub const ALPHA: f64 = 0.05;

/// One rater's scores for one item. CSV column order follows the fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RubricScore {
    pub item: String,
    pub rater: String,
    pub consistency: u8,
    pub clarity: u8,
    pub justification: u8,
    pub subgoaling: u8,
}

impl RubricScore {
    pub fn new(item: impl Into<String>, rater: impl Into<String>, s: RubricScores) -> Self {
        RubricScore {
            item: item.into(),
            rater: rater.into(),
            consistency: s.consistency,
            clarity: s.clarity,
            justification: s.justification,
            subgoaling: s.subgoaling,
        }
    }

    pub fn scores(&self) -> RubricScores {
        RubricScores {
            consistency: self.consistency,
            clarity: self.clarity,
            justification: self.justification,
            subgoaling: self.subgoaling,
        }
    }
}

#[derive(Debug, Error)]
pub enum RatingsError {
    #[error("ratings csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}: {dimension} score {value} is outside {SCALE_MIN}..={SCALE_MAX}")]
    OutOfRange { row: usize, dimension: &'static str, value: u8 },
    #[error("row {row}: item `{item}` already rated by `{rater}`")]
    Duplicate { row: usize, item: String, rater: String },
    #[error("raters share {0} items; need at least 2")]
    TooFewShared(usize),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Reads ratings with header `item,rater,consistency,clarity,justification,subgoaling`.
/// Rows are numbered from 1 after the header.
pub fn read_ratings<R: io::Read>(reader: R) -> Result<Vec<RubricScore>, RatingsError> {
    let mut out: Vec<RubricScore> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, row) in csv::Reader::from_reader(reader).deserialize().enumerate() {
        let score: RubricScore = row?;
        let row = i + 1;
        if let Some(d) = score.scores().out_of_range(SCALE_MIN, SCALE_MAX) {
            return Err(RatingsError::OutOfRange { row, dimension: d.as_str(), value: score.scores().get(d) });
        }
        if !seen.insert((score.item.clone(), score.rater.clone())) {
            return Err(RatingsError::Duplicate { row, item: score.item, rater: score.rater });
        }
        out.push(score);
    }
    Ok(out)
}

pub fn write_ratings<W: io::Write>(writer: W, scores: &[RubricScore]) -> Result<(), RatingsError> {
    let mut w = csv::Writer::from_writer(writer);
    for s in scores {
        w.serialize(s)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementStats {
    pub dimension: Dimension,
    pub n: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    pub spearman_rho: Option<f64>,
    pub p_value: Option<f64>,
    pub p_approximate: bool,
    pub qwk: Option<f64>,
    /// `p_value` below the corrected threshold; `None` when p is undefined.
    pub significant: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Agreement {
    pub n: usize,
    /// Items rated by only one of the two raters.
    pub unmatched: usize,
    pub threshold: f64,
    pub dimensions: Vec<AgreementStats>,
}

/// Agreement per rubric dimension between two raters, joined on item id in
/// the order of `a`.
pub fn agreement(a: &[RubricScore], b: &[RubricScore]) -> Result<Agreement, RatingsError> {
    let by_item: HashMap<&str, &RubricScore> = b.iter().map(|s| (s.item.as_str(), s)).collect();
    let pairs: Vec<(RubricScores, RubricScores)> = a
        .iter()
        .filter_map(|s| by_item.get(s.item.as_str()).map(|t| (s.scores(), t.scores())))
        .collect();
    let n = pairs.len();
    if n < 2 {
        return Err(RatingsError::TooFewShared(n));
    }
    let threshold = bonferroni_threshold(ALPHA, Dimension::ALL.len());
    let mut dimensions = Vec::with_capacity(Dimension::ALL.len());
    for d in Dimension::ALL {
        let x: Vec<u8> = pairs.iter().map(|(s, _)| s.get(d)).collect();
        let y: Vec<u8> = pairs.iter().map(|(_, t)| t.get(d)).collect();
        let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
        let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
        let c = spearman(&xf, &yf)?;
        dimensions.push(AgreementStats {
            dimension: d,
            n,
            mean_a: xf.iter().sum::<f64>() / n as f64,
            mean_b: yf.iter().sum::<f64>() / n as f64,
            spearman_rho: c.rho,
            p_value: c.p_value,
            p_approximate: c.approximate,
            qwk: qwk(&x, &y, SCALE_MAX)?,
            significant: c.p_value.map(|p| p < threshold),
        });
    }
    Ok(Agreement { n, unmatched: a.len() + b.len() - 2 * n, threshold, dimensions })
}

/// Default share of generated items sent to human raters.
pub const RATING_FRACTION: f64 = 0.2;

/// A seeded sample of `fraction` of `ids` (rounded, at least one when
/// `ids` is nonempty), kept in input order.
pub fn sample_for_rating(ids: &[String], fraction: f64, seed: u64) -> Vec<String> {
    let n = ids.len();
    if n == 0 || fraction <= 0.0 {
        return Vec::new();
    }
    let amount = ((n as f64 * fraction).round() as usize).clamp(1, n);
    let mut picked = index::sample(&mut logichint_core::random::rng(seed), n, amount).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| ids[i].clone()).collect()
}
