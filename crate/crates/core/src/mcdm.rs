//! AHP criterion weights and model ranking.
//!
//! Three scorers are provided side by side and tagged in the report:
//!
//! - [`score_row_sum`]: plain sum of the (already weighted) criterion values.
//! - [`score_range_ratio`]: `C_i = sum_j w_j (d-_j - d_ij) / (d-_j - d+_j)` with given `d+`, `d-`.
//! - [`score_standard_topsis`]: vector-normalized TOPSIS closeness `D- / (D+ + D-)`.
//!
//! All criteria are treated as benefit criteria (larger is better).

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Saaty random consistency index for n = 1..=9.
const RANDOM_INDEX: [f64; 9] = [0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45];
const RECIPROCAL_TOL: f64 = 1e-9;

/// Positive reciprocal matrix of pairwise criterion comparisons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseMatrix(Vec<Vec<f64>>);

impl PairwiseMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if !(2..=9).contains(&n) {
            return Err(Error::InvalidArgument(format!(
                "pairwise matrix size {n} outside 2..=9"
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidArgument(format!("pairwise row {i} has wrong length")));
            }
            if (row[i] - 1.0).abs() > RECIPROCAL_TOL {
                return Err(Error::InvalidArgument(format!("diagonal entry {i} is not 1")));
            }
            for (j, &v) in row.iter().enumerate() {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(Error::InvalidArgument(format!("entry ({i},{j}) must be positive")));
                }
                if (v * rows[j][i] - 1.0).abs() > RECIPROCAL_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "entries ({i},{j}) and ({j},{i}) are not reciprocal"
                    )));
                }
            }
        }
        Ok(Self(rows))
    }

    /// The perfectly consistent matrix `m[i][j] = w_i / w_j`.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        Self::new(
            weights
                .iter()
                .map(|wi| weights.iter().map(|wj| wi / wj).collect())
                .collect(),
        )
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AhpWeights {
    pub weights: Vec<f64>,
    pub lambda_max: f64,
    pub consistency_ratio: f64,
}

/// Principal-eigenvector weights by power iteration, with Saaty's consistency ratio.
pub fn ahp_weights(matrix: &PairwiseMatrix) -> Result<AhpWeights> {
    let a = matrix.rows();
    let n = a.len();
    let mut w = vec![1.0 / n as f64; n];
    let max_iter = 10_000;
    let mut converged = false;
    for _ in 0..max_iter {
        let mut next: Vec<f64> = a
            .iter()
            .map(|row| row.iter().zip(&w).map(|(x, y)| x * y).sum())
            .collect();
        let sum: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= sum);
        let diff = next.iter().zip(&w).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        w = next;
        if diff < 1e-15 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "AHP principal eigenvector".into(),
            iterations: max_iter,
        });
    }
    let lambda_max = a
        .iter()
        .zip(&w)
        .map(|(row, wi)| row.iter().zip(&w).map(|(x, y)| x * y).sum::<f64>() / wi)
        .sum::<f64>()
        / n as f64;
    let ci = ((lambda_max - n as f64) / (n as f64 - 1.0)).max(0.0);
    let ri = RANDOM_INDEX[n - 1];
    let consistency_ratio = if ri > 0.0 { ci / ri } else { 0.0 };
    Ok(AhpWeights {
        weights: w,
        lambda_max,
        consistency_ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionMatrix {
    pub models: Vec<String>,
    pub criteria: Vec<String>,
    /// `values[model][criterion]`
    pub values: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl DecisionMatrix {
    /// Builds a matrix with equal weights `1/m`.
    pub fn new(models: Vec<String>, criteria: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        let m = criteria.len();
        let weights = vec![1.0 / m.max(1) as f64; m];
        Self::with_weights(models, criteria, values, weights)
    }

    pub fn with_weights(
        models: Vec<String>,
        criteria: Vec<String>,
        values: Vec<Vec<f64>>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let matrix = Self {
            models,
            criteria,
            values,
            weights,
        };
        matrix.validate()?;
        Ok(matrix)
    }

    pub fn validate(&self) -> Result<()> {
        if self.models.is_empty() || self.criteria.is_empty() {
            return Err(Error::Empty("decision matrix"));
        }
        if self.values.len() != self.models.len() {
            return Err(Error::LengthMismatch {
                left: self.values.len(),
                right: self.models.len(),
            });
        }
        if self.weights.len() != self.criteria.len() {
            return Err(Error::LengthMismatch {
                left: self.weights.len(),
                right: self.criteria.len(),
            });
        }
        for (i, row) in self.values.iter().enumerate() {
            if row.len() != self.criteria.len() {
                return Err(Error::InvalidArgument(format!("row {i} has wrong length")));
            }
            if row.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has negative or non-finite values"
                )));
            }
        }
        if self.weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument("weights must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn column_max(&self) -> Vec<f64> {
        (0..self.criteria.len())
            .map(|j| self.values.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max))
            .collect()
    }

    pub fn column_min(&self) -> Vec<f64> {
        (0..self.criteria.len())
            .map(|j| self.values.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoringMethod {
    #[default]
    RowSum,
    RangeRatio,
    StandardTopsis,
}

impl std::str::FromStr for ScoringMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "row-sum" => Ok(ScoringMethod::RowSum),
            "range-ratio" => Ok(ScoringMethod::RangeRatio),
            "standard-topsis" => Ok(ScoringMethod::StandardTopsis),
            other => Err(Error::InvalidArgument(format!("unknown scoring method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedModel {
    pub model: String,
    pub score: f64,
    /// 1 is best.
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingReport {
    pub method: ScoringMethod,
    /// In input row order.
    pub entries: Vec<RankedModel>,
}

impl RankingReport {
    fn from_scores(method: ScoringMethod, models: &[String], scores: Vec<f64>) -> Self {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
        let mut ranks = vec![0; scores.len()];
        for (r, &i) in order.iter().enumerate() {
            ranks[i] = r + 1;
        }
        Self {
            method,
            entries: models
                .iter()
                .zip(scores)
                .zip(ranks)
                .map(|((model, score), rank)| RankedModel {
                    model: model.clone(),
                    score,
                    rank,
                })
                .collect(),
        }
    }

    /// Model names from rank 1 downwards.
    pub fn ranking(&self) -> Vec<&str> {
        let mut sorted: Vec<&RankedModel> = self.entries.iter().collect();
        sorted.sort_by_key(|e| e.rank);
        sorted.into_iter().map(|e| e.model.as_str()).collect()
    }

    pub fn scores(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.score).collect()
    }
}

pub fn score_row_sum(matrix: &DecisionMatrix) -> Result<RankingReport> {
    matrix.validate()?;
    let scores = matrix.values.iter().map(|r| r.iter().sum()).collect();
    Ok(RankingReport::from_scores(
        ScoringMethod::RowSum,
        &matrix.models,
        scores,
    ))
}

/// Scores each model as `sum_j w_j (d-_j - d_ij) / (d-_j - d+_j)`.
pub fn score_range_ratio(matrix: &DecisionMatrix, dplus: &[f64], dminus: &[f64]) -> Result<RankingReport> {
    matrix.validate()?;
    let m = matrix.criteria.len();
    if dplus.len() != m || dminus.len() != m {
        return Err(Error::LengthMismatch {
            left: dplus.len().min(dminus.len()),
            right: m,
        });
    }
    if let Some(j) = (0..m).find(|&j| dminus[j] == dplus[j]) {
        return Err(Error::DegenerateCriterion(j));
    }
    let scores = matrix
        .values
        .iter()
        .map(|row| {
            (0..m)
                .map(|j| matrix.weights[j] * (dminus[j] - row[j]) / (dminus[j] - dplus[j]))
                .sum()
        })
        .collect();
    Ok(RankingReport::from_scores(
        ScoringMethod::RangeRatio,
        &matrix.models,
        scores,
    ))
}

/// Vector-normalized TOPSIS closeness coefficient. A model equidistant from nothing
/// (ideal and anti-ideal coincide, e.g. a single model) scores 1.
pub fn score_standard_topsis(matrix: &DecisionMatrix) -> Result<RankingReport> {
    matrix.validate()?;
    let m = matrix.criteria.len();
    let norms: Vec<f64> = (0..m)
        .map(|j| matrix.values.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt())
        .collect();
    if let Some(j) = norms.iter().position(|&n| n == 0.0) {
        return Err(Error::ZeroColumn(j));
    }
    let weighted: Vec<Vec<f64>> = matrix
        .values
        .iter()
        .map(|r| (0..m).map(|j| matrix.weights[j] * r[j] / norms[j]).collect())
        .collect();
    let ideal: Vec<f64> = (0..m)
        .map(|j| weighted.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let anti: Vec<f64> = (0..m)
        .map(|j| weighted.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min))
        .collect();
    let dist = |r: &[f64], target: &[f64]| r.iter().zip(target).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let scores = weighted
        .iter()
        .map(|r| {
            let d_plus = dist(r, &ideal);
            let d_minus = dist(r, &anti);
            if d_plus + d_minus == 0.0 {
                1.0
            } else {
                d_minus / (d_plus + d_minus)
            }
        })
        .collect();
    Ok(RankingReport::from_scores(
        ScoringMethod::StandardTopsis,
        &matrix.models,
        scores,
    ))
}

/// Runs the chosen scorer; the range-ratio scorer uses column max / min as `d+` / `d-`.
pub fn score(matrix: &DecisionMatrix, method: ScoringMethod) -> Result<RankingReport> {
    match method {
        ScoringMethod::RowSum => score_row_sum(matrix),
        ScoringMethod::RangeRatio => score_range_ratio(matrix, &matrix.column_max(), &matrix.column_min()),
        ScoringMethod::StandardTopsis => score_standard_topsis(matrix),
    }
}

/// Reads `model,<criterion>...` CSV. Equal weights; override with [`DecisionMatrix::weights`].
pub fn read_decision_csv<R: Read>(reader: R) -> Result<DecisionMatrix> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let criteria: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut models = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        models.push(rec.get(0).unwrap_or_default().to_string());
        let row = (1..=criteria.len())
            .map(|j| {
                let raw = rec.get(j).unwrap_or_default();
                raw.parse::<f64>().map_err(|e| Error::Parse {
                    row: i + 2,
                    column: criteria[j - 1].clone(),
                    message: format!("'{raw}': {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        values.push(row);
    }
    DecisionMatrix::new(models, criteria, values)
}

/// Reads a whitespace or comma separated square matrix.
pub fn read_pairwise<R: Read>(mut reader: R) -> Result<PairwiseMatrix> {
    let mut text = String::new();
    reader.read_to_string(&mut text).map_err(|source| Error::Io {
        path: "<pairwise matrix>".into(),
        source,
    })?;
    let rows = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .enumerate()
        .map(|(i, line)| {
            line.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|tok| {
                    parse_ratio(tok).ok_or_else(|| Error::Parse {
                        row: i + 1,
                        column: tok.to_string(),
                        message: "expected a number or a/b ratio".into(),
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    PairwiseMatrix::new(rows)
}

fn parse_ratio(tok: &str) -> Option<f64> {
    match tok.split_once('/') {
        Some((a, b)) => Some(a.parse::<f64>().ok()? / b.parse::<f64>().ok()?),
        None => tok.parse().ok(),
    }
}

/// Bar-chart CSV: `model,score,rank,method`.
pub fn write_ranking_csv<W: Write>(report: &RankingReport, writer: W) -> Result<()> {
    let method = serde_json::to_value(report.method)?;
    let method = method.as_str().unwrap_or_default().to_string();
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["model", "score", "rank", "method"])?;
    for e in &report.entries {
        w.write_record([
            e.model.clone(),
            format!("{}", e.score),
            e.rank.to_string(),
            method.clone(),
        ])?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<csv writer>".into(),
        source,
    })?;
    Ok(())
}
