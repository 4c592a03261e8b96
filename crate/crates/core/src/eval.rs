//! Sampled quality measures and the experiment harness.
//!
//! For a sample `A`, the hypothesis is *precise* at `A` when the data satisfy
//! `A → H(A)`, and has *recall* at `A` when `H(A)` contains the data closure
//! of `A`. Both hold exactly when the two closures coincide at `A`.

use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AssignmentFamily, HornFormula, Implication};
use crate::bitset::AttributeSet;
use crate::error::{same_width, CoreError};
use crate::learner::{pac_horn_approximation, random_subset, LearnerConfig};
use crate::oracle::DatasetOracle;
use crate::rng::{derive_seed, substream};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("at least one evaluation sample is required")]
    NoSamples,
    #[error("invalid evaluation configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Default confidence parameter for evaluation.
pub const DEFAULT_ETA: f64 = 0.001;
/// Default accuracy parameter for evaluation.
pub const DEFAULT_T: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    pub eta: f64,
    pub t: f64,
    /// Overrides the Hoeffding sample size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default)]
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            eta: DEFAULT_ETA,
            t: DEFAULT_T,
            samples: None,
            seed: 0,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        let open = |x: f64| x > 0.0 && x < 1.0;
        if !open(self.eta) || !open(self.t) {
            return Err(EvalError::InvalidConfig(format!(
                "eta and t must lie in (0, 1), got {} and {}",
                self.eta, self.t
            )));
        }
        if self.samples == Some(0) {
            return Err(EvalError::NoSamples);
        }
        Ok(())
    }

    pub fn sample_size(&self) -> u64 {
        self.samples
            .unwrap_or_else(|| hoeffding_samples(self.eta, self.t))
    }
}

/// Samples needed so an estimated proportion is within `t` of the truth with
/// probability at least `1 - eta`: `⌈ln(1/η) / (2t²)⌉`.
pub fn hoeffding_samples(eta: f64, t: f64) -> u64 {
    ((1.0 / eta).ln() / (2.0 * t * t)).ceil() as u64
}

/// Whether `v ⊨ A → H(A)`.
pub fn precise_at(h: &HornFormula, v: &AssignmentFamily, a: &AttributeSet) -> bool {
    let imp = Implication {
        premise: a.clone(),
        conclusion: h.closure_of(a),
    };
    v.holds_unchecked(&imp).is_valid()
}

/// Whether the data closure of `A` is contained in `H(A)`.
pub fn recalls_at(h: &HornFormula, v: &AssignmentFamily, a: &AttributeSet) -> bool {
    v.closure_of(a).is_subset_of(&h.closure_of(a))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
}

/// Precision and recall over an explicit list of subsets.
pub fn scores_over<I>(
    h: &HornFormula,
    v: &AssignmentFamily,
    subsets: I,
) -> Result<Scores, EvalError>
where
    I: IntoIterator<Item = AttributeSet>,
{
    same_width(v.width(), h.width())?;
    let (mut n, mut precise, mut recalled) = (0u64, 0u64, 0u64);
    for a in subsets {
        same_width(v.width(), a.width())?;
        n += 1;
        precise += u64::from(precise_at(h, v, &a));
        recalled += u64::from(recalls_at(h, v, &a));
    }
    if n == 0 {
        return Err(EvalError::NoSamples);
    }
    Ok(Scores {
        precision: precise as f64 / n as f64,
        recall: recalled as f64 / n as f64,
    })
}

fn sampled<R: RngCore + ?Sized>(
    width: usize,
    n: u64,
    rng: &mut R,
) -> impl Iterator<Item = AttributeSet> + '_ {
    (0..n).map(move |_| random_subset(rng, width))
}

/// Precision and recall on the same `n` uniform samples, drawn with replacement.
pub fn estimate_scores<R: RngCore + ?Sized>(
    h: &HornFormula,
    v: &AssignmentFamily,
    n: u64,
    rng: &mut R,
) -> Result<Scores, EvalError> {
    scores_over(h, v, sampled(v.width(), n, rng))
}

pub fn estimate_precision<R: RngCore + ?Sized>(
    h: &HornFormula,
    v: &AssignmentFamily,
    n: u64,
    rng: &mut R,
) -> Result<f64, EvalError> {
    Ok(estimate_scores(h, v, n, rng)?.precision)
}

pub fn estimate_recall<R: RngCore + ?Sized>(
    h: &HornFormula,
    v: &AssignmentFamily,
    n: u64,
    rng: &mut R,
) -> Result<f64, EvalError> {
    Ok(estimate_scores(h, v, n, rng)?.recall)
}

/// Share of implications of `h` that hold in `v`; 1 for an empty `h`.
pub fn fraction_valid(h: &HornFormula, v: &AssignmentFamily) -> Result<f64, CoreError> {
    same_width(v.width(), h.width())?;
    if h.is_empty() {
        return Ok(1.0);
    }
    let valid = h
        .iter()
        .filter(|imp| v.holds_unchecked(imp).is_valid())
        .count();
    Ok(valid as f64 / h.len() as f64)
}

/// `rows` random rows, each attribute present independently with probability `density`.
pub fn generate_random_dataset<R: Rng + ?Sized>(
    rows: usize,
    width: usize,
    density: f64,
    rng: &mut R,
) -> Result<AssignmentFamily, EvalError> {
    if !(0.0..=1.0).contains(&density) {
        return Err(EvalError::InvalidConfig(format!(
            "density must lie in [0, 1], got {density}"
        )));
    }
    let mut v = AssignmentFamily::new(width);
    for _ in 0..rows {
        let mut row = AttributeSet::empty(width);
        for i in 0..width {
            if rng.random_bool(density) {
                row.insert(i);
            }
        }
        v.push(row).expect("row built for this width");
    }
    Ok(v)
}

/// A grid of learner runs on one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    /// `(epsilon, delta)` cells.
    pub grid: Vec<(f64, f64)>,
    pub repetitions: u32,
    /// Mode and variant flags; epsilon, delta and seed are set per run.
    pub learner: LearnerConfig,
    pub master_seed: u64,
    pub eval: EvalConfig,
    /// Record wall times. Off for byte-reproducible reports.
    #[serde(default)]
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub cell: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub repetition: u32,
    pub seed: u64,
    pub terminated: bool,
    pub basis_size: usize,
    pub fraction_valid: f64,
    pub precision: f64,
    pub recall: f64,
    pub eval_samples: u64,
    pub oracle_queries: u64,
    pub counterexamples: u64,
    pub rounds: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Mean and sample standard deviation; both 0 for no values, `std` 0 for one.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        if values.is_empty() {
            return Self {
                mean: 0.0,
                std: 0.0,
            };
        }
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Self { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub epsilon: f64,
    pub delta: f64,
    pub runs: usize,
    pub failures: usize,
    pub basis_size: MeanStd,
    pub fraction_valid: MeanStd,
    pub precision: MeanStd,
    pub recall: MeanStd,
    pub oracle_queries: MeanStd,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub records: Vec<RunRecord>,
}

impl ExperimentReport {
    /// Concatenation; summaries depend only on the records.
    pub fn merge(mut self, other: ExperimentReport) -> Self {
        self.records.extend(other.records);
        self
    }

    pub fn summary(&self) -> Vec<CellSummary> {
        let mut cells: Vec<(f64, f64)> = Vec::new();
        for r in &self.records {
            if !cells.contains(&(r.epsilon, r.delta)) {
                cells.push((r.epsilon, r.delta));
            }
        }
        cells
            .into_iter()
            .map(|(epsilon, delta)| {
                let runs: Vec<&RunRecord> = self
                    .records
                    .iter()
                    .filter(|r| (r.epsilon, r.delta) == (epsilon, delta))
                    .collect();
                let ok: Vec<&&RunRecord> = runs.iter().filter(|r| r.error.is_none()).collect();
                let col = |f: fn(&RunRecord) -> f64| {
                    MeanStd::of(&ok.iter().map(|r| f(r)).collect::<Vec<_>>())
                };
                CellSummary {
                    epsilon,
                    delta,
                    runs: runs.len(),
                    failures: runs.len() - ok.len(),
                    basis_size: col(|r| r.basis_size as f64),
                    fraction_valid: col(|r| r.fraction_valid),
                    precision: col(|r| r.precision),
                    recall: col(|r| r.recall),
                    oracle_queries: col(|r| r.oracle_queries as f64),
                }
            })
            .collect()
    }

    /// One JSON object per run.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, serde_json::Error> {
        let records = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<_, _>>()?;
        Ok(Self { records })
    }

    /// Plain-text table with one line per cell.
    pub fn summary_table(&self) -> String {
        let mut out = format!(
            "{:>8} {:>6} {:>4} {:>15} {:>13} {:>13} {:>13} {:>19}\n",
            "epsilon", "delta", "runs", "BS", "DP", "precision", "SR", "queries"
        );
        for c in self.summary() {
            let ms = |m: MeanStd, p: usize| format!("{:.p$}±{:.p$}", m.mean, m.std);
            out.push_str(&format!(
                "{:>8} {:>6} {:>4} {:>15} {:>13} {:>13} {:>13} {:>19}\n",
                c.epsilon,
                c.delta,
                c.runs,
                ms(c.basis_size, 1),
                ms(c.fraction_valid, 3),
                ms(c.precision, 3),
                ms(c.recall, 3),
                ms(c.oracle_queries, 0),
            ));
        }
        out
    }
}

fn run_one(
    v: &Arc<AssignmentFamily>,
    spec: &ExperimentSpec,
    cell: usize,
    repetition: u32,
) -> RunRecord {
    let (epsilon, delta) = spec.grid[cell];
    let index = cell as u64 * u64::from(spec.repetitions) + u64::from(repetition);
    let seed = derive_seed(spec.master_seed, index);
    let mut record = RunRecord {
        cell,
        epsilon,
        delta,
        repetition,
        seed,
        terminated: false,
        basis_size: 0,
        fraction_valid: 0.0,
        precision: 0.0,
        recall: 0.0,
        eval_samples: 0,
        oracle_queries: 0,
        counterexamples: 0,
        rounds: 0,
        wall_time_ms: None,
        error: None,
    };
    let start = Instant::now();
    let config = LearnerConfig {
        epsilon,
        delta,
        seed,
        ..spec.learner.clone()
    };
    let outcome = pac_horn_approximation(&mut DatasetOracle::new(v.clone()), &config)
        .map_err(|e| e.to_string())
        .and_then(|(h, report)| {
            let n = spec.eval.sample_size();
            let mut rng = substream(spec.eval.seed, index);
            let scores = estimate_scores(&h, v, n, &mut rng).map_err(|e| e.to_string())?;
            let dp = fraction_valid(&h, v).map_err(|e| e.to_string())?;
            Ok((h, report, scores, dp, n))
        });
    match outcome {
        Ok((h, report, scores, dp, n)) => {
            record.terminated = report.terminated;
            record.basis_size = h.len();
            record.fraction_valid = dp;
            record.precision = scores.precision;
            record.recall = scores.recall;
            record.eval_samples = n;
            record.oracle_queries = report.oracle_queries.total();
            record.counterexamples = report.counterexamples;
            record.rounds = report.rounds;
        }
        Err(e) => record.error = Some(e),
    }
    if spec.timing {
        record.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    record
}

/// Runs every cell `repetitions` times in parallel. Records come back in
/// (cell, repetition) order and depend only on the data and the spec.
pub fn run_experiment(
    v: Arc<AssignmentFamily>,
    spec: &ExperimentSpec,
) -> Result<ExperimentReport, EvalError> {
    spec.eval.validate()?;
    for &(epsilon, delta) in &spec.grid {
        LearnerConfig {
            epsilon,
            delta,
            ..spec.learner.clone()
        }
        .validate()
        .map_err(|e| EvalError::InvalidConfig(e.to_string()))?;
    }
    let jobs: Vec<(usize, u32)> = (0..spec.grid.len())
        .flat_map(|c| (0..spec.repetitions).map(move |r| (c, r)))
        .collect();
    let records = jobs
        .into_par_iter()
        .map(|(cell, rep)| run_one(&v, spec, cell, rep))
        .collect();
    Ok(ExperimentReport { records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitset::all_subsets;
    use crate::exact::dg_basis;
    use crate::rng::session_rng;

    #[test]
    fn hoeffding_examples() {
        assert_eq!(hoeffding_samples(0.001, 0.01), 34539);
        assert_eq!(hoeffding_samples(0.01, 0.1), 231);
        let t = 0.05;
        assert_eq!(
            hoeffding_samples(1.0 / std::f64::consts::E, t),
            (1.0 / (2.0 * t * t)).ceil() as u64
        );
        assert_eq!(EvalConfig::default().sample_size(), 34539);
    }

    #[test]
    fn empty_hypothesis_is_precise() {
        let v = AssignmentFamily::from_bits(3, &[0b011, 0b110]);
        let h = HornFormula::new(3);
        let p = estimate_precision(&h, &v, 200, &mut session_rng(1)).unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(fraction_valid(&h, &v).unwrap(), 1.0);
        assert!(estimate_recall(&h, &v, 0, &mut session_rng(1)).is_err());
    }

    #[test]
    fn envelope_scores_one() {
        let v = AssignmentFamily::from_bits(4, &[0b0011, 0b0110, 0b1101]);
        let h = dg_basis(&v, None).unwrap();
        let s = scores_over(&h, &v, all_subsets(4)).unwrap();
        assert_eq!(
            s,
            Scores {
                precision: 1.0,
                recall: 1.0
            }
        );
        assert_eq!(fraction_valid(&h, &v).unwrap(), 1.0);
    }

    #[test]
    fn recall_of_empty_hypothesis_on_empty_row() {
        // v = {∅} over {a}: ∅ passes, {a} does not
        let v = AssignmentFamily::from_bits(1, &[0]);
        let s = scores_over(&HornFormula::new(1), &v, all_subsets(1)).unwrap();
        assert_eq!(s.recall, 0.5);
    }

    #[test]
    fn random_dataset_density() {
        let mut rng = session_rng(4);
        assert!(generate_random_dataset(5, 6, 0.0, &mut rng)
            .unwrap()
            .rows()
            .iter()
            .all(|r| r.is_empty()));
        assert!(generate_random_dataset(5, 6, 1.0, &mut rng)
            .unwrap()
            .rows()
            .iter()
            .all(|r| r.is_full()));
        let v = generate_random_dataset(200, 50, 0.3, &mut rng).unwrap();
        let n: f64 = 200.0 * 50.0;
        let sigma = (0.3 * 0.7 / n).sqrt();
        assert!((v.density() - 0.3).abs() < 3.0 * sigma, "{}", v.density());
        assert!(generate_random_dataset(1, 1, 1.5, &mut rng).is_err());
    }

    #[test]
    fn experiment_is_reproducible() {
        let v = Arc::new(AssignmentFamily::from_bits(
            5,
            &[0b00111, 0b01101, 0b11000, 0b00001],
        ));
        let spec = ExperimentSpec {
            grid: vec![(0.1, 0.1), (0.5, 0.9)],
            repetitions: 3,
            learner: LearnerConfig::new(1.0, 1.0),
            master_seed: 42,
            eval: EvalConfig {
                samples: Some(500),
                ..EvalConfig::default()
            },
            timing: false,
        };
        let a = run_experiment(v.clone(), &spec).unwrap();
        let b = run_experiment(v, &spec).unwrap();
        assert_eq!(a.records.len(), 6);
        assert_eq!(a.to_jsonl(), b.to_jsonl());
        assert_eq!(ExperimentReport::from_jsonl(&a.to_jsonl()).unwrap(), a);
        let s = a.summary();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].runs, 3);
        assert!(a.summary_table().lines().count() == 3);
    }
}
