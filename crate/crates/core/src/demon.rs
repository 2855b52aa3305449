//! Exhaustive checks of `dS − dI ≥ 0` on measurement-feedback engines.
//!
//! A demon measures the state `x` of a system through a symmetric noisy
//! channel, gets outcome `y`, and runs a protocol that extracts work `w(x, y)`
//! from a bath at temperature `T`. Over one cycle the total entropy production
//! is `dS = Σ p(x,y)·(−w(x,y)/T + Δs(x,y))` and the mutual information `I`
//! between `x` and `y` is consumed by the feedback, so `dI = −I`. Everything is
//! in nats.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest state space enumerated.
pub const MAX_STATES: usize = 8;

/// Tolerance on probability normalisation.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Row-major joint distribution p(x, y).
pub type Joint = Vec<Vec<f64>>;

/// How the demon turns an outcome into work.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Protocol {
    /// w = T·ln(p(x|y)/p(x)): the reversible protocol matched to the true error rate.
    Optimal,
    /// w = T·ln(q(x|y)/p(x)) for a posterior q that trusts the outcome with
    /// probability `confidence`; optimal only when `confidence == 1 − ε`.
    Assumed { confidence: f64 },
    /// Binary engine that books +T·ln2 on a correct outcome and −T·ln2 otherwise.
    Naive,
    /// No extraction.
    Idle,
    /// Explicit work table w[x][y].
    Table { work: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackModel {
    pub prior: Vec<f64>,
    pub error_rate: f64,
    pub bath_temperature: f64,
    /// Extracted work w[x][y].
    pub work: Vec<Vec<f64>>,
    /// System entropy change Δs[x][y] over the cycle.
    pub system_entropy_change: Vec<Vec<f64>>,
}

impl FeedbackModel {
    /// Build a model, resolving `protocol` into a work table. The system returns
    /// to its prior at the end of the cycle, so Δs is zero.
    pub fn new(
        prior: Vec<f64>,
        error_rate: f64,
        bath_temperature: f64,
        protocol: &Protocol,
    ) -> Result<Self> {
        let n = prior.len();
        let mut model = FeedbackModel {
            prior,
            error_rate,
            bath_temperature,
            work: vec![vec![0.0; n]; n],
            system_entropy_change: vec![vec![0.0; n]; n],
        };
        model.validate_parameters()?;
        model.work = model.resolve_work(protocol)?;
        model.validate()?;
        Ok(model)
    }

    /// Uniform binary Szilard engine.
    pub fn szilard(error_rate: f64, bath_temperature: f64, protocol: &Protocol) -> Result<Self> {
        Self::new(vec![0.5, 0.5], error_rate, bath_temperature, protocol)
    }

    pub fn n_states(&self) -> usize {
        self.prior.len()
    }

    fn validate_parameters(&self) -> Result<()> {
        let n = self.n_states();
        if !(2..=MAX_STATES).contains(&n) {
            return Err(Error::InvalidModel(format!(
                "n_states = {n} must lie in 2..={MAX_STATES}"
            )));
        }
        check_distribution(&self.prior, "prior")?;
        if !(0.0..=0.5).contains(&self.error_rate) {
            return Err(Error::InvalidModel(format!(
                "error_rate = {} must lie in [0, 0.5]",
                self.error_rate
            )));
        }
        if !(self.bath_temperature.is_finite() && self.bath_temperature > 0.0) {
            return Err(Error::InvalidModel(format!(
                "bath_temperature = {} must be > 0",
                self.bath_temperature
            )));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_parameters()?;
        let n = self.n_states();
        for (name, table) in [
            ("work", &self.work),
            ("system_entropy_change", &self.system_entropy_change),
        ] {
            if table.len() != n || table.iter().any(|row| row.len() != n) {
                return Err(Error::InvalidModel(format!("{name} must be {n}x{n}")));
            }
            if table.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::InvalidModel(format!(
                    "{name} has non-finite entries"
                )));
            }
        }
        Ok(())
    }

    /// Measurement channel p(y|x): 1 − ε on the diagonal, ε spread evenly elsewhere.
    pub fn channel(&self, x: usize, y: usize) -> f64 {
        if x == y {
            1.0 - self.error_rate
        } else {
            self.error_rate / (self.n_states() - 1) as f64
        }
    }

    fn resolve_work(&self, protocol: &Protocol) -> Result<Vec<Vec<f64>>> {
        let n = self.n_states();
        let t = self.bath_temperature;
        let joint = joint_distribution(self);
        let outcome = column_marginal(&joint);
        let mut work = vec![vec![0.0; n]; n];
        match protocol {
            Protocol::Optimal | Protocol::Assumed { .. } => {
                let confidence = match protocol {
                    Protocol::Assumed { confidence } => {
                        if !(*confidence > 0.0 && *confidence <= 1.0) {
                            return Err(Error::InvalidModel(format!(
                                "confidence = {confidence} must lie in (0, 1]"
                            )));
                        }
                        Some(*confidence)
                    }
                    _ => None,
                };
                for (x, row) in work.iter_mut().enumerate() {
                    for (y, w) in row.iter_mut().enumerate() {
                        let p = joint[x][y];
                        if p == 0.0 {
                            continue;
                        }
                        let posterior = match confidence {
                            None => p / outcome[y],
                            Some(c) if x == y => c,
                            Some(c) => (1.0 - c) / (n - 1) as f64,
                        };
                        if posterior == 0.0 {
                            return Err(Error::InvalidModel(format!(
                                "protocol rules out reachable state {x} given outcome {y}"
                            )));
                        }
                        *w = t * (posterior / self.prior[x]).ln();
                    }
                }
            }
            Protocol::Naive => {
                if n != 2 {
                    return Err(Error::InvalidModel("naive protocol is binary only".into()));
                }
                let ln2 = std::f64::consts::LN_2;
                work = vec![vec![t * ln2, -t * ln2], vec![-t * ln2, t * ln2]];
            }
            Protocol::Idle => {}
            Protocol::Table { work: table } => work = table.clone(),
        }
        Ok(work)
    }
}

fn check_distribution(p: &[f64], name: &str) -> Result<()> {
    if p.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::InvalidModel(format!(
            "{name} has entries outside [0, 1]"
        )));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidModel(format!(
            "{name} sums to {total}, not 1"
        )));
    }
    Ok(())
}

/// p(x, y) = prior(x) · channel(y|x).
pub fn joint_distribution(model: &FeedbackModel) -> Joint {
    let n = model.n_states();
    (0..n)
        .map(|x| {
            (0..n)
                .map(|y| model.prior[x] * model.channel(x, y))
                .collect()
        })
        .collect()
}

pub fn row_marginal(joint: &Joint) -> Vec<f64> {
    joint.iter().map(|row| row.iter().sum()).collect()
}

pub fn column_marginal(joint: &Joint) -> Vec<f64> {
    let cols = joint.first().map_or(0, Vec::len);
    (0..cols)
        .map(|y| joint.iter().map(|row| row[y]).sum())
        .collect()
}

/// Shannon entropy in nats, with 0·ln 0 = 0.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&v| v > 0.0)
        .map(|v| v * v.ln())
        .sum::<f64>()
}

pub fn binary_entropy(p: f64) -> f64 {
    shannon_entropy(&[p, 1.0 - p])
}

/// Mutual information of a joint distribution, in nats.
pub fn mutual_information(joint: &Joint) -> Result<f64> {
    let cols = joint.first().map_or(0, Vec::len);
    if cols == 0 || joint.iter().any(|row| row.len() != cols) {
        return Err(Error::InvalidDistribution(
            "joint must be a non-empty rectangle".into(),
        ));
    }
    if joint
        .iter()
        .flatten()
        .any(|v| !(v.is_finite() && *v >= 0.0))
    {
        return Err(Error::InvalidDistribution(
            "negative or non-finite entry".into(),
        ));
    }
    let total: f64 = joint.iter().flatten().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidDistribution(format!(
            "entries sum to {total}, not 1"
        )));
    }
    let px = row_marginal(joint);
    let py = column_marginal(joint);
    let mut mi = 0.0;
    for (x, row) in joint.iter().enumerate() {
        for (y, &p) in row.iter().enumerate() {
            if p > 0.0 {
                mi += p * (p / (px[x] * py[y])).ln();
            }
        }
    }
    // rounding can leave a few ulps below zero for independent joints
    Ok(mi.max(0.0))
}

/// Merge outcome columns: column `y` of the input lands in column `groups[y]`.
pub fn coarsen_outcomes(joint: &Joint, groups: &[usize]) -> Joint {
    let width = groups.iter().max().map_or(0, |g| g + 1);
    joint
        .iter()
        .map(|row| {
            let mut merged = vec![0.0; width];
            for (y, p) in row.iter().enumerate() {
                merged[groups[y]] += p;
            }
            merged
        })
        .collect()
}

/// Mean extracted work Σ p(x,y)·w(x,y).
pub fn mean_work(model: &FeedbackModel) -> f64 {
    weighted_sum(model, |x, y| model.work[x][y])
}

/// Total entropy production of one measurement-feedback cycle.
pub fn entropy_production(model: &FeedbackModel) -> f64 {
    let t = model.bath_temperature;
    weighted_sum(model, |x, y| {
        -model.work[x][y] / t + model.system_entropy_change[x][y]
    })
}

fn weighted_sum(model: &FeedbackModel, f: impl Fn(usize, usize) -> f64) -> f64 {
    let joint = joint_distribution(model);
    let mut sum = 0.0;
    for (x, row) in joint.iter().enumerate() {
        for (y, &p) in row.iter().enumerate() {
            if p > 0.0 {
                sum += p * f(x, y);
            }
        }
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelEvaluation {
    pub error_rate: f64,
    pub entropy_production: f64,
    pub mutual_information: f64,
    /// −I: the correlation used up by the feedback.
    pub information_change: f64,
    /// dS − dI.
    pub margin: f64,
    pub mean_work: f64,
}

pub fn evaluate(model: &FeedbackModel) -> Result<ModelEvaluation> {
    let mi = mutual_information(&joint_distribution(model))?;
    let ds = entropy_production(model);
    let di = -mi;
    Ok(ModelEvaluation {
        error_rate: model.error_rate,
        entropy_production: ds,
        mutual_information: mi,
        information_change: di,
        margin: ds - di,
        mean_work: mean_work(model),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NgslReport {
    pub evaluations: Vec<ModelEvaluation>,
    pub min_margin: f64,
    pub argmin: usize,
    pub pass: bool,
    pub tolerance: f64,
    /// Models with |dS − dI| ≤ tolerance.
    pub saturated: Vec<usize>,
}

pub fn verify_ngsl(models: &[FeedbackModel], tol: f64) -> Result<NgslReport> {
    if models.is_empty() {
        return Err(Error::InvalidModel("empty model grid".into()));
    }
    let evaluations = models.iter().map(evaluate).collect::<Result<Vec<_>>>()?;
    let (argmin, min_margin) = evaluations.iter().map(|e| e.margin).enumerate().fold(
        (0, f64::INFINITY),
        |best, (i, m)| if m < best.1 { (i, m) } else { best },
    );
    let saturated = evaluations
        .iter()
        .enumerate()
        .filter(|(_, e)| e.margin.abs() <= tol)
        .map(|(i, _)| i)
        .collect();
    Ok(NgslReport {
        evaluations,
        min_margin,
        argmin,
        pass: min_margin >= -tol,
        tolerance: tol,
        saturated,
    })
}

/// ε = 0, 0.01, …, 0.5 on the uniform binary engine.
pub fn szilard_grid(
    steps: usize,
    bath_temperature: f64,
    protocol: &Protocol,
) -> Result<Vec<FeedbackModel>> {
    (0..=steps)
        .map(|i| {
            let eps = 0.5 * i as f64 / steps as f64;
            FeedbackModel::szilard(eps, bath_temperature, protocol)
        })
        .collect()
}
