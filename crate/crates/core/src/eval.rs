//! Dataset splitting and prediction scoring.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::extract::{LabeledSample, LogLevel};
use crate::model::{argmax_level, PredictionArray, NUM_CLASSES};

/// Sample indices per split, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// Seats each split gets out of `n`, at a fixed 70/10/20 ratio.
///
/// Integer largest-remainder allocation: exact tenths first, then leftover
/// seats by descending remainder, ties favoring train, then val.
fn split_counts(n: usize) -> (usize, usize, usize) {
    let weights = [7usize, 1, 2];
    let mut base = [0usize; 3];
    let mut rem = [0usize; 3];
    for i in 0..3 {
        base[i] = n * weights[i] / 10;
        rem[i] = n * weights[i] % 10;
    }
    let mut leftover = n - base.iter().sum::<usize>();
    let mut order = [0usize, 1, 2];
    order.sort_by_key(|&i| (std::cmp::Reverse(rem[i]), i));
    for &i in &order {
        if leftover == 0 {
            break;
        }
        base[i] += 1;
        leftover -= 1;
    }
    (base[0], base[1], base[2])
}

/// Stratified 70/10/20 split over (project, level) groups.
///
/// Groups are visited in key order and shuffled with a single seeded
/// generator, so one seed always yields one split. Every sample must carry
/// a label.
pub fn make_splits(samples: &[LabeledSample], seed: u64) -> Result<SplitIndices> {
    if samples.is_empty() {
        return Err(CoreError::Data("cannot split an empty sample set".into()));
    }
    let mut strata: BTreeMap<(String, usize), Vec<usize>> = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        let level = s.label.ok_or_else(|| {
            CoreError::Data(format!("sample {i} ({}) has no label", s.file))
        })?;
        strata.entry((s.project.clone(), level.ordinal())).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SplitIndices { train: Vec::new(), val: Vec::new(), test: Vec::new() };
    for (_, mut members) in strata {
        members.shuffle(&mut rng);
        let (n_train, n_val, _) = split_counts(members.len());
        for (pos, idx) in members.into_iter().enumerate() {
            if pos < n_train {
                out.train.push(idx);
            } else if pos < n_train + n_val {
                out.val.push(idx);
            } else {
                out.test.push(idx);
            }
        }
    }
    out.train.sort_unstable();
    out.val.sort_unstable();
    out.test.sort_unstable();
    Ok(out)
}

fn check_lengths(preds: &[PredictionArray], labels: &[LogLevel]) -> Result<()> {
    if preds.len() != labels.len() {
        return Err(CoreError::Data(format!(
            "{} predictions for {} labels",
            preds.len(),
            labels.len()
        )));
    }
    if preds.is_empty() {
        return Err(CoreError::Data("cannot score an empty prediction set".into()));
    }
    Ok(())
}

pub fn accuracy(preds: &[PredictionArray], labels: &[LogLevel]) -> Result<f64> {
    check_lengths(preds, labels)?;
    let hits = preds
        .iter()
        .zip(labels.iter())
        .filter(|(p, l)| argmax_level(p) == l.ordinal())
        .count();
    Ok(hits as f64 / preds.len() as f64)
}

/// Rows are true levels, columns are predicted levels.
pub fn confusion_matrix(
    preds: &[PredictionArray],
    labels: &[LogLevel],
) -> Result<[[usize; NUM_CLASSES]; NUM_CLASSES]> {
    check_lengths(preds, labels)?;
    let mut m = [[0usize; NUM_CLASSES]; NUM_CLASSES];
    for (p, l) in preds.iter().zip(labels.iter()) {
        m[l.ordinal()][argmax_level(p)] += 1;
    }
    Ok(m)
}

/// One-vs-rest area under the ROC curve for a single class.
///
/// Tie-aware pair counting in integer arithmetic: with scores ascending,
/// each tie group of `p` positives and `q` negatives past `c` strictly
/// smaller negatives contributes `2pc + pq` to twice the win count. `None`
/// when the class has no positives or no negatives.
pub fn class_auc(scores: &[f64], positive: &[bool]) -> Option<f64> {
    let total_pos = positive.iter().filter(|p| **p).count() as u64;
    let total_neg = positive.len() as u64 - total_pos;
    if total_pos == 0 || total_neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    let mut numerator2: u64 = 0;
    let mut cum_neg: u64 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let (mut p, mut q) = (0u64, 0u64);
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            if positive[order[j]] {
                p += 1;
            } else {
                q += 1;
            }
            j += 1;
        }
        numerator2 += 2 * p * cum_neg + p * q;
        cum_neg += q;
        i = j;
    }
    Some(numerator2 as f64 / (2 * total_pos * total_neg) as f64)
}

pub fn per_class_auc(
    preds: &[PredictionArray],
    labels: &[LogLevel],
) -> Result<[Option<f64>; NUM_CLASSES]> {
    check_lengths(preds, labels)?;
    let mut out = [None; NUM_CLASSES];
    for (c, slot) in out.iter_mut().enumerate() {
        let scores: Vec<f64> = preds.iter().map(|p| p[c]).collect();
        let positive: Vec<bool> = labels.iter().map(|l| l.ordinal() == c).collect();
        *slot = class_auc(&scores, &positive);
    }
    Ok(out)
}

/// Mean over classes that have a defined area; `None` when none do.
pub fn macro_auc(preds: &[PredictionArray], labels: &[LogLevel]) -> Result<Option<f64>> {
    let per_class = per_class_auc(preds, labels)?;
    let defined: Vec<f64> = per_class.iter().flatten().copied().collect();
    if defined.is_empty() {
        Ok(None)
    } else {
        Ok(Some(defined.iter().sum::<f64>() / defined.len() as f64))
    }
}

/// Share of misclassified samples whose prediction is one severity step
/// away from the truth. The flag reports the degenerate no-errors case.
pub fn adjacent_error_rate(
    preds: &[PredictionArray],
    labels: &[LogLevel],
) -> Result<(f64, bool)> {
    check_lengths(preds, labels)?;
    let mut wrong = 0usize;
    let mut adjacent = 0usize;
    for (p, l) in preds.iter().zip(labels.iter()) {
        let pred = argmax_level(p);
        let truth = l.ordinal();
        if pred != truth {
            wrong += 1;
            if pred.abs_diff(truth) == 1 {
                adjacent += 1;
            }
        }
    }
    if wrong == 0 {
        Ok((0.0, true))
    } else {
        Ok((adjacent as f64 / wrong as f64, false))
    }
}

/// Uniform-noise predictions: six unit draws per sample, normalized.
pub fn random_baseline(n: usize, seed: u64) -> Vec<PredictionArray> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut p = [0.0; NUM_CLASSES];
        for v in p.iter_mut() {
            *v = rng.gen_range(0.0..1.0);
        }
        let sum: f64 = p.iter().sum();
        if sum > 0.0 {
            for v in p.iter_mut() {
                *v /= sum;
            }
        } else {
            p = [1.0 / NUM_CLASSES as f64; NUM_CLASSES];
        }
        out.push(p);
    }
    out
}

/// Full scoring summary for one prediction set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n: usize,
    pub accuracy: f64,
    pub macro_auc: Option<f64>,
    pub per_class_auc: [Option<f64>; NUM_CLASSES],
    pub confusion: [[usize; NUM_CLASSES]; NUM_CLASSES],
    pub adjacent_error_rate: f64,
    /// True when every sample was classified correctly, which forces the
    /// adjacent rate to zero by convention.
    pub no_misclassified: bool,
}

pub fn evaluate(preds: &[PredictionArray], labels: &[LogLevel]) -> Result<EvalReport> {
    let (adj, none_wrong) = adjacent_error_rate(preds, labels)?;
    Ok(EvalReport {
        n: preds.len(),
        accuracy: accuracy(preds, labels)?,
        macro_auc: macro_auc(preds, labels)?,
        per_class_auc: per_class_auc(preds, labels)?,
        confusion: confusion_matrix(preds, labels)?,
        adjacent_error_rate: adj,
        no_misclassified: none_wrong,
    })
}

impl EvalReport {
    /// Row support: how many test samples truly carry each level.
    pub fn support(&self, level: LogLevel) -> usize {
        self.confusion[level.ordinal()].iter().sum()
    }

    /// Confusion matrix as CSV, predictions across, truths down.
    pub fn confusion_csv(&self) -> String {
        let mut out = String::from("true\\pred");
        for l in LogLevel::ALL {
            out.push(',');
            out.push_str(l.name());
        }
        out.push('\n');
        for l in LogLevel::ALL {
            out.push_str(l.name());
            for &c in &self.confusion[l.ordinal()] {
                out.push(',');
                out.push_str(&c.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Human-readable summary. Levels truly present in under 0.1% of the
    /// set are left out of the per-class table; the JSON keeps them.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("samples            {}\n", self.n));
        out.push_str(&format!("accuracy           {:.4}\n", self.accuracy));
        match self.macro_auc {
            Some(v) => out.push_str(&format!("macro auc          {v:.4}\n")),
            None => out.push_str("macro auc          n/a\n"),
        }
        out.push_str(&format!(
            "adjacent err rate  {:.4}{}\n",
            self.adjacent_error_rate,
            if self.no_misclassified { " (no misclassifications)" } else { "" }
        ));
        out.push_str("level    support  auc\n");
        for l in LogLevel::ALL {
            let support = self.support(l);
            if (support as f64) < 0.001 * self.n as f64 {
                continue;
            }
            let auc = match self.per_class_auc[l.ordinal()] {
                Some(v) => format!("{v:.4}"),
                None => "n/a".into(),
            };
            out.push_str(&format!("{:<8} {:>7}  {}\n", l.name(), support, auc));
        }
        out
    }
}
