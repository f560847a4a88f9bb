//! Meta-measures that evaluate a similarity metric.
//!
//! * rank stability under a slight reference perturbation (`theta = 1 - rho`,
//!   Spearman's rho over the candidate scores before and after),
//! * content capture: complete sketches must beat a light-stroke residual,
//! * agreement with two-alternative forced-choice human judgments.
//!
//! Items are evaluated in parallel on the current rayon pool; results keep
//! input order and aggregates are reduced sequentially, so the outcome does not
//! depend on the thread count.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScootError};
use crate::image::GrayImage;
use crate::metric::Metric;
use crate::transforms::{threshold_strokes, StrokeKeep, TransformSpec};

/// A reference sketch with the synthetic sketches competing for it.
#[derive(Clone, Debug)]
pub struct RankedSet {
    pub id: String,
    pub reference: GrayImage,
    pub candidates: Vec<(String, GrayImage)>,
}

impl RankedSet {
    pub fn new(
        id: impl Into<String>,
        reference: GrayImage,
        candidates: Vec<(String, GrayImage)>,
    ) -> Result<Self> {
        let id = id.into();
        if candidates.len() < 2 {
            return Err(ScootError::invalid(format!(
                "ranked set {id} needs at least 2 candidates, has {}",
                candidates.len()
            )));
        }
        check_unique(&id, candidates.iter().map(|(a, _)| a.as_str()))?;
        Ok(Self {
            id,
            reference,
            candidates,
        })
    }
}

/// A reference with the outputs of several synthesis algorithms, for content capture.
#[derive(Clone, Debug)]
pub struct ContentSet {
    pub id: String,
    pub reference: GrayImage,
    pub outputs: Vec<(String, GrayImage)>,
}

/// One 2AFC judgment: `q` is the index (0 or 1) of the sketch viewers found closer.
#[derive(Clone, Debug)]
pub struct Triplet {
    pub id: String,
    pub reference: GrayImage,
    pub s0: GrayImage,
    pub s1: GrayImage,
    q: u8,
}

impl Triplet {
    pub fn new(
        id: impl Into<String>,
        reference: GrayImage,
        s0: GrayImage,
        s1: GrayImage,
        q: u8,
    ) -> Result<Self> {
        if q > 1 {
            return Err(ScootError::invalid(format!(
                "judgment q must be 0 or 1, got {q}"
            )));
        }
        Ok(Self {
            id: id.into(),
            reference,
            s0,
            s1,
            q,
        })
    }

    pub fn q(&self) -> u8 {
        self.q
    }
}

pub(crate) fn check_unique<'a>(id: &str, names: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut seen = HashSet::new();
    for name in names {
        if !seen.insert(name) {
            return Err(ScootError::invalid(format!(
                "algorithm '{name}' listed twice in {id}"
            )));
        }
    }
    Ok(())
}

/// Aggregate of whichever meta-measures were run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetaResult {
    pub mm1_theta: Option<f64>,
    pub mm2_theta: Option<f64>,
    pub mm3_rate: Option<f64>,
    pub jud_rate: Option<f64>,
}

/// Average ranks (1-based), ties sharing the mean of the positions they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end share their mean rank
        let rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

/// `1 - rho` where rho is Spearman's rank correlation (average ranks on ties).
/// 0 means identical ordering, 2 means exactly reversed.
pub fn spearman_theta(scores_a: &[f64], scores_b: &[f64]) -> Result<f64> {
    if scores_a.len() != scores_b.len() {
        return Err(ScootError::invalid(format!(
            "score lists differ in length: {} vs {}",
            scores_a.len(),
            scores_b.len()
        )));
    }
    if scores_a.len() < 2 {
        return Err(ScootError::invalid(
            "rank correlation needs at least 2 scores",
        ));
    }
    if scores_a.iter().chain(scores_b).any(|s| !s.is_finite()) {
        return Err(ScootError::invalid("scores must be finite"));
    }
    let ra = average_ranks(scores_a);
    let rb = average_ranks(scores_b);
    let n = ra.len() as f64;
    // the mean of ranks 1..=n is exact regardless of ties
    let mean = (n + 1.0) / 2.0;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (a, b) in ra.iter().zip(&rb) {
        let (da, db) = (a - mean, b - mean);
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(ScootError::DegenerateRanking(ra.len()));
    }
    let rho = sab / (saa * sbb).sqrt();
    Ok((1.0 - rho).clamp(0.0, 2.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetOutcome {
    pub id: String,
    pub original_scores: Vec<f64>,
    pub perturbed_scores: Vec<f64>,
    pub theta: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankStability {
    /// Mean theta over the sets that produced one; `None` if none did.
    pub mean_theta: Option<f64>,
    pub sets: Vec<SetOutcome>,
    pub excluded: usize,
}

/// Rank stability of `metric` when every reference is replaced by `perturb(reference)`.
pub fn run_rank_stability<M: Metric + ?Sized>(
    sets: &[RankedSet],
    metric: &M,
    perturb: TransformSpec,
) -> RankStability {
    let outcomes: Vec<SetOutcome> = sets
        .par_iter()
        .map(|set| rank_stability_of_set(set, metric, perturb))
        .collect();
    let thetas: Vec<f64> = outcomes.iter().filter_map(|o| o.theta).collect();
    RankStability {
        mean_theta: mean(&thetas),
        excluded: outcomes.len() - thetas.len(),
        sets: outcomes,
    }
}

fn rank_stability_of_set<M: Metric + ?Sized>(
    set: &RankedSet,
    metric: &M,
    perturb: TransformSpec,
) -> SetOutcome {
    let mut outcome = SetOutcome {
        id: set.id.clone(),
        original_scores: Vec::new(),
        perturbed_scores: Vec::new(),
        theta: None,
        error: None,
    };
    let result = (|| -> Result<f64> {
        let perturbed = perturb.apply(&set.reference)?;
        for (_, cand) in &set.candidates {
            outcome
                .original_scores
                .push(metric.score(cand, &set.reference)?);
            outcome
                .perturbed_scores
                .push(metric.score(cand, &perturbed)?);
        }
        spearman_theta(&outcome.original_scores, &outcome.perturbed_scores)
    })();
    match result {
        Ok(theta) => outcome.theta = Some(theta),
        Err(e) => outcome.error = Some(e.to_string()),
    }
    outcome
}

/// Stability to a slight nearest-neighbour downsizing of the reference.
pub fn run_mm1<M: Metric + ?Sized>(sets: &[RankedSet], metric: &M, pixels: usize) -> RankStability {
    run_rank_stability(sets, metric, TransformSpec::Downsize(pixels))
}

/// Stability to a slight counter-clockwise rotation of the reference.
pub fn run_mm2<M: Metric + ?Sized>(sets: &[RankedSet], metric: &M, degrees: f64) -> RankStability {
    run_rank_stability(sets, metric, TransformSpec::Rotate(degrees))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContentOutcome {
    pub id: String,
    pub output_mean: Option<f64>,
    pub light_score: Option<f64>,
    pub success: Option<bool>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContentCapture {
    /// Fraction of evaluated references whose mean output score strictly beats
    /// the light-stroke score.
    pub rate: Option<f64>,
    pub items: Vec<ContentOutcome>,
    pub skipped: usize,
}

/// Content capture: the mean score of complete synthetic sketches against the
/// score of the reference's own light strokes (darker strokes whitened at `threshold`).
pub fn run_mm3<M: Metric + ?Sized>(
    sets: &[ContentSet],
    metric: &M,
    threshold: u16,
) -> ContentCapture {
    let items: Vec<ContentOutcome> = sets
        .par_iter()
        .map(|set| {
            let mut out = ContentOutcome {
                id: set.id.clone(),
                output_mean: None,
                light_score: None,
                success: None,
                error: None,
            };
            if set.outputs.is_empty() {
                out.error = Some("no synthetic outputs; skipped".into());
                return out;
            }
            let result = (|| -> Result<(f64, f64)> {
                let mut scores = Vec::with_capacity(set.outputs.len());
                for (_, img) in &set.outputs {
                    scores.push(metric.score(img, &set.reference)?);
                }
                let light = threshold_strokes(&set.reference, threshold, StrokeKeep::Light);
                let light_score = metric.score(&light, &set.reference)?;
                Ok((mean(&scores).expect("non-empty"), light_score))
            })();
            match result {
                Ok((m, l)) => {
                    out.output_mean = Some(m);
                    out.light_score = Some(l);
                    out.success = Some(m > l);
                }
                Err(e) => out.error = Some(e.to_string()),
            }
            out
        })
        .collect();
    let decided: Vec<f64> = items
        .iter()
        .filter_map(|o| o.success.map(|s| if s { 1.0 } else { 0.0 }))
        .collect();
    ContentCapture {
        rate: mean(&decided),
        skipped: items.len() - decided.len(),
        items,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JudgmentOutcome {
    pub id: String,
    pub score0: Option<f64>,
    pub score1: Option<f64>,
    pub q: u8,
    /// 1 on agreement, 0 on disagreement, 0.5 on an exact score tie.
    pub agreement: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JudgmentAgreement {
    pub rate: Option<f64>,
    pub items: Vec<JudgmentOutcome>,
    pub excluded: usize,
}

/// Fraction of triplets where the metric prefers the same sketch as the viewers.
pub fn run_judgment<M: Metric + ?Sized>(
    triplets: &[Triplet],
    metric: &M,
) -> Result<JudgmentAgreement> {
    if triplets.is_empty() {
        return Err(ScootError::invalid(
            "judgment agreement needs at least one triplet",
        ));
    }
    let items: Vec<JudgmentOutcome> = triplets
        .par_iter()
        .map(|t| {
            let mut out = JudgmentOutcome {
                id: t.id.clone(),
                score0: None,
                score1: None,
                q: t.q,
                agreement: None,
                error: None,
            };
            let scored = metric
                .score(&t.s0, &t.reference)
                .and_then(|a| metric.score(&t.s1, &t.reference).map(|b| (a, b)));
            match scored {
                Ok((a, b)) => {
                    out.score0 = Some(a);
                    out.score1 = Some(b);
                    out.agreement = Some(agreement(a, b, t.q));
                }
                Err(e) => out.error = Some(e.to_string()),
            }
            out
        })
        .collect();
    let agreed: Vec<f64> = items.iter().filter_map(|o| o.agreement).collect();
    Ok(JudgmentAgreement {
        rate: mean(&agreed),
        excluded: items.len() - agreed.len(),
        items,
    })
}

fn agreement(score0: f64, score1: f64, q: u8) -> f64 {
    if score0 == score1 {
        return 0.5;
    }
    let choice = if score0 > score1 { 0 } else { 1 };
    if choice == q {
        1.0
    } else {
        0.0
    }
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}
