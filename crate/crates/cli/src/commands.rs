use std::fmt;

use rayon::prelude::*;
use scoot_core::dataset::{load_image, load_ranked_manifest, load_triplet_manifest};
use scoot_core::eval::{ContentCapture, JudgmentAgreement, RankStability};
use scoot_core::report::{format_sig6, write_report, ProtocolKnobs, ReportRow, ScoreReport};
use scoot_core::synthetic::write_fixture_set;
use scoot_core::{
    run_judgment, run_mm1, run_mm2, run_mm3, scoot_score, ContentSet, GrayImage, MetaResult,
    RankedSet, ScootConfig, ScootError, Triplet,
};

use crate::args::{Command, OutputArgs};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or configuration; exit code 1.
    Config(String),
    /// Unreadable or invalid input data; exit code 2.
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Data(m) => f.write_str(m),
        }
    }
}

impl From<ScootError> for CliError {
    fn from(e: ScootError) -> Self {
        if e.is_config_error() {
            CliError::Config(e.to_string())
        } else {
            CliError::Data(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

// Input problems discovered while running (e.g. an image too small for the
// grid) are data errors even though the core reports them as parameters.
fn data(e: ScootError) -> CliError {
    CliError::Data(e.to_string())
}

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Score {
            synthetic,
            reference,
            config,
        } => {
            let cfg = config.to_config()?;
            let x = load_image(&synthetic)?;
            let y = load_image(&reference)?;
            let score = scoot_score(&x, &y, &cfg).map_err(data)?;
            println!("{score:.6}");
            Ok(())
        }
        Command::Batch {
            manifest,
            config,
            output,
        } => {
            let cfg = config.to_config()?;
            output.resolve_format()?;
            let sets = load_ranked_manifest(&manifest)?.load_content_sets()?;
            let mut report = ScoreReport::new("batch", cfg.clone(), ProtocolKnobs::default());
            report.rows = batch_rows(&sets, &cfg);
            println!("scored {} pairs", report.rows.len());
            emit(&report, &output)
        }
        Command::Mm1 {
            manifest,
            config,
            protocol,
            output,
        } => {
            let cfg = config.to_config()?;
            let knobs = protocol.to_knobs()?;
            output.resolve_format()?;
            let sets = load_ranked_manifest(&manifest)?.load_sets()?;
            let result = run_mm1(&sets, &cfg, knobs.downsize_px);
            let mut report = ScoreReport::new("mm1", cfg, knobs);
            report.rows = stability_rows(&result);
            report.set_aggregate(MetaResult {
                mm1_theta: result.mean_theta,
                ..MetaResult::default()
            });
            print_aggregate(
                "mm1 theta",
                result.mean_theta,
                result.sets.len(),
                result.excluded,
            );
            emit(&report, &output)
        }
        Command::Mm2 {
            manifest,
            config,
            protocol,
            output,
        } => {
            let cfg = config.to_config()?;
            let knobs = protocol.to_knobs()?;
            output.resolve_format()?;
            let sets = load_ranked_manifest(&manifest)?.load_sets()?;
            let result = run_mm2(&sets, &cfg, knobs.rotate_deg);
            let mut report = ScoreReport::new("mm2", cfg, knobs);
            report.rows = stability_rows(&result);
            report.set_aggregate(MetaResult {
                mm2_theta: result.mean_theta,
                ..MetaResult::default()
            });
            print_aggregate(
                "mm2 theta",
                result.mean_theta,
                result.sets.len(),
                result.excluded,
            );
            emit(&report, &output)
        }
        Command::Mm3 {
            manifest,
            config,
            protocol,
            output,
        } => {
            let cfg = config.to_config()?;
            let knobs = protocol.to_knobs()?;
            output.resolve_format()?;
            let sets = load_ranked_manifest(&manifest)?.load_content_sets()?;
            let result = run_mm3(&sets, &cfg, knobs.stroke_threshold);
            let mut report = ScoreReport::new("mm3", cfg, knobs);
            report.rows = content_rows(&result);
            report.set_aggregate(MetaResult {
                mm3_rate: result.rate,
                ..MetaResult::default()
            });
            print_aggregate("mm3 rate", result.rate, result.items.len(), result.skipped);
            emit(&report, &output)
        }
        Command::Judge {
            triplets,
            config,
            output,
        } => {
            let cfg = config.to_config()?;
            output.resolve_format()?;
            let triplets = load_triplet_manifest(&triplets)?.load_triplets()?;
            let result = run_judgment(&triplets, &cfg).map_err(data)?;
            let mut report = ScoreReport::new("judge", cfg, ProtocolKnobs::default());
            report.rows = judgment_rows(&result);
            report.set_aggregate(MetaResult {
                jud_rate: result.rate,
                ..MetaResult::default()
            });
            print_aggregate(
                "judgment agreement",
                result.rate,
                result.items.len(),
                result.excluded,
            );
            emit(&report, &output)
        }
        Command::Sweep {
            manifest,
            k_list,
            levels_list,
            measures,
            triplets,
            config,
            protocol,
            output,
        } => {
            let base = config.to_config()?;
            let knobs = protocol.to_knobs()?;
            output.resolve_format()?;
            let plan = SweepPlan::new(&k_list, &levels_list, &measures, triplets.is_some(), &base)?;

            let ranked = load_ranked_manifest(&manifest)?;
            let sets = if plan.mm1 || plan.mm2 {
                ranked.load_sets()?
            } else {
                Vec::new()
            };
            let contents = if plan.mm3 {
                ranked.load_content_sets()?
            } else {
                Vec::new()
            };
            let triplets = match &triplets {
                Some(p) if plan.judge => load_triplet_manifest(p)?.load_triplets()?,
                _ => Vec::new(),
            };
            let inputs = SweepInputs {
                sets,
                contents,
                triplets,
            };
            let mut report = ScoreReport::new("sweep", base.clone(), knobs.clone());
            report.rows = sweep_rows(&plan, &inputs, &base, &knobs);
            println!("swept {} combinations", report.rows.len());
            emit(&report, &output)
        }
        Command::Fixtures { dir, count } => {
            if count == 0 {
                return Err(CliError::Config("--count must be at least 1".into()));
            }
            let paths = write_fixture_set(&dir, count)?;
            println!("{}", paths.ranked_manifest.display());
            println!("{}", paths.triplet_manifest.display());
            Ok(())
        }
    }
}

fn emit(report: &ScoreReport, output: &OutputArgs) -> CliResult<()> {
    if let Some(path) = &output.out {
        write_report(report, path, output.resolve_format()?)?;
    }
    Ok(())
}

fn print_aggregate(label: &str, value: Option<f64>, items: usize, excluded: usize) {
    let shown = value.map(format_sig6).unwrap_or_else(|| "n/a".into());
    println!("{label}: {shown} ({items} items, {excluded} excluded)");
}

fn batch_rows(sets: &[ContentSet], cfg: &ScootConfig) -> Vec<ReportRow> {
    let pairs: Vec<(&ContentSet, &String, &GrayImage)> = sets
        .iter()
        .flat_map(|s| s.outputs.iter().map(move |(alg, img)| (s, alg, img)))
        .collect();
    pairs
        .par_iter()
        .map(|(set, alg, img)| {
            let row = ReportRow::new(format!("{}|{alg}", set.id));
            match scoot_score(img, &set.reference, cfg) {
                Ok(s) => row.with("score", s),
                Err(e) => row.with_note(e.to_string()),
            }
        })
        .collect()
}

fn stability_rows(result: &RankStability) -> Vec<ReportRow> {
    result
        .sets
        .iter()
        .map(|s| {
            let row = ReportRow::new(&s.id).with_opt("theta", s.theta);
            match &s.error {
                Some(e) => row.with_note(e),
                None => row,
            }
        })
        .collect()
}

fn content_rows(result: &ContentCapture) -> Vec<ReportRow> {
    result
        .items
        .iter()
        .map(|o| {
            let row = ReportRow::new(&o.id)
                .with_opt("output_mean", o.output_mean)
                .with_opt("light_score", o.light_score)
                .with_opt("success", o.success.map(|s| if s { 1.0 } else { 0.0 }));
            match &o.error {
                Some(e) => row.with_note(e),
                None => row,
            }
        })
        .collect()
}

fn judgment_rows(result: &JudgmentAgreement) -> Vec<ReportRow> {
    result
        .items
        .iter()
        .map(|o| {
            let row = ReportRow::new(&o.id)
                .with_opt("score0", o.score0)
                .with_opt("score1", o.score1)
                .with("q", o.q as f64)
                .with_opt("agreement", o.agreement);
            match &o.error {
                Some(e) => row.with_note(e),
                None => row,
            }
        })
        .collect()
}

struct SweepPlan {
    ks: Vec<usize>,
    levels: Vec<usize>,
    mm1: bool,
    mm2: bool,
    mm3: bool,
    judge: bool,
}

impl SweepPlan {
    fn new(
        ks: &[usize],
        levels: &[usize],
        measures: &[String],
        have_triplets: bool,
        base: &ScootConfig,
    ) -> CliResult<Self> {
        if ks.is_empty() || levels.is_empty() {
            return Err(CliError::Config(
                "--k-list and --levels-list must be non-empty".into(),
            ));
        }
        for &k in ks {
            for &l in levels {
                ScootConfig {
                    grid_k: k,
                    levels: l,
                    ..base.clone()
                }
                .validate()?;
            }
        }
        let mut plan = SweepPlan {
            ks: ks.to_vec(),
            levels: levels.to_vec(),
            mm1: false,
            mm2: false,
            mm3: false,
            judge: false,
        };
        for m in measures {
            match m.trim().to_ascii_lowercase().as_str() {
                "mm1" => plan.mm1 = true,
                "mm2" => plan.mm2 = true,
                "mm3" => plan.mm3 = true,
                "judge" | "jud" => plan.judge = true,
                other => {
                    return Err(CliError::Config(format!(
                        "unknown measure '{other}', expected mm1, mm2, mm3 or judge"
                    )))
                }
            }
        }
        if plan.judge && !have_triplets {
            return Err(CliError::Config("measure 'judge' needs --triplets".into()));
        }
        if !(plan.mm1 || plan.mm2 || plan.mm3 || plan.judge) {
            return Err(CliError::Config("no measures selected".into()));
        }
        Ok(plan)
    }
}

struct SweepInputs {
    sets: Vec<RankedSet>,
    contents: Vec<ContentSet>,
    triplets: Vec<Triplet>,
}

impl SweepInputs {
    // smallest side of any image a metric will see, perturbed references included
    fn smallest_side(&self, plan: &SweepPlan, knobs: &ProtocolKnobs) -> Option<usize> {
        let side = |img: &GrayImage| img.width().min(img.height());
        let mut sides: Vec<usize> = Vec::new();
        for s in &self.sets {
            sides.push(side(&s.reference));
            sides.extend(s.candidates.iter().map(|(_, c)| side(c)));
            if plan.mm1 {
                sides.push(side(&s.reference).saturating_sub(knobs.downsize_px));
            }
        }
        for s in &self.contents {
            sides.push(side(&s.reference));
            sides.extend(s.outputs.iter().map(|(_, c)| side(c)));
        }
        for t in &self.triplets {
            sides.extend([side(&t.reference), side(&t.s0), side(&t.s1)]);
        }
        sides.into_iter().min()
    }
}

fn sweep_rows(
    plan: &SweepPlan,
    inputs: &SweepInputs,
    base: &ScootConfig,
    knobs: &ProtocolKnobs,
) -> Vec<ReportRow> {
    let smallest = inputs.smallest_side(plan, knobs);
    let mut rows = Vec::new();
    for &k in &plan.ks {
        for &levels in &plan.levels {
            let cfg = ScootConfig {
                grid_k: k,
                levels,
                ..base.clone()
            };
            let mut row = ReportRow::new(format!("k={k},levels={levels}"))
                .with("grid_k", k as f64)
                .with("levels", levels as f64)
                .with("feature_len", cfg.feature_len() as f64);
            if let Some(side) = smallest.filter(|&s| s < k) {
                rows.push(row.with_note(format!(
                    "skipped: grid {k}x{k} exceeds smallest image side {side}"
                )));
                continue;
            }
            if plan.mm1 {
                row = row.with_opt(
                    "mm1_theta",
                    run_mm1(&inputs.sets, &cfg, knobs.downsize_px).mean_theta,
                );
            }
            if plan.mm2 {
                row = row.with_opt(
                    "mm2_theta",
                    run_mm2(&inputs.sets, &cfg, knobs.rotate_deg).mean_theta,
                );
            }
            if plan.mm3 {
                row = row.with_opt(
                    "mm3_rate",
                    run_mm3(&inputs.contents, &cfg, knobs.stroke_threshold).rate,
                );
            }
            if plan.judge {
                match run_judgment(&inputs.triplets, &cfg) {
                    Ok(j) => row = row.with_opt("jud_rate", j.rate),
                    Err(e) => row = row.with_note(e.to_string()),
                }
            }
            rows.push(row);
        }
    }
    rows
}
