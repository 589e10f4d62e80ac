//! `trials.csv`, `summary.csv` and `anytime_profile.svg`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path as FsPath, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ExperimentOutput, HarnessError, PlannerKind, SummaryStats, TrialRecord};

/// Column order of `trials.csv`.
pub const TRIALS_COLUMNS: [&str; 11] = [
    "trial_id",
    "planner",
    "start",
    "goal",
    "budget_ms",
    "success",
    "cost",
    "plan_ms",
    "n_iterations",
    "final_epsilon",
    "optimal_flag",
];

/// One `trials.csv` row. Optional numbers are empty when absent; `plan_ms`
/// is `-` when wall-clock columns are withheld.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial_id: u32,
    pub planner: String,
    pub start: String,
    pub goal: String,
    pub budget_ms: u64,
    pub success: bool,
    pub cost: String,
    pub plan_ms: String,
    pub n_iterations: u32,
    pub final_epsilon: String,
    pub optimal_flag: bool,
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6}")
    } else {
        String::new()
    }
}

impl TrialRow {
    fn from_record(r: &TrialRecord, with_time: bool) -> Self {
        TrialRow {
            trial_id: r.trial_id,
            planner: r.planner.name().to_string(),
            start: r.start.to_string(),
            goal: r.goal.to_string(),
            budget_ms: r.budget_ms,
            success: r.success,
            cost: opt(r.cost),
            plan_ms: if with_time {
                format!("{:.3}", r.plan_ms)
            } else {
                "-".into()
            },
            n_iterations: r.n_iterations,
            final_epsilon: opt(r.final_epsilon),
            optimal_flag: r.optimal,
        }
    }
}

fn write_trials(
    path: &FsPath,
    records: &[TrialRecord],
    with_time: bool,
) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    if records.is_empty() {
        w.write_record(TRIALS_COLUMNS)?;
    }
    for r in records {
        w.serialize(TrialRow::from_record(r, with_time))?;
    }
    w.flush()?;
    Ok(())
}

fn write_timings(path: &FsPath, records: &[TrialRecord]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["trial_id", "planner", "plan_ms"])?;
    for r in records {
        w.write_record([
            r.trial_id.to_string(),
            r.planner.name().to_string(),
            format!("{:.3}", r.plan_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_summary(path: &FsPath, stats: &[SummaryStats]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "planner",
        "trials",
        "successes",
        "success_rate",
        "common_solved",
        "mean_cost",
        "mean_plan_ms",
        "std_plan_ms",
        "mean_suboptimality",
    ])?;
    for s in stats {
        w.write_record([
            s.planner.name().to_string(),
            s.trials.to_string(),
            s.successes.to_string(),
            num(s.success_rate),
            s.common_solved.to_string(),
            num(s.mean_cost),
            num(s.mean_plan_ms),
            num(s.std_plan_ms),
            num(s.mean_suboptimality),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trials_csv(path: &FsPath) -> Result<Vec<TrialRow>, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

type CurvePoint = (f64, f64, Option<f64>);

/// (time, mean suboptimality, mean epsilon) points for one planner. At each
/// sample time, every trial that already has a solution contributes its
/// latest cost over the oracle cost.
fn curve(records: &[&TrialRecord]) -> Vec<CurvePoint> {
    let trials: Vec<_> = records
        .iter()
        .filter(|r| r.success && r.oracle_cost.is_some_and(|o| o > 0.0) && !r.profile.is_empty())
        .collect();
    let mut times: Vec<f64> = trials
        .iter()
        .flat_map(|r| r.profile.iter().map(|s| s.time_ms))
        .collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
        .into_iter()
        .map(|t| {
            let mut sub = Vec::new();
            let mut eps = Vec::new();
            for r in &trials {
                if let Some(s) = r.profile.iter().take_while(|s| s.time_ms <= t).last() {
                    sub.push(s.cost / r.oracle_cost.unwrap_or(1.0));
                    eps.extend(s.epsilon);
                }
            }
            let m = sub.iter().sum::<f64>() / sub.len() as f64;
            let e = (!eps.is_empty()).then(|| eps.iter().sum::<f64>() / eps.len() as f64);
            (t, m, e)
        })
        .collect()
}

const COLORS: [&str; 6] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02",
];

/// Mean suboptimality against time, one polyline per planner that produced
/// at least one solution, vertices annotated with the mean inflation.
pub fn profile_svg(records: &[TrialRecord]) -> String {
    let mut by: BTreeMap<PlannerKind, Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        by.entry(r.planner).or_default().push(r);
    }
    let curves: Vec<(PlannerKind, Vec<CurvePoint>)> = by
        .into_iter()
        .map(|(p, rs)| (p, curve(&rs)))
        .filter(|(_, c)| !c.is_empty())
        .collect();
    let (w, h, pad) = (720.0, 420.0, 60.0);
    let t_max = curves
        .iter()
        .flat_map(|(_, c)| c.iter().map(|p| p.0))
        .fold(1e-3, f64::max);
    let s_max = curves
        .iter()
        .flat_map(|(_, c)| c.iter().map(|p| p.1))
        .fold(1.0, f64::max)
        .max(1.0 + 1e-9);
    let x = |t: f64| pad + (t / t_max) * (w - 2.0 * pad);
    let y = |s: f64| h - pad - ((s - 1.0) / (s_max - 1.0)) * (h - 2.0 * pad);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<path d="M{pad} {pad} V{} H{}" fill="none" stroke="black"/>"#,
        h - pad,
        w - pad
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">time [ms] (max {t_max:.1})</text>"#,
        w / 2.0,
        h - 20.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">mean cost / optimal (1 to {s_max:.2})</text>"#,
        h / 2.0,
        h / 2.0
    );
    for (i, (planner, pts)) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = pts
            .iter()
            .map(|p| format!("{:.2},{:.2}", x(p.0), y(p.1)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline data-planner="{planner}" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            coords.join(" ")
        );
        for p in pts {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                x(p.0),
                y(p.1)
            );
            if let Some(e) = p.2 {
                let _ = writeln!(
                    svg,
                    r#"<text x="{:.2}" y="{:.2}" fill="{color}" font-size="9">ε={e:.2}</text>"#,
                    x(p.0) + 3.0,
                    y(p.1) - 4.0
                );
            }
        }
        let ly = pad + 14.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{ly}" fill="{color}">{planner}</text>"#,
            w - pad - 90.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Writes `trials.csv`, `summary.csv`, `anytime_profile.svg` and, when
/// `deterministic` withholds wall-clock times from `trials.csv`,
/// `timings.csv`. Returns the written paths.
pub fn emit_results(
    output: &ExperimentOutput,
    outdir: &FsPath,
    deterministic: bool,
) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(outdir)?;
    let mut written = Vec::new();
    let trials = outdir.join("trials.csv");
    write_trials(&trials, &output.records, !deterministic)?;
    written.push(trials);
    if deterministic {
        let t = outdir.join("timings.csv");
        write_timings(&t, &output.records)?;
        written.push(t);
    }
    let summary = outdir.join("summary.csv");
    write_summary(&summary, &output.stats)?;
    written.push(summary);
    let svg = outdir.join("anytime_profile.svg");
    std::fs::write(&svg, profile_svg(&output.records))?;
    written.push(svg);
    Ok(written)
}
