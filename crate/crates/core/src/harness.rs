//! Batch experiment runner: builds a gallery configuration, runs the
//! enabled diagnostics in a fixed order, and writes CSV files plus a JSON
//! report. Reports embed their spec and seed, so a run can be replayed and
//! byte-compared.
//!
//! Exit-code contract: 0 success, 1 bad input (nothing written), 2 a
//! mathematical construction failed (other results still written), 3 replay
//! mismatch.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::input;
use crate::gallery::{classify_fourtuples, ClassifyThresholds, GalleryConfig};
use crate::johnson::{condition_d, generate_walk, FourSet};
use crate::regularity::{dichotomy_scan_opts, WitnessOptions};
use crate::rng::{stateless, SplitMix64};
use crate::schedule::{active_set, run_to_norm, run_trajectory, Schedule, Trajectory};
use crate::subspace::{write_text, Subspace};
use crate::transport::{build_transport_plan, demo_epsilons, TransportPlan};
use crate::{Error, Result};

/// Which diagnostics an experiment runs.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct DiagnosticFlags {
    #[serde(default)]
    pub witness: bool,
    #[serde(default)]
    pub rate: bool,
    #[serde(default)]
    pub johnson: bool,
    #[serde(default)]
    pub trajectory: bool,
    #[serde(default)]
    pub transport: bool,
}

impl DiagnosticFlags {
    pub fn any(&self) -> bool {
        self.witness || self.rate || self.johnson || self.trajectory || self.transport
    }
}

fn default_trajectory_csv_steps() -> usize {
    2000
}

fn default_convergence_max_steps() -> usize {
    1_000_000
}

fn default_convergence_target() -> f64 {
    1e-3
}

/// Full description of one experiment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub gallery: GalleryConfig,
    #[serde(default)]
    pub truncations: Vec<usize>,
    #[serde(default)]
    pub schedules: Vec<Schedule>,
    pub diagnostics: DiagnosticFlags,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Steps recorded into each trajectory CSV.
    #[serde(default = "default_trajectory_csv_steps")]
    pub trajectory_csv_steps: usize,
    /// Step budget for the convergence runner.
    #[serde(default = "default_convergence_max_steps")]
    pub convergence_max_steps: usize,
    /// Norm at which the convergence runner stops.
    #[serde(default = "default_convergence_target")]
    pub convergence_target: f64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.diagnostics.any() {
            return Err(input("spec: no diagnostic enabled"));
        }
        if (self.diagnostics.witness || self.diagnostics.rate) && self.truncations.is_empty() {
            return Err(input(
                "spec: witness/rate diagnostics need a nonempty truncation list",
            ));
        }
        if self.diagnostics.johnson {
            if self.truncations.len() < 2 {
                return Err(input(
                    "spec: the johnson diagnostic needs at least two truncation levels",
                ));
            }
            if self.gallery.k() < 4 {
                return Err(input("spec: the johnson diagnostic needs K >= 4"));
            }
        }
        if !self.truncations.is_empty() && self.truncations.windows(2).any(|w| w[0] >= w[1]) {
            return Err(input("spec: truncations must strictly increase"));
        }
        if self.diagnostics.trajectory {
            if self.schedules.is_empty() {
                return Err(input("spec: the trajectory diagnostic needs schedules"));
            }
            for s in &self.schedules {
                s.validate()?;
                if s.k() != self.gallery.k() {
                    return Err(input(format!(
                        "spec: schedule K = {} but the gallery has {} subspaces",
                        s.k(),
                        self.gallery.k()
                    )));
                }
            }
        }
        if self.trajectory_csv_steps == 0 || self.convergence_max_steps == 0 {
            return Err(input("spec: step budgets must be positive"));
        }
        if !self.convergence_target.is_finite() || self.convergence_target <= 0.0 {
            return Err(input("spec: convergence target must be positive"));
        }
        Ok(())
    }
}

/// One row of the scan CSV.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: usize,
    pub witness_gap: f64,
    pub max_dist: f64,
    pub rate: Option<f64>,
    pub witness: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanSection {
    pub csv: String,
    pub truncations: Vec<usize>,
    pub rows: Vec<ScanRow>,
    pub gap_vanishing: bool,
    pub rate_to_one: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JohnsonSection {
    pub labels_csv: String,
    pub condition_d: bool,
    pub certificate: Option<Vec<[usize; 4]>>,
    pub walk_file: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrajectorySection {
    pub label: String,
    pub schedule: Schedule,
    pub csv: String,
    pub steps_to_target: usize,
    pub final_norm: f64,
    pub reached_target: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransportBlockSummary {
    pub index: usize,
    pub epsilon: f64,
    pub ladder_size: usize,
    pub word_len: usize,
    pub loss: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransportSection {
    pub json: String,
    pub csv: String,
    pub blocks: Vec<TransportBlockSummary>,
    pub sum_epsilon: f64,
    pub total_loss: f64,
    pub boundary_losses: Vec<f64>,
    /// Smallest step index from which every later point keeps at least
    /// three lines within distance 0.1.
    pub located_m: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FailureNote {
    pub stage: String,
    pub code: String,
    pub detail: String,
}

/// The report written to report.json.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub spec: ExperimentSpec,
    pub seed: u64,
    pub csv_files: Vec<String>,
    pub scan: Option<ScanSection>,
    pub johnson: Option<JohnsonSection>,
    pub trajectories: Vec<TrajectorySection>,
    pub transport: Option<TransportSection>,
    pub failures: Vec<FailureNote>,
}

/// Result of a completed run.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub report_path: PathBuf,
    pub report: ExperimentReport,
}

/// Deterministic decimal formatting: 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Radius of the active-set diagnostic on the transport demo trajectory.
pub const ACTIVE_SET_RADIUS: f64 = 0.1;

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut f = fs::File::create(path)?;
    f.write_all(contents.as_bytes())?;
    Ok(())
}

fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("step,index,norm,drop\n");
    for i in 1..=traj.steps() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            i,
            traj.schedule_used[i - 1],
            format_float(traj.norms[i]),
            format_float(traj.per_step_drop[i - 1]),
        ));
    }
    out
}

/// Build the gallery and write its subspaces in the plain-text format, plus
/// the configuration (with its coordinate layout note) as JSON.
pub fn run_build(spec: &ExperimentSpec) -> Result<Vec<PathBuf>> {
    let family = spec.gallery.build()?;
    let dir = spec.output_dir.join("subspaces");
    fs::create_dir_all(&dir)?;
    let mut written = Vec::new();
    for (i, s) in family.iter().enumerate() {
        let path = dir.join(format!("L{:02}.txt", i + 1));
        let mut buf = Vec::new();
        write_text(s, &mut buf)?;
        fs::write(&path, buf)?;
        written.push(path);
    }
    let config_path = spec.output_dir.join("gallery.json");
    let described = serde_json::json!({
        "config": &spec.gallery,
        "layout": spec.gallery.layout_note(),
    });
    write_file(&config_path, &serde_json::to_string_pretty(&described)?)?;
    written.push(config_path);
    Ok(written)
}

/// Run the enabled diagnostics in the fixed order build, classify/johnson,
/// scans, trajectories, transport. Construction failures are recorded and
/// reported with exit code 2; everything else still gets written.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunOutcome> {
    spec.validate()?;
    // Probe the gallery construction before creating any output.
    let base_family = spec.gallery.build()?;
    fs::create_dir_all(&spec.output_dir)?;

    let mut csv_files: Vec<String> = Vec::new();
    let mut failures: Vec<FailureNote> = Vec::new();

    let johnson = if spec.diagnostics.johnson {
        Some(run_johnson_stage(spec, &mut csv_files)?)
    } else {
        None
    };

    let scan = if spec.diagnostics.witness || spec.diagnostics.rate {
        Some(run_scan_stage(spec, &mut csv_files)?)
    } else {
        None
    };

    let mut trajectories = Vec::new();
    if spec.diagnostics.trajectory {
        trajectories = run_trajectory_stage(spec, &base_family, &mut csv_files)?;
    }

    let transport = if spec.diagnostics.transport {
        match run_transport_stage(spec, &mut csv_files) {
            Ok(section) => Some(section),
            Err(e @ (Error::ConstructionFailed(_) | Error::ChainDegraded { .. })) => {
                failures.push(FailureNote {
                    stage: "transport".into(),
                    code: e.code().into(),
                    detail: e.to_string(),
                });
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    let report = ExperimentReport {
        spec: spec.clone(),
        seed: spec.seed,
        csv_files,
        scan,
        johnson,
        trajectories,
        transport,
        failures,
    };
    let report_path = spec.output_dir.join("report.json");
    write_file(&report_path, &serde_json::to_string_pretty(&report)?)?;
    let exit_code = if report.failures.is_empty() { 0 } else { 2 };
    Ok(RunOutcome {
        exit_code,
        report_path,
        report,
    })
}

fn run_scan_stage(spec: &ExperimentSpec, csv_files: &mut Vec<String>) -> Result<ScanSection> {
    let opts = WitnessOptions {
        compute_rate: spec.diagnostics.rate,
        ..WitnessOptions::default()
    };
    let scan = dichotomy_scan_opts(|t| spec.gallery.build_at(t), &spec.truncations, &opts)?;
    let mut csv = String::from("N,witness_gap,max_dist,rate,flag_gap,flag_rate\n");
    let mut rows = Vec::new();
    for r in &scan.reports {
        let rate_text = r.rate.map(format_float).unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.truncation_dim,
            format_float(r.witness_gap),
            format_float(r.max_dist),
            rate_text,
            scan.gap_vanishing as u8,
            scan.rate_to_one as u8,
        ));
        rows.push(ScanRow {
            n: r.truncation_dim,
            witness_gap: r.witness_gap,
            max_dist: r.max_dist,
            rate: r.rate,
            witness: r.witness.iter().cloned().collect(),
        });
    }
    let name = "scan.csv".to_string();
    write_file(&spec.output_dir.join(&name), &csv)?;
    csv_files.push(name.clone());
    Ok(ScanSection {
        csv: name,
        truncations: scan.truncations,
        rows,
        gap_vanishing: scan.gap_vanishing,
        rate_to_one: scan.rate_to_one,
    })
}

fn run_johnson_stage(spec: &ExperimentSpec, csv_files: &mut Vec<String>) -> Result<JohnsonSection> {
    let labels = classify_fourtuples(
        |t| spec.gallery.build_at(t),
        &spec.truncations,
        &ClassifyThresholds::default(),
    )?;
    let mut csv = String::from("a,b,c,d,label\n");
    for (tuple, label) in &labels {
        let m = tuple.members();
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            m[0],
            m[1],
            m[2],
            m[3],
            label.as_csv()
        ));
    }
    let name = "labels.csv".to_string();
    write_file(&spec.output_dir.join(&name), &csv)?;
    csv_files.push(name.clone());

    let (holds, certificate) = condition_d(&labels, spec.gallery.k());
    let certificate_members: Option<Vec<[usize; 4]>> = certificate
        .as_ref()
        .map(|c| c.iter().map(FourSet::members).collect());
    let mut walk_file = None;
    if let Some(cert) = &certificate {
        let len = crate::johnson::covering_window(cert.len()).max(1);
        let walk = generate_walk(cert, spec.gallery.k(), len, spec.seed)?;
        let mut text = String::new();
        for a in &walk {
            text.push_str(&format!("{a}\n"));
        }
        let name = "walk.txt".to_string();
        write_file(&spec.output_dir.join(&name), &text)?;
        walk_file = Some(name);
    }
    Ok(JohnsonSection {
        labels_csv: name,
        condition_d: holds,
        certificate: certificate_members,
        walk_file,
    })
}

/// Parse a labels CSV written by the johnson stage back into a label map.
pub fn read_labels_csv(
    path: &Path,
) -> Result<std::collections::BTreeMap<FourSet, crate::johnson::FourTupleLabel>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some("a,b,c,d,label") => {}
        other => return Err(input(format!("labels csv: bad header {other:?}"))),
    }
    let mut labels = std::collections::BTreeMap::new();
    for (row, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(input(format!("labels csv: row {} malformed", row + 2)));
        }
        let mut members = [0usize; 4];
        for (slot, field) in members.iter_mut().zip(&fields[..4]) {
            *slot = field
                .parse()
                .map_err(|e| input(format!("labels csv: row {}: {e}", row + 2)))?;
        }
        labels.insert(
            FourSet::new(members)?,
            crate::johnson::FourTupleLabel::from_csv(fields[4])?,
        );
    }
    Ok(labels)
}

fn run_trajectory_stage(
    spec: &ExperimentSpec,
    family: &[Subspace],
    csv_files: &mut Vec<String>,
) -> Result<Vec<TrajectorySection>> {
    let n = family[0].ambient_dim();
    let mut out = Vec::new();
    for (s_idx, schedule) in spec.schedules.iter().enumerate() {
        let mut rng = SplitMix64::new(stateless(spec.seed, s_idx as u64));
        let z0 = rng.unit_vector(n);
        // Explicit schedules end with their index list.
        let horizon = match schedule {
            Schedule::Explicit { indices, .. } => indices.len(),
            _ => usize::MAX,
        };
        let (steps_to_target, final_norm) = run_to_norm(
            family,
            schedule,
            &z0,
            spec.convergence_max_steps.min(horizon),
            spec.convergence_target,
        )?;
        let reached_target = final_norm < spec.convergence_target;
        let csv_steps = spec.trajectory_csv_steps.min(horizon);
        let traj = run_trajectory(family, schedule, &z0, csv_steps)?;
        let label = format!("traj-{:02}", s_idx + 1);
        let name = format!("trajectories/{label}.csv");
        write_file(&spec.output_dir.join(&name), &trajectory_csv(&traj))?;
        csv_files.push(name.clone());
        out.push(TrajectorySection {
            label,
            schedule: schedule.clone(),
            csv: name,
            steps_to_target,
            final_norm,
            reached_target,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct TransportJson {
    ambient_dim: usize,
    word_convention: String,
    blocks: Vec<TransportJsonBlock>,
    sum_epsilon: f64,
    total_loss: f64,
    boundary_losses: Vec<f64>,
    boundary_steps: Vec<usize>,
    x_dim: usize,
    y_dim: usize,
    z_dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct TransportJsonBlock {
    index: usize,
    epsilon: f64,
    ladder_size: usize,
    word: String,
    loss: f64,
}

/// Epsilon budget the transport stage uses: the gallery's own list for the
/// chained-transport family, the standard demo budget otherwise.
pub fn transport_epsilons(gallery: &GalleryConfig) -> Vec<f64> {
    match gallery {
        GalleryConfig::Example5 { epsilons, .. } => epsilons.clone(),
        _ => demo_epsilons(),
    }
}

/// Demo trajectory of a plan: the composite word as an explicit schedule
/// over the plan's line subspaces, started at the first chain vector.
pub fn transport_demo_trajectory(plan: &TransportPlan) -> Result<Trajectory> {
    let schedule = Schedule::Explicit {
        k: plan.line_spaces.len(),
        indices: plan.composite.letters().to_vec(),
    };
    run_trajectory(
        &plan.line_spaces,
        &schedule,
        &plan.blocks[0].from,
        plan.composite.len(),
    )
}

/// Smallest step index from which every later trajectory point keeps at
/// least `needed` subspaces within `radius`.
pub fn locate_active_threshold(
    traj: &Trajectory,
    spaces: &[Subspace],
    radius: f64,
    needed: usize,
) -> Result<Option<usize>> {
    let mut located = None;
    for m in (0..traj.points.len()).rev() {
        if active_set(traj, spaces, m, radius)?.len() >= needed {
            located = Some(m);
        } else {
            break;
        }
    }
    Ok(located)
}

fn run_transport_stage(
    spec: &ExperimentSpec,
    csv_files: &mut Vec<String>,
) -> Result<TransportSection> {
    let epsilons = transport_epsilons(&spec.gallery);
    let plan = build_transport_plan(&epsilons)?;
    let traj = transport_demo_trajectory(&plan)?;
    let located_m = locate_active_threshold(&traj, &plan.line_spaces, ACTIVE_SET_RADIUS, 3)?;

    let json = TransportJson {
        ambient_dim: plan.ambient_dim(),
        word_convention:
            "rightmost letter acts first; letters are 1-based indices into the line list".into(),
        blocks: plan
            .blocks
            .iter()
            .map(|b| TransportJsonBlock {
                index: b.index,
                epsilon: b.epsilon,
                ladder_size: b.ladder_size,
                word: b.word.display_string(),
                loss: b.loss,
            })
            .collect(),
        sum_epsilon: plan.sum_epsilon,
        total_loss: plan.total_loss,
        boundary_losses: plan.boundary_losses.clone(),
        boundary_steps: plan.boundary_steps.clone(),
        x_dim: plan.x.dim(),
        y_dim: plan.y.dim(),
        z_dim: plan.z.dim(),
    };
    let json_name = "transport.json".to_string();
    write_file(
        &spec.output_dir.join(&json_name),
        &serde_json::to_string_pretty(&json)?,
    )?;
    let csv_name = "transport_trajectory.csv".to_string();
    write_file(&spec.output_dir.join(&csv_name), &trajectory_csv(&traj))?;
    csv_files.push(csv_name.clone());

    Ok(TransportSection {
        json: json_name,
        csv: csv_name,
        blocks: plan
            .blocks
            .iter()
            .map(|b| TransportBlockSummary {
                index: b.index,
                epsilon: b.epsilon,
                ladder_size: b.ladder_size,
                word_len: b.word.len(),
                loss: b.loss,
            })
            .collect(),
        sum_epsilon: plan.sum_epsilon,
        total_loss: plan.total_loss,
        boundary_losses: plan.boundary_losses,
        located_m,
    })
}

/// Re-run the experiment recorded in a report and byte-compare every CSV.
/// Returns 0 when identical; a difference is a MISMATCH error carrying the
/// first differing row.
pub fn replay(report_path: &Path) -> Result<i32> {
    let text = fs::read_to_string(report_path)
        .map_err(|e| input(format!("replay: cannot read report: {e}")))?;
    let report: ExperimentReport = serde_json::from_str(&text)?;
    let original_dir = report_path
        .parent()
        .ok_or_else(|| input("replay: report has no parent directory"))?;
    let replay_dir = original_dir.join(".replay-tmp");
    if replay_dir.exists() {
        fs::remove_dir_all(&replay_dir)?;
    }
    let mut spec = report.spec.clone();
    spec.output_dir = replay_dir.clone();
    let outcome = run_experiment(&spec)?;
    let mut verdict = Ok(0);
    for rel in &report.csv_files {
        let original = fs::read(original_dir.join(rel))
            .map_err(|e| input(format!("replay: missing original {rel}: {e}")))?;
        let fresh = fs::read(replay_dir.join(rel))
            .map_err(|e| input(format!("replay: missing replayed {rel}: {e}")))?;
        if original != fresh {
            let row = first_differing_row(&original, &fresh);
            verdict = Err(Error::Mismatch(format!(
                "{rel} differs at row {row} (1-based, including header)"
            )));
            break;
        }
    }
    let _ = outcome;
    fs::remove_dir_all(&replay_dir)?;
    verdict
}

fn first_differing_row(a: &[u8], b: &[u8]) -> usize {
    let a_lines: Vec<&[u8]> = a.split(|&c| c == b'\n').collect();
    let b_lines: Vec<&[u8]> = b.split(|&c| c == b'\n').collect();
    for (i, (la, lb)) in a_lines.iter().zip(b_lines.iter()).enumerate() {
        if la != lb {
            return i + 1;
        }
    }
    a_lines.len().min(b_lines.len()) + 1
}
