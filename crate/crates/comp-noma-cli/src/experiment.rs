//! Sweep definitions and the Monte-Carlo experiment runner.
//!
//! Each experiment sweeps one or two scenario parameters over a set of
//! values and runs every requested solver on `trials` seeded instances per
//! point. Within one `(point, trial)` the solvers run in a fixed order
//! (fixed-association baselines first) and each solver receives the earlier
//! results as starting candidates; along budget-nested sweep axes the
//! previous point's solution is threaded forward the same way. Both are
//! plain multi-start warm starting: solvers only ever improve on a
//! candidate, which makes the monotone sweep trends hold by feasible-set
//! inclusion rather than by luck.
//!
//! Rows are emitted in deterministic sweep × trial × solver order, and all
//! randomness derives from the base seed, so a rerun reproduces the output
//! byte for byte (wall-clock timing is all zeros unless explicitly enabled).

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Context, Result};

use comp_noma_core::polyblock::{centralized_solve, CentralizedOptions, PolyblockOptions};
use comp_noma_core::rrm::{
    calibrate_thresholds, central_complexity, per_bs_complexity, region_analysis,
    signaling_overhead, IterationCounts, QuantizationTable, RrmMode,
};
use comp_noma_core::sca::{
    heuristic_nos_assignment, semi_centralized_solve, single_bs_assignment,
    SemiCentralizedOptions,
};
use comp_noma_core::scenario::{generate_channels, generate_scenario};
use comp_noma_core::sinr::user_rate;
use comp_noma_core::{AllocationState, ChannelState, NetworkScenario, ScenarioConfig};

use crate::config::ScenarioFile;
use crate::report::SolverResultFile;

/// Distance threshold of the femto-first association rule, meters.
pub const FBS_RANGE_M: f64 = 50.0;

/// Which solver produces a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SolverTag {
    HeuristicNos,
    NoComp,
    Scrm,
    Crm,
}

impl SolverTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverTag::Crm => "crm",
            SolverTag::Scrm => "scrm",
            SolverTag::HeuristicNos => "heuristic-nos",
            SolverTag::NoComp => "no-comp",
        }
    }

    /// Execution order within one trial: baselines first so the optimized
    /// solvers can start from their solutions.
    pub fn run_order() -> [SolverTag; 4] {
        [
            SolverTag::HeuristicNos,
            SolverTag::NoComp,
            SolverTag::Scrm,
            SolverTag::Crm,
        ]
    }
}

impl FromStr for SolverTag {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "crm" => Ok(SolverTag::Crm),
            "scrm" => Ok(SolverTag::Scrm),
            "heuristic-nos" => Ok(SolverTag::HeuristicNos),
            "no-comp" => Ok(SolverTag::NoComp),
            other => bail!("unknown solver tag `{other}` (expected crm, scrm, heuristic-nos or no-comp)"),
        }
    }
}

impl fmt::Display for SolverTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The supported sweep structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    /// Sweep the macro-BS power budget (optionally crossed with the femto
    /// budget).
    Power,
    /// Sweep the per-MVNO power budget crossed with the first slice's rate
    /// floor.
    Mvno,
    /// Sweep the user count across the solver schemes.
    Users,
    /// Sweep the rate floor of every slice.
    RMin,
    /// Bit-exact signaling accounting over user and BS counts (no solving).
    Overhead,
    /// Complexity-threshold achievable regions (no solving).
    Region,
    /// One point straight from the config file.
    Single,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Power => "power",
            ExperimentKind::Mvno => "mvno",
            ExperimentKind::Users => "users",
            ExperimentKind::RMin => "rmin",
            ExperimentKind::Overhead => "overhead",
            ExperimentKind::Region => "region",
            ExperimentKind::Single => "single",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(ExperimentKind::Power),
            "mvno" => Ok(ExperimentKind::Mvno),
            "users" => Ok(ExperimentKind::Users),
            "rmin" => Ok(ExperimentKind::RMin),
            "overhead" => Ok(ExperimentKind::Overhead),
            "region" => Ok(ExperimentKind::Region),
            "single" => Ok(ExperimentKind::Single),
            other => bail!("unknown experiment `{other}`"),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sweep-value overrides parsed from `--sweep "key=v1|v2,key2=v"`.
#[derive(Debug, Clone, Default)]
pub struct SweepOverrides(pub BTreeMap<String, Vec<f64>>);

impl SweepOverrides {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for part in text.split(',').filter(|p| !p.is_empty()) {
            let (key, values) = part
                .split_once('=')
                .with_context(|| format!("sweep entry `{part}` is not key=v1|v2|..."))?;
            let values: Vec<f64> = values
                .split('|')
                .map(|v| v.trim().parse::<f64>().with_context(|| format!("sweep value `{v}`")))
                .collect::<Result<_>>()?;
            if values.is_empty() {
                bail!("sweep key `{key}` has no values");
            }
            map.insert(key.trim().to_string(), values);
        }
        Ok(SweepOverrides(map))
    }

    fn get_or(&self, key: &str, default: Vec<f64>) -> Vec<f64> {
        self.0.get(key).cloned().unwrap_or(default)
    }
}

/// A fully specified experiment.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub scenario: ScenarioFile,
    pub kind: ExperimentKind,
    pub sweep: SweepOverrides,
    pub trials: usize,
    pub base_seed: u64,
    pub solvers: Vec<SolverTag>,
    pub eps: f64,
    pub max_iter: usize,
    /// Record wall-clock seconds in the CSV (off by default so reruns are
    /// byte-identical).
    pub timing: bool,
    /// Write one solver-result file per row into this directory.
    pub dump_dir: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            bail!("trials must be at least 1");
        }
        if self.solvers.is_empty() {
            bail!("at least one solver tag is required");
        }
        self.scenario
            .to_config()
            .validate_via_generate(self.scenario.seed)?;
        Ok(())
    }
}

trait ValidateExt {
    fn validate_via_generate(&self, seed: u64) -> Result<()>;
}

impl ValidateExt for ScenarioConfig {
    fn validate_via_generate(&self, seed: u64) -> Result<()> {
        generate_scenario(self, seed)
            .map(|_| ())
            .map_err(|e| anyhow::anyhow!("{e}"))
    }
}

/// One swept parameter point.
#[derive(Debug, Clone, PartialEq)]
struct SweepPoint {
    /// Order in which the point appears in the output.
    emit_index: usize,
    p_max_mbs_w: f64,
    p_max_fbs_w: f64,
    p_max_mvno_w: f64,
    r_min: Vec<f64>,
    users: usize,
}

impl SweepPoint {
    fn from_config(cfg: &ScenarioConfig, emit_index: usize) -> Self {
        SweepPoint {
            emit_index,
            p_max_mbs_w: cfg.p_max_mbs_w,
            p_max_fbs_w: cfg.p_max_fbs_w,
            p_max_mvno_w: cfg.p_max_mvno_w,
            r_min: cfg.r_min_bps_hz.clone(),
            users: cfg.users,
        }
    }

    fn apply(&self, base: &ScenarioConfig) -> ScenarioConfig {
        let mut cfg = base.clone();
        cfg.p_max_mbs_w = self.p_max_mbs_w;
        cfg.p_max_fbs_w = self.p_max_fbs_w;
        cfg.p_max_mvno_w = self.p_max_mvno_w;
        cfg.r_min_bps_hz = self.r_min.clone();
        if cfg.users != self.users {
            cfg.users = self.users;
            // Keep the MVNO split proportional, remainder to the first.
            let per = self.users / cfg.mvnos;
            let mut split = vec![per; cfg.mvnos];
            split[0] += self.users - per * cfg.mvnos;
            cfg.users_per_mvno = split;
        }
        cfg
    }
}

/// One emitted data row.
#[derive(Debug, Clone)]
pub struct Row {
    pub experiment: ExperimentKind,
    pub p_max_mbs_w: f64,
    pub p_max_fbs_w: f64,
    pub p_max_mvno_w: f64,
    pub r_min_first: f64,
    pub users: usize,
    pub seed: u64,
    pub solver: SolverTag,
    pub sum_rate: f64,
    pub feasible: bool,
    pub outage: bool,
    pub failed: bool,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub overhead_kb: f64,
    pub wall_time_s: f64,
}

pub const EXPERIMENT_CSV_HEADER: &str = "experiment,p_max_mbs_w,p_max_fbs_w,p_max_mvno_w,r_min_first,users,seed,solver,sum_rate,feasible,outage,failed,outer_iterations,inner_iterations,overhead_kb,wall_time_s";

impl Row {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{:.3}",
            self.experiment,
            self.p_max_mbs_w,
            self.p_max_fbs_w,
            self.p_max_mvno_w,
            self.r_min_first,
            self.users,
            self.seed,
            self.solver,
            self.sum_rate,
            self.feasible,
            self.outage,
            self.failed,
            self.outer_iterations,
            self.inner_iterations,
            self.overhead_kb,
            self.wall_time_s,
        )
    }
}

/// Everything a run produces: the CSV lines plus the structured results for
/// programmatic use.
#[derive(Debug)]
pub struct Dataset {
    pub header: String,
    pub lines: Vec<String>,
    pub rows: Vec<Row>,
}

impl Dataset {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.lines.len() + 1));
        out.push_str(&self.header);
        out.push('\n');
        for line in &self.lines {
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}

fn sweep_points(spec: &ExperimentSpec) -> Vec<SweepPoint> {
    let cfg = spec.scenario.to_config();
    let base = SweepPoint::from_config(&cfg, 0);
    let mut points = Vec::new();
    match spec.kind {
        ExperimentKind::Single => points.push(base),
        ExperimentKind::Power => {
            let mbs = spec
                .sweep
                .get_or("p_max_mbs_w", vec![1.0, 2.0, 3.0, 4.0, 5.0]);
            let fbs = spec.sweep.get_or("p_max_fbs_w", vec![cfg.p_max_fbs_w]);
            let mut emit = 0;
            for f in &fbs {
                for m in &mbs {
                    points.push(SweepPoint {
                        emit_index: emit,
                        p_max_mbs_w: *m,
                        p_max_fbs_w: *f,
                        ..base.clone()
                    });
                    emit += 1;
                }
            }
        }
        ExperimentKind::Mvno => {
            let mvno = spec.sweep.get_or("p_max_mvno_w", vec![2.0, 3.0, 4.0, 5.0]);
            let r1 = spec.sweep.get_or("r_min_1", vec![2.0, 3.0]);
            let mut emit = 0;
            for r in &r1 {
                for p in &mvno {
                    let mut r_min = cfg.r_min_bps_hz.clone();
                    r_min[0] = *r;
                    points.push(SweepPoint {
                        emit_index: emit,
                        p_max_mvno_w: *p,
                        r_min,
                        ..base.clone()
                    });
                    emit += 1;
                }
            }
        }
        ExperimentKind::Users => {
            let users = spec
                .sweep
                .get_or("users", vec![4.0, 6.0, 8.0, 10.0, 12.0]);
            for (emit, u) in users.iter().enumerate() {
                points.push(SweepPoint {
                    emit_index: emit,
                    users: (*u).max(0.0) as usize,
                    ..base.clone()
                });
            }
        }
        ExperimentKind::RMin => {
            let rs = spec
                .sweep
                .get_or("r_min", vec![0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0]);
            for (emit, r) in rs.iter().enumerate() {
                points.push(SweepPoint {
                    emit_index: emit,
                    r_min: vec![*r; cfg.mvnos],
                    ..base.clone()
                });
            }
        }
        ExperimentKind::Overhead | ExperimentKind::Region => {}
    }
    points
}

/// Processing order of the points: budget axes loosen forward and rate
/// floors tighten backward, so threading the previous solution forward
/// always hands each point a feasible starting candidate.
fn processing_order(kind: ExperimentKind, points: &[SweepPoint]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    match kind {
        ExperimentKind::Power => order.sort_by(|&a, &b| {
            points[a]
                .p_max_fbs_w
                .total_cmp(&points[b].p_max_fbs_w)
                .then(points[a].p_max_mbs_w.total_cmp(&points[b].p_max_mbs_w))
        }),
        ExperimentKind::Mvno => order.sort_by(|&a, &b| {
            points[b].r_min[0]
                .total_cmp(&points[a].r_min[0])
                .then(points[a].p_max_mvno_w.total_cmp(&points[b].p_max_mvno_w))
        }),
        ExperimentKind::RMin => {
            order.sort_by(|&a, &b| points[b].r_min[0].total_cmp(&points[a].r_min[0]))
        }
        _ => {}
    }
    order
}

/// Whether a solution of `from` remains a feasible candidate at `to`
/// (same shape, power budgets no tighter, rate floors no looser needed).
fn thread_compatible(from: &SweepPoint, to: &SweepPoint) -> bool {
    from.users == to.users
        && to.p_max_mbs_w >= from.p_max_mbs_w - 1e-12
        && to.p_max_fbs_w >= from.p_max_fbs_w - 1e-12
        && to.p_max_mvno_w >= from.p_max_mvno_w - 1e-12
        && from
            .r_min
            .iter()
            .zip(to.r_min.iter())
            .all(|(f, t)| t <= &(f + 1e-12))
}

fn meets_rate_floors(scn: &NetworkScenario, ch: &ChannelState, alloc: &AllocationState) -> bool {
    (0..scn.num_users).all(|k| user_rate(scn, ch, alloc, k) >= scn.r_min_of_user(k) - 1e-9)
}

/// Run one solver with the given starting candidates.
fn solve_one(
    scn: &NetworkScenario,
    ch: &ChannelState,
    tag: SolverTag,
    eps: f64,
    max_iter: usize,
    candidates: &[AllocationState],
) -> Result<comp_noma_core::result::SolverResult, comp_noma_core::SolverError> {
    match tag {
        SolverTag::Scrm => {
            let opts = SemiCentralizedOptions {
                eps,
                outer_max: max_iter,
                initial_allocs: candidates.to_vec(),
                ..SemiCentralizedOptions::default()
            };
            semi_centralized_solve(scn, ch, &opts)
        }
        SolverTag::Crm => {
            // The best candidate by sum rate seeds the global search.
            let incumbent = candidates
                .iter()
                .map(|c| {
                    let r = comp_noma_core::sinr::sum_rate(scn, ch, c);
                    (r, c)
                })
                .max_by(|a, b| a.0.total_cmp(&b.0))
                .map(|(_, c)| c.clone());
            let opts = CentralizedOptions {
                polyblock: PolyblockOptions {
                    eps,
                    max_iter,
                    ..PolyblockOptions::default()
                },
                incumbent,
                ..CentralizedOptions::default()
            };
            centralized_solve(scn, ch, &opts)
        }
        SolverTag::HeuristicNos => {
            let assignment = heuristic_nos_assignment(scn, FBS_RANGE_M);
            let opts = SemiCentralizedOptions {
                eps,
                outer_max: max_iter.min(10),
                initial_allocs: vec![assignment],
                fixed_assignment: true,
                ..SemiCentralizedOptions::default()
            };
            semi_centralized_solve(scn, ch, &opts)
        }
        SolverTag::NoComp => {
            let assignment = single_bs_assignment(scn, ch);
            let opts = SemiCentralizedOptions {
                eps,
                outer_max: max_iter.min(10),
                initial_allocs: vec![assignment],
                fixed_assignment: true,
                ..SemiCentralizedOptions::default()
            };
            semi_centralized_solve(scn, ch, &opts)
        }
    }
}

/// Run the whole experiment. Deterministic in the experiment parameters
/// (unless `timing` is set).
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Dataset> {
    spec.validate()?;
    match spec.kind {
        ExperimentKind::Overhead => return run_overhead(spec),
        ExperimentKind::Region => return run_region(spec),
        _ => {}
    }

    let base_cfg = spec.scenario.to_config();
    let points = sweep_points(spec);
    if points.is_empty() {
        bail!("experiment produced no sweep points");
    }
    let order = processing_order(spec.kind, &points);
    let mut solver_order: Vec<SolverTag> = SolverTag::run_order()
        .into_iter()
        .filter(|t| spec.solvers.contains(t))
        .collect();
    if solver_order.is_empty() {
        solver_order = spec.solvers.clone();
    }

    // (solver, trial) → every processed point's solution, for threading.
    let mut memo: BTreeMap<(SolverTag, usize), Vec<(SweepPoint, AllocationState)>> =
        BTreeMap::new();
    let mut rows: Vec<(usize, usize, usize, Row)> = Vec::new();

    for &p_idx in &order {
        let point = &points[p_idx];
        let cfg = point.apply(&base_cfg);
        for trial in 0..spec.trials {
            let trial_seed = spec.base_seed.wrapping_add(trial as u64);
            let scn = generate_scenario(&cfg, trial_seed)
                .map_err(|e| anyhow::anyhow!("config error at sweep point: {e}"))?;
            let ch = generate_channels(&scn, trial_seed.wrapping_add(1_000_003));
            let mut point_candidates: Vec<AllocationState> = Vec::new();
            for (s_idx, &tag) in solver_order.iter().enumerate() {
                let mut candidates = point_candidates.clone();
                if let Some(history) = memo.get(&(tag, trial)) {
                    for (prev_point, prev_alloc) in history {
                        if thread_compatible(prev_point, point)
                            && prev_alloc.rho.len() == scn.idx().entries()
                        {
                            candidates.push(prev_alloc.clone());
                        }
                    }
                }
                let start = Instant::now();
                let solved = solve_one(&scn, &ch, tag, spec.eps, spec.max_iter, &candidates);
                let wall = if spec.timing {
                    start.elapsed().as_secs_f64()
                } else {
                    0.0
                };
                let row = match solved {
                    Ok(result) => {
                        let outage = !meets_rate_floors(&scn, &ch, &result.allocation)
                            && !candidates.iter().any(|c| meets_rate_floors(&scn, &ch, c));
                        let feasible = result.report.max_combinatorial_residual() <= 0.0
                            && result.report.max_power_residual() <= 1e-6
                            && !outage;
                        let overhead_kb = signaling_overhead(
                            &scn,
                            match tag {
                                SolverTag::Crm => RrmMode::Crm,
                                _ => RrmMode::Scrm,
                            },
                            &IterationCounts {
                                outer: result.outer_iterations,
                                inner_total: result.inner_iterations.max(1),
                            },
                            &QuantizationTable::default(),
                        );
                        if let Some(dir) = &spec.dump_dir {
                            let name = format!(
                                "{}_p{}_t{}_{}.txt",
                                spec.kind, point.emit_index, trial, tag
                            );
                            SolverResultFile::write(&dir.join(name), &scn, &result, wall)?;
                        }
                        point_candidates.push(result.allocation.clone());
                        memo.entry((tag, trial))
                            .or_default()
                            .push((point.clone(), result.allocation.clone()));
                        Row {
                            experiment: spec.kind,
                            p_max_mbs_w: point.p_max_mbs_w,
                            p_max_fbs_w: point.p_max_fbs_w,
                            p_max_mvno_w: point.p_max_mvno_w,
                            r_min_first: point.r_min[0],
                            users: point.users,
                            seed: trial_seed,
                            solver: tag,
                            sum_rate: result.objective,
                            feasible,
                            outage,
                            failed: false,
                            outer_iterations: result.outer_iterations,
                            inner_iterations: result.inner_iterations,
                            overhead_kb,
                            wall_time_s: wall,
                        }
                    }
                    Err(_) => Row {
                        experiment: spec.kind,
                        p_max_mbs_w: point.p_max_mbs_w,
                        p_max_fbs_w: point.p_max_fbs_w,
                        p_max_mvno_w: point.p_max_mvno_w,
                        r_min_first: point.r_min[0],
                        users: point.users,
                        seed: trial_seed,
                        solver: tag,
                        sum_rate: 0.0,
                        feasible: false,
                        outage: true,
                        failed: true,
                        outer_iterations: 0,
                        inner_iterations: 0,
                        overhead_kb: 0.0,
                        wall_time_s: wall,
                    },
                };
                rows.push((point.emit_index, trial, s_idx, row));
            }
        }
    }

    rows.sort_by_key(|(emit, trial, s_idx, _)| (*emit, *trial, *s_idx));
    let rows: Vec<Row> = rows.into_iter().map(|(_, _, _, r)| r).collect();
    Ok(Dataset {
        header: EXPERIMENT_CSV_HEADER.to_string(),
        lines: rows.iter().map(Row::to_csv).collect(),
        rows,
    })
}

pub const RRM_CSV_HEADER: &str = "users,bs_count,mode,overhead_kb,ops,feasible";

fn run_overhead(spec: &ExperimentSpec) -> Result<Dataset> {
    let base = spec.scenario.to_config();
    let users = spec
        .sweep
        .get_or("users", (1..=20).map(|k| (k * 10) as f64).collect());
    let bs = spec.sweep.get_or("bs", vec![6.0, 12.0]);
    let q = QuantizationTable::default();
    let iterations = IterationCounts::modeled();
    let mut lines = Vec::new();
    for b in &bs {
        for u in &users {
            let mut cfg = base.clone();
            cfg.bs_per_inp = *b as usize;
            cfg.users = *u as usize;
            let per = cfg.users / cfg.mvnos;
            let mut split = vec![per; cfg.mvnos];
            split[0] += cfg.users - per * cfg.mvnos;
            cfg.users_per_mvno = split;
            let scn =
                generate_scenario(&cfg, spec.base_seed).map_err(|e| anyhow::anyhow!("{e}"))?;
            for mode in [RrmMode::Scrm, RrmMode::Crm] {
                let kb = signaling_overhead(&scn, mode, &iterations, &q);
                let ops = match mode {
                    RrmMode::Scrm => per_bs_complexity(&scn, iterations.inner_total),
                    RrmMode::Crm => central_complexity(&scn, iterations.inner_total),
                };
                let tag = match mode {
                    RrmMode::Scrm => "scrm",
                    RrmMode::Crm => "crm",
                };
                lines.push(format!(
                    "{},{},{},{},{},{}",
                    cfg.users, cfg.bs_per_inp, tag, kb, ops, true
                ));
            }
        }
    }
    Ok(Dataset {
        header: RRM_CSV_HEADER.to_string(),
        lines,
        rows: Vec::new(),
    })
}

fn run_region(spec: &ExperimentSpec) -> Result<Dataset> {
    let base = spec.scenario.to_config();
    let scn = generate_scenario(&base, spec.base_seed).map_err(|e| anyhow::anyhow!("{e}"))?;
    let cap = spec.sweep.get_or("scrm_cap", vec![230.0])[0] as usize;
    let hybrid_cap = spec.sweep.get_or("hybrid_cap", vec![387.0])[0] as usize;
    let max_users = spec.sweep.get_or("max_users", vec![450.0])[0] as usize;
    let iterations = 10usize;
    let model = calibrate_thresholds(&scn, cap, hybrid_cap, iterations);
    let report = region_analysis(&scn, 1..=max_users, &model, iterations);
    let mut lines = Vec::new();
    for p in &report.points {
        lines.push(format!(
            "{},{},scrm,{},{},{}",
            p.users, base.bs_per_inp, 0.0, p.scrm_ops, p.scrm_feasible
        ));
        lines.push(format!(
            "{},{},crm,{},{},{}",
            p.users, base.bs_per_inp, 0.0, p.central_ops, p.crm_feasible
        ));
        lines.push(format!(
            "{},{},hybrid,{},{},{}",
            p.users,
            base.bs_per_inp,
            0.0,
            p.scrm_ops.min(p.central_ops),
            p.hybrid_feasible()
        ));
    }
    Ok(Dataset {
        header: RRM_CSV_HEADER.to_string(),
        lines,
        rows: Vec::new(),
    })
}
