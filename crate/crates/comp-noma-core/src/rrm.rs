//! Signaling overhead, per-BS operational complexity, and the threshold
//! rule that picks the centralized or semi-centralized solver as the active
//! resource-management mode.
//!
//! Overhead is exact bit counting under the quantization table: the
//! centralized mode uploads every channel vector to the coordinator and
//! downloads the final beams and indicators once per scheduling epoch; the
//! semi-centralized mode exchanges one aggregated interference term and one
//! rate multiplier per user per BS plus the per-MVNO multipliers, once per
//! inner iteration. Complexity is a closed-form multiply-accumulate count
//! of the dominant inner loops, cross-checked against the instrumented
//! counters of actual runs.

use alloc::vec::Vec;

use crate::scenario::NetworkScenario;
use crate::sinr::ConstraintReport;

/// Bits per quantized feedback variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantizationTable {
    /// Multiplier scalars (per-MVNO and per-user rate multipliers).
    pub multiplier_bits: u64,
    /// One channel vector costs `antennas ×` this.
    pub channel_bits_per_antenna: u64,
    /// The aggregated broadcast interference term, regardless of how many
    /// BSs contribute.
    pub aggregate_bits: u64,
    /// One beam vector costs `antennas ×` this.
    pub beam_bits_per_antenna: u64,
    /// Scheduling and viewpoint indicators.
    pub assignment_bits: u64,
}

impl Default for QuantizationTable {
    fn default() -> Self {
        QuantizationTable {
            multiplier_bits: 3,
            channel_bits_per_antenna: 6,
            aggregate_bits: 3,
            beam_bits_per_antenna: 3,
            assignment_bits: 3,
        }
    }
}

impl QuantizationTable {
    /// Bits of one channel vector.
    pub fn channel_vector_bits(&self, antennas: usize) -> u64 {
        self.channel_bits_per_antenna * antennas as u64
    }

    /// Bits of one beam vector.
    pub fn beam_vector_bits(&self, antennas: usize) -> u64 {
        self.beam_bits_per_antenna * antennas as u64
    }
}

/// Which resource-management algorithm a figure refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RrmMode {
    /// Centralized (global) resource management.
    Crm,
    /// Semi-centralized resource management.
    Scrm,
}

/// Iteration counts of a run (actual, from a trace, or modeled).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterationCounts {
    pub outer: usize,
    /// Total inner iterations across both subproblems and all outer rounds.
    pub inner_total: usize,
}

impl IterationCounts {
    /// Planning default: ten inner rounds per outer round, five outer.
    pub fn modeled() -> Self {
        IterationCounts {
            outer: 5,
            inner_total: 50,
        }
    }
}

/// Exact signaling bits of one scheduling epoch.
pub fn signaling_bits(
    scn: &NetworkScenario,
    mode: RrmMode,
    iterations: &IterationCounts,
    q: &QuantizationTable,
) -> u64 {
    let entries = (scn.num_inps * scn.bs_per_inp * scn.subcarriers_per_inp) as u64
        * scn.num_users as u64;
    match mode {
        RrmMode::Crm => {
            // All channel vectors up, the decided beams and both indicator
            // sets down.
            let up = entries * q.channel_vector_bits(scn.antennas);
            let down = entries * (q.beam_vector_bits(scn.antennas) + 2 * q.assignment_bits);
            up + down
        }
        RrmMode::Scrm => {
            // Per inner iteration: every BS broadcasts one aggregated
            // interference term and one rate multiplier per user; the
            // coordinator broadcasts the per-MVNO multipliers.
            let per_iter = (scn.num_inps * scn.bs_per_inp) as u64
                * scn.num_users as u64
                * (q.aggregate_bits + q.multiplier_bits)
                + scn.num_mvnos as u64 * q.multiplier_bits;
            per_iter * iterations.inner_total as u64
        }
    }
}

/// Signaling overhead in kilobytes (1 KB = 8000 bits).
pub fn signaling_overhead(
    scn: &NetworkScenario,
    mode: RrmMode,
    iterations: &IterationCounts,
    q: &QuantizationTable,
) -> f64 {
    signaling_bits(scn, mode, iterations, q) as f64 / 8000.0
}

// ---------------------------------------------------------------------------
// Operational complexity
// ---------------------------------------------------------------------------

/// Closed-form multiply-accumulate counts of the dominant solver loops,
/// mirroring the instrumented counters, plus the tolerable-load thresholds
/// that drive mode selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityModel {
    /// Maximum tolerable operations at one BS (semi-centralized mode).
    pub per_bs_threshold: u64,
    /// Maximum tolerable operations at the central processor.
    pub central_threshold: u64,
}

/// Per-BS multiply-accumulate count of one semi-centralized inner iteration,
/// mirroring the beamforming and assignment loop bounds.
fn scrm_bs_ops_per_inner_iteration(scn: &NetworkScenario) -> u64 {
    let nb = scn.bs_per_inp.max(1) as u64;
    let k = scn.num_users as u64;
    let n = scn.subcarriers_per_inp as u64;
    let mt = scn.antennas as u64;
    let pairs = k * k.saturating_sub(1) / 2;
    let entries_per_bs = n * k;

    // Beam ratio update per (n, k): numerator over B rate multipliers plus
    // the ordering sensitivities, denominator per antenna over the other
    // links.
    let beam = entries_per_bs * (nb + mt * (2 + 3 * (nb - 1) * k.saturating_sub(1) + k))
        + n * 3 * pairs / nb.max(1);
    // Primal recovery: θ projections plus one interference sweep per entry.
    let recovery = entries_per_bs * (mt + k * nb * mt + nb * mt + 12);
    // Matched-filter comparison pass.
    let mf = entries_per_bs * mt * 3;
    // Multiplier updates: power sums, per-entry residuals, pair residuals.
    let updates = entries_per_bs * mt
        + entries_per_bs * (nb * 4 + 8)
        + n * pairs * (2 * nb * mt + 6);
    // Assignment utilities and price updates.
    let assign = entries_per_bs * (mt + k * nb * mt + 4) + entries_per_bs * 2
        + entries_per_bs * mt * 2;
    beam + recovery + mf + updates + assign
}

/// Deterministic per-BS operation count of the semi-centralized solver for
/// the given number of inner iterations.
pub fn per_bs_complexity(scn: &NetworkScenario, iterations: usize) -> u64 {
    scrm_bs_ops_per_inner_iteration(scn) * iterations as u64
}

/// Modeled central-processor operation count of the centralized solver: per
/// polyblock iteration, one boundary bisection and the children screening,
/// each costing a full constraint-field sweep.
pub fn central_complexity(scn: &NetworkScenario, iterations: usize) -> u64 {
    let e = (scn.num_inps * scn.bs_per_inp * scn.subcarriers_per_inp * scn.num_users) as u64;
    let k = scn.num_users as u64;
    let b = scn.bs_per_inp as u64;
    let pairs_total =
        (scn.num_inps * scn.bs_per_inp * scn.subcarriers_per_inp) as u64 * k * k.saturating_sub(1)
            / 2;
    let eval = e * b * (k + 2) + pairs_total * (b + 4);
    // ~20 bisection evaluations plus two screenings per child (one per
    // problem dimension, dominated by the entry blocks).
    let dim = 5 * e + 2 * pairs_total + 2;
    eval * (20 + 2 * dim) * iterations as u64
}

/// Pick the mode for the observed semi-centralized load: centralized
/// exactly when the load strictly exceeds the threshold.
pub fn select_rrm(complexity_scrm: u64, threshold: u64) -> RrmMode {
    if complexity_scrm > threshold {
        RrmMode::Crm
    } else {
        RrmMode::Scrm
    }
}

// ---------------------------------------------------------------------------
// Traffic profile and regions
// ---------------------------------------------------------------------------

/// Active-user counts over the hours of a day.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrafficProfile {
    /// `(hour, active user count)` samples.
    pub samples: Vec<(u32, usize)>,
}

impl TrafficProfile {
    /// A synthetic diurnal example (not measured data): low night load, a
    /// morning ramp, an evening peak.
    pub fn synthetic_example() -> Self {
        let counts = [
            18, 12, 8, 6, 5, 8, 20, 45, 80, 110, 130, 150, 160, 155, 150, 145, 150, 170, 200, 210,
            190, 140, 80, 40,
        ];
        TrafficProfile {
            samples: (0u32..24).zip(counts).collect(),
        }
    }
}

/// Feasibility of each mode at one user count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionPoint {
    pub users: usize,
    pub scrm_ops: u64,
    pub central_ops: u64,
    pub scrm_feasible: bool,
    pub crm_feasible: bool,
}

impl RegionPoint {
    pub fn hybrid_feasible(&self) -> bool {
        self.scrm_feasible || self.crm_feasible
    }
}

/// Achievable/outage regions of the two modes and their union over a range
/// of user counts, at fixed per-mode iteration budgets.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionReport {
    pub points: Vec<RegionPoint>,
    /// Largest user count the semi-centralized mode supports alone.
    pub scrm_max_users: usize,
    /// Largest user count the hybrid (either-mode) scheme supports.
    pub hybrid_max_users: usize,
}

impl RegionReport {
    /// Relative gain of the hybrid scheme in supported user count.
    pub fn hybrid_gain(&self) -> f64 {
        if self.scrm_max_users == 0 {
            return 0.0;
        }
        (self.hybrid_max_users as f64 - self.scrm_max_users as f64) / self.scrm_max_users as f64
    }
}

/// Scale a scenario's user count, keeping the MVNO split proportional.
fn with_users(template: &NetworkScenario, users: usize) -> NetworkScenario {
    let mut scn = template.clone();
    scn.num_users = users;
    scn.mvno_of_user = (0..users).map(|k| k % scn.num_mvnos).collect();
    // Positions are irrelevant to the complexity model; keep the BS layout.
    scn.user_positions = Vec::new();
    scn
}

/// Compute the achievable region over `user_range` at `iterations` rounds
/// per decision epoch.
pub fn region_analysis(
    template: &NetworkScenario,
    user_range: impl Iterator<Item = usize>,
    model: &ComplexityModel,
    iterations: usize,
) -> RegionReport {
    let mut points = Vec::new();
    let mut scrm_max = 0usize;
    let mut hybrid_max = 0usize;
    for users in user_range {
        let scn = with_users(template, users);
        let scrm_ops = per_bs_complexity(&scn, iterations);
        let central_ops = central_complexity(&scn, iterations);
        let p = RegionPoint {
            users,
            scrm_ops,
            central_ops,
            scrm_feasible: scrm_ops <= model.per_bs_threshold,
            crm_feasible: central_ops <= model.central_threshold,
        };
        if p.scrm_feasible {
            scrm_max = scrm_max.max(users);
        }
        if p.hybrid_feasible() {
            hybrid_max = hybrid_max.max(users);
        }
        points.push(p);
    }
    RegionReport {
        points,
        scrm_max_users: scrm_max,
        hybrid_max_users: hybrid_max,
    }
}

/// Calibrate thresholds so the semi-centralized mode supports exactly
/// `scrm_cap_users` and the hybrid scheme supports `hybrid_cap_users`, at
/// the given per-epoch iteration budget.
pub fn calibrate_thresholds(
    template: &NetworkScenario,
    scrm_cap_users: usize,
    hybrid_cap_users: usize,
    iterations: usize,
) -> ComplexityModel {
    ComplexityModel {
        per_bs_threshold: per_bs_complexity(&with_users(template, scrm_cap_users), iterations),
        central_threshold: central_complexity(&with_users(template, hybrid_cap_users), iterations),
    }
}

/// Fraction of runs in which some user misses its rate floor.
pub fn outage_probability(reports: &[ConstraintReport]) -> Result<f64, crate::error::ConfigError> {
    if reports.is_empty() {
        return Err(crate::error::ConfigError::new(
            "results",
            "outage probability needs at least one result",
        ));
    }
    let violated = reports
        .iter()
        .filter(|r| r.min_rate_violated(r.tolerance))
        .count();
    Ok(violated as f64 / reports.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{generate_scenario, ScenarioConfig};

    fn scn_with_users(users: usize) -> NetworkScenario {
        let cfg = ScenarioConfig {
            users,
            users_per_mvno: alloc::vec![users - users / 2, users / 2],
            ..ScenarioConfig::reference()
        };
        generate_scenario(&cfg, 1).unwrap()
    }

    #[test]
    fn table_costs_match_the_quantization() {
        let q = QuantizationTable::default();
        assert_eq!(q.channel_vector_bits(5), 30);
        assert_eq!(q.beam_vector_bits(5), 15);
        assert_eq!(q.multiplier_bits, 3);
        assert_eq!(q.aggregate_bits, 3);
        assert_eq!(q.assignment_bits, 3);
    }

    #[test]
    fn zero_users_means_zero_channel_overhead() {
        let cfg = ScenarioConfig {
            users: 0,
            users_per_mvno: alloc::vec![0, 0],
            ..ScenarioConfig::reference()
        };
        let scn = generate_scenario(&cfg, 1).unwrap();
        let q = QuantizationTable::default();
        let it = IterationCounts::modeled();
        assert_eq!(signaling_bits(&scn, RrmMode::Crm, &it, &q), 0);
        // The coordinator still announces the MVNO multipliers.
        let scrm = signaling_bits(&scn, RrmMode::Scrm, &it, &q);
        assert_eq!(scrm, (2 * 3) * it.inner_total as u64);
    }

    #[test]
    fn doubling_users_doubles_the_upload_term() {
        let q = QuantizationTable::default();
        let it = IterationCounts::modeled();
        let scn1 = scn_with_users(10);
        let scn2 = scn_with_users(20);
        // Hand recomputation of the closed form: B·N·K channel vectors of
        // M_T×6 bits up, (M_T×3 + 3 + 3) per entry down.
        let up1 = (2 * 6 * 32 * 10) as u64 * 30;
        let down1 = (2 * 6 * 32 * 10) as u64 * (15 + 6);
        assert_eq!(signaling_bits(&scn1, RrmMode::Crm, &it, &q), up1 + down1);
        assert_eq!(
            signaling_bits(&scn2, RrmMode::Crm, &it, &q),
            2 * (up1 + down1)
        );
    }

    #[test]
    fn overhead_monotone_and_crm_above_scrm() {
        let q = QuantizationTable::default();
        let it = IterationCounts::modeled();
        let mut last_crm = 0.0;
        let mut last_scrm = 0.0;
        for users in [10, 50, 100, 150, 200] {
            let scn = scn_with_users(users);
            let crm = signaling_overhead(&scn, RrmMode::Crm, &it, &q);
            let scrm = signaling_overhead(&scn, RrmMode::Scrm, &it, &q);
            assert!(crm > scrm, "CRM {crm} must exceed SCRM {scrm} at K={users}");
            assert!(crm > last_crm && scrm > last_scrm);
            last_crm = crm;
            last_scrm = scrm;
        }
    }

    #[test]
    fn per_bs_complexity_is_linear_in_iterations() {
        let scn = scn_with_users(20);
        assert_eq!(per_bs_complexity(&scn, 0), 0);
        let five = per_bs_complexity(&scn, 5);
        let ten = per_bs_complexity(&scn, 10);
        assert_eq!(ten, 2 * five);
    }

    #[test]
    fn complexity_is_monotone_in_load() {
        let base = per_bs_complexity(&scn_with_users(10), 10);
        let more_users = per_bs_complexity(&scn_with_users(40), 10);
        assert!(more_users > base);
        let central_base = central_complexity(&scn_with_users(10), 10);
        let central_more = central_complexity(&scn_with_users(40), 10);
        assert!(central_more > central_base);
    }

    #[test]
    fn selection_rule_is_strict_exceedance() {
        assert_eq!(select_rrm(100, 100), RrmMode::Scrm);
        assert_eq!(select_rrm(101, 100), RrmMode::Crm);
    }

    #[test]
    fn mode_switches_once_along_a_rising_traffic_ramp() {
        let template = scn_with_users(20);
        let profile = TrafficProfile::synthetic_example();
        let threshold = per_bs_complexity(&with_users(&template, 120), 10);
        let mut modes = Vec::new();
        for &(_, users) in &profile.samples {
            let scn = with_users(&template, users.max(1));
            modes.push(select_rrm(per_bs_complexity(&scn, 10), threshold));
        }
        // Within the monotone morning ramp (hours 4..=12 rise from 5 to 160
        // users) the mode crosses from Scrm to Crm exactly once.
        let ramp = &modes[4..=12];
        let first_crm = ramp.iter().position(|m| *m == RrmMode::Crm).unwrap();
        assert!(ramp[..first_crm].iter().all(|m| *m == RrmMode::Scrm));
        assert!(ramp[first_crm..].iter().all(|m| *m == RrmMode::Crm));
    }

    #[test]
    fn trivial_thresholds_produce_trivial_regions() {
        let template = scn_with_users(20);
        let everything = ComplexityModel {
            per_bs_threshold: 0,
            central_threshold: u64::MAX,
        };
        let report = region_analysis(&template, (1..=100).step_by(9), &everything, 10);
        assert!(report.points.iter().all(|p| p.hybrid_feasible()));
        assert_eq!(report.hybrid_max_users, 100);
        let nothing = ComplexityModel {
            per_bs_threshold: 0,
            central_threshold: 0,
        };
        let report = region_analysis(&template, (1..=100).step_by(9), &nothing, 10);
        assert!(report.points.iter().all(|p| !p.hybrid_feasible()));
    }

    #[test]
    fn calibrated_region_reproduces_the_documented_gain() {
        let template = scn_with_users(20);
        let model = calibrate_thresholds(&template, 230, 387, 10);
        let report = region_analysis(&template, 1..=450, &model, 10);
        assert_eq!(report.scrm_max_users, 230);
        // Hybrid region contains each single-mode region by construction.
        for p in &report.points {
            assert!(p.hybrid_feasible() >= p.scrm_feasible);
            assert!(p.hybrid_feasible() >= p.crm_feasible);
        }
        let gain = report.hybrid_gain();
        assert!(
            (gain - 0.68).abs() <= 0.05,
            "hybrid gain {gain} should sit near 0.68"
        );
    }

    #[test]
    fn outage_probability_counts_rate_floor_violations() {
        use crate::scenario::generate_channels;
        use crate::sinr::{check_feasibility, AllocationState, Mode};
        let cfg = ScenarioConfig {
            users: 2,
            users_per_mvno: alloc::vec![1, 1],
            bs_per_inp: 2,
            subcarriers: 2,
            antennas: 1,
            ..ScenarioConfig::reference()
        };
        let scn = generate_scenario(&cfg, 3).unwrap();
        let ch = generate_channels(&scn, 3);
        let violated = check_feasibility(&scn, &ch, &AllocationState::zeros(&scn, Mode::Binary), 1e-6);
        assert!(outage_probability(&[]).is_err());
        assert_eq!(outage_probability(core::slice::from_ref(&violated)).unwrap(), 1.0);
        let mut satisfied = violated.clone();
        satisfied.min_rate.iter_mut().for_each(|v| *v = -1.0);
        assert_eq!(outage_probability(&[satisfied.clone()]).unwrap(), 0.0);
        let mixed = [
            violated.clone(),
            violated.clone(),
            violated,
            satisfied.clone(),
            satisfied.clone(),
            satisfied.clone(),
            satisfied.clone(),
            satisfied.clone(),
            satisfied.clone(),
            satisfied,
        ];
        assert!((outage_probability(&mixed).unwrap() - 0.3).abs() < 1e-12);
    }
}
