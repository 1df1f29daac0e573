//! Semi-centralized solver: alternating beamforming and joint viewpoint /
//! subcarrier assignment, each handled by successive convex approximation
//! with projected dual-subgradient updates.
//!
//! The beamforming subproblem keeps the scheduling fixed and iterates a
//! closed-form per-antenna beam update driven by the dual multipliers — the
//! rate pressure in the numerator, the power and interference prices in the
//! denominator — together with primal recovery of the SINR surrogate pair
//! `(t, ϖ)` from their stationarity conditions. The assignment subproblem
//! keeps beams fixed, relaxes the indicators, and alternates a priced
//! best-response selection with price updates; the result is rounded and
//! then improved by a block-local search. An outer loop alternates the two
//! subproblems and applies a descent safeguard: an iterate that loses more
//! than `eps` of sum rate is rejected and the dual step scale halved.
//!
//! Interference quantities are noise-normalized throughout the inner loops
//! (`ϖ ≥ 1`, `t ≥ 1`); beams and power prices stay in watts.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::SolverError;
use crate::math::{log2_1p, F64Ext};
use crate::polyblock::{round_and_repair, scale_to_power_budgets};
use crate::result::{
    MessageRecord, OpCounters, PayloadTag, Recipients, Sender, SolveStatus, SolverResult,
    TraceEntry,
};
use crate::scenario::{ChannelState, NetworkScenario};
use crate::sinr::{
    beam_gain_on, check_feasibility, inter_interference, noma_interference, sum_rate,
    AllocationState, Mode,
};

/// Floor applied to the modulus of the beam-update denominator.
pub const DENOMINATOR_FLOOR: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Convex surrogates
// ---------------------------------------------------------------------------

/// First-order expansion of `‖θ‖²` around `prev`:
/// `‖prev‖² + 2·prevᵀ(θ − prev)`. Exact at the expansion point and a global
/// under-estimator of the square.
pub fn linearize_own_signal(prev: (f64, f64), theta: (f64, f64)) -> f64 {
    let norm_prev = prev.0 * prev.0 + prev.1 * prev.1;
    norm_prev + 2.0 * (prev.0 * (theta.0 - prev.0) + prev.1 * (theta.1 - prev.1))
}

/// Convex surrogate of the bilinear product `ϖ·t` built from
/// `ϖt = ¼[(ϖ+t)² − (ϖ−t)²]` with the concave second term replaced by its
/// tangent at `(prev_varpi, prev_t)`. Exact at the expansion point and a
/// global over-estimator of the product (it equals `ϖt + ¼(Δϖ−Δt)²`).
///
/// Evaluated in the expanded form `ϖₚtₚ + tₚΔϖ + ϖₚΔt + ¼(Δϖ+Δt)²`, which
/// is algebraically identical to the two-squares difference but does not
/// cancel catastrophically when `ϖ + t` is many orders above `ϖ·t − ϖ`.
pub fn decompose_bilinear(varpi: f64, t: f64, prev_varpi: f64, prev_t: f64) -> f64 {
    let dv = varpi - prev_varpi;
    let dt = t - prev_t;
    prev_varpi * prev_t + prev_t * dv + prev_varpi * dt + 0.25 * (dv + dt) * (dv + dt)
}

// ---------------------------------------------------------------------------
// Iterate state
// ---------------------------------------------------------------------------

/// Linearization state of one SCA pass: the beam projections, the SINR
/// surrogate pair, and the previous-iteration snapshot they expand around.
#[derive(Debug, Clone)]
pub struct ScaIterate {
    /// `h_{b,n,k}^H w_{b,n,k}` per entry.
    pub theta: Vec<Complex64>,
    /// Noise-normalized interference-plus-noise surrogate, `≥ 1` per entry.
    pub varpi: Vec<f64>,
    /// SINR surrogate, `≥ 1` per entry.
    pub t: Vec<f64>,
    /// Snapshot of the same fields at the previous iteration.
    pub prev_theta: Vec<Complex64>,
    pub prev_varpi: Vec<f64>,
    pub prev_t: Vec<f64>,
}

impl ScaIterate {
    pub fn new(entries: usize) -> Self {
        ScaIterate {
            theta: vec![Complex64::new(0.0, 0.0); entries],
            varpi: vec![1.0; entries],
            t: vec![1.0; entries],
            prev_theta: vec![Complex64::new(0.0, 0.0); entries],
            prev_varpi: vec![1.0; entries],
            prev_t: vec![1.0; entries],
        }
    }

    fn snapshot(&mut self) {
        self.prev_theta.copy_from_slice(&self.theta);
        self.prev_varpi.copy_from_slice(&self.varpi);
        self.prev_t.copy_from_slice(&self.t);
    }
}

/// Nonnegative dual multipliers of the convexified subproblems.
#[derive(Debug, Clone)]
pub struct DualMultipliers {
    /// Per-BS power price.
    pub alpha: Vec<f64>,
    /// Per-MVNO power price.
    pub beta: Vec<f64>,
    /// Per-entry interference-cap price.
    pub lambda: Vec<f64>,
    /// Per ordered SIC pair price, flat over `(cell, pair)`.
    pub varrho: Vec<f64>,
    /// Per-entry rate-pressure multiplier.
    pub delta: Vec<f64>,
}

impl DualMultipliers {
    pub fn zeros(scn: &NetworkScenario) -> Self {
        let entries = scn.idx().entries();
        let cells = scn.num_inps * scn.bs_per_inp * scn.subcarriers_per_inp;
        let pairs_per_cell = scn.num_users * scn.num_users.saturating_sub(1) / 2;
        DualMultipliers {
            alpha: vec![0.0; scn.num_inps * scn.bs_per_inp],
            beta: vec![0.0; scn.num_mvnos],
            lambda: vec![0.0; entries],
            varrho: vec![0.0; cells * pairs_per_cell],
            delta: vec![0.0; entries],
        }
    }

    /// Max-norm over every family.
    pub fn max_norm(&self) -> f64 {
        self.alpha
            .iter()
            .chain(self.beta.iter())
            .chain(self.lambda.iter())
            .chain(self.varrho.iter())
            .chain(self.delta.iter())
            .fold(0.0f64, |m, v| m.max(v.abs_()))
    }

    pub fn all_nonnegative(&self) -> bool {
        self.alpha
            .iter()
            .chain(self.beta.iter())
            .chain(self.lambda.iter())
            .chain(self.varrho.iter())
            .chain(self.delta.iter())
            .all(|v| *v >= 0.0)
    }
}

/// Step-size schedule and termination of one inner (dual) loop.
#[derive(Debug, Clone)]
pub struct InnerConfig {
    /// Diminishing step `a / (b + q)`.
    pub step_a: f64,
    pub step_b: f64,
    /// Outer trust scale multiplying every step.
    pub step_scale: f64,
    pub max_iter: usize,
    /// Stop when no multiplier moved more than this.
    pub multiplier_tol: f64,
}

impl Default for InnerConfig {
    fn default() -> Self {
        InnerConfig {
            step_a: 0.1,
            step_b: 1.0,
            step_scale: 1.0,
            max_iter: 40,
            multiplier_tol: 1e-4,
        }
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

/// Position of the ordered pair `(hi_pos, lo_pos)` (`hi_pos < lo_pos` in SIC
/// rank) within the per-cell triangular enumeration.
fn pair_index(scn: &NetworkScenario, cell: usize, hi_pos: usize, lo_pos: usize) -> usize {
    let k = scn.num_users;
    let ppc = k * (k - 1) / 2;
    cell * ppc + hi_pos * k - hi_pos * (hi_pos + 1) / 2 + (lo_pos - hi_pos - 1)
}

/// Matched-filter beams at the given per-entry powers.
fn matched_filter_beams(
    scn: &NetworkScenario,
    ch: &ChannelState,
    alloc: &mut AllocationState,
    powers: &[f64],
) {
    let idx = scn.idx();
    let zero = vec![Complex64::new(0.0, 0.0); scn.antennas];
    for (i, b, n, k) in idx.iter() {
        let e = idx.of(i, b, n, k);
        let p = powers[e];
        let g = ch.gain(i, b, n, k);
        if p > 0.0 && g > 0.0 {
            let scale = (p / g).sqrt_();
            let beam: Vec<Complex64> = ch.vector(i, b, n, k).iter().map(|c| c * scale).collect();
            alloc.set_beam(scn, i, b, n, k, &beam);
        } else {
            alloc.set_beam(scn, i, b, n, k, &zero);
        }
    }
}

/// Equal-split matched-filter beams over the active entries of each BS,
/// scaled into every power budget.
pub fn equal_power_beams(scn: &NetworkScenario, ch: &ChannelState, alloc: &mut AllocationState) {
    let idx = scn.idx();
    let mut counts = vec![0usize; scn.num_inps * scn.bs_per_inp];
    for (i, b, n, k) in idx.iter() {
        if alloc.rho[idx.of(i, b, n, k)] > 0.0 {
            counts[idx.bs_of(i, b)] += 1;
        }
    }
    let mut powers = vec![0.0; idx.entries()];
    for (i, b, n, k) in idx.iter() {
        let e = idx.of(i, b, n, k);
        if alloc.rho[e] > 0.0 {
            powers[e] = scn.p_max_of_bs(i, b) / counts[idx.bs_of(i, b)] as f64;
        }
    }
    matched_filter_beams(scn, ch, alloc, &powers);
    scale_to_power_budgets(scn, alloc);
}

/// Round-robin initial scheduling: users attach to their best-average-gain
/// InP and are dealt cyclically into that InP's `(bs, subcarrier)` slots up
/// to the NOMA cap; the viewpoint is the first serving BS.
pub fn round_robin_allocation(scn: &NetworkScenario, ch: &ChannelState) -> AllocationState {
    let idx = scn.idx();
    let mut alloc = AllocationState::zeros(scn, Mode::Binary);
    if scn.num_users == 0 {
        return alloc;
    }
    let mut users_of_inp: Vec<Vec<usize>> = vec![Vec::new(); scn.num_inps];
    for k in 0..scn.num_users {
        let total_gain = |i: usize| -> f64 {
            (0..scn.bs_per_inp)
                .flat_map(|b| (0..scn.subcarriers_per_inp).map(move |n| (b, n)))
                .map(|(b, n)| ch.gain(i, b, n, k))
                .sum()
        };
        let best_inp = (0..scn.num_inps)
            .max_by(|&a, &b| total_gain(a).partial_cmp(&total_gain(b)).unwrap())
            .unwrap_or(0);
        users_of_inp[best_inp].push(k);
    }
    for i in 0..scn.num_inps {
        let users = &users_of_inp[i];
        if users.is_empty() {
            continue;
        }
        let mut cursor = 0usize;
        for n in 0..scn.subcarriers_per_inp {
            for b in 0..scn.bs_per_inp {
                let mut placed = 0usize;
                let mut scanned = 0usize;
                while placed < scn.noma_cap && scanned < users.len() {
                    let k = users[cursor % users.len()];
                    cursor += 1;
                    scanned += 1;
                    let e = idx.of(i, b, n, k);
                    if alloc.rho[e] == 0.0 {
                        alloc.rho[e] = 1.0;
                        placed += 1;
                    }
                }
            }
        }
        for n in 0..scn.subcarriers_per_inp {
            for &k in users {
                if let Some(b) = (0..scn.bs_per_inp).find(|&b| alloc.rho[idx.of(i, b, n, k)] == 1.0)
                {
                    alloc.x[idx.of(i, b, n, k)] = 1.0;
                }
            }
        }
    }
    alloc
}

// ---------------------------------------------------------------------------
// Beamforming subproblem
// ---------------------------------------------------------------------------

/// Outcome of one inner loop.
#[derive(Debug, Clone)]
pub struct InnerOutcome {
    pub inner_iterations: usize,
    pub messages: Vec<MessageRecord>,
    pub per_bs_ops: u64,
    pub multiplier_norm: f64,
}

/// Solve the beamforming subproblem at fixed scheduling: per-antenna beam
/// ratio updates plus projected subgradient steps on the multipliers, with
/// the per-BS broadcasts of each inner iteration recorded in the message
/// ledger. Beams are projected into the power budgets every iteration and
/// the best iterate by true objective is returned, with the expansion point
/// refreshed there so the surrogates are exact at the returned beams.
pub fn solve_beamforming_subproblem(
    scn: &NetworkScenario,
    ch: &ChannelState,
    alloc: &mut AllocationState,
    iterate: &mut ScaIterate,
    mult: &mut DualMultipliers,
    cfg: &InnerConfig,
    outer_iteration: usize,
) -> Result<InnerOutcome, SolverError> {
    let idx = scn.idx();
    let n0 = scn.noise_power;
    let users = scn.num_users;
    let nbs = scn.bs_per_inp;
    let mut messages = Vec::new();
    let mut ops: u64 = 0;
    let mut best_w = alloc.w.clone();
    let mut best_rate = sum_rate(scn, ch, alloc);
    let mut inner = 0usize;
    let mut norm = mult.max_norm();

    while inner < cfg.max_iter {
        inner += 1;
        let step = cfg.step_scale * cfg.step_a / (cfg.step_b + inner as f64);

        // Per-BS broadcast of the aggregated interference-pricing term (one
        // scalar per user) and the rate multipliers.
        for i in 0..scn.num_inps {
            for b in 0..nbs {
                for tag in [PayloadTag::InterferenceAggregate, PayloadTag::RateMultiplier] {
                    messages.push(MessageRecord {
                        sender: Sender::Bs { inp: i, bs: b },
                        recipients: Recipients::AllBsAndCoordinator,
                        tag,
                        bits: 3 * users as u64,
                        outer_iteration,
                        inner_iteration: inner,
                    });
                }
            }
        }

        // Closed-form per-antenna beam ratio. Every term is accumulated
        // (zero factors included) so the operation counts stay deterministic.
        let mut new_w = alloc.w.clone();
        for (i, b, n, k) in idx.iter() {
            // Rate pressure plus the ordering-price sensitivity of the pairs
            // in which this user's beams carry the decoded signal.
            let mut numerator = 0.0;
            for bp in 0..nbs {
                numerator += mult.delta[idx.of(i, bp, n, k)];
            }
            ops += nbs as u64;
            let my_rank = ch.sic_rank(i, n, k);
            let cell = idx.cell_of(i, b, n);
            for hi_pos in 0..my_rank {
                let t_idx = pair_index(scn, cell, hi_pos, my_rank);
                let k_hi = ch.sic_order(i, n)[hi_pos];
                let cross = iterate.prev_theta[idx.of(i, b, n, k_hi)].norm();
                let omega = 2.0 * cross * iterate.prev_varpi[idx.of(i, b, n, k_hi)];
                numerator += omega * mult.varrho[t_idx];
            }
            ops += 3 * my_rank as u64;

            let h = ch.vector(i, b, n, k);
            let v = scn.mvno_of_user[k];
            for m in 0..scn.antennas {
                // Power prices on the own channel element plus the
                // interference prices of the other links.
                let mut den = (2.0 * mult.beta[v] + 2.0 * mult.alpha[idx.bs_of(i, b)]) * h[m];
                for bp in 0..nbs {
                    if bp == b {
                        continue;
                    }
                    for kp in 0..users {
                        if kp == k {
                            continue;
                        }
                        let ep = idx.of(i, bp, n, kp);
                        let hp = ch.vector(i, bp, n, kp)[m];
                        let off = 1.0 - alloc.rho[ep];
                        den += off * 2.0 * mult.lambda[ep] * hp;
                        if ch.higher_order(i, n, k, kp) {
                            den += alloc.rho[ep] * 2.0 * mult.lambda[ep] * hp;
                        }
                    }
                }
                for kp in 0..users {
                    if kp == k || !ch.higher_order(i, n, k, kp) {
                        continue;
                    }
                    let ep = idx.of(i, b, n, kp);
                    den += 2.0 * mult.lambda[ep] * ch.vector(i, b, n, kp)[m];
                }
                let den = if den.norm() < DENOMINATOR_FLOOR {
                    Complex64::new(DENOMINATOR_FLOOR, 0.0)
                } else {
                    den
                };
                new_w[idx.vec_of(i, b, n, k) + m] = numerator / den;
            }
            ops += scn.antennas as u64
                * (2 + 3 * (nbs as u64 - 1) * (users as u64 - 1) + users as u64);
        }
        alloc.w = new_w;
        scale_to_power_budgets(scn, alloc);
        if alloc.w.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(SolverError::Diverged {
                context: "beamforming".into(),
                iteration: inner,
            });
        }

        // Matched-filter variant at the same per-entry powers, and a
        // concentration variant that pours each BS budget equally over the
        // rate-credited entries only; keep whichever evaluates best.
        let rate_raw = sum_rate(scn, ch, alloc);
        let powers: Vec<f64> = idx
            .iter()
            .map(|(i, b, n, k)| alloc.beam_power(scn, i, b, n, k))
            .collect();
        let mut mf = alloc.clone();
        matched_filter_beams(scn, ch, &mut mf, &powers);
        scale_to_power_budgets(scn, &mut mf);
        let rate_mf = sum_rate(scn, ch, &mf);
        let mut credited_counts = vec![0usize; scn.num_inps * nbs];
        for (i, b, n, k) in idx.iter() {
            if alloc.x[idx.of(i, b, n, k)] > 0.0 {
                credited_counts[idx.bs_of(i, b)] += 1;
            }
        }
        let conc_powers: Vec<f64> = idx
            .iter()
            .map(|(i, b, n, k)| {
                let e = idx.of(i, b, n, k);
                let count = credited_counts[idx.bs_of(i, b)];
                if alloc.x[e] > 0.0 && count > 0 {
                    scn.p_max_of_bs(i, b) / count as f64
                } else {
                    0.0
                }
            })
            .collect();
        let mut conc = alloc.clone();
        matched_filter_beams(scn, ch, &mut conc, &conc_powers);
        scale_to_power_budgets(scn, &mut conc);
        let rate_conc = sum_rate(scn, ch, &conc);
        if rate_conc >= rate_mf && rate_conc > rate_raw {
            alloc.w = conc.w;
        } else if rate_mf > rate_raw {
            alloc.w = mf.w;
        }
        let rate_now = rate_raw.max(rate_mf).max(rate_conc);
        if rate_now > best_rate {
            best_rate = rate_now;
            best_w = alloc.w.clone();
        }
        ops += idx.entries() as u64 * scn.antennas as u64 * 5;

        // Primal recovery of (θ, ϖ, t) at the new beams; the surrogate pair
        // comes from its stationarity conditions under a trust cap.
        iterate.snapshot();
        let mut itot_cache = vec![0.0f64; idx.entries()];
        for (i, b, n, k) in idx.iter() {
            let e = idx.of(i, b, n, k);
            let h = ch.vector(i, b, n, k);
            let w = alloc.beam(scn, i, b, n, k);
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..scn.antennas {
                acc += h[m].conj() * w[m];
            }
            iterate.theta[e] = acc;
            itot_cache[e] = (noma_interference(scn, ch, alloc, i, b, n, k)
                + inter_interference(scn, ch, alloc, i, b, n, k))
                / n0;
        }
        ops += idx.entries() as u64
            * (scn.antennas as u64 + users as u64 * nbs as u64 * scn.antennas as u64);
        for (i, _b, n, k) in idx.iter() {
            let e = idx.of(i, _b, n, k);
            let own = crate::sinr::own_signal(scn, ch, alloc, i, n, k) / n0;
            let interference = itot_cache[e] + 1.0;
            let gamma = own / interference;
            // Trust cap keeps the rate pressure finite while the duals grow.
            let t_cap = 1.0 + 16.0 * (gamma + 1.0);
            let x_e = alloc.x[e];
            let delta_e = mult.delta[e];
            let mut t_new = if delta_e > 1e-30 && x_e > 0.0 {
                // x/(t ln2) = δ·∂P/∂t, a quadratic in t.
                let c = iterate.prev_varpi[e] - iterate.prev_t[e];
                let a2 = delta_e / 2.0;
                let a1 = delta_e / 2.0 * (interference + c);
                let a0 = -x_e / core::f64::consts::LN_2;
                let disc = (a1 * a1 - 4.0 * a2 * a0).max(0.0);
                (-a1 + disc.sqrt_()) / (2.0 * a2)
            } else {
                t_cap
            };
            t_new = t_new.clamp(1.0, t_cap);
            // ϖ stationarity solved for ϖ, clamped to the physical range.
            let mut varpi_new = if delta_e > 1e-30 {
                2.0 * (1.0 + mult.lambda[e] / delta_e)
                    + (iterate.prev_varpi[e] - iterate.prev_t[e])
                    - t_new
            } else {
                interference
            };
            varpi_new = varpi_new.clamp(1.0, 16.0 * interference + 16.0);
            iterate.t[e] = t_new;
            iterate.varpi[e] = varpi_new;
        }
        ops += idx.entries() as u64 * (nbs as u64 * scn.antennas as u64 + 12);

        // Projected subgradient updates.
        let mut max_change = 0.0f64;
        fn upd(value: &mut f64, resid: f64, step: f64, max_change: &mut f64) {
            let next = (*value + step * resid).max(0.0);
            *max_change = (*max_change).max((next - *value).abs());
            *value = next;
        }
        for i in 0..scn.num_inps {
            for b in 0..nbs {
                let mut used = 0.0;
                for n in 0..scn.subcarriers_per_inp {
                    for k in 0..users {
                        let e = idx.of(i, b, n, k);
                        used += alloc.rho[e] * alloc.beam_power(scn, i, b, n, k);
                    }
                }
                let resid = used - scn.p_max_of_bs(i, b);
                upd(&mut mult.alpha[idx.bs_of(i, b)], resid, step, &mut max_change);
            }
        }
        ops += idx.entries() as u64 * scn.antennas as u64;
        for (i, b, n, k) in idx.iter() {
            let e = idx.of(i, b, n, k);
            let _ = b;
            // Interference cap (normalized): Ĩ + 1 − ϖ.
            upd(
                &mut mult.lambda[e],
                itot_cache[e] + 1.0 - iterate.varpi[e],
                step,
                &mut max_change,
            );
            // Rate pressure: R_min − (own_sur − P(ϖ,t) + ϖ) with the
            // noise-normalized own-signal linearization.
            let mut own_sur = 0.0;
            for bp in 0..nbs {
                let ep = idx.of(i, bp, n, k);
                if alloc.rho[ep] > 0.0 {
                    let th = iterate.theta[ep];
                    let pv = iterate.prev_theta[ep];
                    own_sur +=
                        alloc.rho[ep] * linearize_own_signal((pv.re, pv.im), (th.re, th.im)) / n0;
                }
            }
            let p_sur = decompose_bilinear(
                iterate.varpi[e],
                iterate.t[e],
                iterate.prev_varpi[e],
                iterate.prev_t[e],
            );
            let resid_d = scn.r_min_of_user(k) - (own_sur - p_sur + iterate.varpi[e]);
            upd(&mut mult.delta[e], resid_d, step, &mut max_change);
        }
        ops += idx.entries() as u64 * (nbs as u64 * 4 + 8);
        // Ordering prices on the true pair residuals (noise-normalized).
        for i in 0..scn.num_inps {
            for bb in 0..nbs {
                for n in 0..scn.subcarriers_per_inp {
                    let cell = idx.cell_of(i, bb, n);
                    let order = ch.sic_order(i, n);
                    for hi_pos in 0..users {
                        for lo_pos in hi_pos + 1..users {
                            let k_hi = order[hi_pos];
                            let k_lo = order[lo_pos];
                            let e_hi = idx.of(i, bb, n, k_hi);
                            let e_lo = idx.of(i, bb, n, k_lo);
                            let rho_hi = alloc.rho[e_hi];
                            let rho_lo = alloc.rho[e_lo];
                            if rho_hi == 0.0 || rho_lo == 0.0 {
                                continue;
                            }
                            let mut own_lo = 0.0;
                            let mut meas = 0.0;
                            for bp in 0..nbs {
                                let ep_lo = idx.of(i, bp, n, k_lo);
                                let ep_hi = idx.of(i, bp, n, k_hi);
                                own_lo += alloc.rho[ep_lo]
                                    * beam_gain_on(scn, ch, alloc, i, bp, n, k_lo, k_lo);
                                meas += alloc.rho[ep_hi]
                                    * beam_gain_on(scn, ch, alloc, i, bp, n, k_hi, k_lo);
                            }
                            let resid = rho_hi * rho_lo * own_lo / n0 * (itot_cache[e_hi] + 1.0)
                                - rho_hi * meas / n0 * (itot_cache[e_lo] + 1.0);
                            let t_idx = pair_index(scn, cell, hi_pos, lo_pos);
                            upd(&mut mult.varrho[t_idx], resid, step, &mut max_change);
                        }
                    }
                }
            }
        }
        ops += (scn.num_inps * nbs * scn.subcarriers_per_inp) as u64
            * (users * users.saturating_sub(1) / 2) as u64
            * (2 * nbs as u64 * scn.antennas as u64 + 6);

        // Coordinator step: MVNO power prices, broadcast back to the BSs.
        for v in 0..scn.num_mvnos {
            let mut used = 0.0;
            for (i, b, n, k) in idx.iter() {
                if scn.mvno_of_user[k] == v {
                    let e = idx.of(i, b, n, k);
                    used += alloc.rho[e] * alloc.beam_power(scn, i, b, n, k);
                }
            }
            upd(&mut mult.beta[v], used - scn.p_max_mvno[v], step, &mut max_change);
        }
        messages.push(MessageRecord {
            sender: Sender::Coordinator,
            recipients: Recipients::AllBs,
            tag: PayloadTag::MvnoMultiplier,
            bits: 3 * scn.num_mvnos as u64,
            outer_iteration,
            inner_iteration: inner,
        });

        norm = mult.max_norm();
        debug_assert!(mult.all_nonnegative());
        if max_change < cfg.multiplier_tol {
            break;
        }
    }

    alloc.w = best_w;
    // Refresh the expansion point at the returned beams.
    for (i, b, n, k) in idx.iter() {
        let e = idx.of(i, b, n, k);
        let h = ch.vector(i, b, n, k);
        let w = alloc.beam(scn, i, b, n, k);
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..scn.antennas {
            acc += h[m].conj() * w[m];
        }
        iterate.theta[e] = acc;
        let itot = (noma_interference(scn, ch, alloc, i, b, n, k)
            + inter_interference(scn, ch, alloc, i, b, n, k))
            / n0;
        let own = crate::sinr::own_signal(scn, ch, alloc, i, n, k) / n0;
        iterate.varpi[e] = itot + 1.0;
        iterate.t[e] = 1.0 + own / (itot + 1.0);
    }
    iterate.snapshot();

    Ok(InnerOutcome {
        inner_iterations: inner,
        messages,
        per_bs_ops: ops,
        multiplier_norm: norm,
    })
}

// ---------------------------------------------------------------------------
// Assignment subproblem
// ---------------------------------------------------------------------------

/// Solve the joint viewpoint-selection / subcarrier-assignment subproblem at
/// fixed beams. The indicators are relaxed; the priced Lagrangian surrogate
/// is affine in them (utilities frozen at the previous iterate's SINRs), so
/// each inner iteration takes its vertex maximizer — a per-cell top-up
/// selection under the NOMA cap — and then moves the power prices by
/// projected subgradient. The returned assignment is rounded through the
/// shared rounding pass and improved by a block-local search.
pub fn solve_assignment_subproblem(
    scn: &NetworkScenario,
    ch: &ChannelState,
    alloc: &mut AllocationState,
    mult: &mut DualMultipliers,
    cfg: &InnerConfig,
    outer_iteration: usize,
) -> Result<InnerOutcome, SolverError> {
    let idx = scn.idx();
    let users = scn.num_users;
    let nbs = scn.bs_per_inp;
    let mut messages = Vec::new();
    let mut ops: u64 = 0;
    let mut best = alloc.clone();
    let mut best_rate = sum_rate(scn, ch, &best);
    let mut inner = 0usize;

    while inner < cfg.max_iter {
        inner += 1;
        let step = cfg.step_scale * cfg.step_a / (cfg.step_b + inner as f64);
        for i in 0..scn.num_inps {
            for b in 0..nbs {
                for tag in [PayloadTag::InterferenceAggregate, PayloadTag::RateMultiplier] {
                    messages.push(MessageRecord {
                        sender: Sender::Bs { inp: i, bs: b },
                        recipients: Recipients::AllBsAndCoordinator,
                        tag,
                        bits: 3 * users as u64,
                        outer_iteration,
                        inner_iteration: inner,
                    });
                }
            }
        }

        // Priced utilities frozen at the previous iterate.
        let mut utility = vec![0.0f64; idx.entries()];
        let mut inp_score = vec![0.0f64; users * scn.num_inps];
        for (i, b, n, k) in idx.iter() {
            let e = idx.of(i, b, n, k);
            let power = alloc.beam_power(scn, i, b, n, k);
            let price = (mult.alpha[idx.bs_of(i, b)] + mult.beta[scn.mvno_of_user[k]]) * power;
            let gain = beam_gain_on(scn, ch, alloc, i, b, n, k, k);
            let itot = noma_interference(scn, ch, alloc, i, b, n, k)
                + inter_interference(scn, ch, alloc, i, b, n, k);
            let r_est = log2_1p(gain / (itot + scn.noise_power));
            utility[e] = r_est - price;
            if utility[e] > 0.0 {
                inp_score[k * scn.num_inps + i] += utility[e];
            }
        }
        ops += idx.entries() as u64
            * (scn.antennas as u64 + users as u64 * nbs as u64 * scn.antennas as u64 + 4);

        // One InP per user; then per-cell top-up under the cap.
        let home_inp: Vec<usize> = (0..users)
            .map(|k| {
                (0..scn.num_inps)
                    .max_by(|&a, &b| {
                        inp_score[k * scn.num_inps + a]
                            .partial_cmp(&inp_score[k * scn.num_inps + b])
                            .unwrap()
                    })
                    .unwrap_or(0)
            })
            .collect();
        let mut next = AllocationState::zeros(scn, Mode::Binary);
        next.w = alloc.w.clone();
        for i in 0..scn.num_inps {
            for b in 0..nbs {
                for n in 0..scn.subcarriers_per_inp {
                    let mut candidates: Vec<usize> = (0..users)
                        .filter(|&k| home_inp[k] == i && utility[idx.of(i, b, n, k)] > 0.0)
                        .collect();
                    candidates.sort_by(|&a, &c| {
                        utility[idx.of(i, b, n, c)]
                            .partial_cmp(&utility[idx.of(i, b, n, a)])
                            .unwrap()
                            .then(a.cmp(&c))
                    });
                    for &k in candidates.iter().take(scn.noma_cap) {
                        next.rho[idx.of(i, b, n, k)] = 1.0;
                    }
                }
            }
        }
        for i in 0..scn.num_inps {
            for n in 0..scn.subcarriers_per_inp {
                for k in 0..users {
                    let best_b = (0..nbs)
                        .filter(|&b| next.rho[idx.of(i, b, n, k)] == 1.0)
                        .max_by(|&a, &c| {
                            utility[idx.of(i, a, n, k)]
                                .partial_cmp(&utility[idx.of(i, c, n, k)])
                                .unwrap()
                        });
                    if let Some(b) = best_b {
                        next.x[idx.of(i, b, n, k)] = 1.0;
                    }
                }
            }
        }
        ops += idx.entries() as u64 * 2;

        let changed = next.rho != alloc.rho || next.x != alloc.x;
        alloc.rho = next.rho;
        alloc.x = next.x;
        let rate_now = sum_rate(scn, ch, alloc);
        if rate_now > best_rate {
            best_rate = rate_now;
            best = alloc.clone();
        }

        // Price updates at the new selection.
        let mut max_change = 0.0f64;
        for i in 0..scn.num_inps {
            for b in 0..nbs {
                let mut used = 0.0;
                for n in 0..scn.subcarriers_per_inp {
                    for k in 0..users {
                        let e = idx.of(i, b, n, k);
                        used += alloc.rho[e] * alloc.beam_power(scn, i, b, n, k);
                    }
                }
                let resid = used - scn.p_max_of_bs(i, b);
                let next_a = (mult.alpha[idx.bs_of(i, b)] + step * resid).max(0.0);
                max_change = max_change.max((next_a - mult.alpha[idx.bs_of(i, b)]).abs_());
                mult.alpha[idx.bs_of(i, b)] = next_a;
            }
        }
        for v in 0..scn.num_mvnos {
            let mut used = 0.0;
            for (i, b, n, k) in idx.iter() {
                if scn.mvno_of_user[k] == v {
                    used += alloc.rho[idx.of(i, b, n, k)] * alloc.beam_power(scn, i, b, n, k);
                }
            }
            let resid = used - scn.p_max_mvno[v];
            let next_b = (mult.beta[v] + step * resid).max(0.0);
            max_change = max_change.max((next_b - mult.beta[v]).abs_());
            mult.beta[v] = next_b;
        }
        ops += idx.entries() as u64 * scn.antennas as u64 * 2;
        messages.push(MessageRecord {
            sender: Sender::Coordinator,
            recipients: Recipients::AllBs,
            tag: PayloadTag::MvnoMultiplier,
            bits: 3 * scn.num_mvnos as u64,
            outer_iteration,
            inner_iteration: inner,
        });

        if !changed && max_change < cfg.multiplier_tol {
            break;
        }
    }

    *alloc = best;
    let rounded = round_and_repair(scn, ch, alloc);
    alloc.rho = rounded.rho;
    alloc.x = rounded.x;
    alloc.w = rounded.w;
    improve_assignment(scn, ch, alloc);
    Ok(InnerOutcome {
        inner_iterations: inner,
        messages,
        per_bs_ops: ops,
        multiplier_norm: mult.max_norm(),
    })
}

/// Block-local search over a binary assignment at fixed beams: viewpoint
/// moves, scheduling toggles and drops, each evaluated on the affected
/// subcarrier only (subcarriers interfere only within themselves) and
/// accepted when the power budgets stay satisfied.
pub fn improve_assignment(scn: &NetworkScenario, ch: &ChannelState, alloc: &mut AllocationState) {
    let idx = scn.idx();
    let block_rate = |alloc: &AllocationState, i: usize, n: usize| -> f64 {
        let mut acc = 0.0;
        for b in 0..scn.bs_per_inp {
            for k in 0..scn.num_users {
                let xv = alloc.x[idx.of(i, b, n, k)];
                if xv > 0.0 {
                    acc += xv * crate::sinr::rate(scn, ch, alloc, i, b, n, k);
                }
            }
        }
        acc
    };
    let power_ok = |alloc: &AllocationState| -> bool {
        let mut bs_used = vec![0.0f64; scn.num_inps * scn.bs_per_inp];
        let mut mvno_used = vec![0.0f64; scn.num_mvnos];
        for (i, b, n, k) in idx.iter() {
            let e = idx.of(i, b, n, k);
            if alloc.rho[e] > 0.0 {
                let p = alloc.beam_power(scn, i, b, n, k);
                bs_used[idx.bs_of(i, b)] += p;
                mvno_used[scn.mvno_of_user[k]] += p;
            }
        }
        bs_used
            .iter()
            .enumerate()
            .all(|(j, &u)| u <= scn.p_max_bs[j] * (1.0 + 1e-12))
            && mvno_used
                .iter()
                .enumerate()
                .all(|(v, &u)| u <= scn.p_max_mvno[v] * (1.0 + 1e-12))
    };
    let inp_of_user = |alloc: &AllocationState, k: usize| -> Option<usize> {
        (0..scn.num_inps).find(|&i| {
            (0..scn.bs_per_inp)
                .any(|b| (0..scn.subcarriers_per_inp).any(|n| alloc.rho[idx.of(i, b, n, k)] > 0.0))
        })
    };
    // Re-seat user k's viewpoint on its best remaining serving BS of the
    // block (or none).
    let reassign_viewpoint = |cand: &mut AllocationState, i: usize, n: usize, k: usize| {
        for b in 0..scn.bs_per_inp {
            cand.x[idx.of(i, b, n, k)] = 0.0;
        }
        let mut best_b = None;
        let mut best_r = 0.0;
        for b in 0..scn.bs_per_inp {
            if cand.rho[idx.of(i, b, n, k)] == 1.0 {
                let r = crate::sinr::rate(scn, ch, cand, i, b, n, k);
                if r > best_r {
                    best_r = r;
                    best_b = Some(b);
                }
            }
        }
        if let Some(b) = best_b {
            cand.x[idx.of(i, b, n, k)] = 1.0;
        }
    };
    for _pass in 0..2 {
        let mut improved = false;
        for i in 0..scn.num_inps {
            for n in 0..scn.subcarriers_per_inp {
                // Viewpoint moves.
                for k in 0..scn.num_users {
                    let current = (0..scn.bs_per_inp).find(|&b| alloc.x[idx.of(i, b, n, k)] == 1.0);
                    for b in 0..scn.bs_per_inp {
                        if Some(b) == current || alloc.rho[idx.of(i, b, n, k)] != 1.0 {
                            continue;
                        }
                        let mut cand = alloc.clone();
                        if let Some(cb) = current {
                            cand.x[idx.of(i, cb, n, k)] = 0.0;
                        }
                        cand.x[idx.of(i, b, n, k)] = 1.0;
                        if block_rate(&cand, i, n) > block_rate(alloc, i, n) + 1e-12 {
                            *alloc = cand;
                            improved = true;
                        }
                    }
                }
                // Scheduling toggles.
                for b in 0..scn.bs_per_inp {
                    for k in 0..scn.num_users {
                        let e = idx.of(i, b, n, k);
                        if alloc.rho[e] == 1.0 {
                            let mut cand = alloc.clone();
                            cand.rho[e] = 0.0;
                            reassign_viewpoint(&mut cand, i, n, k);
                            if block_rate(&cand, i, n) > block_rate(alloc, i, n) + 1e-12 {
                                *alloc = cand;
                                improved = true;
                            }
                        } else {
                            let load: usize = (0..scn.num_users)
                                .filter(|&kk| alloc.rho[idx.of(i, b, n, kk)] == 1.0)
                                .count();
                            if load >= scn.noma_cap {
                                continue;
                            }
                            if matches!(inp_of_user(alloc, k), Some(j) if j != i) {
                                continue;
                            }
                            let mut cand = alloc.clone();
                            cand.rho[e] = 1.0;
                            if (0..scn.bs_per_inp).all(|bb| cand.x[idx.of(i, bb, n, k)] == 0.0) {
                                cand.x[e] = 1.0;
                            }
                            if power_ok(&cand)
                                && block_rate(&cand, i, n) > block_rate(alloc, i, n) + 1e-12
                            {
                                *alloc = cand;
                                improved = true;
                            }
                        }
                    }
                }
                // In-cell swaps: single toggles cannot cross a full cell.
                for b in 0..scn.bs_per_inp {
                    for k_on in 0..scn.num_users {
                        let e_on = idx.of(i, b, n, k_on);
                        if alloc.rho[e_on] != 1.0 {
                            continue;
                        }
                        for k_off in 0..scn.num_users {
                            let e_off = idx.of(i, b, n, k_off);
                            if k_off == k_on || alloc.rho[e_off] != 0.0 {
                                continue;
                            }
                            if matches!(inp_of_user(alloc, k_off), Some(j) if j != i) {
                                continue;
                            }
                            let mut cand = alloc.clone();
                            cand.rho[e_on] = 0.0;
                            cand.rho[e_off] = 1.0;
                            reassign_viewpoint(&mut cand, i, n, k_on);
                            reassign_viewpoint(&mut cand, i, n, k_off);
                            if power_ok(&cand)
                                && block_rate(&cand, i, n) > block_rate(alloc, i, n) + 1e-12
                            {
                                *alloc = cand;
                                improved = true;
                            }
                        }
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
}

// ---------------------------------------------------------------------------
// Outer loop
// ---------------------------------------------------------------------------

/// Options of the semi-centralized solve.
#[derive(Debug, Clone)]
pub struct SemiCentralizedOptions {
    /// Outer convergence threshold on `|ΔR_tot|`, bps/Hz.
    pub eps: f64,
    pub outer_max: usize,
    pub inner: InnerConfig,
    /// Extra initial scheduling candidates evaluated against the round-robin
    /// default; the best by sum rate (with equal-power beams) starts the
    /// outer loop.
    pub initial_allocs: Vec<AllocationState>,
    /// Keep the initial scheduling fixed and skip the assignment subproblem
    /// (fixed-association baselines).
    pub fixed_assignment: bool,
    pub feasibility_tol: f64,
}

impl Default for SemiCentralizedOptions {
    fn default() -> Self {
        SemiCentralizedOptions {
            eps: 1e-3,
            outer_max: 50,
            inner: InnerConfig::default(),
            initial_allocs: Vec::new(),
            fixed_assignment: false,
            feasibility_tol: 1e-6,
        }
    }
}

/// Alternate the beamforming and assignment subproblems until the sum rate
/// settles within `eps` or the outer budget runs out. The final allocation
/// is binary, power-projected and re-validated; the best iterate by sum
/// rate is returned while the trace records the accepted (post-safeguard)
/// iterates.
pub fn semi_centralized_solve(
    scn: &NetworkScenario,
    ch: &ChannelState,
    opts: &SemiCentralizedOptions,
) -> Result<SolverResult, SolverError> {
    // Starting pool: the provided candidates, plus the round-robin default
    // unless the scheduling is pinned (a pinned run must keep the caller's
    // association).
    let mut pool: Vec<AllocationState> = opts.initial_allocs.clone();
    if pool.is_empty() || !opts.fixed_assignment {
        pool.push(round_robin_allocation(scn, ch));
    }
    let mut current = AllocationState::zeros(scn, Mode::Binary);
    let mut current_rate = f64::NEG_INFINITY;
    for cand in &pool {
        let mut c = cand.clone();
        if c.w.iter().all(|w| w.norm_sqr() == 0.0) {
            equal_power_beams(scn, ch, &mut c);
        } else {
            scale_to_power_budgets(scn, &mut c);
        }
        let r = sum_rate(scn, ch, &c);
        if r > current_rate {
            current_rate = r;
            current = c;
        }
    }

    let mut iterate = ScaIterate::new(scn.idx().entries());
    let mut mult = DualMultipliers::zeros(scn);
    let mut best = current.clone();
    let mut best_rate = current_rate;
    let mut step_scale = 1.0f64;
    let mut trace = Vec::new();
    let mut messages = Vec::new();
    let mut ops = OpCounters::default();
    let mut status = SolveStatus::MaxIterations;
    let mut r_prev = current_rate;
    let mut outer = 0usize;

    while outer < opts.outer_max {
        outer += 1;
        let mut cand = current.clone();
        let cfg = InnerConfig {
            step_scale,
            ..opts.inner.clone()
        };
        let beam =
            solve_beamforming_subproblem(scn, ch, &mut cand, &mut iterate, &mut mult, &cfg, outer)?;
        let assign = if opts.fixed_assignment {
            InnerOutcome {
                inner_iterations: 0,
                messages: Vec::new(),
                per_bs_ops: 0,
                multiplier_norm: mult.max_norm(),
            }
        } else {
            solve_assignment_subproblem(scn, ch, &mut cand, &mut mult, &cfg, outer)?
        };
        scale_to_power_budgets(scn, &mut cand);
        let r_new = sum_rate(scn, ch, &cand);

        // Descent safeguard: reject a loss beyond eps, halve the dual steps.
        if r_new < current_rate - opts.eps {
            step_scale *= 0.5;
        } else {
            current = cand;
            current_rate = r_new;
        }
        if current_rate > best_rate {
            best_rate = current_rate;
            best = current.clone();
        }
        messages.extend(beam.messages.iter().copied());
        messages.extend(assign.messages.iter().copied());
        ops.per_bs_total += beam.per_bs_ops + assign.per_bs_ops;
        trace.push(TraceEntry {
            iteration: outer,
            objective: current_rate,
            bound: f64::NAN,
            inner_beam: beam.inner_iterations,
            inner_assign: assign.inner_iterations,
            multiplier_norm: assign.multiplier_norm,
        });
        let delta = (current_rate - r_prev).abs_();
        r_prev = current_rate;
        if delta <= opts.eps {
            status = SolveStatus::Converged;
            break;
        }
    }

    let mut final_alloc = best;
    scale_to_power_budgets(scn, &mut final_alloc);
    // Deselected entries transmit nothing.
    let idx = scn.idx();
    let zero = vec![Complex64::new(0.0, 0.0); scn.antennas];
    for (i, b, n, k) in idx.iter() {
        if final_alloc.rho[idx.of(i, b, n, k)] == 0.0 {
            final_alloc.set_beam(scn, i, b, n, k, &zero);
        }
    }
    let binary_objective = sum_rate(scn, ch, &final_alloc);
    let report = check_feasibility(scn, ch, &final_alloc, opts.feasibility_tol);
    let inner_total = trace
        .iter()
        .map(|t| t.inner_beam + t.inner_assign)
        .sum::<usize>();
    Ok(SolverResult {
        objective: binary_objective,
        binary_objective,
        gap: None,
        status,
        outer_iterations: outer,
        inner_iterations: inner_total,
        allocation: final_alloc,
        report,
        trace,
        messages,
        ops,
    })
}

// ---------------------------------------------------------------------------
// Fixed-association baselines
// ---------------------------------------------------------------------------

/// Distance-rule association: each user picks the nearest femto BS when it
/// is closer than `fbs_range_m`, otherwise the macro BS. Femto BSs keep at
/// most `noma_cap` users (earliest index wins), overflow falls to the macro
/// BS, whose users are dealt round-robin over subcarrier slots. Beams are
/// left for the beamforming subproblem.
pub fn heuristic_nos_assignment(scn: &NetworkScenario, fbs_range_m: f64) -> AllocationState {
    let idx = scn.idx();
    let mut alloc = AllocationState::zeros(scn, Mode::Binary);
    if scn.num_users == 0 {
        return alloc;
    }
    // Home InP and femto candidate: the overall nearest serving point.
    let mut home: Vec<(usize, Option<usize>)> = Vec::with_capacity(scn.num_users);
    for k in 0..scn.num_users {
        let mut best_inp = 0usize;
        let mut best_d = f64::INFINITY;
        let mut best_fbs: Option<usize> = None;
        for i in 0..scn.num_inps {
            let mut fbs: Option<(usize, f64)> = None;
            for b in 1..scn.bs_per_inp {
                let d = scn.distance(i, b, k);
                if fbs.is_none_or(|(_, bd)| d < bd) {
                    fbs = Some((b, d));
                }
            }
            let (cand_b, cand_d) = match fbs {
                Some((b, d)) if d < fbs_range_m => (Some(b), d),
                _ => (None, scn.distance(i, 0, k)),
            };
            if cand_d < best_d {
                best_d = cand_d;
                best_inp = i;
                best_fbs = cand_b;
            }
        }
        home.push((best_inp, best_fbs));
    }
    let mut fbs_load = vec![0usize; scn.num_inps * scn.bs_per_inp];
    let mut macro_users: Vec<Vec<usize>> = vec![Vec::new(); scn.num_inps];
    for k in 0..scn.num_users {
        let (i, fbs) = home[k];
        match fbs {
            Some(b) if fbs_load[idx.bs_of(i, b)] < scn.noma_cap => {
                fbs_load[idx.bs_of(i, b)] += 1;
                for n in 0..scn.subcarriers_per_inp {
                    alloc.rho[idx.of(i, b, n, k)] = 1.0;
                    alloc.x[idx.of(i, b, n, k)] = 1.0;
                }
            }
            _ => macro_users[i].push(k),
        }
    }
    for i in 0..scn.num_inps {
        let users = &macro_users[i];
        if users.is_empty() {
            continue;
        }
        let mut cursor = 0usize;
        for n in 0..scn.subcarriers_per_inp {
            let mut placed = 0usize;
            let mut scanned = 0usize;
            while placed < scn.noma_cap && scanned < users.len() {
                let k = users[cursor % users.len()];
                cursor += 1;
                scanned += 1;
                let e = idx.of(i, 0, n, k);
                if alloc.rho[e] == 0.0 {
                    alloc.rho[e] = 1.0;
                    alloc.x[e] = 1.0;
                    placed += 1;
                }
            }
        }
    }
    alloc
}

/// Single-BS association: each user connects only to its best-average-gain
/// BS (no coordinated transmission), dealt over subcarrier slots up to the
/// cap.
pub fn single_bs_assignment(scn: &NetworkScenario, ch: &ChannelState) -> AllocationState {
    let idx = scn.idx();
    let mut alloc = AllocationState::zeros(scn, Mode::Binary);
    if scn.num_users == 0 {
        return alloc;
    }
    let mut users_of_bs: Vec<Vec<usize>> = vec![Vec::new(); scn.num_inps * scn.bs_per_inp];
    for k in 0..scn.num_users {
        let (mut bi, mut bb, mut bg) = (0usize, 0usize, f64::NEG_INFINITY);
        for i in 0..scn.num_inps {
            for b in 0..scn.bs_per_inp {
                let g: f64 = (0..scn.subcarriers_per_inp)
                    .map(|n| ch.gain(i, b, n, k))
                    .sum();
                if g > bg {
                    bg = g;
                    bi = i;
                    bb = b;
                }
            }
        }
        users_of_bs[bi * scn.bs_per_inp + bb].push(k);
    }
    for i in 0..scn.num_inps {
        for b in 0..scn.bs_per_inp {
            let users = &users_of_bs[i * scn.bs_per_inp + b];
            if users.is_empty() {
                continue;
            }
            let mut cursor = 0usize;
            for n in 0..scn.subcarriers_per_inp {
                let mut placed = 0usize;
                let mut scanned = 0usize;
                while placed < scn.noma_cap && scanned < users.len() {
                    let k = users[cursor % users.len()];
                    cursor += 1;
                    scanned += 1;
                    let e = idx.of(i, b, n, k);
                    if alloc.rho[e] == 0.0 {
                        alloc.rho[e] = 1.0;
                        alloc.x[e] = 1.0;
                        placed += 1;
                    }
                }
            }
        }
    }
    alloc
}
