//! Monotone reformulation of the relaxed joint allocation problem.
//!
//! The relaxed problem (binary indicators relaxed to `[0,1]`) is rewritten
//! over a variable vector in which every constraint is either "increasing
//! function ≤ constant" (collected in a normal, i.e. downward-closed, set)
//! or "increasing function ≥ constant" (a co-normal, upward-closed set), and
//! the objective is increasing. The polyblock solver then maximizes over the
//! intersection of the two sets.
//!
//! Three devices make every function increasing:
//!
//! * Beams are parameterized by per-entry transmit power along the
//!   matched-filter direction `h/‖h‖`, so beam coordinates are nonnegative
//!   scalars bounded by the power budgets.
//! * Each scheduling indicator `ρ_e` gets a companion coordinate `σ_e`
//!   standing for `1 − ρ_e`, pinned by the constraint pair `ρ_e + σ_e ≤ 1`
//!   (normal side) and `ρ_e + σ_e ≥ 1` (co-normal side). Interference terms
//!   that carry `1 − ρ` factors read `σ` instead and become increasing in
//!   every coordinate; the pattern repeats as `x_e + s4_e ≤ 1` /
//!   `ρ_e + s4_e ≥ 1` to pin the viewpoint link `x_e ≤ ρ_e`.
//! * Every remaining difference-of-increasing-functions constraint
//!   `g⁺(z) − g⁻(z) ≤ 0` is lifted with a slack `s ∈ [0, g⁺(mask)]` into
//!   `g⁺(z) + s ≤ g⁺(mask)` (normal side) and `g⁻(z) + s ≥ g⁺(mask)`
//!   (co-normal side); the rate floors and the objective use the mirrored
//!   pattern with the interference-only halves at the mask as the constant.
//!
//! Interference-plus-noise terms are noise-normalized inside the logs so
//! the lifted objective halves differ by exactly the true sum rate:
//! `Q̃⁺(z) − Q̃⁻(z) = Σ x·log2(1 + γ)` at every point with `σ = 1 − ρ`.

use alloc::vec;
use alloc::vec::Vec;

use crate::index::EntryIndex;
use crate::math::{log2_1p, F64Ext};
use crate::scenario::{ChannelState, NetworkScenario};
use crate::sinr::{AllocationState, Mode};

/// Relative slack used by the set-membership predicates.
pub const MEMBER_TOL: f64 = 1e-9;

/// Coordinate layout of the monotone variable vector:
/// `[p | rho | sigma | x | s0 | s1 | s2.. | s3.. | s4..]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub entries: usize,
    pub pairs: usize,
    pub off_p: usize,
    pub off_rho: usize,
    pub off_sigma: usize,
    pub off_x: usize,
    pub off_s0: usize,
    pub off_s1: usize,
    pub off_s2: usize,
    pub off_s3: usize,
    pub off_s4: usize,
    pub dim: usize,
}

impl Layout {
    fn new(entries: usize, pairs: usize) -> Self {
        let off_p = 0;
        let off_rho = off_p + entries;
        let off_sigma = off_rho + entries;
        let off_x = off_sigma + entries;
        let off_s0 = off_x + entries;
        let off_s1 = off_s0 + 1;
        let off_s2 = off_s1 + 1;
        let off_s3 = off_s2 + pairs;
        let off_s4 = off_s3 + pairs;
        Layout {
            entries,
            pairs,
            off_p,
            off_rho,
            off_sigma,
            off_x,
            off_s0,
            off_s1,
            off_s2,
            off_s3,
            off_s4,
            dim: off_s4 + entries,
        }
    }
}

/// One ordered SIC pair on a cell `(i, b, n)`; `user_hi` decodes `user_lo`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SicPair {
    pub inp: usize,
    pub bs: usize,
    pub subcarrier: usize,
    pub user_hi: usize,
    pub user_lo: usize,
}

/// The relaxed allocation problem in canonical monotone form, with the
/// normal/co-normal membership predicates and the increasing objective.
#[derive(Debug, Clone)]
pub struct MonotoneProblem {
    pub scn: NetworkScenario,
    pub layout: Layout,
    /// Upper bound of every coordinate (the enclosing box corner).
    pub mask: Vec<f64>,
    /// `‖h_e‖²` per entry.
    own_gain: Vec<f64>,
    /// `|h_{(i,b,n,k)}^H ĥ_{(i,b,n,k')}|²` per `(entry, k')`.
    cross_gain: Vec<f64>,
    /// SIC rank per `(i, n, k)` (0 = highest order).
    sic_rank: Vec<usize>,
    /// Ordered SIC pairs in slack order.
    pub pairs: Vec<SicPair>,
    /// `T⁺` at the mask, per pair.
    tplus_mask: Vec<f64>,
    /// `T̃⁺` at the mask, per pair.
    ttilde_mask: Vec<f64>,
    /// `Q̃⁻` (equally `Σ_v Q_v⁻`) at the mask.
    pub qminus_mask: f64,
}

/// Field values of one point, shared by the constraint evaluations.
pub struct Fields {
    /// Own-signal power per `(i, n, k)` (indexed by `user_sub_of`).
    pub own: Vec<f64>,
    /// Viewpoint interference per entry.
    pub itot: Vec<f64>,
}

/// Build the monotone form of the relaxed problem for the given channels.
pub fn build_monotone_form(scn: &NetworkScenario, ch: &ChannelState) -> MonotoneProblem {
    let idx = scn.idx();
    let entries = idx.entries();
    let users = scn.num_users;

    let mut own_gain = vec![0.0; entries];
    for (i, b, n, k) in idx.iter() {
        own_gain[idx.of(i, b, n, k)] = ch.gain(i, b, n, k);
    }
    // cross_gain[e(i,b,n,k) * K + k'] = |h_{i,b,n,k}^H h_{i,b,n,k'}|² / ‖h_{i,b,n,k'}‖²
    let mut cross_gain = vec![0.0; entries * users];
    for (i, b, n, k) in idx.iter() {
        let hk = ch.vector(i, b, n, k);
        for kp in 0..users {
            let hp = ch.vector(i, b, n, kp);
            let denom = own_gain[idx.of(i, b, n, kp)];
            if denom == 0.0 {
                continue;
            }
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for m in 0..scn.antennas {
                acc += hk[m].conj() * hp[m];
            }
            cross_gain[idx.of(i, b, n, k) * users + kp] = acc.norm_sqr() / denom;
        }
    }

    let mut sic_rank = vec![0usize; scn.num_inps * scn.subcarriers_per_inp * users];
    for i in 0..scn.num_inps {
        for n in 0..scn.subcarriers_per_inp {
            for k in 0..users {
                sic_rank[idx.user_sub_of(i, n, k)] = ch.sic_rank(i, n, k);
            }
        }
    }

    let mut pairs = Vec::new();
    for i in 0..scn.num_inps {
        for b in 0..scn.bs_per_inp {
            for n in 0..scn.subcarriers_per_inp {
                let order = ch.sic_order(i, n);
                for hi_pos in 0..users {
                    for lo_pos in hi_pos + 1..users {
                        pairs.push(SicPair {
                            inp: i,
                            bs: b,
                            subcarrier: n,
                            user_hi: order[hi_pos],
                            user_lo: order[lo_pos],
                        });
                    }
                }
            }
        }
    }

    let layout = Layout::new(entries, pairs.len());

    // Per-entry beam power cap: the tightest box implied by the BS and MVNO
    // power budgets.
    let mut mask = vec![0.0; layout.dim];
    for (i, b, n, k) in idx.iter() {
        mask[layout.off_p + idx.of(i, b, n, k)] =
            scn.p_max_of_bs(i, b).min(scn.p_max_mvno[scn.mvno_of_user[k]]);
    }
    for e in 0..entries {
        mask[layout.off_rho + e] = 1.0;
        mask[layout.off_sigma + e] = 1.0;
        mask[layout.off_x + e] = 1.0;
        mask[layout.off_s4 + e] = 1.0;
    }

    let mut problem = MonotoneProblem {
        scn: scn.clone(),
        layout,
        mask,
        own_gain,
        cross_gain,
        sic_rank,
        pairs,
        tplus_mask: Vec::new(),
        ttilde_mask: Vec::new(),
        qminus_mask: 0.0,
    };

    // Constants at the mask corner; slack boxes derive from them (the lower
    // references vanish because every lifted function is zero at the origin).
    let mask_z = problem.mask.clone();
    let f_mask = problem.fields(&mask_z);
    problem.qminus_mask = problem.q_minus_mvno(&mask_z, &f_mask, None);
    problem.tplus_mask = (0..problem.pairs.len())
        .map(|t| problem.t_plus(&mask_z, t))
        .collect();
    problem.ttilde_mask = (0..problem.pairs.len())
        .map(|t| problem.t_tilde_plus_from(&mask_z, &f_mask, t))
        .collect();
    let l = problem.layout;
    problem.mask[l.off_s0] = problem.qminus_mask;
    problem.mask[l.off_s1] = problem.qminus_mask;
    for t in 0..problem.pairs.len() {
        problem.mask[l.off_s2 + t] = problem.tplus_mask[t];
        problem.mask[l.off_s3 + t] = problem.ttilde_mask[t];
    }
    problem
}

impl MonotoneProblem {
    #[inline]
    fn idx(&self) -> EntryIndex {
        self.scn.idx()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.layout.dim
    }

    #[inline]
    fn p<'a>(&self, z: &'a [f64]) -> &'a [f64] {
        &z[self.layout.off_p..self.layout.off_p + self.layout.entries]
    }
    #[inline]
    fn rho_of<'a>(&self, z: &'a [f64]) -> &'a [f64] {
        &z[self.layout.off_rho..self.layout.off_rho + self.layout.entries]
    }
    #[inline]
    fn sigma_of<'a>(&self, z: &'a [f64]) -> &'a [f64] {
        &z[self.layout.off_sigma..self.layout.off_sigma + self.layout.entries]
    }
    #[inline]
    fn x_of<'a>(&self, z: &'a [f64]) -> &'a [f64] {
        &z[self.layout.off_x..self.layout.off_x + self.layout.entries]
    }

    /// `‖h_e‖²` of a flat entry.
    #[inline]
    pub fn own_gain_of(&self, e: usize) -> f64 {
        self.own_gain[e]
    }

    #[inline]
    fn higher(&self, i: usize, n: usize, ka: usize, kb: usize) -> bool {
        let idx = self.idx();
        self.sic_rank[idx.user_sub_of(i, n, ka)] < self.sic_rank[idx.user_sub_of(i, n, kb)]
    }

    /// Own-signal and interference fields at `z`.
    pub fn fields(&self, z: &[f64]) -> Fields {
        let scn = &self.scn;
        let idx = self.idx();
        let (p, rho, sigma) = (self.p(z), self.rho_of(z), self.sigma_of(z));
        let users = scn.num_users;

        let mut own = vec![0.0; scn.num_inps * scn.subcarriers_per_inp * users];
        for i in 0..scn.num_inps {
            for n in 0..scn.subcarriers_per_inp {
                for k in 0..users {
                    let mut acc = 0.0;
                    for b in 0..scn.bs_per_inp {
                        let e = idx.of(i, b, n, k);
                        acc += rho[e] * p[e] * self.own_gain[e];
                    }
                    own[idx.user_sub_of(i, n, k)] = acc;
                }
            }
        }

        let mut itot = vec![0.0; idx.entries()];
        for i in 0..scn.num_inps {
            for n in 0..scn.subcarriers_per_inp {
                // inner[k * K + k'] = Σ_b' ρ p |h_{b',k}ĥ_{b',k'}|², reused
                // across viewpoints b.
                let mut inner = vec![0.0; users * users];
                for k in 0..users {
                    for kp in 0..users {
                        if kp == k {
                            continue;
                        }
                        let mut acc = 0.0;
                        for bp in 0..scn.bs_per_inp {
                            let ep = idx.of(i, bp, n, kp);
                            acc += rho[ep]
                                * p[ep]
                                * self.cross_gain[idx.of(i, bp, n, k) * users + kp];
                        }
                        inner[k * users + kp] = acc;
                    }
                }
                for b in 0..scn.bs_per_inp {
                    for k in 0..users {
                        let e = idx.of(i, b, n, k);
                        if rho[e] == 0.0 {
                            continue;
                        }
                        let mut acc = 0.0;
                        for kp in 0..users {
                            if kp == k {
                                continue;
                            }
                            let v = inner[k * users + kp];
                            if v == 0.0 {
                                continue;
                            }
                            if self.higher(i, n, kp, k) {
                                acc += v;
                            } else {
                                acc += sigma[idx.of(i, b, n, kp)] * v;
                            }
                        }
                        itot[e] = rho[e] * acc;
                    }
                }
            }
        }
        Fields { own, itot }
    }

    fn q_plus_mvno(&self, z: &[f64], f: &Fields, mvno: Option<usize>) -> f64 {
        let scn = &self.scn;
        let idx = self.idx();
        let xs = self.x_of(z);
        let n0 = scn.noise_power;
        let mut acc = 0.0;
        for (i, b, n, k) in idx.iter() {
            if mvno.is_some_and(|v| scn.mvno_of_user[k] != v) {
                continue;
            }
            let e = idx.of(i, b, n, k);
            if xs[e] > 0.0 {
                acc += xs[e] * log2_1p((f.itot[e] + f.own[idx.user_sub_of(i, n, k)]) / n0);
            }
        }
        acc
    }

    fn q_minus_mvno(&self, z: &[f64], f: &Fields, mvno: Option<usize>) -> f64 {
        let scn = &self.scn;
        let idx = self.idx();
        let xs = self.x_of(z);
        let n0 = scn.noise_power;
        let mut acc = 0.0;
        for (i, b, n, k) in idx.iter() {
            if mvno.is_some_and(|v| scn.mvno_of_user[k] != v) {
                continue;
            }
            let e = idx.of(i, b, n, k);
            if xs[e] > 0.0 {
                acc += xs[e] * log2_1p(f.itot[e] / n0);
            }
        }
        acc
    }

    /// Lifted objective half containing the own signal (increasing).
    pub fn q_tilde_plus(&self, z: &[f64]) -> f64 {
        let f = self.fields(z);
        self.q_plus_mvno(z, &f, None)
    }

    /// Lifted objective half with interference only (increasing).
    pub fn q_tilde_minus(&self, z: &[f64]) -> f64 {
        let f = self.fields(z);
        self.q_minus_mvno(z, &f, None)
    }

    /// Co-normal half of the lifted rate floors:
    /// `min_v [Q_v⁺ + Σ_{v'≠v} Q_{v'}⁻ − R^v_min]`.
    pub fn q_hat_plus(&self, z: &[f64]) -> f64 {
        let f = self.fields(z);
        let scn = &self.scn;
        let qp: Vec<f64> = (0..scn.num_mvnos)
            .map(|v| self.q_plus_mvno(z, &f, Some(v)))
            .collect();
        let qm: Vec<f64> = (0..scn.num_mvnos)
            .map(|v| self.q_minus_mvno(z, &f, Some(v)))
            .collect();
        let total_minus: f64 = qm.iter().sum();
        (0..scn.num_mvnos)
            .map(|v| qp[v] + (total_minus - qm[v]) - scn.r_min_mvno[v])
            .fold(f64::INFINITY, f64::min)
    }

    /// `T⁺` of pair `t`: the higher user's beam power measured on the lower
    /// user's channel (increasing).
    pub fn t_plus(&self, z: &[f64], t: usize) -> f64 {
        let idx = self.idx();
        let pr = self.pairs[t];
        let (p, rho) = (self.p(z), self.rho_of(z));
        let e_lo = idx.of(pr.inp, pr.bs, pr.subcarrier, pr.user_lo);
        let e_hi = idx.of(pr.inp, pr.bs, pr.subcarrier, pr.user_hi);
        rho[e_lo]
            * rho[e_hi]
            * p[e_hi]
            * self.cross_gain[e_lo * self.scn.num_users + pr.user_hi]
    }

    /// Co-normal partner of `T⁺`: the lower user's own beam power on its own
    /// channel (increasing).
    fn t_plus_partner(&self, z: &[f64], t: usize) -> f64 {
        let idx = self.idx();
        let pr = self.pairs[t];
        let (p, rho) = (self.p(z), self.rho_of(z));
        let e_lo = idx.of(pr.inp, pr.bs, pr.subcarrier, pr.user_lo);
        rho[e_lo] * p[e_lo] * self.own_gain[e_lo]
    }

    fn t_tilde_plus_from(&self, z: &[f64], f: &Fields, t: usize) -> f64 {
        let idx = self.idx();
        let pr = self.pairs[t];
        let rho = self.rho_of(z);
        let e_hi = idx.of(pr.inp, pr.bs, pr.subcarrier, pr.user_hi);
        let e_lo = idx.of(pr.inp, pr.bs, pr.subcarrier, pr.user_lo);
        let own_lo = f.own[idx.user_sub_of(pr.inp, pr.subcarrier, pr.user_lo)];
        let n0 = self.scn.noise_power;
        rho[e_hi] * rho[e_lo] * own_lo * (f.itot[e_hi] / n0 + 1.0)
    }

    fn t_tilde_minus_from(&self, z: &[f64], f: &Fields, t: usize) -> f64 {
        let idx = self.idx();
        let pr = self.pairs[t];
        let (p, rho) = (self.p(z), self.rho_of(z));
        let users = self.scn.num_users;
        let e_hi = idx.of(pr.inp, pr.bs, pr.subcarrier, pr.user_hi);
        let e_lo_entry = idx.of(pr.inp, pr.bs, pr.subcarrier, pr.user_lo);
        // The higher user's measurement of the lower user's beams.
        let mut meas = 0.0;
        for bp in 0..self.scn.bs_per_inp {
            let e_hi_bp = idx.of(pr.inp, bp, pr.subcarrier, pr.user_hi);
            let e_lo_bp = idx.of(pr.inp, bp, pr.subcarrier, pr.user_lo);
            meas += rho[e_hi_bp] * p[e_lo_bp] * self.cross_gain[e_hi_bp * users + pr.user_lo];
        }
        let n0 = self.scn.noise_power;
        rho[e_hi] * meas * (f.itot[e_lo_entry] / n0 + 1.0)
    }

    /// `T̃⁺` of pair `t` (increasing): the lower user's own SINR numerator
    /// times the higher user's noise-normalized interference-plus-noise.
    pub fn t_tilde_plus(&self, z: &[f64], t: usize) -> f64 {
        let f = self.fields(z);
        self.t_tilde_plus_from(z, &f, t)
    }

    /// `T̃⁻` of pair `t` (increasing): the higher user's measurement of the
    /// lower user's beams times the lower user's interference-plus-noise.
    pub fn t_tilde_minus(&self, z: &[f64], t: usize) -> f64 {
        let f = self.fields(z);
        self.t_tilde_minus_from(z, &f, t)
    }

    /// The increasing objective `Q̃⁺(z) + s0`. Subtract [`Self::qminus_mask`]
    /// to convert to true sum-rate units.
    pub fn objective(&self, z: &[f64]) -> f64 {
        self.q_tilde_plus(z) + z[self.layout.off_s0]
    }

    /// Normal-set membership: the box plus every "increasing ≤ constant"
    /// constraint.
    pub fn ns_member(&self, z: &[f64]) -> bool {
        let scn = &self.scn;
        let idx = self.idx();
        let l = self.layout;
        let tol = |c: f64| c + MEMBER_TOL * c.abs().max(1.0);

        for (zi, mi) in z.iter().zip(self.mask.iter()) {
            if *zi > tol(*mi) || *zi < -MEMBER_TOL {
                return false;
            }
        }
        let (p, rho, sigma, x) = (self.p(z), self.rho_of(z), self.sigma_of(z), self.x_of(z));

        // rho + sigma ≤ 1 and x + s4 ≤ 1 per entry.
        for e in 0..l.entries {
            if rho[e] + sigma[e] > tol(1.0) {
                return false;
            }
            if x[e] + z[l.off_s4 + e] > tol(1.0) {
                return false;
            }
        }
        // Cross-InP exclusivity (vacuous with a single InP).
        if scn.num_inps >= 2 {
            for k in 0..scn.num_users {
                let mut best = 0.0f64;
                let mut second = 0.0f64;
                for i in 0..scn.num_inps {
                    let mut m = 0.0f64;
                    for b in 0..scn.bs_per_inp {
                        for n in 0..scn.subcarriers_per_inp {
                            m = m.max(rho[idx.of(i, b, n, k)]);
                        }
                    }
                    if m > best {
                        second = best;
                        best = m;
                    } else if m > second {
                        second = m;
                    }
                }
                if best + second > tol(1.0) {
                    return false;
                }
            }
        }
        // NOMA cap per cell.
        for i in 0..scn.num_inps {
            for b in 0..scn.bs_per_inp {
                for n in 0..scn.subcarriers_per_inp {
                    let s: f64 = (0..scn.num_users).map(|k| rho[idx.of(i, b, n, k)]).sum();
                    if s > tol(scn.noma_cap as f64) {
                        return false;
                    }
                }
            }
        }
        // Viewpoint uniqueness per (i, n, k).
        for i in 0..scn.num_inps {
            for n in 0..scn.subcarriers_per_inp {
                for k in 0..scn.num_users {
                    let s: f64 = (0..scn.bs_per_inp).map(|b| x[idx.of(i, b, n, k)]).sum();
                    if s > tol(1.0) {
                        return false;
                    }
                }
            }
        }
        // Per-BS and per-MVNO power.
        for i in 0..scn.num_inps {
            for b in 0..scn.bs_per_inp {
                let mut used = 0.0;
                for n in 0..scn.subcarriers_per_inp {
                    for k in 0..scn.num_users {
                        let e = idx.of(i, b, n, k);
                        used += rho[e] * p[e];
                    }
                }
                if used > tol(scn.p_max_of_bs(i, b)) {
                    return false;
                }
            }
        }
        for v in 0..scn.num_mvnos {
            let mut used = 0.0;
            for (i, b, n, k) in idx.iter() {
                if scn.mvno_of_user[k] == v {
                    let e = idx.of(i, b, n, k);
                    used += rho[e] * p[e];
                }
            }
            if used > tol(scn.p_max_mvno[v]) {
                return false;
            }
        }

        // Lifted halves against their mask constants.
        let f = self.fields(z);
        let qminus = self.q_minus_mvno(z, &f, None);
        if qminus + z[l.off_s0] > tol(self.qminus_mask) {
            return false;
        }
        if qminus + z[l.off_s1] > tol(self.qminus_mask) {
            return false;
        }
        for t in 0..self.pairs.len() {
            if self.t_plus(z, t) + z[l.off_s2 + t] > tol(self.tplus_mask[t]) {
                return false;
            }
            if self.t_tilde_plus_from(z, &f, t) + z[l.off_s3 + t] > tol(self.ttilde_mask[t]) {
                return false;
            }
        }
        true
    }

    /// Co-normal set membership: every "increasing ≥ constant" constraint.
    pub fn cns_member(&self, z: &[f64]) -> bool {
        let l = self.layout;
        let tol = |c: f64| c - MEMBER_TOL * c.abs().max(1.0);
        if z.iter().any(|v| *v < -MEMBER_TOL) {
            return false;
        }
        let (rho, sigma, x) = (self.rho_of(z), self.sigma_of(z), self.x_of(z));
        let _ = x;
        for e in 0..l.entries {
            if rho[e] + sigma[e] < tol(1.0) {
                return false;
            }
            if rho[e] + z[l.off_s4 + e] < tol(1.0) {
                return false;
            }
        }
        let f = self.fields(z);
        if self.q_hat_plus_from(z, &f) + z[l.off_s1] < tol(self.qminus_mask) {
            return false;
        }
        for t in 0..self.pairs.len() {
            if self.t_plus_partner(z, t) + z[l.off_s2 + t] < tol(self.tplus_mask[t]) {
                return false;
            }
            if self.t_tilde_minus_from(z, &f, t) + z[l.off_s3 + t] < tol(self.ttilde_mask[t]) {
                return false;
            }
        }
        true
    }

    fn q_hat_plus_from(&self, z: &[f64], f: &Fields) -> f64 {
        let scn = &self.scn;
        let qp: Vec<f64> = (0..scn.num_mvnos)
            .map(|v| self.q_plus_mvno(z, f, Some(v)))
            .collect();
        let qm: Vec<f64> = (0..scn.num_mvnos)
            .map(|v| self.q_minus_mvno(z, f, Some(v)))
            .collect();
        let total_minus: f64 = qm.iter().sum();
        (0..scn.num_mvnos)
            .map(|v| qp[v] + (total_minus - qm[v]) - scn.r_min_mvno[v])
            .fold(f64::INFINITY, f64::min)
    }

    /// Snap the slack coordinates of `z` to the values that make the lifted
    /// constraints equivalent to the original relaxed ones, with
    /// `σ = 1 − ρ` and `x` clipped under `ρ`. Returns the snapped point.
    pub fn canonical_point(&self, z: &[f64]) -> Vec<f64> {
        let l = self.layout;
        let mut c = z.to_vec();
        for e in 0..l.entries {
            let r = c[l.off_rho + e].clamp(0.0, 1.0);
            c[l.off_rho + e] = r;
            c[l.off_sigma + e] = 1.0 - r;
            c[l.off_s4 + e] = 1.0 - c[l.off_x + e].min(r).max(0.0);
            c[l.off_x + e] = c[l.off_x + e].min(r).max(0.0);
        }
        let f = self.fields(&c);
        let qminus = self.q_minus_mvno(&c, &f, None);
        c[l.off_s0] = (self.qminus_mask - qminus).max(0.0);
        c[l.off_s1] = c[l.off_s0];
        for t in 0..self.pairs.len() {
            c[l.off_s2 + t] = (self.tplus_mask[t] - self.t_plus(&c, t)).max(0.0);
            c[l.off_s3 + t] = (self.ttilde_mask[t] - self.t_tilde_plus_from(&c, &f, t)).max(0.0);
        }
        c
    }

    /// Map an allocation onto a monotone point. Beam powers are `‖w‖²`,
    /// which matches the matched-filter parameterization exactly when the
    /// beams point along `h` (always true for single-antenna scenarios).
    pub fn point_from_allocation(&self, alloc: &AllocationState) -> Vec<f64> {
        let idx = self.idx();
        let l = self.layout;
        let mut z = vec![0.0; l.dim];
        for (i, b, n, k) in idx.iter() {
            let e = idx.of(i, b, n, k);
            z[l.off_p + e] = alloc
                .beam(&self.scn, i, b, n, k)
                .iter()
                .map(|c| c.norm_sqr())
                .sum();
            z[l.off_rho + e] = alloc.rho[e];
            z[l.off_x + e] = alloc.x[e];
        }
        self.canonical_point(&z)
    }

    /// Materialize a monotone point as an allocation with matched-filter
    /// beams. `σ` and the slacks are dropped; `mode` reflects whether the
    /// indicators happen to be binary.
    pub fn allocation_from_point(&self, ch: &ChannelState, z: &[f64]) -> AllocationState {
        let idx = self.idx();
        let l = self.layout;
        let mode = if z[l.off_rho..l.off_rho + l.entries]
            .iter()
            .chain(z[l.off_x..l.off_x + l.entries].iter())
            .all(|&v| v == 0.0 || v == 1.0)
        {
            Mode::Binary
        } else {
            Mode::Relaxed
        };
        let mut alloc = AllocationState::zeros(&self.scn, mode);
        for (i, b, n, k) in idx.iter() {
            let e = idx.of(i, b, n, k);
            alloc.rho[e] = z[l.off_rho + e];
            alloc.x[e] = z[l.off_x + e];
            let p = z[l.off_p + e];
            if p > 0.0 {
                let g = self.own_gain[e];
                if g > 0.0 {
                    let scale = (p / g).sqrt_();
                    let beam: Vec<num_complex::Complex64> = ch
                        .vector(i, b, n, k)
                        .iter()
                        .map(|c| c * scale)
                        .collect();
                    alloc.set_beam(&self.scn, i, b, n, k, &beam);
                }
            }
        }
        alloc
    }

    /// True sum rate of the `(p, ρ, x)` part of a canonical point, in
    /// bps/Hz: the lifted objective minus the interference offset.
    pub fn true_rate_of(&self, z: &[f64]) -> f64 {
        let f = self.fields(z);
        self.q_plus_mvno(z, &f, None) - self.q_minus_mvno(z, &f, None)
    }

    /// Score a candidate schedule of one `(inp, subcarrier)` block: active
    /// beams `(bs, user, power)` with every listed `(bs, user)` scheduled.
    /// Returns the block's best-viewpoint sum rate and the chosen viewpoint
    /// per user, or `None` when the in-block ordering constraints fail.
    /// Budgets and cross-block constraints are the caller's concern.
    pub fn score_block(
        &self,
        i: usize,
        n: usize,
        active: &[(usize, usize, f64)],
    ) -> Option<(f64, Vec<(usize, usize)>)> {
        let scn = &self.scn;
        let idx = self.idx();
        let users = scn.num_users;
        let n0 = scn.noise_power;
        let sched = |b: usize, k: usize| active.iter().any(|&(bb, kk, _)| bb == b && kk == k);
        let power = |b: usize, k: usize| {
            active
                .iter()
                .find(|&&(bb, kk, _)| bb == b && kk == k)
                .map(|&(_, _, p)| p)
                .unwrap_or(0.0)
        };
        let mut own = vec![0.0f64; users];
        for &(b, k, p) in active {
            own[k] += p * self.own_gain[idx.of(i, b, n, k)];
        }
        // Viewpoint interference for a scheduled (b, k).
        let itot = |b: usize, k: usize| -> f64 {
            let mut acc = 0.0;
            for &(bp, kp, p) in active {
                if kp == k || p == 0.0 {
                    continue;
                }
                if sched(b, kp) && self.higher(i, n, k, kp) {
                    continue; // cancelled: in-set and of lower order
                }
                acc += p * self.cross_gain[idx.of(i, bp, n, k) * users + kp];
            }
            acc
        };
        // In-block ordering constraints over co-scheduled pairs.
        for b in 0..scn.bs_per_inp {
            for &(b1, k_lo, _) in active {
                if b1 != b {
                    continue;
                }
                for &(b2, k_hi, _) in active {
                    if b2 != b || k_hi == k_lo || !self.higher(i, n, k_hi, k_lo) {
                        continue;
                    }
                    // Power order: the higher user's beam measured on the
                    // lower user's channel must not exceed its own beam.
                    let e_lo = idx.of(i, b, n, k_lo);
                    let lhs = power(b, k_hi) * self.cross_gain[e_lo * users + k_hi];
                    let rhs = power(b, k_lo) * self.own_gain[e_lo];
                    if lhs > rhs + 1e-12 * rhs.abs().max(1e-30) {
                        return None;
                    }
                    // Decoding order: the higher user decodes the lower
                    // user's signal at least as well as the lower user.
                    let mut meas = 0.0;
                    for bp in 0..scn.bs_per_inp {
                        if sched(bp, k_hi) {
                            meas += power(bp, k_lo)
                                * self.cross_gain[idx.of(i, bp, n, k_hi) * users + k_lo];
                        }
                    }
                    let lhs = meas / (itot(b, k_hi) + n0);
                    let rhs = own[k_lo] / (itot(b, k_lo) + n0);
                    if lhs + 1e-12 * rhs.abs().max(1e-30) < rhs {
                        return None;
                    }
                }
            }
        }
        let mut score = 0.0;
        let mut viewpoints = Vec::new();
        for k in 0..users {
            if own[k] <= 0.0 {
                continue;
            }
            let mut best = f64::NEG_INFINITY;
            let mut best_b = None;
            for b in 0..scn.bs_per_inp {
                if sched(b, k) {
                    let r = log2_1p(own[k] / (itot(b, k) + n0));
                    if r > best {
                        best = r;
                        best_b = Some(b);
                    }
                }
            }
            if let Some(b) = best_b {
                score += best;
                viewpoints.push((k, b));
            }
        }
        Some((score, viewpoints))
    }
}
