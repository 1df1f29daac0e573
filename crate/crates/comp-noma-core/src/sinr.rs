//! Viewpoint-based SINR model, user rates, the sum-rate objective and every
//! constraint of the joint allocation problem.
//!
//! A user's SINR is written from the viewpoint of one BS `b` of its InP: the
//! numerator aggregates the user's own signal copies from every coordinated
//! BS, while the denominator splits the interference into a NOMA part (users
//! of higher SIC order in `b`'s non-orthogonal set) and an inter-cell part
//! (everything else), plus noise. The binary viewpoint indicator `x` selects
//! which viewpoint's rate a user is credited with on each subcarrier.
//!
//! All evaluation functions are pure; callers may evaluate different
//! allocations concurrently over shared scenario/channel data.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math::log2_1p;
use crate::scenario::{ChannelState, NetworkScenario};

/// Whether scheduling indicators are binary or time-sharing fractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Binary,
    Relaxed,
}

/// Beam vectors `W`, scheduling indicators `rho` and viewpoint indicators
/// `x`, all stored flat over `(i, b, n, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationState {
    pub w: Vec<Complex64>,
    pub rho: Vec<f64>,
    pub x: Vec<f64>,
    pub mode: Mode,
}

impl AllocationState {
    pub fn zeros(scn: &NetworkScenario, mode: Mode) -> Self {
        let idx = scn.idx();
        AllocationState {
            w: vec![Complex64::new(0.0, 0.0); idx.coeffs()],
            rho: vec![0.0; idx.entries()],
            x: vec![0.0; idx.entries()],
            mode,
        }
    }

    /// Beam vector of entry `(i, b, n, k)`.
    #[inline]
    pub fn beam<'a>(&'a self, scn: &NetworkScenario, i: usize, b: usize, n: usize, k: usize) -> &'a [Complex64] {
        let idx = scn.idx();
        let s = idx.vec_of(i, b, n, k);
        &self.w[s..s + idx.antennas]
    }

    /// `‖w‖²` of entry `(i, b, n, k)`.
    pub fn beam_power(&self, scn: &NetworkScenario, i: usize, b: usize, n: usize, k: usize) -> f64 {
        self.beam(scn, i, b, n, k).iter().map(|c| c.norm_sqr()).sum()
    }

    /// Overwrite the beam of entry `(i, b, n, k)`.
    pub fn set_beam(&mut self, scn: &NetworkScenario, i: usize, b: usize, n: usize, k: usize, v: &[Complex64]) {
        let idx = scn.idx();
        let s = idx.vec_of(i, b, n, k);
        self.w[s..s + idx.antennas].copy_from_slice(v);
    }

    /// True when every rho/x entry is 0 or 1 exactly.
    pub fn is_binary(&self) -> bool {
        self.rho
            .iter()
            .chain(self.x.iter())
            .all(|&v| v == 0.0 || v == 1.0)
    }
}

/// `|h_{i,b',n,k}^H w_{i,b',n,k'}|²` — power of user `k'`'s beam at BS `b'`
/// measured on user `k`'s channel.
pub fn beam_gain_on(
    scn: &NetworkScenario,
    ch: &ChannelState,
    alloc: &AllocationState,
    i: usize,
    bp: usize,
    n: usize,
    k: usize,
    kp: usize,
) -> f64 {
    let h = ch.vector(i, bp, n, k);
    let w = alloc.beam(scn, i, bp, n, kp);
    let mut acc = Complex64::new(0.0, 0.0);
    for (hm, wm) in h.iter().zip(w.iter()) {
        acc += hm.conj() * wm;
    }
    acc.norm_sqr()
}

/// NOMA interference at user `k` from the viewpoint of BS `(i, b)` on
/// subcarrier `n`: signals of users of higher SIC order that share `b`'s
/// non-orthogonal set, received from every coordinated BS.
pub fn noma_interference(
    scn: &NetworkScenario,
    ch: &ChannelState,
    alloc: &AllocationState,
    i: usize,
    b: usize,
    n: usize,
    k: usize,
) -> f64 {
    let idx = scn.idx();
    let rho_bk = alloc.rho[idx.of(i, b, n, k)];
    if rho_bk == 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for kp in 0..scn.num_users {
        if kp == k || !ch.higher_order(i, n, kp, k) {
            continue;
        }
        let rho_bkp = alloc.rho[idx.of(i, b, n, kp)];
        if rho_bkp == 0.0 {
            continue;
        }
        for bp in 0..scn.bs_per_inp {
            let rho_bpkp = alloc.rho[idx.of(i, bp, n, kp)];
            if rho_bpkp == 0.0 {
                continue;
            }
            acc += rho_bk * rho_bkp * rho_bpkp * beam_gain_on(scn, ch, alloc, i, bp, n, k, kp);
        }
    }
    acc
}

/// Inter-cell interference at user `k` from the viewpoint of BS `(i, b)` on
/// subcarrier `n`: signals of users outside `b`'s non-orthogonal set.
pub fn inter_interference(
    scn: &NetworkScenario,
    ch: &ChannelState,
    alloc: &AllocationState,
    i: usize,
    b: usize,
    n: usize,
    k: usize,
) -> f64 {
    let idx = scn.idx();
    let rho_bk = alloc.rho[idx.of(i, b, n, k)];
    if rho_bk == 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for kp in 0..scn.num_users {
        if kp == k {
            continue;
        }
        let off_set = 1.0 - alloc.rho[idx.of(i, b, n, kp)];
        if off_set == 0.0 {
            continue;
        }
        for bp in 0..scn.bs_per_inp {
            let rho_bpkp = alloc.rho[idx.of(i, bp, n, kp)];
            if rho_bpkp == 0.0 {
                continue;
            }
            acc += rho_bk * off_set * rho_bpkp * beam_gain_on(scn, ch, alloc, i, bp, n, k, kp);
        }
    }
    acc
}

/// Own-signal power of user `k` on subcarrier `n` of InP `i`: coherent per-BS
/// combining, power-summed over the coordinated BSs.
pub fn own_signal(
    scn: &NetworkScenario,
    ch: &ChannelState,
    alloc: &AllocationState,
    i: usize,
    n: usize,
    k: usize,
) -> f64 {
    let idx = scn.idx();
    (0..scn.bs_per_inp)
        .map(|bp| {
            let r = alloc.rho[idx.of(i, bp, n, k)];
            if r == 0.0 {
                0.0
            } else {
                r * beam_gain_on(scn, ch, alloc, i, bp, n, k, k)
            }
        })
        .sum()
}

/// SINR of user `k` from the viewpoint of BS `(i, b)` on subcarrier `n`.
pub fn sinr(
    scn: &NetworkScenario,
    ch: &ChannelState,
    alloc: &AllocationState,
    i: usize,
    b: usize,
    n: usize,
    k: usize,
) -> f64 {
    let num = own_signal(scn, ch, alloc, i, n, k);
    if num == 0.0 {
        return 0.0;
    }
    let den = noma_interference(scn, ch, alloc, i, b, n, k)
        + inter_interference(scn, ch, alloc, i, b, n, k)
        + scn.noise_power;
    num / den
}

/// `log2(1 + γ)` of the viewpoint `(i, b, n, k)`.
pub fn rate(
    scn: &NetworkScenario,
    ch: &ChannelState,
    alloc: &AllocationState,
    i: usize,
    b: usize,
    n: usize,
    k: usize,
) -> f64 {
    log2_1p(sinr(scn, ch, alloc, i, b, n, k))
}

/// Viewpoint-weighted rate of user `k`, summed over all its viewpoints and
/// subcarriers.
pub fn user_rate(scn: &NetworkScenario, ch: &ChannelState, alloc: &AllocationState, k: usize) -> f64 {
    let idx = scn.idx();
    let mut acc = 0.0;
    for i in 0..scn.num_inps {
        for b in 0..scn.bs_per_inp {
            for n in 0..scn.subcarriers_per_inp {
                let xv = alloc.x[idx.of(i, b, n, k)];
                if xv > 0.0 {
                    acc += xv * rate(scn, ch, alloc, i, b, n, k);
                }
            }
        }
    }
    acc
}

/// The objective: `Σ x · log2(1 + γ)` over all entries.
pub fn sum_rate(scn: &NetworkScenario, ch: &ChannelState, alloc: &AllocationState) -> f64 {
    (0..scn.num_users)
        .map(|k| user_rate(scn, ch, alloc, k))
        .sum()
}

/// Numerator of user `k`'s decoding of user `k'`'s signal at viewpoint
/// `(i, b, n)`: `k'`'s beam powers measured on `k`'s channels, masked by
/// `k`'s own scheduling.
fn decode_numerator(
    scn: &NetworkScenario,
    ch: &ChannelState,
    alloc: &AllocationState,
    i: usize,
    n: usize,
    k: usize,
    kp: usize,
) -> f64 {
    let idx = scn.idx();
    (0..scn.bs_per_inp)
        .map(|bp| {
            let r = alloc.rho[idx.of(i, bp, n, k)];
            if r == 0.0 {
                0.0
            } else {
                r * beam_gain_on(scn, ch, alloc, i, bp, n, k, kp)
            }
        })
        .sum()
}

/// SINR of user `k` decoding user `k'`'s signal at viewpoint `(i, b, n)`.
pub fn decode_sinr(
    scn: &NetworkScenario,
    ch: &ChannelState,
    alloc: &AllocationState,
    i: usize,
    b: usize,
    n: usize,
    k: usize,
    kp: usize,
) -> f64 {
    let num = decode_numerator(scn, ch, alloc, i, n, k, kp);
    if num == 0.0 {
        return 0.0;
    }
    let den = noma_interference(scn, ch, alloc, i, b, n, k)
        + inter_interference(scn, ch, alloc, i, b, n, k)
        + scn.noise_power;
    num / den
}

/// Residual of one ordered-pair constraint, keyed by SIC ranks on `(i, b, n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairResidual {
    pub inp: usize,
    pub bs: usize,
    pub subcarrier: usize,
    /// Higher-order user of the pair.
    pub user_hi: usize,
    /// Lower-order user of the pair.
    pub user_lo: usize,
    pub value: f64,
}

/// Per-constraint residuals of a full allocation, signed so that a value
/// above the tolerance means the constraint is violated.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport {
    /// `Σ ρ‖w‖² − P_max` per BS `(i, b)`.
    pub bs_power: Vec<f64>,
    /// `Σ ρ‖w‖² − P_max` per MVNO.
    pub mvno_power: Vec<f64>,
    /// `R_min − Σ x·r` per user.
    pub min_rate: Vec<f64>,
    /// NOMA power-order residuals per ordered pair.
    pub noma_power_order: Vec<PairResidual>,
    /// SIC decoding-order residuals per ordered pair.
    pub sic_sinr_order: Vec<PairResidual>,
    /// Cross-InP exclusivity residual per user.
    pub one_inp: Vec<f64>,
    /// `Σ_k ρ − L_T` per `(i, b, n)`.
    pub noma_cap: Vec<f64>,
    /// `x − ρ` per entry.
    pub x_rho_link: Vec<f64>,
    /// `Σ_b x − 1` per `(i, n, k)`.
    pub nos_unique: Vec<f64>,
    /// Every residual at or below this tolerance.
    pub feasible: bool,
    pub tolerance: f64,
}

impl ConstraintReport {
    /// Largest residual across all families.
    pub fn max_residual(&self) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for v in self
            .bs_power
            .iter()
            .chain(self.mvno_power.iter())
            .chain(self.min_rate.iter())
            .chain(self.one_inp.iter())
            .chain(self.noma_cap.iter())
            .chain(self.x_rho_link.iter())
            .chain(self.nos_unique.iter())
        {
            m = m.max(*v);
        }
        for p in self.noma_power_order.iter().chain(self.sic_sinr_order.iter()) {
            m = m.max(p.value);
        }
        m
    }

    /// Largest residual among the combinatorial families (cross-InP
    /// exclusivity, NOMA cap, x–rho link, viewpoint uniqueness).
    pub fn max_combinatorial_residual(&self) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for v in self
            .one_inp
            .iter()
            .chain(self.noma_cap.iter())
            .chain(self.x_rho_link.iter())
            .chain(self.nos_unique.iter())
        {
            m = m.max(*v);
        }
        m
    }

    /// Largest power residual (per-BS and per-MVNO budgets), in watts.
    pub fn max_power_residual(&self) -> f64 {
        self.bs_power
            .iter()
            .chain(self.mvno_power.iter())
            .fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    /// Whether any user misses its rate floor at the given tolerance.
    pub fn min_rate_violated(&self, tol: f64) -> bool {
        self.min_rate.iter().any(|&v| v > tol)
    }

    /// Flat key → residual map for text output. Small families are listed
    /// per item; the per-pair families report their maximum.
    pub fn flat_entries(&self) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        for (j, v) in self.bs_power.iter().enumerate() {
            out.push((format!("bs_power[{j}]"), *v));
        }
        for (v_idx, v) in self.mvno_power.iter().enumerate() {
            out.push((format!("mvno_power[{v_idx}]"), *v));
        }
        for (k, v) in self.min_rate.iter().enumerate() {
            out.push((format!("min_rate[{k}]"), *v));
        }
        for (k, v) in self.one_inp.iter().enumerate() {
            out.push((format!("one_inp[{k}]"), *v));
        }
        let fam_max = |ps: &[PairResidual]| ps.iter().fold(0.0f64, |m, p| m.max(p.value));
        out.push(("noma_power_order.max".into(), fam_max(&self.noma_power_order)));
        out.push(("sic_sinr_order.max".into(), fam_max(&self.sic_sinr_order)));
        let vec_max = |vs: &[f64]| vs.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        if !self.noma_cap.is_empty() {
            out.push(("noma_cap.max".into(), vec_max(&self.noma_cap)));
        }
        if !self.x_rho_link.is_empty() {
            out.push(("x_rho_link.max".into(), vec_max(&self.x_rho_link)));
        }
        if !self.nos_unique.is_empty() {
            out.push(("nos_unique.max".into(), vec_max(&self.nos_unique)));
        }
        out.push(("feasible".into(), if self.feasible { 1.0 } else { 0.0 }));
        out
    }
}

/// Evaluate every constraint family of the allocation problem at `tol`.
/// Infeasibility is data, not an error.
pub fn check_feasibility(
    scn: &NetworkScenario,
    ch: &ChannelState,
    alloc: &AllocationState,
    tol: f64,
) -> ConstraintReport {
    let idx = scn.idx();

    // Per-BS and per-MVNO transmit power.
    let mut bs_power = vec![0.0; scn.num_inps * scn.bs_per_inp];
    let mut mvno_power = vec![0.0; scn.num_mvnos];
    for (i, b, n, k) in idx.iter() {
        let r = alloc.rho[idx.of(i, b, n, k)];
        if r > 0.0 {
            let p = r * alloc.beam_power(scn, i, b, n, k);
            bs_power[idx.bs_of(i, b)] += p;
            mvno_power[scn.mvno_of_user[k]] += p;
        }
    }
    for (j, v) in bs_power.iter_mut().enumerate() {
        *v -= scn.p_max_bs[j];
    }
    for (v_idx, v) in mvno_power.iter_mut().enumerate() {
        *v -= scn.p_max_mvno[v_idx];
    }

    // Per-user rate floors.
    let min_rate: Vec<f64> = (0..scn.num_users)
        .map(|k| scn.r_min_of_user(k) - user_rate(scn, ch, alloc, k))
        .collect();

    // Ordered-pair constraints per (i, b, n).
    let mut noma_power_order = Vec::new();
    let mut sic_sinr_order = Vec::new();
    for i in 0..scn.num_inps {
        for n in 0..scn.subcarriers_per_inp {
            let order = ch.sic_order(i, n);
            for b in 0..scn.bs_per_inp {
                for hi_pos in 0..order.len() {
                    for lo_pos in hi_pos + 1..order.len() {
                        let k_hi = order[hi_pos];
                        let k_lo = order[lo_pos];
                        // NOMA power order: the lower user's own beam must
                        // dominate the higher user's beam on its channel.
                        let rho_lo = alloc.rho[idx.of(i, b, n, k_lo)];
                        let rho_hi = alloc.rho[idx.of(i, b, n, k_hi)];
                        let npo = rho_lo * rho_hi * beam_gain_on(scn, ch, alloc, i, b, n, k_lo, k_hi)
                            - rho_lo * beam_gain_on(scn, ch, alloc, i, b, n, k_lo, k_lo);
                        noma_power_order.push(PairResidual {
                            inp: i,
                            bs: b,
                            subcarrier: n,
                            user_hi: k_hi,
                            user_lo: k_lo,
                            value: npo,
                        });
                        // SIC decoding order: the higher user must decode the
                        // lower user's signal at least as well as the lower
                        // user itself.
                        let sso = rho_hi
                            * rho_lo
                            * decode_sinr(scn, ch, alloc, i, b, n, k_lo, k_lo)
                            - rho_hi * decode_sinr(scn, ch, alloc, i, b, n, k_hi, k_lo);
                        sic_sinr_order.push(PairResidual {
                            inp: i,
                            bs: b,
                            subcarrier: n,
                            user_hi: k_hi,
                            user_lo: k_lo,
                            value: sso,
                        });
                    }
                }
            }
        }
    }

    // Cross-InP exclusivity: largest pairwise sum of per-InP maxima, minus 1.
    let mut one_inp = vec![f64::NEG_INFINITY; scn.num_users];
    for k in 0..scn.num_users {
        let mut per_inp: Vec<f64> = Vec::with_capacity(scn.num_inps);
        for i in 0..scn.num_inps {
            let mut m: f64 = 0.0;
            for b in 0..scn.bs_per_inp {
                for n in 0..scn.subcarriers_per_inp {
                    m = m.max(alloc.rho[idx.of(i, b, n, k)]);
                }
            }
            per_inp.push(m);
        }
        per_inp.sort_by(|a, b| b.partial_cmp(a).unwrap());
        // Single InP: the cross-InP constraint is vacuous.
        one_inp[k] = if per_inp.len() >= 2 {
            per_inp[0] + per_inp[1] - 1.0
        } else {
            -1.0
        };
    }

    // NOMA multiplexing cap per (i, b, n).
    let mut noma_cap = vec![0.0; scn.num_inps * scn.bs_per_inp * scn.subcarriers_per_inp];
    for (i, b, n, k) in idx.iter() {
        noma_cap[idx.cell_of(i, b, n)] += alloc.rho[idx.of(i, b, n, k)];
    }
    for v in noma_cap.iter_mut() {
        *v -= scn.noma_cap as f64;
    }

    // x ≤ rho per entry.
    let x_rho_link: Vec<f64> = (0..idx.entries())
        .map(|e| alloc.x[e] - alloc.rho[e])
        .collect();

    // Viewpoint uniqueness per (i, n, k).
    let mut nos_unique = vec![0.0; scn.num_inps * scn.subcarriers_per_inp * scn.num_users];
    for (i, b, n, k) in idx.iter() {
        nos_unique[idx.user_sub_of(i, n, k)] += alloc.x[idx.of(i, b, n, k)];
    }
    for v in nos_unique.iter_mut() {
        *v -= 1.0;
    }

    let mut report = ConstraintReport {
        bs_power,
        mvno_power,
        min_rate,
        noma_power_order,
        sic_sinr_order,
        one_inp,
        noma_cap,
        x_rho_link,
        nos_unique,
        feasible: false,
        tolerance: tol,
    };
    report.feasible = report.max_residual() <= tol;
    report
}
