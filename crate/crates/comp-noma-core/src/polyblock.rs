//! Polyblock outer approximation over normal / co-normal sets, plus the
//! centralized solve pipeline built on it (monotone form → global search →
//! rounding → power repair).
//!
//! The solver maximizes an increasing objective over `NS ∩ CNS`. It keeps a
//! shrinking union of boxes (the polyblock) whose vertex set always encloses
//! the feasible region: each round the best vertex is projected onto the
//! upper boundary of the normal set along its ray from the origin, the
//! projection is tested against the co-normal set (and snapped to a
//! canonical feasible candidate when the problem supports it), and the
//! vertex is split into one child per coordinate. Vertices whose objective
//! cannot beat the incumbent by more than `eps`, and vertices whose lower
//! box misses the co-normal set, are pruned.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::SolverError;
use crate::math::F64Ext;
use crate::monotone::MonotoneProblem;
use crate::result::{OpCounters, SolveStatus, SolverResult, TraceEntry};
use crate::scenario::{ChannelState, NetworkScenario};
use crate::sinr::{check_feasibility, sum_rate, AllocationState, Mode};

/// Default bisection tolerance on the ray parameter.
pub const LAMBDA_TOL: f64 = 1e-4;

/// Cut coordinates below this fraction of their mask snap to zero during
/// vertex splitting.
const COORD_FLOOR_FRAC: f64 = 1e-9;

/// Problem surface the polyblock loop needs. Implemented by
/// [`MonotoneProblem`] and by toy problems in tests.
pub trait MonotoneOracle {
    fn dim(&self) -> usize;
    fn mask(&self) -> &[f64];
    fn ns_member(&self, z: &[f64]) -> bool;
    fn cns_member(&self, z: &[f64]) -> bool;
    /// Increasing objective.
    fn objective(&self, z: &[f64]) -> f64;
    /// Snap a normal-boundary point to a feasible candidate, if the problem
    /// knows how (slack recomputation). Must return a point in `NS ∩ CNS`.
    fn feasible_candidate(&self, _z: &[f64]) -> Option<Vec<f64>> {
        None
    }
    /// Rough multiply-accumulate cost of one membership evaluation, for the
    /// operational-complexity ledger.
    fn eval_cost(&self) -> u64 {
        1
    }
}

impl MonotoneOracle for MonotoneProblem {
    fn dim(&self) -> usize {
        MonotoneProblem::dim(self)
    }
    fn mask(&self) -> &[f64] {
        &self.mask
    }
    fn ns_member(&self, z: &[f64]) -> bool {
        MonotoneProblem::ns_member(self, z)
    }
    fn cns_member(&self, z: &[f64]) -> bool {
        MonotoneProblem::cns_member(self, z)
    }
    fn objective(&self, z: &[f64]) -> f64 {
        MonotoneProblem::objective(self, z)
    }
    fn feasible_candidate(&self, z: &[f64]) -> Option<Vec<f64>> {
        let c = self.canonical_point(z);
        if MonotoneProblem::ns_member(self, &c) && MonotoneProblem::cns_member(self, &c) {
            Some(c)
        } else {
            None
        }
    }
    fn eval_cost(&self) -> u64 {
        let scn = &self.scn;
        let e = scn.idx().entries() as u64;
        let k = scn.num_users as u64;
        let b = scn.bs_per_inp as u64;
        // Field sweep dominates: own signals plus the K×K interference inner
        // sums per viewpoint, plus the per-pair terms.
        e * b * (k + 2) + self.pairs.len() as u64 * (b + 4)
    }
}

/// Bisect along the ray `0 → vertex` for the last scaling still inside the
/// normal set. Returns `(lo, hi)` with `lo·vertex ∈ NS`, `hi·vertex ∉ NS`
/// and `hi − lo ≤ tol` (or `(1, 1)` when the vertex itself is in `NS`).
pub fn project_to_boundary<F: Fn(&[f64]) -> bool>(
    ns: F,
    vertex: &[f64],
    tol: f64,
) -> Result<(f64, f64), SolverError> {
    if ns(vertex) {
        return Ok((1.0, 1.0));
    }
    let origin = vec![0.0; vertex.len()];
    if !ns(&origin) {
        return Err(SolverError::Invariant(
            "origin must belong to the normal set".into(),
        ));
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut scaled = vec![0.0; vertex.len()];
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        for (s, v) in scaled.iter_mut().zip(vertex.iter()) {
            *s = mid * v;
        }
        if ns(&scaled) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Search parameters of the polyblock loop.
#[derive(Debug, Clone)]
pub struct PolyblockOptions {
    /// Certified-gap target.
    pub eps: f64,
    pub max_iter: usize,
    /// Live-vertex budget; exceeding it ends the run with the achieved gap.
    pub max_vertices: usize,
    pub lambda_tol: f64,
    /// Feasible warm-start point (validated before use).
    pub incumbent: Option<Vec<f64>>,
    /// Run the incumbent improver every this many iterations (0 = never).
    pub improve_every: usize,
}

impl Default for PolyblockOptions {
    fn default() -> Self {
        PolyblockOptions {
            eps: 1e-3,
            max_iter: 5000,
            max_vertices: 200_000,
            lambda_tol: LAMBDA_TOL,
            incumbent: None,
            improve_every: 500,
        }
    }
}

/// Outcome of the generic polyblock loop.
#[derive(Debug, Clone)]
pub struct PolyblockOutcome {
    pub best_point: Option<Vec<f64>>,
    pub best_value: f64,
    pub upper_bound: f64,
    pub iterations: usize,
    /// `(iteration, best_value, upper_bound)` per iteration.
    pub trace: Vec<(usize, f64, f64)>,
    pub status: SolveStatus,
    /// Membership/objective evaluations spent, as MAC-equivalents.
    pub central_ops: u64,
    /// Highest-value feasible candidates seen during the search, best first.
    pub candidate_pool: Vec<(f64, Vec<f64>)>,
}

impl PolyblockOutcome {
    pub fn gap(&self) -> f64 {
        (self.upper_bound - self.best_value).max(0.0)
    }
}

#[derive(Debug)]
struct HeapItem {
    objective: f64,
    id: usize,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.objective == other.objective && self.id == other.id
    }
}
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.objective
            .total_cmp(&other.objective)
            .then(self.id.cmp(&other.id).reverse())
    }
}

/// Maximize the oracle's objective over `NS ∩ CNS` with certified gap `eps`
/// when the budget allows.
pub fn polyblock_solve<O: MonotoneOracle>(
    oracle: &O,
    opts: &PolyblockOptions,
) -> Result<PolyblockOutcome, SolverError> {
    polyblock_solve_with(oracle, opts, None)
}

/// [`polyblock_solve`] with an optional incumbent improver, called on the
/// best point every [`PolyblockOptions::improve_every`] iterations. The
/// improver must return a point in `NS ∩ CNS`.
pub fn polyblock_solve_with<O: MonotoneOracle>(
    oracle: &O,
    opts: &PolyblockOptions,
    improver: Option<&dyn Fn(&[f64]) -> Vec<f64>>,
) -> Result<PolyblockOutcome, SolverError> {
    let mask = oracle.mask().to_vec();
    let unit_cost = oracle.eval_cost();
    let mut central_ops: u64 = 0;

    let mut arena: Vec<Option<Vec<f64>>> = Vec::new();
    let mut heap: BinaryHeap<HeapItem> = BinaryHeap::new();
    let mut live: usize = 0;

    let mut best_point: Option<Vec<f64>> = None;
    let mut best_value = f64::NEG_INFINITY;
    const POOL_CAP: usize = 12;
    let mut pool: Vec<(f64, Vec<f64>)> = Vec::new();
    let remember = |pool: &mut Vec<(f64, Vec<f64>)>, value: f64, point: &[f64]| {
        if pool.len() == POOL_CAP && value <= pool.last().unwrap().0 {
            return;
        }
        if pool.iter().any(|(v, _)| (*v - value).abs() <= 1e-9) {
            return;
        }
        pool.push((value, point.to_vec()));
        pool.sort_by(|a, b| b.0.total_cmp(&a.0));
        pool.truncate(POOL_CAP);
    };

    if let Some(start) = &opts.incumbent {
        central_ops += 2 * unit_cost;
        if oracle.ns_member(start) && oracle.cns_member(start) {
            best_value = oracle.objective(start);
            best_point = Some(start.clone());
            remember(&mut pool, best_value, start);
        }
    }

    central_ops += unit_cost;
    let top_obj = oracle.objective(&mask);
    arena.push(Some(mask.clone()));
    heap.push(HeapItem {
        objective: top_obj,
        id: 0,
    });
    live += 1;

    let mut trace = Vec::new();
    let mut iterations = 0usize;
    let mut upper_bound = top_obj;
    let status;

    loop {
        // Pop the best live vertex; prune lazily.
        let top = loop {
            match heap.pop() {
                None => break None,
                Some(item) => {
                    if let Some(z) = arena[item.id].take() {
                        live -= 1;
                        break Some((item.objective, z));
                    }
                }
            }
        };
        let (obj_top, z) = match top {
            None => {
                // Search space exhausted: the incumbent is optimal.
                if best_point.is_some() {
                    upper_bound = best_value;
                    status = SolveStatus::Converged;
                } else {
                    status = SolveStatus::InfeasibleOrUndetected;
                }
                break;
            }
            Some(t) => t,
        };
        upper_bound = obj_top.max(if best_point.is_some() {
            best_value
        } else {
            f64::NEG_INFINITY
        });

        if best_point.is_some() && upper_bound - best_value <= opts.eps {
            status = SolveStatus::Converged;
            break;
        }
        if iterations >= opts.max_iter || live > opts.max_vertices {
            status = if best_point.is_some() {
                SolveStatus::MaxIterations
            } else {
                SolveStatus::InfeasibleOrUndetected
            };
            break;
        }
        iterations += 1;

        if let Some(imp) = improver {
            if opts.improve_every > 0 && iterations.is_multiple_of(opts.improve_every) {
                if let Some(bp) = &best_point {
                    let cand = imp(bp);
                    let v = oracle.objective(&cand);
                    if v > best_value {
                        best_value = v;
                        best_point = Some(cand);
                    }
                }
            }
        }

        let (lo, hi) = project_to_boundary(|p| oracle.ns_member(p), &z, opts.lambda_tol)?;
        central_ops += unit_cost * 20;

        if hi >= 1.0 {
            // The vertex itself is normal: its box needs no further split.
            central_ops += unit_cost;
            if oracle.cns_member(&z) {
                let v = oracle.objective(&z);
                remember(&mut pool, v, &z);
                if v > best_value {
                    best_value = v;
                    best_point = Some(z.clone());
                }
            }
            trace.push((iterations, best_value, upper_bound));
            continue;
        }

        // Feasible-side candidate and canonical repair.
        let x_feas: Vec<f64> = z.iter().map(|v| lo * v).collect();
        central_ops += 2 * unit_cost;
        if oracle.cns_member(&x_feas) {
            let v = oracle.objective(&x_feas);
            remember(&mut pool, v, &x_feas);
            if v > best_value {
                best_value = v;
                best_point = Some(x_feas.clone());
            }
        }
        if let Some(c) = oracle.feasible_candidate(&x_feas) {
            let v = oracle.objective(&c);
            remember(&mut pool, v, &c);
            if v > best_value {
                best_value = v;
                best_point = Some(c);
            }
        }

        // Split just outside the boundary so no feasible point is cut. Cut
        // coordinates below the floor snap to zero: without this, argmax
        // selection can shave vanishing slices off a near-zero coordinate
        // forever while the bound stalls on an infeasible face. The snap
        // loses only points whose coordinate is below the floor, a region
        // whose objective contribution is far below `eps`.
        for idim in 0..z.len() {
            let zi = z[idim];
            if zi <= 0.0 {
                continue;
            }
            let mut cut = hi * zi;
            if cut < COORD_FLOOR_FRAC * mask[idim] {
                cut = 0.0;
            }
            if zi - cut <= 1e-15 * mask[idim].max(1.0) {
                continue;
            }
            let mut child = z.clone();
            child[idim] = cut;
            central_ops += 2 * unit_cost;
            if !oracle.cns_member(&child) {
                continue;
            }
            let cobj = oracle.objective(&child);
            if best_point.is_some() && cobj <= best_value + opts.eps {
                continue;
            }
            arena.push(Some(child));
            heap.push(HeapItem {
                objective: cobj,
                id: arena.len() - 1,
            });
            live += 1;
        }
        trace.push((iterations, best_value, upper_bound));
    }

    Ok(PolyblockOutcome {
        best_value,
        best_point,
        upper_bound: upper_bound.max(best_value),
        iterations,
        trace,
        status,
        central_ops,
        candidate_pool: pool,
    })
}

// ---------------------------------------------------------------------------
// Rounding and repair
// ---------------------------------------------------------------------------

/// Round a relaxed allocation to a binary one: largest-value-first greedy on
/// `ρ` honoring the one-InP rule and the per-cell NOMA cap, then on `x`
/// honoring the `x ≤ ρ` link and viewpoint uniqueness. Beams of deselected
/// entries are zeroed; power and rate residuals are reported downstream, not
/// repaired here.
pub fn round_and_repair(
    scn: &NetworkScenario,
    _ch: &ChannelState,
    relaxed: &AllocationState,
) -> AllocationState {
    let idx = scn.idx();
    let entries = idx.entries();
    let mut out = AllocationState::zeros(scn, Mode::Binary);
    out.w = relaxed.w.clone();

    let mut order: Vec<usize> = (0..entries).filter(|&e| relaxed.rho[e] > 0.0).collect();
    order.sort_by(|&a, &b| {
        relaxed.rho[b]
            .partial_cmp(&relaxed.rho[a])
            .unwrap()
            .then(a.cmp(&b))
    });

    let mut inp_of_user: Vec<Option<usize>> = vec![None; scn.num_users];
    let mut cell_load = vec![0usize; scn.num_inps * scn.bs_per_inp * scn.subcarriers_per_inp];
    for e in order {
        let (i, b, n, k) = idx.split(e);
        if let Some(i0) = inp_of_user[k] {
            if i0 != i {
                continue;
            }
        }
        if cell_load[idx.cell_of(i, b, n)] >= scn.noma_cap {
            continue;
        }
        out.rho[e] = 1.0;
        inp_of_user[k] = Some(i);
        cell_load[idx.cell_of(i, b, n)] += 1;
    }

    let mut xorder: Vec<usize> = (0..entries).filter(|&e| relaxed.x[e] > 0.0).collect();
    xorder.sort_by(|&a, &b| {
        relaxed.x[b]
            .partial_cmp(&relaxed.x[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut viewpoint_taken = vec![false; scn.num_inps * scn.subcarriers_per_inp * scn.num_users];
    for e in xorder {
        let (i, _b, n, k) = idx.split(e);
        if out.rho[e] != 1.0 {
            continue;
        }
        if viewpoint_taken[idx.user_sub_of(i, n, k)] {
            continue;
        }
        out.x[e] = 1.0;
        viewpoint_taken[idx.user_sub_of(i, n, k)] = true;
    }

    // Deselected entries transmit nothing.
    let zero = vec![num_complex::Complex64::new(0.0, 0.0); scn.antennas];
    for e in 0..entries {
        if out.rho[e] == 0.0 {
            let (i, b, n, k) = idx.split(e);
            out.set_beam(scn, i, b, n, k, &zero);
        }
    }
    out
}

/// Scale beams down so every BS and MVNO power budget holds exactly (within
/// float rounding). Scaling never breaks the combinatorial constraints.
pub fn scale_to_power_budgets(scn: &NetworkScenario, alloc: &mut AllocationState) {
    let idx = scn.idx();
    let mut bs_used = vec![0.0f64; scn.num_inps * scn.bs_per_inp];
    let mut mvno_used = vec![0.0f64; scn.num_mvnos];
    for (i, b, n, k) in idx.iter() {
        let e = idx.of(i, b, n, k);
        if alloc.rho[e] > 0.0 {
            let p = alloc.rho[e] * alloc.beam_power(scn, i, b, n, k);
            bs_used[idx.bs_of(i, b)] += p;
            mvno_used[scn.mvno_of_user[k]] += p;
        }
    }
    let bs_scale: Vec<f64> = bs_used
        .iter()
        .enumerate()
        .map(|(j, &u)| {
            if u > scn.p_max_bs[j] {
                scn.p_max_bs[j] / u
            } else {
                1.0
            }
        })
        .collect();
    let mvno_scale: Vec<f64> = mvno_used
        .iter()
        .enumerate()
        .map(|(v, &u)| {
            if u > scn.p_max_mvno[v] {
                scn.p_max_mvno[v] / u
            } else {
                1.0
            }
        })
        .collect();
    for (i, b, n, k) in idx.iter() {
        let e = idx.of(i, b, n, k);
        let s = bs_scale[idx.bs_of(i, b)].min(mvno_scale[scn.mvno_of_user[k]]);
        if s < 1.0 && alloc.rho[e] > 0.0 {
            let amp = s.sqrt_();
            let start = idx.vec_of(i, b, n, k);
            for m in 0..scn.antennas {
                alloc.w[start + m] *= amp;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Centralized pipeline
// ---------------------------------------------------------------------------

/// Options of the centralized solve.
#[derive(Debug, Clone)]
pub struct CentralizedOptions {
    pub polyblock: PolyblockOptions,
    /// Warm-start allocation used as the initial incumbent. Its beams are
    /// mapped onto the monotone space by power, which is exact for
    /// single-antenna scenarios.
    pub incumbent: Option<AllocationState>,
    /// Coordinate-improvement passes on the best point found.
    pub polish_passes: usize,
    pub feasibility_tol: f64,
}

impl Default for CentralizedOptions {
    fn default() -> Self {
        CentralizedOptions {
            polyblock: PolyblockOptions::default(),
            incumbent: None,
            polish_passes: 2,
            feasibility_tol: 1e-6,
        }
    }
}

/// Coordinate-improvement passes over a canonical monotone point: per-entry
/// power levels, scheduling/viewpoint flips, in-cell user swaps and a global
/// power fill, keeping only feasible improvements of the true rate.
pub fn polish_point(problem: &MonotoneProblem, z: &[f64], passes: usize) -> Vec<f64> {
    let l = problem.layout;
    let idx = problem.scn.idx();
    let scn = &problem.scn;
    let mut best = problem.canonical_point(z);
    let mut best_rate = problem.true_rate_of(&best);
    let accept = |cand: &[f64], best_rate: f64| -> Option<(Vec<f64>, f64)> {
        let c = problem.canonical_point(cand);
        if !problem.ns_member(&c) || !problem.cns_member(&c) {
            return None;
        }
        let r = problem.true_rate_of(&c);
        if r > best_rate + 1e-12 {
            Some((c, r))
        } else {
            None
        }
    };
    let power_levels: Vec<f64> = (0..=16).map(|l| l as f64 / 16.0).collect();
    for _ in 0..passes {
        let mut improved = false;
        for e in 0..l.entries {
            for (rho_v, x_v) in [(1.0, 1.0), (1.0, 0.0), (0.0, 0.0)] {
                if best[l.off_rho + e] == rho_v && best[l.off_x + e] == x_v {
                    continue;
                }
                let mut cand = best.clone();
                cand[l.off_rho + e] = rho_v;
                cand[l.off_x + e] = x_v;
                if cand[l.off_p + e] == 0.0 && rho_v == 1.0 {
                    cand[l.off_p + e] = 0.25 * problem.mask[l.off_p + e];
                }
                if let Some((c, r)) = accept(&cand, best_rate) {
                    best = c;
                    best_rate = r;
                    improved = true;
                }
            }
            let pmask = problem.mask[l.off_p + e];
            for frac in &power_levels {
                let cand_p = frac * pmask;
                if (cand_p - best[l.off_p + e]).abs() <= 1e-15 * pmask.max(1.0) {
                    continue;
                }
                let mut cand = best.clone();
                cand[l.off_p + e] = cand_p;
                if let Some((c, r)) = accept(&cand, best_rate) {
                    best = c;
                    best_rate = r;
                    improved = true;
                }
            }
        }
        // Power transfers between entries of one BS: budget-neutral
        // two-coordinate moves. Single moves stall on a saturated budget.
        for i in 0..scn.num_inps {
            for b in 0..scn.bs_per_inp {
                let bs_entries: Vec<usize> = (0..scn.subcarriers_per_inp)
                    .flat_map(|n| (0..scn.num_users).map(move |k| (n, k)))
                    .map(|(n, k)| idx.of(i, b, n, k))
                    .collect();
                for &src in &bs_entries {
                    let p_src = best[l.off_p + src];
                    if p_src <= 0.0 {
                        continue;
                    }
                    for &dst in &bs_entries {
                        if dst == src || best[l.off_rho + dst] == 0.0 {
                            continue;
                        }
                        for frac in [0.25, 0.5, 1.0] {
                            let moved = frac * p_src;
                            let capacity = problem.mask[l.off_p + dst] - best[l.off_p + dst];
                            let moved = moved.min(capacity.max(0.0));
                            if moved <= 1e-12 {
                                continue;
                            }
                            let mut cand = best.clone();
                            cand[l.off_p + src] -= moved;
                            cand[l.off_p + dst] += moved;
                            if let Some((c, r)) = accept(&cand, best_rate) {
                                best = c;
                                best_rate = r;
                                improved = true;
                            }
                        }
                    }
                }
            }
        }
        // Activate an idle entry at a meaningful power level, funded by
        // scaling every other beam of the same BS down to fit the budget.
        for e in 0..l.entries {
            if best[l.off_rho + e] == 1.0 {
                continue;
            }
            let (i, b, _n, _k) = idx.split(e);
            let budget = scn.p_max_of_bs(i, b);
            for frac in [0.25, 0.5] {
                let p_new = frac * problem.mask[l.off_p + e];
                if p_new <= 0.0 || p_new >= budget {
                    continue;
                }
                let mut cand = best.clone();
                cand[l.off_rho + e] = 1.0;
                cand[l.off_x + e] = 1.0;
                cand[l.off_p + e] = p_new;
                let mut used = 0.0;
                for n2 in 0..scn.subcarriers_per_inp {
                    for k2 in 0..scn.num_users {
                        let e2 = idx.of(i, b, n2, k2);
                        if e2 != e {
                            used += cand[l.off_rho + e2] * cand[l.off_p + e2];
                        }
                    }
                }
                if used > budget - p_new {
                    let shrink = (budget - p_new) / used;
                    for n2 in 0..scn.subcarriers_per_inp {
                        for k2 in 0..scn.num_users {
                            let e2 = idx.of(i, b, n2, k2);
                            if e2 != e {
                                cand[l.off_p + e2] *= shrink;
                            }
                        }
                    }
                }
                if let Some((c, r)) = accept(&cand, best_rate) {
                    best = c;
                    best_rate = r;
                    improved = true;
                }
            }
        }
        // Swap a scheduled user against an unscheduled one in the same cell,
        // carrying power and viewpoint along. Single flips cannot cross full
        // cells; swaps can.
        for i in 0..scn.num_inps {
            for b in 0..scn.bs_per_inp {
                for n in 0..scn.subcarriers_per_inp {
                    for k_on in 0..scn.num_users {
                        let e_on = idx.of(i, b, n, k_on);
                        if best[l.off_rho + e_on] != 1.0 {
                            continue;
                        }
                        for k_off in 0..scn.num_users {
                            if k_off == k_on {
                                continue;
                            }
                            let e_off = idx.of(i, b, n, k_off);
                            if best[l.off_rho + e_off] != 0.0 {
                                continue;
                            }
                            let mut cand = best.clone();
                            cand[l.off_rho + e_on] = 0.0;
                            cand[l.off_x + e_on] = 0.0;
                            cand[l.off_rho + e_off] = 1.0;
                            cand[l.off_x + e_off] = best[l.off_x + e_on];
                            cand[l.off_p + e_off] =
                                best[l.off_p + e_on].min(problem.mask[l.off_p + e_off]);
                            cand[l.off_p + e_on] = 0.0;
                            if let Some((c, r)) = accept(&cand, best_rate) {
                                best = c;
                                best_rate = r;
                                improved = true;
                            }
                        }
                    }
                }
            }
        }
        for s in [1.25, 1.5, 2.0] {
            let mut cand = best.clone();
            for e in 0..l.entries {
                cand[l.off_p + e] = (s * cand[l.off_p + e]).min(problem.mask[l.off_p + e]);
            }
            if let Some((c, r)) = accept(&cand, best_rate) {
                best = c;
                best_rate = r;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    best
}

/// Re-optimize one `(inp, subcarrier)` block at a time: enumerate schedule
/// patterns (up to the NOMA cap, over the strongest candidate users per BS)
/// and power splits of the block's current per-BS budget share, score them
/// locally, and adopt the best candidate that passes the full membership
/// check. Blocks couple only through power budgets, so the local score is
/// the true block objective.
pub fn reoptimize_blocks(problem: &MonotoneProblem, z: &[f64]) -> Vec<f64> {
    let scn = problem.scn.clone();
    let idx = scn.idx();
    let l = problem.layout;
    let mut best = problem.canonical_point(z);
    let mut best_rate = problem.true_rate_of(&best);

    // Per-BS candidate user subsets of size ≤ min(noma_cap, 2), strongest
    // channels first.
    let subset_cap = scn.noma_cap.min(2);
    let top_m = 5usize.min(scn.num_users);

    for pass in 0..2 {
        let mut improved = false;
        for i in 0..scn.num_inps {
            for n in 0..scn.subcarriers_per_inp {
                // InP lock: users active on another InP cannot join.
                let eligible: Vec<usize> = (0..scn.num_users)
                    .filter(|&k| {
                        (0..scn.num_inps).all(|j| {
                            j == i
                                || (0..scn.bs_per_inp).all(|b| {
                                    (0..scn.subcarriers_per_inp)
                                        .all(|n2| best[l.off_rho + idx.of(j, b, n2, k)] == 0.0)
                                })
                        })
                    })
                    .collect();
                if eligible.is_empty() {
                    continue;
                }
                // Current per-BS budget share of this block.
                let mut share = vec![0.0f64; scn.bs_per_inp];
                for b in 0..scn.bs_per_inp {
                    let mut used_elsewhere = 0.0;
                    for n2 in 0..scn.subcarriers_per_inp {
                        for k in 0..scn.num_users {
                            let e = idx.of(i, b, n2, k);
                            if n2 != n {
                                used_elsewhere += best[l.off_rho + e] * best[l.off_p + e];
                            }
                        }
                    }
                    share[b] = (scn.p_max_of_bs(i, b) - used_elsewhere).max(0.0);
                }
                // Candidate subsets per BS.
                let mut per_bs_subsets: Vec<Vec<Vec<usize>>> = Vec::new();
                for b in 0..scn.bs_per_inp {
                    let mut ranked = eligible.clone();
                    ranked.sort_by(|&a, &c| {
                        let ga = problem.own_gain_of(idx.of(i, b, n, a));
                        let gc = problem.own_gain_of(idx.of(i, b, n, c));
                        gc.partial_cmp(&ga).unwrap()
                    });
                    ranked.truncate(top_m);
                    let mut subsets: Vec<Vec<usize>> = vec![Vec::new()];
                    for (j, &k) in ranked.iter().enumerate() {
                        subsets.push(vec![k]);
                        if subset_cap >= 2 {
                            for &k2 in ranked.iter().skip(j + 1) {
                                subsets.push(vec![k, k2]);
                            }
                        }
                    }
                    per_bs_subsets.push(subsets);
                }
                // Enumerate patterns (mixed radix over per-BS subsets) for a
                // few share scalings; scales above 1 are funded by shrinking
                // the BS's other blocks proportionally.
                // Share options: the block's current share plus absolute
                // fractions of each budget (funded below by shrinking the
                // BS's other blocks).
                for share_frac in [-1.0f64, 0.25, 0.5, 1.0] {
                    let share_s: Vec<f64> = (0..scn.bs_per_inp)
                        .map(|b| {
                            if share_frac < 0.0 {
                                share[b]
                            } else {
                                share_frac * scn.p_max_of_bs(i, b)
                            }
                        })
                        .collect();
                    if share_frac > 0.0 && share_s == share {
                        continue;
                    }
                    let mut counters = vec![0usize; scn.bs_per_inp];
                    let mut block_best: Option<(
                        f64,
                        Vec<(usize, usize, f64)>,
                        Vec<(usize, usize)>,
                    )> = None;
                    let mut patterns = 0usize;
                    'patterns: loop {
                        patterns += 1;
                        if patterns > 4000 {
                            break;
                        }
                        let schedule: Vec<&Vec<usize>> = (0..scn.bs_per_inp)
                            .map(|b| &per_bs_subsets[b][counters[b]])
                            .collect();
                        let beams: Vec<(usize, usize)> = (0..scn.bs_per_inp)
                            .flat_map(|b| schedule[b].iter().map(move |&k| (b, k)))
                            .collect();
                        if !beams.is_empty() {
                            let splits = power_splits(&beams, &share_s, scn.bs_per_inp);
                            for powers in splits {
                                let active: Vec<(usize, usize, f64)> = beams
                                    .iter()
                                    .zip(powers.iter())
                                    .map(|(&(b, k), &p)| (b, k, p))
                                    .collect();
                                if let Some((score, viewpoints)) =
                                    problem.score_block(i, n, &active)
                                {
                                    if block_best.as_ref().is_none_or(|(s, _, _)| score > *s) {
                                        block_best = Some((score, active.clone(), viewpoints));
                                    }
                                }
                            }
                        }
                        let mut b = 0;
                        loop {
                            if b == scn.bs_per_inp {
                                break 'patterns;
                            }
                            counters[b] += 1;
                            if counters[b] < per_bs_subsets[b].len() {
                                break;
                            }
                            counters[b] = 0;
                            b += 1;
                        }
                    }
                    if let Some((_, active, viewpoints)) = block_best {
                        let mut cand = best.clone();
                        for k in 0..scn.num_users {
                            for b in 0..scn.bs_per_inp {
                                let e = idx.of(i, b, n, k);
                                cand[l.off_p + e] = 0.0;
                                cand[l.off_rho + e] = 0.0;
                                cand[l.off_x + e] = 0.0;
                            }
                        }
                        let mut block_used = vec![0.0f64; scn.bs_per_inp];
                        for &(b, k, p) in &active {
                            let e = idx.of(i, b, n, k);
                            cand[l.off_rho + e] = 1.0;
                            cand[l.off_p + e] = p.min(problem.mask[l.off_p + e]);
                            block_used[b] += cand[l.off_p + e];
                        }
                        for &(k, b) in &viewpoints {
                            cand[l.off_x + idx.of(i, b, n, k)] = 1.0;
                        }
                        // Fund any per-BS overflow from the other blocks.
                        for b in 0..scn.bs_per_inp {
                            let mut elsewhere = 0.0;
                            for n2 in 0..scn.subcarriers_per_inp {
                                if n2 == n {
                                    continue;
                                }
                                for k in 0..scn.num_users {
                                    let e = idx.of(i, b, n2, k);
                                    elsewhere += cand[l.off_rho + e] * cand[l.off_p + e];
                                }
                            }
                            let room = scn.p_max_of_bs(i, b) - block_used[b];
                            if elsewhere > room && elsewhere > 0.0 {
                                let shrink = room.max(0.0) / elsewhere;
                                for n2 in 0..scn.subcarriers_per_inp {
                                    if n2 == n {
                                        continue;
                                    }
                                    for k in 0..scn.num_users {
                                        cand[l.off_p + idx.of(i, b, n2, k)] *= shrink;
                                    }
                                }
                            }
                        }
                        let c = problem.canonical_point(&cand);
                        if problem.ns_member(&c) && problem.cns_member(&c) {
                            let r = problem.true_rate_of(&c);
                            if r > best_rate + 1e-12 {
                                best = c;
                                best_rate = r;
                                improved = true;
                            }
                        }
                    }
                }
            }
        }
        if pass > 0 && !improved {
            break;
        }
    }
    best
}

/// Candidate power splits of per-BS shares over the active beams: a grid
/// when the block is small, equal and gain-agnostic proportional splits
/// otherwise.
fn power_splits(beams: &[(usize, usize)], share: &[f64], num_bs: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    if beams.len() <= 4 && num_bs <= 2 {
        let levels = [0.0, 0.0625, 0.25, 0.5, 0.75, 1.0];
        let mut counters = vec![0usize; beams.len()];
        loop {
            let mut per_bs = vec![0.0f64; num_bs];
            let mut powers = Vec::with_capacity(beams.len());
            for (j, &(b, _)) in beams.iter().enumerate() {
                let p = levels[counters[j]] * share[b];
                per_bs[b] += p;
                powers.push(p);
            }
            if (0..num_bs).all(|b| per_bs[b] <= share[b] * (1.0 + 1e-12)) {
                out.push(powers);
            }
            let mut j = 0;
            loop {
                if j == beams.len() {
                    return out;
                }
                counters[j] += 1;
                if counters[j] < levels.len() {
                    break;
                }
                counters[j] = 0;
                j += 1;
            }
        }
    }
    // Equal split per BS.
    let mut counts = vec![0usize; num_bs];
    for &(b, _) in beams {
        counts[b] += 1;
    }
    out.push(
        beams
            .iter()
            .map(|&(b, _)| share[b] / counts[b] as f64)
            .collect(),
    );
    // All power to the first beam of each BS.
    let mut first = vec![true; num_bs];
    out.push(
        beams
            .iter()
            .map(|&(b, _)| {
                if first[b] {
                    first[b] = false;
                    share[b]
                } else {
                    0.0
                }
            })
            .collect(),
    );
    out
}

/// Global solve of the relaxed problem via the monotone form, followed by
/// rounding and power repair of the returned allocation.
pub fn centralized_solve(
    scn: &NetworkScenario,
    ch: &ChannelState,
    opts: &CentralizedOptions,
) -> Result<SolverResult, SolverError> {
    let problem = crate::monotone::build_monotone_form(scn, ch);
    let mut pb_opts = opts.polyblock.clone();
    if let Some(inc) = &opts.incumbent {
        let z = problem.point_from_allocation(inc);
        if problem.ns_member(&z) && problem.cns_member(&z) {
            pb_opts.incumbent = Some(polish_point(&problem, &z, opts.polish_passes));
        }
    }
    let improver = |p: &[f64]| polish_point(&problem, p, 1);
    let outcome = polyblock_solve_with(&problem, &pb_opts, Some(&improver))?;

    // Multi-start final polish over the candidate pool: local search is
    // basin-dependent, so the raw runner-up candidates are worth polishing
    // too.
    let mut best_point: Option<Vec<f64>> = outcome.best_point.clone();
    let mut best_rate = best_point
        .as_ref()
        .map(|p| problem.true_rate_of(p))
        .unwrap_or(f64::NEG_INFINITY);
    for (_, cand) in &outcome.candidate_pool {
        let polished = polish_point(&problem, cand, opts.polish_passes);
        let r = problem.true_rate_of(&polished);
        if r > best_rate {
            best_rate = r;
            best_point = Some(polished);
        }
    }
    // Alternate block re-optimization and coordinate polish until neither
    // improves. Only membership-verified points may carry the objective.
    if let Some(bp) = &best_point {
        let mut current = bp.clone();
        for _ in 0..4 {
            let blocked = reoptimize_blocks(&problem, &current);
            let repolished = polish_point(&problem, &blocked, 1);
            let r = problem.true_rate_of(&repolished);
            if r > best_rate + 1e-9
                && problem.ns_member(&repolished)
                && problem.cns_member(&repolished)
            {
                best_rate = r;
                current = repolished;
            } else {
                break;
            }
        }
        if problem.ns_member(&current) && problem.cns_member(&current) {
            best_point = Some(current);
        } else {
            best_rate = best_point
                .as_ref()
                .map(|p| problem.true_rate_of(p))
                .unwrap_or(f64::NEG_INFINITY);
        }
    }
    let objective = if best_rate.is_finite() { best_rate } else { 0.0 };

    let relaxed_alloc = match &best_point {
        Some(p) => problem.allocation_from_point(ch, p),
        None => AllocationState::zeros(scn, Mode::Relaxed),
    };
    let mut binary = round_and_repair(scn, ch, &relaxed_alloc);
    scale_to_power_budgets(scn, &mut binary);
    let binary_objective = sum_rate(scn, ch, &binary);
    let report = check_feasibility(scn, ch, &binary, opts.feasibility_tol);

    let trace: Vec<TraceEntry> = outcome
        .trace
        .iter()
        .map(|&(it, best, bound)| TraceEntry {
            iteration: it,
            objective: if best.is_finite() {
                best - problem.qminus_mask
            } else {
                best
            },
            bound: bound - problem.qminus_mask,
            inner_beam: 0,
            inner_assign: 0,
            multiplier_norm: 0.0,
        })
        .collect();

    Ok(SolverResult {
        objective: objective.max(binary_objective),
        binary_objective,
        gap: Some(outcome.gap()),
        status: outcome.status,
        outer_iterations: outcome.iterations,
        inner_iterations: outcome.iterations,
        allocation: binary,
        report,
        trace,
        messages: Vec::new(),
        ops: OpCounters {
            per_bs_total: 0,
            central_total: outcome.central_ops,
        },
    })
}
