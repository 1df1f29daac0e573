//! The generic polyblock loop on hand-built problems, the boundary
//! projection contract, and the rounding pass.

use comp_noma_core::polyblock::{
    polyblock_solve, project_to_boundary, round_and_repair, MonotoneOracle, PolyblockOptions,
};
use comp_noma_core::result::SolveStatus;
use comp_noma_core::scenario::{generate_channels, generate_scenario, ScenarioConfig};
use comp_noma_core::sinr::{check_feasibility, AllocationState, Mode};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Box problem with a predicate-defined normal set and trivial co-normal
/// set; the objective is the coordinate sum.
struct ToyProblem {
    mask: Vec<f64>,
    /// Sum of coordinates must stay at or below this (normal side).
    budget: f64,
}

impl MonotoneOracle for ToyProblem {
    fn dim(&self) -> usize {
        self.mask.len()
    }
    fn mask(&self) -> &[f64] {
        &self.mask
    }
    fn ns_member(&self, z: &[f64]) -> bool {
        z.iter().zip(self.mask.iter()).all(|(v, m)| *v <= m + 1e-12)
            && z.iter().sum::<f64>() <= self.budget + 1e-12
    }
    fn cns_member(&self, z: &[f64]) -> bool {
        z.iter().all(|v| *v >= -1e-12)
    }
    fn objective(&self, z: &[f64]) -> f64 {
        z.iter().sum()
    }
}

#[test]
fn unconstrained_box_is_solved_in_one_iteration() {
    let problem = ToyProblem {
        mask: vec![1.0, 2.0, 3.0],
        budget: 100.0, // never binds inside the box
    };
    let outcome = polyblock_solve(&problem, &PolyblockOptions::default()).unwrap();
    assert_eq!(outcome.status, SolveStatus::Converged);
    assert_eq!(outcome.iterations, 1);
    assert!((outcome.best_value - 6.0).abs() < 1e-9);
}

#[test]
fn two_dim_simplex_converges_with_certificate() {
    // max Σz over {z ≤ (1,1), Σz ≤ 1.2}: optimum 1.2.
    let problem = ToyProblem {
        mask: vec![1.0, 1.0],
        budget: 1.2,
    };
    let opts = PolyblockOptions {
        eps: 1e-3,
        max_iter: 50_000,
        ..PolyblockOptions::default()
    };
    let outcome = polyblock_solve(&problem, &opts).unwrap();
    assert_eq!(outcome.status, SolveStatus::Converged);
    assert!(
        (outcome.best_value - 1.2).abs() <= 1e-3,
        "best {}",
        outcome.best_value
    );
    assert!(outcome.gap() <= 1e-3 + 1e-12);
    // Reported best points always sit in both sets.
    let best = outcome.best_point.unwrap();
    assert!(problem.ns_member(&best) && problem.cns_member(&best));
}

#[test]
fn three_dim_simplex_value_is_exact_even_before_certification() {
    // max Σz over {z ≤ mask, Σz ≤ 1.5}: optimum 1.5. Bound closure is slow
    // on this symmetric instance, but the feasible value locks in from the
    // first boundary projection and the achieved gap is reported honestly.
    let problem = ToyProblem {
        mask: vec![1.0, 1.0, 1.0],
        budget: 1.5,
    };
    let opts = PolyblockOptions {
        eps: 1e-4,
        max_iter: 20_000,
        ..PolyblockOptions::default()
    };
    let outcome = polyblock_solve(&problem, &opts).unwrap();
    assert!(
        (outcome.best_value - 1.5).abs() <= 2e-4,
        "best {}",
        outcome.best_value
    );
    assert!(outcome.upper_bound >= 1.5 - 1e-9, "bound must stay valid");
    assert!(outcome.gap() <= 0.5, "gap should have shrunk from the initial 1.5");
    // best nondecreasing, bound nonincreasing along the trace.
    for w in outcome.trace.windows(2) {
        assert!(w[1].1 >= w[0].1 - 1e-12);
        assert!(w[1].2 <= w[0].2 + 1e-12);
    }
}

#[test]
fn huge_eps_stops_after_first_feasible_evaluation() {
    let problem = ToyProblem {
        mask: vec![1.0; 4],
        budget: 2.0,
    };
    let opts = PolyblockOptions {
        eps: 1e9,
        ..PolyblockOptions::default()
    };
    let outcome = polyblock_solve(&problem, &opts).unwrap();
    assert_eq!(outcome.status, SolveStatus::Converged);
    assert_eq!(outcome.iterations, 1);
    assert!(outcome.best_point.is_some());
}

#[test]
fn projection_contract() {
    // Vertex already normal → λ = 1.
    let inside = |z: &[f64]| z.iter().all(|v| *v <= 0.5 + 1e-15);
    let (lo, hi) = project_to_boundary(inside, &[0.4, 0.3], 1e-4).unwrap();
    assert_eq!((lo, hi), (1.0, 1.0));

    // Half-mask ∞-norm ball: the ray from 0 to the mask corner leaves at 0.5.
    let mask = [2.0, 2.0, 2.0];
    let ns = |z: &[f64]| z.iter().zip(mask.iter()).all(|(v, m)| *v <= 0.5 * m + 1e-15);
    let (lo, hi) = project_to_boundary(ns, &mask, 1e-4).unwrap();
    assert!(lo <= 0.5 && 0.5 <= hi, "({lo}, {hi})");
    assert!(hi - lo <= 1e-4);

    // Halving the tolerance moves the answer by at most the previous one.
    let (lo2, hi2) = project_to_boundary(ns, &mask, 5e-5).unwrap();
    assert!(hi2 - lo2 <= 5e-5);
    assert!((lo2 - lo).abs() <= 1e-4);

    // Empty normal set at the origin is an invariant error.
    let never = |_: &[f64]| false;
    assert!(project_to_boundary(never, &[1.0], 1e-4).is_err());
}

// ---------------------------------------------------------------------------
// round_and_repair
// ---------------------------------------------------------------------------

fn desk(seed: u64) -> (comp_noma_core::NetworkScenario, comp_noma_core::ChannelState) {
    let cfg = ScenarioConfig {
        inps: 2,
        mvnos: 2,
        bs_per_inp: 2,
        subcarriers: 3,
        users: 5,
        users_per_mvno: vec![3, 2],
        antennas: 2,
        noma_cap: 2,
        ..ScenarioConfig::reference()
    };
    let scn = generate_scenario(&cfg, seed).unwrap();
    let ch = generate_channels(&scn, seed);
    (scn, ch)
}

#[test]
fn rounding_is_idempotent_on_binary_input() {
    let (scn, ch) = desk(1);
    let idx = scn.idx();
    let mut alloc = AllocationState::zeros(&scn, Mode::Binary);
    // A feasible binary pattern: user k on InP k%2, BS 0, subcarrier k%3.
    for k in 0..scn.num_users {
        let e = idx.of(k % 2, 0, k % 3, k);
        alloc.rho[e] = 1.0;
        alloc.x[e] = 1.0;
    }
    let rounded = round_and_repair(&scn, &ch, &alloc);
    assert_eq!(rounded.rho, alloc.rho);
    assert_eq!(rounded.x, alloc.x);
}

#[test]
fn rounding_prefers_larger_values_under_the_cap() {
    let cfg = ScenarioConfig {
        inps: 1,
        mvnos: 1,
        bs_per_inp: 1,
        subcarriers: 1,
        users: 2,
        users_per_mvno: vec![2],
        r_min_bps_hz: vec![0.0],
        noma_cap: 1,
        antennas: 1,
        ..ScenarioConfig::reference()
    };
    let scn = generate_scenario(&cfg, 2).unwrap();
    let ch = generate_channels(&scn, 2);
    let idx = scn.idx();
    let mut relaxed = AllocationState::zeros(&scn, Mode::Relaxed);
    relaxed.rho[idx.of(0, 0, 0, 0)] = 0.9;
    relaxed.rho[idx.of(0, 0, 0, 1)] = 0.8;
    let rounded = round_and_repair(&scn, &ch, &relaxed);
    assert_eq!(rounded.rho[idx.of(0, 0, 0, 0)], 1.0);
    assert_eq!(rounded.rho[idx.of(0, 0, 0, 1)], 0.0);
}

#[test]
fn rounded_allocations_satisfy_combinatorial_constraints() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for seed in 0..20u64 {
        let (scn, ch) = desk(seed + 10);
        let idx = scn.idx();
        let mut relaxed = AllocationState::zeros(&scn, Mode::Relaxed);
        for e in 0..idx.entries() {
            relaxed.rho[e] = rng.gen::<f64>();
            relaxed.x[e] = rng.gen::<f64>();
        }
        let rounded = round_and_repair(&scn, &ch, &relaxed);
        assert!(rounded.is_binary());
        let report = check_feasibility(&scn, &ch, &rounded, 0.0);
        assert!(
            report.max_combinatorial_residual() <= 0.0,
            "combinatorial residual {}",
            report.max_combinatorial_residual()
        );
    }
}
