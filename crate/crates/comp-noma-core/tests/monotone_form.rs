//! The monotone reformulation against the plain model evaluator: the lifted
//! objective halves must reproduce the true sum rate on binary-feasible
//! points, every lifted function must pass randomized monotonicity probes,
//! and the membership predicates must behave at the box corners.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use comp_noma_core::monotone::build_monotone_form;
use comp_noma_core::polyblock::round_and_repair;
use comp_noma_core::scenario::{generate_channels, generate_scenario, ScenarioConfig};
use comp_noma_core::sinr::{check_feasibility, sum_rate, AllocationState, Mode};

fn desk_config(seed: u64) -> (comp_noma_core::NetworkScenario, comp_noma_core::ChannelState) {
    let cfg = ScenarioConfig {
        inps: 1,
        mvnos: 2,
        bs_per_inp: 2,
        subcarriers: 2,
        subcarrier_bw_hz: 312_500.0,
        users: 3,
        users_per_mvno: vec![2, 1],
        antennas: 1,
        noma_cap: 2,
        p_max_mbs_w: 5.0,
        p_max_fbs_w: 0.5,
        p_max_mvno_w: 4.0,
        r_min_bps_hz: vec![0.0, 0.0],
        noise_psd_dbm_hz: -174.0,
        radius_m: 200.0,
        pathloss_exp: 2.0,
        channel_mean: 0.2,
    };
    let scn = generate_scenario(&cfg, seed).unwrap();
    let ch = generate_channels(&scn, seed);
    (scn, ch)
}

/// Random binary allocation that satisfies the combinatorial constraints,
/// with matched-filter beams at random power.
fn random_feasible_binary(
    scn: &comp_noma_core::NetworkScenario,
    ch: &comp_noma_core::ChannelState,
    rng: &mut ChaCha8Rng,
) -> AllocationState {
    let idx = scn.idx();
    let mut relaxed = AllocationState::zeros(scn, Mode::Relaxed);
    for e in 0..idx.entries() {
        relaxed.rho[e] = rng.gen::<f64>();
        relaxed.x[e] = rng.gen::<f64>() * relaxed.rho[e];
    }
    let mut alloc = round_and_repair(scn, ch, &relaxed);
    // Matched-filter beams with power below every budget by construction.
    for (i, b, n, k) in idx.iter() {
        let e = idx.of(i, b, n, k);
        if alloc.rho[e] == 1.0 {
            let cap = scn.p_max_of_bs(i, b).min(scn.p_max_mvno[scn.mvno_of_user[k]]);
            let total = (idx.entries() + 1) as f64;
            let p = rng.gen::<f64>() * cap / total;
            let g = ch.gain(i, b, n, k);
            if g > 0.0 {
                let scale = (p / g).sqrt();
                let beam: Vec<num_complex::Complex64> =
                    ch.vector(i, b, n, k).iter().map(|c| c * scale).collect();
                alloc.set_beam(scn, i, b, n, k, &beam);
            }
        }
    }
    alloc
}

#[test]
fn lifted_difference_equals_sum_rate_on_binary_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for seed in 0..6u64 {
        let (scn, ch) = desk_config(seed + 1);
        let problem = build_monotone_form(&scn, &ch);
        for _ in 0..5 {
            let alloc = random_feasible_binary(&scn, &ch, &mut rng);
            let z = problem.point_from_allocation(&alloc);
            let lifted = problem.q_tilde_plus(&z) - problem.q_tilde_minus(&z);
            let direct = sum_rate(&scn, &ch, &alloc);
            assert!(
                (lifted - direct).abs() <= 1e-9 * direct.abs().max(1.0),
                "lifted {lifted} vs direct {direct}"
            );
        }
    }
}

#[test]
fn lifted_membership_matches_original_constraints() {
    // The canonical point of a matched-filter binary allocation lies in
    // NS ∩ CNS exactly when the original relaxed constraints hold (rate
    // floors are zero here, so the per-user/per-MVNO reading difference of
    // the rate constraint does not bite).
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let mut agree_feasible = 0usize;
    let mut agree_infeasible = 0usize;
    for seed in 0..8u64 {
        let (scn, ch) = desk_config(seed + 30);
        let problem = build_monotone_form(&scn, &ch);
        for _ in 0..6 {
            let alloc = random_feasible_binary(&scn, &ch, &mut rng);
            let z = problem.point_from_allocation(&alloc);
            let lifted_ok = problem.ns_member(&z) && problem.cns_member(&z);
            let report = check_feasibility(&scn, &ch, &alloc, 1e-9);
            let pair_max = report
                .noma_power_order
                .iter()
                .chain(report.sic_sinr_order.iter())
                .fold(f64::NEG_INFINITY, |m, p| m.max(p.value));
            let original_ok = report.max_power_residual() <= 1e-9
                && report.max_combinatorial_residual() <= 1e-9
                && pair_max <= 1e-9;
            assert_eq!(
                lifted_ok, original_ok,
                "membership {lifted_ok} vs original {original_ok} (pair max {pair_max})"
            );
            if original_ok {
                agree_feasible += 1;
            } else {
                agree_infeasible += 1;
            }
        }
    }
    // The sample must exercise both sides of the equivalence.
    assert!(agree_feasible > 0, "no feasible sample drawn");
    assert!(agree_infeasible > 0, "no infeasible sample drawn");
}

#[test]
fn both_halves_vanish_at_zero() {
    let (scn, ch) = desk_config(3);
    let problem = build_monotone_form(&scn, &ch);
    let zero = vec![0.0; problem.dim()];
    assert_eq!(problem.q_tilde_plus(&zero), 0.0);
    assert_eq!(problem.q_tilde_minus(&zero), 0.0);
}

#[test]
fn monotonicity_probes_never_observe_a_decrease() {
    let (scn, ch) = desk_config(5);
    let problem = build_monotone_form(&scn, &ch);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let dim = problem.dim();
    let pair_count = problem.pairs.len();
    for _probe in 0..400 {
        let mut z: Vec<f64> = (0..dim)
            .map(|d| rng.gen::<f64>() * problem.mask[d])
            .collect();
        let t = rng.gen_range(0..pair_count);
        let before = (
            problem.q_tilde_plus(&z),
            problem.q_tilde_minus(&z),
            problem.t_plus(&z, t),
            problem.t_tilde_plus(&z, t),
            problem.t_tilde_minus(&z, t),
        );
        let d = rng.gen_range(0..dim);
        let head = problem.mask[d] - z[d];
        z[d] += rng.gen::<f64>() * head;
        let after = (
            problem.q_tilde_plus(&z),
            problem.q_tilde_minus(&z),
            problem.t_plus(&z, t),
            problem.t_tilde_plus(&z, t),
            problem.t_tilde_minus(&z, t),
        );
        let slack = 1e-12;
        assert!(after.0 >= before.0 - slack, "q_plus decreased");
        assert!(after.1 >= before.1 - slack, "q_minus decreased");
        assert!(after.2 >= before.2 - slack, "t_plus decreased");
        assert!(after.3 >= before.3 - slack, "t_tilde_plus decreased");
        assert!(after.4 >= before.4 - slack, "t_tilde_minus decreased");
    }
}

#[test]
fn masks_and_origin_membership() {
    let (scn, ch) = desk_config(9);
    let problem = build_monotone_form(&scn, &ch);
    let zero = vec![0.0; problem.dim()];
    assert!(problem.ns_member(&zero));
    // Rate floors are zero here, so the mask corner satisfies every
    // co-normal inequality by construction.
    assert!(problem.cns_member(&problem.mask.clone()));
    let mut above = problem.mask.clone();
    above[0] = above[0] * 2.0 + 1.0;
    assert!(!problem.ns_member(&above));
}
