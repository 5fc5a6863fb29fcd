use std::collections::BTreeMap;

use trotter_core::anneal::{optimize_order, swap_neighbor, AnnealSchedule};
use trotter_core::bounds::observation_cost_fast;
use trotter_core::dense::DenseOperator;
use trotter_core::formula::FormulaSpec;
use trotter_core::model::build_heisenberg_xyz;
use trotter_core::{PauliSum, SplitMix64};

fn setup() -> (trotter_core::HamiltonianModel, DenseOperator, FormulaSpec) {
    let h = build_heisenberg_xyz(3, 11).unwrap();
    let o = DenseOperator::from_pauli_sum(&PauliSum::from_word(1.0, "IIZ").unwrap());
    let spec = FormulaSpec::new(1, 1.0, 4).unwrap();
    (h, o, spec)
}

#[test]
fn swap_proposals_are_uniform_over_pairs() {
    let pi = vec![0usize, 1, 2, 3];
    let mut rng = SplitMix64::new(7);
    let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let draws = 100_000u64;
    for _ in 0..draws {
        let (out, (a, b)) = swap_neighbor(&pi, &mut rng).unwrap();
        assert!(a < b && b < pi.len());
        assert_eq!(out[a], pi[b]);
        assert_eq!(out[b], pi[a]);
        for k in 0..pi.len() {
            if k != a && k != b {
                assert_eq!(out[k], pi[k]);
            }
        }
        *counts.entry((a, b)).or_insert(0) += 1;
    }
    assert_eq!(counts.len(), 6);
    let expected = draws as f64 / 6.0;
    let chi2: f64 = counts
        .values()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    // 1% critical value of chi-squared with five degrees of freedom.
    assert!(chi2 < 15.086, "chi2 = {chi2}, counts = {counts:?}");
}

#[test]
fn swap_rejects_singleton_orders() {
    let mut rng = SplitMix64::new(0);
    assert!(swap_neighbor(&[0], &mut rng).is_err());
}

#[test]
fn annealing_is_deterministic_for_a_fixed_seed() {
    let (h, o, spec) = setup();
    let schedule = AnnealSchedule::new(10.0, 1.0, 0.9, 42).unwrap();
    let (best_a, trace_a) = optimize_order(&h, &o, &spec, &schedule).unwrap();
    let (best_b, trace_b) = optimize_order(&h, &o, &spec, &schedule).unwrap();
    assert_eq!(best_a, best_b);
    assert_eq!(trace_a.final_order, trace_b.final_order);
    assert_eq!(trace_a.best_cost.to_bits(), trace_b.best_cost.to_bits());
    assert_eq!(trace_a.steps.len(), trace_b.steps.len());
    for (x, y) in trace_a.steps.iter().zip(trace_b.steps.iter()) {
        assert_eq!(x.iteration, y.iteration);
        assert_eq!(x.theta.to_bits(), y.theta.to_bits());
        assert_eq!(x.swap, y.swap);
        assert_eq!(x.accepted, y.accepted);
        assert_eq!(x.u.map(f64::to_bits), y.u.map(f64::to_bits));
        assert_eq!(x.proposed_cost.to_bits(), y.proposed_cost.to_bits());
        assert_eq!(x.cost.to_bits(), y.cost.to_bits());
    }
}

#[test]
fn the_trace_replays_the_acceptance_rule() {
    let (h, o, spec) = setup();
    let schedule = AnnealSchedule::new(10.0, 1.0, 0.9, 5).unwrap();
    let (_, trace) = optimize_order(&h, &o, &spec, &schedule).unwrap();
    assert_eq!(trace.steps.len() as u32, schedule.iterations());

    let mut theta = schedule.theta0;
    let mut running = trace.initial_cost;
    let mut best = trace.initial_cost;
    for (k, step) in trace.steps.iter().enumerate() {
        assert_eq!(step.iteration as usize, k);
        assert_eq!(step.theta.to_bits(), theta.to_bits());
        let delta = step.proposed_cost - running;
        match step.u {
            None => {
                assert!(delta <= 0.0, "downhill move must skip the draw");
                assert!(step.accepted);
            }
            Some(u) => {
                assert!(delta > 0.0, "the draw only happens uphill");
                assert!((0.0..1.0).contains(&u));
                assert_eq!(step.accepted, u < (-delta / theta).exp());
            }
        }
        if step.accepted {
            running = step.proposed_cost;
        }
        assert_eq!(step.cost.to_bits(), running.to_bits());
        best = best.min(running);
        theta *= schedule.alpha;
    }
    assert!(theta <= schedule.theta_inf);
    assert_eq!(trace.final_cost.to_bits(), running.to_bits());
    assert_eq!(trace.best_cost.to_bits(), best.to_bits());
}

#[test]
fn the_best_order_is_never_worse_than_the_identity() {
    let (h, o, spec) = setup();
    let schedule = AnnealSchedule::new(10.0, 1.0, 0.9, 3).unwrap();
    let (best, trace) = optimize_order(&h, &o, &spec, &schedule).unwrap();

    let identity_cost = observation_cost_fast(&h, &o, &spec).unwrap().value;
    assert!((trace.initial_cost - identity_cost).abs() <= 1e-12 * identity_cost.max(1.0));
    assert!(trace.best_cost <= trace.initial_cost);

    let reordered = h.clone().with_order(best.clone()).unwrap();
    let fresh = observation_cost_fast(&reordered, &o, &spec).unwrap().value;
    assert!(
        (trace.best_cost - fresh).abs() <= 1e-12 * fresh.max(1.0),
        "reported best {} vs fresh evaluation {fresh}",
        trace.best_cost
    );

    let mut sorted = best;
    sorted.sort_unstable();
    assert_eq!(sorted, vec![0, 1, 2]);
}

#[test]
fn schedules_count_their_iterations() {
    let schedule = AnnealSchedule::new(10.0, 1.0, 0.95, 0).unwrap();
    assert_eq!(schedule.iterations(), 45);
}

#[test]
fn single_summand_models_are_rejected() {
    let (_, o, spec) = setup();
    let schedule = AnnealSchedule::new(10.0, 1.0, 0.9, 0).unwrap();
    let single = trotter_core::HamiltonianModel::new(vec![(
        "only".into(),
        PauliSum::from_word(1.0, "XII").unwrap(),
    )])
    .unwrap();
    assert!(optimize_order(&single, &o, &spec, &schedule).is_err());
}
