//! Simulated annealing over the evolution order inside a Trotter block.
//!
//! The search variable is the permutation deciding which summand is applied
//! when; the objective is the observable-aware cost from `bounds`. One swap
//! is proposed per temperature step, worse moves pass a Metropolis test, and
//! the best order ever visited is returned together with a full audit trace.

use std::collections::BTreeMap;

use crate::bounds::observation_cost_fast;
use crate::dense::DenseOperator;
use crate::error::CoreError;
use crate::formula::FormulaSpec;
use crate::model::HamiltonianModel;
use crate::rng::SplitMix64;
use crate::Result;

/// Geometric cooling schedule: theta starts at `theta0` and is multiplied by
/// `alpha` after every proposal until it falls to `theta_inf` or below.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    pub theta0: f64,
    pub theta_inf: f64,
    pub alpha: f64,
    pub seed: u64,
}

impl AnnealSchedule {
    pub fn new(theta0: f64, theta_inf: f64, alpha: f64, seed: u64) -> Result<Self> {
        if !theta0.is_finite() || theta0 <= 0.0 {
            return Err(CoreError::InvalidArgument(format!(
                "initial temperature must be positive, got {theta0}"
            )));
        }
        if !theta_inf.is_finite() || theta_inf <= 0.0 || theta_inf >= theta0 {
            return Err(CoreError::InvalidArgument(format!(
                "end temperature must lie in (0, {theta0}), got {theta_inf}"
            )));
        }
        if !alpha.is_finite() || alpha <= 0.0 || alpha >= 1.0 {
            return Err(CoreError::InvalidArgument(format!(
                "decay ratio must lie in (0, 1), got {alpha}"
            )));
        }
        Ok(AnnealSchedule {
            theta0,
            theta_inf,
            alpha,
            seed,
        })
    }

    /// Number of proposals the schedule admits; always finite since alpha < 1.
    pub fn iterations(&self) -> u32 {
        let mut theta = self.theta0;
        let mut k = 0u32;
        while theta > self.theta_inf {
            theta *= self.alpha;
            k += 1;
        }
        k
    }
}

/// One proposal: the temperature it was made at, the swapped positions, the
/// accept/reject outcome with the uniform draw (absent when the move was
/// downhill or flat and no draw was needed), the proposed cost, and the cost
/// of the order retained afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealStep {
    pub iteration: u32,
    pub theta: f64,
    pub swap: (usize, usize),
    pub accepted: bool,
    pub u: Option<f64>,
    pub proposed_cost: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnealTrace {
    pub steps: Vec<AnnealStep>,
    pub final_order: Vec<usize>,
    pub best_order: Vec<usize>,
    pub initial_cost: f64,
    pub final_cost: f64,
    pub best_cost: f64,
}

/// Uniform draw over the L(L-1)/2 unordered position pairs; returns the
/// order with the pair swapped and the pair itself, smaller position first.
pub fn swap_neighbor(pi: &[usize], rng: &mut SplitMix64) -> Result<(Vec<usize>, (usize, usize))> {
    let l = pi.len();
    if l < 2 {
        return Err(CoreError::InvalidArgument(format!(
            "swap proposals need at least two summands, got {l}"
        )));
    }
    let a = rng.next_below(l);
    let mut b = rng.next_below(l - 1);
    if b >= a {
        b += 1;
    }
    let (a, b) = (a.min(b), a.max(b));
    let mut out = pi.to_vec();
    out.swap(a, b);
    Ok((out, (a, b)))
}

/// Anneals the evolution order starting from the identity permutation.
/// Moves that do not increase the cost are always accepted; uphill moves
/// are accepted when the uniform draw u satisfies u < exp(-delta/theta).
/// Returns the best order visited (never worse than the start) and the
/// trace. Costs are memoized per order, and the whole run is deterministic
/// for a fixed schedule seed.
pub fn optimize_order(
    h: &HamiltonianModel,
    o: &DenseOperator,
    spec: &FormulaSpec,
    schedule: &AnnealSchedule,
) -> Result<(Vec<usize>, AnnealTrace)> {
    if spec.order() != 1 && spec.order() != 2 {
        return Err(CoreError::UnsupportedOrder(spec.order()));
    }
    if h.len() < 2 {
        return Err(CoreError::InvalidArgument(
            "order optimization needs at least two summands".into(),
        ));
    }
    let mut rng = SplitMix64::new(schedule.seed);
    let mut cache: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    let mut current: Vec<usize> = (0..h.len()).collect();
    let mut current_cost = eval_cost(h, o, spec, &current, &mut cache)?;
    let initial_cost = current_cost;
    let mut best = current.clone();
    let mut best_cost = current_cost;
    let mut steps = Vec::with_capacity(schedule.iterations() as usize);
    let mut theta = schedule.theta0;
    let mut iteration = 0u32;
    while theta > schedule.theta_inf {
        let (proposal, pair) = swap_neighbor(&current, &mut rng)?;
        let proposed_cost = eval_cost(h, o, spec, &proposal, &mut cache)?;
        let delta = proposed_cost - current_cost;
        let (accepted, u) = if delta <= 0.0 {
            (true, None)
        } else {
            let u = rng.next_f64();
            (u < (-delta / theta).exp(), Some(u))
        };
        if accepted {
            current = proposal;
            current_cost = proposed_cost;
            if current_cost < best_cost {
                best_cost = current_cost;
                best = current.clone();
            }
        }
        steps.push(AnnealStep {
            iteration,
            theta,
            swap: pair,
            accepted,
            u,
            proposed_cost,
            cost: current_cost,
        });
        theta *= schedule.alpha;
        iteration += 1;
    }
    let trace = AnnealTrace {
        steps,
        final_order: current,
        best_order: best.clone(),
        initial_cost,
        final_cost: current_cost,
        best_cost,
    };
    Ok((best, trace))
}

fn eval_cost(
    h: &HamiltonianModel,
    o: &DenseOperator,
    spec: &FormulaSpec,
    order: &[usize],
    cache: &mut BTreeMap<Vec<usize>, f64>,
) -> Result<f64> {
    if let Some(&v) = cache.get(order) {
        return Ok(v);
    }
    let reordered = h.clone().with_order(order.to_vec())?;
    let v = observation_cost_fast(&reordered, o, spec)?.value;
    cache.insert(order.to_vec(), v);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_heisenberg_xyz;
    use crate::pauli::PauliSum;

    fn schedule(seed: u64) -> AnnealSchedule {
        AnnealSchedule::new(10.0, 1.0, 0.95, seed).unwrap()
    }

    #[test]
    fn schedule_validation() {
        assert!(AnnealSchedule::new(0.0, 1.0, 0.5, 0).is_err());
        assert!(AnnealSchedule::new(10.0, 0.0, 0.5, 0).is_err());
        assert!(AnnealSchedule::new(10.0, 20.0, 0.5, 0).is_err());
        assert!(AnnealSchedule::new(10.0, 1.0, 1.0, 0).is_err());
        assert!(AnnealSchedule::new(10.0, 1.0, 0.0, 0).is_err());
    }

    #[test]
    fn schedule_iteration_counts() {
        assert_eq!(schedule(0).iterations(), 45);
        assert_eq!(AnnealSchedule::new(8.0, 1.0, 0.5, 0).unwrap().iterations(), 3);
    }

    #[test]
    fn swap_neighbor_two_elements() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..20 {
            let (pi, pair) = swap_neighbor(&[0, 1], &mut rng).unwrap();
            assert_eq!(pi, vec![1, 0]);
            assert_eq!(pair, (0, 1));
        }
    }

    #[test]
    fn swap_neighbor_changes_exactly_two_positions() {
        let mut rng = SplitMix64::new(11);
        let pi: Vec<usize> = (0..6).collect();
        for _ in 0..200 {
            let (swapped, (a, b)) = swap_neighbor(&pi, &mut rng).unwrap();
            assert!(a < b);
            let diffs: Vec<usize> = (0..6).filter(|&i| swapped[i] != pi[i]).collect();
            assert_eq!(diffs, vec![a, b]);
        }
    }

    #[test]
    fn swap_neighbor_rejects_short_orders() {
        let mut rng = SplitMix64::new(1);
        assert!(swap_neighbor(&[0], &mut rng).is_err());
    }

    #[test]
    fn optimize_is_deterministic() {
        let h = build_heisenberg_xyz(2, 17).unwrap();
        let o = DenseOperator::from_pauli_sum(&PauliSum::from_word(1.0, "ZI").unwrap());
        let spec = FormulaSpec::new(1, 2.0, 8).unwrap();
        let (best1, trace1) = optimize_order(&h, &o, &spec, &schedule(123)).unwrap();
        let (best2, trace2) = optimize_order(&h, &o, &spec, &schedule(123)).unwrap();
        assert_eq!(best1, best2);
        assert_eq!(trace1, trace2);
        assert_eq!(trace1.steps.len(), 45);
    }

    #[test]
    fn commuting_model_keeps_identity_order() {
        let h = HamiltonianModel::new(vec![
            ("a".into(), PauliSum::from_word(0.5, "ZI").unwrap()),
            ("b".into(), PauliSum::from_word(0.3, "IZ").unwrap()),
            ("c".into(), PauliSum::from_word(-0.2, "ZZ").unwrap()),
        ])
        .unwrap();
        let o = DenseOperator::from_pauli_sum(&PauliSum::from_word(1.0, "ZI").unwrap());
        let spec = FormulaSpec::new(1, 1.0, 4).unwrap();
        let (best, trace) = optimize_order(&h, &o, &spec, &schedule(5)).unwrap();
        assert_eq!(best, vec![0, 1, 2]);
        assert_eq!(trace.best_cost, 0.0);
        assert!(trace.steps.iter().all(|s| s.cost == 0.0));
    }

    #[test]
    fn best_cost_is_min_over_run() {
        let h = build_heisenberg_xyz(3, 29).unwrap();
        let o = DenseOperator::from_pauli_sum(&PauliSum::from_word(1.0, "ZII").unwrap());
        let spec = FormulaSpec::new(1, 1.5, 6).unwrap();
        let (best, trace) = optimize_order(&h, &o, &spec, &schedule(99)).unwrap();
        assert_eq!(best, trace.best_order);
        let min_seen = trace
            .steps
            .iter()
            .map(|s| s.cost)
            .fold(trace.initial_cost, f64::min);
        assert_eq!(min_seen, trace.best_cost);
        assert!(trace.best_cost <= trace.initial_cost);
        assert_eq!(trace.final_cost, trace.steps.last().unwrap().cost);
    }

    #[test]
    fn uphill_moves_follow_metropolis_rule() {
        let h = build_heisenberg_xyz(2, 41).unwrap();
        let o = DenseOperator::from_pauli_sum(&PauliSum::from_word(1.0, "ZI").unwrap());
        let spec = FormulaSpec::new(1, 2.5, 8).unwrap();
        let (_, trace) = optimize_order(&h, &o, &spec, &schedule(7)).unwrap();
        let mut prev_cost = trace.initial_cost;
        let mut saw_uphill_accept = false;
        for step in &trace.steps {
            let delta = step.proposed_cost - prev_cost;
            if delta <= 0.0 {
                assert!(step.accepted && step.u.is_none());
            } else {
                let u = step.u.expect("uphill proposal must record a draw");
                let threshold = (-delta / step.theta).exp();
                assert_eq!(step.accepted, u < threshold);
                saw_uphill_accept |= step.accepted;
            }
            if step.accepted {
                assert_eq!(step.cost, step.proposed_cost);
            } else {
                assert_eq!(step.cost, prev_cost);
            }
            prev_cost = step.cost;
        }
        // High starting temperature should let at least one uphill move through.
        assert!(saw_uphill_accept);
    }
}
