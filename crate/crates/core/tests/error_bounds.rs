use num_complex::Complex64;
use trotter_core::bounds::{
    commutator_bound, error_kernel, kernel_norm_bound, kernel_observation_bound, lloyd_bound,
    observation_cost, observation_cost_fast, observation_error_worst_case, trotter_number_search,
    two_term_m_bound, two_term_shortcut_m, TwoTermFactor, TROTTER_CAP,
};
use trotter_core::dense::{commutator_dense, conjugate, DenseOperator};
use trotter_core::formula::{
    exact_evolution, leading_difference, product_formula, trotter_block, FormulaSpec,
};
use trotter_core::norms::spectral_norm;
use trotter_core::sylvester::solve_sylvester_for_m;
use trotter_core::{CoreError, HamiltonianModel, PauliString, PauliSum, SplitMix64};

fn random_model(seed: u64) -> (HamiltonianModel, DenseOperator, f64, u32) {
    let mut rng = SplitMix64::new(seed);
    let n = 1 + rng.next_below(3);
    let l = 2 + rng.next_below(3);
    let mut parts = Vec::new();
    for j in 0..l {
        let mut s = PauliSum::new(n);
        for _ in 0..2 {
            let mask = 1usize << n;
            let p = PauliString::new(n, rng.next_below(mask) as u64, rng.next_below(mask) as u64)
                .unwrap();
            s.add_term(p, Complex64::new(rng.next_open_pm1(), 0.0)).unwrap();
        }
        if s.is_empty() {
            s.add_term(PauliString::new(n, 1, 0).unwrap(), Complex64::new(0.5, 0.0)).unwrap();
        }
        parts.push((format!("h{j}"), s));
    }
    let h = HamiltonianModel::new(parts).unwrap();
    // A non-identity Pauli observable with unit norm.
    let o = loop {
        let mask = 1usize << n;
        let p =
            PauliString::new(n, rng.next_below(mask) as u64, rng.next_below(mask) as u64).unwrap();
        if !p.is_identity() {
            let mut s = PauliSum::new(n);
            s.add_term(p, Complex64::new(1.0, 0.0)).unwrap();
            break DenseOperator::from_pauli_sum(&s);
        }
    };
    let t = 0.25 + 1.75 * rng.next_f64();
    let r = 1 + rng.next_below(16) as u32;
    (h, o, t, r)
}

fn max_summand_norm(h: &HamiltonianModel) -> f64 {
    h.summands()
        .iter()
        .map(|s| spectral_norm(&DenseOperator::from_pauli_sum(s)).unwrap())
        .fold(0.0, f64::max)
}

#[test]
fn bound_chain_holds_on_random_models() {
    for seed in 100..120u64 {
        let (h, o, t, r) = random_model(seed);
        let u = exact_evolution(&h, t).unwrap();
        let lambda = max_summand_norm(&h);
        for order in [1u32, 2] {
            let spec = FormulaSpec::new(order, t, r).unwrap();
            let v = product_formula(&h, &spec).unwrap();
            let uv = spectral_norm(&u.sub(&v).unwrap()).unwrap();
            let comm = commutator_bound(&h, &spec).unwrap().value;
            let lloyd = lloyd_bound(&spec, h.len(), lambda).unwrap().value;
            assert!(uv <= comm + 1e-9, "seed {seed} order {order}: {uv} > comm {comm}");
            assert!(comm <= lloyd + 1e-9, "seed {seed} order {order}: comm {comm} > lloyd {lloyd}");

            let kernel = error_kernel(&u, &v, t).unwrap();
            let worst = observation_error_worst_case(&u, &v, &o).unwrap();
            let kernel_obs = kernel_observation_bound(&kernel.e, &o, t).unwrap();
            assert!(
                worst <= kernel_obs + 1e-9,
                "seed {seed} order {order}: worst {worst} > kernel {kernel_obs}"
            );

            let b = uv.min(2.0);
            let cap = kernel_norm_bound(b, t).unwrap();
            let e_norm = spectral_norm(&kernel.e).unwrap();
            assert!(
                e_norm <= cap + 1e-9,
                "seed {seed} order {order}: ||E|| {e_norm} > {cap}"
            );
        }
    }
}

fn nested_left(h: &DenseOperator, x: &DenseOperator, times: usize) -> DenseOperator {
    let mut acc = x.clone();
    for _ in 0..times {
        acc = commutator_dense(h, &acc).unwrap();
    }
    acc
}

fn nested_right(x: &DenseOperator, h: &DenseOperator, times: usize) -> DenseOperator {
    let mut acc = x.clone();
    for _ in 0..times {
        acc = commutator_dense(&acc, h).unwrap();
    }
    acc
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

#[test]
fn nested_commutator_rearrangement_identity() {
    // For the sum over split positions of [H,...[H,[H',[H,...[H,O]]]]...],
    // grouping the inner applications onto H' with binomial weights leaves
    // the operator unchanged.
    let mut rng = SplitMix64::new(2024);
    let dim = 4;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let rand_herm = |rng: &mut SplitMix64| {
            let entries: Vec<Complex64> = (0..dim * dim)
                .map(|_| Complex64::new(rng.next_open_pm1(), rng.next_open_pm1()))
                .collect();
            let a = DenseOperator::from_rows(dim, entries).unwrap();
            a.add(&a.adjoint()).unwrap().scale(Complex64::new(0.5, 0.0))
        };
        let h = rand_herm(&mut rng);
        let hp = rand_herm(&mut rng);
        let o = rand_herm(&mut rng);
        for n in 1..=4usize {
            let mut lhs = DenseOperator::zeros(dim);
            for l in 1..=n {
                let inner = commutator_dense(&hp, &nested_left(&h, &o, n - l)).unwrap();
                lhs = lhs.add(&nested_left(&h, &inner, l - 1)).unwrap();
            }
            let mut rhs = DenseOperator::zeros(dim);
            for l in 0..n {
                let rotated = nested_right(&hp, &h, l);
                let inner = commutator_dense(&rotated, &o).unwrap();
                let term = nested_left(&h, &inner, n - l - 1);
                rhs = rhs
                    .add(&term.scale(Complex64::new(binomial(n, l + 1), 0.0)))
                    .unwrap();
            }
            let dev = spectral_norm(&lhs.sub(&rhs).unwrap()).unwrap();
            worst = worst.max(dev / spectral_norm(&lhs).unwrap().max(1.0));
        }
    }
    assert!(worst <= 1e-10, "identity deviation {worst}");
}

#[test]
fn observation_cost_matches_a_direct_reimplementation() {
    for (order, seed) in [(1u32, 300u64), (2, 301)] {
        let (h, o, _, _) = random_model(seed);
        let spec = FormulaSpec::new(order, 0.8, 6).unwrap();
        let library = observation_cost(&h, &o, &spec).unwrap().value;
        let fast = observation_cost_fast(&h, &o, &spec).unwrap().value;

        let s = trotter_block(&h, &spec).unwrap();
        let hbar = DenseOperator::from_pauli_sum(&leading_difference(&h, &spec).unwrap());
        let mut sum = 0.0;
        let mut ok = o.clone();
        for _ in 0..spec.r() {
            // One more conjugation by S^-1 per step of the walk.
            ok = conjugate(&s.adjoint(), &ok).unwrap();
            sum += spectral_norm(&commutator_dense(&hbar, &ok).unwrap()).unwrap();
        }
        let direct = spec.t() / spec.r() as f64 * sum;
        assert!(
            (library - direct).abs() <= 1e-12 * direct.max(1.0),
            "order {order}: {library} vs {direct}"
        );
        assert!(
            (fast - direct).abs() <= 1e-9 * direct.max(1.0),
            "order {order}: eigenbasis path {fast} vs {direct}"
        );
    }
}

#[test]
fn two_term_shortcut_solves_the_commutator_equation() {
    let hx = PauliSum::from_word(0.9, "XI").unwrap();
    let mut hz = PauliSum::from_word(0.6, "ZZ").unwrap();
    hz.add_term(PauliString::from_word("IZ").unwrap(), Complex64::new(-0.3, 0.0)).unwrap();
    let h = HamiltonianModel::new(vec![("a".into(), hx), ("b".into(), hz)]).unwrap();
    let spec = FormulaSpec::new(1, 1.4, 9).unwrap();

    let m = two_term_shortcut_m(&h, &spec, TwoTermFactor::Half).unwrap();
    let hbar = DenseOperator::from_pauli_sum(&leading_difference(&h, &spec).unwrap());
    let h_dense = DenseOperator::from_pauli_sum(&h.total());
    let im = m.scale(Complex64::new(0.0, 1.0));
    let lhs = commutator_dense(&im, &h_dense).unwrap();
    assert!(spectral_norm(&lhs.sub(&hbar).unwrap()).unwrap() < 1e-12);

    let full = two_term_shortcut_m(&h, &spec, TwoTermFactor::Full).unwrap();
    assert!(full.sub(&m.scale(Complex64::new(2.0, 0.0))).unwrap().frobenius() < 1e-15);

    // The eigenbasis solver reaches the same equation: [H, iM'] = -Hbar.
    let sol = solve_sylvester_for_m(&h_dense, &hbar.scale(Complex64::new(-1.0, 0.0))).unwrap();
    assert!(sol.exists);
    let im2 = sol.m.scale(Complex64::new(0.0, 1.0));
    let res = commutator_dense(&im2, &h_dense).unwrap().sub(&hbar).unwrap();
    assert!(spectral_norm(&res).unwrap() < 1e-9);

    // And the shortcut bound is sound for a concrete state.
    let dim = 4;
    let mut rho = DenseOperator::zeros(dim);
    rho.set(0, 0, Complex64::new(1.0, 0.0));
    let o = DenseOperator::from_pauli_sum(&PauliSum::from_word(1.0, "ZI").unwrap());
    let bound = two_term_m_bound(&o, &rho, &m).unwrap();
    assert!(bound.is_finite() && bound >= 0.0);
}

#[test]
fn search_finds_minimal_feasible_r_under_dips() {
    // Smooth decay: r* is the exact threshold.
    let r = trotter_number_search(|r| Ok(7.5 / f64::from(r)), 1e-2).unwrap();
    assert_eq!(r, 750);
    assert!(7.5 / f64::from(r) <= 1e-2);
    assert!(7.5 / f64::from(r - 1) > 1e-2);

    // A local dip just below the plateau crossing must win.
    let dip = |r: u32| {
        Ok(match r {
            7 => 0.5,
            8 | 9 => 3.0,
            _ => 10.0 / f64::from(r),
        })
    };
    assert_eq!(trotter_number_search(dip, 1.0).unwrap(), 7);

    // Infeasible everywhere: the cap is reported, not a bogus answer.
    match trotter_number_search(|_| Ok(1.0), 1e-3) {
        Err(CoreError::CapExceeded(cap)) => assert_eq!(cap, TROTTER_CAP),
        other => panic!("expected cap exceeded, got {other:?}"),
    }
}

#[test]
fn kernel_norm_bound_inverts_the_chord() {
    // ||U - V|| = 2 sin(t ||E|| / 2) for a one-dimensional rotation, so the
    // bound must be tight there.
    let t = 2.0;
    for phi in [0.1f64, 0.7, 1.5] {
        let b = 2.0 * (phi / 2.0).sin();
        let cap = kernel_norm_bound(b, t).unwrap();
        assert!((cap - phi / t).abs() < 1e-12);
    }
    assert!(kernel_norm_bound(2.0, 1.0).unwrap() <= std::f64::consts::PI + 1e-12);
    assert!(kernel_norm_bound(-0.1, 1.0).is_err());
    assert!(kernel_norm_bound(2.1, 1.0).is_err());
}
