use num_complex::Complex64;
use trotter_core::dense::{commutator_dense, expectation, validate_density_matrix};
use trotter_core::eig::{exp_herm, herm_eig, log_unitary_principal};
use trotter_core::norms::{frobenius_norm, spectral_norm, trace_norm};
use trotter_core::sylvester::solve_sylvester_for_m;
use trotter_core::{DenseOperator, SplitMix64};

fn random_dense(dim: usize, rng: &mut SplitMix64) -> DenseOperator {
    let entries: Vec<Complex64> = (0..dim * dim)
        .map(|_| Complex64::new(rng.next_open_pm1(), rng.next_open_pm1()))
        .collect();
    DenseOperator::from_rows(dim, entries).unwrap()
}

fn random_hermitian(dim: usize, rng: &mut SplitMix64) -> DenseOperator {
    let a = random_dense(dim, rng);
    a.add(&a.adjoint()).unwrap().scale(Complex64::new(0.5, 0.0))
}

#[test]
fn norm_chain_on_random_operators() {
    let mut rng = SplitMix64::new(31);
    for _ in 0..50 {
        let dim = 1 << (1 + rng.next_below(3));
        let a = random_dense(dim, &mut rng);
        let spec = spectral_norm(&a).unwrap();
        let frob = frobenius_norm(&a);
        let tr = trace_norm(&a).unwrap();
        assert!(spec <= frob + 1e-9);
        assert!(frob <= tr + 1e-9);
        assert!(tr <= dim as f64 * spec + 1e-9);
        // The normalized trace norm from the average-case bounds never
        // exceeds the worst-case norm.
        assert!(tr / dim as f64 <= spec + 1e-9);
    }
}

#[test]
fn norms_are_unitarily_invariant() {
    let mut rng = SplitMix64::new(77);
    for _ in 0..10 {
        let dim = 4;
        let a = random_dense(dim, &mut rng);
        let g = random_hermitian(dim, &mut rng);
        let q = exp_herm(&g, 1.0).unwrap();
        let b = q.mul(&a).unwrap().mul(&q.adjoint()).unwrap();
        assert!((spectral_norm(&a).unwrap() - spectral_norm(&b).unwrap()).abs() < 1e-9);
        assert!((trace_norm(&a).unwrap() - trace_norm(&b).unwrap()).abs() < 1e-9);
        assert!((frobenius_norm(&a) - frobenius_norm(&b)).abs() < 1e-9);
    }
}

#[test]
fn exponentials_of_hermitians_are_unitary() {
    let mut rng = SplitMix64::new(5);
    for k in 0..100 {
        let dim = 1 << (1 + rng.next_below(3));
        let h = random_hermitian(dim, &mut rng);
        let u = exp_herm(&h, -1.0).unwrap();
        assert!(u.is_unitary(1e-9), "exp failed unitarity at case {k}");
    }
}

#[test]
fn eigendecomposition_reconstructs_hermitians() {
    let mut rng = SplitMix64::new(12);
    for _ in 0..20 {
        let dim = 8;
        let h = random_hermitian(dim, &mut rng);
        let (evals, q) = herm_eig(&h).unwrap();
        assert!(q.is_unitary(1e-9));
        let mut lam = DenseOperator::zeros(dim);
        for (i, &e) in evals.iter().enumerate() {
            lam.set(i, i, Complex64::new(e, 0.0));
        }
        let back = q.mul(&lam).unwrap().mul(&q.adjoint()).unwrap();
        assert!(back.sub(&h).unwrap().frobenius() < 1e-9 * (1.0 + h.frobenius()));
        for w in evals.windows(2) {
            assert!(w[0] <= w[1], "eigenvalues must be ascending");
        }
    }
}

#[test]
fn principal_log_inverts_the_exponential() {
    let mut rng = SplitMix64::new(40);
    for _ in 0..25 {
        let dim = 1 << (1 + rng.next_below(2));
        let mut h = random_hermitian(dim, &mut rng);
        // Scale into the principal disc so the log branch is unambiguous.
        let norm = spectral_norm(&h).unwrap();
        h = h.scale(Complex64::new(2.8 / norm.max(1e-12), 0.0));
        let u = exp_herm(&h, -1.0).unwrap();
        let log = log_unitary_principal(&u).unwrap();
        assert!(!log.branch_warning);
        // e^{iG} = U = e^{-iH}, so -G recovers H on the principal branch.
        let recovered = log.g.scale(Complex64::new(-1.0, 0.0));
        let dev = recovered.sub(&h).unwrap().frobenius();
        assert!(
            dev < 1e-9 * (1.0 + h.frobenius()),
            "dim {dim}: deviation {dev:e}"
        );
    }
}

#[test]
fn sylvester_solutions_satisfy_their_equation() {
    let mut rng = SplitMix64::new(61);
    let mut found = 0;
    for _ in 0..20 {
        let dim = 4;
        let h = random_hermitian(dim, &mut rng);
        let m0 = random_hermitian(dim, &mut rng);
        // Build a right-hand side that is exactly reachableesque: H' = [H, iM0].
        let hp = commutator_dense(&h, &m0.scale(Complex64::new(0.0, 1.0))).unwrap();
        let sol = solve_sylvester_for_m(&h, &hp).unwrap();
        assert!(sol.exists, "constructed right-hand side must be solvable");
        let im = sol.m.scale(Complex64::new(0.0, 1.0));
        let res = commutator_dense(&h, &im).unwrap().sub(&hp).unwrap();
        assert!(spectral_norm(&res).unwrap() < 1e-9 * (1.0 + spectral_norm(&hp).unwrap()));
        assert!(sol.residual < 1e-9 * (1.0 + spectral_norm(&hp).unwrap()));
        found += 1;
    }
    assert_eq!(found, 20);
}

#[test]
fn sylvester_flags_unreachable_right_hand_sides() {
    let mut rng = SplitMix64::new(62);
    let h = random_hermitian(4, &mut rng);
    // Any component along H itself commutes with H and cannot be produced
    // by [H, iM].
    let sol = solve_sylvester_for_m(&h, &h).unwrap();
    assert!(!sol.exists);
    assert!(sol.residual > 1e-6);
}

#[test]
fn expectation_respects_operator_norm() {
    let mut rng = SplitMix64::new(90);
    for _ in 0..20 {
        let dim = 4;
        let o = random_hermitian(dim, &mut rng);
        // Random pure state as a rank-one projector.
        let v: Vec<Complex64> =
            (0..dim).map(|_| Complex64::new(rng.next_open_pm1(), rng.next_open_pm1())).collect();
        let nrm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let mut rho = DenseOperator::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                rho.set(i, j, v[i] * v[j].conj() / (nrm * nrm));
            }
        }
        validate_density_matrix(&rho).unwrap();
        let val = expectation(&o, &rho).unwrap();
        assert!(val.abs() <= spectral_norm(&o).unwrap() + 1e-9);
    }
}

#[test]
fn density_validation_rejects_bad_states() {
    let dim = 2;
    let mut not_normalized = DenseOperator::identity(dim);
    not_normalized.set(0, 0, Complex64::new(0.9, 0.0));
    assert!(validate_density_matrix(&not_normalized).is_err());

    let mut not_psd = DenseOperator::zeros(dim);
    not_psd.set(0, 0, Complex64::new(1.5, 0.0));
    not_psd.set(1, 1, Complex64::new(-0.5, 0.0));
    assert!(validate_density_matrix(&not_psd).is_err());

    let mixed = DenseOperator::identity(dim).scale(Complex64::new(0.5, 0.0));
    validate_density_matrix(&mixed).unwrap();
}
