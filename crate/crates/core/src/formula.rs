//! Product formulas: exact evolution, Trotter blocks of first, second, and
//! Suzuki 2k-th order, conjugated observable sequences, and the symbolic
//! leading term of the equivalent-Hamiltonian expansion.
//!
//! Factor-order convention: the evolution order lists summands in the order
//! they act on a state, so the first entry is the rightmost matrix factor.
//! For order (2,1,3) the first-order block reads
//! e^{-i tau H_3} e^{-i tau H_1} e^{-i tau H_2}.

use crate::dense::DenseOperator;
use crate::eig::{exp_herm, herm_eig, log_unitary_principal};
use crate::error::CoreError;
use crate::model::HamiltonianModel;
use crate::pauli::{commutator_sum, PauliSum};
use crate::Result;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormulaSpec {
    order: u32,
    t: f64,
    r: u32,
}

impl FormulaSpec {
    /// Order must be 1, 2, or an even value >= 4 (Suzuki recursion); t > 0.
    pub fn new(order: u32, t: f64, r: u32) -> Result<Self> {
        if !(order == 1 || order == 2 || (order >= 4 && order % 2 == 0)) {
            return Err(CoreError::UnsupportedOrder(order));
        }
        if !(t.is_finite() && t > 0.0) {
            return Err(CoreError::InvalidArgument(format!("invalid time {t}")));
        }
        if r == 0 {
            return Err(CoreError::InvalidArgument("r must be positive".into()));
        }
        Ok(FormulaSpec { order, t, r })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// Step size t/r.
    pub fn tau(&self) -> f64 {
        self.t / self.r as f64
    }

    pub fn with_r(&self, r: u32) -> Result<Self> {
        FormulaSpec::new(self.order, self.t, r)
    }
}

/// Suzuki split coefficient p_k = 1/(4 - 4^{1/(2k-1)}).
pub fn suzuki_pk(k: u32) -> f64 {
    1.0 / (4.0 - 4f64.powf(1.0 / (2.0 * k as f64 - 1.0)))
}

/// Eigendecompositions of the summands, computed once so exponentials at any
/// step size are two matrix products each.
pub struct SummandExps {
    eigs: Vec<(Vec<f64>, DenseOperator)>,
    dim: usize,
}

impl SummandExps {
    pub fn new(h: &HamiltonianModel) -> Result<Self> {
        let dim = 1usize << h.n();
        let mut eigs = Vec::with_capacity(h.len());
        for s in h.summands() {
            let dense = DenseOperator::from_pauli_sum(s);
            eigs.push(herm_eig(&dense)?);
        }
        Ok(SummandExps { eigs, dim })
    }

    /// e^{i scale H_j} for stored summand j.
    fn exp(&self, j: usize, scale: f64) -> Result<DenseOperator> {
        let (vals, q) = &self.eigs[j];
        let d = self.dim;
        let mut left = DenseOperator::zeros(d);
        for col in 0..d {
            let ph = Complex64::from_polar(1.0, scale * vals[col]);
            for row in 0..d {
                left.set(row, col, q.get(row, col) * ph);
            }
        }
        left.mul(&q.adjoint())
    }

    /// One Trotter block S(tau) for the given order and evolution order.
    pub fn block(&self, order_indices: &[usize], order: u32, tau: f64) -> Result<DenseOperator> {
        match order {
            1 => self.sweep(order_indices, tau, false),
            2 => {
                let fwd = self.sweep(order_indices, tau / 2.0, false)?;
                let bwd = self.sweep(order_indices, tau / 2.0, true)?;
                bwd.mul(&fwd)
            }
            k2 if k2 >= 4 && k2 % 2 == 0 => {
                let p = suzuki_pk(k2 / 2);
                let outer = self.block(order_indices, k2 - 2, p * tau)?;
                let mid = self.block(order_indices, k2 - 2, (1.0 - 4.0 * p) * tau)?;
                let outer2 = outer.mul(&outer)?;
                outer2.mul(&mid)?.mul(&outer2)
            }
            other => Err(CoreError::UnsupportedOrder(other)),
        }
    }

    /// Product of e^{-i tau H_j} with the first (or last, reversed) entry of
    /// the evolution order acting first, i.e. rightmost.
    fn sweep(&self, order_indices: &[usize], tau: f64, reversed: bool) -> Result<DenseOperator> {
        let mut acc = DenseOperator::identity(self.dim);
        let iter: Box<dyn Iterator<Item = &usize>> = if reversed {
            Box::new(order_indices.iter().rev())
        } else {
            Box::new(order_indices.iter())
        };
        for &j in iter {
            let e = self.exp(j, -tau)?;
            acc = e.mul(&acc)?;
        }
        Ok(acc)
    }
}

/// U = e^{-iHt} from the dense total Hamiltonian.
pub fn exact_evolution(h: &HamiltonianModel, t: f64) -> Result<DenseOperator> {
    if !t.is_finite() {
        return Err(CoreError::InvalidArgument(format!("invalid time {t}")));
    }
    let dense = DenseOperator::from_pauli_sum(&h.total());
    exp_herm(&dense, -t)
}

/// One Trotter block S(t/r).
pub fn trotter_block(h: &HamiltonianModel, spec: &FormulaSpec) -> Result<DenseOperator> {
    let exps = SummandExps::new(h)?;
    exps.block(h.order(), spec.order(), spec.tau())
}

/// The full product formula V = S(t/r)^r via binary powering.
pub fn product_formula(h: &HamiltonianModel, spec: &FormulaSpec) -> Result<DenseOperator> {
    let block = trotter_block(h, spec)?;
    matrix_power(&block, spec.r())
}

pub fn matrix_power(a: &DenseOperator, mut k: u32) -> Result<DenseOperator> {
    let mut result = DenseOperator::identity(a.dim());
    let mut base = a.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = base.mul(&result)?;
        }
        k >>= 1;
        if k > 0 {
            base = base.mul(&base)?;
        }
    }
    Ok(result)
}

/// Iterator over S^{-k} O S^k for k = 1..r, each element one conjugation away
/// from the previous.
pub struct ConjugatedObservables {
    s: DenseOperator,
    s_dag: DenseOperator,
    current: DenseOperator,
    remaining: u32,
}

impl Iterator for ConjugatedObservables {
    type Item = Result<DenseOperator>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let next = self
            .s_dag
            .mul(&self.current)
            .and_then(|m| m.mul(&self.s));
        match next {
            Ok(m) => {
                self.current = m.clone();
                Some(Ok(m))
            }
            Err(e) => {
                self.remaining = 0;
                Some(Err(e))
            }
        }
    }
}

pub fn conjugated_observable_sequence(
    h: &HamiltonianModel,
    spec: &FormulaSpec,
    o: &DenseOperator,
) -> Result<ConjugatedObservables> {
    if !o.is_hermitian(1e-10) {
        let dev = o.sub(&o.adjoint())?.frobenius();
        return Err(CoreError::NotHermitian(dev));
    }
    let s = trotter_block(h, spec)?;
    Ok(ConjugatedObservables {
        s_dag: s.adjoint(),
        s,
        current: o.clone(),
        remaining: spec.r(),
    })
}

/// Leading term of the equivalent-Hamiltonian expansion, as a Hermitian
/// Pauli sum over the current evolution order (positions a < b below index
/// the order, not the storage slots):
///
///   order 1:  (t/2r) sum_{a<b} i [H_a, H_b]
///   order 2:  (t/r)^2/24 sum_{a<b} [H_a + 2 sum_{c>a} H_c, [H_a, H_b]]
///
/// Orders 4 and above have no closed leading term here.
pub fn leading_difference(h: &HamiltonianModel, spec: &FormulaSpec) -> Result<PauliSum> {
    let ordered: Vec<&PauliSum> = h.ordered_summands().collect();
    let l = ordered.len();
    let tau = spec.tau();
    let mut acc = PauliSum::new(h.n());
    match spec.order() {
        1 => {
            for a in 0..l {
                for b in (a + 1)..l {
                    acc = acc.add(&commutator_sum(ordered[a], ordered[b])?)?;
                }
            }
            Ok(acc.scale(Complex64::new(0.0, tau / 2.0)))
        }
        2 => {
            for a in 0..l {
                let mut outer = ordered[a].clone();
                for c in (a + 1)..l {
                    outer = outer.add(&ordered[c].scale(Complex64::new(2.0, 0.0)))?;
                }
                for b in (a + 1)..l {
                    let inner = commutator_sum(ordered[a], ordered[b])?;
                    acc = acc.add(&commutator_sum(&outer, &inner)?)?;
                }
            }
            Ok(acc.scale(Complex64::new(tau * tau / 24.0, 0.0)))
        }
        other => Err(CoreError::UnsupportedOrder(other)),
    }
}

/// The equivalent Hamiltonian H~ with e^{-i(t/r)H~} = S(t/r), extracted from
/// a single block so the principal log branch stays clear of +-pi. The flag
/// reports branch ambiguity from the log.
pub fn equivalent_hamiltonian_dense(
    h: &HamiltonianModel,
    spec: &FormulaSpec,
) -> Result<(DenseOperator, bool)> {
    let block = trotter_block(h, spec)?;
    let log = log_unitary_principal(&block)?;
    let scale = -1.0 / spec.tau();
    Ok((
        log.g.scale(Complex64::new(scale, 0.0)),
        log.branch_warning,
    ))
}
