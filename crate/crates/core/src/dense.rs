//! Dense complex operators on 2^n-dimensional Hilbert spaces.
//!
//! Row-major storage; no sparsity. Dimensions stay at or below 2^10 by
//! design, so straightforward loops (with a cache-friendly i-k-j product)
//! are fast enough everywhere this crate is used.

use crate::error::CoreError;
use crate::pauli::PauliSum;
use crate::Result;
use num_complex::Complex64;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    a: Vec<Complex64>,
}

impl DenseOperator {
    pub fn zeros(dim: usize) -> Self {
        DenseOperator {
            dim,
            a: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = DenseOperator::zeros(dim);
        for i in 0..dim {
            m.a[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_rows(dim: usize, a: Vec<Complex64>) -> Result<Self> {
        if a.len() != dim * dim {
            return Err(CoreError::InvalidArgument(format!(
                "entry count {} does not match dim {}",
                a.len(),
                dim
            )));
        }
        Ok(DenseOperator { dim, a })
    }

    /// Dense matrix of a Pauli sum: P(x,z)|b> = i^{|x&z|} (-1)^{|z&b|} |b^x>.
    pub fn from_pauli_sum(s: &PauliSum) -> Self {
        let n = s.n();
        let dim = 1usize << n;
        let mut m = DenseOperator::zeros(dim);
        for (p, c) in s.terms() {
            let x = p.x_mask();
            let z = p.z_mask();
            let phase = [ONE, Complex64::new(0.0, 1.0), -ONE, Complex64::new(0.0, -1.0)]
                [((x & z).count_ones() % 4) as usize];
            for b in 0..dim as u64 {
                let sign = if ((z & b).count_ones()) % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                let row = (b ^ x) as usize;
                m.a[row * dim + b as usize] += c * phase * sign;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.a
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.a[i * self.dim + j] = v;
    }

    pub fn add(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_dim(other)?;
        let a = self
            .a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| x + y)
            .collect();
        Ok(DenseOperator { dim: self.dim, a })
    }

    pub fn sub(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_dim(other)?;
        let a = self
            .a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| x - y)
            .collect();
        Ok(DenseOperator { dim: self.dim, a })
    }

    pub fn scale(&self, s: Complex64) -> DenseOperator {
        DenseOperator {
            dim: self.dim,
            a: self.a.iter().map(|x| x * s).collect(),
        }
    }

    pub fn adjoint(&self) -> DenseOperator {
        let d = self.dim;
        let mut out = DenseOperator::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.a[j * d + i] = self.a[i * d + j].conj();
            }
        }
        out
    }

    pub fn mul(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_dim(other)?;
        let d = self.dim;
        let mut out = DenseOperator::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let aik = self.a[i * d + k];
                if aik == ZERO {
                    continue;
                }
                let brow = &other.a[k * d..(k + 1) * d];
                let crow = &mut out.a[i * d..(i + 1) * d];
                for j in 0..d {
                    crow[j] += aik * brow[j];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        debug_assert_eq!(v.len(), d);
        debug_assert_eq!(out.len(), d);
        for i in 0..d {
            let row = &self.a[i * d..(i + 1) * d];
            let mut acc = ZERO;
            for j in 0..d {
                acc += row[j] * v[j];
            }
            out[i] = acc;
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.a[i * self.dim + i]).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.a.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Relative Frobenius deviation from A = A^dagger, with an absolute floor
    /// so the zero matrix counts as Hermitian.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let scale = self.frobenius().max(1.0);
        self.sub(&self.adjoint()).unwrap().frobenius() <= tol * scale
    }

    /// Relative Frobenius deviation of A^dagger A from the identity.
    pub fn is_unitary(&self, tol: f64) -> bool {
        let d = self.dim;
        let gram = self.adjoint().mul(self).unwrap();
        let dev = gram.sub(&DenseOperator::identity(d)).unwrap().frobenius();
        dev <= tol * (d as f64).sqrt().max(1.0)
    }

    fn check_dim(&self, other: &DenseOperator) -> Result<()> {
        if self.dim != other.dim {
            return Err(CoreError::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }
}

/// U A U^dagger.
pub fn conjugate(u: &DenseOperator, a: &DenseOperator) -> Result<DenseOperator> {
    u.mul(a)?.mul(&u.adjoint())
}

/// [A, B] = AB - BA.
pub fn commutator_dense(a: &DenseOperator, b: &DenseOperator) -> Result<DenseOperator> {
    a.mul(b)?.sub(&b.mul(a)?)
}

/// out = i(ab - ba), Hermitian whenever a and b are. Writes into the caller's
/// buffer so hot loops can evaluate many commutators without reallocating.
pub fn hermitian_commutator_into(
    a: &DenseOperator,
    b: &DenseOperator,
    out: &mut DenseOperator,
) -> Result<()> {
    a.check_dim(b)?;
    a.check_dim(out)?;
    let d = a.dim;
    out.a.fill(ZERO);
    for i in 0..d {
        for k in 0..d {
            let aik = a.a[i * d + k];
            let bik = b.a[i * d + k];
            let arow = &a.a[k * d..(k + 1) * d];
            let brow = &b.a[k * d..(k + 1) * d];
            let orow = &mut out.a[i * d..(i + 1) * d];
            for j in 0..d {
                orow[j] += aik * brow[j] - bik * arow[j];
            }
        }
    }
    for x in out.a.iter_mut() {
        *x = Complex64::new(0.0, 1.0) * *x;
    }
    Ok(())
}

/// Tr(O rho).real with the density matrix validated (Hermitian, unit trace,
/// PSD) and the imaginary residue asserted small.
pub fn expectation(o: &DenseOperator, rho: &DenseOperator) -> Result<f64> {
    validate_density_matrix(rho)?;
    if o.dim() != rho.dim() {
        return Err(CoreError::DimensionMismatch(o.dim(), rho.dim()));
    }
    let tr = o.mul(rho)?.trace();
    let scale = o.max_abs_entry().max(1.0);
    if tr.im.abs() > 1e-10 * scale {
        return Err(CoreError::Numerical(format!(
            "expectation has imaginary residue {:.3e}",
            tr.im
        )));
    }
    Ok(tr.re)
}

/// Checks Hermiticity, unit trace, and positive semidefiniteness (to 1e-10).
pub fn validate_density_matrix(rho: &DenseOperator) -> Result<()> {
    if !rho.is_hermitian(1e-10) {
        return Err(CoreError::InvalidDensityMatrix("not Hermitian".into()));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
        return Err(CoreError::InvalidDensityMatrix(format!(
            "trace {} != 1",
            tr.re
        )));
    }
    let (vals, _) = crate::eig::herm_eig(rho)?;
    if vals.first().copied().unwrap_or(0.0) < -1e-10 {
        return Err(CoreError::InvalidDensityMatrix(format!(
            "negative eigenvalue {:.3e}",
            vals[0]
        )));
    }
    Ok(())
}
