//! Spectral, trace, and Frobenius norms, plus a warm-started power-iteration
//! estimator used by the high-volume cost loops.
//!
//! The three named norms resolve singular values through the Jacobi
//! eigensolver and honor a 1e-10 relative accuracy contract. The power
//! iterator trades a little accuracy for speed and is only used where a
//! caller explicitly opts in; it reports failure instead of degrading
//! silently so callers can fall back to the exact path.

use crate::dense::DenseOperator;
use crate::eig::herm_eig;
use crate::rng::SplitMix64;
use crate::Result;
use num_complex::Complex64;

/// How far from (anti-)Hermitian a matrix may be while still using the
/// single-eigensolve fast path.
const SYMMETRY_TOL: f64 = 1e-10;

fn hermitian_eigvals(a: &DenseOperator) -> Result<Vec<f64>> {
    let (vals, _) = herm_eig(a)?;
    Ok(vals)
}

/// Singular values of A, ascending.
fn singular_values(a: &DenseOperator) -> Result<Vec<f64>> {
    let fro = a.frobenius();
    if fro == 0.0 {
        return Ok(vec![0.0; a.dim()]);
    }
    if a.is_hermitian(SYMMETRY_TOL) {
        let mut v = hermitian_eigvals(a)?;
        for x in v.iter_mut() {
            *x = x.abs();
        }
        v.sort_by(f64::total_cmp);
        return Ok(v);
    }
    // Anti-Hermitian fast path: iA is Hermitian with the same singular values.
    let anti_dev = a.add(&a.adjoint())?.frobenius();
    if anti_dev <= SYMMETRY_TOL * fro.max(1.0) {
        let ia = a.scale(Complex64::new(0.0, 1.0));
        let mut v = hermitian_eigvals(&ia)?;
        for x in v.iter_mut() {
            *x = x.abs();
        }
        v.sort_by(f64::total_cmp);
        return Ok(v);
    }
    let gram = a.adjoint().mul(a)?;
    let vals = hermitian_eigvals(&gram)?;
    Ok(vals.into_iter().map(|x| x.max(0.0).sqrt()).collect())
}

/// Largest singular value.
pub fn spectral_norm(a: &DenseOperator) -> Result<f64> {
    let sv = singular_values(a)?;
    Ok(*sv.last().expect("nonzero dimension"))
}

/// Sum of singular values (Schatten 1-norm).
pub fn trace_norm(a: &DenseOperator) -> Result<f64> {
    Ok(singular_values(a)?.iter().sum())
}

/// Root sum of squared entries.
pub fn frobenius_norm(a: &DenseOperator) -> f64 {
    a.frobenius()
}

/// Warm-started power iteration for the spectral norm of a Hermitian operator
/// given only as a matvec. Iterates on H^2 so the paired +-lambda spectra of
/// commutators cannot stall it; keeps its vector across calls because
/// consecutive operators in the cost loops are close to one another.
pub struct WarmSpectralNorm {
    v: Vec<Complex64>,
    scratch: Vec<Complex64>,
    scratch2: Vec<Complex64>,
}

impl WarmSpectralNorm {
    pub fn new(dim: usize) -> Self {
        let mut rng = SplitMix64::new(0x57a7_ab1e_5eed);
        let mut v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.next_open_pm1(), rng.next_open_pm1()))
            .collect();
        let norm = vec_norm(&v);
        for x in v.iter_mut() {
            *x /= norm;
        }
        WarmSpectralNorm {
            v,
            scratch: vec![Complex64::new(0.0, 0.0); dim],
            scratch2: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    /// Largest |eigenvalue| of the Hermitian operator behind `apply`, or None
    /// when the iteration hits the cap without settling (caller falls back).
    pub fn estimate<F>(&mut self, mut apply: F) -> Option<f64>
    where
        F: FnMut(&[Complex64], &mut [Complex64]),
    {
        let mut prev = -1.0f64;
        for _ in 0..300 {
            apply(&self.v, &mut self.scratch);
            apply(&self.scratch, &mut self.scratch2);
            // <v, H^2 v> = |Hv|^2 for unit v.
            let mu: f64 = self
                .scratch
                .iter()
                .map(|x| x.norm_sqr())
                .sum::<f64>()
                .max(0.0);
            let est = mu.sqrt();
            let wnorm = vec_norm(&self.scratch2);
            if wnorm <= f64::MIN_POSITIVE {
                // Operator annihilates the vector: top eigenvalue 0 from this
                // start; treat as converged zero.
                return Some(0.0);
            }
            for (v, w) in self.v.iter_mut().zip(self.scratch2.iter()) {
                *v = w / wnorm;
            }
            if (est - prev).abs() <= 1e-12 * est.max(1e-300) {
                return Some(est);
            }
            prev = est;
        }
        None
    }
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
