//! Minimal-norm solve of [H, iM] = H' for Hermitian H, H'.
//!
//! Vectorized, the equation reads (I x H - H^T x I) vect(iM) = vect(H').
//! Materializing that Kronecker operator costs 4^n x 4^n memory, so the solve
//! happens in H's eigenbasis instead, where it is entrywise:
//! (lambda_k - lambda_l) (iM^)_{kl} = (H'^)_{kl}. Entries whose eigenvalue gap
//! is below tolerance take the minimal-norm choice 0 and feed the residual.

use crate::dense::DenseOperator;
use crate::eig::herm_eig;
use crate::error::CoreError;
use crate::Result;
use num_complex::Complex64;

/// Gap threshold relative to the spectral norm of H below which an eigenvalue
/// pair counts as degenerate.
const GAP_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SylvesterSolution {
    /// Hermitian minimal-Frobenius-norm M.
    pub m: DenseOperator,
    /// Frobenius mass of H' in the unreachable (degenerate-gap) directions.
    pub residual: f64,
    /// True when the residual is negligible against H', i.e. an exact M
    /// exists.
    pub exists: bool,
}

pub fn solve_sylvester_for_m(
    h: &DenseOperator,
    hp: &DenseOperator,
) -> Result<SylvesterSolution> {
    if h.dim() != hp.dim() {
        return Err(CoreError::DimensionMismatch(h.dim(), hp.dim()));
    }
    if !hp.is_hermitian(1e-10) {
        let dev = hp.sub(&hp.adjoint())?.frobenius();
        return Err(CoreError::NotHermitian(dev));
    }
    let d = h.dim();
    let (vals, q) = herm_eig(h)?;
    let hph = q.adjoint().mul(hp)?.mul(&q)?;
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = GAP_TOL * scale;

    let mut im_hat = DenseOperator::zeros(d);
    let mut residual_sq = 0.0;
    for k in 0..d {
        for l in 0..d {
            let gap = vals[k] - vals[l];
            if gap.abs() <= tol {
                residual_sq += hph.get(k, l).norm_sqr();
            } else {
                im_hat.set(k, l, hph.get(k, l) / gap);
            }
        }
    }
    // M^ = -i (iM^); transform back and Hermitize.
    let m_hat = im_hat.scale(Complex64::new(0.0, -1.0));
    let m = q.mul(&m_hat)?.mul(&q.adjoint())?;
    let m = m.add(&m.adjoint())?.scale(Complex64::new(0.5, 0.0));
    let residual = residual_sq.sqrt();
    let exists = residual <= 1e-8 * hp.frobenius();
    Ok(SylvesterSolution { m, residual, exists })
}
