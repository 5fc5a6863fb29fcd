//! Hermitian eigendecomposition, matrix exponential, and the principal
//! logarithm of a unitary.
//!
//! Everything is built on cyclic Jacobi rotations. Plain Hermitian input goes
//! through the classical one-matrix sweep. A unitary W is diagonalized via
//! joint Jacobi on the commuting Hermitian pair A = (W+W^)/2, B = (W-W^)/(2i);
//! the joint update (Cardoso-Souloumiac rotations) keeps mirrored eigenphase
//! pairs (cos equal, sin opposite) cleanly separated where a single-matrix
//! pass would mix them.

use crate::dense::{DenseOperator, ZERO};
use crate::error::CoreError;
use crate::Result;
use num_complex::Complex64;

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix: A = Q diag(vals) Q^, eigenvalues
/// ascending, columns of Q the matching eigenvectors.
pub fn herm_eig(a: &DenseOperator) -> Result<(Vec<f64>, DenseOperator)> {
    if !a.is_hermitian(1e-10) {
        let dev = a.sub(&a.adjoint())?.frobenius();
        return Err(CoreError::NotHermitian(dev));
    }
    let d = a.dim();
    // Symmetrize so roundoff asymmetry cannot drift through the sweeps.
    let mut m = a.add(&a.adjoint())?.scale(Complex64::new(0.5, 0.0));
    let mut qt = DenseOperator::identity(d);
    let scale = m.frobenius();
    let skip = 1e-13 * scale.max(f64::MIN_POSITIVE) / d as f64;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = m.get(p, q);
                let b = apq.norm();
                if b <= skip {
                    continue;
                }
                rotated = true;
                let app = m.get(p, p).re;
                let aqq = m.get(q, q).re;
                let tau = (aqq - app) / (2.0 * b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let phase = apq / b;
                apply_classical_rotation(&mut m, &mut qt, p, q, c, s, phase);
                m.set(p, p, Complex64::new(app - t * b, 0.0));
                m.set(q, q, Complex64::new(aqq + t * b, 0.0));
                m.set(p, q, ZERO);
                m.set(q, p, ZERO);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(CoreError::Numerical(
            "Jacobi eigensolver did not converge".into(),
        ));
    }

    let vals: Vec<f64> = (0..d).map(|i| m.get(i, i).re).collect();
    let (vals, qt) = sort_by_key(vals, qt);
    Ok((vals, transpose(&qt)))
}

/// Rotation R with R[pp]=c, R[pq]=s*phase, R[qp]=-s*conj(phase), R[qq]=c:
/// M <- R^ M R, eigenvector accumulator (stored transposed) QT <- R^T QT.
/// Only rows p,q are recomputed; columns follow from Hermiticity.
fn apply_classical_rotation(
    m: &mut DenseOperator,
    qt: &mut DenseOperator,
    p: usize,
    q: usize,
    c: f64,
    s: f64,
    phase: Complex64,
) {
    let d = m.dim();
    let se_pos = phase * s; // s e^{i phi}
    let se_neg = phase.conj() * s; // s e^{-i phi}
    let rp: Vec<Complex64> = (0..d).map(|j| m.get(p, j)).collect();
    let rq: Vec<Complex64> = (0..d).map(|j| m.get(q, j)).collect();
    for j in 0..d {
        m.set(p, j, rp[j] * c - se_pos * rq[j]);
        m.set(q, j, se_neg * rp[j] + rq[j] * c);
    }
    for i in 0..d {
        if i != p && i != q {
            m.set(i, p, m.get(p, i).conj());
            m.set(i, q, m.get(q, i).conj());
        }
    }
    let qp: Vec<Complex64> = (0..d).map(|j| qt.get(p, j)).collect();
    let qq: Vec<Complex64> = (0..d).map(|j| qt.get(q, j)).collect();
    for j in 0..d {
        qt.set(p, j, qp[j] * c - se_neg * qq[j]);
        qt.set(q, j, se_pos * qp[j] + qq[j] * c);
    }
}

fn transpose(qt: &DenseOperator) -> DenseOperator {
    let d = qt.dim();
    let mut out = DenseOperator::zeros(d);
    for i in 0..d {
        for j in 0..d {
            out.set(j, i, qt.get(i, j));
        }
    }
    out
}

fn sort_by_key(vals: Vec<f64>, qt: DenseOperator) -> (Vec<f64>, DenseOperator) {
    let d = vals.len();
    let mut idx: Vec<usize> = (0..d).collect();
    idx.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let sorted: Vec<f64> = idx.iter().map(|&i| vals[i]).collect();
    let mut out = DenseOperator::zeros(d);
    for (row, &i) in idx.iter().enumerate() {
        for j in 0..d {
            out.set(row, j, qt.get(i, j));
        }
    }
    (sorted, out)
}

/// e^{i scale H} for Hermitian H, via eigendecomposition.
pub fn exp_herm(h: &DenseOperator, scale: f64) -> Result<DenseOperator> {
    let (vals, q) = herm_eig(h)?;
    let d = h.dim();
    // Q diag(e^{i s lambda}) Q^
    let mut left = DenseOperator::zeros(d);
    for j in 0..d {
        let ph = Complex64::from_polar(1.0, scale * vals[j]);
        for i in 0..d {
            left.set(i, j, q.get(i, j) * ph);
        }
    }
    left.mul(&q.adjoint())
}

/// Result of a principal unitary logarithm.
pub struct PrincipalLog {
    /// Hermitian G with e^{iG} = W and eigenphases in (-pi, pi].
    pub g: DenseOperator,
    /// True when some eigenphase fell within 1e-12 of -pi and was mapped to
    /// +pi (the branch point is ambiguous there).
    pub branch_warning: bool,
}

/// Joint eigendecomposition of a unitary: W = Q diag(e^{i theta_j}) Q^ with
/// theta_j in (-pi, pi], sorted ascending. Also reports the branch warning.
pub fn unitary_eig(w: &DenseOperator) -> Result<(Vec<f64>, DenseOperator, bool)> {
    let d = w.dim();
    if !w.is_unitary(1e-10) {
        let dev = w
            .adjoint()
            .mul(w)?
            .sub(&DenseOperator::identity(d))?
            .frobenius();
        return Err(CoreError::NotUnitary(dev));
    }
    let wh = w.adjoint();
    let mut a = w.add(&wh)?.scale(Complex64::new(0.5, 0.0));
    let mut b = w.sub(&wh)?.scale(Complex64::new(0.0, -0.5));
    let mut qt = DenseOperator::identity(d);

    let scale = a.frobenius() + b.frobenius();
    let skip = 1e-13 * scale.max(f64::MIN_POSITIVE) / d as f64;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..d {
            for q in (p + 1)..d {
                if m_offdiag(&a, p, q) <= skip && m_offdiag(&b, p, q) <= skip {
                    continue;
                }
                let (c, s) = joint_rotation(&a, &b, p, q);
                if s.norm() <= 1e-15 {
                    continue;
                }
                rotated = true;
                apply_joint_rotation(&mut a, p, q, c, s);
                apply_joint_rotation(&mut b, p, q, c, s);
                // QT <- conj(G) QT for Q <- Q G^
                let qp: Vec<Complex64> = (0..d).map(|j| qt.get(p, j)).collect();
                let qq: Vec<Complex64> = (0..d).map(|j| qt.get(q, j)).collect();
                for j in 0..d {
                    qt.set(p, j, qp[j] * c + s * qq[j]);
                    qt.set(q, j, -s.conj() * qp[j] + qq[j] * c);
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(CoreError::Numerical(
            "joint Jacobi on unitary did not converge".into(),
        ));
    }

    let mut warn = false;
    let mut phases = Vec::with_capacity(d);
    for j in 0..d {
        let mut th = f64::atan2(b.get(j, j).re, a.get(j, j).re);
        // Phases within 1e-12 of the branch point are ambiguous: the sign of
        // a vanishing imaginary part decides between -pi and +pi. Normalize
        // onto +pi (keeping the (-pi, pi] contract) and flag the ambiguity.
        if th.abs() >= std::f64::consts::PI - 1e-12 {
            if th < 0.0 {
                th = std::f64::consts::PI;
            }
            warn = true;
        }
        phases.push(th);
    }
    let (phases, qt) = sort_by_key(phases, qt);
    let q = transpose(&qt);

    // Reconstruction guard: e^{i theta} must reproduce W.
    let mut left = DenseOperator::zeros(d);
    for j in 0..d {
        let ph = Complex64::from_polar(1.0, phases[j]);
        for i in 0..d {
            left.set(i, j, q.get(i, j) * ph);
        }
    }
    let resid = left.mul(&q.adjoint())?.sub(w)?.frobenius() / (d as f64).sqrt();
    if resid > 1e-9 {
        return Err(CoreError::Numerical(format!(
            "unitary eigendecomposition residual {resid:.3e}"
        )));
    }
    Ok((phases, q, warn))
}

fn m_offdiag(m: &DenseOperator, p: usize, q: usize) -> f64 {
    m.get(p, q).norm()
}

/// Cardoso-Souloumiac rotation for the Hermitian pair: the unit top
/// eigenvector [x,y,z] (x >= 0) of sum_M g g^T with
/// g = [Mpp-Mqq, 2 Re Mpq, 2 Im Mpq] gives c = sqrt((x+1)/2),
/// s = (y - iz)/(2c).
fn joint_rotation(a: &DenseOperator, b: &DenseOperator, p: usize, q: usize) -> (f64, Complex64) {
    let g = |m: &DenseOperator| -> [f64; 3] {
        let mpq = m.get(p, q);
        [
            m.get(p, p).re - m.get(q, q).re,
            2.0 * mpq.re,
            2.0 * mpq.im,
        ]
    };
    let ga = g(a);
    let gb = g(b);
    let mut sig = [[0.0f64; 3]; 3];
    for v in [ga, gb] {
        for i in 0..3 {
            for j in 0..3 {
                sig[i][j] += v[i] * v[j];
            }
        }
    }
    let mut v = sym3_top_eigenvector(&sig, &ga, &gb);
    if v[0] < 0.0 {
        v = [-v[0], -v[1], -v[2]];
    }
    let x = v[0].min(1.0);
    let c = ((x + 1.0) / 2.0).sqrt();
    let s = Complex64::new(v[1], -v[2]) / (2.0 * c);
    (c, s)
}

/// Top eigenvector of a symmetric PSD 3x3 matrix, analytic eigenvalue plus a
/// cross-product null-space basis; falls back to the dominant generator when
/// the top eigenspace is degenerate.
fn sym3_top_eigenvector(s: &[[f64; 3]; 3], ga: &[f64; 3], gb: &[f64; 3]) -> [f64; 3] {
    let norm3 = |v: &[f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let fallback = {
        let (na, nb) = (norm3(ga), norm3(gb));
        let g = if na >= nb { ga } else { gb };
        let n = norm3(g);
        if n <= f64::MIN_POSITIVE {
            [1.0, 0.0, 0.0]
        } else {
            [g[0] / n, g[1] / n, g[2] / n]
        }
    };
    let p1 = s[0][1] * s[0][1] + s[0][2] * s[0][2] + s[1][2] * s[1][2];
    let tr = s[0][0] + s[1][1] + s[2][2];
    let lmax = if p1 <= 0.0 {
        // Already diagonal.
        let mut k = 0;
        for i in 1..3 {
            if s[i][i] > s[k][k] {
                k = i;
            }
        }
        let mut v = [0.0; 3];
        v[k] = 1.0;
        return v;
    } else {
        let qm = tr / 3.0;
        let p2 = (s[0][0] - qm).powi(2)
            + (s[1][1] - qm).powi(2)
            + (s[2][2] - qm).powi(2)
            + 2.0 * p1;
        let pp = (p2 / 6.0).sqrt();
        let det = |m: &[[f64; 3]; 3]| -> f64 {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let mut bm = *s;
        for i in 0..3 {
            for j in 0..3 {
                bm[i][j] = (bm[i][j] - if i == j { qm } else { 0.0 }) / pp;
            }
        }
        let r = (det(&bm) / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        qm + 2.0 * pp * phi.cos()
    };
    // Null space of S - lmax I via cross products of its columns.
    let col = |j: usize| [s[0][j] - if j == 0 { lmax } else { 0.0 },
                          s[1][j] - if j == 1 { lmax } else { 0.0 },
                          s[2][j] - if j == 2 { lmax } else { 0.0 }];
    let (c0, c1, c2) = (col(0), col(1), col(2));
    let cross = |u: &[f64; 3], w: &[f64; 3]| {
        [
            u[1] * w[2] - u[2] * w[1],
            u[2] * w[0] - u[0] * w[2],
            u[0] * w[1] - u[1] * w[0],
        ]
    };
    let candidates = [cross(&c0, &c1), cross(&c0, &c2), cross(&c1, &c2)];
    let mut best = candidates[0];
    for c in &candidates[1..] {
        if norm3(c) > norm3(&best) {
            best = *c;
        }
    }
    let n = norm3(&best);
    let scale = s.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max);
    if n <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return fallback;
    }
    [best[0] / n, best[1] / n, best[2] / n]
}

/// M <- G M G^ for G[pp]=c, G[pq]=conj(s), G[qp]=-s, G[qq]=c, exploiting
/// Hermiticity for the column half of the update.
fn apply_joint_rotation(m: &mut DenseOperator, p: usize, q: usize, c: f64, s: Complex64) {
    let d = m.dim();
    let mpp = m.get(p, p);
    let mpq = m.get(p, q);
    let mqp = m.get(q, p);
    let mqq = m.get(q, q);
    let rp: Vec<Complex64> = (0..d).map(|j| m.get(p, j)).collect();
    let rq: Vec<Complex64> = (0..d).map(|j| m.get(q, j)).collect();
    for j in 0..d {
        m.set(p, j, rp[j] * c + s.conj() * rq[j]);
        m.set(q, j, -s * rp[j] + rq[j] * c);
    }
    for i in 0..d {
        if i != p && i != q {
            m.set(i, p, m.get(p, i).conj());
            m.set(i, q, m.get(q, i).conj());
        }
    }
    // 2x2 block of G [mpp mpq; mqp mqq] G^, diagonal forced real.
    let t11 = mpp * c + s.conj() * mqp;
    let t12 = mpq * c + s.conj() * mqq;
    let t21 = -s * mpp + mqp * c;
    let t22 = -s * mpq + mqq * c;
    let n11 = t11 * c + t12 * s;
    let n12 = -t11 * s.conj() + t12 * c;
    let n21 = t21 * c + t22 * s;
    let n22 = -t21 * s.conj() + t22 * c;
    m.set(p, p, Complex64::new(n11.re, 0.0));
    m.set(p, q, n12);
    m.set(q, p, n21);
    m.set(q, q, Complex64::new(n22.re, 0.0));
}

/// Principal logarithm: Hermitian G with e^{iG} = W, eigenphases in
/// (-pi, pi]; phases within 1e-12 of -pi map to +pi with a warning.
pub fn log_unitary_principal(w: &DenseOperator) -> Result<PrincipalLog> {
    let (phases, q, branch_warning) = unitary_eig(w)?;
    let d = w.dim();
    let mut left = DenseOperator::zeros(d);
    for j in 0..d {
        for i in 0..d {
            left.set(i, j, q.get(i, j) * phases[j]);
        }
    }
    let g = left.mul(&q.adjoint())?;
    // Hermitize to kill roundoff asymmetry.
    let g = g.add(&g.adjoint())?.scale(Complex64::new(0.5, 0.0));
    Ok(PrincipalLog { g, branch_warning })
}
