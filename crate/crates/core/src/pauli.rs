//! Symbolic n-qubit Pauli algebra on symplectic bit masks.
//!
//! A string is stored as a pair of masks (x, z); bit q refers to qubit q and
//! qubit 0 is the rightmost character of a textual word. The operator encoded
//! by the masks is i^{|x & z|} X^x Z^z, which makes the single-qubit letters
//! come out as the usual X, Y, Z without per-site bookkeeping.

use crate::error::CoreError;
use crate::{Result, PRUNE_TOL};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

/// One Pauli string. Ordering (x, then z) only fixes map iteration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    x: u64,
    z: u64,
    n: u8,
}

const I_POW: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

impl PauliString {
    pub fn new(n: usize, x: u64, z: u64) -> Result<Self> {
        if n == 0 || n > 63 {
            return Err(CoreError::InvalidArgument(format!(
                "qubit count {n} outside 1..=63"
            )));
        }
        let mask = (1u64 << n) - 1;
        if x & !mask != 0 || z & !mask != 0 {
            return Err(CoreError::InvalidArgument(
                "mask has bits beyond qubit count".into(),
            ));
        }
        Ok(PauliString { x, z, n: n as u8 })
    }

    pub fn identity(n: usize) -> Self {
        PauliString::new(n, 0, 0).expect("valid qubit count")
    }

    /// Parse a textual word, rightmost character = qubit 0.
    pub fn from_word(word: &str) -> Result<Self> {
        let n = word.chars().count();
        if n == 0 || n > 63 {
            return Err(CoreError::InvalidArgument(format!(
                "word length {n} outside 1..=63"
            )));
        }
        let mut x = 0u64;
        let mut z = 0u64;
        for (i, ch) in word.chars().enumerate() {
            let q = n - 1 - i;
            match ch {
                'I' => {}
                'X' => x |= 1 << q,
                'Y' => {
                    x |= 1 << q;
                    z |= 1 << q;
                }
                'Z' => z |= 1 << q,
                other => {
                    return Err(CoreError::InvalidArgument(format!(
                        "invalid Pauli character '{other}'"
                    )))
                }
            }
        }
        Ok(PauliString { x, z, n: n as u8 })
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Weight = number of non-identity sites.
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in (0..self.n()).rev() {
            let xb = (self.x >> q) & 1;
            let zb = (self.z >> q) & 1;
            let ch = match (xb, zb) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (1, 1) => 'Y',
                (0, 1) => 'Z',
                _ => unreachable!(),
            };
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}

/// Product of two strings: matrix(p) * matrix(q) = phase * matrix(result).
///
/// With P(x,z) = i^{|x&z|} X^x Z^z, commuting Z^{z1} past X^{x2} yields
/// (-1)^{|z1&x2|}, and re-normalizing the result contributes
/// i^{|x1&z1| + |x2&z2| - |x3&z3|}.
pub fn pauli_mul(p: PauliString, q: PauliString) -> Result<(Complex64, PauliString)> {
    if p.n != q.n {
        return Err(CoreError::DimensionMismatch(p.n(), q.n()));
    }
    let x3 = p.x ^ q.x;
    let z3 = p.z ^ q.z;
    let k = (p.x & p.z).count_ones() + (q.x & q.z).count_ones() + 2 * (p.z & q.x).count_ones();
    let k = (k + 4 * 16 - (x3 & z3).count_ones()) % 4;
    Ok((
        I_POW[k as usize],
        PauliString {
            x: x3,
            z: z3,
            n: p.n,
        },
    ))
}

/// True iff the two strings commute: symplectic form <p.x,q.z> + <p.z,q.x>
/// is even.
pub fn strings_commute(p: PauliString, q: PauliString) -> Result<bool> {
    if p.n != q.n {
        return Err(CoreError::DimensionMismatch(p.n(), q.n()));
    }
    Ok(((p.x & q.z).count_ones() + (p.z & q.x).count_ones()) % 2 == 0)
}

/// Weighted sum of Pauli strings with complex coefficients.
///
/// Terms live in a BTreeMap so iteration order (and therefore every derived
/// floating-point reduction) is deterministic. Coefficients with magnitude
/// at most PRUNE_TOL are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliSum {
    pub fn new(n: usize) -> Self {
        PauliSum {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(n: usize, it: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, Complex64)>,
    {
        let mut s = PauliSum::new(n);
        for (p, c) in it {
            s.add_term(p, c)?;
        }
        Ok(s)
    }

    /// Single real-coefficient term given as a textual word.
    pub fn from_word(coeff: f64, word: &str) -> Result<Self> {
        let p = PauliString::from_word(word)?;
        PauliSum::from_terms(p.n(), [(p, Complex64::new(coeff, 0.0))])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, p: &PauliString) -> Complex64 {
        self.terms
            .get(p)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn add_term(&mut self, p: PauliString, c: Complex64) -> Result<()> {
        if p.n() != self.n {
            return Err(CoreError::DimensionMismatch(p.n(), self.n));
        }
        let entry = self.terms.entry(p).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if entry.norm() <= PRUNE_TOL {
            self.terms.remove(&p);
        }
        Ok(())
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        if self.n != other.n {
            return Err(CoreError::DimensionMismatch(self.n, other.n));
        }
        let mut out = self.clone();
        for (p, c) in other.terms() {
            out.add_term(*p, *c)?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> PauliSum {
        let mut out = PauliSum::new(self.n);
        for (p, c) in self.terms() {
            let v = c * s;
            if v.norm() > PRUNE_TOL {
                out.terms.insert(*p, v);
            }
        }
        out
    }

    /// True iff every coefficient is real to within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    /// Largest coefficient magnitude; zero for the empty sum.
    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm from Pauli orthogonality: ||sum c_P P||_F^2 = 2^n sum |c_P|^2.
    pub fn frobenius_norm(&self) -> f64 {
        let s: f64 = self.terms.values().map(|c| c.norm_sqr()).sum();
        (s * (1u64 << self.n) as f64).sqrt()
    }
}

/// [a, b] = ab - ba as a PauliSum; commuting term pairs are skipped via the
/// symplectic test and survivors contribute 2 c_a c_b phase(ab).
pub fn commutator_sum(a: &PauliSum, b: &PauliSum) -> Result<PauliSum> {
    if a.n() != b.n() {
        return Err(CoreError::DimensionMismatch(a.n(), b.n()));
    }
    let mut out = PauliSum::new(a.n());
    for (pa, ca) in a.terms() {
        for (pb, cb) in b.terms() {
            if strings_commute(*pa, *pb)? {
                continue;
            }
            let (phase, prod) = pauli_mul(*pa, *pb)?;
            out.add_term(prod, 2.0 * ca * cb * phase)?;
        }
    }
    Ok(out)
}
