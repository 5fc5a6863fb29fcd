//! Hamiltonian models: an ordered list of Hermitian summands plus the
//! evolution order, with a plain-text file format and the built-in model
//! families used by the experiments.
//!
//! File format ('#' starts a comment to end of line):
//!
//! ```text
//! n 2
//! summand couplings
//! term 0.5 XX
//! term -0.25 ZZ
//! summand field
//! term 1.0 IX
//! ```
//!
//! The `n` header is optional; when absent the qubit count is inferred from
//! the first term's word length. Words read right to left: the rightmost
//! character is qubit 0.

use crate::error::CoreError;
use crate::pauli::{PauliString, PauliSum};
use crate::rng::SplitMix64;
use crate::Result;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianModel {
    n: usize,
    labels: Vec<String>,
    summands: Vec<PauliSum>,
    /// Evolution order: position p holds the 0-based summand index applied
    /// p-th. Reported 1-based in user-facing output.
    order: Vec<usize>,
}

impl HamiltonianModel {
    pub fn new(parts: Vec<(String, PauliSum)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(CoreError::InvalidArgument(
                "a model needs at least one summand".into(),
            ));
        }
        let n = parts[0].1.n();
        let mut labels = Vec::with_capacity(parts.len());
        let mut summands = Vec::with_capacity(parts.len());
        for (label, sum) in parts {
            if sum.n() != n {
                return Err(CoreError::DimensionMismatch(n, sum.n()));
            }
            if !sum.is_hermitian(1e-12) {
                return Err(CoreError::InvalidArgument(format!(
                    "summand '{label}' is not Hermitian"
                )));
            }
            let label = label.trim().to_string();
            if label.is_empty() || label.contains('#') || label.contains('\n') {
                return Err(CoreError::InvalidArgument(format!(
                    "invalid summand label '{label}'"
                )));
            }
            labels.push(label);
            summands.push(sum);
        }
        let order = (0..summands.len()).collect();
        Ok(HamiltonianModel { n, labels, summands, order })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of summands L.
    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn summands(&self) -> &[PauliSum] {
        &self.summands
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn summand(&self, j: usize) -> &PauliSum {
        &self.summands[j]
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Replaces the evolution order; `order[p]` is the summand applied p-th.
    pub fn with_order(mut self, order: Vec<usize>) -> Result<Self> {
        let l = self.summands.len();
        if order.len() != l {
            return Err(CoreError::InvalidPermutation(format!(
                "order has {} entries for {} summands",
                order.len(),
                l
            )));
        }
        let mut seen = vec![false; l];
        for &j in &order {
            if j >= l || seen[j] {
                return Err(CoreError::InvalidPermutation(format!(
                    "index {j} out of range or repeated"
                )));
            }
            seen[j] = true;
        }
        self.order = order;
        Ok(self)
    }

    /// Summands in evolution order (first applied first).
    pub fn ordered_summands(&self) -> impl Iterator<Item = &PauliSum> {
        self.order.iter().map(move |&j| &self.summands[j])
    }

    /// The full Hamiltonian as one sum.
    pub fn total(&self) -> PauliSum {
        let mut acc = PauliSum::new(self.n);
        for s in &self.summands {
            acc = acc.add(s).expect("consistent n");
        }
        acc
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> CoreError {
    CoreError::Parse { line, msg: msg.into() }
}

pub fn parse_hamiltonian(text: &str) -> Result<HamiltonianModel> {
    struct RawSummand {
        label: String,
        line: usize,
        terms: Vec<(f64, String, usize)>,
    }
    let mut declared_n: Option<usize> = None;
    let mut raws: Vec<RawSummand> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next().unwrap() {
            "n" => {
                if declared_n.is_some() {
                    return Err(parse_err(line_no, "duplicate n header"));
                }
                if !raws.is_empty() {
                    return Err(parse_err(line_no, "n header must precede summands"));
                }
                let v = tokens
                    .next()
                    .ok_or_else(|| parse_err(line_no, "n header needs a value"))?;
                if tokens.next().is_some() {
                    return Err(parse_err(line_no, "trailing tokens after n"));
                }
                let v: usize = v
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad qubit count '{v}'")))?;
                if !(1..=63).contains(&v) {
                    return Err(parse_err(line_no, "qubit count must be in 1..=63"));
                }
                declared_n = Some(v);
            }
            "summand" => {
                if let Some(prev) = raws.last() {
                    if prev.terms.is_empty() {
                        return Err(parse_err(prev.line, "summand has no terms"));
                    }
                }
                let label = line["summand".len()..].trim().to_string();
                if label.is_empty() {
                    return Err(parse_err(line_no, "summand needs a label"));
                }
                raws.push(RawSummand { label, line: line_no, terms: Vec::new() });
            }
            "term" => {
                let current = raws
                    .last_mut()
                    .ok_or_else(|| parse_err(line_no, "term before any summand"))?;
                let coeff = tokens
                    .next()
                    .ok_or_else(|| parse_err(line_no, "term needs a coefficient"))?;
                let word = tokens
                    .next()
                    .ok_or_else(|| parse_err(line_no, "term needs a Pauli word"))?;
                if tokens.next().is_some() {
                    return Err(parse_err(line_no, "trailing tokens after term"));
                }
                let coeff: f64 = coeff
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad coefficient '{coeff}'")))?;
                if !coeff.is_finite() {
                    return Err(parse_err(
                        line_no,
                        "coefficient must be finite real (Hermitian summand)",
                    ));
                }
                if let Some(bad) = word.chars().find(|c| !matches!(c, 'I' | 'X' | 'Y' | 'Z')) {
                    return Err(parse_err(line_no, format!("bad Pauli character '{bad}'")));
                }
                current.terms.push((coeff, word.to_string(), line_no));
            }
            other => {
                return Err(parse_err(line_no, format!("unknown directive '{other}'")));
            }
        }
    }
    if let Some(prev) = raws.last() {
        if prev.terms.is_empty() {
            return Err(parse_err(prev.line, "summand has no terms"));
        }
    }
    if raws.is_empty() {
        return Err(parse_err(text.lines().count().max(1), "no summands in file"));
    }
    let n = match declared_n {
        Some(v) => v,
        None => raws[0].terms[0].1.chars().count(),
    };
    if !(1..=63).contains(&n) {
        return Err(parse_err(raws[0].terms[0].2, "qubit count must be in 1..=63"));
    }

    let mut parts = Vec::with_capacity(raws.len());
    for raw in raws {
        let mut sum = PauliSum::new(n);
        for (coeff, word, line_no) in raw.terms {
            if word.chars().count() != n {
                return Err(parse_err(
                    line_no,
                    format!("word '{word}' has {} characters, expected {n}", word.chars().count()),
                ));
            }
            let p = PauliString::from_word(&word)
                .map_err(|e| parse_err(line_no, e.to_string()))?;
            sum.add_term(p, Complex64::new(coeff, 0.0))
                .map_err(|e| parse_err(line_no, e.to_string()))?;
        }
        parts.push((raw.label, sum));
    }
    HamiltonianModel::new(parts)
}

/// Inverse of `parse_hamiltonian` up to comments and whitespace; coefficients
/// use the shortest decimal that round-trips, so parse(serialize(m)) == m.
pub fn serialize_hamiltonian(model: &HamiltonianModel) -> String {
    let mut out = String::new();
    out.push_str(&format!("n {}\n", model.n()));
    for (label, sum) in model.labels().iter().zip(model.summands()) {
        out.push_str(&format!("summand {label}\n"));
        for (p, c) in sum.terms() {
            out.push_str(&format!("term {} {}\n", c.re, p));
        }
    }
    out
}

/// The 4-qubit, 15-summand molecular hydrogen Hamiltonian (STO-3G basis,
/// qubit form), one Pauli term per summand. Qubit 0 is the rightmost word
/// character.
pub fn build_hydrogen_sto3g() -> HamiltonianModel {
    const TERMS: [(f64, &str); 15] = [
        (-0.81262, "IIII"),
        (0.17120, "IIIZ"),
        (0.17120, "IIZI"),
        (-0.22279, "IZII"),
        (-0.22279, "ZIII"),
        (0.16862, "IIZZ"),
        (0.12054, "IZIZ"),
        (0.16587, "ZIIZ"),
        (0.16587, "IZZI"),
        (0.12054, "ZIZI"),
        (0.17435, "ZZII"),
        (-0.04532, "YYXX"),
        (0.04532, "XYYX"),
        (0.04532, "YXXY"),
        (-0.04532, "XXYY"),
    ];
    let parts = TERMS
        .iter()
        .map(|&(c, w)| (w.to_string(), PauliSum::from_word(c, w).expect("valid word")))
        .collect();
    HamiltonianModel::new(parts).expect("static table is valid")
}

/// Heisenberg chain split by coupling axis: H1 = sum X_j X_{j+1},
/// H2 = sum Y_j Y_{j+1}, H3 = sum Z_j Z_{j+1} + sum h_j Z_j with the h_j
/// drawn uniformly from (-1, 1) by the seeded generator. Open boundary.
pub fn build_heisenberg_xyz(n: usize, seed: u64) -> Result<HamiltonianModel> {
    if n < 2 {
        return Err(CoreError::InvalidArgument(
            "Heisenberg chain needs n >= 2".into(),
        ));
    }
    if n > 63 {
        return Err(CoreError::InvalidArgument("qubit count must be <= 63".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let mut h1 = PauliSum::new(n);
    let mut h2 = PauliSum::new(n);
    let mut h3 = PauliSum::new(n);
    let one = Complex64::new(1.0, 0.0);
    for j in 0..n - 1 {
        let bond = (1u64 << j) | (1u64 << (j + 1));
        h1.add_term(PauliString::new(n, bond, 0)?, one)?;
        h2.add_term(PauliString::new(n, bond, bond)?, one)?;
        h3.add_term(PauliString::new(n, 0, bond)?, one)?;
    }
    for j in 0..n {
        let h_j = rng.next_open_pm1();
        h3.add_term(PauliString::new(n, 0, 1u64 << j)?, Complex64::new(h_j, 0.0))?;
    }
    HamiltonianModel::new(vec![
        ("XX".into(), h1),
        ("YY".into(), h2),
        ("ZZ".into(), h3),
    ])
}

/// Transverse-field Ising model in two parts: H1 = sum J_ij Z_i Z_j (the
/// diagonal part) and H2 = sum h_j X_j.
pub fn build_transverse_ising(
    n: usize,
    couplings: &[(usize, usize, f64)],
    fields: &[f64],
) -> Result<HamiltonianModel> {
    if n == 0 || n > 63 {
        return Err(CoreError::InvalidArgument("qubit count must be in 1..=63".into()));
    }
    if fields.len() != n {
        return Err(CoreError::InvalidArgument(format!(
            "expected {n} field values, got {}",
            fields.len()
        )));
    }
    let mut h1 = PauliSum::new(n);
    let mut h2 = PauliSum::new(n);
    for &(i, j, v) in couplings {
        if i >= n || j >= n {
            return Err(CoreError::InvalidArgument(format!(
                "coupling ({i},{j}) out of range for n={n}"
            )));
        }
        if i == j {
            return Err(CoreError::InvalidArgument(format!(
                "coupling indices must differ, got ({i},{j})"
            )));
        }
        let mask = (1u64 << i) | (1u64 << j);
        h1.add_term(PauliString::new(n, 0, mask)?, Complex64::new(v, 0.0))?;
    }
    for (j, &h_j) in fields.iter().enumerate() {
        h2.add_term(PauliString::new(n, 1u64 << j, 0)?, Complex64::new(h_j, 0.0))?;
    }
    HamiltonianModel::new(vec![("ZZ".into(), h1), ("X".into(), h2)])
}

/// Normalized uniform-Z observable (I + 0.1 sum_j Z_j) / (1 + 0.1 n); the
/// normalizer is the largest eigenvalue, attained on the all-zeros state, so
/// the result has spectral norm 1.
pub fn build_observable_z_uniform(n: usize) -> Result<PauliSum> {
    if n == 0 || n > 63 {
        return Err(CoreError::InvalidArgument("qubit count must be in 1..=63".into()));
    }
    let c = 1.0 + 0.1 * n as f64;
    let mut o = PauliSum::new(n);
    o.add_term(PauliString::identity(n), Complex64::new(1.0 / c, 0.0))?;
    for j in 0..n {
        o.add_term(PauliString::new(n, 0, 1u64 << j)?, Complex64::new(0.1 / c, 0.0))?;
    }
    Ok(o)
}
