//! Dense matrices of Pauli strings and the two-qubit coupling model.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const I1: Complex64 = Complex64::new(0.0, 1.0);

fn single(op: char) -> Result<[[Complex64; 2]; 2]> {
    Ok(match op.to_ascii_uppercase() {
        'I' => [[C1, C0], [C0, C1]],
        'X' => [[C0, C1], [C1, C0]],
        'Y' => [[C0, -I1], [I1, C0]],
        'Z' => [[C1, C0], [C0, -C1]],
        other => return Err(Error::Argument(format!("unknown Pauli operator '{other}'"))),
    })
}

/// Matrix of a Pauli string; character `q` acts on qubit `q` (little-endian,
/// so `"XZ"` is `Z_1 (x) X_0`).
pub fn pauli_string(ops: &str) -> Result<CMatrix> {
    let factors = ops.chars().map(single).collect::<Result<Vec<_>>>()?;
    if factors.is_empty() {
        return Err(Error::Argument("empty Pauli string".into()));
    }
    let dim = 1usize << factors.len();
    Ok(CMatrix::from_fn(dim, dim, |r, c| {
        factors
            .iter()
            .enumerate()
            .fold(C1, |acc, (q, m)| acc * m[(r >> q) & 1][(c >> q) & 1])
    }))
}

/// Weighted sum of Pauli strings of equal length.
pub fn pauli_sum(terms: &[(f64, &str)]) -> Result<CMatrix> {
    let mut iter = terms.iter();
    let (w, s) = iter
        .next()
        .ok_or_else(|| Error::Argument("empty Pauli sum".into()))?;
    let mut acc = pauli_string(s)? * Complex64::new(*w, 0.0);
    for (w, s) in iter {
        let m = pauli_string(s)?;
        if m.nrows() != acc.nrows() {
            return Err(Error::Argument("Pauli strings differ in length".into()));
        }
        acc += m * Complex64::new(*w, 0.0);
    }
    Ok(acc)
}

/// `a (X0 Z1 + Y0 Z1) + b (Z0 X1 + Z0 Y1)`.
pub fn two_qubit_coupling(a: f64, b: f64) -> CMatrix {
    pauli_sum(&[(a, "XZ"), (a, "YZ"), (b, "ZX"), (b, "ZY")]).expect("fixed Pauli strings")
}
