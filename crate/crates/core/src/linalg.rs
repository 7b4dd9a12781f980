//! Small dense complex linear algebra: matrix exponential and a general
//! eigenvalue routine.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub const MAX_DENSE_DIM: usize = 64;

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Exponential of a square complex matrix by scaling-and-squaring with a
/// degree-13 Padé kernel (Higham 2005). No eigendecomposition is used, so
/// defective inputs are handled like any other.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    if n == 1 {
        return CMatrix::from_element(1, 1, a[(0, 0)].exp());
    }

    let norm = one_norm(a);
    // theta_13 from Higham's Table 2.3
    const THETA_13: f64 = 5.371_920_351_148_152;
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * Complex64::new(2f64.powi(-squarings), 0.0);
    let mut result = pade13(&scaled);
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

fn pade13(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let b = |k: usize| Complex64::new(PADE13[k], 0.0);
    let ident = CMatrix::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9))
        + &a6 * b(7)
        + &a4 * b(5)
        + &a2 * b(3)
        + &ident * b(1);
    let u = a * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8))
        + &a6 * b(6)
        + &a4 * b(4)
        + &a2 * b(2)
        + &ident * b(0);

    let p = &v + &u;
    let q = &v - &u;
    // Q is well conditioned for ||A|| <= theta_13
    q.lu()
        .solve(&p)
        .expect("Pade denominator is nonsingular after scaling")
}

pub fn one_norm(a: &CMatrix) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Frobenius norm.
pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest element of `|A - A^dagger|`.
pub fn hermiticity_error(a: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// All eigenvalues of a general complex matrix via a complex Schur form.
///
/// Eigenvalues come back in Schur diagonal order; use [`spectrum_distance`]
/// to compare spectra.
pub fn eigenvalues_dense(a: &CMatrix) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Argument(format!(
            "eigenvalues need a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if n > MAX_DENSE_DIM {
        return Err(Error::Argument(format!(
            "dense eigensolver limited to dim <= {MAX_DENSE_DIM}, got {n}"
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let max_iter = 1000 * n;
    let schur = Schur::try_new(a.clone(), f64::EPSILON, max_iter).ok_or(Error::NoConvergence {
        what: "Schur QR iteration",
        iterations: max_iter,
    })?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Largest `|x_i - y_pi(i)|` under the best pairing `pi` of the two lists.
///
/// Pairing is exhaustive for up to eight values; longer lists fall back to
/// sorting by (real, imaginary).
pub fn spectrum_distance(x: &[Complex64], y: &[Complex64]) -> f64 {
    assert_eq!(x.len(), y.len(), "spectra differ in length");
    let n = x.len();
    if n == 0 {
        return 0.0;
    }
    if n > 8 {
        let mut xs = x.to_vec();
        let mut ys = y.to_vec();
        let key = |a: &Complex64, b: &Complex64| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im));
        xs.sort_by(key);
        ys.sort_by(key);
        return xs
            .iter()
            .zip(&ys)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    permute(&mut perm, 0, &mut |p| {
        let d = p
            .iter()
            .enumerate()
            .map(|(i, &j)| (x[i] - y[j]).norm())
            .fold(0.0, f64::max);
        best = best.min(d);
    });
    best
}

fn permute(p: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

/// Smallest diameter (largest pairwise distance) over all `order`-subsets of
/// `values`. With `order == 2` this is the minimal pairwise gap.
pub fn min_cluster_diameter(values: &[Complex64], order: usize) -> f64 {
    assert!(order >= 2 && order <= values.len(), "invalid cluster order");
    let mut best = f64::INFINITY;
    let mut idx: Vec<usize> = (0..order).collect();
    loop {
        let mut diam = 0.0f64;
        for a in 0..order {
            for b in a + 1..order {
                diam = diam.max((values[idx[a]] - values[idx[b]]).norm());
            }
        }
        best = best.min(diam);
        // next combination
        let n = values.len();
        let mut i = order;
        while i > 0 && idx[i - 1] == n - order + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..order {
            idx[j] = idx[j - 1] + 1;
        }
    }
    best
}

/// `M * v` for a dense matrix and an amplitude slice.
pub fn mat_vec(m: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).fold(C0, |acc, j| acc + m[(i, j)] * v[j]))
        .collect()
}
