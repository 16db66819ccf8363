//! Small dense linear-algebra helpers on top of nalgebra.

use faer::complex_native::c64;
use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Uses faer; nalgebra's `SymmetricEigen` is unreliable on strongly
/// degenerate spectra, which the free ring produces.
pub fn eigh(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    let a = faer::Mat::<c64>::from_fn(n, n, |i, j| c64::new(m[(i, j)].re, m[(i, j)].im));
    let evd = a.selfadjoint_eigendecomposition(faer::Side::Lower);
    let s = evd.s().column_vector();
    let u = evd.u();
    sorted(
        n,
        |k| s.read(k).re,
        |i, j| {
            let z = u.read(i, j);
            C64::new(z.re, z.im)
        },
    )
}

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
pub fn eigh_real(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let a = faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)]);
    let evd = a.selfadjoint_eigendecomposition(faer::Side::Lower);
    let s = evd.s().column_vector();
    let u = evd.u();
    sorted(n, |k| s.read(k), |i, j| u.read(i, j))
}

fn sorted<T: nalgebra::Scalar>(
    n: usize,
    value: impl Fn(usize) -> f64,
    vector: impl Fn(usize, usize) -> T,
) -> (Vec<f64>, DMatrix<T>) {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| value(a).total_cmp(&value(b)));
    let values = order.iter().map(|&k| value(k)).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| vector(i, order[j]));
    (values, vectors)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn eigvalsh(m: &DMatrix<C64>) -> Vec<f64> {
    eigh(&hermitian_part(m)).0
}

pub fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Largest entrywise modulus of `m − m†`.
pub fn hermiticity_error(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut err: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            err = err.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    err
}

pub fn trace(m: &DMatrix<C64>) -> C64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// `Tr(a b)` without forming the product.
pub fn trace_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// `a b` for a complex `a` and a real `b`, via two real products.
pub fn mul_complex_real(a: &DMatrix<C64>, b: &DMatrix<f64>) -> DMatrix<C64> {
    let re = a.map(|z| z.re) * b;
    let im = a.map(|z| z.im) * b;
    DMatrix::from_fn(a.nrows(), b.ncols(), |i, j| {
        C64::new(re[(i, j)], im[(i, j)])
    })
}

/// `a b` for a real `a` and a complex `b`, via two real products.
pub fn mul_real_complex(a: &DMatrix<f64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let re = a * b.map(|z| z.re);
    let im = a * b.map(|z| z.im);
    DMatrix::from_fn(a.nrows(), b.ncols(), |i, j| {
        C64::new(re[(i, j)], im[(i, j)])
    })
}

/// Complex product through real GEMMs; nalgebra's generic complex product is slow.
pub fn mul_complex(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let (ar, ai) = (a.map(|z| z.re), a.map(|z| z.im));
    let (br, bi) = (b.map(|z| z.re), b.map(|z| z.im));
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    DMatrix::from_fn(a.nrows(), b.ncols(), |i, j| {
        C64::new(re[(i, j)], im[(i, j)])
    })
}

/// Kronecker product.
pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

pub mod pauli {
    use super::*;

    pub fn id() -> DMatrix<C64> {
        DMatrix::identity(2, 2)
    }

    pub fn x() -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn y() -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
    }

    pub fn z() -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }

    /// `|↓⟩⟨↑|` in the basis `{|↑⟩, |↓⟩}`.
    pub fn lower() -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO])
    }

    /// `|↑⟩⟨↓|`.
    pub fn raise() -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])
    }

    /// Pauli matrix by axis index 0..=3 (identity, x, y, z).
    pub fn by_index(k: usize) -> DMatrix<C64> {
        match k {
            0 => id(),
            1 => x(),
            2 => y(),
            3 => z(),
            _ => panic!("pauli index {k} out of range"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_sorts_and_reconstructs() {
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[
                C64::new(2.0, 0.0),
                C64::new(0.0, 1.0),
                ZERO,
                C64::new(0.0, -1.0),
                C64::new(-1.0, 0.0),
                C64::new(0.5, 0.5),
                ZERO,
                C64::new(0.5, -0.5),
                C64::new(0.3, 0.0),
            ],
        );
        let (vals, vecs) = eigh(&m);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            3,
            vals.iter().map(|&v| C64::new(v, 0.0)),
        ));
        let back = &vecs * d * vecs.adjoint();
        assert!((back - m).norm() < 1e-12);
    }

    #[test]
    fn degenerate_spectrum_reconstructs() {
        // eightfold-degenerate levels, as in the field-free ring
        let n = 32;
        let mut q = DMatrix::from_fn(n, n, |i, j| {
            ((i * 7 + j * 3) % 11) as f64 - 5.0 + if i == j { 20.0 } else { 0.0 }
        });
        q = q.qr().q();
        let levels: Vec<f64> = (0..n).map(|k| [-2.0, -0.5, 0.5, 2.0][k / 8]).collect();
        let m = &q
            * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(levels.clone()))
            * q.transpose();
        let m = (&m + m.transpose()) * 0.5;
        let (vals, vecs) = eigh_real(&m);
        let back =
            &vecs * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vals)) * vecs.transpose();
        assert!((back - m).norm() < 1e-12);
    }

    #[test]
    fn real_gemm_products_agree() {
        let a = DMatrix::from_fn(4, 3, |i, j| {
            C64::new(i as f64 - j as f64, (i * j) as f64 * 0.3)
        });
        let b = DMatrix::from_fn(3, 5, |i, j| C64::new(0.1 * (i + j) as f64, 1.0 - j as f64));
        assert!((mul_complex(&a, &b) - &a * &b).norm() < 1e-12);
        let br = b.map(|z| z.re);
        assert!((mul_complex_real(&a, &br) - &a * br.map(|x| C64::new(x, 0.0))).norm() < 1e-12);
    }
}
