//! Dense Hermitian eigensolvers.
//!
//! [`lowest_eigenpairs`] is the production path (Householder/QR via nalgebra). [`jacobi_eigenvalues`]
//! is an independent cyclic-Jacobi implementation kept as a cross-check.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// All eigenvalues (ascending) and the matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let real = m.iter().all(|v| v.im == 0.0);
    let (values, vectors): (Vec<f64>, Vec<Vec<Complex64>>) = if real {
        let r = m.map(|v| v.re);
        let eig = SymmetricEigen::new(r);
        let vecs = (0..eig.eigenvalues.len())
            .map(|k| eig.eigenvectors.column(k).iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        (eig.eigenvalues.iter().copied().collect(), vecs)
    } else {
        let eig = SymmetricEigen::new(m.clone());
        let vecs = (0..eig.eigenvalues.len())
            .map(|k| eig.eigenvectors.column(k).iter().copied().collect())
            .collect();
        (eig.eigenvalues.iter().copied().collect(), vecs)
    };
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    (
        order.iter().map(|&k| values[k]).collect(),
        order.into_iter().map(|k| vectors[k].clone()).collect(),
    )
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "matrix must be square");
    let mut a = m.clone();
    let scale = a.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut values: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Jacobi eigenvalues of a complex Hermitian matrix via the real embedding
/// `[[Re, -Im], [Im, Re]]`, which doubles every eigenvalue's multiplicity.
pub fn jacobi_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let n = m.nrows();
    if m.iter().all(|v| v.im == 0.0) {
        return jacobi_symmetric_eigenvalues(&m.map(|v| v.re));
    }
    let mut big = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let v = m[(i, j)];
            big[(i, j)] = v.re;
            big[(i + n, j + n)] = v.re;
            big[(i, j + n)] = -v.im;
            big[(i + n, j)] = v.im;
        }
    }
    jacobi_symmetric_eigenvalues(&big).into_iter().step_by(2).collect()
}
