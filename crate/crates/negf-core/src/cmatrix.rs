//! Dense complex matrices sized for junction models (a few hundred rows at
//! most): row-major storage, LU solves with partial pivoting, and a cyclic
//! Jacobi eigensolver for Hermitian matrices.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::Error;
use crate::fmath;
use crate::Result;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build from nested rows; all rows must share a length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = CMat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::DimensionMismatch("ragged rows".to_string()));
            }
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Ok(m)
    }

    /// Real-valued convenience constructor.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let wrapped: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        CMat::from_rows(&wrapped)
    }

    /// 1x1 matrix.
    pub fn scalar(z: Complex64) -> Self {
        let mut m = CMat::zeros(1, 1);
        m[(0, 0)] = z;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn conj_transpose(&self) -> CMat {
        let mut out = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn add(&self, other: &CMat) -> CMat {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= *b;
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> CMat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(
            self.cols, other.rows,
            "matmul: {}x{} times {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        fmath::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// ‖A − A†‖_F, zero for Hermitian matrices.
    pub fn hermiticity_defect(&self) -> f64 {
        self.sub(&self.conj_transpose()).frobenius_norm()
    }

    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian { defect, tol });
        }
        Ok(())
    }

    /// (A + A†)/2.
    pub fn hermitian_part(&self) -> CMat {
        self.add(&self.conj_transpose()).scale(Complex64::new(0.5, 0.0))
    }

    /// z·I − A.
    pub fn z_minus(&self, z: Complex64) -> CMat {
        debug_assert!(self.is_square());
        let mut out = self.scale(Complex64::new(-1.0, 0.0));
        for i in 0..self.rows {
            out[(i, i)] += z;
        }
        out
    }

    /// Solve A·X = B by LU with partial pivoting.
    pub fn solve(&self, b: &CMat) -> Result<CMat> {
        if !self.is_square() || self.rows != b.rows {
            return Err(Error::DimensionMismatch("solve shapes".to_string()));
        }
        let n = self.rows;
        let nrhs = b.cols;
        let mut lu = self.data.clone();
        let mut x = b.data.clone();
        let scale = self.frobenius_norm().max(1.0);

        for col in 0..n {
            // pivot search
            let mut pivot_row = col;
            let mut pivot_mag = lu[col * n + col].norm_sqr();
            for r in (col + 1)..n {
                let mag = lu[r * n + col].norm_sqr();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = r;
                }
            }
            if fmath::sqrt(pivot_mag) <= 1e-300 * scale {
                return Err(Error::SingularMatrix);
            }
            if pivot_row != col {
                for j in 0..n {
                    lu.swap(col * n + j, pivot_row * n + j);
                }
                for j in 0..nrhs {
                    x.swap(col * nrhs + j, pivot_row * nrhs + j);
                }
            }
            let pivot = lu[col * n + col];
            for r in (col + 1)..n {
                let factor = lu[r * n + col] / pivot;
                if factor.re == 0.0 && factor.im == 0.0 {
                    continue;
                }
                lu[r * n + col] = factor;
                for j in (col + 1)..n {
                    let sub = factor * lu[col * n + j];
                    lu[r * n + j] -= sub;
                }
                for j in 0..nrhs {
                    let sub = factor * x[col * nrhs + j];
                    x[r * nrhs + j] -= sub;
                }
            }
        }
        // back substitution
        for col in (0..n).rev() {
            let pivot = lu[col * n + col];
            for j in 0..nrhs {
                let mut acc = x[col * nrhs + j];
                for k in (col + 1)..n {
                    acc -= lu[col * n + k] * x[k * nrhs + j];
                }
                x[col * nrhs + j] = acc / pivot;
            }
        }
        Ok(CMat {
            rows: n,
            cols: nrhs,
            data: x,
        })
    }

    pub fn inverse(&self) -> Result<CMat> {
        self.solve(&CMat::identity(self.rows))
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues (ascending) and the unitary matrix of column
    /// eigenvectors. The input is symmetrized first; callers that need a
    /// loud Hermiticity failure should `check_hermitian` beforehand.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, CMat)> {
        assert!(self.is_square(), "hermitian_eigen needs a square matrix");
        let n = self.rows;
        if n == 0 {
            return Ok((Vec::new(), CMat::zeros(0, 0)));
        }
        let mut a = self.hermitian_part();
        let mut v = CMat::identity(n);
        let scale = a.frobenius_norm().max(1e-300);
        let tol = 1e-15 * scale;
        let max_sweeps = 60;

        let mut off = off_diag_norm(&a);
        let mut sweep = 0;
        while off > tol && sweep < max_sweeps {
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    let mag = apq.norm();
                    if mag <= tol / (n as f64) {
                        continue;
                    }
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let phi = fmath::atan2(apq.im, apq.re);
                    let tau = (aqq - app) / (2.0 * mag);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + fmath::hypot(1.0, tau))
                    } else {
                        -1.0 / (-tau + fmath::hypot(1.0, tau))
                    };
                    let c = 1.0 / fmath::hypot(1.0, t);
                    let s = t * c;
                    // Unitary plane rotation U: U[p][p]=c, U[p][q]=s,
                    // U[q][p]=-s·e^{-iφ}, U[q][q]=c·e^{-iφ}; A ← U†AU.
                    let e_neg = Complex64::new(fmath::cos(phi), -fmath::sin(phi));
                    let e_pos = e_neg.conj();
                    // column update B = A·U
                    for i in 0..n {
                        let aip = a[(i, p)];
                        let aiq = a[(i, q)];
                        a[(i, p)] = aip * c - aiq * (s * e_neg);
                        a[(i, q)] = aip * s + aiq * (c * e_neg);
                    }
                    // row update A ← U†·B
                    for j in 0..n {
                        let apj = a[(p, j)];
                        let aqj = a[(q, j)];
                        a[(p, j)] = apj * c - aqj * (s * e_pos);
                        a[(q, j)] = apj * s + aqj * (c * e_pos);
                    }
                    // eigenvector accumulation V ← V·U
                    for i in 0..n {
                        let vip = v[(i, p)];
                        let viq = v[(i, q)];
                        v[(i, p)] = vip * c - viq * (s * e_neg);
                        v[(i, q)] = vip * s + viq * (c * e_neg);
                    }
                }
            }
            off = off_diag_norm(&a);
            sweep += 1;
        }
        if off > tol.max(1e-11 * scale) {
            return Err(Error::EigenNotConverged { off_norm: off });
        }

        let mut order: Vec<usize> = (0..n).collect();
        let evals: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
        order.sort_by(|&i, &j| evals[i].partial_cmp(&evals[j]).unwrap());
        let sorted: Vec<f64> = order.iter().map(|&i| evals[i]).collect();
        let mut vs = CMat::zeros(n, n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for i in 0..n {
                vs[(i, new_col)] = v[(i, old_col)];
            }
        }
        Ok((sorted, vs))
    }

    /// Eigenvalues only, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.hermitian_eigen()?.0)
    }

    /// Square root of a Hermitian positive-semidefinite matrix via spectral
    /// decomposition. Eigenvalues in `[-psd_tol, 0)` are clamped to zero;
    /// anything lower is an error.
    pub fn psd_sqrt(&self, psd_tol: f64) -> Result<CMat> {
        let (evals, vecs) = self.hermitian_eigen()?;
        let mut scaled = CMat::zeros(self.rows, self.rows);
        for (k, &lambda) in evals.iter().enumerate() {
            if lambda < -psd_tol {
                return Err(Error::NotPositiveSemidefinite {
                    min_eigenvalue: lambda,
                    tol: psd_tol,
                });
            }
            let root = fmath::sqrt(lambda.max(0.0));
            for i in 0..self.rows {
                scaled[(i, k)] = vecs[(i, k)] * root;
            }
        }
        Ok(scaled.matmul(&vecs.conj_transpose()))
    }
}

fn off_diag_norm(a: &CMat) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    fmath::sqrt(acc)
}

impl core::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solve_against_known_inverse() {
        let a = CMat::from_rows(&[
            vec![c(2.0, 0.0), c(1.0, 1.0)],
            vec![c(1.0, -1.0), c(3.0, 0.0)],
        ])
        .unwrap();
        let inv = a.inverse().unwrap();
        let prod = a.matmul(&inv);
        assert!(prod.sub(&CMat::identity(2)).frobenius_norm() < 1e-13);
    }

    #[test]
    fn solve_singular_is_loud() {
        let a = CMat::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(a.inverse(), Err(Error::SingularMatrix)));
    }

    #[test]
    fn lu_solves_random_systems() {
        // deterministic pseudo-random fill
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        for n in [1usize, 2, 3, 5, 8] {
            let mut a = CMat::zeros(n, n);
            let mut xt = CMat::zeros(n, 1);
            for i in 0..n {
                xt[(i, 0)] = c(next(), next());
                for j in 0..n {
                    a[(i, j)] = c(next(), next());
                }
                a[(i, i)] += c(2.0, 0.0); // keep well-conditioned
            }
            let b = a.matmul(&xt);
            let x = a.solve(&b).unwrap();
            assert!(x.sub(&xt).frobenius_norm() < 1e-11);
        }
    }

    #[test]
    fn hermitian_eigen_2x2_closed_form() {
        // [[1, i],[-i, 1]] has eigenvalues 0 and 2
        let a = CMat::from_rows(&[vec![c(1.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(1.0, 0.0)]])
            .unwrap();
        let (evals, vecs) = a.hermitian_eigen().unwrap();
        assert_abs_diff_eq!(evals[0], 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(evals[1], 2.0, epsilon = 1e-13);
        // reconstruct A = V diag V†
        let mut lam = CMat::zeros(2, 2);
        lam[(0, 0)] = c(evals[0], 0.0);
        lam[(1, 1)] = c(evals[1], 0.0);
        let rec = vecs.matmul(&lam).matmul(&vecs.conj_transpose());
        assert!(rec.sub(&a).frobenius_norm() < 1e-12);
    }

    #[test]
    fn hermitian_eigen_reconstructs_random_matrices() {
        let mut state = 42u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        for n in [1usize, 3, 6, 10] {
            let mut a = CMat::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    a[(i, j)] = c(next(), next());
                }
            }
            let h = a.hermitian_part();
            let (evals, vecs) = h.hermitian_eigen().unwrap();
            let mut lam = CMat::zeros(n, n);
            for i in 0..n {
                lam[(i, i)] = c(evals[i], 0.0);
            }
            let rec = vecs.matmul(&lam).matmul(&vecs.conj_transpose());
            assert!(rec.sub(&h).frobenius_norm() < 1e-11 * (1.0 + h.frobenius_norm()));
            // unitarity
            let vv = vecs.conj_transpose().matmul(&vecs);
            assert!(vv.sub(&CMat::identity(n)).frobenius_norm() < 1e-11);
            // ascending order
            for w in evals.windows(2) {
                assert!(w[0] <= w[1] + 1e-14);
            }
        }
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let b = CMat::from_rows(&[
            vec![c(1.0, 0.0), c(0.4, 0.2)],
            vec![c(0.2, 0.3), c(0.5, 0.0)],
        ])
        .unwrap();
        let psd = b.matmul(&b.conj_transpose()); // guaranteed PSD
        let root = psd.psd_sqrt(1e-10).unwrap();
        let sq = root.matmul(&root);
        assert!(sq.sub(&psd).frobenius_norm() < 1e-12);
        assert!(root.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn psd_sqrt_rejects_indefinite() {
        let a = CMat::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        assert!(matches!(
            a.psd_sqrt(1e-10),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }
}
