//! Small dense linear algebra, generic over the AD scalar.
//!
//! Dimensions here are tiny (chart dimension ≤ 8, spinor dimension ≤ 32), so
//! everything is plain row-major `Vec` storage with unblocked algorithms.
//! Pivot decisions compare stripped values, which keeps elimination valid on
//! dual numbers. Eigen decompositions are `f64`-only; no identity check ever
//! differentiates through one.

use crate::ad::Real;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is numerically singular (pivot {pivot:.3e})")]
    Singular { pivot: f64 },
    #[error("rank-deficient column set in Gram-Schmidt (column {col}, norm {norm:.3e})")]
    RankDeficient { col: usize, norm: f64 },
}

/// Dense row-major matrix.
#[derive(Clone, Debug)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            a: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c);
            m.a[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
    }

    /// Lift an `f64` matrix into any scalar level.
    pub fn lift(src: &Mat<f64>) -> Self {
        Mat {
            rows: src.rows,
            cols: src.cols,
            a: src.a.iter().map(|&x| T::from_f64(x)).collect(),
        }
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[T]) {
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        let mut m = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let s = self[(i, k)];
                for j in 0..o.cols {
                    m[(i, j)] += s * o[(k, j)];
                }
            }
        }
        m
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![T::zero(); self.rows];
        for i in 0..self.rows {
            let mut s = T::zero();
            for j in 0..self.cols {
                s += self[(i, j)] * v[j];
            }
            out[i] = s;
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + o[(i, j)])
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - o[(i, j)])
    }

    pub fn scale(&self, c: T) -> Self {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * c)
    }

    pub fn scalef(&self, c: f64) -> Self {
        self.scale(T::from_f64(c))
    }

    /// Symmetrize a square matrix: (M + Mᵀ)/2.
    pub fn symmetrized(&self) -> Self {
        assert_eq!(self.rows, self.cols);
        Mat::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)]).mulf(0.5)
        })
    }

    pub fn trace(&self) -> T {
        assert_eq!(self.rows, self.cols);
        let mut s = T::zero();
        for i in 0..self.rows {
            s += self[(i, i)];
        }
        s
    }

    /// Max of |entry values|; residual-style norm used by the checkers.
    pub fn max_abs(&self) -> f64 {
        self.a.iter().map(|x| x.value().abs()).fold(0.0, f64::max)
    }

    /// Strip derivative parts.
    pub fn values(&self) -> Mat<f64> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            a: self.a.iter().map(|x| x.value()).collect(),
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.a[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.a[i * self.cols + j]
    }
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len());
    let mut s = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        s += x * y;
    }
    s
}

pub fn norm_sq<T: Real>(a: &[T]) -> T {
    dot(a, a)
}

pub fn norm<T: Real>(a: &[T]) -> T {
    norm_sq(a).sqrt()
}

pub fn axpy<T: Real>(y: &mut [T], c: T, x: &[T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += c * xi;
    }
}

pub fn sub_vec<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add_vec<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn scale_vec<T: Real>(a: &[T], c: T) -> Vec<T> {
    a.iter().map(|&x| x * c).collect()
}

/// Max |value| over a slice of scalars.
pub fn max_abs<T: Real>(a: &[T]) -> f64 {
    a.iter().map(|x| x.value().abs()).fold(0.0, f64::max)
}

/// Solve A X = B by Gaussian elimination with partial (value) pivoting.
pub fn gauss_solve<T: Real>(a: &Mat<T>, b: &Mat<T>) -> Result<Mat<T>, LinalgError> {
    assert_eq!(a.rows, a.cols);
    assert_eq!(a.rows, b.rows);
    let n = a.rows;
    let mut m = a.clone();
    let mut x = b.clone();
    for c in 0..n {
        let (piv, pval) = (c..n)
            .map(|r| (r, m[(r, c)].value().abs()))
            .max_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        if pval < 1e-300 {
            return Err(LinalgError::Singular { pivot: pval });
        }
        if piv != c {
            for j in 0..n {
                m.a.swap(piv * n + j, c * n + j);
            }
            for j in 0..x.cols {
                x.a.swap(piv * x.cols + j, c * x.cols + j);
            }
        }
        let inv = T::one() / m[(c, c)];
        for r in (c + 1)..n {
            let f = m[(r, c)] * inv;
            for j in c..n {
                let v = m[(c, j)];
                m[(r, j)] -= f * v;
            }
            for j in 0..x.cols {
                let v = x[(c, j)];
                x[(r, j)] -= f * v;
            }
        }
    }
    for c in (0..n).rev() {
        let inv = T::one() / m[(c, c)];
        for j in 0..x.cols {
            let mut s = x[(c, j)];
            for k in (c + 1)..n {
                s -= m[(c, k)] * x[(k, j)];
            }
            x[(c, j)] = s * inv;
        }
    }
    Ok(x)
}

pub fn solve_vec<T: Real>(a: &Mat<T>, b: &[T]) -> Result<Vec<T>, LinalgError> {
    let bm = Mat {
        rows: b.len(),
        cols: 1,
        a: b.to_vec(),
    };
    Ok(gauss_solve(a, &bm)?.a)
}

/// Determinant by LU with partial pivoting.
pub fn det<T: Real>(a: &Mat<T>) -> T {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut m = a.clone();
    let mut sign = 1.0;
    let mut d = T::one();
    for c in 0..n {
        let (piv, pval) = (c..n)
            .map(|r| (r, m[(r, c)].value().abs()))
            .max_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        if pval == 0.0 {
            return T::zero();
        }
        if piv != c {
            sign = -sign;
            for j in 0..n {
                m.a.swap(piv * n + j, c * n + j);
            }
        }
        d = d * m[(c, c)];
        let inv = T::one() / m[(c, c)];
        for r in (c + 1)..n {
            let f = m[(r, c)] * inv;
            for j in c..n {
                let v = m[(c, j)];
                m[(r, j)] -= f * v;
            }
        }
    }
    d.mulf(sign)
}

/// Thin QR by modified Gram-Schmidt: `a` (m×k, m ≥ k) = Q R with Q
/// orthonormal columns and R upper triangular with positive diagonal.
pub fn qr_mgs<T: Real>(a: &Mat<T>) -> Result<(Mat<T>, Mat<T>), LinalgError> {
    let (m, k) = (a.rows, a.cols);
    assert!(m >= k);
    let mut q = a.clone();
    let mut r = Mat::<T>::zeros(k, k);
    for j in 0..k {
        let mut v = q.col(j);
        for i in 0..j {
            let qi = q.col(i);
            let proj = dot(&qi, &v);
            r[(i, j)] = proj;
            axpy(&mut v, -proj, &qi);
        }
        // second orthogonalization pass for numerical hygiene
        for i in 0..j {
            let qi = q.col(i);
            let proj = dot(&qi, &v);
            r[(i, j)] += proj;
            axpy(&mut v, -proj, &qi);
        }
        let nrm = norm(&v);
        if nrm.value() < 1e-10 {
            return Err(LinalgError::RankDeficient {
                col: j,
                norm: nrm.value(),
            });
        }
        r[(j, j)] = nrm;
        let inv = T::one() / nrm;
        q.set_col(j, &scale_vec(&v, inv));
    }
    Ok((q, r))
}

/// Inverse of an upper triangular matrix by back substitution.
pub fn upper_tri_inverse<T: Real>(r: &Mat<T>) -> Mat<T> {
    assert_eq!(r.rows, r.cols);
    let n = r.rows;
    let mut inv = Mat::<T>::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = T::one() / r[(j, j)];
        for i in (0..j).rev() {
            let mut s = T::zero();
            for k in (i + 1)..=j {
                s += r[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / r[(i, i)];
        }
    }
    inv
}

/// Unit normal to the column span of `tangents` ((n+1)×n, orthonormal
/// columns), oriented so that det[t_1, ..., t_n, normal] > 0.
///
/// Built by orthogonalizing a probe basis vector against the columns. The
/// normal is canonical, so the probe choice only matters for conditioning;
/// the probe with the largest out-of-span residual always has residual
/// ≥ 1/(n+1). LU determinants are avoided on dual numbers here because a
/// value-singular minor silently drops derivative parts.
pub fn oriented_unit_normal<T: Real>(tangents: &Mat<T>) -> Vec<T> {
    let m = tangents.rows;
    let n = tangents.cols;
    assert_eq!(m, n + 1);
    let mut beta = 0;
    let mut best = -1.0;
    for b in 0..m {
        let mut proj = 0.0;
        for i in 0..n {
            let v = tangents[(b, i)].value();
            proj += v * v;
        }
        if 1.0 - proj > best {
            best = 1.0 - proj;
            beta = b;
        }
    }
    let mut v = vec![T::zero(); m];
    v[beta] = T::one();
    for _pass in 0..2 {
        for i in 0..n {
            let qi = tangents.col(i);
            let proj = dot(&qi, &v);
            axpy(&mut v, -proj, &qi);
        }
    }
    let inv = T::one() / norm(&v);
    let mut v = scale_vec(&v, inv);
    let full = Mat::from_fn(m, m, |r, c| {
        if c < n {
            tangents[(r, c)].value()
        } else {
            v[r].value()
        }
    });
    if det(&full) < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
    v
}

/// Eigen decomposition of a symmetric `f64` matrix by cyclic Jacobi.
///
/// Returns eigenvalues in ascending order with matching orthonormal
/// eigenvector columns.
pub fn sym_eigen(a: &Mat<f64>) -> (Vec<f64>, Mat<f64>) {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut m = a.clone();
    let mut v = Mat::<f64>::identity(n);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)] * m[(p, q)];
            }
        }
        if off < 1e-28 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let vals: Vec<f64> = order.iter().map(|&i| m[(i, i)]).collect();
    let vecs = Mat::from_fn(n, n, |i, j| v[(i, order[j])]);
    (vals, vecs)
}

/// Orthonormal basis of the (approximate) nullspace of `a`, via the
/// eigenvectors of aᵀa whose eigenvalue is below `tol`.
pub fn nullspace(a: &Mat<f64>, tol: f64) -> Vec<Vec<f64>> {
    let ata = a.transpose().matmul(a);
    let (vals, vecs) = sym_eigen(&ata);
    let mut basis = Vec::new();
    for (j, &lam) in vals.iter().enumerate() {
        if lam < tol {
            basis.push(vecs.col(j));
        }
    }
    basis
}

/// Least squares solution of A x = b via normal equations (full-rank A).
pub fn lstsq(a: &Mat<f64>, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let at = a.transpose();
    let ata = at.matmul(a);
    let atb = at.matvec(b);
    solve_vec(&ata, &atb)
}

/// Seeded random special orthogonal matrix (QR of a splitmix64 matrix with
/// the determinant sign fixed); deterministic across runs.
pub fn seeded_rotation(n: usize, seed: u64) -> Mat<f64> {
    let mut state = seed.wrapping_add(0x9E3779B97F4A7C15);
    let mut next = move || {
        state = state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z = z ^ (z >> 31);
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let raw = Mat::from_fn(n, n, |_, _| next());
    let (mut q, _) = qr_mgs(&raw).expect("random matrix is full rank");
    if det(&q) < 0.0 {
        let flipped: Vec<f64> = q.col(0).iter().map(|x| -x).collect();
        q.set_col(0, &flipped);
    }
    q
}
