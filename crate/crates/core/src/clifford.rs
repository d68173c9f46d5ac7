//! Real representations of the Clifford algebras Cl_n, 2 ≤ n ≤ 8.
//!
//! Generators are built from the tensor-product construction over the Pauli
//! matrices: Hermitian anticommuting Γ_k with Γ_k² = +1 are assembled on
//! (C²)^⊗⌊n/2⌋, the spin generators are γ_k = i·Γ_k (so γ_k² = −1), and the
//! complex representation is then realified. Each γ_k is orthogonal and
//! skew-symmetric, which encodes the skew-adjointness of Clifford
//! multiplication with vectors.
//!
//! Dimension-specific structure:
//! - n even: the chirality operator (realified complex volume element)
//!   squares to +1 and splits the spinor space into half-spinor subspaces
//!   swapped by vectors. For n = 4, 8 it is ±(γ_1···γ_n); for n = 2, 6 the
//!   plain index-ordered product squares to −1 and the complex volume is the
//!   one that yields projectors.
//! - n = 3, 7: the index-ordered volume acts as ε·id; this build fixes
//!   representations with ε = +1, and records ε so dimension-3 consumers can
//!   assert their sign conventions.
//! - n = 5: the volume is a complex structure I commuting with vectors; J
//!   and K = I·J anticommute with I and with every γ_k, and are found by a
//!   deterministic nullspace solve.

use crate::ad::Real;
use crate::linalg::{self, Mat};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliffordError {
    #[error("spinor representation dimension {0} out of supported range 2..=8")]
    DimensionOutOfRange(usize),
    #[error("endomorphism is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("quaternionic structure solve failed: {0}")]
    QuaternionicSolve(String),
}

#[derive(Debug, Error)]
pub enum LiftError {
    #[error("rotation pivot {0:.3e} below threshold; point must be resampled")]
    PivotTooSmall(f64),
    #[error("matrix is not special orthogonal (reduction residual {0:.3e})")]
    NotSpecialOrthogonal(f64),
}

/// Real spinor-space dimension of the realified complex representation.
pub fn spinor_dim(n: usize) -> usize {
    1 << (n / 2 + 1)
}

// ---------------------------------------------------------------------------
// Complex matrices, used only during construction.
// ---------------------------------------------------------------------------

#[derive(Clone)]
struct CMat {
    n: usize,
    re: Mat<f64>,
    im: Mat<f64>,
}

impl CMat {
    fn identity(n: usize) -> Self {
        CMat {
            n,
            re: Mat::identity(n),
            im: Mat::zeros(n, n),
        }
    }

    fn pauli(k: usize) -> Self {
        let (re, im) = match k {
            1 => (vec![0.0, 1.0, 1.0, 0.0], vec![0.0; 4]),
            2 => (vec![0.0; 4], vec![0.0, -1.0, 1.0, 0.0]),
            3 => (vec![1.0, 0.0, 0.0, -1.0], vec![0.0; 4]),
            _ => unreachable!(),
        };
        CMat {
            n: 2,
            re: Mat {
                rows: 2,
                cols: 2,
                a: re,
            },
            im: Mat {
                rows: 2,
                cols: 2,
                a: im,
            },
        }
    }

    fn kron(&self, o: &CMat) -> CMat {
        let n = self.n * o.n;
        let mut re = Mat::zeros(n, n);
        let mut im = Mat::zeros(n, n);
        for i in 0..self.n {
            for j in 0..self.n {
                for p in 0..o.n {
                    for q in 0..o.n {
                        let (r, c) = (i * o.n + p, j * o.n + q);
                        re[(r, c)] =
                            self.re[(i, j)] * o.re[(p, q)] - self.im[(i, j)] * o.im[(p, q)];
                        im[(r, c)] =
                            self.re[(i, j)] * o.im[(p, q)] + self.im[(i, j)] * o.re[(p, q)];
                    }
                }
            }
        }
        CMat { n, re, im }
    }

    /// Multiply by the imaginary unit.
    fn times_i(&self) -> CMat {
        CMat {
            n: self.n,
            re: self.im.scalef(-1.0),
            im: self.re.clone(),
        }
    }

    /// Realification: z = u + iv acts on (u, v) stacked, giving
    /// [[Re, -Im], [Im, Re]].
    fn realify(&self) -> Mat<f64> {
        let n = self.n;
        Mat::from_fn(2 * n, 2 * n, |r, c| {
            let (ri, rb) = (r % n, r / n);
            let (ci, cb) = (c % n, c / n);
            match (rb, cb) {
                (0, 0) | (1, 1) => self.re[(ri, ci)],
                (0, 1) => -self.im[(ri, ci)],
                (1, 0) => self.im[(ri, ci)],
                _ => unreachable!(),
            }
        })
    }
}

/// Realified multiplication-by-i on the complex spinor space of dimension
/// `dc` (real dimension `2·dc`).
fn realified_i(dc: usize) -> Mat<f64> {
    CMat::identity(dc).times_i().realify()
}

// ---------------------------------------------------------------------------
// The representation.
// ---------------------------------------------------------------------------

/// How the representation was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepKind {
    /// Tensor-product construction; irreducible over C.
    Standard,
    /// Restriction of an ambient representation to a hypersurface:
    /// γ_i = Γ_i·Γ_{n+1} on the ambient spinor space.
    Induced { ambient_dim: usize },
}

/// The quaternionic triple of operators available in dimension 5.
#[derive(Clone, Debug)]
pub struct QuatTriple {
    /// Volume action; commutes with every γ_k.
    pub i_op: Mat<f64>,
    /// Anticommutes with I and with every γ_k.
    pub j_op: Mat<f64>,
    /// K = I·J.
    pub k_op: Mat<f64>,
}

/// A concrete real Clifford representation with its structure operators.
#[derive(Clone, Debug)]
pub struct CliffordRep {
    pub n: usize,
    /// Real spinor-space dimension.
    pub d: usize,
    /// One skew-symmetric orthogonal generator per frame vector.
    pub gammas: Vec<Mat<f64>>,
    /// Index-ordered product γ_1···γ_n.
    pub volume: Mat<f64>,
    /// n even: operator squaring to +1 whose ±1 eigenspaces are the
    /// half-spinor subspaces (realified complex volume).
    pub chirality: Option<Mat<f64>>,
    pub proj_plus: Option<Mat<f64>>,
    pub proj_minus: Option<Mat<f64>>,
    /// n = 3 or 7 (standard rep): sign ε with volume = ε·id.
    pub odd_volume_sign: Option<f64>,
    /// n = 5 (standard rep): the quaternionic triple.
    pub quat: Option<QuatTriple>,
    pub kind: RepKind,
}

/// Build the standard representation of Cl_n, 2 ≤ n ≤ 8.
///
/// Deterministic: the same matrices on every run.
pub fn build_clifford_rep(n: usize) -> Result<CliffordRep, CliffordError> {
    if !(2..=8).contains(&n) {
        return Err(CliffordError::DimensionOutOfRange(n));
    }
    let m = n / 2;
    let mut gammas = Vec::with_capacity(n);
    for k in 1..=n {
        let mut factors = Vec::new();
        if k <= 2 * m {
            let blk = k.div_ceil(2);
            for _ in 1..blk {
                factors.push(CMat::pauli(3));
            }
            factors.push(CMat::pauli(if k % 2 == 1 { 1 } else { 2 }));
            for _ in blk..m {
                factors.push(CMat::identity(2));
            }
        } else {
            for _ in 0..m {
                factors.push(CMat::pauli(3));
            }
        }
        let hermitian = factors
            .into_iter()
            .reduce(|a, b| a.kron(&b))
            .expect("n >= 2 yields at least one factor");
        gammas.push(hermitian.times_i().realify());
    }
    finish_rep(n, gammas, RepKind::Standard)
}

/// Restrict an ambient representation to the hypersurface Clifford action
/// γ_i := Γ_i·Γ_{n+1} on the same spinor space.
pub fn induced_rep(ambient: &CliffordRep) -> Result<CliffordRep, CliffordError> {
    let n = ambient.n - 1;
    if n < 2 {
        return Err(CliffordError::DimensionOutOfRange(n));
    }
    let last = &ambient.gammas[n];
    let gammas: Vec<Mat<f64>> = (0..n).map(|i| ambient.gammas[i].matmul(last)).collect();
    finish_rep(
        n,
        gammas,
        RepKind::Induced {
            ambient_dim: ambient.n,
        },
    )
}

fn finish_rep(
    n: usize,
    mut gammas: Vec<Mat<f64>>,
    kind: RepKind,
) -> Result<CliffordRep, CliffordError> {
    let d = gammas[0].rows;
    let mut volume = gammas
        .iter()
        .skip(1)
        .fold(gammas[0].clone(), |acc, g| acc.matmul(g));

    // In dimensions 3 and 7 the two inequivalent irreducible representations
    // are distinguished by the sign of the volume action; fix volume = +id by
    // flipping the last generator when the tensor construction lands on -id.
    if kind == RepKind::Standard && (n == 3 || n == 7) && volume[(0, 0)] < 0.0 {
        gammas[n - 1] = gammas[n - 1].scalef(-1.0);
        volume = volume.scalef(-1.0);
    }

    let (chirality, proj_plus, proj_minus) = if n % 2 == 0 {
        // Complex volume i^{n/2}·γ_1···γ_n; multiplication by i survives
        // realification as a fixed real matrix.
        let jr = realified_i(d / 2);
        let mut chi = volume.clone();
        for _ in 0..(n / 2) {
            chi = jr.matmul(&chi);
        }
        let id = Mat::identity(d);
        let p = id.add(&chi).scalef(0.5);
        let q = id.sub(&chi).scalef(0.5);
        (Some(chi), Some(p), Some(q))
    } else {
        (None, None, None)
    };

    let odd_volume_sign = if n % 2 == 1 && n != 5 {
        let s = volume[(0, 0)];
        let dev = volume.sub(&Mat::identity(d).scalef(s)).max_abs();
        if dev < 1e-12 {
            Some(s)
        } else {
            None
        }
    } else {
        None
    };

    let quat = if n == 5 && kind == RepKind::Standard {
        Some(solve_quaternionic(&gammas, &volume)?)
    } else {
        None
    };

    Ok(CliffordRep {
        n,
        d,
        gammas,
        volume,
        chirality,
        proj_plus,
        proj_minus,
        odd_volume_sign,
        quat,
        kind,
    })
}

/// Solve for J with Jγ_k = -γ_kJ for all k and JI = -IJ, then normalize so
/// that J² = -id. The solution space is two-dimensional; the pick is the
/// projection of the first standard basis vector with sizable projection,
/// which is deterministic.
fn solve_quaternionic(gammas: &[Mat<f64>], volume: &Mat<f64>) -> Result<QuatTriple, CliffordError> {
    let d = volume.rows;
    let ops: Vec<&Mat<f64>> = gammas.iter().chain(std::iter::once(volume)).collect();
    let mut constraint = Mat::<f64>::zeros(ops.len() * d * d, d * d);
    for (block, g) in ops.iter().enumerate() {
        for r in 0..d {
            for c in 0..d {
                let row = block * d * d + r * d + c;
                // (gX + Xg)_{rc} = Σ_k g_{rk} X_{kc} + X_{rk} g_{kc}
                for k in 0..d {
                    constraint[(row, k * d + c)] += g[(r, k)];
                    constraint[(row, r * d + k)] += g[(k, c)];
                }
            }
        }
    }
    let basis = linalg::nullspace(&constraint, 1e-8);
    if basis.len() < 2 {
        return Err(CliffordError::QuaternionicSolve(format!(
            "expected a 2-dimensional solution space, found {}",
            basis.len()
        )));
    }
    // Column of the span projector with the first sizable leading entry.
    let mut pick = None;
    for r in 0..d * d {
        let mut col = vec![0.0; d * d];
        for v in &basis {
            let c = v[r];
            for (ci, vi) in col.iter_mut().zip(v) {
                *ci += c * vi;
            }
        }
        let nrm = linalg::norm(&col);
        if nrm > 1e-3 {
            pick = Some(linalg::scale_vec(&col, 1.0 / nrm));
            break;
        }
    }
    let w = pick.ok_or_else(|| {
        CliffordError::QuaternionicSolve("projector has no sizable column".into())
    })?;
    let j_raw = Mat {
        rows: d,
        cols: d,
        a: w,
    };
    let j_sq = j_raw.matmul(&j_raw);
    let c = -j_sq.trace() / d as f64;
    if c <= 0.0 {
        return Err(CliffordError::QuaternionicSolve(format!(
            "J² is not a negative multiple of the identity (got {c:.3e})"
        )));
    }
    let j_op = j_raw.scalef(1.0 / c.sqrt());
    let id = Mat::identity(d);
    let sq_res = j_op.matmul(&j_op).add(&id).max_abs();
    let orth_res = j_op.transpose().matmul(&j_op).sub(&id).max_abs();
    if sq_res > 1e-10 || orth_res > 1e-10 {
        return Err(CliffordError::QuaternionicSolve(format!(
            "normalized J fails structure checks (J²+id: {sq_res:.3e}, JᵀJ-id: {orth_res:.3e})"
        )));
    }
    let k_op = volume.matmul(&j_op);
    Ok(QuatTriple {
        i_op: volume.clone(),
        j_op,
        k_op,
    })
}

// ---------------------------------------------------------------------------
// Clifford products.
// ---------------------------------------------------------------------------

/// Apply a constant real matrix to a spinor with scalar entries of any level.
pub fn apply<T: Real>(m: &Mat<f64>, psi: &[T]) -> Vec<T> {
    assert_eq!(m.cols, psi.len());
    let mut out = vec![T::zero(); m.rows];
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = T::zero();
        for (j, &p) in psi.iter().enumerate() {
            let c = m[(i, j)];
            if c != 0.0 {
                s += p.mulf(c);
            }
        }
        *o = s;
    }
    out
}

impl CliffordRep {
    /// Clifford product v·ψ for a frame vector with components `v`.
    pub fn mul_vector<T: Real>(&self, v: &[T], psi: &[T]) -> Result<Vec<T>, CliffordError> {
        if v.len() != self.n {
            return Err(CliffordError::LengthMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        if psi.len() != self.d {
            return Err(CliffordError::LengthMismatch {
                expected: self.d,
                got: psi.len(),
            });
        }
        let mut out = vec![T::zero(); self.d];
        for (k, g) in self.gammas.iter().enumerate() {
            let gp = apply(g, psi);
            for (o, gpi) in out.iter_mut().zip(&gp) {
                *o += v[k] * *gpi;
            }
        }
        Ok(out)
    }

    /// γ_k·ψ.
    pub fn mul_basis<T: Real>(&self, k: usize, psi: &[T]) -> Vec<T> {
        apply(&self.gammas[k], psi)
    }

    /// Clifford product of a 2-form (antisymmetric frame coefficient matrix)
    /// with a spinor: Σ_{i<j} σ_ij γ_iγ_j ψ.
    pub fn mul_two_form<T: Real>(&self, sigma: &Mat<f64>, psi: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.d];
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let c = sigma[(i, j)];
                if c == 0.0 {
                    continue;
                }
                let gp = self.mul_basis(j, psi);
                let ggp = self.mul_basis(i, &gp);
                for (o, v) in out.iter_mut().zip(&ggp) {
                    *o += v.mulf(c);
                }
            }
        }
        out
    }

    /// Operator matrix of Σ_{i<j} σ_ij γ_iγ_j.
    pub fn two_form_operator(&self, sigma: &Mat<f64>) -> Mat<f64> {
        let mut op = Mat::<f64>::zeros(self.d, self.d);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let c = sigma[(i, j)];
                if c == 0.0 {
                    continue;
                }
                op = op.add(&self.gammas[i].matmul(&self.gammas[j]).scalef(c));
            }
        }
        op
    }

    /// Operator matrix of Σ_i v_i γ_i.
    pub fn vector_operator(&self, v: &[f64]) -> Mat<f64> {
        let mut op = Mat::<f64>::zeros(self.d, self.d);
        for (k, g) in self.gammas.iter().enumerate() {
            if v[k] != 0.0 {
                op = op.add(&g.scalef(v[k]));
            }
        }
        op
    }

    /// Residual of Σ_i e_i·A(e_i)·ψ + tr(A)·ψ, which vanishes for symmetric A.
    pub fn trace_identity_residual(&self, a: &Mat<f64>, psi: &[f64]) -> Result<f64, CliffordError> {
        let asym = a.sub(&a.transpose()).max_abs();
        if asym > 1e-12 {
            return Err(CliffordError::NotSymmetric(asym));
        }
        let mut acc = psi.iter().map(|&x| x * a.trace()).collect::<Vec<_>>();
        for i in 0..self.n {
            let aei = a.col(i);
            let ap = self.mul_vector(&aei, psi)?;
            let gap = self.mul_basis(i, &ap);
            for (o, v) in acc.iter_mut().zip(&gap) {
                *o += *v;
            }
        }
        Ok(linalg::max_abs(&acc))
    }

    /// Chirality projection of a spinor; `positive` selects Σ⁺.
    pub fn chirality_project<T: Real>(&self, psi: &[T], positive: bool) -> Vec<T> {
        let p = if positive {
            self.proj_plus.as_ref()
        } else {
            self.proj_minus.as_ref()
        };
        apply(
            p.expect("chirality projectors exist only in even dimensions"),
            psi,
        )
    }

    /// The quaternionic triple (I, J, K); present exactly on the standard
    /// dimension-5 representation.
    pub fn quaternionic_triple(&self) -> Result<&QuatTriple, CliffordError> {
        self.quat.as_ref().ok_or_else(|| {
            CliffordError::QuaternionicSolve(format!(
                "representation (n = {}, {:?}) carries no quaternionic triple",
                self.n, self.kind
            ))
        })
    }
}

// ---------------------------------------------------------------------------
// Spin lifts of special orthogonal matrices via plane-rotation factors.
// ---------------------------------------------------------------------------

/// One plane rotation by `theta` in coordinate plane (i, j).
#[derive(Clone, Copy, Debug)]
pub struct PlaneRotation<T> {
    pub i: usize,
    pub j: usize,
    pub theta: T,
}

/// Factor a special orthogonal matrix into plane rotations,
/// R = G(i₁,j₁,θ₁)·…·G(i_m,j_m,θ_m), by Givens reduction.
///
/// Smooth in the matrix entries wherever every reduction pivot stays away
/// from zero; callers reject sample points whose pivots fall below
/// `min_pivot`.
pub fn givens_factors<T: Real>(
    r: &Mat<T>,
    min_pivot: f64,
) -> Result<Vec<PlaneRotation<T>>, LiftError> {
    assert_eq!(r.rows, r.cols);
    let m = r.rows;
    let mut work = r.clone();
    let mut factors = Vec::with_capacity(m * (m - 1) / 2);
    for c in 0..m {
        for row in (c + 1)..m {
            let a = work[(c, c)];
            let b = work[(row, c)];
            let mag = (a * a + b * b).sqrt();
            if mag.value() < min_pivot {
                return Err(LiftError::PivotTooSmall(mag.value()));
            }
            let theta = b.atan2(a);
            let (s, co) = theta.sin_cos();
            for j in 0..m {
                let rc = work[(c, j)];
                let rr = work[(row, j)];
                work[(c, j)] = co * rc + s * rr;
                work[(row, j)] = co * rr - s * rc;
            }
            factors.push(PlaneRotation {
                i: c,
                j: row,
                theta,
            });
        }
    }
    let residual = work.sub(&Mat::identity(m)).max_abs();
    if residual > 1e-8 {
        return Err(LiftError::NotSpecialOrthogonal(residual));
    }
    Ok(factors)
}

/// Apply the inverse spin lift L(R)⁻¹ to a constant spinor, where R is given
/// by its plane-rotation factors and the lift of G(i,j,θ) is
/// cos(θ/2) + sin(θ/2)·γ_iγ_j.
pub fn apply_inverse_lift<T: Real>(
    gammas: &[Mat<f64>],
    factors: &[PlaneRotation<T>],
    psi0: &[f64],
) -> Vec<T> {
    let mut psi: Vec<T> = psi0.iter().map(|&x| T::from_f64(x)).collect();
    for f in factors {
        let (s, c) = f.theta.mulf(0.5).sin_cos();
        let gp = apply(&gammas[f.j], &psi);
        let ggp = apply(&gammas[f.i], &gp);
        for (p, q) in psi.iter_mut().zip(&ggp) {
            let v = *p;
            *p = v * c - *q * s;
        }
    }
    psi
}

/// Matrix of the inverse spin lift of a constant rotation.
pub fn inverse_lift_matrix(rep: &CliffordRep, r: &Mat<f64>) -> Result<Mat<f64>, LiftError> {
    let factors = givens_factors::<f64>(r, 1e-12)?;
    let mut cols = Mat::<f64>::zeros(rep.d, rep.d);
    for k in 0..rep.d {
        let mut e = vec![0.0; rep.d];
        e[k] = 1.0;
        let col = apply_inverse_lift::<f64>(&rep.gammas, &factors, &e);
        cols.set_col(k, &col);
    }
    Ok(cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dot, norm};
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    fn rand_vec(rng: &mut ChaCha12Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn clifford_relation_all_dimensions() {
        for n in 2..=8 {
            let rep = build_clifford_rep(n).unwrap();
            assert_eq!(rep.d, spinor_dim(n));
            let id = Mat::<f64>::identity(rep.d);
            for i in 0..n {
                for j in 0..n {
                    let anti = rep.gammas[i]
                        .matmul(&rep.gammas[j])
                        .add(&rep.gammas[j].matmul(&rep.gammas[i]));
                    let expected = if i == j {
                        id.scalef(-2.0)
                    } else {
                        Mat::zeros(rep.d, rep.d)
                    };
                    assert!(
                        anti.sub(&expected).max_abs() < 1e-12,
                        "Clifford relation fails for n={n}, i={i}, j={j}"
                    );
                }
            }
        }
    }

    #[test]
    fn generators_orthogonal_skew() {
        for n in 2..=8 {
            let rep = build_clifford_rep(n).unwrap();
            let id = Mat::<f64>::identity(rep.d);
            for g in &rep.gammas {
                assert!(g.transpose().add(g).max_abs() < 1e-14);
                assert!(g.transpose().matmul(g).sub(&id).max_abs() < 1e-14);
            }
        }
    }

    #[test]
    fn volume_structure_by_dimension() {
        // n = 3, 7: volume = ±id with the build fixing +1.
        for n in [3usize, 7] {
            let rep = build_clifford_rep(n).unwrap();
            assert_eq!(rep.odd_volume_sign, Some(1.0), "n={n}");
        }
        // n = 5: volume² = -id and volume central.
        let rep5 = build_clifford_rep(5).unwrap();
        let sq = rep5.volume.matmul(&rep5.volume);
        assert!(sq.add(&Mat::identity(rep5.d)).max_abs() < 1e-12);
        for g in &rep5.gammas {
            let comm = rep5.volume.matmul(g).sub(&g.matmul(&rep5.volume));
            assert!(comm.max_abs() < 1e-12);
        }
        // even n: chirality² = +id, projectors have half rank, vectors swap.
        for n in [2usize, 4, 6, 8] {
            let rep = build_clifford_rep(n).unwrap();
            let chi = rep.chirality.as_ref().unwrap();
            let id = Mat::<f64>::identity(rep.d);
            assert!(chi.matmul(chi).sub(&id).max_abs() < 1e-12, "n={n}");
            let p = rep.proj_plus.as_ref().unwrap();
            assert!((p.trace() - rep.d as f64 / 2.0).abs() < 1e-12);
            assert!(p.matmul(p).sub(p).max_abs() < 1e-12);
            for g in &rep.gammas {
                let anti = chi.matmul(g).add(&g.matmul(chi));
                assert!(
                    anti.max_abs() < 1e-12,
                    "vector does not swap chirality, n={n}"
                );
            }
        }
        // n = 4, 8: the index-ordered product itself squares to +id.
        for n in [4usize, 8] {
            let rep = build_clifford_rep(n).unwrap();
            let sq = rep.volume.matmul(&rep.volume);
            assert!(sq.sub(&Mat::identity(rep.d)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_range_is_enforced() {
        assert!(matches!(
            build_clifford_rep(1),
            Err(CliffordError::DimensionOutOfRange(1))
        ));
        assert!(matches!(
            build_clifford_rep(9),
            Err(CliffordError::DimensionOutOfRange(9))
        ));
    }

    #[test]
    fn mul_vector_rejects_length_mismatch() {
        let rep = build_clifford_rep(3).unwrap();
        let psi = vec![0.0; rep.d];
        assert!(matches!(
            rep.mul_vector(&[1.0, 0.0], &psi),
            Err(CliffordError::LengthMismatch { expected: 3, got: 2 })
        ));
        assert!(matches!(
            rep.mul_vector(&[1.0, 0.0, 0.0], &psi[..2]),
            Err(CliffordError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn chirality_projectors_commute_with_two_forms() {
        let rep = build_clifford_rep(4).unwrap();
        let p = rep.proj_plus.as_ref().unwrap();
        for i in 0..4 {
            for j in (i + 1)..4 {
                let gg = rep.gammas[i].matmul(&rep.gammas[j]);
                let comm = p.matmul(&gg).sub(&gg.matmul(p));
                assert!(comm.max_abs() < 1e-14, "i={i} j={j}");
            }
        }
    }

    #[test]
    fn vector_product_norm_and_involution() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for n in 2..=8 {
            let rep = build_clifford_rep(n).unwrap();
            for _ in 0..20 {
                let mut v = rand_vec(&mut rng, n);
                let nv = norm(&v);
                v.iter_mut().for_each(|x| *x /= nv);
                let psi = rand_vec(&mut rng, rep.d);
                let vp = rep.mul_vector(&v, &psi).unwrap();
                assert!((norm(&vp) - norm(&psi)).abs() < 1e-12);
                let vvp = rep.mul_vector(&v, &vp).unwrap();
                for (a, b) in vvp.iter().zip(&psi) {
                    assert!((a + b).abs() < 1e-12);
                }
                // skew-adjointness
                let phi = rand_vec(&mut rng, rep.d);
                let vphi = rep.mul_vector(&v, &phi).unwrap();
                assert!((dot(&vp, &phi) + dot(&psi, &vphi)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_form_action_consistent_with_vectors() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        for n in [3usize, 4, 5] {
            let rep = build_clifford_rep(n).unwrap();
            for _ in 0..10 {
                let x = rand_vec(&mut rng, n);
                let y = rand_vec(&mut rng, n);
                let psi = rand_vec(&mut rng, rep.d);
                // σ = x∧y has coefficients x_i y_j - x_j y_i.
                let sigma = Mat::from_fn(n, n, |i, j| x[i] * y[j] - x[j] * y[i]);
                let lhs = rep.mul_two_form(&sigma, &psi);
                let yp = rep.mul_vector(&y, &psi).unwrap();
                let xyp = rep.mul_vector(&x, &yp).unwrap();
                let g = dot(&x, &y);
                for ((l, xy), p) in lhs.iter().zip(&xyp).zip(&psi) {
                    assert!((l - (xy + g * p)).abs() < 1e-12);
                }
                // operator antisymmetry ⇒ ⟨σ·ψ, ψ⟩ = 0
                let op = rep.two_form_operator(&sigma);
                assert!(op.transpose().add(&op).max_abs() < 1e-12);
                assert!(dot(&lhs, &psi).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn trace_identity_examples() {
        let rep = build_clifford_rep(3).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let psi = rand_vec(&mut rng, rep.d);
        let id3 = Mat::<f64>::identity(3);
        assert!(rep.trace_identity_residual(&id3, &psi).unwrap() < 1e-12);
        let diag = Mat::from_fn(3, 3, |i, j| if i == j { (i + 1) as f64 } else { 0.0 });
        assert!(rep.trace_identity_residual(&diag, &psi).unwrap() < 1e-12);
        // rank-one ξ⊗ξ with |ξ|=1
        let mut xi = rand_vec(&mut rng, 3);
        let nx = norm(&xi);
        xi.iter_mut().for_each(|x| *x /= nx);
        let rank1 = Mat::from_fn(3, 3, |i, j| xi[i] * xi[j]);
        assert!(rep.trace_identity_residual(&rank1, &psi).unwrap() < 1e-12);
        // non-symmetric input is rejected
        let bad = Mat::from_fn(3, 3, |i, j| (i * 3 + j) as f64);
        assert!(matches!(
            rep.trace_identity_residual(&bad, &psi),
            Err(CliffordError::NotSymmetric(_))
        ));
    }

    #[test]
    fn dim3_two_forms_against_hodge_dual() {
        // With volume = ε·id, σ·ψ = -ε·(*σ)·ψ for every 2-form σ.
        let rep = build_clifford_rep(3).unwrap();
        let eps = rep.odd_volume_sign.unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(10);
        for _ in 0..10 {
            let x = rand_vec(&mut rng, 3);
            let y = rand_vec(&mut rng, 3);
            let psi = rand_vec(&mut rng, 4);
            let sigma = Mat::from_fn(3, 3, |i, j| x[i] * y[j] - x[j] * y[i]);
            // *(x∧y) via the epsilon symbol
            let star = vec![sigma[(1, 2)], -sigma[(0, 2)], sigma[(0, 1)]];
            let lhs = rep.mul_two_form(&sigma, &psi);
            let rhs = rep.mul_vector(&star, &psi).unwrap();
            for (l, r) in lhs.iter().zip(&rhs) {
                assert!((l + eps * r).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quaternionic_triple_relations() {
        let rep = build_clifford_rep(5).unwrap();
        let q = rep.quat.as_ref().unwrap();
        let id = Mat::<f64>::identity(rep.d);
        assert!(q.i_op.matmul(&q.i_op).add(&id).max_abs() < 1e-12);
        assert!(q.j_op.matmul(&q.j_op).add(&id).max_abs() < 1e-12);
        assert!(q.k_op.matmul(&q.k_op).add(&id).max_abs() < 1e-12);
        let ij = q.i_op.matmul(&q.j_op).add(&q.j_op.matmul(&q.i_op));
        assert!(ij.max_abs() < 1e-12);
        let ki = q.k_op.matmul(&q.i_op).add(&q.i_op.matmul(&q.k_op));
        assert!(ki.max_abs() < 1e-12);
        for g in &rep.gammas {
            assert!(q.j_op.matmul(g).add(&g.matmul(&q.j_op)).max_abs() < 1e-12);
            assert!(q.k_op.matmul(g).add(&g.matmul(&q.k_op)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn induced_rep_satisfies_relations() {
        for ambient_n in [4usize, 5, 6] {
            let amb = build_clifford_rep(ambient_n).unwrap();
            let ind = induced_rep(&amb).unwrap();
            let id = Mat::<f64>::identity(ind.d);
            for i in 0..ind.n {
                for j in 0..ind.n {
                    let anti = ind.gammas[i]
                        .matmul(&ind.gammas[j])
                        .add(&ind.gammas[j].matmul(&ind.gammas[i]));
                    let expected = if i == j {
                        id.scalef(-2.0)
                    } else {
                        Mat::zeros(ind.d, ind.d)
                    };
                    assert!(anti.sub(&expected).max_abs() < 1e-12);
                }
            }
            if ind.n % 2 == 0 {
                let chi = ind.chirality.as_ref().unwrap();
                assert!(chi.matmul(chi).sub(&id).max_abs() < 1e-12);
                for g in &ind.gammas {
                    assert!(chi.matmul(g).add(&g.matmul(chi)).max_abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn givens_lift_is_equivariant() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for n in [3usize, 4, 5] {
            let rep = build_clifford_rep(n).unwrap();
            // random special orthogonal matrix via QR of a random matrix
            let raw = Mat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0_f64));
            let (mut q, _) = crate::linalg::qr_mgs(&raw).unwrap();
            if crate::linalg::det(&q) < 0.0 {
                let c0 = q.col(0).iter().map(|x| -x).collect::<Vec<_>>();
                q.set_col(0, &c0);
            }
            let factors = givens_factors::<f64>(&q, 1e-12).unwrap();
            // reconstruct R from factors
            let mut rec = Mat::<f64>::identity(n);
            for f in &factors {
                let mut g = Mat::<f64>::identity(n);
                g[(f.i, f.i)] = f.theta.cos();
                g[(f.j, f.j)] = f.theta.cos();
                g[(f.j, f.i)] = f.theta.sin();
                g[(f.i, f.j)] = -f.theta.sin();
                rec = rec.matmul(&g);
            }
            assert!(rec.sub(&q).max_abs() < 1e-12, "factor reconstruction n={n}");

            // L(R)⁻¹ γ(R e_k) L(R) = γ_k
            let linv = inverse_lift_matrix(&rep, &q).unwrap();
            let l = linv.transpose(); // inverse of an orthogonal lift
            assert!(
                linv.matmul(&l).sub(&Mat::identity(rep.d)).max_abs() < 1e-11,
                "lift is orthogonal"
            );
            for k in 0..n {
                let rv = q.col(k);
                let grv = rep.vector_operator(&rv);
                let lhs = linv.matmul(&grv).matmul(&l);
                assert!(
                    lhs.sub(&rep.gammas[k]).max_abs() < 1e-11,
                    "equivariance fails n={n}, k={k}"
                );
            }
        }
    }
}
