//! Dimension-specific verifiers.
//!
//! Dimension 2: the determinant of A is pinned to the intrinsic Gauss
//! curvature, 4·det A = K, for candidates obtained by restriction.
//!
//! Dimension 4: the chirality split Ψ = Ψ⁺ + Ψ⁻ produces the length
//! function h = |Ψ⁻|², the 1-form η(X) = ⟨X·Ψ⁺, Ψ⁻⟩ and, where
//! h ∈ (0, 1), the vector field ξ with Ψ⁺ = ξ·Ψ⁻. Verified here:
//! |η|² = h − h², dh = 2A(η), ∇_Xη = (1−2h)A(X), dη = 0,
//! δη = −(1−2h)·a, the Laplace equation for h on Einstein models, B(ξ) = 0,
//! the block structure of the curvature operator on self-dual and
//! anti-self-dual forms, the pairing identity between A and B on Λ²±, the
//! contraction T(η, Y) = (1−2h)(A²−aA+λ/4)(Y), and constancy of
//! C = (h(1−h))²(l − h(1−h)λ/12) with l = |dh|²/4.
//!
//! Dimension 5: the volume complex structure I gives the unit vector field
//! ξ with IΨ = ξ·Ψ and the skew endomorphism L with X·IΨ = LX·Ψ − g(X,ξ)Ψ;
//! verified: L² = −id + ξ⊗ξ, (ξ∧X)·Ψ = −LX·Ψ, ∇_Xξ = 2LAX, the orthogonal
//! decomposition spanned by {e_i·Ψ, Ψ, JΨ, KΨ}, invariance of ξ^⊥ under A,
//! and the eigenvalue relations of the round-sphere candidates.

use crate::ad::{Real, SmoothMap, SmoothMapDyn};
use crate::clifford::CliffordRep;
use crate::fields::NormSqField;
use crate::gks::{GksCandidate, GksError, SamplePredicate};
use crate::linalg::{self, Mat};
use crate::models::{self, ChartPoint};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DimError {
    #[error("verifier requires dimension {expected}, candidate has {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("representation carries no quaternionic triple")]
    NoQuaternionicTriple,
    #[error("representation carries no chirality splitting")]
    NoChirality,
    #[error(transparent)]
    Gks(#[from] GksError),
    #[error(transparent)]
    Model(#[from] models::ModelError),
    #[error(transparent)]
    Clifford(#[from] crate::clifford::CliffordError),
}

// ---------------------------------------------------------------------------
// Dimension 2.
// ---------------------------------------------------------------------------

/// |4·det A − K| with K the intrinsic Gauss curvature of the model.
pub fn dim2_det_residual(c: &GksCandidate, x: &[f64]) -> Result<f64, DimError> {
    if c.model.n != 2 {
        return Err(DimError::WrongDimension {
            expected: 2,
            got: c.model.n,
        });
    }
    let a = c.a_at::<f64>(x);
    let det_a = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
    let t = c.curv_tensor(x)?;
    let gauss = t.at(0, 1, 1, 0);
    Ok((4.0 * det_a - gauss).abs())
}

// ---------------------------------------------------------------------------
// Dimension 4.
// ---------------------------------------------------------------------------

/// h = |Ψ∓|² as a differentiable scalar field.
pub struct ChiralNormSq {
    pub rep: Arc<CliffordRep>,
    pub psi: Arc<dyn SmoothMapDyn>,
    pub positive: bool,
}

impl SmoothMap for ChiralNormSq {
    fn dim_in(&self) -> usize {
        self.psi.dim_in()
    }
    fn dim_out(&self) -> usize {
        1
    }
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
        let psi = crate::ad::eval_at::<T>(self.psi.as_ref(), x);
        let part = self.rep.chirality_project(&psi, self.positive);
        out[0] = linalg::norm_sq(&part);
    }
}

/// η as a differentiable vector field: η_k = ⟨γ_k Ψ⁺, Ψ⁻⟩.
pub struct EtaField {
    pub rep: Arc<CliffordRep>,
    pub psi: Arc<dyn SmoothMapDyn>,
}

impl SmoothMap for EtaField {
    fn dim_in(&self) -> usize {
        self.psi.dim_in()
    }
    fn dim_out(&self) -> usize {
        self.rep.n
    }
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
        let psi = crate::ad::eval_at::<T>(self.psi.as_ref(), x);
        let plus = self.rep.chirality_project(&psi, true);
        let minus = self.rep.chirality_project(&psi, false);
        for k in 0..self.rep.n {
            out[k] = linalg::dot(&self.rep.mul_basis(k, &plus), &minus);
        }
    }
}

/// Per-point record of the dimension-4 apparatus.
pub struct Dim4Record {
    pub h: f64,
    pub eta: Vec<f64>,
    /// ξ with Ψ⁺ = ξ·Ψ⁻; defined for h ∈ (0, 1).
    pub xi: Option<Vec<f64>>,
    /// |η|² − (h − h²).
    pub eta_norm_res: f64,
    /// dh − 2A(η).
    pub dh_res: f64,
    /// ∇_Xη − (1−2h)A(X) over frame X.
    pub grad_eta_res: f64,
    /// Antisymmetrized ∇η (closedness of η).
    pub d_eta_res: f64,
    /// δη + (1−2h)a.
    pub div_eta_res: f64,
    /// Δh + 2da(η) + 2(a²−λ)(1−2h); Einstein models only.
    pub laplace_h_res: Option<f64>,
    /// |B(ξ)|; defined with ξ.
    pub b_xi_res: Option<f64>,
    /// |A(ξ) − a₁ξ| with a₁ = g(A(ξ),ξ)/|ξ|²; eigenvector property, only
    /// asserted on Einstein candidates.
    pub a1_eigen_res: Option<f64>,
    /// C = (h(1−h))²(l − h(1−h)λ/12), l = |dh|²/4; Einstein models only.
    pub c_value: Option<f64>,
}

fn require_dim(c: &GksCandidate, n: usize) -> Result<(), DimError> {
    if c.model.n != n {
        return Err(DimError::WrongDimension {
            expected: n,
            got: c.model.n,
        });
    }
    Ok(())
}

pub fn dim4_invariants(c: &GksCandidate, x: &[f64]) -> Result<Dim4Record, DimError> {
    require_dim(c, 4)?;
    if c.rep.chirality.is_none() {
        return Err(DimError::NoChirality);
    }
    let n = 4;
    let psi = c.psi_at::<f64>(x);
    let plus = c.rep.chirality_project(&psi, true);
    let minus = c.rep.chirality_project(&psi, false);
    let h = linalg::norm_sq(&minus);
    let t = c.derived_tensors(x)?;

    let eta_field = EtaField {
        rep: c.rep.clone(),
        psi: c.psi.clone(),
    };
    let eta = crate::ad::eval_at::<f64>(&eta_field, x);
    let eta_norm_res = (linalg::norm_sq(&eta) - (h - h * h)).abs();

    // dh and ∇η, with the h field differentiated through AD.
    let h_field: Arc<dyn SmoothMapDyn> = Arc::new(ChiralNormSq {
        rep: c.rep.clone(),
        psi: c.psi.clone(),
        positive: false,
    });
    let mut dh = vec![0.0; n];
    for k in 0..n {
        dh[k] = models::frame_deriv::<f64>(&c.model, h_field.as_ref(), k, x)?[0];
    }
    let a_eta = t.a.matvec(&eta);
    let dh_res = linalg::norm(
        &dh.iter()
            .zip(&a_eta)
            .map(|(d, ae)| d - 2.0 * ae)
            .collect::<Vec<_>>(),
    );

    // ∇_{e_k}η in frame components.
    let gam = c.model.conn::<f64>(x)?;
    let mut grad_eta = Mat::<f64>::zeros(n, n); // (k, j) = g(∇_{e_k}η, e_j)
    for k in 0..n {
        let de = models::frame_deriv::<f64>(&c.model, &eta_field, k, x)?;
        for j in 0..n {
            let mut v = de[j];
            for m in 0..n {
                v += eta[m] * gam[k][(m, j)];
            }
            grad_eta[(k, j)] = v;
        }
    }
    let one_minus_2h = 1.0 - 2.0 * h;
    let mut grad_eta_res = 0.0_f64;
    let mut d_eta_res = 0.0_f64;
    for k in 0..n {
        let mut row_res = vec![0.0; n];
        for j in 0..n {
            row_res[j] = grad_eta[(k, j)] - one_minus_2h * t.a[(j, k)];
            d_eta_res = d_eta_res.max((grad_eta[(k, j)] - grad_eta[(j, k)]).abs());
        }
        grad_eta_res = grad_eta_res.max(linalg::norm(&row_res));
    }
    let div_eta: f64 = -(0..n).map(|k| grad_eta[(k, k)]).sum::<f64>();
    let div_eta_res = (div_eta + one_minus_2h * t.a_trace).abs();

    let laplace_h_res = match c.lambda {
        Some(lambda) => {
            let lap = models::scalar_laplacian(&c.model, &h_field, x)?;
            let da_eta = linalg::dot(&t.da, &eta);
            Some((lap + 2.0 * da_eta + 2.0 * (t.a_trace * t.a_trace - lambda) * one_minus_2h).abs())
        }
        None => None,
    };

    // ξ from Ψ⁺ = ξ·Ψ⁻ by orthogonal projection: ξ_i = ⟨γ_iΨ⁻, Ψ⁺⟩/h.
    let (xi, b_xi_res, a1_eigen_res) = if h > 1e-6 && h < 1.0 - 1e-6 {
        let xi: Vec<f64> = (0..n)
            .map(|i| linalg::dot(&c.rep.mul_basis(i, &minus), &plus) / h)
            .collect();
        let b_xi = linalg::norm(&t.b.matvec(&xi));
        let xi_nsq = linalg::norm_sq(&xi);
        let a_xi = t.a.matvec(&xi);
        let a1 = linalg::dot(&a_xi, &xi) / xi_nsq;
        let eigen_res = linalg::norm(
            &a_xi
                .iter()
                .zip(&xi)
                .map(|(av, v)| av - a1 * v)
                .collect::<Vec<_>>(),
        );
        (Some(xi), Some(b_xi), Some(eigen_res))
    } else {
        (None, None, None)
    };

    let c_value = c.lambda.map(|lambda| {
        let l = linalg::norm_sq(&dh) / 4.0;
        let hh = h * (1.0 - h);
        hh * hh * (l - hh * lambda / 12.0)
    });

    Ok(Dim4Record {
        h,
        eta,
        xi,
        eta_norm_res,
        dh_res,
        grad_eta_res,
        d_eta_res,
        div_eta_res,
        laplace_h_res,
        b_xi_res,
        a1_eigen_res,
        c_value,
    })
}

/// Ordered bases of the self-dual and anti-self-dual 2-forms,
/// (e₁∧e₂ ± e₃∧e₄, e₁∧e₃ ∓ e₂∧e₄, e₁∧e₄ ± e₂∧e₃)/√2.
pub fn selfdual_bases(n: usize) -> (Vec<Mat<f64>>, Vec<Mat<f64>>) {
    assert_eq!(n, 4);
    let wedge = |i: usize, j: usize, s: f64| {
        let mut m = Mat::<f64>::zeros(4, 4);
        m[(i, j)] = s;
        m[(j, i)] = -s;
        m
    };
    let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
    let combo = |a: Mat<f64>, b: Mat<f64>| a.add(&b).scalef(inv_sqrt2);
    let plus = vec![
        combo(wedge(0, 1, 1.0), wedge(2, 3, 1.0)),
        combo(wedge(0, 2, 1.0), wedge(1, 3, -1.0)),
        combo(wedge(0, 3, 1.0), wedge(1, 2, 1.0)),
    ];
    let minus = vec![
        combo(wedge(0, 1, 1.0), wedge(2, 3, -1.0)),
        combo(wedge(0, 2, 1.0), wedge(1, 3, 1.0)),
        combo(wedge(0, 3, 1.0), wedge(1, 2, -1.0)),
    ];
    (plus, minus)
}

fn form_inner(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    let n = a.rows;
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += a[(i, j)] * b[(i, j)];
        }
    }
    s
}

/// Residuals of the self-dual block structure and its consequences on an
/// Einstein 4-dimensional candidate.
pub struct Dim4SelfDual {
    /// Off-block entries of the curvature operator on Λ²±.
    pub block_res: f64,
    /// g(A(σ⁺), τ⁻) + g(B(σ⁺(e₁)), τ⁻(e₁)) over the 3×3 basis pairs.
    pub ab_res: f64,
    /// T(η∧Y) − (1−2h)(A²−aA+λ/4)(Y) over frame Y.
    pub cor_t_res: f64,
}

pub fn dim4_selfdual_checks(c: &GksCandidate, x: &[f64]) -> Result<Dim4SelfDual, DimError> {
    require_dim(c, 4)?;
    let lambda = c
        .lambda
        .expect("self-dual checks presume an Einstein model");
    let rec = dim4_invariants(c, x)?;
    let t = c.derived_tensors(x)?;
    let curv = c.curv_tensor(x)?;
    let (plus, minus) = selfdual_bases(4);

    let mut block_res = 0.0_f64;
    for p in &plus {
        let rp = curv.apply(p);
        for m in &minus {
            block_res = block_res.max(form_inner(&rp, m).abs());
        }
    }
    for m in &minus {
        let rm = curv.apply(m);
        for p in &plus {
            block_res = block_res.max(form_inner(&rm, p).abs());
        }
    }

    let xi = rec
        .xi
        .as_ref()
        .expect("self-dual checks presume h in (0,1)");
    let e1 = linalg::scale_vec(xi, 1.0 / linalg::norm(xi));
    let mut ab_res = 0.0_f64;
    for sp in &plus {
        let a_sp = t.a.matmul(&sp.matmul(&t.a.transpose()));
        let sp_e1 = sp.matvec(&e1);
        let b_sp_e1 = t.b.matvec(&sp_e1);
        for tm in &minus {
            let tm_e1 = tm.matvec(&e1);
            let val = form_inner(&a_sp, tm) + linalg::dot(&b_sp_e1, &tm_e1);
            ab_res = ab_res.max(val.abs());
        }
    }

    let n = 4;
    let one_minus_2h = 1.0 - 2.0 * rec.h;
    let a2 = t.a.matmul(&t.a);
    let mut cor_t_res = 0.0_f64;
    for y in 0..n {
        let mut sigma = Mat::<f64>::zeros(n, n);
        for i in 0..n {
            let (ei, yi) = (rec.eta[i], if i == y { 1.0 } else { 0.0 });
            for j in 0..n {
                let (ej, yj) = (rec.eta[j], if j == y { 1.0 } else { 0.0 });
                sigma[(i, j)] = ei * yj - ej * yi;
            }
        }
        let t_sigma = t.t_apply(&sigma);
        let expect: Vec<f64> = (0..n)
            .map(|i| {
                one_minus_2h
                    * (a2[(i, y)] - t.a_trace * t.a[(i, y)]
                        + if i == y { lambda / 4.0 } else { 0.0 })
            })
            .collect();
        cor_t_res = cor_t_res.max(linalg::norm(&linalg::sub_vec(&t_sigma, &expect)));
    }

    Ok(Dim4SelfDual {
        block_res,
        ab_res,
        cor_t_res,
    })
}

// ---------------------------------------------------------------------------
// Dimension 5.
// ---------------------------------------------------------------------------

/// ξ solved from IΨ = ξ·Ψ, as a differentiable vector field:
/// ξ_i = ⟨γ_iΨ, IΨ⟩ / |Ψ|².
pub struct XiField5 {
    pub rep: Arc<CliffordRep>,
    pub psi: Arc<dyn SmoothMapDyn>,
}

impl SmoothMap for XiField5 {
    fn dim_in(&self) -> usize {
        self.psi.dim_in()
    }
    fn dim_out(&self) -> usize {
        5
    }
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
        let quat = self.rep.quat.as_ref().expect("dimension-5 representation");
        let psi = crate::ad::eval_at::<T>(self.psi.as_ref(), x);
        let ipsi = crate::clifford::apply(&quat.i_op, &psi);
        let inv = T::one() / linalg::norm_sq(&psi);
        for i in 0..5 {
            out[i] = linalg::dot(&self.rep.mul_basis(i, &psi), &ipsi) * inv;
        }
    }
}

/// Per-point record of the dimension-5 spinorial structure.
pub struct Dim5Record {
    pub xi: Vec<f64>,
    pub l_op: Mat<f64>,
    /// |IΨ − ξ·Ψ| (solve residual).
    pub xi_solve_res: f64,
    /// ||ξ| − 1|.
    pub xi_unit_res: f64,
    /// |L + Lᵀ| (skewness of the solved operator).
    pub l_skew_res: f64,
    /// L² + id − ξ⊗ξ.
    pub l_complex_res: f64,
    /// |Lξ|.
    pub l_xi_res: f64,
    /// (ξ∧X)·Ψ + LX·Ψ over frame X.
    pub cl1_res: f64,
    /// ∇_Xξ − 2LAX over frame X.
    pub nxi_res: f64,
    /// Gram off-diagonals of {e_i·Ψ, Ψ, JΨ, KΨ} (orthogonal decomposition).
    pub deco_gram_res: f64,
    /// |A(ξ) − g(Aξ,ξ)ξ| (invariance of ξ^⊥ under A).
    pub a_preserves_res: f64,
    /// α = g(Aξ, ξ).
    pub alpha: f64,
    /// Eigenvalues of A restricted to ξ^⊥.
    pub alpha_d: Vec<f64>,
    /// 4·A²|_D − id on an orthonormal basis of ξ^⊥.
    pub a_sq_res: f64,
}

pub fn dim5_structure(c: &GksCandidate, x: &[f64]) -> Result<Dim5Record, DimError> {
    require_dim(c, 5)?;
    let quat = c.rep.quat.as_ref().ok_or(DimError::NoQuaternionicTriple)?;
    let n = 5;
    let psi = c.psi_at::<f64>(x);
    let nrm2 = linalg::norm_sq(&psi);
    let ipsi = crate::clifford::apply(&quat.i_op, &psi);

    let xi: Vec<f64> = (0..n)
        .map(|i| linalg::dot(&c.rep.mul_basis(i, &psi), &ipsi) / nrm2)
        .collect();
    let xi_psi = c.rep.mul_vector(&xi, &psi).map_err(GksError::from)?;
    let xi_solve_res = linalg::norm(&linalg::sub_vec(&ipsi, &xi_psi));
    let xi_unit_res = (linalg::norm(&xi) - 1.0).abs();

    // L column by column: γ_j·IΨ + ξ_j·Ψ = γ(Le_j)·Ψ, solved by projection.
    let mut l_op = Mat::<f64>::zeros(n, n);
    let mut l_solve_res = 0.0_f64;
    for j in 0..n {
        let mut rhs = c.rep.mul_basis(j, &ipsi);
        for (r, p) in rhs.iter_mut().zip(&psi) {
            *r += xi[j] * p;
        }
        let col: Vec<f64> = (0..n)
            .map(|i| linalg::dot(&c.rep.mul_basis(i, &psi), &rhs) / nrm2)
            .collect();
        let reconstructed = c.rep.mul_vector(&col, &psi).map_err(GksError::from)?;
        l_solve_res = l_solve_res.max(linalg::norm(&linalg::sub_vec(&rhs, &reconstructed)));
        l_op.set_col(j, &col);
    }
    let l_skew_res = l_op.add(&l_op.transpose()).max_abs().max(l_solve_res);
    let xi_outer = Mat::from_fn(n, n, |i, j| xi[i] * xi[j]);
    let l_complex_res = l_op
        .matmul(&l_op)
        .add(&Mat::identity(n))
        .sub(&xi_outer)
        .max_abs();
    let l_xi_res = linalg::norm(&l_op.matvec(&xi));

    // (ξ∧X)·Ψ = −LX·Ψ over frame X.
    let mut cl1_res = 0.0_f64;
    for j in 0..n {
        let mut sigma = Mat::<f64>::zeros(n, n);
        for i in 0..n {
            let xj = if i == j { 1.0 } else { 0.0 };
            for k in 0..n {
                let xk = if k == j { 1.0 } else { 0.0 };
                sigma[(i, k)] = xi[i] * xk - xi[k] * xj;
            }
        }
        let lhs = c.rep.mul_two_form(&sigma, &psi);
        let lx = l_op.col(j);
        let rhs = c.rep.mul_vector(&lx, &psi).map_err(GksError::from)?;
        cl1_res = cl1_res.max(linalg::norm(&linalg::add_vec(&lhs, &rhs)));
    }

    // ∇_Xξ = 2LAX over frame X, with ξ differentiated as a field.
    let a = c.a_at::<f64>(x);
    let xi_field = XiField5 {
        rep: c.rep.clone(),
        psi: c.psi.clone(),
    };
    let gam = c.model.conn::<f64>(x)?;
    let mut nxi_res = 0.0_f64;
    for k in 0..n {
        let de = models::frame_deriv::<f64>(&c.model, &xi_field, k, x)?;
        let mut grad_k = vec![0.0; n];
        for j in 0..n {
            let mut v = de[j];
            for m in 0..n {
                v += xi[m] * gam[k][(m, j)];
            }
            grad_k[j] = v;
        }
        let lax = l_op.matvec(&a.col(k));
        let expect: Vec<f64> = lax.iter().map(|v| 2.0 * v).collect();
        nxi_res = nxi_res.max(linalg::norm(&linalg::sub_vec(&grad_k, &expect)));
    }

    // Orthogonal decomposition: {γ_iΨ} ∪ {Ψ, JΨ, KΨ} spans with Gram = |Ψ|²·id.
    let mut basis: Vec<Vec<f64>> = (0..n).map(|i| c.rep.mul_basis(i, &psi)).collect();
    basis.push(psi.clone());
    basis.push(crate::clifford::apply(&quat.j_op, &psi));
    basis.push(crate::clifford::apply(&quat.k_op, &psi));
    let mut deco_gram_res = 0.0_f64;
    for (r, br) in basis.iter().enumerate() {
        for (s, bs) in basis.iter().enumerate() {
            let g = linalg::dot(br, bs);
            let expect = if r == s { nrm2 } else { 0.0 };
            deco_gram_res = deco_gram_res.max((g - expect).abs());
        }
    }

    let a_xi = a.matvec(&xi);
    let alpha = linalg::dot(&a_xi, &xi) / linalg::norm_sq(&xi);
    let a_preserves_res = linalg::norm(
        &a_xi
            .iter()
            .zip(&xi)
            .map(|(av, v)| av - alpha * v)
            .collect::<Vec<_>>(),
    );

    // Eigenvalues of A restricted to D = ξ^⊥: orthonormalize the projections
    // of the frame vectors and diagonalize the restricted matrix.
    let mut d_basis: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        let proj = linalg::dot(&v, &xi);
        for (vv, &xv) in v.iter_mut().zip(&xi) {
            *vv -= proj * xv;
        }
        for b in &d_basis {
            let p = linalg::dot(&v, b);
            for (vv, &bv) in v.iter_mut().zip(b) {
                *vv -= p * bv;
            }
        }
        let nv = linalg::norm(&v);
        if nv > 1e-6 && d_basis.len() < 4 {
            d_basis.push(linalg::scale_vec(&v, 1.0 / nv));
        }
    }
    let restricted = Mat::from_fn(4, 4, |r, s| {
        let av = a.matvec(&d_basis[s]);
        linalg::dot(&d_basis[r], &av)
    });
    let (alpha_d, _) = linalg::sym_eigen(&restricted);
    let a_sq = a.matmul(&a);
    let restricted_sq = Mat::from_fn(4, 4, |r, s| {
        let av = a_sq.matvec(&d_basis[s]);
        linalg::dot(&d_basis[r], &av)
    });
    let a_sq_res = restricted_sq.scalef(4.0).sub(&Mat::identity(4)).max_abs();

    Ok(Dim5Record {
        xi,
        l_op,
        xi_solve_res,
        xi_unit_res,
        l_skew_res,
        l_complex_res,
        l_xi_res,
        cl1_res,
        nxi_res,
        deco_gram_res,
        a_preserves_res,
        alpha,
        alpha_d,
        a_sq_res,
    })
}

/// Sampling predicate for dimension-4 records needing h ∈ (0, 1): keeps a
/// margin so ξ-dependent quantities stay conditioned.
pub fn dim4_interior_pred(c: &GksCandidate) -> SamplePredicate {
    let rep = c.rep.clone();
    let psi = c.psi.clone();
    let inner = c.sample_pred.clone();
    Arc::new(move |x: &[f64]| {
        if let Some(p) = &inner {
            if !p(x) {
                return false;
            }
        }
        let field = ChiralNormSq {
            rep: rep.clone(),
            psi: psi.clone(),
            positive: false,
        };
        let mut h = [0.0];
        field.eval(x, &mut h);
        h[0] > 0.02 && h[0] < 0.98
    })
}

/// Sample points for a candidate with the dimension-4 interior predicate.
pub fn sample_dim4(c: &GksCandidate, seed: u64, count: usize) -> Result<Vec<ChartPoint>, DimError> {
    let pred = dim4_interior_pred(c);
    Ok(c.model
        .sample_points(seed, count, Some(pred.as_ref() as &dyn Fn(&[f64]) -> bool))?)
}

/// Cross-point standard deviation, used for the constancy check of C.
pub fn std_dev(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

/// |dh|² = 4l with l = h(1−h)a₁²: ties the two routes to l together where
/// ξ is defined (used by the record-level tests).
pub fn dim4_l_consistency(c: &GksCandidate, x: &[f64]) -> Result<f64, DimError> {
    let rec = dim4_invariants(c, x)?;
    let t = c.derived_tensors(x)?;
    let Some(xi) = &rec.xi else { return Ok(0.0) };
    let a_xi = t.a.matvec(xi);
    let a1 = linalg::dot(&a_xi, xi) / linalg::norm_sq(xi);
    let h_field: Arc<dyn SmoothMapDyn> = Arc::new(ChiralNormSq {
        rep: c.rep.clone(),
        psi: c.psi.clone(),
        positive: false,
    });
    let mut dh_sq = 0.0;
    for k in 0..4 {
        let d = models::frame_deriv::<f64>(&c.model, h_field.as_ref(), k, x)?[0];
        dh_sq += d * d;
    }
    Ok((dh_sq - 4.0 * rec.h * (1.0 - rec.h) * a1 * a1).abs())
}

/// Laplace eigenvalue residual |Δ(1−2h) − 4(a²−λ)(1−2h)| for Einstein
/// 4-dimensional candidates (second-order AD).
pub fn dim4_laplace_eigen_residual(c: &GksCandidate, x: &[f64]) -> Result<f64, DimError> {
    require_dim(c, 4)?;
    let lambda = c
        .lambda
        .expect("Laplace eigenvalue check presumes an Einstein model");
    let t = c.derived_tensors(x)?;
    let h_field: Arc<dyn SmoothMapDyn> = Arc::new(ChiralNormSq {
        rep: c.rep.clone(),
        psi: c.psi.clone(),
        positive: false,
    });
    let psi = c.psi_at::<f64>(x);
    let h = linalg::norm_sq(&c.rep.chirality_project(&psi, false));
    let lap_h = models::scalar_laplacian(&c.model, &h_field, x)?;
    let lap_one_minus_2h = -2.0 * lap_h;
    let eigen = 4.0 * (t.a_trace * t.a_trace - lambda);
    Ok((lap_one_minus_2h - eigen * (1.0 - 2.0 * h)).abs())
}

/// Norm-squared field of the negative chirality part (for AD/FD
/// cross-checks in the test suites).
pub fn h_field_of(c: &GksCandidate) -> Arc<dyn SmoothMapDyn> {
    Arc::new(ChiralNormSq {
        rep: c.rep.clone(),
        psi: c.psi.clone(),
        positive: false,
    })
}

/// |ψ|² field (plain).
pub fn norm_sq_field_of(c: &GksCandidate) -> Arc<dyn SmoothMapDyn> {
    Arc::new(NormSqField {
        inner: c.psi.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{candidate_by_name, make_killing_spinor};

    #[test]
    fn dim2_unit_sphere_det_is_quarter() {
        let c = candidate_by_name("restrict:s2").unwrap();
        let pts = c.sample(60, 10).unwrap();
        for p in &pts {
            let a = c.a_at::<f64>(&p.coords);
            let det_a = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
            assert!((det_a - 0.25).abs() < 1e-8);
            assert!(dim2_det_residual(&c, &p.coords).unwrap() < 1e-8);
        }
    }

    #[test]
    fn dim2_radius_two_sphere_det_scales() {
        let c = candidate_by_name("restrict:s2:r2").unwrap();
        let pts = c.sample(61, 5).unwrap();
        for p in &pts {
            let a = c.a_at::<f64>(&p.coords);
            let det_a = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
            assert!((det_a - 1.0 / 16.0).abs() < 1e-8, "det {det_a}");
            assert!(dim2_det_residual(&c, &p.coords).unwrap() < 1e-7);
        }
    }

    #[test]
    fn dim2_ellipsoid_matches_gauss_curvature() {
        let c = candidate_by_name("restrict:ellipsoid2").unwrap();
        let pts = c.sample(62, 10).unwrap();
        for p in &pts {
            assert!(dim2_det_residual(&c, &p.coords).unwrap() < 1e-5);
        }
    }

    #[test]
    fn dim4_killing_candidate_record() {
        let c = make_killing_spinor("s4", true).unwrap();
        let pts = sample_dim4(&c, 63, 15).unwrap();
        let mut cs = Vec::new();
        for p in &pts {
            let rec = dim4_invariants(&c, &p.coords).unwrap();
            assert!(rec.h > 0.0 && rec.h < 1.0);
            assert!(rec.eta_norm_res < 1e-7, "eta norm {}", rec.eta_norm_res);
            assert!(rec.dh_res < 1e-6, "dh {}", rec.dh_res);
            assert!(rec.grad_eta_res < 1e-6, "grad eta {}", rec.grad_eta_res);
            assert!(rec.d_eta_res < 1e-6);
            assert!(rec.div_eta_res < 1e-6);
            assert!(rec.laplace_h_res.unwrap() < 1e-4);
            assert!(rec.b_xi_res.unwrap() < 1e-6);
            assert!(rec.a1_eigen_res.unwrap() < 1e-6);
            cs.push(rec.c_value.unwrap());
            assert!(
                rec.c_value.unwrap().abs() < 1e-8,
                "C = {}",
                rec.c_value.unwrap()
            );
            assert!(dim4_l_consistency(&c, &p.coords).unwrap() < 1e-6);
            let lap = dim4_laplace_eigen_residual(&c, &p.coords).unwrap();
            assert!(lap < 1e-4, "Laplace eigenvalue residual {lap}");
        }
        assert!(std_dev(&cs) < 1e-6);
    }

    #[test]
    fn dim4_selfdual_checks_on_killing_candidate() {
        let c = make_killing_spinor("s4", true).unwrap();
        let pts = sample_dim4(&c, 64, 10).unwrap();
        for p in &pts {
            let r = dim4_selfdual_checks(&c, &p.coords).unwrap();
            assert!(r.block_res < 1e-8, "blocks {}", r.block_res);
            assert!(r.ab_res < 1e-6, "ab {}", r.ab_res);
            assert!(r.cor_t_res < 1e-6, "corT {}", r.cor_t_res);
        }
    }

    #[test]
    fn dim4_hypothesis_free_identities_on_non_einstein_candidate() {
        let c = candidate_by_name("restrict:paraboloid4").unwrap();
        let pts = c.sample(65, 8).unwrap();
        for p in &pts {
            let rec = dim4_invariants(&c, &p.coords).unwrap();
            assert!(rec.eta_norm_res < 1e-7);
            assert!(rec.dh_res < 1e-6);
            assert!(rec.grad_eta_res < 1e-6);
            assert!(rec.d_eta_res < 1e-6);
            assert!(rec.div_eta_res < 1e-6);
            assert!(rec.laplace_h_res.is_none());
            assert!(rec.c_value.is_none());
        }
    }

    #[test]
    fn dim5_structure_on_killing_candidate() {
        let c = make_killing_spinor("s5", true).unwrap();
        let pts = c.sample(66, 10).unwrap();
        for p in &pts {
            let rec = dim5_structure(&c, &p.coords).unwrap();
            assert!(rec.xi_solve_res < 1e-8, "xi solve {}", rec.xi_solve_res);
            assert!(rec.xi_unit_res < 1e-8);
            assert!(rec.l_skew_res < 1e-7);
            assert!(rec.l_complex_res < 1e-7, "L² {}", rec.l_complex_res);
            assert!(rec.l_xi_res < 1e-8);
            assert!(rec.cl1_res < 1e-7);
            assert!(rec.nxi_res < 1e-6, "nxi {}", rec.nxi_res);
            assert!(rec.deco_gram_res < 1e-8, "deco {}", rec.deco_gram_res);
            assert!(rec.a_preserves_res < 1e-6);
            // A = ½id: α = ½, A²|_D = ¼id, αα₁ = ¼
            assert!((rec.alpha - 0.5).abs() < 1e-8);
            for a in &rec.alpha_d {
                assert!((a * a - 0.25).abs() < 1e-8);
            }
            assert!(rec.a_sq_res < 1e-8);
            assert!((rec.alpha * rec.alpha_d[0] - 0.25).abs() < 1e-8);
        }
    }

    #[test]
    fn dim_checks_reject_wrong_dimension() {
        let c = candidate_by_name("s3-gks").unwrap();
        assert!(matches!(
            dim4_invariants(&c, &[0.1, 0.2, 0.3]),
            Err(DimError::WrongDimension {
                expected: 4,
                got: 3
            })
        ));
        assert!(matches!(
            dim5_structure(&c, &[0.1, 0.2, 0.3]),
            Err(DimError::WrongDimension {
                expected: 5,
                got: 3
            })
        ));
    }
}
