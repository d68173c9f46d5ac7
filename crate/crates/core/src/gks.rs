//! Generalized Killing spinor candidates and the identity battery derived
//! from the defining equation ∇_XΨ = A(X)·Ψ.
//!
//! A candidate bundles a manifold model, a Clifford representation, a unit
//! spinor field and a symmetric endomorphism field, all in the frame
//! trivialization. The checkers compute pointwise residuals of:
//! - the defining equation itself,
//! - Dirac value DΨ = −tr(A)·Ψ,
//! - the divergence/trace relations 0 = δA + da and scal = 4a² − 4trA²,
//! - the curvature relations T(σ)·Ψ = [½𝓡(σ) + 2A(σ)]·Ψ and
//!   T^Z·Ψ = 2B(Z)·Ψ with B = A² − aA + ¼Ric,
//! - the Lichnerowicz consequence ¼scal = tr²A − dtrA· + Σ(∇A)e_i· − trA².
//!
//! Operator residuals take the max over the frame vectors or the frame
//! 2-forms, so tolerances are comparable across modules.

use crate::ad::{Real, SmoothMapDyn};
use crate::clifford::{self, CliffordRep};
use crate::fields::{ConjugatedEndo, LinearMap, NormSqField, PerturbedEndo, ScaledMap};
use crate::linalg::{self, Mat};
use crate::models::{self, ChartPoint, CurvTensor, ManifoldModel, ModelError};
use std::sync::Arc;
use thiserror::Error;

/// Point-rejection predicate used by candidate samplers.
pub type SamplePredicate = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

#[derive(Debug, Error)]
pub enum GksError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Clifford(#[from] clifford::CliffordError),
    #[error(transparent)]
    Lift(#[from] clifford::LiftError),
    #[error("candidate '{name}' fails its defining equation: residual {residual:.3e} > {tol:.1e}")]
    Validation {
        name: String,
        residual: f64,
        tol: f64,
    },
}

/// A generalized Killing spinor candidate in frame trivialization.
#[derive(Clone)]
pub struct GksCandidate {
    pub name: String,
    pub model: Arc<ManifoldModel>,
    pub rep: Arc<CliffordRep>,
    /// Unit spinor field (d components).
    pub psi: Arc<dyn SmoothMapDyn>,
    /// Symmetric endomorphism field (n×n frame components, row-major).
    pub a_field: Arc<dyn SmoothMapDyn>,
    /// Einstein constant of the model, when declared Einstein.
    pub lambda: Option<f64>,
    /// Human-readable record of the sign conventions used by the build.
    pub convention: String,
    /// Extra sampling predicate (e.g. spin-lift conditioning).
    pub sample_pred: Option<SamplePredicate>,
}

/// Tensors derived from A at a point.
pub struct DerivedTensors {
    /// a = tr A.
    pub a_trace: f64,
    /// Frame components of da.
    pub da: Vec<f64>,
    /// δA = −Σ (∇_{e_i}A)e_i.
    pub div_a: Vec<f64>,
    /// B = A² − aA + ¼ Ric.
    pub b: Mat<f64>,
    /// Covariant derivatives ∇_{e_k}A.
    pub grad_a: Vec<Mat<f64>>,
    /// T^{e_m} as antisymmetric frame matrices.
    pub t_z: Vec<Mat<f64>>,
    /// A itself.
    pub a: Mat<f64>,
    /// Ricci tensor of the model at the point.
    pub ricci: Mat<f64>,
    pub scal: f64,
}

impl DerivedTensors {
    /// T(σ) as a frame vector, from g(T(X∧Y), Z) = T^Z(X, Y).
    pub fn t_apply(&self, sigma: &Mat<f64>) -> Vec<f64> {
        let n = self.a.rows;
        (0..n)
            .map(|m| {
                let mut s = 0.0;
                for p in 0..n {
                    for q in (p + 1)..n {
                        s += sigma[(p, q)] * self.t_z[m][(p, q)];
                    }
                }
                s
            })
            .collect()
    }
}

/// Residuals of the divergence/trace relations.
pub struct LemmaResiduals {
    /// Σ e_i∧(∇_{e_i}A)X·Ψ − [½Ric(X) + 2A²(X) − 2aA(X)]·Ψ, max over frame X.
    pub two: f64,
    /// |δA + da|.
    pub three1: f64,
    /// |scal − 4a² + 4trA²|.
    pub three2: f64,
}

/// Residuals of the curvature relations.
pub struct CurvatureResiduals {
    /// T(σ)·Ψ − [½𝓡(σ) + 2A(σ)]·Ψ, max over the frame 2-form basis.
    pub curv2: f64,
    /// T^Z·Ψ − 2B(Z)·Ψ, max over frame Z.
    pub two2: f64,
}

impl GksCandidate {
    /// Construct and normalize: the spinor is rescaled to unit length at the
    /// chart center (its norm is constant for a valid candidate), and the
    /// defining equation is verified at seeded sample points.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: &str,
        model: Arc<ManifoldModel>,
        rep: Arc<CliffordRep>,
        psi: Arc<dyn SmoothMapDyn>,
        a_field: Arc<dyn SmoothMapDyn>,
        lambda: Option<f64>,
        convention: &str,
        sample_pred: Option<SamplePredicate>,
        validation_tol: f64,
    ) -> Result<GksCandidate, GksError> {
        let center = vec![0.0; model.n];
        let at_center = crate::ad::eval_at::<f64>(psi.as_ref(), &center);
        let nrm = linalg::norm(&at_center);
        let psi = if (nrm - 1.0).abs() > 1e-12 {
            Arc::new(ScaledMap {
                factor: 1.0 / nrm,
                inner: psi,
            }) as Arc<dyn SmoothMapDyn>
        } else {
            psi
        };
        let cand = GksCandidate {
            name: name.into(),
            model,
            rep,
            psi,
            a_field,
            lambda,
            convention: convention.into(),
            sample_pred,
        };
        let pts = cand.sample(0xC0FFEE, 10)?;
        let mut worst = 0.0_f64;
        for p in &pts {
            worst = worst.max(cand.gks_residual(&p.coords)?);
        }
        if worst > validation_tol {
            return Err(GksError::Validation {
                name: name.into(),
                residual: worst,
                tol: validation_tol,
            });
        }
        Ok(cand)
    }

    /// Seeded chart points honoring the candidate's rejection predicate.
    pub fn sample(&self, seed: u64, count: usize) -> Result<Vec<ChartPoint>, ModelError> {
        let pred = self
            .sample_pred
            .as_ref()
            .map(|p| p.as_ref() as &dyn Fn(&[f64]) -> bool);
        self.model.sample_points(seed, count, pred)
    }

    pub fn psi_at<T: Real>(&self, x: &[T]) -> Vec<T> {
        crate::ad::eval_at::<T>(self.psi.as_ref(), x)
    }

    pub fn a_at<T: Real>(&self, x: &[T]) -> Mat<T> {
        let n = self.model.n;
        Mat {
            rows: n,
            cols: n,
            a: crate::ad::eval_at::<T>(self.a_field.as_ref(), x),
        }
    }

    /// max over frame directions k of |∇_{e_k}Ψ − A(e_k)·Ψ|.
    pub fn gks_residual(&self, x: &[f64]) -> Result<f64, GksError> {
        let n = self.model.n;
        let a = self.a_at::<f64>(x);
        let psi = self.psi_at::<f64>(x);
        let mut worst = 0.0_f64;
        for k in 0..n {
            let dk =
                models::spin_cov_deriv::<f64>(&self.model, &self.rep, self.psi.as_ref(), k, x)?;
            let ak = self.rep.mul_vector(&a.col(k), &psi)?;
            let res = linalg::norm(&linalg::sub_vec(&dk, &ak));
            worst = worst.max(res);
        }
        Ok(worst)
    }

    /// DΨ = Σ e_i·∇_{e_i}Ψ.
    pub fn dirac(&self, x: &[f64]) -> Result<Vec<f64>, GksError> {
        let n = self.model.n;
        let mut out = vec![0.0; self.rep.d];
        for i in 0..n {
            let di =
                models::spin_cov_deriv::<f64>(&self.model, &self.rep, self.psi.as_ref(), i, x)?;
            let gdi = self.rep.mul_basis(i, &di);
            for (o, v) in out.iter_mut().zip(&gdi) {
                *o += v;
            }
        }
        Ok(out)
    }

    /// |DΨ + tr(A)Ψ|.
    pub fn dirac_residual(&self, x: &[f64]) -> Result<f64, GksError> {
        let d = self.dirac(x)?;
        let a = self.a_at::<f64>(x);
        let psi = self.psi_at::<f64>(x);
        let expected: Vec<f64> = psi.iter().map(|&p| -a.trace() * p).collect();
        Ok(linalg::norm(&linalg::sub_vec(&d, &expected)))
    }

    /// Covariant derivatives (∇_{e_k}A)_{ij} = e_k(A_ij) − Σ_m (Γ_kjm A_im + Γ_kim A_mj).
    pub fn cov_deriv_a(&self, x: &[f64]) -> Result<Vec<Mat<f64>>, GksError> {
        let n = self.model.n;
        let a = self.a_at::<f64>(x);
        let gam = self.model.conn::<f64>(x)?;
        let mut grads = Vec::with_capacity(n);
        for k in 0..n {
            let da = models::frame_deriv::<f64>(&self.model, self.a_field.as_ref(), k, x)?;
            let m = Mat::from_fn(n, n, |i, j| {
                let mut v = da[i * n + j];
                for mm in 0..n {
                    v -= gam[k][(j, mm)] * a[(i, mm)] + gam[k][(i, mm)] * a[(mm, j)];
                }
                v
            });
            grads.push(m);
        }
        Ok(grads)
    }

    pub fn derived_tensors(&self, x: &[f64]) -> Result<DerivedTensors, GksError> {
        let n = self.model.n;
        let a = self.a_at::<f64>(x);
        let grad_a = self.cov_deriv_a(x)?;
        let a_trace = a.trace();
        let da: Vec<f64> = (0..n).map(|k| grad_a[k].trace()).collect();
        let div_a: Vec<f64> = (0..n)
            .map(|j| -(0..n).map(|i| grad_a[i][(j, i)]).sum::<f64>())
            .collect();
        let ricci = self.model.ricci(x)?;
        let scal = ricci.trace();
        let b = a
            .matmul(&a)
            .sub(&a.scalef(a_trace))
            .add(&ricci.scalef(0.25));
        let t_z: Vec<Mat<f64>> = (0..n)
            .map(|m| Mat::from_fn(n, n, |p, q| grad_a[p][(q, m)] - grad_a[q][(p, m)]))
            .collect();
        Ok(DerivedTensors {
            a_trace,
            da,
            div_a,
            b,
            grad_a,
            t_z,
            a,
            ricci,
            scal,
        })
    }

    /// Residuals of the divergence/trace relations at a point.
    pub fn lemma_residuals(&self, x: &[f64]) -> Result<LemmaResiduals, GksError> {
        let n = self.model.n;
        let t = self.derived_tensors(x)?;
        let psi = self.psi_at::<f64>(x);
        let mut two = 0.0_f64;
        for m in 0..n {
            let lhs = self.rep.mul_two_form(&t.t_z[m], &psi);
            // ½Ric(X) + 2A²(X) − 2aA(X)
            let a2 = t.a.matmul(&t.a);
            let mut vec = vec![0.0; n];
            for i in 0..n {
                vec[i] = 0.5 * t.ricci[(i, m)] + 2.0 * a2[(i, m)] - 2.0 * t.a_trace * t.a[(i, m)];
            }
            let rhs = self.rep.mul_vector(&vec, &psi)?;
            two = two.max(linalg::norm(&linalg::sub_vec(&lhs, &rhs)));
        }
        let three1 = linalg::norm(&linalg::add_vec(&t.div_a, &t.da));
        let tr_a2 = t.a.matmul(&t.a).trace();
        let three2 = (t.scal - 4.0 * t.a_trace * t.a_trace + 4.0 * tr_a2).abs();
        Ok(LemmaResiduals {
            two,
            three1,
            three2,
        })
    }

    /// Residuals of the curvature relations at a point.
    pub fn curvature_residuals(&self, x: &[f64]) -> Result<CurvatureResiduals, GksError> {
        let n = self.model.n;
        let t = self.derived_tensors(x)?;
        let curv = self.model.curv_tensor(x)?;
        let psi = self.psi_at::<f64>(x);
        let mut curv2 = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut sigma = Mat::<f64>::zeros(n, n);
                sigma[(p, q)] = 1.0;
                sigma[(q, p)] = -1.0;
                let t_sigma = t.t_apply(&sigma);
                let lhs = self.rep.mul_vector(&t_sigma, &psi)?;
                // ½𝓡(σ) + 2A(σ) with A(σ) = AσAᵀ
                let r_sigma = curv.apply(&sigma);
                let a_sigma = t.a.matmul(&sigma.matmul(&t.a.transpose()));
                let rhs_form = r_sigma.scalef(0.5).add(&a_sigma.scalef(2.0));
                let rhs = self.rep.mul_two_form(&rhs_form, &psi);
                curv2 = curv2.max(linalg::norm(&linalg::sub_vec(&lhs, &rhs)));
            }
        }
        let mut two2 = 0.0_f64;
        for m in 0..n {
            let lhs = self.rep.mul_two_form(&t.t_z[m], &psi);
            let rhs = self.rep.mul_vector(
                &t.b.col(m).iter().map(|v| 2.0 * v).collect::<Vec<_>>(),
                &psi,
            )?;
            two2 = two2.max(linalg::norm(&linalg::sub_vec(&lhs, &rhs)));
        }
        Ok(CurvatureResiduals { curv2, two2 })
    }

    /// |tr B|; vanishes whenever the trace relation holds.
    pub fn b_trace(&self, x: &[f64]) -> Result<f64, GksError> {
        Ok(self.derived_tensors(x)?.b.trace().abs())
    }

    /// Residual of the Lichnerowicz consequence
    /// ¼scal·Ψ − [tr²A·Ψ − dtrA·Ψ + Σ(∇_{e_i}A)e_i·Ψ − trA²·Ψ].
    pub fn lichnerowicz_residual(&self, x: &[f64]) -> Result<f64, GksError> {
        let t = self.derived_tensors(x)?;
        let psi = self.psi_at::<f64>(x);
        let tr_a2 = t.a.matmul(&t.a).trace();
        let da_psi = self.rep.mul_vector(&t.da, &psi)?;
        // Σ(∇_{e_i}A)e_i = −δA
        let sum_grad: Vec<f64> = t.div_a.iter().map(|v| -v).collect();
        let grad_psi = self.rep.mul_vector(&sum_grad, &psi)?;
        let resid: Vec<f64> = (0..self.rep.d)
            .map(|i| {
                let rhs = t.a_trace * t.a_trace * psi[i] - da_psi[i] + grad_psi[i] - tr_a2 * psi[i];
                0.25 * t.scal * psi[i] - rhs
            })
            .collect();
        Ok(linalg::norm(&resid))
    }

    /// |d|Ψ|²| along the frame, an AD-only route to norm constancy.
    pub fn norm_constancy_residual(&self, x: &[f64]) -> Result<f64, GksError> {
        let field = NormSqField {
            inner: self.psi.clone(),
        };
        let mut worst = 0.0_f64;
        for k in 0..self.model.n {
            let d = models::frame_deriv::<f64>(&self.model, &field, k, x)?;
            worst = worst.max(d[0].abs());
        }
        Ok(worst)
    }

    /// The negative control: A ↦ A + ε·id without revalidation.
    pub fn with_perturbed_a(&self, eps: f64) -> GksCandidate {
        let mut c = self.clone();
        c.name = format!("{}+perturbed", self.name);
        c.a_field = Arc::new(PerturbedEndo {
            n: self.model.n,
            eps,
            inner: self.a_field.clone(),
        });
        c
    }

    /// Re-express the candidate in a constantly rotated frame: the model
    /// frame, the endomorphism and the spinor components transform together,
    /// so every residual is unchanged up to roundoff.
    pub fn with_rotated_frame(&self, q: Mat<f64>) -> Result<GksCandidate, GksError> {
        let lift_inv = clifford::inverse_lift_matrix(&self.rep, &q)?;
        let mut c = self.clone();
        c.name = format!("{}+rotated", self.name);
        c.model = Arc::new(self.model.with_frame_rotation(q.clone()));
        c.psi = Arc::new(LinearMap {
            matrix: lift_inv,
            inner: self.psi.clone(),
        });
        c.a_field = Arc::new(ConjugatedEndo {
            n: self.model.n,
            q,
            inner: self.a_field.clone(),
        });
        Ok(c)
    }

    /// Curvature tensor of the model, exposed for the dimension-specific
    /// verifiers.
    pub fn curv_tensor(&self, x: &[f64]) -> Result<CurvTensor, GksError> {
        Ok(self.model.curv_tensor(x)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::build_clifford_rep;
    use crate::fields::ConstMap;
    use crate::models::flat_model;

    fn flat_parallel_candidate(n: usize) -> GksCandidate {
        let model = Arc::new(flat_model(n));
        let rep = Arc::new(build_clifford_rep(n).unwrap());
        let mut phi0 = vec![0.0; rep.d];
        phi0[0] = 1.0;
        let psi = Arc::new(ConstMap {
            dim_in: n,
            values: phi0,
        });
        let a = Arc::new(ConstMap {
            dim_in: n,
            values: vec![0.0; n * n],
        });
        GksCandidate::new(
            &format!("parallel:flat{n}"),
            model,
            rep,
            psi,
            a,
            Some(0.0),
            "parallel spinor on the flat chart",
            None,
            1e-12,
        )
        .unwrap()
    }

    #[test]
    fn flat_parallel_spinor_has_zero_residuals() {
        let c = flat_parallel_candidate(3);
        let x = [0.2, -0.1, 0.4];
        assert!(c.gks_residual(&x).unwrap() < 1e-15);
        assert!(linalg::norm(&c.dirac(&x).unwrap()) < 1e-15);
        let l = c.lemma_residuals(&x).unwrap();
        assert!(l.two < 1e-12 && l.three1 < 1e-12 && l.three2 < 1e-12);
        assert!(c.lichnerowicz_residual(&x).unwrap() < 1e-12);
    }

    #[test]
    fn perturbed_candidate_raises_residual_by_eps() {
        let c = flat_parallel_candidate(4);
        let p = c.with_perturbed_a(0.05);
        let x = [0.1, 0.0, -0.3, 0.2];
        let r = p.gks_residual(&x).unwrap();
        // |0.05·γ_k·Ψ|_∞ for unit Ψ: the max-abs entry of γ_kΨ over k is 1
        // for the flat constant spinor, so the residual is exactly 0.05.
        assert!((r - 0.05).abs() < 1e-12, "residual {r}");
    }
}
