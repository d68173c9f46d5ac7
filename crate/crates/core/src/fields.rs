//! Concrete differentiable fields: the shipped spinor candidates and the
//! endomorphism fields that accompany them.
//!
//! Sign conventions baked in here (and recorded in reports):
//! - On the sphere charts the Killing spinors are
//!   Ψ(y) = (1+|y|²)^{-1/2}(1 ± γ(y))·Φ₀ with Killing constant ±1/(2r).
//! - On the S³ group model, fields constant in the left-invariant
//!   trivialization have Killing constant −½; the +½ Killing spinors are
//!   q ↦ (w + aγ₁ + bγ₂ + cγ₃)Φ₀ for q = (a,b,c,w) the chart point on the
//!   unit quaternions.
//! - Restrictions of parallel spinors use the induced Clifford action
//!   X•Ψ = X·ν·Ψ and carry A = ½·II.

use crate::ad::{eval_at, Real, SmoothMap, SmoothMapDyn};
use crate::clifford::{self, CliffordRep};
use crate::linalg::{self, Mat};
use crate::models::ManifoldModel;
use std::sync::Arc;

/// Constant map (parallel spinor in a flat trivialization, constant A, ...).
pub struct ConstMap {
    pub dim_in: usize,
    pub values: Vec<f64>,
}

impl SmoothMap for ConstMap {
    fn dim_in(&self) -> usize {
        self.dim_in
    }
    fn dim_out(&self) -> usize {
        self.values.len()
    }
    fn eval<T: Real>(&self, _x: &[T], out: &mut [T]) {
        for (o, &c) in out.iter_mut().zip(&self.values) {
            *o = T::from_f64(c);
        }
    }
}

/// Post-compose a map with a constant matrix.
pub struct LinearMap {
    pub matrix: Mat<f64>,
    pub inner: Arc<dyn SmoothMapDyn>,
}

impl SmoothMap for LinearMap {
    fn dim_in(&self) -> usize {
        self.inner.dim_in()
    }
    fn dim_out(&self) -> usize {
        self.matrix.rows
    }
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
        let v = eval_at::<T>(self.inner.as_ref(), x);
        out.copy_from_slice(&clifford::apply(&self.matrix, &v));
    }
}

/// Scale a map by a constant (candidate normalization).
pub struct ScaledMap {
    pub factor: f64,
    pub inner: Arc<dyn SmoothMapDyn>,
}

impl SmoothMap for ScaledMap {
    fn dim_in(&self) -> usize {
        self.inner.dim_in()
    }
    fn dim_out(&self) -> usize {
        self.inner.dim_out()
    }
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
        let v = eval_at::<T>(self.inner.as_ref(), x);
        for (o, val) in out.iter_mut().zip(v) {
            *o = val.mulf(self.factor);
        }
    }
}

/// Killing spinor on the radius-r sphere in the stereographic chart with the
/// conformal frame: Ψ(y) = (1+|y|²)^{-1/2}(Φ₀ + b·γ(y)Φ₀), b = ±1, with
/// Killing constant b/(2r).
pub struct SphereKillingSpinor {
    pub n: usize,
    pub b: f64,
    pub rep: Arc<CliffordRep>,
    pub phi0: Vec<f64>,
}

impl SmoothMap for SphereKillingSpinor {
    fn dim_in(&self) -> usize {
        self.n
    }
    fn dim_out(&self) -> usize {
        self.rep.d
    }
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
        let phi: Vec<T> = self.phi0.iter().map(|&c| T::from_f64(c)).collect();
        let gphi = self
            .rep
            .mul_vector(x, &phi)
            .expect("chart dimension matches representation");
        let f = T::one() / (T::one() + linalg::norm_sq(x)).sqrt();
        for (o, (p, g)) in out.iter_mut().zip(phi.iter().zip(&gphi)) {
            *o = (*p + g.mulf(self.b)) * f;
        }
    }
}

/// Killing spinor with constant +½ on the S³ group model: the spin
/// representation of the inverse group element applied to a constant spinor.
pub struct S3KillingPlus {
    pub rep: Arc<CliffordRep>,
    pub emb: Arc<dyn SmoothMapDyn>,
    pub phi0: Vec<f64>,
}

impl SmoothMap for S3KillingPlus {
    fn dim_in(&self) -> usize {
        3
    }
    fn dim_out(&self) -> usize {
        self.rep.d
    }
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
        let q = eval_at::<T>(self.emb.as_ref(), x);
        let phi: Vec<T> = self.phi0.iter().map(|&c| T::from_f64(c)).collect();
        // ρ(q⁻¹)Φ₀ = (w + aγ₁ + bγ₂ + cγ₃)Φ₀ for q = (a, b, c, w).
        let mut acc: Vec<T> = phi.iter().map(|&p| p * q[3]).collect();
        for k in 0..3 {
            let gp = self.rep.mul_basis(k, &phi);
            for (o, g) in acc.iter_mut().zip(&gp) {
                *o += q[k] * *g;
            }
        }
        out.copy_from_slice(&acc);
    }
}

/// Restriction of a constant ambient spinor to a hypersurface, expressed in
/// the adapted-frame trivialization via the inverse spin lift of the frame
/// rotation (tangent frame columns followed by the oriented normal).
pub struct RestrictedParallelSpinor {
    pub model: ManifoldModel,
    pub ambient: Arc<CliffordRep>,
    pub phi0: Vec<f64>,
    pub min_pivot: f64,
}

impl RestrictedParallelSpinor {
    /// Adapted-frame rotation at a point: columns are the tangent frame in
    /// ambient components followed by the oriented unit normal.
    pub fn adapted_rotation<T: Real>(&self, x: &[T]) -> Mat<T> {
        let n = self.model.n;
        let f = self
            .model
            .frame::<T>(x)
            .expect("frame degenerate inside restriction field");
        let q = f.ambient.expect("restriction requires an embedded model");
        let nu = f.normal.expect("restriction requires a hypersurface");
        let mut r = Mat::<T>::zeros(n + 1, n + 1);
        for i in 0..n {
            r.set_col(i, &q.col(i));
        }
        r.set_col(n, &nu);
        r
    }

    /// Whether the spin-lift factorization is well-conditioned at a point;
    /// samplers use this to reject bad points.
    pub fn lift_ok(&self, x: &[f64]) -> bool {
        clifford::givens_factors::<f64>(&self.adapted_rotation::<f64>(x), self.min_pivot).is_ok()
    }
}

impl SmoothMap for RestrictedParallelSpinor {
    fn dim_in(&self) -> usize {
        self.model.n
    }
    fn dim_out(&self) -> usize {
        self.ambient.d
    }
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
        let r = self.adapted_rotation::<T>(x);
        let factors = clifford::givens_factors(&r, self.min_pivot)
            .expect("spin lift pivot failure; sampler should have rejected this point");
        let psi = clifford::apply_inverse_lift(&self.ambient.gammas, &factors, &self.phi0);
        out.copy_from_slice(&psi);
    }
}

/// Constant endomorphism field (frame components).
pub struct ConstEndo {
    pub dim_in: usize,
    pub m: Mat<f64>,
}

impl SmoothMap for ConstEndo {
    fn dim_in(&self) -> usize {
        self.dim_in
    }
    fn dim_out(&self) -> usize {
        self.m.rows * self.m.cols
    }
    fn eval<T: Real>(&self, _x: &[T], out: &mut [T]) {
        for (o, &c) in out.iter_mut().zip(&self.m.a) {
            *o = T::from_f64(c);
        }
    }
}

/// Half the second fundamental form of a hypersurface model, as an
/// endomorphism field in frame components (exactly symmetric).
pub struct HalfSecondFundamental {
    pub model: ManifoldModel,
}

impl SmoothMap for HalfSecondFundamental {
    fn dim_in(&self) -> usize {
        self.model.n
    }
    fn dim_out(&self) -> usize {
        self.model.n * self.model.n
    }
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
        let ii = self
            .model
            .second_fundamental::<T>(x)
            .expect("second fundamental form degenerate inside field");
        for (o, &v) in out.iter_mut().zip(&ii.a) {
            *o = v.mulf(0.5);
        }
    }
}

/// A + ε·id, the negative control for the check harness.
pub struct PerturbedEndo {
    pub n: usize,
    pub eps: f64,
    pub inner: Arc<dyn SmoothMapDyn>,
}

impl SmoothMap for PerturbedEndo {
    fn dim_in(&self) -> usize {
        self.inner.dim_in()
    }
    fn dim_out(&self) -> usize {
        self.n * self.n
    }
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
        let v = eval_at::<T>(self.inner.as_ref(), x);
        out.copy_from_slice(&v);
        for i in 0..self.n {
            out[i * self.n + i] += T::from_f64(self.eps);
        }
    }
}

/// QᵀAQ for a constant frame rotation Q.
pub struct ConjugatedEndo {
    pub n: usize,
    pub q: Mat<f64>,
    pub inner: Arc<dyn SmoothMapDyn>,
}

impl SmoothMap for ConjugatedEndo {
    fn dim_in(&self) -> usize {
        self.inner.dim_in()
    }
    fn dim_out(&self) -> usize {
        self.n * self.n
    }
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
        let n = self.n;
        let v = eval_at::<T>(self.inner.as_ref(), x);
        let a = Mat {
            rows: n,
            cols: n,
            a: v,
        };
        let q = Mat::<T>::lift(&self.q);
        let rotated = q.transpose().matmul(&a.matmul(&q));
        out.copy_from_slice(&rotated.a);
    }
}

/// Deterministic low-degree polynomial field, used by smoke checks that
/// need an arbitrary differentiable field (metric compatibility of the spin
/// connection, AD/FD agreement, curvature commutators).
pub struct PolyTestField {
    pub n: usize,
    pub d: usize,
    coeffs: Vec<f64>,
}

impl PolyTestField {
    pub fn seeded(n: usize, d: usize, seed: u64) -> Self {
        // splitmix64 stream; fixed seed gives fixed coefficients.
        let mut state = seed.wrapping_add(0x9E3779B97F4A7C15);
        let mut next = move || {
            state = state.wrapping_add(0x9E3779B97F4A7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
            z = z ^ (z >> 31);
            (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let coeffs = (0..d * (2 + n)).map(|_| next()).collect();
        PolyTestField { n, d, coeffs }
    }
}

impl SmoothMap for PolyTestField {
    fn dim_in(&self) -> usize {
        self.n
    }
    fn dim_out(&self) -> usize {
        self.d
    }
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
        for i in 0..self.d {
            let base = i * (2 + self.n);
            let mut v = T::from_f64(self.coeffs[base]);
            for a in 0..self.n {
                v += x[a].mulf(self.coeffs[base + 1 + a]);
            }
            v += (x[0] * x[(i + 1) % self.n]).mulf(self.coeffs[base + 1 + self.n]);
            out[i] = v;
        }
    }
}

/// |ψ|² of a spinor field, as a scalar map.
pub struct NormSqField {
    pub inner: Arc<dyn SmoothMapDyn>,
}

impl SmoothMap for NormSqField {
    fn dim_in(&self) -> usize {
        self.inner.dim_in()
    }
    fn dim_out(&self) -> usize {
        1
    }
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
        let v = eval_at::<T>(self.inner.as_ref(), x);
        out[0] = linalg::norm_sq(&v);
    }
}
