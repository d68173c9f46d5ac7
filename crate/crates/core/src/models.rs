//! Frame-trivialized Riemannian models.
//!
//! A model is a single chart covering a dense open set, an orthonormal
//! tangent frame obtained by Gram-Schmidt on the coordinate fields (in fixed
//! index order), and everything derived from those: connection coefficients
//! Γ_kij = g(∇_{e_k}e_i, e_j), the curvature operator on 2-forms, Ricci,
//! scalar curvature, and — for hypersurfaces of Euclidean space — the second
//! fundamental form in the Weingarten convention II(X,Y) = ⟨D_X ν, Y⟩ with
//! the unit normal ν oriented so that (frame, ν) is positively oriented in
//! the ambient space. With that convention the unit sphere with the
//! stereographic parametrization below has II = +id (outward normal).
//!
//! All point evaluations are generic over the AD scalar, so connection
//! coefficients cost one derivative of the frame and curvature costs one
//! derivative of the connection; nothing here differentiates through an
//! eigen decomposition.

use crate::ad::{dir_deriv, eval_at, Real, SmoothMap, SmoothMapDyn};
use crate::clifford::CliffordRep;
use crate::linalg::{self, Mat};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("dimension {0} outside supported range {1}..={2}")]
    DimensionOutOfRange(usize, usize, usize),
    #[error("degenerate point: {0}")]
    Degenerate(String),
    #[error("embedding is not an immersion near the chart center: {0}")]
    NotImmersion(String),
    #[error("model has no second fundamental form (not a hypersurface)")]
    NotHypersurface,
    #[error("sampler exhausted {0} attempts; rejection predicate too strict")]
    SamplingExhausted(usize),
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
}

/// A point in the model's single chart.
#[derive(Clone, Debug)]
pub struct ChartPoint {
    pub coords: Vec<f64>,
}

impl ChartPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        ChartPoint { coords }
    }
}

// ---------------------------------------------------------------------------
// Embeddings.
// ---------------------------------------------------------------------------

/// Inverse stereographic parametrization of the radius-r sphere,
/// x ↦ r·(2x, 1-|x|²)/(1+|x|²), covering the sphere minus one pole.
pub struct InverseStereographic {
    pub n: usize,
    pub r: f64,
}

impl SmoothMap for InverseStereographic {
    fn dim_in(&self) -> usize {
        self.n
    }
    fn dim_out(&self) -> usize {
        self.n + 1
    }
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
        let s = linalg::norm_sq(x);
        let denom = T::one() / (T::one() + s);
        for a in 0..self.n {
            out[a] = (x[a] + x[a]).mulf(self.r) * denom;
        }
        out[self.n] = (T::one() - s).mulf(self.r) * denom;
    }
}

/// Ellipsoid as a diagonally scaled sphere parametrization.
pub struct EllipsoidEmbedding {
    pub semi_axes: Vec<f64>,
}

impl SmoothMap for EllipsoidEmbedding {
    fn dim_in(&self) -> usize {
        self.semi_axes.len() - 1
    }
    fn dim_out(&self) -> usize {
        self.semi_axes.len()
    }
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
        let sphere = InverseStereographic {
            n: self.semi_axes.len() - 1,
            r: 1.0,
        };
        sphere.eval(x, out);
        for (o, &ax) in out.iter_mut().zip(&self.semi_axes) {
            *o = o.mulf(ax);
        }
    }
}

/// Graph patch x ↦ (x, |x|²/2); the second fundamental form at the origin is
/// the identity. The first two ambient slots are swapped so that the
/// positively oriented normal points away from the bowl, matching the
/// outward convention of the sphere charts.
pub struct ParaboloidEmbedding {
    pub n: usize,
}

impl SmoothMap for ParaboloidEmbedding {
    fn dim_in(&self) -> usize {
        self.n
    }
    fn dim_out(&self) -> usize {
        self.n + 1
    }
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
        out[..self.n].copy_from_slice(x);
        out.swap(0, 1);
        out[self.n] = linalg::norm_sq(x).mulf(0.5);
    }
}

// ---------------------------------------------------------------------------
// The model.
// ---------------------------------------------------------------------------

#[derive(Clone)]
pub enum Geometry {
    /// Euclidean chart of R^n: identity frame, vanishing connection.
    Flat { n: usize },
    /// Unit S³ as the Lie group of unit quaternions with the left-invariant
    /// frame ξ_a(q) = q·e_a and constant connection coefficients ε_kaj.
    S3Group { emb: Arc<dyn SmoothMapDyn> },
    /// Hypersurface of Euclidean (n+1)-space given by a parametrization.
    Hypersurface { emb: Arc<dyn SmoothMapDyn> },
}

/// Frame data at a point.
pub struct FrameData<T> {
    /// Chart components: column k holds the ∂/∂x^a components of e_k.
    pub chart: Mat<T>,
    /// Ambient components of the frame (embedded models only).
    pub ambient: Option<Mat<T>>,
    /// Oriented unit normal (hypersurfaces only).
    pub normal: Option<Vec<T>>,
}

#[derive(Clone)]
pub struct ManifoldModel {
    pub name: String,
    pub n: usize,
    pub geometry: Geometry,
    /// Einstein constant λ with Ric = λ·g, when the model is declared
    /// Einstein.
    pub einstein: Option<f64>,
    /// Half-width of the chart-coordinate sampling box.
    pub sample_half_width: f64,
    /// Optional constant frame rotation (used by frame-independence checks).
    pub frame_rotation: Option<Arc<Mat<f64>>>,
}

/// Round sphere of dimension n and radius r in a stereographic chart.
pub fn sphere_model(n: usize, r: f64) -> Result<ManifoldModel, ModelError> {
    if !(2..=7).contains(&n) {
        return Err(ModelError::DimensionOutOfRange(n, 2, 7));
    }
    assert!(r > 0.0, "sphere radius must be positive");
    let name = if r == 1.0 {
        format!("s{n}")
    } else {
        format!("s{n}:r{r}")
    };
    Ok(ManifoldModel {
        name,
        n,
        geometry: Geometry::Hypersurface {
            emb: Arc::new(InverseStereographic { n, r }),
        },
        einstein: Some((n as f64 - 1.0) / (r * r)),
        sample_half_width: 2.0,
        frame_rotation: None,
    })
}

/// Unit S³ with the global left-invariant frame.
pub fn s3_group_model() -> ManifoldModel {
    ManifoldModel {
        name: "s3-group".into(),
        n: 3,
        geometry: Geometry::S3Group {
            emb: Arc::new(InverseStereographic { n: 3, r: 1.0 }),
        },
        einstein: Some(2.0),
        sample_half_width: 2.0,
        frame_rotation: None,
    }
}

/// Euclidean chart model of R^n.
pub fn flat_model(n: usize) -> ManifoldModel {
    ManifoldModel {
        name: format!("flat{n}"),
        n,
        geometry: Geometry::Flat { n },
        einstein: Some(0.0),
        sample_half_width: 1.0,
        frame_rotation: None,
    }
}

/// General hypersurface model from a parametrization of a patch of
/// Euclidean (n+1)-space. Verifies the immersion condition on a probe grid.
pub fn hypersurface_model(
    name: &str,
    emb: Arc<dyn SmoothMapDyn>,
    sample_half_width: f64,
) -> Result<ManifoldModel, ModelError> {
    let n = emb.dim_in();
    if emb.dim_out() != n + 1 {
        return Err(ModelError::NotImmersion(format!(
            "expected codimension one, got {} -> {}",
            n,
            emb.dim_out()
        )));
    }
    let model = ManifoldModel {
        name: name.into(),
        n,
        geometry: Geometry::Hypersurface { emb },
        einstein: None,
        sample_half_width,
        frame_rotation: None,
    };
    // Immersion probe: Jacobian condition number at the center and at one
    // generic off-center point must stay below 1e8.
    for probe in [
        vec![0.0; n],
        (0..n).map(|a| 0.37 + 0.11 * a as f64).collect(),
    ] {
        let jac = model.jacobian::<f64>(&probe);
        let jtj = jac.transpose().matmul(&jac);
        let (vals, _) = linalg::sym_eigen(&jtj);
        if vals[0] <= 0.0 || (vals[n - 1] / vals[0]).sqrt() > 1e8 {
            return Err(ModelError::NotImmersion(format!(
                "Jacobian condition {:.3e} at probe {:?}",
                (vals[n - 1] / vals[0].max(1e-300)).sqrt(),
                probe
            )));
        }
    }
    Ok(model)
}

/// Ellipsoid hypersurface with the given semi-axes ((n+1) of them).
pub fn ellipsoid_model(semi_axes: &[f64]) -> Result<ManifoldModel, ModelError> {
    let n = semi_axes.len() - 1;
    hypersurface_model(
        &format!("ellipsoid{n}"),
        Arc::new(EllipsoidEmbedding {
            semi_axes: semi_axes.to_vec(),
        }),
        2.0,
    )
}

/// Paraboloid graph patch in (n+1)-space.
pub fn paraboloid_model(n: usize) -> Result<ManifoldModel, ModelError> {
    hypersurface_model(
        &format!("paraboloid{n}"),
        Arc::new(ParaboloidEmbedding { n }),
        1.0,
    )
}

// Quaternion product q·e_a for q = (a, b, c, w) (vector part first, real
// part last, matching the stereographic embedding).
fn quat_frame_columns<T: Real>(q: &[T]) -> Mat<T> {
    let (a, b, c, w) = (q[0], q[1], q[2], q[3]);
    // columns: q·i, q·j, q·k
    Mat::from_rows(&[
        vec![w, -c, b],
        vec![c, w, -a],
        vec![-b, a, w],
        vec![-a, -b, -c],
    ])
}

fn levi_civita_symbol(k: usize, i: usize, j: usize) -> f64 {
    match (k, i, j) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

impl ManifoldModel {
    pub fn with_frame_rotation(&self, q: Mat<f64>) -> ManifoldModel {
        let mut m = self.clone();
        m.frame_rotation = Some(Arc::new(q));
        m
    }

    /// Embedding Jacobian (embedded models only): column a = ∂_a of the
    /// parametrization.
    fn jacobian<T: Real>(&self, x: &[T]) -> Mat<T> {
        let emb: &Arc<dyn SmoothMapDyn> = match &self.geometry {
            Geometry::Hypersurface { emb } | Geometry::S3Group { emb } => emb,
            Geometry::Flat { .. } => panic!("flat model has no embedding"),
        };
        let m = emb.dim_out();
        let mut jac = Mat::<T>::zeros(m, self.n);
        for a in 0..self.n {
            let col = crate::ad::partial(emb.as_ref(), x, a);
            jac.set_col(a, &col);
        }
        jac
    }

    /// Chart metric G_ab = g(∂_a, ∂_b).
    pub fn metric<T: Real>(&self, x: &[T]) -> Mat<T> {
        match &self.geometry {
            Geometry::Flat { n } => Mat::identity(*n),
            _ => {
                let jac = self.jacobian(x);
                jac.transpose().matmul(&jac)
            }
        }
    }

    fn frame_base<T: Real>(&self, x: &[T]) -> Result<FrameData<T>, ModelError> {
        match &self.geometry {
            Geometry::Flat { n } => Ok(FrameData {
                chart: Mat::identity(*n),
                ambient: None,
                normal: None,
            }),
            Geometry::S3Group { emb } => {
                let q = eval_at::<T>(emb.as_ref(), x);
                let ambient = quat_frame_columns(&q);
                let jac = self.jacobian(x);
                let jtj = jac.transpose().matmul(&jac);
                let jta = jac.transpose().matmul(&ambient);
                let chart = linalg::gauss_solve(&jtj, &jta)?;
                Ok(FrameData {
                    chart,
                    ambient: Some(ambient),
                    normal: None,
                })
            }
            Geometry::Hypersurface { .. } => {
                let jac = self.jacobian(x);
                let (q, r) = linalg::qr_mgs(&jac)?;
                let chart = linalg::upper_tri_inverse(&r);
                let normal = linalg::oriented_unit_normal(&q);
                Ok(FrameData {
                    chart,
                    ambient: Some(q),
                    normal: Some(normal),
                })
            }
        }
    }

    /// Orthonormal frame at a point (rotated if a frame rotation is set).
    pub fn frame<T: Real>(&self, x: &[T]) -> Result<FrameData<T>, ModelError> {
        let mut f = self.frame_base(x)?;
        if let Some(q) = &self.frame_rotation {
            let qt = Mat::<T>::lift(q);
            f.chart = f.chart.matmul(&qt);
            f.ambient = f.ambient.map(|a| a.matmul(&qt));
        }
        Ok(f)
    }

    fn conn_base<T: Real>(&self, x: &[T]) -> Result<Vec<Mat<T>>, ModelError> {
        let n = self.n;
        match &self.geometry {
            Geometry::Flat { .. } => Ok(vec![Mat::zeros(n, n); n]),
            Geometry::S3Group { .. } => Ok((0..n)
                .map(|k| Mat::from_fn(n, n, |i, j| T::from_f64(levi_civita_symbol(k, i, j))))
                .collect()),
            Geometry::Hypersurface { emb } => {
                let f = self.frame_base(x)?;
                let q = f
                    .ambient
                    .as_ref()
                    .expect("hypersurface frame has ambient data");
                let frame_map = AmbientFrameMap {
                    emb: emb.clone(),
                    n,
                };
                let mut gam = Vec::with_capacity(n);
                for k in 0..n {
                    let dir = f.chart.col(k);
                    let dq = dir_deriv(&frame_map, x, &dir);
                    // Γ_kij = ⟨D_{e_k} E_i, E_j⟩
                    let m = Mat::from_fn(n, n, |i, j| {
                        let mut s = T::zero();
                        for alpha in 0..=n {
                            s += dq[alpha * n + i] * q[(alpha, j)];
                        }
                        s
                    });
                    gam.push(m);
                }
                Ok(gam)
            }
        }
    }

    /// Connection coefficients Γ_kij = g(∇_{e_k}e_i, e_j), antisymmetric in
    /// (i, j).
    pub fn conn<T: Real>(&self, x: &[T]) -> Result<Vec<Mat<T>>, ModelError> {
        let base = self.conn_base(x)?;
        match &self.frame_rotation {
            None => Ok(base),
            Some(q) => {
                let n = self.n;
                let qt = Mat::<T>::lift(q);
                let mut out = vec![Mat::<T>::zeros(n, n); n];
                for k in 0..n {
                    // rotate the middle and last slots first
                    let rotated = qt.transpose().matmul(&base[k].matmul(&qt));
                    for (kk, o) in out.iter_mut().enumerate() {
                        let w = qt[(k, kk)];
                        for i in 0..n {
                            for j in 0..n {
                                o[(i, j)] += w * rotated[(i, j)];
                            }
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// Second fundamental form in frame components (hypersurfaces only);
    /// symmetrized, Weingarten convention II_ki = ⟨D_{e_k} ν, E_i⟩.
    pub fn second_fundamental<T: Real>(&self, x: &[T]) -> Result<Mat<T>, ModelError> {
        let Geometry::Hypersurface { emb } = &self.geometry else {
            return Err(ModelError::NotHypersurface);
        };
        let n = self.n;
        let f = self.frame_base(x)?;
        let q = f.ambient.as_ref().unwrap();
        let normal_map = NormalMap {
            emb: emb.clone(),
            n,
        };
        let mut ii = Mat::<T>::zeros(n, n);
        for k in 0..n {
            let dn = dir_deriv(&normal_map, x, &f.chart.col(k));
            for i in 0..n {
                let mut s = T::zero();
                for alpha in 0..=n {
                    s += dn[alpha] * q[(alpha, i)];
                }
                ii[(k, i)] = s;
            }
        }
        let mut ii = ii.symmetrized();
        if let Some(rot) = &self.frame_rotation {
            let qt = Mat::<T>::lift(rot);
            ii = qt.transpose().matmul(&ii.matmul(&qt));
        }
        Ok(ii)
    }

    /// Full curvature tensor R_klij = g(R(e_k, e_l)e_i, e_j) at a point.
    pub fn curv_tensor(&self, x: &[f64]) -> Result<CurvTensor, ModelError> {
        let n = self.n;
        let gam = self.conn_base(x)?;
        let f = self.frame_base(x)?;
        let conn_map = ConnMap {
            model: self.without_rotation(),
        };
        let mut dgam = Vec::with_capacity(n);
        for k in 0..n {
            dgam.push(dir_deriv(&conn_map, x, &f.chart.col(k)));
        }
        let g = |k: usize, i: usize, j: usize| gam[k][(i, j)];
        let dg = |k: usize, l: usize, i: usize, j: usize| dgam[k][l * n * n + i * n + j];
        let mut r = vec![0.0; n * n * n * n];
        for k in 0..n {
            for l in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut v = dg(k, l, i, j) - dg(l, k, i, j);
                        for m in 0..n {
                            v += g(l, i, m) * g(k, m, j)
                                - g(k, i, m) * g(l, m, j)
                                - (g(k, l, m) - g(l, k, m)) * g(m, i, j);
                        }
                        r[((k * n + l) * n + i) * n + j] = v;
                    }
                }
            }
        }
        let mut t = CurvTensor { n, r };
        if let Some(q) = &self.frame_rotation {
            t = t.rotated(q);
        }
        Ok(t)
    }

    /// Curvature operator on 2-forms in the lexicographic pair basis.
    pub fn curv_op(&self, x: &[f64]) -> Result<Mat<f64>, ModelError> {
        Ok(self.curv_tensor(x)?.operator())
    }

    /// Ricci tensor in frame components.
    pub fn ricci(&self, x: &[f64]) -> Result<Mat<f64>, ModelError> {
        Ok(self.curv_tensor(x)?.ricci())
    }

    pub fn scal(&self, x: &[f64]) -> Result<f64, ModelError> {
        Ok(self.curv_tensor(x)?.ricci().trace())
    }

    fn without_rotation(&self) -> ManifoldModel {
        let mut m = self.clone();
        m.frame_rotation = None;
        m
    }

    /// Seeded rejection sampling of chart points. Points where the frame is
    /// degenerate or `pred` fails are resampled.
    pub fn sample_points(
        &self,
        seed: u64,
        count: usize,
        pred: Option<&dyn Fn(&[f64]) -> bool>,
    ) -> Result<Vec<ChartPoint>, ModelError> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let hw = self.sample_half_width;
        let mut pts = Vec::with_capacity(count);
        let max_attempts = count * 1000 + 1000;
        let mut attempts = 0;
        while pts.len() < count {
            attempts += 1;
            if attempts > max_attempts {
                return Err(ModelError::SamplingExhausted(max_attempts));
            }
            let x: Vec<f64> = (0..self.n).map(|_| rng.gen_range(-hw..hw)).collect();
            if self.frame::<f64>(&x).is_err() {
                continue;
            }
            if let Some(p) = pred {
                if !p(&x) {
                    continue;
                }
            }
            pts.push(ChartPoint::new(x));
        }
        Ok(pts)
    }
}

/// Curvature tensor in frame components.
pub struct CurvTensor {
    pub n: usize,
    r: Vec<f64>,
}

impl CurvTensor {
    pub fn at(&self, k: usize, l: usize, i: usize, j: usize) -> f64 {
        let n = self.n;
        self.r[((k * n + l) * n + i) * n + j]
    }

    /// Lexicographic list of index pairs (i < j) spanning the 2-forms.
    pub fn pairs(n: usize) -> Vec<(usize, usize)> {
        let mut p = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                p.push((i, j));
            }
        }
        p
    }

    /// Matrix of the curvature operator in the pair basis:
    /// 𝓡(e_k∧e_l) = Σ_{i<j} R_klij e_i∧e_j.
    pub fn operator(&self) -> Mat<f64> {
        let pairs = Self::pairs(self.n);
        Mat::from_fn(pairs.len(), pairs.len(), |row, col| {
            let (i, j) = pairs[row];
            let (k, l) = pairs[col];
            self.at(k, l, i, j)
        })
    }

    /// Apply the curvature operator to a 2-form given as an antisymmetric
    /// coefficient matrix.
    pub fn apply(&self, sigma: &Mat<f64>) -> Mat<f64> {
        let n = self.n;
        Mat::from_fn(n, n, |i, j| {
            let mut s = 0.0;
            for k in 0..n {
                for l in (k + 1)..n {
                    s += sigma[(k, l)] * self.at(k, l, i, j);
                }
            }
            s
        })
    }

    pub fn ricci(&self) -> Mat<f64> {
        let n = self.n;
        Mat::from_fn(n, n, |i, j| (0..n).map(|k| self.at(k, i, j, k)).sum())
    }

    fn rotated(&self, q: &Mat<f64>) -> CurvTensor {
        let n = self.n;
        let mut r = vec![0.0; n * n * n * n];
        #[allow(clippy::needless_range_loop)]
        for k in 0..n {
            for l in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut s = 0.0;
                        for p in 0..n {
                            for qq in 0..n {
                                for u in 0..n {
                                    for v in 0..n {
                                        s += q[(p, k)]
                                            * q[(qq, l)]
                                            * q[(u, i)]
                                            * q[(v, j)]
                                            * self.at(p, qq, u, v);
                                    }
                                }
                            }
                        }
                        r[((k * n + l) * n + i) * n + j] = s;
                    }
                }
            }
        }
        CurvTensor { n, r }
    }
}

// ---------------------------------------------------------------------------
// Derived maps (differentiable wrappers over model internals).
// ---------------------------------------------------------------------------

/// Flattened orthonormal ambient frame of a hypersurface, as a smooth map.
struct AmbientFrameMap {
    emb: Arc<dyn SmoothMapDyn>,
    n: usize,
}

impl SmoothMap for AmbientFrameMap {
    fn dim_in(&self) -> usize {
        self.n
    }
    fn dim_out(&self) -> usize {
        (self.n + 1) * self.n
    }
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
        let n = self.n;
        let mut jac = Mat::<T>::zeros(n + 1, n);
        for a in 0..n {
            let col = crate::ad::partial(self.emb.as_ref(), x, a);
            jac.set_col(a, &col);
        }
        let (q, _) = linalg::qr_mgs(&jac).expect("frame degenerate inside derived map");
        for alpha in 0..=n {
            for i in 0..n {
                out[alpha * n + i] = q[(alpha, i)];
            }
        }
    }
}

/// Oriented unit normal of a hypersurface, as a smooth map.
struct NormalMap {
    emb: Arc<dyn SmoothMapDyn>,
    n: usize,
}

impl SmoothMap for NormalMap {
    fn dim_in(&self) -> usize {
        self.n
    }
    fn dim_out(&self) -> usize {
        self.n + 1
    }
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
        let n = self.n;
        let mut jac = Mat::<T>::zeros(n + 1, n);
        for a in 0..n {
            let col = crate::ad::partial(self.emb.as_ref(), x, a);
            jac.set_col(a, &col);
        }
        let (q, _) = linalg::qr_mgs(&jac).expect("frame degenerate inside derived map");
        out.copy_from_slice(&linalg::oriented_unit_normal(&q));
    }
}

/// Flattened connection coefficients (unrotated), as a smooth map.
struct ConnMap {
    model: ManifoldModel,
}

impl SmoothMap for ConnMap {
    fn dim_in(&self) -> usize {
        self.model.n
    }
    fn dim_out(&self) -> usize {
        self.model.n.pow(3)
    }
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
        let n = self.model.n;
        let gam = self
            .model
            .conn_base(x)
            .expect("connection degenerate inside derived map");
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out[k * n * n + i * n + j] = gam[k][(i, j)];
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Spinor-level differential operators.
// ---------------------------------------------------------------------------

/// Frame-direction derivative of an arbitrary smooth map: e_k(f) at x.
pub fn frame_deriv<T: Real>(
    model: &ManifoldModel,
    map: &dyn SmoothMapDyn,
    k: usize,
    x: &[T],
) -> Result<Vec<T>, ModelError> {
    let f = model.frame::<T>(x)?;
    Ok(dir_deriv(map, x, &f.chart.col(k)))
}

/// Spin covariant derivative in the frame trivialization:
/// ∇_{e_k}Ψ = e_k(Ψ) + ½ Σ_{i<j} Γ_kij γ_i γ_j Ψ.
pub fn spin_cov_deriv<T: Real>(
    model: &ManifoldModel,
    rep: &CliffordRep,
    field: &dyn SmoothMapDyn,
    k: usize,
    x: &[T],
) -> Result<Vec<T>, ModelError> {
    let f = model.frame::<T>(x)?;
    let gam = model.conn::<T>(x)?;
    let mut out = dir_deriv(field, x, &f.chart.col(k));
    let psi = eval_at::<T>(field, x);
    for i in 0..model.n {
        for j in (i + 1)..model.n {
            let c = gam[k][(i, j)];
            let gp = rep.mul_basis(j, &psi);
            let ggp = rep.mul_basis(i, &gp);
            for (o, v) in out.iter_mut().zip(&ggp) {
                *o += c.mulf(0.5) * *v;
            }
        }
    }
    Ok(out)
}

/// The spinor field x ↦ ∇_{e_k}Ψ as a smooth map, so that second covariant
/// derivatives can be taken.
pub struct SpinCovDerivField {
    pub model: ManifoldModel,
    pub rep: Arc<CliffordRep>,
    pub field: Arc<dyn SmoothMapDyn>,
    pub k: usize,
}

impl SmoothMap for SpinCovDerivField {
    fn dim_in(&self) -> usize {
        self.model.n
    }
    fn dim_out(&self) -> usize {
        self.rep.d
    }
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
        let v = spin_cov_deriv::<T>(&self.model, &self.rep, self.field.as_ref(), self.k, x)
            .expect("covariant derivative degenerate inside derived map");
        out.copy_from_slice(&v);
    }
}

/// Spinor-bundle curvature operator ½ 𝓡(e_k∧e_l)· as a matrix, assembled
/// from the curvature operator on 2-forms.
pub fn spinor_curvature_op(
    model: &ManifoldModel,
    rep: &CliffordRep,
    k: usize,
    l: usize,
    x: &[f64],
) -> Result<Mat<f64>, ModelError> {
    let t = model.curv_tensor(x)?;
    let sigma = Mat::from_fn(model.n, model.n, |i, j| t.at(k, l, i, j));
    Ok(rep.two_form_operator(&sigma).scalef(0.5))
}

/// Spinor-bundle curvature via the commutator of covariant derivatives:
/// R^Σ_{e_k, e_l}Ψ = ∇_k∇_lΨ − ∇_l∇_kΨ − ∇_{[e_k, e_l]}Ψ.
pub fn spinor_curvature_commutator(
    model: &ManifoldModel,
    rep: &Arc<CliffordRep>,
    field: &Arc<dyn SmoothMapDyn>,
    k: usize,
    l: usize,
    x: &[f64],
) -> Result<Vec<f64>, ModelError> {
    let dl = SpinCovDerivField {
        model: model.clone(),
        rep: rep.clone(),
        field: field.clone(),
        k: l,
    };
    let dk = SpinCovDerivField {
        model: model.clone(),
        rep: rep.clone(),
        field: field.clone(),
        k,
    };
    let ddkl = spin_cov_deriv::<f64>(model, rep, &dl, k, x)?;
    let ddlk = spin_cov_deriv::<f64>(model, rep, &dk, l, x)?;
    let gam = model.conn::<f64>(x)?;
    let mut out: Vec<f64> = ddkl.iter().zip(&ddlk).map(|(a, b)| a - b).collect();
    for m in 0..model.n {
        let c = gam[k][(l, m)] - gam[l][(k, m)];
        if c != 0.0 {
            let dm = spin_cov_deriv::<f64>(model, rep, field.as_ref(), m, x)?;
            for (o, v) in out.iter_mut().zip(&dm) {
                *o -= c * v;
            }
        }
    }
    Ok(out)
}

/// Laplacian Δ = δd on a scalar field (nonnegative spectrum convention):
/// Δh = −Σ_k [e_k(e_k h) − (∇_{e_k}e_k)(h)].
pub fn scalar_laplacian(
    model: &ManifoldModel,
    field: &Arc<dyn SmoothMapDyn>,
    x: &[f64],
) -> Result<f64, ModelError> {
    assert_eq!(field.dim_out(), 1);
    let n = model.n;
    let gam = model.conn::<f64>(x)?;
    let f = model.frame::<f64>(x)?;
    let mut lap = 0.0;
    let grad: Vec<f64> = (0..n)
        .map(|j| frame_deriv::<f64>(model, field.as_ref(), j, x).map(|v| v[0]))
        .collect::<Result<_, _>>()?;
    for k in 0..n {
        let ek_h = FrameScalarDeriv {
            model: model.clone(),
            field: field.clone(),
            k,
        };
        let second = dir_deriv(&ek_h, x, &f.chart.col(k))[0];
        let mut corr = 0.0;
        for j in 0..n {
            corr += gam[k][(k, j)] * grad[j];
        }
        lap -= second - corr;
    }
    Ok(lap)
}

/// Ambient components of the S³ left-invariant frame, flattened, as a
/// smooth map (used to cross-check the declared constant connection
/// coefficients against the ambient derivative of the frame).
pub struct S3AmbientFrame {
    pub model: ManifoldModel,
}

impl SmoothMap for S3AmbientFrame {
    fn dim_in(&self) -> usize {
        3
    }
    fn dim_out(&self) -> usize {
        12
    }
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
        let f = self
            .model
            .frame::<T>(x)
            .expect("frame degenerate inside derived map");
        let amb = f.ambient.expect("group model frame has ambient data");
        for alpha in 0..4 {
            for i in 0..3 {
                out[alpha * 3 + i] = amb[(alpha, i)];
            }
        }
    }
}

/// e_k of a scalar field, as a smooth map (for nesting).
pub struct FrameScalarDeriv {
    pub model: ManifoldModel,
    pub field: Arc<dyn SmoothMapDyn>,
    pub k: usize,
}

impl SmoothMap for FrameScalarDeriv {
    fn dim_in(&self) -> usize {
        self.model.n
    }
    fn dim_out(&self) -> usize {
        1
    }
    fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
        let v = frame_deriv::<T>(&self.model, self.field.as_ref(), self.k, x)
            .expect("frame degenerate inside derived map");
        out[0] = v[0];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::build_clifford_rep;

    fn max_off_identity(m: &Mat<f64>, scale: f64) -> f64 {
        m.sub(&Mat::identity(m.rows).scalef(scale)).max_abs()
    }

    #[test]
    fn sphere_frame_is_orthonormal_and_metric_compatible() {
        for n in [2usize, 4, 5] {
            let model = sphere_model(n, 1.0).unwrap();
            let pts = model.sample_points(3, 10, None).unwrap();
            for p in &pts {
                let f = model.frame::<f64>(&p.coords).unwrap();
                let g = model.metric::<f64>(&p.coords);
                let gram = f.chart.transpose().matmul(&g.matmul(&f.chart));
                assert!(max_off_identity(&gram, 1.0) < 1e-10, "n={n}");
                let gam = model.conn::<f64>(&p.coords).unwrap();
                for k in 0..n {
                    assert!(gam[k].add(&gam[k].transpose()).max_abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn sphere_curvature_operator_is_minus_inverse_radius_squared() {
        for (n, r) in [(2usize, 1.0), (4, 1.0), (3, 2.0)] {
            let model = sphere_model(n, r).unwrap();
            let pts = model.sample_points(5, 5, None).unwrap();
            let npairs = n * (n - 1) / 2;
            for p in &pts {
                let op = model.curv_op(&p.coords).unwrap();
                let dev = op
                    .add(&Mat::identity(npairs).scalef(1.0 / (r * r)))
                    .max_abs();
                assert!(dev < 1e-8, "n={n} r={r} dev={dev:.3e}");
            }
        }
    }

    #[test]
    fn sphere_ricci_matches_round_value() {
        let model = sphere_model(5, 1.0).unwrap();
        let pts = model.sample_points(6, 5, None).unwrap();
        for p in &pts {
            let ric = model.ricci(&p.coords).unwrap();
            assert!(max_off_identity(&ric, 4.0) < 1e-8);
        }
    }

    #[test]
    fn s3_group_frame_and_connection() {
        let model = s3_group_model();
        let pts = model.sample_points(7, 10, None).unwrap();
        for p in &pts {
            let f = model.frame::<f64>(&p.coords).unwrap();
            let g = model.metric::<f64>(&p.coords);
            let gram = f.chart.transpose().matmul(&g.matmul(&f.chart));
            assert!(max_off_identity(&gram, 1.0) < 1e-10);
            // Declared constant coefficients agree with the ambient
            // derivative of the frame: Γ_kij = ⟨D_{e_k}ξ_i, ξ_j⟩.
            let frame_map = S3AmbientFrame {
                model: model.clone(),
            };
            let amb = f.ambient.as_ref().unwrap();
            for k in 0..3 {
                let dq = dir_deriv(&frame_map, &p.coords, &f.chart.col(k));
                for i in 0..3 {
                    for j in 0..3 {
                        let mut got = 0.0;
                        for alpha in 0..4 {
                            got += dq[alpha * 3 + i] * amb[(alpha, j)];
                        }
                        assert!(
                            (got - levi_civita_symbol(k, i, j)).abs() < 1e-10,
                            "Γ_{k}{i}{j} = {got}"
                        );
                    }
                }
            }
            let op = model.curv_op(&p.coords).unwrap();
            assert!(max_off_identity(&op, -1.0) < 1e-10);
        }
    }

    #[test]
    fn unit_sphere_second_fundamental_form_is_identity() {
        let model = sphere_model(3, 1.0).unwrap();
        let pts = model.sample_points(9, 8, None).unwrap();
        for p in &pts {
            let ii = model.second_fundamental::<f64>(&p.coords).unwrap();
            assert!(max_off_identity(&ii, 1.0) < 1e-8, "II = {:?}", ii.a);
        }
    }

    #[test]
    fn paraboloid_second_fundamental_form_at_origin() {
        let model = paraboloid_model(4).unwrap();
        let ii = model.second_fundamental::<f64>(&[0.0; 4]).unwrap();
        assert!(max_off_identity(&ii, 1.0) < 1e-10);
    }

    #[test]
    fn ellipsoid_shape_operator_matches_finite_difference_oracle() {
        // Independent oracle: for a level-set hypersurface the Weingarten
        // map is the tangential derivative of the unit normal; approximate
        // it by central differences of the analytic unit normal of the
        // ellipsoid along the frame directions in the ambient space.
        let axes = [1.0, 1.0, 1.0, 1.2];
        let model = ellipsoid_model(&axes).unwrap();
        let emb = EllipsoidEmbedding {
            semi_axes: axes.to_vec(),
        };
        let pts = model.sample_points(11, 6, None).unwrap();
        for p in &pts {
            let x = &p.coords;
            let f = model.frame::<f64>(x).unwrap();
            let q = f.ambient.as_ref().unwrap();
            let ii = model.second_fundamental::<f64>(x).unwrap();
            // normal as a function of the chart point
            let normal_at = |y: &[f64]| -> Vec<f64> {
                let mut pos = vec![0.0; 4];
                emb.eval(y, &mut pos);
                // gradient of Σ (z_α/a_α)² is 2 z_α/a_α²; orientation fixed
                // to match the oriented frame normal at the base point.
                let mut nu: Vec<f64> = pos.iter().zip(&axes).map(|(&z, &a)| z / (a * a)).collect();
                let nn = linalg::norm(&nu);
                nu.iter_mut().for_each(|v| *v /= nn);
                nu
            };
            let nu0 = normal_at(x);
            let frame_nu = f.normal.as_ref().unwrap();
            let orient = if linalg::dot(&nu0, frame_nu) > 0.0 {
                1.0
            } else {
                -1.0
            };
            let h = 1e-5;
            for k in 0..3 {
                // chart displacement along e_k
                let dir = f.chart.col(k);
                let xp: Vec<f64> = x.iter().zip(&dir).map(|(&v, &d)| v + h * d).collect();
                let xm: Vec<f64> = x.iter().zip(&dir).map(|(&v, &d)| v - h * d).collect();
                let dn: Vec<f64> = normal_at(&xp)
                    .iter()
                    .zip(&normal_at(&xm))
                    .map(|(a, b)| orient * (a - b) / (2.0 * h))
                    .collect();
                for i in 0..3 {
                    let mut oracle = 0.0;
                    for alpha in 0..4 {
                        oracle += dn[alpha] * q[(alpha, i)];
                    }
                    assert!(
                        (oracle - ii[(k, i)]).abs() < 1e-5,
                        "II_{k}{i}: oracle {oracle} vs {}",
                        ii[(k, i)]
                    );
                }
            }
        }
    }

    #[test]
    fn gauss_equation_consistency_on_hypersurfaces() {
        // Intrinsic curvature from Γ equals the curvature assembled from II:
        // R(X,Y)Z = ⟨S(Y),Z⟩S(X) − ⟨S(X),Z⟩S(Y).
        for model in [
            ellipsoid_model(&[1.0, 1.0, 1.0, 1.2]).unwrap(),
            paraboloid_model(3).unwrap(),
        ] {
            let n = model.n;
            let pts = model.sample_points(13, 4, None).unwrap();
            for p in &pts {
                let t = model.curv_tensor(&p.coords).unwrap();
                let ii = model.second_fundamental::<f64>(&p.coords).unwrap();
                for k in 0..n {
                    for l in 0..n {
                        for i in 0..n {
                            for j in 0..n {
                                let gauss = ii[(l, i)] * ii[(k, j)] - ii[(k, i)] * ii[(l, j)];
                                assert!(
                                    (t.at(k, l, i, j) - gauss).abs() < 1e-6,
                                    "R_{k}{l}{i}{j}: intrinsic {} vs Gauss {}",
                                    t.at(k, l, i, j),
                                    gauss
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn degenerate_embedding_is_rejected() {
        // A rank-deficient parametrization (second coordinate ignored) is
        // not an immersion and must fail model construction.
        struct Collapsed;
        impl SmoothMap for Collapsed {
            fn dim_in(&self) -> usize {
                2
            }
            fn dim_out(&self) -> usize {
                3
            }
            fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
                out[0] = x[0];
                out[1] = x[0] * x[0];
                out[2] = T::zero();
            }
        }
        let err = hypersurface_model("collapsed", Arc::new(Collapsed), 1.0);
        assert!(matches!(err, Err(ModelError::NotImmersion(_))));
        assert!(matches!(
            sphere_model(8, 1.0),
            Err(ModelError::DimensionOutOfRange(8, 2, 7))
        ));
    }

    #[test]
    fn flat_model_is_flat() {
        let model = flat_model(4);
        let x = [0.3, -0.2, 0.9, 0.1];
        let gam = model.conn::<f64>(&x).unwrap();
        for g in &gam {
            assert_eq!(g.max_abs(), 0.0);
        }
        let op = model.curv_op(&x).unwrap();
        assert_eq!(op.max_abs(), 0.0);
    }

    struct ConstSpinor(Vec<f64>);

    impl SmoothMap for ConstSpinor {
        fn dim_in(&self) -> usize {
            3
        }
        fn dim_out(&self) -> usize {
            self.0.len()
        }
        fn eval<T: Real>(&self, _x: &[T], out: &mut [T]) {
            for (o, &c) in out.iter_mut().zip(&self.0) {
                *o = T::from_f64(c);
            }
        }
    }

    #[test]
    fn constant_field_on_s3_is_killing_with_minus_half() {
        // Records the engine convention: with volume = +id in dimension 3,
        // fields constant in the left-invariant trivialization satisfy
        // ∇_{ξ_k}Φ = −½ ξ_k·Φ.
        let model = s3_group_model();
        let rep = build_clifford_rep(3).unwrap();
        let phi = ConstSpinor(vec![1.0, 0.0, 0.0, 0.0]);
        let pts = model.sample_points(17, 6, None).unwrap();
        for p in &pts {
            let phi_val = eval_at::<f64>(&phi, &p.coords);
            for k in 0..3 {
                let d = spin_cov_deriv::<f64>(&model, &rep, &phi, k, &p.coords).unwrap();
                let expect = rep.mul_basis(k, &phi_val);
                for (a, b) in d.iter().zip(&expect) {
                    assert!((a + 0.5 * b).abs() < 1e-12, "k={k}");
                }
            }
        }
    }

    #[test]
    fn flat_constant_spinor_is_parallel() {
        let model = flat_model(3);
        let rep = build_clifford_rep(3).unwrap();
        let phi = ConstSpinor(vec![0.5, -0.5, 0.5, 0.5]);
        let d = spin_cov_deriv::<f64>(&model, &rep, &phi, 1, &[0.1, 0.2, 0.3]).unwrap();
        assert!(linalg::max_abs(&d) == 0.0);
    }

    #[test]
    fn spinor_curvature_roundtrip_on_sphere() {
        // ½𝓡(e_k∧e_l)· equals the commutator of covariant derivatives, and
        // on the unit sphere equals −½(e_k∧e_l)·.
        let model = sphere_model(3, 1.0).unwrap();
        let rep = Arc::new(build_clifford_rep(3).unwrap());
        let field: Arc<dyn SmoothMapDyn> = Arc::new(PolySpinor::smoke(3, rep.d));
        let pts = model.sample_points(19, 3, None).unwrap();
        for p in &pts {
            let x = &p.coords;
            let psi = eval_at::<f64>(field.as_ref(), x);
            for (k, l) in [(0usize, 1usize), (1, 2)] {
                let op = spinor_curvature_op(&model, &rep, k, l, x).unwrap();
                let via_op = op.matvec(&psi);
                let via_comm = spinor_curvature_commutator(&model, &rep, &field, k, l, x).unwrap();
                for (a, b) in via_op.iter().zip(&via_comm) {
                    assert!((a - b).abs() < 1e-7, "k={k} l={l}: {a} vs {b}");
                }
                // explicit value on the unit sphere
                let mut sigma = Mat::<f64>::zeros(3, 3);
                sigma[(k, l)] = 1.0;
                sigma[(l, k)] = -1.0;
                let expect = rep.mul_two_form(&sigma, &psi);
                for (a, b) in via_op.iter().zip(&expect) {
                    assert!((a + 0.5 * b).abs() < 1e-7);
                }
            }
        }
    }

    /// Low-degree polynomial spinor field for smoke tests.
    pub struct PolySpinor {
        n: usize,
        d: usize,
        coeffs: Vec<f64>,
    }

    impl PolySpinor {
        pub fn smoke(n: usize, d: usize) -> Self {
            let coeffs = (0..d * (1 + n))
                .map(|i| ((i * 2654435761 + 12345) % 1000) as f64 / 1000.0 - 0.5)
                .collect();
            PolySpinor { n, d, coeffs }
        }
    }

    impl SmoothMap for PolySpinor {
        fn dim_in(&self) -> usize {
            self.n
        }
        fn dim_out(&self) -> usize {
            self.d
        }
        fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
            for i in 0..self.d {
                let base = i * (1 + self.n);
                let mut v = T::from_f64(self.coeffs[base]);
                for a in 0..self.n {
                    v += x[a].mulf(self.coeffs[base + 1 + a]);
                }
                // quadratic touch so second derivatives are nontrivial
                v += (x[0] * x[(i + 1) % self.n]).mulf(self.coeffs[base]);
                out[i] = v;
            }
        }
    }

    #[test]
    fn spin_connection_is_metric() {
        let model = sphere_model(3, 1.0).unwrap();
        let rep = build_clifford_rep(3).unwrap();
        let psi = PolySpinor::smoke(3, rep.d);
        let phi = ConstSpinor(vec![0.1, 0.7, -0.3, 0.2]);
        let pts = model.sample_points(23, 5, None).unwrap();
        for p in &pts {
            let x = &p.coords;
            let psi_v = eval_at::<f64>(&psi, x);
            let phi_v = eval_at::<f64>(&phi, x);
            let inner = InnerProduct { a: &psi, b: &phi };
            for k in 0..3 {
                let d_inner = frame_deriv::<f64>(&model, &inner, k, x).unwrap()[0];
                let dpsi = spin_cov_deriv::<f64>(&model, &rep, &psi, k, x).unwrap();
                let dphi = spin_cov_deriv::<f64>(&model, &rep, &phi, k, x).unwrap();
                let rhs = linalg::dot(&dpsi, &phi_v) + linalg::dot(&psi_v, &dphi);
                assert!((d_inner - rhs).abs() < 1e-8, "k={k}");
            }
        }
    }

    struct InnerProduct<'a> {
        a: &'a PolySpinor,
        b: &'a ConstSpinor,
    }

    impl SmoothMap for InnerProduct<'_> {
        fn dim_in(&self) -> usize {
            self.a.n
        }
        fn dim_out(&self) -> usize {
            1
        }
        fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
            let mut av = vec![T::zero(); self.a.d];
            self.a.eval(x, &mut av);
            let mut bv = vec![T::zero(); self.b.0.len()];
            self.b.eval(x, &mut bv);
            out[0] = linalg::dot(&av, &bv);
        }
    }

    #[test]
    fn laplacian_of_coordinate_function_on_flat_space() {
        // Δ(x₀²) = −2 in the δd convention on flat R³.
        let model = flat_model(3);
        struct Sq;
        impl SmoothMap for Sq {
            fn dim_in(&self) -> usize {
                3
            }
            fn dim_out(&self) -> usize {
                1
            }
            fn eval<T: Real>(&self, x: &[T], out: &mut [T]) {
                out[0] = x[0] * x[0];
            }
        }
        let f: Arc<dyn SmoothMapDyn> = Arc::new(Sq);
        let lap = scalar_laplacian(&model, &f, &[0.4, 0.1, -0.2]).unwrap();
        assert!((lap + 2.0).abs() < 1e-12);
    }

    #[test]
    fn ad_matches_finite_differences_on_embedding() {
        let emb = InverseStereographic { n: 4, r: 1.0 };
        let x = [0.3, -0.5, 0.2, 0.8];
        for a in 0..4 {
            let ad = crate::ad::partial::<f64>(&emb, &x, a);
            let fd = crate::ad::central_difference(&emb, &x, a, 1e-5);
            for (u, v) in ad.iter().zip(&fd) {
                assert!((u - v).abs() < 1e-5);
            }
        }
    }
}
