//! Factory of explicit generalized Killing spinor candidates.
//!
//! Every constructor self-validates: the defining equation is checked at
//! seeded sample points before the candidate is returned, so a convention
//! mismatch surfaces as a build error rather than as downstream noise.
//!
//! Addressable names (used by the command line driver):
//! - `s3-gks` — the non-Killing candidate Ψ = ξ₁·Φ on the S³ group model
//!   with A = −(3/2)id + 2 ξ₁⊗ξ₁,
//! - `killing:<model>:<sign>` with model ∈ {s2,…,s7, s3-group} and
//!   sign ∈ {+, -},
//! - `restrict:<surface>` with surface ∈ {s2, s3, s4, s5, ellipsoid2,
//!   ellipsoid3, paraboloid4},
//! - `parallel:flat<n>` — the trivial parallel candidate on flat space.

use crate::clifford::{build_clifford_rep, induced_rep, CliffordError};
use crate::fields::{
    ConstEndo, ConstMap, HalfSecondFundamental, LinearMap, RestrictedParallelSpinor, S3KillingPlus,
    SphereKillingSpinor,
};
use crate::gks::{GksCandidate, GksError};
use crate::linalg::Mat;
use crate::models::{
    ellipsoid_model, flat_model, paraboloid_model, s3_group_model, sphere_model, Geometry,
    ManifoldModel, ModelError,
};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("unknown construction '{0}'")]
    UnknownName(String),
    #[error("unknown model '{0}'")]
    UnknownModel(String),
    #[error("sign must be '+' or '-', got '{0}'")]
    BadSign(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Clifford(#[from] CliffordError),
    #[error(transparent)]
    Gks(#[from] GksError),
}

/// Killing sign of fields constant in the S³ left-invariant trivialization,
/// as produced by the engine's conventions (volume = +id in dimension 3,
/// frame with ∇_{ξ₁}ξ₂ = ξ₃). Recorded in reports.
pub const S3_CONSTANT_FIELD_KILLING_SIGN: f64 = -0.5;

fn first_basis_spinor(d: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[0] = 1.0;
    v
}

/// Killing spinor candidate with A = sign/(2r)·id on a round sphere, or
/// A = ±½·id on the S³ group model.
///
/// Spheres use the closed-form field in the stereographic chart. On the
/// group model the − sign is a constant field and the + sign is the spin
/// representation of the inverse group element applied to a constant; both
/// exist in the fixed representation, so no sign request can fail.
pub fn make_killing_spinor(model_name: &str, positive: bool) -> Result<GksCandidate, BuildError> {
    let sign = if positive { 1.0 } else { -1.0 };
    if model_name == "s3-group" {
        let model = Arc::new(s3_group_model());
        let rep = Arc::new(build_clifford_rep(3)?);
        let phi0 = first_basis_spinor(rep.d);
        let (psi, convention): (Arc<dyn crate::ad::SmoothMapDyn>, &str) = if positive {
            let emb = match &model.geometry {
                Geometry::S3Group { emb } => emb.clone(),
                _ => unreachable!(),
            };
            (
                Arc::new(S3KillingPlus {
                    rep: rep.clone(),
                    emb,
                    phi0,
                }),
                "field q ↦ ρ(q⁻¹)Φ₀; constant fields carry the − sign in this trivialization",
            )
        } else {
            (
                Arc::new(ConstMap {
                    dim_in: 3,
                    values: phi0,
                }),
                "constant field in the left-invariant trivialization",
            )
        };
        let a = Arc::new(ConstEndo {
            dim_in: 3,
            m: Mat::identity(3).scalef(sign * 0.5),
        });
        let name = format!("killing:s3-group:{}", if positive { "+" } else { "-" });
        return Ok(GksCandidate::new(
            &name,
            model,
            rep,
            psi,
            a,
            Some(2.0),
            convention,
            None,
            1e-10,
        )?);
    }
    let (n, r) =
        parse_sphere(model_name).ok_or_else(|| BuildError::UnknownModel(model_name.into()))?;
    let model = Arc::new(sphere_model(n, r)?);
    let rep = Arc::new(build_clifford_rep(n)?);
    let phi0 = first_basis_spinor(rep.d);
    let psi = Arc::new(SphereKillingSpinor {
        n,
        b: sign,
        rep: rep.clone(),
        phi0,
    });
    let a = Arc::new(ConstEndo {
        dim_in: n,
        m: Mat::identity(n).scalef(sign / (2.0 * r)),
    });
    let name = format!("killing:{model_name}:{}", if positive { "+" } else { "-" });
    Ok(GksCandidate::new(
        &name,
        model.clone(),
        rep,
        psi,
        a,
        model.einstein,
        "closed-form Killing field in the conformal frame of the stereographic chart",
        None,
        1e-10,
    )?)
}

fn parse_sphere(name: &str) -> Option<(usize, f64)> {
    let rest = name.strip_prefix('s')?;
    if let Some((dim, radius)) = rest.split_once(":r") {
        Some((dim.parse().ok()?, radius.parse().ok()?))
    } else {
        Some((rest.parse().ok()?, 1.0))
    }
}

/// The non-Killing generalized Killing spinor on S³: Ψ = ξ₁·Φ for Φ the +½
/// Killing spinor, with A(X) = −(3/2)X + 2 g(X,ξ₁)ξ₁, eigenvalues
/// {½, −3/2, −3/2}.
pub fn make_s3_gks() -> Result<GksCandidate, BuildError> {
    let model = Arc::new(s3_group_model());
    let rep = Arc::new(build_clifford_rep(3)?);
    let emb = match &model.geometry {
        Geometry::S3Group { emb } => emb.clone(),
        _ => unreachable!(),
    };
    let phi0 = first_basis_spinor(rep.d);
    let phi = Arc::new(S3KillingPlus {
        rep: rep.clone(),
        emb,
        phi0,
    });
    let psi = Arc::new(LinearMap {
        matrix: rep.gammas[0].clone(),
        inner: phi,
    });
    let mut a_mat = Mat::identity(3).scalef(-1.5);
    a_mat[(0, 0)] += 2.0;
    let a = Arc::new(ConstEndo {
        dim_in: 3,
        m: a_mat,
    });
    Ok(GksCandidate::new(
        "s3-gks",
        model,
        rep,
        psi,
        a,
        Some(2.0),
        "Ψ = ξ₁·Φ with Φ the +½ Killing field q ↦ ρ(q⁻¹)Φ₀ in the volume=+id representation",
        None,
        1e-8,
    )?)
}

/// Restriction of a constant ambient parallel spinor to a hypersurface:
/// the candidate carries the induced Clifford action X•Ψ = X·ν·Ψ and
/// A = ½·II.
pub fn restrict_parallel_spinor(
    model: ManifoldModel,
    phi0: Option<Vec<f64>>,
) -> Result<GksCandidate, BuildError> {
    let n = model.n;
    let ambient = Arc::new(build_clifford_rep(n + 1)?);
    let rep = Arc::new(induced_rep(&ambient)?);
    let phi0 = match phi0 {
        Some(v) => {
            assert_eq!(v.len(), ambient.d);
            v
        }
        None => first_basis_spinor(ambient.d),
    };
    let field = RestrictedParallelSpinor {
        model: model.clone(),
        ambient: ambient.clone(),
        phi0,
        min_pivot: 1e-6,
    };
    let pred_field = RestrictedParallelSpinor {
        model: model.clone(),
        ambient,
        phi0: field.phi0.clone(),
        min_pivot: field.min_pivot,
    };
    let a = Arc::new(HalfSecondFundamental {
        model: model.clone(),
    });
    let name = format!("restrict:{}", model.name);
    let lambda = model.einstein;
    Ok(GksCandidate::new(
        &name,
        Arc::new(model),
        rep,
        Arc::new(field),
        a,
        lambda,
        "induced action X•Ψ = X·ν·Ψ with (frame, ν) positively oriented; A = ½·II",
        Some(Arc::new(move |x: &[f64]| pred_field.lift_ok(x))),
        1e-7,
    )?)
}

/// Trivial parallel candidate on the flat chart model.
pub fn make_flat_parallel(n: usize) -> Result<GksCandidate, BuildError> {
    let model = Arc::new(flat_model(n));
    let rep = Arc::new(build_clifford_rep(n)?);
    let psi = Arc::new(ConstMap {
        dim_in: n,
        values: first_basis_spinor(rep.d),
    });
    let a = Arc::new(ConstMap {
        dim_in: n,
        values: vec![0.0; n * n],
    });
    Ok(GksCandidate::new(
        &format!("parallel:flat{n}"),
        model,
        rep,
        psi,
        a,
        Some(0.0),
        "constant spinor on the Euclidean chart",
        None,
        1e-12,
    )?)
}

/// Hypersurface model registry for `restrict:` names.
pub fn surface_by_name(name: &str) -> Result<ManifoldModel, BuildError> {
    match name {
        "ellipsoid2" => Ok(ellipsoid_model(&[1.0, 1.0, 1.2])?),
        "ellipsoid3" => Ok(ellipsoid_model(&[1.0, 1.0, 1.0, 1.2])?),
        "paraboloid4" => Ok(paraboloid_model(4)?),
        _ => {
            if let Some((n, r)) = parse_sphere(name) {
                Ok(sphere_model(n, r)?)
            } else {
                Err(BuildError::UnknownModel(name.into()))
            }
        }
    }
}

/// Resolve a candidate by its CLI name.
pub fn candidate_by_name(name: &str) -> Result<GksCandidate, BuildError> {
    if name == "s3-gks" {
        return make_s3_gks();
    }
    if let Some(rest) = name.strip_prefix("killing:") {
        let (model, sign) = rest
            .rsplit_once(':')
            .ok_or_else(|| BuildError::UnknownName(name.into()))?;
        let positive = match sign {
            "+" | "plus" => true,
            "-" | "minus" => false,
            other => return Err(BuildError::BadSign(other.into())),
        };
        return make_killing_spinor(model, positive);
    }
    if let Some(surface) = name.strip_prefix("restrict:") {
        return restrict_parallel_spinor(surface_by_name(surface)?, None);
    }
    if let Some(rest) = name.strip_prefix("parallel:flat") {
        let n: usize = rest
            .parse()
            .map_err(|_| BuildError::UnknownName(name.into()))?;
        return make_flat_parallel(n);
    }
    Err(BuildError::UnknownName(name.into()))
}

/// The candidates exercised by the full identity suite.
pub fn shipped_candidate_names() -> Vec<&'static str> {
    vec![
        "s3-gks",
        "killing:s3:+",
        "killing:s4:+",
        "killing:s5:+",
        "restrict:ellipsoid3",
        "restrict:paraboloid4",
    ]
}
