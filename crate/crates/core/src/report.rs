//! Check registry and machine-readable reports.
//!
//! Every check the suites can run is declared here with a stable id, the
//! module that owns it, a short anchor phrase naming the identity it
//! verifies (or `plumbing` for artifact-level checks), and a default
//! tolerance. Reports serialize to a single JSON document with stable key
//! order and 17-significant-digit float formatting, so identical
//! configurations produce byte-identical files.
//!
//! Verdict semantics are uniform: `pass` iff `max_residual <= tolerance`.
//! Detection-style checks (the negative controls, the Codazzi defect) encode
//! their outcome in the same shape: the residual is a failure fraction or an
//! indicator, with the threshold stored as the tolerance.

use std::fmt::Write as _;

/// Static declaration of a check.
pub struct CheckDef {
    pub id: &'static str,
    pub module: &'static str,
    pub anchor: &'static str,
    pub tol: f64,
}

pub const PLUMBING: &str = "plumbing";

/// The full registry, grouped by module.
pub const CHECKS: &[CheckDef] = &[
    // clifford_core
    CheckDef {
        id: "clifford-relation",
        module: "clifford_core",
        anchor: PLUMBING,
        tol: 1e-12,
    },
    CheckDef {
        id: "vector-skew",
        module: "clifford_core",
        anchor: "skew-symmetric with respect to",
        tol: 1e-12,
    },
    CheckDef {
        id: "vector-isometry",
        module: "clifford_core",
        anchor: PLUMBING,
        tol: 1e-12,
    },
    CheckDef {
        id: "two-form-action",
        module: "clifford_core",
        anchor: "Clifford multiplication with 2-forms",
        tol: 1e-12,
    },
    CheckDef {
        id: "trace-identity",
        module: "clifford_core",
        anchor: "a local orthonormal frame, then",
        tol: 1e-12,
    },
    CheckDef {
        id: "chirality-split",
        module: "clifford_core",
        anchor: "Correspondingly, Ψ splits as",
        tol: 1e-12,
    },
    CheckDef {
        id: "volume-odd",
        module: "clifford_core",
        anchor: "volume form on the spin bundle",
        tol: 1e-12,
    },
    CheckDef {
        id: "volume-dim5",
        module: "clifford_core",
        anchor: "carries a quaternionic structure",
        tol: 1e-12,
    },
    CheckDef {
        id: "hodge-dim3",
        module: "clifford_core",
        anchor: "volume form on the spin bundle",
        tol: 1e-12,
    },
    CheckDef {
        id: "quat-triple",
        module: "clifford_core",
        anchor: "anti-commute with the Clifford product",
        tol: 1e-12,
    },
    // manifold_models
    CheckDef {
        id: "frame-orthonormal",
        module: "manifold_models",
        anchor: PLUMBING,
        tol: 1e-10,
    },
    CheckDef {
        id: "metric-compat",
        module: "manifold_models",
        anchor: PLUMBING,
        tol: 1e-10,
    },
    CheckDef {
        id: "ricci-contraction",
        module: "manifold_models",
        anchor: PLUMBING,
        tol: 1e-8,
    },
    CheckDef {
        id: "curv-op-sphere",
        module: "manifold_models",
        anchor: "minus the identity",
        tol: 1e-8,
    },
    CheckDef {
        id: "curv0",
        module: "manifold_models",
        anchor: "curvature of the spinor bundle",
        tol: 1e-7,
    },
    CheckDef {
        id: "ricci-formula",
        module: "manifold_models",
        anchor: "yields the well-known formula",
        tol: 1e-7,
    },
    CheckDef {
        id: "scal-formula",
        module: "manifold_models",
        anchor: "which together with",
        tol: 1e-7,
    },
    CheckDef {
        id: "spin-metric",
        module: "manifold_models",
        anchor: PLUMBING,
        tol: 1e-8,
    },
    CheckDef {
        id: "gauss-equation",
        module: "manifold_models",
        anchor: "equal to half the second fundamental form",
        tol: 1e-6,
    },
    CheckDef {
        id: "ad-fd-1",
        module: "manifold_models",
        anchor: PLUMBING,
        tol: 1e-5,
    },
    CheckDef {
        id: "ad-fd-2",
        module: "manifold_models",
        anchor: PLUMBING,
        tol: 1e-4,
    },
    // constructions
    CheckDef {
        id: "kvf1",
        module: "constructions",
        anchor: "left-invariant Killing vector fields",
        tol: 1e-10,
    },
    CheckDef {
        id: "kvf",
        module: "constructions",
        anchor: "on the Lie group",
        tol: 1e-10,
    },
    CheckDef {
        id: "s3-curv-op",
        module: "constructions",
        anchor: "minus the identity",
        tol: 1e-10,
    },
    CheckDef {
        id: "killing-sign",
        module: "constructions",
        anchor: "with Killing constant",
        tol: 1e-10,
    },
    CheckDef {
        id: "s3-gks-residual",
        module: "constructions",
        anchor: "corresponding to the symmetric endomorphism",
        tol: 1e-8,
    },
    CheckDef {
        id: "s3-eigenvalues",
        module: "constructions",
        anchor: "corresponding to the symmetric endomorphism",
        tol: 1e-10,
    },
    CheckDef {
        id: "codazzi-defect",
        module: "constructions",
        anchor: "not a Codazzi tensor",
        tol: 0.05,
    },
    CheckDef {
        id: "s3-dirac",
        module: "constructions",
        anchor: "where D denotes the Dirac operator",
        tol: 1e-8,
    },
    CheckDef {
        id: "restriction-residual",
        module: "constructions",
        anchor: "restriction to M is a generalized Killing spinor",
        tol: 1e-6,
    },
    CheckDef {
        id: "a-half-ii",
        module: "constructions",
        anchor: "equal to half the second fundamental form",
        tol: 1e-8,
    },
    CheckDef {
        id: "a-recovery",
        module: "constructions",
        anchor: "equal to half the second fundamental form",
        tol: 1e-5,
    },
    CheckDef {
        id: "induced-clifford",
        module: "constructions",
        anchor: PLUMBING,
        tol: 1e-12,
    },
    // gks_core
    CheckDef {
        id: "gks-residual",
        module: "gks_core",
        anchor: "some symmetric endomorphism field",
        tol: 1e-8,
    },
    CheckDef {
        id: "norm-constancy",
        module: "gks_core",
        anchor: "norm of Ψ is constant",
        tol: 1e-7,
    },
    CheckDef {
        id: "dirac-trace",
        module: "gks_core",
        anchor: "where D denotes the Dirac operator",
        tol: 1e-7,
    },
    CheckDef {
        id: "two",
        module: "gks_core",
        anchor: "denotes the divergence of A",
        tol: 1e-6,
    },
    CheckDef {
        id: "three1",
        module: "gks_core",
        anchor: "denotes the divergence of A",
        tol: 1e-6,
    },
    CheckDef {
        id: "three2",
        module: "gks_core",
        anchor: "denotes the divergence of A",
        tol: 1e-6,
    },
    CheckDef {
        id: "curv2",
        module: "gks_core",
        anchor: "an arbitrary 2-form and",
        tol: 1e-6,
    },
    CheckDef {
        id: "two2",
        module: "gks_core",
        anchor: "is a 2-form on M",
        tol: 1e-6,
    },
    CheckDef {
        id: "b-traceless",
        module: "gks_core",
        anchor: "Note that B is traceless",
        tol: 1e-7,
    },
    CheckDef {
        id: "lichnerowicz",
        module: "gks_core",
        anchor: "the Lichnerowicz formula implies",
        tol: 1e-4,
    },
    CheckDef {
        id: "frame-independence",
        module: "gks_core",
        anchor: PLUMBING,
        tol: 1e-9,
    },
    // dim_analysis
    CheckDef {
        id: "dim2-det",
        module: "dim_analysis",
        anchor: "Gauss' Theorema Egregium",
        tol: 1e-5,
    },
    CheckDef {
        id: "eta-norm",
        module: "dim_analysis",
        anchor: "the vector field on M",
        tol: 1e-7,
    },
    CheckDef {
        id: "dh-i",
        module: "dim_analysis",
        anchor: "(1 - 2h)A(X)",
        tol: 1e-6,
    },
    CheckDef {
        id: "dh-ii",
        module: "dim_analysis",
        anchor: "(1 - 2h)A(X)",
        tol: 1e-6,
    },
    CheckDef {
        id: "dh-iii",
        module: "dim_analysis",
        anchor: "(1 - 2h)A(X)",
        tol: 1e-6,
    },
    CheckDef {
        id: "delta-h",
        module: "dim_analysis",
        anchor: "Straightforward calculation using",
        tol: 1e-4,
    },
    CheckDef {
        id: "c-constant",
        module: "dim_analysis",
        anchor: "is constant on M",
        tol: 1e-6,
    },
    CheckDef {
        id: "b-xi",
        module: "dim_analysis",
        anchor: "a 2-form and X",
        tol: 1e-6,
    },
    CheckDef {
        id: "selfdual-blocks",
        module: "dim_analysis",
        anchor: "the curvature operator preserves",
        tol: 1e-8,
    },
    CheckDef {
        id: "ab",
        module: "dim_analysis",
        anchor: "the curvature operator preserves",
        tol: 1e-6,
    },
    CheckDef {
        id: "cor-t",
        module: "dim_analysis",
        anchor: "the second summand vanishes",
        tol: 1e-6,
    },
    CheckDef {
        id: "deco",
        module: "dim_analysis",
        anchor: "orthogonal direct sum decomposition",
        tol: 1e-8,
    },
    CheckDef {
        id: "xi-unit",
        module: "dim_analysis",
        anchor: "a unit vector field",
        tol: 1e-8,
    },
    CheckDef {
        id: "t1",
        module: "dim_analysis",
        anchor: "complex structure on D",
        tol: 1e-7,
    },
    CheckDef {
        id: "cl1",
        module: "dim_analysis",
        anchor: "explicit the Clifford product",
        tol: 1e-7,
    },
    CheckDef {
        id: "nxi",
        module: "dim_analysis",
        anchor: "thus ξ is a Killing vector field",
        tol: 1e-6,
    },
    CheckDef {
        id: "a-preserves-d",
        module: "dim_analysis",
        anchor: "left invariant by A",
        tol: 1e-6,
    },
    CheckDef {
        id: "a-squared",
        module: "dim_analysis",
        anchor: "to D is the identity",
        tol: 1e-8,
    },
    CheckDef {
        id: "alpha-product",
        module: "dim_analysis",
        anchor: "finally gives",
        tol: 1e-8,
    },
    // verify_cli (negative controls)
    CheckDef {
        id: "perturb-residual",
        module: "verify_cli",
        anchor: PLUMBING,
        tol: 1e-6,
    },
    CheckDef {
        id: "perturb-detect",
        module: "verify_cli",
        anchor: PLUMBING,
        tol: 0.5,
    },
];

pub fn check_by_id(id: &str) -> Option<&'static CheckDef> {
    CHECKS.iter().find(|c| c.id == id)
}

/// One line per check: id, module, anchor.
pub fn list_checks() -> String {
    let width = CHECKS.iter().map(|c| c.id.len()).max().unwrap_or(0);
    let mwidth = CHECKS.iter().map(|c| c.module.len()).max().unwrap_or(0);
    let mut out = String::new();
    for c in CHECKS {
        let _ = writeln!(out, "{:width$}  {:mwidth$}  {}", c.id, c.module, c.anchor);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inapplicable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inapplicable => "inapplicable",
        }
    }
}

/// One executed check.
pub struct CheckRow {
    pub id: &'static str,
    pub anchor: &'static str,
    /// What the check ran on (candidate, model, or algebra dimension).
    pub subject: String,
    pub points: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl CheckRow {
    /// Assemble a row with the pass/fail verdict derived from the residual.
    pub fn graded(
        def: &'static CheckDef,
        subject: &str,
        points: usize,
        max_residual: f64,
        tolerance: f64,
    ) -> CheckRow {
        CheckRow {
            id: def.id,
            anchor: def.anchor,
            subject: subject.into(),
            points,
            max_residual,
            tolerance,
            verdict: if max_residual <= tolerance {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
        }
    }

    pub fn inapplicable(def: &'static CheckDef, subject: &str, tolerance: f64) -> CheckRow {
        CheckRow {
            id: def.id,
            anchor: def.anchor,
            subject: subject.into(),
            points: 0,
            max_residual: 0.0,
            tolerance,
            verdict: Verdict::Inapplicable,
        }
    }
}

/// Full report of one suite run.
pub struct CheckReport {
    pub suite: String,
    pub model: Option<String>,
    pub samples: usize,
    pub seed: u64,
    pub tol_overrides: Vec<(String, f64)>,
    pub checks: Vec<CheckRow>,
}

/// Engine-wide sign conventions, echoed in every report.
pub const CONVENTIONS: &[(&str, &str)] = &[
    ("dim3_volume_sign", "+1"),
    ("dim7_volume_sign", "+1"),
    ("chirality_operator", "realified complex volume element"),
    ("s3_constant_field_killing_sign", "-1/2"),
    ("s3_frame_orientation", "(xi1, xi2, xi3) positive"),
    ("hypersurface_normal", "(frame, normal) positively oriented"),
    (
        "second_fundamental_form",
        "II(X,Y) = <D_X normal, Y>; unit sphere outward = +id",
    ),
    ("induced_clifford_action", "X•Ψ = X·ν·Ψ"),
    ("restriction_endomorphism", "A = +II/2"),
    ("laplacian", "Δ = δd, nonnegative spectrum"),
    ("curvature_operator_unit_sphere", "-identity on 2-forms"),
];

fn fmt_f64(x: f64) -> String {
    // 17 significant digits in scientific notation; deterministic bytes.
    format!("{:.16e}", x)
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

impl CheckReport {
    pub fn passed(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| c.verdict == Verdict::Pass)
            .count()
    }
    pub fn failed(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| c.verdict == Verdict::Fail)
            .count()
    }
    pub fn inapplicable(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| c.verdict == Verdict::Inapplicable)
            .count()
    }
    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    /// Single JSON document with stable key order and fixed float format.
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        s.push_str("{\n");
        let _ = writeln!(s, "  \"suite\": \"{}\",", json_escape(&self.suite));
        s.push_str("  \"config\": {\n");
        match &self.model {
            Some(m) => {
                let _ = writeln!(s, "    \"model\": \"{}\",", json_escape(m));
            }
            None => {
                let _ = writeln!(s, "    \"model\": null,");
            }
        }
        let _ = writeln!(s, "    \"samples\": {},", self.samples);
        let _ = writeln!(s, "    \"seed\": {},", self.seed);
        s.push_str("    \"tolerance_overrides\": {");
        for (i, (k, v)) in self.tol_overrides.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            let _ = write!(s, "\"{}\": {}", json_escape(k), fmt_f64(*v));
        }
        s.push_str("}\n  },\n");
        s.push_str("  \"conventions\": {\n");
        for (i, (k, v)) in CONVENTIONS.iter().enumerate() {
            let comma = if i + 1 < CONVENTIONS.len() { "," } else { "" };
            let _ = writeln!(
                s,
                "    \"{}\": \"{}\"{}",
                json_escape(k),
                json_escape(v),
                comma
            );
        }
        s.push_str("  },\n");
        s.push_str("  \"checks\": [\n");
        for (i, c) in self.checks.iter().enumerate() {
            let comma = if i + 1 < self.checks.len() { "," } else { "" };
            let _ = writeln!(
                s,
                "    {{\"id\": \"{}\", \"anchor\": \"{}\", \"subject\": \"{}\", \"points\": {}, \"max_residual\": {}, \"tolerance\": {}, \"verdict\": \"{}\"}}{}",
                json_escape(c.id),
                json_escape(c.anchor),
                json_escape(&c.subject),
                c.points,
                fmt_f64(c.max_residual),
                fmt_f64(c.tolerance),
                c.verdict.as_str(),
                comma
            );
        }
        s.push_str("  ],\n");
        s.push_str("  \"summary\": {\n");
        let _ = writeln!(s, "    \"pass\": {},", self.passed());
        let _ = writeln!(s, "    \"fail\": {},", self.failed());
        let _ = writeln!(s, "    \"inapplicable\": {}", self.inapplicable());
        s.push_str("  }\n");
        s.push_str("}\n");
        s
    }

    /// Human-readable one-line-per-check summary for standard output.
    pub fn summary_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(
                s,
                "[{:^12}] {:<20} {:<24} points={:<4} max_residual={:.3e} tol={:.1e}",
                c.verdict.as_str(),
                c.id,
                c.subject,
                c.points,
                c.max_residual,
                c.tolerance
            );
        }
        let _ = writeln!(
            s,
            "suite '{}': {} passed, {} failed, {} inapplicable",
            self.suite,
            self.passed(),
            self.failed(),
            self.inapplicable()
        );
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_has_unique_ids_and_enough_checks() {
        let mut ids: Vec<&str> = CHECKS.iter().map(|c| c.id).collect();
        let total = ids.len();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), total, "duplicate check ids");
        assert!(total >= 25, "registry too small: {total}");
    }

    #[test]
    fn listing_contains_spec_level_entries() {
        let listing = list_checks();
        assert!(listing.contains("three2"));
        assert!(listing.contains("denotes the divergence of A"));
        assert!(listing.contains("nxi"));
        assert!(listing.contains("thus ξ is a Killing vector field"));
    }

    #[test]
    fn json_is_deterministic_and_escapes() {
        let report = CheckReport {
            suite: "demo".into(),
            model: Some("killing:s4:+".into()),
            samples: 10,
            seed: 7,
            tol_overrides: vec![("three2".into(), 1e-9)],
            checks: vec![CheckRow::graded(
                check_by_id("three2").unwrap(),
                "killing:s4:+",
                10,
                3.2e-13,
                1e-9,
            )],
        };
        let a = report.to_json();
        let b = report.to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"max_residual\": 3.2000000000000000e-13"));
        assert!(a.contains("\"verdict\": \"pass\""));
    }
}
