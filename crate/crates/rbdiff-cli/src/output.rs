//! Serializable result records.
//!
//! Every scalar is rendered as an exact fraction string (`"p/q"` or `"n"`),
//! never as a float. Defect vectors carry the full fixture basis and one
//! coordinate string per basis element, in basis order.

use serde::Serialize;

use rbdiff_core::{AlgElem, CounterexampleWitness, OmegaConstraint, Scalar, SweepRow};

/// A constraint in coefficient form plus its canonical rendering.
#[derive(Serialize)]
pub struct OmegaJson {
    /// φ coefficients by x-degree, exact fraction strings.
    pub phi: Vec<String>,
    /// ψ coefficients by x-degree, exact fraction strings.
    pub psi: Vec<String>,
    /// Canonical text form (reparsable).
    pub text: String,
}

impl OmegaJson {
    pub fn from_omega(omega: &OmegaConstraint) -> Self {
        OmegaJson {
            phi: omega.phi().iter().map(Scalar::to_string).collect(),
            psi: omega.psi().iter().map(Scalar::to_string).collect(),
            text: omega.to_string(),
        }
    }
}

/// A vector over a fixture algebra: basis labels and exact coordinates.
#[derive(Serialize)]
pub struct VectorJson {
    pub basis: Vec<String>,
    pub coords: Vec<String>,
}

impl VectorJson {
    pub fn from_elem(labels: &[String], elem: &AlgElem) -> Self {
        VectorJson {
            basis: labels.to_vec(),
            coords: elem.coords().iter().map(Scalar::to_string).collect(),
        }
    }
}

/// The witness pair behind a counterexample.
#[derive(Serialize)]
pub struct WitnessJson {
    /// Fixture id, e.g. `"I_2"`.
    pub fixture: String,
    /// Fixture depth (dimension of the quotient).
    pub depth: usize,
    /// Component index where the defect appears.
    pub n: usize,
    /// First series of the pair, in spec notation.
    pub f: String,
    /// Second series of the pair.
    pub g: String,
    /// `"branch"` (constructive case) or `"fallback-search"`.
    pub source: String,
}

/// Result record for `classify` and `check`.
#[derive(Serialize)]
pub struct CheckJson {
    pub omega: OmegaJson,
    /// Weight, exact fraction string.
    pub lambda: String,
    /// `"in-Tk"`, `"in-T0-only"`, `"outside"` for classify;
    /// `"flat"`, `"not-flat"`, `"mismatch"`, `"undetermined"` for check.
    pub verdict: String,
    /// Human-readable elaboration of the verdict.
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
    /// Defect in the closed-form orientation (`engine defect × orientation`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub defect: Option<VectorJson>,
    /// Sign relating the engine's (operator-side − product-side) value to
    /// the reported `defect`: `defect = orientation · engine_value`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation: Option<i8>,
    /// Closed-form prediction for the defect, when the case has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    /// Number of components/pairs verified exactly.
    pub components_checked: usize,
}

impl CheckJson {
    pub fn witness_fields(
        w: &CounterexampleWitness,
        labels: &[String],
    ) -> (Option<String>, Option<WitnessJson>, Option<VectorJson>, Option<i8>, Option<String>) {
        let source = match w.source {
            rbdiff_core::WitnessSource::Branch => "branch",
            rbdiff_core::WitnessSource::FallbackSearch => "fallback-search",
        };
        (
            Some(w.case.to_string()),
            Some(WitnessJson {
                fixture: format!("I_{}", w.fixture_depth),
                depth: w.fixture_depth,
                n: w.n,
                f: w.f.to_string(),
                g: w.g.to_string(),
                source: source.to_string(),
            }),
            Some(VectorJson::from_elem(labels, &w.normalized_defect())),
            Some(w.orientation),
            w.formula.clone(),
        )
    }
}

/// One line of `sweep` output.
#[derive(Serialize)]
pub struct SweepJson {
    pub omega: OmegaJson,
    pub lambda: String,
    pub symbolic: String,
    pub experimental: String,
    pub agreement: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case_id: Option<String>,
}

impl SweepJson {
    pub fn from_row(row: &SweepRow) -> Self {
        SweepJson {
            omega: OmegaJson::from_omega(&row.omega),
            lambda: row.lambda.to_string(),
            symbolic: row.symbolic.to_string(),
            experimental: row.experimental.to_string(),
            agreement: row.agreement,
            case_id: row.case_id.map(|c| c.to_string()),
        }
    }
}

/// One lifted component from `coextend`.
#[derive(Serialize)]
pub struct ComponentJson {
    pub n: usize,
    pub coords: Vec<String>,
}

/// Result record for `coextend`.
#[derive(Serialize)]
pub struct CoextendJson {
    pub omega: OmegaJson,
    pub lambda: String,
    pub fixture: String,
    pub witness: String,
    pub basis: Vec<String>,
    pub components: Vec<ComponentJson>,
}

/// One term of an extended-operator image: a pure tensor and its coefficient.
#[derive(Serialize)]
pub struct TensorTermJson {
    pub word: Vec<String>,
    pub coeff: String,
}

/// Result record for `extend`.
#[derive(Serialize)]
pub struct ExtendJson {
    pub omega: OmegaJson,
    pub lambda: String,
    pub fixture: String,
    pub word: Vec<String>,
    pub image: Vec<TensorTermJson>,
}
