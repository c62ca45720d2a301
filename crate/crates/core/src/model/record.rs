use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use super::state::MomentSet;
use crate::separated::PowerFit;

/// Non-finite floats as JSON `null`, read back as infinity.
mod nullable {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// Diagnostics recorded at one output time.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub t: f64,
    /// Last step size taken before this output.
    pub dt: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<MomentSet<f64>>,
    /// Largest one-sided difference quotients of `(h, U, V)` (or `(h, u, v)` in the plane).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_gradient: Option<[f64; 3]>,
    /// Named drifts of invariants relative to their initial values.
    #[serde(default)]
    pub drifts: BTreeMap<String, f64>,
}

/// What tripped the singularity detector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionReason {
    Gradient,
    DtFloor,
    NonFinite,
    EscapeThreshold,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "cause", rename_all = "snake_case")]
pub enum Termination {
    Horizon {
        t: f64,
    },
    BlowupDetected {
        t: f64,
        reason: DetectionReason,
        /// Field that tripped the detector (`h`, `u`, `v`, `dt`, `theta`, …).
        quantity: String,
        /// Radius (or `|x|` in the plane) where it tripped.
        location: f64,
        #[serde(with = "nullable")]
        value: f64,
    },
    Error {
        t: f64,
        message: String,
    },
}

impl Termination {
    pub fn name(&self) -> &'static str {
        match self {
            Termination::Horizon { .. } => "horizon",
            Termination::BlowupDetected { .. } => "blowup_detected",
            Termination::Error { .. } => "error",
        }
    }

    pub fn time(&self) -> f64 {
        match self {
            Termination::Horizon { t } | Termination::BlowupDetected { t, .. } | Termination::Error { t, .. } => *t,
        }
    }

    pub fn is_blowup(&self) -> bool {
        matches!(self, Termination::BlowupDetected { .. })
    }
}

/// Scheme metadata echoed into every record.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SchemeMeta {
    pub solver: String,
    pub flux: String,
    pub order: u8,
    pub cfl: f64,
    pub scalar: String,
    pub cells: Vec<usize>,
    pub spacing: f64,
    /// Infinite (written as `null`) when detection by gradient is off.
    #[serde(with = "nullable")]
    pub gradient_threshold: f64,
    pub dt_floor: f64,
    pub steps: usize,
}

/// Blowup estimate attached to a record: detection or escape time and fitted growth rates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupSummary {
    pub t0: f64,
    #[serde(default)]
    pub rates: BTreeMap<String, PowerFit<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: ScenarioConfig,
    pub scheme: SchemeMeta,
    pub diagnostics: Vec<StepDiagnostics>,
    pub termination: Termination,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blowup: Option<BlowupSummary>,
}

impl RunRecord {
    /// Whether the recorded output times are strictly increasing.
    pub fn times_increasing(&self) -> bool {
        self.diagnostics.windows(2).all(|w| w[1].t > w[0].t)
    }

    pub fn times(&self) -> Vec<f64> {
        self.diagnostics.iter().map(|d| d.t).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn termination_tags() {
        let t = Termination::BlowupDetected {
            t: 0.1,
            reason: DetectionReason::Gradient,
            quantity: "h".into(),
            location: 0.4,
            value: 1e4,
        };
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.contains(r#""cause":"blowup_detected""#) && s.contains(r#""reason":"gradient""#));
        let back: Termination = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.name(), "blowup_detected");
        let h: Termination = serde_json::from_str(r#"{"cause":"horizon","t":1.0}"#).unwrap();
        assert_eq!(h, Termination::Horizon { t: 1.0 });
    }
}
