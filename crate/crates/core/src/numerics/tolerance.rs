use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Central acceptance thresholds. Files may override any subset of fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// `||c_n| - 1/sqrt(q)|`.
    pub gauss_modulus: f64,
    /// pointwise Fourier-transform error against closed forms.
    pub frft_sinc: f64,
    /// `|norm ratio - 1|`.
    pub parseval: f64,
    /// Zak identity residuals.
    pub zak: f64,
    /// relative chirp-moment error.
    pub chirp_moment: f64,
    /// oblique vs direct transform, relative to `||f||_2`.
    pub oblique: f64,
    /// fraction of transform energy outside a predicted support.
    pub leak: f64,
    /// relative sup deviation of phase-perturbed moduli.
    pub phase_invariance: f64,
    /// upper bound on the normalized correlation of distinct phase sums.
    pub correlation_max: f64,
    /// sup-error target of the approximate solver.
    pub approx_epsilon: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            gauss_modulus: 1e-12,
            frft_sinc: 1e-8,
            parseval: 1e-4,
            zak: 1e-6,
            chirp_moment: 1e-6,
            oblique: 1e-4,
            leak: 1e-3,
            phase_invariance: 1e-3,
            correlation_max: 0.99,
            approx_epsilon: 0.05,
        }
    }
}

impl Tolerances {
    pub fn from_json(text: &str) -> Result<Self> {
        let t: Self = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("tolerance file: {e}")))?;
        t.validate()?;
        Ok(t)
    }

    pub fn load(path: &Path) -> std::io::Result<std::result::Result<Self, Error>> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::from_json(&text))
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.gauss_modulus,
            self.frft_sinc,
            self.parseval,
            self.zak,
            self.chirp_moment,
            self.oblique,
            self.leak,
            self.phase_invariance,
            self.correlation_max,
            self.approx_epsilon,
        ];
        if all.iter().all(|t| t.is_finite() && *t > 0.0) {
            Ok(())
        } else {
            Err(Error::InvalidInput("tolerances must be finite and positive".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_override() {
        let t = Tolerances::from_json(r#"{"leak": 1e-4}"#).unwrap();
        assert_eq!(t.leak, 1e-4);
        assert_eq!(t.zak, 1e-6);
        assert!(Tolerances::from_json(r#"{"lek": 1}"#).is_err());
        assert!(Tolerances::from_json(r#"{"leak": -1}"#).is_err());
    }
}
