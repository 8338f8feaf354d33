use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where the noise scale attached to a [`Signal`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaSource {
    Known,
    Estimated,
    Unset,
}

/// An observed 1-D series together with an optional noise scale.
///
/// Values must be finite and there must be at least two of them; a path over
/// fewer observations has no difference index to select.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    values: Vec<f64>,
    sigma: Option<f64>,
    sigma_source: SigmaSource,
}

impl Signal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 observations, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value at position {} (1-based {})",
                i,
                i + 1
            )));
        }
        Ok(Self {
            values,
            sigma: None,
            sigma_source: SigmaSource::Unset,
        })
    }

    pub fn with_sigma(values: Vec<f64>, sigma: f64, source: SigmaSource) -> Result<Self> {
        let mut s = Self::new(values)?;
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidSigma(format!(
                "sigma must be a positive finite number, got {sigma}"
            )));
        }
        s.sigma = Some(sigma);
        s.sigma_source = source;
        Ok(s)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // constructor guarantees n >= 2
    }

    pub fn sigma(&self) -> Option<f64> {
        self.sigma
    }

    pub fn sigma_source(&self) -> SigmaSource {
        self.sigma_source
    }
}
