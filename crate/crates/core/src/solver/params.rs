use serde::{Deserialize, Serialize};

use super::SolverError;

/// Coefficients of `∂ₜu = Δu − κu + γ u×Δu − κμ|u|²u` and monitor exponents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LlbParams {
    pub kappa: f64,
    pub mu: f64,
    #[serde(default = "default_cross")]
    pub cross_coeff: f64,
    /// Friedrichs cutoff `n`; `None` evolves the full dealiased system.
    #[serde(default)]
    pub cutoff_n: Option<f64>,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_p")]
    pub p_blowup: f64,
    /// Index of the inhomogeneous Sobolev monitor.
    #[serde(default = "default_m")]
    pub sobolev_m: f64,
}

fn default_cross() -> f64 {
    1.0
}
fn default_rho() -> f64 {
    4.0
}
fn default_delta() -> f64 {
    1.5
}
fn default_p() -> f64 {
    2.0
}
fn default_m() -> f64 {
    2.0
}

impl LlbParams {
    pub fn new(kappa: f64, mu: f64) -> Self {
        LlbParams {
            kappa,
            mu,
            cross_coeff: 1.0,
            cutoff_n: None,
            rho: 4.0,
            delta: 1.5,
            p_blowup: 2.0,
            sobolev_m: 2.0,
        }
    }

    pub fn with_cutoff(mut self, n: f64) -> Self {
        self.cutoff_n = Some(n);
        self
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidParams(m.to_string()));
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return bad("kappa must be positive");
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return bad("mu must be positive");
        }
        if !self.cross_coeff.is_finite() {
            return bad("cross_coeff must be finite");
        }
        if let Some(n) = self.cutoff_n {
            if !(n > 0.0 && n.is_finite()) {
                return bad("cutoff_n must be positive");
            }
        }
        if !(self.rho > 2.0 && self.rho.is_finite()) {
            return bad("rho must exceed 2");
        }
        if !(self.delta > 1.0 && self.delta < 2.0) {
            return bad("delta must lie in (1, 2)");
        }
        if !(self.p_blowup > 1.0 && self.p_blowup.is_finite()) {
            return bad("p_blowup must lie in (1, inf)");
        }
        if !self.sobolev_m.is_finite() {
            return bad("sobolev_m must be finite");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let p: LlbParams = serde_json::from_str(r#"{"kappa":1,"mu":2}"#).unwrap();
        assert_eq!(p, LlbParams::new(1.0, 2.0));
        assert!(p.validate().is_ok());
    }

    #[test]
    fn ranges_enforced() {
        let mut p = LlbParams::new(1.0, 1.0);
        p.delta = 2.0;
        assert!(p.validate().is_err());
        let mut p = LlbParams::new(1.0, 1.0);
        p.rho = 2.0;
        assert!(p.validate().is_err());
        assert!(LlbParams::new(0.0, 1.0).validate().is_err());
        assert!(LlbParams::new(1.0, 1.0).with_cutoff(-1.0).validate().is_err());
        assert!(serde_json::from_str::<LlbParams>(r#"{"kappa":1,"mu":2,"gamma":1}"#).is_err());
    }
}
