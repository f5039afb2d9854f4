//! Numerical tolerances shared by every module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub eps_proj: f64,
    pub eps_q: f64,
    pub eps_disc: f64,
    pub eps_rank: f64,
    pub eps_antipode: f64,
    pub eps_geo: f64,
    /// Relative residual for points declared on a surface.
    pub eps_on: f64,
    /// Relative gradient norm below which a surface point is singular.
    pub eps_sm: f64,
    pub tau_member: f64,
    pub tol_crit: f64,
    pub tol_conv: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        eps_proj: 1e-9,
        eps_q: 1e-8,
        eps_disc: 1e-8,
        eps_rank: 1e-8,
        eps_antipode: 1e-7,
        eps_geo: 1e-7,
        eps_on: 1e-8,
        eps_sm: 1e-10,
        tau_member: 1e-10,
        tol_crit: 1e-6,
        tol_conv: 0.1,
    };

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Invalid(format!("tolerance {name} must be positive")));
        }
        let slot = match name {
            "eps_proj" => &mut self.eps_proj,
            "eps_q" => &mut self.eps_q,
            "eps_disc" => &mut self.eps_disc,
            "eps_rank" => &mut self.eps_rank,
            "eps_antipode" => &mut self.eps_antipode,
            "eps_geo" => &mut self.eps_geo,
            "eps_on" => &mut self.eps_on,
            "eps_sm" => &mut self.eps_sm,
            "tau_member" => &mut self.tau_member,
            "tol_crit" => &mut self.tol_crit,
            "tol_conv" => &mut self.tol_conv,
            _ => return Err(Error::Invalid(format!("unknown tolerance {name}"))),
        };
        *slot = value;
        Ok(())
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_by_name() {
        let mut t = Tolerances::default();
        t.set("eps_q", 1e-6).unwrap();
        assert_eq!(t.eps_q, 1e-6);
        assert!(t.set("nope", 1.0).is_err());
        assert!(t.set("eps_q", -1.0).is_err());
    }
}
