//! Closed-form stationary and special solutions.
//!
//! The Bose-Einstein equilibria `f_∞^β(v) = 1/(β e^{|v|²/2} − 1)`, β > 1,
//! are the only finite-mass smooth stationary states of the BEFP equation in
//! 2D; their mass is `2π log(β/(β−1))`, so every positive mass is attained
//! (the critical mass is infinite in dimension 2). The module also provides
//! the FP Maxwellian, the explicit BEFP solution emanating from a Dirac at
//! the origin, and the explicit infinite-mass solution.

use crate::error::{Error, Result};
use crate::grid::{ProfileKind, RadialGrid, RadialProfile, TWO_PI};
use std::sync::Arc;

/// β > 1 together with the two masses it determines:
/// `mass_befp = 2π log(β/(β−1))` and `mass_fp = 2π/(β−1)`.
#[derive(Debug, Clone, Copy)]
pub struct EquilibriumParams {
    beta: f64,
    mass_befp: f64,
    mass_fp: f64,
}

impl EquilibriumParams {
    pub fn from_beta(beta: f64) -> Result<Self> {
        if !(beta > 1.0) || !beta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "beta",
                message: format!("need beta > 1 (beta = 1 has infinite mass in 2D), got {beta}"),
            });
        }
        Ok(EquilibriumParams {
            beta,
            mass_befp: TWO_PI * (1.0 / (beta - 1.0)).ln_1p(),
            mass_fp: TWO_PI / (beta - 1.0),
        })
    }

    /// β for which `f_∞^β` has the given BEFP mass: `β = (1 − e^{−m/2π})⁻¹`.
    pub fn from_befp_mass(mass: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParameter {
                name: "mass",
                message: format!("need mass > 0, got {mass}"),
            });
        }
        let beta = -1.0 / (-mass / TWO_PI).exp_m1();
        Ok(EquilibriumParams {
            beta,
            mass_befp: mass,
            mass_fp: TWO_PI * (mass / TWO_PI).exp_m1(),
        })
    }

    /// β corresponding to a Maxwellian of FP mass M: `β = 2π/M + 1`.
    pub fn from_fp_mass(fp_mass: f64) -> Result<Self> {
        if !(fp_mass > 0.0) || !fp_mass.is_finite() {
            return Err(Error::InvalidParameter {
                name: "fp_mass",
                message: format!("need fp_mass > 0, got {fp_mass}"),
            });
        }
        let beta = TWO_PI / fp_mass + 1.0;
        Ok(EquilibriumParams {
            beta,
            mass_befp: TWO_PI * (fp_mass / TWO_PI).ln_1p(),
            mass_fp: fp_mass,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn befp_mass(&self) -> f64 {
        self.mass_befp
    }

    pub fn fp_mass(&self) -> f64 {
        self.mass_fp
    }

    /// `f_∞^β(r)`, evaluated as `1/(β−1 + β(e^{r²/2}−1))`: the expm1 form
    /// avoids cancellation for β near 1 and small r.
    pub fn density(&self, r: f64) -> f64 {
        let x = r * r / 2.0;
        if x > 700.0 {
            return 0.0;
        }
        1.0 / (self.beta - 1.0 + self.beta * x.exp_m1())
    }

    /// Analytic radial derivative `∂_r f_∞^β = −β r e^{r²/2} f²`.
    pub fn density_derivative(&self, r: f64) -> f64 {
        let x = r * r / 2.0;
        if x > 700.0 {
            return 0.0;
        }
        let f = self.density(r);
        -self.beta * r * x.exp() * f * f
    }

    pub fn profile(&self, grid: &Arc<RadialGrid>) -> RadialProfile {
        RadialProfile::from_density(grid.clone(), ProfileKind::Befp, |r| self.density(r))
            .expect("equilibrium density is finite and non-negative")
    }
}

/// `f_∞^β(r) = 1/(β e^{r²/2} − 1)`.
pub fn bose_einstein(beta: f64, r: f64) -> Result<f64> {
    Ok(EquilibriumParams::from_beta(beta)?.density(r))
}

/// Invert the 2D mass formula: the β whose equilibrium carries BEFP mass `m`.
pub fn beta_from_mass(m: f64) -> Result<f64> {
    Ok(EquilibriumParams::from_befp_mass(m)?.beta())
}

/// 2D mass of `f_∞^β`: `2π log(β/(β−1))`.
pub fn equilibrium_mass(beta: f64) -> Result<f64> {
    Ok(EquilibriumParams::from_beta(beta)?.befp_mass())
}

/// `M g_∞(r)` with `g_∞(v) = (2π)⁻¹ e^{−|v|²/2}`, the FP equilibrium.
pub fn fp_maxwellian(fp_mass: f64, r: f64) -> Result<f64> {
    if !(fp_mass >= 0.0) || !fp_mass.is_finite() {
        return Err(Error::InvalidParameter {
            name: "fp_mass",
            message: format!("need fp_mass >= 0, got {fp_mass}"),
        });
    }
    Ok(fp_mass * (-r * r / 2.0).exp() / TWO_PI)
}

pub fn maxwellian_profile(fp_mass: f64, grid: &Arc<RadialGrid>) -> Result<RadialProfile> {
    if !(fp_mass >= 0.0) || !fp_mass.is_finite() {
        return Err(Error::InvalidParameter {
            name: "fp_mass",
            message: format!("need fp_mass >= 0, got {fp_mass}"),
        });
    }
    RadialProfile::from_density(grid.clone(), ProfileKind::Fp, |r| {
        fp_mass * (-r * r / 2.0).exp() / TWO_PI
    })
}

/// Variance factor `ϑ(t) = 1 − e^{−2t}` of the explicit Dirac-start solution.
pub fn fundamental_variance(t: f64) -> f64 {
    -(-2.0 * t).exp_m1()
}

/// The BEFP solution with initial condition δ₀:
/// `f(t,r) = ϑ(t)⁻¹ [(2π+1) e^{r²/2ϑ(t)} − 1]⁻¹`.
///
/// Its mass is `2π log(1 + 1/2π)` for every `t > 0` and it converges to
/// `f_∞^{2π+1}` as `t → ∞`.
pub fn befp_fundamental(t: f64, r: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t",
            message: format!("fundamental solution is singular at t <= 0, got {t}"),
        });
    }
    let theta = fundamental_variance(t);
    let x = r * r / (2.0 * theta);
    if x > 700.0 {
        return Ok(0.0);
    }
    // (2π+1) e^x − 1 = 2π + (2π+1)(e^x − 1), stable near x = 0
    Ok(1.0 / (theta * (TWO_PI + (TWO_PI + 1.0) * x.exp_m1())))
}

/// BEFP mass of the fundamental solution, `2π log(1 + 1/2π)`.
pub fn fundamental_mass() -> f64 {
    TWO_PI * (1.0 / TWO_PI).ln_1p()
}

pub fn befp_fundamental_profile(t: f64, grid: &Arc<RadialGrid>) -> Result<RadialProfile> {
    befp_fundamental(t, 0.0)?; // validate t once
    RadialProfile::from_density(grid.clone(), ProfileKind::Befp, |r| {
        befp_fundamental(t, r).unwrap()
    })
}

/// Explicit infinite-mass solution `f(t,r) = 2 (2 A⁻¹ e^{−2t} + r²)⁻¹`,
/// the transform of `g(t,v) = A e^{2t}`. Not integrable, so it is excluded
/// from mass-based diagnostics; it satisfies the PDE pointwise and converges
/// to the stationary `2/r²` as `t → ∞`.
pub fn befp_infinite_mass(t: f64, r: f64, a: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter {
            name: "a",
            message: format!("need A > 0, got {a}"),
        });
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            message: format!("need t >= 0, got {t}"),
        });
    }
    Ok(2.0 / (2.0 / a * (-2.0 * t).exp() + r * r))
}
