//! The Λ change of variables between radial linear Fokker-Planck densities
//! and radial Bose-Einstein Fokker-Planck densities.
//!
//! With `φ = r f`, `ψ = r g` and cumulatives `Φ(r) = φ([0,r])`,
//! `Ψ(r) = ψ([0,r])` (atoms included), the map and its inverse are the
//! Hopf-Cole pair
//!
//! ```text
//!     Φ = log(1 + Ψ)           φ(r) = ψ(r) / (1 + Ψ(r)),
//!     Ψ = e^Φ − 1              ψ(r) = φ(r) e^{Φ(r)},
//! ```
//!
//! and total masses satisfy `m = 2π log(1 + M/2π)`.
//!
//! Discretely, both directions share the same trapezoid cumulative:
//! [`lambda_inverse`] solves the recurrence that [`lambda_forward`] evaluates,
//! so a round trip reproduces the input to round-off rather than to
//! quadrature accuracy.

use crate::error::{Error, Result};
use crate::grid::{running_trapezoid, CumulativeProfile, ProfileKind, RadialProfile, TWO_PI};

/// Overflow guard on the cumulative exponent Φ. Φ is bounded by m/2π for
/// finite-mass data, so hitting this signals corrupt input.
const MAX_EXPONENT: f64 = 700.0;

/// Running integral `atom + ∫₀^r values ds` of a profile.
pub fn cumulate(p: &RadialProfile) -> CumulativeProfile {
    let values = running_trapezoid(p.grid().nodes(), p.values(), p.atom());
    CumulativeProfile::from_parts(p.grid().clone(), values)
}

/// Λ: map an FP-side profile `ψ` to the BEFP-side `φ(r) = ψ(r)/(1 + Ψ(r))`,
/// with atom `log(1 + atom_ψ)`.
pub fn lambda_forward(g_profile: &RadialProfile) -> Result<RadialProfile> {
    g_profile.require_kind(ProfileKind::Fp)?;
    let psi = g_profile.values();
    let cum = cumulate(g_profile);
    let phi: Vec<f64> = psi
        .iter()
        .zip(cum.values())
        .map(|(&p, &c)| p / (1.0 + c))
        .collect();
    RadialProfile::new(
        g_profile.grid().clone(),
        ProfileKind::Befp,
        phi,
        g_profile.atom().ln_1p(),
    )
}

/// Λ⁻¹: map a BEFP-side profile `φ` to the FP-side `ψ(r) = φ(r) e^{Φ(r)}`,
/// with atom `e^{atom_φ} − 1`.
///
/// `Ψ = e^Φ − 1` is reconstructed through the same trapezoid relation the
/// forward map uses, `Ψ_i = Ψ_{i-1} + (Δr/2)(ψ_{i-1} + ψ_i)`, solved node by
/// node for `ψ_i = φ_i (1 + Ψ_i)`. This makes Λ⁻¹∘Λ exact in exact
/// arithmetic while remaining a second-order discretisation of `φ e^Φ`.
pub fn lambda_inverse(f_profile: &RadialProfile) -> Result<RadialProfile> {
    f_profile.require_kind(ProfileKind::Befp)?;
    if f_profile.atom() > MAX_EXPONENT {
        return Err(Error::ExponentOverflow(f_profile.atom()));
    }
    let phi = f_profile.values();
    let r = f_profile.grid().nodes();
    let n = phi.len();
    let atom = f_profile.atom().exp_m1();

    let mut psi = Vec::with_capacity(n);
    let mut cum = atom; // Ψ at the current node
    psi.push(phi[0] * (1.0 + cum));
    for i in 1..n {
        let dr = r[i] - r[i - 1];
        let denom = 1.0 - 0.5 * dr * phi[i];
        if denom <= 1e-9 {
            // φ_i Δr/2 ≥ 1 means more than the whole Hopf-Cole increment sits
            // in half an interval: the profile is not resolved by this grid.
            return Err(Error::UnresolvedConcentration { node: i, r: r[i] });
        }
        let base = 1.0 + cum + 0.5 * dr * psi[i - 1];
        let value = phi[i] * base / denom;
        cum += 0.5 * dr * (psi[i - 1] + value);
        if cum.ln_1p() > MAX_EXPONENT {
            return Err(Error::ExponentOverflow(cum.ln_1p()));
        }
        psi.push(value);
    }
    RadialProfile::new(f_profile.grid().clone(), ProfileKind::Fp, psi, atom)
}

/// BEFP mass of Λ(g) from the FP mass of g: `m = 2π log(1 + M/2π)`.
pub fn mass_f_from_fp(fp_mass: f64) -> f64 {
    TWO_PI * (fp_mass / TWO_PI).ln_1p()
}

/// FP mass of Λ⁻¹(f) from the BEFP mass of f: `M = 2π (e^{m/2π} − 1)`.
pub fn mass_fp_from_f(befp_mass: f64) -> f64 {
    TWO_PI * (befp_mass / TWO_PI).exp_m1()
}

/// Local L¹ Lipschitz factor of Λ: `‖Λg₁ − Λg₂‖₁ ≤ (1 + M₂/2π) ‖g₁ − g₂‖₁`
/// where `M₂ = ‖g₂‖₁`.
pub fn lipschitz_bound(_fp_mass_1: f64, fp_mass_2: f64) -> f64 {
    1.0 + fp_mass_2 / TWO_PI
}
