//! Entropy, dissipation, weighted norms, the Csiszár-Kullback bound and
//! convergence-rate estimation.
//!
//! The BEFP equation dissipates
//!
//! ```text
//!     H(f) = ∫ [ |v|²f/2 + f log f − (1+f) log(1+f) ] dv
//! ```
//!
//! at rate `dH/dt = −D(f)` with
//! `D(f) = ∫ f(1+f) |v + ∇log(f/(1+f))|² dv ≥ 0`, vanishing exactly on the
//! Bose-Einstein equilibria. The Csiszár-Kullback inequality turns entropy
//! gaps into squared L¹ distances: for mass-matched `f`,
//! `H(f) − H(f_∞^β) ≥ C ‖f − f_∞^β‖₁²` with
//! `C = ¼ (∫ f_∞^β (1+f_∞^β))⁻²`.

use crate::equilibria::EquilibriumParams;
use crate::error::{Error, Result};
use crate::field::Field2D;
use crate::grid::{trapezoid, RadialProfile, TWO_PI};
use serde::Serialize;

/// Densities below this are treated as vacuum in logarithmic terms.
const POSITIVITY_FLOOR: f64 = 1e-300;

/// Integrand of H at density value `f` and squared radius `r²`, with the
/// conventions `0 log 0 = 0` and an asymptotic form for `f > 1e8` where the
/// direct difference `f log f − (1+f) log(1+f)` loses all precision.
pub fn entropy_integrand(f: f64, r_squared: f64) -> f64 {
    let kinetic = 0.5 * r_squared * f;
    if f <= 0.0 {
        return 0.0;
    }
    let interaction = if f > 1e8 {
        // f log f − (1+f) log(1+f) = −log(1+f) − f log(1+1/f)
        -(f.ln_1p()) - f * (1.0 / f).ln_1p()
    } else {
        f * f.ln() - (1.0 + f) * f.ln_1p()
    };
    kinetic + interaction
}

/// Entropy of a radial profile by trapezoid quadrature,
/// `H = 2π ∫ entropy_integrand(f(r), r²) r dr`.
pub fn entropy(p: &RadialProfile) -> Result<f64> {
    let nodes = p.grid().nodes();
    let density = p.density();
    let integrand: Vec<f64> = nodes
        .iter()
        .zip(&density)
        .map(|(&r, &f)| r * entropy_integrand(f, r * r))
        .collect();
    let h = TWO_PI * trapezoid(nodes, &integrand);
    if !h.is_finite() {
        return Err(Error::InvalidProfile(format!(
            "entropy is not finite ({h}); unbounded second moment or corrupt data"
        )));
    }
    Ok(h)
}

/// Entropy of a 2D field (midpoint rule over cells).
pub fn entropy_2d(field: &Field2D) -> f64 {
    let n = field.grid().n();
    let h = field.grid().spacing();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (x, y) = field.grid().center(i, j);
            acc += entropy_integrand(field.at(i, j), x * x + y * y);
        }
    }
    h * h * acc
}

/// Entropy dissipation of a radial profile,
/// `D = 2π ∫ f(1+f) (r + ∂_r log(f/(1+f)))² r dr`,
/// with the log-gradient from centred second-order differences. Nodes where
/// `f` is below the positivity floor contribute nothing (the `f(1+f)` factor
/// vanishes faster than the logarithm diverges).
pub fn dissipation(p: &RadialProfile) -> Result<f64> {
    let nodes = p.grid().nodes();
    let density = p.density();
    let n = nodes.len();
    let w: Vec<f64> = density
        .iter()
        .map(|&f| if f > POSITIVITY_FLOOR { (f / (1.0 + f)).ln() } else { 0.0 })
        .collect();
    let mut integrand = vec![0.0; n];
    for i in 0..n {
        let f = density[i];
        if f <= POSITIVITY_FLOOR {
            continue;
        }
        let dw = if i == 0 {
            0.0 // radial symmetry: the log-gradient vanishes at the origin
        } else if i == n - 1 {
            (w[i] - w[i - 1]) / (nodes[i] - nodes[i - 1])
        } else if density[i - 1] > POSITIVITY_FLOOR && density[i + 1] > POSITIVITY_FLOOR {
            (w[i + 1] - w[i - 1]) / (nodes[i + 1] - nodes[i - 1])
        } else {
            continue;
        };
        let drift = nodes[i] + dw;
        integrand[i] = nodes[i] * f * (1.0 + f) * drift * drift;
    }
    let d = TWO_PI * trapezoid(nodes, &integrand);
    if !d.is_finite() {
        return Err(Error::InvalidProfile(format!("dissipation is not finite ({d})")));
    }
    Ok(d)
}

/// Dissipation of a 2D field with cell-centred gradients.
pub fn dissipation_2d(field: &Field2D) -> f64 {
    let n = field.grid().n();
    let h = field.grid().spacing();
    let w = |i: usize, j: usize| -> Option<f64> {
        let f = field.at(i, j);
        (f > POSITIVITY_FLOOR).then(|| (f / (1.0 + f)).ln())
    };
    let mut acc = 0.0;
    for i in 1..n - 1 {
        for j in 1..n - 1 {
            let f = field.at(i, j);
            if f <= POSITIVITY_FLOOR {
                continue;
            }
            let (Some(wxp), Some(wxm), Some(wyp), Some(wym)) =
                (w(i + 1, j), w(i - 1, j), w(i, j + 1), w(i, j - 1))
            else {
                continue;
            };
            let (x, y) = field.grid().center(i, j);
            let gx = x + (wxp - wxm) / (2.0 * h);
            let gy = y + (wyp - wym) / (2.0 * h);
            acc += f * (1.0 + f) * (gx * gx + gy * gy);
        }
    }
    h * h * acc
}

/// Both sides of the Csiszár-Kullback inequality, JSON-serialisable with
/// fixed field names.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    #[serde(rename = "H")]
    pub entropy: f64,
    #[serde(rename = "D")]
    pub dissipation: Option<f64>,
    pub ck_lhs: f64,
    pub ck_rhs: f64,
    pub ck_constant: f64,
    pub mass: f64,
}

impl EntropyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Csiszár-Kullback check of `f` against `f_∞^β`: requires the masses to
/// match (the hypothesis of the inequality) and reports
/// `ck_lhs = H(f) − H(f_∞^β)` against `ck_rhs = C ‖f − f_∞^β‖₁²` with the
/// constant `C = ¼ (∫ f_∞^β (1+f_∞^β))⁻²` computed by quadrature.
pub fn ck_bound(f: &RadialProfile, beta: f64) -> Result<EntropyReport> {
    let eq = EquilibriumParams::from_beta(beta)?;
    let eq_profile = eq.profile(f.grid());
    let mass = f.mass();
    let eq_mass = eq_profile.mass();
    let tol = 1e-6 * (1.0 + eq_mass.abs());
    if (mass - eq_mass).abs() > tol {
        return Err(Error::MassMismatch { lhs: mass, rhs: eq_mass, tol });
    }
    // ∫ f_∞^β (1 + f_∞^β) dv by quadrature (closed form: 2π/(β−1))
    let nodes = f.grid().nodes();
    let weight: Vec<f64> = nodes
        .iter()
        .map(|&r| {
            let fe = eq.density(r);
            r * fe * (1.0 + fe)
        })
        .collect();
    let integral = TWO_PI * trapezoid(nodes, &weight);
    let ck_constant = 0.25 / (integral * integral);
    let h_f = entropy(f)?;
    let h_eq = entropy(&eq_profile)?;
    let l1 = f.l1_distance(&eq_profile)?;
    Ok(EntropyReport {
        entropy: h_f,
        dissipation: None,
        ck_lhs: h_f - h_eq,
        ck_rhs: ck_constant * l1 * l1,
        ck_constant,
        mass,
    })
}

/// Weighted norm `‖(1 + r^ℓ) f‖_p` of a radial density; `p = ∞` takes the
/// sup over nodes. `ℓ = 0` is the unweighted norm.
pub fn lp_ell_norm(profile: &RadialProfile, p: f64, ell: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            message: format!("need p >= 1, got {p}"),
        });
    }
    if !(ell >= 0.0) || !ell.is_finite() {
        return Err(Error::InvalidParameter {
            name: "ell",
            message: format!("need ell >= 0, got {ell}"),
        });
    }
    let nodes = profile.grid().nodes();
    let density = profile.density();
    let weighted = move |r: f64, f: f64| if ell == 0.0 { f } else { (1.0 + r.powf(ell)) * f };
    if profile.atom() > 0.0 && p > 1.0 {
        // a point mass has no density: only its L¹_ℓ norm is finite
        return Ok(f64::INFINITY);
    }
    if p.is_infinite() {
        return Ok(nodes
            .iter()
            .zip(&density)
            .map(|(&r, &f)| weighted(r, f))
            .fold(0.0, f64::max));
    }
    let integrand: Vec<f64> = nodes
        .iter()
        .zip(&density)
        .map(|(&r, &f)| r * weighted(r, f).powf(p))
        .collect();
    let atom_part = TWO_PI * profile.atom(); // weight (1 + 0^ℓ) = 1 at the origin
    Ok((TWO_PI * trapezoid(nodes, &integrand) + atom_part).powf(1.0 / p))
}

/// Weighted norm of a 2D field.
pub fn lp_ell_norm_2d(field: &Field2D, p: f64, ell: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            message: format!("need p >= 1, got {p}"),
        });
    }
    let n = field.grid().n();
    let h = field.grid().spacing();
    let mut acc = 0.0;
    let mut sup = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let (x, y) = field.grid().center(i, j);
            let r = (x * x + y * y).sqrt();
            let weight = if ell == 0.0 { 1.0 } else { 1.0 + r.powf(ell) };
            let w = weight * field.at(i, j);
            if p.is_infinite() {
                sup = sup.max(w);
            } else {
                acc += w.powf(p);
            }
        }
    }
    Ok(if p.is_infinite() { sup } else { (h * h * acc).powf(1.0 / p) })
}

/// Ordinary least squares fit of `log(distance)` against `t`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Points dropped because the distance was not positive.
    pub excluded: usize,
}

/// Fit an exponential decay rate from a `(t, distance)` history.
pub fn fit_decay_rate(history: &[(f64, f64)]) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = history
        .iter()
        .filter(|(_, d)| *d > 0.0)
        .map(|&(t, d)| (t, d.ln()))
        .collect();
    let excluded = history.len() - pts.len();
    if pts.len() < 4 {
        return Err(Error::InvalidParameter {
            name: "history",
            message: format!("need at least 4 positive-distance points, have {}", pts.len()),
        });
    }
    let n = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_t) * (p.1 - mean_y)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_t;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(DecayFit { slope, intercept, r_squared, excluded })
}

/// Finite-difference residual of the radial BEFP operator,
/// `∂_t f − Δf − div(v f(1+f))`, with central differences of step `step`.
/// In radial 2D coordinates `Δf = f_rr + f_r/r` and
/// `div(v h) = (1/r) ∂_r(r² h)` for `h = f(1+f)`.
pub fn befp_residual(f: &impl Fn(f64, f64) -> f64, t: f64, r: f64, step: f64) -> f64 {
    let ft = (f(t + step, r) - f(t - step, r)) / (2.0 * step);
    let fc = f(t, r);
    let fp = f(t, r + step);
    let fm = f(t, r - step);
    let fr = (fp - fm) / (2.0 * step);
    let frr = (fp - 2.0 * fc + fm) / (step * step);
    let drift = |rr: f64| {
        let v = f(t, rr);
        rr * rr * v * (1.0 + v)
    };
    let div_drift = (drift(r + step) - drift(r - step)) / (2.0 * step * r);
    ft - (frr + fr / r + div_drift)
}

/// Fourth-order variant of [`befp_residual`]; the wider stencil tolerates a
/// larger step, which pushes the round-off floor below 1e-8.
pub fn befp_residual_o4(f: &impl Fn(f64, f64) -> f64, t: f64, r: f64, step: f64) -> f64 {
    let d1 = |g: &dyn Fn(f64) -> f64, x: f64| {
        (-g(x + 2.0 * step) + 8.0 * g(x + step) - 8.0 * g(x - step) + g(x - 2.0 * step))
            / (12.0 * step)
    };
    let d2 = |g: &dyn Fn(f64) -> f64, x: f64| {
        (-g(x + 2.0 * step) + 16.0 * g(x + step) - 30.0 * g(x) + 16.0 * g(x - step)
            - g(x - 2.0 * step))
            / (12.0 * step * step)
    };
    let ft = d1(&|s| f(s, r), t);
    let fr = d1(&|s| f(t, s), r);
    let frr = d2(&|s| f(t, s), r);
    let drift = |rr: f64| {
        let v = f(t, rr);
        rr * rr * v * (1.0 + v)
    };
    let div_drift = d1(&drift, r) / r;
    ft - (frr + fr / r + div_drift)
}
