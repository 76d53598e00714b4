//! Exact solution operator for the linear Fokker-Planck equation
//! `∂_t g = Δg + div(v g)` via its explicit fundamental solution.
//!
//! The kernel in the Ornstein-Uhlenbeck form is
//!
//! ```text
//!     F(t, v, w) = (2π θ)⁻¹ exp(−|v − e⁻ᵗ w|² / 2θ),   θ = 1 − e⁻²ᵗ,
//! ```
//!
//! algebraically equal to `a⁻¹ M_ν(a^{-1/2} v − w)` with `a = e⁻²ᵗ`,
//! `ν = e²ᵗ − 1`, `M_λ(ξ) = (2πλ)⁻¹ e^{−|ξ|²/2λ}` ([`fp_kernel_literal`]
//! keeps the latter form so the simplification stays testable).
//!
//! For radially symmetric data the angular integral collapses onto a
//! modified Bessel function. With `ψ(r) = r g(r)`,
//!
//! ```text
//!     K(t, r, s) = θ⁻¹ exp(−(r² + e⁻²ᵗ s²)/2θ) I₀(r s e⁻ᵗ / θ),
//!     ψ(t, r)    = r [ ∫₀^∞ K(t, r, s) ψ₀(s) ds + atom·K(t, r, 0) ],
//! ```
//!
//! and `∫₀^∞ K(t,r,s) r dr = 1` for every `s` (mass conservation). The
//! kernel is assembled as `θ⁻¹ e^{−(r − s e⁻ᵗ)²/2θ} · i0e(r s e⁻ᵗ/θ)`, which
//! keeps every factor in range even when `r s / θ` reaches ~10⁴.

use crate::bessel::i0_scaled;
use crate::diagnostics::lp_ell_norm;
use crate::error::{Error, Result};
use crate::field::{Field2D, Grid2D};
use crate::grid::{ProfileKind, RadialProfile, TWO_PI};
use rayon::prelude::*;
use std::sync::Arc;

/// Below this time the kernel is numerically a delta and quadrature against
/// it is meaningless; propagation returns the input unchanged.
pub const SMALL_T_GUARD: f64 = 1e-4;

/// Time-dependent coefficients of the kernel: `a = e⁻²ᵗ`, `ν = e²ᵗ − 1`,
/// `θ = 1 − e⁻²ᵗ = a·ν`.
#[derive(Debug, Clone, Copy)]
pub struct FpKernelParams {
    pub t: f64,
    pub a: f64,
    pub nu: f64,
    pub theta: f64,
    /// `e⁻ᵗ`, the mean-contraction factor.
    pub decay: f64,
}

impl FpKernelParams {
    pub fn from_time(t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter {
                name: "t",
                message: format!("kernel requires t > 0, got {t}"),
            });
        }
        Ok(FpKernelParams {
            t,
            a: (-2.0 * t).exp(),
            nu: (2.0 * t).exp_m1(),
            theta: -(-2.0 * t).exp_m1(),
            decay: (-t).exp(),
        })
    }

    /// 2D kernel in the simplified Ornstein-Uhlenbeck form.
    pub fn kernel_2d(&self, v: (f64, f64), w: (f64, f64)) -> f64 {
        let dx = v.0 - self.decay * w.0;
        let dy = v.1 - self.decay * w.1;
        (-(dx * dx + dy * dy) / (2.0 * self.theta)).exp() / (TWO_PI * self.theta)
    }

    /// Radial kernel `K(t, r, s)`; `K(t, r, 0) = θ⁻¹ e^{−r²/2θ}`.
    pub fn radial_kernel(&self, r: f64, s: f64) -> f64 {
        let d = r - s * self.decay;
        let x = r * s * self.decay / self.theta;
        (-d * d / (2.0 * self.theta)).exp() * i0_scaled(x) / self.theta
    }
}

/// `F(t, v, w)`.
pub fn fp_kernel(t: f64, v: (f64, f64), w: (f64, f64)) -> Result<f64> {
    Ok(FpKernelParams::from_time(t)?.kernel_2d(v, w))
}

/// The kernel in its original self-similar form
/// `a⁻¹ M_ν(a^{-1/2} v − w)`; kept as an independent algebraic route for
/// cross-checking the simplified form.
pub fn fp_kernel_literal(t: f64, v: (f64, f64), w: (f64, f64)) -> Result<f64> {
    let p = FpKernelParams::from_time(t)?;
    let root_a_inv = p.t.exp(); // a^{-1/2} = e^t
    let dx = root_a_inv * v.0 - w.0;
    let dy = root_a_inv * v.1 - w.1;
    Ok((-(dx * dx + dy * dy) / (2.0 * p.nu)).exp() / (p.a * TWO_PI * p.nu))
}

/// `K(t, r, s)`.
pub fn fp_radial_kernel(t: f64, r: f64, s: f64) -> Result<f64> {
    Ok(FpKernelParams::from_time(t)?.radial_kernel(r, s))
}

/// Propagate an FP-side radial profile to time `t` with the exact kernel.
/// The origin atom (FP mass `2π·atom`) contributes `atom · K(t, r, 0)`;
/// the output carries no atom for `t > 0` (instant smoothing).
pub fn fp_propagate_radial(psi0: &RadialProfile, t: f64) -> Result<RadialProfile> {
    psi0.require_kind(ProfileKind::Fp)?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t",
            message: format!("propagation requires t > 0, got {t}"),
        });
    }
    if t < SMALL_T_GUARD {
        log::warn!("fp_propagate_radial: t = {t} below the {SMALL_T_GUARD} guard, returning input unchanged");
        return Ok(psi0.clone());
    }
    let params = FpKernelParams::from_time(t)?;
    let nodes = psi0.grid().nodes();
    let values = psi0.values();
    let atom = psi0.atom();
    let n = nodes.len();

    // trapezoid weights for the s-integral
    let mut weights = vec![0.0; n];
    weights[0] = 0.5 * (nodes[1] - nodes[0]);
    weights[n - 1] = 0.5 * (nodes[n - 1] - nodes[n - 2]);
    for j in 1..n - 1 {
        weights[j] = 0.5 * (nodes[j + 1] - nodes[j - 1]);
    }

    // restrict the quadrature to the support (a pure atom costs O(N))
    let support = values
        .iter()
        .position(|&v| v != 0.0)
        .map(|lo| (lo, values.iter().rposition(|&v| v != 0.0).unwrap()));

    let out: Vec<f64> = nodes
        .par_iter()
        .map(|&r| {
            let mut acc = 0.0;
            if let Some((lo, hi)) = support {
                for j in lo..=hi {
                    acc += weights[j] * params.radial_kernel(r, nodes[j]) * values[j];
                }
            }
            if atom > 0.0 {
                acc += atom * params.radial_kernel(r, 0.0);
            }
            r * acc
        })
        .collect();
    RadialProfile::new(psi0.grid().clone(), ProfileKind::Fp, out, 0.0)
}

/// Propagate a cell-averaged 2D field (midpoint sums over source cells).
pub fn fp_propagate_field(g0: &Field2D, t: f64) -> Result<Field2D> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t",
            message: format!("propagation requires t > 0, got {t}"),
        });
    }
    if t < SMALL_T_GUARD {
        log::warn!("fp_propagate_field: t = {t} below the {SMALL_T_GUARD} guard, returning input unchanged");
        return Ok(g0.clone());
    }
    let params = FpKernelParams::from_time(t)?;
    let grid = g0.grid().clone();
    let n = grid.n();
    let h = grid.spacing();
    let cell_mass = h * h;

    // contracted source positions and their weights
    let mut sources = Vec::with_capacity(n * n);
    for k in 0..n {
        for l in 0..n {
            let v = g0.at(k, l);
            if v != 0.0 {
                let (x, y) = grid.center(k, l);
                sources.push((params.decay * x, params.decay * y, v * cell_mass));
            }
        }
    }
    let inv_two_theta = 1.0 / (2.0 * params.theta);
    let norm = 1.0 / (TWO_PI * params.theta);
    let values: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (x, y) = grid.center(idx / n, idx % n);
            let mut acc = 0.0;
            for &(sx, sy, m) in &sources {
                let dx = x - sx;
                let dy = y - sy;
                acc += m * (-(dx * dx + dy * dy) * inv_two_theta).exp();
            }
            acc * norm
        })
        .collect();
    Ok(Field2D::from_raw(grid, values))
}

/// Propagate a finite list of point masses `(position, mass)` and sample the
/// result on `grid`.
pub fn fp_propagate_points(
    points: &[((f64, f64), f64)],
    t: f64,
    grid: &Arc<Grid2D>,
) -> Result<Field2D> {
    let params = FpKernelParams::from_time(t)?;
    Field2D::from_fn(grid.clone(), |x, y| {
        points
            .iter()
            .map(|&((wx, wy), mass)| mass * params.kernel_2d((x, y), (wx, wy)))
            .sum()
    })
}

/// Evaluate the propagated solution at a single point by tensor-Simpson
/// quadrature of the kernel against a smooth density `g0` supported in
/// `[-half_width, half_width]²`. `n_quad` must be even.
pub fn fp_eval_smooth(
    g0: &(impl Fn(f64, f64) -> f64 + Sync),
    half_width: f64,
    n_quad: usize,
    t: f64,
    v: (f64, f64),
) -> Result<f64> {
    if n_quad < 2 || n_quad % 2 != 0 {
        return Err(Error::InvalidParameter {
            name: "n_quad",
            message: format!("Simpson rule needs an even interval count, got {n_quad}"),
        });
    }
    let params = FpKernelParams::from_time(t)?;
    let h = 2.0 * half_width / n_quad as f64;
    let weight = |k: usize| -> f64 {
        if k == 0 || k == n_quad {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let total: f64 = (0..=n_quad)
        .into_par_iter()
        .map(|i| {
            let x = -half_width + i as f64 * h;
            let wi = weight(i);
            let mut row = 0.0;
            for j in 0..=n_quad {
                let y = -half_width + j as f64 * h;
                row += weight(j) * g0(x, y) * params.kernel_2d(v, (x, y));
            }
            wi * row
        })
        .sum();
    Ok(total * h * h / 9.0)
}

/// Per-time ratios of `‖g(t)‖_{L^p_ℓ}` against the two a-priori envelopes:
/// growth `e^{2(p−1)t/p} ‖g₀‖_{L^p_ℓ}` and smoothing
/// `(e^{2t}/(e^{2t}−1))^{(p−1)/p} ‖g₀‖_{L¹_ℓ}` (constants omitted, so the
/// ratios are bounded but not necessarily ≤ 1).
#[derive(Debug, Clone)]
pub struct LpBoundReport {
    pub p: f64,
    pub ell: f64,
    pub entries: Vec<LpBoundEntry>,
}

#[derive(Debug, Clone, Copy)]
pub struct LpBoundEntry {
    pub t: f64,
    pub norm: f64,
    /// norm / (e^{2(p−1)t/p} ‖g₀‖_{p,ℓ})
    pub growth_ratio: f64,
    /// norm / ((e^{2t}/(e^{2t}−1))^{(p−1)/p} ‖g₀‖_{1,ℓ})
    pub smoothing_ratio: f64,
}

impl LpBoundReport {
    pub fn max_growth_ratio(&self) -> f64 {
        self.entries.iter().map(|e| e.growth_ratio).fold(0.0, f64::max)
    }

    pub fn max_smoothing_ratio(&self) -> f64 {
        self.entries.iter().map(|e| e.smoothing_ratio).fold(0.0, f64::max)
    }
}

/// Compare a propagated trajectory against the L^p_ℓ envelopes.
pub fn check_lp_bounds(
    g0: &RadialProfile,
    trajectory: &[(f64, RadialProfile)],
    p: f64,
    ell: f64,
) -> Result<LpBoundReport> {
    let exponent = if p.is_infinite() { 1.0 } else { (p - 1.0) / p };
    let base_p = lp_ell_norm(g0, p, ell)?;
    let base_1 = lp_ell_norm(g0, 1.0, ell)?;
    let mut entries = Vec::with_capacity(trajectory.len());
    for (t, profile) in trajectory {
        let norm = lp_ell_norm(profile, p, ell)?;
        let growth_env = (2.0 * exponent * t).exp() * base_p;
        let smooth_env = ((2.0 * t).exp() / (2.0 * t).exp_m1()).powf(exponent) * base_1;
        entries.push(LpBoundEntry {
            t: *t,
            norm,
            growth_ratio: if growth_env > 0.0 { norm / growth_env } else { f64::NAN },
            smoothing_ratio: if smooth_env > 0.0 { norm / smooth_env } else { f64::NAN },
        });
    }
    Ok(LpBoundReport { p, ell, entries })
}
