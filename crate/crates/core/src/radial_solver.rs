//! Exact solver for radial BEFP data: Λ⁻¹, exact kernel propagation, Λ.
//!
//! Radial solutions satisfy `f(t) = Λ(g(t))` where `g` solves the linear
//! equation with `g₀ = Λ⁻¹(f₀)`, so each snapshot is computed in one shot
//! from the initial condition with no time-stepping error. Snapshots at
//! distinct times are independent and evaluated in parallel.

use crate::diagnostics::{entropy, fit_decay_rate, lp_ell_norm, DecayFit};
use crate::equilibria::{befp_fundamental, EquilibriumParams};
use crate::error::{Error, Result};
use crate::grid::{ProfileKind, RadialGrid, RadialProfile, TWO_PI};
use crate::transform::{cumulate, lambda_forward, lambda_inverse};
use rayon::prelude::*;
use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

/// Initial data for the exact radial pipeline.
#[derive(Debug, Clone)]
pub enum RadialInitialCondition {
    /// `f_∞^β`; stationary.
    Equilibrium { beta: f64 },
    /// The explicit Dirac-start solution already evolved to `t0`.
    Fundamental { t0: f64 },
    /// `c·exp(−(r−center)²/2 width²)` normalised to the given total mass.
    GaussianBump { center: f64, width: f64, mass: f64 },
    /// Point mass at the origin.
    Dirac { mass: f64 },
    /// Any tabulated non-negative BEFP-side profile.
    Tabulated(RadialProfile),
}

impl RadialInitialCondition {
    /// Realise the initial profile on a grid.
    pub fn profile(&self, grid: &Arc<RadialGrid>) -> Result<RadialProfile> {
        match self {
            RadialInitialCondition::Equilibrium { beta } => {
                Ok(EquilibriumParams::from_beta(*beta)?.profile(grid))
            }
            RadialInitialCondition::Fundamental { t0 } => {
                crate::equilibria::befp_fundamental_profile(*t0, grid)
            }
            RadialInitialCondition::GaussianBump { center, width, mass } => {
                if !(*width > 0.0) || !(*mass >= 0.0) || !(*center >= 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "gaussian bump",
                        message: format!(
                            "need center >= 0, width > 0, mass >= 0; got ({center}, {width}, {mass})"
                        ),
                    });
                }
                let (c, w) = (*center, *width);
                let raw = RadialProfile::from_density(grid.clone(), ProfileKind::Befp, |r| {
                    (-(r - c) * (r - c) / (2.0 * w * w)).exp()
                })?;
                let raw_mass = raw.mass();
                if raw_mass <= 0.0 {
                    return Ok(RadialProfile::zero(grid.clone(), ProfileKind::Befp));
                }
                let scale = mass / raw_mass;
                RadialProfile::from_density(grid.clone(), ProfileKind::Befp, move |r| {
                    scale * (-(r - c) * (r - c) / (2.0 * w * w)).exp()
                })
            }
            RadialInitialCondition::Dirac { mass } => {
                RadialProfile::dirac(grid.clone(), ProfileKind::Befp, *mass)
            }
            RadialInitialCondition::Tabulated(p) => {
                p.require_kind(ProfileKind::Befp)?;
                Ok(p.clone())
            }
        }
    }
}

/// Per-snapshot diagnostics.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SnapshotDiagnostics {
    pub mass: f64,
    pub entropy: f64,
    pub l1_to_equilibrium: f64,
    pub sup_norm: f64,
}

/// Time-stamped solution snapshots with diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    snapshots: Vec<RadialProfile>,
    diagnostics: Vec<SnapshotDiagnostics>,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn snapshots(&self) -> &[RadialProfile] {
        &self.snapshots
    }

    pub fn diagnostics(&self) -> &[SnapshotDiagnostics] {
        &self.diagnostics
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// One row per (t, r, value).
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "t,r,value")?;
        for (t, snap) in self.times.iter().zip(&self.snapshots) {
            for (r, v) in snap.grid().nodes().iter().zip(snap.values()) {
                writeln!(out, "{:.17e},{:.17e},{:.17e}", t, r, v)?;
            }
        }
        Ok(())
    }

    pub fn write_diagnostics_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "t,mass,entropy,l1_to_eq,sup")?;
        for (t, d) in self.times.iter().zip(&self.diagnostics) {
            writeln!(
                out,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                t, d.mass, d.entropy, d.l1_to_equilibrium, d.sup_norm
            )?;
        }
        Ok(())
    }
}

fn snapshot_diagnostics(snapshot: &RadialProfile) -> Result<SnapshotDiagnostics> {
    let mass = snapshot.mass();
    let l1_to_equilibrium = if mass > 1e-14 {
        let eq = EquilibriumParams::from_befp_mass(mass)?.profile(snapshot.grid());
        snapshot.l1_distance(&eq)?
    } else {
        0.0
    };
    Ok(SnapshotDiagnostics {
        mass,
        entropy: entropy(snapshot)?,
        l1_to_equilibrium,
        sup_norm: snapshot.sup_density(),
    })
}

/// Run the exact pipeline: each snapshot is
/// `Λ(exact-FP-propagation(Λ⁻¹(f₀), t))`.
pub fn solve_radial_exact(
    ic: &RadialInitialCondition,
    grid: &Arc<RadialGrid>,
    times: &[f64],
) -> Result<Trajectory> {
    if times.is_empty() {
        return Err(Error::InvalidParameter {
            name: "times",
            message: "need at least one snapshot time".into(),
        });
    }
    for w in times.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidParameter {
                name: "times",
                message: format!("times must be strictly increasing ({} then {})", w[0], w[1]),
            });
        }
    }
    if !(times[0] > 0.0) {
        return Err(Error::InvalidParameter {
            name: "times",
            message: format!("snapshot times must be positive, got {}", times[0]),
        });
    }
    let f0 = ic.profile(grid)?;
    if !f0.mass().is_finite() {
        return Err(Error::InvalidProfile("initial mass is not finite".into()));
    }
    let g0 = lambda_inverse(&f0)?;
    let results: Vec<(RadialProfile, SnapshotDiagnostics)> = times
        .par_iter()
        .map(|&t| {
            let psi_t = crate::fp_exact::fp_propagate_radial(&g0, t)?;
            let f_t = lambda_forward(&psi_t)?;
            let diag = snapshot_diagnostics(&f_t)?;
            Ok((f_t, diag))
        })
        .collect::<Result<_>>()?;
    let (snapshots, diagnostics) = results.into_iter().unzip();
    Ok(Trajectory { times: times.to_vec(), snapshots, diagnostics })
}

/// Direct quotient `f = g / (1 + Ψ(r))`: algebraically the same map as
/// [`lambda_forward`], coded through the densities as an independent
/// cross-validation path.
pub fn direct_quotient(g_snapshot: &RadialProfile) -> Result<RadialProfile> {
    g_snapshot.require_kind(ProfileKind::Fp)?;
    let nodes = g_snapshot.grid().nodes();
    let g_density = g_snapshot.density();
    let cum = cumulate(g_snapshot);
    let mut phi = Vec::with_capacity(nodes.len());
    for i in 0..nodes.len() {
        let f_density = g_density[i] / (1.0 + cum.values()[i]);
        phi.push(nodes[i] * f_density);
    }
    RadialProfile::new(
        g_snapshot.grid().clone(),
        ProfileKind::Befp,
        phi,
        g_snapshot.atom().ln_1p(),
    )
}

/// Worst margins of the pointwise sandwich
/// `(2π/(2π+M)) g ≤ f ≤ g ≤ f e^{m/2π}` over the grid.
#[derive(Debug, Clone, Copy)]
pub struct SandwichReport {
    /// max over nodes of `(2π/(2π+M)) ψ − φ` (≤ 0 when the bound holds).
    pub lower_margin: f64,
    /// max over nodes of `φ − ψ`.
    pub middle_margin: f64,
    /// max over nodes of `ψ − φ e^{m/2π}`.
    pub upper_margin: f64,
}

/// Verify the sandwich bounds for a pair `f = Λ(g)` with FP mass `M` and
/// BEFP mass `m`; fails with the offending node on violation beyond the
/// 1e-12 slack.
pub fn sandwich_check(
    f: &RadialProfile,
    g: &RadialProfile,
    fp_mass: f64,
    befp_mass: f64,
) -> Result<SandwichReport> {
    f.require_kind(ProfileKind::Befp)?;
    g.require_kind(ProfileKind::Fp)?;
    if !f.same_grid(g) {
        return Err(Error::GridMismatch);
    }
    let nodes = f.grid().nodes();
    let lower_factor = TWO_PI / (TWO_PI + fp_mass);
    let upper_factor = (befp_mass / TWO_PI).exp();
    let scale = g.values().iter().fold(0.0f64, |a, &b| a.max(b));
    let slack = 1e-12 * (1.0 + scale);
    let mut report = SandwichReport {
        lower_margin: f64::NEG_INFINITY,
        middle_margin: f64::NEG_INFINITY,
        upper_margin: f64::NEG_INFINITY,
    };
    for i in 0..nodes.len() {
        let phi = f.values()[i];
        let psi = g.values()[i];
        let lower = lower_factor * psi - phi;
        let middle = phi - psi;
        let upper = psi - phi * upper_factor;
        report.lower_margin = report.lower_margin.max(lower);
        report.middle_margin = report.middle_margin.max(middle);
        report.upper_margin = report.upper_margin.max(upper);
        if lower > slack {
            return Err(Error::SandwichViolation {
                inequality: "(2π/(2π+M)) g <= f",
                node: i,
                r: nodes[i],
                margin: lower,
            });
        }
        if middle > slack {
            return Err(Error::SandwichViolation {
                inequality: "f <= g",
                node: i,
                r: nodes[i],
                margin: middle,
            });
        }
        if upper > slack {
            return Err(Error::SandwichViolation {
                inequality: "g <= f e^{m/2π}",
                node: i,
                r: nodes[i],
                margin: upper,
            });
        }
    }
    Ok(report)
}

/// `(t, ‖f(t) − f_∞^β‖₁)` along a trajectory.
pub fn decay_history(traj: &Trajectory, beta: f64) -> Result<Vec<(f64, f64)>> {
    let eq = EquilibriumParams::from_beta(beta)?;
    let mut out = Vec::with_capacity(traj.len());
    for (t, snap) in traj.times().iter().zip(traj.snapshots()) {
        let eq_profile = eq.profile(snap.grid());
        out.push((*t, snap.l1_distance(&eq_profile)?));
    }
    Ok(out)
}

/// Least-squares decay rate of a trajectory against the mass-matched
/// equilibrium.
pub fn fit_trajectory_decay(traj: &Trajectory, beta: f64) -> Result<DecayFit> {
    fit_decay_rate(&decay_history(traj, beta)?)
}

/// Sup over the trajectory tail (`t ≥ t_min`) of
/// `‖f(t)‖_{L¹_ℓ} + ‖f(t)‖_{L^∞_ℓ}`.
pub fn tail_weighted_bound(traj: &Trajectory, t_min: f64, ell: f64) -> Result<f64> {
    let mut sup: f64 = 0.0;
    for (t, snap) in traj.times().iter().zip(traj.snapshots()) {
        if *t >= t_min {
            let combined = lp_ell_norm(snap, 1.0, ell)? + lp_ell_norm(snap, f64::INFINITY, ell)?;
            sup = sup.max(combined);
        }
    }
    Ok(sup)
}

/// The explicit Dirac-start solution as a reference trajectory evaluator.
pub fn fundamental_distance_to_equilibrium(t: f64, grid: &Arc<RadialGrid>) -> Result<f64> {
    let snap = crate::equilibria::befp_fundamental_profile(t, grid)?;
    let eq = EquilibriumParams::from_beta(TWO_PI + 1.0)?.profile(grid);
    let _ = befp_fundamental(t, 0.0)?;
    snap.l1_distance(&eq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::{befp_fundamental_profile, fundamental_mass};

    #[test]
    fn stationary_initial_data_stays_put() {
        // a large-β equilibrium (small FP mass) keeps the quadrature error of
        // the propagation below 1e-9 in L¹
        let grid = RadialGrid::uniform(8.0, 6000).unwrap();
        let beta = TWO_PI / 0.005 + 1.0;
        let eq = EquilibriumParams::from_beta(beta).unwrap().profile(&grid);
        let traj = solve_radial_exact(
            &RadialInitialCondition::Equilibrium { beta },
            &grid,
            &[0.5, 1.0, 2.0],
        )
        .unwrap();
        for snap in traj.snapshots() {
            let d = snap.l1_distance(&eq).unwrap();
            assert!(d < 1e-9, "stationary drift {d}");
        }
        // at β = 2 the trapezoid floor scales with M = 2π
        let grid2 = RadialGrid::uniform(8.0, 4000).unwrap();
        let eq2 = EquilibriumParams::from_beta(2.0).unwrap().profile(&grid2);
        let traj2 = solve_radial_exact(
            &RadialInitialCondition::Equilibrium { beta: 2.0 },
            &grid2,
            &[1.0],
        )
        .unwrap();
        let d2 = traj2.snapshots()[0].l1_distance(&eq2).unwrap();
        assert!(d2 < 5e-6, "stationary drift at beta=2: {d2}");
    }

    #[test]
    fn dirac_start_reproduces_fundamental_solution() {
        let grid = RadialGrid::uniform(8.0, 8000).unwrap();
        let traj = solve_radial_exact(
            &RadialInitialCondition::Dirac { mass: fundamental_mass() },
            &grid,
            &[1.0],
        )
        .unwrap();
        let exact = befp_fundamental_profile(1.0, &grid).unwrap();
        let d = traj.snapshots()[0].l1_distance(&exact).unwrap();
        assert!(d < 1e-7, "distance to closed form {d}");
    }

    #[test]
    fn fundamental_initial_data_advances_by_semigroup() {
        // starting from the fundamental solution at t0, the pipeline must
        // land on the fundamental solution at t0 + t
        let grid = RadialGrid::uniform(8.0, 8000).unwrap();
        let traj = solve_radial_exact(
            &RadialInitialCondition::Fundamental { t0: 0.5 },
            &grid,
            &[1.5],
        )
        .unwrap();
        let exact = befp_fundamental_profile(2.0, &grid).unwrap();
        let d = traj.snapshots()[0].l1_distance(&exact).unwrap();
        assert!(d < 1e-6, "semigroup distance {d}");
    }

    #[test]
    fn trajectory_conserves_mass() {
        let grid = RadialGrid::uniform(8.0, 8000).unwrap();
        let ic = RadialInitialCondition::GaussianBump { center: 1.5, width: 0.4, mass: 0.1 };
        let m = ic.profile(&grid).unwrap().mass();
        let traj = solve_radial_exact(&ic, &grid, &[0.5, 2.0]).unwrap();
        for d in traj.diagnostics() {
            assert!(
                (d.mass - m).abs() <= 1e-8 * (1.0 + m),
                "mass {} vs {m}",
                d.mass
            );
        }
    }

    #[test]
    fn snapshots_positive_for_positive_data() {
        let grid = RadialGrid::uniform(8.0, 2000).unwrap();
        let ic = RadialInitialCondition::GaussianBump { center: 2.0, width: 0.3, mass: 1.0 };
        let traj = solve_radial_exact(&ic, &grid, &[0.25, 1.0]).unwrap();
        for snap in traj.snapshots() {
            for (i, &v) in snap.values().iter().enumerate().skip(1) {
                assert!(v > 0.0, "node {i} not positive");
            }
        }
    }

    #[test]
    fn rejects_bad_times() {
        let grid = RadialGrid::uniform(8.0, 100).unwrap();
        let ic = RadialInitialCondition::Dirac { mass: 1.0 };
        assert!(solve_radial_exact(&ic, &grid, &[]).is_err());
        assert!(solve_radial_exact(&ic, &grid, &[0.0, 1.0]).is_err());
        assert!(solve_radial_exact(&ic, &grid, &[1.0, 1.0]).is_err());
        assert!(solve_radial_exact(&ic, &grid, &[2.0, 1.0]).is_err());
    }

    #[test]
    fn direct_quotient_agrees_with_lambda() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let grid = RadialGrid::uniform(8.0, 2000).unwrap();
        for _ in 0..100 {
            let (a, c, w): (f64, f64, f64) =
                (rng.random(), 5.0 * rng.random::<f64>(), 0.2 + rng.random::<f64>());
            let g = RadialProfile::from_density(grid.clone(), ProfileKind::Fp, |r| {
                a * (-(r - c) * (r - c) / (2.0 * w * w)).exp()
            })
            .unwrap();
            let via_quotient = direct_quotient(&g).unwrap();
            let via_lambda = lambda_forward(&g).unwrap();
            let worst = via_quotient
                .values()
                .iter()
                .zip(via_lambda.values())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0f64, f64::max);
            assert!(worst <= 1e-12, "max deviation {worst}");
        }
        // zero input stays zero
        let zero = RadialProfile::zero(grid, ProfileKind::Fp);
        assert!(direct_quotient(&zero).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sandwich_holds_for_equilibrium_pair() {
        let grid = RadialGrid::uniform(8.0, 4000).unwrap();
        let f = EquilibriumParams::from_beta(2.0).unwrap().profile(&grid);
        let g = lambda_inverse(&f).unwrap();
        let report = sandwich_check(&f, &g, g.mass(), f.mass()).unwrap();
        assert!(report.lower_margin <= 0.0 || report.lower_margin < 1e-12);
        assert!(report.middle_margin <= 0.0 || report.middle_margin < 1e-12);
    }

    #[test]
    fn sandwich_holds_along_dirac_pipeline() {
        let grid = RadialGrid::uniform(8.0, 4000).unwrap();
        let f0 = RadialProfile::dirac(grid.clone(), ProfileKind::Befp, fundamental_mass()).unwrap();
        let g0 = lambda_inverse(&f0).unwrap();
        let g1 = crate::fp_exact::fp_propagate_radial(&g0, 1.0).unwrap();
        let f1 = lambda_forward(&g1).unwrap();
        sandwich_check(&f1, &g1, g1.mass(), f1.mass()).unwrap();
    }

    #[test]
    fn sandwich_trivial_for_zero() {
        let grid = RadialGrid::uniform(8.0, 100).unwrap();
        let f = RadialProfile::zero(grid.clone(), ProfileKind::Befp);
        let g = RadialProfile::zero(grid, ProfileKind::Fp);
        sandwich_check(&f, &g, 0.0, 0.0).unwrap();
    }

    #[test]
    fn sandwich_detects_violations() {
        let grid = RadialGrid::uniform(8.0, 100).unwrap();
        let f = RadialProfile::from_density(grid.clone(), ProfileKind::Befp, |r| (-r).exp()).unwrap();
        let g = RadialProfile::zero(grid, ProfileKind::Fp);
        // f > g = 0 violates f <= g
        assert!(matches!(
            sandwich_check(&f, &g, 0.0, 1.0),
            Err(Error::SandwichViolation { inequality: "f <= g", .. })
        ));
    }

    #[test]
    fn comparison_principle_and_l1_contraction() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let grid = RadialGrid::uniform(8.0, 2000).unwrap();
        for pair in 0..20 {
            let c1: f64 = 3.0 * rng.random::<f64>();
            let w1: f64 = 0.3 + 0.7 * rng.random::<f64>();
            let m1: f64 = 0.3 + rng.random::<f64>();
            let c2: f64 = 3.0 * rng.random::<f64>();
            let w2: f64 = 0.3 + 0.7 * rng.random::<f64>();
            let m2: f64 = 0.3 + rng.random::<f64>();
            let lo = RadialInitialCondition::GaussianBump { center: c1, width: w1, mass: m1 }
                .profile(&grid)
                .unwrap();
            // f0b = f0a + second bump >= f0a
            let extra = RadialInitialCondition::GaussianBump { center: c2, width: w2, mass: m2 }
                .profile(&grid)
                .unwrap();
            let hi_values: Vec<f64> =
                lo.values().iter().zip(extra.values()).map(|(a, b)| a + b).collect();
            let hi = RadialProfile::new(grid.clone(), ProfileKind::Befp, hi_values, 0.0).unwrap();

            let traj_lo = solve_radial_exact(
                &RadialInitialCondition::Tabulated(lo.clone()),
                &grid,
                &[0.5, 2.0],
            )
            .unwrap();
            let traj_hi = solve_radial_exact(
                &RadialInitialCondition::Tabulated(hi.clone()),
                &grid,
                &[0.5, 2.0],
            )
            .unwrap();
            let d0 = lo.l1_distance(&hi).unwrap();
            for k in 0..2 {
                let a = &traj_lo.snapshots()[k];
                let b = &traj_hi.snapshots()[k];
                let violation = a
                    .values()
                    .iter()
                    .zip(b.values())
                    .map(|(x, y)| x - y)
                    .fold(f64::NEG_INFINITY, f64::max);
                assert!(violation <= 1e-10, "pair {pair}: ordering violated by {violation}");
                let dt = a.l1_distance(b).unwrap();
                assert!(dt <= d0 * (1.0 + 1e-9), "pair {pair}: {dt} > {d0}");
            }
        }
    }

    #[test]
    fn l1_contraction_for_unordered_pairs() {
        let grid = RadialGrid::uniform(8.0, 2000).unwrap();
        let a = RadialInitialCondition::GaussianBump { center: 1.0, width: 0.5, mass: 1.0 }
            .profile(&grid)
            .unwrap();
        let b = RadialInitialCondition::GaussianBump { center: 3.0, width: 0.8, mass: 1.0 }
            .profile(&grid)
            .unwrap();
        let ta = solve_radial_exact(&RadialInitialCondition::Tabulated(a.clone()), &grid, &[1.0])
            .unwrap();
        let tb = solve_radial_exact(&RadialInitialCondition::Tabulated(b.clone()), &grid, &[1.0])
            .unwrap();
        let d0 = a.l1_distance(&b).unwrap();
        let d1 = ta.snapshots()[0].l1_distance(&tb.snapshots()[0]).unwrap();
        assert!(d1 < d0, "no strict contraction: {d1} vs {d0}");
    }

    #[test]
    fn dirac_decay_rate_is_two() {
        // the radial pipeline carries no dipole mode, so the measured L¹
        // decay rate towards equilibrium is e^{-2t}; the a-priori envelope
        // K e^{-t} holds with room to spare
        let grid = RadialGrid::uniform(8.0, 40_000).unwrap();
        let times: Vec<f64> = (0..11).map(|i| 1.0 + 0.5 * i as f64).collect();
        let history: Vec<(f64, f64)> = times
            .iter()
            .map(|&t| (t, fundamental_distance_to_equilibrium(t, &grid).unwrap()))
            .collect();
        let fit = fit_decay_rate(&history).unwrap();
        assert!(
            fit.slope > -2.1 && fit.slope < -1.9,
            "measured slope {}",
            fit.slope
        );
        assert!(fit.r_squared > 0.999, "r² {}", fit.r_squared);
        // envelope from the L¹ theory
        let d0 = fundamental_distance_to_equilibrium(1e-3, &grid).unwrap();
        for &(t, d) in &history {
            assert!(d <= d0 * (-t).exp(), "t={t}: {d} vs envelope {}", d0 * (-t).exp());
        }
    }

    #[test]
    fn decay_history_vanishes_for_stationary_start() {
        let grid = RadialGrid::uniform(8.0, 4000).unwrap();
        let traj = solve_radial_exact(
            &RadialInitialCondition::Equilibrium { beta: 2.0 },
            &grid,
            &[0.5, 1.0],
        )
        .unwrap();
        for (_, d) in decay_history(&traj, 2.0).unwrap() {
            assert!(d < 1e-4, "distance {d}");
        }
    }

    #[test]
    fn equal_mass_data_converge_to_the_same_equilibrium() {
        let grid = RadialGrid::uniform(8.0, 3000).unwrap();
        let mass = 1.0;
        let beta = crate::equilibria::beta_from_mass(mass).unwrap();
        let ic_a = RadialInitialCondition::GaussianBump { center: 0.7, width: 0.4, mass };
        let ic_b = RadialInitialCondition::GaussianBump { center: 2.5, width: 0.6, mass };
        for ic in [ic_a, ic_b] {
            let traj = solve_radial_exact(&ic, &grid, &[6.0]).unwrap();
            let d = decay_history(&traj, beta).unwrap()[0].1;
            assert!(d < 2e-4, "distance at t=6: {d}");
        }
    }

    #[test]
    fn tail_norms_stay_bounded_when_horizon_doubles() {
        let grid = RadialGrid::uniform(8.0, 2000).unwrap();
        let ic = RadialInitialCondition::GaussianBump { center: 1.0, width: 0.5, mass: 2.0 };
        let short: Vec<f64> = (0..8).map(|i| 1.0 + i as f64).collect();
        let long: Vec<f64> = (0..16).map(|i| 1.0 + i as f64).collect();
        let sup_short =
            tail_weighted_bound(&solve_radial_exact(&ic, &grid, &short).unwrap(), 1.0, 3.0).unwrap();
        let sup_long =
            tail_weighted_bound(&solve_radial_exact(&ic, &grid, &long).unwrap(), 1.0, 3.0).unwrap();
        assert!(sup_short.is_finite() && sup_long.is_finite());
        // the sup saturates at the equilibrium norms; doubling the horizon
        // moves it by O(e^{-16}) plus quadrature noise
        assert!(
            (sup_long - sup_short).abs() <= 1e-6 * sup_short.max(1.0),
            "{sup_short} vs {sup_long}"
        );
    }

    #[test]
    fn trajectory_csv_round_trip_shape() {
        let dir = tempfile::tempdir().unwrap();
        let grid = RadialGrid::uniform(4.0, 64).unwrap();
        let traj = solve_radial_exact(
            &RadialInitialCondition::GaussianBump { center: 1.0, width: 0.5, mass: 0.5 },
            &grid,
            &[0.5, 1.0],
        )
        .unwrap();
        let tpath = dir.path().join("traj.csv");
        let dpath = dir.path().join("diag.csv");
        traj.write_csv(&tpath).unwrap();
        traj.write_diagnostics_csv(&dpath).unwrap();
        let tlines = std::fs::read_to_string(&tpath).unwrap().lines().count();
        assert_eq!(tlines, 1 + 2 * 65);
        let dtext = std::fs::read_to_string(&dpath).unwrap();
        assert!(dtext.starts_with("t,mass,entropy,l1_to_eq,sup"));
        assert_eq!(dtext.lines().count(), 3);
    }
}
