//! Radial grids and sampled radial profiles.
//!
//! A radially symmetric density `f(v)` on R² is stored through its
//! line density `φ(r) = r f(r)` sampled on a grid `0 = r_0 < … < r_N`,
//! together with an optional point mass at the origin. The atom holds
//! `f({0}) / 2π`, so a Dirac of total mass `m` has `atom = m / 2π` and zero
//! node values. The `kind` tag records which side of the Λ transform the
//! profile lives on: `Befp` for `φ = r f`, `Fp` for `ψ = r g`.

use crate::error::{Error, Result};
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Arc;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Strictly increasing radii `r_0 = 0 < r_1 < … < r_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
}

impl RadialGrid {
    pub fn new(nodes: Vec<f64>) -> Result<Arc<Self>> {
        if nodes.len() < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 nodes, got {}",
                nodes.len()
            )));
        }
        if nodes[0] != 0.0 {
            return Err(Error::InvalidGrid(format!(
                "first node must be 0, got {}",
                nodes[0]
            )));
        }
        for w in nodes.windows(2) {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::InvalidGrid(format!(
                    "nodes must be strictly increasing and finite ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        Ok(Arc::new(RadialGrid { nodes }))
    }

    /// Uniform grid with `n` intervals on `[0, r_max]`.
    pub fn uniform(r_max: f64, n: usize) -> Result<Arc<Self>> {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::InvalidGrid(format!("r_max must be positive, got {r_max}")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 intervals, got {n}")));
        }
        let nodes = (0..=n).map(|i| r_max * i as f64 / n as f64).collect();
        Ok(Arc::new(RadialGrid { nodes }))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    fn same_as(&self, other: &Self) -> bool {
        std::ptr::eq(self, other) || self.nodes == other.nodes
    }
}

/// Which side of the Λ transform a profile belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ProfileKind {
    /// Nonlinear side: values are `φ(r) = r f(r)`.
    Befp,
    /// Linear side: values are `ψ(r) = r g(r)`.
    Fp,
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileKind::Befp => write!(f, "befp"),
            ProfileKind::Fp => write!(f, "fp"),
        }
    }
}

/// Sampled radial line density plus an optional atom at the origin.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
    atom: f64,
    kind: ProfileKind,
}

impl RadialProfile {
    pub fn new(grid: Arc<RadialGrid>, kind: ProfileKind, values: Vec<f64>, atom: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidProfile(format!(
                "{} values for {} grid nodes",
                values.len(),
                grid.len()
            )));
        }
        if !(atom >= 0.0) || !atom.is_finite() {
            return Err(Error::InvalidProfile(format!("atom must be finite and >= 0, got {atom}")));
        }
        if let Some(bad) = values.iter().position(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidProfile(format!(
                "value at node {bad} is {} (must be finite and >= 0)",
                values[bad]
            )));
        }
        if values[0] != 0.0 && atom == 0.0 {
            return Err(Error::InvalidProfile(format!(
                "value at r = 0 must vanish for a bounded density, got {}",
                values[0]
            )));
        }
        Ok(RadialProfile { grid, values, atom, kind })
    }

    pub fn zero(grid: Arc<RadialGrid>, kind: ProfileKind) -> Self {
        let n = grid.len();
        RadialProfile { grid, values: vec![0.0; n], atom: 0.0, kind }
    }

    /// Pure point mass of total (2D) mass `mass` at the origin.
    pub fn dirac(grid: Arc<RadialGrid>, kind: ProfileKind, mass: f64) -> Result<Self> {
        if !(mass >= 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParameter {
                name: "mass",
                message: format!("must be finite and >= 0, got {mass}"),
            });
        }
        let n = grid.len();
        Ok(RadialProfile { grid, values: vec![0.0; n], atom: mass / TWO_PI, kind })
    }

    /// Sample a density `f(r)`; the stored values are `r f(r)`.
    pub fn from_density(grid: Arc<RadialGrid>, kind: ProfileKind, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values: Vec<f64> = grid.nodes().iter().map(|&r| r * f(r)).collect();
        RadialProfile::new(grid, kind, values, 0.0)
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn atom(&self) -> f64 {
        self.atom
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub(crate) fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_as(&other.grid)
    }

    pub(crate) fn require_kind(&self, expected: ProfileKind) -> Result<()> {
        if self.kind != expected {
            return Err(Error::KindMismatch { expected, got: self.kind });
        }
        Ok(())
    }

    /// Density values `f(r_i) = value_i / r_i`; the `r = 0` entry is the even
    /// quadratic extrapolation from the first two positive nodes.
    pub fn density(&self) -> Vec<f64> {
        let r = self.grid.nodes();
        let mut out = Vec::with_capacity(self.values.len());
        out.push(0.0);
        for i in 1..self.values.len() {
            out.push(self.values[i] / r[i]);
        }
        if out.len() >= 3 {
            let (r1, r2) = (r[1], r[2]);
            out[0] = (r2 * r2 * out[1] - r1 * r1 * out[2]) / (r2 * r2 - r1 * r1);
        }
        out
    }

    /// Total 2D mass `2π (atom + ∫ values dr)` by composite trapezoid.
    pub fn mass(&self) -> f64 {
        TWO_PI * (self.atom + trapezoid(self.grid.nodes(), &self.values))
    }

    /// `L¹(R²)` distance between the represented measures (atoms included).
    pub fn l1_distance(&self, other: &Self) -> Result<f64> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let diff: Vec<f64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .collect();
        Ok(TWO_PI * ((self.atom - other.atom).abs() + trapezoid(self.grid.nodes(), &diff)))
    }

    /// Sup of the density over the nodes (ignores the atom).
    pub fn sup_density(&self) -> f64 {
        self.density().into_iter().fold(0.0, f64::max)
    }

    /// Write as two-column CSV with an atom/kind header comment.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "# atom={:e} kind={}", self.atom, self.kind)?;
        writeln!(out, "r,value")?;
        for (r, v) in self.grid.nodes().iter().zip(&self.values) {
            writeln!(out, "{:.17e},{:.17e}", r, v)?;
        }
        Ok(())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let err = |message: String| Error::Parse {
            path: path.display().to_string(),
            message,
        };
        let file = std::fs::File::open(path)?;
        let mut lines = BufReader::new(file).lines();
        let header = lines
            .next()
            .ok_or_else(|| err("empty file".into()))??;
        let header = header
            .strip_prefix('#')
            .ok_or_else(|| err("missing `# atom=... kind=...` header".into()))?;
        let mut atom = None;
        let mut kind = None;
        for tok in header.split_whitespace() {
            if let Some(v) = tok.strip_prefix("atom=") {
                atom = Some(v.parse::<f64>().map_err(|e| err(format!("bad atom: {e}")))?);
            } else if let Some(v) = tok.strip_prefix("kind=") {
                kind = Some(match v {
                    "befp" => ProfileKind::Befp,
                    "fp" => ProfileKind::Fp,
                    other => return Err(err(format!("unknown kind `{other}`"))),
                });
            }
        }
        let atom = atom.ok_or_else(|| err("header lacks atom=".into()))?;
        let kind = kind.ok_or_else(|| err("header lacks kind=".into()))?;
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        for line in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line == "r,value" || line.starts_with('#') {
                continue;
            }
            let (r, v) = line
                .split_once(',')
                .ok_or_else(|| err(format!("expected `r,value`, got `{line}`")))?;
            nodes.push(r.trim().parse::<f64>().map_err(|e| err(format!("bad r: {e}")))?);
            values.push(v.trim().parse::<f64>().map_err(|e| err(format!("bad value: {e}")))?);
        }
        let grid = RadialGrid::new(nodes)?;
        RadialProfile::new(grid, kind, values, atom)
    }
}

/// Running integral of a profile, `value(r_i) = atom + ∫₀^{r_i} values dr`,
/// in units of mass / 2π.
#[derive(Debug, Clone)]
pub struct CumulativeProfile {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl CumulativeProfile {
    pub(crate) fn from_parts(grid: Arc<RadialGrid>, values: Vec<f64>) -> Self {
        CumulativeProfile { grid, values }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at `r_N`, i.e. total mass / 2π.
    pub fn total(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

/// Composite trapezoid `∫ y dx` on the given nodes.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = 0.0;
    for i in 1..x.len() {
        acc += 0.5 * (y[i - 1] + y[i]) * (x[i] - x[i - 1]);
    }
    acc
}

/// Running trapezoid sums starting from `start`.
pub fn running_trapezoid(x: &[f64], y: &[f64], start: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut acc = start;
    out.push(acc);
    for i in 1..x.len() {
        acc += 0.5 * (y[i - 1] + y[i]) * (x[i] - x[i - 1]);
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_shape() {
        let g = RadialGrid::uniform(8.0, 4000).unwrap();
        assert_eq!(g.len(), 4001);
        assert_eq!(g.nodes()[0], 0.0);
        assert_eq!(g.r_max(), 8.0);
    }

    #[test]
    fn grid_rejects_bad_nodes() {
        assert!(RadialGrid::new(vec![0.0, 1.0]).is_err());
        assert!(RadialGrid::new(vec![0.1, 0.2, 0.3]).is_err());
        assert!(RadialGrid::new(vec![0.0, 0.2, 0.2]).is_err());
        assert!(RadialGrid::uniform(-1.0, 10).is_err());
    }

    #[test]
    fn profile_rejects_negative_values() {
        let g = RadialGrid::uniform(1.0, 4).unwrap();
        assert!(RadialProfile::new(g.clone(), ProfileKind::Fp, vec![0.0, -1.0, 0.0, 0.0, 0.0], 0.0).is_err());
        assert!(RadialProfile::new(g.clone(), ProfileKind::Fp, vec![0.5, 0.0, 0.0, 0.0, 0.0], 0.0).is_err());
        assert!(RadialProfile::new(g, ProfileKind::Fp, vec![0.0; 5], -0.1).is_err());
    }

    #[test]
    fn gaussian_mass() {
        // f(r) = e^{-r²/2} / 2π has total mass 1.
        let g = RadialGrid::uniform(8.0, 4000).unwrap();
        let p = RadialProfile::from_density(g, ProfileKind::Fp, |r| (-r * r / 2.0).exp() / TWO_PI).unwrap();
        assert!((p.mass() - 1.0).abs() < 1e-6, "mass = {}", p.mass());
    }

    #[test]
    fn dirac_mass_is_atom_only() {
        let g = RadialGrid::uniform(8.0, 100).unwrap();
        let p = RadialProfile::dirac(g, ProfileKind::Befp, 1.5).unwrap();
        assert!((p.mass() - 1.5).abs() < 1e-14);
        assert_eq!(p.values().iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn density_extrapolates_origin() {
        let g = RadialGrid::uniform(2.0, 100).unwrap();
        // f(r) = 1 - r²/4 near the origin: density()[0] should recover f(0) = 1.
        let p = RadialProfile::from_density(g, ProfileKind::Befp, |r| 1.0 - r * r / 4.0).unwrap();
        let d = p.density();
        assert!((d[0] - 1.0).abs() < 1e-10, "extrapolated {}", d[0]);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("profile.csv");
        let g = RadialGrid::uniform(4.0, 64).unwrap();
        let p = RadialProfile::from_density(g, ProfileKind::Fp, |r| (-r * r / 2.0).exp()).unwrap();
        p.write_csv(&path).unwrap();
        let q = RadialProfile::read_csv(&path).unwrap();
        assert_eq!(q.kind(), ProfileKind::Fp);
        assert_eq!(q.atom(), p.atom());
        assert_eq!(q.values(), p.values());
        assert_eq!(q.grid().nodes(), p.grid().nodes());
    }
}
