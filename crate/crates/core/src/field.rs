//! Cell-averaged densities on a uniform square grid.
//!
//! The domain is the square `[-L, L]²` split into `n × n` cells of side
//! `h = 2L/n`; values are stored row-major with `x` varying over `i` and `y`
//! over `j`. Serialisation: a flat `(i, j, x, y, value)` CSV and a binary
//! dump with a 32-byte header (8-byte magic, little-endian u64 `n`,
//! f64 `L`, f64 `time`) followed by the `n²` cell values as little-endian
//! f64, for fast reload.

use crate::error::{Error, Result};
use std::io::{Read as _, Write as _};
use std::path::Path;
use std::sync::Arc;

const MAGIC: &[u8; 8] = b"BEFP2D\0\0";

#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    half_width: f64,
    n: usize,
}

impl Grid2D {
    pub fn new(half_width: f64, n: usize) -> Result<Arc<Self>> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidField(format!(
                "half-width must be positive, got {half_width}"
            )));
        }
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidField(format!(
                "cells per side must be even and at least 4, got {n}"
            )));
        }
        Ok(Arc::new(Grid2D { half_width, n }))
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Centre of cell `(i, j)`.
    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        let h = self.spacing();
        (
            -self.half_width + (i as f64 + 0.5) * h,
            -self.half_width + (j as f64 + 0.5) * h,
        )
    }
}

/// Cell averages of a non-negative density on a [`Grid2D`].
#[derive(Debug, Clone)]
pub struct Field2D {
    grid: Arc<Grid2D>,
    values: Vec<f64>,
}

impl Field2D {
    pub fn new(grid: Arc<Grid2D>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() * grid.n() {
            return Err(Error::InvalidField(format!(
                "{} values for a {0}x{0} grid",
                grid.n()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidField(format!(
                "cell {bad} holds {} (must be finite and >= 0)",
                values[bad]
            )));
        }
        Ok(Field2D { grid, values })
    }

    pub fn zero(grid: Arc<Grid2D>) -> Self {
        let n2 = grid.n() * grid.n();
        Field2D { grid, values: vec![0.0; n2] }
    }

    /// Sample a density at cell centres.
    pub fn from_fn(grid: Arc<Grid2D>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let n = grid.n();
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let (x, y) = grid.center(i, j);
                values.push(f(x, y));
            }
        }
        Field2D::new(grid, values)
    }

    pub(crate) fn from_raw(grid: Arc<Grid2D>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n() * grid.n());
        Field2D { grid, values }
    }

    pub fn grid(&self) -> &Arc<Grid2D> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n() + j]
    }

    /// Midpoint-rule mass `h² Σ f_ij`.
    pub fn mass(&self) -> f64 {
        let h = self.grid.spacing();
        h * h * self.values.iter().sum::<f64>()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn l1_distance(&self, other: &Self) -> Result<f64> {
        if self.grid.as_ref() != other.grid.as_ref() {
            return Err(Error::GridMismatch);
        }
        let h = self.grid.spacing();
        Ok(h * h
            * self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>())
    }

    /// L¹ distance to a radial density evaluated at cell centres.
    pub fn l1_distance_to_radial(&self, f: impl Fn(f64) -> f64) -> f64 {
        let n = self.grid.n();
        let h = self.grid.spacing();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let (x, y) = self.grid.center(i, j);
                acc += (self.at(i, j) - f((x * x + y * y).sqrt())).abs();
            }
        }
        h * h * acc
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "i,j,x,y,value")?;
        let n = self.grid.n();
        for i in 0..n {
            for j in 0..n {
                let (x, y) = self.grid.center(i, j);
                writeln!(out, "{},{},{:.17e},{:.17e},{:.17e}", i, j, x, y, self.at(i, j))?;
            }
        }
        Ok(())
    }

    /// Binary dump: 32-byte header then row-major values, all little-endian.
    pub fn write_binary(&self, path: impl AsRef<Path>, time: f64) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        out.write_all(MAGIC)?;
        out.write_all(&(self.grid.n() as u64).to_le_bytes())?;
        out.write_all(&self.grid.half_width().to_le_bytes())?;
        out.write_all(&time.to_le_bytes())?;
        for v in &self.values {
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reload a binary dump; returns the field and the stored time stamp.
    pub fn read_binary(path: impl AsRef<Path>) -> Result<(Self, f64)> {
        let path = path.as_ref();
        let err = |message: String| Error::Parse {
            path: path.display().to_string(),
            message,
        };
        let mut file = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut header = [0u8; 32];
        file.read_exact(&mut header)
            .map_err(|e| err(format!("truncated header: {e}")))?;
        if &header[0..8] != MAGIC {
            return Err(err("bad magic".into()));
        }
        let n = u64::from_le_bytes(header[8..16].try_into().unwrap()) as usize;
        let half_width = f64::from_le_bytes(header[16..24].try_into().unwrap());
        let time = f64::from_le_bytes(header[24..32].try_into().unwrap());
        let grid = Grid2D::new(half_width, n)?;
        let mut buf = vec![0u8; n * n * 8];
        file.read_exact(&mut buf)
            .map_err(|e| err(format!("truncated payload: {e}")))?;
        let values: Vec<f64> = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok((Field2D::new(grid, values)?, time))
    }
}
