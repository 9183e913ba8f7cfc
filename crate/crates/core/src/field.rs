//! Complex-valued lattice functions.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, MAX_DIM};

/// A complex field sampled on a [`Grid`], stored row-major.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
}

impl Field {
    pub fn zeros(grid: &Arc<Grid>) -> Field {
        Field {
            grid: Arc::clone(grid),
            values: vec![Complex64::ZERO; grid.num_points()],
        }
    }

    pub fn constant(grid: &Arc<Grid>, value: Complex64) -> Field {
        Field {
            grid: Arc::clone(grid),
            values: vec![value; grid.num_points()],
        }
    }

    /// Sample a function of the physical coordinates.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(&[f64]) -> Complex64) -> Field {
        let mut values = Vec::with_capacity(grid.num_points());
        let mut x = [0.0f64; MAX_DIM];
        for flat in 0..grid.num_points() {
            grid.coords(flat, &mut x);
            values.push(f(&x[..grid.dim()]));
        }
        Field {
            grid: Arc::clone(grid),
            values,
        }
    }

    /// Build a field from raw values (row-major, length N^dim).
    pub fn from_values(grid: &Arc<Grid>, values: Vec<Complex64>) -> Result<Field> {
        if values.len() != grid.num_points() {
            return Err(Error::Domain(format!(
                "value count {} does not match lattice size {}",
                values.len(),
                grid.num_points()
            )));
        }
        Ok(Field {
            grid: Arc::clone(grid),
            values,
        })
    }

    /// The plane wave exp(i xi . x) with xi = pi*mode/L on the wavenumber
    /// lattice. Handy as an exact eigenfunction of every multiplier.
    pub fn single_mode(grid: &Arc<Grid>, mode: &[i64]) -> Field {
        assert_eq!(mode.len(), grid.dim(), "mode vector must match grid dim");
        let l = grid.half_length();
        let k: Vec<f64> = mode
            .iter()
            .map(|&m| std::f64::consts::PI * m as f64 / l)
            .collect();
        Field::from_fn(grid, |x| {
            let phase: f64 = k.iter().zip(x).map(|(ki, xi)| ki * xi).sum();
            Complex64::new(0.0, phase).exp()
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        Field {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&c| f(c)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same lattice.
    pub fn zip_map(
        &self,
        other: &Field,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Field> {
        self.check_same_lattice(other)?;
        Ok(Field {
            grid: Arc::clone(&self.grid),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: Complex64) -> Field {
        self.map(|c| c * factor)
    }

    /// self += factor * other, in place.
    pub fn axpy(&mut self, factor: Complex64, other: &Field) -> Result<()> {
        self.check_same_lattice(other)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += factor * b;
        }
        Ok(())
    }

    /// Maximum pointwise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Field) -> Result<f64> {
        self.check_same_lattice(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn check_same_lattice(&self, other: &Field) -> Result<()> {
        if !self.grid.same_lattice(&other.grid) {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid.summary(),
                other.grid.summary()
            )));
        }
        Ok(())
    }

    /// Bitwise equality of the sample values.
    pub fn bit_eq(&self, other: &Field) -> bool {
        self.grid.same_lattice(&other.grid)
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits())
    }
}
