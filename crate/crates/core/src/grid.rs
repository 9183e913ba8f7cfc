//! Periodic lattice in 1, 2 or 3 dimensions with precomputed wavenumber
//! tables and FFT plans.
//!
//! The domain is the box [-L, L)^n sampled with N points per axis, so the
//! grid spacing is 2L/N and the wavenumbers are xi_m = pi*m/L for integer
//! m in [-N/2, N/2). Two wavenumber tables are kept:
//!
//! * `xi` — the full table, used by unitary propagators and frequency
//!   cutoffs, where every mode must carry its true phase;
//! * `xi_deriv` — the same table with the unpaired Nyquist mode (m = -N/2)
//!   zeroed, used by the derivative operators so that differentiating a
//!   real field does not leak an asymmetric imaginary component.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

pub struct Grid {
    dim: usize,
    points_per_axis: usize,
    half_length: f64,
    xi: Vec<f64>,
    xi_deriv: Vec<f64>,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim)
            .field("points_per_axis", &self.points_per_axis)
            .field("half_length", &self.half_length)
            .finish()
    }
}

/// Plain-data description of a grid, for reports and artifact headers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub dim: usize,
    pub points_per_axis: usize,
    pub half_length: f64,
}

impl Grid {
    pub fn new(dim: usize, points_per_axis: usize, half_length: f64) -> Result<Arc<Grid>> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Domain(format!(
                "grid dimension must be 1, 2 or 3, got {dim}"
            )));
        }
        if points_per_axis < 2 || !points_per_axis.is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "points per axis must be even and >= 2, got {points_per_axis}"
            )));
        }
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(Error::Domain(format!(
                "half length must be positive and finite, got {half_length}"
            )));
        }

        let n = points_per_axis;
        let mut xi = vec![0.0; n];
        let mut xi_deriv = vec![0.0; n];
        for (i, slot) in xi.iter_mut().enumerate() {
            let m = if i < n / 2 {
                i as i64
            } else {
                i as i64 - n as i64
            };
            *slot = std::f64::consts::PI * m as f64 / half_length;
        }
        xi_deriv.copy_from_slice(&xi);
        xi_deriv[n / 2] = 0.0; // Nyquist

        let mut planner = FftPlanner::new();
        let fft_fwd = planner.plan_fft_forward(n);
        let fft_inv = planner.plan_fft_inverse(n);

        Ok(Arc::new(Grid {
            dim,
            points_per_axis,
            half_length,
            xi,
            xi_deriv,
            fft_fwd,
            fft_inv,
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    /// Total number of lattice points, N^dim.
    pub fn num_points(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    /// Volume of one lattice cell, (2L/N)^dim.
    pub fn cell_volume(&self) -> f64 {
        (2.0 * self.half_length / self.points_per_axis as f64).powi(self.dim as i32)
    }

    /// Grid spacing per axis.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.points_per_axis as f64
    }

    /// Full wavenumber table (one axis).
    pub fn wavenumbers(&self) -> &[f64] {
        &self.xi
    }

    /// Wavenumber table with the Nyquist mode zeroed (one axis).
    pub fn derivative_wavenumbers(&self) -> &[f64] {
        &self.xi_deriv
    }

    /// Largest resolved |xi| component (the Nyquist magnitude).
    pub fn max_wavenumber(&self) -> f64 {
        std::f64::consts::PI * (self.points_per_axis as f64 / 2.0) / self.half_length
    }

    pub(crate) fn fft_forward(&self) -> &Arc<dyn Fft<f64>> {
        &self.fft_fwd
    }

    pub(crate) fn fft_inverse(&self) -> &Arc<dyn Fft<f64>> {
        &self.fft_inv
    }

    /// Decompose a flat row-major index into per-axis indices.
    pub fn axis_indices(&self, flat: usize, out: &mut [usize; MAX_DIM]) {
        let n = self.points_per_axis;
        let mut rest = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = rest % n;
            rest /= n;
        }
    }

    /// Physical coordinates of a lattice point.
    pub fn coords(&self, flat: usize, out: &mut [f64; MAX_DIM]) {
        let mut idx = [0usize; MAX_DIM];
        self.axis_indices(flat, &mut idx);
        let dx = self.spacing();
        for axis in 0..self.dim {
            out[axis] = -self.half_length + idx[axis] as f64 * dx;
        }
    }

    /// Structural identity: two grids are interchangeable when the lattice
    /// geometry matches.
    pub fn same_lattice(&self, other: &Grid) -> bool {
        self.dim == other.dim
            && self.points_per_axis == other.points_per_axis
            && self.half_length == other.half_length
    }

    pub fn summary(&self) -> GridSummary {
        GridSummary {
            dim: self.dim,
            points_per_axis: self.points_per_axis,
            half_length: self.half_length,
        }
    }

    /// Visit every lattice point in flat order with its full wavenumber
    /// vector. `xi[0..dim]` is valid inside the callback.
    pub fn for_each_mode(&self, mut visit: impl FnMut(usize, &[f64])) {
        self.for_each_mode_tables(&self.xi, &mut visit)
    }

    /// Same traversal with the Nyquist-zeroed derivative table.
    pub fn for_each_deriv_mode(&self, mut visit: impl FnMut(usize, &[f64])) {
        self.for_each_mode_tables(&self.xi_deriv, &mut visit)
    }

    fn for_each_mode_tables(&self, table: &[f64], visit: &mut impl FnMut(usize, &[f64])) {
        let mut xi = [0.0f64; MAX_DIM];
        match self.dim {
            1 => {
                for (flat, &t) in table.iter().enumerate() {
                    xi[0] = t;
                    visit(flat, &xi[..1]);
                }
            }
            2 => {
                let mut flat = 0;
                for &t0 in table {
                    xi[0] = t0;
                    for &t1 in table {
                        xi[1] = t1;
                        visit(flat, &xi[..2]);
                        flat += 1;
                    }
                }
            }
            3 => {
                let mut flat = 0;
                for &t0 in table {
                    xi[0] = t0;
                    for &t1 in table {
                        xi[1] = t1;
                        for &t2 in table {
                            xi[2] = t2;
                            visit(flat, &xi[..3]);
                            flat += 1;
                        }
                    }
                }
            }
            _ => unreachable!("grid dimension validated at construction"),
        }
    }
}
