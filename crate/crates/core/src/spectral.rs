//! Discrete Fourier transforms, Fourier multipliers and spectral
//! differential operators.
//!
//! Convention: the forward transform is unnormalized and the inverse carries
//! the full 1/N^dim factor, so applying a multiplier is
//! `inverse(m(xi) * forward(f))` with no extra bookkeeping.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;

/// Symbol of a Fourier multiplier: the full wavenumber vector in, one
/// complex factor out.
pub type Symbol = Box<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// A Fourier multiplier m(xi) with a name for reports and error messages.
pub struct MultiplierSpec {
    name: String,
    symbol: Symbol,
}

impl MultiplierSpec {
    pub fn new(
        name: impl Into<String>,
        symbol: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> MultiplierSpec {
        MultiplierSpec {
            name: name.into(),
            symbol: Box::new(symbol),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, xi: &[f64]) -> Complex64 {
        (self.symbol)(xi)
    }
}

/// Unnormalized forward transform of the field values.
pub fn forward(field: &Field) -> Vec<Complex64> {
    let mut spec = field.values().to_vec();
    transform_in_place(field.grid(), &mut spec, Direction::Forward);
    spec
}

/// Inverse transform (includes the 1/N^dim normalization).
pub fn inverse(grid: &std::sync::Arc<Grid>, mut spectrum: Vec<Complex64>) -> Field {
    transform_in_place(grid, &mut spectrum, Direction::Inverse);
    let norm = 1.0 / grid.num_points() as f64;
    for v in spectrum.iter_mut() {
        *v *= norm;
    }
    Field::from_values(grid, spectrum).expect("spectrum length matches lattice")
}

enum Direction {
    Forward,
    Inverse,
}

/// Apply the 1D FFT along every axis of the row-major hypercube.
fn transform_in_place(grid: &Grid, values: &mut [Complex64], dir: Direction) {
    let n = grid.points_per_axis();
    let dim = grid.dim();
    let fft = match dir {
        Direction::Forward => grid.fft_forward().clone(),
        Direction::Inverse => grid.fft_inverse().clone(),
    };
    let mut line = vec![Complex64::ZERO; n];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            for chunk in values.chunks_exact_mut(n) {
                fft.process(chunk);
            }
        } else {
            let blocks = n.pow(axis as u32);
            for block in 0..blocks {
                let block_base = block * n * stride;
                for inner in 0..stride {
                    let base = block_base + inner;
                    for (j, slot) in line.iter_mut().enumerate() {
                        *slot = values[base + j * stride];
                    }
                    fft.process(&mut line);
                    for (j, slot) in line.iter().enumerate() {
                        values[base + j * stride] = *slot;
                    }
                }
            }
        }
    }
}

/// Apply a multiplier given as a closure over the full wavenumber vector.
/// Returns a numeric error naming the offending xi if the symbol is not
/// finite anywhere on the lattice.
pub fn apply_symbol(
    field: &Field,
    name: &str,
    symbol: impl Fn(&[f64]) -> Complex64,
) -> Result<Field> {
    let grid = field.grid();
    let mut spec = forward(field);
    let mut bad: Option<Vec<f64>> = None;
    grid.for_each_mode(|flat, xi| {
        if bad.is_some() {
            return;
        }
        let m = symbol(xi);
        if !(m.re.is_finite() && m.im.is_finite()) {
            bad = Some(xi.to_vec());
            return;
        }
        spec[flat] *= m;
    });
    if let Some(xi) = bad {
        return Err(Error::Numeric(format!(
            "multiplier '{name}' is not finite at xi = {xi:?}"
        )));
    }
    Ok(inverse(grid, spec))
}

pub fn apply_multiplier(field: &Field, m: &MultiplierSpec) -> Result<Field> {
    apply_symbol(field, m.name(), |xi| m.eval(xi))
}

/// Spectral gradient: one field per axis, multiplier i*xi_j with the
/// Nyquist mode zeroed.
pub fn gradient(field: &Field) -> Vec<Field> {
    let grid = field.grid();
    let spec = forward(field);
    let mut out = Vec::with_capacity(grid.dim());
    for axis in 0..grid.dim() {
        let mut s = spec.clone();
        grid.for_each_deriv_mode(|flat, xi| {
            s[flat] *= Complex64::new(0.0, xi[axis]);
        });
        out.push(inverse(grid, s));
    }
    out
}

/// Spectral Laplacian, multiplier -|xi|^2 on the derivative table.
pub fn laplacian(field: &Field) -> Field {
    let grid = field.grid();
    let mut spec = forward(field);
    grid.for_each_deriv_mode(|flat, xi| {
        let k2: f64 = xi.iter().map(|x| x * x).sum();
        spec[flat] *= -k2;
    });
    inverse(grid, spec)
}
