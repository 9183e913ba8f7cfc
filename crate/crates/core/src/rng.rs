//! Deterministic random fields from a counter-based generator.
//!
//! Every spectral coefficient is derived by hashing (seed, mode index), so
//! the field is independent of fill order and bitwise reproducible across
//! runs on the same platform.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::field::Field;
use crate::grid::Grid;
use crate::spectral::inverse;

/// Spectral envelope of the generated coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumKind {
    /// i.i.d. complex Gaussian coefficients on every mode.
    Flat,
    /// Coefficients damped by 1/(1 + |xi|^2): almost-surely H^1 data.
    SobolevDecay,
}

/// splitmix64 finalizer; a full-period counter hash.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Uniform in (0, 1]; never exactly zero so logarithms stay finite.
fn unit_open(bits: u64) -> f64 {
    ((bits >> 11) as f64 + 1.0) / (1u64 << 53) as f64
}

/// Standard complex Gaussian (unit total variance) keyed by (seed, index).
fn gaussian_at(seed: u64, index: u64) -> Complex64 {
    let key = splitmix64(seed ^ 0xa076_1d64_78bd_642f).wrapping_add(index);
    let u1 = unit_open(splitmix64(key));
    let u2 = unit_open(splitmix64(key ^ 0x94d0_49bb_1331_11eb));
    let radius = (-u1.ln()).sqrt(); // per-component sigma = 1/sqrt(2)
    let angle = 2.0 * std::f64::consts::PI * u2;
    Complex64::new(radius * angle.cos(), radius * angle.sin())
}

/// Deterministic random field: spectral coefficients are i.i.d. complex
/// Gaussians keyed by (seed, mode), optionally damped, then transformed to
/// physical space.
pub fn seeded_random_field(
    grid: &std::sync::Arc<Grid>,
    seed: u64,
    spectrum: SpectrumKind,
) -> Field {
    let mut coeffs = vec![Complex64::ZERO; grid.num_points()];
    grid.for_each_mode(|flat, xi| {
        let mut c = gaussian_at(seed, flat as u64);
        if let SpectrumKind::SobolevDecay = spectrum {
            let k2: f64 = xi.iter().map(|x| x * x).sum();
            c /= 1.0 + k2;
        }
        coeffs[flat] = c;
    });
    inverse(grid, coeffs)
}
