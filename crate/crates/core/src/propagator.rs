//! The free Schrödinger group e^{it Laplacian}, the Duhamel source
//! integral, and empirical space-time (dispersive) estimate probes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::GridSummary;
use crate::norms::{is_admissible, l2_norm, mixed_norm, AdmissiblePair, SpatialNorm};
use crate::rng::{seeded_random_field, SpectrumKind};
use crate::spectral::{forward, inverse};

/// Evolve under i u_t = -Laplacian u for time t: the Fourier multiplier
/// exp(-i |xi|^2 t), exactly unitary mode by mode.
pub fn free_evolve(field: &Field, t: f64) -> Field {
    let grid = field.grid();
    let mut spec = forward(field);
    grid.for_each_mode(|flat, xi| {
        let k2: f64 = xi.iter().map(|x| x * x).sum();
        let phase = -k2 * t;
        spec[flat] *= num_complex::Complex64::new(phase.cos(), phase.sin());
    });
    inverse(grid, spec)
}

/// Trapezoid approximation of -i * integral_0^t e^{i(t-s) Laplacian} F(s) ds
/// over uniformly sampled sources F(s), s in {0, dt, ..., t}. Quadrature
/// error is O(dt^2) for smooth integrands.
pub fn duhamel_integral(times: &[f64], sources: &[Field], t: f64) -> Result<Field> {
    if sources.len() < 2 {
        return Err(Error::Domain(format!(
            "duhamel integral needs at least 2 source samples, got {}",
            sources.len()
        )));
    }
    if times.len() != sources.len() {
        return Err(Error::Domain(format!(
            "got {} sample times for {} sources",
            times.len(),
            sources.len()
        )));
    }
    let dt = times[1] - times[0];
    if !(dt > 0.0) {
        return Err(Error::Domain(format!(
            "sample spacing must be positive, got {dt}"
        )));
    }
    for w in times.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt {
            return Err(Error::Domain(format!(
                "non-uniform sample spacing: {} vs {}",
                w[1] - w[0],
                dt
            )));
        }
    }
    if (times[0]).abs() > 1e-12 || (times[times.len() - 1] - t).abs() > 1e-9 * dt.max(t.abs()) {
        return Err(Error::Domain(format!(
            "sample times must run from 0 to t = {t}, got [{}, {}]",
            times[0],
            times[times.len() - 1]
        )));
    }
    for s in sources.iter().skip(1) {
        sources[0].check_same_lattice(s)?;
    }

    let grid = sources[0].grid();
    let mut acc = Field::zeros(grid);
    let last = sources.len() - 1;
    for (j, (source, &s)) in sources.iter().zip(times).enumerate() {
        let weight = if j == 0 || j == last { 0.5 * dt } else { dt };
        let evolved = free_evolve(source, t - s);
        acc.axpy(num_complex::Complex64::new(weight, 0.0), &evolved)?;
    }
    // the -i prefactor of the integral term
    Ok(acc.scale(num_complex::Complex64::new(0.0, -1.0)))
}

/// Report of an empirical dispersive-estimate probe.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StrichartzReport {
    pub pair: AdmissiblePair,
    pub t: f64,
    pub steps: usize,
    pub num_fields: usize,
    pub spectrum: SpectrumKind,
    pub seed: u64,
    /// Mean of the per-field norm ratios.
    pub ratio: f64,
    /// Largest per-field ratio encountered.
    pub max_ratio: f64,
    pub grid: GridSummary,
}

/// Sample `num_fields` seeded random initial data, evolve each freely over
/// [0, t] with `steps` uniform samples, and measure
/// ||e^{it Lap} f||_{L^p_T L^q} / ||f||_{L^2}. The estimate itself is a
/// theorem on the continuum; what a lattice probe can check is homogeneity
/// and boundedness of the empirical constant, which this reports.
pub fn strichartz_ratio(
    grid: &std::sync::Arc<crate::grid::Grid>,
    seed: u64,
    pair: &AdmissiblePair,
    t: f64,
    steps: usize,
    num_fields: usize,
    spectrum: SpectrumKind,
) -> Result<StrichartzReport> {
    if !is_admissible(pair.p, pair.q, pair.dim) {
        return Err(Error::Domain(format!(
            "({}, {}) is not admissible in dimension {}",
            pair.p, pair.q, pair.dim
        )));
    }
    if pair.dim != grid.dim() {
        return Err(Error::Domain(format!(
            "pair declared for dimension {} but grid has dimension {}",
            pair.dim,
            grid.dim()
        )));
    }
    if steps == 0 || num_fields == 0 || !(t > 0.0) {
        return Err(Error::Domain(
            "need t > 0, steps >= 1 and num_fields >= 1".into(),
        ));
    }
    let dt = t / steps as f64;
    let mut max_ratio = 0.0f64;
    let mut sum = 0.0f64;
    for field_idx in 0..num_fields {
        let f = seeded_random_field(grid, seed.wrapping_add(field_idx as u64), spectrum);
        let denom = l2_norm(&f);
        let series: Vec<Field> = (0..steps).map(|j| free_evolve(&f, j as f64 * dt)).collect();
        let num = mixed_norm(&series, pair.p, SpatialNorm::Lp(pair.q), dt)?;
        let ratio = num / denom;
        max_ratio = max_ratio.max(ratio);
        sum += ratio;
    }
    Ok(StrichartzReport {
        pair: *pair,
        t,
        steps,
        num_fields,
        spectrum,
        seed,
        ratio: sum / num_fields as f64,
        max_ratio,
        grid: grid.summary(),
    })
}
