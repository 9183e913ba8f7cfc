//! The conserved Ginzburg–Landau energy
//!
//!   E(w) = int |grad(phi + w)|^2 dx + int V(|phi + w|^2) dx,
//!
//! drift tracking against the initial value, and the renormalized-mass
//! diagnostic int (|u|^2 - rho0) dx.

use serde::{Deserialize, Serialize};

use crate::background::Background;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::nonlinearity::Nonlinearity;
use crate::norms::{mixed_norm, AdmissiblePair, SpatialNorm};
use crate::solver::Trajectory;
use crate::spectral::gradient;

/// Denominator guard for relative drift on near-zero-energy states.
pub const DRIFT_FLOOR: f64 = 1e-10;

/// Lattice energy of the state u = phi + w: spectral gradient plus the
/// pointwise potential, both integrated with the cell volume.
pub fn energy(w: &Field, bg: &Background, nl: &Nonlinearity) -> Result<f64> {
    w.check_same_lattice(bg.phi())?;
    let u = bg.phi().add(w)?;
    let grads = gradient(&u);
    let mut total = 0.0;
    for g in &grads {
        total += g.values().iter().map(|c| c.norm_sqr()).sum::<f64>();
    }
    total += u
        .values()
        .iter()
        .map(|c| nl.eval_v(c.norm_sqr()))
        .sum::<f64>();
    Ok(total * w.grid().cell_volume())
}

/// int (|u|^2 - rho0) dx: zero for the pure background, conserved along
/// both sub-flows of the split scheme up to rounding.
pub fn renormalized_mass(u: &Field, rho0: f64) -> f64 {
    let sum: f64 = u.values().iter().map(|c| c.norm_sqr() - rho0).sum();
    sum * u.grid().cell_volume()
}

/// Energy/mass recomputation along a trajectory's snapshots, with the
/// relative drift against the initial value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyReport {
    pub e0: f64,
    /// Recomputed energy per snapshot (series[0] is e0 itself).
    pub series: Vec<f64>,
    pub times: Vec<f64>,
    /// max_t |E(t) - E(0)| / max(|E(0)|, floor).
    pub max_rel_drift: f64,
    pub floor: f64,
    pub mass_series: Vec<f64>,
}

/// Recompute energies and masses from the stored snapshots rather than
/// trusting the solver's bookkeeping; the conservation statement has to
/// survive an independent evaluation path.
pub fn drift_report(traj: &Trajectory, bg: &Background, nl: &Nonlinearity) -> Result<EnergyReport> {
    if traj.w_fields.is_empty() {
        return Err(Error::Domain("drift report of an empty trajectory".into()));
    }
    let mut series = Vec::with_capacity(traj.w_fields.len());
    let mut mass_series = Vec::with_capacity(traj.w_fields.len());
    for w in &traj.w_fields {
        series.push(energy(w, bg, nl)?);
        let u = bg.phi().add(w)?;
        mass_series.push(renormalized_mass(&u, bg.rho0()));
    }
    let e0 = series[0];
    let denom = e0.abs().max(DRIFT_FLOOR);
    let max_rel_drift = series
        .iter()
        .map(|e| (e - e0).abs() / denom)
        .fold(0.0, f64::max);
    Ok(EnergyReport {
        e0,
        series,
        times: traj.times.clone(),
        max_rel_drift,
        floor: DRIFT_FLOOR,
        mass_series,
    })
}

/// Relative drift of a per-step energy series against its first entry.
pub fn max_rel_drift(series: &[f64]) -> f64 {
    if series.is_empty() {
        return 0.0;
    }
    let e0 = series[0];
    let denom = e0.abs().max(DRIFT_FLOOR);
    series
        .iter()
        .map(|e| (e - e0).abs() / denom)
        .fold(0.0, f64::max)
}

/// The contraction-space norm surrogate over a trajectory's snapshots:
/// sup-in-time of H^1 plus the L^p-in-time W^{1,q} quadrature.
pub fn xt_norm(traj: &Trajectory, pair: &AdmissiblePair) -> Result<f64> {
    if pair.dim != traj.w_fields[0].grid().dim() {
        return Err(Error::Domain(format!(
            "pair is for dimension {}, trajectory lives in dimension {}",
            pair.dim,
            traj.w_fields[0].grid().dim()
        )));
    }
    let spacing = traj.snapshot_spacing();
    let sup_h1 = mixed_norm(&traj.w_fields, f64::INFINITY, SpatialNorm::H1, spacing)?;
    let lp_w1q = mixed_norm(&traj.w_fields, pair.p, SpatialNorm::W1q(pair.q), spacing)?;
    Ok(sup_h1 + lp_w1q)
}
