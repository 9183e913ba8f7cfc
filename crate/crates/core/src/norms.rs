//! Lattice Lebesgue, Sobolev and mixed space-time norms, plus the
//! admissible-pair arithmetic used by the dispersive diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::spectral::gradient;

/// Lattice L^p norm: (sum |v|^p * cell_volume)^(1/p); p = inf is the max.
///
/// Requires p >= 1 (caller obligation).
pub fn lp_norm(field: &Field, p: f64) -> f64 {
    assert!(p >= 1.0, "lp_norm requires p >= 1, got {p}");
    if p.is_infinite() {
        return field.values().iter().map(|c| c.norm()).fold(0.0, f64::max);
    }
    let vol = field.grid().cell_volume();
    if p == 2.0 {
        let s: f64 = field.values().iter().map(|c| c.norm_sqr()).sum();
        return (s * vol).sqrt();
    }
    let s: f64 = field
        .values()
        .iter()
        .map(|c| c.norm_sqr().powf(p / 2.0))
        .sum();
    (s * vol).powf(1.0 / p)
}

pub fn l2_norm(field: &Field) -> f64 {
    lp_norm(field, 2.0)
}

/// H^1 norm: (||f||_2^2 + ||grad f||_2^2)^(1/2).
pub fn h1_norm(field: &Field) -> f64 {
    let mut s = l2_norm(field).powi(2);
    for g in gradient(field) {
        s += l2_norm(&g).powi(2);
    }
    s.sqrt()
}

/// W^{1,q} norm: ||f||_q + || |grad f| ||_q, with the pointwise Euclidean
/// magnitude of the gradient vector.
pub fn w1q_norm(field: &Field, q: f64) -> f64 {
    assert!(q >= 1.0, "w1q_norm requires q >= 1, got {q}");
    let grads = gradient(field);
    let grid = field.grid();
    let vol = grid.cell_volume();
    let grad_norm = if q.is_infinite() {
        (0..grid.num_points())
            .map(|i| {
                grads
                    .iter()
                    .map(|g| g.values()[i].norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    } else {
        let s: f64 = (0..grid.num_points())
            .map(|i| {
                grads
                    .iter()
                    .map(|g| g.values()[i].norm_sqr())
                    .sum::<f64>()
                    .powf(q / 2.0)
            })
            .sum();
        (s * vol).powf(1.0 / q)
    };
    lp_norm(field, q) + grad_norm
}

/// Which spatial norm a mixed space-time norm applies per sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpatialNorm {
    Lp(f64),
    H1,
    W1q(f64),
}

pub fn spatial_norm(field: &Field, kind: SpatialNorm) -> f64 {
    match kind {
        SpatialNorm::Lp(p) => lp_norm(field, p),
        SpatialNorm::H1 => h1_norm(field),
        SpatialNorm::W1q(q) => w1q_norm(field, q),
    }
}

/// Mixed space-time norm over a uniformly sampled series. Each entry stands
/// for one time step of width `dt` (rectangle rule), so K entries represent
/// the interval [0, K*dt]. `p_t` = inf takes the max over entries.
pub fn mixed_norm(series: &[Field], p_t: f64, spatial: SpatialNorm, dt: f64) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::Domain("mixed norm of an empty series".into()));
    }
    if !(dt > 0.0) {
        return Err(Error::Domain(format!(
            "mixed norm requires dt > 0, got {dt}"
        )));
    }
    let vals = series.iter().map(|f| spatial_norm(f, spatial));
    if p_t.is_infinite() {
        Ok(vals.fold(0.0, f64::max))
    } else {
        assert!(p_t >= 1.0, "mixed_norm requires p_t >= 1, got {p_t}");
        let s: f64 = vals.map(|v| v.powf(p_t)).sum();
        Ok((s * dt).powf(1.0 / p_t))
    }
}

/// A Strichartz-admissible exponent pair: 2/p + n/q = n/2, p >= 2,
/// (p, q) != (2, inf).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissiblePair {
    pub p: f64,
    pub q: f64,
    pub dim: usize,
}

/// Scaling identity 2/p + n/q = n/2 to within 1e-12, with the endpoint
/// exclusion.
pub fn is_admissible(p: f64, q: f64, n: usize) -> bool {
    if !(p >= 2.0) || q < 1.0 {
        return false;
    }
    if p == 2.0 && q.is_infinite() {
        return false;
    }
    let lhs = 2.0 / p + n as f64 / q;
    (lhs - n as f64 / 2.0).abs() <= 1e-12
}

impl AdmissiblePair {
    pub fn new(p: f64, q: f64, dim: usize) -> Result<AdmissiblePair> {
        if !is_admissible(p, q, dim) {
            return Err(Error::Domain(format!(
                "({p}, {q}) is not an admissible pair in dimension {dim}"
            )));
        }
        Ok(AdmissiblePair { p, q, dim })
    }

    /// The pair used by the contraction space: (6/n, 6) for n = 2, 3 and
    /// (2, 4) for n = 4. In one dimension the trivial endpoint (inf, 2) is
    /// returned; there is no dispersive gain to encode on the line, so the
    /// mixed norm degenerates to sup-in-time of L^2.
    pub fn for_dimension(n: usize) -> Result<AdmissiblePair> {
        match n {
            1 => AdmissiblePair::new(f64::INFINITY, 2.0, 1),
            2 | 3 => AdmissiblePair::new(6.0 / n as f64, 6.0, n),
            4 => AdmissiblePair::new(2.0, 4.0, 4),
            _ => Err(Error::Domain(format!(
                "no canonical admissible pair for dimension {n}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::grid::Grid;
    use num_complex::Complex64;

    #[test]
    fn constant_field_l2_is_box_volume_sqrt() {
        let l = 3.0;
        let grid = Grid::new(1, 32, l).unwrap();
        let f = Field::constant(&grid, Complex64::new(1.0, 0.0));
        assert!((lp_norm(&f, 2.0) - (2.0 * l).sqrt()).abs() < 1e-12);
        assert!((lp_norm(&f, f64::INFINITY) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn h1_of_plane_wave() {
        // ||e^{ikx}||_{H1} = sqrt((1+|k|^2) (2L)^n)
        let l = 2.0;
        let grid = Grid::new(2, 16, l).unwrap();
        let f = Field::single_mode(&grid, &[2, -1]);
        let k2 = (std::f64::consts::PI * 2.0 / l).powi(2) + (std::f64::consts::PI / l).powi(2);
        let expected = ((1.0 + k2) * (2.0 * l).powi(2)).sqrt();
        assert!((h1_norm(&f) - expected).abs() < 1e-10 * expected);
    }

    #[test]
    fn parseval_l2_matches_spectrum() {
        let grid = Grid::new(2, 16, 1.5).unwrap();
        let f = Field::from_fn(&grid, |x| Complex64::new((2.0 * x[0]).sin(), x[1]));
        let spec = crate::spectral::forward(&f);
        // ||f||_2^2 = cell_volume/N^n * sum |fhat|^2 with the unnormalized
        // forward transform
        let sum: f64 = spec.iter().map(|c| c.norm_sqr()).sum();
        let by_spec = (sum * grid.cell_volume() / grid.num_points() as f64).sqrt();
        let direct = l2_norm(&f);
        assert!((by_spec - direct).abs() < 1e-12 * direct.max(1.0));
    }

    #[test]
    fn mixed_norm_examples() {
        let grid = Grid::new(1, 16, 1.0).unwrap();
        let f = Field::constant(&grid, Complex64::new(2.0, 0.0));
        let space = l2_norm(&f);
        // constant-in-time, p_t = inf: the spatial norm
        let series = vec![f.clone(), f.clone(), f.clone(), f.clone()];
        let v = mixed_norm(&series, f64::INFINITY, SpatialNorm::Lp(2.0), 0.25).unwrap();
        assert!((v - space).abs() < 1e-14);
        // constant-in-time over [0,T]: T^{1/p} * spatial norm (K entries of
        // width dt represent T = K*dt exactly)
        let t: f64 = 1.0;
        let p = 3.0;
        let v = mixed_norm(&series, p, SpatialNorm::Lp(2.0), t / 4.0).unwrap();
        assert!((v - t.powf(1.0 / p) * space).abs() < 1e-12);
        // single-step series
        let v = mixed_norm(&series[..1], p, SpatialNorm::Lp(2.0), 0.1).unwrap();
        assert!((v - 0.1f64.powf(1.0 / p) * space).abs() < 1e-12);
        // empty series is a domain error
        assert!(mixed_norm(&[], p, SpatialNorm::Lp(2.0), 0.1).is_err());
    }

    #[test]
    fn paper_pairs_by_dimension() {
        let p2 = AdmissiblePair::for_dimension(2).unwrap();
        assert_eq!((p2.p, p2.q), (3.0, 6.0));
        let p3 = AdmissiblePair::for_dimension(3).unwrap();
        assert_eq!((p3.p, p3.q), (2.0, 6.0));
        let p4 = AdmissiblePair::for_dimension(4).unwrap();
        assert_eq!((p4.p, p4.q), (2.0, 4.0));
        let p1 = AdmissiblePair::for_dimension(1).unwrap();
        assert!(p1.p.is_infinite() && p1.q == 2.0);
    }

    #[test]
    fn admissibility_edge_cases() {
        assert!(!is_admissible(2.0, f64::INFINITY, 2));
        assert!(is_admissible(4.0, 4.0, 2));
        assert!(is_admissible(f64::INFINITY, 2.0, 3));
        assert!(!is_admissible(1.5, 12.0, 2)); // p < 2
        assert!(!is_admissible(3.0, 5.0, 2)); // scaling identity fails
    }
}
