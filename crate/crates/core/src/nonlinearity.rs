//! Defocusing nonlinearities f(r), their potentials V(r), and grid-based
//! certifiers for the growth hypotheses the theory places on f.
//!
//! All supported nonlinearities are polynomials in the density r = |u|^2,
//! so f', f'' and V are exact closed forms (antidifferentiation of the
//! coefficient vector). The certifiers sample log-spaced density grids and
//! report fitted constants; they certify samples, they do not prove.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense polynomial with ascending coefficients, evaluated by Horner.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Poly {
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::new(vec![0.0]);
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Poly {
        let mut out = vec![0.0];
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c / (k + 1) as f64),
        );
        Poly::new(out)
    }
}

/// Tag for the built-in nonlinearity families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonlinearityKind {
    GrossPitaevskii,
    CubicQuintic,
    UserPolynomial,
}

/// A defocusing nonlinearity: f, its first two derivatives and the
/// potential V(r) = integral of f from r to rho0, all exact polynomials.
#[derive(Debug, Clone)]
pub struct Nonlinearity {
    kind: NonlinearityKind,
    rho0: f64,
    f: Poly,
    fprime: Poly,
    fsecond: Poly,
    v: Poly,
    alpha1_hint: Option<f64>,
}

impl Nonlinearity {
    fn from_poly(
        kind: NonlinearityKind,
        rho0: f64,
        f: Poly,
        alpha1_hint: Option<f64>,
    ) -> Result<Nonlinearity> {
        if !(rho0 > 0.0) || !rho0.is_finite() {
            return Err(Error::Domain(format!(
                "background intensity rho0 must be positive, got {rho0}"
            )));
        }
        let fprime = f.derivative();
        let fsecond = fprime.derivative();
        // V(r) = A(rho0) - A(r) where A is the antiderivative of f, so
        // V(rho0) = 0 exactly up to one rounded subtraction.
        let anti = f.antiderivative();
        let mut v_coeffs: Vec<f64> = anti.coeffs().iter().map(|&c| -c).collect();
        v_coeffs[0] = anti.eval(rho0);
        let v = Poly::new(v_coeffs);
        Ok(Nonlinearity {
            kind,
            rho0,
            f,
            fprime,
            fsecond,
            v,
            alpha1_hint,
        })
    }

    /// f(r) = rho0 - r. The classic repulsive-condensate nonlinearity is
    /// the case rho0 = 1; the generalization keeps f(rho0) = 0 for any
    /// background intensity. V(r) = (rho0 - r)^2 / 2.
    pub fn gross_pitaevskii(rho0: f64) -> Result<Nonlinearity> {
        Nonlinearity::from_poly(
            NonlinearityKind::GrossPitaevskii,
            rho0,
            Poly::new(vec![rho0, -1.0]),
            Some(2.0),
        )
    }

    /// f(r) = (r - rho0)(2a + rho0 - 3r) with 0 < a < rho0. The upper bound
    /// on a keeps f'(rho0) = 2(a - rho0) negative (defocusing).
    pub fn cubic_quintic(rho0: f64, a: f64) -> Result<Nonlinearity> {
        if !(rho0 > 0.0) {
            return Err(Error::Domain(format!("rho0 must be positive, got {rho0}")));
        }
        if !(a > 0.0 && a < rho0) {
            return Err(Error::Domain(format!(
                "cubic-quintic parameter must satisfy 0 < a < rho0, got a = {a}, rho0 = {rho0}"
            )));
        }
        // (r - rho0)(2a + rho0 - 3r) expanded in ascending powers
        let c0 = -rho0 * (2.0 * a + rho0);
        let c1 = 2.0 * a + 4.0 * rho0;
        let c2 = -3.0;
        Nonlinearity::from_poly(
            NonlinearityKind::CubicQuintic,
            rho0,
            Poly::new(vec![c0, c1, c2]),
            Some(3.0),
        )
    }

    /// Arbitrary polynomial f in the density, ascending coefficients.
    /// No defocusing validation happens here; run the certifiers to find
    /// out what the candidate satisfies.
    pub fn polynomial(
        rho0: f64,
        coeffs: Vec<f64>,
        alpha1_hint: Option<f64>,
    ) -> Result<Nonlinearity> {
        if coeffs.is_empty() {
            return Err(Error::Domain(
                "polynomial needs at least one coefficient".into(),
            ));
        }
        Nonlinearity::from_poly(
            NonlinearityKind::UserPolynomial,
            rho0,
            Poly::new(coeffs),
            alpha1_hint,
        )
    }

    pub fn kind(&self) -> NonlinearityKind {
        self.kind
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    pub fn alpha1_hint(&self) -> Option<f64> {
        self.alpha1_hint
    }

    pub fn eval_f(&self, r: f64) -> f64 {
        self.f.eval(r)
    }

    pub fn eval_fprime(&self, r: f64) -> f64 {
        self.fprime.eval(r)
    }

    pub fn eval_fsecond(&self, r: f64) -> f64 {
        self.fsecond.eval(r)
    }

    pub fn eval_v(&self, r: f64) -> f64 {
        self.v.eval(r)
    }
}

/// Which hypothesis a report certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hypothesis {
    /// f(rho0) = 0 and f'(rho0) < 0.
    Hf,
    /// |f''| (resp. |f'''|) bounded by C0 r^{alpha1-3} (resp. r^{alpha1-4}).
    Halpha1,
    /// |f^(k)(r)| <= C0 r^{alpha1-1-k} for k = 1, 2 and r >= 1.
    Halpha1prime,
    /// V bounded below (alpha1 <= 3/2) or r^{alpha2} <= C0 V(r) beyond A.
    Halpha2,
    /// sqrt(r) |f^(k)(r)| <= C (1 + r^{max(0, alpha1-(2k+1)/2)}) for r >= 0.
    Ff01,
}

/// Outcome of one grid certification, with the fitted constants.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub hypothesis: Hypothesis,
    pub passed: bool,
    /// Minimal constant certifying the sampled grid (0 when irrelevant).
    pub fitted_c0: f64,
    /// Growth exponent the check ran at, when one applies.
    pub alpha1: Option<f64>,
    pub alpha2: Option<f64>,
    /// Density threshold beyond which the lower bound holds.
    pub a_threshold: Option<f64>,
    pub samples: usize,
    /// Signed margin; passing reports never exceed 0.
    pub max_violation: f64,
}

/// Grid-stability gate: the fit over the top decade of the sample grid may
/// not exceed the fit over everything below it by more than this factor,
/// otherwise the fitted constant is still growing with r_max.
const STABILITY_FACTOR: f64 = 1.05;

fn log_grid(lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    assert!(samples >= 2 && hi > lo && lo > 0.0);
    let ratio = (hi / lo).ln();
    (0..samples)
        .map(|i| lo * (ratio * i as f64 / (samples - 1) as f64).exp())
        .collect()
}

/// Maxima over the top decade [hi/10, hi] and the decade before it.
/// A fit that keeps growing with r lands its maximum in the top decade and
/// exceeds the previous one; a stable fit does not. When the grid is too
/// short to hold two decades, everything below the top decade is used; with
/// less than one decade no growth can be detected and the split degenerates
/// to (max, max).
fn decade_split(grid: &[f64], ratios: &[f64], hi: f64) -> (f64, f64) {
    let cut = hi / 10.0;
    let prev_cut = hi / 100.0;
    let mut top = f64::NEG_INFINITY;
    let mut prev = f64::NEG_INFINITY;
    let mut below = f64::NEG_INFINITY;
    for (&r, &v) in grid.iter().zip(ratios) {
        if r >= cut {
            top = top.max(v);
        } else {
            below = below.max(v);
            if r >= prev_cut {
                prev = prev.max(v);
            }
        }
    }
    if prev.is_finite() || below.is_finite() {
        (
            top,
            if prev > f64::NEG_INFINITY {
                prev
            } else {
                below
            },
        )
    } else {
        (top, top)
    }
}

/// Signed stability margin: negative when the top-decade fit does not
/// exceed the previous decade's by more than the stability factor.
fn stability_violation(top: f64, prev: f64) -> f64 {
    if top == 0.0 {
        return -1.0;
    }
    if !top.is_finite() {
        return f64::INFINITY;
    }
    top / (STABILITY_FACTOR * prev) - 1.0
}

/// Defocusing check: |f(rho0)| <= tol * (1 + |f'(rho0)|) and f'(rho0) < 0.
pub fn check_hf(nl: &Nonlinearity, tol: f64) -> Result<HypothesisReport> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let f0 = nl.eval_f(nl.rho0());
    let fp0 = nl.eval_fprime(nl.rho0());
    let zero_violation = f0.abs() - tol * (1.0 + fp0.abs());
    let passed = zero_violation <= 0.0 && fp0 < 0.0;
    Ok(HypothesisReport {
        hypothesis: Hypothesis::Hf,
        passed,
        fitted_c0: 0.0,
        alpha1: None,
        alpha2: None,
        a_threshold: None,
        samples: 1,
        max_violation: zero_violation.max(fp0),
    })
}

/// Certify |f^(k)(r)| <= C0 r^{alpha1-1-k} (k = 1, 2) on a log-spaced grid
/// over [1, r_max]. The fitted constant is the grid maximum of
/// |f^(k)(r)| r^{k+1-alpha1}; the check passes when that maximum is finite
/// and not still growing at the right edge of the grid.
pub fn check_halpha1prime(
    nl: &Nonlinearity,
    alpha1: f64,
    r_max: f64,
    samples: usize,
) -> Result<HypothesisReport> {
    if !(alpha1 >= 1.0) {
        return Err(Error::Domain(format!("alpha1 must be >= 1, got {alpha1}")));
    }
    if !(r_max > 1.0) || samples < 2 {
        return Err(Error::Domain(format!(
            "need r_max > 1 and samples >= 2, got r_max = {r_max}, samples = {samples}"
        )));
    }
    let grid = log_grid(1.0, r_max, samples);
    let ratios: Vec<f64> = grid
        .iter()
        .map(|&r| {
            let k1 = nl.eval_fprime(r).abs() * r.powf(2.0 - alpha1);
            let k2 = nl.eval_fsecond(r).abs() * r.powf(3.0 - alpha1);
            k1.max(k2)
        })
        .collect();
    let fitted_c0 = ratios.iter().cloned().fold(0.0, f64::max);
    let (top, prev) = decade_split(&grid, &ratios, r_max);
    let violation = stability_violation(top, prev);
    let passed = fitted_c0.is_finite() && violation <= 0.0;
    Ok(HypothesisReport {
        hypothesis: Hypothesis::Halpha1prime,
        passed,
        fitted_c0,
        alpha1: Some(alpha1),
        alpha2: None,
        a_threshold: None,
        samples,
        max_violation: violation,
    })
}

/// Certify the potential-growth hypothesis. For alpha1 <= 3/2 the claim is
/// that V is bounded from below; on a sample grid the honest analog is that
/// the running infimum is not still falling in the top decade. For larger
/// alpha1 the claim is r^{alpha2} <= C0 V(r) for all r >= A with some
/// A > rho0; the certifier fits C0 on the top decade (with the stability
/// margin) and reports the smallest grid threshold A past which every
/// sample obeys the fitted bound.
pub fn check_halpha2(
    nl: &Nonlinearity,
    alpha1: f64,
    alpha2: f64,
    r_max: f64,
    samples: usize,
) -> Result<HypothesisReport> {
    if alpha1 - alpha2 > 0.5 {
        return Err(Error::Domain(format!(
            "compatibility requires alpha1 - alpha2 <= 1/2, got alpha1 = {alpha1}, alpha2 = {alpha2}"
        )));
    }
    if !(r_max > nl.rho0().max(1.0)) || samples < 4 {
        return Err(Error::Domain(format!(
            "need r_max beyond rho0 and >= 4 samples, got r_max = {r_max}, samples = {samples}"
        )));
    }

    if alpha1 <= 1.5 {
        // V bounded below: the infimum over the grid must not be attained
        // only at the right edge (which would signal V -> -inf).
        let grid = log_grid(1e-6_f64.min(nl.rho0() * 1e-3), r_max, samples);
        let vals: Vec<f64> = grid.iter().map(|&r| nl.eval_v(r)).collect();
        let cut = r_max / 10.0;
        let inf_all = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let inf_lower = grid
            .iter()
            .zip(&vals)
            .filter(|(&r, _)| r < cut)
            .map(|(_, &v)| v)
            .fold(f64::INFINITY, f64::min);
        let scale = vals
            .iter()
            .cloned()
            .fold(0.0f64, |a, b| a.max(b.abs()))
            .max(1.0);
        let violation = (inf_lower - inf_all) / scale - 1e-12;
        let passed = inf_all.is_finite() && violation <= 0.0;
        return Ok(HypothesisReport {
            hypothesis: Hypothesis::Halpha2,
            passed,
            fitted_c0: 0.0,
            alpha1: Some(alpha1),
            alpha2: Some(alpha2),
            a_threshold: None,
            samples,
            max_violation: violation,
        });
    }

    // Lower-bound branch: sample r^{alpha2} / V(r) beyond the background
    // intensity. Points where V <= 0 cannot satisfy the bound and simply
    // exclude their prefix from the admissible thresholds.
    let lo = nl.rho0() * 1.1;
    let grid = log_grid(lo, r_max, samples);
    let ratios: Vec<f64> = grid
        .iter()
        .map(|&r| {
            let v = nl.eval_v(r);
            if v > 0.0 {
                r.powf(alpha2) / v
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let (top, prev) = decade_split(&grid, &ratios, r_max);
    let violation = stability_violation(top, prev);
    let fitted_c0 = STABILITY_FACTOR * top;
    // smallest grid point past which every sample obeys the fitted constant
    let mut a_threshold = None;
    for (i, &r) in grid.iter().enumerate() {
        if ratios[i..].iter().all(|&rt| rt <= fitted_c0) {
            a_threshold = Some(r);
            break;
        }
    }
    let passed = fitted_c0.is_finite()
        && violation <= 0.0
        && a_threshold.map(|a| a > nl.rho0()).unwrap_or(false);
    Ok(HypothesisReport {
        hypothesis: Hypothesis::Halpha2,
        passed,
        fitted_c0,
        alpha1: Some(alpha1),
        alpha2: Some(alpha2),
        a_threshold,
        samples,
        max_violation: violation,
    })
}

/// Certify sqrt(r) |f^(k)(r)| <= C (1 + r^{max(0, alpha1-(2k+1)/2)}) for
/// r >= 0 (sampled down to 1e-6 plus the origin itself, where the left side
/// vanishes for polynomial f).
pub fn check_ff01(nl: &Nonlinearity, alpha1: f64, samples: usize) -> Result<HypothesisReport> {
    if !(alpha1 >= 1.0) {
        return Err(Error::Domain(format!("alpha1 must be >= 1, got {alpha1}")));
    }
    if samples < 4 {
        return Err(Error::Domain(format!("need >= 4 samples, got {samples}")));
    }
    let r_max = 1e8;
    let mut grid = vec![0.0];
    grid.extend(log_grid(1e-6, r_max, samples - 1));
    let ratio_at = |r: f64| -> f64 {
        let mut worst = 0.0f64;
        for (k, deriv) in [nl.eval_fprime(r), nl.eval_fsecond(r)].iter().enumerate() {
            let expo = (alpha1 - (2.0 * (k as f64 + 1.0) + 1.0) / 2.0).max(0.0);
            let bound = 1.0 + r.powf(expo);
            worst = worst.max(r.sqrt() * deriv.abs() / bound);
        }
        worst
    };
    let ratios: Vec<f64> = grid.iter().map(|&r| ratio_at(r)).collect();
    let fitted_c0 = ratios.iter().cloned().fold(0.0, f64::max);
    let (top, prev) = decade_split(&grid, &ratios, r_max);
    let violation = stability_violation(top, prev);
    let passed = fitted_c0.is_finite() && violation <= 0.0;
    Ok(HypothesisReport {
        hypothesis: Hypothesis::Ff01,
        passed,
        fitted_c0,
        alpha1: Some(alpha1),
        alpha2: None,
        a_threshold: None,
        samples: grid.len(),
        max_violation: violation,
    })
}

/// Which simulated dimensions the growth exponent admits: dimension 2 has
/// no supplementary condition, 3 requires alpha1 < 3 and 4 requires
/// alpha1 < 2.
pub fn max_admissible_dimension(alpha1: f64) -> Result<Vec<usize>> {
    if !(alpha1 >= 1.0) {
        return Err(Error::Domain(format!("alpha1 must be >= 1, got {alpha1}")));
    }
    let mut dims = vec![2];
    if alpha1 < 3.0 {
        dims.push(3);
    }
    if alpha1 < 2.0 {
        dims.push(4);
    }
    dims.sort_unstable();
    Ok(dims)
}
