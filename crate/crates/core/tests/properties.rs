//! Property-based checks of the spectral algebra, the norms, the free
//! propagator and the splitting bounds.

use num_complex::Complex64;
use proptest::prelude::*;

use gpfield_core::background::Background;
use gpfield_core::field::Field;
use gpfield_core::forcing::split_forcing;
use gpfield_core::grid::Grid;
use gpfield_core::nonlinearity::Nonlinearity;
use gpfield_core::norms::{h1_norm, l2_norm, lp_norm, w1q_norm};
use gpfield_core::propagator::free_evolve;
use gpfield_core::rng::{seeded_random_field, SpectrumKind};
use gpfield_core::spectral::{apply_multiplier, forward, gradient, MultiplierSpec};

fn test_grid(dim: usize) -> std::sync::Arc<Grid> {
    Grid::new(dim, 16, 4.0).unwrap()
}

fn sup(field: &Field) -> f64 {
    lp_norm(field, f64::INFINITY)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn multiplier_application_is_linear(
        seed1 in 0u64..1000,
        seed2 in 0u64..1000,
        a_re in -3.0f64..3.0,
        a_im in -3.0f64..3.0,
        b_re in -3.0f64..3.0,
        dim in 1usize..=2,
    ) {
        let grid = test_grid(dim);
        let f = seeded_random_field(&grid, seed1, SpectrumKind::Flat);
        let g = seeded_random_field(&grid, seed2.wrapping_add(5000), SpectrumKind::Flat);
        let alpha = Complex64::new(a_re, a_im);
        let beta = Complex64::new(b_re, 1.5);
        let m = MultiplierSpec::new("heat", |xi: &[f64]| {
            let k2: f64 = xi.iter().map(|x| x * x).sum();
            Complex64::new((-0.3 * k2).exp(), 0.1 * k2.sqrt())
        });
        let combo = f.scale(alpha).add(&g.scale(beta)).unwrap();
        let lhs = apply_multiplier(&combo, &m).unwrap();
        let rhs = apply_multiplier(&f, &m).unwrap().scale(alpha)
            .add(&apply_multiplier(&g, &m).unwrap().scale(beta)).unwrap();
        let scale = sup(&lhs).max(sup(&rhs)).max(1e-6);
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12 * scale.max(1.0) + 1e-12);
    }

    #[test]
    fn multiplier_composition_matches_product(seed in 0u64..1000, dim in 1usize..=2) {
        let grid = test_grid(dim);
        let f = seeded_random_field(&grid, seed, SpectrumKind::Flat);
        let m1 = MultiplierSpec::new("lowpass", |xi: &[f64]| {
            let k2: f64 = xi.iter().map(|x| x * x).sum();
            Complex64::new(1.0 / (1.0 + k2), 0.0)
        });
        let m2 = MultiplierSpec::new("phase", |xi: &[f64]| {
            let k2: f64 = xi.iter().map(|x| x * x).sum();
            Complex64::new(0.0, -k2).exp()
        });
        let m12 = MultiplierSpec::new("both", |xi: &[f64]| {
            let k2: f64 = xi.iter().map(|x| x * x).sum();
            Complex64::new(1.0 / (1.0 + k2), 0.0) * Complex64::new(0.0, -k2).exp()
        });
        let seq = apply_multiplier(&apply_multiplier(&f, &m1).unwrap(), &m2).unwrap();
        let fused = apply_multiplier(&f, &m12).unwrap();
        let scale = sup(&f);
        prop_assert!(seq.max_abs_diff(&fused).unwrap() <= 1e-12 * scale);
    }

    #[test]
    fn plancherel_identity_for_the_gradient(seed in 0u64..1000, dim in 1usize..=2) {
        // || grad f ||_2^2 against the spectral weight sum with the same
        // Nyquist-zeroed derivative table
        let grid = test_grid(dim);
        let f = seeded_random_field(&grid, seed, SpectrumKind::Flat);
        let physical: f64 = gradient(&f)
            .iter()
            .map(|g| l2_norm(g).powi(2))
            .sum();
        let spec = forward(&f);
        let mut weighted = 0.0;
        grid.for_each_deriv_mode(|flat, xi| {
            let k2: f64 = xi.iter().map(|x| x * x).sum();
            weighted += k2 * spec[flat].norm_sqr();
        });
        let spectral = weighted * grid.cell_volume() / grid.num_points() as f64;
        prop_assert!(
            (physical - spectral).abs() <= 1e-10 * physical.max(1.0),
            "physical {physical} vs spectral {spectral}"
        );
    }

    #[test]
    fn norms_are_homogeneous(seed in 0u64..1000, lambda in 0.05f64..20.0) {
        let grid = test_grid(1);
        let f = seeded_random_field(&grid, seed, SpectrumKind::Flat);
        let g = f.scale(Complex64::new(lambda, 0.0));
        for p in [1.0, 2.0, 4.0, 6.0, f64::INFINITY] {
            let a = lp_norm(&g, p);
            let b = lambda * lp_norm(&f, p);
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-12), "p = {p}: {a} vs {b}");
        }
        let a = h1_norm(&g);
        let b = lambda * h1_norm(&f);
        prop_assert!((a - b).abs() <= 1e-12 * b);
        let a = w1q_norm(&g, 6.0);
        let b = lambda * w1q_norm(&f, 6.0);
        prop_assert!((a - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn free_evolution_is_unitary_with_group_law(
        seed in 0u64..1000,
        t1 in -2.0f64..2.0,
        t2 in -2.0f64..2.0,
    ) {
        let grid = test_grid(2);
        let f = seeded_random_field(&grid, seed, SpectrumKind::Flat);
        let n0 = l2_norm(&f);
        let once = free_evolve(&f, t1);
        prop_assert!((l2_norm(&once) - n0).abs() <= 1e-12 * n0);
        let twice = free_evolve(&once, t2);
        let direct = free_evolve(&f, t1 + t2);
        prop_assert!(twice.max_abs_diff(&direct).unwrap() <= 1e-12 * sup(&f).max(1.0));
    }

    #[test]
    fn forcing_split_reconstructs_on_random_data(seed in 0u64..2000) {
        let grid = test_grid(2);
        let bg = Background::bump_modulated(&grid, 1.0, 0.25, 0.9).unwrap();
        let nl = Nonlinearity::gross_pitaevskii(1.0).unwrap();
        let w = seeded_random_field(&grid, seed, SpectrumKind::SobolevDecay);
        let split = split_forcing(&w, &bg, &nl).unwrap();
        let recon = split.f1.add(&split.f2).unwrap();
        prop_assert!(recon.max_abs_diff(&split.whole).unwrap() <= 1e-12 * sup(&split.whole).max(1.0));
    }
}

/// Fixture test: the linear-in-w split part is Lipschitz on the H^1 ball of
/// radius one. The constant below is the maximum measured over these exact
/// 400 seeded pairs on this lattice and background; the property asserted
/// is that no pair exceeds it by more than five percent.
#[test]
fn split_part_is_lipschitz_within_the_recorded_fixture() {
    const FIXTURE: f64 = 0.9821;
    let grid = Grid::new(2, 32, 5.0).unwrap();
    let bg = Background::bump_modulated(&grid, 1.0, 0.25, 1.2).unwrap();
    let nl = Nonlinearity::gross_pitaevskii(1.0).unwrap();
    let mut worst = 0.0f64;
    for seed in 0..400u64 {
        let w1 = seeded_random_field(&grid, 2 * seed, SpectrumKind::SobolevDecay);
        let w2 = seeded_random_field(&grid, 2 * seed + 1, SpectrumKind::SobolevDecay);
        let w1 = w1.scale(Complex64::new(1.0 / h1_norm(&w1).max(1.0), 0.0));
        let w2 = w2.scale(Complex64::new(1.0 / h1_norm(&w2).max(1.0), 0.0));
        let f1a = split_forcing(&w1, &bg, &nl).unwrap().f1;
        let f1b = split_forcing(&w2, &bg, &nl).unwrap().f1;
        let dw = h1_norm(&w1.sub(&w2).unwrap());
        if dw > 0.0 {
            worst = worst.max(l2_norm(&f1a.sub(&f1b).unwrap()) / dw);
        }
    }
    assert!(
        worst <= FIXTURE * 1.05,
        "lipschitz ratio {worst} exceeds fixture {FIXTURE} by more than 5%"
    );
}
