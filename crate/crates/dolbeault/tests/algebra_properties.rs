//! Structural properties of the graded form algebra: wedge commutativity,
//! contraction commutation and locality, exponential truncation and the
//! product formula, bidegree bookkeeping, and the generalized Cartan
//! identity suite on band-limited random data.

mod common;

use std::sync::Arc;

use common::shear_with_sup;
use dolbeault::beltrami::{
    cartan_residual, cartan_specialization_residual, conjugation_residual,
    conjugation_residual_integrable, contract, dbar_commutator_residual, exp_contraction,
    lie_bracket, lie_derivative_parts,
};
use dolbeault::hodge::{all_bidegrees, dolbeault, dolbeault_adjoint};
use dolbeault::sampling::{random_beltrami, random_form};
use dolbeault::{BeltramiField, DolbeaultKind, FormField, GradedForm, TorusGrid};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// α∧β = (−1)^{deg α · deg β} β∧α for every admissible bidegree pair.
    #[test]
    fn prop_wedge_is_graded_commutative(
        seed in 0u64..1u64 << 48,
        p1 in 0usize..=2, q1 in 0usize..=2,
        p2 in 0usize..=2, q2 in 0usize..=2,
    ) {
        prop_assume!(p1 + p2 <= 2 && q1 + q2 <= 2);
        let grid = TorusGrid::new(2, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alpha = random_form(&grid, p1, q1, 2, &mut rng);
        let beta = random_form(&grid, p2, q2, 2, &mut rng);
        let forward = alpha.wedge(&beta).unwrap();
        let backward = beta.wedge(&alpha).unwrap();
        let sign = if (p1 + q1) * (p2 + q2) % 2 == 0 { 1.0 } else { -1.0 };
        let gap = forward
            .sub(&backward.scale(Complex64::new(sign, 0.0)))
            .l2_norm();
        prop_assert!(gap < 1e-13, "bidegrees ({p1},{q1})∧({p2},{q2}): gap {gap:.3e}");
    }
}

#[test]
fn contractions_by_two_fields_commute() {
    let grid = TorusGrid::new(2, 8).unwrap();
    for (p, q) in [(2usize, 0usize), (2, 1), (1, 0), (1, 1)] {
        let mut rng = ChaCha8Rng::seed_from_u64(910 + (p * 3 + q) as u64);
        for _ in 0..5 {
            let phi = random_beltrami(&grid, 2, 0.8, &mut rng);
            let psi = random_beltrami(&grid, 2, 0.8, &mut rng);
            let sigma = random_form(&grid, p, q, 2, &mut rng);
            // i_φ i_ψ σ needs p ≥ 2 to be nonzero; at p = 1 both orders give
            // the zero form, which still must agree.
            let a = contract(&phi, &sigma)
                .and_then(|s| if s.bidegree().0 > 0 { contract(&psi, &s) } else { Ok(s.scale(Complex64::new(0.0, 0.0))) })
                .unwrap();
            let b = contract(&psi, &sigma)
                .and_then(|s| if s.bidegree().0 > 0 { contract(&phi, &s) } else { Ok(s.scale(Complex64::new(0.0, 0.0))) })
                .unwrap();
            let gap = if p >= 2 {
                a.sub(&b).l2_norm()
            } else {
                a.l2_norm() + b.l2_norm()
            };
            assert!(gap < 1e-13, "({p},{q}): commutator gap {gap:.3e}");
        }
    }
}

#[test]
fn exponential_truncates_after_the_holomorphic_degree() {
    let grid = TorusGrid::new(2, 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(920);
    let phi = random_beltrami(&grid, 2, 0.9, &mut rng);
    for (p, q) in [(1usize, 0usize), (2, 0), (1, 1)] {
        let sigma = random_form(&grid, p, q, 2, &mut rng);
        let mut chain = GradedForm::from_form(sigma);
        for _ in 0..=p {
            chain = chain.contract(&phi);
        }
        assert_eq!(chain.block_count(), 0, "i_φ^{} on ({p},{q})", p + 1);
    }
}

#[test]
fn operation_bidegrees_follow_the_degree_arithmetic() {
    let grid = TorusGrid::new(2, 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(930);
    let phi = random_beltrami(&grid, 2, 0.5, &mut rng);
    for (p, q) in all_bidegrees(2) {
        let sigma = random_form(&grid, p, q, 2, &mut rng);
        assert_eq!(
            dolbeault(&sigma, DolbeaultKind::Holomorphic).bidegree(),
            (p + 1, q)
        );
        assert_eq!(
            dolbeault(&sigma, DolbeaultKind::AntiHolomorphic).bidegree(),
            (p, q + 1)
        );
        assert_eq!(
            dolbeault_adjoint(&sigma, DolbeaultKind::Holomorphic).bidegree(),
            (p.saturating_sub(1), q)
        );
        assert_eq!(
            dolbeault_adjoint(&sigma, DolbeaultKind::AntiHolomorphic).bidegree(),
            (p, q.saturating_sub(1))
        );
        if p > 0 {
            assert_eq!(contract(&phi, &sigma).unwrap().bidegree(), (p - 1, q + 1));
        } else {
            assert!(contract(&phi, &sigma).is_err());
        }
        for (p2, q2) in all_bidegrees(2) {
            let tau = random_form(&grid, p2, q2, 1, &mut rng);
            let w = sigma.wedge(&tau).unwrap();
            assert_eq!(w.bidegree(), (p + p2, q + q2));
            if p + p2 > 2 || q + q2 > 2 {
                // Degrees beyond n carry no components: the product is the
                // mathematically correct zero.
                assert_eq!(w.component_count(), 0);
            }
        }
    }
}

#[test]
fn contraction_is_pointwise_local() {
    let grid = TorusGrid::new(2, 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(940);
    let phi = random_beltrami(&grid, 2, 0.7, &mut rng);
    let sigma = random_form(&grid, 2, 1, 2, &mut rng);
    let full = contract(&phi, &sigma).unwrap();
    let probe: [usize; 4] = [3, 5, 2, 7];

    // Freeze both fields at the probe point and contract the constants: the
    // result at any grid point must match the full contraction at the probe.
    let mut entries = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            entries.push(phi.component(i, 1 << j).to_physical().value_at(&probe));
        }
    }
    let phi_frozen = BeltramiField::constant_matrix(&grid, &entries).unwrap();
    let mut sigma_frozen = FormField::zeros(&grid, 2, 1);
    for (im, jm, coeff) in sigma.components() {
        let v = coeff.to_physical().value_at(&probe);
        sigma_frozen.set_component(im, jm, dolbeault::ScalarField::constant(&grid, v));
    }
    let frozen = contract(&phi_frozen, &sigma_frozen).unwrap();
    for (im, jm, coeff) in full.components() {
        let a = coeff.to_physical().value_at(&probe);
        let b = frozen.component(im, jm).to_physical().value_at(&probe);
        assert!((a - b).norm() < 1e-13, "component ({im:#b},{jm:#b})");
    }
}

#[test]
fn exponential_matches_the_product_expansion_on_the_volume_form() {
    // e^{i_φ}(dz¹∧dz²) = (dz¹ + φ(dz¹))∧(dz² + φ(dz²)) with
    // φ(dz^i) = Σ_j φ^i_ȷ̄ dz̄^j, expanded with the wedge in degree order.
    let grid = TorusGrid::new(2, 8).unwrap();
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(950 + seed);
        let phi = random_beltrami(&grid, 2, 0.9, &mut rng);
        let vol = FormField::holomorphic_volume(&grid);
        let graded = exp_contraction(&phi, &vol);

        let one_form = |i: usize| {
            let mut a = FormField::zeros(&grid, 0, 1);
            for j in 0..2 {
                a.set_component(0, 1 << j, phi.component(i, 1 << j).clone());
            }
            a
        };
        let dz = |i: usize| {
            let mut f = FormField::zeros(&grid, 1, 0);
            f.set_component(
                1 << i,
                0,
                dolbeault::ScalarField::constant(&grid, Complex64::new(1.0, 0.0)),
            );
            f
        };
        let (a1, a2) = (one_form(0), one_form(1));
        let mut expected = GradedForm::from_form(dz(0).wedge(&dz(1)).unwrap());
        expected.add_form(dz(0).wedge(&a2).unwrap());
        expected.add_form(a1.wedge(&dz(1)).unwrap());
        expected.add_form(a1.wedge(&a2).unwrap());

        let gap = graded.sub(&expected).l2_norm() / expected.l2_norm();
        assert!(gap < 1e-12, "seed {seed}: product-formula gap {gap:.3e}");
    }
}

#[test]
fn lie_derivative_parts_sum_to_the_full_anticommutator() {
    let grid = TorusGrid::new(2, 16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(960);
    let phi1 = random_beltrami(&grid, 1, 0.8, &mut rng);
    let phi2 = lie_bracket(&phi1, &random_beltrami(&grid, 1, 0.8, &mut rng)).unwrap();
    for (field, k) in [(&phi1, 1usize), (&phi2, 2)] {
        for (p, q) in [(2usize, 0usize), (1, 0), (1, 1)] {
            if q + k + 1 > 2 {
                continue;
            }
            let sigma = random_form(&grid, p, q, 2, &mut rng);
            let (l10, l01) = lie_derivative_parts(field, &sigma).unwrap();
            let mut parts = GradedForm::zero(&grid);
            parts.add_form(l10);
            parts.add_form(l01);

            let sign = Complex64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
            let d_i = GradedForm::from_form(contract(field, &sigma).unwrap()).d();
            let i_d = GradedForm::from_form(sigma).d().contract(field);
            let full = d_i.scale(sign).add(&i_d);

            let gap = parts.sub(&full).l2_norm();
            assert!(gap < 1e-12, "valence {k}, ({p},{q}): gap {gap:.3e}");
        }
    }
}

#[test]
fn cartan_identity_suite_holds_on_band_limited_data() {
    let grid = TorusGrid::new(2, 16).unwrap();
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(970 + seed);
        let phi = random_beltrami(&grid, 2, 0.8, &mut rng);
        let psi = random_beltrami(&grid, 2, 0.8, &mut rng);
        let sigma = random_form(&grid, 2, 0, 2, &mut rng);
        let tau = random_form(&grid, 1, 1, 2, &mut rng);

        // i_{[φ,ψ]} = L_φ ∘ i_ψ − i_ψ ∘ L_φ.
        for target in [&sigma, &tau] {
            let r = cartan_residual(&phi, &psi, target).unwrap();
            assert!(r < 1e-9, "seed {seed}: bracket Cartan residual {r:.3e}");
        }
        // The type-pure specialization with φ against itself.
        let r = cartan_specialization_residual(&phi, &sigma).unwrap();
        assert!(r < 1e-9, "seed {seed}: specialization residual {r:.3e}");

        // ∂̄ i_φ − i_φ ∂̄ = i_{∂̄φ}.
        for target in [&sigma, &tau] {
            let r = dbar_commutator_residual(&phi, target).unwrap();
            assert!(r < 1e-10, "seed {seed}: ∂̄-commutator residual {r:.3e}");
        }
    }
}

#[test]
fn conjugated_differential_matches_its_expansion() {
    let grid = TorusGrid::new(2, 16).unwrap();
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(980 + seed);
        // e^{±i_φ} squares φ against σ: band budget 4·1 + 2 < 8.
        let phi = random_beltrami(&grid, 1, 0.8, &mut rng);
        let sigma = random_form(&grid, 2, 0, 2, &mut rng);
        let r = conjugation_residual(&phi, &sigma).unwrap();
        assert!(r < 1e-9, "seed {seed}: conjugation residual {r:.3e}");
    }
}

#[test]
fn integrable_fields_collapse_the_conjugated_differential() {
    let grid = TorusGrid::new(2, 16).unwrap();
    for seed in 0..3u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(990 + seed);
        let (_, phi) = shear_with_sup(&grid, 1, 0.6, &mut rng);
        let sigma = random_form(&grid, 2, 0, 2, &mut rng);
        let full = conjugation_residual(&phi, &sigma).unwrap();
        let collapsed = conjugation_residual_integrable(&phi, &sigma).unwrap();
        assert!(full < 1e-9, "seed {seed}: full residual {full:.3e}");
        assert!(collapsed < 1e-9, "seed {seed}: collapsed residual {collapsed:.3e}");
        assert!((full - collapsed).abs() < 1e-9);
    }
}

#[test]
fn bracket_is_symmetric_and_vanishes_for_constants() {
    let grid: Arc<TorusGrid> = TorusGrid::new(2, 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let phi = random_beltrami(&grid, 2, 0.7, &mut rng);
    let psi = random_beltrami(&grid, 2, 0.7, &mut rng);
    let fw = lie_bracket(&phi, &psi).unwrap();
    let bw = lie_bracket(&psi, &phi).unwrap();
    assert!(fw.sub(&bw).l2_norm() < 1e-13);

    let entries: Vec<Complex64> = (0..4)
        .map(|k| Complex64::new(0.1 * (k + 1) as f64, -0.05 * k as f64))
        .collect();
    let c1 = BeltramiField::constant_matrix(&grid, &entries).unwrap();
    let c2 = BeltramiField::constant_matrix(&grid, &entries).unwrap();
    assert!(lie_bracket(&c1, &c2).unwrap().l2_norm() < 1e-14);
}
