use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lgn_core::coeff_ring::CycloScalar;
use lgn_core::corpus::{random_closed_diagram, random_diagram, random_element};
use lgn_core::holonomy::{generator_loop, wilson_loop};
use lgn_core::lgn::is_invariant;
use lgn_core::torus::{
    act_generator, act_word, chi_a_eigenvalue, chi_index, factor_specs, g_index, SLFVector, Sign, TorusGen,
};
use lgn_core::vacuum::{stack_act_check, vacuum_act, vacuum_embed, vacuum_project};
use lgn_core::{Family, LaurentScalar, LgnAlgebra, LgnElement, Mode, Surface};

fn surf(g: u32, n: u32) -> Surface {
    Surface::new(g, n).unwrap()
}

fn random_torus_word(rng: &mut ChaCha8Rng) -> Vec<TorusGen> {
    (0..rng.gen_range(0..8))
        .map(|_| if rng.gen_bool(0.5) { TorusGen::A } else { TorusGen::B })
        .collect()
}

fn random_combination(rng: &mut ChaCha8Rng, p: u32, basis: &[SLFVector]) -> SLFVector {
    basis.iter().fold(SLFVector::zero(p).unwrap(), |acc, v| {
        acc.add(&v.scale(&CycloScalar::from_int(p, rng.gen_range(-3..=3))))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn vacuum_action_is_a_right_module(seed in any::<u64>(), g in 1u32..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a0 = LgnAlgebra::get(surf(0, g), Mode::Generic).unwrap();
        let a1 = LgnAlgebra::get(surf(g, 0), Mode::Generic).unwrap();
        let x = random_element(&mut rng, &a0, 2, 3).unwrap();
        let y1 = random_element(&mut rng, &a1, 2, 2).unwrap();
        let y2 = random_element(&mut rng, &a1, 2, 2).unwrap();
        let lhs = vacuum_act(&vacuum_act(&x, &y1).unwrap(), &y2).unwrap();
        prop_assert_eq!(lhs, vacuum_act(&x, &y1.mul(&y2).unwrap()).unwrap());
        prop_assert_eq!(vacuum_act(&x, &LgnElement::one(&a1)).unwrap(), x.clone());
        // the B-embedding is a section of the projection
        prop_assert_eq!(vacuum_project(&vacuum_embed(&x).unwrap()).unwrap(), x);
    }

    #[test]
    fn geometric_stacking_matches_the_action(seed in any::<u64>(), g in 1u32..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_diagram(&mut rng, surf(0, g), 3, 3);
        let t = random_diagram(&mut rng, surf(g, 0), 3, 3);
        prop_assert!(stack_act_check(&s, &t, Mode::Generic).unwrap());
    }

    #[test]
    fn torus_submodules_are_stable(seed in any::<u64>(), p in 2u32..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let specs = factor_specs(p).unwrap();
        let word = random_torus_word(&mut rng);
        // J₁: χ⁺_s = χ⁻_{p−s} for s < p and no G-part; J₂: no G-part
        let v = act_word(&word, &random_combination(&mut rng, p, &specs[0].basis)).unwrap();
        for s in 1..p {
            prop_assert_eq!(&v.coords()[chi_index(Sign::Plus, s)], &v.coords()[chi_index(Sign::Minus, p - s)]);
            prop_assert!(v.coords()[g_index(p, s)].is_zero());
        }
        let mut j2 = specs[0].basis.clone();
        j2.extend(specs[1].basis.iter().cloned());
        let v = act_word(&word, &random_combination(&mut rng, p, &j2)).unwrap();
        for s in 1..p {
            prop_assert!(v.coords()[g_index(p, s)].is_zero());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn invariant_subspace_is_stable(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = wilson_loop(&random_closed_diagram(&mut rng, surf(0, 1), 2, 3), Mode::Generic).unwrap();
        let y = wilson_loop(&random_closed_diagram(&mut rng, surf(1, 0), 2, 3), Mode::Generic).unwrap();
        prop_assert!(is_invariant(&x).unwrap() && is_invariant(&y).unwrap());
        prop_assert!(is_invariant(&vacuum_act(&x, &y).unwrap()).unwrap());
    }
}

#[test]
fn a_acts_diagonally_on_characters() {
    for p in 2..=5 {
        for s in 1..=p {
            for alpha in [Sign::Plus, Sign::Minus] {
                let v = SLFVector::chi(p, alpha, s).unwrap();
                let ev = chi_a_eigenvalue(p, alpha, s);
                assert_eq!(act_generator(TorusGen::A, &v).unwrap(), v.scale(&ev));
                // −α(ε^{2s} + ε^{−2s}) = −α·2cos(πs/p)
                let sign = if alpha == Sign::Plus { 1.0 } else { -1.0 };
                let want = -sign * 2.0 * (std::f64::consts::PI * f64::from(s) / f64::from(p)).cos();
                let (re, im) = ev.to_complex();
                assert!((re - want).abs() < 1e-12 && im.abs() < 1e-12);
            }
        }
    }
}

#[test]
fn first_g_vector_is_killed_by_b_when_p_is_two() {
    let g1 = SLFVector::g(2, 1).unwrap();
    assert!(act_generator(TorusGen::B, &g1).unwrap().is_zero());
}

/// In the vacuum module of the torus, the Chebyshev polynomials `S_{s−1}` of
/// the boundary loop are eigenvectors of the a-loop with eigenvalue
/// `−q^{4s} − q^{−4s}`, while the b-loop multiplies by the boundary loop.
#[test]
fn chebyshev_vectors_diagonalise_the_a_loop() {
    for mode in [Mode::Generic, Mode::Restricted(3)] {
        let alg = LgnAlgebra::get(surf(0, 1), mode).unwrap();
        let z = wilson_loop(&generator_loop(surf(0, 1), Family::M, 1).unwrap(), mode).unwrap();
        let wa = wilson_loop(&generator_loop(surf(1, 0), Family::A, 1).unwrap(), mode).unwrap();
        let wb = wilson_loop(&generator_loop(surf(1, 0), Family::B, 1).unwrap(), mode).unwrap();
        let (mut prev, mut cur) = (LgnElement::zero(&alg), LgnElement::one(&alg));
        for s in 1..=4 {
            let ev = LaurentScalar::from_terms([(4 * s, -1), (-4 * s, -1)]);
            assert_eq!(vacuum_act(&cur, &wa).unwrap(), cur.scale_laurent(&ev), "{mode:?} s={s}");
            assert_eq!(vacuum_act(&cur, &wb).unwrap(), cur.mul(&z).unwrap(), "{mode:?} s={s}");
            let next = cur.mul(&z).unwrap().sub(&prev);
            prev = cur;
            cur = next;
        }
    }
}
