use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lgn_core::corpus::{random_closed_diagram, random_diagram};
use lgn_core::holonomy::{
    check_boundary_relations, check_kauffman_in_context, eval_diagram, stack, wilson_loop, Atom, DiagramIR,
};
use lgn_core::lgn::is_invariant;
use lgn_core::{Mode, Surface};

const STATED: [(u32, u32); 3] = [(0, 1), (1, 0), (1, 1)];

fn surface(k: usize) -> Surface {
    let (g, n) = STATED[k];
    Surface::new(g, n).unwrap()
}

/// A slice of identities with `atom` (two inputs) starting at strand `i`.
fn at(width: usize, i: usize, atom: Atom) -> Vec<Atom> {
    let mut row = vec![Atom::Id; i];
    row.push(atom);
    row.extend(std::iter::repeat_n(Atom::Id, width - i - 2));
    row
}

fn with_slices(d: &DiagramIR, rows: &[Vec<Atom>]) -> DiagramIR {
    let mut out = d.clone();
    for r in rows {
        out.push_slice(r.clone());
    }
    out
}

/// A random stated diagram whose top has at least `min_width` legs.
fn wide_diagram(rng: &mut ChaCha8Rng, s: Surface, min_width: usize) -> (DiagramIR, usize) {
    loop {
        let d = random_diagram(rng, s, 3, 2);
        let w = d.validate().unwrap();
        if w >= min_width {
            return (d, w);
        }
    }
}

fn same(d1: &DiagramIR, d2: &DiagramIR) -> bool {
    eval_diagram(d1, Mode::Generic).unwrap() == eval_diagram(d2, Mode::Generic).unwrap()
}

fn cross(rng: &mut ChaCha8Rng) -> (Atom, Atom) {
    if rng.gen_bool(0.5) {
        (Atom::CrossPos, Atom::CrossNeg)
    } else {
        (Atom::CrossNeg, Atom::CrossPos)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn reidemeister_two(seed in any::<u64>(), k in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (d, w) = wide_diagram(&mut rng, surface(k), 2);
        let i = rng.gen_range(0..w - 1);
        let (x, y) = cross(&mut rng);
        prop_assert!(same(&d, &with_slices(&d, &[at(w, i, x), at(w, i, y)])));
    }

    #[test]
    fn reidemeister_three(seed in any::<u64>(), k in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (d, w) = wide_diagram(&mut rng, surface(k), 3);
        let i = rng.gen_range(0..w - 2);
        let (x, _) = cross(&mut rng);
        let l = at(w, i, x.clone());
        let r = at(w, i + 1, x);
        prop_assert!(same(
            &with_slices(&d, &[l.clone(), r.clone(), l.clone()]),
            &with_slices(&d, &[r.clone(), l, r]),
        ));
    }

    #[test]
    fn zigzag_straightens(seed in any::<u64>(), k in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (d, w) = wide_diagram(&mut rng, surface(k), 1);
        let i = rng.gen_range(0..w);
        let mut up = vec![Atom::Id; w];
        up.insert(i + 1, Atom::Cup);
        let down = at(w + 2, i, Atom::Cap);
        prop_assert!(same(&d, &with_slices(&d, &[up, down])));
    }

    #[test]
    fn far_apart_slices_commute(seed in any::<u64>(), k in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (d, w) = wide_diagram(&mut rng, surface(k), 4);
        let i = rng.gen_range(0..w - 3);
        let j = rng.gen_range(i + 2..w - 1);
        let (x, y) = cross(&mut rng);
        let lower = at(w, i, x.clone());
        let upper = at(w, j, y.clone());
        let mut both = vec![Atom::Id; i];
        both.push(x);
        both.extend(std::iter::repeat_n(Atom::Id, j - i - 2));
        both.push(y);
        both.extend(std::iter::repeat_n(Atom::Id, w - j - 2));
        let one = with_slices(&d, &[lower.clone(), upper.clone()]);
        prop_assert!(same(&one, &with_slices(&d, &[upper, lower])));
        prop_assert!(same(&one, &with_slices(&d, &[both])));
    }

    #[test]
    fn stacking_is_multiplicative(seed in any::<u64>(), k in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = surface(k);
        let d1 = random_diagram(&mut rng, s, 2, 3);
        let d2 = random_diagram(&mut rng, s, 2, 3);
        let lhs = eval_diagram(&stack(&d1, &d2).unwrap(), Mode::Generic).unwrap();
        let rhs = eval_diagram(&d1, Mode::Generic).unwrap().odot(&eval_diagram(&d2, Mode::Generic).unwrap()).unwrap();
        prop_assert!(lhs == rhs);
    }

    #[test]
    fn boundary_and_kauffman_relations_hold_in_context(seed in any::<u64>(), k in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (d, w) = wide_diagram(&mut rng, surface(k), 2);
        let i = rng.gen_range(0..w - 1);
        prop_assert!(check_boundary_relations(&d, i, Mode::Generic).unwrap());
        let (x, _) = cross(&mut rng);
        let dk = with_slices(&d, &[at(w, i, x)]);
        prop_assert!(check_kauffman_in_context(&dk, dk.slices.len() - 1, i, Mode::Generic).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn wilson_loops_are_invariant(seed in any::<u64>(), closed_surface in prop::bool::ANY) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = if closed_surface { Surface::new(1, 0).unwrap() } else { Surface::new(0, 2).unwrap() };
        let l = random_closed_diagram(&mut rng, s, 2, 3);
        prop_assert!(is_invariant(&wilson_loop(&l, Mode::Generic).unwrap()).unwrap());
    }
}
