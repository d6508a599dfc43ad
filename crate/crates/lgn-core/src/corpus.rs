//! Seeded random inputs for property checks and verification suites.
//!
//! Everything is bounded so that evaluation stays cheap: few strands, short
//! words, small coefficients.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::coeff_ring::LaurentScalar;
use crate::holonomy::{Atom, DiagramIR, Routing};
use crate::lgn::{Family, GeneratorId, LgnAlgebra, LgnElement, LgnError, Surface};
use crate::tensor::State;

fn random_state<R: Rng>(rng: &mut R) -> State {
    if rng.gen_bool(0.5) {
        State::Plus
    } else {
        State::Minus
    }
}

/// Random strand counts with `1..=max_strands` strands in total.
pub fn random_handle_strands<R: Rng>(rng: &mut R, surface: Surface, max_strands: usize) -> Vec<usize> {
    let mut hs = vec![0; surface.n_slots()];
    let total = rng.gen_range(1..=max_strands.max(1));
    for _ in 0..total {
        let k = rng.gen_range(0..hs.len());
        hs[k] += 1;
    }
    hs
}

/// One random slice on `width` strands, keeping the width at most `max_width`.
pub fn random_slice<R: Rng>(rng: &mut R, width: usize, max_width: usize) -> Vec<Atom> {
    let mut row = Vec::new();
    let mut i = 0;
    let mut out = 0;
    while i < width {
        let remaining = width - i;
        let r: f64 = rng.gen();
        if remaining >= 2 && r < 0.35 {
            row.push(if rng.gen_bool(0.5) {
                Atom::CrossPos
            } else {
                Atom::CrossNeg
            });
            i += 2;
            out += 2;
        } else if remaining >= 2 && r < 0.45 && width > 2 {
            row.push(Atom::Cap);
            i += 2;
        } else {
            row.push(Atom::Id);
            i += 1;
            out += 1;
        }
        if out + 2 <= max_width && rng.gen_bool(0.08) {
            row.push(Atom::Cup);
            out += 2;
        }
    }
    if width == 0 && rng.gen_bool(0.5) {
        row.push(Atom::Cup);
    }
    row
}

/// A random stated diagram with canonical routing.
pub fn random_diagram<R: Rng>(rng: &mut R, surface: Surface, max_strands: usize, n_slices: usize) -> DiagramIR {
    let mut d = DiagramIR::empty(surface);
    d.handle_strands = random_handle_strands(rng, surface, max_strands);
    d.routing = Routing::Canonical;
    let mut width = d.bottom_width();
    let max_width = width + 2;
    for _ in 0..n_slices {
        let row = random_slice(rng, width, max_width);
        width = row.iter().map(|a| a.outputs()).sum();
        d.slices.push(row);
    }
    let states = (0..width).map(|_| random_state(rng)).collect();
    d.with_states(states)
}

/// A random closed diagram: a random diagram whose top legs are capped off.
pub fn random_closed_diagram<R: Rng>(rng: &mut R, surface: Surface, max_strands: usize, n_slices: usize) -> DiagramIR {
    let mut d = random_diagram(rng, surface, max_strands, n_slices);
    d.states = None;
    let width: usize = match d.slices.last() {
        Some(row) => row.iter().map(|a| a.outputs()).sum(),
        None => d.bottom_width(),
    };
    if width > 0 {
        d.slices.push(vec![Atom::Cap; width / 2]);
    }
    d
}

/// All generator identifiers of a surface.
pub fn all_generators(surface: Surface) -> Vec<GeneratorId> {
    let mut out = Vec::new();
    for slot in 0..surface.n_slots() {
        let (f, h) = surface.family_of_slot(slot);
        for s in [State::Minus, State::Plus] {
            for t in [State::Minus, State::Plus] {
                out.push(GeneratorId::new(f, h, s, t));
            }
        }
    }
    out
}

/// A random word of length `0..=max_len`.
pub fn random_word<R: Rng>(rng: &mut R, surface: Surface, max_len: usize) -> Vec<GeneratorId> {
    let gens = all_generators(surface);
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| *gens.choose(rng).expect("surface has generators"))
        .collect()
}

/// A small random coefficient `±q^k`, `k ∈ [-2, 2]`, occasionally `q - q^-1`.
pub fn random_coefficient<R: Rng>(rng: &mut R) -> LaurentScalar {
    if rng.gen_bool(0.2) {
        return LaurentScalar::from_terms([(2, 1), (-2, -1)]);
    }
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    LaurentScalar::monomial(sign, 2 * rng.gen_range(-2..=2))
}

/// A random element: a sum of `1..=max_terms` coefficient-weighted words.
pub fn random_element<R: Rng>(
    rng: &mut R,
    alg: &Arc<LgnAlgebra>,
    max_terms: usize,
    max_len: usize,
) -> Result<LgnElement, LgnError> {
    let mut acc = LgnElement::zero(alg);
    for _ in 0..rng.gen_range(1..=max_terms.max(1)) {
        let w = random_word(rng, alg.surface(), max_len);
        let mut x = LgnElement::from_laurent(alg, &random_coefficient(rng));
        for id in w {
            x = x.mul(&LgnElement::generator(alg, id)?)?;
        }
        acc.add_assign(&x);
    }
    Ok(acc)
}

/// A random element of the subalgebra generated by one family.
pub fn random_family_element<R: Rng>(
    rng: &mut R,
    alg: &Arc<LgnAlgebra>,
    family: Family,
    max_len: usize,
) -> Result<LgnElement, LgnError> {
    let gens: Vec<GeneratorId> = all_generators(alg.surface())
        .into_iter()
        .filter(|g| g.family == family)
        .collect();
    let mut x = LgnElement::from_laurent(alg, &random_coefficient(rng));
    for _ in 0..rng.gen_range(0..=max_len) {
        x = x.mul(&LgnElement::generator(alg, *gens.choose(rng).expect("family present"))?)?;
    }
    Ok(x)
}
