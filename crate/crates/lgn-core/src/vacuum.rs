//! The right vacuum representation of `L_{g,0}` on `L_{0,g}`.
//!
//! The action is computed algebraically: embed `x ∈ L_{0,g}` by `M(i) ↦ B(i)`,
//! multiply in `L_{g,0}`, then project with `A(i) ↦ 𝕀`, `B(i) ↦ M(i)`. The
//! geometric side, stacking a `(g,0)` diagram onto the handlebody, is built
//! as a diagram on `(0,g)` so that the two can be compared.

use std::collections::BTreeMap;
use thiserror::Error;

use crate::holonomy::{eval_diagram, Atom, DiagramIR, HolTensor, HolonomyError, Routing};
use crate::lgn::{LgnAlgebra, LgnElement, LgnError, Mode, Mono, Surface};
use crate::pbw::{GEN_B, GEN_C};

#[derive(Debug, Error)]
pub enum VacuumError {
    #[error("expected an element of L{expected}, found L{found}")]
    WrongSurface { expected: String, found: Surface },
    #[error(transparent)]
    Lgn(#[from] LgnError),
    #[error(transparent)]
    Holonomy(#[from] HolonomyError),
}

fn closed_surface(x: &LgnElement) -> Result<u32, VacuumError> {
    let s = x.algebra().surface();
    if s.n != 0 {
        return Err(VacuumError::WrongSurface {
            expected: "(g,0)".into(),
            found: s,
        });
    }
    Ok(s.g)
}

fn handlebody_surface(x: &LgnElement) -> Result<u32, VacuumError> {
    let s = x.algebra().surface();
    if s.g != 0 {
        return Err(VacuumError::WrongSurface {
            expected: "(0,g)".into(),
            found: s,
        });
    }
    Ok(s.n)
}

/// `1 ◁ x`: set every `A(i)^s_t` to `δ^s_t` and relabel `B(i)` as `M(i)`.
///
/// The `A`-letters are leftmost in the normal order, so this is a prefix
/// operation on each normal monomial.
pub fn vacuum_project(x: &LgnElement) -> Result<LgnElement, VacuumError> {
    let g = closed_surface(x)? as usize;
    let target = LgnAlgebra::get(Surface::new(0, g as u32)?, x.algebra().mode())?;
    let mut terms: BTreeMap<Mono, _> = BTreeMap::new();
    for (m, c) in x.terms() {
        // off-diagonal letters of an A-matrix give δ = 0
        if m[..g]
            .iter()
            .any(|h| h[crate::pbw::pos(GEN_B)] > 0 || h[crate::pbw::pos(GEN_C)] > 0)
        {
            continue;
        }
        let key = m[g..].to_vec();
        let v = match terms.remove(&key) {
            Some(acc) => acc + c.clone(),
            None => c.clone(),
        };
        terms.insert(key, v);
    }
    terms.retain(|_, c| !c.is_zero());
    Ok(LgnElement::from_terms(&target, terms))
}

/// The algebra embedding `L_{0,g} → L_{g,0}`, `M(i) ↦ B(i)`.
pub fn vacuum_embed(x: &LgnElement) -> Result<LgnElement, VacuumError> {
    let g = handlebody_surface(x)? as usize;
    let target = LgnAlgebra::get(Surface::new(g as u32, 0)?, x.algebra().mode())?;
    let terms = x
        .terms()
        .iter()
        .map(|(m, c)| {
            let mut full: Mono = vec![[0; 4]; g];
            full.extend(m.iter().copied());
            (full, c.clone())
        })
        .collect();
    Ok(LgnElement::from_terms(&target, terms))
}

/// `x ◁ y` for `x ∈ L_{0,g}` and `y ∈ L_{g,0}`.
pub fn vacuum_act(x: &LgnElement, y: &LgnElement) -> Result<LgnElement, VacuumError> {
    let g = handlebody_surface(x)?;
    let gy = closed_surface(y)?;
    if g != gy || x.algebra().mode() != y.algebra().mode() {
        return Err(VacuumError::WrongSurface {
            expected: format!("({g},0)"),
            found: y.algebra().surface(),
        });
    }
    vacuum_project(&vacuum_embed(x)?.mul(y)?)
}

/// A `(0,g)` diagram as a `(g,0)` diagram through the `b`-handles.
pub fn embed_diagram(s: &DiagramIR) -> Result<DiagramIR, VacuumError> {
    if s.surface.g != 0 {
        return Err(HolonomyError::SurfaceMismatch(s.surface, Surface::new(0, s.surface.n)?).into());
    }
    let g = s.surface.n as usize;
    let mut hs = vec![0; 2 * g];
    for i in 0..g {
        hs[2 * i] = s.handle_strands[i];
    }
    Ok(DiagramIR {
        surface: Surface::new(g as u32, 0)?,
        handle_strands: hs,
        routing: Routing::Canonical,
        slices: s.slices.clone(),
        states: s.states.clone(),
    })
}

/// Crossings used when building `S ◀ T`.
#[derive(Clone, Debug)]
#[doc(hidden)]
pub struct Crossings {
    /// A meridian's left leg enters the tunnel past the `b_R` bunch.
    pub tunnel: Atom,
    /// An `S` leg moves left past a `T` leg of a `b`-bunch.
    pub past_b: Atom,
    /// An `S` leg moves left past a meridian's left leg.
    pub past_a_left: Atom,
    /// An `S` leg moves left past a meridian's right leg.
    pub past_a_right: Atom,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Leg {
    S,
    B,
    ALeft,
    ARight,
}

/// `S ◀ T` with the given crossings.
#[doc(hidden)]
pub fn stack_act_with(s: &DiagramIR, t: &DiagramIR, c: &Crossings) -> Result<DiagramIR, VacuumError> {
    let g = s.surface.n as usize;
    if s.surface.g != 0 || t.surface != Surface::new(g as u32, 0)? {
        return Err(HolonomyError::SurfaceMismatch(s.surface, t.surface).into());
    }
    if t.routing != Routing::Canonical {
        return Err(HolonomyError::RoutingMismatch.into());
    }
    let k_s = s.validate()?;
    t.validate()?;
    let (sh, th) = (&s.handle_strands, &t.handle_strands);
    let mut slices: Vec<Vec<Atom>> = Vec::new();
    let mut labels: Vec<Leg> = Vec::new();
    // handle bunches: S strands outermost, legs m_L then m_R (reversed)
    let mut width: usize = 2 * (0..g).map(|i| sh[i] + th[2 * i]).sum::<usize>();
    let mut base = 0;
    for i in 0..g {
        let (ms, mb, ma) = (sh[i], th[2 * i], th[2 * i + 1]);
        let m = ms + mb;
        // nested meridian cups after the m_R bunch, outermost first
        let at = base + 2 * m;
        for k in 0..ma {
            let p = at + k;
            let mut row = vec![Atom::Id; p];
            row.push(Atom::Cup);
            row.extend(std::iter::repeat_n(Atom::Id, width - p));
            slices.push(row);
            width += 2;
        }
        if m > 0 && ma > 0 {
            slices.extend(swap_left(width, base + m, m, ma, &c.tunnel));
        }
        labels.extend((0..m).map(|k| if k < ms { Leg::S } else { Leg::B }));
        labels.extend(std::iter::repeat_n(Leg::ALeft, ma));
        labels.extend((0..m).rev().map(|k| if k < ms { Leg::S } else { Leg::B }));
        labels.extend(std::iter::repeat_n(Leg::ARight, ma));
        base += 2 * (m + ma);
    }
    // every S leg moves left past the T legs
    while let Some(i) = (0..width.saturating_sub(1)).find(|&i| labels[i] != Leg::S && labels[i + 1] == Leg::S) {
        let atom = match labels[i] {
            Leg::B => &c.past_b,
            Leg::ALeft => &c.past_a_left,
            Leg::ARight => &c.past_a_right,
            Leg::S => unreachable!(),
        };
        let mut row = vec![Atom::Id; i];
        row.push(atom.clone());
        row.extend(std::iter::repeat_n(Atom::Id, width - i - 2));
        slices.push(row);
        labels.swap(i, i + 1);
    }
    let w_t = width - 2 * sh.iter().sum::<usize>();
    for row in &s.slices {
        let mut r = row.clone();
        r.extend(std::iter::repeat_n(Atom::Id, w_t));
        slices.push(r);
    }
    for row in &t.slices {
        let mut r = vec![Atom::Id; k_s];
        r.extend(row.iter().cloned());
        slices.push(r);
    }
    let states = match (&s.states, &t.states) {
        (Some(x), Some(y)) => Some(x.iter().chain(y).copied().collect()),
        (None, None) => None,
        (Some(x), None) if t.validate()? == 0 => Some(x.clone()),
        (None, Some(y)) if k_s == 0 => Some(y.clone()),
        _ => return Err(HolonomyError::MissingStates.into()),
    };
    let d = DiagramIR {
        surface: s.surface,
        handle_strands: (0..g).map(|i| sh[i] + th[2 * i]).collect(),
        routing: Routing::Canonical,
        slices,
        states,
    };
    d.validate()?;
    Ok(d)
}

/// Move the bunch at `[p + x, p + x + y)` left past `[p, p + x)`.
fn swap_left(width: usize, p: usize, x: usize, y: usize, atom: &Atom) -> Vec<Vec<Atom>> {
    let mut out = Vec::new();
    for j in 0..y {
        for k in (0..x).rev() {
            let left = p + j + k;
            let mut row = vec![Atom::Id; left];
            row.push(atom.clone());
            row.extend(std::iter::repeat_n(Atom::Id, width - left - 2));
            out.push(row);
        }
    }
    out
}

fn crossings() -> Crossings {
    Crossings {
        tunnel: Atom::CrossPos,
        past_b: Atom::CrossPos,
        past_a_left: Atom::CrossPos,
        past_a_right: Atom::CrossPos,
    }
}

/// `S ◀ T`: the `(g,0)` diagram `T` stacked atop the `(0,g)` diagram `S`
/// inside the handlebody `Σ_{0,g} × [0,1]`.
///
/// Each `b_i` bunch of `T` joins the `m_i` bunch inside the `S` strands. Each
/// `a_i` bunch bounds a meridian disc, so it becomes nested cups whose left
/// legs pass through the tunnel of handle `i`.
pub fn stack_act(s: &DiagramIR, t: &DiagramIR) -> Result<DiagramIR, VacuumError> {
    stack_act_with(s, t, &crossings())
}

/// `hol(S) ◁ hol(T)` componentwise, as a tensor over `L_{0,g}`.
pub fn act_tensors(hs: &HolTensor, ht: &HolTensor) -> Result<HolTensor, VacuumError> {
    let alg0 = hs.algebra().clone();
    let mut entries = BTreeMap::new();
    for (i, x) in hs.entries() {
        for (j, y) in ht.entries() {
            let v = vacuum_act(x, y)?;
            if !v.is_zero() {
                entries.insert(i | (j << hs.arity()), v);
            }
        }
    }
    Ok(HolTensor::from_entries(&alg0, hs.arity() + ht.arity(), entries))
}

/// Whether `hol(S) ◁ hol(T) = hol(S ◀ T)`, on all boundary states.
pub fn stack_act_check(s: &DiagramIR, t: &DiagramIR, mode: Mode) -> Result<bool, VacuumError> {
    let lhs = act_tensors(&eval_diagram(s, mode)?, &eval_diagram(t, mode)?)?;
    let rhs = eval_diagram(&stack_act(s, t)?, mode)?;
    Ok(lhs == rhs)
}

/// Whether `x ◁ W(L) = x ◁ W(L')` for two closed `(g,0)` diagrams.
pub fn boundary_slide_check(
    x: &LgnElement,
    l: &DiagramIR,
    l_slid: &DiagramIR,
    mode: Mode,
) -> Result<bool, VacuumError> {
    let w = crate::holonomy::wilson_loop(l, mode)?;
    let w2 = crate::holonomy::wilson_loop(l_slid, mode)?;
    Ok(vacuum_act(x, &w)? == vacuum_act(x, &w2)?)
}

/// A small trivial circle on `(g,0)`.
pub fn trivial_circle(g: u32) -> Result<DiagramIR, VacuumError> {
    let mut d = DiagramIR::empty(Surface::new(g, 0)?);
    d.slices = vec![vec![Atom::Cup], vec![Atom::Cap]];
    Ok(d)
}

/// The curve parallel to the boundary of `Σ_{g,0}^o`: the trivial circle
/// slid across the disc that closes the surface.
///
/// It runs twice through every handle. With legs
/// `bL1 bL2 aL1 aL2 bR2 bR1 aR2 aR1` per genus pair, the three inner pairs are
/// capped within each pair, consecutive pairs are joined, and the outermost
/// two legs close around the top.
pub fn boundary_parallel_curve(g: u32) -> Result<DiagramIR, VacuumError> {
    let mut d = DiagramIR::empty(Surface::new(g, 0)?);
    d.handle_strands = vec![2; 2 * g as usize];
    let mut first = Vec::new();
    for _ in 0..g {
        first.extend([Atom::Id, Atom::Cap, Atom::Cap, Atom::Cap, Atom::Id]);
    }
    d.slices.push(first);
    if g > 1 {
        let mut join = vec![Atom::Id];
        join.extend(std::iter::repeat_n(Atom::Cap, g as usize - 1));
        join.push(Atom::Id);
        d.slices.push(join);
    }
    d.slices.push(vec![Atom::Cap]);
    d.validate()?;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holonomy::{generator_arc, generator_loop, wilson_loop};
    use crate::lgn::{is_invariant, Family, GeneratorId};
    use crate::tensor::State::{Minus, Plus};

    fn gen(s: Surface, f: Family, h: u32, a: crate::State, b: crate::State) -> LgnElement {
        let alg = LgnAlgebra::get(s, Mode::Generic).unwrap();
        LgnElement::generator(&alg, GeneratorId::new(f, h, a, b)).unwrap()
    }

    #[test]
    fn projection_examples() {
        let s10 = Surface::new(1, 0).unwrap();
        let s01 = Surface::new(0, 1).unwrap();
        let x = gen(s10, Family::A, 1, Minus, Minus)
            .mul(&gen(s10, Family::B, 1, Plus, Plus))
            .unwrap();
        assert_eq!(vacuum_project(&x).unwrap(), gen(s01, Family::M, 1, Plus, Plus));
        let w = gen(s10, Family::B, 1, Minus, Plus)
            .mul(&gen(s10, Family::B, 1, Plus, Plus))
            .unwrap();
        let y = gen(s10, Family::A, 1, Minus, Plus).mul(&w).unwrap();
        assert!(vacuum_project(&y).unwrap().is_zero());
        let one = LgnElement::one(&LgnAlgebra::get(s10, Mode::Generic).unwrap());
        let one01 = LgnElement::one(&LgnAlgebra::get(s01, Mode::Generic).unwrap());
        assert_eq!(vacuum_project(&one).unwrap(), one01);
    }

    #[test]
    fn vacuum_on_a_matrices() {
        let s20 = Surface::new(2, 0).unwrap();
        let one = LgnElement::one(&LgnAlgebra::get(Surface::new(0, 2).unwrap(), Mode::Generic).unwrap());
        for h in 1..=2 {
            for a in [Minus, Plus] {
                for b in [Minus, Plus] {
                    let v = vacuum_act(&one, &gen(s20, Family::A, h, a, b)).unwrap();
                    if a == b {
                        assert_eq!(v, one);
                    } else {
                        assert!(v.is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn wrong_surfaces_are_rejected() {
        let x = gen(Surface::new(1, 1).unwrap(), Family::M, 2, Minus, Minus);
        assert!(matches!(vacuum_project(&x), Err(VacuumError::WrongSurface { .. })));
        let y = gen(Surface::new(2, 0).unwrap(), Family::B, 1, Minus, Minus);
        let z = gen(Surface::new(0, 1).unwrap(), Family::M, 1, Minus, Minus);
        assert!(vacuum_act(&z, &y).is_err());
    }

    #[test]
    fn stacking_examples() {
        let (s01, s10) = (Surface::new(0, 1).unwrap(), Surface::new(1, 0).unwrap());
        let (s02, s20) = (Surface::new(0, 2).unwrap(), Surface::new(2, 0).unwrap());
        let m = Mode::Generic;
        assert!(stack_act_check(&DiagramIR::empty(s01), &DiagramIR::empty(s10), m).unwrap());
        let m1 = generator_loop(s01, Family::M, 1).unwrap();
        let b1 = generator_loop(s10, Family::B, 1).unwrap();
        assert!(stack_act_check(&m1, &b1, m).unwrap());
        // an m₁m₂ word: the two stated arcs stacked
        let w = crate::holonomy::stack(
            &generator_arc(s02, Family::M, 1, Minus, Plus).unwrap(),
            &generator_arc(s02, Family::M, 2, Plus, Minus).unwrap(),
        )
        .unwrap();
        let a1 = generator_loop(s20, Family::A, 1).unwrap();
        assert!(stack_act_check(&w, &a1, m).unwrap());
    }

    #[test]
    fn tunnel_crossing_is_pinned() {
        // with the mirror crossing at the tunnel the two sides disagree
        let s01 = Surface::new(0, 1).unwrap();
        let s10 = Surface::new(1, 0).unwrap();
        let mut s = generator_arc(s01, Family::M, 1, Minus, Minus).unwrap();
        s.states = None;
        let mut t = generator_arc(s10, Family::A, 1, Minus, Minus).unwrap();
        t.states = None;
        let m = Mode::Generic;
        let lhs = act_tensors(&eval_diagram(&s, m).unwrap(), &eval_diagram(&t, m).unwrap()).unwrap();
        let good = eval_diagram(&stack_act(&s, &t).unwrap(), m).unwrap();
        let mut c = crossings();
        c.tunnel = Atom::CrossNeg;
        let bad = eval_diagram(&stack_act_with(&s, &t, &c).unwrap(), m).unwrap();
        assert_eq!(lhs, good);
        assert_ne!(lhs, bad);
    }

    #[test]
    fn boundary_slide() {
        let m = Mode::Generic;
        let s01 = Surface::new(0, 1).unwrap();
        let tr = wilson_loop(&generator_loop(s01, Family::M, 1).unwrap(), m).unwrap();
        assert!(is_invariant(&tr).unwrap());
        let l = trivial_circle(1).unwrap();
        let l_slid = boundary_parallel_curve(1).unwrap();
        assert!(boundary_slide_check(&tr, &l, &l_slid, m).unwrap());
        // the hypothesis matters: a non-invariant vector sees the difference
        let x = gen(s01, Family::M, 1, Minus, Plus);
        assert!(!boundary_slide_check(&x, &l, &l_slid, m).unwrap());
    }
}
