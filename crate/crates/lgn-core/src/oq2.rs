//! The quantum coordinate algebra `O_{q²}` generated by the entries of
//! `T = (T^s_t)` subject to `R T₁ T₂ = T₂ T₁ R` and
//! `T^-_- T^+_+ − q^{-2} T^-_+ T^+_- = 1`.
//!
//! It coacts on `L_{g,n}` and is used to test invariance.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::coeff_ring::{LaurentScalar, Ring, Scalar};
use crate::pbw::{acc, gi_of, mono_word, HMono, HandleAlgebra, PbwError, QuadraticRules};
use crate::polymat::{Poly, PolyMat};
use crate::tensor::{r_matrix, State};

/// The sixteen componentwise RTT relations `R T₁ T₂ − T₂ T₁ R` as words in generator codes.
pub fn rtt_components() -> Vec<Poly<u8>> {
    let r = PolyMat::from_tensor(&r_matrix());
    let t1 = PolyMat::first(gi_of);
    let t2 = PolyMat::second(gi_of);
    PolyMat::chain(&[r.clone(), t1.clone(), t2.clone()]).components_minus(&PolyMat::chain(&[t2, t1, r]))
}

/// The determinant relation `T^-_- T^+_+ − q^{-2} T^-_+ T^+_- − 1` as a word polynomial.
pub fn qdet_component() -> Poly<u8> {
    let mut p = Poly::new();
    p.insert(vec![0, 3], LaurentScalar::one());
    p.insert(vec![1, 2], -LaurentScalar::q_pow(-2));
    p.insert(vec![], -LaurentScalar::one());
    p
}

fn algebra() -> &'static Arc<HandleAlgebra> {
    static ALG: OnceLock<Arc<HandleAlgebra>> = OnceLock::new();
    ALG.get_or_init(|| {
        let rules = QuadraticRules::derive(&rtt_components(), LaurentScalar::q_pow(-2))
            .expect("RTT relations orient over the Laurent ring");
        Arc::new(HandleAlgebra::new(&rules, Ring::Laurent, None))
    })
}

/// The normal-form engine behind `O_{q²}`.
pub fn oq_algebra() -> Arc<HandleAlgebra> {
    algebra().clone()
}

/// An element of `O_{q²}` in PBW normal form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OqElement {
    terms: BTreeMap<HMono, LaurentScalar>,
}

impl OqElement {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::scalar(LaurentScalar::one())
    }

    pub fn scalar(c: LaurentScalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert([0; 4], c);
        }
        Self { terms }
    }

    /// The generator `T^s_t`.
    pub fn generator(s: State, t: State) -> Self {
        Self::from_word(&[gi_of(s.index(), t.index())]).expect("single generator")
    }

    /// Normal form of a word of generator codes (`2s + t`).
    pub fn from_word(word: &[u8]) -> Result<Self, PbwError> {
        Ok(Self::from_helem(algebra().normal_form(word)?))
    }

    fn from_helem(h: Vec<(HMono, Scalar)>) -> Self {
        let terms = h
            .into_iter()
            .map(|(m, c)| (m, c.as_laurent().expect("generic ring").clone()))
            .collect();
        Self { terms }
    }

    fn to_helem(&self) -> Vec<(HMono, Scalar)> {
        self.terms
            .iter()
            .map(|(m, c)| (*m, Scalar::Laurent(c.clone())))
            .collect()
    }

    pub fn terms(&self) -> &BTreeMap<HMono, LaurentScalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut t = self.terms.clone();
        for (m, c) in &o.terms {
            let s = t.get(m).map_or_else(|| c.clone(), |x| x + c);
            if s.is_zero() {
                t.remove(m);
            } else {
                t.insert(*m, s);
            }
        }
        Self { terms: t }
    }

    pub fn scale(&self, c: &LaurentScalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    /// Product in normal form.
    pub fn mul(&self, o: &Self) -> Self {
        Self::from_helem(
            algebra()
                .mul(&self.to_helem(), &o.to_helem())
                .expect("O_{q²} straightening terminates"),
        )
    }

    /// Counit: `ε(T^s_t) = δ^s_t`, extended multiplicatively.
    pub fn counit(&self) -> LaurentScalar {
        self.terms
            .iter()
            .filter(|(m, _)| m[0] == 0 && m[3] == 0)
            .fold(LaurentScalar::zero(), |a, (_, c)| &a + c)
    }
}

/// Multiply two elements.
pub fn oq_mul(x: &OqElement, y: &OqElement) -> OqElement {
    x.mul(y)
}

impl fmt::Display for OqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(String, Scalar)> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| (oq_word_name(m), Scalar::Laurent(c.clone())))
            .collect();
        crate::render::write_sum(f, &terms)
    }
}

impl fmt::Debug for OqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn oq_word_name(m: &HMono) -> String {
    mono_word(m)
        .iter()
        .map(|&g| {
            let (s, t) = crate::pbw::state_pair(g);
            format!("T[{},{}]", State::from_index(s).symbol(), State::from_index(t).symbol())
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// A 2×2 matrix whose entries are combinations of single generators.
pub type GenMatrix = [[Vec<(LaurentScalar, u8)>; 2]; 2];

/// The matrix `S(T)` with `T·S(T) = S(T)·T = 1`.
pub fn antipode_matrix() -> Result<[[OqElement; 2]; 2], PbwError> {
    let g = antipode_gen_matrix()?;
    Ok(std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            g[i][j].iter().fold(OqElement::zero(), |a, (c, x)| {
                a.add(&OqElement::from_word(&[*x]).unwrap().scale(c))
            })
        })
    }))
}

/// The antipode matrix in generator form.
pub fn antipode_gen_matrix() -> Result<GenMatrix, PbwError> {
    static CACHE: OnceLock<Result<GenMatrix, PbwError>> = OnceLock::new();
    CACHE
        .get_or_init(|| crate::pbw::solve_inverse_matrix(algebra()))
        .clone()
}

/// `Δ(x)` as a sum of `(left, right, coefficient)` normal monomials.
pub fn oq_coproduct(x: &OqElement) -> BTreeMap<(HMono, HMono), LaurentScalar> {
    let alg = algebra();
    let mut out: BTreeMap<(HMono, HMono), Scalar> = BTreeMap::new();
    for (m, c) in &x.terms {
        // Δ is multiplicative: fold the generator coproducts over the word.
        let mut cur: BTreeMap<(HMono, HMono), Scalar> = BTreeMap::new();
        cur.insert(([0; 4], [0; 4]), Scalar::Laurent(c.clone()));
        for g in mono_word(m) {
            let (s, t) = crate::pbw::state_pair(g);
            let mut next = BTreeMap::new();
            for ((l, r), cc) in &cur {
                for k in 0..2 {
                    let ls = alg.mul_gen(l, gi_of(s, k)).expect("straightening");
                    let rs = alg.mul_gen(r, gi_of(k, t)).expect("straightening");
                    for (lm, lc) in ls.iter() {
                        for (rm, rc) in rs.iter() {
                            acc(&mut next, (*lm, *rm), &(cc * lc) * rc);
                        }
                    }
                }
            }
            cur = next;
        }
        for (k, v) in cur {
            acc(&mut out, k, v);
        }
    }
    out.into_iter()
        .map(|(k, v)| (k, v.as_laurent().unwrap().clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::State::{Minus as Mi, Plus as Pl};

    fn t(s: State, u: State) -> OqElement {
        OqElement::generator(s, u)
    }

    #[test]
    fn qdet_rearrangement() {
        let lhs = t(Mi, Mi).mul(&t(Pl, Pl));
        let rhs = OqElement::one().add(&t(Mi, Pl).mul(&t(Pl, Mi)).scale(&LaurentScalar::q_pow(-2)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn rtt_components_vanish() {
        let comps = rtt_components();
        assert_eq!(comps.len(), 16);
        for p in comps.iter().chain(std::iter::once(&qdet_component())) {
            let mut s = OqElement::zero();
            for (w, c) in p {
                s = s.add(&OqElement::from_word(w).unwrap().scale(c));
            }
            assert!(s.is_zero(), "component {p:?} reduced to {s}");
        }
    }

    #[test]
    fn antipode_is_two_sided_inverse() {
        let s = antipode_matrix().unwrap();
        let tm = [[t(Mi, Mi), t(Mi, Pl)], [t(Pl, Mi), t(Pl, Pl)]];
        for i in 0..2 {
            for j in 0..2 {
                let ts = (0..2).fold(OqElement::zero(), |a, k| a.add(&tm[i][k].mul(&s[k][j])));
                let st = (0..2).fold(OqElement::zero(), |a, k| a.add(&s[i][k].mul(&tm[k][j])));
                let e = if i == j { OqElement::one() } else { OqElement::zero() };
                assert_eq!(ts, e);
                assert_eq!(st, e);
            }
        }
        // adjugate shape: each entry is a unit multiple of one generator
        for row in antipode_gen_matrix().unwrap() {
            for e in row {
                assert_eq!(e.len(), 1);
                assert!(e[0].0.as_unit().is_some());
            }
        }
    }

    #[test]
    fn coproduct_of_generator() {
        let d = oq_coproduct(&t(Mi, Pl));
        assert_eq!(d.len(), 2);
        let a: HMono = [0, 1, 0, 0];
        let b: HMono = [1, 0, 0, 0];
        let dd: HMono = [0, 0, 1, 0];
        assert_eq!(d.get(&(a, b)), Some(&LaurentScalar::one()));
        assert_eq!(d.get(&(b, dd)), Some(&LaurentScalar::one()));
        assert_eq!(oq_coproduct(&OqElement::one()).len(), 1);
    }

    #[test]
    fn counit_on_generators() {
        assert!(t(Mi, Mi).counit().is_one());
        assert!(t(Mi, Pl).counit().is_zero());
        assert!(t(Mi, Mi).mul(&t(Pl, Pl)).counit().is_one());
    }
}
