//! 4×4 matrices over `V₂⊗V₂` whose entries are noncommutative polynomials.
//! Used to expand matrix relations such as `R X₁ R₂₁ X₂ = X₂ R X₁ R₂₁`
//! into their sixteen scalar components.

use std::collections::BTreeMap;

use crate::coeff_ring::LaurentScalar;
use crate::tensor::Tensor;

pub type Poly<S> = BTreeMap<Vec<S>, LaurentScalar>;

pub fn poly_add<S: Ord + Clone>(a: &mut Poly<S>, w: Vec<S>, c: LaurentScalar) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match a.entry(w) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            let s = o.get() + &c;
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

pub fn poly_mul<S: Ord + Clone>(a: &Poly<S>, b: &Poly<S>) -> Poly<S> {
    let mut r = Poly::new();
    for (w1, c1) in a {
        for (w2, c2) in b {
            let mut w = w1.clone();
            w.extend(w2.iter().cloned());
            poly_add(&mut r, w, c1 * c2);
        }
    }
    r
}

/// Row/column index `a | b << 1` for the pair `(a, b)` of first and second factor.
#[derive(Clone, Debug)]
pub struct PolyMat<S: Ord + Clone> {
    pub e: [[Poly<S>; 4]; 4],
}

impl<S: Ord + Clone> PolyMat<S> {
    pub fn zero() -> Self {
        Self { e: Default::default() }
    }

    pub fn from_tensor(t: &Tensor) -> Self {
        let mut m = Self::zero();
        for (o, i, x) in t.nonzero() {
            m.e[o][i].insert(Vec::new(), x.clone());
        }
        m
    }

    /// `X₁ = X ⊗ id`: `(X₁)^{ab}_{cd} = X^a_c δ^b_d`.
    pub fn first(x: impl Fn(usize, usize) -> S) -> Self {
        let mut m = Self::zero();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    m.e[a | b << 1][c | b << 1].insert(vec![x(a, c)], LaurentScalar::one());
                }
            }
        }
        m
    }

    /// `X₂ = id ⊗ X`: `(X₂)^{ab}_{cd} = δ^a_c X^b_d`.
    pub fn second(x: impl Fn(usize, usize) -> S) -> Self {
        let mut m = Self::zero();
        for a in 0..2 {
            for b in 0..2 {
                for d in 0..2 {
                    m.e[a | b << 1][a | d << 1].insert(vec![x(b, d)], LaurentScalar::one());
                }
            }
        }
        m
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = Poly::new();
                for k in 0..4 {
                    if self.e[i][k].is_empty() || o.e[k][j].is_empty() {
                        continue;
                    }
                    for (w, c) in poly_mul(&self.e[i][k], &o.e[k][j]) {
                        poly_add(&mut acc, w, c);
                    }
                }
                r.e[i][j] = acc;
            }
        }
        r
    }

    pub fn chain(ms: &[Self]) -> Self {
        let mut it = ms.iter();
        let first = it.next().expect("non-empty chain").clone();
        it.fold(first, |acc, m| acc.mul(m))
    }

    /// Entrywise `self − o`, as the sixteen components in row-major order.
    pub fn components_minus(&self, o: &Self) -> Vec<Poly<S>> {
        let mut out = Vec::with_capacity(16);
        for i in 0..4 {
            for j in 0..4 {
                let mut p = self.e[i][j].clone();
                for (w, c) in &o.e[i][j] {
                    poly_add(&mut p, w.clone(), -c);
                }
                out.push(p);
            }
        }
        out
    }
}
