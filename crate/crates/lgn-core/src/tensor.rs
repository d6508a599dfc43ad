//! Dense tensors on powers of the fundamental module `V₂` and the fixed
//! structural tensors of the unoriented graphical calculus.
//!
//! States: `−` is index 0, `+` is index 1. A multi-index over `k` strands is
//! packed little-endian from the left strand: strand `i` (counted from the
//! left) contributes bit `i`.

use std::fmt;

use thiserror::Error;

use crate::coeff_ring::LaurentScalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("arity mismatch: top takes {top_in} inputs but bottom produces {bottom_out}")]
    ArityMismatch { top_in: usize, bottom_out: usize },
    #[error("unknown builtin tensor `{0}`")]
    UnknownBuiltin(String),
    #[error("structural inconsistency: {0}")]
    Structural(String),
}

/// A state of one strand endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum State {
    Minus,
    Plus,
}

impl State {
    pub fn index(self) -> usize {
        match self {
            State::Minus => 0,
            State::Plus => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            State::Minus
        } else {
            State::Plus
        }
    }

    pub fn flip(self) -> Self {
        match self {
            State::Minus => State::Plus,
            State::Plus => State::Minus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            State::Minus => '-',
            State::Plus => '+',
        }
    }

    pub fn parse(c: char) -> Option<Self> {
        match c {
            '-' => Some(State::Minus),
            '+' => Some(State::Plus),
            _ => None,
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Pack states (left strand first) into a little-endian index.
pub fn pack(states: &[State]) -> usize {
    states.iter().enumerate().fold(0, |acc, (i, s)| acc | (s.index() << i))
}

/// Inverse of [`pack`].
pub fn unpack(index: usize, k: usize) -> Vec<State> {
    (0..k).map(|i| State::from_index((index >> i) & 1)).collect()
}

/// Linear map `V₂^{⊗in} → V₂^{⊗out}` with Laurent entries.
#[derive(Clone, PartialEq, Eq)]
pub struct Tensor {
    in_arity: usize,
    out_arity: usize,
    entries: Vec<LaurentScalar>,
}

impl Tensor {
    pub fn zeros(out_arity: usize, in_arity: usize) -> Self {
        Self {
            in_arity,
            out_arity,
            entries: vec![LaurentScalar::zero(); 1 << (in_arity + out_arity)],
        }
    }

    pub fn identity(k: usize) -> Self {
        let mut t = Self::zeros(k, k);
        for i in 0..(1 << k) {
            t.set(i, i, LaurentScalar::one());
        }
        t
    }

    /// A scalar as a `0 → 0` tensor.
    pub fn scalar(x: LaurentScalar) -> Self {
        Self {
            in_arity: 0,
            out_arity: 0,
            entries: vec![x],
        }
    }

    pub fn in_arity(&self) -> usize {
        self.in_arity
    }

    pub fn out_arity(&self) -> usize {
        self.out_arity
    }

    pub fn get(&self, out: usize, inp: usize) -> &LaurentScalar {
        &self.entries[(out << self.in_arity) | inp]
    }

    pub fn set(&mut self, out: usize, inp: usize, x: LaurentScalar) {
        self.entries[(out << self.in_arity) | inp] = x;
    }

    pub fn entry(&self, out: &[State], inp: &[State]) -> &LaurentScalar {
        self.get(pack(out), pack(inp))
    }

    /// Entries as a `0 → 0` scalar, if the tensor is one.
    pub fn as_scalar(&self) -> Option<&LaurentScalar> {
        (self.in_arity == 0 && self.out_arity == 0).then(|| &self.entries[0])
    }

    /// Nonzero entries as `(out, in, value)` triples.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, &LaurentScalar)> + '_ {
        let mask = (1usize << self.in_arity) - 1;
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(move |(k, x)| (k >> self.in_arity, k & mask, x))
    }

    pub fn scale(&self, c: &LaurentScalar) -> Self {
        Self {
            in_arity: self.in_arity,
            out_arity: self.out_arity,
            entries: self.entries.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self, TensorError> {
        if self.in_arity != o.in_arity || self.out_arity != o.out_arity {
            return Err(TensorError::ArityMismatch {
                top_in: o.in_arity,
                bottom_out: self.in_arity,
            });
        }
        Ok(Self {
            in_arity: self.in_arity,
            out_arity: self.out_arity,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a + b).collect(),
        })
    }

    /// `top ∘ bottom`.
    pub fn compose(top: &Tensor, bottom: &Tensor) -> Result<Tensor, TensorError> {
        if top.in_arity != bottom.out_arity {
            return Err(TensorError::ArityMismatch {
                top_in: top.in_arity,
                bottom_out: bottom.out_arity,
            });
        }
        let mut r = Tensor::zeros(top.out_arity, bottom.in_arity);
        for (o, m, a) in top.nonzero() {
            for i in 0..(1 << bottom.in_arity) {
                let b = bottom.get(m, i);
                if !b.is_zero() {
                    let k = (o << r.in_arity) | i;
                    r.entries[k] = &r.entries[k] + &(a * b);
                }
            }
        }
        Ok(r)
    }

    /// Compose a bottom-to-top sequence of tensors.
    pub fn compose_chain(layers: &[Tensor]) -> Result<Tensor, TensorError> {
        let mut it = layers.iter();
        let mut acc = it.next().cloned().unwrap_or_else(|| Tensor::identity(0));
        for t in it {
            acc = Tensor::compose(t, &acc)?;
        }
        Ok(acc)
    }

    /// Kronecker product with `left` on the left strands.
    pub fn hcat(left: &Tensor, right: &Tensor) -> Tensor {
        let mut r = Tensor::zeros(left.out_arity + right.out_arity, left.in_arity + right.in_arity);
        for (o1, i1, a) in left.nonzero() {
            for (o2, i2, b) in right.nonzero() {
                let o = o1 | (o2 << left.out_arity);
                let i = i1 | (i2 << left.in_arity);
                r.set(o, i, a * b);
            }
        }
        r
    }

    pub fn hcat_all(parts: &[Tensor]) -> Tensor {
        parts.iter().fold(Tensor::identity(0), |acc, t| Tensor::hcat(&acc, t))
    }

    /// Square-matrix inverse for unit-determinant tensors (used for small structural maps).
    pub fn inverse(&self) -> Result<Tensor, TensorError> {
        if self.in_arity != self.out_arity {
            return Err(TensorError::Structural("inverse of a non-square tensor".into()));
        }
        let n = 1 << self.in_arity;
        let rows: Vec<Vec<LaurentScalar>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let inv = crate::linalg::laurent_inverse(&rows)
            .ok_or_else(|| TensorError::Structural("matrix not invertible over the Laurent ring".into()))?;
        let mut t = Tensor::zeros(self.out_arity, self.in_arity);
        for (i, row) in inv.into_iter().enumerate() {
            for (j, x) in row.into_iter().enumerate() {
                t.set(i, j, x);
            }
        }
        Ok(t)
    }

    /// Extend a `k → k` tensor to `n` strands, acting on `positions`
    /// (its strand `r` sits at `positions[r]`) and as the identity elsewhere.
    pub fn embed(&self, n: usize, positions: &[usize]) -> Result<Tensor, TensorError> {
        let k = positions.len();
        if self.in_arity != k || self.out_arity != k || positions.iter().any(|&p| p >= n) {
            return Err(TensorError::Structural("bad strand embedding".into()));
        }
        let mask: usize = positions.iter().map(|&p| 1 << p).sum();
        let scatter = |local: usize| -> usize {
            positions
                .iter()
                .enumerate()
                .map(|(r, &p)| ((local >> r) & 1) << p)
                .sum()
        };
        let mut t = Tensor::zeros(n, n);
        for rest in 0..(1usize << n) {
            if rest & mask != 0 {
                continue;
            }
            for (o, i, x) in self.nonzero() {
                t.set(rest | scatter(o), rest | scatter(i), x.clone());
            }
        }
        Ok(t)
    }

    /// Look up a named structural tensor.
    pub fn builtin(name: &str) -> Result<Tensor, TensorError> {
        if let Some(k) = name.strip_prefix("id(").and_then(|s| s.strip_suffix(')')) {
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| TensorError::UnknownBuiltin(name.to_string()))?;
            return Ok(Tensor::identity(k));
        }
        Ok(match name {
            "r" => r_matrix(),
            "r_inv" => r_inverse(),
            "r21" => r21(),
            "cross_pos" | "x+" => cross_pos(),
            "cross_neg" | "x-" => cross_neg(),
            "cup" => cup(),
            "cap" => cap(),
            "d" => d_map(),
            "d_transpose" => d_transpose(),
            "pivotal" => pivotal(),
            "flip" => flip(),
            "id" => Tensor::identity(1),
            _ => return Err(TensorError::UnknownBuiltin(name.to_string())),
        })
    }
}

impl fmt::Debug for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Tensor {} -> {}", self.in_arity, self.out_arity)?;
        for (o, i, x) in self.nonzero() {
            let os: String = unpack(o, self.out_arity).iter().map(|s| s.symbol()).collect();
            let is: String = unpack(i, self.in_arity).iter().map(|s| s.symbol()).collect();
            writeln!(f, "  [{os} <- {is}] {x}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

fn q(n: i32) -> LaurentScalar {
    LaurentScalar::q_pow(n)
}

fn qh(half: i32) -> LaurentScalar {
    LaurentScalar::q_half_pow(half)
}

use State::{Minus as M, Plus as P};

fn two(out: [State; 2], inp: [State; 2], x: LaurentScalar, t: &mut Tensor) {
    t.set(pack(&out), pack(&inp), x);
}

/// The R-matrix on `V₂ ⊗ V₂`: `q^{-1}` times `[[q²,0,0,0],[0,1,q²−q^{-2},0],[0,0,1,0],[0,0,0,q²]]`
/// in the row/column order `−−, −+, +−, ++`.
pub fn r_matrix() -> Tensor {
    let mut t = Tensor::zeros(2, 2);
    two([M, M], [M, M], q(1), &mut t);
    two([M, P], [M, P], q(-1), &mut t);
    two([M, P], [P, M], &q(1) - &q(-3), &mut t);
    two([P, M], [P, M], q(-1), &mut t);
    two([P, P], [P, P], q(1), &mut t);
    t
}

pub fn r_inverse() -> Tensor {
    let mut t = Tensor::zeros(2, 2);
    two([M, M], [M, M], q(-1), &mut t);
    two([M, P], [M, P], q(1), &mut t);
    two([M, P], [P, M], &q(-1) - &q(3), &mut t);
    two([P, M], [P, M], q(1), &mut t);
    two([P, P], [P, P], q(-1), &mut t);
    t
}

/// Swap the two tensor factors of a `2 → 2` tensor: `(T₂₁)^{ab}_{cd} = T^{ba}_{dc}`.
pub fn flip_factors(t: &Tensor) -> Tensor {
    let mut r = Tensor::zeros(2, 2);
    let sw = |i: usize| ((i & 1) << 1) | (i >> 1);
    for (o, i, x) in t.nonzero() {
        r.set(sw(o), sw(i), x.clone());
    }
    r
}

pub fn r21() -> Tensor {
    flip_factors(&r_matrix())
}

pub fn flip() -> Tensor {
    let mut t = Tensor::zeros(2, 2);
    for a in [M, P] {
        for b in [M, P] {
            two([b, a], [a, b], LaurentScalar::one(), &mut t);
        }
    }
    t
}

/// Braiding `c = P∘R`.
pub fn cross_pos() -> Tensor {
    Tensor::compose(&flip(), &r_matrix()).expect("arity")
}

/// Inverse braiding `R^{-1}∘P`.
pub fn cross_neg() -> Tensor {
    Tensor::compose(&r_inverse(), &flip()).expect("arity")
}

/// `D : V₂* → V₂`, `v^- ↦ −q^{5/2} v₊`, `v^+ ↦ q^{1/2} v₋`.
pub fn d_map() -> Tensor {
    let mut t = Tensor::zeros(1, 1);
    t.set(1, 0, -&qh(5));
    t.set(0, 1, qh(1));
    t
}

/// `ᵗD = g·D`, the transpose of `D` as a matrix.
pub fn d_transpose() -> Tensor {
    let mut t = Tensor::zeros(1, 1);
    t.set(0, 1, -&qh(5));
    t.set(1, 0, qh(1));
    t
}

/// Pivotal element: `g v₋ = −q² v₋`, `g v₊ = −q^{-2} v₊`.
pub fn pivotal() -> Tensor {
    let mut t = Tensor::zeros(1, 1);
    t.set(0, 0, -&q(2));
    t.set(1, 1, -&q(-2));
    t
}

/// Unoriented cup `(id ⊗ D)(Σ v_i ⊗ v^i) = −q^{5/2} v₋⊗v₊ + q^{1/2} v₊⊗v₋`.
pub fn cup() -> Tensor {
    let mut t = Tensor::zeros(2, 0);
    t.set(pack(&[M, P]), 0, -&qh(5));
    t.set(pack(&[P, M]), 0, qh(1));
    t
}

/// Unoriented cap `x ⊗ y ↦ (D^{-1}y)(g x)`.
pub fn cap() -> Tensor {
    let mut t = Tensor::zeros(0, 2);
    t.set(0, pack(&[M, P]), qh(-1));
    t.set(0, pack(&[P, M]), -&qh(-5));
    t
}

/// Solve `cross_pos = α·id + β·(cup∘cap)` exactly over the 16 entries.
pub fn kauffman_solve() -> Result<(LaurentScalar, LaurentScalar), TensorError> {
    let c = cross_pos();
    let id = Tensor::identity(2);
    let e = Tensor::compose(&cup(), &cap())?;
    let n = 4;
    // A 2×2 minor with unit determinant fixes (α, β); the rest must agree.
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|o| (0..n).map(move |i| (o, i))).collect();
    let mut sol = None;
    'outer: for (k, &(o1, i1)) in cells.iter().enumerate() {
        for &(o2, i2) in &cells[k + 1..] {
            let (a11, a12, b1) = (id.get(o1, i1), e.get(o1, i1), c.get(o1, i1));
            let (a21, a22, b2) = (id.get(o2, i2), e.get(o2, i2), c.get(o2, i2));
            let det = &(a11 * a22) - &(a12 * a21);
            if let Some(dinv) = det.unit_inverse() {
                let alpha = &(&(b1 * a22) - &(a12 * b2)) * &dinv;
                let beta = &(&(a11 * b2) - &(b1 * a21)) * &dinv;
                sol = Some((alpha, beta));
                break 'outer;
            }
        }
    }
    let (alpha, beta) = sol.ok_or_else(|| TensorError::Structural("identity and cup∘cap are dependent".into()))?;
    let rhs = id.scale(&alpha).add(&e.scale(&beta))?;
    if rhs != c {
        return Err(TensorError::Structural(
            "crossing is not a combination of identity and cup∘cap".into(),
        ));
    }
    Ok((alpha, beta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r_entry_middle_block() {
        assert_eq!(r_matrix().entry(&[M, P], &[M, P]), &q(-1));
        assert_eq!(r_matrix().entry(&[M, P], &[P, M]), &(&q(1) - &q(-3)));
    }

    #[test]
    fn r_inverse_is_inverse() {
        let id = Tensor::identity(2);
        assert_eq!(Tensor::compose(&r_matrix(), &r_inverse()).unwrap(), id);
        assert_eq!(r_matrix().inverse().unwrap(), r_inverse());
    }

    #[test]
    fn d_entries() {
        assert_eq!(d_map().entry(&[P], &[M]), &-&qh(5));
        assert_eq!(d_map().entry(&[M], &[P]), &qh(1));
        // ᵗD = g·D
        assert_eq!(Tensor::compose(&pivotal(), &d_map()).unwrap(), d_transpose());
    }

    #[test]
    fn loop_and_zigzags() {
        let lp = Tensor::compose(&cap(), &cup()).unwrap();
        assert_eq!(lp.as_scalar().unwrap(), &(&-&q(2) - &q(-2)));
        let id1 = Tensor::identity(1);
        let z1 = Tensor::compose(&Tensor::hcat(&cap(), &id1), &Tensor::hcat(&id1, &cup())).unwrap();
        let z2 = Tensor::compose(&Tensor::hcat(&id1, &cap()), &Tensor::hcat(&cup(), &id1)).unwrap();
        assert_eq!(z1, id1);
        assert_eq!(z2, id1);
    }

    #[test]
    fn braid_relation_and_r2() {
        let c = cross_pos();
        let id1 = Tensor::identity(1);
        let a = Tensor::hcat(&c, &id1);
        let b = Tensor::hcat(&id1, &c);
        let lhs = Tensor::compose_chain(&[a.clone(), b.clone(), a.clone()]).unwrap();
        let rhs = Tensor::compose_chain(&[b.clone(), a, b]).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(
            Tensor::compose(&cross_pos(), &cross_neg()).unwrap(),
            Tensor::identity(2)
        );
    }

    #[test]
    fn kauffman_constants() {
        let (a, b) = kauffman_solve().unwrap();
        assert_eq!(a, q(1));
        assert_eq!(b, q(-1));
        // -α² - α^{-2} is the loop value
        let lp = Tensor::compose(&cap(), &cup()).unwrap();
        let ainv = a.unit_inverse().unwrap();
        assert_eq!(&-&(&a * &a) - &(&ainv * &ainv), *lp.as_scalar().unwrap());
    }

    #[test]
    fn hcat_layout_is_little_endian() {
        let t = Tensor::hcat(&d_map(), &Tensor::identity(1));
        // out (+, -) <- in (-, -)
        assert_eq!(t.entry(&[P, M], &[M, M]), &-&qh(5));
    }

    #[test]
    fn unknown_builtin() {
        assert!(matches!(Tensor::builtin("s"), Err(TensorError::UnknownBuiltin(_))));
        assert_eq!(Tensor::builtin("id(3)").unwrap(), Tensor::identity(3));
    }
}
