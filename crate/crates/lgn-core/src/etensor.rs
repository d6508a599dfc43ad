//! Sparse tensors with entries in `L_{g,n}`, for fused matrices and
//! diagram evaluation.
//!
//! Products multiply entries in reading order: in `a.matmul(b)` the entries of
//! `a` come first, in `hcat(l, r)` those of `l`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::lgn::{LgnAlgebra, LgnElement, LgnError};
use crate::tensor::{Tensor, TensorError};

#[derive(Clone, Debug)]
pub struct ElemTensor {
    alg: Arc<LgnAlgebra>,
    out_arity: usize,
    in_arity: usize,
    entries: BTreeMap<(usize, usize), LgnElement>,
}

impl PartialEq for ElemTensor {
    fn eq(&self, o: &Self) -> bool {
        self.out_arity == o.out_arity && self.in_arity == o.in_arity && self.entries == o.entries
    }
}

impl ElemTensor {
    pub fn zeros(alg: &Arc<LgnAlgebra>, out_arity: usize, in_arity: usize) -> Self {
        Self {
            alg: alg.clone(),
            out_arity,
            in_arity,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_tensor(alg: &Arc<LgnAlgebra>, t: &Tensor) -> Self {
        let mut r = Self::zeros(alg, t.out_arity(), t.in_arity());
        for (o, i, x) in t.nonzero() {
            r.entries.insert((o, i), LgnElement::from_laurent(alg, x));
        }
        r
    }

    pub fn algebra(&self) -> &Arc<LgnAlgebra> {
        &self.alg
    }

    pub fn out_arity(&self) -> usize {
        self.out_arity
    }

    pub fn in_arity(&self) -> usize {
        self.in_arity
    }

    pub fn get(&self, out: usize, inp: usize) -> LgnElement {
        self.entries
            .get(&(out, inp))
            .cloned()
            .unwrap_or_else(|| LgnElement::zero(&self.alg))
    }

    pub fn set(&mut self, out: usize, inp: usize, x: LgnElement) {
        if x.is_zero() {
            self.entries.remove(&(out, inp));
        } else {
            self.entries.insert((out, inp), x);
        }
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), LgnElement> {
        &self.entries
    }

    /// Matrix product `self · o` (`self` applied last, coefficients of `self` first).
    pub fn matmul(&self, o: &Self) -> Result<Self, LgnError> {
        if self.in_arity != o.out_arity {
            return Err(arity(self.in_arity, o.out_arity));
        }
        let mut by_row: BTreeMap<usize, Vec<(usize, &LgnElement)>> = BTreeMap::new();
        for ((j, k), y) in &o.entries {
            by_row.entry(*j).or_default().push((*k, y));
        }
        let mut r = Self::zeros(&self.alg, self.out_arity, o.in_arity);
        for ((i, j), x) in &self.entries {
            if let Some(row) = by_row.get(j) {
                for (k, y) in row {
                    let p = x.mul(y)?;
                    match r.entries.get_mut(&(*i, *k)) {
                        Some(e) => e.add_assign(&p),
                        None => {
                            r.entries.insert((*i, *k), p);
                        }
                    }
                }
            }
        }
        r.entries.retain(|_, v| !v.is_zero());
        Ok(r)
    }

    /// Tensor product with `left` on the low strands; entries multiply as `left · right`.
    pub fn hcat(left: &Self, right: &Self) -> Result<Self, LgnError> {
        let mut r = Self::zeros(
            &left.alg,
            left.out_arity + right.out_arity,
            left.in_arity + right.in_arity,
        );
        for ((o1, i1), a) in &left.entries {
            for ((o2, i2), b) in &right.entries {
                let p = a.mul(b)?;
                r.set(o1 | (o2 << left.out_arity), i1 | (i2 << left.in_arity), p);
            }
        }
        Ok(r)
    }

    /// Entrywise difference, for equality tests.
    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (k, v) in &o.entries {
            let e = r.get(k.0, k.1).sub(v);
            r.set(k.0, k.1, e);
        }
        r
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

fn arity(top_in: usize, bottom_out: usize) -> LgnError {
    LgnError::Mismatch(
        TensorError::ArityMismatch { top_in, bottom_out }.to_string(),
        "matrix product".into(),
    )
}
