//! Straightening engine for one 2×2 generator matrix.
//!
//! A "handle algebra" is generated by the four entries `X^s_t` of a single
//! matrix subject to sixteen quadratic matrix-relation components and a
//! determinant relation `X^-_- X^+_+ = 1 + λ X^-_+ X^+_-`. Both `O_{q²}`
//! and each handle of `L_{g,n}` are instances.
//!
//! Generator code: `gi = 2s + t` for `X^s_t`, so `a = X^-_- = 0`,
//! `b = X^-_+ = 1`, `c = X^+_- = 2`, `d = X^+_+ = 3`. PBW order is
//! `b ≺ a ≺ d ≺ c`; a monomial stores exponents by PBW position.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use crate::coeff_ring::{LaurentScalar, Ring, Scalar};
use crate::linalg::solve_pivot_columns;
use crate::polymat::Poly;

/// Exponents in PBW position order `[b, a, d, c]`.
pub type HMono = [u16; 4];

pub const GEN_A: u8 = 0;
pub const GEN_B: u8 = 1;
pub const GEN_C: u8 = 2;
pub const GEN_D: u8 = 3;

/// PBW position of a generator code.
pub const fn pos(gi: u8) -> usize {
    match gi {
        GEN_B => 0,
        GEN_A => 1,
        GEN_D => 2,
        _ => 3,
    }
}

/// Generator code at a PBW position.
pub const fn gen_at(p: usize) -> u8 {
    match p {
        0 => GEN_B,
        1 => GEN_A,
        2 => GEN_D,
        _ => GEN_C,
    }
}

pub fn gi_of(s: usize, t: usize) -> u8 {
    (2 * s + t) as u8
}

pub fn state_pair(gi: u8) -> (usize, usize) {
    ((gi >> 1) as usize, (gi & 1) as usize)
}

pub fn mono_degree(m: &HMono) -> u32 {
    m.iter().map(|&e| e as u32).sum()
}

/// Letters of a monomial in PBW order.
pub fn mono_word(m: &HMono) -> Vec<u8> {
    let mut w = Vec::with_capacity(mono_degree(m) as usize);
    for p in 0..4 {
        for _ in 0..m[p] {
            w.push(gen_at(p));
        }
    }
    w
}

pub type HElem = Vec<(HMono, Scalar)>;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum PbwError {
    #[error("straightening exceeded the step bound ({0} nested rewrites)")]
    StepBound(usize),
    #[error("relation system could not be oriented: {0}")]
    Orientation(String),
}

const DEPTH_BOUND: usize = 20_000;

pub(crate) fn acc<K: Ord>(map: &mut BTreeMap<K, Scalar>, k: K, c: Scalar) {
    use std::collections::btree_map::Entry;
    if c.is_zero() {
        return;
    }
    match map.entry(k) {
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

/// Quadratic straightening rules `y·x → Σ c·w` for out-of-order pairs,
/// derived from relation components over a single matrix.
#[derive(Clone, Debug)]
pub struct QuadraticRules {
    /// `rules[y][x]` for `pos(y) > pos(x)`.
    pub rules: [[Vec<(LaurentScalar, Vec<u8>)>; 4]; 4],
    /// `λ` in `a·d = 1 + λ·b·c`.
    pub qdet_lambda: LaurentScalar,
}

impl QuadraticRules {
    /// Orient sixteen homogeneous quadratic relation components (words of
    /// generator codes) by solving for the six out-of-order monomials.
    pub fn derive(components: &[Poly<u8>], qdet_lambda: LaurentScalar) -> Result<Self, PbwError> {
        let mut bad: Vec<Vec<u8>> = Vec::new();
        let mut good: Vec<Vec<u8>> = Vec::new();
        for y in 0..4u8 {
            for x in 0..4u8 {
                let w = vec![y, x];
                if pos(y) > pos(x) {
                    bad.push(w);
                } else {
                    good.push(w);
                }
            }
        }
        let cols: Vec<Vec<u8>> = bad.iter().chain(good.iter()).cloned().collect();
        let rows: Vec<Vec<LaurentScalar>> = components
            .iter()
            .filter(|p| !p.is_empty())
            .map(|p| {
                if p.keys().any(|w| w.len() != 2) {
                    return Err(PbwError::Orientation("non-quadratic component".into()));
                }
                Ok(cols.iter().map(|w| p.get(w).cloned().unwrap_or_default()).collect())
            })
            .collect::<Result<_, _>>()?;
        let sol = solve_pivot_columns(rows, bad.len())
            .ok_or_else(|| PbwError::Orientation("pivot block singular over the Laurent ring".into()))?;
        let mut rules: [[Vec<(LaurentScalar, Vec<u8>)>; 4]; 4] = Default::default();
        for (w, row) in bad.iter().zip(sol) {
            rules[w[0] as usize][w[1] as usize] = good
                .iter()
                .zip(row)
                .filter(|(_, c)| !c.is_zero())
                .map(|(g, c)| (c, g.clone()))
                .collect();
        }
        Ok(Self { rules, qdet_lambda })
    }
}

/// Normal-form multiplication for one matrix's generators over a fixed ring.
///
/// In restricted mode (`restricted = Some(p)`) `X^-_-` is eliminated via
/// `X^-_- = (1 + λ X^-_+X^+_-)(X^+_+)^{2p−1}` and exponents are truncated by
/// `(X^-_+)^p = (X^+_-)^p = 0`, `(X^+_+)^{2p} = 1`.
pub struct HandleAlgebra {
    ring: Ring,
    restricted: Option<u32>,
    rules: [[Vec<(Scalar, Vec<u8>)>; 4]; 4],
    lambda: Scalar,
    cache: Mutex<HashMap<(HMono, u8), Arc<HElem>>>,
}

impl HandleAlgebra {
    pub fn new(q: &QuadraticRules, ring: Ring, restricted: Option<u32>) -> Self {
        let mut rules: [[Vec<(Scalar, Vec<u8>)>; 4]; 4] = Default::default();
        for y in 0..4 {
            for x in 0..4 {
                rules[y][x] = q.rules[y][x]
                    .iter()
                    .map(|(c, w)| (Scalar::from_laurent(c, ring), w.clone()))
                    .collect();
            }
        }
        Self {
            ring,
            restricted,
            rules,
            lambda: Scalar::from_laurent(&q.qdet_lambda, ring),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn restricted(&self) -> Option<u32> {
        self.restricted
    }

    pub fn one(&self) -> HElem {
        vec![([0; 4], Scalar::one(self.ring))]
    }

    /// Whether a monomial is in the normal-form basis.
    pub fn is_normal(&self, m: &HMono) -> bool {
        match self.restricted {
            None => m[1] == 0 || m[2] == 0,
            Some(p) => m[1] == 0 && (m[0] as u32) < p && (m[3] as u32) < p && (m[2] as u32) < 2 * p,
        }
    }

    /// `μ · X^{gi}` in normal form.
    pub fn mul_gen(&self, m: &HMono, gi: u8) -> Result<Arc<HElem>, PbwError> {
        self.mul_gen_depth(m, gi, 0)
    }

    fn mul_gen_depth(&self, m: &HMono, gi: u8, depth: usize) -> Result<Arc<HElem>, PbwError> {
        if depth > DEPTH_BOUND {
            return Err(PbwError::StepBound(depth));
        }
        if let Some(r) = self.cache.lock().unwrap().get(&(*m, gi)) {
            return Ok(r.clone());
        }
        let r = Arc::new(self.compute(m, gi, depth)?);
        self.cache.lock().unwrap().insert((*m, gi), r.clone());
        Ok(r)
    }

    fn a_expansion(&self, p: u32) -> Vec<(Scalar, Vec<u8>)> {
        let dpow: Vec<u8> = vec![GEN_D; (2 * p - 1) as usize];
        let mut w2 = vec![GEN_B, GEN_C];
        w2.extend(&dpow);
        vec![(Scalar::one(self.ring), dpow), (self.lambda.clone(), w2)]
    }

    fn compute(&self, m: &HMono, gi: u8, depth: usize) -> Result<HElem, PbwError> {
        if let (Some(p), GEN_A) = (self.restricted, gi) {
            return self.mul_words(m, &self.a_expansion(p), depth);
        }
        let px = pos(gi);
        let py = (0..4).rev().find(|&i| m[i] > 0);
        match py {
            Some(py) if py > px => {
                let y = gen_at(py);
                let mut mp = *m;
                mp[py] -= 1;
                self.mul_words(&mp, &self.rules[y as usize][gi as usize], depth)
            }
            Some(1) if gi == GEN_D && self.restricted.is_none() => {
                let mut mp = *m;
                mp[1] -= 1;
                let words = vec![
                    (Scalar::one(self.ring), vec![]),
                    (self.lambda.clone(), vec![GEN_B, GEN_C]),
                ];
                self.mul_words(&mp, &words, depth)
            }
            _ => {
                let mut r = *m;
                r[px] += 1;
                if let Some(p) = self.restricted {
                    match px {
                        0 | 3 if r[px] as u32 >= p => return Ok(Vec::new()),
                        2 if r[px] as u32 >= 2 * p => r[px] = 0,
                        _ => {}
                    }
                }
                Ok(vec![(r, Scalar::one(self.ring))])
            }
        }
    }

    fn mul_words(&self, m: &HMono, words: &[(Scalar, Vec<u8>)], depth: usize) -> Result<HElem, PbwError> {
        let mut total: BTreeMap<HMono, Scalar> = BTreeMap::new();
        for (c, w) in words {
            let mut cur: BTreeMap<HMono, Scalar> = BTreeMap::new();
            cur.insert(*m, c.clone());
            for &g in w {
                let mut next = BTreeMap::new();
                for (mm, cc) in &cur {
                    for (r, rc) in self.mul_gen_depth(mm, g, depth + 1)?.iter() {
                        acc(&mut next, *r, cc * rc);
                    }
                }
                cur = next;
            }
            for (k, v) in cur {
                acc(&mut total, k, v);
            }
        }
        Ok(total.into_iter().collect())
    }

    /// Normal form of a word of generator codes.
    pub fn normal_form(&self, word: &[u8]) -> Result<HElem, PbwError> {
        self.mul_words(&[0; 4], &[(Scalar::one(self.ring), word.to_vec())], 0)
    }

    /// Product of two normal monomials.
    pub fn mul_mono(&self, a: &HMono, b: &HMono) -> Result<HElem, PbwError> {
        self.mul_words(a, &[(Scalar::one(self.ring), mono_word(b))], 0)
    }

    /// Product of two elements.
    pub fn mul(&self, x: &HElem, y: &HElem) -> Result<HElem, PbwError> {
        let mut total = BTreeMap::new();
        for (a, ca) in x {
            for (b, cb) in y {
                let c = ca * cb;
                for (m, cm) in self.mul_mono(a, b)? {
                    acc(&mut total, m, &c * &cm);
                }
            }
        }
        Ok(total.into_iter().collect())
    }

    /// All basis monomials in restricted mode.
    pub fn restricted_basis(&self) -> Option<Vec<HMono>> {
        let p = self.restricted? as u16;
        let mut v = Vec::new();
        for b in 0..p {
            for d in 0..2 * p {
                for c in 0..p {
                    v.push([b, 0, d, c]);
                }
            }
        }
        Some(v)
    }
}

/// Solve for the 2×2 matrix `Y` with `X·Y = Y·X = 1`, each entry of `Y` a
/// Laurent combination of single generators.
///
/// The sixteen unknown coefficients are determined by expanding both
/// products in normal form and solving the resulting linear system.
pub fn solve_inverse_matrix(alg: &HandleAlgebra) -> Result<[[Vec<(LaurentScalar, u8)>; 2]; 2], PbwError> {
    if alg.ring() != Ring::Laurent {
        return Err(PbwError::Orientation("inverse solve needs the generic ring".into()));
    }
    // Unknown x[(k,j),g]: coefficient of generator g in Y^k_j; column (2k+j)*4+g.
    // Last column is the constant (identity) term.
    let n_unknown = 16;
    let mut rows: BTreeMap<(u8, usize, usize, HMono), Vec<LaurentScalar>> = BTreeMap::new();
    let mut row = |key, col: usize, c: &Scalar| {
        let r = rows
            .entry(key)
            .or_insert_with(|| vec![LaurentScalar::zero(); n_unknown + 1]);
        r[col] = &r[col] + c.as_laurent().expect("generic ring");
    };
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for g in 0..4u8 {
                    let col = (2 * k + j) * 4 + g as usize;
                    // (X·Y)^i_j ∋ X^i_k · Y^k_j
                    for (m, c) in alg.normal_form(&[gi_of(i, k), g])? {
                        row((0, i, j, m), col, &c);
                    }
                    // (Y·X)^j_i ∋ Y^j_k... rewritten with Y^k_j on the left: (Y·X)^k'_i uses Y^{k'}_{j'}
                    let col2 = (2 * i + k) * 4 + g as usize;
                    for (m, c) in alg.normal_form(&[g, gi_of(k, j)])? {
                        row((1, i, j, m), col2, &c);
                    }
                }
            }
            let one = Scalar::one(Ring::Laurent);
            if i == j {
                row((0, i, j, [0; 4]), n_unknown, &(-&one));
                row((1, i, j, [0; 4]), n_unknown, &(-&one));
            }
        }
    }
    let rows: Vec<Vec<LaurentScalar>> = rows.into_values().collect();
    let sol = solve_pivot_columns(rows.clone(), n_unknown)
        .ok_or_else(|| PbwError::Orientation("inverse matrix system singular".into()))?;
    // Check residual consistency: substituting the solution must satisfy every row.
    for r in &rows {
        let mut s = r[n_unknown].clone();
        for (c, x) in sol.iter().enumerate() {
            s = &s + &(&r[c] * &x[0]);
        }
        if !s.is_zero() {
            return Err(PbwError::Orientation("inverse matrix system inconsistent".into()));
        }
    }
    let mut out: [[Vec<(LaurentScalar, u8)>; 2]; 2] = Default::default();
    for k in 0..2 {
        for j in 0..2 {
            for g in 0..4u8 {
                let x = &sol[(2 * k + j) * 4 + g as usize][0];
                if !x.is_zero() {
                    out[k][j].push((x.clone(), g));
                }
            }
        }
    }
    Ok(out)
}
