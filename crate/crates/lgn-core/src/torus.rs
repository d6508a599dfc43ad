//! The finite-dimensional representation of the torus skein algebra at
//! `q = ε = e^{iπ/2p}` on the space of symmetric linear forms of the
//! restricted quantum group, in the GTA basis
//! `χ⁺₁, χ⁻₁, …, χ⁺_p, χ⁻_p, G₁, …, G_{p−1}`.
//!
//! The actions of the two generating loops `a` and `b` are given by closed
//! formulas; this module builds their matrices exactly over `Q(ζ_{8p})` and
//! checks the composition series `J₁ ⊂ J₂ ⊂ J₃`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::coeff_ring::{quantum_integer, CoeffError, CycloScalar, Ring};

#[derive(Debug, Error)]
pub enum TorusError {
    #[error("p must be at least 2, got {0}")]
    InvalidP(u32),
    #[error("vector of length {found} for p = {p}; expected {expected}")]
    Length { p: u32, expected: usize, found: usize },
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// Sign label of a simple character.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// The two generating loops of the torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TorusGen {
    A,
    B,
}

impl TorusGen {
    pub fn parse(c: char) -> Option<Self> {
        match c {
            'a' | 'A' => Some(TorusGen::A),
            'b' | 'B' => Some(TorusGen::B),
            _ => None,
        }
    }
}

fn check_p(p: u32) -> Result<(), TorusError> {
    if p < 2 {
        return Err(TorusError::InvalidP(p));
    }
    Ok(())
}

/// Dimension `3p − 1` of the space.
pub fn slf_dim(p: u32) -> usize {
    3 * p as usize - 1
}

/// Index of `χ^α_s` (`1 ≤ s ≤ p`) in the GTA basis.
pub fn chi_index(alpha: Sign, s: u32) -> usize {
    2 * (s as usize - 1) + usize::from(alpha == Sign::Minus)
}

/// Index of `G_s` (`1 ≤ s ≤ p − 1`) in the GTA basis.
pub fn g_index(p: u32, s: u32) -> usize {
    2 * p as usize + s as usize - 1
}

/// Name of a GTA basis vector.
pub fn basis_name(p: u32, i: usize) -> String {
    let p = p as usize;
    if i < 2 * p {
        let sign = if i.is_multiple_of(2) { '+' } else { '-' };
        format!("chi{sign}{}", i / 2 + 1)
    } else {
        format!("G{}", i - 2 * p + 1)
    }
}

/// A symmetric linear form, by coordinates in the GTA basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SLFVector {
    p: u32,
    coords: Vec<CycloScalar>,
}

impl SLFVector {
    pub fn zero(p: u32) -> Result<Self, TorusError> {
        check_p(p)?;
        Ok(Self {
            p,
            coords: vec![CycloScalar::zero(p); slf_dim(p)],
        })
    }

    /// The `i`-th GTA basis vector.
    pub fn basis(p: u32, i: usize) -> Result<Self, TorusError> {
        let mut v = Self::zero(p)?;
        if i >= v.coords.len() {
            return Err(TorusError::Length {
                p,
                expected: slf_dim(p),
                found: i + 1,
            });
        }
        v.coords[i] = CycloScalar::one(p);
        Ok(v)
    }

    pub fn chi(p: u32, alpha: Sign, s: u32) -> Result<Self, TorusError> {
        Self::basis(p, chi_index(alpha, s))
    }

    pub fn g(p: u32, s: u32) -> Result<Self, TorusError> {
        Self::basis(p, g_index(p, s))
    }

    pub fn from_coords(p: u32, coords: Vec<CycloScalar>) -> Result<Self, TorusError> {
        check_p(p)?;
        if coords.len() != slf_dim(p) {
            return Err(TorusError::Length {
                p,
                expected: slf_dim(p),
                found: coords.len(),
            });
        }
        Ok(Self { p, coords })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coords(&self) -> &[CycloScalar] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            p: self.p,
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &CycloScalar) -> Self {
        Self {
            p: self.p,
            coords: self.coords.iter().map(|a| a * c).collect(),
        }
    }
}

impl fmt::Display for SLFVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_one() {
                write!(f, "{}", basis_name(self.p, i))?;
            } else {
                write!(f, "({c})*{}", basis_name(self.p, i))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A square matrix over `Q(ζ_{8p})`; row `i` is the image of basis vector `i`.
pub type CycloMatrix = Vec<Vec<CycloScalar>>;

fn qint(p: u32, k: u32) -> CycloScalar {
    quantum_integer(k, Ring::Cyclo(p))
        .as_cyclo()
        .cloned()
        .expect("cyclotomic ring")
}

/// `ε^{2s} + ε^{−2s}`.
fn trace_eps(p: u32, s: u32) -> CycloScalar {
    &CycloScalar::eps_pow(p, 2 * s as i64) + &CycloScalar::eps_pow(p, -2 * s as i64)
}

/// The exact `a`-eigenvalue `−α(ε^{2s} + ε^{−2s})` of `χ^α_s`.
pub fn chi_a_eigenvalue(p: u32, alpha: Sign, s: u32) -> CycloScalar {
    &trace_eps(p, s) * &CycloScalar::from_int(p, -alpha.value())
}

/// The matrix of `◁ W(gen)`.
pub fn action_matrix(p: u32, gen: TorusGen) -> Result<CycloMatrix, TorusError> {
    check_p(p)?;
    let n = slf_dim(p);
    let mut m = vec![vec![CycloScalar::zero(p); n]; n];
    let one = CycloScalar::one(p);
    match gen {
        TorusGen::A => {
            for s in 1..=p {
                for alpha in [Sign::Plus, Sign::Minus] {
                    let i = chi_index(alpha, s);
                    m[i][i] = chi_a_eigenvalue(p, alpha, s);
                }
            }
            // (ε² − ε^{−2})²
            let d = &CycloScalar::eps_pow(p, 2) - &CycloScalar::eps_pow(p, -2);
            let d2 = &d * &d;
            for s in 1..p {
                let i = g_index(p, s);
                m[i][i] = -&trace_eps(p, s);
                m[i][chi_index(Sign::Plus, s)] = -&d2;
                m[i][chi_index(Sign::Minus, p - s)] = -&d2;
            }
        }
        TorusGen::B => {
            let two = CycloScalar::from_int(p, 2);
            for alpha in [Sign::Plus, Sign::Minus] {
                for s in 1..=p {
                    let i = chi_index(alpha, s);
                    if s == p {
                        add_to(&mut m[i][chi_index(alpha, p - 1)], &two);
                        add_to(&mut m[i][chi_index(alpha.flip(), 1)], &two);
                    } else {
                        if s > 1 {
                            add_to(&mut m[i][chi_index(alpha, s - 1)], &one);
                        }
                        add_to(&mut m[i][chi_index(alpha, s + 1)], &one);
                    }
                }
            }
            for s in 1..p {
                let i = g_index(p, s);
                if p == 2 {
                    // G₁ ◁ b = [2]G₂ with [2] = 0 and no G₂
                    continue;
                }
                if s == 1 {
                    m[i][g_index(p, 2)] = qint(p, 2);
                } else if s == p - 1 {
                    m[i][g_index(p, p - 2)] = qint(p, 2);
                } else {
                    let inv = qint(p, s).inv()?;
                    m[i][g_index(p, s - 1)] = &qint(p, s - 1) * &inv;
                    m[i][g_index(p, s + 1)] = &qint(p, s + 1) * &inv;
                }
            }
        }
    }
    Ok(m)
}

fn add_to(x: &mut CycloScalar, y: &CycloScalar) {
    *x = &*x + y;
}

/// `v ◁ W(gen)`.
pub fn act_generator(gen: TorusGen, v: &SLFVector) -> Result<SLFVector, TorusError> {
    let m = action_matrix(v.p, gen)?;
    Ok(SLFVector {
        p: v.p,
        coords: row_times(&v.coords, &m),
    })
}

/// `v ◁ W(w₁) ◁ W(w₂) ◁ …`, left to right.
pub fn act_word(word: &[TorusGen], v: &SLFVector) -> Result<SLFVector, TorusError> {
    let ma = action_matrix(v.p, TorusGen::A)?;
    let mb = action_matrix(v.p, TorusGen::B)?;
    let mut cur = v.coords.clone();
    for g in word {
        cur = row_times(&cur, if *g == TorusGen::A { &ma } else { &mb });
    }
    Ok(SLFVector { p: v.p, coords: cur })
}

fn row_times(v: &[CycloScalar], m: &CycloMatrix) -> Vec<CycloScalar> {
    let p = m.first().and_then(|r| r.first()).map_or(2, |c| c.p());
    let mut out = vec![CycloScalar::zero(p); m.first().map_or(0, |r| r.len())];
    for (vi, row) in v.iter().zip(m) {
        if vi.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(row) {
            if !x.is_zero() {
                *o = &*o + &(vi * x);
            }
        }
    }
    out
}

fn mat_mul(a: &CycloMatrix, b: &CycloMatrix) -> CycloMatrix {
    a.iter().map(|row| row_times(row, b)).collect()
}

/// Gauss–Jordan inverse; `None` if singular.
fn mat_inverse(m: &CycloMatrix) -> Result<Option<CycloMatrix>, TorusError> {
    let n = m.len();
    if n == 0 {
        return Ok(Some(Vec::new()));
    }
    let p = m[0][0].p();
    let mut a: Vec<Vec<CycloScalar>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    CycloScalar::one(p)
                } else {
                    CycloScalar::zero(p)
                }
            }));
            r
        })
        .collect();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Ok(None);
        };
        a.swap(col, piv);
        let inv = a[col][col].inv()?;
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        let prow = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
        }
    }
    Ok(Some(a.into_iter().map(|r| r[n..].to_vec()).collect()))
}

/// Incremental row echelon basis of a subspace of `Q(ζ_{8p})^n`.
struct Echelon {
    rows: Vec<(usize, Vec<CycloScalar>)>,
}

impl Echelon {
    fn new() -> Self {
        Self { rows: Vec::new() }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Insert `v`; returns whether the span grew.
    fn insert(&mut self, mut v: Vec<CycloScalar>) -> Result<bool, TorusError> {
        for (piv, row) in &self.rows {
            if !v[*piv].is_zero() {
                let f = v[*piv].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x = &*x - &(&f * y);
                    }
                }
            }
        }
        let Some(piv) = v.iter().position(|x| !x.is_zero()) else {
            return Ok(false);
        };
        let inv = v[piv].inv()?;
        for x in v.iter_mut() {
            *x = &*x * &inv;
        }
        self.rows.push((piv, v));
        Ok(true)
    }
}

/// Labels of the composition factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FactorLabel {
    J1,
    J2modJ1,
    J3modJ2,
}

impl fmt::Display for FactorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FactorLabel::J1 => "J1",
            FactorLabel::J2modJ1 => "J2/J1",
            FactorLabel::J3modJ2 => "J3/J2",
        })
    }
}

/// A composition factor: its label and the rows of the adapted basis it spans.
#[derive(Clone, Debug)]
pub struct FactorSpec {
    pub label: FactorLabel,
    /// Basis vectors in GTA coordinates.
    pub basis: Vec<SLFVector>,
}

/// `V₁ = span(χ⁺_s + χ⁻_{p−s}, χ⁺_p, χ⁻_p)`, `V₂ = span(χ⁺_s)`, `V₃ = span(G_s)`.
pub fn factor_specs(p: u32) -> Result<[FactorSpec; 3], TorusError> {
    check_p(p)?;
    let mut v1 = Vec::new();
    for s in 1..p {
        v1.push(SLFVector::chi(p, Sign::Plus, s)?.add(&SLFVector::chi(p, Sign::Minus, p - s)?));
    }
    v1.push(SLFVector::chi(p, Sign::Plus, p)?);
    v1.push(SLFVector::chi(p, Sign::Minus, p)?);
    let v2 = (1..p)
        .map(|s| SLFVector::chi(p, Sign::Plus, s))
        .collect::<Result<_, _>>()?;
    let v3 = (1..p).map(|s| SLFVector::g(p, s)).collect::<Result<_, _>>()?;
    Ok([
        FactorSpec {
            label: FactorLabel::J1,
            basis: v1,
        },
        FactorSpec {
            label: FactorLabel::J2modJ1,
            basis: v2,
        },
        FactorSpec {
            label: FactorLabel::J3modJ2,
            basis: v3,
        },
    ])
}

/// Burnside data for one factor.
#[derive(Clone, Debug, Serialize)]
pub struct BurnsideResult {
    pub label: FactorLabel,
    pub dim: usize,
    /// Dimension of the span of all words in the two factor matrices.
    pub span_dim: usize,
    /// Longest word length needed before the span stabilized.
    pub word_length: usize,
    /// `span_dim == dim²`.
    pub absolutely_irreducible: bool,
    /// Set when the span falls short of `dim²`.
    pub diagnostic: Option<String>,
}

/// One row of the `a`-eigenvalue table.
#[derive(Clone, Debug, Serialize)]
pub struct EigenvalueRow {
    pub vector: String,
    /// Exact value, power basis in `ζ_{8p}`.
    pub exact: String,
    /// Numerical value (real part; the imaginary part vanishes).
    pub approx: f64,
    /// Whether the matrix entry equals `−α(ε^{2s} + ε^{−2s})` and the row is otherwise zero.
    pub matches: bool,
}

/// The composition-series report.
#[derive(Clone, Debug, Serialize)]
pub struct CompositionReport {
    pub p: u32,
    pub dim: usize,
    pub factor_dims: Vec<usize>,
    pub j1_invariant: bool,
    pub j2_invariant: bool,
    pub burnside: Vec<BurnsideResult>,
    pub eigenvalues: Vec<EigenvalueRow>,
    pub eigenvalues_ok: bool,
    pub composition_series: bool,
}

/// The adapted basis matrix: rows `V₁`, then `V₂`, then `V₃`.
fn adapted_basis(p: u32) -> Result<(CycloMatrix, [usize; 3]), TorusError> {
    let specs = factor_specs(p)?;
    let dims = [specs[0].basis.len(), specs[1].basis.len(), specs[2].basis.len()];
    let rows = specs
        .iter()
        .flat_map(|f| f.basis.iter().map(|v| v.coords.clone()))
        .collect();
    Ok((rows, dims))
}

/// Matrices of `a` and `b` in the adapted basis.
pub fn adapted_action(p: u32) -> Result<([CycloMatrix; 2], [usize; 3]), TorusError> {
    let (pm, dims) = adapted_basis(p)?;
    let pinv = mat_inverse(&pm)?.expect("V₁ ⊕ V₂ ⊕ V₃ is the whole space");
    let na = mat_mul(&mat_mul(&pm, &action_matrix(p, TorusGen::A)?), &pinv);
    let nb = mat_mul(&mat_mul(&pm, &action_matrix(p, TorusGen::B)?), &pinv);
    Ok(([na, nb], dims))
}

fn block(m: &CycloMatrix, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> CycloMatrix {
    rows.map(|r| m[r][cols.clone()].to_vec()).collect()
}

fn block_is_zero(m: &CycloMatrix, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> bool {
    rows.into_iter().all(|r| m[r][cols.clone()].iter().all(|x| x.is_zero()))
}

/// Span of all words in `gens` (including the empty word), grown by word length
/// until no new direction appears.
pub fn word_span(gens: &[CycloMatrix], p: u32) -> Result<(usize, usize), TorusError> {
    let d = gens.first().map_or(0, |m| m.len());
    if d == 0 {
        return Ok((0, 0));
    }
    let id: CycloMatrix = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    if i == j {
                        CycloScalar::one(p)
                    } else {
                        CycloScalar::zero(p)
                    }
                })
                .collect()
        })
        .collect();
    let flat = |m: &CycloMatrix| m.iter().flatten().cloned().collect::<Vec<_>>();
    let mut ech = Echelon::new();
    ech.insert(flat(&id))?;
    let mut frontier = vec![id];
    let mut length = 0;
    while !frontier.is_empty() && ech.dim() < d * d {
        let mut next = Vec::new();
        for w in &frontier {
            for g in gens {
                let x = mat_mul(w, g);
                if ech.insert(flat(&x))? {
                    next.push(x);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        length += 1;
        frontier = next;
    }
    Ok((ech.dim(), length))
}

/// Verify that `J₁ ⊂ J₂ ⊂ J₃` is a composition series, with exact arithmetic.
pub fn composition_series_report(p: u32) -> Result<CompositionReport, TorusError> {
    check_p(p)?;
    let ([na, nb], dims) = adapted_action(p)?;
    let n = slf_dim(p);
    let (e1, e2) = (dims[0], dims[0] + dims[1]);
    let j1_invariant = [&na, &nb].iter().all(|m| block_is_zero(m, 0..e1, e1..n));
    let j2_invariant = [&na, &nb].iter().all(|m| block_is_zero(m, 0..e2, e2..n));
    let ranges = [0..e1, e1..e2, e2..n];
    let specs = factor_specs(p)?;
    let mut burnside = Vec::new();
    for (spec, r) in specs.iter().zip(ranges) {
        let fa = block(&na, r.clone(), r.clone());
        let fb = block(&nb, r.clone(), r.clone());
        let d = r.len();
        let (span_dim, word_length) = word_span(&[fa, fb], p)?;
        let ok = span_dim == d * d;
        burnside.push(BurnsideResult {
            label: spec.label,
            dim: d,
            span_dim,
            word_length,
            absolutely_irreducible: ok,
            diagnostic: (!ok).then(|| {
                format!(
                    "not absolutely irreducible over Q(zeta_{}): word span {span_dim} < {}",
                    8 * p,
                    d * d
                )
            }),
        });
    }
    let ma = action_matrix(p, TorusGen::A)?;
    let mut eigenvalues = Vec::new();
    for s in 1..=p {
        for alpha in [Sign::Plus, Sign::Minus] {
            let i = chi_index(alpha, s);
            let expected = chi_a_eigenvalue(p, alpha, s);
            let matches = ma[i]
                .iter()
                .enumerate()
                .all(|(j, x)| if j == i { *x == expected } else { x.is_zero() });
            eigenvalues.push(EigenvalueRow {
                vector: basis_name(p, i),
                exact: expected.to_string(),
                approx: expected.to_complex().0,
                matches,
            });
        }
    }
    let eigenvalues_ok = eigenvalues.iter().all(|e| e.matches);
    let composition_series = j1_invariant && j2_invariant && burnside.iter().all(|b| b.absolutely_irreducible);
    Ok(CompositionReport {
        p,
        dim: n,
        factor_dims: dims.to_vec(),
        j1_invariant,
        j2_invariant,
        burnside,
        eigenvalues,
        eigenvalues_ok,
        composition_series,
    })
}
