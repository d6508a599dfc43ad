//! The algebra `L_{g,n}(U_{q²})`: generators, defining relations, normal
//! forms, fusion, inversion, coaction, invariants and the restricted quotient.
//!
//! Handles ("slots") are numbered in the global normal order
//! `A(1) … A(g) B(1) … B(g) M(g+1) … M(g+n)`. A normal monomial is one
//! per-handle PBW monomial per slot. Products are computed by passing each
//! new generator leftwards through the later slots with the exchange rules
//! and then straightening inside its own slot.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::coeff_ring::{CoeffError, LaurentScalar, Ring, Scalar};
use crate::etensor::ElemTensor;
use crate::linalg::solve_pivot_columns;
use crate::oq2::{antipode_gen_matrix, oq_algebra};
use crate::pbw::{
    acc, gen_at, gi_of, mono_degree, mono_word, solve_inverse_matrix, state_pair, HMono, HandleAlgebra, PbwError,
    QuadraticRules, GEN_B, GEN_C, GEN_D,
};
use crate::polymat::{Poly, PolyMat};
use crate::tensor::{r21, r_inverse, r_matrix, State, Tensor};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LgnError {
    #[error("degenerate surface: g + n must be at least 1")]
    DegenerateSurface,
    #[error("restricted mode needs p >= 2 (got {0})")]
    BadRootOrder(u32),
    #[error("invalid generator {0} on surface {1}")]
    InvalidGenerator(String, Surface),
    #[error("operands live in different algebras: {0} vs {1}")]
    Mismatch(String, String),
    #[error("parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("operation requires generic mode")]
    NeedsGeneric,
    #[error(transparent)]
    Pbw(#[from] PbwError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// The surface `Σ_{g,n}` (genus `g`, `n` punctures).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Surface {
    pub g: u32,
    pub n: u32,
}

impl Surface {
    pub fn new(g: u32, n: u32) -> Result<Self, LgnError> {
        if g + n == 0 {
            return Err(LgnError::DegenerateSurface);
        }
        Ok(Self { g, n })
    }

    /// Number of generator matrices, `2g + n`.
    pub fn n_slots(&self) -> usize {
        (2 * self.g + self.n) as usize
    }

    /// Slot of a generator matrix in the global normal order.
    pub fn slot_of(&self, family: Family, handle: u32) -> Option<usize> {
        let (g, n) = (self.g, self.n);
        match family {
            Family::A if (1..=g).contains(&handle) => Some((handle - 1) as usize),
            Family::B if (1..=g).contains(&handle) => Some((g + handle - 1) as usize),
            Family::M if (g + 1..=g + n).contains(&handle) => Some((g + handle - 1) as usize),
            _ => None,
        }
    }

    /// Family and handle index of a slot.
    pub fn family_of_slot(&self, slot: usize) -> (Family, u32) {
        let (g, s) = (self.g as usize, slot);
        if s < g {
            (Family::A, (s + 1) as u32)
        } else if s < 2 * g {
            (Family::B, (s - g + 1) as u32)
        } else {
            (Family::M, (s - g + 1) as u32)
        }
    }
}

impl fmt::Display for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.g, self.n)
    }
}

/// Generic `q`, or the restricted quotient at `q = e^{iπ/2p}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Generic,
    Restricted(u32),
}

impl Mode {
    pub fn ring(&self) -> Ring {
        match self {
            Mode::Generic => Ring::Laurent,
            Mode::Restricted(p) => Ring::Cyclo(*p),
        }
    }

    fn restricted(&self) -> Option<u32> {
        match self {
            Mode::Generic => None,
            Mode::Restricted(p) => Some(*p),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Generic => write!(f, "generic"),
            Mode::Restricted(p) => write!(f, "restricted(p={p})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    M,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::M => 'M',
        }
    }
}

/// The generator `X(handle)^row_col`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorId {
    pub family: Family,
    pub handle: u32,
    pub row: State,
    pub col: State,
}

impl GeneratorId {
    pub fn new(family: Family, handle: u32, row: State, col: State) -> Self {
        Self {
            family,
            handle,
            row,
            col,
        }
    }

    fn code(&self) -> u8 {
        gi_of(self.row.index(), self.col.index())
    }
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}[{},{}]",
            self.family.letter(),
            self.handle,
            self.row.symbol(),
            self.col.symbol()
        )
    }
}

// ---------------------------------------------------------------------------
// Relation data
// ---------------------------------------------------------------------------

type PairSym = (u8, u8);

/// Componentwise reflection equation `R X₁ R₂₁ X₂ − X₂ R X₁ R₂₁`.
pub fn reflection_components() -> Vec<Poly<u8>> {
    let r = PolyMat::from_tensor(&r_matrix());
    let r21m = PolyMat::from_tensor(&r21());
    let x1 = PolyMat::first(gi_of);
    let x2 = PolyMat::second(gi_of);
    PolyMat::chain(&[r.clone(), x1.clone(), r21m.clone(), x2.clone()])
        .components_minus(&PolyMat::chain(&[x2, r, x1, r21m]))
}

/// `X^-_- X^+_+ − q⁴ X^-_+ X^+_- − 1`.
pub fn qdet_component() -> Poly<u8> {
    let mut p = Poly::new();
    p.insert(vec![0, 3], LaurentScalar::one());
    p.insert(vec![1, 2], -LaurentScalar::q_pow(4));
    p.insert(vec![], -LaurentScalar::one());
    p
}

/// How two distinct slots `u < v` (normal order) exchange.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Exchange {
    /// `u = A(i)`, `v = B(i)`.
    L10 = 0,
    /// Handle index of `u` below that of `v`.
    LowerFirst = 1,
    /// Handle index of `u` above that of `v`.
    HigherFirst = 2,
}

/// Components of the exchange relation between slot symbols `0 = u`, `1 = v`.
fn exchange_components(kind: Exchange) -> Vec<Poly<PairSym>> {
    let r = PolyMat::from_tensor(&r_matrix());
    let ri = PolyMat::from_tensor(&r_inverse());
    let r21m = PolyMat::from_tensor(&r21());
    match kind {
        Exchange::L10 => {
            // R B₁ R₂₁ A₂ = A₂ R B₁ R^{-1}, with A = u and B = v.
            let b1 = PolyMat::first(|s, t| (1u8, gi_of(s, t)));
            let a2 = PolyMat::second(|s, t| (0u8, gi_of(s, t)));
            PolyMat::chain(&[r.clone(), b1.clone(), r21m, a2.clone()])
                .components_minus(&PolyMat::chain(&[a2, r, b1, ri]))
        }
        Exchange::LowerFirst | Exchange::HigherFirst => {
            // R X₁ R^{-1} Y₂ = Y₂ R X₁ R^{-1}, with X the lower handle index.
            let (xs, ys) = if kind == Exchange::LowerFirst {
                (0u8, 1u8)
            } else {
                (1u8, 0u8)
            };
            let x1 = PolyMat::first(move |s, t| (xs, gi_of(s, t)));
            let y2 = PolyMat::second(move |s, t| (ys, gi_of(s, t)));
            PolyMat::chain(&[r.clone(), x1.clone(), ri.clone(), y2.clone()])
                .components_minus(&PolyMat::chain(&[y2, r, x1, ri]))
        }
    }
}

/// `rules[y][x]`: `v_y · u_x → Σ c · u_{x'} v_{y'}`.
type ExchangeRules<C> = [[Vec<(C, u8, u8)>; 4]; 4];

fn derive_exchange(kind: Exchange) -> Result<ExchangeRules<LaurentScalar>, PbwError> {
    let mut bad = Vec::new();
    let mut good = Vec::new();
    for y in 0..4u8 {
        for x in 0..4u8 {
            bad.push(vec![(1u8, y), (0u8, x)]);
        }
    }
    for x in 0..4u8 {
        for y in 0..4u8 {
            good.push(vec![(0u8, x), (1u8, y)]);
        }
    }
    let cols: Vec<Vec<PairSym>> = bad.iter().chain(good.iter()).cloned().collect();
    let comps = exchange_components(kind);
    let mut rows = Vec::new();
    for p in comps.iter().filter(|p| !p.is_empty()) {
        if p.keys().any(|w| !cols.contains(w)) {
            return Err(PbwError::Orientation("unexpected word in exchange relation".into()));
        }
        rows.push(cols.iter().map(|w| p.get(w).cloned().unwrap_or_default()).collect());
    }
    let sol = solve_pivot_columns(rows, bad.len())
        .ok_or_else(|| PbwError::Orientation("exchange system not solvable over the Laurent ring".into()))?;
    let mut rules: ExchangeRules<LaurentScalar> = Default::default();
    for (w, row) in bad.iter().zip(sol) {
        let (y, x) = (w[0].1 as usize, w[1].1 as usize);
        rules[y][x] = good
            .iter()
            .zip(row)
            .filter(|(_, c)| !c.is_zero())
            .map(|(g, c)| (c, g[0].1, g[1].1))
            .collect();
    }
    Ok(rules)
}

struct RuleData {
    handle: QuadraticRules,
    exchange: [ExchangeRules<LaurentScalar>; 3],
}

fn rule_data() -> &'static RuleData {
    static DATA: OnceLock<RuleData> = OnceLock::new();
    DATA.get_or_init(|| RuleData {
        handle: QuadraticRules::derive(&reflection_components(), LaurentScalar::q_pow(4))
            .expect("reflection equation orients over the Laurent ring"),
        exchange: [
            derive_exchange(Exchange::L10).expect("exchange relation orients"),
            derive_exchange(Exchange::LowerFirst).expect("exchange relation orients"),
            derive_exchange(Exchange::HigherFirst).expect("exchange relation orients"),
        ],
    })
}

fn handle_algebra(mode: Mode) -> Arc<HandleAlgebra> {
    static REG: OnceLock<Mutex<HashMap<Mode, Arc<HandleAlgebra>>>> = OnceLock::new();
    let reg = REG.get_or_init(|| Mutex::new(HashMap::new()));
    reg.lock()
        .unwrap()
        .entry(mode)
        .or_insert_with(|| Arc::new(HandleAlgebra::new(&rule_data().handle, mode.ring(), mode.restricted())))
        .clone()
}

// ---------------------------------------------------------------------------
// The algebra
// ---------------------------------------------------------------------------

/// A normal monomial: one per-handle PBW monomial per slot.
pub type Mono = Vec<HMono>;

type PassResult = Arc<Vec<(u8, HMono, Scalar)>>;

/// Rewriting data for one `(surface, mode)`; shared by all its elements.
pub struct LgnAlgebra {
    surface: Surface,
    mode: Mode,
    handle: Arc<HandleAlgebra>,
    exchange: [ExchangeRules<Scalar>; 3],
    pass_cache: Mutex<HashMap<(u8, HMono, u8), PassResult>>,
    fused_cache: Mutex<HashMap<(usize, usize), Arc<ElemTensor>>>,
}

impl fmt::Debug for LgnAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{} [{}]", self.surface, self.mode)
    }
}

impl LgnAlgebra {
    /// The shared algebra for `(surface, mode)`.
    pub fn get(surface: Surface, mode: Mode) -> Result<Arc<LgnAlgebra>, LgnError> {
        if surface.g + surface.n == 0 {
            return Err(LgnError::DegenerateSurface);
        }
        if let Mode::Restricted(p) = mode {
            if p < 2 {
                return Err(LgnError::BadRootOrder(p));
            }
        }
        static REG: OnceLock<Mutex<HashMap<(Surface, Mode), Arc<LgnAlgebra>>>> = OnceLock::new();
        let reg = REG.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(a) = reg.lock().unwrap().get(&(surface, mode)) {
            return Ok(a.clone());
        }
        let ring = mode.ring();
        let conv = |r: &ExchangeRules<LaurentScalar>| -> ExchangeRules<Scalar> {
            std::array::from_fn(|y| {
                std::array::from_fn(|x| {
                    r[y][x]
                        .iter()
                        .map(|(c, a, b)| (Scalar::from_laurent(c, ring), *a, *b))
                        .collect()
                })
            })
        };
        let data = rule_data();
        let alg = Arc::new(LgnAlgebra {
            surface,
            mode,
            handle: handle_algebra(mode),
            exchange: [
                conv(&data.exchange[0]),
                conv(&data.exchange[1]),
                conv(&data.exchange[2]),
            ],
            pass_cache: Mutex::new(HashMap::new()),
            fused_cache: Mutex::new(HashMap::new()),
        });
        Ok(reg.lock().unwrap().entry((surface, mode)).or_insert(alg).clone())
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn ring(&self) -> Ring {
        self.mode.ring()
    }

    pub fn n_slots(&self) -> usize {
        self.surface.n_slots()
    }

    pub fn handle_algebra(&self) -> &HandleAlgebra {
        &self.handle
    }

    pub fn slot(&self, id: &GeneratorId) -> Result<usize, LgnError> {
        self.surface
            .slot_of(id.family, id.handle)
            .ok_or_else(|| LgnError::InvalidGenerator(id.to_string(), self.surface))
    }

    /// Generator of a slot with per-handle code `gi = 2·row + col`.
    pub fn generator_id(&self, slot: usize, gi: u8) -> GeneratorId {
        let (family, handle) = self.surface.family_of_slot(slot);
        let (s, t) = state_pair(gi);
        GeneratorId::new(family, handle, State::from_index(s), State::from_index(t))
    }

    fn exchange_kind(&self, u: usize, v: usize) -> Exchange {
        let (fu, iu) = self.surface.family_of_slot(u);
        let (fv, iv) = self.surface.family_of_slot(v);
        if fu == Family::A && fv == Family::B && iu == iv {
            Exchange::L10
        } else if iu < iv {
            Exchange::LowerFirst
        } else {
            Exchange::HigherFirst
        }
    }

    /// `μ_v · x_u = Σ c · x'_u · ν_v` for a later-slot monomial `μ_v`.
    fn pass(&self, kind: Exchange, mu: &HMono, x: u8) -> Result<PassResult, PbwError> {
        let one = Scalar::one(self.ring());
        if *mu == [0; 4] {
            return Ok(Arc::new(vec![(x, [0; 4], one)]));
        }
        let key = (kind as u8, *mu, x);
        if let Some(r) = self.pass_cache.lock().unwrap().get(&key) {
            return Ok(r.clone());
        }
        let py = (0..4).rev().find(|&i| mu[i] > 0).expect("nonzero monomial");
        let y = gen_at(py);
        let mut rest = *mu;
        rest[py] -= 1;
        let mut out: BTreeMap<(u8, HMono), Scalar> = BTreeMap::new();
        for (c, x1, y1) in &self.exchange[kind as usize][y as usize][x as usize] {
            for (x2, nu, c2) in self.pass(kind, &rest, *x1)?.iter() {
                let cc = c * c2;
                for (nu2, c3) in self.handle.mul_gen(nu, *y1)?.iter() {
                    acc(&mut out, (*x2, *nu2), &cc * c3);
                }
            }
        }
        let r: PassResult = Arc::new(out.into_iter().map(|((x, m), c)| (x, m, c)).collect());
        self.pass_cache.lock().unwrap().insert(key, r.clone());
        Ok(r)
    }

    /// `m · X(slot)^{gi}` in normal form.
    pub fn mono_times_gen(&self, m: &Mono, slot: usize, gi: u8) -> Result<Vec<(Mono, Scalar)>, PbwError> {
        let n = self.n_slots();
        let mut cur: Vec<(u8, Mono, Scalar)> = vec![(gi, m.clone(), Scalar::one(self.ring()))];
        for j in (slot + 1..n).rev() {
            if m[j] == [0; 4] {
                continue;
            }
            let kind = self.exchange_kind(slot, j);
            let mut next: BTreeMap<(u8, Mono), Scalar> = BTreeMap::new();
            for (x, mono, c) in cur {
                for (x2, nu, c2) in self.pass(kind, &mono[j], x)?.iter() {
                    let mut mm = mono.clone();
                    mm[j] = *nu;
                    acc(&mut next, (*x2, mm), &c * c2);
                }
            }
            cur = next.into_iter().map(|((x, m), c)| (x, m, c)).collect();
        }
        let mut out: BTreeMap<Mono, Scalar> = BTreeMap::new();
        for (x, mono, c) in cur {
            for (h, c2) in self.handle.mul_gen(&mono[slot], x)?.iter() {
                let mut mm = mono.clone();
                mm[slot] = *h;
                acc(&mut out, mm, &c * c2);
            }
        }
        Ok(out.into_iter().collect())
    }

    fn terms_times_gen(
        &self,
        terms: &BTreeMap<Mono, Scalar>,
        slot: usize,
        gi: u8,
    ) -> Result<BTreeMap<Mono, Scalar>, PbwError> {
        let mut out = BTreeMap::new();
        for (m, c) in terms {
            for (m2, c2) in self.mono_times_gen(m, slot, gi)? {
                acc(&mut out, m2, c * &c2);
            }
        }
        Ok(out)
    }

    fn unit_mono(&self) -> Mono {
        vec![[0; 4]; self.n_slots()]
    }

    /// Letters `(slot, gi)` of a normal monomial, in order.
    pub fn mono_letters(&self, m: &Mono) -> Vec<(usize, u8)> {
        m.iter()
            .enumerate()
            .flat_map(|(s, h)| mono_word(h).into_iter().map(move |g| (s, g)))
            .collect()
    }

    /// Render a monomial as `A1[-,+] B1[+,+]`.
    pub fn mono_name(&self, m: &Mono) -> String {
        self.mono_letters(m)
            .into_iter()
            .map(|(s, g)| self.generator_id(s, g).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

/// A normal-ordered element of `L_{g,n}`.
#[derive(Clone)]
pub struct LgnElement {
    alg: Arc<LgnAlgebra>,
    terms: BTreeMap<Mono, Scalar>,
}

impl PartialEq for LgnElement {
    fn eq(&self, o: &Self) -> bool {
        self.alg.surface == o.alg.surface && self.alg.mode == o.alg.mode && self.terms == o.terms
    }
}

impl Eq for LgnElement {}

impl LgnElement {
    pub fn zero(alg: &Arc<LgnAlgebra>) -> Self {
        Self {
            alg: alg.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(alg: &Arc<LgnAlgebra>) -> Self {
        Self::scalar(alg, Scalar::one(alg.ring()))
    }

    pub fn scalar(alg: &Arc<LgnAlgebra>, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(alg.unit_mono(), c);
        }
        Self {
            alg: alg.clone(),
            terms,
        }
    }

    pub fn from_laurent(alg: &Arc<LgnAlgebra>, c: &LaurentScalar) -> Self {
        Self::scalar(alg, Scalar::from_laurent(c, alg.ring()))
    }

    pub fn generator(alg: &Arc<LgnAlgebra>, id: GeneratorId) -> Result<Self, LgnError> {
        let slot = alg.slot(&id)?;
        Self::from_slot_gen(alg, slot, id.code())
    }

    pub(crate) fn from_slot_gen(alg: &Arc<LgnAlgebra>, slot: usize, gi: u8) -> Result<Self, LgnError> {
        let terms = alg.mono_times_gen(&alg.unit_mono(), slot, gi)?.into_iter().collect();
        Ok(Self {
            alg: alg.clone(),
            terms,
        })
    }

    pub fn from_terms(alg: &Arc<LgnAlgebra>, terms: BTreeMap<Mono, Scalar>) -> Self {
        Self {
            alg: alg.clone(),
            terms,
        }
    }

    pub fn algebra(&self) -> &Arc<LgnAlgebra> {
        &self.alg
    }

    pub fn terms(&self) -> &BTreeMap<Mono, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient of the unit monomial.
    pub fn constant_term(&self) -> Scalar {
        self.terms
            .get(&self.alg.unit_mono())
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.alg.ring()))
    }

    /// Whether the element is a multiple of `1`.
    pub fn is_scalar(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|h| *h == [0; 4]))
    }

    fn check(&self, o: &Self) -> Result<(), LgnError> {
        if self.alg.surface != o.alg.surface || self.alg.mode != o.alg.mode {
            return Err(LgnError::Mismatch(
                format!("{} {}", self.alg.surface, self.alg.mode),
                format!("{} {}", o.alg.surface, o.alg.mode),
            ));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, LgnError> {
        self.check(o)?;
        let mut t = self.terms.clone();
        for (m, c) in &o.terms {
            acc(&mut t, m.clone(), c.clone());
        }
        Ok(Self {
            alg: self.alg.clone(),
            terms: t,
        })
    }

    /// Sum; panics on mismatched algebras (use [`try_add`](Self::try_add) to check).
    pub fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("same algebra")
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (m, c) in &o.terms {
            acc(&mut self.terms, m.clone(), c.clone());
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            alg: self.alg.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(&self.alg);
        }
        Self {
            alg: self.alg.clone(),
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn scale_laurent(&self, c: &LaurentScalar) -> Self {
        self.scale(&Scalar::from_laurent(c, self.alg.ring()))
    }

    /// Right multiplication by a single generator.
    pub fn mul_gen(&self, slot: usize, gi: u8) -> Result<Self, LgnError> {
        Ok(Self {
            alg: self.alg.clone(),
            terms: self.alg.terms_times_gen(&self.terms, slot, gi)?,
        })
    }

    /// Product in normal form.
    pub fn mul(&self, o: &Self) -> Result<Self, LgnError> {
        self.check(o)?;
        let mut out = BTreeMap::new();
        for (m, c) in &o.terms {
            let mut cur = self.terms.clone();
            for (s, g) in self.alg.mono_letters(m) {
                cur = self.alg.terms_times_gen(&cur, s, g)?;
            }
            for (k, v) in cur {
                acc(&mut out, k, &v * c);
            }
        }
        Ok(Self {
            alg: self.alg.clone(),
            terms: out,
        })
    }
}

impl fmt::Display for LgnElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut ts: Vec<(&Mono, &Scalar)> = self.terms.iter().collect();
        ts.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().map(mono_degree).sum();
            let db: u32 = b.iter().map(mono_degree).sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        let terms: Vec<(String, Scalar)> = ts
            .into_iter()
            .map(|(m, c)| (self.alg.mono_name(m), c.clone()))
            .collect();
        crate::render::write_sum(f, &terms)
    }
}

impl fmt::Debug for LgnElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// ---------------------------------------------------------------------------
// Words, relations, normal forms
// ---------------------------------------------------------------------------

/// A formal linear combination of unreduced words.
#[derive(Clone, Debug)]
pub struct Relation {
    pub label: String,
    pub terms: Vec<(LaurentScalar, Vec<GeneratorId>)>,
}

/// Normal form of a word of generators.
pub fn normal_form(alg: &Arc<LgnAlgebra>, word: &[GeneratorId]) -> Result<LgnElement, LgnError> {
    let mut e = LgnElement::one(alg);
    for id in word {
        let s = alg.slot(id)?;
        e = e.mul_gen(s, id.code())?;
    }
    Ok(e)
}

/// Normal form of `Σ c · word`.
pub fn evaluate_relation(alg: &Arc<LgnAlgebra>, rel: &Relation) -> Result<LgnElement, LgnError> {
    let mut e = LgnElement::zero(alg);
    for (c, w) in &rel.terms {
        e.add_assign(&normal_form(alg, w)?.scale_laurent(c));
    }
    Ok(e)
}

/// All scalar components of the defining relations (left minus right), as unreduced words.
///
/// Per slot: sixteen reflection-equation components and the determinant
/// relation; per pair of slots: sixteen exchange components. In restricted
/// mode, each slot also gets `(X^-_+)^p`, `(X^+_-)^p` and `(X^+_+)^{2p} − 1`.
pub fn defining_relations(surface: Surface, mode: Mode) -> Result<Vec<Relation>, LgnError> {
    let alg = LgnAlgebra::get(surface, mode)?;
    let n = alg.n_slots();
    let mut out = Vec::new();
    let gen = |slot: usize, gi: u8| alg.generator_id(slot, gi);
    for s in 0..n {
        let name = gen(s, 0);
        let label = format!("{}{}", name.family.letter(), name.handle);
        for (k, p) in reflection_components().into_iter().enumerate() {
            out.push(Relation {
                label: format!("reflection {label} #{k}"),
                terms: p
                    .into_iter()
                    .map(|(w, c)| (c, w.iter().map(|&g| gen(s, g)).collect()))
                    .collect(),
            });
        }
        out.push(Relation {
            label: format!("qdet {label}"),
            terms: qdet_component()
                .into_iter()
                .map(|(w, c)| (c, w.iter().map(|&g| gen(s, g)).collect()))
                .collect(),
        });
        if let Mode::Restricted(p) = mode {
            let pw = |g: u8, e: u32| vec![gen(s, g); e as usize];
            out.push(Relation {
                label: format!("nilpotent {label} X[-,+]^p"),
                terms: vec![(LaurentScalar::one(), pw(GEN_B, p))],
            });
            out.push(Relation {
                label: format!("nilpotent {label} X[+,-]^p"),
                terms: vec![(LaurentScalar::one(), pw(GEN_C, p))],
            });
            out.push(Relation {
                label: format!("torsion {label} X[+,+]^2p"),
                terms: vec![
                    (LaurentScalar::one(), pw(GEN_D, 2 * p)),
                    (-LaurentScalar::one(), vec![]),
                ],
            });
        }
    }
    for u in 0..n {
        for v in u + 1..n {
            let kind = alg.exchange_kind(u, v);
            let (lu, lv) = (gen(u, 0), gen(v, 0));
            for (k, p) in exchange_components(kind).into_iter().enumerate() {
                out.push(Relation {
                    label: format!(
                        "exchange {}{}/{}{} #{k}",
                        lu.family.letter(),
                        lu.handle,
                        lv.family.letter(),
                        lv.handle
                    ),
                    terms: p
                        .into_iter()
                        .map(|(w, c)| {
                            (
                                c,
                                w.iter().map(|&(sl, g)| gen(if sl == 0 { u } else { v }, g)).collect(),
                            )
                        })
                        .collect(),
                });
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

/// A 2×2 matrix of elements, indexed `[row][col]` with `−` = 0.
pub type ElemMatrix = [[LgnElement; 2]; 2];

/// The generator matrix `X(handle)`.
pub fn generator_matrix(alg: &Arc<LgnAlgebra>, family: Family, handle: u32) -> Result<ElemMatrix, LgnError> {
    let slot = alg
        .surface
        .slot_of(family, handle)
        .ok_or_else(|| LgnError::InvalidGenerator(format!("{}{}", family.letter(), handle), alg.surface))?;
    let e = |s: usize, t: usize| LgnElement::from_slot_gen(alg, slot, gi_of(s, t));
    Ok([[e(0, 0)?, e(0, 1)?], [e(1, 0)?, e(1, 1)?]])
}

/// Matrix product of 2×2 element matrices.
pub fn matrix_mul(x: &ElemMatrix, y: &ElemMatrix) -> Result<ElemMatrix, LgnError> {
    let alg = x[0][0].alg.clone();
    let mut out: ElemMatrix = std::array::from_fn(|_| std::array::from_fn(|_| LgnElement::zero(&alg)));
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                out[i][j].add_assign(&x[i][k].mul(&y[k][j])?);
            }
        }
    }
    Ok(out)
}

/// The inverse matrix `X(handle)^{-1}`, whose entries are unit multiples of single generators.
pub fn matrix_inverse(alg: &Arc<LgnAlgebra>, family: Family, handle: u32) -> Result<ElemMatrix, LgnError> {
    static INV: OnceLock<Result<[[Vec<(LaurentScalar, u8)>; 2]; 2], PbwError>> = OnceLock::new();
    let shape = INV
        .get_or_init(|| solve_inverse_matrix(&handle_algebra(Mode::Generic)))
        .clone()?;
    let slot = alg
        .surface
        .slot_of(family, handle)
        .ok_or_else(|| LgnError::InvalidGenerator(format!("{}{}", family.letter(), handle), alg.surface))?;
    let entry = |i: usize, j: usize| -> Result<LgnElement, LgnError> {
        let mut e = LgnElement::zero(alg);
        for (c, g) in &shape[i][j] {
            e.add_assign(&LgnElement::from_slot_gen(alg, slot, *g)?.scale_laurent(c));
        }
        Ok(e)
    };
    Ok([[entry(0, 0)?, entry(0, 1)?], [entry(1, 0)?, entry(1, 1)?]])
}

/// `tr_q(X) = Σ_s (g·X)^s_s = −q² X^-_- − q^{-2} X^+_+`.
pub fn quantum_trace(m: &ElemMatrix) -> LgnElement {
    m[0][0]
        .scale_laurent(&-LaurentScalar::q_pow(2))
        .add(&m[1][1].scale_laurent(&-LaurentScalar::q_pow(-2)))
}

/// `R'_{IJ}` for `I = V₂^{⊗m}`, `J = V₂` on `m + 1` strands: `R'_{m,J} ⋯ R'_{1,J}`.
pub fn r_prime_fused(m: usize) -> Tensor {
    let n = m + 1;
    let mut t = Tensor::identity(n);
    for k in 0..m {
        // matrix product R'_{m,J}⋯R'_{1,J}: the factor for strand k is applied after those for strands < k
        let f = r21().embed(n, &[k, m]).expect("embedding");
        t = Tensor::compose(&f, &t).expect("arity");
    }
    t
}

/// `R_{IJ}` for `I = V₂^{⊗m}`, `J = V₂`: `R_{1,J} ⋯ R_{m,J}`.
pub fn r_fused(m: usize) -> Tensor {
    let n = m + 1;
    let mut t = Tensor::identity(n);
    for k in 0..m {
        let f = r_matrix().embed(n, &[k, m]).expect("embedding");
        t = Tensor::compose(&t, &f).expect("arity");
    }
    t
}

/// The fused matrix `X^{(m)}` on `V₂^{⊗m}`, built by `X^{I⊗J} = X^I₁ R' X^J₂ R'^{-1}`.
pub fn fusion_matrix(
    alg: &Arc<LgnAlgebra>,
    family: Family,
    handle: u32,
    m: usize,
) -> Result<Arc<ElemTensor>, LgnError> {
    let slot = alg
        .surface
        .slot_of(family, handle)
        .ok_or_else(|| LgnError::InvalidGenerator(format!("{}{}", family.letter(), handle), alg.surface))?;
    fused_slot(alg, slot, m)
}

pub(crate) fn fused_slot(alg: &Arc<LgnAlgebra>, slot: usize, m: usize) -> Result<Arc<ElemTensor>, LgnError> {
    if let Some(t) = alg.fused_cache.lock().unwrap().get(&(slot, m)) {
        return Ok(t.clone());
    }
    let t = if m == 0 {
        ElemTensor::from_tensor(alg, &Tensor::identity(0))
    } else {
        let mut x = ElemTensor::zeros(alg, 1, 1);
        for s in 0..2 {
            for t in 0..2 {
                x.set(s, t, LgnElement::from_slot_gen(alg, slot, gi_of(s, t))?);
            }
        }
        if m == 1 {
            x
        } else {
            let prev = fused_slot(alg, slot, m - 1)?;
            let id1 = ElemTensor::from_tensor(alg, &Tensor::identity(1));
            let idm = ElemTensor::from_tensor(alg, &Tensor::identity(m - 1));
            let x1 = ElemTensor::hcat(&prev, &id1)?;
            let x2 = ElemTensor::hcat(&idm, &x)?;
            let rp = r_prime_fused(m - 1);
            let rpi = rp.inverse().map_err(|e| PbwError::Orientation(e.to_string()))?;
            let rp = ElemTensor::from_tensor(alg, &rp);
            let rpi = ElemTensor::from_tensor(alg, &rpi);
            x1.matmul(&rp)?.matmul(&x2)?.matmul(&rpi)?
        }
    };
    let t = Arc::new(t);
    alg.fused_cache.lock().unwrap().insert((slot, m), t.clone());
    Ok(t)
}

// ---------------------------------------------------------------------------
// Coaction and invariants
// ---------------------------------------------------------------------------

/// `Ω(x)` as a map `(O_{q²} monomial, L monomial) → coefficient`.
pub type Coaction = BTreeMap<(HMono, Mono), LaurentScalar>;

/// The coaction `Ω(X^j_k) = Σ_{l,m} T^j_l S(T)^m_k ⊗ X^l_m`, extended multiplicatively.
pub fn coaction(x: &LgnElement) -> Result<Coaction, LgnError> {
    let alg = &x.alg;
    if alg.mode != Mode::Generic {
        return Err(LgnError::NeedsGeneric);
    }
    let oq = oq_algebra();
    let s = antipode_gen_matrix()?;
    let ring = Ring::Laurent;
    // For each generator code (j,k): list of (O-part as normal form, l, m).
    let mut gen_parts: Vec<Vec<(Vec<(HMono, Scalar)>, u8)>> = Vec::with_capacity(4);
    for gi in 0..4u8 {
        let (j, k) = state_pair(gi);
        let mut parts = Vec::new();
        for l in 0..2 {
            for m in 0..2 {
                let mut o: BTreeMap<HMono, Scalar> = BTreeMap::new();
                for (c, sg) in &s[m][k] {
                    for (mono, c2) in oq.normal_form(&[gi_of(j, l), *sg])? {
                        acc(&mut o, mono, Scalar::from_laurent(c, ring) * c2);
                    }
                }
                if !o.is_empty() {
                    parts.push((o.into_iter().collect(), gi_of(l, m)));
                }
            }
        }
        gen_parts.push(parts);
    }
    let mut out: BTreeMap<(HMono, Mono), Scalar> = BTreeMap::new();
    for (mono, c) in &x.terms {
        let mut cur: BTreeMap<(HMono, Mono), Scalar> = BTreeMap::new();
        cur.insert(([0; 4], alg.unit_mono()), c.clone());
        for (slot, gi) in alg.mono_letters(mono) {
            let mut next = BTreeMap::new();
            for ((om, lm), cc) in &cur {
                for (opart, lgi) in &gen_parts[gi as usize] {
                    let lprod = alg.mono_times_gen(lm, slot, *lgi)?;
                    for (ob, oc) in opart {
                        let oprod = oq.mul_mono(om, ob)?;
                        for (o2, oc2) in &oprod {
                            let co = &(cc * oc) * oc2;
                            for (l2, lc) in &lprod {
                                acc(&mut next, (*o2, l2.clone()), &co * lc);
                            }
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
    Ok(out
        .into_iter()
        .map(|(k, v)| (k, v.as_laurent().expect("generic").clone()))
        .collect())
}

/// `Ω(x) = 1 ⊗ x`.
pub fn is_invariant(x: &LgnElement) -> Result<bool, LgnError> {
    let om = coaction(x)?;
    let expected: Coaction = x
        .terms
        .iter()
        .map(|(m, c)| (([0; 4], m.clone()), c.as_laurent().expect("generic").clone()))
        .collect();
    Ok(om == expected)
}

// ---------------------------------------------------------------------------
// Restricted basis
// ---------------------------------------------------------------------------

/// Enumerate the restricted-mode monomial basis; errors if its size exceeds `budget`.
pub fn basis_enumerate(surface: Surface, p: u32, budget: usize) -> Result<Vec<Mono>, LgnError> {
    let alg = LgnAlgebra::get(surface, Mode::Restricted(p))?;
    let per = alg.handle.restricted_basis().expect("restricted mode");
    let n = alg.n_slots();
    let total = (per.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > budget as u128 {
        return Err(LgnError::Budget(format!(
            "{total} basis monomials exceed budget {budget}"
        )));
    }
    let mut out: Vec<Mono> = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|m| {
                per.iter().map(move |h| {
                    let mut m2 = m.clone();
                    m2.push(*h);
                    m2
                })
            })
            .collect();
    }
    Ok(out)
}

/// `(2p³)^{2g+n}`.
pub fn restricted_dimension(surface: Surface, p: u32) -> u128 {
    (2 * (p as u128).pow(3)).pow(surface.n_slots() as u32)
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Parse `coeff * gen gen … ± …` (e.g. `-q^2 * M1[-,-] + (q + 1) * A1[-,+] B1[+,+]`).
///
/// Coefficients use the Laurent grammar and are mapped into the algebra's ring.
pub fn parse_element(alg: &Arc<LgnAlgebra>, s: &str) -> Result<LgnElement, LgnError> {
    let b = s.as_bytes();
    let mut pos = 0usize;
    let perr = |pos: usize, msg: &str| LgnError::Parse {
        col: pos + 1,
        msg: msg.to_string(),
    };
    let skip = |pos: &mut usize| {
        while *pos < b.len() && b[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let mut total = LgnElement::zero(alg);
    let mut first = true;
    loop {
        skip(&mut pos);
        if pos >= b.len() {
            if first {
                return Err(perr(pos, "empty expression"));
            }
            break;
        }
        let mut sign = 1i64;
        match b[pos] {
            b'+' => pos += 1,
            b'-' => {
                sign = -1;
                pos += 1
            }
            _ if !first => return Err(perr(pos, "expected '+' or '-'")),
            _ => {}
        }
        first = false;
        let mut coeff = LaurentScalar::from_int(sign);
        let mut word: Vec<GeneratorId> = Vec::new();
        let mut factors = 0;
        loop {
            skip(&mut pos);
            if pos >= b.len() || b[pos] == b'+' || b[pos] == b'-' {
                break;
            }
            if b[pos] == b'*' {
                if factors == 0 {
                    return Err(perr(pos, "dangling '*'"));
                }
                pos += 1;
                continue;
            }
            if b[pos] == b'(' {
                let close = s[pos..]
                    .find(')')
                    .map(|k| pos + k)
                    .ok_or_else(|| perr(pos, "unclosed '('"))?;
                let inner = LaurentScalar::parse(&s[pos + 1..close]).map_err(|e| match e {
                    CoeffError::Parse { col, msg } => perr(pos + col, &msg),
                    other => LgnError::Coeff(other),
                })?;
                coeff = &coeff * &inner;
                pos = close + 1;
            } else if matches!(b[pos], b'A' | b'B' | b'M') {
                let (id, np) = parse_generator(s, pos).map_err(|(p, m)| perr(p, &m))?;
                alg.slot(&id)?;
                word.push(id);
                pos = np;
            } else {
                let mut p2 = pos;
                match crate::coeff_ring::parse_monomial_at(s, &mut p2).map_err(|e| match e {
                    CoeffError::Parse { col, msg } => perr(col - 1, &msg),
                    other => LgnError::Coeff(other),
                })? {
                    Some(m) => {
                        coeff = &coeff * &m;
                        pos = p2;
                    }
                    None => return Err(perr(pos, "unexpected character")),
                }
            }
            factors += 1;
        }
        if factors == 0 {
            return Err(perr(pos, "empty term"));
        }
        total.add_assign(&normal_form(alg, &word)?.scale_laurent(&coeff));
    }
    Ok(total)
}

fn parse_generator(s: &str, pos: usize) -> Result<(GeneratorId, usize), (usize, String)> {
    let b = s.as_bytes();
    let family = match b[pos] {
        b'A' => Family::A,
        b'B' => Family::B,
        _ => Family::M,
    };
    let mut p = pos + 1;
    let start = p;
    while p < b.len() && b[p].is_ascii_digit() {
        p += 1;
    }
    let handle: u32 = s[start..p]
        .parse()
        .map_err(|_| (start, "expected handle index".to_string()))?;
    let st = |c: u8, at: usize| match c {
        b'-' => Ok(State::Minus),
        b'+' => Ok(State::Plus),
        _ => Err((at, "expected '-' or '+'".to_string())),
    };
    if b.len() < p + 5 || b[p] != b'[' || b[p + 2] != b',' || b[p + 4] != b']' {
        return Err((p, "expected [s,t]".to_string()));
    }
    let row = st(b[p + 1], p + 1)?;
    let col = st(b[p + 3], p + 3)?;
    Ok((GeneratorId::new(family, handle, row, col), p + 5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::State::{Minus as Mi, Plus as Pl};

    fn l01() -> Arc<LgnAlgebra> {
        LgnAlgebra::get(Surface::new(0, 1).unwrap(), Mode::Generic).unwrap()
    }

    #[test]
    fn qdet_normal_form() {
        let a = l01();
        let w = [
            GeneratorId::new(Family::M, 1, Mi, Mi),
            GeneratorId::new(Family::M, 1, Pl, Pl),
        ];
        let e = normal_form(&a, &w).unwrap();
        assert_eq!(e.to_string(), "1 + q^4 * M1[-,+] M1[+,-]");
    }

    #[test]
    fn relation_counts() {
        let c = |g, n| {
            defining_relations(Surface::new(g, n).unwrap(), Mode::Generic)
                .unwrap()
                .len()
        };
        assert_eq!(c(0, 1), 17);
        assert_eq!(c(1, 0), 50);
    }

    #[test]
    fn relations_vanish_small() {
        for (g, n) in [(0, 1), (1, 0), (0, 2)] {
            let s = Surface::new(g, n).unwrap();
            let a = LgnAlgebra::get(s, Mode::Generic).unwrap();
            for r in defining_relations(s, Mode::Generic).unwrap() {
                let e = evaluate_relation(&a, &r).unwrap();
                assert!(e.is_zero(), "{} on {s}: {e}", r.label);
            }
        }
    }

    #[test]
    fn parse_render_roundtrip() {
        let a = l01();
        let e = parse_element(&a, "-q^2 * M1[-,-] - q^{-2} * M1[+,+]").unwrap();
        assert_eq!(e.to_string(), "-q^2 * M1[-,-] - q^-2 * M1[+,+]");
        assert_eq!(parse_element(&a, &e.to_string()).unwrap(), e);
        assert!(parse_element(&a, "A1[-,-]").is_err());
        assert!(parse_element(&a, "M1[-,-] +").is_err());
    }

    #[test]
    fn restricted_basis_counts() {
        assert_eq!(basis_enumerate(Surface::new(0, 1).unwrap(), 2, 1000).unwrap().len(), 16);
        assert_eq!(basis_enumerate(Surface::new(0, 1).unwrap(), 3, 1000).unwrap().len(), 54);
        assert_eq!(
            basis_enumerate(Surface::new(0, 2).unwrap(), 2, 1000).unwrap().len(),
            256
        );
        assert!(basis_enumerate(Surface::new(0, 2).unwrap(), 3, 100).is_err());
    }

    #[test]
    fn restricted_relations_vanish() {
        for p in [2, 3] {
            let s = Surface::new(0, 1).unwrap();
            let a = LgnAlgebra::get(s, Mode::Restricted(p)).unwrap();
            for r in defining_relations(s, Mode::Restricted(p)).unwrap() {
                assert!(evaluate_relation(&a, &r).unwrap().is_zero(), "{}", r.label);
            }
        }
    }

    #[test]
    fn associativity_on_torus_words() {
        let s = Surface::new(1, 1).unwrap();
        let a = LgnAlgebra::get(s, Mode::Generic).unwrap();
        let g = |f, h, r, c| LgnElement::generator(&a, GeneratorId::new(f, h, r, c)).unwrap();
        let x = g(Family::B, 1, Pl, Mi).add(&g(Family::M, 2, Mi, Pl));
        let y = g(Family::A, 1, Mi, Pl).mul(&g(Family::M, 2, Pl, Pl)).unwrap();
        let z = g(Family::M, 2, Mi, Mi).mul(&g(Family::B, 1, Mi, Pl)).unwrap();
        let l = x.mul(&y).unwrap().mul(&z).unwrap();
        let r = x.mul(&y.mul(&z).unwrap()).unwrap();
        assert_eq!(l, r);
    }

    #[test]
    fn inverse_matrix_is_inverse() {
        let a = LgnAlgebra::get(Surface::new(1, 0).unwrap(), Mode::Generic).unwrap();
        for f in [Family::A, Family::B] {
            let x = generator_matrix(&a, f, 1).unwrap();
            let xi = matrix_inverse(&a, f, 1).unwrap();
            for prod in [matrix_mul(&x, &xi).unwrap(), matrix_mul(&xi, &x).unwrap()] {
                for i in 0..2 {
                    for j in 0..2 {
                        let e = if i == j {
                            LgnElement::one(&a)
                        } else {
                            LgnElement::zero(&a)
                        };
                        assert_eq!(prod[i][j], e);
                    }
                }
            }
        }
    }

    #[test]
    fn quantum_trace_is_invariant() {
        let a = l01();
        let m = generator_matrix(&a, Family::M, 1).unwrap();
        assert!(is_invariant(&quantum_trace(&m)).unwrap());
        assert!(!is_invariant(&m[0][1]).unwrap());
        let m2 = matrix_mul(&m, &m).unwrap();
        assert!(is_invariant(&quantum_trace(&m2)).unwrap());
    }

    #[test]
    fn fused_matrix_satisfies_fused_reflection_equation() {
        let a = l01();
        let x2 = fusion_matrix(&a, Family::M, 1, 2).unwrap();
        let x1 = fusion_matrix(&a, Family::M, 1, 1).unwrap();
        let t = |t: &Tensor| ElemTensor::from_tensor(&a, t);
        // naturality under the braiding P·R on V ⊗ V
        let c = t(&crate::tensor::cross_pos());
        assert!(c.matmul(&x2).unwrap().sub(&x2.matmul(&c).unwrap()).is_zero());
        // R^{IJ} X^I₁ R'^{IJ} X^J₂ = X^J₂ R^{IJ} X^I₁ R'^{IJ}
        let xi = ElemTensor::hcat(&x2, &t(&Tensor::identity(1))).unwrap();
        let xj = ElemTensor::hcat(&t(&Tensor::identity(2)), &x1).unwrap();
        let r = t(&r_fused(2));
        let rp = t(&r_prime_fused(2));
        let lhs = r.matmul(&xi).unwrap().matmul(&rp).unwrap().matmul(&xj).unwrap();
        let rhs = xj.matmul(&r).unwrap().matmul(&xi).unwrap().matmul(&rp).unwrap();
        assert!(lhs.sub(&rhs).is_zero());
    }
}
