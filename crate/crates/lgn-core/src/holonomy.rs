//! Tangle diagrams on `Σ_{g,n}^{o,•}`, their exact evaluation with handle
//! tensors, stated holonomy, stacking and Wilson loops.
//!
//! A diagram is read bottom to top. The bottom row holds one unoriented handle
//! per generator curve (order `b₁, a₁, …, b_g, a_g, m_{g+1}, …`); a handle
//! through which `m` strands pass contributes `2m` legs `l₁ … l_m r_m … r₁`
//! (strand 1 outermost), valued `(X^{(m)} (ᵗD)^{⊗m})^{l}_{r}`. With canonical
//! routing, the right legs of each `b_i` bunch are braided under the left legs
//! of the matching `a_i` bunch, giving the boundary order `b_L a_L b_R a_R`.
//! Slices are then applied as scalar tensors; the top legs are the boundary
//! points in increasing height.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};
use thiserror::Error;

use crate::coeff_ring::{CoeffError, LaurentScalar};
use crate::lgn::{fused_slot, Family, LgnAlgebra, LgnElement, LgnError, Mode, Surface};
use crate::tensor::{cap, cross_neg, cross_pos, cup, d_transpose, pack, State, Tensor, TensorError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum HolonomyError {
    #[error("JSON syntax error at line {line}, column {column}: {msg}")]
    Json { line: usize, column: usize, msg: String },
    #[error("schema violation at {path}: {msg}")]
    Schema { path: String, msg: String },
    #[error("slice {slice}, atom {atom}: unknown atom {name:?}")]
    UnknownAtom { slice: usize, atom: usize, name: String },
    #[error("slice {slice}, atom {atom}: bad coupon: {msg}")]
    BadCoupon { slice: usize, atom: usize, msg: String },
    #[error("slice {slice}: width mismatch, expected {expected} inputs but atoms consume {found}")]
    WidthMismatch {
        slice: usize,
        expected: usize,
        found: usize,
    },
    #[error("surface mismatch: {0} vs {1}")]
    SurfaceMismatch(Surface, Surface),
    #[error("routing mismatch between stacked diagrams")]
    RoutingMismatch,
    #[error("expected {expected} states, found {found}")]
    StateLength { expected: usize, found: usize },
    #[error("diagram is not closed ({0} boundary points)")]
    NotClosed(usize),
    #[error("diagram has no states")]
    MissingStates,
    #[error(transparent)]
    Lgn(#[from] LgnError),
}

impl From<TensorError> for HolonomyError {
    fn from(e: TensorError) -> Self {
        HolonomyError::Schema {
            path: "tensor".into(),
            msg: e.to_string(),
        }
    }
}

/// How handle legs reach the slices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Routing {
    /// Insert the fixed crossing of each genus pair (`b_L a_L b_R a_R`).
    Canonical,
    /// Legs arrive handle by handle (`b_L b_R a_L a_R …`); slices do all braiding.
    Explicit,
}

/// One elementary piece of a slice.
#[derive(Clone, Debug, PartialEq)]
pub enum Atom {
    Id,
    Cup,
    Cap,
    CrossPos,
    CrossNeg,
    Coupon { name: String, tensor: Tensor },
}

impl Atom {
    pub fn inputs(&self) -> usize {
        match self {
            Atom::Id => 1,
            Atom::Cup => 0,
            Atom::Cap | Atom::CrossPos | Atom::CrossNeg => 2,
            Atom::Coupon { tensor, .. } => tensor.in_arity(),
        }
    }

    pub fn outputs(&self) -> usize {
        match self {
            Atom::Id => 1,
            Atom::Cap => 0,
            Atom::Cup | Atom::CrossPos | Atom::CrossNeg => 2,
            Atom::Coupon { tensor, .. } => tensor.out_arity(),
        }
    }

    pub fn tensor(&self) -> Tensor {
        match self {
            Atom::Id => Tensor::identity(1),
            Atom::Cup => cup(),
            Atom::Cap => cap(),
            Atom::CrossPos => cross_pos(),
            Atom::CrossNeg => cross_neg(),
            Atom::Coupon { tensor, .. } => tensor.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Atom::Id => json!("id"),
            Atom::Cup => json!("cup"),
            Atom::Cap => json!("cap"),
            Atom::CrossPos => json!("x+"),
            Atom::CrossNeg => json!("x-"),
            Atom::Coupon { name, tensor } => {
                if Tensor::builtin(name).map(|t| &t == tensor).unwrap_or(false) {
                    json!({ "coupon": name })
                } else {
                    let rows: Vec<Vec<String>> = (0..1usize << tensor.out_arity())
                        .map(|o| {
                            (0..1usize << tensor.in_arity())
                                .map(|i| tensor.get(o, i).to_string())
                                .collect()
                        })
                        .collect();
                    json!({ "coupon": { "in": tensor.in_arity(), "out": tensor.out_arity(), "entries": rows } })
                }
            }
        }
    }
}

/// A tangle diagram in standard form.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagramIR {
    pub surface: Surface,
    /// Strand counts through `b₁, a₁, …, b_g, a_g, m_{g+1}, …, m_{g+n}`.
    pub handle_strands: Vec<usize>,
    pub routing: Routing,
    /// Bottom to top; each slice left to right.
    pub slices: Vec<Vec<Atom>>,
    /// States of the top endpoints, if the diagram is stated.
    pub states: Option<Vec<State>>,
}

impl DiagramIR {
    /// The empty diagram.
    pub fn empty(surface: Surface) -> Self {
        Self {
            surface,
            handle_strands: vec![0; surface.n_slots()],
            routing: Routing::Canonical,
            slices: Vec::new(),
            states: None,
        }
    }

    pub fn bottom_width(&self) -> usize {
        2 * self.handle_strands.iter().sum::<usize>()
    }

    /// Number of boundary points, after validation.
    pub fn top_width(&self) -> Result<usize, HolonomyError> {
        self.validate()
    }

    /// Check widths and states; returns the top width.
    pub fn validate(&self) -> Result<usize, HolonomyError> {
        if self.handle_strands.len() != self.surface.n_slots() {
            return Err(HolonomyError::Schema {
                path: "handle_strands".into(),
                msg: format!(
                    "expected {} entries for surface {}, found {}",
                    self.surface.n_slots(),
                    self.surface,
                    self.handle_strands.len()
                ),
            });
        }
        let mut w = self.bottom_width();
        for (i, s) in self.slices.iter().enumerate() {
            let inp: usize = s.iter().map(Atom::inputs).sum();
            if inp != w {
                return Err(HolonomyError::WidthMismatch {
                    slice: i,
                    expected: w,
                    found: inp,
                });
            }
            w = s.iter().map(Atom::outputs).sum();
        }
        if let Some(st) = &self.states {
            if st.len() != w {
                return Err(HolonomyError::StateLength {
                    expected: w,
                    found: st.len(),
                });
            }
        }
        Ok(w)
    }

    /// Parse the JSON diagram format.
    pub fn parse(text: &str) -> Result<Self, HolonomyError> {
        let v: Value = serde_json::from_str(text).map_err(|e| HolonomyError::Json {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Self, HolonomyError> {
        let schema = |path: &str, msg: &str| HolonomyError::Schema {
            path: path.to_string(),
            msg: msg.to_string(),
        };
        let obj = v.as_object().ok_or_else(|| schema("$", "expected an object"))?;
        for k in obj.keys() {
            if !["surface", "handle_strands", "routing", "slices", "states"].contains(&k.as_str()) {
                return Err(schema(&format!("$.{k}"), "unknown field"));
            }
        }
        let s = obj.get("surface").ok_or_else(|| schema("$.surface", "missing"))?;
        let gn = |k: &str| -> Result<u32, HolonomyError> {
            s.get(k)
                .and_then(Value::as_u64)
                .map(|x| x as u32)
                .ok_or_else(|| schema(&format!("$.surface.{k}"), "expected a non-negative integer"))
        };
        let surface = Surface::new(gn("g")?, gn("n")?)?;
        let hs = obj
            .get("handle_strands")
            .and_then(Value::as_array)
            .ok_or_else(|| schema("$.handle_strands", "expected an array"))?;
        let handle_strands = hs
            .iter()
            .enumerate()
            .map(|(i, x)| {
                x.as_u64()
                    .map(|v| v as usize)
                    .ok_or_else(|| schema(&format!("$.handle_strands[{i}]"), "expected a non-negative integer"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let routing = match obj.get("routing").map(|r| r.as_str()) {
            None | Some(Some("canonical")) => Routing::Canonical,
            Some(Some("explicit")) => Routing::Explicit,
            _ => return Err(schema("$.routing", "expected \"canonical\" or \"explicit\"")),
        };
        let mut slices = Vec::new();
        if let Some(sl) = obj.get("slices") {
            let sl = sl.as_array().ok_or_else(|| schema("$.slices", "expected an array"))?;
            for (i, s) in sl.iter().enumerate() {
                let atoms = s
                    .as_array()
                    .ok_or_else(|| schema(&format!("$.slices[{i}]"), "expected an array of atoms"))?;
                let mut row = Vec::new();
                for (j, a) in atoms.iter().enumerate() {
                    row.push(parse_atom(a, i, j)?);
                }
                slices.push(row);
            }
        }
        let states = match obj.get("states") {
            None | Some(Value::Null) => None,
            Some(st) => Some(parse_states_json(st)?),
        };
        let d = Self {
            surface,
            handle_strands,
            routing,
            slices,
            states,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "surface": { "g": self.surface.g, "n": self.surface.n },
            "handle_strands": self.handle_strands,
            "routing": match self.routing { Routing::Canonical => "canonical", Routing::Explicit => "explicit" },
            "slices": self.slices.iter().map(|s| s.iter().map(Atom::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        });
        if let Some(st) = &self.states {
            v["states"] = json!(st.iter().map(|s| s.symbol().to_string()).collect::<Vec<_>>());
        }
        v
    }

    /// Same diagram with the given states.
    pub fn with_states(mut self, states: Vec<State>) -> Self {
        self.states = Some(states);
        self
    }

    /// Append a slice on top.
    pub fn push_slice(&mut self, slice: Vec<Atom>) {
        self.slices.push(slice);
    }
}

fn parse_states_json(st: &Value) -> Result<Vec<State>, HolonomyError> {
    let arr = st.as_array().ok_or_else(|| HolonomyError::Schema {
        path: "$.states".into(),
        msg: "expected an array".into(),
    })?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_str()
                .and_then(|s| {
                    let mut c = s.chars();
                    match (c.next(), c.next()) {
                        (Some(ch), None) => State::parse(ch),
                        _ => None,
                    }
                })
                .ok_or_else(|| HolonomyError::Schema {
                    path: format!("$.states[{i}]"),
                    msg: "expected \"-\" or \"+\"".into(),
                })
        })
        .collect()
}

/// Parse a state string such as `-+` or `-,+`.
pub fn parse_states(s: &str) -> Option<Vec<State>> {
    s.chars()
        .filter(|c| !matches!(c, ',' | ' '))
        .map(State::parse)
        .collect()
}

fn parse_atom(a: &Value, slice: usize, atom: usize) -> Result<Atom, HolonomyError> {
    match a {
        Value::String(s) => match s.as_str() {
            "id" => Ok(Atom::Id),
            "cup" => Ok(Atom::Cup),
            "cap" => Ok(Atom::Cap),
            "x+" => Ok(Atom::CrossPos),
            "x-" => Ok(Atom::CrossNeg),
            other => Err(HolonomyError::UnknownAtom {
                slice,
                atom,
                name: other.to_string(),
            }),
        },
        Value::Object(o) if o.len() == 1 && o.contains_key("coupon") => {
            let bad = |msg: String| HolonomyError::BadCoupon { slice, atom, msg };
            match &o["coupon"] {
                Value::String(name) => Tensor::builtin(name)
                    .map(|tensor| Atom::Coupon {
                        name: name.clone(),
                        tensor,
                    })
                    .map_err(|e| bad(e.to_string())),
                Value::Object(m) => {
                    let ar = |k: &str| {
                        m.get(k)
                            .and_then(Value::as_u64)
                            .map(|x| x as usize)
                            .ok_or_else(|| bad(format!("missing integer field {k:?}")))
                    };
                    let (ni, no) = (ar("in")?, ar("out")?);
                    if ni > 8 || no > 8 {
                        return Err(bad("arity above 8".into()));
                    }
                    let rows = m
                        .get("entries")
                        .and_then(Value::as_array)
                        .ok_or_else(|| bad("missing \"entries\" matrix".into()))?;
                    if rows.len() != 1 << no {
                        return Err(bad(format!("expected {} rows, found {}", 1 << no, rows.len())));
                    }
                    let mut t = Tensor::zeros(no, ni);
                    for (r, row) in rows.iter().enumerate() {
                        let row = row.as_array().ok_or_else(|| bad(format!("row {r} is not an array")))?;
                        if row.len() != 1 << ni {
                            return Err(bad(format!("row {r}: expected {} entries", 1 << ni)));
                        }
                        for (c, x) in row.iter().enumerate() {
                            let v = match x {
                                Value::String(s) => LaurentScalar::parse(s),
                                Value::Number(n) => n.as_i64().map(LaurentScalar::from_int).ok_or(CoeffError::Parse {
                                    col: 1,
                                    msg: "not an integer".into(),
                                }),
                                _ => Err(CoeffError::Parse {
                                    col: 1,
                                    msg: "expected a string".into(),
                                }),
                            }
                            .map_err(|e| bad(format!("entry ({r},{c}): {e}")))?;
                            t.set(r, c, v);
                        }
                    }
                    Ok(Atom::Coupon {
                        name: "matrix".into(),
                        tensor: t,
                    })
                }
                _ => Err(bad("expected a builtin name or a matrix object".into())),
            }
        }
        other => Err(HolonomyError::UnknownAtom {
            slice,
            atom,
            name: other.to_string(),
        }),
    }
}

/// Index of the generator curve at position `k` of `handle_strands`.
pub fn handle_position(surface: Surface, k: usize) -> (Family, u32) {
    let g = surface.g as usize;
    if k < 2 * g {
        let i = (k / 2 + 1) as u32;
        if k.is_multiple_of(2) {
            (Family::B, i)
        } else {
            (Family::A, i)
        }
    } else {
        (Family::M, (k - g + 1) as u32)
    }
}

fn position_of(surface: Surface, family: Family, handle: u32) -> Option<usize> {
    let g = surface.g;
    match family {
        Family::B if (1..=g).contains(&handle) => Some(2 * (handle as usize - 1)),
        Family::A if (1..=g).contains(&handle) => Some(2 * (handle as usize - 1) + 1),
        Family::M if (g + 1..=g + surface.n).contains(&handle) => Some(handle as usize + g as usize - 1),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// An element of `L_{g,n} ⊗ V₂^{⊗k}`, stored sparsely by packed state index.
#[derive(Clone, Debug)]
pub struct HolTensor {
    alg: Arc<LgnAlgebra>,
    arity: usize,
    entries: BTreeMap<usize, LgnElement>,
}

impl PartialEq for HolTensor {
    fn eq(&self, o: &Self) -> bool {
        self.arity == o.arity && self.entries == o.entries
    }
}

impl HolTensor {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn algebra(&self) -> &Arc<LgnAlgebra> {
        &self.alg
    }

    pub fn entries(&self) -> &BTreeMap<usize, LgnElement> {
        &self.entries
    }

    /// The component at the given states.
    pub fn component(&self, states: &[State]) -> Result<LgnElement, HolonomyError> {
        if states.len() != self.arity {
            return Err(HolonomyError::StateLength {
                expected: self.arity,
                found: states.len(),
            });
        }
        Ok(self
            .entries
            .get(&pack(states))
            .cloned()
            .unwrap_or_else(|| LgnElement::zero(&self.alg)))
    }

    /// `(x ⊗ v) ⊙ (y ⊗ w) = xy ⊗ v ⊗ w`.
    pub fn odot(&self, o: &Self) -> Result<Self, HolonomyError> {
        let mut entries = BTreeMap::new();
        for (i, x) in &self.entries {
            for (j, y) in &o.entries {
                let p = x.mul(y)?;
                if !p.is_zero() {
                    entries.insert(i | (j << self.arity), p);
                }
            }
        }
        Ok(Self {
            alg: self.alg.clone(),
            arity: self.arity + o.arity,
            entries,
        })
    }

    /// Apply a scalar tensor to legs `offset .. offset + t.in_arity()`.
    fn apply(&self, t: &Tensor, offset: usize) -> Self {
        let (ki, ko) = (t.in_arity(), t.out_arity());
        let mut cols: BTreeMap<usize, Vec<(usize, &LaurentScalar)>> = BTreeMap::new();
        for (o, i, x) in t.nonzero() {
            cols.entry(i).or_default().push((o, x));
        }
        let low_mask = (1usize << offset) - 1;
        let mut out: BTreeMap<usize, LgnElement> = BTreeMap::new();
        for (idx, e) in &self.entries {
            let lo = idx & low_mask;
            let mid = (idx >> offset) & ((1usize << ki) - 1);
            let hi = idx >> (offset + ki);
            if let Some(c) = cols.get(&mid) {
                for (o, x) in c {
                    let k = lo | (o << offset) | (hi << (offset + ko));
                    let v = e.scale_laurent(x);
                    match out.get_mut(&k) {
                        Some(acc) => acc.add_assign(&v),
                        None => {
                            out.insert(k, v);
                        }
                    }
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        Self {
            alg: self.alg.clone(),
            arity: self.arity - ki + ko,
            entries: out,
        }
    }

    pub(crate) fn from_entries(alg: &Arc<LgnAlgebra>, arity: usize, entries: BTreeMap<usize, LgnElement>) -> Self {
        Self {
            alg: alg.clone(),
            arity,
            entries,
        }
    }

    fn unit(alg: &Arc<LgnAlgebra>) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(0, LgnElement::one(alg));
        Self {
            alg: alg.clone(),
            arity: 0,
            entries,
        }
    }
}

impl fmt::Display for HolTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.arity == 0 {
            return write!(
                f,
                "{}",
                self.entries
                    .get(&0)
                    .cloned()
                    .unwrap_or_else(|| LgnElement::zero(&self.alg))
            );
        }
        for (i, e) in &self.entries {
            let st: String = crate::tensor::unpack(*i, self.arity)
                .iter()
                .map(|s| s.symbol())
                .collect();
            writeln!(f, "[{st}] {e}")?;
        }
        Ok(())
    }
}

/// The unoriented handle for `m` strands through a slot, as a `2m`-leg vector.
fn handle_vector(alg: &Arc<LgnAlgebra>, slot: usize, m: usize) -> Result<HolTensor, HolonomyError> {
    let x = fused_slot(alg, slot, m)?;
    let td = crate::etensor::ElemTensor::from_tensor(alg, &Tensor::hcat_all(&vec![d_transpose(); m]));
    let h = x.matmul(&td)?;
    let mut entries = BTreeMap::new();
    for ((o, i), e) in h.entries() {
        // right legs are listed r_m … r_1
        let rev: usize = (0..m).map(|k| ((i >> k) & 1) << (m - 1 - k)).sum();
        entries.insert(o | (rev << m), e.clone());
    }
    Ok(HolTensor {
        alg: alg.clone(),
        arity: 2 * m,
        entries,
    })
}

/// Braid the bunch at `[p, p + x)` past the bunch at `[p + x, p + x + y)` as slices
/// on `width` strands; the first bunch crosses with `atom`.
fn bunch_swap(width: usize, p: usize, x: usize, y: usize, atom: &Atom) -> Vec<Vec<Atom>> {
    let mut out = Vec::new();
    for j in 0..y {
        // strand j of the second bunch, now at p + x + j, moves left to p + j
        for k in (0..x).rev() {
            let left = p + j + k;
            let mut s = vec![Atom::Id; left];
            s.push(atom.clone());
            s.extend(std::iter::repeat_n(Atom::Id, width - left - 2));
            out.push(s);
        }
    }
    out
}

/// Crossing used by canonical routing: the `b_R` bunch passes under `a_L`.
fn routing_atom() -> Atom {
    Atom::CrossNeg
}

/// Crossing used when a lower strand moves left under an upper one.
fn stack_atom() -> Atom {
    Atom::CrossPos
}

/// The routing slices for a handle-strand vector.
fn routing_slices(surface: Surface, hs: &[usize], routing: Routing) -> Vec<Vec<Atom>> {
    if routing == Routing::Explicit {
        return Vec::new();
    }
    let width = 2 * hs.iter().sum::<usize>();
    let mut out = Vec::new();
    let mut base = 0;
    for i in 0..surface.g as usize {
        let (mb, ma) = (hs[2 * i], hs[2 * i + 1]);
        if mb > 0 && ma > 0 {
            out.extend(bunch_swap(width, base + mb, mb, ma, &routing_atom()));
        }
        base += 2 * (mb + ma);
    }
    out
}

/// Evaluate a diagram to its holonomy tensor.
pub fn eval_diagram(d: &DiagramIR, mode: Mode) -> Result<HolTensor, HolonomyError> {
    d.validate()?;
    let alg = LgnAlgebra::get(d.surface, mode)?;
    let mut v = HolTensor::unit(&alg);
    for (k, &m) in d.handle_strands.iter().enumerate() {
        if m == 0 {
            continue;
        }
        let (f, h) = handle_position(d.surface, k);
        let slot = d.surface.slot_of(f, h).expect("valid handle");
        v = v.odot(&handle_vector(&alg, slot, m)?)?;
    }
    for s in routing_slices(d.surface, &d.handle_strands, d.routing)
        .iter()
        .chain(d.slices.iter())
    {
        v = apply_slice(&v, s);
    }
    Ok(v)
}

fn apply_slice(v: &HolTensor, slice: &[Atom]) -> HolTensor {
    // right to left, so offsets of the atoms still to come are unchanged
    let mut offsets = Vec::with_capacity(slice.len());
    let mut o = 0;
    for a in slice {
        offsets.push(o);
        o += a.inputs();
    }
    let mut cur = v.clone();
    for (a, off) in slice.iter().zip(offsets).rev() {
        if *a != Atom::Id {
            cur = cur.apply(&a.tensor(), off);
        }
    }
    cur
}

/// `hol^s`: the component of the holonomy tensor at the diagram's states.
pub fn hol_stated(d: &DiagramIR, mode: Mode) -> Result<LgnElement, HolonomyError> {
    let st = d.states.clone().ok_or(HolonomyError::MissingStates)?;
    eval_diagram(d, mode)?.component(&st)
}

/// The holonomy of a closed diagram.
pub fn wilson_loop(d: &DiagramIR, mode: Mode) -> Result<LgnElement, HolonomyError> {
    let k = d.validate()?;
    if k != 0 {
        return Err(HolonomyError::NotClosed(k));
    }
    eval_diagram(d, mode)?.component(&[])
}

/// The stated arc `U^{(x)}` of a generator curve with states `(s, t)`.
pub fn generator_arc(
    surface: Surface,
    family: Family,
    handle: u32,
    s: State,
    t: State,
) -> Result<DiagramIR, HolonomyError> {
    let pos = position_of(surface, family, handle)
        .ok_or_else(|| LgnError::InvalidGenerator(format!("{}{}", family.letter(), handle), surface))?;
    let mut d = DiagramIR::empty(surface);
    d.handle_strands[pos] = 1;
    Ok(d.with_states(vec![s, t]))
}

/// The closed loop around one generator curve (quantum-trace closure).
pub fn generator_loop(surface: Surface, family: Family, handle: u32) -> Result<DiagramIR, HolonomyError> {
    let mut d = generator_arc(surface, family, handle, State::Minus, State::Minus)?;
    d.states = None;
    d.slices.push(vec![Atom::Cap]);
    Ok(d)
}

// ---------------------------------------------------------------------------
// Stacking
// ---------------------------------------------------------------------------

/// Leg labels `(diagram, leg index in its own routed order)` of the merged bottom row.
fn merged_leg_labels(d1: &DiagramIR, d2: &DiagramIR) -> Vec<(u8, usize)> {
    let surface = d1.surface;
    // per handle: merged left bunch and right bunch, with the lower diagram outermost
    let mut own: [Vec<Vec<usize>>; 2] = [Vec::new(), Vec::new()];
    // own routed order of each diagram, expressed as (handle, side, strand) keys
    for (t, d) in [d1, d2].iter().enumerate() {
        own[t] = routed_keys(surface, &d.handle_strands, d.routing);
    }
    let merged_hs: Vec<usize> = d1
        .handle_strands
        .iter()
        .zip(&d2.handle_strands)
        .map(|(a, b)| a + b)
        .collect();
    let mkeys = routed_keys(surface, &merged_hs, d1.routing);
    mkeys
        .iter()
        .map(|key| {
            let (h, side, strand) = (key[0], key[1], key[2]);
            let m1 = d1.handle_strands[h];
            let (t, s) = if strand < m1 { (0u8, strand) } else { (1u8, strand - m1) };
            let idx = own[t as usize]
                .iter()
                .position(|k| k[0] == h && k[1] == side && k[2] == s)
                .expect("leg present");
            (t, idx)
        })
        .collect()
}

/// Keys `[handle, side (0 = left), strand (0 = outermost)]` in routed bottom order.
fn routed_keys(surface: Surface, hs: &[usize], routing: Routing) -> Vec<Vec<usize>> {
    let bunch = |h: usize, side: usize| -> Vec<Vec<usize>> {
        let m = hs[h];
        if side == 0 {
            (0..m).map(|k| vec![h, 0, k]).collect()
        } else {
            (0..m).rev().map(|k| vec![h, 1, k]).collect()
        }
    };
    let mut out = Vec::new();
    let g = surface.g as usize;
    for i in 0..g {
        let (b, a) = (2 * i, 2 * i + 1);
        match routing {
            Routing::Canonical => {
                out.extend(bunch(b, 0));
                out.extend(bunch(a, 0));
                out.extend(bunch(b, 1));
                out.extend(bunch(a, 1));
            }
            Routing::Explicit => {
                out.extend(bunch(b, 0));
                out.extend(bunch(b, 1));
                out.extend(bunch(a, 0));
                out.extend(bunch(a, 1));
            }
        }
    }
    for h in 2 * g..hs.len() {
        out.extend(bunch(h, 0));
        out.extend(bunch(h, 1));
    }
    out
}

/// `d1 ∗ d2`: `d1` below `d2`.
pub fn stack(d1: &DiagramIR, d2: &DiagramIR) -> Result<DiagramIR, HolonomyError> {
    if d1.surface != d2.surface {
        return Err(HolonomyError::SurfaceMismatch(d1.surface, d2.surface));
    }
    let k1 = d1.validate()?;
    d2.validate()?;
    if d1.bottom_width() == 0 && d1.slices.is_empty() && d1.states.is_none() {
        return Ok(d2.clone());
    }
    if d2.bottom_width() == 0 && d2.slices.is_empty() && d2.states.is_none() {
        return Ok(d1.clone());
    }
    let routing = if d1.bottom_width() == 0 {
        d2.routing
    } else if d2.bottom_width() == 0 || d1.routing == d2.routing {
        d1.routing
    } else {
        return Err(HolonomyError::RoutingMismatch);
    };
    let (mut a, mut b) = (d1.clone(), d2.clone());
    a.routing = routing;
    b.routing = routing;
    let mut labels = merged_leg_labels(&a, &b);
    let width = labels.len();
    let mut slices = Vec::new();
    // stable sort: every leg of the lower diagram moves left, under the upper ones
    while let Some(i) = (0..width.saturating_sub(1)).find(|&i| labels[i].0 == 1 && labels[i + 1].0 == 0) {
        let mut s = vec![Atom::Id; i];
        s.push(stack_atom());
        s.extend(std::iter::repeat_n(Atom::Id, width - i - 2));
        slices.push(s);
        labels.swap(i, i + 1);
    }
    let w2 = b.bottom_width();
    for s in &a.slices {
        let mut row = s.clone();
        row.extend(std::iter::repeat_n(Atom::Id, w2));
        slices.push(row);
    }
    for s in &b.slices {
        let mut row = vec![Atom::Id; k1];
        row.extend(s.iter().cloned());
        slices.push(row);
    }
    let states = match (&a.states, &b.states) {
        (Some(x), Some(y)) => Some(x.iter().chain(y).copied().collect()),
        (None, None) => None,
        (Some(x), None) if b.validate()? == 0 => Some(x.clone()),
        (None, Some(y)) if k1 == 0 => Some(y.clone()),
        _ => return Err(HolonomyError::MissingStates),
    };
    let d = DiagramIR {
        surface: a.surface,
        handle_strands: a
            .handle_strands
            .iter()
            .zip(&b.handle_strands)
            .map(|(x, y)| x + y)
            .collect(),
        routing,
        slices,
        states,
    };
    d.validate()?;
    Ok(d)
}

// ---------------------------------------------------------------------------
// Stated-skein dictionary
// ---------------------------------------------------------------------------

/// `j(X)^s_t` as a combination `Σ c · U^{(x)}{}^{s'}_{t'}` of generator arcs.
pub type ArcCombination = Vec<(LaurentScalar, State, State)>;

/// `j(X) = U^{(x)} (ᵗD)^{-1}`, entry by entry.
pub fn j_defining(s: State, t: State) -> ArcCombination {
    let inv = d_transpose().inverse().expect("ᵗD is invertible");
    [State::Minus, State::Plus]
        .into_iter()
        .filter_map(|k| {
            let c = inv.get(k.index(), t.index()).clone();
            (!c.is_zero()).then_some((c, s, k))
        })
        .collect()
}

/// The explicit entry-by-entry dictionary (`j(X^-_-) = q^{-5/2} U^-_+`, `j(X^-_+) = −q^{-1/2} U^-_-`, …).
pub fn j_literal(s: State, t: State) -> ArcCombination {
    let (c, k) = match t {
        State::Minus => (LaurentScalar::q_half_pow(-5), State::Plus),
        State::Plus => (-LaurentScalar::q_half_pow(-1), State::Minus),
    };
    vec![(c, s, k)]
}

/// `hol^s(j(X)^s_t)` for a generator of the surface.
pub fn hol_of_j(
    surface: Surface,
    family: Family,
    handle: u32,
    s: State,
    t: State,
    table: fn(State, State) -> ArcCombination,
    mode: Mode,
) -> Result<LgnElement, HolonomyError> {
    let alg = LgnAlgebra::get(surface, mode)?;
    let mut e = LgnElement::zero(&alg);
    for (c, s2, t2) in table(s, t) {
        let arc = generator_arc(surface, family, handle, s2, t2)?;
        e.add_assign(&hol_stated(&arc, mode)?.scale_laurent(&c));
    }
    Ok(e)
}

/// Stack a word of stated diagrams (first letter lowest) and evaluate it.
pub fn hol_of_stacked_word(words: &[DiagramIR], mode: Mode, surface: Surface) -> Result<LgnElement, HolonomyError> {
    let mut d = DiagramIR::empty(surface).with_states(Vec::new());
    for w in words {
        d = stack(&d, w)?;
    }
    hol_stated(&d, mode)
}

/// Images of the defining relations under `X(i) ↦ U^{(x_i)} (ᵗD)^{-1}`, each word
/// realized geometrically as a stack of generator arcs.
pub fn substituted_relation_values(surface: Surface, mode: Mode) -> Result<Vec<(String, LgnElement)>, HolonomyError> {
    let alg = LgnAlgebra::get(surface, mode)?;
    let rels = crate::lgn::defining_relations(surface, mode)?;
    let mut out = Vec::new();
    for r in rels {
        let mut total = LgnElement::zero(&alg);
        for (c, word) in &r.terms {
            // expand each letter into its arc combination
            let mut partial: Vec<(LaurentScalar, Vec<DiagramIR>)> = vec![(c.clone(), Vec::new())];
            for id in word {
                let mut next = Vec::new();
                for (pc, ws) in &partial {
                    for (c2, s2, t2) in j_defining(id.row, id.col) {
                        let mut w = ws.clone();
                        w.push(generator_arc(surface, id.family, id.handle, s2, t2)?);
                        next.push((pc * &c2, w));
                    }
                }
                partial = next;
            }
            for (pc, ws) in partial {
                total.add_assign(&hol_of_stacked_word(&ws, mode, surface)?.scale_laurent(&pc));
            }
        }
        out.push((r.label, total));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Skein relations in context
// ---------------------------------------------------------------------------

/// Constant of the trivial boundary arc with states `(s, t)` (left, right).
pub fn boundary_arc_value(s: State, t: State) -> LaurentScalar {
    match (s, t) {
        (State::Plus, State::Minus) => LaurentScalar::q_half_pow(1),
        (State::Minus, State::Plus) => -LaurentScalar::q_half_pow(5),
        _ => LaurentScalar::zero(),
    }
}

/// Check both boundary relations at legs `(i, i + 1)` of a stated context with
/// at least two boundary points: the arc relation for a cup inserted there, and
/// the state-exchange relation `[−+] = q^{-2} [+−] + q^{1/2} [capped]`.
pub fn check_boundary_relations(ctx: &DiagramIR, i: usize, mode: Mode) -> Result<bool, HolonomyError> {
    let k = ctx.validate()?;
    let st = ctx.states.clone().ok_or(HolonomyError::MissingStates)?;
    let base = eval_diagram(ctx, mode)?;
    let mut ok = true;
    // arc relation: insert a cup at position i (0 ≤ i ≤ k)
    if i <= k {
        let mut d = ctx.clone();
        let mut s = vec![Atom::Id; i];
        s.push(Atom::Cup);
        s.extend(std::iter::repeat_n(Atom::Id, k - i));
        d.slices.push(s);
        let ev = eval_diagram(&DiagramIR { states: None, ..d }, mode)?;
        for a in [State::Minus, State::Plus] {
            for b in [State::Minus, State::Plus] {
                let mut st2 = st.clone();
                st2.splice(i..i, [a, b]);
                let lhs = ev.component(&st2)?;
                let rhs = base.component(&st)?.scale_laurent(&boundary_arc_value(a, b));
                ok &= lhs == rhs;
            }
        }
    }
    // state exchange at legs (i, i + 1)
    if i + 1 < k {
        let mut capped = ctx.clone();
        let mut s = vec![Atom::Id; i];
        s.push(Atom::Cap);
        s.extend(std::iter::repeat_n(Atom::Id, k - i - 2));
        capped.slices.push(s);
        let ev_c = eval_diagram(&DiagramIR { states: None, ..capped }, mode)?;
        let mut rest = st.clone();
        rest.drain(i..i + 2);
        let with = |a: State, b: State| {
            let mut s2 = st.clone();
            s2[i] = a;
            s2[i + 1] = b;
            base.component(&s2)
        };
        let lhs = with(State::Minus, State::Plus)?;
        let rhs = with(State::Plus, State::Minus)?
            .scale_laurent(&LaurentScalar::q_pow(-2))
            .add(&ev_c.component(&rest)?.scale_laurent(&LaurentScalar::q_half_pow(1)));
        ok &= lhs == rhs;
    }
    Ok(ok)
}

/// Kauffman relation inside a context: replacing the slice `slice` (which must
/// contain a crossing at atom `atom`) by `q·id + q^{-1}·cup∘cap` (or the mirror
/// for a negative crossing) leaves the holonomy unchanged.
pub fn check_kauffman_in_context(d: &DiagramIR, slice: usize, atom: usize, mode: Mode) -> Result<bool, HolonomyError> {
    let a = &d.slices[slice][atom];
    let (alpha, beta) = match a {
        Atom::CrossPos => (LaurentScalar::q_pow(1), LaurentScalar::q_pow(-1)),
        Atom::CrossNeg => (LaurentScalar::q_pow(-1), LaurentScalar::q_pow(1)),
        _ => return Ok(true),
    };
    let full = eval_diagram(
        &DiagramIR {
            states: None,
            ..d.clone()
        },
        mode,
    )?;
    let mut smooth_id = d.clone();
    smooth_id.slices[slice].splice(atom..=atom, [Atom::Id, Atom::Id]);
    let mut smooth_cc = d.clone();
    smooth_cc.slices[slice][atom] = Atom::Cap;
    let w_before: usize = d.slices[slice][..atom].iter().map(Atom::outputs).sum();
    let w_after: usize = d.slices[slice][atom + 1..].iter().map(Atom::outputs).sum();
    let mut cup_slice = vec![Atom::Id; w_before];
    cup_slice.push(Atom::Cup);
    cup_slice.extend(std::iter::repeat_n(Atom::Id, w_after));
    smooth_cc.slices.insert(slice + 1, cup_slice);
    let e1 = eval_diagram(
        &DiagramIR {
            states: None,
            ..smooth_id
        },
        mode,
    )?;
    let e2 = eval_diagram(
        &DiagramIR {
            states: None,
            ..smooth_cc
        },
        mode,
    )?;
    let mut ok = true;
    let keys: std::collections::BTreeSet<usize> = full
        .entries
        .keys()
        .chain(e1.entries.keys())
        .chain(e2.entries.keys())
        .copied()
        .collect();
    for k in keys {
        let get = |t: &HolTensor| t.entries.get(&k).cloned().unwrap_or_else(|| LgnElement::zero(&t.alg));
        let rhs = get(&e1).scale_laurent(&alpha).add(&get(&e2).scale_laurent(&beta));
        ok &= get(&full) == rhs;
    }
    Ok(ok)
}

/// `c·JW_n` with `c` the returned Laurent scalar, so that all entries stay in the ring.
///
/// Built by the usual recursion with loop value `−q² − q^{-2}`.
pub fn jones_wenzl_scaled(n: usize) -> (Tensor, LaurentScalar) {
    let delta = |k: usize| -> LaurentScalar {
        // Chebyshev: Δ_0 = 1, Δ_1 = d, Δ_{k+1} = d Δ_k − Δ_{k−1}
        let d = -&(&LaurentScalar::q_pow(2) + &LaurentScalar::q_pow(-2));
        let (mut a, mut b) = (LaurentScalar::one(), d.clone());
        if k == 0 {
            return a;
        }
        for _ in 1..k {
            let c = &(&d * &b) - &a;
            a = b;
            b = c;
        }
        b
    };
    if n <= 1 {
        return (Tensor::identity(n), LaurentScalar::one());
    }
    let (mut p, mut c) = (Tensor::identity(1), LaurentScalar::one());
    let e = Tensor::compose(&cup(), &cap()).expect("arity");
    for k in 2..=n {
        let pk = Tensor::hcat(&p, &Tensor::identity(1));
        let ek = Tensor::hcat(&Tensor::identity(k - 2), &e);
        let term = Tensor::compose_chain(&[pk.clone(), ek, pk.clone()]).expect("arity");
        let a = &delta(k - 1) * &c;
        p = pk.scale(&a).add(&term.scale(&-delta(k - 2))).expect("arity");
        c = &a * &c;
    }
    (p, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use State::{Minus as Mi, Plus as Pl};

    fn s(g: u32, n: u32) -> Surface {
        Surface::new(g, n).unwrap()
    }

    #[test]
    fn m_loop_is_quantum_trace() {
        let d = generator_loop(s(0, 1), Family::M, 1).unwrap();
        assert_eq!(
            wilson_loop(&d, Mode::Generic).unwrap().to_string(),
            "-q^2 * M1[-,-] - q^-2 * M1[+,+]"
        );
    }

    #[test]
    fn unknot_and_kink() {
        let mut d = DiagramIR::empty(s(0, 1));
        d.slices = vec![vec![Atom::Cup], vec![Atom::Cap]];
        assert_eq!(wilson_loop(&d, Mode::Generic).unwrap().to_string(), "-q^2 - q^-2");
        // both strands upward through x+: writhe +1
        d.slices = vec![
            vec![Atom::Cup],
            vec![Atom::Id, Atom::Id, Atom::Cup],
            vec![Atom::Id, Atom::CrossPos, Atom::Id],
            vec![Atom::Cap, Atom::Cap],
        ];
        assert_eq!(wilson_loop(&d, Mode::Generic).unwrap().to_string(), "q^5 + q");
        // antiparallel strands through x+: writhe −1
        d.slices = vec![vec![Atom::Cup], vec![Atom::CrossPos], vec![Atom::Cap]];
        assert_eq!(wilson_loop(&d, Mode::Generic).unwrap().to_string(), "q^-1 + q^-5");
    }

    #[test]
    fn generator_arcs_give_x_td() {
        let sf = s(1, 1);
        let alg = LgnAlgebra::get(sf, Mode::Generic).unwrap();
        let td = d_transpose();
        for (f, h) in [(Family::B, 1), (Family::A, 1), (Family::M, 2)] {
            for a in [Mi, Pl] {
                for b in [Mi, Pl] {
                    let arc = generator_arc(sf, f, h, a, b).unwrap();
                    let got = hol_stated(&arc, Mode::Generic).unwrap();
                    let mut want = LgnElement::zero(&alg);
                    for k in [Mi, Pl] {
                        let x = LgnElement::generator(&alg, crate::lgn::GeneratorId::new(f, h, a, k)).unwrap();
                        want.add_assign(&x.scale_laurent(td.get(k.index(), b.index())));
                    }
                    assert_eq!(got, want);
                }
            }
        }
    }

    #[test]
    fn width_mismatch_is_reported() {
        let text = r#"{"surface":{"g":0,"n":1},"handle_strands":[1],"slices":[["cap","id"]]}"#;
        match DiagramIR::parse(text) {
            Err(HolonomyError::WidthMismatch {
                slice: 0,
                expected: 2,
                found: 3,
            }) => {}
            other => panic!("{other:?}"),
        }
        let text = r#"{"surface":{"g":0,"n":1},"handle_strands":[1],"slices":[["cap2"]]}"#;
        assert!(matches!(
            DiagramIR::parse(text),
            Err(HolonomyError::UnknownAtom { slice: 0, atom: 0, .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"surface":{"g":1,"n":0},"handle_strands":[1,1],"routing":"canonical",
            "slices":[["id","x+","id"],[{"coupon":"d_transpose"},"id","id","id"]],"states":["-","+","+","-"]}"#;
        let d = DiagramIR::parse(text).unwrap();
        assert_eq!(DiagramIR::from_json(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn jones_wenzl_is_idempotent_up_to_scale() {
        for n in 2..=3 {
            let (p, c) = jones_wenzl_scaled(n);
            let pp = Tensor::compose(&p, &p).unwrap();
            assert_eq!(pp, p.scale(&c));
        }
    }
}
