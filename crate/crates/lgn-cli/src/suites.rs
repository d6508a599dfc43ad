//! Verification suites behind `lgn verify`.
//!
//! Every suite is deterministic for a given seed: random inputs come from a
//! seeded ChaCha stream, and failures are reported in case order.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use lgn_core::corpus::{random_diagram, random_element};
use lgn_core::holonomy::{
    eval_diagram, generator_arc, hol_of_j, hol_stated, j_defining, j_literal, stack, Atom, DiagramIR,
};
use lgn_core::lgn::{defining_relations, evaluate_relation};
use lgn_core::torus::composition_series_report;
use lgn_core::vacuum::{stack_act_check, vacuum_act};
use lgn_core::{Family, GeneratorId, LgnAlgebra, LgnElement, Mode, State, Surface};

use crate::{surface_json, CliError, Opts};

const STATES: [State; 2] = [State::Minus, State::Plus];

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Defining relations reduce to zero.
    Relations,
    /// Reidemeister moves, zig-zags and slice commutation leave evaluation unchanged.
    Isotopy,
    /// Stacking diagrams multiplies their holonomies.
    Stack,
    /// Stated holonomy inverts the generator dictionary.
    Iso,
    /// The vacuum representation of the handlebody.
    Vacuum,
    /// The torus representation at a root of unity.
    Torus,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table {
    /// `j(X) = U (ᵗD)^{-1}`.
    Defining,
    /// The explicit entry-by-entry dictionary.
    Literal,
}

pub struct Report {
    pub suite: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
    pub details: Value,
}

impl Report {
    fn new(suite: &'static str, details: Value) -> Self {
        Self {
            suite,
            cases: 0,
            failures: Vec::new(),
            details,
        }
    }

    fn case(&mut self, id: String, ok: bool) {
        self.cases += 1;
        if !ok {
            self.failures.push(id);
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "cases": self.cases,
            "failures": self.failures,
            "details": self.details,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "suite {}: {} cases, {} failures\n",
            self.suite,
            self.cases,
            self.failures.len()
        );
        for f in &self.failures {
            s.push_str(&format!("  FAIL {f}\n"));
        }
        s
    }
}

pub fn run(suite: Suite, table: Table, o: &Opts) -> Result<Report, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    let budget = o.budget.unwrap_or(3).max(1);
    match suite {
        Suite::Relations => relations(o),
        Suite::Isotopy => isotopy(o, &mut rng, budget),
        Suite::Stack => stack_suite(o, &mut rng, budget),
        Suite::Iso => iso(o, table),
        Suite::Vacuum => vacuum(o, &mut rng, budget),
        Suite::Torus => torus(o),
    }
}

fn relations(o: &Opts) -> Result<Report, CliError> {
    let (s, mode) = (o.surface()?, o.mode()?);
    let alg = LgnAlgebra::get(s, mode)?;
    let mut r = Report::new(
        "relations",
        json!({ "surface": surface_json(s), "mode": mode.to_string() }),
    );
    for (k, rel) in defining_relations(s, mode)?.iter().enumerate() {
        r.case(format!("#{k} {}", rel.label), evaluate_relation(&alg, rel)?.is_zero());
    }
    Ok(r)
}

/// Slice of identities with a two-input `atom` at strand `i`.
fn at(width: usize, i: usize, atom: Atom) -> Vec<Atom> {
    let mut row = vec![Atom::Id; i];
    row.push(atom);
    row.extend(std::iter::repeat_n(Atom::Id, width - i - 2));
    row
}

fn extend(d: &DiagramIR, rows: &[Vec<Atom>]) -> DiagramIR {
    let mut out = d.clone();
    for r in rows {
        out.push_slice(r.clone());
    }
    out
}

/// A random stated diagram whose top has at least `min_width` legs, if one turns up.
fn wide(rng: &mut ChaCha8Rng, s: Surface, budget: usize, min_width: usize) -> Option<(DiagramIR, usize)> {
    (0..1000).find_map(|_| {
        let d = random_diagram(rng, s, budget, 2);
        let w = d.validate().ok()?;
        (w >= min_width).then_some((d, w))
    })
}

fn isotopy(o: &Opts, rng: &mut ChaCha8Rng, budget: usize) -> Result<Report, CliError> {
    let (s, mode) = (o.surface()?, o.mode()?);
    let mut r = Report::new(
        "isotopy",
        json!({ "surface": surface_json(s), "mode": mode.to_string() }),
    );
    let moves = ["reidemeister-2", "reidemeister-3", "zigzag", "commute"];
    let min_width = [2, 3, 1, 4];
    for k in 0..o.cases {
        let m = k % moves.len();
        let id = format!("#{k} {}", moves[m]);
        let Some((d, w)) = wide(rng, s, budget.max(2), min_width[m]) else {
            r.case(format!("{id} (no diagram within budget)"), false);
            continue;
        };
        let (x, y) = if rng.gen_bool(0.5) {
            (Atom::CrossPos, Atom::CrossNeg)
        } else {
            (Atom::CrossNeg, Atom::CrossPos)
        };
        let (lhs, rhs) = match m {
            0 => {
                let i = rng.gen_range(0..w - 1);
                (d.clone(), extend(&d, &[at(w, i, x), at(w, i, y)]))
            }
            1 => {
                let i = rng.gen_range(0..w - 2);
                let (a, b) = (at(w, i, x.clone()), at(w, i + 1, x));
                (
                    extend(&d, &[a.clone(), b.clone(), a.clone()]),
                    extend(&d, &[b.clone(), a, b]),
                )
            }
            2 => {
                let i = rng.gen_range(0..w);
                let mut up = vec![Atom::Id; w];
                up.insert(i + 1, Atom::Cup);
                (d.clone(), extend(&d, &[up, at(w + 2, i, Atom::Cap)]))
            }
            _ => {
                let i = rng.gen_range(0..w - 3);
                let j = rng.gen_range(i + 2..w - 1);
                (
                    extend(&d, &[at(w, i, x.clone()), at(w, j, y.clone())]),
                    extend(&d, &[at(w, j, y), at(w, i, x)]),
                )
            }
        };
        r.case(id, eval_diagram(&lhs, mode)? == eval_diagram(&rhs, mode)?);
    }
    Ok(r)
}

fn stack_suite(o: &Opts, rng: &mut ChaCha8Rng, budget: usize) -> Result<Report, CliError> {
    let (s, mode) = (o.surface()?, o.mode()?);
    let mut r = Report::new("stack", json!({ "surface": surface_json(s), "mode": mode.to_string() }));
    for k in 0..o.cases {
        let d1 = random_diagram(rng, s, budget, 3);
        let d2 = random_diagram(rng, s, budget, 3);
        let lhs = eval_diagram(&stack(&d1, &d2)?, mode)?;
        let rhs = eval_diagram(&d1, mode)?.odot(&eval_diagram(&d2, mode)?)?;
        r.case(format!("#{k} random pair"), lhs == rhs);
    }
    // arcs through b and a of every genus handle, in both orders
    for h in 1..=s.g {
        for (f1, f2) in [(Family::B, Family::A), (Family::A, Family::B)] {
            let mut ok = true;
            for (a, b, c, d) in states4() {
                let u = generator_arc(s, f1, h, a, b)?;
                let v = generator_arc(s, f2, h, c, d)?;
                let lhs = hol_stated(&stack(&u, &v)?, mode)?;
                ok &= lhs == hol_stated(&u, mode)?.mul(&hol_stated(&v, mode)?)?;
            }
            r.case(format!("{f1:?}{h} arc below {f2:?}{h} arc"), ok);
        }
    }
    Ok(r)
}

fn states4() -> impl Iterator<Item = (State, State, State, State)> {
    (0..16).map(|i| {
        (
            STATES[i & 1],
            STATES[(i >> 1) & 1],
            STATES[(i >> 2) & 1],
            STATES[(i >> 3) & 1],
        )
    })
}

fn iso(o: &Opts, table: Table) -> Result<Report, CliError> {
    let (s, mode) = (o.surface()?, o.mode()?);
    let alg = LgnAlgebra::get(s, mode)?;
    let t = match table {
        Table::Defining => j_defining,
        Table::Literal => j_literal,
    };
    let name = match table {
        Table::Defining => "defining",
        Table::Literal => "literal",
    };
    let mut r = Report::new(
        "iso",
        json!({ "surface": surface_json(s), "mode": mode.to_string(), "table": name }),
    );
    for slot in 0..s.n_slots() {
        let (f, h) = s.family_of_slot(slot);
        for a in STATES {
            for b in STATES {
                let x = LgnElement::generator(&alg, GeneratorId::new(f, h, a, b))?;
                let ok = hol_of_j(s, f, h, a, b, t, mode)? == x;
                r.case(format!("{f:?}{h}[{},{}]", a.symbol(), b.symbol()), ok);
            }
        }
    }
    Ok(r)
}

fn vacuum(o: &Opts, rng: &mut ChaCha8Rng, budget: usize) -> Result<Report, CliError> {
    let g = o.g;
    if g == 0 {
        return Err(CliError::Usage(
            "the vacuum suite needs --g ≥ 1 (it acts on (0,g) by (g,0))".into(),
        ));
    }
    let mode = o.mode()?;
    let (s0, s1) = (Surface::new(0, g)?, Surface::new(g, 0)?);
    let (a0, a1) = (LgnAlgebra::get(s0, mode)?, LgnAlgebra::get(s1, mode)?);
    let mut r = Report::new("vacuum", json!({ "g": g, "mode": mode.to_string() }));
    let one = LgnElement::one(&a0);
    for h in 1..=g {
        for a in STATES {
            for b in STATES {
                let v = vacuum_act(&one, &LgnElement::generator(&a1, GeneratorId::new(Family::A, h, a, b))?)?;
                let ok = if a == b { v == one } else { v.is_zero() };
                r.case(format!("1 <| A{h}[{},{}]", a.symbol(), b.symbol()), ok);
            }
        }
    }
    let len = budget.min(3);
    for k in 0..o.cases {
        let x = random_element(rng, &a0, 2, len)?;
        let y1 = random_element(rng, &a1, 2, len.min(2))?;
        let y2 = random_element(rng, &a1, 2, len.min(2))?;
        let lhs = vacuum_act(&vacuum_act(&x, &y1)?, &y2)?;
        let ok = lhs == vacuum_act(&x, &y1.mul(&y2)?)? && vacuum_act(&x, &LgnElement::one(&a1))? == x;
        r.case(format!("#{k} module law"), ok);
    }
    if mode == Mode::Generic {
        for k in 0..o.cases {
            let sd = random_diagram(rng, s0, budget, 3);
            let td = random_diagram(rng, s1, budget, 3);
            r.case(format!("#{k} stacking"), stack_act_check(&sd, &td, mode)?);
        }
    }
    Ok(r)
}

fn torus(o: &Opts) -> Result<Report, CliError> {
    let rep = composition_series_report(o.p)?;
    let mut r = Report::new(
        "torus",
        json!({
            "p": rep.p,
            "factor_dims": rep.factor_dims,
            "burnside_spans": rep.burnside.iter().map(|b| b.span_dim).collect::<Vec<_>>(),
        }),
    );
    for row in &rep.eigenvalues {
        r.case(format!("a-eigenvalue on {}", row.vector), row.matches);
    }
    r.case("J1 invariant".into(), rep.j1_invariant);
    r.case("J2 invariant".into(), rep.j2_invariant);
    let p = rep.p as usize;
    r.case("factor dimensions".into(), rep.factor_dims == [p + 1, p - 1, p - 1]);
    for b in &rep.burnside {
        r.case(format!("{} irreducible", b.label), b.absolutely_irreducible);
    }
    Ok(r)
}
