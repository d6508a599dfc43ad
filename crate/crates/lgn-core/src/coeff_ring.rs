//! Exact coefficient rings.
//!
//! [`LaurentScalar`] is an element of `Z[q^{1/2}, q^{-1/2}]`; exponents are
//! stored in half-units, so the monomial `q^{3/2}` has stored exponent `3`.
//! [`CycloScalar`] is an element of the cyclotomic field `Q(ζ_{8p})`, the
//! image of the Laurent ring under `q^{1/2} ↦ ζ_{8p}` (so `q ↦ e^{iπ/2p}`).
//! [`Scalar`] wraps both so values of either ring can travel through one API.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoeffError {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("scalar parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
}

// ---------------------------------------------------------------------------
// Laurent polynomials in q^{1/2}
// ---------------------------------------------------------------------------

/// Sparse Laurent polynomial in `q^{1/2}` with integer coefficients.
///
/// Terms are kept sorted by increasing half-exponent with no zero
/// coefficients, so derived equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct LaurentScalar {
    terms: Vec<(i32, i64)>,
}

impl LaurentScalar {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(c: i64) -> Self {
        Self::monomial(c, 0)
    }

    /// `c · q^{half/2}`.
    pub fn monomial(c: i64, half: i32) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            Self { terms: vec![(half, c)] }
        }
    }

    /// `q^n` for an integer power `n`.
    pub fn q_pow(n: i32) -> Self {
        Self::monomial(1, 2 * n)
    }

    /// `q^{half/2}`.
    pub fn q_half_pow(half: i32) -> Self {
        Self::monomial(1, half)
    }

    /// Build from arbitrary `(half-exponent, coefficient)` pairs; duplicates are summed.
    pub fn from_terms(it: impl IntoIterator<Item = (i32, i64)>) -> Self {
        let mut v: Vec<(i32, i64)> = it.into_iter().collect();
        v.sort_unstable_by_key(|t| t.0);
        let mut out: Vec<(i32, i64)> = Vec::with_capacity(v.len());
        for (e, c) in v {
            match out.last_mut() {
                Some(last) if last.0 == e => last.1 += c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|t| t.1 != 0);
        Self { terms: out }
    }

    /// Terms as `(half-exponent, coefficient)`, increasing exponent.
    pub fn terms(&self) -> &[(i32, i64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0] == (0, 1)
    }

    /// If the scalar is `±q^{k/2}`, return `(sign, k)`.
    pub fn as_unit(&self) -> Option<(i64, i32)> {
        match self.terms.as_slice() {
            [(e, c)] if c.abs() == 1 => Some((*c, *e)),
            _ => None,
        }
    }

    /// Inverse of a unit `±q^{k/2}`; `None` for non-units.
    pub fn unit_inverse(&self) -> Option<Self> {
        self.as_unit().map(|(s, e)| Self::monomial(s, -e))
    }

    pub fn scale(&self, c: i64) -> Self {
        if c == 0 {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|&(e, x)| (e, x * c)).collect(),
        }
    }

    /// Multiply by `q^{half/2}`.
    pub fn shift(&self, half: i32) -> Self {
        Self {
            terms: self.terms.iter().map(|&(e, x)| (e + half, x)).collect(),
        }
    }

    /// Substitute `q^{1/2} ↦ q^{-1/2}`.
    pub fn bar(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|&(e, c)| (-e, c)))
    }

    fn merge(&self, other: &Self, sign: i64) -> Self {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, sign * b[j].1));
                j += 1;
            } else {
                let c = a[i].1 + sign * b[j].1;
                if c != 0 {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        Self { terms: out }
    }

    /// Exact division; `None` if `d` does not divide `self` in the Laurent ring.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if let Some((s, e)) = d.as_unit() {
            return Some(self.shift(-e).scale(s));
        }
        let mut rem = self.clone();
        let mut quot: Vec<(i32, i64)> = Vec::new();
        let (dl_e, dl_c) = *d.terms.last().unwrap();
        let d_lo = d.terms[0].0;
        while !rem.is_zero() {
            let (re, rc) = *rem.terms.last().unwrap();
            if rc % dl_c != 0 || re - dl_e < rem.terms[0].0 - d_lo {
                return None;
            }
            let t = Self::monomial(rc / dl_c, re - dl_e);
            quot.push((re - dl_e, rc / dl_c));
            rem = &rem - &(&t * d);
        }
        Some(Self::from_terms(quot))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut r = Self::one();
        for _ in 0..n {
            r = &r * self;
        }
        r
    }

    pub fn parse(s: &str) -> Result<Self, CoeffError> {
        parse_laurent(s)
    }
}

impl Add for &LaurentScalar {
    type Output = LaurentScalar;
    fn add(self, o: &LaurentScalar) -> LaurentScalar {
        self.merge(o, 1)
    }
}
impl Sub for &LaurentScalar {
    type Output = LaurentScalar;
    fn sub(self, o: &LaurentScalar) -> LaurentScalar {
        self.merge(o, -1)
    }
}
impl Mul for &LaurentScalar {
    type Output = LaurentScalar;
    fn mul(self, o: &LaurentScalar) -> LaurentScalar {
        if self.is_zero() || o.is_zero() {
            return LaurentScalar::zero();
        }
        if self.terms.len() == 1 {
            let (e, c) = self.terms[0];
            return LaurentScalar {
                terms: o.terms.iter().map(|&(f, d)| (e + f, c * d)).collect(),
            };
        }
        let mut v = Vec::with_capacity(self.terms.len() * o.terms.len());
        for &(e, c) in &self.terms {
            for &(f, d) in &o.terms {
                v.push((e + f, c * d));
            }
        }
        LaurentScalar::from_terms(v)
    }
}
impl Neg for &LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        self.scale(-1)
    }
}
impl Add for LaurentScalar {
    type Output = LaurentScalar;
    fn add(self, o: LaurentScalar) -> LaurentScalar {
        &self + &o
    }
}
impl Sub for LaurentScalar {
    type Output = LaurentScalar;
    fn sub(self, o: LaurentScalar) -> LaurentScalar {
        &self - &o
    }
}
impl Mul for LaurentScalar {
    type Output = LaurentScalar;
    fn mul(self, o: LaurentScalar) -> LaurentScalar {
        &self * &o
    }
}
impl Neg for LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        self.scale(-1)
    }
}
impl AddAssign<&LaurentScalar> for LaurentScalar {
    fn add_assign(&mut self, o: &LaurentScalar) {
        *self = &*self + o;
    }
}

fn fmt_q_power(half: i32) -> String {
    if half % 2 == 0 {
        match half / 2 {
            1 => "q".to_string(),
            n => format!("q^{n}"),
        }
    } else {
        format!("q^{{{half}/2}}")
    }
}

/// Render `c·q^{e/2}` with the sign stripped; used for element rendering.
pub(crate) fn fmt_unsigned_monomial(c: i64, half: i32) -> String {
    let c = c.abs();
    match (c, half) {
        (_, 0) => c.to_string(),
        (1, _) => fmt_q_power(half),
        _ => format!("{c}*{}", fmt_q_power(half)),
    }
}

impl fmt::Display for LaurentScalar {
    /// Terms by decreasing exponent: `-q^2 - q^-2`, `q^{3/2} + 2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, &(e, c)) in self.terms.iter().rev().enumerate() {
            let body = fmt_unsigned_monomial(c, e);
            match (i, c < 0) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// Grammar: sum of terms, term := [int] ['*'] ['q' ['^' exp]], exp := int | '{' int ['/' '2'] '}'.
// Both `q^-2` and `q^{-2}` are accepted; `q^{3/2}` is the half-integer form.
struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }
    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }
    fn err(&self, msg: &str) -> CoeffError {
        CoeffError::Parse {
            col: self.pos + 1,
            msg: msg.to_string(),
        }
    }
    fn int(&mut self) -> Result<i64, CoeffError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.s.len() && (self.s[self.pos] == b'-' || self.s[self.pos] == b'+') {
            self.pos += 1;
        }
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.err("expected integer"))
    }
}

fn parse_exponent(c: &mut Cursor) -> Result<i32, CoeffError> {
    if c.peek() == Some(b'{') {
        c.pos += 1;
        let n = c.int()?;
        let half = if c.peek() == Some(b'/') {
            c.pos += 1;
            if c.int()? != 2 {
                return Err(c.err("only denominators of 2 are allowed"));
            }
            n
        } else {
            2 * n
        };
        if c.peek() != Some(b'}') {
            return Err(c.err("expected '}'"));
        }
        c.pos += 1;
        Ok(half as i32)
    } else {
        Ok(2 * c.int()? as i32)
    }
}

/// Parse one unsigned scalar monomial `[int] ['*'] [q[^exp]]`; returns `None` if nothing matched.
fn parse_monomial(c: &mut Cursor) -> Result<Option<(i64, i32)>, CoeffError> {
    let mut coeff: Option<i64> = None;
    if matches!(c.peek(), Some(b'0'..=b'9')) {
        coeff = Some(c.int()?);
        if c.peek() == Some(b'*') {
            let save = c.pos;
            c.pos += 1;
            if c.peek() != Some(b'q') {
                c.pos = save;
                return Ok(coeff.map(|k| (k, 0)));
            }
        }
    }
    if c.peek() == Some(b'q') {
        c.pos += 1;
        let half = if c.peek() == Some(b'^') {
            c.pos += 1;
            parse_exponent(c)?
        } else {
            2
        };
        return Ok(Some((coeff.unwrap_or(1), half)));
    }
    Ok(coeff.map(|k| (k, 0)))
}

fn parse_laurent(s: &str) -> Result<LaurentScalar, CoeffError> {
    let mut c = Cursor {
        s: s.as_bytes(),
        pos: 0,
    };
    let v = parse_laurent_sum(&mut c)?;
    if c.peek().is_some() {
        return Err(c.err("trailing input"));
    }
    Ok(v)
}

fn parse_laurent_sum(c: &mut Cursor) -> Result<LaurentScalar, CoeffError> {
    let mut terms = Vec::new();
    let mut first = true;
    loop {
        let mut sign = 1;
        match c.peek() {
            Some(b'+') => c.pos += 1,
            Some(b'-') => {
                sign = -1;
                c.pos += 1
            }
            _ if !first => break,
            _ => {}
        }
        match parse_monomial(c)? {
            Some((k, e)) => terms.push((e, sign * k)),
            None => return Err(c.err("expected scalar term")),
        }
        first = false;
    }
    Ok(LaurentScalar::from_terms(terms))
}

/// Parse one unsigned scalar monomial starting at byte `pos`, advancing it.
/// Used by the element grammar, where scalars and generators share a term.
pub(crate) fn parse_monomial_at(s: &str, pos: &mut usize) -> Result<Option<LaurentScalar>, CoeffError> {
    let mut c = Cursor {
        s: s.as_bytes(),
        pos: *pos,
    };
    let v = parse_monomial(&mut c)?;
    *pos = c.pos;
    Ok(v.map(|(k, e)| LaurentScalar::monomial(k, e)))
}

// ---------------------------------------------------------------------------
// Cyclotomic field Q(ζ_{8p})
// ---------------------------------------------------------------------------

fn cyclotomic_poly(n: usize) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    // Φ_n = (x^n - 1) / Π_{d | n, d < n} Φ_d, by exact integer long division.
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    num[0] = -BigInt::one();
    num[n] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            let phi = cyclotomic_poly(d);
            num = poly_div_exact(&num, &phi);
        }
    }
    let r = Arc::new(num);
    cache.lock().unwrap().insert(n, r.clone());
    r
}

fn poly_div_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let da = a.len() - 1;
    let mut q = vec![BigInt::zero(); da - db + 1];
    for i in (0..=da - db).rev() {
        let c = rem[i + db].clone();
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            rem[i + j] -= &c * bj;
        }
        q[i] = c;
    }
    q
}

/// Element of `Q(ζ_{8p})` as a coefficient vector in the power basis
/// `1, ζ, …, ζ^{φ(8p)-1}`, reduced modulo the cyclotomic polynomial `Φ_{8p}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloScalar {
    p: u32,
    coeffs: Vec<BigRational>,
}

impl CycloScalar {
    /// Order `N = 8p` of the primitive root `ζ` standing for `q^{1/2}`.
    pub fn order(p: u32) -> usize {
        8 * p as usize
    }

    /// `φ(8p)`, the field degree.
    pub fn degree(p: u32) -> usize {
        cyclotomic_poly(Self::order(p)).len() - 1
    }

    pub fn zero(p: u32) -> Self {
        assert!(p >= 2, "root-of-unity order parameter p must be ≥ 2");
        Self {
            p,
            coeffs: vec![BigRational::zero(); Self::degree(p)],
        }
    }

    pub fn one(p: u32) -> Self {
        Self::from_rational(p, BigRational::one())
    }

    pub fn from_int(p: u32, c: i64) -> Self {
        Self::from_rational(p, BigRational::from_integer(c.into()))
    }

    pub fn from_rational(p: u32, c: BigRational) -> Self {
        let mut z = Self::zero(p);
        z.coeffs[0] = c;
        z
    }

    /// `ζ_{8p}^k` for any integer `k`.
    pub fn zeta_pow(p: u32, k: i64) -> Self {
        let n = Self::order(p) as i64;
        let k = k.rem_euclid(n) as usize;
        let mut v = vec![BigRational::zero(); k + 1];
        v[k] = BigRational::one();
        Self::reduce(p, v)
    }

    /// `ε^k` where `ε = e^{iπ/2p} = ζ_{8p}^2` is the image of `q`.
    pub fn eps_pow(p: u32, k: i64) -> Self {
        Self::zeta_pow(p, 2 * k)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    fn reduce(p: u32, mut v: Vec<BigRational>) -> Self {
        let phi = cyclotomic_poly(Self::order(p));
        let d = phi.len() - 1;
        // Φ is monic: x^d ≡ -Σ_{j<d} φ_j x^j.
        for i in (d..v.len()).rev() {
            let c = std::mem::replace(&mut v[i], BigRational::zero());
            if c.is_zero() {
                continue;
            }
            for j in 0..d {
                if !phi[j].is_zero() {
                    v[i - d + j] -= &c * BigRational::from_integer(phi[j].clone());
                }
            }
        }
        v.resize(d, BigRational::zero());
        Self { p, coeffs: v }
    }

    fn check(&self, o: &Self) {
        assert_eq!(self.p, o.p, "cyclotomic scalars at different roots of unity");
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, CoeffError> {
        if self.p != o.p {
            return Err(mismatch_cyclo(self.p, o.p));
        }
        Ok(self + o)
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self, CoeffError> {
        if self.p != o.p {
            return Err(mismatch_cyclo(self.p, o.p));
        }
        Ok(self * o)
    }

    fn mul_matrix(&self) -> Vec<Vec<BigRational>> {
        // Column j is self·ζ^j.
        let d = self.coeffs.len();
        let mut cols = Vec::with_capacity(d);
        let mut cur = self.clone();
        let zeta = Self::zeta_pow(self.p, 1);
        for _ in 0..d {
            cols.push(cur.coeffs.clone());
            cur = &cur * &zeta;
        }
        (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect()
    }

    /// Multiplicative inverse by solving the linear system of multiplication-by-self.
    pub fn inv(&self) -> Result<Self, CoeffError> {
        if self.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        let d = self.coeffs.len();
        let mut m = self.mul_matrix();
        for (i, row) in m.iter_mut().enumerate() {
            row.push(if i == 0 {
                BigRational::one()
            } else {
                BigRational::zero()
            });
        }
        let sol = solve_rational(m, d).ok_or(CoeffError::DivisionByZero)?;
        Ok(Self { p: self.p, coeffs: sol })
    }

    pub fn div(&self, o: &Self) -> Result<Self, CoeffError> {
        Ok(self * &o.inv()?)
    }

    /// Complex embedding with `ζ ↦ e^{2πi/8p}`, as `(re, im)` floats (diagnostics and test oracles only).
    pub fn to_complex(&self) -> (f64, f64) {
        let n = Self::order(self.p) as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            let cf = rational_to_f64(c);
            let th = 2.0 * std::f64::consts::PI * k as f64 / n;
            re += cf * th.cos();
            im += cf * th.sin();
        }
        (re, im)
    }
}

fn rational_to_f64(c: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    c.numer().to_f64().unwrap_or(f64::NAN) / c.denom().to_f64().unwrap_or(f64::NAN)
}

fn mismatch_cyclo(a: u32, b: u32) -> CoeffError {
    CoeffError::RingMismatch(format!("Q(ζ_{})", 8 * a), format!("Q(ζ_{})", 8 * b))
}

/// Gauss–Jordan on an augmented `d × (d+1)` rational system.
fn solve_rational(mut m: Vec<Vec<BigRational>>, d: usize) -> Option<Vec<BigRational>> {
    for col in 0..d {
        let piv = (col..d).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..d {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=d {
                    let t = &f * &m[col][c];
                    m[r][c] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[d].clone()).collect())
}

impl Add for &CycloScalar {
    type Output = CycloScalar;
    fn add(self, o: &CycloScalar) -> CycloScalar {
        self.check(o);
        CycloScalar {
            p: self.p,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}
impl Sub for &CycloScalar {
    type Output = CycloScalar;
    fn sub(self, o: &CycloScalar) -> CycloScalar {
        self.check(o);
        CycloScalar {
            p: self.p,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}
impl Mul for &CycloScalar {
    type Output = CycloScalar;
    fn mul(self, o: &CycloScalar) -> CycloScalar {
        self.check(o);
        let d = self.coeffs.len();
        let mut v = vec![BigRational::zero(); 2 * d];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j] += a * b;
                }
            }
        }
        CycloScalar::reduce(self.p, v)
    }
}
impl Neg for &CycloScalar {
    type Output = CycloScalar;
    fn neg(self) -> CycloScalar {
        CycloScalar {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for CycloScalar {
    /// Power-basis rendering in `z = ζ_{8p}`, highest power first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            let body = match (a.is_one(), k) {
                (_, 0) => a.to_string(),
                (true, 1) => "z".to_string(),
                (true, _) => format!("z^{k}"),
                (false, 1) => format!("{a}*z"),
                (false, _) => format!("{a}*z^{k}"),
            };
            match (first, neg) {
                (true, true) => write!(f, "-{body}")?,
                (true, false) => write!(f, "{body}")?,
                (false, true) => write!(f, " - {body}")?,
                (false, false) => write!(f, " + {body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for CycloScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[p={}] {}", self.p, self)
    }
}

/// Ring homomorphism `Z[q^{±1/2}] → Q(ζ_{8p})`, `q^{1/2} ↦ ζ_{8p}`.
pub fn specialize(x: &LaurentScalar, p: u32) -> CycloScalar {
    let n = CycloScalar::order(p) as i64;
    let mut v = vec![BigRational::zero(); n as usize];
    for &(e, c) in x.terms() {
        let k = (e as i64).rem_euclid(n) as usize;
        v[k] += BigRational::from_integer(c.into());
    }
    CycloScalar::reduce(p, v)
}

// ---------------------------------------------------------------------------
// Unified scalar
// ---------------------------------------------------------------------------

/// Which coefficient ring a computation runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    Laurent,
    /// `Q(ζ_{8p})`, i.e. specialization at `q = e^{iπ/2p}`.
    Cyclo(u32),
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Laurent => write!(f, "Z[q^(1/2),q^(-1/2)]"),
            Ring::Cyclo(p) => write!(f, "Q(ζ_{})", 8 * p),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Laurent(LaurentScalar),
    Cyclo(CycloScalar),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
}

impl Scalar {
    pub fn ring(&self) -> Ring {
        match self {
            Scalar::Laurent(_) => Ring::Laurent,
            Scalar::Cyclo(c) => Ring::Cyclo(c.p()),
        }
    }

    pub fn zero(ring: Ring) -> Self {
        match ring {
            Ring::Laurent => Scalar::Laurent(LaurentScalar::zero()),
            Ring::Cyclo(p) => Scalar::Cyclo(CycloScalar::zero(p)),
        }
    }

    pub fn one(ring: Ring) -> Self {
        Self::from_laurent(&LaurentScalar::one(), ring)
    }

    pub fn from_int(c: i64, ring: Ring) -> Self {
        Self::from_laurent(&LaurentScalar::from_int(c), ring)
    }

    /// Image of a Laurent scalar in `ring` (identity or specialization).
    pub fn from_laurent(x: &LaurentScalar, ring: Ring) -> Self {
        match ring {
            Ring::Laurent => Scalar::Laurent(x.clone()),
            Ring::Cyclo(p) => Scalar::Cyclo(specialize(x, p)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Laurent(x) => x.is_zero(),
            Scalar::Cyclo(x) => x.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Laurent(x) => x.is_one(),
            Scalar::Cyclo(x) => x.is_one(),
        }
    }

    pub fn as_laurent(&self) -> Option<&LaurentScalar> {
        match self {
            Scalar::Laurent(x) => Some(x),
            _ => None,
        }
    }

    pub fn as_cyclo(&self) -> Option<&CycloScalar> {
        match self {
            Scalar::Cyclo(x) => Some(x),
            _ => None,
        }
    }

    /// Checked ring operation; operands must live in the same ring.
    pub fn ring_op(&self, other: &Self, op: RingOp) -> Result<Self, CoeffError> {
        if self.ring() != other.ring() {
            return Err(CoeffError::RingMismatch(
                self.ring().to_string(),
                other.ring().to_string(),
            ));
        }
        Ok(match op {
            RingOp::Add => self + other,
            RingOp::Sub => self - other,
            RingOp::Mul => self * other,
        })
    }
}

macro_rules! scalar_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for &Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                match (self, o) {
                    (Scalar::Laurent(a), Scalar::Laurent(b)) => Scalar::Laurent(a.$m(b)),
                    (Scalar::Cyclo(a), Scalar::Cyclo(b)) => Scalar::Cyclo(a.$m(b)),
                    _ => panic!("ring mismatch: {} vs {}", self.ring(), o.ring()),
                }
            }
        }
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
    };
}
scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Laurent(a) => Scalar::Laurent(-a),
            Scalar::Cyclo(a) => Scalar::Cyclo(-a),
        }
    }
}
impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Laurent(x) => write!(f, "{x}"),
            Scalar::Cyclo(x) => write!(f, "{x}"),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Laurent(x) => write!(f, "{x:?}"),
            Scalar::Cyclo(x) => write!(f, "{x:?}"),
        }
    }
}

/// `[k] = q^{2(k-1)} + q^{2(k-3)} + … + q^{-2(k-1)}`, the quantum integer in the `q²` normalization.
pub fn quantum_integer(k: u32, ring: Ring) -> Scalar {
    let k = k as i32;
    let lau = LaurentScalar::from_terms((0..k).map(|j| (4 * (k - 1 - 2 * j), 1)));
    Scalar::from_laurent(&lau, ring)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i32) -> LaurentScalar {
        LaurentScalar::q_pow(n)
    }

    #[test]
    fn difference_of_squares() {
        let a = LaurentScalar::from_terms([(1, 1), (-1, 1)]);
        let b = LaurentScalar::from_terms([(1, 1), (-1, -1)]);
        assert_eq!(&a * &b, &q(1) - &q(-1));
    }

    #[test]
    fn square_expansion_cancels() {
        let s = LaurentScalar::from_terms([(4, 1), (0, 2), (-4, 1)]);
        let t = &q(1) + &q(-1);
        assert!((&s - &(&t * &t)).is_zero());
    }

    #[test]
    fn rendering_and_parsing_round_trip() {
        let x = LaurentScalar::from_terms([(4, -1), (-4, -1)]);
        assert_eq!(x.to_string(), "-q^2 - q^-2");
        let y = LaurentScalar::from_terms([(3, 1), (0, 2), (-1, -3)]);
        assert_eq!(y.to_string(), "q^{3/2} + 2 - 3*q^{-1/2}");
        for s in [x, y] {
            assert_eq!(LaurentScalar::parse(&s.to_string()).unwrap(), s);
        }
        assert_eq!(LaurentScalar::parse("q^{-2}").unwrap(), q(-2));
        assert_eq!(LaurentScalar::parse("2*q").unwrap(), q(1).scale(2));
        assert!(LaurentScalar::parse("q^{1/3}").is_err());
    }

    #[test]
    fn exact_division() {
        let a = &q(2) - &q(-2);
        let b = &q(1) + &q(-1);
        assert_eq!(a.div_exact(&b).unwrap(), &q(1) - &q(-1));
        assert!(q(1).div_exact(&b).is_none());
    }

    #[test]
    fn quantum_integers() {
        assert_eq!(quantum_integer(2, Ring::Laurent), Scalar::Laurent(&q(2) + &q(-2)));
        assert!(quantum_integer(1, Ring::Laurent).is_one());
        for p in 2..=6 {
            assert!(quantum_integer(p, Ring::Cyclo(p)).is_zero(), "[{p}] at p={p}");
        }
    }

    #[test]
    fn specialization_examples() {
        assert!(specialize(&(&q(2) + &q(-2)), 2).is_zero());
        for p in 2..=5 {
            assert!(specialize(&LaurentScalar::one(), p).is_one());
            assert!(specialize(&q(4 * p as i32), p).is_one());
        }
    }

    #[test]
    fn cyclotomic_degrees() {
        assert_eq!(CycloScalar::degree(2), 8);
        assert_eq!(CycloScalar::degree(3), 8);
        assert_eq!(CycloScalar::degree(4), 16);
        assert_eq!(CycloScalar::degree(5), 16);
    }

    #[test]
    fn cyclotomic_inverse() {
        for p in 2..=4 {
            let x = specialize(&LaurentScalar::from_terms([(3, 2), (0, 1), (-2, -1)]), p);
            let y = x.inv().unwrap();
            assert!((&x * &y).is_one());
        }
        assert_eq!(CycloScalar::zero(2).inv(), Err(CoeffError::DivisionByZero));
    }

    #[test]
    fn ring_mismatch_is_reported() {
        let a = Scalar::one(Ring::Laurent);
        let b = Scalar::one(Ring::Cyclo(2));
        assert!(matches!(a.ring_op(&b, RingOp::Add), Err(CoeffError::RingMismatch(..))));
        let c = Scalar::one(Ring::Cyclo(3));
        assert!(b.ring_op(&c, RingOp::Mul).is_err());
    }
}
