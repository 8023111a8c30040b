//! Exact arithmetic in the tower `Fp ⊆ Fq ⊆ Fq^m`.
//!
//! Every element is stored as its integer codec value: an `Fq` element is the
//! base-`p` number whose digits are its coefficients over `Fp` (lowest degree
//! least significant), and an `Fq^m` element is the base-`q` number whose digits
//! are its coordinates in the polynomial basis `1, α, …, α^{m-1}`. Both codecs
//! are therefore base-`p` digit strings, and addition is digit-wise mod `p` at
//! every level of the tower.
//!
//! Moduli are the lexicographically smallest monic irreducible polynomials
//! (coefficient vectors compared constant term first), so two builds with the
//! same `(p, s, m)` agree on every element and every generator matrix.

use std::fmt;

use crate::error::{Error, Result};

/// Default cap on the number of messages `q^{2m}` a tower may be built for.
pub const DEFAULT_BUDGET: u128 = 1 << 26;

/// Fields up to this order get log/antilog tables.
const TABLE_LIMIT: u64 = 1 << 20;

/// Above this order the extension trace is computed per call instead of tabulated.
const TRACE_TABLE_LIMIT: u64 = 1 << 22;

/// Element of the base field `Fq`, stored as its codec value in `[0, q)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BaseElem(pub u32);

/// Element of the extension `Fq^m`, stored as its codec value in `[0, q^m)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtElem(pub u32);

impl BaseElem {
    pub const ZERO: BaseElem = BaseElem(0);
    pub const ONE: BaseElem = BaseElem(1);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl ExtElem {
    pub const ZERO: ExtElem = ExtElem(0);
    pub const ONE: ExtElem = ExtElem(1);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for BaseElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite field whose elements are base-`p` digit strings of fixed length.
#[derive(Clone, Debug)]
struct Field {
    p: u32,
    order: u32,
    digits: u32,
    mul: MulRule,
}

#[derive(Clone, Debug)]
enum MulRule {
    Prime,
    Tables { exp: Vec<u32>, log: Vec<u32> },
    Poly { sub: Box<Field>, modulus: Vec<u32> },
}

impl Field {
    fn prime(p: u32) -> Field {
        Field {
            p,
            order: p,
            digits: 1,
            mul: MulRule::Prime,
        }
    }

    /// `sub[x] / (modulus)`, multiplication by polynomial arithmetic.
    fn extension(sub: &Field, modulus: Vec<u32>) -> Field {
        let degree = (modulus.len() - 1) as u32;
        Field {
            p: sub.p,
            order: sub.order.pow(degree),
            digits: sub.digits * degree,
            mul: MulRule::Poly {
                sub: Box::new(sub.clone()),
                modulus,
            },
        }
    }

    /// Replaces polynomial multiplication by log/antilog tables when small enough.
    fn tabulated(self) -> Result<Field> {
        if u64::from(self.order) > TABLE_LIMIT || matches!(self.mul, MulRule::Tables { .. }) {
            return Ok(self);
        }
        let g = self.primitive_element()?;
        let n = (self.order - 1) as usize;
        let mut exp = vec![0u32; n];
        let mut log = vec![0u32; self.order as usize];
        let mut x = 1u32;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = x;
            log[x as usize] = i as u32;
            x = self.mul(x, g);
        }
        if x != 1 {
            return Err(Error::Internal("primitive element has wrong order".into()));
        }
        Ok(Field {
            mul: MulRule::Tables { exp, log },
            ..self
        })
    }

    fn primitive_element(&self) -> Result<u32> {
        let n = u64::from(self.order - 1);
        let factors = prime_factors(n);
        (1..self.order)
            .find(|&g| factors.iter().all(|&r| self.pow(g, n / r) != 1))
            .ok_or_else(|| Error::Internal("no primitive element found".into()))
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0u32, 1u32);
        for _ in 0..self.digits {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place = place.wrapping_mul(self.p);
        }
        out
    }

    fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let mut a = a;
        let (mut out, mut place) = (0u32, 1u32);
        for _ in 0..self.digits {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place = place.wrapping_mul(self.p);
        }
        out
    }

    fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.mul {
            MulRule::Prime => ((u64::from(a) * u64::from(b)) % u64::from(self.p)) as u32,
            MulRule::Tables { exp, log } => {
                if a == 0 || b == 0 {
                    0
                } else {
                    let n = exp.len();
                    exp[(log[a as usize] as usize + log[b as usize] as usize) % n]
                }
            }
            MulRule::Poly { sub, modulus } => {
                let degree = modulus.len() - 1;
                let x = to_digits(a, sub.order, degree);
                let y = to_digits(b, sub.order, degree);
                let prod = poly_mul(sub, &x, &y);
                let r = poly_rem(sub, &prod, modulus);
                from_digits(&r, sub.order)
            }
        }
    }

    fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn inv(&self, a: u32) -> u32 {
        debug_assert!(a != 0, "inverse of zero");
        match &self.mul {
            MulRule::Tables { exp, log } => {
                let n = exp.len();
                exp[(n - log[a as usize] as usize) % n]
            }
            _ => self.pow(a, u64::from(self.order) - 2),
        }
    }
}

fn to_digits(mut x: u32, base: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(x % base);
        x /= base;
    }
    out
}

fn from_digits(digits: &[u32], base: u32) -> u32 {
    digits.iter().rev().fold(0u32, |acc, &d| acc * base + d)
}

fn poly_mul(k: &Field, a: &[u32], b: &[u32]) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = k.add(out[i + j], k.mul(x, y));
        }
    }
    out
}

/// Remainder of `a` modulo `f`; the result has length `deg f` (zero padded).
fn poly_rem(k: &Field, a: &[u32], f: &[u32]) -> Vec<u32> {
    let deg = f.len() - 1;
    let lead_inv = k.inv(f[deg]);
    let mut r = a.to_vec();
    for top in (deg..r.len()).rev() {
        let c = r[top];
        if c == 0 {
            continue;
        }
        let factor = k.mul(c, lead_inv);
        for (j, &fj) in f.iter().enumerate() {
            let idx = top - deg + j;
            r[idx] = k.sub(r[idx], k.mul(factor, fj));
        }
    }
    r.resize(deg, 0);
    r
}

fn divides(k: &Field, g: &[u32], f: &[u32]) -> bool {
    poly_rem(k, f, g).iter().all(|&c| c == 0)
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn is_irreducible(k: &Field, f: &[u32]) -> bool {
    let deg = f.len() - 1;
    if deg <= 1 {
        return deg == 1;
    }
    if f[0] == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = u64::from(k.order).pow(d as u32);
        for idx in 0..count {
            let mut g = to_digits_u64(idx, k.order, d);
            g.push(1);
            if divides(k, &g, f) {
                return false;
            }
        }
    }
    true
}

fn to_digits_u64(mut x: u64, base: u32, len: usize) -> Vec<u32> {
    let base = u64::from(base);
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((x % base) as u32);
        x /= base;
    }
    out
}

/// Smallest monic irreducible of the given degree, comparing `(c_0, c_1, …)`
/// lexicographically with the constant term most significant.
fn smallest_irreducible(k: &Field, degree: usize) -> Result<Vec<u32>> {
    let count = u64::from(k.order).pow(degree as u32);
    for idx in 0..count {
        // c_0 is the most significant digit of idx.
        let mut f = to_digits_u64(idx, k.order, degree);
        f.reverse();
        f.push(1);
        if is_irreducible(k, &f) {
            return Ok(f);
        }
    }
    Err(Error::Internal(format!(
        "no monic irreducible of degree {degree} over a field of order {}",
        k.order
    )))
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Splits a prime power `q` into `(p, s)` with `q = p^s`.
pub fn split_prime_power(q: u64) -> Result<(u32, u32)> {
    let factors = prime_factors(q);
    if q < 2 || factors.len() != 1 {
        return Err(Error::NotPrimePower(q));
    }
    let p = factors[0];
    let mut s = 0u32;
    let mut rest = q;
    while rest > 1 {
        rest /= p;
        s += 1;
    }
    Ok((p as u32, s))
}

/// The pair `(Fq, Fq^m)` with fixed moduli, the polynomial basis of `Fq^m`
/// over `Fq`, its trace-dual basis and both trace maps.
///
/// Immutable once built; share it freely across threads.
#[derive(Clone, Debug)]
pub struct FieldTower {
    p: u32,
    s: u32,
    m: u32,
    budget: u128,
    fq: Field,
    fqm: Field,
    modulus_q: Vec<u32>,
    modulus_qm: Vec<u32>,
    basis: Vec<ExtElem>,
    dual_basis: Vec<ExtElem>,
    basis_traces: Vec<u32>,
    trace_table: Option<Vec<u32>>,
    base_abs_trace: Vec<u32>,
}

impl FieldTower {
    pub fn new(p: u32, s: u32, m: u32) -> Result<FieldTower> {
        FieldTower::with_budget(p, s, m, DEFAULT_BUDGET)
    }

    /// Tower for `q = p^s` given as a prime power.
    pub fn for_order(q: u64, m: u32, budget: u128) -> Result<FieldTower> {
        let (p, s) = split_prime_power(q)?;
        FieldTower::with_budget(p, s, m, budget)
    }

    pub fn with_budget(p: u32, s: u32, m: u32, budget: u128) -> Result<FieldTower> {
        if !is_prime(u64::from(p)) {
            return Err(Error::NotPrime(u64::from(p)));
        }
        if s == 0 || m == 0 {
            return Err(Error::InvalidParameter("s and m must be at least 1".into()));
        }
        let q = u128::from(p).checked_pow(s);
        let messages = q.and_then(|q| q.checked_pow(2 * m));
        match messages {
            Some(needed) if needed <= budget => {}
            Some(needed) => return Err(Error::BudgetExceeded { needed, budget }),
            None => {
                return Err(Error::BudgetExceeded {
                    needed: u128::MAX,
                    budget,
                })
            }
        }
        let qm = q.unwrap().pow(m);
        if qm >= 1 << 31 {
            return Err(Error::InvalidParameter(format!(
                "q^m = {qm} exceeds the supported field size"
            )));
        }

        let fp = Field::prime(p);
        let modulus_q = smallest_irreducible(&fp, s as usize)?;
        let fq = Field::extension(&fp, modulus_q.clone()).tabulated()?;
        let modulus_qm = smallest_irreducible(&fq, m as usize)?;
        let fqm = Field::extension(&fq, modulus_qm.clone()).tabulated()?;

        // α_i = α^{i-1}: the element with a single 1 in coordinate i-1.
        let q32 = fq.order;
        let basis: Vec<ExtElem> = (0..m).map(|i| ExtElem(q32.pow(i))).collect();

        let mut tower = FieldTower {
            p,
            s,
            m,
            budget,
            fq,
            fqm,
            modulus_q,
            modulus_qm,
            basis,
            dual_basis: Vec::new(),
            basis_traces: Vec::new(),
            trace_table: None,
            base_abs_trace: Vec::new(),
        };
        tower.base_abs_trace = (0..q32)
            .map(|c| tower.trace_q_to_p_by_frobenius(BaseElem(c)))
            .collect();
        tower.basis_traces = tower
            .basis
            .iter()
            .map(|&a| tower.trace_by_frobenius(a).0)
            .collect();
        if u64::from(tower.ext_order()) <= TRACE_TABLE_LIMIT {
            let table = (0..tower.ext_order())
                .map(|x| tower.trace_linear(ExtElem(x)).0)
                .collect();
            tower.trace_table = Some(table);
        }
        tower.dual_basis = tower.compute_dual_basis()?;
        Ok(tower)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Cap on `q^{2m}` this tower was built under.
    pub fn budget(&self) -> u128 {
        self.budget
    }

    /// Number of messages `(a, b) ∈ Fq^m × Fq^m`.
    pub fn message_count(&self) -> u64 {
        u64::from(self.ext_order()).pow(2)
    }

    /// `q = p^s`.
    pub fn q(&self) -> u32 {
        self.fq.order
    }

    /// `q^m`.
    pub fn ext_order(&self) -> u32 {
        self.fqm.order
    }

    /// Coefficients of the `Fq` modulus over `Fp`, constant term first.
    pub fn modulus_q(&self) -> &[u32] {
        &self.modulus_q
    }

    /// Coefficients of the `Fq^m` modulus over `Fq` (codec values), constant term first.
    pub fn modulus_qm(&self) -> &[u32] {
        &self.modulus_qm
    }

    pub fn basis(&self) -> &[ExtElem] {
        &self.basis
    }

    pub fn dual_basis(&self) -> &[ExtElem] {
        &self.dual_basis
    }

    pub fn elements(&self) -> impl Iterator<Item = ExtElem> + '_ {
        (0..self.ext_order()).map(ExtElem)
    }

    pub fn base_elements(&self) -> impl Iterator<Item = BaseElem> + '_ {
        (0..self.q()).map(BaseElem)
    }

    // ---- codec ----

    pub fn ext_from_index(&self, n: u64) -> Result<ExtElem> {
        if n >= u64::from(self.ext_order()) {
            return Err(Error::OutOfRange {
                value: n,
                bound: u64::from(self.ext_order()),
            });
        }
        Ok(ExtElem(n as u32))
    }

    pub fn base_from_index(&self, n: u64) -> Result<BaseElem> {
        if n >= u64::from(self.q()) {
            return Err(Error::OutOfRange {
                value: n,
                bound: u64::from(self.q()),
            });
        }
        Ok(BaseElem(n as u32))
    }

    /// Coordinates over `Fq` in the polynomial basis.
    pub fn coords(&self, x: ExtElem) -> Vec<BaseElem> {
        to_digits(x.0, self.q(), self.m as usize)
            .into_iter()
            .map(BaseElem)
            .collect()
    }

    pub fn from_coords(&self, coords: &[BaseElem]) -> Result<ExtElem> {
        if coords.len() != self.m as usize {
            return Err(Error::InvalidParameter(format!(
                "expected {} coordinates, got {}",
                self.m,
                coords.len()
            )));
        }
        if let Some(c) = coords.iter().find(|c| c.0 >= self.q()) {
            return Err(Error::OutOfRange {
                value: u64::from(c.0),
                bound: u64::from(self.q()),
            });
        }
        let digits: Vec<u32> = coords.iter().map(|c| c.0).collect();
        Ok(ExtElem(from_digits(&digits, self.q())))
    }

    /// Coefficients of an `Fq` element over `Fp`, constant term first.
    pub fn base_digits(&self, c: BaseElem) -> Vec<u32> {
        to_digits(c.0, self.p, self.s as usize)
    }

    /// Indices `i` (1-based) with a nonzero basis coordinate.
    pub fn support(&self, x: ExtElem) -> Vec<usize> {
        self.coords(x)
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| i + 1)
            .collect()
    }

    // ---- Fq^m arithmetic ----

    pub fn add(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        ExtElem(self.fqm.add(a.0, b.0))
    }

    pub fn sub(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        ExtElem(self.fqm.sub(a.0, b.0))
    }

    pub fn neg(&self, a: ExtElem) -> ExtElem {
        ExtElem(self.fqm.neg(a.0))
    }

    pub fn mul(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        ExtElem(self.fqm.mul(a.0, b.0))
    }

    pub fn pow(&self, a: ExtElem, e: u64) -> ExtElem {
        ExtElem(self.fqm.pow(a.0, e))
    }

    pub fn inv(&self, a: ExtElem) -> Option<ExtElem> {
        (!a.is_zero()).then(|| ExtElem(self.fqm.inv(a.0)))
    }

    /// `c · x` for a scalar `c ∈ Fq`.
    pub fn scale(&self, c: BaseElem, x: ExtElem) -> ExtElem {
        // Fq sits inside Fq^m as the constant polynomials, which share codec values.
        ExtElem(self.fqm.mul(c.0, x.0))
    }

    /// The subfield element `c` viewed inside `Fq^m`.
    pub fn embed(&self, c: BaseElem) -> ExtElem {
        ExtElem(c.0)
    }

    // ---- Fq arithmetic ----

    pub fn base_add(&self, a: BaseElem, b: BaseElem) -> BaseElem {
        BaseElem(self.fq.add(a.0, b.0))
    }

    pub fn base_sub(&self, a: BaseElem, b: BaseElem) -> BaseElem {
        BaseElem(self.fq.sub(a.0, b.0))
    }

    pub fn base_neg(&self, a: BaseElem) -> BaseElem {
        BaseElem(self.fq.neg(a.0))
    }

    pub fn base_mul(&self, a: BaseElem, b: BaseElem) -> BaseElem {
        BaseElem(self.fq.mul(a.0, b.0))
    }

    pub fn base_inv(&self, a: BaseElem) -> Option<BaseElem> {
        (!a.is_zero()).then(|| BaseElem(self.fq.inv(a.0)))
    }

    pub fn base_pow(&self, a: BaseElem, e: u64) -> BaseElem {
        BaseElem(self.fq.pow(a.0, e))
    }

    // ---- traces ----

    /// `Tr_q^{q^m}(x)`.
    pub fn trace_qm_to_q(&self, x: ExtElem) -> BaseElem {
        match &self.trace_table {
            Some(t) => BaseElem(t[x.0 as usize]),
            None => self.trace_linear(x),
        }
    }

    /// `Tr_q^{q^m}(x) = Σ_{i<m} x^{q^i}` evaluated literally through Frobenius powers.
    pub fn trace_by_frobenius(&self, x: ExtElem) -> BaseElem {
        let q = u64::from(self.q());
        let mut acc = 0u32;
        let mut y = x.0;
        for _ in 0..self.m {
            acc = self.fqm.add(acc, y);
            y = self.fqm.pow(y, q);
        }
        debug_assert!(acc < self.q(), "trace escaped the subfield");
        BaseElem(acc)
    }

    /// Trace from coordinates: `Σ c_i Tr(α_i)`.
    fn trace_linear(&self, x: ExtElem) -> BaseElem {
        let mut acc = 0u32;
        let mut rest = x.0;
        for &t in &self.basis_traces {
            let c = rest % self.q();
            rest /= self.q();
            if c != 0 {
                acc = self.fq.add(acc, self.fq.mul(c, t));
            }
        }
        BaseElem(acc)
    }

    /// `Tr_p^q(c)` as an integer in `[0, p)`.
    pub fn trace_q_to_p(&self, c: BaseElem) -> u32 {
        self.base_abs_trace[c.0 as usize]
    }

    fn trace_q_to_p_by_frobenius(&self, c: BaseElem) -> u32 {
        let p = u64::from(self.p);
        let mut acc = 0u32;
        let mut y = c.0;
        for _ in 0..self.s {
            acc = self.fq.add(acc, y);
            y = self.fq.pow(y, p);
        }
        debug_assert!(acc < self.p);
        acc
    }

    /// `Tr_p^{q^m}(x) = Tr_p^q(Tr_q^{q^m}(x))`.
    pub fn absolute_trace(&self, x: ExtElem) -> u32 {
        self.trace_q_to_p(self.trace_qm_to_q(x))
    }

    fn compute_dual_basis(&self) -> Result<Vec<ExtElem>> {
        let m = self.m as usize;
        let gram: Vec<Vec<u32>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| self.trace_qm_to_q(self.mul(self.basis[i], self.basis[j])).0)
                    .collect()
            })
            .collect();
        let inv = invert_matrix(&self.fq, gram)
            .ok_or_else(|| Error::Internal("trace Gram matrix is singular".into()))?;
        // β_j = Σ_k inv[k][j] α_k; with the polynomial basis the coordinates are column j.
        (0..m)
            .map(|j| {
                let col: Vec<BaseElem> = (0..m).map(|k| BaseElem(inv[k][j])).collect();
                self.from_coords(&col)
            })
            .collect()
    }

    /// Rank over `Fq` of a list of `Fq`-vectors.
    pub fn rank(&self, rows: &[Vec<BaseElem>]) -> usize {
        let mut m: Vec<Vec<u32>> = rows
            .iter()
            .map(|r| r.iter().map(|c| c.0).collect())
            .collect();
        row_reduce(&self.fq, &mut m)
    }
}

/// Reduces `m` in place to row echelon form and returns its rank.
fn row_reduce(k: &Field, m: &mut [Vec<u32>]) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = k.inv(m[rank][col]);
        for x in &mut m[rank][col..] {
            *x = k.mul(*x, inv);
        }
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let f = row[col];
                for (x, &pv) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x = k.sub(*x, k.mul(f, pv));
                }
            }
        }
        rank += 1;
    }
    rank
}

fn invert_matrix(k: &Field, a: Vec<Vec<u32>>) -> Option<Vec<Vec<u32>>> {
    let n = a.len();
    let mut aug: Vec<Vec<u32>> = a
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            row.extend((0..n).map(|j| u32::from(i == j)));
            row
        })
        .collect();
    let mut left: Vec<Vec<u32>> = aug.iter().map(|r| r[..n].to_vec()).collect();
    if row_reduce(k, &mut left) < n {
        return None;
    }
    row_reduce(k, &mut aug);
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_modulus_is_x2_x_1() {
        let t = FieldTower::new(2, 1, 2).unwrap();
        assert_eq!(t.modulus_qm(), &[1, 1, 1]);
        assert_eq!(t.ext_order(), 4);
    }

    #[test]
    fn trivial_extension_has_unit_bases() {
        let t = FieldTower::new(2, 1, 1).unwrap();
        assert_eq!(t.basis(), &[ExtElem::ONE]);
        assert_eq!(t.dual_basis(), &[ExtElem::ONE]);
        assert_eq!(t.trace_qm_to_q(ExtElem(1)), BaseElem(1));
    }

    #[test]
    fn dual_basis_f81_brute_force() {
        let t = FieldTower::new(3, 1, 4).unwrap();
        for (i, &a) in t.basis().iter().enumerate() {
            for (j, &b) in t.dual_basis().iter().enumerate() {
                let tr = t.trace_by_frobenius(t.mul(a, b));
                assert_eq!(tr.0, u32::from(i == j), "i={i} j={j}");
            }
        }
    }

    #[test]
    fn trace_examples() {
        let t = FieldTower::new(2, 1, 2).unwrap();
        assert_eq!(t.trace_qm_to_q(ExtElem::ZERO), BaseElem::ZERO);
        // α = codec 2; α + α² = 1 under x² + x + 1.
        assert_eq!(t.trace_qm_to_q(ExtElem(2)), BaseElem(1));
        // Tr(1) = m · 1
        let t3 = FieldTower::new(3, 1, 4).unwrap();
        assert_eq!(t3.trace_qm_to_q(ExtElem::ONE), BaseElem(4 % 3));
        let t5 = FieldTower::new(5, 1, 3).unwrap();
        assert_eq!(t5.trace_qm_to_q(ExtElem::ONE), BaseElem(3));
    }

    #[test]
    fn trace_q_to_p_examples() {
        let f4 = FieldTower::new(2, 2, 1).unwrap();
        assert_eq!(f4.trace_q_to_p(BaseElem(0)), 0);
        assert_eq!(f4.trace_q_to_p(BaseElem(2)), 1);
        let prime = FieldTower::new(7, 1, 2).unwrap();
        for c in 0..7 {
            assert_eq!(prime.trace_q_to_p(BaseElem(c)), c);
        }
    }

    #[test]
    fn codec_examples() {
        let f4 = FieldTower::new(2, 2, 1).unwrap();
        assert_eq!(f4.base_digits(BaseElem(2)), vec![0, 1]);
        let f9 = FieldTower::new(3, 2, 1).unwrap();
        assert_eq!(f9.base_digits(BaseElem(5)), vec![2, 1]);
        let t = FieldTower::new(2, 1, 2).unwrap();
        assert_eq!(t.coords(ExtElem(2)), vec![BaseElem(0), BaseElem(1)]);
        assert_eq!(
            t.from_coords(&[BaseElem(0), BaseElem(1)]).unwrap(),
            ExtElem(2)
        );
        assert!(t.ext_from_index(4).is_err());
        assert!(f9.base_from_index(9).is_err());
        assert_eq!(t.ext_from_index(0).unwrap(), ExtElem::ZERO);
    }

    #[test]
    fn f9_modulus_and_inverse() {
        let t = FieldTower::new(3, 2, 1).unwrap();
        // x² + 1 is the first irreducible quadratic over F3.
        assert_eq!(t.modulus_q(), &[1, 0, 1]);
        for c in 1..9 {
            let c = BaseElem(c);
            assert_eq!(t.base_mul(c, t.base_inv(c).unwrap()), BaseElem::ONE);
        }
    }

    #[test]
    fn errors() {
        assert_eq!(FieldTower::new(4, 1, 2).unwrap_err(), Error::NotPrime(4));
        assert!(matches!(
            FieldTower::new(2, 1, 14),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(FieldTower::with_budget(2, 1, 14, 1 << 28).is_ok());
        assert_eq!(split_prime_power(12).unwrap_err(), Error::NotPrimePower(12));
        assert_eq!(split_prime_power(9).unwrap(), (3, 2));
    }

    fn towers() -> Vec<FieldTower> {
        [
            (2, 1, 1),
            (2, 1, 4),
            (2, 2, 3),
            (3, 1, 3),
            (3, 2, 2),
            (5, 1, 2),
            (2, 3, 2),
            (7, 1, 2),
        ]
        .iter()
        .map(|&(p, s, m)| FieldTower::new(p, s, m).unwrap())
        .collect()
    }

    #[test]
    fn trace_properties_exhaustive() {
        for t in towers() {
            let q = u64::from(t.q());
            for x in t.elements() {
                let tr = t.trace_qm_to_q(x);
                assert_eq!(tr, t.trace_by_frobenius(x));
                assert_eq!(t.base_pow(tr, q), tr);
                // Composition with the absolute trace computed over Fp directly.
                let mut abs = 0u32;
                let mut y = x;
                for _ in 0..t.s() * t.m() {
                    abs = t.add(ExtElem(abs), y).0;
                    y = t.pow(y, u64::from(t.p()));
                }
                assert_eq!(t.absolute_trace(x), abs);
            }
            for y in t.elements().filter(|y| !y.is_zero()) {
                assert!(t
                    .elements()
                    .any(|x| !t.trace_qm_to_q(t.mul(x, y)).is_zero()));
            }
        }
    }

    #[test]
    fn basis_is_independent() {
        for t in towers() {
            let rows: Vec<Vec<BaseElem>> = t.basis().iter().map(|&a| t.coords(a)).collect();
            assert_eq!(t.rank(&rows), t.m() as usize);
            let rows: Vec<Vec<BaseElem>> = t.dual_basis().iter().map(|&a| t.coords(a)).collect();
            assert_eq!(t.rank(&rows), t.m() as usize);
        }
    }

    #[test]
    fn moduli_are_irreducible() {
        for t in towers() {
            let fp = Field::prime(t.p());
            assert!(is_irreducible(&fp, t.modulus_q()));
            assert!(is_irreducible(&t.fq, t.modulus_qm()));
        }
    }

    #[test]
    fn polynomial_fallback_matches_tables() {
        let t = FieldTower::new(3, 1, 3).unwrap();
        let slow = Field::extension(&t.fq, t.modulus_qm.clone());
        for a in 0..27 {
            for b in 0..27 {
                assert_eq!(slow.mul(a, b), t.fqm.mul(a, b));
            }
            if a != 0 {
                assert_eq!(slow.inv(a), t.fqm.inv(a));
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn tower() -> FieldTower {
            FieldTower::new(3, 2, 3).unwrap()
        }

        proptest! {
            #[test]
            fn trace_is_fq_linear(x in 0u32..729, y in 0u32..729, c in 0u32..9) {
                let t = tower();
                let (x, y, c) = (ExtElem(x), ExtElem(y), BaseElem(c));
                prop_assert_eq!(
                    t.trace_qm_to_q(t.add(x, y)),
                    t.base_add(t.trace_qm_to_q(x), t.trace_qm_to_q(y))
                );
                prop_assert_eq!(
                    t.trace_qm_to_q(t.scale(c, x)),
                    t.base_mul(c, t.trace_qm_to_q(x))
                );
            }

            #[test]
            fn field_axioms(a in 0u32..729, b in 0u32..729, c in 0u32..729) {
                let t = tower();
                let (a, b, c) = (ExtElem(a), ExtElem(b), ExtElem(c));
                prop_assert_eq!(t.mul(a, t.add(b, c)), t.add(t.mul(a, b), t.mul(a, c)));
                prop_assert_eq!(t.mul(t.mul(a, b), c), t.mul(a, t.mul(b, c)));
                prop_assert_eq!(t.sub(t.add(a, b), b), a);
                if let Some(ai) = t.inv(a) {
                    prop_assert_eq!(t.mul(a, ai), ExtElem::ONE);
                }
            }

            #[test]
            fn codec_round_trip(x in 0u32..729) {
                let t = tower();
                let x = ExtElem(x);
                prop_assert_eq!(t.from_coords(&t.coords(x)).unwrap(), x);
            }
        }
    }
}
