//! Lee weight distributions: exhaustive (empirical) and closed-form (predicted).
//!
//! Every closed-form table depends on `q`, `m` and the five cardinalities in
//! [`SetStats`] only. Rows are evaluated over `Q` (terms such as `q^{|A|−1}` are
//! fractional when `|A| = 0`), then canonicalized: rows with zero multiplicity are
//! dropped and rows with equal weight are merged.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gf::FieldTower;
use crate::ringcode::{enumerate_code, DefiningSet, Family};
use crate::simplicial::SetStats;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Empirical,
    Predicted,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Empirical => "empirical",
            Source::Predicted => "predicted",
        }
    }
}

/// Weight distribution over distinct codewords, including `0 ↦ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeeSpectrum {
    pub n: u64,
    pub q: u32,
    pub size: BigUint,
    pub table: BTreeMap<u64, BigUint>,
    pub source: Source,
}

impl LeeSpectrum {
    /// `log_q(size)`, the dimension of the Gray image over `Fq`.
    pub fn size_log_q(&self) -> Result<u32> {
        exact_log(&self.size, self.q)
    }

    pub fn total(&self) -> BigUint {
        self.table.values().sum()
    }

    /// Number of distinct nonzero weights.
    pub fn weight_count(&self) -> usize {
        self.table.keys().filter(|&&w| w != 0).count()
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (u64, &BigUint)> {
        self.table
            .iter()
            .filter(|(&w, _)| w != 0)
            .map(|(&w, c)| (w, c))
    }

    pub fn to_json(&self) -> Value {
        let size_log_q = match self.size_log_q() {
            Ok(k) => json!(k),
            Err(_) => Value::Null,
        };
        let table: Vec<Value> = self
            .table
            .iter()
            .map(|(w, c)| json!([w, big_to_json(c)]))
            .collect();
        json!({
            "n": self.n,
            "size_log_q": size_log_q,
            "table": table,
            "source": self.source.as_str(),
        })
    }

    /// Reads the object written by [`LeeSpectrum::to_json`]; `q` is not part of the
    /// payload and must be supplied.
    pub fn from_json(v: &Value, q: u32) -> Result<LeeSpectrum> {
        let bad = |what: &str| Error::InvalidParameter(format!("spectrum JSON: {what}"));
        let n = v["n"]
            .as_u64()
            .ok_or_else(|| bad("missing integer \"n\""))?;
        let rows = v["table"]
            .as_array()
            .ok_or_else(|| bad("missing array \"table\""))?;
        let mut table = BTreeMap::new();
        for row in rows {
            let pair = row
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| bad("row is not a pair"))?;
            let w = pair[0]
                .as_u64()
                .ok_or_else(|| bad("weight is not an integer"))?;
            let c = big_from_json(&pair[1]).ok_or_else(|| bad("multiplicity is not an integer"))?;
            *table.entry(w).or_insert_with(BigUint::zero) += c;
        }
        let size = match v["size_log_q"].as_u64() {
            Some(k) => BigUint::from(q).pow(k as u32),
            None => table.values().sum(),
        };
        let source = match v["source"].as_str() {
            Some("predicted") => Source::Predicted,
            _ => Source::Empirical,
        };
        Ok(LeeSpectrum {
            n,
            q,
            size,
            table,
            source,
        })
    }
}

/// `1 + 2z^112 + 482z^224 + …`
impl fmt::Display for LeeSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&w, c) in &self.table {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match (w, c.is_one()) {
                (0, _) => write!(f, "{c}")?,
                (_, true) => write!(f, "z^{w}")?,
                (_, false) => write!(f, "{c}z^{w}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

pub(crate) fn big_to_json(c: &BigUint) -> Value {
    match c.to_u128() {
        Some(v) if v <= u64::MAX as u128 => json!(v as u64),
        Some(v) => json!(v),
        None => json!(c.to_string()),
    }
}

fn big_from_json(v: &Value) -> Option<BigUint> {
    match v {
        Value::Number(n) => n
            .as_u64()
            .map(BigUint::from)
            .or_else(|| n.to_string().parse().ok()),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

pub(crate) fn exact_log(size: &BigUint, q: u32) -> Result<u32> {
    let mut k = 0;
    let mut x = BigUint::one();
    while &x < size {
        x *= q;
        k += 1;
    }
    if &x == size {
        Ok(k)
    } else {
        Err(Error::NonIntegralDimension {
            size: size.to_string(),
            q,
        })
    }
}

/// Exhaustive spectrum: counts messages per Lee weight, then divides by the number
/// of messages encoding the zero word.
pub fn empirical_spectrum(t: &FieldTower, l: &DefiningSet) -> Result<LeeSpectrum> {
    let counts = enumerate_code(t, l)?.weight_counts();
    spectrum_from_counts(t, l.len() as u64, &counts)
}

pub(crate) fn spectrum_from_counts(
    t: &FieldTower,
    n: u64,
    counts: &BTreeMap<u64, u64>,
) -> Result<LeeSpectrum> {
    let a0 = *counts
        .get(&0)
        .ok_or_else(|| Error::Internal("zero message missing from enumeration".into()))?;
    let mut table = BTreeMap::new();
    for (&w, &c) in counts {
        if c % a0 != 0 {
            return Err(Error::NonIntegralDivision {
                count: c,
                repetition: a0,
            });
        }
        table.insert(w, BigUint::from(c / a0));
    }
    Ok(LeeSpectrum {
        n,
        q: t.q(),
        size: BigUint::from(t.message_count() / a0),
        table,
        source: Source::Empirical,
    })
}

/// `q^e` as an exact rational (negative exponents allowed).
pub(crate) struct Pow {
    q: BigRational,
}

impl Pow {
    pub(crate) fn new(q: u32) -> Pow {
        Pow {
            q: BigRational::from_integer(BigInt::from(q)),
        }
    }

    pub(crate) fn p(&self, e: i64) -> BigRational {
        if e >= 0 {
            num_traits::pow(self.q.clone(), e as usize)
        } else {
            num_traits::pow(self.q.recip(), (-e) as usize)
        }
    }

    pub(crate) fn int(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
}

/// A raw table row `(weight, multiplicity)` before canonicalization.
pub type Row = (BigRational, BigRational);

/// The unmerged rows of the closed-form table for `family`, in their listed order.
/// No hypotheses are checked.
pub fn table_rows(family: Family, q: u32, m: u32, s: &SetStats) -> Vec<Row> {
    let z = Pow::new(q);
    let p = |e: i64| z.p(e);
    let k = |v: i64| z.int(v);
    let q1 = k(q as i64 - 1);
    let m = m as i64;
    let (a, b, bp, ab, abp) = (
        s.a as i64,
        s.b as i64,
        s.bp as i64,
        s.ab as i64,
        s.abp as i64,
    );
    match family {
        Family::One => {
            let diff = p(b) - p(bp);
            vec![
                (k(2) * &q1 * p(a + b - 1), p(ab - abp) - k(1)),
                (
                    k(2) * &q1 * p(a - 1) * &diff,
                    p(a + ab) - k(2) * p(ab - bp) + p(ab - abp),
                ),
                (&q1 * p(a - 1) * &diff, k(2) * (p(ab - b) - k(1))),
                (
                    &q1 * p(a - 1) * (k(2) * p(b) - p(bp)),
                    k(2) * (p(ab - bp) - p(ab - b) - p(ab - abp) + k(1)),
                ),
            ]
        }
        Family::Two => {
            let diff = p(b) - p(bp);
            let gap = p(m - 1) - p(a - 1);
            vec![
                (&q1 * p(m - 1) * &diff, k(2) * (p(m - ab) - k(1))),
                (&q1 * &gap * &diff, k(2) * (p(m - b) - p(m - ab))),
                (
                    k(2) * &q1 * p(m - 1) * &diff,
                    p(m - ab) * (p(m - a) - k(1)) - (p(m - ab) - k(1)),
                ),
                (
                    &q1 * (k(2) * p(m - 1) - p(a - 1)) * &diff,
                    k(2) * (p(m - b) - p(m - ab)) * (p(m - a) - k(1)),
                ),
                (
                    k(2) * &q1 * &gap * &diff,
                    p(2 * m) - p(m - a) * (k(2) * p(m - bp) - p(m - abp)),
                ),
                (
                    &q1 * (k(2) * (p(m) - p(a)) * p(b - 1) - p(m + bp - 1)),
                    k(2) * (p(m - abp) - p(m - ab)),
                ),
                (
                    &q1 * &gap * (k(2) * p(b) - p(bp)),
                    k(2) * (p(m - bp) - p(m - b)) - k(2) * (p(m - abp) - p(m - ab)),
                ),
                (
                    k(2) * &q1 * (&gap * p(b) - p(m + bp - 1)),
                    (p(m - abp) - p(m - ab)) * (p(m - a) - k(2)),
                ),
                (
                    &q1 * (k(2) * &gap * &diff - p(a + bp - 1)),
                    k(2) * (p(m - bp) - p(m - b) - p(m - abp) + p(m - ab)) * (p(m - a) - k(1)),
                ),
            ]
        }
        Family::Three => {
            let len2 = p(m) - p(b) + p(bp);
            vec![
                (
                    k(2) * &q1 * p(a - 1) * &len2,
                    p(m + a) - k(2) * p(m - bp) + p(m - abp),
                ),
                (k(2) * &q1 * p(m + a - 1), p(m - ab) - k(1)),
                (
                    &q1 * p(a - 1) * (k(2) * p(m) - p(b) + p(bp)),
                    k(2) * (p(m - b) - p(m - ab)),
                ),
                (
                    k(2) * &q1 * p(a - 1) * (p(m) - p(b)),
                    p(m - abp) - p(m - ab),
                ),
                (
                    &q1 * p(a - 1) * (k(2) * p(m) - k(2) * p(b) + p(bp)),
                    k(2) * (p(m - bp) - p(m - b) - p(m - abp) + p(m - ab)),
                ),
            ]
        }
        Family::Four => {
            let len2 = p(m) - p(b) + p(bp);
            let gap = p(m - 1) - p(a - 1);
            vec![
                (k(2) * &q1 * p(m - 1) * &len2, p(m - a) - k(1)),
                (
                    k(2) * &q1 * &gap * &len2,
                    p(2 * m) - p(m - a) * (k(2) * p(m - bp) - p(m - abp)),
                ),
                (
                    &q1 * p(m - 1) * (k(2) * p(m) - k(2) * p(a) - p(b) + p(bp)),
                    k(2) * (p(m - ab) - k(1)),
                ),
                (
                    &q1 * &gap * (k(2) * p(m) - p(b) + p(bp)),
                    k(2) * (p(m - b) - p(m - ab)),
                ),
                (
                    k(2) * &q1 * p(m - 1) * (p(m) - p(a) - p(b) + p(bp)),
                    (p(m - ab) - k(1)) * (p(m - a) - k(2)),
                ),
                (
                    &q1 * (k(2) * p(m - 1) * (p(m) - p(a))
                        - (k(2) * p(m - 1) - p(a - 1)) * (p(b) - p(bp))),
                    k(2) * (p(m - b) - p(m - ab)) * (p(m - a) - k(1)),
                ),
                (
                    &q1 * (k(2) * &gap * (p(m) - p(b)) + p(m + bp - 1)),
                    k(2) * (p(m - abp) - p(m - ab)),
                ),
                (
                    &q1 * &gap * (k(2) * p(m) - k(2) * p(b) + p(bp)),
                    k(2) * (p(m - bp) - p(m - b) - p(m - abp) + p(m - ab)),
                ),
                (
                    &q1 * (k(2) * &gap * (p(m) - p(b)) + k(2) * p(m + bp - 1)),
                    (p(m - abp) - p(m - ab)) * (p(m - a) - k(2)),
                ),
                (
                    &q1 * (k(2) * &gap * (p(m) - p(b)) + (k(2) * p(m) - p(a)) * p(bp - 1)),
                    k(2) * (p(m - bp) - p(m - b) - p(m - abp) + p(m - ab)) * (p(m - a) - k(1)),
                ),
            ]
        }
    }
}

/// Claimed code length over `R`.
pub fn predicted_length(family: Family, q: u32, m: u32, s: &SetStats) -> BigUint {
    let q = BigUint::from(q);
    let p = |e: u32| q.pow(e);
    let len1 = match family {
        Family::One | Family::Three => p(s.a),
        Family::Two | Family::Four => p(m) - p(s.a),
    };
    let len2 = match family {
        Family::One | Family::Two => p(s.b) - p(s.bp),
        Family::Three | Family::Four => p(m) - p(s.b) + p(s.bp),
    };
    len1 * len2
}

/// Claimed number of distinct codewords.
pub fn predicted_size(family: Family, q: u32, m: u32, s: &SetStats) -> BigUint {
    let e = match family {
        Family::One => s.a + s.ab,
        Family::Two | Family::Four => 2 * m,
        Family::Three => m + s.a,
    };
    BigUint::from(q).pow(e)
}

/// Checks the closed-form table's standing assumptions for `family`.
pub fn check_hypotheses(family: Family, m: u32, s: &SetStats) -> Result<()> {
    let ctx = format!("family {} weight table", family.number());
    if !s.is_realizable(m) {
        return Err(Error::hypothesis(
            ctx,
            "cardinalities realizable by B′ ⊆ B ⊆ [m], A ⊆ [m]",
        ));
    }
    let fail = |cond: &str| Err(Error::hypothesis(ctx.clone(), cond));
    match family {
        Family::One => {
            if s.bp >= s.b {
                return fail("B′ ⊂ B");
            }
            if s.a + s.bp == 0 {
                return fail("|A| + |B′| > 0");
            }
        }
        Family::Two => {
            if s.a >= m {
                return fail("A ⊂ [m]");
            }
            if s.bp >= s.b {
                return fail("B′ ⊂ B");
            }
        }
        Family::Three => {
            if s.b >= m {
                return fail("B ⊂ [m]");
            }
        }
        Family::Four => {
            if s.a >= m {
                return fail("A ⊂ [m]");
            }
            if s.b >= m {
                return fail("B ⊂ [m]");
            }
        }
    }
    Ok(())
}

/// Drops zero-multiplicity rows and merges equal weights. Fails if a surviving row
/// has a non-integral or negative entry.
pub fn canonicalize(rows: &[Row]) -> Result<BTreeMap<u64, BigUint>> {
    let mut merged: BTreeMap<BigRational, BigRational> = BTreeMap::new();
    for (w, c) in rows {
        if c.is_zero() {
            continue;
        }
        *merged.entry(w.clone()).or_insert_with(BigRational::zero) += c;
    }
    let mut table = BTreeMap::new();
    for (w, c) in merged {
        if c.is_zero() {
            continue;
        }
        if !w.is_integer() || w.is_negative() || !c.is_integer() || c.is_negative() {
            return Err(Error::Internal(format!(
                "closed-form row {w} : {c} is not a nonnegative integer pair"
            )));
        }
        let w = w
            .to_integer()
            .to_u64()
            .ok_or_else(|| Error::Internal(format!("weight {w} overflows")))?;
        let c = c.to_integer().to_biguint().expect("nonnegative");
        table.insert(w, c);
    }
    Ok(table)
}

/// Closed-form spectrum for `family` under its hypotheses.
pub fn predicted_spectrum(family: Family, q: u32, m: u32, s: &SetStats) -> Result<LeeSpectrum> {
    check_hypotheses(family, m, s)?;
    predicted_spectrum_unchecked(family, q, m, s)
}

/// As [`predicted_spectrum`] but evaluates the table for any cardinalities
/// (used to build perturbed controls).
pub fn predicted_spectrum_unchecked(
    family: Family,
    q: u32,
    m: u32,
    s: &SetStats,
) -> Result<LeeSpectrum> {
    let mut table = canonicalize(&table_rows(family, q, m, s))?;
    table.insert(0, BigUint::one());
    let n = predicted_length(family, q, m, s)
        .to_u64()
        .ok_or_else(|| Error::Internal("length overflows u64".into()))?;
    Ok(LeeSpectrum {
        n,
        q,
        size: predicted_size(family, q, m, s),
        table,
        source: Source::Predicted,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffEntry {
    pub weight: u64,
    pub empirical: BigUint,
    pub predicted: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DiffReport {
    /// `(empirical, predicted)` lengths when they differ.
    pub length: Option<(u64, u64)>,
    /// `(empirical, predicted)` sizes when they differ.
    pub size: Option<(BigUint, BigUint)>,
    pub rows: Vec<DiffEntry>,
}

impl DiffReport {
    pub fn is_empty(&self) -> bool {
        self.length.is_none() && self.size.is_none() && self.rows.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|d| {
                json!([
                    d.weight,
                    big_to_json(&d.empirical),
                    big_to_json(&d.predicted)
                ])
            })
            .collect();
        json!({
            "match": self.is_empty(),
            "length": self.length.map(|(e, p)| json!([e, p])),
            "size": self.size.as_ref().map(|(e, p)| json!([big_to_json(e), big_to_json(p)])),
            "rows": rows,
        })
    }
}

pub fn compare(e: &LeeSpectrum, p: &LeeSpectrum) -> DiffReport {
    let zero = BigUint::zero();
    let mut rows = Vec::new();
    let weights: std::collections::BTreeSet<u64> =
        e.table.keys().chain(p.table.keys()).copied().collect();
    for w in weights {
        let ec = e.table.get(&w).unwrap_or(&zero);
        let pc = p.table.get(&w).unwrap_or(&zero);
        if ec != pc {
            rows.push(DiffEntry {
                weight: w,
                empirical: ec.clone(),
                predicted: pc.clone(),
            });
        }
    }
    DiffReport {
        length: (e.n != p.n).then_some((e.n, p.n)),
        size: (e.size != p.size).then(|| (e.size.clone(), p.size.clone())),
        rows,
    }
}

pub fn min_nonzero_weight(s: &LeeSpectrum) -> Result<u64> {
    s.table
        .iter()
        .find(|(&w, c)| w != 0 && !c.is_zero())
        .map(|(&w, _)| w)
        .ok_or(Error::ZeroCode)
}
