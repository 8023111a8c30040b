//! Trace codes over `R = Fq + uFq` (`u² = 0`).
//!
//! A message `a + ub ∈ Fq^m + uFq^m` is sent to the codeword whose coordinate at
//! `x + uy ∈ L` is `Tr((a+ub)(x+uy)) = Tr(ax) + u·Tr(ay + bx)`. Codewords are kept
//! as `(c_a, c_b)` pairs; the Gray map `c_a + u c_b ↦ (c_b, c_a + c_b)` is applied
//! only when a vector over `Fq` is needed.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{BaseElem, ExtElem, FieldTower};
use crate::simplicial::{build_family_set, PointSet, SetShape, Supports};

/// Which of the four defining-set shapes `L = L_1 + uL_2` is used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// `Δ_A + u(Δ_B ∖ Δ_{B′})`
    One,
    /// `Δ_A^c + u(Δ_B ∖ Δ_{B′})`
    Two,
    /// `Δ_A + u(Δ_B ∖ Δ_{B′})^c`
    Three,
    /// `Δ_A^c + u(Δ_B ∖ Δ_{B′})^c`
    Four,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::One, Family::Two, Family::Three, Family::Four];

    pub fn from_number(n: u8) -> Result<Family> {
        match n {
            1 => Ok(Family::One),
            2 => Ok(Family::Two),
            3 => Ok(Family::Three),
            4 => Ok(Family::Four),
            _ => Err(Error::InvalidParameter(format!(
                "family must be 1..4, got {n}"
            ))),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Family::One => 1,
            Family::Two => 2,
            Family::Three => 3,
            Family::Four => 4,
        }
    }

    fn first_is_complement(self) -> bool {
        matches!(self, Family::Two | Family::Four)
    }

    fn second_is_complement(self) -> bool {
        matches!(self, Family::Three | Family::Four)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// The ordered defining set: all pairs `(x, y)` with `x ∈ L_1`, `y ∈ L_2`,
/// lexicographic in `(codec(x), codec(y))`.
#[derive(Clone, Debug)]
pub struct DefiningSet {
    family: Family,
    supports: Supports,
    first: PointSet,
    second: PointSet,
}

impl DefiningSet {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn supports(&self) -> &Supports {
        &self.supports
    }

    /// `L_1`, the set the `x` coordinate ranges over.
    pub fn first(&self) -> &PointSet {
        &self.first
    }

    /// `L_2`, the set the `y` coordinate ranges over.
    pub fn second(&self) -> &PointSet {
        &self.second
    }

    /// Code length `n = |L_1| · |L_2|`.
    pub fn len(&self) -> usize {
        self.first.len() * self.second.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pairs(&self) -> impl Iterator<Item = (ExtElem, ExtElem)> + '_ {
        self.first
            .points()
            .iter()
            .flat_map(move |&x| self.second.points().iter().map(move |&y| (x, y)))
    }
}

pub fn build_defining_set(
    t: &FieldTower,
    family: Family,
    supports: &Supports,
) -> Result<DefiningSet> {
    let Supports { a, b, bp } = supports;
    if family.first_is_complement() && a.is_full() {
        return Err(Error::EmptyComponent {
            family: family.number(),
            condition: "A ⊂ [m]".into(),
        });
    }
    if !family.second_is_complement() && b.len() == bp.len() {
        return Err(Error::EmptyComponent {
            family: family.number(),
            condition: "B′ ⊂ B".into(),
        });
    }
    let first = if family.first_is_complement() {
        build_family_set(t, SetShape::DeltaComplement(a))?
    } else {
        build_family_set(t, SetShape::Delta(a))?
    };
    let second = if family.second_is_complement() {
        build_family_set(t, SetShape::DifferenceComplement { b, bp })?
    } else {
        build_family_set(t, SetShape::Difference { b, bp })?
    };
    Ok(DefiningSet {
        family,
        supports: supports.clone(),
        first,
        second,
    })
}

/// An element `a + ub` of `Fq^m + uFq^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RingElt {
    pub a: ExtElem,
    pub b: ExtElem,
}

impl RingElt {
    pub fn new(a: ExtElem, b: ExtElem) -> RingElt {
        RingElt { a, b }
    }

    pub fn add(self, t: &FieldTower, o: RingElt) -> RingElt {
        RingElt::new(t.add(self.a, o.a), t.add(self.b, o.b))
    }

    /// `(a + ub)(x + uy) = ax + u(ay + bx)`.
    pub fn mul(self, t: &FieldTower, o: RingElt) -> RingElt {
        RingElt::new(
            t.mul(self.a, o.a),
            t.add(t.mul(self.a, o.b), t.mul(self.b, o.a)),
        )
    }
}

/// A codeword over `R`: coordinate `i` is `c_a[i] + u·c_b[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingCodeword {
    pub entries: Vec<(BaseElem, BaseElem)>,
}

impl RingCodeword {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add(&self, t: &FieldTower, o: &RingCodeword) -> RingCodeword {
        RingCodeword {
            entries: self
                .entries
                .iter()
                .zip(&o.entries)
                .map(|(&(a, b), &(c, d))| (t.base_add(a, c), t.base_add(b, d)))
                .collect(),
        }
    }

    pub fn sub(&self, t: &FieldTower, o: &RingCodeword) -> RingCodeword {
        RingCodeword {
            entries: self
                .entries
                .iter()
                .zip(&o.entries)
                .map(|(&(a, b), &(c, d))| (t.base_sub(a, c), t.base_sub(b, d)))
                .collect(),
        }
    }

    /// Multiplication by the ring scalar `r_a + u r_b ∈ R`.
    pub fn scale(&self, t: &FieldTower, ra: BaseElem, rb: BaseElem) -> RingCodeword {
        RingCodeword {
            entries: self
                .entries
                .iter()
                .map(|&(ca, cb)| {
                    (
                        t.base_mul(ra, ca),
                        t.base_add(t.base_mul(ra, cb), t.base_mul(rb, ca)),
                    )
                })
                .collect(),
        }
    }
}

/// Codeword of the message `a + ub`, evaluated coordinate by coordinate.
pub fn encode(t: &FieldTower, l: &DefiningSet, a: ExtElem, b: ExtElem) -> RingCodeword {
    RingCodeword {
        entries: l
            .pairs()
            .map(|(x, y)| {
                let ca = t.trace_qm_to_q(t.mul(a, x));
                let cb = t.trace_qm_to_q(t.add(t.mul(a, y), t.mul(b, x)));
                (ca, cb)
            })
            .collect(),
    }
}

/// `wt_L(c_a + u c_b) = wt(c_b) + wt(c_a + c_b)`.
pub fn lee_weight(t: &FieldTower, w: &RingCodeword) -> usize {
    w.entries
        .iter()
        .map(|&(ca, cb)| usize::from(!cb.is_zero()) + usize::from(!t.base_add(ca, cb).is_zero()))
        .sum()
}

/// Gray image `(c_b, c_a + c_b)` of length `2n`.
pub fn gray(t: &FieldTower, w: &RingCodeword) -> Vec<BaseElem> {
    let mut out: Vec<BaseElem> = w.entries.iter().map(|&(_, cb)| cb).collect();
    out.extend(w.entries.iter().map(|&(ca, cb)| t.base_add(ca, cb)));
    out
}

pub fn hamming_weight(v: &[BaseElem]) -> usize {
    v.iter().filter(|c| !c.is_zero()).count()
}

/// Above this many table entries the per-element `L_1` histograms are built on the fly.
const HISTOGRAM_TABLE_LIMIT: u64 = 1 << 24;

/// Exhaustive traversal of all messages `(a, b) ∈ Fq^m × Fq^m` with their Lee weights.
///
/// The weight of a message is counted without materializing its codeword:
/// with `h_z(s) = #{x ∈ L_1 : Tr(zx) = s}` and `g_a(t) = #{y ∈ L_2 : Tr(ay) = t}`,
/// a coordinate `(x, y)` contributes to `wt(c_b)` unless `Tr(bx) + Tr(ay) = 0`, and to
/// `wt(c_a + c_b)` unless `Tr((a+b)x) + Tr(ay) = 0`, so
/// `wt_L = 2n − Σ_s (h_b(s) + h_{a+b}(s)) · g_a(−s)`.
pub struct CodeEnumerator<'a> {
    t: &'a FieldTower,
    first: &'a [ExtElem],
    second: &'a [ExtElem],
    q: usize,
    neg: Vec<usize>,
    /// `h_z` for every `z`, row-major by codec value; `None` when too large.
    first_hist: Option<Vec<u32>>,
}

pub fn enumerate_code<'a>(t: &'a FieldTower, l: &'a DefiningSet) -> Result<CodeEnumerator<'a>> {
    let needed = u128::from(t.message_count());
    if needed > t.budget() {
        return Err(Error::BudgetExceeded {
            needed,
            budget: t.budget(),
        });
    }
    let q = t.q() as usize;
    let neg = t
        .base_elements()
        .map(|s| t.base_neg(s).0 as usize)
        .collect();
    let mut e = CodeEnumerator {
        t,
        first: l.first().points(),
        second: l.second().points(),
        q,
        neg,
        first_hist: None,
    };
    if u64::from(t.ext_order()) * q as u64 <= HISTOGRAM_TABLE_LIMIT {
        let mut table = vec![0u32; t.ext_order() as usize * q];
        table
            .par_chunks_mut(q)
            .enumerate()
            .for_each(|(z, row)| e.fill_hist(e.first, ExtElem(z as u32), row));
        e.first_hist = Some(table);
    }
    Ok(e)
}

impl<'a> CodeEnumerator<'a> {
    pub fn message_count(&self) -> u64 {
        self.t.message_count()
    }

    /// Code length `n`.
    pub fn code_len(&self) -> u64 {
        (self.first.len() * self.second.len()) as u64
    }

    fn fill_hist(&self, set: &[ExtElem], z: ExtElem, out: &mut [u32]) {
        out.fill(0);
        for &x in set {
            out[self.t.trace_qm_to_q(self.t.mul(z, x)).0 as usize] += 1;
        }
    }

    fn weight_with(&self, g_a: &[u32], b: ExtElem, c: ExtElem, scratch: &mut [u32]) -> u64 {
        let mut agree = 0u64;
        let mut add_row = |row: &[u32]| {
            for (s, &h) in row.iter().enumerate() {
                if h != 0 {
                    agree += u64::from(h) * u64::from(g_a[self.neg[s]]);
                }
            }
        };
        match &self.first_hist {
            Some(table) => {
                let q = self.q;
                add_row(&table[b.0 as usize * q..(b.0 as usize + 1) * q]);
                add_row(&table[c.0 as usize * q..(c.0 as usize + 1) * q]);
            }
            None => {
                self.fill_hist(self.first, b, scratch);
                add_row(scratch);
                self.fill_hist(self.first, c, scratch);
                add_row(scratch);
            }
        }
        2 * self.code_len() - agree
    }

    fn second_hist(&self, a: ExtElem) -> Vec<u32> {
        let mut g = vec![0u32; self.q];
        self.fill_hist(self.second, a, &mut g);
        g
    }

    /// Lee weight of the codeword of `a + ub`.
    pub fn weight(&self, a: ExtElem, b: ExtElem) -> u64 {
        let g = self.second_hist(a);
        let mut scratch = vec![0u32; self.q];
        self.weight_with(&g, b, self.t.add(a, b), &mut scratch)
    }

    /// Every message once, `a`-major in codec order.
    pub fn iter(&self) -> impl Iterator<Item = (ExtElem, ExtElem, u64)> + '_ {
        self.t.elements().flat_map(move |a| {
            let g = self.second_hist(a);
            let mut scratch = vec![0u32; self.q];
            self.t.elements().map(move |b| {
                let w = self.weight_with(&g, b, self.t.add(a, b), &mut scratch);
                (a, b, w)
            })
        })
    }

    /// Parallel fold over disjoint chunks (one chunk per value of `a`).
    /// `merge` must be associative and commutative.
    pub fn fold_chunks<T, I, F, M>(&self, identity: I, fold: F, merge: M) -> T
    where
        T: Send,
        I: Fn() -> T + Sync + Send,
        F: Fn(T, ExtElem, ExtElem, u64) -> T + Sync + Send,
        M: Fn(T, T) -> T + Sync + Send,
    {
        (0..self.t.ext_order())
            .into_par_iter()
            .map(|a| {
                let a = ExtElem(a);
                let g = self.second_hist(a);
                let mut scratch = vec![0u32; self.q];
                let mut acc = identity();
                for b in self.t.elements() {
                    let w = self.weight_with(&g, b, self.t.add(a, b), &mut scratch);
                    acc = fold(acc, a, b, w);
                }
                acc
            })
            .reduce(&identity, &merge)
    }

    /// Number of messages per Lee weight.
    pub fn weight_counts(&self) -> BTreeMap<u64, u64> {
        self.fold_chunks(
            BTreeMap::new,
            |mut acc, _, _, w| {
                *acc.entry(w).or_insert(0) += 1;
                acc
            },
            |mut x, y| {
                for (w, c) in y {
                    *x.entry(w).or_insert(0) += c;
                }
                x
            },
        )
    }
}

/// Generator matrix of the Gray image over `Fq`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorMatrix {
    pub rows: Vec<Vec<BaseElem>>,
}

impl GeneratorMatrix {
    /// Dimension `k`.
    pub fn k(&self) -> usize {
        self.rows.len()
    }

    /// Gray length `2n`.
    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }
}

/// Gray images of the messages `α_i` and `uα_i` (which span the code over `Fq`),
/// keeping each row that is independent of those already kept.
pub fn generator_matrix(t: &FieldTower, l: &DefiningSet) -> GeneratorMatrix {
    let candidates = t
        .basis()
        .iter()
        .map(|&al| (al, ExtElem::ZERO))
        .chain(t.basis().iter().map(|&al| (ExtElem::ZERO, al)));
    let mut rows: Vec<Vec<BaseElem>> = Vec::new();
    for (a, b) in candidates {
        let row = gray(t, &encode(t, l, a, b));
        rows.push(row);
        if t.rank(&rows) < rows.len() {
            rows.pop();
        }
    }
    GeneratorMatrix { rows }
}

fn format_support(s: &crate::simplicial::Support) -> String {
    if s.is_empty() {
        "-".to_string()
    } else {
        s.indices()
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Plain-text export: a header line `q m family A B B' n k` (sets as comma lists,
/// `-` for the empty set, `n` the length over `R`), then one row per line with
/// entries as codec integers separated by single spaces.
pub fn write_generator_matrix<W: Write>(
    mut out: W,
    t: &FieldTower,
    l: &DefiningSet,
    g: &GeneratorMatrix,
) -> std::io::Result<()> {
    let s = l.supports();
    writeln!(
        out,
        "{} {} {} {} {} {} {} {}",
        t.q(),
        t.m(),
        l.family(),
        format_support(&s.a),
        format_support(&s.b),
        format_support(&s.bp),
        l.len(),
        g.k()
    )?;
    for row in &g.rows {
        let line: Vec<String> = row.iter().map(|c| c.0.to_string()).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}
