//! Point sets generated by simplicial complexes of `Fq^m` with one maximal element.
//!
//! A support `A ⊆ [m]` generates `Δ_A`, the `Fq`-span of `{α_i : i ∈ A}`. Its dual
//! under the trace form is the span of `{β_j : j ∉ A}`. Every set here is
//! materialized as a sorted list of codec values.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{ExtElem, FieldTower};

/// A support set `A ⊆ [m]`, stored sorted and 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Support {
    m: usize,
    indices: Vec<usize>,
}

impl Support {
    pub fn new(m: usize, indices: impl IntoIterator<Item = usize>) -> Result<Support> {
        let set: BTreeSet<usize> = indices.into_iter().collect();
        if let Some(&bad) = set.iter().find(|&&i| i == 0 || i > m) {
            return Err(Error::InvalidParameter(format!(
                "support index {bad} outside [1, {m}]"
            )));
        }
        Ok(Support {
            m,
            indices: set.into_iter().collect(),
        })
    }

    pub fn empty(m: usize) -> Support {
        Support {
            m,
            indices: Vec::new(),
        }
    }

    pub fn full(m: usize) -> Support {
        Support {
            m,
            indices: (1..=m).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.indices.len() == self.m
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn is_subset_of(&self, other: &Support) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }

    pub fn union(&self, other: &Support) -> Support {
        Support::new(self.m, self.indices.iter().chain(&other.indices).copied())
            .expect("union of valid supports")
    }

    pub fn intersection(&self, other: &Support) -> Support {
        Support::new(
            self.m,
            self.indices.iter().copied().filter(|&i| other.contains(i)),
        )
        .expect("intersection of valid supports")
    }

    pub fn complement(&self) -> Support {
        Support::new(self.m, (1..=self.m).filter(|&i| !self.contains(i)))
            .expect("complement of a valid support")
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// The three supports `(A, B, B′)` of a construction, with `B′ ⊆ B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Supports {
    pub a: Support,
    pub b: Support,
    pub bp: Support,
}

impl Supports {
    pub fn new(a: Support, b: Support, bp: Support) -> Result<Supports> {
        if a.m() != b.m() || b.m() != bp.m() {
            return Err(Error::InvalidParameter(
                "supports are over different ambient sizes".into(),
            ));
        }
        if !bp.is_subset_of(&b) {
            return Err(Error::NotASubset {
                inner: format!("B′ = {bp}"),
                outer: format!("B = {b}"),
            });
        }
        Ok(Supports { a, b, bp })
    }

    pub fn m(&self) -> usize {
        self.a.m()
    }

    pub fn stats(&self) -> SetStats {
        set_stats(&self.a, &self.b, &self.bp)
    }
}

/// Where a point set came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Delta,
    DeltaComplement,
    Difference,
    DifferenceComplement,
    Dual,
    Full,
}

/// An explicit subset of `Fq^m`, ascending by codec value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    points: Vec<ExtElem>,
    origin: Origin,
}

impl PointSet {
    pub fn points(&self) -> &[ExtElem] {
        &self.points
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, x: ExtElem) -> bool {
        self.points.binary_search(&x).is_ok()
    }

    /// Membership bitmap indexed by codec value.
    pub fn indicator(&self, ext_order: u32) -> Vec<bool> {
        let mut out = vec![false; ext_order as usize];
        for x in &self.points {
            out[x.0 as usize] = true;
        }
        out
    }
}

/// Set shapes that appear as components of a defining set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetShape<'a> {
    Delta(&'a Support),
    DeltaComplement(&'a Support),
    Difference { b: &'a Support, bp: &'a Support },
    DifferenceComplement { b: &'a Support, bp: &'a Support },
    Full,
}

fn check_dim(t: &FieldTower, s: &Support) -> Result<()> {
    if s.m() != t.m() as usize {
        return Err(Error::DimensionMismatch {
            tower: t.m() as usize,
            support: s.m(),
        });
    }
    Ok(())
}

/// Sorted `Fq`-span of the given generators.
pub fn span(t: &FieldTower, generators: &[ExtElem]) -> Vec<ExtElem> {
    let mut points = vec![ExtElem::ZERO];
    for &g in generators {
        let mut next = Vec::with_capacity(points.len() * t.q() as usize);
        for c in t.base_elements() {
            let cg = t.scale(c, g);
            next.extend(points.iter().map(|&x| t.add(x, cg)));
        }
        points = next;
    }
    points.sort_unstable();
    points.dedup();
    points
}

/// `Δ_A`: all `Fq`-combinations of `{α_i : i ∈ A}`.
pub fn build_delta(t: &FieldTower, a: &Support) -> Result<PointSet> {
    check_dim(t, a)?;
    let gens: Vec<ExtElem> = a.indices().iter().map(|&i| t.basis()[i - 1]).collect();
    Ok(PointSet {
        points: span(t, &gens),
        origin: Origin::Delta,
    })
}

/// `Δ_A^⊥`: the span of `{β_j : j ∉ A}`.
pub fn build_dual(t: &FieldTower, a: &Support) -> Result<PointSet> {
    check_dim(t, a)?;
    let gens: Vec<ExtElem> = a
        .complement()
        .indices()
        .iter()
        .map(|&j| t.dual_basis()[j - 1])
        .collect();
    Ok(PointSet {
        points: span(t, &gens),
        origin: Origin::Dual,
    })
}

fn complement_of(t: &FieldTower, set: &PointSet, origin: Origin) -> PointSet {
    let inside = set.indicator(t.ext_order());
    PointSet {
        points: t.elements().filter(|x| !inside[x.0 as usize]).collect(),
        origin,
    }
}

fn difference(t: &FieldTower, b: &Support, bp: &Support) -> Result<PointSet> {
    check_dim(t, b)?;
    check_dim(t, bp)?;
    if !bp.is_subset_of(b) {
        return Err(Error::NotASubset {
            inner: format!("B′ = {bp}"),
            outer: format!("B = {b}"),
        });
    }
    let db = build_delta(t, b)?;
    let dbp = build_delta(t, bp)?;
    Ok(PointSet {
        points: db
            .points
            .into_iter()
            .filter(|&x| !dbp.contains(x))
            .collect(),
        origin: Origin::Difference,
    })
}

/// One of the component sets `Δ_A`, `Δ_A^c`, `Δ_B∖Δ_{B′}`, `(Δ_B∖Δ_{B′})^c`, `Fq^m`.
/// Complements are taken in `Fq^m`.
pub fn build_family_set(t: &FieldTower, shape: SetShape<'_>) -> Result<PointSet> {
    match shape {
        SetShape::Delta(a) => build_delta(t, a),
        SetShape::DeltaComplement(a) => {
            let d = build_delta(t, a)?;
            Ok(complement_of(t, &d, Origin::DeltaComplement))
        }
        SetShape::Difference { b, bp } => difference(t, b, bp),
        SetShape::DifferenceComplement { b, bp } => {
            let d = difference(t, b, bp)?;
            Ok(complement_of(t, &d, Origin::DifferenceComplement))
        }
        SetShape::Full => Ok(PointSet {
            points: t.elements().collect(),
            origin: Origin::Full,
        }),
    }
}

/// The five cardinalities every weight table is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SetStats {
    /// `|A|`
    pub a: u32,
    /// `|B|`
    pub b: u32,
    /// `|B′|`
    pub bp: u32,
    /// `|A ∪ B|`
    pub ab: u32,
    /// `|A ∪ B′|`
    pub abp: u32,
}

pub fn set_stats(a: &Support, b: &Support, bp: &Support) -> SetStats {
    SetStats {
        a: a.len() as u32,
        b: b.len() as u32,
        bp: bp.len() as u32,
        ab: a.union(b).len() as u32,
        abp: a.union(bp).len() as u32,
    }
}

impl SetStats {
    /// Venn-region sizes `(|A∩B′|, |A∩(B∖B′)|, |A∖B|)`, or `None` if these
    /// five numbers cannot come from subsets `B′ ⊆ B ⊆ [m]`, `A ⊆ [m]`.
    fn regions(&self, m: u32) -> Option<(u32, u32, u32)> {
        let SetStats { a, b, bp, ab, abp } = *self;
        if bp > b || b > m || a > m || ab > m {
            return None;
        }
        let in_bp = (a + bp).checked_sub(abp)?;
        let in_b = (a + b).checked_sub(ab)?;
        let in_b_only = in_b.checked_sub(in_bp)?;
        let outside = ab.checked_sub(b)?;
        let ok = in_bp <= bp && in_b_only <= b - bp && outside <= m - b;
        ok.then_some((in_bp, in_b_only, outside))
    }

    pub fn is_realizable(&self, m: u32) -> bool {
        self.regions(m).is_some()
    }

    /// Canonical supports for this class: `B′ = {1..|B′|}`, `B = {1..|B|}`, and
    /// `A` filling each Venn region from its lowest index.
    pub fn representative(&self, m: u32) -> Result<Supports> {
        let (in_bp, in_b_only, outside) = self.regions(m).ok_or_else(|| {
            Error::InvalidParameter(format!("stats {self:?} are not realizable for m = {m}"))
        })?;
        let m_us = m as usize;
        let (b, bp) = (self.b as usize, self.bp as usize);
        let a_idx = (1..=in_bp as usize)
            .chain(bp + 1..=bp + in_b_only as usize)
            .chain(b + 1..=b + outside as usize);
        Supports::new(
            Support::new(m_us, a_idx)?,
            Support::new(m_us, 1..=b)?,
            Support::new(m_us, 1..=bp)?,
        )
    }

    /// Every realizable stats class for ambient size `m`, in a fixed order.
    pub fn enumerate(m: u32) -> Vec<SetStats> {
        let mut out = Vec::new();
        for b in 0..=m {
            for bp in 0..=b {
                for in_bp in 0..=bp {
                    for in_b_only in 0..=b - bp {
                        for outside in 0..=m - b {
                            let a = in_bp + in_b_only + outside;
                            out.push(SetStats {
                                a,
                                b,
                                bp,
                                ab: b + outside,
                                abp: bp + in_b_only + outside,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}
