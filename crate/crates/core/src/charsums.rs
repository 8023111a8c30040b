//! Exact character sums `Σ_{x∈S} ζ_p^{Tr(yx)}` as cyclotomic integers.
//!
//! A sum of `p`-th roots of unity is determined by how many terms land on each
//! power `ζ_p^j`. Those counts are reduced to the power basis `{1, ζ, …, ζ^{p−2}}`
//! with `1 + ζ + … + ζ^{p−1} = 0`, which makes equality (and rationality) exact.
//! This module is an oracle for tests and `verify`; enumeration never calls it.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf::{ExtElem, FieldTower};
use crate::ringcode::{encode, lee_weight, DefiningSet};
use crate::simplicial::{build_delta, build_dual, build_family_set, SetShape, Support};

/// An element `Σ_{i<p−1} c_i ζ_p^i` of `Z[ζ_p]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycInt {
    p: u32,
    coords: Vec<i128>,
}

impl CycInt {
    pub fn zero(p: u32) -> CycInt {
        CycInt {
            p,
            coords: vec![0; p as usize - 1],
        }
    }

    pub fn from_int(p: u32, n: i128) -> CycInt {
        let mut z = CycInt::zero(p);
        z.coords[0] = n;
        z
    }

    /// `Σ_j counts[j] ζ_p^j` for a vector of length `p`.
    pub fn from_counts(counts: &[i128]) -> CycInt {
        let p = counts.len();
        assert!(p >= 2, "need at least two roots of unity");
        let top = counts[p - 1];
        CycInt {
            p: p as u32,
            coords: counts[..p - 1].iter().map(|c| c - top).collect(),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Coefficients on `1, ζ, …, ζ^{p−2}`.
    pub fn coords(&self) -> &[i128] {
        &self.coords
    }

    /// `Some(n)` iff the value is the rational integer `n`.
    pub fn as_integer(&self) -> Option<i128> {
        self.coords[1..]
            .iter()
            .all(|&c| c == 0)
            .then_some(self.coords[0])
    }

    fn padded(&self) -> Vec<i128> {
        let mut v = self.coords.clone();
        v.push(0);
        v
    }

    pub fn add(&self, o: &CycInt) -> CycInt {
        assert_eq!(self.p, o.p);
        CycInt {
            p: self.p,
            coords: self
                .coords
                .iter()
                .zip(&o.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn neg(&self) -> CycInt {
        CycInt {
            p: self.p,
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, o: &CycInt) -> CycInt {
        self.add(&o.neg())
    }

    /// Product: cyclic convolution modulo `x^p − 1`, then reduction.
    pub fn mul(&self, o: &CycInt) -> CycInt {
        assert_eq!(self.p, o.p);
        let p = self.p as usize;
        let (x, y) = (self.padded(), o.padded());
        let mut out = vec![0i128; p];
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.iter().enumerate() {
                out[(i + j) % p] += a * b;
            }
        }
        CycInt::from_counts(&out)
    }
}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.as_integer() {
            return write!(f, "{n}");
        }
        let terms: Vec<String> = self
            .coords
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, c)| match i {
                0 => c.to_string(),
                _ => format!("{c}ζ^{i}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

/// `Σ_{x∈S} ζ_p^{Tr_p(yx)}` with the absolute trace `F_{q^m} → F_p`.
pub fn char_sum(t: &FieldTower, set: &[ExtElem], y: ExtElem) -> CycInt {
    let mut counts = vec![0i128; t.p() as usize];
    for &x in set {
        counts[t.absolute_trace(t.mul(y, x)) as usize] += 1;
    }
    CycInt::from_counts(&counts)
}

/// Outcome of an identity check over many points.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SumCheck {
    pub checked: u64,
    pub exhaustive: bool,
    /// Human-readable description of each failure (capped).
    pub counterexamples: Vec<String>,
    pub failures: u64,
}

const MAX_REPORTED: usize = 10;

impl SumCheck {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.counterexamples.len() < MAX_REPORTED {
                self.counterexamples.push(describe());
            }
        }
    }

    pub fn merge(&mut self, o: SumCheck) {
        self.checked += o.checked;
        self.exhaustive &= o.exhaustive;
        self.failures += o.failures;
        for c in o.counterexamples {
            if self.counterexamples.len() < MAX_REPORTED {
                self.counterexamples.push(c);
            }
        }
    }
}

/// Above this field size the identity checks sample points instead.
pub const EXHAUSTIVE_LIMIT: u32 = 1 << 14;
pub const SAMPLE_SIZE: usize = 10_000;

fn points(t: &FieldTower, seed: u64) -> (Vec<ExtElem>, bool) {
    if t.ext_order() <= EXHAUSTIVE_LIMIT {
        (t.elements().collect(), true)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = (0..SAMPLE_SIZE)
            .map(|_| ExtElem(rng.gen_range(0..t.ext_order())))
            .collect();
        (pts, false)
    }
}

fn qpow(t: &FieldTower, e: usize) -> i128 {
    (t.q() as i128).pow(e as u32)
}

/// `Σ_{x∈Δ_A} ζ^{Tr(yx)}` is `q^{|A|}` on `Δ_A^⊥` and `0` elsewhere.
pub fn check_subspace_sum(t: &FieldTower, a: &Support, seed: u64) -> Result<SumCheck> {
    let delta = build_delta(t, a)?;
    let dual = build_dual(t, a)?;
    let (ys, exhaustive) = points(t, seed);
    let mut r = SumCheck {
        exhaustive,
        ..Default::default()
    };
    for y in ys {
        let expected = if dual.contains(y) {
            qpow(t, a.len())
        } else {
            0
        };
        let got = char_sum(t, delta.points(), y);
        r.record(got.as_integer() == Some(expected), || {
            format!("A = {a}, y = {y}: sum {got}, expected {expected}")
        });
    }
    Ok(r)
}

/// Results for the three displayed evaluations over the component sets.
#[derive(Clone, Debug, Default)]
pub struct IdentityReport {
    /// Sum over `Δ_B ∖ Δ_{B′}`.
    pub difference: SumCheck,
    /// Sum over `Δ_A^c`.
    pub delta_complement: SumCheck,
    /// Sum over `(Δ_B ∖ Δ_{B′})^c`.
    pub difference_complement: SumCheck,
}

impl IdentityReport {
    pub fn pass(&self) -> bool {
        self.difference.pass() && self.delta_complement.pass() && self.difference_complement.pass()
    }
}

/// Checks the case formulas for the character sums over the three non-subspace
/// component sets at every point (or a seeded sample of points).
pub fn verify_sum_identities(
    t: &FieldTower,
    a: &Support,
    b: &Support,
    bp: &Support,
    seed: u64,
) -> Result<IdentityReport> {
    let m = t.m() as usize;
    let diff = build_family_set(t, SetShape::Difference { b, bp })?;
    let diff_c = build_family_set(t, SetShape::DifferenceComplement { b, bp })?;
    let delta_c = build_family_set(t, SetShape::DeltaComplement(a))?;
    let (dual_a, dual_b, dual_bp) = (build_dual(t, a)?, build_dual(t, b)?, build_dual(t, bp)?);
    let (qa, qb, qbp, qm) = (
        qpow(t, a.len()),
        qpow(t, b.len()),
        qpow(t, bp.len()),
        qpow(t, m),
    );

    let (ys, exhaustive) = points(t, seed);
    let fresh = || SumCheck {
        exhaustive,
        ..Default::default()
    };
    let mut report = IdentityReport {
        difference: fresh(),
        delta_complement: fresh(),
        difference_complement: fresh(),
    };
    for y in ys {
        let in_b = dual_b.contains(y);
        let in_bp = dual_bp.contains(y);

        let expected = match (in_b, in_bp) {
            (true, _) => qb - qbp,
            (false, true) => -qbp,
            _ => 0,
        };
        let got = char_sum(t, diff.points(), y);
        report
            .difference
            .record(got.as_integer() == Some(expected), || {
                format!("Δ_B∖Δ_B′ with B = {b}, B′ = {bp}, y = {y}: sum {got}, expected {expected}")
            });

        let expected = match (y.is_zero(), dual_a.contains(y)) {
            (true, _) => qm - qa,
            (false, true) => -qa,
            _ => 0,
        };
        let got = char_sum(t, delta_c.points(), y);
        report
            .delta_complement
            .record(got.as_integer() == Some(expected), || {
                format!("Δ_A^c with A = {a}, y = {y}: sum {got}, expected {expected}")
            });

        let expected = match (y.is_zero(), in_b, in_bp) {
            (true, _, _) => qm - qb + qbp,
            (false, true, _) => -qb + qbp,
            (false, false, true) => qbp,
            _ => 0,
        };
        let got = char_sum(t, diff_c.points(), y);
        report
            .difference_complement
            .record(got.as_integer() == Some(expected), || {
                format!(
                    "(Δ_B∖Δ_B′)^c with B = {b}, B′ = {bp}, y = {y}: sum {got}, expected {expected}"
                )
            });
    }
    Ok(report)
}

/// `Ω = (1/q) Σ_{u∈Fq} S_2(ua) (S_1(ub) + S_1(u(a+b)))` where `S_i(z)` is the
/// character sum over the `i`-th component set. Must be a rational integer.
pub fn omega(t: &FieldTower, l: &DefiningSet, a: ExtElem, b: ExtElem) -> Result<i128> {
    let (l1, l2) = (l.first().points(), l.second().points());
    let ab = t.add(a, b);
    let mut total = CycInt::zero(t.p());
    for u in t.base_elements() {
        let s2 = char_sum(t, l2, t.scale(u, a));
        let s1 = char_sum(t, l1, t.scale(u, b)).add(&char_sum(t, l1, t.scale(u, ab)));
        total = total.add(&s2.mul(&s1));
    }
    let sum = total.as_integer().ok_or(Error::NonRationalOmega)?;
    let q = t.q() as i128;
    if sum % q != 0 {
        return Err(Error::NonRationalOmega);
    }
    Ok(sum / q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OmegaCheck {
    pub omega: i128,
    pub lee_weight: usize,
    pub pass: bool,
}

/// `2|L| − Ω` against the Lee weight of the encoded codeword.
pub fn omega_check(t: &FieldTower, l: &DefiningSet, a: ExtElem, b: ExtElem) -> Result<OmegaCheck> {
    let omega = omega(t, l, a, b)?;
    let lee = lee_weight(t, &encode(t, l, a, b));
    Ok(OmegaCheck {
        omega,
        lee_weight: lee,
        pass: 2 * l.len() as i128 - omega == lee as i128,
    })
}

/// Largest field for which [`omega_check_all`] runs over every message.
pub const OMEGA_EXHAUSTIVE_LIMIT: u32 = 1 << 10;

/// [`omega_check`] over every message when `q^m ≤ 2^10`, else a seeded sample.
pub fn omega_check_all(t: &FieldTower, l: &DefiningSet, seed: u64) -> Result<SumCheck> {
    let exhaustive = t.ext_order() <= OMEGA_EXHAUSTIVE_LIMIT && t.message_count() <= 1 << 16;
    let msgs: Vec<(ExtElem, ExtElem)> = if exhaustive {
        t.elements()
            .flat_map(|a| t.elements().map(move |b| (a, b)))
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let order = t.ext_order();
        (0..64)
            .map(|_| {
                (
                    ExtElem(rng.gen_range(0..order)),
                    ExtElem(rng.gen_range(0..order)),
                )
            })
            .collect()
    };
    let mut r = SumCheck {
        exhaustive,
        ..Default::default()
    };
    for (a, b) in msgs {
        let c = omega_check(t, l, a, b)?;
        r.record(c.pass, || {
            format!(
                "a = {a}, b = {b}: 2|L| − Ω = {}, Lee weight {}",
                2 * l.len() as i128 - c.omega,
                c.lee_weight
            )
        });
    }
    Ok(r)
}
