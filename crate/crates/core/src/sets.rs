//! Subsets of a group and of the integers: sumsets, restricted sumsets,
//! the trilinear progression form, progression counts and generators of
//! progression-free sets.

use std::fmt;

use fixedbitset::FixedBitSet;
use num_complex::Complex64;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::fourier::{fourier_transform, same_group, GFunction};
use crate::group::{make_group, Group};

/// Tolerance for `|G|²·Λ(1_A, 1_A, 1_A)` to be an integer.
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GSet {
    group: Group,
    bits: FixedBitSet,
    len: usize,
}

impl GSet {
    pub fn empty(group: &Group) -> GSet {
        GSet {
            group: group.clone(),
            bits: FixedBitSet::with_capacity(group.cardinality()),
            len: 0,
        }
    }

    pub fn full(group: &Group) -> GSet {
        GSet::from_predicate(group, |_| true)
    }

    pub fn from_predicate(group: &Group, mut pred: impl FnMut(usize) -> bool) -> GSet {
        let mut s = GSet::empty(group);
        for x in 0..group.cardinality() {
            if pred(x) {
                s.insert(x);
            }
        }
        s
    }

    pub fn from_indices(group: &Group, indices: &[usize]) -> Result<GSet> {
        let mut s = GSet::empty(group);
        for &x in indices {
            if x >= group.cardinality() {
                return Err(Error::OutOfRange(format!(
                    "index {x} outside a group of order {}",
                    group.cardinality()
                )));
            }
            s.insert(x);
        }
        Ok(s)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn insert(&mut self, x: usize) -> bool {
        let fresh = !self.bits.put(x);
        if fresh {
            self.len += 1;
        }
        fresh
    }

    pub fn contains(&self, x: usize) -> bool {
        self.bits.contains(x)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `|A| / |G|`.
    pub fn density(&self) -> f64 {
        self.len as f64 / self.group.cardinality() as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    fn rebuild(group: &Group, bits: FixedBitSet) -> GSet {
        let len = bits.count_ones(..);
        GSet {
            group: group.clone(),
            bits,
            len,
        }
    }

    pub fn union(&self, other: &GSet) -> Result<GSet> {
        same_group(&self.group, &other.group)?;
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        Ok(GSet::rebuild(&self.group, bits))
    }

    pub fn intersection(&self, other: &GSet) -> Result<GSet> {
        same_group(&self.group, &other.group)?;
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        Ok(GSet::rebuild(&self.group, bits))
    }

    pub fn difference(&self, other: &GSet) -> Result<GSet> {
        same_group(&self.group, &other.group)?;
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        Ok(GSet::rebuild(&self.group, bits))
    }

    pub fn is_subset(&self, other: &GSet) -> bool {
        self.group == other.group && self.bits.is_subset(&other.bits)
    }

    /// `{2x : x ∈ self}`.
    pub fn doubled(&self) -> GSet {
        self.image(|x| self.group.double(x))
    }

    /// `{−x : x ∈ self}`.
    pub fn negated(&self) -> GSet {
        self.image(|x| self.group.neg(x))
    }

    /// `t + self`.
    pub fn translate(&self, t: usize) -> GSet {
        self.image(|x| self.group.add(x, t))
    }

    pub fn image(&self, f: impl Fn(usize) -> usize) -> GSet {
        let mut out = GSet::empty(&self.group);
        for x in self.iter() {
            out.insert(f(x));
        }
        out
    }

    /// `{a − b : a, b ∈ self}`.
    pub fn difference_set(&self) -> GSet {
        let mut out = GSet::empty(&self.group);
        for a in self.iter() {
            for b in self.iter() {
                out.insert(self.group.sub(a, b));
            }
        }
        out
    }

    /// True when some difference `a − a'` of elements has order 2, which is
    /// the same as the doubling map failing to be injective on the set.
    pub fn has_order2_difference(&self) -> bool {
        let mut seen = FixedBitSet::with_capacity(self.group.cardinality());
        self.iter().any(|x| seen.put(self.group.double(x)))
    }

    /// Comma-separated flat indices.
    pub fn to_text(&self) -> String {
        join(self.iter())
    }

    pub fn parse(group: &Group, text: &str) -> Result<GSet> {
        let idx = parse_list::<usize>(text)?;
        GSet::from_indices(group, &idx)
    }
}

impl fmt::Debug for GSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GSet({}; {{{}}})", self.group, self.to_text())
    }
}

fn join<T: fmt::Display>(it: impl Iterator<Item = T>) -> String {
    it.map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| Error::Parse(format!("bad integer `{}`", t.trim())))
        })
        .collect()
}

/// A finite set of integers, kept sorted and free of duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ZSet {
    elements: Vec<i64>,
}

impl ZSet {
    pub fn new(mut elements: Vec<i64>) -> ZSet {
        elements.sort_unstable();
        elements.dedup();
        ZSet { elements }
    }

    pub fn elements(&self) -> &[i64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: i64) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn diameter(&self) -> i64 {
        match (self.elements.first(), self.elements.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0,
        }
    }

    pub fn sumset(&self, other: &ZSet) -> ZSet {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for &a in &self.elements {
            for &b in &other.elements {
                out.push(a + b);
            }
        }
        ZSet::new(out)
    }

    /// Number of triples `(a, b, c) ∈ A³` with `a + c = 2b` and `a ≠ c`.
    pub fn count_ap3_nontrivial(&self) -> u64 {
        let mut n = 0;
        for &a in &self.elements {
            for &c in &self.elements {
                if a != c && (a + c) % 2 == 0 && self.contains((a + c) / 2) {
                    n += 1;
                }
            }
        }
        n
    }

    pub fn is_ap3_free(&self) -> bool {
        let els = &self.elements;
        for (i, &a) in els.iter().enumerate() {
            for &c in &els[i + 1..] {
                if (a + c) % 2 == 0 && self.contains((a + c) / 2) {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_text(&self) -> String {
        join(self.elements.iter())
    }

    pub fn parse(text: &str) -> Result<ZSet> {
        Ok(ZSet::new(parse_list::<i64>(text)?))
    }
}

pub fn sumset(a: &GSet, b: &GSet) -> Result<GSet> {
    same_group(&a.group, &b.group)?;
    let g = &a.group;
    let mut out = GSet::empty(g);
    for x in a.iter() {
        for y in b.iter() {
            out.insert(g.add(x, y));
        }
    }
    Ok(out)
}

/// `A ĥat+ B = {a + b : a ∈ A, b ∈ B, a ≠ b}`.
pub fn restricted_sumset(a: &GSet, b: &GSet) -> Result<GSet> {
    same_group(&a.group, &b.group)?;
    let g = &a.group;
    let mut out = GSet::empty(g);
    for x in a.iter() {
        for y in b.iter() {
            if x != y {
                out.insert(g.add(x, y));
            }
        }
    }
    Ok(out)
}

pub fn doubling_constant(a: &GSet) -> Result<Ratio<u64>> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let s = sumset(a, a)?;
    Ok(Ratio::new(s.len() as u64, a.len() as u64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaMethod {
    Direct,
    Fourier,
}

/// `Λ(f, g, h) = E_{x,y} f(x − y) g(x) h(x + y)`.
pub fn lambda3(
    f: &GFunction,
    g: &GFunction,
    h: &GFunction,
    method: LambdaMethod,
) -> Result<Complex64> {
    same_group(f.group(), g.group())?;
    same_group(f.group(), h.group())?;
    let grp = f.group();
    let n = grp.cardinality();
    match method {
        LambdaMethod::Direct => {
            let mut acc = Complex64::new(0.0, 0.0);
            for x in 0..n {
                let gx = g[x];
                if gx == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let mut row = Complex64::new(0.0, 0.0);
                for y in 0..n {
                    row += f[grp.sub(x, y)] * h[grp.add(x, y)];
                }
                acc += gx * row;
            }
            Ok(acc / (n as f64 * n as f64))
        }
        LambdaMethod::Fourier => {
            let (ft, gt, ht) = (
                fourier_transform(f),
                fourier_transform(g),
                fourier_transform(h),
            );
            Ok((0..n)
                .map(|gamma| ft[gamma] * gt[grp.scale(gamma, -2)] * ht[gamma])
                .sum())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ap3Count {
    /// `#{(x, y) : x − y, x, x + y ∈ A}`.
    pub total: u64,
    /// `total − |A|`: pairs with `y ≠ 0`.
    pub nontrivial: u64,
}

pub fn count_ap3(a: &GSet) -> Result<Ap3Count> {
    let g = a.group();
    if a.is_empty() {
        return Ok(Ap3Count {
            total: 0,
            nontrivial: 0,
        });
    }
    let ind = GFunction::indicator(a);
    let lam = lambda3(&ind, &ind, &ind, LambdaMethod::Fourier)?;
    let n = g.cardinality() as f64;
    let scaled = lam.re * n * n;
    let total = scaled.round();
    if (scaled - total).abs() > INTEGRALITY_TOL || lam.im.abs() * n * n > INTEGRALITY_TOL {
        return Err(Error::Numerical(format!(
            "|G|²Λ = {scaled} + {}i is not an integer",
            lam.im * n * n
        )));
    }
    let total = total as u64;
    Ok(Ap3Count {
        total,
        nontrivial: total - a.len() as u64,
    })
}

pub fn is_ap3_free(a: &GSet) -> Result<bool> {
    Ok(count_ap3(a)?.nontrivial == 0)
}

/// `S = {a ∈ A ∩ B : no a' ∈ A, b' ∈ B with a' ≠ b' and a' + b' = 2a}`,
/// together with whether `(A + B) \ (A ĥat+ B) = 2S`.
pub fn restricted_core(a: &GSet, b: &GSet) -> Result<(GSet, bool)> {
    let restricted = restricted_sumset(a, b)?;
    let g = a.group();
    let common = a.intersection(b)?;
    let mut s = GSet::empty(g);
    for x in common.iter() {
        if !restricted.contains(g.double(x)) {
            s.insert(x);
        }
    }
    let lhs = sumset(a, b)?.difference(&restricted)?;
    let holds = lhs == s.doubled();
    Ok((s, holds))
}

/// One representative per fiber of the doubling map on `s`, smallest flat
/// index first.
pub fn select_core_representatives(s: &GSet) -> GSet {
    let g = s.group();
    let mut seen = FixedBitSet::with_capacity(g.cardinality());
    let mut out = GSet::empty(g);
    for x in s.iter() {
        if !seen.put(g.double(x)) {
            out.insert(x);
        }
    }
    out
}

/// Greedy progression-free subset of `[0, n)`.
pub fn gen_greedy_apfree(n: u64) -> Result<ZSet> {
    if n == 0 {
        return Err(Error::OutOfRange("greedy generator needs N ≥ 1".into()));
    }
    let n = n as usize;
    let mut member = vec![false; n];
    let mut chosen: Vec<usize> = Vec::new();
    for c in 0..n {
        let blocked = chosen.iter().any(|&b| 2 * b >= c && member[2 * b - c]);
        if !blocked {
            member[c] = true;
            chosen.push(c);
        }
    }
    Ok(ZSet::new(chosen.into_iter().map(|c| c as i64).collect()))
}

const BEHREND_VECTOR_BUDGET: u64 = 1 << 20;

/// Largest sphere class of `n`-digit base-`(2d−1)` numbers with digits
/// below `d` and value below `limit`.
fn behrend_class(limit: u64, digits: u32, d: u64) -> Vec<u64> {
    let base = 2 * d - 1;
    let mut classes: std::collections::HashMap<u64, Vec<u64>> = std::collections::HashMap::new();
    let mut digit = vec![0u64; digits as usize];
    loop {
        let mut value = 0u64;
        let mut norm = 0u64;
        let mut place = 1u64;
        for &a in &digit {
            value += a * place;
            norm += a * a;
            place = place.saturating_mul(base);
        }
        if value < limit {
            classes.entry(norm).or_default().push(value);
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == digit.len() {
                let mut best: Vec<u64> = Vec::new();
                let mut keys: Vec<_> = classes.keys().copied().collect();
                keys.sort_unstable();
                for k in keys {
                    let c = &classes[&k];
                    if c.len() > best.len() {
                        best = c.clone();
                    }
                }
                return best;
            }
            digit[i] += 1;
            if digit[i] < d {
                break;
            }
            digit[i] = 0;
            i += 1;
        }
    }
}

/// Behrend's sphere construction inside `[0, n)`.
pub fn gen_behrend(n: u64) -> Result<ZSet> {
    if n < 2 {
        return Err(Error::OutOfRange("Behrend generator needs N ≥ 2".into()));
    }
    let mut best: Vec<u64> = vec![0, 1];
    for digits in 2u32..=12 {
        // (2d − 1)^digits ≈ 2N puts the largest values near N.
        let target = ((2.0 * n as f64).powf(1.0 / digits as f64) + 1.0) / 2.0;
        let hi = target.ceil() as u64 + 1;
        for d in hi.saturating_sub(3).max(2)..=hi.max(2) {
            if d.checked_pow(digits)
                .is_none_or(|v| v > BEHREND_VECTOR_BUDGET)
            {
                continue;
            }
            let class = behrend_class(n, digits, d);
            if class.len() > best.len() {
                best = class;
            }
        }
    }
    Ok(ZSet::new(best.into_iter().map(|v| v as i64).collect()))
}

/// An interval set translated to start at 0 inside `Z/M`, `M = 2·diam + 1`.
#[derive(Debug, Clone)]
pub struct IntervalEmbedding {
    pub group: Group,
    pub set: GSet,
    /// The integer mapped to 0.
    pub offset: i64,
}

impl IntervalEmbedding {
    pub fn map(&self, x: i64) -> usize {
        (x - self.offset).rem_euclid(self.group.cardinality() as i64) as usize
    }
}

pub fn embed_interval(a: &ZSet) -> Result<IntervalEmbedding> {
    let offset = a.elements().first().copied().unwrap_or(0);
    let m = (2 * a.diameter() + 1).max(2) as u64;
    let group = make_group(&[m])?;
    let idx: Vec<usize> = a
        .elements()
        .iter()
        .map(|&x| (x - offset) as usize)
        .collect();
    let set = GSet::from_indices(&group, &idx)?;
    Ok(IntervalEmbedding { group, set, offset })
}

/// Brute-force `(total, nontrivial)` progression count over all pairs.
pub fn count_ap3_brute(a: &GSet) -> Ap3Count {
    let g = a.group();
    let mut total = 0;
    for x in a.iter() {
        for y in 0..g.cardinality() {
            if a.contains(g.sub(x, y)) && a.contains(g.add(x, y)) {
                total += 1;
            }
        }
    }
    Ap3Count {
        total,
        nontrivial: total - a.len() as u64,
    }
}
