//! Freiman homomorphisms of order 2 between finite sets.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::group::Group;

/// Largest domain accepted by the homomorphism checks.
pub const MAP_BUDGET: usize = 64;

/// An abelian group in which the elements of a finite set live.
pub trait AdditiveSpace {
    type Elem: Copy + Eq + Hash + Ord + std::fmt::Debug;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn zero(&self) -> Self::Elem;

    fn double(&self, a: Self::Elem) -> Self::Elem {
        self.add(a, a)
    }

    /// `x ≠ 0` and `2x = 0`.
    fn is_order2(&self, x: Self::Elem) -> bool {
        x != self.zero() && self.double(x) == self.zero()
    }
}

/// The integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Integers;

impl AdditiveSpace for Integers {
    type Elem = i64;
    fn add(&self, a: i64, b: i64) -> i64 {
        a + b
    }
    fn sub(&self, a: i64, b: i64) -> i64 {
        a - b
    }
    fn zero(&self) -> i64 {
        0
    }
}

impl AdditiveSpace for Group {
    type Elem = usize;
    fn add(&self, a: usize, b: usize) -> usize {
        Group::add(self, a, b)
    }
    fn sub(&self, a: usize, b: usize) -> usize {
        Group::sub(self, a, b)
    }
    fn zero(&self) -> usize {
        0
    }
}

/// A map from a finite subset of one space into another.
#[derive(Debug, Clone)]
pub struct PointMap<S: AdditiveSpace, T: AdditiveSpace> {
    source: S,
    target: T,
    pairs: Vec<(S::Elem, T::Elem)>,
}

impl<S: AdditiveSpace + Clone, T: AdditiveSpace + Clone> PointMap<S, T> {
    pub fn new(source: S, target: T, mut pairs: Vec<(S::Elem, T::Elem)>) -> Result<Self> {
        pairs.sort_by_key(|p| p.0);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Precondition(
                "a source element is mapped twice".into(),
            ));
        }
        Ok(PointMap {
            source,
            target,
            pairs,
        })
    }

    pub fn from_fn(
        source: S,
        target: T,
        domain: &[S::Elem],
        f: impl Fn(S::Elem) -> T::Elem,
    ) -> Result<Self> {
        PointMap::new(source, target, domain.iter().map(|&a| (a, f(a))).collect())
    }

    pub fn pairs(&self) -> &[(S::Elem, T::Elem)] {
        &self.pairs
    }

    pub fn domain(&self) -> Vec<S::Elem> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn image(&self) -> Vec<T::Elem> {
        let mut out: Vec<T::Elem> = self.pairs.iter().map(|p| p.1).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn apply(&self, a: S::Elem) -> Option<T::Elem> {
        self.pairs
            .binary_search_by_key(&a, |p| p.0)
            .ok()
            .map(|i| self.pairs[i].1)
    }

    pub fn is_injective(&self) -> bool {
        self.image().len() == self.pairs.len()
    }

    fn check_budget(&self) -> Result<()> {
        if self.pairs.len() > MAP_BUDGET {
            return Err(Error::BudgetExceeded(format!(
                "domain of size {} (limit {MAP_BUDGET})",
                self.pairs.len()
            )));
        }
        Ok(())
    }

    /// `a₁+a₂ = a₃+a₄ ⇒ φ(a₁)+φ(a₂) = φ(a₃)+φ(a₄)`, checked by grouping the
    /// pairs of the domain by their sum.
    pub fn is_freiman_hom(&self) -> Result<bool> {
        self.check_budget()?;
        let mut seen: HashMap<S::Elem, T::Elem> = HashMap::new();
        for &(a1, b1) in &self.pairs {
            for &(a2, b2) in &self.pairs {
                let image = self.target.add(b1, b2);
                match seen.entry(self.source.add(a1, a2)) {
                    std::collections::hash_map::Entry::Occupied(e) => {
                        if *e.get() != image {
                            return Ok(false);
                        }
                    }
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(image);
                    }
                }
            }
        }
        Ok(true)
    }

    /// The same property, tested on every quadruple.
    pub fn is_freiman_hom_exhaustive(&self) -> Result<bool> {
        self.check_budget()?;
        let (s, t, p) = (&self.source, &self.target, &self.pairs);
        for &(a1, b1) in p {
            for &(a2, b2) in p {
                for &(a3, b3) in p {
                    for &(a4, b4) in p {
                        if s.add(a1, a2) == s.add(a3, a4) && t.add(b1, b2) != t.add(b3, b4) {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    pub fn inverse(&self) -> Option<PointMap<T, S>> {
        if !self.is_injective() {
            return None;
        }
        let pairs = self.pairs.iter().map(|&(a, b)| (b, a)).collect();
        PointMap::new(self.target.clone(), self.source.clone(), pairs).ok()
    }

    /// Injective, with both the map and its inverse homomorphisms.
    pub fn is_freiman_iso(&self) -> Result<bool> {
        self.check_budget()?;
        match self.inverse() {
            None => Ok(false),
            Some(inv) => Ok(self.is_freiman_hom()? && inv.is_freiman_hom()?),
        }
    }

    /// `ψ ∘ φ`, defined where `φ` lands in the domain of `ψ`.
    pub fn then<U: AdditiveSpace + Clone>(&self, psi: &PointMap<T, U>) -> Result<PointMap<S, U>> {
        let pairs: Option<Vec<_>> = self
            .pairs
            .iter()
            .map(|&(a, b)| psi.apply(b).map(|c| (a, c)))
            .collect();
        let pairs = pairs.ok_or_else(|| Error::Precondition("maps do not compose".into()))?;
        PointMap::new(self.source.clone(), psi.target.clone(), pairs)
    }

    pub fn ap3_transfer_check(&self) -> Result<TransferReport> {
        if !self.is_freiman_iso()? {
            return Err(Error::Precondition(
                "map is not a Freiman isomorphism".into(),
            ));
        }
        let domain = self.domain();
        let image: Vec<T::Elem> = self.pairs.iter().map(|p| p.1).collect();
        let mut preserved = true;
        let index: HashMap<S::Elem, T::Elem> = self.pairs.iter().copied().collect();
        for &a in &domain {
            for &c in &domain {
                let sum = self.source.add(a, c);
                for &b in &domain {
                    if self.source.double(b) == sum {
                        let lhs = self.target.add(index[&a], index[&c]);
                        preserved &= lhs == self.target.double(index[&b]);
                    }
                }
            }
        }
        Ok(TransferReport {
            domain_count: nontrivial_progressions(&self.source, &domain),
            image_count: nontrivial_progressions(&self.target, &image),
            progressions_preserved: preserved,
            domain_has_order2_difference: has_order2_difference(&self.source, &domain),
            image_has_order2_difference: has_order2_difference(&self.target, &image),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransferReport {
    pub domain_count: u64,
    pub image_count: u64,
    /// Every `a + c = 2b` in the domain maps to `φ(a) + φ(c) = 2φ(b)`.
    pub progressions_preserved: bool,
    pub domain_has_order2_difference: bool,
    pub image_has_order2_difference: bool,
}

impl TransferReport {
    pub fn holds(&self) -> bool {
        self.domain_count == self.image_count
            && self.progressions_preserved
            && self.domain_has_order2_difference == self.image_has_order2_difference
    }
}

/// `#{(a, b, c) ∈ A³ : a + c = 2b} − |A|`.
pub fn nontrivial_progressions<S: AdditiveSpace>(space: &S, set: &[S::Elem]) -> u64 {
    let mut sums: HashMap<S::Elem, u64> = HashMap::new();
    for &a in set {
        for &c in set {
            *sums.entry(space.add(a, c)).or_default() += 1;
        }
    }
    let total: u64 = set
        .iter()
        .map(|&b| sums.get(&space.double(b)).copied().unwrap_or(0))
        .sum();
    total - set.len() as u64
}

pub fn has_order2_difference<S: AdditiveSpace>(space: &S, set: &[S::Elem]) -> bool {
    set.iter()
        .any(|&a| set.iter().any(|&b| space.is_order2(space.sub(a, b))))
}

/// The reduction `x ↦ x − offset mod M` from an interval embedding.
pub fn embedding_map(
    emb: &crate::sets::IntervalEmbedding,
    set: &crate::sets::ZSet,
) -> Result<PointMap<Integers, Group>> {
    PointMap::from_fn(Integers, emb.group.clone(), set.elements(), |x| emb.map(x))
}
