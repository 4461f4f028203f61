//! Bohr sets and Bourgain systems.
//!
//! A system is a rule tree over a fixed group. Every element gets an *entry
//! radius*, the least ρ with the element in `B_ρ`, so `B_ρ` is a sublevel set
//! of one table and every composition stays exact.

use std::fmt;
use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::fourier::same_group;
use crate::group::{parse_group, Group};
use crate::sets::GSet;

/// Relative guard on radius comparisons.
pub const RADIUS_TOL: f64 = 1e-12;

fn within(r: f64, rho: f64) -> bool {
    r <= rho * (1.0 + RADIUS_TOL)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BohrDescriptor {
    frequencies: Vec<usize>,
    delta: f64,
}

impl BohrDescriptor {
    pub fn new(group: &Group, frequencies: &[usize], delta: f64) -> Result<BohrDescriptor> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::OutOfRange(format!(
                "Bohr radius {delta} not in (0, 1]"
            )));
        }
        if let Some(&bad) = frequencies.iter().find(|&&f| f >= group.cardinality()) {
            return Err(Error::OutOfRange(format!(
                "frequency {bad} outside the dual group"
            )));
        }
        let mut frequencies = frequencies.to_vec();
        frequencies.sort_unstable();
        frequencies.dedup();
        Ok(BohrDescriptor { frequencies, delta })
    }

    pub fn frequencies(&self) -> &[usize] {
        &self.frequencies
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

#[derive(Debug, Clone)]
pub enum Rule {
    Trivial,
    Bohr(BohrDescriptor),
    Dilate(f64, Arc<BourgainSystem>),
    Double(Arc<BourgainSystem>),
    Intersect(Vec<Arc<BourgainSystem>>),
}

#[derive(Debug, Clone)]
pub struct BourgainSystem {
    group: Group,
    rule: Rule,
    dimension: f64,
    radii: OnceLock<Arc<[f64]>>,
    levels: OnceLock<Arc<Levels>>,
}

/// Distinct finite entry radii with cumulative counts.
#[derive(Debug)]
struct Levels {
    values: Vec<f64>,
    counts: Vec<usize>,
}

impl Levels {
    fn build(radii: &[f64]) -> Levels {
        let mut sorted: Vec<f64> = radii.iter().copied().filter(|r| r.is_finite()).collect();
        sorted.sort_by(f64::total_cmp);
        let mut values: Vec<f64> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for (i, &r) in sorted.iter().enumerate() {
            match values.last() {
                Some(&v) if within(r, v) => *counts.last_mut().unwrap() = i + 1,
                _ => {
                    values.push(r);
                    counts.push(i + 1);
                }
            }
        }
        Levels { values, counts }
    }

    /// `#{x : r(x) ≤ ρ}`.
    fn count_le(&self, rho: f64) -> usize {
        let k = self.values.partition_point(|&v| within(v, rho));
        if k == 0 {
            0
        } else {
            self.counts[k - 1]
        }
    }

    /// `#{x : r(x) < b}` for a breakpoint `b = values[j]`.
    fn count_below(&self, j: usize) -> usize {
        if j == 0 {
            0
        } else {
            self.counts[j - 1]
        }
    }
}

impl BourgainSystem {
    fn from_rule(group: &Group, rule: Rule, dimension: f64) -> BourgainSystem {
        BourgainSystem {
            group: group.clone(),
            rule,
            dimension,
            radii: OnceLock::new(),
            levels: OnceLock::new(),
        }
    }

    pub fn trivial(group: &Group) -> BourgainSystem {
        BourgainSystem::from_rule(group, Rule::Trivial, 0.0)
    }

    /// The system `(B(Γ, ρδ))_ρ` induced by a Bohr set.
    pub fn bohr(group: &Group, frequencies: &[usize], delta: f64) -> Result<BourgainSystem> {
        let desc = BohrDescriptor::new(group, frequencies, delta)?;
        let d = 2.0 * desc.frequencies.len() as f64;
        Ok(BourgainSystem::from_rule(group, Rule::Bohr(desc), d))
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    /// The declared dimension carried through the composition rules.
    pub fn dimension(&self) -> f64 {
        self.dimension
    }

    /// The same sets under a different declared dimension. Composite
    /// systems may carry a tighter ledger than the composition rules give.
    pub fn with_dimension(&self, dimension: f64) -> Result<BourgainSystem> {
        if !(dimension >= 0.0 && dimension.is_finite()) {
            return Err(Error::OutOfRange(format!("dimension {dimension}")));
        }
        let mut out = self.clone();
        out.dimension = dimension;
        Ok(out)
    }

    /// Entry radius of every element, indexed by flat index.
    pub fn radii(&self) -> &[f64] {
        self.radii.get_or_init(|| self.compute_radii().into())
    }

    fn levels(&self) -> &Levels {
        self.levels
            .get_or_init(|| Arc::new(Levels::build(self.radii())))
    }

    fn compute_radii(&self) -> Vec<f64> {
        let g = &self.group;
        let n = g.cardinality();
        match &self.rule {
            Rule::Trivial => vec![0.0; n],
            Rule::Bohr(desc) => (0..n)
                .map(|x| {
                    desc.frequencies
                        .iter()
                        .map(|&gamma| g.char_valuation(gamma, x))
                        .fold(0.0, f64::max)
                        / desc.delta
                })
                .collect(),
            Rule::Dilate(lambda, inner) => inner.radii().iter().map(|r| r / lambda).collect(),
            Rule::Double(inner) => {
                let mut out = vec![f64::INFINITY; n];
                for (x, &r) in inner.radii().iter().enumerate() {
                    let y = g.double(x);
                    out[y] = out[y].min(r);
                }
                out
            }
            Rule::Intersect(parts) => {
                let mut out = vec![0.0; n];
                for part in parts {
                    for (o, &r) in out.iter_mut().zip(part.radii()) {
                        *o = f64::max(*o, r);
                    }
                }
                out
            }
        }
    }

    pub fn entry_radius(&self, x: usize) -> f64 {
        self.radii()[x]
    }

    /// `B_ρ`.
    pub fn materialize(&self, rho: f64) -> GSet {
        let mut out = GSet::empty(&self.group);
        for (x, &r) in self.radii().iter().enumerate() {
            if within(r, rho) {
                out.insert(x);
            }
        }
        out
    }

    pub fn contains(&self, rho: f64, x: usize) -> bool {
        within(self.radii()[x], rho)
    }

    /// `|B_ρ|`.
    pub fn size_at(&self, rho: f64) -> usize {
        self.levels().count_le(rho)
    }

    /// `μ_G(B_1)`.
    pub fn density(&self) -> f64 {
        self.size_at(1.0) as f64 / self.group.cardinality() as f64
    }

    /// `λℬ = (B_{λρ})_ρ`.
    pub fn dilate(&self, lambda: f64) -> Result<BourgainSystem> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::OutOfRange(format!(
                "dilation factor {lambda} not in (0, 1]"
            )));
        }
        Ok(BourgainSystem::from_rule(
            &self.group,
            Rule::Dilate(lambda, Arc::new(self.clone())),
            self.dimension,
        ))
    }

    /// `({2x : x ∈ B_ρ})_ρ`.
    pub fn double(&self) -> BourgainSystem {
        BourgainSystem::from_rule(
            &self.group,
            Rule::Double(Arc::new(self.clone())),
            self.dimension,
        )
    }

    /// True when `B_ρ ⊆ other_ρ` for every ρ.
    pub fn is_subsystem_of(&self, other: &BourgainSystem) -> Result<bool> {
        same_group(&self.group, &other.group)?;
        Ok(self
            .radii()
            .iter()
            .zip(other.radii())
            .all(|(&mine, &theirs)| within(theirs, mine)))
    }

    fn regularity_window(&self) -> f64 {
        if self.dimension > 0.0 {
            1.0 / (8.0 * self.dimension)
        } else {
            1.0
        }
    }

    /// Exact two-sided regularity test over `d|η| ≤ 1/8`.
    ///
    /// `η ↦ |B_{1+η}|` is a step function, so it is enough to look at every
    /// breakpoint in the window from both sides.
    pub fn is_regular(&self) -> bool {
        let lv = self.levels();
        let d = self.dimension;
        let w = self.regularity_window();
        let c1 = lv.count_le(1.0) as f64;
        for (j, &b) in lv.values.iter().enumerate() {
            if b > 1.0 && !within(b, 1.0) && b <= 1.0 + w {
                if c1 / (lv.counts[j] as f64) < 1.0 - 8.0 * d * (b - 1.0) {
                    return false;
                }
            } else if within(b, 1.0) && b > 0.0 && b > 1.0 - w {
                let below = lv.count_below(j) as f64;
                // a breakpoint at b = 1 itself is approached with |η| → 0
                let eta = (1.0 - b).max(0.0);
                if c1 / below > 1.0 + 8.0 * d * eta {
                    return false;
                }
            }
        }
        true
    }

    /// Some `λ ∈ [1/2, 1)` with `λℬ` regular.
    ///
    /// For λ strictly between consecutive entry radii `v_k < λ < v_{k+1}` the
    /// set `(λℬ)_1` is fixed and each other breakpoint excludes an interval
    /// of λ. The first gap (highest λ first) with a surviving interval wins.
    pub fn regular_dilate(&self) -> Result<(f64, BourgainSystem)> {
        let lv = self.levels();
        let d = self.dimension;
        let w = self.regularity_window();
        let vals = &lv.values;
        let m = vals.len();
        for k in (0..m).rev() {
            let gap_lo = vals[k];
            let gap_hi = if k + 1 < m {
                vals[k + 1]
            } else {
                f64::INFINITY
            };
            let mut lo = gap_lo.max(0.5);
            let mut hi = gap_hi.min(1.0);
            if lo >= hi {
                continue;
            }
            let ck = lv.counts[k] as f64;
            for j in k + 1..m {
                let v = vals[j];
                let t = if d > 0.0 {
                    (1.0 - ck / lv.counts[j] as f64) / (8.0 * d)
                } else {
                    f64::INFINITY
                };
                let cap = if t <= w { v / (1.0 + t) } else { v / (1.0 + w) };
                hi = hi.min(cap);
            }
            for j in 1..=k {
                let v = vals[j];
                if v <= 0.0 {
                    continue;
                }
                let s = if d > 0.0 {
                    (ck / lv.count_below(j) as f64 - 1.0) / (8.0 * d)
                } else {
                    f64::INFINITY
                };
                let reach = s.min(w);
                if reach >= 1.0 {
                    hi = f64::NEG_INFINITY;
                    break;
                }
                lo = lo.max(v / (1.0 - reach));
            }
            if lo >= hi {
                continue;
            }
            let lambda = 0.5 * (lo + hi);
            let candidate = self.dilate(lambda)?;
            if (0.5..1.0).contains(&lambda) && candidate.is_regular() {
                return Ok((lambda, candidate));
            }
        }
        Err(Error::RegularityNotFound)
    }

    /// A regular dilate `λℬ` with `λ ∈ [top/2, top)`.
    pub fn regular_dilate_below(&self, top: f64) -> Result<(f64, BourgainSystem)> {
        let (lambda, sys) = self.dilate(top)?.regular_dilate()?;
        Ok((top * lambda, sys))
    }

    /// Textual descriptor accepted by [`parse_system`].
    pub fn descriptor(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for BourgainSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            Rule::Trivial => write!(f, "trivial(g={})", self.group),
            Rule::Bohr(desc) => {
                let freqs: Vec<String> = desc.frequencies.iter().map(|x| x.to_string()).collect();
                write!(
                    f,
                    "bohr(g={}; freqs={}; delta={})",
                    self.group,
                    freqs.join(","),
                    desc.delta
                )
            }
            Rule::Dilate(l, inner) => write!(f, "dilate({l}, {inner})"),
            Rule::Double(inner) => write!(f, "double({inner})"),
            Rule::Intersect(parts) => {
                let items: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "intersect({})", items.join("; "))
            }
        }
    }
}

/// `⋂ᵢ ℬ⁽ⁱ⁾` with declared dimension `2Σdᵢ`.
pub fn intersect(systems: &[BourgainSystem]) -> Result<BourgainSystem> {
    let first = systems.first().ok_or(Error::EmptySet)?;
    for s in &systems[1..] {
        same_group(&first.group, &s.group)?;
    }
    let d = 2.0 * systems.iter().map(|s| s.dimension).sum::<f64>();
    let parts = systems.iter().map(|s| Arc::new(s.clone())).collect();
    Ok(BourgainSystem::from_rule(
        &first.group,
        Rule::Intersect(parts),
        d,
    ))
}

/// `4^{−(d₁+⋯+d_{k−1})} 2^{−d_k} Πᵢ μ_G(ℬ⁽ⁱ⁾)` for the parts in the given order.
pub fn intersection_density_bound(systems: &[BourgainSystem]) -> f64 {
    let Some((last, rest)) = systems.split_last() else {
        return 1.0;
    };
    let log2 = -2.0 * rest.iter().map(|s| s.dimension).sum::<f64>() - last.dimension;
    let prod: f64 = systems.iter().map(|s| s.density()).product();
    log2.exp2() * prod
}

/// `(λ/2)^d μ_G(ℬ)`.
pub fn dilate_density_bound(system: &BourgainSystem, lambda: f64) -> f64 {
    (lambda / 2.0).powf(system.dimension) * system.density()
}

/// Greedy cover of `big` by translates `x + small`, with `x` drawn from `big`
/// in flat-index order.
pub fn greedy_cover(big: &GSet, small: &GSet) -> Result<Vec<usize>> {
    same_group(big.group(), small.group())?;
    let g = big.group();
    let shape: Vec<usize> = small.iter().collect();
    let mut covered = FixedBitSet::with_capacity(g.cardinality());
    let mut centres = Vec::new();
    for x in big.iter() {
        if covered.contains(x) {
            continue;
        }
        centres.push(x);
        for &s in &shape {
            covered.insert(g.add(x, s));
        }
    }
    Ok(centres)
}

#[derive(Debug, Clone, Default)]
pub struct AxiomCertificate {
    pub nesting_ok: bool,
    pub zero_ok: bool,
    pub symmetry_ok: bool,
    pub addition_ok: bool,
    pub doubling_ok: bool,
    /// Tested ρ and the greedy cover of `B_{2ρ}` by translates of `B_ρ`.
    pub doubling_witness: Vec<(f64, Vec<usize>)>,
    pub violations: Vec<String>,
}

impl AxiomCertificate {
    pub fn all_ok(&self) -> bool {
        self.nesting_ok && self.zero_ok && self.symmetry_ok && self.addition_ok && self.doubling_ok
    }
}

/// Checks the five axioms on an explicit family `ρ ↦ B_ρ` at the listed
/// radii. `lookup` must return `B_ρ` for every `ρ` in the grid and for `2ρ`
/// and `ρ + ρ'` where those are needed.
pub fn check_axioms(
    group: &Group,
    dimension: f64,
    grid: &[f64],
    lookup: impl Fn(f64) -> GSet,
) -> AxiomCertificate {
    let mut cert = AxiomCertificate {
        nesting_ok: true,
        zero_ok: true,
        symmetry_ok: true,
        addition_ok: true,
        doubling_ok: true,
        ..Default::default()
    };
    let sets: Vec<(f64, GSet)> = grid.iter().map(|&r| (r, lookup(r))).collect();
    for (r, s) in &sets {
        if !s.contains(0) {
            cert.zero_ok = false;
            cert.violations.push(format!("zero: 0 ∉ B_{r}"));
        }
        if let Some(x) = s.iter().find(|&x| !s.contains(group.neg(x))) {
            cert.symmetry_ok = false;
            cert.violations
                .push(format!("symmetry: {x} ∈ B_{r} but its negative is not"));
        }
    }
    for (r1, s1) in &sets {
        for (r2, s2) in &sets {
            if r1 <= r2 && !s1.is_subset(s2) {
                cert.nesting_ok = false;
                cert.violations.push(format!("nesting: B_{r1} ⊄ B_{r2}"));
            }
            if r1 + r2 <= 1.0 && r1 <= r2 {
                let target = lookup(r1 + r2);
                'pairs: for x in s1.iter() {
                    for y in s2.iter() {
                        let z = group.add(x, y);
                        if !target.contains(z) {
                            cert.addition_ok = false;
                            cert.violations
                                .push(format!("addition: {x} + {y} ∉ B_{}", r1 + r2));
                            break 'pairs;
                        }
                    }
                }
            }
        }
    }
    let cap = dimension.exp2();
    for (r, s) in &sets {
        if *r > 1.0 {
            continue;
        }
        let big = lookup(2.0 * r);
        let cover = greedy_cover(&big, s).expect("same group");
        if cover.len() as f64 > cap {
            cert.doubling_ok = false;
            cert.violations.push(format!(
                "doubling: {} translates of B_{r} needed, 2^d = {cap}",
                cover.len()
            ));
        }
        cert.doubling_witness.push((*r, cover));
    }
    cert
}

pub fn verify_axioms(system: &BourgainSystem, grid: &[f64]) -> Result<AxiomCertificate> {
    if let Some(&bad) = grid.iter().find(|&&r| !(r > 0.0 && r <= 2.0)) {
        return Err(Error::OutOfRange(format!("radius {bad} not in (0, 2]")));
    }
    Ok(check_axioms(&system.group, system.dimension, grid, |r| {
        system.materialize(r)
    }))
}

/// Radii `{1/8, 1/4, 3/8, 1/2, 3/4, 1}`.
pub fn default_grid() -> Vec<f64> {
    vec![0.125, 0.25, 0.375, 0.5, 0.75, 1.0]
}

/// Parses `"0.2"`, `"1/5"` or `"3"` exactly.
pub fn parse_rational(text: &str) -> Result<Ratio<i64>> {
    let t = text.trim();
    let bad = || Error::Parse(format!("bad number `{t}`"));
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    if (int.is_empty() && frac.is_empty()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let neg = int.starts_with('-');
    let int_digits = int.trim_start_matches(['-', '+']);
    if !int_digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_digits}{frac}");
    let num: i64 = if digits.is_empty() {
        0
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let den = 10i64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
    Ok(Ratio::new(if neg { -num } else { num }, den))
}

fn ratio_to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Splits at top-level occurrences of `sep`.
fn split_top(text: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&text[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out
}

fn call(text: &str) -> Result<(&str, &str)> {
    let t = text.trim();
    let open = t
        .find('(')
        .ok_or_else(|| Error::Parse(format!("expected `name(...)`, got `{t}`")))?;
    if !t.ends_with(')') {
        return Err(Error::Parse(format!("unbalanced parentheses in `{t}`")));
    }
    Ok((t[..open].trim(), &t[open + 1..t.len() - 1]))
}

fn keyed(args: &str) -> Result<Vec<(&str, &str)>> {
    split_top(args, ';')
        .into_iter()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{}`", kv.trim())))
        })
        .collect()
}

/// Parses descriptors such as `bohr(g=Z16; freqs=1,5; delta=0.2)`,
/// `dilate(1/2, trivial(g=Z8))`, `double(...)` and `intersect(...; ...)`.
pub fn parse_system(text: &str) -> Result<BourgainSystem> {
    let (name, args) = call(text)?;
    match name.to_ascii_lowercase().as_str() {
        "trivial" => {
            let kv = keyed(args)?;
            match kv.as_slice() {
                [("g", g)] => Ok(BourgainSystem::trivial(&parse_group(g)?)),
                _ => Err(Error::Parse("trivial takes exactly g=...".into())),
            }
        }
        "bohr" => {
            let (mut g, mut freqs, mut delta) = (None, None, None);
            for (k, v) in keyed(args)? {
                match k {
                    "g" => g = Some(parse_group(v)?),
                    "freqs" => {
                        let list: Result<Vec<usize>> = v
                            .split(',')
                            .filter(|s| !s.trim().is_empty())
                            .map(|s| {
                                s.trim()
                                    .parse()
                                    .map_err(|_| Error::Parse(format!("bad frequency `{s}`")))
                            })
                            .collect();
                        freqs = Some(list?);
                    }
                    "delta" => delta = Some(ratio_to_f64(parse_rational(v)?)),
                    other => return Err(Error::Parse(format!("unknown bohr key `{other}`"))),
                }
            }
            let g = g.ok_or_else(|| Error::Parse("bohr needs g=...".into()))?;
            let freqs = freqs.ok_or_else(|| Error::Parse("bohr needs freqs=...".into()))?;
            let delta = delta.ok_or_else(|| Error::Parse("bohr needs delta=...".into()))?;
            BourgainSystem::bohr(&g, &freqs, delta)
        }
        "dilate" => {
            let (l, inner) = args
                .split_once(',')
                .ok_or_else(|| Error::Parse("dilate takes (λ, system)".into()))?;
            parse_system(inner)?.dilate(ratio_to_f64(parse_rational(l)?))
        }
        "double" => Ok(parse_system(args)?.double()),
        "intersect" => {
            let parts: Result<Vec<_>> =
                split_top(args, ';').into_iter().map(parse_system).collect();
            intersect(&parts?)
        }
        other => Err(Error::Parse(format!("unknown system `{other}`"))),
    }
}
