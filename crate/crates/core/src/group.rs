//! Finite abelian groups as products of cyclic factors.
//!
//! Elements and characters share one mixed-radix encoding: residue vector
//! `(r_0, .., r_{k-1})` maps to the flat index `Σ r_i · stride_i` with the
//! last factor varying fastest. Every dense table in the crate is indexed
//! this way, and the dual group is identified with the group itself through
//! the pairing `γ(x) = exp(2πi Σ γ_i x_i / n_i)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::sets::GSet;

/// Default cap on `|G|`.
pub const DEFAULT_MAX_GROUP: usize = 1 << 20;

/// Environment variable overriding [`DEFAULT_MAX_GROUP`].
pub const MAX_GROUP_ENV: &str = "BLAB_MAX_GROUP";

/// Unit-circle tolerance accepted by [`valuation`].
pub const UNIT_TOL: f64 = 1e-9;

/// The size budget currently in force.
pub fn size_budget() -> usize {
    std::env::var(MAX_GROUP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(DEFAULT_MAX_GROUP)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Group {
    moduli: Vec<usize>,
    strides: Vec<usize>,
    cardinality: usize,
    exponent: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Element(pub Vec<usize>);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Character(pub Vec<usize>);

pub fn make_group(moduli: &[u64]) -> Result<Group> {
    Group::with_budget(moduli, size_budget())
}

impl Group {
    pub fn new(moduli: &[u64]) -> Result<Group> {
        make_group(moduli)
    }

    /// A single cyclic group `Z/n`.
    pub fn cyclic(n: u64) -> Result<Group> {
        make_group(&[n])
    }

    pub fn with_budget(moduli: &[u64], budget: usize) -> Result<Group> {
        if moduli.is_empty() {
            return Err(Error::Parse("a group needs at least one factor".into()));
        }
        let mut card: u128 = 1;
        for &n in moduli {
            if n < 2 {
                return Err(Error::BadModulus(n));
            }
            card = card.saturating_mul(n as u128);
        }
        if card > budget as u128 {
            return Err(Error::OverBudget {
                cardinality: card,
                budget,
            });
        }
        let moduli: Vec<usize> = moduli.iter().map(|&n| n as usize).collect();
        let mut strides = vec![1usize; moduli.len()];
        for i in (0..moduli.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * moduli[i + 1];
        }
        let exponent = moduli.iter().fold(1u64, |acc, &n| acc.lcm(&(n as u64)));
        Ok(Group {
            moduli,
            strides,
            cardinality: card as usize,
            exponent,
        })
    }

    pub fn moduli(&self) -> &[usize] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    /// Least common multiple of the moduli; character phases are multiples
    /// of `1/exponent`.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn is_odd(&self) -> bool {
        self.cardinality % 2 == 1
    }

    pub fn element(&self, residues: &[i64]) -> Result<Element> {
        self.check_len(residues.len())?;
        Ok(Element(
            residues
                .iter()
                .zip(&self.moduli)
                .map(|(&r, &n)| r.rem_euclid(n as i64) as usize)
                .collect(),
        ))
    }

    pub fn character(&self, exponents: &[i64]) -> Result<Character> {
        self.element(exponents).map(|e| Character(e.0))
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.moduli.len() {
            return Err(Error::ShapeMismatch {
                expected: self.moduli.len(),
                got,
            });
        }
        Ok(())
    }

    fn check_reduced(&self, residues: &[usize]) -> Result<()> {
        self.check_len(residues.len())?;
        for (&r, &n) in residues.iter().zip(&self.moduli) {
            if r >= n {
                return Err(Error::OutOfRange(format!(
                    "residue {r} not below modulus {n}"
                )));
            }
        }
        Ok(())
    }

    pub fn encode(&self, residues: &[usize]) -> usize {
        residues.iter().zip(&self.strides).map(|(r, s)| r * s).sum()
    }

    pub fn decode(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.moduli.len()];
        for (i, &s) in self.strides.iter().enumerate() {
            out[i] = idx / s;
            idx %= s;
        }
        out
    }

    pub fn index_of(&self, x: &Element) -> usize {
        self.encode(&x.0)
    }

    pub fn element_at(&self, idx: usize) -> Element {
        Element(self.decode(idx))
    }

    pub fn character_at(&self, idx: usize) -> Character {
        Character(self.decode(idx))
    }

    fn map2(&self, a: usize, b: usize, f: impl Fn(usize, usize, usize) -> usize) -> usize {
        let mut out = 0;
        for (&n, &s) in self.moduli.iter().zip(&self.strides) {
            let ra = (a / s) % n;
            let rb = (b / s) % n;
            out += f(ra, rb, n) * s;
        }
        out
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.map2(a, b, |x, y, n| (x + y) % n)
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.map2(a, b, |x, y, n| (x + n - y) % n)
    }

    pub fn neg(&self, a: usize) -> usize {
        self.map2(a, 0, |x, _, n| (n - x) % n)
    }

    pub fn double(&self, a: usize) -> usize {
        self.map2(a, 0, |x, _, n| (2 * x) % n)
    }

    /// `k·a` for an integer `k` of either sign.
    pub fn scale(&self, a: usize, k: i64) -> usize {
        self.map2(a, 0, |x, _, n| {
            ((x as i128 * k as i128).rem_euclid(n as i128)) as usize
        })
    }

    /// Phase of `γ(x)` as an integer `p ∈ [0, exponent)`, meaning
    /// `γ(x) = exp(2πi p / exponent)`.
    pub fn phase(&self, gamma: usize, x: usize) -> u64 {
        let e = self.exponent;
        let mut p: u64 = 0;
        for (&n, &s) in self.moduli.iter().zip(&self.strides) {
            let g = ((gamma / s) % n) as u64;
            let r = ((x / s) % n) as u64;
            let unit = e / n as u64;
            p = (p + (g * r % n as u64) * unit) % e;
        }
        p
    }

    /// `γ(x)` by flat indices.
    pub fn char_value(&self, gamma: usize, x: usize) -> Complex64 {
        let p = self.phase(gamma, x);
        let theta = 2.0 * PI * (p as f64) / (self.exponent as f64);
        Complex64::from_polar(1.0, theta)
    }

    /// `‖γ(x)‖` computed from the exact phase.
    pub fn char_valuation(&self, gamma: usize, x: usize) -> f64 {
        let p = self.phase(gamma, x);
        let q = p.min(self.exponent - p);
        q as f64 / self.exponent as f64
    }

    pub fn char_eval(&self, gamma: &Character, x: &Element) -> Result<Complex64> {
        self.check_reduced(&gamma.0)?;
        self.check_reduced(&x.0)?;
        Ok(self.char_value(self.encode(&gamma.0), self.encode(&x.0)))
    }

    pub fn double_map(&self, x: &Element) -> Element {
        Element(
            x.0.iter()
                .zip(&self.moduli)
                .map(|(&r, &n)| (2 * r) % n)
                .collect(),
        )
    }

    /// `{x ≠ 0 : 2x = 0}`.
    pub fn order2_elements(&self) -> GSet {
        let mut s = GSet::empty(self);
        for x in 1..self.cardinality {
            if self.double(x) == 0 {
                s.insert(x);
            }
        }
        s
    }

    pub fn is_order2(&self, x: usize) -> bool {
        x != 0 && self.double(x) == 0
    }
}

pub fn char_eval(g: &Group, gamma: &Character, x: &Element) -> Result<Complex64> {
    g.char_eval(gamma, x)
}

pub fn double_map(g: &Group, x: &Element) -> Element {
    g.double_map(x)
}

pub fn order2_elements(g: &Group) -> GSet {
    g.order2_elements()
}

/// `‖z‖ = |arg z| / 2π` with `arg ∈ (−π, π]`.
pub fn valuation(z: Complex64) -> Result<f64> {
    let r = z.norm();
    if (r - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnitModulus(r));
    }
    // atan2 returns −π for (−1, −0.0); the absolute value folds both ends to π.
    Ok(z.im.atan2(z.re).abs() / (2.0 * PI))
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.moduli.iter().enumerate() {
            if i > 0 {
                write!(f, "x")?;
            }
            write!(f, "Z{n}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({self})")
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Parses `Z4`, `Z2xZ3`, `F3^5`, `Z5^2xZ3` (case-insensitive).
pub fn parse_group(text: &str) -> Result<Group> {
    let lower = text.trim().to_ascii_lowercase();
    if lower.is_empty() {
        return Err(Error::Parse("empty group literal".into()));
    }
    let mut moduli = Vec::new();
    for tok in lower.split('x') {
        let tok = tok.trim();
        let (field, body) = match tok.chars().next() {
            Some('z') => (false, &tok[1..]),
            Some('f') => (true, &tok[1..]),
            _ => return Err(Error::Parse(format!("bad factor `{tok}`"))),
        };
        let (base, power) = match body.split_once('^') {
            Some((b, p)) => (b, p),
            None => (body, "1"),
        };
        let n: u64 = base
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad modulus in `{tok}`")))?;
        let k: usize = power
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent in `{tok}`")))?;
        if k == 0 {
            return Err(Error::Parse(format!("zero exponent in `{tok}`")));
        }
        if field && !is_prime(n) {
            return Err(Error::Parse(format!("F{n} needs a prime order")));
        }
        moduli.extend(std::iter::repeat_n(n, k));
    }
    make_group(&moduli)
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Group> {
        parse_group(s)
    }
}
