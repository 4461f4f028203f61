//! Fourier analysis on a finite abelian group with Haar-probability
//! normalization: `f̂(γ) = E_x f(x) conj(γ(x))`, `f(x) = Σ_γ f̂(γ) γ(x)`,
//! `f ∗ g(y) = E_x f(y − x) g(x)` and `⟨f, g⟩ = E_x f(x) conj(g(x))`.

use std::ops::{Add, Index, Mul, Sub};

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::sets::GSet;

/// Default equality tolerance for transform identities.
pub const DEFAULT_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A complex-valued function on the group, indexed by flat element index.
#[derive(Debug, Clone, PartialEq)]
pub struct GFunction {
    group: Group,
    values: Vec<Complex64>,
}

/// A complex-valued function on the dual group, indexed by flat character index.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumFunction {
    group: Group,
    values: Vec<Complex64>,
}

macro_rules! table_common {
    ($t:ty) => {
        impl $t {
            pub fn from_values(group: &Group, values: Vec<Complex64>) -> Result<Self> {
                if values.len() != group.cardinality() {
                    return Err(Error::ShapeMismatch {
                        expected: group.cardinality(),
                        got: values.len(),
                    });
                }
                if values
                    .iter()
                    .any(|v| !v.re.is_finite() || !v.im.is_finite())
                {
                    return Err(Error::Numerical("non-finite table entry".into()));
                }
                Ok(Self {
                    group: group.clone(),
                    values,
                })
            }

            pub fn zeros(group: &Group) -> Self {
                Self {
                    group: group.clone(),
                    values: vec![ZERO; group.cardinality()],
                }
            }

            pub fn from_fn(group: &Group, f: impl Fn(usize) -> Complex64) -> Self {
                Self {
                    group: group.clone(),
                    values: (0..group.cardinality()).map(f).collect(),
                }
            }

            pub fn group(&self) -> &Group {
                &self.group
            }

            pub fn values(&self) -> &[Complex64] {
                &self.values
            }

            pub fn into_values(self) -> Vec<Complex64> {
                self.values
            }

            pub fn len(&self) -> usize {
                self.values.len()
            }

            pub fn is_empty(&self) -> bool {
                self.values.is_empty()
            }

            pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
                Self {
                    group: self.group.clone(),
                    values: self.values.iter().map(|&v| f(v)).collect(),
                }
            }

            pub fn scale(&self, c: Complex64) -> Self {
                self.map(|v| v * c)
            }

            pub fn sup_norm(&self) -> f64 {
                self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
            }

            /// `max |self − other|`.
            pub fn distance(&self, other: &Self) -> Result<f64> {
                same_group(&self.group, &other.group)?;
                Ok(self
                    .values
                    .iter()
                    .zip(&other.values)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max))
            }

            pub fn zip_with(
                &self,
                other: &Self,
                f: impl Fn(Complex64, Complex64) -> Complex64,
            ) -> Result<Self> {
                same_group(&self.group, &other.group)?;
                Ok(Self {
                    group: self.group.clone(),
                    values: self
                        .values
                        .iter()
                        .zip(&other.values)
                        .map(|(&a, &b)| f(a, b))
                        .collect(),
                })
            }
        }

        impl Index<usize> for $t {
            type Output = Complex64;

            fn index(&self, i: usize) -> &Complex64 {
                &self.values[i]
            }
        }

        impl Add for &$t {
            type Output = $t;

            fn add(self, rhs: &$t) -> $t {
                self.zip_with(rhs, |a, b| a + b)
                    .expect("group mismatch in +")
            }
        }

        impl Sub for &$t {
            type Output = $t;

            fn sub(self, rhs: &$t) -> $t {
                self.zip_with(rhs, |a, b| a - b)
                    .expect("group mismatch in -")
            }
        }

        impl Mul for &$t {
            type Output = $t;

            fn mul(self, rhs: &$t) -> $t {
                self.zip_with(rhs, |a, b| a * b)
                    .expect("group mismatch in *")
            }
        }
    };
}

table_common!(GFunction);
table_common!(SpectrumFunction);

pub(crate) fn same_group(a: &Group, b: &Group) -> Result<()> {
    if a != b {
        return Err(Error::GroupMismatch);
    }
    Ok(())
}

impl GFunction {
    pub fn constant(group: &Group, c: f64) -> GFunction {
        GFunction::from_fn(group, |_| Complex64::new(c, 0.0))
    }

    pub fn from_real(group: &Group, values: &[f64]) -> Result<GFunction> {
        GFunction::from_values(
            group,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn indicator(set: &GSet) -> GFunction {
        GFunction::from_fn(set.group(), |x| {
            if set.contains(x) {
                Complex64::new(1.0, 0.0)
            } else {
                ZERO
            }
        })
    }

    /// The density of the uniform probability measure on `set` against
    /// `μ_G`, i.e. `(|G|/|set|) · 1_set`.
    pub fn uniform_density(set: &GSet) -> Result<GFunction> {
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        let w = set.group().cardinality() as f64 / set.len() as f64;
        Ok(GFunction::indicator(set).scale(Complex64::new(w, 0.0)))
    }

    /// `x ↦ f(x − y)`.
    pub fn translate(&self, y: usize) -> GFunction {
        let g = &self.group;
        GFunction::from_fn(g, |x| self.values[g.sub(x, y)])
    }

    /// `x ↦ f(−x)`.
    pub fn reflect(&self) -> GFunction {
        let g = &self.group;
        GFunction::from_fn(g, |x| self.values[g.neg(x)])
    }

    /// `x ↦ f(x)` restricted to `set`, zero elsewhere.
    pub fn restrict(&self, set: &GSet) -> Result<GFunction> {
        same_group(&self.group, set.group())?;
        Ok(GFunction::from_fn(&self.group, |x| {
            if set.contains(x) {
                self.values[x]
            } else {
                ZERO
            }
        }))
    }

    /// `∫ f dμ_G`.
    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    /// `∫ |f| dμ_G`.
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum::<f64>() / self.values.len() as f64
    }

    /// `(∫ |f|² dμ_G)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len() as f64).sqrt()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }
}

/// Applies a per-axis DFT to `data` (row-major over the group's factors).
fn transform_axes(group: &Group, data: &mut [Complex64], direction: FftDirection) {
    let moduli = group.moduli();
    let total = group.cardinality();
    let mut planner = FftPlanner::<f64>::new();
    let mut stride = total;
    for &n in moduli {
        // Elements of one line are `stride / n` apart; blocks of size `stride`
        // repeat `total / stride` times.
        let inner = stride / n;
        let fft = planner.plan_fft(n, direction);
        let lines = total / n;
        let mut buf = vec![ZERO; total];
        let mut line = 0;
        for block in (0..total).step_by(stride) {
            for off in 0..inner {
                let base = block + off;
                for k in 0..n {
                    buf[line * n + k] = data[base + k * inner];
                }
                line += 1;
            }
        }
        debug_assert_eq!(line, lines);
        fft.process(&mut buf);
        let mut line = 0;
        for block in (0..total).step_by(stride) {
            for off in 0..inner {
                let base = block + off;
                for k in 0..n {
                    data[base + k * inner] = buf[line * n + k];
                }
                line += 1;
            }
        }
        stride = inner;
    }
}

pub fn fourier_transform(f: &GFunction) -> SpectrumFunction {
    let mut data = f.values.clone();
    transform_axes(&f.group, &mut data, FftDirection::Forward);
    let scale = 1.0 / f.group.cardinality() as f64;
    data.iter_mut().for_each(|v| *v *= scale);
    SpectrumFunction {
        group: f.group.clone(),
        values: data,
    }
}

pub fn inverse_transform(spec: &SpectrumFunction) -> GFunction {
    let mut data = spec.values.clone();
    transform_axes(&spec.group, &mut data, FftDirection::Inverse);
    GFunction {
        group: spec.group.clone(),
        values: data,
    }
}

/// Direct `O(|G|²)` evaluation of the transform, kept as the reference.
pub fn fourier_transform_naive(f: &GFunction) -> SpectrumFunction {
    let g = &f.group;
    let n = g.cardinality() as f64;
    SpectrumFunction::from_fn(g, |gamma| {
        f.values
            .iter()
            .enumerate()
            .map(|(x, &v)| v * g.char_value(gamma, x).conj())
            .sum::<Complex64>()
            / n
    })
}

pub fn convolve(f: &GFunction, g: &GFunction) -> Result<GFunction> {
    same_group(&f.group, &g.group)?;
    let prod = &fourier_transform(f) * &fourier_transform(g);
    Ok(inverse_transform(&prod))
}

/// Direct `O(|G|²)` convolution.
pub fn convolve_naive(f: &GFunction, h: &GFunction) -> Result<GFunction> {
    same_group(&f.group, &h.group)?;
    let g = &f.group;
    let n = g.cardinality() as f64;
    Ok(GFunction::from_fn(g, |y| {
        (0..g.cardinality())
            .map(|x| f.values[g.sub(y, x)] * h.values[x])
            .sum::<Complex64>()
            / n
    }))
}

pub fn inner_product(f: &GFunction, g: &GFunction) -> Result<Complex64> {
    same_group(&f.group, &g.group)?;
    Ok(f.values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| a * b.conj())
        .sum::<Complex64>()
        / f.values.len() as f64)
}

/// `Σ_γ F(γ) conj(H(γ))`.
pub fn spectral_inner_product(a: &SpectrumFunction, b: &SpectrumFunction) -> Result<Complex64> {
    same_group(&a.group, &b.group)?;
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| x * y.conj())
        .sum())
}

impl SpectrumFunction {
    /// `Σ_γ |F(γ)|²`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}
