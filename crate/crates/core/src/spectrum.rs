//! Large spectra, dissociated bases and the Bogolioùboff–Chang system.

use fixedbitset::FixedBitSet;

use crate::bohr_bourgain::BourgainSystem;
use crate::error::{Error, Result};
use crate::fourier::{fourier_transform, GFunction, SpectrumFunction};
use crate::group::Group;
use crate::local::max_relative_density;
use crate::sets::{sumset, GSet};

/// Absolute slack on the large-spectrum threshold.
pub const SPECTRUM_TOL: f64 = 1e-10;

/// Largest `|Γ|` accepted by [`span_cube`].
pub const SPAN_BUDGET: usize = 20;

/// Largest `|Γ|` accepted by [`is_dissociated_exhaustive`].
pub const SIGN_BUDGET: usize = 16;

/// A set of characters, stored by flat index.
pub type SpectrumSet = GSet;

/// `{γ : |1̂_A(γ)| ≥ εα}`.
pub fn large_spectrum(a: &GSet, eps: f64) -> Result<SpectrumSet> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::OutOfRange(format!("ε = {eps} not in (0, 1]")));
    }
    let spec = fourier_transform(&GFunction::indicator(a));
    let cut = eps * a.density() - SPECTRUM_TOL;
    Ok(GSet::from_predicate(a.group(), |gamma| {
        spec[gamma].norm() >= cut
    }))
}

/// Grows `cube` to `cube ∪ (cube + γ) ∪ (cube − γ)`.
fn extend_cube(g: &Group, cube: &mut FixedBitSet, gamma: usize) {
    let old: Vec<usize> = cube.ones().collect();
    let minus = g.neg(gamma);
    for s in old {
        cube.insert(g.add(s, gamma));
        cube.insert(g.add(s, minus));
    }
}

fn cube_of(g: &Group, gammas: &[usize]) -> FixedBitSet {
    let mut cube = FixedBitSet::with_capacity(g.cardinality());
    cube.insert(0);
    for &gamma in gammas {
        extend_cube(g, &mut cube, gamma);
    }
    cube
}

/// `⟨Γ⟩ = {Σ σ_λ λ : σ ∈ {−1,0,1}^Γ}`.
pub fn span_cube(g: &Group, gammas: &[usize]) -> Result<SpectrumSet> {
    if gammas.len() > SPAN_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "span cube of {} characters (limit {SPAN_BUDGET})",
            gammas.len()
        )));
    }
    let cube = cube_of(g, gammas);
    Ok(GSet::from_predicate(g, |x| cube.contains(x)))
}

/// Enumerates every nonzero sign pattern and reports whether none of them
/// sums to zero.
pub fn is_dissociated_exhaustive(g: &Group, gammas: &[usize]) -> Result<bool> {
    let k = gammas.len();
    if k > SIGN_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "3^{k} sign patterns (limit 3^{SIGN_BUDGET})"
        )));
    }
    let mut sigma = vec![0i8; k];
    loop {
        let mut i = 0;
        while i < k {
            sigma[i] += 1;
            if sigma[i] <= 1 {
                break;
            }
            sigma[i] = -1;
            i += 1;
        }
        if i == k {
            return Ok(true);
        }
        let mut total = 0;
        for (s, &gamma) in sigma.iter().zip(gammas) {
            total = match s {
                1 => g.add(total, gamma),
                -1 => g.sub(total, gamma),
                _ => total,
            };
        }
        if total == 0 && sigma.iter().any(|&s| s != 0) {
            return Ok(false);
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChangReport {
    pub alpha: f64,
    pub eps: f64,
    pub spectrum: SpectrumSet,
    /// The greedy dissociated basis in the order it was built.
    pub basis: Vec<usize>,
    /// `2ε^{−2} ln α^{−1}`.
    pub size_bound: f64,
    /// `Λ ⊆ ⟨Γ⟩`.
    pub covered: bool,
}

impl ChangReport {
    pub fn size_ok(&self) -> bool {
        self.basis.len() as f64 <= self.size_bound + 1e-9
    }

    pub fn bounds_ok(&self) -> bool {
        self.covered && self.size_ok()
    }
}

/// Walks `candidates` in order, keeping each one outside the span cube of
/// those kept so far. The result is dissociated and spans every candidate.
pub fn greedy_dissociated(g: &Group, candidates: &[usize]) -> Vec<usize> {
    let mut cube = cube_of(g, &[]);
    let mut basis = Vec::new();
    for &gamma in candidates {
        if !cube.contains(gamma) {
            basis.push(gamma);
            extend_cube(g, &mut cube, gamma);
        }
    }
    basis
}

/// Greedy maximal dissociated subset of `Λ = large_spectrum(A, ε)`, taken in
/// decreasing `|1̂_A|` order with ties broken by flat index.
pub fn dissociated_basis(a: &GSet, eps: f64) -> Result<ChangReport> {
    let spectrum = large_spectrum(a, eps)?;
    let g = a.group();
    let hat: SpectrumFunction = fourier_transform(&GFunction::indicator(a));
    let mut order = spectrum.indices();
    order.sort_by(|&x, &y| hat[y].norm().total_cmp(&hat[x].norm()).then(x.cmp(&y)));
    let basis = greedy_dissociated(g, &order);
    let cube = cube_of(g, &basis);
    let covered = spectrum.iter().all(|x| cube.contains(x));
    let alpha = a.density();
    Ok(ChangReport {
        alpha,
        eps,
        spectrum,
        basis,
        size_bound: 2.0 * eps.powi(-2) * (1.0 / alpha).ln(),
        covered,
    })
}

#[derive(Debug, Clone)]
pub struct BogolioubovReport {
    pub alpha: f64,
    pub k: f64,
    pub chang: ChangReport,
    /// Radius of the Bohr set before the regular dilate.
    pub delta: f64,
    /// The regular dilate factor.
    pub lambda: f64,
    pub dimension: f64,
    /// `2⁵K ln α^{−1}`.
    pub dimension_bound: f64,
    pub density: f64,
    /// Natural log of `(2^{14}K²(1 + ln α^{−1}))^{−2⁴K ln α^{−1}}`.
    pub log_density_bound: f64,
    /// `‖1_A ∗ β‖_∞`.
    pub sup_density: f64,
    /// Where the supremum is first attained.
    pub sup_point: usize,
}

impl BogolioubovReport {
    pub fn dimension_ok(&self) -> bool {
        self.dimension <= self.dimension_bound + 1e-9
    }

    pub fn density_ok(&self) -> bool {
        self.density.ln() >= self.log_density_bound - 1e-9
    }

    pub fn sup_ok(&self) -> bool {
        self.sup_density >= 1.0 / (2.0 * self.k) - 1e-9
    }

    pub fn all_ok(&self) -> bool {
        self.dimension_ok() && self.density_ok() && self.sup_ok()
    }
}

/// A regular system of bounded dimension on which `A` has relative density
/// at least `1/2K` somewhere.
pub fn bogolioubov_chang(a: &GSet, k: f64) -> Result<(BourgainSystem, BogolioubovReport)> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let doubled = sumset(a, a)?.len() as f64;
    if !(k >= 1.0) || doubled > k * a.len() as f64 * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!(
            "|A+A| = {doubled} exceeds K|A| = {}",
            k * a.len() as f64
        )));
    }
    let g = a.group();
    let alpha = a.density();
    let eps = 1.0 / (2.0 * k);
    let chang = dissociated_basis(a, (eps / 3.0).sqrt())?;
    let delta = eps / (64.0 * (1.0 + chang.basis.len() as f64));
    let base = BourgainSystem::bohr(g, &chang.basis, delta)?;
    let (lambda, system) = base.regular_dilate()?;
    let (sup_density, sup_point) = max_relative_density(a, &system)?;
    let log_inv = (1.0 / alpha).ln();
    let report = BogolioubovReport {
        alpha,
        k,
        delta,
        lambda,
        dimension: system.dimension(),
        dimension_bound: 32.0 * k * log_inv,
        density: system.density(),
        log_density_bound: -16.0 * k * log_inv * (16384.0 * k * k * (1.0 + log_inv)).ln(),
        sup_density,
        sup_point,
        chang,
    };
    Ok((system, report))
}
