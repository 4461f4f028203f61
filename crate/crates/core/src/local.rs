//! Fourier analysis relative to a regular Bourgain system.

use num_complex::Complex64;

use crate::bohr_bourgain::{intersect, BourgainSystem};
use crate::error::{Error, Result};
use crate::fourier::{convolve, fourier_transform, same_group, GFunction, SpectrumFunction};
use crate::group::Group;
use crate::sets::GSet;

/// Slack allowed when comparing a computed quantity with its bound.
pub const CHECK_TOL: f64 = 1e-9;

/// A computed value next to the bound it should respect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub value: f64,
    pub bound: f64,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        self.value <= self.bound + CHECK_TOL
    }
}

/// `η ∈ {2^{−k} : 3 ≤ k ≤ 8}`.
pub fn default_eta_grid() -> Vec<f64> {
    (3..=8).map(|k| (-(k as f64)).exp2()).collect()
}

/// The normalized counting measure `β_ρ` on `B_ρ`.
#[derive(Debug, Clone)]
pub struct LocalMeasure {
    system: BourgainSystem,
    rho: f64,
    support: GSet,
    density: GFunction,
}

pub fn local_measure(system: &BourgainSystem, rho: f64) -> Result<LocalMeasure> {
    let support = system.materialize(rho);
    let density = GFunction::uniform_density(&support)?;
    Ok(LocalMeasure {
        system: system.clone(),
        rho,
        support,
        density,
    })
}

impl LocalMeasure {
    pub fn system(&self) -> &BourgainSystem {
        &self.system
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn support(&self) -> &GSet {
        &self.support
    }

    /// `(|G|/|B_ρ|) · 1_{B_ρ}`.
    pub fn density_fn(&self) -> &GFunction {
        &self.density
    }

    /// `∫ dβ`, which is 1 up to rounding.
    pub fn mass(&self) -> f64 {
        self.density.mean().re
    }

    pub fn transform(&self) -> SpectrumFunction {
        fourier_transform(&self.density)
    }

    /// `f ∗ β`.
    pub fn smooth(&self, f: &GFunction) -> Result<GFunction> {
        convolve(f, &self.density)
    }

    /// `∫ |f|^p dβ` as a mean over the support.
    fn moment(&self, f: &GFunction, p: i32) -> f64 {
        self.support
            .iter()
            .map(|x| f[x].norm().powi(p))
            .sum::<f64>()
            / self.support.len() as f64
    }

    pub fn l1(&self, f: &GFunction) -> f64 {
        self.moment(f, 1)
    }

    pub fn l2(&self, f: &GFunction) -> f64 {
        self.moment(f, 2).sqrt()
    }

    /// `(f dβ)^(γ) = E_{x ∈ B_ρ} f(x) conj γ(x)` for every γ.
    pub fn weighted_transform(&self, f: &GFunction) -> Result<SpectrumFunction> {
        same_group(f.group(), self.support.group())?;
        Ok(fourier_transform(&(f * &self.density)))
    }
}

fn require_regular(system: &BourgainSystem) -> Result<()> {
    if system.is_regular() {
        Ok(())
    } else {
        Err(Error::NotRegular)
    }
}

/// `|1 − γ(x)|`.
fn char_distance(g: &Group, gamma: usize, x: usize) -> f64 {
    (Complex64::new(1.0, 0.0) - g.char_value(gamma, x)).norm()
}

/// `max_{x ∈ set} |1 − γ(x)|`.
pub fn max_char_distance(gamma: usize, set: &GSet) -> f64 {
    set.iter()
        .map(|x| char_distance(set.group(), gamma, x))
        .fold(0.0, f64::max)
}

/// `‖(y+β) − β‖ = |B Δ (y+B)| / |B|` against `2⁴dη`.
pub fn haar_defect(system: &BourgainSystem, y: usize, eta: f64) -> Result<BoundCheck> {
    require_regular(system)?;
    if !system.contains(eta, y) {
        return Err(Error::Precondition(format!("{y} is not in B_{eta}")));
    }
    let b = system.materialize(1.0);
    let moved = b.translate(y);
    let sym = b.difference(&moved)?.len() + moved.difference(&b)?.len();
    Ok(BoundCheck {
        value: sym as f64 / b.len() as f64,
        bound: 16.0 * system.dimension() * eta,
    })
}

/// `max_{x ∈ G, y ∈ B_η} |f∗β(x+y) − f∗β(x)|` against `2⁴‖f‖_∞ dη`.
pub fn smoothing_defect(system: &BourgainSystem, f: &GFunction, eta: f64) -> Result<BoundCheck> {
    require_regular(system)?;
    same_group(f.group(), system.group())?;
    let g = system.group();
    let smoothed = local_measure(system, 1.0)?.smooth(f)?;
    let shifts = system.materialize(eta).indices();
    let mut worst = 0.0f64;
    for x in 0..g.cardinality() {
        let base = smoothed[x];
        for &y in &shifts {
            worst = worst.max((smoothed[g.add(x, y)] - base).norm());
        }
    }
    Ok(BoundCheck {
        value: worst,
        bound: 16.0 * f.sup_norm() * system.dimension() * eta,
    })
}

#[derive(Debug, Clone)]
pub struct ContainmentReport {
    /// `{γ : |β̂(γ)| ≥ κ}`.
    pub large: Vec<usize>,
    /// `2⁴dκ^{−1}η`.
    pub radius: f64,
    /// Largest `|1 − γ(x)|` over the large characters and `x ∈ B_η`.
    pub worst: f64,
}

impl ContainmentReport {
    pub fn holds(&self) -> bool {
        self.worst <= self.radius + CHECK_TOL
    }
}

/// Checks `{γ : |β̂(γ)| ≥ κ} ⊂ {γ : |1−γ(x)| ≤ 2⁴dκ^{−1}η ∀x ∈ B_η}`.
pub fn spectral_containment(
    system: &BourgainSystem,
    kappa: f64,
    eta: f64,
) -> Result<ContainmentReport> {
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::OutOfRange(format!("κ = {kappa} not in (0, 1]")));
    }
    require_regular(system)?;
    let beta_hat = local_measure(system, 1.0)?.transform();
    let large: Vec<usize> = (0..beta_hat.len())
        .filter(|&gamma| beta_hat[gamma].norm() >= kappa - CHECK_TOL)
        .collect();
    let small = system.materialize(eta);
    let worst = large
        .iter()
        .map(|&gamma| max_char_distance(gamma, &small))
        .fold(0.0, f64::max);
    Ok(ContainmentReport {
        large,
        radius: 16.0 * system.dimension() * eta / kappa,
        worst,
    })
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// Both sides of `Σ_j |⟨v,w_j⟩|² ≤ ⟨v,v⟩ max_j Σ_i |⟨w_i,w_j⟩|`.
pub fn cotlar_check(v: &[Complex64], ws: &[Vec<Complex64>]) -> Result<(f64, f64)> {
    if let Some(w) = ws.iter().find(|w| w.len() != v.len()) {
        return Err(Error::ShapeMismatch {
            expected: v.len(),
            got: w.len(),
        });
    }
    let lhs = ws.iter().map(|w| dot(v, w).norm_sqr()).sum();
    let gram = ws
        .iter()
        .map(|wj| ws.iter().map(|wi| dot(wi, wj).norm()).sum::<f64>())
        .fold(0.0, f64::max);
    Ok((lhs, dot(v, v).re * gram))
}

#[derive(Debug, Clone)]
pub struct BesselReport {
    pub l1: f64,
    pub l2: f64,
    /// `‖f‖_{L²(β)} / ‖f‖_{L¹(β)}`.
    pub l_f: f64,
    /// `{γ : |(f dβ)^(γ)| ≥ ε‖f‖_{L¹(β)}}`.
    pub delta: Vec<usize>,
    /// `{γ : |β̂(γ)| ≥ ε²L_f^{−2}/2}`.
    pub s_set: Vec<usize>,
    /// Greedy maximal subset of Δ whose translates of S are disjoint.
    pub lambda: Vec<usize>,
    /// `2ε^{−2}L_f²`.
    pub lambda_bound: f64,
    /// The system induced by `B(Λ, 1)`.
    pub bohr_part: BourgainSystem,
    /// `B' = ℬ ∩ B(Λ, 1)`.
    pub system: BourgainSystem,
    /// Δ lies in the final annulus for every η in the grid.
    pub containment_ok: bool,
    /// S lies in `{|1−γ| ≤ 2⁵dε^{−2}L_f²η on B_η}` for every η in the grid.
    pub s_containment_ok: bool,
    /// `μ(B') ≥ 4^{−(d+2ε^{−2}L_f²)} μ(B)`.
    pub density: BoundCheck,
    /// `Σ_Λ |(f dβ)^|² ≤ ‖f‖²_{L²(β)}(1 + |Λ|ε²L_f^{−2}/2)`.
    pub energy: BoundCheck,
    /// Distinct elements of Λ never differ by an element of S.
    pub separated: bool,
}

impl BesselReport {
    pub fn size_ok(&self) -> bool {
        self.lambda.len() as f64 <= self.lambda_bound + CHECK_TOL
    }

    pub fn all_ok(&self) -> bool {
        self.size_ok()
            && self.containment_ok
            && self.s_containment_ok
            && self.density.value >= self.density.bound * (1.0 - CHECK_TOL)
            && self.energy.holds()
            && self.separated
    }
}

/// The local Bessel construction for `f` on the regular system `ℬ`.
pub fn local_bessel(f: &GFunction, system: &BourgainSystem, eps: f64) -> Result<BesselReport> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::OutOfRange(format!("ε = {eps} not in (0, 1]")));
    }
    same_group(f.group(), system.group())?;
    require_regular(system)?;
    let g = system.group().clone();
    let n = g.cardinality();
    let beta = local_measure(system, 1.0)?;
    let l1 = beta.l1(f);
    if l1 == 0.0 {
        return Err(Error::Precondition("f vanishes on B".into()));
    }
    let l2 = beta.l2(f);
    let l_f = l2 / l1;
    let d = system.dimension();

    let fdb = beta.weighted_transform(f)?;
    let delta: Vec<usize> = (0..n)
        .filter(|&gamma| fdb[gamma].norm() >= eps * l1 * (1.0 - 1e-12))
        .collect();
    let beta_hat = beta.transform();
    let kappa = eps * eps / (2.0 * l_f * l_f);
    let s = GSet::from_predicate(&g, |gamma| beta_hat[gamma].norm() >= kappa * (1.0 - 1e-12));
    let s_minus_s = s.difference_set();

    let mut lambda: Vec<usize> = Vec::new();
    for &gamma in &delta {
        if lambda.iter().all(|&l| !s_minus_s.contains(g.sub(gamma, l))) {
            lambda.push(gamma);
        }
    }
    let separated = lambda.iter().enumerate().all(|(i, &a)| {
        lambda[..i]
            .iter()
            .all(|&b| !s.contains(g.sub(a, b)) && !s.contains(g.sub(b, a)))
    });

    let bohr_part = BourgainSystem::bohr(&g, &lambda, 1.0)?;
    let b_prime = intersect(&[system.clone(), bohr_part.clone()])?;
    let growth = eps.powi(-2) * l_f * l_f;

    let mut containment_ok = true;
    let mut s_containment_ok = true;
    for eta in default_eta_grid() {
        let small = b_prime.materialize(eta);
        let reach = 128.0 * (1.0 + d) * growth * eta;
        containment_ok &= delta
            .iter()
            .all(|&gamma| max_char_distance(gamma, &small) <= reach + CHECK_TOL);
        let own = system.materialize(eta);
        let s_reach = 32.0 * d * growth * eta;
        s_containment_ok &= s
            .iter()
            .all(|gamma| max_char_distance(gamma, &own) <= s_reach + CHECK_TOL);
    }

    let density = BoundCheck {
        value: b_prime.density(),
        bound: (-2.0 * (d + 2.0 * growth)).exp2() * system.density(),
    };
    let energy = BoundCheck {
        value: lambda.iter().map(|&l| fdb[l].norm_sqr()).sum(),
        bound: l2 * l2 * (1.0 + lambda.len() as f64 / (2.0 * growth)),
    };

    Ok(BesselReport {
        l1,
        l2,
        l_f,
        delta,
        s_set: s.indices(),
        lambda,
        lambda_bound: 2.0 * growth,
        bohr_part,
        system: b_prime,
        containment_ok,
        s_containment_ok,
        density,
        energy,
        separated,
    })
}

#[derive(Debug, Clone)]
pub struct L2IncrementReport {
    /// `|A ∩ B| / |B|`.
    pub alpha: f64,
    /// `cα / 2^{10}(1+d)`.
    pub eta: f64,
    /// `{γ : |1−γ(x)| ≤ 1/2 ∀x ∈ B'}`.
    pub lambda: Vec<usize>,
    /// `Σ_Λ |((1_A−α)1_B)^(λ)|²`.
    pub energy: f64,
    /// `cα²μ_G(B)`.
    pub energy_threshold: f64,
    /// `‖1_A ∗ β'‖_∞`.
    pub increment: f64,
    /// `α(1 + c/2³)`.
    pub increment_target: f64,
}

impl L2IncrementReport {
    pub fn hypothesis(&self) -> bool {
        self.energy >= self.energy_threshold
    }

    pub fn conclusion(&self) -> bool {
        self.increment >= self.increment_target - CHECK_TOL
    }

    pub fn implication_holds(&self) -> bool {
        !self.hypothesis() || self.conclusion()
    }
}

/// `1_A ∗ β`.
pub fn relative_density(a: &GSet, system: &BourgainSystem) -> Result<GFunction> {
    same_group(a.group(), system.group())?;
    local_measure(system, 1.0)?.smooth(&GFunction::indicator(a))
}

/// `‖1_A ∗ β‖_∞` and the first point attaining it.
pub fn max_relative_density(a: &GSet, system: &BourgainSystem) -> Result<(f64, usize)> {
    let profile = relative_density(a, system)?;
    let mut best = (f64::NEG_INFINITY, 0);
    for x in 0..profile.len() {
        if profile[x].re > best.0 + 1e-12 {
            best = (profile[x].re, x);
        }
    }
    Ok(best)
}

pub fn l2_increment_check(
    a: &GSet,
    system: &BourgainSystem,
    sub: &BourgainSystem,
    c: f64,
) -> Result<L2IncrementReport> {
    same_group(a.group(), system.group())?;
    same_group(a.group(), sub.group())?;
    require_regular(system)?;
    let g = system.group();
    let b = system.materialize(1.0);
    let alpha = a.intersection(&b)?.len() as f64 / b.len() as f64;
    if alpha <= 0.0 {
        return Err(Error::Precondition("A does not meet B".into()));
    }
    let d = system.dimension();
    let eta = c * alpha / (1024.0 * (1.0 + d));
    let inside = sub
        .radii()
        .iter()
        .zip(system.radii())
        .all(|(&mine, &theirs)| theirs <= eta * mine * (1.0 + 1e-12));
    if !inside {
        return Err(Error::Precondition(format!(
            "B' is not a sub-system of {eta}·ℬ"
        )));
    }
    let b_prime = sub.materialize(1.0);
    let lambda: Vec<usize> = (0..g.cardinality())
        .filter(|&gamma| max_char_distance(gamma, &b_prime) <= 0.5)
        .collect();
    let balanced = GFunction::from_fn(g, |x| {
        let v = if a.contains(x) { 1.0 - alpha } else { -alpha };
        Complex64::new(if b.contains(x) { v } else { 0.0 }, 0.0)
    });
    let spec = fourier_transform(&balanced);
    let energy = lambda.iter().map(|&l| spec[l].norm_sqr()).sum();
    let (increment, _) = max_relative_density(a, sub)?;
    Ok(L2IncrementReport {
        alpha,
        eta,
        lambda,
        energy,
        energy_threshold: c * alpha * alpha * b.density(),
        increment,
        increment_target: alpha * (1.0 + c / 8.0),
    })
}
