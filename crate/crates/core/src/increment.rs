//! The density-increment engine.
//!
//! [`itlem_evaluate`] builds every system and quantity of the four-case
//! dichotomy on a concrete instance and reports which case inequalities
//! hold. [`run_increment`] iterates it, replacing the system on density
//! cases, and records a line-oriented trace.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::bohr_bourgain::{intersect, BourgainSystem};
use crate::error::{Error, Result};
use crate::fourier::GFunction;
use crate::local::{local_bessel, max_relative_density, relative_density, BoundCheck};
use crate::sets::{lambda3, GSet, LambdaMethod};

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// The constants exactly as in the lemma.
    Paper,
    /// Dilates `α/2³(1+d)` and increment factor `1 + 1/8`.
    #[default]
    Practical,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "paper" => Ok(Mode::Paper),
            "practical" => Ok(Mode::Practical),
            _ => Err(Error::Parse(format!("unknown mode {s:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Paper => "paper",
            Mode::Practical => "practical",
        })
    }
}

impl Mode {
    /// Upper ends of the dilation ranges for `λ', λ'', λ''', λ''''`.
    fn tops(self, alpha: f64, d: f64) -> [f64; 4] {
        let s = 1.0 + d;
        match self {
            Mode::Paper => [
                alpha / (32768.0 * s),
                alpha / (128.0 * s),
                alpha / (1024.0 * s),
                alpha.powi(3) / (524288.0 * s),
            ],
            Mode::Practical => [alpha / (8.0 * s); 4],
        }
    }

    /// Increment factors for the first density case and the other two.
    fn increments(self) -> (f64, f64) {
        match self {
            Mode::Paper => (1.0 + (-12f64).exp2(), 1.0 + (-8f64).exp2()),
            Mode::Practical => (1.125, 1.125),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    Aps,
    DensityI,
    DensityII,
    DensityIII,
}

impl CaseId {
    pub fn label(self) -> &'static str {
        match self {
            CaseId::Aps => "ap",
            CaseId::DensityI => "density1",
            CaseId::DensityII => "density2",
            CaseId::DensityIII => "density3",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One case inequality evaluated on an instance.
///
/// For the AP case `lhs` is a Λ value; for density cases it is
/// `‖1_A ∗ β_w‖_∞` for the witness. The right side is kept as a logarithm
/// since the faithful constants underflow `f64`.
#[derive(Debug, Clone)]
pub struct CaseCertificate {
    pub case: CaseId,
    pub witness: Option<BourgainSystem>,
    pub lhs: f64,
    pub log_rhs: f64,
    /// `ln μ_G` of the witness and the logarithm of its required lower bound.
    pub log_density: f64,
    pub log_density_bound: f64,
    /// Dimension of the Bohr part and its cap, for the third density case.
    pub bohr_dimension: Option<BoundCheck>,
    /// The witness has `B_1 = {0}`.
    pub degenerate: bool,
}

impl CaseCertificate {
    pub fn rhs(&self) -> f64 {
        self.log_rhs.exp()
    }

    pub fn holds(&self) -> bool {
        !self.degenerate
            && self.lhs > 0.0
            && self.lhs.ln() >= self.log_rhs - TOL
            && self.log_density >= self.log_density_bound - TOL
            && self.bohr_dimension.is_none_or(|c| c.holds())
    }
}

/// `|Λ(g1_{B'}, 1_A1_{B''}, 1_{B'}) − α''·g∗β'(0)·μ(B'')μ(B')|` against
/// `α''α'μ(B'')μ(B')/4`.
#[derive(Debug, Clone)]
pub struct ClaimCheck {
    pub label: &'static str,
    /// `ℬ'` is regular and `16dλ'' ≤ α'/4`.
    pub applicable: bool,
    pub lhs: f64,
    pub rhs: f64,
}

impl ClaimCheck {
    pub fn holds(&self) -> bool {
        !self.applicable || self.lhs <= self.rhs + TOL
    }
}

/// Carried dimension ledger. A third-density-case witness gets declared
/// dimension `2(base + extra + d̃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionLedger {
    pub base: f64,
    pub extra: f64,
}

impl DimensionLedger {
    pub fn standalone(system: &BourgainSystem) -> DimensionLedger {
        DimensionLedger {
            base: system.dimension(),
            extra: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ItlemReport {
    pub mode: Mode,
    pub alpha: f64,
    pub dimension: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub b1: BourgainSystem,
    pub b2: BourgainSystem,
    /// A was replaced by `A − translation`.
    pub translation: usize,
    /// `1_A ∗ β'(0)` and `1_A ∗ β''(0)` after translating.
    pub alpha1: f64,
    pub alpha2: f64,
    /// `inf_x |1_A∗β' − α|(x) + |1_A∗β'' − α|(x)` against `α/2⁹`. Only
    /// checked in paper mode when neither `ℬ'` nor `ℬ''` carries an increment.
    pub deviation: Option<BoundCheck>,
    /// Largest gap between `|h|∗β` and `(2h₊ − h)∗β` at the maximiser.
    pub split_identity_error: f64,
    /// `T₀, …, T₄` with `T₀ = T₁ + T₂ + T₃ + T₄`.
    pub terms: [f64; 5],
    pub decomposition_error: f64,
    /// `α''α'²μ(B'')μ(B')`.
    pub scale: f64,
    pub claims: Vec<ClaimCheck>,
    /// `Λ(1_A, 1_A, 1_A)`.
    pub lambda_full: f64,
    pub cases: Vec<CaseCertificate>,
    /// Systems whose `B_1` collapsed to `{0}`.
    pub underflow: Vec<&'static str>,
    /// Why a case could not be built.
    pub skipped: Vec<String>,
}

impl ItlemReport {
    pub fn certificates(&self) -> impl Iterator<Item = &CaseCertificate> {
        self.cases.iter().filter(|c| c.holds())
    }

    pub fn certificate(&self, case: CaseId) -> Option<&CaseCertificate> {
        self.certificates().find(|c| c.case == case)
    }

    /// `T₀ ≥ Q/4`, or `|T₃| ≥ Q/8`, or `|T₄| ≥ Q/8`.
    pub fn split(&self) -> [bool; 3] {
        let q = self.scale;
        [
            self.terms[0] >= q / 4.0 - TOL,
            self.terms[3].abs() >= q / 8.0 - TOL,
            self.terms[4].abs() >= q / 8.0 - TOL,
        ]
    }

    pub fn is_underflow(&self) -> bool {
        !self.underflow.is_empty()
    }

    /// At least one certificate, or an underflow report.
    pub fn conclusive(&self) -> bool {
        self.certificates().next().is_some() || self.is_underflow()
    }

    pub fn claims_hold(&self) -> bool {
        self.claims.iter().all(|c| c.holds())
    }
}

fn lam(f: &GFunction, g: &GFunction, h: &GFunction) -> Result<f64> {
    Ok(lambda3(f, g, h, LambdaMethod::Fourier)?.re)
}

fn product(f: &GFunction, set: &GSet) -> Result<GFunction> {
    f.restrict(set)
}

fn degenerate(system: &BourgainSystem) -> bool {
    system.group().cardinality() > 1 && system.size_at(1.0) <= 1
}

fn validate(a: &GSet, system: &BourgainSystem) -> Result<f64> {
    crate::fourier::same_group(a.group(), system.group())?;
    if !system.is_regular() {
        return Err(Error::NotRegular);
    }
    if a.has_order2_difference() {
        return Err(Error::Precondition(
            "A − A contains an element of order 2".into(),
        ));
    }
    let (alpha, _) = max_relative_density(a, system)?;
    if alpha <= 0.0 {
        return Err(Error::Precondition("A misses every translate of B".into()));
    }
    Ok(alpha)
}

/// Every quantity of the four-case dichotomy for `A` on the regular system `ℬ`.
pub fn itlem_evaluate(a: &GSet, system: &BourgainSystem, mode: Mode) -> Result<ItlemReport> {
    itlem_evaluate_with(a, system, mode, DimensionLedger::standalone(system))
}

pub fn itlem_evaluate_with(
    a: &GSet,
    system: &BourgainSystem,
    mode: Mode,
    ledger: DimensionLedger,
) -> Result<ItlemReport> {
    let alpha = validate(a, system)?;
    let g = system.group().clone();
    let d = system.dimension();
    let log_mu = system.density().ln();
    let tops = mode.tops(alpha, d);
    let (inc_small, inc_large) = mode.increments();
    let mut underflow = Vec::new();
    let mut skipped = Vec::new();

    let (lambda1, b1) = system.regular_dilate_below(tops[0])?;
    let (lambda2, b2) = b1.regular_dilate_below(tops[1])?;
    if degenerate(&b1) {
        underflow.push("B'");
    }
    if degenerate(&b2) {
        underflow.push("B''");
    }

    // translate so the combined deviation is smallest at 0
    let p1 = relative_density(a, &b1)?.real_parts();
    let p2 = relative_density(a, &b2)?.real_parts();
    let mut translation = 0;
    let mut best = f64::INFINITY;
    for x in 0..g.cardinality() {
        let v = (p1[x] - alpha).abs() + (p2[x] - alpha).abs();
        if v < best - 1e-15 {
            best = v;
            translation = x;
        }
    }
    let a = a.translate(g.neg(translation));
    let sup1 = p1.iter().copied().fold(0.0, f64::max);
    let sup2 = p2.iter().copied().fold(0.0, f64::max);

    let (_, peak) = max_relative_density(&a, system)?;
    let mut split_identity_error: f64 = 0.0;
    let beta = crate::local::local_measure(system, 1.0)?;
    for prof in [&p1, &p2] {
        let shifted: Vec<f64> = (0..g.cardinality())
            .map(|x| prof[g.add(x, translation)] - alpha)
            .collect();
        let abs = GFunction::from_real(&g, &shifted.iter().map(|h| h.abs()).collect::<Vec<_>>())?;
        let plus = GFunction::from_real(
            &g,
            &shifted
                .iter()
                .map(|h| 2.0 * (h.abs() + h) / 2.0 - h)
                .collect::<Vec<_>>(),
        )?;
        let lhs = beta.smooth(&abs)?;
        let rhs = beta.smooth(&plus)?;
        split_identity_error = split_identity_error.max((lhs[peak] - rhs[peak]).norm());
    }

    let ind_a = GFunction::indicator(&a);
    let alpha1 = relative_density(&a, &b1)?[0].re;
    let alpha2 = relative_density(&a, &b2)?[0].re;
    let set1 = b1.materialize(1.0);
    let set2 = b2.materialize(1.0);
    let mu1 = b1.density();
    let mu2 = b2.density();
    let one1 = GFunction::indicator(&set1);
    let f1 = ind_a.map(|v| v - alpha1);
    let f2 = ind_a.map(|v| v - alpha2);
    let a1 = product(&ind_a, &set1)?;
    let a2 = product(&ind_a, &set2)?;
    let c1 = one1.scale(Complex64::from(alpha1));
    let f1b = product(&f1, &set1)?;
    let f2b = product(&f2, &set2)?;
    let c2 = GFunction::indicator(&set2).scale(Complex64::from(alpha2));

    let t0 = lam(&a1, &a2, &a1)?;
    let t1 = lam(&a1, &a2, &c1)?;
    let t2 = lam(&c1, &a2, &f1b)?;
    let t3 = lam(&f1b, &c2, &f1b)?;
    let t4 = lam(&f1b, &f2b, &f1b)?;
    let terms = [t0, t1, t2, t3, t4];
    let decomposition_error = (t0 - (t1 + t2 + t3 + t4)).abs();
    let scale = alpha2 * alpha1 * alpha1 * mu2 * mu1;

    let applicable = b1.is_regular() && 16.0 * b1.dimension() * lambda2 <= alpha1 / 4.0;
    let mut claims = Vec::new();
    for (label, gf) in [("1_A", &ind_a), ("f'", &f1)] {
        let gb = product(gf, &set1)?;
        let mean = gb.values().iter().map(|v| v.re).sum::<f64>() / set1.len() as f64;
        let value = lam(&gb, &a2, &one1)?;
        claims.push(ClaimCheck {
            label,
            applicable,
            lhs: (value - alpha2 * mean * mu2 * mu1).abs(),
            rhs: alpha2 * alpha1 * mu2 * mu1 / 4.0,
        });
    }

    let deviation = (mode == Mode::Paper
        && sup1 <= alpha * inc_small * (1.0 + 1e-12)
        && sup2 <= alpha * inc_small * (1.0 + 1e-12))
        .then(|| BoundCheck {
            value: best,
            bound: alpha / 512.0,
        });

    let full = GFunction::indicator(&a);
    let lambda_full = lam(&full, &full, &full)?;
    let mut cases = Vec::new();

    // lots of progressions
    let ap = match mode {
        Mode::Paper => CaseCertificate {
            case: CaseId::Aps,
            witness: None,
            lhs: lambda_full,
            log_rhs: 3.0 * alpha.ln() - 32f64.ln()
                + d * (3.0 * alpha.ln() - 44.0 * 2f64.ln() - 3.0 * (1.0 + d).ln())
                + 2.0 * log_mu,
            log_density: 0.0,
            log_density_bound: f64::NEG_INFINITY,
            bohr_dimension: None,
            degenerate: false,
        },
        Mode::Practical => CaseCertificate {
            case: CaseId::Aps,
            witness: None,
            lhs: t0,
            log_rhs: (scale / 4.0).ln(),
            log_density: 0.0,
            log_density_bound: f64::NEG_INFINITY,
            bohr_dimension: None,
            degenerate: false,
        },
    };
    cases.push(ap);

    let paper_bound = |log_bound: f64| {
        if mode == Mode::Paper {
            log_bound
        } else {
            f64::NEG_INFINITY
        }
    };

    // density increment I, witnessed by B'' or B'
    let bound1 =
        paper_bound(d * (2.0 * alpha.ln() - 25.0 * 2f64.ln() - 2.0 * (1.0 + d).ln()) + log_mu);
    for (witness, sup, mu) in [(&b2, sup2, mu2), (&b1, sup1, mu1)] {
        cases.push(CaseCertificate {
            case: CaseId::DensityI,
            witness: Some(witness.clone()),
            lhs: sup,
            log_rhs: (alpha * inc_small).ln(),
            log_density: mu.ln(),
            log_density_bound: bound1,
            bohr_dimension: None,
            degenerate: degenerate(witness),
        });
    }

    // density increment II
    let (_, b3) = b2.double().regular_dilate_below(tops[2])?;
    if degenerate(&b3) {
        underflow.push("B'''");
    }
    let (sup3, _) = max_relative_density(&a, &b3)?;
    cases.push(CaseCertificate {
        case: CaseId::DensityII,
        witness: Some(b3.clone()),
        lhs: sup3,
        log_rhs: (alpha * inc_large).ln(),
        log_density: b3.density().ln(),
        log_density_bound: paper_bound(
            (alpha / 4.0).ln()
                + d * (3.0 * alpha.ln() - 36.0 * 2f64.ln() - 3.0 * (1.0 + d).ln())
                + log_mu,
        ),
        bohr_dimension: None,
        degenerate: degenerate(&b3),
    });

    // density increment III
    let eps = if alpha2 < 1.0 {
        alpha1 / (32.0 * (1.0 - alpha2))
    } else {
        f64::INFINITY
    };
    if !(eps > 0.0 && eps <= 1.0) {
        skipped.push(format!("density3: ε = {eps} outside (0, 1]"));
    } else {
        match local_bessel(&f2, &b2, eps) {
            Ok(report) => {
                let d_tilde = 2.0 * report.lambda.len() as f64;
                let joint = intersect(&[report.bohr_part.double(), b2.double()])?
                    .with_dimension(2.0 * (ledger.base + ledger.extra + d_tilde))?;
                let (_, b4) = joint.regular_dilate_below(tops[3])?;
                if degenerate(&b4) {
                    underflow.push("B''''");
                }
                let (sup4, _) = max_relative_density(&a, &b4)?;
                let cap = 8192.0 * alpha.powi(-3);
                let log_bound = (alpha / 4.0).ln()
                    + cap * (3.0 * alpha.ln() - 22.0 * 2f64.ln() - (1.0 + d).ln())
                    + d * (5.0 * alpha.ln() - 48.0 * 2f64.ln() - 3.0 * (1.0 + d).ln())
                    + log_mu;
                cases.push(CaseCertificate {
                    case: CaseId::DensityIII,
                    witness: Some(b4.clone()),
                    lhs: sup4,
                    log_rhs: (alpha * inc_large).ln(),
                    log_density: b4.density().ln(),
                    log_density_bound: paper_bound(log_bound),
                    bohr_dimension: (mode == Mode::Paper).then_some(BoundCheck {
                        value: d_tilde,
                        bound: cap,
                    }),
                    degenerate: degenerate(&b4),
                });
            }
            Err(Error::Precondition(msg)) => skipped.push(format!("density3: {msg}")),
            Err(e) => return Err(e),
        }
    }

    Ok(ItlemReport {
        mode,
        alpha,
        dimension: d,
        lambda1,
        lambda2,
        b1,
        b2,
        translation,
        alpha1,
        alpha2,
        deviation,
        split_identity_error,
        terms,
        decomposition_error,
        scale,
        claims,
        lambda_full,
        cases,
        underflow,
        skipped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndReason {
    ApCase,
    AlphaExceedsOne,
    StepBudget,
    NoCase,
    Underflow,
}

impl fmt::Display for EndReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EndReason::ApCase => "ap_case",
            EndReason::AlphaExceedsOne => "alpha_exceeds_one",
            EndReason::StepBudget => "step_budget",
            EndReason::NoCase => "no_case",
            EndReason::Underflow => "underflow",
        })
    }
}

#[derive(Debug, Clone)]
pub struct TraceStep {
    pub k: usize,
    pub alpha: f64,
    pub dimension: f64,
    pub density: f64,
    pub case: CaseId,
    /// The inductive bounds on `d_k`, `α_k` and `δ_k`; paper mode only.
    pub invariants: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub mode: Mode,
    pub alpha: f64,
    pub dimension: f64,
    pub density: f64,
    pub steps: Vec<TraceStep>,
    pub end: EndReason,
    /// `Λ(1_A, 1_A, 1_A)`.
    pub lambda_full: f64,
    /// Logarithm of the lower bound certified by the final AP case.
    pub claimed_log_bound: Option<f64>,
}

impl IterationTrace {
    pub fn invariants_hold(&self) -> bool {
        self.steps.iter().all(|s| s.invariants != Some(false))
    }

    /// `α_{k+1} ≥ α_k` along the trace.
    pub fn monotone(&self) -> bool {
        self.steps
            .windows(2)
            .all(|w| w[1].alpha >= w[0].alpha - TOL)
    }

    pub fn claim_holds(&self) -> bool {
        self.claimed_log_bound
            .is_none_or(|b| self.lambda_full > 0.0 && self.lambda_full.ln() >= b - TOL)
    }

    /// Logarithm of the final lower bound
    /// `(α/2(1+d))^{2²⁴d ln α⁻¹ + 2⁵²α⁻³(ln α⁻¹)²} μ(B)²`.
    pub fn theorem_log_bound(&self) -> f64 {
        let (a, d) = (self.alpha, self.dimension);
        let l = (1.0 / a).ln();
        let exponent = 16777216.0 * d * l + 52f64.exp2() * a.powi(-3) * l * l;
        exponent * (a / (2.0 * (1.0 + d))).ln() + 2.0 * self.density.ln()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&format!(
                "{} {} {} {} {}\n",
                s.k, s.alpha, s.dimension, s.density, s.case
            ));
        }
        out.push_str(&format!("END {}\n", self.end));
        out
    }
}

fn paper_invariants(
    trace: &IterationTrace,
    k: usize,
    alpha_k: f64,
    d_k: f64,
    delta_k: f64,
) -> bool {
    let (a, d) = (trace.alpha, trace.dimension);
    let kf = k as f64;
    let dim_ok = d_k <= 2.0 * d + 16384.0 * a.powi(-3) * kf + TOL;
    let alpha_ok = alpha_k >= (1.0 + (-12f64).exp2()).powi(k as i32) * a * (1.0 - TOL);
    let exponent = (256.0 * d + 36f64.exp2() * a.powi(-3) * (1.0 / a).ln()) * kf;
    let log_bound = exponent * (a / (2.0 * (1.0 + d))).ln() + trace.density.ln();
    alpha_ok && dim_ok && delta_k.ln() >= log_bound - TOL
}

/// Iterate the dichotomy from `(A, ℬ)` for at most `budget` density steps.
pub fn run_increment(
    a: &GSet,
    system: &BourgainSystem,
    mode: Mode,
    budget: usize,
) -> Result<IterationTrace> {
    let alpha0 = validate(a, system)?;
    let full = GFunction::indicator(a);
    let mut trace = IterationTrace {
        mode,
        alpha: alpha0,
        dimension: system.dimension(),
        density: system.density(),
        steps: Vec::new(),
        end: EndReason::StepBudget,
        lambda_full: lam(&full, &full, &full)?,
        claimed_log_bound: None,
    };
    let (inc_small, _) = mode.increments();
    let mut ledger = DimensionLedger::standalone(system);
    let mut current = system.clone();
    for k in 0..=budget {
        let report = itlem_evaluate_with(a, &current, mode, ledger)?;
        let alpha_k = report.alpha;
        if mode == Mode::Paper && inc_small.powi(k as i32) * alpha0 > 1.0 + TOL {
            trace.end = EndReason::AlphaExceedsOne;
            return Ok(trace);
        }
        let invariants = (mode == Mode::Paper)
            .then(|| paper_invariants(&trace, k, alpha_k, current.dimension(), current.density()));
        let mut step = TraceStep {
            k,
            alpha: alpha_k,
            dimension: current.dimension(),
            density: current.density(),
            case: CaseId::Aps,
            invariants,
        };
        if let Some(ap) = report.certificate(CaseId::Aps) {
            trace.claimed_log_bound = Some(ap.log_rhs);
            trace.steps.push(step);
            trace.end = EndReason::ApCase;
            return Ok(trace);
        }
        if k == budget {
            break;
        }
        let Some(cert) = report.certificates().find(|c| c.case != CaseId::Aps) else {
            trace.end = if report.is_underflow() {
                EndReason::Underflow
            } else {
                EndReason::NoCase
            };
            return Ok(trace);
        };
        step.case = cert.case;
        trace.steps.push(step);
        if cert.case == CaseId::DensityIII {
            let d_tilde = cert
                .witness
                .as_ref()
                .map_or(0.0, |w| w.dimension() / 2.0 - ledger.base - ledger.extra);
            ledger.extra += d_tilde;
        }
        current = cert.witness.clone().expect("density cases carry a witness");
    }
    trace.end = EndReason::StepBudget;
    Ok(trace)
}
