//! Seeded verification suites. Each checked instance yields one
//! [`VerifyLine`]; lines come out in instance order whatever the thread
//! schedule.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bohr_bourgain::{
    dilate_density_bound, greedy_cover, intersect, intersection_density_bound, verify_axioms,
    BourgainSystem, Rule,
};
use crate::corpus::{self, Stream};
use crate::error::{Error, Result};
use crate::fourier::{
    convolve, fourier_transform, fourier_transform_naive, inner_product, inverse_transform,
    spectral_inner_product, GFunction,
};
use crate::freiman::embedding_map;
use crate::group::make_group;
use crate::increment::{itlem_evaluate, run_increment, CaseId, Mode};
use crate::local::{
    cotlar_check, default_eta_grid, haar_defect, l2_increment_check, local_bessel,
    smoothing_defect, spectral_containment,
};
use crate::sets::{
    count_ap3_brute, embed_interval, is_ap3_free, lambda3, restricted_core,
    select_core_representatives, sumset, GSet, LambdaMethod, ZSet,
};
use crate::spectrum::{bogolioubov_chang, dissociated_basis};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Fourier,
    Bohr,
    Bourgain,
    Local,
    Spectrum,
    Freiman,
    Increment,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Fourier,
        Suite::Bohr,
        Suite::Bourgain,
        Suite::Local,
        Suite::Spectrum,
        Suite::Freiman,
        Suite::Increment,
    ];
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Suite> {
        Ok(match s {
            "fourier" => Suite::Fourier,
            "bohr" => Suite::Bohr,
            "bourgain" => Suite::Bourgain,
            "local" => Suite::Local,
            "spectrum" => Suite::Spectrum,
            "freiman" => Suite::Freiman,
            "increment" => Suite::Increment,
            "all" => Suite::All,
            _ => return Err(Error::Parse(format!("unknown suite {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyLine {
    pub lemma: &'static str,
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl fmt::Display for VerifyLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}",
            self.lemma, self.instance, self.lhs, self.rhs, verdict
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub tol: f64,
    /// Instances per suite.
    pub count: usize,
    pub max_group: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 42,
            tol: 1e-9,
            count: 40,
            max_group: 512,
        }
    }
}

struct Lines {
    tol: f64,
    out: Vec<VerifyLine>,
}

impl Lines {
    fn new(tol: f64) -> Lines {
        Lines {
            tol,
            out: Vec::new(),
        }
    }

    fn push(&mut self, lemma: &'static str, instance: &str, lhs: f64, rhs: f64, pass: bool) {
        self.out.push(VerifyLine {
            lemma,
            instance: instance.to_string(),
            lhs,
            rhs,
            pass,
        });
    }

    /// `lhs ≤ rhs` up to the tolerance.
    fn le(&mut self, lemma: &'static str, instance: &str, lhs: f64, rhs: f64) {
        let pass = lhs <= rhs + self.tol;
        self.push(lemma, instance, lhs, rhs, pass);
    }

    fn ge(&mut self, lemma: &'static str, instance: &str, lhs: f64, rhs: f64) {
        let pass = lhs >= rhs - self.tol;
        self.push(lemma, instance, lhs, rhs, pass);
    }

    fn truth(&mut self, lemma: &'static str, instance: &str, ok: bool) {
        self.push(lemma, instance, f64::from(u8::from(ok)), 1.0, ok);
    }
}

type InstanceFn = fn(&mut ChaCha8Rng, usize, &VerifyConfig, &mut Lines) -> Result<()>;

fn run_instances(config: &VerifyConfig, stream: Stream, f: InstanceFn) -> Result<Vec<VerifyLine>> {
    let chunks: Vec<Vec<VerifyLine>> = (0..config.count)
        .into_par_iter()
        .map(|i| {
            let mut rng = corpus::instance(config.seed, stream, i as u64);
            let mut lines = Lines::new(config.tol);
            f(&mut rng, i, config, &mut lines)?;
            Ok(lines.out)
        })
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

pub fn run_suite(suite: Suite, config: &VerifyConfig) -> Result<Vec<VerifyLine>> {
    match suite {
        Suite::All => {
            let mut out = Vec::new();
            for s in Suite::EACH {
                out.extend(run_suite(s, config)?);
            }
            Ok(out)
        }
        Suite::Fourier => run_instances(config, Stream::Fourier, fourier_instance),
        Suite::Bohr => run_instances(config, Stream::Bohr, bohr_instance),
        Suite::Bourgain => run_instances(config, Stream::Bourgain, bourgain_instance),
        Suite::Local => run_instances(config, Stream::Local, local_instance),
        Suite::Spectrum => run_instances(config, Stream::Spectrum, spectrum_instance),
        Suite::Freiman => run_instances(config, Stream::Freiman, freiman_instance),
        Suite::Increment => run_instances(config, Stream::Increment, increment_instance),
    }
}

fn fourier_instance(
    rng: &mut ChaCha8Rng,
    i: usize,
    cfg: &VerifyConfig,
    out: &mut Lines,
) -> Result<()> {
    let g = corpus::random_group(rng, cfg.max_group);
    let id = format!("#{i} G={g}");
    let f = corpus::random_function(rng, &g);
    let h = corpus::random_function(rng, &g);
    let fh = fourier_transform(&f);
    let hh = fourier_transform(&h);
    out.le(
        "fourier.roundtrip",
        &id,
        inverse_transform(&fh).distance(&f)?,
        0.0,
    );
    let plancherel = (inner_product(&f, &h)? - spectral_inner_product(&fh, &hh)?).norm();
    out.le("fourier.plancherel", &id, plancherel, 0.0);
    out.le(
        "fourier.convolution",
        &id,
        fourier_transform(&convolve(&f, &h)?).distance(&(&fh * &hh))?,
        0.0,
    );
    out.le(
        "fourier.naive",
        &id,
        fh.distance(&fourier_transform_naive(&f))?,
        0.0,
    );
    if g.cardinality() <= 256 {
        let k = corpus::random_function(rng, &g);
        let direct = lambda3(&f, &h, &k, LambdaMethod::Direct)?;
        let fast = lambda3(&f, &h, &k, LambdaMethod::Fourier)?;
        out.le("lambda.methods", &id, (direct - fast).norm(), 0.0);
    }
    let p = rng.random_range(0.05..0.6);
    let a = corpus::random_set(rng, &g, p);
    let ind = GFunction::indicator(&a);
    let n = g.cardinality() as f64;
    let scaled = n * n * lambda3(&ind, &ind, &ind, LambdaMethod::Fourier)?.re;
    let brute = count_ap3_brute(&a).total as f64;
    out.le("lambda.count", &id, (scaled - brute).abs(), 1e-6);
    Ok(())
}

fn bohr_instance(
    rng: &mut ChaCha8Rng,
    i: usize,
    cfg: &VerifyConfig,
    out: &mut Lines,
) -> Result<()> {
    let g = corpus::random_group(rng, cfg.max_group);
    let s = corpus::random_bohr(rng, &g, 4);
    let Rule::Bohr(desc) = s.rule() else {
        unreachable!()
    };
    let k = desc.frequencies().len() as i32;
    let id = format!("#{i} {s}");
    let density = s.density();
    let bound = desc.delta().powi(k);
    out.push("bohr.size", &id, density, bound, density >= bound);
    let cover = greedy_cover(&s.materialize(2.0), &s.materialize(1.0))?.len() as f64;
    let cap = 4f64.powi(k);
    out.push("bohr.cover", &id, cover, cap, cover <= cap);
    Ok(())
}

fn bourgain_instance(
    rng: &mut ChaCha8Rng,
    i: usize,
    cfg: &VerifyConfig,
    out: &mut Lines,
) -> Result<()> {
    let g = corpus::random_group(rng, cfg.max_group.min(256));
    let s = corpus::random_system(rng, &g);
    let id = format!("#{i} {s}");
    let cert = verify_axioms(&s, &crate::bohr_bourgain::default_grid())?;
    out.push(
        "bourgain.axioms",
        &id,
        cert.violations.len() as f64,
        0.0,
        cert.all_ok(),
    );

    let lambda = rng.random_range(0.05..=1.0);
    let dilated = s.dilate(lambda)?;
    out.ge(
        "bourgain.dilate",
        &format!("{id} lambda={lambda}"),
        dilated.density(),
        dilate_density_bound(&s, lambda),
    );

    let other = corpus::random_system(rng, &g);
    let pair = [s.clone(), other.clone()];
    let joint = intersect(&pair)?;
    let jid = format!("#{i} {joint}");
    out.ge(
        "bourgain.join",
        &jid,
        joint.density(),
        intersection_density_bound(&pair),
    );
    let want = 2.0 * (s.dimension() + other.dimension());
    out.push(
        "bourgain.join_dimension",
        &jid,
        joint.dimension(),
        want,
        joint.dimension() == want,
    );

    let (lambda, reg) = s.regular_dilate()?;
    let ok = (0.5..1.0).contains(&lambda) && reg.is_regular();
    out.push("bourgain.regular", &id, lambda, 0.5, ok);
    Ok(())
}

fn local_instance(
    rng: &mut ChaCha8Rng,
    i: usize,
    cfg: &VerifyConfig,
    out: &mut Lines,
) -> Result<()> {
    let g = corpus::random_group(rng, cfg.max_group.min(256));
    let s = corpus::random_regular(rng, &g);
    let id = format!("#{i} {s}");
    let values: Vec<f64> = (0..g.cardinality())
        .map(|_| rng.random_range(-1.0..=1.0))
        .collect();
    let f = GFunction::from_real(&g, &values)?;
    for eta in default_eta_grid() {
        let eid = format!("{id} eta={eta}");
        let mut worst = 0.0f64;
        let mut bound = 0.0;
        for y in s.materialize(eta).iter() {
            let c = haar_defect(&s, y, eta)?;
            worst = worst.max(c.value);
            bound = c.bound;
        }
        out.le("local.haar", &eid, worst, bound);
        let c = smoothing_defect(&s, &f, eta)?;
        out.le("local.continuity", &eid, c.value, c.bound);
        for kappa in [0.5, 0.25] {
            let r = spectral_containment(&s, kappa, eta)?;
            out.push("local.containment", &eid, r.worst, r.radius, r.holds());
        }
    }

    let dim = rng.random_range(1..=12);
    let mut vec_of = || -> Vec<Complex64> {
        (0..dim)
            .map(|_| Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
            .collect()
    };
    let v = vec_of();
    let ws: Vec<Vec<Complex64>> = (0..5).map(|_| vec_of()).collect();
    let (lhs, rhs) = cotlar_check(&v, &ws)?;
    out.le(
        "local.cotlar",
        &format!("#{i} dim={dim}"),
        lhs,
        rhs * (1.0 + 1e-12),
    );

    let eps = [0.25, 0.5, 1.0][i % 3];
    match local_bessel(&f, &s, eps) {
        Ok(r) => {
            let bid = format!("{id} eps={eps}");
            out.le(
                "local.bessel_size",
                &bid,
                r.lambda.len() as f64,
                r.lambda_bound,
            );
            out.truth(
                "local.bessel_containment",
                &bid,
                r.containment_ok && r.s_containment_ok,
            );
            out.le("local.bessel_energy", &bid, r.energy.value, r.energy.bound);
            out.truth("local.bessel_separated", &bid, r.separated);
        }
        Err(Error::Precondition(_)) => {}
        Err(e) => return Err(e),
    }

    let a = {
        let p = rng.random_range(0.1..0.7);
        corpus::random_nonempty_set(rng, &g, p)
    };
    let c = rng.random_range(0.1..=1.0);
    let alpha = a.intersection(&s.materialize(1.0))?.density() / s.density();
    if alpha > 0.0 {
        let eta = c * alpha / (1024.0 * (1.0 + s.dimension()));
        let sub = s.dilate(eta.min(1.0))?;
        let r = l2_increment_check(&a, &s, &sub, c)?;
        out.truth(
            "local.l2increment",
            &format!("{id} c={c}"),
            r.implication_holds(),
        );
    }
    Ok(())
}

/// A set with small doubling: a union of few translates of a Bohr set or a
/// subgroup-like progression.
fn small_doubling_set(rng: &mut ChaCha8Rng, max: usize) -> GSet {
    let g = corpus::random_odd_cyclic(rng, 31, max.min(511) as u64);
    let n = g.cardinality();
    let len = rng.random_range(3..=n / 4);
    let step = loop {
        let s = rng.random_range(1..n);
        if num_integer::gcd(s, n) == 1 {
            break s;
        }
    };
    let start = rng.random_range(0..n);
    GSet::from_predicate(&g, |x| (0..len).any(|j| (start + j * step) % n == x))
}

fn spectrum_instance(
    rng: &mut ChaCha8Rng,
    i: usize,
    cfg: &VerifyConfig,
    out: &mut Lines,
) -> Result<()> {
    let g = corpus::random_group(rng, cfg.max_group.min(256));
    let a = {
        let p = rng.random_range(0.1..0.6);
        corpus::random_nonempty_set(rng, &g, p)
    };
    let eps = [0.25, 0.5, 1.0][i % 3];
    let id = format!("#{i} G={g} |A|={} eps={eps}", a.len());
    match dissociated_basis(&a, eps) {
        Ok(r) => {
            out.truth("chang.cover", &id, r.covered);
            out.le("chang.size", &id, r.basis.len() as f64, r.size_bound);
        }
        Err(Error::BudgetExceeded(_)) => {}
        Err(e) => return Err(e),
    }

    let b = small_doubling_set(rng, cfg.max_group);
    let k = sumset(&b, &b)?.len() as f64 / b.len() as f64;
    let bid = format!("#{i} G={} |A|={} K={k}", b.group(), b.len());
    match bogolioubov_chang(&b, k) {
        Ok((_, r)) => {
            out.le("bg.dimension", &bid, r.dimension, r.dimension_bound);
            out.ge("bg.density", &bid, r.density.ln(), r.log_density_bound);
            out.ge("bg.sup", &bid, r.sup_density, 1.0 / (2.0 * k));
        }
        Err(Error::BudgetExceeded(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(())
}

fn freiman_instance(
    rng: &mut ChaCha8Rng,
    i: usize,
    cfg: &VerifyConfig,
    out: &mut Lines,
) -> Result<()> {
    let g = corpus::random_group(rng, cfg.max_group.min(128));
    let a = {
        let p = rng.random_range(0.05..0.6);
        corpus::random_set(rng, &g, p)
    };
    let b = {
        let p = rng.random_range(0.05..0.6);
        corpus::random_set(rng, &g, p)
    };
    let id = format!("#{i} G={g} A={} B={}", a.to_text(), b.to_text());
    let (s, holds) = restricted_core(&a, &b)?;
    out.truth("core.identity", &id, holds);
    let reps = select_core_representatives(&s);
    let doubled = s.doubled().len() as f64;
    out.push(
        "core.representatives",
        &id,
        reps.len() as f64,
        doubled,
        reps.len() as f64 == doubled,
    );
    out.truth("core.ap3_free", &id, is_ap3_free(&reps)?);

    let size = rng.random_range(2..=14);
    let elems: Vec<i64> = (0..size).map(|_| rng.random_range(-40..=40)).collect();
    let z = ZSet::new(elems);
    let emb = embed_interval(&z)?;
    let map = embedding_map(&emb, &z)?;
    let zid = format!("#{i} Z={}", z.to_text());
    out.truth("freiman.iso", &zid, map.is_freiman_iso()?);
    let report = map.ap3_transfer_check()?;
    out.push(
        "freiman.ap3_transfer",
        &zid,
        report.domain_count as f64,
        report.image_count as f64,
        report.holds(),
    );
    Ok(())
}

fn increment_instance(
    rng: &mut ChaCha8Rng,
    i: usize,
    _cfg: &VerifyConfig,
    out: &mut Lines,
) -> Result<()> {
    let g = corpus::random_odd_cyclic(rng, 31, 255);
    let sys = if i.is_multiple_of(2) {
        BourgainSystem::trivial(&g)
    } else {
        let gamma = rng.random_range(1..g.cardinality());
        BourgainSystem::bohr(&g, &[gamma], rng.random_range(0.3..=1.0))?
            .regular_dilate()?
            .1
    };
    let a = {
        let p = rng.random_range(0.3..0.8);
        corpus::random_nonempty_set(rng, &g, p)
    };
    let id = format!("#{i} A~{}/{} {sys}", a.len(), g.cardinality());
    let r = itlem_evaluate(&a, &sys, Mode::Paper)?;
    let n = r.certificates().count();
    out.push("itlem.conclusive", &id, n as f64, 1.0, r.conclusive());
    out.le("itlem.decomposition", &id, r.decomposition_error, 0.0);
    out.truth("itlem.split", &id, r.split().iter().any(|&b| b));
    for c in &r.claims {
        if c.applicable {
            out.le("itlem.claim", &format!("{id} g={}", c.label), c.lhs, c.rhs);
        }
    }
    if let Some(dev) = r.deviation {
        out.le("itlem.deviation", &id, dev.value, dev.bound);
    }
    if let Some(ap) = r.certificate(CaseId::Aps) {
        out.ge("itlem.ap_case", &id, ap.lhs.ln(), ap.log_rhs);
    }
    if i == 0 {
        let whole = make_group(&[g.cardinality() as u64])?;
        let t = run_increment(
            &GSet::full(&whole),
            &BourgainSystem::trivial(&whole),
            Mode::Practical,
            8,
        )?;
        let text = t.to_text();
        out.truth(
            "trace.whole_group",
            &format!("G={whole}"),
            t.steps.len() == 1 && text.ends_with("END ap_case\n"),
        );
    }
    Ok(())
}
