//! Experiment drivers behind the CLI subcommands.
//!
//! Sampling work is split into independent trials, trial `t` drawing from
//! stream `t` of the configured seed, and aggregated with integer sums or
//! sorted before emission, so results do not depend on the worker count.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use satdiam::analytic::{
    self, certify_prop32, certify_prop33, certify_theorem, check_assumption_neg, diameter_exponent_certificate,
    expected_f_log, find_eps1, find_eps2, log_spaced_lambdas, DEFAULT_GRID, DEFAULT_TOL, THRESHOLD_WINDOW,
};
use satdiam::samplers::{sample_planted, sample_uniform_satisfiable, DEFAULT_MAX_TRIES};
use satdiam::{Enumerator, ModelPoint, RngStream, SamplerConfig};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Parameters shared by every command. Only the fields a command reads need to be set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentConfig {
    pub k: Option<usize>,
    pub eps: Option<f64>,
    pub c: Option<f64>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub grid: Option<usize>,
    pub max_tries: Option<u64>,
    pub y_min: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

fn missing(flag: &str) -> HarnessError {
    HarnessError::Config(format!("--{flag} is required"))
}

impl ExperimentConfig {
    pub fn k(&self) -> Result<usize> {
        self.k.ok_or_else(|| missing("k"))
    }

    pub fn n(&self) -> Result<usize> {
        self.n.ok_or_else(|| missing("n"))
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| missing("seed"))
    }

    pub fn trials(&self) -> Result<u64> {
        self.trials.ok_or_else(|| missing("trials"))
    }

    pub fn grid(&self) -> usize {
        self.grid.unwrap_or(DEFAULT_GRID)
    }

    pub fn max_tries(&self) -> u64 {
        self.max_tries.unwrap_or(DEFAULT_MAX_TRIES)
    }

    /// Exactly one of `eps` and `c` must be given.
    pub fn model_point(&self) -> Result<ModelPoint> {
        let k = self.k()?;
        match (self.eps, self.c) {
            (Some(eps), None) => Ok(ModelPoint::from_eps(k, eps)?),
            (None, Some(c)) => Ok(ModelPoint::from_density(k, c)?),
            (Some(_), Some(_)) => Err(HarnessError::Config("give only one of --eps and --c".into())),
            (None, None) => Err(HarnessError::Config("one of --eps and --c is required".into())),
        }
    }

    /// `m` when given, otherwise `round(c n)` from the model point. Both must agree when given.
    pub fn clause_count(&self) -> Result<usize> {
        let n = self.n()?;
        let derived = if self.eps.is_some() || self.c.is_some() {
            Some((self.model_point()?.c() * n as f64).round() as usize)
        } else {
            None
        };
        match (self.m, derived) {
            (Some(m), Some(d)) if m != d => {
                Err(HarnessError::Config(format!("--m {m} disagrees with the density, which gives {d}")))
            }
            (Some(m), _) => Ok(m),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(HarnessError::Config("one of --m, --c and --eps is required".into())),
        }
    }

    pub fn sampler_config(&self) -> Result<SamplerConfig> {
        let cfg = SamplerConfig::new(self.n()?, self.clause_count()?, self.k()?);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveReport {
    pub k: usize,
    pub eps: f64,
    pub c: f64,
    pub grid: usize,
    pub points: Vec<(f64, f64)>,
}

impl CurveReport {
    /// Largest sampled `(x, f*)` with `lo <= x <= hi`.
    pub fn sup_on(&self, lo: f64, hi: f64) -> Option<(f64, f64)> {
        self.points
            .iter()
            .copied()
            .filter(|&(x, _)| (lo..=hi).contains(&x))
            .fold(None, |best, p| match best {
                Some((_, v)) if v >= p.1 => best,
                _ => Some(p),
            })
    }

    pub fn window_sup(&self) -> Option<(f64, f64)> {
        self.sup_on(THRESHOLD_WINDOW.0, THRESHOLD_WINDOW.1)
    }
}

pub fn run_curve(cfg: &ExperimentConfig) -> Result<CurveReport> {
    let model = cfg.model_point()?;
    let grid = cfg.grid.unwrap_or(512);
    let curve = analytic::RateCurve::sample(model, grid)?;
    Ok(CurveReport { k: model.k(), eps: model.eps(), c: model.c(), grid, points: curve.points })
}

/// A certificate flattened for emission. Non-finite values become `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub name: String,
    pub passed: bool,
    pub worst_x: Option<f64>,
    pub margin: Option<f64>,
    pub grid_size: usize,
    pub extras: Vec<(String, f64)>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl From<&satdiam::Certificate> for CertificateRecord {
    fn from(c: &satdiam::Certificate) -> Self {
        Self {
            name: c.name.clone(),
            passed: c.passed,
            worst_x: finite(c.worst_x),
            margin: finite(c.margin),
            grid_size: c.grid_size,
            extras: c.extras.iter().filter(|(_, v)| v.is_finite()).cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremRecord {
    pub k: usize,
    pub eps: f64,
    pub in_regime: bool,
    pub certificates: Vec<CertificateRecord>,
    pub w_numeric_rate: f64,
    pub w_maximizer: f64,
    pub w_exponent: f64,
    pub f_exponent: f64,
    pub combined_exponent: f64,
    pub target_exponent: f64,
    pub combined_ok: bool,
    pub passed: bool,
}

impl From<&satdiam::TheoremCertificate> for TheoremRecord {
    fn from(t: &satdiam::TheoremCertificate) -> Self {
        let mut certificates: Vec<CertificateRecord> = t.certificates().iter().map(|c| (*c).into()).collect();
        certificates[1].name = "prop33_at_radius".into();
        certificates[2].name = "prop33_range".into();
        Self {
            k: t.k,
            eps: t.eps,
            in_regime: t.in_regime,
            certificates,
            w_numeric_rate: t.w.numeric_rate,
            w_maximizer: t.w.maximizer,
            w_exponent: t.w_exponent,
            f_exponent: t.f_exponent,
            combined_exponent: t.combined_exponent,
            target_exponent: t.target_exponent,
            combined_ok: t.combined_ok,
            passed: t.passed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertifyKind {
    Prop32,
    Prop33,
    Theorem,
    Diameter,
    Assumption,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CertifyReport {
    Single(CertificateRecord),
    Theorem(TheoremRecord),
}

impl CertifyReport {
    pub fn passed(&self) -> bool {
        match self {
            Self::Single(c) => c.passed,
            Self::Theorem(t) => t.passed,
        }
    }
}

/// `prop33` checks 1000 log-spaced radii, or `--grid` of them when given.
pub fn run_certify(kind: CertifyKind, cfg: &ExperimentConfig) -> Result<CertifyReport> {
    let k = cfg.k()?;
    let single = |c: satdiam::Certificate| Ok(CertifyReport::Single((&c).into()));
    match kind {
        CertifyKind::Prop32 => single(certify_prop32(k, cfg.model_point()?.eps(), cfg.grid())?),
        CertifyKind::Prop33 => {
            let lambdas = log_spaced_lambdas::<f64>(k, cfg.grid.unwrap_or(1000));
            single(certify_prop33(k, cfg.model_point()?.eps(), &lambdas)?)
        }
        CertifyKind::Theorem => {
            let t = certify_theorem(k, cfg.model_point()?.eps())?;
            Ok(CertifyReport::Theorem((&t).into()))
        }
        CertifyKind::Diameter => {
            let y_min = cfg.y_min.ok_or_else(|| missing("y-min"))?;
            single(diameter_exponent_certificate(&cfg.model_point()?, y_min, cfg.grid())?)
        }
        CertifyKind::Assumption => single(check_assumption_neg(k, cfg.model_point()?.eps(), cfg.grid())?),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub k: usize,
    pub eps1: f64,
    pub eps2: f64,
    /// `eps1 - eps2`.
    pub gap: f64,
    pub assumption_check: CertificateRecord,
    pub passed: bool,
}

pub fn run_thresholds(cfg: &ExperimentConfig) -> Result<ThresholdReport> {
    let k = cfg.k()?;
    if k < 3 {
        return Err(satdiam::Error::Precondition(format!("thresholds need k >= 3, got {k}")).into());
    }
    let eps1 = find_eps1(k, DEFAULT_TOL)?;
    let eps2 = find_eps2(k, DEFAULT_TOL)?;
    let assumption = check_assumption_neg(k, eps2, cfg.grid())?;
    let gap = eps1 - eps2;
    Ok(ThresholdReport {
        k,
        eps1,
        eps2,
        gap,
        passed: gap > 0.0 && assumption.passed,
        assumption_check: (&assumption).into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McPlantedRow {
    pub d: usize,
    pub empirical_mean: f64,
    pub exact: f64,
    pub std_err: f64,
    /// `|empirical - exact| > 3 std_err`.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McPlantedReport {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub trials: u64,
    pub seed: u64,
    pub rows: Vec<McPlantedRow>,
}

impl McPlantedReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| !r.flagged)
    }
}

pub fn run_mc_planted(cfg: &ExperimentConfig) -> Result<McPlantedReport> {
    let sc = cfg.sampler_config()?;
    let (seed, trials) = (cfg.seed()?, cfg.trials()?);
    if trials < 2 {
        return Err(HarnessError::Config("--trials must be at least 2".into()));
    }
    let n = sc.n;
    let enumerator = Enumerator::default();
    if n > enumerator.max_vars {
        return Err(satdiam::Error::EnumerationBound { n, bound: enumerator.max_vars }.into());
    }
    let zero = || (vec![0u128; n + 1], vec![0u128; n + 1]);
    let (sum, sq) = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<_> {
            let inst = sample_planted(&sc, &mut RngStream::new(seed, t))?;
            let counts = enumerator.distance_profile(inst.formula(), inst.planted())?.to_u64();
            let sum: Vec<u128> = counts.iter().map(|&c| u128::from(c)).collect();
            let sq = sum.iter().map(|&c| c * c).collect();
            Ok((sum, sq))
        })
        .try_reduce(zero, |(mut a, mut b), (c, d)| {
            a.iter_mut().zip(c).for_each(|(x, y)| *x += y);
            b.iter_mut().zip(d).for_each(|(x, y)| *x += y);
            Ok((a, b))
        })?;
    let tf = trials as f64;
    let rows = (0..=n)
        .map(|d| -> Result<McPlantedRow> {
            let empirical_mean = sum[d] as f64 / tf;
            // t * sum(x^2) - (sum x)^2 is exact in integers
            let centred = u128::from(trials) * sq[d] - sum[d] * sum[d];
            let std_err = (centred as f64 / (tf * tf * (tf - 1.0))).sqrt();
            let exact = expected_f_log::<f64>(d, n, sc.k, sc.m)?.exp();
            let flagged = (empirical_mean - exact).abs() > 3.0 * std_err;
            Ok(McPlantedRow { d, empirical_mean, exact, std_err, flagged })
        })
        .collect::<Result<_>>()?;
    Ok(McPlantedReport { n, k: sc.k, m: sc.m, trials, seed, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiameterSample {
    pub trial: u64,
    pub r_max: usize,
    pub solutions: usize,
    pub tries: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiameterReport {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub trials: u64,
    pub seed: u64,
    pub samples: Vec<DiameterSample>,
    /// Entry `r` counts accepted formulas with `r_max = r`.
    pub histogram: Vec<u64>,
    /// Accepted formulas over total draws.
    pub acceptance_rate: f64,
    pub mean_solution_count: f64,
}

impl DiameterReport {
    /// Every accepted formula has a solution and the histogram covers every sample.
    pub fn well_formed(&self) -> bool {
        self.samples.iter().all(|s| s.solutions > 0 && s.r_max <= self.n)
            && self.histogram.len() == self.n + 1
            && self.histogram.iter().sum::<u64>() == self.trials
    }

    pub fn r_over_n(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.r_max as f64 / self.n as f64)
    }
}

pub fn run_mc_diameter(cfg: &ExperimentConfig) -> Result<DiameterReport> {
    let sc = cfg.sampler_config()?;
    let (seed, trials, max_tries) = (cfg.seed()?, cfg.trials()?, cfg.max_tries());
    let enumerator = Enumerator::default();
    let samples: Vec<DiameterSample> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<_> {
            let (f, tries) = sample_uniform_satisfiable(&sc, &mut RngStream::new(seed, t), max_tries)?;
            let sols = enumerator.all_satisfying(&f)?;
            Ok(DiameterSample { trial: t, r_max: enumerator.r_max(&f)?, solutions: sols.len(), tries })
        })
        .collect::<Result<_>>()?;
    let mut histogram = vec![0u64; sc.n + 1];
    for s in &samples {
        histogram[s.r_max] += 1;
    }
    let draws: u64 = samples.iter().map(|s| s.tries).sum();
    let total_solutions: u64 = samples.iter().map(|s| s.solutions as u64).sum();
    Ok(DiameterReport {
        n: sc.n,
        k: sc.k,
        m: sc.m,
        trials,
        seed,
        acceptance_rate: if draws == 0 { 0.0 } else { trials as f64 / draws as f64 },
        mean_solution_count: if trials == 0 { 0.0 } else { total_solutions as f64 / trials as f64 },
        samples,
        histogram,
    })
}
