use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::radial::{gibbs_radial_sampler, RadialPotentialSpec};
use super::special::gamma_fn;
use crate::error::{Error, Result};
use crate::objectives::SearchBox;
use crate::rng::SeedStream;
use crate::sampler::{sample_batch, LogTarget, SamplerParams};
use crate::stats::{fit_line, integrate, ks_two_sample, mean, median, standard_error, LineFit};

/// Least-squares fit of `log statistic` against `log theta`.
pub type RateFitResult = LineFit;

/// One measured quantity with optional acceptance bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub label: String,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Measurement {
    fn info(label: impl Into<String>, value: f64) -> Self {
        Self { label: label.into(), value, lower: None, upper: None }
    }

    fn at_most(label: impl Into<String>, value: f64, upper: f64) -> Self {
        Self { label: label.into(), value, lower: None, upper: Some(upper) }
    }

    fn within(label: impl Into<String>, value: f64, lower: f64, upper: f64) -> Self {
        Self { label: label.into(), value, lower: Some(lower), upper: Some(upper) }
    }

    /// A NaN value never passes a bounded measurement.
    pub fn passed(&self) -> bool {
        self.lower.is_none_or(|l| self.value >= l) && self.upper.is_none_or(|u| self.value <= u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryCheckReport {
    pub name: String,
    pub measurements: Vec<Measurement>,
    pub replicates: usize,
    pub passed: bool,
}

impl TheoryCheckReport {
    fn new(name: &str, measurements: Vec<Measurement>, replicates: usize) -> Self {
        let passed = measurements.iter().all(Measurement::passed);
        Self { name: name.into(), measurements, replicates, passed }
    }

    pub fn get(&self, label: &str) -> Option<&Measurement> {
        self.measurements.iter().find(|m| m.label == label)
    }
}

impl fmt::Display for TheoryCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        writeln!(f, "{} {} (replicates: {})", self.name, verdict, self.replicates)?;
        for m in &self.measurements {
            let bound = match (m.lower, m.upper) {
                (Some(l), Some(u)) => format!(" in [{l:.6e}, {u:.6e}]"),
                (Some(l), None) => format!(" >= {l:.6e}"),
                (None, Some(u)) => format!(" <= {u:.6e}"),
                (None, None) => String::new(),
            };
            let mark = if m.lower.is_some() || m.upper.is_some() {
                if m.passed() { " ok" } else { " VIOLATED" }
            } else {
                ""
            };
            writeln!(f, "  {} = {:.6e}{}{}", m.label, m.value, bound, mark)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckId {
    Lemma21,
    Th24,
    Th28,
    Th29,
    Th45,
}

impl CheckId {
    pub const ALL: [CheckId; 5] = [CheckId::Lemma21, CheckId::Th24, CheckId::Th28, CheckId::Th29, CheckId::Th45];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::Lemma21 => "lemma21",
            CheckId::Th24 => "th24",
            CheckId::Th28 => "th28",
            CheckId::Th29 => "th29",
            CheckId::Th45 => "th45",
        }
    }

    /// Parses a single identifier or `all`.
    pub fn parse_selection(s: &str) -> Result<Vec<CheckId>> {
        if s == "all" {
            Ok(Self::ALL.to_vec())
        } else {
            Ok(vec![s.parse()?])
        }
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown theory check '{s}'")))
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Runs a check with its default configuration on `stream.split(id)`.
pub fn run_check(id: CheckId, stream: &SeedStream) -> Result<TheoryCheckReport> {
    let s = stream.split(id.as_str());
    match id {
        CheckId::Lemma21 => check_lemma_tail_bound(&Triangular, &TailBoundConfig::default(), &s),
        CheckId::Th24 => check_sup_rate(&SupRateConfig::default(), &s),
        CheckId::Th28 => check_min_gap(&MinGapConfig::default(), &s),
        CheckId::Th29 => check_concentration(&ConcentrationConfig::default(), &s).map(|(r, _)| r),
        CheckId::Th45 => check_sampler_fidelity(&FidelityConfig::default(), &s),
    }
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    (mean(xs), if xs.len() > 1 { standard_error(xs) } else { 0.0 })
}

// ---------------------------------------------------------------------------------
// sup rate

/// Limit of `N^(2/d) (E gap^p)^(1/p)` for a density with a non-degenerate maximum:
/// `Gamma(2p/d + 1)^(1/p) Gamma(d/2 + 1)^(2/d) (m_f / f*)^(2/d) kappa_f / (2 pi)`.
pub fn sup_rate_constant(dim: usize, p: f64, mass_ratio: f64, kappa: f64) -> Result<f64> {
    let d = dim as f64;
    Ok(gamma_fn(2.0 * p / d + 1.0)?.powf(1.0 / p) * gamma_fn(d / 2.0 + 1.0)?.powf(2.0 / d) * mass_ratio.powf(2.0 / d)
        * kappa
        / (2.0 * PI))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupRateConfig {
    pub n_grid: Vec<usize>,
    pub replicates: usize,
    /// Relative band around `1 / (2 pi)` accepted at the largest `N`.
    pub rel_tol: f64,
}

impl Default for SupRateConfig {
    fn default() -> Self {
        Self { n_grid: vec![10, 100, 1000, 10_000], replicates: 2000, rel_tol: 0.25 }
    }
}

/// `N E[f* - max_n f(X_n)]` for the standard Gaussian density in two dimensions.
pub fn check_sup_rate(cfg: &SupRateConfig, stream: &SeedStream) -> Result<TheoryCheckReport> {
    if cfg.n_grid.is_empty() || cfg.replicates == 0 {
        return Err(Error::InvalidParameter("sup-rate check needs a non-empty N grid and replicates".into()));
    }
    let f_star = 1.0 / (2.0 * PI);
    let mut measurements = Vec::new();
    let mut gaps = Vec::new();
    for &n in &cfg.n_grid {
        let s = stream.index(n as u64);
        let samples: Vec<f64> = (0..cfg.replicates)
            .into_par_iter()
            .map(|r| {
                let mut rng = s.index(r as u64).rng();
                let min_r2 = (0..n)
                    .map(|_| {
                        let a: f64 = rng.sample(StandardNormal);
                        let b: f64 = rng.sample(StandardNormal);
                        a * a + b * b
                    })
                    .fold(f64::INFINITY, f64::min);
                -f_star * (-0.5 * min_r2).exp_m1()
            })
            .collect();
        let (m, se) = mean_and_se(&samples);
        gaps.push(m);
        measurements.push(Measurement::info(format!("N={n}: E gap"), m));
        measurements.push(Measurement::info(format!("N={n}: N * E gap"), n as f64 * m));
        measurements.push(Measurement::info(format!("N={n}: N * SE"), n as f64 * se));
    }
    let constant = sup_rate_constant(2, 1.0, 1.0, 1.0)?;
    measurements.push(Measurement::within("rate constant", constant, f_star - 1e-12, f_star + 1e-12));
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    measurements.push(Measurement::within("E gap decreasing in N", f64::from(u8::from(decreasing)), 1.0, 1.0));
    let n_max = *cfg.n_grid.iter().max().unwrap_or(&1);
    let idx = cfg.n_grid.iter().position(|&n| n == n_max).unwrap_or(0);
    measurements.push(Measurement::within(
        format!("N={n_max}: rate statistic"),
        n_max as f64 * gaps[idx],
        (1.0 - cfg.rel_tol) * constant,
        (1.0 + cfg.rel_tol) * constant,
    ));
    Ok(TheoryCheckReport::new("th24", measurements, cfg.replicates))
}

// ---------------------------------------------------------------------------------
// min gap

#[derive(Debug, Clone, PartialEq)]
pub struct MinGapConfig {
    /// Potential `kappa |x|^m`; the two-sided growth constants both equal `kappa`.
    pub spec: RadialPotentialSpec,
    pub n: usize,
    pub p: f64,
    pub replicates: usize,
}

impl Default for MinGapConfig {
    fn default() -> Self {
        Self {
            spec: RadialPotentialSpec { dim: 3, m: 2.0, kappa: 1.0, theta: 1e3 },
            n: 20,
            p: 1.0,
            replicates: 500,
        }
    }
}

/// Bound `d / (theta m) + exp(-N (kappa0 / kappa1)^(d/m) / (2p))` on `|| 1 - exp(-min U) ||_p`.
pub fn min_gap_bound(spec: &RadialPotentialSpec, n: usize, p: f64, kappa_ratio: f64) -> f64 {
    spec.dim as f64 / (spec.theta * spec.m) + (-(n as f64) * kappa_ratio.powf(spec.shape()) / (2.0 * p)).exp()
}

/// `(E[(1 - exp(-min_n U(X_n)))^p])^(1/p)` under exact Gibbs draws against [`min_gap_bound`].
pub fn check_min_gap(cfg: &MinGapConfig, stream: &SeedStream) -> Result<TheoryCheckReport> {
    cfg.spec.check()?;
    if cfg.n == 0 || cfg.replicates == 0 || !(cfg.p >= 1.0) {
        return Err(Error::InvalidParameter("min-gap check needs N >= 1, replicates >= 1 and p >= 1".into()));
    }
    let ys: Vec<f64> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            let draws = gibbs_radial_sampler(&cfg.spec, cfg.n, &stream.index(r as u64))?;
            let min_u = draws.iter().map(|x| cfg.spec.potential(x)).fold(f64::INFINITY, f64::min);
            Ok((-(-min_u).exp_m1()).powf(cfg.p))
        })
        .collect::<Result<_>>()?;
    let (m, se) = mean_and_se(&ys);
    // delta method for the p-th root
    let stat = m.powf(1.0 / cfg.p);
    let stat_se = if m > 0.0 { se * stat / (cfg.p * m) } else { se };
    let bound = min_gap_bound(&cfg.spec, cfg.n, cfg.p, 1.0);
    let measurements = vec![
        Measurement::info("theta bound term d/(theta m)", cfg.spec.dim as f64 / (cfg.spec.theta * cfg.spec.m)),
        Measurement::info("bound", bound),
        Measurement::info("standard error", stat_se),
        Measurement::at_most("L^p norm of 1 - exp(-min U)", stat, bound + 3.0 * stat_se),
    ];
    Ok(TheoryCheckReport::new("th28", measurements, cfg.replicates))
}

// ---------------------------------------------------------------------------------
// concentration

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationConfig {
    pub dim: usize,
    pub thetas: Vec<f64>,
    pub draws: usize,
    /// Expected slope of `log E|X|` is `-1/m`; accepted within this distance.
    pub slope_tol: f64,
    pub moment_theta: f64,
    pub moment_draws: usize,
    pub moment_rel_tol: f64,
}

impl Default for ConcentrationConfig {
    fn default() -> Self {
        Self {
            dim: 5,
            thetas: vec![10.0, 100.0, 1e3, 1e4],
            draws: 100_000,
            slope_tol: 0.05,
            moment_theta: 100.0,
            moment_draws: 1_000_000,
            moment_rel_tol: 0.02,
        }
    }
}

/// Decay of `E|X_theta|^p`, `p in {1, 2}`, for `U = |x|^2` under exact Gibbs draws.
///
/// Returns the report and the fit for `p = 1`.
pub fn check_concentration(cfg: &ConcentrationConfig, stream: &SeedStream) -> Result<(TheoryCheckReport, RateFitResult)> {
    if cfg.thetas.len() < 2 || cfg.draws == 0 || cfg.moment_draws == 0 {
        return Err(Error::InvalidParameter("concentration check needs two thetas and positive draw counts".into()));
    }
    let mut log_t = Vec::new();
    let mut log_m1 = Vec::new();
    let mut log_m2 = Vec::new();
    let mut measurements = Vec::new();
    for (i, &theta) in cfg.thetas.iter().enumerate() {
        let spec = RadialPotentialSpec::new(cfg.dim, 2.0, 1.0, theta)?;
        let xs = gibbs_radial_sampler(&spec, cfg.draws, &stream.index(i as u64))?;
        let sq: Vec<f64> = xs.iter().map(|x| x.iter().map(|v| v * v).sum()).collect();
        let m1 = sq.iter().map(|s| s.sqrt()).sum::<f64>() / sq.len() as f64;
        let m2 = mean(&sq);
        measurements.push(Measurement::info(format!("theta={theta}: E|X|"), m1));
        log_t.push(theta.ln());
        log_m1.push(m1.ln());
        log_m2.push(m2.ln());
    }
    let fit1 = fit_line(&log_t, &log_m1);
    let fit2 = fit_line(&log_t, &log_m2);
    measurements.push(Measurement::info("p=1 max residual", fit1.max_residual));
    measurements.push(Measurement::within("p=1 slope", fit1.slope, -0.5 - cfg.slope_tol, -0.5 + cfg.slope_tol));
    measurements.push(Measurement::within("p=2 slope", fit2.slope, -1.0 - 2.0 * cfg.slope_tol, -1.0 + 2.0 * cfg.slope_tol));

    let spec = RadialPotentialSpec::new(cfg.dim, 2.0, 1.0, cfg.moment_theta)?;
    let xs = gibbs_radial_sampler(&spec, cfg.moment_draws, &stream.split("moment"))?;
    let m2 = xs.iter().map(|x| x.iter().map(|v| v * v).sum::<f64>()).sum::<f64>() / xs.len() as f64;
    let exact = cfg.dim as f64 / (2.0 * cfg.moment_theta);
    measurements.push(Measurement::info(format!("theta={}: d/(2 theta)", cfg.moment_theta), exact));
    measurements.push(Measurement::within(
        format!("theta={}: E|X|^2", cfg.moment_theta),
        m2,
        exact * (1.0 - cfg.moment_rel_tol),
        exact * (1.0 + cfg.moment_rel_tol),
    ));
    Ok((TheoryCheckReport::new("th29", measurements, cfg.draws), fit1))
}

// ---------------------------------------------------------------------------------
// tail bound

/// A bounded density with an exact sampler and a closed-form level-set measure.
pub trait TailTarget: Sync {
    fn dim(&self) -> usize;
    /// `f* = sup f`.
    fn sup(&self) -> f64;
    fn value(&self, x: &[f64]) -> f64;
    fn draw(&self, rng: &mut dyn rand::RngCore) -> Vec<f64>;
    /// `mu{f > f* - r}`.
    fn level_set_mass(&self, r: f64) -> f64;
}

/// Triangular density `1 - |x|` on `[-1, 1]`, with `mu{f > 1 - r} = 2r - r^2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Triangular;

impl TailTarget for Triangular {
    fn dim(&self) -> usize {
        1
    }
    fn sup(&self) -> f64 {
        1.0
    }
    fn value(&self, x: &[f64]) -> f64 {
        (1.0 - x[0].abs()).max(0.0)
    }
    fn draw(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        // the sum of two independent uniforms, shifted
        vec![rng.random::<f64>() + rng.random::<f64>() - 1.0]
    }
    fn level_set_mass(&self, r: f64) -> f64 {
        let r = r.clamp(0.0, 1.0);
        2.0 * r - r * r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailBoundConfig {
    pub n_grid: Vec<usize>,
    pub p: f64,
    pub replicates: usize,
}

impl Default for TailBoundConfig {
    fn default() -> Self {
        Self { n_grid: vec![10, 50, 200], p: 1.0, replicates: 2000 }
    }
}

/// `p int_0^{f*} exp(-N mu{f > f* - r}) r^(p-1) dr`, integrated in `s = r^p`.
pub fn tail_bound_rhs<T: TailTarget + ?Sized>(target: &T, n: usize, p: f64) -> f64 {
    let nf = n as f64;
    integrate(
        |s: f64| (-nf * target.level_set_mass(s.powf(1.0 / p))).exp(),
        0.0,
        target.sup().powf(p),
        1e-12,
    )
}

/// `E|max_n f(X_n) - f*|^p` against [`tail_bound_rhs`] at every `N` of the grid.
pub fn check_lemma_tail_bound<T: TailTarget + ?Sized>(
    target: &T,
    cfg: &TailBoundConfig,
    stream: &SeedStream,
) -> Result<TheoryCheckReport> {
    if cfg.n_grid.is_empty() || cfg.replicates == 0 || !(cfg.p > 0.0) {
        return Err(Error::InvalidParameter("tail-bound check needs N values, replicates and p > 0".into()));
    }
    if cfg.n_grid.contains(&0) {
        return Err(Error::InvalidParameter("tail-bound check needs N >= 1".into()));
    }
    let f_star = target.sup();
    let mut measurements = Vec::new();
    for &n in &cfg.n_grid {
        let s = stream.index(n as u64);
        let ys: Vec<f64> = (0..cfg.replicates)
            .into_par_iter()
            .map(|r| {
                let mut rng = s.index(r as u64).rng();
                let best = (0..n).map(|_| target.value(&target.draw(&mut rng))).fold(f64::NEG_INFINITY, f64::max);
                (f_star - best).abs().powf(cfg.p)
            })
            .collect();
        let (m, se) = mean_and_se(&ys);
        let rhs = tail_bound_rhs(target, n, cfg.p);
        measurements.push(Measurement::info(format!("N={n}: bound"), rhs));
        measurements.push(Measurement::at_most(format!("N={n}: E|max f - f*|^p"), m, rhs + 3.0 * se));
    }
    Ok(TheoryCheckReport::new("lemma21", measurements, cfg.replicates))
}

// ---------------------------------------------------------------------------------
// sampler fidelity

/// Equal-weight two-component Gaussian mixture at `+-center * 1`, truncated to a cube.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    pub dim: usize,
    pub center: f64,
    pub variance: f64,
    pub half_width: f64,
}

impl Default for GaussianMixture {
    fn default() -> Self {
        Self { dim: 3, center: 2.0, variance: 0.25, half_width: 6.0 }
    }
}

impl GaussianMixture {
    pub fn support(&self) -> Result<SearchBox> {
        SearchBox::cube(self.dim, -self.half_width, self.half_width)
    }

    /// Unnormalized log-density (the truncation is carried by the support).
    pub fn log_density(&self, x: &[f64]) -> f64 {
        let (mut a, mut b) = (0.0, 0.0);
        for v in x {
            a += (v - self.center) * (v - self.center);
            b += (v + self.center) * (v + self.center);
        }
        let (a, b) = (-a / (2.0 * self.variance), -b / (2.0 * self.variance));
        let hi = a.max(b);
        hi + ((a - hi).exp() + (b - hi).exp()).ln()
    }

    /// Exact draws by component selection and rejection outside the cube.
    pub fn draw(&self, n: usize, stream: &SeedStream) -> Vec<Vec<f64>> {
        let mut rng = stream.rng();
        let sd = self.variance.sqrt();
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let c = if rng.random::<bool>() { self.center } else { -self.center };
            let x: Vec<f64> = (0..self.dim).map(|_| c + sd * rng.sample::<f64, _>(StandardNormal)).collect();
            if x.iter().all(|v| v.abs() <= self.half_width) {
                out.push(x);
            }
        }
        out
    }
}

/// Largest coordinate-wise two-sample KS distance.
pub fn coordinatewise_ks(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let dim = a.first().map_or(0, Vec::len);
    (0..dim)
        .map(|j| {
            let xa: Vec<f64> = a.iter().map(|x| x[j]).collect();
            let xb: Vec<f64> = b.iter().map(|x| x[j]).collect();
            ks_two_sample(&xa, &xb)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityConfig {
    pub target: GaussianMixture,
    pub particles_high: usize,
    pub particles_low: usize,
    pub steps: usize,
    pub lambda: f64,
    /// `gamma = epsilon`.
    pub gamma: f64,
    pub draws: usize,
    pub oracle_draws: usize,
    pub seeds: usize,
    pub ks_max: f64,
    pub min_wins: usize,
}

impl Default for FidelityConfig {
    fn default() -> Self {
        Self {
            target: GaussianMixture::default(),
            particles_high: 2000,
            particles_low: 100,
            steps: 20,
            lambda: 9.0,
            gamma: 1.0,
            draws: 2000,
            oracle_draws: 5000,
            seeds: 10,
            ks_max: 0.08,
            min_wins: 8,
        }
    }
}

/// Coordinate-wise KS between SDE sampler output and exact mixture draws.
///
/// Every seed compares `particles_high` against `particles_low`; the level test
/// requires the high-particle KS below `ks_max` on every seed.
pub fn check_sampler_fidelity(cfg: &FidelityConfig, stream: &SeedStream) -> Result<TheoryCheckReport> {
    if cfg.seeds == 0 || cfg.draws == 0 || cfg.oracle_draws == 0 {
        return Err(Error::InvalidParameter("fidelity check needs seeds and draw counts".into()));
    }
    let mix = &cfg.target;
    let support = mix.support()?;
    let target = LogTarget::new(support, |x: &[f64]| mix.log_density(x));
    let params = |np: usize| SamplerParams {
        particle_count: np,
        step_count: cfg.steps,
        lambda: cfg.lambda,
        ..SamplerParams::with_gamma(cfg.gamma)
    };
    let (high, low) = (params(cfg.particles_high), params(cfg.particles_low));
    let mut ks_high = Vec::with_capacity(cfg.seeds);
    let mut wins = 0;
    for seed in 0..cfg.seeds {
        let s = stream.index(seed as u64);
        let oracle = mix.draw(cfg.oracle_draws, &s.split("oracle"));
        let a = coordinatewise_ks(&sample_batch(&target, &high, cfg.draws, &s.split("high"))?, &oracle);
        let b = coordinatewise_ks(&sample_batch(&target, &low, cfg.draws, &s.split("low"))?, &oracle);
        log::debug!("fidelity seed {seed}: KS {a:.4} at N_p={}, {b:.4} at N_p={}", cfg.particles_high, cfg.particles_low);
        if a < b {
            wins += 1;
        }
        ks_high.push(a);
    }
    let mut measurements = vec![
        Measurement::info("median KS at high N_p", median(&ks_high)),
        Measurement::at_most("max KS at high N_p", ks_high.iter().copied().fold(0.0, f64::max), cfg.ks_max),
        Measurement::within("seeds with KS(high) < KS(low)", wins as f64, cfg.min_wins as f64, cfg.seeds as f64),
    ];
    measurements.insert(0, Measurement::info("first-seed KS at high N_p", ks_high[0]));
    Ok(TheoryCheckReport::new("th45", measurements, cfg.seeds))
}
