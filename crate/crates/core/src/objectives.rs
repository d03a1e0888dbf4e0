//! Benchmark objectives with their search boxes and known optima.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Weierstrass series parameters.
pub const WEIERSTRASS_A: f64 = 0.5;
pub const WEIERSTRASS_B: f64 = 13.0;
pub const WEIERSTRASS_KMAX: u32 = 20;

/// Per-coordinate constant of the Schwefel function.
pub const SCHWEFEL_OFFSET: f64 = 418.9829;
/// Rounded location of the Schwefel minimizer in every coordinate.
pub const SCHWEFEL_ARGMIN: f64 = 420.9687;

/// Axis-aligned search box.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::InvalidBox(format!(
                "lower has {} entries, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower.is_empty() {
            return Err(Error::InvalidBox("zero-dimensional box".into()));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidBox(format!("coordinate {i} has a non-finite bound")));
            }
            if lo >= hi {
                return Err(Error::InvalidBox(format!("coordinate {i}: {lo} >= {hi}")));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (lo, hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*lo, *hi);
        }
    }

    pub fn half_widths(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(lo, hi)| 0.5 * (hi - lo)).collect()
    }

    pub fn max_half_width(&self) -> f64 {
        self.half_widths().into_iter().fold(0.0, f64::max)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(lo, hi)| 0.5 * (lo + hi)).collect()
    }

    /// Radius of the smallest origin-centred ball containing the box.
    pub fn enclosing_radius(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| lo.abs().max(hi.abs()).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Uniform draw from the box.
    pub fn sample_uniform<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| rng.random_range(*lo..=*hi))
            .collect()
    }
}

/// Classification tags used in the benchmark tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tag {
    Differentiable,
    Separable,
    Scalable,
    Multimodal,
    Unimodal,
    Discontinuous,
}

/// Scalar objective `U: R^d -> [0, inf]`. Implementations must be pure.
pub trait Objective: Sync {
    fn value(&self, x: &[f64]) -> f64;

    /// Hand-written gradient, when one is registered.
    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn value(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// The ten benchmark functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FunctionKind {
    Sphere,
    Schwefel,
    Rosenbrock,
    Ackley,
    Griewank,
    Rastrigin,
    Levy,
    Weierstrass,
    Step,
    Artificial,
}

impl FunctionKind {
    pub const ALL: [FunctionKind; 10] = [
        FunctionKind::Sphere,
        FunctionKind::Schwefel,
        FunctionKind::Rosenbrock,
        FunctionKind::Ackley,
        FunctionKind::Griewank,
        FunctionKind::Rastrigin,
        FunctionKind::Levy,
        FunctionKind::Weierstrass,
        FunctionKind::Step,
        FunctionKind::Artificial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FunctionKind::Sphere => "sphere",
            FunctionKind::Schwefel => "schwefel",
            FunctionKind::Rosenbrock => "rosenbrock",
            FunctionKind::Ackley => "ackley",
            FunctionKind::Griewank => "griewank",
            FunctionKind::Rastrigin => "rastrigin",
            FunctionKind::Levy => "levy",
            FunctionKind::Weierstrass => "weierstrass",
            FunctionKind::Step => "step",
            FunctionKind::Artificial => "artificial",
        }
    }

    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            FunctionKind::Sphere => sphere(x),
            FunctionKind::Schwefel => schwefel(x),
            FunctionKind::Rosenbrock => rosenbrock(x),
            FunctionKind::Ackley => ackley(x),
            FunctionKind::Griewank => griewank(x),
            FunctionKind::Rastrigin => rastrigin(x),
            FunctionKind::Levy => levy(x),
            FunctionKind::Weierstrass => weierstrass(x),
            FunctionKind::Step => step(x),
            FunctionKind::Artificial => artificial(x),
        }
    }

    pub fn tags(self) -> &'static [Tag] {
        use Tag::*;
        match self {
            FunctionKind::Sphere => &[Differentiable, Separable, Scalable, Unimodal],
            FunctionKind::Schwefel => &[Differentiable, Separable, Scalable, Multimodal],
            FunctionKind::Rosenbrock => &[Differentiable, Scalable, Unimodal],
            FunctionKind::Ackley => &[Differentiable, Scalable, Multimodal],
            FunctionKind::Griewank => &[Differentiable, Scalable, Multimodal],
            FunctionKind::Rastrigin => &[Differentiable, Separable, Scalable, Multimodal],
            FunctionKind::Levy => &[Differentiable, Separable, Scalable, Multimodal],
            FunctionKind::Weierstrass => &[Separable, Scalable, Multimodal],
            FunctionKind::Step => &[Discontinuous, Separable, Scalable, Multimodal],
            FunctionKind::Artificial => &[Separable, Multimodal],
        }
    }

    /// Default search interval, identical in every coordinate.
    pub fn default_interval(self) -> (f64, f64) {
        match self {
            FunctionKind::Sphere | FunctionKind::Rastrigin => (-5.12, 5.12),
            FunctionKind::Schwefel => (-500.0, 500.0),
            FunctionKind::Rosenbrock => (-5.0, 5.0),
            FunctionKind::Ackley => (-32.768, 32.768),
            FunctionKind::Griewank => (-600.0, 600.0),
            FunctionKind::Levy | FunctionKind::Artificial => (-10.0, 10.0),
            FunctionKind::Weierstrass => (-2.0, 2.0),
            FunctionKind::Step => (-100.0, 100.0),
        }
    }

    fn min_dimension(self) -> usize {
        match self {
            FunctionKind::Rosenbrock => 2,
            _ => 1,
        }
    }

    /// `(minimizer coordinate, minimum value, exact)` for dimension `d`.
    fn optimum(self, d: usize) -> (f64, f64, bool) {
        match self {
            FunctionKind::Schwefel => (SCHWEFEL_ARGMIN, 0.0, false),
            FunctionKind::Rosenbrock | FunctionKind::Levy => (1.0, 0.0, true),
            FunctionKind::Weierstrass => {
                let a = WEIERSTRASS_A;
                (1.0, d as f64 * a.powi(WEIERSTRASS_KMAX as i32 + 1) / (1.0 - a), true)
            }
            FunctionKind::Artificial => (0.1, 0.0, true),
            _ => (0.0, 0.0, true),
        }
    }

    pub fn analytic_gradient(self, x: &[f64]) -> Option<Vec<f64>> {
        match self {
            FunctionKind::Sphere => Some(x.iter().map(|v| 2.0 * v).collect()),
            FunctionKind::Rastrigin => Some(
                x.iter()
                    .map(|v| 2.0 * v + 20.0 * PI * (2.0 * PI * v).sin())
                    .collect(),
            ),
            FunctionKind::Rosenbrock => {
                let d = x.len();
                let mut g = vec![0.0; d];
                for i in 0..d.saturating_sub(1) {
                    let t = x[i + 1] - x[i] * x[i];
                    g[i] += -400.0 * x[i] * t - 2.0 * (1.0 - x[i]);
                    g[i + 1] += 200.0 * t;
                }
                Some(g)
            }
            _ => None,
        }
    }
}

impl fmt::Display for FunctionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FunctionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FunctionKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownObjective(s.to_string()))
    }
}

impl Objective for FunctionKind {
    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x)
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.analytic_gradient(x)
    }
}

/// A benchmark function instantiated at a dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveSpec {
    pub kind: FunctionKind,
    pub dimension: usize,
    pub search_box: SearchBox,
    pub known_min_value: f64,
    /// False when the minimum is only known to rounding (Schwefel).
    pub min_is_exact: bool,
    pub known_minimizer: Option<Vec<f64>>,
    pub tags: &'static [Tag],
}

impl ObjectiveSpec {
    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn has_tag(&self, tag: Tag) -> bool {
        self.tags.contains(&tag)
    }

    /// Tolerance on `eval(known_minimizer) - known_min_value`.
    pub fn min_tolerance(&self) -> f64 {
        if self.min_is_exact {
            1e-9
        } else {
            1e-3
        }
    }

    pub fn with_box(mut self, search_box: SearchBox) -> Result<Self> {
        if search_box.dim() != self.dimension {
            return Err(Error::InvalidBox(format!(
                "box has dimension {}, objective has {}",
                search_box.dim(),
                self.dimension
            )));
        }
        if let Some(m) = &self.known_minimizer {
            if !search_box.contains(m) {
                self.known_minimizer = None;
            }
        }
        self.search_box = search_box;
        Ok(self)
    }
}

impl Objective for ObjectiveSpec {
    fn value(&self, x: &[f64]) -> f64 {
        self.kind.eval(x)
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.kind.analytic_gradient(x)
    }
}

/// Looks up a benchmark by identifier and builds its spec at `dimension`.
pub fn registry(name: &str, dimension: usize) -> Result<ObjectiveSpec> {
    let kind: FunctionKind = name.parse()?;
    spec_for(kind, dimension)
}

pub fn spec_for(kind: FunctionKind, dimension: usize) -> Result<ObjectiveSpec> {
    if dimension < kind.min_dimension() {
        return Err(Error::InvalidDimension {
            name: kind.name().to_string(),
            dim: dimension,
            reason: if kind.min_dimension() > 1 {
                "needs at least two coordinates"
            } else {
                "needs at least one coordinate"
            },
        });
    }
    let (lo, hi) = kind.default_interval();
    let (argmin, min_value, exact) = kind.optimum(dimension);
    Ok(ObjectiveSpec {
        kind,
        dimension,
        search_box: SearchBox::cube(dimension, lo, hi)?,
        known_min_value: min_value,
        min_is_exact: exact,
        known_minimizer: Some(vec![argmin; dimension]),
        tags: kind.tags(),
    })
}

/// Counts evaluations of a wrapped objective.
#[derive(Debug, Default)]
pub struct EvalCounter {
    count: AtomicU64,
}

impl EvalCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }

    fn bump(&self) {
        self.count.fetch_add(1, Ordering::Relaxed);
    }
}

/// Objective wrapper that increments an [`EvalCounter`] on every evaluation.
pub struct Counted<'a, O: ?Sized> {
    inner: &'a O,
    counter: &'a EvalCounter,
}

impl<'a, O: Objective + ?Sized> Counted<'a, O> {
    pub fn new(inner: &'a O, counter: &'a EvalCounter) -> Self {
        Self { inner, counter }
    }

    pub fn count(&self) -> u64 {
        self.counter.get()
    }
}

impl<O: Objective + ?Sized> Objective for Counted<'_, O> {
    fn value(&self, x: &[f64]) -> f64 {
        self.counter.bump();
        self.inner.value(x)
    }

    /// Analytic gradients are not charged as function evaluations.
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.inner.gradient(x)
    }
}

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn schwefel(x: &[f64]) -> f64 {
    let s: f64 = x.iter().map(|v| v * v.abs().sqrt().sin()).sum();
    SCHWEFEL_OFFSET * x.len() as f64 - s
}

/// Rosenbrock valley. With fewer than two coordinates the sum is empty and the
/// function returns 0; [`registry`] refuses such dimensions.
pub fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| {
            let a = w[1] - w[0] * w[0];
            let b = 1.0 - w[0];
            100.0 * a * a + b * b
        })
        .sum()
}

pub fn ackley(x: &[f64]) -> f64 {
    let d = x.len() as f64;
    let sq: f64 = x.iter().map(|v| v * v).sum();
    let cs: f64 = x.iter().map(|v| (2.0 * PI * v).cos()).sum();
    -20.0 * (-0.2 * (sq / d).sqrt()).exp() - (cs / d).exp() + 20.0 + E
}

pub fn griewank(x: &[f64]) -> f64 {
    let mut sq = 0.0;
    let mut prod = 1.0;
    for (i, v) in x.iter().enumerate() {
        sq += v * v;
        prod *= (v / ((i + 1) as f64).sqrt()).cos();
    }
    1.0 + sq / 4000.0 - prod
}

pub fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
            .sum::<f64>()
}

pub fn levy(x: &[f64]) -> f64 {
    let w = |v: f64| 1.0 + (v - 1.0) / 4.0;
    let d = x.len();
    if d == 0 {
        return 0.0;
    }
    let w1 = w(x[0]);
    let wd = w(x[d - 1]);
    let head = (PI * w1).sin().powi(2);
    let mid: f64 = x[..d - 1]
        .iter()
        .map(|v| {
            let wi = w(*v);
            (wi - 1.0).powi(2) * (1.0 + 10.0 * (PI * wi + 1.0).sin().powi(2))
        })
        .sum();
    let tail = (wd - 1.0).powi(2) * (1.0 + (2.0 * PI * wd).sin().powi(2));
    head + mid + tail
}

/// `cos(b^k pi x)` for `k = 0..=kmax` summed with weights `a^k`.
///
/// The phase `b^k x` is carried modulo 2 so that integer and dyadic inputs stay exact
/// even where `b^k` exceeds the 53-bit mantissa.
fn weierstrass_1d(x: f64) -> f64 {
    let mut phase = x.rem_euclid(2.0);
    let mut weight = 1.0;
    let mut acc = 0.0;
    for _ in 0..=WEIERSTRASS_KMAX {
        acc += weight * (PI * phase).cos();
        weight *= WEIERSTRASS_A;
        phase = (WEIERSTRASS_B * phase).rem_euclid(2.0);
    }
    acc
}

pub fn weierstrass(x: &[f64]) -> f64 {
    let s: f64 = x.iter().map(|v| weierstrass_1d(*v)).sum();
    s + x.len() as f64 / (1.0 - WEIERSTRASS_A)
}

pub fn step(x: &[f64]) -> f64 {
    x.iter().map(|v| (v + 0.5).floor().powi(2)).sum()
}

pub fn artificial(x: &[f64]) -> f64 {
    1e5 * x
        .iter()
        .map(|v| (v - 0.1).abs().powi(4).sin().abs().sqrt())
        .sum::<f64>()
}
