//! Single-limit estimators: the Cesàro mean `M`, the exponentially weighted
//! mean `R` and the discrete Cesàro mean `M_d`.
//!
//! Each estimator samples the partial average on a grid, merged with the jump
//! locations of step-type inputs (the partial average of a step function is
//! extremal at its jumps), and reports the band of values over the tail of the
//! grid. Convergence is declared from the band width alone.

use crate::error::{Error, Result};
use crate::fnspec::{DomainTag, FunctionSpec, SequenceSpec};
use crate::par;
use serde::{Deserialize, Serialize};

/// Integration tolerance handed to the closed-form integrators.
const INT_TOL: f64 = 1e-12;
/// Most jump locations merged into a sample grid.
const BREAK_CAP: usize = 4096;

/// Sampling grid and convergence threshold of a mean estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Criterion {
    pub x_min: f64,
    pub x_max: f64,
    pub n_samples: usize,
    pub band_tol: f64,
}

impl Criterion {
    /// Geometric grid on `[16, 4¹²]` for `M` and `M_d`.
    pub fn multiplicative_default() -> Self {
        Criterion {
            x_min: 16.0,
            x_max: 4f64.powi(12),
            n_samples: 64,
            band_tol: 1e-2,
        }
    }

    /// Arithmetic grid on the log image `[ln 16, ln 4¹²]` for `R`.
    pub fn additive_default() -> Self {
        let m = Self::multiplicative_default();
        Criterion {
            x_min: m.x_min.ln(),
            x_max: m.x_max.ln(),
            ..m
        }
    }

    fn validate(&self, origin: f64) -> Result<()> {
        let ok = self.x_min.is_finite()
            && self.x_max.is_finite()
            && self.x_min >= origin
            && self.x_max > self.x_min
            && self.n_samples >= 2
            && self.band_tol.is_finite()
            && self.band_tol >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!("invalid sampling criterion {self:?}")))
        }
    }

    fn geometric(&self) -> Vec<f64> {
        let ratio = (self.x_max / self.x_min).ln() / (self.n_samples - 1) as f64;
        (0..self.n_samples)
            .map(|j| if j + 1 == self.n_samples { self.x_max } else { self.x_min * (ratio * j as f64).exp() })
            .collect()
    }

    fn arithmetic(&self) -> Vec<f64> {
        let h = (self.x_max - self.x_min) / (self.n_samples - 1) as f64;
        (0..self.n_samples)
            .map(|j| if j + 1 == self.n_samples { self.x_max } else { self.x_min + h * j as f64 })
            .collect()
    }
}

/// Which single limit a [`LimitEstimate`] approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeanKind {
    /// `lim (1/x)∫_1^x f`
    M,
    /// `lim e^{−x}∫_0^x f(t)eᵗ dt`
    R,
    /// `lim (1/n)Σ_{i=1}^n f(i)`
    Md,
}

/// Outcome of a single-limit estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub kind: MeanKind,
    pub lo: f64,
    pub hi: f64,
    pub converged: bool,
    /// `(abscissa, partial average)` pairs, abscissas strictly increasing.
    pub samples: Vec<(f64, f64)>,
    pub criterion: Criterion,
}

impl LimitEstimate {
    /// Band midpoint; the limit when [`LimitEstimate::converged`] holds.
    pub fn value(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn from_samples(kind: MeanKind, samples: Vec<(f64, f64)>, tail_start: f64, criterion: Criterion) -> Self {
        let (lo, hi) = samples
            .iter()
            .filter(|(x, _)| *x >= tail_start)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, v)| (lo.min(v), hi.max(v)));
        LimitEstimate {
            kind,
            lo,
            hi,
            converged: hi - lo <= criterion.band_tol,
            samples,
            criterion,
        }
    }
}

fn merge_grid(mut grid: Vec<f64>, extra: Option<Vec<f64>>) -> Vec<f64> {
    if let Some(extra) = extra {
        grid.extend(extra);
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

fn prefix_sums(start: f64, increments: Vec<Result<f64>>) -> Result<Vec<f64>> {
    let mut acc = start;
    let mut out = Vec::with_capacity(increments.len() + 1);
    out.push(acc);
    for inc in increments {
        acc += inc?;
        out.push(acc);
    }
    Ok(out)
}

/// Cesàro mean `M(f)` of a multiplicative function on a geometric grid.
pub fn cesaro_mean(spec: &FunctionSpec, criterion: &Criterion) -> Result<LimitEstimate> {
    if spec.domain() != DomainTag::Multiplicative {
        return Err(Error::domain("the Cesàro mean needs a multiplicative function"));
    }
    criterion.validate(1.0)?;
    let xs = merge_grid(
        criterion.geometric(),
        spec.breakpoints(criterion.x_min, criterion.x_max, BREAK_CAP),
    );
    let pairs: Vec<(f64, f64)> = xs.windows(2).map(|w| (w[0], w[1])).collect();
    let increments = par::map(&pairs, |&(a, b)| spec.integrate(a, b, INT_TOL));
    let head = spec.integrate(1.0, xs[0], INT_TOL)?;
    let totals = prefix_sums(head, increments)?;
    let samples = xs.iter().zip(totals).map(|(&x, total)| (x, total / x)).collect();
    let tail = (criterion.x_min * criterion.x_max).sqrt();
    Ok(LimitEstimate::from_samples(MeanKind::M, samples, tail, *criterion))
}

/// Exponentially weighted mean `R(f)` of an additive function, tracking
/// `(Sf)(x) = e^{−x}∫_0^x f(t)eᵗ dt` by the recurrence
/// `S(x') = e^{−(x'−x)}S(x) + ∫_x^{x'} f(t)e^{t−x'} dt`, which never forms `eˣ`.
pub fn exp_mean(spec: &FunctionSpec, criterion: &Criterion) -> Result<LimitEstimate> {
    if spec.domain() != DomainTag::Additive {
        return Err(Error::domain("the exponential mean needs an additive function"));
    }
    criterion.validate(0.0)?;
    let xs = merge_grid(
        criterion.arithmetic(),
        spec.breakpoints(criterion.x_min, criterion.x_max, BREAK_CAP),
    );
    let pairs: Vec<(f64, f64)> = xs.windows(2).map(|w| (w[0], w[1])).collect();
    let increments = par::map(&pairs, |&(a, b)| spec.integrate_expw(a, b, INT_TOL));
    let mut s = spec.integrate_expw(0.0, xs[0], INT_TOL)?;
    let mut samples = Vec::with_capacity(xs.len());
    samples.push((xs[0], s));
    for (&(a, b), inc) in pairs.iter().zip(increments) {
        s = (a - b).exp() * s + inc?;
        samples.push((b, s));
    }
    let tail = 0.5 * (criterion.x_min + criterion.x_max);
    Ok(LimitEstimate::from_samples(MeanKind::R, samples, tail, *criterion))
}

/// Discrete Cesàro mean `M_d(f)`, partial averages `(1/n)Σ_{i=1}^n f(i)` on a
/// geometric subsequence of `n ∈ [x_min, x_max]`. Indices just before each
/// change of value are added, which is where the partial averages peak.
pub fn cesaro_mean_seq(seq: &SequenceSpec, criterion: &Criterion) -> Result<LimitEstimate> {
    criterion.validate(1.0)?;
    if criterion.x_min < 16.0 {
        return Err(Error::domain("the discrete mean needs n_min ≥ 16"));
    }
    if criterion.x_max >= u64::MAX as f64 / 2.0 {
        return Err(Error::domain("n_max beyond the integer range"));
    }
    let (n_lo, n_hi) = (criterion.x_min.ceil() as u64, criterion.x_max.floor() as u64);
    let mut ns: Vec<u64> = criterion
        .geometric()
        .into_iter()
        .map(|x| (x.round() as u64).clamp(n_lo, n_hi))
        .collect();
    if let Some(changes) = seq.change_points(n_lo + 1, n_hi + 1, BREAK_CAP) {
        ns.extend(changes.into_iter().map(|c| c - 1));
    }
    ns.sort_unstable();
    ns.dedup();
    let pairs: Vec<(u64, u64)> = ns.windows(2).map(|w| (w[0], w[1])).collect();
    let increments = par::map(&pairs, |&(a, b)| Ok(seq.range_sum(a + 1, b + 1)));
    let totals = prefix_sums(seq.range_sum(1, ns[0] + 1), increments)?;
    let samples = ns
        .iter()
        .zip(totals)
        .map(|(&n, total)| (n as f64, total / n as f64))
        .collect();
    let tail = (criterion.x_min * criterion.x_max).sqrt();
    Ok(LimitEstimate::from_samples(MeanKind::Md, samples, tail, *criterion))
}
