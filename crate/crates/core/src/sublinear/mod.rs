//! Double-limit window estimators: `K̄` on the additive half-line, `P̄` and
//! `Q̄` on the multiplicative one, `P̄_d` and `Q̄_d` on sequences, with their
//! lower counterparts `−upper(−f)`.
//!
//! The inner `limsup` is approximated by a maximum over a tail grid of window
//! anchors; the outer limit by the last entry of a nested θ schedule.

mod anchors;

use crate::error::{Error, Result};
use crate::fnspec::{DomainTag, FunctionSpec, SequenceSpec, SpecInput};
use anchors::{sweep, Target};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Slack allowed when checking that per-θ estimates are monotone.
pub const MONOTONE_SLACK: f64 = 1e-9;

/// The five upper functionals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Functional {
    /// windows `[x, x + θ]`, `θ → 0⁺`
    K,
    /// windows `[x, θx]` normalised by `(θ − 1)x`, `θ → 1⁺`
    P,
    /// windows `[x, θx]` weighted by `dt/t`, normalised by `ln θ`
    Q,
    /// integer windows `n ≤ i ≤ ⌊θn⌋` normalised by `(θ − 1)n`
    Pd,
    /// integer windows weighted by `1/i`, normalised by `ln θ`
    Qd,
}

impl Functional {
    pub const ALL: [Functional; 5] = [Functional::K, Functional::P, Functional::Q, Functional::Pd, Functional::Qd];

    pub fn is_discrete(self) -> bool {
        matches!(self, Functional::Pd | Functional::Qd)
    }

    pub fn name(self) -> &'static str {
        match self {
            Functional::K => "K",
            Functional::P => "P",
            Functional::Q => "Q",
            Functional::Pd => "Pd",
            Functional::Qd => "Qd",
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Functional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Functional::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown functional {s:?} (expected K, P, Q, Pd or Qd)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Upper,
    Lower,
}

/// User-facing sweep settings, resolved per functional by [`SweepConfig::params`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Finest schedule index `J`; the schedule runs over `j = 2..=J`.
    pub theta_steps: usize,
    /// Tail range on the multiplicative axis (and for sequences); the
    /// additive sweep uses its log image.
    pub x_min: f64,
    pub x_max: f64,
    pub anchors_per_theta: usize,
    pub stride_fraction: f64,
    /// Reported tolerance of a continuous sweep value.
    pub window_tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            theta_steps: 10,
            x_min: 1e6,
            x_max: 1e7,
            anchors_per_theta: 48,
            stride_fraction: 0.25,
            window_tol: 2.5e-3,
        }
    }
}

impl SweepConfig {
    /// Schedule and tail range for `functional`. `K` uses `θ_j = 2^{−j}`; the
    /// others use `θ_j = exp(2^{−j})`, so consecutive windows nest exactly and
    /// `ln θ_j` matches the additive schedule under `W`.
    pub fn params(&self, functional: Functional) -> SweepParams {
        let steps = (2..=self.theta_steps.max(2) as i32).map(|j| 2f64.powi(-j));
        let (theta_schedule, x_min, x_max) = match functional {
            Functional::K => (steps.collect(), self.x_min.ln(), self.x_max.ln()),
            _ => (steps.map(f64::exp).collect(), self.x_min, self.x_max),
        };
        SweepParams {
            functional,
            theta_schedule,
            x_min,
            x_max,
            anchors_per_theta: self.anchors_per_theta,
            stride_fraction: self.stride_fraction,
            window_tol: self.window_tol,
        }
    }
}

/// Fully resolved sweep parameters of one functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepParams {
    pub functional: Functional,
    pub theta_schedule: Vec<f64>,
    pub x_min: f64,
    pub x_max: f64,
    pub anchors_per_theta: usize,
    pub stride_fraction: f64,
    pub window_tol: f64,
}

impl SweepParams {
    pub(crate) fn validate(&self) -> Result<()> {
        let s = &self.theta_schedule;
        if s.len() < 4 {
            return Err(Error::schedule("θ schedule needs at least 4 entries"));
        }
        let (lo, hi) = if self.functional == Functional::K { (0.0, 1.0) } else { (1.0, 2.0) };
        if s.iter().any(|&t| !(t > lo && t <= hi)) {
            return Err(Error::schedule(format!("θ values must lie in ({lo}, {hi}]")));
        }
        if s.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::schedule("θ schedule must decrease strictly toward its limit"));
        }
        if !(self.stride_fraction > 0.0 && self.stride_fraction <= 0.5) {
            return Err(Error::schedule("stride_fraction must lie in (0, 1/2]"));
        }
        if self.anchors_per_theta < 2 {
            return Err(Error::schedule("need at least 2 anchors per θ"));
        }
        if !(self.window_tol.is_finite() && self.window_tol >= 0.0) {
            return Err(Error::schedule("window_tol must be a non-negative number"));
        }
        let origin = match self.functional {
            Functional::K => 0.0,
            Functional::P | Functional::Q => 1.0,
            Functional::Pd | Functional::Qd => 2.0,
        };
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_min >= origin && self.x_max > self.x_min) {
            return Err(Error::schedule(format!(
                "tail range [{}, {}] invalid (lower end must be ≥ {origin})",
                self.x_min, self.x_max
            )));
        }
        if self.functional.is_discrete() && self.x_max >= (1u64 << 52) as f64 {
            return Err(Error::schedule("n_max beyond exact integer range"));
        }
        Ok(())
    }

    /// Window length in the sweep's own log/linear coordinate.
    pub(crate) fn window_length(&self, theta: f64) -> f64 {
        if self.functional == Functional::K {
            theta
        } else {
            theta.ln()
        }
    }
}

/// One schedule entry of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaEstimate {
    pub theta: f64,
    pub limsup_estimate: f64,
    pub argmax_anchor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub functional: Functional,
    pub direction: Direction,
    pub per_theta: Vec<ThetaEstimate>,
    /// Last schedule entry.
    pub value: f64,
    /// Estimates move monotonically along the schedule (non-decreasing for
    /// upper sweeps, non-increasing for lower ones).
    pub monotone_ok: bool,
    /// Accuracy claimed for `value`.
    pub tolerance: f64,
    pub params: SweepParams,
}

impl SweepReport {
    /// CSV table with columns `theta,limsup_estimate,argmax_anchor`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,limsup_estimate,argmax_anchor\n");
        for e in &self.per_theta {
            out.push_str(&format!("{},{},{}\n", e.theta, e.limsup_estimate, e.argmax_anchor));
        }
        out
    }
}

/// `[lower, upper]` of one functional on one input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalRange {
    pub functional: Functional,
    pub lo: f64,
    pub hi: f64,
    pub tolerance: f64,
    pub lower: SweepReport,
    pub upper: SweepReport,
}

fn run(target: Target<'_>, bound: f64, params: &SweepParams, direction: Direction) -> Result<SweepReport> {
    params.validate()?;
    let mut per_theta = sweep(target, params)?;
    let monotone_ok = per_theta
        .windows(2)
        .all(|w| w[1].limsup_estimate >= w[0].limsup_estimate - MONOTONE_SLACK);
    if direction == Direction::Lower {
        for e in &mut per_theta {
            e.limsup_estimate = -e.limsup_estimate;
        }
    }
    let mut tolerance = params.window_tol;
    if params.functional.is_discrete() {
        // integer windows hold up to one extra term relative to the normaliser
        let finest = params.window_length(*params.theta_schedule.last().expect("validated"));
        tolerance += bound / (params.x_min * finest);
    }
    Ok(SweepReport {
        functional: params.functional,
        direction,
        value: per_theta.last().expect("validated").limsup_estimate,
        per_theta,
        monotone_ok,
        tolerance,
        params: params.clone(),
    })
}

fn expect(params: &SweepParams, functional: Functional) -> Result<()> {
    if params.functional != functional {
        return Err(Error::schedule(format!(
            "parameters resolved for {} used for {functional}",
            params.functional
        )));
    }
    Ok(())
}

fn fn_target<'a>(spec: &'a FunctionSpec, domain: DomainTag, functional: Functional) -> Result<Target<'a>> {
    if spec.domain() != domain {
        return Err(Error::domain(format!("{functional} needs a {domain:?} function")));
    }
    Ok(Target::Function(spec))
}

/// `K̄(f) = lim_{θ→0⁺} limsup_x (1/θ)∫_x^{x+θ} f`.
pub fn k_upper(spec: &FunctionSpec, params: &SweepParams) -> Result<SweepReport> {
    expect(params, Functional::K)?;
    run(fn_target(spec, DomainTag::Additive, Functional::K)?, spec.bound(), params, Direction::Upper)
}

/// `P̄(f) = lim_{θ→1⁺} limsup_x (1/((θ−1)x))∫_x^{θx} f`.
pub fn p_upper(spec: &FunctionSpec, params: &SweepParams) -> Result<SweepReport> {
    expect(params, Functional::P)?;
    run(fn_target(spec, DomainTag::Multiplicative, Functional::P)?, spec.bound(), params, Direction::Upper)
}

/// `Q̄(f) = lim_{θ→1⁺} limsup_x (1/ln θ)∫_x^{θx} f(t) dt/t`.
pub fn q_upper(spec: &FunctionSpec, params: &SweepParams) -> Result<SweepReport> {
    expect(params, Functional::Q)?;
    run(fn_target(spec, DomainTag::Multiplicative, Functional::Q)?, spec.bound(), params, Direction::Upper)
}

/// `P̄_d(f) = lim_{θ→1⁺} limsup_n (1/((θ−1)n))Σ_{i=n}^{⌊θn⌋} f(i)`.
pub fn p_upper_seq(seq: &SequenceSpec, params: &SweepParams) -> Result<SweepReport> {
    expect(params, Functional::Pd)?;
    run(Target::Sequence(seq), seq.bound(), params, Direction::Upper)
}

/// `Q̄_d(f) = lim_{θ→1⁺} limsup_n (1/ln θ)Σ_{i=n}^{⌊θn⌋} f(i)/i`.
pub fn q_upper_seq(seq: &SequenceSpec, params: &SweepParams) -> Result<SweepReport> {
    expect(params, Functional::Qd)?;
    run(Target::Sequence(seq), seq.bound(), params, Direction::Upper)
}

/// Upper functional of `params.functional` on a parsed input.
pub fn upper(input: &SpecInput, params: &SweepParams) -> Result<SweepReport> {
    directed(input, params, Direction::Upper)
}

/// Lower functional `−upper(−f)`; estimates are reported negated back.
pub fn lower(input: &SpecInput, params: &SweepParams) -> Result<SweepReport> {
    directed(input, params, Direction::Lower)
}

fn directed(input: &SpecInput, params: &SweepParams, direction: Direction) -> Result<SweepReport> {
    let negate = direction == Direction::Lower;
    match (input, params.functional) {
        (SpecInput::Function(f), Functional::K | Functional::P | Functional::Q) => {
            let domain = if params.functional == Functional::K { DomainTag::Additive } else { DomainTag::Multiplicative };
            fn_target(f, domain, params.functional)?;
            let g = if negate { f.negated() } else { f.clone() };
            run(Target::Function(&g), g.bound(), params, direction)
        }
        (SpecInput::Sequence(s), Functional::Pd | Functional::Qd) => {
            let t = if negate { s.negated() } else { s.clone() };
            run(Target::Sequence(&t), t.bound(), params, direction)
        }
        (SpecInput::Function(_), k) => Err(Error::domain(format!("{k} needs a sequence input"))),
        (SpecInput::Sequence(_), k) => Err(Error::domain(format!("{k} needs a function input"))),
    }
}

/// `[lower, upper]` of a functional: the range of values taken by the
/// normalised positive extensions it dominates.
pub fn functional_range(input: &SpecInput, params: &SweepParams) -> Result<FunctionalRange> {
    let upper = upper(input, params)?;
    let lower = lower(input, params)?;
    Ok(FunctionalRange {
        functional: params.functional,
        lo: lower.value,
        hi: upper.value,
        tolerance: upper.tolerance.max(lower.tolerance),
        lower,
        upper,
    })
}
