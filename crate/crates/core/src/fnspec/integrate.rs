//! Closed-form window integrals. Step pieces are integrated piece by piece and
//! sinusoids through their antiderivatives, so no quadrature is involved.

use super::eval::{block_start, floor_log};
use super::seqsum::Weight;
use super::{DomainTag, FnNode, FunctionSpec, SequenceSpec, Step};
use crate::error::{Error, Result};
use std::f64::consts::TAU;

/// Below this `t − b` the weight `e^{t−b}` is zero in double precision.
const EXP_UNDERFLOW: f64 = -746.0;
/// Largest `x` with finite `eˣ`.
const EXP_OVERFLOW: f64 = 709.0;

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::Tolerance(format!("tolerance must be positive, got {tol}")))
    }
}

fn check_interval(domain: DomainTag, a: f64, b: f64) -> Result<()> {
    domain.check(a)?;
    domain.check(b)?;
    if a > b {
        return Err(Error::domain(format!("interval [{a}, {b}] is reversed")));
    }
    Ok(())
}

fn exp_checked(x: f64) -> Result<f64> {
    if x > EXP_OVERFLOW {
        return Err(Error::OverflowGuard(format!("exp({x}) overflows")));
    }
    Ok(x.exp())
}

/// `ln(b/a)` for `0 < a ≤ b`, accurate for short windows.
fn ln_ratio(a: f64, b: f64) -> f64 {
    ((b - a) / a).ln_1p()
}

/// `∫_a^b A·sin(ωt + φ) dt` in product form.
fn sin_integral(amplitude: f64, omega: f64, phase: f64, a: f64, b: f64) -> f64 {
    let mid = omega * 0.5 * (a + b) + phase;
    let half = omega * 0.5 * (b - a);
    2.0 * amplitude / omega * mid.sin() * half.sin()
}

/// `∫_0^r profile(t) dt` for `0 ≤ r ≤ period`.
fn profile_partial(profile: &[Step], period: f64, r: f64) -> f64 {
    let mut acc = 0.0;
    for (i, s) in profile.iter().enumerate() {
        if s.start >= r {
            break;
        }
        let end = profile.get(i + 1).map_or(period, |n| n.start).min(r);
        acc += s.value * (end - s.start);
    }
    acc
}

fn periodic_integral(profile: &[Step], period: f64, a: f64, b: f64) -> f64 {
    let qa = (a / period).floor();
    let qb = (b / period).floor();
    let ra = (a - qa * period).clamp(0.0, period);
    let rb = (b - qb * period).clamp(0.0, period);
    let mass = profile_partial(profile, period, period);
    (qb - qa) * mass + profile_partial(profile, period, rb) - profile_partial(profile, period, ra)
}

/// Sum of `measure(lo, hi)` over the on-blocks of a log-periodic indicator
/// intersected with `[a, b]`.
fn blocks_integral(base: f64, pattern: &super::Pattern, a: f64, b: f64, measure: impl Fn(f64, f64) -> f64) -> f64 {
    let (k0, k1) = (floor_log(base, a), floor_log(base, b));
    (k0..=k1)
        .filter(|&k| pattern.at(k))
        .map(|k| {
            let lo = block_start(base, k).max(a);
            let hi = block_start(base, k + 1).min(b);
            if hi > lo {
                measure(lo, hi)
            } else {
                0.0
            }
        })
        .sum()
}

/// Cell decomposition of a lifted sequence over `[a, b]`: partial cells at
/// both ends and a window sum over the whole cells in between.
fn lifted_integral(
    seq: &SequenceSpec,
    a: f64,
    b: f64,
    weight: Weight,
    cell: impl Fn(f64, f64) -> f64,
) -> Result<f64> {
    if b >= u64::MAX as f64 {
        return Err(Error::domain(format!("x = {b} beyond the integer range")));
    }
    let (i0, i1) = (a.floor() as u64, b.floor() as u64);
    if i0 == i1 {
        return Ok(seq.evaluate(i0) * cell(a, b));
    }
    let mut acc = seq.evaluate(i0) * cell(a, (i0 + 1) as f64);
    acc += seq.weighted_sum(i0 + 1, i1, weight);
    if b > i1 as f64 {
        acc += seq.evaluate(i1) * cell(i1 as f64, b);
    }
    Ok(acc)
}

impl FunctionSpec {
    /// `∫_a^b f(t) dt`. Every node has a closed form, so the result is exact
    /// up to roundoff; `tol` is validated and bounds the permitted error.
    pub fn integrate(&self, a: f64, b: f64, tol: f64) -> Result<f64> {
        check_tol(tol)?;
        check_interval(self.domain, a, b)?;
        self.int_plain(a, b)
    }

    /// `∫_a^b f(t) dt/t` on a multiplicative function.
    pub fn integrate_log(&self, a: f64, b: f64, tol: f64) -> Result<f64> {
        check_tol(tol)?;
        if self.domain != DomainTag::Multiplicative {
            return Err(Error::domain("log-weighted integral needs a multiplicative function"));
        }
        check_interval(self.domain, a, b)?;
        self.int_log(a, b)
    }

    /// `∫_a^b f(t)·e^{t−b} dt` on an additive function; the weight never
    /// exceeds one, so the value stays bounded for any `b`.
    pub fn integrate_expw(&self, a: f64, b: f64, tol: f64) -> Result<f64> {
        check_tol(tol)?;
        if self.domain != DomainTag::Additive {
            return Err(Error::domain("exp-weighted integral needs an additive function"));
        }
        check_interval(self.domain, a, b)?;
        self.int_expw(a, b)
    }

    pub(crate) fn int_plain(&self, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        Ok(match &self.node {
            FnNode::Constant { value } => value * (b - a),
            FnNode::AdditivePeriodic { period, profile } => periodic_integral(profile, *period, a, b),
            FnNode::LogPeriodicBlocks { base, pattern } => {
                blocks_integral(*base, pattern, a, b, |lo, hi| hi - lo)
            }
            FnNode::Sinusoid {
                amplitude,
                period,
                phase,
            } => sin_integral(*amplitude, TAU / period, *phase, a, b),
            FnNode::LogSinusoid {
                amplitude,
                ratio,
                phase,
            } => {
                let omega = TAU / ratio.ln();
                let anti = |t: f64| {
                    let u = omega * t.ln() + phase;
                    t * (u.sin() - omega * u.cos())
                };
                amplitude * (anti(b) - anti(a)) / (1.0 + omega * omega)
            }
            FnNode::Sum(l, r) => l.int_plain(a, b)? + r.int_plain(a, b)?,
            FnNode::Scale { factor, inner } => factor * inner.int_plain(a, b)?,
            FnNode::Shift { offset, inner } => inner.int_plain(a + offset, b + offset)?,
            FnNode::Dilate { factor, inner } => inner.int_plain(factor * a, factor * b)? / factor,
            FnNode::LiftedSequence(seq) => lifted_integral(seq, a, b, Weight::Unit, |lo, hi| hi - lo)?,
            FnNode::ExpWarp(inner) => inner.int_log(a.exp(), exp_checked(b)?)?,
        })
    }

    pub(crate) fn int_log(&self, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        Ok(match &self.node {
            FnNode::Constant { value } => value * ln_ratio(a, b),
            FnNode::LogPeriodicBlocks { base, pattern } => blocks_integral(*base, pattern, a, b, ln_ratio),
            FnNode::LogSinusoid {
                amplitude,
                ratio,
                phase,
            } => sin_integral(*amplitude, TAU / ratio.ln(), *phase, a.ln(), b.ln()),
            FnNode::Sum(l, r) => l.int_log(a, b)? + r.int_log(a, b)?,
            FnNode::Scale { factor, inner } => factor * inner.int_log(a, b)?,
            FnNode::Dilate { factor, inner } => inner.int_log(factor * a, factor * b)?,
            FnNode::LiftedSequence(seq) => lifted_integral(seq, a, b, Weight::LogStep, ln_ratio)?,
            FnNode::AdditivePeriodic { .. }
            | FnNode::Sinusoid { .. }
            | FnNode::Shift { .. }
            | FnNode::ExpWarp(_) => {
                return Err(Error::domain("log-weighted integral of an additive node"))
            }
        })
    }

    pub(crate) fn int_expw(&self, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        Ok(match &self.node {
            FnNode::Constant { value } => -value * (a - b).exp_m1(),
            FnNode::AdditivePeriodic { period, profile } => {
                let start = a.max(b + EXP_UNDERFLOW);
                let mut q = (start / period).floor();
                let mut acc = 0.0;
                'outer: loop {
                    let base = q * period;
                    for (i, s) in profile.iter().enumerate() {
                        let lo = (base + s.start).max(start);
                        let hi = (base + profile.get(i + 1).map_or(*period, |n| n.start)).min(b);
                        if lo >= b {
                            break 'outer;
                        }
                        if hi > lo && s.value != 0.0 {
                            acc += s.value * (hi - b).exp() * -(lo - hi).exp_m1();
                        }
                    }
                    q += 1.0;
                }
                acc
            }
            FnNode::Sinusoid {
                amplitude,
                period,
                phase,
            } => {
                let omega = TAU / period;
                let anti = |t: f64| {
                    let u = omega * t + phase;
                    u.sin() - omega * u.cos()
                };
                amplitude * (anti(b) - (a - b).exp() * anti(a)) / (1.0 + omega * omega)
            }
            FnNode::Sum(l, r) => l.int_expw(a, b)? + r.int_expw(a, b)?,
            FnNode::Scale { factor, inner } => factor * inner.int_expw(a, b)?,
            FnNode::Shift { offset, inner } => inner.int_expw(a + offset, b + offset)?,
            FnNode::ExpWarp(inner) => {
                let eb = exp_checked(b)?;
                inner.int_plain(a.exp(), eb)? / eb
            }
            FnNode::LogPeriodicBlocks { .. }
            | FnNode::LogSinusoid { .. }
            | FnNode::Dilate { .. }
            | FnNode::LiftedSequence(_) => {
                return Err(Error::domain("exp-weighted integral of a multiplicative node"))
            }
        })
    }
}
