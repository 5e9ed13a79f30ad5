//! Anchor grids and the per-θ window maximum.
//!
//! Anchors live in a coordinate `u` where every window has the same length
//! `ℓ` (`u = x` for `K`, `u = ln x` otherwise). Each level uses
//! - a uniform grid with spacing at most `stride_fraction·ℓ`,
//! - windows starting or ending at each jump of a step-type input,
//! - the two child windows of the previous level's maximiser. Consecutive
//!   windows nest exactly (`θ_{j−1}` window = two `θ_j` windows), so the
//!   parent average is a mean of the child averages and the per-θ maximum
//!   can only grow along the schedule.

use super::{Functional, SweepParams, ThetaEstimate};
use crate::error::{Error, Result};
use crate::fnspec::{FunctionSpec, SequenceSpec, Weight};
use crate::par;

/// Most jump-anchored windows per level.
const BREAK_CAP: usize = 8192;
/// Most uniform anchors per level.
const MAX_ANCHORS: f64 = (1u64 << 22) as f64;

#[derive(Debug, Clone, Copy)]
pub(crate) enum Target<'a> {
    Function(&'a FunctionSpec),
    Sequence(&'a SequenceSpec),
}

struct Level {
    theta: f64,
    ell: f64,
}

struct Sweeper<'a> {
    target: Target<'a>,
    functional: Functional,
}

impl Sweeper<'_> {
    fn at_u(&self, u: f64) -> f64 {
        match self.functional {
            Functional::K => u,
            Functional::P | Functional::Q => u.exp(),
            Functional::Pd | Functional::Qd => u.exp().round(),
        }
    }

    /// Anchor of the second half of a window twice as long.
    fn child(&self, x: f64, lv: &Level) -> f64 {
        match self.functional {
            Functional::K => x + lv.theta,
            Functional::P | Functional::Q => x * lv.theta,
            Functional::Pd | Functional::Qd => (x * lv.theta).floor() + 1.0,
        }
    }

    /// Anchors whose window starts at, or ends just before, jump `beta`.
    fn around_jump(&self, beta: f64, lv: &Level, out: &mut Vec<f64>) {
        match self.functional {
            Functional::K => out.extend([beta, beta - lv.theta]),
            Functional::P | Functional::Q => out.extend([beta, beta / lv.theta]),
            Functional::Pd | Functional::Qd => {
                let first = (beta / lv.theta).ceil();
                out.extend([beta, first - 1.0, first]);
            }
        }
    }

    /// Window average anchored at `x`; `None` for empty integer windows.
    fn window(&self, x: f64, lv: &Level) -> Result<Option<f64>> {
        Ok(match (self.target, self.functional) {
            // continuous windows are normalised by their rounded length
            (Target::Function(f), Functional::K) => {
                let end = x + lv.theta;
                Some(f.int_plain(x, end)? / (end - x))
            }
            (Target::Function(f), Functional::P) => {
                let end = x * lv.theta;
                Some(f.int_plain(x, end)? / (end - x))
            }
            (Target::Function(f), Functional::Q) => {
                let end = x * lv.theta;
                Some(f.int_log(x, end)? / ((end - x) / x).ln_1p())
            }
            (Target::Sequence(s), Functional::Pd | Functional::Qd) => {
                let n = x as u64;
                let last = (x * lv.theta).floor() as u64;
                if last < n + 1 {
                    return Ok(None);
                }
                Some(if self.functional == Functional::Pd {
                    s.range_sum(n, last + 1) / (lv.ell.exp_m1() * x)
                } else {
                    s.weighted_sum(n, last + 1, Weight::Reciprocal) / lv.ell
                })
            }
            _ => unreachable!("targets are matched to functionals by the caller"),
        })
    }

    /// Jump locations inside the tail, in anchor coordinates.
    fn jumps(&self, x_lo: f64, x_hi: f64) -> Vec<f64> {
        let found = match self.target {
            Target::Function(f) => f.breakpoints(x_lo, x_hi, BREAK_CAP),
            Target::Sequence(s) => s
                .change_points(x_lo as u64, x_hi as u64, BREAK_CAP)
                .map(|v| v.into_iter().map(|n| n as f64).collect()),
        };
        found.unwrap_or_default()
    }
}

/// Per-θ maxima along the schedule.
pub(crate) fn sweep(target: Target<'_>, params: &SweepParams) -> Result<Vec<ThetaEstimate>> {
    let sw = Sweeper {
        target,
        functional: params.functional,
    };
    let discrete = params.functional.is_discrete();
    let (x_lo, x_hi) = (params.x_min, params.x_max);
    let (u_lo, u_hi) = if params.functional == Functional::K {
        (x_lo, x_hi)
    } else {
        (x_lo.ln(), x_hi.ln())
    };
    let jumps = sw.jumps(x_lo, x_hi);
    let mut out = Vec::with_capacity(params.theta_schedule.len());
    let mut prev: Option<f64> = None;

    for &theta in &params.theta_schedule {
        let lv = Level {
            theta,
            ell: params.window_length(theta),
        };
        let span = u_hi - lv.ell - u_lo;
        if span <= 0.0 {
            return Err(Error::schedule(format!("tail range too short for window θ = {theta}")));
        }
        let spacing = (span / (params.anchors_per_theta - 1) as f64).min(params.stride_fraction * lv.ell);
        let steps = (span / spacing).ceil();
        if steps > MAX_ANCHORS {
            return Err(Error::schedule(format!(
                "θ = {theta} needs {steps} anchors over the tail range"
            )));
        }
        let steps = steps as usize;
        let mut xs: Vec<f64> = (0..=steps)
            .map(|i| sw.at_u(u_lo + span * i as f64 / steps as f64))
            .collect();
        let mut extra = Vec::new();
        for &beta in &jumps {
            sw.around_jump(beta, &lv, &mut extra);
        }
        extra.retain(|&x| x >= x_lo && x <= x_hi);
        xs.extend(extra);
        if let Some(x) = prev {
            xs.extend([x, sw.child(x, &lv)]);
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();

        let values = par::map(&xs, |&x| sw.window(x, &lv));
        let mut best: Option<(f64, f64)> = None;
        for (&x, v) in xs.iter().zip(values) {
            if let Some(v) = v? {
                if best.is_none_or(|(b, _)| v > b) {
                    best = Some((v, x));
                }
            }
        }
        let (estimate, anchor) = best.ok_or_else(|| {
            Error::schedule(format!(
                "every window is empty at θ = {theta}; raise n_max or coarsen the schedule"
            ))
        })?;
        debug_assert!(!discrete || anchor.fract() == 0.0);
        prev = Some(anchor);
        out.push(ThetaEstimate {
            theta,
            limsup_estimate: estimate,
            argmax_anchor: anchor,
        });
    }
    Ok(out)
}
