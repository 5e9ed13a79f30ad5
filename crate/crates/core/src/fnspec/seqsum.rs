//! Closed-form window sums `Σ_{i=lo}^{hi-1} f(i)·w(i)` over sequence specs.

use super::eval::{floor_log_int, int_block_start};
use super::{SeqNode, SequenceSpec};
use crate::special::{digamma_diff, ln_gamma_shift};

/// Below this many terms the sums are taken term by term.
const DIRECT_TERMS: u64 = 64;

/// Per-index weight of a window sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    /// `w(i) = 1`
    Unit,
    /// `w(i) = 1/i`
    Reciprocal,
    /// `w(i) = ln(1 + 1/i) = ∫_i^{i+1} dt/t`
    LogStep,
}

impl Weight {
    pub fn at(self, i: u64) -> f64 {
        let x = i as f64;
        match self {
            Weight::Unit => 1.0,
            Weight::Reciprocal => 1.0 / x,
            Weight::LogStep => (1.0 / x).ln_1p(),
        }
    }

    /// `Σ_{i=lo}^{hi-1} w(i)`.
    fn run(self, lo: u64, hi: u64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        match self {
            Weight::Unit => (hi - lo) as f64,
            _ if hi - lo <= DIRECT_TERMS => (lo..hi).map(|i| self.at(i)).sum(),
            Weight::Reciprocal => digamma_diff(lo as f64, hi as f64),
            Weight::LogStep => ((hi - lo) as f64 / lo as f64).ln_1p(),
        }
    }

    /// `Σ w(i)` over `i = offset + period·k` lying in `[lo, hi)`.
    fn progression(self, period: u64, offset: u64, lo: u64, hi: u64) -> f64 {
        let first = |bound: u64| {
            if bound <= offset {
                0
            } else {
                (bound - offset).div_ceil(period)
            }
        };
        let (k0, k1) = (first(lo), first(hi));
        if k1 <= k0 {
            return 0.0;
        }
        let count = k1 - k0;
        match self {
            Weight::Unit => count as f64,
            _ if count <= DIRECT_TERMS => (k0..k1).map(|k| self.at(offset + period * k)).sum(),
            Weight::Reciprocal => {
                let p = period as f64;
                let shift = offset as f64 / p;
                digamma_diff(k0 as f64 + shift, k1 as f64 + shift) / p
            }
            Weight::LogStep => {
                let p = period as f64;
                let shift = offset as f64 / p;
                ln_gamma_shift(k1 as f64 + shift, 1.0 / p) - ln_gamma_shift(k0 as f64 + shift, 1.0 / p)
            }
        }
    }
}

impl SequenceSpec {
    /// `Σ_{i=lo}^{hi-1} f(i)`.
    pub fn range_sum(&self, lo: u64, hi: u64) -> f64 {
        self.weighted_sum(lo, hi, Weight::Unit)
    }

    /// `Σ_{i=lo}^{hi-1} f(i)·w(i)`. For the singular weights the index `0`
    /// is dropped (discrete means start at 1).
    pub fn weighted_sum(&self, lo: u64, hi: u64, weight: Weight) -> f64 {
        let lo = if weight == Weight::Unit { lo } else { lo.max(1) };
        if hi <= lo {
            return 0.0;
        }
        if hi - lo <= DIRECT_TERMS {
            return (lo..hi).map(|i| self.evaluate(i) * weight.at(i)).sum();
        }
        self.closed_sum(lo, hi, weight)
    }

    fn closed_sum(&self, lo: u64, hi: u64, weight: Weight) -> f64 {
        match &self.node {
            SeqNode::PeriodicWord { values } => {
                let p = values.len() as u64;
                values
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(r, &v)| v * weight.progression(p, r as u64, lo, hi))
                    .sum()
            }
            SeqNode::ArithmeticIndicator { residue, modulus } => {
                weight.progression(*modulus, residue % modulus, lo, hi)
            }
            SeqNode::ExponentBlocks { base, pattern } => {
                let lo = lo.max(1);
                if hi <= lo {
                    return 0.0;
                }
                let (k_lo, k_hi) = (floor_log_int(*base, lo), floor_log_int(*base, hi - 1));
                (k_lo..=k_hi)
                    .filter(|&k| pattern.at(k as i64))
                    .map(|k| {
                        let a = int_block_start(*base, k).max(lo);
                        let b = int_block_start(*base, k + 1).min(hi);
                        weight.run(a, b)
                    })
                    .sum()
            }
            SeqNode::ExplicitThenPeriodic { prefix, tail } => {
                let len = prefix.len() as u64;
                let head: f64 = (lo..hi.min(len))
                    .map(|i| prefix[i as usize] * weight.at(i))
                    .sum();
                let p = tail.len() as u64;
                let rest: f64 = tail
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(r, &v)| v * weight.progression(p, len + r as u64, lo.max(len), hi))
                    .sum();
                head + rest
            }
            SeqNode::AffineCombo {
                factor,
                inner,
                offset,
            } => {
                let mut s = factor * inner.closed_sum(lo, hi, weight);
                if *offset != 0.0 {
                    s += offset * weight.run(lo, hi);
                }
                s
            }
        }
    }
}
