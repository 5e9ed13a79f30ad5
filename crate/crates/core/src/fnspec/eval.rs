use super::{FnNode, FunctionSpec, SeqNode, SequenceSpec, Step};
use crate::error::{Error, Result};
use std::f64::consts::TAU;

/// Start of block `k` for a real base. Every caller goes through this so that
/// evaluation, integration and breakpoint enumeration agree bit for bit.
///
/// Binary exponentiation with plain multiplications: `powi` has unspecified
/// precision and may be constant-folded differently from the runtime call.
pub(crate) fn block_start(base: f64, k: i64) -> f64 {
    let mut e = k.unsigned_abs();
    let (mut acc, mut sq) = (1.0f64, base);
    while e > 0 {
        if e & 1 == 1 {
            acc *= sq;
        }
        sq *= sq;
        e >>= 1;
    }
    if k < 0 {
        1.0 / acc
    } else {
        acc
    }
}

/// `k` with `block_start(base, k) ≤ x < block_start(base, k + 1)`, for `x ≥ 1`.
pub(crate) fn floor_log(base: f64, x: f64) -> i64 {
    let mut k = (x.ln() / base.ln()).floor() as i64;
    while block_start(base, k + 1) <= x {
        k += 1;
    }
    while k > 0 && block_start(base, k) > x {
        k -= 1;
    }
    k.max(0)
}

/// Integer `⌊log_b n⌋` for `n ≥ 1`.
pub(crate) fn floor_log_int(base: u64, n: u64) -> u32 {
    debug_assert!(n >= 1);
    n.ilog(base)
}

/// Start of integer block `k` (saturating at `u64::MAX`).
pub(crate) fn int_block_start(base: u64, k: u32) -> u64 {
    base.checked_pow(k).unwrap_or(u64::MAX)
}

pub(crate) fn profile_value(profile: &[Step], period: f64, x: f64) -> f64 {
    let t = x.rem_euclid(period);
    let idx = profile.partition_point(|s| s.start <= t);
    profile[idx.saturating_sub(1)].value
}

impl FunctionSpec {
    /// Pointwise value `f(x)`.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        self.domain.check(x)?;
        self.eval_unchecked(x)
    }

    pub(crate) fn eval_unchecked(&self, x: f64) -> Result<f64> {
        Ok(match &self.node {
            FnNode::Constant { value } => *value,
            FnNode::AdditivePeriodic { period, profile } => profile_value(profile, *period, x),
            FnNode::LogPeriodicBlocks { base, pattern } => {
                if pattern.at(floor_log(*base, x)) {
                    1.0
                } else {
                    0.0
                }
            }
            FnNode::Sinusoid {
                amplitude,
                period,
                phase,
            } => amplitude * (TAU * x / period + phase).sin(),
            FnNode::LogSinusoid {
                amplitude,
                ratio,
                phase,
            } => amplitude * (TAU * x.ln() / ratio.ln() + phase).sin(),
            FnNode::Sum(l, r) => l.eval_unchecked(x)? + r.eval_unchecked(x)?,
            FnNode::Scale { factor, inner } => factor * inner.eval_unchecked(x)?,
            FnNode::Shift { offset, inner } => inner.eval_unchecked(x + offset)?,
            FnNode::Dilate { factor, inner } => inner.eval_unchecked(factor * x)?,
            FnNode::LiftedSequence(seq) => {
                let n = x.floor();
                if n >= u64::MAX as f64 {
                    return Err(Error::domain(format!("x = {x} beyond the integer range")));
                }
                seq.evaluate(n as u64)
            }
            FnNode::ExpWarp(inner) => {
                let y = x.exp();
                if !y.is_finite() {
                    return Err(Error::OverflowGuard(format!("exp({x}) overflows")));
                }
                inner.eval_unchecked(y)?
            }
        })
    }
}

impl SequenceSpec {
    /// Value `f(n)`; total on `ℕ₀`.
    pub fn evaluate(&self, n: u64) -> f64 {
        match &self.node {
            SeqNode::PeriodicWord { values } => values[(n % values.len() as u64) as usize],
            SeqNode::ArithmeticIndicator { residue, modulus } => {
                if n % modulus == residue % modulus {
                    1.0
                } else {
                    0.0
                }
            }
            SeqNode::ExponentBlocks { base, pattern } => {
                if n == 0 {
                    0.0
                } else if pattern.at(floor_log_int(*base, n) as i64) {
                    1.0
                } else {
                    0.0
                }
            }
            SeqNode::ExplicitThenPeriodic { prefix, tail } => {
                let len = prefix.len() as u64;
                if n < len {
                    prefix[n as usize]
                } else {
                    tail[((n - len) % tail.len() as u64) as usize]
                }
            }
            SeqNode::AffineCombo {
                factor,
                inner,
                offset,
            } => factor * inner.evaluate(n) + offset,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fnspec::DomainTag;

    #[test]
    fn constant_evaluates_everywhere() {
        let c = FunctionSpec::constant(DomainTag::Multiplicative, 3.5).unwrap();
        assert_eq!(c.evaluate(10.0).unwrap(), 3.5);
    }

    #[test]
    fn log_blocks_follow_the_pattern() {
        let f = FunctionSpec::log_periodic_blocks(4.0, "10").unwrap();
        // ⌊log₄ 5⌋ = 1 → pattern[1] = 0; ⌊log₄ 2⌋ = 0 → pattern[0] = 1
        assert_eq!(f.evaluate(5.0).unwrap(), 0.0);
        assert_eq!(f.evaluate(2.0).unwrap(), 1.0);
        // right-open blocks: 4 and 16 start new blocks
        assert_eq!(f.evaluate(4.0).unwrap(), 0.0);
        assert_eq!(f.evaluate(16.0).unwrap(), 1.0);
        assert_eq!(f.evaluate(4f64.powi(11)).unwrap(), 0.0);
        assert_eq!(f.evaluate(4f64.powi(11) - 1.0).unwrap(), 1.0);
    }

    #[test]
    fn floor_log_is_exact_on_powers() {
        for k in 0..40 {
            let x = 4f64.powi(k);
            assert_eq!(floor_log(4.0, x), k as i64);
            if k > 0 {
                assert_eq!(floor_log(4.0, x * (1.0 - 1e-15)), k as i64 - 1);
            }
        }
        for k in 0..20 {
            let x = block_start(std::f64::consts::E, k);
            assert_eq!(floor_log(std::f64::consts::E, x), k);
        }
    }

    #[test]
    fn additive_periodic_wraps() {
        let f = FunctionSpec::additive_periodic(2.0, &[(0.0, 1.0), (1.0, 0.0)]).unwrap();
        assert_eq!(f.evaluate(3.25).unwrap(), 0.0);
        assert_eq!(f.evaluate(4.0).unwrap(), 1.0);
        assert_eq!(f.evaluate(0.999).unwrap(), 1.0);
        assert_eq!(f.evaluate(1.0).unwrap(), 0.0);
    }

    #[test]
    fn domain_is_enforced() {
        let m = FunctionSpec::constant(DomainTag::Multiplicative, 1.0).unwrap();
        let a = FunctionSpec::constant(DomainTag::Additive, 1.0).unwrap();
        assert!(matches!(m.evaluate(0.5), Err(Error::Domain(_))));
        assert!(matches!(a.evaluate(-0.1), Err(Error::Domain(_))));
        assert!(a.evaluate(0.0).is_ok());
        assert!(matches!(m.evaluate(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn sequences_evaluate() {
        let evens = SequenceSpec::arithmetic_indicator(0, 2).unwrap();
        assert_eq!(evens.evaluate(4), 1.0);
        assert_eq!(evens.evaluate(7), 0.0);
        let blocks = SequenceSpec::exponent_blocks(4, "10").unwrap();
        // ⌊log₄ 17⌋ = 2, pattern[2 mod 2] = pattern[0] = 1
        assert_eq!(blocks.evaluate(17), 1.0);
        assert_eq!(blocks.evaluate(0), 0.0);
        assert_eq!(blocks.evaluate(3), 1.0);
        assert_eq!(blocks.evaluate(4), 0.0);
        assert_eq!(blocks.evaluate(16), 1.0);
        let etp = SequenceSpec::explicit_then_periodic(&[9.0, 8.0], &[1.0, 2.0, 3.0]).unwrap();
        let got: Vec<f64> = (0..7).map(|n| etp.evaluate(n)).collect();
        assert_eq!(got, vec![9.0, 8.0, 1.0, 2.0, 3.0, 1.0, 2.0]);
    }

    #[test]
    fn exp_warp_guards_overflow() {
        let inner = FunctionSpec::constant(DomainTag::Multiplicative, 1.0).unwrap();
        let w = FunctionSpec::exp_warp(inner).unwrap();
        assert_eq!(w.evaluate(3.0).unwrap(), 1.0);
        assert!(matches!(w.evaluate(800.0), Err(Error::OverflowGuard(_))));
    }
}
