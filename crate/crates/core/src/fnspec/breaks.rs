//! Jump locations of step-type specs, used to anchor sliding windows and to
//! place mean samples on the extremes of step functions.

use super::eval::{block_start, floor_log, int_block_start};
use super::{FnNode, FunctionSpec, SeqNode, SequenceSpec};

/// Indices `r` of a cyclic word where the value differs from its predecessor.
fn cyclic_changes(values: &[f64]) -> Vec<u64> {
    let p = values.len();
    (0..p)
        .filter(|&r| values[r] != values[(r + p - 1) % p])
        .map(|r| r as u64)
        .collect()
}

/// Points `origin + q·period + r` (r in `residues`) lying in `[lo, hi]`,
/// or `None` beyond `cap`.
fn progression_points(
    origin: u64,
    period: u64,
    residues: &[u64],
    lo: u64,
    hi: u64,
    cap: usize,
) -> Option<Vec<u64>> {
    if residues.is_empty() || hi < lo || hi < origin {
        return Some(Vec::new());
    }
    let lo = lo.max(origin);
    let estimate = ((hi - lo) / period + 1).saturating_mul(residues.len() as u64);
    if estimate > cap as u64 + residues.len() as u64 {
        return None;
    }
    let mut out = Vec::new();
    let mut q = (lo - origin) / period;
    loop {
        let base = origin + q * period;
        if base > hi {
            break;
        }
        out.extend(
            residues
                .iter()
                .map(|r| base + r)
                .filter(|n| (lo..=hi).contains(n)),
        );
        q += 1;
    }
    (out.len() <= cap).then_some(out)
}

impl SequenceSpec {
    /// Indices `n ∈ [lo, hi]`, `n ≥ 1`, with `f(n) ≠ f(n−1)`, ascending;
    /// `None` if there are more than `cap` of them.
    pub fn change_points(&self, lo: u64, hi: u64, cap: usize) -> Option<Vec<u64>> {
        let lo = lo.max(1);
        if hi < lo {
            return Some(Vec::new());
        }
        let mut out = match &self.node {
            SeqNode::PeriodicWord { values } => {
                let changes = cyclic_changes(values);
                progression_points(0, values.len() as u64, &changes, lo, hi, cap)?
            }
            SeqNode::ArithmeticIndicator { residue, modulus } => {
                if *modulus == 1 {
                    Vec::new()
                } else {
                    let a = residue % modulus;
                    let mut r = vec![a, (a + 1) % modulus];
                    r.sort_unstable();
                    progression_points(0, *modulus, &r, lo, hi, cap)?
                }
            }
            SeqNode::ExponentBlocks { base, pattern } => {
                let mut out = Vec::new();
                if lo <= 1 && pattern.at(0) {
                    out.push(1);
                }
                let mut k = 1u32;
                loop {
                    let start = int_block_start(*base, k);
                    if start > hi || start == u64::MAX {
                        break;
                    }
                    if start >= lo && pattern.at(k as i64) != pattern.at(k as i64 - 1) {
                        out.push(start);
                    }
                    k += 1;
                }
                out
            }
            SeqNode::ExplicitThenPeriodic { prefix, tail } => {
                let len = prefix.len() as u64;
                let mut out: Vec<u64> = (lo..=hi.min(len))
                    .filter(|&n| self.evaluate(n) != self.evaluate(n - 1))
                    .collect();
                let changes: Vec<u64> = cyclic_changes(tail);
                let rest = progression_points(len, tail.len() as u64, &changes, lo.max(len + 1), hi, cap)?;
                out.extend(rest);
                out
            }
            SeqNode::AffineCombo { factor, inner, .. } => {
                if *factor == 0.0 {
                    Vec::new()
                } else {
                    inner.change_points(lo, hi, cap)?
                }
            }
        };
        out.sort_unstable();
        out.dedup();
        (out.len() <= cap).then_some(out)
    }
}

impl FunctionSpec {
    /// Jump locations in the open interval `(a, b)`, ascending; `None` when
    /// there are more than `cap`. Sinusoidal parts contribute nothing.
    pub fn breakpoints(&self, a: f64, b: f64, cap: usize) -> Option<Vec<f64>> {
        let mut out = Vec::new();
        self.collect_breaks(a, b, cap, &mut out)?;
        out.retain(|&x| x > a && x < b);
        out.sort_by(f64::total_cmp);
        out.dedup();
        (out.len() <= cap).then_some(out)
    }

    fn collect_breaks(&self, a: f64, b: f64, cap: usize, out: &mut Vec<f64>) -> Option<()> {
        if b.is_nan() || a.is_nan() || b <= a {
            return Some(());
        }
        match &self.node {
            FnNode::Constant { .. } | FnNode::Sinusoid { .. } | FnNode::LogSinusoid { .. } => {}
            FnNode::AdditivePeriodic { period, profile } => {
                let p = profile.len();
                let starts: Vec<f64> = (0..p)
                    .filter(|&i| profile[i].value != profile[(i + p - 1) % p].value)
                    .map(|i| profile[i].start)
                    .collect();
                if starts.is_empty() {
                    return Some(());
                }
                let periods = ((b - a) / period).ceil() + 1.0;
                if periods * starts.len() as f64 > cap as f64 + starts.len() as f64 {
                    return None;
                }
                let mut q = (a / period).floor();
                while q * period <= b {
                    out.extend(starts.iter().map(|s| q * period + s));
                    q += 1.0;
                }
            }
            FnNode::LogPeriodicBlocks { base, pattern } => {
                let (k0, k1) = (floor_log(*base, a.max(1.0)), floor_log(*base, b));
                if (k1 - k0) as usize > cap.saturating_mul(pattern.len()) {
                    return None;
                }
                out.extend(
                    (k0.max(1)..=k1 + 1)
                        .filter(|&k| pattern.at(k) != pattern.at(k - 1))
                        .map(|k| block_start(*base, k)),
                );
            }
            FnNode::Sum(l, r) => {
                l.collect_breaks(a, b, cap, out)?;
                r.collect_breaks(a, b, cap, out)?;
            }
            FnNode::Scale { factor, inner } => {
                if *factor != 0.0 {
                    inner.collect_breaks(a, b, cap, out)?;
                }
            }
            FnNode::Shift { offset, inner } => {
                let mut v = Vec::new();
                inner.collect_breaks(a + offset, b + offset, cap, &mut v)?;
                out.extend(v.into_iter().map(|x| x - offset));
            }
            FnNode::Dilate { factor, inner } => {
                let mut v = Vec::new();
                inner.collect_breaks(a * factor, b * factor, cap, &mut v)?;
                out.extend(v.into_iter().map(|x| x / factor));
            }
            FnNode::LiftedSequence(seq) => {
                if b >= u64::MAX as f64 {
                    return None;
                }
                let pts = seq.change_points(a.ceil() as u64, b.floor() as u64, cap)?;
                out.extend(pts.into_iter().map(|n| n as f64));
            }
            FnNode::ExpWarp(inner) => {
                let eb = b.exp();
                if !eb.is_finite() {
                    return None;
                }
                let mut v = Vec::new();
                inner.collect_breaks(a.exp(), eb, cap, &mut v)?;
                out.extend(v.into_iter().map(f64::ln));
            }
        }
        (out.len() <= cap.saturating_mul(4)).then_some(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fnspec::lift_v;

    fn brute_changes(seq: &SequenceSpec, lo: u64, hi: u64) -> Vec<u64> {
        (lo.max(1)..=hi)
            .filter(|&n| seq.evaluate(n) != seq.evaluate(n - 1))
            .collect()
    }

    #[test]
    fn sequence_change_points_match_brute_force() {
        let seqs = vec![
            SequenceSpec::periodic_word(&[1.0, 0.0, 1.0]).unwrap(),
            SequenceSpec::periodic_word(&[2.0]).unwrap(),
            SequenceSpec::arithmetic_indicator(3, 5).unwrap(),
            SequenceSpec::arithmetic_indicator(0, 1).unwrap(),
            SequenceSpec::exponent_blocks(4, "10").unwrap(),
            SequenceSpec::exponent_blocks(2, "110").unwrap(),
            SequenceSpec::explicit_then_periodic(&[1.0, 1.0, 0.0, 5.0], &[5.0, 0.0]).unwrap(),
            SequenceSpec::affine(0.5, SequenceSpec::arithmetic_indicator(1, 2).unwrap(), 1.0).unwrap(),
        ];
        for s in &seqs {
            for &(lo, hi) in &[(0u64, 50u64), (7, 300), (1000, 5000)] {
                assert_eq!(
                    s.change_points(lo, hi, 100_000).unwrap(),
                    brute_changes(s, lo, hi),
                    "{s:?} [{lo},{hi}]"
                );
            }
        }
        let evens = SequenceSpec::arithmetic_indicator(0, 2).unwrap();
        assert!(evens.change_points(1, 1_000_000, 100).is_none());
    }

    #[test]
    fn function_breakpoints() {
        let f = FunctionSpec::log_periodic_blocks(4.0, "10").unwrap();
        assert_eq!(f.breakpoints(1.0, 100.0, 100).unwrap(), vec![4.0, 16.0, 64.0]);
        let sq = FunctionSpec::additive_periodic(2.0, &[(0.0, 1.0), (1.0, 0.0)]).unwrap();
        assert_eq!(sq.breakpoints(0.5, 4.5, 100).unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
        let sh = FunctionSpec::shift(0.25, sq.clone()).unwrap();
        assert_eq!(sh.breakpoints(0.5, 2.0, 100).unwrap(), vec![0.75, 1.75]);
        assert!(sq.breakpoints(0.0, 1e6, 100).is_none());
        let s = FunctionSpec::sinusoid(1.0, 1.0, 0.0).unwrap();
        assert!(s.breakpoints(0.0, 10.0, 10).unwrap().is_empty());
        let lifted = lift_v(&SequenceSpec::exponent_blocks(4, "10").unwrap());
        assert_eq!(lifted.breakpoints(1.0, 70.0, 10).unwrap(), vec![4.0, 16.0, 64.0]);
    }

    #[test]
    fn values_are_constant_between_breakpoints() {
        let f = FunctionSpec::sum(
            FunctionSpec::dilate(3.0, FunctionSpec::log_periodic_blocks(2.0, "110").unwrap()).unwrap(),
            lift_v(&SequenceSpec::periodic_word(&[0.0, 0.0, 1.0, 1.0, 1.0]).unwrap()),
        )
        .unwrap();
        let (a, b) = (1.0, 200.0);
        let mut pts = vec![a];
        pts.extend(f.breakpoints(a, b, 10_000).unwrap());
        pts.push(b);
        for w in pts.windows(2) {
            let v0 = f.evaluate(w[0] + 1e-9 * w[0]).unwrap();
            for t in 1..10 {
                let x = w[0] + (w[1] - w[0]) * t as f64 / 10.0;
                assert_eq!(f.evaluate(x).unwrap(), v0, "jump inside ({}, {})", w[0], w[1]);
            }
        }
    }
}
