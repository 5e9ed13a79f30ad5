//! The change of variables `W` between the two half-lines and the lift/average
//! pair `V`, `V₁` between sequences and step functions.

use super::{DomainTag, FnNode, FunctionSpec, SequenceSpec};
use crate::error::{Error, Result};

/// Integration tolerance used by [`V1Sequence`]; every node integrates in
/// closed form, so this only has to be positive.
const V1_TOL: f64 = 1e-12;

/// `(Wf)(x) = f(eˣ)`: maps a multiplicative spec to an additive one,
/// structurally where a counterpart node exists and through
/// [`FnNode::ExpWarp`] otherwise. The bound is preserved.
pub fn transform_w(spec: &FunctionSpec) -> Result<FunctionSpec> {
    if spec.domain() != DomainTag::Multiplicative {
        return Err(Error::spec("W applies to multiplicative functions only"));
    }
    let image = match spec.node() {
        FnNode::Constant { value } => {
            FunctionSpec::constant(DomainTag::Additive, *value)?.with_bound(spec.bound())?
        }
        FnNode::LogPeriodicBlocks { base, pattern } => {
            let step = base.ln();
            let mut profile: Vec<(f64, f64)> = Vec::with_capacity(pattern.len());
            for (k, &on) in pattern.bits().iter().enumerate() {
                let v = if on { 1.0 } else { 0.0 };
                if profile.last().map(|p| p.1) != Some(v) {
                    profile.push((k as f64 * step, v));
                }
            }
            FunctionSpec::additive_periodic(pattern.len() as f64 * step, &profile)?
                .with_bound(spec.bound())?
        }
        FnNode::LogSinusoid {
            amplitude,
            ratio,
            phase,
        } => FunctionSpec::sinusoid(*amplitude, ratio.ln(), *phase)?.with_bound(spec.bound())?,
        FnNode::Sum(l, r) => FunctionSpec::sum(transform_w(l)?, transform_w(r)?)?,
        FnNode::Scale { factor, inner } => FunctionSpec::scale(*factor, transform_w(inner)?)?,
        FnNode::Dilate { factor, inner } => FunctionSpec::shift(factor.ln(), transform_w(inner)?)?,
        FnNode::LiftedSequence(_) => FunctionSpec::exp_warp(spec.clone())?,
        FnNode::AdditivePeriodic { .. }
        | FnNode::Sinusoid { .. }
        | FnNode::Shift { .. }
        | FnNode::ExpWarp(_) => {
            return Err(Error::spec("additive node inside a multiplicative tree"));
        }
    };
    Ok(image)
}

/// `(Vf)(x) = f(⌊x⌋)`.
pub fn lift_v(seq: &SequenceSpec) -> FunctionSpec {
    FunctionSpec::lifted(seq.clone())
}

/// `(V₁f)(n) = ∫_n^{n+1} f(t) dt`, with `(V₁f)(0) = 0`.
pub fn discretize_v1(spec: &FunctionSpec) -> Result<V1Sequence> {
    if spec.domain() != DomainTag::Multiplicative {
        return Err(Error::spec("V₁ applies to multiplicative functions only"));
    }
    Ok(V1Sequence { spec: spec.clone() })
}

/// Sequence evaluator produced by [`discretize_v1`].
#[derive(Debug, Clone, PartialEq)]
pub struct V1Sequence {
    spec: FunctionSpec,
}

impl V1Sequence {
    pub fn value(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        let x = n as f64;
        self.spec.integrate(x, x + 1.0, V1_TOL)
    }

    pub fn bound(&self) -> f64 {
        self.spec.bound()
    }

    /// Structural sequence form when one exists (constants, lifted
    /// sequences and their scalings).
    pub fn as_sequence_spec(&self) -> Option<SequenceSpec> {
        fn structural(f: &FunctionSpec) -> Option<SequenceSpec> {
            match f.node() {
                FnNode::Constant { value } => SequenceSpec::periodic_word(&[*value]).ok(),
                FnNode::LiftedSequence(s) => Some(s.clone()),
                FnNode::Scale { factor, inner } => {
                    SequenceSpec::affine(*factor, structural(inner)?, 0.0).ok()
                }
                _ => None,
            }
        }
        structural(&self.spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn w_of_e_blocks_is_the_square_wave() {
        let f = FunctionSpec::log_periodic_blocks(E, "10").unwrap();
        let w = transform_w(&f).unwrap();
        let expected = FunctionSpec::additive_periodic(2.0, &[(0.0, 1.0), (1.0, 0.0)]).unwrap();
        assert_eq!(w, expected);
    }

    #[test]
    fn w_of_dilated_log_sinusoid_is_a_shifted_sinusoid() {
        let f = FunctionSpec::dilate(E * E, FunctionSpec::log_sinusoid(1.0, E, 0.0).unwrap()).unwrap();
        let w = transform_w(&f).unwrap();
        match w.node() {
            FnNode::Shift { offset, inner } => {
                assert!(close(*offset, 2.0, 1e-15));
                assert_eq!(inner.node(), &FnNode::Sinusoid { amplitude: 1.0, period: 1.0, phase: 0.0 });
            }
            other => panic!("unexpected image {other:?}"),
        }
        // pointwise against f(eˣ)
        for i in 0..100 {
            let x = 0.037 + 0.191 * i as f64;
            let lhs = w.evaluate(x).unwrap();
            let rhs = f.evaluate(x.exp()).unwrap();
            assert!(close(lhs, rhs, 1e-9), "x={x}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn w_rejects_additive_input() {
        let a = FunctionSpec::constant(DomainTag::Additive, 1.0).unwrap();
        assert!(matches!(transform_w(&a), Err(Error::Spec(_))));
    }

    #[test]
    fn lift_and_average() {
        let evens = SequenceSpec::arithmetic_indicator(0, 2).unwrap();
        let f = lift_v(&evens);
        assert_eq!(f.evaluate(4.7).unwrap(), 1.0);
        let five = lift_v(&SequenceSpec::periodic_word(&[5.0]).unwrap());
        for x in [1.0, 2.5, 1e6 + 0.3] {
            assert_eq!(five.evaluate(x).unwrap(), 5.0);
        }
        let blocks = SequenceSpec::exponent_blocks(4, "10").unwrap();
        assert_eq!(lift_v(&blocks).evaluate(16.0).unwrap(), blocks.evaluate(16));

        let v1 = discretize_v1(&FunctionSpec::log_periodic_blocks(4.0, "10").unwrap()).unwrap();
        assert_eq!(v1.value(3).unwrap(), 1.0);
        assert_eq!(v1.value(0).unwrap(), 0.0);
        let c = discretize_v1(&FunctionSpec::constant(DomainTag::Multiplicative, 0.3).unwrap()).unwrap();
        assert_eq!(c.value(17).unwrap(), 0.3);
        assert_eq!(c.as_sequence_spec().unwrap(), SequenceSpec::periodic_word(&[0.3]).unwrap());

        let round = discretize_v1(&f).unwrap();
        assert_eq!(round.as_sequence_spec().unwrap(), evens);
        for n in 1..200 {
            assert_eq!(round.value(n).unwrap(), evens.evaluate(n));
        }
    }
}
