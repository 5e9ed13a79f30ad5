//! Numeric checks of the identities relating the means and functionals, run
//! over a corpus of spec files and reported as self-verifying records.

use crate::error::{Error, Result};
use crate::fnspec::{lift_v, transform_w, DomainTag, FunctionSpec, SequenceSpec, SpecInput};
use crate::means::{cesaro_mean, cesaro_mean_seq, exp_mean, Criterion, LimitEstimate};
use crate::special::{digamma, trigamma};
use crate::sublinear::{
    functional_range, k_upper, p_upper, p_upper_seq, q_upper, q_upper_seq, Functional, SweepConfig,
    SweepReport,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::Path;

/// Slack allowed on inequality checks.
pub const BOUND_SLACK: f64 = 1e-9;
/// Tolerance of the exact finite window identity.
pub const EXACT_TOL: f64 = 1e-9;
const INT_TOL: f64 = 1e-12;

/// `(n, θ)` grid of the finite window identities.
pub fn window_grid() -> Vec<(u64, f64)> {
    (1..=50u64)
        .flat_map(|n| [1.1, 1.5, 2.0, 4.0].into_iter().map(move |t| (n, t)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// `|lhs − rhs| ≤ tolerance`
    Equality,
    /// `lhs ≤ rhs + tolerance`
    Bound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    /// The identity is vacuous on this input (its hypothesis fails).
    Skipped,
    /// The check could not be evaluated.
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub input_index: usize,
    pub input_label: String,
    pub kind: CheckKind,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub tolerance: f64,
    pub outcome: Outcome,
    pub passed: bool,
    pub inputs: Value,
    pub diagnostics: Value,
}

impl IdentityReport {
    fn compared(name: &str, kind: CheckKind, lhs: f64, rhs: f64, tolerance: f64, diagnostics: Value) -> Self {
        let mut r = IdentityReport {
            name: name.to_owned(),
            input_index: 0,
            input_label: String::new(),
            kind,
            lhs: Some(lhs),
            rhs: Some(rhs),
            tolerance,
            outcome: Outcome::Fail,
            passed: false,
            inputs: Value::Null,
            diagnostics,
        };
        r.passed = r.recompute();
        r.outcome = if r.passed { Outcome::Pass } else { Outcome::Fail };
        r
    }

    fn skipped(name: &str, reason: &str, diagnostics: Value) -> Self {
        IdentityReport {
            name: name.to_owned(),
            input_index: 0,
            input_label: String::new(),
            kind: CheckKind::Equality,
            lhs: None,
            rhs: None,
            tolerance: 0.0,
            outcome: Outcome::Skipped,
            passed: false,
            inputs: Value::Null,
            diagnostics: json!({ "reason": reason, "detail": diagnostics }),
        }
    }

    fn errored(name: &str, err: &Error) -> Self {
        IdentityReport {
            name: name.to_owned(),
            input_index: 0,
            input_label: String::new(),
            kind: CheckKind::Equality,
            lhs: None,
            rhs: None,
            tolerance: 0.0,
            outcome: Outcome::Error,
            passed: false,
            inputs: Value::Null,
            diagnostics: json!({ "error": err.kind(), "message": err.to_string() }),
        }
    }

    /// Re-derive the verdict from the stored numbers.
    pub fn recompute(&self) -> bool {
        match (self.lhs, self.rhs) {
            (Some(l), Some(r)) => match self.kind {
                CheckKind::Equality => (l - r).abs() <= self.tolerance,
                CheckKind::Bound => l <= r + self.tolerance,
            },
            _ => false,
        }
    }

    fn with_input(mut self, index: usize, label: &str, inputs: &Value) -> Self {
        self.input_index = index;
        self.input_label = label.to_owned();
        self.inputs = inputs.clone();
        self
    }
}

/// Grids used by the suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteParams {
    pub sweep: SweepConfig,
    /// Grid of `M` and `M_d`.
    pub mean: Criterion,
    /// Grid of `R`.
    pub exp_mean: Criterion,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            sweep: SweepConfig::default(),
            mean: Criterion::multiplicative_default(),
            exp_mean: Criterion::additive_default(),
        }
    }
}

fn sweep_table(r: &SweepReport) -> Value {
    json!({
        "functional": r.functional,
        "direction": r.direction,
        "monotone_ok": r.monotone_ok,
        "tolerance": r.tolerance,
        "per_theta": r.per_theta,
    })
}

fn equality_of_sweeps(name: &str, a: &SweepReport, b: &SweepReport) -> IdentityReport {
    let diag = json!({ "lhs_sweep": sweep_table(a), "rhs_sweep": sweep_table(b) });
    IdentityReport::compared(name, CheckKind::Equality, a.value, b.value, a.tolerance + b.tolerance, diag)
}

/// `P̄(f) = K̄(Wf)`.
pub fn check_p_equals_kw(spec: &FunctionSpec, params: &SuiteParams) -> Result<IdentityReport> {
    let p = p_upper(spec, &params.sweep.params(Functional::P))?;
    let k = k_upper(&transform_w(spec)?, &params.sweep.params(Functional::K))?;
    Ok(equality_of_sweeps("P_equals_KW", &p, &k))
}

/// `Q̄(f) = K̄(Wf)`.
pub fn check_q_equals_kw(spec: &FunctionSpec, params: &SuiteParams) -> Result<IdentityReport> {
    let q = q_upper(spec, &params.sweep.params(Functional::Q))?;
    let k = k_upper(&transform_w(spec)?, &params.sweep.params(Functional::K))?;
    Ok(equality_of_sweeps("Q_equals_KW", &q, &k))
}

/// `P̄(f) = Q̄(f)`.
pub fn check_p_equals_q(spec: &FunctionSpec, params: &SuiteParams) -> Result<IdentityReport> {
    let p = p_upper(spec, &params.sweep.params(Functional::P))?;
    let q = q_upper(spec, &params.sweep.params(Functional::Q))?;
    Ok(equality_of_sweeps("P_equals_Q", &p, &q))
}

/// `P̄_d(f) = Q̄_d(f)`.
pub fn check_qd_equals_pd(seq: &SequenceSpec, params: &SuiteParams) -> Result<IdentityReport> {
    let p = p_upper_seq(seq, &params.sweep.params(Functional::Pd))?;
    let q = q_upper_seq(seq, &params.sweep.params(Functional::Qd))?;
    Ok(equality_of_sweeps("Qd_equals_Pd", &q, &p))
}

/// The single mean matching `functional` on `input`.
pub fn matching_mean(input: &SpecInput, functional: Functional, params: &SuiteParams) -> Result<LimitEstimate> {
    match (input, functional) {
        (SpecInput::Function(f), Functional::K) => exp_mean(f, &params.exp_mean),
        (SpecInput::Function(f), Functional::P | Functional::Q) => cesaro_mean(f, &params.mean),
        (SpecInput::Sequence(s), Functional::Pd | Functional::Qd) => cesaro_mean_seq(s, &params.mean),
        _ => Err(Error::domain(format!("no mean pairs with {functional} on this input"))),
    }
}

/// When the matching mean converges to `α`, the whole range of the
/// functional collapses onto `α`.
pub fn check_mean_collapse(input: &SpecInput, functional: Functional, params: &SuiteParams) -> Result<IdentityReport> {
    let name = format!("mean_collapse.{functional}");
    let mean = matching_mean(input, functional, params)?;
    let mean_diag = json!({ "kind": mean.kind, "lo": mean.lo, "hi": mean.hi, "band_tol": mean.criterion.band_tol });
    if !mean.converged {
        return Ok(IdentityReport::skipped(&name, "mean does not converge", mean_diag));
    }
    let alpha = mean.value();
    let range = functional_range(input, &params.sweep.params(functional))?;
    let far = if (range.hi - alpha).abs() >= (range.lo - alpha).abs() { range.hi } else { range.lo };
    let diag = json!({
        "mean": mean_diag,
        "range": [range.lo, range.hi],
        "upper": sweep_table(&range.upper),
        "lower": sweep_table(&range.lower),
    });
    Ok(IdentityReport::compared(
        &name,
        CheckKind::Equality,
        far,
        alpha,
        mean.criterion.band_tol + range.tolerance,
        diag,
    ))
}

/// Finite identity `∫_n^{⌊θn⌋+1} Vf = Σ_{i=n}^{⌊θn⌋} f(i)` over
/// [`window_grid`], reporting the worst pair.
pub fn check_window_identity(seq: &SequenceSpec) -> Result<IdentityReport> {
    let lifted = lift_v(seq);
    let mut worst: Option<(f64, f64, f64, u64, f64)> = None;
    for (n, theta) in window_grid() {
        let last = (theta * n as f64).floor() as u64;
        let integral = lifted.integrate(n as f64, (last + 1) as f64, INT_TOL)?;
        let direct: f64 = (n..=last).map(|i| seq.evaluate(i)).sum();
        let diff = (integral - direct).abs();
        if worst.is_none_or(|w| diff > w.0) {
            worst = Some((diff, integral, direct, n, theta));
        }
    }
    let (diff, integral, direct, n, theta) = worst.expect("grid is non-empty");
    Ok(IdentityReport::compared(
        "discrete_continuous.exact",
        CheckKind::Equality,
        integral,
        direct,
        EXACT_TOL,
        json!({ "max_abs_diff": diff, "witness": { "n": n, "theta": theta }, "pairs": window_grid().len() }),
    ))
}

/// `P̄_d(f) = P̄(Vf)`.
pub fn check_discrete_asymptotic(seq: &SequenceSpec, params: &SuiteParams) -> Result<IdentityReport> {
    let d = p_upper_seq(seq, &params.sweep.params(Functional::Pd))?;
    let c = p_upper(&lift_v(seq), &params.sweep.params(Functional::P))?;
    Ok(equality_of_sweeps("discrete_continuous.asymptotic", &d, &c))
}

/// Both halves of the discrete/continuous correspondence.
pub fn check_discrete_continuous(seq: &SequenceSpec, params: &SuiteParams) -> Result<[IdentityReport; 2]> {
    Ok([check_window_identity(seq)?, check_discrete_asymptotic(seq, params)?])
}

/// `|∫_n^{⌊θn⌋+1} Vf dt/t − Σ_{i=n}^{⌊θn⌋} f(i)/i| ≤ ‖f‖·π²/12`.
pub fn check_logsum_bound(seq: &SequenceSpec, n: u64, theta: f64) -> Result<IdentityReport> {
    if n < 1 || theta.is_nan() || theta <= 1.0 {
        return Err(Error::domain("logsum bound needs n ≥ 1 and θ > 1"));
    }
    let last = (theta * n as f64).floor() as u64;
    let integral = lift_v(seq).integrate_log(n as f64, (last + 1) as f64, INT_TOL)?;
    let sum: f64 = (n..=last).map(|i| seq.evaluate(i) / i as f64).sum();
    let lhs = (integral - sum).abs();
    let bound = seq.bound();
    let rhs = bound * std::f64::consts::PI.powi(2) / 12.0;
    // Σ_{i≥n} (1/i − ln(1 + 1/i)) = ln n − ψ(n) ≤ ψ'(n)/2
    let x = n as f64;
    let sharper = bound * (x.ln() - digamma(x));
    let half_trigamma = bound * 0.5 * trigamma(x);
    Ok(IdentityReport::compared(
        "logsum_bound",
        CheckKind::Bound,
        lhs,
        rhs,
        BOUND_SLACK,
        json!({
            "n": n,
            "theta": theta,
            "integral": integral,
            "sum": sum,
            "tail_bound": sharper,
            "tail_bound_holds": lhs <= sharper + BOUND_SLACK,
            "half_trigamma_bound": half_trigamma,
            "half_trigamma_holds": lhs <= half_trigamma + BOUND_SLACK,
        }),
    ))
}

/// `(n, θ)` pairs at which the suite checks the log-sum bound.
const SUITE_LOGSUM: [(u64, f64); 3] = [(1, 2.0), (10, 1.5), (100, 1.1)];

/// One corpus element: a label and the parsed spec (or why parsing failed).
#[derive(Debug, Clone)]
pub struct CorpusItem {
    pub label: String,
    pub spec: Result<SpecInput>,
}

impl CorpusItem {
    pub fn parse(label: impl Into<String>, text: &str) -> Self {
        CorpusItem {
            label: label.into(),
            spec: SpecInput::from_json(text),
        }
    }
}

/// Every `*.json` file in `dir`, in file-name order.
pub fn load_corpus_dir(dir: &Path) -> Result<Vec<CorpusItem>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::Parse(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    Ok(paths
        .into_iter()
        .map(|p| {
            let label = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            match std::fs::read_to_string(&p) {
                Ok(text) => CorpusItem::parse(label, &text),
                Err(e) => CorpusItem {
                    label,
                    spec: Err(Error::Parse(format!("{}: {e}", p.display()))),
                },
            }
        })
        .collect())
}

/// The eight reference fixtures, labelled as in the shipped corpus files.
pub fn default_corpus() -> Vec<(String, SpecInput)> {
    let f = |label: &str, spec: Result<FunctionSpec>| (label.to_owned(), SpecInput::Function(spec.expect("fixture")));
    let s = |label: &str, spec: Result<SequenceSpec>| (label.to_owned(), SpecInput::Sequence(spec.expect("fixture")));
    vec![
        f("01_constant.json", FunctionSpec::constant(DomainTag::Multiplicative, 0.7)),
        f(
            "02_square_wave.json",
            FunctionSpec::additive_periodic(2.0, &[(0.0, 1.0), (1.0, 0.0)]),
        ),
        f("03_sinusoid.json", FunctionSpec::sinusoid(1.0, 1.0, 0.0)),
        f("04_log_blocks.json", FunctionSpec::log_periodic_blocks(4.0, "10")),
        f("05_log_sinusoid.json", FunctionSpec::log_sinusoid(1.0, 4.0, 0.0)),
        f(
            "06_lifted_evens.json",
            SequenceSpec::arithmetic_indicator(0, 2).map(|s| lift_v(&s)),
        ),
        s("07_exponent_blocks.json", SequenceSpec::exponent_blocks(4, "10")),
        s("08_periodic_word.json", SequenceSpec::periodic_word(&[1.0, 0.0, 1.0])),
    ]
}

type Check<'a> = (String, Box<dyn Fn() -> Result<Vec<IdentityReport>> + 'a>);

fn one(r: Result<IdentityReport>) -> Result<Vec<IdentityReport>> {
    r.map(|r| vec![r])
}

fn checks_for<'a>(input: &'a SpecInput, params: &'a SuiteParams) -> Vec<Check<'a>> {
    let mut out: Vec<Check<'a>> = Vec::new();
    match input {
        SpecInput::Function(f) if f.domain() == DomainTag::Additive => {
            out.push(("mean_collapse.K".into(), Box::new(move || one(check_mean_collapse(input, Functional::K, params)))));
        }
        SpecInput::Function(f) => {
            out.push(("P_equals_KW".into(), Box::new(move || one(check_p_equals_kw(f, params)))));
            out.push(("Q_equals_KW".into(), Box::new(move || one(check_q_equals_kw(f, params)))));
            out.push(("P_equals_Q".into(), Box::new(move || one(check_p_equals_q(f, params)))));
            for k in [Functional::P, Functional::Q] {
                out.push((format!("mean_collapse.{k}"), Box::new(move || one(check_mean_collapse(input, k, params)))));
            }
            out.push((
                "mean_collapse.K".into(),
                Box::new(move || one(check_mean_collapse(&SpecInput::Function(transform_w(f)?), Functional::K, params))),
            ));
        }
        SpecInput::Sequence(s) => {
            out.push(("discrete_continuous.exact".into(), Box::new(move || one(check_window_identity(s)))));
            out.push((
                "discrete_continuous.asymptotic".into(),
                Box::new(move || one(check_discrete_asymptotic(s, params))),
            ));
            out.push((
                "logsum_bound".into(),
                Box::new(move || SUITE_LOGSUM.iter().map(|&(n, t)| check_logsum_bound(s, n, t)).collect()),
            ));
            out.push(("Qd_equals_Pd".into(), Box::new(move || one(check_qd_equals_pd(s, params)))));
            for k in [Functional::Pd, Functional::Qd] {
                out.push((format!("mean_collapse.{k}"), Box::new(move || one(check_mean_collapse(input, k, params)))));
            }
        }
    }
    out
}

/// Run every applicable check on every corpus element. Failures to parse or
/// evaluate become `error` reports; the suite itself never aborts. Reports
/// are ordered by `(name, input_index)`.
pub fn run_suite(corpus: &[CorpusItem], params: &SuiteParams) -> Vec<IdentityReport> {
    let mut reports = Vec::new();
    for (index, item) in corpus.iter().enumerate() {
        let input = match &item.spec {
            Ok(input) => input,
            Err(e) => {
                reports.push(IdentityReport::errored("parse", e).with_input(index, &item.label, &Value::Null));
                continue;
            }
        };
        let inputs = input.to_value();
        for (name, check) in checks_for(input, params) {
            match check() {
                Ok(rs) => reports.extend(rs.into_iter().map(|r| r.with_input(index, &item.label, &inputs))),
                Err(e) => reports.push(IdentityReport::errored(&name, &e).with_input(index, &item.label, &inputs)),
            }
        }
    }
    reports.sort_by(|a, b| a.name.cmp(&b.name).then(a.input_index.cmp(&b.input_index)));
    reports
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub errors: usize,
}

impl SuiteSummary {
    pub fn of(reports: &[IdentityReport]) -> Self {
        let count = |o: Outcome| reports.iter().filter(|r| r.outcome == o).count();
        SuiteSummary {
            total: reports.len(),
            passed: count(Outcome::Pass),
            failed: count(Outcome::Fail),
            skipped: count(Outcome::Skipped),
            errors: count(Outcome::Error),
        }
    }

    /// `1` on any failed check, else `2` on any error, else `0`.
    pub fn exit_code(&self) -> i32 {
        if self.failed > 0 {
            1
        } else if self.errors > 0 {
            2
        } else {
            0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_corpus_gives_no_reports() {
        assert!(run_suite(&[], &SuiteParams::default()).is_empty());
        assert_eq!(SuiteSummary::of(&[]).exit_code(), 0);
    }

    #[test]
    fn logsum_reference_value() {
        let one = SequenceSpec::periodic_word(&[1.0]).unwrap();
        let r = check_logsum_bound(&one, 1, 2.0).unwrap();
        let expected = (3f64.ln() - 1.5).abs();
        assert!((r.lhs.unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.4013877).abs() < 1e-7);
        assert!((r.rhs.unwrap() - 0.822_467_033_4).abs() < 1e-9);
        assert!(r.passed && r.recompute());
        let zero = SequenceSpec::periodic_word(&[0.0]).unwrap();
        assert_eq!(check_logsum_bound(&zero, 5, 1.5).unwrap().lhs, Some(0.0));
        let evens = SequenceSpec::arithmetic_indicator(0, 2).unwrap();
        let r = check_logsum_bound(&evens, 100, 1.1).unwrap();
        let tail: f64 = 0.5 * (100..2_000_000u64).map(|i| 1.0 / (i as f64 * i as f64)).sum::<f64>();
        assert!(r.lhs.unwrap() <= tail, "{r:?}");
    }

    #[test]
    fn window_identity_on_evens() {
        let evens = SequenceSpec::arithmetic_indicator(0, 2).unwrap();
        let lifted = lift_v(&evens);
        // n = 10, θ = 1.5: evens in [10, 15] are 10, 12, 14
        assert_eq!(lifted.integrate(10.0, 16.0, INT_TOL).unwrap(), 3.0);
        let r = check_window_identity(&evens).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn malformed_items_become_error_reports() {
        let corpus = vec![
            CorpusItem::parse("bad.json", "{ not json"),
            CorpusItem::parse("c.json", r#"{"kind":"constant","domain":"additive","value":0.25}"#),
        ];
        let reports = run_suite(&corpus, &SuiteParams::default());
        let s = SuiteSummary::of(&reports);
        assert_eq!(s.errors, 1);
        assert_eq!(s.failed, 0);
        assert_eq!(s.exit_code(), 2);
        let parse = reports.iter().find(|r| r.name == "parse").unwrap();
        assert_eq!(parse.diagnostics["error"], "ParseError");
        assert!(reports.iter().filter(|r| r.name != "parse").all(|r| r.passed));
    }

    #[test]
    fn reports_are_self_verifying() {
        let r = IdentityReport::compared("x", CheckKind::Equality, 1.0, 1.004, 5e-3, Value::Null);
        assert!(r.passed && r.recompute());
        let r = IdentityReport::compared("x", CheckKind::Bound, 1.0, 0.5, BOUND_SLACK, Value::Null);
        assert!(!r.passed && !r.recompute() && r.outcome == Outcome::Fail);
    }
}
