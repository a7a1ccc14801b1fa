//! Exact and sampled execution of programs with halting measurements, and the
//! error/query reports built on top of them.
//!
//! Exact execution walks the measurement tree depth first.  States are never
//! renormalized: a branch's probability is the squared norm of the state it
//! carries.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::blackbox::{orbit_partition, BlackboxError, FunctionTransform, Permutation, Property, TruthTable};
use crate::circuit::{FinalMeasure, Gate, Program, Symbol};
use crate::statevec::{StateError, StateVector, ZERO_WEIGHT};

/// Tolerance on the total probability of an exact run.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("invalid program: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("function {f} has arity {got}, program expects {expected}")]
    ArityMismatch { f: String, expected: usize, got: usize },
    #[error("branch survives the last gate with weight {weight:.3e} and there is no final measurement")]
    NonHalting { weight: f64 },
    #[error("total probability drifted to {0}")]
    NormDrift(f64),
    #[error("program has {count} oracle call(s), index {index} requested")]
    OracleIndex { index: usize, count: usize },
    #[error("measurement at gate {0} precedes the requested checkpoint")]
    MeasurementBeforeCheckpoint(usize),
    #[error("gate index {0} out of range")]
    GateIndex(usize),
    #[error("program never outputs `?`")]
    NoUnknownOutput,
    #[error("shot count must be at least 1")]
    NoShots,
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Blackbox(#[from] BlackboxError),
}

/// One leaf of the measurement tree.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchOutcome {
    pub output: Symbol,
    pub probability: f64,
    pub oracle_calls: usize,
    /// `(gate index, measured bit)` for each mid-circuit measurement on the path.
    /// The terminal readout is recorded with index `gates.len()` and one entry per qubit.
    pub trace: Vec<(usize, bool)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutcomeDistribution {
    /// Indexed by [`Symbol::slot`].
    pub probs: [f64; 3],
    pub branches: Vec<BranchOutcome>,
}

impl OutcomeDistribution {
    pub fn prob(&self, s: Symbol) -> f64 {
        self.probs[s.slot()]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn expected_queries(&self) -> f64 {
        self.branches.iter().map(|b| b.probability * b.oracle_calls as f64).sum()
    }

    pub fn total_variation(&self, other: &OutcomeDistribution) -> f64 {
        0.5 * self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }

    /// Swaps the `0` and `1` outputs.
    pub fn negated(&self) -> OutcomeDistribution {
        let mut d = self.clone();
        d.probs.swap(0, 1);
        for b in &mut d.branches {
            b.output = b.output.negate();
        }
        d
    }

    /// Probability of every symbol other than `expected`.
    pub fn error_against(&self, expected: bool) -> f64 {
        let want = Symbol::from_bit(expected);
        Symbol::ALL.iter().filter(|&&s| s != want).map(|&s| self.prob(s)).sum()
    }
}

struct Walker<'a> {
    program: &'a Program,
    f: TruthTable,
    keep_trace: bool,
    out: OutcomeDistribution,
    leftover: f64,
}

impl Walker<'_> {
    fn emit(&mut self, output: Symbol, probability: f64, oracle_calls: usize, trace: &[(usize, bool)]) {
        self.out.probs[output.slot()] += probability;
        self.out.branches.push(BranchOutcome {
            output,
            probability,
            oracle_calls,
            trace: if self.keep_trace { trace.to_vec() } else { Vec::new() },
        });
    }

    fn walk(&mut self, start: usize, mut state: StateVector, mut calls: usize, trace: &mut Vec<(usize, bool)>) -> Result<(), AnalysisError> {
        let gates = &self.program.gates;
        for (idx, gate) in gates.iter().enumerate().skip(start) {
            match gate {
                Gate::Oracle { inputs, output } => {
                    let f = self.f;
                    state.apply_oracle(|x| f.eval(x), inputs.len(), inputs, *output)?;
                    calls += 1;
                }
                Gate::Measure { qubit, halt_on } => {
                    let (weight, rest) = state.project_measure(*qubit, *halt_on)?;
                    if weight > ZERO_WEIGHT {
                        trace.push((idx, *halt_on));
                        let sym = self.program.halt_output(idx).expect("measure gate");
                        self.emit(sym, weight, calls, trace);
                        trace.pop();
                    }
                    if rest.norm_sqr() <= ZERO_WEIGHT {
                        return Ok(());
                    }
                    trace.push((idx, !*halt_on));
                    self.walk(idx + 1, rest, calls, trace)?;
                    trace.pop();
                    return Ok(());
                }
                g => state.apply(&g.unitary().expect("unitary gate"))?,
            }
        }
        match &self.program.terminal {
            Some(t) => self.read_out(t, &state, calls, trace),
            None => {
                self.leftover += state.norm_sqr();
                Ok(())
            }
        }
    }

    fn read_out(&mut self, t: &FinalMeasure, state: &StateVector, calls: usize, trace: &mut Vec<(usize, bool)>) -> Result<(), AnalysisError> {
        let masks: Vec<usize> = t.qubits.iter().map(|&q| state.mask(q)).collect();
        let mut weights = vec![0.0; 1 << masks.len()];
        for (i, a) in state.amplitudes().iter().enumerate() {
            let key = masks.iter().fold(0usize, |acc, &m| (acc << 1) | usize::from(i & m != 0));
            weights[key] += a.norm_sqr();
        }
        let end = self.program.gates.len();
        for (key, &w) in weights.iter().enumerate() {
            if w <= ZERO_WEIGHT {
                continue;
            }
            let depth = trace.len();
            let width = masks.len();
            trace.extend((0..width).map(|k| (end, (key >> (width - 1 - k)) & 1 == 1)));
            self.emit(t.table[key], w, calls, trace);
            trace.truncate(depth);
        }
        Ok(())
    }
}

fn check_arity(p: &Program, f: &TruthTable) -> Result<(), AnalysisError> {
    if f.arity() != p.oracle_arity {
        return Err(AnalysisError::ArityMismatch { f: f.to_string(), expected: p.oracle_arity, got: f.arity() });
    }
    Ok(())
}

fn check_structure(p: &Program) -> Result<(), AnalysisError> {
    let diags = p.structural_diagnostics();
    if diags.is_empty() {
        Ok(())
    } else {
        Err(AnalysisError::Invalid(diags))
    }
}

fn execute(p: &Program, f: &TruthTable, keep_trace: bool) -> Result<(OutcomeDistribution, f64), AnalysisError> {
    check_structure(p)?;
    check_arity(p, f)?;
    let mut w = Walker { program: p, f: *f, keep_trace, out: OutcomeDistribution::default(), leftover: 0.0 };
    w.walk(0, StateVector::basis(p.num_qubits, 0)?, 0, &mut Vec::new())?;
    Ok((w.out, w.leftover))
}

/// Exact output distribution of `p` on black box `f`, with every branch.
pub fn run_exact(p: &Program, f: &TruthTable) -> Result<OutcomeDistribution, AnalysisError> {
    run_exact_inner(p, f, true)
}

fn run_exact_inner(p: &Program, f: &TruthTable, keep_trace: bool) -> Result<OutcomeDistribution, AnalysisError> {
    let (dist, leftover) = execute(p, f, keep_trace)?;
    if leftover > ZERO_WEIGHT {
        return Err(AnalysisError::NonHalting { weight: leftover });
    }
    let total = dist.total();
    if (total - 1.0).abs() > NORM_TOLERANCE {
        return Err(AnalysisError::NormDrift(total));
    }
    Ok(dist)
}

/// Functions used for the totality check.  Arities beyond the enumeration cap
/// are probed with constants and a fixed pseudo-random sample.
fn probe_functions(arity: usize) -> Vec<TruthTable> {
    if let Ok(all) = TruthTable::all(arity) {
        return all;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(arity as u64);
    let len = 1u32 << arity;
    let mask = if len >= 64 { u64::MAX } else { (1u64 << len) - 1 };
    let mut out = vec![TruthTable::new(arity, 0).expect("arity checked"), TruthTable::new(arity, mask).expect("arity checked")];
    out.extend((0..64).map(|_| TruthTable::new(arity, rng.random::<u64>() & mask).expect("masked")));
    out
}

pub(crate) fn totality_diagnostics(p: &Program) -> Vec<String> {
    for f in probe_functions(p.oracle_arity) {
        match execute(p, &f, false) {
            Ok((_, leftover)) if leftover > ZERO_WEIGHT => {
                return vec![format!(
                    "non-halting branch: weight {leftover:.3e} survives the last gate for f={f} and no `final` clause exists"
                )];
            }
            Ok(_) => {}
            Err(e) => return vec![e.to_string()],
        }
    }
    Vec::new()
}

/// Empirical counts from sampled single runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampledOutcome {
    pub counts: [u64; 3],
    pub shots: u64,
}

impl SampledOutcome {
    pub fn distribution(&self) -> OutcomeDistribution {
        let n = self.shots as f64;
        OutcomeDistribution { probs: self.counts.map(|c| c as f64 / n), branches: Vec::new() }
    }
}

fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

fn sample_once(p: &Program, f: &TruthTable, init: &StateVector, state: &mut StateVector, rng: &mut ChaCha8Rng) -> Result<Symbol, AnalysisError> {
    state.clone_from(init);
    for (idx, g) in p.gates.iter().enumerate() {
        match g {
            Gate::Oracle { inputs, output } => state.apply_oracle(|x| f.eval(x), inputs.len(), inputs, *output)?,
            Gate::Measure { qubit, halt_on } => {
                let p_halt = state.marginal(*qubit, *halt_on) / state.norm_sqr();
                if rng.random::<f64>() < p_halt {
                    return Ok(p.halt_output(idx).expect("measure gate"));
                }
                let (_, rest) = state.project_measure(*qubit, *halt_on)?;
                *state = rest;
                state.renormalize();
            }
            g => state.apply(&g.unitary().expect("unitary gate"))?,
        }
    }
    let t = p.terminal.as_ref().ok_or(AnalysisError::NonHalting { weight: state.norm_sqr() })?;
    let norm = state.norm_sqr();
    let u = rng.random::<f64>() * norm;
    let mut acc = 0.0;
    let mut chosen = state.amplitudes().len() - 1;
    for (i, a) in state.amplitudes().iter().enumerate() {
        acc += a.norm_sqr();
        if u < acc {
            chosen = i;
            break;
        }
    }
    let key = t.qubits.iter().fold(0usize, |k, &q| (k << 1) | usize::from(chosen & state.mask(q) != 0));
    Ok(t.table[key])
}

/// Monte Carlo execution.  Shot `i` draws from its own ChaCha stream
/// `(seed, i)`, so counts are identical however the shots are scheduled.
pub fn run_sampled(p: &Program, f: &TruthTable, seed: u64, shots: u64) -> Result<SampledOutcome, AnalysisError> {
    check_structure(p)?;
    check_arity(p, f)?;
    if shots == 0 {
        return Err(AnalysisError::NoShots);
    }
    let init = StateVector::basis(p.num_qubits, 0)?;
    const CHUNK: u64 = 1 << 14;
    let chunks: Vec<u64> = (0..shots.div_ceil(CHUNK)).collect();
    let partial = chunks
        .par_iter()
        .map(|&c| {
            let mut counts = [0u64; 3];
            let mut state = init.clone();
            for shot in c * CHUNK..((c + 1) * CHUNK).min(shots) {
                let mut rng = shot_rng(seed, shot);
                counts[sample_once(p, f, &init, &mut state, &mut rng)?.slot()] += 1;
            }
            Ok(counts)
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let counts = partial.iter().fold([0u64; 3], |acc, c| [acc[0] + c[0], acc[1] + c[1], acc[2] + c[2]]);
    Ok(SampledOutcome { counts, shots })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sidedness {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "one-sided-on-0")]
    OneSidedOn0,
    #[serde(rename = "one-sided-on-1")]
    OneSidedOn1,
    #[serde(rename = "two-sided")]
    TwoSided,
}

impl Sidedness {
    pub fn as_str(self) -> &'static str {
        match self {
            Sidedness::Exact => "exact",
            Sidedness::OneSidedOn0 => "one-sided-on-0",
            Sidedness::OneSidedOn1 => "one-sided-on-1",
            Sidedness::TwoSided => "two-sided",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionReport {
    pub f: TruthTable,
    pub value: bool,
    pub p_error: f64,
    pub expected_queries: f64,
    pub distribution: OutcomeDistribution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitReport {
    pub representative: TruthTable,
    pub size: usize,
    /// Largest member error.
    pub p_error: f64,
    /// Largest minus smallest member error; zero for symmetric programs.
    pub spread: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LasVegasSummary {
    pub p_unknown_max: f64,
    /// Largest `P(wrong and answered)` over functions.
    pub p_wrong_answered_max: f64,
    /// Largest `P(wrong | answered)` over functions with a nonzero answer rate.
    pub p_wrong_given_answered: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub property: Property,
    pub per_function: Vec<FunctionReport>,
    pub per_orbit: Vec<OrbitReport>,
    pub p_error_max: f64,
    pub q_max: f64,
    pub sidedness: Sidedness,
    pub las_vegas: Option<LasVegasSummary>,
}

impl ErrorReport {
    pub fn function(&self, f: &TruthTable) -> Option<&FunctionReport> {
        self.per_function.iter().find(|r| r.f == *f)
    }

    /// Orbit entry containing `f`.
    pub fn orbit(&self, f: &TruthTable, generators: &[Permutation]) -> Option<&OrbitReport> {
        let part = orbit_partition(f.arity(), generators).ok()?;
        let rep = part.orbit_of(f)?.representative;
        self.per_orbit.iter().find(|o| o.representative == rep)
    }

    /// JSON with stable keys: `program`, `property`, `per_function`,
    /// `per_orbit`, `p_error_max`, `q_max`, `sidedness` (plus `las_vegas` when present).
    pub fn to_json(&self, program: &str) -> Value {
        let per_function: Vec<Value> = self
            .per_function
            .iter()
            .map(|r| {
                json!({
                    "f": r.f.to_string(),
                    "p_error": r.p_error,
                    "expected_queries": r.expected_queries,
                    "distribution": {
                        "0": r.distribution.prob(Symbol::Zero),
                        "1": r.distribution.prob(Symbol::One),
                        "?": r.distribution.prob(Symbol::Unknown),
                    },
                })
            })
            .collect();
        let per_orbit: Vec<Value> = self
            .per_orbit
            .iter()
            .map(|o| json!({"rep": o.representative.to_string(), "size": o.size, "p_error": o.p_error}))
            .collect();
        let mut v = json!({
            "program": program,
            "property": self.property.to_string(),
            "per_function": per_function,
            "per_orbit": per_orbit,
            "p_error_max": self.p_error_max,
            "q_max": self.q_max,
            "sidedness": self.sidedness,
        });
        if let Some(lv) = &self.las_vegas {
            v["las_vegas"] = json!({
                "p_unknown_max": lv.p_unknown_max,
                "p_wrong_answered_max": lv.p_wrong_answered_max,
                "p_wrong_given_answered": lv.p_wrong_given_answered,
            });
        }
        v
    }
}

fn all_functions(p: &Program, prop: &Property) -> Result<Vec<TruthTable>, AnalysisError> {
    if prop.arity() != p.oracle_arity {
        return Err(AnalysisError::ArityMismatch { f: prop.to_string(), expected: p.oracle_arity, got: prop.arity() });
    }
    Ok(TruthTable::all(prop.arity())?)
}

fn function_errors(p: &Program, prop: &Property, keep_trace: bool) -> Result<Vec<FunctionReport>, AnalysisError> {
    all_functions(p, prop)?
        .par_iter()
        .map(|f| {
            let distribution = run_exact_inner(p, f, keep_trace)?;
            let value = prop.eval(f)?;
            Ok(FunctionReport {
                f: *f,
                value,
                p_error: distribution.error_against(value),
                expected_queries: distribution.expected_queries(),
                distribution,
            })
        })
        .collect()
}

fn max_of(xs: impl Iterator<Item = f64>) -> f64 {
    xs.fold(0.0, f64::max)
}

/// `max_f p_error(f)`; the same computation [`error_report`] uses.
pub fn max_error(p: &Program, prop: &Property) -> Result<f64, AnalysisError> {
    Ok(max_of(function_errors(p, prop, false)?.iter().map(|r| r.p_error)))
}

/// Error probability of every function, ordered by truth-table index.
pub fn error_profile(p: &Program, prop: &Property) -> Result<Vec<f64>, AnalysisError> {
    Ok(function_errors(p, prop, false)?.iter().map(|r| r.p_error).collect())
}

/// Report over every function, with orbits of the property's own automorphism group.
pub fn error_report(p: &Program, prop: &Property) -> Result<ErrorReport, AnalysisError> {
    error_report_with_group(p, prop, Some(&prop.automorphism_generators()))
}

pub fn error_report_with_group(p: &Program, prop: &Property, generators: Option<&[Permutation]>) -> Result<ErrorReport, AnalysisError> {
    let per_function = function_errors(p, prop, true)?;
    let p_error_max = max_of(per_function.iter().map(|r| r.p_error));
    let q_max = max_of(per_function.iter().map(|r| r.expected_queries));

    let class_max = |v: bool| max_of(per_function.iter().filter(|r| r.value == v).map(|r| r.p_error));
    let sidedness = if p_error_max < ZERO_WEIGHT {
        Sidedness::Exact
    } else if class_max(false) < ZERO_WEIGHT {
        Sidedness::OneSidedOn0
    } else if class_max(true) < ZERO_WEIGHT {
        Sidedness::OneSidedOn1
    } else {
        Sidedness::TwoSided
    };

    let per_orbit = match generators {
        Some(gens) => orbit_partition(prop.arity(), gens)?
            .orbits
            .iter()
            .map(|o| {
                let errs: Vec<f64> = o.members.iter().map(|f| per_function[f.index() as usize].p_error).collect();
                let hi = errs.iter().copied().fold(f64::MIN, f64::max);
                let lo = errs.iter().copied().fold(f64::MAX, f64::min);
                OrbitReport { representative: o.representative, size: o.size(), p_error: hi, spread: hi - lo }
            })
            .collect(),
        None => Vec::new(),
    };

    let las_vegas = per_function.iter().any(|r| r.distribution.prob(Symbol::Unknown) > 0.0).then(|| {
        let wrong = |r: &FunctionReport| r.distribution.prob(Symbol::from_bit(!r.value));
        let answered = |r: &FunctionReport| 1.0 - r.distribution.prob(Symbol::Unknown);
        LasVegasSummary {
            p_unknown_max: max_of(per_function.iter().map(|r| r.distribution.prob(Symbol::Unknown))),
            p_wrong_answered_max: max_of(per_function.iter().map(wrong)),
            p_wrong_given_answered: max_of(
                per_function.iter().filter(|r| answered(r) > ZERO_WEIGHT).map(|r| wrong(r) / answered(r)),
            ),
        }
    });

    Ok(ErrorReport { property: *prop, per_function, per_orbit, p_error_max, q_max, sidedness, las_vegas })
}

/// State before gate `gate_index`, following the continuing branch of every
/// earlier measurement.  The result is unnormalized.
pub fn checkpoint_state(p: &Program, f: &TruthTable, gate_index: usize) -> Result<StateVector, AnalysisError> {
    check_structure(p)?;
    check_arity(p, f)?;
    if gate_index > p.gates.len() {
        return Err(AnalysisError::GateIndex(gate_index));
    }
    let mut state = StateVector::basis(p.num_qubits, 0)?;
    for g in &p.gates[..gate_index] {
        match g {
            Gate::Oracle { inputs, output } => state.apply_oracle(|x| f.eval(x), inputs.len(), inputs, *output)?,
            Gate::Measure { qubit, halt_on } => state = state.project_measure(*qubit, *halt_on)?.1,
            g => state.apply(&g.unitary().expect("unitary gate"))?,
        }
    }
    Ok(state)
}

/// Pairwise inner products of the post-query states of all black boxes.
#[derive(Debug, Clone, PartialEq)]
pub struct Gram {
    pub functions: Vec<TruthTable>,
    pub matrix: Vec<Vec<Complex64>>,
}

impl Gram {
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[i][j]
    }
}

/// Gram matrix of the states right after oracle call number `which_oracle`
/// (zero based), functions ordered by truth-table index.
pub fn post_query_gram(p: &Program, which_oracle: usize) -> Result<Gram, AnalysisError> {
    let oracles: Vec<usize> = p.gates.iter().enumerate().filter(|(_, g)| g.is_oracle()).map(|(i, _)| i).collect();
    let &at = oracles.get(which_oracle).ok_or(AnalysisError::OracleIndex { index: which_oracle, count: oracles.len() })?;
    if let Some(m) = p.gates[..at].iter().position(|g| matches!(g, Gate::Measure { .. })) {
        return Err(AnalysisError::MeasurementBeforeCheckpoint(m));
    }
    let functions = TruthTable::all(p.oracle_arity)?;
    let states = functions.iter().map(|f| checkpoint_state(p, f, at + 1)).collect::<Result<Vec<_>, _>>()?;
    let matrix = states
        .iter()
        .map(|a| states.iter().map(|b| a.inner(b)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Gram { functions, matrix })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equivalence {
    pub equal: bool,
    pub max_deviation: f64,
}

/// Behavioral equivalence of `a` on `ta(f)` and `b` on `tb(f)` for every `f`
/// of the common source arity, outputs of `b` optionally negated.
pub fn equivalent_behavior(
    a: &Program,
    ta: &FunctionTransform,
    b: &Program,
    tb: &FunctionTransform,
    negate_b: bool,
) -> Result<Equivalence, AnalysisError> {
    let arity = ta.source_arity(a.oracle_arity);
    let other = tb.source_arity(b.oracle_arity);
    if arity != other {
        return Err(AnalysisError::ArityMismatch { f: "transform source".into(), expected: arity, got: other });
    }
    let mut worst = 0.0f64;
    for f in TruthTable::all(arity)? {
        let da = run_exact_inner(a, &f.apply(ta)?, false)?;
        let mut db = run_exact_inner(b, &f.apply(tb)?, false)?;
        if negate_b {
            db = db.negated();
        }
        worst = worst.max(da.total_variation(&db));
    }
    Ok(Equivalence { equal: worst < 1e-12, max_deviation: worst })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LasVegasStats {
    pub p_unknown: Vec<(TruthTable, f64)>,
    pub p_unknown_max: f64,
    /// `min_f P(output = P(f) | output != ?)`.
    pub correctness_given_answered: f64,
}

pub fn las_vegas_stats(p: &Program, prop: &Property) -> Result<LasVegasStats, AnalysisError> {
    if !p.output_alphabet().contains(&Symbol::Unknown) {
        return Err(AnalysisError::NoUnknownOutput);
    }
    let reports = function_errors(p, prop, false)?;
    let p_unknown: Vec<(TruthTable, f64)> =
        reports.iter().map(|r| (r.f, r.distribution.prob(Symbol::Unknown))).collect();
    let p_unknown_max = max_of(p_unknown.iter().map(|(_, u)| *u));
    let correctness_given_answered = reports
        .iter()
        .filter_map(|r| {
            let answered = 1.0 - r.distribution.prob(Symbol::Unknown);
            (answered > ZERO_WEIGHT).then(|| r.distribution.prob(Symbol::from_bit(r.value)) / answered)
        })
        .fold(1.0, f64::min);
    Ok(LasVegasStats { p_unknown, p_unknown_max, correctness_given_answered })
}
