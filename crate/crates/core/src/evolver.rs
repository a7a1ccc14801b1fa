//! Genetic programming over linear gate sequences that make exactly one
//! oracle call, with the exact analyzer's worst-case error as fitness.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::analyzer::{self, ErrorReport};
use crate::blackbox::Property;
use crate::circuit::{serialize_program, FinalMeasure, Gate, Program};

/// Fitness added on top of 1.0 for programs that fail validation.
pub const INVALID_PENALTY: f64 = 1.0;
/// Fitness values closer than this are ranked by mean error instead.
pub const SCORE_TIE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GpConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GateKind {
    Hadamard,
    UTheta,
    U2,
    Cnot,
    CPhase,
    Measure0,
    Measure1,
    CHadamard,
    ControlledXTheta,
}

impl GateKind {
    pub const DEFAULT: [GateKind; 7] = [
        GateKind::Hadamard,
        GateKind::UTheta,
        GateKind::U2,
        GateKind::Cnot,
        GateKind::CPhase,
        GateKind::Measure0,
        GateKind::Measure1,
    ];
    pub const EXTRA: [GateKind; 2] = [GateKind::CHadamard, GateKind::ControlledXTheta];

    fn two_qubit(self) -> bool {
        matches!(self, GateKind::Cnot | GateKind::CPhase | GateKind::CHadamard | GateKind::ControlledXTheta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpConfig {
    pub population_size: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub p_mutation: f64,
    pub p_crossover: f64,
    pub min_len: usize,
    pub max_len: usize,
    pub parameter_jitter_sd: f64,
    pub seed: u64,
    pub property: Property,
    pub num_qubits: usize,
    pub output_qubit: usize,
    pub extended_repertoire: bool,
}

impl GpConfig {
    /// Defaults sized for the property: one qubit beyond the oracle's, and
    /// 200 x 100 for one-bit functions, 500 x 300 otherwise.
    pub fn for_property(property: Property) -> Self {
        let num_qubits = property.arity() + 1;
        let small = property.arity() == 1;
        GpConfig {
            population_size: if small { 200 } else { 500 },
            generations: if small { 100 } else { 300 },
            tournament_size: 5,
            p_mutation: 0.4,
            p_crossover: 0.5,
            min_len: 2,
            max_len: 12,
            parameter_jitter_sd: 0.2,
            seed: 0,
            property,
            num_qubits,
            output_qubit: num_qubits - 1,
            extended_repertoire: false,
        }
    }

    pub fn validate(&self) -> Result<(), GpConfigError> {
        let bad = |m: String| Err(GpConfigError::Invalid(m));
        for (name, p) in [("p_mutation", self.p_mutation), ("p_crossover", self.p_crossover)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} is not a probability"));
            }
        }
        if self.population_size == 0 || self.tournament_size == 0 || self.min_len == 0 {
            return bad("sizes must be at least 1".into());
        }
        if self.min_len > self.max_len {
            return bad(format!("min_len {} exceeds max_len {}", self.min_len, self.max_len));
        }
        if !(self.parameter_jitter_sd.is_finite() && self.parameter_jitter_sd >= 0.0) {
            return bad("parameter_jitter_sd must be finite and non-negative".into());
        }
        if self.num_qubits < self.property.arity() + 1 || self.num_qubits > crate::statevec::MAX_QUBITS {
            return bad(format!("{} qubits cannot host an oracle of arity {}", self.num_qubits, self.property.arity()));
        }
        if self.output_qubit >= self.num_qubits {
            return bad(format!("output qubit {} out of range", self.output_qubit));
        }
        Ok(())
    }

    pub fn repertoire(&self) -> Vec<GateKind> {
        let mut kinds = GateKind::DEFAULT.to_vec();
        if self.extended_repertoire {
            kinds.extend(GateKind::EXTRA);
        }
        if self.num_qubits < 2 {
            kinds.retain(|k| !k.two_qubit());
        }
        kinds
    }

    /// Parses `key = value` lines; `#` starts a comment.  `property` is
    /// required and sets the defaults that the other keys override.
    pub fn parse(text: &str) -> Result<Self, GpConfigError> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| GpConfigError::Syntax { line: i + 1, message: format!("expected key = value, got `{line}`") })?;
            pairs.push((i + 1, k.trim().to_string(), v.trim().to_string()));
        }
        let prop = pairs
            .iter()
            .find(|(_, k, _)| k == "property")
            .ok_or_else(|| GpConfigError::Invalid("missing `property`".into()))?;
        let property = prop.2.parse::<Property>().map_err(|e| GpConfigError::Syntax { line: prop.0, message: e.to_string() })?;
        let mut cfg = GpConfig::for_property(property);
        let explicit_qubits = pairs.iter().any(|(_, k, _)| k == "num_qubits");
        let explicit_output = pairs.iter().any(|(_, k, _)| k == "output_qubit");
        for (line, k, v) in &pairs {
            let err = |m: String| GpConfigError::Syntax { line: *line, message: m };
            let int = || v.parse::<usize>().map_err(|e| err(format!("{k}: {e}")));
            let real = || v.parse::<f64>().map_err(|e| err(format!("{k}: {e}")));
            match k.as_str() {
                "property" => {}
                "population_size" => cfg.population_size = int()?,
                "generations" => cfg.generations = int()?,
                "tournament_size" => cfg.tournament_size = int()?,
                "p_mutation" => cfg.p_mutation = real()?,
                "p_crossover" => cfg.p_crossover = real()?,
                "min_len" => cfg.min_len = int()?,
                "max_len" => cfg.max_len = int()?,
                "parameter_jitter_sd" => cfg.parameter_jitter_sd = real()?,
                "seed" => cfg.seed = v.parse().map_err(|e| err(format!("seed: {e}")))?,
                "num_qubits" => cfg.num_qubits = int()?,
                "output_qubit" => cfg.output_qubit = int()?,
                "extended_repertoire" => cfg.extended_repertoire = v.parse().map_err(|e| err(format!("{k}: {e}")))?,
                other => return Err(GpConfigError::UnknownKey(other.to_string())),
            }
        }
        if explicit_qubits && !explicit_output {
            cfg.output_qubit = cfg.num_qubits.saturating_sub(1);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for GpConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "property = {}", self.property)?;
        writeln!(f, "population_size = {}", self.population_size)?;
        writeln!(f, "generations = {}", self.generations)?;
        writeln!(f, "tournament_size = {}", self.tournament_size)?;
        writeln!(f, "p_mutation = {}", self.p_mutation)?;
        writeln!(f, "p_crossover = {}", self.p_crossover)?;
        writeln!(f, "min_len = {}", self.min_len)?;
        writeln!(f, "max_len = {}", self.max_len)?;
        writeln!(f, "parameter_jitter_sd = {}", self.parameter_jitter_sd)?;
        writeln!(f, "seed = {}", self.seed)?;
        writeln!(f, "num_qubits = {}", self.num_qubits)?;
        writeln!(f, "output_qubit = {}", self.output_qubit)?;
        writeln!(f, "extended_repertoire = {}", self.extended_repertoire)
    }
}

impl FromStr for GpConfig {
    type Err = GpConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GpConfig::parse(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Genome {
    pub num_qubits: usize,
    pub oracle_arity: usize,
    pub output_qubit: usize,
    pub genes: Vec<Gate>,
}

impl Genome {
    pub fn oracle_count(&self) -> usize {
        self.genes.iter().filter(|g| g.is_oracle()).count()
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    pub fn to_program(&self) -> Program {
        Program {
            num_qubits: self.num_qubits,
            oracle_arity: self.oracle_arity,
            gates: self.genes.clone(),
            terminal: Some(FinalMeasure::single(self.output_qubit)),
            halt_outputs: Default::default(),
        }
    }

    /// Reads a genome back from a program whose terminal is a plain readout.
    pub fn from_program(p: &Program) -> Option<Genome> {
        let t = p.terminal.as_ref()?;
        if !t.is_identity_single() || !p.halt_outputs.is_empty() {
            return None;
        }
        Some(Genome { num_qubits: p.num_qubits, oracle_arity: p.oracle_arity, output_qubit: t.qubits[0], genes: p.gates.clone() })
    }
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_program(&self.to_program()))
    }
}

fn random_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(0.0..TAU)
}

fn distinct_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

fn random_gate<R: Rng + ?Sized>(kinds: &[GateKind], n: usize, rng: &mut R) -> Gate {
    let kind = kinds[rng.random_range(0..kinds.len())];
    let qubit = rng.random_range(0..n);
    match kind {
        GateKind::Hadamard => Gate::Hadamard { qubit },
        GateKind::UTheta => Gate::UTheta { qubit, theta: random_angle(rng) },
        GateKind::U2 => Gate::U2 {
            qubit,
            alpha: random_angle(rng),
            theta: random_angle(rng),
            phi: random_angle(rng),
            psi: random_angle(rng),
        },
        GateKind::Measure0 => Gate::Measure { qubit, halt_on: false },
        GateKind::Measure1 => Gate::Measure { qubit, halt_on: true },
        two => {
            let (control, target) = distinct_pair(n, rng);
            match two {
                GateKind::Cnot => Gate::Cnot { control, target },
                GateKind::CPhase => Gate::CPhase { control, target, alpha: random_angle(rng) },
                GateKind::CHadamard => Gate::CHadamard { control, target },
                _ => Gate::ControlledXTheta { control, target, theta: random_angle(rng) },
            }
        }
    }
}

fn random_oracle<R: Rng + ?Sized>(arity: usize, n: usize, rng: &mut R) -> Gate {
    let mut qubits: Vec<usize> = (0..n).collect();
    qubits.shuffle(rng);
    Gate::Oracle { inputs: qubits[..arity].to_vec(), output: qubits[arity] }
}

/// Uniform length in `[min_len, max_len]`, uniform gates, one oracle at a
/// uniform position.
pub fn random_genome<R: Rng + ?Sized>(cfg: &GpConfig, rng: &mut R) -> Genome {
    let kinds = cfg.repertoire();
    let len = rng.random_range(cfg.min_len..=cfg.max_len);
    let mut genes: Vec<Gate> = (0..len - 1).map(|_| random_gate(&kinds, cfg.num_qubits, rng)).collect();
    let at = rng.random_range(0..=genes.len());
    genes.insert(at, random_oracle(cfg.property.arity(), cfg.num_qubits, rng));
    Genome { num_qubits: cfg.num_qubits, oracle_arity: cfg.property.arity(), output_qubit: cfg.output_qubit, genes }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationKind {
    Replace,
    Insert,
    Delete,
    Jitter,
}

/// Applies one mutation of the given kind.  Inserting at the length ceiling
/// or deleting at the floor leaves the genome unchanged.
pub fn mutate_with<R: Rng + ?Sized>(g: &Genome, kind: MutationKind, cfg: &GpConfig, rng: &mut R) -> Genome {
    let kinds = cfg.repertoire();
    let mut out = g.clone();
    let n = g.num_qubits;
    match kind {
        MutationKind::Replace => {
            let i = rng.random_range(0..out.genes.len());
            out.genes[i] =
                if out.genes[i].is_oracle() { random_oracle(g.oracle_arity, n, rng) } else { random_gate(&kinds, n, rng) };
        }
        MutationKind::Insert => {
            if out.genes.len() < cfg.max_len {
                let at = rng.random_range(0..=out.genes.len());
                out.genes.insert(at, random_gate(&kinds, n, rng));
            }
        }
        MutationKind::Delete => {
            if out.genes.len() > cfg.min_len {
                let candidates: Vec<usize> = (0..out.genes.len()).filter(|&i| !out.genes[i].is_oracle()).collect();
                if let Some(&i) = candidates.choose(rng) {
                    out.genes.remove(i);
                }
            }
        }
        MutationKind::Jitter => {
            let mut params: Vec<&mut f64> = out.genes.iter_mut().flat_map(|gate| gate.params_mut()).collect();
            if !params.is_empty() && cfg.parameter_jitter_sd > 0.0 {
                let i = rng.random_range(0..params.len());
                let noise = Normal::new(0.0, cfg.parameter_jitter_sd).expect("valid sd").sample(rng);
                *params[i] = (*params[i] + noise).rem_euclid(TAU);
            }
        }
    }
    out
}

pub fn mutate<R: Rng + ?Sized>(g: &Genome, cfg: &GpConfig, rng: &mut R) -> Genome {
    const KINDS: [MutationKind; 4] = [MutationKind::Replace, MutationKind::Insert, MutationKind::Delete, MutationKind::Jitter];
    let kind = KINDS[rng.random_range(0..KINDS.len())];
    mutate_with(g, kind, cfg, rng)
}

/// Restores the single-oracle and length invariants.
fn repair<R: Rng + ?Sized>(g: &mut Genome, cfg: &GpConfig, rng: &mut R) {
    let oracles: Vec<usize> = (0..g.genes.len()).filter(|&i| g.genes[i].is_oracle()).collect();
    match oracles.len() {
        0 => {
            let at = rng.random_range(0..=g.genes.len());
            g.genes.insert(at, random_oracle(g.oracle_arity, g.num_qubits, rng));
        }
        1 => {}
        k => {
            let keep = oracles[rng.random_range(0..k)];
            let mut i = 0;
            g.genes.retain(|gate| {
                let drop = gate.is_oracle() && i != keep;
                i += 1;
                !drop
            });
        }
    }
    let kinds = cfg.repertoire();
    while g.genes.len() > cfg.max_len {
        let candidates: Vec<usize> = (0..g.genes.len()).filter(|&i| !g.genes[i].is_oracle()).collect();
        let i = candidates[rng.random_range(0..candidates.len())];
        g.genes.remove(i);
    }
    while g.genes.len() < cfg.min_len {
        let at = rng.random_range(0..=g.genes.len());
        g.genes.insert(at, random_gate(&kinds, g.num_qubits, rng));
    }
}

/// One-point crossover followed by repair.
pub fn crossover<R: Rng + ?Sized>(a: &Genome, b: &Genome, cfg: &GpConfig, rng: &mut R) -> (Genome, Genome) {
    let i = rng.random_range(0..=a.genes.len());
    let j = rng.random_range(0..=b.genes.len());
    let mut c1 = a.clone();
    c1.genes = a.genes[..i].iter().chain(&b.genes[j..]).cloned().collect();
    let mut c2 = b.clone();
    c2.genes = b.genes[..j].iter().chain(&a.genes[i..]).cloned().collect();
    repair(&mut c1, cfg, rng);
    repair(&mut c2, cfg, rng);
    (c1, c2)
}

/// Worst-case error of the genome's program, or `1 + INVALID_PENALTY` when
/// it does not validate.
pub fn fitness(g: &Genome, prop: &Property) -> f64 {
    score(g, prop).fitness
}

/// Fitness plus the mean error over functions, which breaks ties between
/// equally bad worst cases during selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub fitness: f64,
    pub mean_error: f64,
}

impl Score {
    /// Fitness differences below `SCORE_TIE` are rounding noise.
    fn beats(&self, other: &Score) -> bool {
        if (self.fitness - other.fitness).abs() > SCORE_TIE {
            self.fitness < other.fitness
        } else {
            self.mean_error < other.mean_error
        }
    }

    /// Strict order used for elitism, so the best fitness never rises.
    fn ranks_above(&self, other: &Score) -> bool {
        (self.fitness, self.mean_error) < (other.fitness, other.mean_error)
    }
}

pub fn score(g: &Genome, prop: &Property) -> Score {
    let invalid = Score { fitness: 1.0 + INVALID_PENALTY, mean_error: 1.0 + INVALID_PENALTY };
    let p = g.to_program();
    if !p.structural_diagnostics().is_empty() || p.oracle_count() != 1 {
        return invalid;
    }
    match analyzer::error_profile(&p, prop) {
        Ok(errs) => Score {
            fitness: errs.iter().copied().fold(0.0, f64::max),
            mean_error: errs.iter().sum::<f64>() / errs.len() as f64,
        },
        Err(_) => invalid,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
}

#[derive(Debug, Clone)]
pub struct EvolveResult {
    pub best: Genome,
    pub best_fitness: f64,
    pub report: Option<ErrorReport>,
    pub trace: Vec<GenerationStats>,
}

impl EvolveResult {
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("generation,best,mean\n");
        for s in &self.trace {
            out.push_str(&format!("{},{},{}\n", s.generation, s.best, s.mean));
        }
        out
    }
}

fn stream(seed: u64, generation: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((generation as u64) << 32) | index as u64);
    rng
}

fn tournament<'a, R: Rng + ?Sized>(pop: &'a [(Genome, Score)], size: usize, rng: &mut R) -> &'a Genome {
    let mut best = rng.random_range(0..pop.len());
    for _ in 1..size {
        let c = rng.random_range(0..pop.len());
        if pop[c].1.beats(&pop[best].1) {
            best = c;
        }
    }
    &pop[best].0
}

fn best_index(pop: &[(Genome, Score)]) -> usize {
    let mut best = 0;
    for (i, (_, s)) in pop.iter().enumerate() {
        if s.ranks_above(&pop[best].1) {
            best = i;
        }
    }
    best
}

fn stats(generation: usize, pop: &[(Genome, Score)]) -> GenerationStats {
    let best = pop.iter().map(|(_, s)| s.fitness).fold(f64::INFINITY, f64::min);
    let mean = pop.iter().map(|(_, s)| s.fitness).sum::<f64>() / pop.len() as f64;
    GenerationStats { generation, best, mean }
}

/// Generational GP with tournament selection and elitism of one.  Each
/// individual of each generation draws from its own random stream, so the
/// run is reproducible regardless of thread scheduling.
pub fn evolve(cfg: &GpConfig) -> Result<EvolveResult, GpConfigError> {
    cfg.validate()?;
    let prop = cfg.property;
    let mut pop: Vec<(Genome, Score)> = (0..cfg.population_size)
        .into_par_iter()
        .map(|i| {
            let g = random_genome(cfg, &mut stream(cfg.seed, 0, i));
            let s = score(&g, &prop);
            (g, s)
        })
        .collect();
    let mut trace = vec![stats(0, &pop)];
    let mut best = pop[best_index(&pop)].clone();

    for generation in 1..=cfg.generations {
        let elite = pop[best_index(&pop)].clone();
        let children: Vec<(Genome, Score)> = (1..cfg.population_size)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream(cfg.seed, generation, i);
                let mut child = tournament(&pop, cfg.tournament_size, &mut rng).clone();
                if rng.random_bool(cfg.p_crossover) {
                    let other = tournament(&pop, cfg.tournament_size, &mut rng);
                    child = crossover(&child, other, cfg, &mut rng).0;
                }
                if rng.random_bool(cfg.p_mutation) {
                    child = mutate(&child, cfg, &mut rng);
                }
                let s = score(&child, &prop);
                (child, s)
            })
            .collect();
        pop = std::iter::once(elite).chain(children).collect();
        trace.push(stats(generation, &pop));
        let i = best_index(&pop);
        if pop[i].1.ranks_above(&best.1) {
            best = pop[i].clone();
        }
    }

    let report = analyzer::error_report(&best.0.to_program(), &prop).ok();
    Ok(EvolveResult { best_fitness: best.1.fitness, best: best.0, report, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Builtin;
    use proptest::prelude::*;

    fn or_cfg() -> GpConfig {
        GpConfig::for_property(Property::OR)
    }

    #[test]
    fn defaults_are_valid() {
        for prop in [Property::OR, Property::ANDOR2, Property::XOR] {
            GpConfig::for_property(prop).validate().unwrap();
        }
        assert_eq!(GpConfig::for_property(Property::ANDOR2).num_qubits, 3);
        assert_eq!(or_cfg().num_qubits, 2);
    }

    #[test]
    fn config_round_trip() {
        let mut cfg = GpConfig::for_property(Property::ANDOR2);
        cfg.seed = 17;
        cfg.p_mutation = 0.25;
        cfg.extended_repertoire = true;
        assert_eq!(cfg.to_string().parse::<GpConfig>().unwrap(), cfg);
    }

    #[test]
    fn config_errors() {
        assert!(matches!(GpConfig::parse("generations = 3"), Err(GpConfigError::Invalid(_))));
        assert!(matches!(GpConfig::parse("property = or\ncolour = red"), Err(GpConfigError::UnknownKey(_))));
        assert!(matches!(GpConfig::parse("property = or\np_mutation = 1.5"), Err(GpConfigError::Invalid(_))));
        assert!(matches!(GpConfig::parse("property = or\nseed 4"), Err(GpConfigError::Syntax { line: 2, .. })));
        let cfg = GpConfig::parse("# comment\nproperty = or\nnum_qubits = 3\n").unwrap();
        assert_eq!(cfg.output_qubit, 2);
    }

    #[test]
    fn builtin_fitness_matches_analyzer() {
        let g = Genome::from_program(&Builtin::Or.program(0.0)).unwrap();
        assert!((fitness(&g, &Property::OR) - 0.25).abs() < 1e-12);
        let theta = crate::tuner::closed_form_constants().or_theta;
        let p = Builtin::Or.program(theta);
        let g = Genome::from_program(&p).unwrap();
        let f = fitness(&g, &Property::OR);
        assert_eq!(f, analyzer::error_report(&p, &Property::OR).unwrap().p_error_max);
        assert!((f - 0.1).abs() < 1e-9);
    }

    #[test]
    fn constant_output_fails_everything_it_can() {
        let g = Genome {
            num_qubits: 2,
            oracle_arity: 1,
            output_qubit: 1,
            genes: vec![Gate::Oracle { inputs: vec![0], output: 1 }, Gate::Measure { qubit: 0, halt_on: false }],
        };
        assert_eq!(fitness(&g, &Property::OR), 1.0);
    }

    #[test]
    fn delete_at_floor_is_noop() {
        let cfg = or_cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = Genome {
            num_qubits: 2,
            oracle_arity: 1,
            output_qubit: 1,
            genes: vec![Gate::Hadamard { qubit: 0 }, Gate::Oracle { inputs: vec![0], output: 1 }],
        };
        assert_eq!(g.len(), cfg.min_len);
        assert_eq!(mutate_with(&g, MutationKind::Delete, &cfg, &mut rng), g);
    }

    #[test]
    fn insert_at_ceiling_is_noop() {
        let cfg = or_cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut g = random_genome(&cfg, &mut rng);
        while g.len() < cfg.max_len {
            g = mutate_with(&g, MutationKind::Insert, &cfg, &mut rng);
        }
        assert_eq!(mutate_with(&g, MutationKind::Insert, &cfg, &mut rng), g);
    }

    #[test]
    fn crossover_preserves_invariants_over_many_pairs() {
        let cfg = GpConfig::for_property(Property::ANDOR2);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10_000 {
            let a = random_genome(&cfg, &mut rng);
            let b = random_genome(&cfg, &mut rng);
            let (c, d) = crossover(&a, &b, &cfg, &mut rng);
            for g in [&c, &d] {
                assert_eq!(g.oracle_count(), 1);
                assert!((cfg.min_len..=cfg.max_len).contains(&g.len()));
            }
        }
    }

    #[test]
    fn short_run_is_reproducible_and_elitist() {
        let mut cfg = or_cfg();
        cfg.population_size = 40;
        cfg.generations = 15;
        cfg.seed = 6;
        let a = evolve(&cfg).unwrap();
        let b = evolve(&cfg).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.best.to_string(), b.best.to_string());
        assert!(a.trace.windows(2).all(|w| w[1].best <= w[0].best));
        assert_eq!(a.best.oracle_count(), 1);
        assert_eq!(a.report.unwrap().p_error_max, a.best_fitness);
    }

    proptest! {
        #[test]
        fn variation_keeps_single_oracle(seed in any::<u64>(), steps in 1usize..30) {
            let cfg = GpConfig { extended_repertoire: true, ..GpConfig::for_property(Property::ANDOR2) };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut g = random_genome(&cfg, &mut rng);
            prop_assert_eq!(g.oracle_count(), 1);
            for _ in 0..steps {
                g = mutate(&g, &cfg, &mut rng);
                prop_assert_eq!(g.oracle_count(), 1);
                prop_assert!((cfg.min_len..=cfg.max_len).contains(&g.len()));
                prop_assert!(g.to_program().structural_diagnostics().is_empty());
            }
        }
    }
}
