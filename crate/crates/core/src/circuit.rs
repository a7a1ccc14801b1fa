//! Circuit IR: a linear gate list with halting measurements, one black-box
//! oracle arity, and an optional terminal measurement with an interpretation
//! table.
//!
//! Text format, one statement per line (`#` starts a comment):
//!
//! ```text
//! qubits 2
//! oracle-arity 1
//! gate HADAMARD 0
//! gate ORACLE 0 1
//! gate HADAMARD 0
//! gate MEASURE-1 0
//! gate X-THETA 1 0
//! final 1
//! ```
//!
//! A terminal clause over several qubits carries a table, e.g.
//! `final 0 1 table 00->? 01->0 10->? 11->1`.  A halting gate whose output
//! differs from its measured value is written `gate MEASURE-1 0 -> ?`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::blackbox::FunctionTransform;
use crate::statevec::{Mat2, Unitary, MAX_QUBITS};

/// Output symbol of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Zero,
    One,
    Unknown,
}

impl Symbol {
    pub const ALL: [Symbol; 3] = [Symbol::Zero, Symbol::One, Symbol::Unknown];

    pub fn from_bit(b: bool) -> Symbol {
        if b {
            Symbol::One
        } else {
            Symbol::Zero
        }
    }

    pub fn as_bit(self) -> Option<bool> {
        match self {
            Symbol::Zero => Some(false),
            Symbol::One => Some(true),
            Symbol::Unknown => None,
        }
    }

    pub fn negate(self) -> Symbol {
        match self {
            Symbol::Zero => Symbol::One,
            Symbol::One => Symbol::Zero,
            Symbol::Unknown => Symbol::Unknown,
        }
    }

    pub fn slot(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Symbol::Zero => "0",
            Symbol::One => "1",
            Symbol::Unknown => "?",
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Symbol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "0" => Ok(Symbol::Zero),
            "1" => Ok(Symbol::One),
            "?" => Ok(Symbol::Unknown),
            _ => Err(format!("bad output symbol {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Hadamard { qubit: usize },
    /// `cos(theta) I + i sin(theta) sigma_y`.
    UTheta { qubit: usize, theta: f64 },
    U2 { qubit: usize, alpha: f64, theta: f64, phi: f64, psi: f64 },
    /// `[[c, s], [s, -c]]`.
    XTheta { qubit: usize, theta: f64 },
    Cnot { control: usize, target: usize },
    CPhase { control: usize, target: usize, alpha: f64 },
    CHadamard { control: usize, target: usize },
    ControlledXTheta { control: usize, target: usize, theta: f64 },
    /// Adds `f(inputs)` into `output`.
    Oracle { inputs: Vec<usize>, output: usize },
    /// Halts with the measured value when it equals `halt_on`, else projects
    /// onto the opposite value and continues.
    Measure { qubit: usize, halt_on: bool },
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::Hadamard { .. } => "HADAMARD",
            Gate::UTheta { .. } => "U-THETA",
            Gate::U2 { .. } => "U2",
            Gate::XTheta { .. } => "X-THETA",
            Gate::Cnot { .. } => "CNOT",
            Gate::CPhase { .. } => "CPHASE",
            Gate::CHadamard { .. } => "CHADAMARD",
            Gate::ControlledXTheta { .. } => "CONTROLLED-X-THETA",
            Gate::Oracle { .. } => "ORACLE",
            Gate::Measure { halt_on: false, .. } => "MEASURE-0",
            Gate::Measure { halt_on: true, .. } => "MEASURE-1",
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Hadamard { qubit }
            | Gate::UTheta { qubit, .. }
            | Gate::U2 { qubit, .. }
            | Gate::XTheta { qubit, .. }
            | Gate::Measure { qubit, .. } => vec![*qubit],
            Gate::Cnot { control, target }
            | Gate::CPhase { control, target, .. }
            | Gate::CHadamard { control, target }
            | Gate::ControlledXTheta { control, target, .. } => vec![*control, *target],
            Gate::Oracle { inputs, output } => {
                let mut q = inputs.clone();
                q.push(*output);
                q
            }
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            Gate::UTheta { theta, .. } | Gate::XTheta { theta, .. } | Gate::ControlledXTheta { theta, .. } => {
                vec![theta]
            }
            Gate::U2 { alpha, theta, phi, psi, .. } => vec![alpha, theta, phi, psi],
            Gate::CPhase { alpha, .. } => vec![alpha],
            _ => Vec::new(),
        }
    }

    pub fn params_mut(&mut self) -> Vec<&mut f64> {
        match self {
            Gate::UTheta { theta, .. } | Gate::XTheta { theta, .. } | Gate::ControlledXTheta { theta, .. } => {
                vec![theta]
            }
            Gate::U2 { alpha, theta, phi, psi, .. } => vec![alpha, theta, phi, psi],
            Gate::CPhase { alpha, .. } => vec![alpha],
            _ => Vec::new(),
        }
    }

    pub fn is_oracle(&self) -> bool {
        matches!(self, Gate::Oracle { .. })
    }

    /// The unitary action, or `None` for oracle and measurement gates.
    pub fn unitary(&self) -> Option<Unitary> {
        Some(match *self {
            Gate::Hadamard { qubit } => Unitary::Single { target: qubit, matrix: Mat2::hadamard() },
            Gate::UTheta { qubit, theta } => Unitary::Single { target: qubit, matrix: Mat2::u_theta(theta) },
            Gate::U2 { qubit, alpha, theta, phi, psi } => {
                Unitary::Single { target: qubit, matrix: Mat2::u2(alpha, theta, phi, psi) }
            }
            Gate::XTheta { qubit, theta } => Unitary::Single { target: qubit, matrix: Mat2::x_theta(theta) },
            Gate::Cnot { control, target } => Unitary::Controlled { control, target, matrix: Mat2::pauli_x() },
            Gate::CPhase { control, target, alpha } => Unitary::Phase { a: control, b: target, phase: alpha },
            Gate::CHadamard { control, target } => Unitary::Controlled { control, target, matrix: Mat2::hadamard() },
            Gate::ControlledXTheta { control, target, theta } => {
                Unitary::Controlled { control, target, matrix: Mat2::x_theta(theta) }
            }
            Gate::Oracle { .. } | Gate::Measure { .. } => return None,
        })
    }

    fn map_qubits(&self, f: impl Fn(usize) -> usize) -> Gate {
        let mut g = self.clone();
        match &mut g {
            Gate::Hadamard { qubit }
            | Gate::UTheta { qubit, .. }
            | Gate::U2 { qubit, .. }
            | Gate::XTheta { qubit, .. }
            | Gate::Measure { qubit, .. } => *qubit = f(*qubit),
            Gate::Cnot { control, target }
            | Gate::CPhase { control, target, .. }
            | Gate::CHadamard { control, target }
            | Gate::ControlledXTheta { control, target, .. } => {
                *control = f(*control);
                *target = f(*target);
            }
            Gate::Oracle { inputs, output } => {
                for q in inputs.iter_mut() {
                    *q = f(*q);
                }
                *output = f(*output);
            }
        }
        g
    }
}

/// Measurement of several qubits after the last gate, mapped through a table
/// indexed by the measured bit-string (first listed qubit most significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinalMeasure {
    pub qubits: Vec<usize>,
    pub table: Vec<Symbol>,
}

impl FinalMeasure {
    /// Single-qubit readout returning the measured bit.
    pub fn single(qubit: usize) -> Self {
        FinalMeasure { qubits: vec![qubit], table: vec![Symbol::Zero, Symbol::One] }
    }

    pub fn is_identity_single(&self) -> bool {
        self.qubits.len() == 1 && self.table == [Symbol::Zero, Symbol::One]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub num_qubits: usize,
    pub oracle_arity: usize,
    pub gates: Vec<Gate>,
    pub terminal: Option<FinalMeasure>,
    /// Output of halting gates whose result is not the measured value, by gate index.
    pub halt_outputs: BTreeMap<usize, Symbol>,
}

impl Program {
    pub fn new(num_qubits: usize, oracle_arity: usize) -> Self {
        Program { num_qubits, oracle_arity, gates: Vec::new(), terminal: None, halt_outputs: BTreeMap::new() }
    }

    pub fn gate(mut self, g: Gate) -> Self {
        self.gates.push(g);
        self
    }

    pub fn finish(mut self, qubit: usize) -> Self {
        self.terminal = Some(FinalMeasure::single(qubit));
        self
    }

    /// Output symbol of the halting gate at `index`.
    pub fn halt_output(&self, index: usize) -> Option<Symbol> {
        match self.gates.get(index)? {
            Gate::Measure { halt_on, .. } => Some(self.halt_outputs.get(&index).copied().unwrap_or(Symbol::from_bit(*halt_on))),
            _ => None,
        }
    }

    pub fn oracle_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_oracle()).count()
    }

    /// Every symbol some branch could emit.
    pub fn output_alphabet(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = (0..self.gates.len()).filter_map(|i| self.halt_output(i)).collect();
        if let Some(t) = &self.terminal {
            out.extend(t.table.iter().copied());
        }
        out.sort();
        out.dedup();
        out
    }

    /// Structural diagnostics (ranges, arities, collisions, parameters).  The
    /// totality check lives in [`validate_program`].
    pub fn structural_diagnostics(&self) -> Vec<String> {
        let mut diags = Vec::new();
        if self.num_qubits == 0 || self.num_qubits > MAX_QUBITS {
            diags.push(format!("unsupported qubit count {}", self.num_qubits));
        }
        if self.oracle_arity == 0 || self.oracle_arity > crate::blackbox::MAX_ARITY {
            diags.push(format!("unsupported oracle arity {}", self.oracle_arity));
        }
        for (i, g) in self.gates.iter().enumerate() {
            let qs = g.qubits();
            for (k, &q) in qs.iter().enumerate() {
                if q >= self.num_qubits {
                    diags.push(format!("gate {i} ({}): qubit {q} out of range", g.name()));
                }
                if qs[..k].contains(&q) {
                    diags.push(format!("gate {i} ({}): qubit {q} used twice", g.name()));
                }
            }
            if let Gate::Oracle { inputs, .. } = g {
                if inputs.len() != self.oracle_arity {
                    diags.push(format!(
                        "gate {i} (ORACLE): {} inputs, oracle arity is {}",
                        inputs.len(),
                        self.oracle_arity
                    ));
                }
            }
            if g.params().iter().any(|p| !p.is_finite()) {
                diags.push(format!("gate {i} ({}): non-finite parameter", g.name()));
            }
        }
        for &i in self.halt_outputs.keys() {
            if !matches!(self.gates.get(i), Some(Gate::Measure { .. })) {
                diags.push(format!("halt output override on gate {i}, which is not a measurement"));
            }
        }
        if let Some(t) = &self.terminal {
            for (k, &q) in t.qubits.iter().enumerate() {
                if q >= self.num_qubits {
                    diags.push(format!("final: qubit {q} out of range"));
                }
                if t.qubits[..k].contains(&q) {
                    diags.push(format!("final: qubit {q} listed twice"));
                }
            }
            if t.qubits.is_empty() || t.table.len() != 1 << t.qubits.len().min(16) {
                diags.push(format!("final: table has {} entries for {} qubits", t.table.len(), t.qubits.len()));
            }
        }
        diags
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_program(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn perr(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

/// (qubit refs, params) taken by a named gate; `None` qubit count means oracle.
fn gate_shape(name: &str) -> Option<(Option<usize>, usize)> {
    Some(match name {
        "HADAMARD" | "MEASURE-0" | "MEASURE-1" => (Some(1), 0),
        "U-THETA" | "X-THETA" => (Some(1), 1),
        "U2" => (Some(1), 4),
        "CNOT" | "CHADAMARD" => (Some(2), 0),
        "CPHASE" | "CONTROLLED-X-THETA" => (Some(2), 1),
        "ORACLE" => (None, 0),
        _ => return None,
    })
}

fn build_gate(name: &str, q: &[usize], p: &[f64]) -> Gate {
    match name {
        "HADAMARD" => Gate::Hadamard { qubit: q[0] },
        "MEASURE-0" => Gate::Measure { qubit: q[0], halt_on: false },
        "MEASURE-1" => Gate::Measure { qubit: q[0], halt_on: true },
        "U-THETA" => Gate::UTheta { qubit: q[0], theta: p[0] },
        "X-THETA" => Gate::XTheta { qubit: q[0], theta: p[0] },
        "U2" => Gate::U2 { qubit: q[0], alpha: p[0], theta: p[1], phi: p[2], psi: p[3] },
        "CNOT" => Gate::Cnot { control: q[0], target: q[1] },
        "CHADAMARD" => Gate::CHadamard { control: q[0], target: q[1] },
        "CPHASE" => Gate::CPhase { control: q[0], target: q[1], alpha: p[0] },
        "CONTROLLED-X-THETA" => Gate::ControlledXTheta { control: q[0], target: q[1], theta: p[0] },
        "ORACLE" => Gate::Oracle { inputs: q[..q.len() - 1].to_vec(), output: q[q.len() - 1] },
        _ => unreachable!("checked by gate_shape"),
    }
}

fn parse_header(line: Option<(usize, &str)>, key: &str) -> Result<usize, ParseError> {
    let (no, text) = line.ok_or_else(|| perr(0, format!("missing `{key}` line")))?;
    let mut tok = text.split_whitespace();
    if tok.next() != Some(key) {
        return Err(perr(no, format!("expected `{key} <n>`")));
    }
    let value = tok.next().ok_or_else(|| perr(no, format!("`{key}` needs a value")))?;
    if tok.next().is_some() {
        return Err(perr(no, format!("trailing tokens after `{key}`")));
    }
    value.parse().map_err(|_| perr(no, format!("bad integer {value:?}")))
}

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let num_qubits = parse_header(lines.next(), "qubits")?;
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(perr(0, format!("unsupported qubit count {num_qubits}")));
    }
    let oracle_arity = parse_header(lines.next(), "oracle-arity")?;
    if oracle_arity == 0 || oracle_arity > crate::blackbox::MAX_ARITY {
        return Err(perr(0, format!("unsupported oracle arity {oracle_arity}")));
    }
    let mut prog = Program::new(num_qubits, oracle_arity);

    let qubit = |no: usize, tok: &str| -> Result<usize, ParseError> {
        let q: usize = tok.parse().map_err(|_| perr(no, format!("bad qubit index {tok:?}")))?;
        if q >= num_qubits {
            return Err(perr(no, format!("qubit {q} out of range (qubits {num_qubits})")));
        }
        Ok(q)
    };

    for (no, text) in lines {
        let mut tok: Vec<&str> = text.split_whitespace().collect();
        match tok[0] {
            "gate" => {
                if prog.terminal.is_some() {
                    return Err(perr(no, "gate after `final`"));
                }
                let name = *tok.get(1).ok_or_else(|| perr(no, "missing gate name"))?;
                let (nq, np) = gate_shape(name).ok_or_else(|| perr(no, format!("unknown gate {name:?}")))?;
                let mut rest = &tok[2..];
                let mut override_sym = None;
                if rest.len() >= 2 && rest[rest.len() - 2] == "->" {
                    if !name.starts_with("MEASURE") {
                        return Err(perr(no, "output override only allowed on MEASURE gates"));
                    }
                    override_sym = Some(rest[rest.len() - 1].parse::<Symbol>().map_err(|e| perr(no, e))?);
                    rest = &rest[..rest.len() - 2];
                }
                let nq = nq.unwrap_or(oracle_arity + 1);
                if rest.len() != nq + np {
                    return Err(perr(
                        no,
                        format!("{name} takes {nq} qubit(s) and {np} parameter(s), got {} tokens", rest.len()),
                    ));
                }
                let qs = rest[..nq].iter().map(|t| qubit(no, t)).collect::<Result<Vec<_>, _>>()?;
                for (k, q) in qs.iter().enumerate() {
                    if qs[..k].contains(q) {
                        return Err(perr(no, format!("{name}: qubit {q} used twice")));
                    }
                }
                let ps = rest[nq..]
                    .iter()
                    .map(|t| match t.parse::<f64>() {
                        Ok(v) if v.is_finite() => Ok(v),
                        _ => Err(perr(no, format!("bad angle {t:?}"))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if let Some(sym) = override_sym {
                    prog.halt_outputs.insert(prog.gates.len(), sym);
                }
                prog.gates.push(build_gate(name, &qs, &ps));
            }
            "final" => {
                if prog.terminal.is_some() {
                    return Err(perr(no, "duplicate `final` clause"));
                }
                let split = tok.iter().position(|t| *t == "table").unwrap_or(tok.len());
                let table_tokens = tok.split_off(split);
                let qs = tok[1..].iter().map(|t| qubit(no, t)).collect::<Result<Vec<_>, _>>()?;
                if qs.is_empty() {
                    return Err(perr(no, "`final` needs at least one qubit"));
                }
                if qs.len() > 8 {
                    return Err(perr(no, "`final` supports at most 8 qubits"));
                }
                for (k, q) in qs.iter().enumerate() {
                    if qs[..k].contains(q) {
                        return Err(perr(no, format!("final: qubit {q} listed twice")));
                    }
                }
                let table = if table_tokens.is_empty() {
                    if qs.len() != 1 {
                        return Err(perr(no, "multi-qubit `final` needs a table"));
                    }
                    vec![Symbol::Zero, Symbol::One]
                } else {
                    parse_table(no, qs.len(), &table_tokens[1..])?
                };
                prog.terminal = Some(FinalMeasure { qubits: qs, table });
            }
            other => return Err(perr(no, format!("unknown statement {other:?}"))),
        }
    }
    Ok(prog)
}

fn parse_table(no: usize, width: usize, entries: &[&str]) -> Result<Vec<Symbol>, ParseError> {
    let mut table: Vec<Option<Symbol>> = vec![None; 1 << width];
    for e in entries {
        let (bits, sym) = e.split_once("->").ok_or_else(|| perr(no, format!("bad table entry {e:?}")))?;
        if bits.len() != width || !bits.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(perr(no, format!("table key {bits:?} must be {width} bits")));
        }
        let idx = usize::from_str_radix(bits, 2).expect("checked binary");
        let sym = sym.parse::<Symbol>().map_err(|e| perr(no, e))?;
        if table[idx].replace(sym).is_some() {
            return Err(perr(no, format!("table key {bits} given twice")));
        }
    }
    table
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| perr(no, format!("table missing key {i:0width$b}"))))
        .collect()
}

/// Formats like C's `%.17g`: shortest notation, 17 significant digits.
pub fn format_param(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    } else {
        let m = if mantissa.contains('.') { mantissa.trim_end_matches('0').trim_end_matches('.') } else { mantissa };
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

pub fn serialize_program(p: &Program) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "qubits {}", p.num_qubits);
    let _ = writeln!(out, "oracle-arity {}", p.oracle_arity);
    for (i, g) in p.gates.iter().enumerate() {
        out.push_str("gate ");
        out.push_str(g.name());
        for q in g.qubits() {
            let _ = write!(out, " {q}");
        }
        for v in g.params() {
            let _ = write!(out, " {}", format_param(v));
        }
        if let Some(sym) = p.halt_outputs.get(&i) {
            let _ = write!(out, " -> {sym}");
        }
        out.push('\n');
    }
    if let Some(t) = &p.terminal {
        out.push_str("final");
        for q in &t.qubits {
            let _ = write!(out, " {q}");
        }
        if !t.is_identity_single() {
            out.push_str(" table");
            let w = t.qubits.len();
            for (i, s) in t.table.iter().enumerate() {
                let _ = write!(out, " {i:0w$b}->{s}");
            }
        }
        out.push('\n');
    }
    out
}

/// Empty iff the program is well formed and every execution path on every
/// black-box function halts or reaches a terminal measurement.
pub fn validate_program(p: &Program) -> Vec<String> {
    let mut diags = p.structural_diagnostics();
    if diags.is_empty() {
        diags.extend(crate::analyzer::totality_diagnostics(p));
    }
    diags
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Or,
    OrSingleFinal,
    AndOr2,
    XorExact,
    ParityLasVegas,
}

impl Builtin {
    pub const ALL: [Builtin; 5] =
        [Builtin::Or, Builtin::OrSingleFinal, Builtin::AndOr2, Builtin::XorExact, Builtin::ParityLasVegas];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Or => "OR",
            Builtin::OrSingleFinal => "OR_SINGLE_FINAL",
            Builtin::AndOr2 => "ANDOR2",
            Builtin::XorExact => "XOR_EXACT",
            Builtin::ParityLasVegas => "PARITY_LASVEGAS",
        }
    }

    /// The property the circuit is meant to compute.
    pub fn property(self) -> crate::blackbox::Property {
        use crate::blackbox::Property;
        match self {
            Builtin::Or | Builtin::OrSingleFinal => Property::OR,
            Builtin::AndOr2 => Property::ANDOR2,
            Builtin::XorExact | Builtin::ParityLasVegas => Property::XOR,
        }
    }

    pub fn program(self, theta: f64) -> Program {
        use Gate::*;
        match self {
            Builtin::Or => Program::new(2, 1)
                .gate(Hadamard { qubit: 0 })
                .gate(Oracle { inputs: vec![0], output: 1 })
                .gate(Hadamard { qubit: 0 })
                .gate(Measure { qubit: 0, halt_on: true })
                .gate(XTheta { qubit: 1, theta })
                .finish(1),
            // The reflection must act only where qubit 0 reads 0, so the
            // control is flipped around it.
            Builtin::OrSingleFinal => Program::new(2, 1)
                .gate(Hadamard { qubit: 0 })
                .gate(Oracle { inputs: vec![0], output: 1 })
                .gate(Hadamard { qubit: 0 })
                .gate(CHadamard { control: 0, target: 1 })
                .gate(XTheta { qubit: 0, theta: FRAC_PI_2 })
                .gate(ControlledXTheta { control: 0, target: 1, theta })
                .gate(XTheta { qubit: 0, theta: FRAC_PI_2 })
                .gate(Measure { qubit: 1, halt_on: false })
                .gate(Measure { qubit: 1, halt_on: true }),
            Builtin::AndOr2 => Program::new(3, 2)
                .gate(UTheta { qubit: 0, theta: FRAC_PI_4 })
                .gate(Hadamard { qubit: 1 })
                .gate(Oracle { inputs: vec![0, 1], output: 2 })
                .gate(Hadamard { qubit: 1 })
                .gate(Measure { qubit: 1, halt_on: true })
                .gate(Hadamard { qubit: 0 })
                .gate(Measure { qubit: 0, halt_on: false })
                .gate(XTheta { qubit: 2, theta })
                .finish(2),
            // U2(0, pi/4, pi/2, 0)|0> is |-> up to a global phase.
            Builtin::XorExact => Program::new(2, 1)
                .gate(U2 { qubit: 1, alpha: 0.0, theta: FRAC_PI_4, phi: FRAC_PI_2, psi: 0.0 })
                .gate(Hadamard { qubit: 0 })
                .gate(Oracle { inputs: vec![0], output: 1 })
                .gate(Hadamard { qubit: 0 })
                .finish(0),
            Builtin::ParityLasVegas => {
                let mut p = Program::new(2, 1)
                    .gate(Hadamard { qubit: 0 })
                    .gate(Oracle { inputs: vec![0], output: 1 })
                    .gate(Hadamard { qubit: 0 })
                    .gate(Hadamard { qubit: 1 });
                p.terminal = Some(FinalMeasure {
                    qubits: vec![0, 1],
                    table: vec![Symbol::Unknown, Symbol::Zero, Symbol::Unknown, Symbol::One],
                });
                p
            }
        }
    }
}

impl FromStr for Builtin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let up = s.trim().to_ascii_uppercase();
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == up)
            .ok_or_else(|| format!("unknown builtin circuit {s:?}"))
    }
}

pub fn builtin_program(name: &str, theta: f64) -> Result<Program, String> {
    Ok(name.parse::<Builtin>()?.program(theta))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RestrictError {
    #[error("qubit {0} out of range")]
    OutOfRange(usize),
    #[error("qubit {0} is an oracle output")]
    OracleOutput(usize),
    #[error("qubit {0} is read by the terminal measurement")]
    TerminalQubit(usize),
    #[error("qubit {qubit} is the target of gate {gate}")]
    Target { qubit: usize, gate: usize },
    #[error("qubit {qubit} sits at different oracle input positions")]
    InconsistentPosition { qubit: usize },
    #[error("qubit {0} is never an oracle input")]
    NotAnInput(usize),
    #[error("cannot remove the only qubit")]
    LastQubit,
}

/// A program with one oracle input fixed and removed, plus the transform that
/// produces its black-box argument from the original function.
#[derive(Debug, Clone, PartialEq)]
pub struct Restriction {
    pub program: Program,
    pub transform: FunctionTransform,
}

/// Fixes `qubit` to the classical value `value` and deletes it.
///
/// Gates acting only on the qubit, including halting measurements of it, are
/// dropped.  Gates it controls become their target gate when `value` is 1 and
/// vanish otherwise.  Oracle calls lose that input position.
pub fn restrict_program(p: &Program, qubit: usize, value: bool) -> Result<Restriction, RestrictError> {
    if qubit >= p.num_qubits {
        return Err(RestrictError::OutOfRange(qubit));
    }
    if p.num_qubits == 1 || p.oracle_arity == 1 {
        return Err(RestrictError::LastQubit);
    }
    if p.terminal.as_ref().is_some_and(|t| t.qubits.contains(&qubit)) {
        return Err(RestrictError::TerminalQubit(qubit));
    }
    let relabel = |q: usize| if q > qubit { q - 1 } else { q };
    let mut out = Program::new(p.num_qubits - 1, p.oracle_arity - 1);
    let mut position = None;
    for (i, g) in p.gates.iter().enumerate() {
        let qs = g.qubits();
        if !qs.contains(&qubit) {
            if let Some(sym) = p.halt_outputs.get(&i) {
                out.halt_outputs.insert(out.gates.len(), *sym);
            }
            out.gates.push(g.map_qubits(relabel));
            continue;
        }
        let replaced = match *g {
            Gate::Oracle { ref inputs, output } => {
                if output == qubit {
                    return Err(RestrictError::OracleOutput(qubit));
                }
                let pos = inputs.iter().position(|&q| q == qubit).expect("qubit is an input");
                if position.replace(pos).is_some_and(|prev| prev != pos) {
                    return Err(RestrictError::InconsistentPosition { qubit });
                }
                let kept = inputs.iter().copied().filter(|&q| q != qubit).collect();
                Some(Gate::Oracle { inputs: kept, output })
            }
            Gate::Cnot { control, target }
            | Gate::CHadamard { control, target }
            | Gate::ControlledXTheta { control, target, .. }
                if target == qubit =>
            {
                let _ = control;
                return Err(RestrictError::Target { qubit, gate: i });
            }
            Gate::Cnot { target, .. } => value.then_some(Gate::XTheta { qubit: target, theta: FRAC_PI_2 }),
            Gate::CHadamard { target, .. } => value.then_some(Gate::Hadamard { qubit: target }),
            Gate::ControlledXTheta { target, theta, .. } => value.then_some(Gate::XTheta { qubit: target, theta }),
            Gate::CPhase { control, target, alpha } => {
                let other = if control == qubit { target } else { control };
                // diag(1, e^{i alpha}) = e^{i alpha/2} e^{-i (alpha/2) Z}
                value.then_some(Gate::U2 { qubit: other, alpha: alpha / 2.0, theta: 0.0, phi: alpha / 2.0, psi: 0.0 })
            }
            _ => None,
        };
        if let Some(g) = replaced {
            out.gates.push(g.map_qubits(relabel));
        }
    }
    let position = position.ok_or(RestrictError::NotAnInput(qubit))?;
    out.terminal = p.terminal.clone().map(|t| FinalMeasure { qubits: t.qubits.into_iter().map(relabel).collect(), ..t });
    Ok(Restriction { program: out, transform: FunctionTransform::Marginal { position, value } })
}

#[cfg(test)]
mod tests {
    use super::*;

    const OR_TEXT: &str = "qubits 2\noracle-arity 1\ngate HADAMARD 0\ngate ORACLE 0 1\ngate HADAMARD 0\ngate MEASURE-1 0\ngate X-THETA 1 0.0\nfinal 1";

    #[test]
    fn parses_or_program() {
        let p = parse_program(OR_TEXT).unwrap();
        assert_eq!(p, Builtin::Or.program(0.0));
    }

    #[test]
    fn builtins_round_trip_and_validate() {
        for b in Builtin::ALL {
            for theta in [0.0, 0.074909, 2.819842099193151, -1.0e-7] {
                let p = b.program(theta);
                let text = serialize_program(&p);
                let q = parse_program(&text).unwrap();
                assert_eq!(q, p, "{}", b.name());
                assert_eq!(serialize_program(&q), text);
                assert!(validate_program(&p).is_empty(), "{}: {:?}", b.name(), validate_program(&p));
            }
        }
    }

    #[test]
    fn parse_errors_carry_lines() {
        let e = parse_program("qubits 2\noracle-arity 1\ngate ORACLE 0 0").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_program("qubits 2\noracle-arity 1\ngate ORACLE 0 2").unwrap_err();
        assert!(e.message.contains("out of range"));
        let e = parse_program("qubits 2\noracle-arity 1\ngate TOFFOLI 0 1").unwrap_err();
        assert!(e.message.contains("unknown gate"));
        let e = parse_program("qubits 2\noracle-arity 1\nfinal 1\nfinal 0").unwrap_err();
        assert_eq!((e.line, e.message.as_str()), (4, "duplicate `final` clause"));
        let e = parse_program("qubits 2\n# comment\noracle-arity 1\n\ngate U-THETA 0").unwrap_err();
        assert_eq!(e.line, 5);
        assert!(parse_program("oracle-arity 1\nqubits 2").is_err());
        assert!(parse_program("qubits 2\noracle-arity 1\nfinal 0 1").is_err());
        assert!(parse_program("qubits 2\noracle-arity 1\nfinal 0 1 table 00->0 01->1 10->?").is_err());
        assert!(parse_program("qubits 2\noracle-arity 1\ngate HADAMARD 0 -> 1").is_err());
    }

    #[test]
    fn tables_and_overrides_round_trip() {
        let text = "qubits 2\noracle-arity 1\ngate MEASURE-1 0 -> ?\ngate X-THETA 1 0.5\nfinal 0 1 table 00->? 01->0 10->? 11->1\n";
        let p = parse_program(text).unwrap();
        assert_eq!(p.halt_output(0), Some(Symbol::Unknown));
        assert_eq!(serialize_program(&p), text);
    }

    #[test]
    fn param_formatting() {
        assert_eq!(format_param(0.0), "0");
        assert_eq!(format_param(0.5), "0.5");
        assert_eq!(format_param(FRAC_PI_4), "0.78539816339744828");
        assert_eq!(format_param(1e-7), "9.9999999999999995e-08");
        assert_eq!(format_param(-2.0), "-2");
        for x in [0.074909, 1e20, -3.3e-9, 123456.789, std::f64::consts::PI] {
            assert_eq!(format_param(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn totality_diagnostics() {
        let mut p = Builtin::Or.program(0.0);
        p.terminal = None;
        let d = validate_program(&p);
        assert_eq!(d.len(), 1, "{d:?}");
        assert!(d[0].contains("non-halting"));
    }

    #[test]
    fn structural_diagnostics_reported() {
        let mut p = Builtin::Or.program(0.0);
        p.gates.push(Gate::Hadamard { qubit: 5 });
        p.gates.push(Gate::Oracle { inputs: vec![0, 1], output: 1 });
        let d = validate_program(&p);
        assert!(d.iter().any(|m| m.contains("out of range")));
        assert!(d.iter().any(|m| m.contains("oracle arity")));
        assert!(d.iter().any(|m| m.contains("used twice")));
    }

    #[test]
    fn restriction_of_andor2_on_qubit0_is_or() {
        for theta in [0.0, 0.074909, 1.3] {
            let r = restrict_program(&Builtin::AndOr2.program(theta), 0, false).unwrap();
            assert_eq!(r.program, Builtin::Or.program(theta));
            assert_eq!(r.transform, FunctionTransform::Marginal { position: 0, value: false });
        }
    }

    #[test]
    fn restriction_of_andor2_on_qubit1() {
        let r = restrict_program(&Builtin::AndOr2.program(0.2), 1, true).unwrap();
        let want = Program::new(2, 1)
            .gate(Gate::UTheta { qubit: 0, theta: FRAC_PI_4 })
            .gate(Gate::Oracle { inputs: vec![0], output: 1 })
            .gate(Gate::Hadamard { qubit: 0 })
            .gate(Gate::Measure { qubit: 0, halt_on: false })
            .gate(Gate::XTheta { qubit: 1, theta: 0.2 })
            .finish(1);
        assert_eq!(r.program, want);
        assert_eq!(r.transform, FunctionTransform::Marginal { position: 1, value: true });
    }

    #[test]
    fn restriction_errors() {
        let p = Builtin::AndOr2.program(0.0);
        assert_eq!(restrict_program(&p, 2, false).unwrap_err(), RestrictError::TerminalQubit(2));
        assert_eq!(restrict_program(&p, 3, false).unwrap_err(), RestrictError::OutOfRange(3));
        assert_eq!(restrict_program(&Builtin::Or.program(0.0), 0, false).unwrap_err(), RestrictError::LastQubit);
        let p = Program::new(3, 2)
            .gate(Gate::Cnot { control: 1, target: 0 })
            .gate(Gate::Oracle { inputs: vec![0, 1], output: 2 })
            .finish(2);
        assert!(matches!(restrict_program(&p, 0, true), Err(RestrictError::Target { gate: 0, .. })));
        let r = restrict_program(&p, 1, true).unwrap();
        assert_eq!(r.program.gates[0], Gate::XTheta { qubit: 0, theta: FRAC_PI_2 });
        let r = restrict_program(&p, 1, false).unwrap();
        assert_eq!(r.program.gates.len(), 1);
    }
}
