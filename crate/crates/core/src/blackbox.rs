//! Boolean black-box functions and the properties evaluated on them.
//!
//! A [`TruthTable`] of arity `n` lists `f(0), f(1), ..., f(2^n - 1)` where the
//! input string is read as a binary integer with its first bit most
//! significant.  It renders as that bit-string, e.g. `0001` for AND of two bits.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Arity cap for exhaustive enumeration (`2^(2^4)` = 65536 functions).
pub const MAX_ENUM_ARITY: usize = 4;
/// Arity cap for a single table (leaf values fit in a `u64`).
pub const MAX_ARITY: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlackboxError {
    #[error("arity {0} not supported")]
    BadArity(usize),
    #[error("invalid truth table {0:?}")]
    BadTable(String),
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("input position {position} out of range for arity {arity}")]
    PositionOutOfRange { position: usize, arity: usize },
    #[error("invalid permutation of {0} input strings")]
    BadPermutation(usize),
    #[error("unknown property {0:?}")]
    UnknownProperty(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    arity: u8,
    /// The rendered bit-string as an integer: `f(0)` is the top bit.
    bits: u64,
}

impl TruthTable {
    pub fn new(arity: usize, index: u64) -> Result<Self, BlackboxError> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(BlackboxError::BadArity(arity));
        }
        let len = 1u32 << arity;
        if len < 64 && index >> len != 0 {
            return Err(BlackboxError::BadTable(format!("index {index} for arity {arity}")));
        }
        Ok(TruthTable { arity: arity as u8, bits: index })
    }

    pub fn from_fn(arity: usize, f: impl Fn(usize) -> bool) -> Result<Self, BlackboxError> {
        let t = TruthTable::new(arity, 0)?;
        let bits = (0..t.len()).fold(0u64, |acc, x| (acc << 1) | u64::from(f(x)));
        Ok(TruthTable { bits, ..t })
    }

    /// Every function of the given arity, ordered by index.
    pub fn all(arity: usize) -> Result<Vec<TruthTable>, BlackboxError> {
        if arity == 0 || arity > MAX_ENUM_ARITY {
            return Err(BlackboxError::BadArity(arity));
        }
        let count = 1u64 << (1u32 << arity);
        Ok((0..count).map(|i| TruthTable { arity: arity as u8, bits: i }).collect())
    }

    pub fn arity(&self) -> usize {
        self.arity as usize
    }

    /// Number of inputs, `2^arity`.
    pub fn len(&self) -> usize {
        1 << self.arity
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Position in the enumeration order of [`TruthTable::all`].
    pub fn index(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn eval(&self, x: usize) -> bool {
        (self.bits >> (self.len() - 1 - x)) & 1 == 1
    }

    pub fn values(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(|x| self.eval(x))
    }

    /// Number of inputs on which `f` takes the value `value`.
    pub fn count(&self, value: bool) -> usize {
        self.values().filter(|&v| v == value).count()
    }

    pub fn complement(&self) -> TruthTable {
        TruthTable::from_fn(self.arity(), |x| !self.eval(x)).expect("same arity")
    }

    /// Fixes input bit `position` (0 = most significant) to `value`.
    pub fn marginal(&self, position: usize, value: bool) -> Result<TruthTable, BlackboxError> {
        let n = self.arity();
        if position >= n {
            return Err(BlackboxError::PositionOutOfRange { position, arity: n });
        }
        if n == 1 {
            return Err(BlackboxError::BadArity(0));
        }
        let shift = n - 1 - position;
        TruthTable::from_fn(n - 1, |y| {
            let high = (y >> shift) << (shift + 1);
            let low = y & ((1 << shift) - 1);
            self.eval(high | (usize::from(value) << shift) | low)
        })
    }

    /// `f^sigma(x) = f(sigma(x))`.
    pub fn permute(&self, sigma: &Permutation) -> Result<TruthTable, BlackboxError> {
        if sigma.len() != self.len() {
            return Err(BlackboxError::BadPermutation(sigma.len()));
        }
        TruthTable::from_fn(self.arity(), |x| self.eval(sigma.apply(x)))
    }

    pub fn apply(&self, t: &FunctionTransform) -> Result<TruthTable, BlackboxError> {
        match t {
            FunctionTransform::Identity => Ok(*self),
            FunctionTransform::Marginal { position, value } => self.marginal(*position, *value),
            FunctionTransform::Complement => Ok(self.complement()),
            FunctionTransform::Permute(sigma) => self.permute(sigma),
            FunctionTransform::Chain(steps) => steps.iter().try_fold(*self, |f, s| f.apply(s)),
        }
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in self.values() {
            f.write_str(if v { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for TruthTable {
    type Err = BlackboxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let len = s.len();
        if len < 2 || !len.is_power_of_two() || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(BlackboxError::BadTable(s.to_string()));
        }
        let arity = len.trailing_zeros() as usize;
        let bytes = s.as_bytes();
        TruthTable::from_fn(arity, |x| bytes[x] == b'1').map_err(|_| BlackboxError::BadTable(s.to_string()))
    }
}

/// A permutation of the `2^n` input strings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, BlackboxError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(BlackboxError::BadPermutation(n));
            }
        }
        Ok(Permutation(images))
    }

    pub fn identity(len: usize) -> Self {
        Permutation((0..len).collect())
    }

    /// Product of disjoint transpositions on `len` points.
    pub fn swaps(len: usize, pairs: &[(usize, usize)]) -> Result<Self, BlackboxError> {
        let mut images: Vec<usize> = (0..len).collect();
        for &(a, b) in pairs {
            if a >= len || b >= len {
                return Err(BlackboxError::BadPermutation(len));
            }
            images.swap(a, b);
        }
        Permutation::new(images)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctionTransform {
    Identity,
    Marginal { position: usize, value: bool },
    Complement,
    Permute(Permutation),
    /// Applied left to right.
    Chain(Vec<FunctionTransform>),
}

impl FunctionTransform {
    /// Arity of the functions this transform accepts, given the arity it must produce.
    pub fn source_arity(&self, target: usize) -> usize {
        match self {
            FunctionTransform::Marginal { .. } => target + 1,
            FunctionTransform::Chain(steps) => steps.iter().rev().fold(target, |a, s| s.source_arity(a)),
            _ => target,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connective {
    Or,
    And,
    Xor,
    Nand,
    Nor,
    Nxor,
}

impl Connective {
    pub fn eval(self, a: bool, b: bool) -> bool {
        match self {
            Connective::Or => a | b,
            Connective::And => a & b,
            Connective::Xor => a ^ b,
            Connective::Nand => !(a & b),
            Connective::Nor => !(a | b),
            Connective::Nxor => !(a ^ b),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Connective::Or => "or",
            Connective::And => "and",
            Connective::Xor => "xor",
            Connective::Nand => "nand",
            Connective::Nor => "nor",
            Connective::Nxor => "nxor",
        }
    }
}

/// A Boolean property `P(f)` of a black-box function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Property {
    /// A two-input connective applied to `(f(0), f(1))`.
    Connective(Connective),
    /// Alternating AND/OR tree of the given depth over the `2^depth` leaves
    /// `f(0), ..., f(2^depth - 1)`; `root_and` selects the root connective.
    AltTree { depth: usize, root_and: bool },
}

impl Property {
    pub const OR: Property = Property::Connective(Connective::Or);
    pub const AND: Property = Property::Connective(Connective::And);
    pub const XOR: Property = Property::Connective(Connective::Xor);
    pub const ANDOR2: Property = Property::AltTree { depth: 2, root_and: true };

    pub fn arity(&self) -> usize {
        match self {
            Property::Connective(_) => 1,
            Property::AltTree { depth, .. } => *depth,
        }
    }

    pub fn eval(&self, f: &TruthTable) -> Result<bool, BlackboxError> {
        if f.arity() != self.arity() {
            return Err(BlackboxError::ArityMismatch { expected: self.arity(), got: f.arity() });
        }
        Ok(match *self {
            Property::Connective(c) => c.eval(f.eval(0), f.eval(1)),
            Property::AltTree { depth, root_and } => eval_tree(f, 0, depth, root_and),
        })
    }

    /// Generators of the input permutations that leave the property invariant:
    /// swapping the two daughters of any internal node.
    pub fn automorphism_generators(&self) -> Vec<Permutation> {
        let depth = self.arity();
        let len = 1usize << depth;
        let mut gens = Vec::new();
        for level in 0..depth {
            let bit = 1usize << (depth - 1 - level);
            for prefix in 0..(1usize << level) {
                let base = prefix << (depth - level);
                let images = (0..len)
                    .map(|x| if x & !(2 * bit - 1) == base { x ^ bit } else { x })
                    .collect();
                gens.push(Permutation::new(images).expect("node swap is a permutation"));
            }
        }
        gens
    }
}

fn eval_tree(f: &TruthTable, node: usize, levels: usize, is_and: bool) -> bool {
    if levels == 0 {
        return f.eval(node);
    }
    let left = eval_tree(f, node * 2, levels - 1, !is_and);
    let right = eval_tree(f, node * 2 + 1, levels - 1, !is_and);
    if is_and {
        left && right
    } else {
        left || right
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::Connective(c) => f.write_str(c.name()),
            Property::AltTree { depth, root_and: true } => write!(f, "andor:{depth}"),
            Property::AltTree { depth, root_and: false } => write!(f, "orand:{depth}"),
        }
    }
}

impl FromStr for Property {
    type Err = BlackboxError;

    /// Accepts `or`, `and`, `xor`, `nand`, `nor`, `nxor`, `andor:<d>` and `orand:<d>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        let unknown = || BlackboxError::UnknownProperty(s.to_string());
        let conn = match lower.as_str() {
            "or" => Some(Connective::Or),
            "and" => Some(Connective::And),
            "xor" => Some(Connective::Xor),
            "nand" => Some(Connective::Nand),
            "nor" => Some(Connective::Nor),
            "nxor" | "xnor" => Some(Connective::Nxor),
            _ => None,
        };
        if let Some(c) = conn {
            return Ok(Property::Connective(c));
        }
        let (head, depth) = lower.split_once(':').ok_or_else(unknown)?;
        let depth: usize = depth.parse().map_err(|_| unknown())?;
        if depth == 0 || depth > MAX_ARITY {
            return Err(unknown());
        }
        match head {
            "andor" => Ok(Property::AltTree { depth, root_and: true }),
            "orand" => Ok(Property::AltTree { depth, root_and: false }),
            _ => Err(unknown()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    /// Lexicographically smallest member.
    pub representative: TruthTable,
    pub members: BTreeSet<TruthTable>,
}

impl Orbit {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPartition {
    pub orbits: Vec<Orbit>,
}

impl OrbitPartition {
    pub fn orbit_of(&self, f: &TruthTable) -> Option<&Orbit> {
        self.orbits.iter().find(|o| o.members.contains(f))
    }
}

/// Orbits of all functions of `arity` under the group generated by `generators`.
pub fn orbit_partition(arity: usize, generators: &[Permutation]) -> Result<OrbitPartition, BlackboxError> {
    let all = TruthTable::all(arity)?;
    let len = 1usize << arity;
    if let Some(g) = generators.iter().find(|g| g.len() != len) {
        return Err(BlackboxError::BadPermutation(g.len()));
    }
    let mut assigned = vec![false; all.len()];
    let mut orbits = Vec::new();
    for f in &all {
        if assigned[f.index() as usize] {
            continue;
        }
        let mut members = BTreeSet::new();
        let mut stack = vec![*f];
        assigned[f.index() as usize] = true;
        while let Some(g) = stack.pop() {
            members.insert(g);
            for sigma in generators {
                let h = g.permute(sigma)?;
                if !std::mem::replace(&mut assigned[h.index() as usize], true) {
                    stack.push(h);
                }
            }
        }
        // Equal-length bit-strings order lexicographically as their integers.
        let representative = *members.iter().next().expect("non-empty orbit");
        orbits.push(Orbit { representative, members });
    }
    orbits.sort_by_key(|o| o.representative);
    Ok(OrbitPartition { orbits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tt(s: &str) -> TruthTable {
        s.parse().unwrap()
    }

    #[test]
    fn rendering_round_trips() {
        for f in TruthTable::all(2).unwrap() {
            assert_eq!(tt(&f.to_string()), f);
        }
        assert_eq!(tt("0001").index(), 1);
        assert!("012".parse::<TruthTable>().is_err());
        assert!("000".parse::<TruthTable>().is_err());
    }

    #[test]
    fn property_values() {
        let andor = Property::ANDOR2;
        assert!(andor.eval(&tt("0101")).unwrap());
        assert!(!andor.eval(&tt("0001")).unwrap());
        assert!(!Property::OR.eval(&tt("00")).unwrap());
        assert!(matches!(Property::OR.eval(&tt("0001")), Err(BlackboxError::ArityMismatch { .. })));
        // (f0 or f1) and (f2 or f3), brute force
        for f in TruthTable::all(2).unwrap() {
            let v: Vec<bool> = f.values().collect();
            assert_eq!(andor.eval(&f).unwrap(), (v[0] || v[1]) && (v[2] || v[3]));
        }
        let d1 = Property::AltTree { depth: 1, root_and: false };
        for f in TruthTable::all(1).unwrap() {
            assert_eq!(d1.eval(&f).unwrap(), Property::OR.eval(&f).unwrap());
        }
    }

    #[test]
    fn de_morgan_on_connectives() {
        for a in [false, true] {
            for b in [false, true] {
                assert_eq!(Connective::And.eval(a, b), !Connective::Or.eval(!a, !b));
                assert_eq!(Connective::Nand.eval(a, b), Connective::Or.eval(!a, !b));
            }
        }
        for f in TruthTable::all(1).unwrap() {
            assert_eq!(Property::AND.eval(&f).unwrap(), !Property::OR.eval(&f.complement()).unwrap());
        }
    }

    #[test]
    fn transforms() {
        assert_eq!(tt("0001").marginal(0, false).unwrap(), tt("00"));
        assert_eq!(tt("0001").marginal(0, true).unwrap(), tt("01"));
        assert_eq!(tt("0001").marginal(1, true).unwrap(), tt("01"));
        assert_eq!(tt("0110").marginal(1, false).unwrap(), tt("01"));
        assert!(matches!(tt("0001").marginal(2, false), Err(BlackboxError::PositionOutOfRange { .. })));
        assert_eq!(tt("0001").complement(), tt("1110"));
        let swap23 = Permutation::swaps(4, &[(2, 3)]).unwrap();
        assert_eq!(tt("0001").permute(&swap23).unwrap(), tt("0010"));
        let chain = FunctionTransform::Chain(vec![
            FunctionTransform::Marginal { position: 1, value: true },
            FunctionTransform::Complement,
        ]);
        assert_eq!(chain.source_arity(1), 2);
        assert_eq!(tt("0100").apply(&chain).unwrap(), tt("01"));
    }

    #[test]
    fn counts() {
        for f in TruthTable::all(2).unwrap() {
            assert_eq!(f.count(false) + f.count(true), 4);
        }
        assert_eq!(tt("1101").count(true), 3);
    }

    #[test]
    fn andor2_generators_match_listed_swaps() {
        let gens = Property::ANDOR2.automorphism_generators();
        let want = [
            Permutation::swaps(4, &[(0, 2), (1, 3)]).unwrap(),
            Permutation::swaps(4, &[(0, 1)]).unwrap(),
            Permutation::swaps(4, &[(2, 3)]).unwrap(),
        ];
        assert_eq!(gens, want);
        assert_eq!(Property::OR.automorphism_generators(), vec![Permutation::swaps(2, &[(0, 1)]).unwrap()]);
    }

    #[test]
    fn andor2_orbits() {
        let part = orbit_partition(2, &Property::ANDOR2.automorphism_generators()).unwrap();
        let got: Vec<(String, usize)> = part.orbits.iter().map(|o| (o.representative.to_string(), o.size())).collect();
        // 1101 is listed as a representative; its orbit's smallest member is 0111.
        let want = [("0000", 1), ("0001", 4), ("0011", 2), ("0101", 4), ("0111", 4), ("1111", 1)];
        assert_eq!(got, want.map(|(s, n)| (s.to_string(), n)));
        assert_eq!(part.orbit_of(&tt("1101")).unwrap().representative, tt("0111"));
        for o in &part.orbits {
            let vals: BTreeSet<bool> = o.members.iter().map(|f| Property::ANDOR2.eval(f).unwrap()).collect();
            assert_eq!(vals.len(), 1);
        }
    }

    #[test]
    fn trivial_group_gives_singletons() {
        let part = orbit_partition(2, &[Permutation::identity(4)]).unwrap();
        assert_eq!(part.orbits.len(), 16);
        let part = orbit_partition(2, &[]).unwrap();
        assert_eq!(part.orbits.iter().map(Orbit::size).sum::<usize>(), 16);
        assert!(orbit_partition(2, &[Permutation::identity(2)]).is_err());
        assert!(Permutation::new(vec![0, 0, 1, 2]).is_err());
    }

    #[test]
    fn property_parsing() {
        assert_eq!("andor:2".parse::<Property>().unwrap(), Property::ANDOR2);
        assert_eq!("OR".parse::<Property>().unwrap(), Property::OR);
        assert_eq!(Property::ANDOR2.to_string(), "andor:2");
        assert!("andor:x".parse::<Property>().is_err());
        assert!("maj".parse::<Property>().is_err());
    }

    proptest! {
        #[test]
        fn permutation_action_is_bijective(images in Just((0..4usize).collect::<Vec<_>>()).prop_shuffle()) {
            let sigma = Permutation::new(images).unwrap();
            let all = TruthTable::all(2).unwrap();
            let image: BTreeSet<TruthTable> = all.iter().map(|f| f.permute(&sigma).unwrap()).collect();
            prop_assert_eq!(image.len(), all.len());
        }

        #[test]
        fn orbit_sizes_partition(images in Just((0..8usize).collect::<Vec<_>>()).prop_shuffle()) {
            let part = orbit_partition(3, &[Permutation::new(images).unwrap()]).unwrap();
            prop_assert_eq!(part.orbits.iter().map(Orbit::size).sum::<usize>(), 256);
        }
    }
}
