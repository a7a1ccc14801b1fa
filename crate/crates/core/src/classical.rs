//! Classical baselines: exact expected query counts of depth-first pruning
//! on alternating AND/OR trees, and the threshold a one-query quantum
//! algorithm must beat to do better than any classical Monte Carlo algorithm.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::analyzer::{ErrorReport, Sidedness};
use crate::blackbox::{Connective, Property, TruthTable, MAX_ENUM_ARITY};

pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassicalError {
    #[error("depth {0} is outside 1..={MAX_ENUM_ARITY}")]
    Depth(usize),
    #[error("property {0} is not an AND/OR tree")]
    NotATree(String),
}

/// Normalizes OR/AND connectives to their depth-one tree.
pub fn as_tree(prop: &Property) -> Result<(usize, bool), ClassicalError> {
    match *prop {
        Property::AltTree { depth, root_and } => Ok((depth, root_and)),
        Property::Connective(Connective::Or) => Ok((1, false)),
        Property::Connective(Connective::And) => Ok((1, true)),
        other => Err(ClassicalError::NotATree(other.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DfpStats {
    pub depth: usize,
    pub root_and: bool,
    pub per_assignment: Vec<(TruthTable, Rational)>,
    pub worst_case: Rational,
    pub uniform_average: Rational,
}

impl DfpStats {
    pub fn get(&self, f: &TruthTable) -> Option<Rational> {
        self.per_assignment.iter().find(|(g, _)| g == f).map(|(_, q)| *q)
    }

    /// Assignments attaining the worst case.
    pub fn worst_assignments(&self) -> Vec<TruthTable> {
        self.per_assignment.iter().filter(|(_, q)| *q == self.worst_case).map(|(f, _)| *f).collect()
    }

    /// `assignment,num/den,float` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("assignment,expected_queries,expected_queries_float\n");
        for (f, q) in &self.per_assignment {
            out.push_str(&format!("{f},{}/{},{}\n", q.numer(), q.denom(), ratio_f64(q)));
        }
        out
    }
}

pub fn ratio_f64(q: &Rational) -> f64 {
    q.to_f64().expect("finite ratio")
}

/// (value, expected queries) of the subtree of `levels` rooted at leaf-block `node`.
fn dfp_node(f: &TruthTable, node: usize, levels: usize, is_and: bool) -> (bool, Rational) {
    if levels == 0 {
        return (f.eval(node), Rational::from_integer(1));
    }
    let (lv, lc) = dfp_node(f, 2 * node, levels - 1, !is_and);
    let (rv, rc) = dfp_node(f, 2 * node + 1, levels - 1, !is_and);
    // An AND node is settled by a 0 daughter, an OR node by a 1.
    let settles = |v: bool| v != is_and;
    let half = Rational::new(1, 2);
    let left_first = lc + if settles(lv) { Rational::zero() } else { rc };
    let right_first = rc + if settles(rv) { Rational::zero() } else { lc };
    let value = if is_and { lv && rv } else { lv || rv };
    (value, half * (left_first + right_first))
}

pub fn dfp_expected_queries(f: &TruthTable, root_and: bool) -> Rational {
    dfp_node(f, 0, f.arity(), root_and).1
}

pub fn dfp_stats(prop: &Property) -> Result<DfpStats, ClassicalError> {
    let (depth, root_and) = as_tree(prop)?;
    if depth == 0 || depth > MAX_ENUM_ARITY {
        return Err(ClassicalError::Depth(depth));
    }
    let all = TruthTable::all(depth).map_err(|_| ClassicalError::Depth(depth))?;
    let per_assignment: Vec<(TruthTable, Rational)> =
        all.iter().map(|f| (*f, dfp_expected_queries(f, root_and))).collect();
    let worst_case = per_assignment.iter().map(|(_, q)| *q).max().expect("non-empty");
    let total = per_assignment.iter().fold(Rational::zero(), |acc, (_, q)| acc + q);
    let uniform_average = total / Rational::from_integer(per_assignment.len() as i64);
    Ok(DfpStats { depth, root_and, per_assignment, worst_case, uniform_average })
}

/// One randomized DFP run; returns (value, queries made).
pub fn dfp_simulate<R: Rng + ?Sized>(f: &TruthTable, root_and: bool, rng: &mut R) -> (bool, u32) {
    fn eval<R: Rng + ?Sized>(f: &TruthTable, node: usize, levels: usize, is_and: bool, rng: &mut R) -> (bool, u32) {
        if levels == 0 {
            return (f.eval(node), 1);
        }
        let first = rng.random_bool(0.5) as usize;
        let (v, mut cost) = eval(f, 2 * node + first, levels - 1, !is_and, rng);
        if v != is_and {
            return (v, cost);
        }
        let (w, c2) = eval(f, 2 * node + 1 - first, levels - 1, !is_and, rng);
        cost += c2;
        (w, cost)
    }
    eval(f, 0, f.arity(), root_and, rng)
}

/// `(1/x)(1 - q/Q)`, clamped at zero: the largest error a `q`-query
/// algorithm may have and still beat every classical one.
pub fn santha_threshold(q: f64, big_q: f64, sided: u8) -> f64 {
    let x = f64::from(sided.max(1));
    ((1.0 - q / big_q) / x).max(0.0)
}

/// Classical Las Vegas baseline used by default: DFP at depth 1 averages 3/2
/// queries over assignments, at depth 2 its worst case is 3.  Other depths use
/// the DFP worst case.
pub fn default_baseline(prop: &Property) -> Option<f64> {
    match prop.arity() {
        1 => Some(1.5),
        2 => Some(3.0),
        _ => dfp_stats(prop).ok().map(|s| ratio_f64(&s.worst_case)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub x: u8,
    pub threshold: f64,
    pub p_error_max: f64,
    pub q_max: f64,
    pub baseline_queries: f64,
    pub better_than_classical: bool,
}

pub fn classical_verdict(report: &ErrorReport, big_q: f64) -> Verdict {
    let (x, threshold, better) = match report.sidedness {
        Sidedness::Exact => (1, santha_threshold(report.q_max, big_q, 1), report.q_max < big_q),
        Sidedness::OneSidedOn0 | Sidedness::OneSidedOn1 => {
            let t = santha_threshold(report.q_max, big_q, 1);
            (1, t, report.p_error_max < t)
        }
        Sidedness::TwoSided => {
            let t = santha_threshold(report.q_max, big_q, 2);
            (2, t, report.p_error_max < t)
        }
    };
    Verdict {
        x,
        threshold,
        p_error_max: report.p_error_max,
        q_max: report.q_max,
        baseline_queries: big_q,
        better_than_classical: better,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn tt(s: &str) -> TruthTable {
        s.parse().unwrap()
    }

    /// Enumerates every assignment of daughter orders to the internal nodes
    /// and runs the deterministic pruning walk for each.
    fn brute_force(f: &TruthTable, root_and: bool) -> Rational {
        let depth = f.arity();
        let internal = (1usize << depth) - 1;
        let mut total = 0i64;
        for orders in 0..(1u64 << internal) {
            fn walk(f: &TruthTable, id: usize, node: usize, levels: usize, is_and: bool, orders: u64) -> (bool, i64) {
                if levels == 0 {
                    return (f.eval(node), 1);
                }
                let flip = (orders >> (id - 1)) & 1 == 1;
                let kids = if flip { [1, 0] } else { [0, 1] };
                let (v, c) = walk(f, 2 * id + kids[0], 2 * node + kids[0], levels - 1, !is_and, orders);
                if v != is_and {
                    return (v, c);
                }
                let (w, c2) = walk(f, 2 * id + kids[1], 2 * node + kids[1], levels - 1, !is_and, orders);
                (w, c + c2)
            }
            total += walk(f, 1, 0, depth, root_and, orders).1;
        }
        Rational::new(total, 1i64 << internal)
    }

    #[test]
    fn recursion_matches_enumeration() {
        for depth in 1..=3 {
            for root_and in [false, true] {
                for f in TruthTable::all(depth).unwrap() {
                    assert_eq!(dfp_expected_queries(&f, root_and), brute_force(&f, root_and), "{f} d{depth}");
                }
            }
        }
    }

    #[test]
    fn depth_one_or() {
        let s = dfp_stats(&Property::OR).unwrap();
        let want = [("00", r(2, 1)), ("01", r(3, 2)), ("10", r(3, 2)), ("11", r(1, 1))];
        for (f, q) in want {
            assert_eq!(s.get(&tt(f)), Some(q));
        }
        assert_eq!(s.uniform_average, r(3, 2));
        assert_eq!(s.worst_case, r(2, 1));
    }

    #[test]
    fn depth_one_and_is_mirrored() {
        let s = dfp_stats(&Property::AND).unwrap();
        let want = [("11", r(2, 1)), ("01", r(3, 2)), ("10", r(3, 2)), ("00", r(1, 1))];
        for (f, q) in want {
            assert_eq!(s.get(&tt(f)), Some(q));
        }
    }

    #[test]
    fn depth_two_and_root() {
        let s = dfp_stats(&Property::ANDOR2).unwrap();
        assert_eq!(s.worst_case, r(3, 1));
        assert_eq!(s.uniform_average, r(21, 8));
        let worst: Vec<String> = s.worst_assignments().iter().map(|f| f.to_string()).collect();
        assert_eq!(worst, ["0101", "0110", "1001", "1010"]);
    }

    #[test]
    fn bounds_hold() {
        for depth in 1..=4 {
            for root_and in [false, true] {
                let s = dfp_stats(&Property::AltTree { depth, root_and }).unwrap();
                let cap = Rational::from_integer(1 << depth);
                assert!(s.per_assignment.iter().all(|(_, q)| *q >= r(1, 1) && *q <= cap));
                assert!(s.worst_case >= s.uniform_average && s.uniform_average >= r(1, 1));
            }
        }
        assert_eq!(dfp_stats(&Property::AltTree { depth: 5, root_and: true }).unwrap_err(), ClassicalError::Depth(5));
        assert!(dfp_stats(&Property::XOR).is_err());
    }

    #[test]
    fn monte_carlo_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = dfp_stats(&Property::ANDOR2).unwrap();
        for (f, q) in &s.per_assignment {
            let runs = 100_000;
            let mut sum = 0u64;
            for _ in 0..runs {
                let (v, c) = dfp_simulate(f, true, &mut rng);
                assert_eq!(v, Property::ANDOR2.eval(f).unwrap());
                sum += u64::from(c);
            }
            assert!((sum as f64 / runs as f64 - ratio_f64(q)).abs() < 0.02, "{f}");
        }
    }

    #[test]
    fn thresholds() {
        assert!((santha_threshold(1.0, 3.0, 2) - 1.0 / 3.0).abs() < 1e-15);
        assert!((santha_threshold(1.0, 1.5, 2) - 1.0 / 6.0).abs() < 1e-15);
        assert!((santha_threshold(1.0, 1.5, 1) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(santha_threshold(2.0, 2.0, 1), 0.0);
        assert_eq!(santha_threshold(3.0, 2.0, 2), 0.0);
    }

    #[test]
    fn csv_rows() {
        let csv = dfp_stats(&Property::OR).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "assignment,expected_queries,expected_queries_float");
        assert_eq!(lines[1], "00,2/1,2");
        assert_eq!(lines[2], "01,3/2,1.5");
    }
}
