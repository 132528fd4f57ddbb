//! Exact solution-space analysis: AllSAT enumeration, diameter, distance profiles
//! and maximal satisfying assignments.
//!
//! Two exact enumeration routes are provided. [`Enumerator::exhaustive_scan`] tests
//! 64 assignments per machine word against precomputed clause masks;
//! [`Enumerator::backtrack_all`] is a DPLL-style search with unit propagation that
//! expands free variables once every clause is satisfied. [`Enumerator::all_satisfying`]
//! dispatches on `n`.

use std::ops::ControlFlow;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::cnf::{Assignment, Formula, PlantedInstance};
use crate::{Error, Result};

/// All satisfying assignments of a formula on at most 64 variables, in ascending
/// integer order (bit `i` of the integer is variable `i`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionSet {
    n: usize,
    values: Vec<u64>,
}

impl SolutionSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Solutions packed as integers.
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = Assignment> + '_ {
        self.values.iter().map(|&v| Assignment::from_u64(self.n, v).expect("fits"))
    }

    pub fn contains(&self, a: &Assignment) -> bool {
        a.n() == self.n && a.as_u64().is_some_and(|v| self.values.binary_search(&v).is_ok())
    }
}

/// Counts indexed by Hamming distance `0..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceProfile {
    n: usize,
    counts: Vec<BigUint>,
}

impl DistanceProfile {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        let n = counts.len().saturating_sub(1);
        Self { n, counts: counts.into_iter().map(BigUint::from).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    /// Count at distance `d`; zero outside `[0, n]`.
    pub fn get(&self, d: usize) -> BigUint {
        self.counts.get(d).cloned().unwrap_or_default()
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// Largest distance with a nonzero count.
    pub fn max_nonzero(&self) -> Option<usize> {
        self.counts.iter().rposition(|c| !c.is_zero())
    }

    pub fn to_u64(&self) -> Vec<u64> {
        self.counts
            .iter()
            .map(|c| u64::try_from(c).expect("count fits in u64"))
            .collect()
    }
}

/// Enumeration limits and dispatch thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Enumerator {
    /// Formulas with at most this many variables use the bit-parallel scan.
    pub scan_max_vars: usize,
    /// Hard bound on `n` for any enumeration.
    pub max_vars: usize,
    /// Largest solution set for which pairwise operations run.
    pub pair_cap: usize,
}

impl Default for Enumerator {
    fn default() -> Self {
        Self { scan_max_vars: 20, max_vars: 64, pair_cap: 1 << 20 }
    }
}

/// Hard limit for the exhaustive scan.
pub const SCAN_LIMIT: usize = 32;

const LOW_BITS: usize = 6;
const LOW_PATTERNS: [u64; LOW_BITS] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

struct ClauseMask {
    low: u64,
    high_pos: u64,
    high_neg: u64,
}

impl ClauseMask {
    fn new(clause: &crate::Clause) -> Self {
        let mut m = ClauseMask { low: 0, high_pos: 0, high_neg: 0 };
        for l in clause.literals() {
            if l.var < LOW_BITS {
                let p = LOW_PATTERNS[l.var];
                m.low |= if l.positive { p } else { !p };
            } else if l.positive {
                m.high_pos |= 1 << (l.var - LOW_BITS);
            } else {
                m.high_neg |= 1 << (l.var - LOW_BITS);
            }
        }
        m
    }

    #[inline]
    fn block(&self, block: u64) -> u64 {
        if block & self.high_pos != 0 || !block & self.high_neg != 0 {
            u64::MAX
        } else {
            self.low
        }
    }
}

impl Enumerator {
    fn check_bound(&self, n: usize) -> Result<()> {
        let bound = self.max_vars.min(64);
        if n > bound {
            return Err(Error::EnumerationBound { n, bound });
        }
        Ok(())
    }

    pub fn all_satisfying(&self, f: &Formula) -> Result<SolutionSet> {
        self.check_bound(f.n())?;
        if f.n() <= self.scan_max_vars.min(SCAN_LIMIT) {
            self.exhaustive_scan(f)
        } else {
            self.backtrack_all(f)
        }
    }

    pub fn is_satisfiable(&self, f: &Formula) -> Result<bool> {
        self.check_bound(f.n())?;
        let mut found = false;
        let mut stop = |_| {
            found = true;
            ControlFlow::Break(())
        };
        if f.n() <= self.scan_max_vars.min(SCAN_LIMIT) {
            scan(f, &mut stop);
        } else {
            backtrack(f, &mut stop);
        }
        Ok(found)
    }

    /// Bit-parallel test of all `2^n` assignments.
    pub fn exhaustive_scan(&self, f: &Formula) -> Result<SolutionSet> {
        if f.n() > SCAN_LIMIT {
            return Err(Error::EnumerationBound { n: f.n(), bound: SCAN_LIMIT });
        }
        let mut values = Vec::new();
        scan(f, &mut |v| {
            values.push(v);
            ControlFlow::Continue(())
        });
        Ok(SolutionSet { n: f.n(), values })
    }

    /// Backtracking search with unit propagation.
    pub fn backtrack_all(&self, f: &Formula) -> Result<SolutionSet> {
        self.check_bound(f.n())?;
        let mut values = Vec::new();
        backtrack(f, &mut |v| {
            values.push(v);
            ControlFlow::Continue(())
        });
        values.sort_unstable();
        Ok(SolutionSet { n: f.n(), values })
    }

    /// Maximal Hamming distance between two satisfying assignments.
    pub fn r_max(&self, f: &Formula) -> Result<usize> {
        let sols = self.all_satisfying(f)?;
        if sols.is_empty() {
            return Err(Error::Unsatisfiable);
        }
        self.check_cap(&sols)?;
        let n = f.n() as u32;
        let vals = sols.values();
        let mut best = 0u32;
        for (i, &a) in vals.iter().enumerate() {
            for &b in &vals[i + 1..] {
                best = best.max((a ^ b).count_ones());
            }
            if best == n {
                break;
            }
        }
        Ok(best as usize)
    }

    pub fn distance_profile(&self, f: &Formula, reference: &Assignment) -> Result<DistanceProfile> {
        if reference.n() != f.n() {
            return Err(Error::DimensionMismatch { expected: f.n(), found: reference.n() });
        }
        let sols = self.all_satisfying(f)?;
        let r = reference.as_u64().expect("n <= 64");
        let mut counts = vec![0u64; f.n() + 1];
        for &v in sols.values() {
            counts[(v ^ r).count_ones() as usize] += 1;
        }
        Ok(DistanceProfile::from_counts(counts))
    }

    /// Unordered pairs of distinct solutions by mutual distance.
    pub fn pair_profile(&self, f: &Formula) -> Result<DistanceProfile> {
        let sols = self.all_satisfying(f)?;
        self.check_cap(&sols)?;
        Ok(pair_counts(f.n(), sols.values()))
    }

    pub fn maximal_profile(&self, instance: &PlantedInstance) -> Result<DistanceProfile> {
        let f = instance.formula();
        let sols = self.all_satisfying(f)?;
        let planted = instance.planted();
        let p = planted.as_u64().expect("n <= 64");
        let mut counts = vec![0u64; f.n() + 1];
        for a in sols.iter() {
            if single_flip_maximal(f, planted, &a) {
                let v = a.as_u64().expect("n <= 64");
                counts[(v ^ p).count_ones() as usize] += 1;
            }
        }
        Ok(DistanceProfile::from_counts(counts))
    }

    fn check_cap(&self, sols: &SolutionSet) -> Result<()> {
        if sols.len() > self.pair_cap {
            return Err(Error::SolutionCap { count: sols.len(), cap: self.pair_cap });
        }
        Ok(())
    }
}

pub(crate) fn pair_counts(n: usize, vals: &[u64]) -> DistanceProfile {
    let mut counts = vec![0u64; n + 1];
    for (i, &a) in vals.iter().enumerate() {
        for &b in &vals[i + 1..] {
            counts[(a ^ b).count_ones() as usize] += 1;
        }
    }
    DistanceProfile::from_counts(counts)
}

fn scan(f: &Formula, visit: &mut dyn FnMut(u64) -> ControlFlow<()>) {
    let n = f.n();
    let masks: Vec<ClauseMask> = f.clauses().iter().map(ClauseMask::new).collect();
    let (blocks, valid) = if n >= LOW_BITS {
        (1u64 << (n - LOW_BITS), u64::MAX)
    } else {
        (1, (1u64 << (1u64 << n)) - 1)
    };
    for block in 0..blocks {
        let mut live = valid;
        for m in &masks {
            live &= m.block(block);
            if live == 0 {
                break;
            }
        }
        while live != 0 {
            let bit = live.trailing_zeros() as u64;
            live &= live - 1;
            if visit((block << LOW_BITS) | bit).is_break() {
                return;
            }
        }
    }
}

const UNSET: i8 = -1;

struct Search<'a> {
    f: &'a Formula,
    vals: Vec<i8>,
    trail: Vec<usize>,
}

enum Propagation {
    Conflict,
    AllSatisfied,
    Open,
}

impl Search<'_> {
    fn assign(&mut self, var: usize, value: bool) {
        self.vals[var] = i8::from(value);
        self.trail.push(var);
    }

    fn undo_to(&mut self, mark: usize) {
        for var in self.trail.drain(mark..) {
            self.vals[var] = UNSET;
        }
    }

    fn propagate(&mut self) -> Propagation {
        loop {
            let mut changed = false;
            let mut open = false;
            for c in self.f.clauses() {
                let mut unit = None;
                let mut unassigned = 0;
                let mut sat = false;
                for l in c.literals() {
                    match self.vals[l.var] {
                        UNSET => {
                            unassigned += 1;
                            unit = Some(*l);
                        }
                        v => {
                            if (v == 1) == l.positive {
                                sat = true;
                                break;
                            }
                        }
                    }
                }
                if sat {
                    continue;
                }
                match unassigned {
                    0 => return Propagation::Conflict,
                    1 => {
                        let l = unit.expect("one unassigned literal");
                        self.assign(l.var, l.positive);
                        changed = true;
                    }
                    _ => open = true,
                }
            }
            if !changed {
                return if open { Propagation::Open } else { Propagation::AllSatisfied };
            }
        }
    }

    fn packed(&self) -> u64 {
        self.vals
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &v)| acc | (u64::from(v == 1) << i))
    }

    fn run(&mut self, visit: &mut dyn FnMut(u64) -> ControlFlow<()>) -> ControlFlow<()> {
        let mark = self.trail.len();
        let flow = match self.propagate() {
            Propagation::Conflict => ControlFlow::Continue(()),
            Propagation::AllSatisfied => {
                let base = self.packed();
                let free: Vec<usize> = (0..self.vals.len()).filter(|&i| self.vals[i] == UNSET).collect();
                let mut flow = ControlFlow::Continue(());
                for combo in 0..(1u64 << free.len()) {
                    let v = free
                        .iter()
                        .enumerate()
                        .fold(base, |acc, (j, &var)| acc | (((combo >> j) & 1) << var));
                    flow = visit(v);
                    if flow.is_break() {
                        break;
                    }
                }
                flow
            }
            Propagation::Open => {
                let var = self.vals.iter().position(|&v| v == UNSET).expect("open clause has a free variable");
                let mut flow = ControlFlow::Continue(());
                for value in [false, true] {
                    let inner = self.trail.len();
                    self.assign(var, value);
                    flow = self.run(visit);
                    self.undo_to(inner);
                    if flow.is_break() {
                        break;
                    }
                }
                flow
            }
        };
        self.undo_to(mark);
        flow
    }
}

fn backtrack(f: &Formula, visit: &mut dyn FnMut(u64) -> ControlFlow<()>) {
    let mut s = Search { f, vals: vec![UNSET; f.n()], trail: Vec::new() };
    let _ = s.run(visit);
}

/// Variables whose literal is the unique true literal of some clause under `a`.
pub fn pinned_variables(f: &Formula, a: &Assignment) -> Vec<bool> {
    let mut pinned = vec![false; f.n()];
    for c in f.clauses() {
        let mut only = None;
        let mut count = 0;
        for l in c.literals() {
            if l.is_true_under(a) {
                count += 1;
                only = Some(l.var);
            }
        }
        if count == 1 {
            pinned[only.expect("one true literal")] = true;
        }
    }
    pinned
}

/// Flipping `var` in satisfying `a` breaks satisfaction iff `var` is pinned.
pub fn flip_breaks_satisfaction(f: &Formula, a: &Assignment, var: usize) -> bool {
    pinned_variables(f, a)[var]
}

fn single_flip_maximal(f: &Formula, planted: &Assignment, a: &Assignment) -> bool {
    let pinned = pinned_variables(f, a);
    (0..f.n()).all(|i| a.get(i) != planted.get(i) || pinned[i])
}

fn check_candidate(instance: &PlantedInstance, candidate: &Assignment) -> Result<()> {
    if !instance.formula().evaluate(candidate)? {
        return Err(Error::NotSatisfying);
    }
    Ok(())
}

/// Single-flip maximality: no variable agreeing with the planted assignment can be
/// flipped while keeping the formula satisfied.
pub fn is_maximal(instance: &PlantedInstance, candidate: &Assignment) -> Result<bool> {
    check_candidate(instance, candidate)?;
    Ok(single_flip_maximal(instance.formula(), instance.planted(), candidate))
}

/// Literal reading of maximality: no satisfying assignment differs from the planted
/// one on a variable where `candidate` and the planted assignment agree.
pub fn is_strictly_maximal(instance: &PlantedInstance, candidate: &Assignment, solutions: &SolutionSet) -> Result<bool> {
    check_candidate(instance, candidate)?;
    let n = instance.formula().n();
    if solutions.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: solutions.n() });
    }
    let p = instance.planted().as_u64().ok_or(Error::EnumerationBound { n, bound: 64 })?;
    let c = candidate.as_u64().expect("same n");
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let agree = !(c ^ p) & full;
    Ok(solutions.values().iter().all(|&s| (s ^ p) & agree == 0))
}

/// Greedy flips towards maximality, lowest eligible variable first. Returns every
/// visited assignment, starting with `start`.
pub fn maximalize_trace(instance: &PlantedInstance, start: &Assignment) -> Result<Vec<Assignment>> {
    check_candidate(instance, start)?;
    let f = instance.formula();
    let planted = instance.planted();
    let mut cur = start.clone();
    let mut trace = vec![cur.clone()];
    loop {
        let pinned = pinned_variables(f, &cur);
        match (0..f.n()).find(|&i| cur.get(i) == planted.get(i) && !pinned[i]) {
            Some(i) => {
                cur.flip(i);
                trace.push(cur.clone());
            }
            None => return Ok(trace),
        }
    }
}

pub fn maximalize(instance: &PlantedInstance, start: &Assignment) -> Result<Assignment> {
    Ok(maximalize_trace(instance, start)?.pop().expect("trace holds the start"))
}

pub fn all_satisfying(f: &Formula) -> Result<SolutionSet> {
    Enumerator::default().all_satisfying(f)
}

pub fn is_satisfiable(f: &Formula) -> Result<bool> {
    Enumerator::default().is_satisfiable(f)
}

pub fn r_max(f: &Formula) -> Result<usize> {
    Enumerator::default().r_max(f)
}

pub fn distance_profile(f: &Formula, reference: &Assignment) -> Result<DistanceProfile> {
    Enumerator::default().distance_profile(f, reference)
}

pub fn pair_profile(f: &Formula) -> Result<DistanceProfile> {
    Enumerator::default().pair_profile(f)
}

pub fn maximal_profile(instance: &PlantedInstance) -> Result<DistanceProfile> {
    Enumerator::default().maximal_profile(instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{Clause, Literal};

    fn clause(lits: &[i64]) -> Clause {
        Clause::new(
            lits.iter()
                .map(|&l| Literal::new(l.unsigned_abs() as usize - 1, l > 0))
                .collect(),
        )
        .unwrap()
    }

    fn formula(n: usize, clauses: &[&[i64]]) -> Formula {
        let k = clauses.first().map_or(3, |c| c.len());
        Formula::new(n, k, clauses.iter().map(|c| clause(c)).collect()).unwrap()
    }

    fn a(s: &str) -> Assignment {
        s.parse().unwrap()
    }

    fn both_routes(f: &Formula) -> SolutionSet {
        let e = Enumerator::default();
        let scan = e.exhaustive_scan(f).unwrap();
        assert_eq!(scan, e.backtrack_all(f).unwrap());
        scan
    }

    #[test]
    fn all_satisfying_examples() {
        let one = formula(3, &[&[1, 2, 3]]);
        let sols = both_routes(&one);
        assert_eq!(sols.len(), 7);
        assert!(!sols.contains(&a("000")));

        let two = formula(3, &[&[1, 2, 3], &[-1, -2, -3]]);
        let sols = both_routes(&two);
        assert_eq!(sols.len(), 6);
        assert!(!sols.contains(&a("111")));

        let all: Vec<Clause> = (0..8u64).map(|p| Clause::from_parts(&[0, 1, 2], p).unwrap()).collect();
        let unsat = Formula::new(3, 3, all).unwrap();
        assert!(both_routes(&unsat).is_empty());
        assert!(!is_satisfiable(&unsat).unwrap());
    }

    #[test]
    fn r_max_examples() {
        assert_eq!(r_max(&formula(3, &[&[1, 2, 3]])).unwrap(), 3);
        // x1 forced true, x2 forced true, x3 forced true
        let unique = formula(3, &[&[1, 2], &[1, -2], &[2, -1], &[3, 1], &[3, -1]]);
        assert_eq!(all_satisfying(&unique).unwrap().len(), 1);
        assert_eq!(r_max(&unique).unwrap(), 0);
        let unsat = formula(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]);
        assert_eq!(r_max(&unsat), Err(Error::Unsatisfiable));
    }

    #[test]
    fn distance_profile_examples() {
        let f = formula(3, &[&[1, 2, 3]]);
        assert_eq!(distance_profile(&f, &a("111")).unwrap().to_u64(), vec![1, 3, 3, 0]);
        let empty = Formula::empty(3, 3).unwrap();
        assert_eq!(distance_profile(&empty, &a("010")).unwrap().to_u64(), vec![1, 3, 3, 1]);
        assert!(distance_profile(&f, &a("11")).is_err());
    }

    #[test]
    fn pair_profile_examples() {
        let f = formula(3, &[&[1, 2, 3]]);
        let p = pair_profile(&f).unwrap();
        assert_eq!(p.to_u64(), vec![0, 9, 9, 3]);
        assert_eq!(p.total(), BigUint::from(21u32));
        let unsat = formula(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]);
        assert_eq!(pair_profile(&unsat).unwrap().to_u64(), vec![0, 0, 0]);
    }

    #[test]
    fn pair_cap_is_an_error() {
        let e = Enumerator { pair_cap: 4, ..Enumerator::default() };
        let f = formula(3, &[&[1, 2, 3]]);
        assert!(matches!(e.pair_profile(&f), Err(Error::SolutionCap { count: 7, cap: 4 })));
    }

    #[test]
    fn maximality_examples() {
        let inst = PlantedInstance::new(formula(3, &[&[1, 2, 3]]), a("111")).unwrap();
        assert!(is_maximal(&inst, &a("001")).unwrap());
        assert!(!is_maximal(&inst, &a("111")).unwrap());
        assert_eq!(is_maximal(&inst, &a("000")), Err(Error::NotSatisfying));

        let trace = maximalize_trace(&inst, &a("111")).unwrap();
        let strings: Vec<String> = trace.iter().map(|t| t.to_bitstring()).collect();
        assert_eq!(strings, ["111", "011", "001"]);
        assert_eq!(maximalize(&inst, &a("001")).unwrap(), a("001"));

        assert_eq!(maximal_profile(&inst).unwrap().to_u64(), vec![0, 0, 3, 0]);
    }

    #[test]
    fn complement_is_vacuously_maximal() {
        let inst = PlantedInstance::new(formula(3, &[&[1, -2, 3]]), a("110")).unwrap();
        assert!(is_maximal(&inst, &a("001")).unwrap());
        let sols = all_satisfying(inst.formula()).unwrap();
        assert!(is_strictly_maximal(&inst, &a("001"), &sols).unwrap());
    }

    #[test]
    fn empty_formula_maximal_only_at_antipode() {
        let inst = PlantedInstance::new(Formula::empty(4, 3).unwrap(), a("1010")).unwrap();
        assert_eq!(maximal_profile(&inst).unwrap().to_u64(), vec![0, 0, 0, 0, 1]);
    }

    #[test]
    fn strict_maximality_is_stronger() {
        // single-flip maximal 001 is not strictly maximal: 010 satisfies and moves x2
        let inst = PlantedInstance::new(formula(3, &[&[1, 2, 3]]), a("111")).unwrap();
        let sols = all_satisfying(inst.formula()).unwrap();
        assert!(is_maximal(&inst, &a("001")).unwrap());
        assert!(!is_strictly_maximal(&inst, &a("001"), &sols).unwrap());
    }

    #[test]
    fn backtracking_handles_more_than_scan_bound() {
        let e = Enumerator::default();
        // 24 variables, clauses only touch the first three
        let f = Formula::new(24, 3, vec![clause(&[1, 2, 3]), clause(&[-1, -2, -3])]).unwrap();
        let sols = e.all_satisfying(&f).unwrap();
        assert_eq!(sols.len(), 6 << 21);
        assert!(e.exhaustive_scan(&Formula::empty(33, 3).unwrap()).is_err());
        assert!(e.all_satisfying(&Formula::empty(65, 3).unwrap()).is_err());
    }
}
