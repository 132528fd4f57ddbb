//! CNF domain types, evaluation, Hamming geometry and clause-universe counting.
//!
//! Variables are 0-indexed. A clause is kept in canonical form with its literals
//! sorted by variable, which makes duplicate detection and universe indexing
//! well defined.
//!
//! # Clause universe indexing
//!
//! The universe of width-`k` clauses over `n` variables has `2^k * C(n, k)`
//! members. A clause with sorted variables `v_0 < ... < v_{k-1}` and polarity
//! pattern `p` (bit `j` set iff literal `j` is positive) has index
//! `colex(v) * 2^k + p`, where `colex(v) = sum_j C(v_j, j + 1)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::{Error, Result};

const WORD: usize = 64;

/// A total assignment to `n` Boolean variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    n: usize,
    words: Vec<u64>,
}

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Self { n, words: vec![0; n.div_ceil(WORD)] }
    }

    pub fn ones(n: usize) -> Self {
        Self::zeros(n).complement()
    }

    /// Builds an assignment from the low `n` bits of `value` (bit `i` is variable `i`).
    pub fn from_u64(n: usize, value: u64) -> Result<Self> {
        if n > WORD {
            return Err(Error::InvalidAssignment(format!("{n} variables do not fit in a u64")));
        }
        if n < WORD && value >> n != 0 {
            return Err(Error::InvalidAssignment(format!("value {value:#x} has bits above {n}")));
        }
        let mut a = Self::zeros(n);
        if n > 0 {
            a.words[0] = value;
        }
        Ok(a)
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut a = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            a.set(i, b);
        }
        a
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, var: usize) -> bool {
        assert!(var < self.n, "variable {var} out of range for n={}", self.n);
        (self.words[var / WORD] >> (var % WORD)) & 1 == 1
    }

    pub fn set(&mut self, var: usize, value: bool) {
        assert!(var < self.n, "variable {var} out of range for n={}", self.n);
        let mask = 1u64 << (var % WORD);
        if value {
            self.words[var / WORD] |= mask;
        } else {
            self.words[var / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, var: usize) {
        assert!(var < self.n, "variable {var} out of range for n={}", self.n);
        self.words[var / WORD] ^= 1u64 << (var % WORD);
    }

    pub fn flipped(&self, var: usize) -> Self {
        let mut a = self.clone();
        a.flip(var);
        a
    }

    pub fn complement(&self) -> Self {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        let tail = self.n % WORD;
        if tail != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        Self { n: self.n, words }
    }

    /// The assignment as an integer, when `n <= 64`.
    pub fn as_u64(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Character `i` is `'1'` iff variable `i` is true.
    pub fn to_bitstring(&self) -> String {
        (0..self.n).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }

    fn check_same_n(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }
}

impl FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidAssignment(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bools(&bits))
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Assignment({})", self.to_bitstring())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

/// Number of positions where `a` and `b` differ.
pub fn hamming(a: &Assignment, b: &Assignment) -> Result<usize> {
    a.check_same_n(b)?;
    Ok(a.words.iter().zip(&b.words).map(|(x, y)| (x ^ y).count_ones() as usize).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn new(var: usize, positive: bool) -> Self {
        Self { var, positive }
    }

    pub fn pos(var: usize) -> Self {
        Self::new(var, true)
    }

    pub fn neg(var: usize) -> Self {
        Self::new(var, false)
    }

    pub fn is_true_under(&self, a: &Assignment) -> bool {
        a.get(self.var) == self.positive
    }
}

/// A disjunction of literals over pairwise distinct variables, sorted by variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    lits: Vec<Literal>,
}

impl Clause {
    pub fn new(mut lits: Vec<Literal>) -> Result<Self> {
        if lits.is_empty() {
            return Err(Error::InvalidClause("empty clause".into()));
        }
        lits.sort_unstable_by_key(|l| l.var);
        if let Some(w) = lits.windows(2).find(|w| w[0].var == w[1].var) {
            return Err(Error::InvalidClause(format!("variable {} repeated", w[0].var)));
        }
        Ok(Self { lits })
    }

    /// Clause over sorted distinct `vars` with polarity bit `j` of `pattern` on literal `j`.
    pub fn from_parts(vars: &[usize], pattern: u64) -> Result<Self> {
        let lits = vars
            .iter()
            .enumerate()
            .map(|(j, &v)| Literal::new(v, (pattern >> j) & 1 == 1))
            .collect();
        Self::new(lits)
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    pub fn width(&self) -> usize {
        self.lits.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.lits.iter().map(|l| l.var)
    }

    pub fn max_var(&self) -> usize {
        self.lits.last().map_or(0, |l| l.var)
    }

    pub fn polarity_pattern(&self) -> u64 {
        self.lits
            .iter()
            .enumerate()
            .fold(0, |acc, (j, l)| acc | (u64::from(l.positive) << j))
    }

    pub fn is_satisfied_by(&self, a: &Assignment) -> bool {
        self.lits.iter().any(|l| l.is_true_under(a))
    }

    pub fn true_count(&self, a: &Assignment) -> usize {
        self.lits.iter().filter(|l| l.is_true_under(a)).count()
    }

    /// Position of this clause in the universe of width-`k` clauses over `n` variables.
    pub fn universe_index(&self, n: usize) -> Result<u128> {
        let k = self.width();
        if self.max_var() >= n {
            return Err(Error::InvalidClause(format!("variable {} out of range", self.max_var())));
        }
        let mut rank = 0u128;
        for (j, v) in self.vars().enumerate() {
            rank = rank
                .checked_add(binomial_u128(v as u64, j as u64 + 1).ok_or_else(overflow)?)
                .ok_or_else(overflow)?;
        }
        rank.checked_mul(1u128 << k)
            .and_then(|r| r.checked_add(u128::from(self.polarity_pattern())))
            .ok_or_else(overflow)
    }

    /// Inverse of [`Clause::universe_index`].
    pub fn from_universe_index(index: u128, n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n || k >= 64 {
            return Err(Error::WidthExceedsVariables { k, n });
        }
        let total = binomial_u128(n as u64, k as u64)
            .and_then(|c| c.checked_mul(1u128 << k))
            .ok_or_else(overflow)?;
        if index >= total {
            return Err(Error::InvalidClause(format!("index {index} outside universe of {total}")));
        }
        let pattern = (index & ((1u128 << k) - 1)) as u64;
        let mut rank = index >> k;
        let mut vars = vec![0usize; k];
        let mut upper = n;
        for j in (0..k).rev() {
            // largest v < upper with C(v, j+1) <= rank
            let mut v = upper - 1;
            loop {
                let c = binomial_u128(v as u64, j as u64 + 1).ok_or_else(overflow)?;
                if c <= rank {
                    rank -= c;
                    break;
                }
                v -= 1;
            }
            vars[j] = v;
            upper = v;
        }
        Self::from_parts(&vars, pattern)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (j, l) in self.lits.iter().enumerate() {
            if j > 0 {
                f.write_str(" ∨ ")?;
            }
            if !l.positive {
                f.write_str("¬")?;
            }
            write!(f, "x{}", l.var + 1)?;
        }
        f.write_str(")")
    }
}

fn overflow() -> Error {
    Error::Overflow("clause universe index exceeds u128".into())
}

/// An ordered multiset of width-`k` clauses over `n` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Formula {
    n: usize,
    k: usize,
    clauses: Vec<Clause>,
}

impl Formula {
    pub fn new(n: usize, k: usize, clauses: Vec<Clause>) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::WidthExceedsVariables { k, n });
        }
        for c in &clauses {
            if c.width() != k {
                return Err(Error::InvalidClause(format!("width {} in a {k}-CNF", c.width())));
            }
            if c.max_var() >= n {
                return Err(Error::InvalidClause(format!("variable {} out of range", c.max_var())));
            }
        }
        Ok(Self { n, k, clauses })
    }

    pub fn empty(n: usize, k: usize) -> Result<Self> {
        Self::new(n, k, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn density(&self) -> f64 {
        self.m() as f64 / self.n as f64
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn push(&mut self, clause: Clause) -> Result<()> {
        if clause.width() != self.k || clause.max_var() >= self.n {
            return Err(Error::InvalidClause(format!("{clause} does not fit a {}-CNF on {} variables", self.k, self.n)));
        }
        self.clauses.push(clause);
        Ok(())
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<bool> {
        if a.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: a.n() });
        }
        Ok(self.clauses.iter().all(|c| c.is_satisfied_by(a)))
    }
}

pub fn evaluate(formula: &Formula, a: &Assignment) -> Result<bool> {
    formula.evaluate(a)
}

/// A formula together with an assignment that satisfies it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedInstance {
    formula: Formula,
    planted: Assignment,
}

impl PlantedInstance {
    pub fn new(formula: Formula, planted: Assignment) -> Result<Self> {
        if !formula.evaluate(&planted)? {
            return Err(Error::PlantedNotSatisfying);
        }
        Ok(Self { formula, planted })
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn planted(&self) -> &Assignment {
        &self.planted
    }

    pub fn into_parts(self) -> (Formula, Assignment) {
        (self.formula, self.planted)
    }
}

/// Which slice of the clause universe to count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniverseMode {
    /// Every width-`k` clause.
    All,
    /// Clauses satisfied by one fixed assignment.
    ConsistentOne,
    /// Clauses satisfied by two fixed assignments at the given Hamming distance.
    ConsistentTwo(usize),
}

pub fn binomial_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for j in 0..k {
        // acc * (n - j) is divisible by (j + 1)
        acc = acc.checked_mul(u128::from(n - j))? / u128::from(j + 1);
    }
    Some(acc)
}

pub fn clause_universe_size(n: usize, k: usize, mode: UniverseMode) -> Result<BigUint> {
    if k == 0 || k > n {
        return Err(Error::WidthExceedsVariables { k, n });
    }
    let (n64, k64) = (n as u64, k as u64);
    let choose = binomial_big(n64, k64);
    let patterns = BigUint::one() << k;
    Ok(match mode {
        UniverseMode::All => patterns * choose,
        UniverseMode::ConsistentOne => (patterns - 1u32) * choose,
        UniverseMode::ConsistentTwo(d) => {
            if d > n {
                return Err(Error::Precondition(format!("distance {d} exceeds n={n}")));
            }
            // a clause falsified by exactly one of the two assignments must touch a
            // disagreeing variable; C(n-d, k) clauses avoid them and lose only one pattern
            (patterns - 2u32) * choose + binomial_big(n64 - d as u64, k64)
        }
    })
}
