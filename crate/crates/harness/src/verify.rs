//! Exact tiny-universe verification of the transfer identity and `T <= W`.
//!
//! Every ordered formula of `m` clauses (with repetition) over the full clause
//! universe is enumerated once for the uniform side, and every pair of a planted
//! assignment and a consistent ordered formula is enumerated for the planted
//! side. The two sides share nothing but the clause solution masks, so agreement
//! between them is a genuine check. All arithmetic is over arbitrary-precision
//! rationals.
//!
//! `u_d` counts unordered pairs of solutions at distance `d`, with `u_0` counting
//! each solution as half a pair. Under that convention `E[u_d] = T E[f_d] / 2`
//! holds for every `d` including zero.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use satdiam::cnf::binomial_u128;
use satdiam::{Assignment, Clause};

use crate::error::{HarnessError, Result};

/// Largest number of ordered formulas enumerated.
pub const FEASIBILITY_BOUND: u128 = 10_000_000;
/// Solution sets are held in a `u128`, one bit per assignment.
pub const MAX_VARS: usize = 7;

/// Statistics of one formula model (ordered or multiset).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelStats {
    pub formulas: u64,
    pub satisfiable_formulas: u64,
    #[serde(with = "rational")]
    pub t: BigRational,
    #[serde(with = "rational")]
    pub w: BigRational,
    #[serde(with = "rational_vec")]
    pub u_expected: Vec<BigRational>,
    #[serde(with = "rational_vec")]
    pub f_expected: Vec<BigRational>,
    /// Solution count `i` to number of formulas `t_i` with exactly `i` solutions.
    pub t_histogram: BTreeMap<u64, u64>,
    pub identity_holds: bool,
    pub t_le_w: bool,
    pub histogram_agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TinyUniverseReport {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub universe_size: u64,
    /// Formulas as ordered sequences of clauses.
    pub ordered: ModelStats,
    /// The same checks with formulas taken as multisets of clauses.
    pub multiset: ModelStats,
}

impl TinyUniverseReport {
    pub fn t(&self) -> &BigRational {
        &self.ordered.t
    }

    pub fn w(&self) -> &BigRational {
        &self.ordered.w
    }

    pub fn identity_holds(&self) -> bool {
        self.ordered.identity_holds
    }

    /// Every check in both models.
    pub fn passed(&self) -> bool {
        [&self.ordered, &self.multiset]
            .iter()
            .all(|s| s.identity_holds && s.t_le_w && s.histogram_agrees)
    }
}

/// Calls `visit` on every length-`m` sequence over `0..len`, non-decreasing
/// ones only when `multiset` is set.
fn for_each_sequence(len: usize, m: usize, multiset: bool, mut visit: impl FnMut(&[usize])) {
    let mut seq = vec![0usize; m];
    if m == 0 {
        visit(&seq);
        return;
    }
    if len == 0 {
        return;
    }
    loop {
        visit(&seq);
        let mut pos = m;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if seq[pos] + 1 < len {
                seq[pos] += 1;
                let base = if multiset { seq[pos] } else { 0 };
                for s in &mut seq[pos + 1..] {
                    *s = base;
                }
                break;
            }
        }
    }
}

fn sequence_count(len: u128, m: usize, multiset: bool) -> Option<u128> {
    if multiset {
        // C(len + m - 1, m)
        if len == 0 {
            return Some(u128::from(m == 0));
        }
        binomial_u128((len + m as u128 - 1) as u64, m as u64)
    } else {
        len.checked_pow(m as u32)
    }
}

/// Solution mask of every clause in universe order.
pub fn clause_masks(n: usize, k: usize) -> Result<Vec<u128>> {
    if n > MAX_VARS {
        return Err(HarnessError::UniverseTooLarge(format!("n={n} exceeds {MAX_VARS}")));
    }
    let size = binomial_u128(n as u64, k as u64)
        .and_then(|c| c.checked_mul(1u128 << k.min(127)))
        .ok_or_else(|| HarnessError::UniverseTooLarge(format!("k={k}")))?;
    let assignments: Vec<Assignment> = (0..1u64 << n)
        .map(|v| Assignment::from_u64(n, v))
        .collect::<satdiam::Result<_>>()?;
    (0..size)
        .map(|idx| {
            let c = Clause::from_universe_index(idx, n, k)?;
            Ok(assignments
                .iter()
                .enumerate()
                .filter(|(_, a)| c.is_satisfied_by(a))
                .fold(0u128, |acc, (i, _)| acc | 1u128 << i))
        })
        .collect()
}

fn full_mask(n: usize) -> u128 {
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << (1usize << n)) - 1
    }
}

fn mask_of(seq: &[usize], masks: &[u128], full: u128) -> u128 {
    seq.iter().fold(full, |acc, &i| acc & masks[i])
}

/// Ordered pairs `(a, b)` of solutions at each distance.
fn ordered_pair_counts(sol: u128, n: usize, out: &mut [u128]) {
    let mut a_bits = sol;
    while a_bits != 0 {
        let a = a_bits.trailing_zeros();
        a_bits &= a_bits - 1;
        let mut b_bits = sol;
        while b_bits != 0 {
            let b = b_bits.trailing_zeros();
            b_bits &= b_bits - 1;
            out[(a ^ b).count_ones() as usize] += 1;
        }
    }
    debug_assert!(out.len() == n + 1);
}

fn ratio(num: u128, den: u128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn model_stats(n: usize, m: usize, masks: &[u128], multiset: bool) -> ModelStats {
    let full = full_mask(n);
    let points = 1usize << n;

    // uniform side: group formulas by their solution set
    let mut by_mask: HashMap<u128, u128> = HashMap::new();
    let mut formulas = 0u128;
    for_each_sequence(masks.len(), m, multiset, |seq| {
        formulas += 1;
        *by_mask.entry(mask_of(seq, masks, full)).or_default() += 1;
    });
    let mut t_histogram: BTreeMap<u64, u64> = BTreeMap::new();
    let mut sat = 0u128;
    let mut sol_total = 0u128;
    let mut pair_totals = vec![0u128; n + 1];
    for (&sol, &count) in &by_mask {
        let s = u128::from(sol.count_ones());
        *t_histogram.entry(s as u64).or_default() += count as u64;
        if s == 0 {
            continue;
        }
        sat += count;
        sol_total += s * count;
        let mut pc = vec![0u128; n + 1];
        ordered_pair_counts(sol, n, &mut pc);
        for (t, p) in pair_totals.iter_mut().zip(pc) {
            *t += p * count;
        }
    }
    let t = ratio(sol_total, sat.max(1));
    let u_expected: Vec<BigRational> = pair_totals.iter().map(|&p| ratio(p, 2 * sat.max(1))).collect();

    // planted side: every assignment with every consistent formula
    let mut planted_pairs = 0u128;
    let mut planted_solutions = 0u128;
    let mut f_totals = vec![0u128; n + 1];
    for phi in 0..points {
        let consistent: Vec<u128> = masks.iter().copied().filter(|mk| mk >> phi & 1 == 1).collect();
        let mut by_sol: HashMap<u128, u128> = HashMap::new();
        for_each_sequence(consistent.len(), m, multiset, |seq| {
            *by_sol.entry(mask_of(seq, &consistent, full)).or_default() += 1;
        });
        for (&sol, &count) in &by_sol {
            planted_pairs += count;
            planted_solutions += u128::from(sol.count_ones()) * count;
            let mut bits = sol;
            while bits != 0 {
                let psi = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                f_totals[(psi ^ phi).count_ones() as usize] += count;
            }
        }
    }
    let w = ratio(planted_solutions, planted_pairs.max(1));
    let f_expected: Vec<BigRational> = f_totals.iter().map(|&c| ratio(c, planted_pairs.max(1))).collect();

    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let identity_holds = sat > 0
        && u_expected
            .iter()
            .zip(&f_expected)
            .all(|(u, f)| *u == &t * f * &half);

    let (mut s0, mut s1, mut s2) = (BigInt::zero(), BigInt::zero(), BigInt::zero());
    for (&i, &ti) in &t_histogram {
        if i == 0 {
            continue;
        }
        let (i, ti) = (BigInt::from(i), BigInt::from(ti));
        s0 += &ti;
        s1 += &i * &ti;
        s2 += &i * &i * &ti;
    }
    let histogram_agrees = !s0.is_zero()
        && BigRational::new(s1.clone(), s0) == t
        && BigRational::new(s2, s1) == w;

    ModelStats {
        formulas: formulas as u64,
        satisfiable_formulas: sat as u64,
        t_le_w: t <= w,
        t,
        w,
        u_expected,
        f_expected,
        t_histogram,
        identity_holds,
        histogram_agrees,
    }
}

fn check_feasible(n: usize, k: usize, m: usize) -> Result<u128> {
    if k == 0 || k > n {
        return Err(satdiam::Error::WidthExceedsVariables { k, n }.into());
    }
    if n > MAX_VARS {
        return Err(HarnessError::UniverseTooLarge(format!("n={n} exceeds {MAX_VARS}")));
    }
    let size = binomial_u128(n as u64, k as u64).unwrap() << k;
    match sequence_count(size, m, false) {
        Some(c) if c <= FEASIBILITY_BOUND => Ok(size),
        _ => Err(HarnessError::UniverseTooLarge(format!(
            "{size}^{m} ordered formulas exceed {FEASIBILITY_BOUND}"
        ))),
    }
}

pub fn verify_identity(n: usize, k: usize, m: usize) -> Result<TinyUniverseReport> {
    let universe_size = check_feasible(n, k, m)?;
    let masks = clause_masks(n, k)?;
    Ok(TinyUniverseReport {
        n,
        k,
        m,
        universe_size: universe_size as u64,
        ordered: model_stats(n, m, &masks, false),
        multiset: model_stats(n, m, &masks, true),
    })
}

/// Every satisfiable ordered formula as a sequence of clause universe indices,
/// in lexicographic order. The uniform-satisfiable law puts equal mass on each.
pub fn satisfiable_ordered_formulas(n: usize, k: usize, m: usize) -> Result<Vec<Vec<usize>>> {
    check_feasible(n, k, m)?;
    let masks = clause_masks(n, k)?;
    let full = full_mask(n);
    let mut out = Vec::new();
    for_each_sequence(masks.len(), m, false, |seq| {
        if mask_of(seq, &masks, full) != 0 {
            out.push(seq.to_vec());
        }
    });
    Ok(out)
}

/// Serde helpers writing rationals as `"p/q"` strings.
pub mod rational {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn to_string(r: &BigRational) -> String {
        format!("{}/{}", r.numer(), r.denom())
    }

    pub fn parse(s: &str) -> Result<BigRational, String> {
        let (p, q) = s.split_once('/').unwrap_or((s, "1"));
        let p = p.trim().parse().map_err(|e| format!("numerator of {s:?}: {e}"))?;
        let q: num_bigint::BigInt = q.trim().parse().map_err(|e| format!("denominator of {s:?}: {e}"))?;
        if q == 0.into() {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(BigRational::new(p, q))
    }

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        parse(&String::deserialize(d)?).map_err(D::Error::custom)
    }
}

mod rational_vec {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(super::rational::to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| super::rational::parse(s).map_err(D::Error::custom))
            .collect()
    }
}
