//! First-moment calculus for planted k-CNF formulas.
//!
//! All rates are in nats per variable. With `c = m/n = (1 + eps) 2^k ln 2` the
//! asymptotic growth rate of the expected number of solutions at relative distance
//! `x` from the planted assignment is
//!
//! ```text
//! f*(x) = H(x) ln 2 + c ln(1 - (1 - (1 - x)^k) / (2^k - 1))
//! ```
//!
//! and the per-variable log decay bounding the chance that such a solution is
//! maximal is `ln a(x) = ln(1 - (1 - x) exp(-k c / (2^k - 2)))`.
//!
//! Certificates are floating point grid checks with reported margins.

use crate::num::{binomial_ratio, ln_binomial, Real};
use crate::{Error, Result};

/// Default bisection tolerance on `eps`.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default number of grid points for suprema over `x`.
pub const DEFAULT_GRID: usize = 10_000;
/// Window over which the threshold offsets are defined.
pub const THRESHOLD_WINDOW: (f64, f64) = (0.3, 0.6);
/// Intervals on which solutions must be absent under the negligibility assumption.
pub const ASSUMPTION_INTERVALS: [(f64, f64); 2] = [(0.2, 0.3), (0.6, 1.0)];

fn two_pow<T: Real>(k: usize) -> T {
    T::lit(2.0).powi(k as i32)
}

/// Density offset and clause density, kept in sync through `c = (1 + eps) 2^k ln 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelPoint<T> {
    k: usize,
    eps: T,
    c: T,
}

impl<T: Real> ModelPoint<T> {
    pub fn from_eps(k: usize, eps: T) -> Result<Self> {
        let c = (T::one() + eps) * Self::first_moment_density(k);
        Self::checked(k, eps, c)
    }

    pub fn from_density(k: usize, c: T) -> Result<Self> {
        let eps = c / Self::first_moment_density(k) - T::one();
        Self::checked(k, eps, c)
    }

    fn checked(k: usize, eps: T, c: T) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("clause width must be positive".into()));
        }
        if !(c > T::zero()) || !c.is_finite() {
            return Err(Error::Domain(format!("density {c} must be positive and finite")));
        }
        Ok(Self { k, eps, c })
    }

    /// `2^k ln 2`.
    pub fn first_moment_density(k: usize) -> T {
        two_pow::<T>(k) * T::LN_2()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn c(&self) -> T {
        self.c
    }
}

/// Binary entropy in bits, with `0 log 0 = 0`.
pub fn binary_entropy<T: Real>(x: T) -> Result<T> {
    check_unit(x)?;
    Ok(entropy_nats(x) / T::LN_2())
}

fn check_unit<T: Real>(x: T) -> Result<()> {
    if !(x >= T::zero() && x <= T::one()) {
        return Err(Error::Domain(format!("{x} is outside [0, 1]")));
    }
    Ok(())
}

fn xlnx<T: Real>(x: T) -> T {
    if x == T::zero() {
        T::zero()
    } else {
        x * x.ln()
    }
}

fn entropy_nats<T: Real>(x: T) -> T {
    let one_minus = T::one() - x;
    let tail = if one_minus == T::zero() { T::zero() } else { one_minus * (-x).ln_1p() };
    -tail - xlnx(x)
}

/// `1 - (1 - x)^k`, accurate for small `x`.
fn hit_probability<T: Real>(x: T, k: usize) -> T {
    -(T::from_usize_lossy(k) * (-x).ln_1p()).exp_m1()
}

/// Unchecked `f*(x)`.
fn rate<T: Real>(x: T, model: &ModelPoint<T>) -> T {
    let denom = two_pow::<T>(model.k) - T::one();
    entropy_nats(x) + model.c * (-hit_probability(x, model.k) / denom).ln_1p()
}

fn log_a<T: Real>(x: T, model: &ModelPoint<T>) -> T {
    let k = T::from_usize_lossy(model.k);
    let kill = (-(k * model.c) / (two_pow::<T>(model.k) - T::lit(2.0))).exp();
    (-(T::one() - x) * kill).ln_1p()
}

/// Asymptotic growth rate `f*(x)` of the expected number of solutions at relative
/// distance `x` from the planted assignment. Both endpoints are closed-form limits.
pub fn f_star_rate<T: Real>(x: T, model: &ModelPoint<T>) -> Result<T> {
    check_unit(x)?;
    Ok(rate(x, model))
}

/// `ln E[f_d]` for the planted model with clauses drawn with repetition: exact at
/// finite `n`, computed in log space.
pub fn expected_f_log<T: Real>(d: usize, n: usize, k: usize, m: usize) -> Result<T> {
    if k == 0 || k > n {
        return Err(Error::WidthExceedsVariables { k, n });
    }
    if d > n {
        return Err(Error::Domain(format!("distance {d} exceeds n={n}")));
    }
    let (n64, k64) = (n as u64, k as u64);
    // q = C(n-d, k) / C(n, k): a consistent clause avoids every disagreeing variable
    let q: T = binomial_ratio(n64 - d as u64, n64, k64);
    let patterns = two_pow::<T>(k);
    let per_clause = if q == T::one() {
        T::zero()
    } else {
        (-(T::one() - q) / (patterns - T::one())).ln_1p()
    };
    let clause_term = if m == 0 { T::zero() } else { T::from_usize_lossy(m) * per_clause };
    Ok(ln_binomial::<T>(n64, d as u64) + clause_term)
}

/// `ln a(x)`, the per-variable log bound on the probability that a solution at
/// distance `x` is maximal. Requires `k >= 2`.
pub fn decay_factor_log_a<T: Real>(x: T, model: &ModelPoint<T>) -> Result<T> {
    check_unit(x)?;
    if model.k < 2 {
        return Err(Error::Domain("decay factor needs k >= 2".into()));
    }
    Ok(log_a(x, model))
}

/// Rate bound for maximal solutions: `f*(x) + ln a(x)`.
pub fn f_max_rate<T: Real>(x: T, model: &ModelPoint<T>) -> Result<T> {
    Ok(f_star_rate(x, model)? + decay_factor_log_a(x, model)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateCurve<T> {
    pub model: ModelPoint<T>,
    pub points: Vec<(T, T)>,
}

impl<T: Real> RateCurve<T> {
    /// `f*` at `x = i / grid` for `i = 1..grid`.
    pub fn sample(model: ModelPoint<T>, grid: usize) -> Result<Self> {
        if grid < 2 {
            return Err(Error::Precondition("grid must have at least 2 cells".into()));
        }
        let g = T::from_usize_lossy(grid);
        let points = (1..grid)
            .map(|i| {
                let x = T::from_usize_lossy(i) / g;
                (x, rate(x, &model))
            })
            .collect();
        Ok(Self { model, points })
    }

    /// Largest sampled value with `lo <= x <= hi`.
    pub fn sup_on(&self, lo: T, hi: T) -> Option<(T, T)> {
        self.points
            .iter()
            .copied()
            .filter(|&(x, _)| x >= lo && x <= hi)
            .fold(None, |best, p| match best {
                Some((_, v)) if v >= p.1 => best,
                _ => Some(p),
            })
    }
}

/// Verdict of a grid check: `margin` is the smallest slack, positive means the
/// bound holds at every grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<T> {
    pub name: String,
    pub passed: bool,
    pub worst_x: T,
    pub margin: T,
    pub grid_size: usize,
    /// Auxiliary quantities reported alongside the verdict.
    pub extras: Vec<(String, T)>,
}

impl<T: Real> Certificate<T> {
    fn from_slacks(name: &str, slacks: impl IntoIterator<Item = (T, T)>) -> Self {
        let mut worst_x = T::nan();
        let mut margin = T::infinity();
        let mut grid_size = 0;
        for (x, s) in slacks {
            grid_size += 1;
            let s = if s.is_nan() { T::neg_infinity() } else { s };
            if s < margin || worst_x.is_nan() {
                margin = s;
                worst_x = x;
            }
        }
        Self { name: name.to_string(), passed: grid_size > 0 && margin > T::zero(), worst_x, margin, grid_size, extras: Vec::new() }
    }

    pub fn extra(&self, key: &str) -> Option<T> {
        self.extras.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }
}

fn linspace<T: Real>(lo: T, hi: T, count: usize) -> impl Iterator<Item = T> {
    let steps = T::from_usize_lossy(count.max(2) - 1);
    (0..count).map(move |i| {
        if i + 1 == count {
            hi
        } else {
            lo + (hi - lo) * T::from_usize_lossy(i) / steps
        }
    })
}

/// `f*(x) <= -50 k 2^-k` on `[1/k, 1]`: grid over `[1/k, 1 - 1/grid]` plus `x = 1`.
pub fn certify_prop32<T: Real>(k: usize, eps: T, grid: usize) -> Result<Certificate<T>> {
    if k < 2 || grid < 2 {
        return Err(Error::Precondition(format!("need k >= 2 and grid >= 2, got k={k}, grid={grid}")));
    }
    let model = ModelPoint::from_eps(k, eps)?;
    let kt = T::from_usize_lossy(k);
    let bound = -T::lit(50.0) * kt / two_pow::<T>(k);
    let lo = T::one() / kt;
    let hi = T::one() - T::one() / T::from_usize_lossy(grid);
    let xs = linspace(lo, hi, grid).chain(std::iter::once(T::one()));
    let mut cert = Certificate::from_slacks("prop32", xs.map(|x| (x, bound - rate(x, &model))));
    cert.extras.push(("bound".into(), bound));
    Ok(cert)
}

/// `count` logarithmically spaced values covering `[20, 2^k / k]`.
pub fn log_spaced_lambdas<T: Real>(k: usize, count: usize) -> Vec<T> {
    let lo = T::lit(20.0);
    let hi = two_pow::<T>(k) / T::from_usize_lossy(k);
    if count < 2 {
        return vec![lo];
    }
    linspace(lo.ln(), hi.ln(), count)
        .enumerate()
        .map(|(i, l)| if i == 0 { lo } else if i + 1 == count { hi } else { l.exp() })
        .collect()
}

/// `f*(lambda 2^-k) <= -lambda 2^-k` for each `lambda` in `[20, 2^k / k]`.
pub fn certify_prop33<T: Real>(k: usize, eps: T, lambdas: &[T]) -> Result<Certificate<T>> {
    if k < 20 {
        return Err(Error::Regime(format!("k={k} is below 20")));
    }
    if eps < T::zero() {
        return Err(Error::Regime(format!("eps={eps} is negative")));
    }
    let scale = two_pow::<T>(k);
    let lo = T::lit(20.0);
    let hi = scale / T::from_usize_lossy(k);
    let slop = T::lit(1e-12);
    if let Some(&bad) = lambdas.iter().find(|&&l| !(l >= lo * (T::one() - slop) && l <= hi * (T::one() + slop))) {
        return Err(Error::Precondition(format!("lambda {bad} outside [20, 2^k/k]")));
    }
    if lambdas.is_empty() {
        return Err(Error::Precondition("empty lambda grid".into()));
    }
    let model = ModelPoint::from_eps(k, eps)?;
    Ok(Certificate::from_slacks(
        "prop33",
        lambdas.iter().map(|&l| {
            let x = l / scale;
            (x, -x - rate(x, &model))
        }),
    ))
}

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`.
fn golden_max<T: Real>(f: impl Fn(T) -> T, mut a: T, mut b: T) -> (T, T) {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if !(b - a > T::epsilon() * (a.abs() + b.abs())) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 { (x1, f1) } else { (x2, f2) }
}

/// Supremum of `f` over a sorted grid, refined by golden section between the
/// neighbours of the best grid point.
fn refined_sup<T: Real>(f: impl Fn(T) -> T, grid: &[T]) -> (T, T) {
    let mut best = 0;
    let mut best_v = T::neg_infinity();
    for (i, &x) in grid.iter().enumerate() {
        let v = f(x);
        if v > best_v {
            best = i;
            best_v = v;
        }
    }
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(grid.len() - 1)];
    let (x, v) = if a < b { golden_max(&f, a, b) } else { (grid[best], best_v) };
    if v > best_v { (x, v) } else { (grid[best], best_v) }
}

fn sup_on<T: Real>(f: impl Fn(T) -> T, lo: T, hi: T, grid: usize) -> (T, T) {
    let xs: Vec<T> = linspace(lo, hi, grid.max(3)).collect();
    refined_sup(f, &xs)
}

/// Sup of `f*` over `[lo, hi]` with its maximiser.
pub fn sup_f_star<T: Real>(model: &ModelPoint<T>, lo: T, hi: T, grid: usize) -> (T, T) {
    sup_on(|x| rate(x, model), lo, hi, grid)
}

/// Sup of `f* + ln a` over `[lo, hi]` with its maximiser.
pub fn sup_f_max<T: Real>(model: &ModelPoint<T>, lo: T, hi: T, grid: usize) -> (T, T) {
    sup_on(|x| rate(x, model) + log_a(x, model), lo, hi, grid)
}

/// Growth rate of the expected planted solution count, with the constant bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WRate<T> {
    /// `sup_x max(f*(x), 0)`.
    pub numeric_rate: T,
    /// Maximiser of `f*`, or zero when the supremum is the `x -> 0` limit.
    pub maximizer: T,
    /// `40 k 2^-k`.
    pub paper_bound: T,
}

/// Numeric rate of `W = sum_x E[f_x]` by grid maximisation. The positive part of
/// `f*` can live at `x ~ 2^-k(1+eps)`, so a log-spaced grid down to far below that
/// scale complements the uniform grid.
pub fn w_rate<T: Real>(model: &ModelPoint<T>, grid: usize) -> Result<WRate<T>> {
    if grid < 2 {
        return Err(Error::Precondition("grid must have at least 2 cells".into()));
    }
    let k = model.k;
    let floor_exp = (T::min_positive_value().log2().to_f64().unwrap_or(-126.0) + 16.0) as i64;
    let low_exp = (-(3 * k as i64) - 16).max(floor_exp);
    let lo = T::lit(2.0).powi(low_exp as i32).ln();
    let g = T::from_usize_lossy(grid);
    let mut xs: Vec<T> = linspace(lo, T::lit(0.5).ln(), grid).map(|l| l.exp()).collect();
    xs.extend((1..grid).map(|i| T::from_usize_lossy(i) / g));
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    xs.dedup();
    let (x, v) = refined_sup(|x| rate(x, model), &xs);
    let (numeric_rate, maximizer) = if v > T::zero() { (v, x) } else { (T::zero(), T::zero()) };
    let kt = T::from_usize_lossy(k);
    Ok(WRate { numeric_rate, maximizer, paper_bound: T::lit(40.0) * kt / two_pow::<T>(k) })
}

/// Every link of the union-bound argument for the diameter bound.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremCertificate<T> {
    pub k: usize,
    pub eps: T,
    /// Whether `eps >= 0.99^k`.
    pub in_regime: bool,
    pub prop32: Certificate<T>,
    /// The Prop33 check at the single radius `lambda = 50 k`, i.e. `x_1 = 50 k 2^-k`.
    pub prop33_at_radius: Certificate<T>,
    pub prop33_range: Certificate<T>,
    pub w: WRate<T>,
    /// `40 k 2^-k`.
    pub w_exponent: T,
    /// `-50 k 2^-k`.
    pub f_exponent: T,
    /// `w_exponent + f_exponent`.
    pub combined_exponent: T,
    /// `-10 k 2^-k`.
    pub target_exponent: T,
    pub combined_ok: bool,
    pub passed: bool,
}

impl<T: Real> TheoremCertificate<T> {
    pub fn certificates(&self) -> [&Certificate<T>; 3] {
        [&self.prop32, &self.prop33_at_radius, &self.prop33_range]
    }
}

pub fn certify_theorem<T: Real>(k: usize, eps: T) -> Result<TheoremCertificate<T>> {
    if k < 20 {
        return Err(Error::Regime(format!("k={k} is below 20")));
    }
    let model = ModelPoint::from_eps(k, eps)?;
    let kt = T::from_usize_lossy(k);
    let scale = two_pow::<T>(k);
    let regime_eps = T::lit(0.99).powi(k as i32);
    let in_regime = eps >= regime_eps * (T::one() - T::epsilon());

    let prop32 = certify_prop32(k, eps, DEFAULT_GRID)?;
    let (prop33_at_radius, prop33_range) = if eps >= T::zero() {
        (
            certify_prop33(k, eps, &[T::lit(50.0) * kt])?,
            certify_prop33(k, eps, &log_spaced_lambdas(k, 1000))?,
        )
    } else {
        let failed = |name: &str| Certificate {
            name: name.into(),
            passed: false,
            worst_x: T::nan(),
            margin: T::neg_infinity(),
            grid_size: 0,
            extras: Vec::new(),
        };
        (failed("prop33"), failed("prop33"))
    };
    let w = w_rate(&model, DEFAULT_GRID)?;
    let w_exponent = T::lit(40.0) * kt / scale;
    let f_exponent = -T::lit(50.0) * kt / scale;
    let combined_exponent = w_exponent + f_exponent;
    let target_exponent = -T::lit(10.0) * kt / scale;
    let combined_ok = combined_exponent <= target_exponent && w.numeric_rate <= w_exponent;
    let passed = prop32.passed && prop33_at_radius.passed && prop33_range.passed && combined_ok;
    Ok(TheoremCertificate {
        k,
        eps,
        in_regime,
        prop32,
        prop33_at_radius,
        prop33_range,
        w,
        w_exponent,
        f_exponent,
        combined_exponent,
        target_exponent,
        combined_ok,
        passed,
    })
}

/// Pairs at relative distance `y >= y_min` are exponentially rare when
/// `w_rate + f*(y) < 0` on `[y_min, 1)`.
pub fn diameter_exponent_certificate<T: Real>(model: &ModelPoint<T>, y_min: T, grid: usize) -> Result<Certificate<T>> {
    if !(y_min > T::zero() && y_min < T::one()) {
        return Err(Error::Domain(format!("y_min {y_min} must lie in (0, 1)")));
    }
    if grid < 2 {
        return Err(Error::Precondition("grid must have at least 2 cells".into()));
    }
    let w = w_rate(model, grid)?;
    let step = (T::one() - y_min) / T::from_usize_lossy(grid);
    let ys = (0..grid).map(|i| y_min + step * T::from_usize_lossy(i));
    let mut cert = Certificate::from_slacks("diameter", ys.map(|y| (y, -(w.numeric_rate + rate(y, model)))));
    cert.extras.push(("w_rate".into(), w.numeric_rate));
    cert.extras.push(("w_maximizer".into(), w.maximizer));
    cert.extras.push(("f_star_at_y_min".into(), rate(y_min, model)));
    Ok(cert)
}

fn eps_bracket<T: Real>() -> (T, T) {
    (T::lit(-0.9), T::lit(1.0))
}

/// Root of a function that is positive at `lo` and negative at `hi`. When the
/// function is not observed to be monotone on a coarse sample, the first sign
/// change of a fine scan seeds the bisection instead.
fn decreasing_root<T: Real>(g: impl Fn(T) -> T, lo: T, hi: T, tol: T, name: &str) -> Result<T> {
    let (glo, ghi) = (g(lo), g(hi));
    if !(glo > T::zero() && ghi < T::zero()) {
        return Err(Error::Bracket(format!("{name}: g({lo}) = {glo}, g({hi}) = {ghi}")));
    }
    let coarse: Vec<T> = linspace(lo, hi, 65).map(&g).collect();
    let monotone = coarse.windows(2).all(|w| w[1] <= w[0]);
    let (mut a, mut b) = (lo, hi);
    if !monotone {
        let xs: Vec<T> = linspace(lo, hi, DEFAULT_GRID).collect();
        let cell = xs
            .windows(2)
            .find(|w| g(w[1]) < T::zero())
            .ok_or_else(|| Error::Bracket(format!("{name}: no sign change found")))?;
        a = cell[0];
        b = cell[1];
    }
    while b - a > tol {
        let mid = (a + b) / T::lit(2.0);
        if mid <= a || mid >= b {
            break;
        }
        if g(mid) > T::zero() {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((a + b) / T::lit(2.0))
}

fn check_threshold_args<T: Real>(k: usize, tol: T) -> Result<()> {
    if k < 3 {
        return Err(Error::Precondition(format!("k={k} is below 3")));
    }
    if !(tol > T::zero()) {
        return Err(Error::Precondition(format!("tolerance {tol} must be positive")));
    }
    Ok(())
}

fn window<T: Real>() -> (T, T) {
    (T::lit(THRESHOLD_WINDOW.0), T::lit(THRESHOLD_WINDOW.1))
}

/// `sup_{x in [0.3, 0.6]} f*(x)` at offset `eps`.
pub fn window_sup_f_star<T: Real>(k: usize, eps: T) -> Result<T> {
    let (lo, hi) = window();
    Ok(sup_f_star(&ModelPoint::from_eps(k, eps)?, lo, hi, DEFAULT_GRID).1)
}

/// `sup_{x in [0.3, 0.6]} (f*(x) + ln a(x))` at offset `eps`.
pub fn window_sup_f_max<T: Real>(k: usize, eps: T) -> Result<T> {
    let (lo, hi) = window();
    Ok(sup_f_max(&ModelPoint::from_eps(k, eps)?, lo, hi, DEFAULT_GRID).1)
}

/// Largest offset at which `f*` reaches zero somewhere in the window.
pub fn find_eps1<T: Real>(k: usize, tol: T) -> Result<T> {
    check_threshold_args(k, tol)?;
    let (lo, hi) = eps_bracket();
    decreasing_root(|e| window_sup_f_star(k, e).unwrap_or(T::nan()), lo, hi, tol, "eps1")
}

/// Smallest offset beyond which `f* + ln a` is negative across the window.
pub fn find_eps2<T: Real>(k: usize, tol: T) -> Result<T> {
    check_threshold_args(k, tol)?;
    let (lo, hi) = eps_bracket();
    decreasing_root(|e| window_sup_f_max(k, e).unwrap_or(T::nan()), lo, hi, tol, "eps2")
}

/// `f* < 0` on `[0.2, 0.3]` and `[0.6, 1.0]`.
pub fn check_assumption_neg<T: Real>(k: usize, eps: T, grid: usize) -> Result<Certificate<T>> {
    if grid < 2 {
        return Err(Error::Precondition("grid must have at least 2 points".into()));
    }
    let model = ModelPoint::from_eps(k, eps)?;
    let xs = ASSUMPTION_INTERVALS
        .iter()
        .flat_map(|&(a, b)| linspace(T::lit(a), T::lit(b), grid));
    Ok(Certificate::from_slacks("assumption", xs.map(|x| (x, -rate(x, &model)))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn m6(eps: f64) -> ModelPoint<f64> {
        ModelPoint::from_eps(6, eps).unwrap()
    }

    const E6: f64 = 1.0 / 64.0;

    #[test]
    fn entropy_values() {
        close(binary_entropy(0.5).unwrap(), 1.0, 1e-15);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        close(binary_entropy(0.25).unwrap(), 2.0 - 0.75 * 3f64.log2(), 1e-15);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn model_point_round_trip() {
        for k in [3usize, 6, 20, 40] {
            for eps in [-0.5f64, -0.01, 0.0, 0.3, 1.7] {
                let m = ModelPoint::from_eps(k, eps).unwrap();
                let back = ModelPoint::from_density(k, m.c()).unwrap();
                assert!((back.eps() - eps).abs() <= 1e-12 * eps.abs().max(1.0));
            }
        }
        assert!(ModelPoint::from_eps(3, -1.0f64).is_err());
        assert!(ModelPoint::<f64>::from_density(3, 0.0).is_err());
    }

    // Oracle values from a 40-digit evaluation of the closed form.
    #[test]
    fn f_star_values() {
        close(f_star_rate(0.5, &m6(-E6)).unwrap(), 0.005_443_639_012_159_619, 1e-12);
        close(f_star_rate(0.5, &m6(E6)).unwrap(), -0.016_388_219_449_674_85, 1e-12);
        close(f_star_rate(1.0, &m6(0.0)).unwrap(), -0.709_797_855_506_073, 1e-12);
        assert_eq!(f_star_rate(0.0, &m6(0.0)).unwrap(), 0.0);
        assert!(f_star_rate(-0.1, &m6(0.0)).is_err());
    }

    #[test]
    fn decay_and_max_rate() {
        let m = m6(-E6);
        close(decay_factor_log_a(0.5, &m).unwrap(), -0.007_332_453_956_148_757, 1e-12);
        close(f_max_rate(0.5, &m).unwrap(), 0.005_443_639_012_159_619 - 0.007_332_453_956_148_757, 1e-12);
        assert_eq!(decay_factor_log_a(1.0, &m).unwrap(), 0.0);
        assert_eq!(f_max_rate(1.0, &m).unwrap(), f_star_rate(1.0, &m).unwrap());
        let xs: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
        for w in xs.windows(2) {
            assert!(decay_factor_log_a(w[1], &m).unwrap() > decay_factor_log_a(w[0], &m).unwrap());
            assert!(f_max_rate(w[1], &m).unwrap() <= f_star_rate(w[1], &m).unwrap());
        }
        assert!(decay_factor_log_a(0.5, &ModelPoint::from_eps(1, 0.0).unwrap()).is_err());
    }

    #[test]
    fn expected_f_log_examples() {
        assert_eq!(expected_f_log::<f64>(0, 50, 3, 200).unwrap(), 0.0);
        close(expected_f_log(4, 4, 3, 2).unwrap(), (36.0f64 / 49.0).ln(), 1e-14);
        close(expected_f_log(1, 4, 3, 1).unwrap(), (25.0f64 / 7.0).ln(), 1e-14);
        assert!(expected_f_log::<f64>(5, 4, 3, 1).is_err());
        assert!(expected_f_log::<f64>(1, 2, 3, 1).is_err());
    }

    #[test]
    fn expected_f_log_decreasing_in_m() {
        for d in 1..=30 {
            let vals: Vec<f64> = (0..50).map(|m| expected_f_log(d, 30, 3, m).unwrap()).collect();
            assert!(vals.windows(2).all(|w| w[1] < w[0]), "d={d}");
        }
    }

    #[test]
    fn f_star_decreasing_in_density() {
        for &x in &[0.01, 0.2, 0.5, 0.9, 1.0] {
            let vals: Vec<f64> = (0..40)
                .map(|i| f_star_rate(x, &ModelPoint::from_density(4, 5.0 + i as f64 * 0.5).unwrap()).unwrap())
                .collect();
            assert!(vals.windows(2).all(|w| w[1] < w[0]), "x={x}");
        }
    }

    #[test]
    fn finite_n_converges_to_rate() {
        for &(x, k, c) in &[(0.3, 3, 4.0), (0.5, 4, 9.0), (0.1, 5, 20.0), (0.7, 3, 2.5)] {
            let model = ModelPoint::from_density(k, c).unwrap();
            for n in [1000usize, 10_000] {
                let d = (x * n as f64).floor() as usize;
                let m = (c * n as f64).floor() as usize;
                let finite = expected_f_log::<f64>(d, n, k, m).unwrap() / n as f64;
                let asym = f_star_rate(x, &model).unwrap();
                assert!((finite - asym).abs() <= 2.0 * (n as f64).ln() / n as f64, "x={x} n={n}");
            }
        }
    }

    #[test]
    fn prop32_certificates() {
        for k in [20usize, 25] {
            let c = certify_prop32(k, 0.99f64.powi(k as i32), DEFAULT_GRID).unwrap();
            assert!(c.passed && c.margin > 0.0, "k={k}: {c:?}");
            assert_eq!(c.grid_size, DEFAULT_GRID + 1);
        }
        let fail = certify_prop32(20, 0.0f64, DEFAULT_GRID).unwrap();
        assert!(!fail.passed);
        close(f_star_rate(0.5, &ModelPoint::from_eps(20, 0.0).unwrap()).unwrap(), -3.305_185_419_327_59e-7, 1e-15);
    }

    #[test]
    fn prop33_certificates() {
        let lambdas = log_spaced_lambdas::<f64>(20, 1000);
        assert_eq!(lambdas[0], 20.0);
        assert_eq!(*lambdas.last().unwrap(), 2f64.powi(20) / 20.0);
        let c = certify_prop33(20, 0.0, &lambdas).unwrap();
        assert!(c.passed, "{c:?}");
        assert!(certify_prop33(20, 0.0, &[20.0]).unwrap().passed);
        assert!(certify_prop33(20, 0.0, &[2f64.powi(20) / 20.0]).unwrap().passed);
        assert!(matches!(certify_prop33(20, 0.0, &[1.0]), Err(Error::Precondition(_))));
        assert!(matches!(certify_prop33(10, 0.0, &[20.0]), Err(Error::Regime(_))));
    }

    #[test]
    fn w_rate_values() {
        let k3 = ModelPoint::from_density(3, 7.625).unwrap();
        let w = w_rate(&k3, DEFAULT_GRID).unwrap();
        close(w.numeric_rate, 0.041_684_243_840_010_28, 1e-9);
        close(w.maximizer, 0.046_047_789_360_650_14, 1e-5);

        let k20 = ModelPoint::from_eps(20, 0.99f64.powi(20)).unwrap();
        let w = w_rate(&k20, DEFAULT_GRID).unwrap();
        assert!(w.numeric_rate > 0.0 && w.numeric_rate < 1e-9, "{w:?}");
        close(w.paper_bound, 40.0 * 20.0 / 2f64.powi(20), 1e-18);
        assert!(w.numeric_rate <= w.paper_bound);
    }

    #[test]
    fn theorem_certificates() {
        let t = certify_theorem(20, 0.99f64.powi(20)).unwrap();
        assert!(t.passed && t.in_regime, "{t:?}");
        assert_eq!(t.combined_exponent, -10.0 * 20.0 / 2f64.powi(20));
        let low = certify_theorem(20, 0.0f64).unwrap();
        assert!(!low.passed && !low.prop32.passed && !low.in_regime);
        assert!(certify_theorem(30, 0.99f64.powi(30)).unwrap().passed);
        assert!(matches!(certify_theorem(19, 1.0f64), Err(Error::Regime(_))));
    }

    #[test]
    fn diameter_certificates() {
        let k3 = ModelPoint::from_density(3, 7.625).unwrap();
        let c = diameter_exponent_certificate(&k3, 0.2, DEFAULT_GRID).unwrap();
        assert!(c.passed);
        close(c.extra("f_star_at_y_min").unwrap(), -0.050_606_919_169_252_38, 1e-12);
        close(c.margin, 0.050_606_919_169_252_38 - 0.041_684_243_840_010_28, 1e-8);
        assert!(!diameter_exponent_certificate(&k3, 0.05, DEFAULT_GRID).unwrap().passed);

        let k20 = ModelPoint::from_eps(20, 0.99f64.powi(20)).unwrap();
        let y = 50.0 * 20.0 / 2f64.powi(20);
        assert!(diameter_exponent_certificate(&k20, y, DEFAULT_GRID).unwrap().passed);
    }

    #[test]
    fn threshold_offsets_k6() {
        let e1 = find_eps1(6, DEFAULT_TOL).unwrap();
        let e2 = find_eps2(6, DEFAULT_TOL).unwrap();
        close(e1, -0.002_615_853_646_105_393, 1e-7);
        close(e2, -0.014_318_499_293_366_93, 1e-7);
        assert!(e1 > -E6 && e1 < E6);
        assert!(e2 < e1);
        assert!(window_sup_f_star(6, e1).unwrap().abs() < 1e-8);
        assert!(window_sup_f_max(6, e2).unwrap().abs() < 1e-8);
        // the x = 1/2 slice alone crosses zero lower down
        let slice = std::f64::consts::LN_2 / (64.0 * std::f64::consts::LN_2 * -(63.0f64 / 64.0).ln()) - 1.0;
        assert!(slice < e1);
        assert!(find_eps1(2, 1e-9f64).is_err());
    }

    #[test]
    fn assumption_checks() {
        let e2 = -0.014_318_499_293_366_93;
        let c = check_assumption_neg(6, e2, DEFAULT_GRID).unwrap();
        assert!(c.passed);
        close(f_star_rate(0.2, &m6(e2)).unwrap(), -0.014_741_797_129_800_75, 1e-9);
        close(f_star_rate(0.25, &m6(e2)).unwrap(), -0.011_957_843_588_636_17, 1e-9);
        close(f_star_rate(0.6, &m6(e2)).unwrap(), -0.023_734_291_555_307_75, 1e-9);
        assert!(!check_assumption_neg(6, -0.05, DEFAULT_GRID).unwrap().passed);
        assert_eq!(c.grid_size, 2 * DEFAULT_GRID);
    }

    #[test]
    fn rate_curve_sup() {
        let curve = RateCurve::sample(m6(-E6), 512).unwrap();
        assert_eq!(curve.points.len(), 511);
        let (x, v) = curve.sup_on(0.3, 0.6).unwrap();
        assert!(v > 0.0 && (x - 0.444).abs() < 0.003, "{x} {v}");
    }

    #[test]
    fn single_precision_agrees() {
        let m32 = ModelPoint::<f32>::from_eps(6, -1.0 / 64.0).unwrap();
        let v32 = f_star_rate(0.5f32, &m32).unwrap();
        assert!((f64::from(v32) - 0.005_443_639).abs() < 2e-5);
        let e1 = find_eps1(6, 1e-6f32).unwrap();
        assert!((f64::from(e1) + 0.002_615_85).abs() < 5e-4);
        let c = certify_prop32(20, 0.99f32.powi(20), 1000).unwrap();
        assert!(c.passed);
    }
}
