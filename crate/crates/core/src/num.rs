//! Scalar abstraction for the analytic layer, plus log-space combinatorics.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar used by every rate function: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + FromStr + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for literal constants.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite constant")
    }

    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize is representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        let pi = T::PI();
        return (pi / (pi * x).sin()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::lit(LANCZOS_COEF[0]);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (x + T::from_usize_lossy(i));
    }
    let t = x + T::lit(LANCZOS_G) + half;
    half * (T::TAU()).ln() + (x + half) * t.ln() - t + acc.ln()
}

/// `ln C(n, k)`; exactly zero when `k == 0` or `k == n`, `-inf` when `k > n`.
pub fn ln_binomial<T: Real>(n: u64, k: u64) -> T {
    if k > n {
        return T::neg_infinity();
    }
    let k = k.min(n - k);
    if k == 0 {
        return T::zero();
    }
    if k <= 32 {
        // short products are more accurate than three log-gammas
        let mut acc = T::zero();
        for j in 0..k {
            let num = T::from_u64(n - j).unwrap();
            let den = T::from_u64(j + 1).unwrap();
            acc = acc + (num / den).ln();
        }
        return acc;
    }
    let n1 = T::from_u64(n + 1).unwrap();
    let k1 = T::from_u64(k + 1).unwrap();
    let r1 = T::from_u64(n - k + 1).unwrap();
    ln_gamma(n1) - ln_gamma(k1) - ln_gamma(r1)
}

/// `C(n, k) / C(n', k)` as a product of `k` ratios, with `n <= n'`.
pub fn binomial_ratio<T: Real>(n: u64, n_prime: u64, k: u64) -> T {
    if k > n {
        return T::zero();
    }
    let mut acc = T::one();
    for j in 0..k {
        acc = acc * T::from_u64(n - j).unwrap() / T::from_u64(n_prime - j).unwrap();
    }
    acc
}
