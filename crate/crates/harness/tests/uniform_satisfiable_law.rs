use std::collections::HashMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use satdiam::samplers::sample_uniform_satisfiable;
use satdiam::{RngStream, SamplerConfig};
use satdiam_harness::verify::satisfiable_ordered_formulas;

/// Pearson test of the sampler against the exact law, which is uniform over the
/// satisfiable ordered formulas.
fn chi_square_p_value(n: usize, k: usize, m: usize, samples: u64, seed: u64) -> f64 {
    let support = satisfiable_ordered_formulas(n, k, m).unwrap();
    let index: HashMap<Vec<usize>, usize> = support.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let mut counts = vec![0u64; support.len()];
    let cfg = SamplerConfig::new(n, m, k);
    let mut rng = RngStream::new(seed, 0);
    for _ in 0..samples {
        let (f, _) = sample_uniform_satisfiable(&cfg, &mut rng, 10_000).unwrap();
        let key: Vec<usize> = f.clauses().iter().map(|c| c.universe_index(n).unwrap() as usize).collect();
        let cell = *index.get(&key).expect("sampled formula must be satisfiable");
        counts[cell] += 1;
    }
    let expected = samples as f64 / support.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dist = ChiSquared::new((support.len() - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}

#[test]
fn law_matches_exact_without_rejection() {
    // two width-3 clauses on four variables are always satisfiable
    assert_eq!(satisfiable_ordered_formulas(4, 3, 2).unwrap().len(), 1024);
    let p = chi_square_p_value(4, 3, 2, 100_000, 11);
    assert!(p > 0.001, "p = {p}");
}

#[test]
fn law_matches_exact_with_rejection() {
    let support = satisfiable_ordered_formulas(3, 2, 4).unwrap();
    assert!(support.len() < 12usize.pow(4));
    let p = chi_square_p_value(3, 2, 4, 100_000, 12);
    assert!(p > 0.001, "p = {p}");
}
