//! Randomized equivalence of the trie accelerator against the naive
//! all-pairs oracle, across alphabet sizes, sample shapes, and families.
//! Equality is exact: both paths perform identical floating-point folds.

use entrate::rng::CounterRng;
use entrate::{kmax_alpha_naive, kmax_alpha_trie, BernoulliSource, LambdaFamily, Source};

#[test]
fn trie_equals_naive_on_randomized_samples() {
    let families = [
        LambdaFamily::zero(),
        LambdaFamily::beta(0.3).unwrap(),
        LambdaFamily::beta(0.5).unwrap(),
        LambdaFamily::beta(0.9).unwrap(),
    ];
    let mut rng = CounterRng::new(0x5EED);
    for round in 0..40 {
        let asize = 2 + rng.next_below(3) as usize;
        let np = 4 + rng.next_below(125) as usize;
        let m = 4 + rng.next_below(61) as usize;
        let src = Source::Bernoulli(BernoulliSource::uniform(asize).unwrap());
        let sample = src.sample(np, m, rng.next_u64()).unwrap();

        let kmax = 1 + rng.next_below((np - 1).min(6) as u64) as usize;
        let orders: Vec<usize> = (1..=kmax).collect();
        let family = &families[round % families.len()];

        let trie = kmax_alpha_trie(&sample, &orders, family).unwrap();
        for j in 0..np {
            let naive = kmax_alpha_naive(&sample, j, &orders, family).unwrap();
            assert_eq!(
                trie.per_point()[j],
                naive,
                "round {round}: |A|={asize} n+1={np} m={m} j={j} family={}",
                family.descriptor()
            );
        }
    }
}

#[test]
fn trie_equals_naive_with_heavy_duplicates() {
    // Low-entropy source: many shared prefixes and exact duplicates.
    let src = Source::Bernoulli(BernoulliSource::new(vec![0.95, 0.05]).unwrap());
    let families = [LambdaFamily::zero(), LambdaFamily::beta(0.5).unwrap()];
    for seed in 0..8 {
        let sample = src.sample(48, 8, seed).unwrap();
        for family in &families {
            let orders = [1, 2, 5];
            let trie = kmax_alpha_trie(&sample, &orders, family).unwrap();
            for j in 0..48 {
                let naive = kmax_alpha_naive(&sample, j, &orders, family).unwrap();
                assert_eq!(trie.per_point()[j], naive);
            }
        }
    }
}
