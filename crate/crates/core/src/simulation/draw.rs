//! Seeded SRSWOR and nested two-phase draws.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Selected unit indices, sorted ascending. `first` is the first-phase
/// sample of a two-phase draw and always contains `second`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleDraw {
    pub second: Vec<usize>,
    pub first: Option<Vec<usize>>,
}

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replicate `r` under master seed `master`.
pub fn replicate_seed(master: u64, r: u64) -> u64 {
    splitmix64(splitmix64(master) ^ r)
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

pub fn draw_srswor(population_size: usize, n: usize, seed: u64) -> Result<SampleDraw> {
    if n < 1 || n > population_size {
        return Err(Error::InvalidDesign(format!("need 1 <= n <= N, got n = {n}, N = {population_size}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(SampleDraw { second: sorted(index::sample(&mut rng, population_size, n).into_vec()), first: None })
}

/// First phase: `n'` of `N`; second phase: `n` of those `n'`.
pub fn draw_two_phase(population_size: usize, n_prime: usize, n: usize, seed: u64) -> Result<SampleDraw> {
    if n < 1 || n >= n_prime || n_prime > population_size {
        return Err(Error::InvalidDesign(format!(
            "need 1 <= n < n' <= N, got n = {n}, n' = {n_prime}, N = {population_size}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = index::sample(&mut rng, population_size, n_prime).into_vec();
    let second = index::sample(&mut rng, n_prime, n).into_iter().map(|i| first[i]).collect();
    Ok(SampleDraw { second: sorted(second), first: Some(sorted(first)) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn full_sample_and_errors() {
        assert_eq!(draw_srswor(5, 5, 1).unwrap().second, [0, 1, 2, 3, 4]);
        assert!(draw_srswor(5, 0, 1).is_err());
        assert!(draw_srswor(5, 6, 1).is_err());
        assert!(draw_two_phase(5, 3, 3, 1).is_err());
        assert!(draw_two_phase(5, 6, 2, 1).is_err());
        let d = draw_two_phase(6, 6, 2, 3).unwrap();
        assert_eq!(d.first.unwrap(), [0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn seed_mixing_is_fixed() {
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
        assert_ne!(replicate_seed(1, 0), replicate_seed(1, 1));
        assert_ne!(replicate_seed(1, 0), replicate_seed(2, 0));
    }

    #[test]
    fn srswor_inclusion_is_uniform() {
        let mut hits = [0u32; 8];
        for s in 0..40_000 {
            for i in draw_srswor(8, 3, replicate_seed(11, s)).unwrap().second {
                hits[i] += 1;
            }
        }
        // each unit expected 15,000 times; sd about 97
        assert!(hits.iter().all(|&h| (h as f64 - 15_000.0).abs() < 500.0), "{hits:?}");
    }

    proptest! {
        #[test]
        fn nested_draws(n_total in 3usize..60, a in 0.0f64..1.0, b in 0.0f64..1.0, seed: u64) {
            let n_prime = 2 + ((n_total - 2) as f64 * a) as usize;
            let n = 1 + ((n_prime - 1) as f64 * b) as usize;
            prop_assume!(n < n_prime);
            let d = draw_two_phase(n_total, n_prime, n, seed).unwrap();
            let first = d.first.clone().unwrap();
            prop_assert_eq!(first.len(), n_prime);
            prop_assert_eq!(d.second.len(), n);
            prop_assert!(first.windows(2).all(|w| w[0] < w[1]) && *first.last().unwrap() < n_total);
            prop_assert!(d.second.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(d.second.iter().all(|i| first.binary_search(i).is_ok()));
            prop_assert_eq!(&d, &draw_two_phase(n_total, n_prime, n, seed).unwrap());
        }
    }
}
