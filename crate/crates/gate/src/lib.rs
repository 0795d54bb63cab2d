//! Seeded network generators for the acceptance gate in `tests/acceptance.rs`.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Pairs = Vec<(usize, usize)>;

/// Number of input-to-output paths, without enumerating them.
pub fn total_paths(widths: &[usize], pairs: &[(usize, usize)]) -> u128 {
    // paths from layer 0 ending at one fixed node of each layer
    let mut per_node = vec![0u128; widths.len()];
    per_node[0] = 1;
    for l in 1..widths.len() {
        per_node[l] = pairs
            .iter()
            .filter(|&&(_, h)| h == l)
            .map(|&(j, _)| per_node[j] * widths[j] as u128)
            .sum();
    }
    per_node[widths.len() - 1] * *widths.last().unwrap() as u128
}

/// Widths 1..=3 for layers `0..=L` with `L` in 1..=6.
pub fn random_widths(rng: &mut ChaCha8Rng) -> Vec<usize> {
    let last = rng.gen_range(1..=6);
    (0..=last).map(|_| rng.gen_range(1..=3)).collect()
}

/// Consecutive pairs plus 0-4 random skips, resampled until at most `cap` paths.
pub fn random_network(rng: &mut ChaCha8Rng, cap: usize) -> (Vec<usize>, Pairs) {
    loop {
        let widths = random_widths(rng);
        let last = widths.len() - 1;
        let mut pairs: Pairs = (0..last).map(|l| (l, l + 1)).collect();
        let mut skips: Pairs = (0..=last).flat_map(|j| (j + 2..=last).map(move |l| (j, l))).collect();
        skips.shuffle(rng);
        let k = rng.gen_range(0..=4).min(skips.len());
        pairs.extend_from_slice(&skips[..k]);
        if total_paths(&widths, &pairs) <= cap as u128 {
            return (widths, pairs);
        }
    }
}

/// The network file format.
pub fn network_json(widths: &[usize], pairs: &[(usize, usize)]) -> String {
    let conns: Vec<[usize; 2]> = pairs.iter().map(|&(j, l)| [j, l]).collect();
    serde_json::json!({ "widths": widths, "connections": conns }).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn path_counts() {
        assert_eq!(total_paths(&[2, 2, 2], &[(0, 1), (1, 2)]), 8);
        assert_eq!(total_paths(&[1, 1, 1], &[(0, 1), (1, 2), (0, 2)]), 2);
        assert_eq!(total_paths(&[1; 5], &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 2), (2, 4)]), 4);
    }

    #[test]
    fn generated_networks_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let (widths, pairs) = random_network(&mut rng, 10_000);
            let last = widths.len() - 1;
            assert!((1..=6).contains(&last));
            assert!(widths.iter().all(|w| (1..=3).contains(w)));
            assert!((0..last).all(|l| pairs.contains(&(l, l + 1))));
            assert!(pairs.len() - last <= 4);
            assert!(total_paths(&widths, &pairs) <= 10_000);
        }
    }

    #[test]
    fn json_shape() {
        assert_eq!(network_json(&[1, 2], &[(0, 1)]), r#"{"connections":[[0,1]],"widths":[1,2]}"#);
    }
}
