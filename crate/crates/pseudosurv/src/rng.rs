//! Deterministic derivation of independent sub-seeds from a master seed.

/// SplitMix64 output scramble.
fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Returns the `index`-th sub-seed of `master`.
///
/// This evaluates the SplitMix64 sequence seeded at `master` directly at
/// position `index + 1`: the generator's k-th output is
/// `scramble(master + k * 0x9E3779B97F4A7C15)`, so distinct indices give
/// decorrelated seeds and the mapping is pure and order-free.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let k = index.wrapping_add(1);
    splitmix64(master.wrapping_add(k.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_indices_give_distinct_seeds() {
        let seeds: Vec<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        let mut unique = seeds.clone();
        unique.sort_unstable();
        unique.dedup();
        assert_eq!(unique.len(), seeds.len());
    }

    #[test]
    fn distinct_masters_give_distinct_streams() {
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
        assert_ne!(derive_seed(1, 5), derive_seed(2, 5));
    }

    #[test]
    fn derivation_is_pure() {
        assert_eq!(derive_seed(7, 3), derive_seed(7, 3));
    }

    #[test]
    fn matches_sequential_splitmix() {
        // Walking the SplitMix64 sequence one step at a time must agree with
        // the direct positional evaluation.
        let master: u64 = 0xDEAD_BEEF;
        let mut state = master;
        for index in 0..8 {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            assert_eq!(derive_seed(master, index), splitmix64(state));
        }
    }
}
