//! Keyed pseudo-random draws that are pure functions of their inputs.
//!
//! Per-pair quantities (corruption bits, perturbations, adversarial noise) must
//! be "drawn once": asking twice returns the same value. Hashing the canonical
//! pair under a seed gives that without storing O(n^2) state.

#[inline]
pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Domain separators so different consumers of the same seed never collide.
pub(crate) mod salt {
    pub const MASK: u64 = 0x6d61_736b;
    pub const UNIFORM_ADVERSARY: u64 = 0x756e_6966;
    pub const PERTURB: u64 = 0x7065_7274;
    pub const STREAM_DRAW: u64 = 0x7374_726d;
    pub const ROUND: u64 = 0x726e_6473;
    pub const VALIDATE: u64 = 0x7661_6c64;
}

#[inline]
pub(crate) fn keyed(seed: u64, salt: u64) -> u64 {
    splitmix64(seed ^ splitmix64(salt))
}

/// Hash of the unordered pair `{a, b}`.
#[inline]
pub(crate) fn pair_hash(seed: u64, salt: u64, a: usize, b: usize) -> u64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let h = splitmix64(keyed(seed, salt) ^ lo as u64);
    splitmix64(h ^ (hi as u64).rotate_left(32))
}

#[inline]
pub(crate) fn point_hash(seed: u64, salt: u64, a: usize) -> u64 {
    splitmix64(keyed(seed, salt) ^ a as u64)
}

/// Maps a hash to a uniform draw in `[0, 1)` with 53 bits of precision.
#[inline]
pub(crate) fn unit(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_hash_is_symmetric() {
        for (a, b) in [(0, 1), (5, 17), (1000, 3)] {
            assert_eq!(pair_hash(9, salt::MASK, a, b), pair_hash(9, salt::MASK, b, a));
        }
        assert_ne!(pair_hash(9, salt::MASK, 0, 1), pair_hash(10, salt::MASK, 0, 1));
        assert_ne!(pair_hash(9, salt::MASK, 0, 1), pair_hash(9, salt::PERTURB, 0, 1));
    }

    #[test]
    fn unit_draws_look_uniform() {
        let m = 100_000;
        let mean = (0..m).map(|i| unit(point_hash(3, salt::STREAM_DRAW, i))).sum::<f64>() / m as f64;
        assert!((mean - 0.5).abs() < 0.005, "mean {mean}");
    }
}
