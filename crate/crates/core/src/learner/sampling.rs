use rand::RngCore;

use crate::bitset::AttributeSet;

use super::LearnerError;

/// Samples for the `i`-th equivalence round: `⌈(1/ε)(i + ln(1/δ))⌉`.
pub fn sample_count(epsilon: f64, delta: f64, i: u64) -> Result<u64, LearnerError> {
    let n = ((1.0 / epsilon) * (i as f64 + (1.0 / delta).ln())).ceil();
    // u64::MAX as f64 rounds up to 2^64, which is already out of range.
    if !n.is_finite() || n < 0.0 || n >= u64::MAX as f64 {
        return Err(LearnerError::SampleCountOverflow { epsilon, delta, i });
    }
    Ok(n as u64)
}

/// A uniformly random subset of a `width`-attribute universe.
///
/// One `u64` is drawn per block of 64 attributes, lowest block first; bit `j`
/// of block `k` decides attribute `64k + j`. Bits past `width` are discarded.
pub fn random_subset<R: RngCore + ?Sized>(rng: &mut R, width: usize) -> AttributeSet {
    let words: smallvec::SmallVec<[u64; 2]> =
        (0..width.div_ceil(64)).map(|_| rng.next_u64()).collect();
    AttributeSet::from_words(width, &words)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::session_rng;

    #[test]
    fn sample_count_examples() {
        assert_eq!(sample_count(0.01, 0.1, 1).unwrap(), 331);
        assert_eq!(sample_count(1.0, 1.0, 1).unwrap(), 1);
        assert_eq!(sample_count(0.5, 0.5, 3).unwrap(), 8);
        assert!(sample_count(1e-300, 0.5, u64::MAX).is_err());
    }

    #[test]
    fn empty_universe_draws_nothing() {
        let mut a = session_rng(1);
        let mut b = session_rng(1);
        assert!(random_subset(&mut a, 0).is_empty());
        assert_eq!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn bit_layout() {
        let mut probe = session_rng(9);
        let word = probe.next_u64();
        let set = random_subset(&mut session_rng(9), 10);
        for i in 0..10 {
            assert_eq!(set.contains(i), word >> i & 1 == 1);
        }
    }

    #[test]
    fn inclusion_frequency_is_one_half() {
        let mut rng = session_rng(2024);
        let width = 70;
        let mut hits = vec![0u32; width];
        let draws = 100_000;
        for _ in 0..draws {
            for i in random_subset(&mut rng, width).iter() {
                hits[i] += 1;
            }
        }
        for h in hits {
            let f = f64::from(h) / f64::from(draws);
            assert!((0.49..=0.51).contains(&f), "{f}");
        }
    }
}
