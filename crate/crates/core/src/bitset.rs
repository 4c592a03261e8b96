//! Fixed-width attribute sets.
//!
//! An [`AttributeSet`] is a bit vector whose width is the size of the
//! attribute universe. Bit `i` is set when attribute `i` is present. Up to
//! 128 attributes are stored inline.

use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

const WORD: usize = 64;

type Words = SmallVec<[u64; 2]>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AttributeSet {
    width: usize,
    words: Words,
}

fn word_count(width: usize) -> usize {
    width.div_ceil(WORD)
}

impl AttributeSet {
    pub fn empty(width: usize) -> Self {
        Self {
            width,
            words: smallvec::smallvec![0; word_count(width)],
        }
    }

    pub fn full(width: usize) -> Self {
        let mut set = Self {
            width,
            words: smallvec::smallvec![u64::MAX; word_count(width)],
        };
        set.clear_tail();
        set
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(width: usize, indices: I) -> Self {
        let mut set = Self::empty(width);
        for i in indices {
            set.insert(i);
        }
        set
    }

    /// Builds a set from the low `width` bits of `bits`; `width` must be at most 64.
    pub fn from_bits(width: usize, bits: u64) -> Self {
        assert!(width <= WORD, "from_bits supports at most 64 attributes");
        let mut set = Self::empty(width);
        if width > 0 {
            set.words[0] = bits;
            set.clear_tail();
        }
        set
    }

    /// Builds a set from raw little-endian words; bits beyond `width` are cleared.
    pub fn from_words(width: usize, words: &[u64]) -> Self {
        assert_eq!(
            words.len(),
            word_count(width),
            "word count does not match width"
        );
        let mut set = Self {
            width,
            words: SmallVec::from_slice(words),
        };
        set.clear_tail();
        set
    }

    /// The set as a single integer; only meaningful for widths up to 64.
    pub fn to_bits(&self) -> u64 {
        assert!(self.width <= WORD, "to_bits supports at most 64 attributes");
        self.words.first().copied().unwrap_or(0)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.width
    }

    pub fn contains(&self, index: usize) -> bool {
        assert!(index < self.width, "attribute index {index} out of range");
        self.words[index / WORD] & (1 << (index % WORD)) != 0
    }

    pub fn insert(&mut self, index: usize) -> bool {
        assert!(index < self.width, "attribute index {index} out of range");
        let mask = 1 << (index % WORD);
        let word = &mut self.words[index / WORD];
        let fresh = *word & mask == 0;
        *word |= mask;
        fresh
    }

    pub fn remove(&mut self, index: usize) -> bool {
        assert!(index < self.width, "attribute index {index} out of range");
        let mask = 1 << (index % WORD);
        let word = &mut self.words[index / WORD];
        let present = *word & mask != 0;
        *word &= !mask;
        present
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.check_width(other);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_proper_subset(&self, other: &Self) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn intersect_with(&mut self, other: &Self) {
        self.check_width(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &Self) {
        self.check_width(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn difference_with(&mut self, other: &Self) {
        self.check_width(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.difference_with(other);
        out
    }

    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        for w in out.words.iter_mut() {
            *w = !*w;
        }
        out.clear_tail();
        out
    }

    /// Attribute indices in ascending order.
    pub fn iter(&self) -> Ones<'_> {
        Ones {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    /// Whether `self` and `other` agree on every attribute below `index`.
    pub fn agrees_below(&self, other: &Self, index: usize) -> bool {
        self.check_width(other);
        let full = index / WORD;
        if self.words[..full] != other.words[..full] {
            return false;
        }
        let rem = index % WORD;
        if rem == 0 {
            return true;
        }
        let mask = (1u64 << rem) - 1;
        (self.words[full] ^ other.words[full]) & mask == 0
    }

    /// Keeps only the attributes with index below `index`.
    pub fn truncate_to(&mut self, index: usize) {
        let full = index / WORD;
        let rem = index % WORD;
        for (k, w) in self.words.iter_mut().enumerate() {
            if k > full || (k == full && rem == 0) {
                *w = 0;
            } else if k == full {
                *w &= (1u64 << rem) - 1;
            }
        }
    }

    /// Lectic comparison: `a < b` iff the smallest attribute on which they
    /// differ belongs to `b`.
    pub fn lectic_cmp(&self, other: &Self) -> Ordering {
        self.check_width(other);
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                let bit = 1u64 << diff.trailing_zeros();
                return if b & bit != 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        Ordering::Equal
    }

    fn clear_tail(&mut self) {
        let rem = self.width % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    fn check_width(&self, other: &Self) {
        assert_eq!(
            self.width, other.width,
            "attribute sets from different universes"
        );
    }
}

impl PartialOrd for AttributeSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order: by width first, then lectic.
impl Ord for AttributeSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.width
            .cmp(&other.width)
            .then_with(|| self.lectic_cmp(other))
    }
}

impl fmt::Debug for AttributeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * WORD + bit);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

/// All subsets of a universe of `width` attributes in integer order
/// (bit `i` of the counter is attribute `i`). Widths up to 63.
pub fn all_subsets(width: usize) -> impl Iterator<Item = AttributeSet> {
    assert!(
        width < WORD,
        "exhaustive enumeration is limited to 63 attributes"
    );
    (0..1u64 << width).map(move |bits| AttributeSet::from_bits(width, bits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_membership() {
        let mut s = AttributeSet::empty(130);
        assert!(s.is_empty());
        s.insert(0);
        s.insert(64);
        s.insert(129);
        assert_eq!(s.len(), 3);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert!(s.remove(64));
        assert!(!s.contains(64));
    }

    #[test]
    fn full_clears_tail_bits() {
        let f = AttributeSet::full(70);
        assert_eq!(f.len(), 70);
        assert!(f.is_full());
        assert!(AttributeSet::full(0).is_full());
        assert_eq!(AttributeSet::full(5).complement(), AttributeSet::empty(5));
    }

    #[test]
    fn lectic_order_follows_smallest_difference() {
        let a = AttributeSet::from_indices(3, [1]);
        let b = AttributeSet::from_indices(3, [0]);
        // smallest differing index is 0, which belongs to b
        assert_eq!(a.lectic_cmp(&b), Ordering::Less);
        let c = AttributeSet::from_indices(3, [0, 2]);
        assert_eq!(b.lectic_cmp(&c), Ordering::Less);
        assert_eq!(AttributeSet::empty(3).lectic_cmp(&a), Ordering::Less);
    }

    #[test]
    fn agrees_below_and_truncate() {
        let a = AttributeSet::from_indices(100, [1, 70, 90]);
        let b = AttributeSet::from_indices(100, [1, 70, 95]);
        assert!(a.agrees_below(&b, 90));
        assert!(!a.agrees_below(&b, 91));
        let mut t = a.clone();
        t.truncate_to(71);
        assert_eq!(t, AttributeSet::from_indices(100, [1, 70]));
        t.truncate_to(64);
        assert_eq!(t, AttributeSet::from_indices(100, [1]));
    }

    #[test]
    #[should_panic(expected = "different universes")]
    fn width_mismatch_panics() {
        AttributeSet::empty(3).is_subset(&AttributeSet::empty(4));
    }
}
