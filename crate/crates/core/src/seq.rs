//! Bit-packed DNA words and the primitive measures on them.
//!
//! A [`Sequence`] stores up to [`MAX_LEN`] bases, two bits per base, in a
//! single `u64`. The first base occupies the most significant pair, so for
//! sequences of equal length integer order on the packed word is the same as
//! lexicographic order of the rendered string with `A < C < G < T`.
//!
//! Encoding: `A = 00`, `C = 01`, `G = 10`, `T = 11`. Under this encoding the
//! Watson-Crick complement is `x ^ 0b11` and a base is G/C exactly when its
//! two bits differ.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

pub const MAX_LEN: usize = 32;

/// Default rejection budget for [`sample_admissible`].
pub const DEFAULT_SAMPLE_ATTEMPTS: u64 = 1_000_000;

const LOW_BITS: u64 = 0x5555_5555_5555_5555;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Base {
    A = 0,
    C = 1,
    G = 2,
    T = 3,
}

impl Base {
    pub const ALL: [Base; 4] = [Base::A, Base::C, Base::G, Base::T];

    #[inline]
    fn from_bits(bits: u64) -> Base {
        Self::ALL[(bits & 3) as usize]
    }

    pub fn complement(self) -> Base {
        Base::from_bits(self as u64 ^ 3)
    }

    pub fn is_gc(self) -> bool {
        matches!(self, Base::C | Base::G)
    }

    pub fn to_char(self) -> char {
        match self {
            Base::A => 'A',
            Base::C => 'C',
            Base::G => 'G',
            Base::T => 'T',
        }
    }

    pub fn from_char(c: char) -> Option<Base> {
        match c {
            'A' => Some(Base::A),
            'C' => Some(Base::C),
            'G' => Some(Base::G),
            'T' => Some(Base::T),
            _ => None,
        }
    }
}

/// A fixed-length word over `{A, C, G, T}`.
///
/// Ordering is by length first, then lexicographic.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequence {
    len: u8,
    bits: u64,
}

#[inline]
fn mask(len: usize) -> u64 {
    if len >= MAX_LEN {
        u64::MAX
    } else {
        (1u64 << (2 * len)) - 1
    }
}

/// Reverses the order of the 2-bit groups of a full 64-bit word.
#[inline]
fn reverse_pairs(mut x: u64) -> u64 {
    x = ((x >> 2) & 0x3333_3333_3333_3333) | ((x & 0x3333_3333_3333_3333) << 2);
    x = ((x >> 4) & 0x0F0F_0F0F_0F0F_0F0F) | ((x & 0x0F0F_0F0F_0F0F_0F0F) << 4);
    x.swap_bytes()
}

impl Sequence {
    /// Builds a sequence from its packed representation. Bits above `2 * len`
    /// must be zero.
    pub fn from_packed(len: usize, bits: u64) -> Result<Self> {
        if len == 0 || len > MAX_LEN {
            return Err(Error::UnsupportedLength(len));
        }
        if bits & !mask(len) != 0 {
            return Err(Error::InvalidParams(format!(
                "packed word {bits:#x} has bits beyond length {len}"
            )));
        }
        Ok(Sequence {
            len: len as u8,
            bits,
        })
    }

    pub fn from_bases(bases: &[Base]) -> Result<Self> {
        if bases.is_empty() {
            return Err(Error::EmptyInput);
        }
        if bases.len() > MAX_LEN {
            return Err(Error::UnsupportedLength(bases.len()));
        }
        let bits = bases.iter().fold(0u64, |acc, &b| (acc << 2) | b as u64);
        Ok(Sequence {
            len: bases.len() as u8,
            bits,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        if text.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut bits = 0u64;
        let mut len = 0usize;
        for (i, c) in text.chars().enumerate() {
            let base = Base::from_char(c).ok_or(Error::InvalidSymbol {
                position: i + 1,
                symbol: c,
            })?;
            len += 1;
            if len > MAX_LEN {
                return Err(Error::UnsupportedLength(text.chars().count()));
            }
            bits = (bits << 2) | base as u64;
        }
        Ok(Sequence {
            len: len as u8,
            bits,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    /// Always false; sequences have at least one base.
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn packed(&self) -> u64 {
        self.bits
    }

    /// Base at 0-based position `i`.
    pub fn base(&self, i: usize) -> Base {
        assert!(i < self.len(), "position {i} out of range");
        Base::from_bits(self.bits >> (2 * (self.len() - 1 - i)))
    }

    pub fn bases(&self) -> impl Iterator<Item = Base> + '_ {
        (0..self.len()).map(move |i| self.base(i))
    }

    /// Number of positions at which the sequences differ.
    pub fn hamming(&self, other: &Sequence) -> Result<usize> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(self.hamming_unchecked(other))
    }

    /// Hamming distance without the length check; callers guarantee equal
    /// lengths (debug builds assert it).
    #[inline]
    pub fn hamming_unchecked(&self, other: &Sequence) -> usize {
        debug_assert_eq!(self.len, other.len);
        let x = self.bits ^ other.bits;
        ((x | (x >> 1)) & LOW_BITS).count_ones() as usize
    }

    #[inline]
    pub fn reverse_complement(&self) -> Sequence {
        let n = self.len();
        let flipped = self.bits ^ mask(n);
        Sequence {
            len: self.len,
            bits: reverse_pairs(flipped) >> (64 - 2 * n),
        }
    }

    #[inline]
    pub fn gc_content(&self) -> usize {
        let x = self.bits;
        ((x ^ (x >> 1)) & LOW_BITS & mask(self.len())).count_ones() as usize
    }

    /// `hamming(σ, RC(σ))`.
    #[inline]
    pub fn self_complement_distance(&self) -> usize {
        self.hamming_unchecked(&self.reverse_complement())
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.bases().map(Base::to_char).collect();
        f.pad(&s)
    }
}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sequence({self})")
    }
}

impl FromStr for Sequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Sequence::parse(s)
    }
}

impl serde::Serialize for Sequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Sequence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Sequence::parse(&s).map_err(serde::de::Error::custom)
    }
}

fn check_length_weight(n: usize, w: usize) -> Result<()> {
    if n == 0 || n > MAX_LEN {
        return Err(Error::UnsupportedLength(n));
    }
    if w > n {
        return Err(Error::InvalidParams(format!("w={w} exceeds n={n}")));
    }
    Ok(())
}

/// `C(n, k)` in `u64`, exact for every argument this crate uses (`n ≤ 64`).
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of length-`n` sequences with GC-content `w`: `C(n, w) · 2^n`.
pub fn constant_gc_count(n: usize, w: usize) -> u64 {
    if w > n {
        return 0;
    }
    binomial(n as u64, w as u64).saturating_mul(1u64.checked_shl(n as u32).unwrap_or(u64::MAX))
}

/// Lexicographically ordered iterator over all sequences of length `n` with
/// GC-content exactly `w`.
#[derive(Debug, Clone)]
pub struct ConstantGcIter {
    w: usize,
    current: Option<Vec<Base>>,
}

impl ConstantGcIter {
    /// Smallest suffix of length `len` containing exactly `gc` G/C bases:
    /// A's followed by C's.
    fn fill_smallest(out: &mut [Base], gc: usize) {
        let len = out.len();
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = if i >= len - gc { Base::C } else { Base::A };
        }
    }

    fn advance(&mut self) {
        let Some(cur) = self.current.as_mut() else {
            return;
        };
        let n = cur.len();
        let mut prefix_gc: Vec<usize> = Vec::with_capacity(n + 1);
        prefix_gc.push(0);
        for b in cur.iter() {
            prefix_gc.push(prefix_gc.last().unwrap() + b.is_gc() as usize);
        }
        for i in (0..n).rev() {
            let before = prefix_gc[i];
            for next in Base::ALL.iter().filter(|b| **b > cur[i]) {
                let used = before + next.is_gc() as usize;
                let remaining_slots = n - i - 1;
                if used <= self.w && self.w - used <= remaining_slots {
                    cur[i] = *next;
                    Self::fill_smallest(&mut cur[i + 1..], self.w - used);
                    return;
                }
            }
        }
        self.current = None;
    }
}

impl Iterator for ConstantGcIter {
    type Item = Sequence;

    fn next(&mut self) -> Option<Sequence> {
        let out = Sequence::from_bases(self.current.as_ref()?).ok()?;
        self.advance();
        Some(out)
    }
}

/// All length-`n` sequences with GC-content `w`, in lexicographic order.
pub fn enumerate_constant_gc(n: usize, w: usize) -> Result<ConstantGcIter> {
    check_length_weight(n, w)?;
    let mut first = vec![Base::A; n];
    ConstantGcIter::fill_smallest(&mut first, w);
    Ok(ConstantGcIter {
        w,
        current: Some(first),
    })
}

/// Admissible sequences for `(n, d, w)`: GC-content `w` and
/// `hamming(σ, RC(σ)) ≥ d`, in lexicographic order.
pub fn enumerate_admissible(n: usize, d: usize, w: usize) -> Result<impl Iterator<Item = Sequence>> {
    Ok(enumerate_constant_gc(n, w)?.filter(move |s| s.self_complement_distance() >= d))
}

/// Draws a sequence uniformly from the `C(n, w) · 2^n` sequences with
/// GC-content `w`.
pub fn sample_constant_gc<R: Rng + ?Sized>(n: usize, w: usize, rng: &mut R) -> Result<Sequence> {
    check_length_weight(n, w)?;
    let mut gc_positions = 0u64;
    for i in rand::seq::index::sample(rng, n, w).iter() {
        gc_positions |= 1 << i;
    }
    let choice: u64 = rng.gen();
    let mut bits = 0u64;
    for i in 0..n {
        let pick = (choice >> i) & 1;
        let base = match ((gc_positions >> i) & 1, pick) {
            (1, 0) => Base::C,
            (1, _) => Base::G,
            (_, 0) => Base::A,
            _ => Base::T,
        };
        bits = (bits << 2) | base as u64;
    }
    Ok(Sequence { len: n as u8, bits })
}

/// Rejection-samples [`sample_constant_gc`] until the draw is at distance at
/// least `d` from its own reverse complement.
pub fn sample_admissible<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    w: usize,
    rng: &mut R,
    max_attempts: u64,
) -> Result<Sequence> {
    check_length_weight(n, w)?;
    if d == 0 || d > n {
        return Err(Error::InvalidParams(format!("d={d} outside 1..={n}")));
    }
    if max_attempts == 0 {
        return Err(Error::InvalidParams("max_attempts must be at least 1".into()));
    }
    for _ in 0..max_attempts {
        let s = sample_constant_gc(n, w, rng)?;
        if s.self_complement_distance() >= d {
            return Ok(s);
        }
    }
    Err(Error::Exhausted {
        n,
        d,
        w,
        attempts: max_attempts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::{BTreeSet, HashMap};

    fn s(text: &str) -> Sequence {
        Sequence::parse(text).unwrap()
    }

    // Character-level reference implementations.
    fn naive_hamming(a: &str, b: &str) -> usize {
        a.chars().zip(b.chars()).filter(|(x, y)| x != y).count()
    }

    fn naive_rc(a: &str) -> String {
        a.chars()
            .rev()
            .map(|c| match c {
                'A' => 'T',
                'C' => 'G',
                'G' => 'C',
                _ => 'A',
            })
            .collect()
    }

    fn all_words(n: usize) -> Vec<String> {
        let mut out = vec![String::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|p| "ACGT".chars().map(move |c| format!("{p}{c}")))
                .collect();
        }
        out
    }

    #[test]
    fn parse_examples() {
        let x = s("ACGT");
        assert_eq!(x.len(), 4);
        assert_eq!(x.bases().collect::<Vec<_>>(), vec![Base::A, Base::C, Base::G, Base::T]);
        assert!(matches!(
            Sequence::parse("ACXT"),
            Err(Error::InvalidSymbol { position: 3, symbol: 'X' })
        ));
        assert!(matches!(Sequence::parse(""), Err(Error::EmptyInput)));
        assert!(matches!(Sequence::parse("acgt"), Err(Error::InvalidSymbol { position: 1, .. })));
        assert!(matches!(
            Sequence::parse(&"A".repeat(33)),
            Err(Error::UnsupportedLength(33))
        ));
        assert_eq!(s(&"T".repeat(32)).to_string(), "T".repeat(32));
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(s("AAAA").hamming(&s("AAAT")).unwrap(), 1);
        assert_eq!(s("GATTACA").hamming(&s("GATTACA")).unwrap(), 0);
        assert_eq!(s("ACGT").hamming(&s("TGCA")).unwrap(), 4);
        assert!(matches!(
            s("ACG").hamming(&s("ACGT")),
            Err(Error::LengthMismatch { left: 3, right: 4 })
        ));
    }

    #[test]
    fn reverse_complement_examples() {
        assert_eq!(s("AACG").reverse_complement().to_string(), "CGTT");
        assert_eq!(s("ACGT").reverse_complement().to_string(), "ACGT");
        let long = s("ACGTTGCAAACCGGTTACGTTGCAAACCGGTA");
        assert_eq!(long.reverse_complement().to_string(), naive_rc(&long.to_string()));
    }

    #[test]
    fn gc_examples() {
        assert_eq!(s("ACGTA").gc_content(), 2);
        assert_eq!(s("GGCC").gc_content(), 4);
        assert_eq!(s("AATT").gc_content(), 0);
    }

    #[test]
    fn packed_measures_match_naive_exhaustively_small_n() {
        for n in 1..=4 {
            let words = all_words(n);
            for a in &words {
                let sa = s(a);
                assert_eq!(sa.reverse_complement().to_string(), naive_rc(a));
                assert_eq!(sa.gc_content(), a.chars().filter(|c| "CG".contains(*c)).count());
                for b in &words {
                    let sb = s(b);
                    assert_eq!(sa.hamming_unchecked(&sb), naive_hamming(a, b));
                    // RC-distance symmetry.
                    assert_eq!(
                        sa.hamming_unchecked(&sb.reverse_complement()),
                        sb.hamming_unchecked(&sa.reverse_complement())
                    );
                }
            }
        }
    }

    #[test]
    fn enumeration_counts_and_order() {
        for n in 1..=6 {
            for w in 0..=n {
                let all: Vec<_> = enumerate_constant_gc(n, w).unwrap().collect();
                assert_eq!(all.len() as u64, constant_gc_count(n, w), "n={n} w={w}");
                assert!(all.windows(2).all(|p| p[0] < p[1]), "not strictly sorted");
                assert!(all.iter().all(|x| x.gc_content() == w));
                let rendered: Vec<String> = all.iter().map(|x| x.to_string()).collect();
                let mut sorted = rendered.clone();
                sorted.sort();
                assert_eq!(rendered, sorted);
            }
        }
        assert_eq!(enumerate_constant_gc(5, 2).unwrap().count(), 320);
        assert_eq!(enumerate_constant_gc(6, 3).unwrap().count(), 1280);
        let tiny: Vec<String> = enumerate_constant_gc(1, 0).unwrap().map(|x| x.to_string()).collect();
        assert_eq!(tiny, vec!["A", "T"]);
        assert!(matches!(enumerate_constant_gc(3, 4), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn enumeration_matches_brute_force_filter() {
        for n in 1..=5 {
            for w in 0..=n {
                let brute: Vec<String> = all_words(n)
                    .into_iter()
                    .filter(|x| x.chars().filter(|c| "CG".contains(*c)).count() == w)
                    .collect();
                let fast: Vec<String> = enumerate_constant_gc(n, w).unwrap().map(|x| x.to_string()).collect();
                assert_eq!(fast, brute);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_and_constrained() {
        let a = sample_constant_gc(4, 2, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let b = sample_constant_gc(4, 2, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a, b);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let x = sample_constant_gc(4, 4, &mut rng).unwrap();
            assert!(x.bases().all(|b| b == Base::C || b == Base::G));
        }
    }

    #[test]
    fn sample_constant_gc_is_uniform() {
        // Support is the 24 words of length 3 with one G/C; each cell count
        // must lie within 5 standard deviations of the uniform expectation,
        // and the chi-square statistic (23 dof) well below its 1e-6 quantile.
        let support: BTreeSet<String> = all_words(3)
            .into_iter()
            .filter(|x| x.chars().filter(|c| "CG".contains(*c)).count() == 1)
            .collect();
        assert_eq!(support.len(), 24);
        let draws = 100_000usize;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut counts: HashMap<String, usize> = HashMap::new();
        for _ in 0..draws {
            *counts.entry(sample_constant_gc(3, 1, &mut rng).unwrap().to_string()).or_default() += 1;
        }
        assert_eq!(counts.keys().cloned().collect::<BTreeSet<_>>(), support);
        let p = 1.0 / 24.0;
        let expected = draws as f64 * p;
        let sd = (draws as f64 * p * (1.0 - p)).sqrt();
        let mut chi2 = 0.0;
        for c in counts.values() {
            let diff = *c as f64 - expected;
            assert!(diff.abs() < 5.0 * sd, "count {c} vs expected {expected}");
            chi2 += diff * diff / expected;
        }
        assert!(chi2 < 70.0, "chi2 = {chi2}");
    }

    #[test]
    fn admissible_sampling() {
        let admissible: BTreeSet<Sequence> = enumerate_admissible(5, 4, 2).unwrap().collect();
        assert_eq!(admissible.len(), 208);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let x = sample_admissible(5, 4, 2, &mut rng, DEFAULT_SAMPLE_ATTEMPTS).unwrap();
            assert!(admissible.contains(&x));
        }

        // (4,1,2): brute force over all 256 words, then filter.
        let brute: BTreeSet<String> = all_words(4)
            .into_iter()
            .filter(|x| x.chars().filter(|c| "CG".contains(*c)).count() == 2)
            .filter(|x| naive_hamming(x, &naive_rc(x)) >= 1)
            .collect();
        let fast: BTreeSet<String> = enumerate_admissible(4, 1, 2).unwrap().map(|x| x.to_string()).collect();
        assert_eq!(fast, brute);
        let drawn = sample_admissible(4, 1, 2, &mut rng, 1000).unwrap();
        assert!(brute.contains(&drawn.to_string()));
    }

    #[test]
    fn admissible_exhaustion() {
        // Every length-2, w=1 word is already at distance 2 from its reverse
        // complement, so sampling there always succeeds.
        let candidates: Vec<String> = all_words(2)
            .into_iter()
            .filter(|x| x.chars().filter(|c| "CG".contains(*c)).count() == 1)
            .collect();
        assert_eq!(candidates.len(), 8);
        assert!(candidates.iter().all(|x| naive_hamming(x, &naive_rc(x)) >= 2));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_admissible(2, 2, 1, &mut rng, 1000).is_ok());

        // (6,6,3) keeps 704 of 1280 candidates; a single attempt must
        // sometimes fail.
        let exhausted = (0..64u64)
            .filter(|seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                matches!(
                    sample_admissible(6, 6, 3, &mut rng, 1),
                    Err(Error::Exhausted { attempts: 1, .. })
                )
            })
            .count();
        assert!(exhausted > 0);

        assert!(matches!(sample_admissible(2, 3, 1, &mut rng, 10), Err(Error::InvalidParams(_))));
        assert!(matches!(sample_admissible(2, 1, 1, &mut rng, 0), Err(Error::InvalidParams(_))));
    }

    fn arb_seq(n: usize) -> impl Strategy<Value = Sequence> {
        prop::collection::vec(0u8..4, n).prop_map(|v| {
            let bases: Vec<Base> = v.into_iter().map(|b| Base::ALL[b as usize]).collect();
            Sequence::from_bases(&bases).unwrap()
        })
    }

    fn arb_triple() -> impl Strategy<Value = (Sequence, Sequence, Sequence)> {
        (1usize..=32).prop_flat_map(|n| (arb_seq(n), arb_seq(n), arb_seq(n)))
    }

    proptest! {
        #[test]
        fn hamming_is_a_metric((a, b, c) in arb_triple()) {
            let ab = a.hamming(&b).unwrap();
            prop_assert_eq!(ab, b.hamming(&a).unwrap());
            prop_assert_eq!(ab == 0, a == b);
            prop_assert_eq!(a.hamming(&a).unwrap(), 0);
            prop_assert!(a.hamming(&c).unwrap() <= ab + b.hamming(&c).unwrap());
            prop_assert_eq!(ab, naive_hamming(&a.to_string(), &b.to_string()));
        }

        #[test]
        fn reverse_complement_laws((a, b, _) in arb_triple()) {
            let rc = a.reverse_complement();
            prop_assert_eq!(rc.reverse_complement(), a);
            prop_assert_eq!(rc.gc_content(), a.gc_content());
            prop_assert_eq!(rc.to_string(), naive_rc(&a.to_string()));
            prop_assert_eq!(
                a.hamming_unchecked(&b.reverse_complement()),
                b.hamming_unchecked(&a.reverse_complement())
            );
            prop_assert_eq!(a.self_complement_distance() % 2, a.len() % 2);
        }

        #[test]
        fn text_round_trip((a, _, _) in arb_triple()) {
            let text = a.to_string();
            prop_assert_eq!(Sequence::parse(&text).unwrap(), a);
            prop_assert_eq!(Sequence::from_packed(a.len(), a.packed()).unwrap(), a);
        }
    }
}
