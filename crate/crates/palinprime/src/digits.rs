//! Base-g digit algebra.
//!
//! A palindrome of length L is determined by its first ceil(L/2) digits
//! (the "free" digits): free digit j occupies position j and, mirrored,
//! position L-1-j of the expansion. Enumerating palindromes of a fixed
//! length therefore reduces to walking the mixed-radix space of free
//! digits, and the rank/unrank bijection below is that walk made explicit.
//!
//! Digits are stored little-endian: index i holds the coefficient of g^i.

use crate::{Error, Natural, Result};

/// The base of the digit expansion, g >= 2.
///
/// Construction also requires g^3 - g to fit in a u64 (g <= 2097151) so the
/// modulus used by the refined census is always representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Base(u64);

impl Base {
    pub fn new(g: u64) -> Result<Self> {
        let ok = g >= 2
            && g.checked_pow(3)
                .map(|c| c - g <= 1u64 << 63)
                .unwrap_or(false);
        if ok {
            Ok(Base(g))
        } else {
            Err(Error::InvalidBase(g))
        }
    }

    #[inline]
    pub const fn get(self) -> u64 {
        self.0
    }

    /// The modulus g^3 - g used by the refined palindrome classes.
    #[inline]
    pub const fn g3_minus_g(self) -> u64 {
        self.0 * self.0 * self.0 - self.0
    }
}

impl std::fmt::Display for Base {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Little-endian digit string: `digits()[i]` is the coefficient of g^i.
///
/// Invariants: nonempty, every digit below the base, most significant
/// (last) digit nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitString {
    digits: Vec<u64>,
}

impl DigitString {
    pub fn new(digits: Vec<u64>, g: Base) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::EmptyDigits);
        }
        for &d in &digits {
            if d >= g.get() {
                return Err(Error::DigitOutOfRange {
                    digit: d,
                    base: g.get(),
                });
            }
        }
        if *digits.last().unwrap() == 0 {
            return Err(Error::LeadingZeroDigit);
        }
        Ok(DigitString { digits })
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// True iff the string equals its reversal.
    pub fn is_palindromic(&self) -> bool {
        let n = self.digits.len();
        (0..n / 2).all(|i| self.digits[i] == self.digits[n - 1 - i])
    }
}

/// A validated palindrome: `value` has exactly `length` digits in base
/// `base` and its digit string equals its reversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Palindrome {
    value: Natural,
    length: u32,
    base: Base,
}

impl Palindrome {
    pub fn new(value: Natural, base: Base) -> Result<Self> {
        let ds = to_digits(value, base)?;
        if !ds.is_palindromic() {
            return Err(Error::NotAPalindrome {
                value,
                length: ds.len() as u32,
                base: base.get(),
            });
        }
        Ok(Palindrome {
            value,
            length: ds.len() as u32,
            base,
        })
    }

    pub fn value(&self) -> Natural {
        self.value
    }

    pub fn length(&self) -> u32 {
        self.length
    }

    pub fn base(&self) -> Base {
        self.base
    }
}

/// Base-g expansion of n >= 1, little-endian.
pub fn to_digits(n: Natural, g: Base) -> Result<DigitString> {
    if n == 0 {
        return Err(Error::ZeroValue);
    }
    let base = g.get();
    let mut digits = Vec::new();
    if n <= u64::MAX as u128 {
        let mut m = n as u64;
        while m > 0 {
            digits.push(m % base);
            m /= base;
        }
    } else {
        let mut m = n;
        let b = base as u128;
        while m > 0 {
            digits.push((m % b) as u64);
            m /= b;
        }
    }
    Ok(DigitString { digits })
}

/// Value of a little-endian digit string: sum of digits[i] * g^i.
///
/// Revalidates against `g` so a string built for one base cannot be
/// silently reinterpreted in a smaller one.
pub fn from_digits(ds: &DigitString, g: Base) -> Result<Natural> {
    let base = g.get() as u128;
    if *ds.digits.last().unwrap() == 0 {
        return Err(Error::LeadingZeroDigit);
    }
    let mut value: u128 = 0;
    for &d in ds.digits.iter().rev() {
        if d >= g.get() {
            return Err(Error::DigitOutOfRange {
                digit: d,
                base: g.get(),
            });
        }
        value = value
            .checked_mul(base)
            .and_then(|v| v.checked_add(d as u128))
            .ok_or(Error::Overflow("digit string value"))?;
    }
    Ok(value)
}

/// True iff the base-g expansion of n reads the same backwards as forwards.
pub fn is_palindrome(n: Natural, g: Base) -> Result<bool> {
    Ok(to_digits(n, g)?.is_palindromic())
}

/// Number of free digits of a palindrome of the given length: ceil(L/2).
pub(crate) fn free_len(length: u32) -> u32 {
    length.div_ceil(2)
}

/// Weight of free digit j in the value of a palindrome of length L:
/// g^j + g^(L-1-j) for a mirrored pair, g^j for the middle digit.
pub(crate) fn free_weights(length: u32, g: Base) -> Result<Vec<Natural>> {
    let base = g.get() as u128;
    let h = free_len(length);
    let mut weights = Vec::with_capacity(h as usize);
    for j in 0..h {
        let lo = base
            .checked_pow(j)
            .ok_or(Error::Overflow("palindrome digit weight"))?;
        let mirror = length - 1 - j;
        let w = if mirror == j {
            lo
        } else {
            let hi = base
                .checked_pow(mirror)
                .ok_or(Error::Overflow("palindrome digit weight"))?;
            lo.checked_add(hi)
                .ok_or(Error::Overflow("palindrome digit weight"))?
        };
        weights.push(w);
    }
    Ok(weights)
}

/// Size of the free-digit space for the given length: (g-1) * g^(h-1).
///
/// This equals the number of palindromes of that length; `census` derives
/// the same quantity from the parity-split closed form.
pub(crate) fn free_space_size(length: u32, g: Base) -> Result<Natural> {
    if length == 0 {
        return Err(Error::ZeroLength);
    }
    let h = free_len(length);
    (g.get() as u128)
        .checked_pow(h - 1)
        .and_then(|p| p.checked_mul(g.get() as u128 - 1))
        .ok_or(Error::Overflow("palindrome count"))
}

/// Mirror `free` digits into a full palindrome of the given length.
///
/// `free[j]` is digit n_j of the expansion, j = 0..ceil(length/2), and
/// `free[0]` doubles as the most significant digit, so it must be nonzero.
pub fn make_palindrome(free: &[u64], length: u32, g: Base) -> Result<Natural> {
    if length == 0 {
        return Err(Error::ZeroLength);
    }
    let h = free_len(length);
    if free.len() != h as usize {
        return Err(Error::FreeDigitCount {
            expected: h,
            length,
            got: free.len(),
        });
    }
    for &d in free {
        if d >= g.get() {
            return Err(Error::DigitOutOfRange {
                digit: d,
                base: g.get(),
            });
        }
    }
    if free[0] == 0 {
        return Err(Error::LeadingZeroDigit);
    }
    let weights = free_weights(length, g)?;
    let mut value: u128 = 0;
    for (&d, &w) in free.iter().zip(&weights) {
        value = w
            .checked_mul(d as u128)
            .and_then(|t| value.checked_add(t))
            .ok_or(Error::Overflow("palindrome value"))?;
    }
    Ok(value)
}

/// The rank-th palindrome of the given length, counting from rank 0 in
/// increasing numeric order.
///
/// Ranks order the free digits lexicographically with n_0 (the outermost
/// digit pair) most significant, which coincides with numeric order, so
/// unranking is a mixed-radix conversion with the n_0 >= 1 offset.
pub fn palindrome_at(rank: Natural, length: u32, g: Base) -> Result<Natural> {
    let count = free_space_size(length, g)?;
    if rank >= count {
        return Err(Error::RankOutOfRange {
            rank,
            count,
            length,
        });
    }
    let h = free_len(length);
    let base = g.get() as u128;
    let mut free = vec![0u64; h as usize];
    let mut rem = rank;
    for j in (1..h as usize).rev() {
        free[j] = (rem % base) as u64;
        rem /= base;
    }
    free[0] = (rem + 1) as u64;
    make_palindrome(&free, length, g)
}

/// Rank of a palindrome within its length class; inverse of
/// [`palindrome_at`].
pub fn rank_of(n: Natural, length: u32, g: Base) -> Result<Natural> {
    let ds = to_digits(n, g)?;
    if ds.len() as u32 != length || !ds.is_palindromic() {
        return Err(Error::NotAPalindrome {
            value: n,
            length,
            base: g.get(),
        });
    }
    let h = free_len(length);
    let base = g.get() as u128;
    // Free digit j is expansion digit j; read them off most significant
    // free digit first.
    let digits = ds.digits();
    let mut rank: u128 = (digits[0] - 1) as u128;
    for &d in &digits[1..h as usize] {
        rank = rank * base + d as u128;
    }
    Ok(rank)
}

/// Iterator over palindromes of one length in increasing order, optionally
/// restricted to a sub-range of ranks. Values are produced incrementally
/// from the free-digit counter, so each step is O(carry chain).
pub struct Palindromes {
    weights: Vec<Natural>,
    free: Vec<u64>,
    value: Natural,
    remaining: Natural,
    base: u64,
    started: bool,
}

impl Palindromes {
    /// All palindromes of `length`, in increasing order.
    pub fn new(length: u32, g: Base) -> Result<Self> {
        let count = free_space_size(length, g)?;
        Self::range(length, g, 0, count)
    }

    /// Palindromes with rank in `[start, end)`.
    pub fn range(length: u32, g: Base, start: Natural, end: Natural) -> Result<Self> {
        let count = free_space_size(length, g)?;
        if start > end || end > count {
            return Err(Error::RankOutOfRange {
                rank: end,
                count,
                length,
            });
        }
        let remaining = end - start;
        let h = free_len(length);
        let base = g.get() as u128;
        let mut free = vec![0u64; h as usize];
        if remaining > 0 {
            let mut rem = start;
            for j in (1..h as usize).rev() {
                free[j] = (rem % base) as u64;
                rem /= base;
            }
            free[0] = (rem + 1) as u64;
        }
        let weights = free_weights(length, g)?;
        let value = free
            .iter()
            .zip(&weights)
            .map(|(&d, &w)| d as u128 * w)
            .sum();
        Ok(Palindromes {
            weights,
            free,
            value,
            remaining,
            base: g.get(),
            started: false,
        })
    }
}

impl Iterator for Palindromes {
    type Item = Natural;

    fn next(&mut self) -> Option<Natural> {
        if self.remaining == 0 {
            return None;
        }
        if !self.started {
            self.started = true;
            self.remaining -= 1;
            return Some(self.value);
        }
        self.remaining -= 1;
        let mut j = self.free.len() - 1;
        loop {
            self.free[j] += 1;
            if self.free[j] < self.base {
                self.value += self.weights[j];
                break;
            }
            // digit j wraps from base-1 back to 0; carry left
            self.free[j] = 0;
            self.value -= (self.base - 1) as u128 * self.weights[j];
            debug_assert!(j > 0, "walker stepped past the final palindrome");
            j -= 1;
        }
        Some(self.value)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = usize::try_from(self.remaining).ok();
        (n.unwrap_or(usize::MAX), n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn base(g: u64) -> Base {
        Base::new(g).unwrap()
    }

    #[test]
    fn base_validation() {
        assert_eq!(Base::new(1), Err(Error::InvalidBase(1)));
        assert_eq!(Base::new(0), Err(Error::InvalidBase(0)));
        assert!(Base::new(2).is_ok());
        assert_eq!(base(10).g3_minus_g(), 990);
        assert_eq!(base(2).g3_minus_g(), 6);
        // g^3 - g no longer fits in u64
        assert!(Base::new(1 << 32).is_err());
    }

    #[test]
    fn to_digits_examples() {
        assert_eq!(to_digits(1221, base(10)).unwrap().digits(), &[1, 2, 2, 1]);
        assert_eq!(to_digits(5, base(2)).unwrap().digits(), &[1, 0, 1]);
        assert_eq!(to_digits(9, base(10)).unwrap().digits(), &[9]);
        assert_eq!(to_digits(0, base(10)), Err(Error::ZeroValue));
    }

    #[test]
    fn from_digits_examples() {
        let g2 = base(2);
        let g10 = base(10);
        let ds = DigitString::new(vec![1, 0, 1], g2).unwrap();
        assert_eq!(from_digits(&ds, g2).unwrap(), 5);
        let ds = DigitString::new(vec![1, 2, 2, 1], g10).unwrap();
        assert_eq!(from_digits(&ds, g10).unwrap(), 1221);
        let ds = DigitString::new(vec![0, 1], g10).unwrap();
        assert_eq!(from_digits(&ds, g10).unwrap(), 10);
        // digit out of range when reinterpreted in a smaller base
        let ds = DigitString::new(vec![7, 3], g10).unwrap();
        assert_eq!(
            from_digits(&ds, g2),
            Err(Error::DigitOutOfRange { digit: 3, base: 2 })
        );
        assert_eq!(
            DigitString::new(vec![1, 0], g10),
            Err(Error::LeadingZeroDigit)
        );
        assert_eq!(DigitString::new(vec![], g10), Err(Error::EmptyDigits));
    }

    #[test]
    fn is_palindrome_examples() {
        assert!(is_palindrome(1221, base(10)).unwrap());
        assert!(!is_palindrome(123, base(10)).unwrap());
        assert!(is_palindrome(5, base(2)).unwrap());
        assert_eq!(is_palindrome(0, base(10)), Err(Error::ZeroValue));
    }

    #[test]
    fn make_palindrome_examples() {
        assert_eq!(make_palindrome(&[7, 3], 3, base(10)).unwrap(), 737);
        assert_eq!(make_palindrome(&[1, 0], 4, base(2)).unwrap(), 9);
        assert_eq!(make_palindrome(&[1], 1, base(10)).unwrap(), 1);
        assert_eq!(
            make_palindrome(&[1], 3, base(10)),
            Err(Error::FreeDigitCount {
                expected: 2,
                length: 3,
                got: 1
            })
        );
        assert_eq!(
            make_palindrome(&[0, 1], 3, base(10)),
            Err(Error::LeadingZeroDigit)
        );
    }

    #[test]
    fn rank_unrank_examples() {
        assert_eq!(palindrome_at(0, 3, base(10)).unwrap(), 101);
        assert_eq!(palindrome_at(89, 3, base(10)).unwrap(), 999);
        assert_eq!(palindrome_at(1, 3, base(2)).unwrap(), 7);
        assert!(matches!(
            palindrome_at(90, 3, base(10)),
            Err(Error::RankOutOfRange { .. })
        ));
        assert_eq!(rank_of(101, 3, base(10)).unwrap(), 0);
        assert_eq!(rank_of(999, 3, base(10)).unwrap(), 89);
        assert_eq!(rank_of(7, 3, base(2)).unwrap(), 1);
        assert!(matches!(
            rank_of(123, 3, base(10)),
            Err(Error::NotAPalindrome { .. })
        ));
        // right value, wrong length
        assert!(matches!(
            rank_of(101, 5, base(10)),
            Err(Error::NotAPalindrome { .. })
        ));
    }

    #[test]
    fn palindrome_type_checks_invariants() {
        let p = Palindrome::new(737, base(10)).unwrap();
        assert_eq!(p.value(), 737);
        assert_eq!(p.length(), 3);
        assert!(Palindrome::new(123, base(10)).is_err());
    }

    #[test]
    fn enumeration_is_increasing_and_bijective() {
        for &(length, g) in &[
            (1u32, 2u64),
            (3, 2),
            (4, 2),
            (5, 3),
            (3, 10),
            (4, 10),
            (6, 5),
        ] {
            let g = base(g);
            let count = free_space_size(length, g).unwrap();
            let all: Vec<Natural> = Palindromes::new(length, g).unwrap().collect();
            assert_eq!(all.len() as u128, count);
            for (rank, &v) in all.iter().enumerate() {
                assert_eq!(palindrome_at(rank as u128, length, g).unwrap(), v);
                assert_eq!(rank_of(v, length, g).unwrap(), rank as u128);
                assert!(is_palindrome(v, g).unwrap());
                assert_eq!(to_digits(v, g).unwrap().len() as u32, length);
            }
            assert!(all.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn range_matches_full_enumeration() {
        let g = base(3);
        let all: Vec<Natural> = Palindromes::new(5, g).unwrap().collect();
        let count = all.len() as u128;
        let mid = count / 2;
        let left: Vec<Natural> = Palindromes::range(5, g, 0, mid).unwrap().collect();
        let right: Vec<Natural> = Palindromes::range(5, g, mid, count).unwrap().collect();
        assert_eq!([left, right].concat(), all);
        let empty: Vec<Natural> = Palindromes::range(5, g, mid, mid).unwrap().collect();
        assert!(empty.is_empty());
    }

    #[test]
    fn even_length_palindromes_divisible_by_g_plus_1() {
        for &(length, g) in &[(2u32, 10u64), (4, 10), (2, 2), (6, 2), (4, 3)] {
            let g = base(g);
            for v in Palindromes::new(length, g).unwrap() {
                assert_eq!(v % (g.get() as u128 + 1), 0, "{v} in base {g}");
            }
        }
    }

    proptest! {
        #[test]
        fn digits_round_trip(n in 1u128..=u128::MAX, gi in prop::sample::select(vec![2u64, 3, 5, 10])) {
            let g = base(gi);
            let ds = to_digits(n, g).unwrap();
            prop_assert_eq!(from_digits(&ds, g).unwrap(), n);
            prop_assert!(*ds.digits().last().unwrap() > 0);
        }

        #[test]
        fn unrank_rank_round_trip(
            length in 1u32..16,
            gi in prop::sample::select(vec![2u64, 3, 5, 10]),
            seed in 0u64..1_000_000,
        ) {
            let g = base(gi);
            let count = free_space_size(length, g).unwrap();
            let rank = seed as u128 % count;
            let v = palindrome_at(rank, length, g).unwrap();
            prop_assert_eq!(rank_of(v, length, g).unwrap(), rank);
            prop_assert!(is_palindrome(v, g).unwrap());
        }

        #[test]
        fn make_palindrome_output_is_palindromic(
            length in 1u32..20,
            gi in prop::sample::select(vec![2u64, 3, 10]),
            seed in 0u64..u64::MAX,
        ) {
            let g = base(gi);
            let h = free_len(length) as usize;
            let mut free: Vec<u64> = Vec::with_capacity(h);
            let mut s = seed;
            for j in 0..h {
                let lo = if j == 0 { 1 } else { 0 };
                free.push(lo + s % (gi - lo));
                s = s.rotate_right(7).wrapping_mul(0x9e37_79b9_7f4a_7c15);
            }
            let v = make_palindrome(&free, length, g).unwrap();
            prop_assert!(is_palindrome(v, g).unwrap());
            prop_assert_eq!(to_digits(v, g).unwrap().len(), length as usize);
        }
    }
}
