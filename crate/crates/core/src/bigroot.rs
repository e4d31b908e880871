//! Exact integer n-th roots and fractional decimal digits of `p^(1/r)`.
//!
//! Everything here is integer arithmetic on [`BigUint`]; no floating-point
//! value ever decides a digit.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::primes::is_prime;

/// A contiguous run of fractional decimal digits of a root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitBlock {
    digits: Vec<u8>,
    offset: usize,
}

impl DigitBlock {
    /// `offset` is the 1-based position of `digits[0]` in the fractional expansion.
    pub fn new(digits: Vec<u8>, offset: usize) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::invalid("digit block must not be empty"));
        }
        if offset == 0 {
            return Err(Error::invalid("digit block offset is 1-based"));
        }
        if let Some(d) = digits.iter().find(|&&d| d > 9) {
            return Err(Error::invalid(format!("{d} is not a decimal digit")));
        }
        Ok(DigitBlock { digits, offset })
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// 1-based index of the last digit held.
    pub fn last_index(&self) -> usize {
        self.offset + self.digits.len() - 1
    }

    pub fn into_digits(self) -> Vec<u8> {
        self.digits
    }
}

/// Floor of the `r`-th root: the unique `t` with `t^r <= x < (t+1)^r`.
pub fn int_nth_root(x: &BigUint, r: u32) -> Result<BigUint> {
    if r == 0 {
        return Err(Error::invalid("root degree must be at least 1"));
    }
    Ok(floor_root(x, r))
}

/// Signed front end to [`int_nth_root`]; negative radicands are rejected.
pub fn int_nth_root_signed(x: &BigInt, r: u32) -> Result<BigInt> {
    if x.sign() == Sign::Minus {
        return Err(Error::invalid("radicand must be non-negative"));
    }
    let root = int_nth_root(x.magnitude(), r)?;
    Ok(BigInt::from(root))
}

fn floor_root(x: &BigUint, r: u32) -> BigUint {
    if r == 1 || x.is_zero() {
        return x.clone();
    }
    let bits = x.bits();
    // 1 <= x < 2^r
    if bits <= u64::from(r) {
        return BigUint::one();
    }
    if let Some(small) = x.to_u64() {
        return BigUint::from(small_floor_root(small, r));
    }

    // Solve the top half of the root's bits recursively, then let Newton
    // recover the bottom half. Each level costs a constant number of
    // full-width steps, so the whole thing is a small multiple of one step.
    let root_bits = bits.div_ceil(u64::from(r));
    let shift = root_bits / 2;
    let head = floor_root(&(x >> (shift * u64::from(r))), r);
    let start = head << shift;
    refine(x, r, start)
}

fn small_floor_root(x: u64, r: u32) -> u64 {
    let bits = 64 - x.leading_zeros();
    // 2^ceil(bits/r) is an upper bound for the root.
    let mut y: u128 = 1 << bits.div_ceil(r);
    let x = u128::from(x);
    let r128 = u128::from(r);
    loop {
        let denom = y.pow(r - 1);
        let next = ((r128 - 1) * y + x / denom) / r128;
        if next >= y {
            break;
        }
        y = next;
    }
    y as u64
}

/// One integer Newton step for `t^r - x`; `y` must be positive.
fn newton_step(x: &BigUint, r: u32, y: &BigUint) -> BigUint {
    let denom = Pow::pow(y, r - 1);
    (y * (r - 1) + x / denom) / r
}

fn refine(x: &BigUint, r: u32, start: BigUint) -> BigUint {
    let start = if start.is_zero() { BigUint::one() } else { start };
    // By AM-GM a single step from any positive guess lands at or above the
    // floor root; from there the iteration decreases strictly until it
    // reaches it.
    let mut y = newton_step(x, r, &start);
    loop {
        let next = newton_step(x, r, &y);
        if next >= y {
            break;
        }
        y = next;
    }
    while Pow::pow(&y, r) > *x {
        y -= 1u32;
    }
    loop {
        let up = &y + 1u32;
        if Pow::pow(&up, r) > *x {
            break;
        }
        y = up;
    }
    y
}

fn check_root_args(p: u64, r: u32, first: usize, count: usize) -> Result<()> {
    if p < 2 || !is_prime(p) {
        return Err(Error::invalid(format!("radicand {p} is not a prime")));
    }
    if r < 2 || !is_prime(u64::from(r)) {
        return Err(Error::invalid(format!("root degree {r} is not a prime")));
    }
    if first == 0 {
        return Err(Error::invalid("digit positions are 1-based"));
    }
    if count == 0 {
        return Err(Error::invalid("digit count must be at least 1"));
    }
    Ok(())
}

/// The first `places` fractional digits of `p^(1/r)`, leading zeros kept.
fn fractional_expansion(p: u64, r: u32, places: usize) -> Vec<u8> {
    let exponent = (places as u64)
        .checked_mul(u64::from(r))
        .expect("precision too large for a decimal scale");
    let scaled = BigUint::from(p) * Pow::pow(&BigUint::from(10u32), exponent);
    let root = floor_root(&scaled, r);
    let text = root.to_str_radix(10);
    let bytes = text.as_bytes();
    let mut out = Vec::with_capacity(places);
    if bytes.len() < places {
        out.resize(places - bytes.len(), 0);
    }
    let tail = &bytes[bytes.len().saturating_sub(places)..];
    out.extend(tail.iter().map(|b| b - b'0'));
    out
}

/// Digits `first ..= first + count - 1` of the fractional part of `p^(1/r)`.
pub fn root_fractional_digits(p: u64, r: u32, first: usize, count: usize) -> Result<DigitBlock> {
    check_root_args(p, r, first, count)?;
    let places = first + count - 1;
    let mut digits = fractional_expansion(p, r, places);
    digits.drain(..first - 1);
    DigitBlock::new(digits, first)
}

#[derive(Default)]
struct CacheInner {
    entries: HashMap<(u64, u32), Arc<[u8]>>,
    order: VecDeque<(u64, u32)>,
}

/// Keeps the widest expansion computed so far for each `(p, r)`.
///
/// Requests within an already-computed width are served by slicing; wider
/// requests recompute once at the new width and replace the entry. The
/// cache is shared behind a mutex; the root itself is computed outside the
/// lock so concurrent workers never serialize on the arithmetic.
pub struct RootCache {
    ceiling: usize,
    capacity: usize,
    inner: Mutex<CacheInner>,
}

impl RootCache {
    /// `ceiling` bounds the last digit index any request may reach;
    /// `capacity` bounds the number of retained roots (oldest evicted first).
    pub fn new(ceiling: usize, capacity: usize) -> Self {
        RootCache {
            ceiling,
            capacity,
            inner: Mutex::new(CacheInner::default()),
        }
    }

    pub fn ceiling(&self) -> usize {
        self.ceiling
    }

    pub fn len(&self) -> usize {
        self.inner.lock().unwrap().entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Widest cached expansion for `(p, r)`, if any.
    pub fn cached_width(&self, p: u64, r: u32) -> Option<usize> {
        let inner = self.inner.lock().unwrap();
        inner.entries.get(&(p, r)).map(|d| d.len())
    }

    pub fn fractional_digits(
        &self,
        p: u64,
        r: u32,
        first: usize,
        count: usize,
    ) -> Result<DigitBlock> {
        check_root_args(p, r, first, count)?;
        let places = first + count - 1;
        if places > self.ceiling {
            return Err(Error::invalid(format!(
                "digit {places} requested beyond precision ceiling {}",
                self.ceiling
            )));
        }
        let expansion = self.expansion(p, r, places);
        DigitBlock::new(expansion[first - 1..places].to_vec(), first)
    }

    fn expansion(&self, p: u64, r: u32, places: usize) -> Arc<[u8]> {
        {
            let inner = self.inner.lock().unwrap();
            if let Some(d) = inner.entries.get(&(p, r)) {
                if d.len() >= places {
                    return Arc::clone(d);
                }
            }
        }
        let computed: Arc<[u8]> = fractional_expansion(p, r, places).into();
        if self.capacity == 0 {
            return computed;
        }
        let mut inner = self.inner.lock().unwrap();
        let key = (p, r);
        match inner.entries.get(&key) {
            // Another worker got here first with something at least as wide.
            Some(d) if d.len() >= places => return Arc::clone(d),
            Some(_) => {}
            None => {
                while inner.entries.len() >= self.capacity {
                    match inner.order.pop_front() {
                        Some(old) => {
                            inner.entries.remove(&old);
                        }
                        None => break,
                    }
                }
                inner.order.push_back(key);
            }
        }
        inner.entries.insert(key, Arc::clone(&computed));
        computed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(s: &str) -> BigUint {
        s.parse().unwrap()
    }

    fn is_floor_root(t: &BigUint, x: &BigUint, r: u32) -> bool {
        Pow::pow(t, r) <= *x && Pow::pow(&(t + 1u32), r) > *x
    }

    #[test]
    fn exact_and_near_cubes() {
        assert_eq!(int_nth_root(&BigUint::from(27u32), 3).unwrap(), BigUint::from(3u32));
        assert_eq!(int_nth_root(&BigUint::from(28u32), 3).unwrap(), BigUint::from(3u32));
        assert_eq!(int_nth_root(&BigUint::from(26u32), 3).unwrap(), BigUint::from(2u32));
    }

    #[test]
    fn sqrt_of_two_times_ten_to_twenty() {
        let x = BigUint::from(2u32) * Pow::pow(&BigUint::from(10u32), 20u32);
        let t = big("14142135623");
        // oracle: direct multiplication
        assert!(&t * &t <= x);
        assert!((&t + 1u32) * (&t + 1u32) > x);
        assert_eq!(int_nth_root(&x, 2).unwrap(), t);
    }

    #[test]
    fn degenerate_degrees_and_radicands() {
        assert!(int_nth_root(&BigUint::from(5u32), 0).is_err());
        assert_eq!(int_nth_root(&BigUint::zero(), 7).unwrap(), BigUint::zero());
        assert_eq!(int_nth_root(&BigUint::one(), 7).unwrap(), BigUint::one());
        let x = big("123456789012345678901234567890");
        assert_eq!(int_nth_root(&x, 1).unwrap(), x);
        assert_eq!(int_nth_root(&big("123456789"), 10).unwrap(), BigUint::from(6u32));
        assert!(int_nth_root_signed(&BigInt::from(-8), 3).is_err());
        assert_eq!(int_nth_root_signed(&BigInt::from(64), 3).unwrap(), BigInt::from(4));
    }

    #[test]
    fn exact_powers_near_word_boundaries() {
        for r in [2u32, 3, 5, 7] {
            for base in [3u64, 255, 65_535, 4_294_967_291, u64::MAX] {
                let b = BigUint::from(base);
                let x = Pow::pow(&b, r);
                assert_eq!(int_nth_root(&x, r).unwrap(), b);
                assert_eq!(int_nth_root(&(&x - 1u32), r).unwrap(), &b - 1u32);
                assert_eq!(int_nth_root(&(&x + 1u32), r).unwrap(), b);
            }
        }
    }

    #[test]
    fn worked_example_digits() {
        let five = root_fractional_digits(5, 3, 51, 3).unwrap();
        let seventeen = root_fractional_digits(17, 3, 51, 3).unwrap();
        assert_eq!(five.digits(), &[4, 9, 2]);
        assert_eq!(seventeen.digits(), &[6, 2, 5]);
        assert_eq!(five.offset(), 51);
    }

    #[test]
    fn leading_fraction_digits_of_cube_root_of_five() {
        // oracle: T = floor((5 * 10^9)^(1/3)) checked by direct cubing
        let x = BigUint::from(5_000_000_000u64);
        let t = BigUint::from(1709u32);
        assert!(is_floor_root(&t, &x, 3));
        let block = root_fractional_digits(5, 3, 1, 3).unwrap();
        assert_eq!(block.digits(), &[7, 0, 9]);
    }

    #[test]
    fn leading_zeros_are_kept() {
        // sqrt(101) = 10.04987562112089...
        let block = root_fractional_digits(101, 2, 1, 4).unwrap();
        assert_eq!(block.digits(), &[0, 4, 9, 8]);
    }

    #[test]
    fn rejects_non_prime_arguments() {
        assert!(root_fractional_digits(4, 3, 1, 3).is_err());
        assert!(root_fractional_digits(5, 4, 1, 3).is_err());
        assert!(root_fractional_digits(5, 1, 1, 3).is_err());
        assert!(root_fractional_digits(5, 3, 0, 3).is_err());
        assert!(root_fractional_digits(5, 3, 1, 0).is_err());
    }

    #[test]
    fn digit_block_invariants() {
        assert!(DigitBlock::new(vec![], 1).is_err());
        assert!(DigitBlock::new(vec![1], 0).is_err());
        assert!(DigitBlock::new(vec![1, 10], 1).is_err());
        let b = DigitBlock::new(vec![3, 1, 4], 7).unwrap();
        assert_eq!(b.last_index(), 9);
    }

    #[test]
    fn cache_widens_and_respects_ceiling() {
        let cache = RootCache::new(200, 4);
        let narrow = cache.fractional_digits(7, 5, 51, 10).unwrap();
        assert_eq!(cache.cached_width(7, 5), Some(60));
        let wide = cache.fractional_digits(7, 5, 41, 160).unwrap();
        assert_eq!(cache.cached_width(7, 5), Some(200));
        assert_eq!(&wide.digits()[10..20], narrow.digits());
        // served from the wide entry without shrinking it
        cache.fractional_digits(7, 5, 1, 5).unwrap();
        assert_eq!(cache.cached_width(7, 5), Some(200));
        assert!(cache.fractional_digits(7, 5, 150, 52).is_err());
        assert_eq!(
            cache.fractional_digits(7, 5, 51, 10).unwrap(),
            root_fractional_digits(7, 5, 51, 10).unwrap()
        );
    }

    #[test]
    fn cache_evicts_oldest() {
        let cache = RootCache::new(100, 2);
        for p in [2u64, 3, 5] {
            cache.fractional_digits(p, 2, 1, 10).unwrap();
        }
        assert_eq!(cache.len(), 2);
        assert_eq!(cache.cached_width(2, 2), None);
        assert_eq!(cache.cached_width(5, 2), Some(10));
    }

    fn arb_big(max_digits: usize) -> impl Strategy<Value = BigUint> {
        proptest::collection::vec(0u8..10, 1..=max_digits).prop_map(|ds| {
            ds.iter()
                .fold(BigUint::zero(), |acc, &d| acc * 10u32 + d)
        })
    }

    proptest! {
        #[test]
        fn floor_root_brackets(x in arb_big(200), r in prop::sample::select(vec![2u32, 3, 5, 7])) {
            let t = int_nth_root(&x, r).unwrap();
            prop_assert!(is_floor_root(&t, &x, r));
        }

        #[test]
        fn root_is_monotone(a in arb_big(60), b in arb_big(60), r in 1u32..12) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(int_nth_root(&lo, r).unwrap() <= int_nth_root(&hi, r).unwrap());
        }

        #[test]
        fn windows_concatenate(
            p in prop::sample::select(vec![2u64, 3, 5, 17, 101, 7919]),
            r in prop::sample::select(vec![2u32, 3, 5, 7]),
            a in 1usize..80,
            n in 1usize..40,
            m in 1usize..40,
        ) {
            let left = root_fractional_digits(p, r, a, n).unwrap();
            let right = root_fractional_digits(p, r, a + n, m).unwrap();
            let whole = root_fractional_digits(p, r, a, n + m).unwrap();
            let mut joined = left.digits().to_vec();
            joined.extend_from_slice(right.digits());
            prop_assert_eq!(joined, whole.digits().to_vec());
        }

        #[test]
        fn prime_roots_are_never_exact(
            p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 104_729]),
            r in prop::sample::select(vec![2u32, 3, 5, 7]),
            d in 1u32..60,
        ) {
            let x = BigUint::from(p) * Pow::pow(&BigUint::from(10u32), r * d);
            let t = int_nth_root(&x, r).unwrap();
            prop_assert!(Pow::pow(&t, r) != x);
        }
    }
}
