//! Prime tables and the paired prime sets the generator draws from.

/// The first `n` primes in increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeTable {
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }

    /// Number of primes held.
    pub fn limit(&self) -> usize {
        self.primes.len()
    }

    /// The `k`-th prime, 1-based.
    pub fn nth(&self, k: usize) -> Option<u64> {
        k.checked_sub(1).and_then(|i| self.primes.get(i).copied())
    }

    pub fn last(&self) -> Option<u64> {
        self.primes.last().copied()
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.primes
    }
}

/// Deterministic primality by trial division with a 6k +/- 1 wheel.
pub fn is_prime(n: u64) -> bool {
    if n < 4 {
        return n >= 2;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d <= n / d {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Upper bound on the n-th prime: n(ln n + ln ln n) holds for n >= 6.
fn nth_prime_upper_bound(n: usize) -> u64 {
    if n < 6 {
        return 13;
    }
    let n = n as f64;
    (n * (n.ln() + n.ln().ln())).ceil() as u64 + 1
}

const SEGMENT: u64 = 1 << 15;

fn small_sieve(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Exactly the first `n` primes, by a segmented sieve of Eratosthenes.
pub fn first_n_primes(n: usize) -> PrimeTable {
    let mut primes = Vec::with_capacity(n);
    if n == 0 {
        return PrimeTable { primes };
    }
    let bound = nth_prime_upper_bound(n);
    let base = small_sieve((bound as f64).sqrt() as u64 + 1);

    let mut low = 2u64;
    let mut marks = vec![false; SEGMENT as usize];
    'segments: while low <= bound {
        let high = (low + SEGMENT).min(bound + 1);
        marks.iter_mut().for_each(|m| *m = false);
        for &p in &base {
            if p * p >= high {
                break;
            }
            let mut start = (low.div_ceil(p) * p).max(p * p);
            while start < high {
                marks[(start - low) as usize] = true;
                start += p;
            }
        }
        for v in low..high {
            if !marks[(v - low) as usize] {
                primes.push(v);
                if primes.len() == n {
                    break 'segments;
                }
            }
        }
        low = high;
    }
    assert_eq!(primes.len(), n, "prime bound too small for n = {n}");
    PrimeTable { primes }
}

/// The ordered prime sets for one block: `c1` fixed, `c2` in natural order
/// before any permutation is applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimePairSets {
    pub c1: Vec<u64>,
    pub c2: Vec<u64>,
    pub block_index: usize,
}

impl PrimePairSets {
    pub fn n(&self) -> usize {
        self.c1.len()
    }
}

/// Block `b` takes primes ranked `2bn+1 ..= 2bn+n` as `c1` and the next `n`
/// as `c2`.
pub fn prime_pair_sets(n: usize, block_index: usize) -> PrimePairSets {
    assert!(n >= 1, "prime sets need at least one element");
    let start = 2 * block_index * n;
    let table = first_n_primes(start + 2 * n).into_vec();
    PrimePairSets {
        c1: table[start..start + n].to_vec(),
        c2: table[start + n..start + 2 * n].to_vec(),
        block_index,
    }
}
