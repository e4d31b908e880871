//! The generator proper: paired prime roots, digit comparison, the
//! rotation schedule over `C2`, and the base-10 rejection mapping.
//!
//! For round `j` (root degree = the `j`-th prime) and pair `i`, the left
//! operand is `c1[i]` and the right operand is the element of `c2` sitting
//! at place `i` after `j` cumulative one-place rotations. Each entry
//! contributes the comparison bits of the full digit window
//! `skip+1 ..= precision` of both roots. Entries are concatenated in
//! `(j, i)` order; when a block's schedule runs out the next block of
//! primes takes over.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::bigroot::{root_fractional_digits, DigitBlock, RootCache};
use crate::error::{Error, Result};
use crate::primes::{first_n_primes, prime_pair_sets, PrimePairSets};

pub const MIN_SKIP_DIGITS: usize = 40;
pub const MAX_SKIP_DIGITS: usize = 100;

/// Every parameter that determines the output stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorConfig {
    /// Size of each prime set `C1` and `C2`.
    pub n_pairs: usize,
    /// Number of permutation rounds; round `j` uses the `j`-th prime as root degree.
    pub rounds: usize,
    /// Fractional digits computed per root.
    pub precision_digits: usize,
    /// Leading fractional digits discarded per root.
    pub skip_digits: usize,
    /// First prime block used (0 selects `C1`/`C2`, 1 selects `C1'`/`C2'`, ...).
    pub block_index: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig::desk()
    }
}

impl GeneratorConfig {
    /// Reduced parameters that keep every structural property and run in minutes.
    pub const fn desk() -> Self {
        GeneratorConfig {
            n_pairs: 200,
            rounds: 4,
            precision_digits: 20_000,
            skip_digits: 50,
            block_index: 0,
        }
    }

    /// Full-size parameters: 10,000 pairs, 10,000 rounds, 100,000 digits per root.
    pub const fn paper_scale() -> Self {
        GeneratorConfig {
            n_pairs: 10_000,
            rounds: 10_000,
            precision_digits: 100_000,
            skip_digits: 50,
            block_index: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_pairs == 0 {
            return Err(Error::Config("n_pairs must be at least 1".into()));
        }
        if self.rounds == 0 {
            return Err(Error::Config("rounds must be at least 1".into()));
        }
        if !(MIN_SKIP_DIGITS..=MAX_SKIP_DIGITS).contains(&self.skip_digits) {
            return Err(Error::Config(format!(
                "skip_digits = {} is outside [{MIN_SKIP_DIGITS}, {MAX_SKIP_DIGITS}]",
                self.skip_digits
            )));
        }
        if self.skip_digits >= self.precision_digits {
            return Err(Error::Config(format!(
                "skip_digits = {} must be below precision_digits = {}",
                self.skip_digits, self.precision_digits
            )));
        }
        if self.rounds > self.n_pairs {
            return Err(Error::Config(format!(
                "rounds = {} exceeds n_pairs = {}; prime pairs would repeat",
                self.rounds, self.n_pairs
            )));
        }
        Ok(())
    }

    /// Digits compared per root: `precision - skip`.
    pub fn window(&self) -> usize {
        self.precision_digits - self.skip_digits
    }
}

/// An ordered sequence of bits, stored one per byte as 0 or 1.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitStream {
    bits: Vec<u8>,
}

impl BitStream {
    pub fn new() -> Self {
        BitStream { bits: Vec::new() }
    }

    pub fn with_capacity(n: usize) -> Self {
        BitStream {
            bits: Vec::with_capacity(n),
        }
    }

    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::invalid(format!("{b} is not a bit")));
        }
        Ok(BitStream { bits })
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(u8::from(bit));
    }

    pub fn extend_from(&mut self, other: &BitStream) {
        self.bits.extend_from_slice(&other.bits);
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn truncate(&mut self, len: usize) {
        self.bits.truncate(len);
    }

    /// MSB-first packing; the final byte is zero-padded.
    pub fn to_packed(&self) -> Vec<u8> {
        self.bits
            .chunks(8)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (k, &b)| acc | (b << (7 - k)))
            })
            .collect()
    }

    /// Inverse of [`BitStream::to_packed`] given the true bit length.
    pub fn from_packed(bytes: &[u8], len: usize) -> Result<Self> {
        if len > bytes.len() * 8 {
            return Err(Error::invalid(format!(
                "{len} bits do not fit in {} bytes",
                bytes.len()
            )));
        }
        let bits = (0..len)
            .map(|k| (bytes[k / 8] >> (7 - k % 8)) & 1)
            .collect();
        Ok(BitStream { bits })
    }
}

impl fmt::Display for BitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.bits.iter().map(|&b| char::from(b'0' + b)).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.len() <= 64 {
            write!(f, "BitStream({self})")
        } else {
            write!(f, "BitStream(len = {})", self.bits.len())
        }
    }
}

impl FromStr for BitStream {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::invalid(format!("{other:?} is not a bit"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(|bits| BitStream { bits })
    }
}

/// `a > b` yields 1, `a < b` yields 0, a tie yields nothing.
pub fn compare_digits(a: u8, b: u8) -> Option<bool> {
    match a.cmp(&b) {
        std::cmp::Ordering::Greater => Some(true),
        std::cmp::Ordering::Less => Some(false),
        std::cmp::Ordering::Equal => None,
    }
}

/// Position-wise comparison of two aligned digit blocks; ties emit nothing.
pub fn operator_o(left: &DigitBlock, right: &DigitBlock) -> Result<BitStream> {
    if left.len() != right.len() || left.offset() != right.offset() {
        return Err(Error::invalid(format!(
            "digit blocks are not aligned: {} digits at {} vs {} digits at {}",
            left.len(),
            left.offset(),
            right.len(),
            right.offset()
        )));
    }
    let mut out = BitStream::with_capacity(left.len());
    for (&a, &b) in left.digits().iter().zip(right.digits()) {
        if let Some(bit) = compare_digits(a, b) {
            out.push(bit);
        }
    }
    Ok(out)
}

pub fn concat(a: &BitStream, b: &BitStream) -> BitStream {
    let mut out = BitStream::with_capacity(a.len() + b.len());
    out.extend_from(a);
    out.extend_from(b);
    out
}

/// One `O(p_left^(1/d), p_right^(1/d))` term of the output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ScheduleEntry {
    /// 1-based round `j`.
    pub round: usize,
    /// 1-based position `i` within `C1`.
    pub pair: usize,
    pub root_degree: u32,
    pub left: u64,
    pub right: u64,
}

/// 0-based index into natural-order `c2` of the element at place `i`
/// (1-based) after `round` cumulative rotations.
pub fn partner_index(i: usize, round: usize, n: usize) -> usize {
    (i - 1 + n - round % n) % n
}

/// The `index`-th (0-based, `(j, i)` order) entry for explicit sets and degrees.
fn entry_at(sets: &PrimePairSets, degrees: &[u32], index: usize) -> ScheduleEntry {
    let n = sets.n();
    let (j, i) = (index / n + 1, index % n + 1);
    ScheduleEntry {
        round: j,
        pair: i,
        root_degree: degrees[j - 1],
        left: sets.c1[i - 1],
        right: sets.c2[partner_index(i, j, n)],
    }
}

/// Schedule for explicit prime sets and root degrees (one degree per round).
pub fn schedule_for_sets(sets: &PrimePairSets, degrees: &[u32]) -> Vec<ScheduleEntry> {
    (0..sets.n() * degrees.len())
        .map(|k| entry_at(sets, degrees, k))
        .collect()
}

fn round_degrees(rounds: usize) -> Vec<u32> {
    first_n_primes(rounds)
        .into_vec()
        .into_iter()
        .map(|p| u32::try_from(p).expect("root degree exceeds u32"))
        .collect()
}

/// The `(j, i)`-ordered schedule for `config.block_index`.
pub fn schedule(config: &GeneratorConfig) -> Result<Vec<ScheduleEntry>> {
    config.validate()?;
    let sets = prime_pair_sets(config.n_pairs, config.block_index);
    Ok(schedule_for_sets(&sets, &round_degrees(config.rounds)))
}

enum Plan {
    /// Entries are derived on demand; a full schedule has `n * rounds` of them.
    Blocks {
        config: GeneratorConfig,
        degrees: Vec<u32>,
        block: usize,
        sets: PrimePairSets,
        next: usize,
    },
    Fixed {
        entries: Vec<ScheduleEntry>,
        next: usize,
    },
}

impl Plan {
    fn take(&mut self, k: usize) -> Vec<ScheduleEntry> {
        match self {
            Plan::Blocks {
                config,
                degrees,
                block,
                sets,
                next,
            } => {
                let len = sets.n() * degrees.len();
                if *next == len {
                    *block += 1;
                    *sets = prime_pair_sets(config.n_pairs, *block);
                    *next = 0;
                }
                let end = (*next + k).min(len);
                let out = (*next..end).map(|x| entry_at(sets, degrees, x)).collect();
                *next = end;
                out
            }
            Plan::Fixed { entries, next } => {
                let end = (*next + k).min(entries.len());
                let out = entries[*next..end].to_vec();
                *next = end;
                out
            }
        }
    }
}

struct EntryDigits {
    left: Vec<u8>,
    right: Vec<u8>,
}

/// Incremental producer of the digit-pair stream and the bits derived from it.
///
/// Schedule entries are computed in batches; with more than one worker a
/// batch is spread over a rayon pool and collected back in schedule order,
/// so the stream is identical for any worker count.
pub struct MrngStream {
    first: usize,
    count: usize,
    plan: Plan,
    pool: Option<rayon::ThreadPool>,
    workers: usize,
    batch: usize,
    cache: Option<Arc<RootCache>>,
    pending: VecDeque<EntryDigits>,
    current: Option<EntryDigits>,
    cursor: usize,
    pairs_emitted: u64,
    entries_done: u64,
}

impl MrngStream {
    pub fn new(config: GeneratorConfig) -> Result<Self> {
        config.validate()?;
        let degrees = round_degrees(config.rounds);
        let sets = prime_pair_sets(config.n_pairs, config.block_index);
        Ok(Self::with_plan(
            Plan::Blocks {
                config,
                degrees,
                block: config.block_index,
                sets,
                next: 0,
            },
            config.skip_digits,
            config.precision_digits,
        ))
    }

    /// A stream over an explicit, finite list of entries (no block advance).
    pub fn from_entries(
        entries: Vec<ScheduleEntry>,
        skip_digits: usize,
        precision_digits: usize,
    ) -> Result<Self> {
        if skip_digits >= precision_digits {
            return Err(Error::Config(format!(
                "skip_digits = {skip_digits} must be below precision_digits = {precision_digits}"
            )));
        }
        Ok(Self::with_plan(
            Plan::Fixed { entries, next: 0 },
            skip_digits,
            precision_digits,
        ))
    }

    fn with_plan(plan: Plan, skip: usize, precision: usize) -> Self {
        MrngStream {
            first: skip + 1,
            count: precision - skip,
            plan,
            pool: None,
            workers: 1,
            batch: 1,
            cache: None,
            pending: VecDeque::new(),
            current: None,
            cursor: 0,
            pairs_emitted: 0,
            entries_done: 0,
        }
    }

    /// Spread root computation over `workers` threads (1 = run inline).
    pub fn with_workers(mut self, workers: usize) -> Self {
        let workers = workers.max(1);
        self.workers = workers;
        self.pool = if workers > 1 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .ok()
        } else {
            None
        };
        self
    }

    /// Serve root digits through a shared cache.
    pub fn with_cache(mut self, cache: Arc<RootCache>) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn pairs_emitted(&self) -> u64 {
        self.pairs_emitted
    }

    /// Schedule entries fully or partially consumed so far.
    pub fn entries_started(&self) -> u64 {
        self.entries_done
    }

    fn digits_for(&self, p: u64, degree: u32) -> Vec<u8> {
        let block = match &self.cache {
            Some(cache) => cache.fractional_digits(p, degree, self.first, self.count),
            None => root_fractional_digits(p, degree, self.first, self.count),
        };
        block
            .expect("schedule entries hold prime radicands and prime degrees")
            .into_digits()
    }

    fn compute(&self, entry: &ScheduleEntry) -> EntryDigits {
        EntryDigits {
            left: self.digits_for(entry.left, entry.root_degree),
            right: self.digits_for(entry.right, entry.root_degree),
        }
    }

    fn refill(&mut self) -> bool {
        let entries = self.plan.take(self.batch);
        if entries.is_empty() {
            return false;
        }
        // ramp up so short requests do not pay for a full batch
        self.batch = (self.batch * 2).min(2 * self.workers);
        let computed: Vec<EntryDigits> = match &self.pool {
            Some(pool) => pool.install(|| entries.par_iter().map(|e| self.compute(e)).collect()),
            None => entries.iter().map(|e| self.compute(e)).collect(),
        };
        self.pending.extend(computed);
        true
    }

    /// Next ordered digit pair `(left, right)`, ties included.
    pub fn next_pair(&mut self) -> Option<(u8, u8)> {
        loop {
            if let Some(cur) = &self.current {
                if self.cursor < cur.left.len() {
                    let pair = (cur.left[self.cursor], cur.right[self.cursor]);
                    self.cursor += 1;
                    self.pairs_emitted += 1;
                    return Some(pair);
                }
            }
            if self.pending.is_empty() && !self.refill() {
                self.current = None;
                return None;
            }
            self.current = self.pending.pop_front();
            self.entries_done += 1;
            self.cursor = 0;
        }
    }

    pub fn next_bit(&mut self) -> Option<bool> {
        while let Some((a, b)) = self.next_pair() {
            if let Some(bit) = compare_digits(a, b) {
                return Some(bit);
            }
        }
        None
    }

    /// Appends up to `n` bits; fewer only if a finite schedule runs dry.
    pub fn fill_bits(&mut self, out: &mut BitStream, n: usize) -> usize {
        let mut added = 0;
        while added < n {
            match self.next_bit() {
                Some(bit) => {
                    out.push(bit);
                    added += 1;
                }
                None => break,
            }
        }
        added
    }

    pub fn take_bits(&mut self, n: usize) -> BitStream {
        let mut out = BitStream::with_capacity(n);
        self.fill_bits(&mut out, n);
        out
    }

    pub fn take_pairs(&mut self, n: usize) -> Vec<(u8, u8)> {
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            match self.next_pair() {
                Some(p) => out.push(p),
                None => break,
            }
        }
        out
    }
}

impl Iterator for MrngStream {
    type Item = bool;

    fn next(&mut self) -> Option<bool> {
        self.next_bit()
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// The first `max_bits` bits of the stream for `config`.
pub fn generate_bits(config: &GeneratorConfig, max_bits: usize) -> Result<BitStream> {
    generate_bits_with_workers(config, max_bits, default_workers())
}

pub fn generate_bits_with_workers(
    config: &GeneratorConfig,
    max_bits: usize,
    workers: usize,
) -> Result<BitStream> {
    if max_bits == 0 {
        return Err(Error::invalid("max_bits must be at least 1"));
    }
    let mut stream = MrngStream::new(*config)?.with_workers(workers);
    Ok(stream.take_bits(max_bits))
}

/// The digit pairs fed to the comparison, ties included, in stream order.
pub fn pair_stream(config: &GeneratorConfig, max_pairs: usize) -> Result<Vec<(u8, u8)>> {
    let mut stream = MrngStream::new(*config)?.with_workers(default_workers());
    Ok(stream.take_pairs(max_pairs))
}

/// Non-overlapping MSB-first nibbles; values 10..=15 and a short tail are dropped.
pub fn bits_to_decimal(bits: &[u8]) -> Vec<u8> {
    bits.chunks_exact(4)
        .map(|g| g.iter().fold(0u8, |acc, &b| (acc << 1) | b))
        .filter(|&v| v <= 9)
        .collect()
}

/// Base-10 digits drawn from any bit source by nibble rejection.
pub struct DigitStream<I> {
    bits: I,
    bits_consumed: u64,
}

impl<I: Iterator<Item = bool>> DigitStream<I> {
    pub fn new(bits: I) -> Self {
        DigitStream {
            bits,
            bits_consumed: 0,
        }
    }

    pub fn bits_consumed(&self) -> u64 {
        self.bits_consumed
    }

    pub fn into_inner(self) -> I {
        self.bits
    }

    pub fn next_digit(&mut self) -> Option<u8> {
        loop {
            let mut v = 0u8;
            for _ in 0..4 {
                let bit = self.bits.next()?;
                self.bits_consumed += 1;
                v = (v << 1) | u8::from(bit);
            }
            if v <= 9 {
                return Some(v);
            }
        }
    }

    pub fn take_digits(&mut self, n: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            match self.next_digit() {
                Some(d) => out.push(d),
                None => break,
            }
        }
        out
    }
}
