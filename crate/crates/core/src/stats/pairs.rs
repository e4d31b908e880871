use crate::bitgen::{default_workers, GeneratorConfig, MrngStream};
use crate::error::{Error, Result};
use crate::Real;

/// Counts of ordered digit pairs `(i, j)` as fed to the comparison.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairTally {
    counts: [[u64; 10]; 10],
    total: u64,
}

impl PairTally {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, i: u8, j: u8) -> Result<()> {
        if i > 9 || j > 9 {
            return Err(Error::invalid(format!("({i}, {j}) is not a digit pair")));
        }
        self.counts[usize::from(i)][usize::from(j)] += 1;
        self.total += 1;
        Ok(())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u8, u8)>) -> Result<Self> {
        let mut t = PairTally::new();
        for (i, j) in pairs {
            t.record(i, j)?;
        }
        Ok(t)
    }

    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i][j]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn frequency<F: Real>(&self, i: usize, j: usize) -> F {
        if self.total == 0 {
            return F::zero();
        }
        F::from_u64(self.counts[i][j]).unwrap() / F::from_u64(self.total).unwrap()
    }

    /// `f(i, j)` rounded to five decimal places.
    pub fn rounded_frequency<F: Real>(&self, i: usize, j: usize) -> F {
        let scale = F::from_f64(1e5).unwrap();
        (self.frequency::<F>(i, j) * scale).round() / scale
    }

    /// Largest `|f(i, j) - f(j, i)|` over `i != j`.
    pub fn max_asymmetry<F: Real>(&self) -> F {
        let mut worst = F::zero();
        for i in 0..10 {
            for j in (i + 1)..10 {
                worst = worst.max((self.frequency::<F>(i, j) - self.frequency::<F>(j, i)).abs());
            }
        }
        worst
    }

    pub fn merge(&mut self, other: &PairTally) {
        for i in 0..10 {
            for j in 0..10 {
                self.counts[i][j] += other.counts[i][j];
            }
        }
        self.total += other.total;
    }
}

/// Tally of the first `n_pairs` digit pairs of the stream for `config`.
pub fn pair_frequency_table(config: &GeneratorConfig, n_pairs: usize) -> Result<PairTally> {
    if n_pairs == 0 {
        return Err(Error::invalid("pair table needs at least one pair"));
    }
    let mut stream = MrngStream::new(*config)?.with_workers(default_workers());
    let mut tally = PairTally::new();
    for _ in 0..n_pairs {
        match stream.next_pair() {
            Some((i, j)) => tally.record(i, j)?,
            None => break,
        }
    }
    Ok(tally)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_frequencies() {
        let t = PairTally::from_pairs([(0, 1), (1, 0), (0, 1), (9, 9)]).unwrap();
        assert_eq!(t.total(), 4);
        assert_eq!(t.count(0, 1), 2);
        assert_eq!(t.frequency::<f64>(0, 1), 0.5);
        assert_eq!(t.max_asymmetry::<f64>(), 0.25);
        assert!(PairTally::from_pairs([(10, 1)]).is_err());
        assert_eq!(PairTally::new().frequency::<f64>(3, 3), 0.0);
    }

    #[test]
    fn rounding_to_five_places() {
        let mut t = PairTally::new();
        for _ in 0..1 {
            t.record(2, 3).unwrap();
        }
        for _ in 0..29_999 {
            t.record(4, 4).unwrap();
        }
        // 1/30000 = 0.0000333.. -> 0.00003
        assert_eq!(t.rounded_frequency::<f64>(2, 3), 0.00003);
    }

    #[test]
    fn frequencies_partition_the_total() {
        let config = GeneratorConfig {
            n_pairs: 3,
            rounds: 2,
            precision_digits: 1050,
            skip_digits: 50,
            block_index: 0,
        };
        let t = pair_frequency_table(&config, 5000).unwrap();
        assert_eq!(t.total(), 5000);
        let sum: f64 = (0..10).flat_map(|i| (0..10).map(move |j| (i, j))).map(|(i, j)| t.frequency::<f64>(i, j)).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        let rounded: f64 = (0..10).flat_map(|i| (0..10).map(move |j| (i, j))).map(|(i, j)| t.rounded_frequency::<f64>(i, j)).sum();
        assert!((rounded - 1.0).abs() <= 100.0 * 0.5e-5 + 1e-12);
    }

    #[test]
    fn merge_adds_counts() {
        let mut a = PairTally::from_pairs([(1, 2)]).unwrap();
        let b = PairTally::from_pairs([(1, 2), (3, 4)]).unwrap();
        a.merge(&b);
        assert_eq!(a.count(1, 2), 2);
        assert_eq!(a.total(), 3);
    }
}
