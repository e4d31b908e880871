use crate::bitgen::{default_workers, GeneratorConfig, MrngStream};
use crate::error::{Error, Result};
use crate::Real;

/// Ones-count histogram of equal-length strings against the fair-coin
/// binomial, with the share of strings inside `mu +/- k sigma`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionSummary<F> {
    /// `histogram[n]` = number of strings with exactly `n` ones.
    pub histogram: Vec<u64>,
    pub ls: usize,
    pub mu: F,
    pub sigma: F,
    pub within_1s: F,
    pub within_2s: F,
    pub within_3s: F,
}

impl<F: Real> DistributionSummary<F> {
    pub fn strings(&self) -> u64 {
        self.histogram.iter().sum()
    }

    /// Percentage for `k` in 1..=3.
    pub fn within(&self, k: u32) -> Option<F> {
        match k {
            1 => Some(self.within_1s),
            2 => Some(self.within_2s),
            3 => Some(self.within_3s),
            _ => None,
        }
    }
}

/// Percentage of strings whose ones count `n` satisfies `|n - ls/2| <= k sqrt(ls)/2`.
///
/// Decided in integers as `(2n - ls)^2 <= k^2 ls`, so boundary cases never
/// depend on rounding.
fn share_within<F: Real>(histogram: &[u64], ls: usize, k: u64, strings: u64) -> F {
    let bound = k * k * ls as u64;
    let inside: u64 = histogram
        .iter()
        .enumerate()
        .filter(|&(n, _)| {
            let d = (2 * n as i64 - ls as i64).unsigned_abs();
            d * d <= bound
        })
        .map(|(_, &c)| c)
        .sum();
    F::from_f64(100.0).unwrap() * F::from_u64(inside).unwrap() / F::from_u64(strings).unwrap()
}

/// Summary over `n_strings` consecutive strings of `ls` bits taken from `bits`.
pub fn ones_count_summary<F: Real>(
    bits: &[u8],
    n_strings: usize,
    ls: usize,
) -> Result<DistributionSummary<F>> {
    if n_strings == 0 || ls == 0 {
        return Err(Error::invalid("need at least one string of at least one bit"));
    }
    let needed = n_strings
        .checked_mul(ls)
        .ok_or_else(|| Error::invalid("distribution size overflows"))?;
    if bits.len() < needed {
        return Err(Error::invalid(format!(
            "{} bits supplied, {needed} needed",
            bits.len()
        )));
    }
    let mut histogram = vec![0u64; ls + 1];
    for s in bits[..needed].chunks_exact(ls) {
        let ones = s.iter().filter(|&&b| b == 1).count();
        histogram[ones] += 1;
    }
    let strings = n_strings as u64;
    let lsf = F::from_usize(ls).unwrap();
    let half = F::from_f64(0.5).unwrap();
    Ok(DistributionSummary {
        mu: lsf * half,
        sigma: lsf.sqrt() * half,
        within_1s: share_within(&histogram, ls, 1, strings),
        within_2s: share_within(&histogram, ls, 2, strings),
        within_3s: share_within(&histogram, ls, 3, strings),
        histogram,
        ls,
    })
}

pub fn ones_count_distribution<F: Real>(
    config: &GeneratorConfig,
    n_strings: usize,
    ls: usize,
) -> Result<DistributionSummary<F>> {
    let mut stream = MrngStream::new(*config)?.with_workers(default_workers());
    let bits = stream.take_bits(n_strings.saturating_mul(ls));
    ones_count_summary(bits.as_slice(), n_strings, ls)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact binomial(ls, 1/2) mass inside mu +/- k sigma, via log-space terms.
    fn binomial_within(ls: usize, k: f64) -> f64 {
        let mu = ls as f64 / 2.0;
        let sigma = (ls as f64).sqrt() / 2.0;
        let mut ln_fact = vec![0.0f64; ls + 1];
        for i in 1..=ls {
            ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
        }
        (0..=ls)
            .filter(|&n| (n as f64 - mu).abs() <= k * sigma)
            .map(|n| (ln_fact[ls] - ln_fact[n] - ln_fact[ls - n] - ls as f64 * 2f64.ln()).exp())
            .sum::<f64>()
            * 100.0
    }

    #[test]
    fn balanced_pair_is_inside_every_band() {
        let s: DistributionSummary<f64> = ones_count_summary(&[0, 1], 1, 2).unwrap();
        assert_eq!(s.histogram, vec![0, 1, 0]);
        assert_eq!(s.mu, 1.0);
        assert_eq!((s.within_1s, s.within_2s, s.within_3s), (100.0, 100.0, 100.0));
        assert_eq!(s.strings(), 1);
    }

    #[test]
    fn constant_strings_are_all_or_nothing() {
        let ones = vec![1u8; 1000 * 20];
        let s: DistributionSummary<f64> = ones_count_summary(&ones, 20, 1000).unwrap();
        assert_eq!(s.within_1s, 0.0);
        assert_eq!(s.within_3s, 0.0);
        // ls = 4, all ones: |4 - 2| = 2 = 2 sigma, so outside 1s and inside 2s
        let s: DistributionSummary<f64> = ones_count_summary(&[1, 1, 1, 1], 1, 4).unwrap();
        assert_eq!((s.within_1s, s.within_2s), (0.0, 100.0));
    }

    #[test]
    fn band_shares_match_binomial_oracle() {
        // Feed the exact binomial(1000, 1/2) shape in as a histogram.
        let ls = 1000usize;
        let scale = 1e12;
        let mut ln_fact = vec![0.0f64; ls + 1];
        for i in 1..=ls {
            ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
        }
        let hist: Vec<u64> = (0..=ls)
            .map(|n| {
                let p = (ln_fact[ls] - ln_fact[n] - ln_fact[ls - n] - ls as f64 * 2f64.ln()).exp();
                (p * scale).round() as u64
            })
            .collect();
        let strings: u64 = hist.iter().sum();
        for k in 1..=3u64 {
            let got: f64 = share_within(&hist, ls, k, strings);
            let want = binomial_within(ls, k as f64);
            assert!((got - want).abs() < 1e-6, "k = {k}: {got} vs {want}");
        }
        // closed bands on integer counts: 67.31 / 95.37 / 99.74 at ls = 1000
        assert!((binomial_within(ls, 1.0) - 67.306).abs() < 1e-3);
        assert!((binomial_within(ls, 2.0) - 95.371).abs() < 1e-3);
        assert!((binomial_within(ls, 3.0) - 99.735).abs() < 1e-3);
    }

    #[test]
    fn bands_are_nested() {
        let bits: Vec<u8> = (0..50u32 * 100).map(|i| (i.wrapping_mul(2_654_435_761) >> 31) as u8).collect();
        let s: DistributionSummary<f64> = ones_count_summary(&bits, 50, 100).unwrap();
        assert!(s.within_1s <= s.within_2s && s.within_2s <= s.within_3s && s.within_3s <= 100.0);
        assert_eq!(s.histogram.iter().sum::<u64>(), 50);
    }

    #[test]
    fn argument_errors() {
        assert!(ones_count_summary::<f64>(&[0, 1], 0, 2).is_err());
        assert!(ones_count_summary::<f64>(&[0, 1], 1, 0).is_err());
        assert!(ones_count_summary::<f64>(&[0, 1], 2, 2).is_err());
    }
}
