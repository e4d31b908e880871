//! Published full-scale results (10,000 x 10,000 pairs, 100,000 digits per
//! root) used as the comparison column in reproduction reports.

use crate::stats::TestSelector;

/// `f(i, j)` over 5 * 10^7 ordered digit pairs, five decimal places.
pub const PAIR_FREQUENCIES: [[f64; 10]; 10] = [
    [0.01000, 0.00999, 0.01000, 0.01001, 0.00998, 0.01000, 0.01000, 0.01000, 0.00995, 0.00998],
    [0.01001, 0.00999, 0.00996, 0.00999, 0.00998, 0.01001, 0.01000, 0.01002, 0.00999, 0.00999],
    [0.01001, 0.01001, 0.01001, 0.01001, 0.01001, 0.01000, 0.01002, 0.01001, 0.00998, 0.00997],
    [0.00998, 0.00998, 0.01000, 0.01000, 0.01002, 0.00999, 0.00999, 0.01000, 0.00997, 0.01000],
    [0.00999, 0.01001, 0.00998, 0.00999, 0.01002, 0.00999, 0.01002, 0.01000, 0.01002, 0.01001],
    [0.01000, 0.00998, 0.00997, 0.01002, 0.01000, 0.01000, 0.01000, 0.00999, 0.01001, 0.01000],
    [0.00999, 0.01000, 0.00999, 0.00999, 0.01002, 0.00999, 0.01000, 0.00998, 0.01000, 0.00999],
    [0.00996, 0.00999, 0.00998, 0.00997, 0.00996, 0.01001, 0.00999, 0.00999, 0.01000, 0.01002],
    [0.00998, 0.00999, 0.00996, 0.01000, 0.01000, 0.01000, 0.00999, 0.01000, 0.00999, 0.00999],
    [0.00999, 0.00999, 0.01003, 0.00998, 0.01000, 0.01000, 0.01000, 0.00999, 0.00999, 0.01000],
];

pub const PAIR_COUNT: u64 = 50_000_000;

/// Share of strings (percent) within 1, 2, 3 sigma: (normal curve, measured binomial).
pub const ONES_BANDS: [(f64, f64); 3] = [(68.26, 68.27), (95.44, 95.35), (99.74, 99.72)];

pub const ONES_STRINGS: usize = 100_000;
pub const ONES_LENGTH: usize = 1000;

/// Published (passed, failed) per test over 1000 strings.
pub fn batch_outcome(test: TestSelector) -> (u32, u32) {
    test.reference_outcome()
}
