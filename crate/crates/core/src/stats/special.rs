//! Gamma-function machinery behind the chi-square quantile.

use crate::error::{Error, Result};
use crate::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn c<F: Real>(v: f64) -> F {
    F::from_f64(v).expect("constant representable in target float")
}

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma<F: Real>(x: F) -> F {
    let half = c::<F>(0.5);
    if x < half {
        // reflection
        let pi = c::<F>(std::f64::consts::PI);
        return (pi / (pi * x).sin()).ln() - ln_gamma(F::one() - x);
    }
    let x = x - F::one();
    let mut acc = c::<F>(LANCZOS[0]);
    for (k, &coef) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + c::<F>(coef) / (x + c::<F>(k as f64));
    }
    let t = x + c::<F>(LANCZOS_G) + half;
    c::<F>(0.5 * (2.0 * std::f64::consts::PI).ln()) + (x + half) * t.ln() - t + acc.ln()
}

const MAX_TERMS: usize = 1000;

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn regularized_gamma_p<F: Real>(a: F, x: F) -> Result<F> {
    if a <= F::zero() {
        return Err(Error::invalid("gamma shape must be positive"));
    }
    if x < F::zero() {
        return Err(Error::invalid("gamma argument must be non-negative"));
    }
    if x == F::zero() {
        return Ok(F::zero());
    }
    if x < a + F::one() {
        Ok(lower_series(a, x))
    } else {
        Ok(F::one() - upper_fraction(a, x))
    }
}

fn prefactor<F: Real>(a: F, x: F) -> F {
    (a * x.ln() - x - ln_gamma(a)).exp()
}

fn lower_series<F: Real>(a: F, x: F) -> F {
    let mut ap = a;
    let mut term = F::one() / a;
    let mut sum = term;
    for _ in 0..MAX_TERMS {
        ap = ap + F::one();
        term = term * x / ap;
        sum = sum + term;
        if term.abs() < sum.abs() * F::epsilon() {
            break;
        }
    }
    sum * prefactor(a, x)
}

/// `Q(a, x)` by modified Lentz on the continued fraction.
fn upper_fraction<F: Real>(a: F, x: F) -> F {
    let tiny = F::min_positive_value() / F::epsilon();
    let two = c::<F>(2.0);
    let mut b = x + F::one() - a;
    let mut cc = F::one() / tiny;
    let mut d = F::one() / b;
    let mut h = d;
    for i in 1..MAX_TERMS {
        let i = c::<F>(i as f64);
        let an = -i * (i - a);
        b = b + two;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        cc = b + an / cc;
        if cc.abs() < tiny {
            cc = tiny;
        }
        d = F::one() / d;
        let delta = d * cc;
        h = h * delta;
        if (delta - F::one()).abs() < F::epsilon() {
            break;
        }
    }
    prefactor(a, x) * h
}

/// CDF of the chi-square distribution with `dof` degrees of freedom.
pub fn chi_square_cdf<F: Real>(dof: u32, x: F) -> Result<F> {
    if dof == 0 {
        return Err(Error::invalid("chi-square needs at least one degree of freedom"));
    }
    if x <= F::zero() {
        return Ok(F::zero());
    }
    let half = c::<F>(0.5);
    regularized_gamma_p(c::<F>(f64::from(dof)) * half, x * half)
}

/// Upper-`alpha` quantile of chi-square(`dof`), by bisection on the CDF.
pub fn chi_square_critical<F: Real>(dof: u32, alpha: F) -> Result<F> {
    if dof == 0 {
        return Err(Error::invalid("chi-square needs at least one degree of freedom"));
    }
    if !(alpha > F::zero() && alpha < F::one()) {
        return Err(Error::invalid("alpha must lie strictly between 0 and 1"));
    }
    let target = F::one() - alpha;
    let k = c::<F>(f64::from(dof));
    let mut lo = F::zero();
    let mut hi = k + c::<F>(10.0) * (k + k).sqrt() + c::<F>(10.0);
    while chi_square_cdf(dof, hi)? < target {
        lo = hi;
        hi = hi + hi;
    }
    let tol = c::<F>(1e-8).max(F::epsilon() * c::<F>(4.0));
    for _ in 0..400 {
        let mid = (lo + hi) * c::<F>(0.5);
        if chi_square_cdf(dof, mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol * hi.max(F::one()) {
            break;
        }
    }
    Ok((lo + hi) * c::<F>(0.5))
}
