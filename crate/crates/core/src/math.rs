//! Log-domain kernels shared by the measures and the solver.

pub(crate) use libm::{exp, log as ln};

pub(crate) const LN_2: f64 = core::f64::consts::LN_2;

/// `ln Σ exp(v)` with max extraction. Returns `-inf` for an empty or
/// all-`-inf` input.
pub(crate) fn log_sum_exp<I>(values: I) -> f64
where
    I: IntoIterator<Item = f64>,
    I::IntoIter: Clone,
{
    let it = values.into_iter();
    let max = it.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    let sum: f64 = it.map(|v| exp(v - max)).sum();
    max + ln(sum)
}

/// `ln p`, with `ln 0 = -inf`.
#[inline]
pub(crate) fn ln0(p: f64) -> f64 {
    if p > 0.0 {
        ln(p)
    } else {
        f64::NEG_INFINITY
    }
}

/// `-p ln p` with `0 ln 0 = 0`.
#[inline]
pub(crate) fn plogp_neg(p: f64) -> f64 {
    if p > 0.0 {
        -p * ln(p)
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lse_is_stable_for_large_magnitudes() {
        let v = [-1.0e4, -1.0e4 + ln(3.0)];
        assert!((log_sum_exp(v) - (-1.0e4 + ln(4.0))).abs() < 1e-9);
        let v = [800.0, 800.0];
        assert!((log_sum_exp(v) - (800.0 + LN_2)).abs() < 1e-12);
    }

    #[test]
    fn lse_of_nothing_is_neg_inf() {
        assert_eq!(log_sum_exp([f64::NEG_INFINITY; 3]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(core::iter::empty::<f64>()), f64::NEG_INFINITY);
    }
}
