//! Small descriptive statistics used by the engine and the experiment reducers.

use crate::error::{Result, SortitionError};

/// The `p`-th percentile (`p` in percent) with linear interpolation between
/// closest ranks.
///
/// The sorted sample is treated as the points `(100 k / (n - 1), x_k)` and the
/// result is read off the piecewise-linear curve through them, so `p = 0`
/// gives the minimum and `p = 100` the maximum.
pub fn percentile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(SortitionError::EmptySample);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(SortitionError::NonFinite {
            context: "percentile sample",
        });
    }
    if !(p.is_finite() && (0.0..=100.0).contains(&p)) {
        return Err(SortitionError::invalid(
            "percentile",
            format!("{p} is outside [0, 100]"),
        ));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(percentile_of_sorted(&sorted, p))
}

fn percentile_of_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let rank = p / 100.0 * (n - 1) as f64;
    let lower = rank.floor() as usize;
    if lower + 1 >= n {
        return sorted[n - 1];
    }
    let frac = rank - lower as f64;
    let (lo, hi) = (sorted[lower], sorted[lower + 1]);
    // clamp: rounding in `hi - lo` must not push past the next knot
    (lo + frac * (hi - lo)).clamp(lo, hi)
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Population standard deviation (divides by `n`).
pub fn population_std(values: &[f64]) -> Option<f64> {
    let m = mean(values)?;
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64;
    Some(var.sqrt())
}

/// Sample standard deviation (divides by `n - 1`).
pub fn sample_std(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let m = mean(values)?;
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64;
    Some(var.sqrt())
}

/// Ranks starting at 1, with tied values sharing their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = avg;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation. `None` when either side has zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len(), "pearson: length mismatch");
    let mx = mean(xs)?;
    let my = mean(ys)?;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman rank correlation: Pearson correlation of average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    pearson(&average_ranks(xs), &average_ranks(ys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Reference percentile: walk the knots `(100 k / (n-1), x_k)` and
    /// interpolate inside the segment that brackets `p`.
    fn oracle_percentile(values: &[f64], p: f64) -> f64 {
        let mut xs = values.to_vec();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if xs.len() == 1 {
            return xs[0];
        }
        let step = 100.0 / (xs.len() - 1) as f64;
        for k in 0..xs.len() - 1 {
            let left = k as f64 * step;
            let right = (k + 1) as f64 * step;
            if p >= left && p <= right {
                let w = (p - left) / (right - left);
                return xs[k] + w * (xs[k + 1] - xs[k]);
            }
        }
        *xs.last().unwrap()
    }

    #[test]
    fn percentile_endpoints() {
        assert_eq!(percentile(&[1.0, 2.0, 3.0], 0.0).unwrap(), 1.0);
        assert_eq!(percentile(&[1.0, 2.0, 3.0], 100.0).unwrap(), 3.0);
        assert_eq!(percentile(&[3.0, 1.0, 2.0], 50.0).unwrap(), 2.0);
    }

    #[test]
    fn percentile_matches_hand_worked_value() {
        // sorted {0,1,2,3,4}: rank = 0.2 * 4 = 0.8, between 0 and 1
        let expected = oracle_percentile(&[0.0, 1.0, 2.0, 3.0, 4.0], 20.0);
        assert!((expected - 0.8).abs() < 1e-15);
        let got = percentile(&[4.0, 0.0, 3.0, 1.0, 2.0], 20.0).unwrap();
        assert!((got - 0.8).abs() < 1e-15);
    }

    #[test]
    fn percentile_singleton_is_constant() {
        for p in [0.0, 13.0, 50.0, 100.0] {
            assert_eq!(percentile(&[0.4], p).unwrap(), 0.4);
        }
    }

    #[test]
    fn percentile_errors() {
        assert_eq!(percentile(&[], 50.0), Err(SortitionError::EmptySample));
        assert!(percentile(&[1.0, f64::NAN], 50.0).is_err());
        assert!(percentile(&[1.0], 101.0).is_err());
    }

    #[test]
    fn std_estimators() {
        let v = [0.1, 0.3];
        assert!((population_std(&v).unwrap() - 0.1).abs() < 1e-15);
        assert!((sample_std(&v).unwrap() - 0.1 * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(population_std(&[0.7]).unwrap(), 0.0);
        assert!(population_std(&[]).is_none());
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(
            average_ranks(&[10.0, 20.0, 20.0, 5.0]),
            vec![2.0, 3.5, 3.5, 1.0]
        );
    }

    #[test]
    fn spearman_known_values() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!((spearman(&x, &[2.0, 4.0, 8.0, 16.0, 32.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman(&x, &[5.0, 4.0, 3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
        // d = (0,0,-1,1,0): 1 - 6*2/(5*24) = 0.9
        assert!((spearman(&x, &[1.0, 2.0, 4.0, 3.0, 5.0]).unwrap() - 0.9).abs() < 1e-12);
        assert!(spearman(&x, &[1.0; 5]).is_none());
    }

    proptest! {
        #[test]
        fn percentile_agrees_with_oracle(
            values in prop::collection::vec(-10.0f64..10.0, 1..40),
            p in 0.0f64..=100.0,
        ) {
            let got = percentile(&values, p).unwrap();
            let want = oracle_percentile(&values, p);
            prop_assert!((got - want).abs() <= 1e-12 * (1.0 + want.abs()));
        }

        #[test]
        fn percentile_bounded_and_permutation_invariant(
            values in prop::collection::vec(-10.0f64..10.0, 1..40),
            p in 0.0f64..=100.0,
            shift in 0usize..40,
        ) {
            let got = percentile(&values, p).unwrap();
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(got >= lo && got <= hi);
            let mut rotated = values.clone();
            rotated.rotate_left(shift % values.len());
            rotated.reverse();
            prop_assert_eq!(percentile(&rotated, p).unwrap().to_bits(), got.to_bits());
        }

        #[test]
        fn percentile_monotone_in_p(
            values in prop::collection::vec(-10.0f64..10.0, 1..40),
            p1 in 0.0f64..=100.0,
            p2 in 0.0f64..=100.0,
        ) {
            let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            prop_assert!(percentile(&values, lo).unwrap() <= percentile(&values, hi).unwrap());
        }
    }
}
