//! The statistic `r` and the inverse-entropy estimator `eta`, plus the
//! closed-form expectations and bounds used as oracles against them.
//!
//! For a sample of `n + 1` points,
//!
//! ```text
//! r(k)  = (1/(n+1)) sum_j (k-th largest alpha from point j)
//! eta(k) = k * (r(k) - r(k+1))          -- estimates 1/h
//! ```
//!
//! For the uniform i.i.d. source on `|A|` symbols with the beta family at
//! `beta = 1/|A|`, the untruncated expectation is exactly
//! `E r(k) = (H_n - H_{k-1}) / log |A|`, hence `E eta = 1/log|A| = 1/h`.
//!
//! All functions here take the point count `n + 1`, never the bare `n`,
//! and convert internally.

use crate::error::{Error, Result};
use crate::metric::LambdaFamily;
use crate::neighbors::kmax_alpha_trie;
use crate::seq::Sample;

/// One evaluation of the estimator on a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    /// `n`, one less than the number of sample points.
    pub n: usize,
    pub k: usize,
    /// Truncation depth shared by all points.
    pub m: usize,
    /// Descriptor of the metric family used.
    pub family: String,
    pub r_k: f64,
    pub r_k_plus_1: f64,
    /// `k * (r_k - r_{k+1})`; estimates the inverse entropy `1/h`.
    pub eta: f64,
}

/// Average over points of the k-th largest `alpha` to the other points.
pub fn r_statistic(sample: &Sample, k: usize, family: &LambdaFamily) -> Result<f64> {
    let res = kmax_alpha_trie(sample, &[k], family)?;
    Ok(res.mean(0))
}

/// The inverse-entropy estimator; computes both neighbor orders `k` and
/// `k + 1` in one pass over the sample.
pub fn eta_estimator(sample: &Sample, k: usize, family: &LambdaFamily) -> Result<EstimateReport> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "neighbor order k must be at least 1".into(),
        ));
    }
    let res = kmax_alpha_trie(sample, &[k, k + 1], family)?;
    let r_k = res.mean(0);
    let r_k_plus_1 = res.mean(1);
    Ok(EstimateReport {
        n: sample.num_points() - 1,
        k,
        m: sample.depth(),
        family: family.descriptor(),
        r_k,
        r_k_plus_1,
        eta: k as f64 * (r_k - r_k_plus_1),
    })
}

/// Harmonic number `H_n = sum_{s=1..n} 1/s`, with `H_0 = 0`. Summed from
/// the smallest term up.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).rev().map(|s| 1.0 / s as f64).sum()
}

/// Exact untruncated expectation of `r(k)` for the uniform i.i.d. source
/// on `alphabet_size` symbols under the matching beta family:
/// `(H_n - H_{k-1}) / log |A|` with `n = num_points - 1`.
pub fn expected_r_symmetric(num_points: usize, k: usize, alphabet_size: usize) -> Result<f64> {
    if alphabet_size < 2 {
        return Err(Error::AlphabetTooSmall(alphabet_size));
    }
    if num_points < 2 {
        return Err(Error::SampleTooSmall(num_points));
    }
    let n = num_points - 1;
    if k == 0 || k > n {
        return Err(Error::InsufficientNeighbors { k, available: n });
    }
    Ok((harmonic(n) - harmonic(k - 1)) / (alphabet_size as f64).ln())
}

/// Upper bound on the variance of `r(k)`: `m^2 (km+1)^2 / (4 (n+1))`.
pub fn variance_bound(num_points: usize, k: usize, m: usize) -> f64 {
    debug_assert!(num_points >= 2 && k >= 1 && m >= 1);
    let m = m as f64;
    let km1 = k as f64 * m + 1.0;
    m * m * km1 * km1 / (4.0 * num_points as f64)
}

/// Bounded-differences tail bound for `r(k)`:
/// `min(1, 2 exp(-2 (n+1) delta^2 / (m^2 (km+1)^2)))`.
pub fn mcdiarmid_tail(num_points: usize, k: usize, m: usize, delta: f64) -> Result<f64> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let m = m as f64;
    let km1 = k as f64 * m + 1.0;
    let exponent = -2.0 * num_points as f64 * delta * delta / (m * m * km1 * km1);
    Ok((2.0 * exponent.exp()).min(1.0))
}

/// Truncation depth `m = ceil(safety * log n / a)` for a source whose
/// cylinder masses decay like `e^{-a n}`; `safety` defaults to 2 at call
/// sites. Takes the point count `n + 1`.
pub fn truncation_depth(num_points: usize, decay_rate: f64, safety: f64) -> Result<usize> {
    if num_points < 3 {
        return Err(Error::SampleTooSmall(num_points));
    }
    if decay_rate.is_nan() || decay_rate <= 0.0 {
        return Err(Error::InvalidParameter(
            "decay rate must be positive; the source's cylinder masses do not decay".into(),
        ));
    }
    if safety.is_nan() || safety < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "safety factor must be at least 1, got {safety}"
        )));
    }
    let n = (num_points - 1) as f64;
    Ok((safety * n.ln() / decay_rate).ceil() as usize)
}

/// Whether the untruncated closed form is usable as an oracle at depth
/// `m`: the chance that any pair of the `n + 1` points shares a full
/// m-symbol prefix, bounded by `n^2 |A|^-m`, must be at most `1e-4`.
pub fn closed_form_applicable(num_points: usize, alphabet_size: usize, m: usize) -> bool {
    let n = (num_points - 1) as f64;
    2.0 * n.ln() - m as f64 * (alphabet_size as f64).ln() <= 1e-4f64.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::{Alphabet, SymbolSequence};

    fn sample_from(rows: &[&[u32]], asize: usize) -> Sample {
        let alphabet = Alphabet::new(asize).unwrap();
        let points = rows
            .iter()
            .map(|r| SymbolSequence::new(r.to_vec(), &alphabet).unwrap())
            .collect();
        Sample::new(points, alphabet).unwrap()
    }

    #[test]
    fn r_statistic_hand_enumerated() {
        let sample = sample_from(&[&[0, 0, 0], &[0, 0, 1], &[1, 1, 1]], 2);
        let zero = LambdaFamily::zero();
        let r1 = r_statistic(&sample, 1, &zero).unwrap();
        assert!((r1 - 4.0 / 3.0).abs() < 1e-15);
        let r2 = r_statistic(&sample, 2, &zero).unwrap();
        assert_eq!(r2, 0.0);
        assert!(matches!(
            r_statistic(&sample, 3, &zero),
            Err(Error::InsufficientNeighbors {
                k: 3,
                available: 2
            })
        ));
    }

    #[test]
    fn r_statistic_identical_points_is_depth() {
        let rows: Vec<&[u32]> = vec![&[0, 1, 0, 1]; 6];
        let sample = sample_from(&rows, 2);
        for k in 1..=5 {
            assert_eq!(
                r_statistic(&sample, k, &LambdaFamily::beta(0.5).unwrap()).unwrap(),
                4.0
            );
        }
    }

    #[test]
    fn eta_hand_enumerated() {
        let sample = sample_from(&[&[0, 0, 0], &[0, 0, 1], &[1, 1, 1]], 2);
        let report = eta_estimator(&sample, 1, &LambdaFamily::zero()).unwrap();
        assert!((report.eta - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(report.n, 2);
        assert_eq!(report.m, 3);
        assert!(report.r_k_plus_1 <= report.r_k && report.r_k <= 3.0);
    }

    #[test]
    fn eta_identical_points_is_zero() {
        let rows: Vec<&[u32]> = vec![&[1, 1, 0]; 4];
        let sample = sample_from(&rows, 2);
        let report = eta_estimator(&sample, 2, &LambdaFamily::beta(0.3).unwrap()).unwrap();
        assert_eq!(report.eta, 0.0);
    }

    #[test]
    fn eta_requires_k_plus_one_neighbors() {
        let sample = sample_from(&[&[0, 0], &[0, 1]], 2);
        assert!(matches!(
            eta_estimator(&sample, 1, &LambdaFamily::zero()),
            Err(Error::InsufficientNeighbors {
                k: 2,
                available: 1
            })
        ));
    }

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(0), 0.0);
        assert!((harmonic(3) - 11.0 / 6.0).abs() < 1e-15);
        assert!((harmonic(5) - 137.0 / 60.0).abs() < 1e-15);
    }

    #[test]
    fn expected_r_values() {
        let v = expected_r_symmetric(2, 1, 2).unwrap();
        assert!((v - std::f64::consts::LOG2_E).abs() < 1e-12);
        let v = expected_r_symmetric(4, 1, 2).unwrap();
        assert!((v - 2.644940908296433).abs() < 1e-12);
        // k = n telescopes to 1 / (n log|A|).
        for n in [1usize, 4, 9] {
            let v = expected_r_symmetric(n + 1, n, 2).unwrap();
            assert!((v - 1.0 / (n as f64 * 2f64.ln())).abs() < 1e-12);
        }
        assert!(expected_r_symmetric(4, 4, 2).is_err());
        assert!(expected_r_symmetric(4, 0, 2).is_err());
    }

    #[test]
    fn variance_bound_values() {
        assert_eq!(variance_bound(100, 2, 10), 110.25);
        assert_eq!(variance_bound(4, 1, 1), 0.25);
        assert!(variance_bound(1000, 3, 64) > 0.0);
    }

    #[test]
    fn mcdiarmid_tail_values() {
        // delta -> 0+ clamps to 1.
        assert_eq!(mcdiarmid_tail(100, 1, 1, 1e-12).unwrap(), 1.0);
        let v = mcdiarmid_tail(100, 1, 1, 1.0).unwrap();
        assert!((v - 3.8574996959278356e-22).abs() < 1e-30);
        assert!(mcdiarmid_tail(100, 1, 1, 0.0).is_err());
        assert!(mcdiarmid_tail(100, 1, 1, -1.0).is_err());
        // Doubling delta multiplies the exponent by 4 (below the clamp).
        let a = mcdiarmid_tail(100, 1, 1, 0.5).unwrap();
        let b = mcdiarmid_tail(100, 1, 1, 1.0).unwrap();
        let ea = (a / 2.0).ln();
        let eb = (b / 2.0).ln();
        assert!((eb / ea - 4.0).abs() < 1e-9);
    }

    #[test]
    fn truncation_depth_values() {
        assert_eq!(truncation_depth(22027, 2f64.ln(), 2.0).unwrap(), 29);
        assert_eq!(truncation_depth(3, 1.0, 1.0).unwrap(), 1);
        // Doubling the safety factor doubles m up to rounding.
        let m1 = truncation_depth(1001, 0.3, 1.0).unwrap();
        let m2 = truncation_depth(1001, 0.3, 2.0).unwrap();
        assert!((m2 as isize - 2 * m1 as isize).abs() <= 1);
        assert!(truncation_depth(1001, 0.0, 2.0).is_err());
        assert!(truncation_depth(1001, -1.0, 2.0).is_err());
        assert!(truncation_depth(1001, 0.5, 0.5).is_err());
    }

    #[test]
    fn closed_form_guard() {
        assert!(closed_form_applicable(512, 2, 64));
        assert!(!closed_form_applicable(512, 2, 20));
        assert!(closed_form_applicable(512, 3, 64));
    }
}
