//! The lambda-parameterized weak metric family on symbol sequences.
//!
//! The metric is defined by a recursion on the leading symbols: matching
//! symbols multiply the distance by `e^-1`, mismatching symbols map the
//! accumulated depth through a nondecreasing function `lambda` with
//! `lambda(0) = 0` and `lambda <= 1`. Working with `alpha = -log rho`
//! turns the recursion into a right-to-left fold over coordinates:
//!
//! ```text
//! t = 0
//! for j = m down to 1:  t = (x_j == y_j) ? t + 1 : lambda(t)
//! alpha = t
//! ```
//!
//! `alpha` is bracketed by the first-mismatch position `p`:
//! `p - 1 <= alpha <= p`, so the family is bi-Lipschitz equivalent to the
//! standard sequence metric `rho0 = e^-p`.

use crate::error::{Error, Result};
use crate::seq::SymbolSequence;

/// The mismatch-response function `lambda` of the weak metric.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaFamily {
    kind: FamilyKind,
}

#[derive(Debug, Clone, PartialEq)]
enum FamilyKind {
    /// `lambda = 0`: every mismatch resets the depth (the standard metric,
    /// up to a constant factor).
    Zero,
    /// `lambda(t) = log_beta(beta + (1 - beta) beta^t)`, `0 < beta < 1`.
    Beta(f64),
    /// Piecewise-linear interpolation of `(t, lambda(t))` breakpoints,
    /// clamped to the last value beyond the final breakpoint.
    Tabulated(Vec<(f64, f64)>),
}

impl LambdaFamily {
    pub fn zero() -> Self {
        Self {
            kind: FamilyKind::Zero,
        }
    }

    pub fn beta(beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta <= 0.0 || beta >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "beta must lie in the open interval (0, 1), got {beta}"
            )));
        }
        Ok(Self {
            kind: FamilyKind::Beta(beta),
        })
    }

    pub fn tabulated(breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::InvalidParameter(
                "tabulated family needs at least one breakpoint".into(),
            ));
        }
        if breakpoints[0] != (0.0, 0.0) {
            return Err(Error::InvalidParameter(
                "tabulated family must start with the breakpoint (0, 0)".into(),
            ));
        }
        if breakpoints
            .iter()
            .any(|&(t, v)| !t.is_finite() || !v.is_finite())
        {
            return Err(Error::InvalidParameter(
                "tabulated breakpoints must be finite".into(),
            ));
        }
        for w in breakpoints.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidParameter(
                    "tabulated breakpoints must be strictly increasing in t".into(),
                ));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::InvalidParameter(
                    "tabulated values must be nondecreasing".into(),
                ));
            }
        }
        if breakpoints.iter().any(|&(_, v)| !(0.0..=1.0).contains(&v)) {
            return Err(Error::InvalidParameter(
                "tabulated values must lie in [0, 1]".into(),
            ));
        }
        Ok(Self {
            kind: FamilyKind::Tabulated(breakpoints),
        })
    }

    /// Beta parameter, when this is the beta family.
    pub fn beta_parameter(&self) -> Option<f64> {
        match self.kind {
            FamilyKind::Beta(b) => Some(b),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, FamilyKind::Zero)
    }

    /// Short human/CSV-facing descriptor, e.g. `zero` or `beta:0.5`.
    pub fn descriptor(&self) -> String {
        match &self.kind {
            FamilyKind::Zero => "zero".to_string(),
            FamilyKind::Beta(b) => format!("beta:{b}"),
            FamilyKind::Tabulated(bp) => format!("table[{}]", bp.len()),
        }
    }

    /// Evaluate `lambda(t)` for `t >= 0`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lambda argument must be nonnegative, got {t}"
            )));
        }
        Ok(self.eval_raw(t))
    }

    /// `eval` without the domain check; used inside the fold where the
    /// accumulator is nonnegative by construction.
    #[inline]
    pub(crate) fn eval_raw(&self, t: f64) -> f64 {
        match &self.kind {
            FamilyKind::Zero => 0.0,
            FamilyKind::Beta(beta) => {
                // lambda(0) = 0 exactly, independent of how beta + (1 - beta)
                // rounds; the clamp absorbs the off-by-one-ulp cases elsewhere.
                if t == 0.0 {
                    return 0.0;
                }
                let inner = beta + (1.0 - beta) * beta.powf(t);
                (inner.ln() / beta.ln()).clamp(0.0, 1.0)
            }
            FamilyKind::Tabulated(bp) => {
                let last = bp.len() - 1;
                if t >= bp[last].0 {
                    return bp[last].1;
                }
                // First breakpoint is t = 0, so t < bp[last].0 has a bracket.
                let hi = bp.partition_point(|&(bt, _)| bt <= t);
                let (t0, v0) = bp[hi - 1];
                let (t1, v1) = bp[hi];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }
}

/// Closed-form inverse of the beta-family `lambda` on `[0, 1)`; returns
/// `+inf` for `u >= 1` (the function never reaches 1 at finite depth).
pub fn beta_lambda_inverse(beta: f64, u: f64) -> f64 {
    debug_assert!(beta > 0.0 && beta < 1.0);
    debug_assert!(u >= 0.0);
    if u >= 1.0 {
        return f64::INFINITY;
    }
    ((beta.powf(u) - beta) / (1.0 - beta)).ln() / beta.ln()
}

/// `alpha = -log rho` of the truncated weak metric, via the fold above.
///
/// Deterministic, symmetric, and bounded by `0 <= alpha <= m`.
pub fn alpha(x: &SymbolSequence, y: &SymbolSequence, family: &LambdaFamily) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    Ok(alpha_raw(x.symbols(), y.symbols(), family))
}

/// The fold on raw symbol slices. Callers guarantee equal lengths.
#[inline]
pub(crate) fn alpha_raw(xs: &[u32], ys: &[u32], family: &LambdaFamily) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    let mut t = 0.0;
    for (a, b) in xs.iter().zip(ys).rev() {
        t = if a == b { t + 1.0 } else { family.eval_raw(t) };
    }
    t
}

/// The truncated weak metric itself: `rho = e^-alpha`, in `[e^-m, 1]`.
pub fn rho(x: &SymbolSequence, y: &SymbolSequence, family: &LambdaFamily) -> Result<f64> {
    Ok((-alpha(x, y, family)?).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;
    use crate::seq::{first_mismatch_index, Alphabet, SymbolSequence};

    fn seq(symbols: &[u32]) -> SymbolSequence {
        let alphabet = Alphabet::new(4).unwrap();
        SymbolSequence::new(symbols.to_vec(), &alphabet).unwrap()
    }

    #[test]
    fn beta_rejects_closed_interval_endpoints() {
        assert!(LambdaFamily::beta(0.0).is_err());
        assert!(LambdaFamily::beta(1.0).is_err());
        assert!(LambdaFamily::beta(-0.3).is_err());
        assert!(LambdaFamily::beta(0.5).is_ok());
    }

    #[test]
    fn lambda_eval_examples() {
        let b = LambdaFamily::beta(0.5).unwrap();
        assert_eq!(b.eval(0.0).unwrap(), 0.0);
        assert!((b.eval(1.0).unwrap() - 0.4150374992788438).abs() < 1e-12);
        let z = LambdaFamily::zero();
        assert_eq!(z.eval(7.3).unwrap(), 0.0);
        let tail = b.eval(60.0).unwrap();
        assert!(tail > 1.0 - 1e-15 && tail <= 1.0);
    }

    #[test]
    fn lambda_rejects_negative_argument() {
        let b = LambdaFamily::beta(0.5).unwrap();
        assert!(b.eval(-0.1).is_err());
    }

    #[test]
    fn lambda_grid_properties_all_families() {
        let families = [
            LambdaFamily::zero(),
            LambdaFamily::beta(0.3).unwrap(),
            LambdaFamily::beta(0.5).unwrap(),
            LambdaFamily::beta(0.9).unwrap(),
            LambdaFamily::tabulated(vec![(0.0, 0.0), (1.0, 0.25), (4.0, 0.9)]).unwrap(),
        ];
        for f in &families {
            assert_eq!(f.eval(0.0).unwrap(), 0.0, "{}", f.descriptor());
            let mut prev = 0.0;
            for i in 0..=1000 {
                let t = i as f64 * 0.02;
                let v = f.eval(t).unwrap();
                assert!((0.0..=1.0).contains(&v), "{} at {t}", f.descriptor());
                assert!(v >= prev, "{} decreasing at {t}", f.descriptor());
                prev = v;
            }
        }
    }

    #[test]
    fn tabulated_construction_validation() {
        assert!(LambdaFamily::tabulated(vec![]).is_err());
        assert!(LambdaFamily::tabulated(vec![(0.5, 0.0)]).is_err());
        assert!(LambdaFamily::tabulated(vec![(0.0, 0.0), (0.0, 0.5)]).is_err());
        assert!(LambdaFamily::tabulated(vec![(0.0, 0.0), (1.0, 0.5), (2.0, 0.4)]).is_err());
        assert!(LambdaFamily::tabulated(vec![(0.0, 0.0), (1.0, 1.5)]).is_err());
        assert!(LambdaFamily::tabulated(vec![(0.0, 0.0), (1.0, 1.0)]).is_ok());
    }

    #[test]
    fn alpha_examples() {
        let zero = LambdaFamily::zero();
        assert_eq!(
            alpha(&seq(&[0, 0, 0]), &seq(&[0, 0, 1]), &zero).unwrap(),
            2.0
        );
        let beta = LambdaFamily::beta(0.5).unwrap();
        for f in [&zero, &beta] {
            let x = seq(&[1, 2, 0, 3, 1]);
            assert_eq!(alpha(&x, &x, f).unwrap(), 5.0);
        }
        let a = alpha(&seq(&[0, 1]), &seq(&[1, 1]), &beta).unwrap();
        assert!((a - 0.4150374992788438).abs() < 1e-12);
    }

    #[test]
    fn rho_examples() {
        let zero = LambdaFamily::zero();
        let x = seq(&[0, 1, 0]);
        assert!((rho(&x, &x, &zero).unwrap() - 0.049787068367863944).abs() < 1e-12);
        // First mismatch at position 1 and no later matches: alpha = 0.
        assert_eq!(
            rho(&seq(&[1, 2, 3]), &seq(&[0, 1, 0]), &zero).unwrap(),
            1.0
        );
        let beta = LambdaFamily::beta(0.5).unwrap();
        let r = rho(&seq(&[0, 1]), &seq(&[1, 1]), &beta).unwrap();
        assert!((r - 0.660315518884943).abs() < 1e-12);
    }

    #[test]
    fn alpha_length_mismatch_errors() {
        let zero = LambdaFamily::zero();
        assert!(alpha(&seq(&[0, 1]), &seq(&[0, 1, 1]), &zero).is_err());
    }

    fn random_families(rng: &mut CounterRng) -> Vec<LambdaFamily> {
        vec![
            LambdaFamily::zero(),
            LambdaFamily::beta(0.05 + 0.9 * rng.next_f64()).unwrap(),
            LambdaFamily::tabulated(vec![(0.0, 0.0), (0.7, 0.3), (2.0, 0.8), (5.0, 1.0)]).unwrap(),
        ]
    }

    #[test]
    fn bi_lipschitz_bracket_and_symmetry() {
        let mut rng = CounterRng::new(2024);
        for trial in 0..2000 {
            let m = 1 + rng.next_below(24) as usize;
            let a_size = 2 + rng.next_below(3);
            let xs: Vec<u32> = (0..m).map(|_| rng.next_below(a_size) as u32).collect();
            let ys: Vec<u32> = (0..m).map(|_| rng.next_below(a_size) as u32).collect();
            let x = seq(&xs);
            let y = seq(&ys);
            let p = first_mismatch_index(&x, &y).unwrap() as f64;
            for f in random_families(&mut rng) {
                let a_xy = alpha(&x, &y, &f).unwrap();
                let a_yx = alpha(&y, &x, &f).unwrap();
                assert_eq!(a_xy, a_yx, "asymmetric at trial {trial}");
                assert!(
                    p - 1.0 <= a_xy && a_xy <= p,
                    "bracket violated: p={p} alpha={a_xy} ({})",
                    f.descriptor()
                );
                assert!((0.0..=m as f64).contains(&a_xy));
                let r = rho(&x, &y, &f).unwrap();
                assert!(r >= (-(m as f64)).exp() - 1e-15 && r <= 1.0);
            }
        }
    }

    #[test]
    fn alpha_nondecreasing_in_truncation_depth() {
        let mut rng = CounterRng::new(5);
        for _ in 0..1000 {
            let m = 2 + rng.next_below(20) as usize;
            let xs: Vec<u32> = (0..m).map(|_| rng.next_below(2) as u32).collect();
            let ys: Vec<u32> = (0..m).map(|_| rng.next_below(2) as u32).collect();
            for f in random_families(&mut rng) {
                let shorter = alpha_raw(&xs[..m - 1], &ys[..m - 1], &f);
                let longer = alpha_raw(&xs, &ys, &f);
                assert!(longer >= shorter);
            }
        }
    }

    #[test]
    fn prepend_step_matches_recursion() {
        let mut rng = CounterRng::new(6);
        for _ in 0..1000 {
            let m = 1 + rng.next_below(16) as usize;
            let xs: Vec<u32> = (0..m).map(|_| rng.next_below(3) as u32).collect();
            let ys: Vec<u32> = (0..m).map(|_| rng.next_below(3) as u32).collect();
            for f in random_families(&mut rng) {
                let t = alpha_raw(&xs, &ys, &f);
                let mut ex = vec![1u32];
                ex.extend_from_slice(&xs);
                let mut ey = vec![1u32];
                ey.extend_from_slice(&ys);
                assert_eq!(alpha_raw(&ex, &ey, &f), t + 1.0);
                ey[0] = 2;
                assert_eq!(alpha_raw(&ex, &ey, &f), f.eval_raw(t));
            }
        }
    }

    #[test]
    fn beta_inverse_round_trip() {
        for beta in [0.2, 0.5, 1.0 / 3.0, 0.8] {
            let f = LambdaFamily::beta(beta).unwrap();
            for i in 1..100 {
                let u = i as f64 / 100.0;
                let t = beta_lambda_inverse(beta, u);
                assert!((f.eval(t).unwrap() - u).abs() < 1e-10, "beta={beta} u={u}");
            }
            assert_eq!(beta_lambda_inverse(beta, 0.0), 0.0);
            assert_eq!(beta_lambda_inverse(beta, 1.0), f64::INFINITY);
        }
    }

    #[test]
    fn beta_family_fixed_point_identity() {
        // F(t) = min(1, beta^t) is the ball-mass function of the symmetric
        // binary source; it must satisfy
        // F(t) = beta F(t-1) + (1-beta) F(lambda_inv(t)).
        let beta = 0.5f64;
        let ball = |t: f64| beta.powf(t).min(1.0);
        for i in 1..=100 {
            let t = i as f64 * 0.1;
            let lhs = beta * ball(t - 1.0) + (1.0 - beta) * ball(beta_lambda_inverse(beta, t));
            assert!(
                (lhs - ball(t)).abs() <= 1e-10,
                "t={t}: residual {}",
                lhs - ball(t)
            );
        }
    }
}
