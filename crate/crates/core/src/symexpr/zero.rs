use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eval::{evaluate_with_scale, Constants, EvalError};
use super::expr::Expr;

/// Relative tolerance for numeric zero tests.
pub const ZERO_TOL: f64 = 1e-9;
/// Default number of random trial points.
pub const DEFAULT_TRIALS: usize = 20;

/// Outcome of a zero test.
#[derive(Debug, Clone, PartialEq)]
pub enum ZeroTest {
    /// Normalization reduced the expression to the constant 0.
    ProvenZero,
    /// Below tolerance at every trial point; `max_ratio` is the worst |e|/(1+scale).
    NumericallyZero { trials: usize, max_ratio: f64 },
    /// A point where the value exceeds the tolerance.
    Nonzero { witness: Vec<f64>, value: f64 },
}

impl ZeroTest {
    pub fn is_zero(&self) -> bool {
        !matches!(self, ZeroTest::Nonzero { .. })
    }
}

/// Tests `e` for vanishing on the box `bounds` (one closed interval per coordinate).
///
/// Points that raise a domain error are redrawn; if more than ten times the
/// requested number of draws fail, the last error is returned.
pub fn is_zero(
    e: &Expr,
    bounds: &[(f64, f64)],
    constants: &Constants,
    trials: usize,
    seed: u64,
) -> Result<ZeroTest, EvalError> {
    assert!(trials >= 1, "at least one trial point is required");
    if e.is_zero() {
        return Ok(ZeroTest::ProvenZero);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    let mut failures = 0;
    let mut max_ratio: f64 = 0.0;
    let mut point = vec![0.0; bounds.len()];
    while done < trials {
        for (x, (lo, hi)) in point.iter_mut().zip(bounds) {
            *x = if hi > lo { rng.gen_range(*lo..=*hi) } else { *lo };
        }
        match evaluate_with_scale(e, &point, constants) {
            Ok((v, scale)) => {
                let ratio = v.abs() / (1.0 + scale);
                if ratio >= ZERO_TOL {
                    return Ok(ZeroTest::Nonzero {
                        witness: point,
                        value: v,
                    });
                }
                max_ratio = max_ratio.max(ratio);
                done += 1;
            }
            Err(err) => {
                failures += 1;
                if failures > 10 * trials {
                    return Err(err);
                }
            }
        }
    }
    Ok(ZeroTest::NumericallyZero { trials, max_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse::parse;

    #[test]
    fn pythagorean_identity_is_numerically_zero() {
        let e = parse("sin(x)^2 + cos(x)^2 - 1", &["x"]).unwrap();
        let r = is_zero(&e, &[(-3.0, 3.0)], &Constants::new(), 20, 0).unwrap();
        assert!(matches!(r, ZeroTest::NumericallyZero { trials: 20, .. }));
    }

    #[test]
    fn difference_of_equal_terms_is_proven_zero() {
        let e = parse("x - x", &["x"]).unwrap();
        assert_eq!(
            is_zero(&e, &[(0.0, 1.0)], &Constants::new(), 5, 0).unwrap(),
            ZeroTest::ProvenZero
        );
    }

    #[test]
    fn exponential_minus_one_has_a_witness() {
        let e = parse("exp(t) - 1", &["t"]).unwrap();
        match is_zero(&e, &[(0.5, 0.5)], &Constants::new(), 3, 0).unwrap() {
            ZeroTest::Nonzero { witness, value } => {
                assert_eq!(witness, vec![0.5]);
                assert!((value - (0.5f64.exp() - 1.0)).abs() < 1e-15);
                assert!((value - 0.6487).abs() < 1e-3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn persistent_domain_failure_is_reported() {
        let e = parse("sqrt(x) - sqrt(x)*1 + sqrt(x)^3", &["x"]).unwrap();
        assert!(is_zero(&e, &[(-2.0, -1.0)], &Constants::new(), 2, 0).is_err());
    }
}
