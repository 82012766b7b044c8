//! Continued-fraction rounding with explicit denominator and encoding-length
//! guarantees.
//!
//! For a rational `α` and `0 < ε ≤ 1`, [`approx_scalar`] returns `p/q` with
//!
//! * `|α − p/q| < ε/q`,
//! * `1 ≤ q ≤ 1/ε`,
//! * `|p| ≤ ⌈|α|⌉·q`,
//!
//! choosing the convergent of `α` with the largest admissible denominator.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::{bit_size_vector, ceil, ceil_log2, BitSize, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiophantineError {
    #[error("tolerance {0} outside (0, 1]")]
    ToleranceOutOfRange(Rational),
    #[error("cannot approximate an empty vector")]
    EmptyVector,
    #[error("approximation guarantee violated: {0}")]
    GuaranteeViolated(String),
}

/// A reduced fraction `p/q` with `q ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DioApprox {
    pub p: BigInt,
    pub q: BigInt,
}

impl DioApprox {
    pub fn value(&self) -> Rational {
        Rational::new(self.p.clone(), self.q.clone())
    }
}

fn check_tolerance(eps: &Rational) -> Result<(), DiophantineError> {
    if !eps.is_positive() || *eps > Rational::one() {
        return Err(DiophantineError::ToleranceOutOfRange(eps.clone()));
    }
    Ok(())
}

/// Last convergent of `num/den ≥ 0` whose denominator does not exceed `qmax`.
fn best_convergent(num: &BigInt, den: &BigInt, qmax: &BigInt) -> (BigInt, BigInt) {
    // h_{-1}/k_{-1} = 1/0, h_{-2}/k_{-2} = 0/1
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    let (mut a, mut b) = (num.clone(), den.clone());
    while !b.is_zero() {
        let (quot, rem) = a.div_mod_floor(&b);
        let h_next = &quot * &h + &h_prev;
        let k_next = &quot * &k + &k_prev;
        if &k_next > qmax {
            break;
        }
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        a = std::mem::replace(&mut b, rem);
    }
    (h, k)
}

/// Best rational approximation of `alpha` with denominator at most `1/eps`.
pub fn approx_scalar(alpha: &Rational, eps: &Rational) -> Result<DioApprox, DiophantineError> {
    check_tolerance(eps)?;
    let qmax = eps.recip().floor().to_integer();
    let magnitude = alpha.abs();
    let (p, q) = best_convergent(magnitude.numer(), magnitude.denom(), &qmax);
    let p = if alpha.is_negative() { -p } else { p };
    let approx = DioApprox { p, q };
    verify_scalar(alpha, eps, &approx)?;
    Ok(approx)
}

/// Checks the three scalar guarantees exactly.
pub fn verify_scalar(alpha: &Rational, eps: &Rational, a: &DioApprox) -> Result<(), DiophantineError> {
    let q = Rational::from_integer(a.q.clone());
    let err = (alpha - a.value()).abs();
    if err >= eps / &q {
        return Err(DiophantineError::GuaranteeViolated(format!(
            "|{alpha} - {}/{}| = {err} is not below eps/q",
            a.p, a.q
        )));
    }
    if a.q < BigInt::one() || q * eps > Rational::one() {
        return Err(DiophantineError::GuaranteeViolated(format!(
            "denominator {} outside [1, 1/eps]",
            a.q
        )));
    }
    if a.p.abs() > ceil(&alpha.abs()) * &a.q {
        return Err(DiophantineError::GuaranteeViolated(format!(
            "numerator {} exceeds ceil(|alpha|)·q",
            a.p
        )));
    }
    Ok(())
}

/// `n(6 + ⌈log₂(n²·max(1, ⌈‖α‖_∞⌉)/eps²)⌉)`: the encoding-length ceiling for
/// a componentwise rounding of an `n`-vector at Euclidean tolerance `eps`.
pub fn vector_size_bound(n: usize, alpha_inf_ceil: &BigInt, eps: &Rational) -> BitSize {
    if n == 0 {
        return BitSize(0);
    }
    let cap = if alpha_inf_ceil.is_positive() {
        alpha_inf_ceil.clone()
    } else {
        BigInt::one()
    };
    let n_big = BigInt::from(n as u64);
    let arg = Rational::from_integer(&n_big * &n_big * cap) / (eps * eps);
    let log = ceil_log2(&arg).max(0) as u64;
    BitSize(n as u64 * (6 + log))
}

/// Componentwise rounding with `‖alpha − result‖₂ < eps`.
///
/// Each component is rounded by [`approx_scalar`] at tolerance `eps/n`.
pub fn approx_vector(alpha: &[Rational], eps: &Rational) -> Result<Vec<Rational>, DiophantineError> {
    check_tolerance(eps)?;
    if alpha.is_empty() {
        return Err(DiophantineError::EmptyVector);
    }
    let n = alpha.len();
    let component_eps = eps / Rational::from_integer(BigInt::from(n as u64));
    let result = alpha
        .iter()
        .map(|a| approx_scalar(a, &component_eps).map(|d| d.value()))
        .collect::<Result<Vec<_>, _>>()?;

    let err_sq: Rational = alpha
        .iter()
        .zip(&result)
        .map(|(a, r)| {
            let d = a - r;
            &d * &d
        })
        .sum();
    if err_sq >= eps * eps {
        return Err(DiophantineError::GuaranteeViolated(format!(
            "squared Euclidean error {err_sq} not below eps²"
        )));
    }
    let inf_ceil = alpha.iter().map(|a| ceil(&a.abs())).max().unwrap_or_default();
    let size = bit_size_vector(&result);
    let bound = vector_size_bound(n, &inf_ceil, eps);
    if size > bound {
        return Err(DiophantineError::GuaranteeViolated(format!(
            "bit size {size} exceeds bound {bound}"
        )));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn integers_are_fixed() {
        for eps in [rat(1, 10), int(1), rat(1, 1000)] {
            assert_eq!(approx_scalar(&int(5), &eps).unwrap().value(), int(5));
            assert_eq!(approx_scalar(&int(-5), &eps).unwrap().value(), int(-5));
        }
    }

    #[test]
    fn scalar_examples() {
        assert_eq!(approx_scalar(&rat(31, 100), &rat(1, 10)).unwrap().value(), rat(1, 3));
        assert_eq!(approx_scalar(&rat(1, 2), &rat(1, 2)).unwrap().value(), rat(1, 2));
        assert_eq!(approx_scalar(&rat(-31, 100), &rat(1, 10)).unwrap().value(), rat(-1, 3));
        assert_eq!(approx_scalar(&rat(22, 7), &int(1)).unwrap().value(), int(3));
    }

    #[test]
    fn bad_tolerance() {
        assert!(matches!(
            approx_scalar(&int(1), &int(0)),
            Err(DiophantineError::ToleranceOutOfRange(_))
        ));
        assert!(matches!(
            approx_scalar(&int(1), &int(2)),
            Err(DiophantineError::ToleranceOutOfRange(_))
        ));
        assert_eq!(approx_vector(&[], &rat(1, 2)), Err(DiophantineError::EmptyVector));
    }

    #[test]
    fn vector_examples() {
        assert_eq!(
            approx_vector(&[int(0), int(0), int(0)], &rat(1, 2)).unwrap(),
            vec![int(0), int(0), int(0)]
        );
        assert_eq!(approx_vector(&[rat(31, 100)], &rat(1, 10)).unwrap(), vec![rat(1, 3)]);
        // componentwise tolerance 1/2: q ≤ 2, so 1/2 is reproduced
        assert_eq!(
            approx_vector(&[rat(1, 2), rat(1, 2)], &int(1)).unwrap(),
            vec![rat(1, 2), rat(1, 2)]
        );
    }

    #[test]
    fn size_bound_formula() {
        // n = 2, ⌈‖α‖∞⌉ = 1, eps = 1/4: log₂(4·1·16) = 6 → 2·12
        assert_eq!(vector_size_bound(2, &BigInt::from(1), &rat(1, 4)), BitSize(24));
        // zero vector uses the cap 1
        assert_eq!(vector_size_bound(1, &BigInt::from(0), &int(1)), BitSize(6));
    }

    proptest! {
        #[test]
        fn scalar_guarantees(p in -1_000_000i64..1_000_000, q in 1i64..1_000_000, e in 1i64..2000) {
            let alpha = rat(p, q);
            let eps = rat(1, e);
            let a = approx_scalar(&alpha, &eps).unwrap();
            prop_assert!(verify_scalar(&alpha, &eps, &a).is_ok());
            // a rational whose denominator already fits is reproduced
            if q <= e {
                prop_assert_eq!(a.value(), alpha);
            }
        }

        #[test]
        fn vector_guarantees(v in proptest::collection::vec((-10_000i64..10_000, 1i64..10_000), 1..8),
                             e in 1i64..500) {
            let alpha: Vec<Rational> = v.iter().map(|&(p, q)| rat(p, q)).collect();
            let eps = rat(1, e);
            let r = approx_vector(&alpha, &eps).unwrap();
            let err: Rational = alpha.iter().zip(&r).map(|(a, b)| (a - b) * (a - b)).sum();
            prop_assert!(err < &eps * &eps);
        }
    }
}
