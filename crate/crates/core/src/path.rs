//! Rational bounds along the central path: admissible ranges of the path
//! parameter in each phase, the dual norm bound, and the rounding
//! tolerances derived from them.
//!
//! Irrational constants are replaced by rational bounds on the safe side:
//! `√n → ⌈√n⌉`, `1/(1 − 1/e) → 8/5`, Frobenius norms by [`sqrt_upper`] of
//! their exact squares. Every tolerance produced here is therefore no larger
//! than its real-valued counterpart.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::{bit_size_scalar, ceil_sqrt, rat, sqrt_lower, sqrt_upper, Rational};
use crate::linalg::SymMatrix;
use crate::model::SdpProblem;

/// `8/5 ≥ 1/(1 − 1/e) ≈ 1.582`.
pub fn kappa() -> Rational {
    rat(8, 5)
}

/// Relative slack used for every rational square-root surrogate.
pub fn sqrt_slack() -> Rational {
    rat(1, 4)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("objective is zero after projection onto ker A")]
    DegenerateObjective,
}

fn from_usize(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n as u64))
}

/// Rational upper bound on `‖S(η)‖_F` along the dual central path:
/// `⌈√n⌉·κ·(s0_inner + n/(r·η²))/r`.
///
/// # Panics
/// If `eta ≤ 0` or `r ≤ 0`.
pub fn dual_norm_bound(eta: &Rational, s0_inner: &Rational, n: usize, r: &Rational) -> Rational {
    assert!(eta.is_positive(), "eta must be positive");
    assert!(r.is_positive(), "r must be positive");
    let s = from_usize(ceil_sqrt(n as u64) as usize);
    let tail = from_usize(n) / (r * eta * eta);
    s * kappa() * (s0_inner + tail) / r
}

/// `⟨X, S + 2‖S‖_∞ I⟩` (with `S` possibly negated by the caller).
fn shifted_inner(x: &SymMatrix, s: &SymMatrix) -> Rational {
    let shift = SymMatrix::identity(s.n()).scale(&(Rational::from_integer(2.into()) * s.max_row_sum()));
    x.inner(&s.add(&shift))
}

/// Phase-one rounding tolerance `ε₁`, from
/// `1/ε₁ = 17⌈√n⌉κ/r · (⟨X₀, −G + 2‖G‖_∞ I⟩ + n(18n(1 + R/r))²/r)`
/// where `G = π_L(X₀⁻¹)`.
pub fn rounding_tolerance_phase1(problem: &SdpProblem, gstar: &SymMatrix) -> Rational {
    let n = from_usize(problem.n());
    let (r, big_r) = (problem.r(), problem.big_r());
    let s = from_usize(ceil_sqrt(problem.n() as u64) as usize);
    let inner = shifted_inner(problem.x0(), &gstar.neg());
    let spread = rat(18, 1) * &n * (Rational::one() + big_r / r);
    let inv = rat(17, 1) * s * kappa() / r * (inner + &n * &spread * &spread / r);
    inv.recip()
}

/// Phase-two rounding tolerance `ε₂`, from
/// `1/ε₂ = 17⌈√n⌉³κ/(rε) · ((R + ‖X₀‖_F)‖C + 2‖C‖_∞ I‖_F + 36n/(r³‖C‖²_F))`
/// with `C` the projected objective.
pub fn rounding_tolerance_phase2(problem: &SdpProblem, chat: &SymMatrix) -> Result<Rational, PathError> {
    let c_sq = chat.norm_sq();
    if c_sq.is_zero() {
        return Err(PathError::DegenerateObjective);
    }
    let n = from_usize(problem.n());
    let (r, big_r, eps) = (problem.r(), problem.big_r(), problem.epsilon());
    let s = from_usize(ceil_sqrt(problem.n() as u64) as usize);
    let slack = sqrt_slack();
    let x0_norm = sqrt_upper(&problem.x0().norm_sq(), &slack);
    let shift = SymMatrix::identity(problem.n()).scale(&(Rational::from_integer(2.into()) * chat.max_row_sum()));
    let shifted_norm = sqrt_upper(&chat.add(&shift).norm_sq(), &slack);
    let body = (big_r + x0_norm) * shifted_norm + rat(36, 1) * &n / (r * r * r * &c_sq);
    let inv = rat(17, 1) * &s * &s * &s * kappa() / (r * eps) * body;
    Ok(inv.recip())
}

/// Ranges of the path parameters and the rounding tolerances of both phases.
#[derive(Debug, Clone, PartialEq)]
pub struct PathBounds {
    pub nu_lo: Rational,
    pub nu_hi: Rational,
    pub eta_lo: Rational,
    pub eta_hi: Rational,
    pub eps1: Rational,
    pub eps2: Rational,
    pub eps_bar: Rational,
    /// Barrier parameter bound `ϑ_f ≤ n`.
    pub theta_f: Rational,
    pub sqrt_theta_ceil: u64,
}

impl PathBounds {
    /// `problem` carries the original data; `chat = π_L(C)` and
    /// `gstar = π_L(X₀⁻¹)`.
    pub fn new(problem: &SdpProblem, chat: &SymMatrix, gstar: &SymMatrix) -> Result<Self, PathError> {
        let n = from_usize(problem.n());
        let (r, big_r) = (problem.r(), problem.big_r());
        let nu_lo = (rat(18, 1) * &n * (Rational::one() + big_r / r)).recip();
        let c_norm_lo = sqrt_lower(&chat.norm_sq(), &sqrt_slack());
        let eta_lo = r * c_norm_lo / rat(6, 1);
        let eta_hi = &n / problem.epsilon();
        let eps1 = rounding_tolerance_phase1(problem, gstar);
        let eps2 = rounding_tolerance_phase2(problem, chat)?;
        let eps_bar = eps1.clone().min(eps2.clone());
        Ok(PathBounds {
            nu_lo,
            nu_hi: Rational::one(),
            eta_lo,
            eta_hi,
            eps1,
            eps2,
            eps_bar,
            theta_f: n,
            sqrt_theta_ceil: ceil_sqrt(problem.n() as u64),
        })
    }
}

/// Explicit encoding-length budget for `log₂(1/ε̄)`:
/// `64 + 12⌈log₂(n+1)⌉ + 4·size(r) + 2·size(R) + size(ε) + 2·size(Ĉ) +
/// size(X₀) + size(G)`, with matrix sizes as defined for rational matrices.
pub fn tolerance_log_budget(problem: &SdpProblem, chat: &SymMatrix, gstar: &SymMatrix) -> u64 {
    let log_n = 64 - (problem.n() as u64 + 1).leading_zeros() as u64;
    64 + 12 * log_n
        + 4 * bit_size_scalar(problem.r()).bits()
        + 2 * bit_size_scalar(problem.big_r()).bits()
        + bit_size_scalar(problem.epsilon()).bits()
        + 2 * chat.bit_size().bits()
        + problem.x0().bit_size().bits()
        + gstar.bit_size().bits()
}
