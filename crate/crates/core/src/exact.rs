//! Exact rational scalars, encoding-length accounting and rational bounds for
//! irrational quantities (square roots, logarithms).
//!
//! All arithmetic is carried by [`num_rational::BigRational`], which keeps
//! every value in lowest terms with a positive denominator.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision exact rational in canonical (reduced) form.
pub type Rational = num_rational::BigRational;

/// Encoding length of a rational object, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BitSize(pub u64);

impl BitSize {
    pub fn bits(self) -> u64 {
        self.0
    }
}

impl Add for BitSize {
    type Output = BitSize;
    fn add(self, rhs: BitSize) -> BitSize {
        BitSize(self.0 + rhs.0)
    }
}

impl AddAssign for BitSize {
    fn add_assign(&mut self, rhs: BitSize) {
        self.0 += rhs.0;
    }
}

impl Sum for BitSize {
    fn sum<I: Iterator<Item = BitSize>>(iter: I) -> BitSize {
        iter.fold(BitSize(0), Add::add)
    }
}

impl fmt::Display for BitSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal '{0}' (expected an integer or p/q)")]
    Malformed(String),
    #[error("zero denominator in '{0}'")]
    ZeroDenominator(String),
}

/// `⌈log₂ x⌉ + 1` for an integer `x ≥ 1`; `1` for `x = 0` (the zero convention).
fn log_term(x: &BigUint) -> u64 {
    if x.is_zero() {
        return 1;
    }
    let bits = x.bits();
    // powers of two have an exact logarithm
    let ceil_log = if x.count_ones() == 1 { bits - 1 } else { bits };
    ceil_log + 1
}

/// `size(p/q) = 1 + ⌈log₂|p| + 1⌉ + ⌈log₂|q| + 1⌉`, with `size(0) = 3`.
pub fn bit_size_scalar(x: &Rational) -> BitSize {
    let p = x.numer().magnitude();
    let q = x.denom().magnitude();
    BitSize(1 + log_term(p) + log_term(q))
}

/// Sum of the component sizes plus the number of components. This is the
/// definition for both vectors and (flattened) matrices.
pub fn bit_size_entries<'a, I>(entries: I) -> BitSize
where
    I: IntoIterator<Item = &'a Rational>,
{
    let mut count = 0u64;
    let mut total = BitSize(0);
    for x in entries {
        total += bit_size_scalar(x);
        count += 1;
    }
    total + BitSize(count)
}

pub fn bit_size_vector(v: &[Rational]) -> BitSize {
    bit_size_entries(v)
}

/// Exact `⌊√n⌋`.
pub fn isqrt_floor(n: &BigUint) -> BigUint {
    n.sqrt()
}

/// Exact `⌈√n⌉` for machine-sized `n`.
pub fn ceil_sqrt(n: u64) -> u64 {
    let r = n.sqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

fn to_biguint(x: &BigInt) -> BigUint {
    x.to_biguint().expect("nonnegative integer")
}

/// Integer `N = p·q·4^k` and `k` such that `√N ≥ 1/relerr`, where `s = p/q`.
fn scaled_radicand(s: &Rational, relerr: &Rational) -> (BigUint, u32) {
    let pq = to_biguint(&(s.numer() * s.denom()));
    // need N ≥ (1/relerr)²
    let inv = relerr.recip();
    let need = &inv * &inv;
    let mut k = 0u32;
    let mut n = pq.clone();
    while Rational::from_integer(BigInt::from(n.clone())) < need {
        k += 1;
        n = &pq << (2 * k as usize);
    }
    (n, k)
}

fn check_sqrt_args(s: &Rational, relerr: &Rational) {
    assert!(!s.is_negative(), "square root of a negative rational");
    assert!(
        relerr.is_positive() && *relerr <= Rational::one(),
        "relative error must lie in (0, 1]"
    );
}

/// Rational `u` with `√s ≤ u ≤ √s·(1 + relerr)`; exact when `s` is the
/// square of a rational.
///
/// # Panics
/// If `s < 0` or `relerr ∉ (0, 1]`.
pub fn sqrt_upper(s: &Rational, relerr: &Rational) -> Rational {
    check_sqrt_args(s, relerr);
    if s.is_zero() {
        return Rational::zero();
    }
    if let Some(r) = exact_sqrt(s) {
        return r;
    }
    let (n, k) = scaled_radicand(s, relerr);
    let root = isqrt_floor(&n) + BigUint::one();
    let den = s.denom().clone() << k as usize;
    Rational::new(BigInt::from(root), den)
}

/// Rational `l` with `√s·(1 − relerr) ≤ l ≤ √s`; exact when `s` is the
/// square of a rational.
///
/// # Panics
/// If `s < 0` or `relerr ∉ (0, 1]`.
pub fn sqrt_lower(s: &Rational, relerr: &Rational) -> Rational {
    check_sqrt_args(s, relerr);
    if s.is_zero() {
        return Rational::zero();
    }
    if let Some(r) = exact_sqrt(s) {
        return r;
    }
    let (n, k) = scaled_radicand(s, relerr);
    let root = isqrt_floor(&n);
    let den = s.denom().clone() << k as usize;
    Rational::new(BigInt::from(root), den)
}

/// `Some(√s)` when `s ≥ 0` is a perfect rational square.
pub fn exact_sqrt(s: &Rational) -> Option<Rational> {
    if s.is_negative() {
        return None;
    }
    let p = to_biguint(s.numer());
    let q = to_biguint(s.denom());
    let rp = isqrt_floor(&p);
    let rq = isqrt_floor(&q);
    if &rp * &rp == p && &rq * &rq == q {
        Some(Rational::new(BigInt::from(rp), BigInt::from(rq)))
    } else {
        None
    }
}

/// Smallest integer `k` with `2^k ≥ x`, for `x > 0`.
///
/// # Panics
/// If `x ≤ 0`.
pub fn ceil_log2(x: &Rational) -> i64 {
    assert!(x.is_positive(), "logarithm of a nonpositive rational");
    let mut k = x.numer().bits() as i64 - x.denom().bits() as i64;
    while pow2(k) < *x {
        k += 1;
    }
    while pow2(k - 1) >= *x {
        k -= 1;
    }
    k
}

/// Exact `2^k` for any integer `k`.
pub fn pow2(k: i64) -> Rational {
    let one = BigInt::one();
    if k >= 0 {
        Rational::from_integer(one << k as usize)
    } else {
        Rational::new(one.clone(), one << (-k) as usize)
    }
}

/// Largest power of two `2^k ≤ x`, for `x > 0`.
pub fn pow2_floor(x: &Rational) -> Rational {
    let k = ceil_log2(x);
    if pow2(k) == *x {
        pow2(k)
    } else {
        pow2(k - 1)
    }
}

/// `⌈x⌉` as an integer.
pub fn ceil(x: &Rational) -> BigInt {
    x.ceil().to_integer()
}

/// Rational enclosure `lo ≤ ln((1 + t)/(1 − t)) ≤ hi` by the atanh series.
fn atanh2_bounds(t: &Rational, terms: u32) -> (Rational, Rational) {
    let t2 = t * t;
    let mut power = t.clone();
    let mut sum = Rational::zero();
    for j in 0..terms {
        sum += &power / Rational::from_integer(BigInt::from(2 * j + 1));
        power *= &t2;
    }
    // tail: Σ_{j≥terms} t^{2j+1}/(2j+1) ≤ t^{2terms+1} / ((2terms+1)(1 − t²))
    let tail = &power / (Rational::from_integer(BigInt::from(2 * terms + 1)) * (Rational::one() - &t2));
    let two = Rational::from_integer(BigInt::from(2));
    (&two * &sum, &two * (sum + tail))
}

/// Dyadic rounding of `x` to `bits` fractional bits, downward or upward.
fn dyadic(x: &Rational, bits: usize, up: bool) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = x * Rational::from_integer(scale.clone());
    let int = if up { scaled.ceil() } else { scaled.floor() };
    int / Rational::from_integer(scale)
}

/// Rational enclosure `(lo, hi)` of `ln x` for `x > 0`, accurate to roughly
/// `2^-60` absolute.
///
/// # Panics
/// If `x ≤ 0`.
pub fn ln_bounds(x: &Rational) -> (Rational, Rational) {
    assert!(x.is_positive(), "logarithm of a nonpositive rational");
    const TERMS: u32 = 24;
    // ln 2 = 2·atanh(1/3)
    let third = Rational::new(BigInt::one(), BigInt::from(3));
    let (ln2_lo, ln2_hi) = atanh2_bounds(&third, TERMS);

    // x = 2^k · y with 1 ≤ y < 2
    let k = ceil_log2(x) - if pow2(ceil_log2(x)) == *x { 0 } else { 1 };
    let y = x / pow2(k);
    let one = Rational::one();
    let log_y = |y: &Rational| {
        let t = (y - &one) / (y + &one);
        atanh2_bounds(&t, TERMS)
    };
    let (lo_y, _) = log_y(&dyadic(&y, 64, false).max(one.clone()));
    let (_, hi_y) = log_y(&dyadic(&y, 64, true));
    let kq = Rational::from_integer(BigInt::from(k));
    let (k_lo, k_hi) = if k >= 0 {
        (&kq * &ln2_lo, &kq * &ln2_hi)
    } else {
        (&kq * &ln2_hi, &kq * &ln2_lo)
    };
    (k_lo + lo_y, k_hi + hi_y)
}

/// Rational upper bound on `ln x`.
pub fn ln_upper(x: &Rational) -> Rational {
    ln_bounds(x).1
}

/// Parse `"p/q"`, `"p"`, `"-p/q"` (ASCII or Unicode minus). Decimal and
/// exponent notations are rejected.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let (negative, body) = if let Some(rest) = s.strip_prefix('-') {
        (true, rest)
    } else if let Some(rest) = s.strip_prefix('\u{2212}') {
        (true, rest)
    } else {
        (false, s)
    };
    let malformed = || ParseRationalError::Malformed(text.to_string());
    let digits = |part: &str| -> Result<BigUint, ParseRationalError> {
        if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        part.parse::<BigUint>().map_err(|_| malformed())
    };
    let (num, den) = match body.split_once('/') {
        Some((p, q)) => (digits(p)?, digits(q)?),
        None => (digits(body)?, BigUint::one()),
    };
    if den.is_zero() {
        return Err(ParseRationalError::ZeroDenominator(text.to_string()));
    }
    let sign = if negative { Sign::Minus } else { Sign::Plus };
    Ok(Rational::new(BigInt::from_biguint(sign, num), BigInt::from(den)))
}

/// Canonical text form: `"p/q"`, or `"p"` when `q = 1`.
pub fn format_rational(x: &Rational) -> String {
    x.to_string()
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Approximate value for diagnostics only.
pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a, I>(values: I) -> BigInt
where
    I: IntoIterator<Item = &'a Rational>,
{
    values.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}
