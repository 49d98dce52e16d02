//! Scalar fields used for rigidity-matrix arithmetic.
//!
//! Rank and determinant decisions default to a random 62-bit prime field;
//! rationals give exact real certificates; `f64` is kept for velocities
//! handed to engineering consumers.

use std::fmt::Debug;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Which arithmetic a computation runs in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalarMode {
    ExactRational,
    PrimeField,
    Float64,
}

impl ScalarMode {
    pub fn is_exact(self) -> bool {
        !matches!(self, ScalarMode::Float64)
    }
}

pub trait Field: Clone + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse. `a` must be nonzero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn from_rational(&self, q: &BigRational) -> Self::Elem;

    /// Size of a pivot candidate; `None` for exact fields where any nonzero
    /// pivot is as good as another.
    fn magnitude(&self, _a: &Self::Elem) -> Option<f64> {
        None
    }

    /// Zero test during elimination, relative to the largest input entry.
    fn is_negligible(&self, a: &Self::Elem, _scale: f64) -> bool {
        self.is_zero(a)
    }

    fn from_i64(&self, x: i64) -> Self::Elem {
        self.from_rational(&BigRational::from_integer(BigInt::from(x)))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(a, &self.inv(b))
    }
}

/// Integers modulo a prime below 2^63.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        assert!(p > 2 && p < (1 << 63) && is_prime_u64(p), "{p} is not an odd prime below 2^63");
        PrimeField { p }
    }

    /// A uniformly drawn prime in `[2^61, 2^62)`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let candidate = rng.gen_range((1u64 << 61)..(1u64 << 62)) | 1;
            if is_prime_u64(candidate) {
                return PrimeField { p: candidate };
            }
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn reduce_bigint(&self, x: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        let r = x.mod_floor(&p);
        r.to_u64().expect("residue fits in u64")
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul_mod(acc, base, self.p);
            }
            base = mul_mod(base, base, self.p);
            exp >>= 1;
        }
        acc
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = *a as u128 + *b as u128;
        (s % self.p as u128) as u64
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.p - (b - a)
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> u64 {
        debug_assert!(*a != 0);
        self.pow(*a, self.p - 2)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn from_rational(&self, q: &BigRational) -> u64 {
        let num = self.reduce_bigint(q.numer());
        let den = self.reduce_bigint(q.denom());
        assert!(den != 0, "denominator vanishes modulo {}", self.p);
        self.mul(&num, &self.inv(&den))
    }
}

/// Exact rational arithmetic.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn from_rational(&self, q: &BigRational) -> BigRational {
        q.clone()
    }
}

/// Double precision with a relative zero tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reals {
    pub tol: f64,
}

impl Default for Reals {
    fn default() -> Self {
        Reals { tol: DEFAULT_TOL }
    }
}

/// Relative tolerance for float-mode rank and residual decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

impl Field for Reals {
    type Elem = f64;

    fn zero(&self) -> f64 {
        0.0
    }
    fn one(&self) -> f64 {
        1.0
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn sub(&self, a: &f64, b: &f64) -> f64 {
        a - b
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn neg(&self, a: &f64) -> f64 {
        -a
    }
    fn inv(&self, a: &f64) -> f64 {
        1.0 / a
    }
    fn is_zero(&self, a: &f64) -> bool {
        *a == 0.0
    }
    fn from_rational(&self, q: &BigRational) -> f64 {
        rational_to_f64(q)
    }
    fn magnitude(&self, a: &f64) -> Option<f64> {
        Some(a.abs())
    }
    fn is_negligible(&self, a: &f64, scale: f64) -> bool {
        a.abs() <= self.tol * scale.max(f64::MIN_POSITIVE)
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Fallback for values whose parts overflow f64 individually.
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Exact rational value of a finite double.
pub fn f64_to_rational(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Renders a rational as `"n"` or `"n/d"`.
pub fn rational_to_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rational_sign(q: &BigRational) -> Sign {
    if q.is_zero() {
        Sign::NoSign
    } else if q.is_positive() {
        Sign::Plus
    } else {
        Sign::Minus
    }
}
