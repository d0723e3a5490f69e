//! Double-double arithmetic.
//!
//! A [`DoubleDouble`] is an unevaluated sum `hi + lo` of two `f64` with
//! `|lo| <= ulp(hi) / 2`, giving roughly 106 bits of significand. Products
//! use Dekker splitting so nothing here depends on a hardware FMA, which keeps
//! the type usable without `std`.
//!
//! The [`Real`] trait abstracts over `f64` and `DoubleDouble` so the same
//! residue and quadrature code can run at either precision.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Scalar operations shared by `f64` and [`DoubleDouble`].
pub trait Real:
    Copy
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + MulAssign
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn powi(self, n: i32) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    /// `ln(1 + e^x)` without overflow for large `x`.
    fn ln_1p_exp(self) -> Self {
        if self.to_f64() > 0.0 {
            self + (-self).exp().ln_1p()
        } else {
            self.exp().ln_1p()
        }
    }

    /// `ln(1 + x)`.
    fn ln_1p(self) -> Self;
}

impl Real for f64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn exp(self) -> Self {
        libm::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        libm::log(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        libm::sqrt(self)
    }
    #[inline]
    fn abs(self) -> Self {
        libm::fabs(self)
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        powi_by_squaring(self, n)
    }
    #[inline]
    fn ln_1p(self) -> Self {
        libm::log1p(self)
    }
}

fn powi_by_squaring<T: Real>(x: T, n: i32) -> T {
    let mut base = x;
    let mut e = n.unsigned_abs();
    let mut acc = T::one();
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    if n < 0 {
        T::one() / acc
    } else {
        acc
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let err = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, err)
}

/// Double-double number `hi + lo`.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    pub const LN2: Self = Self {
        hi: core::f64::consts::LN_2,
        lo: 2.319_046_813_846_299_6e-17,
    };

    #[inline]
    pub const fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    /// Renormalizes an arbitrary pair.
    #[inline]
    pub fn from_parts(hi: f64, lo: f64) -> Self {
        let (h, l) = two_sum(hi, lo);
        Self { hi: h, lo: l }
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let (p1, p2) = two_prod(q1, b);
        let (s, e) = two_sum(self.hi, -p1);
        let e = e + self.lo - p2;
        let (hi, lo) = quick_two_sum(q1, (s + e) / b);
        Self { hi, lo }
    }

    fn mul_pow2(self, k: i32) -> Self {
        let s = libm::scalbn(1.0, k);
        Self {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    fn exp_dd(self) -> Self {
        if self.hi > 709.78 {
            return Self::new(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Self::ZERO;
        }
        if self.hi == 0.0 {
            return Self::ONE;
        }
        // exp(x) = 2^k * exp(r)^512, |r| <= ln2/1024
        let k = libm::round(self.hi / Self::LN2.hi);
        let r = (self - Self::LN2 * Self::new(k)).mul_pow2(-9);

        // exp(r) - 1 by Taylor series
        let mut term = r;
        let mut sum = r;
        let mut n = 2.0;
        loop {
            term = (term * r).div_f64(n);
            sum += term;
            if libm::fabs(term.hi) <= 1e-34 * libm::fabs(sum.hi) || n > 30.0 {
                break;
            }
            n += 1.0;
        }
        // (1 + s)^2 - 1 = 2s + s^2, nine times
        for _ in 0..9 {
            sum = sum.mul_pow2(1) + sum * sum;
        }
        (sum + Self::ONE).mul_pow2(k as i32)
    }

    fn ln_dd(self) -> Self {
        if self.hi <= 0.0 {
            return Self::new(f64::NAN);
        }
        if self.hi == 1.0 && self.lo == 0.0 {
            return Self::ZERO;
        }
        // One Newton step on exp(y) = x doubles the f64 starting accuracy.
        let y = Self::new(libm::log(self.hi));
        y + self * (-y).exp_dd() - Self::ONE
    }

    fn ln_1p_dd(self) -> Self {
        if libm::fabs(self.hi) < 1e-3 {
            // atanh form: ln(1+x) = 2 atanh(x / (2 + x))
            let t = self / (Self::new(2.0) + self);
            let t2 = t * t;
            let mut pow = t;
            let mut sum = t;
            let mut k = 3.0;
            loop {
                pow *= t2;
                let term = pow.div_f64(k);
                sum += term;
                if libm::fabs(term.hi) <= 1e-34 * libm::fabs(sum.hi) || k > 60.0 {
                    break;
                }
                k += 2.0;
            }
            sum.mul_pow2(1)
        } else {
            (Self::ONE + self).ln_dd()
        }
    }

    fn sqrt_dd(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                Self::ZERO
            } else {
                Self::new(f64::NAN)
            };
        }
        let x = libm::sqrt(self.hi);
        let xd = Self::new(x);
        let (p, e) = two_prod(x, x);
        let resid = (self - Self::from_parts(p, e)) / (xd + xd);
        xd + resid
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleDouble({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.hi, f)
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::new(x)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p1, p2) = two_prod(self.hi, b.hi);
        let p2 = p2 + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p1, p2);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    #[inline]
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b * Self::new(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Self::new(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::new(q3)
    }
}

impl AddAssign for DoubleDouble {
    #[inline]
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}

impl SubAssign for DoubleDouble {
    #[inline]
    fn sub_assign(&mut self, b: Self) {
        *self = *self - b;
    }
}

impl MulAssign for DoubleDouble {
    #[inline]
    fn mul_assign(&mut self, b: Self) {
        *self = *self * b;
    }
}

impl Real for DoubleDouble {
    #[inline]
    fn from_f64(x: f64) -> Self {
        Self::new(x)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
    fn exp(self) -> Self {
        self.exp_dd()
    }
    fn ln(self) -> Self {
        self.ln_dd()
    }
    fn sqrt(self) -> Self {
        self.sqrt_dd()
    }
    #[inline]
    fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }
    fn powi(self, n: i32) -> Self {
        powi_by_squaring(self, n)
    }
    fn ln_1p(self) -> Self {
        self.ln_1p_dd()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(x: f64) -> DoubleDouble {
        DoubleDouble::new(x)
    }

    fn rel(a: DoubleDouble, b: DoubleDouble) -> f64 {
        ((a - b) / b).abs().to_f64()
    }

    #[test]
    fn division_roundtrip_is_exact_to_dd() {
        let third = dd(1.0) / dd(3.0);
        let back = third * dd(3.0);
        assert!(rel(back, dd(1.0)) < 1e-31);
    }

    #[test]
    fn sqrt_squares_back() {
        for &x in &[2.0, 3.0, 1e-20, 7.5e12] {
            let r = dd(x).sqrt();
            assert!(rel(r * r, dd(x)) < 1e-31, "x = {x}");
        }
    }

    #[test]
    fn exp_ln_inverse() {
        for &x in &[-40.0, -3.25, -1e-12, 0.5, 1.0, 17.0, 300.0] {
            let y = dd(x).exp().ln();
            assert!(
                (y - dd(x)).abs().to_f64() <= 1e-30 * x.abs().max(1.0),
                "x = {x}"
            );
        }
    }

    #[test]
    fn exp_one_matches_e() {
        // e = 2.718281828459045235360287471352662...
        let e = DoubleDouble::from_parts(core::f64::consts::E, 1.445_646_891_729_250_2e-16);
        assert!(rel(dd(1.0).exp(), e) < 2e-31);
    }

    #[test]
    fn ln_1p_small_argument() {
        let x = dd(1e-20);
        let l = x.ln_1p();
        // ln(1+x) = x - x^2/2 + ...
        assert!(rel(l, x - x * x / dd(2.0)) < 1e-30);
    }

    #[test]
    fn powi_negative_exponent() {
        let x = dd(1.5).powi(-3);
        assert!(rel(x, dd(8.0) / dd(27.0)) < 1e-31);
        assert_eq!(2.0f64.powi(10), 1024.0);
        assert_eq!(Real::powi(2.0f64, -2), 0.25);
    }

    #[test]
    fn ln_1p_exp_is_stable_for_large_arguments() {
        let big = Real::ln_1p_exp(800.0f64);
        assert!((big - 800.0).abs() < 1e-12);
        let small = Real::ln_1p_exp(-800.0f64);
        assert!((0.0..1e-300).contains(&small));
    }
}
