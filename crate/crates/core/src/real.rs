//! Scalar abstraction shared by the covector algebra.
//!
//! Ratios of nearly parallel lightlike covectors lose roughly `1/θ²` digits
//! in plain `f64`, so the algebra is generic and can run in double-double.

use std::cmp::Ordering;
use std::fmt::{self, Debug};
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Relative rounding unit of the type.
    const UNIT_ROUNDOFF: f64;

    fn lit(x: f64) -> Self;
    fn as_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;

    fn zero() -> Self {
        Self::lit(0.0)
    }

    fn one() -> Self {
        Self::lit(1.0)
    }

    fn nan() -> Self {
        Self::lit(f64::NAN)
    }

    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }

    fn is_finite(self) -> bool {
        self.as_f64().is_finite()
    }
}

impl Real for f64 {
    const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

    #[inline]
    fn lit(x: f64) -> Self {
        x
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
}

/// Double-double number `hi + lo` with `|lo| ≤ ulp(hi)/2`.
///
/// Products use fused multiply-add, so results carry about 106 bits.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const fn from_parts(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    fn norm(hi: f64, lo: f64) -> Self {
        let (h, l) = quick_two_sum(hi, lo);
        Dd { hi: h, lo: l }
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        Dd::norm(p, e + self.lo * b)
    }

    fn taylor_sin(x: Dd) -> Dd {
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut k = 1.0;
        while term.hi.abs() > 1e-36 * sum.hi.abs().max(1e-300) && k < 80.0 {
            term = -(term * x2) / Dd::lit((k + 1.0) * (k + 2.0));
            sum = sum + term;
            k += 2.0;
        }
        sum
    }

    fn taylor_cos(x: Dd) -> Dd {
        let x2 = x * x;
        let mut term = Dd::lit(1.0);
        let mut sum = term;
        let mut k = 0.0;
        while term.hi.abs() > 1e-36 && k < 80.0 {
            term = -(term * x2) / Dd::lit((k + 1.0) * (k + 2.0));
            sum = sum + term;
            k += 2.0;
        }
        sum
    }

    /// Reduce to `|x| ≤ π` by subtracting a multiple of `2π`.
    fn reduce(self) -> Dd {
        const TWO_PI: Dd = Dd::from_parts(std::f64::consts::TAU, 2.4492935982947064e-16);
        if self.hi.abs() <= std::f64::consts::PI {
            return self;
        }
        let n = (self.hi / TWO_PI.hi).round();
        self - TWO_PI.mul_f64(n)
    }
}

impl Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&(self.hi + self.lo), f)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&o.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&o.lo),
            c => c,
        }
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        Dd::norm(s1, s2 + t2)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        Dd::norm(p, e + (self.hi * b.lo + self.lo * b.hi))
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (h, l) = quick_two_sum(q1, q2);
        Dd { hi: h, lo: l } + Dd::lit(q3)
    }
}

impl Real for Dd {
    // 2^-104
    const UNIT_ROUNDOFF: f64 = 4.930380657631324e-32;

    #[inline]
    fn lit(x: f64) -> Self {
        Dd::from(x)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn sqrt(self) -> Self {
        if self.hi == 0.0 {
            return Dd::lit(0.0);
        }
        if self.hi < 0.0 {
            return Dd::nan();
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let (p, e) = two_prod(ax, ax);
        let diff = (self - Dd::norm(p, e)).hi;
        let (h, l) = two_sum(ax, diff * (x * 0.5));
        Dd::norm(h, l)
    }

    fn sin(self) -> Self {
        Dd::taylor_sin(self.reduce())
    }

    fn cos(self) -> Self {
        Dd::taylor_cos(self.reduce())
    }
}
