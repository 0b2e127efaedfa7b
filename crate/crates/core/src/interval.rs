//! Closed floating-point intervals with outward rounding.
//!
//! Bounds are `f64`; the lower bound may be `-inf` and the upper bound `+inf`.
//! The empty set is a distinguished value ([`Interval::EMPTY`]) that
//! propagates through every operation.
//!
//! Rounding: the basic operations `+ - * /` and `sqrt` are correctly rounded
//! by IEEE-754, so their exact error is recovered with error-free
//! transformations (two-sum, fused multiply-add) and the bound is moved one
//! ulp outward only when the native result is inexact in the wrong
//! direction. Transcendental functions are always widened by one ulp per
//! bound, which assumes the platform libm is accurate to within one ulp.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum IntervalError {
    #[error("NaN is not a valid interval bound")]
    NanBound,
    #[error("inverted interval bounds [{lo}, {hi}]")]
    Inverted { lo: f64, hi: f64 },
}

/// Smallest double strictly greater than `x`. `next_float(+inf) = +inf`.
pub fn next_float(x: f64) -> Result<f64, IntervalError> {
    if x.is_nan() {
        return Err(IntervalError::NanBound);
    }
    Ok(up1(x))
}

/// Greatest double strictly smaller than `x`. `prev_float(-inf) = -inf`.
pub fn prev_float(x: f64) -> Result<f64, IntervalError> {
    if x.is_nan() {
        return Err(IntervalError::NanBound);
    }
    Ok(dn1(x))
}

#[inline]
fn up1(x: f64) -> f64 {
    if x == f64::INFINITY {
        x
    } else {
        x.next_up()
    }
}

#[inline]
fn dn1(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        x
    } else {
        x.next_down()
    }
}

// Below this magnitude the error term of an FMA-based transformation may
// itself underflow, so results are always widened.
const TINY: f64 = 1e-290;

mod round {
    use super::{dn1, up1, TINY};

    #[inline]
    fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
        let bb = s - a;
        (a - (s - bb)) + (b - bb)
    }

    pub fn add_dn(a: f64, b: f64) -> f64 {
        let s = a + b;
        if s.is_nan() {
            return f64::NEG_INFINITY;
        }
        if s.is_infinite() {
            return if s > 0.0 && a.is_finite() && b.is_finite() {
                f64::MAX
            } else {
                s
            };
        }
        if two_sum_err(a, b, s) < 0.0 {
            dn1(s)
        } else {
            s
        }
    }

    pub fn add_up(a: f64, b: f64) -> f64 {
        let s = a + b;
        if s.is_nan() {
            return f64::INFINITY;
        }
        if s.is_infinite() {
            return if s < 0.0 && a.is_finite() && b.is_finite() {
                -f64::MAX
            } else {
                s
            };
        }
        if two_sum_err(a, b, s) > 0.0 {
            up1(s)
        } else {
            s
        }
    }

    /// Sign of the rounding error of `a * b`: `Some(e)` with `a*b = p + e`,
    /// `None` when the error cannot be trusted.
    #[inline]
    fn mul_err(a: f64, b: f64, p: f64) -> Option<f64> {
        if p.abs() < TINY {
            return None;
        }
        Some(a.mul_add(b, -p))
    }

    pub fn mul_dn(a: f64, b: f64) -> f64 {
        if a == 0.0 || b == 0.0 {
            return 0.0;
        }
        let p = a * b;
        if p.is_infinite() {
            return if p > 0.0 && a.is_finite() && b.is_finite() {
                f64::MAX
            } else {
                p
            };
        }
        match mul_err(a, b, p) {
            Some(e) if e >= 0.0 => p,
            // an underflowed positive product stays non-negative
            _ if (a > 0.0) == (b > 0.0) => dn1(p).max(0.0),
            _ => dn1(p),
        }
    }

    pub fn mul_up(a: f64, b: f64) -> f64 {
        if a == 0.0 || b == 0.0 {
            return 0.0;
        }
        let p = a * b;
        if p.is_infinite() {
            return if p < 0.0 && a.is_finite() && b.is_finite() {
                -f64::MAX
            } else {
                p
            };
        }
        match mul_err(a, b, p) {
            Some(e) if e <= 0.0 => p,
            _ if (a > 0.0) != (b > 0.0) => up1(p).min(0.0),
            _ => up1(p),
        }
    }

    /// Signed residual `r` with `a/b = q + r/b`; `None` if untrustworthy.
    #[inline]
    fn div_residual(a: f64, b: f64, q: f64) -> Option<f64> {
        if q.abs() < TINY || a.abs() < TINY || !b.is_finite() {
            return None;
        }
        let r = -(q.mul_add(b, -a));
        Some(if b > 0.0 { r } else { -r })
    }

    // `b` must be non-zero.
    pub fn div_dn(a: f64, b: f64) -> f64 {
        if a == 0.0 {
            return 0.0;
        }
        if a.is_infinite() && b.is_infinite() {
            return if a.signum() == b.signum() {
                0.0
            } else {
                f64::NEG_INFINITY
            };
        }
        let q = a / b;
        if q.is_infinite() {
            return if q > 0.0 && a.is_finite() { f64::MAX } else { q };
        }
        if b.is_infinite() {
            // finite / inf: the true limit is 0 approached from the sign side
            return if q == 0.0 && (a.signum() != b.signum()) {
                -0.0
            } else {
                q
            };
        }
        match div_residual(a, b, q) {
            Some(r) if r >= 0.0 => q,
            _ if (a > 0.0) == (b > 0.0) => dn1(q).max(0.0),
            _ => dn1(q),
        }
    }

    pub fn div_up(a: f64, b: f64) -> f64 {
        if a == 0.0 {
            return 0.0;
        }
        if a.is_infinite() && b.is_infinite() {
            return if a.signum() == b.signum() {
                f64::INFINITY
            } else {
                0.0
            };
        }
        let q = a / b;
        if q.is_infinite() {
            return if q < 0.0 && a.is_finite() {
                -f64::MAX
            } else {
                q
            };
        }
        if b.is_infinite() {
            return q;
        }
        match div_residual(a, b, q) {
            Some(r) if r <= 0.0 => q,
            _ if (a > 0.0) != (b > 0.0) => up1(q).min(0.0),
            _ => up1(q),
        }
    }

    pub fn sqrt_dn(x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let s = x.sqrt();
        if s.is_infinite() {
            return s;
        }
        if x < TINY {
            return dn1(s).max(0.0);
        }
        let r = -(s.mul_add(s, -x));
        if r >= 0.0 {
            s
        } else {
            dn1(s)
        }
    }

    pub fn sqrt_up(x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let s = x.sqrt();
        if s.is_infinite() {
            return s;
        }
        if x < TINY {
            return up1(s);
        }
        let r = -(s.mul_add(s, -x));
        if r <= 0.0 {
            s
        } else {
            up1(s)
        }
    }

    /// `x^n` rounded down, for `x >= 0`.
    pub fn powi_dn(x: f64, n: u32) -> f64 {
        let mut acc = 1.0;
        let mut base = x;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_dn(acc, base);
            }
            e >>= 1;
            if e > 0 {
                base = mul_dn(base, base);
            }
        }
        acc
    }

    /// `x^n` rounded up, for `x >= 0`.
    pub fn powi_up(x: f64, n: u32) -> f64 {
        let mut acc = 1.0;
        let mut base = x;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_up(acc, base);
            }
            e >>= 1;
            if e > 0 {
                base = mul_up(base, base);
            }
        }
        acc
    }
}

pub(crate) use round::{powi_dn, powi_up};

/// A closed interval `[lo, hi]` of doubles, or the empty set.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const EMPTY: Interval = Interval {
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
    };
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };
    pub const NON_NEGATIVE: Interval = Interval {
        lo: 0.0,
        hi: f64::INFINITY,
    };
    pub const NON_POSITIVE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: 0.0,
    };
    /// Tightest enclosure of the real number pi.
    pub const PI: Interval = Interval {
        lo: PI,
        hi: 3.1415926535897936,
    };

    /// Panics on NaN or inverted bounds; use [`Interval::try_new`] for input
    /// that has not been validated.
    pub fn new(lo: f64, hi: f64) -> Self {
        match Self::try_new(lo, hi) {
            Ok(i) => i,
            Err(e) => panic!("{e}"),
        }
    }

    pub fn try_new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if lo.is_nan() || hi.is_nan() {
            return Err(IntervalError::NanBound);
        }
        if lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(IntervalError::Inverted { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: f64) -> Self {
        Self::new(x, x)
    }

    /// Builds `[lo, hi]`, returning EMPTY when `lo > hi`.
    fn ordered(lo: f64, hi: f64) -> Self {
        if lo <= hi {
            Interval { lo, hi }
        } else {
            Self::EMPTY
        }
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        !(self.lo <= self.hi)
    }

    pub fn is_bounded(&self) -> bool {
        !self.is_empty() && self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// `hi <= nextFloat(lo)`: the interval cannot be split any further.
    pub fn is_canonical(&self) -> bool {
        !self.is_empty() && self.hi <= up1(self.lo)
    }

    /// Width rounded up; zero for EMPTY.
    pub fn width(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            round::add_up(self.hi, -self.lo)
        }
    }

    /// A representable point inside the interval, strictly interior whenever
    /// the interval is not canonical.
    pub fn mid(&self) -> f64 {
        self.split_point(1, 2)
    }

    /// The `i`-th of the `k - 1` interior cut points of a `k`-way split.
    /// Cut points are strictly increasing in `i` as long as the interval has
    /// enough representable points.
    pub(crate) fn split_point(&self, i: usize, k: usize) -> f64 {
        debug_assert!(!self.is_empty() && i > 0 && i < k);
        let lo = self.lo.max(-f64::MAX);
        let hi = self.hi.min(f64::MAX);
        let f = i as f64 / k as f64;
        let m = lo * (1.0 - f) + hi * f;
        if m > self.lo && m < self.hi {
            m
        } else {
            let n = up1(self.lo);
            if n < self.hi {
                n
            } else {
                self.lo
            }
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    /// `self ⊆ other`. EMPTY is a subset of everything.
    pub fn subset_of(&self, other: &Interval) -> bool {
        self.is_empty() || (other.lo <= self.lo && self.hi <= other.hi)
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Self::ordered(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        if self.is_empty() {
            return *other;
        }
        if other.is_empty() {
            return *self;
        }
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Shares at least one point with `other`.
    pub fn overlaps(&self, other: &Interval) -> bool {
        !self.intersect(other).is_empty()
    }

    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn sqr(self) -> Interval {
        if self.is_empty() {
            return self;
        }
        let (a, b) = (self.lo, self.hi);
        if a >= 0.0 {
            Interval::ordered(round::mul_dn(a, a), round::mul_up(b, b))
        } else if b <= 0.0 {
            Interval::ordered(round::mul_dn(b, b), round::mul_up(a, a))
        } else {
            Interval {
                lo: 0.0,
                hi: round::mul_up(a, a).max(round::mul_up(b, b)),
            }
        }
    }

    pub fn powi(self, n: u32) -> Interval {
        if self.is_empty() {
            return self;
        }
        match n {
            0 => Interval::ONE,
            1 => self,
            2 => self.sqr(),
            _ => {
                let (a, b) = (self.lo, self.hi);
                if n % 2 == 0 {
                    if a >= 0.0 {
                        Interval::ordered(powi_dn(a, n), powi_up(b, n))
                    } else if b <= 0.0 {
                        Interval::ordered(powi_dn(-b, n), powi_up(-a, n))
                    } else {
                        Interval {
                            lo: 0.0,
                            hi: powi_up(-a, n).max(powi_up(b, n)),
                        }
                    }
                } else {
                    let lo = if a >= 0.0 {
                        powi_dn(a, n)
                    } else {
                        -powi_up(-a, n)
                    };
                    let hi = if b >= 0.0 {
                        powi_up(b, n)
                    } else {
                        -powi_dn(-b, n)
                    };
                    Interval::ordered(lo, hi)
                }
            }
        }
    }

    /// Square root after clipping to `[0, +inf]`; EMPTY if nothing is left.
    pub fn sqrt(self) -> Interval {
        let d = self.intersect(&Interval::NON_NEGATIVE);
        if d.is_empty() {
            return d;
        }
        Interval::ordered(round::sqrt_dn(d.lo), round::sqrt_up(d.hi))
    }

    pub fn exp(self) -> Interval {
        if self.is_empty() {
            return self;
        }
        let lo = if self.lo == f64::NEG_INFINITY {
            0.0
        } else {
            dn1(self.lo.exp()).max(0.0)
        };
        let hi = if self.hi == f64::INFINITY {
            f64::INFINITY
        } else {
            up1(self.hi.exp())
        };
        Interval::ordered(lo, hi)
    }

    /// Natural logarithm after clipping to `[0, +inf]`; `log 0 = -inf`.
    /// EMPTY when the clipped domain is empty or reduced to `{0}`.
    pub fn log(self) -> Interval {
        let d = self.intersect(&Interval::NON_NEGATIVE);
        if d.is_empty() || d.hi == 0.0 {
            return Interval::EMPTY;
        }
        let lo = if d.lo == 0.0 {
            f64::NEG_INFINITY
        } else {
            dn1(d.lo.ln())
        };
        let hi = if d.hi == f64::INFINITY {
            f64::INFINITY
        } else {
            up1(d.hi.ln())
        };
        Interval::ordered(lo, hi)
    }

    pub fn sin(self) -> Interval {
        // maxima at pi/2 + 2k pi, minima at -pi/2 + 2k pi
        self.periodic(f64::sin, FRAC_PI_2, -FRAC_PI_2)
    }

    pub fn cos(self) -> Interval {
        // maxima at 2k pi, minima at pi + 2k pi
        self.periodic(f64::cos, 0.0, PI)
    }

    fn periodic(self, f: fn(f64) -> f64, max_at: f64, min_at: f64) -> Interval {
        const UNIT: Interval = Interval { lo: -1.0, hi: 1.0 };
        const LIMIT: f64 = 1e6;
        if self.is_empty() {
            return self;
        }
        let (a, b) = (self.lo, self.hi);
        if !self.is_bounded() || b - a >= 2.0 * PI || a.abs() > LIMIT || b.abs() > LIMIT {
            return UNIT;
        }
        let fa = f(a);
        let fb = f(b);
        let mut lo = dn1(fa.min(fb));
        let mut hi = up1(fa.max(fb));
        // over-approximate which critical points may lie inside [a, b]
        let hits = |phase: f64| {
            let tol = 1e-9;
            let kmin = ((a - phase) / (2.0 * PI) - tol).ceil();
            let kmax = ((b - phase) / (2.0 * PI) + tol).floor();
            kmin <= kmax
        };
        if hits(max_at) {
            hi = 1.0;
        }
        if hits(min_at) {
            lo = -1.0;
        }
        Interval::ordered(lo.max(-1.0), hi.min(1.0))
    }

    /// Hull of `self / rhs`, possibly unbounded when `rhs` contains zero.
    pub fn div_hull(self, rhs: Interval) -> Interval {
        let (p, q) = self.div_split(rhs);
        p.hull(&q)
    }

    /// Extended division returning up to two disjoint pieces; the second is
    /// EMPTY unless `rhs` strictly straddles zero and `self` excludes it.
    pub fn div_split(self, rhs: Interval) -> (Interval, Interval) {
        if self.is_empty() || rhs.is_empty() {
            return (Interval::EMPTY, Interval::EMPTY);
        }
        let (a, b) = (self.lo, self.hi);
        let (c, d) = (rhs.lo, rhs.hi);
        if c == 0.0 && d == 0.0 {
            return (Interval::EMPTY, Interval::EMPTY);
        }
        if a == 0.0 && b == 0.0 {
            return (Interval::ZERO, Interval::EMPTY);
        }
        if !rhs.contains_zero() {
            let cands_lo = [
                round::div_dn(a, c),
                round::div_dn(a, d),
                round::div_dn(b, c),
                round::div_dn(b, d),
            ];
            let cands_hi = [
                round::div_up(a, c),
                round::div_up(a, d),
                round::div_up(b, c),
                round::div_up(b, d),
            ];
            let lo = cands_lo.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = cands_hi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            return (Interval::ordered(lo, hi), Interval::EMPTY);
        }
        let inf = f64::INFINITY;
        let positive = a >= 0.0;
        let negative = b <= 0.0;
        if c == 0.0 {
            // rhs = [0, d], d > 0
            if positive {
                (Interval::ordered(round::div_dn(a, d), inf), Interval::EMPTY)
            } else if negative {
                (Interval::ordered(-inf, round::div_up(b, d)), Interval::EMPTY)
            } else {
                (Interval::ENTIRE, Interval::EMPTY)
            }
        } else if d == 0.0 {
            // rhs = [c, 0], c < 0
            if positive {
                (Interval::ordered(-inf, round::div_up(a, c)), Interval::EMPTY)
            } else if negative {
                (Interval::ordered(round::div_dn(b, c), inf), Interval::EMPTY)
            } else {
                (Interval::ENTIRE, Interval::EMPTY)
            }
        } else if a > 0.0 {
            (
                Interval::ordered(-inf, round::div_up(a, c)),
                Interval::ordered(round::div_dn(a, d), inf),
            )
        } else if b < 0.0 {
            (
                Interval::ordered(-inf, round::div_up(b, d)),
                Interval::ordered(round::div_dn(b, c), inf),
            )
        } else {
            (Interval::ENTIRE, Interval::EMPTY)
        }
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        if self.is_empty() || rhs.is_empty() {
            return Interval::EMPTY;
        }
        Interval::ordered(
            round::add_dn(self.lo, rhs.lo),
            round::add_up(self.hi, rhs.hi),
        )
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        if self.is_empty() || rhs.is_empty() {
            return Interval::EMPTY;
        }
        Interval::ordered(
            round::add_dn(self.lo, -rhs.hi),
            round::add_up(self.hi, -rhs.lo),
        )
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        if self.is_empty() || rhs.is_empty() {
            return Interval::EMPTY;
        }
        let (a, b, c, d) = (self.lo, self.hi, rhs.lo, rhs.hi);
        let lo = round::mul_dn(a, c)
            .min(round::mul_dn(a, d))
            .min(round::mul_dn(b, c))
            .min(round::mul_dn(b, d));
        let hi = round::mul_up(a, c)
            .max(round::mul_up(a, d))
            .max(round::mul_up(b, c))
            .max(round::mul_up(b, d));
        Interval::ordered(lo, hi)
    }
}

impl Div for Interval {
    type Output = Interval;
    fn div(self, rhs: Interval) -> Interval {
        self.div_hull(rhs)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        if self.is_empty() {
            return self;
        }
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl From<[f64; 2]> for Interval {
    fn from([lo, hi]: [f64; 2]) -> Self {
        Interval::new(lo, hi)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "[empty]")
        } else {
            write!(f, "[{:?}, {:?}]", self.lo, self.hi)
        }
    }
}
