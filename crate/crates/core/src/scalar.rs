//! Numbers the benchmark oracles compute with: plain doubles for sampling,
//! intervals for certification.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::interval::Interval;

pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    /// A decimal constant; interval implementations enclose the real value.
    fn lit(x: f64) -> Self;
    fn pi() -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;

    fn sqr(self) -> Self {
        self * self
    }
}

impl Scalar for f64 {
    fn lit(x: f64) -> Self {
        x
    }

    fn pi() -> Self {
        std::f64::consts::PI
    }

    fn sin(self) -> Self {
        f64::sin(self)
    }

    fn cos(self) -> Self {
        f64::cos(self)
    }

    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

impl Scalar for Interval {
    fn lit(x: f64) -> Self {
        if x.fract() == 0.0 && x.abs() < 9.0e15 {
            Interval::point(x)
        } else {
            Interval::new(x.next_down(), x.next_up())
        }
    }

    fn pi() -> Self {
        Interval::PI
    }

    fn sin(self) -> Self {
        Interval::sin(self)
    }

    fn cos(self) -> Self {
        Interval::cos(self)
    }

    fn sqrt(self) -> Self {
        Interval::sqrt(self)
    }

    fn sqr(self) -> Self {
        Interval::sqr(self)
    }
}

/// A value and its derivative with respect to one variable, both as
/// enclosures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub v: Interval,
    pub d: Interval,
}

impl Dual {
    /// The differentiation variable at `v`.
    pub fn var(v: Interval) -> Self {
        Dual { v, d: Interval::ONE }
    }

    pub fn constant(v: Interval) -> Self {
        Dual { v, d: Interval::ZERO }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual { v: self.v + o.v, d: self.d + o.d }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual { v: self.v - o.v, d: self.d - o.d }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
        }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let v = self.v / o.v;
        Dual {
            v,
            d: (self.d - v * o.d) / o.v,
        }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual { v: -self.v, d: -self.d }
    }
}

impl Scalar for Dual {
    fn lit(x: f64) -> Self {
        Dual::constant(Interval::lit(x))
    }

    fn pi() -> Self {
        Dual::constant(Interval::PI)
    }

    fn sin(self) -> Self {
        Dual {
            v: self.v.sin(),
            d: self.v.cos() * self.d,
        }
    }

    fn cos(self) -> Self {
        Dual {
            v: self.v.cos(),
            d: -(self.v.sin() * self.d),
        }
    }

    fn sqrt(self) -> Self {
        let v = Interval::sqrt(self.v);
        Dual {
            v,
            d: self.d / (Interval::point(2.0) * v),
        }
    }

    fn sqr(self) -> Self {
        Dual {
            v: self.v.sqr(),
            d: Interval::point(2.0) * self.v * self.d,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly<S: Scalar>(x: S) -> S {
        S::lit(0.1) * x.sqr() - S::lit(3.0) * x + x.sin() * S::pi()
    }

    #[test]
    fn interval_encloses_double() {
        for x in [-2.5, 0.0, 0.3, 7.0] {
            assert!(poly(Interval::point(x)).contains(poly(x)));
        }
        assert!(Interval::lit(0.1).contains(0.1) && !Interval::lit(0.1).is_point());
        assert!(Interval::lit(3.0).is_point());
    }

    #[test]
    fn dual_derivative_encloses_difference_quotient() {
        let f = |x: f64| poly(x);
        for x in [-2.0, 0.4, 1.3] {
            let h = 1e-6;
            let fd = (f(x + h) - f(x - h)) / (2.0 * h);
            let d = poly(Dual::var(Interval::new(x - h, x + h))).d;
            assert!(d.contains(fd), "{d:?} {fd}");
        }
        let r = Dual::var(Interval::point(4.0)).sqrt();
        assert!(r.d.contains(0.25));
    }
}
