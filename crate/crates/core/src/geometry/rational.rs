//! Simplest rationals near floating-point values.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::polycore::{RationalPoly, RealPoly};

/// The rational with the smallest denominator in `[c − τ, c + τ]`; zero when `|c| < τ`.
pub fn rationalize_value(c: f64, tau: f64) -> BigRational {
    let c = BigRational::from_float(c).expect("finite value");
    let tau = BigRational::from_float(tau.abs()).expect("finite tolerance");
    let (lo, hi) = (&c - &tau, &c + &tau);
    if !lo.is_positive() && !hi.is_negative() {
        return BigRational::zero();
    }
    if hi.is_negative() {
        return -simplest_between(-hi, -lo);
    }
    simplest_between(lo, hi)
}

/// Continued-fraction descent for `0 < lo ≤ hi`.
fn simplest_between(lo: BigRational, hi: BigRational) -> BigRational {
    let fl = lo.floor();
    if fl == lo {
        return fl;
    }
    let next = &fl + BigRational::one();
    if next <= hi {
        return next;
    }
    let inner = simplest_between((&hi - &fl).recip(), (&lo - &fl).recip());
    fl + inner.recip()
}

pub fn rationalize(p: &RealPoly, tau: f64) -> RationalPoly {
    p.map_coeffs(|c| rationalize_value(*c, tau))
}

/// Clears denominators and the content of an exact polynomial.
pub fn primitive_part(p: &RationalPoly) -> RationalPoly {
    let mut lcm = BigInt::one();
    let mut gcd = BigInt::zero();
    for (_, c) in p.terms() {
        lcm = lcm.lcm(c.denom());
    }
    for (_, c) in p.terms() {
        gcd = gcd.gcd(&(c.numer() * (&lcm / c.denom())));
    }
    if gcd.is_zero() {
        return p.clone();
    }
    p.scale(&BigRational::new(lcm, gcd))
}
