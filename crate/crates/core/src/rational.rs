//! Exact rational helpers and sign decisions for sums of square roots.
//!
//! Every inequality that involves a square root is decided here by squaring
//! with sign analysis, so callers never touch floating point.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::ParseError;

/// Exact rational number used throughout the crate.
pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `10^-exp` as an exact rational.
pub fn pow10_neg(exp: u32) -> Q {
    Q::new(BigInt::one(), num_traits::pow(BigInt::from(10), exp as usize))
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Serializes a rational as `"p/q"`.
pub fn serialize_q<S: serde::Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_q(x))
}

pub fn parse_q(s: &str) -> Result<Q, ParseError> {
    let s = s.trim();
    let bad = || ParseError::Rational(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Q::from_integer(n))
        }
    }
}

pub fn to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn abs_diff(a: &Q, b: &Q) -> Q {
    (a - b).abs()
}

fn sign_of(x: &Q) -> Ordering {
    x.cmp(&Q::zero())
}

/// Sign of `a + b*sqrt(u)` for `u >= 0`.
pub fn sign_linear_surd(a: &Q, b: &Q, u: &Q) -> Ordering {
    debug_assert!(!u.is_negative());
    if b.is_zero() || u.is_zero() {
        return sign_of(a);
    }
    let sa = sign_of(a);
    let sb = sign_of(b);
    if sa == sb || sa == Ordering::Equal {
        return sb;
    }
    // opposite signs: compare a^2 with b^2 u
    let lhs = a * a;
    let rhs = b * b * u;
    match lhs.cmp(&rhs) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => Ordering::Equal,
    }
}

/// Sign of `a + b*sqrt(u) + c*sqrt(v)` for `u, v >= 0`.
pub fn sign_two_surds(a: &Q, b: &Q, u: &Q, c: &Q, v: &Q) -> Ordering {
    if c.is_zero() || v.is_zero() {
        return sign_linear_surd(a, b, u);
    }
    // compare L = a + b sqrt(u) against R = -c sqrt(v)
    let sl = sign_linear_surd(a, b, u);
    let sr = sign_of(&-c);
    if sl != sr {
        return match (sl, sr) {
            (Ordering::Greater, _) | (Ordering::Equal, Ordering::Less) => Ordering::Greater,
            _ => Ordering::Less,
        };
    }
    // same sign (nonzero since c != 0 and v > 0): compare squares
    // L^2 - R^2 = a^2 + b^2 u - c^2 v + 2ab sqrt(u)
    let a2 = a * a + b * b * u - c * c * v;
    let b2 = a * b * qi(2);
    let diff = sign_linear_surd(&a2, &b2, u);
    match sl {
        Ordering::Greater => diff,
        _ => diff.reverse(),
    }
}

/// A nonnegative algebraic value `num / sqrt(radicand)` with `radicand > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledRoot {
    pub num: Q,
    pub radicand: Q,
}

impl ScaledRoot {
    pub fn rational(x: Q) -> Self {
        ScaledRoot {
            num: x,
            radicand: Q::one(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Exact square of the value.
    pub fn square(&self) -> Q {
        &self.num * &self.num / &self.radicand
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.num) / to_f64(&self.radicand).sqrt()
    }

    /// Decides `|self - other| < bound` where `bound = (alpha + beta*sqrt(w)) / sqrt(den)`,
    /// with `alpha, beta >= 0`. Returns the ordering of `|self - other|` against the bound.
    pub fn cmp_abs_diff(&self, other: &ScaledRoot, bound: &SurdBound) -> Ordering {
        // |x - y|^2 = p^2/A + q^2/B - 2pq/sqrt(AB)
        // bound^2  = (alpha^2 + beta^2 w + 2 alpha beta sqrt(w)) / den
        let p2a = self.square();
        let q2b = other.square();
        let cross = &self.num * &other.num * qi(-2);
        let ab = &self.radicand * &other.radicand;
        let bound_rat = (&bound.alpha * &bound.alpha + &bound.beta * &bound.beta * &bound.w)
            / &bound.den;
        let bound_surd = &bound.alpha * &bound.beta * qi(2) / &bound.den;
        // sign of lhs - rhs = (p2a + q2b - bound_rat) + cross*sqrt(1/AB) - bound_surd*sqrt(w)
        let inv_ab = Q::one() / ab;
        sign_two_surds(
            &(p2a + q2b - bound_rat),
            &cross,
            &inv_ab,
            &-bound_surd,
            &bound.w,
        )
    }
}

/// A positive bound of the form `(alpha + beta*sqrt(w)) / sqrt(den)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurdBound {
    pub alpha: Q,
    pub beta: Q,
    pub w: Q,
    pub den: Q,
}

impl SurdBound {
    pub fn to_f64(&self) -> f64 {
        (to_f64(&self.alpha) + to_f64(&self.beta) * to_f64(&self.w).sqrt()) / to_f64(&self.den).sqrt()
    }

    /// Compares a rational `x >= 0` with the bound.
    pub fn cmp_rational(&self, x: &Q) -> Ordering {
        // x - (alpha + beta sqrt w)/sqrt(den): compare x^2 den with (alpha + beta sqrt w)^2
        if x.is_negative() {
            return Ordering::Less;
        }
        let lhs = x * x * &self.den;
        let a = lhs - &self.alpha * &self.alpha - &self.beta * &self.beta * &self.w;
        let b = &self.alpha * &self.beta * qi(-2);
        sign_linear_surd(&a, &b, &self.w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx_sign(x: f64) -> Ordering {
        x.partial_cmp(&0.0).unwrap()
    }

    #[test]
    fn parse_and_format_round_trip() {
        assert_eq!(parse_q("3/6").unwrap(), q(1, 2));
        assert_eq!(format_q(&q(1, 2)), "1/2");
        assert_eq!(format_q(&qi(-4)), "-4");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn linear_surd_signs() {
        // 1 - sqrt(2) < 0
        assert_eq!(sign_linear_surd(&qi(1), &qi(-1), &qi(2)), Ordering::Less);
        // 3 - sqrt(9) = 0
        assert_eq!(sign_linear_surd(&qi(3), &qi(-1), &qi(9)), Ordering::Equal);
        // -1 + sqrt(2) > 0
        assert_eq!(sign_linear_surd(&qi(-1), &qi(1), &qi(2)), Ordering::Greater);
    }

    #[test]
    fn two_surds_match_floating_point_off_boundary() {
        let cases = [
            (1, 1, 2, -1, 3),
            (-3, 1, 2, 1, 3),
            (0, 2, 5, -3, 2),
            (5, -2, 7, -1, 2),
            (-1, 1, 1, 0, 4),
        ];
        for (a, b, u, c, v) in cases {
            let f = a as f64 + b as f64 * (u as f64).sqrt() + c as f64 * (v as f64).sqrt();
            let exact = sign_two_surds(&qi(a), &qi(b), &qi(u), &qi(c), &qi(v));
            assert_eq!(exact, approx_sign(f), "case {:?}", (a, b, u, c, v));
        }
        // 3 sqrt(2) - sqrt(18) = 0
        assert_eq!(
            sign_two_surds(&qi(0), &qi(3), &qi(2), &qi(-1), &qi(18)),
            Ordering::Equal
        );
        // 1 + sqrt(2) - sqrt(18) < 0
        assert_eq!(
            sign_two_surds(&qi(1), &qi(1), &qi(2), &qi(-1), &qi(18)),
            Ordering::Less
        );
    }

    #[test]
    fn scaled_root_difference_against_bound() {
        // x = 1/sqrt(2), y = 0, bound = 1/sqrt(2) exactly -> Equal
        let x = ScaledRoot { num: qi(1), radicand: qi(2) };
        let y = ScaledRoot::rational(qi(0));
        let bound = SurdBound { alpha: qi(1), beta: qi(0), w: qi(0), den: qi(2) };
        assert_eq!(x.cmp_abs_diff(&y, &bound), Ordering::Equal);
        let looser = SurdBound { alpha: qi(1), beta: qi(0), w: qi(0), den: qi(1) };
        assert_eq!(x.cmp_abs_diff(&y, &looser), Ordering::Less);
    }
}
