//! Checked exact rational numbers on `i128`, plus integer power-product
//! comparison helpers.
//!
//! The rest of the crate decides every membership question (window, region,
//! thin set, height bound) through this module, so the invariants here are
//! deliberately strict:
//!
//! * a [`Rat`] is always stored reduced with a positive denominator;
//! * arithmetic is `checked_*` internally — the panicking operator impls
//!   are reserved for call sites whose operands are bounded by construction
//!   (see the coordinate caps in [`crate::surface`]), and the `checked_*`
//!   methods are public for everything user-facing;
//! * comparisons fall back to arbitrary precision instead of saturating.

use num::BigInt;
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// Greatest common divisor of two `i128`s, nonnegative result.
pub fn gcd_i128(a: i128, b: i128) -> i128 {
    num::integer::gcd(a, b)
}

/// Exact reduced rational with `i128` parts. Denominator is always >= 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rat {
    num: i128,
    den: i128,
}

impl Rat {
    pub const ZERO: Rat = Rat { num: 0, den: 1 };
    pub const ONE: Rat = Rat { num: 1, den: 1 };

    /// Build a reduced rational. Panics if `den == 0`.
    pub fn new(num: i128, den: i128) -> Rat {
        assert!(den != 0, "rational with zero denominator");
        let g = gcd_i128(num, den);
        let (mut n, mut d) = if g == 0 { (0, 1) } else { (num / g, den / g) };
        if d < 0 {
            n = -n;
            d = -d;
        }
        Rat { num: n, den: d }
    }

    pub fn int(n: i128) -> Rat {
        Rat { num: n, den: 1 }
    }

    pub fn num(&self) -> i128 {
        self.num
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_negative(&self) -> bool {
        self.num < 0
    }

    pub fn is_positive(&self) -> bool {
        self.num > 0
    }

    pub fn abs(&self) -> Rat {
        Rat { num: self.num.abs(), den: self.den }
    }

    pub fn neg(&self) -> Rat {
        Rat { num: -self.num, den: self.den }
    }

    pub fn recip(&self) -> Rat {
        assert!(self.num != 0, "reciprocal of zero");
        Rat::new(self.den, self.num)
    }

    /// Checked addition; `None` on 128-bit overflow.
    pub fn checked_add(&self, rhs: &Rat) -> Option<Rat> {
        // a/b + c/d = (a*(d/g) + c*(b/g)) / lcm(b,d), g = gcd(b,d).
        let g = gcd_i128(self.den, rhs.den);
        let lhs_scale = rhs.den / g;
        let rhs_scale = self.den / g;
        let num = self
            .num
            .checked_mul(lhs_scale)?
            .checked_add(rhs.num.checked_mul(rhs_scale)?)?;
        let den = self.den.checked_mul(lhs_scale)?;
        Some(Rat::new(num, den))
    }

    pub fn checked_sub(&self, rhs: &Rat) -> Option<Rat> {
        self.checked_add(&rhs.neg())
    }

    /// Checked multiplication with cross-reduction to keep parts small.
    pub fn checked_mul(&self, rhs: &Rat) -> Option<Rat> {
        let g1 = gcd_i128(self.num, rhs.den);
        let g2 = gcd_i128(rhs.num, self.den);
        let (g1, g2) = (g1.max(1), g2.max(1));
        let num = (self.num / g1).checked_mul(rhs.num / g2)?;
        let den = (self.den / g2).checked_mul(rhs.den / g1)?;
        Some(Rat::new(num, den))
    }

    pub fn checked_div(&self, rhs: &Rat) -> Option<Rat> {
        if rhs.num == 0 {
            return None;
        }
        self.checked_mul(&Rat::new(rhs.den, rhs.num))
    }

    /// True iff the value is a *nonzero* square of a rational number.
    pub fn is_nonzero_square(&self) -> bool {
        if self.num <= 0 {
            return false;
        }
        is_square_i128(self.num) && is_square_i128(self.den)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Largest integer `<=` the value.
    pub fn floor(&self) -> i128 {
        self.num.div_euclid(self.den)
    }

    /// Smallest integer `>=` the value.
    pub fn ceil(&self) -> i128 {
        -(-self.num).div_euclid(self.den)
    }
}

/// True iff `n` is a perfect square (negative numbers are not).
pub fn is_square_i128(n: i128) -> bool {
    if n < 0 {
        return false;
    }
    let r = (n as u128).isqrt();
    r * r == n as u128
}

impl std::ops::Add for Rat {
    type Output = Rat;
    fn add(self, rhs: Rat) -> Rat {
        self.checked_add(&rhs).expect("rational addition overflow")
    }
}

impl std::ops::Sub for Rat {
    type Output = Rat;
    fn sub(self, rhs: Rat) -> Rat {
        self.checked_sub(&rhs).expect("rational subtraction overflow")
    }
}

impl std::ops::Mul for Rat {
    type Output = Rat;
    fn mul(self, rhs: Rat) -> Rat {
        self.checked_mul(&rhs).expect("rational multiplication overflow")
    }
}

impl std::ops::Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        self.checked_div(&rhs).expect("rational division by zero or overflow")
    }
}

impl std::ops::Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat::neg(&self)
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Rat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Rat) -> Ordering {
        // Denominators are positive, so compare num1*den2 vs num2*den1,
        // falling back to big integers if the cross products overflow.
        match (
            self.num.checked_mul(other.den),
            other.num.checked_mul(self.den),
        ) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => {
                let a = BigInt::from(self.num) * BigInt::from(other.den);
                let b = BigInt::from(other.num) * BigInt::from(self.den);
                a.cmp(&b)
            }
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = String;

    /// Parses `"p/q"` or a bare integer `"p"`. Decimal notation is
    /// deliberately rejected so window radii stay exact.
    fn from_str(s: &str) -> Result<Rat, String> {
        let s = s.trim();
        if s.contains('.') {
            return Err(format!("decimal {s:?} rejected: write an exact fraction p/q"));
        }
        match s.split_once('/') {
            None => {
                let n: i128 = s.parse().map_err(|e| format!("bad integer {s:?}: {e}"))?;
                Ok(Rat::int(n))
            }
            Some((p, q)) => {
                let p: i128 = p.trim().parse().map_err(|e| format!("bad numerator {p:?}: {e}"))?;
                let q: i128 = q.trim().parse().map_err(|e| format!("bad denominator {q:?}: {e}"))?;
                if q == 0 {
                    return Err("zero denominator".to_string());
                }
                Ok(Rat::new(p, q))
            }
        }
    }
}

/// Compares `prod(base_i^exp_i)` on the left against the right, exactly.
/// Evaluates in `u128` when possible and falls back to big integers.
pub fn prod_pow_cmp(lhs: &[(u128, u32)], rhs: &[(u128, u32)]) -> Ordering {
    fn eval_u128(terms: &[(u128, u32)]) -> Option<u128> {
        let mut acc: u128 = 1;
        for &(base, exp) in terms {
            acc = acc.checked_mul(base.checked_pow(exp)?)?;
        }
        Some(acc)
    }
    // Certified float fast path: each side accumulates well under 100
    // roundings of 2^-53 relative error each, so a relative gap of 1e-12
    // decides the exact comparison with two orders of magnitude to spare.
    // Ties and overflows fall through to the exact evaluations.
    fn eval_f64(terms: &[(u128, u32)]) -> f64 {
        let mut acc = 1.0f64;
        for &(base, exp) in terms {
            let mut pow = 1.0f64;
            let mut sq = base as f64;
            let mut e = exp;
            while e > 0 {
                if e & 1 == 1 {
                    pow *= sq;
                }
                e >>= 1;
                if e > 0 {
                    sq *= sq;
                }
            }
            acc *= pow;
        }
        acc
    }
    let lf = eval_f64(lhs);
    let rf = eval_f64(rhs);
    if lf.is_finite() && rf.is_finite() {
        if lf < rf * (1.0 - 1e-12) {
            return Ordering::Less;
        }
        if lf * (1.0 - 1e-12) > rf {
            return Ordering::Greater;
        }
    }
    match (eval_u128(lhs), eval_u128(rhs)) {
        (Some(a), Some(b)) => a.cmp(&b),
        _ => {
            let eval_big = |terms: &[(u128, u32)]| {
                let mut acc = num::BigUint::from(1u32);
                for &(base, exp) in terms {
                    acc *= num::BigUint::from(base).pow(exp);
                }
                acc
            };
            eval_big(lhs).cmp(&eval_big(rhs))
        }
    }
}

/// `prod(lhs) <= prod(rhs)` over exact integers.
pub fn prod_pow_le(lhs: &[(u128, u32)], rhs: &[(u128, u32)]) -> bool {
    prod_pow_cmp(lhs, rhs) != Ordering::Greater
}
