// SPDX-License-Identifier: Apache-2.0

//! Dense integer polynomials in one variable `n` and reduced ratios of them.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Coefficients in increasing degree; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<BigInt>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The variable `n`.
    pub fn n() -> Self {
        Self::from_coeffs(vec![BigInt::zero(), BigInt::one()])
    }

    /// `n - c`.
    pub fn n_minus(c: i64) -> Self {
        Self::from_coeffs(vec![BigInt::from(-c), BigInt::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `n^i`; zero beyond the degree.
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn eval(&self, n: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * n + c)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Gcd of the coefficients, nonnegative.
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    fn div_scalar(&self, c: &BigInt) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x / c).collect())
    }

    /// Content removed, leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.leading().is_negative() {
            c = -c;
        }
        self.div_scalar(&c)
    }

    /// Pseudo-remainder: `lc(d)^(deg a - deg d + 1) * a mod d`.
    fn pseudo_rem(&self, d: &Polynomial) -> Polynomial {
        let dd = d.degree().expect("divisor is nonzero");
        let lc = d.leading();
        let mut r = self.coeffs.clone();
        while r.len() > dd && !r.is_empty() {
            let top = r.len() - 1;
            let t = r[top].clone();
            for c in r.iter_mut() {
                *c *= &lc;
            }
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[top - dd + i] -= &t * dc;
            }
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
            if r.len() <= dd {
                break;
            }
        }
        Polynomial::from_coeffs(r)
    }

    /// Primitive gcd with positive leading coefficient; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        a
    }

    /// Division known to be exact over the integers.
    pub fn div_exact(&self, d: &Polynomial) -> Polynomial {
        let dd = d.degree().expect("divisor is nonzero");
        if self.is_zero() {
            return Polynomial::zero();
        }
        let lc = d.leading();
        let mut r = self.coeffs.clone();
        let qlen = r.len().saturating_sub(dd);
        let mut q = vec![BigInt::zero(); qlen];
        for i in (0..qlen).rev() {
            let t = &r[i + dd];
            let (c, rem) = t.div_rem(&lc);
            assert!(rem.is_zero(), "inexact polynomial division");
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[i + j] -= &c * dc;
            }
            q[i] = c;
        }
        assert!(r.iter().all(Zero::is_zero), "inexact polynomial division");
        Polynomial::from_coeffs(q)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::from_coeffs((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::from_coeffs((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::from_coeffs(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Polynomial {
    /// `n^3 - 3*n^2 + 2*n`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            let var = match i {
                0 => String::new(),
                1 => "n".to_string(),
                _ => format!("n^{i}"),
            };
            if i == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&var)?;
            } else {
                write!(f, "{mag}*{var}")?;
            }
        }
        Ok(())
    }
}

/// `(n)_r = n (n-1) ... (n-r+1)`; `(n)_0 = 1`.
pub fn falling_factorial(r: usize) -> Polynomial {
    (0..r).fold(Polynomial::one(), |acc, i| &acc * &Polynomial::n_minus(i as i64))
}

/// A reduced ratio `num / den` of integer polynomials together with the
/// smallest `n` at which it is known to equal the quantity it models.
///
/// Normal form: `gcd(num, den) = 1`, the combined content is 1, and the
/// leading coefficient of `den` is positive. Zero is `0 / 1`.
#[derive(Debug, Clone)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
    valid_from: u64,
}

impl PartialEq for RationalFunction {
    /// Equality of the functions; the validity threshold is metadata.
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl Eq for RationalFunction {}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial, valid_from: u64) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut f = RationalFunction {
            num,
            den,
            valid_from: valid_from.max(1),
        };
        f.normalize();
        f
    }

    pub fn zero() -> Self {
        Self::constant(0)
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        Self::new(Polynomial::constant(BigInt::from(c)), Polynomial::one(), 1)
    }

    pub fn polynomial(p: Polynomial) -> Self {
        Self::new(p, Polynomial::one(), 1)
    }

    /// `n^e` for any integer `e`.
    pub fn n_pow(e: i64) -> Self {
        let mono = |d: u64| {
            let mut c = vec![BigInt::zero(); d as usize];
            c.push(BigInt::one());
            Polynomial::from_coeffs(c)
        };
        if e >= 0 {
            Self::new(mono(e as u64), Polynomial::one(), 1)
        } else {
            Self::new(Polynomial::one(), mono(e.unsigned_abs()), 1)
        }
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = Polynomial::one();
            return;
        }
        let g = self.num.gcd(&self.den);
        if g.degree().unwrap_or(0) > 0 {
            self.num = self.num.div_exact(&g);
            self.den = self.den.div_exact(&g);
        }
        let mut c = self.num.content().gcd(&self.den.content());
        if self.den.leading().is_negative() {
            c = -c;
        }
        if !c.is_one() {
            self.num = self.num.div_scalar(&c);
            self.den = self.den.div_scalar(&c);
        }
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn validity_threshold(&self) -> u64 {
        self.valid_from
    }

    pub fn with_threshold(mut self, valid_from: u64) -> Self {
        self.valid_from = valid_from.max(1);
        self
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Exact value at `n`; refuses points below the validity threshold.
    pub fn eval(&self, n: u64) -> Result<BigRational> {
        if n < self.valid_from {
            return Err(Error::BelowValidity {
                n,
                threshold: self.valid_from,
            });
        }
        let x = BigInt::from(n);
        let d = self.den.eval(&x);
        if d.is_zero() {
            return Err(Error::BelowValidity {
                n,
                threshold: self.valid_from,
            });
        }
        Ok(BigRational::new(self.num.eval(&x), d))
    }

    pub fn scale(&self, c: i64) -> Self {
        if c == 0 {
            return Self::zero().with_threshold(self.valid_from);
        }
        Self::new(self.num.scale(&BigInt::from(c)), self.den.clone(), self.valid_from)
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        let valid = self.valid_from.max(rhs.valid_from);
        if self.is_zero() {
            return rhs.clone().with_threshold(valid);
        }
        if rhs.is_zero() {
            return self.clone().with_threshold(valid);
        }
        if self.den == rhs.den {
            return RationalFunction::new(&self.num + &rhs.num, self.den.clone(), valid);
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RationalFunction::new(num, &self.den * &rhs.den, valid)
    }
}

impl AddAssign<&RationalFunction> for RationalFunction {
    fn add_assign(&mut self, rhs: &RationalFunction) {
        *self = &*self + rhs;
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
            valid_from: self.valid_from,
        }
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        let valid = self.valid_from.max(rhs.valid_from);
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero().with_threshold(valid);
        }
        RationalFunction::new(&self.num * &rhs.num, &self.den * &rhs.den, valid)
    }
}

impl fmt::Display for RationalFunction {
    /// `n/(n - 1), valid for n >= 2`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, valid for n >= {}", self.expression(), self.valid_from)
    }
}

impl RationalFunction {
    /// The formula without the validity note.
    pub fn expression(&self) -> String {
        let wrap = |p: &Polynomial| {
            let terms = p.coeffs.iter().filter(|c| !c.is_zero()).count();
            let s = p.to_string();
            if terms > 1 || (terms == 1 && s.contains('*') && s.starts_with('-')) {
                format!("({s})")
            } else {
                s
            }
        };
        if self.den == Polynomial::one() {
            self.num.to_string()
        } else {
            format!("{}/{}", wrap(&self.num), wrap(&self.den))
        }
    }
}

/// A truncated expansion `Σ c_i / n^(leading + i)` for `i = 0..=order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    leading_exponent: i64,
    coefficients: Vec<BigRational>,
    order: usize,
}

impl LaurentSeries {
    /// Expansion of `f` in powers of `1/n` as `n → ∞`, keeping `order + 1`
    /// terms from the leading one.
    pub fn expand(f: &RationalFunction, order: usize) -> Self {
        let zero = || BigRational::zero();
        if f.is_zero() {
            return LaurentSeries {
                leading_exponent: 0,
                coefficients: vec![zero(); order + 1],
                order,
            };
        }
        let p = f.num.degree().unwrap();
        let q = f.den.degree().unwrap();
        // With m = 1/n: P(n) = n^p P*(m), where P*(m) has P's coefficients reversed.
        let rev = |poly: &Polynomial, d: usize, i: usize| -> BigRational {
            if i > d {
                zero()
            } else {
                BigRational::from_integer(poly.coeff(d - i))
            }
        };
        let b0 = rev(&f.den, q, 0);
        let mut c: Vec<BigRational> = Vec::with_capacity(order + 1);
        for i in 0..=order {
            let mut acc = rev(&f.num, p, i);
            for (j, cj) in c.iter().enumerate() {
                acc -= cj * rev(&f.den, q, i - j);
            }
            c.push(acc / &b0);
        }
        LaurentSeries {
            leading_exponent: q as i64 - p as i64,
            coefficients: c,
            order,
        }
    }

    pub fn leading_exponent(&self) -> i64 {
        self.leading_exponent
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coefficients
    }

    /// Coefficient of `n^(-e)`; `None` beyond the truncation.
    pub fn coefficient(&self, e: i64) -> Option<BigRational> {
        if e > self.error_exponent() - 1 {
            return None;
        }
        if e < self.leading_exponent {
            return Some(BigRational::zero());
        }
        Some(self.coefficients[(e - self.leading_exponent) as usize].clone())
    }

    /// Smallest `e` with a nonzero coefficient of `n^(-e)`, if any.
    pub fn valuation(&self) -> Option<i64> {
        self.coefficients
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| self.leading_exponent + i as i64)
    }

    /// The exponent `E` in the error term `O(1/n^E)`.
    pub fn error_exponent(&self) -> i64 {
        self.leading_exponent + self.order as i64 + 1
    }
}

fn power_of_n(e: i64) -> String {
    match e {
        0 => "1".to_string(),
        1 => "1/n".to_string(),
        -1 => "n".to_string(),
        e if e > 0 => format!("1/n^{e}"),
        e => format!("n^{}", -e),
    }
}

impl fmt::Display for LaurentSeries {
    /// `1 + 1/n + 1/n^2 + O(1/n^3)`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.leading_exponent + i as i64;
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            let coef = if mag.is_integer() {
                mag.to_integer().to_string()
            } else {
                format!("({mag})")
            };
            match (mag.is_one(), e) {
                (_, 0) => f.write_str(&coef)?,
                (true, _) => f.write_str(&power_of_n(e))?,
                (false, e) if e > 0 => write!(f, "{coef}/{}", power_of_n(e).trim_start_matches("1/"))?,
                (false, _) => write!(f, "{coef}*{}", power_of_n(e))?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        let err = self.error_exponent();
        write!(f, " + O({})", power_of_n(err))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::from_i64(c)
    }

    #[test]
    fn falling_factorials() {
        assert_eq!(falling_factorial(0), Polynomial::one());
        assert_eq!(falling_factorial(2), p(&[0, -1, 1]));
        // n(n-1)(n-2) expanded by hand.
        assert_eq!(falling_factorial(3), p(&[0, 2, -3, 1]));
        assert_eq!(falling_factorial(3).to_string(), "n^3 - 3*n^2 + 2*n");
    }

    #[test]
    fn gcd_and_reduction() {
        let a = &p(&[-1, 1]) * &p(&[2, 1]);
        let b = &p(&[-1, 1]) * &p(&[3, 0, 1]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
        assert_eq!(p(&[0, 4]).gcd(&p(&[6])), p(&[1]));
        let f = RationalFunction::new(a.scale(&BigInt::from(6)), b.scale(&BigInt::from(-4)), 1);
        assert_eq!(f.numerator(), &p(&[-6, -3]));
        assert_eq!(f.denominator(), &p(&[6, 0, 2]));
    }

    #[test]
    fn display_forms() {
        let f = RationalFunction::new(p(&[0, 1]), p(&[-1, 1]), 2);
        assert_eq!(f.to_string(), "n/(n - 1), valid for n >= 2");
        assert_eq!(RationalFunction::constant(2).to_string(), "2, valid for n >= 1");
        assert_eq!(RationalFunction::n_pow(-2).expression(), "1/n^2");
        assert_eq!(RationalFunction::constant(-3).expression(), "-3");
        assert_eq!(p(&[-1, 0, -2]).to_string(), "-2*n^2 - 1");
    }

    #[test]
    fn threshold_is_enforced() {
        let f = RationalFunction::new(p(&[0, 1]), p(&[-1, 1]), 2);
        assert!(matches!(f.eval(1), Err(Error::BelowValidity { n: 1, threshold: 2 })));
        assert_eq!(f.eval(10).unwrap(), BigRational::new(10.into(), 9.into()));
        let g = &f + &RationalFunction::one().with_threshold(5);
        assert_eq!(g.validity_threshold(), 5);
    }

    #[test]
    fn commutator_sum() {
        // (n)_4/((n)_2)^2 + ... : the seven falling-factorial terms add to n/(n-1).
        let ff = |r| RationalFunction::polynomial(falling_factorial(r));
        let term = |num: usize, a: usize, b: usize| {
            let d = &ff(a) * &ff(b);
            RationalFunction::new(
                &ff(num).numerator().clone() * d.denominator(),
                ff(num).denominator() * d.numerator(),
                2,
            )
        };
        let total = [
            term(4, 2, 2),
            term(2, 2, 1),
            term(2, 1, 2),
            term(3, 2, 2),
            term(3, 2, 2),
            term(2, 2, 2),
            term(1, 1, 1),
        ]
        .iter()
        .fold(RationalFunction::zero(), |acc, t| &acc + t);
        assert_eq!(total, RationalFunction::new(p(&[0, 1]), p(&[-1, 1]), 2));
    }

    #[test]
    fn laurent_expansions() {
        let f = RationalFunction::new(p(&[0, 1]), p(&[-1, 1]), 2);
        let s = LaurentSeries::expand(&f, 2);
        assert_eq!(s.leading_exponent(), 0);
        assert_eq!(s.to_string(), "1 + 1/n + 1/n^2 + O(1/n^3)");
        let g = RationalFunction::new(p(&[1]), p(&[-1, 1]), 2);
        assert_eq!(LaurentSeries::expand(&g, 1).to_string(), "1/n + 1/n^2 + O(1/n^3)");
        let one = LaurentSeries::expand(&RationalFunction::one(), 0);
        assert_eq!(one.coefficient(0), Some(BigRational::one()));
        assert_eq!(one.coefficient(1), None);
        // (3n + 1)/(2n^2) = (3/2)/n + (1/2)/n^2
        let h = RationalFunction::new(p(&[1, 3]), p(&[0, 0, 2]), 1);
        assert_eq!(LaurentSeries::expand(&h, 2).to_string(), "(3/2)/n + (1/2)/n^2 + O(1/n^4)");
        let z = LaurentSeries::expand(&RationalFunction::zero(), 1);
        assert_eq!(z.valuation(), None);
        assert_eq!(z.to_string(), "0 + O(1/n^2)");
        let poly = LaurentSeries::expand(&RationalFunction::polynomial(p(&[0, -1, 2])), 1);
        assert_eq!(poly.to_string(), "2*n^2 - n + O(1)");
    }

    fn small_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec(-5i64..=5, 0..4).prop_map(|c| Polynomial::from_i64(&c))
    }

    proptest! {
        #[test]
        fn field_laws_pointwise(a in small_poly(), b in small_poly(), c in small_poly(), d in small_poly()) {
            prop_assume!(!b.is_zero() && !d.is_zero());
            let f = RationalFunction::new(a.clone(), b.clone(), 1);
            let g = RationalFunction::new(c.clone(), d.clone(), 1);
            let sum = &f + &g;
            let prod = &f * &g;
            for n in 20u64..24 {
                let x = BigInt::from(n);
                let (bv, dv) = (b.eval(&x), d.eval(&x));
                if bv.is_zero() || dv.is_zero() { continue; }
                let fv = BigRational::new(a.eval(&x), bv);
                let gv = BigRational::new(c.eval(&x), dv);
                prop_assert_eq!(sum.eval(n).unwrap(), &fv + &gv);
                prop_assert_eq!(prod.eval(n).unwrap(), &fv * &gv);
            }
            prop_assert_eq!(&(&f - &g) + &g, f.clone());
        }

        #[test]
        fn gcd_divides_both(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assume!(!c.is_zero() && (!a.is_zero() || !b.is_zero()));
            let x = &a * &c;
            let y = &b * &c;
            let g = x.gcd(&y);
            prop_assert!(!g.is_zero());
            let _ = x.div_exact(&g);
            let _ = y.div_exact(&g);
            prop_assert!(g.degree() >= c.degree());
        }
    }
}
