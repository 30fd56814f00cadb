//! Polynomials in β with exact rational coefficients.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Render as `p/q`, or `p` for integers.
pub fn rational_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse { pos: 0, msg: format!("not a rational: {s:?}") };
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Σ c_k β^k. Trailing zero coefficients are trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct BetaPolynomial {
    coeffs: Vec<Rational>,
}

impl BetaPolynomial {
    pub fn zero() -> Self {
        BetaPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0, Rational::one())
    }

    pub fn beta() -> Self {
        Self::monomial(1, Rational::one())
    }

    pub fn monomial(k: usize, c: Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        BetaPolynomial { coeffs }
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        Self::from_coeffs(cs.iter().map(|&c| int(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn truncate(&self, k_max: usize) -> Self {
        Self::from_coeffs(self.coeffs.iter().take(k_max + 1).cloned().collect())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn eval(&self, beta: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * beta + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Coefficients 0..=k_max as exact strings.
    pub fn coeff_strings(&self, k_max: usize) -> Vec<String> {
        (0..=k_max).map(|k| rational_string(&self.coeff(k))).collect()
    }
}

impl fmt::Display for BetaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mag = rational_string(&a);
            match (k, a.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => {}
                (_, false) if a.is_integer() => write!(f, "{mag}")?,
                _ => write!(f, "({mag})")?,
            }
            match k {
                0 => {}
                1 => write!(f, "β")?,
                _ => write!(f, "β^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &BetaPolynomial {
    type Output = BetaPolynomial;
    fn add(self, o: &BetaPolynomial) -> BetaPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        BetaPolynomial::from_coeffs((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Add for BetaPolynomial {
    type Output = BetaPolynomial;
    fn add(self, o: BetaPolynomial) -> BetaPolynomial {
        &self + &o
    }
}

impl AddAssign<&BetaPolynomial> for BetaPolynomial {
    fn add_assign(&mut self, o: &BetaPolynomial) {
        *self = &*self + o;
    }
}

impl Neg for &BetaPolynomial {
    type Output = BetaPolynomial;
    fn neg(self) -> BetaPolynomial {
        BetaPolynomial { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Sub for &BetaPolynomial {
    type Output = BetaPolynomial;
    fn sub(self, o: &BetaPolynomial) -> BetaPolynomial {
        self + &(-o)
    }
}

impl Sub for BetaPolynomial {
    type Output = BetaPolynomial;
    fn sub(self, o: BetaPolynomial) -> BetaPolynomial {
        &self - &o
    }
}

impl Mul for &BetaPolynomial {
    type Output = BetaPolynomial;
    fn mul(self, o: &BetaPolynomial) -> BetaPolynomial {
        if self.is_zero() || o.is_zero() {
            return BetaPolynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        BetaPolynomial::from_coeffs(out)
    }
}

impl Mul for BetaPolynomial {
    type Output = BetaPolynomial;
    fn mul(self, o: BetaPolynomial) -> BetaPolynomial {
        &self * &o
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display() {
        assert_eq!(BetaPolynomial::beta().to_string(), "β");
        assert_eq!(BetaPolynomial::monomial(4, int(1)).to_string(), "β^4");
        assert_eq!(BetaPolynomial::zero().to_string(), "0");
        assert_eq!(BetaPolynomial::from_ints(&[1, 0, -1]).to_string(), "-β^2 + 1");
        assert_eq!(BetaPolynomial::monomial(3, rat(3, 4)).to_string(), "(3/4)β^3");
    }

    #[test]
    fn arithmetic() {
        let a = BetaPolynomial::from_ints(&[1, 1]);
        let b = BetaPolynomial::from_ints(&[1, -1]);
        assert_eq!(&a * &b, BetaPolynomial::from_ints(&[1, 0, -1]));
        assert!((&a - &a).is_zero());
        assert_eq!(a.pow(2).coeff(1), int(2));
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(rational_string(&rat(-1, 2)), "-1/2");
        assert!((a.eval(0.5) - 1.5).abs() < 1e-15);
    }
}
