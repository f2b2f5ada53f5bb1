//! Dense polynomials and rational functions over exact rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Coefficients in ascending degree, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// `z - p`.
    pub fn linear_root(p: Rational) -> Self {
        Self::new(vec![-p, Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().copied().unwrap_or_else(Rational::zero)
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).copied().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, &c| acc * x + c)
    }

    pub fn scale(&self, c: Rational) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.leading().recip())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * Rational::from_integer(i as i128))
                .collect(),
        )
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); rem.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let q = *rem.last().unwrap() / lead;
            quot[shift] = q;
            for (i, &c) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] -= q * c;
            }
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (Self::new(quot), Self::new(rem))
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Multiplicity of `p` as a root, and the cofactor.
    pub fn split_root(&self, p: Rational) -> (usize, Self) {
        let lin = Self::linear_root(p);
        let mut m = 0;
        let mut rest = self.clone();
        while !rest.is_zero() {
            let (q, r) = rest.div_rem(&lin);
            if !r.is_zero() {
                break;
            }
            rest = q;
            m += 1;
        }
        (m, rest)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rational::format).collect()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if *c < Rational::zero() {
                ("-", -c)
            } else {
                ("+", *c)
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let coef = if mag.is_one() && i > 0 {
                String::new()
            } else {
                rational::format(&mag)
            };
            match i {
                0 => write!(f, "{coef}")?,
                1 => write!(f, "{coef}z")?,
                _ => write!(f, "{coef}z^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-Rational::one())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

/// `num/den` in lowest terms with a monic denominator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawRational", into = "RawRational")]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

#[derive(Serialize, Deserialize)]
struct RawRational {
    #[serde(with = "rational::serde_vec")]
    num: Vec<Rational>,
    #[serde(with = "rational::serde_vec", default = "one_vec")]
    den: Vec<Rational>,
}

fn one_vec() -> Vec<Rational> {
    vec![Rational::one()]
}

impl TryFrom<RawRational> for RationalFunction {
    type Error = Error;
    fn try_from(raw: RawRational) -> Result<Self> {
        RationalFunction::new(Polynomial::new(raw.num), Polynomial::new(raw.den))
    }
}

impl From<RationalFunction> for RawRational {
    fn from(f: RationalFunction) -> Self {
        RawRational {
            num: f.num.coeffs,
            den: f.den.coeffs,
        }
    }
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let lead = den.leading();
        Ok(RationalFunction {
            num: num.scale(lead.recip()),
            den: den.scale(lead.recip()),
        })
    }

    pub fn polynomial(p: Polynomial) -> Self {
        RationalFunction {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self::polynomial(Polynomial::constant(c))
    }

    pub fn zero() -> Self {
        Self::polynomial(Polynomial::zero())
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn scale(&self, c: Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn derivative(&self) -> Self {
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::new(num, &self.den * &self.den).expect("nonzero denominator")
    }

    /// Order of vanishing at `p` (negative for poles); `None` for the zero function.
    pub fn valuation(&self, p: Rational) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(self.num.split_root(p).0 as i64 - self.den.split_root(p).0 as i64)
    }

    /// Value of `f (z-p)^m` at `p`, or `None` if that has a pole there.
    pub fn shifted_value(&self, p: Rational, m: i64) -> Option<Rational> {
        let Some(v) = self.valuation(p) else {
            return Some(Rational::zero());
        };
        match (v + m).cmp(&0) {
            std::cmp::Ordering::Less => None,
            std::cmp::Ordering::Greater => Some(Rational::zero()),
            std::cmp::Ordering::Equal => {
                let (_, n) = self.num.split_root(p);
                let (_, d) = self.den.split_root(p);
                Some(n.eval(p) / d.eval(p))
            }
        }
    }

    /// Order of vanishing at infinity, `deg den - deg num`.
    pub fn valuation_at_infinity(&self) -> Option<i64> {
        let n = self.num.degree()? as i64;
        Some(self.den.degree().unwrap_or(0) as i64 - n)
    }

    /// Value of `f z^m` at infinity, or `None` if that has a pole there.
    pub fn shifted_value_at_infinity(&self, m: i64) -> Option<Rational> {
        let Some(v) = self.valuation_at_infinity() else {
            return Some(Rational::zero());
        };
        match (v - m).cmp(&0) {
            std::cmp::Ordering::Less => None,
            std::cmp::Ordering::Greater => Some(Rational::zero()),
            std::cmp::Ordering::Equal => Some(self.num.leading() / self.den.leading()),
        }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RationalFunction::new(num, &self.den * &rhs.den).expect("nonzero denominator")
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        self.scale(-Rational::one())
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(&self.num * &rhs.num, &self.den * &rhs.den)
            .expect("nonzero denominator")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn poly(c: &[i64]) -> Polynomial {
        Polynomial::new(c.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn division_and_gcd() {
        let a = poly(&[-1, 0, 1]);
        let b = poly(&[1, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!((q, r), (poly(&[-1, 1]), Polynomial::zero()));
        assert_eq!(a.gcd(&poly(&[2, 2])), poly(&[1, 1]));
        assert_eq!(poly(&[0, 0, 3]).split_root(int(0)), (2, poly(&[3])));
        assert_eq!(a.to_string(), "z^2 - 1");
    }

    #[test]
    fn rational_function_normal_form() {
        let f = RationalFunction::new(poly(&[-2, 0, 2]), poly(&[2, 2])).unwrap();
        assert_eq!(f, RationalFunction::polynomial(poly(&[-1, 1])));
        let g = RationalFunction::new(poly(&[1]), poly(&[0, 2])).unwrap();
        assert_eq!(g.den(), &poly(&[0, 1]));
        assert_eq!(g.num().coeff(0), rat(1, 2));
        assert_eq!(
            g.derivative(),
            RationalFunction::new(poly(&[-1]), poly(&[0, 0, 2])).unwrap()
        );
        assert!((&g - &g).is_zero());
        assert!(RationalFunction::new(poly(&[1]), Polynomial::zero()).is_err());
    }

    #[test]
    fn local_behaviour() {
        // 3/(z^2 (z-1))
        let f = RationalFunction::new(poly(&[3]), poly(&[0, 0, -1, 1])).unwrap();
        assert_eq!(f.valuation(int(0)), Some(-2));
        assert_eq!(f.shifted_value(int(0), 2), Some(int(-3)));
        assert_eq!(f.shifted_value(int(0), 1), None);
        assert_eq!(f.shifted_value(int(1), 2), Some(int(0)));
        assert_eq!(f.valuation_at_infinity(), Some(3));
        assert_eq!(f.shifted_value_at_infinity(3), Some(int(3)));
        assert_eq!(f.shifted_value_at_infinity(4), None);
    }
}
