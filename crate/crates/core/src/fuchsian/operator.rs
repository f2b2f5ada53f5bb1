//! Monic scalar operators `d^r + a_{r-1} d^{r-1} + ... + a_0` with exact rational
//! function coefficients in the affine chart.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::linalg::{self, CMatrix};
use super::poly::{Polynomial, RationalFunction};
use super::system::weight_eigenvalue;
use crate::curve::{Coordinate, MarkedCurve};
use crate::error::{Error, Result};
use crate::oper;
use crate::rational::{self, Rational};

/// A point of the projective line at which exact local analysis is possible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpPoint {
    Finite(Rational),
    Infinity,
}

impl fmt::Display for OpPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpPoint::Finite(q) => write!(f, "{}", rational::format(q)),
            OpPoint::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for OpPoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(OpPoint::Infinity),
            t => rational::parse(t)
                .map(OpPoint::Finite)
                .map_err(|_| Error::UnsupportedPuncture(t.into())),
        }
    }
}

impl OpPoint {
    pub fn from_coordinate(c: &Coordinate) -> Result<Self> {
        match c {
            Coordinate::Infinity => Ok(OpPoint::Infinity),
            Coordinate::Finite(_) => c
                .exact_real()
                .map(OpPoint::Finite)
                .ok_or_else(|| Error::UnsupportedPuncture(c.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawOperator", into = "RawOperator")]
pub struct MonicOperator {
    coefficients: Vec<RationalFunction>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperator {
    order: usize,
    coefficients: Vec<RationalFunction>,
}

impl TryFrom<RawOperator> for MonicOperator {
    type Error = Error;
    fn try_from(raw: RawOperator) -> Result<Self> {
        if raw.coefficients.len() != raw.order {
            return Err(Error::InvalidArgument(format!(
                "order {} needs {} coefficients, got {}",
                raw.order,
                raw.order,
                raw.coefficients.len()
            )));
        }
        MonicOperator::new(raw.coefficients)
    }
}

impl From<MonicOperator> for RawOperator {
    fn from(op: MonicOperator) -> Self {
        RawOperator {
            order: op.order(),
            coefficients: op.coefficients,
        }
    }
}

/// `s (s-1) ... (s-j+1)`, or the same in `-s` when `negate`.
fn falling_factorial(j: usize, negate: bool) -> Polynomial {
    let sign = if negate {
        -Rational::one()
    } else {
        Rational::one()
    };
    (0..j).fold(Polynomial::one(), |acc, i| {
        &acc * &Polynomial::new(vec![-Rational::from_integer(i as i128), sign])
    })
}

impl MonicOperator {
    /// Coefficients `a_0, ..., a_{r-1}`.
    pub fn new(coefficients: Vec<RationalFunction>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidArgument(
                "operator order must be at least 1".into(),
            ));
        }
        Ok(MonicOperator { coefficients })
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficient(&self, j: usize) -> &RationalFunction {
        &self.coefficients[j]
    }

    pub fn coefficients(&self) -> &[RationalFunction] {
        &self.coefficients
    }

    /// Adds `f d^j`, for `j < r`.
    pub fn add_term(&self, j: usize, f: &RationalFunction) -> Result<Self> {
        if j >= self.order() {
            return Err(Error::InvalidArgument(format!(
                "term d^{j} is not below the order"
            )));
        }
        let mut coefficients = self.coefficients.clone();
        coefficients[j] = &coefficients[j] + f;
        Ok(MonicOperator { coefficients })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("operator serialization")
    }

    pub fn is_singular_at(&self, p: Rational) -> bool {
        self.coefficients
            .iter()
            .any(|a| a.valuation(p).is_some_and(|v| v < 0))
    }

    /// Exact local data: `b_j(0)` with `b_j = a_j (z-p)^{r-j}` (resp. `a_j z^{r-j}` at infinity).
    fn local_coefficients(&self, point: OpPoint) -> Result<Vec<Rational>> {
        let r = self.order() as i64;
        self.coefficients
            .iter()
            .enumerate()
            .map(|(j, a)| {
                match point {
                    OpPoint::Finite(p) => a.shifted_value(p, r - j as i64),
                    OpPoint::Infinity => a.shifted_value_at_infinity(r - j as i64),
                }
                .ok_or_else(|| Error::IrregularSingularity(point.to_string()))
            })
            .collect()
    }

    pub fn to_string_pretty(&self) -> String {
        let r = self.order();
        let mut parts = vec![format!("d^{r}")];
        for j in (0..r).rev() {
            let a = &self.coefficients[j];
            if a.is_zero() {
                continue;
            }
            match j {
                0 => parts.push(format!("({a})")),
                1 => parts.push(format!("({a}) d")),
                _ => parts.push(format!("({a}) d^{j}")),
            }
        }
        parts.join(" + ")
    }
}

/// Monic indicial polynomial in `s`, for solutions `(z-p)^s` (resp. `z^{-s}` at infinity).
pub fn indicial_polynomial(op: &MonicOperator, point: OpPoint) -> Result<Polynomial> {
    let negate = point == OpPoint::Infinity;
    let b = op.local_coefficients(point)?;
    let mut poly = falling_factorial(op.order(), negate);
    for (j, bj) in b.iter().enumerate() {
        poly = &poly + &falling_factorial(j, negate).scale(*bj);
    }
    Ok(poly.monic())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Exact(Rational),
    Numeric(Complex64),
}

impl Exponent {
    pub fn value(&self) -> Complex64 {
        match self {
            Exponent::Exact(q) => Complex64::new(rational::to_f64(q), 0.0),
            Exponent::Numeric(z) => *z,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Exponent::Exact(q) => json!(rational::format(q)),
            Exponent::Numeric(z) => json!([z.re, z.im]),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Exact(q) => write!(f, "{}", rational::format(q)),
            Exponent::Numeric(z) if z.im.abs() < 1e-12 => write!(f, "{:.12}", z.re),
            Exponent::Numeric(z) => write!(f, "{:.12}{:+.12}i", z.re, z.im),
        }
    }
}

fn divisors(n: i128) -> Option<Vec<i128>> {
    let n = n.abs();
    if n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    Some(out)
}

/// Roots with multiplicity: rational ones exactly, the rest from companion eigenvalues.
pub fn polynomial_roots(poly: &Polynomial) -> Vec<Exponent> {
    let mut rest = poly.monic();
    let mut roots = Vec::new();
    let (m0, q) = rest.split_root(Rational::zero());
    roots.extend(std::iter::repeat_n(Exponent::Exact(Rational::zero()), m0));
    rest = q;
    if rest.degree().unwrap_or(0) > 0 {
        let lcm = rest
            .coeffs()
            .iter()
            .fold(1i128, |acc, c| acc.lcm(c.denom()));
        let ints: Vec<i128> = rest
            .coeffs()
            .iter()
            .map(|c| (c * Rational::from_integer(lcm)).to_integer())
            .collect();
        if let (Some(ps), Some(qs)) = (divisors(ints[0]), divisors(*ints.last().unwrap())) {
            let mut candidates: Vec<Rational> = Vec::new();
            for &p in &ps {
                for &q in &qs {
                    for c in [Rational::new(p, q), Rational::new(-p, q)] {
                        if !candidates.contains(&c) {
                            candidates.push(c);
                        }
                    }
                }
            }
            candidates.sort();
            for c in candidates {
                let (m, q) = rest.split_root(c);
                roots.extend(std::iter::repeat_n(Exponent::Exact(c), m));
                rest = q;
            }
        }
    }
    let mut exact: Vec<Rational> = roots
        .iter()
        .map(|e| match e {
            Exponent::Exact(q) => *q,
            Exponent::Numeric(_) => unreachable!(),
        })
        .collect();
    exact.sort();
    let mut out: Vec<Exponent> = exact.into_iter().map(Exponent::Exact).collect();
    if let Some(d) = rest.degree().filter(|&d| d > 0) {
        let c = CMatrix::from_fn(d, d, |i, j| {
            if i + 1 == j {
                Complex64::new(1.0, 0.0)
            } else if i == d - 1 {
                Complex64::new(-rational::to_f64(&rest.coeff(j)), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let mut numeric = linalg::eigenvalues(&c);
        numeric.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        out.extend(numeric.into_iter().map(Exponent::Numeric));
    }
    out
}

pub fn indicial_roots(op: &MonicOperator, point: OpPoint) -> Result<Vec<Exponent>> {
    Ok(polynomial_roots(&indicial_polynomial(op, point)?))
}

/// Residue `C(0)` of the first-order system in `Y = (y, theta y, ..., theta^{r-1} y)`,
/// `theta = (z-p) d/dz` (resp. `-z d/dz` at infinity). Its characteristic polynomial is
/// the indicial polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalResidue {
    pub point: OpPoint,
    pub residue: Vec<Vec<Rational>>,
}

impl LocalResidue {
    pub fn to_complex(&self) -> CMatrix {
        linalg::from_rational(&self.residue)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "point": self.point.to_string(),
            "residue": self.residue.iter().map(|row| row.iter().map(rational::format).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

pub fn companion(op: &MonicOperator, point: OpPoint) -> Result<LocalResidue> {
    let poly = indicial_polynomial(op, point)?;
    let r = op.order();
    let residue = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    if i + 1 == j {
                        Rational::one()
                    } else if i == r - 1 {
                        -poly.coeff(j)
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    Ok(LocalResidue { point, residue })
}

/// Chart-gauge sub-principal form `-a_{r-1} dz`, returned as its coefficient.
pub fn subprincipal_form(op: &MonicOperator) -> RationalFunction {
    -op.coefficient(op.order() - 1)
}

/// Symmetric square of `y'' + p y' + q y`: the operator annihilating products of solutions.
pub fn symmetric_square(op: &MonicOperator) -> Result<MonicOperator> {
    if op.order() != 2 {
        return Err(Error::UnsupportedRank(op.order()));
    }
    let p = op.coefficient(1);
    let q = op.coefficient(0);
    let int = |n: i64| Rational::from_integer(n as i128);
    let a2 = p.scale(int(3));
    let a1 = &(&(p * p).scale(int(2)) + &p.derivative()) + &q.scale(int(4));
    let a0 = &(p * q).scale(int(4)) + &q.derivative().scale(int(2));
    MonicOperator::new(vec![a0, a1, a2])
}

/// `exp(-2 pi i s)` for a complex exponent.
pub fn exponent_eigenvalue(s: Complex64) -> Complex64 {
    (Complex64::new(0.0, -std::f64::consts::TAU) * s).exp()
}

#[derive(Debug, Clone)]
pub struct PointExponents {
    pub label: String,
    pub point: OpPoint,
    pub exponents: Vec<Exponent>,
    pub weights: Vec<Rational>,
    pub distance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct ExponentReport {
    pub order: usize,
    pub points: Vec<PointExponents>,
    /// Sum of the exponents at every singular point, infinity included.
    pub exponent_sum: Complex64,
    pub exponent_sum_exact: Option<Rational>,
    /// `(number of finite singular points - 1) r (r-1) / 2`.
    pub fuchs_expected: Rational,
    pub fuchs_holds: bool,
    pub pass: bool,
}

impl ExponentReport {
    pub fn to_json(&self) -> Value {
        json!({
            "order": self.order,
            "points": self.points.iter().map(|p| json!({
                "label": p.label,
                "point": p.point.to_string(),
                "exponents": p.exponents.iter().map(Exponent::to_json).collect::<Vec<_>>(),
                "weights": p.weights.iter().map(rational::format).collect::<Vec<_>>(),
                "distance": p.distance,
                "pass": p.pass,
            })).collect::<Vec<_>>(),
            "exponent_sum": match self.exponent_sum_exact {
                Some(q) => json!(rational::format(&q)),
                None => json!([self.exponent_sum.re, self.exponent_sum.im]),
            },
            "fuchs_expected": rational::format(&self.fuchs_expected),
            "fuchs_holds": self.fuchs_holds,
            "pass": self.pass,
        })
    }
}

fn extra_finite_poles(op: &MonicOperator, marked: &[Rational]) -> Option<String> {
    for (j, a) in op.coefficients().iter().enumerate() {
        let mut den = a.den().clone();
        for &p in marked {
            den = den.split_root(p).1;
        }
        if den.degree().unwrap_or(0) > 0 {
            return Some(format!("a_{j} has poles at the roots of {den}"));
        }
    }
    None
}

/// Compares local exponents of `op` with the oper residue weights at every marked point.
pub fn oper_exponent_consistency(
    curve: &Arc<MarkedCurve>,
    r: usize,
    op: &MonicOperator,
    tol: f64,
) -> Result<ExponentReport> {
    if curve.genus() != 0 {
        return Err(Error::GenusNotZero(curve.genus()));
    }
    if op.order() != r {
        return Err(Error::InvalidArgument(format!(
            "operator has order {}, expected {r}",
            op.order()
        )));
    }
    if r >= 2 && !op.coefficient(r - 1).is_zero() {
        return Err(Error::InvalidArgument(
            "operator has a nonzero d^(r-1) term".into(),
        ));
    }
    let mut located = Vec::with_capacity(curve.num_points());
    for p in curve.points() {
        let c = p.coordinate.as_ref().ok_or_else(|| {
            Error::InvalidArgument(format!("marked point `{}` has no coordinate", p.label))
        })?;
        located.push((p.label.clone(), OpPoint::from_coordinate(c)?));
    }
    let finite: Vec<Rational> = located
        .iter()
        .filter_map(|(_, p)| match p {
            OpPoint::Finite(q) => Some(*q),
            OpPoint::Infinity => None,
        })
        .collect();
    if let Some(msg) = extra_finite_poles(op, &finite) {
        return Err(Error::SingularityMismatch(msg));
    }

    let mut all_exponents: Vec<Exponent> = Vec::new();
    if !located.iter().any(|(_, p)| *p == OpPoint::Infinity) {
        let ordinary: Vec<Exponent> = (0..r as i64)
            .map(|k| Exponent::Exact(Rational::from_integer((k + 1 - r as i64) as i128)))
            .collect();
        let at_infinity = indicial_roots(op, OpPoint::Infinity)
            .map_err(|_| Error::SingularityMismatch("unmarked infinity is irregular".into()))?;
        if at_infinity != ordinary {
            return Err(Error::SingularityMismatch(
                "unmarked infinity has non-trivial exponents".into(),
            ));
        }
        all_exponents.extend(at_infinity);
    }

    let mut points = Vec::with_capacity(located.len());
    for (label, point) in located {
        let exponents = indicial_roots(op, point)?;
        let weights = oper::residue_spectrum(curve, r, &label)?;
        let got: Vec<Complex64> = exponents
            .iter()
            .map(|e| exponent_eigenvalue(e.value()))
            .collect();
        let want: Vec<Complex64> = weights
            .iter()
            .map(|w| weight_eigenvalue(rational::to_f64(w)))
            .collect();
        let distance = linalg::multiset_distance(&got, &want);
        all_exponents.extend(exponents.iter().copied());
        points.push(PointExponents {
            label,
            point,
            exponents,
            weights,
            distance,
            pass: distance <= tol,
        });
    }

    let exponent_sum: Complex64 = all_exponents.iter().map(Exponent::value).sum();
    let exponent_sum_exact = all_exponents
        .iter()
        .try_fold(Rational::zero(), |acc, e| match e {
            Exponent::Exact(q) => Some(acc + q),
            Exponent::Numeric(_) => None,
        });
    let rr = Rational::from_integer((r * (r - 1) / 2) as i128);
    let fuchs_expected = Rational::from_integer(finite.len() as i128 - 1) * rr;
    let fuchs_holds = match exponent_sum_exact {
        Some(q) => q == fuchs_expected,
        None => (exponent_sum - rational::to_f64(&fuchs_expected)).norm() <= tol,
    };
    let pass = points.iter().all(|p| p.pass);
    Ok(ExponentReport {
        order: r,
        points,
        exponent_sum,
        exponent_sum_exact,
        fuchs_expected,
        fuchs_holds,
        pass,
    })
}
