//! Marked curves: genus, marked points with weight levels, and covering arithmetic.

use std::collections::HashSet;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Position of a marked point on the projective line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coordinate {
    Finite(Complex64),
    Infinity,
}

impl Coordinate {
    pub fn real(x: f64) -> Self {
        Coordinate::Finite(Complex64::new(x, 0.0))
    }

    /// The coordinate as an exact rational, when it is a real number with a small denominator.
    pub fn exact_real(&self) -> Option<Rational> {
        match self {
            Coordinate::Finite(z) if z.im == 0.0 => rational::from_f64_exact(z.re),
            _ => None,
        }
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coordinate::Finite(z) if z.im == 0.0 => write!(f, "{}", z.re),
            Coordinate::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            Coordinate::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawNumber {
    Float(f64),
    Text(String),
}

impl RawNumber {
    fn value(&self) -> std::result::Result<f64, String> {
        match self {
            RawNumber::Float(x) => Ok(*x),
            RawNumber::Text(s) => rational::parse(s)
                .map(|q| rational::to_f64(&q))
                .map_err(|e| e.to_string()),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawCoordinate {
    Pair([RawNumber; 2]),
    Text(String),
}

impl Serialize for Coordinate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Coordinate::Finite(z) => [z.re, z.im].serialize(s),
            Coordinate::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Coordinate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match RawCoordinate::deserialize(d)? {
            RawCoordinate::Pair([re, im]) => Ok(Coordinate::Finite(Complex64::new(
                re.value().map_err(D::Error::custom)?,
                im.value().map_err(D::Error::custom)?,
            ))),
            RawCoordinate::Text(t) if t == "inf" || t == "infinity" => Ok(Coordinate::Infinity),
            RawCoordinate::Text(t) => Err(D::Error::custom(format!("bad coordinate `{t}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkedPoint {
    pub label: String,
    /// Weight denominator `N` at this point.
    pub level: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinate: Option<Coordinate>,
}

impl MarkedPoint {
    pub fn new(label: impl Into<String>, level: u32) -> Self {
        MarkedPoint {
            label: label.into(),
            level,
            coordinate: None,
        }
    }

    pub fn at(mut self, coordinate: Coordinate) -> Self {
        self.coordinate = Some(coordinate);
        self
    }
}

/// A compact Riemann surface of genus `g` with an ordered set of marked points.
///
/// Construction validates the standing hypotheses, so every `MarkedCurve` in
/// circulation satisfies them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurve")]
pub struct MarkedCurve {
    genus: u32,
    points: Vec<MarkedPoint>,
}

#[derive(Deserialize)]
struct RawCurve {
    genus: u32,
    #[serde(default)]
    points: Vec<MarkedPoint>,
}

impl TryFrom<RawCurve> for MarkedCurve {
    type Error = Error;

    fn try_from(raw: RawCurve) -> Result<Self> {
        MarkedCurve::new(raw.genus, raw.points)
    }
}

impl MarkedCurve {
    pub fn new(genus: u32, points: Vec<MarkedPoint>) -> Result<Self> {
        validate_curve(MarkedCurve { genus, points })
    }

    /// Genus-0 curve with points `x1..xn` at the given levels.
    pub fn with_levels(genus: u32, levels: &[u32]) -> Result<Self> {
        let points = levels
            .iter()
            .enumerate()
            .map(|(i, &n)| MarkedPoint::new(format!("x{}", i + 1), n))
            .collect();
        MarkedCurve::new(genus, points)
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn points(&self) -> &[MarkedPoint] {
        &self.points
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn levels(&self) -> impl Iterator<Item = u32> + '_ {
        self.points.iter().map(|p| p.level)
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.points
            .iter()
            .position(|p| p.label == label)
            .ok_or_else(|| Error::UnknownPoint(label.to_string()))
    }

    /// Degree of `K_X(S)`, i.e. `2g - 2 + n`.
    pub fn log_canonical_degree(&self) -> i64 {
        2 * self.genus as i64 - 2 + self.points.len() as i64
    }

    /// Smallest cover degree making every inertia character integral: `lcm(N_i)`.
    pub fn default_cover_degree(&self) -> u64 {
        self.levels().fold(1u64, |acc, n| acc.lcm(&(n as u64)))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawCurve = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::try_from(raw)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("curve serialization")
    }
}

pub fn validate_curve(curve: MarkedCurve) -> Result<MarkedCurve> {
    if curve.genus == 0 && curve.points.len() < 3 {
        return Err(Error::GenusZeroTooFewPoints(curve.points.len()));
    }
    let mut labels = HashSet::new();
    for p in &curve.points {
        if !labels.insert(p.label.as_str()) {
            return Err(Error::DuplicateLabel(p.label.clone()));
        }
        if p.level < 2 {
            return Err(Error::LevelTooSmall {
                label: p.label.clone(),
                level: p.level,
            });
        }
    }
    for (i, p) in curve.points.iter().enumerate() {
        for q in &curve.points[i + 1..] {
            if let (Some(a), Some(b)) = (p.coordinate, q.coordinate) {
                if a == b {
                    return Err(Error::DuplicateCoordinate(p.label.clone(), q.label.clone()));
                }
            }
        }
    }
    Ok(curve)
}

pub(crate) fn check_cover_degree(curve: &MarkedCurve, d: u64) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidArgument(
            "cover degree must be positive".into(),
        ));
    }
    for p in curve.points() {
        if !d.is_multiple_of(p.level as u64) {
            return Err(Error::IndivisibleCoverDegree {
                degree: d,
                label: p.label.clone(),
                level: p.level,
            });
        }
    }
    Ok(())
}

/// Genus of a Galois cover of degree `d` ramified to order `N_i` over each marked point:
/// `2g_Y - 2 = d(2g - 2) + sum_i (d / N_i)(N_i - 1)`.
pub fn riemann_hurwitz_genus(curve: &MarkedCurve, d: u64) -> Result<u64> {
    check_cover_degree(curve, d)?;
    let d = d as i64;
    let ramification: i64 = curve
        .levels()
        .map(|n| (d / n as i64) * (n as i64 - 1))
        .sum();
    let euler = d * (2 * curve.genus() as i64 - 2) + ramification;
    if euler < -2 || euler % 2 != 0 {
        return Err(Error::NegativeGenus(euler));
    }
    Ok((euler / 2 + 1) as u64)
}
