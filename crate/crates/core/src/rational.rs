//! Exact rationals and their string encoding (`"a/b"` in lowest terms).

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

pub fn rat(numer: i128, denom: i128) -> Rational {
    Rational::new(numer, denom)
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n as i128)
}

/// Greatest integer not exceeding `q`.
pub fn floor(q: &Rational) -> i64 {
    q.numer().div_floor(q.denom()) as i64
}

/// Fractional part in `[0, 1)`.
pub fn fract(q: &Rational) -> Rational {
    q - Rational::from_integer(floor(q) as i128)
}

pub fn to_f64(q: &Rational) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

pub fn format(q: &Rational) -> String {
    q.to_string()
}

pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parsed = match s.split_once('/') {
        Some((n, d)) => {
            let n: i128 = n
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
            let d: i128 = d
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Rational::new(n, d)
        }
        None => Rational::from_integer(
            s.parse()
                .map_err(|_| Error::Parse(format!("bad rational `{s}`")))?,
        ),
    };
    Ok(parsed)
}

/// Recovers a small-denominator rational from a float, if the float is one exactly.
pub fn from_f64_exact(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    for denom in 1..=1000i128 {
        let numer = (x * denom as f64).round();
        if numer.abs() > 1e15 {
            return None;
        }
        let q = Rational::new(numer as i128, denom);
        if to_f64(&q) == x {
            return Some(q);
        }
    }
    None
}

/// serde adapter storing a rational as its `"a/b"` string.
pub mod serde_str {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// serde adapter for `Vec<Rational>` as a list of `"a/b"` strings.
pub mod serde_vec {
    use super::Rational;
    use serde::{ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&super::format(q))?;
        }
        seq.end()
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Int(i64),
        Text(String),
    }

    /// Accepts `"a/b"` strings and bare integers.
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<Entry>::deserialize(d)?;
        v.iter()
            .map(|e| match e {
                Entry::Int(n) => Ok(super::int(*n)),
                Entry::Text(s) => super::parse(s).map_err(serde::de::Error::custom),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_and_fract_of_negatives() {
        assert_eq!(floor(&rat(-2, 5)), -1);
        assert_eq!(fract(&rat(-2, 5)), rat(3, 5));
        assert_eq!(floor(&rat(8, 5)), 1);
        assert_eq!(fract(&rat(5, 5)), Rational::zero());
    }

    #[test]
    fn string_round_trip() {
        assert_eq!(parse("2/5").unwrap(), rat(2, 5));
        assert_eq!(parse(" -6/4 ").unwrap(), rat(-3, 2));
        assert_eq!(parse("7").unwrap(), int(7));
        assert_eq!(format(&rat(4, 10)), "2/5");
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn exact_float_recovery() {
        assert_eq!(from_f64_exact(0.5), Some(rat(1, 2)));
        assert_eq!(from_f64_exact(-3.0), Some(int(-3)));
        assert_eq!(from_f64_exact(1.0 / 3.0), Some(rat(1, 3)));
        assert_eq!(from_f64_exact(std::f64::consts::PI), None);
    }
}
