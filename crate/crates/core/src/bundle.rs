//! Locally abelian parabolic bundles and their tensor calculus.
//!
//! A bundle is recorded by its rank, the degree of the underlying holomorphic
//! bundle `V_0`, and at every marked point the multiset of parabolic weights.
//! The quasiparabolic flag is the one induced by the weights, read in
//! decreasing order. All arithmetic is exact.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::curve::MarkedCurve;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct LocallyAbelianBundle {
    curve: Arc<MarkedCurve>,
    rank: usize,
    degree: i64,
    weights: Vec<Vec<Rational>>,
}

/// One step of the flag at a point: a weight and the dimension of its graded piece.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlagRow {
    #[serde(with = "rational::serde_str")]
    pub weight: Rational,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectionReport {
    pub exists: bool,
    #[serde(with = "rational::serde_str")]
    pub par_deg: Rational,
    #[serde(with = "rational::serde_vec")]
    pub summand_par_degs: Vec<Rational>,
}

fn sort_desc(w: &mut [Rational]) {
    w.sort_by(|a, b| b.cmp(a));
}

impl LocallyAbelianBundle {
    pub fn new(
        curve: Arc<MarkedCurve>,
        rank: usize,
        degree: i64,
        mut weights: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidBundle("rank must be at least 1".into()));
        }
        if weights.len() != curve.num_points() {
            return Err(Error::InvalidBundle(format!(
                "{} weight lists for {} marked points",
                weights.len(),
                curve.num_points()
            )));
        }
        for (point, ws) in curve.points().iter().zip(weights.iter_mut()) {
            if ws.len() != rank {
                return Err(Error::InvalidBundle(format!(
                    "point `{}` carries {} weights, rank is {rank}",
                    point.label,
                    ws.len()
                )));
            }
            for w in ws.iter() {
                let scaled = w * Rational::from_integer(point.level as i128);
                if *w < Rational::zero() || *w >= Rational::one() || !scaled.is_integer() {
                    return Err(Error::InvalidBundle(format!(
                        "weight {w} at `{}` is not in [0,1) with denominator dividing {}",
                        point.label, point.level
                    )));
                }
            }
            sort_desc(ws);
        }
        Ok(LocallyAbelianBundle {
            curve,
            rank,
            degree,
            weights,
        })
    }

    /// Internal constructor for results of the calculus; weights are reduced mod 1 by callers.
    fn from_parts(
        curve: Arc<MarkedCurve>,
        rank: usize,
        degree: i64,
        mut weights: Vec<Vec<Rational>>,
    ) -> Self {
        for ws in weights.iter_mut() {
            debug_assert_eq!(ws.len(), rank);
            sort_desc(ws);
        }
        LocallyAbelianBundle {
            curve,
            rank,
            degree,
            weights,
        }
    }

    /// `O_X` with the trivial parabolic structure.
    pub fn trivial(curve: Arc<MarkedCurve>) -> Self {
        let n = curve.num_points();
        Self::from_parts(curve, 1, 0, vec![vec![Rational::zero()]; n])
    }

    pub fn line(curve: Arc<MarkedCurve>, degree: i64, weights: Vec<Rational>) -> Result<Self> {
        Self::new(
            curve,
            1,
            degree,
            weights.into_iter().map(|w| vec![w]).collect(),
        )
    }

    pub fn curve(&self) -> &Arc<MarkedCurve> {
        &self.curve
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    /// Weight multisets per marked point, each sorted in decreasing order.
    pub fn weights(&self) -> &[Vec<Rational>] {
        &self.weights
    }

    pub fn weights_at(&self, label: &str) -> Result<&[Rational]> {
        Ok(&self.weights[self.curve.index_of(label)?])
    }

    fn weight_sum(&self) -> Rational {
        self.weights.iter().flatten().sum()
    }

    pub fn par_deg(&self) -> Rational {
        Rational::from_integer(self.degree as i128) + self.weight_sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 1 && self.degree == 0 && self.weights.iter().flatten().all(Zero::is_zero)
    }

    fn same_curve(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.curve, &other.curve) || self.curve == other.curve {
            Ok(())
        } else {
            Err(Error::CurveMismatch)
        }
    }

    pub fn dual(&self) -> Self {
        let nonzero = self
            .weights
            .iter()
            .flatten()
            .filter(|w| !w.is_zero())
            .count() as i64;
        let weights = self
            .weights
            .iter()
            .map(|ws| {
                ws.iter()
                    .map(|w| {
                        if w.is_zero() {
                            Rational::zero()
                        } else {
                            Rational::one() - w
                        }
                    })
                    .collect()
            })
            .collect();
        Self::from_parts(
            self.curve.clone(),
            self.rank,
            -self.degree - nonzero,
            weights,
        )
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.same_curve(other)?;
        let mut degree = self.degree * other.rank as i64 + other.degree * self.rank as i64;
        let mut weights = Vec::with_capacity(self.weights.len());
        for (a, b) in self.weights.iter().zip(&other.weights) {
            let mut ws = Vec::with_capacity(a.len() * b.len());
            for x in a {
                for y in b {
                    let s = x + y;
                    degree += rational::floor(&s);
                    ws.push(rational::fract(&s));
                }
            }
            weights.push(ws);
        }
        Ok(Self::from_parts(
            self.curve.clone(),
            self.rank * other.rank,
            degree,
            weights,
        ))
    }

    /// `Hom(self, target) = target ⊗ self^*`.
    pub fn hom(&self, target: &Self) -> Result<Self> {
        target.tensor(&self.dual())
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        self.same_curve(other)?;
        let weights = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| a.iter().chain(b).cloned().collect())
            .collect();
        Ok(Self::from_parts(
            self.curve.clone(),
            self.rank + other.rank,
            self.degree + other.degree,
            weights,
        ))
    }

    pub fn sym_pow(&self, k: usize) -> Self {
        if k == 0 {
            return Self::trivial(self.curve.clone());
        }
        let rank = binomial(self.rank + k - 1, k);
        let weights: Vec<Vec<Rational>> = self
            .weights
            .iter()
            .map(|ws| {
                multisets(ws.len(), k)
                    .into_iter()
                    .map(|m| rational::fract(&m.iter().map(|&i| ws[i]).sum::<Rational>()))
                    .collect()
            })
            .collect();
        // par-deg(Sym^k V) = C(r+k-1, k) * (k/r) * par-deg(V); the integer part is the degree.
        let par_deg = Rational::new(rank as i128 * k as i128, self.rank as i128) * self.par_deg();
        let weight_sum: Rational = weights.iter().flatten().sum();
        let degree = par_deg - weight_sum;
        debug_assert!(degree.is_integer());
        Self::from_parts(
            self.curve.clone(),
            rank,
            degree.to_integer() as i64,
            weights,
        )
    }

    /// Parabolic determinant `Λ^r V`.
    pub fn det(&self) -> Self {
        let mut degree = self.degree;
        let weights = self
            .weights
            .iter()
            .map(|ws| {
                let s: Rational = ws.iter().sum();
                degree += rational::floor(&s);
                vec![rational::fract(&s)]
            })
            .collect();
        Self::from_parts(self.curve.clone(), 1, degree, weights)
    }

    /// `V ⊗ O_X(mS)`.
    pub fn twist(&self, m: i64) -> Self {
        let mut out = self.clone();
        out.degree += m * self.curve.num_points() as i64 * self.rank as i64;
        out
    }

    /// Tensor power for `m >= 0`, tensor power of the dual for `m < 0`. Line bundles only.
    pub fn power(&self, m: i64) -> Result<Self> {
        if self.rank != 1 {
            return Err(Error::InvalidArgument(
                "power is defined for line bundles".into(),
            ));
        }
        let base = if m < 0 { self.dual() } else { self.clone() };
        let mut out = Self::trivial(self.curve.clone());
        for _ in 0..m.unsigned_abs() {
            out = out.tensor(&base)?;
        }
        Ok(out)
    }

    pub fn flag_table(&self, label: &str) -> Result<Vec<FlagRow>> {
        let ws = self.weights_at(label)?;
        let mut rows: Vec<FlagRow> = Vec::new();
        for w in ws {
            match rows.last_mut() {
                Some(row) if row.weight == *w => row.multiplicity += 1,
                _ => rows.push(FlagRow {
                    weight: *w,
                    multiplicity: 1,
                }),
            }
        }
        Ok(rows)
    }

    /// Riemann-Roch for the underlying bundle: `deg + rank (1 - g)`.
    pub fn euler_characteristic(&self) -> i64 {
        self.degree + self.rank as i64 * (1 - self.curve.genus() as i64)
    }

    pub fn to_json(&self) -> Value {
        let mut weights = Map::new();
        for (p, ws) in self.curve.points().iter().zip(&self.weights) {
            weights.insert(
                p.label.clone(),
                Value::Array(
                    ws.iter()
                        .map(|w| Value::String(rational::format(w)))
                        .collect(),
                ),
            );
        }
        json!({ "rank": self.rank, "degree": self.degree, "weights": weights })
    }

    /// Reads the bundle schema `{"rank", "degree", "weights": {label: ["a/b", ...]}}`.
    /// Points missing from `weights` get all-zero weights.
    pub fn from_json(curve: Arc<MarkedCurve>, value: &Value) -> Result<Self> {
        let field = |name: &str| {
            value
                .get(name)
                .ok_or_else(|| Error::Parse(format!("bundle is missing `{name}`")))
        };
        let rank = field("rank")?
            .as_u64()
            .ok_or_else(|| Error::Parse("`rank` must be a non-negative integer".into()))?
            as usize;
        let degree = field("degree")?
            .as_i64()
            .ok_or_else(|| Error::Parse("`degree` must be an integer".into()))?;
        let given = match value.get("weights") {
            None => Map::new(),
            Some(Value::Object(m)) => m.clone(),
            Some(_) => return Err(Error::Parse("`weights` must be an object".into())),
        };
        for label in given.keys() {
            curve.index_of(label)?;
        }
        let mut weights = Vec::with_capacity(curve.num_points());
        for p in curve.points() {
            match given.get(&p.label) {
                None => weights.push(vec![Rational::zero(); rank]),
                Some(Value::Array(list)) => weights.push(
                    list.iter()
                        .map(|w| match w {
                            Value::String(s) => rational::parse(s),
                            Value::Number(n) if n.is_i64() => {
                                Ok(rational::int(n.as_i64().unwrap()))
                            }
                            _ => Err(Error::Parse(format!("bad weight {w}"))),
                        })
                        .collect::<Result<_>>()?,
                ),
                Some(other) => return Err(Error::Parse(format!("bad weight list {other}"))),
            }
        }
        Self::new(curve, rank, degree, weights)
    }
}

/// Exact section count `h^0(O(d))` on the projective line.
pub fn h0_line_genus0(curve: &MarkedCurve, d: i64) -> Result<u64> {
    if curve.genus() != 0 {
        return Err(Error::GenusNotZero(curve.genus()));
    }
    Ok((d + 1).max(0) as u64)
}

/// Decides whether a parabolic connection exists: every direct summand must have
/// parabolic degree zero. An empty summand list declares `bundle` indecomposable.
pub fn connection_exists(
    bundle: &LocallyAbelianBundle,
    summands: &[LocallyAbelianBundle],
) -> Result<ConnectionReport> {
    if !summands.is_empty() {
        let mut total = summands[0].clone();
        for s in &summands[1..] {
            total = total.direct_sum(s)?;
        }
        if total != *bundle {
            return Err(Error::SummandInconsistent(format!(
                "summands add up to rank {} degree {}, bundle has rank {} degree {} (or weights differ)",
                total.rank, total.degree, bundle.rank, bundle.degree
            )));
        }
    }
    let par_deg = bundle.par_deg();
    let summand_par_degs: Vec<Rational> = summands.iter().map(|s| s.par_deg()).collect();
    let exists = par_deg.is_zero() && summand_par_degs.iter().all(Zero::is_zero);
    Ok(ConnectionReport {
        exists,
        par_deg,
        summand_par_degs,
    })
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k.min(n));
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All non-decreasing index sequences of length `k` drawn from `0..r`.
pub(crate) fn multisets(r: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, r: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..r {
            cur.push(i);
            go(i, r, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, r, k, &mut Vec::with_capacity(k), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn p1() -> Arc<MarkedCurve> {
        Arc::new(MarkedCurve::with_levels(0, &[5, 5, 5]).unwrap())
    }

    fn theta(c: &Arc<MarkedCurve>) -> LocallyAbelianBundle {
        LocallyAbelianBundle::line(c.clone(), -1, vec![rat(2, 5); 3]).unwrap()
    }

    fn gunning(c: &Arc<MarkedCurve>) -> LocallyAbelianBundle {
        LocallyAbelianBundle::new(c.clone(), 2, -3, vec![vec![rat(2, 5), rat(3, 5)]; 3]).unwrap()
    }

    #[test]
    fn rejects_malformed_weights() {
        let c = p1();
        let bad = |w: Rational| LocallyAbelianBundle::line(c.clone(), 0, vec![w; 3]);
        assert!(bad(rat(1, 1)).is_err());
        assert!(bad(rat(-1, 5)).is_err());
        assert!(bad(rat(1, 3)).is_err());
        assert!(LocallyAbelianBundle::new(c.clone(), 2, 0, vec![vec![rat(0, 1)]; 3]).is_err());
        assert!(LocallyAbelianBundle::new(c, 0, 0, vec![vec![]; 3]).is_err());
    }

    #[test]
    fn par_deg_examples() {
        let c = p1();
        assert_eq!(gunning(&c).par_deg(), rat(0, 1));
        assert_eq!(
            LocallyAbelianBundle::trivial(c.clone()).par_deg(),
            rat(0, 1)
        );
        assert_eq!(theta(&c).par_deg(), rat(1, 5));
    }

    #[test]
    fn dual_examples() {
        let c = p1();
        let d = theta(&c).dual();
        assert_eq!(d.degree(), -2);
        assert_eq!(d.weights(), &vec![vec![rat(3, 5)]; 3][..]);
        assert_eq!(d.par_deg(), -theta(&c).par_deg());
        let t = LocallyAbelianBundle::trivial(c);
        assert_eq!(t.dual(), t);
    }

    #[test]
    fn tensor_examples() {
        let c = p1();
        let l = theta(&c);
        let l2 = l.tensor(&l).unwrap();
        assert_eq!((l2.degree(), l2.weights()[0][0]), (-2, rat(4, 5)));
        let l4 = l2.tensor(&l2).unwrap();
        assert_eq!((l4.degree(), l4.weights()[0][0]), (-1, rat(3, 5)));
        assert_eq!(l4, l.power(4).unwrap());
        let e = gunning(&c);
        assert_eq!(
            e.tensor(&LocallyAbelianBundle::trivial(c.clone())).unwrap(),
            e
        );
        let other = Arc::new(MarkedCurve::with_levels(0, &[5, 5, 7]).unwrap());
        assert_eq!(
            e.tensor(&LocallyAbelianBundle::trivial(other)),
            Err(Error::CurveMismatch)
        );
    }

    #[test]
    fn sym_pow_examples() {
        let c = p1();
        let e = gunning(&c);
        let s2 = e.sym_pow(2);
        assert_eq!((s2.rank(), s2.degree()), (3, -3));
        assert_eq!(s2.weights()[1], vec![rat(4, 5), rat(1, 5), rat(0, 1)]);
        let s3 = e.sym_pow(3);
        assert_eq!((s3.rank(), s3.degree()), (4, -6));
        assert_eq!(
            s3.weights()[2],
            vec![rat(4, 5), rat(3, 5), rat(2, 5), rat(1, 5)]
        );
        assert!(e.sym_pow(0).is_trivial());
        assert_eq!(e.sym_pow(1), e);
    }

    #[test]
    fn det_examples() {
        let c = p1();
        let e = gunning(&c);
        assert!(e.det().is_trivial());
        assert!(e.sym_pow(3).det().is_trivial());
        let l = theta(&c);
        assert_eq!(l.det(), l);
    }

    #[test]
    fn hom_examples() {
        let c = p1();
        let l = theta(&c);
        let h = l.hom(&l.dual()).unwrap();
        // TX(-S) on the thrice-punctured sphere: degree 2 - 3 = -1, weight 1/5.
        assert_eq!((h.degree(), h.weights()[0][0]), (-1, rat(1, 5)));
        let e = gunning(&c);
        assert_eq!(e.hom(&e).unwrap().par_deg(), rat(0, 1));
        assert_eq!(LocallyAbelianBundle::trivial(c).hom(&e).unwrap(), e);
    }

    #[test]
    fn twist_examples() {
        let c = p1();
        let t = LocallyAbelianBundle::trivial(c.clone());
        assert_eq!(t.twist(1).degree(), 3);
        let e = gunning(&c);
        assert_eq!(e.twist(1).twist(-1), e);
        assert_eq!(theta(&c).dual().twist(-1).degree(), -5);
    }

    #[test]
    fn flag_table_examples() {
        let c = p1();
        let e = gunning(&c);
        assert_eq!(
            e.flag_table("x2").unwrap(),
            vec![
                FlagRow {
                    weight: rat(3, 5),
                    multiplicity: 1
                },
                FlagRow {
                    weight: rat(2, 5),
                    multiplicity: 1
                }
            ]
        );
        let rows = e.sym_pow(4).flag_table("x1").unwrap();
        let ws: Vec<Rational> = rows.iter().map(|r| r.weight).collect();
        assert_eq!(
            ws,
            vec![rat(4, 5), rat(3, 5), rat(2, 5), rat(1, 5), rat(0, 1)]
        );
        let flat = LocallyAbelianBundle::new(c.clone(), 2, 0, vec![vec![rat(1, 5); 2]; 3]).unwrap();
        assert_eq!(
            flat.flag_table("x3").unwrap(),
            vec![FlagRow {
                weight: rat(1, 5),
                multiplicity: 2
            }]
        );
        assert_eq!(e.flag_table("y"), Err(Error::UnknownPoint("y".into())));
    }

    #[test]
    fn euler_characteristic_and_h0() {
        let c = p1();
        assert_eq!(
            LocallyAbelianBundle::trivial(c.clone()).euler_characteristic(),
            1
        );
        assert_eq!(gunning(&c).euler_characteristic(), -1);
        let g2 = Arc::new(MarkedCurve::with_levels(2, &[]).unwrap());
        let k = LocallyAbelianBundle::line(g2.clone(), 2, vec![]).unwrap();
        assert_eq!(k.euler_characteristic(), 1);
        assert_eq!(h0_line_genus0(&c, -1), Ok(0));
        assert_eq!(h0_line_genus0(&c, 0), Ok(1));
        assert_eq!(h0_line_genus0(&c, 3), Ok(4));
        assert_eq!(h0_line_genus0(&g2, 3), Err(Error::GenusNotZero(2)));
    }

    #[test]
    fn connection_existence() {
        let c = p1();
        assert!(connection_exists(&gunning(&c), &[]).unwrap().exists);
        assert!(!connection_exists(&theta(&c), &[]).unwrap().exists);
        assert!(
            connection_exists(&LocallyAbelianBundle::trivial(c.clone()), &[])
                .unwrap()
                .exists
        );
        // Declaring E_* = L_* ⊕ L_*^{-1} is consistent with the numbers but the summands have
        // nonzero parabolic degree.
        let split = [theta(&c), theta(&c).dual()];
        let report = connection_exists(&gunning(&c), &split).unwrap();
        assert!(!report.exists);
        assert_eq!(report.summand_par_degs, vec![rat(1, 5), rat(-1, 5)]);
        assert!(matches!(
            connection_exists(&gunning(&c), &[theta(&c)]),
            Err(Error::SummandInconsistent(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let c = p1();
        let e = gunning(&c).sym_pow(2);
        let v = e.to_json();
        assert_eq!(v["weights"]["x1"], json!(["4/5", "1/5", "0"]));
        let keys: Vec<&String> = v["weights"].as_object().unwrap().keys().collect();
        assert_eq!(keys, vec!["x1", "x2", "x3"]);
        assert_eq!(LocallyAbelianBundle::from_json(c.clone(), &v).unwrap(), e);
        let bad = json!({"rank": 1, "degree": 0, "weights": {"zz": ["0"]}});
        assert!(LocallyAbelianBundle::from_json(c, &bad).is_err());
    }

    #[test]
    fn binomials_and_multisets() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(12, 11), 12);
        assert_eq!(binomial(3, 0), 1);
        assert_eq!(multisets(3, 2).len(), 6);
        assert_eq!(multisets(2, 11).len(), 12);
    }
}
