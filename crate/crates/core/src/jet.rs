//! Parabolic jet towers, differential-operator bundles and the symbol codomain.
//!
//! Differential-operator bundles are modelled by their associated graded:
//! `Diff^k(V_*, W_*)` has graded pieces `W_* ⊗ TX(-S)^{⊗j}_* ⊗ V_*^*` for `0 <= j <= k`.

use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bundle::{h0_line_genus0, LocallyAbelianBundle};
use crate::curve::{check_cover_degree, riemann_hurwitz_genus, MarkedCurve};
use crate::error::Result;
use crate::oper;
use crate::rational::{self, Rational};

/// `TX(-S)_*` with weight `1/N_i` at each marked point.
pub fn tangent_line(curve: &Arc<MarkedCurve>) -> LocallyAbelianBundle {
    let weights = curve
        .levels()
        .map(|n| Rational::new(1, n as i128))
        .collect();
    LocallyAbelianBundle::line(curve.clone(), -curve.log_canonical_degree(), weights)
        .expect("1/N is a valid weight")
}

/// `J^j_*/J^{j-1}_*`: weight `j/N_i - floor(j/N_i)`, degree `j(2-2g-n) + sum_i floor(j/N_i)`.
pub fn jet_graded(curve: &Arc<MarkedCurve>, j: usize) -> LocallyAbelianBundle {
    let mut degree = -(j as i64) * curve.log_canonical_degree();
    let weights = curve
        .levels()
        .map(|n| {
            let q = Rational::new(j as i128, n as i128);
            degree += rational::floor(&q);
            rational::fract(&q)
        })
        .collect();
    LocallyAbelianBundle::line(curve.clone(), degree, weights).expect("j/N mod 1 is a valid weight")
}

#[derive(Debug, Clone, PartialEq)]
pub struct JetTower {
    pub k: usize,
    /// `J^j/J^{j-1}` for `j = 0..=k`; row 0 is `O_X`.
    pub graded: Vec<LocallyAbelianBundle>,
}

impl JetTower {
    pub fn rank(&self) -> usize {
        self.graded.len()
    }

    pub fn total_degree(&self) -> i64 {
        self.graded.iter().map(|g| g.degree()).sum()
    }

    pub fn total(&self) -> LocallyAbelianBundle {
        sum_all(&self.graded)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .graded
            .iter()
            .enumerate()
            .map(|(j, g)| json!({ "j": j, "degree": g.degree(), "bundle": g.to_json() }))
            .collect();
        json!({ "k": self.k, "rank": self.rank(), "total_degree": self.total_degree(), "graded": rows })
    }
}

fn sum_all(pieces: &[LocallyAbelianBundle]) -> LocallyAbelianBundle {
    let mut total = pieces[0].clone();
    for p in &pieces[1..] {
        total = total.direct_sum(p).expect("pieces share a curve");
    }
    total
}

pub fn jet_tower(curve: &Arc<MarkedCurve>, k: usize) -> JetTower {
    JetTower {
        k,
        graded: (0..=k).map(|j| jet_graded(curve, j)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffPiece {
    pub j: usize,
    pub bundle: LocallyAbelianBundle,
}

impl DiffPiece {
    pub fn degree(&self) -> i64 {
        self.bundle.degree()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.bundle.euler_characteristic()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffSpace {
    pub k: usize,
    pub pieces: Vec<DiffPiece>,
}

impl DiffSpace {
    pub fn total(&self) -> LocallyAbelianBundle {
        let bundles: Vec<_> = self.pieces.iter().map(|p| p.bundle.clone()).collect();
        sum_all(&bundles)
    }

    pub fn to_json(&self) -> Value {
        let total = self.total();
        let rows: Vec<Value> = self
            .pieces
            .iter()
            .map(|p| {
                json!({
                    "j": p.j,
                    "rank": p.bundle.rank(),
                    "degree": p.degree(),
                    "euler_characteristic": p.euler_characteristic(),
                    "bundle": p.bundle.to_json(),
                })
            })
            .collect();
        json!({
            "k": self.k,
            "rank": total.rank(),
            "degree": total.degree(),
            "euler_characteristic": total.euler_characteristic(),
            "pieces": rows,
        })
    }
}

/// `Diff^k(V_*, W_*) = (W_* ⊗ J^k_* ⊗ V_*^*)_0`, graded by jet order.
pub fn diff_space(
    source: &LocallyAbelianBundle,
    target: &LocallyAbelianBundle,
    k: usize,
) -> Result<DiffSpace> {
    let hom = source.hom(target)?;
    let pieces = (0..=k)
        .map(|j| {
            Ok(DiffPiece {
                j,
                bundle: hom.tensor(&jet_graded(source.curve(), j))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiffSpace { k, pieces })
}

/// Value bundle of the order-`k` symbol: `TX(-S)^{⊗k}_* ⊗ Hom(V_*, W_*)`.
pub fn symbol_codomain(
    source: &LocallyAbelianBundle,
    target: &LocallyAbelianBundle,
    k: usize,
) -> Result<LocallyAbelianBundle> {
    source.hom(target)?.tensor(&jet_graded(source.curve(), k))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorPiece {
    pub j: usize,
    /// The graded piece is `L^{power}_*` with `power = 2r - 2j`.
    pub power: i64,
    pub degree: i64,
    #[serde(with = "rational::serde_vec")]
    pub weights: Vec<Rational>,
    /// Exact `h^0` of the graded line, genus 0 only.
    pub h0: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperOperatorReport {
    pub r: usize,
    pub pieces: Vec<OperatorPiece>,
    /// The top piece (the symbol's value bundle) is `O_X` with trivial weights.
    pub symbol_trivial: bool,
    /// `sum_{j <= r-2} h^0` of the graded pieces (genus 0).
    pub affine_dimension: Option<u64>,
    /// True when every piece below the top has degree >= -1, so `H^1` of the sub-pieces
    /// vanishes and the graded count equals the true count. Otherwise it is an upper bound.
    pub dimension_exact: bool,
    /// `dim H^0(X, K_X) = g`, the codomain of the sub-principal map.
    pub subprincipal_codomain_dim: u32,
}

/// Graded description of `Diff^r(L^{1-r}_*, L^{r+1}_*)`, the space containing the opers.
pub fn oper_operator_space(curve: &Arc<MarkedCurve>, r: usize) -> Result<OperOperatorReport> {
    let source = oper::theta_power(curve, 1 - r as i64)?;
    let target = oper::theta_power(curve, r as i64 + 1)?;
    let space = diff_space(&source, &target, r)?;
    let pieces: Vec<OperatorPiece> = space
        .pieces
        .iter()
        .map(|p| OperatorPiece {
            j: p.j,
            power: 2 * r as i64 - 2 * p.j as i64,
            degree: p.degree(),
            weights: p.bundle.weights().iter().map(|w| w[0]).collect(),
            h0: h0_line_genus0(curve, p.degree()).ok(),
        })
        .collect();
    let symbol_trivial = space.pieces[r].bundle.is_trivial();
    let lower = &pieces[..r.saturating_sub(1)];
    let affine_dimension = if curve.genus() == 0 {
        Some(lower.iter().map(|p| p.h0.unwrap_or(0)).sum())
    } else {
        None
    };
    let dimension_exact = pieces[..r].iter().all(|p| p.degree >= -1);
    Ok(OperOperatorReport {
        r,
        pieces,
        symbol_trivial,
        affine_dimension,
        dimension_exact,
        subprincipal_codomain_dim: curve.genus(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularRepReport {
    pub cover_degree: u64,
    pub cover_genus: u64,
    pub rank: usize,
    pub degree: i64,
    #[serde(with = "rational::serde_str")]
    pub par_deg: Rational,
    pub pass: bool,
}

/// Parabolic data of the pushforward of the trivial bundle `C[Γ]_Y`: rank `d`,
/// weights `(N_i - k)/N_i` (`k = 1..N_i`) each with multiplicity `d/N_i`, and underlying
/// degree `(1 - g_Y) - d(1 - g)`.
pub fn regular_representation(curve: &Arc<MarkedCurve>, d: u64) -> Result<LocallyAbelianBundle> {
    check_cover_degree(curve, d)?;
    let g_y = riemann_hurwitz_genus(curve, d)? as i64;
    let degree = (1 - g_y) - d as i64 * (1 - curve.genus() as i64);
    let weights = curve
        .levels()
        .map(|n| {
            let mult = d / n as u64;
            (1..=n)
                .flat_map(|k| {
                    std::iter::repeat_n(Rational::new((n - k) as i128, n as i128), mult as usize)
                })
                .collect()
        })
        .collect();
    LocallyAbelianBundle::new(curve.clone(), d as usize, degree, weights)
}

pub fn regular_rep_check(curve: &Arc<MarkedCurve>, d: u64) -> Result<RegularRepReport> {
    let bundle = regular_representation(curve, d)?;
    let par_deg = bundle.par_deg();
    Ok(RegularRepReport {
        cover_degree: d,
        cover_genus: riemann_hurwitz_genus(curve, d)?,
        rank: bundle.rank(),
        degree: bundle.degree(),
        par_deg,
        pass: par_deg.is_zero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn p1() -> Arc<MarkedCurve> {
        Arc::new(MarkedCurve::with_levels(0, &[5, 5, 5]).unwrap())
    }

    #[test]
    fn jet_graded_examples() {
        let c = p1();
        let j1 = jet_graded(&c, 1);
        assert_eq!((j1.degree(), j1.weights()[0][0]), (-1, rat(1, 5)));
        assert_eq!(j1, tangent_line(&c));
        assert!(jet_graded(&c, 0).is_trivial());
        let j5 = jet_graded(&c, 5);
        assert_eq!((j5.degree(), j5.weights()[0][0]), (-2, rat(0, 1)));
    }

    #[test]
    fn jet_tower_examples() {
        let c = p1();
        let t1 = jet_tower(&c, 1);
        assert_eq!(t1.rank(), 2);
        assert!(t1.graded[0].is_trivial());
        assert_eq!(t1.graded[1].degree(), -1);
        assert_eq!(jet_tower(&c, 0).graded.len(), 1);
        let t10 = jet_tower(&c, 10);
        for j in 0..5 {
            assert_eq!(t10.graded[j].weights(), t10.graded[j + 5].weights());
        }
        assert_eq!(t10.total().degree(), t10.total_degree());
    }

    #[test]
    fn diff_space_examples() {
        let c = p1();
        let triv = LocallyAbelianBundle::trivial(c.clone());
        let d0 = diff_space(&triv, &triv, 0).unwrap();
        assert!(d0.total().is_trivial());
        assert_eq!(d0.total().euler_characteristic(), 1);

        let r = 3;
        let source = oper::theta_power(&c, 1 - r).unwrap();
        let target = oper::theta_power(&c, r + 1).unwrap();
        let space = diff_space(&source, &target, r as usize).unwrap();
        let degrees: Vec<i64> = space.pieces.iter().map(|p| p.degree()).collect();
        // L^6, L^4, L^2, L^0 on (g=0, n=3, c=2).
        assert_eq!(degrees, vec![0, -1, -2, 0]);
        assert!(space.pieces[3].bundle.is_trivial());
        let chi: i64 = space.pieces.iter().map(|p| p.euler_characteristic()).sum();
        assert_eq!(chi, space.total().euler_characteristic());
    }

    #[test]
    fn symbol_codomain_examples() {
        let c = p1();
        for r in 2..6i64 {
            let source = oper::theta_power(&c, 1 - r).unwrap();
            let target = oper::theta_power(&c, r + 1).unwrap();
            assert!(symbol_codomain(&source, &target, r as usize)
                .unwrap()
                .is_trivial());
        }
        let e = oper::gunning(&c).unwrap();
        assert_eq!(symbol_codomain(&e, &e, 0).unwrap(), e.hom(&e).unwrap());
        let triv = LocallyAbelianBundle::trivial(c.clone());
        let s = symbol_codomain(&triv, &triv, 1).unwrap();
        assert_eq!((s.degree(), s.weights()[1][0]), (-1, rat(1, 5)));
    }

    #[test]
    fn oper_operator_space_examples() {
        let c = p1();
        let report = oper_operator_space(&c, 3).unwrap();
        assert!(report.symbol_trivial);
        let sub = &report.pieces[2];
        assert_eq!(
            (sub.power, sub.degree, sub.weights[0], sub.h0),
            (2, -2, rat(4, 5), Some(0))
        );
        assert_eq!(report.subprincipal_codomain_dim, 0);

        let r2 = oper_operator_space(&c, 2).unwrap();
        let bottom = &r2.pieces[0];
        assert_eq!((bottom.power, bottom.degree, bottom.h0), (4, -1, Some(0)));
        assert_eq!(r2.affine_dimension, Some(0));
        // r = 3: L^6 has degree 0, so one section below the sub-principal level.
        assert_eq!(report.affine_dimension, Some(1));
        assert!(!report.dimension_exact);
    }

    #[test]
    fn regular_rep_examples() {
        let c = p1();
        let rep = regular_representation(&c, 5).unwrap();
        assert_eq!((rep.rank(), rep.degree()), (5, -6));
        assert_eq!(
            rep.weights()[0],
            vec![rat(4, 5), rat(3, 5), rat(2, 5), rat(1, 5), rat(0, 1)]
        );
        assert!(regular_rep_check(&c, 5).unwrap().pass);

        let torus = Arc::new(MarkedCurve::with_levels(1, &[]).unwrap());
        let report = regular_rep_check(&torus, 4).unwrap();
        assert_eq!((report.degree, report.cover_genus), (0, 1));
        assert!(report.pass);
        assert!(regular_rep_check(&c, 4).is_err());
    }
}
