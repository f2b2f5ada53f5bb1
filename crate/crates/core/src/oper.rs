//! The parabolic Gunning bundle `E_*`, the oper bundle `Sym^{r-1}(E_*)`, its
//! canonical filtration and the degree identities that force transversality.

use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bundle::LocallyAbelianBundle;
use crate::curve::MarkedCurve;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Per-point integers `c_i` with `N_i = 2c_i + 1`, `c_i >= 2`.
pub fn oper_parameters(curve: &MarkedCurve) -> Result<Vec<u32>> {
    curve
        .points()
        .iter()
        .map(|p| {
            if p.level % 2 == 0 {
                Err(Error::LevelNotOdd {
                    label: p.label.clone(),
                    level: p.level,
                })
            } else if p.level < 5 {
                Err(Error::LevelTooSmallForOper {
                    label: p.label.clone(),
                    level: p.level,
                })
            } else {
                Ok((p.level - 1) / 2)
            }
        })
        .collect()
}

fn check_rank(r: usize) -> Result<()> {
    if r < 2 {
        return Err(Error::InvalidArgument(format!(
            "oper rank must be at least 2, got {r}"
        )));
    }
    Ok(())
}

/// `g - 1 + sum_i c_i / (2c_i + 1)`, the parabolic degree of `L_*`.
pub fn theta_par_deg(curve: &MarkedCurve) -> Result<Rational> {
    let cs = oper_parameters(curve)?;
    let mut total = rational::int(curve.genus() as i64 - 1);
    for c in cs {
        total += Rational::new(c as i128, 2 * c as i128 + 1);
    }
    Ok(total)
}

pub fn gunning(curve: &Arc<MarkedCurve>) -> Result<LocallyAbelianBundle> {
    let cs = oper_parameters(curve)?;
    let weights = cs
        .iter()
        .map(|&c| {
            let n = 2 * c as i128 + 1;
            vec![Rational::new(c as i128, n), Rational::new(c as i128 + 1, n)]
        })
        .collect();
    LocallyAbelianBundle::new(curve.clone(), 2, -(curve.num_points() as i64), weights)
}

/// The parabolic line `L_* ⊂ E_*`: degree `g - 1`, weight `c_i/(2c_i+1)`.
pub fn theta_line(curve: &Arc<MarkedCurve>) -> Result<LocallyAbelianBundle> {
    let cs = oper_parameters(curve)?;
    let weights = cs
        .iter()
        .map(|&c| Rational::new(c as i128, 2 * c as i128 + 1))
        .collect();
    LocallyAbelianBundle::line(curve.clone(), curve.genus() as i64 - 1, weights)
}

/// The quotient `E_*/L_* = L^*(-S)`: degree `1 - g - n`, weight `(c_i+1)/(2c_i+1)`.
pub fn theta_quotient(curve: &Arc<MarkedCurve>) -> Result<LocallyAbelianBundle> {
    let cs = oper_parameters(curve)?;
    let weights = cs
        .iter()
        .map(|&c| Rational::new(c as i128 + 1, 2 * c as i128 + 1))
        .collect();
    LocallyAbelianBundle::line(
        curve.clone(),
        1 - curve.genus() as i64 - curve.num_points() as i64,
        weights,
    )
}

/// `L^m_*` in closed form: weight `m c_i/(2c_i+1) mod 1`, degree
/// `m(g-1) + sum_i floor(m c_i/(2c_i+1))`.
pub fn theta_power(curve: &Arc<MarkedCurve>, m: i64) -> Result<LocallyAbelianBundle> {
    let cs = oper_parameters(curve)?;
    let mut degree = m * (curve.genus() as i64 - 1);
    let mut weights = Vec::with_capacity(cs.len());
    for c in cs {
        let q = Rational::new(m as i128 * c as i128, 2 * c as i128 + 1);
        degree += rational::floor(&q);
        weights.push(rational::fract(&q));
    }
    LocallyAbelianBundle::line(curve.clone(), degree, weights)
}

pub fn oper_bundle(curve: &Arc<MarkedCurve>, r: usize) -> Result<LocallyAbelianBundle> {
    check_rank(r)?;
    Ok(gunning(curve)?.sym_pow(r - 1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiltrationRow {
    pub j: usize,
    pub rank: usize,
    /// Degree of the underlying bundle `F^j_0`.
    pub degree: i64,
    #[serde(with = "rational::serde_str")]
    pub par_deg: Rational,
    /// The graded line `F^j_*/F^{j-1}_*`.
    #[serde(skip)]
    pub graded: LocallyAbelianBundle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperFiltration {
    pub r: usize,
    pub rows: Vec<FiltrationRow>,
}

impl OperFiltration {
    pub fn row(&self, j: usize) -> &FiltrationRow {
        &self.rows[j - 1]
    }

    /// The whole filtered bundle, reassembled from its graded pieces.
    pub fn associated_graded(&self) -> LocallyAbelianBundle {
        let mut total = self.rows[0].graded.clone();
        for row in &self.rows[1..] {
            total = total.direct_sum(&row.graded).expect("rows share a curve");
        }
        total
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                json!({
                    "j": row.j,
                    "rank": row.rank,
                    "degree": row.degree,
                    "par_deg": rational::format(&row.par_deg),
                    "graded": row.graded.to_json(),
                })
            })
            .collect();
        json!({ "r": self.r, "rows": rows })
    }
}

/// `F^1 ⊂ ... ⊂ F^r = Sym^{r-1}(E_*)` with `F^j/F^{j-1} = L_*^{r-j} ⊗ (E_*/L_*)^{j-1}`.
pub fn oper_filtration(curve: &Arc<MarkedCurve>, r: usize) -> Result<OperFiltration> {
    check_rank(r)?;
    let sub = theta_line(curve)?;
    let quotient = theta_quotient(curve)?;
    let mut rows = Vec::with_capacity(r);
    let mut degree = 0;
    let mut par_deg = Rational::zero();
    for j in 1..=r {
        let graded = sub
            .power((r - j) as i64)?
            .tensor(&quotient.power(j as i64 - 1)?)?;
        degree += graded.degree();
        par_deg += graded.par_deg();
        rows.push(FiltrationRow {
            j,
            rank: j,
            degree,
            par_deg,
            graded,
        });
    }
    Ok(OperFiltration { r, rows })
}

/// Closed form of `par-deg(F^j/F^{j-1}) = (2j - r - 1) par-deg(E_*/L_*)`.
pub fn graded_par_deg_formula(curve: &MarkedCurve, r: usize, j: usize) -> Result<Rational> {
    let cs = oper_parameters(curve)?;
    let mut quotient = rational::int(1 - curve.genus() as i64 - curve.num_points() as i64);
    for c in cs {
        quotient += Rational::new(c as i128 + 1, 2 * c as i128 + 1);
    }
    Ok(rational::int(2 * j as i64 - r as i64 - 1) * quotient)
}

/// Closed form of `par-deg(F^j) = j(r - j)(g - 1 + sum c_i/(2c_i+1))`.
pub fn filtration_par_deg_formula(curve: &MarkedCurve, r: usize, j: usize) -> Result<Rational> {
    Ok(rational::int(j as i64 * (r as i64 - j as i64)) * theta_par_deg(curve)?)
}

/// Degree of `ξ_{r,k}`, the line underlying `(E_*/L_*)^{2k}`:
/// `k(2 - 2g - n) + sum_i floor(k/(2c_i+1))`.
pub fn xi_degree(curve: &MarkedCurve, r: usize, k: usize) -> Result<i64> {
    check_rank(r)?;
    if k < 2 || k >= r {
        return Err(Error::InvalidArgument(format!(
            "xi needs 2 <= k <= r - 1, got k = {k}, r = {r}"
        )));
    }
    let cs = oper_parameters(curve)?;
    let k = k as i64;
    let floors: i64 = cs.iter().map(|&c| k / (2 * c as i64 + 1)).sum();
    Ok(k * (2 - 2 * curve.genus() as i64 - curve.num_points() as i64) + floors)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XiRow {
    pub k: usize,
    pub xi_degree: i64,
    /// `deg(ξ_{r,k} ⊗ K_X(S))`, which must be negative.
    pub twisted_degree: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParDegRow {
    pub j: usize,
    #[serde(with = "rational::serde_str")]
    pub par_deg: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransversalityReport {
    pub r: usize,
    pub xi: Vec<XiRow>,
    pub filtration: Vec<ParDegRow>,
    pub pass: bool,
}

/// Checks that no `F^j` (`j < r`) can be preserved by a parabolic connection and that a
/// connection moves `F^j` at most one step: `par-deg(F^j) > 0` and
/// `deg(ξ_{r,k} ⊗ K_X(S)) < 0` for `2 <= k <= r - 1`.
pub fn transversality_report(curve: &Arc<MarkedCurve>, r: usize) -> Result<TransversalityReport> {
    let filtration = oper_filtration(curve, r)?;
    let log_canonical = curve.log_canonical_degree();
    let xi = (2..r)
        .map(|k| {
            let d = xi_degree(curve, r, k)?;
            Ok(XiRow {
                k,
                xi_degree: d,
                twisted_degree: d + log_canonical,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let par_degs: Vec<ParDegRow> = filtration.rows[..r - 1]
        .iter()
        .map(|row| ParDegRow {
            j: row.j,
            par_deg: row.par_deg,
        })
        .collect();
    let pass = xi.iter().all(|x| x.twisted_degree < 0)
        && par_degs.iter().all(|p| p.par_deg > Rational::zero());
    Ok(TransversalityReport {
        r,
        xi,
        filtration: par_degs,
        pass,
    })
}

/// `Hom(F^j/F^{j-1}, F^{j+1}/F^j) ⊗ K_X(S)`, the home of the `j`-th second fundamental form.
pub fn second_fundamental_target(
    curve: &Arc<MarkedCurve>,
    r: usize,
    j: usize,
) -> Result<LocallyAbelianBundle> {
    check_rank(r)?;
    if j == 0 || j >= r {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= j <= r - 1, got j = {j}"
        )));
    }
    let filtration = oper_filtration(curve, r)?;
    let hom = filtration
        .row(j)
        .graded
        .hom(&filtration.row(j + 1).graded)?;
    let log_canonical = LocallyAbelianBundle::line(
        curve.clone(),
        curve.log_canonical_degree(),
        vec![Rational::zero(); curve.num_points()],
    )?;
    hom.tensor(&log_canonical)
}

/// The residue eigenvalues forced on any parabolic connection on the oper bundle at `label`.
pub fn residue_spectrum(curve: &Arc<MarkedCurve>, r: usize, label: &str) -> Result<Vec<Rational>> {
    let idx = curve.index_of(label)?;
    Ok(oper_bundle(curve, r)?.weights()[idx].clone())
}
