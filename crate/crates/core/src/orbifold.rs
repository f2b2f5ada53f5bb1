//! Cover-side mirror of the parabolic calculus.
//!
//! A parabolic bundle whose weights at `x_i` lie in `(1/N_i)Z` is the invariant
//! pushforward of an orbifold bundle on a Galois cover `Y -> X` of degree `d`
//! ramified to order `N_i` over `x_i`. Only the numbers matter here: every
//! orbifold line carries its degree on `Y` and its inertia character `k_i`
//! (mod `N_i`) at the points over `x_i`. Tensor, dual and symmetric powers act
//! on those numbers directly, and pushing forward recovers the parabolic data:
//! weight `k_i/N_i`, degree `(y - sum_i k_i d/N_i)/d`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bundle::{multisets, LocallyAbelianBundle};
use crate::curve::{check_cover_degree, riemann_hurwitz_genus, MarkedCurve};
use crate::error::{Error, Result};
use crate::oper;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct OrbifoldLine {
    pub y_degree: i64,
    /// Inertia character at each marked point, reduced to `0..N_i`.
    pub characters: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbifoldBundle {
    curve: Arc<MarkedCurve>,
    cover_degree: u64,
    components: Vec<OrbifoldLine>,
}

impl OrbifoldBundle {
    pub fn new(
        curve: Arc<MarkedCurve>,
        cover_degree: u64,
        mut components: Vec<OrbifoldLine>,
    ) -> Result<Self> {
        check_cover_degree(&curve, cover_degree)?;
        if components.is_empty() {
            return Err(Error::InvalidOrbifold("no components".into()));
        }
        for c in &components {
            if c.characters.len() != curve.num_points() {
                return Err(Error::InvalidOrbifold(format!(
                    "{} characters for {} marked points",
                    c.characters.len(),
                    curve.num_points()
                )));
            }
            if c.characters
                .iter()
                .zip(curve.levels())
                .any(|(&k, n)| k >= n)
            {
                return Err(Error::InvalidOrbifold(format!(
                    "characters {:?} are not reduced",
                    c.characters
                )));
            }
        }
        components.sort();
        Ok(OrbifoldBundle {
            curve,
            cover_degree,
            components,
        })
    }

    fn with_components(&self, components: Vec<OrbifoldLine>) -> Self {
        let mut components = components;
        components.sort();
        OrbifoldBundle {
            curve: self.curve.clone(),
            cover_degree: self.cover_degree,
            components,
        }
    }

    pub fn curve(&self) -> &Arc<MarkedCurve> {
        &self.curve
    }

    pub fn cover_degree(&self) -> u64 {
        self.cover_degree
    }

    pub fn components(&self) -> &[OrbifoldLine] {
        &self.components
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    fn reduce(&self, raw: impl Iterator<Item = i64>) -> Vec<u32> {
        raw.zip(self.curve.levels())
            .map(|(k, n)| k.rem_euclid(n as i64) as u32)
            .collect()
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if !(Arc::ptr_eq(&self.curve, &other.curve) || self.curve == other.curve) {
            return Err(Error::CurveMismatch);
        }
        if self.cover_degree != other.cover_degree {
            return Err(Error::CoverMismatch(self.cover_degree, other.cover_degree));
        }
        Ok(())
    }

    fn combine(&self, parts: &[&OrbifoldLine]) -> OrbifoldLine {
        let n = self.curve.num_points();
        let y_degree = parts.iter().map(|p| p.y_degree).sum();
        let characters =
            self.reduce((0..n).map(|i| parts.iter().map(|p| p.characters[i] as i64).sum()));
        OrbifoldLine {
            y_degree,
            characters,
        }
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = Vec::with_capacity(self.rank() * other.rank());
        for a in &self.components {
            for b in &other.components {
                out.push(self.combine(&[a, b]));
            }
        }
        Ok(self.with_components(out))
    }

    pub fn dual(&self) -> Self {
        let out = self
            .components
            .iter()
            .map(|c| OrbifoldLine {
                y_degree: -c.y_degree,
                characters: self.reduce(c.characters.iter().map(|&k| -(k as i64))),
            })
            .collect();
        self.with_components(out)
    }

    pub fn sym(&self, k: usize) -> Self {
        if k == 0 {
            return self.with_components(vec![OrbifoldLine {
                y_degree: 0,
                characters: vec![0; self.curve.num_points()],
            }]);
        }
        let out = multisets(self.rank(), k)
            .into_iter()
            .map(|m| {
                let parts: Vec<&OrbifoldLine> = m.iter().map(|&i| &self.components[i]).collect();
                self.combine(&parts)
            })
            .collect();
        self.with_components(out)
    }

    pub fn det(&self) -> Self {
        let parts: Vec<&OrbifoldLine> = self.components.iter().collect();
        let line = self.combine(&parts);
        self.with_components(vec![line])
    }
}

/// Splits `V` into weight lines (pairing the sorted weight lists index-wise, putting the
/// whole underlying degree on the first line) and lifts each line to the cover.
pub fn to_orbifold(bundle: &LocallyAbelianBundle, d: u64) -> Result<OrbifoldBundle> {
    let curve = bundle.curve().clone();
    check_cover_degree(&curve, d)?;
    let components = (0..bundle.rank())
        .map(|line| {
            let x_degree = if line == 0 { bundle.degree() } else { 0 };
            let mut y_degree = d as i64 * x_degree;
            let characters = curve
                .levels()
                .zip(bundle.weights())
                .map(|(n, ws)| {
                    let k = (ws[line] * Rational::from_integer(n as i128)).to_integer() as i64;
                    y_degree += k * (d / n as u64) as i64;
                    k as u32
                })
                .collect();
            OrbifoldLine {
                y_degree,
                characters,
            }
        })
        .collect();
    OrbifoldBundle::new(curve, d, components)
}

/// Invariant pushforward back to a parabolic bundle on `X`.
pub fn from_orbifold(orb: &OrbifoldBundle) -> Result<LocallyAbelianBundle> {
    let curve = orb.curve.clone();
    let d = orb.cover_degree as i64;
    let levels: Vec<u32> = curve.levels().collect();
    let mut degree = 0;
    let mut weights: Vec<Vec<Rational>> = vec![Vec::with_capacity(orb.rank()); levels.len()];
    for c in &orb.components {
        let ramified: i64 = c
            .characters
            .iter()
            .zip(&levels)
            .map(|(&k, &n)| k as i64 * (d / n as i64))
            .sum();
        let numer = c.y_degree - ramified;
        if numer % d != 0 {
            return Err(Error::NonIntegralPushforward {
                y_degree: c.y_degree,
            });
        }
        degree += numer / d;
        for (i, (&k, &n)) in c.characters.iter().zip(&levels).enumerate() {
            weights[i].push(Rational::new(k as i128, n as i128));
        }
    }
    LocallyAbelianBundle::new(curve, orb.rank(), degree, weights)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaReport {
    pub cover_degree: u64,
    pub cover_genus: u64,
    /// Degree on `Y` of the lift of `L_*`.
    pub theta_y_degree: i64,
    pub pass: bool,
}

/// The lift of `L_*` to the cover is a theta characteristic: `2 deg = 2g_Y - 2`.
pub fn theta_characteristic_check(curve: &Arc<MarkedCurve>, d: u64) -> Result<ThetaReport> {
    let theta = to_orbifold(&oper::theta_line(curve)?, d)?;
    let cover_genus = riemann_hurwitz_genus(curve, d)?;
    let theta_y_degree = theta.components[0].y_degree;
    Ok(ThetaReport {
        cover_degree: d,
        cover_genus,
        theta_y_degree,
        pass: 2 * theta_y_degree == 2 * cover_genus as i64 - 2,
    })
}

/// Expressions over the tensor calculus, evaluated on both sides of the correspondence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expr {
    /// `O_X`.
    Trivial,
    /// The Gunning bundle `E_*`.
    Gunning,
    /// `L_* ⊂ E_*`.
    Theta,
    /// `E_*/L_*`.
    ThetaQuotient,
    Tensor(Box<Expr>, Box<Expr>),
    Dual(Box<Expr>),
    Sym(Box<Expr>, usize),
    Det(Box<Expr>),
}

impl Expr {
    pub fn rank(&self) -> usize {
        match self {
            Expr::Trivial | Expr::Theta | Expr::ThetaQuotient | Expr::Det(_) => 1,
            Expr::Gunning => 2,
            Expr::Tensor(a, b) => a.rank() * b.rank(),
            Expr::Dual(a) => a.rank(),
            Expr::Sym(a, k) => crate::bundle::binomial(a.rank() + k - 1, *k),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Expr::Trivial | Expr::Gunning | Expr::Theta | Expr::ThetaQuotient => 1,
            Expr::Tensor(a, b) => 1 + a.size() + b.size(),
            Expr::Dual(a) | Expr::Sym(a, _) | Expr::Det(a) => 1 + a.size(),
        }
    }

    fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Tensor(a, b) => vec![a, b],
            Expr::Dual(a) | Expr::Sym(a, _) | Expr::Det(a) => vec![a],
            _ => vec![],
        }
    }

    pub fn eval_parabolic(&self, curve: &Arc<MarkedCurve>) -> Result<LocallyAbelianBundle> {
        Ok(match self {
            Expr::Trivial => LocallyAbelianBundle::trivial(curve.clone()),
            Expr::Gunning => oper::gunning(curve)?,
            Expr::Theta => oper::theta_line(curve)?,
            Expr::ThetaQuotient => oper::theta_quotient(curve)?,
            Expr::Tensor(a, b) => a.eval_parabolic(curve)?.tensor(&b.eval_parabolic(curve)?)?,
            Expr::Dual(a) => a.eval_parabolic(curve)?.dual(),
            Expr::Sym(a, k) => a.eval_parabolic(curve)?.sym_pow(*k),
            Expr::Det(a) => a.eval_parabolic(curve)?.det(),
        })
    }

    /// Leaves are lifted to the cover once; every operation then runs on the cover side.
    pub fn eval_orbifold(&self, curve: &Arc<MarkedCurve>, d: u64) -> Result<OrbifoldBundle> {
        Ok(match self {
            Expr::Trivial | Expr::Gunning | Expr::Theta | Expr::ThetaQuotient => {
                to_orbifold(&self.eval_parabolic(curve)?, d)?
            }
            Expr::Tensor(a, b) => a
                .eval_orbifold(curve, d)?
                .tensor(&b.eval_orbifold(curve, d)?)?,
            Expr::Dual(a) => a.eval_orbifold(curve, d)?.dual(),
            Expr::Sym(a, k) => a.eval_orbifold(curve, d)?.sym(*k),
            Expr::Det(a) => a.eval_orbifold(curve, d)?.det(),
        })
    }

    /// Random expression with at most `max_rank` at every node. The root is never a bare leaf.
    pub fn random<R: Rng>(rng: &mut R, depth: usize, max_rank: usize) -> Expr {
        loop {
            let e = Self::random_node(rng, depth.max(1), true);
            if e.max_node_rank() <= max_rank {
                return e;
            }
        }
    }

    fn max_node_rank(&self) -> usize {
        self.children()
            .into_iter()
            .map(Expr::max_node_rank)
            .fold(self.rank(), usize::max)
    }

    fn random_node<R: Rng>(rng: &mut R, depth: usize, root: bool) -> Expr {
        if depth == 0 || (!root && rng.random_bool(0.3)) {
            return match rng.random_range(0..6) {
                0 => Expr::Trivial,
                1 => Expr::Theta,
                2 => Expr::ThetaQuotient,
                _ => Expr::Gunning,
            };
        }
        let child = |rng: &mut R| Box::new(Self::random_node(rng, depth - 1, false));
        match rng.random_range(0..8) {
            0..=2 => Expr::Tensor(child(rng), child(rng)),
            3 => Expr::Dual(child(rng)),
            4..=6 => Expr::Sym(child(rng), rng.random_range(0..=4)),
            _ => Expr::Det(child(rng)),
        }
    }
}

/// Evaluates `expr` both ways and demands identical canonical forms.
pub fn oracle_check(curve: &Arc<MarkedCurve>, expr: &Expr, d: u64) -> Result<LocallyAbelianBundle> {
    let parabolic = expr.eval_parabolic(curve)?;
    let pushed = from_orbifold(&expr.eval_orbifold(curve, d)?)?;
    if parabolic != pushed {
        return Err(Error::OracleMismatch {
            expression: serde_json::to_string(expr).expect("expression serialization"),
            parabolic: parabolic.to_json().to_string(),
            orbifold: pushed.to_json().to_string(),
        });
    }
    Ok(parabolic)
}

/// Smallest sub-expression of a failing expression that still fails.
pub fn minimal_failure(curve: &Arc<MarkedCurve>, expr: &Expr, d: u64) -> Option<Expr> {
    oracle_check(curve, expr, d).err()?;
    for child in expr.children() {
        if let Some(smaller) = minimal_failure(curve, child, d) {
            return Some(smaller);
        }
    }
    Some(expr.clone())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub seed: u64,
    pub count: usize,
    pub cover_degree: u64,
    pub passed: usize,
    /// Minimal failing expressions, as evaluated.
    pub failures: Vec<Expr>,
    pub errors: Vec<String>,
}

impl OracleReport {
    pub fn pass(&self) -> bool {
        self.passed == self.count
    }
}

pub const ORACLE_MAX_RANK: usize = 40;
pub const ORACLE_DEPTH: usize = 4;

/// Seeded randomized driver over `{tensor, dual, sym <= 4, det}` on Gunning-derived bundles.
pub fn oracle_run(
    curve: &Arc<MarkedCurve>,
    seed: u64,
    count: usize,
    d: Option<u64>,
) -> Result<OracleReport> {
    oper::oper_parameters(curve)?;
    let d = d.unwrap_or_else(|| curve.default_cover_degree());
    check_cover_degree(curve, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OracleReport {
        seed,
        count,
        cover_degree: d,
        passed: 0,
        failures: Vec::new(),
        errors: Vec::new(),
    };
    for _ in 0..count {
        let expr = Expr::random(&mut rng, ORACLE_DEPTH, ORACLE_MAX_RANK);
        match oracle_check(curve, &expr, d) {
            Ok(_) => report.passed += 1,
            Err(e @ Error::OracleMismatch { .. }) => {
                report.errors.push(e.to_string());
                report
                    .failures
                    .push(minimal_failure(curve, &expr, d).unwrap_or(expr));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

pub fn format_characters(line: &OrbifoldLine) -> String {
    let parts: Vec<String> = line.characters.iter().map(|k| k.to_string()).collect();
    format!(
        "y_degree {} characters ({})",
        line.y_degree,
        parts.join(",")
    )
}
