//! Fuchsian systems on the projective line and their numerical monodromy.
//!
//! Horizontal sections of `d + sum_i A_i dz/(z - p_i)` solve `dW/dz = -A(z) W`, so a
//! positively oriented loop around `p_i` has monodromy conjugate to `exp(-2 pi i A_i)`
//! for non-resonant residues. All loops start at one common base point far outside the
//! punctures, which makes the matrices directly comparable.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use super::integrate::{transport, Segment, StepStats};
use super::linalg::{self, CMatrix};
use crate::bundle::multisets;
use crate::error::{Error, Result};
use crate::rational;

pub const INFINITY_LABEL: &str = "inf";

/// Eigenvector-matrix condition number above which a monodromy is treated as non-semisimple.
pub const SEMISIMPLE_CONDITION_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct Puncture {
    pub label: String,
    pub coordinate: Complex64,
    pub residue: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuchsianSystem {
    rank: usize,
    punctures: Vec<Puncture>,
    infinity_residue: CMatrix,
}

pub fn build_fuchsian(rank: usize, punctures: Vec<Puncture>) -> Result<FuchsianSystem> {
    if rank == 0 {
        return Err(Error::InvalidArgument("rank must be positive".into()));
    }
    for (i, p) in punctures.iter().enumerate() {
        if p.residue.shape() != (rank, rank) {
            return Err(Error::InvalidArgument(format!(
                "residue at `{}` is {}x{}, expected {rank}x{rank}",
                p.label,
                p.residue.nrows(),
                p.residue.ncols()
            )));
        }
        if p.label == INFINITY_LABEL {
            return Err(Error::InvalidArgument(format!(
                "label `{INFINITY_LABEL}` is reserved"
            )));
        }
        for q in &punctures[..i] {
            if q.label == p.label {
                return Err(Error::DuplicateLabel(p.label.clone()));
            }
            if (q.coordinate - p.coordinate).norm() < 1e-12 {
                return Err(Error::DuplicatePuncture(format!("{}", p.coordinate)));
            }
        }
    }
    let mut infinity_residue = CMatrix::zeros(rank, rank);
    for p in &punctures {
        infinity_residue -= &p.residue;
    }
    Ok(FuchsianSystem {
        rank,
        punctures,
        infinity_residue,
    })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawReal {
    Number(f64),
    Text(String),
}

impl RawReal {
    fn value(&self) -> Result<f64> {
        match self {
            RawReal::Number(x) => Ok(*x),
            RawReal::Text(s) => rational::parse(s).map(|q| rational::to_f64(&q)),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawComplex {
    Real(RawReal),
    Pair(RawReal, RawReal),
}

impl RawComplex {
    fn value(&self) -> Result<Complex64> {
        match self {
            RawComplex::Real(x) => Ok(Complex64::new(x.value()?, 0.0)),
            RawComplex::Pair(re, im) => Ok(Complex64::new(re.value()?, im.value()?)),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPuncture {
    label: Option<String>,
    coordinate: RawComplex,
    residue: Vec<Vec<RawComplex>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    rank: usize,
    punctures: Vec<RawPuncture>,
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn matrix_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex_json(m[(i, j)])).collect()))
            .collect(),
    )
}

impl FuchsianSystem {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn punctures(&self) -> &[Puncture] {
        &self.punctures
    }

    pub fn infinity_residue(&self) -> &CMatrix {
        &self.infinity_residue
    }

    /// Labels of all singular points, finite ones first, then `inf`.
    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = self.punctures.iter().map(|p| p.label.clone()).collect();
        out.push(INFINITY_LABEL.into());
        out
    }

    pub fn residue(&self, label: &str) -> Result<&CMatrix> {
        if label == INFINITY_LABEL {
            return Ok(&self.infinity_residue);
        }
        self.punctures
            .iter()
            .find(|p| p.label == label)
            .map(|p| &p.residue)
            .ok_or_else(|| Error::UnknownPuncture(label.into()))
    }

    /// `A(z) = sum_i A_i / (z - p_i)`.
    pub fn connection_matrix(&self, z: Complex64) -> CMatrix {
        let mut a = CMatrix::zeros(self.rank, self.rank);
        for p in &self.punctures {
            a += &p.residue / (z - p.coordinate);
        }
        a
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSystem = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut punctures = Vec::with_capacity(raw.punctures.len());
        for (i, p) in raw.punctures.into_iter().enumerate() {
            if p.residue.len() != raw.rank || p.residue.iter().any(|row| row.len() != raw.rank) {
                return Err(Error::InvalidArgument(format!(
                    "residue {} is not {}x{}",
                    i + 1,
                    raw.rank,
                    raw.rank
                )));
            }
            let mut residue = CMatrix::zeros(raw.rank, raw.rank);
            for (r, row) in p.residue.iter().enumerate() {
                for (c, entry) in row.iter().enumerate() {
                    residue[(r, c)] = entry.value()?;
                }
            }
            punctures.push(Puncture {
                label: p.label.unwrap_or_else(|| format!("x{}", i + 1)),
                coordinate: p.coordinate.value()?,
                residue,
            });
        }
        build_fuchsian(raw.rank, punctures)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rank": self.rank,
            "punctures": self.punctures.iter().map(|p| json!({
                "label": p.label,
                "coordinate": complex_json(p.coordinate),
                "residue": matrix_json(&p.residue),
            })).collect::<Vec<_>>(),
        })
    }

    /// The induced system on `Sym^k` of the fibre, in the monomial basis.
    pub fn symmetric_power(&self, k: usize) -> Result<FuchsianSystem> {
        if k == 0 {
            return Err(Error::InvalidArgument(
                "symmetric power needs k >= 1".into(),
            ));
        }
        let punctures = self
            .punctures
            .iter()
            .map(|p| Puncture {
                label: p.label.clone(),
                coordinate: p.coordinate,
                residue: sym_derivation(&p.residue, k),
            })
            .collect();
        build_fuchsian(crate::bundle::binomial(self.rank + k - 1, k), punctures)
    }

    /// Residue eigenvalue pairs at `label` that differ by a nonzero integer.
    pub fn resonances(&self, label: &str) -> Result<Vec<(Complex64, Complex64)>> {
        let ev = linalg::eigenvalues(self.residue(label)?);
        let mut out = Vec::new();
        for (i, a) in ev.iter().enumerate() {
            for b in &ev[i + 1..] {
                let d = a - b;
                if d.im.abs() < 1e-8 && d.re.abs() > 0.5 && (d.re - d.re.round()).abs() < 1e-8 {
                    out.push((*a, *b));
                }
            }
        }
        Ok(out)
    }
}

/// Exponent vectors of the degree-`k` monomials in `r` variables, in basis order.
pub fn monomial_basis(r: usize, k: usize) -> Vec<Vec<usize>> {
    multisets(r, k)
        .into_iter()
        .map(|m| {
            let mut e = vec![0; r];
            for i in m {
                e[i] += 1;
            }
            e
        })
        .collect()
}

/// Action of `a` on degree-`k` polynomials as a derivation: `e_i -> sum_l a_{li} e_l`.
pub fn sym_derivation(a: &CMatrix, k: usize) -> CMatrix {
    let r = a.nrows();
    let basis = monomial_basis(r, k);
    let index = |e: &Vec<usize>| {
        basis
            .iter()
            .position(|b| b == e)
            .expect("monomial in basis")
    };
    let mut out = CMatrix::zeros(basis.len(), basis.len());
    for (col, e) in basis.iter().enumerate() {
        for i in 0..r {
            if e[i] == 0 {
                continue;
            }
            for l in 0..r {
                let mut f = e.clone();
                f[i] -= 1;
                f[l] += 1;
                out[(index(&f), col)] += a[(l, i)] * Complex64::new(e[i] as f64, 0.0);
            }
        }
    }
    out
}

/// Base point, lasso loops and the loop order for which
/// `M_inf * M_{order[m-1]} * ... * M_{order[0]} = I`.
#[derive(Debug, Clone)]
pub struct LoopGeometry {
    pub base_point: Complex64,
    pub loops: Vec<Vec<Segment>>,
    pub infinity_loop: Vec<Segment>,
    pub order: Vec<usize>,
}

pub fn loop_geometry(system: &FuchsianSystem) -> LoopGeometry {
    let pts: Vec<Complex64> = system.punctures.iter().map(|p| p.coordinate).collect();
    let m = pts.len();
    let center = if m == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        pts.iter().sum::<Complex64>() / m as f64
    };
    let spread = pts.iter().map(|p| (p - center).norm()).fold(0.0, f64::max);
    let big = 2.0 * spread + 1.0;
    let spoke = |b: Complex64, j: usize| Segment::Line {
        from: b,
        to: pts[j],
    };
    let clearance = |b: Complex64| {
        let mut worst = f64::INFINITY;
        for j in 0..m {
            for k in 0..m {
                if j != k {
                    worst = worst.min(spoke(b, j).distance_to(pts[k]));
                }
            }
        }
        worst
    };
    // Offset so that symmetric configurations do not put the base point on an axis.
    let (phi, _) = (0..64)
        .map(|i| -PI / 2.0 + 0.1 + TAU * i as f64 / 64.0)
        .map(|phi| (phi, clearance(center + Complex64::from_polar(big, phi))))
        .fold((0.0, f64::NEG_INFINITY), |best, cand| {
            if cand.1 > best.1 + 1e-12 {
                cand
            } else {
                best
            }
        });
    let base = center + Complex64::from_polar(big, phi);

    let loops = (0..m)
        .map(|j| {
            let p = pts[j];
            let mut room = big - (p - center).norm();
            for k in 0..m {
                if k != j {
                    room = room
                        .min((p - pts[k]).norm())
                        .min(spoke(base, k).distance_to(p));
                }
            }
            let rho = 0.4 * room;
            let u = (base - p) / (base - p).norm();
            let start = p + u * rho;
            vec![
                Segment::Line {
                    from: base,
                    to: start,
                },
                Segment::Arc {
                    center: p,
                    radius: rho,
                    start: u.arg(),
                    sweep: TAU,
                },
                Segment::Line {
                    from: start,
                    to: base,
                },
            ]
        })
        .collect();

    let inward = center - base;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        let ang = |j: usize| ((pts[j] - base) / inward).arg();
        ang(a).total_cmp(&ang(b))
    });
    LoopGeometry {
        base_point: base,
        loops,
        infinity_loop: vec![Segment::Arc {
            center,
            radius: big,
            start: phi,
            sweep: -TAU,
        }],
        order,
    }
}

fn transport_loop(
    system: &FuchsianSystem,
    segments: &[Segment],
    tol: f64,
    stats: &mut StepStats,
) -> Result<CMatrix> {
    let mut phi = linalg::identity(system.rank);
    for seg in segments {
        let f = |t: f64| -(system.connection_matrix(seg.point(t)) * seg.velocity(t));
        phi = transport(f, phi, tol, stats)?;
    }
    Ok(phi)
}

#[derive(Debug, Clone)]
pub struct Monodromy {
    pub label: String,
    pub matrix: CMatrix,
    pub error_estimate: f64,
    pub steps: usize,
    /// Resonance warnings: the conjugacy to `exp(-2 pi i Res)` may fail.
    pub warnings: Vec<String>,
}

impl Monodromy {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        linalg::eigenvalues(&self.matrix)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "point": self.label,
            "matrix": matrix_json(&self.matrix),
            "eigenvalues": self.eigenvalues().into_iter().map(complex_json).collect::<Vec<_>>(),
            "error_estimate": self.error_estimate,
            "steps": self.steps,
            "warnings": self.warnings,
        })
    }
}

/// Runs a loop at two error budgets and refines until they agree to `tol`.
fn converged_loop(
    system: &FuchsianSystem,
    segments: &[Segment],
    tol: f64,
) -> Result<(CMatrix, f64, usize)> {
    let mut stats = StepStats {
        accepted: 0,
        rejected: 0,
    };
    let mut local = (tol * 1e-2).max(1e-14);
    let mut coarse = transport_loop(system, segments, local, &mut stats)?;
    for _ in 0..6 {
        local = (local / 32.0).max(1e-15);
        let fine = transport_loop(system, segments, local, &mut stats)?;
        let err = linalg::max_abs(&(&fine - &coarse));
        if err <= tol {
            return Ok((fine, err, stats.accepted + stats.rejected));
        }
        coarse = fine;
    }
    Err(Error::IntegrationFailure(format!(
        "monodromy did not converge to {tol:e}"
    )))
}

fn resonance_warnings(system: &FuchsianSystem, label: &str) -> Result<Vec<String>> {
    Ok(system
        .resonances(label)?
        .into_iter()
        .map(|(a, b)| {
            format!(
                "resonant residue at `{label}`: eigenvalues {a:.6} and {b:.6} differ by an integer"
            )
        })
        .collect())
}

pub fn numerical_monodromy(system: &FuchsianSystem, point: &str, tol: f64) -> Result<Monodromy> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let geometry = loop_geometry(system);
    let segments = if point == INFINITY_LABEL {
        &geometry.infinity_loop
    } else {
        let j = system
            .punctures
            .iter()
            .position(|p| p.label == point)
            .ok_or_else(|| Error::UnknownPuncture(point.into()))?;
        &geometry.loops[j]
    };
    let (matrix, error_estimate, steps) = converged_loop(system, segments, tol)?;
    Ok(Monodromy {
        label: point.into(),
        matrix,
        error_estimate,
        steps,
        warnings: resonance_warnings(system, point)?,
    })
}

/// Monodromy at every singular point from the shared base point.
#[derive(Debug, Clone)]
pub struct MonodromyAtlas {
    pub base_point: Complex64,
    pub monodromies: Vec<Monodromy>,
    /// Labels in the order whose product with the loop at infinity is trivial.
    pub product_order: Vec<String>,
    /// `|M_inf M_last ... M_first - I|`, entrywise maximum.
    pub product_defect: f64,
}

impl MonodromyAtlas {
    pub fn get(&self, label: &str) -> Option<&Monodromy> {
        self.monodromies.iter().find(|m| m.label == label)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "base_point": complex_json(self.base_point),
            "product_order": self.product_order,
            "product_defect": self.product_defect,
            "monodromies": self.monodromies.iter().map(Monodromy::to_json).collect::<Vec<_>>(),
        })
    }
}

pub fn monodromy_atlas(system: &FuchsianSystem, tol: f64) -> Result<MonodromyAtlas> {
    let geometry = loop_geometry(system);
    let mut monodromies = Vec::with_capacity(system.punctures.len() + 1);
    for label in system.labels() {
        monodromies.push(numerical_monodromy(system, &label, tol)?);
    }
    let m = system.punctures.len();
    let mut product = linalg::identity(system.rank);
    for &j in &geometry.order {
        product = &monodromies[j].matrix * product;
    }
    product = &monodromies[m].matrix * product;
    Ok(MonodromyAtlas {
        base_point: geometry.base_point,
        product_order: geometry
            .order
            .iter()
            .map(|&j| system.punctures[j].label.clone())
            .collect(),
        product_defect: linalg::max_abs(&(product - linalg::identity(system.rank))),
        monodromies,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Semisimplicity {
    pub semisimple: bool,
    /// Condition number of the assembled eigenvector matrix (infinite when a cluster is defective).
    pub condition_number: f64,
}

/// Numerical diagonalizability: every eigenvalue cluster must have a full kernel and the
/// combined eigenvector matrix must be well conditioned.
pub fn semisimplicity(m: &CMatrix, tol: f64, limit: f64) -> Semisimplicity {
    let n = m.nrows();
    let scale = linalg::spectral_norm(m).max(1.0);
    let cluster_tol = (10.0 * tol.sqrt()).max(1e-4);
    let groups = linalg::clusters(&linalg::eigenvalues(m), cluster_tol);
    let mut basis = CMatrix::zeros(n, 0);
    for g in &groups {
        let lambda = g.iter().sum::<Complex64>() / g.len() as f64;
        let shifted = m - linalg::identity(n) * lambda;
        let sv = linalg::singular_values(&shifted);
        if sv[n - g.len()] > cluster_tol * scale {
            return Semisimplicity {
                semisimple: false,
                condition_number: f64::INFINITY,
            };
        }
        let kernel = linalg::near_kernel(&shifted, g.len());
        let start = basis.ncols();
        basis = basis.insert_columns(start, g.len(), Complex64::new(0.0, 0.0));
        basis.view_mut((0, start), (n, g.len())).copy_from(&kernel);
    }
    let condition_number = linalg::condition_number(&basis);
    Semisimplicity {
        semisimple: condition_number < limit,
        condition_number,
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub point: String,
    pub eigenvalues: Vec<Complex64>,
    pub expected: Vec<Complex64>,
    pub distance: f64,
    pub semisimple: bool,
    pub condition_number: f64,
    pub warnings: Vec<String>,
    pub pass: bool,
}

impl SpectrumReport {
    pub fn to_json(&self) -> Value {
        json!({
            "point": self.point,
            "eigenvalues": self.eigenvalues.iter().copied().map(complex_json).collect::<Vec<_>>(),
            "expected": self.expected.iter().copied().map(complex_json).collect::<Vec<_>>(),
            "distance": self.distance,
            "semisimple": self.semisimple,
            "condition_number": if self.condition_number.is_finite() { json!(self.condition_number) } else { json!("inf") },
            "warnings": self.warnings,
            "pass": self.pass,
        })
    }
}

/// `exp(-2 pi i w)`.
pub fn weight_eigenvalue(w: f64) -> Complex64 {
    Complex64::new(0.0, -TAU * w).exp()
}

pub fn monodromy_spectrum_check(
    system: &FuchsianSystem,
    point: &str,
    expected_weights: &[f64],
    tol: f64,
) -> Result<SpectrumReport> {
    if expected_weights.len() != system.rank {
        return Err(Error::InvalidArgument(format!(
            "{} expected weights for rank {}",
            expected_weights.len(),
            system.rank
        )));
    }
    let mono = numerical_monodromy(system, point, tol * 1e-3)?;
    let eigenvalues = mono.eigenvalues();
    let expected: Vec<Complex64> = expected_weights
        .iter()
        .map(|&w| weight_eigenvalue(w))
        .collect();
    let distance = linalg::multiset_distance(&eigenvalues, &expected);
    let s = semisimplicity(&mono.matrix, tol, SEMISIMPLE_CONDITION_LIMIT);
    Ok(SpectrumReport {
        point: point.into(),
        eigenvalues,
        expected,
        distance,
        semisimple: s.semisimple,
        condition_number: s.condition_number,
        warnings: mono.warnings,
        pass: distance <= tol && s.semisimple,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrreducibilityReport {
    /// Smallest relative residual `|M v - (v* M v) v| / |M|` over candidate eigenvectors,
    /// maximised over the monodromy matrices.
    pub min_residual: f64,
    pub threshold: f64,
    pub candidates: usize,
    pub pass: bool,
}

/// Rank-2 irreducibility: no eigenvector of one monodromy is an eigenvector of all of them.
pub fn irreducibility_check(system: &FuchsianSystem, tol: f64) -> Result<IrreducibilityReport> {
    if system.rank != 2 {
        return Err(Error::UnsupportedRank(system.rank));
    }
    let atlas = monodromy_atlas(system, tol * 1e-3)?;
    let threshold = 1e3 * tol;
    let mats: Vec<&CMatrix> = atlas.monodromies.iter().map(|m| &m.matrix).collect();
    let non_scalar = |m: &CMatrix| {
        let t = (m[(0, 0)] + m[(1, 1)]) / 2.0;
        linalg::max_abs(&(m - linalg::identity(2) * t)) > threshold * linalg::max_abs(m).max(1.0)
    };
    let mut candidates = Vec::new();
    for m in mats.iter().filter(|m| non_scalar(m)) {
        for lambda in linalg::eigenvalues(m) {
            let v = linalg::near_kernel(&(*m - linalg::identity(2) * lambda), 1);
            candidates.push(v);
        }
    }
    let residual = |v: &CMatrix| {
        mats.iter()
            .map(|m| {
                let mv = *m * v;
                let rayleigh = (v.adjoint() * &mv)[(0, 0)];
                (mv - v * rayleigh).norm() / linalg::spectral_norm(m).max(1e-300)
            })
            .fold(0.0, f64::max)
    };
    // Only scalar matrices: every vector is a common eigenvector.
    let min_residual = candidates.iter().map(residual).fold(
        if candidates.is_empty() {
            0.0
        } else {
            f64::INFINITY
        },
        f64::min,
    );
    Ok(IrreducibilityReport {
        min_residual,
        threshold,
        candidates: candidates.len(),
        pass: min_residual > threshold,
    })
}
