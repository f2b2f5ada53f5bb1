//! Small dense complex linear algebra on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn from_rational(m: &[Vec<crate::rational::Rational>]) -> CMatrix {
    let n = m.len();
    CMatrix::from_fn(n, n, |i, j| {
        Complex64::new(crate::rational::to_f64(&m[i][j]), 0.0)
    })
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Eigenvalues from the complex Schur form, ordered by argument then modulus.
pub fn eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    let n = m.nrows();
    if n == 0 {
        return vec![];
    }
    let (_, t) = m.clone().schur().unpack();
    let mut ev: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    ev.sort_by(|a, b| {
        a.arg()
            .total_cmp(&b.arg())
            .then(a.norm().total_cmp(&b.norm()))
    });
    ev
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Orthonormal basis (as columns) of the right singular vectors for the `k` smallest
/// singular values: a numerical kernel of dimension `k`.
pub fn near_kernel(m: &CMatrix, k: usize) -> CMatrix {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    // Square inputs give a full set of singular vectors.
    CMatrix::from_fn(n, k, |i, j| v_t[(order[j], i)].conj())
}

pub fn condition_number(m: &CMatrix) -> f64 {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Smallest achievable maximum distance when pairing two equal-size multisets.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    if a.len() <= 8 {
        let mut idx: Vec<usize> = (0..b.len()).collect();
        let mut best = f64::INFINITY;
        permute(&mut idx, 0, &mut |perm| {
            let worst = a
                .iter()
                .zip(perm)
                .map(|(x, &j)| (x - b[j]).norm())
                .fold(0.0, f64::max);
            best = best.min(worst);
        });
        best
    } else {
        // Greedy pairing for large multisets.
        let mut left: Vec<Complex64> = b.to_vec();
        a.iter()
            .map(|x| {
                let (j, d) = left
                    .iter()
                    .enumerate()
                    .map(|(j, y)| (j, (x - y).norm()))
                    .min_by(|p, q| p.1.total_cmp(&q.1))
                    .unwrap();
                left.swap_remove(j);
                d
            })
            .fold(0.0, f64::max)
    }
}

fn permute(idx: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == idx.len() {
        visit(idx);
        return;
    }
    for i in k..idx.len() {
        idx.swap(k, i);
        permute(idx, k + 1, visit);
        idx.swap(k, i);
    }
}

/// Groups eigenvalues closer than `tol` (single linkage).
pub fn clusters(ev: &[Complex64], tol: f64) -> Vec<Vec<Complex64>> {
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for &z in ev {
        let hits: Vec<usize> = groups
            .iter()
            .enumerate()
            .filter(|(_, g)| g.iter().any(|w| (z - w).norm() < tol))
            .map(|(i, _)| i)
            .collect();
        let mut merged = vec![z];
        for &i in hits.iter().rev() {
            merged.extend(groups.remove(i));
        }
        groups.push(merged);
    }
    groups
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let norm = max_abs(m) * n as f64;
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m / Complex64::new(2f64.powi(squarings as i32), 0.0);
    let mut term = identity(n);
    let mut sum = identity(n);
    for k in 1..30 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        sum += &term;
        if max_abs(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}
