//! Adaptive Dormand–Prince 5(4) transport of a fundamental matrix along paths.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::linalg::CMatrix;
use crate::error::{Error, Result};

/// A path piece parametrised by `t` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Line {
        from: Complex64,
        to: Complex64,
    },
    Arc {
        center: Complex64,
        radius: f64,
        start: f64,
        sweep: f64,
    },
}

impl Segment {
    pub fn point(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * t,
            Segment::Arc {
                center,
                radius,
                start,
                sweep,
            } => center + Complex64::from_polar(radius, start + sweep * t),
        }
    }

    pub fn velocity(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc {
                radius,
                start,
                sweep,
                ..
            } => Complex64::new(0.0, sweep) * Complex64::from_polar(radius, start + sweep * t),
        }
    }

    /// Distance from `p` to the traced curve.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        match *self {
            Segment::Line { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                let t = if len2 == 0.0 {
                    0.0
                } else {
                    ((p - from) * d.conj()).re / len2
                };
                (p - self.point(t.clamp(0.0, 1.0))).norm()
            }
            Segment::Arc {
                center,
                radius,
                start,
                sweep,
            } => {
                let on_circle = ((p - center).norm() - radius).abs();
                let rel = (p - center).arg() - start;
                let swept = if sweep >= 0.0 {
                    rel.rem_euclid(TAU)
                } else {
                    (-rel).rem_euclid(TAU)
                };
                if sweep.abs() >= TAU || swept <= sweep.abs() {
                    on_circle
                } else {
                    (p - self.point(0.0))
                        .norm()
                        .min((p - self.point(1.0)).norm())
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

const MAX_STEPS: usize = 200_000;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `dPhi/dt = F(t) Phi` on `[0, 1]`, where `coefficient(t)` returns `F(t)`.
pub fn transport(
    coefficient: impl Fn(f64) -> CMatrix,
    initial: CMatrix,
    tol: f64,
    stats: &mut StepStats,
) -> Result<CMatrix> {
    let mut y = initial;
    let mut t = 0.0;
    let mut h: f64 = 1e-2;
    let mut k: Vec<CMatrix> = Vec::with_capacity(7);
    let mut steps = 0;
    while t < 1.0 {
        if steps > MAX_STEPS {
            return Err(Error::IntegrationFailure(format!(
                "more than {MAX_STEPS} steps"
            )));
        }
        steps += 1;
        h = h.min(1.0 - t);
        if h < 1e-13 {
            return Err(Error::IntegrationFailure(format!(
                "step size underflow at t = {t}"
            )));
        }
        k.clear();
        for s in 0..7 {
            let mut stage = y.clone();
            for (j, kj) in k.iter().enumerate() {
                if A[s][j] != 0.0 {
                    stage += kj * Complex64::new(h * A[s][j], 0.0);
                }
            }
            k.push(coefficient(t + C[s] * h) * stage);
        }
        let mut y5 = y.clone();
        let mut diff = CMatrix::zeros(y.nrows(), y.ncols());
        for s in 0..7 {
            if B5[s] != 0.0 {
                y5 += &k[s] * Complex64::new(h * B5[s], 0.0);
            }
            diff += &k[s] * Complex64::new(h * (B5[s] - B4[s]), 0.0);
        }
        let err = diff
            .iter()
            .zip(y.iter().zip(y5.iter()))
            .map(|(d, (a, b))| d.norm() / (tol + tol * a.norm().max(b.norm())))
            .fold(0.0, f64::max);
        if err <= 1.0 {
            t += h;
            y = y5;
            stats.accepted += 1;
        } else {
            stats.rejected += 1;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn scalar_log_transport() {
        // dw/dz = -a w / z around the unit circle: w -> exp(-2 pi i a).
        let a = 0.4;
        let seg = Segment::Arc {
            center: Complex64::new(0.0, 0.0),
            radius: 1.0,
            start: 0.0,
            sweep: TAU,
        };
        let f = |t: f64| {
            let z = seg.point(t);
            CMatrix::from_element(1, 1, -Complex64::new(a, 0.0) * seg.velocity(t) / z)
        };
        let mut stats = StepStats {
            accepted: 0,
            rejected: 0,
        };
        let w = transport(
            f,
            CMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)),
            1e-12,
            &mut stats,
        )
        .unwrap();
        let expected = Complex64::new(0.0, -2.0 * PI * a).exp();
        assert!((w[(0, 0)] - expected).norm() < 1e-9);
        assert!(stats.accepted > 0);
    }

    #[test]
    fn segment_geometry() {
        let l = Segment::Line {
            from: Complex64::new(0.0, 0.0),
            to: Complex64::new(2.0, 0.0),
        };
        assert!((l.distance_to(Complex64::new(1.0, 1.0)) - 1.0).abs() < 1e-15);
        assert!((l.distance_to(Complex64::new(3.0, 0.0)) - 1.0).abs() < 1e-15);
        let c = Segment::Arc {
            center: Complex64::new(0.0, 0.0),
            radius: 1.0,
            start: 0.0,
            sweep: TAU,
        };
        assert!((c.distance_to(Complex64::new(3.0, 0.0)) - 2.0).abs() < 1e-12);
        assert!((c.point(0.5) - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }
}
