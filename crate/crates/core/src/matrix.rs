//! Small dense complex matrices for single-qubit gate algebra.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::circuit::{Gate, GateKind};

pub type C64 = Complex64;

/// Row-major 2x2 complex matrix.
pub type Mat2 = [[C64; 2]; 2];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

pub const IDENTITY: Mat2 = [[ONE, ZERO], [ZERO, ONE]];

pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn u3(theta: f64, phi: f64, lambda: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), -C64::from_polar(s, lambda)],
        [C64::from_polar(s, phi), C64::from_polar(c, phi + lambda)],
    ]
}

/// Matrix of a single-qubit gate, or `None` for multi-qubit kinds.
pub fn single_qubit(gate: &Gate) -> Option<Mat2> {
    let p = gate.params();
    let i = C64::new(0.0, 1.0);
    Some(match gate.kind {
        GateKind::H => {
            let h = C64::new(FRAC_1_SQRT_2, 0.0);
            [[h, h], [h, -h]]
        }
        GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
        GateKind::RX => {
            let (s, c) = (p[0] / 2.0).sin_cos();
            [[C64::new(c, 0.0), -i * s], [-i * s, C64::new(c, 0.0)]]
        }
        GateKind::RY => {
            let (s, c) = (p[0] / 2.0).sin_cos();
            [[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]]
        }
        GateKind::RZ => [
            [C64::from_polar(1.0, -p[0] / 2.0), ZERO],
            [ZERO, C64::from_polar(1.0, p[0] / 2.0)],
        ],
        GateKind::P => [[ONE, ZERO], [ZERO, C64::from_polar(1.0, p[0])]],
        GateKind::U3 => u3(p[0], p[1], p[2]),
        GateKind::CX | GateKind::CZ | GateKind::SWAP => return None,
    })
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x % (2.0 * PI);
    if y <= -PI {
        y += 2.0 * PI;
    } else if y > PI {
        y -= 2.0 * PI;
    }
    y
}

const GIMBAL_TOL: f64 = 1e-12;

/// Extracts `(theta, phi, lambda)` with `m = e^{i alpha} U3(theta, phi, lambda)`.
///
/// When `theta` is within `1e-12` of zero the split between `phi` and `lambda`
/// is arbitrary; `phi` is fixed to zero and the full phase goes into `lambda`.
pub fn zyz_angles(m: &Mat2) -> (f64, f64, f64) {
    let c = m[0][0].norm();
    let s = m[1][0].norm();
    let theta = 2.0 * s.atan2(c);
    if s <= GIMBAL_TOL {
        let alpha = m[0][0].arg();
        return (theta, 0.0, wrap_angle(m[1][1].arg() - alpha));
    }
    if c <= GIMBAL_TOL {
        let alpha = m[1][0].arg();
        return (theta, 0.0, wrap_angle((-m[0][1]).arg() - alpha));
    }
    let alpha = m[0][0].arg();
    let phi = m[1][0].arg() - alpha;
    let lambda = (-m[0][1]).arg() - alpha;
    (theta, wrap_angle(phi), wrap_angle(lambda))
}

/// True when `m` equals the identity up to a global phase within `tol`.
pub fn is_identity_up_to_phase(m: &Mat2, tol: f64) -> bool {
    let phase = if m[0][0].norm() > 0.5 {
        m[0][0] / m[0][0].norm()
    } else {
        return false;
    };
    (m[0][0] - phase).norm() <= tol
        && (m[1][1] - phase).norm() <= tol
        && m[0][1].norm() <= tol
        && m[1][0].norm() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close_up_to_phase(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        let (i, j) = if a[0][0].norm() > 0.3 { (0, 0) } else { (1, 0) };
        let phase = a[i][j] / b[i][j];
        (0..2).all(|r| (0..2).all(|c| (a[r][c] - phase * b[r][c]).norm() <= tol))
    }

    #[test]
    fn zyz_round_trip() {
        let cases = [
            (0.5, 0.0, 0.0),
            (1.2, -0.7, 2.9),
            (PI, 0.0, 1.0),
            (PI, 0.4, -1.1),
            (0.0, 0.0, 0.8),
            (3.0, 3.1, -3.1),
            (1e-7, 0.3, 0.2),
        ];
        for (t, p, l) in cases {
            let m = u3(t, p, l);
            let (t2, p2, l2) = zyz_angles(&m);
            assert!(close_up_to_phase(&m, &u3(t2, p2, l2), 1e-12), "{t} {p} {l}");
        }
    }

    #[test]
    fn ry_product_extracts_u3() {
        let ry = |t| single_qubit(&Gate::ry(0, t)).unwrap();
        let m = mul(&ry(0.3), &ry(0.2));
        let (t, p, l) = zyz_angles(&m);
        assert!((t - 0.5).abs() < 1e-15 && p == 0.0 && l.abs() < 1e-15);
    }

    #[test]
    fn gimbal_case_folds_phase_into_lambda() {
        let m = single_qubit(&Gate::rz(0, 0.9)).unwrap();
        let (t, p, l) = zyz_angles(&m);
        assert_eq!((t, p), (0.0, 0.0));
        assert!((l - 0.9).abs() < 1e-15);
    }

    #[test]
    fn identity_detection() {
        let h = single_qubit(&Gate::h(0)).unwrap();
        assert!(is_identity_up_to_phase(&mul(&h, &h), 1e-9));
        let rz = single_qubit(&Gate::rz(0, 2.0 * PI)).unwrap();
        assert!(is_identity_up_to_phase(&rz, 1e-9));
        assert!(!is_identity_up_to_phase(&h, 1e-9));
        assert!(!is_identity_up_to_phase(&single_qubit(&Gate::p(0, 1e-6)).unwrap(), 1e-9));
    }
}
