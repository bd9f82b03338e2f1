use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Superellipse `|x/a|ⁿ + |y/b|ⁿ = 1` sampled at `segments` parameter values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuperellipseParams {
    pub a: f64,
    pub b: f64,
    pub exponent: f64,
    pub segments: usize,
}

pub const MIN_SEGMENTS: usize = 8;

impl SuperellipseParams {
    pub fn new(a: f64, b: f64, exponent: f64, segments: usize) -> Result<Self> {
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::Argument(format!(
                "superellipse exponent {exponent} must be positive"
            )));
        }
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::Argument(format!(
                "superellipse semi-axes ({a}, {b}) must be positive"
            )));
        }
        if segments < MIN_SEGMENTS {
            return Err(Error::Argument(format!(
                "superellipse needs at least {MIN_SEGMENTS} segments, got {segments}"
            )));
        }
        Ok(SuperellipseParams {
            a,
            b,
            exponent,
            segments,
        })
    }

    pub fn point(&self, t: f64) -> [f64; 2] {
        let (s, c) = t.sin_cos();
        let e = 2.0 / self.exponent;
        [self.a * signed_pow(c, e), self.b * signed_pow(s, e)]
    }

    /// Points at `t = 2πj / segments`.
    pub fn samples(&self) -> Vec<[f64; 2]> {
        (0..self.segments)
            .map(|j| self.point(TAU * j as f64 / self.segments as f64))
            .collect()
    }

    /// `|x/a|ⁿ + |y/b|ⁿ`; equals 1 on the curve.
    pub fn implicit(&self, p: [f64; 2]) -> f64 {
        (p[0] / self.a).abs().powf(self.exponent) + (p[1] / self.b).abs().powf(self.exponent)
    }
}

pub(crate) fn signed_pow(x: f64, e: f64) -> f64 {
    x.signum() * x.abs().powf(e)
}

pub fn superellipse_profile(params: &SuperellipseParams, t: f64) -> [f64; 2] {
    params.point(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn parameter_zero_is_on_the_major_axis() {
        let p = SuperellipseParams::new(3.0, 1.0, 2.5, 16).unwrap();
        assert_eq!(superellipse_profile(&p, 0.0), [3.0, 0.0]);
    }

    #[test]
    fn exponent_two_is_a_circle() {
        let p = SuperellipseParams::new(1.0, 1.0, 2.0, 16).unwrap();
        let q = p.point(FRAC_PI_4);
        let h = 0.5f64.sqrt();
        assert!((q[0] - h).abs() < 1e-15 && (q[1] - h).abs() < 1e-15);
    }

    #[test]
    fn samples_satisfy_implicit_equation() {
        for n in [0.5, 1.0, 2.0, 2.5, 4.0, 10.0] {
            let p = SuperellipseParams::new(2.0, 0.7, n, 64).unwrap();
            for q in p.samples() {
                assert!((p.implicit(q) - 1.0).abs() < 1e-6, "n={n} q={q:?}");
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SuperellipseParams::new(1.0, 1.0, 0.0, 16).is_err());
        assert!(SuperellipseParams::new(1.0, 1.0, -2.0, 16).is_err());
        assert!(SuperellipseParams::new(0.0, 1.0, 2.0, 16).is_err());
        assert!(SuperellipseParams::new(1.0, 1.0, 2.0, 7).is_err());
    }
}
