//! Argument tracking along straight segments.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::{Error, Result};

/// `|f|` below this anywhere on a contour aborts the count.
pub const CONTOUR_GUARD: f64 = 1e-10;

const MAX_ARG_STEP: f64 = FRAC_PI_4;
const MAX_LINEAR_STEP: f64 = 0.75;
const MAX_STEP: f64 = 1.0;
const MIN_STEP: f64 = 1e-11;

/// Change of `arg f` along the segment `z0 -> z1`.
///
/// `f` returns `(f(z), f'(z))`. Steps are halved until consecutive samples
/// differ in argument by less than `pi/4` and `h |f'/f|` stays below 0.75 at
/// both ends.
pub fn arg_change<F>(f: &F, z0: Complex64, z1: Complex64) -> Result<f64>
where
    F: Fn(Complex64) -> Result<(Complex64, Complex64)>,
{
    let len = (z1 - z0).norm();
    if len == 0.0 {
        return Ok(0.0);
    }
    let dir = (z1 - z0) / len;
    let mut pos = 0.0;
    let (mut fa, mut da) = checked(f, z0)?;
    let mut total = 0.0;
    let mut h = step_hint(fa, da).min(len);
    while pos < len {
        let h_try = h.min(len - pos);
        let zb = if pos + h_try >= len { z1 } else { z0 + dir * (pos + h_try) };
        let (fb, db) = checked(f, zb)?;
        let dphi = (fb / fa).arg();
        let lin = h_try * (da / fa).norm().max((db / fb).norm());
        if dphi.abs() <= MAX_ARG_STEP && lin <= MAX_LINEAR_STEP {
            total += dphi;
            pos += h_try;
            fa = fb;
            da = db;
            h = step_hint(fa, da).max(h_try * 0.5);
        } else {
            h = h_try * 0.5;
            if h < MIN_STEP {
                let z = z0 + dir * pos;
                return Err(Error::ContourTooClose {
                    re: z.re,
                    im: z.im,
                    modulus: fa.norm(),
                });
            }
        }
    }
    Ok(total)
}

fn step_hint(f: Complex64, d: Complex64) -> f64 {
    let ld = (d / f).norm();
    if ld > 0.0 {
        (0.5 / ld).min(MAX_STEP)
    } else {
        MAX_STEP
    }
}

fn checked<F>(f: &F, z: Complex64) -> Result<(Complex64, Complex64)>
where
    F: Fn(Complex64) -> Result<(Complex64, Complex64)>,
{
    let (v, d) = f(z)?;
    if !(v.norm() >= CONTOUR_GUARD) {
        return Err(Error::ContourTooClose {
            re: z.re,
            im: z.im,
            modulus: v.norm(),
        });
    }
    Ok((v, d))
}

/// Raw winding number `(1/2pi) * total arg change` around a closed polygon.
pub fn polygon_winding<F>(f: &F, vertices: &[Complex64]) -> Result<f64>
where
    F: Fn(Complex64) -> Result<(Complex64, Complex64)>,
{
    let mut total = 0.0;
    for i in 0..vertices.len() {
        let a = vertices[i];
        let b = vertices[(i + 1) % vertices.len()];
        total += arg_change(f, a, b)?;
    }
    Ok(total / (2.0 * PI))
}

/// Axis-parallel rectangle `[s_lo, s_hi] x [t_lo, t_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub s_lo: f64,
    pub s_hi: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl Rect {
    pub fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.s_lo, self.t_lo),
            Complex64::new(self.s_hi, self.t_lo),
            Complex64::new(self.s_hi, self.t_hi),
            Complex64::new(self.s_lo, self.t_hi),
        ]
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.s_lo + self.s_hi), 0.5 * (self.t_lo + self.t_hi))
    }

    pub fn width(&self) -> f64 {
        self.s_hi - self.s_lo
    }

    pub fn height(&self) -> f64 {
        self.t_hi - self.t_lo
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        z.re >= self.s_lo - tol
            && z.re <= self.s_hi + tol
            && z.im >= self.t_lo - tol
            && z.im <= self.t_hi + tol
    }
}

/// Counter-clockwise winding of `f` around `r`.
pub fn rect_winding<F>(f: &F, r: &Rect) -> Result<f64>
where
    F: Fn(Complex64) -> Result<(Complex64, Complex64)>,
{
    polygon_winding(f, &r.corners())
}

/// Winding around a regular 32-gon of radius `radius` centred at `c`.
pub fn circle_winding<F>(f: &F, c: Complex64, radius: f64) -> Result<f64>
where
    F: Fn(Complex64) -> Result<(Complex64, Complex64)>,
{
    let n = 32;
    let verts: Vec<Complex64> = (0..n)
        .map(|k| c + Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64))
        .collect();
    polygon_winding(f, &verts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(roots: Vec<Complex64>) -> impl Fn(Complex64) -> Result<(Complex64, Complex64)> {
        move |z| {
            let mut v = Complex64::new(1.0, 0.0);
            let mut d = Complex64::new(0.0, 0.0);
            for r in &roots {
                d = d * (z - r) + v;
                v *= z - r;
            }
            Ok((v, d))
        }
    }

    #[test]
    fn counts_polynomial_roots() {
        let f = poly(vec![
            Complex64::new(0.3, 0.4),
            Complex64::new(0.31, 0.41),
            Complex64::new(2.0, 2.0),
            Complex64::new(-0.5, 3.5),
        ]);
        let r = Rect { s_lo: -1.0, s_hi: 1.0, t_lo: 0.0, t_hi: 1.0 };
        assert!((rect_winding(&f, &r).unwrap() - 2.0).abs() < 1e-9);
        let r = Rect { s_lo: -1.0, s_hi: 3.0, t_lo: 0.0, t_hi: 4.0 };
        assert!((rect_winding(&f, &r).unwrap() - 4.0).abs() < 1e-9);
        let w = circle_winding(&f, Complex64::new(2.0, 2.0), 1e-4).unwrap();
        assert!((w - 1.0).abs() < 1e-9);
    }

    #[test]
    fn double_root_has_winding_two() {
        let f = poly(vec![Complex64::new(0.5, 0.5), Complex64::new(0.5, 0.5)]);
        let w = circle_winding(&f, Complex64::new(0.50001, 0.5), 1e-4).unwrap();
        assert!((w - 2.0).abs() < 1e-9);
    }

    #[test]
    fn root_on_the_contour_is_rejected() {
        let f = poly(vec![Complex64::new(0.5, 0.0)]);
        let r = Rect { s_lo: 0.0, s_hi: 1.0, t_lo: 0.0, t_hi: 1.0 };
        assert!(matches!(rect_winding(&f, &r), Err(Error::ContourTooClose { .. })));
    }
}
