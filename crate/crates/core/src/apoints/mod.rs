//! a-points of `L(s, chi)`: counting by the argument principle and location
//! by box bisection plus Newton refinement.
//!
//! The global contour is the rectangle `[STRIP_LEFT, strip_right] x [BOTTOM_EPS, T]`.
//! `strip_right` is the smallest integer `sigma >= 3` for which a simple
//! Dirichlet-series bound keeps `L - a` away from zero on and to the right of
//! the edge.

pub mod contour;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characters::{CharId, DirichletCharacter};
use crate::lfunc::l_pair;
use crate::{Error, Result};

pub use contour::{Rect, CONTOUR_GUARD};

pub const STRIP_LEFT: f64 = -1.0;
pub const BOTTOM_EPS: f64 = 1e-3;
/// Upper edge of the low-lying scan.
pub const LOW_LYING_TOP: f64 = 5.0;

const NEWTON_STEP_TOL: f64 = 1e-12;
const NEWTON_RESIDUAL_TOL: f64 = 1e-9;
const NEWTON_MAX_ITER: usize = 100;
const MULTIPLICITY_RADIUS: f64 = 1e-4;
const SLAB_HEIGHT: f64 = 2.0;
const MAX_DEPTH: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct APoint {
    pub beta: f64,
    pub gamma: f64,
    pub a: Complex64,
    pub char_id: CharId,
    /// `|L(rho) - a|` after refinement.
    pub newton_residual: f64,
    pub multiplicity: u32,
}

impl APoint {
    pub fn rho(&self) -> Complex64 {
        Complex64::new(self.beta, self.gamma)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub exact_count: u64,
    /// Winding number before rounding.
    pub raw_winding: f64,
    pub main_term: f64,
    pub c_a: f64,
    #[serde(rename = "T_used")]
    pub t_used: f64,
    pub strip: (f64, f64),
}

impl CountReport {
    pub fn discrepancy(&self) -> f64 {
        self.exact_count as f64 - self.main_term
    }
}

/// The function whose zeros are the a-points: `L - a`, or for `a = 1`
/// optionally `q^s (L - 1)`.
#[derive(Debug, Clone)]
pub struct Target<'a> {
    pub chi: &'a DirichletCharacter,
    pub a: Complex64,
    pub transformed: bool,
}

impl<'a> Target<'a> {
    pub fn new(chi: &'a DirichletCharacter, a: Complex64) -> Self {
        Target { chi, a, transformed: false }
    }

    /// `q^s (L(s) - 1)`; requires `a = 1`.
    pub fn transformed(chi: &'a DirichletCharacter) -> Self {
        Target { chi, a: Complex64::new(1.0, 0.0), transformed: true }
    }

    /// `(f(s), f'(s))`.
    pub fn eval(&self, s: Complex64) -> Result<(Complex64, Complex64)> {
        let (l, d) = l_pair(s, self.chi)?;
        let v = l - self.a;
        if self.transformed {
            let lq = (self.chi.modulus() as f64).ln();
            let qs = (s * lq).exp();
            Ok((qs * v, qs * (d + lq * v)))
        } else {
            Ok((v, d))
        }
    }

    fn residual(&self, s: Complex64) -> Result<f64> {
        Ok((l_pair(s, self.chi)?.0 - self.a).norm())
    }
}

/// `c_a`: 1 for `a != 1`, otherwise `m = min{n >= 2 : chi(n) != 0}`.
pub fn c_a(chi: &DirichletCharacter, a: Complex64) -> f64 {
    if a == Complex64::new(1.0, 0.0) {
        chi.first_nonzero_after_one() as f64
    } else {
        1.0
    }
}

/// `(T/2pi) log(qT / (2 pi c_a e))`.
pub fn main_term(chi: &DirichletCharacter, a: Complex64, t: f64) -> f64 {
    let q = chi.modulus() as f64;
    t / (2.0 * PI) * (q * t / (2.0 * PI * c_a(chi, a) * std::f64::consts::E)).ln()
}

/// Smallest integer `sigma >= 3` such that no a-point lies in `Re s >= sigma`
/// and `|L - a|` is bounded below on the line.
///
/// For `a != 1`: `sum_{n >= 2, chi(n) != 0} n^{-sigma} < |1 - a| / 2`.
/// For `a = 1`: `sum_{n > m, chi(n) != 0} (m/n)^sigma < 1/2`.
pub fn strip_right(chi: &DirichletCharacter, a: Complex64) -> Result<f64> {
    let one = Complex64::new(1.0, 0.0);
    let (base, target) = if a == one {
        (chi.first_nonzero_after_one() as f64, 0.5)
    } else {
        (1.0, (one - a).norm() / 2.0)
    };
    for sigma in 3..=200 {
        let sigma = sigma as f64;
        if dirichlet_tail(chi, base, sigma) < target {
            return Ok(sigma);
        }
    }
    Err(Error::domain(format!("no right strip edge up to sigma = 200 for a = {a}")))
}

/// `sum_{n > base, chi(n) != 0} (base/n)^sigma` with an integral bound on the tail.
fn dirichlet_tail(chi: &DirichletCharacter, base: f64, sigma: f64) -> f64 {
    let start = base as u64 + 1;
    let stop = start + 2000;
    let mut acc = 0.0;
    for n in start..stop {
        if chi.value(n as i64).norm_sqr() != 0.0 {
            acc += (base / n as f64).powf(sigma);
        }
    }
    let x = (stop - 1) as f64;
    acc + x * (base / x).powf(sigma) / (sigma - 1.0)
}

fn require_primitive(chi: &DirichletCharacter) -> Result<()> {
    if !chi.is_primitive() {
        return Err(Error::domain(format!("character {} is not primitive", chi.id())));
    }
    Ok(())
}

/// Winding-number counts at each height in `heights` (sorted or not), sharing
/// the vertical edges between heights.
pub fn count_profile(
    chi: &DirichletCharacter,
    a: Complex64,
    heights: &[f64],
) -> Result<Vec<CountReport>> {
    require_primitive(chi)?;
    let right = strip_right(chi, a)?;
    let target = Target::new(chi, a);
    let f = |s: Complex64| target.eval(s);
    let mut sorted: Vec<f64> = heights.to_vec();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    for &t in &sorted {
        if !(t > BOTTOM_EPS) {
            return Err(Error::domain(format!("height {t} is below the bottom edge")));
        }
    }
    let mut knots = vec![BOTTOM_EPS];
    knots.extend(sorted.iter().copied());
    // vertical pieces and horizontal cuts in parallel
    let pieces: Vec<Result<(f64, f64)>> = knots
        .par_windows(2)
        .map(|w| {
            let r = contour::arg_change(&f, c(right, w[0]), c(right, w[1]))?;
            let l = contour::arg_change(&f, c(STRIP_LEFT, w[0]), c(STRIP_LEFT, w[1]))?;
            Ok((r, l))
        })
        .collect();
    let cuts: Vec<Result<f64>> = knots
        .par_iter()
        .map(|&t| contour::arg_change(&f, c(STRIP_LEFT, t), c(right, t)))
        .collect();
    let bottom = cuts[0].as_ref().map_err(clone_err)?;
    let mut right_acc = 0.0;
    let mut left_acc = 0.0;
    let mut by_height = Vec::with_capacity(sorted.len());
    for (i, &t) in sorted.iter().enumerate() {
        let (r, l) = pieces[i].as_ref().map_err(clone_err)?;
        right_acc += r;
        left_acc += l;
        let top = cuts[i + 1].as_ref().map_err(clone_err)?;
        let raw = (bottom + right_acc - top - left_acc) / (2.0 * PI);
        let rounded = raw.round();
        if (raw - rounded).abs() > 0.25 || rounded < 0.0 {
            return Err(Error::Consistency(format!(
                "winding {raw} at T = {t} is not within 0.25 of a nonnegative integer"
            )));
        }
        by_height.push(CountReport {
            exact_count: rounded as u64,
            raw_winding: raw,
            main_term: main_term(chi, a, t),
            c_a: c_a(chi, a),
            t_used: t,
            strip: (STRIP_LEFT, right),
        });
    }
    // back to the caller's order
    Ok(heights
        .iter()
        .map(|t| by_height.iter().find(|r| r.t_used == *t).unwrap().clone())
        .collect())
}

fn clone_err(e: &Error) -> Error {
    match e {
        Error::ContourTooClose { re, im, modulus } => Error::ContourTooClose {
            re: *re,
            im: *im,
            modulus: *modulus,
        },
        other => Error::Consistency(other.to_string()),
    }
}

/// Count of a-points in `STRIP_LEFT < beta < strip_right`, `BOTTOM_EPS < gamma <= T`.
/// `T` should be a safe height.
pub fn count_apoints(chi: &DirichletCharacter, a: Complex64, t: f64) -> Result<CountReport> {
    Ok(count_profile(chi, a, &[t])?.remove(0))
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Newton iteration on `f`; returns the root if it converged.
/// Iterates that leave `fence` are abandoned.
fn newton(target: &Target<'_>, start: Complex64, fence: &Rect) -> Option<Complex64> {
    let mut s = start;
    for _ in 0..NEWTON_MAX_ITER {
        let (v, d) = target.eval(s).ok()?;
        if v.norm_sqr() == 0.0 {
            return Some(s);
        }
        if d.norm_sqr() == 0.0 || !d.re.is_finite() {
            return None;
        }
        let step = v / d;
        s -= step;
        if !fence.contains(s, 0.0) {
            return None;
        }
        if step.norm() < NEWTON_STEP_TOL * s.norm().max(1.0) {
            return Some(s);
        }
    }
    None
}

fn newton_in_box(target: &Target<'_>, rect: &Rect) -> Option<(Complex64, f64)> {
    let c0 = rect.center();
    let (w, h) = (rect.width() * 0.25, rect.height() * 0.25);
    let starts = [
        c0,
        c0 + c(w, h),
        c0 + c(-w, h),
        c0 + c(w, -h),
        c0 + c(-w, -h),
        c0 + c(w, 0.0),
        c0 + c(0.0, h),
        c0 + c(-w, 0.0),
    ];
    let tol = 1e-9 * (1.0 + rect.width().max(rect.height()));
    let pad = rect.width().max(rect.height());
    let fence = Rect {
        s_lo: rect.s_lo - pad,
        s_hi: rect.s_hi + pad,
        t_lo: rect.t_lo - pad,
        t_hi: rect.t_hi + pad,
    };
    for s0 in starts {
        if let Some(root) = newton(target, s0, &fence) {
            if rect.contains(root, tol) {
                if let Ok(res) = target.residual(root) {
                    if res <= NEWTON_RESIDUAL_TOL {
                        return Some((root, res));
                    }
                }
            }
        }
    }
    None
}

const SPLIT_FRACTIONS: [f64; 7] = [0.5, 0.45, 0.55, 0.4, 0.6, 0.35, 0.65];

/// Split `rect` along its longer side at a line that keeps clear of the
/// a-points; returns both halves and the count of the first.
fn split(
    target: &Target<'_>,
    rect: &Rect,
    count: u32,
) -> Result<(Rect, u32, Rect, u32)> {
    let f = |s: Complex64| target.eval(s);
    let mut last_err = None;
    for frac in SPLIT_FRACTIONS {
        let (lo, hi) = if rect.width() >= rect.height() {
            let m = rect.s_lo + frac * rect.width();
            (Rect { s_hi: m, ..*rect }, Rect { s_lo: m, ..*rect })
        } else {
            let m = rect.t_lo + frac * rect.height();
            (Rect { t_hi: m, ..*rect }, Rect { t_lo: m, ..*rect })
        };
        match contour::rect_winding(&f, &lo) {
            Ok(w) => {
                let k = w.round();
                if (w - k).abs() <= 0.25 && k >= 0.0 && k as u32 <= count {
                    let k = k as u32;
                    return Ok((lo, k, hi, count - k));
                }
                last_err = Some(Error::Consistency(format!(
                    "sub-box winding {w} inconsistent with parent count {count}"
                )));
            }
            Err(e @ Error::ContourTooClose { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap())
}

fn solve_box(target: &Target<'_>, rect: Rect, count: u32, depth: usize) -> Result<Vec<APoint>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let nonconv = || Error::NonConvergence {
        t_lo: rect.t_lo,
        t_hi: rect.t_hi,
        s_lo: rect.s_lo,
        s_hi: rect.s_hi,
    };
    let small = rect.width().max(rect.height()) < 2.0 * MULTIPLICITY_RADIUS;
    if count == 1 || small {
        if let Some((root, res)) = newton_in_box(target, &rect) {
            let mult = if count == 1 {
                1
            } else {
                let f = |s: Complex64| target.eval(s);
                contour::circle_winding(&f, root, MULTIPLICITY_RADIUS)?.round() as u32
            };
            if mult == count {
                return Ok(vec![APoint {
                    beta: root.re,
                    gamma: root.im,
                    a: target.a,
                    char_id: target.chi.id(),
                    newton_residual: res,
                    multiplicity: mult,
                }]);
            }
        }
        if small || depth >= MAX_DEPTH {
            return Err(nonconv());
        }
    }
    if depth >= MAX_DEPTH {
        return Err(nonconv());
    }
    let (lo, k_lo, hi, k_hi) = split(target, &rect, count)?;
    let mut out = solve_box(target, lo, k_lo, depth + 1)?;
    out.extend(solve_box(target, hi, k_hi, depth + 1)?);
    Ok(out)
}

/// Horizontal cut heights strictly between `t_lo` and `t_hi`, about
/// `SLAB_HEIGHT` apart, each nudged until its segment keeps clear of a-points.
fn slab_cuts(target: &Target<'_>, right: f64, t_lo: f64, t_hi: f64) -> Result<Vec<(f64, f64)>> {
    let f = |s: Complex64| target.eval(s);
    let n = ((t_hi - t_lo) / SLAB_HEIGHT).ceil().max(1.0) as usize;
    let step = (t_hi - t_lo) / n as f64;
    let nominal: Vec<f64> = (0..=n).map(|i| t_lo + step * i as f64).collect();
    nominal
        .par_iter()
        .enumerate()
        .map(|(i, &t)| {
            let fixed = i == 0 || i == n;
            let offsets: &[f64] = if fixed {
                &[0.0]
            } else {
                &[0.0, 0.1, -0.1, 0.2, -0.2, 0.3, -0.3]
            };
            let mut last = None;
            for off in offsets {
                let h = t + off * step;
                match contour::arg_change(&f, c(STRIP_LEFT, h), c(right, h)) {
                    Ok(arg) => return Ok((h, arg)),
                    Err(e @ Error::ContourTooClose { .. }) => last = Some(e),
                    Err(e) => return Err(e),
                }
            }
            Err(last.unwrap())
        })
        .collect()
}

/// All zeros of `target` with `t_lo < gamma <= t_hi` inside the strip,
/// sorted by `gamma`. The horizontal lines at `t_lo` and `t_hi` must keep
/// clear of a-points.
pub fn locate_with(target: &Target<'_>, t_lo: f64, t_hi: f64) -> Result<Vec<APoint>> {
    require_primitive(target.chi)?;
    if !(t_lo >= BOTTOM_EPS && t_hi > t_lo) {
        return Err(Error::domain(format!(
            "need {BOTTOM_EPS} <= t_lo < t_hi, got ({t_lo}, {t_hi})"
        )));
    }
    let right = strip_right(target.chi, target.a)?;
    let f = |s: Complex64| target.eval(s);
    let cuts = slab_cuts(target, right, t_lo, t_hi)?;
    let slabs: Vec<Result<Vec<APoint>>> = cuts
        .par_windows(2)
        .map(|w| {
            let (b, arg_b) = w[0];
            let (t, arg_t) = w[1];
            let ra = contour::arg_change(&f, c(right, b), c(right, t))?;
            let la = contour::arg_change(&f, c(STRIP_LEFT, b), c(STRIP_LEFT, t))?;
            let raw = (arg_b + ra - arg_t - la) / (2.0 * PI);
            let k = raw.round();
            if (raw - k).abs() > 0.25 || k < 0.0 {
                return Err(Error::Consistency(format!(
                    "slab ({b}, {t}] winding {raw} is not an integer"
                )));
            }
            let rect = Rect { s_lo: STRIP_LEFT, s_hi: right, t_lo: b, t_hi: t };
            solve_box(target, rect, k as u32, 0)
        })
        .collect();
    let mut out = Vec::new();
    for s in slabs {
        out.extend(s?);
    }
    out.sort_by(|x, y| x.gamma.partial_cmp(&y.gamma).unwrap());
    Ok(out)
}

/// a-points of `L(s, chi) - a` with `t_lo < gamma <= t_hi`.
pub fn locate_apoints(
    chi: &DirichletCharacter,
    a: Complex64,
    t_lo: f64,
    t_hi: f64,
) -> Result<Vec<APoint>> {
    locate_with(&Target::new(chi, a), t_lo, t_hi)
}

/// The low-lying a-points, `BOTTOM_EPS < gamma <= LOW_LYING_TOP`.
pub fn low_lying_apoints(chi: &DirichletCharacter, a: Complex64) -> Result<Vec<APoint>> {
    locate_apoints(chi, a, BOTTOM_EPS, LOW_LYING_TOP)
}

/// Every a-point in the strip with `BOTTOM_EPS < gamma <= t`.
pub fn scan_apoints(chi: &DirichletCharacter, a: Complex64, t: f64) -> Result<Vec<APoint>> {
    let mut out = low_lying_apoints(chi, a)?;
    if t > LOW_LYING_TOP {
        out.extend(locate_apoints(chi, a, LOW_LYING_TOP, t)?);
    }
    out.retain(|p| p.gamma <= t);
    Ok(out)
}

/// Drops trivial a-points (`beta <= 0`).
pub fn nontrivial(points: &[APoint]) -> Vec<APoint> {
    points.iter().filter(|p| p.beta > 0.0).cloned().collect()
}

/// A height in `[t_request, t_request + 1)` at least `0.5 / log(t_request)`
/// from every a-point ordinate. `t_request` itself is returned when it
/// already qualifies; otherwise the grid point (step 1/1000) farthest from
/// the ordinates.
pub fn safe_height(chi: &DirichletCharacter, a: Complex64, t_request: f64) -> Result<f64> {
    if !(t_request >= 5.0) {
        return Err(Error::domain(format!("safe_height needs T >= 5, got {t_request}")));
    }
    let ordinates = nearby_ordinates(chi, a, t_request)?;
    let dist = |t: f64| {
        ordinates
            .iter()
            .map(|g| (g - t).abs())
            .fold(f64::INFINITY, f64::min)
    };
    let need = 0.5 / t_request.ln();
    if dist(t_request) >= need {
        return Ok(t_request);
    }
    let mut best = t_request;
    let mut best_d = dist(t_request);
    for k in 1..1000 {
        let t = t_request + k as f64 / 1000.0;
        let d = dist(t);
        if d > best_d {
            best = t;
            best_d = d;
        }
    }
    Ok(best)
}

/// Ordinates of a-points near `[t, t + 1)`, from a scan of a slightly larger window.
fn nearby_ordinates(chi: &DirichletCharacter, a: Complex64, t: f64) -> Result<Vec<f64>> {
    let target = Target::new(chi, a);
    for pad in [1.0, 1.13, 0.87, 1.31, 0.71] {
        let lo = (t - pad).max(BOTTOM_EPS);
        let hi = t + 1.0 + pad;
        match locate_with(&target, lo, hi) {
            Ok(points) => return Ok(points.iter().map(|p| p.gamma).collect()),
            Err(Error::ContourTooClose { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Consistency(format!("could not bracket a-points near T = {t}")))
}

/// For `a = 1`: the 1-points located through `L - 1` and through
/// `q^s (L - 1)` coincide to `1e-9`.
pub fn a1_transform_check(chi: &DirichletCharacter, a: Complex64, t: f64) -> Result<bool> {
    if a != Complex64::new(1.0, 0.0) {
        return Err(Error::domain("the transform check applies to a = 1 only"));
    }
    require_primitive(chi)?;
    if t <= BOTTOM_EPS {
        return Ok(true);
    }
    let plain = locate_with(&Target::new(chi, a), BOTTOM_EPS, t)?;
    let transformed = locate_with(&Target::transformed(chi), BOTTOM_EPS, t)?;
    let mut details = Vec::new();
    for p in &plain {
        if !transformed.iter().any(|q| (q.rho() - p.rho()).norm() <= 1e-9) {
            details.push(format!("{} only via L - 1", p.rho()));
        }
    }
    for p in &transformed {
        if !plain.iter().any(|q| (q.rho() - p.rho()).norm() <= 1e-9) {
            details.push(format!("{} only via q^s (L - 1)", p.rho()));
        }
    }
    if details.is_empty() {
        Ok(true)
    } else {
        Err(Error::Mismatch { count: details.len(), details: details.join("; ") })
    }
}
