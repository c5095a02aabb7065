//! `L(s, chi)` and `L'(s, chi)` through the Hurwitz decomposition
//! `L(s, chi) = q^{-s} sum_r chi(r) zeta(s, r/q)`, the factor `Delta(s, chi)`
//! with `L(s, chi) = Delta(s, chi) L(1 - s, conj chi)`, the completed
//! function `xi(s, chi)`, and two approximate functional equations.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::calibration;
use crate::characters::DirichletCharacter;
use crate::special::{
    hurwitz_stieltjes_constants, hurwitz_with, log_gamma, digamma, EulerMaclaurinParams,
    HURWITZ_TARGET_ERROR,
};
use crate::{Error, Result};

/// Lower end of the `t` range where the approximate functional equations are offered.
pub const AFE_T0: f64 = 10.0;

/// Guard for `L'/(L - a)`.
pub const NEAR_APOINT_GUARD: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMethod {
    HurwitzDirect,
    RaneAfe,
    LprimeAfe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LEvaluation {
    pub s: Complex64,
    pub value: Complex64,
    pub derivative: Option<Complex64>,
    pub method: EvalMethod,
    pub est_error: f64,
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `(L(s, chi), L'(s, chi))`.
pub fn l_pair(s: Complex64, chi: &DirichletCharacter) -> Result<(Complex64, Complex64)> {
    l_pair_with_bound(s, chi).map(|(v, d, _)| (v, d))
}

fn l_pair_with_bound(s: Complex64, chi: &DirichletCharacter) -> Result<(Complex64, Complex64, f64)> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::domain("non-finite s"));
    }
    if s == c64(1.0, 0.0) {
        if chi.is_principal() {
            return Err(Error::pole("L(s, chi) at s = 1 for a principal character"));
        }
        return l_pair_at_one(chi).map(|(v, d)| (v, d, 1e-13));
    }
    let q = chi.modulus();
    let qf = q as f64;
    let mut sum_v = c64(0.0, 0.0);
    let mut sum_d = c64(0.0, 0.0);
    let mut bound = 0.0;
    for r in 1..=q {
        let c = chi.value(r as i64);
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let alpha = r as f64 / qf;
        let params = EulerMaclaurinParams::choose(s, alpha, HURWITZ_TARGET_ERROR);
        let (v, d) = hurwitz_with(s, alpha, &params);
        sum_v += c * v;
        sum_d += c * d;
        bound += params.remainder_bound;
    }
    let lq = qf.ln();
    let q_s = (-s * lq).exp();
    let value = q_s * sum_v;
    let deriv = -lq * value + q_s * sum_d;
    Ok((value, deriv, bound * q_s.norm() * (1.0 + lq)))
}

/// At `s = 1` the Hurwitz pole cancels; use the Laurent constants instead.
fn l_pair_at_one(chi: &DirichletCharacter) -> Result<(Complex64, Complex64)> {
    let q = chi.modulus();
    let mut g0 = c64(0.0, 0.0);
    let mut g1 = c64(0.0, 0.0);
    for r in 1..=q {
        let c = chi.value(r as i64);
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let g = hurwitz_stieltjes_constants(r as f64 / q as f64, 1)?;
        g0 += c * g[0];
        g1 += c * g[1];
    }
    let qf = q as f64;
    let value = g0 / qf;
    let deriv = -qf.ln() * value - g1 / qf;
    Ok((value, deriv))
}

/// `L(s, chi)` for `deriv = 0`, `L'(s, chi)` for `deriv = 1`.
pub fn l_value(s: Complex64, chi: &DirichletCharacter, deriv: u8) -> Result<Complex64> {
    let (v, d) = l_pair(s, chi)?;
    match deriv {
        0 => Ok(v),
        1 => Ok(d),
        _ => Err(Error::domain("deriv must be 0 or 1")),
    }
}

/// Evaluate with the requested method and attach an error estimate.
///
/// `value` is `L` for `deriv = 0` and `L'` for `deriv = 1`; the `lprime_afe`
/// method always returns `L'`. `derivative` carries `L'` next to `L` when the
/// direct evaluation was asked for `L`.
pub fn evaluate(
    s: Complex64,
    chi: &DirichletCharacter,
    deriv: u8,
    method: EvalMethod,
) -> Result<LEvaluation> {
    if deriv > 1 {
        return Err(Error::domain("deriv must be 0 or 1"));
    }
    match method {
        EvalMethod::HurwitzDirect => {
            let (v, d, bound) = l_pair_with_bound(s, chi)?;
            Ok(LEvaluation {
                s,
                value: if deriv == 0 { v } else { d },
                derivative: (deriv == 0).then_some(d),
                method,
                est_error: bound,
            })
        }
        EvalMethod::RaneAfe => {
            if deriv != 0 {
                return Err(Error::domain("the Rane AFE approximates L only; use lprime-afe"));
            }
            let v = l_afe(s, chi)?;
            Ok(LEvaluation {
                s,
                value: v,
                derivative: None,
                method,
                est_error: afe_envelope(chi.modulus(), s, method),
            })
        }
        EvalMethod::LprimeAfe => {
            let d = lprime_afe(s, chi)?;
            Ok(LEvaluation {
                s,
                value: d,
                derivative: None,
                method,
                est_error: afe_envelope(chi.modulus(), s, method),
            })
        }
    }
}

/// `c(q) t^{-sigma/2}` for the Rane AFE, times `log t` for the `L'` AFE.
/// Uses the frozen calibration constant, or NaN when `q` was not calibrated.
pub fn afe_envelope(q: u64, s: Complex64, method: EvalMethod) -> f64 {
    let shape = afe_shape(s, method);
    let c = match method {
        EvalMethod::RaneAfe => calibration::frozen().afe_constant(q).map(|c| c.rane),
        EvalMethod::LprimeAfe => calibration::frozen().afe_constant(q).map(|c| c.lprime),
        EvalMethod::HurwitzDirect => return 0.0,
    };
    c.map_or(f64::NAN, |c| c * shape)
}

/// The envelope without its constant: `t^{-sigma/2}` or `t^{-sigma/2} log t`.
pub fn afe_shape(s: Complex64, method: EvalMethod) -> f64 {
    let t = s.im.abs();
    let base = t.powf(-s.re / 2.0);
    match method {
        EvalMethod::LprimeAfe => base * t.ln(),
        _ => base,
    }
}

fn require_primitive(chi: &DirichletCharacter) -> Result<()> {
    if !chi.is_primitive() {
        return Err(Error::domain(format!("character {} is not primitive", chi.id())));
    }
    Ok(())
}

/// `i^nu = exp(i pi nu / 2)`.
fn i_pow_nu(chi: &DirichletCharacter) -> Complex64 {
    if chi.parity() == 0 {
        c64(1.0, 0.0)
    } else {
        c64(0.0, 1.0)
    }
}

/// `log` of the Gamma quotient and power part of `Delta`, without `tau / (i^nu sqrt(pi))`.
fn log_delta_core(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    let nu = chi.parity() as f64;
    let q = chi.modulus() as f64;
    let num = log_gamma((1.0 - s + nu) / 2.0)?;
    let den = log_gamma((s + nu) / 2.0)?;
    Ok(s * (PI / q).ln() + num - den)
}

/// `Delta(s, chi) = tau(chi) / (i^nu sqrt(pi)) (pi/q)^s Gamma((1-s+nu)/2) / Gamma((s+nu)/2)`.
pub fn delta_factor(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    require_primitive(chi)?;
    let pre = chi.gauss_sum() / (i_pow_nu(chi) * PI.sqrt());
    Ok(pre * log_delta_core(s, chi)?.exp())
}

/// `i tau(chi) chi(-1) (2 pi)^{s-1} q^{-s} Gamma(1-s) e^{-i pi s / 2}`.
///
/// Drops an `O(e^{-pi t})` relative term against [`delta_factor`], so the
/// two agree only for `t` bounded away from 0 from above.
pub fn delta_factor_product(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    require_primitive(chi)?;
    let q = chi.modulus() as f64;
    let log = (s - 1.0) * (2.0 * PI).ln() - s * q.ln() + log_gamma(1.0 - s)?
        - c64(0.0, PI / 2.0) * s;
    Ok(c64(0.0, 1.0) * chi.gauss_sum() * chi.value(-1) * log.exp())
}

/// `Delta'/Delta(s, chi) = log(pi/q) - psi((1-s+nu)/2)/2 - psi((s+nu)/2)/2`.
pub fn delta_log_deriv(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    require_primitive(chi)?;
    let nu = chi.parity() as f64;
    let q = chi.modulus() as f64;
    Ok((PI / q).ln() - 0.5 * digamma((1.0 - s + nu) / 2.0)? - 0.5 * digamma((s + nu) / 2.0)?)
}

/// `log xi(s, chi)` with `xi(s, chi) = (q/pi)^{(s+nu)/2} Gamma((s+nu)/2) L(s, chi)`.
///
/// The imaginary part is only defined mod `2 pi`.
pub fn xi_log(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    require_primitive(chi)?;
    let nu = chi.parity() as f64;
    let q = chi.modulus() as f64;
    let l = l_value(s, chi, 0)?;
    if l.norm_sqr() == 0.0 {
        return Err(Error::domain("L(s, chi) vanishes; log xi undefined"));
    }
    Ok((s + nu) / 2.0 * (q / PI).ln() + log_gamma((s + nu) / 2.0)? + l.ln())
}

/// `xi(s, chi)`. Underflows to 0 for large `|t|`; use [`xi_log`] there.
pub fn xi_completed(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    require_primitive(chi)?;
    let nu = chi.parity() as f64;
    let q = chi.modulus() as f64;
    let l = l_value(s, chi, 0)?;
    let log_rest = (s + nu) / 2.0 * (q / PI).ln() + log_gamma((s + nu) / 2.0)?;
    Ok(log_rest.exp() * l)
}

/// `|xi(s, chi) - tau/(i^nu sqrt q) xi(1-s, conj chi)| / |xi(s, chi)|`, in log space.
pub fn fe_residual(s: Complex64, chi: &DirichletCharacter) -> Result<f64> {
    let lhs = xi_log(s, chi)?;
    let conj = chi.conjugate();
    let eps = chi.gauss_sum() / (i_pow_nu(chi) * (chi.modulus() as f64).sqrt());
    let rhs = eps.ln() + xi_log(1.0 - s, &conj)?;
    Ok(((rhs - lhs).exp() - 1.0).norm())
}

fn afe_domain(s: Complex64, chi: &DirichletCharacter) -> Result<usize> {
    require_primitive(chi)?;
    if !(0.0..=1.0).contains(&s.re) {
        return Err(Error::domain(format!("AFE needs 0 <= sigma <= 1, got {}", s.re)));
    }
    if s.im <= AFE_T0 {
        return Err(Error::domain(format!("AFE needs t > {AFE_T0}, got {}", s.im)));
    }
    let x = (chi.modulus() as f64 * s.im / (2.0 * PI)).sqrt();
    Ok(x.floor() as usize)
}

/// `n^{-s}`.
fn n_pow(n: usize, s: Complex64) -> Complex64 {
    (-s * (n as f64).ln()).exp()
}

/// Rane's approximate functional equation:
/// `sum_{n <= x} chi(n) n^{-s} + Delta(s, chi) sum_{n <= x} conj chi(n) n^{s-1}`,
/// `x = sqrt(q t / 2 pi)`.
pub fn l_afe(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    let n_max = afe_domain(s, chi)?;
    let delta = delta_factor(s, chi)?;
    let mut first = c64(0.0, 0.0);
    let mut second = c64(0.0, 0.0);
    for n in 1..=n_max {
        let c = chi.value(n as i64);
        if c.norm_sqr() == 0.0 {
            continue;
        }
        first += c * n_pow(n, s);
        second += c.conj() * n_pow(n, 1.0 - s);
    }
    Ok(first + delta * second)
}

/// The AFE for `L'`:
/// `-sum chi(n) log n n^{-s} - log(qt/2pi) Delta sum conj chi(n) n^{s-1}
///  + Delta sum conj chi(n) log n n^{s-1}`.
pub fn lprime_afe(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    let n_max = afe_domain(s, chi)?;
    let delta = delta_factor(s, chi)?;
    let mut first = c64(0.0, 0.0);
    let mut second = c64(0.0, 0.0);
    let mut third = c64(0.0, 0.0);
    for n in 1..=n_max {
        let c = chi.value(n as i64);
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let ln = (n as f64).ln();
        first -= c * n_pow(n, s) * ln;
        let w = c.conj() * n_pow(n, 1.0 - s);
        second += w;
        third += w * ln;
    }
    let lg = (chi.modulus() as f64 * s.im / (2.0 * PI)).ln();
    Ok(first - lg * delta * second + delta * third)
}

/// `L'(s, chi) / (L(s, chi) - a)`.
pub fn log_deriv_shifted(s: Complex64, chi: &DirichletCharacter, a: Complex64) -> Result<Complex64> {
    let (v, d) = l_pair(s, chi)?;
    let den = v - a;
    if den.norm() < NEAR_APOINT_GUARD {
        return Err(Error::NearAPoint {
            re: s.re,
            im: s.im,
            modulus: den.norm(),
        });
    }
    Ok(d / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{character, enumerate_characters};

    #[test]
    fn catalan_and_leibniz() {
        let chi = character(4, 1).unwrap();
        // alternating-series oracle with pairwise averaging
        let n = 200_000;
        let mut partial = 0.0;
        for k in 0..n {
            let t = 1.0 / ((2 * k + 1) as f64).powi(2);
            partial += if k % 2 == 0 { t } else { -t };
        }
        let v = l_value(c64(2.0, 0.0), &chi, 0).unwrap();
        assert!((v.re - partial).abs() < 1e-10 && v.im.abs() < 1e-14);
        assert!((v.re - 0.9159656).abs() < 1e-7);
        let one = l_value(c64(1.0, 0.0), &chi, 0).unwrap();
        assert!((one.re - PI / 4.0).abs() < 1e-12);
        let near = l_value(c64(1.0 + 1e-7, 0.0), &chi, 0).unwrap();
        assert!((near - one).norm() < 1e-6);
    }

    #[test]
    fn zeta_through_the_trivial_character() {
        let chi = character(1, 0).unwrap();
        let v = l_value(c64(2.0, 0.0), &chi, 0).unwrap();
        assert!((v.re - PI * PI / 6.0).abs() < 1e-12);
        assert!(matches!(l_value(c64(1.0, 0.0), &chi, 0), Err(Error::Pole(_))));
        let p4 = character(4, 0).unwrap();
        assert!(matches!(l_value(c64(1.0, 0.0), &p4, 0), Err(Error::Pole(_))));
    }

    #[test]
    fn derivative_at_one_matches_nearby_difference() {
        let chi = character(5, 1).unwrap();
        let d = l_value(c64(1.0, 0.0), &chi, 1).unwrap();
        let h = 1e-4;
        let fd = (l_value(c64(1.0 + h, 0.0), &chi, 0).unwrap()
            - l_value(c64(1.0 - h, 0.0), &chi, 0).unwrap())
            / (2.0 * h);
        assert!((d - fd).norm() < 1e-7);
    }

    #[test]
    fn delta_on_the_critical_line_is_unimodular() {
        let chi = character(4, 1).unwrap();
        let d = delta_factor(c64(0.5, 25.0), &chi).unwrap();
        assert!((d.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn delta_log_deriv_asymptotic() {
        let chi = character(4, 1).unwrap();
        let v = delta_log_deriv(c64(0.5, 100.0), &chi).unwrap();
        let expected = -(400.0 / (2.0 * PI)).ln();
        assert!((expected + 4.1536).abs() < 1e-4);
        assert!((v - expected).norm() < 0.02);
        let h = 1e-5;
        let s = c64(0.3, 40.0);
        let fd = (delta_factor(s + h, &chi).unwrap() - delta_factor(s - h, &chi).unwrap())
            / (2.0 * h)
            / delta_factor(s, &chi).unwrap();
        assert!((fd - delta_log_deriv(s, &chi).unwrap()).norm() < 1e-7);
    }

    #[test]
    fn delta_product_form_agrees_away_from_the_axis() {
        for q in [3u64, 4, 5, 7, 8] {
            for chi in enumerate_characters(q).unwrap().iter().filter(|c| c.is_primitive()) {
                for &(re, im) in &[(0.5, 10.0), (0.2, 33.0), (0.9, 120.0), (-0.5, 60.0)] {
                    let s = c64(re, im);
                    let a = delta_factor(s, chi).unwrap();
                    let b = delta_factor_product(s, chi).unwrap();
                    assert!((a / b - 1.0).norm() < 1e-9, "q={q} s={s}");
                }
            }
        }
    }

    #[test]
    fn asymmetric_functional_equation() {
        for q in [3u64, 4, 5, 7] {
            for chi in enumerate_characters(q).unwrap().iter().filter(|c| c.is_primitive()) {
                let conj = chi.conjugate();
                for &(re, im) in &[(0.3, 17.2), (-0.7, 5.0), (1.4, -8.0), (0.5, 0.7)] {
                    let s = c64(re, im);
                    let lhs = l_value(s, chi, 0).unwrap();
                    let rhs = delta_factor(s, chi).unwrap() * l_value(1.0 - s, &conj, 0).unwrap();
                    assert!((lhs - rhs).norm() <= 1e-9 * lhs.norm().max(1e-3), "q={q} s={s}");
                }
            }
        }
    }

    #[test]
    fn delta_for_zeta() {
        // q = 1: zeta(-1) = Delta(-1) zeta(2)
        let chi = character(1, 0).unwrap();
        let d = delta_factor(c64(-1.0, 0.0), &chi).unwrap();
        let z2 = l_value(c64(2.0, 0.0), &chi, 0).unwrap();
        assert!((d * z2 - c64(-1.0 / 12.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn xi_functional_equation() {
        for chi in enumerate_characters(5).unwrap().iter().filter(|c| c.is_primitive()) {
            assert!(fe_residual(c64(0.3, 17.2), chi).unwrap() < 1e-8);
            let s = c64(0.2, 10.0);
            let a = xi_completed(s, chi).unwrap().norm();
            let b = xi_completed(1.0 - s, &chi.conjugate()).unwrap().norm();
            assert!((a / b - 1.0).abs() < 1e-9);
            if chi.is_real() {
                let s = c64(0.5, 10.0);
                let c = xi_completed(1.0 - s.conj(), &chi.conjugate()).unwrap().norm();
                assert!((xi_completed(s, chi).unwrap().norm() / c - 1.0).abs() < 1e-9);
            }
        }
        let zeta = character(1, 0).unwrap();
        let a = xi_completed(c64(2.0, 0.0), &zeta).unwrap();
        let b = xi_completed(c64(-1.0, 0.0), &zeta).unwrap();
        assert!((a - b).norm() < 1e-12);
        // large height: log form stays finite
        let chi = character(4, 1).unwrap();
        assert!(fe_residual(c64(0.25, 900.0), &chi).unwrap() < 1e-8);
    }

    #[test]
    fn afes_track_the_reference() {
        let chi = character(4, 1).unwrap();
        let s = c64(0.5, 50.0);
        let reference = l_pair(s, &chi).unwrap();
        assert!((l_afe(s, &chi).unwrap() - reference.0).norm() <= 5.0 * 50f64.powf(-0.25));
        assert!(
            (lprime_afe(s, &chi).unwrap() - reference.1).norm()
                <= 5.0 * 50f64.powf(-0.25) * 50f64.ln()
        );
        assert!(matches!(l_afe(c64(1.5, 50.0), &chi), Err(Error::Domain(_))));
        assert!(matches!(l_afe(c64(0.5, 5.0), &chi), Err(Error::Domain(_))));
        assert!(matches!(lprime_afe(c64(-0.1, 50.0), &chi), Err(Error::Domain(_))));
    }

    #[test]
    fn shifted_log_derivative() {
        let chi = character(4, 1).unwrap();
        let s = c64(2.0, 0.0);
        let v = log_deriv_shifted(s, &chi, c64(0.0, 0.0)).unwrap();
        // -sum Lambda(n) chi(n) n^{-2}
        let sieve = crate::arith::FactorSieve::new(200_000);
        let mut series = 0.0;
        for n in 2..=200_000usize {
            let lam = sieve.von_mangoldt(n).unwrap();
            if lam != 0.0 {
                series -= lam * chi.value(n as i64).re / (n as f64 * n as f64);
            }
        }
        assert!((v.re - series).abs() < 1e-4);
        let (l, d) = l_pair(c64(0.5, 7.0), &chi).unwrap();
        let w = log_deriv_shifted(c64(0.5, 7.0), &chi, l + 1.0).unwrap();
        assert!((w + d).norm() < 1e-12 * d.norm());
        assert!(matches!(
            log_deriv_shifted(c64(0.5, 7.0), &chi, l),
            Err(Error::NearAPoint { .. })
        ));
    }
}
