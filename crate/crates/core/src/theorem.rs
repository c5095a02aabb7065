//! Both sides of the asymptotic formulas for `sum L'(rho_a, chi) X^rho_a`
//! over a-points with `0 < gamma <= T`, and the generalized Stieltjes
//! coefficients `C_n = ((-1)^n / n!) sum_k Lambda(k) chi(k) log^n(k) / k`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::apoints::{nontrivial, safe_height, APoint};
use crate::arith::FactorSieve;
use crate::characters::{CharId, DirichletCharacter};
use crate::lfunc::l_pair;
use crate::special::{hurwitz_stieltjes_constants, hurwitz_with, EulerMaclaurinParams};
use crate::{Error, Result};

/// Sign of the phase `e^{+-2 pi i k X / q}` in the k-sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseSign {
    Plus,
    Minus,
}

impl PhaseSign {
    fn value(self) -> f64 {
        match self {
            PhaseSign::Plus => 1.0,
            PhaseSign::Minus => -1.0,
        }
    }
}

impl fmt::Display for PhaseSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhaseSign::Plus => "plus",
            PhaseSign::Minus => "minus",
        })
    }
}

impl FromStr for PhaseSign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(PhaseSign::Plus),
            "minus" | "-" => Ok(PhaseSign::Minus),
            _ => Err(Error::domain(format!("unknown phase sign {s:?}"))),
        }
    }
}

/// How the k-sum block is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RhsVariant {
    pub phase: PhaseSign,
    /// Multiply the k-sum block by `chi(-1) tau(chi) / sqrt(q)`.
    pub root_number: bool,
    /// Keep the `a`-terms only at `X = 1`.
    #[serde(default)]
    pub a_terms_unit_x: bool,
}

impl RhsVariant {
    /// The displayed formula with the given phase.
    pub fn printed(phase: PhaseSign) -> Self {
        RhsVariant { phase, root_number: false, a_terms_unit_x: false }
    }

    /// The variant that matches the data: plus phase and the root-number factor.
    pub fn corrected() -> Self {
        RhsVariant { phase: PhaseSign::Plus, root_number: true, a_terms_unit_x: true }
    }

    pub fn label(&self) -> String {
        format!(
            "{}{}{}",
            self.phase,
            if self.root_number { "+root" } else { "" },
            if self.a_terms_unit_x { "+x1" } else { "" }
        )
    }
}

impl Default for RhsVariant {
    fn default() -> Self {
        RhsVariant::printed(PhaseSign::Minus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Theorem1,
    LemmaZero,
    Corollary,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Theorem1 => "theorem1",
            Mode::LemmaZero => "lemma_zero",
            Mode::Corollary => "corollary",
        })
    }
}

/// `sum L'(rho, chi) X^rho`, multiplicity-weighted, `X^rho = exp(rho ln X)`.
pub fn empirical_sum(chi: &DirichletCharacter, points: &[APoint], x: f64) -> Result<Complex64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("X must be positive, got {x}")));
    }
    let id = chi.id();
    let lx = x.ln();
    let mut acc = Complex64::new(0.0, 0.0);
    for p in points {
        if p.char_id != id {
            return Err(Error::domain(format!(
                "point {} belongs to {}, not {}",
                p.rho(),
                p.char_id,
                id
            )));
        }
        let rho = p.rho();
        let (_, d) = l_pair(rho, chi)?;
        acc += d * (rho * lx).exp() * p.multiplicity as f64;
    }
    Ok(acc)
}

fn require_primitive(chi: &DirichletCharacter) -> Result<()> {
    if !chi.is_primitive() {
        return Err(Error::domain(format!("character {} is not primitive", chi.id())));
    }
    Ok(())
}

/// `X` as a positive integer when `Delta(X) = 1`.
fn integer_part(x: f64) -> Option<u64> {
    (x >= 1.0 && x.fract() == 0.0 && x < 9.0e15).then_some(x as u64)
}

/// The four k-sums `sum_{k <= qT/(2 pi X)}` with weights `log^2 k`, `log k`, 1
/// and the twisted convolution, each against `conj chi(k) e^{sign 2 pi i k X/q}`.
fn k_sums(
    chi: &DirichletCharacter,
    x: f64,
    t: f64,
    sign: f64,
    sieve: &FactorSieve,
) -> Result<[Complex64; 4]> {
    let q = chi.modulus() as f64;
    let k_max = (q * t / (2.0 * PI * x)).floor();
    if k_max > sieve.limit() as f64 {
        return Err(Error::Resource(format!(
            "k-range {k_max} exceeds the sieve limit {}",
            sieve.limit()
        )));
    }
    let mut s = [Complex64::new(0.0, 0.0); 4];
    for k in 1..=k_max as usize {
        let ck = chi.value(k as i64).conj();
        let phase = (k as f64 * x / q).fract();
        let e = Complex64::from_polar(1.0, sign * 2.0 * PI * phase);
        let lk = (k as f64).ln();
        let w = ck * e;
        s[0] += w * lk * lk;
        s[1] += w * lk;
        s[2] += w;
        s[3] += sieve.twisted_lambda_log_conv(k, chi)? * e;
    }
    Ok(s)
}

/// `-(aT/2pi) L^2 + (aT/pi) L - aT/pi` with `L = log(qT/2pi)`.
pub fn a_terms(q: u64, a: Complex64, t: f64) -> Complex64 {
    let l = (q as f64 * t / (2.0 * PI)).ln();
    a * (-(t / (2.0 * PI)) * l * l + t / PI * l - t / PI)
}

/// Right-hand side for general `a`: the `a`-terms, the `Delta(X)` terms and the k-sum block.
pub fn theorem1_rhs(
    chi: &DirichletCharacter,
    a: Complex64,
    x: f64,
    t: f64,
    variant: RhsVariant,
    sieve: &FactorSieve,
) -> Result<Complex64> {
    require_primitive(chi)?;
    if !(x > 0.0) {
        return Err(Error::domain(format!("X must be positive, got {x}")));
    }
    if !(t >= 10.0) {
        return Err(Error::domain(format!("T must be at least 10, got {t}")));
    }
    let q = chi.modulus();
    let qf = q as f64;
    let l = (qf * t / (2.0 * PI)).ln();
    let i = Complex64::new(0.0, 1.0);
    let mut total = if variant.a_terms_unit_x && x != 1.0 {
        Complex64::new(0.0, 0.0)
    } else {
        a_terms(q, a, t)
    };

    // Delta(X) chi[Delta(X) X] terms; chi is never consulted at a non-integer X
    if let Some(n) = integer_part(x) {
        let cx = chi.value(n as i64);
        if cx.norm_sqr() != 0.0 {
            let lx = x.ln();
            let brace = t / (4.0 * PI) * l - t / (4.0 * PI) + i * (PI / 4.0) * (t / (2.0 * PI));
            total -= cx * lx * brace;
            if n as usize > sieve.limit() {
                return Err(Error::Resource(format!("X = {n} exceeds the sieve limit")));
            }
            total += cx * (t / (2.0 * PI)) * sieve.lambda_log_conv(n as usize)?;
        }
    }

    let [s1, s2, s3, s4] = k_sums(chi, x, t, variant.phase.value(), sieve)?;
    let sq = qf.sqrt();
    let lx = x.ln();
    let mut block = x / sq * s1 + x * lx / (2.0 * sq) * s2
        - (x * lx * lx / (2.0 * sq) + i * (PI / (4.0 * sq)) * x * lx) * s3
        - x / sq * s4;
    if variant.root_number {
        block *= chi.value(-1) * chi.gauss_sum() / sq;
    }
    Ok(total + block)
}

/// The zero-sum (`a = 0`) right-hand side.
pub fn lemma_zero_sum_rhs(
    chi: &DirichletCharacter,
    x: f64,
    t: f64,
    variant: RhsVariant,
    sieve: &FactorSieve,
) -> Result<Complex64> {
    theorem1_rhs(chi, Complex64::new(0.0, 0.0), x, t, variant, sieve)
}

/// Closed form for `X/q` a positive integer, using `C_0` and `C_1` from `coeffs`.
pub fn corollary_rhs(
    chi: &DirichletCharacter,
    a: Complex64,
    x: f64,
    t: f64,
    coeffs: &StieltjesCoeffs,
    sieve: &FactorSieve,
) -> Result<Complex64> {
    require_primitive(chi)?;
    let q = chi.modulus();
    let qf = q as f64;
    let ratio = x / qf;
    if !(ratio >= 1.0 && ratio.fract() == 0.0) {
        return Err(Error::domain(format!("X/q = {ratio} is not a positive integer")));
    }
    if coeffs.values.len() < 2 {
        return Err(Error::domain("the closed form needs C_0 and C_1"));
    }
    let (c0, c1) = (coeffs.values[0], coeffs.values[1]);
    let n = x as u64;
    let cx = chi.value(n as i64);
    let sq = qf.sqrt();
    let l = (qf * t / (2.0 * PI)).ln();
    let lx = x.ln();
    let base = sq * t / (2.0 * PI);
    let conv = if cx.norm_sqr() != 0.0 {
        if n as usize > sieve.limit() {
            return Err(Error::Resource(format!("X = {n} exceeds the sieve limit")));
        }
        sieve.lambda_log_conv(n as usize)?
    } else {
        0.0
    };
    let i = Complex64::new(0.0, 1.0);
    let two_a = 2.0 * a / sq;
    let first = (1.0 - two_a) * (sq * t / (4.0 * PI)) * l * l;
    let second = base * l * (two_a + c0 - 1.0 - (sq + cx) / (2.0 * sq) * lx);
    let third = base * (1.0 - c0 - c0 * c0 + 3.0 * c1 - two_a + cx / qf * conv);
    let fourth = -base * lx * (c0 - 1.0 + 0.5 * lx + (i * PI / 4.0 - 0.5) * (cx / sq - 1.0));
    Ok(first + second + third + fourth)
}

/// Key of the frozen residual bound for a mode and variant.
pub fn residual_label(mode: Mode, variant: RhsVariant) -> String {
    format!("{mode}/{}", variant.label())
}

/// `(sqrt T) log^3(qT)`.
pub fn residual_scale(q: u64, t: f64) -> f64 {
    t.sqrt() * (q as f64 * t).ln().powi(3)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StieltjesCoeffs {
    pub char_id: CharId,
    /// `C_0 ..= C_n` from the Laurent expansion at `s = 1`.
    pub values: Vec<Complex64>,
    /// The same coefficients from Richardson-extrapolated central differences.
    pub derivative_values: Vec<Complex64>,
    /// Max over `n` of the disagreement between the two.
    pub method_gap: f64,
    /// Riesz-weighted partial sums of the defining series (diagnostic only).
    pub cesaro_values: Vec<Complex64>,
    pub cesaro_cutoff: usize,
}

/// Maximum `n` supported.
pub const STIELTJES_MAX_N: usize = 4;
pub const STIELTJES_GAP_TOL: f64 = 1e-6;

/// Both methods; fails with a consistency error when they disagree by more than `1e-6`.
pub fn stieltjes(chi: &DirichletCharacter, n_max: usize, sieve: &FactorSieve) -> Result<StieltjesCoeffs> {
    let c = stieltjes_unchecked(chi, n_max, sieve)?;
    if !(c.method_gap <= STIELTJES_GAP_TOL) {
        return Err(Error::Consistency(format!(
            "Stieltjes method gap {:e} exceeds {STIELTJES_GAP_TOL:e}",
            c.method_gap
        )));
    }
    Ok(c)
}

pub fn stieltjes_unchecked(
    chi: &DirichletCharacter,
    n_max: usize,
    sieve: &FactorSieve,
) -> Result<StieltjesCoeffs> {
    if chi.is_principal() {
        return Err(Error::domain("Stieltjes coefficients need a nonprincipal character"));
    }
    if n_max > STIELTJES_MAX_N {
        return Err(Error::domain(format!("n_max must be at most {STIELTJES_MAX_N}")));
    }
    let values = stieltjes_series(chi, n_max)?;
    let derivative_values = (0..=n_max)
        .map(|n| stieltjes_derivative(chi, n))
        .collect::<Result<Vec<_>>>()?;
    let method_gap = values
        .iter()
        .zip(&derivative_values)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let cesaro_cutoff = sieve.limit();
    let cesaro_values = stieltjes_cesaro(chi, n_max, sieve);
    Ok(StieltjesCoeffs {
        char_id: chi.id(),
        values,
        derivative_values,
        method_gap,
        cesaro_values,
        cesaro_cutoff,
    })
}

/// `-L'/L(s, chi) = sum Lambda(k) chi(k) k^{-s}` at real `s != 1`, with a
/// tighter Euler-Maclaurin target than the default.
fn neg_log_deriv(chi: &DirichletCharacter, s: f64) -> Result<Complex64> {
    let q = chi.modulus();
    let z = Complex64::new(s, 0.0);
    let (mut v, mut d) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for r in 1..=q {
        let c = chi.value(r as i64);
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let alpha = r as f64 / q as f64;
        let (hv, hd) = hurwitz_with(z, alpha, &EulerMaclaurinParams::choose(z, alpha, 1e-15));
        v += c * hv;
        d += c * hd;
    }
    if v.norm() == 0.0 {
        return Err(Error::Consistency(format!("L({s}, chi) vanished")));
    }
    Ok((q as f64).ln() - d / v)
}

/// Coarsest step. `-L'/L` is analytic well beyond `|s - 1| = 1/2` for the
/// small moduli in use, and the Hurwitz sums lose absolute accuracy near the
/// pole, so wide steps with deep extrapolation beat small ones.
const RICHARDSON_H0: f64 = 0.2;
const RICHARDSON_LEVELS: usize = 3;

/// `C_n = F^{(n)}(1) / n!`, `F = -L'/L`, by central differences on the
/// symmetric stencil `1 +- (j - 1/2) h`, extrapolated over `h, h/2, h/4`.
/// The pole `-1/(s + nu)` from the trivial zero is removed before differencing
/// and its Taylor coefficients added back.
fn stieltjes_derivative(chi: &DirichletCharacter, n: usize) -> Result<Complex64> {
    let nu = chi.parity() as f64;
    let smooth = |s: f64| -> Result<Complex64> { Ok(neg_log_deriv(chi, s)? + 1.0 / (s + nu)) };
    let m = n / 2 + 1;
    let nodes: Vec<f64> = (1..=m)
        .flat_map(|j| {
            let x = j as f64 - 0.5;
            [-x, x]
        })
        .collect();
    let weights = fd_weights(&nodes, n);
    let mut table: Vec<Complex64> = Vec::with_capacity(RICHARDSON_LEVELS);
    for r in 0..RICHARDSON_LEVELS {
        let h = RICHARDSON_H0 / f64::powi(2.0, r as i32);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in nodes.iter().zip(&weights) {
            acc += w * smooth(1.0 + x * h)?;
        }
        table.push(acc / h.powi(n as i32));
    }
    // error expansion in even powers of h
    let mut factor = 4.0;
    while table.len() > 1 {
        table = table.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
        factor *= 4.0;
    }
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(table[0] / fact - sign / (1.0 + nu).powi(n as i32 + 1))
}

/// Weights `w` with `sum w_j f(x_j) ~ f^{(n)}(0)` on the given nodes (unit spacing).
fn fd_weights(nodes: &[f64], n: usize) -> Vec<f64> {
    let size = nodes.len();
    // rows: moments k = 0..size-1
    let mut a = vec![vec![0.0; size + 1]; size];
    let mut fact = 1.0;
    for k in 1..=n {
        fact *= k as f64;
    }
    for (k, row) in a.iter_mut().enumerate() {
        for (j, x) in nodes.iter().enumerate() {
            row[j] = x.powi(k as i32);
        }
        row[size] = if k == n { fact } else { 0.0 };
    }
    // Gaussian elimination with partial pivoting
    for col in 0..size {
        let piv = (col..size)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        for row in 0..size {
            if row != col {
                let f = a[row][col] / a[col][col];
                for c in col..=size {
                    a[row][c] -= f * a[col][c];
                }
            }
        }
    }
    (0..size).map(|i| a[i][size] / a[i][i]).collect()
}

/// Taylor coefficients of `-L'/L` at `s = 1` from the Laurent constants of
/// `zeta(s, r/q)`; the pole cancels because `sum_r chi(r) = 0`.
fn stieltjes_series(chi: &DirichletCharacter, n_max: usize) -> Result<Vec<Complex64>> {
    let q = chi.modulus();
    let qf = q as f64;
    let order = n_max + 1;
    let zero = Complex64::new(0.0, 0.0);
    // sum_r chi(r) zeta(1 + e, r/q) = sum_k A_k e^k
    let mut a = vec![zero; order + 1];
    for r in 1..=q {
        let c = chi.value(r as i64);
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let g = hurwitz_stieltjes_constants(r as f64 / qf, order)?;
        let mut fact = 1.0;
        for k in 0..=order {
            if k > 0 {
                fact *= k as f64;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            a[k] += c * (sign * g[k] / fact);
        }
    }
    // q^{-1-e} = q^{-1} sum_j (-log q)^j e^j / j!
    let lq = qf.ln();
    let mut p = vec![0.0; order + 1];
    let mut term = 1.0 / qf;
    for (j, pj) in p.iter_mut().enumerate() {
        if j > 0 {
            term *= -lq / j as f64;
        }
        *pj = term;
    }
    let mut l = vec![zero; order + 1];
    for i in 0..=order {
        for j in 0..=order - i {
            l[i + j] += a[i] * p[j];
        }
    }
    let dl: Vec<Complex64> = (0..order).map(|k| l[k + 1] * (k + 1) as f64).collect();
    // F = -dl / l
    let mut f = vec![zero; n_max + 1];
    for k in 0..=n_max {
        let mut acc = -dl[k];
        for j in 0..k {
            acc -= f[j] * l[k - j];
        }
        f[k] = acc / l[0];
    }
    Ok(f)
}

/// `((-1)^n / n!) sum_{k <= x} Lambda(k) chi(k) log^n(k) / k * (1 - k/x)`.
fn stieltjes_cesaro(chi: &DirichletCharacter, n_max: usize, sieve: &FactorSieve) -> Vec<Complex64> {
    let x = sieve.limit();
    let xf = x as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); n_max + 1];
    for k in 2..=x {
        let lam = sieve.von_mangoldt(k).unwrap_or(0.0);
        if lam == 0.0 {
            continue;
        }
        let ck = chi.value(k as i64);
        if ck.norm_sqr() == 0.0 {
            continue;
        }
        let lk = (k as f64).ln();
        let w = ck * (lam / k as f64 * (1.0 - k as f64 / xf));
        let mut pow = 1.0;
        for v in out.iter_mut() {
            *v += w * pow;
            pow *= lk;
        }
    }
    let mut fact = 1.0;
    for (n, v) in out.iter_mut().enumerate() {
        if n > 0 {
            fact *= n as f64;
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        *v *= sign / fact;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRow {
    #[serde(rename = "T_requested")]
    pub t_requested: f64,
    #[serde(rename = "T_used")]
    pub t_used: f64,
    #[serde(rename = "X")]
    pub x: f64,
    pub a: Complex64,
    pub mode: Mode,
    pub variant: RhsVariant,
    pub empirical: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    pub normalized_residual: f64,
    pub n_points: usize,
    /// Set when the row could not be computed.
    pub error: Option<String>,
}

/// Supplies the a-points with `0 < gamma <= t_max`.
pub trait PointSource: Sync {
    fn points(&self, chi: &DirichletCharacter, a: Complex64, t_max: f64) -> Result<Vec<APoint>>;
}

/// Options for [`residual_table`].
#[derive(Debug, Clone, Copy)]
pub struct TableOptions {
    pub variant: RhsVariant,
    /// Include a-points with `beta <= 0`.
    pub include_trivial: bool,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions { variant: RhsVariant::default(), include_trivial: false }
    }
}

/// One row per `T` in `t_grid`, each at the safe height above `T`.
#[allow(clippy::too_many_arguments)]
pub fn residual_table(
    chi: &DirichletCharacter,
    a: Complex64,
    x: f64,
    t_grid: &[f64],
    mode: Mode,
    opts: TableOptions,
    source: &dyn PointSource,
    sieve: &FactorSieve,
) -> Result<Vec<VerificationRow>> {
    require_primitive(chi)?;
    if t_grid.is_empty() {
        return Err(Error::domain("empty T grid"));
    }
    if mode == Mode::LemmaZero && a != Complex64::new(0.0, 0.0) {
        return Err(Error::domain("lemma_zero mode needs a = 0"));
    }
    let coeffs = if mode == Mode::Corollary {
        Some(stieltjes(chi, 1, sieve)?)
    } else {
        None
    };
    let heights: Vec<(f64, Result<f64>)> = t_grid
        .par_iter()
        .map(|&t| (t, safe_height(chi, a, t)))
        .collect();
    let t_max = heights
        .iter()
        .filter_map(|(_, h)| h.as_ref().ok().copied())
        .fold(0.0, f64::max);
    let all = if t_max > 0.0 { Some(source.points(chi, a, t_max)) } else { None };

    let mut rows: Vec<VerificationRow> = heights
        .into_par_iter()
        .map(|(t_req, h)| {
            let mut row = VerificationRow {
                t_requested: t_req,
                t_used: f64::NAN,
                x,
                a,
                mode,
                variant: opts.variant,
                empirical: Complex64::new(f64::NAN, f64::NAN),
                rhs: Complex64::new(f64::NAN, f64::NAN),
                residual: f64::NAN,
                normalized_residual: f64::NAN,
                n_points: 0,
                error: None,
            };
            let result = (|| -> Result<()> {
                let t_used = h?;
                row.t_used = t_used;
                let pts = match &all {
                    Some(Ok(p)) => p,
                    Some(Err(e)) => return Err(Error::Consistency(e.to_string())),
                    None => return Err(Error::Consistency("no a-points".into())),
                };
                let mut chosen: Vec<APoint> =
                    pts.iter().filter(|p| p.gamma > 0.0 && p.gamma <= t_used).cloned().collect();
                if !opts.include_trivial {
                    chosen = nontrivial(&chosen);
                }
                row.n_points = chosen.iter().map(|p| p.multiplicity as usize).sum();
                row.empirical = empirical_sum(chi, &chosen, x)?;
                row.rhs = match mode {
                    Mode::Theorem1 => theorem1_rhs(chi, a, x, t_used, opts.variant, sieve)?,
                    Mode::LemmaZero => lemma_zero_sum_rhs(chi, x, t_used, opts.variant, sieve)?,
                    Mode::Corollary => {
                        corollary_rhs(chi, a, x, t_used, coeffs.as_ref().unwrap(), sieve)?
                    }
                };
                row.residual = (row.empirical - row.rhs).norm();
                row.normalized_residual = row.residual / residual_scale(chi.modulus(), t_used);
                Ok(())
            })();
            if let Err(e) = result {
                row.error = Some(e.to_string());
            }
            row
        })
        .collect();
    rows.sort_by(|p, q| p.t_requested.partial_cmp(&q.t_requested).unwrap());
    Ok(rows)
}

/// Scans from scratch on every call.
pub struct DirectScan;

impl PointSource for DirectScan {
    fn points(&self, chi: &DirichletCharacter, a: Complex64, t_max: f64) -> Result<Vec<APoint>> {
        crate::apoints::scan_apoints(chi, a, t_max)
    }
}
