//! Frozen envelope constants.
//!
//! The constants live in `calibration.json` next to the crate manifest and are
//! compiled in. They are regenerated with `apoints calibrate` and then
//! treated as regression limits.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

const EMBEDDED: &str = include_str!("../calibration.json");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AfeConstants {
    /// `max |l_afe - L| / t^{-sigma/2}` over the grid.
    pub rane: f64,
    /// `max |lprime_afe - L'| / (t^{-sigma/2} log t)` over the grid.
    pub lprime: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    #[serde(default)]
    pub schema_version: u32,
    /// Keyed by the modulus as a decimal string.
    #[serde(default)]
    pub afe: BTreeMap<String, AfeConstants>,
    /// `C` in `|count - main term| <= C log(qT)`.
    #[serde(default)]
    pub counting_c: Option<f64>,
    /// Bound on `|LHS - RHS| / (sqrt T log^3(qT))`, keyed by a run label.
    #[serde(default)]
    pub normalized_residual: BTreeMap<String, f64>,
    /// `(K, c)` of the envelope `K T exp(-c sqrt(log T))`.
    #[serde(default)]
    pub corollary_envelope: Option<(f64, f64)>,
}

impl Calibration {
    pub fn parse(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn afe_constant(&self, q: u64) -> Option<AfeConstants> {
        self.afe.get(&q.to_string()).copied()
    }

    pub fn residual_bound(&self, label: &str) -> Option<f64> {
        self.normalized_residual.get(label).copied()
    }

    pub fn corollary_bound(&self, t: f64) -> Option<f64> {
        self.corollary_envelope
            .map(|(k, c)| k * t * (-c * t.ln().sqrt()).exp())
    }
}

/// The compiled-in calibration.
pub fn frozen() -> &'static Calibration {
    static CELL: OnceLock<Calibration> = OnceLock::new();
    CELL.get_or_init(|| Calibration::parse(EMBEDDED).expect("embedded calibration.json is valid"))
}

/// Grids the frozen constants are measured on.
pub mod grid {
    use num_complex::Complex64;

    pub const AFE_MODULI: [u64; 6] = [3, 4, 5, 7, 8, 11];
    pub const AFE_SIGMA: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
    pub const AFE_T: [f64; 5] = [20.0, 50.0, 100.0, 200.0, 500.0];

    pub const COUNT_MODULI: [u64; 3] = [3, 4, 5];
    pub const T_GRID: [f64; 4] = [50.0, 100.0, 200.0, 500.0];

    pub fn a_values() -> [Complex64; 4] {
        [
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(1.0, 0.0),
        ]
    }

    /// `(a, X)` pairs of the main verification run, on `q = 4`.
    pub fn verification_pairs() -> [(Complex64, f64); 6] {
        let [zero, half, two_i, one] = a_values();
        [
            (zero, 1.0),
            (zero, 2.0),
            (zero, std::f64::consts::SQRT_2),
            (half, 1.0),
            (two_i, 1.0),
            (one, 1.0),
        ]
    }

    pub const COROLLARY_T: [f64; 2] = [100.0, 300.0];
}

/// Head-room applied to measured maxima of counting and residual runs.
pub const MARGIN: f64 = 1.25;

/// Round up to three significant digits.
pub fn round_up3(x: f64) -> f64 {
    if !(x > 0.0) || !x.is_finite() {
        return x;
    }
    let scale = 10f64.powi(2 - x.log10().floor() as i32);
    (x * scale).ceil() / scale
}

/// `max |AFE - L| / shape` over the primitive characters mod `q` and the grid.
pub fn measure_afe(q: u64) -> crate::Result<AfeConstants> {
    use crate::lfunc::{afe_shape, l_pair, l_afe, lprime_afe, EvalMethod};
    use num_complex::Complex64;

    let mut worst = AfeConstants { rane: 0.0, lprime: 0.0 };
    for chi in crate::enumerate_characters(q)?.into_iter().filter(|c| c.is_primitive()) {
        for &sigma in &grid::AFE_SIGMA {
            for &t in &grid::AFE_T {
                let s = Complex64::new(sigma, t);
                let (v, d) = l_pair(s, &chi)?;
                let r = (l_afe(s, &chi)? - v).norm() / afe_shape(s, EvalMethod::RaneAfe);
                let p = (lprime_afe(s, &chi)? - d).norm() / afe_shape(s, EvalMethod::LprimeAfe);
                worst.rane = worst.rane.max(r);
                worst.lprime = worst.lprime.max(p);
            }
        }
    }
    Ok(worst)
}

/// `max |count - main term| / log(qT)` over the counting grid, first
/// character of each modulus.
pub fn measure_counting() -> crate::Result<f64> {
    use crate::apoints::{count_profile, safe_height};
    use crate::characters::character;

    let mut worst: f64 = 0.0;
    for &q in &grid::COUNT_MODULI {
        let chi = character(q, 1)?;
        for a in grid::a_values() {
            let heights = grid::T_GRID
                .iter()
                .map(|&t| safe_height(&chi, a, t))
                .collect::<crate::Result<Vec<_>>>()?;
            for r in count_profile(&chi, a, &heights)? {
                worst = worst.max(r.discrepancy().abs() / (q as f64 * r.t_used).ln());
            }
        }
    }
    Ok(worst)
}

/// Worst normalized residual per `mode/variant` label over the verification grid.
pub fn measure_residuals(
    source: &dyn crate::theorem::PointSource,
    sieve: &crate::FactorSieve,
) -> crate::Result<BTreeMap<String, f64>> {
    use crate::characters::character;
    use crate::theorem::{residual_label, residual_table, Mode, PhaseSign, RhsVariant, TableOptions};

    let chi = character(4, 1)?;
    let variants = [
        RhsVariant::printed(PhaseSign::Minus),
        RhsVariant::printed(PhaseSign::Plus),
        RhsVariant::corrected(),
    ];
    let mut out = BTreeMap::new();
    for (a, x) in grid::verification_pairs() {
        let modes: &[Mode] = if a == num_complex::Complex64::new(0.0, 0.0) {
            &[Mode::Theorem1, Mode::LemmaZero]
        } else {
            &[Mode::Theorem1]
        };
        for &mode in modes {
            for variant in variants {
                let opts = TableOptions { variant, ..TableOptions::default() };
                let rows = residual_table(&chi, a, x, &grid::T_GRID, mode, opts, source, sieve)?;
                for row in rows {
                    if let Some(e) = row.error {
                        return Err(crate::Error::Consistency(e));
                    }
                    let slot = out.entry(residual_label(mode, variant)).or_insert(0.0f64);
                    *slot = slot.max(row.normalized_residual);
                }
            }
        }
    }
    Ok(out)
}

/// `(K, c)` through the two `a = 0, X = q` Corollary residuals. `c` keeps its
/// sign; a nonpositive `c` means the residual does not decay relative to `T`.
pub fn fit_corollary(
    source: &dyn crate::theorem::PointSource,
    sieve: &crate::FactorSieve,
) -> crate::Result<(f64, f64)> {
    use crate::characters::character;
    use crate::theorem::{residual_table, Mode, TableOptions};

    let chi = character(4, 1)?;
    let rows = residual_table(
        &chi,
        num_complex::Complex64::new(0.0, 0.0),
        4.0,
        &grid::COROLLARY_T,
        Mode::Corollary,
        TableOptions::default(),
        source,
        sieve,
    )?;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| match &r.error {
            Some(e) => Err(crate::Error::Consistency(e.clone())),
            None => Ok((r.t_used, r.residual)),
        })
        .collect::<crate::Result<_>>()?;
    Ok(envelope_through(pts[0], pts[1]))
}

/// `(K, c)` with `K T exp(-c sqrt(log T))` passing through both points.
pub fn envelope_through((t1, r1): (f64, f64), (t2, r2): (f64, f64)) -> (f64, f64) {
    let (u1, u2) = (t1.ln().sqrt(), t2.ln().sqrt());
    let c = ((r1 / t1) / (r2 / t2)).ln() / (u2 - u1);
    let k = r1 / t1 * (c * u1).exp();
    (k, c)
}

/// Runs every measurement and assembles a calibration file.
pub fn calibrate(
    source: &dyn crate::theorem::PointSource,
    sieve: &crate::FactorSieve,
) -> crate::Result<Calibration> {
    use rayon::prelude::*;

    let afe = grid::AFE_MODULI
        .par_iter()
        .map(|&q| {
            measure_afe(q).map(|c| {
                let c = AfeConstants { rane: round_up3(c.rane), lprime: round_up3(c.lprime) };
                (q.to_string(), c)
            })
        })
        .collect::<crate::Result<BTreeMap<_, _>>>()?;
    let counting_c = Some(round_up3(MARGIN * measure_counting()?));
    let normalized_residual = measure_residuals(source, sieve)?
        .into_iter()
        .map(|(k, v)| (k, round_up3(MARGIN * v)))
        .collect();
    let (k, c) = fit_corollary(source, sieve)?;
    Ok(Calibration {
        schema_version: 1,
        afe,
        counting_c,
        normalized_residual,
        corollary_envelope: Some((round_up3(MARGIN * k), c)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_file_parses() {
        let c = frozen();
        for v in c.afe.values() {
            assert!(v.rane > 0.0 && v.lprime > 0.0);
        }
    }

    #[test]
    fn missing_fields_default() {
        let c = Calibration::parse("{}").unwrap();
        assert!(c.afe_constant(4).is_none());
        assert!(c.corollary_bound(100.0).is_none());
    }

    #[test]
    fn rounding_up() {
        assert_eq!(round_up3(0.2161), 0.217);
        assert_eq!(round_up3(12.0), 12.0);
        assert_eq!(round_up3(0.001234), 0.00124);
    }

    #[test]
    fn envelope_passes_through_both_points() {
        let (k, c) = envelope_through((100.0, 50.0), (300.0, 120.0));
        for (t, r) in [(100.0f64, 50.0), (300.0, 120.0)] {
            assert!((k * t * (-c * t.ln().sqrt()).exp() - r).abs() < 1e-9);
        }
        assert!(c > 0.0);
        let (_, c) = envelope_through((100.0, 90.0), (300.0, 540.0));
        assert!(c < 0.0);
    }
}
