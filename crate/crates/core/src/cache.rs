//! On-disk a-point cache, one JSON file per `(q, character, a)`.
//!
//! Files are replaced atomically. A file whose schema version or strip does
//! not match the current code is ignored and rebuilt.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::apoints::{locate_apoints, scan_apoints, strip_right, APoint, LOW_LYING_TOP, STRIP_LEFT};
use crate::characters::DirichletCharacter;
use crate::theorem::PointSource;
use crate::{Error, Result};

pub const CACHE_SCHEMA_VERSION: u32 = 1;

/// Upper edges tried, relative to the requested height, when a scan runs
/// into an a-point on the top edge.
const TOP_OFFSETS: [f64; 4] = [0.0, 0.137, 0.291, 0.443];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CachedPoint {
    pub beta: f64,
    pub gamma: f64,
    pub multiplicity: u32,
    pub newton_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheFile {
    pub schema_version: u32,
    pub q: u64,
    pub char_index: usize,
    pub a: [f64; 2],
    pub strip: [f64; 2],
    pub t_max: f64,
    pub points: Vec<CachedPoint>,
}

impl CacheFile {
    fn matches(&self, chi: &DirichletCharacter, a: Complex64, strip: [f64; 2]) -> bool {
        self.schema_version == CACHE_SCHEMA_VERSION
            && self.q == chi.modulus()
            && self.char_index == chi.index()
            && self.a == [a.re, a.im]
            && self.strip == strip
    }

    pub fn apoints(&self, chi: &DirichletCharacter, a: Complex64) -> Vec<APoint> {
        self.points
            .iter()
            .map(|p| APoint {
                beta: p.beta,
                gamma: p.gamma,
                a,
                char_id: chi.id(),
                newton_residual: p.newton_residual,
                multiplicity: p.multiplicity,
            })
            .collect()
    }
}

/// Round to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// What happened on the last lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheOutcome {
    Hit,
    Extended,
    Rebuilt,
}

pub struct ApointStore {
    dir: PathBuf,
    writer: Mutex<Option<CacheOutcome>>,
}

impl ApointStore {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(ApointStore { dir, writer: Mutex::new(None) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, chi: &DirichletCharacter, a: Complex64) -> PathBuf {
        self.dir
            .join(format!("q{}_chi{}_a{}_{}.json", chi.modulus(), chi.index(), a.re, a.im))
    }

    pub fn last_outcome(&self) -> Option<CacheOutcome> {
        *self.writer.lock().unwrap()
    }

    /// The cached file if present and valid for the current strip.
    pub fn load(&self, chi: &DirichletCharacter, a: Complex64) -> Result<Option<CacheFile>> {
        let path = self.path_for(chi, a);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let file: CacheFile = match serde_json::from_str(&text) {
            Ok(f) => f,
            Err(_) => return Ok(None),
        };
        let strip = [STRIP_LEFT, strip_right(chi, a)?];
        Ok(file.matches(chi, a, strip).then_some(file))
    }

    fn store(&self, file: &CacheFile) -> Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        serde_json::to_writer_pretty(&mut tmp, file)?;
        let chi_path = self.dir.join(format!(
            "q{}_chi{}_a{}_{}.json",
            file.q, file.char_index, file.a[0], file.a[1]
        ));
        tmp.persist(chi_path).map_err(|e| Error::Io(e.error))?;
        Ok(())
    }

    /// a-points with `BOTTOM_EPS < gamma <= t_max`, extending the cache as needed.
    pub fn points_upto(
        &self,
        chi: &DirichletCharacter,
        a: Complex64,
        t_max: f64,
    ) -> Result<Vec<APoint>> {
        let mut outcome = self.writer.lock().unwrap();
        let cached = self.load(chi, a)?;
        let (file, how) = match cached {
            Some(f) if f.t_max >= t_max => (f, CacheOutcome::Hit),
            Some(f) if f.t_max >= LOW_LYING_TOP => match extend(chi, a, &f, t_max) {
                Ok(g) => (g, CacheOutcome::Extended),
                Err(_) => (fresh(chi, a, t_max)?, CacheOutcome::Rebuilt),
            },
            _ => (fresh(chi, a, t_max)?, CacheOutcome::Rebuilt),
        };
        if how != CacheOutcome::Hit {
            self.store(&file)?;
        }
        *outcome = Some(how);
        let mut pts = file.apoints(chi, a);
        pts.retain(|p| p.gamma <= t_max);
        Ok(pts)
    }
}

impl PointSource for ApointStore {
    fn points(&self, chi: &DirichletCharacter, a: Complex64, t_max: f64) -> Result<Vec<APoint>> {
        self.points_upto(chi, a, t_max)
    }
}

fn rounded(points: &[APoint]) -> Vec<CachedPoint> {
    points
        .iter()
        .map(|p| CachedPoint {
            beta: round15(p.beta),
            gamma: round15(p.gamma),
            multiplicity: p.multiplicity,
            newton_residual: round15(p.newton_residual),
        })
        .collect()
}

fn with_top<F>(t_max: f64, mut run: F) -> Result<(f64, Vec<APoint>)>
where
    F: FnMut(f64) -> Result<Vec<APoint>>,
{
    let mut last = None;
    for off in TOP_OFFSETS {
        let top = t_max + off;
        match run(top) {
            Ok(p) => return Ok((top, p)),
            Err(e @ (Error::ContourTooClose { .. } | Error::Consistency(_))) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

fn fresh(chi: &DirichletCharacter, a: Complex64, t_max: f64) -> Result<CacheFile> {
    let (top, pts) = with_top(t_max.max(LOW_LYING_TOP), |top| scan_apoints(chi, a, top))?;
    Ok(CacheFile {
        schema_version: CACHE_SCHEMA_VERSION,
        q: chi.modulus(),
        char_index: chi.index(),
        a: [a.re, a.im],
        strip: [STRIP_LEFT, strip_right(chi, a)?],
        t_max: top,
        points: rounded(&pts),
    })
}

fn extend(chi: &DirichletCharacter, a: Complex64, old: &CacheFile, t_max: f64) -> Result<CacheFile> {
    let (top, pts) = with_top(t_max, |top| locate_apoints(chi, a, old.t_max, top))?;
    let mut file = old.clone();
    file.t_max = top;
    file.points.extend(rounded(&pts));
    Ok(file)
}
