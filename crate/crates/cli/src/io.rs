//! Matrix containers and measure documents.

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use mdenoise_core::ensembles::SymmetricMatrixInstance;
use mdenoise_core::measures::{Atom, Grid, Interval, MeasureSpec, SpectralMeasure};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::InvalidInput;

pub const MAGIC: &[u8; 5] = b"MDNZ1";

/// Binary container: `MDNZ1`, `n` as u64 LE, then the lower triangle row by
/// row as f64 LE (`n(n+1)/2` values).
pub fn write_mdnz(path: &Path, m: &SymmetricMatrixInstance) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?);
    let a = m.matrix();
    w.write_all(MAGIC)?;
    w.write_all(&(m.n() as u64).to_le_bytes())?;
    for i in 0..m.n() {
        for j in 0..=i {
            w.write_all(&a[(i, j)].to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_mdnz(path: &Path) -> Result<SymmetricMatrixInstance> {
    let mut r = BufReader::new(fs::File::open(path).with_context(|| format!("opening {}", path.display()))?);
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(InvalidInput(format!("{} is not an MDNZ1 container", path.display())).into());
    }
    let mut nb = [0u8; 8];
    r.read_exact(&mut nb)?;
    let n = usize::try_from(u64::from_le_bytes(nb))?;
    if n == 0 {
        return Err(InvalidInput("empty matrix".into()).into());
    }
    let mut a = DMatrix::zeros(n, n);
    let mut buf = [0u8; 8];
    for i in 0..n {
        for j in 0..=i {
            r.read_exact(&mut buf).map_err(|_| InvalidInput(format!("{} is truncated", path.display())))?;
            let v = f64::from_le_bytes(buf);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    if r.read(&mut buf)? != 0 {
        return Err(InvalidInput(format!("{} has trailing bytes", path.display())).into());
    }
    Ok(SymmetricMatrixInstance::new(a)?)
}

/// Full matrix, one row per line, no header.
pub fn write_csv(path: &Path, m: &SymmetricMatrixInstance) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for row in m.matrix().row_iter() {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<SymmetricMatrixInstance> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| InvalidInput(format!("bad entry `{s}`: {e}"))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(InvalidInput(format!("{} is not a square matrix", path.display())).into());
    }
    let a = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let scale = a.amax().max(1.0);
    let asym = (&a - a.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(InvalidInput(format!("{} is not symmetric (max gap {asym:e})", path.display())).into());
    }
    Ok(SymmetricMatrixInstance::symmetrized(a)?)
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

pub fn read_matrix(path: &Path) -> Result<SymmetricMatrixInstance> {
    if is_csv(path) {
        read_csv(path)
    } else {
        read_mdnz(path)
    }
}

pub fn write_matrix(path: &Path, m: &SymmetricMatrixInstance) -> Result<()> {
    if is_csv(path) {
        write_csv(path, m)
    } else {
        write_mdnz(path, m)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct AtomDoc {
    x: f64,
    w: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct GridDoc {
    x: Vec<f64>,
    rho: Vec<f64>,
}

/// `{"atoms": [{"x", "w"}], "grid": {"x", "rho"}, "support": [[lo, hi]]}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct MeasureDoc {
    #[serde(default)]
    atoms: Vec<AtomDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grid: Option<GridDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    support: Option<Vec<[f64; 2]>>,
}

const EXPORT_NODES: usize = 2001;
const GRID_MASS_SLACK: f64 = 1e-3;

impl MeasureDoc {
    pub fn from_measure(m: &SpectralMeasure) -> Self {
        let atoms = m.atoms().iter().map(|a| AtomDoc { x: a.location, w: a.weight }).collect();
        let support: Vec<[f64; 2]> = m.support().iter().map(|i| [i.lo, i.hi]).collect();
        let grid = if let Some(g) = m.grid() {
            Some(GridDoc { x: g.x.clone(), rho: g.rho.clone() })
        } else if m.density().is_some() {
            let mut x = Vec::new();
            for iv in m.support() {
                let step = iv.width() / (EXPORT_NODES - 1) as f64;
                x.extend((0..EXPORT_NODES).map(|k| iv.lo + step * k as f64));
            }
            x.dedup_by(|a, b| *a <= *b);
            let rho = x.iter().map(|&t| m.density_at(t)).collect();
            Some(GridDoc { x, rho })
        } else {
            None
        };
        let support = grid.as_ref().map(|_| support);
        MeasureDoc { atoms, grid, support }
    }

    pub fn to_measure(&self) -> Result<SpectralMeasure> {
        let atoms = self.atoms.iter().map(|a| Atom { location: a.x, weight: a.w }).collect();
        let grid = match &self.grid {
            Some(g) => {
                let support = self.support.as_ref().map(|s| s.iter().map(|&[lo, hi]| Interval::new(lo, hi)).collect());
                let raw = Grid::new(g.x.clone(), g.rho.clone(), support.clone())?;
                // Tabulations lose a little mass at square-root edges.
                let want = 1.0 - self.atoms.iter().map(|a| a.w).sum::<f64>();
                let have = raw.trapezoid_mass();
                if !(have > 0.0) || ((have - want) / want).abs() > GRID_MASS_SLACK {
                    bail!(InvalidInput(format!("grid mass {have} does not match {want}")));
                }
                let rho = g.rho.iter().map(|r| r * want / have).collect();
                Some(Grid::new(g.x.clone(), rho, support)?)
            }
            None => None,
        };
        Ok(SpectralMeasure::from_parts(atoms, grid)?)
    }
}

pub fn read_measure(path: &Path) -> Result<SpectralMeasure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: MeasureDoc = serde_json::from_str(&text).map_err(|e| InvalidInput(format!("{}: {e}", path.display())))?;
    doc.to_measure()
}

pub fn write_measure(path: &Path, m: &SpectralMeasure) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(&MeasureDoc::from_measure(m))?)?;
    Ok(())
}

/// A spectral prior given either as shorthand or as a measure document.
#[derive(Debug, Clone)]
pub enum PriorSource {
    Spec(MeasureSpec),
    File(SpectralMeasure),
}

impl PriorSource {
    pub fn parse(s: &str) -> Result<Self> {
        if s.ends_with(".json") || Path::new(s).is_file() {
            return Ok(PriorSource::File(read_measure(Path::new(s))?));
        }
        match s.parse::<MeasureSpec>() {
            Ok(spec) => Ok(PriorSource::Spec(spec)),
            Err(e) => bail!(InvalidInput(e.to_string())),
        }
    }

    pub fn measure(&self) -> Result<SpectralMeasure> {
        Ok(match self {
            PriorSource::Spec(s) => s.measure()?,
            PriorSource::File(m) => m.clone(),
        })
    }

    /// Law of `sqrt(gamma) S + Z` for Wigner `Z`.
    pub fn rho_y(&self, gamma: f64) -> Result<SpectralMeasure> {
        Ok(match self {
            PriorSource::Spec(s) => s.rho_y(gamma)?,
            PriorSource::File(m) => mdenoise_core::measures::free_convolve_semicircle(&m.scaled(gamma.sqrt())?)?.0,
        })
    }

    pub fn spec(&self) -> Option<MeasureSpec> {
        match self {
            PriorSource::Spec(s) => Some(*s),
            PriorSource::File(_) => None,
        }
    }
}
