//! Seeded Monte-Carlo experiments over an (N, gamma, method) grid.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use anyhow::{Context, Result};
use mdenoise_core::ensembles::{
    derive_seed, observe_with, rank_for_alpha, sample_factor_signal, sample_rot_inv_signal_with, EigenvalueSource,
    NoiseKind, SymmetricMatrixInstance,
};
use mdenoise_core::estimators::{
    decimation_amp, mse, oracle, rie_linear, rie_sublinear, AmpOptions, HilbertMode, Method, Normalization,
};
use mdenoise_core::linalg::DenseBackend;
use mdenoise_core::measures::SpectralMeasure;
use mdenoise_core::theory::ScalarPrior;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::io::PriorSource;
use crate::specs::{parse_noise, parse_scalar_prior, sublinear_noise};
use crate::InvalidInput;

/// Sizes above this need `large = true`.
pub const LARGE_N: usize = 6000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignalKind {
    /// `S = X X^T / N` with i.i.d. factor entries.
    Factor,
    /// `M` Haar-rotated eigenvalues drawn from a spectral prior.
    Sublinear,
    /// `N` Haar-rotated eigenvalues drawn from a spectral prior.
    Linear,
}

/// Keys mirror the command-line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub signal: SignalKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default = "default_noise")]
    pub noise: String,
    pub gammas: Vec<f64>,
    pub sizes: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    pub methods: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<String>,
    #[serde(default = "default_hilbert")]
    pub hilbert: String,
    #[serde(default = "default_amp_tol")]
    pub amp_tol: f64,
    #[serde(default = "default_amp_max_iter")]
    pub amp_max_iter: usize,
}

fn default_noise() -> String {
    "wigner".into()
}
fn default_trials() -> usize {
    1
}
fn default_hilbert() -> String {
    "empirical".into()
}
fn default_amp_tol() -> f64 {
    AmpOptions::default().tol
}
fn default_amp_max_iter() -> usize {
    AmpOptions::default().max_iter
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| InvalidInput(format!("config: {e}")).into())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canon.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone)]
enum Signal {
    Factor { prior: ScalarPrior },
    Spectral { source: PriorSource, measure: SpectralMeasure, linear: bool },
}

/// Validated form of a config.
#[derive(Debug, Clone)]
pub struct Plan {
    config: ExperimentConfig,
    signal: Signal,
    noise: NoiseKind,
    methods: Vec<Method>,
    per_dim: bool,
    density_hilbert: bool,
}

fn bad(msg: impl Into<String>) -> anyhow::Error {
    InvalidInput(msg.into()).into()
}

impl Plan {
    pub fn new(config: ExperimentConfig, large: bool) -> Result<Self> {
        let c = &config;
        if c.sizes.is_empty() || c.sizes.iter().any(|&n| n < 8) {
            return Err(bad("sizes must be nonempty and every N >= 8"));
        }
        if !large && c.sizes.iter().any(|&n| n > LARGE_N) {
            return Err(bad(format!("N > {LARGE_N} needs --large")));
        }
        if c.gammas.is_empty() || c.gammas.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
            return Err(bad("gammas must be nonempty and positive"));
        }
        if c.trials == 0 {
            return Err(bad("trials must be at least 1"));
        }
        if let Some(a) = c.alpha {
            if !(a > 0.0 && a < 1.0) {
                return Err(bad("alpha must lie in (0, 1)"));
            }
        }
        if !(c.amp_tol > 0.0) || c.amp_max_iter == 0 {
            return Err(bad("amp-tol and amp-max-iter must be positive"));
        }
        let signal = match c.signal {
            SignalKind::Factor => {
                let p = c.prior.as_deref().ok_or_else(|| bad("factor signal needs `prior`"))?;
                Signal::Factor { prior: parse_scalar_prior(p)? }
            }
            SignalKind::Sublinear | SignalKind::Linear => {
                let s = c.spectrum.as_deref().ok_or_else(|| bad("spectral signal needs `spectrum`"))?;
                let source = PriorSource::parse(s)?;
                let measure = source.measure()?;
                Signal::Spectral { source, measure, linear: c.signal == SignalKind::Linear }
            }
        };
        if c.signal != SignalKind::Linear && c.alpha.is_none() && c.rank.is_none() {
            return Err(bad("sub-linear signals need `alpha` or `rank`"));
        }
        let noise = parse_noise(&c.noise)?;
        let methods = c
            .methods
            .iter()
            .map(|m| m.parse::<Method>().map_err(|e| bad(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        if methods.is_empty() {
            return Err(bad("at least one method is needed"));
        }
        if methods.contains(&Method::DecimationAmp) && !matches!(signal, Signal::Factor { .. }) {
            return Err(bad("dec-amp needs a factor signal"));
        }
        let per_dim = match c.normalization.as_deref() {
            None => c.signal == SignalKind::Linear,
            Some("per-dim") => true,
            Some("per-rank") => false,
            Some(o) => return Err(bad(format!("unknown normalization `{o}`"))),
        };
        let density_hilbert = match c.hilbert.as_str() {
            "empirical" => false,
            "density" => {
                if !matches!(noise, NoiseKind::Wigner) || !matches!(signal, Signal::Spectral { linear: true, .. }) {
                    return Err(bad("density Hilbert mode needs a linear spectral signal under Wigner noise"));
                }
                true
            }
            o => return Err(bad(format!("unknown hilbert mode `{o}`"))),
        };
        Ok(Plan { config, signal, noise, methods, per_dim, density_hilbert })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn rank(&self, n: usize) -> Result<usize> {
        if let Signal::Spectral { linear: true, .. } = self.signal {
            return Ok(n);
        }
        let m = match (self.config.rank, self.config.alpha) {
            (Some(m), _) => m,
            (None, Some(a)) => rank_for_alpha(n, a)?,
            (None, None) => unreachable!("validated"),
        };
        if m == 0 || m > n {
            return Err(bad(format!("rank {m} outside [1, {n}]")));
        }
        Ok(m)
    }
}

/// One trial of one method at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub n: usize,
    pub gamma: f64,
    pub method: String,
    pub trial: usize,
    pub seed: u64,
    pub mse: Option<f64>,
    pub error: Option<String>,
}

impl Cell {
    fn key(&self) -> (usize, u64, String, usize) {
        (self.n, self.gamma.to_bits(), self.method.clone(), self.trial)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub n: usize,
    pub gamma: f64,
    pub method: String,
    pub mean_mse: Option<f64>,
    pub stderr: Option<f64>,
    pub stddev: Option<f64>,
    pub trials: usize,
    pub seeds: String,
    pub error: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub version: String,
    pub wall_time_s: f64,
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub fn row(&self, n: usize, gamma: f64, method: Method) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.n == n && r.gamma == gamma && r.method == method.name())
    }
}

fn cell_seed(master: u64, n: usize, gamma: f64, trial: usize) -> u64 {
    derive_seed(master, trial as u64, &format!("n={n};gamma={:016x}", gamma.to_bits()))
}

struct TrialData {
    s: SymmetricMatrixInstance,
    y: SymmetricMatrixInstance,
    m: usize,
}

fn generate(plan: &Plan, n: usize, gamma: f64, seed: u64, backend: &dyn DenseBackend) -> Result<TrialData> {
    let m = plan.rank(n)?;
    let sig_seed = derive_seed(seed, 0, "signal");
    let s = match &plan.signal {
        Signal::Factor { prior } => sample_factor_signal(n, m, prior, sig_seed)?.s,
        Signal::Spectral { measure, .. } => {
            let src = EigenvalueSource::Draws { measure: measure.clone(), count: m };
            sample_rot_inv_signal_with(n, &src, sig_seed, backend)?
        }
    };
    let y = observe_with(&s, gamma, &plan.noise, derive_seed(seed, 0, "noise"), backend)?;
    Ok(TrialData { s, y, m })
}

fn score(
    plan: &Plan,
    data: &TrialData,
    gamma: f64,
    method: Method,
    seed: u64,
    rho_y: Option<&SpectralMeasure>,
    backend: &dyn DenseBackend,
) -> Result<f64> {
    let needs_eigen = method != Method::DecimationAmp;
    if needs_eigen {
        data.y.eigen_with(backend)?;
    }
    let estimate = match method {
        Method::RieLinear => {
            let mode = match rho_y {
                Some(r) => HilbertMode::Density(r),
                None => HilbertMode::Empirical,
            };
            rie_linear(&data.y, gamma, mode)?.estimate
        }
        Method::RieSublinear => rie_sublinear(&data.y, gamma, &sublinear_noise(&plan.noise))?.estimate,
        Method::Oracle => oracle(&data.y, &data.s)?.estimate,
        Method::DecimationAmp => {
            let Signal::Factor { prior } = &plan.signal else { unreachable!("validated") };
            let opts = AmpOptions {
                tol: plan.config.amp_tol,
                max_iter: plan.config.amp_max_iter,
                seed: derive_seed(seed, 0, "amp"),
                ..AmpOptions::default()
            };
            decimation_amp(&data.y, gamma, data.m, prior, &opts)?.estimate
        }
    };
    let norm = if plan.per_dim { Normalization::PerDim } else { Normalization::PerRank(data.m) };
    Ok(mse(&data.s, &estimate, norm)?)
}

/// Where a run keeps its outputs: `<stem>.csv`, `<stem>.json` and the
/// resumable per-trial log `<stem>.cells.jsonl`.
#[derive(Debug, Clone)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub cells: PathBuf,
}

impl OutputPaths {
    pub fn from_stem(stem: &Path) -> Self {
        let with = |ext: &str| {
            let mut s = stem.as_os_str().to_owned();
            s.push(ext);
            PathBuf::from(s)
        };
        OutputPaths { csv: with(".csv"), json: with(".json"), cells: with(".cells.jsonl") }
    }
}

#[derive(Serialize, Deserialize)]
struct CellsHeader {
    config_hash: String,
}

fn load_cells(path: &Path, hash: &str) -> Result<Vec<Cell>> {
    if !path.exists() {
        let mut f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        writeln!(f, "{}", serde_json::to_string(&CellsHeader { config_hash: hash.into() })?)?;
        return Ok(Vec::new());
    }
    let f = BufReader::new(fs::File::open(path)?);
    let mut lines = f.lines();
    let header: CellsHeader = match lines.next() {
        Some(l) => serde_json::from_str(&l?).map_err(|e| bad(format!("{}: {e}", path.display())))?,
        None => return Err(bad(format!("{} is empty", path.display()))),
    };
    if header.config_hash != hash {
        return Err(bad(format!(
            "{} belongs to config {} but this config hashes to {hash}; refusing to merge",
            path.display(),
            header.config_hash
        )));
    }
    let mut cells = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        // A torn final line from an interrupted run is dropped and redone.
        match serde_json::from_str::<Cell>(&line) {
            Ok(c) => cells.push(c),
            Err(_) => log::warn!("ignoring unreadable cell record"),
        }
    }
    Ok(cells)
}

fn aggregate(plan: &Plan, cells: &[Cell]) -> Vec<ReportRow> {
    let mut by_key: BTreeMap<(usize, u64, String), Vec<&Cell>> = BTreeMap::new();
    for c in cells {
        by_key.entry((c.n, c.gamma.to_bits(), c.method.clone())).or_default().push(c);
    }
    let mut rows = Vec::new();
    for &n in &plan.config.sizes {
        for &gamma in &plan.config.gammas {
            for method in &plan.methods {
                let mut group: Vec<&Cell> =
                    by_key.get(&(n, gamma.to_bits(), method.name().to_string())).cloned().unwrap_or_default();
                group.sort_by_key(|c| c.trial);
                group.dedup_by_key(|c| c.trial);
                let ok: Vec<f64> = group.iter().filter_map(|c| c.mse).collect();
                let errors: Vec<String> =
                    group.iter().filter_map(|c| c.error.as_ref().map(|e| format!("trial {}: {e}", c.trial))).collect();
                let k = ok.len();
                let mean = (k > 0).then(|| ok.iter().sum::<f64>() / k as f64);
                let stddev = mean.and_then(|m| {
                    (k > 1).then(|| (ok.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (k - 1) as f64).sqrt())
                });
                rows.push(ReportRow {
                    n,
                    gamma,
                    method: method.name().into(),
                    mean_mse: mean,
                    stderr: stddev.map(|s| s / (k as f64).sqrt()),
                    stddev,
                    trials: k,
                    seeds: group.iter().map(|c| c.seed.to_string()).collect::<Vec<_>>().join(";"),
                    error: errors.join("; "),
                });
            }
        }
    }
    rows
}

fn write_csv(path: &Path, rows: &[ReportRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs every missing cell of the grid and writes the reports.
pub fn run_experiment(plan: &Plan, paths: &OutputPaths, backend: &dyn DenseBackend) -> Result<ExperimentReport> {
    let start = Instant::now();
    let c = &plan.config;
    let hash = c.hash();
    let mut cells = load_cells(&paths.cells, &hash)?;
    let done: HashSet<_> = cells.iter().map(Cell::key).collect();

    let mut units = Vec::new();
    for &n in &c.sizes {
        for &gamma in &c.gammas {
            for trial in 0..c.trials {
                let pending: Vec<Method> = plan
                    .methods
                    .iter()
                    .copied()
                    .filter(|m| !done.contains(&(n, gamma.to_bits(), m.name().to_string(), trial)))
                    .collect();
                if !pending.is_empty() {
                    units.push((n, gamma, trial, pending));
                }
            }
        }
    }
    log::info!("{} trial units to run ({} already recorded)", units.len(), cells.len());

    let mut rho_cache: BTreeMap<u64, SpectralMeasure> = BTreeMap::new();
    if plan.density_hilbert {
        let Signal::Spectral { source, .. } = &plan.signal else { unreachable!("validated") };
        for &g in &c.gammas {
            rho_cache.insert(g.to_bits(), source.rho_y(g)?);
        }
    }

    let sink = Mutex::new((OpenOptions::new().append(true).open(&paths.cells)?, Vec::new()));
    units.par_iter().try_for_each(|(n, gamma, trial, pending)| -> Result<()> {
        let seed = cell_seed(c.seed, *n, *gamma, *trial);
        let data = generate(plan, *n, *gamma, seed, backend);
        for &method in pending {
            let outcome = match &data {
                Ok(d) => score(plan, d, *gamma, method, seed, rho_cache.get(&gamma.to_bits()), backend),
                Err(e) => Err(anyhow::anyhow!("{e:#}")),
            };
            let cell = Cell {
                n: *n,
                gamma: *gamma,
                method: method.name().into(),
                trial: *trial,
                seed,
                mse: outcome.as_ref().ok().copied(),
                error: outcome.as_ref().err().map(|e| format!("{e:#}")),
            };
            log::info!("N={n} gamma={gamma} {method} trial {trial}: {:?}", cell.mse);
            let mut guard = sink.lock().expect("cell sink");
            writeln!(guard.0, "{}", serde_json::to_string(&cell)?)?;
            guard.0.flush()?;
            guard.1.push(cell);
        }
        Ok(())
    })?;
    cells.extend(sink.into_inner().expect("cell sink").1);

    let rows = aggregate(plan, &cells);
    write_csv(&paths.csv, &rows)?;
    let report = ExperimentReport {
        config: c.clone(),
        config_hash: hash,
        version: env!("CARGO_PKG_VERSION").into(),
        wall_time_s: start.elapsed().as_secs_f64(),
        rows,
    };
    fs::write(&paths.json, serde_json::to_string_pretty(&report)?)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::LapackBackend;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig::from_toml(
            r#"
            signal = "factor"
            prior = "gaussian"
            alpha = 0.5
            gammas = [3.0]
            sizes = [64]
            trials = 2
            seed = 9
            methods = ["rie-sublinear", "oracle", "dec-amp"]
            "#,
        )
        .unwrap()
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut c = small_config();
        c.sizes = vec![4];
        assert!(Plan::new(c, false).is_err());
        let mut c = small_config();
        c.sizes = vec![7000];
        assert!(Plan::new(c.clone(), false).is_err());
        assert!(Plan::new(c, true).is_ok());
        let mut c = small_config();
        c.methods = vec!["magic".into()];
        assert!(Plan::new(c, false).is_err());
        assert!(ExperimentConfig::from_toml("signal = \"factor\"\nbogus = 1").is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = small_config();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.trials = 3;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn runs_and_resumes() {
        let dir = tempfile::tempdir().unwrap();
        let paths = OutputPaths::from_stem(&dir.path().join("run"));
        let plan = Plan::new(small_config(), false).unwrap();
        let first = run_experiment(&plan, &paths, &LapackBackend).unwrap();
        let csv1 = fs::read(&paths.csv).unwrap();
        assert_eq!(first.rows.len(), 3);
        assert!(first.rows.iter().all(|r| r.trials == 2 && r.error.is_empty()));
        let second = run_experiment(&plan, &paths, &LapackBackend).unwrap();
        assert_eq!(fs::read(&paths.csv).unwrap(), csv1);
        assert_eq!(first.rows, second.rows);

        let mut other = small_config();
        other.seed = 10;
        let plan = Plan::new(other, false).unwrap();
        assert!(run_experiment(&plan, &paths, &LapackBackend).is_err());
    }
}
