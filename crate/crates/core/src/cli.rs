//! Command implementations: CHSH sweeps, histograms, validation and raw
//! sample dumps. Every file written carries a manifest that is enough to
//! reproduce it; CSV files get it as a `<output>.manifest.json` sidecar.

use std::fmt::Write as _;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::observables::ChshCurvePoint;
use crate::phase::{ModeIndex, MODES};
use crate::sampler::{PairNumber, SamplerKind};
use crate::sim::{chsh_sweep, histogram_run, theta_grid, thread_pool, HistogramRun, SampleSource, Variable};
use crate::stats::{Axis, CorrelationEstimate};
use crate::validate::{run_validation, Check, ValidateOptions};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const DEFAULT_DUMP_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: u64,
    pub pairs: PairNumber,
    pub sampler: SamplerKind,
    pub theta_min: f64,
    pub theta_max: f64,
    pub theta_steps: usize,
    pub workers: usize,
    /// `None` or `-` writes to stdout.
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            samples: 2_000_000,
            pairs: PairNumber::ONE,
            sampler: SamplerKind::Exact,
            theta_min: 0.0,
            theta_max: std::f64::consts::FRAC_PI_2,
            theta_steps: 25,
            workers: default_workers(),
            output: None,
            format: Format::Csv,
        }
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::config("samples must be at least 1"));
        }
        if self.workers == 0 {
            return Err(Error::config("workers must be at least 1"));
        }
        theta_grid(self.theta_min, self.theta_max, self.theta_steps)?;
        Ok(())
    }

    pub fn source(&self) -> SampleSource {
        SampleSource::new(self.seed, self.pairs, self.sampler)
    }

    fn to_stdout(&self) -> bool {
        self.output.as_deref().is_none_or(|p| p == Path::new("-"))
    }
}

pub fn manifest(command: &str, cfg: &RunConfig, extra: Value) -> Value {
    json!({
        "tool": TOOL,
        "version": VERSION,
        "command": command,
        "config": cfg,
        "grid": theta_grid(cfg.theta_min, cfg.theta_max, cfg.theta_steps).ok(),
        "parameters": extra,
    })
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn json_f64(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Write via a temporary file in the target directory and rename into place,
/// so a failed run never leaves a partial file behind.
pub fn write_atomic<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        body(&mut w)?;
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn emit<F>(cfg: &RunConfig, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match &cfg.output {
        Some(p) if !cfg.to_stdout() => write_atomic(p, body),
        _ => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)?;
            lock.flush().map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn emit_manifest_sidecar(cfg: &RunConfig, manifest: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(manifest)?;
    match &cfg.output {
        Some(p) if !cfg.to_stdout() => {
            let mut side = p.as_os_str().to_owned();
            side.push(".manifest.json");
            write_atomic(Path::new(&side), |w| {
                writeln!(w, "{text}").map_err(|e| Error::io(p, e))
            })
        }
        _ => {
            eprintln!("{text}");
            Ok(())
        }
    }
}

fn io_err(e: io::Error) -> Error {
    Error::io("<output>", e)
}

// --- chsh -------------------------------------------------------------------

pub const CHSH_COLUMNS: [&str; 13] = [
    "theta",
    "delta_mean",
    "delta_stderr",
    "delta_imag_mean",
    "delta_theory",
    "c_ab",
    "c_ab_stderr",
    "c_apb",
    "c_apb_stderr",
    "c_abp",
    "c_abp_stderr",
    "c_apbp",
    "c_apbp_stderr",
];

pub fn run_chsh(cfg: &RunConfig) -> Result<Vec<ChshCurvePoint>> {
    cfg.validate()?;
    let pool = thread_pool(cfg.workers)?;
    let grid = theta_grid(cfg.theta_min, cfg.theta_max, cfg.theta_steps)?;
    Ok(chsh_sweep(&pool, &cfg.source(), &grid, cfg.samples))
}

fn chsh_row(p: &ChshCurvePoint) -> [f64; 13] {
    let c = &p.correlations;
    [
        p.theta,
        p.delta_mean(),
        p.delta_stderr(),
        p.delta_imag_mean(),
        p.delta_theory,
        c[0].mean.re,
        c[0].stderr_re(),
        c[1].mean.re,
        c[1].stderr_re(),
        c[2].mean.re,
        c[2].stderr_re(),
        c[3].mean.re,
        c[3].stderr_re(),
    ]
}

/// Header plus one line per sweep point.
pub fn chsh_csv(points: &[ChshCurvePoint]) -> String {
    let mut out = CHSH_COLUMNS.join(",");
    out.push('\n');
    for p in points {
        let row: Vec<String> = chsh_row(p).iter().map(|&x| fmt_f64(x)).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

fn estimate_json(e: &CorrelationEstimate) -> Value {
    json!({
        "count": e.count,
        "mean_real": json_f64(e.mean.re),
        "mean_imag": json_f64(e.mean.im),
        "stderr_real": e.stderr_real.map(json_f64),
        "stderr_imag": e.stderr_imag.map(json_f64),
    })
}

pub fn chsh_json(points: &[ChshCurvePoint], manifest: Value) -> Value {
    let rows: Vec<Value> = points
        .iter()
        .map(|p| {
            let mut row = serde_json::Map::new();
            for (name, x) in CHSH_COLUMNS.iter().zip(chsh_row(p)) {
                row.insert((*name).into(), json_f64(x));
            }
            row.insert("delta".into(), estimate_json(&p.delta));
            row.insert(
                "mode_numbers".into(),
                ModeIndex::ALL
                    .iter()
                    .zip(&p.numbers)
                    .map(|(m, e)| (m.label().to_string(), estimate_json(e)))
                    .collect::<serde_json::Map<_, _>>()
                    .into(),
            );
            Value::Object(row)
        })
        .collect();
    json!({ "manifest": manifest, "rows": rows })
}

pub fn cmd_chsh(cfg: &RunConfig) -> Result<Vec<ChshCurvePoint>> {
    let points = run_chsh(cfg)?;
    let manifest = manifest("chsh", cfg, json!({ "angle_convention": "A=0, A'=2θ, B=θ, B'=-θ" }));
    match cfg.format {
        Format::Csv => {
            let body = chsh_csv(&points);
            emit(cfg, |w| w.write_all(body.as_bytes()).map_err(io_err))?;
            emit_manifest_sidecar(cfg, &manifest)?;
        }
        Format::Json => {
            let doc = chsh_json(&points, manifest);
            emit(cfg, |w| {
                serde_json::to_writer_pretty(&mut *w, &doc)?;
                writeln!(w).map_err(io_err)
            })?;
        }
    }
    Ok(points)
}

// --- hist -------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct HistConfig {
    pub variables: Vec<Variable>,
    pub bins: usize,
    pub range_min: f64,
    pub range_max: f64,
}

impl Default for HistConfig {
    fn default() -> Self {
        HistConfig {
            variables: vec![
                Variable::Spin { site: crate::phase::Site::A, theta: 0.0 },
                Variable::Correlation { theta_a: 0.0, theta_b: 0.0 },
            ],
            bins: 101,
            range_min: -4.0,
            range_max: 4.0,
        }
    }
}

pub fn run_hist(cfg: &RunConfig, hist: &HistConfig) -> Result<HistogramRun> {
    cfg.validate()?;
    let axis = Axis::new(hist.bins, hist.range_min, hist.range_max)?;
    let pool = thread_pool(cfg.workers)?;
    histogram_run(&pool, &cfg.source(), &hist.variables, axis, cfg.samples)
}

pub fn hist_json(run: &HistogramRun, manifest: Value) -> Value {
    let h = &run.histogram;
    let variables: Vec<Value> = run
        .variables
        .iter()
        .zip(&run.estimates)
        .enumerate()
        .map(|(k, (v, e))| {
            json!({
                "descriptor": v.describe(),
                "binned": "real part",
                "mean_real": json_f64(e.mean.re),
                "mean_imag": json_f64(e.mean.im),
                "stderr_real": e.stderr_real.map(json_f64),
                "stderr_imag": e.stderr_imag.map(json_f64),
                "out_of_bounds": run.out_of_bounds[k],
                "out_of_bounds_fraction": json_f64(run.out_of_bounds_fraction(k)),
            })
        })
        .collect();
    let shape: Vec<usize> = std::iter::once(h.x.bins).chain(h.y.map(|a| a.bins)).collect();
    json!({
        "manifest": manifest,
        "variables": variables,
        "bin_edges_x": h.x.edges(),
        "bin_edges_y": h.y.map(|a| a.edges()),
        "shape": shape,
        "counts": h.counts,
        "overflow": {
            "total": h.overflow,
            "below_x": h.below_x,
            "above_x": h.above_x,
            "below_y": h.below_y,
            "above_y": h.above_y,
        },
        "samples": run.samples,
    })
}

pub fn cmd_hist(cfg: &RunConfig, hist: &HistConfig) -> Result<HistogramRun> {
    if cfg.format != Format::Json {
        return Err(Error::config("histograms are written as JSON; pass --format json"));
    }
    let run = run_hist(cfg, hist)?;
    let descriptors: Vec<String> = hist.variables.iter().map(Variable::describe).collect();
    let manifest = manifest(
        "hist",
        cfg,
        json!({
            "variables": descriptors,
            "bins": hist.bins,
            "range": [hist.range_min, hist.range_max],
        }),
    );
    let doc = hist_json(&run, manifest);
    emit(cfg, |w| {
        serde_json::to_writer_pretty(&mut *w, &doc)?;
        writeln!(w).map_err(io_err)
    })?;
    Ok(run)
}

// --- validate ---------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

pub fn run_validate(cfg: &RunConfig, jacobian: f64) -> Result<ValidationReport> {
    cfg.validate()?;
    let pool = thread_pool(cfg.workers)?;
    let opts = ValidateOptions {
        seed: cfg.seed,
        samples: cfg.samples.max(2),
        pairs: cfg.pairs,
        jacobian,
    };
    let checks = run_validation(&pool, &opts)?;
    Ok(ValidationReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

pub fn cmd_validate(cfg: &RunConfig, jacobian: f64) -> Result<ValidationReport> {
    let report = run_validate(cfg, jacobian)?;
    let manifest = manifest("validate", cfg, json!({ "jacobian": jacobian }));
    match cfg.format {
        Format::Json => {
            let doc = json!({ "manifest": manifest, "passed": report.passed, "checks": report.checks });
            emit(cfg, |w| {
                serde_json::to_writer_pretty(&mut *w, &doc)?;
                writeln!(w).map_err(io_err)
            })?;
        }
        Format::Csv => {
            let mut body = String::from("name,measured,expected,score,tolerance,metric,passed\n");
            for c in &report.checks {
                let _ = writeln!(
                    body,
                    "{},{},{},{},{},{},{}",
                    c.name,
                    fmt_f64(c.measured),
                    fmt_f64(c.expected),
                    fmt_f64(c.score),
                    fmt_f64(c.tolerance),
                    c.metric,
                    c.passed
                );
            }
            emit(cfg, |w| w.write_all(body.as_bytes()).map_err(io_err))?;
            emit_manifest_sidecar(cfg, &manifest)?;
        }
    }
    Ok(report)
}

// --- dump -------------------------------------------------------------------

pub fn dump_columns() -> Vec<String> {
    let mut cols = vec!["index".to_string()];
    for half in ["alpha", "beta"] {
        for m in ModeIndex::ALL {
            for part in ["re", "im"] {
                cols.push(format!("{half}_{}_{part}", m.label()));
            }
        }
    }
    cols
}

const DUMP_BLOCK: u64 = 1 << 16;

pub fn cmd_dump(cfg: &RunConfig, cap: u64) -> Result<()> {
    cfg.validate()?;
    if cfg.samples > cap {
        return Err(Error::config(format!("dump of {} samples exceeds cap {cap}", cfg.samples)));
    }
    let pool = thread_pool(cfg.workers)?;
    let source = cfg.source();
    let manifest = manifest("dump", cfg, json!({ "cap": cap }));
    let columns = dump_columns();
    let format = cfg.format;

    let body = |w: &mut dyn Write| -> Result<()> {
        match format {
            Format::Csv => writeln!(w, "{}", columns.join(",")).map_err(io_err)?,
            Format::Json => {
                write!(w, "{{\"manifest\":{},\"columns\":{},\"rows\":[", manifest, json!(columns)).map_err(io_err)?
            }
        }
        let mut start = 0;
        while start < cfg.samples {
            let end = (start + DUMP_BLOCK).min(cfg.samples);
            let points: Vec<_> = pool.install(|| {
                use rayon::prelude::*;
                (start..end).into_par_iter().map(|i| source.sample(i)).collect()
            });
            for (i, p) in (start..end).zip(points) {
                let coords = p.coordinates();
                let fields: Vec<String> = coords.iter().map(|&x| fmt_f64(x)).collect();
                match format {
                    Format::Csv => writeln!(w, "{i},{}", fields.join(",")),
                    Format::Json => {
                        let sep = if i == 0 { "" } else { "," };
                        write!(w, "{sep}\n[{i},{}]", fields.join(","))
                    }
                }
                .map_err(io_err)?;
            }
            start = end;
        }
        if format == Format::Json {
            writeln!(w, "\n]}}").map_err(io_err)?;
        }
        Ok(())
    };
    emit(cfg, body)?;
    if format == Format::Csv {
        emit_manifest_sidecar(cfg, &manifest)?;
    }
    debug_assert_eq!(columns.len(), 1 + 4 * MODES);
    Ok(())
}
