//! Command-line front end: config resolution, the six commands, and CSV/JSON/SVG artifacts.

mod svg;

use crate::bohr_sommerfeld::{
    antichiral_component_spectrum, antichiral_levels, antichiral_levels_harmonic, antichiral_series, cell_saddle, f_table, nearest_gap, tau_grid,
    OrbitTolerance,
};
use crate::error::Error;
use crate::models::{
    antichiral_minima, antichiral_wells, block11, chiral_d_harper, chiral_d_lowenergy, chiral_harper_squared, chiral_lowenergy_squared, find_wells,
    harper_symbol, lowenergy_symbol, zero_set_curves, ModelParams, WellSearch,
};
use crate::spectra::{band_sweep, directed_hausdorff, flatness, lowenergy_bloch, lowenergy_window, tight_binding_bloch, uniform_grid, BandStructure};
use crate::symbol::{det, PhaseSpaceSymbol};
use crate::verify::{run_criterion, Report, CRITERIA};
use crate::wkb::{chiral_well_at, eigenvalue_ordering, resonant_expansion, wkb_recurrence, WellModel, WkbExpansion};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// `git describe` of the build, or the package version outside a checkout.
pub const VERSION: &str = env!("MOIRE_VERSION");

/// Environment variable overriding the output directory of file and config.
pub const OUT_DIR_ENV: &str = "MOIRE_WELLS_OUT";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Harper,
    Lowenergy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Limit {
    Chiral,
    Antichiral,
    General,
}

/// Every knob of every command. Flags override the JSON file given by `--config`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    #[arg(long, value_enum)]
    pub limit: Option<Limit>,
    #[arg(long)]
    pub w0: Option<f64>,
    #[arg(long)]
    pub w1: Option<f64>,
    #[arg(long = "k-perp")]
    pub k_perp: Option<f64>,
    /// Semiclassical parameter, decimal or exact "p/q".
    #[arg(long)]
    pub h: Option<String>,
    /// Discrete model size L = p/q, so h = 1/(2πL).
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub l: Option<String>,
    /// Fourier truncation N of the low-energy model (modes |n| ≤ N).
    #[arg(long)]
    pub trunc: Option<usize>,
    /// Quasimomentum grid size.
    #[arg(long)]
    pub nk: Option<usize>,
    /// Bands plotted on each side of zero.
    #[arg(long)]
    pub bands: Option<usize>,
    /// Contour grid resolution.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Well position "x,xi" (each decimal or p/q).
    #[arg(long)]
    pub well: Option<String>,
    /// Harmonic index of the WKB level.
    #[arg(long)]
    pub n: Option<usize>,
    /// WKB order ℓ (expansion to h^ℓ).
    #[arg(long)]
    pub order: Option<usize>,
    /// Anti-chiral diagonal entry j (1..4); all four when absent.
    #[arg(long)]
    pub j: Option<usize>,
    /// Highest ladder index for Bohr–Sommerfeld levels.
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Number of τ samples in the Bohr–Sommerfeld table.
    #[arg(long)]
    pub taus: Option<usize>,
    /// "all" or a comma-separated list of criterion numbers.
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long = "out")]
    pub out_dir: Option<String>,
}

impl RunConfig {
    /// Fields set in `self` win over `base`.
    pub fn overlay(self, base: RunConfig) -> RunConfig {
        RunConfig {
            model: self.model.or(base.model),
            limit: self.limit.or(base.limit),
            w0: self.w0.or(base.w0),
            w1: self.w1.or(base.w1),
            k_perp: self.k_perp.or(base.k_perp),
            h: self.h.or(base.h),
            l: self.l.or(base.l),
            trunc: self.trunc.or(base.trunc),
            nk: self.nk.or(base.nk),
            bands: self.bands.or(base.bands),
            grid: self.grid.or(base.grid),
            well: self.well.or(base.well),
            n: self.n.or(base.n),
            order: self.order.or(base.order),
            j: self.j.or(base.j),
            kmax: self.kmax.or(base.kmax),
            taus: self.taus.or(base.taus),
            suite: self.suite.or(base.suite),
            out_dir: self.out_dir.or(base.out_dir),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "moire-wells", version = VERSION, about = "Semiclassical spectra of twisted bilayer moiré models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Invocation {
    /// JSON file with RunConfig fields; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub flags: RunConfig,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Band structure CSV/SVG over the Bloch quasimomentum.
    Bands(Invocation),
    /// Locate and classify wells.
    Wells(Invocation),
    /// Determinant of the principal symbol on the torus and its zero set.
    Contour(Invocation),
    /// WKB eigenvalue expansion at a chiral well.
    Wkb(Invocation),
    /// Run the acceptance suite.
    Verify(Invocation),
    /// Bohr–Sommerfeld tables and levels for the anti-chiral entries.
    Bs(Invocation),
}

/// Failure classes mapped onto exit codes 1, 2, 3.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(Error),
    Acceptance(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Acceptance(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
            CliError::Acceptance(n) => write!(f, "{n} acceptance criteria failed"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) | Error::InvalidParams(m) => CliError::Config(m),
            Error::NotCoprime { p, q } => CliError::Config(format!("L needs coprime p/q, got {p}/{q}")),
            Error::Io(e) => CliError::Config(format!("i/o: {e}")),
            Error::Json(e) => CliError::Config(format!("json: {e}")),
            other => CliError::Numerical(other),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn config_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

/// Exact rational or decimal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Number {
    Ratio(i64, i64),
    Real(f64),
}

impl Number {
    pub fn value(self) -> f64 {
        match self {
            Number::Ratio(p, q) => p as f64 / q as f64,
            Number::Real(v) => v,
        }
    }
}

/// Parses "p/q" exactly, otherwise a decimal.
pub fn parse_number(s: &str) -> CliResult<Number> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| CliError::Config(format!("bad numerator in {s:?}")))?;
        let q: i64 = q.trim().parse().map_err(|_| CliError::Config(format!("bad denominator in {s:?}")))?;
        if q == 0 {
            return config_err(format!("zero denominator in {s:?}"));
        }
        let g = gcd(p, q);
        let sign = if q < 0 { -1 } else { 1 };
        return Ok(Number::Ratio(sign * p / g, sign * q / g));
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Number::Real(v)),
        _ => config_err(format!("not a number: {s:?}")),
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Resolved semiclassical scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scale {
    H(Number),
    /// `L = p/q` with `h = 1/(2πL)`.
    L(i64, i64),
}

impl Scale {
    pub fn h(self) -> f64 {
        match self {
            Scale::H(n) => n.value(),
            Scale::L(p, q) => q as f64 / (2.0 * PI * p as f64),
        }
    }
}

/// A validated configuration with all defaults filled in.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub config: RunConfig,
    pub model: Model,
    pub limit: Limit,
    pub params: ModelParams,
    pub scale: Option<Scale>,
    pub out_dir: PathBuf,
}

/// Merge file and flags, fill defaults and validate.
pub fn resolve(flags: RunConfig, file: Option<&Path>, env_out: Option<String>) -> CliResult<Resolved> {
    let base = match file {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => RunConfig::default(),
    };
    let flag_out = flags.out_dir.clone();
    let mut c = flags.overlay(base);
    c.out_dir = flag_out.or(env_out).or(c.out_dir).or(Some("out".into()));

    let model = *c.model.get_or_insert(Model::Harper);
    let limit = *c.limit.get_or_insert(Limit::Chiral);
    let (w0, w1) = match limit {
        Limit::Chiral => (*c.w0.get_or_insert(0.0), *c.w1.get_or_insert(1.0)),
        Limit::Antichiral => (*c.w0.get_or_insert(1.0), *c.w1.get_or_insert(0.0)),
        Limit::General => (*c.w0.get_or_insert(0.7), *c.w1.get_or_insert(1.0)),
    };
    if limit == Limit::Chiral && w0 != 0.0 {
        return config_err("the chiral limit has w0 = 0");
    }
    if limit == Limit::Antichiral && w1 != 0.0 {
        return config_err("the anti-chiral limit has w1 = 0");
    }
    if limit == Limit::General && (w0 == 0.0 || w1 == 0.0) {
        return config_err("the general limit needs nonzero w0 and w1");
    }
    if !(w0 >= 0.0 && w1 >= 0.0) {
        return config_err("couplings must be nonnegative");
    }
    let k_perp = *c.k_perp.get_or_insert(0.0);

    let scale = match (&c.h, &c.l) {
        (Some(_), Some(_)) => return config_err("give exactly one of h and L"),
        (Some(h), None) => {
            let n = parse_number(h)?;
            if n.value() <= 0.0 {
                return config_err("h must be positive");
            }
            Some(Scale::H(n))
        }
        (None, Some(l)) => {
            if model != Model::Harper {
                return config_err("L belongs to the discrete (harper) model; use h for lowenergy");
            }
            match parse_number(l)? {
                Number::Ratio(p, q) if p > 0 => Some(Scale::L(p, q)),
                Number::Real(v) if v > 0.0 && v.fract() == 0.0 => Some(Scale::L(v as i64, 1)),
                _ => return config_err("L must be a positive integer or ratio p/q"),
            }
        }
        (None, None) => None,
    };
    if let Some(nk) = c.nk {
        if nk == 0 {
            return config_err("empty k-grid (nk = 0)");
        }
    }
    let h = scale.map_or(1.0 / 60.0, Scale::h);
    let params = ModelParams { w0, w1, k_perp, k_x: 0.0, h };
    let out_dir = PathBuf::from(c.out_dir.clone().unwrap_or_default());
    Ok(Resolved { config: c, model, limit, params, scale, out_dir })
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    let env_out = std::env::var(OUT_DIR_ENV).ok().filter(|s| !s.is_empty());
    let (inv, cmd): (&Invocation, fn(&Resolved) -> CliResult<()>) = match &cli.command {
        Command::Bands(i) => (i, cmd_bands),
        Command::Wells(i) => (i, cmd_wells),
        Command::Contour(i) => (i, cmd_contour),
        Command::Wkb(i) => (i, cmd_wkb),
        Command::Verify(i) => (i, cmd_verify),
        Command::Bs(i) => (i, cmd_bs),
    };
    let r = resolve(inv.flags.clone(), inv.config.as_deref(), env_out)?;
    cmd(&r)
}

fn header(r: &Resolved, command: &str) -> Value {
    json!({ "command": command, "version": VERSION, "config": r.config, "h": r.scale.map(Scale::h) })
}

fn write_file(r: &Resolved, name: &str, body: &str) -> CliResult<PathBuf> {
    std::fs::create_dir_all(&r.out_dir).map_err(|e| CliError::Config(format!("{}: {e}", r.out_dir.display())))?;
    let path = r.out_dir.join(name);
    std::fs::write(&path, body).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(path)
}

fn write_json(r: &Resolved, name: &str, v: &Value) -> CliResult<PathBuf> {
    let mut s = serde_json::to_string_pretty(v).map_err(Error::from)?;
    s.push('\n');
    write_file(r, name, &s)
}

/// CSV with the resolved config and version as leading comment lines.
fn csv_with_header(r: &Resolved, command: &str, columns: &[String], rows: &[Vec<f64>]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {}", serde_json::to_string(&header(r, command)).unwrap_or_default());
    let _ = writeln!(s, "{}", columns.join(","));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    s
}

fn require_scale(r: &Resolved) -> CliResult<Scale> {
    r.scale.ok_or_else(|| CliError::Config("give h (lowenergy) or L (harper)".into()))
}

fn cmd_bands(r: &Resolved) -> CliResult<()> {
    let scale = require_scale(r)?;
    let h = scale.h();
    let nb = r.config.bands.unwrap_or(4);
    let (bs, axis, builder_size, truncation_shift) = match (r.model, scale) {
        (Model::Lowenergy, _) => {
            let n = r.config.trunc.unwrap_or_else(|| lowenergy_window(h));
            let nk = r.config.nk.unwrap_or(24);
            let ks = uniform_grid(0.0, 2.0 * PI * h, nk);
            let bs = band_sweep(|k| lowenergy_bloch(k, h, n, &r.params), &ks, Value::Null)?;
            // sensitivity of the bands nearest zero to a larger window
            let a = near_zero(&lowenergy_bloch(0.0, h, n, &r.params)?.eigenvalues()?, 2 * nb);
            let b = lowenergy_bloch(0.0, h, n + n / 4 + 1, &r.params)?.eigenvalues()?;
            let shift = directed_hausdorff(&a, &b);
            (bs, "k_x/h", 2 * (2 * n + 1), shift)
        }
        (Model::Harper, Scale::L(p, q)) => {
            let nk = r.config.nk.unwrap_or(48);
            let ks = uniform_grid(0.0, 2.0 * PI, nk);
            let bs = band_sweep(|k| tight_binding_bloch(q, p, k, &r.params), &ks, Value::Null)?;
            (bs, "k_x", 4 * p as usize, 0.0)
        }
        (Model::Harper, Scale::H(_)) => return config_err("harper bands need L (the supercell is L = p/q sites)"),
    };
    if bs.k.is_empty() {
        return config_err("empty k-grid");
    }
    let xs: Vec<f64> = match r.model {
        Model::Lowenergy => bs.k.iter().map(|k| k / h).collect(),
        Model::Harper => bs.k.clone(),
    };
    let shown = bands_near_zero(&bs, nb);
    let above = bs.bands_above_zero(2);
    let flat: Vec<Value> = above.iter().map(|&b| json!(flatness(&bs, b, h))).collect();

    let mut columns = vec![axis.replace('/', "_over_")];
    columns.extend(shown.iter().map(|b| format!("band_{b}")));
    let rows: Vec<Vec<f64>> = (0..bs.k.len()).map(|i| std::iter::once(xs[i]).chain(shown.iter().map(|&b| bs.bands[i][b])).collect()).collect();
    write_file(r, "bands.csv", &csv_with_header(r, "bands", &columns, &rows))?;

    let series: Vec<Vec<(f64, f64)>> = shown.iter().map(|&b| xs.iter().zip(bs.band(b)).map(|(&x, y)| (x, y)).collect()).collect();
    let title = format!("{:?} {:?} bands, h = {h:.5}", r.model, r.limit).to_lowercase();
    write_file(r, "bands.svg", &svg::line_plot(&title, axis, "energy", &series, &header(r, "bands")))?;

    let mut meta = header(r, "bands");
    meta["matrix_size"] = json!(builder_size);
    meta["band_count"] = json!(bs.band_count());
    meta["plotted_bands"] = json!(shown);
    meta["flatness_above_zero"] = json!(flat);
    meta["truncation_shift"] = json!(truncation_shift);
    write_json(r, "bands.json", &meta)?;
    Ok(())
}

fn near_zero(ev: &[f64], count: usize) -> Vec<f64> {
    let mut v = ev.to_vec();
    v.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    v.truncate(count);
    v.sort_by(f64::total_cmp);
    v
}

/// Indices of the `nb` bands on each side of zero.
fn bands_near_zero(bs: &BandStructure, nb: usize) -> Vec<usize> {
    let first_above = bs.bands_above_zero(1).first().copied().unwrap_or(bs.band_count());
    let lo = first_above.saturating_sub(nb);
    let hi = (first_above + nb).min(bs.band_count());
    (lo..hi).collect()
}

fn well_model(r: &Resolved) -> WellModel {
    match r.model {
        Model::Harper => WellModel::Harper,
        Model::Lowenergy => WellModel::LowEnergy,
    }
}

fn chiral_square(r: &Resolved) -> CliResult<PhaseSpaceSymbol> {
    Ok(block11(&match r.model {
        Model::Harper => chiral_harper_squared(&r.params)?,
        Model::Lowenergy => chiral_lowenergy_squared(&r.params)?,
    }))
}

fn cmd_wells(r: &Resolved) -> CliResult<()> {
    let mut out = header(r, "wells");
    match r.limit {
        Limit::Chiral => {
            let name = format!("{:?}", r.model).to_lowercase();
            let wells = find_wells(&chiral_square(r)?, &name, &WellSearch::default())?;
            out["wells"] = json!(wells);
        }
        Limit::Antichiral if r.model == Model::Harper => {
            let pos = antichiral_wells(r.params.k_perp)?;
            let c = antichiral_minima(r.params.w0);
            out["wells"] = json!((0..4).map(|j| json!({ "j": j + 1, "x0": pos[j].0, "xi0": pos[j].1, "c_j": c[j] })).collect::<Vec<_>>());
        }
        _ => return config_err("wells are classified for both chiral models and the anti-chiral harper model"),
    }
    write_json(r, "wells.json", &out)?;
    Ok(())
}

fn cmd_contour(r: &Resolved) -> CliResult<()> {
    let n = r.config.grid.unwrap_or(200);
    if n < 4 {
        return config_err("contour grid needs at least 4 points");
    }
    let (xr, yr, periodic) = match r.model {
        Model::Harper => ((-0.5, 0.5), (-0.5, 0.5), true),
        Model::Lowenergy => ((-0.5, 0.5), (-0.5, 0.5), false),
    };
    let det_fn: Box<dyn Fn(f64, f64) -> f64 + Sync> = match (r.limit, r.model) {
        (Limit::Chiral, Model::Harper) => {
            let d = chiral_d_harper(&r.params);
            Box::new(move |x, xi| d.det_principal(x, xi))
        }
        (Limit::Chiral, Model::Lowenergy) => {
            let d = chiral_d_lowenergy(&r.params);
            Box::new(move |x, xi| d.det_principal(x, xi))
        }
        (_, Model::Harper) => {
            let s = harper_symbol(&r.params);
            Box::new(move |x, xi| det(&s.eval_principal(x, xi)).re)
        }
        (_, Model::Lowenergy) => {
            let s = lowenergy_symbol(&r.params);
            Box::new(move |x, xi| det(&s.eval_principal(x, xi)).re)
        }
    };
    let curves = zero_set_curves(&det_fn, xr, yr, n, periodic);
    let hx = (xr.1 - xr.0) / n as f64;
    let hy = (yr.1 - yr.0) / n as f64;
    let mut rows = Vec::with_capacity(n * n);
    let mut grid = vec![vec![0.0; n]; n];
    for (i, row) in grid.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let (x, xi) = (xr.0 + hx * i as f64, yr.0 + hy * j as f64);
            let d = det_fn(x, xi);
            let l = d.abs().max(1e-300).log10();
            *cell = l;
            rows.push(vec![x, xi, d, l]);
        }
    }
    let cols: Vec<String> = ["x", "xi", "det", "log10_abs_det"].iter().map(|s| s.to_string()).collect();
    write_file(r, "contour.csv", &csv_with_header(r, "contour", &cols, &rows))?;
    let title = format!("log10|det| ({:?}, {:?})", r.model, r.limit).to_lowercase();
    write_file(r, "contour.svg", &svg::heatmap(&title, "x", "xi", xr, yr, &grid, &curves, &header(r, "contour")))?;
    let mut meta = header(r, "contour");
    meta["grid"] = json!(n);
    meta["zero_set_components"] = json!(curves.len());
    meta["closed"] = json!(curves.iter().map(|c| c.closed).collect::<Vec<_>>());
    write_json(r, "contour.json", &meta)?;
    println!("zero set: {} component(s)", curves.len());
    Ok(())
}

fn parse_well(s: &str) -> CliResult<(f64, f64)> {
    let (a, b) = s.split_once(',').ok_or_else(|| CliError::Config(format!("well must be \"x,xi\", got {s:?}")))?;
    Ok((parse_number(a)?.value(), parse_number(b)?.value()))
}

/// `h` grid for resonant fits; the Harper well needs `h ≤ 2^-12`.
fn resonant_grid() -> Vec<f64> {
    (12..=17).map(|k| 2f64.powi(-k)).collect()
}

fn expansion_json(e: &WkbExpansion, normalization: f64, method: &str) -> Value {
    json!({
        "branch": e.branch,
        "n": e.n,
        "method": method,
        "lambdas": e.lambdas,
        // λ_i of (𝓗²)₁₁ itself, i.e. before dividing by its ξ-curvature
        "lambdas_unnormalized": e.lambdas.iter().map(|l| l * normalization).collect::<Vec<_>>(),
    })
}

fn cmd_wkb(r: &Resolved) -> CliResult<()> {
    if r.limit != Limit::Chiral {
        return config_err("WKB expansions are built at chiral wells");
    }
    let model = well_model(r);
    let (x0, xi0) = match &r.config.well {
        Some(w) => parse_well(w)?,
        None => match model {
            WellModel::Harper if r.params.k_perp == 0.0 => (0.0, 1.0 / 3.0),
            WellModel::Harper => (0.0, 1.0 / 6.0),
            WellModel::LowEnergy => (0.0, 0.0),
        },
    };
    let n = r.config.n.unwrap_or(0);
    let ell = r.config.order.unwrap_or(2);
    let w = chiral_well_at(model, r.params.w1, r.params.k_perp, x0, xi0, 2 * ell as u32 + 2)?;
    let nf = &w.normal_form;
    let mut rows = Vec::new();
    for branch in 1..=2usize {
        match wkb_recurrence(nf, n, branch, ell) {
            Ok(e) => rows.push(expansion_json(&e, w.normalization, "recurrence")),
            Err(Error::ResonantObstruction { .. }) => {
                // position of the double level in the ascending ordering (1-based)
                let mu = if branch == 1 { nf.mu1 } else { nf.mu2 };
                let e = (2 * n + 1) as f64 * nf.omega + mu;
                let levels = eigenvalue_ordering(nf.omega, nf.mu1, nf.mu2, 2 * n + 4);
                let first = levels.iter().position(|l| (l.e - e).abs() <= 1e-9 * nf.omega).map_or(0, |p| p + 1);
                let (a, b, fit) = resonant_expansion(nf, first, ell, &resonant_grid())?;
                let pick = if a.branch == branch { a } else { b };
                let mut v = expansion_json(&pick, w.normalization, "resonant fit");
                v["fit"] = json!(fit);
                rows.push(v);
            }
            Err(e) => return Err(e.into()),
        }
    }
    let mut out = header(r, "wkb");
    out["well"] = json!({ "x0": w.x0, "xi0": w.xi0, "normalization": w.normalization, "omega": nf.omega, "mu1": nf.mu1, "mu2": nf.mu2 });
    out["expansions"] = json!(rows);
    write_json(r, "wkb.json", &out)?;
    for row in &rows {
        println!("branch {} lambda_0 = {} (unnormalized {})", row["branch"], row["lambdas"][0], row["lambdas_unnormalized"][0]);
    }
    Ok(())
}

fn parse_suite(s: &str) -> CliResult<Vec<u32>> {
    if s.trim() == "all" {
        return Ok(CRITERIA.iter().map(|c| c.0).collect());
    }
    s.split(',')
        .map(|t| match t.trim().parse::<u32>() {
            Ok(id) if CRITERIA.iter().any(|c| c.0 == id) => Ok(id),
            _ => config_err(format!("unknown criterion {t:?}")),
        })
        .collect()
}

fn cmd_verify(r: &Resolved) -> CliResult<()> {
    let ids = parse_suite(r.config.suite.as_deref().unwrap_or("all"))?;
    let mut reports: Vec<Report> = Vec::new();
    for id in ids {
        let rep = run_criterion(id);
        println!("{}", rep.line());
        for n in &rep.notes {
            println!("       note: {n}");
        }
        reports.push(rep);
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    let mut out = header(r, "verify");
    out["passed"] = json!(failed == 0);
    out["reports"] = json!(reports);
    write_json(r, "verify.json", &out)?;
    if failed > 0 {
        return Err(CliError::Acceptance(failed));
    }
    Ok(())
}

fn cmd_bs(r: &Resolved) -> CliResult<()> {
    if r.model != Model::Harper || r.limit != Limit::Antichiral {
        return config_err("Bohr–Sommerfeld tables are built for the anti-chiral harper model");
    }
    let w0 = r.params.w0;
    let kp = r.params.k_perp;
    let js: Vec<usize> = match r.config.j {
        Some(j @ 1..=4) => vec![j],
        Some(j) => return config_err(format!("j must be in 1..4, got {j}")),
        None => (1..=4).collect(),
    };
    let kmax = r.config.kmax.unwrap_or(3);
    let ntau = r.config.taus.unwrap_or(200);
    if ntau < 4 {
        return config_err("need at least 4 τ samples");
    }
    let h = r.scale.map(Scale::h);
    let tol = OrbitTolerance::default();
    let c = antichiral_minima(w0);
    let mut levels = Vec::new();
    let mut rows = Vec::new();
    for &j in &js {
        let s = antichiral_series(w0, j, kp)?;
        let table = f_table(&s, &tau_grid(cell_saddle(&s), ntau), &tol)?;
        for f in &table.rows {
            rows.push(vec![j as f64, f.tau, f.f0, f.f1, f.f2, f.period]);
        }
        let Some(h) = h else { continue };
        let spectrum = match r.scale {
            Some(Scale::L(p, 1)) => Some(antichiral_component_spectrum(w0, kp, j, p as usize)?),
            _ => None,
        };
        for k in 0..=kmax {
            let bs = match table.invert(k as i64 + 1, h) {
                Ok(tau) => Some(c[j - 1] + tau),
                Err(Error::OutOfRange { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            levels.push(json!({
                "j": j,
                "k": k,
                "bohr_sommerfeld": bs,
                "ladder": antichiral_levels(w0, h, j, k),
                "ladder_harmonic": antichiral_levels_harmonic(w0, h, j, k),
                "gap_to_spectrum": match (&spectrum, bs) { (Some(sp), Some(b)) => Some(nearest_gap(sp, b)), _ => None },
            }));
        }
    }
    let cols: Vec<String> = ["j", "tau", "F0", "F1", "F2", "period"].iter().map(|s| s.to_string()).collect();
    write_file(r, "bs_table.csv", &csv_with_header(r, "bs", &cols, &rows))?;
    let mut out = header(r, "bs");
    out["c_j"] = json!(c);
    out["levels"] = json!(levels);
    write_json(r, "bs_levels.json", &out)?;
    Ok(())
}
