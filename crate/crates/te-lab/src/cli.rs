//! Command-line front end: one subcommand per stage of the pipeline, each
//! writing CSV or JSON reports into `--out`. Failures also leave an
//! `error.txt` there and map to exit statuses 1 (validation), 2 (numerical)
//! and 3 (falsified regime assertion).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::asymptotics::{im_part_regimes, large_freq_blockdiag, small_freq_diagonalize};
use crate::classify::{find_special_directions, tag_of, Census, Tag, VanishingOrder};
use crate::config::{load_medium, KvDoc};
use crate::decay::predict_global;
use crate::fit::geomspace;
use crate::fresnel::{flat_points, ContactOrder, FresnelProfile, PROFILE_N};
use crate::media::Medium;
use crate::simulator::{
    measure_decay, with_threads, CauchyData, Cutoff, FilterSpec, Functional, GridSpec, DEFAULT_L, DEFAULT_N,
    DEFAULT_WIDTH_CELLS,
};
use crate::symbol::{label_ray, spectrum, Label};
use crate::{unit, LabError, Result, C64};

/// Radii sampled by `expand` in each regime.
const SMALL_RADII: (f64, f64) = (1e-3, 1e-1);
const LARGE_RADII: (f64, f64) = (10.0, 1e3);
const EXPAND_POINTS: usize = 9;
/// Radii and split used for the imaginary-part regime check in `expand`.
const REGIME_RADII: (f64, f64) = (1e-2, 1e2);

#[derive(Debug, Parser)]
#[command(name = "te-lab", version, about = "Symbol calculus and decay laboratory for 2D thermo-elasticity")]
pub struct Cli {
    /// Medium document (`key = value` lines).
    #[arg(long, global = true)]
    pub medium: Option<PathBuf>,
    /// Directory receiving the reports.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Seed for randomised sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Small,
    Large,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Direction atlas: `atlas.csv` and `census.txt`.
    Classify {
        #[arg(long, default_value_t = crate::decay::DEFAULT_SCAN)]
        scan: usize,
    },
    /// Labelled eigenvalues of B(xi): `spectrum.csv`.
    Spectrum {
        /// Frequency `X1,X2`.
        #[arg(long, value_delimiter = ',', num_args = 1)]
        xi: Option<Vec<f64>>,
        /// Random frequencies with |xi| log-uniform in [1e-2, 1e2].
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Exact against expanded eigenvalues along a ray: `expand.csv`, `regimes.csv`.
    Expand {
        /// Angle of the ray in radians.
        #[arg(long)]
        direction: f64,
        #[arg(long, default_value_t = 2)]
        kmax: usize,
        #[arg(long, value_enum, default_value_t = RegimeArg::Small)]
        regime: RegimeArg,
        /// Frequency split for the imaginary-part regimes.
        #[arg(long, default_value_t = 1.0)]
        split: f64,
    },
    /// Fresnel profile of one sheet: `fresnel.csv`.
    Fresnel {
        /// Sheet, 1 or 2.
        #[arg(long)]
        sheet: usize,
        /// Equispaced angles in the table.
        #[arg(long, default_value_t = 360)]
        points: usize,
    },
    /// Predicted decay exponents: `predict.json`.
    Predict,
    /// Filtered decay measurement: `decay.csv`, `fit.txt`.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct SimulateArgs {
    /// Run document whose keys match these flags; flags take precedence.
    #[arg(long)]
    pub run: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "L")]
    pub l: Option<f64>,
    #[arg(long)]
    pub tmin: Option<f64>,
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Number of geometrically spaced times.
    #[arg(long)]
    pub times: Option<usize>,
    /// `par`, `hyp`, `low`, `high`, `branch:PHI`, products joined by `+`, or `none`.
    #[arg(long)]
    pub filter: Option<String>,
    #[arg(long)]
    pub functional: Option<String>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    /// `smoothstep` or `bump`.
    #[arg(long)]
    pub cutoff: Option<String>,
    /// Gaussian width in grid cells.
    #[arg(long)]
    pub width: Option<f64>,
    /// CSV of `n²` rows `u1x,u1y,u2x,u2y,theta` replacing the Gaussian.
    #[arg(long)]
    pub data: Option<PathBuf>,
}

/// Fully resolved simulation options.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulateOptions {
    pub grid: GridSpec,
    pub times: Vec<f64>,
    pub filter: FilterSpec,
    pub functional: Functional,
    pub width: f64,
    pub data: Option<PathBuf>,
}

impl SimulateArgs {
    /// Merges the optional run document under the flags and range-checks.
    pub fn resolve(&self) -> Result<SimulateOptions> {
        let mut doc = match &self.run {
            Some(p) => KvDoc::parse(&read(p)?)?,
            None => KvDoc::default(),
        };
        let n = pick(self.n, doc.take_usize("n")?, DEFAULT_N);
        let l = pick(self.l, doc.take_f64("L")?, DEFAULT_L);
        let tmin = pick(self.tmin, doc.take_f64("tmin")?, 5.0);
        let tmax = pick(self.tmax, doc.take_f64("tmax")?, 50.0);
        let count = pick(self.times, doc.take_usize("times")?, 16);
        let filter = pick(self.filter.clone(), doc.take("filter"), "none".into());
        let functional = pick(self.functional.clone(), doc.take("functional"), "sup".into());
        let eps = pick(self.eps, doc.take_f64("eps")?, 0.1);
        let c = pick(self.c, doc.take_f64("c")?, 1.0);
        let cutoff = pick(self.cutoff.clone(), doc.take("cutoff"), "smoothstep".into());
        let width = pick(self.width, doc.take_f64("width")?, DEFAULT_WIDTH_CELLS);
        let dealias = doc.take_bool("dealias")?.unwrap_or(false);
        let data = match (&self.data, doc.take("data")) {
            (Some(p), _) => Some(p.clone()),
            (None, Some(p)) => Some(match self.run.as_ref().and_then(|r| r.parent()) {
                Some(base) => base.join(p),
                None => p.into(),
            }),
            (None, None) => None,
        };
        doc.finish()?;
        let mut grid = GridSpec::new(n, l)?;
        grid.dealias = dealias;
        if !(tmin > 0.0 && tmax > tmin) || count < 2 {
            return Err(LabError::InvalidInput(format!(
                "need 0 < tmin < tmax and at least 2 times (got tmin={tmin}, tmax={tmax}, times={count})"
            )));
        }
        if !(eps > 0.0 && eps < 1.0) || !(c > 0.0) || !(width > 0.0) {
            return Err(LabError::InvalidInput(format!(
                "need 0 < eps < 1, c > 0 and width > 0 (got eps={eps}, c={c}, width={width})"
            )));
        }
        let mut filter = FilterSpec::parse(&filter, eps, c)?;
        filter.cutoff = cutoff.parse::<Cutoff>()?;
        Ok(SimulateOptions {
            grid,
            times: geomspace(tmin, tmax, count),
            filter,
            functional: functional.parse()?,
            width,
            data,
        })
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).map_err(|e| LabError::Io(format!("{}: {e}", p.display())))
}

fn write(dir: &Path, name: &str, body: &str) -> Result<PathBuf> {
    let p = dir.join(name);
    fs::write(&p, body).map_err(|e| LabError::Io(format!("{}: {e}", p.display())))?;
    Ok(p)
}

fn medium(cli: &Cli) -> Result<Medium> {
    match &cli.medium {
        Some(p) => load_medium(p),
        None => Err(LabError::Config("--medium is required".into())),
    }
}

fn ell_text(v: Option<VanishingOrder>) -> String {
    match v {
        Some(VanishingOrder::Finite(l)) => l.to_string(),
        Some(VanishingOrder::IdenticallyVanishing) => "inf".into(),
        None => String::new(),
    }
}

fn classify_cmd(m: &Medium, scan: usize, out: &Path) -> Result<Vec<PathBuf>> {
    let census = find_special_directions(m, scan)?;
    let mut csv = String::from("phi,tag,j0,ell,a4_ok\n");
    for d in census.directions() {
        let j0 = d.tag.j0().map(|j| (j + 1).to_string()).unwrap_or_default();
        writeln!(csv, "{},{},{},{},{}", d.phi, d.tag.name(), j0, ell_text(d.vanishing_order), d.a4_ok).unwrap();
    }
    let summary = match &census {
        Census::Isolated(v) => {
            format!("isolated {} hyperbolic {}\n", v.len(), census.hyperbolic().len())
        }
        Census::Decoupled { branch } => format!("decoupled sheet {}\n", branch + 1),
        Census::AllDegenerate => "all_degenerate\n".into(),
    };
    Ok(vec![write(out, "atlas.csv", &csv)?, write(out, "census.txt", &summary)?])
}

fn spectrum_cmd(m: &Medium, xi: Option<&[f64]>, samples: Option<usize>, seed: u64, out: &Path) -> Result<Vec<PathBuf>> {
    let points: Vec<[f64; 2]> = match (xi, samples) {
        (Some(x), None) => {
            if x.len() != 2 || x.iter().any(|v| !v.is_finite()) {
                return Err(LabError::InvalidInput("--xi needs two finite numbers X1,X2".into()));
            }
            vec![[x[0], x[1]]]
        }
        (None, Some(k)) if k > 0 => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..k)
                .map(|_| {
                    let s = 10f64.powf(rng.gen_range(-2.0..2.0));
                    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
                    let e = unit(phi);
                    [s * e[0], s * e[1]]
                })
                .collect()
        }
        _ => return Err(LabError::InvalidInput("give exactly one of --xi X1,X2 or --samples K (K > 0)".into())),
    };
    let mut csv = String::from("xi1,xi2,re_nu,im_nu,label,residual\n");
    for x in points {
        let rep = spectrum(m, x)?;
        for k in 0..5 {
            let nu = rep.eigenvalues[k];
            writeln!(csv, "{},{},{},{},{},{:e}", x[0], x[1], nu.re, nu.im, rep.labels[k], rep.residuals[k]).unwrap();
        }
    }
    Ok(vec![write(out, "spectrum.csv", &csv)?])
}

/// Exact and expanded eigenvalues at radius `s`, labelled.
fn expand_row(m: &Medium, phi: f64, s: f64, kmax: usize, regime: RegimeArg) -> Result<Vec<(Label, C64, C64)>> {
    let e = unit(phi);
    let xi = [s * e[0], s * e[1]];
    let exact = label_ray(&m.frame(phi), &[s], m.gamma, m.kappa)?[0];
    let order = Label::MATRIX_ORDER;
    match regime {
        RegimeArg::Small => {
            let d = small_freq_diagonalize(m, xi, kmax)?;
            let labels = [Label::Nu0, Label::Nu1Plus, Label::Nu1Minus, Label::Nu2Plus, Label::Nu2Minus];
            Ok(labels
                .iter()
                .enumerate()
                .map(|(i, &l)| {
                    let pred: C64 = d.diag.iter().enumerate().map(|(p, dg)| dg[i] * s.powi(p as i32 + 1)).sum();
                    (l, exact[l.index()], pred)
                })
                .collect())
        }
        RegimeArg::Large => {
            let d = large_freq_blockdiag(m, xi, kmax)?;
            Ok(order
                .iter()
                .enumerate()
                .map(|(i, &l)| {
                    let pred: C64 = d.diag.iter().enumerate().map(|(p, dg)| dg[i] * s.powi(2 - p as i32)).sum();
                    (l, exact[i], pred)
                })
                .collect())
        }
    }
}

fn expand_cmd(m: &Medium, phi: f64, kmax: usize, regime: RegimeArg, split: f64, out: &Path) -> Result<Vec<PathBuf>> {
    if !phi.is_finite() {
        return Err(LabError::InvalidInput("--direction must be finite".into()));
    }
    let phi = phi.rem_euclid(std::f64::consts::TAU);
    let (lo, hi) = match regime {
        RegimeArg::Small => SMALL_RADII,
        RegimeArg::Large => LARGE_RADII,
    };
    let mut csv = String::from("s,branch,re_exact,im_exact,re_pred,im_pred,residual\n");
    for s in geomspace(lo, hi, EXPAND_POINTS) {
        for (l, ex, pr) in expand_row(m, phi, s, kmax, regime)? {
            writeln!(csv, "{s},{l},{},{},{},{},{:e}", ex.re, ex.im, pr.re, pr.im, (ex - pr).norm()).unwrap();
        }
    }
    let mut files = vec![write(out, "expand.csv", &csv)?];
    // imaginary-part regimes apply to parabolic and non-degenerate hyperbolic rays
    let eta = unit(phi);
    let eta_bar = match tag_of(&m.frame(phi), m.gamma) {
        Tag::Parabolic => None,
        Tag::Hyperbolic(_) => Some(eta),
        _ => return Ok(files),
    };
    let rows = im_part_regimes(m, eta, &geomspace(REGIME_RADII.0, REGIME_RADII.1, EXPAND_POINTS), split, eta_bar)?;
    let mut csv = String::from("s,label,regime,im,ratio,lower,upper,ok\n");
    for r in &rows {
        writeln!(csv, "{},{},{:?},{},{},{},{},{}", r.s, r.label, r.regime, r.im, r.ratio, r.lower, r.upper, r.ok)
            .unwrap();
    }
    files.push(write(out, "regimes.csv", &csv)?);
    let bad = rows.iter().filter(|r| !r.ok).count();
    if bad > 0 {
        return Err(LabError::Falsified(format!(
            "{bad} of {} imaginary-part regime checks failed at phi={phi}",
            rows.len()
        )));
    }
    Ok(files)
}

fn contact_text(c: ContactOrder) -> String {
    match c {
        ContactOrder::Finite(g) => g.to_string(),
        ContactOrder::AboveCap => "above_cap".into(),
    }
}

fn fresnel_cmd(m: &Medium, sheet: usize, points: usize, out: &Path) -> Result<Vec<PathBuf>> {
    if !(1..=2).contains(&sheet) || points == 0 {
        return Err(LabError::InvalidInput(format!(
            "--sheet must be 1 or 2 and --points positive (got {sheet}, {points})"
        )));
    }
    let j = sheet - 1;
    let prof = FresnelProfile::new(m, j, PROFILE_N)?;
    // flagged points: flat points of the sheet and its hyperbolic directions
    let mut flagged = flat_points(m, j, PROFILE_N)?;
    if let Census::Isolated(dirs) = find_special_directions(m, crate::decay::DEFAULT_SCAN)? {
        flagged.extend(dirs.iter().filter(|d| d.tag.j0() == Some(j)).map(|d| d.phi));
    }
    let mut rows: Vec<(f64, Option<ContactOrder>)> =
        (0..points).map(|k| (std::f64::consts::TAU * k as f64 / points as f64, None)).collect();
    rows.extend(flagged.into_iter().map(|p| (p, Some(prof.contact_order(p)))));
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut csv = String::from("phi,omega_j,curvature_factor,contact_order\n");
    for (phi, c) in rows {
        let c = c.map(contact_text).unwrap_or_default();
        writeln!(csv, "{phi},{},{},{c}", prof.omega(phi), prof.curvature_factor(phi)).unwrap();
    }
    Ok(vec![write(out, "fresnel.csv", &csv)?])
}

fn simulate_cmd(m: &Medium, args: &SimulateArgs, out: &Path) -> Result<Vec<PathBuf>> {
    let o = args.resolve()?;
    let data = match &o.data {
        Some(p) => CauchyData::from_csv(&o.grid, &read(p)?)?,
        None => CauchyData::gaussian(&o.grid, o.width),
    };
    let r = measure_decay(m, &data, &o.grid, &o.filter, o.functional, &o.times)?;
    let mut csv = String::from("t,norm,functional,filter\n");
    for (t, v) in r.times.iter().zip(&r.norms) {
        writeln!(csv, "{t},{v},{},{}", r.functional.name(), r.filter).unwrap();
    }
    let mut fit = String::new();
    match &r.fit {
        Some(f) => {
            writeln!(fit, "slope = {}", f.slope).unwrap();
            writeln!(fit, "stderr = {}", f.stderr).unwrap();
            writeln!(fit, "exponent = {}", -f.slope).unwrap();
            writeln!(fit, "points = {}", f.points).unwrap();
        }
        None => writeln!(fit, "slope = none").unwrap(),
    }
    writeln!(fit, "wrapped_at = {}", r.wrapped_at.map(|t| t.to_string()).unwrap_or_else(|| "none".into())).unwrap();
    writeln!(fit, "fallback_modes = {}", r.fallback_modes).unwrap();
    Ok(vec![write(out, "decay.csv", &csv)?, write(out, "fit.txt", &fit)?])
}

/// Executes one parsed command; returns the files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(&cli.out).map_err(|e| LabError::Io(format!("{}: {e}", cli.out.display())))?;
    let m = medium(cli)?;
    let out = cli.out.as_path();
    with_threads(|| match &cli.command {
        Command::Classify { scan } => classify_cmd(&m, *scan, out),
        Command::Spectrum { xi, samples } => spectrum_cmd(&m, xi.as_deref(), *samples, cli.seed, out),
        Command::Expand { direction, kmax, regime, split } => expand_cmd(&m, *direction, *kmax, *regime, *split, out),
        Command::Fresnel { sheet, points } => fresnel_cmd(&m, *sheet, *points, out),
        Command::Predict => Ok(vec![write(out, "predict.json", &(predict_global(&m)?.report() + "\n"))?]),
        Command::Simulate(a) => simulate_cmd(&m, a, out),
    })
}

fn error_text(kind: &str, code: i32, msg: &str) -> String {
    format!("kind = {kind}\nexit = {code}\nmessage = {}\n", msg.replace('\n', " "))
}

/// `--out` as given on the raw command line, for reporting usage errors.
fn raw_out(args: &[String]) -> PathBuf {
    for (i, a) in args.iter().enumerate() {
        if let Some(v) = a.strip_prefix("--out=") {
            return v.into();
        }
        if a == "--out" {
            if let Some(v) = args.get(i + 1) {
                return v.into();
            }
        }
    }
    PathBuf::from(".")
}

/// Parses `args` (program name first), runs, and returns the exit status.
pub fn main_with_args(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprint!("{e}");
            let out = raw_out(&args);
            if fs::create_dir_all(&out).is_ok() {
                let _ = fs::write(out.join("error.txt"), error_text("usage", 1, e.to_string().trim()));
            }
            return 1;
        }
    };
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            let code = e.exit_code();
            eprintln!("error: {e}");
            if fs::create_dir_all(&cli.out).is_ok() {
                let _ = fs::write(cli.out.join("error.txt"), error_text(e.kind(), code, &e.to_string()));
            }
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("te-lab").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn simulate_flags_override_defaults() {
        let cli = parse(&["simulate", "--n", "64", "--L", "40", "--filter", "par+low", "--functional", "energy"]);
        let Command::Simulate(a) = &cli.command else { panic!() };
        let o = a.resolve().unwrap();
        assert_eq!((o.grid.n, o.grid.l), (64, 40.0));
        assert_eq!(o.filter.name(), "par+low");
        assert_eq!(o.functional, Functional::Energy);
        assert_eq!(o.times.len(), 16);
    }

    #[test]
    fn simulate_range_checks() {
        let a = SimulateArgs { tmin: Some(10.0), tmax: Some(5.0), ..Default::default() };
        assert!(matches!(a.resolve(), Err(LabError::InvalidInput(_))));
        let a = SimulateArgs { n: Some(100), ..Default::default() };
        assert_eq!(a.resolve().unwrap_err().exit_code(), 1);
        let a = SimulateArgs { filter: Some("cone".into()), ..Default::default() };
        assert!(a.resolve().is_err());
    }

    #[test]
    fn raw_out_forms() {
        let v = |s: &[&str]| s.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert_eq!(raw_out(&v(&["x", "--out", "d"])), PathBuf::from("d"));
        assert_eq!(raw_out(&v(&["x", "--out=e"])), PathBuf::from("e"));
        assert_eq!(raw_out(&v(&["x"])), PathBuf::from("."));
    }
}
