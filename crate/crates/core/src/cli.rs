//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use crate::dynamics;
use crate::error::Error;
use crate::model::{check_pseudo_hermitian, BranchSign, EffectiveHamiltonian, PseudoHermitianFamily, SystemParams};
use crate::scattering::{find_cpa_frequencies, s_coefficients, DriveSpec};
use crate::spectral::{self, Tolerance};
use crate::sweep::{self, fmt_num, FigureCase, GridRange, OutputFormat, SweepConfig, SweepGrid};

#[derive(Parser, Debug)]
#[command(name = "magnon-ep", version, about = "Pseudo-Hermitian cavity-magnonics spectra and exceptional points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Case {
    Symmetric,
    Asymmetric,
}

impl From<Case> for FigureCase {
    fn from(c: Case) -> Self {
        match c {
            Case::Symmetric => FigureCase::Symmetric,
            Case::Asymmetric => FigureCase::Asymmetric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Free,
    Driven,
}

#[derive(Args, Debug, Clone)]
struct Output {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct FamilyArgs {
    /// Damping ratio γ₁/γ₂.
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    /// Coupling ratio g₂/g₁ (default: the EP3 ratio for this η).
    #[arg(long)]
    k: Option<f64>,
    /// Magnon-2 damping γ₂ (MHz).
    #[arg(long, default_value_t = 1.5)]
    gamma2: f64,
    /// Intrinsic cavity loss (MHz, default γ₂).
    #[arg(long = "kappa-int")]
    kappa_int: Option<f64>,
    /// Cavity frequency (MHz).
    #[arg(long = "omega-c", default_value_t = 0.0)]
    omega_c: f64,
    /// Take the negative Δ₁ branch.
    #[arg(long)]
    negative_branch: bool,
    /// Relative tolerance for real-eigenvalue classification.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct PointArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Coupling g₁ (MHz).
    #[arg(long)]
    g1: Option<f64>,
    /// Explicit system parameters as JSON instead of a family realization.
    #[arg(long)]
    params: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues at one coupling, or a branch-tracked sweep with --grid.
    Eigs {
        #[command(flatten)]
        point: PointArgs,
        /// g₁ sweep `start:stop:steps`.
        #[arg(long)]
        grid: Option<GridRange>,
        /// Sweep configuration (JSON).
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Third-order exceptional point.
    Ep3 {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Second-order exceptional point above the EP3.
    Ep2 {
        #[command(flatten)]
        family: FamilyArgs,
        /// Upper end of the search interval (MHz, default 2.5·g_min).
        #[arg(long = "g-upper")]
        g_upper: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Real CPA frequencies at one coupling.
    Cpa {
        #[command(flatten)]
        point: PointArgs,
        /// Detuning scan range `start:stop:steps` (default ±6γ₂).
        #[arg(long = "omega-grid")]
        omega_grid: Option<GridRange>,
        #[command(flatten)]
        output: Output,
    },
    /// Total output spectrum |S_tot|².
    Spectrum {
        #[command(flatten)]
        point: PointArgs,
        /// Single detuning ω − ω_c (MHz).
        #[arg(long)]
        omega: Option<f64>,
        /// g₁ sweep `start:stop:steps` for a 2D map.
        #[arg(long)]
        grid: Option<GridRange>,
        /// Detuning grid `start:stop:steps` (default ±6γ₂, 601 points).
        #[arg(long = "omega-grid")]
        omega_grid: Option<GridRange>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Time-domain trajectory or fitted modal frequencies.
    Dynamics {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, value_enum, default_value_t = Mode::Free)]
        mode: Mode,
        /// Drive detuning ω − ω_c for driven mode (MHz).
        #[arg(long, default_value_t = 0.0)]
        omega: f64,
        /// Duration (µs).
        #[arg(long = "t-final", default_value_t = 2.0)]
        t_final: f64,
        /// Step (µs, default 0.01/(2π·spectral radius)).
        #[arg(long)]
        dt: Option<f64>,
        /// Print fitted modal frequencies instead of the trajectory.
        #[arg(long)]
        rates: bool,
        #[command(flatten)]
        output: Output,
    },
    /// k(η) curve over η ∈ [1, 3].
    Fig2 {
        #[command(flatten)]
        output: Output,
    },
    /// Eigenvalues versus g₁ for a figure parameter set.
    Fig3 {
        #[arg(long, value_enum)]
        case: Case,
        #[command(flatten)]
        output: Output,
    },
    /// |S_tot|² over (g₁, ω − ω_c) for a figure parameter set.
    Fig4 {
        #[arg(long, value_enum)]
        case: Case,
        #[command(flatten)]
        output: Output,
    },
}

enum Failure {
    Usage(String),
    Numeric(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numeric(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read_file(path: &PathBuf) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

impl FamilyArgs {
    fn family(&self) -> CliResult<PseudoHermitianFamily> {
        let k = match self.k {
            Some(k) => k,
            None => spectral::k_from_eta(self.eta)?,
        };
        let mut f = PseudoHermitianFamily::new(self.eta, k, self.gamma2)?.with_omega_c(self.omega_c);
        if let Some(ki) = self.kappa_int {
            f = f.with_kappa_int(ki);
        }
        if self.negative_branch {
            f = f.with_sign(BranchSign::Negative);
        }
        f.validate()?;
        Ok(f)
    }

    fn tolerance(&self) -> Tolerance {
        self.tol.map(Tolerance::with_real).unwrap_or_default()
    }
}

impl PointArgs {
    fn params(&self) -> CliResult<SystemParams> {
        if let Some(path) = &self.params {
            let p: SystemParams = serde_json::from_str(&read_file(path)?)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            p.validate()?;
            return Ok(p);
        }
        let g1 = self.g1.ok_or_else(|| Failure::Usage("--g1 or --params is required".into()))?;
        Ok(self.family.family()?.realize(g1)?)
    }
}

fn load_config(path: &Option<PathBuf>) -> CliResult<Option<SweepConfig>> {
    match path {
        None => Ok(None),
        Some(p) => Ok(Some(SweepConfig::from_json(&read_file(p)?)?)),
    }
}

fn emit(output: &Output, text: String, out: &mut dyn Write) -> CliResult<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string())),
    }
}

fn grid_format(f: Format) -> CliResult<OutputFormat> {
    match f {
        Format::Csv => Ok(OutputFormat::Csv),
        Format::Json => Ok(OutputFormat::Json),
        Format::Text => Err(Failure::Usage("tabular output supports csv or json".into())),
    }
}

fn emit_grid(output: &Output, grid: &SweepGrid, out: &mut dyn Write) -> CliResult<()> {
    let fmt = grid_format(output.format.unwrap_or(Format::Csv))?;
    emit(output, grid.render(fmt), out)
}

fn cnum(z: Complex64) -> String {
    if z.im < 0.0 {
        format!("{} - {}i", fmt_num(z.re), fmt_num(-z.im))
    } else {
        format!("{} + {}i", fmt_num(z.re), fmt_num(z.im))
    }
}

fn cjson(z: Complex64) -> serde_json::Value {
    json!([z.re, z.im])
}

fn single_row(columns: &[&str], row: Vec<f64>) -> SweepGrid {
    SweepGrid {
        axes: vec![],
        columns: columns.iter().map(|s| s.to_string()).collect(),
        rows: vec![row],
    }
}

fn cmd_eigs(
    point: &PointArgs,
    grid: &Option<GridRange>,
    config: &Option<PathBuf>,
    output: &Output,
    out: &mut dyn Write,
) -> CliResult<()> {
    let cfg = match load_config(config)? {
        Some(c) => Some(c),
        None => match grid {
            Some(g) => {
                let mut c = SweepConfig::new(point.family.family()?, *g);
                c.tol = point.family.tolerance();
                Some(c)
            }
            None => None,
        },
    };
    if let Some(cfg) = cfg {
        return emit_grid(output, &sweep::sweep_eigenvalues(&cfg)?, out);
    }

    let params = point.params()?;
    let h = EffectiveHamiltonian::build(&params);
    let e = spectral::eigenvalues(&h, &point.family.tolerance());
    let check = check_pseudo_hermitian(&params, 1e-10);
    let labels = spectral::label_branches(&e.detunings());
    let fmt = output.format.unwrap_or(Format::Text);
    let text = match fmt {
        Format::Text => {
            let mut s = String::new();
            for (name, z) in ["Omega0", "Omega+", "Omega-"].iter().zip(labels) {
                s.push_str(&format!("{name} - omega_c = {}\n", cnum(z)));
            }
            s.push_str(&format!("classification = {:?}\n", e.classification));
            s.push_str(&format!("coalescence_order = {}\n", e.coalescence_order));
            s.push_str(&format!("pseudo_hermitian = {}\n", check.satisfied));
            s
        }
        Format::Json => {
            let v = json!({
                "omega_c": e.omega_ref,
                "detunings": labels.iter().map(|&z| cjson(z)).collect::<Vec<_>>(),
                "classification": e.classification,
                "coalescence_order": e.coalescence_order,
                "pseudo_hermitian": check.satisfied,
                "residuals": check.residuals,
            });
            format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
        }
        Format::Csv => {
            let mut row = vec![];
            for z in labels {
                row.push(z.re);
                row.push(z.im);
            }
            row.push(e.classification.code() as f64);
            row.push(e.coalescence_order as f64);
            single_row(&sweep::EIGENVALUE_COLUMNS[2..10], row).to_csv()
        }
    };
    emit(output, text, out)
}

fn cmd_ep3(family: &FamilyArgs, output: &Output, out: &mut dyn Write) -> CliResult<()> {
    let r = spectral::ep3_critical(family.eta, family.gamma2, family.omega_c)?;
    let fmt = output.format.unwrap_or(Format::Text);
    let text = match fmt {
        Format::Text => format!(
            "eta = {}\nk = {:.10}\ng_EP3 = {:.10}\nDelta_EP3 = {:.10}\nOmega_EP3 = {:.10}\ng_min = {:.10}\n",
            r.eta, r.k, r.g_ep3, r.delta_ep3, r.omega_ep3, r.g_min
        ),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&r).unwrap()),
        Format::Csv => single_row(
            &["eta", "k", "g_ep3", "delta_ep3", "omega_ep3", "g_min"],
            vec![r.eta, r.k, r.g_ep3, r.delta_ep3, r.omega_ep3, r.g_min],
        )
        .to_csv(),
    };
    emit(output, text, out)
}

fn cmd_ep2(family: &FamilyArgs, g_upper: Option<f64>, output: &Output, out: &mut dyn Write) -> CliResult<()> {
    let ep3 = spectral::ep3_critical(family.eta, family.gamma2, family.omega_c)?;
    let upper = g_upper.unwrap_or(2.5 * ep3.g_min);
    let g = spectral::ep2_locate(family.eta, family.gamma2, family.omega_c, upper)?;
    let fmt = output.format.unwrap_or(Format::Text);
    let text = match fmt {
        Format::Text => format!("eta = {}\ng_EP3 = {:.10}\ng_EP2 = {:.10}\n", family.eta, ep3.g_ep3, g),
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&json!({"eta": family.eta, "g_ep3": ep3.g_ep3, "g_ep2": g})).unwrap()
        ),
        Format::Csv => single_row(&["eta", "g_ep3", "g_ep2"], vec![family.eta, ep3.g_ep3, g]).to_csv(),
    };
    emit(output, text, out)
}

fn default_omega_grid(gamma2: f64) -> GridRange {
    GridRange { start: -6.0 * gamma2, stop: 6.0 * gamma2, steps: 601 }
}

fn cmd_cpa(point: &PointArgs, omega_grid: &Option<GridRange>, output: &Output, out: &mut dyn Write) -> CliResult<()> {
    let params = point.params()?;
    let wc = params.cavity.omega_c;
    let range = omega_grid.unwrap_or_else(|| default_omega_grid(params.magnon_2.gamma));
    let roots = find_cpa_frequencies(&params, (wc + range.start, wc + range.stop));
    let rows: Vec<Vec<f64>> = roots
        .iter()
        .map(|&w| Ok(vec![w - wc, s_coefficients(w, &params)?.s_tot_sq]))
        .collect::<Result<_, Error>>()?;
    let fmt = output.format.unwrap_or(Format::Text);
    let text = match fmt {
        Format::Text => {
            let mut s = format!("{} CPA frequencies (omega - omega_c):\n", rows.len());
            for r in &rows {
                s.push_str(&format!("{}  |S_tot|^2 = {}\n", fmt_num(r[0]), fmt_num(r[1])));
            }
            s
        }
        _ => {
            let g = SweepGrid { axes: vec![], columns: vec!["detuning".into(), "s_tot_sq".into()], rows };
            g.render(grid_format(fmt)?)
        }
    };
    emit(output, text, out)
}

fn cmd_spectrum(
    point: &PointArgs,
    omega: Option<f64>,
    grid: &Option<GridRange>,
    omega_grid: &Option<GridRange>,
    config: &Option<PathBuf>,
    output: &Output,
    out: &mut dyn Write,
) -> CliResult<()> {
    let cfg = match load_config(config)? {
        Some(c) => Some(c),
        None => match grid {
            Some(g) => {
                let fam = point.family.family()?;
                let w = omega_grid.unwrap_or_else(|| default_omega_grid(fam.gamma_2));
                Some(SweepConfig::new(fam, *g).with_omega_range(w))
            }
            None => None,
        },
    };
    if let Some(cfg) = cfg {
        return emit_grid(output, &sweep::sweep_spectrum(&cfg)?, out);
    }

    let params = point.params()?;
    let wc = params.cavity.omega_c;
    if let Some(w) = omega {
        let s = s_coefficients(wc + w, &params)?;
        let fmt = output.format.unwrap_or(Format::Text);
        let text = match fmt {
            Format::Text => format!(
                "S1 = {}\nS2 = {}\n|S_tot|^2 = {}\n",
                cnum(s.s1),
                cnum(s.s2),
                fmt_num(s.s_tot_sq)
            ),
            Format::Json => format!(
                "{}\n",
                serde_json::to_string_pretty(&json!({
                    "detuning": w, "s1": cjson(s.s1), "s2": cjson(s.s2), "s_tot_sq": s.s_tot_sq
                }))
                .unwrap()
            ),
            Format::Csv => single_row(&["detuning", "s_tot_sq"], vec![w, s.s_tot_sq]).to_csv(),
        };
        return emit(output, text, out);
    }
    let range = omega_grid.unwrap_or_else(|| default_omega_grid(params.magnon_2.gamma));
    let rows = range
        .values()
        .into_iter()
        .map(|w| Ok(vec![w, s_coefficients(wc + w, &params)?.s_tot_sq]))
        .collect::<Result<_, Error>>()?;
    let g = SweepGrid { axes: vec![], columns: vec!["detuning".into(), "s_tot_sq".into()], rows };
    emit_grid(output, &g, out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_dynamics(
    point: &PointArgs,
    mode: Mode,
    omega: f64,
    t_final: f64,
    dt: Option<f64>,
    rates: bool,
    output: &Output,
    out: &mut dyn Write,
) -> CliResult<()> {
    let params = point.params()?;
    let wc = params.cavity.omega_c;
    let start = [Complex64::new(1.0, 0.0), Complex64::new(0.3, -0.2), Complex64::new(-0.4, 0.1)];
    let (generator, offset) = match mode {
        Mode::Free => {
            let h = EffectiveHamiltonian::build(&params);
            let o = h.frame_offset();
            (h, o)
        }
        Mode::Driven => (dynamics::lossy_generator(&params), wc + omega),
    };
    let dt = dt.unwrap_or_else(|| 0.2 * dynamics::max_step(&generator.shifted(offset).entries));
    let dt = if dt.is_finite() { dt } else { t_final / 1000.0 };

    if rates {
        let r = dynamics::modal_rates(&generator, start, t_final, dt)?;
        let fmt = output.format.unwrap_or(Format::Text);
        let text = match fmt {
            Format::Text => r.iter().map(|&z| format!("{}\n", cnum(z - wc))).collect(),
            Format::Json => format!(
                "{}\n",
                serde_json::to_string_pretty(&r.iter().map(|&z| cjson(z - wc)).collect::<Vec<_>>()).unwrap()
            ),
            Format::Csv => SweepGrid {
                axes: vec![],
                columns: vec!["re_detuning".into(), "im_detuning".into()],
                rows: r.iter().map(|z| vec![z.re - wc, z.im]).collect(),
            }
            .to_csv(),
        };
        return emit(output, text, out);
    }

    let traj = match mode {
        Mode::Free => dynamics::evolve_free(&generator, start, t_final, dt)?,
        Mode::Driven => {
            let drive = DriveSpec::cpa_matched(&params, wc + omega);
            dynamics::evolve_driven(&params, &drive, t_final, dt)?
        }
    };
    match output.format.unwrap_or(Format::Csv) {
        Format::Json => {
            let v: Vec<_> = traj
                .times
                .iter()
                .zip(&traj.states)
                .map(|(t, s)| json!({"time": t, "state": s.iter().map(|&z| cjson(z)).collect::<Vec<_>>()}))
                .collect();
            emit(output, format!("{}\n", serde_json::to_string(&v).unwrap()), out)
        }
        _ => emit(output, traj.to_csv(), out),
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Eigs { point, grid, config, output } => cmd_eigs(point, grid, config, output, out),
        Command::Ep3 { family, output } => cmd_ep3(family, output, out),
        Command::Ep2 { family, g_upper, output } => cmd_ep2(family, *g_upper, output, out),
        Command::Cpa { point, omega_grid, output } => cmd_cpa(point, omega_grid, output, out),
        Command::Spectrum { point, omega, grid, omega_grid, config, output } => {
            cmd_spectrum(point, *omega, grid, omega_grid, config, output, out)
        }
        Command::Dynamics { point, mode, omega, t_final, dt, rates, output } => {
            cmd_dynamics(point, *mode, *omega, *t_final, *dt, *rates, output, out)
        }
        Command::Fig2 { output } => emit_grid(output, &sweep::fig2()?, out),
        Command::Fig3 { case, output } => emit_grid(output, &sweep::fig3((*case).into())?, out),
        Command::Fig4 { case, output } => emit_grid(output, &sweep::fig4((*case).into())?, out),
    }
}

/// Runs the CLI with explicit output streams and returns the exit code.
pub fn run_cli_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Numeric(e)) => {
            let _ = writeln!(err, "error: {}: {e}", e.name());
            1
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: Io: {msg}");
            1
        }
    }
}

/// Runs the CLI against standard output and standard error.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run_cli_with(argv, &mut stdout.lock(), &mut stderr.lock());
    let _ = std::io::stdout().flush();
    code
}
