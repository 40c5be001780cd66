mod output;

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use superint_core::classical::{
    curve_constants, curve_residual, integrate, integrate_orbit, oscillator_trajectory,
    CurveConstants, DEFAULT_REL_TOL,
};
use superint_core::model::{
    hamiltonian, separation_constant, to_cartesian, Chart, PhasePoint, RationalK, SystemParams,
};
use superint_core::presets::{preset, Preset, PRESETS};
use superint_core::quantum::{energy_difference, spectrum};
use superint_core::verify::{run_suites, Suite};
use superint_core::Error;

use output::{csv_row, emit, num, svg_polyline, write_atomic};

const EXIT_VERIFY: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_ESCAPE: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "superint",
    version,
    about = "Superintegrable family on the pseudo-Euclidean plane"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a bounded orbit and write its samples as CSV.
    Trajectory(TrajectoryArgs),
    /// Tabulate the bound-state spectrum.
    Spectrum(SpectrumArgs),
    /// Run the invariant suites.
    Verify(VerifyArgs),
    /// Sample the closed-form free oscillator.
    Oscillator(OscillatorArgs),
    /// Print the orbit constants and sample the closed-form trajectory curve.
    Curve(CurveArgs),
}

#[derive(Args)]
struct OrbitArgs {
    /// One of fig1-k1, fig1-k2, fig1-k3, fig2-k13, fig2-k12, fig2-k32; explicit flags override it.
    #[arg(long)]
    preset: Option<String>,
    /// `p/q` or an integer.
    #[arg(long)]
    k: Option<RationalK>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
    /// Energy.
    #[arg(long = "E", allow_hyphen_values = true)]
    energy: Option<f64>,
    /// Separation constant.
    #[arg(long = "A", allow_hyphen_values = true)]
    separation: Option<f64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    delta1: f64,
    #[arg(long, allow_hyphen_values = true)]
    delta2: Option<f64>,
}

#[derive(Args)]
struct TrajectoryArgs {
    #[command(flatten)]
    orbit: OrbitArgs,
    /// Defaults to two closures, `qπ/ω`, with a preset.
    #[arg(long, allow_hyphen_values = true)]
    t_max: Option<f64>,
    /// Defaults to `t_max / 2000`.
    #[arg(long, allow_hyphen_values = true)]
    dt_out: Option<f64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = DEFAULT_REL_TOL)]
    rel_tol: f64,
    /// Start from `rho,sigma,p_rho,p_sigma` instead of the orbit given by E, A, delta1, delta2.
    #[arg(long, value_parser = parse_state, allow_hyphen_values = true)]
    state: Option<[f64; 4]>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    orbit: OrbitArgs,
    /// Number of samples along the curve.
    #[arg(long, default_value_t = 4000)]
    points: usize,
    /// CSV of the sampled curve.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    k: RationalK,
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, allow_hyphen_values = true)]
    omega: f64,
    #[arg(long, default_value_t = 3)]
    m_max: usize,
    /// Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone)]
struct SuiteSelection(Vec<Suite>);

fn parse_suites(s: &str) -> Result<SuiteSelection, String> {
    if s == "all" {
        return Ok(SuiteSelection(Suite::ALL.to_vec()));
    }
    let names: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
    s.split(',')
        .map(|x| {
            x.trim().parse::<Suite>().map_err(|_| {
                format!(
                    "unknown suite '{x}'; expected all or one of {}",
                    names.join(", ")
                )
            })
        })
        .collect::<Result<Vec<_>, _>>()
        .map(SuiteSelection)
}

#[derive(Args)]
struct VerifyArgs {
    /// `all`, a suite name, or a comma-separated list.
    #[arg(long, value_parser = parse_suites, default_value = "all")]
    suite: SuiteSelection,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Report path; without it the report goes to stdout.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct OscillatorArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, allow_hyphen_values = true)]
    omega: f64,
    #[arg(long, allow_hyphen_values = true)]
    t_max: f64,
    #[arg(long, allow_hyphen_values = true)]
    dt_out: f64,
    /// Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Model(Error),
    Verification(String),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Model(e)
    }
}

type CmdResult = Result<(), Failure>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |e| Failure::Io(path.to_path_buf(), e)
}

impl OrbitArgs {
    fn base(&self) -> Result<Option<Preset>, Failure> {
        let Some(name) = &self.preset else {
            return Ok(None);
        };
        preset(name).map(Some).ok_or_else(|| {
            let names: Vec<_> = PRESETS.iter().map(|p| p.name).collect();
            Failure::Usage(format!(
                "unknown preset '{name}'; expected one of {}",
                names.join(", ")
            ))
        })
    }

    fn params(&self) -> Result<SystemParams, Failure> {
        let base = self.base()?;
        let k = match (self.k, base) {
            (Some(k), _) => k,
            (None, Some(b)) => RationalK::new(b.k.0, b.k.1)?,
            (None, None) => return Err(Failure::Usage("--k is required without --preset".into())),
        };
        let alpha = need(self.alpha, base.map(|b| b.alpha), "alpha")?;
        let beta = need(self.beta, base.map(|b| b.beta), "beta")?;
        let omega = need(self.omega, base.map(|b| b.omega), "omega")?;
        Ok(SystemParams::new(k, alpha, beta, omega)?)
    }

    fn constants(&self, params: &SystemParams) -> Result<CurveConstants, Failure> {
        let base = self.base()?;
        let energy = need(self.energy, base.map(|b| b.energy), "E")?;
        let separation = need(self.separation, base.map(|b| b.separation), "A")?;
        let delta2 = self.delta2.or(base.map(|b| b.delta2)).unwrap_or(0.0);
        Ok(curve_constants(
            params,
            energy,
            separation,
            self.delta1,
            delta2,
        )?)
    }
}

fn need(v: Option<f64>, from_preset: Option<f64>, flag: &str) -> Result<f64, Failure> {
    v.or(from_preset)
        .ok_or_else(|| Failure::Usage(format!("--{flag} is required without --preset")))
}

fn parse_state(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    v.try_into()
        .map_err(|_| "expected four comma-separated numbers rho,sigma,p_rho,p_sigma".to_string())
}

fn positive(name: &str, x: f64) -> Result<f64, Failure> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Failure::Model(Error::InvalidArgument(format!(
            "{name} must be positive, got {x}"
        ))))
    }
}

fn cmd_trajectory(args: &TrajectoryArgs) -> CmdResult {
    let params = args.orbit.params()?;
    let t_max = match args.t_max {
        Some(t) => t,
        None if args.orbit.preset.is_some() => params.k.q() as f64 * PI / params.omega,
        None => {
            return Err(Failure::Usage(
                "--t-max is required without --preset".into(),
            ))
        }
    };
    let t_max = positive("t_max", t_max)?;
    let dt_out = positive("dt_out", args.dt_out.unwrap_or(t_max / 2000.0))?;
    let traj = match args.state {
        Some(y) => integrate(
            &params,
            &PhasePoint::from_array(Chart::ModifiedPolar, y),
            t_max,
            args.rel_tol,
        )?,
        None => integrate_orbit(
            &params,
            &args.orbit.constants(&params)?,
            t_max,
            args.rel_tol,
        )?,
    };
    let samples = traj.resample(dt_out)?;

    let mut csv = String::from("t,u,v,rho,sigma,p_rho,p_sigma,H,A_phase,L,curve_residual\n");
    let mut uv = Vec::with_capacity(samples.len());
    for s in &samples {
        let c = to_cartesian(&s.point)
            .map(|c| (c.q1, c.q2))
            .unwrap_or((f64::NAN, f64::NAN));
        uv.push(c);
        let p = &s.point;
        csv.push_str(&csv_row(&[
            s.t,
            c.0,
            c.1,
            p.q1,
            p.q2,
            p.p1,
            p.p2,
            s.h,
            s.a_phase,
            s.l,
            s.curve_residual,
        ]));
    }
    write_atomic(&args.out, csv.as_bytes()).map_err(io_err(&args.out))?;
    if let Some(svg) = &args.svg {
        let title = format!("k = {}, trajectory in (u, v)", params.k);
        write_atomic(svg, svg_polyline(&uv, &title).as_bytes()).map_err(io_err(svg))?;
    }
    Ok(())
}

/// Closed-form curve: `θ_Z` over `[0, 2πq]`, `θ_W = (C_k - pθ_Z)/q`, and
/// `(Z, W) = (cos θ_Z, cos θ_W)` mapped back to `(ρ, σ)`.
fn cmd_curve(args: &CurveArgs) -> CmdResult {
    let params = args.orbit.params()?;
    let consts = args.orbit.constants(&params)?;
    let summary = serde_json::to_string_pretty(&consts).expect("constants serialize");
    println!("{summary}");
    if args.out.is_none() && args.svg.is_none() {
        return Ok(());
    }
    let n = args.points.max(2);
    let (p, q) = (params.k.p() as f64, params.k.q() as f64);
    let (sd1, sd2) = (consts.d1.sqrt(), consts.d2.sqrt());
    let mut csv = String::from("theta,Z,W,rho,sigma,u,v,curve_residual\n");
    let mut uv = Vec::with_capacity(n);
    for i in 0..n {
        let theta = 2.0 * PI * q * i as f64 / (n - 1) as f64;
        let theta_w = (consts.c_k - p * theta) / q;
        let (z, w) = (theta.cos(), theta_w.cos());
        let rho = 2.0 * consts.separation / (z * sd1 - consts.energy);
        let sigma =
            ((w * sd2 - params.beta) / (2.0 * consts.separation)).powf(-1.0 / params.k_value());
        let c = to_cartesian(&PhasePoint::polar(rho, sigma, 0.0, 0.0))
            .map(|c| (c.q1, c.q2))
            .unwrap_or((f64::NAN, f64::NAN));
        let res = curve_residual(&params, &consts, z, w, theta.sin() * theta_w.sin());
        uv.push(c);
        csv.push_str(&csv_row(&[theta, z, w, rho, sigma, c.0, c.1, res]));
    }
    if let Some(out) = &args.out {
        write_atomic(out, csv.as_bytes()).map_err(io_err(out))?;
    }
    if let Some(svg) = &args.svg {
        let title = format!("k = {}, closed-form curve in (u, v)", params.k);
        write_atomic(svg, svg_polyline(&uv, &title).as_bytes()).map_err(io_err(svg))?;
    }
    Ok(())
}

fn cmd_spectrum(args: &SpectrumArgs) -> CmdResult {
    let params = SystemParams::new(args.k, args.alpha, args.beta, args.omega)?;
    let data = spectrum(&params, args.m_max)?;
    let mut csv = String::from("n,m,A_n,sqrt_minus_A_n,E_mn,degenerate_with\n");
    for lv in &data.levels {
        let partners: Vec<String> = data
            .levels
            .iter()
            .filter(|o| {
                (o.m, o.n) != (lv.m, lv.n)
                    && energy_difference(&params, (lv.m, lv.n), (o.m, o.n)) == 0.0
            })
            .map(|o| format!("n{}m{}", o.n, o.m))
            .collect();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            lv.n,
            lv.m,
            num(lv.a_n),
            num(lv.sqrt_minus_a),
            num(lv.energy),
            partners.join(";")
        );
    }
    emit(args.out.as_deref(), csv.as_bytes())
        .map_err(io_err(args.out.as_deref().unwrap_or(Path::new("-"))))
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let reports = run_suites(&args.suite.0, args.seed);
    let json = serde_json::to_string_pretty(&reports).expect("reports serialize") + "\n";
    match &args.json {
        Some(path) => {
            write_atomic(path, json.as_bytes()).map_err(io_err(path))?;
            for r in &reports {
                println!(
                    "{:<14} {:>6} cases  max_error {:<12.3e} {}",
                    r.suite,
                    r.cases,
                    r.max_error,
                    if r.pass { "PASS" } else { "FAIL" }
                );
            }
        }
        None => print!("{json}"),
    }
    let failed: Vec<_> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.suite.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "failed suites: {}",
            failed.join(", ")
        )))
    }
}

fn cmd_oscillator(args: &OscillatorArgs) -> CmdResult {
    let omega = positive("omega", args.omega)?;
    let t_max = positive("t_max", args.t_max)?;
    let dt = positive("dt_out", args.dt_out)?;
    let params = SystemParams::new(RationalK::integer(1)?, 0.0, 0.0, omega)?;
    let n = (t_max / dt * (1.0 + 1e-12)).floor() as usize;
    let mut csv = String::from("t,u,v,p_u,p_v,rho,sigma,p_rho,p_sigma,E,A,H,A_phase\n");
    let mut uv = Vec::with_capacity(n + 1);
    let mut worst = 0.0f64;
    for i in 0..=n {
        let t = i as f64 * dt;
        let s = oscillator_trajectory(args.a, args.b, omega, t)?;
        let c = s.cartesian;
        let h = hamiltonian(&params, &c)?;
        let (pol, a_phase) = match s.polar {
            Some(pp) => (
                pp.to_array(),
                separation_constant(&params, &pp).unwrap_or(f64::NAN),
            ),
            None => ([f64::NAN; 4], f64::NAN),
        };
        worst = worst.max((h - s.energy).abs() / s.energy.abs().max(1.0));
        if a_phase.is_finite() {
            worst = worst.max((a_phase - s.separation).abs() / s.separation.abs().max(1.0));
        }
        uv.push((c.q1, c.q2));
        csv.push_str(&csv_row(&[
            t,
            c.q1,
            c.q2,
            c.p1,
            c.p2,
            pol[0],
            pol[1],
            pol[2],
            pol[3],
            s.energy,
            s.separation,
            h,
            a_phase,
        ]));
    }
    emit(args.out.as_deref(), csv.as_bytes())
        .map_err(io_err(args.out.as_deref().unwrap_or(Path::new("-"))))?;
    if let Some(svg) = &args.svg {
        write_atomic(
            svg,
            svg_polyline(&uv, "free oscillator in (u, v)").as_bytes(),
        )
        .map_err(io_err(svg))?;
    }
    if worst > 1e-9 {
        return Err(Failure::Verification(format!(
            "closed-form constants drift by {worst:e}"
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Trajectory(a) => cmd_trajectory(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Oscillator(a) => cmd_oscillator(a),
        Command::Curve(a) => cmd_curve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Failure::Io(path, e)) => {
            eprintln!("error: cannot write {}: {e}", path.display());
            ExitCode::FAILURE
        }
        Err(Failure::Model(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::DomainEscape { .. } => ExitCode::from(EXIT_ESCAPE),
                _ => ExitCode::from(EXIT_PRECONDITION),
            }
        }
    }
}
