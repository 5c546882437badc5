//! Command-line interface for the repetition-code quantum-memory toolkit.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use repmem::analytic::{self, ClosedFormParams};
use repmem::channels::NoiseParams;
use repmem::circuits::{average_fidelity, CodeKind, Decomposition, ProtocolSpec};
use repmem::{fmt_sig12, scan};

/// Exit codes: 0 success, 1 usage error, 2 validation error, 3 verification
/// failure.
const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "repmem",
    about = "Repetition-code quantum memory: simulator, closed forms, break-even analysis",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a closed-form fidelity or coefficient expression.
    Analytic(AnalyticArgs),
    /// Run the density-matrix simulation of a full memory protocol.
    Simulate(SimulateArgs),
    /// Print the break-even inequality p2 < c0 - c1 p1.
    Breakeven(BreakevenArgs),
    /// Parameter-space scans (CSV or JSON output).
    #[command(subcommand)]
    Scan(ScanCommand),
    /// List bundled hardware presets.
    Presets(PresetArgs),
    /// Run the full verification suite; exits nonzero on any failure.
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormulaName {
    /// Average fidelity of an idle qubit.
    Idle,
    /// One cycle of the three-qubit bit-flip code.
    Bit,
    /// One cycle of the three-qubit phase-flip code.
    Phase,
    /// One cycle of the n-qubit phase-flip code (requires --n).
    PhaseN,
    /// N reset cycles at total time t (requires --cycles).
    PhaseReset,
    /// Infinite-cycle limit of the reset formula.
    PhaseResetLimit,
    /// Two no-reset cycles at total time t.
    Noreset2,
    /// One-qubit gate-error coefficient f1 (requires --decomp).
    F1,
    /// Two-qubit gate-error coefficient f2 (requires --decomp).
    F2,
    /// Linearized fidelity with gate errors (requires --decomp, --p1, --p2).
    PhaseError,
}

#[derive(Args)]
struct TimeArgs {
    /// Relaxation time T1 ("inf" accepted).
    #[arg(long, value_parser = parse_time)]
    t1: f64,
    /// Pure dephasing time T2* ("inf" accepted).
    #[arg(long, value_parser = parse_time)]
    t2star: f64,
}

#[derive(Args)]
struct AnalyticArgs {
    #[arg(long, value_enum)]
    formula: FormulaName,
    #[command(flatten)]
    times: TimeArgs,
    /// Idle or total storage time, per formula.
    #[arg(long)]
    t: f64,
    /// Code size for phase-n (odd).
    #[arg(long)]
    n: Option<usize>,
    /// Cycle count for phase-reset.
    #[arg(long)]
    cycles: Option<usize>,
    /// Circuit realization for coefficient formulas.
    #[arg(long, value_enum)]
    decomp: Option<DecompArg>,
    /// One-qubit gate error probability.
    #[arg(long)]
    p1: Option<f64>,
    /// Two-qubit gate error probability.
    #[arg(long)]
    p2: Option<f64>,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecompArg {
    Ideal,
    Cnot,
    Cscz,
}

impl From<DecompArg> for Decomposition {
    fn from(d: DecompArg) -> Self {
        match d {
            DecompArg::Ideal => Decomposition::Ideal,
            DecompArg::Cnot => Decomposition::Cnot,
            DecompArg::Cscz => Decomposition::Cscz,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CodeArg {
    Bit,
    Phase,
}

#[derive(Args)]
struct SimulateArgs {
    /// Which repetition code to run.
    #[arg(long, value_enum)]
    code: CodeArg,
    /// Circuit realization.
    #[arg(long, value_enum, default_value = "ideal")]
    decomp: DecompArg,
    /// Code size (odd; decomposed circuits require 3).
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Number of error-correction cycles.
    #[arg(long, default_value_t = 1)]
    cycles: usize,
    /// Reset ancillas between cycles.
    #[arg(long, overrides_with = "no_reset")]
    reset: bool,
    #[arg(long = "no-reset")]
    no_reset: bool,
    #[command(flatten)]
    times: TimeArgs,
    /// Total storage time.
    #[arg(long)]
    ttot: f64,
    #[arg(long, default_value_t = 0.0)]
    p1: f64,
    #[arg(long, default_value_t = 0.0)]
    p2: f64,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct BreakevenArgs {
    /// Circuit realization (cnot or cscz).
    #[arg(long, value_enum)]
    decomp: DecompArg,
    #[command(flatten)]
    times: TimeArgs,
    /// Idle time of the single correction cycle.
    #[arg(long)]
    t: f64,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum ScanCommand {
    /// Optimal code size over (T1/T2*, t/T2*), perfect gates.
    Fig3(Fig3Args),
    /// Optimal cycle count over (T1/T2*, p2), simulated with gate noise.
    Fig4(Fig4Args),
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct Fig3Args {
    #[arg(long, default_value_t = 0.5)]
    t1_min: f64,
    #[arg(long, default_value_t = 100.0)]
    t1_max: f64,
    #[arg(long, default_value_t = 40)]
    t1_points: usize,
    #[arg(long, default_value_t = 0.01)]
    t_min: f64,
    #[arg(long, default_value_t = 3.0)]
    t_max: f64,
    #[arg(long, default_value_t = 40)]
    t_points: usize,
    /// Largest odd code size to consider.
    #[arg(long, default_value_t = 9)]
    nmax: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct Fig4Args {
    /// Total storage time in units of T2*.
    #[arg(long, default_value_t = 0.1)]
    ttot: f64,
    #[arg(long, default_value_t = 2.0)]
    t1_min: f64,
    #[arg(long, default_value_t = 100.0)]
    t1_max: f64,
    #[arg(long, default_value_t = 30)]
    t1_points: usize,
    #[arg(long, default_value_t = 1e-4)]
    p2_min: f64,
    #[arg(long, default_value_t = 1e-1)]
    p2_max: f64,
    #[arg(long, default_value_t = 30)]
    p2_points: usize,
    /// Largest cycle count to consider.
    #[arg(long, default_value_t = 8)]
    nmax_cycles: usize,
    #[arg(long, value_enum, default_value = "cscz")]
    decomp: DecompArg,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct PresetArgs {
    /// Preset file to load instead of the bundled tables.
    #[arg(long)]
    file: Option<std::path::PathBuf>,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

fn parse_time(s: &str) -> Result<f64, String> {
    if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
        return Ok(f64::INFINITY);
    }
    s.parse::<f64>().map_err(|e| e.to_string())
}

fn emit(out: Option<&std::path::PathBuf>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help/version requests are success; anything else is a usage error.
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Analytic(args) => {
            let value = eval_formula(&args)?;
            emit(args.out.as_ref(), &format!("{}\n", fmt_sig12(value))).map_err(stringify)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate(args) => {
            let spec = ProtocolSpec {
                code: match args.code {
                    CodeArg::Bit => CodeKind::BitFlip,
                    CodeArg::Phase => CodeKind::PhaseFlip,
                },
                n: args.n,
                decomposition: args.decomp.into(),
                cycles: args.cycles,
                reset: args.reset || !args.no_reset,
                noise: NoiseParams::new(args.times.t1, args.times.t2star, args.p1, args.p2)
                    .map_err(stringify)?,
                t_tot: args.ttot,
            };
            spec.validate().map_err(stringify)?;
            let f = average_fidelity(&spec).map_err(stringify)?;
            emit(args.out.as_ref(), &format!("{}\n", fmt_sig12(f))).map_err(stringify)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Breakeven(args) => {
            let decomp: Decomposition = args.decomp.into();
            if decomp == Decomposition::Ideal {
                return Err("breakeven requires --decomp cnot or cscz".into());
            }
            let p = ClosedFormParams::new(args.times.t1, args.times.t2star, args.t)
                .map_err(stringify)?;
            let line = analytic::breakeven_inequality(decomp, &p);
            let text = if line.c0 > 0.0 {
                format!(
                    "p2 < {} - {}*p1\nc0 = {}\nc1 = {}\n",
                    fmt_two_sig(line.c0),
                    fmt_two_sig(line.c1),
                    fmt_sig12(line.c0),
                    fmt_sig12(line.c1)
                )
            } else {
                format!(
                    "break-even unreachable at these parameters (c0 <= 0)\nc0 = {}\nc1 = {}\n",
                    fmt_sig12(line.c0),
                    fmt_sig12(line.c1)
                )
            };
            emit(args.out.as_ref(), &text).map_err(stringify)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Scan(scan_cmd) => {
            let (result, format, out) = match scan_cmd {
                ScanCommand::Fig3(a) => {
                    check_grid("t1", a.t1_min, a.t1_max, a.t1_points)?;
                    check_grid("t", a.t_min, a.t_max, a.t_points)?;
                    let t1s = scan::log_grid(a.t1_min, a.t1_max, a.t1_points);
                    let ts = scan::log_grid(a.t_min, a.t_max, a.t_points);
                    (
                        scan::scan_fig3(&t1s, &ts, a.nmax).map_err(stringify)?,
                        a.format,
                        a.out,
                    )
                }
                ScanCommand::Fig4(a) => {
                    check_grid("t1", a.t1_min, a.t1_max, a.t1_points)?;
                    check_grid("p2", a.p2_min, a.p2_max, a.p2_points)?;
                    let t1s = scan::log_grid(a.t1_min, a.t1_max, a.t1_points);
                    let p2s = scan::log_grid(a.p2_min, a.p2_max, a.p2_points);
                    (
                        scan::scan_fig4(a.ttot, &t1s, &p2s, a.nmax_cycles, a.decomp.into())
                            .map_err(stringify)?,
                        a.format,
                        a.out,
                    )
                }
            };
            let text = match format {
                OutputFormat::Csv => result.to_csv(),
                OutputFormat::Json => format!("{:#}\n", result.to_json()),
            };
            emit(out.as_ref(), &text).map_err(stringify)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Presets(args) => {
            let presets = match &args.file {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(stringify)?;
                    scan::load_presets(&text).map_err(stringify)?
                }
                None => scan::bundled_presets(),
            };
            let mut text = String::from("name              t1_us      t2_us      t2star_us  t2hahn_us\n");
            for p in &presets {
                let fmt_opt = |v: Option<f64>| match v {
                    Some(x) => format!("{x:<10}"),
                    None => format!("{:<10}", "-"),
                };
                text.push_str(&format!(
                    "{:<17} {:<10} {}{}{}\n",
                    p.name,
                    p.t1_us,
                    fmt_opt(p.t2_us),
                    fmt_opt(p.t2star_us),
                    fmt_opt(p.t2hahn_us)
                ));
            }
            emit(args.out.as_ref(), &text).map_err(stringify)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify => {
            let results = repmem::acceptance::run_all();
            let mut all_ok = true;
            for r in &results {
                println!("{}", r.line());
                all_ok &= r.passed;
            }
            if all_ok {
                println!("all {} criteria passed", results.len());
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(EXIT_VERIFY))
            }
        }
    }
}

fn check_grid(name: &str, lo: f64, hi: f64, points: usize) -> Result<(), String> {
    if points == 0 {
        return Err(format!("{name}: grid needs at least one point"));
    }
    if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || hi < lo {
        return Err(format!("{name}: invalid grid range [{lo}, {hi}]"));
    }
    Ok(())
}

/// Renders a positive value rounded to two significant figures.
fn fmt_two_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    let mag = 10f64.powi(exp - 1);
    let rounded = (x / mag).round() * mag;
    // Rounding can bump the exponent (0.0096 -> 0.010).
    let exp = rounded.abs().log10().floor() as i32;
    let decimals = (1 - exp).max(0) as usize;
    format!("{rounded:.decimals$}")
}

fn stringify(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn eval_formula(args: &AnalyticArgs) -> Result<f64, String> {
    let p = ClosedFormParams::new(args.times.t1, args.times.t2star, args.t).map_err(stringify)?;
    let need_decomp = || -> Result<Decomposition, String> {
        args.decomp
            .map(Into::into)
            .ok_or_else(|| "this formula requires --decomp".to_string())
    };
    Ok(match args.formula {
        FormulaName::Idle => analytic::f_idle(&p),
        FormulaName::Bit => analytic::f_bit(&p),
        FormulaName::Phase => analytic::f_phase(&p),
        FormulaName::PhaseN => {
            let n = args.n.ok_or("phase-n requires --n")?;
            analytic::f_phase_n(n, &p).map_err(stringify)?
        }
        FormulaName::PhaseReset => {
            let cycles = args.cycles.ok_or("phase-reset requires --cycles")?;
            analytic::f_phase_reset(cycles, &p).map_err(stringify)?
        }
        FormulaName::PhaseResetLimit => analytic::f_phase_reset_limit(&p),
        FormulaName::Noreset2 => analytic::f_phase_noreset_2(&p),
        FormulaName::F1 => analytic::gate_error_coefficients(need_decomp()?, &p).0,
        FormulaName::F2 => analytic::gate_error_coefficients(need_decomp()?, &p).1,
        FormulaName::PhaseError => {
            let p1 = args.p1.ok_or("phase-error requires --p1")?;
            let p2 = args.p2.ok_or("phase-error requires --p2")?;
            if !(0.0..=1.0).contains(&p1) || !(0.0..=1.0).contains(&p2) {
                return Err("p1 and p2 must lie in [0, 1]".into());
            }
            analytic::f_phase_error(need_decomp()?, &p, p1, p2)
        }
    })
}
