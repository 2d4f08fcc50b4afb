//! `spinscat`: spin entanglement generated by elastic two-particle scattering.
//!
//! Data goes to stdout, diagnostics to stderr. Exit codes: 0 success,
//! 1 usage error, 2 data or validation error.

use std::f64::consts::PI;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use spinscat::checks;
use spinscat::entanglement::{closed_form_entanglement, entanglement_entropy, EntanglementReport};
use spinscat::partial_wave::{apply_central_smatrix, couple_orbital_spin, PartialWaveLabels, PhaseShiftTable};
use spinscat::spin_smatrix::{apply_spin_smatrix, SpinPhasePair};
use spinscat::spin_states::{in_state_from_angle, Basis, MagicKet, SingleSpinState, TwoSpinState};
use spinscat::su2::{self, AngularMomentum, Projection};

#[derive(Parser, Debug)]
#[command(name = "spinscat", version, about = "Spin entanglement generated in elastic scattering of two spin-1/2 particles")]
struct Cli {
    /// Read every angle argument in degrees instead of radians.
    #[arg(long, global = true)]
    degrees: bool,

    /// Machine-readable output format (default: human-readable text for
    /// `scatter`, `tables` and `check`; csv for `sweep` and `partial-wave`).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scatter the in-state cos θ|++⟩ + sin θ|+-⟩ with channel phases δ0, δ1.
    Scatter {
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
        /// Singlet (s = 0) phase shift.
        #[arg(long, allow_negative_numbers = true)]
        delta0: f64,
        /// Triplet (s = 1) phase shift.
        #[arg(long, allow_negative_numbers = true)]
        delta1: f64,
    },
    /// Entanglement over a (θ, Δδ) grid with inclusive endpoints. Output
    /// angles are always in radians.
    Sweep {
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        theta_start: f64,
        /// Defaults to π (180 with --degrees).
        #[arg(long, allow_negative_numbers = true)]
        theta_end: Option<f64>,
        #[arg(long, default_value_t = 64)]
        theta_count: usize,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        delta_start: f64,
        /// Defaults to π (180 with --degrees).
        #[arg(long, allow_negative_numbers = true)]
        delta_end: Option<f64>,
        #[arg(long, default_value_t = 64)]
        delta_count: usize,
    },
    /// Entanglement across relative momenta q in partial wave l, using
    /// tabulated phase shifts.
    PartialWave {
        /// Phase-shift CSV with header `l,s,q,delta`.
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        l: u32,
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long)]
        q_start: f64,
        #[arg(long)]
        q_end: f64,
        #[arg(long)]
        q_count: usize,
    },
    /// Print reference tables: `cgc J1 J2`, `magic`, `coupling L S`.
    Tables {
        #[arg(value_enum)]
        what: TableKind,
        /// Angular momenta such as `1/2` or `1`.
        args: Vec<String>,
    },
    /// Run the invariant suite and report pass/fail per property.
    Check,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum TableKind {
    Cgc,
    Magic,
    Coupling,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
}

impl From<spinscat::Error> for CliError {
    fn from(e: spinscat::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

/// `%.12g`-style formatting.
fn sig12(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let s = format!("{:.*}", (11 - exp).max(0) as usize, v);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{v:.11e}");
        let (mantissa, e) = s.split_once('e').expect("scientific notation");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{e}")
    }
}

fn complex(z: Complex64) -> String {
    format!("{}{}{}i", sig12(z.re), if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) { "-" } else { "+" }, sig12(z.im.abs()))
}

fn angle(v: f64, degrees: bool) -> f64 {
    if degrees {
        v.to_radians()
    } else {
        v
    }
}

fn linspace(start: f64, end: f64, count: usize) -> Vec<f64> {
    let step = (end - start) / (count - 1) as f64;
    (0..count)
        .map(|k| if k + 1 == count { end } else { start + step * k as f64 })
        .collect()
}

fn check_range(name: &str, start: f64, end: f64, count: usize) -> CliResult {
    if !(start.is_finite() && end.is_finite()) {
        return Err(CliError::Usage(format!("{name} range must be finite")));
    }
    if start >= end {
        return Err(CliError::Usage(format!("{name} range needs start < end, got {start} >= {end}")));
    }
    if count < 2 {
        return Err(CliError::Usage(format!("{name} count must be at least 2, got {count}")));
    }
    Ok(())
}

fn in_state(theta: f64) -> CliResult<TwoSpinState> {
    in_state_from_angle(theta).map_err(|e| CliError::Usage(e.to_string()))
}

#[derive(Serialize)]
struct Amplitude {
    ket: &'static str,
    re: f64,
    im: f64,
}

fn amplitudes(state: &TwoSpinState) -> Vec<Amplitude> {
    state
        .amplitudes()
        .iter()
        .zip(state.basis().labels())
        .map(|(z, ket)| Amplitude { ket, re: z.re, im: z.im })
        .collect()
}

#[derive(Serialize)]
struct RunReport {
    theta: f64,
    delta0: f64,
    delta1: f64,
    delta_diff: f64,
    out_product: Vec<Amplitude>,
    out_coupled: Vec<Amplitude>,
    entanglement: EntanglementReport,
    x: f64,
    closed_form: f64,
    residual: f64,
}

const RESIDUAL_TOL: f64 = 1e-10;

fn cmd_scatter(out: &mut impl Write, format: Option<Format>, theta: f64, phases: SpinPhasePair) -> CliResult {
    let state = in_state(theta)?;
    let out_state = apply_spin_smatrix(&state, phases)?;
    let entanglement = entanglement_entropy(&out_state)?;
    let closed_form = closed_form_entanglement(theta, phases.delta0, phases.delta1);
    let report = RunReport {
        theta,
        delta0: phases.delta0,
        delta1: phases.delta1,
        delta_diff: phases.delta_diff(),
        out_product: amplitudes(&out_state),
        out_coupled: amplitudes(&out_state.in_basis(Basis::Coupled)),
        entanglement,
        x: entanglement.x(),
        closed_form,
        residual: (closed_form - entanglement.entropy_bits).abs(),
    };

    match format {
        Some(Format::Json) => writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))?,
        Some(Format::Csv) => {
            writeln!(out, "key,value")?;
            let scalars = [
                ("theta", report.theta),
                ("delta0", report.delta0),
                ("delta1", report.delta1),
                ("delta_diff", report.delta_diff),
            ];
            for (k, v) in scalars {
                writeln!(out, "{k},{}", sig12(v))?;
            }
            for (prefix, amps) in [("product", &report.out_product), ("coupled", &report.out_coupled)] {
                for a in amps {
                    writeln!(out, "{prefix}_{}_re,{}", a.ket, sig12(a.re))?;
                    writeln!(out, "{prefix}_{}_im,{}", a.ket, sig12(a.im))?;
                }
            }
            let e = &report.entanglement;
            let tail = [
                ("schmidt_plus", e.schmidt.0),
                ("schmidt_minus", e.schmidt.1),
                ("eigenvalue_plus", e.eigenvalues.0),
                ("eigenvalue_minus", e.eigenvalues.1),
                ("x", report.x),
                ("entropy_bits", e.entropy_bits),
                ("closed_form", report.closed_form),
                ("residual", report.residual),
            ];
            for (k, v) in tail {
                writeln!(out, "{k},{}", sig12(v))?;
            }
        }
        None => {
            writeln!(out, "in-state   theta = {}", sig12(theta))?;
            writeln!(
                out,
                "phases     delta0 = {}, delta1 = {}, delta0 - delta1 = {}",
                sig12(phases.delta0),
                sig12(phases.delta1),
                sig12(report.delta_diff)
            )?;
            writeln!(out, "out-state (product basis)")?;
            for a in &report.out_product {
                writeln!(out, "  |{}⟩  {}", a.ket, complex(Complex64::new(a.re, a.im)))?;
            }
            writeln!(out, "out-state (coupled basis)")?;
            for a in &report.out_coupled {
                writeln!(out, "  |{}⟩  {}", a.ket, complex(Complex64::new(a.re, a.im)))?;
            }
            let e = &report.entanglement;
            writeln!(out, "schmidt coefficients   {}, {}", sig12(e.schmidt.0), sig12(e.schmidt.1))?;
            writeln!(out, "reduced eigenvalues    {}, {}", sig12(e.eigenvalues.0), sig12(e.eigenvalues.1))?;
            writeln!(out, "x                      {}", sig12(report.x))?;
            writeln!(out, "entropy (bits)         {}", sig12(e.entropy_bits))?;
            writeln!(out, "closed form (bits)     {}", sig12(report.closed_form))?;
            writeln!(out, "residual               {}", sig12(report.residual))?;
        }
    }
    if report.residual >= RESIDUAL_TOL {
        return Err(CliError::Data(format!(
            "closed-form residual {:e} exceeds {RESIDUAL_TOL:e}",
            report.residual
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepRow {
    theta: f64,
    delta_diff: f64,
    entanglement: f64,
}

fn cmd_sweep(out: &mut impl Write, format: Format, thetas: &[f64], deltas: &[f64]) -> CliResult {
    let rows: Vec<SweepRow> = thetas
        .par_iter()
        .flat_map_iter(|&theta| {
            deltas.iter().map(move |&dd| SweepRow {
                theta,
                delta_diff: dd,
                entanglement: closed_form_entanglement(theta, dd, 0.0),
            })
        })
        .collect();
    match format {
        Format::Csv => {
            writeln!(out, "theta,delta_diff,entanglement")?;
            for r in &rows {
                writeln!(out, "{},{},{}", r.theta, r.delta_diff, r.entanglement)?;
            }
        }
        Format::Json => writeln!(out, "{}", serde_json::to_string(&rows).expect("rows serialize"))?,
    }
    Ok(())
}

#[derive(Serialize)]
struct PartialWaveRow {
    q: f64,
    delta_l0: f64,
    delta_l1: f64,
    entanglement: f64,
}

fn cmd_partial_wave(out: &mut impl Write, format: Format, table_path: &PathBuf, l: u32, theta: f64, qs: &[f64]) -> CliResult {
    in_state(theta)?;
    let table = PhaseShiftTable::load(table_path).map_err(|e| CliError::Data(format!("{}: {e}", table_path.display())))?;
    let (s, c) = theta.sin_cos();
    let b = SingleSpinState::real(c, s)?;
    let a = SingleSpinState::up();
    let l_am = AngularMomentum::integer(l);
    let context = |e: spinscat::Error| CliError::Data(format!("{}: {e}", table_path.display()));

    let mut rows = Vec::with_capacity(qs.len());
    for &q in qs {
        let labels = PartialWaveLabels::new([0.0; 3], q, l_am, Projection::integer(0))?;
        let fiber = apply_central_smatrix(&a, &b, &labels, &table).map_err(context)?;
        rows.push(PartialWaveRow {
            q,
            delta_l0: fiber.phases.delta0,
            delta_l1: fiber.phases.delta1,
            entanglement: entanglement_entropy(&fiber.spin)?.entropy_bits,
        });
    }
    match format {
        Format::Csv => {
            writeln!(out, "q,delta_l0,delta_l1,entanglement")?;
            for r in &rows {
                writeln!(out, "{},{},{},{}", r.q, r.delta_l0, r.delta_l1, r.entanglement)?;
            }
        }
        Format::Json => writeln!(out, "{}", serde_json::to_string(&rows).expect("rows serialize"))?,
    }
    Ok(())
}

fn parse_am(s: &str) -> CliResult<AngularMomentum> {
    s.parse().map_err(|e: spinscat::Error| CliError::Usage(e.to_string()))
}

fn two_args(what: &str, args: &[String]) -> CliResult<(AngularMomentum, AngularMomentum)> {
    match args {
        [a, b] => Ok((parse_am(a)?, parse_am(b)?)),
        _ => Err(CliError::Usage(format!("`tables {what}` takes exactly two angular momenta, e.g. `tables {what} 1 1/2`"))),
    }
}

fn print_matrix(
    out: &mut impl Write,
    format: Option<Format>,
    rows: &[String],
    cols: &[String],
    entry: impl Fn(usize, usize) -> f64,
) -> CliResult {
    match format {
        Some(Format::Json) => {
            let matrix: Vec<Vec<f64>> = (0..rows.len()).map(|r| (0..cols.len()).map(|c| entry(r, c)).collect()).collect();
            writeln!(out, "{}", json!({ "rows": rows, "cols": cols, "matrix": matrix }))?;
        }
        Some(Format::Csv) => {
            writeln!(out, "row,{}", cols.join(","))?;
            for (r, label) in rows.iter().enumerate() {
                let vals: Vec<String> = (0..cols.len()).map(|c| sig12(entry(r, c))).collect();
                writeln!(out, "{label},{}", vals.join(","))?;
            }
        }
        None => {
            let width = 16;
            write!(out, "{:>12}", "")?;
            for c in cols {
                write!(out, "{c:>width$}")?;
            }
            writeln!(out)?;
            for (r, label) in rows.iter().enumerate() {
                write!(out, "{label:>12}")?;
                for c in 0..cols.len() {
                    write!(out, "{:>width$}", sig12(entry(r, c)))?;
                }
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

fn cmd_tables(out: &mut impl Write, format: Option<Format>, what: TableKind, args: &[String]) -> CliResult {
    match what {
        TableKind::Cgc => {
            let (j1, j2) = two_args("cgc", args)?;
            let m = su2::clebsch_gordan_matrix(j1, j2).map_err(|e| CliError::Usage(e.to_string()))?;
            let rows: Vec<String> = su2::coupled_labels(j1, j2).iter().map(|(j, mj)| format!("|{j} {mj}⟩")).collect();
            let cols: Vec<String> = su2::product_labels(j1, j2).iter().map(|(a, b)| format!("|{a};{b}⟩")).collect();
            print_matrix(out, format, &rows, &cols, |r, c| m[(r, c)])
        }
        TableKind::Coupling => {
            let (l, s) = two_args("coupling", args)?;
            let t = couple_orbital_spin(l, s).map_err(|e| CliError::Usage(e.to_string()))?;
            let rows: Vec<String> = t.rows.iter().map(|(j, j3)| format!("|{j} {j3}⟩")).collect();
            let cols: Vec<String> = t.cols.iter().map(|(m, chi)| format!("|{m};{chi}⟩")).collect();
            print_matrix(out, format, &rows, &cols, |r, c| t.matrix[(r, c)])
        }
        TableKind::Magic => {
            if !args.is_empty() {
                return Err(CliError::Usage("`tables magic` takes no arguments".into()));
            }
            let mut entries = Vec::new();
            for ket in MagicKet::ALL {
                let state = ket.state();
                let e = entanglement_entropy(&state)?.entropy_bits;
                entries.push((ket.label(), state, e));
            }
            match format {
                Some(Format::Json) => {
                    let v: Vec<_> = entries
                        .iter()
                        .map(|(label, s, e)| {
                            json!({
                                "ket": label,
                                "product": amplitudes(s),
                                "coupled": amplitudes(&s.in_basis(Basis::Coupled)),
                                "entanglement": e,
                            })
                        })
                        .collect();
                    writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"))?;
                }
                Some(Format::Csv) => {
                    writeln!(out, "ket,basis,++/00,+-/1-1,-+/10,--/11,entanglement")?;
                    for (label, s, e) in &entries {
                        for basis in [Basis::Product, Basis::Coupled] {
                            let amps: Vec<String> = s.in_basis(basis).amplitudes().iter().map(|z| sig12(z.re)).collect();
                            let name = if basis == Basis::Product { "product" } else { "coupled" };
                            writeln!(out, "{label},{name},{},{}", amps.join(","), sig12(*e))?;
                        }
                    }
                }
                None => {
                    for (label, s, e) in &entries {
                        writeln!(out, "{label:<6} {s}")?;
                        writeln!(out, "{:<6} = {}", "", s.in_basis(Basis::Coupled))?;
                        writeln!(out, "{:<6} E = {}", "", sig12(*e))?;
                    }
                }
            }
            Ok(())
        }
    }
}

fn cmd_check(out: &mut impl Write, format: Option<Format>) -> CliResult {
    let outcomes = checks::run_all()?;
    match format {
        Some(Format::Json) => writeln!(out, "{}", serde_json::to_string_pretty(&outcomes).expect("json"))?,
        Some(Format::Csv) => {
            writeln!(out, "name,passed,worst,tolerance")?;
            for o in &outcomes {
                writeln!(out, "{},{},{},{}", o.name, o.passed, sig12(o.worst), sig12(o.tolerance))?;
            }
        }
        None => {
            for o in &outcomes {
                let status = if o.passed { "PASS" } else { "FAIL" };
                writeln!(out, "{status}  {:<48} worst {:<20} tol {}", o.name, sig12(o.worst), sig12(o.tolerance))?;
            }
        }
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if failed > 0 {
        return Err(CliError::Data(format!("{failed} of {} checks failed", outcomes.len())));
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let deg = cli.degrees;
    let full_turn_half = if deg { 180.0 } else { PI };
    match cli.command {
        Command::Scatter { theta, delta0, delta1 } => {
            let phases = SpinPhasePair::new(angle(delta0, deg), angle(delta1, deg));
            cmd_scatter(&mut out, cli.format, angle(theta, deg), phases)?;
        }
        Command::Sweep {
            theta_start,
            theta_end,
            theta_count,
            delta_start,
            delta_end,
            delta_count,
        } => {
            let theta_end = theta_end.unwrap_or(full_turn_half);
            let delta_end = delta_end.unwrap_or(full_turn_half);
            check_range("theta", theta_start, theta_end, theta_count)?;
            check_range("delta", delta_start, delta_end, delta_count)?;
            let thetas = linspace(angle(theta_start, deg), angle(theta_end, deg), theta_count);
            let deltas = linspace(angle(delta_start, deg), angle(delta_end, deg), delta_count);
            cmd_sweep(&mut out, cli.format.unwrap_or(Format::Csv), &thetas, &deltas)?;
        }
        Command::PartialWave {
            table,
            l,
            theta,
            q_start,
            q_end,
            q_count,
        } => {
            check_range("q", q_start, q_end, q_count)?;
            let qs = linspace(q_start, q_end, q_count);
            cmd_partial_wave(&mut out, cli.format.unwrap_or(Format::Csv), &table, l, angle(theta, deg), &qs)?;
        }
        Command::Tables { what, args } => cmd_tables(&mut out, cli.format, what, &args)?,
        Command::Check => {
            let result = cmd_check(&mut out, cli.format);
            out.flush()?;
            result?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
