//! Command-line surface: construct generating vectors, export points,
//! evaluate the criterion on constructed or ingested nets, run shifted
//! integration experiments, and sweep criterion tables.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hodn::cbc::{cbc_construct_fast, cbc_construct_naive, cbc_error_bound, BoundInfo, CbcConfig, ConstructionResult};
use hodn::criterion::{criterion_b, criterion_b_dual_oracle, CriterionParams};
use hodn::error::HodnError;
use hodn::galois::GFPoly;
use hodn::interlace::interlace_net;
use hodn::pointset::{self, checked_pow, generate_points, PointSet};
use hodn::randomize::{rmse_experiment, test_function};
use hodn::weights::parse_weights;
use hodn::Result;

#[derive(Parser)]
#[command(name = "hodn", about = "Higher order digital nets via interlaced polynomial lattices")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Search a generating vector component by component and write it as JSON
    Construct(ConstructArgs),
    /// Export the points of a constructed net
    Points(PointsArgs),
    /// Evaluate the quality criterion on a constructed or ingested net
    Criterion(CriterionArgs),
    /// Randomly shifted integration experiment on a constructed net
    Integrate(IntegrateArgs),
    /// Criterion values over a range of m, as CSV
    Table(TableArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Fast,
    Naive,
}

#[derive(Clone, Copy, ValueEnum)]
enum PointFormat {
    Csv,
    Bin,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, default_value_t = 2)]
    b: u32,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    alpha: u32,
    #[arg(long)]
    d: u32,
    /// Weight spec: "1", "j^-2", "list:g1,g2,...", or "general:@file"
    #[arg(long)]
    weights: String,
    /// Modulus override, as an integer encoding or "x^4+x+1" text
    #[arg(long)]
    p: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::Fast)]
    mode: Mode,
    /// Exponent for the attached error bound, in (1/(2 min(alpha,d)), 1]
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

fn cmd_construct(a: &ConstructArgs) -> Result<()> {
    let weights = parse_weights(&a.weights, a.s)?;
    let modulus = a.p.as_deref().map(|t| GFPoly::parse(a.b, t)).transpose()?;
    let cfg = CbcConfig {
        b: a.b,
        m: a.m,
        s: a.s,
        alpha: a.alpha,
        d: a.d,
        weights,
        modulus,
    };
    let mut res = match a.mode {
        Mode::Fast => cbc_construct_fast(&cfg),
        Mode::Naive => cbc_construct_naive(&cfg),
    }?;
    if let Some(lambda) = a.lambda {
        let params = CriterionParams::new(a.b, a.alpha, a.d)?;
        let value = cbc_error_bound(&params, &res.weights, a.m, res.q.len(), lambda)?;
        res.bound = Some(BoundInfo { lambda, value });
    }
    write_json(&a.out, &res)?;
    println!("B_final = {:.2e}", res.b_final);
    if let Some(b) = &res.bound {
        println!("bound(lambda={}) = {:.2e}", b.lambda, b.value);
    }
    Ok(())
}

#[derive(Args)]
struct PointsArgs {
    /// Construction JSON produced by `construct`
    #[arg(long)]
    net: PathBuf,
    /// Emit the interlaced net (default) rather than the raw lattice points
    #[arg(long, conflicts_with = "raw")]
    interlaced: bool,
    #[arg(long)]
    raw: bool,
    #[arg(long, value_enum, default_value_t = PointFormat::Csv)]
    format: PointFormat,
    #[arg(long)]
    out: PathBuf,
}

fn cmd_points(a: &PointsArgs) -> Result<()> {
    let res = read_construction(&a.net)?;
    let base = generate_points(&res.lattice()?)?;
    let pts = if a.raw {
        base
    } else {
        interlace_net(&base, res.d)?
    };
    let mut w = BufWriter::new(File::create(&a.out)?);
    match a.format {
        PointFormat::Csv => pointset::write_csv(&pts, &mut w)?,
        PointFormat::Bin => pointset::write_binary(&pts, &mut w)?,
    }
    w.flush()?;
    println!("{} points, dim {}", pts.n_points(), pts.dim);
    Ok(())
}

#[derive(Args)]
struct CriterionArgs {
    /// Construction JSON; mutually exclusive with point/direction files
    #[arg(long, conflicts_with_all = ["points", "external"])]
    net: Option<PathBuf>,
    /// Point file written by `points` (csv or bin, sniffed)
    #[arg(long, conflicts_with = "external")]
    points: Option<PathBuf>,
    /// External net: generating-matrix file or direction-number table
    #[arg(long)]
    external: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    b: u32,
    /// Digit precision; required for csv points and external nets
    #[arg(long)]
    m: Option<u32>,
    /// Number of interlaced coordinates; required unless --net is given
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    alpha: u32,
    #[arg(long)]
    d: u32,
    #[arg(long)]
    weights: String,
    /// Also print the brute-force dual-space value and its truncation bound
    #[arg(long)]
    oracle: bool,
}

/// The criterion operates on the raw (pre-interlacing) `d*s`-dimensional
/// lattice points at `m` digits.
fn cmd_criterion(a: &CriterionArgs) -> Result<()> {
    let params = CriterionParams::new(a.b, a.alpha, a.d)?;
    let (points, s, lattice) = if let Some(net) = &a.net {
        let res = read_construction(net)?;
        if res.alpha != a.alpha || res.d != a.d || res.b != a.b {
            return Err(HodnError::InvalidParameter(
                "flags disagree with the construction file; pass matching --b/--alpha/--d".into(),
            ));
        }
        let lat = res.lattice()?;
        (generate_points(&lat)?, res.s, Some(lat))
    } else {
        let s = a.s.ok_or_else(|| {
            HodnError::InvalidParameter("--s is required without --net".into())
        })?;
        let pts = if let Some(path) = &a.points {
            read_points(path, a.b, a.m)?
        } else if let Some(path) = &a.external {
            let m = a.m.ok_or_else(|| {
                HodnError::InvalidParameter("--m is required with --external".into())
            })?;
            pointset::load_external_net(path, a.d as usize * s, m)?
        } else {
            return Err(HodnError::InvalidParameter(
                "need one of --net, --points, --external".into(),
            ));
        };
        if pts.dim != a.d as usize * s {
            return Err(HodnError::DimensionMismatch(format!(
                "point dim {} != d*s = {}",
                pts.dim,
                a.d as usize * s
            )));
        }
        (pts, s, None)
    };
    let weights = parse_weights(&a.weights, s)?;
    let b_val = criterion_b(&params, &points, &weights)?;
    println!("B = {:.17e}", b_val);
    if a.oracle {
        let lat = lattice.ok_or_else(|| {
            HodnError::InvalidParameter("--oracle needs --net (a polynomial lattice)".into())
        })?;
        let digit_cap = lat.m + 10;
        let work = (checked_pow(lat.b, lat.m)? as f64).powi(lat.dim() as i32);
        if work > 1e8 {
            return Err(HodnError::BudgetExceeded(format!(
                "dual-space oracle would enumerate {work:.1e} vectors"
            )));
        }
        let (oracle, tail) = criterion_b_dual_oracle(&params, &lat, &weights, digit_cap)?;
        println!("oracle = {:.17e} (truncation bound {:.2e})", oracle, tail);
    }
    Ok(())
}

#[derive(Args)]
struct IntegrateArgs {
    #[arg(long)]
    net: PathBuf,
    /// Integrand; test1 is (1 + sum_j x_j/j^2)^-1
    #[arg(long, default_value = "test1")]
    function: String,
    #[arg(long, default_value_t = 50)]
    shifts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Optional JSON report destination
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct IntegrateReport<'a> {
    construction: &'a ConstructionResult,
    function: &'a str,
    #[serde(flatten)]
    report: hodn::randomize::RmseReport,
}

fn cmd_integrate(a: &IntegrateArgs) -> Result<()> {
    if a.function != "test1" {
        return Err(HodnError::InvalidParameter(format!(
            "unknown integrand {:?}; only test1 is built in",
            a.function
        )));
    }
    let res = read_construction(&a.net)?;
    let base = generate_points(&res.lattice()?)?;
    let net = interlace_net(&base, res.d)?;
    let f = test_function(res.s);
    let report = rmse_experiment(&net, f, a.shifts, a.seed)?;
    println!("Q_bar = {:.17e}", report.q_bar);
    println!("rmse  = {:.2e}", report.rmse);
    if let Some(out) = &a.out {
        write_json(
            out,
            &IntegrateReport {
                construction: &res,
                function: &a.function,
                report,
            },
        )?;
    }
    Ok(())
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, default_value_t = 2)]
    b: u32,
    #[arg(long)]
    m_start: u32,
    /// Inclusive; an empty range emits the header only
    #[arg(long)]
    m_end: u32,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    alpha: u32,
    #[arg(long)]
    d: u32,
    #[arg(long)]
    weights: String,
    #[arg(long, value_enum, default_value_t = Mode::Fast)]
    mode: Mode,
    /// CSV destination; stdout if omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_table(a: &TableArgs) -> Result<()> {
    let weights = parse_weights(&a.weights, a.s)?;
    let mut rows = String::from("m,n,criterion_b\n");
    for m in a.m_start..=a.m_end {
        let cfg = CbcConfig {
            b: a.b,
            m,
            s: a.s,
            alpha: a.alpha,
            d: a.d,
            weights: weights.clone(),
            modulus: None,
        };
        let res = match a.mode {
            Mode::Fast => cbc_construct_fast(&cfg),
            Mode::Naive => cbc_construct_naive(&cfg),
        }?;
        rows.push_str(&format!(
            "{m},{},{:.17e}\n",
            checked_pow(a.b, m)?,
            res.b_final
        ));
    }
    match &a.out {
        Some(path) => File::create(path)?.write_all(rows.as_bytes())?,
        None => print!("{rows}"),
    }
    Ok(())
}

fn read_construction(path: &PathBuf) -> Result<ConstructionResult> {
    let file = File::open(path)?;
    serde_json::from_reader(file)
        .map_err(|e| HodnError::MalformedFile(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &PathBuf, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| HodnError::MalformedFile(e.to_string()))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Sniff binary magic; otherwise parse as CSV (which then needs --b/--m).
fn read_points(path: &PathBuf, b: u32, m: Option<u32>) -> Result<PointSet> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(b"HODNPTS1") {
        return pointset::read_binary(&bytes[..]);
    }
    let m = m.ok_or_else(|| {
        HodnError::InvalidParameter("--m is required for csv point files".into())
    })?;
    pointset::read_csv(&bytes[..], b, m)
}

fn exit_code(e: &HodnError) -> u8 {
    match e {
        HodnError::BudgetExceeded(_) => 3,
        HodnError::MalformedFile(_) | HodnError::Io(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match &cli.cmd {
        Cmd::Construct(a) => cmd_construct(a),
        Cmd::Points(a) => cmd_points(a),
        Cmd::Criterion(a) => cmd_criterion(a),
        Cmd::Integrate(a) => cmd_integrate(a),
        Cmd::Table(a) => cmd_table(a),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
