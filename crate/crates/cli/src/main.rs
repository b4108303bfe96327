//! `glpq` command-line driver.
//!
//! Exit codes: 0 on success, 1 for invalid input or failed validation, 2 for
//! truncation, resource and I/O failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use glpq::fourier::{forward, inverse_on_grid, plancherel_norm, FourierCoefficients};
use glpq::grid::{build_grid, grid_selftest, integrate};
use glpq::liealg::{flag, parse_algebra, LieAlgebra};
use glpq::normlab::{
    bessel_sharpness, heat_decay_slope, opnorm_lower_bound, threshold_experiment, LmaxPolicy, SharpnessWindow,
};
use glpq::report::{round12, write_report, ExperimentReport};
use glpq::speccalc::{bessel_symbol, heat_symbol, riesz_symbol, OperatorChoice};
use glpq::symcalc::{seminorm, DiffIndex, MultiplierSymbol, SeminormSpec, Side, WeightSource};
use glpq::{Error, HalfInt, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "glpq", version, about = "Symbol calculus and L^p-L^q experiments on SU(2)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bracket flag, step and Hausdorff dimension of a generator system.
    Hausdorff(HausdorffArgs),
    /// Quadrature, Parseval and round-trip checks of the Fourier transform.
    FourierSelftest(SelftestArgs),
    /// Slope of log h_t(e) against log t.
    HeatDecay(HeatDecayArgs),
    /// Growth of ‖B_a h_t‖_q / ‖h_t‖_p as t decreases.
    BesselSharpness(SharpnessArgs),
    /// Bessel sharpness just above and below the critical order.
    Threshold(ThresholdArgs),
    /// Weighted seminorm of a spectral symbol under band doubling.
    Seminorm(SeminormArgs),
    /// Lower bound for the L^p → L^q norm of a spectral multiplier.
    Opnorm(OpnormArgs),
}

fn parse_real(s: &str) -> Result<f64, String> {
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("invalid number {s:?}"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("invalid number {s:?}"))?;
            a / b
        }
        None if s == "inf" => f64::INFINITY,
        None => s.trim().parse().map_err(|_| format!("invalid number {s:?}"))?,
    };
    if v.is_nan() {
        return Err(format!("invalid number {s:?}"));
    }
    Ok(v)
}

fn parse_band(s: &str) -> Result<HalfInt, String> {
    HalfInt::parse(s).ok_or_else(|| format!("invalid band {s:?}"))
}

fn parse_op(s: &str) -> Result<OperatorChoice, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_index(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(i) if i >= 1 => Ok(i - 1),
        _ => Err(format!("invalid 1-based index {s:?}")),
    }
}

#[derive(Args)]
struct HausdorffArgs {
    /// Built-in algebra: su2 or su3.
    #[arg(long, conflicts_with = "algebra")]
    builtin: Option<String>,
    /// JSON algebra file.
    #[arg(long)]
    algebra: Option<PathBuf>,
    /// Comma-separated 1-based generator indices.
    #[arg(long, value_delimiter = ',', value_parser = parse_index)]
    generators: Vec<usize>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Band of the grid and of the test functions.
    #[arg(long, default_value = "5", value_parser = parse_band)]
    lmax: HalfInt,
    /// Number of random band-limited functions.
    #[arg(long, default_value_t = 100)]
    functions: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HeatDecayArgs {
    #[arg(long, value_parser = parse_op)]
    op: OperatorChoice,
    #[arg(long, value_parser = parse_real)]
    tmin: f64,
    #[arg(long, value_parser = parse_real)]
    tmax: f64,
    #[arg(long, default_value_t = 9)]
    points: usize,
    /// Starting band; doubled per t until the truncation guard passes.
    #[arg(long, default_value = "60", value_parser = parse_band)]
    lmax: HalfInt,
    /// Largest band tried.
    #[arg(long, default_value = "131072", value_parser = parse_band)]
    lmax_cap: HalfInt,
    /// Use exactly --lmax and fail if the truncation guard does not pass.
    #[arg(long)]
    fixed_lmax: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WindowArgs {
    #[arg(long, default_value = "0.02", value_parser = parse_real)]
    tmin: f64,
    #[arg(long, default_value = "0.2", value_parser = parse_real)]
    tmax: f64,
    #[arg(long, default_value_t = 5)]
    points: usize,
    /// Hard cap on the band of kernel sums.
    #[arg(long, default_value = "200000", value_parser = parse_band)]
    lmax_cap: HalfInt,
}

#[derive(Args)]
struct SharpnessArgs {
    #[arg(long, value_parser = parse_real)]
    p: f64,
    #[arg(long, value_parser = parse_real)]
    q: f64,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, value_parser = parse_op)]
    op: OperatorChoice,
    #[command(flatten)]
    window: WindowArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long, value_parser = parse_real)]
    p: f64,
    #[arg(long, value_parser = parse_real)]
    q: f64,
    #[arg(long, default_value = "1", value_parser = parse_real)]
    rho: f64,
    #[arg(long, value_parser = parse_op)]
    op: OperatorChoice,
    /// Distance of the two probed orders from the critical order.
    #[arg(long, default_value = "0.5", value_parser = parse_real)]
    offset: f64,
    #[command(flatten)]
    window: WindowArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SymbolArgs {
    /// identity, bessel:<a>, heat:<t> or riesz:<a>.
    #[arg(long, allow_hyphen_values = true)]
    symbol: String,
    /// Operator whose spectral calculus defines the symbol.
    #[arg(long, default_value = "laplacian", value_parser = parse_op)]
    op: OperatorChoice,
}

impl SymbolArgs {
    fn build(&self, band: HalfInt) -> glpq::Result<MultiplierSymbol> {
        let (kind, arg) = self.symbol.split_once(':').unwrap_or((self.symbol.as_str(), ""));
        let value = || parse_real(arg).map_err(Error::InvalidParameter);
        match kind {
            "identity" => Ok(MultiplierSymbol::identity(band)),
            "bessel" => bessel_symbol(value()?, &self.op, band),
            "heat" => heat_symbol(value()?, &self.op, band),
            "riesz" => riesz_symbol(value()?, &self.op, band),
            _ => Err(Error::InvalidParameter(format!("unknown symbol {:?}", self.symbol))),
        }
    }
}

#[derive(Args)]
struct SeminormArgs {
    #[command(flatten)]
    symbol: SymbolArgs,
    /// elliptic or sublaplacian:<indices>.
    #[arg(long, default_value = "elliptic")]
    weight: String,
    /// Difference multi-index over the entries 11,12,21,22.
    #[arg(long, default_value = "0,0,0,0")]
    alpha: String,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    m: f64,
    #[arg(long, default_value = "1", value_parser = parse_real)]
    rho: f64,
    #[arg(long, default_value = "0", value_parser = parse_real)]
    delta: f64,
    /// left or right.
    #[arg(long, default_value = "left")]
    side: String,
    /// Factor on the weight exponent (1, or 1/κ).
    #[arg(long, default_value = "1", value_parser = parse_real)]
    kappa_scaling: f64,
    /// Smallest band; the seminorm is recomputed at doubled bands.
    #[arg(long, default_value = "4", value_parser = parse_band)]
    lmax: HalfInt,
    /// Number of band doublings.
    #[arg(long, default_value_t = 1)]
    doublings: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OpnormArgs {
    #[command(flatten)]
    symbol: SymbolArgs,
    #[arg(long, value_parser = parse_real)]
    p: f64,
    #[arg(long, value_parser = parse_real)]
    q: f64,
    /// Band of the symbol.
    #[arg(long, default_value = "4", value_parser = parse_band)]
    lmax: HalfInt,
    /// Band of the quadrature grid (defaults to twice the symbol band).
    #[arg(long, value_parser = parse_band)]
    grid_lmax: Option<HalfInt>,
    #[arg(long, default_value_t = 50)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn fmt(x: f64) -> String {
    format!("{:.11e}", round12(x))
}

fn emit(report: &ExperimentReport, out: &Option<PathBuf>) -> glpq::Result<()> {
    match out {
        Some(path) => write_report(report, path),
        None => {
            print!("{}", report.to_text());
            Ok(())
        }
    }
}

fn summary(report: &ExperimentReport) {
    if let Some(s) = report.slope {
        let se = report.stderr.map(fmt).unwrap_or_else(|| "n/a".into());
        eprintln!("{}: slope = {} ± {}", report.experiment, fmt(s), se);
    }
    if let Some(v) = &report.verdict {
        eprintln!("{}: verdict = {v}", report.experiment);
    }
}

fn run_hausdorff(args: HausdorffArgs) -> glpq::Result<()> {
    let alg = match (&args.builtin, &args.algebra) {
        (Some(name), None) => match name.as_str() {
            "su2" => LieAlgebra::su2(),
            "su3" => LieAlgebra::su3(),
            _ => return Err(Error::InvalidParameter(format!("unknown built-in algebra {name:?}"))),
        },
        (None, Some(path)) => parse_algebra(&std::fs::read_to_string(path)?)?,
        _ => return Err(Error::InvalidParameter("give exactly one of --builtin or --algebra".into())),
    };
    let generators = if args.generators.is_empty() { (0..alg.dim()).collect() } else { args.generators };
    let f = flag(&alg, &generators)?;
    let dims: Vec<String> = f.dims.iter().map(usize::to_string).collect();
    println!("dims=({}) kappa={} Q={}", dims.join(","), f.kappa, f.hausdorff_q);
    Ok(())
}

fn run_selftest(args: SelftestArgs) -> glpq::Result<bool> {
    let band = args.lmax;
    let grid = build_grid(band)?;
    let schur = grid_selftest(&grid, band)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let (mut parseval, mut roundtrip): (f64, f64) = (0.0, 0.0);
    for _ in 0..args.functions {
        let entries = band
            .up_to()
            .map(|l| {
                glpq::CMatrix::from_fn(l.dim(), l.dim(), |_, _| {
                    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                })
            })
            .collect();
        let c = FourierCoefficients::from_entries(entries)?;
        let samples = inverse_on_grid(&c, &grid);
        let sq: Vec<C64> = samples.iter().map(|z| C64::new(z.norm_sqr(), 0.0)).collect();
        let l2 = integrate(&sq, &grid)?.re.sqrt();
        let pn = plancherel_norm(&c);
        parseval = parseval.max((l2 - pn).abs() / pn);
        roundtrip = roundtrip.max(forward(&samples, &grid, band)?.max_abs_diff(&c));
    }
    let pass = schur.pass && parseval < 1e-10 && roundtrip < 1e-10;
    println!("schur_residual={}", fmt(schur.max_residual));
    println!("parseval_max_relative={}", fmt(parseval));
    println!("roundtrip_max={}", fmt(roundtrip));
    println!("{}", if pass { "PASS" } else { "FAIL" });
    let mut report = ExperimentReport::new("fourier-selftest")
        .param("lmax", band.value())
        .param("functions", args.functions)
        .param("seed", args.seed)
        .param("grid_nodes", grid.len())
        .param("schur_residual", schur.max_residual)
        .param("parseval_max_relative", parseval)
        .param("roundtrip_max", roundtrip);
    report.verdict = Some(if pass { "pass" } else { "fail" }.into());
    if let Some(path) = &args.out {
        write_report(&report, path)?;
    }
    Ok(pass)
}

fn run_heat_decay(args: HeatDecayArgs) -> glpq::Result<()> {
    let policy = if args.fixed_lmax {
        LmaxPolicy::fixed(args.lmax)
    } else {
        LmaxPolicy::adaptive(args.lmax, args.lmax_cap.max(args.lmax))
    };
    let report = heat_decay_slope(&args.op, args.tmin, args.tmax, args.points, policy)?;
    summary(&report);
    emit(&report, &args.out)
}

fn window(w: &WindowArgs) -> SharpnessWindow {
    SharpnessWindow { t_lo: w.tmin, t_hi: w.tmax, points: w.points, cap: w.lmax_cap }
}

fn run_sharpness(args: SharpnessArgs) -> glpq::Result<()> {
    let w = window(&args.window);
    let report = bessel_sharpness(args.p, args.q, args.a, &args.op, w.t_lo, w.t_hi, w.points, w.cap)?;
    summary(&report);
    emit(&report, &args.out)
}

fn run_threshold(args: ThresholdArgs) -> glpq::Result<()> {
    let report = threshold_experiment(args.p, args.q, args.rho, &args.op, args.offset, window(&args.window))?;
    for r in &report.runs {
        summary(r);
    }
    summary(&report);
    emit(&report, &args.out)
}

fn parse_weight(s: &str) -> glpq::Result<WeightSource> {
    if s == "elliptic" {
        return Ok(WeightSource::Elliptic);
    }
    match s.parse::<OperatorChoice>()? {
        OperatorChoice::Sublaplacian(system) => Ok(WeightSource::Subelliptic(system)),
        OperatorChoice::Laplacian => Ok(WeightSource::Elliptic),
    }
}

fn run_seminorm(args: SeminormArgs) -> glpq::Result<()> {
    let alpha: Vec<u32> = args
        .alpha
        .split(',')
        .map(|p| p.trim().parse::<u32>().map_err(|_| Error::InvalidParameter(format!("bad multi-index entry {p:?}"))))
        .collect::<glpq::Result<_>>()?;
    let alpha: [u32; 4] = alpha
        .try_into()
        .map_err(|_| Error::InvalidParameter("--alpha needs four entries (11,12,21,22)".into()))?;
    let side = match args.side.as_str() {
        "left" => Side::Left,
        "right" => Side::Right,
        s => return Err(Error::InvalidParameter(format!("side must be left or right, got {s:?}"))),
    };
    let spec = SeminormSpec {
        alpha: DiffIndex(alpha),
        beta_order: 0,
        m: args.m,
        rho: args.rho,
        delta: args.delta,
        weight: parse_weight(&args.weight)?,
        side,
        kappa_scaling: args.kappa_scaling,
    };
    let mut report = ExperimentReport::new("seminorm")
        .param("symbol", args.symbol.symbol.clone())
        .param("op", args.symbol.op.to_string())
        .param("weight", args.weight.clone())
        .param("alpha", alpha.to_vec())
        .param("m", args.m)
        .param("rho", args.rho)
        .param("delta", args.delta)
        .param("side", args.side.clone())
        .param("kappa_scaling", args.kappa_scaling)
        .param("column_t", "lmax");
    let mut band = args.lmax;
    for _ in 0..=args.doublings {
        let sigma = args.symbol.build(band)?;
        let v = seminorm(&sigma, &spec)?;
        println!("lmax={band} seminorm={}", fmt(v));
        report.rows.push((band.value(), v));
        band = HalfInt::from_twice(band.twice() * 2);
    }
    if let Some(path) = &args.out {
        write_report(&report, path)?;
    }
    Ok(())
}

fn run_opnorm(args: OpnormArgs) -> glpq::Result<()> {
    let sigma = args.symbol.build(args.lmax)?;
    let grid = build_grid(args.grid_lmax.unwrap_or(HalfInt::from_twice(args.lmax.twice() * 2)))?;
    let bound = opnorm_lower_bound(&sigma, args.p, args.q, &grid, args.iters, args.seed)?;
    println!("lower_bound={} source={}", fmt(bound.value), bound.source);
    if args.p == 2.0 && args.q == 2.0 {
        println!("l2_norm={}", fmt(sigma.sup_op_norm()));
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::TruncationInsufficient { .. } | Error::Resource { .. } | Error::Io(_) => 2,
        _ => 1,
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("GLPQ_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    configure_threads();
    let result = match cli.command {
        Command::Hausdorff(a) => run_hausdorff(a),
        Command::FourierSelftest(a) => match run_selftest(a) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(1),
            Err(e) => Err(e),
        },
        Command::HeatDecay(a) => run_heat_decay(a),
        Command::BesselSharpness(a) => run_sharpness(a),
        Command::Threshold(a) => run_threshold(a),
        Command::Seminorm(a) => run_seminorm(a),
        Command::Opnorm(a) => run_opnorm(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
