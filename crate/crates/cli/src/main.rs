use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use purephoton::export::{
    create_file, write_hom_csv, write_jsi_csv, write_jsi_png, write_json, write_scan_csv, JsaMetadata,
};
use purephoton::gvm::{degenerate_poling_period, solve_gvm_asymmetric, solve_gvm_asymmetric_all, solve_gvm_symmetric};
use purephoton::hom::{hom_heralded_auto, hom_signal_idler_auto, DEFAULT_DELAY_POINTS};
use purephoton::jsa::{build_jsa_auto, DEFAULT_GRID_POINTS, MIN_GRID_POINTS};
use purephoton::reproduce::{self, Figure, ReproduceConfig};
use purephoton::schmidt::schmidt_decompose;
use purephoton::tuning::{optimize_pump_bandwidth, purity_scan, PumpPolicy, DEFAULT_BANDWIDTH_RANGE_NM};
use purephoton::{Error, GvmCondition, Herald, PhaseMatchSpec, ProcessConvention, PumpSpec, Registry, Result};

#[derive(Parser, Debug)]
#[command(
    name = "purephoton",
    version,
    about = "Spectrally pure photon-pair design for KTP-family crystals"
)]
struct Cli {
    /// Crystal registry TOML file (default: the shipped registry).
    #[arg(long, global = true, env = "PUREPHOTON_REGISTRY")]
    registry: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Grid points per frequency axis.
    #[arg(long, global = true, default_value_t = DEFAULT_GRID_POINTS)]
    grid: usize,

    /// Drop the e^{iΔkL/2} phase-matching phase.
    #[arg(long, global = true)]
    no_pm_phase: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the crystal registry.
    Crystals,
    /// Solve a group-velocity-matching condition.
    Gvm(GvmArgs),
    /// Joint spectral amplitude, purity and JSI export.
    Jsa(JsaArgs),
    /// Purity across degenerate wavelengths.
    Scan(ScanArgs),
    /// Hong-Ou-Mandel trace.
    Hom(HomArgs),
    /// Regenerate a table or figure and check it against reference values.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug)]
struct GvmArgs {
    #[arg(long)]
    crystal: String,
    /// symmetric, asymmetric (both branches), pump-matches-idler or
    /// pump-matches-signal.
    #[arg(long, default_value = "symmetric")]
    condition: String,
}

#[derive(Args, Debug)]
struct PumpArgs {
    /// Pump bandwidth, nm FWHM.
    #[arg(long)]
    pump_bw: Option<f64>,
    /// Choose the pump bandwidth that maximizes purity.
    #[arg(long)]
    optimize_bw: bool,
    #[arg(long, default_value_t = DEFAULT_BANDWIDTH_RANGE_NM.0)]
    bw_min: f64,
    #[arg(long, default_value_t = DEFAULT_BANDWIDTH_RANGE_NM.1)]
    bw_max: f64,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("pump").required(true).args(["pump_bw", "optimize_bw"])))]
struct JsaArgs {
    #[arg(long)]
    crystal: String,
    /// Degenerate signal/idler wavelength, nm.
    #[arg(long)]
    lambda: f64,
    /// Crystal length, mm.
    #[arg(long, default_value_t = 30.0)]
    length: f64,
    /// Poling period override, μm.
    #[arg(long)]
    period: Option<f64>,
    #[command(flatten)]
    pump: PumpArgs,
    /// Output directory.
    #[arg(long, default_value = "purephoton_out/jsa")]
    out: PathBuf,
    /// Also write a JSI heatmap PNG.
    #[arg(long)]
    png: bool,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    crystal: String,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long, default_value_t = 50.0)]
    step: f64,
    #[arg(long, default_value_t = 30.0)]
    length: f64,
    /// Fixed pump bandwidth, nm FWHM; optimized per wavelength when absent.
    #[arg(long)]
    pump_bw: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_BANDWIDTH_RANGE_NM.0)]
    bw_min: f64,
    #[arg(long, default_value_t = DEFAULT_BANDWIDTH_RANGE_NM.1)]
    bw_max: f64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HeraldArg {
    Idler,
    Signal,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("mode").required(true).args(["herald", "signal_idler"])))]
struct HomArgs {
    #[arg(long)]
    crystal: String,
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 30.0)]
    length: f64,
    #[arg(long)]
    pump_bw: f64,
    /// Photon detected as herald in each source; the other photons interfere.
    #[arg(long, value_enum)]
    herald: Option<HeraldArg>,
    /// Interfere the signal and idler of one source.
    #[arg(long)]
    signal_idler: bool,
    #[arg(long, default_value_t = DEFAULT_DELAY_POINTS)]
    delay_points: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    /// table1, fig1, fig2 or fig3.
    figure: String,
    /// Output directory; defaults to purephoton_out/<figure>.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    png: bool,
}

struct RunConfig {
    registry: Registry,
    format: Format,
    grid: usize,
    include_pm_phase: bool,
}

impl RunConfig {
    fn new(cli: &Cli) -> Result<Self> {
        if cli.grid < MIN_GRID_POINTS {
            return Err(Error::InvalidInput(format!(
                "--grid must be at least {MIN_GRID_POINTS}, got {}",
                cli.grid
            )));
        }
        let registry = match &cli.registry {
            Some(p) => Registry::load(p)?,
            None => Registry::shipped(),
        };
        Ok(RunConfig {
            registry,
            format: cli.format,
            grid: cli.grid,
            include_pm_phase: !cli.no_pm_phase,
        })
    }

    fn json(&self) -> bool {
        self.format == Format::Json
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    write_json(&mut out, value)
}

fn io(e: std::io::Error) -> Error {
    Error::Export(e.to_string())
}

fn cmd_crystals(cfg: &RunConfig) -> Result<ExitCode> {
    let rows = cfg.registry.list_crystals();
    if cfg.json() {
        print_json(&rows)?;
        return Ok(ExitCode::SUCCESS);
    }
    let mut out = std::io::stdout().lock();
    writeln!(out, "name,composition,d_eff_pm_per_V,validity_min_um,validity_max_um").map_err(io)?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.name, r.composition, r.d_eff_pm_per_v, r.validity_um.0, r.validity_um.1
        )
        .map_err(io)?;
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct GvmRow {
    crystal: String,
    condition: GvmCondition,
    lambda_nm: f64,
    period_um: Option<f64>,
    residual_s_per_m: f64,
}

fn cmd_gvm(cfg: &RunConfig, args: &GvmArgs) -> Result<ExitCode> {
    let record = cfg.registry.get(&args.crystal)?;
    let conv = ProcessConvention::type_ii();
    let solutions = match args.condition.to_ascii_lowercase().as_str() {
        "asymmetric" => solve_gvm_asymmetric_all(record, &conv)?,
        other => match other.parse::<GvmCondition>()? {
            GvmCondition::Symmetric => vec![solve_gvm_symmetric(record, &conv)?],
            branch => solve_gvm_asymmetric(record, &conv, branch)?,
        },
    };
    if solutions.is_empty() {
        eprintln!(
            "error: {} has no {} group-velocity-matching point in its validity range",
            record.name, args.condition
        );
        return Ok(ExitCode::from(1));
    }
    let rows: Vec<GvmRow> = solutions
        .iter()
        .map(|s| GvmRow {
            crystal: record.name.clone(),
            condition: s.condition,
            lambda_nm: s.lambda_nm,
            period_um: degenerate_poling_period(record, &conv, s.lambda_nm)
                .ok()
                .map(|p| p.period_um),
            residual_s_per_m: s.residual_s_per_m,
        })
        .collect();
    if cfg.json() {
        print_json(&rows)?;
        return Ok(ExitCode::SUCCESS);
    }
    let mut out = std::io::stdout().lock();
    writeln!(out, "crystal,condition,lambda_nm,period_um,residual_s_per_m").map_err(io)?;
    for r in rows {
        let period = r.period_um.map(|p| p.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{:e}",
            r.crystal, r.condition, r.lambda_nm, period, r.residual_s_per_m
        )
        .map_err(io)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn phase_match(
    cfg: &RunConfig,
    crystal: &str,
    lambda_nm: f64,
    length_mm: f64,
    period_um: Option<f64>,
) -> Result<PhaseMatchSpec> {
    let record = cfg.registry.get(crystal)?.clone();
    let conv = ProcessConvention::type_ii();
    let pm = match period_um {
        Some(p) => PhaseMatchSpec::with_period(record, conv, lambda_nm, length_mm, p)?,
        None => PhaseMatchSpec::degenerate(record, conv, lambda_nm, length_mm)?,
    };
    Ok(pm.pm_phase(cfg.include_pm_phase))
}

#[derive(Serialize)]
struct JsaSummary {
    crystal: String,
    lambda_nm: f64,
    length_mm: f64,
    period_um: f64,
    pump_fwhm_nm: f64,
    optimized: bool,
    purity: f64,
    schmidt_number: f64,
    grid_points: usize,
    files: Vec<String>,
}

fn cmd_jsa(cfg: &RunConfig, args: &JsaArgs) -> Result<ExitCode> {
    let pm = phase_match(cfg, &args.crystal, args.lambda, args.length, args.period)?;
    let fwhm = match args.pump.pump_bw {
        Some(bw) => bw,
        None => optimize_pump_bandwidth(&pm, args.lambda, (args.pump.bw_min, args.pump.bw_max), cfg.grid)?.fwhm_nm,
    };
    let pump = PumpSpec::new(args.lambda / 2.0, fwhm)?;
    let jsa = build_jsa_auto(&pump, &pm, args.lambda, cfg.grid)?;
    let schmidt = schmidt_decompose(&jsa, false)?;

    let mut files = vec!["jsi.csv".to_string(), "jsa.json".to_string()];
    let mut f = create_file(&args.out.join("jsi.csv"))?;
    write_jsi_csv(
        &mut f,
        &jsa,
        &[
            ("crystal", pm.crystal.name.clone()),
            ("pump_center_nm", pump.center_nm.to_string()),
            ("pump_fwhm_nm", fwhm.to_string()),
            ("length_mm", args.length.to_string()),
            ("period_um", pm.period_um.to_string()),
            ("purity", schmidt.purity.to_string()),
        ],
    )?;
    f.flush().map_err(io)?;
    let mut f = create_file(&args.out.join("jsa.json"))?;
    write_json(&mut f, &JsaMetadata::new(&jsa, &pump, &pm, &schmidt))?;
    f.flush().map_err(io)?;
    if args.png {
        write_jsi_png(&args.out.join("jsi.png"), &jsa)?;
        files.push("jsi.png".into());
    }

    let summary = JsaSummary {
        crystal: pm.crystal.name.clone(),
        lambda_nm: args.lambda,
        length_mm: args.length,
        period_um: pm.period_um,
        pump_fwhm_nm: fwhm,
        optimized: args.pump.pump_bw.is_none(),
        purity: schmidt.purity,
        schmidt_number: schmidt.schmidt_number,
        grid_points: jsa.n(),
        files: files.iter().map(|f| args.out.join(f).display().to_string()).collect(),
    };
    if cfg.json() {
        print_json(&summary)?;
    } else {
        let mut out = std::io::stdout().lock();
        writeln!(out, "crystal: {}", summary.crystal).map_err(io)?;
        writeln!(out, "lambda_nm: {}", summary.lambda_nm).map_err(io)?;
        writeln!(out, "period_um: {:.4}", summary.period_um).map_err(io)?;
        let tag = if summary.optimized { " (optimized)" } else { "" };
        writeln!(out, "pump_fwhm_nm: {:.4}{tag}", summary.pump_fwhm_nm).map_err(io)?;
        writeln!(out, "purity: {:.4}", summary.purity).map_err(io)?;
        writeln!(out, "schmidt_number: {:.4}", summary.schmidt_number).map_err(io)?;
        for f in &summary.files {
            writeln!(out, "wrote: {f}").map_err(io)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create_file(p)?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn cmd_scan(cfg: &RunConfig, args: &ScanArgs) -> Result<ExitCode> {
    let record = cfg.registry.get(&args.crystal)?;
    let policy = match args.pump_bw {
        Some(fwhm_nm) => PumpPolicy::Fixed { fwhm_nm },
        None => PumpPolicy::Optimized {
            lo_nm: args.bw_min,
            hi_nm: args.bw_max,
        },
    };
    let rows = purity_scan(
        record,
        &ProcessConvention::type_ii(),
        args.from,
        args.to,
        args.step,
        args.length,
        policy,
        cfg.grid,
    )?;
    let mut w = output(args.out.as_deref())?;
    if cfg.json() {
        write_json(&mut w, &rows)?;
    } else {
        let pump = match policy {
            PumpPolicy::Fixed { fwhm_nm } => format!("fixed {fwhm_nm} nm"),
            PumpPolicy::Optimized { lo_nm, hi_nm } => format!("optimized in [{lo_nm}, {hi_nm}] nm"),
        };
        write_scan_csv(
            &mut w,
            &rows,
            &[
                ("crystal", record.name.clone()),
                ("length_mm", args.length.to_string()),
                ("pump", pump),
                ("grid_points", cfg.grid.to_string()),
            ],
        )?;
    }
    w.flush().map_err(io)?;
    Ok(if rows.iter().any(|r| r.error.is_some()) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_hom(cfg: &RunConfig, args: &HomArgs) -> Result<ExitCode> {
    let pm = phase_match(cfg, &args.crystal, args.lambda, args.length, None)?;
    let pump = PumpSpec::new(args.lambda / 2.0, args.pump_bw)?;
    let jsa = build_jsa_auto(&pump, &pm, args.lambda, cfg.grid)?;
    let (trace, what) = match args.herald {
        Some(HeraldArg::Idler) => (
            hom_heralded_auto(&jsa, &jsa, Herald::Idler, args.delay_points)?,
            "heralded signals (idler heralds)",
        ),
        Some(HeraldArg::Signal) => (
            hom_heralded_auto(&jsa, &jsa, Herald::Signal, args.delay_points)?,
            "heralded idlers (signal heralds)",
        ),
        None => (hom_signal_idler_auto(&jsa, args.delay_points)?, "signal against idler"),
    };
    let mut w = output(args.out.as_deref())?;
    if cfg.json() {
        write_json(&mut w, &trace)?;
    } else {
        write_hom_csv(
            &mut w,
            &trace,
            &[
                ("crystal", pm.crystal.name.clone()),
                ("lambda_nm", args.lambda.to_string()),
                ("pump_fwhm_nm", args.pump_bw.to_string()),
                ("length_mm", args.length.to_string()),
                ("trace", what.to_string()),
            ],
        )?;
    }
    w.flush().map_err(io)?;
    if args.out.is_some() && !cfg.json() {
        let width = trace
            .width_ps
            .map(|w| format!("{w:.4}"))
            .unwrap_or_else(|| "n/a".into());
        println!("{what}: visibility {:.4}, width_ps {width}", trace.visibility);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_reproduce(cfg: &RunConfig, args: &ReproduceArgs) -> Result<ExitCode> {
    let figure: Figure = args.figure.parse()?;
    let out_dir = args
        .out
        .clone()
        .unwrap_or_else(|| Path::new("purephoton_out").join(args.figure.to_ascii_lowercase()));
    let rcfg = ReproduceConfig {
        out_dir,
        grid_points: cfg.grid,
        include_pm_phase: cfg.include_pm_phase,
        png: args.png,
    };
    let report = reproduce::run(figure, &cfg.registry, &rcfg)?;
    if cfg.json() {
        print_json(&report)?;
    } else {
        print!("{}", report.render());
        println!("artifacts in {}", rcfg.out_dir.display());
    }
    Ok(if report.pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let cfg = RunConfig::new(cli)?;
    match &cli.command {
        Command::Crystals => cmd_crystals(&cfg),
        Command::Gvm(a) => cmd_gvm(&cfg, a),
        Command::Jsa(a) => cmd_jsa(&cfg, a),
        Command::Scan(a) => cmd_scan(&cfg, a),
        Command::Hom(a) => cmd_hom(&cfg, a),
        Command::Reproduce(a) => cmd_reproduce(&cfg, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
