use anyhow::{bail, Context, Result};
use butler_core::array::{self, ArrayGeometry, PatternCut};
use butler_core::network::BUTLER_PORTS;
use butler_core::report::{self, SweepSpec};
use butler_core::touchstone::{self, DataFormat, FreqUnit};
use butler_core::{ElementModel, Fidelity, Substrate};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

mod config;
mod quantity;

use config::{Scenario, Value};

const OUT_DIR_ENV: &str = "BUTLER_OUT_DIR";
const DEFAULT_F0: &str = "5.2GHz";

/// Butler matrix beamforming network: microstrip design, network simulation
/// and array patterns.
#[derive(Parser, Debug)]
#[command(name = "butler", version)]
struct Cli {
    /// JSON scenario file; any flag given on the command line overrides it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory [default: $BUTLER_OUT_DIR, else the current directory].
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form dimensions of the lines, patch and beam table.
    Design(DesignArgs),
    /// Simulate the 4x4 Butler matrix over a sweep.
    Butler(ButlerArgs),
    /// Radiation pattern of the four-element array fed by one input.
    Pattern(PatternArgs),
    /// Touchstone file utilities.
    #[command(subcommand)]
    Touchstone(TouchstoneCommand),
}

#[derive(Args, Debug)]
struct SubstrateArgs {
    /// Relative permittivity [default: 4.9]
    #[arg(long)]
    er: Option<f64>,
    /// Substrate height; bare numbers are mm [default: 1.6mm]
    #[arg(long)]
    h: Option<String>,
}

#[derive(Args, Debug)]
struct DesignArgs {
    /// Design frequency; bare numbers are Hz [default: 5.2GHz]
    #[arg(long)]
    freq: Option<String>,
    #[command(flatten)]
    substrate: SubstrateArgs,
    /// Patch edge resistance in ohm [default: 317]
    #[arg(long)]
    r_edge: Option<String>,
    /// JSON report path [default: <out-dir>/design_report.json]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ButlerArgs {
    /// ideal or circuit [default: ideal]
    #[arg(long)]
    fidelity: Option<String>,
    /// Centre (design) frequency [default: 5.2GHz]
    #[arg(long)]
    f0: Option<String>,
    /// Sweep start [default: 4.2GHz]
    #[arg(long)]
    f_start: Option<String>,
    /// Sweep stop [default: 6.2GHz]
    #[arg(long)]
    f_stop: Option<String>,
    /// Number of sweep points [default: 201]
    #[arg(long)]
    points: Option<usize>,
    /// Touchstone frequency unit: Hz, kHz, MHz, GHz [default: GHz]
    #[arg(long)]
    unit: Option<String>,
    /// Touchstone data format: RI, MA, DB [default: MA]
    #[arg(long)]
    format: Option<String>,
    /// Inputs in the excitation table: "all" or a comma list such as 1R,2L [default: all]
    #[arg(long)]
    ports: Option<String>,
    /// Also write the composite netlist as JSON
    #[arg(long, value_name = "FILE")]
    netlist: Option<PathBuf>,
    #[command(flatten)]
    substrate: SubstrateArgs,
}

#[derive(Args, Debug)]
struct PatternArgs {
    /// Input port 1R, 2L, 2R, 1L, or "all" for an incoherent overlay [default: 1R]
    #[arg(long)]
    port: Option<String>,
    /// Evaluation frequency [default: f0]
    #[arg(long)]
    freq: Option<String>,
    /// Design frequency of the network and array [default: 5.2GHz]
    #[arg(long)]
    f0: Option<String>,
    /// Element centre spacing; bare numbers are mm [default: half a free-space wavelength at f0]
    #[arg(long)]
    spacing: Option<String>,
    /// Element model: cos or iso [default: cos]
    #[arg(long)]
    element: Option<String>,
    /// ideal or circuit [default: ideal]
    #[arg(long)]
    fidelity: Option<String>,
    /// Angle step in degrees [default: 0.05]
    #[arg(long)]
    step: Option<f64>,
    /// CSV path [default: <out-dir>/pattern_<port>.csv]
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    substrate: SubstrateArgs,
}

#[derive(Subcommand, Debug)]
enum TouchstoneCommand {
    /// Rewrite a Touchstone v1 file in another format or frequency unit.
    Convert {
        input: PathBuf,
        output: PathBuf,
        /// RI, MA or DB [default: same as input]
        #[arg(long)]
        format: Option<String>,
        /// Hz, kHz, MHz or GHz [default: same as input]
        #[arg(long)]
        unit: Option<String>,
    },
}

/// Flag, then scenario value, then default.
fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn pick_text(flag: &Option<String>, file: &Option<Value>, default: &str) -> String {
    flag.clone()
        .or_else(|| file.as_ref().map(Value::text))
        .unwrap_or_else(|| default.to_string())
}

struct Ctx {
    scenario: Scenario,
    out_dir: PathBuf,
}

impl Ctx {
    fn new(cli: &Cli) -> Result<Self> {
        let scenario = match &cli.config {
            Some(p) => Scenario::load(p)?,
            None => Scenario::default(),
        };
        let out_dir = cli
            .out_dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .or_else(|| scenario.out_dir.clone())
            .unwrap_or_else(|| PathBuf::from("."));
        Ok(Self { scenario, out_dir })
    }

    fn substrate(&self, a: &SubstrateArgs) -> Result<Substrate> {
        let er = pick(a.er, self.scenario.er, 4.9);
        let h = quantity::length(&pick_text(&a.h, &self.scenario.h, "1.6mm")).context("--h")?;
        Ok(Substrate::new(er, h)?)
    }

    fn fidelity(&self, flag: &Option<String>) -> Result<Fidelity> {
        let text = pick(flag.clone(), self.scenario.fidelity.clone(), "ideal".into());
        Ok(text.parse()?)
    }

    fn f0(&self, flag: &Option<String>) -> Result<f64> {
        quantity::frequency(&pick_text(flag, &self.scenario.f0, DEFAULT_F0)).context("--f0")
    }

    fn output(&self, flag: &Option<PathBuf>, name: &str) -> PathBuf {
        flag.clone().unwrap_or_else(|| self.out_dir.join(name))
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn design(ctx: &Ctx, a: &DesignArgs) -> Result<()> {
    let f = quantity::frequency(&pick_text(&a.freq, &ctx.scenario.freq, DEFAULT_F0))
        .context("--freq")?;
    let sub = ctx.substrate(&a.substrate)?;
    let r_edge = quantity::resistance(&pick_text(&a.r_edge, &ctx.scenario.r_edge, "317"))
        .context("--r-edge")?;
    let rep = report::design_report(f, &sub, r_edge)?;
    print!("{}", rep.to_text());
    write(&ctx.output(&a.out, "design_report.json"), &rep.to_json()?)
}

fn input_index(name: &str) -> Result<usize> {
    BUTLER_PORTS[..4]
        .iter()
        .position(|p| p.eq_ignore_ascii_case(name.trim()))
        .map(|i| i + 1)
        .with_context(|| format!("unknown input port '{name}', expected one of 1R, 2L, 2R, 1L"))
}

fn butler(ctx: &Ctx, a: &ButlerArgs) -> Result<()> {
    let sc = &ctx.scenario;
    let fidelity = ctx.fidelity(&a.fidelity)?;
    let f0 = ctx.f0(&a.f0)?;
    let sub = ctx.substrate(&a.substrate)?;
    let f_start =
        quantity::frequency(&pick_text(&a.f_start, &sc.f_start, "4.2GHz")).context("--f-start")?;
    let f_stop =
        quantity::frequency(&pick_text(&a.f_stop, &sc.f_stop, "6.2GHz")).context("--f-stop")?;
    let unit: FreqUnit = pick(a.unit.clone(), sc.unit.clone(), "GHz".into()).parse()?;
    let format: DataFormat = pick(a.format.clone(), sc.format.clone(), "MA".into()).parse()?;
    let spec = SweepSpec::new(f_start, f_stop, pick(a.points, sc.points, 201), unit)?;
    let ports = pick(a.ports.clone(), sc.ports.clone(), "all".into());
    let inputs: Vec<usize> = if ports.eq_ignore_ascii_case("all") {
        (1..=4).collect()
    } else {
        ports.split(',').map(input_index).collect::<Result<_>>()?
    };

    let net = butler_core::build_butler_4x4(fidelity, f0, &sub)?;
    let data = butler_core::sweep(&net, &spec.frequencies())?;
    let s0 = butler_core::interconnect(&net, f0)?;
    let ex = report::all_excitations(&s0, f0)?;
    let beams = report::beam_table(&ex, &ArrayGeometry::half_wavelength(4, f0)?)?;

    write(
        &ctx.out_dir.join("butler.s8p"),
        &touchstone::write(&data, 8, format, spec.scale_unit)?,
    )?;
    write(
        &ctx.out_dir.join("excitation.csv"),
        &report::excitation_csv(&data, &inputs)?,
    )?;
    write(&ctx.out_dir.join("beams.csv"), &report::beam_csv(&beams))?;
    if let Some(p) = &a.netlist {
        write(p, &net.to_json()?)?;
    }
    Ok(())
}

fn pattern(ctx: &Ctx, a: &PatternArgs) -> Result<()> {
    let sc = &ctx.scenario;
    let fidelity = ctx.fidelity(&a.fidelity)?;
    let f0 = ctx.f0(&a.f0)?;
    let sub = ctx.substrate(&a.substrate)?;
    let f = match a.freq.clone().or_else(|| sc.freq.as_ref().map(Value::text)) {
        Some(t) => quantity::frequency(&t).context("--freq")?,
        None => f0,
    };
    let spacing = match a
        .spacing
        .clone()
        .or_else(|| sc.spacing.as_ref().map(Value::text))
    {
        Some(t) => quantity::length(&t).context("--spacing")?,
        None => butler_core::free_space_wavelength(f0) / 2.0,
    };
    let element: ElementModel =
        pick(a.element.clone(), sc.element.clone(), "cos".into()).parse()?;
    let step = pick(a.step, sc.step, array::DEFAULT_STEP_DEG);
    if !(step > 0.0 && step <= 10.0) {
        bail!("--step must be in (0, 10] degrees, got {step}");
    }
    let port = pick(a.port.clone(), sc.port.clone(), "1R".into());

    let net = butler_core::build_butler_4x4(fidelity, f0, &sub)?;
    let s = butler_core::interconnect(&net, f)?;
    let geom = ArrayGeometry::new(4, spacing, f)?;
    let angles = array::angle_grid(step);
    let cut_for = |p: usize| -> Result<PatternCut> {
        let ex = butler_core::network::excite_matrix(&s, p, f)?;
        Ok(array::array_factor(
            &ex.output_amplitudes,
            &geom,
            &angles,
            element,
            true,
            BUTLER_PORTS[p - 1],
        )?)
    };
    let overlay = port.eq_ignore_ascii_case("all");
    let (cut, file) = if overlay {
        let cuts = (1..=4).map(cut_for).collect::<Result<Vec<_>>>()?;
        (
            array::incoherent_overlay(&cuts)?.normalized(),
            "pattern_all_incoherent.csv".to_string(),
        )
    } else {
        let p = input_index(&port)?;
        (cut_for(p)?, format!("pattern_{}.csv", BUTLER_PORTS[p - 1]))
    };

    println!("pattern: {}", cut.input_port_label);
    if overlay {
        println!("note: overlay of four separate beams, not a single excitation");
    } else if let Ok(m) = array::pattern_metrics(&cut) {
        print!("peak {:.2} deg", m.peak_angle.to_degrees());
        if let Some(w) = m.hpbw {
            print!(", HPBW {:.2} deg", w.to_degrees());
        }
        if let Some(sl) = m.sidelobe_db {
            print!(", sidelobe {sl:.2} dB");
        }
        println!();
    }
    write(&ctx.output(&a.out, &file), &cut.to_csv())
}

fn convert(
    ctx: &Ctx,
    input: &Path,
    output: &Path,
    format: &Option<String>,
    unit: &Option<String>,
) -> Result<()> {
    let ts = touchstone::read_file(input).with_context(|| format!("{}", input.display()))?;
    let format = match format.clone().or_else(|| ctx.scenario.format.clone()) {
        Some(t) => t.parse()?,
        None => ts.format,
    };
    let unit = match unit.clone().or_else(|| ctx.scenario.unit.clone()) {
        Some(t) => t.parse()?,
        None => ts.unit,
    };
    if let Some(n) = touchstone::ports_from_extension(output) {
        if n != ts.n_ports {
            bail!(
                "{} has {} ports but the output extension says {n}",
                input.display(),
                ts.n_ports
            );
        }
    }
    write(
        output,
        &touchstone::write(&ts.data, ts.n_ports, format, unit)?,
    )
}

fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx::new(&cli)?;
    match &cli.command {
        Command::Design(a) => design(&ctx, a),
        Command::Butler(a) => butler(&ctx, a),
        Command::Pattern(a) => pattern(&ctx, a),
        Command::Touchstone(TouchstoneCommand::Convert {
            input,
            output,
            format,
            unit,
        }) => convert(&ctx, input, output, format, unit),
    }
}

fn one_line(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                eprintln!("butler: error: missing subcommand (design, butler, pattern, touchstone); see --help");
                return ExitCode::from(2);
            }
            let rendered = e.to_string();
            let first = rendered
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments");
            let first = first.strip_prefix("error: ").unwrap_or(first);
            eprintln!("butler: error: {}", one_line(first));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("butler: error: {}", one_line(&format!("{e:#}")));
            ExitCode::FAILURE
        }
    }
}
