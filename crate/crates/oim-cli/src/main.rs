//! `oim`: generate, solve, verify, benchmark, and quantize oscillator
//! Ising machine problems.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use oim_core::bench::{run_ensemble_with, BenchReport};
use oim_core::dynamics::{
    simulate, InitialPhases, SimParams, TraceMetric, Trajectory, DEFAULT_DT, DEFAULT_T_END,
};
use oim_core::hardware::{
    codes_csv, pad_to_board, quantize_problem, QuantizerKind, QuantizerModel, SignMode,
    BOARD_SPINS, DEFAULT_FULL_SCALE_OHMS, DEFAULT_UNIT_OHMS, DEFAULT_WIPER_OHMS,
};
use oim_core::oracle::{brute_force, tabu_search, OracleResult, TabuParams};
use oim_core::problem::{
    cut_value, generate_instance, hamiltonian, ising_to_maxcut, machine_energy, maxcut_to_ising,
    parse_problem, serialize_problem, InstanceKind, IsingProblem, WeightedGraph,
};
use oim_core::readout::binarize;
use oim_core::schedule::{parse_schedule, Schedule, DEFAULT_COUPLING_GAIN_END};

#[derive(Parser)]
#[command(
    name = "oim",
    version,
    about = "Oscillator Ising machine: MaxCut/Ising annealing solver and coupling-board emulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark problem file
    Generate(GenerateArgs),
    /// Anneal a problem once and report the binarized solution
    Solve(SolveArgs),
    /// Reference solution by exhaustive enumeration or Tabu search
    Oracle(OracleArgs),
    /// Ensemble statistics (success probability, ratios, TTS) across seeds
    Bench(BenchArgs),
    /// Quantize couplings onto a programmable-resistor model
    Quantize(QuantizeArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenerateKind {
    /// Unit-weight star; n = 4 gives the breadboard demo graph
    Star,
    /// Erdos-Renyi G(n, p) with unit weights
    Gnp,
    /// Complete graph with standard normal weights
    CompleteGaussian,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: GenerateKind,
    /// Node count (defaults: star 4, others 8)
    #[arg(short = 'n', long)]
    nodes: Option<usize>,
    /// Edge probability for gnp
    #[arg(short = 'p', long, default_value_t = 0.5)]
    edge_prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output problem file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimArgs {
    /// Built-in schedule (ramp | constant | hardware) or a schedule JSON path
    #[arg(long, default_value = "ramp")]
    schedule: String,
    /// Integration step (cycles)
    #[arg(long, default_value_t = DEFAULT_DT)]
    dt: f64,
    /// Run length (cycles)
    #[arg(long, default_value_t = DEFAULT_T_END)]
    t_end: f64,
    /// Coupling gain: ramp endpoint, or the pinned value for constant/hardware
    #[arg(long, default_value_t = DEFAULT_COUPLING_GAIN_END)]
    kc: f64,
    /// SYNC gain
    #[arg(long, default_value_t = 1.0)]
    ks: f64,
    /// Noise amplitude at t = 0 (anneals to 0; held for constant)
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    /// Steps between trajectory samples
    #[arg(long, default_value_t = 10)]
    sample_every: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SolveArgs {
    problem: PathBuf,
    #[command(flatten)]
    sim: SimArgs,
    /// Write the trajectory CSV here
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the solution JSON here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Brute,
    Tabu,
}

#[derive(Args)]
struct OracleArgs {
    problem: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Brute)]
    method: MethodArg,
    /// Tabu iterations (default 100 * n)
    #[arg(long)]
    iters: Option<usize>,
    /// Tabu tenure (default min(20, n))
    #[arg(long)]
    tenure: Option<usize>,
    #[arg(long, default_value_t = 5)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the result JSON here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    problem: PathBuf,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    #[command(flatten)]
    sim: SimArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Brute)]
    oracle_method: MethodArg,
    /// Tabu iterations for the oracle (default 100 * n)
    #[arg(long)]
    iters: Option<usize>,
    /// Tabu tenure for the oracle (default min(20, n))
    #[arg(long)]
    tenure: Option<usize>,
    #[arg(long, default_value_t = 5)]
    restarts: usize,
    /// Write the report JSON here (stdout otherwise)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write one trajectory CSV per run into this directory
    #[arg(long)]
    trace_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Digipot8,
    R2rParallel,
    R2rSeries,
}

#[derive(Args)]
struct QuantizeArgs {
    problem: PathBuf,
    #[arg(long, value_enum, default_value_t = ModelArg::Digipot8)]
    model: ModelArg,
    /// Coupling gain the conductances are scaled by
    #[arg(long, default_value_t = 1.0)]
    kc: f64,
    /// Allow positive couplings (sign restored in software)
    #[arg(long)]
    signed: bool,
    /// Digipot full-scale resistance (ohms)
    #[arg(long, default_value_t = DEFAULT_FULL_SCALE_OHMS)]
    full_scale: f64,
    /// Digipot wiper resistance (ohms)
    #[arg(long, default_value_t = DEFAULT_WIPER_OHMS)]
    wiper: f64,
    /// R/2R ladder unit resistance (ohms)
    #[arg(long, default_value_t = DEFAULT_UNIT_OHMS)]
    unit: f64,
    /// Minimum oscillator count of the emulated board; smaller problems
    /// pad with disconnected spins
    #[arg(long, default_value_t = BOARD_SPINS)]
    board_size: usize,
    /// Output CSV of codes and addresses
    #[arg(long)]
    out: PathBuf,
    /// Also write the realized (quantized) problem file here
    #[arg(long)]
    quantized_out: Option<PathBuf>,
}

/// Exit codes: 1 usage, 2 I/O, 3 precondition/validation.
enum CliError {
    Io(String),
    Core(oim_core::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 2,
            CliError::Core(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(msg) => write!(f, "{msg}"),
            CliError::Core(err) => write!(f, "{err}"),
        }
    }
}

impl From<oim_core::Error> for CliError {
    fn from(err: oim_core::Error) -> Self {
        CliError::Core(err)
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_problem(path: &Path) -> Result<(WeightedGraph, IsingProblem), CliError> {
    let graph = parse_problem(&read_file(path)?)?;
    let problem = maxcut_to_ising(&graph);
    Ok((graph, problem))
}

impl SimArgs {
    fn schedule(&self) -> Result<(Schedule, String), CliError> {
        match self.schedule.as_str() {
            "ramp" => Ok((
                Schedule::ramp_coupling(0.0, self.kc, self.ks, self.sigma, 0.0, self.t_end)?,
                format!(
                    "ramp (Kc 0 -> {}, Ks {}, sigma {} -> 0, t_end {})",
                    self.kc, self.ks, self.sigma, self.t_end
                ),
            )),
            "constant" => Ok((
                Schedule::constant(self.kc, self.ks, self.sigma)?,
                format!(
                    "constant (Kc {}, Ks {}, sigma {})",
                    self.kc, self.ks, self.sigma
                ),
            )),
            "hardware" => Ok((
                Schedule::hardware_mode(
                    self.kc,
                    &[(0.0, self.ks, self.sigma), (self.t_end, self.ks, 0.0)],
                )?,
                format!(
                    "hardware (Kc pinned {}, Ks {}, sigma {} -> 0, t_end {})",
                    self.kc, self.ks, self.sigma, self.t_end
                ),
            )),
            path => {
                let sch = parse_schedule(&read_file(Path::new(path))?)?;
                Ok((sch, format!("file {path}")))
            }
        }
    }

    fn params(&self) -> SimParams {
        SimParams {
            dt: self.dt,
            t_end: self.t_end,
            sample_every: self.sample_every,
            seed: self.seed,
            init: InitialPhases::UniformRandom,
        }
    }
}

fn oracle_for(
    p: &IsingProblem,
    g: &WeightedGraph,
    method: MethodArg,
    iters: Option<usize>,
    tenure: Option<usize>,
    restarts: usize,
    seed: u64,
) -> Result<OracleResult, CliError> {
    let mut result = match method {
        MethodArg::Brute => brute_force(p)?,
        MethodArg::Tabu => {
            let defaults = TabuParams::defaults_for(p.n(), seed);
            tabu_search(
                p,
                &TabuParams {
                    iters: iters.unwrap_or(defaults.iters),
                    tenure: tenure.unwrap_or(defaults.tenure),
                    restarts,
                    seed,
                },
            )?
        }
    };
    result.best_cut = Some(cut_value(g, &result.best)?);
    Ok(result)
}

fn cmd_generate(args: &GenerateArgs) -> Result<(), CliError> {
    let (kind, label, nodes) = match args.kind {
        GenerateKind::Star => (InstanceKind::Star, "star", args.nodes.unwrap_or(4)),
        GenerateKind::Gnp => (
            InstanceKind::Gnp {
                edge_prob: args.edge_prob,
            },
            "gnp",
            args.nodes.unwrap_or(8),
        ),
        GenerateKind::CompleteGaussian => (
            InstanceKind::CompleteGaussian,
            "complete-gaussian",
            args.nodes.unwrap_or(8),
        ),
    };
    let graph = generate_instance(kind, nodes, args.seed)?;
    write_file(&args.out, &serialize_problem(&graph))?;
    println!(
        "wrote {}: {} instance, n = {}, {} edges, total weight {}, seed {}",
        args.out.display(),
        label,
        graph.n(),
        graph.edges().len(),
        graph.total_weight(),
        args.seed
    );
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let (graph, problem) = load_problem(&args.problem)?;
    let (schedule, schedule_label) = args.sim.schedule()?;
    let params = args.sim.params();
    let trajectory = simulate(&problem, &schedule, &params, TraceMetric::Cut(&graph))?;
    let readout = binarize(&trajectory.final_state.phases, 0)?;

    let energy = machine_energy(&problem, &readout.spins)?;
    let ising = hamiltonian(&problem, &readout.spins)?;
    let cut = cut_value(&graph, &readout.spins)?;
    let max_residual = readout.residuals.iter().cloned().fold(0.0f64, f64::max);

    println!(
        "problem: {} (n = {}, {} edges)",
        args.problem.display(),
        graph.n(),
        graph.edges().len()
    );
    println!("schedule: {schedule_label}");
    println!("seed: {}", params.seed);
    println!("spins: {:?}", readout.spins.as_slice());
    println!("machine_energy: {energy}");
    println!("hamiltonian: {ising}");
    println!("cut: {cut}");
    println!(
        "settled: {} (max residual {:.4} rad)",
        readout.settled, max_residual
    );
    if !readout.settled {
        eprintln!("warning: final state is not settled (max residual {max_residual:.4} rad > 0.1)");
    }

    if let Some(path) = &args.trace {
        write_file(path, &trajectory.to_csv())?;
    }
    if let Some(path) = &args.out {
        let json = serde_json::json!({
            "seed": params.seed,
            "n": graph.n(),
            "spins": readout.spins.as_slice(),
            "machine_energy": energy,
            "hamiltonian": ising,
            "cut": cut,
            "settled": readout.settled,
            "max_residual": max_residual,
            "dt": params.dt,
            "t_end": params.t_end,
            "schedule": schedule_label,
        });
        write_file(
            path,
            &format!("{}\n", serde_json::to_string_pretty(&json).unwrap()),
        )?;
    }
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> Result<(), CliError> {
    let (graph, problem) = load_problem(&args.problem)?;
    let result = oracle_for(
        &problem,
        &graph,
        args.method,
        args.iters,
        args.tenure,
        args.restarts,
        args.seed,
    )?;
    let mut value = serde_json::to_value(&result).unwrap();
    value["seed"] = serde_json::json!(args.seed);
    let text = format!("{}\n", serde_json::to_string_pretty(&value).unwrap());
    print!("{text}");
    if let Some(path) = &args.out {
        write_file(path, &text)?;
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    let (graph, problem) = load_problem(&args.problem)?;
    let (schedule, schedule_label) = args.sim.schedule()?;
    let params = args.sim.params();
    let oracle = oracle_for(
        &problem,
        &graph,
        args.oracle_method,
        args.iters,
        args.tenure,
        args.restarts,
        args.sim.seed,
    )?;

    if let Some(dir) = &args.trace_dir {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    let sink = |seed: u64, traj: &Trajectory| -> oim_core::Result<()> {
        if let Some(dir) = &args.trace_dir {
            let path = dir.join(format!("run_{seed}.csv"));
            // surfaced as a plain message; oim_core::Error has no I/O variant
            fs::write(&path, traj.to_csv())
                .map_err(|e| oim_core::Error::InvalidParam(format!("{}: {e}", path.display())))?;
        }
        Ok(())
    };
    let report: BenchReport = run_ensemble_with(
        &problem,
        Some(&graph),
        &schedule,
        &params,
        args.runs,
        args.sim.seed,
        &oracle,
        sink,
    )?;

    println!(
        "bench: {} runs of {} (n = {}), schedule {}",
        report.runs,
        args.problem.display(),
        graph.n(),
        schedule_label
    );
    let oracle_label = match args.oracle_method {
        MethodArg::Brute => "brute",
        MethodArg::Tabu => "tabu",
    };
    println!(
        "oracle ({oracle_label}): machine_energy {}, cut {}",
        report.oracle_machine_energy,
        report.oracle_cut.map_or("n/a".into(), |c| c.to_string())
    );
    println!("success_prob: {}", report.success_prob);
    println!(
        "approx_ratio: mean {} max {}",
        report
            .approx_ratio_mean
            .map_or("n/a".into(), |v| v.to_string()),
        report
            .approx_ratio_max
            .map_or("n/a".into(), |v| v.to_string())
    );
    println!(
        "tts_99: {} cycles",
        report.tts_99.map_or("undefined".into(), |v| v.to_string())
    );
    println!("bitflips_mean: {}", report.bitflips_mean);
    println!("settled_frac: {}", report.settled_frac);

    match &args.out {
        Some(path) => write_file(path, &report.to_json())?,
        None => print!("{}", report.to_json()),
    }
    Ok(())
}

fn cmd_quantize(args: &QuantizeArgs) -> Result<(), CliError> {
    let (graph, problem) = load_problem(&args.problem)?;
    let kind = match args.model {
        ModelArg::Digipot8 => QuantizerKind::Digipot8,
        ModelArg::R2rParallel => QuantizerKind::R2rParallel,
        ModelArg::R2rSeries => QuantizerKind::R2rSeries,
    };
    let model = QuantizerModel {
        kind,
        full_scale_ohms: args.full_scale,
        wiper_ohms: args.wiper,
        unit_ohms: args.unit,
    };
    let mode = if args.signed {
        SignMode::SoftwareSigned
    } else {
        SignMode::HardwareFaithful
    };
    let board = pad_to_board(&problem, args.board_size);
    let outcome = quantize_problem(&board, &model, args.kc, mode)?;
    write_file(&args.out, &codes_csv(&outcome))?;
    if let Some(path) = &args.quantized_out {
        // strip board padding back off; padded spins carry no edges
        let realized = ising_to_maxcut(&outcome.quantized);
        let trimmed = WeightedGraph::new(graph.n(), realized.edges().to_vec())?;
        write_file(path, &serialize_problem(&trimmed))?;
    }

    let connected = outcome.records.iter().filter(|r| r.code >= 0).count();
    println!(
        "quantized {} pairs onto {:?}: {} connected, {} disconnected, {} chips",
        outcome.records.len(),
        model.kind,
        connected,
        outcome.records.len() - connected,
        outcome.codes.chips_required()
    );
    println!("max relative coupling error: {}", outcome.max_rel_err);
    if outcome.clamped_pairs > 0 {
        eprintln!(
            "warning: {} pair(s) clamped to the resistance range ends",
            outcome.clamped_pairs
        );
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Quantize(args) => cmd_quantize(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
