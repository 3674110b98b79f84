//! Command-line front end: build transfer experiments from flags or a JSON
//! config file, run them, and emit CSV data plus a JSON metadata sidecar.

mod config;

use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{
    load_config, parse_f64_list, parse_inclusive_range, parse_io, parse_shift_entry,
    parse_sigma2, parse_usize_list, parse_window, write_sidecar, FileConfig, Metadata,
};
use qst_core::analytic::{discrepancy_csv, verify_analytic, Family, VerifyOptions};
use qst_core::graph::Graph;
use qst_core::hamiltonian::{build, NoiseMode, ShiftSpec};
use qst_core::noise::{average_fidelity_sweep, linear_sigma2_grid, shifted_vs_unshifted_comparison};
use qst_core::search::{
    chain_transfer_time, default_chain_window_cap, default_theta_window_cap, maximize_fidelity,
    theta_transfer_time, PstResult, SearchSettings, TABLE_GRID_POINTS, TABLE_PST_THRESHOLD,
};
use qst_core::spectral::{eigendecompose, fidelity_trace, uniform_grid, TraceSource};

/// Marker for configuration problems; mapped to exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(UsageError(msg.into()))
}

#[derive(Parser)]
#[command(
    name = "qst",
    about = "Single-excitation state transfer on qubit networks: fidelity traces, transfer-time tables, disorder sweeps",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON config file mirroring the flag names; flags override its values.
    /// A metadata sidecar from a previous run is also accepted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads for table cells and disorder realizations
    /// (default: available parallelism). Results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the transfer fidelity of a vertex pair on a uniform time grid.
    Fidelity(FidelityArgs),
    /// Locate the maximal-fidelity time in a window.
    Pst(PstArgs),
    /// Transfer-time tables.
    #[command(subcommand)]
    Table(TableCommand),
    /// Average fidelity vs disorder variance (Monte Carlo).
    Noise(NoiseArgs),
    /// Compare every closed-form result against the numeric route and write
    /// the discrepancy report.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum TableCommand {
    /// End-shifted chains: shift values x chain lengths.
    Chains(TableChainsArgs),
    /// Multi-path graphs at fixed shift: path counts x path lengths.
    Theta(TableThetaArgs),
}

#[derive(Args, Clone, Default)]
struct GraphArgs {
    /// Topology: kn | knm | path | theta | file
    #[arg(long)]
    graph: Option<String>,
    /// Vertex count (path length parameter for theta).
    #[arg(long)]
    n: Option<usize>,
    /// Number of internally disjoint paths (theta only).
    #[arg(long)]
    l: Option<usize>,
    /// Edge-list file (first line n, then `i j` lines, `#` comments).
    #[arg(long)]
    edge_file: Option<PathBuf>,
    /// Input/output vertex pair `I,J` (default: the natural pair).
    #[arg(long)]
    io: Option<String>,
    /// Energy shift applied to both I/O vertices.
    #[arg(long)]
    shift_io: Option<f64>,
    /// Per-vertex shift `VERTEX:VALUE`; repeatable, overrides --shift-io.
    #[arg(long)]
    shift: Option<Vec<String>>,
}

#[derive(Args, Clone, Default)]
struct FidelityArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// End of the time grid (inclusive).
    #[arg(long)]
    tmax: Option<f64>,
    /// Number of grid intervals; samples at k*tmax/steps, k = 0..=steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Also dump the built Hamiltonian matrix to this CSV (debugging).
    #[arg(long)]
    dump_hamiltonian: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct PstArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Search window `A,B`.
    #[arg(long)]
    window: Option<String>,
    /// Grid points for the scan.
    #[arg(long)]
    grid_points: Option<usize>,
    /// Fidelity counting as perfect transfer.
    #[arg(long)]
    pst_threshold: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct TableChainsArgs {
    /// Comma-separated shift values.
    #[arg(long)]
    shifts: Option<String>,
    /// Comma-separated chain lengths.
    #[arg(long)]
    sizes: Option<String>,
    #[arg(long)]
    pst_threshold: Option<f64>,
    /// Search window cap for every cell (default: 1.5x the built-in
    /// reference value; required for cells without one).
    #[arg(long)]
    window_cap: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct TableThetaArgs {
    /// Shift applied to both antipodal vertices.
    #[arg(long)]
    shift_io: Option<f64>,
    /// Comma-separated path counts (l values).
    #[arg(long)]
    paths: Option<String>,
    /// Comma-separated path lengths (n values).
    #[arg(long)]
    sizes: Option<String>,
    #[arg(long)]
    pst_threshold: Option<f64>,
    #[arg(long)]
    window_cap: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct NoiseArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Disorder target: vertex | edge
    #[arg(long)]
    mode: Option<String>,
    /// Variance grid `START:STOP:COUNT` (linear, inclusive).
    #[arg(long)]
    sigma2: Option<String>,
    /// Realizations per grid point.
    #[arg(long)]
    samples: Option<usize>,
    /// Master seed; reruns are bit-identical.
    #[arg(long)]
    seed: Option<u64>,
    /// Fixed evaluation time: runs a single sweep of the configured shifts
    /// instead of the shifted-vs-unshifted comparison.
    #[arg(long)]
    t_eval: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct VerifyArgs {
    /// Families to check: kn,knm
    #[arg(long)]
    families: Option<String>,
    /// Inclusive size range `A..B` (or a single size).
    #[arg(long = "n-range", alias = "n")]
    n_range: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let started = Instant::now();
    match run(cli, started) {
        Ok(()) => {}
        Err(err) => {
            if err.is::<UsageError>() {
                eprintln!("error: {err}");
                std::process::exit(2);
            }
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn run(cli: Cli, started: Instant) -> Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring thread pool")?;
    }
    let file = match &cli.config {
        Some(path) => load_config(path).map_err(|e| usage(format!("{e:#}")))?,
        None => FileConfig::default(),
    };
    let command_name = match &cli.command {
        Command::Fidelity(_) => "fidelity",
        Command::Pst(_) => "pst",
        Command::Table(TableCommand::Chains(_)) => "table-chains",
        Command::Table(TableCommand::Theta(_)) => "table-theta",
        Command::Noise(_) => "noise",
        Command::Verify(_) => "verify",
    };
    if let Some(file_command) = &file.command {
        if file_command != command_name {
            return Err(usage(format!(
                "config file is for `{file_command}`, but `{command_name}` was invoked"
            )));
        }
    }
    let threads = cli.threads.or(file.threads);

    let (csv, out, mut effective) = match cli.command {
        Command::Fidelity(args) => run_fidelity(args, &file)?,
        Command::Pst(args) => run_pst(args, &file)?,
        Command::Table(TableCommand::Chains(args)) => run_table_chains(args, &file)?,
        Command::Table(TableCommand::Theta(args)) => run_table_theta(args, &file)?,
        Command::Noise(args) => run_noise(args, &file)?,
        Command::Verify(args) => run_verify(args, &file)?,
    };
    effective.command = Some(command_name.into());
    effective.threads = threads;

    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating output directory for {}", out.display()))?;
    }
    std::fs::write(&out, &csv).with_context(|| format!("writing {}", out.display()))?;
    let meta = Metadata {
        command: command_name.into(),
        config: effective,
        version: env!("CARGO_PKG_VERSION").into(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    write_sidecar(&out, &meta)?;
    eprintln!("wrote {}", out.display());
    Ok(())
}

/// Resolved graph selection: the graph, its I/O pair and the shift spec.
struct Experiment {
    graph: Graph,
    io: (usize, usize),
    shifts: ShiftSpec,
    descriptor: String,
}

fn resolve_graph(args: &GraphArgs, file: &FileConfig) -> Result<(Experiment, FileConfig)> {
    let kind = args
        .graph
        .clone()
        .or_else(|| file.graph.clone())
        .ok_or_else(|| usage("--graph is required (kn | knm | path | theta | file)"))?;
    let n = args.n.or(file.n);
    let l = args.l.or(file.l);
    let edge_file = args.edge_file.clone().or_else(|| file.edge_file.clone());
    let io_text = args.io.clone().or_else(|| file.io.clone());

    let need_n = || n.ok_or_else(|| usage(format!("--n is required for --graph {kind}")));
    let (graph, natural_io, descriptor) = match kind.as_str() {
        "kn" => {
            let n = need_n()?;
            (Graph::complete(n)?, (0, n - 1), format!("kn({n})"))
        }
        "knm" => {
            let n = need_n()?;
            let io = io_text
                .as_deref()
                .map(parse_io)
                .transpose()
                .map_err(|e| usage(e.to_string()))?
                .unwrap_or((0, n - 1));
            (
                Graph::complete_minus_edge(n, io.0, io.1)?,
                io,
                format!("knm({n})"),
            )
        }
        "path" => {
            let n = need_n()?;
            (Graph::path(n)?, (0, n - 1), format!("path({n})"))
        }
        "theta" => {
            let n = need_n()?;
            let l = l.ok_or_else(|| usage("--l is required for --graph theta"))?;
            (
                Graph::theta(l, n)?,
                Graph::theta_antipodes(l, n),
                format!("theta({l},{n})"),
            )
        }
        "file" => {
            let path = edge_file
                .clone()
                .ok_or_else(|| usage("--edge-file is required for --graph file"))?;
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading {}", path.display()))?;
            let g = Graph::parse_edge_list(&text)?;
            let io = (0, g.vertex_count() - 1);
            (g, io, format!("file({})", path.display()))
        }
        other => return Err(usage(format!("unknown graph kind `{other}`"))),
    };

    let io = match &io_text {
        Some(text) => parse_io(text).map_err(|e| usage(e.to_string()))?,
        None => natural_io,
    };
    for v in [io.0, io.1] {
        if v >= graph.vertex_count() {
            return Err(usage(format!(
                "I/O vertex {v} out of range for {descriptor}"
            )));
        }
    }

    let shift_io = args.shift_io.or(file.shift_io);
    let shift_entries = args.shift.clone().or_else(|| file.shift.clone());
    let mut shifts = ShiftSpec::none();
    if let Some(x) = shift_io {
        shifts = ShiftSpec::io_pair(io.0, io.1, x);
    }
    if let Some(entries) = &shift_entries {
        for entry in entries {
            let (v, x) = parse_shift_entry(entry).map_err(|e| usage(e.to_string()))?;
            shifts.set(v, x);
        }
    }

    let echo = FileConfig {
        graph: Some(kind),
        n,
        l,
        edge_file,
        io: Some(format!("{},{}", io.0, io.1)),
        shift_io,
        shift: shift_entries,
        ..FileConfig::default()
    };
    Ok((
        Experiment {
            graph,
            io,
            shifts,
            descriptor,
        },
        echo,
    ))
}

fn run_fidelity(args: FidelityArgs, file: &FileConfig) -> Result<(String, PathBuf, FileConfig)> {
    let (exp, mut echo) = resolve_graph(&args.graph, file)?;
    let tmax = args.tmax.or(file.tmax).unwrap_or(10.0);
    let steps = args.steps.or(file.steps).unwrap_or(2000);
    if !tmax.is_finite() || tmax <= 0.0 || steps == 0 {
        return Err(usage("--tmax must be positive and --steps nonzero"));
    }
    let out = args
        .out
        .or_else(|| file.out.clone())
        .unwrap_or_else(|| PathBuf::from("fidelity.csv"));

    let h = build(&exp.graph, &exp.shifts)?;
    let dump = args
        .dump_hamiltonian
        .or_else(|| file.dump_hamiltonian.clone());
    if let Some(path) = &dump {
        std::fs::write(path, h.to_csv())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let es = eigendecompose(&h)?;
    let grid = uniform_grid(tmax, steps);
    let source = TraceSource {
        graph: exp.descriptor.clone(),
        input: exp.io.0,
        output: exp.io.1,
        shifts: exp.shifts.iter().collect(),
    };
    let trace = fidelity_trace(&es, exp.io.0, exp.io.1, &grid, source)?;

    echo.tmax = Some(tmax);
    echo.steps = Some(steps);
    echo.dump_hamiltonian = dump;
    echo.out = Some(out.clone());
    Ok((trace.to_csv(), out, echo))
}

fn pst_csv(results: &[PstResult]) -> String {
    let mut csv = String::from("tStar,fMax,isPst,gridResolution,windowLo,windowHi\n");
    for r in results {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            qst_core::fmt_float(r.t_star),
            qst_core::fmt_float(r.f_max),
            r.is_pst,
            qst_core::fmt_float(r.grid_resolution),
            qst_core::fmt_float(r.window.0),
            qst_core::fmt_float(r.window.1),
        ));
    }
    csv
}

fn run_pst(args: PstArgs, file: &FileConfig) -> Result<(String, PathBuf, FileConfig)> {
    let (exp, mut echo) = resolve_graph(&args.graph, file)?;
    let window_text = args
        .window
        .clone()
        .or_else(|| file.window.clone())
        .unwrap_or_else(|| "0,10".into());
    let window = parse_window(&window_text).map_err(|e| usage(e.to_string()))?;
    let grid_points = args
        .grid_points
        .or(file.grid_points)
        .unwrap_or(TABLE_GRID_POINTS);
    let pst_threshold = args
        .pst_threshold
        .or(file.pst_threshold)
        .unwrap_or(TABLE_PST_THRESHOLD);
    let out = args
        .out
        .or_else(|| file.out.clone())
        .unwrap_or_else(|| PathBuf::from("pst.csv"));

    let es = eigendecompose(&build(&exp.graph, &exp.shifts)?)?;
    let settings = SearchSettings {
        window,
        grid_points,
        pst_threshold,
    };
    let result = maximize_fidelity(&es, exp.io.0, exp.io.1, &settings)?;

    echo.window = Some(window_text);
    echo.grid_points = Some(grid_points);
    echo.pst_threshold = Some(pst_threshold);
    echo.out = Some(out.clone());
    Ok((pst_csv(&[result]), out, echo))
}

fn table_csv(rows: &[(f64, usize, Option<usize>, PstResult, f64)]) -> String {
    let mut csv = String::from("dE,n,l,tStar,fMax,isPst,gridPoints,windowCap\n");
    for (d_e, n, l, r, cap) in rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            qst_core::fmt_float(*d_e),
            n,
            l.map(|v| v.to_string()).unwrap_or_default(),
            qst_core::fmt_float(r.t_star),
            qst_core::fmt_float(r.f_max),
            r.is_pst,
            TABLE_GRID_POINTS,
            qst_core::fmt_float(*cap),
        ));
    }
    csv
}

/// Evaluate independent table cells in parallel, merging results in cell
/// order so the output does not depend on scheduling.
fn run_cells<C: Sync, R: Send>(
    cells: &[C],
    eval: impl Fn(&C) -> Result<R> + Sync + Send,
) -> Result<Vec<R>> {
    use rayon::prelude::*;
    cells.par_iter().map(eval).collect()
}

fn run_table_chains(
    args: TableChainsArgs,
    file: &FileConfig,
) -> Result<(String, PathBuf, FileConfig)> {
    let shifts_text = args
        .shifts
        .clone()
        .or_else(|| file.shifts.clone())
        .unwrap_or_else(|| "10,20,30,40,50".into());
    let sizes_text = args
        .sizes
        .clone()
        .or_else(|| file.sizes.clone())
        .unwrap_or_else(|| "2,3,4,5".into());
    let shifts = parse_f64_list(&shifts_text).map_err(|e| usage(e.to_string()))?;
    let sizes = parse_usize_list(&sizes_text).map_err(|e| usage(e.to_string()))?;
    let pst_threshold = args
        .pst_threshold
        .or(file.pst_threshold)
        .unwrap_or(TABLE_PST_THRESHOLD);
    let cap_override = args.window_cap.or(file.window_cap);
    let out = args
        .out
        .or_else(|| file.out.clone())
        .unwrap_or_else(|| PathBuf::from("table_chains.csv"));

    let mut cells = Vec::new();
    for &d_e in &shifts {
        for &n in &sizes {
            let cap = cap_override
                .or_else(|| default_chain_window_cap(d_e, n))
                .ok_or_else(|| {
                    usage(format!(
                        "no reference window for dE={d_e}, n={n}; pass --window-cap"
                    ))
                })?;
            cells.push((d_e, n, cap));
        }
    }
    let rows = run_cells(&cells, |&(d_e, n, cap)| {
        chain_transfer_time(n, d_e, pst_threshold, cap)
            .map(|r| (d_e, n, None, r, cap))
            .map_err(Into::into)
    })?;

    let echo = FileConfig {
        shifts: Some(shifts_text),
        sizes: Some(sizes_text),
        pst_threshold: Some(pst_threshold),
        window_cap: cap_override,
        out: Some(out.clone()),
        ..FileConfig::default()
    };
    Ok((table_csv(&rows), out, echo))
}

fn run_table_theta(
    args: TableThetaArgs,
    file: &FileConfig,
) -> Result<(String, PathBuf, FileConfig)> {
    let d_e = args.shift_io.or(file.shift_io).unwrap_or(10.0);
    let paths_text = args
        .paths
        .clone()
        .or_else(|| file.paths.clone())
        .unwrap_or_else(|| "1,2,3,4".into());
    let sizes_text = args
        .sizes
        .clone()
        .or_else(|| file.sizes.clone())
        .unwrap_or_else(|| "3,4,5".into());
    let paths = parse_usize_list(&paths_text).map_err(|e| usage(e.to_string()))?;
    let sizes = parse_usize_list(&sizes_text).map_err(|e| usage(e.to_string()))?;
    let pst_threshold = args
        .pst_threshold
        .or(file.pst_threshold)
        .unwrap_or(TABLE_PST_THRESHOLD);
    let cap_override = args.window_cap.or(file.window_cap);
    let out = args
        .out
        .or_else(|| file.out.clone())
        .unwrap_or_else(|| PathBuf::from("table_theta.csv"));

    let mut cells = Vec::new();
    for &l in &paths {
        for &n in &sizes {
            let cap = cap_override
                .or_else(|| default_theta_window_cap(d_e, l, n))
                .ok_or_else(|| {
                    usage(format!(
                        "no reference window for dE={d_e}, l={l}, n={n}; pass --window-cap"
                    ))
                })?;
            cells.push((l, n, cap));
        }
    }
    let rows = run_cells(&cells, |&(l, n, cap)| {
        theta_transfer_time(l, n, d_e, pst_threshold, cap)
            .map(|r| (d_e, n, Some(l), r, cap))
            .map_err(Into::into)
    })?;

    let echo = FileConfig {
        shift_io: Some(d_e),
        paths: Some(paths_text),
        sizes: Some(sizes_text),
        pst_threshold: Some(pst_threshold),
        window_cap: cap_override,
        out: Some(out.clone()),
        ..FileConfig::default()
    };
    Ok((table_csv(&rows), out, echo))
}

fn run_noise(args: NoiseArgs, file: &FileConfig) -> Result<(String, PathBuf, FileConfig)> {
    let (exp, mut echo) = resolve_graph(&args.graph, file)?;
    let mode_text = args
        .mode
        .clone()
        .or_else(|| file.mode.clone())
        .unwrap_or_else(|| "vertex".into());
    let mode = match mode_text.as_str() {
        "vertex" => NoiseMode::VertexFrequencies,
        "edge" => NoiseMode::EdgeCouplings,
        other => return Err(usage(format!("unknown noise mode `{other}`"))),
    };
    let sigma2_text = args
        .sigma2
        .clone()
        .or_else(|| file.sigma2.clone())
        .unwrap_or_else(|| "0:2:21".into());
    let (start, stop, count) = parse_sigma2(&sigma2_text).map_err(|e| usage(e.to_string()))?;
    let grid = linear_sigma2_grid(start, stop, count);
    let samples = args.samples.or(file.samples).unwrap_or(2000);
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let t_eval = args.t_eval.or(file.t_eval);
    let out = args
        .out
        .or_else(|| file.out.clone())
        .unwrap_or_else(|| PathBuf::from("noise.csv"));

    let csv = match t_eval {
        Some(t) => {
            let sweep = average_fidelity_sweep(
                &exp.graph,
                &exp.shifts,
                exp.io.0,
                exp.io.1,
                mode,
                &grid,
                samples,
                t,
                seed,
            )?;
            sweep.to_csv()
        }
        None => {
            let cmp = shifted_vs_unshifted_comparison(
                &exp.graph,
                exp.io.0,
                exp.io.1,
                mode,
                &grid,
                samples,
                seed,
            )?;
            cmp.to_csv()
        }
    };

    echo.mode = Some(mode_text);
    echo.sigma2 = Some(sigma2_text);
    echo.samples = Some(samples);
    echo.seed = Some(seed);
    echo.t_eval = t_eval;
    echo.out = Some(out.clone());
    Ok((csv, out, echo))
}

fn run_verify(args: VerifyArgs, file: &FileConfig) -> Result<(String, PathBuf, FileConfig)> {
    let families_text = args
        .families
        .clone()
        .or_else(|| file.families.clone())
        .unwrap_or_else(|| "kn,knm".into());
    let mut families = Vec::new();
    for part in families_text.split(',') {
        match part.trim() {
            "kn" => families.push(Family::Kn),
            "knm" => families.push(Family::KnMinus),
            other => return Err(usage(format!("unknown family `{other}`"))),
        }
    }
    let range_text = args
        .n_range
        .clone()
        .or_else(|| file.n_range.clone())
        .unwrap_or_else(|| "4..12".into());
    let (n_min, n_max) = parse_inclusive_range(&range_text).map_err(|e| usage(e.to_string()))?;
    if n_min < 4 {
        return Err(usage("closed forms require n >= 4"));
    }
    let out = args
        .out
        .or_else(|| file.out.clone())
        .unwrap_or_else(|| PathBuf::from("verify_report.csv"));

    let options = VerifyOptions {
        families,
        n_min,
        n_max,
        ..VerifyOptions::default()
    };
    let records = verify_analytic(&options)?;
    eprintln!(
        "verify: {} quantities disagreed with the numeric route beyond {:.0e}",
        records.len(),
        options.tolerance
    );

    let echo = FileConfig {
        families: Some(families_text),
        n_range: Some(range_text),
        out: Some(out.clone()),
        ..FileConfig::default()
    };
    Ok((discrepancy_csv(&records), out, echo))
}
