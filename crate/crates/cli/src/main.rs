//! `apnfa`: compile matching rules to NFAs, label them over traffic, reduce
//! them approximately, evaluate the candidates, and plan multi-stage
//! matcher configurations.
//!
//! Every subcommand reads and writes plain files, so pipelines can be
//! resumed and individual artifacts swapped out. Given identical inputs the
//! outputs are byte-identical.
//!
//! Exit codes: 0 success, 2 usage, 3 input format, 4 infeasible plan,
//! 5 invariant violation (a reduced automaton missed a packet the precise
//! one accepts).

use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use apnfa_core::cost::CostModel;
use apnfa_core::evaluate;
use apnfa_core::labelling::{self, label_parallel};
use apnfa_core::nfa::Nfa;
use apnfa_core::pareto::{self, CandidateRow, SweepGrid};
use apnfa_core::pcap::{self, PcapOptions};
use apnfa_core::planner::{self, GbpsRate, Objective, PlanOutcome, PlanProblem, StageCount};
use apnfa_core::reduce::{self, ReductionMethod, ReductionReport};
use apnfa_core::rules::{compile_ruleset, CompileOptions, RuleSet};
use apnfa_core::text;
use apnfa_core::traffic::{self, TrafficSample};
use apnfa_core::{dot, Labeling};

const EXIT_USAGE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_INFEASIBLE: u8 = 4;
const EXIT_VIOLATION: u8 = 5;

/// Worker count for packet-parallel phases; `APNFA_WORKERS` overrides.
fn workers() -> NonZeroUsize {
    std::env::var("APNFA_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
        .and_then(NonZeroUsize::new)
        .or_else(|| std::thread::available_parallelism().ok())
        .unwrap_or(NonZeroUsize::MIN)
}

struct CliError {
    exit: u8,
    code: &'static str,
    message: String,
}

impl CliError {
    fn new(exit: u8, code: &'static str, message: impl Into<String>) -> Self {
        CliError {
            exit,
            code,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, "USAGE", message)
    }

    fn input(message: impl Into<String>) -> Self {
        Self::new(EXIT_INPUT, "INPUT_FORMAT", message)
    }
}

macro_rules! input_error_from {
    ($($ty:ty),*) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::input(e.to_string())
            }
        })*
    };
}

input_error_from!(
    apnfa_core::text::NfaTextError,
    apnfa_core::rules::RuleError,
    apnfa_core::traffic::RawFormatError,
    apnfa_core::pcap::PcapError,
    apnfa_core::labelling::LabellingError,
    apnfa_core::cost::CostError,
    apnfa_core::evaluate::EvalError,
    std::io::Error
);

impl From<apnfa_core::reduce::ReduceError> for CliError {
    fn from(e: apnfa_core::reduce::ReduceError) -> Self {
        use apnfa_core::reduce::ReduceError::*;
        match e {
            InvalidTheta(_)
            | InvalidDistanceCeiling(_)
            | InvalidFrequencyCeiling(_)
            | Parameter(_) => CliError::usage(e.to_string()),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<apnfa_core::planner::PlanError> for CliError {
    fn from(e: apnfa_core::planner::PlanError) -> Self {
        use apnfa_core::planner::PlanError::*;
        match e {
            NoCandidates | NonPositive { .. } | NoStages | InvalidBound { .. } => {
                CliError::usage(e.to_string())
            }
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<apnfa_core::pareto::SweepError> for CliError {
    fn from(e: apnfa_core::pareto::SweepError) -> Self {
        use apnfa_core::pareto::SweepError::*;
        match e {
            Reduce(inner) => inner.into(),
            Eval(inner) => inner.into(),
            EmptyGrid => CliError::usage(e.to_string()),
            Csv { .. } => CliError::input(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "apnfa",
    version,
    about = "Traffic-driven NFA reduction and stage planning"
)]
struct Cli {
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TrafficFormat {
    Raw,
    Pcap,
}

#[derive(Args)]
struct TrafficArgs {
    /// Packet trace (raw records or classic pcap).
    #[arg(long)]
    traffic: PathBuf,
    /// Trace format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    traffic_format: Option<TrafficFormat>,
    /// Read at most this many payloads (pcap only).
    #[arg(long)]
    max_packets: Option<u64>,
    /// Truncate payloads to this many bytes (pcap only).
    #[arg(long)]
    truncate: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a rule file (`id<TAB>pattern` lines) into a union NFA.
    Compile {
        /// Rule file.
        rules: PathBuf,
        /// Output NFA file.
        #[arg(short, long)]
        output: PathBuf,
        /// Match case-insensitively.
        #[arg(long)]
        case_insensitive: bool,
        /// Cap on bounded-repetition expansion.
        #[arg(long, default_value_t = 64)]
        repeat_cap: u32,
    },
    /// Label an NFA's states with their significance over training traffic.
    Label {
        #[arg(long)]
        nfa: PathBuf,
        #[command(flatten)]
        traffic: TrafficArgs,
        /// Output labeling CSV.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Apply one approximate reduction.
    Reduce {
        #[arg(long)]
        nfa: PathBuf,
        /// Labeling CSV (required by prune, merge, merge-prune).
        #[arg(long)]
        labeling: Option<PathBuf>,
        #[arg(long)]
        method: ReductionMethod,
        /// Reduction ratio θ in (0,1].
        #[arg(long)]
        theta: Option<f64>,
        /// Distance ceiling D ≥ 1 (merge methods).
        #[arg(long)]
        distance_ceiling: Option<f64>,
        /// Frequency ceiling F in (0,1] (merge methods).
        #[arg(long)]
        frequency_ceiling: Option<f64>,
        /// Output NFA file.
        #[arg(short, long)]
        output: PathBuf,
        /// Report path; defaults to `<output>.report.json`.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Compare a reduced NFA against the precise one on testing traffic.
    Eval {
        #[arg(long)]
        precise: PathBuf,
        #[arg(long)]
        reduced: PathBuf,
        #[command(flatten)]
        traffic: TrafficArgs,
        /// Write the JSON result here as well as to stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sweep the reduction grid, evaluate candidates, keep the Pareto set.
    Pareto {
        #[arg(long)]
        nfa: PathBuf,
        #[arg(long)]
        labeling: PathBuf,
        #[command(flatten)]
        traffic: TrafficArgs,
        /// Reduction methods to sweep.
        #[arg(long, value_delimiter = ',', default_value = "prune")]
        methods: Vec<ReductionMethod>,
        /// θ grid.
        #[arg(long, value_delimiter = ',')]
        thetas: Vec<f64>,
        /// Distance-ceiling grid.
        #[arg(long, value_delimiter = ',')]
        distance_ceilings: Vec<f64>,
        /// Frequency-ceiling grid.
        #[arg(long, value_delimiter = ',')]
        frequency_ceilings: Vec<f64>,
        /// Cost model (`key=value` file); defaults apply when omitted.
        #[arg(long)]
        cost_model: Option<PathBuf>,
        /// Override table CSV (`candidate_id,luts`).
        #[arg(long)]
        cost_overrides: Option<PathBuf>,
        /// Include the precise automaton as a candidate.
        #[arg(long)]
        include_precise: bool,
        /// Write each candidate NFA (and report) into this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Pareto-filtered candidate CSV.
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the full (unfiltered) sweep CSV for plotting.
        #[arg(long)]
        sweep_output: Option<PathBuf>,
    },
    /// Solve the multi-stage configuration problem.
    Plan {
        /// Problem JSON file (candidates, rates, stages, objective).
        #[arg(long, conflicts_with_all = ["candidates", "input_rate", "throughput"])]
        problem: Option<PathBuf>,
        /// Candidate CSV (as written by `pareto`).
        #[arg(long)]
        candidates: Option<PathBuf>,
        /// Input rate out_0 in Gbps.
        #[arg(long)]
        input_rate: Option<f64>,
        /// Per-engine throughput TP in Gbps.
        #[arg(long)]
        throughput: Option<f64>,
        /// Stage count (upper bound unless --exact-stages).
        #[arg(long, default_value_t = 3)]
        stages: u32,
        /// Use exactly --stages stages instead of up to that many.
        #[arg(long)]
        exact_stages: bool,
        /// `opt-rsc` (minimize LUTs, needs --max-out) or `opt-out`
        /// (minimize output, needs --budget).
        #[arg(long)]
        objective: Option<String>,
        /// Output-rate cap X in Gbps (opt-rsc).
        #[arg(long)]
        max_out: Option<f64>,
        /// LUT budget Y (opt-out).
        #[arg(long)]
        budget: Option<f64>,
        /// Write the plan JSON here as well as to stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Export an NFA to Graphviz DOT, optionally heat-colored by labeling.
    ExportDot {
        #[arg(long)]
        nfa: PathBuf,
        #[arg(long)]
        labeling: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn read_traffic(args: &TrafficArgs) -> Result<(TrafficSample, Option<pcap::PcapStats>), CliError> {
    let format = args.traffic_format.unwrap_or_else(|| {
        match args.traffic.extension().and_then(|e| e.to_str()) {
            Some("pcap") | Some("cap") => TrafficFormat::Pcap,
            _ => TrafficFormat::Raw,
        }
    });
    match format {
        TrafficFormat::Raw => Ok((traffic::read_raw(&args.traffic)?, None)),
        TrafficFormat::Pcap => {
            let options = PcapOptions {
                max_packets: args.max_packets,
                truncate: args.truncate,
            };
            let (sample, stats) = pcap::read_pcap(&args.traffic, &options)?;
            Ok((sample, Some(stats)))
        }
    }
}

/// Loads a labeling and insists it was computed for this automaton.
fn read_checked_labeling(path: &Path, nfa: &Nfa) -> Result<Labeling, CliError> {
    let (labeling, recorded_hash) = labelling::read_labeling(path)?;
    let actual = nfa.content_hash();
    if recorded_hash != actual {
        return Err(CliError::input(format!(
            "labeling {} was computed for a different automaton (hash {recorded_hash:016x}, expected {actual:016x})",
            path.display()
        )));
    }
    labeling.check_matches(nfa)?;
    Ok(labeling)
}

fn load_cost_model(
    model_path: Option<&PathBuf>,
    overrides_path: Option<&PathBuf>,
) -> Result<CostModel, CliError> {
    let mut model = match model_path {
        Some(path) => CostModel::read_config(path)?,
        None => CostModel::default(),
    };
    if let Some(path) = overrides_path {
        model.read_overrides(path)?;
    }
    Ok(model)
}

fn run_compile(
    rules_path: &Path,
    output: &Path,
    case_insensitive: bool,
    repeat_cap: u32,
    json: bool,
) -> Result<(), CliError> {
    let rules = RuleSet::read(rules_path)?;
    let options = CompileOptions {
        case_insensitive,
        repeat_expansion_cap: repeat_cap,
    };
    let nfa = compile_ruleset(&rules, &options)?;
    text::write_nfa(&nfa, output)?;
    if json {
        println!(
            "{}",
            serde_json::json!({
                "rules": rules.len(),
                "states": nfa.num_states(),
                "transition_classes": nfa.num_transition_classes(),
                "finals": nfa.finals().len(),
                "output": output.display().to_string(),
            })
        );
    } else {
        println!(
            "compiled {} rules into {} states ({} transition classes) -> {}",
            rules.len(),
            nfa.num_states(),
            nfa.num_transition_classes(),
            output.display()
        );
    }
    Ok(())
}

fn run_label(
    nfa_path: &Path,
    traffic: &TrafficArgs,
    output: &Path,
    json: bool,
) -> Result<(), CliError> {
    let nfa = text::read_nfa(nfa_path)?;
    let (sample, stats) = read_traffic(traffic)?;
    let labeling = label_parallel(&nfa, &sample, workers());
    labelling::write_labeling(&labeling, nfa.content_hash(), output)?;
    if json {
        println!(
            "{}",
            serde_json::json!({
                "states": nfa.num_states(),
                "sample_packets": sample.total_packets(),
                "sample_bytes": sample.total_bytes(),
                "skipped_frames": stats.map(|s| s.skipped),
                "output": output.display().to_string(),
            })
        );
    } else {
        println!(
            "labeled {} states over {} packets ({} bytes) -> {}",
            nfa.num_states(),
            sample.total_packets(),
            sample.total_bytes(),
            output.display()
        );
        if let Some(stats) = stats {
            println!(
                "pcap: {} frames, {} payloads, {} skipped",
                stats.frames, stats.payloads, stats.skipped
            );
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_reduce(
    nfa_path: &Path,
    labeling_path: Option<&PathBuf>,
    method: ReductionMethod,
    theta: Option<f64>,
    distance_ceiling: Option<f64>,
    frequency_ceiling: Option<f64>,
    output: &Path,
    report_path: Option<&PathBuf>,
    json: bool,
) -> Result<(), CliError> {
    let nfa = text::read_nfa(nfa_path)?;
    let need = |value: Option<f64>, flag: &str| {
        value.ok_or_else(|| CliError::usage(format!("method {method} requires {flag}")))
    };
    let labeling = |path: Option<&PathBuf>| -> Result<Labeling, CliError> {
        let path =
            path.ok_or_else(|| CliError::usage(format!("method {method} requires --labeling")))?;
        read_checked_labeling(path, &nfa)
    };
    let (reduced, report): (Nfa, ReductionReport) = match method {
        ReductionMethod::Prune => {
            reduce::prune(&nfa, &labeling(labeling_path)?, need(theta, "--theta")?)?
        }
        ReductionMethod::Merge => reduce::merge(
            &nfa,
            &labeling(labeling_path)?,
            need(distance_ceiling, "--distance-ceiling")?,
            need(frequency_ceiling, "--frequency-ceiling")?,
        )?,
        ReductionMethod::MergePrune => reduce::merge_prune(
            &nfa,
            &labeling(labeling_path)?,
            need(distance_ceiling, "--distance-ceiling")?,
            need(frequency_ceiling, "--frequency-ceiling")?,
            need(theta, "--theta")?,
        )?,
        ReductionMethod::Bfs => reduce::bfs_reduce(&nfa, need(theta, "--theta")?)?,
    };
    text::write_nfa(&reduced, output)?;
    let report_file = report_path.cloned().unwrap_or_else(|| {
        let mut name = output.as_os_str().to_owned();
        name.push(".report.json");
        PathBuf::from(name)
    });
    let report_json = serde_json::to_string_pretty(&report).expect("report serializes");
    std::fs::write(&report_file, format!("{report_json}\n"))?;
    if json {
        println!("{report_json}");
    } else {
        println!(
            "{method}: {} -> {} states (ratio {:.3}){} -> {}",
            report.states_before,
            report.states_after,
            report.ratio_achieved,
            report
                .error_bound
                .map(|b| format!(", error bound {b} packets"))
                .unwrap_or_default(),
            output.display()
        );
    }
    Ok(())
}

fn run_eval(
    precise_path: &Path,
    reduced_path: &Path,
    traffic: &TrafficArgs,
    output: Option<&PathBuf>,
    json: bool,
) -> Result<(), CliError> {
    let precise = text::read_nfa(precise_path)?;
    let reduced = text::read_nfa(reduced_path)?;
    let (sample, _) = read_traffic(traffic)?;
    let result = evaluate::evaluate(&precise, &reduced, &sample)?;
    let result_json = serde_json::to_string_pretty(&result).expect("result serializes");
    if let Some(path) = output {
        std::fs::write(path, format!("{result_json}\n"))?;
    }
    if json {
        println!("{result_json}");
    } else {
        println!(
            "tp={} fp={} fn={} ap={:.6} prob={:.6} over {} packets{}",
            result.a_tp,
            result.a_fp,
            result.a_fn,
            result.ap,
            result.prob,
            result.sample_size,
            if result.no_acceptances {
                " (no acceptances)"
            } else {
                ""
            }
        );
    }
    if result.over_approximation_violated() {
        return Err(CliError::new(
            EXIT_VIOLATION,
            "INVARIANT_VIOLATION",
            format!(
                "reduced automaton misses {} packet(s) accepted by the precise one",
                result.a_fn
            ),
        ));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_pareto(
    nfa_path: &Path,
    labeling_path: &Path,
    traffic: &TrafficArgs,
    grid: SweepGrid,
    cost_model_path: Option<&PathBuf>,
    cost_overrides_path: Option<&PathBuf>,
    include_precise: bool,
    out_dir: Option<&PathBuf>,
    output: &Path,
    sweep_output: Option<&PathBuf>,
    json: bool,
) -> Result<(), CliError> {
    let nfa = text::read_nfa(nfa_path)?;
    let labeling = read_checked_labeling(labeling_path, &nfa)?;
    let (sample, _) = read_traffic(traffic)?;
    let cost_model = load_cost_model(cost_model_path, cost_overrides_path)?;
    let outcomes = pareto::sweep(&nfa, &labeling, &sample, &cost_model, &grid, workers())?;

    let mut rows: Vec<CandidateRow> = outcomes.iter().map(|o| o.row.clone()).collect();
    if include_precise {
        rows.push(pareto::precise_row(&nfa, &sample, &cost_model)?);
    }
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        for outcome in &outcomes {
            text::write_nfa(&outcome.nfa, dir.join(format!("{}.nfa", outcome.row.id)))?;
            let report = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
            std::fs::write(
                dir.join(format!("{}.report.json", outcome.row.id)),
                format!("{report}\n"),
            )?;
        }
        if include_precise {
            text::write_nfa(&nfa, dir.join("precise.nfa"))?;
        }
    }
    if let Some(path) = sweep_output {
        std::fs::write(path, pareto::format_candidates_csv(&rows))?;
    }
    let mut frontier = pareto::pareto_filter(&rows);
    // the precise automaton is the designated last stage: when requested it
    // stays a candidate even if some reduction happens to dominate it on
    // (cost, prob) for this particular sample
    if include_precise && !frontier.iter().any(|row| row.id == "precise") {
        if let Some(precise) = rows.iter().find(|row| row.id == "precise") {
            frontier.push(precise.clone());
        }
    }
    std::fs::write(output, pareto::format_candidates_csv(&frontier))?;
    if json {
        println!(
            "{}",
            serde_json::json!({
                "grid_points": outcomes.len(),
                "candidates": frontier.len(),
                "output": output.display().to_string(),
            })
        );
    } else {
        println!(
            "swept {} grid points, {} on the Pareto frontier -> {}",
            outcomes.len(),
            frontier.len(),
            output.display()
        );
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_plan(
    problem_path: Option<&PathBuf>,
    candidates_path: Option<&PathBuf>,
    input_rate: Option<f64>,
    throughput: Option<f64>,
    stages: u32,
    exact_stages: bool,
    objective: Option<&String>,
    max_out: Option<f64>,
    budget: Option<f64>,
    output: Option<&PathBuf>,
    json: bool,
) -> Result<(), CliError> {
    let problem = if let Some(path) = problem_path {
        PlanProblem::read_json(path)?
    } else {
        let candidates_path = candidates_path
            .ok_or_else(|| CliError::usage("either --problem or --candidates is required"))?;
        let csv = std::fs::read_to_string(candidates_path)?;
        let rows = pareto::parse_candidates_csv(&csv)?;
        let candidates = rows
            .iter()
            .map(|row| row.to_planner_candidate())
            .collect::<Result<Vec<_>, _>>()?;
        let to_rate = |gbps: f64, what: &str| {
            GbpsRate::from_f64(gbps).map_err(|e| CliError::usage(format!("invalid {what}: {e}")))
        };
        let input_rate = to_rate(
            input_rate.ok_or_else(|| CliError::usage("--input-rate is required"))?,
            "--input-rate",
        )?;
        let engine_throughput = to_rate(
            throughput.ok_or_else(|| CliError::usage("--throughput is required"))?,
            "--throughput",
        )?;
        let objective = match objective.map(String::as_str) {
            Some("opt-rsc") => Objective::MinResources {
                max_output: to_rate(
                    max_out.ok_or_else(|| CliError::usage("opt-rsc requires --max-out"))?,
                    "--max-out",
                )?,
            },
            Some("opt-out") => Objective::MinOutput {
                max_luts: budget.ok_or_else(|| CliError::usage("opt-out requires --budget"))?,
            },
            Some(other) => {
                return Err(CliError::usage(format!(
                    "unknown objective `{other}` (expected opt-rsc or opt-out)"
                )))
            }
            None => return Err(CliError::usage("--objective is required with --candidates")),
        };
        PlanProblem {
            candidates,
            input_rate,
            engine_throughput,
            stages: if exact_stages {
                StageCount::Exact(stages)
            } else {
                StageCount::UpTo(stages)
            },
            objective,
        }
    };
    let outcome = planner::solve(&problem)?;
    let outcome_json = serde_json::to_string_pretty(&outcome).expect("outcome serializes");
    if let Some(path) = output {
        std::fs::write(path, format!("{outcome_json}\n"))?;
    }
    match &outcome {
        PlanOutcome::Feasible { plan } => {
            if json {
                println!("{outcome_json}");
            } else {
                print!("{}", planner::format_plan_table(plan));
            }
            Ok(())
        }
        PlanOutcome::Infeasible { binding } => {
            if json {
                println!("{outcome_json}");
            }
            Err(CliError::new(
                EXIT_INFEASIBLE,
                "INFEASIBLE",
                format!("no feasible plan: {binding}"),
            ))
        }
    }
}

fn run_export_dot(
    nfa_path: &Path,
    labeling_path: Option<&PathBuf>,
    output: &Path,
    json: bool,
) -> Result<(), CliError> {
    let nfa = text::read_nfa(nfa_path)?;
    let labeling = labeling_path
        .map(|path| read_checked_labeling(path, &nfa))
        .transpose()?;
    dot::write_dot(&nfa, labeling.as_ref(), output)?;
    if json {
        println!(
            "{}",
            serde_json::json!({
                "states": nfa.num_states(),
                "colored": labeling.is_some(),
                "output": output.display().to_string(),
            })
        );
    } else {
        println!("wrote {}", output.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Compile {
            rules,
            output,
            case_insensitive,
            repeat_cap,
        } => run_compile(&rules, &output, case_insensitive, repeat_cap, cli.json),
        Command::Label {
            nfa,
            traffic,
            output,
        } => run_label(&nfa, &traffic, &output, cli.json),
        Command::Reduce {
            nfa,
            labeling,
            method,
            theta,
            distance_ceiling,
            frequency_ceiling,
            output,
            report,
        } => run_reduce(
            &nfa,
            labeling.as_ref(),
            method,
            theta,
            distance_ceiling,
            frequency_ceiling,
            &output,
            report.as_ref(),
            cli.json,
        ),
        Command::Eval {
            precise,
            reduced,
            traffic,
            output,
        } => run_eval(&precise, &reduced, &traffic, output.as_ref(), cli.json),
        Command::Pareto {
            nfa,
            labeling,
            traffic,
            methods,
            thetas,
            distance_ceilings,
            frequency_ceilings,
            cost_model,
            cost_overrides,
            include_precise,
            out_dir,
            output,
            sweep_output,
        } => {
            let grid = SweepGrid {
                methods,
                thetas,
                distance_ceilings,
                frequency_ceilings,
            };
            run_pareto(
                &nfa,
                &labeling,
                &traffic,
                grid,
                cost_model.as_ref(),
                cost_overrides.as_ref(),
                include_precise,
                out_dir.as_ref(),
                &output,
                sweep_output.as_ref(),
                cli.json,
            )
        }
        Command::Plan {
            problem,
            candidates,
            input_rate,
            throughput,
            stages,
            exact_stages,
            objective,
            max_out,
            budget,
            output,
        } => run_plan(
            problem.as_ref(),
            candidates.as_ref(),
            input_rate,
            throughput,
            stages,
            exact_stages,
            objective.as_ref(),
            max_out,
            budget,
            output.as_ref(),
            cli.json,
        ),
        Command::ExportDot {
            nfa,
            labeling,
            output,
        } => run_export_dot(&nfa, labeling.as_ref(), &output, cli.json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("apnfa: error[{}]: {}", err.code, err.message);
            ExitCode::from(err.exit)
        }
    }
}
