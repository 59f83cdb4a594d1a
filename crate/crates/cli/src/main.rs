//! Command-line front end for the `hypernet` library.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use hypernet::admissible::{builtin_library, parse_response, ResponseFunction};
use hypernet::partition::{enumerate_balanced, Balance, DEFAULT_ENUMERATION_LIMIT};
use hypernet::sim::{integrate, linspace, loglog_slope, sweep, Integrator};
use hypernet::synchrony::DEFAULT_PROBES;
use hypernet::{
    augment, check_fibration, find_breaking_witness, format, is_balanced, quotient, robust_verdict,
    AdmissibleSystem, AugmentationSpec, BifurcationDiagram, FibrationMap, Hypernetwork, Partition, ResponseLibrary,
    SimConfig,
};

#[derive(Parser)]
#[command(name = "hypernet", version, about = "Balanced partitions, quotients and robust synchrony of hypernetworks")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    JsonLines,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Check both type-consistency conditions.
    Validate { file: PathBuf },
    /// Decide whether a partition is balanced.
    Balanced(PartitionArgs),
    /// List every balanced partition refining the vertex types.
    Partitions {
        file: PathBuf,
        /// Refuse hypernetworks with more vertices than this.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
        limit: usize,
    },
    /// Quotient hypernetwork of a balanced partition.
    Quotient {
        #[command(flatten)]
        part: PartitionArgs,
        /// Write the quotient here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the vertex and hyperedge map.
        #[arg(long)]
        map_out: Option<PathBuf>,
    },
    /// Check that a map between two hypernetworks is a fibration.
    Fibration {
        source: PathBuf,
        target: PathBuf,
        #[arg(long)]
        map: PathBuf,
    },
    /// Attach the two extra cells and the order-k hyperedges to a core.
    Augment {
        core: PathBuf,
        /// Core nodes v_0..v_k, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        nodes: Vec<String>,
        #[arg(long)]
        name: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Balance, witness and randomized probes in one report.
    Verdict {
        #[command(flatten)]
        part: PartitionArgs,
        /// Highest probe degree (default: k(k+1)/2 for order k).
        #[arg(long)]
        degree_cap: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_PROBES)]
        probes: usize,
    },
    /// An explicit polynomial map breaking the synchrony subspace.
    Witness(PartitionArgs),
    /// Integrate at one parameter value.
    Simulate {
        file: PathBuf,
        #[command(flatten)]
        library: LibraryArgs,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
    },
    /// Final states over a parameter grid, as CSV.
    Bifurcate {
        file: PathBuf,
        #[command(flatten)]
        library: LibraryArgs,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, default_value_t = -0.03, allow_hyphen_values = true)]
        lambda_min: f64,
        #[arg(long, default_value_t = 0.03, allow_hyphen_values = true)]
        lambda_max: f64,
        #[arg(long, default_value_t = 600)]
        lambda_steps: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Log-log slope of |a - b| against lambda from a bifurcation CSV.
    Slope {
        csv: PathBuf,
        #[arg(long, default_value = "w0")]
        a: String,
        #[arg(long, default_value = "w1")]
        b: String,
        #[arg(long, default_value_t = 0.005, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 0.03, allow_hyphen_values = true)]
        hi: f64,
    },
}

#[derive(Args)]
struct PartitionArgs {
    file: PathBuf,
    /// Classes separated by `|`, e.g. "v0 v1 v2 | w0 w1".
    #[arg(long, short)]
    partition: String,
}

#[derive(Args)]
struct LibraryArgs {
    /// Named builtin responses (`example58`). Used when no --response is given.
    #[arg(long)]
    builtin: Option<String>,
    /// Polynomial response `<vertex type>=<expr>`; components separated by `;`.
    #[arg(long = "response", value_name = "TYPE=EXPR")]
    responses: Vec<String>,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, default_value_t = 0.1)]
    dt: f64,
    #[arg(long, default_value_t = 2000.0)]
    t_end: f64,
    /// Initial state, comma separated, in vertex-id order.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x0: Option<Vec<f64>>,
    /// Seed for a random initial state when --x0 is absent and the default
    /// state does not fit.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    stride: usize,
    #[arg(long, default_value_t = 1e-8)]
    steady_tol: f64,
    #[arg(long, value_enum, default_value_t = IntegratorArg::Euler)]
    integrator: IntegratorArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum IntegratorArg {
    Euler,
    Rk4,
}

enum Failure {
    /// Bad invocation or unreadable input: exit 2.
    Usage(String),
    /// The input is readable but the request fails: exit 1.
    Domain(String),
}

fn domain(e: impl std::fmt::Display) -> Failure {
    Failure::Domain(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Hypernetwork, Failure> {
    format::parse(&read(path)?).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Usage(e.to_string()))
        }
    }
}

fn json_line(value: serde_json::Value) -> String {
    format!("{value}\n")
}

fn library(args: &LibraryArgs) -> Result<ResponseLibrary, Failure> {
    if args.responses.is_empty() {
        return builtin_library(args.builtin.as_deref().unwrap_or("example58")).map_err(domain);
    }
    if args.builtin.is_some() {
        return Err(Failure::Usage("--builtin and --response are mutually exclusive".into()));
    }
    let mut lib = ResponseLibrary::new();
    for spec in &args.responses {
        let (vtype, expr) = spec
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--response expects TYPE=EXPR, got `{spec}`")))?;
        let polys = parse_response(expr).map_err(|e| Failure::Domain(format!("response for {vtype}: {e}")))?;
        lib.insert(vtype.trim().to_string(), ResponseFunction::Polynomial(polys));
    }
    Ok(lib)
}

fn sim_config(args: &SimArgs, dim: usize, lambdas: Vec<f64>) -> SimConfig {
    let defaults = SimConfig::default();
    let initial = match &args.x0 {
        Some(x) => x.clone(),
        None if defaults.initial.len() == dim => defaults.initial,
        None => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
            (0..dim).map(|_| rng.gen_range(-0.5..0.5)).collect()
        }
    };
    SimConfig {
        dt: args.dt,
        t_end: args.t_end,
        initial,
        lambdas,
        steady_tol: args.steady_tol,
        stride: args.stride,
        integrator: match args.integrator {
            IntegratorArg::Euler => Integrator::Euler,
            IntegratorArg::Rk4 => Integrator::Rk4,
        },
    }
}

fn partition_of(net: &Hypernetwork, spec: &str) -> Result<Partition, Failure> {
    Partition::parse(net, spec).map_err(domain)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let fmt = cli.format;
    match cli.command {
        Command::Validate { file } => {
            let text = read(&file)?;
            let net = format::parse_unchecked(&text).map_err(|e| Failure::Domain(format!("{}: {e}", file.display())))?;
            let violations = net.validate();
            let out = match fmt {
                OutputFormat::JsonLines => json_line(json!({
                    "valid": violations.is_empty(),
                    "violations": violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                })),
                _ => {
                    let mut s = format!("valid: {}\n", violations.is_empty());
                    for v in &violations {
                        let _ = writeln!(s, "violation: {v}");
                    }
                    s
                }
            };
            write_out(None, &out)?;
            if !violations.is_empty() {
                return Err(Failure::Domain(format!("{} violates type consistency", file.display())));
            }
        }
        Command::Balanced(args) => {
            let net = load(&args.file)?;
            let p = partition_of(&net, &args.partition)?;
            let verdict = is_balanced(&net, &p);
            let reason = match &verdict {
                Balance::Balanced(_) => None,
                Balance::Unbalanced(why) => Some(why.to_string()),
            };
            let out = match fmt {
                OutputFormat::JsonLines => json_line(json!({ "balanced": reason.is_none(), "reason": reason })),
                _ => match reason {
                    None => "balanced: true\n".to_string(),
                    Some(r) => format!("balanced: false\nreason: {r}\n"),
                },
            };
            write_out(None, &out)?;
        }
        Command::Partitions { file, limit } => {
            let net = load(&file)?;
            let parts = enumerate_balanced(&net, limit).map_err(domain)?;
            let mut out = String::new();
            for p in &parts {
                let shown = p.display(&net).to_string();
                match fmt {
                    OutputFormat::JsonLines => out += &json_line(json!({ "partition": shown, "colours": p.num_colours() })),
                    _ => out += &format!("{shown}\n"),
                }
            }
            write_out(None, &out)?;
        }
        Command::Quotient { part, output, map_out } => {
            let net = load(&part.file)?;
            let p = partition_of(&net, &part.partition)?;
            let q = quotient(&net, &p).map_err(domain)?;
            write_out(output.as_deref(), &format::serialize(&q.quotient))?;
            if let Some(path) = map_out {
                write_out(Some(&path), &q.phi.to_text())?;
            }
        }
        Command::Fibration { source, target, map } => {
            let n = load(&source)?;
            let n2 = load(&target)?;
            let phi = FibrationMap::parse(&read(&map)?).map_err(domain)?;
            let report = check_fibration(&n, &n2, &phi);
            let out = match fmt {
                OutputFormat::JsonLines => report
                    .conditions
                    .iter()
                    .map(|c| json_line(json!({ "condition": c.condition, "description": c.description, "failures": c.failures })))
                    .chain([json_line(json!({ "fibration": report.is_fibration() }))])
                    .collect(),
                _ => format!("{report}\n"),
            };
            write_out(None, &out)?;
        }
        Command::Augment { core, nodes, name, output } => {
            let net = load(&core)?;
            let mut spec = AugmentationSpec::new(nodes);
            spec.name = name;
            let aug = augment(&net, &spec).map_err(domain)?;
            write_out(output.as_deref(), &format::serialize(&aug))?;
        }
        Command::Verdict { part, degree_cap, seed, probes } => {
            let net = load(&part.file)?;
            let p = partition_of(&net, &part.partition)?;
            let v = robust_verdict(&net, &p, seed, degree_cap, probes).map_err(domain)?;
            let witness = v.witness.as_ref().map(|w| format!("{} on hyperedges of type {}", w.sigma, w.etype));
            let out = match fmt {
                OutputFormat::JsonLines => json_line(json!({
                    "balanced": v.balanced,
                    "probe_degree": v.probe_degree,
                    "probes": v.probes,
                    "invariant_under_probes": v.invariant_under_low_degree,
                    "witness": witness,
                })),
                _ => format!(
                    "balanced: {}\nprobe degree: {}\nprobes: {}\ninvariant under probes: {}\nwitness: {}\n",
                    v.balanced,
                    v.probe_degree,
                    v.probes,
                    v.invariant_under_low_degree,
                    witness.as_deref().unwrap_or("none"),
                ),
            };
            write_out(None, &out)?;
        }
        Command::Witness(args) => {
            let net = load(&args.file)?;
            let p = partition_of(&net, &args.partition)?;
            p.check_refines_types(&net).map_err(domain)?;
            let out = match (find_breaking_witness(&net, &p), fmt) {
                (None, OutputFormat::JsonLines) => json_line(json!({ "witness": null })),
                (None, _) => "witness: none\n".to_string(),
                (Some(w), fmt) => {
                    let (a, b) = (&net.vertex(w.first).id, &net.vertex(w.second).id);
                    let point: Vec<String> = w.point.iter().enumerate().map(|(i, z)| format!("Z{}={z}", i + 1)).collect();
                    if fmt == OutputFormat::JsonLines {
                        json_line(json!({
                            "edge_type": w.etype,
                            "sigma": w.sigma.to_string(),
                            "degree": w.degree(),
                            "response": w.response.to_string(),
                            "point": w.point,
                            "vertices": [a, b],
                            "values": [w.first_value.to_string(), w.second_value.to_string()],
                            "restricted": [w.first_restricted.to_string(), w.second_restricted.to_string()],
                        }))
                    } else {
                        format!(
                            "edge type: {}\nsigma: {}\ndegree: {}\nresponse: {}\npoint: {}\n{a}: {} = {}\n{b}: {} = {}\n",
                            w.etype,
                            w.sigma,
                            w.degree(),
                            w.response,
                            point.join(" "),
                            w.first_restricted,
                            w.first_value,
                            w.second_restricted,
                            w.second_value,
                        )
                    }
                }
            };
            write_out(None, &out)?;
        }
        Command::Simulate { file, library: lib_args, sim, lambda } => {
            let net = load(&file)?;
            let lib = library(&lib_args)?;
            let system = AdmissibleSystem::new(net, lib).map_err(domain)?;
            let cfg = sim_config(&sim, system.dim(), vec![lambda]);
            let trace = integrate(&system, lambda, &cfg).map_err(domain)?;
            let columns = hypernet::sim::state_columns(system.network());
            let mut out = String::new();
            match fmt {
                OutputFormat::JsonLines => {
                    for (t, x) in trace.times.iter().zip(&trace.states) {
                        out += &json_line(json!({ "t": t, "state": x }));
                    }
                }
                OutputFormat::Csv => {
                    out += &format!("t,{}\n", columns.join(","));
                    for (t, x) in trace.times.iter().zip(&trace.states) {
                        let row: Vec<String> = x.iter().map(|v| format!("{v:?}")).collect();
                        out += &format!("{t:?},{}\n", row.join(","));
                    }
                }
                OutputFormat::Text => {
                    out += &format!("t {}\n", columns.join(" "));
                    for (t, x) in trace.times.iter().zip(&trace.states) {
                        let row: Vec<String> = x.iter().map(|v| format!("{v:.12e}")).collect();
                        out += &format!("{t} {}\n", row.join(" "));
                    }
                }
            }
            write_out(None, &out)?;
        }
        Command::Bifurcate { file, library: lib_args, sim, lambda_min, lambda_max, lambda_steps, jobs, output } => {
            let net = load(&file)?;
            let lib = library(&lib_args)?;
            let system = AdmissibleSystem::new(net, lib).map_err(domain)?;
            let cfg = sim_config(&sim, system.dim(), linspace(lambda_min, lambda_max, lambda_steps));
            let diagram = sweep(&system, &cfg, jobs).map_err(domain)?;
            let out = match fmt {
                OutputFormat::JsonLines => diagram
                    .rows
                    .iter()
                    .map(|r| {
                        json_line(json!({
                            "lambda": r.lambda,
                            "state": r.state,
                            "residual": r.residual,
                            "converged": r.converged,
                        }))
                    })
                    .collect(),
                _ => {
                    let mut buf = Vec::new();
                    diagram.write_csv(&mut buf).map_err(domain)?;
                    String::from_utf8(buf).expect("csv writer emits utf-8")
                }
            };
            write_out(output.as_deref(), &out)?;
        }
        Command::Slope { csv, a, b, lo, hi } => {
            let text = read(&csv)?;
            let diagram = BifurcationDiagram::read_csv(text.as_bytes()).map_err(domain)?;
            let fit = loglog_slope(&diagram, &a, &b, lo, hi).map_err(domain)?;
            let out = match fmt {
                OutputFormat::JsonLines => json_line(serde_json::to_value(fit).expect("plain numbers")),
                OutputFormat::Csv => format!(
                    "slope,intercept,r_squared,points\n{},{},{},{}\n",
                    fit.slope, fit.intercept, fit.r_squared, fit.points
                ),
                OutputFormat::Text => format!(
                    "slope: {:.6}\nintercept: {:.6}\nr_squared: {:.6}\npoints: {}\n",
                    fit.slope, fit.intercept, fit.r_squared, fit.points
                ),
            };
            write_out(None, &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
