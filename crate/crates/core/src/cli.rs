//! Command-line front end. Every subcommand reads JSON, calls one library
//! operation and writes JSON.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::explorer::{classify, enumerate_pis_sing, find_path, SearchBounds};
use crate::graph::{parse_graph, MultiGraph};
use crate::k0::k0_data;
use crate::matrix::parse_matrix;
use crate::moves::{maximal_outsplit_steps, verify_certificate, MoveCertificate, MoveStep, PartitionSpec};
use crate::pipeline::{cert_divides, cert_expand, cert_fish, cert_open_tails, cert_remove_sources, cert_stabilize};
use crate::smith::smith_normal_form;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot write output: {0}")]
    Output(std::io::Error),
    #[error("malformed JSON in {what}: {source}")]
    Json { what: &'static str, source: serde_json::Error },
}

type CliResult<T> = Result<T, CliError>;

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
pub enum Format {
    /// Compact single-line JSON.
    #[default]
    Json,
    /// Indented JSON.
    Pretty,
}

#[derive(Debug, Parser)]
#[command(name = "lpaclass", version, about = "Pointed K0 data, graph moves and move certificates for Leavitt path algebras")]
pub struct Cli {
    /// Output style.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Structural properties of a graph.
    Analyze {
        graph: PathBuf,
        /// Print the graph in DOT instead of the property report.
        #[arg(long)]
        dot: bool,
    },
    /// Pointed K0 data of a graph.
    K0 { graph: PathBuf },
    /// Smith normal form of an integer matrix.
    Snf { matrix: PathBuf },
    /// Emit a named graph family member.
    Builtin {
        name: String,
        params: Vec<i64>,
    },
    /// Apply one move and emit it as a certificate.
    #[command(subcommand)]
    Move(MoveCommand),
    /// All purely infinite simple graphs without parallel edges on N vertices.
    Enumerate {
        #[arg(long)]
        vertices: usize,
    },
    /// Partition the enumerated graphs on N vertices by pointed K0.
    Classify {
        #[arg(long)]
        vertices: usize,
    },
    /// Search for a move chain between two graphs.
    FindPath {
        from: PathBuf,
        to: PathBuf,
        #[arg(long, default_value_t = SearchBounds::default().max_vertices)]
        max_vertices: usize,
        #[arg(long, default_value_t = SearchBounds::default().max_multiplicity)]
        max_mult: i64,
        #[arg(long, default_value_t = SearchBounds::default().max_steps)]
        max_steps: usize,
        /// Expand search frontiers on several threads.
        #[arg(long)]
        parallel: bool,
    },
    /// Build a certificate for one of the standard constructions.
    #[command(subcommand)]
    Certify(CertifyCommand),
    /// Replay and check a certificate; exits 1 when it is invalid.
    Verify {
        certificate: PathBuf,
        /// Accept shifts on graphs without Condition (L).
        #[arg(long)]
        allow_infinite_field: bool,
    },
}

#[derive(Debug, Args)]
pub struct VertexPair {
    graph: PathBuf,
    #[arg(long)]
    v: String,
    #[arg(long)]
    w: String,
}

#[derive(Debug, Subcommand)]
pub enum MoveCommand {
    /// Shift: v's out-edges copying w's are replaced by one edge v -> w.
    Shift(VertexPair),
    /// Inverse of shift.
    Unshift(VertexPair),
    /// Out-split one vertex by a partition given as JSON.
    Outsplit {
        graph: PathBuf,
        /// {"vertex": name, "classes": [{target: count, ...}, ...]}
        #[arg(long)]
        partition: String,
    },
    /// Merge vertices with identical incoming edges.
    Amalgamate {
        graph: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        vertices: Vec<String>,
    },
    /// Out-split every vertex into single edges.
    Maxsplit { graph: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum CertifyCommand {
    /// d-tail rose to the rose, for gcd(d, n - 1) = 1.
    Fish {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        d: i64,
    },
    Stabilize {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        k: i64,
        #[arg(long)]
        t: i64,
    },
    Divides {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        k: i64,
    },
    OpenTails {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        k: i64,
    },
    /// Grow a graph to N vertices by out-splits.
    Expand {
        graph: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Shift away all sources.
    RemoveSources { graph: PathBuf },
}

fn read_input(path: &PathBuf, stdin: &mut dyn Read) -> CliResult<String> {
    let mut text = String::new();
    let shown = path.display().to_string();
    if shown == "-" {
        stdin
            .read_to_string(&mut text)
            .map_err(|source| CliError::Io { path: shown, source })?;
    } else {
        text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: shown, source })?;
    }
    Ok(text)
}

fn read_graph(path: &PathBuf, stdin: &mut dyn Read) -> CliResult<MultiGraph> {
    Ok(parse_graph(&read_input(path, stdin)?)?)
}

fn single_move(g: MultiGraph, step: MoveStep) -> CliResult<MoveCertificate> {
    let target = step.apply(&g)?;
    Ok(MoveCertificate {
        source: g,
        steps: vec![step],
        target,
    })
}

fn emit<T: Serialize>(out: &mut dyn Write, format: Format, value: &T) -> CliResult<()> {
    let text = match format {
        Format::Json => serde_json::to_string(value),
        Format::Pretty => serde_json::to_string_pretty(value),
    }
    .expect("output types serialize");
    writeln!(out, "{text}").map_err(CliError::Output)
}

/// Runs one command; the return value is the process exit status.
fn dispatch(cli: Cli, stdin: &mut dyn Read, out: &mut dyn Write) -> CliResult<i32> {
    let f = cli.format;
    match cli.command {
        Command::Analyze { graph, dot } => {
            let g = read_graph(&graph, stdin)?;
            if dot {
                write!(out, "{}", g.to_dot()).map_err(CliError::Output)?;
            } else {
                emit(out, f, &g.analyze())?;
            }
        }
        Command::K0 { graph } => emit(out, f, &k0_data(&read_graph(&graph, stdin)?)?)?,
        Command::Snf { matrix } => emit(out, f, &smith_normal_form(&parse_matrix(&read_input(&matrix, stdin)?)?)?)?,
        Command::Builtin { name, params } => emit(out, f, &MultiGraph::builtin(&name, &params)?)?,
        Command::Move(m) => {
            let cert = match m {
                MoveCommand::Shift(p) => single_move(read_graph(&p.graph, stdin)?, MoveStep::shift(p.v, p.w))?,
                MoveCommand::Unshift(p) => single_move(read_graph(&p.graph, stdin)?, MoveStep::unshift(p.v, p.w))?,
                MoveCommand::Outsplit { graph, partition } => {
                    let spec: PartitionSpec = serde_json::from_str(&partition)
                        .map_err(|source| CliError::Json { what: "--partition", source })?;
                    single_move(read_graph(&graph, stdin)?, MoveStep::Outsplit(spec))?
                }
                MoveCommand::Amalgamate { graph, vertices } => {
                    single_move(read_graph(&graph, stdin)?, MoveStep::amalgamate(vertices))?
                }
                MoveCommand::Maxsplit { graph } => {
                    let g = read_graph(&graph, stdin)?;
                    let steps = maximal_outsplit_steps(&g)?;
                    let target = steps.iter().try_fold(g.clone(), |h, s| s.apply(&h))?;
                    MoveCertificate {
                        source: g,
                        steps,
                        target,
                    }
                }
            };
            emit(out, f, &cert)?;
        }
        Command::Enumerate { vertices } => emit(out, f, &enumerate_pis_sing(vertices)?)?,
        Command::Classify { vertices } => emit(out, f, &classify(&enumerate_pis_sing(vertices)?)?)?,
        Command::FindPath {
            from,
            to,
            max_vertices,
            max_mult,
            max_steps,
            parallel,
        } => {
            let (a, b) = (read_graph(&from, stdin)?, read_graph(&to, stdin)?);
            let bounds = SearchBounds {
                max_vertices,
                max_multiplicity: max_mult,
                max_steps,
            };
            emit(out, f, &find_path(&a, &b, &bounds, parallel)?)?;
        }
        Command::Certify(c) => {
            let cert = match c {
                CertifyCommand::Fish { n, d } => cert_fish(n, d)?,
                CertifyCommand::Stabilize { n, k, t } => cert_stabilize(n, k, t)?,
                CertifyCommand::Divides { n, k } => cert_divides(n, k)?,
                CertifyCommand::OpenTails { n, k } => cert_open_tails(n, k)?,
                CertifyCommand::Expand { graph, n } => cert_expand(&read_graph(&graph, stdin)?, n)?.1,
                CertifyCommand::RemoveSources { graph } => cert_remove_sources(&read_graph(&graph, stdin)?)?.1,
            };
            emit(out, f, &cert)?;
        }
        Command::Verify {
            certificate,
            allow_infinite_field,
        } => {
            let text = read_input(&certificate, stdin)?;
            let cert: MoveCertificate =
                serde_json::from_str(&text).map_err(|source| CliError::Json { what: "certificate", source })?;
            let report = verify_certificate(&cert, allow_infinite_field);
            emit(out, f, &report)?;
            return Ok(if report.valid { 0 } else { 1 });
        }
    }
    Ok(0)
}

/// Parses `args` (program name first) and runs the command. Returns 0 on
/// success, 1 on a domain error (reported as `{"error": ...}` on `out`) and
/// 2 on a usage error (reported on `err`).
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let format = cli.format;
    match dispatch(cli, stdin, out) {
        Ok(code) => code,
        Err(CliError::Output(e)) => {
            let _ = writeln!(err, "lpaclass: cannot write output: {e}");
            1
        }
        Err(e) => {
            let body = serde_json::json!({ "error": e.to_string() });
            let _ = emit(out, format, &body);
            1
        }
    }
}
