//! Command-line front end for the pathspace toolkit.

use std::collections::BTreeSet;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use pathspace::cylinder::{
    intersect, member, member_general, refine_to_basic, CylinderBasic, GeneralCylinder,
};
use pathspace::desing::{
    check_collapsible, check_collapsible_tail, collapse, desingularise, iso_check, IsoOutcome,
    SchedulePolicy,
};
use pathspace::diagonal::{
    corner_compress, diagram_check, pi_inverse_reduce, pi_map, q_is_nonzero, q_projection,
};
use pathspace::graph::PresentedGraph;
use pathspace::path::{boundary_paths, e_leq_n, paths_with_range, ELeqN};
use pathspace::path_maps::{
    open_image_witness, open_preimage_witness, phi, phi_inf, phi_inf_inv, phi_inv, CollapseMap,
};
use pathspace::textio;

mod verify;

#[derive(Parser)]
#[command(
    name = "pathspace",
    about = "Path spaces of directed graphs: cylinder topology, desingularisation, boundary maps and the exact diagonal",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TailsArg {
    /// Comma-separated tail ids to collapse.
    #[arg(long, value_delimiter = ',')]
    tails: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph file against every structural invariant.
    Validate { file: PathBuf },
    /// Enumerate paths of a given length with the given range vertex.
    Paths {
        file: PathBuf,
        /// Range vertex (`v` or `t[3]`).
        #[arg(long)]
        range: String,
        #[arg(long)]
        len: u64,
        #[arg(long)]
        limit: Option<usize>,
        /// List `vE^{<=n}` instead of `vE^n`.
        #[arg(long)]
        stopped: bool,
    },
    /// Enumerate boundary path representatives at a vertex.
    Boundary {
        file: PathBuf,
        #[arg(long)]
        range: String,
        #[arg(long)]
        depth: Option<u64>,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Basic open sets of the cylinder topology.
    #[command(subcommand)]
    Cyl(CylCommand),
    /// Append a tail at every singular vertex.
    Desing {
        file: PathBuf,
        /// `one` (default) or `k=N` edges per tail position.
        #[arg(long, default_value = "one")]
        policy: String,
        /// Write the resulting graph here instead of stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Also render the result as DOT.
        #[arg(long)]
        emit_dot: Option<PathBuf>,
    },
    /// Collapse the given tails.
    Collapse {
        file: PathBuf,
        #[command(flatten)]
        tails: TailsArg,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        emit_dot: Option<PathBuf>,
    },
    /// Check conditions C1–C5 for a declared tail or a path literal.
    CheckCollapsible {
        file: PathBuf,
        #[arg(long)]
        tail: Option<String>,
        /// An infinite path literal (`prefix~(cycle)` or `prefix@tail`).
        #[arg(long)]
        path: Option<String>,
    },
    /// Search for an isomorphism between two graph files.
    Iso {
        file1: PathBuf,
        file2: PathBuf,
        /// Core-size bound for the brute-force search.
        #[arg(long, default_value_t = 8)]
        bound: usize,
    },
    /// Map a finite path through the collapse correspondence.
    Phi {
        file: PathBuf,
        #[command(flatten)]
        tails: TailsArg,
        #[arg(long)]
        path: String,
    },
    /// Map a finite path of the collapsed graph back.
    PhiInv {
        file: PathBuf,
        #[command(flatten)]
        tails: TailsArg,
        #[arg(long)]
        path: String,
    },
    /// Map an infinite path to its boundary image.
    PhiInf {
        file: PathBuf,
        #[command(flatten)]
        tails: TailsArg,
        #[arg(long)]
        path: String,
        /// Invert instead: map a boundary literal of the collapsed graph
        /// back to an infinite path.
        #[arg(long)]
        invert: bool,
    },
    /// Witness that the boundary image of a basic neighbourhood is open.
    WitnessImage {
        file: PathBuf,
        #[command(flatten)]
        tails: TailsArg,
        /// Stem of the basic in the collapsed graph.
        #[arg(long)]
        stem: String,
        /// Comma-separated forbidden edges at the stem's source.
        #[arg(long, value_delimiter = ',')]
        forbid: Vec<String>,
        /// Infinite path whose image lies in the basic.
        #[arg(long)]
        point: String,
    },
    /// Witness that the boundary preimage of a stem cylinder is open.
    WitnessPreimage {
        file: PathBuf,
        #[command(flatten)]
        tails: TailsArg,
        /// Stem of the cylinder in the original graph.
        #[arg(long)]
        stem: String,
        /// Boundary path of the collapsed graph.
        #[arg(long)]
        point: String,
    },
    /// Exact arithmetic in the diagonal.
    #[command(subcommand)]
    Diag(DiagCommand),
    /// Run the whole invariant suite on a graph file.
    VerifyAll {
        file: PathBuf,
        #[arg(long)]
        depth: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Render a graph as DOT.
    EmitDot {
        file: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        tail_levels: u64,
    },
}

#[derive(Subcommand)]
enum CylCommand {
    /// Is the point inside `Z(stem \ forbidden)`?
    Member {
        file: PathBuf,
        #[arg(long)]
        point: String,
        #[arg(long)]
        stem: String,
        #[arg(long, value_delimiter = ',')]
        forbid: Vec<String>,
        /// Forbidden paths (semicolon-separated literals) instead of edges.
        #[arg(long, value_delimiter = ';')]
        forbid_paths: Vec<String>,
    },
    /// Intersect two basics.
    Intersect {
        file: PathBuf,
        #[arg(long)]
        stem1: String,
        #[arg(long, value_delimiter = ',')]
        forbid1: Vec<String>,
        #[arg(long)]
        stem2: String,
        #[arg(long, value_delimiter = ',')]
        forbid2: Vec<String>,
    },
    /// Refine a path-complement set around a point into a basic.
    Refine {
        file: PathBuf,
        #[arg(long)]
        stem: String,
        #[arg(long, value_delimiter = ';')]
        forbid_paths: Vec<String>,
        #[arg(long)]
        point: String,
    },
}

#[derive(Subcommand)]
enum DiagCommand {
    /// Multiply two elements.
    Mul {
        file: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Norm (reported as the exact squared value) and q-basis report.
    Norm {
        file: PathBuf,
        #[arg(long)]
        a: String,
    },
    /// Expand the orthogonalized projection of a stem inside a stem set.
    Q {
        file: PathBuf,
        /// Semicolon-separated path literals.
        #[arg(long, value_delimiter = ';')]
        set: Vec<String>,
        #[arg(long)]
        mu: String,
    },
    /// Evaluate an element at a boundary path.
    Eval {
        file: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        a: String,
    },
    /// Map an element of the collapsed graph's diagonal into the corner.
    Pi {
        file: PathBuf,
        #[command(flatten)]
        tails: TailsArg,
        /// Element over the collapsed graph.
        #[arg(long)]
        a: Option<String>,
        /// Instead, reduce the compression of this original-graph path into
        /// the image of the collapsed diagonal.
        #[arg(long)]
        reduce: Option<String>,
    },
    /// Compress a projection by the sum of surviving vertex projections.
    Compress {
        file: PathBuf,
        #[command(flatten)]
        tails: TailsArg,
        #[arg(long)]
        mu: String,
    },
    /// Check the intertwining identity at a point and a stem.
    Diagram {
        file: PathBuf,
        #[command(flatten)]
        tails: TailsArg,
        #[arg(long)]
        x: String,
        #[arg(long)]
        mu: String,
    },
}

fn default_depth(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("PATHSPACE_DEPTH")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(6)
}

fn load_graph(path: &FsPath) -> Result<PresentedGraph> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    textio::parse_graph(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn parse_policy(text: &str) -> Result<SchedulePolicy> {
    if text == "one" {
        return Ok(SchedulePolicy::default());
    }
    if let Some(k) = text.strip_prefix("k=") {
        let k: u64 = k.parse().context("bad policy: expected k=<number>")?;
        return Ok(SchedulePolicy::PerPosition(k));
    }
    Err(anyhow!("unknown policy `{text}`; expected `one` or `k=N`"))
}

fn collapse_map(g: &PresentedGraph, tails: &TailsArg) -> Result<CollapseMap> {
    let set: BTreeSet<String> = tails.tails.iter().cloned().collect();
    if set.is_empty() {
        return Err(anyhow!("no tails given; pass --tails t1,t2"));
    }
    Ok(collapse(g, &set).map_err(|e| anyhow!("{e}"))?.map)
}

fn basic_in(g: &PresentedGraph, stem: &str, forbid: &[String]) -> Result<CylinderBasic> {
    let stem = textio::parse_path(g, stem)?;
    let mut forbidden = BTreeSet::new();
    for f in forbid {
        if f.trim().is_empty() {
            continue;
        }
        let p = textio::parse_path(g, f)?;
        let [e] = p.edges() else {
            return Err(anyhow!("forbidden entries must be single edges, got `{f}`"));
        };
        forbidden.insert(e.clone());
    }
    Ok(CylinderBasic::new(g, stem, forbidden)?)
}

fn general_in(g: &PresentedGraph, stem: &str, forbid_paths: &[String]) -> Result<GeneralCylinder> {
    let stem = textio::parse_path(g, stem)?;
    let mut forbidden = BTreeSet::new();
    for f in forbid_paths {
        if !f.trim().is_empty() {
            forbidden.insert(textio::parse_path(g, f)?);
        }
    }
    Ok(GeneralCylinder::new(g, stem, forbidden)?)
}

/// Exit status semantics: 0 = success / verified, 1 = verification
/// negative, 2 = usage or input error (also used by clap itself).
fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Validate { file } => {
            let text = std::fs::read_to_string(&file)
                .with_context(|| format!("cannot read {}", file.display()))?;
            let g = textio::parse_graph_unchecked(&text)?;
            let report = g.validate();
            if report.is_valid() {
                println!("valid");
                Ok(true)
            } else {
                for issue in &report.issues {
                    println!("invalid: {issue}");
                }
                Ok(false)
            }
        }
        Command::Paths {
            file,
            range,
            len,
            limit,
            stopped,
        } => {
            let g = load_graph(&file)?;
            let v = textio::parse_vertex(&g, &range)?;
            if stopped {
                match e_leq_n(&g, &v, len)? {
                    ELeqN::Infinite => println!("infinite"),
                    ELeqN::Finite(items) => {
                        for p in items {
                            println!("{p}");
                        }
                    }
                }
            } else {
                let out = paths_with_range(&g, &v, len, limit.unwrap_or(64))?;
                for p in &out.items {
                    println!("{p}");
                }
                if out.truncated {
                    println!("(truncated)");
                }
            }
            Ok(true)
        }
        Command::Boundary {
            file,
            range,
            depth,
            limit,
        } => {
            let g = load_graph(&file)?;
            let v = textio::parse_vertex(&g, &range)?;
            let out = boundary_paths(&g, &v, default_depth(depth), limit.unwrap_or(64))?;
            for p in &out.items {
                println!("{p}");
            }
            if out.truncated {
                println!("(truncated)");
            }
            Ok(true)
        }
        Command::Cyl(cmd) => run_cyl(cmd),
        Command::Desing {
            file,
            policy,
            out,
            emit_dot,
        } => {
            let g = load_graph(&file)?;
            let policy = parse_policy(&policy)?;
            let result = desingularise(&g, &policy)?;
            let mut text = textio::print_graph(&result.graph);
            text.push_str(&format!(
                "# appended tails: {}\n",
                result
                    .added_tails
                    .iter()
                    .cloned()
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
            write_or_print(&out, &text)?;
            if let Some(dot) = emit_dot {
                std::fs::write(&dot, textio::to_dot(&result.graph, 3))?;
            }
            Ok(true)
        }
        Command::Collapse {
            file,
            tails,
            out,
            emit_dot,
        } => {
            let g = load_graph(&file)?;
            let set: BTreeSet<String> = tails.tails.iter().cloned().collect();
            let result = collapse(&g, &set)?;
            write_or_print(&out, &textio::print_graph(&result.collapsed))?;
            if let Some(dot) = emit_dot {
                std::fs::write(&dot, textio::to_dot(&result.collapsed, 3))?;
            }
            Ok(true)
        }
        Command::CheckCollapsible { file, tail, path } => {
            let g = load_graph(&file)?;
            let report = match (tail, path) {
                (Some(t), None) => check_collapsible_tail(&g, &t)?,
                (None, Some(p)) => {
                    let spec = textio::parse_spec(&g, &p)?;
                    check_collapsible(&g, &spec)?
                }
                _ => return Err(anyhow!("pass exactly one of --tail or --path")),
            };
            print!("{report}");
            Ok(report.all_pass())
        }
        Command::Iso {
            file1,
            file2,
            bound,
        } => {
            let g1 = load_graph(&file1)?;
            let g2 = load_graph(&file2)?;
            match iso_check(&g1, &g2, bound) {
                IsoOutcome::Isomorphic(iso) => {
                    println!("isomorphic");
                    for (a, b) in &iso.vertex_map {
                        println!("  {a} -> {b}");
                    }
                    for (a, b) in &iso.tail_map {
                        println!("  tail {a} -> {b}");
                    }
                    Ok(true)
                }
                IsoOutcome::NotIsomorphic => {
                    println!("not isomorphic");
                    Ok(false)
                }
                IsoOutcome::BoundExceeded { core_size, bound } => {
                    println!("undecided: core size {core_size} exceeds bound {bound}");
                    Ok(false)
                }
            }
        }
        Command::Phi { file, tails, path } => {
            let g = load_graph(&file)?;
            let m = collapse_map(&g, &tails)?;
            let p = textio::parse_path(m.original(), &path)?;
            println!("{}", phi(&m, &p)?);
            Ok(true)
        }
        Command::PhiInv { file, tails, path } => {
            let g = load_graph(&file)?;
            let m = collapse_map(&g, &tails)?;
            let p = textio::parse_path(m.collapsed(), &path)?;
            println!("{}", phi_inv(&m, &p)?);
            Ok(true)
        }
        Command::PhiInf {
            file,
            tails,
            path,
            invert,
        } => {
            let g = load_graph(&file)?;
            let m = collapse_map(&g, &tails)?;
            if invert {
                let x = textio::parse_boundary(m.collapsed(), &path)?;
                println!("{}", phi_inf_inv(&m, &x)?);
            } else {
                let spec = textio::parse_spec(m.original(), &path)?;
                println!("{}", phi_inf(&m, &spec)?);
            }
            Ok(true)
        }
        Command::WitnessImage {
            file,
            tails,
            stem,
            forbid,
            point,
        } => {
            let g = load_graph(&file)?;
            let m = collapse_map(&g, &tails)?;
            let z = basic_in(m.collapsed(), &stem, &forbid)?;
            let lam = textio::parse_spec(m.original(), &point)?;
            println!("{}", open_image_witness(&m, &z, &lam)?);
            Ok(true)
        }
        Command::WitnessPreimage {
            file,
            tails,
            stem,
            point,
        } => {
            let g = load_graph(&file)?;
            let m = collapse_map(&g, &tails)?;
            let gamma = textio::parse_path(m.original(), &stem)?;
            let x = textio::parse_boundary(m.collapsed(), &point)?;
            println!("{}", open_preimage_witness(&m, &gamma, &x)?);
            Ok(true)
        }
        Command::Diag(cmd) => run_diag(cmd),
        Command::VerifyAll { file, depth, seed } => {
            let g = load_graph(&file)?;
            verify::verify_all(&g, default_depth(depth), seed)
        }
        Command::EmitDot {
            file,
            out,
            tail_levels,
        } => {
            let g = load_graph(&file)?;
            write_or_print(&out, &textio::to_dot(&g, tail_levels))?;
            Ok(true)
        }
    }
}

fn run_cyl(cmd: CylCommand) -> Result<bool> {
    match cmd {
        CylCommand::Member {
            file,
            point,
            stem,
            forbid,
            forbid_paths,
        } => {
            let g = load_graph(&file)?;
            let w = textio::parse_point(&g, &point)?;
            let inside = if forbid_paths.iter().all(|f| f.trim().is_empty()) {
                member(&w, &basic_in(&g, &stem, &forbid)?)
            } else {
                if !forbid.is_empty() {
                    return Err(anyhow!("--forbid and --forbid-paths are exclusive"));
                }
                member_general(&w, &general_in(&g, &stem, &forbid_paths)?)
            };
            println!("{inside}");
            Ok(true)
        }
        CylCommand::Intersect {
            file,
            stem1,
            forbid1,
            stem2,
            forbid2,
        } => {
            let g = load_graph(&file)?;
            let z1 = basic_in(&g, &stem1, &forbid1)?;
            let z2 = basic_in(&g, &stem2, &forbid2)?;
            match intersect(&z1, &z2) {
                Some(z) => println!("{z}"),
                None => println!("empty"),
            }
            Ok(true)
        }
        CylCommand::Refine {
            file,
            stem,
            forbid_paths,
            point,
        } => {
            let g = load_graph(&file)?;
            let z = general_in(&g, &stem, &forbid_paths)?;
            let lam = textio::parse_point(&g, &point)?;
            println!("{}", refine_to_basic(&g, &z, &lam)?);
            Ok(true)
        }
    }
}

fn run_diag(cmd: DiagCommand) -> Result<bool> {
    match cmd {
        DiagCommand::Mul { file, a, b } => {
            let g = Arc::new(load_graph(&file)?);
            let a = textio::parse_element(&g, &a)?;
            let b = textio::parse_element(&g, &b)?;
            println!("{}", a.multiply(&b)?);
            Ok(true)
        }
        DiagCommand::Norm { file, a } => {
            let g = Arc::new(load_graph(&file)?);
            let a = textio::parse_element(&g, &a)?;
            println!("norm^2 = {}", a.norm_squared()?);
            println!("q-basis report:");
            for (stem, coeff) in pathspace::diagonal::q_decompose(&a)? {
                let alive = q_is_nonzero(&g, &a.support(), &stem)?;
                println!(
                    "  q[{stem}]: coefficient {coeff}, {}",
                    if alive { "nonvanishing" } else { "vanishing" }
                );
            }
            Ok(true)
        }
        DiagCommand::Q { file, set, mu } => {
            let g = Arc::new(load_graph(&file)?);
            let fset: Vec<_> = set
                .iter()
                .filter(|t| !t.trim().is_empty())
                .map(|t| textio::parse_path(&g, t))
                .collect::<pathspace::Result<_>>()?;
            let mu = textio::parse_path(&g, &mu)?;
            let q = q_projection(&g, &fset, &mu)?;
            println!("{q}");
            println!(
                "{}",
                if q_is_nonzero(&g, &fset, &mu)? {
                    "nonvanishing"
                } else {
                    "vanishing"
                }
            );
            Ok(true)
        }
        DiagCommand::Eval { file, x, a } => {
            let g = Arc::new(load_graph(&file)?);
            let x = textio::parse_boundary(&g, &x)?;
            let a = textio::parse_element(&g, &a)?;
            println!("{}", a.eval(&x)?);
            Ok(true)
        }
        DiagCommand::Pi {
            file,
            tails,
            a,
            reduce,
        } => {
            let g = load_graph(&file)?;
            let m = collapse_map(&g, &tails)?;
            let f_arc = Arc::new(m.original().clone());
            let e_arc = Arc::new(m.collapsed().clone());
            match (a, reduce) {
                (Some(a), None) => {
                    let a = textio::parse_element(&e_arc, &a)?;
                    println!("{}", pi_map(&m, &f_arc, &a)?);
                    Ok(true)
                }
                (None, Some(mu)) => {
                    let mu = textio::parse_path(m.original(), &mu)?;
                    println!("{}", pi_inverse_reduce(&m, &e_arc, &mu)?);
                    Ok(true)
                }
                _ => Err(anyhow!("pass exactly one of --a or --reduce")),
            }
        }
        DiagCommand::Compress { file, tails, mu } => {
            let g = load_graph(&file)?;
            let m = collapse_map(&g, &tails)?;
            let f_arc = Arc::new(m.original().clone());
            let mu = textio::parse_path(m.original(), &mu)?;
            println!("{}", corner_compress(&m, &f_arc, &mu)?);
            Ok(true)
        }
        DiagCommand::Diagram { file, tails, x, mu } => {
            let g = load_graph(&file)?;
            let m = collapse_map(&g, &tails)?;
            let f_arc = Arc::new(m.original().clone());
            let e_arc = Arc::new(m.collapsed().clone());
            let x = textio::parse_spec(m.original(), &x)?;
            let mu = textio::parse_path(m.collapsed(), &mu)?;
            let ok = diagram_check(&m, &f_arc, &e_arc, &x, &mu)?;
            println!("{}", if ok { "commutes" } else { "MISMATCH" });
            Ok(ok)
        }
    }
}
