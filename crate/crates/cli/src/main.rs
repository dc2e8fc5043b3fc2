use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mckay_core::bratteli::{classify_edges, multiplicities, to_dot as bratteli_dot};
use mckay_core::diagrams::{enumerate_diagrams, DiagramFamily, DiagramJson, TwoRowDiagram};
use mckay_core::groups::{Family, SubgroupSpec};
use mckay_core::matrix_units::{cyclic_blocks, dihedral_matrix_unit_basis, dinfty_matrix_units, planar_rook_units, MatrixBlock};
use mckay_core::repgraph::build_graph;
use mckay_core::tensor_endo::{SignTuple, COMMUTANT_GUARD_EXCEPTIONAL, COMMUTANT_GUARD_MONOMIAL};
use mckay_core::tl_idem::{branch_idempotent_chain, verify_chain};
use mckay_core::verify::{golden_compare, module_routes, run_case, run_grid, CheckMask, GridCase, VerificationGrid, VerificationReport};
use mckay_core::Error;

#[derive(Parser, Debug)]
#[command(name = "mckay", version, about = "Centralizer algebras of tensor powers for subgroups of SU(2)")]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Config {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Shorthand for --format json.
    #[arg(long, global = true)]
    json: bool,
    /// Truncation depth for Cinf and Dinf (defaults to k, or 6 for `graph`).
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Largest k handed to the exact commutant solver.
    #[arg(long, env = "MCKAY_SOLVER_GUARD", global = true)]
    solver_guard: Option<usize>,
    /// Seed for randomized spot checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Representation graph of the group.
    Graph {
        group: String,
        #[arg(long)]
        dot: bool,
    },
    /// Bratteli diagram levels 0..=K with the new edges highlighted.
    Bratteli {
        group: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        dot: bool,
    },
    /// dim Z_k(G) from the closed formula and walk count, or from every oracle.
    Dim {
        group: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        all_oracles: bool,
    },
    /// Matrix-unit basis or diagram basis of Z_k(G).
    Basis {
        group: String,
        #[arg(long)]
        k: usize,
        #[arg(long, conflicts_with = "diagrams")]
        matrix_units: bool,
        #[arg(long)]
        diagrams: bool,
    },
    /// Dimensions of the irreducible Z_k(G)-modules.
    Modules {
        group: String,
        #[arg(long)]
        k: usize,
    },
    /// Branch idempotent chain with traces and its exact checks.
    Idempotents {
        group: String,
        #[arg(long)]
        k: usize,
    },
    /// Run the verification grid (the default grid unless a grid file is given).
    Verify {
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Compare against a golden report and fail on any difference.
        #[arg(long)]
        golden: Option<PathBuf>,
        /// Write the JSON report here (overrides the grid's report path).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Multiply two diagrams given as a JSON array or {"left", "right"} object.
    Diagmul { file: PathBuf },
}

impl Config {
    fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else {
            self.format
        }
    }
}

fn parse_group(s: &str) -> anyhow::Result<SubgroupSpec> {
    Ok(SubgroupSpec::parse(s)?)
}

fn check_k(k: usize) -> anyhow::Result<()> {
    if k == 0 {
        return Err(Error::Domain("--k must be at least 1".into()).into());
    }
    Ok(())
}

fn depth_for(spec: &SubgroupSpec, cfg: &Config, k: usize) -> Option<usize> {
    if spec.is_finite() {
        None
    } else {
        Some(cfg.depth.unwrap_or(k).max(k))
    }
}

fn print_json(v: &impl serde::Serialize) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn signs(t: &SignTuple) -> String {
    t.0.iter().map(|&x| if x > 0 { '+' } else { '-' }).collect()
}

/// Runs the command; `Ok(false)` means a requested check failed.
fn run(cli: Cli) -> anyhow::Result<bool> {
    let cfg = &cli.config;
    let fmt = cfg.format();
    match &cli.command {
        Command::Graph { group, dot } => {
            let spec = parse_group(group)?;
            let depth = if spec.is_finite() { None } else { Some(cfg.depth.unwrap_or(6)) };
            let g = build_graph(&spec, depth)?;
            match (fmt, *dot) {
                (Format::Dot, _) | (_, true) => print!("{}", g.to_dot()),
                (Format::Json, _) => print_json(&g.to_json())?,
                (Format::Text, _) => {
                    let j = g.to_json();
                    println!("{}: {} nodes", j.group, j.nodes.len());
                    for n in &j.nodes {
                        println!("  {} (dim {})", n.label, n.dim);
                    }
                    for (a, b, m) in &j.edges {
                        println!("  {a} -- {b}{}", if *m > 1 { format!(" x{m}") } else { String::new() });
                    }
                    println!("branch node: {}", j.branch_node.unwrap_or_else(|| "none".into()));
                    println!("diameter: {}", j.diameter.map_or("infinite".to_string(), |d| d.to_string()));
                }
            }
            Ok(true)
        }
        Command::Bratteli { group, k, dot } => {
            let spec = parse_group(group)?;
            let g = build_graph(&spec, depth_for(&spec, cfg, *k))?;
            if *dot || fmt == Format::Dot {
                print!("{}", bratteli_dot(&g, *k)?);
                return Ok(true);
            }
            let table = multiplicities(&g, *k)?;
            let edges = classify_edges(&g, *k)?;
            match fmt {
                Format::Json => {
                    let levels: Vec<_> = (0..=*k).map(|j| table.to_json(j)).collect();
                    print_json(&json!({ "levels": levels, "edges": edges }))?;
                }
                _ => {
                    for j in 0..=*k {
                        let row: Vec<String> = table.level_map(j).iter().map(|(l, m)| format!("{l}:{m}")).collect();
                        println!("level {j}: {}  (dim {})", row.join(" "), table.sum_of_squares(j));
                    }
                    for level in &edges {
                        for e in &level.new {
                            println!("new edge {}:{} -> {}:{}", level.k, e.from, level.k + 1, e.to);
                        }
                    }
                }
            }
            Ok(true)
        }
        Command::Dim { group, k, all_oracles } => {
            check_k(*k)?;
            let spec = parse_group(group)?;
            let mut checks = CheckMask { formula: true, walks: true, ..Default::default() };
            let mut grid = VerificationGrid { cases: vec![], ..VerificationGrid::default_grid() };
            if *all_oracles {
                checks = CheckMask { commutant: spec.is_finite(), basis: true, diagrams: true, ..checks };
                let exceptional = matches!(
                    spec.family,
                    Family::BinaryTetrahedral | Family::BinaryOctahedral | Family::BinaryIcosahedral
                );
                let limit = cfg.solver_guard.unwrap_or(if exceptional { COMMUTANT_GUARD_EXCEPTIONAL } else { COMMUTANT_GUARD_MONOMIAL });
                if spec.is_finite() && *k > limit {
                    return Err(Error::GuardExceeded { what: format!("commutant of {spec}"), k: *k, limit }.into());
                }
                grid.solver_guard = limit;
                grid.exceptional_solver_guard = limit;
            }
            if let Some(s) = cfg.seed {
                grid.seed = s;
            }
            let case = GridCase { group: spec.to_string(), k: *k, checks };
            let report = run_case(&grid, &case)?;
            match fmt {
                Format::Json => print_json(&report)?,
                _ => {
                    for (oracle, v) in &report.dims {
                        println!("{oracle}: {v}");
                    }
                    for (oracle, why) in &report.skipped {
                        println!("{oracle}: skipped ({why})");
                    }
                    for e in &report.errors {
                        println!("error: {e}");
                    }
                    println!("agree: {}", if report.pass { "yes" } else { "NO" });
                }
            }
            Ok(report.pass)
        }
        Command::Basis { group, k, diagrams, .. } => {
            check_k(*k)?;
            let spec = parse_group(group)?;
            if *diagrams {
                let (family, n) = match spec.family {
                    Family::Cyclic(n) => (DiagramFamily::Cyclic, n),
                    Family::BinaryDihedral(n) => (DiagramFamily::Dihedral, n),
                    _ => return Err(Error::Unsupported { family: spec.to_string(), what: "two-row diagrams".into() }.into()),
                };
                let all = enumerate_diagrams(family, n, *k)?;
                match fmt {
                    Format::Json => print_json(&all.iter().map(TwoRowDiagram::to_json).collect::<Vec<_>>())?,
                    _ => {
                        println!("{} diagrams", all.len());
                        for d in &all {
                            println!("{}", d.render_ascii());
                        }
                    }
                }
                return Ok(true);
            }
            let blocks: Vec<MatrixBlock> = match spec.family {
                Family::Cyclic(n) => cyclic_blocks(n, *k)?,
                Family::BinaryDihedral(n) => dihedral_matrix_unit_basis(n, *k)?,
                Family::BinaryDihedralInfinite => dinfty_matrix_units(*k)?,
                Family::CyclicInfinite => {
                    let units = planar_rook_units(*k)?;
                    match fmt {
                        Format::Json => print_json(&units)?,
                        _ => {
                            println!("{} units", units.len());
                            for u in &units {
                                println!("{} | {}", signs(&u.row), signs(&u.col));
                            }
                        }
                    }
                    return Ok(true);
                }
                _ => {
                    return Err(Error::Unsupported { family: spec.to_string(), what: "explicit matrix-unit basis".into() }.into())
                }
            };
            match fmt {
                Format::Json => print_json(&blocks)?,
                _ => {
                    let total: usize = blocks.iter().map(|b| b.size * b.size).sum();
                    println!("{total} matrix units in {} blocks", blocks.len());
                    for b in &blocks {
                        println!("block {} (size {})", b.node, b.size);
                        for u in &b.units {
                            println!("  {} | {}", signs(&u.row), signs(&u.col));
                        }
                    }
                }
            }
            Ok(true)
        }
        Command::Modules { group, k } => {
            check_k(*k)?;
            let spec = parse_group(group)?;
            let (walks, other) = module_routes(&spec, *k)?;
            let agree = other.as_ref().is_none_or(|o| *o == walks);
            match fmt {
                Format::Json => {
                    let dims: BTreeMap<String, String> = walks.iter().map(|(l, v)| (l.clone(), v.to_string())).collect();
                    print_json(&json!({ "group": spec.to_string(), "k": k, "modules": dims, "routes_agree": agree }))?;
                }
                _ => {
                    for (l, v) in &walks {
                        println!("{l}: {v}");
                    }
                    if other.is_some() {
                        println!("routes agree: {}", if agree { "yes" } else { "NO" });
                    }
                }
            }
            Ok(agree)
        }
        Command::Idempotents { group, k } => {
            let spec = parse_group(group)?;
            let chain = branch_idempotent_chain(&spec, *k)?;
            let report = verify_chain(&chain)?;
            let rows: Vec<_> = chain
                .entries
                .iter()
                .map(|e| {
                    json!({
                        "label": e.label,
                        "node": e.node,
                        "level": e.level,
                        "dim": e.dim,
                        "parent": e.parent,
                        "construction": e.construction,
                        "trace": e.f.trace().to_string(),
                    })
                })
                .collect();
            match fmt {
                Format::Json => print_json(&json!({
                    "group": spec.to_string(),
                    "branch": chain.branch,
                    "diameter": chain.diameter,
                    "entries": rows,
                    "checks": report.checks.len(),
                    "failures": report.failures().iter().map(|c| c.id.clone()).collect::<Vec<_>>(),
                    "pass": report.all_pass(),
                }))?,
                _ => {
                    println!("branch node {}, diameter {}", chain.branch, chain.diameter);
                    for e in &chain.entries {
                        println!(
                            "f[{}] node {} level {} trace {} via {:?}{}",
                            e.label,
                            e.node,
                            e.level,
                            e.f.trace(),
                            e.construction,
                            e.parent.as_ref().map(|p| format!(" from {p}")).unwrap_or_default()
                        );
                    }
                    for c in report.failures() {
                        println!("FAILED {}", c.id);
                    }
                    println!("{} checks, {}", report.checks.len(), if report.all_pass() { "all pass" } else { "FAIL" });
                }
            }
            Ok(report.all_pass())
        }
        Command::Verify { grid, golden, out } => {
            let mut g = match grid {
                Some(path) => {
                    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    VerificationGrid::from_json(&text)?
                }
                None => VerificationGrid::default_grid(),
            };
            if let Some(s) = cfg.seed {
                g.seed = s;
            }
            if let Some(guard) = cfg.solver_guard {
                g.solver_guard = guard;
                g.exceptional_solver_guard = guard;
            }
            let report = run_grid(&g)?;
            let target = out.clone().or_else(|| g.report_path.as_ref().map(PathBuf::from));
            if let Some(path) = target {
                std::fs::write(&path, report.to_json_pretty()).with_context(|| format!("writing {}", path.display()))?;
            }
            match fmt {
                Format::Json => println!("{}", report.to_json_pretty()),
                _ => print!("{}", report.render_table()),
            }
            let mut ok = report.pass;
            if let Some(path) = golden {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let diff = golden_compare(&report, &VerificationReport::from_json(&text)?);
                if fmt == Format::Json {
                    print_json(&diff)?;
                } else {
                    println!("golden diff: {} entries", diff.len());
                    for d in &diff {
                        println!("  {:?} {} k={} {} expected {:?} actual {:?}", d.kind, d.group, d.k, d.field, d.expected, d.actual);
                    }
                }
                ok &= diff.is_empty();
            }
            Ok(ok)
        }
        Command::Diagmul { file } => {
            let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
            let value: serde_json::Value = serde_json::from_str(&text).context("diagram file is not JSON")?;
            let (left, right) = match &value {
                serde_json::Value::Array(items) if items.len() == 2 => (items[0].clone(), items[1].clone()),
                serde_json::Value::Object(map) if map.contains_key("left") && map.contains_key("right") => {
                    (map["left"].clone(), map["right"].clone())
                }
                _ => bail!("expected a JSON array of two diagrams or an object with \"left\" and \"right\""),
            };
            let parse = |v: serde_json::Value| -> anyhow::Result<TwoRowDiagram> {
                let j: DiagramJson = serde_json::from_value(v).map_err(|e| anyhow!(Error::Parse(e.to_string())))?;
                Ok(TwoRowDiagram::from_json(&j)?)
            };
            let (a, b) = (parse(left)?, parse(right)?);
            let product = a.multiply(&b)?;
            match (fmt, product) {
                (Format::Json, p) => print_json(&json!({ "product": p.map(|d| d.to_json()) }))?,
                (_, Some(d)) => print!("{}", d.render_ascii()),
                (_, None) => println!("zero"),
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::GuardExceeded { .. }) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
