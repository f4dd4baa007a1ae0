use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use leveltree::blowup::{blowup_data, is_stable, psi2_level_tree, yk_pullback, BlowupSchedule, TraverseSection};
use leveltree::chart::{ChartFrame, TwistedChart};
use leveltree::contraction::contract;
use leveltree::enumerate::{gen_instances, gen_weighted_trees, EnumSpec};
use leveltree::io::{level_tree_dot, weighted_tree_dot, TreeFile};
use leveltree::level::{ascent_sequence, default_special, is_equivalent, parse_level, LevelTree, Special};
use leveltree::monomial::Mark;
use leveltree::suite::{default_max_edges, run_enumerated, run_on, Suite};
use leveltree::tree::RootedTree;
use leveltree::Error;

#[derive(Parser)]
#[command(name = "leveltree", version, about = "Weighted level trees, contractions, twisted charts and blowup bookkeeping")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check that a tree file describes a weighted (level) tree.
    Validate {
        file: PathBuf,
        /// Print the tree as DOT instead of the summary.
        #[arg(long)]
        dot: bool,
    },
    /// Print m, the hat edges with their levels, the index set and the cross sections.
    Indices { file: PathBuf },
    /// Contract along the given levels of 𝕀₊ and edges of 𝕀ₘ ⊔ 𝕀₋.
    Contract {
        file: PathBuf,
        /// Comma separated levels, e.g. `-1,-3/2`.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        levels: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        edges: Vec<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Print θ and the μ tables on every stratum.
    Chart {
        file: PathBuf,
        /// Special vertices, e.g. `-1=b,-2=a`; the default takes the smallest name per level.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        special: Vec<String>,
        /// Extra parameter tags.
        #[arg(long, value_delimiter = ',')]
        tags: Vec<String>,
    },
    /// Run a verification suite on one tree, or on every enumerated instance.
    Verify {
        file: Option<PathBuf>,
        #[arg(long, default_value = "all")]
        suite: String,
        /// Print the machine readable report instead of the summary.
        #[arg(long)]
        json: bool,
        /// Include wall time in the JSON report.
        #[arg(long)]
        time: bool,
        /// Enumeration bound; defaults to LEVELTREE_MAX_EDGES or 5.
        #[arg(long)]
        max_edges: Option<usize>,
        #[arg(long, default_value_t = 2)]
        max_weight: u32,
    },
    /// Print the traverse sections of γ̄, the blowup schedule, the Y_k pullbacks and ψ₂.
    BlowupReport { file: PathBuf },
    /// Emit enumerated instances as JSON lines.
    Enumerate {
        #[arg(long)]
        max_edges: Option<usize>,
        #[arg(long, default_value_t = 2)]
        max_weight: u32,
        /// Weighted trees only, without level maps.
        #[arg(long)]
        weighted: bool,
        #[arg(long)]
        count_only: bool,
    },
}

enum Failure {
    Usage(String),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Out = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> std::result::Result<TreeFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    TreeFile::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_levels(path: &Path) -> std::result::Result<LevelTree, Failure> {
    Ok(read(path)?.level_tree()?)
}

fn names(tree: &RootedTree, edges: impl IntoIterator<Item = usize>) -> String {
    edges.into_iter().map(|e| tree.name(e)).collect::<Vec<_>>().join(" ")
}

fn section(tree: &RootedTree, s: &TraverseSection) -> String {
    format!("{{{}}}", names(tree, s.iter().copied()))
}

fn run(cmd: Cmd) -> Out {
    match cmd {
        Cmd::Validate { file, dot } => validate(&file, dot),
        Cmd::Indices { file } => indices(&read_levels(&file)?),
        Cmd::Contract { file, levels, edges, format } => {
            let t = read_levels(&file)?;
            let part = t.level_data()?.index_partition();
            let levels = levels.iter().map(|s| parse_level(s)).collect::<leveltree::Result<Vec<_>>>()?;
            let edges: Vec<&str> = edges.iter().map(String::as_str).collect();
            let sub = part.subset_from(t.tree(), &levels, &edges)?;
            let res = contract(&t, &sub)?;
            match format {
                Format::Json => println!("{}", TreeFile::from_level_tree(&res.tree).to_json()),
                Format::Dot => print!("{}", level_tree_dot(&res.tree)),
            }
            Ok(())
        }
        Cmd::Chart { file, special, tags } => {
            let t = read_levels(&file)?;
            let frame = if special.is_empty() {
                ChartFrame::with_default_special(t, tags)?
            } else {
                let sp = parse_special(&t, &special)?;
                ChartFrame::new(t, sp, tags, Mark::Plain)?
            };
            print!("{}", frame.report()?);
            Ok(())
        }
        Cmd::Verify { file, suite, json, time, max_edges, max_weight } => {
            let suite: Suite = suite.parse()?;
            let report = match file {
                Some(f) => run_on(&[read_levels(&f)?], suite),
                None => {
                    let e = match max_edges {
                        Some(e) => e,
                        None => default_max_edges()?,
                    };
                    run_enumerated(&EnumSpec::new(e, max_weight), suite)?
                }
            };
            if json {
                println!("{}", report.to_json(time));
            } else {
                print!("{}", report.summary());
                if time {
                    println!("elapsed {:.3} s", report.elapsed.as_secs_f64());
                }
            }
            if report.ok() {
                Ok(())
            } else {
                Err(Failure::Verify)
            }
        }
        Cmd::BlowupReport { file } => blowup_report(&read_levels(&file)?),
        Cmd::Enumerate { max_edges, max_weight, weighted, count_only } => {
            let e = match max_edges {
                Some(e) => e,
                None => default_max_edges()?,
            };
            let spec = EnumSpec::new(e, max_weight);
            let trees = gen_weighted_trees(&spec);
            if weighted {
                if count_only {
                    println!("trees {}", trees.len());
                } else {
                    for t in &trees {
                        println!("{}", TreeFile::from_weighted(t).to_json_line());
                    }
                }
                return Ok(());
            }
            let instances = gen_instances(&spec)?;
            if count_only {
                println!("trees {}", trees.len());
                println!("instances {}", instances.len());
                let subsets: u64 = instances
                    .iter()
                    .map(|t| t.level_data().map(|ld| 1u64 << ld.index_partition().len()))
                    .sum::<leveltree::Result<u64>>()?;
                println!("subsets {subsets}");
            } else {
                for t in &instances {
                    println!("{}", TreeFile::from_level_tree(t).to_json_line());
                }
            }
            Ok(())
        }
    }
}

fn validate(file: &Path, dot: bool) -> Out {
    let f = read(file)?;
    let w = f.weighted()?;
    if dot {
        match &f.levels {
            Some(_) => print!("{}", level_tree_dot(&f.level_tree()?)),
            None => print!("{}", weighted_tree_dot(&w)),
        }
        return Ok(());
    }
    let tree = &w.tree;
    println!("vertices {}", tree.len());
    println!("edges {}", tree.edge_count());
    println!("total weight {}", w.total_weight());
    if f.levels.is_some() {
        let t = f.level_tree()?;
        let ld = t.level_data()?;
        println!("levels {}", t.occupied_levels().iter().rev().map(|l| l.to_string()).collect::<Vec<_>>().join(" "));
        println!("m {}", ld.m);
        println!("valid weighted level tree");
    } else {
        println!("valid weighted tree");
    }
    Ok(())
}

fn indices(t: &LevelTree) -> Out {
    let ld = t.level_data()?;
    let tree = t.tree();
    let part = ld.index_partition();
    println!("m = {}", ld.m);
    println!("hat edges (e, ℓ(e), ℓ(v⁺)):");
    for e in ld.hat_edges() {
        println!("  {}  {}  {}", tree.name(e), ld.el(e), ld.upper_level(e));
    }
    let plus: Vec<String> = part.plus.iter().map(|l| l.to_string()).collect();
    println!("𝕀₊ = {{{}}}", plus.join(", "));
    println!("𝕀ₘ = {{{}}}", names(tree, part.m_edges.iter().copied()).replace(' ', ", "));
    println!("𝕀₋ = {{{}}}", names(tree, part.minus.iter().copied()).replace(' ', ", "));
    if part.plus.is_empty() {
        return Ok(());
    }
    let special = default_special(t, &ld);
    println!("cross sections (i, i♯, 𝔈ᵢ, ascent with default special vertices):");
    for i in &part.plus {
        let ascent: Vec<String> = ascent_sequence(t, &special, *i)?.iter().map(|l| l.to_string()).collect();
        println!(
            "  {i}  {}  {{{}}}  [{}]",
            ld.sharp(*i)?,
            names(tree, ld.cross_section(*i)?).replace(' ', ", "),
            ascent.join(", ")
        );
    }
    Ok(())
}

fn parse_special(t: &LevelTree, items: &[String]) -> std::result::Result<Special, Failure> {
    let mut out = Special::new();
    for item in items {
        let (l, v) = item
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("`{item}`: expected level=vertex")))?;
        out.insert(parse_level(l)?, t.tree().vertex(v.trim())?);
    }
    Ok(out)
}

fn blowup_report(t: &LevelTree) -> Out {
    let tree = t.tree();
    let schedule = BlowupSchedule::new(&t.base)?;
    let bar = &schedule.gamma_bar;
    let kept: Vec<&str> = bar.origin.iter().map(|v| tree.name(*v)).collect();
    println!("γ̄ keeps {}", kept.join(" "));
    println!("Ξ(γ̄):");
    for (k, s) in &schedule.sections {
        println!("  step {k}: {}", section(tree, s));
    }
    println!("order compatible: {}", schedule.is_order_compatible(tree));
    println!("stable: {}", is_stable(&t.base));
    let data = blowup_data(t)?;
    println!("divisors through the point:");
    for (k, s) in &data.divisors {
        println!("  step {k}: {}", section(tree, s));
    }
    println!("vanishing ž: {{{}}}", names(tree, data.vanishing.iter().copied()).replace(' ', ", "));
    let frame = ChartFrame::with_default_special(t.clone(), vec![])?;
    let chart = TwistedChart::new(frame);
    let mut ok = true;
    println!("Y_k pullbacks:");
    for k in 1..=tree.edge_count().max(1) {
        let (d, v) = yk_pullback(&chart, k)?;
        ok &= v.ok();
        println!("  k={k}: {d}{}", if v.ok() { "" } else { "  (FAILED)" });
        for f in &v.failures {
            println!("    {f}");
        }
    }
    match psi2_level_tree(&t.base, &data) {
        Ok(back) => {
            let same = is_equivalent(&back, t) && is_equivalent(t, &back);
            ok &= same;
            println!("ψ₂: {back}  equivalent: {same}");
        }
        Err(e) => {
            ok = false;
            println!("ψ₂: {e}");
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}
