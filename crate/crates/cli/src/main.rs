//! Command-line workbench: sampling, classification, densities, FO
//! evaluation, Ehrenfeucht games, registry enumeration, profiles, witness
//! construction, and Monte-Carlo probes. Every subcommand is deterministic
//! for fixed flags and seed.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use zeroone::ext::{classify_pair, f_alpha, rho_max_bruteforce, rho_max_flow};
use zeroone::fo;
use zeroone::game::{self, Winner};
use zeroone::graph::{Graph, LabeledPair, RootedPair};
use zeroone::graph6;
use zeroone::gset::{self, GSetParams};
use zeroone::probe::{self, Detector};
use zeroone::profiles::{self, NeutralTemplates, TemplateId};
use zeroone::rational::Rat;

#[derive(Parser)]
#[command(
    name = "zeroone",
    version,
    about = "workbench for FO zero-one-law combinatorics on sparse random graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    G6,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum RhoMethod {
    Brute,
    Flow,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum DetectorKind {
    Triangle,
    K4,
    K5,
    Formula,
    Ehr,
    MaxExt,
}

#[derive(Clone, Copy, ValueEnum)]
enum TemplateArg {
    Tick,
    K1,
    K2,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one graph from G(n, n^-alpha)
    Sample {
        #[arg(long)]
        n: usize,
        /// alpha as p/q
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "g6")]
        format: GraphFormat,
    },
    /// Classify a nested pair file at alpha
    ClassifyPair {
        /// pair file: graph6 line plus `h=<indices>` line
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        alpha: String,
    },
    /// Exact maximal subgraph density
    Rhomax {
        #[arg(long)]
        graph: PathBuf,
        /// `both` cross-checks against subset brute force (25-vertex cap)
        #[arg(long, value_enum, default_value = "flow")]
        method: RhoMethod,
    },
    /// Evaluate FO sentences on a graph
    EvalFo {
        #[arg(long)]
        graph: PathBuf,
        /// inline sentence
        #[arg(long)]
        formula: Option<String>,
        /// sentence file, one per line, # comments
        #[arg(long)]
        formulas: Option<PathBuf>,
    },
    /// Solve the k-round Ehrenfeucht game
    Ehr {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        k: usize,
        /// print the spoiler's principal variation
        #[arg(long)]
        trace: bool,
    },
    /// Synthesize a distinguishing sentence from a Spoiler win
    Synthesize {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Enumerate the rooted registry and persist it
    GsetEnum {
        /// key=value parameter file
        #[arg(long = "gset-params")]
        gset_params: Option<PathBuf>,
        #[arg(long)]
        layers: Option<usize>,
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
    },
    /// Profile of a vertex over a persisted registry
    Profile {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        vertex: usize,
        #[arg(long)]
        registry: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the witness graph replaying a vertex profile
    Witness {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        vertex: usize,
        #[arg(long)]
        registry: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo probes over an (alpha, n[, m]) grid
    Probe {
        #[arg(long, value_enum)]
        detector: DetectorKind,
        /// grid file: lines `p/q n [m]`
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// rounds for the ehr detector
        #[arg(long)]
        k: Option<usize>,
        /// sentence for the formula detector
        #[arg(long)]
        formula: Option<String>,
        /// safe pair file for the max-ext detector
        #[arg(long)]
        pair: Option<PathBuf>,
        #[arg(long, value_enum)]
        template: Option<TemplateArg>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV destination (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let line = text
        .lines()
        .find(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .context("no graph6 line in file")?;
    Ok(graph6::decode(line)?)
}

fn read_pair(path: &Path) -> Result<(Graph, Vec<usize>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(graph6::decode_pair(&text)?)
}

fn parse_alpha(s: &str) -> Result<Rat> {
    let a = Rat::parse(s)?;
    if !a.is_positive() {
        bail!("alpha must be positive, got {a}");
    }
    Ok(a)
}

fn write_out(out: Option<&PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{content}"),
    }
    Ok(())
}

/// Grid rows: (alpha, n, optional m). Inline flags form a one-cell grid.
fn load_grid(
    grid: Option<&PathBuf>,
    alpha: Option<&String>,
    n: Option<usize>,
    m: Option<usize>,
) -> Result<Vec<(Rat, usize, Option<usize>)>> {
    if let Some(path) = grid {
        let text = fs::read_to_string(path)?;
        let mut rows = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() < 2 || toks.len() > 3 {
                bail!("grid line {}: expected `alpha n [m]`", no + 1);
            }
            let alpha = parse_alpha(toks[0])?;
            let n: usize = toks[1].parse().context("bad n in grid")?;
            let m: Option<usize> = match toks.get(2) {
                Some(t) => Some(t.parse().context("bad m in grid")?),
                None => None,
            };
            rows.push((alpha, n, m));
        }
        if rows.is_empty() {
            bail!("grid file {} has no cells", path.display());
        }
        Ok(rows)
    } else {
        let alpha = parse_alpha(alpha.context("need --alpha or --grid")?)?;
        let n = n.context("need --n or --grid")?;
        Ok(vec![(alpha, n, m)])
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Sample {
            n,
            alpha,
            seed,
            out,
            format,
        } => {
            let alpha = parse_alpha(&alpha)?;
            let spec = probe::SampleSpec { n, alpha, seed };
            let g = probe::sample(&spec)?;
            let content = match format {
                GraphFormat::G6 => format!("{}\n", graph6::encode(&g)),
                GraphFormat::Dot => format!("{}\n", g.to_dot()),
            };
            write_out(out.as_ref(), &content)?;
        }
        Command::ClassifyPair { pair, alpha } => {
            let alpha = parse_alpha(&alpha)?;
            let (g, h) = read_pair(&pair)?;
            let rp = RootedPair::new(g, &h)?;
            let f = f_alpha(&rp, alpha);
            let class = classify_pair(&rp, alpha)?;
            println!(
                "v_gh={} e_gh={} f={f} class={class:?}",
                rp.v_gh(),
                rp.e_gh()
            );
        }
        Command::Rhomax { graph, method } => {
            let g = read_graph(&graph)?;
            match method {
                RhoMethod::Brute => println!("rho_max={}", rho_max_bruteforce(&g)?),
                RhoMethod::Flow => println!("rho_max={}", rho_max_flow(&g)?),
                RhoMethod::Both => {
                    let b = rho_max_bruteforce(&g)?;
                    let f = rho_max_flow(&g)?;
                    if b != f {
                        bail!("rho_max disagreement: brute {b} vs flow {f}");
                    }
                    println!("rho_max={b}");
                }
            }
        }
        Command::EvalFo {
            graph,
            formula,
            formulas,
        } => {
            let g = read_graph(&graph)?;
            let mut sentences = Vec::new();
            if let Some(text) = formula {
                sentences.push((text.clone(), fo::parse(&text)?));
            }
            if let Some(path) = formulas {
                let text = fs::read_to_string(&path)?;
                for f in fo::parse_file(&text)? {
                    sentences.push((f.to_string(), f));
                }
            }
            if sentences.is_empty() {
                bail!("need --formula or --formulas");
            }
            for (text, f) in sentences {
                println!("{}\t{}", f.evaluate(&g)?, text);
            }
        }
        Command::Ehr { x, y, k, trace } => {
            let gx = read_graph(&x)?;
            let gy = read_graph(&y)?;
            let out = game::solve(&gx, &gy, k)?;
            println!(
                "winner={}",
                match out.winner {
                    Winner::Spoiler => "Spoiler",
                    Winner::Duplicator => "Duplicator",
                }
            );
            if trace {
                if let Some(t) = &out.trace {
                    print!("{}", game::format_trace(t));
                }
            }
        }
        Command::Synthesize { x, y, k } => {
            let gx = read_graph(&x)?;
            let gy = read_graph(&y)?;
            match game::synthesize_distinguisher(&gx, &gy, k)? {
                Some(f) => {
                    // sanity: the evaluator confirms the separation
                    debug_assert!(f.evaluate(&gx)? && !f.evaluate(&gy)?);
                    println!("{f}");
                }
                None => println!("none"),
            }
        }
        Command::GsetEnum {
            gset_params,
            layers,
            out_dir,
        } => {
            let params = match gset_params {
                Some(path) => GSetParams::from_config(&fs::read_to_string(&path)?)?,
                None => GSetParams::default(),
            };
            let layers = layers.unwrap_or(params.layers);
            let reg = gset::enumerate_g(&params, layers)?;
            gset::save_registry(&reg, &out_dir)?;
            let report = gset::verify_g_properties(&reg)?;
            println!("members={}", reg.kappa());
            for l in 0..=layers {
                println!("layer{}={}", l, reg.layer_members(l).len());
            }
            println!(
                "properties={}",
                if report.all_pass() { "pass" } else { "FAIL" }
            );
            if !report.all_pass() {
                print!("{}", report.render());
                bail!("registry property verification failed");
            }
        }
        Command::Profile {
            graph,
            vertex,
            registry,
            out,
        } => {
            let g = read_graph(&graph)?;
            let reg = gset::load_registry(&registry)?;
            let templates = NeutralTemplates::standard();
            let p = profiles::profile(&g, vertex, &reg, &templates)?;
            write_out(out.as_ref(), &p.render())?;
        }
        Command::Witness {
            graph,
            vertex,
            registry,
            out,
        } => {
            let g = read_graph(&graph)?;
            let reg = gset::load_registry(&registry)?;
            let templates = NeutralTemplates::standard();
            let w = profiles::build_witness(&g, vertex, &reg, &templates)?;
            let mut content = format!("{}\n", graph6::encode_rooted(&w.graph, w.z1));
            for (member, order) in &w.copies {
                content.push_str(&format!(
                    "copy member={member} vertices={}\n",
                    order
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                ));
            }
            write_out(out.as_ref(), &content)?;
        }
        Command::Probe {
            detector,
            grid,
            alpha,
            n,
            m,
            k,
            formula,
            pair,
            template,
            samples,
            seed,
            out,
        } => {
            let cells = load_grid(grid.as_ref(), alpha.as_ref(), n, m)?;
            let results = match detector {
                DetectorKind::Triangle | DetectorKind::K4 | DetectorKind::K5 => {
                    let size = match detector {
                        DetectorKind::Triangle => 3,
                        DetectorKind::K4 => 4,
                        _ => 5,
                    };
                    let grid2: Vec<(Rat, usize)> = cells.iter().map(|c| (c.0, c.1)).collect();
                    probe::probe_sentence(&Detector::Clique(size), &grid2, samples, seed)?
                }
                DetectorKind::Formula => {
                    let text = formula.context("formula detector needs --formula")?;
                    let f = fo::parse(&text)?;
                    let grid2: Vec<(Rat, usize)> = cells.iter().map(|c| (c.0, c.1)).collect();
                    probe::probe_sentence(&Detector::Sentence(f), &grid2, samples, seed)?
                }
                DetectorKind::Ehr => {
                    let k = k.context("ehr detector needs --k")?;
                    let grid2: Vec<(Rat, usize, usize)> = cells
                        .iter()
                        .map(|c| (c.0, c.1, c.2.unwrap_or(c.1)))
                        .collect();
                    probe::probe_ehr(&grid2, k, samples, seed)?
                }
                DetectorKind::MaxExt => {
                    let path = pair.context("max-ext detector needs --pair")?;
                    let (g, h) = read_pair(&path)?;
                    let order = pair_order(&g, &h);
                    let lp = LabeledPair::new(g, order, h.len())?;
                    let templates = NeutralTemplates::standard();
                    let tid = match template.context("max-ext detector needs --template")? {
                        TemplateArg::Tick => TemplateId::KStar,
                        TemplateArg::K1 => TemplateId::K1,
                        TemplateArg::K2 => TemplateId::K2,
                    };
                    let grid2: Vec<(Rat, usize)> = cells.iter().map(|c| (c.0, c.1)).collect();
                    probe::probe_maximal_extension(&lp, templates.get(tid), &grid2, samples, seed)?
                }
            };
            write_out(out.as_ref(), &probe::results_to_csv(&results))?;
        }
    }
    Ok(())
}

/// Ordering for a pair file: the listed H vertices first, the rest ascending.
fn pair_order(g: &Graph, h: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = h.to_vec();
    for v in 0..g.v() {
        if !h.contains(&v) {
            order.push(v);
        }
    }
    order
}
