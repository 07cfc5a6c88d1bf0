use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use minrank_core::blowup::{
    member, min_rank_certified, MinRankError, MinRankOptions, PatternCache,
};
use minrank_core::gf::{prime_power, FieldCtx, MAX_ORDER};
use minrank_core::graphs::parse_graph6;
use minrank_core::matfq::{
    classify_invertible_symmetric, congruence_normalize, MatrixFq, MatrixJson,
};
use minrank_core::miner::{mine, Checkpoint, GraphSource, MinerOptions};
use minrank_core::oracle::{oracle_min_rank, OracleError, DEFAULT_ORACLE_BUDGET};
use minrank_core::patterns::{generate, verify_counts, DEFAULT_VERTEX_BUDGET};
use minrank_core::selftest::run_selftest;

/// Minimum rank of graphs over finite fields.
#[derive(Parser)]
#[command(name = "minrank", version)]
struct Cli {
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
    G6,
    Matrix,
}

#[derive(Subcommand)]
enum Command {
    /// Print the pattern graphs for GF(q) and order k.
    Patterns {
        #[arg(long, value_parser = parse_q)]
        q: u64,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Largest pattern size to build.
        #[arg(long, default_value_t = DEFAULT_VERTEX_BUDGET)]
        budget: u64,
        /// Also check the vertex, degree and nonlooped counts.
        #[arg(long)]
        verify: bool,
    },
    /// Minimum rank of each graph6 line on the input.
    Minrank {
        #[arg(long, value_parser = parse_q)]
        q: u64,
        #[arg(long)]
        max_k: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_VERTEX_BUDGET)]
        budget: u64,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Whether each input graph has minimum rank at most k.
    Member {
        #[arg(long, value_parser = parse_q)]
        q: u64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_VERTEX_BUDGET)]
        budget: u64,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Exhaustive minimum rank by enumerating matrices.
    Oracle {
        #[arg(long, value_parser = parse_q)]
        q: u64,
        #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET)]
        budget: u128,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Minimal forbidden induced subgraphs for mr <= k.
    Mine {
        #[arg(long, value_parser = parse_q)]
        q: u64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        max_n: usize,
        /// graph6 stream to scan instead of the built-in enumeration.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Write progress here every 10^4 graphs.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        resume: Option<PathBuf>,
        #[arg(long)]
        max_graphs: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_VERTEX_BUDGET)]
        budget: u64,
    },
    /// Congruence class of an invertible symmetric matrix given as JSON.
    Classify {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Replay the published worked examples.
    Selftest,
}

fn parse_q(s: &str) -> Result<u64, String> {
    let q: u64 = match s.split_once('^') {
        Some((p, e)) => {
            let p: u64 = p.trim().parse().map_err(|_| format!("bad base in {s:?}"))?;
            let e: u32 = e
                .trim()
                .parse()
                .map_err(|_| format!("bad exponent in {s:?}"))?;
            p.checked_pow(e).ok_or_else(|| format!("{s} overflows"))?
        }
        None => s
            .trim()
            .parse()
            .map_err(|_| format!("{s:?} is not an integer"))?,
    };
    if prime_power(q).is_none() {
        return Err(format!("{q} is not a prime power"));
    }
    if q > u64::from(MAX_ORDER) {
        return Err(format!(
            "{q} exceeds the largest supported order {MAX_ORDER}"
        ));
    }
    Ok(q)
}

fn field(q: u64) -> Result<Arc<FieldCtx>> {
    Ok(Arc::new(FieldCtx::with_order(q)?))
}

fn read_input(path: &Option<PathBuf>) -> Result<String> {
    let mut text = String::new();
    match path {
        Some(p) => {
            text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?
        }
        None => {
            io::stdin().read_to_string(&mut text)?;
        }
    }
    Ok(text)
}

fn graph6_lines(path: &Option<PathBuf>) -> Result<Vec<String>> {
    let reader: Box<dyn BufRead> = match path {
        Some(p) => Box::new(BufReader::new(
            fs::File::open(p).with_context(|| format!("opening {}", p.display()))?,
        )),
        None => Box::new(BufReader::new(io::stdin())),
    };
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(line.trim().to_string());
        }
    }
    Ok(out)
}

/// Runs `f` on every input graph, printing one JSON line each. Malformed
/// lines are reported on stderr and make the command fail at the end.
fn each_graph(
    input: &Option<PathBuf>,
    mut f: impl FnMut(&str, &minrank_core::graphs::SimpleGraph) -> serde_json::Value,
) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut bad = 0;
    for line in graph6_lines(input)? {
        match parse_graph6(&line) {
            Ok(g) => writeln!(out, "{}", f(&line, &g))?,
            Err(e) => {
                eprintln!("{line}: {e}");
                bad += 1;
            }
        }
    }
    if bad > 0 {
        bail!("{bad} malformed graph6 line(s)");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Patterns {
            q,
            k,
            format,
            budget,
            verify,
        } => {
            let ps = generate(&field(q)?, k, budget)?;
            if verify {
                let rep = verify_counts(&ps)?;
                eprintln!("{}", serde_json::to_string(&rep)?);
            }
            let mut out = io::stdout().lock();
            for (i, p) in ps.patterns.iter().enumerate() {
                match format {
                    Format::Json => writeln!(
                        out,
                        "{}",
                        json!({"q": q, "k": k, "pattern": i, "class": p.class, "graph": p.graph.to_json()})
                    )?,
                    Format::Dot => {
                        write!(out, "{}", p.graph.to_dot(&format!("pattern_q{q}_k{k}_{i}")))?
                    }
                    Format::G6 => writeln!(out, "{}", p.graph.simple().to_graph6())?,
                    Format::Matrix => {
                        if i > 0 {
                            writeln!(out)?;
                        }
                        let g = ps.gram(i);
                        for r in 0..g.rows() {
                            let row: Vec<String> =
                                g.row(r).iter().map(|x| x.0.to_string()).collect();
                            writeln!(out, "{}", row.join(" "))?;
                        }
                    }
                }
            }
        }
        Command::Minrank {
            q,
            max_k,
            budget,
            input,
        } => {
            let cache = PatternCache::new(field(q)?, budget);
            each_graph(&input, |line, g| {
                match min_rank_certified(g, &cache, MinRankOptions { max_k }) {
                    Ok((r, _)) => json!({"graph6": line, "minrank": r}),
                    Err(MinRankError::Exceeded {
                        lower_bound,
                        reason,
                    }) => {
                        json!({"graph6": line, "lower_bound": lower_bound + 1, "reason": reason})
                    }
                }
            })?;
        }
        Command::Member {
            q,
            k,
            budget,
            input,
        } => {
            let cache = PatternCache::new(field(q)?, budget);
            cache.get(k)?;
            each_graph(&input, |line, g| {
                match member(g, &cache, k).expect("patterns cached") {
                    Some(m) => {
                        json!({"graph6": line, "member": true, "pattern": m.pattern, "witness": m.witness.assignment})
                    }
                    None => json!({"graph6": line, "member": false}),
                }
            })?;
        }
        Command::Oracle { q, budget, input } => {
            let f = field(q)?;
            each_graph(&input, |line, g| match oracle_min_rank(g, &f, budget) {
                Ok(r) => json!({"graph6": line, "minrank": r}),
                Err(OracleError::Budget { .. }) => json!({"graph6": line, "error": "budget"}),
            })?;
        }
        Command::Mine {
            q,
            k,
            max_n,
            input,
            checkpoint,
            resume,
            max_graphs,
            budget,
        } => {
            let cache = PatternCache::new(field(q)?, budget);
            let source = match &input {
                Some(_) => GraphSource::Graph6(graph6_lines(&input)?),
                None => GraphSource::Internal,
            };
            let resume = resume.as_deref().map(Checkpoint::load).transpose()?;
            let run = mine(
                &cache,
                k,
                max_n,
                source,
                MinerOptions {
                    checkpoint,
                    resume,
                    max_graphs,
                },
            )?;
            println!(
                "{}",
                json!({"forbidden": run.forbidden, "stats": run.stats})
            );
        }
        Command::Classify { input } => {
            let text = read_input(&input)?;
            let mj: MatrixJson = serde_json::from_str(&text).context("parsing matrix JSON")?;
            let b = MatrixFq::from_json(&mj)?;
            let class = classify_invertible_symmetric(&b)?;
            let (c, r) = congruence_normalize(&b)?;
            println!(
                "{}",
                json!({"class": class, "representative": r.to_json(), "transform": c.to_json()})
            );
        }
        Command::Selftest => {
            let results = run_selftest();
            let failed = results.iter().filter(|r| !r.passed).count();
            for r in &results {
                println!("{}", serde_json::to_string(r)?);
                if !r.passed {
                    eprintln!("FAIL {}: {}", r.name, r.detail.as_deref().unwrap_or(""));
                }
            }
            if failed > 0 {
                bail!("{failed} of {} checks failed", results.len());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs == 0 {
        eprintln!("error: --jobs must be at least 1");
        return ExitCode::from(2);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build_global()
    {
        eprintln!("warning: {e}");
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
