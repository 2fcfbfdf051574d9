use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand};
use kakutani_core::codes::{apply_stationary, random_code, FiniteCode};
use kakutani_core::feldman::{generate, FeldmanSpec};
use kakutani_core::flows::{stretch_report, Roof, SpecialFlow};
use kakutani_core::metrics::{fbar_double, fbar_rle, fbar_with_cap, DoubleWord};
use kakutani_core::real::Real;
use kakutani_core::systems::{build_tower, CocycleTable, IntegerRoof, RoofTower, Rotation, SkewSystem};
use kakutani_core::words::{build_from_tree_plan, check_a1, check_a2, check_a4, derive_parameters_from_tree, ConstructionSequence};
use kakutani_core::{Alphabet, Symbol, Tree};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kakutani::config::{output_root, ExperimentConfig, Mode, DEFAULT_SEED, OUTPUT_ROOT_ENV};
use kakutani::experiments::{self, demo_sequence, letter_blocks, mixing_sweep, Table};
use kakutani::formats::{format_rational, format_word, parse_rational, parse_roof, read_words};

#[derive(Parser)]
#[command(name = "kakutani", version, about = "Symbolic and flow experiments around Kakutani equivalence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Feldman patterns.
    #[command(subcommand)]
    Feldman(FeldmanCmd),
    /// f-bar distance between two words, or a distance matrix.
    Fbar(FbarArgs),
    /// Trees and the sequences derived from them.
    #[command(subcommand)]
    Tree(TreeCmd),
    /// Finite codes.
    #[command(subcommand)]
    Code(CodeCmd),
    /// Cutting-and-stacking towers.
    #[command(subcommand)]
    Tower(TowerCmd),
    /// Skew products over a rotation.
    #[command(subcommand)]
    Skew(SkewCmd),
    /// The conjugacy F(x,u,v) = (x,u+v,v).
    #[command(subcommand)]
    Conjugacy(ConjugacyCmd),
    /// Special flows over a two-torus rotation.
    #[command(subcommand)]
    Flow(FlowCmd),
    /// Registered experiments.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
}

#[derive(Subcommand)]
enum FeldmanCmd {
    /// Emits B_j in the word text format.
    Gen {
        #[arg(long = "T", alias = "t", default_value_t = 1)]
        t: u64,
        /// Number of blocks when no blocks file is given (blocks are `x^L`).
        #[arg(long = "N", alias = "n", default_value_t = 2)]
        n: u32,
        #[arg(long = "M", alias = "m", default_value_t = 3)]
        m: u32,
        #[arg(long = "L", alias = "block-len", default_value_t = 1)]
        block_len: u64,
        #[arg(long)]
        blocks_file: Option<PathBuf>,
        #[arg(long)]
        j: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct FbarArgs {
    #[arg(long, requires = "b", conflicts_with = "words_file")]
    a: Option<PathBuf>,
    #[arg(long, requires = "a")]
    b: Option<PathBuf>,
    /// Every file holds two lines, primary and secondary.
    #[arg(long)]
    double: bool,
    /// Writes a maximal match as JSON.
    #[arg(long)]
    witness: Option<PathBuf>,
    /// Expansion cap for the witness computation.
    #[arg(long, default_value_t = 1 << 24)]
    max_expand: u64,
    /// Pairwise distance matrix of all words in the file, as CSV.
    #[arg(long)]
    words_file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum TreeCmd {
    /// Node count, branch length and encodings.
    Show {
        #[arg(long)]
        tree_file: PathBuf,
    },
    /// Derives a construction sequence and checks it level by level.
    Plan {
        #[arg(long)]
        tree_file: PathBuf,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(long = "T", alias = "t", default_value_t = 1)]
        t: u64,
        /// Writes the sequence as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CodeCmd {
    /// A seeded uniformly random code over the first `letters` letters.
    Random {
        #[arg(long)]
        radius: u32,
        #[arg(long, default_value_t = 2)]
        letters: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Applies a code to every word of a file.
    Apply {
        #[arg(long)]
        code_file: PathBuf,
        #[arg(long)]
        words_file: PathBuf,
    },
}

#[derive(Subcommand)]
enum TowerCmd {
    /// Runs a roof tower over the level-n tower and reports block statistics.
    Simulate {
        /// Construction sequence JSON; the built-in two-letter sequence otherwise.
        #[arg(long)]
        sequence: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long, default_value_t = 100_000)]
        steps: u64,
        /// `a=1,b=2` per label, or a single integer.
        #[arg(long, default_value = "1")]
        roof: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModeArgs {
    #[arg(long, value_enum, default_value_t = Mode::Rational)]
    mode: Mode,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Subcommand)]
enum SkewCmd {
    /// Orbit of (x, theta) under (x, theta) -> (x + alpha, theta + phi(x)).
    Orbit {
        #[command(flatten)]
        mode: ModeArgs,
        #[arg(long, default_value = "1/3")]
        alpha: String,
        /// Step cocycle as `break:value` pairs, e.g. `0:1/5,1/2:2/5`.
        #[arg(long, default_value = "0:1/5,1/2:2/5")]
        cocycle: String,
        #[arg(long, default_value = "1")]
        modulus: String,
        #[arg(long, default_value = "0")]
        x: String,
        #[arg(long, default_value = "0")]
        theta: String,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ConjugacyCmd {
    /// Residual of the conjugacy identity on random points.
    Check {
        #[command(flatten)]
        mode: ModeArgs,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct FlowArgs {
    #[arg(long, default_value = "cosine:0.25,0.2")]
    roof: String,
    #[arg(long, default_value_t = std::f64::consts::SQRT_2 - 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 3f64.sqrt() - 1.0)]
    alpha_prime: f64,
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
    t_sweep: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum FlowCmd {
    /// Stretch of f_m over random intervals; t is read as m.
    Stretch {
        #[command(flatten)]
        flow: FlowArgs,
        #[arg(long, default_value_t = 1e-3)]
        width: f64,
    },
    /// |mu(A ∩ phi_{-t} B) - mu(A) mu(B)| with A = B = {z < 1/2, s < 1/2}.
    Mixing {
        #[command(flatten)]
        flow: FlowArgs,
        #[arg(long, default_value_t = 10_000)]
        batch: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// N(p, t) / t over random base points.
    Fibercount {
        #[command(flatten)]
        flow: FlowArgs,
    },
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Ids, descriptions and parameters.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Runs one experiment; exits 0 iff its verdict is PASS.
    Run {
        id: String,
        /// TOML or JSON config.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Parameter override `key=value` (value as a TOML literal).
        #[arg(long = "set")]
        set: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Output directory of this run.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Root for per-experiment output directories.
        #[arg(long, env = OUTPUT_ROOT_ENV)]
        output_root: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn dispatch(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Feldman(FeldmanCmd::Gen { t, n, m, block_len, blocks_file, j, out }) => {
            let (blocks, alphabet) = match blocks_file {
                Some(path) => {
                    let mut a = Alphabet::default();
                    (read_words(&path, &mut a)?, a)
                }
                None => (letter_blocks(n, block_len), Alphabet::letters(n as usize)),
            };
            let spec = FeldmanSpec::new(t, m, blocks)?;
            let b = generate(&spec, j)?;
            emit(out.as_deref(), &(format_word(&b.word, &alphabet) + "\n"))?;
            Ok(true)
        }
        Command::Fbar(args) => fbar_cmd(args),
        Command::Tree(cmd) => tree_cmd(cmd),
        Command::Code(cmd) => code_cmd(cmd),
        Command::Tower(TowerCmd::Simulate { sequence, level, steps, roof, out }) => {
            let seq: ConstructionSequence = match sequence {
                Some(p) => serde_json::from_str(&fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?)?,
                None => demo_sequence(1)?,
            };
            let tower = build_tower(&seq, level)?;
            let roof = parse_integer_roof(&roof, &seq.alphabet)?;
            let start = tower.bottom_of_plan().context("empty tower")?;
            let rt = RoofTower::new(tower, roof, None)?;
            let run = rt.simulate(start, steps)?;
            let mut table = Table::new(&["level", "height", "columns", "total_mass", "roof_integral", "steps", "blocks", "mean_block_length", "block_ratio"]);
            table.push([
                level.to_string(),
                rt.base.height.to_string(),
                rt.base.column_count().to_string(),
                rt.base.total_mass().to_string(),
                rt.integral().to_string(),
                run.steps.to_string(),
                run.blocks.to_string(),
                run.mean_block_length.to_string(),
                run.block_ratio.to_string(),
            ]);
            emit(out.as_deref(), &table.to_csv()?)?;
            Ok(true)
        }
        Command::Skew(SkewCmd::Orbit { mode, alpha, cocycle, modulus, x, theta, steps, out }) => {
            let csv = match mode.mode {
                Mode::Rational => skew_orbit(&alpha, &cocycle, &modulus, &x, &theta, steps, parse_rational, format_rational)?,
                Mode::Float => skew_orbit(&alpha, &cocycle, &modulus, &x, &theta, steps, parse_float, |v: &f64| v.to_string())?,
            };
            emit(out.as_deref(), &csv)?;
            Ok(true)
        }
        Command::Conjugacy(ConjugacyCmd::Check { mode, samples, out }) => {
            let mut config = ExperimentConfig::new("exp-conjugacy");
            config.seed = mode.seed;
            config.mode = Some(mode.mode);
            if let Some(n) = samples {
                let key = if mode.mode == Mode::Rational { "rational_points" } else { "float_points" };
                config = config.with_param(key, n.into());
            }
            let outcome = experiments::run_in_memory(&config, 1)?;
            emit(out.as_deref(), &outcome.table.to_csv()?)?;
            for c in &outcome.checks {
                eprintln!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            Ok(outcome.pass())
        }
        Command::Flow(cmd) => flow_cmd(cmd),
        Command::Experiment(ExperimentCmd::List { json }) => {
            let list = experiments::list_experiments();
            if json {
                println!("{}", serde_json::to_string_pretty(&list)?);
            } else {
                for e in &list {
                    println!("{:<24} [{}] {}", e.id, e.modes.join(","), e.description);
                    for p in e.params {
                        println!("    {} = {}  ({})", p.name, p.default, p.doc);
                    }
                }
            }
            Ok(true)
        }
        Command::Experiment(ExperimentCmd::Run { id, config, set, seed, mode, out, output_root: root, jobs }) => {
            let mut cfg = match config {
                Some(p) => {
                    let c = ExperimentConfig::load(&p)?;
                    if c.experiment != id {
                        bail!("config is for `{}`, not `{id}`", c.experiment);
                    }
                    c
                }
                None => ExperimentConfig::new(&id),
            };
            for s in &set {
                cfg.set(s)?;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if mode.is_some() {
                cfg.mode = mode;
            }
            if out.is_some() {
                cfg.output = out;
            }
            let report = experiments::run(&cfg, &output_root(root.as_deref()), jobs)?;
            for c in &report.checks {
                println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            println!("{} {} -> {}", if report.pass { "PASS" } else { "FAIL" }, report.experiment, report.directory.display());
            Ok(report.pass)
        }
    }
}

fn read_one(path: &Path, alphabet: &mut Alphabet, count: usize) -> Result<Vec<kakutani_core::Word>> {
    let words = read_words(path, alphabet)?;
    if words.len() != count {
        bail!("{} holds {} words, expected {count}", path.display(), words.len());
    }
    Ok(words)
}

fn fbar_cmd(args: FbarArgs) -> Result<bool> {
    let mut alphabet = Alphabet::default();
    if let Some(path) = &args.words_file {
        let words = read_words(path, &mut alphabet)?;
        let mut header = vec!["word".to_string()];
        header.extend((1..=words.len()).map(|i| i.to_string()));
        let mut w = csv::Writer::from_writer(std::io::stdout());
        w.write_record(&header)?;
        for (i, a) in words.iter().enumerate() {
            let mut row = vec![(i + 1).to_string()];
            for b in &words {
                row.push(fbar_rle(a, b)?.to_string());
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        return Ok(true);
    }
    let (Some(pa), Some(pb)) = (&args.a, &args.b) else {
        bail!("give --a and --b, or --words-file");
    };
    if args.double {
        let x = read_one(pa, &mut alphabet, 2)?;
        let y = read_one(pb, &mut alphabet, 2)?;
        let x = DoubleWord::new(x[0].clone(), x[1].clone())?;
        let y = DoubleWord::new(y[0].clone(), y[1].clone())?;
        let v = fbar_double(&x, &y)?;
        println!("{v}");
        return Ok(true);
    }
    let a = &read_one(pa, &mut alphabet, 1)?[0];
    let b = &read_one(pb, &mut alphabet, 1)?[0];
    match &args.witness {
        Some(path) => {
            let (v, m) = fbar_with_cap(a, b, args.max_expand)?;
            let doc = serde_json::json!({ "fbar": v.to_string(), "match_size": v.match_size(), "pairs": m.pairs });
            fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
            println!("{v}");
        }
        None => println!("{}", fbar_rle(a, b)?),
    }
    Ok(true)
}

fn read_tree(path: &Path) -> Result<Tree> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Tree::from_text(&text)?)
}

fn tree_cmd(cmd: TreeCmd) -> Result<bool> {
    match cmd {
        TreeCmd::Show { tree_file } => {
            let tree = read_tree(&tree_file)?;
            println!("nodes {}", tree.len());
            match tree.max_branch_length() {
                Ok(b) => println!("max_branch_length {b}"),
                Err(e) => println!("max_branch_length undefined ({e})"),
            }
            let bound = tree.max_entry().unwrap_or(0);
            let span = tree.enumeration_span(bound)?;
            let bits = tree.encode_enumeration(span, bound)?;
            println!("enumeration {}", bits.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>());
            Ok(true)
        }
        TreeCmd::Plan { tree_file, levels, t, out } => {
            let tree = read_tree(&tree_file)?;
            let plan = derive_parameters_from_tree(&tree, levels);
            let (seq, readable) = build_from_tree_plan(&plan, t)?;
            let mut ok = true;
            let mut table = Table::new(&["level", "h", "words", "a1", "a2", "a3", "a4"]);
            for n in 1..seq.levels.len() {
                let (lower, upper) = (&seq.levels[n - 1], &seq.levels[n]);
                let a1 = check_a1(upper);
                let a2 = check_a2(lower, upper, None)?;
                let a4 = check_a4(lower, upper, None)?;
                ok &= a1 && a2 && readable[n - 1] && a4;
                table.push([
                    n.to_string(),
                    upper.h.to_string(),
                    upper.words.len().to_string(),
                    a1.to_string(),
                    a2.to_string(),
                    readable[n - 1].to_string(),
                    a4.to_string(),
                ]);
            }
            print!("{}", table.to_csv()?);
            if let Some(p) = out {
                fs::write(&p, serde_json::to_string_pretty(&seq)? + "\n")?;
            }
            Ok(ok)
        }
    }
}

fn code_cmd(cmd: CodeCmd) -> Result<bool> {
    match cmd {
        CodeCmd::Random { radius, letters, seed, out } => {
            let symbols: Vec<Symbol> = (0..letters).map(Symbol).collect();
            let code = random_code(radius, symbols.clone(), symbols, seed)?;
            emit(out.as_deref(), &(serde_json::to_string_pretty(&code)? + "\n"))?;
            Ok(true)
        }
        CodeCmd::Apply { code_file, words_file } => {
            let code: FiniteCode = serde_json::from_str(&fs::read_to_string(&code_file)?)?;
            let mut alphabet = Alphabet::letters(0);
            let words = read_words(&words_file, &mut alphabet)?;
            for w in &words {
                println!("{}", format_word(&apply_stationary(&code, w)?, &alphabet));
            }
            Ok(true)
        }
    }
}

/// `a=1,b=2`, or one integer for a constant roof.
fn parse_integer_roof(text: &str, alphabet: &Alphabet) -> Result<IntegerRoof> {
    if let Ok(value) = text.trim().parse::<u64>() {
        return Ok(IntegerRoof::Constant { value });
    }
    let mut values = Vec::new();
    for part in text.split(',') {
        let (name, v) = part.split_once('=').with_context(|| format!("bad roof entry `{part}`"))?;
        let s = alphabet.symbol(name.trim()).with_context(|| format!("unknown label `{name}`"))?;
        values.push((s, v.trim().parse()?));
    }
    Ok(IntegerRoof::BySymbol { values, default: 1 })
}

fn parse_float(s: &str) -> Result<f64> {
    match s.split_once('/') {
        Some((p, q)) => Ok(p.trim().parse::<f64>()? / q.trim().parse::<f64>()?),
        None => Ok(s.trim().parse()?),
    }
}

#[allow(clippy::too_many_arguments)]
fn skew_orbit<S: Real>(
    alpha: &str,
    cocycle: &str,
    modulus: &str,
    x: &str,
    theta: &str,
    steps: usize,
    parse: impl Fn(&str) -> Result<S>,
    show: impl Fn(&S) -> String,
) -> Result<String> {
    let mut breaks = Vec::new();
    let mut values = Vec::new();
    for part in cocycle.split(',') {
        let (b, v) = part.split_once(':').with_context(|| format!("bad cocycle piece `{part}`"))?;
        breaks.push(parse(b)?);
        values.push(parse(v)?);
    }
    if breaks.first() != Some(&S::zero()) {
        bail!("the cocycle's first break must be 0");
    }
    let system = SkewSystem::new(Rotation { alpha: parse(alpha)? }, CocycleTable { breaks, values }, parse(modulus)?);
    let mut table = Table::new(&["step", "x", "theta"]);
    for (i, (x, th)) in system.orbit((parse(x)?, parse(theta)?), steps).iter().enumerate() {
        table.push([i.to_string(), show(x), show(th)]);
    }
    Ok(table.to_csv()?)
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn flow_cmd(cmd: FlowCmd) -> Result<bool> {
    let args = match &cmd {
        FlowCmd::Stretch { flow, .. } | FlowCmd::Mixing { flow, .. } | FlowCmd::Fibercount { flow } => flow,
    };
    let roof = parse_roof(&args.roof)?;
    let flow = SpecialFlow::new(args.alpha, args.alpha_prime, roof);
    let mut ok = true;
    let table = match cmd {
        FlowCmd::Stretch { width, .. } => {
            let mut table = Table::new(&["t", "estimate", "stderr", "mean_linear_deviation"]);
            for &t in &args.t_sweep {
                let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
                let m = t.max(0.0) as u64;
                let mut stretch = Vec::new();
                let mut dev = Vec::new();
                for _ in 0..args.samples {
                    let (z0, w): (f64, f64) = (rng.gen::<f64>() * (1.0 - width), rng.gen());
                    let r = stretch_report(&flow, z0, z0 + width, w, m, 17);
                    stretch.push(r.total_stretch);
                    dev.push(r.linear_deviation);
                }
                let (e, se) = mean_and_stderr(&stretch);
                table.push([t.to_string(), e.to_string(), se.to_string(), mean_and_stderr(&dev).0.to_string()]);
            }
            table
        }
        FlowCmd::Mixing { batch, jobs, .. } => {
            let mut table = Table::new(&["t", "estimate", "stderr", "samples"]);
            for e in mixing_sweep(&flow, &args.t_sweep, args.samples, batch, args.seed, jobs) {
                table.push([e.t.to_string(), e.estimate.to_string(), e.stderr.to_string(), e.samples.to_string()]);
            }
            table
        }
        FlowCmd::Fibercount { .. } => {
            let mut table = Table::new(&["t", "estimate", "stderr", "min", "max", "violations"]);
            let banded = flow.roof.in_stretch_band();
            for &t in &args.t_sweep {
                let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
                let counts: Vec<u64> = (0..args.samples).map(|_| flow.fiber_count((rng.gen(), rng.gen()), t)).collect();
                let ratios: Vec<f64> = counts.iter().map(|&c| c as f64 / t).collect();
                let bad = counts.iter().filter(|&&c| (c as f64) < t / 2.0 || (c as f64) > 2.0 * t).count();
                ok &= !banded || bad == 0;
                let (e, se) = mean_and_stderr(&ratios);
                table.push([
                    t.to_string(),
                    e.to_string(),
                    se.to_string(),
                    counts.iter().min().copied().unwrap_or(0).to_string(),
                    counts.iter().max().copied().unwrap_or(0).to_string(),
                    bad.to_string(),
                ]);
            }
            table
        }
    };
    emit(args.out.as_deref(), &table.to_csv()?)?;
    Ok(ok)
}
