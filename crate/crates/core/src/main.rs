use std::fs;
use std::io::{self, Read, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hyperpda::builders::{ball_automaton, fibonacci_automaton, sector_automaton, Variant};
use hyperpda::check::{run_check, CheckConfig};
use hyperpda::contour::ContourSpec;
use hyperpda::grammar::{builtin, parse_word, render_counts, render_word, SubstitutionSystem};
use hyperpda::machine::{parse_automaton, render_automaton, Engine, SearchBounds, Verdict};

/// Exit code for usage, input and domain errors.
const ERROR_EXIT: u8 = 3;

#[derive(Parser)]
#[command(name = "hyperpda", version, about = "Contour words of hyperbolic tilings and 2-iterated pushdown automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum WordKind {
    Ball,
    Sector,
    Level,
}

#[derive(Clone, Copy, ValueEnum)]
enum BuildKind {
    Fib,
    Ball,
    Sector,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Ball,
    Sector,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Corrected,
    AsPrinted,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Corrected => Variant::Corrected,
            VariantArg::AsPrinted => Variant::AsPrinted,
        }
    }
}

#[derive(clap::Args)]
struct SystemArgs {
    /// fib, polygonal:<p> (or p<p>), dodeca, cell120
    #[arg(long, default_value = "fib")]
    system: String,
    /// Root label of the tree
    #[arg(long, default_value = "W")]
    root: String,
    /// Sectors around a ball; defaults to the tiling's first sector count
    #[arg(long)]
    sigma: Option<usize>,
}

impl SystemArgs {
    fn system(&self) -> Result<SubstitutionSystem, String> {
        builtin(&self.system).map_err(|e| e.to_string())
    }

    fn ball(&self) -> Result<ContourSpec, String> {
        let sys = self.system()?;
        let sigma = self
            .sigma
            .or_else(|| sys.family().multiplicities().first().copied())
            .unwrap_or(1);
        let spec = ContourSpec::ball(sys, &self.root, sigma).map_err(|e| e.to_string())?;
        if !spec.sigma_is_declared() {
            eprintln!("warning: sigma {sigma} is not a sector count of this tiling");
        }
        Ok(spec)
    }

    fn sector(&self) -> Result<ContourSpec, String> {
        ContourSpec::sector(self.system()?, &self.root).map_err(|e| e.to_string())
    }
}

#[derive(clap::Args)]
struct BoundArgs {
    /// Largest store, in symbols, the search may build
    #[arg(long)]
    max_store: Option<usize>,
    /// Largest number of configurations the search may visit
    #[arg(long)]
    max_configs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Print a contour word or a level word
    Word {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, value_enum, default_value = "ball")]
        kind: WordKind,
        #[arg(long)]
        level: usize,
        /// Write the word to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print per-label counts of a tree level
    Count {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        level: usize,
    },
    /// Write an automaton file
    Build {
        #[arg(value_enum)]
        kind: BuildKind,
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, value_enum, default_value = "corrected")]
        variant: VariantArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an automaton on a word; exit 0 accepted, 1 rejected, 2 inconclusive
    Run {
        automaton: PathBuf,
        /// Word file; stdin when absent or `-`
        word: Option<PathBuf>,
        /// Print the accepting derivation
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Check a built automaton against the contour words
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        #[command(flatten)]
        sys: SystemArgs,
        /// Inclusive level range `a..b` (default: five levels from the first)
        #[arg(long, value_parser = parse_levels)]
        levels: Option<RangeInclusive<usize>>,
        #[arg(long, default_value_t = 20)]
        mutations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also compare the whole accepted language up to this length
        #[arg(long)]
        exhaustive_len: Option<usize>,
        #[arg(long)]
        json: bool,
        #[arg(long, value_enum, default_value = "corrected")]
        variant: VariantArg,
        #[command(flatten)]
        bounds: BoundArgs,
    },
}

fn parse_levels(text: &str) -> Result<RangeInclusive<usize>, String> {
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("invalid level `{s}`"));
    match text.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (parse(a)?, parse(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty level range `{text}`"));
            }
            Ok(a..=b)
        }
        None => parse(text).map(|l| l..=l),
    }
}

fn write_out(out: Option<&PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Word { sys, kind, level, out } => {
            let word = match kind {
                WordKind::Ball => sys.ball()?.word(level),
                WordKind::Sector => sys.sector()?.word(level),
                WordKind::Level => {
                    let system = sys.system()?;
                    let root = system.label_index(&sys.root).map_err(|e| e.to_string())?;
                    Ok(system.read_word(&system.level_word(root, level)))
                }
            }
            .map_err(|e| e.to_string())?;
            write_out(out.as_ref(), &(render_word(&word) + "\n"))?;
            Ok(0)
        }
        Command::Count { sys, level } => {
            let system = sys.system()?;
            let root = system.label_index(&sys.root).map_err(|e| e.to_string())?;
            print!("{}", render_counts(&system, &system.level_counts(root, level)));
            Ok(0)
        }
        Command::Build { kind, sys, variant, out } => {
            let variant = variant.into();
            let automaton = match kind {
                BuildKind::Fib => fibonacci_automaton(variant),
                BuildKind::Ball => {
                    let spec = sys.ball()?;
                    ball_automaton(&spec.system, &sys.root, spec.sigma, variant).map_err(|e| e.to_string())?
                }
                BuildKind::Sector => {
                    sector_automaton(&sys.system()?, &sys.root, variant).map_err(|e| e.to_string())?
                }
            };
            write_out(out.as_ref(), &render_automaton(&automaton))?;
            Ok(0)
        }
        Command::Run { automaton, word, trace, bounds } => {
            let text = fs::read_to_string(&automaton).map_err(|e| format!("{}: {e}", automaton.display()))?;
            let a = parse_automaton(&text).map_err(|e| format!("{}: {e}", automaton.display()))?;
            let raw = match word.as_ref().filter(|p| p.as_os_str() != "-") {
                Some(path) => fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?,
                None => {
                    let mut s = String::new();
                    io::stdin().read_to_string(&mut s).map_err(|e| e.to_string())?;
                    s
                }
            };
            let input = a.encode_input(&parse_word(&raw)).map_err(|e| e.to_string())?;
            let mut b = SearchBounds::default_for(input.len());
            if bounds.max_store.is_some() {
                b.max_store_symbols = bounds.max_store;
            }
            if bounds.max_configs.is_some() {
                b.max_configurations = bounds.max_configs;
            }
            let verdict = Engine::new(&a).accepts(&input, b);
            println!("{verdict}");
            if let (true, Verdict::Accepted(t)) = (trace, &verdict) {
                print!("{}", t.render(&a));
            }
            Ok(verdict.exit_code() as u8)
        }
        Command::Check {
            kind,
            sys,
            levels,
            mutations,
            seed,
            exhaustive_len,
            json,
            variant,
            bounds,
        } => {
            let spec = match kind {
                CheckKind::Ball => sys.ball()?,
                CheckKind::Sector => sys.sector()?,
            };
            let mut config = CheckConfig::new(spec);
            if let Some(levels) = levels {
                config.levels = levels;
            }
            config.mutations = mutations;
            config.seed = seed;
            config.exhaustive_len = exhaustive_len;
            config.variant = variant.into();
            config.max_store = bounds.max_store;
            config.max_configs = bounds.max_configs;
            let report = run_check(&config).map_err(|e| e.to_string())?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?);
            } else {
                print!("{report}");
            }
            Ok(u8::from(!report.pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { ERROR_EXIT } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(ERROR_EXIT)
        }
    }
}
