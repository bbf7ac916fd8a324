//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::chart::{run_parse, ParserConfig};
use crate::demo;
use crate::io::report::{Document, SentenceJson, Status};
use crate::io::{parse_grammar, parse_lexicon, parse_tagprobs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_NO_PARSE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "gradun", version, about = "Graded unification chart parser")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse sentences with a grammar and lexicon.
    Parse(ParseArgs),
    /// Run the bundled frequency-versus-animacy experiment.
    Demo(DemoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct Knobs {
    /// Unification threshold in [0, 1].
    #[arg(long)]
    pub uthresh: Option<f64>,
    /// Activation threshold in [0, 1].
    #[arg(long)]
    pub athresh: Option<f64>,
    /// Activation weights w1,w2,w3 (must sum to 1).
    #[arg(long, value_parser = parse_weights)]
    pub weights: Option<[f64; 3]>,
}

impl Knobs {
    fn apply(&self, mut cfg: ParserConfig) -> Result<ParserConfig, String> {
        if let Some(u) = self.uthresh {
            cfg.unification_threshold = u;
        }
        if let Some(a) = self.athresh {
            cfg.activation_threshold = a;
        }
        if let Some(w) = self.weights {
            cfg.weights = w;
        }
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    #[arg(long)]
    pub grammar: PathBuf,
    #[arg(long)]
    pub lexicon: PathBuf,
    /// Initial activations for lexical edges.
    #[arg(long)]
    pub tag_probs: Option<PathBuf>,
    /// A sentence, or a file with one sentence per line.
    #[arg(long)]
    pub input: String,
    #[command(flatten)]
    pub knobs: Knobs,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_best: u64,
    /// Include the event trace.
    #[arg(long)]
    pub trace: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[command(flatten)]
    pub knobs: Knobs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

fn parse_weights(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad weight `{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    <[f64; 3]>::try_from(parts).map_err(|_| "expected three comma-separated weights".to_string())
}

fn read(path: &Path, what: &str) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {what} {}: {e}", path.display()))
}

fn sentences(input: &str) -> Result<Vec<String>, String> {
    let path = Path::new(input);
    if path.is_file() {
        let text = read(path, "input")?;
        Ok(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_string).collect())
    } else {
        Ok(vec![input.trim().to_string()])
    }
}

struct Failure(String);

fn run_parse_command(args: &ParseArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let fail = |m: String| Failure(m);
    let grammar = parse_grammar(&read(&args.grammar, "grammar").map_err(fail)?)
        .map_err(|e| Failure(format!("{}: {e}", args.grammar.display())))?;
    let lexicon = parse_lexicon(&read(&args.lexicon, "lexicon").map_err(fail)?)
        .map_err(|e| Failure(format!("{}: {e}", args.lexicon.display())))?;
    let activations = match &args.tag_probs {
        Some(p) => {
            let file = parse_tagprobs(&read(p, "tag-probs file").map_err(fail)?)
                .map_err(|e| Failure(format!("{}: {e}", p.display())))?;
            if let Some(r) = file.records.iter().find(|r| lexicon.get(&r.entry).is_none()) {
                return Err(Failure(format!("{}: unknown lexical entry `{}`", p.display(), r.entry)));
            }
            Some(file.activations())
        }
        None => None,
    };
    let cfg = args.knobs.apply(ParserConfig::default()).map_err(fail)?;
    let inputs = sentences(&args.input).map_err(fail)?;
    let n_best = usize::try_from(args.n_best).unwrap_or(usize::MAX);

    let results: Vec<SentenceJson> = inputs
        .par_iter()
        .map(|s| {
            let tokens: Vec<&str> = s.split_whitespace().collect();
            let report = run_parse(&tokens, &grammar, &lexicon, &cfg, activations.as_ref());
            SentenceJson::new(s, &report, n_best, args.trace)
        })
        .collect();

    let code = if results.iter().all(|r| r.status == Status::Parsed) { EXIT_OK } else { EXIT_NO_PARSE };
    let written = match args.format {
        Format::Json => {
            let doc = Document { config: &cfg, sentences: results };
            serde_json::to_writer_pretty(&mut *out, &doc).map_err(std::io::Error::from).and_then(|_| writeln!(out))
        }
        Format::Text => results.iter().try_for_each(|r| writeln!(out, "{}", r.to_text())),
    };
    written.map_err(|e| Failure(format!("cannot write output: {e}")))?;
    Ok(code)
}

fn run_demo_command(args: &DemoArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let cfg = args.knobs.apply(demo::config()).map_err(Failure)?;
    let outcomes = demo::run(&cfg).map_err(|e| Failure(e.to_string()))?;
    let written = match args.format {
        Format::Text => write!(out, "{}", demo::table(&outcomes, &cfg)),
        Format::Json => {
            #[derive(serde::Serialize)]
            struct DemoJson<'a> {
                config: &'a ParserConfig,
                sentences: &'a [demo::SentenceOutcome],
            }
            serde_json::to_writer_pretty(&mut *out, &DemoJson { config: &cfg, sentences: &outcomes })
                .map_err(std::io::Error::from)
                .and_then(|_| writeln!(out))
        }
    };
    written.map_err(|e| Failure(format!("cannot write output: {e}")))?;
    let parsed = outcomes.iter().all(|o| o.winner.is_some());
    Ok(if parsed { EXIT_OK } else { EXIT_NO_PARSE })
}

/// Runs the CLI on explicit arguments, writing results to `out` and
/// diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let result = match &cli.command {
        Command::Parse(a) => run_parse_command(a, out),
        Command::Demo(a) => run_demo_command(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
    }
}

pub fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    ExitCode::from(code)
}
