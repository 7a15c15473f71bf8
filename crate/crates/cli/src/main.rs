use std::io::{self, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::thread;

use clap::{Args, Parser, Subcommand, ValueEnum};

use exigraph_core::lang::parse_question;
use exigraph_core::qa::{self, repl, Flags, Session};
use exigraph_core::syllogistics::{closure, contradictions};

#[derive(Parser)]
#[command(name = "exigraph", version, about = "Three-valued question answering over an existence graph")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Interactive session.
    Repl {
        #[arg(long)]
        kb: Option<PathBuf>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Answer questions against a KB file.
    Ask {
        #[arg(required = true)]
        questions: Vec<String>,
        #[arg(long)]
        kb: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Run the closure and report contradictions.
    Check {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long, value_enum, default_value_t = Switch::Off)]
        existential_import: Switch,
    },
}

#[derive(Args)]
struct Opts {
    /// Print derivation traces.
    #[arg(long)]
    trace: bool,
    #[arg(long, value_enum, default_value_t = Switch::Off)]
    existential_import: Switch,
    /// Seed for choices among equally motivated alternatives.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

impl Opts {
    fn flags(&self) -> Flags {
        Flags { existential_import: self.existential_import == Switch::On, seed: self.seed, trace: self.trace }
    }
}

fn load(path: &PathBuf, flags: Flags) -> Result<Session, ExitCode> {
    Session::from_file(path, flags).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })
}

fn run_repl(kb: Option<PathBuf>, flags: Flags) -> Result<ExitCode, ExitCode> {
    let mut session = match kb {
        Some(path) => load(&path, flags)?,
        None => Session::new(flags),
    };
    let stdin = io::stdin();
    let prompt = stdin.is_terminal();
    let mut out = io::stdout().lock();
    let code = repl::run(&mut session, stdin.lock(), &mut out, prompt).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })?;
    Ok(ExitCode::from(code as u8))
}

fn run_ask(questions: &[String], kb: &PathBuf, flags: Flags) -> Result<ExitCode, ExitCode> {
    let session = load(kb, flags)?;
    let mut parsed = Vec::with_capacity(questions.len());
    for q in questions {
        match parse_question(q, session.lexicon()) {
            Ok(ast) => parsed.push(ast),
            Err(e) => {
                eprintln!("error: `{q}`: {e}");
                return Err(ExitCode::from(1));
            }
        }
    }
    let snapshot = session.kb();
    let answers: Vec<qa::Answer> = thread::scope(|scope| {
        let handles: Vec<_> = parsed
            .iter()
            .map(|q| {
                let kb = Arc::clone(&snapshot);
                scope.spawn(move || qa::answer(&kb, q, &flags))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("answer thread panicked")).collect()
    });
    let mut out = io::stdout().lock();
    for (q, a) in parsed.iter().zip(&answers) {
        if parsed.len() > 1 {
            let _ = writeln!(out, "{q}");
        }
        let _ = writeln!(out, "{}", a.render(flags.trace));
    }
    Ok(ExitCode::SUCCESS)
}

fn run_check(kb: &PathBuf, import: bool) -> Result<ExitCode, ExitCode> {
    let session = load(kb, Flags { existential_import: import, ..Flags::default() })?;
    let mut kb = (*session.kb()).clone();
    let derived = closure(&mut kb, import).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })?;
    let found = contradictions(&kb);
    for c in &found {
        let stored = kb.item(c.proposition).map(|i| qa::render_item(&kb, i)).unwrap_or_default();
        let against: Vec<String> =
            c.refutation.support.iter().filter_map(|&id| kb.item(id)).map(|i| qa::render_item(&kb, i)).collect();
        println!("contradiction: {stored} refuted by {}", against.join(" + "));
    }
    if found.is_empty() {
        println!("ok: {derived} propositions derived, no contradictions");
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(2))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Repl { kb, opts } => run_repl(kb, opts.flags()),
        Command::Ask { questions, kb, opts } => run_ask(&questions, &kb, opts.flags()),
        Command::Check { kb, existential_import } => run_check(&kb, existential_import == Switch::On),
    };
    result.unwrap_or_else(|code| code)
}
