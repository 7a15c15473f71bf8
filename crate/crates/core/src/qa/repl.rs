//! Line-oriented dialogue over any reader and writer.

use std::io::{self, BufRead, Write};

use crate::abduction::abduce_membership;
use crate::agency::{choose, classify_aim, MotivationRanking};
use crate::lang::is_question;
use crate::logic3::Value3;

use super::{render_claim, Session};

pub const HELP: &str = "\
statements end with '.', questions with '?'
:load FILE              add the statements in FILE
:save FILE              write the KB to FILE
:closure                run the syllogistic closure
:abduce ENTITY          list membership hypotheses for ENTITY
:exists ENTITY          existence degree of ENTITY
:classify CLEAR RES     classify an aim (yes/no/unknown each)
:rank A, B, ...         set the motivation ranking (empty to clear)
:choose A, B, ...       choose among alternatives
:trace on|off           show derivation traces
:help                   this text
:quit                   leave";

fn list(arg: &str) -> Vec<String> {
    arg.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

/// Handles one command line. `None` means quit.
fn command<W: Write>(session: &mut Session, line: &str, out: &mut W) -> io::Result<Option<()>> {
    let (name, arg) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
    let arg = arg.trim();
    match name {
        ":quit" | ":q" => return Ok(None),
        ":help" => writeln!(out, "{HELP}")?,
        ":load" => match session.load(arg) {
            Ok(rev) => writeln!(out, "ok #{rev}")?,
            Err(e) => writeln!(out, "error: {e}")?,
        },
        ":save" => match session.save(arg) {
            Ok(n) => writeln!(out, "saved {n} lines")?,
            Err(e) => writeln!(out, "error: {e}")?,
        },
        ":closure" => match session.run_closure() {
            Ok(n) => writeln!(out, "closure: {n} propositions derived")?,
            Err(e) => writeln!(out, "error: {e}")?,
        },
        ":abduce" | ":exists" => {
            let kb = session.kb();
            let label = crate::kb::canonical_label(arg);
            let label = session.lexicon().canonical(&label).to_string();
            let Some(e) = kb.find(&label) else {
                writeln!(out, "error: unknown entity `{label}`")?;
                return Ok(Some(()));
            };
            if name == ":exists" {
                writeln!(out, "{}", kb.existence(e))?;
            } else {
                let hs = abduce_membership(&kb, e);
                if hs.is_empty() {
                    writeln!(out, "no hypotheses")?;
                }
                for h in hs {
                    writeln!(
                        out,
                        "hypothesis: {} (shared {}, members {})",
                        render_claim(&kb, &h.claim),
                        h.score.shared_properties,
                        h.score.supporting_members
                    )?;
                }
            }
        }
        ":classify" => {
            let parts: Vec<&str> = arg.split_whitespace().collect();
            match parts.as_slice() {
                [c, r] => match (c.parse::<Value3>(), r.parse::<Value3>()) {
                    (Ok(c), Ok(r)) => writeln!(out, "{}", classify_aim(c, r))?,
                    (Err(e), _) | (_, Err(e)) => writeln!(out, "error: {e}")?,
                },
                _ => writeln!(out, "error: usage :classify CLEAR RESOURCED")?,
            }
        }
        ":rank" => {
            let labels = list(arg);
            if labels.is_empty() {
                session.set_ranking(None);
                writeln!(out, "ranking cleared")?;
            } else {
                match MotivationRanking::new(labels) {
                    Ok(r) => {
                        session.set_ranking(Some(r));
                        writeln!(out, "ok")?;
                    }
                    Err(e) => writeln!(out, "error: {e}")?,
                }
            }
        }
        ":choose" => {
            let alts = list(arg);
            match choose(&alts, session.ranking(), session.flags().seed) {
                Ok(c) => writeln!(out, "{c}")?,
                Err(e) => writeln!(out, "error: {e}")?,
            }
        }
        ":trace" => {
            let mut flags = session.flags();
            match arg {
                "on" => flags.trace = true,
                "off" => flags.trace = false,
                _ => {
                    writeln!(out, "error: usage :trace on|off")?;
                    return Ok(Some(()));
                }
            }
            session.set_flags(flags);
            writeln!(out, "ok")?;
        }
        _ => writeln!(out, "error: unknown command `{name}`; try :help")?,
    }
    Ok(Some(()))
}

/// Evaluates one input line and writes the response.
pub fn eval_line<W: Write>(session: &mut Session, line: &str, out: &mut W) -> io::Result<bool> {
    let trimmed = line.trim();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(true);
    }
    if trimmed.starts_with(':') {
        return Ok(command(session, trimmed, out)?.is_some());
    }
    if is_question(trimmed) {
        match session.ask_line(trimmed) {
            Ok(a) => writeln!(out, "{}", a.render(session.flags().trace))?,
            Err(e) => writeln!(out, "error: {e}")?,
        }
    } else {
        match session.assert_line(trimmed) {
            Ok(acc) => {
                writeln!(out, "ok #{}", acc.revision)?;
                for aim in acc.aims {
                    writeln!(out, "aim: {} ({})", aim.description, aim.classification)?;
                }
            }
            Err(e) => writeln!(out, "error: {e}")?,
        }
    }
    Ok(true)
}

/// Reads lines until end of input or `:quit`. Prints `> ` before each
/// line when `prompt` is set. Returns the process exit code.
pub fn run<R: BufRead, W: Write>(session: &mut Session, input: R, out: &mut W, prompt: bool) -> io::Result<i32> {
    let mut lines = input.lines();
    loop {
        if prompt {
            write!(out, "> ")?;
            out.flush()?;
        }
        let Some(line) = lines.next() else { break };
        if !eval_line(session, &line?, out)? {
            break;
        }
        out.flush()?;
    }
    Ok(0)
}
