use std::fs;
use std::io;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::agency::{AgencyError, Aim, MotivationRanking, Observation, Trigger};
use crate::kb::{Kb, KbError, Provenance, ProvenanceKind};
use crate::lang::{is_question, parse_question, parse_statement_raw, LangError, Lexicon, QuestionAst, StatementAst};
use crate::logic3::Value3;
use crate::syllogistics::closure;

use super::{answer, render_item, Answer, Flags};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error(transparent)]
    Agency(#[from] AgencyError),
}

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("line {line}: {source}")]
    Line { line: usize, source: SessionError },
    #[error("line {line}: questions cannot be stored in a knowledge base")]
    Question { line: usize },
    #[error("cannot save `{0}`: only asserted true items have a textual form")]
    Unrenderable(String),
}

/// Result of an accepted statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Accepted {
    pub revision: u64,
    pub aims: Vec<Aim>,
}

/// A dialogue: the KB, the lexicon and triggers it was built with, and the
/// statements that built it.
///
/// Statements are kept as parsed, before canonicalization. A new lexicon
/// entry rebuilds the KB from them, so earlier statements pick it up too.
#[derive(Debug, Clone)]
pub struct Session {
    kb: Arc<Kb>,
    lexicon: Lexicon,
    statements: Vec<StatementAst>,
    triggers: Vec<Trigger>,
    ranking: Option<MotivationRanking>,
    flags: Flags,
    revision: u64,
    history: Vec<String>,
}

fn apply(kb: &mut Kb, triggers: &mut Vec<Trigger>, ast: &StatementAst) -> Result<Option<Observation>, SessionError> {
    let observed = match ast {
        StatementAst::Membership { proper, set } => {
            let (x, s) = (kb.upsert_entity(proper)?, kb.upsert_entity(set)?);
            let id = kb.assert_membership(x, s, Value3::True, Provenance::asserted())?;
            Some(id)
        }
        StatementAst::Categorical { form, subject, predicate } => {
            if subject == predicate {
                return Err(KbError::TrivialProposition.into());
            }
            let (s, p) = (kb.upsert_entity(subject)?, kb.upsert_entity(predicate)?);
            let prop = crate::syllogistics::CategoricalProposition::new(*form, s, p);
            kb.assert_proposition(prop, Value3::True, Provenance::asserted())?;
            None
        }
        StatementAst::Spo { subject, verb, object } => {
            let (s, o) = (kb.upsert_entity(subject)?, kb.upsert_entity(object)?);
            Some(kb.assert_edge(s, verb, o, Value3::True, Provenance::asserted())?)
        }
        StatementAst::Rule(rule) => {
            kb.add_rule(rule.clone())?;
            None
        }
        StatementAst::Trigger { pattern, reaction } => {
            triggers.push(Trigger::new(triggers.len() + 1, pattern.clone(), reaction.clone())?);
            None
        }
        StatementAst::Lexicon { .. } => None,
    };
    Ok(observed.and_then(|id| kb.item(id)).and_then(|item| Observation::from_item(kb, item)))
}

fn rebuild(lexicon: &Lexicon, statements: &[StatementAst]) -> Result<(Kb, Vec<Trigger>), SessionError> {
    let mut kb = Kb::new();
    let mut triggers = Vec::new();
    for s in statements {
        apply(&mut kb, &mut triggers, &s.canonicalize(lexicon))?;
    }
    Ok((kb, triggers))
}

impl Session {
    pub fn new(flags: Flags) -> Self {
        Session {
            kb: Arc::new(Kb::new()),
            lexicon: Lexicon::new(),
            statements: Vec::new(),
            triggers: Vec::new(),
            ranking: None,
            flags,
            revision: 0,
            history: Vec::new(),
        }
    }

    pub fn from_file(path: impl AsRef<Path>, flags: Flags) -> Result<Self, PersistError> {
        let mut s = Session::new(flags);
        s.load(path)?;
        Ok(s)
    }

    /// A read-only snapshot; later statements do not affect it.
    pub fn kb(&self) -> Arc<Kb> {
        Arc::clone(&self.kb)
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn triggers(&self) -> &[Trigger] {
        &self.triggers
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    pub fn set_flags(&mut self, flags: Flags) {
        self.flags = flags;
    }

    pub fn ranking(&self) -> Option<&MotivationRanking> {
        self.ranking.as_ref()
    }

    pub fn set_ranking(&mut self, ranking: Option<MotivationRanking>) {
        self.ranking = ranking;
    }

    /// Number of statements accepted so far.
    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn history(&self) -> &[String] {
        &self.history
    }

    pub fn assert_line(&mut self, line: &str) -> Result<Accepted, SessionError> {
        let ast = parse_statement_raw(line)?;
        let accepted = self.assert(ast)?;
        self.history.push(line.to_string());
        Ok(accepted)
    }

    /// Adds a statement. On error the session is unchanged.
    pub fn assert(&mut self, ast: StatementAst) -> Result<Accepted, SessionError> {
        let mut aims = Vec::new();
        if let StatementAst::Lexicon { surface, canonical } = &ast {
            let mut lexicon = self.lexicon.clone();
            if lexicon.insert(surface, canonical).map_err(LangError::from)? {
                let (kb, triggers) = rebuild(&lexicon, &self.statements)?;
                self.kb = Arc::new(kb);
                self.triggers = triggers;
                self.lexicon = lexicon;
            }
        } else {
            // every failure in `apply` happens before its first write
            let canonical = ast.canonicalize(&self.lexicon);
            let observed = apply(Arc::make_mut(&mut self.kb), &mut self.triggers, &canonical)?;
            if let Some(o) = observed {
                aims = crate::agency::fire_triggers(&o, &self.triggers);
            }
            self.statements.push(ast);
        }
        self.revision += 1;
        Ok(Accepted { revision: self.revision, aims })
    }

    pub fn ask_line(&self, line: &str) -> Result<Answer, LangError> {
        let q = parse_question(line, &self.lexicon)?;
        Ok(self.ask(&q))
    }

    /// Answers a question that is already canonical.
    pub fn ask(&self, q: &QuestionAst) -> Answer {
        answer(&self.kb, q, &self.flags)
    }

    /// Runs the syllogistic closure on the session KB. Derived items last
    /// until the next lexicon change and are never saved.
    pub fn run_closure(&mut self) -> Result<usize, KbError> {
        closure(Arc::make_mut(&mut self.kb), self.flags.existential_import)
    }

    /// The KB as text: lexicon, rules, triggers, memberships, categorical
    /// propositions, relation edges; each group sorted. Only asserted items
    /// are written; everything else is recomputed on demand.
    pub fn save_string(&self) -> Result<String, PersistError> {
        let kb = &self.kb;
        let mut groups: Vec<Vec<String>> = Vec::new();
        groups.push(
            self.lexicon
                .entries()
                .map(|(s, c)| StatementAst::Lexicon { surface: s.into(), canonical: c.into() }.to_string())
                .collect(),
        );
        groups.push(kb.rules().map(|r| StatementAst::Rule(r.rule.clone()).to_string()).collect());
        groups.push(
            self.triggers
                .iter()
                .map(|t| StatementAst::Trigger { pattern: t.pattern.clone(), reaction: t.reaction.clone() }.to_string())
                .collect(),
        );
        let asserted = |item: crate::kb::Item<'_>| -> Result<Option<String>, PersistError> {
            if item.provenance().kind != ProvenanceKind::Asserted {
                return Ok(None);
            }
            let text = render_item(kb, item);
            if item.value() != Value3::True {
                return Err(PersistError::Unrenderable(text));
            }
            Ok(Some(text))
        };
        let mut collect = |items: Vec<crate::kb::Item<'_>>| -> Result<(), PersistError> {
            let mut g = Vec::new();
            for i in items {
                g.extend(asserted(i)?);
            }
            groups.push(g);
            Ok(())
        };
        collect(kb.memberships().map(crate::kb::Item::Membership).collect())?;
        collect(kb.propositions().map(crate::kb::Item::Proposition).collect())?;
        collect(kb.edges().map(crate::kb::Item::Edge).collect())?;
        let mut out = String::new();
        for mut g in groups {
            g.sort();
            for line in g {
                out.push_str(&line);
                out.push('\n');
            }
        }
        Ok(out)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<usize, PersistError> {
        let text = self.save_string()?;
        let path = path.as_ref();
        fs::write(path, &text).map_err(|source| PersistError::Io { path: path.display().to_string(), source })?;
        Ok(text.lines().count())
    }

    /// Adds every statement in `text`. Either all lines are accepted or the
    /// session is left as it was. Returns the new revision.
    pub fn load_str(&mut self, text: &str) -> Result<u64, PersistError> {
        let mut next = self.clone();
        for (i, line) in text.lines().enumerate() {
            let code = line.split('#').next().unwrap_or_default().trim();
            if code.is_empty() {
                continue;
            }
            if is_question(line) {
                return Err(PersistError::Question { line: i + 1 });
            }
            next.assert_line(line).map_err(|source| PersistError::Line { line: i + 1, source })?;
        }
        *self = next;
        Ok(self.revision)
    }

    pub fn load(&mut self, path: impl AsRef<Path>) -> Result<u64, PersistError> {
        let path = path.as_ref();
        let text =
            fs::read_to_string(path).map_err(|source| PersistError::Io { path: path.display().to_string(), source })?;
        self.load_str(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agency::Classification;

    #[test]
    fn revision_counts_statements() {
        let mut s = Session::new(Flags::default());
        assert_eq!(s.assert_line("Socrates is a man.").unwrap().revision, 1);
        assert!(s.assert_line("gibberish !!").is_err());
        assert_eq!(s.assert_line("All men are mortal.").unwrap().revision, 2);
        assert_eq!(s.revision(), 2);
    }

    #[test]
    fn lexicon_applies_retroactively() {
        let mut s = Session::new(Flags::default());
        s.assert_line("All men are mortal.").unwrap();
        s.assert_line("Socrates is a man.").unwrap();
        assert_eq!(s.ask_line("Is Socrates a mortal?").unwrap().headline(), "unknown");
        s.assert_line("lexicon: men = man.").unwrap();
        assert_eq!(s.ask_line("Is Socrates a mortal?").unwrap().headline(), "yes (proven)");
    }

    #[test]
    fn bad_lexicon_leaves_session_alone() {
        let mut s = Session::new(Flags::default());
        s.assert_line("All men are humans.").unwrap();
        let before = s.save_string().unwrap();
        assert!(s.assert_line("lexicon: men = humans.").is_err());
        assert_eq!(s.save_string().unwrap(), before);
        assert_eq!(s.revision(), 1);
    }

    #[test]
    fn triggers_fire_on_new_items() {
        let mut s = Session::new(Flags::default());
        s.assert_line("trigger: when * asked * then \"answer {object}\".").unwrap();
        let a = s.assert_line("User asked question.").unwrap();
        assert_eq!(a.aims.len(), 1);
        assert_eq!(a.aims[0].description, "answer question");
        assert_eq!(a.aims[0].classification, Classification::Undetermined);
        assert!(s.assert_line("Ball flies to boy.").unwrap().aims.is_empty());
    }

    #[test]
    fn save_order_and_round_trip() {
        let mut s = Session::new(Flags::default());
        let text = "Socrates lives in Athens.\nAll men are mortal.\nSocrates is a man.\n\
                    rule: X flew to Y => X was at Y.\nlexicon: men = man.\n\
                    trigger: when * is a man then \"greet {subject}\".\n";
        s.load_str(text).unwrap();
        let saved = s.save_string().unwrap();
        assert_eq!(
            saved,
            "lexicon: men = man.\nrule: X flew to Y => X was at Y.\n\
             trigger: when * is a man then \"greet {subject}\".\nSocrates is a man.\n\
             All man are mortal.\nSocrates lives in athens.\n"
        );
        let mut t = Session::new(Flags::default());
        t.load_str(&saved).unwrap();
        assert_eq!(t.save_string().unwrap(), saved);
    }

    #[test]
    fn load_is_atomic() {
        let mut s = Session::new(Flags::default());
        s.assert_line("Socrates is a man.").unwrap();
        let err = s.load_str("Plato is a man.\nAll men are mortal.\nthis is not valid at all\n").unwrap_err();
        assert!(matches!(err, PersistError::Line { line: 3, .. }), "{err}");
        assert!(err.to_string().starts_with("line 3:"));
        assert_eq!(s.revision(), 1);
        assert!(s.kb().find("plato").is_none());
        assert!(matches!(s.load_str("Is Socrates a man?"), Err(PersistError::Question { line: 1 })));
    }

    #[test]
    fn derived_items_are_not_saved() {
        let mut s = Session::new(Flags::default());
        s.load_str("All a1 are b1.\nAll b1 are c1.\n").unwrap();
        let before = s.save_string().unwrap();
        assert_eq!(s.run_closure().unwrap(), 1);
        assert_eq!(s.save_string().unwrap(), before);
    }
}
