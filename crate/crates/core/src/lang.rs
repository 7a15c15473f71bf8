//! Controlled-language front end.
//!
//! One construct per line, case-insensitive, `#` starts a comment:
//!
//! ```text
//! <Proper> is a <Noun>.
//! All <Noun> are <Noun>.        No <Noun> are <Noun>.
//! Some <Noun> are <Noun>.       Some <Noun> are not <Noun>.
//! <NounPhrase> <VerbPhrase> <NounPhrase>.
//! rule: X <VerbPhrase> Y => X <VerbPhrase> Y.
//! lexicon: <surface> = <canonical>.
//! trigger: when <pattern> then "<aim text>".
//!
//! Is <Proper> a <Noun>?
//! Are all <Noun> <Noun>?        Are any <Noun> <Noun>?
//! Did <NounPhrase> <VerbPhrase> <NounPhrase>?
//! Have <NounPhrase> <VerbPhrase> <NounPhrase>?
//! ```
//!
//! A verb phrase is one word followed by the prepositions directly after
//! it (`flew to`, `was at`). The word before the first preposition in a
//! clause is the verb head. Without any preposition a clause must be
//! exactly three words: subject, verb, object. Articles are dropped.
//!
//! In `Are all S P?` the predicate is the last word.
//!
//! Terms never contain reserved words (see [`is_reserved`]), which is what
//! makes `parse(render(ast)) == ast` hold.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::abduction::{DefeasibleRule, SpoTemplate, Var};
use crate::agency::{Slot, TriggerPattern};
use crate::syllogistics::Form;

const ARTICLES: [&str; 3] = ["a", "an", "the"];
const PREPOSITIONS: [&str; 5] = ["to", "at", "in", "on", "with"];
const KEYWORDS: [&str; 10] = ["is", "are", "all", "no", "some", "not", "did", "have", "when", "then"];
const PRONOUNS: [&str; 12] = ["i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us", "them"];
const ASPECTUAL: [&str; 9] =
    ["stopped", "started", "quit", "began", "begun", "kept", "continued", "finished", "ceased"];

pub const SUPPORTED_QUESTIONS: &str = "Is <proper> a <noun>? | Are all <noun> <noun>? | \
     Are any <noun> <noun>? | Did <subject> <verb phrase> <object>?";

fn is_article(w: &str) -> bool {
    ARTICLES.contains(&w)
}

fn is_preposition(w: &str) -> bool {
    PREPOSITIONS.contains(&w)
}

/// Words that may not appear inside a noun phrase.
pub fn is_reserved(word: &str) -> bool {
    is_article(word) || is_preposition(word) || KEYWORDS.contains(&word) || PRONOUNS.contains(&word)
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '-' | '\'' | '_')
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("`{surface}` already maps to `{existing}`, not `{attempted}`")]
    Conflict { surface: String, existing: String, attempted: String },
    #[error("`{surface}` = `{canonical}` would make the lexicon cyclic")]
    Cycle { surface: String, canonical: String },
    #[error("`{0}` is neither a noun phrase nor a verb phrase")]
    InvalidCanonical(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("parse error at byte {offset}: expected {}", .expected.join(" or "))]
    Parse { offset: usize, expected: Vec<&'static str> },
    #[error("unsupported question form at byte {offset}; supported: {SUPPORTED_QUESTIONS}")]
    UnsupportedForm { offset: usize },
    #[error("invalid {0}")]
    Invalid(String),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
}

impl LangError {
    pub fn offset(&self) -> Option<usize> {
        match self {
            LangError::Parse { offset, .. } | LangError::UnsupportedForm { offset } => Some(*offset),
            _ => None,
        }
    }
}

fn expected(offset: usize, what: &[&'static str]) -> LangError {
    LangError::Parse { offset, expected: what.to_vec() }
}

/// Surface form to canonical form, whole phrase at a time.
///
/// No canonical form is ever itself a surface form, so the mapping is
/// acyclic and applying it twice is the same as applying it once.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    map: BTreeMap<String, String>,
}

impl Lexicon {
    pub fn new() -> Self {
        Lexicon::default()
    }

    /// Adds an entry. Returns `false` if the identical entry was present.
    pub fn insert(&mut self, surface: &str, canonical: &str) -> Result<bool, LexiconError> {
        let cycle = || LexiconError::Cycle { surface: surface.to_string(), canonical: canonical.to_string() };
        if !is_noun_phrase(canonical) && !is_verb_phrase(canonical) {
            return Err(LexiconError::InvalidCanonical(canonical.to_string()));
        }
        if surface == canonical {
            return Err(cycle());
        }
        match self.map.get(surface) {
            Some(existing) if existing == canonical => return Ok(false),
            Some(existing) => {
                return Err(LexiconError::Conflict {
                    surface: surface.to_string(),
                    existing: existing.clone(),
                    attempted: canonical.to_string(),
                })
            }
            None => {}
        }
        if self.map.contains_key(canonical) || self.map.values().any(|v| v == surface) {
            return Err(cycle());
        }
        self.map.insert(surface.to_string(), canonical.to_string());
        Ok(true)
    }

    pub fn canonical<'a>(&'a self, phrase: &'a str) -> &'a str {
        self.map.get(phrase).map_or(phrase, String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

fn is_noun_phrase(s: &str) -> bool {
    !s.is_empty() && s.split(' ').all(|w| !w.is_empty() && !is_reserved(w))
}

fn is_verb_phrase(s: &str) -> bool {
    let words: Vec<&str> = s.split(' ').collect();
    match words.split_first() {
        Some((head, preps)) => {
            !head.is_empty() && !is_article(head) && !is_preposition(head) && preps.iter().all(|w| is_preposition(w))
        }
        None => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatementAst {
    Membership { proper: String, set: String },
    Categorical { form: Form, subject: String, predicate: String },
    Spo { subject: String, verb: String, object: String },
    Rule(DefeasibleRule),
    Lexicon { surface: String, canonical: String },
    Trigger { pattern: TriggerPattern, reaction: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuestionAst {
    IsA { proper: String, set: String },
    AreAll { subject: String, predicate: String },
    AreAny { subject: String, predicate: String },
    DidSpo { subject: String, verb: String, object: String },
}

fn canon(lex: &Lexicon, s: &str) -> String {
    lex.canonical(s).to_string()
}

fn canon_slot(lex: &Lexicon, s: &Slot) -> Slot {
    match s {
        Slot::Any => Slot::Any,
        Slot::Term(t) => Slot::Term(canon(lex, t)),
    }
}

impl StatementAst {
    /// Rewrites every term and verb phrase through the lexicon. Lexicon
    /// entries themselves are left alone.
    pub fn canonicalize(&self, lex: &Lexicon) -> StatementAst {
        match self {
            StatementAst::Membership { proper, set } => {
                StatementAst::Membership { proper: canon(lex, proper), set: canon(lex, set) }
            }
            StatementAst::Categorical { form, subject, predicate } => StatementAst::Categorical {
                form: *form,
                subject: canon(lex, subject),
                predicate: canon(lex, predicate),
            },
            StatementAst::Spo { subject, verb, object } => StatementAst::Spo {
                subject: canon(lex, subject),
                verb: canon(lex, verb),
                object: canon(lex, object),
            },
            StatementAst::Rule(r) => {
                let t = |t: &SpoTemplate| SpoTemplate::new(t.subject, lex.canonical(&t.verb), t.object);
                StatementAst::Rule(DefeasibleRule { premise: t(&r.premise), conclusion: t(&r.conclusion) })
            }
            StatementAst::Lexicon { .. } => self.clone(),
            StatementAst::Trigger { pattern, reaction } => {
                let pattern = match pattern {
                    TriggerPattern::Spo { subject, verb, object } => TriggerPattern::Spo {
                        subject: canon_slot(lex, subject),
                        verb: canon_slot(lex, verb),
                        object: canon_slot(lex, object),
                    },
                    TriggerPattern::Membership { element, set } => TriggerPattern::Membership {
                        element: canon_slot(lex, element),
                        set: canon_slot(lex, set),
                    },
                };
                StatementAst::Trigger { pattern, reaction: reaction.clone() }
            }
        }
    }
}

impl QuestionAst {
    pub fn canonicalize(&self, lex: &Lexicon) -> QuestionAst {
        match self {
            QuestionAst::IsA { proper, set } => QuestionAst::IsA { proper: canon(lex, proper), set: canon(lex, set) },
            QuestionAst::AreAll { subject, predicate } => {
                QuestionAst::AreAll { subject: canon(lex, subject), predicate: canon(lex, predicate) }
            }
            QuestionAst::AreAny { subject, predicate } => {
                QuestionAst::AreAny { subject: canon(lex, subject), predicate: canon(lex, predicate) }
            }
            QuestionAst::DidSpo { subject, verb, object } => QuestionAst::DidSpo {
                subject: canon(lex, subject),
                verb: canon(lex, verb),
                object: canon(lex, object),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Star,
    Dot,
    Question,
    Colon,
    Equals,
    Arrow,
    Quoted(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

#[derive(Debug, Clone, Copy)]
struct Word<'a> {
    text: &'a str,
    offset: usize,
}

/// Splits a line into tokens, remembering byte offsets. Returns the tokens
/// and the offset just past the last meaningful character.
fn tokenize(line: &str) -> Result<(Vec<Token>, usize), LangError> {
    let mut out = Vec::new();
    let mut chars = line.char_indices().peekable();
    let mut end = 0;
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c == '#' {
            break;
        }
        let single = match c {
            '.' => Some(Tok::Dot),
            '?' => Some(Tok::Question),
            ':' => Some(Tok::Colon),
            '*' => Some(Tok::Star),
            _ => None,
        };
        if let Some(tok) = single {
            chars.next();
            out.push(Token { tok, offset: i });
            end = i + c.len_utf8();
            continue;
        }
        if c == '=' {
            chars.next();
            if chars.peek().map(|&(_, c)| c) == Some('>') {
                chars.next();
                out.push(Token { tok: Tok::Arrow, offset: i });
                end = i + 2;
            } else {
                out.push(Token { tok: Tok::Equals, offset: i });
                end = i + 1;
            }
            continue;
        }
        if c == '"' {
            chars.next();
            let start = i + 1;
            let mut close = None;
            for (j, c) in chars.by_ref() {
                if c == '"' {
                    close = Some(j);
                    break;
                }
            }
            let Some(j) = close else { return Err(expected(line.len(), &["closing '\"'"])) };
            out.push(Token { tok: Tok::Quoted(line[start..j].to_string()), offset: i });
            end = j + 1;
            continue;
        }
        if is_word_char(c) {
            let mut j = i;
            while let Some(&(k, c)) = chars.peek() {
                if !is_word_char(c) {
                    break;
                }
                j = k + c.len_utf8();
                chars.next();
            }
            out.push(Token { tok: Tok::Word(line[i..j].to_lowercase()), offset: i });
            end = j;
            continue;
        }
        return Err(expected(i, &["word", "'.'", "'?'"]));
    }
    Ok((out, end))
}

fn words_of(tokens: &[Token]) -> Result<Vec<Word<'_>>, LangError> {
    tokens
        .iter()
        .map(|t| match &t.tok {
            Tok::Word(w) => Ok(Word { text: w, offset: t.offset }),
            _ => Err(expected(t.offset, &["word"])),
        })
        .collect()
}

fn drop_articles<'a>(ws: &[Word<'a>]) -> Vec<Word<'a>> {
    ws.iter().copied().filter(|w| !is_article(w.text)).collect()
}

/// A noun phrase from `ws`, articles dropped. `at` is where to point when
/// the phrase is empty.
fn noun_phrase(ws: &[Word<'_>], at: usize) -> Result<String, LangError> {
    let ws = drop_articles(ws);
    if ws.is_empty() {
        return Err(expected(at, &["noun"]));
    }
    if let Some(w) = ws.iter().find(|w| is_reserved(w.text)) {
        return Err(expected(w.offset, &["noun"]));
    }
    Ok(ws.iter().map(|w| w.text).collect::<Vec<_>>().join(" "))
}

fn any_phrase(ws: &[Word<'_>], at: usize) -> Result<String, LangError> {
    let ws = drop_articles(ws);
    if ws.is_empty() {
        return Err(expected(at, &["word"]));
    }
    Ok(ws.iter().map(|w| w.text).collect::<Vec<_>>().join(" "))
}

/// Splits an article-free clause into subject words, verb phrase and
/// object words.
fn split_clause<'a, 'b>(
    ws: &'b [Word<'a>],
    end: usize,
) -> Result<(&'b [Word<'a>], String, &'b [Word<'a>]), LangError> {
    match ws.iter().position(|w| is_preposition(w.text)) {
        Some(p) => {
            if p < 2 {
                let at = ws.get(p).map_or(end, |w| w.offset);
                return Err(expected(at, &[if p == 0 { "subject" } else { "verb" }]));
            }
            let head = ws[p - 1];
            let mut q = p;
            while q < ws.len() && is_preposition(ws[q].text) {
                q += 1;
            }
            if q == ws.len() {
                return Err(expected(end, &["object"]));
            }
            let verb = ws[p - 1..q].iter().map(|w| w.text).collect::<Vec<_>>().join(" ");
            debug_assert!(!is_preposition(head.text));
            Ok((&ws[..p - 1], verb, &ws[q..]))
        }
        None => match ws.len() {
            0 => Err(expected(end, &["subject"])),
            1 => Err(expected(end, &["verb"])),
            2 => Err(expected(end, &["object"])),
            3 => Ok((&ws[..1], ws[1].text.to_string(), &ws[2..])),
            _ => Err(expected(ws[3].offset, &["preposition", "'.'"])),
        },
    }
}

fn spo(ws: &[Word<'_>], end: usize) -> Result<(String, String, String), LangError> {
    let ws = drop_articles(ws);
    let (s, verb, o) = split_clause(&ws, end)?;
    let subject = noun_phrase(s, ws.first().map_or(end, |w| w.offset))?;
    let object = noun_phrase(o, end)?;
    Ok((subject, verb, object))
}

fn clause(ws: &[Word<'_>], end: usize) -> Result<StatementAst, LangError> {
    let first = ws[0];
    let form = match first.text {
        "all" => Some(Form::A),
        "no" => Some(Form::E),
        "some" => Some(Form::I),
        _ => None,
    };
    if let Some(mut form) = form {
        let Some(are) = ws.iter().position(|w| w.text == "are") else {
            return Err(expected(end, &["'are'"]));
        };
        let subject = noun_phrase(&ws[1..are], ws[are].offset)?;
        let mut rest = &ws[are + 1..];
        if form == Form::I && rest.first().is_some_and(|w| w.text == "not") {
            form = Form::O;
            rest = &rest[1..];
        }
        let predicate = noun_phrase(rest, end)?;
        return Ok(StatementAst::Categorical { form, subject, predicate });
    }
    if let Some(is) = ws.iter().position(|w| w.text == "is") {
        let next = ws[is + 1..].iter().find(|w| !is_article(w.text));
        if !next.is_some_and(|w| is_preposition(w.text)) {
            let at = ws.get(is + 1).map_or(end, |w| w.offset);
            let proper = noun_phrase(&ws[..is], ws[is].offset)?;
            let set = noun_phrase(&ws[is + 1..], at.min(end))?;
            return Ok(StatementAst::Membership { proper, set });
        }
    }
    let (subject, verb, object) = spo(ws, end)?;
    Ok(StatementAst::Spo { subject, verb, object })
}

fn variable(w: &Word<'_>) -> Result<Var, LangError> {
    match w.text {
        "x" => Ok(Var::X),
        "y" => Ok(Var::Y),
        _ => Err(expected(w.offset, &["'X'", "'Y'"])),
    }
}

fn template(ws: &[Word<'_>], end: usize) -> Result<SpoTemplate, LangError> {
    let ws = drop_articles(ws);
    let (s, verb, o) = split_clause(&ws, end)?;
    if s.len() != 1 {
        return Err(expected(s.get(1).map_or(end, |w| w.offset), &["verb"]));
    }
    if o.len() != 1 {
        return Err(expected(o.get(1).map_or(end, |w| w.offset), &["'=>'", "'.'"]));
    }
    Ok(SpoTemplate::new(variable(&s[0])?, &verb, variable(&o[0])?))
}

/// Pattern item: a word or a `*`.
#[derive(Debug, Clone, Copy)]
struct PatItem<'a> {
    word: Option<&'a str>,
    offset: usize,
}

fn slot(items: &[PatItem<'_>], at: usize) -> Result<Slot, LangError> {
    let items: Vec<PatItem<'_>> = items.iter().copied().filter(|i| !i.word.is_some_and(is_article)).collect();
    match items.as_slice() {
        [] => Err(expected(at, &["noun", "'*'"])),
        [PatItem { word: None, .. }] => Ok(Slot::Any),
        _ => {
            if let Some(star) = items.iter().find(|i| i.word.is_none()) {
                return Err(expected(star.offset, &["noun"]));
            }
            let ws: Vec<Word<'_>> =
                items.iter().map(|i| Word { text: i.word.unwrap_or_default(), offset: i.offset }).collect();
            Ok(Slot::Term(noun_phrase(&ws, at)?))
        }
    }
}

fn pattern(items: &[PatItem<'_>], end: usize) -> Result<TriggerPattern, LangError> {
    let items: Vec<PatItem<'_>> = items.iter().copied().filter(|i| !i.word.is_some_and(is_article)).collect();
    let is_prep = |i: &PatItem<'_>| i.word.is_some_and(is_preposition);
    if let Some(is) = items.iter().position(|i| i.word == Some("is")) {
        if !items.get(is + 1).is_some_and(is_prep) {
            let at = items.get(is + 1).map_or(end, |i| i.offset);
            return Ok(TriggerPattern::Membership {
                element: slot(&items[..is], items[is].offset)?,
                set: slot(&items[is + 1..], at)?,
            });
        }
    }
    match items.iter().position(is_prep) {
        Some(p) => {
            if p < 2 {
                return Err(expected(items[p].offset, &[if p == 0 { "subject" } else { "verb" }]));
            }
            let Some(head) = items[p - 1].word else { return Err(expected(items[p - 1].offset, &["verb"])) };
            let mut q = p;
            while q < items.len() && is_prep(&items[q]) {
                q += 1;
            }
            let mut verb = vec![head];
            verb.extend(items[p..q].iter().filter_map(|i| i.word));
            Ok(TriggerPattern::Spo {
                subject: slot(&items[..p - 1], items[0].offset)?,
                verb: Slot::Term(verb.join(" ")),
                object: slot(&items[q..], end)?,
            })
        }
        None if items.len() == 3 => {
            let verb = match items[1].word {
                None => Slot::Any,
                Some(w) if !is_reserved(w) || w == "is" => Slot::Term(w.to_string()),
                Some(_) => return Err(expected(items[1].offset, &["verb"])),
            };
            Ok(TriggerPattern::Spo {
                subject: slot(&items[..1], items[0].offset)?,
                verb,
                object: slot(&items[2..], end)?,
            })
        }
        None => Err(expected(items.get(3).map_or(end, |i| i.offset), &["preposition"])),
    }
}

fn directive(name: &str, tokens: &[Token], end: usize) -> Result<StatementAst, LangError> {
    match name {
        "lexicon" => {
            let Some(eq) = tokens.iter().position(|t| t.tok == Tok::Equals) else {
                return Err(expected(end, &["'='"]));
            };
            let lhs = words_of(&tokens[..eq])?;
            let rhs = words_of(&tokens[eq + 1..])?;
            let surface = any_phrase(&lhs, tokens[eq].offset)?;
            let canonical = any_phrase(&rhs, end)?;
            if !is_noun_phrase(&canonical) && !is_verb_phrase(&canonical) {
                return Err(LexiconError::InvalidCanonical(canonical).into());
            }
            Ok(StatementAst::Lexicon { surface, canonical })
        }
        "rule" => {
            let Some(arrow) = tokens.iter().position(|t| t.tok == Tok::Arrow) else {
                return Err(expected(end, &["'=>'"]));
            };
            let premise = template(&words_of(&tokens[..arrow])?, tokens[arrow].offset)?;
            let conclusion = template(&words_of(&tokens[arrow + 1..])?, end)?;
            DefeasibleRule::new(premise, conclusion)
                .map(StatementAst::Rule)
                .map_err(|e| LangError::Invalid(format!("rule: {e}")))
        }
        _ => {
            let Some(first) = tokens.first() else { return Err(expected(end, &["'when'"])) };
            if first.tok != Tok::Word("when".into()) {
                return Err(expected(first.offset, &["'when'"]));
            }
            let Some(then) = tokens.iter().position(|t| t.tok == Tok::Word("then".into())) else {
                return Err(expected(end, &["'then'"]));
            };
            let items = tokens[1..then]
                .iter()
                .map(|t| match &t.tok {
                    Tok::Word(w) => Ok(PatItem { word: Some(w.as_str()), offset: t.offset }),
                    Tok::Star => Ok(PatItem { word: None, offset: t.offset }),
                    _ => Err(expected(t.offset, &["word", "'*'"])),
                })
                .collect::<Result<Vec<_>, _>>()?;
            if items.is_empty() {
                return Err(expected(tokens[then].offset, &["pattern"]));
            }
            let pattern = pattern(&items, tokens[then].offset)?;
            let reaction = match tokens.get(then + 1) {
                Some(Token { tok: Tok::Quoted(s), .. }) => s.clone(),
                Some(t) => return Err(expected(t.offset, &["quoted aim"])),
                None => return Err(expected(end, &["quoted aim"])),
            };
            if let Some(t) = tokens.get(then + 2) {
                return Err(expected(t.offset, &["'.'"]));
            }
            if reaction.trim().is_empty() {
                return Err(LangError::Invalid("trigger: empty aim text".into()));
            }
            if crate::agency::Trigger::new(0, pattern.clone(), reaction.clone()).is_err() {
                return Err(LangError::Invalid("trigger: pattern needs a concrete slot".into()));
            }
            Ok(StatementAst::Trigger { pattern, reaction })
        }
    }
}

/// Parses a statement without applying any lexicon.
pub fn parse_statement_raw(line: &str) -> Result<StatementAst, LangError> {
    let (mut tokens, mut end) = tokenize(line)?;
    match tokens.last() {
        None => return Err(expected(end, &["statement"])),
        Some(&Token { tok: Tok::Dot, offset }) => {
            tokens.pop();
            end = offset;
        }
        Some(Token { tok: Tok::Question, offset }) => return Err(expected(*offset, &["'.'"])),
        Some(_) => {}
    }
    if tokens.is_empty() {
        return Err(expected(0, &["statement"]));
    }
    if let [Token { tok: Tok::Word(name), .. }, Token { tok: Tok::Colon, offset }, rest @ ..] = tokens.as_slice() {
        if matches!(name.as_str(), "rule" | "lexicon" | "trigger") {
            if rest.is_empty() {
                return Err(expected(offset + 1, &["word"]));
            }
            return directive(name, rest, end);
        }
    }
    let ws = words_of(&tokens)?;
    clause(&ws, end)
}

/// Parses a statement and canonicalizes its terms through `lex`.
pub fn parse_statement(line: &str, lex: &Lexicon) -> Result<StatementAst, LangError> {
    Ok(parse_statement_raw(line)?.canonicalize(lex))
}

/// Rejects pronoun subjects and aspectual verbs with a gerund, both of
/// which carry presuppositions the engine cannot check.
fn presupposition(ws: &[Word<'_>]) -> Option<usize> {
    if let Some(w) = ws.iter().find(|w| PRONOUNS.contains(&w.text)) {
        return Some(w.offset);
    }
    ws.windows(2)
        .find(|p| ASPECTUAL.contains(&p[0].text) && p[1].text.len() > 4 && p[1].text.ends_with("ing"))
        .map(|p| p[0].offset)
}

/// Parses a question without applying any lexicon.
pub fn parse_question_raw(line: &str) -> Result<QuestionAst, LangError> {
    let (mut tokens, mut end) = tokenize(line)?;
    match tokens.last() {
        Some(&Token { tok: Tok::Question, offset }) => {
            tokens.pop();
            end = offset;
        }
        _ => return Err(expected(end, &["'?'"])),
    }
    let ws = words_of(&tokens)?;
    let Some((first, rest)) = ws.split_first() else { return Err(expected(0, &["question word"])) };
    if let Some(offset) = presupposition(&ws) {
        return Err(LangError::UnsupportedForm { offset });
    }
    match first.text {
        "is" => {
            let lead = rest.iter().take_while(|w| is_article(w.text)).count();
            let body = &rest[lead..];
            let split = body.iter().position(|w| is_article(w.text));
            let (p, n) = match split {
                Some(i) => (&body[..i], &body[i + 1..]),
                None if body.len() == 2 => (&body[..1], &body[1..]),
                None => return Err(expected(body.get(1).map_or(end, |w| w.offset), &["'a'"])),
            };
            let at = body.get(split.unwrap_or(1)).map_or(end, |w| w.offset);
            Ok(QuestionAst::IsA { proper: noun_phrase(p, at)?, set: noun_phrase(n, end)? })
        }
        "are" => {
            let Some((q, rest)) = rest.split_first() else { return Err(expected(end, &["'all'", "'any'"])) };
            let any = match q.text {
                "all" => false,
                "any" => true,
                _ => return Err(expected(q.offset, &["'all'", "'any'"])),
            };
            let terms = drop_articles(rest);
            let Some((last, init)) = terms.split_last() else { return Err(expected(end, &["noun"])) };
            let subject = noun_phrase(init, last.offset)?;
            let predicate = noun_phrase(std::slice::from_ref(last), end)?;
            Ok(if any {
                QuestionAst::AreAny { subject, predicate }
            } else {
                QuestionAst::AreAll { subject, predicate }
            })
        }
        "did" | "have" => {
            let (subject, verb, object) = spo(rest, end)?;
            Ok(QuestionAst::DidSpo { subject, verb, object })
        }
        _ => Err(LangError::UnsupportedForm { offset: first.offset }),
    }
}

pub fn parse_question(line: &str, lex: &Lexicon) -> Result<QuestionAst, LangError> {
    Ok(parse_question_raw(line)?.canonicalize(lex))
}

/// True when the line, ignoring comments and whitespace, ends with `?`.
pub fn is_question(line: &str) -> bool {
    let code = line.split('#').next().unwrap_or_default();
    code.trim_end().ends_with('?')
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn article(noun: &str) -> &'static str {
    if noun.starts_with(['a', 'e', 'i', 'o', 'u']) {
        "an"
    } else {
        "a"
    }
}

impl fmt::Display for StatementAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatementAst::Membership { proper, set } => {
                write!(f, "{} is {} {set}.", capitalize(proper), article(set))
            }
            StatementAst::Categorical { form, subject, predicate } => {
                let text = match form {
                    Form::A => format!("all {subject} are {predicate}"),
                    Form::E => format!("no {subject} are {predicate}"),
                    Form::I => format!("some {subject} are {predicate}"),
                    Form::O => format!("some {subject} are not {predicate}"),
                };
                write!(f, "{}.", capitalize(&text))
            }
            StatementAst::Spo { subject, verb, object } => {
                write!(f, "{} {verb} {object}.", capitalize(subject))
            }
            StatementAst::Rule(r) => write!(f, "rule: {r}."),
            StatementAst::Lexicon { surface, canonical } => write!(f, "lexicon: {surface} = {canonical}."),
            StatementAst::Trigger { pattern, reaction } => {
                let p = match pattern {
                    TriggerPattern::Spo { subject, verb, object } => format!("{subject} {verb} {object}"),
                    TriggerPattern::Membership { element, set } => {
                        let art = match set {
                            Slot::Term(t) => article(t),
                            Slot::Any => "a",
                        };
                        format!("{element} is {art} {set}")
                    }
                };
                write!(f, "trigger: when {p} then \"{reaction}\".")
            }
        }
    }
}

impl fmt::Display for QuestionAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuestionAst::IsA { proper, set } => write!(f, "Is {proper} {} {set}?", article(set)),
            QuestionAst::AreAll { subject, predicate } => write!(f, "Are all {subject} {predicate}?"),
            QuestionAst::AreAny { subject, predicate } => write!(f, "Are any {subject} {predicate}?"),
            QuestionAst::DidSpo { subject, verb, object } => write!(f, "Did {subject} {verb} {object}?"),
        }
    }
}
