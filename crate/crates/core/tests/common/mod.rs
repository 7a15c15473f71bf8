//! Generators shared by the integration tests and the acceptance suite.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use exigraph_core::abduction::{DefeasibleRule, SpoTemplate, Var};
use exigraph_core::agency::{Slot, TriggerPattern};
use exigraph_core::lang::{QuestionAst, StatementAst};
use exigraph_core::syllogistics::Form;

pub const WORDS: &[&str] = &[
    "man", "mortal", "greek", "philosopher", "astronaut", "person", "pilot", "moon", "city", "dog", "animal",
    "american", "socrates", "plato", "rex", "athens", "blue", "old", "star", "river",
];
pub const VERB_HEADS: &[&str] = &["flew", "was", "lives", "walked", "loves", "sees", "sailed", "met"];
pub const PREPOSITIONS: &[&str] = &["to", "at", "in", "on", "with"];

pub fn word() -> impl Strategy<Value = String> {
    prop::sample::select(WORDS).prop_map(str::to_string)
}

pub fn noun_phrase() -> impl Strategy<Value = String> {
    prop::collection::vec(word(), 1..=3).prop_map(|w| w.join(" "))
}

/// A verb head plus zero to two prepositions.
pub fn verb_phrase() -> impl Strategy<Value = String> {
    (prop::sample::select(VERB_HEADS), prop::collection::vec(prop::sample::select(PREPOSITIONS), 0..=2))
        .prop_map(|(h, p)| std::iter::once(h).chain(p).collect::<Vec<_>>().join(" "))
}

fn has_preposition(verb: &str) -> bool {
    verb.contains(' ')
}

/// Subject, verb, object respecting the three-word rule for bare verbs.
pub fn spo_parts() -> impl Strategy<Value = (String, String, String)> {
    verb_phrase().prop_flat_map(|v| {
        if has_preposition(&v) {
            (noun_phrase(), Just(v), noun_phrase()).boxed()
        } else {
            (word(), Just(v), word()).boxed()
        }
    })
}

fn form() -> impl Strategy<Value = Form> {
    prop::sample::select(Form::ALL.to_vec())
}

fn var() -> impl Strategy<Value = Var> {
    prop::sample::select(vec![Var::X, Var::Y])
}

fn rule() -> impl Strategy<Value = DefeasibleRule> {
    (var(), verb_phrase(), var(), verb_phrase(), any::<bool>()).prop_map(|(a, v1, b, v2, swap)| {
        let premise = SpoTemplate::new(a, &v1, b);
        let (c, d) = if swap { (b, a) } else { (a, b) };
        DefeasibleRule::new(premise, SpoTemplate::new(c, &v2, d)).expect("conclusion vars come from premise")
    })
}

fn slot(term: BoxedStrategy<String>) -> impl Strategy<Value = Slot> {
    prop_oneof![1 => Just(Slot::Any), 2 => term.prop_map(Slot::Term)]
}

fn concrete(p: &TriggerPattern) -> bool {
    let c = |s: &Slot| matches!(s, Slot::Term(_));
    match p {
        TriggerPattern::Spo { subject, verb, object } => c(subject) || c(verb) || c(object),
        TriggerPattern::Membership { element, set } => c(element) || c(set),
    }
}

fn pattern() -> impl Strategy<Value = TriggerPattern> {
    let membership = (slot(noun_phrase().boxed()), slot(noun_phrase().boxed()))
        .prop_map(|(element, set)| TriggerPattern::Membership { element, set });
    let bare = (slot(word().boxed()), slot(prop::sample::select(VERB_HEADS).prop_map(str::to_string).boxed()), slot(word().boxed()))
        .prop_map(|(subject, verb, object)| TriggerPattern::Spo { subject, verb, object });
    let prepositional = (
        slot(noun_phrase().boxed()),
        (prop::sample::select(VERB_HEADS), prop::collection::vec(prop::sample::select(PREPOSITIONS), 1..=2)),
        slot(noun_phrase().boxed()),
    )
        .prop_map(|(subject, (h, p), object)| TriggerPattern::Spo {
            subject,
            verb: Slot::Term(std::iter::once(h).chain(p).collect::<Vec<_>>().join(" ")),
            object,
        });
    prop_oneof![membership, bare, prepositional].prop_filter("needs a concrete slot", concrete)
}

fn reaction() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(vec!["Answer", "greet", "{subject}", "{object}", "{verb}", "now", "Feed"]), 1..=4)
        .prop_map(|w| w.join(" "))
}

pub fn statement_ast() -> impl Strategy<Value = StatementAst> {
    prop_oneof![
        (noun_phrase(), noun_phrase()).prop_map(|(proper, set)| StatementAst::Membership { proper, set }),
        (form(), noun_phrase(), noun_phrase())
            .prop_map(|(form, subject, predicate)| StatementAst::Categorical { form, subject, predicate }),
        spo_parts().prop_map(|(subject, verb, object)| StatementAst::Spo { subject, verb, object }),
        rule().prop_map(StatementAst::Rule),
        (prop_oneof![noun_phrase(), verb_phrase()], prop_oneof![noun_phrase(), verb_phrase()])
            .prop_map(|(surface, canonical)| StatementAst::Lexicon { surface, canonical }),
        (pattern(), reaction()).prop_map(|(pattern, reaction)| StatementAst::Trigger { pattern, reaction }),
    ]
}

pub fn question_ast() -> impl Strategy<Value = QuestionAst> {
    prop_oneof![
        (noun_phrase(), noun_phrase()).prop_map(|(proper, set)| QuestionAst::IsA { proper, set }),
        (noun_phrase(), word()).prop_map(|(subject, predicate)| QuestionAst::AreAll { subject, predicate }),
        (noun_phrase(), word()).prop_map(|(subject, predicate)| QuestionAst::AreAny { subject, predicate }),
        spo_parts().prop_map(|(subject, verb, object)| QuestionAst::DidSpo { subject, verb, object }),
    ]
}

// ---------------------------------------------------------------------------
// Small-world knowledge bases, dense enough for inferences to interact
// ---------------------------------------------------------------------------

pub const KB_PROPERS: &[&str] = &["socrates", "plato", "rex"];
pub const KB_NOUNS: &[&str] = &["man", "mortal", "greek", "animal", "greek man"];
pub const KB_PREDICATES: &[&str] = &["man", "mortal", "greek", "animal"];
pub const KB_OBJECTS: &[&str] = &["athens", "moon"];
pub const KB_VERBS: &[&str] = &["flew to", "was at", "lives in"];

fn pick(xs: &'static [&'static str]) -> impl Strategy<Value = &'static str> {
    prop::sample::select(xs)
}

fn any_term() -> impl Strategy<Value = &'static str> {
    prop_oneof![pick(KB_PROPERS), pick(KB_NOUNS), pick(KB_OBJECTS)]
}

pub fn kb_line() -> impl Strategy<Value = String> {
    prop_oneof![
        3 => (pick(KB_PROPERS), pick(KB_NOUNS)).prop_map(|(p, n)| format!("{p} is a {n}.")),
        4 => (form(), pick(KB_NOUNS), pick(KB_NOUNS)).prop_filter("distinct terms", |(_, s, p)| s != p).prop_map(|(f, s, p)| {
            StatementAst::Categorical { form: f, subject: s.into(), predicate: p.into() }.to_string()
        }),
        3 => (prop_oneof![pick(KB_PROPERS), pick(KB_NOUNS)], pick(KB_VERBS), pick(KB_OBJECTS))
            .prop_map(|(s, v, o)| format!("{s} {v} {o}.")),
        1 => (pick(KB_VERBS), pick(KB_VERBS)).prop_map(|(a, b)| format!("rule: X {a} Y => X {b} Y.")),
        1 => Just("lexicon: greeks = greek.".to_string()),
    ]
}

pub fn kb_lines() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(kb_line(), 1..=12)
}

pub fn kb_question() -> impl Strategy<Value = String> {
    prop_oneof![
        (prop_oneof![pick(KB_PROPERS), pick(KB_NOUNS)], pick(KB_NOUNS)).prop_map(|(p, n)| format!("Is {p} a {n}?")),
        (pick(KB_NOUNS), pick(KB_PREDICATES))
            .prop_map(|(s, p)| format!("Are all {s} {p}?")),
        (pick(KB_NOUNS), pick(KB_PREDICATES))
            .prop_map(|(s, p)| format!("Are any {s} {p}?")),
        (any_term(), pick(KB_VERBS), pick(KB_OBJECTS)).prop_map(|(s, v, o)| format!("Did {s} {v} {o}?")),
    ]
}

/// Draws values from a strategy outside of `proptest!`, reproducibly.
pub struct Sampler {
    runner: TestRunner,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        let mut bytes = [0u8; 32];
        bytes[..8].copy_from_slice(&seed.to_le_bytes());
        let rng = TestRng::from_seed(RngAlgorithm::ChaCha, &bytes);
        Sampler { runner: TestRunner::new_with_rng(Config::default(), rng) }
    }

    pub fn draw<S: Strategy>(&mut self, s: &S) -> S::Value {
        s.new_tree(&mut self.runner).expect("strategy failed to generate").current()
    }
}
