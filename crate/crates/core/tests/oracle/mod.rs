//! Brute-force oracles shared by the integration tests.
//!
//! Nothing in here calls into the library's inference code; each oracle
//! works from first principles (model enumeration, chain enumeration) so
//! it can be used to check the library independently.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

/// Categorical forms as plain characters: 'A', 'E', 'I', 'O'.
pub const FORMS: [char; 4] = ['A', 'E', 'I', 'O'];

/// Does the categorical form hold between two extensions (bitmasks)?
pub fn form_holds(form: char, subject: u32, predicate: u32) -> bool {
    match form {
        'A' => subject & !predicate == 0,
        'E' => subject & predicate == 0,
        'I' => subject & predicate != 0,
        'O' => subject & !predicate != 0,
        _ => unreachable!("bad form {form}"),
    }
}

/// Premise term pairs for a figure, as indices into `[S, M, P]`.
/// Returns `((major_subject, major_predicate), (minor_subject, minor_predicate))`.
pub fn figure_layout(figure: u8) -> ((usize, usize), (usize, usize)) {
    const S: usize = 0;
    const M: usize = 1;
    const P: usize = 2;
    match figure {
        1 => ((M, P), (S, M)),
        2 => ((P, M), (S, M)),
        3 => ((M, P), (M, S)),
        4 => ((P, M), (M, S)),
        _ => unreachable!("bad figure {figure}"),
    }
}

/// Searches for a countermodel of size `n` where the terms flagged in
/// `nonempty` (order S, M, P) must have at least one element.
pub fn countermodel(figure: u8, forms: [char; 3], n: u32, nonempty: [bool; 3]) -> Option<[u32; 3]> {
    let ((ma, mb), (na, nb)) = figure_layout(figure);
    let top = 1u32 << n;
    for s in 0..top {
        for m in 0..top {
            for p in 0..top {
                let ext = [s, m, p];
                if (0..3).any(|i| nonempty[i] && ext[i] == 0) {
                    continue;
                }
                let major = form_holds(forms[0], ext[ma], ext[mb]);
                let minor = form_holds(forms[1], ext[na], ext[nb]);
                let conclusion = form_holds(forms[2], s, p);
                if major && minor && !conclusion {
                    return Some(ext);
                }
            }
        }
    }
    None
}

/// Valid iff no countermodel exists over universes of size 0..=4.
pub fn mood_valid(figure: u8, forms: [char; 3], nonempty: [bool; 3]) -> bool {
    (0..=4).all(|n| countermodel(figure, forms, n, nonempty).is_none())
}

/// Smallest countermodel size, if any, over universes 0..=4.
pub fn smallest_countermodel(figure: u8, forms: [char; 3], nonempty: [bool; 3]) -> Option<u32> {
    (0..=4).find(|&n| countermodel(figure, forms, n, nonempty).is_some())
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OracleMood {
    pub figure: u8,
    pub forms: [char; 3],
    /// Index into `[S, M, P]` of the single term whose non-emptiness makes
    /// the mood valid; `None` for unconditionally valid moods.
    pub restricted: Option<usize>,
}

/// All 256 figure x form combinations.
pub fn all_combinations() -> Vec<(u8, [char; 3])> {
    let mut out = Vec::with_capacity(256);
    for figure in 1..=4u8 {
        for a in FORMS {
            for b in FORMS {
                for c in FORMS {
                    out.push((figure, [a, b, c]));
                }
            }
        }
    }
    out
}

/// The table of valid moods, computed by enumeration.
pub fn mood_table(existential_import: bool) -> Vec<OracleMood> {
    let mut out = Vec::new();
    for (figure, forms) in all_combinations() {
        if mood_valid(figure, forms, [false; 3]) {
            out.push(OracleMood { figure, forms, restricted: None });
        } else if existential_import && mood_valid(figure, forms, [true; 3]) {
            let single: Vec<usize> = (0..3)
                .filter(|&t| {
                    let mut ne = [false; 3];
                    ne[t] = true;
                    mood_valid(figure, forms, ne)
                })
                .collect();
            assert_eq!(single.len(), 1, "{figure} {forms:?}: restricted terms {single:?}");
            out.push(OracleMood { figure, forms, restricted: Some(single[0]) });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Existence chains
// ---------------------------------------------------------------------------

/// Three-valued scalar used by the chain oracle: 0 = false, 1 = unknown, 2 = true.
/// Conjunction is min, disjunction is max in the truth order.
pub type Tv = u8;
pub const TV_FALSE: Tv = 0;
pub const TV_UNKNOWN: Tv = 1;
pub const TV_TRUE: Tv = 2;

/// Enumerates every maximal membership chain starting at `start` and
/// returns `(chain values, terminal)` pairs. A chain stops when it reaches
/// `root` (terminal true), revisits a node (terminal unknown) or has no
/// outgoing membership (terminal unknown).
pub fn enumerate_chains(edges: &BTreeMap<(usize, usize), Tv>, start: usize, root: usize) -> Vec<(Vec<Tv>, Tv)> {
    let mut out = Vec::new();
    let mut path = vec![start];
    let mut values = Vec::new();
    walk(edges, root, &mut path, &mut values, &mut out);
    out
}

fn walk(
    edges: &BTreeMap<(usize, usize), Tv>,
    root: usize,
    path: &mut Vec<usize>,
    values: &mut Vec<Tv>,
    out: &mut Vec<(Vec<Tv>, Tv)>,
) {
    let here = *path.last().unwrap();
    if here == root {
        out.push((values.clone(), TV_TRUE));
        return;
    }
    if path[..path.len() - 1].contains(&here) {
        out.push((values.clone(), TV_UNKNOWN));
        return;
    }
    let next: Vec<(usize, Tv)> = edges
        .iter()
        .filter(|((from, _), _)| *from == here)
        .map(|((_, to), v)| (*to, *v))
        .collect();
    if next.is_empty() {
        out.push((values.clone(), TV_UNKNOWN));
        return;
    }
    for (to, v) in next {
        path.push(to);
        values.push(v);
        walk(edges, root, path, values, out);
        values.pop();
        path.pop();
    }
}

/// Folds enumerated chains into a degree: max over chains of min along chain.
pub fn chain_degree(edges: &BTreeMap<(usize, usize), Tv>, start: usize, root: usize) -> Tv {
    enumerate_chains(edges, start, root)
        .into_iter()
        .map(|(vals, terminal)| vals.into_iter().chain(std::iter::once(terminal)).min().unwrap())
        .max()
        .unwrap_or(TV_UNKNOWN)
}

/// Is `root` reachable from `start` along membership assertions?
pub fn reaches(edges: &BTreeMap<(usize, usize), Tv>, start: usize, root: usize) -> bool {
    let mut seen = BTreeSet::new();
    let mut stack = vec![start];
    while let Some(n) = stack.pop() {
        if n == root {
            return true;
        }
        if !seen.insert(n) {
            continue;
        }
        stack.extend(edges.keys().filter(|(f, _)| *f == n).map(|(_, t)| *t));
    }
    false
}

// ---------------------------------------------------------------------------
// Syllogistic semantics over named terms
// ---------------------------------------------------------------------------

/// A categorical premise or conclusion over term indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Prop {
    pub form: char,
    pub subject: usize,
    pub predicate: usize,
}

/// Membership of an individual (index) in a term, true or false.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Member {
    pub individual: usize,
    pub term: usize,
    pub value: bool,
}

/// Calls `visit` with every model: an extension per term over a universe of
/// size `n`, plus a placement of each individual into the universe.
pub fn for_each_model(terms: usize, individuals: usize, n: u32, mut visit: impl FnMut(&[u32], &[u32]) -> bool) {
    let top = 1u32 << n;
    let mut ext = vec![0u32; terms];
    let mut place = vec![0u32; individuals];
    loop {
        loop {
            if !visit(&ext, &place) {
                return;
            }
            // advance placement
            let mut i = 0;
            while i < individuals {
                place[i] += 1;
                if place[i] < n {
                    break;
                }
                place[i] = 0;
                i += 1;
            }
            if i == individuals || n == 0 {
                break;
            }
        }
        let mut j = 0;
        while j < terms {
            ext[j] += 1;
            if ext[j] < top {
                break;
            }
            ext[j] = 0;
            j += 1;
        }
        if j == terms {
            return;
        }
    }
}

/// True when every model (universe sizes 1..=max_n) satisfying the
/// premises and memberships also satisfies `goal`. When
/// `nonempty_terms` is set, every term in it must be non-empty.
pub fn entails(
    terms: usize,
    individuals: usize,
    premises: &[Prop],
    members: &[Member],
    nonempty_terms: &[usize],
    goal: &dyn Fn(&[u32], &[u32]) -> bool,
    max_n: u32,
) -> bool {
    let mut ok = true;
    for n in 1..=max_n {
        for_each_model(terms, individuals, n, |ext, place| {
            let sat = premises.iter().all(|p| form_holds(p.form, ext[p.subject], ext[p.predicate]))
                && members.iter().all(|m| ((ext[m.term] >> place[m.individual]) & 1 == 1) == m.value)
                && nonempty_terms.iter().all(|&t| ext[t] != 0);
            if sat && !goal(ext, place) {
                ok = false;
                return false;
            }
            true
        });
        if !ok {
            return false;
        }
    }
    true
}
