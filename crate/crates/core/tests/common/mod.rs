#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tree_lstar::format::parse_automaton;
use tree_lstar::layer::enumerate_layers;
use tree_lstar::{Automaton, Context, FunctorSpec, Layer, Signature, Tree, TreeKind};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

pub fn fixture(name: &str) -> Automaton {
    parse_automaton(&std::fs::read_to_string(data(name)).unwrap()).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_table(rng: &mut impl Rng, sig: Signature, states: usize) -> Automaton {
    let all: Vec<usize> = (0..states).collect();
    let mut trans = BTreeMap::new();
    for layer in enumerate_layers(&sig.functor, &all, sig.layer_cap).unwrap() {
        trans.insert(layer, rng.gen_range(0..states));
    }
    let leaf_init = (0..sig.leaves.len())
        .map(|_| rng.gen_range(0..states))
        .collect();
    let output = (0..states)
        .map(|_| rng.gen_range(0..sig.outputs.len()))
        .collect();
    let names = (0..states).map(|i| format!("s{i}")).collect();
    Automaton::new(sig, names, leaf_init, trans, None, output).unwrap()
}

/// Random ranked tree automaton: ≤ `max_states` states, 1–3 symbols of
/// arity ≤ 2 (at least one of positive arity), 1–2 leaves.
pub fn random_tree_automaton(rng: &mut impl Rng, max_states: usize) -> Automaton {
    let n_symbols = rng.gen_range(1..=3);
    let names = ["f", "g", "h"];
    let mut symbols: Vec<(&str, usize)> = (0..n_symbols)
        .map(|i| (names[i], rng.gen_range(0..=2)))
        .collect();
    if symbols.iter().all(|s| s.1 == 0) {
        symbols[0].1 = rng.gen_range(1..=2);
    }
    let leaves = ["c", "d"][..rng.gen_range(1..=2)].to_vec();
    let sig = Signature::polynomial(symbols, leaves);
    let states = rng.gen_range(1..=max_states);
    random_table(rng, sig, states)
}

/// Random unordered tree automaton with `max_branch` in 1..=3.
pub fn random_powerset_automaton(rng: &mut impl Rng, max_states: usize) -> Automaton {
    let max_branch = rng.gen_range(1..=3);
    let leaves = ["c", "d"][..rng.gen_range(1..=2)].to_vec();
    let sig = Signature::powerset(Some(max_branch), leaves);
    let states = rng.gen_range(1..=max_states);
    random_table(rng, sig, states)
}

/// Random tree over `sig` of bounded height.
pub fn random_tree(rng: &mut impl Rng, sig: &Signature, height: usize) -> Tree {
    random_term(rng, sig, height, 0.0)
}

/// Random term where each leaf position becomes a hole with probability
/// `hole_prob`.
pub fn random_term(rng: &mut impl Rng, sig: &Signature, height: usize, hole_prob: f64) -> Tree {
    let stop = height == 0 || rng.gen_bool(0.3);
    if stop {
        if hole_prob > 0.0 && rng.gen_bool(hole_prob) {
            return Tree::hole();
        }
        return Tree::leaf(rng.gen_range(0..sig.leaves.len()));
    }
    match &sig.functor {
        FunctorSpec::Polynomial(alphabet) => {
            let s = rng.gen_range(0..alphabet.len());
            let children = (0..alphabet.arity(s))
                .map(|_| random_term(rng, sig, height - 1, hole_prob))
                .collect();
            Tree::sym(s, children)
        }
        FunctorSpec::FinitePowerset { max_branch } => {
            let k = rng.gen_range(0..=max_branch.unwrap_or(3));
            let children: Vec<Tree> = (0..k)
                .map(|_| random_term(rng, sig, height - 1, hole_prob))
                .collect();
            // keep within the bound after deduplication
            Tree::set(children)
        }
    }
}

/// Random context with at least one hole.
pub fn random_context(rng: &mut impl Rng, sig: &Signature, height: usize) -> Context {
    loop {
        let t = random_term(rng, sig, height, 0.4);
        if t.hole_count() > 0 {
            return Context::from_tree(t);
        }
    }
}

/// Prints a tree literal with set children shuffled and duplicated at every
/// level.
pub fn scrambled_literal(rng: &mut impl Rng, t: &Tree, sig: &Signature) -> String {
    match t.kind() {
        TreeKind::Leaf(x) => sig.leaves.name(*x).to_string(),
        TreeKind::Hole => "_".to_string(),
        TreeKind::Node(Layer::Sym { symbol, children }) => {
            let name = sig.functor.alphabet().unwrap().name(*symbol);
            if children.is_empty() {
                name.to_string()
            } else {
                let parts: Vec<String> = children
                    .iter()
                    .map(|c| scrambled_literal(rng, c, sig))
                    .collect();
                format!("{name}({})", parts.join(","))
            }
        }
        TreeKind::Node(Layer::Set(items)) => {
            let mut parts: Vec<String> = items
                .iter()
                .map(|c| scrambled_literal(rng, c, sig))
                .collect();
            let extra: Vec<String> = parts
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .cloned()
                .collect();
            parts.extend(extra);
            parts.shuffle(rng);
            format!("{{ {} }}", parts.join(" , "))
        }
    }
}

/// All trees (or terms with holes when `with_hole`) over `sig` of size at
/// most `max_size`, grouped by size. Independent of the library's
/// enumeration code.
pub fn trees_by_size(sig: &Signature, max_size: usize, with_hole: bool) -> Vec<Vec<Tree>> {
    let mut by_size: Vec<Vec<Tree>> = vec![Vec::new(); max_size + 1];
    if max_size == 0 {
        return by_size;
    }
    for x in 0..sig.leaves.len() {
        by_size[1].push(Tree::leaf(x));
    }
    if with_hole {
        by_size[1].push(Tree::hole());
    }
    for n in 1..=max_size {
        match &sig.functor {
            FunctorSpec::Polynomial(alphabet) => {
                for s in 0..alphabet.len() {
                    let k = alphabet.arity(s);
                    for split in compositions(n - 1, k) {
                        let mut acc: Vec<Vec<Tree>> = vec![vec![]];
                        for &part in &split {
                            let mut next = Vec::new();
                            for prefix in &acc {
                                for t in &by_size[part] {
                                    let mut p = prefix.clone();
                                    p.push(t.clone());
                                    next.push(p);
                                }
                            }
                            acc = next;
                        }
                        for children in acc {
                            by_size[n].push(Tree::sym(s, children));
                        }
                    }
                }
            }
            FunctorSpec::FinitePowerset { max_branch } => {
                let smaller: Vec<Tree> = by_size[..n].iter().flatten().cloned().collect();
                let bound = max_branch.unwrap_or(usize::MAX);
                let mut sets = Vec::new();
                distinct_subsets(&smaller, 0, n - 1, bound, &mut Vec::new(), &mut sets);
                for children in sets {
                    by_size[n].push(Tree::set(children));
                }
            }
        }
    }
    for level in &mut by_size {
        level.sort();
        level.dedup();
    }
    by_size
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn distinct_subsets(
    pool: &[Tree],
    start: usize,
    remaining: usize,
    bound: usize,
    current: &mut Vec<Tree>,
    out: &mut Vec<Vec<Tree>>,
) {
    if remaining == 0 {
        out.push(current.clone());
        return;
    }
    if current.len() == bound {
        return;
    }
    for i in start..pool.len() {
        let size = pool[i].size();
        if size <= remaining {
            current.push(pool[i].clone());
            distinct_subsets(pool, i + 1, remaining - size, bound, current, out);
            current.pop();
        }
    }
}

/// Number of language classes among reachable states, by brute force over
/// single-hole contexts up to `max_size`.
pub fn context_classes(aut: &Automaton, max_size: usize) -> usize {
    let reach = aut.reachable().unwrap();
    let contexts: Vec<Context> = trees_by_size(aut.signature(), max_size, true)
        .into_iter()
        .flatten()
        .filter(|t| t.hole_count() == 1)
        .map(Context::from_tree)
        .collect();
    let mut signatures: Vec<Vec<usize>> = reach
        .states
        .iter()
        .map(|&q| {
            contexts
                .iter()
                .map(|c| aut.eval_context(c, q).unwrap())
                .collect()
        })
        .collect();
    signatures.sort();
    signatures.dedup();
    signatures.len()
}

/// Smallest tree (by size, then order) on which two automata disagree,
/// searching up to `max_size`.
pub fn brute_force_witness(a: &Automaton, b: &Automaton, max_size: usize) -> Option<Tree> {
    trees_by_size(a.signature(), max_size, false)
        .into_iter()
        .flatten()
        .find(|t| a.language_of(t).unwrap() != b.language_of(t).unwrap())
}
