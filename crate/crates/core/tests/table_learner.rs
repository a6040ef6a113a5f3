mod common;

use std::collections::{BTreeSet, HashSet};

use rand::Rng;

use common::{
    fixture, random_context, random_powerset_automaton, random_tree, random_tree_automaton, rng,
};
use tree_lstar::learner::fix;
use tree_lstar::{
    learn, Automaton, AutomatonTeacher, CachingTeacher, Context, FunctorSpec, LearnConfig,
    ObservationTable, StepKind, Teacher, Tree,
};

/// Every tuple over `pool` of length `k`.
fn tuples(pool: &[Tree], k: usize) -> Vec<Vec<Tree>> {
    let mut acc = vec![Vec::new()];
    for _ in 0..k {
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                pool.iter().map(move |t| {
                    let mut p = prefix.clone();
                    p.push(t.clone());
                    p
                })
            })
            .collect();
    }
    acc
}

/// Leaves plus every one-level tree whose children are drawn from `pool`.
fn one_step_trees(aut: &Automaton, pool: &[Tree]) -> Vec<Tree> {
    let sig = aut.signature();
    let mut out: Vec<Tree> = (0..sig.leaves.len()).map(Tree::leaf).collect();
    match &sig.functor {
        FunctorSpec::Polynomial(alphabet) => {
            for s in 0..alphabet.len() {
                for children in tuples(pool, alphabet.arity(s)) {
                    out.push(Tree::sym(s, children));
                }
            }
        }
        FunctorSpec::FinitePowerset { max_branch } => {
            let bound = max_branch.unwrap_or(pool.len());
            for k in 0..=bound.min(pool.len()) {
                for children in tuples(pool, k) {
                    out.push(Tree::set(children));
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// One-level contexts with exactly one hole and all other children in `pool`.
fn one_hole_contexts(aut: &Automaton, pool: &[Tree]) -> Vec<Context> {
    let mut with_hole = pool.to_vec();
    with_hole.push(Tree::hole());
    let mut out: Vec<Context> = one_step_trees(aut, &with_hole)
        .into_iter()
        .filter(|t| t.hole_count() == 1)
        .map(Context::from_tree)
        .collect();
    out.dedup();
    out
}

fn direct_row(aut: &Automaton, columns: &[Context], t: &Tree) -> Vec<usize> {
    let q = aut.eval_tree(t).unwrap();
    columns
        .iter()
        .map(|e| aut.eval_context(e, q).unwrap())
        .collect()
}

fn random_automaton(r: &mut impl Rng, i: usize) -> Automaton {
    if i % 3 == 2 {
        random_powerset_automaton(r, 3)
    } else {
        random_tree_automaton(r, 4)
    }
}

fn random_labels(r: &mut impl Rng, aut: &Automaton) -> BTreeSet<Tree> {
    let mut labels = BTreeSet::new();
    for _ in 0..r.gen_range(1..=3) {
        labels.extend(random_tree(r, aut.signature(), 2).subtree_closure());
    }
    labels
}

fn random_columns(r: &mut impl Rng, aut: &Automaton) -> Vec<Context> {
    let mut columns = vec![Context::hole()];
    for _ in 0..r.gen_range(0..=2) {
        columns.push(random_context(r, aut.signature(), 2));
    }
    columns
}

#[test]
fn rows_match_direct_evaluation() {
    let mut r = rng(17);
    for i in 0..200 {
        let aut = random_automaton(&mut r, i);
        let teacher = AutomatonTeacher::new(aut.clone()).unwrap();
        let labels = random_labels(&mut r, &aut);
        let columns = random_columns(&mut r, &aut);
        let mut table = ObservationTable::with_parts(&teacher, labels.clone(), columns.clone());
        let columns = table.columns().to_vec();
        for s in &labels {
            assert_eq!(table.row(s).unwrap(), direct_row(&aut, &columns, s));
        }
        for x in 0..aut.signature().leaves.len() {
            assert_eq!(
                table.leaf_row(x).unwrap(),
                direct_row(&aut, &columns, &Tree::leaf(x))
            );
        }
    }
}

#[test]
fn closed_and_consistent_agree_with_brute_force() {
    let mut r = rng(29);
    let (mut open, mut inconsistent) = (0, 0);
    for i in 0..200 {
        let aut = random_automaton(&mut r, i);
        let teacher = AutomatonTeacher::new(aut.clone()).unwrap();
        let labels = random_labels(&mut r, &aut);
        let columns = random_columns(&mut r, &aut);
        let mut table = ObservationTable::with_parts(&teacher, labels.clone(), columns);
        let columns = table.columns().to_vec();
        let pool: Vec<Tree> = labels.iter().cloned().collect();

        let top: HashSet<Vec<usize>> = pool.iter().map(|s| direct_row(&aut, &columns, s)).collect();
        let closed = one_step_trees(&aut, &pool)
            .iter()
            .all(|t| top.contains(&direct_row(&aut, &columns, t)));
        assert_eq!(table.check_closed().unwrap().is_empty(), closed);

        let contexts = one_hole_contexts(&aut, &pool);
        let mut consistent = true;
        for (k, s) in pool.iter().enumerate() {
            for t in &pool[k + 1..] {
                if direct_row(&aut, &columns, s) != direct_row(&aut, &columns, t) {
                    continue;
                }
                for c in &contexts {
                    if direct_row(&aut, &columns, &c.plug(s))
                        != direct_row(&aut, &columns, &c.plug(t))
                    {
                        consistent = false;
                    }
                }
            }
        }
        assert_eq!(table.check_consistent().unwrap().is_empty(), consistent);
        open += usize::from(!closed);
        inconsistent += usize::from(!consistent);
    }
    assert!(
        open > 10 && inconsistent > 10,
        "open {open}, inconsistent {inconsistent}"
    );
}

#[test]
fn fixed_tables_yield_hypotheses() {
    let mut r = rng(41);
    for i in 0..60 {
        let aut = random_automaton(&mut r, i);
        let teacher = AutomatonTeacher::new(aut.clone()).unwrap();
        let labels = random_labels(&mut r, &aut);
        let columns = random_columns(&mut r, &aut);
        let mut table = ObservationTable::with_parts(&teacher, labels, columns);
        let trace = fix(
            &mut table,
            &LearnConfig {
                audit: true,
                ..LearnConfig::default()
            },
        )
        .unwrap();
        assert!(trace.steps.iter().all(|s| s.kind.is_fix()));
        assert!(trace.rows_monotone());
        assert!(table.check_closed().unwrap().is_empty());
        assert!(table.check_consistent().unwrap().is_empty());
        let h = table.build_hypothesis(true).unwrap();
        assert_eq!(h.state_count(), table.distinct_rows().unwrap());
        assert!(h.state_count() <= teacher.minimal_states());
        // the hypothesis agrees with the table on every label and column
        let columns = table.columns().to_vec();
        for s in table.labels().clone() {
            assert_eq!(direct_row(&h, &columns, &s), table.row(&s).unwrap());
        }
    }
}

#[test]
fn counterexamples_break_closed_consistent_tables() {
    let mut r = rng(43);
    let mut checked = 0;
    for i in 0..80 {
        let aut = random_automaton(&mut r, i);
        let teacher = AutomatonTeacher::new(aut.clone()).unwrap();
        let mut table = ObservationTable::new(&teacher);
        fix(&mut table, &LearnConfig::default()).unwrap();
        loop {
            let h = table.build_hypothesis(false).unwrap();
            let Some(cex) = teacher.equivalence(&h).unwrap() else {
                break;
            };
            assert_ne!(h.language_of(&cex).unwrap(), aut.language_of(&cex).unwrap());
            assert!(table.add_counterexample(&cex) > 0);
            let closed = table.check_closed().unwrap().is_empty();
            let consistent = table.check_consistent().unwrap().is_empty();
            assert!(!(closed && consistent));
            checked += 1;
            fix(&mut table, &LearnConfig::default()).unwrap();
        }
    }
    assert!(checked > 20);
}

#[test]
fn accept_all_needs_no_counterexample() {
    let teacher = CachingTeacher::new(AutomatonTeacher::new(fixture("accept-all.aut")).unwrap());
    let out = learn(
        &teacher,
        &LearnConfig {
            audit: true,
            ..LearnConfig::default()
        },
    )
    .unwrap();
    assert_eq!(out.automaton.state_count(), 1);
    assert_eq!(out.trace.counterexamples(), 0);
    assert_eq!(out.trace.kinds().last(), Some(&"done"));
    assert_eq!(teacher.stats().equivalence_count, 1);
}

#[test]
fn parity_learns_two_states() {
    let target = fixture("even-g.aut");
    let teacher = AutomatonTeacher::new(target.clone()).unwrap();
    let out = learn(
        &teacher,
        &LearnConfig {
            audit: true,
            ..LearnConfig::default()
        },
    )
    .unwrap();
    assert_eq!(out.automaton.state_count(), 2);
    assert_eq!(out.automaton.equivalent(&target).unwrap(), None);
    assert!(out
        .automaton
        .isomorphic(&target.minimize().unwrap())
        .unwrap());
    assert!(out.trace.counterexamples_make_progress());
    assert!(out.trace.separation_preserved());
}

#[test]
fn redundant_target_learns_minimal() {
    let target = fixture("even-g-redundant.aut");
    let teacher = AutomatonTeacher::new(target.clone()).unwrap();
    let out = learn(
        &teacher,
        &LearnConfig {
            audit: true,
            ..LearnConfig::default()
        },
    )
    .unwrap();
    assert_eq!(out.automaton.state_count(), 2);
    assert_eq!(out.representatives.len(), 2);
    for (q, rep) in out.representatives.iter().enumerate() {
        assert_eq!(out.automaton.eval_tree(rep).unwrap(), q);
    }
}

#[test]
fn budget_is_enforced() {
    let teacher = AutomatonTeacher::new(fixture("unary-ne1.aut")).unwrap();
    let config = LearnConfig {
        max_iterations: Some(2),
        ..LearnConfig::default()
    };
    assert_eq!(
        learn(&teacher, &config).unwrap_err(),
        tree_lstar::Error::IterationBudgetExceeded(2)
    );
}

#[test]
fn trace_sizes_track_table() {
    let teacher = AutomatonTeacher::new(fixture("unary-ne1.aut")).unwrap();
    let out = learn(&teacher, &LearnConfig::default()).unwrap();
    for w in out.trace.steps.windows(2) {
        assert!(w[0].size_s <= w[1].size_s);
        assert!(w[0].size_e <= w[1].size_e);
    }
    for s in &out.trace.steps {
        match &s.kind {
            StepKind::ClosednessFix { size_s, .. } => assert_eq!(*size_s, s.size_s),
            StepKind::ConsistencyFix { size_e, .. } => assert_eq!(*size_e, s.size_e),
            _ => {}
        }
        assert!(s.max_holes <= 1);
    }
}

struct Liar(AutomatonTeacher);

impl Teacher for Liar {
    fn signature(&self) -> &tree_lstar::Signature {
        self.0.signature()
    }

    fn membership(&self, t: &Tree) -> tree_lstar::Result<usize> {
        self.0.membership(t)
    }

    /// Always answers with the leaf, which every hypothesis gets right.
    fn equivalence(&self, _: &Automaton) -> tree_lstar::Result<Option<Tree>> {
        Ok(Some(Tree::leaf(0)))
    }
}

#[test]
fn invalid_counterexample_is_rejected() {
    let liar = Liar(AutomatonTeacher::new(fixture("unary-ne1.aut")).unwrap());
    assert!(matches!(
        learn(&liar, &LearnConfig::default()),
        Err(tree_lstar::Error::Teacher(_))
    ));
}

#[test]
fn caching_teacher_matches_direct_answers() {
    let mut r = rng(99);
    let aut = random_tree_automaton(&mut r, 5);
    let direct = AutomatonTeacher::new(aut.clone()).unwrap();
    let cached = CachingTeacher::new(AutomatonTeacher::new(aut.clone()).unwrap());
    let mut distinct = HashSet::new();
    for _ in 0..1000 {
        let t = random_tree(&mut r, aut.signature(), 3);
        assert_eq!(
            cached.membership(&t).unwrap(),
            direct.membership(&t).unwrap()
        );
        assert_eq!(cached.membership(&t).unwrap(), aut.language_of(&t).unwrap());
        distinct.insert(t);
    }
    let stats = cached.stats();
    assert_eq!(stats.membership_raw, 2000);
    assert_eq!(stats.membership_unique, distinct.len() as u64);
    assert_eq!(stats.equivalence_count, 0);
}
