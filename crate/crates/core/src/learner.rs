//! The learning loop: make the table closed and consistent, build a
//! hypothesis, ask for a counterexample, absorb it, repeat.

use serde::Serialize;

use crate::automaton::Automaton;
use crate::error::{Error, Result};
use crate::signature::Signature;
use crate::syntax::show_tree;
use crate::table::{Defect, ObservationTable};
use crate::teacher::{QueryStats, Teacher};
use crate::tree::Tree;

#[derive(Debug, Clone, Default)]
pub struct LearnConfig {
    /// Check well-definedness, progress and monotonicity while learning.
    pub audit: bool,
    /// Bound on fix and equivalence steps. Derived from the teacher's size
    /// hint when unset.
    pub max_iterations: Option<usize>,
    /// Overrides the signature's layer enumeration cap.
    pub layer_cap: Option<usize>,
    /// Keep a dump of every closed and consistent table.
    pub dump_tables: bool,
    /// Attach a table dump to every trace step.
    pub snapshots: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepKind {
    ClosednessFix { defects: usize, size_s: usize },
    ConsistencyFix { defects: usize, size_e: usize },
    Hypothesis { states: usize },
    Counterexample { tree: Tree, closure: usize },
    Done { states: usize },
}

impl StepKind {
    pub fn name(&self) -> &'static str {
        match self {
            StepKind::ClosednessFix { .. } => "closednessFix",
            StepKind::ConsistencyFix { .. } => "consistencyFix",
            StepKind::Hypothesis { .. } => "hypothesis",
            StepKind::Counterexample { .. } => "counterexample",
            StepKind::Done { .. } => "done",
        }
    }

    pub fn is_fix(&self) -> bool {
        matches!(
            self,
            StepKind::ClosednessFix { .. } | StepKind::ConsistencyFix { .. }
        )
    }
}

#[derive(Debug, Clone)]
pub struct TraceStep {
    pub kind: StepKind,
    pub size_s: usize,
    pub size_e: usize,
    pub distinct_rows: usize,
    /// Maximum number of holes among the columns.
    pub max_holes: usize,
    pub stats: QueryStats,
    /// Row class of each label, recorded in audit mode.
    pub row_classes: Option<Vec<(Tree, usize)>>,
    /// Table dump after the step, when snapshots are on.
    pub table: Option<String>,
}

/// One line of the JSON-lines stats stream.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StepRecord {
    pub step: usize,
    pub kind: &'static str,
    #[serde(rename = "sizeS")]
    pub size_s: usize,
    #[serde(rename = "sizeE")]
    pub size_e: usize,
    pub distinct_rows: usize,
    pub membership_raw: u64,
    pub membership_unique: u64,
    pub equivalence_count: u64,
}

#[derive(Debug, Clone, Default)]
pub struct LearnTrace {
    pub steps: Vec<TraceStep>,
}

impl LearnTrace {
    pub fn kinds(&self) -> Vec<&'static str> {
        self.steps.iter().map(|s| s.kind.name()).collect()
    }

    pub fn counterexamples(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s.kind, StepKind::Counterexample { .. }))
            .count()
    }

    pub fn records(&self) -> Vec<StepRecord> {
        self.steps
            .iter()
            .enumerate()
            .map(|(i, s)| StepRecord {
                step: i,
                kind: s.kind.name(),
                size_s: s.size_s,
                size_e: s.size_e,
                distinct_rows: s.distinct_rows,
                membership_raw: s.stats.membership_raw,
                membership_unique: s.stats.membership_unique,
                equivalence_count: s.stats.equivalence_count,
            })
            .collect()
    }

    pub fn to_json_lines(&self) -> String {
        self.records()
            .iter()
            .map(|r| serde_json::to_string(r).expect("plain record") + "\n")
            .collect()
    }

    /// Distinct-row counts never decrease.
    pub fn rows_monotone(&self) -> bool {
        self.steps
            .windows(2)
            .all(|w| w[0].distinct_rows <= w[1].distinct_rows)
    }

    /// Every counterexample is immediately followed by a fix step.
    pub fn counterexamples_make_progress(&self) -> bool {
        self.steps.iter().enumerate().all(|(i, s)| {
            !matches!(s.kind, StepKind::Counterexample { .. })
                || self.steps.get(i + 1).is_some_and(|n| n.kind.is_fix())
        })
    }

    /// Labels with different rows at some step never share a row later.
    /// Needs audit-mode row classes.
    pub fn separation_preserved(&self) -> bool {
        let snapshots: Vec<&Vec<(Tree, usize)>> = self
            .steps
            .iter()
            .filter_map(|s| s.row_classes.as_ref())
            .collect();
        snapshots.windows(2).all(|w| separation_kept(w[0], w[1]))
    }
}

fn separation_kept(before: &[(Tree, usize)], after: &[(Tree, usize)]) -> bool {
    let later: std::collections::HashMap<&Tree, usize> =
        after.iter().map(|(t, c)| (t, *c)).collect();
    for (i, (s, cs)) in before.iter().enumerate() {
        for (t, ct) in &before[i + 1..] {
            if cs != ct {
                match (later.get(s), later.get(t)) {
                    (Some(a), Some(b)) if a != b => {}
                    _ => return false,
                }
            }
        }
    }
    true
}

#[derive(Debug, Clone)]
pub struct LearnOutcome {
    pub automaton: Automaton,
    pub trace: LearnTrace,
    /// First row label of each hypothesis state, by state index.
    pub representatives: Vec<Tree>,
    /// Dumps of each closed and consistent table, when requested.
    pub tables: Vec<String>,
}

struct Session<'a, T: Teacher + ?Sized> {
    teacher: &'a T,
    config: &'a LearnConfig,
    trace: LearnTrace,
    tables: Vec<String>,
    budget: usize,
    spent: usize,
}

impl<'a, T: Teacher + ?Sized> Session<'a, T> {
    fn tick(&mut self) -> Result<()> {
        self.spent += 1;
        if self.spent > self.budget {
            return Err(Error::IterationBudgetExceeded(self.budget));
        }
        Ok(())
    }

    fn record(&mut self, table: &mut ObservationTable<'_, T>, kind: StepKind) -> Result<()> {
        let classes = table.row_classes()?;
        let distinct_rows = classes.iter().map(|(_, c)| c + 1).max().unwrap_or(0);
        let row_classes = self.config.audit.then_some(classes);
        if let (Some(prev), Some(now)) = (
            self.trace
                .steps
                .iter()
                .rev()
                .find_map(|s| s.row_classes.as_ref()),
            row_classes.as_ref(),
        ) {
            if !separation_kept(prev, now) {
                return Err(Error::InvariantBreach(
                    "labels separated earlier now share a row".into(),
                ));
            }
        }
        if self.config.audit {
            if let Some(prev) = self.trace.steps.last() {
                if prev.distinct_rows > distinct_rows {
                    return Err(Error::InvariantBreach(
                        "distinct row count decreased".into(),
                    ));
                }
            }
        }
        self.trace.steps.push(TraceStep {
            kind,
            size_s: table.labels().len(),
            size_e: table.columns().len(),
            distinct_rows,
            max_holes: table
                .columns()
                .iter()
                .map(|c| c.hole_count())
                .max()
                .unwrap_or(0),
            stats: self.teacher.stats(),
            row_classes,
            table: if self.config.snapshots {
                Some(table.dump()?)
            } else {
                None
            },
        });
        Ok(())
    }

    /// Fixes closedness first, then consistency, until both hold.
    fn fix(&mut self, table: &mut ObservationTable<'_, T>) -> Result<()> {
        loop {
            let closed = table.check_closed()?;
            if !closed.is_empty() {
                self.tick()?;
                if table.fix_closed(&closed)? == 0 {
                    return Err(Error::InvariantBreach(
                        "closedness fix added no label".into(),
                    ));
                }
                let size_s = table.labels().len();
                self.record(
                    table,
                    StepKind::ClosednessFix {
                        defects: closed.len(),
                        size_s,
                    },
                )?;
                continue;
            }
            let inconsistent = table.check_consistent()?;
            if !inconsistent.is_empty() {
                self.tick()?;
                let before = table.distinct_rows()?;
                table.fix_consistent(&inconsistent)?;
                if table.distinct_rows()? <= before {
                    return Err(Error::InvariantBreach(
                        "consistency fix separated no rows".into(),
                    ));
                }
                let size_e = table.columns().len();
                self.record(
                    table,
                    StepKind::ConsistencyFix {
                        defects: inconsistent.len(),
                        size_e,
                    },
                )?;
                continue;
            }
            if self.config.dump_tables {
                self.tables.push(table.dump()?);
            }
            return Ok(());
        }
    }
}

/// Runs the learner against `teacher` until an equivalence query succeeds.
pub fn learn<T: Teacher + ?Sized>(teacher: &T, config: &LearnConfig) -> Result<LearnOutcome> {
    teacher.signature().validate()?;
    let budget = config
        .max_iterations
        .unwrap_or_else(|| match teacher.size_hint() {
            Some(n) => 10 * n * n + 100,
            None => 10_000,
        });
    if budget == 0 {
        return Err(Error::IterationBudgetExceeded(0));
    }
    let mut session = Session {
        teacher,
        config,
        trace: LearnTrace::default(),
        tables: Vec::new(),
        budget,
        spent: 0,
    };
    let mut table = ObservationTable::new(teacher);
    if let Some(cap) = config.layer_cap {
        table = table.with_layer_cap(cap);
    }
    session.fix(&mut table)?;
    loop {
        let hypothesis = table.build_hypothesis(config.audit)?;
        let reach = hypothesis.reachable()?;
        if reach.states.len() != hypothesis.state_count() {
            return Err(Error::InvariantBreach(
                "hypothesis has unreachable states".into(),
            ));
        }
        session.record(
            &mut table,
            StepKind::Hypothesis {
                states: hypothesis.state_count(),
            },
        )?;
        session.tick()?;
        let Some(cex) = teacher.equivalence(&hypothesis)? else {
            session.record(
                &mut table,
                StepKind::Done {
                    states: hypothesis.state_count(),
                },
            )?;
            return Ok(LearnOutcome {
                automaton: hypothesis,
                representatives: table.representatives()?,
                trace: session.trace,
                tables: session.tables,
            });
        };
        check_counterexample(teacher, &hypothesis, &cex)?;
        table.add_counterexample(&cex);
        let closure = cex.subtree_closure().len();
        session.record(&mut table, StepKind::Counterexample { tree: cex, closure })?;
        if config.audit {
            let closed = table.check_closed()?;
            if closed.is_empty() && table.check_consistent()?.is_empty() {
                return Err(Error::InvariantBreach(
                    "counterexample left the table closed and consistent".into(),
                ));
            }
        }
        session.fix(&mut table)?;
    }
}

fn check_counterexample<T: Teacher + ?Sized>(
    teacher: &T,
    hypothesis: &Automaton,
    t: &Tree,
) -> Result<()> {
    let sig: &Signature = teacher.signature();
    t.check(sig, false)
        .map_err(|e| Error::Teacher(format!("malformed counterexample: {e}")))?;
    if teacher.membership(t)? == hypothesis.language_of(t)? {
        return Err(Error::Teacher(format!(
            "{} is not a counterexample",
            show_tree(t, sig)
        )));
    }
    Ok(())
}

/// Defects currently present in a table, closedness first.
pub fn defects<T: Teacher + ?Sized>(table: &mut ObservationTable<'_, T>) -> Result<Vec<Defect>> {
    let mut all = table.check_closed()?;
    all.extend(table.check_consistent()?);
    Ok(all)
}

/// Makes a table closed and consistent, returning the fix steps taken.
pub fn fix<T: Teacher + ?Sized>(
    table: &mut ObservationTable<'_, T>,
    config: &LearnConfig,
) -> Result<LearnTrace> {
    let mut session = Session {
        teacher: table.teacher(),
        config,
        trace: LearnTrace::default(),
        tables: Vec::new(),
        budget: config.max_iterations.unwrap_or(10_000),
        spent: 0,
    };
    session.fix(table)?;
    Ok(session.trace)
}
