//! Observation tables over trees and contexts.
//!
//! Row labels `S` form a subtree-closed set of trees, columns `E` are
//! contexts. The entry at `(t, e)` is the membership of `e` with `t` plugged
//! into every hole. Rows exist for labels in `S` (the top part), for leaves,
//! and for one-step extensions `F(S)` (the bottom part).

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use crate::automaton::{Automaton, Output};
use crate::error::{Error, Result};
use crate::layer::{enumerate_hole_layers, enumerate_layers, Layer, Slot};
use crate::signature::Signature;
use crate::syntax::{show_context, show_layer, show_tree};
use crate::teacher::Teacher;
use crate::tree::{Context, Tree};

/// Outputs indexed by the table's columns.
pub type Row = Vec<Output>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// The two labels have different outputs.
    Output,
    /// Plugging the labels into `layer` and reading `column` differs.
    Extension {
        layer: Layer<Slot<Tree>>,
        column: Context,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Defect {
    NotClosedLeaf(usize),
    NotClosedLayer(Layer<Tree>),
    NotConsistent {
        left: Tree,
        right: Tree,
        witness: Witness,
    },
}

impl Defect {
    pub fn is_closedness(&self) -> bool {
        !matches!(self, Defect::NotConsistent { .. })
    }
}

pub struct ObservationTable<'a, T: Teacher + ?Sized> {
    teacher: &'a T,
    sig: Signature,
    labels: BTreeSet<Tree>,
    columns: Vec<Context>,
    column_set: HashSet<Context>,
    rows: HashMap<Tree, Row>,
}

impl<'a, T: Teacher + ?Sized> ObservationTable<'a, T> {
    /// The initial table: no labels, the hole as the only column.
    pub fn new(teacher: &'a T) -> Self {
        Self::with_parts(teacher, [], [Context::hole()])
    }

    pub fn with_parts(
        teacher: &'a T,
        labels: impl IntoIterator<Item = Tree>,
        columns: impl IntoIterator<Item = Context>,
    ) -> Self {
        let mut table = ObservationTable {
            sig: teacher.signature().clone(),
            teacher,
            labels: BTreeSet::new(),
            columns: Vec::new(),
            column_set: HashSet::new(),
            rows: HashMap::new(),
        };
        for t in labels {
            table.add_counterexample(&t);
        }
        for c in columns {
            table.push_column(c);
        }
        table
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn teacher(&self) -> &'a T {
        self.teacher
    }

    pub fn with_layer_cap(mut self, cap: usize) -> Self {
        self.sig.layer_cap = cap;
        self
    }

    pub fn labels(&self) -> &BTreeSet<Tree> {
        &self.labels
    }

    pub fn columns(&self) -> &[Context] {
        &self.columns
    }

    pub fn has_hole_column(&self) -> bool {
        self.column_set.contains(&Context::hole())
    }

    fn push_column(&mut self, c: Context) -> bool {
        if self.column_set.insert(c.clone()) {
            self.columns.push(c);
            true
        } else {
            false
        }
    }

    /// Row of an arbitrary tree, extending the cached prefix with any
    /// columns added since.
    fn row_of(&mut self, t: &Tree) -> Result<Row> {
        let known = self.rows.get(t).map_or(0, Vec::len);
        if known < self.columns.len() {
            let mut fresh = Vec::with_capacity(self.columns.len() - known);
            for e in &self.columns[known..] {
                fresh.push(self.teacher.membership(&e.plug(t))?);
            }
            self.rows.entry(t.clone()).or_default().extend(fresh);
        }
        Ok(self.rows.get(t).cloned().unwrap_or_default())
    }

    /// Row of a label in `S`.
    pub fn row(&mut self, s: &Tree) -> Result<Row> {
        if !self.labels.contains(s) {
            return Err(Error::InvariantBreach(
                "row requested for a tree outside S".into(),
            ));
        }
        self.row_of(s)
    }

    pub fn leaf_row(&mut self, leaf: usize) -> Result<Row> {
        self.row_of(&Tree::leaf(leaf))
    }

    /// Row of the one-step extension `flatten(layer)` for a layer over `S`.
    pub fn succ_row(&mut self, layer: &Layer<Tree>) -> Result<Row> {
        self.row_of(&Tree::node(layer.clone()))
    }

    /// Membership of a label: the hole column when present, a direct query
    /// otherwise.
    fn output_of(&mut self, s: &Tree) -> Result<Output> {
        match self.columns.iter().position(|c| *c == Context::hole()) {
            Some(i) => Ok(self.row_of(s)?[i]),
            None => self.teacher.membership(s),
        }
    }

    fn label_vec(&self) -> Vec<Tree> {
        self.labels.iter().cloned().collect()
    }

    fn top_rows(&mut self) -> Result<HashSet<Row>> {
        let mut out = HashSet::new();
        for s in self.label_vec() {
            out.insert(self.row_of(&s)?);
        }
        Ok(out)
    }

    /// Labels grouped by row, classes numbered by first label in tree order.
    pub fn row_classes(&mut self) -> Result<Vec<(Tree, usize)>> {
        let mut ids: HashMap<Row, usize> = HashMap::new();
        let mut out = Vec::new();
        for s in self.label_vec() {
            let next = ids.len();
            let id = *ids.entry(self.row_of(&s)?).or_insert(next);
            out.push((s, id));
        }
        Ok(out)
    }

    pub fn distinct_rows(&mut self) -> Result<usize> {
        Ok(self.top_rows()?.len())
    }

    /// Leaves and layers over `S` whose rows are missing from the top part.
    pub fn check_closed(&mut self) -> Result<Vec<Defect>> {
        let top = self.top_rows()?;
        let mut defects = Vec::new();
        for x in 0..self.sig.leaves.len() {
            if !top.contains(&self.leaf_row(x)?) {
                defects.push(Defect::NotClosedLeaf(x));
            }
        }
        let labels = self.label_vec();
        for layer in enumerate_layers(&self.sig.functor, &labels, self.sig.layer_cap)? {
            if !top.contains(&self.succ_row(&layer)?) {
                defects.push(Defect::NotClosedLayer(layer));
            }
        }
        Ok(defects)
    }

    /// Pairs of labels with equal rows that some one-level context (or the
    /// output) tells apart. Within each row class only neighbours in tree
    /// order are compared; equality is transitive, so a class without
    /// neighbour defects is consistent.
    pub fn check_consistent(&mut self) -> Result<Vec<Defect>> {
        let classes = self.row_classes()?;
        let mut members: Vec<Vec<Tree>> = Vec::new();
        for (s, id) in classes {
            if id == members.len() {
                members.push(Vec::new());
            }
            members[id].push(s);
        }
        if members.iter().all(|m| m.len() < 2) {
            return Ok(Vec::new());
        }
        let labels = self.label_vec();
        let contexts = enumerate_hole_layers(&self.sig.functor, &labels, self.sig.layer_cap, true)?;
        let mut defects = Vec::new();
        for class in &members {
            for pair in class.windows(2) {
                let (left, right) = (&pair[0], &pair[1]);
                if let Some(witness) = self.distinguish(left, right, &contexts)? {
                    defects.push(Defect::NotConsistent {
                        left: left.clone(),
                        right: right.clone(),
                        witness,
                    });
                }
            }
        }
        Ok(defects)
    }

    fn distinguish(
        &mut self,
        left: &Tree,
        right: &Tree,
        contexts: &[Layer<Slot<Tree>>],
    ) -> Result<Option<Witness>> {
        if self.output_of(left)? != self.output_of(right)? {
            return Ok(Some(Witness::Output));
        }
        for x in contexts {
            let l = self.succ_row(&x.plug(left))?;
            let r = self.succ_row(&x.plug(right))?;
            if let Some(i) = (0..l.len()).find(|&i| l[i] != r[i]) {
                return Ok(Some(Witness::Extension {
                    layer: x.clone(),
                    column: self.columns[i].clone(),
                }));
            }
        }
        Ok(None)
    }

    /// Adds one label per missing row value. Returns the number added.
    pub fn fix_closed(&mut self, defects: &[Defect]) -> Result<usize> {
        let mut seen = self.top_rows()?;
        let mut added = 0;
        for d in defects {
            let candidate = match d {
                Defect::NotClosedLeaf(x) => Tree::leaf(*x),
                Defect::NotClosedLayer(layer) => Tree::node(layer.clone()),
                Defect::NotConsistent { .. } => continue,
            };
            debug_assert!(candidate.children().iter().all(|c| self.labels.contains(c)));
            if seen.insert(self.row_of(&candidate)?) {
                self.labels.insert(candidate);
                added += 1;
            }
        }
        Ok(added)
    }

    /// Adds the hole (if missing) and, for each extension witness, the
    /// column composed with the witnessing one-level context. Returns the
    /// number of columns added.
    pub fn fix_consistent(&mut self, defects: &[Defect]) -> Result<usize> {
        let mut added = 0;
        if self.push_column(Context::hole()) {
            added += 1;
        }
        for d in defects {
            match d {
                Defect::NotConsistent {
                    witness: Witness::Extension { layer, column },
                    ..
                } => {
                    if self.push_column(column.compose(&Context::from_layer(layer))) {
                        added += 1;
                    }
                }
                Defect::NotConsistent {
                    witness: Witness::Output,
                    ..
                } => {}
                _ => {}
            }
        }
        Ok(added)
    }

    /// Adds the subtree closure of `t` to `S`. Returns the number of new labels.
    pub fn add_counterexample(&mut self, t: &Tree) -> usize {
        let before = self.labels.len();
        self.labels.extend(t.subtree_closure());
        self.labels.len() - before
    }

    /// First label of each distinct row, in tree order.
    pub fn representatives(&mut self) -> Result<Vec<Tree>> {
        let mut reps = Vec::new();
        for (s, id) in self.row_classes()? {
            if id == reps.len() {
                reps.push(s);
            }
        }
        Ok(reps)
    }

    /// Hypothesis automaton on the distinct rows. With `audit`, every
    /// representative of every row is checked to induce the same outputs and
    /// transitions as the chosen one.
    pub fn build_hypothesis(&mut self, audit: bool) -> Result<Automaton> {
        if !self.check_closed()?.is_empty() || !self.check_consistent()?.is_empty() {
            return Err(Error::NotClosedOrConsistent);
        }
        let reps = self.representatives()?;
        let mut state_of: HashMap<Row, usize> = HashMap::new();
        for (i, r) in reps.iter().enumerate() {
            state_of.insert(self.row_of(r)?, i);
        }
        let lookup = |state_of: &HashMap<Row, usize>, row: &Row| {
            state_of
                .get(row)
                .copied()
                .ok_or(Error::NotClosedOrConsistent)
        };

        let mut leaf_init = Vec::new();
        for x in 0..self.sig.leaves.len() {
            leaf_init.push(lookup(&state_of, &self.leaf_row(x)?)?);
        }
        let mut output = Vec::new();
        for r in &reps {
            output.push(self.output_of(r)?);
        }
        let states: Vec<usize> = (0..reps.len()).collect();
        let mut trans = std::collections::BTreeMap::new();
        for layer in enumerate_layers(&self.sig.functor, &states, self.sig.layer_cap)? {
            let row = self.succ_row(&layer.map(|&i| reps[i].clone()))?;
            trans.insert(layer, lookup(&state_of, &row)?);
        }

        if audit {
            for s in self.label_vec() {
                let q = lookup(&state_of, &self.row_of(&s)?)?;
                if self.output_of(&s)? != output[q] {
                    return Err(Error::WellDefinednessBreach(format!(
                        "label {} and its representative have different outputs",
                        show_tree(&s, &self.sig)
                    )));
                }
            }
            let labels = self.label_vec();
            for layer in enumerate_layers(&self.sig.functor, &labels, self.sig.layer_cap)? {
                let target = lookup(&state_of, &self.succ_row(&layer)?)?;
                let mut abstract_layer = Vec::new();
                for c in layer.children() {
                    abstract_layer.push(lookup(&state_of, &self.row_of(c)?)?);
                }
                let abstract_layer = match &layer {
                    Layer::Sym { symbol, .. } => Layer::Sym {
                        symbol: *symbol,
                        children: abstract_layer,
                    },
                    Layer::Set(_) => Layer::set(abstract_layer),
                };
                if trans.get(&abstract_layer) != Some(&target) {
                    return Err(Error::WellDefinednessBreach(format!(
                        "extension {} disagrees with its representative",
                        show_layer(&layer, &self.sig, |t| show_tree(t, &self.sig))
                    )));
                }
            }
        }

        let names = (0..reps.len()).map(|i| format!("q{i}")).collect();
        Automaton::new(self.sig.clone(), names, leaf_init, trans, None, output)
    }

    /// Text dump: header of columns, one line per label, `---`, then one
    /// line per leaf and per layer over `S`.
    pub fn dump(&mut self) -> Result<String> {
        let sig = self.sig.clone();
        let mut out = String::from("E:");
        for (i, e) in self.columns.iter().enumerate() {
            out.push_str(if i == 0 { " " } else { " | " });
            out.push_str(&show_context(e, &sig));
        }
        out.push('\n');
        let show_row = |row: &Row| {
            row.iter()
                .map(|&o| sig.outputs.name(o))
                .collect::<Vec<_>>()
                .join(" ")
        };
        for s in self.label_vec() {
            let row = self.row_of(&s)?;
            let _ = writeln!(out, "{} : {}", show_tree(&s, &sig), show_row(&row));
        }
        out.push_str("---\n");
        for x in 0..sig.leaves.len() {
            let row = self.leaf_row(x)?;
            let _ = writeln!(out, "{} : {}", sig.leaves.name(x), show_row(&row));
        }
        let labels = self.label_vec();
        for layer in enumerate_layers(&sig.functor, &labels, sig.layer_cap)? {
            let row = self.succ_row(&layer)?;
            let _ = writeln!(
                out,
                "{} : {}",
                show_tree(&Tree::node(layer), &sig),
                show_row(&row)
            );
        }
        Ok(out)
    }
}
