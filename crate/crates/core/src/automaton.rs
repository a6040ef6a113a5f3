//! Deterministic bottom-up automata: `(Q, δ: FQ → Q, i: I → Q, o: Q → O)`.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::layer::{enumerate_hole_layers, enumerate_layers, Layer};
use crate::signature::{FunctorSpec, Signature};
use crate::syntax::show_layer;
use crate::tree::{Context, Tree, TreeKind};

/// State index into [`Automaton::states`].
pub type State = usize;
/// Output index into the signature's output set.
pub type Output = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    sig: Signature,
    states: Vec<String>,
    leaf_init: Vec<State>,
    trans: BTreeMap<Layer<State>, State>,
    default: Option<State>,
    output: Vec<Output>,
}

/// Reachable states in discovery order, with an access tree for each.
#[derive(Debug, Clone)]
pub struct Reachability {
    pub states: Vec<State>,
    access: Vec<Option<Tree>>,
}

impl Reachability {
    pub fn access_tree(&self, q: State) -> Option<&Tree> {
        self.access.get(q).and_then(Option::as_ref)
    }

    pub fn contains(&self, q: State) -> bool {
        self.access_tree(q).is_some()
    }
}

impl Automaton {
    /// Builds and validates an automaton. The transition table must cover
    /// every layer of `F(Q)` unless a default target is given.
    pub fn new(
        sig: Signature,
        states: Vec<String>,
        leaf_init: Vec<State>,
        trans: BTreeMap<Layer<State>, State>,
        default: Option<State>,
        output: Vec<Output>,
    ) -> Result<Automaton> {
        let aut = Automaton {
            sig,
            states,
            leaf_init,
            trans,
            default,
            output,
        };
        aut.validate()?;
        Ok(aut)
    }

    pub fn validate(&self) -> Result<()> {
        self.sig.validate()?;
        let n = self.states.len();
        let bad = |msg: String| Err(Error::InvalidAutomaton(msg));
        if n == 0 {
            return bad("no states".into());
        }
        let mut names: Vec<&String> = self.states.iter().collect();
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateName(w[0].clone()));
        }
        if self.leaf_init.len() != self.sig.leaves.len() {
            return bad(format!(
                "{} leaf initializations for {} leaves",
                self.leaf_init.len(),
                self.sig.leaves.len()
            ));
        }
        if let Some(q) = self.leaf_init.iter().find(|&&q| q >= n) {
            return bad(format!("leaf initialization refers to unknown state {q}"));
        }
        if self.output.len() != n {
            return bad(format!("{} outputs for {n} states", self.output.len()));
        }
        if self.output.iter().any(|&o| o >= self.sig.outputs.len()) {
            return bad("output value out of range".into());
        }
        if self.default.is_some_and(|q| q >= n) {
            return bad("default refers to an unknown state".into());
        }
        for (layer, &target) in &self.trans {
            if target >= n || layer.children().iter().any(|&q| q >= n) {
                return bad(format!(
                    "transition {} refers to an unknown state",
                    self.show_layer(layer)
                ));
            }
            self.check_layer(layer)?;
        }
        if self.default.is_none() {
            let all: Vec<State> = (0..n).collect();
            for layer in enumerate_layers(&self.sig.functor, &all, self.sig.layer_cap)? {
                if !self.trans.contains_key(&layer) {
                    return Err(Error::MissingTransition(self.show_layer(&layer)));
                }
            }
        }
        Ok(())
    }

    fn check_layer(&self, layer: &Layer<State>) -> Result<()> {
        let ok = match (&self.sig.functor, layer) {
            (FunctorSpec::Polynomial(a), Layer::Sym { symbol, children }) => {
                *symbol < a.len() && a.arity(*symbol) == children.len()
            }
            (FunctorSpec::FinitePowerset { max_branch }, Layer::Set(items)) => {
                layer.is_canonical() && max_branch.is_none_or(|m| items.len() <= m)
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidAutomaton(format!(
                "transition source {:?} does not fit the functor",
                layer
            )))
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, q: State) -> &str {
        &self.states[q]
    }

    pub fn leaf_init(&self, leaf: usize) -> State {
        self.leaf_init[leaf]
    }

    pub fn output(&self, q: State) -> Output {
        self.output[q]
    }

    pub fn transitions(&self) -> &BTreeMap<Layer<State>, State> {
        &self.trans
    }

    pub fn default_target(&self) -> Option<State> {
        self.default
    }

    pub fn show_layer(&self, layer: &Layer<State>) -> String {
        show_layer(layer, &self.sig, |&q| {
            self.states
                .get(q)
                .cloned()
                .unwrap_or_else(|| format!("#{q}"))
        })
    }

    /// `δ` on one layer.
    pub fn step(&self, layer: &Layer<State>) -> Result<State> {
        self.trans
            .get(layer)
            .copied()
            .or(self.default)
            .ok_or_else(|| Error::MissingTransition(self.show_layer(layer)))
    }

    /// The reachability map `i♯`, by structural recursion.
    pub fn eval_tree(&self, t: &Tree) -> Result<State> {
        self.eval_with_hole(t, None, &mut HashMap::new())
    }

    fn eval_with_hole(
        &self,
        t: &Tree,
        hole: Option<State>,
        memo: &mut HashMap<Tree, State>,
    ) -> Result<State> {
        match t.kind() {
            TreeKind::Leaf(x) => self
                .leaf_init
                .get(*x)
                .copied()
                .ok_or_else(|| Error::MalformedTerm(format!("unknown leaf index {x}"))),
            TreeKind::Hole => hole.ok_or_else(|| Error::MalformedTerm("hole in a tree".into())),
            TreeKind::Node(layer) => {
                if let Some(&q) = memo.get(t) {
                    return Ok(q);
                }
                let inner = layer.try_map(|c| self.eval_with_hole(c, hole, memo))?;
                let q = self.step(&inner)?;
                memo.insert(t.clone(), q);
                Ok(q)
            }
        }
    }

    /// The language: output of the state a tree evaluates to.
    pub fn language_of(&self, t: &Tree) -> Result<Output> {
        Ok(self.output[self.eval_tree(t)?])
    }

    /// Output of a context with every hole read as state `q`.
    pub fn eval_context(&self, c: &Context, q: State) -> Result<Output> {
        let s = self.eval_with_hole(c.tree(), Some(q), &mut HashMap::new())?;
        Ok(self.output[s])
    }

    /// Least fixpoint of leaf initializations under `δ`.
    pub fn reachable(&self) -> Result<Reachability> {
        let mut access: Vec<Option<Tree>> = vec![None; self.states.len()];
        let mut order = Vec::new();
        for (x, &q) in self.leaf_init.iter().enumerate() {
            if access[q].is_none() {
                access[q] = Some(Tree::leaf(x));
                order.push(q);
            }
        }
        loop {
            let before = order.len();
            let mut carrier = order.clone();
            carrier.sort_unstable();
            for layer in enumerate_layers(&self.sig.functor, &carrier, self.sig.layer_cap)? {
                let q = self.step(&layer)?;
                if access[q].is_none() {
                    access[q] = Some(Tree::node(
                        layer.map(|&p| access[p].clone().expect("reached")),
                    ));
                    order.push(q);
                }
            }
            if order.len() == before {
                break;
            }
        }
        Ok(Reachability {
            states: order,
            access,
        })
    }

    /// Reachable part quotiented by language equivalence, computed by Moore
    /// partition refinement. Blocks split when plugging two states into some
    /// one-level context lands in different blocks.
    pub fn minimize(&self) -> Result<Automaton> {
        let reach = self.reachable()?;
        let mut states = reach.states.clone();
        states.sort_unstable();
        let contexts = enumerate_hole_layers(&self.sig.functor, &states, self.sig.layer_cap, true)?;

        let mut block: Vec<usize> = vec![usize::MAX; self.states.len()];
        let mut count = relabel(&reach.states, &mut block, |q| vec![self.output[q]]);
        loop {
            let current = block.clone();
            let signature = |q: State| -> Result<Vec<usize>> {
                let mut sig = Vec::with_capacity(contexts.len() + 1);
                sig.push(current[q]);
                for x in &contexts {
                    sig.push(current[self.step(&x.plug(&q))?]);
                }
                Ok(sig)
            };
            let mut sigs = HashMap::new();
            for &q in &reach.states {
                sigs.insert(q, signature(q)?);
            }
            let next = relabel(&reach.states, &mut block, |q| sigs[&q].clone());
            if next == count {
                break;
            }
            count = next;
        }

        // blocks are numbered by first member in discovery order
        let mut reps: Vec<State> = vec![usize::MAX; count];
        for &q in &reach.states {
            if reps[block[q]] == usize::MAX {
                reps[block[q]] = q;
            }
        }
        let names = reps.iter().map(|&q| self.states[q].clone()).collect();
        let leaf_init = self.leaf_init.iter().map(|&q| block[q]).collect();
        let output = reps.iter().map(|&q| self.output[q]).collect();
        let blocks: Vec<usize> = (0..count).collect();
        let mut trans = BTreeMap::new();
        for layer in enumerate_layers(&self.sig.functor, &blocks, self.sig.layer_cap)? {
            let target = self.step(&layer.map(|&b| reps[b]))?;
            trans.insert(layer, block[target]);
        }
        Automaton::new(self.sig.clone(), names, leaf_init, trans, None, output)
    }

    /// Language equivalence. On a difference, returns the smallest tree (by
    /// size, then tree order) on which the two automata disagree.
    pub fn equivalent(&self, other: &Automaton) -> Result<Option<Tree>> {
        if self.sig != other.sig {
            return Err(Error::SignatureMismatch(
                "automata are over different signatures".into(),
            ));
        }
        let best = self.product_witnesses(other)?;
        Ok(best
            .into_iter()
            .filter(|((p, q), _)| self.output[*p] != other.output[*q])
            .map(|(_, t)| t)
            .min())
    }

    /// Smallest tree reaching each reachable pair of the product.
    fn product_witnesses(&self, other: &Automaton) -> Result<HashMap<(State, State), Tree>> {
        let mut best: HashMap<(State, State), Tree> = HashMap::new();
        for x in 0..self.sig.leaves.len() {
            let pair = (self.leaf_init[x], other.leaf_init[x]);
            let t = Tree::leaf(x);
            match best.get(&pair) {
                Some(old) if *old <= t => {}
                _ => {
                    best.insert(pair, t);
                }
            }
        }
        loop {
            let mut pairs: Vec<(State, State)> = best.keys().copied().collect();
            pairs.sort_unstable();
            let mut changed = false;
            for layer in enumerate_layers(&self.sig.functor, &pairs, self.sig.layer_cap)? {
                let target = (
                    self.step(&layer.map(|p| p.0))?,
                    other.step(&layer.map(|p| p.1))?,
                );
                let size = 1 + layer
                    .children()
                    .iter()
                    .map(|p| best[p].size())
                    .sum::<usize>();
                if best.get(&target).is_some_and(|old| old.size() < size) {
                    continue;
                }
                let candidate = Tree::node(layer.map(|p| best[p].clone()));
                if best.get(&target).is_none_or(|old| candidate < *old) {
                    best.insert(target, candidate);
                    changed = true;
                }
            }
            if !changed {
                return Ok(best);
            }
        }
    }

    /// Whether two reachable automata are equal up to renaming of states.
    pub fn isomorphic(&self, other: &Automaton) -> Result<bool> {
        if self.sig != other.sig || self.state_count() != other.state_count() {
            return Ok(false);
        }
        let reach = self.reachable()?;
        if reach.states.len() != self.state_count()
            || other.reachable()?.states.len() != other.state_count()
        {
            return Err(Error::InvalidAutomaton(
                "isomorphism check needs reachable automata".into(),
            ));
        }
        let mut phi = vec![0; self.state_count()];
        let mut hit = vec![false; other.state_count()];
        for &q in &reach.states {
            let image = other.eval_tree(reach.access_tree(q).expect("reachable"))?;
            if hit[image] {
                return Ok(false);
            }
            hit[image] = true;
            phi[q] = image;
            if self.output[q] != other.output[image] {
                return Ok(false);
            }
        }
        if (0..self.sig.leaves.len()).any(|x| phi[self.leaf_init[x]] != other.leaf_init[x]) {
            return Ok(false);
        }
        let all: Vec<State> = (0..self.state_count()).collect();
        for layer in enumerate_layers(&self.sig.functor, &all, self.sig.layer_cap)? {
            if phi[self.step(&layer)?] != other.step(&layer.map(|&q| phi[q]))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Same automaton with states renamed; `names` must be a permutation-free
    /// list of fresh identifiers, one per state.
    pub fn with_state_names(mut self, names: Vec<String>) -> Result<Automaton> {
        self.states = names;
        self.validate()?;
        Ok(self)
    }

    /// Explicit transition table over every layer, dropping the default.
    pub fn expanded(&self) -> Result<Automaton> {
        let all: Vec<State> = (0..self.state_count()).collect();
        let mut trans = BTreeMap::new();
        for layer in enumerate_layers(&self.sig.functor, &all, self.sig.layer_cap)? {
            let q = self.step(&layer)?;
            trans.insert(layer, q);
        }
        Automaton::new(
            self.sig.clone(),
            self.states.clone(),
            self.leaf_init.clone(),
            trans,
            None,
            self.output.clone(),
        )
    }
}

/// Renumbers blocks by the first state (in `order`) carrying each key.
fn relabel<K: Eq + std::hash::Hash>(
    order: &[State],
    block: &mut [usize],
    mut key: impl FnMut(State) -> K,
) -> usize {
    let mut ids: HashMap<K, usize> = HashMap::new();
    for &q in order {
        let next = ids.len();
        block[q] = *ids.entry(key(q)).or_insert(next);
    }
    ids.len()
}
