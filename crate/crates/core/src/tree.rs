//! Finite trees over leaf symbols (elements of the free algebra) and
//! contexts, which are trees that may also contain holes.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::layer::{Layer, Slot};
use crate::signature::{FunctorSpec, Signature};

/// A tree. Cloning is cheap; subtrees are shared.
///
/// Trees are totally ordered by size, then by kind (leaves, then nodes, then
/// the hole), then leaf index or layer (symbol index, then children
/// lexicographically). All sets of trees use this order.
#[derive(Clone)]
pub struct Tree(Arc<Inner>);

struct Inner {
    kind: TreeKind,
    size: usize,
    holes: usize,
    hash: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeKind {
    Leaf(usize),
    Hole,
    Node(Layer<Tree>),
}

impl TreeKind {
    fn rank(&self) -> u8 {
        match self {
            TreeKind::Leaf(_) => 0,
            TreeKind::Node(_) => 1,
            TreeKind::Hole => 2,
        }
    }
}

impl Tree {
    fn build(kind: TreeKind) -> Tree {
        let (size, holes) = match &kind {
            TreeKind::Leaf(_) => (1, 0),
            TreeKind::Hole => (1, 1),
            TreeKind::Node(layer) => layer
                .children()
                .iter()
                .fold((1, 0), |(s, h), c| (s + c.size(), h + c.hole_count())),
        };
        let mut hasher = DefaultHasher::new();
        kind.rank().hash(&mut hasher);
        match &kind {
            TreeKind::Leaf(i) => i.hash(&mut hasher),
            TreeKind::Hole => {}
            TreeKind::Node(layer) => {
                match layer {
                    Layer::Sym { symbol, .. } => symbol.hash(&mut hasher),
                    Layer::Set(_) => usize::MAX.hash(&mut hasher),
                }
                for c in layer.children() {
                    c.0.hash.hash(&mut hasher);
                }
            }
        }
        Tree(Arc::new(Inner {
            size,
            holes,
            hash: hasher.finish(),
            kind,
        }))
    }

    pub fn leaf(leaf: usize) -> Tree {
        Tree::build(TreeKind::Leaf(leaf))
    }

    pub fn hole() -> Tree {
        Tree::build(TreeKind::Hole)
    }

    /// Wraps a layer of trees as a node. Set layers are canonicalized.
    pub fn node(layer: Layer<Tree>) -> Tree {
        let layer = match layer {
            Layer::Set(items) => Layer::set(items),
            sym => sym,
        };
        Tree::build(TreeKind::Node(layer))
    }

    pub fn sym(symbol: usize, children: Vec<Tree>) -> Tree {
        Tree::node(Layer::Sym { symbol, children })
    }

    pub fn set(children: Vec<Tree>) -> Tree {
        Tree::node(Layer::set(children))
    }

    pub fn kind(&self) -> &TreeKind {
        &self.0.kind
    }

    /// Number of nodes, leaves and holes.
    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn hole_count(&self) -> usize {
        self.0.holes
    }

    pub fn is_ground(&self) -> bool {
        self.0.holes == 0
    }

    pub fn height(&self) -> usize {
        match self.kind() {
            TreeKind::Node(layer) => {
                1 + layer.children().iter().map(Tree::height).max().unwrap_or(0)
            }
            _ => 0,
        }
    }

    pub fn children(&self) -> &[Tree] {
        match self.kind() {
            TreeKind::Node(layer) => layer.children(),
            _ => &[],
        }
    }

    /// Replaces every hole by `t`, re-canonicalizing set layers on the way up.
    pub fn plug(&self, t: &Tree) -> Tree {
        if self.is_ground() {
            return self.clone();
        }
        match self.kind() {
            TreeKind::Hole => t.clone(),
            TreeKind::Node(layer) => Tree::node(layer.map(|c| c.plug(t))),
            TreeKind::Leaf(_) => unreachable!("leaves have no holes"),
        }
    }

    /// Canonical form: every set layer sorted and deduplicated. Trees built
    /// through the constructors are already canonical.
    pub fn canonical(&self) -> Tree {
        match self.kind() {
            TreeKind::Node(layer) => Tree::node(layer.map(Tree::canonical)),
            _ => self.clone(),
        }
    }

    pub fn is_canonical(&self) -> bool {
        match self.kind() {
            TreeKind::Node(layer) => {
                layer.is_canonical() && layer.children().iter().all(Tree::is_canonical)
            }
            _ => true,
        }
    }

    /// The smallest subtree-closed set containing this tree.
    pub fn subtree_closure(&self) -> BTreeSet<Tree> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self.clone()];
        while let Some(t) = stack.pop() {
            if out.contains(&t) {
                continue;
            }
            stack.extend(t.children().iter().cloned());
            out.insert(t);
        }
        out
    }

    /// Checks that the tree is built over `sig`: known leaves, correct
    /// arities, canonical sets within the branching bound. Holes are only
    /// accepted when `allow_holes` is set.
    pub fn check(&self, sig: &Signature, allow_holes: bool) -> Result<()> {
        match self.kind() {
            TreeKind::Leaf(i) => {
                if *i >= sig.leaves.len() {
                    return Err(Error::MalformedTerm(format!("unknown leaf index {i}")));
                }
            }
            TreeKind::Hole => {
                if !allow_holes {
                    return Err(Error::MalformedTerm("hole in a tree".into()));
                }
            }
            TreeKind::Node(layer) => {
                match (&sig.functor, layer) {
                    (FunctorSpec::Polynomial(alphabet), Layer::Sym { symbol, children }) => {
                        if *symbol >= alphabet.len() {
                            return Err(Error::MalformedTerm(format!(
                                "unknown symbol index {symbol}"
                            )));
                        }
                        if alphabet.arity(*symbol) != children.len() {
                            return Err(Error::MalformedTerm(format!(
                                "symbol `{}` expects {} children, got {}",
                                alphabet.name(*symbol),
                                alphabet.arity(*symbol),
                                children.len()
                            )));
                        }
                    }
                    (FunctorSpec::FinitePowerset { max_branch }, Layer::Set(items)) => {
                        if !layer.is_canonical() {
                            return Err(Error::MalformedTerm("set layer is not canonical".into()));
                        }
                        if let Some(m) = max_branch {
                            if items.len() > *m {
                                return Err(Error::MalformedTerm(format!(
                                    "set node has {} children, bound is {m}",
                                    items.len()
                                )));
                            }
                        }
                    }
                    _ => {
                        return Err(Error::MalformedTerm(
                            "layer kind does not match functor".into(),
                        ))
                    }
                }
                for c in layer.children() {
                    c.check(sig, allow_holes)?;
                }
            }
        }
        Ok(())
    }
}

impl PartialEq for Tree {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash
                && self.0.size == other.0.size
                && self.0.kind == other.0.kind)
    }
}

impl Eq for Tree {}

impl Hash for Tree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash.hash(state)
    }
}

impl Ord for Tree {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.size()
            .cmp(&other.size())
            .then_with(|| self.kind().rank().cmp(&other.kind().rank()))
            .then_with(|| match (self.kind(), other.kind()) {
                (TreeKind::Leaf(a), TreeKind::Leaf(b)) => a.cmp(b),
                (TreeKind::Node(a), TreeKind::Node(b)) => a.cmp(b),
                _ => Ordering::Equal,
            })
    }
}

impl PartialOrd for Tree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            TreeKind::Leaf(i) => write!(f, "#{i}"),
            TreeKind::Hole => write!(f, "_"),
            TreeKind::Node(Layer::Sym { symbol, children }) => {
                write!(f, "s{symbol}")?;
                f.debug_list().entries(children).finish()
            }
            TreeKind::Node(Layer::Set(items)) => f.debug_set().entries(items).finish(),
        }
    }
}

/// A tree over leaves plus the hole; plugging substitutes every hole.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Context(Tree);

impl Context {
    /// The identity context.
    pub fn hole() -> Context {
        Context(Tree::hole())
    }

    pub fn from_tree(tree: Tree) -> Context {
        Context(tree)
    }

    /// Wraps a one-level layer as a context: items become subtrees and the
    /// hole stays a hole.
    pub fn from_layer(layer: &Layer<Slot<Tree>>) -> Context {
        Context(Tree::node(layer.map(|slot| match slot {
            Slot::Item(t) => t.clone(),
            Slot::Hole => Tree::hole(),
        })))
    }

    pub fn tree(&self) -> &Tree {
        &self.0
    }

    pub fn into_tree(self) -> Tree {
        self.0
    }

    pub fn hole_count(&self) -> usize {
        self.0.hole_count()
    }

    pub fn plug(&self, t: &Tree) -> Tree {
        self.0.plug(t)
    }

    /// Substitutes `inner` for every hole of `self`.
    pub fn compose(&self, inner: &Context) -> Context {
        Context(self.0.plug(&inner.0))
    }
}
