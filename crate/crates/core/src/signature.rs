//! Ranked alphabets, leaf and output sets, and the functor description they
//! generate.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Token used for the hole of a context in literals.
pub const HOLE_TOKEN: &str = "_";

/// Default cap on the number of layers a single enumeration may produce.
pub const DEFAULT_LAYER_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
        }
    }
}

/// Symbols with arities. The list order is the enumeration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RankedAlphabet {
    symbols: Vec<Symbol>,
}

impl RankedAlphabet {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        RankedAlphabet { symbols }
    }

    /// Builds an alphabet from `(name, arity)` pairs.
    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, usize)>) -> Self {
        RankedAlphabet::new(pairs.into_iter().map(|(n, a)| Symbol::new(n, a)).collect())
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn arity(&self, symbol: usize) -> usize {
        self.symbols[symbol].arity
    }

    pub fn name(&self, symbol: usize) -> &str {
        &self.symbols[symbol].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }
}

/// Description of the endofunctor whose algebras are learned.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FunctorSpec {
    /// `F(X) = ⊎_γ X^arity(γ)`.
    Polynomial(RankedAlphabet),
    /// Finite subsets of `X`, optionally of bounded size.
    FinitePowerset { max_branch: Option<usize> },
}

impl FunctorSpec {
    pub fn alphabet(&self) -> Option<&RankedAlphabet> {
        match self {
            FunctorSpec::Polynomial(a) => Some(a),
            FunctorSpec::FinitePowerset { .. } => None,
        }
    }

    pub fn max_branch(&self) -> Option<usize> {
        match self {
            FunctorSpec::Polynomial(_) => None,
            FunctorSpec::FinitePowerset { max_branch } => *max_branch,
        }
    }

    pub fn is_powerset(&self) -> bool {
        matches!(self, FunctorSpec::FinitePowerset { .. })
    }
}

/// Ordered, duplicate-free set of names. Used for leaves and outputs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct NameSet {
    names: Vec<String>,
}

impl NameSet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        NameSet {
            names: names.into_iter().map(Into::into).collect(),
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

pub type LeafSet = NameSet;
pub type OutputSet = NameSet;

/// Everything needed to interpret trees and automata: the functor, the
/// leaf symbols `I` and the output values `O`.
#[derive(Debug, Clone)]
pub struct Signature {
    pub functor: FunctorSpec,
    pub leaves: LeafSet,
    pub outputs: OutputSet,
    /// Cap on layer enumeration; not part of signature identity.
    pub layer_cap: usize,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.functor == other.functor
            && self.leaves == other.leaves
            && self.outputs == other.outputs
    }
}

impl Eq for Signature {}

impl Signature {
    pub fn new(functor: FunctorSpec, leaves: LeafSet, outputs: OutputSet) -> Self {
        Signature {
            functor,
            leaves,
            outputs,
            layer_cap: DEFAULT_LAYER_CAP,
        }
    }

    /// Polynomial signature with outputs `0 1`.
    pub fn polynomial<S: Into<String>, L: Into<String>>(
        symbols: impl IntoIterator<Item = (S, usize)>,
        leaves: impl IntoIterator<Item = L>,
    ) -> Self {
        Signature::new(
            FunctorSpec::Polynomial(RankedAlphabet::from_pairs(symbols)),
            NameSet::new(leaves),
            NameSet::new(["0", "1"]),
        )
    }

    /// Finite powerset signature with outputs `0 1`.
    pub fn powerset<L: Into<String>>(
        max_branch: Option<usize>,
        leaves: impl IntoIterator<Item = L>,
    ) -> Self {
        Signature::new(
            FunctorSpec::FinitePowerset { max_branch },
            NameSet::new(leaves),
            NameSet::new(["0", "1"]),
        )
    }

    pub fn with_layer_cap(mut self, cap: usize) -> Self {
        self.layer_cap = cap;
        self
    }

    /// Checks name uniqueness, disjointness and a non-empty output set.
    pub fn validate(&self) -> Result<()> {
        let mut seen: HashSet<&str> = HashSet::new();
        if let Some(alphabet) = self.functor.alphabet() {
            for s in alphabet.symbols() {
                check_identifier(&s.name)?;
                if !seen.insert(&s.name) {
                    return Err(Error::DuplicateName(s.name.clone()));
                }
            }
        }
        if self.functor.max_branch() == Some(0) {
            return Err(Error::ZeroBranching);
        }
        let mut leaves: HashSet<&str> = HashSet::new();
        for leaf in self.leaves.names() {
            check_identifier(leaf)?;
            if !leaves.insert(leaf) {
                return Err(Error::DuplicateName(leaf.clone()));
            }
            if seen.contains(leaf.as_str()) {
                return Err(Error::NameClash(leaf.clone()));
            }
        }
        if self.outputs.is_empty() {
            return Err(Error::EmptyOutputSet);
        }
        let mut outs: HashSet<&str> = HashSet::new();
        for o in self.outputs.names() {
            check_identifier(o)?;
            if !outs.insert(o) {
                return Err(Error::DuplicateName(o.clone()));
            }
        }
        Ok(())
    }
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '*' | '\'' | '.' | '+' | '$' | '@' | '!' | '?')
}

fn check_identifier(name: &str) -> Result<()> {
    if name == HOLE_TOKEN {
        return Err(Error::NameClash(name.to_string()));
    }
    if name.is_empty() || !name.chars().all(is_ident_char) {
        return Err(Error::InvalidIdentifier(name.to_string()));
    }
    Ok(())
}
