//! Membership and equivalence oracles.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use crate::automaton::{Automaton, Output};
use crate::error::{Error, Result};
use crate::signature::Signature;
use crate::tree::Tree;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QueryStats {
    pub membership_raw: u64,
    pub membership_unique: u64,
    pub equivalence_count: u64,
}

/// A minimally adequate teacher. Implementations must answer membership
/// consistently for the whole session, and every counterexample `t` must
/// satisfy `membership(t) != hypothesis.language_of(t)`.
pub trait Teacher {
    fn signature(&self) -> &Signature;

    fn membership(&self, t: &Tree) -> Result<Output>;

    /// `None` when the hypothesis is correct, otherwise a counterexample.
    fn equivalence(&self, hypothesis: &Automaton) -> Result<Option<Tree>>;

    /// Upper bound on the number of states of the target, if known.
    fn size_hint(&self) -> Option<usize> {
        None
    }

    fn stats(&self) -> QueryStats {
        QueryStats::default()
    }
}

/// Teacher backed by an explicit target automaton. Counterexamples are the
/// smallest trees on which hypothesis and target disagree.
#[derive(Debug, Clone)]
pub struct AutomatonTeacher {
    target: Automaton,
    minimal_states: usize,
}

impl AutomatonTeacher {
    pub fn new(target: Automaton) -> Result<Self> {
        target.validate()?;
        let minimal_states = target.minimize()?.state_count();
        Ok(AutomatonTeacher {
            target,
            minimal_states,
        })
    }

    pub fn target(&self) -> &Automaton {
        &self.target
    }

    /// Number of states of the minimal automaton for the target language.
    pub fn minimal_states(&self) -> usize {
        self.minimal_states
    }
}

impl Teacher for AutomatonTeacher {
    fn signature(&self) -> &Signature {
        self.target.signature()
    }

    fn membership(&self, t: &Tree) -> Result<Output> {
        self.target.language_of(t)
    }

    fn equivalence(&self, hypothesis: &Automaton) -> Result<Option<Tree>> {
        if hypothesis.signature() != self.target.signature() {
            return Err(Error::SignatureMismatch(
                "hypothesis and target use different signatures".into(),
            ));
        }
        hypothesis.equivalent(&self.target)
    }

    fn size_hint(&self) -> Option<usize> {
        Some(self.target.state_count())
    }
}

/// Memoizes membership answers by tree and counts queries.
pub struct CachingTeacher<T> {
    inner: T,
    cache: Mutex<HashMap<Tree, Output>>,
    raw: AtomicU64,
    equivalence: AtomicU64,
}

impl<T: Teacher> CachingTeacher<T> {
    pub fn new(inner: T) -> Self {
        CachingTeacher {
            inner,
            cache: Mutex::new(HashMap::new()),
            raw: AtomicU64::new(0),
            equivalence: AtomicU64::new(0),
        }
    }

    pub fn inner(&self) -> &T {
        &self.inner
    }
}

impl<T: Teacher> Teacher for CachingTeacher<T> {
    fn signature(&self) -> &Signature {
        self.inner.signature()
    }

    fn membership(&self, t: &Tree) -> Result<Output> {
        self.raw.fetch_add(1, Ordering::Relaxed);
        if let Some(&o) = self.cache.lock().expect("cache lock").get(t) {
            return Ok(o);
        }
        let o = self.inner.membership(t)?;
        self.cache.lock().expect("cache lock").insert(t.clone(), o);
        Ok(o)
    }

    fn equivalence(&self, hypothesis: &Automaton) -> Result<Option<Tree>> {
        self.equivalence.fetch_add(1, Ordering::Relaxed);
        self.inner.equivalence(hypothesis)
    }

    fn size_hint(&self) -> Option<usize> {
        self.inner.size_hint()
    }

    fn stats(&self) -> QueryStats {
        QueryStats {
            membership_raw: self.raw.load(Ordering::Relaxed),
            membership_unique: self.cache.lock().expect("cache lock").len() as u64,
            equivalence_count: self.equivalence.load(Ordering::Relaxed),
        }
    }
}

impl<T: Teacher + ?Sized> Teacher for &T {
    fn signature(&self) -> &Signature {
        (**self).signature()
    }

    fn membership(&self, t: &Tree) -> Result<Output> {
        (**self).membership(t)
    }

    fn equivalence(&self, hypothesis: &Automaton) -> Result<Option<Tree>> {
        (**self).equivalence(hypothesis)
    }

    fn size_hint(&self) -> Option<usize> {
        (**self).size_hint()
    }

    fn stats(&self) -> QueryStats {
        (**self).stats()
    }
}
