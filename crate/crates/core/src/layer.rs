//! One layer of the functor: `F(X)` for the polynomial and finite powerset
//! functors.

use crate::error::{Error, Result};
use crate::signature::FunctorSpec;

/// An element of `F(X)`.
///
/// `Set` layers are canonical: sorted by `X`'s order with no duplicates.
/// Construct them with [`Layer::set`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Layer<X> {
    Sym { symbol: usize, children: Vec<X> },
    Set(Vec<X>),
}

/// Either an element of the carrier or the hole. Orders the hole last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot<X> {
    Item(X),
    Hole,
}

impl<X> Slot<X> {
    pub fn is_hole(&self) -> bool {
        matches!(self, Slot::Hole)
    }
}

impl<X: Ord> Layer<X> {
    /// Canonical set layer.
    pub fn set(mut items: Vec<X>) -> Self {
        items.sort();
        items.dedup();
        Layer::Set(items)
    }

    /// Functorial action. Set layers are re-canonicalized, so they may shrink.
    pub fn map<Y: Ord>(&self, f: impl FnMut(&X) -> Y) -> Layer<Y> {
        match self {
            Layer::Sym { symbol, children } => Layer::Sym {
                symbol: *symbol,
                children: children.iter().map(f).collect(),
            },
            Layer::Set(items) => Layer::set(items.iter().map(f).collect()),
        }
    }

    /// Fallible functorial action.
    pub fn try_map<Y: Ord, E>(&self, mut f: impl FnMut(&X) -> Result<Y, E>) -> Result<Layer<Y>, E> {
        Ok(match self {
            Layer::Sym { symbol, children } => Layer::Sym {
                symbol: *symbol,
                children: children.iter().map(&mut f).collect::<Result<_, _>>()?,
            },
            Layer::Set(items) => Layer::set(items.iter().map(f).collect::<Result<_, _>>()?),
        })
    }
}

impl<X> Layer<X> {
    pub fn children(&self) -> &[X] {
        match self {
            Layer::Sym { children, .. } => children,
            Layer::Set(items) => items,
        }
    }

    pub fn is_canonical(&self) -> bool
    where
        X: Ord,
    {
        match self {
            Layer::Sym { .. } => true,
            Layer::Set(items) => items.windows(2).all(|w| w[0] < w[1]),
        }
    }
}

impl<X: Ord + Clone> Layer<Slot<X>> {
    pub fn has_hole(&self) -> bool {
        self.children().iter().any(Slot::is_hole)
    }

    /// Replaces every hole by `x`.
    pub fn plug(&self, x: &X) -> Layer<X> {
        self.map(|slot| match slot {
            Slot::Item(y) => y.clone(),
            Slot::Hole => x.clone(),
        })
    }
}

/// Number of layers `F(X)` has for a carrier of size `n`.
pub fn layer_count(functor: &FunctorSpec, n: usize) -> u128 {
    match functor {
        FunctorSpec::Polynomial(alphabet) => alphabet
            .symbols()
            .iter()
            .map(|s| pow_saturating(n as u128, s.arity))
            .fold(0u128, u128::saturating_add),
        FunctorSpec::FinitePowerset { max_branch } => {
            let top = max_branch.map_or(n, |m| m.min(n));
            (0..=top)
                .map(|k| binomial(n, k))
                .fold(0u128, u128::saturating_add)
        }
    }
}

fn pow_saturating(base: u128, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base))
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

fn check_cap(count: u128, cap: usize) -> Result<()> {
    if count > cap as u128 {
        Err(Error::CarrierTooLarge { count, cap })
    } else {
        Ok(())
    }
}

/// Enumerates `F(X)` for a finite carrier.
///
/// Polynomial layers come in symbol order, then lexicographically by child
/// tuple (positions in `carrier`). Subsets come by size, then
/// lexicographically by carrier positions; the empty set is first.
pub fn enumerate_layers<X: Clone + Ord>(
    functor: &FunctorSpec,
    carrier: &[X],
    cap: usize,
) -> Result<Vec<Layer<X>>> {
    check_cap(layer_count(functor, carrier.len()), cap)?;
    let mut out = Vec::new();
    match functor {
        FunctorSpec::Polynomial(alphabet) => {
            for (symbol, s) in alphabet.symbols().iter().enumerate() {
                for_each_tuple(carrier.len(), s.arity, |idx| {
                    out.push(Layer::Sym {
                        symbol,
                        children: idx.iter().map(|&i| carrier[i].clone()).collect(),
                    })
                });
            }
        }
        FunctorSpec::FinitePowerset { max_branch } => {
            let top = max_branch.map_or(carrier.len(), |m| m.min(carrier.len()));
            for k in 0..=top {
                for_each_combination(carrier.len(), k, |idx| {
                    out.push(Layer::set(
                        idx.iter().map(|&i| carrier[i].clone()).collect(),
                    ))
                });
            }
        }
    }
    Ok(out)
}

/// Enumerates one-level contexts `F(X + 1)` with the hole ordered after
/// every carrier element. With `hole_only`, only layers containing the hole
/// are produced.
pub fn enumerate_hole_layers<X: Clone + Ord>(
    functor: &FunctorSpec,
    carrier: &[X],
    cap: usize,
    hole_only: bool,
) -> Result<Vec<Layer<Slot<X>>>> {
    let mut slots: Vec<Slot<X>> = carrier.iter().cloned().map(Slot::Item).collect();
    slots.push(Slot::Hole);
    match functor {
        FunctorSpec::FinitePowerset { max_branch } if hole_only => {
            // A hole-containing subset is the hole plus a subset of the
            // carrier with one fewer element.
            let rest = FunctorSpec::FinitePowerset {
                max_branch: max_branch.map(|m| m - 1),
            };
            check_cap(layer_count(&rest, carrier.len()), cap)?;
            let top = max_branch.map_or(carrier.len(), |m| (m - 1).min(carrier.len()));
            let mut out = Vec::new();
            for k in 0..=top {
                for_each_combination(carrier.len(), k, |idx| {
                    let mut items: Vec<Slot<X>> = idx.iter().map(|&i| slots[i].clone()).collect();
                    items.push(Slot::Hole);
                    out.push(Layer::set(items));
                });
            }
            Ok(out)
        }
        _ => {
            let mut all = enumerate_layers(functor, &slots, cap)?;
            if hole_only {
                all.retain(Layer::has_hole);
            }
            Ok(all)
        }
    }
}

fn for_each_tuple(n: usize, len: usize, mut f: impl FnMut(&[usize])) {
    if len > 0 && n == 0 {
        return;
    }
    let mut idx = vec![0usize; len];
    loop {
        f(&idx);
        let mut pos = len;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut pos = k;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if idx[pos] < n - k + pos {
                idx[pos] += 1;
                for j in pos + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}
