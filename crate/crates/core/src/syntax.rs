//! Tree and context literals.
//!
//! ```text
//! term := '_' | '{' [term (',' term)*] '}' | ident ['(' term (',' term)* ')']
//! ```
//!
//! A bare identifier is a leaf or a constant symbol. Whitespace is ignored.

use crate::error::{Error, Result};
use crate::layer::Layer;
use crate::signature::{is_ident_char, FunctorSpec, Signature, HOLE_TOKEN};
use crate::tree::{Context, Tree, TreeKind};

/// Unresolved syntax of a literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Literal {
    Hole,
    Ident {
        name: String,
        column: usize,
    },
    App {
        name: String,
        column: usize,
        args: Vec<Literal>,
    },
    Set {
        column: usize,
        items: Vec<Literal>,
    },
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            chars: src.chars().enumerate().map(|(i, c)| (i + 1, c)).collect(),
            pos: 0,
            src,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn column(&self) -> usize {
        self.chars
            .get(self.pos)
            .map_or(self.src.chars().count() + 1, |(c, _)| *c)
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            column: self.column(),
            message: message.into(),
        })
    }

    fn ident(&mut self) -> Result<(String, usize)> {
        self.skip_ws();
        let column = self.column();
        let start = self.pos;
        while self.pos < self.chars.len() && is_ident_char(self.chars[self.pos].1) {
            self.pos += 1;
        }
        if start == self.pos {
            return match self.chars.get(self.pos) {
                Some((_, c)) => self.error(format!("unexpected `{c}`")),
                None => self.error("unexpected end of input"),
            };
        }
        Ok((
            self.chars[start..self.pos].iter().map(|(_, c)| c).collect(),
            column,
        ))
    }

    fn list(&mut self, close: char) -> Result<Vec<Literal>> {
        let mut items = Vec::new();
        if self.peek() == Some(close) {
            self.pos += 1;
            return Ok(items);
        }
        loop {
            items.push(self.term()?);
            match self.peek() {
                Some(',') => self.pos += 1,
                Some(c) if c == close => {
                    self.pos += 1;
                    return Ok(items);
                }
                Some(c) => return self.error(format!("expected `,` or `{close}`, found `{c}`")),
                None => return self.error(format!("expected `{close}`, found end of input")),
            }
        }
    }

    fn term(&mut self) -> Result<Literal> {
        match self.peek() {
            Some('{') => {
                let column = self.column();
                self.pos += 1;
                let items = self.list('}')?;
                Ok(Literal::Set { column, items })
            }
            _ => {
                let (name, column) = self.ident()?;
                if self.peek() == Some('(') {
                    self.pos += 1;
                    let args = self.list(')')?;
                    Ok(Literal::App { name, column, args })
                } else if name == HOLE_TOKEN {
                    Ok(Literal::Hole)
                } else {
                    Ok(Literal::Ident { name, column })
                }
            }
        }
    }

    fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => self.error(format!("trailing input starting at `{c}`")),
        }
    }
}

/// Parses a literal without resolving names.
pub fn parse_literal(src: &str) -> Result<Literal> {
    let mut p = Parser::new(src);
    let lit = p.term()?;
    p.finish()?;
    Ok(lit)
}

fn resolve_error<T>(column: usize, message: String) -> Result<T> {
    Err(Error::Syntax { column, message })
}

/// Resolves a literal against a signature. Set layers are canonicalized, so
/// duplicated or permuted children are accepted.
pub fn resolve(lit: &Literal, sig: &Signature, allow_holes: bool) -> Result<Tree> {
    match lit {
        Literal::Hole => {
            if allow_holes {
                Ok(Tree::hole())
            } else {
                resolve_error(0, "hole `_` is not allowed in a tree".into())
            }
        }
        Literal::Ident { name, column } => {
            if let Some(i) = sig.leaves.index_of(name) {
                return Ok(Tree::leaf(i));
            }
            match sig
                .functor
                .alphabet()
                .and_then(|a| a.index_of(name).map(|s| (a, s)))
            {
                Some((a, s)) if a.arity(s) == 0 => Ok(Tree::sym(s, vec![])),
                Some((a, s)) => resolve_error(
                    *column,
                    format!("symbol `{name}` expects {} arguments", a.arity(s)),
                ),
                None => resolve_error(*column, format!("unknown leaf or symbol `{name}`")),
            }
        }
        Literal::App { name, column, args } => {
            let Some(alphabet) = sig.functor.alphabet() else {
                return resolve_error(
                    *column,
                    "symbol application under a powerset functor".into(),
                );
            };
            let Some(s) = alphabet.index_of(name) else {
                return resolve_error(*column, format!("unknown symbol `{name}`"));
            };
            if alphabet.arity(s) != args.len() {
                return resolve_error(
                    *column,
                    format!(
                        "symbol `{name}` expects {} arguments, got {}",
                        alphabet.arity(s),
                        args.len()
                    ),
                );
            }
            let children = args
                .iter()
                .map(|a| resolve(a, sig, allow_holes))
                .collect::<Result<Vec<_>>>()?;
            Ok(Tree::sym(s, children))
        }
        Literal::Set { column, items } => {
            let FunctorSpec::FinitePowerset { max_branch } = &sig.functor else {
                return resolve_error(*column, "set node under a polynomial functor".into());
            };
            let children = items
                .iter()
                .map(|a| resolve(a, sig, allow_holes))
                .collect::<Result<Vec<_>>>()?;
            let t = Tree::set(children);
            if let Some(m) = max_branch {
                if t.children().len() > *m {
                    return resolve_error(
                        *column,
                        format!("set node has more than {m} distinct children"),
                    );
                }
            }
            Ok(t)
        }
    }
}

pub fn parse_tree(src: &str, sig: &Signature) -> Result<Tree> {
    resolve(&parse_literal(src)?, sig, false)
}

pub fn parse_context(src: &str, sig: &Signature) -> Result<Context> {
    resolve(&parse_literal(src)?, sig, true).map(Context::from_tree)
}

/// Parses a one-layer literal whose children are names resolved by `item`,
/// e.g. `f(q0,q1)`, `{q0,q1}` or a constant symbol.
pub fn parse_layer<X: Ord>(
    src: &str,
    sig: &Signature,
    mut item: impl FnMut(&str) -> Option<X>,
) -> Result<Layer<X>> {
    let lit = parse_literal(src)?;
    let mut child = |l: &Literal| -> Result<X> {
        match l {
            Literal::Ident { name, column } => match item(name) {
                Some(x) => Ok(x),
                None => resolve_error(*column, format!("unknown name `{name}`")),
            },
            _ => resolve_error(0, "layer children must be names".into()),
        }
    };
    let (name, column, args): (&str, usize, &[Literal]) = match &lit {
        Literal::App { name, column, args } => (name, *column, args),
        Literal::Ident { name, column } => (name, *column, &[]),
        _ => ("", 0, &[]),
    };
    match (&sig.functor, &lit) {
        (FunctorSpec::Polynomial(alphabet), Literal::App { .. } | Literal::Ident { .. }) => {
            let Some(s) = alphabet.index_of(name) else {
                return resolve_error(column, format!("unknown symbol `{name}`"));
            };
            if alphabet.arity(s) != args.len() {
                return resolve_error(
                    column,
                    format!(
                        "symbol `{name}` expects {} arguments, got {}",
                        alphabet.arity(s),
                        args.len()
                    ),
                );
            }
            Ok(Layer::Sym {
                symbol: s,
                children: args.iter().map(&mut child).collect::<Result<_>>()?,
            })
        }
        (FunctorSpec::FinitePowerset { max_branch }, Literal::Set { column, items }) => {
            let layer = Layer::set(items.iter().map(&mut child).collect::<Result<_>>()?);
            if let Some(m) = max_branch {
                if layer.children().len() > *m {
                    return resolve_error(
                        *column,
                        format!("set has more than {m} distinct elements"),
                    );
                }
            }
            Ok(layer)
        }
        _ => resolve_error(0, format!("`{src}` is not a layer of this functor")),
    }
}

/// Prints a tree or context as a literal.
pub fn show_tree(t: &Tree, sig: &Signature) -> String {
    let mut out = String::new();
    write_tree(&mut out, t, sig);
    out
}

pub fn show_context(c: &Context, sig: &Signature) -> String {
    show_tree(c.tree(), sig)
}

fn write_tree(out: &mut String, t: &Tree, sig: &Signature) {
    match t.kind() {
        TreeKind::Leaf(i) => out.push_str(sig.leaves.name(*i)),
        TreeKind::Hole => out.push_str(HOLE_TOKEN),
        TreeKind::Node(layer) => write_layer(out, layer, sig, |out, c| write_tree(out, c, sig)),
    }
}

/// Prints a layer, rendering children with `item`.
pub fn show_layer<X>(
    layer: &Layer<X>,
    sig: &Signature,
    mut item: impl FnMut(&X) -> String,
) -> String {
    let mut out = String::new();
    write_layer(&mut out, layer, sig, |out, x| out.push_str(&item(x)));
    out
}

fn write_layer<X>(
    out: &mut String,
    layer: &Layer<X>,
    sig: &Signature,
    mut item: impl FnMut(&mut String, &X),
) {
    let (open, close, children) = match layer {
        Layer::Sym { symbol, children } => {
            let name = sig.functor.alphabet().map_or("?", |a| a.name(*symbol));
            out.push_str(name);
            if children.is_empty() {
                return;
            }
            ('(', ')', children)
        }
        Layer::Set(items) => ('{', '}', items),
    };
    out.push(open);
    for (i, c) in children.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        item(out, c);
    }
    out.push(close);
}
