//! Line-based automaton text format and DOT export.
//!
//! ```text
//! # comment
//! functor polynomial            | functor powerset [max K]
//! symbols f/2 g/1               (polynomial only)
//! leaves c d
//! outputs 0 1                   (optional, defaults to 0 1)
//! states q0 q1
//! leaf c -> q0
//! trans f(q0,q1) -> q1          | trans {q0,q1} -> q1 | trans {} -> q0
//! default -> q0                 (optional)
//! out q0 -> 1
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::automaton::Automaton;
use crate::error::{Error, Result};
use crate::layer::Layer;
use crate::signature::{FunctorSpec, NameSet, RankedAlphabet, Signature, Symbol};
use crate::syntax::parse_layer;

fn perr<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        message: message.into(),
    })
}

fn at_line(line: usize, e: Error) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => Error::Parse {
            line,
            message: other.to_string(),
        },
    }
}

/// Splits `lhs -> rhs`.
fn arrow(line: usize, rest: &str) -> Result<(String, String)> {
    match rest.split_once("->") {
        Some((l, r)) => {
            let r = r.trim();
            if r.is_empty() || r.split_whitespace().count() != 1 {
                return perr(line, "expected a single name after `->`");
            }
            Ok((l.trim().to_string(), r.to_string()))
        }
        None => perr(line, "expected `->`"),
    }
}

pub fn parse_automaton(src: &str) -> Result<Automaton> {
    let lines: Vec<(usize, &str, &str)> = src
        .lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let text = raw.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                return None;
            }
            let (kw, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
            Some((i + 1, kw, rest.trim()))
        })
        .collect();

    let mut functor: Option<(usize, bool, Option<usize>)> = None;
    let mut symbols: Option<Vec<Symbol>> = None;
    let mut leaves: Option<Vec<String>> = None;
    let mut outputs: Option<Vec<String>> = None;
    let mut states: Option<(usize, Vec<String>)> = None;

    for &(line, kw, rest) in &lines {
        let once = |seen: bool| {
            if seen {
                perr(line, format!("duplicate `{kw}` line"))
            } else {
                Ok(())
            }
        };
        match kw {
            "functor" => {
                once(functor.is_some())?;
                let words: Vec<&str> = rest.split_whitespace().collect();
                functor = Some(match words.as_slice() {
                    ["polynomial"] => (line, false, None),
                    ["powerset"] => (line, true, None),
                    ["powerset", "max", k] => match k.parse::<usize>() {
                        Ok(k) if k > 0 => (line, true, Some(k)),
                        _ => return perr(line, format!("invalid branching bound `{k}`")),
                    },
                    _ => return perr(line, format!("unknown functor `{rest}`")),
                });
            }
            "symbols" => {
                once(symbols.is_some())?;
                let mut out = Vec::new();
                for word in rest.split_whitespace() {
                    let Some((name, arity)) = word.rsplit_once('/') else {
                        return perr(line, format!("expected `name/arity`, found `{word}`"));
                    };
                    let Ok(arity) = arity.parse() else {
                        return perr(line, format!("invalid arity in `{word}`"));
                    };
                    out.push(Symbol::new(name, arity));
                }
                symbols = Some(out);
            }
            "leaves" => {
                once(leaves.is_some())?;
                leaves = Some(rest.split_whitespace().map(String::from).collect());
            }
            "outputs" => {
                once(outputs.is_some())?;
                outputs = Some(rest.split_whitespace().map(String::from).collect());
            }
            "states" => {
                once(states.is_some())?;
                states = Some((line, rest.split_whitespace().map(String::from).collect()));
            }
            "leaf" | "trans" | "default" | "out" => {}
            other => return perr(line, format!("unknown directive `{other}`")),
        }
    }

    let Some((functor_line, is_powerset, max_branch)) = functor else {
        return perr(1, "missing `functor` line");
    };
    let functor = if is_powerset {
        if symbols.is_some() {
            return perr(
                functor_line,
                "`symbols` is not allowed for the powerset functor",
            );
        }
        FunctorSpec::FinitePowerset { max_branch }
    } else {
        let Some(symbols) = symbols else {
            return perr(functor_line, "missing `symbols` line");
        };
        FunctorSpec::Polynomial(RankedAlphabet::new(symbols))
    };
    let sig = Signature::new(
        functor,
        NameSet::new(leaves.unwrap_or_default()),
        NameSet::new(outputs.unwrap_or_else(|| vec!["0".into(), "1".into()])),
    );
    sig.validate().map_err(|e| at_line(functor_line, e))?;
    let Some((states_line, state_names)) = states else {
        return perr(functor_line, "missing `states` line");
    };
    let index: HashMap<&str, usize> = state_names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    if index.len() != state_names.len() {
        return perr(states_line, "duplicate state name");
    }
    let state = |line: usize, name: &str| -> Result<usize> {
        index.get(name).copied().ok_or_else(|| Error::Parse {
            line,
            message: format!("unknown state `{name}`"),
        })
    };

    let mut leaf_init: Vec<Option<usize>> = vec![None; sig.leaves.len()];
    let mut trans: BTreeMap<Layer<usize>, usize> = BTreeMap::new();
    let mut default = None;
    let mut output: Vec<Option<usize>> = vec![None; state_names.len()];

    for &(line, kw, rest) in &lines {
        match kw {
            "leaf" => {
                let (l, r) = arrow(line, rest)?;
                let Some(x) = sig.leaves.index_of(&l) else {
                    return perr(line, format!("unknown leaf `{l}`"));
                };
                if leaf_init[x].is_some() {
                    return perr(line, format!("duplicate initialization for leaf `{l}`"));
                }
                leaf_init[x] = Some(state(line, &r)?);
            }
            "trans" => {
                let (l, r) = arrow(line, rest)?;
                let layer = parse_layer(&l, &sig, |n| index.get(n).copied())
                    .map_err(|e| at_line(line, e))?;
                let target = state(line, &r)?;
                if trans.insert(layer, target).is_some() {
                    return perr(line, format!("duplicate transition for `{l}`"));
                }
            }
            "default" => {
                let (l, r) = arrow(line, rest)?;
                if !l.is_empty() {
                    return perr(line, "expected `default -> state`");
                }
                if default.is_some() {
                    return perr(line, "duplicate `default` line");
                }
                default = Some(state(line, &r)?);
            }
            "out" => {
                let (l, r) = arrow(line, rest)?;
                let q = state(line, &l)?;
                let Some(o) = sig.outputs.index_of(&r) else {
                    return perr(line, format!("unknown output value `{r}`"));
                };
                if output[q].is_some() {
                    return perr(line, format!("duplicate output for state `{l}`"));
                }
                output[q] = Some(o);
            }
            _ => {}
        }
    }

    let leaf_init = leaf_init
        .into_iter()
        .enumerate()
        .map(|(x, q)| {
            q.ok_or_else(|| Error::Parse {
                line: states_line,
                message: format!("no `leaf` line for `{}`", sig.leaves.name(x)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let output = output
        .into_iter()
        .enumerate()
        .map(|(q, o)| {
            o.ok_or_else(|| Error::Parse {
                line: states_line,
                message: format!("no `out` line for state `{}`", state_names[q]),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Automaton::new(sig, state_names, leaf_init, trans, default, output)
        .map_err(|e| at_line(states_line, e))
}

/// Prints an automaton in the text format; `parse_automaton` reads it back.
pub fn print_automaton(aut: &Automaton) -> String {
    let sig = aut.signature();
    let mut out = String::new();
    match &sig.functor {
        FunctorSpec::Polynomial(alphabet) => {
            out.push_str("functor polynomial\n");
            out.push_str("symbols");
            for s in alphabet.symbols() {
                let _ = write!(out, " {}/{}", s.name, s.arity);
            }
            out.push('\n');
        }
        FunctorSpec::FinitePowerset { max_branch: None } => out.push_str("functor powerset\n"),
        FunctorSpec::FinitePowerset {
            max_branch: Some(k),
        } => {
            let _ = writeln!(out, "functor powerset max {k}");
        }
    }
    let _ = writeln!(out, "leaves {}", sig.leaves.names().join(" "));
    let _ = writeln!(out, "outputs {}", sig.outputs.names().join(" "));
    let _ = writeln!(out, "states {}", aut.states().join(" "));
    for x in 0..sig.leaves.len() {
        let _ = writeln!(
            out,
            "leaf {} -> {}",
            sig.leaves.name(x),
            aut.state_name(aut.leaf_init(x))
        );
    }
    for (layer, &q) in aut.transitions() {
        let _ = writeln!(
            out,
            "trans {} -> {}",
            aut.show_layer(layer),
            aut.state_name(q)
        );
    }
    if let Some(q) = aut.default_target() {
        let _ = writeln!(out, "default -> {}", aut.state_name(q));
    }
    for q in 0..aut.state_count() {
        let _ = writeln!(
            out,
            "out {} -> {}",
            aut.state_name(q),
            sig.outputs.name(aut.output(q))
        );
    }
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering. States are nodes labelled `name/output`; unary
/// transitions are plain edges and every other layer goes through a small
/// surrogate node standing in for the hyperedge.
pub fn to_dot(aut: &Automaton) -> String {
    let sig = aut.signature();
    let mut out = String::from("digraph automaton {\n  rankdir=LR;\n  node [shape=circle];\n");
    for q in 0..aut.state_count() {
        let _ = writeln!(
            out,
            "  s{q} [label=\"{}/{}\"];",
            dot_escape(aut.state_name(q)),
            dot_escape(sig.outputs.name(aut.output(q)))
        );
    }
    for x in 0..sig.leaves.len() {
        let _ = writeln!(
            out,
            "  leaf{x} [shape=plaintext, label=\"{}\"];\n  leaf{x} -> s{};",
            dot_escape(sig.leaves.name(x)),
            aut.leaf_init(x)
        );
    }
    for (k, (layer, &target)) in aut.transitions().iter().enumerate() {
        match layer {
            Layer::Sym { symbol, children } if children.len() == 1 => {
                let name = sig.functor.alphabet().map_or("?", |a| a.name(*symbol));
                let _ = writeln!(
                    out,
                    "  s{} -> s{target} [label=\"{}\"];",
                    children[0],
                    dot_escape(name)
                );
            }
            _ => {
                let label = match layer {
                    Layer::Sym { symbol, .. } => sig
                        .functor
                        .alphabet()
                        .map_or("?", |a| a.name(*symbol))
                        .to_string(),
                    Layer::Set(_) => "{}".to_string(),
                };
                let _ = writeln!(
                    out,
                    "  t{k} [shape=box, width=0.2, height=0.2, label=\"{}\"];",
                    dot_escape(&label)
                );
                for (pos, c) in layer.children().iter().enumerate() {
                    let _ = writeln!(out, "  s{c} -> t{k} [label=\"{pos}\", arrowhead=none];");
                }
                let _ = writeln!(out, "  t{k} -> s{target};");
            }
        }
    }
    if let Some(q) = aut.default_target() {
        let _ = writeln!(
            out,
            "  default [shape=plaintext, label=\"default\"];\n  default -> s{q} [style=dashed];"
        );
    }
    out.push_str("}\n");
    out
}
