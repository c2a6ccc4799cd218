//! Replaying derivation scripts.
//!
//! A script is an S-expression tree whose every node names a rule and whose
//! derivation-valued arguments are subtrees.  The replayer walks it bottom
//! up, applies the named rule constructors, and reports each node with a
//! 1-based dotted path (`1` at the root, `1.2` for the second premise of
//! the root, and so on — counting only derivation arguments).  Any failure
//! is pinned to the path of the node where it happened.
//!
//! Opcodes:
//!
//! | form                 | rule                                   |
//! |----------------------|----------------------------------------|
//! | `(id x T)`           | Id axiom                               |
//! | `(one)`              | `\|- 1:I`                              |
//! | `(const f T?)`       | constant arrow (type from `T` or sig)  |
//! | `(comb name T...)`   | a combinator from the appendix alphabet|
//! | `(cut P Q)`          | Cut                                    |
//! | `(tenr P Q)`         | ⊗R                                     |
//! | `(tenl n P)`         | ⊗L at position `n` (0-based)           |
//! | `(untenl n P)`       | un⊗L at position `n`                   |
//! | `(exch n P)`         | Exchange at position `n`               |
//! | `(curry P)`          | Curry                                  |
//! | `(uncurry P)`        | Uncurry                                |
//! | `(neg P)`            | Negation                               |
//! | `(unitl i P)`        | λ_Γ forward, absorbing `{i^ : 1}`      |
//! | `(unitl- P)`         | λ_Γ inverse                            |
//! | `(unitr i P)`        | ρ_Γ forward                            |
//! | `(unitr- P)`         | ρ_Γ inverse                            |
//! | `(dagger P)`         | the †-flip                             |
//! | `(app T F)`          | ⊸E: apply `F`'s conclusion to `T`'s    |
//! | `(rename P)`         | α-rename every variable to fresh `r#`s |

use super::sugar;
use crate::error::{Error, Result};
use crate::model::Signature;
use crate::sequent::Sequent;
use crate::surface::{parse_term, parse_type, Sexp};
use crate::term::Term;
use crate::types::Ty;
use std::collections::BTreeMap;

/// One replayed node: its dotted path and the sequent it derived.
#[derive(Debug, Clone)]
pub struct NodeReport {
    pub path: String,
    pub sequent: Sequent,
}

/// A fully replayed derivation: the root sequent plus a post-order report
/// of every node.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub conclusion: Sequent,
    pub nodes: Vec<NodeReport>,
}

/// Replay a parsed script.  A signature, when given, supplies and
/// cross-checks constant types.
pub fn check_derivation(script: &Sexp, sig: Option<&Signature>) -> Result<Derivation> {
    let mut replay = Replay { sig, nodes: Vec::new(), rename_next: 1 };
    let conclusion = replay.eval(script, "1")?;
    Ok(Derivation { conclusion, nodes: replay.nodes })
}

struct Replay<'a> {
    sig: Option<&'a Signature>,
    nodes: Vec<NodeReport>,
    /// Global counter behind the `rename` opcode; every renamed variable
    /// across the whole script gets a distinct `r{n}`.
    rename_next: u32,
}

fn fail(path: &str, msg: impl Into<String>) -> Error {
    Error::Script { path: path.into(), msg: msg.into() }
}

/// Attach a node path to an error bubbling out of a rule or an argument
/// parser; errors that already carry a (deeper) path pass through.
fn wrap(path: &str, e: Error) -> Error {
    match e {
        Error::Script { .. } => e,
        other => fail(path, other.to_string()),
    }
}

impl Replay<'_> {
    fn eval(&mut self, sexp: &Sexp, path: &str) -> Result<Sequent> {
        let Sexp::List(items) = sexp else {
            return Err(fail(path, format!("expected a rule application, found `{}`", sexp.to_source())));
        };
        let Some(op) = items.first().and_then(Sexp::as_atom) else {
            return Err(fail(path, "a rule application starts with an opcode atom"));
        };
        let args = &items[1..];
        let seq = match op {
            "id" => {
                self.arity(op, args, 2, path)?;
                let x = self.atom(&args[0], path)?;
                let ty = self.ty(&args[1], path)?;
                super::rule_id(x, ty).map_err(|e| wrap(path, e))?
            }
            "one" => {
                self.arity(op, args, 0, path)?;
                super::rule_one()
            }
            "const" => {
                if args.is_empty() || args.len() > 2 {
                    return Err(fail(path, "`const` takes a name and an optional type"));
                }
                let raw = self.atom(&args[0], path)?;
                let name = raw.strip_prefix('#').unwrap_or(raw);
                let given = match args.get(1) {
                    Some(a) => Some(self.ty(a, path)?),
                    None => None,
                };
                let declared = self
                    .sig
                    .and_then(|s| s.const_decl(name))
                    .map(|d| d.ty.clone());
                let ty = match (given, declared) {
                    (Some(t), Some(d)) => {
                        if t != d {
                            return Err(fail(
                                path,
                                format!("constant {name} is declared at {d} in the signature, not {t}"),
                            ));
                        }
                        t
                    }
                    (Some(t), None) => t,
                    (None, Some(d)) => d,
                    (None, None) => {
                        return Err(fail(
                            path,
                            format!("constant {name} needs a type: none given and no signature declares one"),
                        ))
                    }
                };
                super::rule_const(name, &ty).map_err(|e| wrap(path, e))?
            }
            "comb" => {
                if args.is_empty() {
                    return Err(fail(path, "`comb` takes a combinator name and its type arguments"));
                }
                let name = self.atom(&args[0], path)?;
                let tys: Vec<Ty> = args[1..]
                    .iter()
                    .map(|a| self.ty(a, path))
                    .collect::<Result<_>>()?;
                self.combinator(name, &tys, path)?
            }
            "cut" | "tenr" | "app" => {
                self.arity(op, args, 2, path)?;
                let p = self.child(&args[0], path, 1)?;
                let q = self.child(&args[1], path, 2)?;
                let r = match op {
                    "cut" => super::rule_cut(&p, &q),
                    "tenr" => super::rule_tensor_r(&p, &q),
                    _ => super::rule_app(&p, &q),
                };
                r.map_err(|e| wrap(path, e))?
            }
            "tenl" | "untenl" | "exch" => {
                self.arity(op, args, 2, path)?;
                let n = self.position(&args[0], path)?;
                let p = self.child(&args[1], path, 1)?;
                let r = match op {
                    "tenl" => super::rule_tensor_l(&p, n),
                    "untenl" => super::rule_untensor_l(&p, n),
                    _ => super::rule_exchange(&p, n),
                };
                r.map_err(|e| wrap(path, e))?
            }
            "curry" | "uncurry" | "neg" | "dagger" | "unitl-" | "unitr-" | "rename" => {
                self.arity(op, args, 1, path)?;
                let p = self.child(&args[0], path, 1)?;
                match op {
                    "curry" => super::rule_curry(&p).map_err(|e| wrap(path, e))?,
                    "uncurry" => super::rule_uncurry(&p).map_err(|e| wrap(path, e))?,
                    "neg" => super::rule_negation(&p).map_err(|e| wrap(path, e))?,
                    "dagger" => super::dagger_flip(&p).map_err(|e| wrap(path, e))?,
                    "unitl-" => super::rule_unit_left_inv(&p).map_err(|e| wrap(path, e))?,
                    "unitr-" => super::rule_unit_right_inv(&p).map_err(|e| wrap(path, e))?,
                    _ => self.rename(&p),
                }
            }
            "unitl" | "unitr" => {
                self.arity(op, args, 2, path)?;
                let i = self.term(&args[0], path)?;
                let p = self.child(&args[1], path, 1)?;
                let r = if op == "unitl" {
                    super::rule_unit_left(&p, &i)
                } else {
                    super::rule_unit_right(&p, &i)
                };
                r.map_err(|e| wrap(path, e))?
            }
            other => return Err(fail(path, format!("unknown rule `{other}`"))),
        };
        self.nodes.push(NodeReport { path: path.to_string(), sequent: seq.clone() });
        Ok(seq)
    }

    fn combinator(&self, name: &str, tys: &[Ty], path: &str) -> Result<Sequent> {
        let want = |n: usize| -> Result<()> {
            if tys.len() == n {
                Ok(())
            } else {
                Err(fail(
                    path,
                    format!("combinator {name} takes {n} type argument(s), found {}", tys.len()),
                ))
            }
        };
        match name {
            "id" => want(1).map(|_| sugar::comb_id(&tys[0])),
            "sigma" => want(2).map(|_| sugar::comb_sigma(&tys[0], &tys[1])),
            "alpha" => want(3).map(|_| sugar::comb_alpha(&tys[0], &tys[1], &tys[2])),
            "eta" => want(1).map(|_| sugar::comb_eta(&tys[0])),
            "eps" => want(1).map(|_| sugar::comb_eps(&tys[0])),
            "lambda" => want(1).map(|_| sugar::comb_lambda(&tys[0])),
            "rho" => want(1).map(|_| sugar::comb_rho(&tys[0])),
            "bbar" => want(3).map(|_| sugar::comb_bbar(&tys[0], &tys[1], &tys[2])),
            "tbar" => want(4).map(|_| sugar::comb_tbar(&tys[0], &tys[1], &tys[2], &tys[3])),
            other => Err(fail(path, format!("unknown combinator `{other}`"))),
        }
    }

    /// `(rename P)`: give every variable of `P` a fresh `r{n}` name from
    /// the script-global counter, so two renamed premises are always
    /// variable-disjoint.
    fn rename(&mut self, p: &Sequent) -> Sequent {
        let mut map = BTreeMap::new();
        for name in p.all_var_names() {
            map.insert(name, format!("r{}", self.rename_next));
            self.rename_next += 1;
        }
        p.rename_vars(&map)
    }

    fn child(&mut self, sexp: &Sexp, path: &str, index: usize) -> Result<Sequent> {
        self.eval(sexp, &format!("{path}.{index}"))
    }

    fn arity(&self, op: &str, args: &[Sexp], n: usize, path: &str) -> Result<()> {
        if args.len() == n {
            Ok(())
        } else {
            Err(fail(
                path,
                format!("`{op}` takes {n} argument(s), found {}", args.len()),
            ))
        }
    }

    fn atom<'s>(&self, sexp: &'s Sexp, path: &str) -> Result<&'s str> {
        sexp.as_atom()
            .ok_or_else(|| fail(path, format!("expected an atom, found `{}`", sexp.to_source())))
    }

    fn ty(&self, sexp: &Sexp, path: &str) -> Result<Ty> {
        parse_type(&sexp.to_source()).map_err(|e| wrap(path, e))
    }

    fn term(&self, sexp: &Sexp, path: &str) -> Result<Term> {
        parse_term(&sexp.to_source()).map_err(|e| wrap(path, e))
    }

    fn position(&self, sexp: &Sexp, path: &str) -> Result<usize> {
        let a = self.atom(sexp, path)?;
        a.parse::<usize>()
            .map_err(|_| fail(path, format!("expected a position number, found `{a}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_script;

    fn run(src: &str) -> Result<Derivation> {
        check_derivation(&parse_script(src).unwrap(), None)
    }

    #[test]
    fn the_application_script_concludes_ft() {
        let d = run("(cut (id a A) (uncurry (id g (A^ @ B))))").unwrap();
        assert_eq!(
            d.conclusion.to_string(),
            "a:A, (v1^ @ v2):(A^ @ B) |- { a :[A] v1 } v2:B"
        );
        let paths: Vec<&str> = d.nodes.iter().map(|n| n.path.as_str()).collect();
        assert_eq!(paths, ["1.1", "1.2.1", "1.2", "1"]);
        // Up to the soup-manipulation steps this is the application `g a`.
        let direct = crate::calculus::rule_app(
            &crate::calculus::rule_id("t", crate::surface::parse_type("A").unwrap()).unwrap(),
            &crate::calculus::rule_id("f", crate::surface::parse_type("(A^ @ B)").unwrap())
                .unwrap(),
        )
        .unwrap();
        assert!(crate::rewrite::soup_equiv(&d.conclusion, &direct).unwrap());
    }

    #[test]
    fn failures_carry_the_node_path() {
        let err = run("(cut (id a A) (id a A))").unwrap_err();
        match err {
            Error::Script { path, msg } => {
                assert_eq!(path, "1");
                assert!(msg.contains("share the variable a"), "{msg}");
            }
            other => panic!("expected a script error, got {other}"),
        }
        let deep = run("(cut (id a A) (uncurry (id g B)))").unwrap_err();
        match deep {
            Error::Script { path, .. } => assert_eq!(path, "1.2"),
            other => panic!("expected a script error, got {other}"),
        }
    }

    #[test]
    fn rename_makes_premises_disjoint() {
        let d = run("(cut (id a A) (rename (id a A)))").unwrap();
        assert_eq!(d.conclusion.to_string(), "a:A |- { a :[A] r1 } r1:A");
    }

    #[test]
    fn const_types_come_from_the_signature_when_omitted() {
        let mut sig = Signature::new();
        sig.declare_type("A", 2).unwrap();
        sig.declare_type("B", 2).unwrap();
        sig.declare_const("f", parse_type("(A^ @ B)").unwrap(), None).unwrap();
        let script = parse_script("(const f)").unwrap();
        let d = check_derivation(&script, Some(&sig)).unwrap();
        assert_eq!(d.conclusion.to_string(), "v1:A |- { #f :[(A^ @ B)] (v1^ @ v2) } v2:B");
        // Without a signature the same script cannot resolve the type.
        assert!(matches!(run("(const f)"), Err(Error::Script { .. })));
        // A contradictory explicit type is rejected.
        let clash = parse_script("(const f (B^ @ A))").unwrap();
        assert!(check_derivation(&clash, Some(&sig)).is_err());
    }

    #[test]
    fn combinators_and_dagger_replay() {
        let d = run("(dagger (uncurry (comb eta A)))").unwrap();
        assert_eq!(d.conclusion.to_string(), "(x^ @ x):(A^ @ A) |- 1:I");
        assert!(run("(comb sigma A)").is_err());
        assert!(run("(comb nosuch A)").is_err());
    }

    #[test]
    fn unit_opcodes_cycle_a_scalar_hypothesis() {
        let base = run("(untenl 0 (uncurry (comb lambda A)))").unwrap();
        assert_eq!(base.conclusion.to_string(), "1:I, a:A |- a:A");
        let cycled = run("(unitl 1 (unitl- (untenl 0 (uncurry (comb lambda A)))))").unwrap();
        assert_eq!(cycled.conclusion, base.conclusion);
        let swapped = run("(unitr 1 (unitl- (untenl 0 (uncurry (comb lambda A)))))").unwrap();
        assert_eq!(swapped.conclusion.to_string(), "a:A, 1:I |- a:A");
        assert!(run("(unitr- (one))").is_err());
    }
}
