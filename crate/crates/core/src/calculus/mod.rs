//! The sequent calculus: every inference rule as a checked constructor.
//!
//! Rules build new sequents from premises and re-validate the result, so
//! any output of this module satisfies typing and linearity by
//! construction.  Bidirectional ("double line") rules appear as a
//! forward/inverse pair.  `Cut` and `⊗R` never rename variables — premises
//! sharing a variable are rejected, and callers (or derivation scripts,
//! via the `rename` opcode) must α-rename first.
//!
//! The derived structural rules live here too: `dagger_flip` (swap the
//! single hypothesis with the conclusion and negate the soup) with its
//! defining macro expansion Negation → Uncurry → Exchange → Curry, the
//! reverse derivation of Negation from the flip, and `rule_app`, the
//! admissible ⊸-elimination.

pub mod script;
pub mod sugar;

use crate::error::{Error, Result};
use crate::sequent::{Connection, Sequent, Soup, TypedTerm};
use crate::term::Term;
use crate::types::Ty;
use std::collections::BTreeSet;

/// Id axiom: `x:T |- x:T`.
pub fn rule_id(var: &str, ty: Ty) -> Result<Sequent> {
    let entry = TypedTerm::new(Term::var(var), ty);
    Sequent::new(vec![entry.clone()], Soup::new(), entry)
}

/// The scalar-unit axiom `|- 1:I`.
pub fn rule_one() -> Sequent {
    Sequent::new(Vec::new(), Soup::new(), TypedTerm::new(Term::One, Ty::Unit))
        .expect("the unit sequent is valid")
}

/// Constant introduction: a declared constant `f : (A^ @ B)` enters the
/// calculus as the eta-expanded sequent `v1:A |- { #f : (v1^ @ v2) } v2:B`.
pub fn rule_const(name: &str, ty: &Ty) -> Result<Sequent> {
    let Ty::Tensor(p, q) = ty else {
        return Err(Error::Rule(format!(
            "constant {name} has type {ty}, which is not of function shape (P @ Q)"
        )));
    };
    let (a, b) = (Term::var("v1"), Term::var("v2"));
    let conn = Connection::new(
        Term::konst(name),
        Term::tensor(a.negate(), b.clone()),
        ty.clone(),
    );
    Sequent::from_parts(
        vec![TypedTerm::new(a, p.negate())],
        Soup::from_connections(vec![conn]),
        TypedTerm::new(b, (**q).clone()),
        3,
    )
}

fn joint_vars(a: &Sequent, b: &Sequent) -> Option<String> {
    let left: BTreeSet<String> = a.all_var_names();
    b.all_var_names().into_iter().find(|v| left.contains(v))
}

/// Cut: from `Γ ⊢_{S1} a:A` and `a':A, Δ ⊢_{S2} b:B` derive
/// `Γ, Δ ⊢_{S1 ∪ S2 ∪ {a:a'}} b:B`.  The premises must not share
/// variables.
pub fn rule_cut(left: &Sequent, right: &Sequent) -> Result<Sequent> {
    if let Some(v) = joint_vars(left, right) {
        return Err(Error::Rule(format!(
            "cut premises share the variable {v}; α-rename them apart first"
        )));
    }
    let Some(first) = right.context().first() else {
        return Err(Error::Rule(
            "cut needs a hypothesis at the front of the right premise".into(),
        ));
    };
    if first.ty != left.conclusion().ty {
        return Err(Error::Rule(format!(
            "cut type mismatch: left concludes {} but the right hypothesis is {}",
            left.conclusion().ty, first.ty
        )));
    }
    let mut context = left.context().to_vec();
    context.extend(right.context().iter().skip(1).cloned());
    let mut soup = left.soup().clone().union(right.soup().clone());
    soup.insert(Connection::new(
        left.conclusion().term.clone(),
        first.term.clone(),
        first.ty.clone(),
    ));
    Sequent::from_parts(
        context,
        soup,
        right.conclusion().clone(),
        left.fresh_counter().max(right.fresh_counter()),
    )
}

/// ⊗R: from `Γ ⊢_{S1} a:A` and `Δ ⊢_{S2} b:B` derive
/// `Γ, ⊗Δ ⊢_{S1 ∪ S2} (a @ b):(A @ B)`, collapsing Δ into one
/// left-nested tensor hypothesis.  The premises must not share variables.
pub fn rule_tensor_r(left: &Sequent, right: &Sequent) -> Result<Sequent> {
    if let Some(v) = joint_vars(left, right) {
        return Err(Error::Rule(format!(
            "⊗R premises share the variable {v}; α-rename them apart first"
        )));
    }
    let mut context = left.context().to_vec();
    if let Some(delta) = tensor_context(right.context()) {
        context.push(delta);
    }
    let soup = left.soup().clone().union(right.soup().clone());
    let (a, b) = (left.conclusion(), right.conclusion());
    Sequent::from_parts(
        context,
        soup,
        TypedTerm::new(
            Term::tensor(a.term.clone(), b.term.clone()),
            Ty::tensor(a.ty.clone(), b.ty.clone()),
        ),
        left.fresh_counter().max(right.fresh_counter()),
    )
}

/// Δ in tensor form: `t1:T1, ..., tn:Tn` as the single left-nested entry
/// `(((t1 @ t2) @ ...) @ tn)`.  `None` for the empty context.
fn tensor_context(entries: &[TypedTerm]) -> Option<TypedTerm> {
    let mut it = entries.iter().cloned();
    let first = it.next()?;
    Some(it.fold(first, |acc, e| {
        TypedTerm::new(Term::tensor(acc.term, e.term), Ty::tensor(acc.ty, e.ty))
    }))
}

/// Negation: `a:A ⊢_S b:B` becomes `a^:A^ ⊢_{S_*} b^:B^`.
pub fn rule_negation(j: &Sequent) -> Result<Sequent> {
    let [entry] = j.context() else {
        return Err(Error::Rule(format!(
            "negation needs exactly one hypothesis, found {}",
            j.context().len()
        )));
    };
    let concl = j.conclusion();
    Sequent::from_parts(
        vec![TypedTerm::new(entry.term.negate(), entry.ty.negate())],
        j.soup().negated(),
        TypedTerm::new(concl.term.negate(), concl.ty.negate()),
        j.fresh_counter(),
    )
}

/// Curry: move the leftmost hypothesis into the conclusion,
/// `a:A, Γ ⊢_S b:B` becomes `Γ ⊢_S (a^ @ b):(A^ @ B)`.
pub fn rule_curry(j: &Sequent) -> Result<Sequent> {
    if j.context().is_empty() {
        return Err(Error::Rule("curry needs a hypothesis to move".into()));
    }
    let mut context = j.context().to_vec();
    let a = context.remove(0);
    let b = j.conclusion();
    Sequent::from_parts(
        context,
        j.soup().clone(),
        TypedTerm::new(
            Term::tensor(a.term.negate(), b.term.clone()),
            Ty::tensor(a.ty.negate(), b.ty.clone()),
        ),
        j.fresh_counter(),
    )
}

/// Uncurry, the upward reading of Curry: `Γ ⊢_S (a^ @ b):(A^ @ B)`
/// becomes `a:A, Γ ⊢_S b:B`.  A variable conclusion of tensor type is
/// first α-expanded into a pair of fresh variables (a bundle renaming),
/// so `uncurry` applies to any tensor-typed conclusion.
pub fn rule_uncurry(j: &Sequent) -> Result<Sequent> {
    let concl = j.conclusion();
    let Ty::Tensor(p, q) = &concl.ty else {
        return Err(Error::Rule(format!(
            "uncurry needs a tensor-typed conclusion, found {}",
            concl.ty
        )));
    };
    let (context, soup, head, fresh) = match &concl.term {
        Term::Tensor(l, r) => (
            j.context().to_vec(),
            j.soup().clone(),
            ((**l).clone(), (**r).clone()),
            j.fresh_counter(),
        ),
        Term::Var(name) => {
            let mut scratch = j.clone();
            let v = scratch.fresh_var();
            let w = scratch.fresh_var();
            let repl = Term::tensor(Term::var(&v).negate(), Term::var(&w));
            let context = j
                .context()
                .iter()
                .map(|e| TypedTerm::new(e.term.subst_var(name, &repl), e.ty.clone()))
                .collect();
            let soup = Soup::from_connections(j.soup().iter().map(|c| {
                Connection::new(
                    c.left().subst_var(name, &repl),
                    c.right().subst_var(name, &repl),
                    c.ty().clone(),
                )
            }));
            (
                context,
                soup,
                (Term::var(v).negate(), Term::var(w)),
                scratch.fresh_counter(),
            )
        }
        other => {
            return Err(Error::Rule(format!(
                "uncurry needs a tensor pair or a variable as conclusion, found {other}"
            )));
        }
    };
    let (l, r) = head;
    let mut context = context;
    context.insert(0, TypedTerm::new(l.negate(), p.negate()));
    Sequent::from_parts(context, soup, TypedTerm::new(r, (**q).clone()), fresh)
}

/// ⊗L: fuse the adjacent hypotheses at `pos`, `pos+1` into one tensor
/// hypothesis.
pub fn rule_tensor_l(j: &Sequent, pos: usize) -> Result<Sequent> {
    if pos + 1 >= j.context().len() {
        return Err(Error::Rule(format!(
            "⊗L position {pos} out of range for {} hypotheses",
            j.context().len()
        )));
    }
    let mut context = j.context().to_vec();
    let b = context.remove(pos + 1);
    let a = context.remove(pos);
    context.insert(
        pos,
        TypedTerm::new(Term::tensor(a.term, b.term), Ty::tensor(a.ty, b.ty)),
    );
    Sequent::from_parts(context, j.soup().clone(), j.conclusion().clone(), j.fresh_counter())
}

/// un⊗L, the upward reading of ⊗L: split the tensor hypothesis at `pos`
/// into its two components.  The entry must be a literal tensor pair.
pub fn rule_untensor_l(j: &Sequent, pos: usize) -> Result<Sequent> {
    let Some(entry) = j.context().get(pos) else {
        return Err(Error::Rule(format!(
            "un⊗L position {pos} out of range for {} hypotheses",
            j.context().len()
        )));
    };
    let (Term::Tensor(tl, tr), Ty::Tensor(al, ar)) = (&entry.term, &entry.ty) else {
        return Err(Error::Rule(format!(
            "un⊗L needs a tensor pair hypothesis, found {}:{}",
            entry.term, entry.ty
        )));
    };
    let mut context = j.context().to_vec();
    context[pos] = TypedTerm::new((**tl).clone(), (**al).clone());
    context.insert(pos + 1, TypedTerm::new((**tr).clone(), (**ar).clone()));
    Sequent::from_parts(context, j.soup().clone(), j.conclusion().clone(), j.fresh_counter())
}

/// Exchange: swap the adjacent hypotheses at `pos`, `pos+1`.
pub fn rule_exchange(j: &Sequent, pos: usize) -> Result<Sequent> {
    if pos + 1 >= j.context().len() {
        return Err(Error::Rule(format!(
            "exchange position {pos} out of range for {} hypotheses",
            j.context().len()
        )));
    }
    let mut context = j.context().to_vec();
    context.swap(pos, pos + 1);
    Sequent::from_parts(context, j.soup().clone(), j.conclusion().clone(), j.fresh_counter())
}

/// λ_Γ forward: remove `{i^ : 1}` from the soup and prepend the
/// hypothesis `i:I`.
pub fn rule_unit_left(j: &Sequent, i: &Term) -> Result<Sequent> {
    let (soup, _) = take_unit_connection(j, i)?;
    let mut context = j.context().to_vec();
    context.insert(0, TypedTerm::new(i.clone(), Ty::Unit));
    Sequent::from_parts(context, soup, j.conclusion().clone(), j.fresh_counter())
}

/// λ_Γ inverse: drop the leading scalar hypothesis `i:I` and put
/// `{i^ : 1}` into the soup.
pub fn rule_unit_left_inv(j: &Sequent) -> Result<Sequent> {
    let Some(first) = j.context().first() else {
        return Err(Error::Rule("λ_Γ inverse needs a leading hypothesis".into()));
    };
    if first.ty != Ty::Unit {
        return Err(Error::Rule(format!(
            "λ_Γ inverse needs the leading hypothesis at type I, found {}",
            first.ty
        )));
    }
    let mut context = j.context().to_vec();
    let i = context.remove(0);
    let mut soup = j.soup().clone();
    soup.insert(Connection::new(i.term.negate(), Term::One, Ty::Unit));
    Sequent::from_parts(context, soup, j.conclusion().clone(), j.fresh_counter())
}

/// ρ_Γ forward: remove `{i^ : 1}` from the soup and append the
/// hypothesis `i:I`.
pub fn rule_unit_right(j: &Sequent, i: &Term) -> Result<Sequent> {
    let (soup, _) = take_unit_connection(j, i)?;
    let mut context = j.context().to_vec();
    context.push(TypedTerm::new(i.clone(), Ty::Unit));
    Sequent::from_parts(context, soup, j.conclusion().clone(), j.fresh_counter())
}

/// ρ_Γ inverse: drop the trailing scalar hypothesis `i:I` and put
/// `{i^ : 1}` into the soup.
pub fn rule_unit_right_inv(j: &Sequent) -> Result<Sequent> {
    let Some(last) = j.context().last() else {
        return Err(Error::Rule("ρ_Γ inverse needs a trailing hypothesis".into()));
    };
    if last.ty != Ty::Unit {
        return Err(Error::Rule(format!(
            "ρ_Γ inverse needs the trailing hypothesis at type I, found {}",
            last.ty
        )));
    }
    let mut context = j.context().to_vec();
    let i = context.pop().expect("checked nonempty");
    let mut soup = j.soup().clone();
    soup.insert(Connection::new(i.term.negate(), Term::One, Ty::Unit));
    Sequent::from_parts(context, soup, j.conclusion().clone(), j.fresh_counter())
}

fn take_unit_connection(j: &Sequent, i: &Term) -> Result<(Soup, Connection)> {
    let conn = Connection::new(i.negate(), Term::One, Ty::Unit);
    let mut soup = j.soup().clone();
    if !soup.remove_one(&conn) {
        return Err(Error::Rule(format!(
            "the soup has no connection {{{}^ : 1}} to absorb",
            i
        )));
    }
    Ok((soup, conn))
}

/// The †-flip: `a:A ⊢_S b:B` becomes `b:B ⊢_{S_*} a:A`.
pub fn dagger_flip(j: &Sequent) -> Result<Sequent> {
    let [entry] = j.context() else {
        return Err(Error::Rule(format!(
            "†-flip needs exactly one hypothesis, found {}",
            j.context().len()
        )));
    };
    Sequent::from_parts(
        vec![j.conclusion().clone()],
        j.soup().negated(),
        entry.clone(),
        j.fresh_counter(),
    )
}

/// The admissibility macro for the †-flip: Negation, then Uncurry (via
/// the empty-right-hand-side idiom, tensoring with `|- 1:I`), Exchange,
/// and Curry (stripping the `@ 1` again).  Structurally equal to
/// `dagger_flip` on every single-hypothesis sequent.
pub fn dagger_flip_macro(j: &Sequent) -> Result<Sequent> {
    let negated = rule_negation(j)?;
    let widened = rule_tensor_r(&negated, &rule_one())?;
    let opened = rule_uncurry(&widened)?;
    let swapped = rule_exchange(&opened, 0)?;
    strip_unit_tensor(&rule_curry(&swapped)?)
}

/// Negation derived from the †-flip (the interchangeability lemma):
/// flip, then the same Uncurry/Exchange/Curry dance from the other side.
pub fn negation_via_flip(j: &Sequent) -> Result<Sequent> {
    let flipped = dagger_flip(j)?;
    let widened = rule_tensor_r(&flipped, &rule_one())?;
    let opened = rule_uncurry(&widened)?;
    let swapped = rule_exchange(&opened, 0)?;
    strip_unit_tensor(&rule_curry(&swapped)?)
}

/// The upward reading of ⊗R against `|- 1:I`: a conclusion `(t @ 1):(T @ I)`
/// collapses back to `t:T`.
fn strip_unit_tensor(j: &Sequent) -> Result<Sequent> {
    let concl = j.conclusion();
    match (&concl.term, &concl.ty) {
        (Term::Tensor(t, one), Ty::Tensor(ty, unit))
            if **one == Term::One && **unit == Ty::Unit =>
        {
            Sequent::from_parts(
                j.context().to_vec(),
                j.soup().clone(),
                TypedTerm::new((**t).clone(), (**ty).clone()),
                j.fresh_counter(),
            )
        }
        _ => Err(Error::Rule(format!(
            "conclusion {}:{} does not end in `@ 1`",
            concl.term, concl.ty
        ))),
    }
}

/// The admissible ⊸E: from `Γ ⊢_{S1} t:A` and `Δ ⊢_{S2} f:(A^ @ B)`
/// derive `Γ, Δ ⊢_{S1 ∪ S2 ∪ {f : (t^ @ x)}} x:B` — the application `ft`
/// written out as its defining soup connection.
pub fn rule_app(tseq: &Sequent, fseq: &Sequent) -> Result<Sequent> {
    if let Some(v) = joint_vars(tseq, fseq) {
        return Err(Error::Rule(format!(
            "application premises share the variable {v}; α-rename them apart first"
        )));
    }
    let t = tseq.conclusion();
    let f = fseq.conclusion();
    let Ty::Tensor(p, b) = &f.ty else {
        return Err(Error::Rule(format!(
            "application needs a function of type (A^ @ B), found {}",
            f.ty
        )));
    };
    if **p != t.ty.negate() {
        return Err(Error::Rule(format!(
            "application type mismatch: argument has type {} but the function wants {}",
            t.ty,
            p.negate()
        )));
    }
    let mut context = tseq.context().to_vec();
    context.extend(fseq.context().iter().cloned());
    let mut used = tseq.all_var_names();
    used.extend(fseq.all_var_names());
    let mut counter = tseq.fresh_counter().max(fseq.fresh_counter());
    let x = loop {
        let cand = format!("v{counter}");
        counter += 1;
        if !used.contains(&cand) {
            break cand;
        }
    };
    let mut soup = tseq.soup().clone().union(fseq.soup().clone());
    soup.insert(Connection::new(
        f.term.clone(),
        Term::tensor(t.term.negate(), Term::var(&x)),
        f.ty.clone(),
    ));
    Sequent::from_parts(
        context,
        soup,
        TypedTerm::new(Term::var(&x), (**b).clone()),
        counter,
    )
}
