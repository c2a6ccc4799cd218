//! Soup rewriting.
//!
//! A *redex* is a connection together with one applicable rule:
//!
//! * `bifunctor` — `{(a @ b) : (c @ d)}` at `(T @ U)` splits into
//!   `{a : c}` at `T` and `{b : d}` at `U`;
//! * `trace` — `{x : x}` at `T` (a variable meeting itself) becomes the
//!   scalar connection `{D[T] : 1}`;
//! * `cancel` — `{1 : 1}` disappears;
//! * `consume-left` / `consume-right` — a connection `{t : u}` whose
//!   replaced side is a constant-free bundle (`1` and `D[T]` count as
//!   constants: only captured variables are substitutable) acts as an
//!   explicit substitution `[t/u]` (respectively `[u/t]`) and is consumed.
//!   A bare-variable side substitutes through its one occurrence
//!   elsewhere; a composite side requires a verbatim occurrence of itself
//!   (or its negation) elsewhere, and the connection stays inert
//!   otherwise;
//! * `product-split` — a scalar connection with a product side splits
//!   factorwise, `{m . p : n . q}` into `{m : n}, {p : q}`, padding the
//!   shorter factor list with `1`.  Splitting is withheld when either side
//!   is a bare (possibly starred) variable, where substitution already
//!   applies; this keeps the two overlapping rules joinable.
//!
//! Normalization applies redexes until none remain, under a deterministic
//! or a seeded-random strategy, within the a-priori step bound
//! `2*W + 3*|S|`.  The returned normal form is *canonical*: residual
//! variable-free scalar connections are rewritten to the sesquilinear
//! factor form `{f : 1}` (so `{#m : #n}` and `{#m . #n^ : 1}` meet), and
//! the result is alpha-canonicalized.

use crate::canon::canonicalize;
use crate::error::{Error, Result};
use crate::sequent::{Connection, Sequent, Soup, TypedTerm};
use crate::term::Term;
use crate::types::Ty;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::collections::VecDeque;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RedexKind {
    Bifunctor,
    Trace,
    Cancel,
    ConsumeLeft,
    ConsumeRight,
    ProductSplit,
}

impl fmt::Display for RedexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RedexKind::Bifunctor => "bifunctor",
            RedexKind::Trace => "trace",
            RedexKind::Cancel => "cancel",
            RedexKind::ConsumeLeft => "consume-left",
            RedexKind::ConsumeRight => "consume-right",
            RedexKind::ProductSplit => "product-split",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Redex {
    pub kind: RedexKind,
    pub conn: Connection,
}

/// All redexes of `seq`, in a deterministic order (kind, then connection).
/// Duplicate soup copies contribute one entry; applying it rewrites one
/// copy.
pub fn enumerate_redexes(seq: &Sequent) -> Vec<Redex> {
    let mut out = Vec::new();
    let mut seen: Vec<&Connection> = Vec::new();
    for conn in seq.soup().iter() {
        if seen.iter().any(|c| *c == conn) {
            continue;
        }
        seen.push(conn);
        let (l, r) = (conn.left(), conn.right());

        if matches!(l, Term::Tensor(..)) && matches!(r, Term::Tensor(..)) {
            out.push(Redex { kind: RedexKind::Bifunctor, conn: conn.clone() });
        }
        if l == r && l.as_var().is_some() {
            out.push(Redex { kind: RedexKind::Trace, conn: conn.clone() });
        }
        if *l == Term::One && *r == Term::One {
            out.push(Redex { kind: RedexKind::Cancel, conn: conn.clone() });
        }
        if l != r {
            if r.is_constant_free() && replaceable(seq, conn, r) {
                out.push(Redex { kind: RedexKind::ConsumeLeft, conn: conn.clone() });
            }
            if l.is_constant_free() && replaceable(seq, conn, l) {
                out.push(Redex { kind: RedexKind::ConsumeRight, conn: conn.clone() });
            }
        }
        if *conn.ty() == Ty::Unit
            && (matches!(l, Term::Product(_)) || matches!(r, Term::Product(_)))
            && l.as_var().is_none()
            && r.as_var().is_none()
        {
            out.push(Redex { kind: RedexKind::ProductSplit, conn: conn.clone() });
        }
    }
    out.sort();
    out
}

/// Whether the substitution replacing `repl` can actually act: a bare
/// variable must have its twin occurrence outside this connection; a
/// composite must occur verbatim (or negated) outside it.  `repl` is
/// already known constant-free, so it is a genuine bundle of captured
/// variables (`1` and `D[T]` count as constants and never get here).
fn replaceable(seq: &Sequent, conn: &Connection, repl: &Term) -> bool {
    if let Some((name, _)) = repl.as_var() {
        let inside =
            conn.left().var_occurrences(name) + conn.right().var_occurrences(name);
        inside == 1
    } else {
        occurs_outside(seq, conn, repl) || occurs_outside(seq, conn, &repl.negate())
    }
}

fn occurs_outside(seq: &Sequent, conn: &Connection, needle: &Term) -> bool {
    if seq
        .context()
        .iter()
        .any(|e| e.term.contains_subterm(needle))
        || seq.conclusion().term.contains_subterm(needle)
    {
        return true;
    }
    let mut skipped = false;
    for c in seq.soup().iter() {
        if !skipped && c == conn {
            skipped = true;
            continue;
        }
        if c.left().contains_subterm(needle) || c.right().contains_subterm(needle) {
            return true;
        }
    }
    false
}

/// Apply one redex.  The result is revalidated; a failure there is a
/// kernel bug (subject reduction), not an input error.
pub fn step(seq: &Sequent, redex: &Redex) -> Result<Sequent> {
    let mut soup = seq.soup().clone();
    if !soup.remove_one(&redex.conn) {
        return Err(Error::Rule(format!(
            "redex connection {} is not in the soup",
            redex.conn
        )));
    }
    let mut context: Vec<TypedTerm> = seq.context().to_vec();
    let mut conclusion = seq.conclusion().clone();
    let conn = &redex.conn;

    match redex.kind {
        RedexKind::Bifunctor => {
            let (Term::Tensor(a, b), Term::Tensor(c, d), Ty::Tensor(tl, tr)) =
                (conn.left(), conn.right(), conn.ty())
            else {
                return Err(Error::Internal(format!(
                    "bifunctor redex on non-tensor connection {conn}"
                )));
            };
            soup.insert(Connection::new((**a).clone(), (**c).clone(), (**tl).clone()));
            soup.insert(Connection::new((**b).clone(), (**d).clone(), (**tr).clone()));
        }
        RedexKind::Trace => {
            soup.insert(Connection::new(
                Term::dim(conn.ty().clone()),
                Term::One,
                Ty::Unit,
            ));
        }
        RedexKind::Cancel => {}
        RedexKind::ConsumeLeft => {
            substitute(&mut context, &mut soup, &mut conclusion, conn.left(), conn.right())?;
        }
        RedexKind::ConsumeRight => {
            substitute(&mut context, &mut soup, &mut conclusion, conn.right(), conn.left())?;
        }
        RedexKind::ProductSplit => {
            let mut ls = conn.left().factors();
            let mut rs = conn.right().factors();
            while ls.len() < rs.len() {
                ls.push(Term::One);
            }
            while rs.len() < ls.len() {
                rs.push(Term::One);
            }
            for (a, b) in ls.into_iter().zip(rs) {
                soup.insert(Connection::new(a, b, Ty::Unit));
            }
        }
    }

    Sequent::from_parts(context, soup, conclusion, seq.fresh_counter())
        .map_err(|e| Error::Internal(format!("step produced an invalid sequent: {e}")))
}

/// Perform the substitution `[keep/repl]` across context, soup, and
/// conclusion (exactly one site changes).
fn substitute(
    context: &mut [TypedTerm],
    soup: &mut Soup,
    conclusion: &mut TypedTerm,
    keep: &Term,
    repl: &Term,
) -> Result<()> {
    if let Some((name, starred)) = repl.as_var() {
        let value = if starred { keep.negate() } else { keep.clone() };
        for entry in context.iter_mut() {
            entry.term = entry.term.subst_var(name, &value);
        }
        let conns: Vec<Connection> = soup
            .iter()
            .map(|c| {
                Connection::new(
                    c.left().subst_var(name, &value),
                    c.right().subst_var(name, &value),
                    c.ty().clone(),
                )
            })
            .collect();
        *soup = Soup::from_connections(conns);
        conclusion.term = conclusion.term.subst_var(name, &value);
        return Ok(());
    }

    // Composite side: replace one verbatim occurrence, preferring the
    // direct form, falling back to the negated pair.
    for (needle, value) in [(repl.clone(), keep.clone()), (repl.negate(), keep.negate())] {
        for entry in context.iter_mut() {
            if let Some(t) = entry.term.replace_subterm_once(&needle, &value) {
                entry.term = t;
                return Ok(());
            }
        }
        if let Some(t) = conclusion.term.replace_subterm_once(&needle, &value) {
            conclusion.term = t;
            return Ok(());
        }
        let mut conns: Vec<Connection> = soup.iter().cloned().collect();
        for c in conns.iter_mut() {
            if let Some(t) = c.left().replace_subterm_once(&needle, &value) {
                *c = Connection::new(t, c.right().clone(), c.ty().clone());
                *soup = Soup::from_connections(conns);
                return Ok(());
            }
            if let Some(t) = c.right().replace_subterm_once(&needle, &value) {
                *c = Connection::new(c.left().clone(), t, c.ty().clone());
                *soup = Soup::from_connections(conns);
                return Ok(());
            }
        }
    }
    Err(Error::Internal(format!(
        "consumption found no occurrence of {repl} to substitute"
    )))
}

/// A-priori bound on the number of steps any reduction of `seq` can take:
/// `2*W + 3*|S|`, where `W` sums, per connection, the atomic width of its
/// type plus any surplus scalar product factors.
pub fn step_bound(seq: &Sequent) -> usize {
    let w: usize = seq
        .soup()
        .iter()
        .map(|c| {
            c.ty().leaf_count()
                + c.left().product_excess().max(c.right().product_excess())
        })
        .sum();
    2 * w + 3 * seq.soup().len()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Always the first redex in the deterministic enumeration order.
    Deterministic,
    /// Uniform choice from a seeded generator; reproducible per seed.
    Seeded(u64),
}

#[derive(Debug, Clone)]
pub struct TraceStep {
    pub index: usize,
    pub redex: Redex,
    pub result: Sequent,
}

/// Reduce to normal form.  Returns the canonical normal form (residual
/// scalar pairs in sesquilinear factor form, then alpha-canonicalized)
/// and the raw step trace.  Exceeding the step bound is an internal
/// invariant breach, not an input error.
pub fn normalize(seq: &Sequent, strategy: Strategy) -> Result<(Sequent, Vec<TraceStep>)> {
    let bound = step_bound(seq);
    let mut rng = match strategy {
        Strategy::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        Strategy::Deterministic => None,
    };
    let mut current = seq.clone();
    let mut trace = Vec::new();
    loop {
        let redexes = enumerate_redexes(&current);
        if redexes.is_empty() {
            break;
        }
        if trace.len() >= bound {
            return Err(Error::Internal(format!(
                "normalization of `{seq}` exceeded its step bound {bound}"
            )));
        }
        let pick = match &mut rng {
            Some(rng) => rng.gen_range(0..redexes.len()),
            None => 0,
        };
        let redex = redexes[pick].clone();
        current = step(&current, &redex)?;
        trace.push(TraceStep { index: trace.len() + 1, redex, result: current.clone() });
    }
    let canonical = canonicalize(&scalar_residue(&current)?)?;
    Ok((canonical, trace))
}

/// The canonical normal form of `seq` under the deterministic strategy.
pub fn normal_form(seq: &Sequent) -> Result<Sequent> {
    Ok(normalize(seq, Strategy::Deterministic)?.0)
}

/// Soup equivalence: both sides reduce to the same canonical normal form.
pub fn soup_equiv(a: &Sequent, b: &Sequent) -> Result<bool> {
    Ok(normal_form(a)? == normal_form(b)?)
}

/// Rewrite residual variable-free scalar connections `{s : t}` into the
/// factor form `{s_i : 1} ∪ {t_j^ : 1}`, the sesquilinear reading of a
/// scalar pairing.  Connections touching variables are left alone.
fn scalar_residue(seq: &Sequent) -> Result<Sequent> {
    let mut changed = false;
    let mut out = Vec::new();
    for conn in seq.soup().iter() {
        let var_free = {
            let mut counts = std::collections::BTreeMap::new();
            conn.count_vars(&mut counts);
            counts.is_empty()
        };
        if *conn.ty() != Ty::Unit || !var_free {
            out.push(conn.clone());
            continue;
        }
        let mut emitted = Vec::new();
        for f in conn.left().factors() {
            emitted.push(Connection::new(f, Term::One, Ty::Unit));
        }
        for g in conn.right().factors() {
            emitted.push(Connection::new(g.negate(), Term::One, Ty::Unit));
        }
        if emitted.as_slice() != std::slice::from_ref(conn) {
            changed = true;
        }
        out.extend(emitted);
    }
    if !changed {
        return Ok(seq.clone());
    }
    Sequent::from_parts(
        seq.context().to_vec(),
        Soup::from_connections(out),
        seq.conclusion().clone(),
        seq.fresh_counter(),
    )
    .map_err(|e| Error::Internal(format!("scalar residue rewrite broke validity: {e}")))
}

/// The exhaustive reduction graph of `seq`: nodes are alpha-equivalence
/// classes (canonical forms), edges are single steps, explored
/// breadth-first up to `node_cap` classes.
#[derive(Debug, Clone)]
pub struct ReductionGraph {
    pub nodes: Vec<Sequent>,
    pub edges: Vec<(usize, RedexKind, usize)>,
    pub root: usize,
}

impl ReductionGraph {
    /// Indices of nodes with no outgoing edge (normal forms).
    pub fn sinks(&self) -> Vec<usize> {
        let mut has_out = vec![false; self.nodes.len()];
        for (src, _, _) in &self.edges {
            has_out[*src] = true;
        }
        (0..self.nodes.len()).filter(|i| !has_out[*i]).collect()
    }
}

pub fn reduction_graph(seq: &Sequent, node_cap: usize) -> Result<ReductionGraph> {
    let root = canonicalize(seq)?;
    let mut ids: HashMap<Sequent, usize> = HashMap::new();
    let mut nodes = vec![root.clone()];
    ids.insert(root, 0);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let node = nodes[id].clone();
        for redex in enumerate_redexes(&node) {
            let next = canonicalize(&step(&node, &redex)?)?;
            let next_id = match ids.get(&next) {
                Some(&i) => i,
                None => {
                    let i = nodes.len();
                    if i >= node_cap {
                        return Err(Error::CapExceeded(format!(
                            "reduction graph exceeded {node_cap} classes"
                        )));
                    }
                    nodes.push(next.clone());
                    ids.insert(next, i);
                    queue.push_back(i);
                    i
                }
            };
            edges.push((id, redex.kind, next_id));
        }
    }
    Ok(ReductionGraph { nodes, edges, root: 0 })
}
