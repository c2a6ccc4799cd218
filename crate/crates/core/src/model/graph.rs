//! Wire-graph compilation and contraction.
//!
//! A sequent flattens to a tensor network: every atomic slot of every
//! term site (context entries, the conclusion, both sides of each
//! connection) is an anchor, and anchors are merged into wires by the
//! positional pairing of connections and by the two occurrences of each
//! variable.  Constants become nodes carrying their declared tensor; `1`
//! contributes nothing; `D[T]` contributes the scalar factor `dim(T)`.
//!
//! Conjugation is decided by parity.  A constant occurrence starts from
//! the number of stars on it and adds one mark when it sits on the right
//! side of a connection (the pairing is sesquilinear, `{m : n}` evaluates
//! to `m * conj(n)`) or inside a context entry (forced by the dagger
//! flip's adjoint reading).  Odd total parity conjugates the tensor.  A
//! starred constant occurrence also attaches its legs in reversed axis
//! order, since its site type is the reverse of its declared type.
//!
//! `contract_naive` is the brute-force summation oracle; `contract` folds
//! nodes into an accumulator pairwise and must agree with the oracle to
//! `1e-12` relative.

use super::{Signature, Tensor};
use crate::canon::canonicalize;
use crate::error::{Error, Result};
use crate::rewrite::{step, Redex};
use crate::sequent::Sequent;
use crate::term::Term;
use crate::types::Ty;
use num_complex::Complex64;

/// One constant occurrence: its tensor, whether contraction conjugates
/// it, and the wire attached to each tensor axis (a wire may appear
/// twice, closing a partial trace on the node itself).
#[derive(Debug, Clone)]
pub struct WireNode {
    pub name: String,
    pub value: Tensor,
    pub conjugate: bool,
    pub legs: Vec<usize>,
}

/// A compiled sequent: nodes over shared wires plus the ordered open
/// boundary.  Every wire is referenced at most twice across node legs and
/// the two boundary lists; a wire referenced nowhere is a closed loop and
/// contributes its dimension as a factor.
#[derive(Debug, Clone)]
pub struct WireGraph {
    pub nodes: Vec<WireNode>,
    /// Wire of each atomic context slot, entries left to right.
    pub inputs: Vec<usize>,
    /// Wire of each atomic conclusion slot.
    pub outputs: Vec<usize>,
    pub wire_dims: Vec<usize>,
    /// Product of `D[..]` contributions.
    pub factor: f64,
}

impl WireGraph {
    pub fn result_shape(&self) -> Vec<usize> {
        self.inputs
            .iter()
            .chain(&self.outputs)
            .map(|w| self.wire_dims[*w])
            .collect()
    }
}

const MARK_CONCLUSION: usize = 0;
const MARK_CONTEXT: usize = 1;
const MARK_CONN_LEFT: usize = 0;
const MARK_CONN_RIGHT: usize = 1;

struct Builder<'a> {
    sig: &'a Signature,
    parent: Vec<usize>,
    anchor_dim: Vec<usize>,
    nodes: Vec<WireNode>, // legs hold anchor ids until compaction
    var_occs: Vec<(String, bool, Vec<usize>)>,
    factor: f64,
}

impl<'a> Builder<'a> {
    fn new(sig: &'a Signature) -> Builder<'a> {
        Builder {
            sig,
            parent: Vec::new(),
            anchor_dim: Vec::new(),
            nodes: Vec::new(),
            var_occs: Vec::new(),
            factor: 1.0,
        }
    }

    fn find(&mut self, a: usize) -> usize {
        let mut root = a;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = a;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) -> Result<()> {
        let (ra, rb) = (self.find(a), self.find(b));
        if self.anchor_dim[ra] != self.anchor_dim[rb] {
            return Err(Error::Internal(format!(
                "wire dimension mismatch: {} vs {}",
                self.anchor_dim[ra], self.anchor_dim[rb]
            )));
        }
        if ra != rb {
            self.parent[rb] = ra;
        }
        Ok(())
    }

    fn new_anchors(&mut self, ty: &Ty) -> Result<Vec<usize>> {
        let dims = self.sig.slot_dims(ty)?;
        let mut ids = Vec::with_capacity(dims.len());
        for d in dims {
            let id = self.parent.len();
            self.parent.push(id);
            self.anchor_dim.push(d);
            ids.push(id);
        }
        Ok(ids)
    }

    /// Flatten a term at its site type, returning one anchor per atomic
    /// slot.  `mark` is the site's conjugation mark.
    fn flatten(&mut self, term: &Term, ty: &Ty, mark: usize) -> Result<Vec<usize>> {
        match term {
            Term::Tensor(l, r) => {
                let Ty::Tensor(p, q) = ty else {
                    return Err(Error::Internal(format!(
                        "tensor term {term} at non-tensor type {ty}"
                    )));
                };
                let mut out = self.flatten(l, p, mark)?;
                out.extend(self.flatten(r, q, mark)?);
                Ok(out)
            }
            Term::One => Ok(Vec::new()),
            Term::Dim(t) => {
                self.factor *= self.sig.dim_of(t)? as f64;
                Ok(Vec::new())
            }
            Term::Product(fs) => {
                for f in fs {
                    self.flatten(f, &Ty::Unit, mark)?;
                }
                Ok(Vec::new())
            }
            Term::Var(name) => self.var_leaf(name, false, ty),
            Term::Const(name) => self.const_leaf(name, false, ty, mark),
            Term::Star(inner) => match &**inner {
                Term::Var(name) => self.var_leaf(name, true, ty),
                Term::Const(name) => self.const_leaf(name, true, ty, mark),
                other => Err(Error::Internal(format!(
                    "term {other}^ is not star-normal"
                ))),
            },
        }
    }

    fn var_leaf(&mut self, name: &str, starred: bool, ty: &Ty) -> Result<Vec<usize>> {
        let anchors = self.new_anchors(ty)?;
        self.var_occs.push((name.to_string(), starred, anchors.clone()));
        Ok(anchors)
    }

    fn const_leaf(
        &mut self,
        name: &str,
        starred: bool,
        ty: &Ty,
        mark: usize,
    ) -> Result<Vec<usize>> {
        let effective = if starred { ty.negate() } else { ty.clone() };
        let decl = self.sig.const_decl(name).ok_or_else(|| {
            Error::Symbolic(format!("constant #{name} is not declared"))
        })?;
        if decl.ty != effective {
            return Err(Error::Type(format!(
                "constant #{name} is declared at {} but occurs at {effective}",
                decl.ty
            )));
        }
        let value = decl.value.clone().ok_or_else(|| {
            Error::Symbolic(format!("constant #{name} has no value"))
        })?;
        let anchors = self.new_anchors(ty)?;
        let legs = if starred {
            anchors.iter().rev().copied().collect()
        } else {
            anchors.clone()
        };
        self.nodes.push(WireNode {
            name: name.to_string(),
            value,
            conjugate: (mark + starred as usize) % 2 == 1,
            legs,
        });
        Ok(anchors)
    }
}

/// Compile a valid sequent against a signature.  Every constant must be
/// declared and valued; `Error::Symbolic` reports the first that is not.
pub fn compile(seq: &Sequent, sig: &Signature) -> Result<WireGraph> {
    let mut b = Builder::new(sig);

    let mut inputs = Vec::new();
    for entry in seq.context() {
        inputs.extend(b.flatten(&entry.term, &entry.ty, MARK_CONTEXT)?);
    }
    let concl = seq.conclusion();
    let outputs = b.flatten(&concl.term, &concl.ty, MARK_CONCLUSION)?;

    for conn in seq.soup().iter() {
        let left = b.flatten(conn.left(), conn.ty(), MARK_CONN_LEFT)?;
        let right = b.flatten(conn.right(), conn.ty(), MARK_CONN_RIGHT)?;
        if left.len() != right.len() {
            return Err(Error::Internal(format!(
                "connection {conn} pairs {} slots with {}",
                left.len(),
                right.len()
            )));
        }
        for (l, r) in left.iter().zip(&right) {
            b.union(*l, *r)?;
        }
    }

    // A variable's two occurrences share their wires.  Occurrences of
    // opposite polarity sit at mutually dual site types, whose slot lists
    // are reversed relative to each other.
    let occs = std::mem::take(&mut b.var_occs);
    let mut by_name: std::collections::BTreeMap<&str, Vec<&(String, bool, Vec<usize>)>> =
        std::collections::BTreeMap::new();
    for occ in &occs {
        by_name.entry(occ.0.as_str()).or_default().push(occ);
    }
    for (name, pair) in by_name {
        let [first, second] = pair.as_slice() else {
            return Err(Error::Internal(format!(
                "variable {name} has {} occurrences",
                pair.len()
            )));
        };
        if first.2.len() != second.2.len() {
            return Err(Error::Internal(format!(
                "variable {name} covers {} slots at one occurrence and {} at the other",
                first.2.len(),
                second.2.len()
            )));
        }
        let reversed = first.1 != second.1;
        for (i, l) in first.2.iter().enumerate() {
            let j = if reversed { second.2.len() - 1 - i } else { i };
            b.union(*l, second.2[j])?;
        }
    }

    // Compact union-find classes into wire ids.
    let mut wire_of_root: std::collections::BTreeMap<usize, usize> =
        std::collections::BTreeMap::new();
    let mut wire_dims = Vec::new();
    let mut wire_of = |b: &mut Builder, anchor: usize| -> usize {
        let root = b.find(anchor);
        *wire_of_root.entry(root).or_insert_with(|| {
            wire_dims.push(b.anchor_dim[root]);
            wire_dims.len() - 1
        })
    };
    let all_anchors = 0..b.parent.len();
    for a in all_anchors {
        wire_of(&mut b, a);
    }
    let inputs = inputs.iter().map(|a| wire_of(&mut b, *a)).collect();
    let outputs = outputs.iter().map(|a| wire_of(&mut b, *a)).collect();
    let mut nodes = std::mem::take(&mut b.nodes);
    for node in nodes.iter_mut() {
        node.legs = node.legs.iter().map(|a| wire_of(&mut b, *a)).collect();
    }

    Ok(WireGraph { nodes, inputs, outputs, wire_dims, factor: b.factor })
}

/// Iterate every multi-index of `dims` (a single empty index when `dims`
/// is empty).
fn odometer(dims: &[usize], mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; dims.len()];
    loop {
        f(&idx);
        let mut pos = dims.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < dims[pos] {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn node_entry(node: &WireNode, assign: impl Fn(usize) -> usize) -> Complex64 {
    let idx: Vec<usize> = node.legs.iter().map(|w| assign(*w)).collect();
    let v = node.value.get(&idx);
    if node.conjugate {
        v.conj()
    } else {
        v
    }
}

/// Brute-force contraction: sum the product of all node entries over
/// every joint wire assignment.  The oracle `contract` must agree with;
/// capped because the assignment count is exponential in the wire count.
pub fn contract_naive(g: &WireGraph) -> Result<Tensor> {
    let total: u128 = g.wire_dims.iter().map(|d| *d as u128).product();
    if total > 1 << 24 {
        return Err(Error::CapExceeded(format!(
            "brute-force contraction over {total} assignments"
        )));
    }
    let mut out = Tensor::zeros(g.result_shape());
    odometer(&g.wire_dims, |assign| {
        let mut val = Complex64::new(g.factor, 0.0);
        for node in &g.nodes {
            val *= node_entry(node, |w| assign[w]);
        }
        let idx: Vec<usize> = g
            .inputs
            .iter()
            .chain(&g.outputs)
            .map(|w| assign[*w])
            .collect();
        out.add_at(&idx, val);
    });
    Ok(out)
}

/// Pairwise contraction: fold each node into an accumulator, summing out
/// wires whose two references have both been seen; then assemble the
/// boundary, where a wire shared by two boundary slots reads as a
/// Kronecker delta.
pub fn contract(g: &WireGraph) -> Result<Tensor> {
    let mut refs = vec![0usize; g.wire_dims.len()];
    for node in &g.nodes {
        for w in &node.legs {
            refs[*w] += 1;
        }
    }
    let boundary: Vec<usize> = g.inputs.iter().chain(&g.outputs).copied().collect();
    for w in &boundary {
        refs[*w] += 1;
    }

    let mut factor = Complex64::new(g.factor, 0.0);
    for (w, r) in refs.iter().enumerate() {
        if *r == 0 {
            factor *= g.wire_dims[w] as f64; // closed loop
        } else if *r > 2 {
            return Err(Error::Internal(format!(
                "wire {w} is referenced {r} times"
            )));
        }
    }

    // Accumulator axes are labelled by wire id.
    let mut acc = Tensor::scalar(Complex64::new(1.0, 0.0));
    let mut acc_axes: Vec<usize> = Vec::new();
    for node in &g.nodes {
        let (t, axes) = trace_self_wires(node, g)?;
        let shared: Vec<usize> =
            axes.iter().copied().filter(|w| acc_axes.contains(w)).collect();
        let open_acc: Vec<usize> =
            acc_axes.iter().copied().filter(|w| !shared.contains(w)).collect();
        let open_node: Vec<usize> =
            axes.iter().copied().filter(|w| !shared.contains(w)).collect();

        let out_axes: Vec<usize> =
            open_acc.iter().chain(&open_node).copied().collect();
        let out_dims: Vec<usize> =
            out_axes.iter().map(|w| g.wire_dims[*w]).collect();
        let shared_dims: Vec<usize> =
            shared.iter().map(|w| g.wire_dims[*w]).collect();
        let mut out = Tensor::zeros(out_dims);

        odometer(&out.shape().to_vec(), |out_idx| {
            let lookup = |w: usize, shared_idx: &[usize]| -> usize {
                if let Some(p) = out_axes.iter().position(|x| *x == w) {
                    out_idx[p]
                } else {
                    let p = shared.iter().position(|x| *x == w).unwrap();
                    shared_idx[p]
                }
            };
            let mut sum = Complex64::new(0.0, 0.0);
            odometer(&shared_dims, |shared_idx| {
                let acc_i: Vec<usize> =
                    acc_axes.iter().map(|w| lookup(*w, shared_idx)).collect();
                let t_i: Vec<usize> =
                    axes.iter().map(|w| lookup(*w, shared_idx)).collect();
                sum += acc.get(&acc_i) * t.get(&t_i);
            });
            out.add_at(out_idx, sum);
        });
        acc = out;
        acc_axes = out_axes;
    }

    // Assemble: assign each boundary wire once, read the accumulator, and
    // write every slot carrying that wire.
    for w in &acc_axes {
        if !boundary.contains(w) {
            return Err(Error::Internal(format!(
                "wire {w} left open without a boundary slot"
            )));
        }
    }
    let mut bwires: Vec<usize> = boundary.clone();
    bwires.sort_unstable();
    bwires.dedup();
    let bdims: Vec<usize> = bwires.iter().map(|w| g.wire_dims[*w]).collect();
    let mut out = Tensor::zeros(g.result_shape());
    odometer(&bdims, |assign| {
        let value_of = |w: usize| assign[bwires.iter().position(|x| *x == w).unwrap()];
        let acc_i: Vec<usize> = acc_axes.iter().map(|w| value_of(*w)).collect();
        let idx: Vec<usize> = boundary.iter().map(|w| value_of(*w)).collect();
        out.add_at(&idx, acc.get(&acc_i) * factor);
    });
    Ok(out)
}

/// Sum out wires that appear twice among one node's own legs (a partial
/// trace of the node), leaving one axis per remaining wire.
fn trace_self_wires(node: &WireNode, g: &WireGraph) -> Result<(Tensor, Vec<usize>)> {
    let conj = |v: Complex64| if node.conjugate { v.conj() } else { v };
    let mut axes: Vec<usize> = Vec::new();
    let mut doubled: Vec<usize> = Vec::new();
    for w in &node.legs {
        if node.legs.iter().filter(|x| *x == w).count() == 2 {
            if !doubled.contains(w) {
                doubled.push(*w);
            }
        } else {
            axes.push(*w);
        }
    }
    if doubled.is_empty() {
        let t = if node.conjugate { node.value.conj() } else { node.value.clone() };
        return Ok((t, node.legs.clone()));
    }
    let dims: Vec<usize> = axes.iter().map(|w| g.wire_dims[*w]).collect();
    let ddims: Vec<usize> = doubled.iter().map(|w| g.wire_dims[*w]).collect();
    let mut out = Tensor::zeros(dims);
    odometer(&out.shape().to_vec(), |out_idx| {
        let mut sum = Complex64::new(0.0, 0.0);
        odometer(&ddims, |d_idx| {
            let idx: Vec<usize> = node
                .legs
                .iter()
                .map(|w| {
                    if let Some(p) = doubled.iter().position(|x| x == w) {
                        d_idx[p]
                    } else {
                        out_idx[axes.iter().position(|x| x == w).unwrap()]
                    }
                })
                .collect();
            sum += conj(node.value.get(&idx));
        });
        out.add_at(out_idx, sum);
    });
    Ok((out, axes))
}

/// The interpretation of a sequent: contract its compiled graph, after
/// canonicalizing so that alpha-equivalent sequents produce identical
/// tensors and every variable covers at most one atomic slot.
pub fn interpret(seq: &Sequent, sig: &Signature) -> Result<Tensor> {
    contract(&compile(&canonicalize(seq)?, sig)?)
}

/// Whether one reduction step preserves the interpretation:
/// `‖interpret(J) − interpret(step(J, r))‖∞ ≤ tol · (1 + ‖interpret(J)‖∞)`.
pub fn check_step_preservation(
    seq: &Sequent,
    redex: &Redex,
    sig: &Signature,
    tol: f64,
) -> Result<bool> {
    let before = interpret(seq, sig)?;
    let after = interpret(&step(seq, redex)?, sig)?;
    Ok(after.max_abs_diff(&before)? <= tol * (1.0 + before.max_abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::sugar::loll;
    use crate::calculus::{dagger_flip, rule_const, rule_curry, rule_id, rule_negation, rule_uncurry};
    use crate::rewrite::{enumerate_redexes, normalize, RedexKind, Strategy};
    use crate::sequent::{Connection, Soup, TypedTerm};
    use crate::surface::parse_sequent;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn a() -> Ty {
        Ty::atom("A")
    }

    fn b() -> Ty {
        Ty::atom("B")
    }

    /// A=2, B=3, with valued constants f:(A^ @ B), c:A, m:I, n:I.
    fn sig() -> Signature {
        let mut sig = Signature::new();
        sig.declare_type("A", 2).unwrap();
        sig.declare_type("B", 3).unwrap();
        let f = Tensor::new(
            vec![2, 3],
            vec![z(1.0, 1.0), z(0.0, 0.0), z(2.0, -1.0), z(0.0, 2.0), z(1.0, 0.0), z(0.0, 0.0)],
        )
        .unwrap();
        sig.declare_const("f", loll(a(), b()), Some(f)).unwrap();
        let c = Tensor::new(vec![2], vec![z(0.5, 0.5), z(-1.0, 0.0)]).unwrap();
        sig.declare_const("c", a(), Some(c)).unwrap();
        sig.declare_const("m", Ty::Unit, Some(Tensor::scalar(z(1.0, 2.0)))).unwrap();
        sig.declare_const("n", Ty::Unit, Some(Tensor::scalar(z(3.0, -1.0)))).unwrap();
        sig
    }

    #[test]
    fn identity_wire_is_the_identity_matrix() {
        let s = parse_sequent("x:A |- x:A").unwrap();
        assert_eq!(interpret(&s, &sig()).unwrap(), Tensor::identity(2));
    }

    #[test]
    fn closed_variable_loop_contributes_the_dimension() {
        let conn = Connection::new(Term::var("x"), Term::var("x"), b());
        let s = Sequent::new(
            vec![],
            Soup::from_connections([conn]),
            TypedTerm::new(Term::One, Ty::Unit),
        )
        .unwrap();
        assert_eq!(interpret(&s, &sig()).unwrap(), Tensor::scalar(z(3.0, 0.0)));
    }

    #[test]
    fn dimension_terms_multiply() {
        let s = parse_sequent("|- { D[(A @ B)] : 1 } 1:I").unwrap();
        let t = interpret(&s, &sig()).unwrap();
        assert!(t.max_abs_diff(&Tensor::scalar(z(6.0, 0.0))).unwrap() <= 1e-12);
    }

    #[test]
    fn constant_arrow_is_its_matrix() {
        let s = rule_const("f", &loll(a(), b())).unwrap();
        let sig = sig();
        let t = interpret(&s, &sig).unwrap();
        assert_eq!(t, sig.const_decl("f").unwrap().value.clone().unwrap());
    }

    #[test]
    fn dagger_flip_is_the_adjoint() {
        let sig = sig();
        let s = rule_const("f", &loll(a(), b())).unwrap();
        let m = interpret(&s, &sig).unwrap();
        let md = interpret(&dagger_flip(&s).unwrap(), &sig).unwrap();
        assert_eq!(md.shape(), &[3, 2]);
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(md.get(&[j, i]), m.get(&[i, j]).conj());
            }
        }
    }

    #[test]
    fn negation_is_the_entrywise_conjugate() {
        let sig = sig();
        let s = rule_const("f", &loll(a(), b())).unwrap();
        let m = interpret(&s, &sig).unwrap();
        let mc = interpret(&rule_negation(&s).unwrap(), &sig).unwrap();
        assert_eq!(mc.shape(), m.shape());
        for (x, y) in m.data().iter().zip(mc.data()) {
            assert_eq!(*y, x.conj());
        }
    }

    #[test]
    fn connection_pairing_is_sesquilinear() {
        // {m : n} evaluates to m * conj(n), and the congruent presentation
        // {n^ : m^} is the same stored connection, so parity is invariant
        // under the (t : u) == (u^ : t^) congruence.
        let direct = Connection::new(Term::konst("m"), Term::konst("n"), Ty::Unit);
        let flipped = Connection::new(
            Term::konst("n").negate(),
            Term::konst("m").negate(),
            Ty::Unit,
        );
        assert_eq!(direct, flipped);
        let s = Sequent::new(
            vec![],
            Soup::from_connections([direct]),
            TypedTerm::new(Term::One, Ty::Unit),
        )
        .unwrap();
        // (1+2i) * conj(3-1i) = 1+7i
        assert_eq!(interpret(&s, &sig()).unwrap(), Tensor::scalar(z(1.0, 7.0)));
    }

    #[test]
    fn scalar_orientation_decides_conjugation() {
        let value = parse_sequent("|- { #m : 1 } 1:I").unwrap();
        assert_eq!(interpret(&value, &sig()).unwrap(), Tensor::scalar(z(1.0, 2.0)));
        let conj = parse_sequent("|- { 1 : #m } 1:I").unwrap();
        assert_eq!(interpret(&conj, &sig()).unwrap(), Tensor::scalar(z(1.0, -2.0)));
    }

    #[test]
    fn scalar_products_multiply() {
        let s = parse_sequent("|- { #m . #n : 1 } 1:I").unwrap();
        // (1+2i) * (3-1i) = 5+5i
        assert_eq!(interpret(&s, &sig()).unwrap(), Tensor::scalar(z(5.0, 5.0)));
    }

    #[test]
    fn consumption_moves_constants_without_changing_the_matrix() {
        let sig = sig();
        let before = parse_sequent("f:(A^ @ B) |- { f : (#c^ @ y) } y:B").unwrap();
        let after = parse_sequent("(#c^ @ y):(A^ @ B) |- y:B").unwrap();
        let mb = interpret(&before, &sig).unwrap();
        let ma = interpret(&after, &sig).unwrap();
        assert_eq!(mb, ma);

        let c = sig.const_decl("c").unwrap().value.clone().unwrap();
        assert_eq!(mb.shape(), &[2, 3, 3]);
        for i in 0..2 {
            for k in 0..3 {
                for j in 0..3 {
                    let want = if k == j { c.get(&[i]) } else { z(0.0, 0.0) };
                    assert_eq!(mb.get(&[i, k, j]), want);
                }
            }
        }

        let redexes = enumerate_redexes(&before);
        assert_eq!(redexes.len(), 1);
        assert_eq!(redexes[0].kind, RedexKind::ConsumeRight);
        assert!(check_step_preservation(&before, &redexes[0], &sig, 1e-12).unwrap());
    }

    #[test]
    fn teleportation_interprets_to_the_identity_throughout() {
        let mut sig = Signature::new();
        sig.declare_type("T", 2).unwrap();
        let s = parse_sequent(
            "x1:T |- { ((x1 @ x2^) @ 1) : ((x4 @ x4^) @ 1), \
             (1 @ (x5^ @ x5)) : (1 @ (x2^ @ x3)) } x3:T",
        )
        .unwrap();
        let id = Tensor::identity(2);
        assert!(interpret(&s, &sig).unwrap().max_abs_diff(&id).unwrap() <= 1e-9);

        let first = &enumerate_redexes(&s)[0];
        assert!(check_step_preservation(&s, first, &sig, 1e-9).unwrap());

        let (nf, trace) = normalize(&s, Strategy::Deterministic).unwrap();
        for step in &trace {
            let m = interpret(&step.result, &sig).unwrap();
            assert!(m.max_abs_diff(&id).unwrap() <= 1e-9, "step {}", step.index);
        }
        let target = parse_sequent("x:T |- x:T").unwrap();
        assert!(crate::canon::alpha_equiv(&nf, &target).unwrap());
    }

    #[test]
    fn unvalued_constants_are_symbolic_only() {
        let s = parse_sequent("|- { #q : 1 } 1:I").unwrap();
        match interpret(&s, &sig()) {
            Err(Error::Symbolic(msg)) => assert!(msg.contains("#q"), "{msg}"),
            other => panic!("expected a symbolic error, got {other:?}"),
        }
        let mut sig = sig();
        sig.declare_const("q", Ty::Unit, None).unwrap();
        assert!(matches!(interpret(&s, &sig), Err(Error::Symbolic(_))));
    }

    #[test]
    fn alpha_equivalent_sequents_interpret_identically() {
        let sig = sig();
        let id = rule_id("g", loll(a(), b())).unwrap();
        let expanded = rule_curry(&rule_uncurry(&id).unwrap()).unwrap();
        assert_eq!(interpret(&id, &sig).unwrap(), interpret(&expanded, &sig).unwrap());

        let one = parse_sequent("(#c^ @ y):(A^ @ B) |- y:B").unwrap();
        let two = parse_sequent("(#c^ @ w):(A^ @ B) |- w:B").unwrap();
        assert_eq!(interpret(&one, &sig).unwrap(), interpret(&two, &sig).unwrap());
    }

    #[test]
    fn pairwise_contraction_matches_the_oracle_on_compiled_graphs() {
        let sig = sig();
        let cases = [
            "x:A |- x:A",
            "f:(A^ @ B) |- { f : (#c^ @ y) } y:B",
            "|- { #m . #n : 1, D[(A @ B)] : 1 } 1:I",
            "v1:A, (v1^ @ v2):(A^ @ B) |- v2:B",
        ];
        for src in cases {
            let g = compile(&parse_sequent(src).unwrap(), &sig).unwrap();
            let naive = contract_naive(&g).unwrap();
            let fast = contract(&g).unwrap();
            assert!(
                fast.max_abs_diff(&naive).unwrap() <= 1e-12 * (1.0 + naive.max_abs()),
                "{src}"
            );
        }
    }

    #[test]
    fn hand_built_graphs_contract_correctly() {
        // Partial trace: one node, both legs on the same wire.
        let u = Tensor::new(
            vec![2, 2],
            vec![z(1.0, 1.0), z(2.0, 0.0), z(3.0, 0.0), z(4.0, -2.0)],
        )
        .unwrap();
        let g = WireGraph {
            nodes: vec![WireNode {
                name: "u".into(),
                value: u,
                conjugate: false,
                legs: vec![0, 0],
            }],
            inputs: vec![],
            outputs: vec![],
            wire_dims: vec![2],
            factor: 1.0,
        };
        let want = Tensor::scalar(z(5.0, -1.0));
        assert_eq!(contract_naive(&g).unwrap(), want);
        assert_eq!(contract(&g).unwrap(), want);

        // A bare boundary-to-boundary wire reads as a Kronecker delta.
        let delta = WireGraph {
            nodes: vec![],
            inputs: vec![0],
            outputs: vec![0],
            wire_dims: vec![3],
            factor: 1.0,
        };
        assert_eq!(contract(&delta).unwrap(), Tensor::identity(3));
        assert_eq!(contract_naive(&delta).unwrap(), Tensor::identity(3));

        // Two nodes sharing an internal wire compose as matrices.
        let sig = sig();
        let f = sig.const_decl("f").unwrap().value.clone().unwrap();
        let mut gt = Tensor::zeros(vec![3, 2]);
        for j in 0..3 {
            for i in 0..2 {
                gt.set(&[j, i], z((j * 2 + i) as f64, 1.0));
            }
        }
        let comp = WireGraph {
            nodes: vec![
                WireNode { name: "f".into(), value: f.clone(), conjugate: false, legs: vec![0, 1] },
                WireNode { name: "g".into(), value: gt.clone(), conjugate: false, legs: vec![1, 2] },
            ],
            inputs: vec![0],
            outputs: vec![2],
            wire_dims: vec![2, 3, 2],
            factor: 1.0,
        };
        let mut want = Tensor::zeros(vec![2, 2]);
        for i in 0..2 {
            for k in 0..2 {
                let mut sum = z(0.0, 0.0);
                for j in 0..3 {
                    sum += f.get(&[i, j]) * gt.get(&[j, k]);
                }
                want.set(&[i, k], sum);
            }
        }
        assert_eq!(contract(&comp).unwrap(), want);
        assert_eq!(contract_naive(&comp).unwrap(), want);
    }
}
