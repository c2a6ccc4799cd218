//! `dlc` — the command-line driver for the dagger lambda calculus kernel.
//!
//! Subcommands: `check` (sequent files and derivation scripts),
//! `normalize` (soup reduction with an optional trace), `equiv`
//! (soup equivalence of two judgements), `interp` (matrix semantics
//! against a signature), and `axioms` (the dagger compact closed laws).
//!
//! Exit codes: 0 success, 1 a well-formed input failed a semantic check,
//! 2 the input itself was unusable (parse/type/linearity errors, missing
//! values), 3 an internal invariant broke.  Output is deterministic for a
//! fixed input and seed; set `DLC_COLOR=1` to colorize verdicts, `0` (or
//! leave unset) for plain text.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dlc_core::calculus::script::check_derivation;
use dlc_core::model::{check_step_preservation, interpret, verify_axioms};
use dlc_core::rewrite::{normal_form, normalize, Strategy};
use dlc_core::surface::{parse_script, parse_sequents, parse_signature};
use dlc_core::{Error, Sequent};

#[derive(Parser)]
#[command(name = "dlc", version, about = "dagger lambda calculus toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check well-formedness: every sequent in a `.dlc` file, or every
    /// node of a `.dprf` derivation script.
    Check {
        file: PathBuf,
        /// Signature supplying constant types for scripts.
        #[arg(long)]
        sig: Option<PathBuf>,
    },
    /// Reduce each sequent in the file to soup normal form.
    Normalize {
        file: PathBuf,
        /// Print every reduction step.
        #[arg(long)]
        trace: bool,
        /// Pick redexes with a seeded generator instead of the
        /// deterministic first-redex strategy.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Decide soup equivalence of the first sequent of each file.
    Equiv { left: PathBuf, right: PathBuf },
    /// Interpret each sequent as a complex matrix under a signature.
    Interp {
        file: PathBuf,
        #[arg(long)]
        sig: PathBuf,
        /// Check that every reduction step preserves the matrix.
        #[arg(long)]
        verify_steps: bool,
    },
    /// Verify the dagger compact closed axioms at concrete dimensions.
    Axioms {
        /// Comma-separated atom dimensions, cycled over A, B, C, D.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        /// Seed for the random constant in the involution check.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Absolute entrywise tolerance for matrix agreement.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Take the dimensions from a signature's type declarations.
        #[arg(long)]
        sig: Option<PathBuf>,
    },
}

/// ANSI painter, switched by `DLC_COLOR`.
struct Paint {
    on: bool,
}

impl Paint {
    fn from_env() -> Paint {
        Paint { on: std::env::var("DLC_COLOR").as_deref() == Ok("1") }
    }

    fn good(&self, s: &str) -> String {
        if self.on { format!("\x1b[32m{s}\x1b[0m") } else { s.to_string() }
    }

    fn bad(&self, s: &str) -> String {
        if self.on { format!("\x1b[31m{s}\x1b[0m") } else { s.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let paint = Paint::from_env();
    match run(cli.cmd, &paint) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{} {e}", paint.bad("error:"));
            ExitCode::from(exit_for(&e))
        }
    }
}

/// Input problems are 2, internal breaches 3, everything else that can
/// error out of a command (rule and script violations) is 1.
fn exit_for(e: &Error) -> u8 {
    if e.is_internal() {
        3
    } else if e.is_input_error() || matches!(e, Error::Model(_)) {
        2
    } else {
        1
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::Model(format!("cannot read {}: {e}", path.display())))
}

fn first_sequent(path: &Path) -> Result<Sequent, Error> {
    let seqs = parse_sequents(&read(path)?)?;
    seqs.into_iter().next().ok_or_else(|| {
        Error::parse(1, 1, format!("{} contains no sequents", path.display()))
    })
}

fn run(cmd: Cmd, paint: &Paint) -> Result<u8, Error> {
    match cmd {
        Cmd::Check { file, sig } => cmd_check(&file, sig.as_deref(), paint),
        Cmd::Normalize { file, trace, seed } => cmd_normalize(&file, trace, seed),
        Cmd::Equiv { left, right } => cmd_equiv(&left, &right, paint),
        Cmd::Interp { file, sig, verify_steps } => cmd_interp(&file, &sig, verify_steps, paint),
        Cmd::Axioms { dims, seed, tol, sig } => cmd_axioms(dims, seed, tol, sig.as_deref(), paint),
    }
}

fn cmd_check(file: &Path, sig: Option<&Path>, paint: &Paint) -> Result<u8, Error> {
    let text = read(file)?;
    let sig = match sig {
        Some(p) => Some(parse_signature(&read(p)?)?),
        None => None,
    };
    if file.extension().is_some_and(|e| e == "dprf") {
        let derivation = check_derivation(&parse_script(&text)?, sig.as_ref())?;
        for node in &derivation.nodes {
            println!("node {} {} {}", node.path, paint.good("OK"), node.sequent);
        }
        println!("conclusion {}", derivation.conclusion);
    } else {
        let seqs = parse_sequents(&text)?;
        for (i, s) in seqs.iter().enumerate() {
            println!("sequent {} {} {}", i + 1, paint.good("OK"), s);
        }
        println!("checked {} sequent(s)", seqs.len());
    }
    Ok(0)
}

fn cmd_normalize(file: &Path, trace: bool, seed: Option<u64>) -> Result<u8, Error> {
    let strategy = match seed {
        Some(n) => Strategy::Seeded(n),
        None => Strategy::Deterministic,
    };
    for seq in parse_sequents(&read(file)?)? {
        let (nf, steps) = normalize(&seq, strategy)?;
        if trace {
            for st in &steps {
                println!(
                    "step {} {} {} => {}",
                    st.index, st.redex.kind, st.redex.conn, st.result
                );
            }
        }
        println!("{nf}");
    }
    Ok(0)
}

fn cmd_equiv(left: &Path, right: &Path, paint: &Paint) -> Result<u8, Error> {
    let l = normal_form(&first_sequent(left)?)?;
    let r = normal_form(&first_sequent(right)?)?;
    println!("left  {l}");
    println!("right {r}");
    if l == r {
        println!("{}", paint.good("equivalent"));
        Ok(0)
    } else {
        println!("{}", paint.bad("not equivalent"));
        Ok(1)
    }
}

fn cmd_interp(file: &Path, sig: &Path, verify_steps: bool, paint: &Paint) -> Result<u8, Error> {
    let sig = parse_signature(&read(sig)?)?;
    let mut drifted = false;
    for seq in parse_sequents(&read(file)?)? {
        if verify_steps {
            let (_, steps) = normalize(&seq, Strategy::Deterministic)?;
            let mut current = seq.clone();
            for st in &steps {
                let ok = check_step_preservation(&current, &st.redex, &sig, 1e-9)?;
                let verdict =
                    if ok { paint.good("preserved") } else { paint.bad("drifted") };
                println!("step {} {} {verdict}", st.index, st.redex.kind);
                drifted |= !ok;
                current = st.result.clone();
            }
        }
        let m = interpret(&seq, &sig)?;
        println!("shape {:?}", m.shape());
        for (k, v) in m.data().iter().enumerate() {
            let idx = unflatten(k, m.shape());
            let idx: Vec<String> = idx.iter().map(usize::to_string).collect();
            println!("[{}] = {}", idx.join(","), dlc_core::model::fmt_complex(*v));
        }
    }
    Ok(if drifted { 1 } else { 0 })
}

fn unflatten(mut k: usize, shape: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for (slot, dim) in idx.iter_mut().zip(shape).rev() {
        *slot = k % dim;
        k /= dim;
    }
    idx
}

fn cmd_axioms(
    dims: Option<Vec<usize>>,
    seed: u64,
    tol: f64,
    sig: Option<&Path>,
    paint: &Paint,
) -> Result<u8, Error> {
    let declared = match sig {
        Some(p) => Some(parse_signature(&read(p)?)?),
        None => None,
    };
    let dims = match (dims, &declared) {
        (Some(d), _) => d,
        (None, Some(s)) => {
            let d: Vec<usize> = s.atoms().map(|(_, dim)| dim).collect();
            if d.is_empty() { vec![2] } else { d }
        }
        (None, None) => vec![2],
    };
    let mut all_pass = true;
    for report in verify_axioms(&dims, seed, tol)? {
        let verdict = if report.pass {
            paint.good("PASS")
        } else {
            all_pass = false;
            paint.bad("FAIL")
        };
        println!("axiom {} {verdict} {:.3e}", report.name, report.max_err);
    }
    Ok(if all_pass { 0 } else { 1 })
}
