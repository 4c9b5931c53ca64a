//! `xpd`: command-line front end for the reasoning toolkit.
//!
//! Exit codes: 0 success, 1 logical negative (UNSAT, DIFFER, false, rejected,
//! counterexamples or disagreements found), 2 usage or input error, 3 budget
//! exceeded.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use xpd_core::ast::{parse_expr, parse_node_in, Alphabet, Expr, Fragment, NodeExpr};
use xpd_core::axioms::{check_script, fuzz_soundness, Verdict};
use xpd_core::decision::{self, EquivVerdict, PathEquivVerdict, SatVerdict};
use xpd_core::normal_form::{Limits, Reasoner};
use xpd_core::oracle::{self, Bounds};
use xpd_core::semantics::{parse_tree, print_tree, Evaluator, NodeId};
use xpd_core::Error;

#[derive(Parser)]
#[command(name = "xpd", version, about = "Downward XPath with data tests: evaluation, normal forms and decisions")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Comma-separated label alphabet, e.g. `a,b`.
    #[arg(long, global = true)]
    alphabet: Option<String>,
    /// Language fragment: `eq` (equality only) or `full`.
    #[arg(long, global = true, default_value = "full")]
    fragment: String,
    /// Largest level whose normal forms may be enumerated.
    #[arg(long, global = true, default_value_t = 2)]
    level_cap: usize,
    /// Largest number of candidates an enumeration may visit.
    #[arg(long, global = true, default_value_t = 200_000)]
    budget: u128,
    /// Seed for randomized subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Args, Clone, Copy)]
struct BoundArgs {
    /// Largest number of nodes of a searched tree.
    #[arg(long, default_value_t = 5)]
    max_nodes: usize,
    /// Largest depth of a searched tree.
    #[arg(long, default_value_t = 2)]
    max_depth: usize,
    /// Largest number of children of a node.
    #[arg(long, default_value_t = 4)]
    max_branch: usize,
    /// Largest number of data classes.
    #[arg(long, default_value_t = 5)]
    max_classes: usize,
}

impl From<BoundArgs> for Bounds {
    fn from(b: BoundArgs) -> Self {
        Bounds {
            max_nodes: b.max_nodes,
            max_depth: b.max_depth,
            max_branch: b.max_branch,
            max_classes: b.max_classes,
        }
    }
}

#[derive(Args)]
struct ExprArg {
    /// The expression (alternatively `--expr`).
    expr: Option<String>,
    /// The expression, as a flag.
    #[arg(long = "expr", value_name = "EXPR", conflicts_with = "expr")]
    expr_flag: Option<String>,
}

impl ExprArg {
    fn text(&self) -> Result<&str, Failure> {
        self.expr
            .as_deref()
            .or(self.expr_flag.as_deref())
            .ok_or_else(|| Failure::Usage("an expression is required".into()))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse an expression and print its printed form, sort, size and downward depth.
    Parse(ExprArg),
    /// Evaluate an expression on a tree file.
    Eval {
        #[command(flatten)]
        expr: ExprArg,
        /// File holding one data tree.
        #[arg(long)]
        tree: PathBuf,
        /// Dotted child-index path of the evaluation node, e.g. `0.1`.
        #[arg(long)]
        at: Option<String>,
    },
    /// Print the normal form of an expression.
    Normalize {
        #[command(flatten)]
        expr: ExprArg,
        /// Normalize at this level instead of the expression's depth.
        #[arg(long)]
        level: Option<usize>,
        /// Also print the rewriting log.
        #[arg(long)]
        log: bool,
    },
    /// Decide satisfiability.
    Sat {
        #[command(flatten)]
        expr: ExprArg,
        /// Write the verified model to this file.
        #[arg(long)]
        emit_model: Option<PathBuf>,
        /// Print the normalization and construction steps.
        #[arg(long)]
        trace: bool,
    },
    /// Like `sat`, writing the model to a file.
    Model {
        #[command(flatten)]
        expr: ExprArg,
        /// Write the verified model to this file.
        #[arg(long)]
        emit_model: PathBuf,
        /// Print the normalization and construction steps.
        #[arg(long)]
        trace: bool,
    },
    /// Decide equivalence of two node or two path expressions.
    Equiv {
        /// First expression.
        left: String,
        /// Second expression, of the same sort.
        right: String,
    },
    /// Search small trees for a model.
    OracleSat {
        #[command(flatten)]
        expr: ExprArg,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Compare both sides of random axiom instances on random trees.
    FuzzAxioms {
        /// Number of random trees.
        #[arg(long, default_value_t = 300)]
        trees: usize,
    },
    /// Check a proof script.
    CheckProof {
        /// The proof script.
        file: PathBuf,
    },
    /// Compare the decision procedure with the brute-force oracle.
    CrossCheck {
        /// Number of random Boolean combinations added to the corpus.
        #[arg(long, default_value_t = 100)]
        extra: usize,
        /// Use an oracle with `=` and `!=` exchanged (must report disagreements).
        #[arg(long)]
        mutate: bool,
        #[command(flatten)]
        bounds: BoundArgs,
    },
}

enum Failure {
    Usage(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_budget() {
            Failure::Budget(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

/// What a subcommand produced: text lines, the JSON verdict, and whether the
/// answer was positive.
struct Outcome {
    text: Vec<String>,
    json: Value,
    positive: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            if cli.global.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable"));
            } else {
                for line in &out.text {
                    println!("{line}");
                }
            }
            ExitCode::from(if out.positive { 0 } else { 1 })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

struct Ctx {
    alphabet: Alphabet,
    fragment: Fragment,
    limits: Limits,
}

impl Ctx {
    fn new(g: &Global) -> Result<Self, Failure> {
        let alphabet = g
            .alphabet
            .as_deref()
            .ok_or_else(|| Failure::Usage("--alphabet is required".into()))?;
        Ok(Ctx {
            alphabet: Alphabet::parse(alphabet)?,
            fragment: Fragment::parse(&g.fragment)?,
            limits: Limits {
                level_cap: g.level_cap,
                budget: g.budget,
                ..Limits::default()
            },
        })
    }

    fn reasoner(&self) -> Reasoner {
        Reasoner::with_limits(self.fragment, self.alphabet.clone(), self.limits)
    }

    fn node(&self, text: &str) -> Result<NodeExpr, Failure> {
        Ok(parse_node_in(text, &self.alphabet, self.fragment)?)
    }

    fn expr(&self, text: &str) -> Result<Expr, Failure> {
        Ok(parse_expr(text, &self.alphabet, self.fragment)?)
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::CheckProof { file } => return check_proof(file),
        Command::FuzzAxioms { trees } => {
            let ctx = Ctx::new(g)?;
            return Ok(fuzz(&ctx, *trees, g.seed));
        }
        _ => {}
    }
    let ctx = Ctx::new(g)?;
    match &cli.command {
        Command::Parse(e) => parse(&ctx, e.text()?),
        Command::Eval { expr, tree, at } => eval(&ctx, expr.text()?, tree, at.as_deref()),
        Command::Normalize { expr, level, log } => normalize(&ctx, expr.text()?, *level, *log),
        Command::Sat {
            expr,
            emit_model,
            trace,
        } => sat(&ctx, expr.text()?, emit_model.as_ref(), *trace),
        Command::Model {
            expr,
            emit_model,
            trace,
        } => sat(&ctx, expr.text()?, Some(emit_model), *trace),
        Command::Equiv { left, right } => equiv(&ctx, left, right),
        Command::OracleSat { expr, bounds } => oracle_sat(&ctx, expr.text()?, (*bounds).into()),
        Command::CrossCheck { extra, mutate, bounds } => cross_check(&ctx, *extra, *mutate, (*bounds).into(), g.seed),
        Command::CheckProof { .. } | Command::FuzzAxioms { .. } => unreachable!("handled above"),
    }
}

fn parse(ctx: &Ctx, text: &str) -> Result<Outcome, Failure> {
    let e = ctx.expr(text)?;
    let (sort, len) = match &e {
        Expr::Node(n) => ("node", n.size()),
        Expr::Path(p) => ("path", p.size()),
    };
    Ok(Outcome {
        text: vec![e.to_string(), format!("sort: {sort}  size: {len}  dd: {}", e.dd())],
        json: json!({"expr": e.to_string(), "sort": sort, "size": len, "dd": e.dd()}),
        positive: true,
    })
}

fn eval(ctx: &Ctx, text: &str, tree: &PathBuf, at: Option<&str>) -> Result<Outcome, Failure> {
    let src = fs::read_to_string(tree).map_err(|e| Failure::Usage(format!("{}: {e}", tree.display())))?;
    let t = parse_tree(&src, &ctx.alphabet)?;
    let path: Vec<usize> = match at {
        None | Some("") => Vec::new(),
        Some(s) => s
            .split('.')
            .map(|i| i.parse().map_err(|_| Failure::Usage(format!("bad child index `{i}` in --at"))))
            .collect::<Result<_, _>>()?,
    };
    let x = t.at_path(&path)?;
    match ctx.expr(text)?.desugar() {
        Expr::Node(e) => {
            let v = Evaluator::new(&t).holds(x, &e);
            Ok(Outcome {
                text: vec![v.to_string()],
                json: json!({"value": v, "node": x.0}),
                positive: v,
            })
        }
        Expr::Path(p) => {
            let mut ev = Evaluator::new(&t);
            let ends: Vec<usize> = ev.paths(&p)[x.0].ones().collect();
            Ok(Outcome {
                text: vec![format!("{ends:?}")],
                json: json!({"from": x.0, "to": ends}),
                positive: !ends.is_empty(),
            })
        }
    }
}

fn normalize(ctx: &Ctx, text: &str, level: Option<usize>, log: bool) -> Result<Outcome, Failure> {
    let r = ctx.reasoner();
    let mut lines = Vec::new();
    let json = match ctx.expr(text)? {
        Expr::Node(e) => {
            let nf = match level {
                Some(n) => r.normalize_node_at(&e, n)?,
                None => r.normalize_node(&e)?,
            };
            lines.push(format!("level {}: {} disjunct(s)", nf.level, nf.forms.len()));
            lines.extend(nf.forms.iter().map(|f| format!("  {f}")));
            if log {
                lines.extend(nf.log.iter().map(|l| format!("# {l}")));
            }
            json!({
                "sort": "node",
                "level": nf.level,
                "disjuncts": nf.forms.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                "log": if log { nf.log.clone() } else { Vec::new() },
            })
        }
        Expr::Path(p) => {
            let nf = match level {
                Some(n) => r.normalize_path_at(&p, n)?,
                None => r.normalize_path(&p)?,
            };
            let shown: Vec<String> = nf
                .disjuncts
                .iter()
                .map(|(g, p)| match g {
                    Some(g) => format!("[{g}]{p}"),
                    None => p.to_string(),
                })
                .collect();
            lines.push(format!("level {}: {} disjunct(s)", nf.level, shown.len()));
            lines.extend(shown.iter().map(|s| format!("  {s}")));
            if log {
                lines.extend(nf.log.iter().map(|l| format!("# {l}")));
            }
            json!({"sort": "path", "level": nf.level, "disjuncts": shown, "log": if log { nf.log.clone() } else { Vec::new() }})
        }
    };
    Ok(Outcome {
        text: lines,
        json,
        positive: true,
    })
}

fn sat(ctx: &Ctx, text: &str, emit: Option<&PathBuf>, trace: bool) -> Result<Outcome, Failure> {
    let r = ctx.reasoner();
    let phi = ctx.node(text)?;
    let mut steps = Vec::new();
    let verdict = decision::sat_traced(&r, &phi, &mut steps)?;
    let mut lines = Vec::new();
    if trace {
        lines.extend(steps.iter().map(|s| format!("# {s}")));
    }
    match verdict {
        SatVerdict::Sat(w) => {
            let tree = print_tree(&w.tree);
            if let Some(path) = emit {
                fs::write(path, format!("{tree}\n")).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            }
            lines.push("SAT".into());
            lines.push(tree.clone());
            Ok(Outcome {
                text: lines,
                json: json!({"verdict": "SAT", "model": tree, "nodes": w.tree.len(), "level": w.level,
                             "method": w.method.to_string(), "trace": if trace { steps } else { Vec::new() }}),
                positive: true,
            })
        }
        SatVerdict::Unsat => {
            lines.push("UNSAT".into());
            Ok(Outcome {
                text: lines,
                json: json!({"verdict": "UNSAT", "trace": if trace { steps } else { Vec::new() }}),
                positive: false,
            })
        }
    }
}

fn equiv(ctx: &Ctx, left: &str, right: &str) -> Result<Outcome, Failure> {
    let r = ctx.reasoner();
    match (ctx.expr(left)?, ctx.expr(right)?) {
        (Expr::Node(a), Expr::Node(b)) => match decision::equiv_node(&r, &a, &b)? {
            EquivVerdict::Equiv => Ok(equiv_yes()),
            EquivVerdict::Differ { tree, node } => {
                let t = print_tree(&tree);
                Ok(Outcome {
                    text: vec!["DIFFER".into(), format!("at node {} of {t}", node_path(&tree, node))],
                    json: json!({"verdict": "DIFFER", "tree": t, "node": node_path(&tree, node)}),
                    positive: false,
                })
            }
        },
        (Expr::Path(a), Expr::Path(b)) => match decision::equiv_path(&r, &a, &b)? {
            PathEquivVerdict::Equiv => Ok(equiv_yes()),
            PathEquivVerdict::Differ { tree, from, to } => {
                let t = print_tree(&tree);
                let (f, to) = (node_path(&tree, from), node_path(&tree, to));
                Ok(Outcome {
                    text: vec!["DIFFER".into(), format!("at pair ({f}, {to}) of {t}")],
                    json: json!({"verdict": "DIFFER", "tree": t, "from": f, "to": to}),
                    positive: false,
                })
            }
        },
        _ => Err(Failure::Usage("both expressions must have the same sort".into())),
    }
}

fn equiv_yes() -> Outcome {
    Outcome {
        text: vec!["EQUIV".into()],
        json: json!({"verdict": "EQUIV"}),
        positive: true,
    }
}

/// Dotted child-index path of a node (`root` for the root).
fn node_path(t: &xpd_core::semantics::DataTree, mut x: NodeId) -> String {
    let mut idx = Vec::new();
    while let Some(p) = t.parent(x) {
        let i = t.children(p).iter().position(|&c| c == x).expect("child of its parent");
        idx.push(i.to_string());
        x = p;
    }
    if idx.is_empty() {
        return "root".into();
    }
    idx.reverse();
    idx.join(".")
}

fn oracle_sat(ctx: &Ctx, text: &str, bounds: Bounds) -> Result<Outcome, Failure> {
    let phi = ctx.node(text)?;
    Ok(match oracle::brute_sat(&phi, &ctx.alphabet, bounds) {
        Some(t) => {
            let s = print_tree(&t);
            Outcome {
                text: vec!["SAT".into(), s.clone()],
                json: json!({"verdict": "SAT", "model": s, "bounds": bounds.to_string()}),
                positive: true,
            }
        }
        None => Outcome {
            text: vec![format!("no model within {bounds}")],
            json: json!({"verdict": "NONE", "bounds": bounds.to_string()}),
            positive: false,
        },
    })
}

fn fuzz(ctx: &Ctx, trees: usize, seed: u64) -> Outcome {
    let rep = fuzz_soundness(ctx.fragment, &ctx.alphabet, trees, seed);
    let mut lines = vec![format!(
        "{} schemes, {} trees, seed {}: {} counterexample(s)",
        rep.schemes.len(),
        trees,
        seed,
        rep.total_counterexamples()
    )];
    for s in &rep.schemes {
        lines.push(format!("  {:<8} {:>4} instances  {} counterexample(s)", s.name, s.instances, s.counterexamples.len()));
        lines.extend(s.counterexamples.iter().map(|c| format!("    {c}")));
    }
    let json = json!({
        "fragment": ctx.fragment.name(),
        "trees": trees,
        "seed": seed,
        "counterexamples": rep.total_counterexamples(),
        "schemes": rep.schemes.iter().map(|s| json!({
            "name": s.name,
            "instances": s.instances,
            "counterexamples": s.counterexamples.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    });
    Outcome {
        text: lines,
        json,
        positive: rep.total_counterexamples() == 0,
    }
}

fn check_proof(file: &PathBuf) -> Result<Outcome, Failure> {
    let text = fs::read_to_string(file).map_err(|e| Failure::Usage(format!("{}: {e}", file.display())))?;
    let v = check_script(&text)?;
    let json = match &v {
        Verdict::Accepted => json!({"verdict": "accepted"}),
        Verdict::Rejected { step, reason } => json!({"verdict": "rejected", "step": step, "reason": reason}),
    };
    Ok(Outcome {
        text: vec![v.to_string()],
        json,
        positive: v.is_accepted(),
    })
}

fn cross_check(ctx: &Ctx, extra: usize, mutate: bool, bounds: Bounds, seed: u64) -> Result<Outcome, Failure> {
    let r = ctx.reasoner();
    let corpus = oracle::default_corpus(&r, extra, seed)?;
    let eval: oracle::OracleEval<'_> = if mutate { &oracle::swapped_eval } else { &oracle::standard_eval };
    let rep = oracle::cross_check(&r, &corpus, bounds, seed, eval)?;
    let mut lines = vec![format!(
        "{} formulas, {} sat checks, {} equiv checks over {} trees ({}): {} disagreement(s)",
        corpus.len(),
        rep.sat_checks,
        rep.equiv_checks,
        rep.trees,
        bounds,
        rep.disagreements.len()
    )];
    lines.extend(rep.disagreements.iter().take(20).map(|d| format!("  {d}")));
    let json = json!({
        "formulas": corpus.len(),
        "sat_checks": rep.sat_checks,
        "equiv_checks": rep.equiv_checks,
        "trees": rep.trees,
        "bounds": bounds.to_string(),
        "disagreements": rep.disagreements.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
    });
    Ok(Outcome {
        text: lines,
        json,
        positive: rep.disagreements.is_empty(),
    })
}
