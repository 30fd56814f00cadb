//! The `wloops` command line.
//!
//! Every subcommand renders as text, CSV or versioned JSON. Exact values are
//! written as rational strings `p/q`; floating point only appears in Monte
//! Carlo output and in `--at` evaluations.
//!
//! Exit codes: 0 success, 1 other failure, 2 parse error, 3 budget exceeded,
//! 4 solver/oracle mismatch in `compare`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::audit::build_audited_walk;
use crate::error::{Error, Result};
use crate::freeprob::{spectral_moment, FreeOracle};
use crate::gauge::{degree_bound, gauge_polynomial, loop_to_word};
use crate::lattice::{area, enumerate_trees, winding_numbers, DecoratedTree, DirectedEdge, LoopSequence, MAX_DIM};
use crate::mc::{estimate_wilson, limit_density, spectral_histogram, McConfig};
use crate::parse::{parse_sequence, parse_trajectory, parse_tree, parse_walk};
use crate::poly::{BetaPolynomial, Rational};
use crate::solver::{polynomial_report, Budget, EdgePolicy, Solver};

pub const SCHEMA: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "wloops", version, about = "Strong-coupling Wilson loop coefficients, exact and sampled")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct GlobalArgs {
    /// Lattice dimension (default 2)
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Highest β power computed (default 6)
    #[arg(long, global = true)]
    pub kmax: Option<usize>,
    /// Rooted edge policy: lex, top, random or random:SEED
    #[arg(long, global = true)]
    pub policy: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Maximum memo entries before giving up
    #[arg(long, global = true)]
    pub budget_memo: Option<usize>,
    /// Wall-clock limit per solve
    #[arg(long, global = true)]
    pub budget_seconds: Option<f64>,
    /// key=value file read before the flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct McArgs {
    /// Comma separated β values
    #[arg(long, value_delimiter = ',')]
    pub beta: Vec<f64>,
    /// Matrix size N
    #[arg(long = "n")]
    pub n: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Coefficients a_0..a_kmax of a loop or loop sequence
    Poly {
        /// Evaluate the truncated series at these β
        #[arg(long, value_delimiter = ',')]
        at: Vec<f64>,
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// A single coefficient a_k
    Coeff {
        #[arg(short, long)]
        k: usize,
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Solver against the planar gauge oracle, optionally against sampling
    Compare {
        #[arg(long)]
        mc: bool,
        #[command(flatten)]
        mc_args: McArgs,
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Area and winding numbers of a planar walk
    Area {
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Nested wrapped-plaquette loops: one tree, or all up to an area
    Tree {
        #[arg(long)]
        max_area: Option<u32>,
        /// Levels as [(g,k,s),...]
        levels: Option<String>,
    },
    /// Replay a trajectory and report the backtrack pairing of the result
    Audit {
        #[arg(long)]
        trajectory: PathBuf,
        /// Edges counted for singletons, e.g. "(0,0)x+ (1,0)y-"; default all
        #[arg(long)]
        edges: Option<String>,
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Monte Carlo estimate of a planar Wilson loop
    Mc {
        #[command(flatten)]
        mc_args: McArgs,
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Eigenvalue angle density and cosine moments of one plaquette matrix
    Spectral {
        #[command(flatten)]
        mc_args: McArgs,
        #[arg(long, default_value_t = 32)]
        bins: usize,
        #[arg(long, default_value_t = 3)]
        moments: usize,
    },
    /// Gauge word and exact planar polynomial of a loop
    Oracle {
        #[arg(required = true)]
        words: Vec<String>,
    },
}

/// Settings after merging defaults, the config file and the flags.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub dim: usize,
    pub k_max: usize,
    pub policy: EdgePolicy,
    pub budget: Budget,
    pub betas: Vec<f64>,
    pub mc: McConfig,
    pub format: Format,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dim: 2,
            k_max: 6,
            policy: EdgePolicy::LexMin,
            budget: Budget::default(),
            betas: vec![0.1],
            mc: McConfig::default(),
            format: Format::Text,
            seed: 1,
        }
    }
}

fn parse_err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos, msg: msg.into() }
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str, pos: usize) -> Result<T> {
    v.parse().map_err(|_| parse_err(pos, format!("bad value {v:?} for {key}")))
}

fn parse_policy(s: &str, seed: u64) -> Result<EdgePolicy> {
    if s == "random" {
        Ok(EdgePolicy::Seeded(seed))
    } else {
        s.parse()
    }
}

impl RunConfig {
    /// Apply a `key = value` file. `#` starts a comment; keys may use `-` or
    /// `_`. Error positions are byte offsets into the file.
    pub fn apply_config_text(&mut self, text: &str) -> Result<()> {
        let mut policy = None;
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let start = offset;
            offset += line.len();
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body.split_once('=').ok_or_else(|| parse_err(start, format!("expected key=value, got {body:?}")))?;
            let (k, v) = (k.trim().replace('_', "-"), v.trim());
            let pos = start + line.find(v).unwrap_or(0);
            match k.as_str() {
                "dim" => self.dim = parse_value(&k, v, pos)?,
                "kmax" => self.k_max = parse_value(&k, v, pos)?,
                "policy" => policy = Some((v.to_string(), pos)),
                "seed" => self.seed = parse_value(&k, v, pos)?,
                "format" => {
                    self.format = Format::from_str(v, true).map_err(|_| parse_err(pos, format!("unknown format {v:?}")))?
                }
                "budget-memo" => self.budget.max_memo = parse_value(&k, v, pos)?,
                "budget-seconds" => self.budget.max_time = Some(seconds(parse_value(&k, v, pos)?, pos)?),
                "beta" => {
                    self.betas = v.split(',').map(|b| parse_value(&k, b.trim(), pos)).collect::<Result<_>>()?;
                }
                "n" => self.mc.n = parse_value(&k, v, pos)?,
                "samples" => self.mc.samples = parse_value(&k, v, pos)?,
                "burn-in" => self.mc.burn_in = parse_value(&k, v, pos)?,
                "thin" => self.mc.thin = parse_value(&k, v, pos)?,
                "proposal-scale" => self.mc.proposal_scale = parse_value(&k, v, pos)?,
                _ => return Err(parse_err(start, format!("unknown config key {k:?}"))),
            }
        }
        if let Some((p, pos)) = policy {
            self.policy = parse_policy(&p, self.seed).map_err(|e| parse_err(pos, e.to_string()))?;
        }
        Ok(())
    }

    pub fn apply_flags(&mut self, g: &GlobalArgs, m: Option<&McArgs>) -> Result<()> {
        if let Some(d) = g.dim {
            self.dim = d;
        }
        if let Some(k) = g.kmax {
            self.k_max = k;
        }
        if let Some(s) = g.seed {
            self.seed = s;
        }
        if let Some(p) = &g.policy {
            self.policy = parse_policy(p, self.seed)?;
        }
        if let Some(f) = g.format {
            self.format = f;
        }
        if let Some(b) = g.budget_memo {
            self.budget.max_memo = b;
        }
        if let Some(s) = g.budget_seconds {
            self.budget.max_time = Some(seconds(s, 0)?);
        }
        if let Some(m) = m {
            if !m.beta.is_empty() {
                self.betas = m.beta.clone();
            }
            if let Some(n) = m.n {
                self.mc.n = n;
            }
            if let Some(s) = m.samples {
                self.mc.samples = s;
            }
            if let Some(b) = m.burn_in {
                self.mc.burn_in = b;
            }
            if let Some(t) = m.thin {
                self.mc.thin = t;
            }
        }
        self.mc.seed = self.seed;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_DIM).contains(&self.dim) {
            return Err(Error::Invalid(format!("dimension must lie in 2..={MAX_DIM}, got {}", self.dim)));
        }
        if self.betas.is_empty() || self.betas.iter().any(|b| !b.is_finite()) {
            return Err(Error::Invalid("β values must be finite".into()));
        }
        self.mc.validate()
    }

    fn solver(&self) -> Solver {
        Solver::new(self.policy).with_budget(self.budget.clone())
    }
}

fn seconds(s: f64, pos: usize) -> Result<Duration> {
    Duration::try_from_secs_f64(s).map_err(|_| parse_err(pos, format!("bad time limit {s}")))
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } => EXIT_PARSE,
        Error::Budget(_) => EXIT_BUDGET,
        _ => EXIT_FAILURE,
    }
}

/// Exact rational as `p/q`, denominators always written.
pub fn rational_json(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn coeff_json(p: &BetaPolynomial, k_max: usize) -> Value {
    Value::from((0..=k_max).map(|k| rational_json(&p.coeff(k))).collect::<Vec<_>>())
}

fn coeff_text(p: &BetaPolynomial, k_max: usize) -> String {
    (0..=k_max).map(|k| crate::poly::rational_string(&p.coeff(k))).collect::<Vec<_>>().join(" ")
}

fn coeff_csv(out: &mut String, p: &BetaPolynomial, k_max: usize) {
    out.push_str("k,coefficient\n");
    for k in 0..=k_max {
        let _ = writeln!(out, "{k},{}", rational_json(&p.coeff(k)));
    }
}

fn tree_string(t: &DecoratedTree) -> String {
    let levels: Vec<String> = t.levels.iter().map(|(g, k, s)| format!("({g},{k},{s})")).collect();
    format!("[{}]", levels.join(","))
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// What a subcommand produced.
struct Outcome {
    body: String,
    mismatch: bool,
}

impl Outcome {
    fn ok(body: String) -> Outcome {
        Outcome { body, mismatch: false }
    }
}

fn render(cfg: &RunConfig, command: &str, j: Value, text: impl FnOnce() -> String, csv: impl FnOnce() -> String) -> String {
    match cfg.format {
        Format::Json => {
            let mut obj = json!({ "schema": SCHEMA, "command": command });
            if let (Value::Object(dst), Value::Object(src)) = (&mut obj, j) {
                dst.extend(src);
            }
            format!("{obj}\n")
        }
        Format::Text => text(),
        Format::Csv => csv(),
    }
}

fn joined(words: &[String]) -> String {
    words.join(" ")
}

fn cmd_poly(cfg: &RunConfig, words: &[String], at: &[f64]) -> Result<Outcome> {
    let seq = parse_sequence(&joined(words), cfg.dim)?;
    let mut solver = cfg.solver();
    let t0 = Instant::now();
    let rep = polynomial_report(&mut solver, &seq, cfg.k_max)?;
    let elapsed = t0.elapsed();
    let st = solver.stats().clone();
    let k = cfg.k_max;
    let evals: Vec<(f64, f64)> = at.iter().map(|&b| (b, rep.poly.eval(b))).collect();
    let j = json!({
        "loops": seq.to_string(),
        "dim": cfg.dim,
        "kmax": k,
        "policy": cfg.policy.to_string(),
        "coefficients": coeff_json(&rep.poly, k),
        "polynomial": rep.poly.to_string(),
        "degree_bound": rep.degree_bound,
        "certified": rep.certified(),
        "memo_entries": solver.memo_len(),
        "calls": st.calls,
        "hits": st.hits,
        "max_depth": st.max_depth,
        "elapsed_ms": ms(elapsed),
        "evaluations": evals.iter().map(|(b, v)| json!({"beta": b, "value": v})).collect::<Vec<_>>(),
    });
    let body = render(
        cfg,
        "poly",
        j,
        || {
            let mut s = String::new();
            let _ = writeln!(s, "loops: {seq}");
            let _ = writeln!(s, "polynomial: {}", rep.poly);
            let _ = writeln!(s, "coefficients k=0..{k}: {}", coeff_text(&rep.poly, k));
            match rep.degree_bound {
                Some(b) => {
                    let status = if rep.certified() { "certified" } else { "not certified, raise --kmax" };
                    let _ = writeln!(s, "degree bound: {b} ({status})");
                }
                None => {
                    let _ = writeln!(s, "degree bound: none");
                }
            }
            for (b, v) in &evals {
                let _ = writeln!(s, "value at β={b}: {v:.12}");
            }
            let _ = writeln!(
                s,
                "memo: {} entries, {} calls, {} hits, depth {}; {:.1} ms",
                solver.memo_len(),
                st.calls,
                st.hits,
                st.max_depth,
                ms(elapsed)
            );
            s
        },
        || {
            let mut s = String::new();
            coeff_csv(&mut s, &rep.poly, k);
            s
        },
    );
    Ok(Outcome::ok(body))
}

fn cmd_coeff(cfg: &RunConfig, words: &[String], k: usize) -> Result<Outcome> {
    let seq = parse_sequence(&joined(words), cfg.dim)?;
    let mut solver = cfg.solver();
    let t0 = Instant::now();
    let c = solver.coefficient(&seq, k)?;
    let elapsed = t0.elapsed();
    let j = json!({
        "loops": seq.to_string(),
        "k": k,
        "coefficient": rational_json(&c),
        "memo_entries": solver.memo_len(),
        "elapsed_ms": ms(elapsed),
    });
    let body = render(
        cfg,
        "coeff",
        j,
        || format!("a_{k} = {}\n", crate::poly::rational_string(&c)),
        || format!("k,coefficient\n{k},{}\n", rational_json(&c)),
    );
    Ok(Outcome::ok(body))
}

/// Large-N planar value of a loop sequence: the product of its loops.
fn sequence_oracle(seq: &LoopSequence, k_max: usize) -> Result<BetaPolynomial> {
    let mut oracle = FreeOracle::default();
    let mut acc = BetaPolynomial::one();
    for l in &seq.loops {
        acc = (&acc * &gauge_polynomial(l, &mut oracle)?).truncate(k_max);
    }
    Ok(acc)
}

fn cmd_compare(cfg: &RunConfig, words: &[String], with_mc: bool) -> Result<Outcome> {
    if cfg.dim != 2 {
        return Err(Error::Unsupported("compare needs d=2".into()));
    }
    let seq = parse_sequence(&joined(words), cfg.dim)?;
    let k = cfg.k_max;
    let mut solver = cfg.solver();
    let solved = solver.polynomial(&seq, k)?;
    let oracle = sequence_oracle(&seq, k)?;
    let diff = &solved - &oracle;
    let mismatch = !diff.truncate(k).is_zero();
    let mut mc_rows = Vec::new();
    if with_mc {
        let [l] = seq.loops.as_slice() else {
            return Err(Error::Unsupported("Monte Carlo comparison takes a single loop".into()));
        };
        for &beta in &cfg.betas {
            let mc = McConfig { beta, ..cfg.mc.clone() };
            let est = estimate_wilson(l, &mc)?;
            let series = solved.eval(beta);
            mc_rows.push((beta, est, series, est.z_score(series)));
        }
    }
    let rows: Vec<(usize, Rational, Rational, Rational)> =
        (0..=k).map(|i| (i, solved.coeff(i), oracle.coeff(i), diff.coeff(i))).collect();
    let j = json!({
        "loops": seq.to_string(),
        "kmax": k,
        "solver": coeff_json(&solved, k),
        "oracle": coeff_json(&oracle, k),
        "difference": coeff_json(&diff, k),
        "match": !mismatch,
        "mc": mc_rows.iter().map(|(b, e, s, z)| json!({
            "beta": b, "n": cfg.mc.n, "mean": e.mean, "stderr": e.stderr, "series": s, "z": z
        })).collect::<Vec<_>>(),
    });
    let body = render(
        cfg,
        "compare",
        j,
        || {
            let mut s = String::new();
            let _ = writeln!(s, "loops: {seq}");
            let _ = writeln!(s, "{:>3} {:>14} {:>14} {:>10}", "k", "solver", "oracle", "diff");
            for (i, a, b, d) in &rows {
                let r = crate::poly::rational_string;
                let _ = writeln!(s, "{i:>3} {:>14} {:>14} {:>10}", r(a), r(b), r(d));
            }
            let _ = writeln!(s, "{}", if mismatch { "MISMATCH" } else { "match" });
            for (b, e, ser, z) in &mc_rows {
                let _ = writeln!(
                    s,
                    "mc β={b} N={}: {:.5} ± {:.5}, series {:.5}, z = {:.2}",
                    cfg.mc.n, e.mean, e.stderr, ser, z
                );
            }
            s
        },
        || {
            let mut s = String::from("k,solver,oracle,difference\n");
            for (i, a, b, d) in &rows {
                let _ = writeln!(s, "{i},{},{},{}", rational_json(a), rational_json(b), rational_json(d));
            }
            s
        },
    );
    Ok(Outcome { body, mismatch })
}

fn cmd_area(cfg: &RunConfig, words: &[String]) -> Result<Outcome> {
    let w = parse_walk(&joined(words), cfg.dim)?;
    let a = area(&w)?;
    let winding = if cfg.dim == 2 { winding_numbers(&w)? } else { Default::default() };
    let j = json!({
        "walk": w.to_string(),
        "area": a,
        "winding": winding.iter().map(|(&(x, y), &n)| json!({"x": x, "y": y, "winding": n})).collect::<Vec<_>>(),
    });
    let body = render(
        cfg,
        "area",
        j,
        || {
            let mut s = format!("walk: {w}\narea: {a}\n");
            for ((x, y), n) in &winding {
                let _ = writeln!(s, "face ({x},{y}): {n}");
            }
            s
        },
        || {
            let mut s = String::from("x,y,winding\n");
            for ((x, y), n) in &winding {
                let _ = writeln!(s, "{x},{y},{n}");
            }
            s
        },
    );
    Ok(Outcome::ok(body))
}

struct TreeRow {
    tree: String,
    area: u64,
    path: bool,
    poly: BetaPolynomial,
    zeros_below_area: bool,
    leading_ok: bool,
}

fn tree_row(t: &DecoratedTree, solver: &mut Solver, k_max: usize) -> Result<TreeRow> {
    let area = t.tree_area();
    let l = t.to_loop();
    let poly = solver.polynomial(&LoopSequence::single(l), k_max.max(area as usize))?;
    let zeros_below_area = (0..area as usize).all(|k| poly.coeff(k) == Rational::from_integer(0.into()));
    let lead_is_one = poly.coeff(area as usize) == Rational::from_integer(1.into());
    Ok(TreeRow { tree: tree_string(t), area, path: t.is_path(), poly, zeros_below_area, leading_ok: lead_is_one == t.is_path() })
}

fn cmd_tree(cfg: &RunConfig, levels: Option<&str>, max_area: Option<u32>) -> Result<Outcome> {
    let trees = match (levels, max_area) {
        (Some(s), None) => vec![parse_tree(s, 0)?],
        (None, Some(a)) => enumerate_trees(a),
        _ => return Err(Error::Invalid("give either a tree or --max-area".into())),
    };
    let mut solver = cfg.solver();
    let rows = trees.iter().map(|t| tree_row(t, &mut solver, cfg.k_max)).collect::<Result<Vec<_>>>()?;
    let all_ok = rows.iter().all(|r| r.zeros_below_area && r.leading_ok);
    let j = json!({
        "trees": rows.iter().map(|r| json!({
            "tree": r.tree,
            "area": r.area,
            "path": r.path,
            "coefficients": coeff_json(&r.poly, r.poly.degree().unwrap_or(0).max(r.area as usize)),
            "zeros_below_area": r.zeros_below_area,
            "leading_consistent": r.leading_ok,
        })).collect::<Vec<_>>(),
        "all_consistent": all_ok,
    });
    let body = render(
        cfg,
        "tree",
        j,
        || {
            let mut s = String::new();
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{} area={} path={} poly={} {}",
                    r.tree,
                    r.area,
                    r.path,
                    r.poly,
                    if r.zeros_below_area && r.leading_ok { "ok" } else { "VIOLATION" }
                );
            }
            let _ = writeln!(s, "{} trees, {}", rows.len(), if all_ok { "all consistent" } else { "violations found" });
            s
        },
        || {
            let mut s = String::from("tree,area,path,a_area,zeros_below_area\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "\"{}\",{},{},{},{}",
                    r.tree,
                    r.area,
                    r.path,
                    rational_json(&r.poly.coeff(r.area as usize)),
                    r.zeros_below_area
                );
            }
            s
        },
    );
    Ok(Outcome { body, mismatch: !all_ok })
}

/// Whitespace separated edges `(x,y)x+`.
fn parse_edges(s: &str, dim: usize) -> Result<Vec<DirectedEdge>> {
    let mut out = Vec::new();
    let mut pos = 0;
    for tok in s.split_whitespace() {
        let at = s[pos..].find(tok).map_or(pos, |i| pos + i);
        pos = at + tok.len();
        let close = tok.find(')').ok_or_else(|| parse_err(at, "edge must look like (x,y)x+"))?;
        let tail = crate::parse::parse_site(&tok[..=close], at)?;
        if !tok.starts_with('(') || tail.dim() != dim {
            return Err(parse_err(at, format!("bad edge {tok:?}")));
        }
        let step = crate::parse::parse_step(&tok[close + 1..], dim, at + close + 1)?;
        out.push(DirectedEdge::new(tail, step));
    }
    Ok(out)
}

fn cmd_audit(cfg: &RunConfig, words: &[String], trajectory: &PathBuf, edges: Option<&str>) -> Result<Outcome> {
    let start = parse_walk(&joined(words), cfg.dim)?;
    let text = std::fs::read_to_string(trajectory)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", trajectory.display())))?;
    let moves = parse_trajectory(&text)?;
    let audited = build_audited_walk(&start, &moves)?;
    audited.check()?;
    let filter = match edges {
        Some(s) => parse_edges(s, cfg.dim)?,
        None => start.edges(),
    };
    let rep = audited.singletons(&filter);
    let edge_list = audited.edges();
    let j = json!({
        "start": start.to_string(),
        "moves": moves.len(),
        "walk": audited.walk.to_string(),
        "letters": edge_list.iter().enumerate().map(|(i, e)| json!({
            "edge": e.to_string(),
            "blue": audited.is_blue(i),
            "partner": audited.partner[i],
            "move": audited.origin[i],
        })).collect::<Vec<_>>(),
        "red": audited.red_count(),
        "deformations": audited.deformation_count(),
        "noncrossing": true,
        "selected": rep.selected,
        "singletons": rep.singletons,
        "weighted_bound": rep.weighted_bound,
        "within_deformations": rep.within_deformations(),
        "within_weighted_bound": rep.within_weighted_bound(),
        "distinct_partner_moves": rep.distinct_partner_moves,
    });
    let body = render(
        cfg,
        "audit",
        j,
        || {
            let mut s = format!("start: {start}\nmoves: {}\nwalk: {}\n", moves.len(), audited.walk);
            s.push_str(&audited.to_string());
            let _ = writeln!(s, "red letters: {}, deformations: {}", audited.red_count(), audited.deformation_count());
            let _ = writeln!(s, "pairing: non-crossing, erases to null");
            let _ = writeln!(
                s,
                "singletons: {} of {} selected blue letters; deformations {}, weighted bound {}",
                rep.count(),
                rep.selected,
                rep.deformations,
                rep.weighted_bound
            );
            let verdict = |ok: bool| if ok { "within" } else { "EXCEEDS" };
            let _ = writeln!(
                s,
                "verdict: singletons {} deformation count, {} weighted bound",
                verdict(rep.within_deformations()),
                verdict(rep.within_weighted_bound())
            );
            s
        },
        || {
            let mut s = String::from("position,edge,colour,partner,move\n");
            for (i, e) in edge_list.iter().enumerate() {
                let colour = if audited.is_blue(i) { "blue" } else { "red" };
                let mv = audited.origin[i].map(|m| m.to_string()).unwrap_or_default();
                let _ = writeln!(s, "{},{e},{colour},{},{mv}", i + 1, audited.partner[i] + 1);
            }
            s
        },
    );
    Ok(Outcome::ok(body))
}

fn cmd_mc(cfg: &RunConfig, words: &[String]) -> Result<Outcome> {
    if cfg.dim != 2 {
        return Err(Error::Unsupported("sampling uses the planar gauge, d=2 only".into()));
    }
    let seq = parse_sequence(&joined(words), cfg.dim)?;
    let [l] = seq.loops.as_slice() else {
        return Err(Error::Invalid("mc takes a single non-null loop".into()));
    };
    let limit = gauge_polynomial(l, &mut FreeOracle::default())?;
    let mut rows = Vec::new();
    for &beta in &cfg.betas {
        let mc = McConfig { beta, ..cfg.mc.clone() };
        let est = estimate_wilson(l, &mc)?;
        let lim = limit.eval(beta);
        rows.push((beta, est, lim, est.z_score(lim)));
    }
    let j = json!({
        "loop": l.to_string(),
        "n": cfg.mc.n,
        "samples": cfg.mc.samples,
        "seed": cfg.mc.seed,
        "limit": limit.to_string(),
        "estimates": rows.iter().map(|(b, e, lim, z)| json!({
            "beta": b, "mean": e.mean, "stderr": e.stderr, "n_eff": e.n_eff, "limit": lim, "z": z
        })).collect::<Vec<_>>(),
    });
    let body = render(
        cfg,
        "mc",
        j,
        || {
            let mut s = format!("loop: {l}\nlarge-N limit: {limit}\n");
            for (b, e, lim, z) in &rows {
                let _ = writeln!(
                    s,
                    "β={b} N={}: {:.5} ± {:.5} (n_eff {:.0}), limit {:.5}, z = {:.2}",
                    cfg.mc.n, e.mean, e.stderr, e.n_eff, lim, z
                );
            }
            s
        },
        || {
            let mut s = String::from("beta,n,mean,stderr,limit,z\n");
            for (b, e, lim, z) in &rows {
                let _ = writeln!(s, "{b},{},{},{},{lim},{z}", cfg.mc.n, e.mean, e.stderr);
            }
            s
        },
    );
    Ok(Outcome::ok(body))
}

fn cmd_spectral(cfg: &RunConfig, bins: usize, moments: usize) -> Result<Outcome> {
    let mut tables = Vec::new();
    for &beta in &cfg.betas {
        let mc = McConfig { beta, ..cfg.mc.clone() };
        let t = spectral_histogram(&mc, bins, moments)?;
        let limits: Vec<f64> = (1..=moments as u32).map(|k| spectral_moment(k).eval(beta)).collect();
        tables.push((beta, t, limits));
    }
    let j = json!({
        "n": cfg.mc.n,
        "samples": cfg.mc.samples,
        "seed": cfg.mc.seed,
        "tables": tables.iter().map(|(b, t, lims)| json!({
            "beta": b,
            "acceptance": t.acceptance,
            "asymmetry": t.asymmetry,
            "density": t.bins.iter().map(|(th, d)| json!({"theta": th, "density": d, "limit": limit_density(*b, *th)})).collect::<Vec<_>>(),
            "moments": t.moments.iter().zip(lims).enumerate().map(|(k, (e, lim))| json!({
                "k": k + 1, "mean": e.mean, "stderr": e.stderr, "limit": lim
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    });
    let body = render(
        cfg,
        "spectral",
        j,
        || {
            let mut s = String::new();
            for (b, t, lims) in &tables {
                let _ = writeln!(s, "β={b} N={} acceptance {:.3} asymmetry {:.4}", cfg.mc.n, t.acceptance, t.asymmetry);
                for (k, (e, lim)) in t.moments.iter().zip(lims).enumerate() {
                    let _ = writeln!(s, "  E cos^{}: {:.5} ± {:.5} (limit {:.5})", k + 1, e.mean, e.stderr, lim);
                }
            }
            s
        },
        || {
            let mut s = String::from("beta,theta,density,limit\n");
            for (b, t, _) in &tables {
                for (th, d) in &t.bins {
                    let _ = writeln!(s, "{b},{th},{d},{}", limit_density(*b, *th));
                }
            }
            s.push_str("\nbeta,k,mean,stderr,limit\n");
            for (b, t, lims) in &tables {
                for (k, (e, lim)) in t.moments.iter().zip(lims).enumerate() {
                    let _ = writeln!(s, "{b},{},{},{},{lim}", k + 1, e.mean, e.stderr);
                }
            }
            s
        },
    );
    Ok(Outcome::ok(body))
}

fn cmd_oracle(cfg: &RunConfig, words: &[String]) -> Result<Outcome> {
    if cfg.dim != 2 {
        return Err(Error::Unsupported("the gauge oracle is planar, d=2 only".into()));
    }
    let seq = parse_sequence(&joined(words), cfg.dim)?;
    let [l] = seq.loops.as_slice() else {
        return Err(Error::Invalid("oracle takes a single non-null loop".into()));
    };
    let word = loop_to_word(l)?;
    let reduced = word.cyclically_reduced();
    let bound = degree_bound(l)?;
    let mut oracle = FreeOracle::default();
    let p = gauge_polynomial(l, &mut oracle)?;
    let top = p.degree().unwrap_or(0).max(bound);
    let j = json!({
        "loop": l.to_string(),
        "word": word.to_string(),
        "reduced_word": reduced.to_string(),
        "degree_bound": bound,
        "coefficients": coeff_json(&p, top),
        "polynomial": p.to_string(),
    });
    let body = render(
        cfg,
        "oracle",
        j,
        || format!("loop: {l}\nword: {word}\ncyclically reduced: {reduced}\ndegree bound: {bound}\npolynomial: {p}\n"),
        || {
            let mut s = String::new();
            coeff_csv(&mut s, &p, top);
            s
        },
    );
    Ok(Outcome::ok(body))
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.global.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
        cfg.apply_config_text(&text)?;
    }
    let mc_args = match &cli.command {
        Command::Compare { mc_args, .. } | Command::Mc { mc_args, .. } | Command::Spectral { mc_args, .. } => Some(mc_args),
        _ => None,
    };
    cfg.apply_flags(&cli.global, mc_args)?;
    cfg.validate()?;
    match &cli.command {
        Command::Poly { words, at } => cmd_poly(&cfg, words, at),
        Command::Coeff { k, words } => cmd_coeff(&cfg, words, *k),
        Command::Compare { mc, words, .. } => cmd_compare(&cfg, words, *mc),
        Command::Area { words } => cmd_area(&cfg, words),
        Command::Tree { levels, max_area } => cmd_tree(&cfg, levels.as_deref(), *max_area),
        Command::Audit { trajectory, edges, words } => cmd_audit(&cfg, words, trajectory, edges.as_deref()),
        Command::Mc { words, .. } => cmd_mc(&cfg, words),
        Command::Spectral { bins, moments, .. } => cmd_spectral(&cfg, *bins, *moments),
        Command::Oracle { words } => cmd_oracle(&cfg, words),
    }
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(o) => {
            let _ = out.write_all(o.body.as_bytes());
            if o.mismatch {
                let _ = writeln!(err, "error: mismatch");
                EXIT_MISMATCH
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
