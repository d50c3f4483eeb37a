use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use fingerlab::bounds::{self, regenerate_table, BoundInterval, TableId, TableLimits};
use fingerlab::codes::{
    complement_pair_strategy, cwc_capacity, halving_construction, search_cwc, search_pair_capacity,
    smp_strategy_from_pair, strategy_from_cwc,
};
use fingerlab::data::StateKind;
use fingerlab::family::search::search_largest_cover_free;
use fingerlab::family::{CoverParams, SubsetFamily};
use fingerlab::io;
use fingerlab::quantum::{
    self, check_etf, etf_2m_strategy, etf_complement, etf_conjugate_strategy, grassmann_search,
    max_pairwise_overlap, mub_states, smp_numeric_search, smp_wce, sym_strategy, PackingConfig,
    SmpSearchConfig, StateSet,
};
use fingerlab::scalar::format_rational;
use fingerlab::strategy::binary_completion;
use fingerlab::{Budget, Error, ErrorReport, Strategy};

use crate::RunConfig;

pub enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Res = std::result::Result<Outcome, Failure>;

pub struct Outcome {
    command: String,
    inputs: Vec<(String, String)>,
    result: Value,
    pub text: String,
    pub csv: Option<String>,
    pub warnings: Vec<String>,
    /// 0 on success, 2 when a budget ran out before the result was proven.
    pub code: u8,
}

impl Outcome {
    fn new(command: &str, result: Value, text: String) -> Self {
        Self {
            command: command.to_string(),
            inputs: Vec::new(),
            result,
            text,
            csv: None,
            warnings: Vec::new(),
            code: 0,
        }
    }

    fn inputs(mut self, inputs: Vec<(String, String)>) -> Self {
        self.inputs = inputs;
        self
    }

    fn exhausted(mut self, exhausted: bool) -> Self {
        if exhausted {
            self.code = 2;
            self.warnings
                .push("budget exhausted; the result is partial".into());
        }
        self
    }

    pub fn envelope(&self) -> Value {
        let inputs: serde_json::Map<String, Value> = self
            .inputs
            .iter()
            .map(|(k, v)| (k.clone(), json!(format!("sha256:{v}"))))
            .collect();
        json!({
            "tool": "fingerlab",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "inputs": inputs,
            "result": self.result,
        })
    }
}

/// Reads a file and records its content hash.
fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Domain(Error::Io(std::io::Error::new(
        e.kind(),
        format!("{}: {e}", path.display()),
    )))
}

fn read_input(
    path: &Path,
    hashes: &mut Vec<(String, String)>,
) -> std::result::Result<String, Failure> {
    let bytes = std::fs::read(path).map_err(|e| io_failure(path, e))?;
    hashes.push((
        path.display().to_string(),
        hex::encode(Sha256::digest(&bytes)),
    ));
    String::from_utf8(bytes)
        .map_err(|e| Failure::Domain(Error::InvalidInput(format!("{}: {e}", path.display()))))
}

fn write_output(path: &Option<PathBuf>, text: &str) -> std::result::Result<(), Failure> {
    if let Some(p) = path {
        std::fs::write(p, text).map_err(|e| io_failure(p, e))?;
    }
    Ok(())
}

fn budget(run: &RunConfig) -> Budget {
    let mut b = match run.budget_seconds {
        Some(s) => Budget::seconds(s),
        None => Budget::unlimited(),
    };
    if let Some(n) = run.budget_nodes {
        b = b.with_nodes(n);
    }
    b
}

fn report_value(r: &ErrorReport) -> Value {
    json!({
        "worst_case": format_rational(&r.worst_case),
        "average": format_rational(&r.average),
        "witness_pair": [r.witness.0 + 1, r.witness.1 + 1],
        "one_sided": r.one_sided,
    })
}

fn report_text(r: &ErrorReport) -> String {
    format!(
        "worst_case {}\naverage {}\nwitness_pair ({}, {})\none_sided {}\n",
        format_rational(&r.worst_case),
        format_rational(&r.average),
        r.witness.0 + 1,
        r.witness.1 + 1,
        r.one_sided
    )
}

fn strategy_outcome(command: &str, s: &Strategy, extra: Value, out: &Option<PathBuf>) -> Res {
    let file = io::strategy_to_json(s);
    write_output(out, &file)?;
    let r = s.error_report();
    let mut result = json!({
        "n": s.n(),
        "m_a": s.m_a(),
        "m_b": s.m_b(),
        "report": report_value(&r),
        "strategy": io::strategy_to_value(s),
    });
    if let (Value::Object(dst), Value::Object(src)) = (&mut result, extra) {
        dst.extend(src);
    }
    let text = format!(
        "n {} m_a {} m_b {}\n{}",
        s.n(),
        s.m_a(),
        s.m_b(),
        report_text(&r)
    );
    Ok(Outcome::new(command, result, text))
}

pub fn eval(_run: &RunConfig, path: &Path) -> Res {
    let mut inputs = Vec::new();
    let s = io::strategy_from_json(&read_input(path, &mut inputs)?)?;
    let r = s.error_report();
    let result = json!({"n": s.n(), "m_a": s.m_a(), "m_b": s.m_b(), "report": report_value(&r)});
    Ok(Outcome::new("eval", result, report_text(&r)).inputs(inputs))
}

pub fn complete(_run: &RunConfig, path: &Path) -> Res {
    let mut inputs = Vec::new();
    let v: Value = serde_json::from_str(&read_input(path, &mut inputs)?).map_err(Error::from)?;
    let p = io::parse_matrix(
        v.get("p")
            .ok_or_else(|| Failure::Domain(Error::InvalidInput("input needs \"p\"".into())))?,
        "p",
    )?;
    let q = match v.get("q") {
        Some(q) => io::parse_matrix(q, "q")?,
        None => Strategy::identity(p.len()).q().to_vec(),
    };
    let s = binary_completion(p, q)?;
    Ok(strategy_outcome("complete", &s, json!({}), &None)?.inputs(inputs))
}

#[derive(Subcommand, Debug)]
pub enum SearchCmd {
    /// Largest k/j-cover-free family on m points.
    CoverFree {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        j: usize,
        /// Write the certificate here as well.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest pair of weight-k1/k2 families with cross overlap at most j.
    PairCapacity {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k1: usize,
        #[arg(long)]
        k2: usize,
        #[arg(long)]
        j: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn search(run: &RunConfig, cmd: SearchCmd) -> Res {
    match cmd {
        SearchCmd::CoverFree { m, k, j, out } => {
            let cp = CoverParams::new(k, j)?;
            let r = search_largest_cover_free(m, cp, budget(run))?;
            let cert = json!({
                "kind": "cover-free",
                "m": m,
                "k": k,
                "j": j,
                "size": r.size,
                "exact": r.exact,
                "nodes": r.nodes,
                "family": serde_json::to_value(io::FamilyFile::from(&r.family)).map_err(Error::from)?,
            });
            write_output(&out, &io::to_pretty(&cert))?;
            let rel = if r.exact { "=" } else { ">=" };
            let text = format!(
                "T({m},{}) {rel} {}\nexact {}\nnodes {}\n",
                format_rational(&cp.q()),
                r.size,
                r.exact,
                r.nodes
            );
            Ok(Outcome::new("search cover-free", cert, text).exhausted(!r.exact))
        }
        SearchCmd::PairCapacity { m, k1, k2, j, out } => {
            let r = search_pair_capacity(m, k1, k2, j, budget(run))?;
            let cert = json!({
                "kind": "pair-capacity",
                "m": m,
                "k1": k1,
                "k2": k2,
                "j": j,
                "size": r.n,
                "exact": r.exact,
                "nodes": r.nodes,
                "family_a": serde_json::to_value(io::FamilyFile::from(&r.fp)).map_err(Error::from)?,
                "family_b": serde_json::to_value(io::FamilyFile::from(&r.fq)).map_err(Error::from)?,
            });
            write_output(&out, &io::to_pretty(&cert))?;
            let rel = if r.exact { "=" } else { ">=" };
            let text = format!(
                "N2({m},{k1},{k2},{j}) {rel} {}\nexact {}\nnodes {}\n",
                r.n, r.exact, r.nodes
            );
            Ok(Outcome::new("search pair-capacity", cert, text).exhausted(!r.exact))
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum ConstructCmd {
    /// One-way strategy from k-sets meeting pairwise in at most j points.
    Cwc {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        j: usize,
        /// Use this family instead of searching for one.
        #[arg(long)]
        family: Option<PathBuf>,
        /// Keep only the first n sets.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SMP strategy on the half-size subsets and their complements.
    Complement {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SMP strategy on 2n messages from a one-way strategy on n.
    Halving {
        #[arg(long)]
        strategy: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SMP strategy from a pair of uniform-weight families.
    Pair {
        #[arg(long)]
        family_a: Option<PathBuf>,
        #[arg(long)]
        family_b: Option<PathBuf>,
        /// Search parameters, used when no families are given.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        k1: Option<usize>,
        #[arg(long)]
        k2: Option<usize>,
        #[arg(long)]
        j: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

pub fn construct(run: &RunConfig, cmd: ConstructCmd) -> Res {
    match cmd {
        ConstructCmd::Cwc {
            m,
            k,
            j,
            family,
            n,
            out,
        } => {
            let mut inputs = Vec::new();
            let (fam, exhausted) = match family {
                Some(p) => (io::family_from_json(&read_input(&p, &mut inputs)?)?, false),
                None => {
                    let r = search_cwc(m, k, j, budget(run))?;
                    (r.family, !r.exact)
                }
            };
            if fam.m() != m {
                return Err(Failure::Domain(Error::InvalidInput(format!(
                    "family is on {} points, expected m = {m}",
                    fam.m()
                ))));
            }
            let fam = match n {
                Some(n) if n < fam.len() => SubsetFamily::new(m, fam.sets()[..n].to_vec())?,
                Some(n) if n > fam.len() => {
                    return Err(Failure::Domain(Error::InvalidInput(format!(
                        "only {} sets available, asked for {n}",
                        fam.len()
                    ))))
                }
                _ => fam,
            };
            let s = strategy_from_cwc(&fam, k, j)?;
            let known =
                cwc_capacity(m, k, j)?.map(|c| json!({"value": c.value, "detail": c.detail}));
            let extra = json!({
                "bound": format!("{j}/{k}"),
                "family": serde_json::to_value(io::FamilyFile::from(&fam)).map_err(Error::from)?,
                "known_capacity": known,
            });
            Ok(strategy_outcome("construct cwc", &s, extra, &out)?
                .inputs(inputs)
                .exhausted(exhausted))
        }
        ConstructCmd::Complement { m, out } => {
            let s = complement_pair_strategy(m)?;
            strategy_outcome("construct complement", &s, json!({}), &out)
        }
        ConstructCmd::Halving { strategy, out } => {
            let mut inputs = Vec::new();
            let base = io::strategy_from_json(&read_input(&strategy, &mut inputs)?)?;
            let s = halving_construction(&base)?;
            let extra = json!({"base_report": report_value(&base.error_report())});
            Ok(strategy_outcome("construct halving", &s, extra, &out)?.inputs(inputs))
        }
        ConstructCmd::Pair {
            family_a,
            family_b,
            m,
            k1,
            k2,
            j,
            out,
        } => {
            let mut inputs = Vec::new();
            let (fa, fb, exhausted) = match (family_a, family_b) {
                (Some(a), Some(b)) => {
                    let fa = io::family_from_json(&read_input(&a, &mut inputs)?)?;
                    let fb = io::family_from_json(&read_input(&b, &mut inputs)?)?;
                    (fa, fb, false)
                }
                (None, None) => {
                    let (Some(m), Some(k1), Some(k2), Some(j)) = (m, k1, k2, j) else {
                        return Err(usage(
                            "construct pair needs --family-a and --family-b, or --m --k1 --k2 --j",
                        ));
                    };
                    let r = search_pair_capacity(m, k1, k2, j, budget(run))?;
                    (r.fp, r.fq, !r.exact)
                }
                _ => return Err(usage("give both --family-a and --family-b")),
            };
            let weight = |f: &SubsetFamily, side: &str| {
                f.uniform_weight().ok_or_else(|| {
                    Failure::Domain(Error::InvalidInput(format!("family {side} is not uniform")))
                })
            };
            let (w1, w2) = (weight(&fa, "a")?, weight(&fb, "b")?);
            let (s, overlap) = smp_strategy_from_pair(&fa, &fb, w1, w2)?;
            let extra = json!({
                "bound": format!("{overlap}/{}", w1 * w2),
                "family_a": serde_json::to_value(io::FamilyFile::from(&fa)).map_err(Error::from)?,
                "family_b": serde_json::to_value(io::FamilyFile::from(&fb)).map_err(Error::from)?,
            });
            Ok(strategy_outcome("construct pair", &s, extra, &out)?
                .inputs(inputs)
                .exhausted(exhausted))
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum BoundsCmd {
    /// Interval for the one-way model.
    OneWay {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Interval for the SMP model with m fingerprints per party.
    Smp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
}

fn interval_outcome(command: &str, n: usize, m: usize, b: &BoundInterval) -> Res {
    let lo = format_rational(&b.lower);
    let hi = format_rational(&b.upper);
    let mut text = format!("{lo} -- {hi}\n");
    for p in &b.provenance {
        let side = match p.side {
            bounds::Side::Lower => "lower",
            bounds::Side::Upper => "upper",
        };
        let _ = writeln!(text, "  {side}: [{}] {}", p.id, p.detail);
    }
    let mut out = Outcome::new(
        command,
        json!({"n": n, "m": m, "bound": serde_json::to_value(b).map_err(Error::from)?}),
        text,
    );
    out.csv = Some(format!("n,m,lower,upper\n{n},{m},{lo},{hi}\n"));
    Ok(out)
}

pub fn bounds(_run: &RunConfig, cmd: BoundsCmd) -> Res {
    match cmd {
        BoundsCmd::OneWay { n, m } => {
            interval_outcome("bounds one-way", n, m, &bounds::one_way_interval(n, m)?)
        }
        BoundsCmd::Smp { n, m } => {
            interval_outcome("bounds smp", n, m, &bounds::smp_interval(n, m)?)
        }
    }
}

#[derive(Args, Debug)]
pub struct TablesArgs {
    /// I, II, III, IV or SMP.
    pub id: String,
    /// Use cached search results instead of searching live.
    #[arg(long)]
    pub cached: bool,
    /// Write the regenerated CSV here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn tables(run: &RunConfig, a: TablesArgs) -> Res {
    let id: TableId = a.id.parse().map_err(|e: Error| usage(e.to_string()))?;
    let mut limits = if a.cached {
        TableLimits::cached()
    } else {
        TableLimits::default()
    };
    if let Some(p) = limits.packing.as_mut() {
        p.seed = run.seed;
    }
    if run.budget_seconds.is_some() || run.budget_nodes.is_some() {
        limits.search_budget = budget(run);
    }
    if let Some(t) = run.tol {
        limits.numeric_tol = t;
    }
    let t = regenerate_table(id, &limits)?;
    let csv = t.to_csv();
    write_output(&a.out, &csv)?;
    let mut text = format!(
        "table {id}: {} cells, {:.1}% computed, {} differences\n",
        t.cell_count(),
        100.0 * t.computed_fraction(),
        t.diff.len()
    );
    for d in &t.diff {
        let _ = writeln!(text, "{d}");
    }
    let mut out = Outcome::new(
        "tables",
        json!({
            "table": id.to_string(),
            "computed_fraction": t.computed_fraction(),
            "diff": t.diff.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            "cells": serde_json::to_value(&t.cells).map_err(Error::from)?,
        }),
        text,
    );
    out.csv = Some(csv);
    if !t.diff.is_empty() {
        out.code = 1;
        out.warnings.push(format!(
            "{} cells differ from the bundled table",
            t.diff.len()
        ));
    }
    Ok(out)
}

/// Where a quantum command gets its states.
#[derive(Args, Debug, Clone)]
pub struct StatesArg {
    /// States file.
    #[arg(long)]
    pub states: Option<PathBuf>,
    /// Bundled set as DIM:COUNT or DIM:COUNT:KIND (kind: etf, sic, mub, numeric).
    #[arg(long)]
    pub bundled: Option<String>,
    /// Mutually unbiased bases in this prime dimension.
    #[arg(long)]
    pub mub: Option<usize>,
}

fn load_states(
    a: &StatesArg,
    inputs: &mut Vec<(String, String)>,
) -> std::result::Result<StateSet, Failure> {
    match (&a.states, &a.bundled, a.mub) {
        (Some(p), None, None) => Ok(io::states_from_json(&read_input(p, inputs)?)?),
        (None, Some(spec), None) => {
            let parts: Vec<&str> = spec.split(':').collect();
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| usage(format!("bad --bundled value {spec:?}")))
            };
            let (dim, count) = match parts.as_slice() {
                [d, c] | [d, c, _] => (num(d)?, num(c)?),
                _ => {
                    return Err(usage(format!(
                        "--bundled takes DIM:COUNT[:KIND], got {spec:?}"
                    )))
                }
            };
            let kind = match parts.get(2) {
                None => None,
                Some(k) => Some(
                    serde_json::from_value::<StateKind>(json!(k))
                        .map_err(|_| usage(format!("unknown kind {k:?}")))?,
                ),
            };
            quantum::bundled(dim, count, kind)?
                .map(|b| b.states)
                .ok_or_else(|| {
                    Failure::Domain(Error::MissingData(format!("no bundled set {spec}")))
                })
        }
        (None, None, Some(m)) => Ok(mub_states(m)?),
        _ => Err(usage("give exactly one of --states, --bundled, --mub")),
    }
}

#[derive(Subcommand, Debug)]
pub enum QuantumCmd {
    /// Numerical line packing.
    Pack {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 5000)]
        iterations: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the equiangular and tight-frame conditions.
    EtfCheck {
        #[command(flatten)]
        src: StatesArg,
    },
    /// Mutually unbiased bases in a prime dimension.
    Mub {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal one-sided SMP error for given states, or a numerical search.
    Smp {
        #[command(flatten)]
        src: StatesArg,
        /// Bob's states (default: Alice's).
        #[arg(long)]
        states_b: Option<PathBuf>,
        /// Search for states instead (needs --n and --m).
        #[arg(long)]
        search: bool,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// ETF paired with its complex conjugate.
    Conjugate {
        #[command(flatten)]
        src: StatesArg,
    },
    /// Complementary ETF, and for n = 2m the strategy pairing the two.
    Complement {
        #[command(flatten)]
        src: StatesArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Both parties send the same states; the referee projects onto the symmetric subspace.
    Sym {
        #[command(flatten)]
        src: StatesArg,
    },
}

fn f(x: f64) -> String {
    format!("{x:.12}")
}

pub fn quantum(run: &RunConfig, cmd: QuantumCmd) -> Res {
    let tol = run.tol.unwrap_or(quantum::ETF_INPUT_TOL);
    let mut inputs = Vec::new();
    let out = match cmd {
        QuantumCmd::Pack {
            n,
            m,
            restarts,
            iterations,
            out,
        } => {
            let cfg = PackingConfig {
                restarts,
                iterations,
                seed: run.seed,
            };
            let r = grassmann_search(n, m, cfg)?;
            write_output(&out, &io::states_to_json(&r.states))?;
            let text = format!(
                "max_overlap {}\nsimplex_bound {}\ngap {}\n",
                f(r.report.max_overlap),
                f(r.bounds.simplex),
                f(r.gap)
            );
            let result = json!({
                "n": n, "m": m,
                "config": serde_json::to_value(cfg).map_err(Error::from)?,
                "result": serde_json::to_value(&r).map_err(Error::from)?,
                "states": serde_json::to_value(io::StatesFile::from(&r.states)).map_err(Error::from)?,
            });
            Outcome::new("quantum pack", result, text)
        }
        QuantumCmd::EtfCheck { src } => {
            let s = load_states(&src, &mut inputs)?;
            let r = check_etf(&s, tol);
            let text = format!(
                "etf {}\ntarget_overlap {}\nequiangular_deviation {:e}\nframe_deviation {:e}\n",
                r.holds(),
                f(r.target_overlap),
                r.equiangular_deviation,
                r.frame_deviation
            );
            let mut o = Outcome::new(
                "quantum etf-check",
                json!({"dim": s.dim(), "count": s.count(), "tol": tol, "report": serde_json::to_value(&r).map_err(Error::from)?}),
                text,
            );
            if !r.holds() {
                o.code = 1;
            }
            o
        }
        QuantumCmd::Mub { m, out } => {
            let s = mub_states(m)?;
            write_output(&out, &io::states_to_json(&s))?;
            let r = max_pairwise_overlap(&s);
            let text = format!("count {}\nmax_overlap {}\n", s.count(), f(r.max_overlap));
            Outcome::new(
                "quantum mub",
                json!({"m": m, "count": s.count(), "max_overlap": r.max_overlap,
                       "states": serde_json::to_value(io::StatesFile::from(&s)).map_err(Error::from)?}),
                text,
            )
        }
        QuantumCmd::Smp {
            src,
            states_b,
            search,
            n,
            m,
        } => {
            if search {
                let (Some(n), Some(m)) = (n, m) else {
                    return Err(usage("--search needs --n and --m"));
                };
                let cfg = SmpSearchConfig {
                    seed: run.seed,
                    ..SmpSearchConfig::default()
                };
                let r = smp_numeric_search(n, m, cfg)?;
                let text = format!("wce {}\nrestart {}\n", f(r.wce), r.restart);
                Outcome::new(
                    "quantum smp",
                    json!({"n": n, "m": m, "wce": r.wce, "restart": r.restart,
                           "config": serde_json::to_value(cfg).map_err(Error::from)?,
                           "states_a": serde_json::to_value(io::StatesFile::from(&r.a)).map_err(Error::from)?,
                           "states_b": serde_json::to_value(io::StatesFile::from(&r.b)).map_err(Error::from)?}),
                    text,
                )
            } else {
                let a = load_states(&src, &mut inputs)?;
                let b = match states_b {
                    Some(p) => io::states_from_json(&read_input(&p, &mut inputs)?)?,
                    None => a.clone(),
                };
                let r = smp_wce(&a, &b)?;
                let text = format!(
                    "wce {}\nrank {}\nmin_diagonal {}\n",
                    f(r.wce),
                    r.rank,
                    f(r.min_diagonal)
                );
                Outcome::new(
                    "quantum smp",
                    serde_json::to_value(&r).map_err(Error::from)?,
                    text,
                )
            }
        }
        QuantumCmd::Conjugate { src } => {
            let s = load_states(&src, &mut inputs)?;
            let pair = etf_conjugate_strategy(&s)?;
            let r = smp_wce(&pair.a, &pair.b)?;
            let text = format!(
                "predicted {}\nwce {}\nrank {}\n",
                f(pair.predicted),
                f(r.wce),
                r.rank
            );
            Outcome::new(
                "quantum conjugate",
                json!({"dim": s.dim(), "count": s.count(), "predicted": pair.predicted,
                       "report": serde_json::to_value(&r).map_err(Error::from)?}),
                text,
            )
        }
        QuantumCmd::Complement { src, out } => {
            let s = load_states(&src, &mut inputs)?;
            let chi = etf_complement(&s)?;
            write_output(&out, &io::states_to_json(&chi))?;
            let residual = quantum::complement_relation_residual(&s, &chi);
            let mut text = format!(
                "complement_dim {}\nrelation_residual {:e}\n",
                chi.dim(),
                residual
            );
            let mut result = json!({
                "dim": s.dim(), "count": s.count(), "relation_residual": residual,
                "complement": serde_json::to_value(io::StatesFile::from(&chi)).map_err(Error::from)?,
            });
            if s.count() == 2 * s.dim() {
                let pair = etf_2m_strategy(&s)?;
                let r = smp_wce(&pair.a, &pair.b)?;
                let _ = write!(
                    text,
                    "predicted {}\nwce {}\nrank {}\n",
                    f(pair.predicted),
                    f(r.wce),
                    r.rank
                );
                result["two_m"] = json!({"predicted": pair.predicted, "report": serde_json::to_value(&r).map_err(Error::from)?});
            }
            Outcome::new("quantum complement", result, text)
        }
        QuantumCmd::Sym { src } => {
            let s = load_states(&src, &mut inputs)?;
            let r = sym_strategy(&s);
            let text = format!("wce {}\n", f(r.wce));
            Outcome::new(
                "quantum sym",
                json!({"dim": s.dim(), "count": s.count(), "report": serde_json::to_value(&r).map_err(Error::from)?}),
                text,
            )
        }
    };
    Ok(out.inputs(inputs))
}
