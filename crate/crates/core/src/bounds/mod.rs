//! Best-known intervals for the minimum worst-case error, assembled from
//! theorems, constructions and bundled values, then tightened by
//! monotonicity until nothing moves.

mod tables;

pub use tables::{
    regenerate_table, CellStatus, DiffLine, GoldenCell, GoldenTable, TableId, TableLimits,
};

use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::codes::{complement_pair_error, cwc_capacity, CapacitySource};
use crate::data::{self, FactSource};
use crate::error::{Error, Result};
use crate::family::sperner_number;
use crate::scalar::{format_rational, parse_rational, ratio};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    Theorem,
    Construction,
    /// Value reproduced by this crate's exhaustive search (cached in the
    /// bundled data and re-verified by the test suite).
    Search,
    Literature,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub side: Side,
    pub source: SourceKind,
    pub id: String,
    pub detail: String,
}

impl Provenance {
    fn new(side: Side, source: SourceKind, id: &str, detail: impl Into<String>) -> Self {
        Self {
            side,
            source,
            id: id.to_string(),
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundInterval {
    pub lower: Rational,
    pub upper: Rational,
    pub provenance: Vec<Provenance>,
}

impl BoundInterval {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    fn side_computed(&self, side: Side) -> bool {
        self.provenance
            .iter()
            .any(|p| p.side == side && p.source != SourceKind::Literature && p.id != "trivial")
    }

    /// True when at least one side rests on something other than a cited
    /// value or the trivial bounds 0 and 1.
    pub fn computed(&self) -> bool {
        self.side_computed(Side::Lower) || self.side_computed(Side::Upper)
    }

    pub fn lower_computed(&self) -> bool {
        self.side_computed(Side::Lower)
    }

    pub fn upper_computed(&self) -> bool {
        self.side_computed(Side::Upper)
    }
}

/// `a` for exact cells, `a -- b` otherwise.
impl fmt::Display for BoundInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", format_rational(&self.lower))
        } else {
            write!(
                f,
                "{} -- {}",
                format_rational(&self.lower),
                format_rational(&self.upper)
            )
        }
    }
}

impl Serialize for BoundInterval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BoundInterval", 4)?;
        st.serialize_field("interval", &self.to_string())?;
        st.serialize_field("lower", &format_rational(&self.lower))?;
        st.serialize_field("upper", &format_rational(&self.upper))?;
        st.serialize_field("provenance", &self.provenance)?;
        st.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    OneWay,
    Smp,
}

/// Intervals for every `2 <= n <= n_max`, `2 <= m <= m_max` in both models.
#[derive(Debug, Clone)]
pub struct BoundsGrid {
    n_max: usize,
    m_max: usize,
    one_way: Vec<BoundInterval>,
    smp: Vec<BoundInterval>,
}

/// Default grid; covers every tabulated cell with room for propagation
/// from beyond the table edges.
const DEFAULT_N: usize = 64;
const DEFAULT_M: usize = 20;
const MARGIN_N: usize = 24;
const MARGIN_M: usize = 4;

fn default_grid() -> Result<&'static BoundsGrid> {
    static CELL: OnceLock<std::result::Result<BoundsGrid, String>> = OnceLock::new();
    CELL.get_or_init(|| BoundsGrid::build(DEFAULT_N, DEFAULT_M).map_err(|e| e.to_string()))
        .as_ref()
        .map_err(|e| Error::InvalidInput(e.clone()))
}

fn check_args(n: usize, m: usize) -> Result<()> {
    if n < 2 || m < 2 {
        return Err(Error::InvalidInput(format!(
            "bounds need n >= 2 and m >= 2, got n = {n}, m = {m}"
        )));
    }
    Ok(())
}

fn lookup(n: usize, m: usize, model: Model) -> Result<BoundInterval> {
    check_args(n, m)?;
    if n + MARGIN_N / 2 <= DEFAULT_N && m + MARGIN_M / 2 <= DEFAULT_M {
        return Ok(default_grid()?.get(n, m, model).clone());
    }
    let g = BoundsGrid::build(n + MARGIN_N, m + MARGIN_M)?;
    Ok(g.get(n, m, model).clone())
}

/// Minimum worst-case error with `n` messages and `m` fingerprints when Bob
/// sends his message in full.
pub fn one_way_interval(n: usize, m: usize) -> Result<BoundInterval> {
    lookup(n, m, Model::OneWay)
}

/// Minimum worst-case error when both parties send one of `m` fingerprints.
pub fn smp_interval(n: usize, m: usize) -> Result<BoundInterval> {
    lookup(n, m, Model::Smp)
}

/// `T(m, q)` known exactly, as `(value, provenance)`, with `q = k/j`.
fn exact_threshold(m: usize, k: usize, j: usize) -> Result<Option<(u64, SourceKind, String)>> {
    if k == 1 && j == 1 {
        let s = sperner_number(m);
        return Ok(Some((
            s,
            SourceKind::Theorem,
            format!("T({m},1) = C({m},{}) = {s}", m / 2),
        )));
    }
    Ok(data::literature()?
        .cover_free(m, k, j)
        .filter(|f| f.exact)
        .map(|f| {
            let src = match f.source {
                FactSource::Search => SourceKind::Search,
                FactSource::Literature => SourceKind::Literature,
            };
            let q = if j == 1 {
                k.to_string()
            } else {
                format!("{k}/{j}")
            };
            (f.value, src, format!("T({m},{q}) = {}", f.value))
        }))
}

struct Candidate {
    value: Rational,
    record: Provenance,
}

/// Direct (non-propagated) facts for one cell of the one-way model.
fn one_way_facts(n: usize, m: usize) -> Result<(Vec<Candidate>, Vec<Candidate>)> {
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    lo.push(Candidate {
        value: Rational::zero(),
        record: Provenance::new(
            Side::Lower,
            SourceKind::Theorem,
            "trivial",
            "error probabilities are nonnegative",
        ),
    });
    hi.push(Candidate {
        value: Rational::one(),
        record: Provenance::new(
            Side::Upper,
            SourceKind::Theorem,
            "trivial",
            "always answering equal",
        ),
    });
    if n <= m {
        hi.push(Candidate {
            value: Rational::zero(),
            record: Provenance::new(
                Side::Upper,
                SourceKind::Construction,
                "identity",
                format!("n = {n} <= m = {m}"),
            ),
        });
    }
    let lit = data::literature()?;
    let mut qs: Vec<(usize, usize)> = vec![(1, 1)];
    qs.extend(
        lit.cover_free
            .iter()
            .filter(|f| f.m == m && f.exact)
            .map(|f| (f.k, f.j)),
    );
    for (k, j) in qs {
        if let Some((t, src, detail)) = exact_threshold(m, k, j)? {
            if n as u64 > t {
                lo.push(Candidate {
                    value: ratio(j as i64, k as i64),
                    record: Provenance::new(
                        Side::Lower,
                        src,
                        "cover-free-threshold",
                        format!("n = {n} > {detail}"),
                    ),
                });
            }
        }
    }
    let s = sperner_number(m);
    let half = (m / 2) as i64;
    if n as u64 == s && half >= 1 {
        let v = Rational::one() - ratio(1, half);
        let detail = format!("n = C({m},{half}): 1 - 1/{half}");
        lo.push(Candidate {
            value: v.clone(),
            record: Provenance::new(
                Side::Lower,
                SourceKind::Theorem,
                "sperner-exact",
                detail.clone(),
            ),
        });
        hi.push(Candidate {
            value: v,
            record: Provenance::new(Side::Upper, SourceKind::Theorem, "sperner-exact", detail),
        });
    }
    for k in 1..=m {
        for j in 0..k {
            let Some(cap) = cwc_capacity(m, k, j)? else {
                continue;
            };
            if n as u64 <= cap.value {
                let src = match cap.source {
                    CapacitySource::Literature => SourceKind::Literature,
                    CapacitySource::Search => SourceKind::Search,
                    CapacitySource::ClosedForm => SourceKind::Construction,
                };
                hi.push(Candidate {
                    value: ratio(j as i64, k as i64),
                    record: Provenance::new(
                        Side::Upper,
                        src,
                        "constant-weight",
                        format!("n = {n} <= {}", cap.detail),
                    ),
                });
            }
        }
    }
    Ok((lo, hi))
}

/// Direct facts for the SMP model, given the finished one-way grid.
fn smp_facts(n: usize, m: usize, one_way: &BoundsGrid) -> Result<(Vec<Candidate>, Vec<Candidate>)> {
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    let ow = one_way.get(n, m, Model::OneWay);
    for p in ow.provenance.iter().filter(|p| p.side == Side::Lower) {
        let mut r = p.clone();
        r.detail = format!("one-way lower bound: {}", r.detail);
        lo.push(Candidate {
            value: ow.lower.clone(),
            record: r,
        });
    }
    hi.push(Candidate {
        value: Rational::one(),
        record: Provenance::new(
            Side::Upper,
            SourceKind::Theorem,
            "trivial",
            "always answering equal",
        ),
    });
    if n <= m {
        hi.push(Candidate {
            value: Rational::zero(),
            record: Provenance::new(
                Side::Upper,
                SourceKind::Construction,
                "identity",
                format!("n = {n} <= m = {m}"),
            ),
        });
    }
    let s = sperner_number(m);
    let pair_err = complement_pair_error(m);
    if n as u64 > s {
        lo.push(Candidate {
            value: Rational::one(),
            record: Provenance::new(
                Side::Lower,
                SourceKind::Theorem,
                "smp-sperner",
                format!("n = {n} > C({m},{}) = {s}", m / 2),
            ),
        });
    } else {
        hi.push(Candidate {
            value: pair_err.clone(),
            record: Provenance::new(
                Side::Upper,
                SourceKind::Construction,
                "complement-pair",
                format!("n = {n} <= C({m},{}) = {s}", m / 2),
            ),
        });
        // At m = 3 the formula would give 1/2, but n = 3 = m allows zero error.
        if n as u64 == s && n > m {
            lo.push(Candidate {
                value: pair_err.clone(),
                record: Provenance::new(
                    Side::Lower,
                    SourceKind::Theorem,
                    "smp-sperner-exact",
                    format!("n = C({m},{}): 1 - 1/({}*{})", m / 2, m / 2, m.div_ceil(2)),
                ),
            });
        }
    }
    if n.is_multiple_of(2) && m > n / 2 && m - n / 2 >= 2 && n / 2 >= 2 {
        let (nb, mb) = (n / 2, m - n / 2);
        let base = one_way.get(nb, mb, Model::OneWay);
        hi.push(Candidate {
            value: base.upper.clone(),
            record: Provenance::new(
                Side::Upper,
                SourceKind::Construction,
                "halving",
                format!(
                    "one-way ({nb},{mb}) upper bound {} relayed to ({n},{m})",
                    format_rational(&base.upper)
                ),
            ),
        });
    }
    let lit = data::literature()?;
    for f in lit.pair_capacity.iter().filter(|f| f.m == m) {
        if n as u64 <= f.value {
            let src = match f.source {
                FactSource::Search => SourceKind::Search,
                FactSource::Literature => SourceKind::Literature,
            };
            let rel = if f.exact { "=" } else { ">=" };
            hi.push(Candidate {
                value: ratio(f.j as i64, (f.k1 * f.k2) as i64),
                record: Provenance::new(
                    Side::Upper,
                    src,
                    "pair-family",
                    format!(
                        "n = {n} <= N2({},{},{},{}) {rel} {}",
                        f.m, f.k1, f.k2, f.j, f.value
                    ),
                ),
            });
        }
    }
    for f in lit.smp_exact.iter().filter(|f| f.n == n && f.m == m) {
        let v = parse_rational(&f.value)
            .ok_or_else(|| Error::InvalidInput(format!("bad exact SMP value {:?}", f.value)))?;
        let src = match f.source {
            FactSource::Search => SourceKind::Search,
            FactSource::Literature => SourceKind::Literature,
        };
        for side in [Side::Lower, Side::Upper] {
            let c = Candidate {
                value: v.clone(),
                record: Provenance::new(
                    side,
                    src,
                    "smp-exact",
                    format!("exact value {} at ({n},{m})", f.value),
                ),
            };
            match side {
                Side::Lower => lo.push(c),
                Side::Upper => hi.push(c),
            }
        }
    }
    Ok((lo, hi))
}

/// Best candidate value with every record attaining it.
fn pick(cands: Vec<Candidate>, side: Side) -> (Rational, Vec<Provenance>) {
    let best = cands
        .iter()
        .map(|c| &c.value)
        .fold(None::<&Rational>, |acc, v| match (acc, side) {
            (None, _) => Some(v),
            (Some(a), Side::Lower) => Some(if v > a { v } else { a }),
            (Some(a), Side::Upper) => Some(if v < a { v } else { a }),
        })
        .cloned()
        .expect("at least one candidate");
    let recs = cands
        .into_iter()
        .filter(|c| c.value == best)
        .map(|c| c.record)
        .collect();
    (best, recs)
}

impl BoundsGrid {
    pub fn build(n_max: usize, m_max: usize) -> Result<Self> {
        check_args(n_max, m_max)?;
        let mut g = Self {
            n_max,
            m_max,
            one_way: Vec::new(),
            smp: Vec::new(),
        };
        g.one_way = g.assemble(one_way_facts)?;
        propagate(&mut g.one_way, n_max, m_max);
        let smp = g.assemble(|n, m| smp_facts(n, m, &g))?;
        g.smp = smp;
        propagate(&mut g.smp, n_max, m_max);
        for model in [Model::OneWay, Model::Smp] {
            for n in 2..=n_max {
                for m in 2..=m_max {
                    let c = g.get(n, m, model);
                    if c.lower > c.upper {
                        return Err(Error::BoundConflict {
                            cell: format!("{model:?} n={n} m={m}"),
                            lower: format_rational(&c.lower),
                            upper: format_rational(&c.upper),
                            provenance: serde_json::to_string(&c.provenance).unwrap_or_default(),
                        });
                    }
                }
            }
        }
        Ok(g)
    }

    fn assemble(
        &self,
        facts: impl Fn(usize, usize) -> Result<(Vec<Candidate>, Vec<Candidate>)>,
    ) -> Result<Vec<BoundInterval>> {
        let mut cells = Vec::with_capacity((self.n_max - 1) * (self.m_max - 1));
        for n in 2..=self.n_max {
            for m in 2..=self.m_max {
                let (lo, hi) = facts(n, m)?;
                let (lower, mut provenance) = pick(lo, Side::Lower);
                let (upper, up) = pick(hi, Side::Upper);
                provenance.extend(up);
                cells.push(BoundInterval {
                    lower,
                    upper,
                    provenance,
                });
            }
        }
        Ok(cells)
    }

    fn index(&self, n: usize, m: usize) -> usize {
        index(self.m_max, n, m)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    /// Panics outside the grid.
    pub fn get(&self, n: usize, m: usize, model: Model) -> &BoundInterval {
        assert!(
            (2..=self.n_max).contains(&n) && (2..=self.m_max).contains(&m),
            "({n},{m}) outside grid"
        );
        let i = self.index(n, m);
        match model {
            Model::OneWay => &self.one_way[i],
            Model::Smp => &self.smp[i],
        }
    }
}

fn index(m_max: usize, n: usize, m: usize) -> usize {
    (n - 2) * (m_max - 1) + (m - 2)
}

/// Pushes bounds along the three monotonicity relations until stable:
/// more messages never help, more fingerprints never hurt, and adding one
/// of each never helps.
fn propagate(cells: &mut [BoundInterval], n_max: usize, m_max: usize) {
    // (from, to): the lower bound of `from` holds at `to`; the upper bound
    // of `to` holds at `from`.
    let mut edges = Vec::new();
    for n in 2..=n_max {
        for m in 2..=m_max {
            let here = index(m_max, n, m);
            if n < n_max {
                edges.push((here, index(m_max, n + 1, m), "more messages", (n, m)));
            }
            if m < m_max {
                edges.push((
                    index(m_max, n, m + 1),
                    here,
                    "fewer fingerprints",
                    (n, m + 1),
                ));
            }
            if n < n_max && m < m_max {
                edges.push((
                    index(m_max, n + 1, m + 1),
                    here,
                    "one more of each",
                    (n + 1, m + 1),
                ));
            }
        }
    }
    let label = |i: usize| (i / (m_max - 1) + 2, i % (m_max - 1) + 2);
    loop {
        let mut changed = false;
        for &(from, to, why, _) in &edges {
            if cells[from].lower > cells[to].lower {
                let (fnn, fm) = label(from);
                let recs: Vec<Provenance> = cells[from]
                    .provenance
                    .iter()
                    .filter(|p| p.side == Side::Lower)
                    .map(|p| inherit(p, why, fnn, fm))
                    .collect();
                cells[to].lower = cells[from].lower.clone();
                cells[to].provenance.retain(|p| p.side != Side::Lower);
                cells[to].provenance.extend(recs);
                changed = true;
            }
            if cells[to].upper < cells[from].upper {
                let (tn, tm) = label(to);
                let recs: Vec<Provenance> = cells[to]
                    .provenance
                    .iter()
                    .filter(|p| p.side == Side::Upper)
                    .map(|p| inherit(p, why, tn, tm))
                    .collect();
                cells[from].upper = cells[to].upper.clone();
                cells[from].provenance.retain(|p| p.side != Side::Upper);
                cells[from].provenance.extend(recs);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}

fn inherit(p: &Provenance, why: &str, n: usize, m: usize) -> Provenance {
    let detail = if p.detail.starts_with("monotone") {
        p.detail.clone()
    } else {
        format!("monotone ({why}) from ({n},{m}): {}", p.detail)
    };
    Provenance {
        side: p.side,
        source: p.source,
        id: p.id.clone(),
        detail,
    }
}
