//! Regeneration of the reference tables from the library's own machinery,
//! with a cell-by-cell diff against the bundled copies.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{BoundsGrid, Model, Provenance, Side, SourceKind};
use crate::budget::Budget;
use crate::codes::{cwc_capacity, CapacitySource};
use crate::data::{self, FactSource, StateKind};
use crate::error::{Error, Result};
use crate::family::search::search_largest_cover_free;
use crate::family::{sperner_number, CoverParams};
use crate::quantum::{
    bundled_sets, etf_2m_strategy, etf_conjugate_strategy, grassmann_search, max_pairwise_overlap,
    mub_states, simplex_states, smp_wce, sym_strategy, PackingConfig, StateSet,
};
use crate::scalar::{nearest_fraction, parse_rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TableId {
    /// Cover-free thresholds `T(m, q)`.
    I,
    /// Classical one-way intervals.
    II,
    /// Smallest known maximal pairwise overlaps.
    III,
    /// Quantum SMP worst-case errors.
    IV,
    /// Classical SMP intervals.
    Smp,
}

impl TableId {
    pub const ALL: [TableId; 5] = [
        TableId::I,
        TableId::II,
        TableId::III,
        TableId::IV,
        TableId::Smp,
    ];

    pub fn file_name(self) -> &'static str {
        match self {
            TableId::I => "table1.csv",
            TableId::II => "table2.csv",
            TableId::III => "table3.csv",
            TableId::IV => "table4.csv",
            TableId::Smp => "table_smp.csv",
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableId::I => "I",
            TableId::II => "II",
            TableId::III => "III",
            TableId::IV => "IV",
            TableId::Smp => "SMP",
        })
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(TableId::I),
            "II" | "2" => Ok(TableId::II),
            "III" | "3" => Ok(TableId::III),
            "IV" | "4" => Ok(TableId::IV),
            "SMP" => Ok(TableId::Smp),
            _ => Err(Error::InvalidInput(format!(
                "unknown table {s:?}; expected I, II, III, IV or SMP"
            ))),
        }
    }
}

/// How much live computation a regeneration may do. Anything not searched
/// live falls back to the bundled values.
#[derive(Debug, Clone)]
pub struct TableLimits {
    /// Live cover-free searches: `(k, j, largest m)`.
    pub cover_free: Vec<(usize, usize, usize)>,
    pub search_budget: Budget,
    /// Packing search for the two-dimensional column of Table III (and,
    /// through the symmetric strategy, Table IV).
    pub packing: Option<PackingConfig>,
    pub packing_max_n: usize,
    /// Agreement required of numerically searched cells.
    pub numeric_tol: f64,
    /// Agreement required of cells computed from exact constructions.
    pub analytic_tol: f64,
}

impl Default for TableLimits {
    fn default() -> Self {
        Self {
            cover_free: vec![(2, 1, 10), (3, 2, 7), (4, 3, 6), (3, 1, 10), (4, 1, 10)],
            search_budget: Budget::unlimited(),
            packing: Some(PackingConfig::default()),
            packing_max_n: 14,
            numeric_tol: 1e-3,
            analytic_tol: 1e-9,
        }
    }
}

impl TableLimits {
    /// No live searches: every searchable cell comes from the cached results.
    pub fn cached() -> Self {
        Self {
            cover_free: Vec::new(),
            packing: None,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellStatus {
    /// Reproduced by this crate.
    Computed,
    /// Filled from bundled cited data.
    Literature,
    /// No data and no derivation.
    Uncovered,
}

#[derive(Debug, Clone, Serialize)]
pub struct GoldenCell {
    pub row: String,
    pub col: String,
    pub text: String,
    pub status: CellStatus,
    pub provenance: Vec<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffLine {
    pub row: String,
    pub col: String,
    pub expected: String,
    pub got: String,
}

impl fmt::Display for DiffLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}={} expected `{}` got `{}`",
            self.row, self.col, self.expected, self.got
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GoldenTable {
    pub id: TableId,
    pub corner: String,
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    /// `cells[r][c]`.
    pub cells: Vec<Vec<GoldenCell>>,
    pub diff: Vec<DiffLine>,
}

impl GoldenTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.corner);
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (r, row) in self.rows.iter().zip(&self.cells) {
            out.push_str(r);
            for c in row {
                out.push(',');
                out.push_str(&c.text);
            }
            out.push('\n');
        }
        out
    }

    pub fn cell_count(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    /// Fraction of cells with computed provenance.
    pub fn computed_fraction(&self) -> f64 {
        let computed = self
            .cells
            .iter()
            .flatten()
            .filter(|c| c.status == CellStatus::Computed)
            .count();
        computed as f64 / self.cell_count().max(1) as f64
    }

    pub fn cell(&self, row: &str, col: &str) -> Option<&GoldenCell> {
        let r = self.rows.iter().position(|x| x == row)?;
        let c = self.columns.iter().position(|x| x == col)?;
        Some(&self.cells[r][c])
    }
}

/// A bundled table: header labels and raw cell text.
struct Reference {
    corner: String,
    rows: Vec<String>,
    columns: Vec<String>,
    cells: Vec<Vec<String>>,
}

fn load_reference(id: TableId) -> Result<Reference> {
    let text = data::read(id.file_name())?;
    let bad = |e: csv::Error| Error::MissingData(format!("{}: {e}", id.file_name()));
    let mut records = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
        .into_records();
    let header = records
        .next()
        .ok_or_else(|| Error::MissingData(format!("{} is empty", id.file_name())))?
        .map_err(bad)?;
    let corner = header[0].to_string();
    let columns: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for rec in records {
        let rec = rec.map_err(bad)?;
        rows.push(rec[0].to_string());
        cells.push(rec.iter().skip(1).map(str::to_string).collect());
    }
    Ok(Reference {
        corner,
        rows,
        columns,
        cells,
    })
}

/// Cell text without the bold and construction markers.
pub(crate) fn strip_markers(s: &str) -> &str {
    s.trim_end_matches("^e")
        .trim_end_matches("^m")
        .trim_end_matches('*')
}

/// Numeric value of `1/2`, `.6051`, `0` and the like.
fn cell_value(s: &str) -> Option<f64> {
    let s = strip_markers(s);
    if s.contains('/') {
        let r = parse_rational(s)?;
        use num_traits::ToPrimitive;
        return r.to_f64();
    }
    s.parse().ok()
}

fn integer_q(k: usize, j: usize) -> String {
    if j == 1 {
        k.to_string()
    } else {
        format!("{k}/{j}")
    }
}

/// Formats a float: as a fraction when it is one to within `1e-9`,
/// otherwise with four decimals in the tables' style (`.6051`).
fn format_float(x: f64) -> String {
    let f = nearest_fraction(x, 1000);
    use num_traits::ToPrimitive;
    if (f.to_f64().unwrap_or(f64::NAN) - x).abs() < 1e-9 {
        return crate::scalar::format_rational(&f);
    }
    let s = format!("{x:.4}");
    s.strip_prefix('0').map(str::to_string).unwrap_or(s)
}

fn prov(side: Side, source: SourceKind, id: &str, detail: impl Into<String>) -> Provenance {
    Provenance::new(side, source, id, detail)
}

pub fn regenerate_table(id: TableId, limits: &TableLimits) -> Result<GoldenTable> {
    let reference = load_reference(id)?;
    let cells = match id {
        TableId::I => table_one(&reference, limits)?,
        TableId::II => interval_table(&reference, Model::OneWay)?,
        TableId::Smp => interval_table(&reference, Model::Smp)?,
        TableId::III => quantum_table(&reference, limits, false)?,
        TableId::IV => quantum_table(&reference, limits, true)?,
    };
    let mut diff = Vec::new();
    for (r, row) in cells.iter().enumerate() {
        for (c, (cell, tol)) in row.iter().enumerate() {
            let expected = &reference.cells[r][c];
            let same = match tol {
                None => strip_markers(expected) == cell.text,
                Some(t) => match (cell_value(expected), cell_value(&cell.text)) {
                    (Some(a), Some(b)) => (a - b).abs() <= *t,
                    _ => false,
                },
            };
            if !same {
                diff.push(DiffLine {
                    row: reference.rows[r].clone(),
                    col: reference.columns[c].clone(),
                    expected: expected.clone(),
                    got: cell.text.clone(),
                });
            }
        }
    }
    Ok(GoldenTable {
        id,
        corner: reference.corner,
        rows: reference.rows,
        columns: reference.columns,
        cells: cells
            .into_iter()
            .map(|row| row.into_iter().map(|(c, _)| c).collect())
            .collect(),
        diff,
    })
}

fn parse_label(s: &str, what: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::InvalidInput(format!("bad {what} label {s:?} in bundled table")))
}

/// Cells paired with the numeric tolerance to diff at (`None`: exact text).
type Cells = Vec<Vec<(GoldenCell, Option<f64>)>>;

fn table_one(reference: &Reference, limits: &TableLimits) -> Result<Cells> {
    let lit = data::literature()?;
    let mut out = Vec::new();
    for row in &reference.rows {
        let (k, j) = match row.split_once('/') {
            Some((a, b)) => (parse_label(a, "q")?, parse_label(b, "q")?),
            None => (parse_label(row, "q")?, 1),
        };
        let cp = CoverParams::new(k, j)?;
        let mut cells = Vec::new();
        for col in &reference.columns {
            let m = parse_label(col, "m")?;
            let q = integer_q(k, j);
            let mut cell = GoldenCell {
                row: row.clone(),
                col: col.clone(),
                text: String::new(),
                status: CellStatus::Computed,
                provenance: Vec::new(),
            };
            let live = limits
                .cover_free
                .iter()
                .any(|&(a, b, mm)| a == k && b == j && m <= mm);
            if k == 1 && j == 1 {
                let s = sperner_number(m);
                cell.text = s.to_string();
                cell.provenance.push(prov(
                    Side::Lower,
                    SourceKind::Theorem,
                    "sperner",
                    format!("T({m},1) = C({m},{})", m / 2),
                ));
            } else if let Some(found) = live
                .then(|| search_largest_cover_free(m, cp, limits.search_budget))
                .transpose()?
                .filter(|r| r.exact)
            {
                cell.text = found.size.to_string();
                cell.provenance.push(prov(
                    Side::Lower,
                    SourceKind::Search,
                    "cover-free-search",
                    format!(
                        "T({m},{q}) = {} by exhaustive search ({} nodes)",
                        found.size, found.nodes
                    ),
                ));
            } else if let Some(f) = lit.cover_free(m, k, j).filter(|f| f.exact) {
                cell.text = f.value.to_string();
                let (src, status) = match f.source {
                    FactSource::Search => (SourceKind::Search, CellStatus::Computed),
                    FactSource::Literature => (SourceKind::Literature, CellStatus::Literature),
                };
                cell.status = status;
                cell.provenance.push(prov(
                    Side::Lower,
                    src,
                    "cover-free-cached",
                    format!("T({m},{q}) = {}", f.value),
                ));
            } else if let Some((v, detail)) = threshold_lower_bound(m, k, j)? {
                cell.text = format!(">={v}");
                cell.provenance.push(prov(
                    Side::Lower,
                    SourceKind::Construction,
                    "constant-weight",
                    detail,
                ));
            } else {
                cell.text = "?".into();
                cell.status = CellStatus::Uncovered;
            }
            cells.push((cell, None));
        }
        out.push(cells);
    }
    Ok(out)
}

/// Largest closed-form constant-weight family that is `k/j`-cover-free:
/// `w`-sets meeting pairwise in at most `t` elements with `k t < j w`.
/// Cited code sizes are left out so the bound stays self-contained.
fn threshold_lower_bound(m: usize, k: usize, j: usize) -> Result<Option<(u64, String)>> {
    let mut best: Option<(u64, String)> = Some((m as u64, format!("{m} singletons")));
    for w in 1..=m {
        for t in 0..w {
            if k * t >= j * w {
                continue;
            }
            if let Some(cap) =
                cwc_capacity(m, w, t)?.filter(|c| c.source == CapacitySource::ClosedForm)
            {
                if best.as_ref().is_none_or(|b| cap.value > b.0) {
                    best = Some((
                        cap.value,
                        format!("{}, weight {w} and k*{t} < j*{w}", cap.detail),
                    ));
                }
            }
        }
    }
    Ok(best)
}

fn interval_table(reference: &Reference, model: Model) -> Result<Cells> {
    let ns: Vec<usize> = reference
        .rows
        .iter()
        .map(|r| parse_label(r, "n"))
        .collect::<Result<_>>()?;
    let ms: Vec<usize> = reference
        .columns
        .iter()
        .map(|c| parse_label(c, "m"))
        .collect::<Result<_>>()?;
    let n_max = ns.iter().copied().max().unwrap_or(2);
    let m_max = ms.iter().copied().max().unwrap_or(2);
    let grid = BoundsGrid::build(n_max + super::MARGIN_N, m_max + super::MARGIN_M)?;
    Ok(ns
        .iter()
        .zip(&reference.rows)
        .map(|(&n, row)| {
            ms.iter()
                .zip(&reference.columns)
                .map(|(&m, col)| {
                    let b = grid.get(n, m, model);
                    let status = if b.computed() {
                        CellStatus::Computed
                    } else {
                        CellStatus::Literature
                    };
                    let cell = GoldenCell {
                        row: row.clone(),
                        col: col.clone(),
                        text: b.to_string(),
                        status,
                        provenance: b.provenance.clone(),
                    };
                    (cell, None)
                })
                .collect()
        })
        .collect())
}

/// A state set available to the quantum tables, with where it came from.
struct Source {
    states: StateSet,
    label: String,
    kind: Option<StateKind>,
    numeric: bool,
}

fn quantum_sources(limits: &TableLimits, max_n: usize, ms: &[usize]) -> Result<Vec<Source>> {
    let mut out = Vec::new();
    for b in bundled_sets()? {
        out.push(Source {
            label: format!(
                "bundled {:?} ({}, {}): {}",
                b.kind,
                b.states.dim(),
                b.states.count(),
                b.source
            ),
            kind: Some(b.kind),
            states: b.states,
            numeric: false,
        });
    }
    for &m in ms {
        if !out
            .iter()
            .any(|o| o.states.dim() == m && o.states.count() == m + 1)
        {
            out.push(Source {
                label: format!("regular simplex in dimension {m}"),
                kind: Some(StateKind::Etf),
                states: simplex_states(m)?,
                numeric: false,
            });
        }
        if let Ok(s) = mub_states(m) {
            if out
                .iter()
                .any(|o| o.states.dim() == m && o.states.count() == s.count())
            {
                continue;
            }
            out.push(Source {
                label: format!("MUB construction in dimension {m}"),
                kind: Some(StateKind::Mub),
                states: s,
                numeric: false,
            });
        }
    }
    if let Some(cfg) = limits.packing {
        for n in 3..=limits.packing_max_n.min(max_n) {
            let r = grassmann_search(n, 2, cfg)?;
            out.push(Source {
                label: format!(
                    "packing search n = {n}, m = 2 (seed {}, restart {})",
                    cfg.seed, r.restart
                ),
                kind: None,
                states: r.states,
                numeric: true,
            });
        }
    }
    Ok(out)
}

/// Table III (overlaps) or Table IV (SMP errors). Each cell takes the best
/// value among exact constructions, prefixes of larger constructions and,
/// for Table IV, the closed-form ETF strategies; cited values fill the rest.
fn quantum_table(reference: &Reference, limits: &TableLimits, smp: bool) -> Result<Cells> {
    let ns: Vec<usize> = reference
        .rows
        .iter()
        .map(|r| parse_label(r, "n"))
        .collect::<Result<_>>()?;
    let ms: Vec<usize> = reference
        .columns
        .iter()
        .map(|c| parse_label(c, "m"))
        .collect::<Result<_>>()?;
    let sources = quantum_sources(limits, ns.iter().copied().max().unwrap_or(2), &ms)?;
    let mut out = Vec::new();
    for (r, &n) in ns.iter().enumerate() {
        let mut row = Vec::new();
        for (c, &m) in ms.iter().enumerate() {
            let expected = &reference.cells[r][c];
            // (value, numeric?, record)
            let mut cands: Vec<(f64, bool, Provenance)> = Vec::new();
            if n <= m {
                cands.push((
                    0.0,
                    false,
                    prov(
                        Side::Upper,
                        SourceKind::Construction,
                        "basis",
                        "orthonormal states",
                    ),
                ));
            }
            for s in sources
                .iter()
                .filter(|s| s.states.dim() == m && s.states.count() >= n && n > m)
            {
                let states = s.states.prefix(n);
                let how = if s.states.count() == n {
                    s.label.clone()
                } else {
                    format!("first {n} states of {}", s.label)
                };
                let overlap = max_pairwise_overlap(&states).max_overlap;
                let (value, id) = if smp {
                    (sym_strategy(&states).wce, "symmetric-subspace")
                } else {
                    (overlap, "packing")
                };
                let source = if s.numeric {
                    SourceKind::Search
                } else {
                    SourceKind::Construction
                };
                cands.push((value, s.numeric, prov(Side::Upper, source, id, how.clone())));
                if smp
                    && s.states.count() == n
                    && matches!(s.kind, Some(StateKind::Etf | StateKind::Sic))
                {
                    let closed = [
                        ("etf-conjugate", etf_conjugate_strategy(&states)),
                        ("etf-complement-2m", etf_2m_strategy(&states)),
                    ];
                    for (cid, pair) in closed {
                        let Ok(pair) = pair else { continue };
                        let wce = smp_wce(&pair.a, &pair.b)?.wce;
                        cands.push((
                            wce,
                            false,
                            prov(
                                Side::Upper,
                                SourceKind::Construction,
                                cid,
                                format!("{how}; closed form {:.12}", pair.predicted),
                            ),
                        ));
                    }
                }
            }
            if !smp
                && n > m
                && expected.ends_with("^e")
                && !cands
                    .iter()
                    .any(|c| c.0 <= crate::quantum::etf_overlap(n, m) + limits.analytic_tol)
            {
                cands.push((
                    crate::quantum::etf_overlap(n, m),
                    false,
                    prov(Side::Upper, SourceKind::Literature, "etf-existence", format!("an ETF of {n} vectors in dimension {m} exists; its overlap is the simplex bound")),
                ));
            }
            let exact_tol = limits.analytic_tol;
            let best = cands
                .iter()
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .cloned();
            let cited = cell_value(expected);
            let mut cell = GoldenCell {
                row: reference.rows[r].clone(),
                col: reference.columns[c].clone(),
                text: String::new(),
                status: CellStatus::Computed,
                provenance: Vec::new(),
            };
            let tol = |numeric: bool| {
                if numeric {
                    limits.numeric_tol
                } else {
                    exact_tol
                }
            };
            let mut cmp_tol = Some(exact_tol);
            match (best, cited) {
                (Some((v, numeric, rec)), Some(lit)) if v <= lit + tol(numeric) => {
                    // Equal to the cited value, or better than it (which the
                    // diff then reports).
                    cell.text = if numeric {
                        format!("{v:.4}").trim_start_matches('0').to_string()
                    } else {
                        format_float(v)
                    };
                    cell.provenance = cands
                        .iter()
                        .filter(|c| (c.0 - v).abs() <= tol(c.1))
                        .map(|c| c.2.clone())
                        .collect();
                    if cell.provenance.is_empty() {
                        cell.provenance.push(rec);
                    }
                    cmp_tol = Some(tol(numeric));
                }
                (_, Some(lit)) => {
                    cell.text = strip_markers(expected).to_string();
                    cell.status = CellStatus::Literature;
                    cell.provenance.push(literature_record(n, m, smp, expected));
                    cmp_tol = Some(if expected.starts_with('.') {
                        5e-5
                    } else {
                        exact_tol
                    });
                    let _ = lit;
                }
                (Some((v, numeric, rec)), None) => {
                    cell.text = format_float(v);
                    cell.provenance.push(rec);
                    cmp_tol = Some(tol(numeric));
                }
                (None, None) => {
                    cell.text = "?".into();
                    cell.status = CellStatus::Uncovered;
                }
            }
            if cell.status == CellStatus::Computed
                && cell
                    .provenance
                    .iter()
                    .all(|p| p.source == SourceKind::Literature)
            {
                cell.status = CellStatus::Literature;
            }
            row.push((cell, cmp_tol));
        }
        out.push(row);
    }
    Ok(out)
}

fn literature_record(n: usize, m: usize, smp: bool, cited: &str) -> Provenance {
    let what = if smp { "SMP error" } else { "packing overlap" };
    let etf = cited.contains("^e");
    let detail = if etf && !smp {
        format!("ETF ({m},{n}) exists; overlap equals the simplex bound")
    } else {
        format!("cited {what} at (n={n}, m={m})")
    };
    prov(Side::Upper, SourceKind::Literature, "literature", detail)
}
