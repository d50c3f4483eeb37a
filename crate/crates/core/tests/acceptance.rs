//! Acceptance gate: one PASS/FAIL line per criterion. Criterion 11 is a
//! stretch goal and only reported.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fingerlab::bounds::{regenerate_table, TableId, TableLimits};
use fingerlab::codes::{
    complement_pair_strategy, halving_construction, hamming_distance, search_pair_capacity,
    smp_strategy_from_pair, strategy_from_cwc,
};
use fingerlab::data;
use fingerlab::family::search::search_largest_cover_free;
use fingerlab::family::{
    is_antichain, is_cover_free, masks_of_weight, sperner_number, CoverParams, SubsetFamily,
};
use fingerlab::quantum::{
    bundled, bundled_etfs, conjugate_pair, etf_2m_strategy, etf_complement, etf_conjugate_strategy,
    gram_residual, grassmann_search, mub_states, smp_support_projector, smp_wce, sym_strategy,
    two_m_xi_states, xi_states, PackingConfig, PackingResult,
};
use fingerlab::scalar::ratio;
use fingerlab::strategy::{binary_completion, brute_force_min_wce, optimal_average_error, Model};
use fingerlab::{Budget, Rational, Strategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ANALYTIC_TOL: f64 = 1e-9;
const PACKING_TOL: f64 = 1e-3;
const ORTHONORMAL_TOL: f64 = 1e-10;

type Check = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    blocking: bool,
    run: fn() -> Check,
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Raw cells of a bundled table, markers stripped.
fn golden(file: &str) -> Vec<(String, String, String)> {
    let text = data::read(file).expect("bundled table");
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let mut out = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let cells: Vec<&str> = line.split(',').collect();
        for (c, v) in header.iter().zip(&cells).skip(1) {
            let v = v.replace("^e", "").replace("^m", "").replace('*', "");
            out.push((cells[0].to_string(), c.to_string(), v.trim().to_string()));
        }
    }
    out
}

fn golden_cell(file: &str, row: &str, col: &str) -> Option<String> {
    golden(file)
        .into_iter()
        .find(|(r, c, _)| r == row && c == col)
        .map(|(_, _, v)| v)
}

fn parse_number(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((a, b)) => Some(a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?),
        None => s.parse().ok(),
    }
}

fn deterministic_one_sided_average(n: usize, m_a: usize, m_b: usize) -> Rational {
    let encoders = |m: usize| -> Vec<Vec<usize>> {
        (0..m.pow(n as u32))
            .map(|mut c| {
                (0..n)
                    .map(|_| {
                        let d = c % m;
                        c /= m;
                        d
                    })
                    .collect()
            })
            .collect()
    };
    let (fs, gs) = (encoders(m_a), encoders(m_b));
    let mut best = usize::MAX;
    for f in &fs {
        for g in &gs {
            let mut accept = vec![false; m_a * m_b];
            for x in 0..n {
                accept[f[x] * m_b + g[x]] = true;
            }
            let mut errors = 0;
            for x in 0..n {
                for y in 0..n {
                    if x != y && accept[f[x] * m_b + g[y]] {
                        errors += 1;
                    }
                }
            }
            best = best.min(errors);
        }
    }
    ratio(best as i64, (n * n) as i64)
}

fn c1_average_error() -> Check {
    let mut count = 0;
    for n in 1..=5 {
        for m_a in 1..=3 {
            for m_b in 1..=3 {
                let want = optimal_average_error(n, m_a, m_b).map_err(|e| e.to_string())?;
                let got = deterministic_one_sided_average(n, m_a, m_b);
                ensure(
                    got == want,
                    format!("n={n} m_a={m_a} m_b={m_b}: brute {got}, formula {want}"),
                )?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} instances equal"))
}

fn c2_table_one() -> Check {
    let mut checked = 0;
    for m in 2..=16usize {
        let want = golden_cell("table1.csv", "1", &m.to_string()).ok_or("missing q=1 cell")?;
        ensure(
            want == sperner_number(m).to_string(),
            format!("q=1 m={m}: table {want}"),
        )?;
        checked += 1;
    }
    for (row, k, j, max_m) in [("2", 2, 1, 9), ("3/2", 3, 2, 6)] {
        for m in 2..=max_m {
            let r = search_largest_cover_free(
                m,
                CoverParams::new(k, j).unwrap(),
                Budget::seconds(300.0),
            )
            .map_err(|e| e.to_string())?;
            ensure(r.exact, format!("q={row} m={m}: search budget exhausted"))?;
            ensure(
                is_cover_free(&r.family, CoverParams::new(k, j).unwrap()).holds(),
                "search returned a covered family",
            )?;
            let want = golden_cell("table1.csv", row, &m.to_string()).ok_or("missing cell")?;
            ensure(
                want == r.size.to_string(),
                format!("q={row} m={m}: search {} table {want}", r.size),
            )?;
            checked += 1;
        }
    }
    Ok(format!("{checked} cells match, T(9,2) = 12"))
}

fn c3_table_two() -> Check {
    let t = regenerate_table(TableId::II, &TableLimits::cached()).map_err(|e| e.to_string())?;
    if let Some(d) = t.diff.first() {
        return Err(format!("{} differing cells, first {d}", t.diff.len()));
    }
    let frac = t.computed_fraction();
    ensure(frac >= 0.9, format!("computed fraction {frac:.3} < 0.9"))?;
    Ok(format!(
        "{} cells equal, {:.1}% computed",
        t.cell_count(),
        100.0 * frac
    ))
}

fn c4_exact_values() -> Check {
    let err = |e: fingerlab::Error| e.to_string();
    let wce = |s: &Strategy| s.error_report().worst_case;
    let antichain = strategy_from_cwc(&SubsetFamily::k_subsets(4, 2), 2, 1).map_err(err)?;
    let c4 = complement_pair_strategy(4).map_err(err)?;
    let c5 = complement_pair_strategy(5).map_err(err)?;
    let pair = search_pair_capacity(5, 2, 2, 3, Budget::unlimited()).map_err(err)?;
    let (ps, _) = smp_strategy_from_pair(&pair.fp, &pair.fq, 2, 2).map_err(err)?;
    let five =
        SubsetFamily::new(4, SubsetFamily::k_subsets(4, 2).sets()[..5].to_vec()).map_err(err)?;
    let h = halving_construction(&strategy_from_cwc(&five, 2, 1).map_err(err)?).map_err(err)?;
    let cases = [
        ("antichain (6,4)", &antichain, 6, ratio(1, 2)),
        ("complement (6,4)", &c4, 6, ratio(3, 4)),
        ("complement (10,5)", &c5, 10, ratio(5, 6)),
        ("pair (8,5)", &ps, 8, ratio(3, 4)),
        ("halving (10,9,9)", &h, 10, ratio(1, 2)),
    ];
    for (label, s, n, want) in cases {
        ensure(s.n() == n, format!("{label}: n = {}", s.n()))?;
        ensure(
            s.error_report().one_sided,
            format!("{label}: not one-sided"),
        )?;
        ensure(wce(s) == want, format!("{label}: {} != {want}", wce(s)))?;
    }
    ensure(h.m_a() == 9 && h.m_b() == 9, "halving fingerprint count")?;
    Ok("1/2, 3/4, 5/6, 3/4, 1/2 exactly".into())
}

fn c5_smp_oracle() -> Check {
    let mut found = Vec::new();
    for (n, m, want) in [(5, 4, ratio(3, 4)), (9, 5, ratio(5, 6))] {
        let r = brute_force_min_wce(n, m, m, Model::Smp, Budget::seconds(280.0))
            .map_err(|e| e.to_string())?;
        let s = r.strategy.ok_or("no strategy returned")?;
        ensure(
            s.error_report().worst_case == r.value,
            "returned strategy disagrees with value",
        )?;
        ensure(
            r.value <= want,
            format!("({n},{m},{m}): reached {} > {want}", r.value),
        )?;
        found.push(format!("({n},{m},{m}) {}", r.value));
    }
    Ok(found.join(", "))
}

fn c6_closed_forms() -> Check {
    let mut out = Vec::new();
    for (m, n, want) in [(2, 3, 5.0 / 8.0), (3, 4, 7.0 / 27.0), (4, 5, 9.0 / 64.0)] {
        let etf = bundled(m, n, None)
            .map_err(|e| e.to_string())?
            .ok_or("missing bundled ETF")?
            .states;
        let c = etf_conjugate_strategy(&etf).map_err(|e| e.to_string())?;
        let r = smp_wce(&c.a, &c.b).map_err(|e| e.to_string())?;
        ensure(
            (r.wce - want).abs() < ANALYTIC_TOL,
            format!("conjugate ({n},{m}): {}", r.wce),
        )?;
        out.push(format!("{:.6}", r.wce));
    }
    for (m, want) in [(2, 2.0 / 3.0), (3, 7.0 / 15.0), (4, 5.0 / 14.0)] {
        let etf = bundled(m, 2 * m, None)
            .map_err(|e| e.to_string())?
            .ok_or("missing bundled ETF")?
            .states;
        let c = etf_2m_strategy(&etf).map_err(|e| e.to_string())?;
        let r = smp_wce(&c.a, &c.b).map_err(|e| e.to_string())?;
        ensure(
            (r.wce - want).abs() < ANALYTIC_TOL,
            format!("2m ({},{m}): {}", 2 * m, r.wce),
        )?;
        out.push(format!("{:.6}", r.wce));
    }
    Ok(out.join(" "))
}

fn c7_sym_values() -> Check {
    let get = |m, n| {
        bundled(m, n, None)
            .ok()
            .flatten()
            .map(|b| b.states)
            .ok_or(format!("missing ({m},{n})"))
    };
    let cases = [
        ("MUB m=2", mub_states(2).map_err(|e| e.to_string())?, 0.75),
        (
            "MUB m=3",
            mub_states(3).map_err(|e| e.to_string())?,
            2.0 / 3.0,
        ),
        ("SIC m=3", get(3, 9)?, 5.0 / 8.0),
        ("ETF (13,4)", get(4, 13)?, 19.0 / 32.0),
    ];
    for (label, s, want) in cases {
        let w = sym_strategy(&s).wce;
        ensure((w - want).abs() < ANALYTIC_TOL, format!("{label}: {w}"))?;
    }
    Ok("3/4, 2/3, 5/8, 19/32".into())
}

fn dominated(r: &PackingResult, n: usize, m: usize) -> Result<(), String> {
    let o = r.report.max_overlap;
    ensure(
        o >= r.bounds.simplex - ANALYTIC_TOL,
        format!("({n},{m}) {o} below the simplex bound"),
    )?;
    if let Some(ft) = r.bounds.fejes_toth {
        ensure(
            o >= ft - ANALYTIC_TOL,
            format!("({n},{m}) {o} below the Fejes Toth bound"),
        )?;
    }
    Ok(())
}

fn c8_packing() -> Check {
    let mut worst_gap: f64 = 0.0;
    for n in 3..=14 {
        let r = grassmann_search(n, 2, PackingConfig::default()).map_err(|e| e.to_string())?;
        dominated(&r, n, 2)?;
        let cell =
            golden_cell("table3.csv", &n.to_string(), "2").ok_or("missing Table III cell")?;
        let want = parse_number(&cell).ok_or(format!("unparsable cell {cell}"))?;
        let gap = (r.report.max_overlap - want).abs();
        ensure(
            gap <= PACKING_TOL,
            format!("n={n}: {} vs table {cell}", r.report.max_overlap),
        )?;
        worst_gap = worst_gap.max(gap);
    }
    for n in 4..=9 {
        let r = grassmann_search(n, 3, PackingConfig::default()).map_err(|e| e.to_string())?;
        dominated(&r, n, 3)?;
    }
    Ok(format!(
        "m=2 n=3..14 within {worst_gap:.1e}; bounds respected"
    ))
}

fn c9_ranks() -> Check {
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for b in bundled_etfs().map_err(|e| e.to_string())? {
        let s = &b.states;
        let n = s.count();
        let (a, c) = conjugate_pair(s).map_err(|e| e.to_string())?;
        let p = smp_support_projector(&a, &c).map_err(|e| e.to_string())?;
        ensure(
            p.rank() == n,
            format!("{}: conjugate rank {} != {n}", b.source, p.rank()),
        )?;
        let xi = xi_states(s).map_err(|e| e.to_string())?;
        let res = gram_residual(&xi);
        ensure(
            res < ORTHONORMAL_TOL,
            format!("{}: Xi residual {res:e}", b.source),
        )?;
        worst = worst.max(res);
        if n == 2 * s.dim() {
            let c = etf_2m_strategy(s).map_err(|e| e.to_string())?;
            let p = smp_support_projector(&c.a, &c.b).map_err(|e| e.to_string())?;
            ensure(
                p.rank() == n - 1,
                format!("{}: 2m rank {} != {}", b.source, p.rank(), n - 1),
            )?;
            let chi = etf_complement(s).map_err(|e| e.to_string())?;
            let res = gram_residual(&two_m_xi_states(s, &chi));
            ensure(
                res < ORTHONORMAL_TOL,
                format!("{}: 2m Xi residual {res:e}", b.source),
            )?;
            worst = worst.max(res);
        }
        count += 1;
    }
    Ok(format!(
        "{count} bundled ETFs, largest residual {worst:.1e}"
    ))
}

fn random_rows(rng: &mut ChaCha8Rng, n: usize, w: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|_| {
            let mut row: Vec<i64> = (0..w).map(|_| rng.random_range(0..4)).collect();
            if row.iter().all(|&v| v == 0) {
                row[rng.random_range(0..w)] = 1;
            }
            let total: i64 = row.iter().sum();
            row.iter().map(|&v| ratio(v, total)).collect()
        })
        .collect()
}

fn c10_properties() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..1000 {
        let (n, m_a, m_b) = (
            rng.random_range(1..=6),
            rng.random_range(1..=4),
            rng.random_range(1..=4),
        );
        let p = random_rows(&mut rng, n, m_a);
        let q = random_rows(&mut rng, n, m_b);
        let binary = binary_completion(p.clone(), q.clone()).map_err(|e| e.to_string())?;
        let r = binary
            .r()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| {
                        if *v == ratio(1, 1) {
                            v.clone()
                        } else {
                            ratio(rng.random_range(0..=4), 4)
                        }
                    })
                    .collect()
            })
            .collect();
        let other = Strategy::new(p, q, r).map_err(|e| e.to_string())?;
        for x in 0..n {
            for y in 0..n {
                ensure(
                    binary.error_probability(x, y).unwrap()
                        <= other.error_probability(x, y).unwrap(),
                    format!("binary completion worse at ({x},{y})"),
                )?;
            }
        }
    }
    let qs: Vec<CoverParams> = [(1, 1), (4, 3), (3, 2), (2, 1), (3, 1)]
        .iter()
        .map(|&(k, j)| CoverParams::new(k, j).unwrap())
        .collect();
    let mut families = 0u64;
    for m in 1..=4usize {
        let members: Vec<u64> = (1..1u64 << m).collect();
        for pick in 1u64..1 << members.len() {
            let sets = members
                .iter()
                .enumerate()
                .filter(|(i, _)| pick >> i & 1 == 1)
                .map(|(_, &s)| s)
                .collect();
            let f = SubsetFamily::new(m, sets).unwrap();
            let holds: Vec<bool> = qs.iter().map(|&q| is_cover_free(&f, q).holds()).collect();
            ensure(
                holds[0] == is_antichain(&f).holds(),
                format!("1-cover-free vs antichain on {:?}", f.sets()),
            )?;
            ensure(
                holds.windows(2).all(|w| !w[1] || w[0]),
                format!("monotonicity in q on {:?}", f.sets()),
            )?;
            families += 1;
        }
    }
    let mut pairs = 0u64;
    for m in 1..=6 {
        for k in 0..=m {
            let ws = masks_of_weight(m, k);
            for &u in &ws {
                for &v in &ws {
                    ensure(
                        hamming_distance(u, v) == 2 * (k as u32 - (u & v).count_ones()),
                        "distance",
                    )?;
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!(
        "1000 random strategies, {families} families, {pairs} weight pairs; no counterexample"
    ))
}

fn c11_stretch() -> Check {
    let cfg = PackingConfig {
        restarts: 8,
        iterations: 5000,
        seed: 0,
    };
    let mut n = 75;
    while n > 16 {
        let r = grassmann_search(n, 4, cfg).map_err(|e| e.to_string())?;
        dominated(&r, n, 4)?;
        if r.report.max_overlap <= 0.5 {
            let msg = format!("largest n = {n} (overlap {:.4})", r.report.max_overlap);
            // Dropping states never raises the overlap, so every smaller n follows.
            return if n == 75 { Ok(msg) } else { Err(msg) };
        }
        n -= 5;
    }
    Err("no n above 16 reached overlap 1/2".into())
}

fn main() -> ExitCode {
    let minute = Duration::from_secs(60);
    let criteria = [
        Criterion {
            id: 1,
            name: "average-error formula vs brute force",
            limit: Some(minute),
            blocking: true,
            run: c1_average_error,
        },
        Criterion {
            id: 2,
            name: "cover-free table rows",
            limit: Some(10 * minute),
            blocking: true,
            run: c2_table_one,
        },
        Criterion {
            id: 3,
            name: "one-way interval table",
            limit: None,
            blocking: true,
            run: c3_table_two,
        },
        Criterion {
            id: 4,
            name: "exact classical values",
            limit: None,
            blocking: true,
            run: c4_exact_values,
        },
        Criterion {
            id: 5,
            name: "SMP antichain-pair search",
            limit: Some(10 * minute),
            blocking: true,
            run: c5_smp_oracle,
        },
        Criterion {
            id: 6,
            name: "quantum SMP closed forms",
            limit: None,
            blocking: true,
            run: c6_closed_forms,
        },
        Criterion {
            id: 7,
            name: "symmetric-subspace values",
            limit: None,
            blocking: true,
            run: c7_sym_values,
        },
        Criterion {
            id: 8,
            name: "packing search",
            limit: Some(15 * minute),
            blocking: true,
            run: c8_packing,
        },
        Criterion {
            id: 9,
            name: "projector ranks and Xi states",
            limit: None,
            blocking: true,
            run: c9_ranks,
        },
        Criterion {
            id: 10,
            name: "property suites",
            limit: None,
            blocking: true,
            run: c10_properties,
        },
        Criterion {
            id: 11,
            name: "stretch: 75 states in dimension 4",
            limit: None,
            blocking: false,
            run: c11_stretch,
        },
    ];
    let mut failed = 0;
    for c in criteria {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if took > limit => {
                Err(format!("took {took:.1?}, limit {limit:?}"))
            }
            (o, _) => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d.as_str()),
            Err(d) if c.blocking => ("FAIL", d.as_str()),
            Err(d) => ("MISS", d.as_str()),
        };
        if outcome.is_err() && c.blocking {
            failed += 1;
        }
        println!(
            "criterion {:>2} {tag} {} [{took:.1?}]: {detail}",
            c.id, c.name
        );
    }
    println!("acceptance: {failed} blocking failure(s)");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
