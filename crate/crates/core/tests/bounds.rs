use fingerlab::bounds::{
    one_way_interval, regenerate_table, smp_interval, BoundInterval, TableId, TableLimits,
};
use fingerlab::codes::{
    complement_pair_strategy, halving_construction, search_cwc, search_pair_capacity,
    smp_strategy_from_pair, strategy_from_cwc,
};
use fingerlab::family::SubsetFamily;
use fingerlab::strategy::{brute_force_min_wce, Model};
use fingerlab::{Budget, Strategy};

const N_MAX: usize = 40;
const M_MAX: usize = 16;

fn ow(n: usize, m: usize) -> BoundInterval {
    one_way_interval(n, m).unwrap()
}

fn smp(n: usize, m: usize) -> BoundInterval {
    smp_interval(n, m).unwrap()
}

#[test]
fn intervals_are_monotone() {
    for m in 2..=M_MAX {
        for n in 2..=N_MAX {
            for (name, cell) in [
                ("one-way", ow as fn(usize, usize) -> BoundInterval),
                ("smp", smp),
            ] {
                let c = cell(n, m);
                assert!(c.lower <= c.upper, "{name} ({n},{m})");
                if n < N_MAX {
                    let more = cell(n + 1, m);
                    assert!(more.lower >= c.lower, "{name} lower ({n},{m})");
                    assert!(more.upper >= c.upper, "{name} upper ({n},{m})");
                }
                if m < M_MAX {
                    let wider = cell(n, m + 1);
                    assert!(c.upper >= wider.upper, "{name} upper ({n},{m})");
                    assert!(c.lower >= wider.lower, "{name} lower ({n},{m})");
                }
            }
        }
    }
}

#[test]
fn smp_is_never_easier() {
    for m in 2..=M_MAX {
        for n in 2..=N_MAX {
            assert!(smp(n, m).lower >= ow(n, m).lower, "({n},{m})");
        }
    }
}

/// Every prefix of a one-way strategy is a strategy for fewer messages.
fn check_one_way(s: &Strategy, label: &str) {
    let m = s.m_a();
    for n in 2..=s.n().min(N_MAX) {
        let p = s.p()[..n].to_vec();
        let r: Vec<_> = s.r().iter().map(|row| row[..n].to_vec()).collect();
        let prefix = Strategy::one_way(p, r).unwrap();
        let w = prefix.error_report().worst_case;
        let cell = ow(n, m);
        assert!(
            w >= cell.lower,
            "{label}: n={n} m={m} measured {w} below {cell}"
        );
    }
}

fn check_smp(s: &Strategy, label: &str) {
    let (n, m) = (s.n(), s.m_a().max(s.m_b()));
    if !(2..=N_MAX).contains(&n) || m > M_MAX {
        return;
    }
    let w = s.error_report().worst_case;
    let cell = smp(n, m);
    assert!(
        w >= cell.lower,
        "{label}: n={n} m={m} measured {w} below {cell}"
    );
}

#[test]
fn constructions_respect_lower_bounds() {
    for m in 2..=7 {
        for k in 1..=m {
            for j in 0..k {
                let r = search_cwc(m, k, j, Budget::nodes(200_000)).unwrap();
                let s = strategy_from_cwc(&r.family, k, j).unwrap();
                check_one_way(&s, &format!("cwc({m},{k},{j})"));
                if s.n() <= 12 {
                    check_smp(
                        &halving_construction(&s).unwrap(),
                        &format!("halving cwc({m},{k},{j})"),
                    );
                }
            }
        }
        check_smp(
            &complement_pair_strategy(m).unwrap(),
            &format!("complement {m}"),
        );
    }
    for (m, k1, k2, j) in [(5, 2, 2, 3), (6, 2, 2, 3), (6, 2, 3, 5), (4, 2, 2, 2)] {
        let r = search_pair_capacity(m, k1, k2, j, Budget::unlimited()).unwrap();
        let (s, _) = smp_strategy_from_pair(&r.fp, &r.fq, k1, k2).unwrap();
        check_smp(&s, &format!("pair({m},{k1},{k2},{j})"));
    }
    for (n, m) in [(5, 3), (6, 4), (7, 4), (10, 5)] {
        let r = brute_force_min_wce(n, m, n, Model::OneWay, Budget::nodes(1_000_000)).unwrap();
        check_one_way(&r.strategy.unwrap(), &format!("brute one-way ({n},{m})"));
    }
    for (n, m) in [(3, 2), (4, 3), (5, 4)] {
        let r = brute_force_min_wce(n, m, m, Model::Smp, Budget::nodes(1_000_000)).unwrap();
        check_smp(&r.strategy.unwrap(), &format!("brute smp ({n},{m})"));
    }
    check_one_way(
        &strategy_from_cwc(&SubsetFamily::k_subsets(8, 4), 4, 3).unwrap(),
        "sperner 8",
    );
}

#[test]
fn tables_regenerate_from_cache() {
    let limits = TableLimits::cached();
    for id in TableId::ALL {
        let t = regenerate_table(id, &limits).unwrap();
        let lines: Vec<String> = t.diff.iter().map(|d| d.to_string()).collect();
        assert!(lines.is_empty(), "table {id}:\n{}", lines.join("\n"));
        assert!(t.cell_count() > 0);
    }
}

#[test]
fn interval_table_is_mostly_computed() {
    let t = regenerate_table(TableId::II, &TableLimits::cached()).unwrap();
    assert!(t.computed_fraction() >= 0.9, "{}", t.computed_fraction());
}
