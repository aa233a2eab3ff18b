use cohomest::diophantine::{DiophantinePair, Frequency};
use cohomest::experiments::{
    reproduce_table, sweep_delta, sweep_omega, table4_column, write_csv, CellStatus, DeltaRule, OmegaSource,
    PairMethod, SweepSpec, TableCaps, TABLE4,
};
use cohomest::testfam::FamilySpec;
use cohomest::{PrecisionContext, XReal};

fn x(s: &str) -> XReal {
    s.parse().unwrap()
}

fn golden_spec(rho: &str, delta: &str) -> SweepSpec {
    SweepSpec::new(
        FamilySpec::v0(XReal::ONE),
        vec![x(rho)],
        DeltaRule::Explicit(vec![x(delta)]),
        OmegaSource::Single(Frequency::golden()),
        PairMethod::Given(DiophantinePair::golden()),
    )
}

#[test]
fn table_rows_from_the_examples() {
    let ctx = PrecisionContext::default();
    let t1 = reproduce_table(1, TableCaps { one_d: 256, two_d: 0 }, &ctx).unwrap();
    let row: Vec<_> = t1.iter().filter(|c| c.row == "rho=0.7").collect();
    assert!(row.iter().all(|c| c.status == CellStatus::Pass));
    assert_eq!(row.iter().find(|c| c.quantity == "N").unwrap().computed, Some(XReal::from(256usize)));
    assert!(row.iter().find(|c| c.quantity == "norm").unwrap().deviation.unwrap() <= 1e-25);

    let t3 = reproduce_table(3, TableCaps { one_d: 4096, two_d: 0 }, &ctx).unwrap();
    let s10: Vec<_> = t3.iter().filter(|c| c.row == "n=1 s=10").collect();
    assert_eq!(s10.len(), 3);
    assert!(s10.iter().all(|c| c.status == CellStatus::Pass));

    let col = TABLE4.iter().find(|c| c.0 == 0.3 && c.1 == 0.06).unwrap();
    let cells = table4_column(*col, 65536, &ctx).unwrap();
    let i1 = cells.iter().find(|c| c.quantity == "I1").unwrap();
    assert!((i1.computed.unwrap().to_f64() - 1.93).abs() <= 0.01);
}

#[test]
fn delta_sweep_examples() {
    let ctx = PrecisionContext::default();
    let rows = sweep_delta(&golden_spec("0.5", "0.1"), &ctx).unwrap();
    assert_eq!(rows.len(), 1);
    assert!((rows[0].adhoc_ratio.to_f64() - 2.9).abs() <= 0.05);
    assert!((rows[0].classic_ratio.to_f64() - 8.5).abs() <= 0.1);

    let rows = sweep_delta(&golden_spec("0.999", "0.999"), &ctx).unwrap();
    assert!((rows[0].adhoc_ratio.to_f64() - 159.7).abs() <= 1.0);
}

#[test]
fn single_golden_omega_matches_delta_sweep() {
    let ctx = PrecisionContext::default();
    let spec = golden_spec("0.5", "0.1");
    let d = &sweep_delta(&spec, &ctx).unwrap()[0];
    let o = sweep_omega(&spec, &ctx).unwrap();
    let p = o[0].outcome.as_ref().unwrap();
    assert_eq!(p.adhoc_ratio, d.adhoc_ratio);
    assert_eq!(p.classic_ratio, d.classic_ratio);
    assert_eq!(p.breakdown, d.breakdown);
}

fn omega_median(count: u32, stride: u32, ctx: &PrecisionContext) -> f64 {
    let mut spec = golden_spec("0.5", "0.1");
    spec.omega = OmegaSource::Singrid { first: 0, count, stride };
    spec.method = PairMethod::Method2(None);
    let mut r: Vec<f64> = sweep_omega(&spec, ctx)
        .unwrap()
        .iter()
        .map(|row| row.outcome.as_ref().unwrap().classic_over_adhoc().to_f64())
        .collect();
    assert!(r.iter().all(|v| *v >= 1.0));
    r.sort_by(f64::total_cmp);
    r[r.len() / 2]
}

#[test]
fn subsampled_omega_grid_has_similar_statistics() {
    let ctx = PrecisionContext::default();
    let coarse = omega_median(100, 100, &ctx);
    let fine = omega_median(1000, 10, &ctx);
    assert!(coarse / fine < 10.0 && fine / coarse < 10.0, "{coarse} vs {fine}");
}

#[test]
fn csv_rows_and_determinism() {
    let ctx = PrecisionContext::default();
    let rows = sweep_delta(&golden_spec("0.5", "0.1"), &ctx).unwrap();
    let mut a = Vec::new();
    write_csv(&rows, &mut a, 30).unwrap();
    assert_eq!(String::from_utf8(a.clone()).unwrap().lines().count(), 2);
    let rows = sweep_delta(&golden_spec("0.5", "0.1"), &ctx).unwrap();
    let mut b = Vec::new();
    write_csv(&rows, &mut b, 30).unwrap();
    assert_eq!(a, b);
}
