use proptest::prelude::*;
use sr_difficulty::analysis::{
    compare_models, correlations, partition_grid, partition_quadrants, quadrant_report, Cell, EvalRecord, Grid, Metric,
};

fn records_strategy(min: usize, max: usize) -> impl Strategy<Value = Vec<EvalRecord>> {
    prop::collection::vec((15.0f64..40.0, 2.0f64..9.0, 18.0f64..34.0, 5.0f64..16.0), min..max).prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (hfi, riei, psnr, psnr99))| EvalRecord::new(format!("img_{i:03}"), psnr, psnr99, hfi, riei))
            .collect()
    })
}

fn cells(rs: &[EvalRecord]) -> Vec<Option<Cell>> {
    rs.iter().map(|r| r.cell).collect()
}

#[test]
fn odd_count_median_split() {
    // 101 distinct values per axis: exactly 50 above each median.
    let mut rs: Vec<EvalRecord> = (0..101)
        .map(|i| EvalRecord::new(format!("{i}"), 0.0, 0.0, 20.0 + ((i * 37) % 101) as f64 * 0.1, ((i * 59) % 101) as f64))
        .collect();
    partition_quadrants(&mut rs).unwrap();
    let easy = rs.iter().filter(|r| r.cell.unwrap().hfi_level == 1).count();
    let edge = rs.iter().filter(|r| r.cell.unwrap().riei_level == 1).count();
    assert_eq!((easy, edge), (50, 50));
}

#[test]
fn input_order_does_not_change_means() {
    let mut rs: Vec<EvalRecord> =
        (0..40).map(|i| EvalRecord::new(format!("{i:02}"), 20.0 + (i as f64).sin() * 3.1, 10.0 + i as f64 * 0.37, i as f64, (i % 7) as f64)).collect();
    let p = partition_quadrants(&mut rs).unwrap();
    let forward = quadrant_report(&rs, &p, &[Metric::Psnr, Metric::Psnr99]).unwrap();
    rs.reverse();
    let backward = quadrant_report(&rs, &p, &[Metric::Psnr, Metric::Psnr99]).unwrap();
    assert_eq!(forward, backward);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn weighted_means_reconstruct_global(mut rs in records_strategy(4, 80), q in 2usize..4) {
        let grid = Grid::new(q, q).unwrap();
        let p = partition_grid(&mut rs, grid).unwrap();
        let metrics = [Metric::Psnr, Metric::Psnr99, Metric::Hfi, Metric::Riei];
        let report = quadrant_report(&rs, &p, &metrics).unwrap();
        prop_assert_eq!(report.cells.iter().map(|c| c.count).sum::<usize>(), report.global.count);
        for m in metrics {
            let weighted: f64 = report.cells.iter().filter(|c| c.count > 0).map(|c| c.count as f64 * c.mean(m).unwrap()).sum();
            let global = report.global.mean(m).unwrap();
            prop_assert!((weighted / report.global.count as f64 - global).abs() < 1e-9);
        }
    }

    #[test]
    fn monotone_transform_keeps_cells(mut rs in records_strategy(4, 60)) {
        partition_quadrants(&mut rs).unwrap();
        let before = cells(&rs);
        let mut hfi_t = rs.clone();
        for r in hfi_t.iter_mut() {
            r.hfi_db = (r.hfi_db / 10.0).exp() * 3.0 + 1.0;
        }
        partition_quadrants(&mut hfi_t).unwrap();
        prop_assert_eq!(&before, &cells(&hfi_t));
        let mut riei_t = rs.clone();
        for r in riei_t.iter_mut() {
            r.riei = r.riei.powi(3) + 2.0 * r.riei;
        }
        partition_quadrants(&mut riei_t).unwrap();
        prop_assert_eq!(&before, &cells(&riei_t));
    }

    #[test]
    fn comparison_is_antisymmetric(mut a in records_strategy(4, 50), shifts in prop::collection::vec(-6.0f64..6.0, 50)) {
        partition_quadrants(&mut a).unwrap();
        let b: Vec<EvalRecord> = a.iter().zip(&shifts).map(|(r, s)| EvalRecord { psnr_db: r.psnr_db + s, psnr99_db: r.psnr99_db - s / 2.0, ..r.clone() }).collect();
        let ab = compare_models(&a, &b, Grid::QUADRANTS, 0.5, 4.0).unwrap();
        let ba = compare_models(&b, &a, Grid::QUADRANTS, 0.5, 4.0).unwrap();
        for (x, y) in ab.differences.iter().zip(&ba.differences) {
            prop_assert_eq!(x.psnr_db, -y.psnr_db);
            prop_assert_eq!(x.psnr99_db, -y.psnr99_db);
        }
        for (x, y) in ab.cells.iter().zip(&ba.cells).chain(std::iter::once((&ab.global, &ba.global))) {
            for m in [Metric::Psnr, Metric::Psnr99] {
                prop_assert_eq!(x.mean(m).map(|v| -v), y.mean(m));
            }
        }
        prop_assert_eq!(ab.histogram.counts.iter().sum::<usize>(), a.len());
        prop_assert!(ab.outliers.iter().all(|d| d.psnr_db.abs() > 4.0));
    }

    #[test]
    fn histogram_counts_every_pair(mut a in records_strategy(4, 40), width in 0.05f64..3.0) {
        partition_quadrants(&mut a).unwrap();
        let b: Vec<EvalRecord> = a.iter().enumerate().map(|(i, r)| EvalRecord { psnr_db: r.psnr_db - (i as f64 * 0.77).sin() * 5.0, ..r.clone() }).collect();
        let c = compare_models(&a, &b, Grid::QUADRANTS, width, 4.0).unwrap();
        prop_assert_eq!(c.histogram.counts.iter().sum::<usize>(), a.len());
        prop_assert_eq!(c.histogram.edges.len(), c.histogram.counts.len() + 1);
    }

    #[test]
    fn spearman_monotone_invariant(xs in prop::collection::vec(-50.0f64..50.0, 3..40), seed in 0.0f64..10.0) {
        let ys: Vec<f64> = xs.iter().enumerate().map(|(i, x)| x * 0.3 + ((i as f64 + seed) * 1.7).sin() * 10.0).collect();
        if let Ok(c) = correlations(&xs, &ys) {
            prop_assert!((-1.0..=1.0).contains(&c.pearson) && (-1.0..=1.0).contains(&c.spearman));
            let tx: Vec<f64> = xs.iter().map(|x| (x / 20.0).exp()).collect();
            let ty: Vec<f64> = ys.iter().map(|y| y.powi(3)).collect();
            let t = correlations(&tx, &ty).unwrap();
            prop_assert!((t.spearman - c.spearman).abs() < 1e-12);
        }
    }
}
