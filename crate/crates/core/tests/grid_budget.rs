//! Wall-clock budget for a full-size asymptotics grid.

use boussinesq_ist::asymptotics::evaluate_grid;
use boussinesq_ist::spectral::SpectralData;
use std::time::Instant;

#[test]
fn grid_50x50_completes_under_budget() {
    let sd = SpectralData::synthetic(7);
    let zetas: Vec<f64> = (0..50).map(|i| 0.2 + (0.5 - 0.2) * i as f64 / 49.0).collect();
    let ts: Vec<f64> = (0..50)
        .map(|i| 10.0 * (1e4f64 / 10.0).powf(i as f64 / 49.0))
        .collect();
    let start = Instant::now();
    let table = evaluate_grid(&zetas, &ts, &sd);
    let secs = start.elapsed().as_secs_f64();
    assert_eq!(table.rows.len(), 2500, "defects: {:?}", table.defects);
    assert!(table.defects.is_empty());
    assert!(secs < 30.0, "50x50 grid took {secs:.1} s");
    println!("50x50 grid: {secs:.2} s");
}
