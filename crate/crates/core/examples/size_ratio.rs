//! Both sides of the size-ratio inequality as the cluster ratio grows.
//!
//! cargo run --release --example size_ratio

use gapstat::analysis::{max_feasible_ratio, ratio_sides, RatioTest, UnequalSizeScenario};

fn main() -> gapstat::Result<()> {
    let scenario = UnequalSizeScenario { sigma: 1.0, delta: 5.0, n_total: 1530, m: 1.0, d_avg: 3.48 };
    let (e1, e2) = scenario.reference_distances()?;
    println!("E(d1) = {e1:.4}, E(d2) = {e2:.4}\n");
    println!("{:>3} {:>9} {:>9} {:>9} {:>9}", "m", "log lhs", "log rhs", "dir lhs", "dir rhs");
    for m in [1, 2, 3, 4, 5, 6, 8, 16] {
        let (ll, lr) = ratio_sides(e1, e2, scenario.d_avg, scenario.sigma, m as f64, RatioTest::Log);
        let (dl, dr) = ratio_sides(e1, e2, scenario.d_avg, scenario.sigma, m as f64, RatioTest::Direct);
        println!("{m:>3} {ll:>9.4} {lr:>9.4} {dl:>9.4} {dr:>9.4}");
    }
    for test in [RatioTest::Log, RatioTest::Direct] {
        println!("{test:?}: largest m = {}", max_feasible_ratio(e1, e2, scenario.d_avg, scenario.sigma, test));
    }
    Ok(())
}
