//! Average-linkage merges of a few 1-D points, the partitions they induce and
//! the dispersion curves read off the tree.
//!
//! cargo run --example dendrogram_cut

use gapstat::dispersion::DispersionCurve;
use gapstat::metric::pairwise_matrix;
use gapstat::{average_linkage, cut_tree, Dataset, Metric};

fn main() -> gapstat::Result<()> {
    let points = [0.0, 1.0, 5.0, 5.5, 12.0, 12.2, 13.0];
    let data = Dataset::from_rows(points.iter().map(|&x| vec![x]).collect())?;
    let tree = average_linkage(&pairwise_matrix(&data, Metric::SquaredEuclidean));

    for (step, m) in tree.merges().iter().enumerate() {
        println!("merge {step}: nodes {} + {} at height {:.3} (size {})", m.left, m.right, m.height, m.size);
    }
    for k in 1..=4 {
        println!("k = {k}: {:?}", cut_tree(&tree, k)?.labels());
    }
    let curves = DispersionCurve::both_from_tree(&tree, 6)?;
    println!("pooled   {:?}", curves.pooled);
    println!("weighted {:?}", curves.weighted);
    Ok(())
}
