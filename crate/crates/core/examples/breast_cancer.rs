//! Pooled Gap variants on the Wisconsin breast cancer biopsies over ten seeds.
//!
//! cargo run --release --example breast_cancer

use gapstat::{estimate_variants, Dataset, GapConfig, Variant};

fn main() -> gapstat::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/breast_cancer_wisconsin.csv");
    let data = Dataset::load_csv_auto(path)?;
    let labels = data.row_labels().unwrap_or_default();
    let malignant = labels.iter().filter(|l| *l == "malignant").count();
    println!("{} biopsies, {} malignant, {} features", data.n(), malignant, data.p());

    let variants = [Variant::LogPooled, Variant::DirectPooled];
    for seed in 0..10 {
        let config = GapConfig { seed, ..GapConfig::default() };
        let est = estimate_variants(&data, &config, &variants)?;
        println!(
            "seed {seed}: log-pooled {}, direct-pooled {}",
            est[0].selection.selected_k, est[1].selection.selected_k
        );
    }
    Ok(())
}
