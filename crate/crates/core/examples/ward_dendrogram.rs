//! Ward clustering of a one-dimensional point cloud and the classifiability
//! read off the final merge.

use floquet_discovery::hac::{classifiability, hac_ward, ClassifiabilityMode};

fn main() -> floquet_discovery::Result<()> {
    let points: Vec<Vec<f64>> = [0.0, 0.2, 0.1, 4.9, 5.1, 5.0, 5.3, 9.0]
        .iter()
        .map(|&x| vec![x])
        .collect();
    let tree = hac_ward(&points)?;
    tree.write_csv(std::io::stdout())?;

    let (left, right) = tree.final_split();
    println!("final split: {left:?} | {right:?}");
    println!("raw classifiability:      {:.4}", classifiability(&tree, ClassifiabilityMode::Raw));
    println!("balanced classifiability: {:.4}", classifiability(&tree, ClassifiabilityMode::Balanced));
    Ok(())
}
