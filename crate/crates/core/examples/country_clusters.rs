//! k-means of producing countries by (CR3, HHI), with an SVG scatter.

use market_concentration::analysis::concentration_points;
use market_concentration::clustering::cluster_report;
use market_concentration::report::svg;
use market_concentration::{fixtures, kmeans, KMeansConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (points, dropped) = concentration_points(&fixtures::country_indices());
    println!("Dropped for missing indices: {}\n", dropped.join(", "));
    for k in [2, 3] {
        let result = kmeans(&points, &KMeansConfig::new(k))?;
        println!("{}", cluster_report(&result, &points)?);
        if k == 2 {
            let path = std::env::temp_dir().join("country_clusters_k2.svg");
            std::fs::write(
                &path,
                svg::cluster_scatter(&points, &result, "k = 2", "CR3", "HHI"),
            )?;
            println!("scatter written to {}\n", path.display());
        }
    }
    Ok(())
}
