//! Orthant probabilities of correlated normals, by conditioning in low
//! dimension and by randomized lattice rules above it.

use bsbond::binaries::{bvn_cdf, mvn_cdf, MvnConfig, MvnProblem};

fn main() -> bsbond::Result<()> {
    println!("bivariate, rho = 0.5: {:.12}", bvn_cdf(0.3, -0.2, 0.5));

    let equi = |m: usize, rho: f64| -> Vec<Vec<f64>> {
        (0..m)
            .map(|i| (0..m).map(|j| if i == j { 1.0 } else { rho }).collect())
            .collect()
    };
    let lattice = MvnConfig {
        abs_tol: 2e-5,
        ..MvnConfig::default()
    };
    for m in [3, 4, 5, 6] {
        let p = MvnProblem {
            upper_limits: vec![0.0; m],
            correlation: equi(m, 0.5),
        };
        // with rho = 1/2 the orthant probability is 1 / (m + 1)
        let est = mvn_cdf(&p, &lattice)?;
        println!(
            "m = {m}: {:.9} (exact {:.9}, error estimate {:.1e})",
            est.value,
            1.0 / (m as f64 + 1.0),
            est.error
        );
    }
    Ok(())
}
