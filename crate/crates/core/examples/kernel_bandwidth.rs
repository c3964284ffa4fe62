//! Median-heuristic bandwidth for uniform inputs and the resulting Gram
//! matrix spectrum.

use rqmcf::kernels::{gram_matrix, median_bandwidth, Kernel, KernelFamily, KernelSpec};
use rqmcf::qmc::uniform_points;

fn main() -> rqmcf::Result<()> {
    for d in [1, 2, 5, 10, 20] {
        let sigma = median_bandwidth(d, 200_000, 0)?;
        println!("d = {d:>2}: median |X - X'| = {sigma:.4}");
    }

    let d = 3;
    let sigma = median_bandwidth(d, 200_000, 0)?;
    let x = uniform_points(200, d, 4)?;
    for family in [KernelFamily::Gaussian, KernelFamily::Laplacian, KernelFamily::Cauchy] {
        let k = KernelSpec::new(family, sigma, d)?;
        let eig = gram_matrix(&k, x.as_slice())?.symmetric_eigenvalues();
        println!(
            "{:<9} K(x0, x1) = {:.4}, Gram eigenvalues in [{:.2e}, {:.2e}]",
            family.name(),
            k.eval(x.row(0), x.row(1)),
            eig.min(),
            eig.max()
        );
    }
    Ok(())
}
