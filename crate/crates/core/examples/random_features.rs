//! Approximating a Gaussian kernel with M random features drawn four ways.
//!
//! Prints the squared error |K - K_M|^2 at one pair of points, averaged over
//! 50 draws for the randomized samplers.

use rqmcf::features::{approx_kernel, sample_features, Sampler};
use rqmcf::kernels::{eval_kernel, median_bandwidth, KernelSpec};

fn main() -> rqmcf::Result<()> {
    let d = 2;
    let kernel = KernelSpec::gaussian(median_bandwidth(d, 200_000, 0)?, d)?;
    let (x, y) = ([0.2, 0.7], [0.65, 0.4]);
    let exact = eval_kernel(&kernel, &x, &y)?;
    println!("sigma = {:.4}, K(x, y) = {exact:.6}", kernel.sigma);

    print!("{:>6}", "M");
    for s in Sampler::ALL {
        print!(" {:>12}", s.name());
    }
    println!();
    for m in [16, 64, 256, 1024] {
        print!("{m:>6}");
        for sampler in Sampler::ALL {
            let draws = if sampler.is_randomized() { 50 } else { 1 };
            let mut err = 0.0;
            for seed in 0..draws {
                let bank = sample_features(sampler, &kernel, m, seed)?;
                err += (approx_kernel(&bank, &x, &y)? - exact).powi(2);
            }
            print!(" {:>12.3e}", err / draws as f64);
        }
        println!();
    }
    Ok(())
}
