//! Exact star discrepancy of random, Halton and scrambled Sobol' points as
//! the point count grows, next to the probing lower bound.

use rqmcf::qmc::{
    halton_points, owen_scramble, sobol_points, star_discrepancy_exact, star_discrepancy_lower_bound,
    uniform_points, ScrambleSpec,
};

fn main() -> rqmcf::Result<()> {
    let dim = 2;
    println!("{:>6} {:>10} {:>10} {:>10} {:>12}", "M", "uniform", "halton", "sobol+owen", "lower bound");
    for m in 4..=10 {
        let n = 1usize << m;
        let uniform = uniform_points(n, dim, 1)?;
        let halton = halton_points(n, dim, 1)?;
        let sobol = owen_scramble(&sobol_points(m, dim, 0)?, &ScrambleSpec::owen(1))?;
        let exact = star_discrepancy_exact(&sobol)?;
        let bound = star_discrepancy_lower_bound(&sobol, 2000, 9)?;
        println!(
            "{n:>6} {:>10.5} {:>10.5} {:>10.5} {:>12.5}",
            star_discrepancy_exact(&uniform)?.value,
            star_discrepancy_exact(&halton)?.value,
            exact.value,
            bound.value
        );
    }
    Ok(())
}
