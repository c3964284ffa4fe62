//! First points of the unscrambled Sobol' and Halton sequences, and the
//! measured quality parameter `t` of a few Sobol' blocks.
//!
//! cargo run --example sobol_and_halton

use rqmcf::qmc::{halton_points, measure_t, sobol_points};

fn main() -> rqmcf::Result<()> {
    let sobol = sobol_points(3, 2, 0)?;
    println!("Sobol', 8 points in 2 dimensions:");
    for row in sobol.rows() {
        println!("  {:.4} {:.4}", row[0], row[1]);
    }

    let halton = halton_points(8, 2, 1)?;
    println!("Halton (bases 2, 3) from index 1:");
    for row in halton.rows() {
        println!("  {:.4} {:.4}", row[0], row[1]);
    }

    println!("measured t of 2^m-point Sobol' blocks:");
    println!("   m  s=2 s=3 s=4 s=5");
    for m in [4, 6, 8, 10] {
        let ts: Vec<String> = (2..=5)
            .map(|s| sobol_points(m, s, 0).and_then(|ps| measure_t(&ps)).map(|t| format!("{t:>3}")))
            .collect::<rqmcf::Result<_>>()?;
        println!("  {m:>2} {}", ts.join(" "));
    }
    Ok(())
}
