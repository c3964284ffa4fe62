// Owen scrambling and Cranley-Patterson rotation of a Sobol' net.
//
// A nested uniform scramble keeps the (t,m,s)-net property, a random shift
// modulo 1 in general does not. Both give points that are uniform
// marginally, which is what makes averages over independent randomizations
// unbiased.

use rqmcf::qmc::{check_net_balance, cp_rotate, measure_t, owen_scramble, sobol_points, NetParams, ScrambleSpec};

fn main() -> rqmcf::Result<()> {
    let (m, s) = (8, 3);
    let net = sobol_points(m, s, 0)?;
    let t = measure_t(&net)?;
    let params = NetParams::base2(t, m, s);
    println!("Sobol' block: 2^{m} points in {s} dimensions, t = {t}");

    for seed in 0..5 {
        let owen = owen_scramble(&net, &ScrambleSpec::owen(seed))?;
        let cp = cp_rotate(&net, seed);
        println!(
            "seed {seed}: owen keeps net: {:<5} cp keeps net: {:<5} first owen point {:.5?}",
            check_net_balance(&owen, &params)?,
            check_net_balance(&cp, &params)?,
            owen.row(0)
        );
    }

    // The origin is sent to a uniform point.
    let origin = sobol_points(0, 1, 0)?;
    let n = 10_000;
    let mean: f64 = (0..n)
        .map(|seed| owen_scramble(&origin, &ScrambleSpec::owen(seed)).map(|p| p.get(0, 0)))
        .sum::<rqmcf::Result<f64>>()?
        / n as f64;
    println!("mean of the scrambled origin over {n} seeds: {mean:.4}");
    Ok(())
}
