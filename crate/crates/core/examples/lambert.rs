//! Principal branch of the Lambert W function.

use ckptopt::lambert::lambert_w0;

fn main() -> ckptopt::Result<()> {
    let branch = -(-1.0f64).exp();
    for x in [branch, -0.3, -1e-3, 0.0, 1.0, std::f64::consts::E, 1e3, 1e8] {
        let r = lambert_w0(x)?;
        println!(
            "W0({x:>12.6e}) = {:>12.9}  iterations = {}  residual = {:.1e}",
            r.value, r.iterations, r.residual
        );
    }
    // below -1/e there is no real solution
    println!("W0(-0.5): {}", lambert_w0(-0.5).unwrap_err());
    Ok(())
}
