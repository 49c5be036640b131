//! Largest cusp excursion of long horocycle orbits. The sample of
//! `sup height - log T` is compared with the limiting Gumbel-type law.

use horoxt::mc::{experiment_extreme, extreme_cdf, ks_distance, SamplerSpec};
use horoxt::section::sup_excursion_height;
use horoxt::sl2::GroupElement;

fn main() -> horoxt::Result<()> {
    let one = sup_excursion_height(&GroupElement::IDENTITY, 10.0)?;
    println!("identity orbit, T = 10: sup height {:.6} at s = {:.6}", one.height, one.argmax);

    let horizon = 1000.0;
    let e = experiment_extreme(&SamplerSpec::haar(1), horizon, 5000)?;
    println!("n = {}, T = {horizon}", e.n());
    println!("{:>8} {:>10} {:>10}", "h", "ecdf", "limit");
    for h in [-1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0] {
        println!("{h:>8.2} {:>10.5} {:>10.5}", e.ecdf(h), extreme_cdf(h));
    }
    println!("KS distance {:.4}", ks_distance(&e, extreme_cdf));
    Ok(())
}
