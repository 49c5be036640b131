//! Scaled gaps between consecutive Farey fractions of order Q against
//! the Hall distribution.

use horoxt::dist::MEAN_RETURN_TIME;
use horoxt::mc::{farey_gap_cdf, farey_gap_oracle, ks_distance};

fn main() -> horoxt::Result<()> {
    let q: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2000);
    let gaps = farey_gap_oracle(q)?;
    println!("Q = {q}: {} gaps", gaps.n());
    println!("mean {:.6} (limit {:.6}), min {:.6}", gaps.mean(), MEAN_RETURN_TIME, gaps.min());
    for r in [1.0, 2.0, 4.0, 8.0, 16.0] {
        println!("P(gap <= {r:>4}) = {:.5}   limit {:.5}", gaps.ecdf(r), farey_gap_cdf(r));
    }
    println!("KS distance {:.5}", ks_distance(&gaps, farey_gap_cdf));
    Ok(())
}
