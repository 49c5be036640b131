//! Hits of a random horocycle orbit on the section at height `e^R`,
//! cross-checked against the brute-force crossing oracle.

use horoxt::mc::{sample_initial, SamplerSpec};
use horoxt::section::{direct_crossing_oracle, hit_process, OrbitSpec};

fn main() -> horoxt::Result<()> {
    let g0 = sample_initial(&SamplerSpec::haar(7), 0);
    let spec = OrbitSpec::new(g0, 1.0, 200.0)?;
    let hits = hit_process(&spec)?;
    println!("{:>3} {:>12} {:>8} {:>8}  vector", "j", "xi", "s", "t");
    for h in &hits {
        println!("{:>3} {:>12.6} {:>8.5} {:>8.5}  ({}, {})", h.j, h.xi, h.s, h.t, h.vector.c, h.vector.d);
    }
    let oracle = direct_crossing_oracle(&spec)?;
    let worst = hits.iter().zip(&oracle).map(|(a, b)| (a.xi - b.xi).abs()).fold(0.0, f64::max);
    println!("{} hits, oracle found {}, largest time difference {worst:.1e}", hits.len(), oracle.len());
    Ok(())
}
