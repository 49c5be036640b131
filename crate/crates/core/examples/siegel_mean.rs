//! Monte Carlo check that a random unimodular lattice has on average
//! `(6/π²) · area` primitive points in a region.

use horoxt::lattice::{AxisBox, Disk, Region, TriangleRegion};
use horoxt::mc::siegel_check;

fn main() -> horoxt::Result<()> {
    let regions: Vec<(&str, Box<dyn Region>)> = vec![
        ("triangle X = 10", Box::new(TriangleRegion::new(10.0)?)),
        ("unit disk", Box::new(Disk { radius: 1.0 })),
        ("box [0,2]x[0,1]", Box::new(AxisBox { x0: 0.0, x1: 2.0, y0: 0.0, y1: 1.0 })),
    ];
    for (name, region) in &regions {
        let e = siegel_check(region.as_ref(), 20_000, 3)?;
        println!(
            "{name:<18} mean {:.4} ± {:.4}   expected {:.4}   P(hit) {:.4}",
            e.mean, e.std_error, e.expected, e.hit_fraction
        );
    }
    Ok(())
}
