//! Lattice utilities on their own: reduction to the standard domain,
//! the shortest vector, and primitive points in the section triangle.

use horoxt::lattice::{enumerate_in_triangle, reduce_fundamental, shortest_vector, LatticeBasis, TriangleRegion};
use horoxt::sl2::{iwasawa_encode, mobius_apply, IwasawaCoords, UpperHalfPoint};

fn main() -> horoxt::Result<()> {
    let g = iwasawa_encode(&IwasawaCoords { u: 3.17, v: 0.041, theta: 1.1 });
    let z = mobius_apply(&g, &UpperHalfPoint::I);
    let red = reduce_fundamental(&g)?;
    println!("g·i = {:.6} + {:.6}i  reduces to {:.6} + {:.6}i", z.x, z.y, red.point.x, red.point.y);
    let (v, n2) = shortest_vector(&g)?;
    println!("shortest primitive vector ({}, {}), squared norm {n2:.6}", v.c, v.d);

    let basis = LatticeBasis::for_orbit(&g, 0.0)?;
    let pts = enumerate_in_triangle(&basis, &TriangleRegion::new(30.0)?)?;
    println!("{} primitive points in the triangle with X = 30", pts.len());
    for p in pts.iter().take(10) {
        println!("  ({:>3}, {:>3}) -> ({:>9.5}, {:.5})", p.vector.c, p.vector.d, p.u[0], p.u[1]);
    }
    Ok(())
}
