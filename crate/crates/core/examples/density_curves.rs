//! Tabulates the limit densities as CSV on stdout, ready for plotting.
//!
//! ```text
//! cargo run --example density_curves > curves.csv
//! ```

use horoxt::dist::{hall_psi, omega_y, rho};

fn main() -> horoxt::Result<()> {
    println!("x,psi,rho,omega_y1");
    for k in 0..=1000 {
        let x = -6.0 + 0.01 * k as f64;
        let psi = if x >= 0.0 { hall_psi(x)? } else { 0.0 };
        println!("{x:.2},{psi:.12e},{:.12e},{:.12e}", rho(x), omega_y(x, 1.0)?);
    }
    Ok(())
}
