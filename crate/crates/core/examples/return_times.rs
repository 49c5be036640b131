//! First-return times to the section: the mean is `π²/3` and the
//! backward return gives the Hall density back through its tail.

use horoxt::dist::{hall_psi, MEAN_RETURN_TIME};
use horoxt::mc::{experiment_return_backward, experiment_return_forward, psi_from_indicator};

fn main() -> horoxt::Result<()> {
    let n = 200_000;
    let fwd = experiment_return_forward(11, n)?;
    println!("forward: mean {:.5} vs {:.5}, min {:.5}", fwd.mean(), MEAN_RETURN_TIME, fwd.min());
    let back = experiment_return_backward(12, n)?;
    for r in [0.5, 1.0, 2.0, 4.0, 10.0] {
        println!("r = {r:>4}: estimate {:.6}   Psi {:.6}", psi_from_indicator(&back, r), hall_psi(r)?);
    }
    Ok(())
}
