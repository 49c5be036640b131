//! Globally adaptive 15-point Gauss–Kronrod quadrature.
//!
//! Integrands here are piecewise smooth with known kinks, so callers pass the
//! kink locations as break points and every subinterval starts smooth.

use crate::error::{Error, Result};

// Kronrod abscissae (positive half, descending) and weights, QUADPACK qk15.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss 7-point weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_INTERVALS: usize = 20_000;

#[derive(Clone, Copy, Debug)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Piece {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    integrate_with_breaks(f, &[a, b], tol)
}

/// Integrates over `[points[0], points[last]]`, starting from the partition
/// given by `points` (which must be ascending).
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: f64) -> Result<f64> {
    if points.len() < 2 {
        return Ok(0.0);
    }
    if points.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Domain("quadrature break points must be ascending".into()));
    }
    let mut pieces: Vec<Piece> = points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gk15(&f, w[0], w[1]))
        .collect();
    loop {
        let total_err: f64 = pieces.iter().map(|p| p.error).sum();
        if total_err <= tol {
            break;
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::NonConvergence(format!(
                "quadrature error {total_err:e} above {tol:e} after {MAX_INTERVALS} intervals"
            )));
        }
        let (idx, worst) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, p)| (i, *p))
            .unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval cannot be split further in f64
            break;
        }
        pieces[idx] = gk15(&f, worst.a, mid);
        pieces.push(gk15(&f, mid, worst.b));
    }
    // sum in position order so the result does not depend on refinement history
    pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(pieces.iter().map(|p| p.value).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate(|x| x.powi(5) - 3.0 * x * x + 1.0, -1.0, 2.0, 1e-13).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0) + 3.0;
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn kink_with_break_point() {
        let v = integrate_with_breaks(|x: f64| x.abs(), &[-1.0, 0.0, 3.0], 1e-13).unwrap();
        assert!((v - 5.0).abs() < 1e-13);
        let v = integrate(|x: f64| x.abs(), -1.0, 3.0, 1e-11).unwrap();
        assert!((v - 5.0).abs() < 1e-11);
    }

    #[test]
    fn exponential_tail() {
        let v = integrate(|x: f64| (-x).exp(), 0.0, 50.0, 1e-13).unwrap();
        assert!((v - (1.0 - (-50.0f64).exp())).abs() < 1e-13);
    }

    #[test]
    fn rejects_unsorted_breaks() {
        assert!(integrate_with_breaks(|x| x, &[1.0, 0.0], 1e-10).is_err());
    }
}
