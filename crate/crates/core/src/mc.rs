//! Seeded Monte-Carlo experiments for the limit laws.
//!
//! Every sample is a pure function of `(seed, index)`, and results are
//! collected in index order, so output does not depend on the worker count.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{self, MEAN_RETURN_TIME, PRIMITIVE_DENSITY};
use crate::error::{Error, Result};
use crate::lattice::{count_in_dilate, reduce_fundamental, LatticeBasis, Region};
use crate::rng::{stream, SampleRng};
use crate::section::{
    first_entry_forward, first_hit_forward, hit_process, return_time_backward, return_time_forward,
    sup_excursion_height, sup_peak_height, OrbitSpec, DEFAULT_RETURN_CAP,
};
use crate::sl2::{horocycle_minus, horocycle_plus, iwasawa_encode, mobius_apply, GroupElement, IwasawaCoords, UpperHalfPoint};

pub const THREADS_ENV: &str = "HOROXT_THREADS";

/// Largest Farey order the gap oracle will materialise.
pub const FAREY_MAX_ORDER: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplerKind {
    /// Haar measure restricted to the standard fundamental domain.
    HaarFundamental,
    /// `base · n(s)` with `s` uniform on `(alpha, beta)`.
    HorocycleSegment { base: GroupElement, alpha: f64, beta: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub kind: SamplerKind,
    pub seed: u64,
}

impl SamplerSpec {
    pub fn haar(seed: u64) -> Self {
        SamplerSpec { kind: SamplerKind::HaarFundamental, seed }
    }

    pub fn horocycle_segment(base: GroupElement, alpha: f64, beta: f64, seed: u64) -> Result<Self> {
        if !(alpha < beta) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::Domain(format!("segment needs alpha < beta, got ({alpha}, {beta})")));
        }
        Ok(SamplerSpec {
            kind: SamplerKind::HorocycleSegment { base, alpha, beta },
            seed,
        })
    }
}

const SQRT3_2: f64 = 0.866_025_403_784_438_6;

/// One rejection-sampled Haar point on the fundamental domain, with the
/// number of proposals it took.
pub fn haar_draw<R: Rng>(rng: &mut R) -> (IwasawaCoords, u32) {
    let mut attempts = 0;
    loop {
        attempts += 1;
        let u = rng.random::<f64>() - 0.5;
        // inverse CDF of v^{-2} on (√3/2, ∞), with the uniform taken in (0, 1]
        let v = SQRT3_2 / (1.0 - rng.random::<f64>());
        if u * u + v * v >= 1.0 && u > -0.5 {
            let theta = PI * rng.random::<f64>();
            return (IwasawaCoords { u, v, theta }, attempts);
        }
    }
}

pub fn sample_initial(spec: &SamplerSpec, index: u64) -> GroupElement {
    let mut rng = stream(spec.seed, index);
    match spec.kind {
        SamplerKind::HaarFundamental => iwasawa_encode(&haar_draw(&mut rng).0),
        SamplerKind::HorocycleSegment { base, alpha, beta } => {
            let s = alpha + (beta - alpha) * rng.random::<f64>();
            horocycle_minus(&base, s)
        }
    }
}

/// A section point `w = (s, t)` drawn from `ν = ds e^{-t} dt`.
pub fn sample_section_point(seed: u64, index: u64) -> (f64, f64) {
    let mut rng: SampleRng = stream(seed, index);
    let s = rng.random::<f64>();
    let t: f64 = rng.sample(Exp1);
    (s, t)
}

/// Worker pool honouring `HOROXT_THREADS`.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Capacity(format!("cannot start worker pool: {e}")))
}

/// `f(0), …, f(n-1)` in parallel, in index order.
pub fn par_samples<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let pool = thread_pool()?;
    pool.install(|| (0..n as u64).into_par_iter().map(&f).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.iter().any(|x| x.is_nan()) {
            return Err(Error::Domain("NaN sample".into()));
        }
        samples.sort_by(f64::total_cmp);
        Ok(EmpiricalDistribution { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    /// Right-continuous ECDF.
    pub fn ecdf(&self, x: f64) -> f64 {
        let k = self.samples.partition_point(|&s| s <= x);
        k as f64 / self.n() as f64
    }

    /// Fraction of samples strictly above `x`.
    pub fn survival(&self, x: f64) -> f64 {
        1.0 - self.ecdf(x)
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.n() as f64
    }

    pub fn std_dev(&self) -> f64 {
        let m = self.mean();
        let ss: f64 = self.samples.iter().map(|x| (x - m) * (x - m)).sum();
        (ss / (self.n() as f64 - 1.0).max(1.0)).sqrt()
    }

    pub fn quantile(&self, p: f64) -> f64 {
        let k = ((p * self.n() as f64).ceil() as usize).clamp(1, self.n());
        self.samples[k - 1]
    }

    pub fn min(&self) -> f64 {
        self.samples[0]
    }

    pub fn max(&self) -> f64 {
        self.samples[self.n() - 1]
    }
}

/// `sup_x |F_n(x) - F(x)|`, checking both sides of every jump.
pub fn ks_distance<F: Fn(f64) -> f64>(e: &EmpiricalDistribution, cdf: F) -> f64 {
    let n = e.n() as f64;
    e.samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (((i + 1) as f64 / n) - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Two-sample statistic `sup_x |F_a(x) - F_b(x)|`.
pub fn ks_two_sample(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    let (xa, xb) = (a.samples(), b.samples());
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub value: f64,
    pub empirical: f64,
    pub analytic: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub n: usize,
    pub ks: f64,
    pub grid: Vec<GridPoint>,
    /// Kept out of serialised reports so reruns compare byte for byte.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl ExperimentReport {
    /// Compares `e` with `cdf` on the empirical 2.5%, 5%, …, 97.5% quantiles.
    pub fn new<F: Fn(f64) -> f64>(
        name: &str,
        config: serde_json::Value,
        seed: u64,
        e: &EmpiricalDistribution,
        cdf: F,
        started: Instant,
    ) -> Self {
        let grid = (1..40)
            .map(|k| {
                let x = e.quantile(k as f64 / 40.0);
                GridPoint {
                    value: x,
                    empirical: e.ecdf(x),
                    analytic: cdf(x),
                }
            })
            .collect();
        ExperimentReport {
            name: name.to_string(),
            config,
            seed,
            n: e.n(),
            ks: ks_distance(e, &cdf),
            grid,
            wall_time: started.elapsed(),
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    Ok(())
}

/// CDF of the limit law of `sup height - log T`.
pub fn extreme_cdf(h: f64) -> f64 {
    1.0 - dist::rho_cdf_upper(h)
}

/// `n` samples of `sup_{0 ≤ s ≤ T} height - log T`.
pub fn experiment_extreme(spec: &SamplerSpec, horizon: f64, n: usize) -> Result<EmpiricalDistribution> {
    check_extreme(horizon, n)?;
    let v = par_samples(n, |i| {
        let g0 = sample_initial(spec, i);
        Ok(sup_excursion_height(&g0, horizon)?.height - horizon.ln())
    })?;
    EmpiricalDistribution::new(v)
}

/// Same, keeping only complete excursions (peaks with `0 < ξ ≤ T`).
pub fn experiment_extreme_peaks(spec: &SamplerSpec, horizon: f64, n: usize) -> Result<EmpiricalDistribution> {
    check_extreme(horizon, n)?;
    let v = par_samples(n, |i| {
        let g0 = sample_initial(spec, i);
        Ok(sup_peak_height(&g0, horizon)?.map_or(f64::NEG_INFINITY, |p| p.height) - horizon.ln())
    })?;
    EmpiricalDistribution::new(v)
}

/// Hyperbolic distance from `i` to the orbit of `z` under `SL(2, Z)`.
pub fn distance_from_i(z: &UpperHalfPoint) -> Result<f64> {
    let g = iwasawa_encode(&IwasawaCoords { u: z.x, v: z.y, theta: 0.0 });
    let red = reduce_fundamental(&g)?;
    Ok(UpperHalfPoint::I.distance(&red.point))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceSample {
    pub height: f64,
    pub distance: f64,
}

/// Distance from the base point `i` at the time the orbit is highest.
///
/// For `z` in the standard domain, `d(i, z) - log Im z` is `O(e^{-2τ})` at
/// height `τ`, so this tracks the distance supremum to that accuracy.
pub fn sup_distance_from_i(g0: &GroupElement, horizon: f64) -> Result<DistanceSample> {
    let sup = sup_excursion_height(g0, horizon)?;
    let z = mobius_apply(&horocycle_plus(g0, sup.argmax), &UpperHalfPoint::I);
    Ok(DistanceSample {
        height: sup.height,
        distance: distance_from_i(&z)?,
    })
}

/// `n` samples of `sup d(i, orbit) - log T`.
pub fn experiment_extreme_distance(spec: &SamplerSpec, horizon: f64, n: usize) -> Result<EmpiricalDistribution> {
    check_extreme(horizon, n)?;
    let v = par_samples(n, |i| {
        let g0 = sample_initial(spec, i);
        Ok(sup_distance_from_i(&g0, horizon)?.distance - horizon.ln())
    })?;
    EmpiricalDistribution::new(v)
}

fn check_extreme(horizon: f64, n: usize) -> Result<()> {
    check_n(n)?;
    if !(horizon >= 10.0) {
        return Err(Error::Domain(format!("extreme-value runs need T ≥ 10, got {horizon}")));
    }
    Ok(())
}

fn check_first_hit(r: f64, n: usize) -> Result<()> {
    check_n(n)?;
    if !(r >= 3.0) {
        return Err(Error::Domain(format!("first-hit runs need R ≥ 3, got {r}")));
    }
    Ok(())
}

/// `n` samples of `e^{-R} ξ₁`.
pub fn experiment_first_hit(spec: &SamplerSpec, r: f64, n: usize) -> Result<EmpiricalDistribution> {
    check_first_hit(r, n)?;
    let scale = (-r).exp();
    let v = par_samples(n, |i| {
        let g0 = sample_initial(spec, i);
        Ok(first_hit_forward(&g0, r, DEFAULT_RETURN_CAP)?.xi * scale)
    })?;
    EmpiricalDistribution::new(v)
}

/// `n` samples of `e^{-R} ξ^π₁`, the first entry time after 0.
pub fn experiment_first_entry(spec: &SamplerSpec, r: f64, n: usize) -> Result<EmpiricalDistribution> {
    check_first_hit(r, n)?;
    let scale = (-r).exp();
    let v = par_samples(n, |i| {
        let g0 = sample_initial(spec, i);
        Ok(first_entry_forward(&g0, r, DEFAULT_RETURN_CAP)?.xi_entry * scale)
    })?;
    EmpiricalDistribution::new(v)
}

/// First return times `η₁(w)` to `H(0)` for `w ~ ν`.
pub fn experiment_return_forward(seed: u64, n: usize) -> Result<EmpiricalDistribution> {
    check_n(n)?;
    let v = par_samples(n, |i| {
        let (s, t) = sample_section_point(seed, i);
        return_time_forward(s, t, 0.0)
    })?;
    EmpiricalDistribution::new(v)
}

/// Backward return times `η₋₁(w)` for `w ~ ν`.
pub fn experiment_return_backward(seed: u64, n: usize) -> Result<EmpiricalDistribution> {
    check_n(n)?;
    let v = par_samples(n, |i| {
        let (s, t) = sample_section_point(seed, i);
        return_time_backward(s, t, 0.0)
    })?;
    EmpiricalDistribution::new(v)
}

/// `P(η₋₁ > r) / η̄₁`, the indicator estimate of `Ψ(r)`.
pub fn psi_from_indicator(backward: &EmpiricalDistribution, r: f64) -> f64 {
    backward.survival(r) / MEAN_RETURN_TIME
}

/// Mean number of hits of `H(0)` with `0 < ξ ≤ X` per unit time, Haar starts.
pub fn hit_intensity(seed: u64, window: f64, n: usize) -> Result<f64> {
    check_n(n)?;
    let spec = SamplerSpec::haar(seed);
    let counts = par_samples(n, |i| {
        let g0 = sample_initial(&spec, i);
        Ok(hit_process(&OrbitSpec::new(g0, 0.0, window)?)?.len())
    })?;
    Ok(counts.iter().sum::<usize>() as f64 / (n as f64 * window))
}

/// All gaps of the Farey sequence of order `q` on `[0, 1]`, scaled by `q²`.
pub fn farey_gap_oracle(q: u64) -> Result<EmpiricalDistribution> {
    if q < 100 {
        return Err(Error::Domain(format!("Farey order must be ≥ 100, got {q}")));
    }
    if q > FAREY_MAX_ORDER {
        return Err(Error::Capacity(format!("Farey order {q} above {FAREY_MAX_ORDER}")));
    }
    let q2 = (q as f64) * (q as f64);
    let mut gaps = Vec::with_capacity((0.31 * q2) as usize);
    // neighbours a/b < c/d in F_q; the gap is 1/(bd)
    let (mut a, mut b, mut c, mut d) = (0u64, 1u64, 1u64, q);
    loop {
        gaps.push(q2 / (b as f64 * d as f64));
        if c == 1 && d == 1 {
            break;
        }
        let k = (q + b) / d;
        (a, b, c, d) = (c, d, k * c - a, k * d - b);
    }
    EmpiricalDistribution::new(gaps)
}

/// CDF matching the scaled Farey gaps: `1 - (π²/3) Ψ(r)`.
pub fn farey_gap_cdf(r: f64) -> f64 {
    if r < 1.0 {
        return 0.0;
    }
    1.0 - MEAN_RETURN_TIME * dist::hall_psi(r).unwrap_or(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiegelEstimate {
    /// Mean number of primitive lattice points in the region.
    pub mean: f64,
    /// `(6/π²) · area`.
    pub expected: f64,
    pub std_error: f64,
    /// Fraction of lattices meeting the region at all.
    pub hit_fraction: f64,
}

impl SiegelEstimate {
    pub fn deviation(&self) -> f64 {
        self.mean - self.expected
    }

    pub fn relative_error(&self) -> f64 {
        self.deviation().abs() / self.expected
    }
}

/// Monte-Carlo average of `#(P g ∩ region)` over Haar-random `g`.
pub fn siegel_check(region: &dyn Region, n: usize, seed: u64) -> Result<SiegelEstimate> {
    check_n(n)?;
    let spec = SamplerSpec::haar(seed);
    let counts = par_samples(n, |i| {
        let basis = LatticeBasis::new(sample_initial(&spec, i))?;
        count_in_dilate(&basis, region, 1.0)
    })?;
    let nf = n as f64;
    let mean = counts.iter().sum::<usize>() as f64 / nf;
    let var = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (nf - 1.0).max(1.0);
    Ok(SiegelEstimate {
        mean,
        expected: PRIMITIVE_DENSITY * region.area(),
        std_error: (var / nf).sqrt(),
        hit_fraction: counts.iter().filter(|&&c| c > 0).count() as f64 / nf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_samples_lie_in_domain_and_acceptance_matches_area() {
        let mut attempts = 0u64;
        let n = 100_000;
        for i in 0..n {
            let mut rng = stream(11, i);
            let (c, k) = haar_draw(&mut rng);
            attempts += k as u64;
            assert!(c.u * c.u + c.v * c.v >= 1.0 && c.u.abs() <= 0.5);
            assert!((0.0..PI).contains(&c.theta));
        }
        let rate = n as f64 / attempts as f64;
        let expected = (PI / 3.0) / (2.0 / 3f64.sqrt());
        assert!((rate / expected - 1.0).abs() < 0.01, "{rate} vs {expected}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = SamplerSpec::haar(5);
        assert_eq!(sample_initial(&spec, 9).entries(), sample_initial(&spec, 9).entries());
        assert_ne!(sample_initial(&spec, 9).entries(), sample_initial(&spec, 10).entries());
        assert_eq!(sample_section_point(3, 4), sample_section_point(3, 4));
    }

    #[test]
    fn segment_spec_is_checked() {
        assert!(SamplerSpec::horocycle_segment(GroupElement::IDENTITY, 1.0, 1.0, 0).is_err());
        let spec = SamplerSpec::horocycle_segment(GroupElement::IDENTITY, 0.0, 1.0, 0).unwrap();
        let g = sample_initial(&spec, 0);
        assert_eq!((g.a, g.c, g.d), (1.0, 0.0, 1.0));
        assert!((0.0..1.0).contains(&g.b));
    }

    #[test]
    fn ks_basics() {
        let e = EmpiricalDistribution::new((0..100).map(|i| i as f64).collect()).unwrap();
        let d = ks_distance(&e, |x| e.ecdf(x));
        assert!(d <= 1.0 / 100.0 + 1e-15);
        let one = EmpiricalDistribution::new(vec![0.0]).unwrap();
        assert_eq!(ks_distance(&one, |x: f64| 0.5 + 0.5 * x.tanh()), 0.5);
        let mut rng = stream(1, 0);
        let u = EmpiricalDistribution::new((0..10_000).map(|_| rng.random::<f64>()).collect()).unwrap();
        assert!(ks_distance(&u, |x| x.clamp(0.0, 1.0)) <= 0.03);
        assert_eq!(ks_two_sample(&u, &u), 0.0);
    }

    #[test]
    fn ks_with_ties() {
        let e = EmpiricalDistribution::new(vec![1.0, 1.0, 1.0, 2.0]).unwrap();
        // jump of 3/4 at 1 against a continuous CDF equal to 1/2 there
        let d = ks_distance(&e, |x| (x / 2.0).clamp(0.0, 1.0));
        assert!((d - 0.5).abs() < 1e-15);
        let f = EmpiricalDistribution::new(vec![1.0, 2.0, 2.0, 2.0]).unwrap();
        assert!((ks_two_sample(&e, &f) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn empirical_accessors() {
        let e = EmpiricalDistribution::new(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(e.samples(), &[1.0, 2.0, 3.0]);
        assert_eq!(e.ecdf(2.0), 2.0 / 3.0);
        assert_eq!(e.quantile(0.5), 2.0);
        assert_eq!(e.mean(), 2.0);
        assert!(EmpiricalDistribution::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn farey_small_structure() {
        let e = farey_gap_oracle(1000).unwrap();
        assert!((e.min() - 1000.0 / 999.0).abs() < 1e-12);
        assert!(farey_gap_oracle(99).is_err());
        assert!(matches!(farey_gap_oracle(100_001), Err(Error::Capacity(_))));
        // scaled gaps of F_100 sum to 100²
        let e = farey_gap_oracle(100).unwrap();
        assert!((e.samples().iter().sum::<f64>() - 1e4).abs() < 1e-8);
    }

    #[test]
    fn distance_is_close_to_height_high_up() {
        for y in [3.0, 10.0, 100.0] {
            for x in [-0.5, 0.0, 0.3] {
                let z = UpperHalfPoint::new(x, y).unwrap();
                let d = distance_from_i(&z).unwrap();
                assert!(d >= y.ln() - 1e-12 && d - y.ln() <= 1.0 / y, "{x} {y} {d}");
            }
        }
        // an equivalent point far outside the domain
        let z = UpperHalfPoint::new(0.0, 0.01).unwrap();
        assert!((distance_from_i(&z).unwrap() - 100f64.ln()).abs() <= 0.01);
    }
}
