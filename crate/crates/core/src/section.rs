//! The hit process of a horocycle orbit against the cusp section `H(R)`.
//!
//! The orbit of `g0` is `s ↦ g0 · n̄(-s)` with `n̄(x) = [[1, 0], [x, 1]]`. A
//! primitive `v = (c, d)` labels the excursion of the orbit into the horoball
//! of `γ⁻¹∞`, where `γ` is any element of `SL(2, Z)` with bottom row `v`. That
//! excursion peaks at time `ξ = w₁/w₂` with `w = v g0`, at height `1/w₂²`; it
//! reaches the section when `1/w₂² ≥ e^R`. In the deformed lattice
//! `u = v g0 diag(e^{-R/2}, e^{R/2})` these conditions become `u ∈ Δ_X`
//! with `X = T e^{-R}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    complete_coset, enumerate_in_triangle, gcd, shortest_vector, LatticeBasis, LatticePoint,
    PrimitiveVector, TriangleRegion, MAX_APERTURE,
};
use crate::sl2::{asz_decode, horocycle_plus, mobius_apply, GroupElement, UpperHalfPoint};

/// Largest `|R|` for which `e^R` stays finite with room to spare.
pub const MAX_SECTION_PARAMETER: f64 = 700.0;

/// Default cap on the rescaled search window `X` for first returns.
pub const DEFAULT_RETURN_CAP: f64 = 1e8;

/// Largest `T e^{-R}` accepted by the direct oracle.
pub const ORACLE_MAX_WINDOW: f64 = 1e3;

/// Every point of the modular surface has height at least `√3/2`, so
/// enumerating excursions against this level finds every local maximum.
fn floor_level() -> f64 {
    (0.75f64).sqrt().ln() - 1e-9
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HitEvent {
    /// 1-based position in the hit sequence.
    pub j: usize,
    pub xi: f64,
    /// Horizontal impact parameter in `[0, 1)`.
    pub s: f64,
    /// Height of the peak above the section level `R`.
    pub t: f64,
    pub xi_entry: f64,
    pub delta: f64,
    pub vector: PrimitiveVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitSpec {
    pub g0: GroupElement,
    /// Section parameter `R`: the section sits at height `e^R`.
    pub r: f64,
    /// Time horizon `T`.
    pub horizon: f64,
}

impl OrbitSpec {
    pub fn new(g0: GroupElement, r: f64, horizon: f64) -> Result<Self> {
        if !(r.abs() <= MAX_SECTION_PARAMETER) {
            return Err(Error::Range(format!("section parameter {r} out of range")));
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::Domain(format!("time horizon must be positive, got {horizon}")));
        }
        let spec = OrbitSpec { g0, r, horizon };
        if spec.window() > MAX_APERTURE {
            return Err(Error::Capacity(format!(
                "T e^{{-R}} = {} exceeds {MAX_APERTURE}",
                spec.window()
            )));
        }
        Ok(spec)
    }

    /// Rescaled window `X = T e^{-R}`.
    pub fn window(&self) -> f64 {
        self.horizon * (-self.r).exp()
    }
}

pub fn sejour(t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("séjour needs t ≥ 0, got {t}")));
    }
    Ok(t.exp_m1().sqrt())
}

fn make_event(j: usize, xi: f64, s: f64, t: f64, vector: PrimitiveVector) -> HitEvent {
    let t = t.max(0.0);
    let delta = t.exp_m1().sqrt();
    HitEvent {
        j,
        xi,
        s,
        t,
        xi_entry: xi - delta,
        delta,
        vector,
    }
}

fn wrap_unit(s: f64) -> f64 {
    let w = s.rem_euclid(1.0);
    if w >= 1.0 || w == 0.0 {
        0.0
    } else {
        w
    }
}

fn event_from_point(g0: &GroupElement, r: f64, p: &LatticePoint, j: usize) -> Result<HitEvent> {
    let [u1, u2] = p.u;
    let t = -2.0 * u2.ln();
    let xi = r.exp() * (u1 / u2);
    let gamma = complete_coset(p.vector).to_group_element();
    let at_hit = gamma * horocycle_plus(g0, xi);
    let chart = asz_decode(&at_hit)?;
    if chart.r.abs() > 1e-8 * xi.abs().max(1.0) {
        return Err(Error::Consistency(format!(
            "hit at ξ = {xi} off the section: r = {:e}",
            chart.r
        )));
    }
    Ok(make_event(j, xi, wrap_unit(chart.s), t, p.vector))
}

/// All hits with `0 < ξ ≤ T`, in time order.
pub fn hit_process(spec: &OrbitSpec) -> Result<Vec<HitEvent>> {
    let basis = LatticeBasis::for_orbit(&spec.g0, spec.r)?;
    let region = TriangleRegion::new(spec.window())?;
    let points = enumerate_in_triangle(&basis, &region)?;
    points
        .iter()
        .enumerate()
        .map(|(i, p)| event_from_point(&spec.g0, spec.r, p, i + 1))
        .collect()
}

fn first_hit_where<P>(g0: &GroupElement, r: f64, backward: bool, cap: f64, pred: P) -> Result<HitEvent>
where
    P: Fn(&HitEvent) -> bool,
{
    if !(r.abs() <= MAX_SECTION_PARAMETER) {
        return Err(Error::Range(format!("section parameter {r} out of range")));
    }
    let cap = cap.min(MAX_APERTURE);
    let basis = LatticeBasis::for_orbit(g0, r)?;
    let mut x: f64 = 4.0f64.min(cap);
    loop {
        let region = TriangleRegion::new(if backward { -x } else { x })?;
        for (i, p) in enumerate_in_triangle(&basis, &region)?.iter().enumerate() {
            let e = event_from_point(g0, r, p, i + 1)?;
            if pred(&e) {
                return Ok(e);
            }
        }
        if x >= cap {
            return Err(Error::Horizon(cap * r.exp()));
        }
        x = (4.0 * x).min(cap);
    }
}

fn first_hit(g0: &GroupElement, r: f64, backward: bool, cap: f64) -> Result<HitEvent> {
    first_hit_where(g0, r, backward, cap, |_| true)
}

/// First hit whose excursion is entered after time 0 (`ξ^π > 0`).
pub fn first_entry_forward(g0: &GroupElement, r: f64, cap: f64) -> Result<HitEvent> {
    first_hit_where(g0, r, false, cap, |e| e.xi_entry > 0.0)
}

/// First hit after time 0, searching windows up to `X = cap`.
pub fn first_hit_forward(g0: &GroupElement, r: f64, cap: f64) -> Result<HitEvent> {
    first_hit(g0, r, false, cap)
}

/// Last hit before time 0 (its `xi` is negative).
pub fn first_hit_backward(g0: &GroupElement, r: f64, cap: f64) -> Result<HitEvent> {
    first_hit(g0, r, true, cap)
}

fn section_point(s: f64, t: f64, r: f64) -> Result<GroupElement> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("section height t must be ≥ 0, got {t}")));
    }
    crate::sl2::asz_encode(&crate::sl2::AszCoords { r: 0.0, s, t: t + r })
}

/// `η₁(w)`: first return time to `H(R)` from the section point `w = (s, t)`.
pub fn return_time_forward(s: f64, t: f64, r: f64) -> Result<f64> {
    return_time_forward_with_cap(s, t, r, DEFAULT_RETURN_CAP)
}

pub fn return_time_forward_with_cap(s: f64, t: f64, r: f64, cap: f64) -> Result<f64> {
    let g = section_point(s, t, r)?;
    Ok(first_hit_forward(&g, r, cap)?.xi)
}

/// `η₋₁(w)`: time since the previous visit, running the orbit backwards.
pub fn return_time_backward(s: f64, t: f64, r: f64) -> Result<f64> {
    return_time_backward_with_cap(s, t, r, DEFAULT_RETURN_CAP)
}

pub fn return_time_backward_with_cap(s: f64, t: f64, r: f64, cap: f64) -> Result<f64> {
    let g = section_point(s, t, r)?;
    Ok(-first_hit_backward(&g, r, cap)?.xi)
}

/// Log-height `max_γ ln Im(γ z(s))` of the orbit point at time `s`.
pub fn height_at_time(g0: &GroupElement, s: f64) -> Result<f64> {
    let (_, norm2) = shortest_vector(&horocycle_plus(g0, s))?;
    // `+ 0.0` turns -0 into +0
    Ok(-norm2.ln() + 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupExcursion {
    /// Largest log-height reached on `[0, T]`.
    pub height: f64,
    /// A time at which it is reached.
    pub argmax: f64,
}

fn peaks(g0: &GroupElement, horizon: f64) -> Result<Vec<(f64, f64)>> {
    let level = floor_level();
    let spec = OrbitSpec::new(*g0, level, horizon)?;
    let basis = LatticeBasis::for_orbit(g0, level)?;
    let region = TriangleRegion::new(spec.window())?;
    Ok(enumerate_in_triangle(&basis, &region)?
        .iter()
        .map(|p| (level.exp() * p.u[0] / p.u[1], -2.0 * p.u[1].ln() + level))
        .collect())
}

/// `sup_{0 ≤ s ≤ T} ln Im` along the orbit: the best of every excursion peak
/// in `(0, T]` and the two endpoint heights.
pub fn sup_excursion_height(g0: &GroupElement, horizon: f64) -> Result<SupExcursion> {
    let mut best = SupExcursion {
        height: height_at_time(g0, 0.0)?,
        argmax: 0.0,
    };
    for (xi, h) in peaks(g0, horizon)? {
        if h > best.height {
            best = SupExcursion { height: h, argmax: xi };
        }
    }
    let end = height_at_time(g0, horizon)?;
    if end > best.height {
        best = SupExcursion { height: end, argmax: horizon };
    }
    Ok(best)
}

/// Highest excursion peak with `0 < ξ ≤ T`, ignoring partial excursions at
/// the ends of the window.
pub fn sup_peak_height(g0: &GroupElement, horizon: f64) -> Result<Option<SupExcursion>> {
    let mut best: Option<SupExcursion> = None;
    for (xi, h) in peaks(g0, horizon)? {
        if best.is_none_or(|b| h > b.height) {
            best = Some(SupExcursion { height: h, argmax: xi });
        }
    }
    Ok(best)
}

const ORACLE_GRID_STEP: f64 = 0.1;
const ORACLE_MAX_CANDIDATE_ROWS: f64 = 1e7;
const GOLDEN: f64 = 0.618_033_988_749_894_8;

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1);
        }
    }
    0.5 * (a + b)
}

/// Polishes a maximiser by bisecting on the sign of a central difference.
fn polish_max<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let h = 1e-4;
    let slope = |s: f64| f(s + h) - f(s - h);
    let mut w = 1e-6;
    let (mut a, mut b) = (x - w, x + w);
    let mut tries = 0;
    while !(slope(a) > 0.0 && slope(b) < 0.0) {
        tries += 1;
        if tries > 12 {
            return Err(Error::NonConvergence(format!("peak near {x} could not be bracketed")));
        }
        w *= 4.0;
        a = x - w;
        b = x + w;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if !(m > a && m < b) {
            break;
        }
        if slope(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Integer `d` with `|x + d y| ≤ bound`, as an inclusive range.
fn solve_band(x: f64, y: f64, bound: f64) -> Option<(i64, i64)> {
    if y == 0.0 {
        return (x.abs() <= bound).then_some((i64::MIN, i64::MAX));
    }
    let (p, q) = ((-bound - x) / y, (bound - x) / y);
    let (lo, hi) = (p.min(q).ceil(), p.max(q).floor());
    (lo <= hi).then_some((lo as i64, hi as i64))
}

/// Hits found without the lattice reduction: every `(c, d)` whose excursion
/// could reach height `e^R` near `[0, T]` is tried, and the peak of
/// `s ↦ Im(γ · z(s))` is located numerically.
pub fn direct_crossing_oracle(spec: &OrbitSpec) -> Result<Vec<HitEvent>> {
    if spec.window() > ORACLE_MAX_WINDOW {
        return Err(Error::Domain(format!(
            "oracle needs T e^{{-R}} ≤ {ORACLE_MAX_WINDOW}, got {}",
            spec.window()
        )));
    }
    let g = spec.g0;
    let t_max = spec.horizon;
    // a peak of height ≥ e^R at time ξ ∈ [0, T] needs |w₂| ≤ e^{-R/2} and
    // |w₁| ≤ T e^{-R/2}; both bounds are doubled for safety
    let b2 = 2.0 * (-0.5 * spec.r).exp();
    let b1 = b2 * (t_max + 2.0);
    let cmax = (b1 * g.d.abs() + b2 * g.c.abs()).ceil();
    if cmax > ORACLE_MAX_CANDIDATE_ROWS {
        return Err(Error::Capacity(format!("oracle would scan {cmax} rows")));
    }
    let cmax = cmax as i64;
    let z = |s: f64| mobius_apply(&horocycle_plus(&g, s), &UpperHalfPoint::I);
    let steps = ((t_max + 2.0) / ORACLE_GRID_STEP).ceil() as usize;
    let grid: Vec<f64> = (0..=steps).map(|k| -1.0 + ORACLE_GRID_STEP * k as f64).collect();
    let zs: Vec<UpperHalfPoint> = grid.iter().map(|&s| z(s)).collect();

    let mut found = Vec::new();
    for c in -cmax..=cmax {
        let cf = c as f64;
        let Some((d1, e1)) = solve_band(cf * g.a, g.c, b1) else { continue };
        let Some((d2, e2)) = solve_band(cf * g.b, g.d, b2) else { continue };
        let (dlo, dhi) = (d1.max(d2), e1.min(e2));
        if dhi.saturating_sub(dlo) > ORACLE_MAX_CANDIDATE_ROWS as i64 {
            return Err(Error::Capacity("oracle candidate row too long".into()));
        }
        for d in dlo..=dhi {
            if (c, d) == (0, 0) || gcd(c, d) != 1 {
                continue;
            }
            // one representative of ±v: the one whose excursion opens upward in time
            let w2 = cf * g.b + d as f64 * g.d;
            if !(w2 > 0.0) {
                continue;
            }
            let v = PrimitiveVector::new(c, d)?;
            let gamma = complete_coset(v).to_group_element();
            let f = |s: f64| mobius_apply(&gamma, &z(s)).y;
            let vals: Vec<f64> = zs.iter().map(|p| mobius_apply(&gamma, p).y).collect();
            for k in 1..vals.len() - 1 {
                if !(vals[k] >= vals[k - 1] && vals[k] > vals[k + 1]) {
                    continue;
                }
                let x0 = golden_max(&f, grid[k - 1], grid[k + 1], 1e-9);
                let xi = polish_max(&f, x0)?;
                let peak = f(xi);
                let t = peak.ln() - spec.r;
                if xi > 0.0 && xi <= t_max && t >= 0.0 {
                    let at_hit = gamma * horocycle_plus(&g, xi);
                    let s = wrap_unit(asz_decode(&at_hit)?.s);
                    found.push(make_event(0, xi, s, t, v));
                }
            }
        }
    }
    found.sort_by(|x, y| x.xi.total_cmp(&y.xi).then_with(|| x.vector.cmp(&y.vector)));
    for (i, e) in found.iter_mut().enumerate() {
        e.j = i + 1;
    }
    Ok(found)
}
