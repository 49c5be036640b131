//! Arithmetic of `SL(2, Z)` and enumeration of primitive lattice points.
//!
//! The deformed point set `P g = {(c, d) g : gcd(c, d) = 1}` labels the cosets
//! `Γ_∞ γ` through their bottom rows. Enumeration inside a convex region is
//! exact: the basis is Gauss-reduced, the region's pre-image is scanned line
//! by line, and each candidate is tested with the region's own predicate on
//! `v · M` computed from the original basis.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sl2::{mobius_apply, GroupElement, UpperHalfPoint};

/// Default bound on the number of points a single enumeration may return.
pub const DEFAULT_CAPACITY: usize = 100_000_000;

/// Bound on the number of scan lines (and on `|X|`).
pub const MAX_APERTURE: f64 = 1e9;

const MAX_REDUCTION_STEPS: usize = 1_000_000;

/// Binary gcd on absolute values; `gcd(0, n) = |n|`.
pub fn gcd(a: i64, b: i64) -> u64 {
    let mut a = a.unsigned_abs();
    let mut b = b.unsigned_abs();
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

pub fn is_primitive(c: i64, d: i64) -> Result<bool> {
    if c == 0 && d == 0 {
        return Err(Error::ZeroVector);
    }
    Ok(gcd(c, d) == 1)
}

/// An integer vector with coprime entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimitiveVector {
    pub c: i64,
    pub d: i64,
}

impl PrimitiveVector {
    pub fn new(c: i64, d: i64) -> Result<Self> {
        if is_primitive(c, d)? {
            Ok(PrimitiveVector { c, d })
        } else {
            Err(Error::Domain(format!("({c}, {d}) is not primitive")))
        }
    }

    pub(crate) fn new_unchecked(c: i64, d: i64) -> Self {
        PrimitiveVector { c, d }
    }

    pub fn to_f64(self) -> [f64; 2] {
        [self.c as f64, self.d as f64]
    }
}

impl fmt::Display for PrimitiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.c, self.d)
    }
}

/// Integer 2×2 matrix, used for elements of `SL(2, Z)` and basis changes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IntMatrix {
    pub const IDENTITY: IntMatrix = IntMatrix { a: 1, b: 0, c: 0, d: 1 };

    pub fn det(&self) -> i128 {
        self.a as i128 * self.d as i128 - self.b as i128 * self.c as i128
    }

    pub fn to_group_element(&self) -> GroupElement {
        GroupElement::new_unchecked(self.a as f64, self.b as f64, self.c as f64, self.d as f64)
    }

    pub fn max_abs(&self) -> u64 {
        self.a
            .unsigned_abs()
            .max(self.b.unsigned_abs())
            .max(self.c.unsigned_abs())
            .max(self.d.unsigned_abs())
    }

    fn row_mul(&self, w: [i64; 2]) -> Option<[i64; 2]> {
        let x = w[0] as i128 * self.a as i128 + w[1] as i128 * self.c as i128;
        let y = w[0] as i128 * self.b as i128 + w[1] as i128 * self.d as i128;
        Some([i64::try_from(x).ok()?, i64::try_from(y).ok()?])
    }
}

impl Mul for IntMatrix {
    type Output = IntMatrix;

    fn mul(self, r: IntMatrix) -> IntMatrix {
        IntMatrix {
            a: self.a * r.a + self.b * r.c,
            b: self.a * r.b + self.b * r.d,
            c: self.c * r.a + self.d * r.c,
            d: self.c * r.b + self.d * r.d,
        }
    }
}

/// Extended Euclid: `(g, x, y)` with `a x + b y = g = gcd(a, b) ≥ 0`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Completes `(c, d)` to `γ ∈ SL(2, Z)` with bottom row `(c, d)`.
///
/// The top row is normalised modulo `Γ_∞`: `0 ≤ a < |c|` when `c ≠ 0`, and
/// `γ = ±1` when `c = 0`.
pub fn complete_coset(v: PrimitiveVector) -> IntMatrix {
    let (c, d) = (v.c as i128, v.d as i128);
    if c == 0 {
        return IntMatrix { a: v.d, b: 0, c: 0, d: v.d };
    }
    // a d - b c = 1  <=>  a d + (-b) c = 1
    let (_, x, y) = ext_gcd(d, c);
    let (mut a, mut b) = (x, -y);
    // shifting by n(m) changes (a, b) by m (c, d)
    let m = a.div_euclid(c.abs()) * c.signum();
    a -= m * c;
    b -= m * d;
    debug_assert!(a * d - b * c == 1);
    IntMatrix {
        a: a as i64,
        b: b as i64,
        c: v.c,
        d: v.d,
    }
}

/// Result of reducing a group element to the standard fundamental domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reduction {
    pub gamma: IntMatrix,
    /// `gamma · g`; its image of `i` lies in the standard domain.
    pub reduced: GroupElement,
    pub point: UpperHalfPoint,
}

/// Finds `γ ∈ SL(2, Z)` moving `g · i` into `|Re z| ≤ 1/2, |z| ≥ 1`.
pub fn reduce_fundamental(g: &GroupElement) -> Result<Reduction> {
    let mut gamma = IntMatrix::IDENTITY;
    let s = IntMatrix { a: 0, b: -1, c: 1, d: 0 };
    for _ in 0..MAX_REDUCTION_STEPS {
        let cur = gamma.to_group_element() * *g;
        let z = mobius_apply(&cur, &UpperHalfPoint::I);
        let n = z.x.round();
        if n != 0.0 && z.x.abs() > 0.5 {
            if n.abs() > 1e15 {
                return Err(Error::NonConvergence(format!("translation {n} too large")));
            }
            gamma = IntMatrix { a: 1, b: -(n as i64), c: 0, d: 1 } * gamma;
            continue;
        }
        if z.abs_sq() < 1.0 - 1e-14 {
            gamma = s * gamma;
            if gamma.max_abs() > 1 << 40 {
                return Err(Error::NonConvergence("entries of γ overflow".into()));
            }
            continue;
        }
        return Ok(Reduction {
            gamma,
            reduced: cur,
            point: z,
        });
    }
    Err(Error::NonConvergence(format!(
        "fundamental-domain reduction exceeded {MAX_REDUCTION_STEPS} steps"
    )))
}

/// The rows of a unimodular matrix `M`, spanning the deformed lattice `Z² M`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeBasis {
    m: GroupElement,
}

impl LatticeBasis {
    pub fn new(m: GroupElement) -> Result<Self> {
        let det = m.det();
        let scale = 1.0f64.max((m.a * m.d).abs() + (m.b * m.c).abs());
        if !det.is_finite() || (det - 1.0).abs() > 1e-10 * scale {
            return Err(Error::NotUnimodular { det });
        }
        Ok(LatticeBasis { m })
    }

    /// `M = g0 · diag(e^{-R/2}, e^{R/2})`.
    pub fn for_orbit(g0: &GroupElement, r: f64) -> Result<Self> {
        LatticeBasis::new(crate::sl2::geodesic_flow(g0, -r)?)
    }

    pub fn matrix(&self) -> &GroupElement {
        &self.m
    }

    pub fn image(&self, v: PrimitiveVector) -> [f64; 2] {
        self.m.row_mul(v.to_f64())
    }
}

/// A Gauss-reduced basis `B = U M` with `U ∈ GL(2, Z)`.
#[derive(Clone, Copy, Debug)]
pub struct ReducedBasis {
    pub transform: IntMatrix,
    pub rows: [[f64; 2]; 2],
}

fn dot(x: [f64; 2], y: [f64; 2]) -> f64 {
    x[0] * y[0] + x[1] * y[1]
}

/// Lagrange–Gauss reduction of the rows of `m`; the first row is a shortest
/// nonzero vector of `Z² m`.
pub fn gauss_reduce(m: &GroupElement) -> Result<ReducedBasis> {
    let mut b = [[m.a, m.b], [m.c, m.d]];
    let mut u = [[1i64, 0], [0, 1]];
    if dot(b[0], b[0]) > dot(b[1], b[1]) {
        b.swap(0, 1);
        u.swap(0, 1);
    }
    for _ in 0..10_000 {
        let mu = (dot(b[0], b[1]) / dot(b[0], b[0])).round();
        if !mu.is_finite() || mu.abs() > 4e18 {
            return Err(Error::NonConvergence(format!("Gauss reduction multiplier {mu}")));
        }
        if mu != 0.0 {
            let k = mu as i64;
            b[1] = [b[1][0] - mu * b[0][0], b[1][1] - mu * b[0][1]];
            u[1] = [
                u[1][0].checked_sub(k.checked_mul(u[0][0]).ok_or_else(overflow)?).ok_or_else(overflow)?,
                u[1][1].checked_sub(k.checked_mul(u[0][1]).ok_or_else(overflow)?).ok_or_else(overflow)?,
            ];
        }
        if dot(b[1], b[1]) < dot(b[0], b[0]) {
            b.swap(0, 1);
            u.swap(0, 1);
        } else {
            let transform = IntMatrix {
                a: u[0][0],
                b: u[0][1],
                c: u[1][0],
                d: u[1][1],
            };
            // recompute rows from the integer transform to avoid drift
            let t = transform.to_group_element() * *m;
            return Ok(ReducedBasis {
                transform,
                rows: [[t.a, t.b], [t.c, t.d]],
            });
        }
    }
    Err(Error::NonConvergence("Gauss reduction did not terminate".into()))
}

fn overflow() -> Error {
    Error::Capacity("basis transform overflows i64".into())
}

/// Shortest nonzero vector of `Z² m`, as its coefficient vector and squared length.
pub fn shortest_vector(m: &GroupElement) -> Result<(PrimitiveVector, f64)> {
    let red = gauss_reduce(m)?;
    let t = red.transform;
    let v = PrimitiveVector::new_unchecked(t.a, t.b);
    let u = m.row_mul(v.to_f64());
    Ok((v, dot(u, u)))
}

/// A bounded region of the plane with a membership predicate.
pub trait Region: Sync {
    fn contains(&self, u: [f64; 2]) -> bool;
    /// Vertices of a convex polygon containing the closure of the region.
    fn hull(&self) -> Vec<[f64; 2]>;
    fn area(&self) -> f64;
}

/// `Δ_X = {0 < u₁ ≤ X u₂, 0 < u₂ ≤ 1}` for `X > 0`, and
/// `Δ_X = {X u₂ ≤ u₁ < 0, 0 < u₂ ≤ 1}` for `X < 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleRegion {
    pub x: f64,
}

impl TriangleRegion {
    pub fn new(x: f64) -> Result<Self> {
        if x == 0.0 || !x.is_finite() {
            return Err(Error::Domain(format!("triangle aperture must be finite and nonzero, got {x}")));
        }
        Ok(TriangleRegion { x })
    }
}

impl Region for TriangleRegion {
    fn contains(&self, u: [f64; 2]) -> bool {
        if !(u[1] > 0.0 && u[1] <= 1.0) {
            return false;
        }
        if self.x > 0.0 {
            u[0] > 0.0 && u[0] <= self.x * u[1]
        } else {
            self.x * u[1] <= u[0] && u[0] < 0.0
        }
    }

    fn hull(&self) -> Vec<[f64; 2]> {
        vec![[0.0, 0.0], [self.x, 1.0], [0.0, 1.0]]
    }

    fn area(&self) -> f64 {
        0.5 * self.x.abs()
    }
}

/// Closed disk of the given radius about the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disk {
    pub radius: f64,
}

impl Region for Disk {
    fn contains(&self, u: [f64; 2]) -> bool {
        dot(u, u) <= self.radius * self.radius
    }

    fn hull(&self) -> Vec<[f64; 2]> {
        let r = self.radius;
        vec![[-r, -r], [r, -r], [r, r], [-r, r]]
    }

    fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }
}

/// Half-open axis-parallel box `[x0, x1) × [y0, y1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisBox {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Region for AxisBox {
    fn contains(&self, u: [f64; 2]) -> bool {
        self.x0 <= u[0] && u[0] < self.x1 && self.y0 <= u[1] && u[1] < self.y1
    }

    fn hull(&self) -> Vec<[f64; 2]> {
        vec![
            [self.x0, self.y0],
            [self.x1, self.y0],
            [self.x1, self.y1],
            [self.x0, self.y1],
        ]
    }

    fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }
}

/// A primitive vector together with its image `u = v · M`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticePoint {
    pub vector: PrimitiveVector,
    pub u: [f64; 2],
}

/// Visits every primitive `v` whose image `v · M` lies in the convex polygon
/// `hull` and satisfies `accept`. Returns the number of accepted points.
pub fn scan_polygon<F>(
    basis: &LatticeBasis,
    hull: &[[f64; 2]],
    capacity: usize,
    mut accept: F,
) -> Result<usize>
where
    F: FnMut(PrimitiveVector, [f64; 2]) -> bool,
{
    let m = basis.matrix();
    let red = gauss_reduce(m)?;
    let [r0, r1] = red.rows;
    let det = r0[0] * r1[1] - r0[1] * r1[0];
    // row vector times inverse of [[r0],[r1]]
    let to_w = |p: [f64; 2]| -> [f64; 2] {
        [
            (p[0] * r1[1] - p[1] * r1[0]) / det,
            (-p[0] * r0[1] + p[1] * r0[0]) / det,
        ]
    };
    let w: Vec<[f64; 2]> = hull.iter().map(|&p| to_w(p)).collect();
    let extent = |k: usize| {
        let lo = w.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
        let hi = w.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    let (lo0, hi0) = extent(0);
    let (lo1, hi1) = extent(1);
    // scan along the coordinate with fewer integer lines
    let outer = if hi0 - lo0 <= hi1 - lo1 { 0 } else { 1 };
    let inner = 1 - outer;
    let (lo, hi) = if outer == 0 { (lo0, hi0) } else { (lo1, hi1) };
    if !(hi - lo).is_finite() || hi - lo > MAX_APERTURE * 4.0 {
        return Err(Error::Capacity(format!("scan spans {} lines", hi - lo)));
    }
    let widen = |x: f64| 1e-6 + 1e-9 * x.abs();
    let first = (lo - widen(lo)).ceil() as i64;
    let last = (hi + widen(hi)).floor() as i64;

    let mut count = 0usize;
    for k in first..=last {
        let kf = k as f64;
        let mut ilo = f64::INFINITY;
        let mut ihi = f64::NEG_INFINITY;
        for i in 0..w.len() {
            let p = w[i];
            let q = w[(i + 1) % w.len()];
            let (pmin, pmax) = (p[outer].min(q[outer]), p[outer].max(q[outer]));
            let tol = widen(kf);
            if kf < pmin - tol || kf > pmax + tol {
                continue;
            }
            if pmax - pmin <= f64::EPSILON * (1.0 + pmax.abs()) {
                ilo = ilo.min(p[inner]).min(q[inner]);
                ihi = ihi.max(p[inner]).max(q[inner]);
            } else {
                let lam = ((kf - p[outer]) / (q[outer] - p[outer])).clamp(0.0, 1.0);
                let x = p[inner] + lam * (q[inner] - p[inner]);
                ilo = ilo.min(x);
                ihi = ihi.max(x);
            }
        }
        if ilo > ihi {
            continue;
        }
        let jfirst = (ilo - widen(ilo)).ceil() as i64;
        let jlast = (ihi + widen(ihi)).floor() as i64;
        for j in jfirst..=jlast {
            let wv = if outer == 0 { [k, j] } else { [j, k] };
            if wv == [0, 0] {
                continue;
            }
            let Some(v) = red.transform.row_mul(wv) else {
                return Err(overflow());
            };
            if gcd(v[0], v[1]) != 1 {
                continue;
            }
            let pv = PrimitiveVector::new_unchecked(v[0], v[1]);
            let u = m.row_mul(pv.to_f64());
            if accept(pv, u) {
                count += 1;
                if count > capacity {
                    return Err(Error::Capacity(format!(
                        "more than {capacity} lattice points in region"
                    )));
                }
            }
        }
    }
    Ok(count)
}

fn hitting_order(x: &LatticePoint, y: &LatticePoint) -> Ordering {
    let kx = (x.u[0] / x.u[1]).abs();
    let ky = (y.u[0] / y.u[1]).abs();
    kx.total_cmp(&ky).then_with(|| x.vector.cmp(&y.vector))
}

/// All primitive `v` with `v · M ∈ Δ_X`, in hitting-time order: ascending
/// `|u₁ / u₂|` (ascending `u₁/u₂` for `X > 0`), ties broken by `(c, d)`.
pub fn enumerate_in_triangle(basis: &LatticeBasis, region: &TriangleRegion) -> Result<Vec<LatticePoint>> {
    enumerate_in_triangle_with_capacity(basis, region, DEFAULT_CAPACITY)
}

pub fn enumerate_in_triangle_with_capacity(
    basis: &LatticeBasis,
    region: &TriangleRegion,
    capacity: usize,
) -> Result<Vec<LatticePoint>> {
    if region.x.abs() > MAX_APERTURE {
        return Err(Error::Capacity(format!(
            "triangle aperture {} exceeds {MAX_APERTURE}",
            region.x
        )));
    }
    let mut out = Vec::new();
    scan_polygon(basis, &region.hull(), capacity, |vector, u| {
        if region.contains(u) {
            out.push(LatticePoint { vector, u });
            true
        } else {
            false
        }
    })?;
    out.sort_by(hitting_order);
    Ok(out)
}

/// `#{v primitive : v · M ∈ T · A}`.
pub fn count_in_dilate(basis: &LatticeBasis, region: &dyn Region, scale: f64) -> Result<usize> {
    if !(scale > 0.0) {
        return Err(Error::Domain(format!("dilation factor must be positive, got {scale}")));
    }
    let hull: Vec<[f64; 2]> = region.hull().iter().map(|p| [p[0] * scale, p[1] * scale]).collect();
    scan_polygon(basis, &hull, DEFAULT_CAPACITY, |_, u| {
        region.contains([u[0] / scale, u[1] / scale])
    })
}

/// Whether `Z²M` has a primitive point in `region` (stops at the first one).
pub fn meets(basis: &LatticeBasis, region: &dyn Region) -> Result<bool> {
    count_in_dilate(basis, region, 1.0).map(|n| n > 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_basics() {
        assert_eq!(gcd(0, 7), 7);
        assert_eq!(gcd(-12, 18), 6);
        assert_eq!(gcd(0, 0), 0);
        assert_eq!(gcd(i64::MIN + 1, 1), 1);
        assert!(is_primitive(1, 0).unwrap());
        assert!(!is_primitive(2, 4).unwrap());
        assert!(matches!(is_primitive(0, 0), Err(Error::ZeroVector)));
    }

    #[test]
    fn gcd_matches_euclid() {
        fn euclid(a: i64, b: i64) -> u64 {
            let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
            while b != 0 {
                (a, b) = (b, a % b);
            }
            a
        }
        for a in -60..60 {
            for b in -60..60 {
                assert_eq!(gcd(a, b), euclid(a, b), "{a} {b}");
            }
        }
    }

    #[test]
    fn primitive_density() {
        let n = 2000i64;
        let mut hits = 0u64;
        for c in 1..=n {
            for d in 1..=n {
                if gcd(c, d) == 1 {
                    hits += 1;
                }
            }
        }
        let frac = hits as f64 / (n * n) as f64;
        let target = 6.0 / std::f64::consts::PI.powi(2);
        assert!((frac - target).abs() < 0.01, "{frac}");
    }

    #[test]
    fn complete_coset_examples() {
        let g = complete_coset(PrimitiveVector::new(0, 1).unwrap());
        assert_eq!(g, IntMatrix::IDENTITY);
        for (c, d) in [(1, 1), (2, 3), (-3, 7), (5, -2), (1, 0), (-1, 0), (0, -1), (13, 21)] {
            let g = complete_coset(PrimitiveVector::new(c, d).unwrap());
            assert_eq!(g.det(), 1, "({c},{d})");
            assert_eq!((g.c, g.d), (c, d));
            if c != 0 {
                assert!(0 <= g.a && g.a < c.abs());
            }
        }
        let g = complete_coset(PrimitiveVector::new(1, 1).unwrap());
        assert_eq!(g, IntMatrix { a: 0, b: -1, c: 1, d: 1 });
    }

    #[test]
    fn reduce_identity_and_translation() {
        let r = reduce_fundamental(&GroupElement::IDENTITY).unwrap();
        assert!((r.point.x).abs() < 1e-15 && (r.point.y - 1.0).abs() < 1e-15);
        // g · i = 5 + 2i
        let g = GroupElement::new(2f64.sqrt(), 5.0 / 2f64.sqrt(), 0.0, 1.0 / 2f64.sqrt()).unwrap();
        let r = reduce_fundamental(&g).unwrap();
        assert!(r.point.x.abs() < 1e-12 && (r.point.y - 2.0).abs() < 1e-12);
        assert_eq!(r.gamma.det(), 1);
    }

    #[test]
    fn reduce_deep_point_maximises_height() {
        // g · i = 0.1 + 0.1 i
        let y: f64 = 0.1;
        let g = GroupElement::new(y.sqrt(), 0.1 / y.sqrt(), 0.0, 1.0 / y.sqrt()).unwrap();
        let r = reduce_fundamental(&g).unwrap();
        assert!(r.point.abs_sq() >= 1.0 - 1e-9 && r.point.x.abs() <= 0.5 + 1e-9);
        // exhaustive: the reduced point has the largest imaginary part in its orbit
        let z = UpperHalfPoint { x: 0.1, y: 0.1 };
        let mut best: f64 = 0.0;
        for c in -30i64..=30 {
            for d in -30i64..=30 {
                if (c, d) != (0, 0) && gcd(c, d) == 1 {
                    let (cf, df) = (c as f64, d as f64);
                    let den = (cf * z.x + df).powi(2) + (cf * z.y).powi(2);
                    best = best.max(z.y / den);
                }
            }
        }
        assert!((r.point.y - best).abs() < 1e-9, "{} vs {best}", r.point.y);
    }

    fn brute_triangle(basis: &LatticeBasis, region: &TriangleRegion) -> Vec<LatticePoint> {
        let inv = basis.matrix().inverse();
        let pre: Vec<[f64; 2]> = region.hull().iter().map(|&p| inv.row_mul(p)).collect();
        let cmin = pre.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min).floor() as i64 - 1;
        let cmax = pre.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max).ceil() as i64 + 1;
        let dmin = pre.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min).floor() as i64 - 1;
        let dmax = pre.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max).ceil() as i64 + 1;
        let mut out = Vec::new();
        for c in cmin..=cmax {
            for d in dmin..=dmax {
                if (c, d) == (0, 0) || gcd(c, d) != 1 {
                    continue;
                }
                let v = PrimitiveVector::new_unchecked(c, d);
                let u = basis.image(v);
                if region.contains(u) {
                    out.push(LatticePoint { vector: v, u });
                }
            }
        }
        out.sort_by(hitting_order);
        out
    }

    #[test]
    fn triangle_identity_examples() {
        let id = LatticeBasis::new(GroupElement::IDENTITY).unwrap();
        let pts = enumerate_in_triangle(&id, &TriangleRegion::new(1.0).unwrap()).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].vector, PrimitiveVector::new(1, 1).unwrap());
        assert_eq!(pts[0].u, [1.0, 1.0]);
        let pts = enumerate_in_triangle(&id, &TriangleRegion::new(2.5).unwrap()).unwrap();
        let vs: Vec<_> = pts.iter().map(|p| (p.vector.c, p.vector.d)).collect();
        assert_eq!(vs, vec![(1, 1), (2, 1)]);
        let pts = enumerate_in_triangle(&id, &TriangleRegion::new(-2.5).unwrap()).unwrap();
        let vs: Vec<_> = pts.iter().map(|p| (p.vector.c, p.vector.d)).collect();
        assert_eq!(vs, vec![(-1, 1), (-2, 1)]);
    }

    #[test]
    fn triangle_matches_brute_force_on_elongated_bases() {
        // deterministic family of skewed unimodular matrices
        let mut k = 0;
        for i in 0..12 {
            for j in 0..8 {
                let t = -6.0 + i as f64;
                let s = 0.37 * j as f64 - 1.1;
                let rot = GroupElement::rotation(0.41 * (i * 8 + j) as f64);
                let m = crate::sl2::geodesic_flow(&(rot * GroupElement::upper_unipotent(s)), t).unwrap();
                let basis = LatticeBasis::new(m).unwrap();
                for x in [0.7, 3.3, -5.1, 9.7] {
                    let region = TriangleRegion::new(x).unwrap();
                    let fast = enumerate_in_triangle(&basis, &region).unwrap();
                    let slow = brute_triangle(&basis, &region);
                    assert_eq!(fast, slow, "t={t} s={s} x={x}");
                    k += fast.len();
                }
            }
        }
        assert!(k > 100);
    }

    #[test]
    fn disk_count_examples() {
        let id = LatticeBasis::new(GroupElement::IDENTITY).unwrap();
        let disk = Disk { radius: 1.0 };
        assert_eq!(count_in_dilate(&id, &disk, 10.0).unwrap(), 192);
        assert_eq!(count_in_dilate(&id, &disk, 0.5).unwrap(), 0);
        assert!(count_in_dilate(&id, &disk, 0.0).is_err());
    }

    #[test]
    fn disk_count_asymptotics() {
        let id = LatticeBasis::new(GroupElement::IDENTITY).unwrap();
        let t = 2000.0;
        let n = count_in_dilate(&id, &Disk { radius: 1.0 }, t).unwrap() as f64;
        let target = 2.0 * std::f64::consts::PI * 3.0 / std::f64::consts::PI.powi(2);
        assert!((n / (t * t) / target - 1.0).abs() < 0.02, "{}", n / (t * t));
    }

    #[test]
    fn capacity_is_enforced() {
        let id = LatticeBasis::new(GroupElement::IDENTITY).unwrap();
        let r = enumerate_in_triangle_with_capacity(&id, &TriangleRegion::new(1000.0).unwrap(), 10);
        assert!(matches!(r, Err(Error::Capacity(_))));
        assert!(enumerate_in_triangle(&id, &TriangleRegion::new(2e9).unwrap()).is_err());
    }

    #[test]
    fn shortest_vector_of_diagonal() {
        let m = GroupElement::new(8.0, 0.0, 0.0, 0.125).unwrap();
        let (v, n2) = shortest_vector(&m).unwrap();
        assert_eq!(v.c.abs(), 0);
        assert_eq!(v.d.abs(), 1);
        assert!((n2 - 1.0 / 64.0).abs() < 1e-15);
    }
}
