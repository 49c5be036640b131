//! Real unimodular 2×2 matrices and the flows, actions and charts on them.
//!
//! Points of the unit tangent bundle are right cosets `Γ g`; every flow acts
//! by right multiplication and `Γ` acts on the left by Möbius transformations.
//!
//! * geodesic flow: `g · diag(e^{t/2}, e^{-t/2})`
//! * unstable horocycle flow: `g · [[1, 0], [-s, 1]]`
//! * stable horocycle flow: `g · [[1, s], [0, 1]]`

use std::f64::consts::TAU;
use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest flow time accepted before `e^{t/2}` is considered out of range.
pub const MAX_FLOW_TIME: f64 = 1400.0;

/// Absolute determinant tolerance, scaled by the size of `a·d` and `b·c`.
pub const UNIMODULAR_TOL: f64 = 1e-12;

/// Below this `|g22|` the (r, s, t) chart is treated as singular.
pub const CHART_SINGULAR_TOL: f64 = 1e-14;

/// Row-major real 2×2 matrix with determinant one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Checked constructor.
    ///
    /// The tolerance is `1e-12` for matrices of moderate size and grows with
    /// `|a·d| + |b·c|` so that products of well-conditioned matrices pass.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let g = GroupElement { a, b, c, d };
        let det = g.det();
        let scale = 1.0f64.max((a * d).abs() + (b * c).abs());
        if !det.is_finite() || (det - 1.0).abs() > UNIMODULAR_TOL * scale {
            return Err(Error::NotUnimodular { det });
        }
        Ok(g)
    }

    /// Builds a matrix without checking the determinant. Callers guarantee it.
    pub(crate) const fn new_unchecked(a: f64, b: f64, c: f64, d: f64) -> Self {
        GroupElement { a, b, c, d }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Self {
        GroupElement::new_unchecked(self.d, -self.b, -self.c, self.a)
    }

    pub fn neg(&self) -> Self {
        GroupElement::new_unchecked(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        GroupElement::new_unchecked(c, -s, s, c)
    }

    /// `diag(e^{t/2}, e^{-t/2})`.
    pub fn diagonal(t: f64) -> Result<Self> {
        check_flow_time(t)?;
        let e = (0.5 * t).exp();
        Ok(GroupElement::new_unchecked(e, 0.0, 0.0, 1.0 / e))
    }

    /// `[[1, x], [0, 1]]`.
    pub fn upper_unipotent(x: f64) -> Self {
        GroupElement::new_unchecked(1.0, x, 0.0, 1.0)
    }

    /// `[[1, 0], [x, 1]]`.
    pub fn lower_unipotent(x: f64) -> Self {
        GroupElement::new_unchecked(1.0, 0.0, x, 1.0)
    }

    /// Row vector times matrix: `(x, y) · g`.
    pub fn row_mul(&self, v: [f64; 2]) -> [f64; 2] {
        [v[0] * self.a + v[1] * self.c, v[0] * self.b + v[1] * self.d]
    }

    pub fn max_abs_diff(&self, other: &GroupElement) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
            .max((self.d - other.d).abs())
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;

    fn mul(self, rhs: GroupElement) -> GroupElement {
        GroupElement::new_unchecked(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// A point `x + iy` of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperHalfPoint {
    pub x: f64,
    pub y: f64,
}

impl UpperHalfPoint {
    pub const I: UpperHalfPoint = UpperHalfPoint { x: 0.0, y: 1.0 };

    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::Domain(format!("point {x} + {y}i is not in the upper half-plane")));
        }
        Ok(UpperHalfPoint { x, y })
    }

    pub fn abs_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// Hyperbolic distance in the curvature −1 metric `|dz| / y`.
    pub fn distance(&self, other: &UpperHalfPoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let arg = 1.0 + (dx * dx + dy * dy) / (2.0 * self.y * other.y);
        arg.acosh()
    }
}

/// Coordinates of `[[1,u],[0,1]] · diag(v^{1/2}, v^{-1/2}) · rotation(θ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IwasawaCoords {
    pub u: f64,
    pub v: f64,
    /// Stored in `[0, 2π)`.
    pub theta: f64,
}

/// Coordinates of `[[1,s],[0,1]] · diag(e^{t/2}, e^{-t/2}) · [[1,0],[r,1]]`.
///
/// `r` is the time until the unstable horocycle reaches the section point
/// `(s, t)`; `r = 0` means the element lies on the section.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AszCoords {
    pub r: f64,
    pub s: f64,
    pub t: f64,
}

fn check_flow_time(t: f64) -> Result<()> {
    if !t.is_finite() || t.abs() > MAX_FLOW_TIME {
        return Err(Error::Range(format!(
            "flow time {t} exceeds ±{MAX_FLOW_TIME}"
        )));
    }
    Ok(())
}

/// `g · diag(e^{t/2}, e^{-t/2})`.
pub fn geodesic_flow(g: &GroupElement, t: f64) -> Result<GroupElement> {
    check_flow_time(t)?;
    let e = (0.5 * t).exp();
    let ei = 1.0 / e;
    Ok(GroupElement::new_unchecked(g.a * e, g.b * ei, g.c * e, g.d * ei))
}

/// Unstable horocycle flow `g · [[1, 0], [-s, 1]]`.
pub fn horocycle_plus(g: &GroupElement, s: f64) -> GroupElement {
    GroupElement::new_unchecked(g.a - s * g.b, g.b, g.c - s * g.d, g.d)
}

/// Stable horocycle flow `g · [[1, s], [0, 1]]`.
pub fn horocycle_minus(g: &GroupElement, s: f64) -> GroupElement {
    GroupElement::new_unchecked(g.a, g.b + s * g.a, g.c, g.d + s * g.c)
}

/// `(a z + b) / (c z + d)`.
pub fn mobius_apply(g: &GroupElement, z: &UpperHalfPoint) -> UpperHalfPoint {
    // cz + d = (c x + d) + i c y
    let re = g.c * z.x + g.d;
    let im = g.c * z.y;
    let den = re * re + im * im;
    // (az + b) * conj(cz + d)
    let nre = g.a * z.x + g.b;
    let nim = g.a * z.y;
    UpperHalfPoint {
        x: (nre * re + nim * im) / den,
        // Im((az+b)/(cz+d)) = y / |cz+d|^2 for det 1
        y: z.y / den,
    }
}

pub fn asz_encode(c: &AszCoords) -> Result<GroupElement> {
    check_flow_time(c.t)?;
    let ep = (0.5 * c.t).exp();
    let em = 1.0 / ep;
    Ok(GroupElement::new_unchecked(
        ep + c.s * c.r * em,
        c.s * em,
        c.r * em,
        em,
    ))
}

/// Inverse of [`asz_encode`], identifying `g` with `-g`.
pub fn asz_decode(g: &GroupElement) -> Result<AszCoords> {
    if !(g.d.abs() >= CHART_SINGULAR_TOL) {
        return Err(Error::SingularChart(g.d.abs()));
    }
    let g = if g.d < 0.0 { g.neg() } else { *g };
    Ok(AszCoords {
        r: g.c / g.d,
        s: g.b / g.d,
        t: -2.0 * g.d.ln(),
    })
}

pub fn iwasawa_decompose(g: &GroupElement) -> IwasawaCoords {
    let z = mobius_apply(g, &UpperHalfPoint::I);
    // rotation = diag(v^{-1/2}, v^{1/2}) · n(-u) · g; its first column is (cos θ, sin θ)
    let sv = z.y.sqrt();
    let k11 = (g.a - z.x * g.c) / sv;
    let k21 = g.c * sv;
    let mut theta = k21.atan2(k11);
    if theta < 0.0 {
        theta += TAU;
    }
    if theta >= TAU {
        theta -= TAU;
    }
    IwasawaCoords {
        u: z.x,
        v: z.y,
        theta,
    }
}

pub fn iwasawa_encode(c: &IwasawaCoords) -> GroupElement {
    let sv = c.v.sqrt();
    let (s, co) = c.theta.sin_cos();
    // n(u) · diag(√v, 1/√v) = [[√v, u/√v], [0, 1/√v]]
    let p = GroupElement::new_unchecked(sv, c.u / sv, 0.0, 1.0 / sv);
    p * GroupElement::new_unchecked(co, -s, s, co)
}
