use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flagged::Flagged;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Landmark {
    pub name: String,
    pub point: [f64; 2],
}

/// Annotated ear: box, closed boundary contour and named landmarks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EarRegion {
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    pub contour: Vec<[f64; 2]>,
    #[serde(default)]
    pub landmarks: Vec<Landmark>,
}

impl EarRegion {
    pub fn validate(&self, width: usize, height: usize) -> Result<()> {
        let b = &self.bbox;
        if !(b.w > 0.0 && b.h > 0.0) {
            return Err(Error::domain("ear box must have positive width and height"));
        }
        if b.x < 0.0 || b.y < 0.0 || b.x + b.w > width as f64 || b.y + b.h > height as f64 {
            return Err(Error::domain(format!(
                "ear box ({}, {}, {}, {}) outside {width}x{height} frame",
                b.x, b.y, b.w, b.h
            )));
        }
        if self.contour.len() < 5 {
            return Err(Error::domain("ear contour needs at least 5 points"));
        }
        Ok(())
    }

    /// Apply `p -> m * p + t` to every geometric element. The box becomes
    /// the axis-aligned hull of its transformed corners.
    pub fn transformed(&self, m: [[f64; 2]; 2], t: [f64; 2]) -> EarRegion {
        let f = |p: [f64; 2]| {
            [m[0][0] * p[0] + m[0][1] * p[1] + t[0], m[1][0] * p[0] + m[1][1] * p[1] + t[1]]
        };
        let b = &self.bbox;
        let corners = [[b.x, b.y], [b.x + b.w, b.y], [b.x, b.y + b.h], [b.x + b.w, b.y + b.h]].map(f);
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for c in corners {
            x0 = x0.min(c[0]);
            y0 = y0.min(c[1]);
            x1 = x1.max(c[0]);
            y1 = y1.max(c[1]);
        }
        EarRegion {
            bbox: BoundingBox { x: x0, y: y0, w: x1 - x0, h: y1 - y0 },
            contour: self.contour.iter().map(|&p| f(p)).collect(),
            landmarks: self
                .landmarks
                .iter()
                .map(|l| Landmark { name: l.name.clone(), point: f(l.point) })
                .collect(),
        }
    }

    /// Clip the box to the frame so a transformed region stays valid.
    pub fn clip_box(&mut self, width: usize, height: usize) {
        let b = &mut self.bbox;
        let x0 = b.x.clamp(0.0, width as f64 - 1.0);
        let y0 = b.y.clamp(0.0, height as f64 - 1.0);
        let x1 = (b.x + b.w).clamp(x0 + 1.0, width as f64);
        let y1 = (b.y + b.h).clamp(y0 + 1.0, height as f64);
        *b = BoundingBox { x: x0, y: y0, w: x1 - x0, h: y1 - y0 };
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// `[height, width, h/w, pairwise landmark distances...]`.
pub fn ear_size_features(region: &EarRegion) -> Result<Vec<f64>> {
    let b = &region.bbox;
    if !(b.w > 0.0) {
        return Err(Error::domain("ear box width must be positive"));
    }
    let mut out = vec![b.h, b.w, b.h / b.w];
    let lm = &region.landmarks;
    for i in 0..lm.len() {
        for j in i + 1..lm.len() {
            out.push(dist(lm[i].point, lm[j].point));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ellipse {
    pub center: [f64; 2],
    /// `(a, b)` with `a >= b > 0`.
    pub semi_axes: [f64; 2],
    /// Angle of the major axis, in `(-pi/2, pi/2]`.
    pub orientation: f64,
}

fn wrap_half_turn(mut t: f64) -> f64 {
    use std::f64::consts::PI;
    while t <= -PI / 2.0 {
        t += PI;
    }
    while t > PI / 2.0 {
        t -= PI;
    }
    t
}

/// Null vector of a (near-)singular 3x3 matrix: the best-conditioned cross
/// product of two of its rows.
fn null_vector(m: &Matrix3<f64>) -> Vector3<f64> {
    let rows = [m.row(0).transpose(), m.row(1).transpose(), m.row(2).transpose()];
    let mut best = Vector3::zeros();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let c = rows[i].cross(&rows[j]);
        if c.norm() > best.norm() {
            best = c;
        }
    }
    best
}

/// Real roots of `x^3 + a x^2 + b x + c`.
fn cubic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let q = (a * a - 3.0 * b) / 9.0;
    let r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
    if r * r < q * q * q {
        let theta = (r / q.powf(1.5)).clamp(-1.0, 1.0).acos();
        let s = -2.0 * q.sqrt();
        (0..3)
            .map(|k| s * ((theta + 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos() - a / 3.0)
            .collect()
    } else {
        let big_a = -r.signum() * (r.abs() + (r * r - q * q * q).sqrt()).cbrt();
        let big_b = if big_a != 0.0 { q / big_a } else { 0.0 };
        vec![big_a + big_b - a / 3.0]
    }
}

/// Direct least-squares ellipse fit (Fitzgibbon's constraint, Halir-Flusser
/// partitioning) on centred and scaled points.
pub fn fit_ellipse(points: &[[f64; 2]]) -> Result<Ellipse> {
    let n = points.len();
    if n < 5 {
        return Err(Error::Fit(format!("ellipse fit needs at least 5 points, got {n}")));
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Fit("ellipse fit points must be finite".into()));
    }
    let mx = points.iter().map(|p| p[0]).sum::<f64>() / n as f64;
    let my = points.iter().map(|p| p[1]).sum::<f64>() / n as f64;
    let spread = points.iter().map(|p| dist(*p, [mx, my])).sum::<f64>() / n as f64;
    if !(spread > 0.0) {
        return Err(Error::Fit("ellipse fit points are coincident".into()));
    }
    let s = 1.0 / spread;
    let mut s1 = Matrix3::<f64>::zeros();
    let mut s2 = Matrix3::<f64>::zeros();
    let mut s3 = Matrix3::<f64>::zeros();
    for p in points {
        let (x, y) = ((p[0] - mx) * s, (p[1] - my) * s);
        let d1 = Vector3::new(x * x, x * y, y * y);
        let d2 = Vector3::new(x, y, 1.0);
        s1 += d1 * d1.transpose();
        s2 += d1 * d2.transpose();
        s3 += d2 * d2.transpose();
    }
    let s3_inv = s3
        .try_inverse()
        .ok_or_else(|| Error::Fit("ellipse fit points are collinear".into()))?;
    let t = -s3_inv * s2.transpose();
    let m = s1 + s2 * t;
    // premultiply by the inverse of the constraint block [[0,0,2],[0,-1,0],[2,0,0]]
    let mp = Matrix3::from_rows(&[
        m.row(2) / 2.0,
        -m.row(1),
        m.row(0) / 2.0,
    ]);
    // characteristic polynomial det(mp - l I) = -(l^3 + a l^2 + b l + c)
    let tr = mp.trace();
    let minors = mp[(0, 0)] * mp[(1, 1)] - mp[(0, 1)] * mp[(1, 0)]
        + mp[(0, 0)] * mp[(2, 2)] - mp[(0, 2)] * mp[(2, 0)]
        + mp[(1, 1)] * mp[(2, 2)] - mp[(1, 2)] * mp[(2, 1)];
    let roots = cubic_roots(-tr, minors, -mp.determinant());
    let mut best: Option<(f64, Vector3<f64>)> = None;
    for l in roots {
        let v = null_vector(&(mp - Matrix3::identity() * l));
        let norm = v.norm();
        if !(norm > 0.0) {
            continue;
        }
        let v = v / norm;
        let cond = 4.0 * v[0] * v[2] - v[1] * v[1];
        if cond > 0.0 && best.map_or(true, |(c, _)| cond > c) {
            best = Some((cond, v));
        }
    }
    let (_, mut a1) = best.ok_or_else(|| Error::Fit("no ellipse-constrained solution".into()))?;
    if a1[0] + a1[2] < 0.0 {
        a1 = -a1;
    }
    let a2 = t * a1;
    let (a, b, c, d, e, f) = (a1[0], a1[1], a1[2], a2[0], a2[1], a2[2]);

    let det = 4.0 * a * c - b * b;
    let cx = (b * e - 2.0 * c * d) / det;
    let cy = (b * d - 2.0 * a * e) / det;
    let fc = a * cx * cx + b * cx * cy + c * cy * cy + d * cx + e * cy + f;
    let half_diff = ((a - c) * (a - c) + b * b).sqrt();
    let l1 = (a + c - half_diff) / 2.0;
    let l2 = (a + c + half_diff) / 2.0;
    let (ra, rb) = ((-fc / l1).sqrt(), (-fc / l2).sqrt());
    if !(ra.is_finite() && rb.is_finite() && rb > 0.0) {
        return Err(Error::Fit("fitted conic is not a real ellipse".into()));
    }
    // major axis follows the eigenvector of the smaller eigenvalue l1
    let orientation = if half_diff <= 1e-12 * (a.abs() + c.abs()) {
        0.0
    } else {
        wrap_half_turn(0.5 * b.atan2(a - c) + std::f64::consts::FRAC_PI_2)
    };
    Ok(Ellipse {
        center: [cx / s + mx, cy / s + my],
        semi_axes: [ra / s, rb / s],
        orientation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSummary {
    pub mean: f64,
    pub max: f64,
    pub variance: f64,
    /// Points skipped because two of their three stencil points coincide.
    pub skipped: usize,
}

impl CurvatureSummary {
    pub fn to_vec(&self) -> Vec<f64> {
        vec![self.mean, self.max, self.variance]
    }
}

/// Menger curvature `4 * area / (|ab| |bc| |ca|)` of the stencil
/// `(i-k, i, i+k)` around a closed contour, summarised as mean, max and
/// population variance of the absolute values.
pub fn curvature_features(contour: &[[f64; 2]], k: usize) -> Result<Flagged<CurvatureSummary>> {
    let n = contour.len();
    if k == 0 {
        return Err(Error::domain("curvature neighbourhood must be at least 1"));
    }
    if n < 2 * k + 1 {
        return Err(Error::domain(format!(
            "contour of {n} points too short for neighbourhood {k}"
        )));
    }
    let mut ks = Vec::with_capacity(n);
    for i in 0..n {
        let a = contour[(i + n - k) % n];
        let b = contour[i];
        let c = contour[(i + k) % n];
        let (ab, bc, ca) = (dist(a, b), dist(b, c), dist(c, a));
        if ab == 0.0 || bc == 0.0 || ca == 0.0 {
            continue;
        }
        let cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        ks.push(2.0 * cross.abs() / (ab * bc * ca));
    }
    let skipped = n - ks.len();
    if ks.is_empty() {
        let zero = CurvatureSummary { mean: 0.0, max: 0.0, variance: 0.0, skipped };
        return Ok(Flagged::new(zero, true));
    }
    let m = ks.len() as f64;
    let mean = ks.iter().sum::<f64>() / m;
    let max = ks.iter().copied().fold(0.0, f64::max);
    let variance = ks.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m;
    Ok(Flagged::new(CurvatureSummary { mean, max, variance, skipped }, skipped > 0))
}

/// Names of the geometry columns produced by [`ear_attributes`] for a region
/// with `landmarks` landmarks.
pub const EAR_ATTRIBUTE_NAMES: [&str; 9] = [
    "height",
    "width",
    "aspect",
    "ellipse_a",
    "ellipse_b",
    "ellipse_cos2t",
    "curv_mean",
    "curv_max",
    "curv_var",
];

/// Size, ellipse and curvature attributes followed by landmark distances.
/// Orientation enters as `cos(2 theta)` so the half-turn ambiguity does not
/// produce a discontinuous feature.
pub fn ear_attributes(region: &EarRegion, curvature_k: usize) -> Result<Vec<f64>> {
    let size = ear_size_features(region)?;
    let e = fit_ellipse(&region.contour)?;
    let curv = curvature_features(&region.contour, curvature_k)?.value;
    let mut out = size[..3].to_vec();
    out.extend([e.semi_axes[0], e.semi_axes[1], (2.0 * e.orientation).cos()]);
    out.extend(curv.to_vec());
    out.extend_from_slice(&size[3..]);
    Ok(out)
}
