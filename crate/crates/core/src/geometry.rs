//! Points, contours and patch regions on the periodic strip
//! `[-1/2, 1/2) x R` with the vertical edges identified.
//!
//! Contours are stored in lifted coordinates: node `j` sits at parameter
//! `α_j = 2πj/N`, and the curve closes up to a horizontal shift,
//! `γ(α + 2π) = γ(α) + (winding, 0)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vec2;
use crate::spectral;

/// Maps `t` into `[-1/2, 1/2)`; ties at `k + 1/2` go to `-1/2`.
pub fn wrap_x1(t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::invalid(format!("cannot wrap non-finite coordinate {t}")));
    }
    Ok(wrap_unchecked(t))
}

#[inline]
pub(crate) fn wrap_unchecked(t: f64) -> f64 {
    let w = t - (t + 0.5).floor();
    // guard the rounding corner where t + 0.5 rounds up to an integer
    if w >= 0.5 {
        w - 1.0
    } else {
        w
    }
}

/// A point of the strip, always stored with `x1` in the fundamental domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripPoint {
    x1: f64,
    x2: f64,
}

impl StripPoint {
    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        if !x2.is_finite() {
            return Err(Error::invalid(format!("non-finite vertical coordinate {x2}")));
        }
        Ok(StripPoint { x1: wrap_x1(x1)?, x2 })
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn x2(&self) -> f64 {
        self.x2
    }

    pub fn to_vec(self) -> Vec2 {
        Vec2::new(self.x1, self.x2)
    }
}

impl TryFrom<Vec2> for StripPoint {
    type Error = Error;

    fn try_from(v: Vec2) -> Result<Self> {
        StripPoint::new(v.x, v.y)
    }
}

pub fn strip_distance(p: StripPoint, q: StripPoint) -> f64 {
    lifted_distance(p.to_vec(), q.to_vec())
}

/// Distance on the strip between two lifted points.
#[inline]
pub(crate) fn lifted_distance(a: Vec2, b: Vec2) -> f64 {
    wrap_unchecked(a.x - b.x).hypot(a.y - b.y)
}

/// Closed curve on the strip in lifted coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    nodes: Vec<Vec2>,
    winding: i32,
}

/// Checks a node list with its declared closure offset and builds a contour.
///
/// The winding is the rounded horizontal part of `closure_offset`; the
/// offset must be a horizontal integer shift.
pub fn validate_contour(nodes: Vec<Vec2>, closure_offset: Vec2) -> Result<Contour> {
    let n = nodes.len();
    if n < 8 || n % 2 != 0 {
        return Err(Error::InvalidDiscretization { nodes: n });
    }
    if !closure_offset.is_finite() {
        return Err(Error::invalid("closure offset must be finite"));
    }
    let rounded = closure_offset.x.round();
    if (closure_offset.x - rounded).abs() > 1e-9 || closure_offset.y.abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "closure offset ({}, {}) is not a horizontal lattice shift",
            closure_offset.x, closure_offset.y
        )));
    }
    if rounded.abs() > 1.0 {
        return Err(Error::UnsupportedWinding(rounded as i64));
    }
    if let Some(j) = nodes.iter().position(|p| !p.is_finite()) {
        return Err(Error::invalid(format!("node {j} is not finite")));
    }
    let contour = Contour { nodes, winding: rounded as i32 };
    contour.check_spacing()?;
    Ok(contour)
}

impl Contour {
    /// Convenience wrapper around [`validate_contour`] taking the winding
    /// directly.
    pub fn new(nodes: Vec<Vec2>, winding: i32) -> Result<Self> {
        validate_contour(nodes, Vec2::new(winding as f64, 0.0))
    }

    /// Same nodes and winding, skipping validation. Used for intermediate
    /// Runge-Kutta stages where the shape is already known to be sane.
    pub(crate) fn from_parts(nodes: Vec<Vec2>, winding: i32) -> Self {
        Contour { nodes, winding }
    }

    fn check_spacing(&self) -> Result<()> {
        let n = self.nodes.len();
        for j in 0..n {
            let d = (self.node_ext(j as isize + 1) - self.nodes[j]).norm();
            if d.is_nan() || d <= 0.0 {
                return Err(Error::DegenerateContour { index: j, next: (j + 1) % n });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    pub fn into_nodes(self) -> Vec<Vec2> {
        self.nodes
    }

    pub fn winding(&self) -> i32 {
        self.winding
    }

    pub fn closure_offset(&self) -> Vec2 {
        Vec2::new(self.winding as f64, 0.0)
    }

    /// Node at any integer index, continued through the closure offset.
    #[inline]
    pub fn node_ext(&self, j: isize) -> Vec2 {
        let n = self.nodes.len() as isize;
        let wraps = j.div_euclid(n);
        let base = self.nodes[j.rem_euclid(n) as usize];
        Vec2::new(base.x + (wraps * self.winding as isize) as f64, base.y)
    }

    /// Parameter spacing `2π/N`.
    pub fn step(&self) -> f64 {
        2.0 * PI / self.nodes.len() as f64
    }

    /// Lifted segments `(γ_j, γ_{j+1})`, including the closing one.
    pub fn segments(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        (0..self.nodes.len()).map(move |j| (self.nodes[j], self.node_ext(j as isize + 1)))
    }

    /// Horizontal and vertical samples of the 2π-periodic part
    /// `γ(α) - (w α / 2π, 0)`.
    pub(crate) fn periodic_part(&self) -> (Vec<f64>, Vec<f64>) {
        let slope = self.winding as f64 / (2.0 * PI);
        spectral::nodes(self.len())
            .zip(&self.nodes)
            .map(|(a, p)| (p.x - slope * a, p.y))
            .unzip()
    }

    /// Spectral derivative `∂_α γ` at the nodes.
    pub fn tangents(&self) -> Vec<Vec2> {
        let (px, py) = self.periodic_part();
        let dx = spectral::derivative(&px);
        let dy = spectral::derivative(&py);
        let slope = self.winding as f64 / (2.0 * PI);
        dx.into_iter().zip(dy).map(|(a, b)| Vec2::new(a + slope, b)).collect()
    }

    /// Length of the longer of the two segments adjacent to node `j`.
    pub fn local_spacing(&self, j: usize) -> f64 {
        let p = self.nodes[j];
        let j = j as isize;
        (self.node_ext(j + 1) - p).norm().max((p - self.node_ext(j - 1)).norm())
    }

    pub fn translated(&self, shift: Vec2) -> Contour {
        Contour {
            nodes: self.nodes.iter().map(|&p| p + shift).collect(),
            winding: self.winding,
        }
    }

    fn x2_extent(&self) -> f64 {
        self.nodes.iter().fold(0.0_f64, |m, p| m.max(p.y.abs()))
    }
}

/// The vortical region `Ω` with vorticity `omega0` inside, bounded by an
/// ordered list of contours each keeping `Ω` on its left.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchSystem {
    contours: Vec<Contour>,
    omega0: f64,
}

impl PatchSystem {
    pub fn new(contours: Vec<Contour>, omega0: f64) -> Result<Self> {
        if !omega0.is_finite() {
            return Err(Error::InvalidSystem("vorticity strength must be finite".into()));
        }
        let total: i32 = contours.iter().map(Contour::winding).sum();
        if total != 0 {
            return Err(Error::InvalidSystem(format!(
                "windings sum to {total}; the vortical region must be vertically bounded"
            )));
        }
        let system = PatchSystem { contours, omega0 };
        if let Some((a, b, d)) = system.closest_contour_pair() {
            if d <= 0.0 {
                return Err(Error::InvalidSystem(format!("contours {a} and {b} touch")));
            }
        }
        if !system.contours.is_empty() {
            let area = signed_area(&system);
            if area <= 0.0 {
                return Err(Error::InvalidSystem(format!(
                    "enclosed area {area} is not positive; contours must keep the region on their left"
                )));
            }
        }
        Ok(system)
    }

    pub fn empty(omega0: f64) -> Self {
        PatchSystem { contours: Vec::new(), omega0 }
    }

    pub(crate) fn from_parts(contours: Vec<Contour>, omega0: f64) -> Self {
        PatchSystem { contours, omega0 }
    }

    pub fn contours(&self) -> &[Contour] {
        &self.contours
    }

    pub fn into_contours(self) -> Vec<Contour> {
        self.contours
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn with_omega0(&self, omega0: f64) -> Self {
        PatchSystem { contours: self.contours.clone(), omega0 }
    }

    pub fn translated(&self, shift: Vec2) -> Self {
        PatchSystem {
            contours: self.contours.iter().map(|c| c.translated(shift)).collect(),
            omega0: self.omega0,
        }
    }

    pub fn total_nodes(&self) -> usize {
        self.contours.iter().map(Contour::len).sum()
    }

    /// Largest `|x2|` over all nodes.
    pub fn x2_extent(&self) -> f64 {
        self.contours.iter().fold(0.0_f64, |m, c| m.max(c.x2_extent()))
    }

    /// `(min x2, max x2)` over all nodes, or `None` for an empty system.
    pub fn x2_range(&self) -> Option<(f64, f64)> {
        let mut it = self.contours.iter().flat_map(|c| c.nodes.iter().map(|p| p.y));
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), y| (lo.min(y), hi.max(y))))
    }

    /// Closest pair of distinct contours by node-to-node strip distance.
    pub fn closest_contour_pair(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for (a, ca) in self.contours.iter().enumerate() {
            for (b, cb) in self.contours.iter().enumerate().skip(a + 1) {
                let d = ca
                    .nodes
                    .iter()
                    .flat_map(|p| cb.nodes.iter().map(move |q| lifted_distance(*p, *q)))
                    .fold(f64::INFINITY, f64::min);
                if best.is_none_or(|(_, _, m)| d < m) {
                    best = Some((a, b, d));
                }
            }
        }
        best
    }

    /// Boundary tolerance for membership queries.
    pub fn boundary_tolerance(&self) -> f64 {
        1e-12 * (1.0 + self.x2_extent())
    }
}

/// Distance on the strip from `p` to the segment `a -> b` (lifted).
fn segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let mid = 0.5 * (a.x + b.x);
    let shift = (mid - p.x).round();
    let mut best = f64::INFINITY;
    for k in [-1.0, 0.0, 1.0] {
        let q = Vec2::new(p.x + shift + k, p.y);
        let ab = b - a;
        let len2 = ab.norm_sq();
        let t = if len2 > 0.0 { ((q - a).dot(ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
        best = best.min((q - (a + ab * t)).norm());
    }
    best
}

/// Minimum strip distance from `p` to the polyline of any contour.
pub fn boundary_distance(system: &PatchSystem, p: Vec2) -> f64 {
    system
        .contours
        .iter()
        .flat_map(|c| c.segments())
        .map(|(a, b)| segment_distance(p, a, b))
        .fold(f64::INFINITY, f64::min)
}

/// Heights at which the vertical line `x1 = x (mod 1)` crosses the contour
/// polylines, sorted ascending. Segment extents use the half-open rule so a
/// shared vertex is counted once.
pub fn column_crossings(system: &PatchSystem, x: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for c in &system.contours {
        for (a, b) in c.segments() {
            if a.x == b.x {
                continue;
            }
            let (lo, hi) = if a.x < b.x { (a.x, b.x) } else { (b.x, a.x) };
            let mut q = x + (lo - x).ceil();
            while q < hi {
                let t = (q - a.x) / (b.x - a.x);
                out.push(a.y + t * (b.y - a.y));
                q += 1.0;
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Whether `p` lies in the patch region, by parity of crossings of the upward
/// vertical ray through `p`.
pub fn point_in_region(system: &PatchSystem, p: StripPoint) -> Result<bool> {
    let v = p.to_vec();
    if boundary_distance(system, v) <= system.boundary_tolerance() {
        return Err(Error::AmbiguousMembership { x1: p.x1, x2: p.x2 });
    }
    let above = column_crossings(system, v.x).iter().filter(|&&y| y > v.y).count();
    Ok(above % 2 == 1)
}

/// `-Σ ∮ f(x2) dx1` with the periodic trapezoid rule and spectral `dx1/dα`.
fn boundary_integral(system: &PatchSystem, f: impl Fn(f64) -> f64) -> f64 {
    system
        .contours
        .iter()
        .map(|c| {
            let h = c.step();
            let sum: f64 = c.nodes.iter().zip(c.tangents()).map(|(p, t)| f(p.y) * t.x).sum();
            -h * sum
        })
        .sum()
}

/// Area of the patch region per period.
pub fn signed_area(system: &PatchSystem) -> f64 {
    boundary_integral(system, |y| y)
}

/// `∬_Ω x2 dA`.
pub fn vertical_moment(system: &PatchSystem) -> f64 {
    boundary_integral(system, |y| 0.5 * y * y)
}

/// Discrete `|γ|_*`: the minimum over node pairs of chord length divided by
/// periodic parameter distance.
pub fn gamma_star(contour: &Contour) -> f64 {
    let n = contour.len();
    let h = contour.step();
    let w = contour.winding as f64;
    let mut best = f64::INFINITY;
    for j in 0..n {
        let pj = contour.nodes[j];
        for k in (j + 1)..n {
            // α_j - α_k + 2πm with |.| <= π
            let (gap, m) = if k - j <= n / 2 { (k - j, 0.0) } else { (n - (k - j), 1.0) };
            let d = pj - contour.nodes[k] - Vec2::new(w * m, 0.0);
            best = best.min(d.norm() / (gap as f64 * h));
        }
    }
    best
}

/// One translated copy of a contour in the plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicatedContour {
    pub source: usize,
    pub shift: i64,
    pub winding: i32,
    pub nodes: Vec<Vec2>,
}

/// Horizontal copies of every contour, shifted by `n = -⌊copies/2⌋ ..` so
/// that exactly `copies` shifts are produced per contour.
pub fn replicate(system: &PatchSystem, copies: usize) -> Result<Vec<ReplicatedContour>> {
    if copies == 0 {
        return Err(Error::invalid("copies must be at least 1"));
    }
    let first = -((copies / 2) as i64);
    let mut out = Vec::with_capacity(copies * system.contours.len());
    for shift in first..first + copies as i64 {
        for (source, c) in system.contours.iter().enumerate() {
            out.push(ReplicatedContour {
                source,
                shift,
                winding: c.winding,
                nodes: c.nodes.iter().map(|p| Vec2::new(p.x + shift as f64, p.y)).collect(),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn circle(n: usize, center: Vec2, r: f64) -> Contour {
        let nodes = spectral::nodes(n).map(|a| center + Vec2::new(a.cos(), a.sin()) * r).collect();
        Contour::new(nodes, 0).unwrap()
    }

    fn layer(n: usize, h: f64) -> PatchSystem {
        let bottom = spectral::nodes(n).map(|a| Vec2::new(a / (2.0 * PI) - 0.5, -h)).collect();
        let top = spectral::nodes(n).map(|a| Vec2::new(0.5 - a / (2.0 * PI), h)).collect();
        PatchSystem::new(vec![Contour::new(bottom, 1).unwrap(), Contour::new(top, -1).unwrap()], 1.0)
            .unwrap()
    }

    #[test]
    fn wrap_examples() {
        assert_eq!(wrap_x1(0.0).unwrap(), 0.0);
        assert_eq!(wrap_x1(0.75).unwrap(), -0.25);
        assert_eq!(wrap_x1(-0.5).unwrap(), -0.5);
        assert_eq!(wrap_x1(0.5).unwrap(), -0.5);
        assert!(matches!(wrap_x1(f64::NAN), Err(Error::InvalidArgument(_))));
        assert!(wrap_x1(f64::INFINITY).is_err());
    }

    #[test]
    fn wrap_stays_in_domain_near_half() {
        let t = 0.5 - f64::EPSILON / 4.0;
        let w = wrap_x1(t).unwrap();
        assert!((-0.5..0.5).contains(&w), "{w}");
        let w = wrap_x1(-0.5 - 1e-17).unwrap();
        assert!((-0.5..0.5).contains(&w), "{w}");
    }

    #[test]
    fn strip_distance_examples() {
        let p = |a, b| StripPoint::new(a, b).unwrap();
        assert_eq!(strip_distance(p(0.0, 0.0), p(0.0, 0.0)), 0.0);
        assert!((strip_distance(p(-0.45, 0.0), p(0.45, 0.0)) - 0.1).abs() < 1e-15);
        assert_eq!(strip_distance(p(0.0, 1.0), p(0.0, -1.0)), 2.0);
    }

    #[test]
    fn validate_contour_examples() {
        let c = circle(64, Vec2::ZERO, 0.2);
        assert_eq!(c.winding(), 0);

        let line: Vec<Vec2> = (0..32).map(|j| Vec2::new(j as f64 / 32.0 - 0.5, 0.25)).collect();
        assert_eq!(validate_contour(line.clone(), Vec2::new(1.0, 0.0)).unwrap().winding(), 1);

        let twice: Vec<Vec2> = (0..32).map(|j| Vec2::new(j as f64 / 16.0 - 0.5, 0.25)).collect();
        assert_eq!(validate_contour(twice, Vec2::new(2.0, 0.0)), Err(Error::UnsupportedWinding(2)));

        assert_eq!(
            validate_contour(line[..7].to_vec(), Vec2::ZERO),
            Err(Error::InvalidDiscretization { nodes: 7 })
        );
        assert_eq!(
            validate_contour(line[..9].to_vec(), Vec2::ZERO),
            Err(Error::InvalidDiscretization { nodes: 9 })
        );

        let mut dup = circle(16, Vec2::ZERO, 0.2).into_nodes();
        dup[4] = dup[3];
        assert_eq!(validate_contour(dup, Vec2::ZERO), Err(Error::DegenerateContour { index: 3, next: 4 }));
    }

    #[test]
    fn closing_segment_is_checked() {
        // last node equals first node shifted by the closure offset
        let mut line: Vec<Vec2> = (0..16).map(|j| Vec2::new(j as f64 / 15.0 - 0.5, 0.0)).collect();
        line[15] = Vec2::new(0.5, 0.0);
        assert_eq!(
            validate_contour(line, Vec2::new(1.0, 0.0)),
            Err(Error::DegenerateContour { index: 15, next: 0 })
        );
    }

    #[test]
    fn membership_examples() {
        let sys = layer(64, 0.25);
        assert!(point_in_region(&sys, StripPoint::new(0.0, 0.0).unwrap()).unwrap());
        assert!(!point_in_region(&sys, StripPoint::new(0.0, 0.5).unwrap()).unwrap());
        assert!(!point_in_region(&sys, StripPoint::new(0.0, -0.5).unwrap()).unwrap());
        assert!(matches!(
            point_in_region(&sys, StripPoint::new(0.1, 0.25).unwrap()),
            Err(Error::AmbiguousMembership { .. })
        ));

        let disk = PatchSystem::new(vec![circle(64, Vec2::ZERO, 0.2)], 1.0).unwrap();
        assert!(!point_in_region(&disk, StripPoint::new(0.3, 0.0).unwrap()).unwrap());
        assert!(point_in_region(&disk, StripPoint::new(0.1, 0.05).unwrap()).unwrap());
    }

    #[test]
    fn membership_across_the_seam() {
        let disk = PatchSystem::new(vec![circle(64, Vec2::new(0.45, 0.0), 0.2)], 1.0).unwrap();
        // (-0.45, 0) is 0.1 from the center through the identified edge
        assert!(point_in_region(&disk, StripPoint::new(-0.45, 0.0).unwrap()).unwrap());
        assert!(!point_in_region(&disk, StripPoint::new(0.0, 0.0).unwrap()).unwrap());
    }

    #[test]
    fn area_and_moment_examples() {
        let disk = PatchSystem::new(vec![circle(64, Vec2::ZERO, 0.2)], 1.0).unwrap();
        assert!((signed_area(&disk) - PI * 0.04).abs() < 1e-14);
        assert!(vertical_moment(&disk).abs() < 1e-15);

        let raised = PatchSystem::new(vec![circle(64, Vec2::new(0.0, 0.3), 0.2)], 1.0).unwrap();
        assert!((vertical_moment(&raised) - 0.3 * PI * 0.04).abs() < 1e-14);

        let sys = layer(16, 0.25);
        assert!((signed_area(&sys) - 0.5).abs() < 1e-14);
        assert!(vertical_moment(&sys).abs() < 1e-15);

        assert_eq!(signed_area(&PatchSystem::empty(1.0)), 0.0);
    }

    #[test]
    fn clockwise_region_is_rejected() {
        let cw: Vec<Vec2> = circle(16, Vec2::ZERO, 0.2).into_nodes().into_iter().rev().collect();
        let c = Contour::new(cw, 0).unwrap();
        assert!(matches!(PatchSystem::new(vec![c], 1.0), Err(Error::InvalidSystem(_))));
    }

    #[test]
    fn nonzero_total_winding_is_rejected() {
        let line: Vec<Vec2> = (0..16).map(|j| Vec2::new(j as f64 / 16.0 - 0.5, 0.0)).collect();
        let c = Contour::new(line, 1).unwrap();
        assert!(matches!(PatchSystem::new(vec![c], 1.0), Err(Error::InvalidSystem(_))));
    }

    #[test]
    fn gamma_star_examples() {
        for n in [16, 64] {
            let c = circle(n, Vec2::ZERO, 0.2);
            assert!((gamma_star(&c) - 0.4 / PI).abs() < 1e-14, "{n}");
        }
        let sys = layer(32, 0.25);
        for c in sys.contours() {
            assert!((gamma_star(c) - 1.0 / (2.0 * PI)).abs() < 1e-14);
        }
    }

    #[test]
    fn gamma_star_detects_near_contact() {
        // pinched ellipse: two far-apart parameter values come very close
        let nodes: Vec<Vec2> = spectral::nodes(64)
            .map(|a| Vec2::new(0.3 * a.cos(), 0.2 * a.sin() * (0.001 + a.cos().powi(2))))
            .collect();
        let c = Contour::new(nodes, 0).unwrap();
        assert!(gamma_star(&c) < 1e-2);
    }

    #[test]
    fn replicate_examples() {
        let disk = PatchSystem::new(vec![circle(16, Vec2::ZERO, 0.2)], 1.0).unwrap();
        let copies = replicate(&disk, 3).unwrap();
        let shifts: Vec<i64> = copies.iter().map(|c| c.shift).collect();
        assert_eq!(shifts, vec![-1, 0, 1]);
        assert!((copies[0].nodes[0].x - (0.2 - 1.0)).abs() < 1e-15);

        let sys = layer(16, 0.25);
        let one = replicate(&sys, 1).unwrap();
        assert_eq!(one.len(), 2);
        assert_eq!(one[0].nodes, sys.contours()[0].nodes());

        assert_eq!(replicate(&disk, 4).unwrap().len(), 4);
        assert!(replicate(&disk, 0).is_err());
    }
}
