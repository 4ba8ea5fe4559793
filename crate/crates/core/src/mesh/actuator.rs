//! Parametric actuator archetypes.
//!
//! All archetypes share one layout: the body spans `z ∈ [0, length]` with the
//! inlet end at `z = 0`, the cross-section is centred on the z axis, and a
//! single chamber is sealed by end caps of thickness `cap_thickness`.
//!
//! * `Linear`: square bellows tube; the cross-section is scaled by a smooth
//!   corrugation profile along the chamber.
//! * `Bending1`, `Bending2`: rectangular tube whose bottom wall (`y < 0`) is
//!   the thicker strain-limiting layer. The part above that layer carries the
//!   corrugation, pneu-net style, so the top side lengthens under pressure and
//!   the tip bends towards −y.
//!
//! The default dimensions are idealizations, not measured drawings.

use std::f64::consts::PI;

use super::template::{graded_lines, CellKind, StructuredGrid};
use super::{Mesh, MeshError, Point, FIXED_SET, TIP_SET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActuatorKind {
    Linear,
    Bending1,
    Bending2,
}

impl ActuatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            ActuatorKind::Linear => "linear",
            ActuatorKind::Bending1 => "bending1",
            ActuatorKind::Bending2 => "bending2",
        }
    }

    pub fn is_bending(&self) -> bool {
        !matches!(self, ActuatorKind::Linear)
    }
}

impl std::str::FromStr for ActuatorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(ActuatorKind::Linear),
            "bending1" => Ok(ActuatorKind::Bending1),
            "bending2" => Ok(ActuatorKind::Bending2),
            other => Err(format!("unknown actuator kind '{other}' (expected linear, bending1 or bending2)")),
        }
    }
}

/// Piecewise-constant wall thickness along the axis: `(z_start, thickness)`
/// pairs sorted by `z_start`, the first starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct WallProfile(pub Vec<(f64, f64)>);

impl WallProfile {
    pub fn uniform(t: f64) -> Self {
        WallProfile(vec![(0.0, t)])
    }

    pub fn at(&self, z: f64) -> f64 {
        self.0
            .iter()
            .rev()
            .find(|(z0, _)| z >= *z0)
            .or(self.0.first())
            .map(|p| p.1)
            .unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().map(|p| p.1).fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().map(|p| p.1).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActuatorSpec {
    pub kind: ActuatorKind,
    /// Body length along z, mm.
    pub length: f64,
    /// Outer cross-section width (x), mm.
    pub outer_width: f64,
    /// Outer cross-section height (y), mm. Equal to the width for `Linear`.
    pub outer_height: f64,
    /// Side and top wall thickness, mm.
    pub wall_thickness: WallProfile,
    /// Bottom wall thickness for bending kinds, mm.
    pub strain_limiting_wall_thickness: Option<f64>,
    /// Thickness of both end caps, mm.
    pub cap_thickness: f64,
    pub bellows_count: usize,
    /// Outward amplitude of the corrugation at the top wall, mm. For bending
    /// kinds only the part above the strain-limiting layer is corrugated.
    pub bellows_depth: f64,
    /// Axial element size as a multiple of the transverse element size.
    pub axial_aspect: f64,
}

impl ActuatorSpec {
    /// Thin-walled square bellows tube.
    pub fn linear() -> Self {
        Self {
            kind: ActuatorKind::Linear,
            length: 90.0,
            outer_width: 16.0,
            outer_height: 16.0,
            wall_thickness: WallProfile::uniform(1.5),
            strain_limiting_wall_thickness: None,
            cap_thickness: 3.0,
            bellows_count: 6,
            bellows_depth: 2.0,
            axial_aspect: 1.0,
        }
    }

    /// Long, light bending actuator with thin walls.
    pub fn bending1() -> Self {
        Self {
            kind: ActuatorKind::Bending1,
            length: 100.0,
            outer_width: 14.0,
            outer_height: 12.0,
            wall_thickness: WallProfile::uniform(1.5),
            strain_limiting_wall_thickness: Some(3.0),
            cap_thickness: 3.0,
            bellows_count: 8,
            bellows_depth: 5.0,
            axial_aspect: 1.0,
        }
    }

    /// Short, wide bending actuator with 4 mm walls, used as a walking leg.
    pub fn bending2() -> Self {
        Self {
            kind: ActuatorKind::Bending2,
            length: 70.0,
            outer_width: 24.0,
            outer_height: 20.0,
            wall_thickness: WallProfile::uniform(4.0),
            strain_limiting_wall_thickness: Some(4.0),
            cap_thickness: 4.0,
            bellows_count: 6,
            bellows_depth: 9.5,
            axial_aspect: 1.0,
        }
    }

    pub fn default_for(kind: ActuatorKind) -> Self {
        match kind {
            ActuatorKind::Linear => Self::linear(),
            ActuatorKind::Bending1 => Self::bending1(),
            ActuatorKind::Bending2 => Self::bending2(),
        }
    }

    fn bottom_wall(&self) -> f64 {
        match self.kind {
            ActuatorKind::Linear => self.wall_thickness.min(),
            _ => self.strain_limiting_wall_thickness.unwrap_or(0.0),
        }
    }

    /// Thinnest geometric feature, mm.
    pub fn min_feature(&self) -> f64 {
        let mut m = self.wall_thickness.min().min(self.cap_thickness);
        if self.kind.is_bending() {
            m = m.min(self.bottom_wall());
        }
        m
    }

    /// Default element size: half of the thinnest feature.
    pub fn recommended_element_size(&self) -> f64 {
        0.5 * self.min_feature()
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        let bad = |m: String| Err(MeshError::InvalidSpec(m));
        if self.wall_thickness.0.is_empty() {
            return bad("wall_thickness profile is empty".into());
        }
        if self.wall_thickness.0.iter().any(|p| !(p.1 > 0.0)) {
            return bad("wall_thickness must be > 0".into());
        }
        if self.wall_thickness.0[0].0 != 0.0 || self.wall_thickness.0.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return bad("wall_thickness profile must start at z = 0 and be strictly increasing".into());
        }
        if !(self.length > 0.0 && self.outer_width > 0.0 && self.outer_height > 0.0) {
            return bad("length, outer_width and outer_height must be > 0".into());
        }
        if !(self.cap_thickness > 0.0) {
            return bad("cap_thickness must be > 0".into());
        }
        if 2.0 * self.cap_thickness >= self.length {
            return bad("end caps leave no room for the chamber".into());
        }
        if self.kind.is_bending() {
            match self.strain_limiting_wall_thickness {
                Some(t) if t > 0.0 => {}
                _ => return bad("strain_limiting_wall_thickness must be > 0".into()),
            }
        }
        let tmax = self.wall_thickness.max();
        if 2.0 * tmax >= self.outer_width {
            return bad("chamber must lie strictly inside the outer profile (width)".into());
        }
        let vertical = match self.kind {
            ActuatorKind::Linear => 2.0 * tmax,
            _ => tmax + self.bottom_wall(),
        };
        if vertical >= self.outer_height {
            return bad("chamber must lie strictly inside the outer profile (height)".into());
        }
        if self.kind == ActuatorKind::Linear {
            if (self.outer_width - self.outer_height).abs() > 1e-12 {
                return bad("linear actuator cross-section must be square".into());
            }
        }
        if !(self.bellows_depth >= 0.0) {
            return bad("bellows_depth must be ≥ 0".into());
        }
        if !(self.axial_aspect > 0.0) {
            return bad("axial_aspect must be > 0".into());
        }
        Ok(())
    }

    /// Chamber cross-section `(x_lo, x_hi, y_lo, y_hi)` at axial position `z`.
    pub fn chamber_rect(&self, z: f64) -> (f64, f64, f64, f64) {
        let t = self.wall_thickness.at(z);
        let (hw, hh) = (0.5 * self.outer_width, 0.5 * self.outer_height);
        match self.kind {
            ActuatorKind::Linear => (-hw + t, hw - t, -hh + t, hh - t),
            _ => (-hw + t, hw - t, -hh + self.bottom_wall(), hh - t),
        }
    }

    fn in_chamber_z(&self, z: f64) -> bool {
        z > self.cap_thickness && z < self.length - self.cap_thickness
    }

    /// Height of the flat strain-limiting layer's top face; `None` for `Linear`.
    fn layer_top(&self) -> Option<f64> {
        self.kind.is_bending().then(|| -0.5 * self.outer_height + self.bottom_wall())
    }

    /// Cross-section scale factor of the bellows corrugation.
    fn bellows_scale(&self, z: f64) -> f64 {
        if self.bellows_count == 0 || !self.in_chamber_z(z) {
            return 1.0;
        }
        let lc = self.length - 2.0 * self.cap_thickness;
        let s = (z - self.cap_thickness) / lc;
        let bump = 0.5 * (1.0 - (2.0 * PI * self.bellows_count as f64 * s).cos());
        let reach = match self.layer_top() {
            Some(y0) => 0.5 * self.outer_height - y0,
            None => 0.5 * self.outer_width,
        };
        1.0 + self.bellows_depth / reach * bump
    }

    /// Maps a point of the straight template onto the corrugated body.
    fn corrugate(&self, x: f64, y: f64, z: f64) -> Point {
        let g = self.bellows_scale(z);
        match self.layer_top() {
            Some(y0) if y > y0 => Point::new(x * g, y0 + (y - y0) * g, z),
            Some(_) => Point::new(x * g, y, z),
            None => Point::new(x * g, y * g, z),
        }
    }
}

/// Meshes an actuator archetype with the given transverse element size.
pub fn generate_mesh(spec: &ActuatorSpec, element_size: f64) -> Result<Mesh, MeshError> {
    spec.validate()?;
    if !(element_size > 0.0) {
        return Err(MeshError::InvalidSpec("element_size must be > 0".into()));
    }
    if element_size > 0.5 * spec.min_feature() + 1e-12 {
        log::warn!(
            "element size {element_size} mm exceeds half of the thinnest feature ({} mm)",
            spec.min_feature()
        );
    }
    let (hw, hh) = (0.5 * spec.outer_width, 0.5 * spec.outer_height);
    let mut xb = vec![-hw, hw];
    let mut yb = vec![-hh, hh];
    for &(_, t) in &spec.wall_thickness.0 {
        xb.extend([-hw + t, hw - t]);
        yb.push(hh - t);
        if spec.kind == ActuatorKind::Linear {
            yb.push(-hh + t);
        }
    }
    if spec.kind.is_bending() {
        yb.push(-hh + spec.bottom_wall());
    }
    let mut zb = vec![0.0, spec.cap_thickness, spec.length - spec.cap_thickness, spec.length];
    zb.extend(spec.wall_thickness.0.iter().map(|p| p.0).filter(|&z| z > 0.0 && z < spec.length));
    let mut hz = element_size * spec.axial_aspect;
    if spec.bellows_count > 0 {
        let wavelength = (spec.length - 2.0 * spec.cap_thickness) / spec.bellows_count as f64;
        hz = hz.min(wavelength / 4.0);
    }
    let xs = graded_lines(&xb, element_size);
    let ys = graded_lines(&yb, element_size);
    let zs = graded_lines(&zb, hz);
    let (nx, ny, nz) = (xs.len() - 1, ys.len() - 1, zs.len() - 1);

    let centre = |v: &[f64], i: isize| 0.5 * (v[i as usize] + v[i as usize + 1]);
    let cells = |i: isize, j: isize, k: isize| {
        if i < 0 || j < 0 || k < 0 || i >= nx as isize || j >= ny as isize || k >= nz as isize {
            return CellKind::Empty;
        }
        let (x, y, z) = (centre(&xs, i), centre(&ys, j), centre(&zs, k));
        if spec.in_chamber_z(z) {
            let (x0, x1, y0, y1) = spec.chamber_rect(z);
            if x > x0 && x < x1 && y > y0 && y < y1 {
                return CellKind::Cavity;
            }
        }
        CellKind::Solid
    };
    let map = |x: f64, y: f64, z: f64| spec.corrugate(x, y, z);
    let tags = move |_i: usize, _j: usize, k: usize| {
        let mut t = Vec::new();
        if k == 0 {
            t.push(FIXED_SET);
        }
        if k == nz {
            t.push(TIP_SET);
        }
        t
    };
    let mesh = StructuredGrid::new(xs.clone(), ys.clone(), zs.clone())
        .with_cells(cells)
        .with_map(map)
        .with_tags(tags)
        .generate();
    mesh
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::CAVITY_SET;

    fn coarse(mut s: ActuatorSpec) -> ActuatorSpec {
        s.axial_aspect = 4.0;
        s
    }

    #[test]
    fn archetypes_have_closed_cavities() {
        for spec in [ActuatorSpec::linear(), ActuatorSpec::bending1(), ActuatorSpec::bending2()] {
            let spec = coarse(spec);
            let m = generate_mesh(&spec, 1.5).unwrap();
            m.validate().unwrap();
            assert!(m.face_set_is_closed(CAVITY_SET).unwrap(), "{:?}", spec.kind);
            assert!(!m.node_set(FIXED_SET).unwrap().is_empty());
            assert!(!m.node_set(TIP_SET).unwrap().is_empty());
            assert!(m.enclosed_volume(CAVITY_SET, None).unwrap() > 0.0);
        }
    }

    #[test]
    fn bending_cavity_volume_matches_box() {
        let mut spec = coarse(ActuatorSpec::bending1());
        spec.bellows_count = 0;
        let m = generate_mesh(&spec, 1.5).unwrap();
        let (x0, x1, y0, y1) = spec.chamber_rect(50.0);
        let expected = (x1 - x0) * (y1 - y0) * (spec.length - 2.0 * spec.cap_thickness);
        assert!((m.enclosed_volume(CAVITY_SET, None).unwrap() - expected).abs() < 1e-9 * expected);
        let solid = spec.outer_width * spec.outer_height * spec.length - expected;
        assert!((m.volume() - solid).abs() < 1e-9 * solid);
    }

    #[test]
    fn zero_wall_is_rejected() {
        let mut s = ActuatorSpec::linear();
        s.wall_thickness = WallProfile::uniform(0.0);
        let err = generate_mesh(&s, 1.0).unwrap_err();
        assert!(err.to_string().contains("wall_thickness must be > 0"));
    }

    #[test]
    fn chamber_must_fit() {
        let mut s = ActuatorSpec::bending2();
        s.strain_limiting_wall_thickness = Some(16.0);
        assert!(s.validate().is_err());
    }

    #[test]
    fn bending2_at_one_millimetre_is_valid() {
        let m = generate_mesh(&ActuatorSpec::bending2(), 1.0).unwrap();
        m.validate().unwrap();
        assert!(m.element_count() > 0);
    }

    #[test]
    fn piecewise_wall_profile() {
        let mut s = coarse(ActuatorSpec::bending1());
        s.wall_thickness = WallProfile(vec![(0.0, 2.0), (50.0, 1.5)]);
        assert_eq!(s.wall_thickness.at(10.0), 2.0);
        assert_eq!(s.wall_thickness.at(60.0), 1.5);
        assert_eq!(s.min_feature(), 1.5);
        let m = generate_mesh(&s, 1.5).unwrap();
        m.validate().unwrap();
        assert!(m.face_set_is_closed(CAVITY_SET).unwrap());
    }

    #[test]
    fn generation_is_deterministic() {
        let s = coarse(ActuatorSpec::linear());
        assert_eq!(generate_mesh(&s, 2.0).unwrap(), generate_mesh(&s, 2.0).unwrap());
    }
}
