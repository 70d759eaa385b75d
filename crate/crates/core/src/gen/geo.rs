// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

//! Planar geometry for small regions.
//!
//! Points are projected onto a local plane around a reference latitude and
//! longitude (equirectangular, `degree_km` km per degree of latitude). All
//! hull and polygon work happens in that plane.

use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Distances below this (km) are treated as this.
pub const MIN_DISTANCE_KM: f64 = 0.001;

pub const DEFAULT_DEGREE_KM: f64 = 111.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatLon {
    pub lat: f64,
    pub lon: f64,
}

impl LatLon {
    pub fn new(lat: f64, lon: f64) -> Self {
        Self { lat, lon }
    }
}

/// Equirectangular distance in km, with the longitude difference scaled by
/// the cosine of the mean latitude.
pub fn distance_km(a: LatLon, b: LatLon, degree_km: f64) -> f64 {
    let mean_lat = (a.lat + b.lat) * 0.5;
    let dlat = a.lat - b.lat;
    let dlon = (a.lon - b.lon) * libm::cos(mean_lat.to_radians());
    degree_km * libm::sqrt(dlat * dlat + dlon * dlon)
}

/// [`distance_km`] clamped below by [`MIN_DISTANCE_KM`].
pub fn guarded_distance_km(a: LatLon, b: LatLon, degree_km: f64) -> f64 {
    distance_km(a, b, degree_km).max(MIN_DISTANCE_KM)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    origin: LatLon,
    cos_lat: f64,
    degree_km: f64,
}

impl Plane {
    pub fn new(origin: LatLon, degree_km: f64) -> Self {
        Self {
            origin,
            cos_lat: libm::cos(origin.lat.to_radians()),
            degree_km,
        }
    }

    /// Centered on the mean of `points`.
    pub fn around(points: &[LatLon], degree_km: f64) -> Self {
        let n = points.len().max(1) as f64;
        let lat = points.iter().map(|p| p.lat).sum::<f64>() / n;
        let lon = points.iter().map(|p| p.lon).sum::<f64>() / n;
        Self::new(LatLon::new(lat, lon), degree_km)
    }

    pub fn project(&self, p: LatLon) -> (f64, f64) {
        (
            (p.lon - self.origin.lon) * self.cos_lat * self.degree_km,
            (p.lat - self.origin.lat) * self.degree_km,
        )
    }

    pub fn unproject(&self, (x, y): (f64, f64)) -> LatLon {
        LatLon::new(
            self.origin.lat + y / self.degree_km,
            self.origin.lon + x / (self.cos_lat * self.degree_km),
        )
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Convex hull in counter-clockwise order (monotone chain). Collinear and
/// duplicate points are dropped.
pub fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (cx, cy) = (a.0 + t * dx - p.0, a.1 + t * dy - p.1);
    libm::sqrt(cx * cx + cy * cy)
}

/// Even-odd point-in-polygon test.
pub fn point_in_polygon(p: (f64, f64), poly: &[(f64, f64)]) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + n - 1) % n]);
        if (a.1 > p.1) != (b.1 > p.1) && p.0 < (b.0 - a.0) * (p.1 - a.1) / (b.1 - a.1) + a.0 {
            inside = !inside;
        }
    }
    inside
}

/// Distance from `p` to a polygon's boundary, or zero inside it.
pub fn distance_to_polygon(p: (f64, f64), poly: &[(f64, f64)]) -> f64 {
    match poly.len() {
        0 => f64::INFINITY,
        1 => segment_distance(p, poly[0], poly[0]),
        n => {
            if n >= 3 && point_in_polygon(p, poly) {
                return 0.0;
            }
            (0..n)
                .map(|i| segment_distance(p, poly[i], poly[(i + 1) % n]))
                .fold(f64::INFINITY, f64::min)
        }
    }
}

/// Area from which agents' preferred locations are drawn uniformly.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingDomain {
    plane: Plane,
    polygon: Vec<(f64, f64)>,
    buffer_km: f64,
    bbox: (f64, f64, f64, f64),
}

impl SamplingDomain {
    /// Points within `buffer_km` of the convex hull of `anchors`.
    pub fn hull_buffer(anchors: &[LatLon], buffer_km: f64, degree_km: f64) -> Self {
        let plane = Plane::around(anchors, degree_km);
        let pts: Vec<(f64, f64)> = anchors.iter().map(|&a| plane.project(a)).collect();
        Self::build(plane, convex_hull(&pts), buffer_km)
    }

    /// The interior of a simple polygon given by its vertices.
    pub fn polygon(vertices: &[LatLon], degree_km: f64) -> Self {
        let plane = Plane::around(vertices, degree_km);
        let pts = vertices.iter().map(|&a| plane.project(a)).collect();
        Self::build(plane, pts, 0.0)
    }

    fn build(plane: Plane, polygon: Vec<(f64, f64)>, buffer_km: f64) -> Self {
        let mut bbox = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &(x, y) in &polygon {
            bbox = (bbox.0.min(x), bbox.1.min(y), bbox.2.max(x), bbox.3.max(y));
        }
        let b = buffer_km;
        Self {
            plane,
            polygon,
            buffer_km,
            bbox: (bbox.0 - b, bbox.1 - b, bbox.2 + b, bbox.3 + b),
        }
    }

    pub fn contains(&self, p: LatLon) -> bool {
        self.contains_planar(self.plane.project(p))
    }

    fn contains_planar(&self, p: (f64, f64)) -> bool {
        if self.buffer_km > 0.0 {
            distance_to_polygon(p, &self.polygon) <= self.buffer_km
        } else {
            self.polygon.len() >= 3 && point_in_polygon(p, &self.polygon)
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.polygon.is_empty() || (self.buffer_km <= 0.0 && self.polygon.len() < 3)
    }

    /// Uniform point by rejection from the bounding box.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> LatLon {
        let (x0, y0, x1, y1) = self.bbox;
        loop {
            let x = x0 + (x1 - x0) * rng.random::<f64>();
            let y = y0 + (y1 - y0) * rng.random::<f64>();
            if self.contains_planar((x, y)) {
                return self.plane.unproject((x, y));
            }
        }
    }
}
