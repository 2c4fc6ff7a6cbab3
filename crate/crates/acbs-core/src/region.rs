//! Subsets of the real line and of the unit circle used to select spectral
//! projections.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{angle, normalize_angle, C64};

/// Endpoints closer than this (in the line coordinate or in angle) are
/// treated as lying on the endpoint.
pub const SNAP: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    /// Interval of the real line; membership uses the real part.
    Interval { lo: f64, hi: f64, lo_closed: bool, hi_closed: bool },
    /// Arc of the unit circle running counterclockwise from `start` over
    /// `span` radians; membership uses the argument.
    Arc { start: f64, span: f64, start_closed: bool, end_closed: bool },
    /// Closed balls of the given radius around each point.
    Points { points: Vec<C64>, radius: f64 },
    Union(Vec<Region>),
    Empty,
}

impl Region {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Region::Interval { lo, hi, lo_closed: true, hi_closed: true }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Region::Interval { lo, hi, lo_closed: false, hi_closed: false }
    }

    /// `[lo, hi)`.
    pub fn half_open(lo: f64, hi: f64) -> Self {
        Region::Interval { lo, hi, lo_closed: true, hi_closed: false }
    }

    pub fn closed_arc(start: f64, span: f64) -> Self {
        Region::Arc { start: normalize_angle(start), span, start_closed: true, end_closed: true }
    }

    pub fn open_arc(start: f64, span: f64) -> Self {
        Region::Arc { start: normalize_angle(start), span, start_closed: false, end_closed: false }
    }

    pub fn ball(center: C64, radius: f64) -> Self {
        Region::Points { points: alloc::vec![center], radius }
    }

    pub fn is_valid(&self) -> bool {
        match self {
            Region::Interval { lo, hi, .. } => lo <= hi,
            Region::Arc { span, .. } => *span > 0.0 && *span <= 2.0 * PI + SNAP,
            Region::Points { radius, .. } => *radius >= 0.0,
            Region::Union(parts) => parts.iter().all(Region::is_valid),
            Region::Empty => true,
        }
    }

    pub fn contains(&self, z: C64) -> bool {
        match self {
            Region::Interval { lo, hi, lo_closed, hi_closed } => {
                let x = z.re;
                if (x - lo).abs() <= SNAP {
                    return *lo_closed;
                }
                if (x - hi).abs() <= SNAP {
                    return *hi_closed;
                }
                *lo < x && x < *hi
            }
            Region::Arc { start, span, start_closed, end_closed } => {
                if *span >= 2.0 * PI - SNAP {
                    return true;
                }
                let rel = normalize_angle(angle(z) - start);
                if rel <= SNAP || rel >= 2.0 * PI - SNAP {
                    return *start_closed;
                }
                if (rel - span).abs() <= SNAP {
                    return *end_closed;
                }
                rel < *span
            }
            Region::Points { points, radius } => points.iter().any(|p| (z - p).norm() <= radius + SNAP),
            Region::Union(parts) => parts.iter().any(|r| r.contains(z)),
            Region::Empty => false,
        }
    }

    /// Euclidean distance between the two point sets, when it can be
    /// computed in closed form.
    pub fn distance(&self, other: &Region) -> Option<f64> {
        use Region::*;
        match (self, other) {
            (Empty, _) | (_, Empty) => Some(f64::INFINITY),
            (Union(parts), r) | (r, Union(parts)) => {
                let mut best = f64::INFINITY;
                for p in parts {
                    best = best.min(p.distance(r)?);
                }
                Some(best)
            }
            (Interval { lo: a0, hi: a1, .. }, Interval { lo: b0, hi: b1, .. }) => Some((b0 - a1).max(a0 - b1).max(0.0)),
            (Arc { start: s1, span: w1, .. }, Arc { start: s2, span: w2, .. }) => {
                if *w1 >= 2.0 * PI - SNAP || *w2 >= 2.0 * PI - SNAP {
                    return Some(0.0);
                }
                let g1 = normalize_angle(s2 - (s1 + w1));
                let g2 = normalize_angle(s1 - (s2 + w2));
                let in1 = normalize_angle(s2 - s1) <= *w1;
                let in2 = normalize_angle(s1 - s2) <= *w2;
                if in1 || in2 {
                    return Some(0.0);
                }
                let g = g1.min(g2).min(PI);
                Some(2.0 * (g / 2.0).sin())
            }
            (Points { points: p, radius: r }, Points { points: q, radius: s }) => {
                let mut best = f64::INFINITY;
                for a in p {
                    for b in q {
                        best = best.min(((a - b).norm() - r - s).max(0.0));
                    }
                }
                Some(best)
            }
            (Points { points, radius }, Interval { lo, hi, .. }) | (Interval { lo, hi, .. }, Points { points, radius }) => {
                let mut best = f64::INFINITY;
                for p in points {
                    let x = p.re.clamp(*lo, *hi);
                    best = best.min(((p - C64::new(x, 0.0)).norm() - radius).max(0.0));
                }
                Some(best)
            }
            _ => None,
        }
    }

    /// True when the set is a single interval or a single ball: two such
    /// sets at positive distance are separated by a strip of that width.
    pub fn is_convex_piece(&self) -> bool {
        match self {
            Region::Interval { .. } => true,
            Region::Points { points, .. } => points.len() == 1,
            _ => false,
        }
    }

    /// Complement of an arc within the circle (endpoint flags flipped).
    pub fn arc_complement(&self) -> Option<Region> {
        match self {
            Region::Arc { start, span, start_closed, end_closed } if *span < 2.0 * PI - SNAP => Some(Region::Arc {
                start: normalize_angle(start + span),
                span: 2.0 * PI - span,
                start_closed: !end_closed,
                end_closed: !start_closed,
            }),
            _ => None,
        }
    }
}
