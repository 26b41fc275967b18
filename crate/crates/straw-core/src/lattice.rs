//! Integer lattice geometry.
//!
//! Hypotheses live on a finite rectangular lattice of dimension 1, 2, or 3
//! with 1-based integer coordinates. Per-site data is stored in row-major
//! order (the last axis varies fastest), and neighborhoods are Euclidean
//! balls with a strict radius cutoff.

use alloc::vec::Vec;

use crate::error::{CoreError, Result};
use crate::fmath;

/// Maximum supported lattice dimension.
pub const MAX_DIM: usize = 3;

/// A point with integer coordinates in 1, 2, or 3 dimensions.
///
/// Sites are plain geometric points; they are not tied to any particular
/// lattice, so off-lattice points (for distance computations) are fine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Site {
    coords: [i64; MAX_DIM],
    dim: usize,
}

impl Site {
    /// Creates a site from its coordinates (1 to 3 of them).
    pub fn new(coords: &[i64]) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(CoreError::InvalidDimension { dim: coords.len() });
        }
        let mut buf = [0i64; MAX_DIM];
        buf[..coords.len()].copy_from_slice(coords);
        Ok(Site {
            coords: buf,
            dim: coords.len(),
        })
    }

    /// The coordinates, one per dimension.
    pub fn coords(&self) -> &[i64] {
        &self.coords[..self.dim]
    }

    /// Number of dimensions.
    pub fn dimension(&self) -> usize {
        self.dim
    }
}

/// Euclidean distance between two sites of equal dimension.
pub fn euclidean_distance(a: &Site, b: &Site) -> Result<f64> {
    if a.dim != b.dim {
        return Err(CoreError::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    let mut sumsq: i128 = 0;
    for i in 0..a.dim {
        let d = a.coords[i] as i128 - b.coords[i] as i128;
        sumsq += d * d;
    }
    Ok(fmath::sqrt(sumsq as f64))
}

/// A finite rectangular lattice with 1-based coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    extents: [usize; MAX_DIM],
    dim: usize,
    num_sites: usize,
}

impl Lattice {
    /// Creates a lattice with the given per-axis extents (1 to 3 axes, each
    /// at least 1). Axis `i` holds coordinates `1..=extents[i]`.
    pub fn new(extents: &[usize]) -> Result<Self> {
        if extents.is_empty() || extents.len() > MAX_DIM {
            return Err(CoreError::InvalidDimension { dim: extents.len() });
        }
        let mut buf = [1usize; MAX_DIM];
        let mut total: usize = 1;
        for (i, &n) in extents.iter().enumerate() {
            if n == 0 {
                return Err(CoreError::InvalidExtent);
            }
            total = total.checked_mul(n).ok_or(CoreError::InvalidExtent)?;
            buf[i] = n;
        }
        Ok(Lattice {
            extents: buf,
            dim: extents.len(),
            num_sites: total,
        })
    }

    /// Number of dimensions.
    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Per-axis extents.
    pub fn extents(&self) -> &[usize] {
        &self.extents[..self.dim]
    }

    /// Total number of sites.
    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    /// Whether the site lies on this lattice.
    pub fn contains(&self, site: &Site) -> bool {
        site.dimension() == self.dim
            && site
                .coords()
                .iter()
                .zip(self.extents())
                .all(|(&c, &n)| c >= 1 && c <= n as i64)
    }

    /// Creates a site from coordinates, validated to lie on the lattice.
    pub fn site(&self, coords: &[i64]) -> Result<Site> {
        let s = Site::new(coords)?;
        if self.contains(&s) {
            Ok(s)
        } else {
            Err(CoreError::OutOfBounds)
        }
    }

    /// The site at a row-major linear index.
    pub fn site_at(&self, index: usize) -> Result<Site> {
        if index >= self.num_sites {
            return Err(CoreError::OutOfBounds);
        }
        let mut buf = [0i64; MAX_DIM];
        let mut rem = index;
        for axis in (0..self.dim).rev() {
            let n = self.extents[axis];
            buf[axis] = (rem % n) as i64 + 1;
            rem /= n;
        }
        Ok(Site {
            coords: buf,
            dim: self.dim,
        })
    }

    /// Row-major linear index of a site (last axis varies fastest).
    pub fn linear_index(&self, site: &Site) -> Result<usize> {
        if !self.contains(site) {
            return Err(CoreError::OutOfBounds);
        }
        let mut index = 0usize;
        for axis in 0..self.dim {
            index = index * self.extents[axis] + (site.coords[axis] as usize - 1);
        }
        Ok(index)
    }

    /// All lattice sites strictly within Euclidean distance `radius` of
    /// `center` (the center itself included), in row-major order.
    pub fn sites_within_radius(&self, center: &Site, radius: f64) -> Result<Vec<Site>> {
        if !self.contains(center) {
            return Err(CoreError::OutOfBounds);
        }
        if !radius.is_finite() || radius <= 0.0 {
            return Err(CoreError::InvalidParameter { name: "radius" });
        }
        let offsets = ball_offsets(radius, self.dim);
        let mut out = Vec::new();
        'offsets: for (delta, _) in &offsets {
            let mut coords = [0i64; MAX_DIM];
            for axis in 0..self.dim {
                let c = center.coords[axis] + delta[axis];
                if c < 1 || c > self.extents[axis] as i64 {
                    continue 'offsets;
                }
                coords[axis] = c;
            }
            out.push(Site {
                coords,
                dim: self.dim,
            });
        }
        Ok(out)
    }
}

/// Integer offsets strictly within `radius` of the origin, paired with their
/// Euclidean lengths, in row-major (lexicographic) order.
pub(crate) fn ball_offsets(radius: f64, dim: usize) -> Vec<([i64; MAX_DIM], f64)> {
    let bound = fmath::ceil(radius) as i64;
    let rsq = radius * radius;
    let axis_range = |active: bool| -> (i64, i64) {
        if active {
            (-bound, bound)
        } else {
            (0, 0)
        }
    };
    let (x_lo, x_hi) = axis_range(dim >= 1);
    let (y_lo, y_hi) = axis_range(dim >= 2);
    let (z_lo, z_hi) = axis_range(dim >= 3);
    let mut out = Vec::new();
    for dx in x_lo..=x_hi {
        for dy in y_lo..=y_hi {
            for dz in z_lo..=z_hi {
                let sumsq = (dx * dx + dy * dy + dz * dz) as f64;
                if sumsq < rsq {
                    out.push(([dx, dy, dz], fmath::sqrt(sumsq)));
                }
            }
        }
    }
    out
}
