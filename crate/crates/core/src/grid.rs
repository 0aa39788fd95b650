//! Periodic lattice geometry: the torus `Z_L^d`, vertex/edge indexing,
//! Euclidean balls and edge-balls under the minimum-image convention.
//!
//! Vertices are flattened with coordinate 0 fastest: `idx = x_0 + L*x_1 + L^2*x_2`.
//! Oriented edges `{x, x + e_i}` are indexed as `i * L^d + idx(x)`, so a
//! d-component vector field and the edge array share one flat layout.

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

/// The periodic box `Z_L^d`. `L` must be a power of two (so dyadic radius
/// grids nest exactly) and at least 4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Torus {
    dim: usize,
    side: usize,
    log2_side: u32,
    vertices: usize,
}

impl Torus {
    pub fn new(dim: usize, side: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::config(format!("dimension {dim} not in 1..=3")));
        }
        if side < 4 || !side.is_power_of_two() {
            return Err(Error::config(format!(
                "box side {side} must be a power of two >= 4"
            )));
        }
        Ok(Torus {
            dim,
            side,
            log2_side: side.trailing_zeros(),
            vertices: side.pow(dim as u32),
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn side(&self) -> usize {
        self.side
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.dim * self.vertices
    }

    /// Coordinate of vertex `idx` along dimension `dir`.
    #[inline]
    pub fn coord(&self, idx: usize, dir: usize) -> usize {
        (idx >> (self.log2_side * dir as u32)) & (self.side - 1)
    }

    pub fn coords(&self, idx: usize) -> [i64; MAX_DIM] {
        let mut c = [0i64; MAX_DIM];
        for dir in 0..self.dim {
            c[dir] = self.coord(idx, dir) as i64;
        }
        c
    }

    /// Vertex index of (possibly out-of-range) coordinates, wrapped periodically.
    pub fn index(&self, coords: &[i64]) -> usize {
        let mask = (self.side - 1) as i64;
        let mut idx = 0usize;
        for dir in (0..self.dim).rev() {
            // side is a power of two, so & mask wraps negatives correctly
            idx = (idx << self.log2_side) | (coords[dir] & mask) as usize;
        }
        idx
    }

    /// Neighbor of `idx` one step along `+e_dir`.
    #[inline]
    pub fn up(&self, idx: usize, dir: usize) -> usize {
        let shift = self.log2_side * dir as u32;
        let p = (idx >> shift) & (self.side - 1);
        if p + 1 == self.side {
            idx - (p << shift)
        } else {
            idx + (1 << shift)
        }
    }

    /// Neighbor of `idx` one step along `-e_dir`.
    #[inline]
    pub fn down(&self, idx: usize, dir: usize) -> usize {
        let shift = self.log2_side * dir as u32;
        let p = (idx >> shift) & (self.side - 1);
        if p == 0 {
            idx + ((self.side - 1) << shift)
        } else {
            idx - (1 << shift)
        }
    }

    /// Flat index of the oriented edge `{x, x + e_dir}`.
    #[inline]
    pub fn edge_index(&self, dir: usize, vertex: usize) -> usize {
        dir * self.vertices + vertex
    }

    /// Minimum-image displacement `b - a`, component in `(-L/2, L/2]`.
    pub fn displacement(&self, a: usize, b: usize) -> [i64; MAX_DIM] {
        let half = (self.side / 2) as i64;
        let l = self.side as i64;
        let mut out = [0i64; MAX_DIM];
        for dir in 0..self.dim {
            let mut delta = self.coord(b, dir) as i64 - self.coord(a, dir) as i64;
            if delta > half {
                delta -= l;
            } else if delta <= -half {
                delta += l;
            }
            out[dir] = delta;
        }
        out
    }

    /// Squared Euclidean distance under the minimum image convention.
    pub fn distance2(&self, a: usize, b: usize) -> i64 {
        let d = self.displacement(a, b);
        d.iter().map(|&x| x * x).sum()
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        (self.distance2(a, b) as f64).sqrt()
    }

    /// Euclidean ball `B_R(center)`; errors when `2R >= L` (self-wrap).
    pub fn ball(&self, center: usize, radius: f64) -> Result<Ball> {
        let offsets = BallOffsets::new(self.dim, radius, self.side)?;
        Ok(offsets.anchor(self, center))
    }
}

/// A realized ball: vertex list of `B_R(x)` and edge list of the edge-ball
/// (all lattice edges with both endpoints inside `B_R(x)`).
#[derive(Debug, Clone)]
pub struct Ball {
    pub center: usize,
    pub radius: f64,
    pub vertices: Vec<usize>,
    /// Flat edge indices `dir * L^d + tail`.
    pub edges: Vec<usize>,
}

/// Center-relative offsets of a Euclidean ball, reusable across centers.
#[derive(Debug, Clone)]
pub struct BallOffsets {
    pub radius: f64,
    pub vertices: Vec<[i64; MAX_DIM]>,
    /// Per direction: offsets `o` such that both `o` and `o + e_dir` lie in the ball.
    pub edge_tails: Vec<Vec<[i64; MAX_DIM]>>,
}

impl BallOffsets {
    /// Offsets of `B_R(0)` in dimension `dim` on a box of side `side`.
    /// Rejects radii that would self-wrap (`2R >= L`).
    pub fn new(dim: usize, radius: f64, side: usize) -> Result<Self> {
        if radius < 0.0 || !radius.is_finite() {
            return Err(Error::geometry(format!("invalid ball radius {radius}")));
        }
        if 2.0 * radius >= side as f64 {
            return Err(Error::geometry(format!(
                "ball radius {radius} self-wraps on box of side {side}"
            )));
        }
        let r2 = radius * radius;
        let reach = radius.floor() as i64;
        let inside = |o: &[i64; MAX_DIM]| -> bool {
            let s: i64 = o.iter().map(|&x| x * x).sum();
            (s as f64) <= r2
        };
        let mut vertices = Vec::new();
        let range = |active: bool| if active { (-reach, reach) } else { (0, 0) };
        let (x0lo, x0hi) = range(true);
        let (x1lo, x1hi) = range(dim >= 2);
        let (x2lo, x2hi) = range(dim >= 3);
        for x2 in x2lo..=x2hi {
            for x1 in x1lo..=x1hi {
                for x0 in x0lo..=x0hi {
                    let o = [x0, x1, x2];
                    if inside(&o) {
                        vertices.push(o);
                    }
                }
            }
        }
        let mut edge_tails = vec![Vec::new(); dim];
        for &o in &vertices {
            for dir in 0..dim {
                let mut head = o;
                head[dir] += 1;
                if inside(&head) {
                    edge_tails[dir].push(o);
                }
            }
        }
        Ok(BallOffsets {
            radius,
            vertices,
            edge_tails,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_tails.iter().map(Vec::len).sum()
    }

    /// Instantiate the ball around a concrete center.
    pub fn anchor(&self, torus: &Torus, center: usize) -> Ball {
        let c = torus.coords(center);
        let mut add = |o: &[i64; MAX_DIM]| {
            let coords = [c[0] + o[0], c[1] + o[1], c[2] + o[2]];
            torus.index(&coords)
        };
        let vertices: Vec<usize> = self.vertices.iter().map(&mut add).collect();
        let mut edges = Vec::with_capacity(self.edge_count());
        for (dir, tails) in self.edge_tails.iter().enumerate() {
            for o in tails {
                let coords = [c[0] + o[0], c[1] + o[1], c[2] + o[2]];
                edges.push(torus.edge_index(dir, torus.index(&coords)));
            }
        }
        Ball {
            center,
            radius: self.radius,
            vertices,
            edges,
        }
    }
}

/// Cache of ball offsets keyed by the integer `floor(R^2)`: two radii whose
/// squares floor to the same integer cut out identical lattice balls.
#[derive(Debug, Default)]
pub struct OffsetCache {
    map: std::collections::BTreeMap<(usize, i64), std::sync::Arc<BallOffsets>>,
}

impl OffsetCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(
        &mut self,
        dim: usize,
        radius: f64,
        side: usize,
    ) -> Result<std::sync::Arc<BallOffsets>> {
        let key = (dim, (radius * radius).floor() as i64);
        if let Some(hit) = self.map.get(&key) {
            return Ok(hit.clone());
        }
        let offsets = std::sync::Arc::new(BallOffsets::new(dim, radius, side)?);
        self.map.insert(key, offsets.clone());
        Ok(offsets)
    }
}

/// Dyadic radii `2, 4, ..., <= max` (used by the random length-scale fields).
pub fn dyadic_radii(max: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut r = 2.0;
    while r <= max {
        out.push(r);
        r *= 2.0;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_boxes() {
        assert!(Torus::new(0, 8).is_err());
        assert!(Torus::new(4, 8).is_err());
        assert!(Torus::new(2, 6).is_err());
        assert!(Torus::new(2, 2).is_err());
        assert!(Torus::new(2, 8).is_ok());
    }

    #[test]
    fn indexing_round_trips() {
        let t = Torus::new(3, 8).unwrap();
        for idx in 0..t.vertex_count() {
            assert_eq!(t.index(&t.coords(idx)), idx);
        }
        // wrapping
        assert_eq!(t.index(&[8, 0, 0]), t.index(&[0, 0, 0]));
        assert_eq!(t.index(&[-1, 0, 0]), t.index(&[7, 0, 0]));
    }

    #[test]
    fn neighbors_wrap() {
        let t = Torus::new(2, 4).unwrap();
        let origin = t.index(&[0, 0, 0]);
        assert_eq!(t.up(origin, 0), t.index(&[1, 0, 0]));
        assert_eq!(t.down(origin, 0), t.index(&[3, 0, 0]));
        assert_eq!(t.up(t.index(&[3, 2, 0]), 0), t.index(&[0, 2, 0]));
        for idx in 0..t.vertex_count() {
            for dir in 0..2 {
                assert_eq!(t.down(t.up(idx, dir), dir), idx);
            }
        }
    }

    #[test]
    fn von_neumann_ball_in_2d() {
        // B_1(x) in d=2 is the 5-point stencil.
        let t = Torus::new(2, 8).unwrap();
        let b = t.ball(t.index(&[3, 3, 0]), 1.0).unwrap();
        assert_eq!(b.vertices.len(), 5);
        // edges with both endpoints inside: the 4 spokes
        assert_eq!(b.edges.len(), 4);
    }

    #[test]
    fn ball_monotone_in_radius() {
        let t = Torus::new(2, 32).unwrap();
        let mut last = 0;
        for r in [1.0, 2.0, 3.0, 5.0, 7.9] {
            let b = t.ball(0, r).unwrap();
            assert!(b.vertices.len() > last);
            last = b.vertices.len();
        }
    }

    #[test]
    fn self_wrap_rejected() {
        let t = Torus::new(2, 8).unwrap();
        assert!(t.ball(0, 4.0).is_err());
        assert!(t.ball(0, 3.9).is_ok());
    }

    #[test]
    fn min_image_distance() {
        let t = Torus::new(2, 8).unwrap();
        let a = t.index(&[0, 0, 0]);
        let b = t.index(&[7, 7, 0]);
        assert_eq!(t.distance2(a, b), 2);
    }

    #[test]
    fn dyadic_grid() {
        assert_eq!(dyadic_radii(16.0), vec![2.0, 4.0, 8.0, 16.0]);
        assert!(dyadic_radii(1.5).is_empty());
    }
}
