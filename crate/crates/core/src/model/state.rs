use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, Real};

/// Uniform cell-centered radial grid on `[r_min, r_max]`.
///
/// With `r_min = 0` the first center sits at `dr/2`, so the origin is never evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid<T> {
    pub r_min: T,
    pub r_max: T,
    pub cells: usize,
}

impl<T: Real> RadialGrid<T> {
    pub fn new(r_min: T, r_max: T, cells: usize) -> Result<Self> {
        if !(r_min >= T::zero()) || !(r_max > r_min) || cells < 4 {
            return Err(Error::InvalidArgument(format!(
                "radial grid needs 0 <= r_min < r_max and at least 4 cells, got [{r_min}, {r_max}] with {cells}"
            )));
        }
        Ok(Self { r_min, r_max, cells })
    }

    pub fn dr(&self) -> T {
        (self.r_max - self.r_min) / from_usize(self.cells)
    }

    pub fn center(&self, i: usize) -> T {
        self.r_min + (from_usize::<T>(i) + lit(0.5)) * self.dr()
    }

    /// Radius of the face between cells `i − 1` and `i`; `face(cells)` is `r_max`.
    pub fn face(&self, i: usize) -> T {
        self.r_min + from_usize::<T>(i) * self.dr()
    }

    pub fn centers(&self) -> Vec<T> {
        (0..self.cells).map(|i| self.center(i)).collect()
    }
}

/// Cell-centered fields `(h, U, V)` of the radial system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialState<T> {
    pub r_centers: Vec<T>,
    pub h: Vec<T>,
    pub u: Vec<T>,
    pub v: Vec<T>,
    pub h_bar: T,
    pub t: T,
}

impl<T: Real> RadialState<T> {
    pub fn rest(grid: &RadialGrid<T>, h_bar: T) -> Self {
        let n = grid.cells;
        Self {
            r_centers: grid.centers(),
            h: vec![h_bar; n],
            u: vec![T::zero(); n],
            v: vec![T::zero(); n],
            h_bar,
            t: T::zero(),
        }
    }

    pub fn len(&self) -> usize {
        self.r_centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r_centers.is_empty()
    }

    pub fn dr(&self) -> T {
        self.r_centers[1] - self.r_centers[0]
    }

    /// Grid the centers were built from.
    pub fn grid(&self) -> RadialGrid<T> {
        let dr = self.dr();
        let half = lit::<T>(0.5);
        let mut r_min = self.r_centers[0] - half * dr;
        // Centers built from r_min = 0 reproduce it only up to rounding.
        if r_min.abs() <= lit::<T>(16.0) * T::eps() * self.r_centers[self.len() - 1] {
            r_min = T::zero();
        }
        RadialGrid {
            r_min,
            r_max: self.r_centers[self.len() - 1] + half * dr,
            cells: self.len(),
        }
    }

    /// Checks the type invariants: equal lengths, strictly increasing positive centers,
    /// finite non-negative depth, finite velocities, positive far-field depth.
    pub fn audit(&self) -> Result<()> {
        let n = self.r_centers.len();
        let mut problems = Vec::new();
        if n < 2 {
            problems.push(format!("need at least 2 cells, got {n}"));
        }
        if self.h.len() != n || self.u.len() != n || self.v.len() != n {
            problems.push(format!(
                "array lengths differ: r {n}, h {}, u {}, v {}",
                self.h.len(),
                self.u.len(),
                self.v.len()
            ));
        }
        if !(self.h_bar > T::zero()) {
            problems.push(format!("h_bar must be positive, got {}", self.h_bar));
        }
        if !self.t.is_finite() {
            problems.push("time is not finite".into());
        }
        if self.r_centers.first().is_some_and(|&r| !(r > T::zero())) {
            problems.push("first cell center must be positive".into());
        }
        if self.r_centers.windows(2).any(|w| !(w[1] > w[0])) {
            problems.push("cell centers are not strictly increasing".into());
        }
        if let Some(i) = self.h.iter().position(|&h| !(h >= T::zero()) || !h.is_finite()) {
            problems.push(format!("depth at cell {i} is {}", self.h[i]));
        }
        if self.u.iter().chain(&self.v).any(|x| !x.is_finite()) {
            problems.push("non-finite velocity".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::PostCondition(problems.join("; ")))
        }
    }
}

/// Conservative fields `(h, hu, hv)` on a uniform Cartesian grid, stored row-major with `x`
/// varying fastest. `(x0, y0)` is the lower-left corner of the domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarState<T> {
    pub nx: usize,
    pub ny: usize,
    pub dx: T,
    pub dy: T,
    pub x0: T,
    pub y0: T,
    pub h: Vec<T>,
    pub hu: Vec<T>,
    pub hv: Vec<T>,
    pub h_bar: T,
    pub t: T,
}

impl<T: Real> PlanarState<T> {
    /// Rest state on the square `[−half_width, half_width]²`.
    pub fn rest(half_width: T, nx: usize, ny: usize, h_bar: T) -> Self {
        let two = lit::<T>(2.0);
        let n = nx * ny;
        Self {
            nx,
            ny,
            dx: two * half_width / from_usize(nx),
            dy: two * half_width / from_usize(ny),
            x0: -half_width,
            y0: -half_width,
            h: vec![h_bar; n],
            hu: vec![T::zero(); n],
            hv: vec![T::zero(); n],
            h_bar,
            t: T::zero(),
        }
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn x(&self, i: usize) -> T {
        self.x0 + (from_usize::<T>(i) + lit(0.5)) * self.dx
    }

    pub fn y(&self, j: usize) -> T {
        self.y0 + (from_usize::<T>(j) + lit(0.5)) * self.dy
    }

    /// Largest deviation from `(h̄, 0, 0)` on the outermost ring of cells.
    pub fn ring_deviation(&self) -> T {
        let mut worst = T::zero();
        for j in 0..self.ny {
            for i in 0..self.nx {
                if i != 0 && j != 0 && i + 1 != self.nx && j + 1 != self.ny {
                    continue;
                }
                let k = self.index(i, j);
                worst = worst
                    .max((self.h[k] - self.h_bar).abs())
                    .max(self.hu[k].abs())
                    .max(self.hv[k].abs());
            }
        }
        worst
    }

    pub fn audit(&self) -> Result<()> {
        let n = self.nx * self.ny;
        let mut problems = Vec::new();
        if self.nx < 4 || self.ny < 4 {
            problems.push(format!("grid {}x{} is too small", self.nx, self.ny));
        }
        if self.h.len() != n || self.hu.len() != n || self.hv.len() != n {
            problems.push("array lengths do not match nx*ny".into());
        }
        if !(self.dx > T::zero() && self.dy > T::zero()) {
            problems.push("spacings must be positive".into());
        }
        if !(self.h_bar > T::zero()) {
            problems.push(format!("h_bar must be positive, got {}", self.h_bar));
        }
        if let Some(k) = self.h.iter().position(|&h| !(h >= T::zero()) || !h.is_finite()) {
            problems.push(format!("depth at cell {k} is {}", self.h[k]));
        }
        if self.hu.iter().chain(&self.hv).any(|x| !x.is_finite()) {
            problems.push("non-finite momentum".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::PostCondition(problems.join("; ")))
        }
    }
}

/// Radial and angular moments, energy and mass excess, with the phase constants of the
/// closed-form moment evolution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MomentSet<T> {
    pub p1: T,
    pub p2: T,
    pub e: T,
    pub m: T,
    pub p: T,
    pub q: T,
}

impl<T: Real> MomentSet<T> {
    /// Sets `p = E + P₂` and `q = P₁`, the values that make the closed-form evolution start at
    /// `(P₁, P₂)`.
    pub fn new(p1: T, p2: T, e: T, m: T) -> Self {
        Self { p1, p2, e, m, p: e + p2, q: p1 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_grid_starts_at_half_cell() {
        let g = RadialGrid::new(0.0, 2.0, 8).unwrap();
        assert_eq!(g.dr(), 0.25);
        assert_eq!(g.center(0), 0.125);
        assert_eq!(g.face(8), 2.0);
        let s = RadialState::rest(&g, 1.0);
        s.audit().unwrap();
        assert_eq!(s.grid(), g);
    }

    #[test]
    fn audit_lists_every_problem() {
        let g = RadialGrid::new(0.0, 1.0, 4).unwrap();
        let mut s = RadialState::rest(&g, 1.0);
        s.h[2] = -1.0;
        s.h_bar = 0.0;
        let msg = s.audit().unwrap_err().to_string();
        assert!(msg.contains("depth at cell 2") && msg.contains("h_bar"));
    }

    #[test]
    fn planar_rest_ring() {
        let s = PlanarState::rest(1.0, 8, 8, 2.0);
        s.audit().unwrap();
        assert_eq!(s.ring_deviation(), 0.0);
        assert_eq!(s.x(0), -0.875);
        assert_eq!(s.index(3, 2), 19);
    }

    #[test]
    fn moment_phase_constants() {
        let m = MomentSet::new(0.5, 0.25, 2.0, 1.0);
        assert_eq!((m.p, m.q), (2.25, 0.5));
    }
}
