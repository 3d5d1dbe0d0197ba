//! Box domains, uniform grids, sampled functions, cube families, and
//! midpoint quadrature.
//!
//! All functions are represented by cell-centered samples over `[-L, L]^n`
//! and are extended by zero outside the box. Cubes are axis-aligned and
//! anchored to grid cells, so every cube is a union of whole cells; this
//! keeps averages and characteristic-function norms exactly computable from
//! the samples.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// A point in the box; only the first `dim` coordinates are meaningful.
pub type Point = [f64; 2];

/// Euclidean norm of the first `dim` coordinates.
pub fn point_norm(x: Point, dim: usize) -> f64 {
    if dim == 1 {
        math::abs(x[0])
    } else {
        math::hypot(x[0], x[1])
    }
}

/// Euclidean distance between two points.
pub fn point_dist(a: Point, b: Point, dim: usize) -> f64 {
    point_norm([a[0] - b[0], a[1] - b[1]], dim)
}

/// The computational domain `[-L, L]^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoxDomain {
    dim: usize,
    half_extent: f64,
}

impl BoxDomain {
    pub fn new(dim: usize, half_extent: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid("dim must be 1 or 2".into()));
        }
        if !(half_extent > 0.0) || !half_extent.is_finite() {
            return Err(Error::InvalidGrid("half_extent must be positive".into()));
        }
        Ok(BoxDomain { dim, half_extent })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn volume(&self) -> f64 {
        math::powi(2.0 * self.half_extent, self.dim as i32)
    }

    pub fn contains(&self, x: Point) -> bool {
        (0..self.dim).all(|k| math::abs(x[k]) <= self.half_extent)
    }
}

/// A uniform cell-centered grid with `N` cells per axis and spacing
/// `h = 2L/N`. Cell `i` along an axis is centered at `-L + (i + 1/2) h`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UniformGrid {
    domain: BoxDomain,
    points_per_axis: usize,
}

impl UniformGrid {
    pub fn new(domain: BoxDomain, points_per_axis: usize) -> Result<Self> {
        if points_per_axis < 4 {
            return Err(Error::InvalidGrid("need at least 4 cells per axis".into()));
        }
        Ok(UniformGrid {
            domain,
            points_per_axis,
        })
    }

    pub fn domain(&self) -> BoxDomain {
        self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.domain.half_extent / self.points_per_axis as f64
    }

    pub fn cell_volume(&self) -> f64 {
        math::powi(self.spacing(), self.dim() as i32)
    }

    pub fn node_count(&self) -> usize {
        let n = self.points_per_axis;
        if self.dim() == 1 {
            n
        } else {
            n * n
        }
    }

    /// Flat index of the multi-index `[i, j]` (row-major, last axis fastest).
    pub fn flat(&self, idx: [usize; 2]) -> usize {
        if self.dim() == 1 {
            idx[0]
        } else {
            idx[0] * self.points_per_axis + idx[1]
        }
    }

    pub fn multi(&self, flat: usize) -> [usize; 2] {
        if self.dim() == 1 {
            [flat, 0]
        } else {
            [flat / self.points_per_axis, flat % self.points_per_axis]
        }
    }

    fn axis_coord(&self, i: usize) -> f64 {
        -self.domain.half_extent + (i as f64 + 0.5) * self.spacing()
    }

    /// Coordinates of the center of cell `flat`.
    pub fn node(&self, flat: usize) -> Point {
        let idx = self.multi(flat);
        if self.dim() == 1 {
            [self.axis_coord(idx[0]), 0.0]
        } else {
            [self.axis_coord(idx[0]), self.axis_coord(idx[1])]
        }
    }

    /// Per-axis index ranges of cells whose centers lie in the closed box
    /// `[center - half_width, center + half_width]^dim` (intersected with the
    /// domain). An empty range on some axis means no cells qualify.
    pub fn cells_in_region(&self, center: Point, half_width: f64) -> [core::ops::Range<usize>; 2] {
        let n = self.points_per_axis;
        let h = self.spacing();
        let l = self.domain.half_extent;
        let mut out = [0..0usize, 0..1usize];
        for k in 0..self.dim() {
            // Cell center <-> fractional index: t = (c + L)/h - 1/2.
            let t_lo = (center[k] - half_width + l) / h - 0.5;
            let t_hi = (center[k] + half_width + l) / h - 0.5;
            let lo = math::ceil(snap(t_lo)) as i64;
            let hi = math::floor(snap(t_hi)) as i64;
            let lo = lo.max(0) as usize;
            if hi < lo as i64 {
                out[k] = 0..0;
            } else {
                out[k] = lo..(hi as usize + 1).min(n);
            }
        }
        if self.dim() == 1 {
            out[1] = 0..1;
        }
        out
    }
}

/// Snap values that sit within float fuzz of an integer onto it, so closed
/// boundaries behave as written.
fn snap(t: f64) -> f64 {
    let r = math::round(t);
    if math::abs(t - r) < 1e-9 * (1.0 + math::abs(t)) {
        r
    } else {
        t
    }
}

/// Real-valued cell-centered samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: UniformGrid,
    values: Vec<f64>,
}

impl GridFunction {
    /// Sample a closed form at every cell center.
    pub fn sample(grid: UniformGrid, f: impl Fn(Point) -> f64) -> GridFunction {
        let values = (0..grid.node_count()).map(|i| f(grid.node(i))).collect();
        GridFunction { grid, values }
    }

    pub fn from_values(grid: UniformGrid, values: Vec<f64>) -> Result<GridFunction> {
        if values.len() != grid.node_count() {
            return Err(Error::InvalidGrid("value count does not match grid".into()));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn zeros(grid: UniformGrid) -> GridFunction {
        GridFunction {
            grid,
            values: vec![0.0; grid.node_count()],
        }
    }

    pub fn constant(grid: UniformGrid, c: f64) -> GridFunction {
        GridFunction {
            grid,
            values: vec![c; grid.node_count()],
        }
    }

    /// Indicator of the closed box `[center - half, center + half]^dim`,
    /// sampled at cell centers.
    pub fn indicator(grid: UniformGrid, center: Point, half_width: f64) -> GridFunction {
        GridFunction::sample(grid, |x| {
            let inside = (0..grid.dim()).all(|k| math::abs(x[k] - center[k]) <= half_width);
            if inside {
                1.0
            } else {
                0.0
            }
        })
    }

    pub fn grid(&self) -> UniformGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<GridFunction> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch("grid functions on different grids".into()));
        }
        Ok(GridFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        self.map(|v| c * v)
    }

    pub fn abs(&self) -> GridFunction {
        self.map(math::abs)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, &v| m.max(math::abs(v)))
    }
}

/// An axis-aligned cube anchored at a grid cell, spanning `side_cells` whole
/// cells per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cube {
    pub anchor: [usize; 2],
    pub side_cells: usize,
}

impl Cube {
    pub fn new(anchor: [usize; 2], side_cells: usize) -> Cube {
        Cube { anchor, side_cells }
    }

    pub fn fits(&self, grid: &UniformGrid) -> bool {
        let n = grid.points_per_axis();
        self.side_cells >= 1
            && (0..grid.dim()).all(|k| self.anchor[k] + self.side_cells <= n)
            && (grid.dim() == 2 || self.anchor[1] == 0)
    }

    /// Side length `l(Q) = side_cells * h`.
    pub fn side_length(&self, grid: &UniformGrid) -> f64 {
        self.side_cells as f64 * grid.spacing()
    }

    /// Lebesgue measure `|Q| = (side_cells * h)^n`.
    pub fn measure(&self, grid: &UniformGrid) -> f64 {
        math::powi(self.side_length(grid), grid.dim() as i32)
    }

    pub fn cell_count(&self, grid: &UniformGrid) -> usize {
        if grid.dim() == 1 {
            self.side_cells
        } else {
            self.side_cells * self.side_cells
        }
    }

    pub fn center(&self, grid: &UniformGrid) -> Point {
        let h = grid.spacing();
        let l = grid.domain().half_extent();
        let c = |a: usize| -l + (a as f64 + self.side_cells as f64 / 2.0) * h;
        if grid.dim() == 1 {
            [c(self.anchor[0]), 0.0]
        } else {
            [c(self.anchor[0]), c(self.anchor[1])]
        }
    }

    /// Whether the closed cube region contains the point `x`.
    pub fn contains_point(&self, grid: &UniformGrid, x: Point) -> bool {
        let h = grid.spacing();
        let l = grid.domain().half_extent();
        (0..grid.dim()).all(|k| {
            let lo = -l + self.anchor[k] as f64 * h;
            let hi = lo + self.side_cells as f64 * h;
            let pad = 1e-12 * (1.0 + math::abs(x[k]));
            x[k] >= lo - pad && x[k] <= hi + pad
        })
    }

    /// Visit the flat index of every cell covered by the cube.
    pub fn for_each_cell(&self, grid: &UniformGrid, mut visit: impl FnMut(usize)) {
        let s = self.side_cells;
        if grid.dim() == 1 {
            for i in self.anchor[0]..self.anchor[0] + s {
                visit(i);
            }
        } else {
            let n = grid.points_per_axis();
            for i in self.anchor[0]..self.anchor[0] + s {
                let row = i * n;
                for j in self.anchor[1]..self.anchor[1] + s {
                    visit(row + j);
                }
            }
        }
    }
}

/// Enumeration policy for the finite cube family standing in for "all cubes".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CubePolicy {
    /// Every anchored cube of every side length.
    AllGridCubes,
    /// Sides 1, 2, 4, ... anchored at multiples of the side.
    Dyadic,
}

/// A family of cubes over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CubeFamily {
    pub policy: CubePolicy,
    pub max_side_cells: usize,
}

impl CubeFamily {
    pub fn all(max_side_cells: usize) -> CubeFamily {
        CubeFamily {
            policy: CubePolicy::AllGridCubes,
            max_side_cells,
        }
    }

    pub fn dyadic(max_side_cells: usize) -> CubeFamily {
        CubeFamily {
            policy: CubePolicy::Dyadic,
            max_side_cells,
        }
    }

    fn sides(&self, grid: &UniformGrid) -> Vec<usize> {
        let cap = self.max_side_cells.min(grid.points_per_axis()).max(1);
        match self.policy {
            CubePolicy::AllGridCubes => (1..=cap).collect(),
            CubePolicy::Dyadic => {
                let mut s = 1;
                let mut out = Vec::new();
                while s <= cap {
                    out.push(s);
                    s *= 2;
                }
                out
            }
        }
    }

    fn anchor_step(&self, side: usize) -> usize {
        match self.policy {
            CubePolicy::AllGridCubes => 1,
            CubePolicy::Dyadic => side,
        }
    }
}

/// Midpoint-rule integral over the whole domain.
pub fn integrate(f: &GridFunction) -> f64 {
    let vol = f.grid().cell_volume();
    f.values().iter().sum::<f64>() * vol
}

/// Mean of the cell values covered by `Q`, i.e. `|Q|^{-1} \int_Q f`.
pub fn cube_average(f: &GridFunction, q: &Cube) -> Result<f64> {
    let grid = f.grid();
    if !q.fits(&grid) {
        return Err(Error::CubeOutOfBounds);
    }
    let mut sum = 0.0;
    q.for_each_cell(&grid, |i| sum += f.values()[i]);
    Ok(sum / q.cell_count(&grid) as f64)
}

/// All cubes of the family, in deterministic order (side ascending, anchors
/// lexicographic). The list is duplicate-free.
pub fn enumerate_cubes(grid: &UniformGrid, fam: &CubeFamily) -> Vec<Cube> {
    let n = grid.points_per_axis();
    let mut out = Vec::new();
    for s in fam.sides(grid) {
        let step = fam.anchor_step(s);
        let mut a0 = 0;
        while a0 + s <= n {
            if grid.dim() == 1 {
                out.push(Cube::new([a0, 0], s));
            } else {
                let mut a1 = 0;
                while a1 + s <= n {
                    out.push(Cube::new([a0, a1], s));
                    a1 += step;
                }
            }
            a0 += step;
        }
    }
    out
}

/// All family cubes whose closed region contains `x`.
pub fn cubes_containing(grid: &UniformGrid, x: Point, fam: &CubeFamily) -> Result<Vec<Cube>> {
    if !grid.domain().contains(x) {
        return Err(Error::OutsideDomain);
    }
    let n = grid.points_per_axis();
    let h = grid.spacing();
    let l = grid.domain().half_extent();
    let mut out = Vec::new();
    for s in fam.sides(grid) {
        let step = fam.anchor_step(s);
        // Anchor range per axis: a <= t <= a + s where t = (x + L)/h.
        let mut ranges = [(0usize, 0usize); 2];
        let mut empty = false;
        for k in 0..grid.dim() {
            let t = snap((x[k] + l) / h);
            let lo = math::ceil(snap(t - s as f64)).max(0.0) as usize;
            let hi_f = math::floor(t);
            if hi_f < lo as f64 {
                empty = true;
                break;
            }
            let hi = (hi_f as usize).min(n - s);
            if lo > hi {
                empty = true;
                break;
            }
            ranges[k] = (lo, hi);
        }
        if empty {
            continue;
        }
        let aligned = |a: usize| a % step == 0;
        if grid.dim() == 1 {
            for a0 in ranges[0].0..=ranges[0].1 {
                if aligned(a0) {
                    out.push(Cube::new([a0, 0], s));
                }
            }
        } else {
            for a0 in ranges[0].0..=ranges[0].1 {
                if !aligned(a0) {
                    continue;
                }
                for a1 in ranges[1].0..=ranges[1].1 {
                    if aligned(a1) {
                        out.push(Cube::new([a0, a1], s));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Summed-area table for O(1) box sums over cube cells.
pub(crate) struct PrefixSums {
    grid: UniformGrid,
    table: Vec<f64>,
}

impl PrefixSums {
    pub(crate) fn new(f: &GridFunction) -> PrefixSums {
        PrefixSums::from_mapped(f, |v| v)
    }

    pub(crate) fn from_mapped(f: &GridFunction, map: impl Fn(f64) -> f64) -> PrefixSums {
        let grid = f.grid();
        let n = grid.points_per_axis();
        if grid.dim() == 1 {
            let mut table = vec![0.0; n + 1];
            for i in 0..n {
                table[i + 1] = table[i] + map(f.values()[i]);
            }
            PrefixSums { grid, table }
        } else {
            let mut table = vec![0.0; (n + 1) * (n + 1)];
            let w = n + 1;
            for i in 0..n {
                let mut row = 0.0;
                for j in 0..n {
                    row += map(f.values()[i * n + j]);
                    table[(i + 1) * w + (j + 1)] = table[i * w + (j + 1)] + row;
                }
            }
            PrefixSums { grid, table }
        }
    }

    /// Sum of the mapped values over the cube's cells.
    pub(crate) fn cube_sum(&self, q: &Cube) -> f64 {
        let s = q.side_cells;
        if self.grid.dim() == 1 {
            self.table[q.anchor[0] + s] - self.table[q.anchor[0]]
        } else {
            let w = self.grid.points_per_axis() + 1;
            let (i0, j0) = (q.anchor[0], q.anchor[1]);
            let (i1, j1) = (i0 + s, j0 + s);
            self.table[i1 * w + j1] - self.table[i0 * w + j1] - self.table[i1 * w + j0]
                + self.table[i0 * w + j0]
        }
    }

    pub(crate) fn cube_mean(&self, q: &Cube) -> f64 {
        self.cube_sum(q) / q.cell_count(&self.grid) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid1(n: usize, l: f64) -> UniformGrid {
        UniformGrid::new(BoxDomain::new(1, l).unwrap(), n).unwrap()
    }

    fn grid2(n: usize, l: f64) -> UniformGrid {
        UniformGrid::new(BoxDomain::new(2, l).unwrap(), n).unwrap()
    }

    #[test]
    fn integrate_constant_is_exact() {
        let g = grid1(8, 1.0);
        let f = GridFunction::constant(g, 1.0);
        assert_abs_diff_eq!(integrate(&f), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn integrate_odd_function_vanishes() {
        let g = grid1(64, 1.0);
        let f = GridFunction::sample(g, |x| x[0]);
        assert_abs_diff_eq!(integrate(&f), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn integrate_x_squared_refines_at_second_order() {
        // Richardson refinement oracle: error against 2/3 shrinks ~4x per halving.
        let exact = 2.0 / 3.0;
        let mut errs = Vec::new();
        for n in [16, 32, 64] {
            let g = grid1(n, 1.0);
            let f = GridFunction::sample(g, |x| x[0] * x[0]);
            errs.push((integrate(&f) - exact).abs());
        }
        for w in errs.windows(2) {
            let ratio = w[1] / w[0];
            assert!(ratio > 0.2 && ratio < 0.3, "ratio {ratio}");
        }
    }

    #[test]
    fn cube_average_of_constant_and_indicator() {
        let g = grid1(8, 2.0);
        let q = Cube::new([2, 0], 3);
        let c = GridFunction::constant(g, 5.5);
        assert_abs_diff_eq!(cube_average(&c, &q).unwrap(), 5.5, epsilon = 1e-15);
        let mut chi = GridFunction::zeros(g);
        let mut vals = chi.values().to_vec();
        q.for_each_cell(&g, |i| vals[i] = 1.0);
        chi = GridFunction::from_values(g, vals).unwrap();
        assert_abs_diff_eq!(cube_average(&chi, &q).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn cube_average_of_linear_function_hits_center() {
        let g = grid1(16, 2.0);
        let q = Cube::new([3, 0], 5);
        let f = GridFunction::sample(g, |x| 3.0 * x[0] - 1.0);
        let c = q.center(&g);
        assert_abs_diff_eq!(cube_average(&f, &q).unwrap(), 3.0 * c[0] - 1.0, epsilon = 1e-12);
    }

    #[test]
    fn enumerate_counts_match_combinatorics() {
        let g = grid1(4, 1.0);
        let all = enumerate_cubes(&g, &CubeFamily::all(4));
        assert_eq!(all.len(), 10); // 4 + 3 + 2 + 1
        let dy = enumerate_cubes(&g, &CubeFamily::dyadic(4));
        assert_eq!(dy.len(), 7); // 4 + 2 + 1
        let unit = enumerate_cubes(&g, &CubeFamily::all(1));
        assert_eq!(unit.len(), 4);
        let g2 = grid2(4, 1.0);
        let unit2 = enumerate_cubes(&g2, &CubeFamily::all(1));
        assert_eq!(unit2.len(), 16);
    }

    #[test]
    fn enumerate_is_duplicate_free() {
        let g = grid2(6, 1.0);
        for fam in [CubeFamily::all(6), CubeFamily::dyadic(6)] {
            let cubes = enumerate_cubes(&g, &fam);
            let mut seen = std::collections::HashSet::new();
            for c in &cubes {
                assert!(seen.insert((c.anchor, c.side_cells)));
                assert!(c.fits(&g));
            }
        }
    }

    #[test]
    fn cubes_containing_matches_brute_force() {
        let g = grid1(4, 1.0);
        let fam = CubeFamily::all(4);
        let x = [0.0, 0.0];
        let fast = cubes_containing(&g, x, &fam).unwrap();
        let brute: Vec<_> = enumerate_cubes(&g, &fam)
            .into_iter()
            .filter(|c| c.contains_point(&g, x))
            .collect();
        assert_eq!(fast, brute);
        // Corner cell: every returned cube must cover cell 0.
        let corner = [-0.99, 0.0];
        for c in cubes_containing(&g, corner, &fam).unwrap() {
            assert_eq!(c.anchor[0], 0);
        }
        // Domain center is inside the full-domain cube.
        assert!(fast.iter().any(|c| c.side_cells == 4));
        assert!(cubes_containing(&g, [5.0, 0.0], &fam).is_err());
    }

    #[test]
    fn cubes_containing_brute_force_2d() {
        let g = grid2(5, 1.5);
        let fam = CubeFamily::dyadic(4);
        for x in [[0.1, -0.2], [1.49, 1.49], [-0.33, 0.0]] {
            let fast = cubes_containing(&g, x, &fam).unwrap();
            let brute: Vec<_> = enumerate_cubes(&g, &fam)
                .into_iter()
                .filter(|c| c.contains_point(&g, x))
                .collect();
            assert_eq!(fast, brute, "x = {x:?}");
        }
    }

    #[test]
    fn prefix_sums_agree_with_direct_sums() {
        let g = grid2(7, 1.0);
        let f = GridFunction::sample(g, |x| x[0] * 2.0 + x[1] * x[1] + 0.3);
        let ps = PrefixSums::new(&f);
        for q in enumerate_cubes(&g, &CubeFamily::all(7)) {
            let mut direct = 0.0;
            q.for_each_cell(&g, |i| direct += f.values()[i]);
            assert_abs_diff_eq!(ps.cube_sum(&q), direct, epsilon = 1e-10);
        }
    }

    #[test]
    fn cube_average_times_measure_is_restricted_integral() {
        let g = grid1(12, 2.0);
        let f = GridFunction::sample(g, |x| (x[0] + 2.1) * 0.7);
        let q = Cube::new([4, 0], 5);
        let avg = cube_average(&f, &q).unwrap();
        let mut restricted = 0.0;
        q.for_each_cell(&g, |i| restricted += f.values()[i]);
        restricted *= g.cell_volume();
        assert_abs_diff_eq!(avg * q.measure(&g), restricted, epsilon = 1e-12);
    }

    #[test]
    fn integrate_is_monotone_and_linear() {
        let g = grid1(16, 1.0);
        let f = GridFunction::sample(g, |x| x[0].abs());
        let gfun = GridFunction::sample(g, |x| x[0].abs() + 0.25);
        assert!(integrate(&f) <= integrate(&gfun));
        let combo = f.zip_map(&gfun, |a, b| 2.0 * a + 3.0 * b).unwrap();
        assert_abs_diff_eq!(
            integrate(&combo),
            2.0 * integrate(&f) + 3.0 * integrate(&gfun),
            epsilon = 1e-12
        );
    }

    #[test]
    fn region_ranges_cover_expected_cells() {
        let g = grid1(8, 2.0); // h = 0.5, centers -1.75, -1.25, ...
        let r = g.cells_in_region([0.0, 0.0], 0.5);
        // centers within [-0.5, 0.5]: -0.25 (i=3) and 0.25 (i=4).
        assert_eq!(r[0], 3..5);
        let empty = g.cells_in_region([0.1, 0.0], 0.05);
        assert_eq!(empty[0].len(), 0);
    }
}
