use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::segment::point_segment_distance;
use super::winding::crossing_parity;
use super::{BBox, GeomError, Point};

const MAX_CELLS: usize = 1 << 24;

/// Square cells of side `h`; cell `(i, j)` covers
/// `[origin.x + i h, origin.x + (i+1) h] x [origin.y + j h, origin.y + (j+1) h]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: Point,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    /// Grid of cell size `h` covering `b` plus `margin` empty cells on every side.
    pub fn covering(b: &BBox, h: f64, margin: usize) -> Result<Self, GeomError> {
        if h.is_nan() || h <= 0.0 || !h.is_finite() {
            return Err(GeomError::InvalidRegion(format!("cell size {h}")));
        }
        let m = margin as f64 * h;
        let nx = ((b.width() + 2.0 * m) / h).ceil() as usize + 1;
        let ny = ((b.height() + 2.0 * m) / h).ceil() as usize + 1;
        if nx.saturating_mul(ny) > MAX_CELLS {
            return Err(GeomError::RasterTooLarge(nx.saturating_mul(ny)));
        }
        Ok(GridSpec { origin: Point::new(b.min.x - m, b.min.y - m), h, nx, ny })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn bbox(&self) -> BBox {
        BBox::new(
            self.origin,
            Point::new(self.origin.x + self.nx as f64 * self.h, self.origin.y + self.ny as f64 * self.h),
        )
    }

    pub fn center(&self, i: usize, j: usize) -> Point {
        Point::new(self.origin.x + (i as f64 + 0.5) * self.h, self.origin.y + (j as f64 + 0.5) * self.h)
    }

    pub fn cell_of(&self, p: Point) -> Option<(usize, usize)> {
        let fi = ((p.x - self.origin.x) / self.h).floor();
        let fj = ((p.y - self.origin.y) / self.h).floor();
        if fi < 0.0 || fj < 0.0 || fi >= self.nx as f64 || fj >= self.ny as f64 {
            None
        } else {
            Some((fi as usize, fj as usize))
        }
    }

    /// Inclusive cell-index range touched by a box, clamped to the grid.
    fn index_range(&self, b: &BBox) -> Option<(usize, usize, usize, usize)> {
        let lo_i = ((b.min.x - self.origin.x) / self.h).floor().max(0.0);
        let lo_j = ((b.min.y - self.origin.y) / self.h).floor().max(0.0);
        let hi_i = ((b.max.x - self.origin.x) / self.h).floor().min(self.nx as f64 - 1.0);
        let hi_j = ((b.max.y - self.origin.y) / self.h).floor().min(self.ny as f64 - 1.0);
        if hi_i < lo_i || hi_j < lo_j {
            None
        } else {
            Some((lo_i as usize, lo_j as usize, hi_i as usize, hi_j as usize))
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }
}

/// Occupancy grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RasterFile", into = "RasterFile")]
pub struct Raster {
    pub spec: GridSpec,
    cells: Vec<bool>,
}

/// On-disk form: one string per row (bottom row first), `#` occupied, `.` free.
#[derive(Serialize, Deserialize)]
struct RasterFile {
    origin: Point,
    h: f64,
    rows: Vec<String>,
}

impl TryFrom<RasterFile> for Raster {
    type Error = GeomError;
    fn try_from(f: RasterFile) -> Result<Self, GeomError> {
        let ny = f.rows.len();
        let nx = f.rows.first().map(|r| r.chars().count()).unwrap_or(0);
        if nx == 0 || f.rows.iter().any(|r| r.chars().count() != nx) {
            return Err(GeomError::InvalidRegion("raster rows must be non-empty and equal length".into()));
        }
        if f.h.is_nan() || f.h <= 0.0 || !f.origin.is_finite() {
            return Err(GeomError::InvalidRegion("raster needs a positive cell size".into()));
        }
        let spec = GridSpec { origin: f.origin, h: f.h, nx, ny };
        let mut r = Raster::empty(spec);
        for (j, row) in f.rows.iter().enumerate() {
            for (i, c) in row.chars().enumerate() {
                match c {
                    '#' => r.set(i, j, true),
                    '.' => {}
                    other => return Err(GeomError::InvalidRegion(format!("raster cell '{other}'"))),
                }
            }
        }
        Ok(r)
    }
}

impl From<Raster> for RasterFile {
    fn from(r: Raster) -> Self {
        let rows =
            (0..r.spec.ny).map(|j| (0..r.spec.nx).map(|i| if r.get(i, j) { '#' } else { '.' }).collect()).collect();
        RasterFile { origin: r.spec.origin, h: r.spec.h, rows }
    }
}

const N4: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
const N8: [(isize, isize); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

impl Raster {
    pub fn empty(spec: GridSpec) -> Self {
        Raster { spec, cells: vec![false; spec.len()] }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[self.spec.idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let k = self.spec.idx(i, j);
        self.cells[k] = v;
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.cells.iter().any(|&c| c)
    }

    pub fn occupied(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let nx = self.spec.nx;
        self.cells.iter().enumerate().filter(|(_, &c)| c).map(move |(k, _)| (k % nx, k / nx))
    }

    /// Whether the cell containing `p` is occupied (points off the grid are not).
    pub fn contains(&self, p: Point) -> bool {
        self.spec.cell_of(p).is_some_and(|(i, j)| self.get(i, j))
    }

    /// Bounding box of occupied cells (cell extents, not centers).
    pub fn occupied_bbox(&self) -> Option<BBox> {
        let h = self.spec.h;
        let mut b: Option<BBox> = None;
        for (i, j) in self.occupied() {
            let c = self.spec.center(i, j);
            let cell = BBox::square(c, h / 2.0);
            b = Some(match b {
                None => cell,
                Some(bb) => bb.union(&cell),
            });
        }
        b
    }

    /// Diameter of the occupied set measured between cell centers.
    pub fn diameter(&self) -> f64 {
        let pts: Vec<Point> = self.occupied().map(|(i, j)| self.spec.center(i, j)).collect();
        BBox::of_points(&pts).map_or(0.0, |b| b.diameter())
    }

    /// Mark every cell whose center lies within `h*sqrt(2)/2` of `[a, b]`,
    /// i.e. every cell the segment passes through.
    pub fn mark_segment(&mut self, a: Point, b: Point) {
        self.mark_segment_thick(a, b, 0.0);
    }

    /// Like [`Raster::mark_segment`] with an extra absolute thickness.
    pub fn mark_segment_thick(&mut self, a: Point, b: Point, extra: f64) {
        let r = self.spec.h * std::f64::consts::FRAC_1_SQRT_2 * (1.0 + 1e-9) + extra;
        let mut bb = BBox::new(a, a);
        bb.include(b);
        let Some((i0, j0, i1, j1)) = self.spec.index_range(&bb.expand(r)) else {
            return;
        };
        for j in j0..=j1 {
            for i in i0..=i1 {
                if point_segment_distance(self.spec.center(i, j), a, b) <= r {
                    self.set(i, j, true);
                }
            }
        }
    }

    pub fn mark_polyline(&mut self, pts: &[Point], closed: bool) {
        for w in pts.windows(2) {
            self.mark_segment(w[0], w[1]);
        }
        if closed && pts.len() > 2 {
            self.mark_segment(pts[pts.len() - 1], pts[0]);
        }
        if pts.len() == 1 {
            self.mark_segment(pts[0], pts[0]);
        }
    }

    /// Mark cells whose center is inside the polygon (even-odd rule).
    pub fn fill_polygon(&mut self, vertices: &[Point]) {
        let Some(bb) = BBox::of_points(vertices) else { return };
        let Some((i0, j0, i1, j1)) = self.spec.index_range(&bb) else { return };
        for j in j0..=j1 {
            for i in i0..=i1 {
                if crossing_parity(vertices, self.spec.center(i, j)) {
                    self.set(i, j, true);
                }
            }
        }
    }

    fn zip(&self, o: &Raster, op: impl Fn(bool, bool) -> bool) -> Raster {
        assert_eq!(self.spec, o.spec, "raster grids differ");
        Raster { spec: self.spec, cells: self.cells.iter().zip(&o.cells).map(|(&a, &b)| op(a, b)).collect() }
    }

    pub fn union(&self, o: &Raster) -> Raster {
        self.zip(o, |a, b| a || b)
    }

    pub fn intersection(&self, o: &Raster) -> Raster {
        self.zip(o, |a, b| a && b)
    }

    pub fn difference(&self, o: &Raster) -> Raster {
        self.zip(o, |a, b| a && !b)
    }

    pub fn complement(&self) -> Raster {
        Raster { spec: self.spec, cells: self.cells.iter().map(|c| !c).collect() }
    }

    pub fn intersects(&self, o: &Raster) -> bool {
        self.cells.iter().zip(&o.cells).any(|(&a, &b)| a && b)
    }

    fn neighbors<'a>(
        &self,
        i: usize,
        j: usize,
        offs: &'a [(isize, isize)],
    ) -> impl Iterator<Item = (usize, usize)> + 'a {
        let (nx, ny) = (self.spec.nx as isize, self.spec.ny as isize);
        offs.iter().filter_map(move |&(di, dj)| {
            let (a, b) = (i as isize + di, j as isize + dj);
            (a >= 0 && b >= 0 && a < nx && b < ny).then_some((a as usize, b as usize))
        })
    }

    fn flood(
        &self,
        seeds: impl IntoIterator<Item = (usize, usize)>,
        free: impl Fn(usize, usize) -> bool,
        offs: &[(isize, isize)],
    ) -> Raster {
        let mut seen = Raster::empty(self.spec);
        let mut q = VecDeque::new();
        for (i, j) in seeds {
            if free(i, j) && !seen.get(i, j) {
                seen.set(i, j, true);
                q.push_back((i, j));
            }
        }
        while let Some((i, j)) = q.pop_front() {
            for (a, b) in self.neighbors(i, j, offs) {
                if free(a, b) && !seen.get(a, b) {
                    seen.set(a, b, true);
                    q.push_back((a, b));
                }
            }
        }
        seen
    }

    /// Free cells 4-connected to the grid border (the unbounded complementary
    /// component, assuming the grid has an empty margin).
    pub fn reach_from_infinity(&self) -> Raster {
        let (nx, ny) = (self.spec.nx, self.spec.ny);
        let border =
            (0..nx).flat_map(move |i| [(i, 0), (i, ny - 1)]).chain((0..ny).flat_map(move |j| [(0, j), (nx - 1, j)]));
        self.flood(border, |i, j| !self.get(i, j), &N4)
    }

    /// Free cells not reachable from infinity: the bounded complementary components.
    pub fn bounded_complement(&self) -> Raster {
        let outside = self.reach_from_infinity();
        self.complement().difference(&outside)
    }

    /// Whether the occupied set leaves a bounded complementary component.
    pub fn separates_plane(&self) -> bool {
        !self.bounded_complement().is_empty()
    }

    /// Topological hull: the occupied set plus its bounded complementary components.
    pub fn hull(&self) -> Raster {
        self.reach_from_infinity().complement()
    }

    /// 8-connected components of the occupied set, in scan order of their first cell.
    pub fn components(&self) -> Vec<Raster> {
        let mut done = Raster::empty(self.spec);
        let mut out = Vec::new();
        for (i, j) in self.occupied().collect::<Vec<_>>() {
            if done.get(i, j) {
                continue;
            }
            let comp = self.flood([(i, j)], |a, b| self.get(a, b), &N8);
            done = done.union(&comp);
            out.push(comp);
        }
        out
    }

    /// Cells within `k` steps (8-neighborhood) of the occupied set.
    pub fn dilate(&self, k: usize) -> Raster {
        let mut cur = self.clone();
        for _ in 0..k {
            let mut next = cur.clone();
            for (i, j) in cur.occupied().collect::<Vec<_>>() {
                for (a, b) in cur.neighbors(i, j, &N8) {
                    next.set(a, b, true);
                }
            }
            cur = next;
        }
        cur
    }

    /// 4-connected components of the free set.
    pub fn free_components(&self) -> Vec<Raster> {
        self.complement().components4()
    }

    fn components4(&self) -> Vec<Raster> {
        let mut done = Raster::empty(self.spec);
        let mut out = Vec::new();
        for (i, j) in self.occupied().collect::<Vec<_>>() {
            if done.get(i, j) {
                continue;
            }
            let comp = self.flood([(i, j)], |a, b| self.get(a, b), &N4);
            done = done.union(&comp);
            out.push(comp);
        }
        out
    }

    /// Free cells 4-connected to the cell containing `p`.
    pub fn free_component_of(&self, p: Point) -> Option<Raster> {
        let (i, j) = self.spec.cell_of(p)?;
        if self.get(i, j) {
            return None;
        }
        Some(self.flood([(i, j)], |a, b| !self.get(a, b), &N4))
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Shortest 8-connected path of occupied cells from `from` to `to`.
    pub fn path(&self, from: (usize, usize), to: (usize, usize)) -> Option<Vec<(usize, usize)>> {
        if !self.get(from.0, from.1) || !self.get(to.0, to.1) {
            return None;
        }
        let mut prev = vec![usize::MAX; self.spec.len()];
        let start = self.spec.idx(from.0, from.1);
        prev[start] = start;
        let mut q = VecDeque::from([from]);
        while let Some((i, j)) = q.pop_front() {
            if (i, j) == to {
                let mut path = vec![to];
                let mut k = self.spec.idx(i, j);
                while k != start {
                    k = prev[k];
                    path.push((k % self.spec.nx, k / self.spec.nx));
                }
                path.reverse();
                return Some(path);
            }
            for (a, b) in self.neighbors(i, j, &N8) {
                let k = self.spec.idx(a, b);
                if self.get(a, b) && prev[k] == usize::MAX {
                    prev[k] = self.spec.idx(i, j);
                    q.push_back((a, b));
                }
            }
        }
        None
    }

    /// Occupied cell nearest to `p` (by center distance) and that distance.
    pub fn nearest_occupied(&self, p: Point) -> Option<((usize, usize), f64)> {
        self.occupied().map(|(i, j)| ((i, j), self.spec.center(i, j).dist(p))).min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> GridSpec {
        GridSpec::covering(&BBox::square(Point::ORIGIN, 2.0), 4.0 / n as f64, 2).unwrap()
    }

    #[test]
    fn circle_outline_separates() {
        let mut r = Raster::empty(grid(64));
        let c = crate::geometry::PlaneCurve::circle(Point::ORIGIN, 1.0, 64);
        r.mark_polyline(&c.vertices, true);
        assert!(r.separates_plane());
        let inner = r.bounded_complement();
        assert!(inner.contains(Point::ORIGIN));
        assert!(!inner.contains(Point::new(1.8, 0.0)));
        assert!(r.is_connected());
    }

    #[test]
    fn diagonal_segment_blocks_four_connectivity() {
        let mut r = Raster::empty(grid(40));
        // closed triangle with slanted sides
        let tri = [Point::new(-1.3, -1.1), Point::new(1.2, -0.9), Point::new(0.1, 1.4)];
        r.mark_polyline(&tri, true);
        assert!(r.bounded_complement().contains(Point::new(0.0, -0.2)));
    }

    #[test]
    fn path_follows_occupied_cells() {
        let mut r = Raster::empty(grid(32));
        r.mark_segment(Point::new(-1.0, -1.0), Point::new(1.0, 1.0));
        let a = r.spec.cell_of(Point::new(-1.0, -1.0)).unwrap();
        let b = r.spec.cell_of(Point::new(1.0, 1.0)).unwrap();
        let p = r.path(a, b).unwrap();
        assert!(p.iter().all(|&(i, j)| r.get(i, j)));
    }

    #[test]
    fn file_round_trip() {
        let mut r = Raster::empty(GridSpec { origin: Point::ORIGIN, h: 0.5, nx: 3, ny: 2 });
        r.set(1, 0, true);
        let s = serde_json::to_string(&r).unwrap();
        let back: Raster = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
