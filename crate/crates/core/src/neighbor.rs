//! Uniform periodic cell grid used for contact search and floe placement.

use crate::model::{Domain, Vec2};

/// Square cells of side at least `min_cell`, tiling the periodic domain.
#[derive(Clone, Debug)]
pub struct CellGrid {
    ncell: usize,
    cell_size: f64,
    half_width: f64,
    cells: Vec<Vec<usize>>,
}

impl CellGrid {
    pub fn new(domain: &Domain, min_cell: f64) -> Self {
        let width = domain.width();
        let ncell = if min_cell > 0.0 {
            ((width / min_cell).floor() as usize).clamp(1, 4096)
        } else {
            1
        };
        CellGrid {
            ncell,
            cell_size: width / ncell as f64,
            half_width: domain.half_width,
            cells: vec![Vec::new(); ncell * ncell],
        }
    }

    pub fn cells_per_axis(&self) -> usize {
        self.ncell
    }

    fn axis_index(&self, c: f64) -> usize {
        let k = ((c + self.half_width) / self.cell_size).floor();
        (k.max(0.0) as usize).min(self.ncell - 1)
    }

    pub fn cell_of(&self, x: &Vec2) -> (usize, usize) {
        (self.axis_index(x.x), self.axis_index(x.y))
    }

    pub fn insert(&mut self, idx: usize, x: &Vec2) {
        let (cx, cy) = self.cell_of(x);
        self.cells[cy * self.ncell + cx].push(idx);
    }

    pub fn cell(&self, cx: usize, cy: usize) -> &[usize] {
        &self.cells[cy * self.ncell + cx]
    }

    /// Distinct cells of the 3x3 periodic stencil around `(cx, cy)`.
    ///
    /// With fewer than three cells per axis the stencil would revisit
    /// cells, so every cell is returned exactly once instead.
    pub fn stencil(&self, cx: usize, cy: usize) -> Stencil {
        let n = self.ncell;
        let mut out = Stencil {
            cells: [(0, 0); 9],
            len: 0,
        };
        if n < 3 {
            for y in 0..n {
                for x in 0..n {
                    out.cells[out.len] = (x, y);
                    out.len += 1;
                }
            }
            return out;
        }
        for dy in [n - 1, 0, 1] {
            for dx in [n - 1, 0, 1] {
                out.cells[out.len] = ((cx + dx) % n, (cy + dy) % n);
                out.len += 1;
            }
        }
        out
    }

    /// Indices stored in the stencil around the cell containing `x`.
    pub fn candidates(&self, x: &Vec2) -> impl Iterator<Item = usize> + '_ {
        let (cx, cy) = self.cell_of(x);
        let st = self.stencil(cx, cy);
        (0..st.len).flat_map(move |k| {
            let (sx, sy) = st.cells[k];
            self.cell(sx, sy).iter().copied()
        })
    }
}

/// At most nine stencil cells, without allocation.
#[derive(Clone, Copy, Debug)]
pub struct Stencil {
    cells: [(usize, usize); 9],
    len: usize,
}

impl Stencil {
    pub fn as_slice(&self) -> &[(usize, usize)] {
        &self.cells[..self.len]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencil_is_distinct() {
        let d = Domain::default();
        for min_cell in [0.1, 2.0, 2.5, 7.0] {
            let g = CellGrid::new(&d, min_cell);
            let mut s = g.stencil(0, g.cells_per_axis() - 1).as_slice().to_vec();
            let len = s.len();
            s.sort();
            s.dedup();
            assert_eq!(s.len(), len);
            assert!(g.cell_size >= min_cell.min(d.width()));
        }
    }

    #[test]
    fn edge_points_land_in_range() {
        let d = Domain::default();
        let g = CellGrid::new(&d, 0.5);
        let n = g.cells_per_axis();
        assert_eq!(g.cell_of(&Vec2::new(-d.half_width, -d.half_width)), (0, 0));
        let top = d.half_width - 1e-16;
        assert_eq!(g.cell_of(&Vec2::new(top, top)), (n - 1, n - 1));
    }
}
