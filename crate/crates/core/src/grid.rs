//! Uniform Cartesian grid and the conservative flow field stored on it.
//!
//! Nodes are indexed `(l, p)` with `0 <= l <= mx` along x and `0 <= p <= my`
//! along y. Fields are flat, node-centered and row-major with x contiguous:
//! node `(l, p)` lives at `p * (mx + 1) + l`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Smallest cell count per axis: the interior `2..=m-2` must hold at least one
/// node, and five-point stencils centered there must stay on the grid.
pub const MIN_CELLS: usize = 5;

/// Number of pinned layers on each side of the grid.
pub const BOUNDARY_LAYERS: usize = 2;

/// Grid construction and indexing failures.
#[derive(Debug, Clone, PartialEq)]
pub enum GridError {
    /// Fewer than [`MIN_CELLS`] cells along an axis.
    TooFewCells {
        /// Axis name, `"x"` or `"y"`.
        axis: &'static str,
        /// Requested cell count.
        cells: usize,
    },
    /// Domain length or spacing not strictly positive (or not finite).
    NonPositiveExtent {
        /// Axis name, `"x"` or `"y"`.
        axis: &'static str,
        /// Offending value.
        value: f64,
    },
    /// Node index outside `0..=mx` x `0..=my`.
    OutOfRange {
        /// Requested x index.
        l: usize,
        /// Requested y index.
        p: usize,
    },
    /// A field did not have one entry per node.
    FieldLength {
        /// Required length.
        expected: usize,
        /// Length supplied.
        found: usize,
    },
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::TooFewCells { axis, cells } => write!(
                f,
                "{axis}-axis needs at least {MIN_CELLS} cells, got {cells}"
            ),
            GridError::NonPositiveExtent { axis, value } => {
                write!(f, "{axis}-axis extent must be positive and finite, got {value}")
            }
            GridError::OutOfRange { l, p } => write!(f, "node ({l}, {p}) is outside the grid"),
            GridError::FieldLength { expected, found } => {
                write!(f, "field has {found} entries, grid has {expected} nodes")
            }
        }
    }
}

impl core::error::Error for GridError {}

/// Uniform grid of `(mx + 1) x (my + 1)` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x0: f64,
    y0: f64,
    lx: f64,
    ly: f64,
    mx: usize,
    my: usize,
    dx: f64,
    dy: f64,
}

fn check_cells(axis: &'static str, cells: usize) -> Result<(), GridError> {
    if cells < MIN_CELLS {
        return Err(GridError::TooFewCells { axis, cells });
    }
    Ok(())
}

fn check_positive(axis: &'static str, value: f64) -> Result<(), GridError> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(GridError::NonPositiveExtent { axis, value });
    }
    Ok(())
}

impl Grid {
    /// Grid over `[x0, x0 + lx] x [y0, y0 + ly]` with `mx` by `my` cells.
    pub fn new(x0: f64, y0: f64, lx: f64, ly: f64, mx: usize, my: usize) -> Result<Self, GridError> {
        check_positive("x", lx)?;
        check_positive("y", ly)?;
        check_cells("x", mx)?;
        check_cells("y", my)?;
        Ok(Self {
            x0,
            y0,
            lx,
            ly,
            mx,
            my,
            dx: lx / mx as f64,
            dy: ly / my as f64,
        })
    }

    /// Grid with prescribed spacings; the extents become `mx * dx` and `my * dy`.
    ///
    /// Use this when the spacing is the given quantity and must be held exactly.
    pub fn with_spacing(
        x0: f64,
        y0: f64,
        dx: f64,
        dy: f64,
        mx: usize,
        my: usize,
    ) -> Result<Self, GridError> {
        check_positive("x", dx)?;
        check_positive("y", dy)?;
        check_cells("x", mx)?;
        check_cells("y", my)?;
        Ok(Self {
            x0,
            y0,
            lx: dx * mx as f64,
            ly: dy * my as f64,
            mx,
            my,
            dx,
            dy,
        })
    }

    /// Origin x coordinate.
    pub fn x0(&self) -> f64 {
        self.x0
    }
    /// Origin y coordinate.
    pub fn y0(&self) -> f64 {
        self.y0
    }
    /// Domain length along x.
    pub fn lx(&self) -> f64 {
        self.lx
    }
    /// Domain length along y.
    pub fn ly(&self) -> f64 {
        self.ly
    }
    /// Cell count along x (`Mx`).
    pub fn mx(&self) -> usize {
        self.mx
    }
    /// Cell count along y (`My`).
    pub fn my(&self) -> usize {
        self.my
    }
    /// Spacing along x.
    pub fn dx(&self) -> f64 {
        self.dx
    }
    /// Spacing along y.
    pub fn dy(&self) -> f64 {
        self.dy
    }
    /// Nodes per row (`Mx + 1`).
    #[inline]
    pub fn nx(&self) -> usize {
        self.mx + 1
    }
    /// Nodes per column (`My + 1`).
    #[inline]
    pub fn ny(&self) -> usize {
        self.my + 1
    }
    /// Total node count.
    #[inline]
    pub fn len(&self) -> usize {
        self.nx() * self.ny()
    }
    /// Always false: a valid grid has at least 36 nodes.
    pub fn is_empty(&self) -> bool {
        false
    }
    /// Flat index of node `(l, p)`; no bounds check.
    #[inline]
    pub fn idx(&self, l: usize, p: usize) -> usize {
        p * self.nx() + l
    }
    /// x coordinate of column `l`.
    #[inline]
    pub fn x(&self, l: usize) -> f64 {
        self.x0 + l as f64 * self.dx
    }
    /// y coordinate of row `p`.
    #[inline]
    pub fn y(&self, p: usize) -> f64 {
        self.y0 + p as f64 * self.dy
    }

    /// Classify node `(l, p)`.
    pub fn classify(&self, l: usize, p: usize) -> Result<NodeClass, GridError> {
        if l > self.mx || p > self.my {
            return Err(GridError::OutOfRange { l, p });
        }
        let inner = |i: usize, m: usize| i >= BOUNDARY_LAYERS && i <= m - BOUNDARY_LAYERS;
        if inner(l, self.mx) && inner(p, self.my) {
            Ok(NodeClass::Interior)
        } else {
            Ok(NodeClass::BoundaryLayer)
        }
    }

    /// Inclusive interior index range along x, `2..=mx-2`.
    #[inline]
    pub fn interior_l(&self) -> core::ops::RangeInclusive<usize> {
        BOUNDARY_LAYERS..=self.mx - BOUNDARY_LAYERS
    }

    /// Inclusive interior index range along y, `2..=my-2`.
    #[inline]
    pub fn interior_p(&self) -> core::ops::RangeInclusive<usize> {
        BOUNDARY_LAYERS..=self.my - BOUNDARY_LAYERS
    }

    /// `(Mx - 3)(My - 3)`.
    pub fn interior_count(&self) -> usize {
        (self.mx - 3) * (self.my - 3)
    }

    /// Visit every boundary-layer node once, row by row.
    pub fn for_each_boundary_node(&self, mut f: impl FnMut(usize, usize)) {
        let (mx, my) = (self.mx, self.my);
        for p in 0..=my {
            if p < BOUNDARY_LAYERS || p > my - BOUNDARY_LAYERS {
                for l in 0..=mx {
                    f(l, p);
                }
            } else {
                for l in (0..BOUNDARY_LAYERS).chain(mx - BOUNDARY_LAYERS + 1..=mx) {
                    f(l, p);
                }
            }
        }
    }
}

/// Whether a node is updated by the scheme or pinned by boundary data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeClass {
    /// `2 <= l <= Mx-2` and `2 <= p <= My-2`.
    Interior,
    /// One of the two outermost layers on some side.
    BoundaryLayer,
}

/// Depth and depth-averaged velocities at one node.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Primitive {
    /// Water depth (m).
    pub h: f64,
    /// x velocity (m/s).
    pub u: f64,
    /// y velocity (m/s).
    pub v: f64,
}

impl Primitive {
    /// Construct from components.
    pub const fn new(h: f64, u: f64, v: f64) -> Self {
        Self { h, u, v }
    }

    /// Conservative triple `(h, hu, hv)`.
    #[inline]
    pub fn conservative(self) -> [f64; 3] {
        [self.h, self.h * self.u, self.h * self.v]
    }

    /// True when every component is finite.
    pub fn is_finite(self) -> bool {
        self.h.is_finite() && self.u.is_finite() && self.v.is_finite()
    }
}

/// Velocity of a conserved momentum, zero on dry nodes.
#[inline]
pub fn masked_velocity(h: f64, momentum: f64, h_eps: f64) -> f64 {
    if h >= h_eps {
        momentum / h
    } else {
        0.0
    }
}

/// Conservative field `(h, hu, hv)` on every node, plus its time.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    /// Grid the fields live on.
    pub grid: Grid,
    /// Depth (m).
    pub h: Vec<f64>,
    /// x momentum (m^2/s).
    pub hu: Vec<f64>,
    /// y momentum (m^2/s).
    pub hv: Vec<f64>,
    /// Simulation time (s, or the scenario's time unit).
    pub t: f64,
}

impl FlowState {
    /// All-zero (dry, still) state.
    pub fn zeros(grid: Grid, t: f64) -> Self {
        let n = grid.len();
        Self {
            grid,
            h: vec![0.0; n],
            hu: vec![0.0; n],
            hv: vec![0.0; n],
            t,
        }
    }

    /// State from conservative arrays.
    pub fn from_conservative(
        grid: Grid,
        t: f64,
        h: Vec<f64>,
        hu: Vec<f64>,
        hv: Vec<f64>,
    ) -> Result<Self, GridError> {
        for len in [h.len(), hu.len(), hv.len()] {
            if len != grid.len() {
                return Err(GridError::FieldLength {
                    expected: grid.len(),
                    found: len,
                });
            }
        }
        Ok(Self { grid, h, hu, hv, t })
    }

    /// Sample `(h, u, v)` from a function of node coordinates.
    pub fn from_fn(grid: Grid, t: f64, mut f: impl FnMut(f64, f64) -> Primitive) -> Self {
        let mut s = Self::zeros(grid, t);
        for p in 0..grid.ny() {
            let y = grid.y(p);
            for l in 0..grid.nx() {
                let [h, hu, hv] = f(grid.x(l), y).conservative();
                let i = grid.idx(l, p);
                s.h[i] = h;
                s.hu[i] = hu;
                s.hv[i] = hv;
            }
        }
        s
    }

    /// Conservative triple at flat index `i`.
    #[inline]
    pub fn cons(&self, i: usize) -> [f64; 3] {
        [self.h[i], self.hu[i], self.hv[i]]
    }

    /// Write a conservative triple at flat index `i`.
    #[inline]
    pub fn set_cons(&mut self, i: usize, q: [f64; 3]) {
        self.h[i] = q[0];
        self.hu[i] = q[1];
        self.hv[i] = q[2];
    }

    /// Primitive triple at flat index `i` with dry masking.
    #[inline]
    pub fn primitive(&self, i: usize, h_eps: f64) -> Primitive {
        let h = self.h[i];
        Primitive {
            h,
            u: masked_velocity(h, self.hu[i], h_eps),
            v: masked_velocity(h, self.hv[i], h_eps),
        }
    }

    /// Velocity fields `(u, v)`; zero wherever `h < h_eps`.
    pub fn primitive_velocities(&self, h_eps: f64) -> (Vec<f64>, Vec<f64>) {
        let u = self
            .h
            .iter()
            .zip(&self.hu)
            .map(|(&h, &m)| masked_velocity(h, m, h_eps))
            .collect();
        let v = self
            .h
            .iter()
            .zip(&self.hv)
            .map(|(&h, &m)| masked_velocity(h, m, h_eps))
            .collect();
        (u, v)
    }

    /// First node (in storage order) holding a non-finite value.
    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        let nx = self.grid.nx();
        (0..self.grid.len())
            .find(|&i| !(self.h[i].is_finite() && self.hu[i].is_finite() && self.hv[i].is_finite()))
            .map(|i| (i % nx, i / nx))
    }

    /// True when every entry of every field is finite.
    pub fn is_finite(&self) -> bool {
        self.first_non_finite().is_none()
    }

    /// `h := max(h, 0)` on every node.
    pub fn clamp_depth(&mut self) {
        for h in &mut self.h {
            if *h < 0.0 {
                *h = 0.0;
            }
        }
    }

    /// Largest depth and largest speed components over all nodes.
    pub fn maxima(&self, h_eps: f64) -> (f64, f64, f64) {
        let mut out = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..self.grid.len() {
            let q = self.primitive(i, h_eps);
            out.0 = out.0.max(q.h);
            out.1 = out.1.max(q.u.abs());
            out.2 = out.2.max(q.v.abs());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basin_grid_spacing() {
        let g = Grid::new(0.0, 0.0, 4.0, 4.0, 36, 36).unwrap();
        assert!((g.dx() - 1.0 / 9.0).abs() < 1e-15);
        assert!((g.dy() - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn smallest_grid_has_four_interior_nodes() {
        let g = Grid::new(0.0, 0.0, 1.0, 1.0, 5, 5).unwrap();
        assert!((g.dx() - 0.2).abs() < 1e-15);
        // 2..=Mx-2 is {2, 3} on each axis.
        assert_eq!(g.interior_count(), 4);
        assert_eq!(g.classify(2, 2).unwrap(), NodeClass::Interior);
        assert_eq!(g.classify(3, 3).unwrap(), NodeClass::Interior);
        assert_eq!(g.classify(4, 2).unwrap(), NodeClass::BoundaryLayer);
    }

    #[test]
    fn river_mesh_spacing() {
        let g = Grid::new(0.0, 0.0, 80_000.0, 1_000_000.0, 9000, 80906).unwrap();
        assert!((g.dx() - 8.89).abs() < 5e-3);
        assert!((g.dy() - 12.36).abs() < 5e-3);
    }

    #[test]
    fn rejects_small_or_degenerate_grids() {
        assert!(matches!(
            Grid::new(0.0, 0.0, 1.0, 1.0, 4, 10),
            Err(GridError::TooFewCells { axis: "x", cells: 4 })
        ));
        assert!(matches!(
            Grid::new(0.0, 0.0, 1.0, 1.0, 10, 3),
            Err(GridError::TooFewCells { axis: "y", .. })
        ));
        assert!(matches!(
            Grid::new(0.0, 0.0, 0.0, 1.0, 10, 10),
            Err(GridError::NonPositiveExtent { .. })
        ));
        assert!(Grid::new(0.0, 0.0, 1.0, -2.0, 10, 10).is_err());
        assert!(Grid::new(0.0, 0.0, f64::NAN, 1.0, 10, 10).is_err());
    }

    #[test]
    fn classification_edges() {
        let g = Grid::new(0.0, 0.0, 1.0, 1.0, 10, 10).unwrap();
        assert_eq!(g.classify(2, 2).unwrap(), NodeClass::Interior);
        assert_eq!(g.classify(1, 5).unwrap(), NodeClass::BoundaryLayer);
        assert_eq!(g.classify(8, 8).unwrap(), NodeClass::Interior);
        assert_eq!(g.classify(9, 8).unwrap(), NodeClass::BoundaryLayer);
        assert!(matches!(g.classify(11, 0), Err(GridError::OutOfRange { .. })));
    }

    #[test]
    fn classes_partition_the_grid() {
        let g = Grid::new(0.0, 0.0, 1.0, 2.0, 7, 12).unwrap();
        let mut interior = 0;
        let mut boundary = 0;
        for p in 0..g.ny() {
            for l in 0..g.nx() {
                match g.classify(l, p).unwrap() {
                    NodeClass::Interior => interior += 1,
                    NodeClass::BoundaryLayer => boundary += 1,
                }
            }
        }
        assert_eq!(interior, g.interior_count());
        assert_eq!(interior + boundary, g.len());
        let mut visited = 0;
        g.for_each_boundary_node(|l, p| {
            assert_eq!(g.classify(l, p).unwrap(), NodeClass::BoundaryLayer);
            visited += 1;
        });
        assert_eq!(visited, boundary);
    }

    #[test]
    fn node_coordinates_are_evenly_spaced() {
        let g = Grid::new(-3.0, 1.5, 7.3, 2.0, 97, 13).unwrap();
        for l in 0..g.mx() {
            assert!((g.x(l + 1) - g.x(l) - g.dx()).abs() < 1e-12 * g.lx());
        }
        assert!((g.x(g.mx()) - (g.x0() + g.lx())).abs() < 1e-12 * g.lx());
    }

    #[test]
    fn velocities_divide_and_mask() {
        let g = Grid::new(0.0, 0.0, 1.0, 1.0, 5, 5).unwrap();
        let mut s = FlowState::zeros(g, 0.0);
        s.set_cons(0, [2.0, 6.0, 2.0]);
        s.set_cons(1, [0.0, 0.0, 0.0]);
        s.set_cons(2, [1e-9, 1e-3, 1e-3]);
        let (u, v) = s.primitive_velocities(1e-6);
        assert_eq!((u[0], v[0]), (3.0, 1.0));
        assert_eq!((u[1], v[1]), (0.0, 0.0));
        assert_eq!((u[2], v[2]), (0.0, 0.0));
    }

    #[test]
    fn non_finite_is_located() {
        let g = Grid::new(0.0, 0.0, 1.0, 1.0, 5, 5).unwrap();
        let mut s = FlowState::zeros(g, 0.0);
        assert!(s.is_finite());
        s.hv[g.idx(3, 4)] = f64::NAN;
        assert_eq!(s.first_non_finite(), Some((3, 4)));
    }
}
