//! One-dimensional finite-difference operators applied along either grid axis.
//!
//! | kind | offsets | weights (times `1/(d Δ)`) | order |
//! |------|---------|---------------------------|-------|
//! | `C2` | -1..=1  | `-1, 0, 1` / 2            | 2     |
//! | `C4` | -2..=2  | `1, -8, 0, 8, -1` / 12    | 4     |
//! | `F3` | -1..=2  | `-2, -3, 6, -1` / 6       | 3     |
//! | `B3` | -2..=1  | `1, -6, 3, 2` / 6         | 3     |
//!
//! `C4 = (F3 + B3) / 2` holds exactly at the coefficient level.
//!
//! The upwind pair `(w F3/B3 ψ)` composite is the centered difference of
//! `w · B3ψ` at the right neighbour and `w · F3ψ` at the left neighbour:
//!
//! ```text
//! [w(i+1) B3ψ(i+1) - w(i-1) F3ψ(i-1)] / (2Δ)
//! ```
//!
//! Footprint audit: `B3` at `i+1` reads `i-1..=i+2`; `F3` at `i-1` reads
//! `i-2..=i+1`. The union is `i-2..=i+2`, the same as `C4`, so the composite
//! is defined on the whole interior `2..=M-2` without special cases.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::grid::{Grid, GridError};

/// Direction a difference operator acts along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    /// Along `l` (contiguous in memory).
    X,
    /// Along `p` (stride `Mx + 1`).
    Y,
}

/// The four one-dimensional difference operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StencilKind {
    /// Centered, second order.
    C2,
    /// Centered, fourth order.
    C4,
    /// Forward-biased, third order.
    F3,
    /// Backward-biased, third order.
    B3,
}

impl StencilKind {
    /// All kinds, for table-driven tests.
    pub const ALL: [StencilKind; 4] = [Self::C2, Self::C4, Self::F3, Self::B3];

    /// First offset of the footprint.
    pub const fn first_offset(self) -> isize {
        match self {
            Self::C2 | Self::F3 => -1,
            Self::C4 | Self::B3 => -2,
        }
    }

    /// Integer weights, starting at [`first_offset`](Self::first_offset).
    pub const fn weights(self) -> &'static [f64] {
        match self {
            Self::C2 => &[-1.0, 0.0, 1.0],
            Self::C4 => &[1.0, -8.0, 0.0, 8.0, -1.0],
            Self::F3 => &[-2.0, -3.0, 6.0, -1.0],
            Self::B3 => &[1.0, -6.0, 3.0, 2.0],
        }
    }

    /// Common denominator `d` of the weights.
    pub const fn denominator(self) -> f64 {
        match self {
            Self::C2 => 2.0,
            Self::C4 => 12.0,
            Self::F3 | Self::B3 => 6.0,
        }
    }

    /// Last offset of the footprint.
    pub const fn last_offset(self) -> isize {
        self.first_offset() + self.weights().len() as isize - 1
    }

    /// Formal order of accuracy.
    pub const fn order(self) -> u32 {
        match self {
            Self::C2 => 2,
            Self::C4 => 4,
            Self::F3 | Self::B3 => 3,
        }
    }
}

/// Stencil evaluation failures.
#[derive(Debug, Clone, PartialEq)]
pub enum StencilError {
    /// The footprint centered at `(l, p)` leaves the grid.
    Footprint {
        /// Operator requested.
        kind: StencilKind,
        /// Axis requested.
        axis: Axis,
        /// x index.
        l: usize,
        /// y index.
        p: usize,
    },
    /// A field does not match the grid.
    Grid(GridError),
}

impl fmt::Display for StencilError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StencilError::Footprint { kind, axis, l, p } => write!(
                f,
                "{kind:?} along {axis:?} at ({l}, {p}) reaches outside the grid"
            ),
            StencilError::Grid(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for StencilError {}

impl From<GridError> for StencilError {
    fn from(e: GridError) -> Self {
        StencilError::Grid(e)
    }
}

/// Memory stride and spacing for an axis.
#[inline]
pub(crate) fn axis_layout(grid: &Grid, axis: Axis) -> (usize, f64) {
    match axis {
        Axis::X => (1, grid.dx()),
        Axis::Y => (grid.nx(), grid.dy()),
    }
}

/// Raw weighted sum of `kind` centered at flat index `i` with the given stride,
/// not yet divided by `d Δ`. The caller guarantees the footprint is in bounds.
#[inline(always)]
pub(crate) fn weighted_sum(data: &[f64], i: usize, stride: usize, kind: StencilKind) -> f64 {
    match kind {
        StencilKind::C2 => data[i + stride] - data[i - stride],
        StencilKind::C4 => {
            data[i - 2 * stride] - data[i + 2 * stride]
                + 8.0 * (data[i + stride] - data[i - stride])
        }
        StencilKind::F3 => {
            -2.0 * data[i - stride] - 3.0 * data[i] + 6.0 * data[i + stride]
                - data[i + 2 * stride]
        }
        StencilKind::B3 => {
            data[i - 2 * stride] - 6.0 * data[i - stride] + 3.0 * data[i]
                + 2.0 * data[i + stride]
        }
    }
}

/// Difference operator applied to `data` at flat index `i`.
#[inline(always)]
pub(crate) fn diff(data: &[f64], i: usize, stride: usize, kind: StencilKind, delta: f64) -> f64 {
    weighted_sum(data, i, stride, kind) / (kind.denominator() * delta)
}

fn check_field(grid: &Grid, field: &[f64]) -> Result<(), GridError> {
    if field.len() != grid.len() {
        return Err(GridError::FieldLength {
            expected: grid.len(),
            found: field.len(),
        });
    }
    Ok(())
}

fn footprint_ok(grid: &Grid, axis: Axis, first: isize, last: isize, l: usize, p: usize) -> bool {
    if l > grid.mx() || p > grid.my() {
        return false;
    }
    let (i, m) = match axis {
        Axis::X => (l as isize, grid.mx() as isize),
        Axis::Y => (p as isize, grid.my() as isize),
    };
    i + first >= 0 && i + last <= m
}

/// `kind` applied along `axis` at node `(l, p)`.
pub fn stencil_at(
    grid: &Grid,
    field: &[f64],
    axis: Axis,
    kind: StencilKind,
    l: usize,
    p: usize,
) -> Result<f64, StencilError> {
    check_field(grid, field)?;
    if !footprint_ok(grid, axis, kind.first_offset(), kind.last_offset(), l, p) {
        return Err(StencilError::Footprint { kind, axis, l, p });
    }
    let (stride, delta) = axis_layout(grid, axis);
    Ok(diff(field, grid.idx(l, p), stride, kind, delta))
}

/// Composite `[w B3ψ](i+1) - [w F3ψ](i-1)` over `2Δ` at node `(l, p)`.
pub fn upwind_pair_at(
    grid: &Grid,
    w: &[f64],
    psi: &[f64],
    axis: Axis,
    l: usize,
    p: usize,
) -> Result<f64, StencilError> {
    check_field(grid, w)?;
    check_field(grid, psi)?;
    if !footprint_ok(grid, axis, -2, 2, l, p) {
        return Err(StencilError::Footprint {
            kind: StencilKind::C4,
            axis,
            l,
            p,
        });
    }
    let (stride, delta) = axis_layout(grid, axis);
    let i = grid.idx(l, p);
    Ok(upwind_pair_raw(w, psi, i, stride, delta))
}

#[inline(always)]
fn upwind_pair_raw(w: &[f64], psi: &[f64], i: usize, stride: usize, delta: f64) -> f64 {
    let right = w[i + stride] * diff(psi, i + stride, stride, StencilKind::B3, delta);
    let left = w[i - stride] * diff(psi, i - stride, stride, StencilKind::F3, delta);
    (right - left) / (2.0 * delta)
}

/// A derived field that is only meaningful on the interior box.
///
/// Values outside the box are stored as zero and reported as `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffField {
    grid: Grid,
    values: Vec<f64>,
}

impl DiffField {
    fn new(grid: Grid) -> Self {
        Self {
            values: vec![0.0; grid.len()],
            grid,
        }
    }

    /// Value at `(l, p)`, `None` outside the interior box.
    pub fn get(&self, l: usize, p: usize) -> Option<f64> {
        self.is_valid(l, p).then(|| self.values[self.grid.idx(l, p)])
    }

    /// Whether `(l, p)` lies in the interior box.
    pub fn is_valid(&self, l: usize, p: usize) -> bool {
        self.grid.interior_l().contains(&l) && self.grid.interior_p().contains(&p)
    }

    /// Raw node values, zero-filled outside the interior.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Consume into the raw node values.
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// `kind` applied along `axis` on every interior node.
pub fn apply_stencil(
    grid: &Grid,
    field: &[f64],
    axis: Axis,
    kind: StencilKind,
) -> Result<DiffField, StencilError> {
    check_field(grid, field)?;
    let (stride, delta) = axis_layout(grid, axis);
    let mut out = DiffField::new(*grid);
    for p in grid.interior_p() {
        for l in grid.interior_l() {
            let i = grid.idx(l, p);
            out.values[i] = diff(field, i, stride, kind, delta);
        }
    }
    Ok(out)
}

/// The upwind-pair composite on every interior node.
pub fn upwind_pair(grid: &Grid, w: &[f64], psi: &[f64], axis: Axis) -> Result<DiffField, StencilError> {
    check_field(grid, w)?;
    check_field(grid, psi)?;
    let (stride, delta) = axis_layout(grid, axis);
    let mut out = DiffField::new(*grid);
    for p in grid.interior_p() {
        for l in grid.interior_l() {
            let i = grid.idx(l, p);
            out.values[i] = upwind_pair_raw(w, psi, i, stride, delta);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn line_grid(delta: f64, m: usize) -> Grid {
        Grid::new(0.0, 0.0, delta * m as f64, delta * m as f64, m, m).unwrap()
    }

    fn sample(grid: &Grid, axis: Axis, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; grid.len()];
        for p in 0..grid.ny() {
            for l in 0..grid.nx() {
                let s = match axis {
                    Axis::X => grid.x(l),
                    Axis::Y => grid.y(p),
                };
                out[grid.idx(l, p)] = f(s);
            }
        }
        out
    }

    #[test]
    fn weights_are_consistent_derivatives() {
        for kind in StencilKind::ALL {
            let w = kind.weights();
            let first = kind.first_offset() as f64;
            let sum: f64 = w.iter().sum();
            let moment: f64 = w
                .iter()
                .enumerate()
                .map(|(j, c)| c * (first + j as f64))
                .sum();
            assert_eq!(sum, 0.0, "{kind:?}");
            assert_eq!(moment, kind.denominator(), "{kind:?}");
        }
    }

    #[test]
    fn c4_is_exact_on_quartic() {
        // x in {0, 0.5, ..}; x = 2 is l = 4.
        let g = line_grid(0.5, 8);
        let f = sample(&g, Axis::X, |x| x.powi(4));
        let d = stencil_at(&g, &f, Axis::X, StencilKind::C4, 4, 4).unwrap();
        assert_eq!(d, 32.0);
    }

    #[test]
    fn f3_vanishes_on_constants() {
        let g = line_grid(0.3, 9);
        let f = vec![4.25; g.len()];
        let d = apply_stencil(&g, &f, Axis::Y, StencilKind::F3).unwrap();
        for p in g.interior_p() {
            for l in g.interior_l() {
                assert_eq!(d.get(l, p), Some(0.0));
            }
        }
        assert_eq!(d.get(0, 3), None);
        assert_eq!(d.get(g.mx() - 1, 3), None);
    }

    #[test]
    fn c2_on_quadratic() {
        let g = line_grid(0.1, 20);
        let f = sample(&g, Axis::X, |x| x * x);
        let d = stencil_at(&g, &f, Axis::X, StencilKind::C2, 10, 10).unwrap();
        assert!((d - 2.0).abs() < 1e-12);
    }

    #[test]
    fn footprint_violations_are_rejected() {
        let g = line_grid(0.1, 10);
        let f = vec![0.0; g.len()];
        assert!(stencil_at(&g, &f, Axis::X, StencilKind::C4, 1, 5).is_err());
        assert!(stencil_at(&g, &f, Axis::X, StencilKind::F3, 9, 5).is_err());
        assert!(stencil_at(&g, &f, Axis::X, StencilKind::F3, 1, 5).is_ok());
        assert!(stencil_at(&g, &f, Axis::Y, StencilKind::B3, 5, 1).is_err());
        assert!(stencil_at(&g, &f, Axis::Y, StencilKind::B3, 5, 9).is_ok());
        assert!(stencil_at(&g, &f, Axis::Y, StencilKind::B3, 5, 10).is_err());
        assert!(upwind_pair_at(&g, &f, &f, Axis::Y, 5, 9).is_err());
        assert!(upwind_pair_at(&g, &f, &f, Axis::Y, 5, 8).is_ok());
        assert!(matches!(
            apply_stencil(&g, &f[1..], Axis::X, StencilKind::C2),
            Err(StencilError::Grid(GridError::FieldLength { .. }))
        ));
    }

    #[test]
    fn upwind_pair_vanishes_for_unit_weight_and_linear_psi() {
        let g = line_grid(0.25, 12);
        let w = vec![1.0; g.len()];
        let psi = sample(&g, Axis::Y, |y| 3.0 * y - 1.0);
        let out = upwind_pair(&g, &w, &psi, Axis::Y).unwrap();
        for p in g.interior_p() {
            for l in g.interior_l() {
                assert!(out.get(l, p).unwrap().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn c4_is_mean_of_one_sided_pair() {
        let g = line_grid(0.07, 15);
        let psi = sample(&g, Axis::X, |x| libm::sin(3.0 * x) + x * x * x);
        for l in g.interior_l() {
            let c4 = stencil_at(&g, &psi, Axis::X, StencilKind::C4, l, 7).unwrap();
            let f3 = stencil_at(&g, &psi, Axis::X, StencilKind::F3, l, 7).unwrap();
            let b3 = stencil_at(&g, &psi, Axis::X, StencilKind::B3, l, 7).unwrap();
            assert!((c4 - 0.5 * (f3 + b3)).abs() < 1e-12);
        }
    }
}
