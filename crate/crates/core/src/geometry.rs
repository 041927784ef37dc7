//! Disks, rectangles, and the square-cell coverings the solvers run on.
//!
//! Every disk used by the solvers circumscribes an axis-aligned square
//! (half-side `radius / √2`). Coverings tile a rectangle with such squares,
//! and subdivision splits a square into its four quadrants, so the
//! inscribed squares of any level partition the region exactly.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::C64;

/// A circular contour with the axis-aligned square it circumscribes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    center: C64,
    radius: f64,
}

impl Disk {
    pub fn new(center: C64, radius: f64) -> Result<Self> {
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(Error::InvalidGeometry(format!("non-finite disk center {center}")));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidGeometry(format!("disk radius must be positive, got {radius}")));
        }
        Ok(Disk { center, radius })
    }

    pub fn center(&self) -> C64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Half the side length of the inscribed square.
    pub fn half_side(&self) -> f64 {
        self.radius / SQRT_2
    }

    /// Strict membership in the inscribed square; boundary points are excluded.
    pub fn inscribed_square_contains(&self, z: C64) -> bool {
        let h = self.half_side();
        (z.re - self.center.re).abs() < h && (z.im - self.center.im).abs() < h
    }

    /// Membership in the inscribed square grown by `margin` on every side
    /// (closed).
    pub fn expanded_square_contains(&self, z: C64, margin: f64) -> bool {
        let h = self.half_side() + margin;
        (z.re - self.center.re).abs() <= h && (z.im - self.center.im).abs() <= h
    }

    /// Splits the inscribed square into quadrants and returns their
    /// circumscribing disks, ordered (+,+), (−,+), (+,−), (−,−).
    pub fn subdivide(&self) -> [Disk; 4] {
        let r = self.radius / 2.0;
        let d = r / SQRT_2;
        let c = self.center;
        let child = |dx: f64, dy: f64| Disk { center: C64::new(c.re + dx, c.im + dy), radius: r };
        [child(d, d), child(-d, d), child(d, -d), child(-d, -d)]
    }
}

/// An axis-aligned rectangle `[x_min, x_max] × [y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rectangle {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || x_min >= x_max || y_min >= y_max {
            return Err(Error::InvalidGeometry(format!(
                "degenerate rectangle [{x_min}, {x_max}] x [{y_min}, {y_max}]"
            )));
        }
        Ok(Rectangle { x_min, x_max, y_min, y_max })
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn diameter(&self) -> f64 {
        libm::hypot(self.width(), self.height())
    }

    /// Closed containment.
    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.x_min && z.re <= self.x_max && z.im >= self.y_min && z.im <= self.y_max
    }

    /// Strict containment (boundary excluded).
    pub fn contains_strict(&self, z: C64) -> bool {
        z.re > self.x_min && z.re < self.x_max && z.im > self.y_min && z.im < self.y_max
    }

    /// Number of square cells along the imaginary axis when the real axis is
    /// split into `grid_x` cells. Fails unless the height is a whole number
    /// of cells.
    pub fn square_cells_y(&self, grid_x: usize) -> Result<usize> {
        if grid_x == 0 {
            return Err(Error::InvalidGeometry("grid must be at least 1".into()));
        }
        let h = self.width() / grid_x as f64;
        let cells = self.height() / h;
        let rounded = libm::round(cells);
        if rounded < 1.0 || (cells - rounded).abs() > 1e-9 * cells.max(1.0) {
            return Err(Error::InvalidGeometry(format!(
                "height {} is not a whole number of cells of side {h}; pass per-axis grid counts",
                self.height()
            )));
        }
        Ok(rounded as usize)
    }
}

/// Covers `domain` with `grid_x × grid_y` square cells and returns the
/// circumscribing disk of each cell.
///
/// Disks are ordered with the real-axis index outermost: disk
/// `i * grid_y + j` covers cell column `i`, row `j`. Cells must be square
/// (equal side along both axes).
pub fn cover_rectangle(domain: &Rectangle, grid_x: usize, grid_y: usize) -> Result<Vec<Disk>> {
    cover_rectangle_with_offset(domain, grid_x, grid_y, C64::new(0.0, 0.0))
}

/// Like [`cover_rectangle`] with every center translated by `offset`.
pub fn cover_rectangle_with_offset(domain: &Rectangle, grid_x: usize, grid_y: usize, offset: C64) -> Result<Vec<Disk>> {
    if grid_x == 0 || grid_y == 0 {
        return Err(Error::InvalidGeometry("grid must be at least 1 per axis".into()));
    }
    let hx = domain.width() / grid_x as f64;
    let hy = domain.height() / grid_y as f64;
    if (hx - hy).abs() > 1e-12 * hx.max(hy) {
        return Err(Error::InvalidGeometry(format!("cells must be square, got {hx} x {hy}")));
    }
    let radius = SQRT_2 * hx / 2.0;
    let mut disks = Vec::with_capacity(grid_x * grid_y);
    for i in 0..grid_x {
        for j in 0..grid_y {
            let cx = domain.x_min + i as f64 * hx + hx / 2.0 + offset.re;
            let cy = domain.y_min + j as f64 * hy + hy / 2.0 + offset.im;
            disks.push(Disk::new(C64::new(cx, cy), radius)?);
        }
    }
    Ok(disks)
}

/// True when some interior grid line of the covering lies within `tol` of
/// the real or imaginary axis.
pub fn grid_touches_axes(domain: &Rectangle, grid_x: usize, grid_y: usize, tol: f64) -> bool {
    let hx = domain.width() / grid_x as f64;
    let hy = domain.height() / grid_y as f64;
    let on_line = |start: f64, h: f64, cells: usize| (0..=cells).any(|k| (start + k as f64 * h).abs() <= tol);
    on_line(domain.x_min, hx, grid_x) || on_line(domain.y_min, hy, grid_y)
}

/// Offset applied by the CLI when a grid line would sit on an axis.
pub const AXIS_AVOIDING_SHIFT: f64 = 1e-4 * (1.0 + SQRT_2);
