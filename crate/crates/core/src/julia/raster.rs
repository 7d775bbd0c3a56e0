use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{Polynomial, RationalMap};

pub const MAX_ITER_DEFAULT: u32 = 200;

/// A rectangle of the plane sampled at pixel centres. The vertical extent
/// follows from the aspect ratio; row 0 is the top edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Viewport {
    pub center: Complex64,
    pub half_width: f64,
    pub cols: usize,
    pub rows: usize,
}

impl Viewport {
    pub fn new(center: Complex64, half_width: f64, cols: usize, rows: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) || cols == 0 || rows == 0 {
            return Err(Error::InvalidInput(format!(
                "viewport needs positive half-width and pixel counts, got {half_width} and {cols}x{rows}"
            )));
        }
        Ok(Self {
            center,
            half_width,
            cols,
            rows,
        })
    }

    pub fn half_height(&self) -> f64 {
        self.half_width * self.rows as f64 / self.cols as f64
    }

    pub fn pixel_size(&self) -> f64 {
        2.0 * self.half_width / self.cols as f64
    }

    pub fn pixel(&self, col: usize, row: usize) -> Complex64 {
        let h = self.pixel_size();
        Complex64::new(
            self.center.re - self.half_width + (col as f64 + 0.5) * h,
            self.center.im + self.half_height() - (row as f64 + 0.5) * h,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cell {
    /// First iteration at which `|f_n(z)| >= R`.
    Escape(u32),
    Bounded,
    /// Index of the root whose basin contains the pixel.
    Basin(usize),
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RasterGrid {
    pub viewport: Viewport,
    pub max_iter: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub escape_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip)]
    pub cells: Vec<Cell>,
}

impl RasterGrid {
    /// Evaluate `cell` at every pixel centre, rows in parallel.
    pub fn build(viewport: Viewport, max_iter: u32, cell: impl Fn(Complex64) -> Cell + Sync) -> Self {
        let cells: Vec<Cell> = (0..viewport.rows)
            .into_par_iter()
            .flat_map_iter(|row| {
                let cell = &cell;
                (0..viewport.cols).map(move |col| cell(viewport.pixel(col, row)))
            })
            .collect();
        Self {
            viewport,
            max_iter,
            escape_radius: None,
            tolerance: None,
            cells,
        }
    }

    pub fn get(&self, col: usize, row: usize) -> Cell {
        self.cells[row * self.viewport.cols + col]
    }

    /// Binary PPM (`P6`, maxval 255), row-major from the top.
    pub fn to_ppm(&self, palette: &Palette) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.viewport.cols, self.viewport.rows).into_bytes();
        out.reserve(3 * self.cells.len());
        for c in &self.cells {
            out.extend_from_slice(&palette.color(*c));
        }
        out
    }
}

/// `R = max(4, 2(1 + Σ|c_k|))`, with coefficients of the monic-scaled
/// polynomial.
pub fn default_escape_radius(p: &Polynomial) -> f64 {
    let sum: f64 = p.coeffs().iter().map(|c| c.norm()).sum();
    (2.0 * (1.0 + sum)).max(4.0)
}

/// Escape-time picture of a polynomial map.
pub fn escape_time_raster(f: &RationalMap, viewport: Viewport, max_iter: u32, escape_radius: f64) -> Result<RasterGrid> {
    let p = f
        .as_polynomial()
        .ok_or_else(|| Error::InvalidInput("escape-time rendering needs a polynomial map".into()))?;
    let r2 = escape_radius * escape_radius;
    let mut grid = RasterGrid::build(viewport, max_iter, |z0| escape_index(&p, z0, max_iter, r2));
    grid.escape_radius = Some(escape_radius);
    Ok(grid)
}

fn escape_index(p: &Polynomial, z0: Complex64, max_iter: u32, r2: f64) -> Cell {
    let mut z = z0;
    for n in 0..=max_iter {
        if !(z.norm_sqr() < r2) {
            return Cell::Escape(n);
        }
        if n < max_iter {
            z = p.eval(z);
        }
    }
    Cell::Bounded
}

/// Colours for raster cells: a 256-entry table indexed by escape count
/// modulo 256, black for bounded or unresolved pixels, and one colour per
/// basin.
#[derive(Debug, Clone, PartialEq)]
pub struct Palette {
    pub name: String,
    pub escape: Vec<[u8; 3]>,
    pub basins: Vec<[u8; 3]>,
}

pub const PALETTES: [&str; 2] = ["hue", "gray"];

/// Fully saturated colour at hue `step/steps` of the colour wheel.
fn hue_rgb(step: usize, steps: usize) -> [u8; 3] {
    let h6 = step * 6 * 255 / steps;
    let sector = h6 / 255;
    let t = (h6 % 255) as u8;
    match sector {
        0 => [255, t, 0],
        1 => [255 - t, 255, 0],
        2 => [0, 255, t],
        3 => [0, 255 - t, 255],
        4 => [t, 0, 255],
        _ => [255, 0, 255 - t],
    }
}

impl Palette {
    pub fn by_name(name: &str, basins: usize) -> Result<Self> {
        let escape: Vec<[u8; 3]> = match name {
            "hue" => (0..256).map(|k| hue_rgb(k, 256)).collect(),
            "gray" => (0..256u32).map(|k| [(64 + k * 191 / 255) as u8; 3]).collect(),
            _ => {
                return Err(Error::InvalidInput(format!(
                    "unknown palette '{name}' (expected one of {})",
                    PALETTES.join(", ")
                )))
            }
        };
        let n = basins.max(1);
        let basins = match name {
            "gray" => (0..n).map(|k| [(96 + k * 159 / n) as u8; 3]).collect(),
            _ => (0..n).map(|k| hue_rgb(k, n)).collect(),
        };
        Ok(Self {
            name: name.to_string(),
            escape,
            basins,
        })
    }

    pub fn color(&self, cell: Cell) -> [u8; 3] {
        match cell {
            Cell::Escape(n) => self.escape[n as usize % self.escape.len()],
            Cell::Basin(k) => self.basins[k % self.basins.len()],
            Cell::Bounded | Cell::Unresolved => [0, 0, 0],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> RationalMap {
        RationalMap::poly_desc(&[1.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn single_pixel_examples() {
        let p = square().as_polynomial().unwrap();
        assert_eq!(escape_index(&p, Complex64::new(2.0, 0.0), 50, 16.0), Cell::Escape(1));
        assert_eq!(escape_index(&p, Complex64::new(0.5, 0.0), 50, 16.0), Cell::Bounded);
        assert_eq!(default_escape_radius(&p), 4.0);
    }

    #[test]
    fn chebyshev_interval_is_bounded() {
        let f = RationalMap::poly_desc(&[1.0, 0.0, -2.0]).unwrap();
        let vp = Viewport::new(Complex64::new(0.0, 0.0), 2.0, 101, 1).unwrap();
        let grid = escape_time_raster(&f, vp, MAX_ITER_DEFAULT, 4.0).unwrap();
        assert!(grid.cells.iter().all(|c| *c == Cell::Bounded));
    }

    #[test]
    fn unit_disk_within_one_pixel() {
        let vp = Viewport::new(Complex64::new(0.0, 0.0), 1.5, 120, 90).unwrap();
        let grid = escape_time_raster(&square(), vp, MAX_ITER_DEFAULT, 4.0).unwrap();
        let h = vp.pixel_size();
        for row in 0..vp.rows {
            for col in 0..vp.cols {
                let r = vp.pixel(col, row).norm();
                if (r - 1.0).abs() > h {
                    assert_eq!(grid.get(col, row) == Cell::Bounded, r < 1.0);
                }
            }
        }
    }

    #[test]
    fn ppm_layout() {
        let vp = Viewport::new(Complex64::new(0.0, 0.0), 2.0, 4, 3).unwrap();
        let grid = escape_time_raster(&square(), vp, 20, 4.0).unwrap();
        let ppm = grid.to_ppm(&Palette::by_name("hue", 0).unwrap());
        assert!(ppm.starts_with(b"P6\n4 3\n255\n"));
        assert_eq!(ppm.len(), b"P6\n4 3\n255\n".len() + 36);
    }
}
