//! Deterministic escape-time phase portraits.
//!
//! Each pixel's orbit is classified with the same right-escape rule the
//! membership oracles use, falling back to plain modulus escape; the
//! iteration count at classification drives the grayscale intensity. Rows
//! render in parallel and are assembled positionally, so identical
//! configurations produce bit-identical rasters.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::domain::RightEscapeParams;
use crate::error::{Error, Result};
use crate::map::EntireMap;

/// Axis-aligned view rectangle in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderWindow {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl RenderWindow {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        if !(x_max > x_min && y_max > y_min) {
            return Err(Error::InvalidParameter(
                "render window must have positive area".into(),
            ));
        }
        Ok(RenderWindow {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }
}

/// Per-pixel orbit classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PixelClass {
    /// The right-escape membership rule fired: the orbit drifts into the
    /// absorbing right end of the component.
    BakerRightEscape,
    /// Budget exhausted with neither rule firing.
    BoundedOrUnknown,
    /// Plain modulus escape past the configured radius.
    GenericEscape,
}

/// A classified raster plus per-pixel iteration counts, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderResult {
    pub width: u32,
    pub height: u32,
    pub classes: Vec<PixelClass>,
    pub iterations: Vec<u32>,
    budget: u32,
}

impl RenderResult {
    /// Pixel totals as (baker-right-escape, bounded/unknown, generic-escape).
    pub fn class_counts(&self) -> (usize, usize, usize) {
        let mut counts = (0, 0, 0);
        for c in &self.classes {
            match c {
                PixelClass::BakerRightEscape => counts.0 += 1,
                PixelClass::BoundedOrUnknown => counts.1 += 1,
                PixelClass::GenericEscape => counts.2 += 1,
            }
        }
        counts
    }

    /// Binary grayscale raster: `P5` header (width, height, max value 255)
    /// followed by one byte per pixel, row-major. Intensity scales the
    /// iteration count at classification into 0..=255.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(self.iterations.len());
        for &it in &self.iterations {
            out.push(((it as u64 * 255) / self.budget.max(1) as u64) as u8);
        }
        out
    }
}

/// Renders `map` over `window` at `width × height` pixels.
///
/// `budget` caps the orbit length per pixel and `escape_radius` defines
/// generic escape.
pub fn render(
    map: &EntireMap,
    window: &RenderWindow,
    width: u32,
    height: u32,
    budget: u32,
    escape_radius: f64,
    params: &RightEscapeParams,
) -> Result<RenderResult> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidParameter("pixel counts must be >= 1".into()));
    }
    if !(escape_radius > 0.0) {
        return Err(Error::InvalidParameter(
            "escape radius must be positive".into(),
        ));
    }
    let dx = (window.x_max - window.x_min) / width as f64;
    let dy = (window.y_max - window.y_min) / height as f64;

    let rows: Vec<(Vec<PixelClass>, Vec<u32>)> = (0..height)
        .into_par_iter()
        .map(|row| {
            let y = window.y_max - (row as f64 + 0.5) * dy;
            let mut classes = Vec::with_capacity(width as usize);
            let mut iters = Vec::with_capacity(width as usize);
            for col in 0..width {
                let x = window.x_min + (col as f64 + 0.5) * dx;
                let (class, it) =
                    classify_pixel(map, Complex64::new(x, y), budget, escape_radius, params);
                classes.push(class);
                iters.push(it);
            }
            (classes, iters)
        })
        .collect();

    let mut classes = Vec::with_capacity((width * height) as usize);
    let mut iterations = Vec::with_capacity((width * height) as usize);
    for (c, i) in rows {
        classes.extend(c);
        iterations.extend(i);
    }
    Ok(RenderResult {
        width,
        height,
        classes,
        iterations,
        budget,
    })
}

/// Orbit classification for one pixel. The right-escape rule is checked
/// first at every step; modulus escape is only reported when that rule has
/// not fired.
fn classify_pixel(
    map: &EntireMap,
    z0: Complex64,
    budget: u32,
    escape_radius: f64,
    params: &RightEscapeParams,
) -> (PixelClass, u32) {
    let mut current = z0;
    let mut rising = 0usize;
    for step in 1..=budget {
        let next = map.eval_unchecked(current);
        if !next.re.is_finite() || !next.im.is_finite() {
            return if next.re == f64::INFINITY {
                (PixelClass::BakerRightEscape, step)
            } else if next.re == f64::NEG_INFINITY {
                (PixelClass::GenericEscape, step)
            } else {
                (PixelClass::BoundedOrUnknown, budget)
            };
        }
        rising = if next.re > current.re { rising + 1 } else { 0 };
        if next.re > params.re_high && rising >= params.window {
            return (PixelClass::BakerRightEscape, step);
        }
        if next.norm() > escape_radius {
            return (PixelClass::GenericEscape, step);
        }
        current = next;
    }
    (PixelClass::BoundedOrUnknown, budget)
}
