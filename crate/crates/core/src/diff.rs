//! Central finite differences with one Richardson step.
//!
//! Each derivative uses the five-point fourth-order stencil at steps `h` and
//! `h/2` and combines them as `(16 D(h/2) - D(h)) / 15`, which cancels the
//! leading truncation term.

use std::ops::{Add, Mul, Sub};

use crate::error::Result;

/// Values a stencil can combine (scalars and vectors).
pub trait Linear: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}

impl<T> Linear for T where T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

fn richardson<V: Linear>(coarse: V, fine: V) -> V {
    (fine * 16.0 - coarse) * (1.0 / 15.0)
}

fn first_stencil<V, F>(f: &F, x: f64, h: f64) -> Result<V>
where
    V: Linear,
    F: Fn(f64) -> Result<V>,
{
    let outer = f(x - 2.0 * h)? - f(x + 2.0 * h)?;
    let inner = f(x + h)? - f(x - h)?;
    Ok((outer + inner * 8.0) * (1.0 / (12.0 * h)))
}

fn second_stencil<V, F>(f: &F, x: f64, h: f64) -> Result<V>
where
    V: Linear,
    F: Fn(f64) -> Result<V>,
{
    let outer = f(x - 2.0 * h)? + f(x + 2.0 * h)?;
    let inner = f(x - h)? + f(x + h)?;
    let centre = f(x)?;
    Ok((inner * 16.0 - outer - centre * 30.0) * (1.0 / (12.0 * h * h)))
}

/// df/dx at `x`.
pub fn first<V, F>(f: F, x: f64, h: f64) -> Result<V>
where
    V: Linear,
    F: Fn(f64) -> Result<V>,
{
    Ok(richardson(first_stencil(&f, x, h)?, first_stencil(&f, x, 0.5 * h)?))
}

/// d²f/dx² at `x`.
pub fn second<V, F>(f: F, x: f64, h: f64) -> Result<V>
where
    V: Linear,
    F: Fn(f64) -> Result<V>,
{
    Ok(richardson(second_stencil(&f, x, h)?, second_stencil(&f, x, 0.5 * h)?))
}

/// ∂²f/∂x∂y at `(x, y)`.
pub fn mixed<V, F>(f: F, x: f64, y: f64, h: f64) -> Result<V>
where
    V: Linear,
    F: Fn(f64, f64) -> Result<V>,
{
    first(|xx| first(|yy| f(xx, yy), y, h), x, h)
}
