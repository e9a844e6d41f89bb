//! Zero counting and location for holomorphic functions on circle domains.
//!
//! Counting uses the argument principle on a contour just inside the
//! boundary (outer circle shrunk, holes expanded); the winding number is
//! accumulated by phase tracking with local bisection wherever the phase
//! step gets large. Location then runs Newton from seeds at the centroids
//! of small-|f| cells of an interior lattice, so the count is guaranteed
//! before any refinement starts.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Circle, CircleDomain};

/// A single-valued holomorphic function with an analytic derivative.
pub trait HolomorphicFn {
    fn eval(&self, z: Complex64) -> Complex64;
    fn deriv(&self, z: Complex64) -> Complex64;
}

impl<T: HolomorphicFn + ?Sized> HolomorphicFn for &T {
    fn eval(&self, z: Complex64) -> Complex64 {
        (**self).eval(z)
    }

    fn deriv(&self, z: Complex64) -> Complex64 {
        (**self).deriv(z)
    }
}

/// Fractional shrink applied to the boundary circles to build the
/// counting contour.
pub const CONTOUR_SHRINK: f64 = 0.02;

/// A located zero with its simplicity margin |f′|.
#[derive(Clone, Copy, Debug)]
pub struct LocatedZero {
    pub point: Complex64,
    pub derivative_abs: f64,
}

fn arg_change(
    f: &impl HolomorphicFn,
    circle: &Circle,
    lo: (f64, Complex64),
    hi: (f64, Complex64),
    scale: f64,
    depth: usize,
) -> Result<f64> {
    let ((t0, f0), (t1, f1)) = (lo, hi);
    if f0.norm() < 1e-13 * scale || f1.norm() < 1e-13 * scale {
        return Err(Error::WindingAmbiguous(format!(
            "|f| nearly vanishes on the counting contour near angle {t0:.6}"
        )));
    }
    let d = (f1 / f0).arg();
    if d.abs() <= std::f64::consts::FRAC_PI_2 {
        return Ok(d);
    }
    if depth == 0 {
        return Err(Error::WindingAmbiguous(
            "phase step stayed above π/2 after maximal refinement".into(),
        ));
    }
    let tm = 0.5 * (t0 + t1);
    let fm = f.eval(circle.point(tm));
    Ok(arg_change(f, circle, (t0, f0), (tm, fm), scale, depth - 1)?
        + arg_change(f, circle, (tm, fm), (t1, f1), scale, depth - 1)?)
}

/// Winding number of f along `circle`, traversed CCW when `ccw` is true.
pub fn winding_number(
    f: &impl HolomorphicFn,
    circle: &Circle,
    ccw: bool,
    samples: usize,
) -> Result<i64> {
    let vals: Vec<Complex64> = (0..samples)
        .map(|i| f.eval(circle.point(TAU * i as f64 / samples as f64)))
        .collect();
    let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::WindingAmbiguous("f vanishes identically".into()));
    }
    let mut total = 0.0;
    for i in 0..samples {
        let t0 = TAU * i as f64 / samples as f64;
        let t1 = TAU * (i + 1) as f64 / samples as f64;
        total += arg_change(
            f,
            circle,
            (t0, vals[i]),
            (t1, vals[(i + 1) % samples]),
            scale,
            24,
        )?;
    }
    let w = total / TAU;
    let rounded = w.round();
    if (w - rounded).abs() > 0.25 {
        return Err(Error::WindingAmbiguous(format!(
            "accumulated winding {w:.4} is far from an integer"
        )));
    }
    Ok(if ccw { rounded as i64 } else { -(rounded as i64) })
}

/// Number of zeros of f inside the contour formed by shrinking the outer
/// circle and expanding the holes by [`CONTOUR_SHRINK`].
pub fn count_zeros(f: &impl HolomorphicFn, domain: &CircleDomain) -> Result<i64> {
    let samples = 1024;
    let outer = domain.outer().scaled(1.0 - CONTOUR_SHRINK);
    let mut count = winding_number(f, &outer, true, samples)?;
    for hole in domain.holes() {
        let collar = hole.scaled(1.0 + CONTOUR_SHRINK);
        count += winding_number(f, &collar, false, samples)?;
    }
    Ok(count)
}

fn newton_refine(f: &impl HolomorphicFn, seed: Complex64, scale: f64) -> Option<Complex64> {
    let mut z = seed;
    for _ in 0..80 {
        let fz = f.eval(z);
        let dz = f.deriv(z);
        if dz.norm() < 1e-300 {
            return None;
        }
        let step = fz / dz;
        z -= step;
        if !z.re.is_finite() || !z.im.is_finite() {
            return None;
        }
        if step.norm() < 1e-13 * scale {
            return Some(z);
        }
    }
    None
}

/// Locates all zeros of f inside the counting contour. The argument
/// principle fixes the count first; lattice minima of |f| seed Newton.
pub fn locate_zeros(f: &impl HolomorphicFn, domain: &CircleDomain) -> Result<Vec<LocatedZero>> {
    let expected = count_zeros(f, domain)?;
    if expected < 0 {
        return Err(Error::WindingAmbiguous(format!(
            "negative zero count {expected}; f has poles inside the contour"
        )));
    }
    let expected = expected as usize;
    if expected == 0 {
        return Ok(Vec::new());
    }
    let outer = domain.outer();
    let scale = outer.radius;
    let clearance = (CONTOUR_SHRINK + 0.01) * scale;

    // Lattice scan for seed candidates.
    let n_lat = 121;
    let mut cells: Vec<(f64, Complex64)> = Vec::new();
    let mut grid_abs = vec![f64::INFINITY; n_lat * n_lat];
    let coord = |i: usize| -> f64 { -1.0 + 2.0 * i as f64 / (n_lat - 1) as f64 };
    for iy in 0..n_lat {
        for ix in 0..n_lat {
            let z = outer.center + scale * Complex64::new(coord(ix), coord(iy));
            if domain.contains_with_clearance(z, clearance) {
                grid_abs[iy * n_lat + ix] = f.eval(z).norm();
            }
        }
    }
    for iy in 0..n_lat {
        for ix in 0..n_lat {
            let v = grid_abs[iy * n_lat + ix];
            if !v.is_finite() {
                continue;
            }
            let mut is_min = true;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (jx, jy) = (ix as i64 + dx, iy as i64 + dy);
                    if jx < 0 || jy < 0 || jx >= n_lat as i64 || jy >= n_lat as i64 {
                        continue;
                    }
                    if grid_abs[jy as usize * n_lat + jx as usize] < v {
                        is_min = false;
                    }
                }
            }
            if is_min {
                let z = outer.center + scale * Complex64::new(coord(ix), coord(iy));
                cells.push((v, z));
            }
        }
    }
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    cells.truncate(48);

    let mut zeros: Vec<LocatedZero> = Vec::new();
    for (_, seed) in &cells {
        if zeros.len() == expected {
            break;
        }
        let Some(z) = newton_refine(f, *seed, scale) else {
            continue;
        };
        if zeros.iter().any(|q| (q.point - z).norm() < 1e-7 * scale) {
            continue;
        }
        if !domain.contains(z) {
            continue;
        }
        if domain.boundary_distance(z) < 1e-6 * scale {
            return Err(Error::ZeroNearBoundary(z));
        }
        zeros.push(LocatedZero {
            point: z,
            derivative_abs: f.deriv(z).norm(),
        });
    }
    if zeros.len() != expected {
        return Err(Error::WrongZeroCount {
            expected,
            found: zeros.len(),
        });
    }
    Ok(zeros)
}
