//! Raster images and areas of amoebas of plane curves.
//!
//! `z1` runs over a polar grid; for every `z1` the roots `z2` of
//! `f(z1, .)` are marked at `(log|z1|, log|z2|)`. Sample grids are nested
//! under doubling, so occupancy only grows with `samples_per_axis`.

use std::f64::consts::TAU;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::MCEstimate;
use crate::poly::{Field, MultiPoly};
use crate::rng::SeedContext;
use crate::sampler::{sample_dense_complex, EnsembleSpec};
use crate::univariate::UniPoly;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RasterParams {
    /// Half-width of the square window `[-R, R]^2` in log coordinates.
    pub radius: f64,
    pub resolution: usize,
    pub samples_per_axis: usize,
}

impl RasterParams {
    fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidArgument("raster radius must be positive".into()));
        }
        if self.resolution == 0 || self.samples_per_axis == 0 {
            return Err(Error::InvalidArgument(
                "raster resolution and sample count must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RasterGrid {
    params: RasterParams,
    /// Row-major, row 0 at `log|z2| = -R`.
    occupancy: Vec<bool>,
    area_estimate: f64,
    slice_failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RasterSidecar {
    #[serde(rename = "R")]
    pub radius: f64,
    pub resolution: usize,
    pub samples: usize,
    pub area_estimate: f64,
}

impl RasterGrid {
    pub fn params(&self) -> &RasterParams {
        &self.params
    }

    pub fn area_estimate(&self) -> f64 {
        self.area_estimate
    }

    pub fn occupied_cells(&self) -> usize {
        self.occupancy.iter().filter(|&&b| b).count()
    }

    /// Slices whose roots could not be computed and were skipped.
    pub fn slice_failures(&self) -> usize {
        self.slice_failures
    }

    pub fn cell_area(&self) -> f64 {
        let side = 2.0 * self.params.radius / self.params.resolution as f64;
        side * side
    }

    /// Occupancy of the cell in column `ix` (`log|z1|`) and row `iy`
    /// (`log|z2|`), both counted from `-R`.
    pub fn is_occupied(&self, ix: usize, iy: usize) -> bool {
        self.occupancy[iy * self.params.resolution + ix]
    }

    /// Cell containing the log point `(x, y)`, if inside the window.
    pub fn cell_of(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        cell_index(&self.params, x, y).map(|k| (k % self.params.resolution, k / self.params.resolution))
    }

    /// Binary graymap, occupied cells black, top row at `log|z2| = R`.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> io::Result<()> {
        let res = self.params.resolution;
        write!(out, "P5\n{res} {res}\n255\n")?;
        let mut row = vec![0u8; res];
        for iy in (0..res).rev() {
            for (ix, px) in row.iter_mut().enumerate() {
                *px = if self.is_occupied(ix, iy) { 0 } else { 255 };
            }
            out.write_all(&row)?;
        }
        Ok(())
    }

    pub fn sidecar(&self) -> RasterSidecar {
        RasterSidecar {
            radius: self.params.radius,
            resolution: self.params.resolution,
            samples: self.params.samples_per_axis,
            area_estimate: self.area_estimate,
        }
    }
}

fn cell_index(p: &RasterParams, x: f64, y: f64) -> Option<usize> {
    let scale = p.resolution as f64 / (2.0 * p.radius);
    let ix = ((x + p.radius) * scale).floor();
    let iy = ((y + p.radius) * scale).floor();
    let n = p.resolution as f64;
    if (0.0..n).contains(&ix) && (0.0..n).contains(&iy) {
        Some(iy as usize * p.resolution + ix as usize)
    } else {
        None
    }
}

/// Samples `log|z1|` on `[-R-1, R+1)` and `arg z1` on `[0, 2 pi)`, each
/// with `samples_per_axis` equally spaced values.
pub fn raster_amoeba(f: &MultiPoly, params: RasterParams) -> Result<RasterGrid> {
    params.validate()?;
    if f.nvars() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: f.nvars(),
        });
    }
    if f.degree_in(1).unwrap_or(0) == 0 {
        return Err(Error::InvalidArgument(
            "curve does not involve the second variable".into(),
        ));
    }
    let s = params.samples_per_axis;
    let span = 2.0 * (params.radius + 1.0);
    let res = params.resolution;

    let (occupancy, live_slices, slice_failures) = (0..s)
        .into_par_iter()
        .map(|i| -> Result<(Vec<bool>, usize, usize)> {
            let x = -(params.radius + 1.0) + span * (i as f64 / s as f64);
            let modulus = x.exp();
            let mut occ = vec![false; res * res];
            let (mut live, mut failures) = (0, 0);
            for k in 0..s {
                let z1 = Complex64::from_polar(modulus, TAU * (k as f64 / s as f64));
                let Some(slice) = UniPoly::slice_second(f, z1)? else {
                    continue;
                };
                if slice.degree() == 0 {
                    continue;
                }
                live += 1;
                let roots = match slice.all_complex_roots() {
                    Ok(r) => r,
                    Err(Error::RootFindingFailure { .. }) => {
                        failures += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                for z2 in roots {
                    if let Some(c) = cell_index(&params, x, z2.norm().ln()) {
                        occ[c] = true;
                    }
                }
            }
            Ok((occ, live, failures))
        })
        .try_reduce(
            || (vec![false; res * res], 0, 0),
            |(mut a, la, fa), (b, lb, fb)| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x |= *y);
                Ok((a, la + lb, fa + fb))
            },
        )?;
    if live_slices == 0 {
        return Err(Error::InvalidArgument(
            "every slice of the curve is degenerate".into(),
        ));
    }
    let mut grid = RasterGrid {
        params,
        occupancy,
        area_estimate: 0.0,
        slice_failures,
    };
    grid.area_estimate = grid.occupied_cells() as f64 * grid.cell_area();
    Ok(grid)
}

/// Mean raster area of `n_curves` random complex Kostlan curves of degree
/// `degree`, dehomogenized at the first coordinate.
pub fn mean_amoeba_area(
    degree: u32,
    n_curves: usize,
    params: RasterParams,
    master_seed: u64,
) -> Result<MCEstimate> {
    let spec = EnsembleSpec::dense(3, degree, Field::Complex)?;
    let mut areas = Vec::with_capacity(n_curves);
    for i in 0..n_curves {
        let seed = SeedContext::new(master_seed, i as u64, "amoeba-area");
        let f = sample_dense_complex(&spec, &seed)?.dehomogenize(0)?;
        areas.push(raster_amoeba(&f, params)?.area_estimate());
    }
    MCEstimate::from_samples(&areas, 0, None, master_seed)
}
