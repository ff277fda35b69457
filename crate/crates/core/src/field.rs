//! Complex-valued fields on `p`: closed-form evaluators, samples on uniform
//! grids, or both.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::matgroup::{p_coords, p_dim, p_from_coords};
use crate::{Error, Mat, Result};

/// A closed-form field evaluator.
pub type Evaluator = Arc<dyn Fn(&Mat) -> Result<Complex64> + Send + Sync>;

/// Uniform grid on `[−range, range]^dim p` with `resolution` nodes per axis,
/// endpoints included. Node indices run with the first axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    n: usize,
    range: f64,
    resolution: usize,
}

impl GridSpec {
    pub fn new(n: usize, range: f64, resolution: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Grid("matrix size must be at least 2".into()));
        }
        if !(range > 0.0 && range.is_finite()) {
            return Err(Error::Grid(format!("range must be positive, got {range}")));
        }
        if resolution < 2 {
            return Err(Error::Grid(format!(
                "resolution must be at least 2, got {resolution}"
            )));
        }
        let len = (resolution as u128).checked_pow(p_dim(n) as u32);
        if len.is_none_or(|l| l > 1 << 28) {
            return Err(Error::Grid("grid has too many nodes".into()));
        }
        Ok(Self {
            n,
            range,
            resolution,
        })
    }

    /// Square grid on `p` of `SL(2,R)`.
    pub fn sl2(range: f64, resolution: usize) -> Result<Self> {
        Self::new(2, range, resolution)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn dim(&self) -> usize {
        p_dim(self.n)
    }

    pub fn len(&self) -> usize {
        self.resolution.pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.range / (self.resolution - 1) as f64
    }

    pub fn axis(&self, i: usize) -> f64 {
        if i + 1 == self.resolution {
            self.range
        } else {
            -self.range + self.spacing() * i as f64
        }
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.dim());
        for _ in 0..self.dim() {
            out.push(idx % self.resolution);
            idx /= self.resolution;
        }
        out
    }

    pub fn node_coords(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx)
            .into_iter()
            .map(|i| self.axis(i))
            .collect()
    }

    pub fn node(&self, idx: usize) -> Mat {
        p_from_coords(self.n, &self.node_coords(idx))
    }

    /// Nodes whose coordinates all lie within `fraction·range`.
    pub fn inner_nodes(&self, fraction: f64) -> Vec<usize> {
        let bound = fraction * self.range * (1.0 + 1e-12);
        (0..self.len())
            .filter(|&i| self.node_coords(i).iter().all(|c| c.abs() <= bound))
            .collect()
    }

    /// Evaluates `f` at every node in parallel.
    pub fn fill<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&Mat) -> Result<T> + Send + Sync,
    {
        (0..self.len())
            .into_par_iter()
            .map(|i| f(&self.node(i)))
            .collect()
    }

    /// Multilinear interpolation of node values; `None` when `x` leaves the grid
    /// or a stencil node is flagged invalid.
    pub fn interpolate(&self, values: &[Complex64], valid: &[bool], x: &Mat) -> Option<Complex64> {
        let coords = p_coords(x);
        let h = self.spacing();
        let mut base = Vec::with_capacity(coords.len());
        let mut frac = Vec::with_capacity(coords.len());
        for c in coords {
            let s = (c + self.range) / h;
            if !(s >= -1e-9 && s <= (self.resolution - 1) as f64 + 1e-9) {
                return None;
            }
            let i = (s.floor().max(0.0) as usize).min(self.resolution - 2);
            base.push(i);
            frac.push((s - i as f64).clamp(0.0, 1.0));
        }
        let d = base.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            let mut idx = 0;
            let mut stride = 1;
            for axis in 0..d {
                let bit = (corner >> axis) & 1;
                w *= if bit == 1 {
                    frac[axis]
                } else {
                    1.0 - frac[axis]
                };
                idx += (base[axis] + bit) * stride;
                stride *= self.resolution;
            }
            if w == 0.0 {
                continue;
            }
            if !valid[idx] {
                return None;
            }
            acc += values[idx] * w;
        }
        Some(acc)
    }
}

/// Values of a field on a grid; nodes whose value could not be determined
/// (pull-backs leaving the grid) are flagged invalid and excluded from norms.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
    pub valid: Vec<bool>,
}

impl Sampled {
    pub fn invalid_count(&self) -> usize {
        self.valid.iter().filter(|v| !**v).count()
    }
}

/// A complex scalar field on `p`.
#[derive(Clone)]
pub struct ScalarField {
    closed: Option<Evaluator>,
    sampled: Option<Sampled>,
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField")
            .field("closed", &self.closed.is_some())
            .field("sampled", &self.sampled.as_ref().map(|s| s.grid.clone()))
            .finish()
    }
}

impl ScalarField {
    pub fn closed<F>(f: F) -> Self
    where
        F: Fn(&Mat) -> Result<Complex64> + Send + Sync + 'static,
    {
        Self {
            closed: Some(Arc::new(f)),
            sampled: None,
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::closed(move |_| Ok(c))
    }

    pub fn from_samples(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Grid(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::Grid("sampled values must be finite".into()));
        }
        let valid = vec![true; values.len()];
        Ok(Self {
            closed: None,
            sampled: Some(Sampled {
                grid,
                values,
                valid,
            }),
        })
    }

    /// A sampled field with an explicit validity mask.
    pub fn from_sampled(s: Sampled) -> Result<Self> {
        if s.values.len() != s.grid.len() || s.valid.len() != s.grid.len() {
            return Err(Error::Grid(
                "sample and mask sizes must match the grid".into(),
            ));
        }
        Ok(Self {
            closed: None,
            sampled: Some(s),
        })
    }

    pub fn evaluator(&self) -> Option<&Evaluator> {
        self.closed.as_ref()
    }

    pub fn sampled(&self) -> Option<&Sampled> {
        self.sampled.as_ref()
    }

    /// Value at `x`: the closed form when present, else interpolated samples.
    pub fn eval(&self, x: &Mat) -> Result<Complex64> {
        if let Some(f) = &self.closed {
            return f(x);
        }
        let s = self.sampled.as_ref().expect("field has a representation");
        s.grid
            .interpolate(&s.values, &s.valid, x)
            .ok_or_else(|| Error::Grid("point outside the sampled range".into()))
    }

    fn try_eval(&self, x: &Mat) -> Result<Option<Complex64>> {
        if let Some(f) = &self.closed {
            return f(x).map(Some);
        }
        let s = self.sampled.as_ref().expect("field has a representation");
        Ok(s.grid.interpolate(&s.values, &s.valid, x))
    }

    /// Adds (or replaces) samples on `grid`, keeping the closed form.
    pub fn sample_on(&self, grid: &GridSpec) -> Result<Self> {
        let vals = grid.fill(|x| self.try_eval(x))?;
        let valid = vals.iter().map(Option::is_some).collect();
        let values = vals
            .into_iter()
            .map(|v| v.unwrap_or(Complex64::new(0.0, 0.0)))
            .collect();
        Ok(Self {
            closed: self.closed.clone(),
            sampled: Some(Sampled {
                grid: grid.clone(),
                values,
                valid,
            }),
        })
    }

    /// `x ↦ factor(x)·f(map(x))` where `map` returns both the point and the factor.
    ///
    /// Closed forms are composed; samples are re-read by interpolation at the
    /// mapped nodes, flagging nodes whose image leaves the grid.
    pub fn pullback<M>(&self, map: M) -> Result<Self>
    where
        M: Fn(&Mat) -> Result<(Mat, Complex64)> + Send + Sync + 'static,
    {
        let map = Arc::new(map);
        let closed: Option<Evaluator> = self.closed.as_ref().map(|f| {
            let f = f.clone();
            let map = map.clone();
            Arc::new(move |x: &Mat| {
                let (y, c) = map(x)?;
                Ok(c * f(&y)?)
            }) as Evaluator
        });
        let sampled = match &self.sampled {
            None => None,
            Some(s) => {
                let vals = s.grid.fill(|x| {
                    let (y, c) = map(x)?;
                    Ok(match &self.closed {
                        Some(f) => Some(c * f(&y)?),
                        None => s.grid.interpolate(&s.values, &s.valid, &y).map(|v| c * v),
                    })
                })?;
                let valid = vals.iter().map(Option::is_some).collect();
                let values = vals
                    .into_iter()
                    .map(|v| v.unwrap_or(Complex64::new(0.0, 0.0)))
                    .collect();
                Some(Sampled {
                    grid: s.grid.clone(),
                    values,
                    valid,
                })
            }
        };
        Ok(Self { closed, sampled })
    }

    /// `Σ c_i f_i` for closed-form fields.
    pub fn combination(terms: &[(Complex64, ScalarField)]) -> Result<Self> {
        let mut parts = Vec::with_capacity(terms.len());
        for (c, f) in terms {
            let e = f
                .closed
                .clone()
                .ok_or_else(|| Error::Contract("combination needs closed-form fields".into()))?;
            parts.push((*c, e));
        }
        Ok(Self::closed(move |x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, e) in &parts {
                acc += c * e(x)?;
            }
            Ok(acc)
        }))
    }

    /// Largest `|f(x) − g(x)|` over the given grid nodes, skipping invalid samples.
    pub fn sup_distance<G>(&self, grid: &GridSpec, nodes: &[usize], g: G) -> Result<f64>
    where
        G: Fn(&Mat) -> Result<Complex64> + Send + Sync,
    {
        let use_samples = self
            .sampled
            .as_ref()
            .filter(|s| s.grid == *grid && self.closed.is_none());
        let errs = nodes
            .par_iter()
            .map(|&i| {
                let x = grid.node(i);
                let fx = match use_samples {
                    Some(s) if !s.valid[i] => return Ok(0.0),
                    Some(s) => s.values[i],
                    None => match self.try_eval(&x)? {
                        Some(v) => v,
                        None => return Ok(0.0),
                    },
                };
                Ok((fx - g(&x)?).norm())
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(errs.into_iter().fold(0.0, f64::max))
    }
}
