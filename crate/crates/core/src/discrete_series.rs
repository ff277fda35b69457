//! Weight-`m` discrete series of `SL(2,R)` as weighted-holomorphic sections
//! over `p`, the operators `π_t`, the weighted `∂̄` operator and the
//! contraction onto the lowest `K`-type.
//!
//! A section `f` on `p` corresponds to the function `F = f·(1 − |w|²)^{−m/2}` of
//! the disk coordinate `w = c(x)`; it lies in the representation space when `F`
//! is holomorphic. The group acts through the bundle cocycle:
//! `(π_t(γ)f)(x) = μ(k_c)⁻¹ f(y)` where `φ_t(γ)⁻¹ exp(t·x) = exp(t·y)·k_c`.
//! On `(k, 0)` and at `t = 0` this reduces to `μ(k)·f(γ⁻¹ ·_t x)`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::deformation::{pullback_t, DeformedElement};
use crate::field::{GridSpec, ScalarField};
use crate::matgroup::{mat_exp, p_basis, rotation_angle, spd_log};
use crate::report::{validate_ladder, ConvergenceReport};
use crate::waves::{isotypic_project, zoom_field};
use crate::{Error, Mat, Result};

/// The integer `κ` with `c(Ad(R(θ))x) = e^{iκθ}·c(x)`.
pub const CHART_ROTATION: i64 = -2;

/// Finite-difference step used for the chart Jacobian.
const JACOBIAN_STEP: f64 = 1e-6;

/// The character `μ(R(θ)) = e^{iμ̂θ}` of the lowest `K`-type: `μ̂ = −κ·m/2 = m`.
pub fn lowest_weight(m: u32) -> i64 {
    -CHART_ROTATION * m as i64 / 2
}

/// `μ(k)` for `k ∈ SO(2)` and character integer `weight`.
pub fn character(weight: i64, k: &Mat) -> Complex64 {
    Complex64::from_polar(1.0, weight as f64 * rotation_angle(k))
}

fn check_sl2(x: &Mat) -> Result<()> {
    if x.nrows() != 2 || x.ncols() != 2 {
        return Err(Error::Contract(
            "the disk chart is defined on p of SL(2,R)".into(),
        ));
    }
    Ok(())
}

/// `c(x) = cayley(exp(x)·i)` with `cayley(z) = (z − i)/(z + i)`.
pub fn chart(x: &Mat) -> Result<Complex64> {
    check_sl2(x)?;
    let g = mat_exp(x)?;
    let i = Complex64::new(0.0, 1.0);
    let z = (i * g[(0, 0)] + g[(0, 1)]) / (i * g[(1, 0)] + g[(1, 1)]);
    Ok((z - i) / (z + i))
}

/// Inverse of [`chart`] on the open unit disk.
pub fn chart_inv(w: Complex64) -> Result<Mat> {
    if !(w.norm() < 1.0) {
        return Err(Error::Domain(format!(
            "|w| = {} is not inside the unit disk",
            w.norm()
        )));
    }
    let i = Complex64::new(0.0, 1.0);
    let z = i * (1.0 + w) / (1.0 - w);
    let s = z.im.sqrt();
    let g = Mat::from_row_slice(2, 2, &[s, z.re / s, 0.0, 1.0 / s]);
    let mut x = spd_log(&(&g * g.transpose()))? * 0.5;
    let tr = x.trace() / 2.0;
    x[(0, 0)] -= tr;
    x[(1, 1)] -= tr;
    Ok(x)
}

/// A section of the weight-`m` line bundle over `p`, trivialized as a scalar field.
#[derive(Debug, Clone)]
pub struct SectionField {
    weight: u32,
    field: ScalarField,
}

impl SectionField {
    pub fn new(weight: u32, field: ScalarField) -> Result<Self> {
        if weight < 2 {
            return Err(Error::Contract(format!(
                "weight m = {weight} must be at least 2"
            )));
        }
        Ok(Self { weight, field })
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn eval(&self, x: &Mat) -> Result<Complex64> {
        self.field.eval(x)
    }

    pub fn sample_on(&self, grid: &GridSpec) -> Result<Self> {
        Ok(Self {
            weight: self.weight,
            field: self.field.sample_on(grid)?,
        })
    }

    pub fn zoom(&self, t: f64) -> Result<Self> {
        Ok(Self {
            weight: self.weight,
            field: zoom_field(&self.field, t)?,
        })
    }

    /// The `mode`-isotypic part for the `K`-action of [`ds_rep`].
    pub fn isotypic(&self, mode: i64, quad_nodes: usize) -> Result<Self> {
        Ok(Self {
            weight: self.weight,
            field: isotypic_project(&self.field, mode, quad_nodes, lowest_weight(self.weight))?,
        })
    }
}

/// `(1 − |w|²)^{m/2}`.
fn weight_factor(w: Complex64, m: u32) -> f64 {
    (1.0 - w.norm_sqr()).powf(m as f64 / 2.0)
}

/// `f_j(x) = c(x)^j·(1 − |c(x)|²)^{m/2}`, optionally sampled on a grid.
pub fn ds_basis(j: u32, m: u32, grid: Option<&GridSpec>) -> Result<SectionField> {
    let field = ScalarField::closed(move |x| {
        let w = chart(x)?;
        Ok(w.powu(j) * weight_factor(w, m))
    });
    let s = SectionField::new(m, field)?;
    match grid {
        Some(g) => s.sample_on(g),
        None => Ok(s),
    }
}

/// `Σ_j a_j f_j` as a closed-form section.
pub fn ds_combination(coeffs: &[Complex64], m: u32) -> Result<SectionField> {
    let coeffs = coeffs.to_vec();
    SectionField::new(
        m,
        ScalarField::closed(move |x| {
            let w = chart(x)?;
            let mut acc = Complex64::new(0.0, 0.0);
            let mut pow = Complex64::new(1.0, 0.0);
            for a in &coeffs {
                acc += a * pow;
                pow *= w;
            }
            Ok(acc * weight_factor(w, m))
        }),
    )
}

/// `‖f_j‖²` for the `η_1` volume, by the trapezoidal rule in the `B`-radius `r`
/// on `[0, r_max]`; the volume element in polar coordinates is
/// `sinh(√2 r)/√2 dr dφ`.
pub fn ds_norm_sq(j: u32, m: u32, r_max: f64, nodes: usize) -> f64 {
    let s2 = std::f64::consts::SQRT_2;
    let h = r_max / nodes as f64;
    let integrand = |r: f64| {
        let u = r / s2;
        let rho2 = u.tanh().powi(2);
        rho2.powi(j as i32) * (1.0 - rho2).powi(m as i32) * (s2 * r).sinh() / s2
    };
    let mut sum = 0.5 * (integrand(0.0) + integrand(r_max));
    for i in 1..nodes {
        sum += integrand(h * i as f64);
    }
    2.0 * std::f64::consts::PI * sum * h
}

/// `‖f_j‖² = 2π·j!(m−2)!/(j+m−1)!`.
pub fn ds_norm_sq_exact(j: u32, m: u32) -> f64 {
    let mut v = 2.0 * std::f64::consts::PI;
    for i in 1..=j {
        v *= i as f64;
    }
    for i in 1..=(m - 2) {
        v *= i as f64;
    }
    for i in 1..=(j + m - 1) {
        v /= i as f64;
    }
    v
}

/// `(1 − |w|²)^{m/2}·|∂̄_w(F·(1 − |w|²)^{−m/2})|` at `y`, by central differences
/// of step `h` in the coordinates of `p`.
pub fn dbar_residual_at<F>(f: &F, m: u32, y: &Mat, h: f64) -> Result<f64>
where
    F: Fn(&Mat) -> Result<Complex64> + ?Sized,
{
    let basis = p_basis(2);
    let g = |x: &Mat| -> Result<(Complex64, Complex64)> {
        let w = chart(x)?;
        Ok((f(x)? / weight_factor(w, m), w))
    };
    let mut grad = [Complex64::default(); 2];
    let mut jac = Mat::zeros(2, 2);
    for (i, e) in basis.iter().enumerate() {
        let (gp, _) = g(&(y + e * h))?;
        let (gm, _) = g(&(y - e * h))?;
        grad[i] = (gp - gm) / (2.0 * h);
        let wp = chart(&(y + e * JACOBIAN_STEP))?;
        let wm = chart(&(y - e * JACOBIAN_STEP))?;
        let dw = (wp - wm) / (2.0 * JACOBIAN_STEP);
        jac[(0, i)] = dw.re;
        jac[(1, i)] = dw.im;
    }
    let jt_inv = jac
        .transpose()
        .try_inverse()
        .ok_or_else(|| Error::Domain("degenerate chart Jacobian".into()))?;
    let gu = grad[0] * jt_inv[(0, 0)] + grad[1] * jt_inv[(0, 1)];
    let gv = grad[0] * jt_inv[(1, 0)] + grad[1] * jt_inv[(1, 1)];
    let dbar = (gu + Complex64::new(0.0, 1.0) * gv) * 0.5;
    Ok(weight_factor(chart(y)?, m) * dbar.norm())
}

/// Residual of the weighted `∂̄` operator at each node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualField {
    pub grid: GridSpec,
    /// `None` where the stencil leaves the grid or the section is undetermined.
    pub values: Vec<Option<f64>>,
}

impl ResidualField {
    /// Largest residual over nodes within `fraction·range` of the origin.
    pub fn sup_inner(&self, fraction: f64) -> f64 {
        self.grid
            .inner_nodes(fraction)
            .into_iter()
            .filter_map(|i| self.values[i])
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::from("x,y,residual\n");
        for (i, v) in self.values.iter().enumerate() {
            let c = self.grid.node_coords(i);
            match v {
                Some(r) => writeln!(out, "{},{},{}", c[0], c[1], r),
                None => writeln!(out, "{},{},", c[0], c[1]),
            }
            .expect("writing to a string");
        }
        out
    }
}

/// `D_1 f` on a grid with stencil step `h` (the grid spacing is used for
/// sampled-only sections).
pub fn ds_annihilate(f: &SectionField, m: u32, h: f64, grid: &GridSpec) -> Result<ResidualField> {
    ds_annihilate_t(f, m, h, 1.0, grid)
}

/// `D_t f = C_t D_1 C_t⁻¹ f` on a grid.
pub fn ds_annihilate_t(
    f: &SectionField,
    m: u32,
    h: f64,
    t: f64,
    grid: &GridSpec,
) -> Result<ResidualField> {
    if !(h > 0.0) || !(t > 0.0) {
        return Err(Error::Domain(
            "stencil step and scale must be positive".into(),
        ));
    }
    if grid.n() != 2 {
        return Err(Error::Contract(
            "the weighted ∂̄ operator lives on p of SL(2,R)".into(),
        ));
    }
    let values = match f.field().evaluator() {
        Some(e) => {
            let e = e.clone();
            let unzoomed = move |y: &Mat| e(&(y / t));
            grid.fill(|x| dbar_residual_at(&unzoomed, m, &(x * t), h).map(Some))?
        }
        None => {
            let s = f
                .field()
                .sampled()
                .expect("section has a representation")
                .clone();
            if s.grid != *grid {
                return Err(Error::Grid(
                    "sampled section lives on a different grid".into(),
                ));
            }
            let step = grid.spacing();
            let res = grid.resolution();
            (0..grid.len())
                .into_par_iter()
                .map(|i| {
                    let mi = grid.multi_index(i);
                    if mi.iter().any(|&c| c == 0 || c + 1 == res) {
                        return Ok(None);
                    }
                    let stencil = [i, i + 1, i - 1, i + res, i - res];
                    if stencil.iter().any(|&j| !s.valid[j]) {
                        return Ok(None);
                    }
                    let lookup = |y: &Mat| -> Result<Complex64> {
                        s.grid
                            .interpolate(&s.values, &s.valid, y)
                            .ok_or_else(|| Error::Grid("stencil outside the grid".into()))
                    };
                    let unzoomed = |y: &Mat| lookup(&(y / t));
                    dbar_residual_at(&unzoomed, m, &(grid.node(i) * t), step * t).map(Some)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(ResidualField {
        grid: grid.clone(),
        values,
    })
}

/// `(π_t(a)f)(x) = μ(k_c)⁻¹·f(y)` with `(y, k_c)` from [`pullback_t`].
pub fn ds_rep(a: &DeformedElement, f: &SectionField, m: u32) -> Result<SectionField> {
    twisted_pullback(a, f.field(), lowest_weight(m)).and_then(|field| SectionField::new(m, field))
}

/// Pull-back along `a⁻¹ ·_t` twisted by the inverse fiber character of the cocycle.
pub fn twisted_pullback(a: &DeformedElement, f: &ScalarField, weight: i64) -> Result<ScalarField> {
    if a.n() != 2 {
        return Err(Error::Contract(
            "fiber characters are defined for SO(2)".into(),
        ));
    }
    if a.v().iter().all(|c| *c == 0.0) && *a.k() == Mat::identity(2, 2) {
        return Ok(f.clone());
    }
    let a = a.clone();
    f.pullback(move |x| {
        let (y, kc) = pullback_t(&a, x)?;
        Ok((y, character(weight, &kc).conj()))
    })
}

/// Sup distances of `C_t f` from `f(0) = a_0` (`"vector"`) and of
/// `π_t(k, v, t)C_t f` from `μ(k)·a_0` (`"operator"`) over a grid.
pub fn ds_contract_report(
    coeffs: &[Complex64],
    m: u32,
    k: &Mat,
    v: &Mat,
    ladder: &[f64],
    grid: &GridSpec,
) -> Result<ConvergenceReport> {
    validate_ladder(ladder)?;
    let f = ds_combination(coeffs, m)?;
    let a0 = coeffs.first().copied().unwrap_or_default();
    let target = character(lowest_weight(m), k) * a0;
    let nodes: Vec<usize> = (0..grid.len()).collect();
    let mut vector = Vec::with_capacity(ladder.len());
    let mut operator = Vec::with_capacity(ladder.len());
    for &t in ladder {
        let ft = f.zoom(t)?;
        vector.push(ft.field().sup_distance(grid, &nodes, |_| Ok(a0))?);
        let a = DeformedElement::new(k.clone(), v.clone(), t)?;
        let moved = ds_rep(&a, &ft, m)?;
        operator.push(moved.field().sup_distance(grid, &nodes, |_| Ok(target))?);
    }
    let mut report = ConvergenceReport::new(ladder.to_vec());
    report.insert("vector", vector)?;
    report.insert("operator", operator)?;
    Ok(report)
}

/// Values at the origin of the isotypic components `P_mode f`.
pub fn ds_lowest_vanishing(
    f: &SectionField,
    modes: &[i64],
    quad_nodes: usize,
) -> Result<Vec<(i64, Complex64)>> {
    let origin = Mat::zeros(2, 2);
    modes
        .iter()
        .map(|&mode| Ok((mode, f.isotypic(mode, quad_nodes)?.eval(&origin)?)))
        .collect()
}
