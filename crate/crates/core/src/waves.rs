//! Helgason waves `ε^t_{λ,b}(v) = exp⟨iλ + tρ, 𝕴_t(Ad(b)v)⟩`, their plane-wave
//! limits, Poisson superpositions over `K/M`, the quasi-regular action, the
//! zoom operators `C_t f = f(t·)` and `K`-isotypic projectors.
//!
//! `e_{λ,b}` denotes `ε^1_{λ,b}`.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::compact_picture::{circle_nodes, CircleFunction};
use crate::deformation::{pullback_t, DeformedElement};
use crate::field::{GridSpec, Sampled, ScalarField};
use crate::iwasawa_limits::iw_a_one;
use crate::matgroup::{ad_k, p_norm, rotation, Covector, RootData};
use crate::{Error, Mat, Result};

pub use crate::report::ConvergenceReport;

/// Parameters `(λ, b, t)` of a wave.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSpec {
    lambda: Covector,
    b: Mat,
    t: f64,
    rho: Covector,
}

impl WaveSpec {
    pub fn new(lambda: Covector, b: Mat, t: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("wave scale t = {t} must be ≥ 0")));
        }
        let n = b.nrows();
        if lambda.dim() != n || !b.is_square() {
            return Err(Error::Contract("λ and b must match the matrix size".into()));
        }
        if (&b * b.transpose() - Mat::identity(n, n)).amax() > 1e-10 {
            return Err(Error::Contract("b must lie in SO(n)".into()));
        }
        let rho = RootData::sl(n).rho;
        Ok(Self { lambda, b, t, rho })
    }

    /// The `SL(2,R)` wave with `λ(sH) = ℓs` and `b = R(θ_b)`.
    pub fn sl2(ell: f64, theta_b: f64, t: f64) -> Result<Self> {
        Self::new(Covector::sl2(ell), rotation(theta_b), t)
    }

    pub fn lambda(&self) -> &Covector {
        &self.lambda
    }

    pub fn b(&self) -> &Mat {
        &self.b
    }

    pub fn t(&self) -> f64 {
        self.t
    }
}

/// `ε^t_{λ,b}(v)`; at `t = 0` the plane wave `e^{i⟨λ, Ad(b)v⟩}`.
///
/// For `t > 0` the exponent is evaluated as `⟨iλ/t + ρ, 𝕴(Ad(b)(t·v))⟩`, which
/// equals `⟨iλ + tρ, 𝕴_t(Ad(b)v)⟩` by the scaling law of `𝕴_t`.
pub fn wave_eval(w: &WaveSpec, v: &Mat) -> Result<Complex64> {
    if w.t == 0.0 {
        return Ok(plane_wave(&w.lambda, &w.b, v));
    }
    let a = iw_a_one(&ad_k(&w.b, &(v * w.t)))?;
    Ok(Complex64::new(w.rho.pair(&a), w.lambda.pair(&a) / w.t).exp())
}

/// `e^{i⟨λ, Ad(b)v⟩}`.
pub fn plane_wave(lambda: &Covector, b: &Mat, v: &Mat) -> Complex64 {
    Complex64::from_polar(1.0, lambda.pair(&ad_k(b, v)))
}

/// The wave as a closed-form field.
pub fn wave_field(w: &WaveSpec) -> ScalarField {
    let w = w.clone();
    ScalarField::closed(move |v| wave_eval(&w, v))
}

/// `C_t f = x ↦ f(t·x)`.
pub fn zoom_field(f: &ScalarField, t: f64) -> Result<ScalarField> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("zoom needs t > 0, got {t}")));
    }
    if t > 1.0 && f.evaluator().is_none() {
        return Err(Error::Range(format!(
            "zoom by t = {t} > 1 reads samples outside the grid"
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    f.pullback(move |x| Ok((x * t, one)))
}

/// The quasi-regular action `x ↦ f(a⁻¹ ·_t x)`.
pub fn quasi_regular(a: &DeformedElement, f: &ScalarField) -> Result<ScalarField> {
    let a = a.clone();
    let one = Complex64::new(1.0, 0.0);
    f.pullback(move |x| Ok((pullback_t(&a, x)?.0, one)))
}

/// Node count of the circle quadrature used by [`poisson`] for points of
/// `B`-norm up to `radius`: `2·bandwidth + 16`, plus enough nodes to resolve
/// the oscillation of the wave in `b`.
pub fn poisson_nodes(bandwidth: usize, lambda: &Covector, t: f64, radius: f64) -> usize {
    let freq = (lambda.on_h().abs() + t) * radius;
    2 * bandwidth + 16 + 2 * (4.0 * freq).ceil() as usize
}

/// `x ↦ ∫_{K/M} ε^t_{λ,b}(x) F(b) db`, by the trapezoidal rule over `K`.
///
/// `nodes` overrides the quadrature size; by default [`poisson_nodes`] for the
/// grid's corner radius.
pub fn poisson(
    f: &CircleFunction,
    lambda: &Covector,
    t: f64,
    grid: &GridSpec,
    nodes: Option<usize>,
) -> Result<ScalarField> {
    if grid.n() != 2 || lambda.dim() != 2 {
        return Err(Error::Contract(
            "Poisson superposition is implemented for SL(2,R)".into(),
        ));
    }
    if grid.is_empty() {
        return Err(Error::Grid("empty grid".into()));
    }
    let radius = grid.range() * (grid.dim() as f64).sqrt();
    let n = nodes.unwrap_or_else(|| poisson_nodes(f.bandwidth(), lambda, t, radius));
    let field = poisson_closed(f, lambda, t, n)?;
    field.sample_on(grid)
}

/// The closed-form Poisson superposition with `n` quadrature nodes.
pub fn poisson_closed(
    f: &CircleFunction,
    lambda: &Covector,
    t: f64,
    n: usize,
) -> Result<ScalarField> {
    if n == 0 {
        return Err(Error::Contract("quadrature needs nodes".into()));
    }
    let terms = circle_nodes(n)
        .into_iter()
        .map(|theta| {
            Ok((
                WaveSpec::new(lambda.clone(), rotation(theta), t)?,
                f.eval(theta),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let scale = 1.0 / n as f64;
    Ok(ScalarField::closed(move |x| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (w, fb) in &terms {
            acc += wave_eval(w, x)? * fb;
        }
        Ok(acc * scale)
    }))
}

/// The `mode`-isotypic part of `f` for the `K`-action `(π(k)f)(x) = μ(k) f(Ad(k⁻¹)x)`
/// with fiber character `μ(R(θ)) = e^{i·fiber_weight·θ}` (zero for scalar fields):
/// `x ↦ (1/N) Σ_j e^{−i·mode·θ_j} e^{i·fiber_weight·θ_j} f(Ad(R(−θ_j))x)`.
pub fn isotypic_project(
    f: &ScalarField,
    mode: i64,
    quad_nodes: usize,
    fiber_weight: i64,
) -> Result<ScalarField> {
    let required = 4 * mode.unsigned_abs() as usize + 8;
    if quad_nodes < required {
        return Err(Error::Aliasing {
            nodes: quad_nodes,
            required,
        });
    }
    let rot: Vec<(Mat, Complex64)> = circle_nodes(quad_nodes)
        .into_iter()
        .map(|th| {
            let w =
                Complex64::from_polar(1.0, (fiber_weight - mode) as f64 * th) / quad_nodes as f64;
            (rotation(-th), w)
        })
        .collect();
    let average = move |g: &dyn Fn(&Mat) -> Result<Option<Complex64>>,
                        x: &Mat|
          -> Result<Option<Complex64>> {
        if x.nrows() != 2 {
            return Err(Error::Contract(
                "isotypic projection is implemented for SO(2)".into(),
            ));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (r, w) in &rot {
            match g(&ad_k(r, x))? {
                Some(v) => acc += w * v,
                None => return Ok(None),
            }
        }
        Ok(Some(acc))
    };
    let average = std::sync::Arc::new(average);
    if let Some(e) = f.evaluator() {
        let e = e.clone();
        let avg = average.clone();
        let closed = ScalarField::closed(move |x| {
            let g = |y: &Mat| e(y).map(Some);
            Ok(avg(&g, x)?.expect("closed forms always evaluate"))
        });
        return match f.sampled() {
            Some(s) => closed.sample_on(&s.grid),
            None => Ok(closed),
        };
    }
    let s = f.sampled().expect("field has a representation").clone();
    let vals = s.grid.fill(|x| {
        let g = |y: &Mat| Ok(s.grid.interpolate(&s.values, &s.valid, y));
        average(&g, x)
    })?;
    let valid: Vec<bool> = vals.iter().map(Option::is_some).collect();
    let values: Vec<Complex64> = vals.into_iter().map(|v| v.unwrap_or_default()).collect();
    ScalarField::from_sampled(Sampled {
        grid: s.grid.clone(),
        values,
        valid,
    })
}

/// Sup-norm distance between `ε^t_{λ,b}` and its plane-wave limit on a grid.
pub fn plane_wave_gap(lambda: &Covector, b: &Mat, t: f64, grid: &GridSpec) -> Result<f64> {
    let w = WaveSpec::new(lambda.clone(), b.clone(), t)?;
    let gaps = grid.fill(|x| Ok((wave_eval(&w, x)? - plane_wave(lambda, b, x)).norm()))?;
    Ok(gaps.into_iter().fold(0.0, f64::max))
}

/// Complex wave values on a square grid, with the envelope `{λ, t, range, resolution}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDataset {
    pub lambda: f64,
    pub t: f64,
    pub range: f64,
    pub resolution: usize,
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

impl GridDataset {
    /// CSV with header `x,y,re,im`, one row per node, first axis fastest.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 48);
        out.push_str("x,y,re,im\n");
        for (i, v) in self.values.iter().enumerate() {
            let c = self.grid.node_coords(i);
            let _ = writeln!(out, "{},{},{},{}", c[0], c[1], v.re, v.im);
        }
        out
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn min_modulus(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Frames `ε^t_{λ,1}` for each `t` on `[−range, range]²`.
pub fn wave_figure_data(
    lambda: f64,
    t_list: &[f64],
    range: f64,
    resolution: usize,
) -> Result<Vec<GridDataset>> {
    let grid = GridSpec::sl2(range, resolution)?;
    t_list
        .iter()
        .map(|&t| {
            let w = WaveSpec::sl2(lambda, 0.0, t)?;
            let values = grid.fill(|x| wave_eval(&w, x))?;
            Ok(GridDataset {
                lambda,
                t,
                range,
                resolution,
                grid: grid.clone(),
                values,
            })
        })
        .collect()
}

/// Largest `B`-norm of a grid node.
pub fn grid_radius(grid: &GridSpec) -> f64 {
    p_norm(&grid.node(grid.len() - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroup::{h_sl2, p_from_coords, x_sl2};

    #[test]
    fn wave_examples() {
        for &(l, th, t) in &[(3.0, 0.2, 1.0), (30.0, 1.0, 0.5), (-2.0, 0.0, 0.0)] {
            let w = WaveSpec::sl2(l, th, t).unwrap();
            assert_eq!(
                wave_eval(&w, &Mat::zeros(2, 2)).unwrap(),
                Complex64::new(1.0, 0.0)
            );
        }
        let (ell, s, t) = (2.5, 0.7, 0.3);
        let w = WaveSpec::sl2(ell, 0.0, t).unwrap();
        let got = wave_eval(&w, &(h_sl2() * s)).unwrap();
        let want = Complex64::new(t * s, ell * s).exp();
        assert!((got - want).norm() < 1e-13);
    }

    #[test]
    fn modulus_formula() {
        let w = WaveSpec::sl2(4.0, 0.3, 0.5).unwrap();
        let v = x_sl2() * 0.8 - h_sl2() * 0.3;
        let a = crate::iwasawa_limits::iw_a(&ad_k(w.b(), &v), 0.5).unwrap();
        let want = (0.5 * RootData::sl(2).rho.pair(&a)).exp();
        assert!((wave_eval(&w, &v).unwrap().norm() - want).abs() < 1e-13);
    }

    #[test]
    fn m_invariance() {
        let v = x_sl2() * 0.8 - h_sl2() * 0.3;
        let w1 = WaveSpec::sl2(3.0, 0.4, 0.7).unwrap();
        let w2 = WaveSpec::new(Covector::sl2(3.0), -rotation(0.4), 0.7).unwrap();
        let d = wave_eval(&w1, &v).unwrap() - wave_eval(&w2, &v).unwrap();
        assert!(d.norm() < 1e-12);
    }

    #[test]
    fn zoom_examples() {
        let c = ScalarField::constant(Complex64::new(0.5, 2.0));
        let z = zoom_field(&c, 0.25).unwrap();
        assert_eq!(z.eval(&x_sl2()).unwrap(), Complex64::new(0.5, 2.0));
        let f = wave_field(&WaveSpec::sl2(5.0, 0.3, 1.0).unwrap());
        let x = x_sl2() * 0.4 + h_sl2() * 0.9;
        let zz = zoom_field(&zoom_field(&f, 0.5).unwrap(), 0.25).unwrap();
        let z = zoom_field(&f, 0.125).unwrap();
        assert!((zz.eval(&x).unwrap() - z.eval(&x).unwrap()).norm() < 1e-14);
        let g = GridSpec::sl2(1.0, 5).unwrap();
        let s =
            ScalarField::from_samples(g.clone(), vec![Complex64::new(1.0, 0.0); g.len()]).unwrap();
        assert!(matches!(zoom_field(&s, 2.0), Err(Error::Range(_))));
        assert!(zoom_field(&s, 0.5).is_ok());
    }

    #[test]
    fn quasi_regular_examples() {
        let w = WaveSpec::sl2(3.0, 0.4, 0.6).unwrap();
        let f = wave_field(&w);
        let x = x_sl2() * 0.4 + h_sl2() * 0.9;
        let id = quasi_regular(&DeformedElement::identity(2, 0.6), &f).unwrap();
        assert!((id.eval(&x).unwrap() - f.eval(&x).unwrap()).norm() < 1e-12);
        // K permutes the waves: π(k)ε_b = ε_{b·k⁻¹}.
        let k = DeformedElement::new(rotation(0.9), Mat::zeros(2, 2), 0.6).unwrap();
        let moved = quasi_regular(&k, &f).unwrap();
        let target = WaveSpec::sl2(3.0, 0.4 - 0.9, 0.6).unwrap();
        assert!((moved.eval(&x).unwrap() - wave_eval(&target, &x).unwrap()).norm() < 1e-12);
        // Motion group translations.
        let pw = wave_field(&WaveSpec::sl2(3.0, 0.4, 0.0).unwrap());
        let v = x_sl2() * 0.3;
        let tr = DeformedElement::new(Mat::identity(2, 2), v.clone(), 0.0).unwrap();
        let moved = quasi_regular(&tr, &pw).unwrap();
        assert!((moved.eval(&x).unwrap() - pw.eval(&(&x - &v)).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn poisson_examples() {
        let one = CircleFunction::mode(0);
        let g = GridSpec::sl2(1.0, 5).unwrap();
        let p = poisson(&one, &Covector::sl2(4.0), 1.0, &g, None).unwrap();
        assert!((p.eval(&Mat::zeros(2, 2)).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        let r = 0.9;
        let a = p.eval(&p_from_coords(2, &[r, 0.0])).unwrap();
        let b = p.eval(&p_from_coords(2, &[0.0, r])).unwrap();
        let c = p.eval(&p_from_coords(2, &[r * 0.6, -r * 0.8])).unwrap();
        assert!((a - b).norm() < 1e-8 && (a - c).norm() < 1e-8);
        let dbl = poisson_closed(
            &one,
            &Covector::sl2(4.0),
            1.0,
            2 * poisson_nodes(0, &Covector::sl2(4.0), 1.0, 1.5),
        )
        .unwrap();
        let x = p_from_coords(2, &[0.3, 0.7]);
        assert!((dbl.eval(&x).unwrap() - p.eval(&x).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn isotypic_examples() {
        let c = ScalarField::constant(Complex64::new(2.0, -1.0));
        let x = x_sl2() * 0.4 + h_sl2() * 0.9;
        let p0 = isotypic_project(&c, 0, 16, 0).unwrap();
        assert!((p0.eval(&x).unwrap() - Complex64::new(2.0, -1.0)).norm() < 1e-14);
        let p2 = isotypic_project(&c, 2, 16, 0).unwrap();
        assert!(p2.eval(&x).unwrap().norm() < 1e-14);
        assert!(isotypic_project(&c, 3, 16, 0).is_err());
    }
}
