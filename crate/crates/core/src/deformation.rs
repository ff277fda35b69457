//! The groups `G_t` on the fixed set `K × p`.
//!
//! For `t > 0` the bijection `φ_t(k, v) = exp(t·v)·k` transports the group law
//! of `G`; at `t = 0` the set carries the motion-group law
//! `(k₁, v₁)·(k₂, v₂) = (k₁k₂, v₁ + Ad(k₁)v₂)`. Every operation has an explicit
//! `t = 0` branch.

use crate::matgroup::{
    ad_k, bracket, cartan_decompose, form_b, k_basis, mat_exp, p_basis, p_dim, spd_log,
    AlgebraVector,
};
use crate::{Error, Mat, Result};

/// A point `(k, v, t)` of `G_t` in the chart `K × p`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformedElement {
    k: Mat,
    v: Mat,
    t: f64,
}

impl DeformedElement {
    pub fn new(k: Mat, v: Mat, t: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!(
                "scale t = {t} must be finite and ≥ 0"
            )));
        }
        if !k.is_square() || k.shape() != v.shape() || k.nrows() < 2 {
            return Err(Error::Contract(
                "k and v must be square of equal size ≥ 2".into(),
            ));
        }
        let n = k.nrows();
        if (&k * k.transpose() - Mat::identity(n, n)).amax() > 1e-10 || k.determinant() < 0.0 {
            return Err(Error::Contract("k is not in SO(n)".into()));
        }
        let scale = v.amax().max(1.0);
        if (&v - v.transpose()).amax() > 1e-12 * scale || v.trace().abs() > 1e-12 * scale {
            return Err(Error::Contract("v is not symmetric traceless".into()));
        }
        Ok(Self { k, v, t })
    }

    pub(crate) fn from_parts(k: Mat, v: Mat, t: f64) -> Self {
        Self { k, v, t }
    }

    pub fn identity(n: usize, t: f64) -> Self {
        Self {
            k: Mat::identity(n, n),
            v: Mat::zeros(n, n),
            t,
        }
    }

    pub fn k(&self) -> &Mat {
        &self.k
    }

    pub fn v(&self) -> &Mat {
        &self.v
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn n(&self) -> usize {
        self.k.nrows()
    }

    pub fn with_t(&self, t: f64) -> Self {
        Self {
            k: self.k.clone(),
            v: self.v.clone(),
            t,
        }
    }

    /// Distance in the chart: Frobenius distance of the `k` parts plus that of the `v` parts.
    pub fn chart_distance(&self, other: &Self) -> f64 {
        (&self.k - &other.k).norm() + (&self.v - &other.v).norm()
    }
}

fn require_positive(t: f64, what: &str) -> Result<()> {
    if t > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} needs t > 0, got {t}")))
    }
}

/// `φ_t(k, v) = exp(t·v)·k`.
pub fn phi_t(e: &DeformedElement) -> Result<Mat> {
    require_positive(e.t, "phi_t")?;
    Ok(mat_exp(&(&e.v * e.t))? * &e.k)
}

/// `φ_t(a)⁻¹ = kᵀ·exp(−t·v)`.
fn phi_t_inverse_matrix(e: &DeformedElement) -> Result<Mat> {
    Ok(e.k.transpose() * mat_exp(&(&e.v * (-e.t)))?)
}

/// `φ_t⁻¹(g)` through the Cartan decomposition `g = exp(x)·k`.
pub fn phi_t_inv(g: &Mat, t: f64) -> Result<DeformedElement> {
    require_positive(t, "phi_t_inv")?;
    let (k, x) = cartan_decompose(g)?;
    Ok(DeformedElement::from_parts(k, x / t, t))
}

fn same_t(a: &DeformedElement, b: &DeformedElement) -> Result<f64> {
    if a.t != b.t {
        return Err(Error::Contract(format!(
            "elements of different groups: t = {} and t = {}",
            a.t, b.t
        )));
    }
    Ok(a.t)
}

/// The group law of `G_t`.
pub fn product_t(a: &DeformedElement, b: &DeformedElement) -> Result<DeformedElement> {
    let t = same_t(a, b)?;
    if t == 0.0 {
        let k = &a.k * &b.k;
        let v = &a.v + ad_k(&a.k, &b.v);
        return Ok(DeformedElement::from_parts(k, v, 0.0));
    }
    phi_t_inv(&(phi_t(a)? * phi_t(b)?), t)
}

/// The group inverse in `G_t`.
pub fn inverse_t(a: &DeformedElement) -> Result<DeformedElement> {
    if a.t == 0.0 {
        let k = a.k.transpose();
        let v = -ad_k(&k, &a.v);
        return Ok(DeformedElement::from_parts(k, v, 0.0));
    }
    phi_t_inv(&phi_t_inverse_matrix(a)?, a.t)
}

/// The action of `G` on `p ≅ G/K`: `½·log(g·exp(2x)·gᵀ)`.
pub fn act_g(g: &Mat, x: &Mat) -> Result<Mat> {
    let s = g * mat_exp(&(x * 2.0))? * g.transpose();
    traceless(spd_log(&s)? * 0.5)
}

fn traceless(mut x: Mat) -> Result<Mat> {
    let n = x.nrows();
    let tr = x.trace() / n as f64;
    for i in 0..n {
        x[(i, i)] -= tr;
    }
    Ok(x)
}

/// The action `γ ·_t x` of `G_t` on `p`.
pub fn action_t(a: &DeformedElement, x: &Mat) -> Result<Mat> {
    if a.t == 0.0 {
        return Ok(&a.v + ad_k(&a.k, x));
    }
    Ok(act_g(&phi_t(a)?, &(x * a.t))? / a.t)
}

/// Pull-back data of `γ` at `x`: the point `y = γ⁻¹ ·_t x` and the `K`-cocycle
/// `k_c` defined by `φ_t(γ)⁻¹·exp(t·x) = exp(t·y)·k_c` (at `t = 0`, `k_c = k⁻¹`).
pub fn pullback_t(a: &DeformedElement, x: &Mat) -> Result<(Mat, Mat)> {
    if a.t == 0.0 {
        let kinv = a.k.transpose();
        let y = ad_k(&kinv, &(x - &a.v));
        return Ok((y, kinv));
    }
    let h = phi_t_inverse_matrix(a)? * mat_exp(&(x * a.t))?;
    let (kc, ty) = cartan_decompose(&h)?;
    Ok((ty / a.t, kc))
}

/// `z_t(x) = x/t`.
pub fn zoom(x: &Mat, t: f64) -> Result<Mat> {
    require_positive(t, "zoom")?;
    Ok(x / t)
}

/// The bracket of `g_t`: `[k,k]` and `[k,p]` unchanged, `[p,p]` scaled by `t²`.
pub fn bracket_t(x: &AlgebraVector, y: &AlgebraVector, t: f64) -> AlgebraVector {
    let xk = AlgebraVector::from_matrix(x.k_part());
    let xp = AlgebraVector::from_matrix(x.p_part());
    let yk = AlgebraVector::from_matrix(y.k_part());
    let yp = AlgebraVector::from_matrix(y.p_part());
    let kk = bracket(&xk, &yk);
    let kp = &bracket(&xk, &yp) + &bracket(&xp, &yk);
    let pp = &bracket(&xp, &yp) * (t * t);
    &(&kk + &kp) + &pp
}

/// Default central-difference step of [`metric_t`].
pub const METRIC_STEP: f64 = 1e-4;

fn transport_derivative(x: &Mat, xi: &Mat, t: f64, h: f64) -> Result<Mat> {
    let n = x.nrows();
    let base = DeformedElement::from_parts(Mat::identity(n, n), x.clone(), t);
    let to_origin = inverse_t(&base)?;
    let plus = action_t(&to_origin, &(x + xi * h))?;
    let minus = action_t(&to_origin, &(x - xi * h))?;
    Ok((plus - minus) / (2.0 * h))
}

/// `η_t(x)(ξ, ζ)`: the `G_t`-invariant metric equal to `B` at the origin, through
/// central differences of the transport of `x` to the origin.
pub fn metric_t(x: &Mat, xi: &Mat, zeta: &Mat, t: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Domain("metric step must be positive".into()));
    }
    let dxi = transport_derivative(x, xi, t, h)?;
    let dzeta = transport_derivative(x, zeta, t, h)?;
    Ok(form_b(
        &AlgebraVector::from_p(&dxi),
        &AlgebraVector::from_p(&dzeta),
    ))
}

/// The Gram matrix of `η_t` at a point, in the basis of [`p_basis`].
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSample {
    pub base_point: Mat,
    pub gram: Mat,
    pub t: f64,
}

pub fn metric_sample(x: &Mat, t: f64, h: f64) -> Result<MetricSample> {
    let basis = p_basis(x.nrows());
    let derivs = basis
        .iter()
        .map(|e| transport_derivative(x, e, t, h))
        .collect::<Result<Vec<_>>>()?;
    let d = basis.len();
    let mut gram = Mat::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let b = crate::matgroup::trace_product(&derivs[i], &derivs[j]);
            gram[(i, j)] = b;
            gram[(j, i)] = b;
        }
    }
    Ok(MetricSample {
        base_point: x.clone(),
        gram,
        t,
    })
}

/// The coadjoint action of `G_t` on `g* ≅ g` (pairing `tr(XᵀY)`).
///
/// For `t > 0` this is `φ_alg ∘ Ad(φ_t(γ)^{-T}) ∘ φ_alg⁻¹` with `φ_alg(k + v) = k + t·v`;
/// at `t = 0` it is `(ζ, ξ) ↦ (Ad(k)ζ + [Ad(k)ξ, v], Ad(k)ξ)`.
pub fn coadjoint_t(gamma: &DeformedElement, z: &AlgebraVector) -> Result<AlgebraVector> {
    let t = gamma.t;
    if t == 0.0 {
        let k = &gamma.k;
        let zeta = k * z.k_part() * k.transpose();
        let xi = ad_k(k, z.p_part());
        let comm = &xi * &gamma.v - &gamma.v * &xi;
        let kp = AlgebraVector::from_matrix(&(zeta + comm));
        return AlgebraVector::from_parts(kp.k_part().clone(), xi);
    }
    // φ_t(γ)^{-T} = exp(−t·v)·k
    let g_inv_t = mat_exp(&(&gamma.v * (-t)))? * &gamma.k;
    let g_t = g_inv_t
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Domain("singular group element".into()))?;
    let w = z.scale_p(1.0 / t).to_matrix();
    let moved = AlgebraVector::from_matrix(&(&g_inv_t * w * g_t));
    Ok(moved.scale_p(t))
}

/// The `i`-th point of the additive recurrence (Kronecker) sequence in `[0,1)^d`
/// built on the generalized golden ratio.
pub fn kronecker_point(i: u64, d: usize) -> Vec<f64> {
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
    }
    (1..=d)
        .map(|j| {
            let alpha = (1.0 / phi.powi(j as i32)).fract();
            (0.5 + alpha * (i as f64 + 1.0)).fract()
        })
        .collect()
}

/// Group elements sampled deterministically: rotation coordinates in `[−π, π]`,
/// `p` coordinates in `[−radius, radius]`.
pub fn sweep_elements(
    n: usize,
    t: f64,
    samples: usize,
    radius: f64,
) -> Result<Vec<DeformedElement>> {
    let kb = k_basis(n);
    let dk = kb.len();
    let dp = p_dim(n);
    (0..samples)
        .map(|i| {
            let u = kronecker_point(i as u64, dk + dp);
            let mut gen = Mat::zeros(n, n);
            for (c, e) in u[..dk].iter().zip(&kb) {
                gen += e * ((2.0 * c - 1.0) * std::f64::consts::PI * std::f64::consts::SQRT_2);
            }
            let k = mat_exp(&gen)?;
            let coords: Vec<f64> = u[dk..].iter().map(|c| (2.0 * c - 1.0) * radius).collect();
            let v = crate::matgroup::p_from_coords(n, &coords);
            Ok(DeformedElement::from_parts(k, v, t))
        })
        .collect()
}

/// Samples of the `G_t`-coadjoint orbit of `z`.
pub fn coadjoint_orbit_t(z: &AlgebraVector, t: f64, samples: usize) -> Result<Vec<AlgebraVector>> {
    if samples == 0 {
        return Err(Error::Contract("orbit needs at least one sample".into()));
    }
    let n = z.k_part().nrows();
    sweep_elements(n, t, samples, 1.5)?
        .iter()
        .map(|g| coadjoint_t(g, z))
        .collect()
}
