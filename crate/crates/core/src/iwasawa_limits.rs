//! The Iwasawa maps `𝕴_t: p → a` and `𝕶_t: p → K` of the deformed groups.
//!
//! Both are computed on the `G` side: `𝕴_t(v) = 𝕴(t·v)/t` and
//! `𝕶_t(v) = κ(exp(t·v))`. At `t = 0` they return their limits, the
//! orthogonal projection onto `a` and the identity of `K`.

use rayon::prelude::*;

use crate::matgroup::{distance_to_identity, iwasawa_decompose, mat_exp, p_basis, proj_a};
use crate::report::{validate_ladder, ConvergenceReport};
use crate::{Error, Mat, Result};

/// Central-difference step for derivative errors.
pub const DERIVATIVE_STEP: f64 = 1e-3;

/// `𝕴(w) = logA(exp(w))`, the `t = 1` map.
pub fn iw_a_one(w: &Mat) -> Result<Mat> {
    Ok(iwasawa_decompose(&mat_exp(w)?)?.log_a)
}

/// `𝕴_t(v)`.
pub fn iw_a(v: &Mat, t: f64) -> Result<Mat> {
    if t == 0.0 {
        return Ok(proj_a(v));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("iw_a needs t ≥ 0, got {t}")));
    }
    Ok(iw_a_one(&(v * t))? / t)
}

/// `𝕶_t(v)`.
pub fn iw_k(v: &Mat, t: f64) -> Result<Mat> {
    if t == 0.0 {
        let n = v.nrows();
        return Ok(Mat::identity(n, n));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("iw_k needs t ≥ 0, got {t}")));
    }
    Ok(iwasawa_decompose(&mat_exp(&(v * t))?)?.kappa)
}

/// Both Iwasawa maps from one decomposition.
pub fn iw_both(v: &Mat, t: f64) -> Result<(Mat, Mat)> {
    if t == 0.0 {
        return Ok((proj_a(v), iw_k(v, 0.0)?));
    }
    let iw = iwasawa_decompose(&mat_exp(&(v * t))?)?;
    Ok((iw.log_a / t, iw.kappa))
}

fn derivative_error(v: &Mat, t: f64, basis: &[Mat]) -> Result<f64> {
    let h = DERIVATIVE_STEP;
    let mut worst: f64 = 0.0;
    for e in basis {
        let plus = iw_a(&(v + e * h), t)?;
        let minus = iw_a(&(v - e * h), t)?;
        let d = (plus - minus) / (2.0 * h);
        worst = worst.max((d - proj_a(e)).amax());
    }
    Ok(worst)
}

/// Sup-norm errors of `𝕴_t → proj_a`, `𝕶_t → 1`, and of the first derivative
/// of `𝕴_t` against `proj_a`, over a grid of points and a ladder of scales.
///
/// Metrics: `"a"`, `"k"`, `"da"`.
pub fn iw_limit_report(grid: &[Mat], ladder: &[f64]) -> Result<ConvergenceReport> {
    if grid.is_empty() {
        return Err(Error::Contract(
            "iw_limit_report needs a non-empty grid".into(),
        ));
    }
    validate_ladder(ladder)?;
    let basis = p_basis(grid[0].nrows());
    let mut a_err = Vec::with_capacity(ladder.len());
    let mut k_err = Vec::with_capacity(ladder.len());
    let mut d_err = Vec::with_capacity(ladder.len());
    for &t in ladder {
        let per_point = grid
            .par_iter()
            .map(|v| {
                let (a, k) = iw_both(v, t)?;
                let ea = (a - proj_a(v)).amax();
                let ek = distance_to_identity(&k);
                let ed = derivative_error(v, t, &basis)?;
                Ok((ea, ek, ed))
            })
            .collect::<Result<Vec<_>>>()?;
        a_err.push(per_point.iter().map(|p| p.0).fold(0.0, f64::max));
        k_err.push(per_point.iter().map(|p| p.1).fold(0.0, f64::max));
        d_err.push(per_point.iter().map(|p| p.2).fold(0.0, f64::max));
    }
    let mut report = ConvergenceReport::new(ladder.to_vec());
    report.insert("a", a_err)?;
    report.insert("k", k_err)?;
    report.insert("da", d_err)?;
    Ok(report)
}

/// Points of `p` whose coordinates lie on a uniform grid in `[−radius, radius]^dim p`
/// and whose `B`-norm is at most `radius`.
pub fn ball_grid(n: usize, radius: f64, per_axis: usize) -> Vec<Mat> {
    let d = crate::matgroup::p_dim(n);
    let per_axis = per_axis.max(2);
    let step = 2.0 * radius / (per_axis - 1) as f64;
    let total = per_axis.pow(d as u32);
    (0..total)
        .filter_map(|mut idx| {
            let mut coords = Vec::with_capacity(d);
            for _ in 0..d {
                coords.push(-radius + step * (idx % per_axis) as f64);
                idx /= per_axis;
            }
            let r2: f64 = coords.iter().map(|c| c * c).sum();
            (r2 <= radius * radius * (1.0 + 1e-12))
                .then(|| crate::matgroup::p_from_coords(n, &coords))
        })
        .collect()
}
