//! Sections built from a fine `K`-type of the reducible `λ = 0`, `σ = sign`
//! principal series of `SL(2,R)`, the transform `𝒯` from the compact picture
//! into fields on `p`, and the contraction onto the fine type.
//!
//! The section is `γ̄(k·e^H·n) = e^{−ρ(H)}·μ(k)·v`, so that
//! `F_b(g) = γ̄(g⁻¹b)` satisfies `F_b(gk) = μ(k)⁻¹F_b(g)` and the group acts on
//! its trivialization over `p` through the same cocycle as the discrete series.
//! The deformed family is `Γ^t_b(x) = Γ¹_b(t·x)`, written with the `t`-Iwasawa maps.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::compact_picture::{circle_nodes, min_nodes, ps_op_samples, CircleFunction, Parity};
use crate::deformation::DeformedElement;
use crate::discrete_series::{character, twisted_pullback};
use crate::field::{GridSpec, ScalarField};
use crate::iwasawa_limits::iw_both;
use crate::matgroup::{ad_k, iwasawa_decompose, rotation, Covector, RootData};
use crate::report::{validate_ladder, ConvergenceReport};
use crate::{Error, Mat, Result};

/// Tolerance of the runtime `b ↦ b·m` invariance check of the `𝒯` integrand.
pub const M_INVARIANCE_TOL: f64 = 1e-10;

/// Smallest quadrature used by [`t_transform`].
const MIN_TRANSFORM_NODES: usize = 64;

/// A fine `K`-type `μ(R(θ)) = e^{iμ̂θ}` with odd `μ̂`, so that `μ|_M = σ = sign`,
/// and the unit vector `v ∈ V^μ ≅ ℂ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FineKTypeData {
    mu_weight: i64,
    v: Complex64,
}

impl FineKTypeData {
    pub fn new(mu_weight: i64) -> Result<Self> {
        if mu_weight.rem_euclid(2) != 1 {
            return Err(Error::Contract(format!(
                "μ̂ = {mu_weight} is even, so μ does not restrict to the sign character of M"
            )));
        }
        Ok(Self {
            mu_weight,
            v: Complex64::new(1.0, 0.0),
        })
    }

    pub fn mu_weight(&self) -> i64 {
        self.mu_weight
    }

    pub fn v(&self) -> Complex64 {
        self.v
    }

    pub fn sigma(&self) -> Parity {
        Parity::Sign
    }

    pub fn mu(&self, k: &Mat) -> Complex64 {
        character(self.mu_weight, k)
    }

    /// The Fourier mode of `L²_σ(K)` paired non-trivially with `v` by `𝒯`:
    /// the matrix coefficient `k ↦ ⟨v, μ(k⁻¹)v⟩ = e^{−iμ̂θ}`.
    pub fn matrix_coefficient_mode(&self) -> i64 {
        -self.mu_weight
    }
}

fn rho_pair(a: &Mat) -> f64 {
    RootData::sl(2).rho.pair(a)
}

fn check_sl2(x: &Mat) -> Result<()> {
    if x.nrows() != 2 || x.ncols() != 2 {
        return Err(Error::Contract(
            "fine K-type sections are implemented for SL(2,R)".into(),
        ));
    }
    Ok(())
}

/// `γ̄(g) = e^{−ρ(H)}·μ(κ(g))·v`.
pub fn gamma_bar(g: &Mat, d: &FineKTypeData) -> Result<Complex64> {
    check_sl2(g)?;
    let iw = iwasawa_decompose(g)?;
    Ok((-rho_pair(&iw.log_a)).exp() * d.mu(&iw.kappa) * d.v)
}

/// `Γ^t_b(x) = e^{−tρ(𝕴_t(w))}·μ(𝕶_t(w))·μ(b)·v` with `w = −Ad(b⁻¹)x`;
/// at `t = 1` this is `γ̄(exp(−x)·b)` and at `t = 0` it is `μ(b)·v`.
pub fn gamma_section(b: &Mat, x: &Mat, t: f64, d: &FineKTypeData) -> Result<Complex64> {
    check_sl2(x)?;
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t = {t} must be non-negative")));
    }
    let w = -ad_k(&b.transpose(), x);
    let (a, kappa) = iw_both(&w, t)?;
    Ok((-t * rho_pair(&a)).exp() * d.mu(&kappa) * d.mu(b) * d.v)
}

/// `(1/N)·Σ_j Γ^t_{b_j}(x)·Φ(b_j)` from node values of `Φ`, checking that each
/// pair of nodes related by `m = −I` contributes the same term.
fn transform_at(samples: &[Complex64], x: &Mat, t: f64, d: &FineKTypeData) -> Result<Complex64> {
    let n = samples.len();
    let thetas = circle_nodes(n);
    let terms = thetas
        .iter()
        .zip(samples)
        .map(|(th, phi)| Ok(gamma_section(&rotation(*th), x, t, d)? * phi))
        .collect::<Result<Vec<_>>>()?;
    let half = n / 2;
    for j in 0..half {
        let (a, b) = (terms[j], terms[j + half]);
        if (a - b).norm() > M_INVARIANCE_TOL * a.norm().max(1.0) {
            return Err(Error::Contract(format!(
                "𝒯 integrand is not M-invariant at node {j}: {a} vs {b}"
            )));
        }
    }
    Ok(terms.iter().sum::<Complex64>() / n as f64)
}

/// `𝒯_t` applied to node values of a `σ`-function at `N` uniform nodes (`N` even).
pub fn t_transform_samples(
    samples: Vec<Complex64>,
    t: f64,
    d: &FineKTypeData,
) -> Result<ScalarField> {
    if samples.is_empty() || !samples.len().is_multiple_of(2) {
        return Err(Error::Contract(
            "𝒯 needs an even, positive number of nodes".into(),
        ));
    }
    let d = *d;
    Ok(ScalarField::closed(move |x| {
        transform_at(&samples, x, t, &d)
    }))
}

/// `𝒯_t Φ = ∫_K Γ^t_b·Φ(b) db` by uniform quadrature with at least
/// `4·bandwidth + 32` nodes, sampled on `grid` when one is given.
pub fn t_transform(
    phi: &CircleFunction,
    t: f64,
    grid: Option<&GridSpec>,
    d: &FineKTypeData,
) -> Result<ScalarField> {
    if phi.parity() != d.sigma() {
        return Err(Error::Contract("Φ must have the parity of σ = sign".into()));
    }
    let nodes = min_nodes(phi.bandwidth()).max(MIN_TRANSFORM_NODES);
    let field = t_transform_samples(phi.samples(nodes), t, d)?;
    match grid {
        Some(g) => field.sample_on(g),
        None => Ok(field),
    }
}

/// `(π_t(a)F)(x) = μ(k_c)⁻¹·F(y)` with `φ_t(a)⁻¹exp(t·x) = exp(t·y)·k_c`.
pub fn qs_rep(a: &DeformedElement, f: &ScalarField, d: &FineKTypeData) -> Result<ScalarField> {
    twisted_pullback(a, f, d.mu_weight)
}

/// The compact-picture image `π^{t,comp}_{0,σ}(a)Φ` at `N` nodes, the
/// partner of [`qs_rep`] under `𝒯`.
pub fn compact_action_samples(
    a: &DeformedElement,
    phi: &CircleFunction,
    nodes: usize,
) -> Result<Vec<Complex64>> {
    ps_op_samples(a, &Covector::zero(2), phi, nodes)
}

/// `lim_{t→0} 𝒯_tΦ = ∫_K μ(b)·v·Φ(b) db`.
pub fn limit_value(phi: &CircleFunction, d: &FineKTypeData) -> Complex64 {
    let nodes = min_nodes(phi.bandwidth()).max(MIN_TRANSFORM_NODES);
    let s = phi.samples(nodes);
    circle_nodes(nodes)
        .iter()
        .zip(&s)
        .map(|(th, p)| d.mu(&rotation(*th)) * d.v * p)
        .sum::<Complex64>()
        / nodes as f64
}

/// Sup distances over a grid, per `t`, of `C_t𝒯_1Φ` from `𝒯_tΦ` (`"zoom"`),
/// of `𝒯_tΦ` from its limit constant `f_0` (`"vector"`), and of
/// `π_t(k, v, t)𝒯_tΦ` from `μ(k)·f_0` (`"operator"`).
pub fn qs_contract_report(
    phi: &CircleFunction,
    k: &Mat,
    v: &Mat,
    ladder: &[f64],
    d: &FineKTypeData,
    grid: &GridSpec,
) -> Result<ConvergenceReport> {
    validate_ladder(ladder)?;
    let f0 = limit_value(phi, d);
    let target = d.mu(k) * f0;
    let t1 = t_transform(phi, 1.0, None, d)?;
    let nodes: Vec<usize> = (0..grid.len()).collect();
    let mut zoom = Vec::with_capacity(ladder.len());
    let mut vector = Vec::with_capacity(ladder.len());
    let mut operator = Vec::with_capacity(ladder.len());
    for &t in ladder {
        let ft = t_transform(phi, t, None, d)?;
        let zoomed = crate::waves::zoom_field(&t1, t)?;
        let sampled_t = ft.sample_on(grid)?;
        zoom.push(zoomed.sup_distance(grid, &nodes, |x| sampled_t.eval(x))?);
        vector.push(sampled_t.sup_distance(grid, &nodes, |_| Ok(f0))?);
        let a = DeformedElement::new(k.clone(), v.clone(), t)?;
        operator.push(qs_rep(&a, &ft, d)?.sup_distance(grid, &nodes, |_| Ok(target))?);
    }
    let mut report = ConvergenceReport::new(ladder.to_vec());
    report.insert("zoom", zoom)?;
    report.insert("vector", vector)?;
    report.insert("operator", operator)?;
    Ok(report)
}

/// Matrix of outcome values `𝒯_0Φ_i(x_j)`: one row per `Φ_i`, one column per point.
pub fn outcome_matrix(
    phis: &[CircleFunction],
    points: &[Mat],
    d: &FineKTypeData,
) -> Result<DMatrix<Complex64>> {
    let rows = phis
        .par_iter()
        .map(|phi| {
            let f = t_transform(phi, 0.0, None, d)?;
            points.iter().map(|x| f.eval(x)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_fn(phis.len(), points.len(), |i, j| {
        rows[i][j]
    }))
}

/// Singular values of [`outcome_matrix`], largest first.
pub fn outcome_singular_values(
    phis: &[CircleFunction],
    points: &[Mat],
    d: &FineKTypeData,
) -> Result<Vec<f64>> {
    let m = outcome_matrix(phis, points, d)?;
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Number of singular values above `rel_tol` times the largest (0 when all
/// vanish below `abs_tol`).
pub fn outcome_rank(singular: &[f64], rel_tol: f64, abs_tol: f64) -> usize {
    let top = singular.first().copied().unwrap_or(0.0);
    if top <= abs_tol {
        return 0;
    }
    singular.iter().filter(|s| **s > rel_tol * top).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroup::{h_sl2, mat_exp, x_sl2};
    use crate::report::dyadic_ladder;

    fn fine() -> FineKTypeData {
        FineKTypeData::new(1).unwrap()
    }

    #[test]
    fn fine_type_requires_odd_weight() {
        assert!(FineKTypeData::new(2).is_err());
        assert!(FineKTypeData::new(-1).is_ok());
        assert_eq!(fine().matrix_coefficient_mode(), -1);
    }

    #[test]
    fn gamma_examples() {
        let d = fine();
        let origin = Mat::zeros(2, 2);
        for &t in &[0.0, 0.5, 1.0] {
            assert!(
                (gamma_section(&Mat::identity(2, 2), &origin, t, &d).unwrap() - d.v()).norm()
                    < 1e-15
            );
        }
        let x = x_sl2() * 0.6 + h_sl2() * 0.3;
        let b = rotation(0.9);
        let chain = gamma_bar(&(mat_exp(&(-&x)).unwrap() * &b), &d).unwrap();
        assert!((gamma_section(&b, &x, 1.0, &d).unwrap() - chain).norm() < 1e-12);
        assert_eq!(gamma_section(&b, &x, 0.0, &d).unwrap(), d.mu(&b));
        let small = gamma_section(&b, &x, 1e-5, &d).unwrap();
        assert!((small - d.mu(&b)).norm() < 1e-4);
    }

    #[test]
    fn gamma_bar_equivariance() {
        let d = fine();
        let g = mat_exp(&(x_sl2() * 0.4 - h_sl2() * 0.2)).unwrap() * rotation(2.1);
        let h = 0.35;
        let man = -Mat::identity(2, 2)
            * mat_exp(&(h_sl2() * h)).unwrap()
            * Mat::from_row_slice(2, 2, &[1.0, 0.8, 0.0, 1.0]);
        let lhs = gamma_bar(&(&g * man), &d).unwrap();
        let rhs = (-h).exp() * -gamma_bar(&g, &d).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn transform_examples() {
        let d = fine();
        let origin = Mat::zeros(2, 2);
        let xi = CircleFunction::mode(d.matrix_coefficient_mode());
        let at0 = t_transform(&xi, 1.0, None, &d)
            .unwrap()
            .eval(&origin)
            .unwrap();
        assert!(at0.norm() >= 0.4);
        for mode in [1, 3, -3] {
            let v = t_transform(&CircleFunction::mode(mode), 1.0, None, &d)
                .unwrap()
                .eval(&origin)
                .unwrap();
            assert!(v.norm() < 1e-10, "{mode}: {v}");
        }
        let zero = CircleFunction::new(Parity::Sign, Default::default()).unwrap();
        let z = t_transform(&zero, 0.5, None, &d).unwrap();
        assert_eq!(z.eval(&x_sl2()).unwrap(), Complex64::new(0.0, 0.0));
        assert!(t_transform(&CircleFunction::mode(2), 1.0, None, &d).is_err());
    }

    #[test]
    fn transform_is_equivariant() {
        let d = fine();
        let phi = CircleFunction::from_pairs(
            Parity::Sign,
            &[
                (-1, Complex64::new(1.0, 0.0)),
                (3, Complex64::new(0.3, -0.2)),
            ],
        )
        .unwrap();
        let nodes = 256;
        let x = x_sl2() * 0.5 + h_sl2() * -0.4;
        for &t in &[1.0, 0.5] {
            let a = DeformedElement::new(rotation(0.7), x_sl2() * 0.6 + h_sl2() * 0.2, t).unwrap();
            let lhs = qs_rep(
                &a,
                &t_transform_samples(phi.samples(nodes), t, &d).unwrap(),
                &d,
            )
            .unwrap()
            .eval(&x)
            .unwrap();
            let moved = compact_action_samples(&a, &phi, nodes).unwrap();
            let rhs = t_transform_samples(moved, t, &d).unwrap().eval(&x).unwrap();
            assert!((lhs - rhs).norm() < 1e-6, "t = {t}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn rep_examples() {
        let d = fine();
        let c = Complex64::new(0.3, 0.4);
        let f = ScalarField::constant(c);
        let x = x_sl2() * 0.5;
        let id = DeformedElement::identity(2, 0.5);
        assert_eq!(qs_rep(&id, &f, &d).unwrap().eval(&x).unwrap(), c);
        let near = DeformedElement::new(rotation(1e-9), Mat::zeros(2, 2), 0.5).unwrap();
        assert!((qs_rep(&near, &f, &d).unwrap().eval(&x).unwrap() - c).norm() < 1e-8);
        let k = rotation(1.3);
        let a = DeformedElement::new(k.clone(), Mat::zeros(2, 2), 0.0).unwrap();
        let got = qs_rep(&a, &f, &d).unwrap().eval(&x).unwrap();
        assert!((got - d.mu(&k) * c).norm() < 1e-15);
    }

    #[test]
    fn contraction_report() {
        let d = fine();
        let grid = GridSpec::sl2(1.0, 5).unwrap();
        let phi = CircleFunction::mode(-1);
        let r = qs_contract_report(
            &phi,
            &rotation(0.4),
            &(x_sl2() * 0.5),
            &dyadic_ladder(1, 5),
            &d,
            &grid,
        )
        .unwrap();
        assert!(r.metric("zoom").iter().all(|e| *e < 1e-10));
        for m in ["vector", "operator"] {
            assert!(
                crate::report::strictly_decreasing(r.metric(m)),
                "{m}: {:?}",
                r.metric(m)
            );
        }
        let same = qs_contract_report(
            &phi,
            &Mat::identity(2, 2),
            &Mat::zeros(2, 2),
            &[0.5, 0.25, 0.125],
            &d,
            &grid,
        )
        .unwrap();
        assert_eq!(same.metric("vector"), same.metric("operator"));
        assert!((limit_value(&phi, &d) - 1.0).norm() < 1e-14);
        assert!(limit_value(&CircleFunction::mode(1), &d).norm() < 1e-14);
    }

    #[test]
    fn outcome_ranks() {
        let d = fine();
        let points: Vec<Mat> = (0..4).map(|i| x_sl2() * (0.3 * i as f64)).collect();
        let phis: Vec<CircleFunction> = (0..3)
            .map(|i| {
                CircleFunction::from_pairs(
                    Parity::Sign,
                    &[(-1, Complex64::from_polar(1.0 + i as f64, 0.7 * i as f64))],
                )
                .unwrap()
            })
            .collect();
        let s = outcome_singular_values(&phis, &points, &d).unwrap();
        assert_eq!(outcome_rank(&s, 1e-6, 1e-8), 1);
        let other: Vec<CircleFunction> = [1, 3, -3]
            .iter()
            .map(|m| CircleFunction::mode(*m))
            .collect();
        let s = outcome_singular_values(&other, &points, &d).unwrap();
        assert!(s[0] <= 1e-8);
    }
}
