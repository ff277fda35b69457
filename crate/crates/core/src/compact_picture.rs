//! Minimal principal series of `SL(2,R)` in the compact picture on `L²_σ(SO(2))`,
//! the motion-group operators, the renormalization identity and the
//! Dooley–Rice limit.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::deformation::{phi_t, phi_t_inv, DeformedElement};
use crate::iwasawa_limits::iw_both;
use crate::matgroup::{
    ad_k, iwasawa_decompose, proj_a, rotation, rotation_angle, Covector, RootData,
};
use crate::report::{validate_ladder, ConvergenceReport};
use crate::{Error, Mat, Result};

/// A character of `M = {±I}`: trivial (even modes) or sign (odd modes).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Trivial,
    Sign,
}

impl Parity {
    pub fn allows(self, mode: i64) -> bool {
        match self {
            Parity::Trivial => mode.rem_euclid(2) == 0,
            Parity::Sign => mode.rem_euclid(2) == 1,
        }
    }

    pub fn of_mode(mode: i64) -> Self {
        if mode.rem_euclid(2) == 0 {
            Parity::Trivial
        } else {
            Parity::Sign
        }
    }
}

/// Uniform nodes `θ_j = 2πj/N` on the circle.
pub fn circle_nodes(n: usize) -> Vec<f64> {
    (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
}

/// A finite Fourier series `θ ↦ Σ c_n e^{inθ}` on `K = SO(2)` with a fixed parity.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleFunction {
    parity: Parity,
    coeffs: BTreeMap<i64, Complex64>,
}

impl CircleFunction {
    pub fn new(parity: Parity, coeffs: BTreeMap<i64, Complex64>) -> Result<Self> {
        if let Some(bad) = coeffs.keys().find(|n| !parity.allows(**n)) {
            return Err(Error::Contract(format!(
                "mode {bad} violates the {parity:?} parity"
            )));
        }
        if coeffs
            .values()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::Contract("non-finite Fourier coefficient".into()));
        }
        Ok(Self { parity, coeffs })
    }

    /// The basis function `e^{i·mode·θ}`, its parity fixed by the mode.
    pub fn mode(mode: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(mode, Complex64::new(1.0, 0.0));
        Self {
            parity: Parity::of_mode(mode),
            coeffs,
        }
    }

    pub fn from_pairs(parity: Parity, pairs: &[(i64, Complex64)]) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (n, c) in pairs {
            *coeffs.entry(*n).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Self::new(parity, coeffs)
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, mode: i64) -> Complex64 {
        self.coeffs.get(&mode).copied().unwrap_or_default()
    }

    pub fn bandwidth(&self) -> usize {
        self.coeffs
            .keys()
            .map(|n| n.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(n, c)| c * Complex64::from_polar(1.0, *n as f64 * theta))
            .sum()
    }

    /// Values at the `N` uniform nodes.
    pub fn samples(&self, n: usize) -> Vec<Complex64> {
        circle_nodes(n).iter().map(|t| self.eval(*t)).collect()
    }

    /// `L²` norm for the normalized Haar measure.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs
            .values()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn sup_bound(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// Bound on `sup |f'|`.
    pub fn derivative_bound(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(n, c)| n.abs() as f64 * c.norm())
            .sum()
    }

    pub fn l2_distance(&self, other: &Self) -> f64 {
        let keys: std::collections::BTreeSet<i64> = self
            .coeffs
            .keys()
            .chain(other.coeffs.keys())
            .copied()
            .collect();
        keys.iter()
            .map(|n| (self.coeff(*n) - other.coeff(*n)).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Discrete Fourier re-expansion of node values, keeping the modes of the
    /// given parity strictly below the Nyquist frequency.
    pub fn from_samples(parity: Parity, samples: &[Complex64]) -> Self {
        let coeffs = dft(samples);
        let n = samples.len() as i64;
        let mut out = BTreeMap::new();
        for (j, c) in coeffs.into_iter().enumerate() {
            let mode = signed_mode(j as i64, n);
            if 2 * mode.abs() < n && parity.allows(mode) {
                out.insert(mode, c);
            }
        }
        Self {
            parity,
            coeffs: out,
        }
    }
}

fn signed_mode(j: i64, n: i64) -> i64 {
    if 2 * j > n {
        j - n
    } else {
        j
    }
}

fn dft(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    if n == 0 {
        return buf;
    }
    FftPlanner::<f64>::new()
        .plan_fft_forward(n)
        .process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Largest Fourier coefficient of the wrong parity in node values.
pub fn parity_leak(parity: Parity, samples: &[Complex64]) -> f64 {
    let n = samples.len() as i64;
    dft(samples)
        .into_iter()
        .enumerate()
        .filter(|(j, _)| !parity.allows(signed_mode(*j as i64, n)))
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max)
}

/// `L²` distance of two node-value vectors for the normalized measure.
pub fn l2_samples(a: &[Complex64], b: &[Complex64]) -> f64 {
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    (s / a.len() as f64).sqrt()
}

pub fn sup_samples(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Minimum node count accepted for a function of the given bandwidth.
pub fn min_nodes(bandwidth: usize) -> usize {
    4 * bandwidth + 32
}

/// Mackey parameter `(χ, μ)`: a functional on `a` and an `M`-character given
/// by the parity of the integer `mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct MackeyParameter {
    pub chi: Covector,
    pub mu: i64,
}

impl MackeyParameter {
    pub fn new(chi: Covector, mu: i64) -> Self {
        Self { chi, mu }
    }

    pub fn sl2(ell: f64, mu: i64) -> Self {
        Self::new(Covector::sl2(ell), mu)
    }

    pub fn is_regular(&self) -> bool {
        self.chi.0.iter().any(|c| *c != 0.0)
    }

    pub fn parity(&self) -> Parity {
        Parity::of_mode(self.mu)
    }
}

fn check_sl2(e: &DeformedElement) -> Result<()> {
    if e.n() != 2 {
        return Err(Error::Contract(
            "the compact picture is implemented for SL(2,R)".into(),
        ));
    }
    Ok(())
}

fn check_nodes(f: &CircleFunction, nodes: usize) -> Result<()> {
    let required = min_nodes(f.bandwidth());
    if nodes < required {
        return Err(Error::Aliasing { nodes, required });
    }
    Ok(())
}

/// Node values of `π^{t,comp}_{λ,σ}(a) f` at the `N` uniform nodes.
pub fn ps_op_samples(
    a: &DeformedElement,
    lambda: &Covector,
    f: &CircleFunction,
    nodes: usize,
) -> Result<Vec<Complex64>> {
    check_sl2(a)?;
    if a.t() == 0.0 {
        return Err(Error::Domain(
            "ps_op needs t > 0; use mg_op at t = 0".into(),
        ));
    }
    check_nodes(f, nodes)?;
    let t = a.t();
    let rho = RootData::sl(2).rho;
    let g_inv = phi_t(a)?
        .try_inverse()
        .ok_or_else(|| Error::Domain("singular group element".into()))?;
    circle_nodes(nodes)
        .par_iter()
        .map(|theta| {
            let iw = iwasawa_decompose(&(&g_inv * rotation(*theta)))?;
            let a_t = iw.log_a / t;
            let re = -t * rho.pair(&a_t);
            let im = -lambda.pair(&a_t);
            Ok(Complex64::new(re, im).exp() * f.eval(rotation_angle(&iw.kappa)))
        })
        .collect()
}

/// `π^{t,comp}_{λ,σ}(a) f`, re-expanded in Fourier modes.
pub fn ps_op(
    a: &DeformedElement,
    lambda: &Covector,
    f: &CircleFunction,
    nodes: usize,
) -> Result<CircleFunction> {
    let s = ps_op_samples(a, lambda, f, nodes)?;
    Ok(CircleFunction::from_samples(f.parity(), &s))
}

/// Node values of the motion-group operator `π_0(k, v)`:
/// `u ↦ e^{i⟨χ, Ad(u⁻¹)v⟩} f(k⁻¹u)`.
pub fn mg_op_samples(
    k: &Mat,
    v: &Mat,
    m: &MackeyParameter,
    f: &CircleFunction,
    nodes: usize,
) -> Result<Vec<Complex64>> {
    if m.parity() != f.parity() {
        return Err(Error::Contract(
            "σ of the Mackey parameter differs from the parity of f".into(),
        ));
    }
    check_nodes(f, nodes)?;
    let phi = rotation_angle(k);
    Ok(circle_nodes(nodes)
        .iter()
        .map(|theta| {
            let w = ad_k(&rotation(-theta), v);
            Complex64::from_polar(1.0, m.chi.pair(&w)) * f.eval(theta - phi)
        })
        .collect())
}

pub fn mg_op(
    k: &Mat,
    v: &Mat,
    m: &MackeyParameter,
    f: &CircleFunction,
    nodes: usize,
) -> Result<CircleFunction> {
    let s = mg_op_samples(k, v, m, f, nodes)?;
    Ok(CircleFunction::from_samples(f.parity(), &s))
}

/// Residuals of the renormalization identity for each basis mode.
#[derive(Debug, Clone, PartialEq)]
pub struct RenormReport {
    pub residual: f64,
    pub per_mode: Vec<(i64, f64)>,
}

/// Compares `π^{t,comp}_χ(φ_t⁻¹ g)` with `π^{1,comp}_{χ/t}(g)` on basis modes.
pub fn renorm_check(
    g: &Mat,
    chi: &Covector,
    t: f64,
    modes: &[i64],
    nodes: usize,
) -> Result<RenormReport> {
    if !(t > 0.0) {
        return Err(Error::Domain("renorm_check needs t > 0".into()));
    }
    let lhs_el = phi_t_inv(g, t)?;
    let rhs_el = phi_t_inv(g, 1.0)?;
    let chi_t = chi.scale(1.0 / t);
    let mut per_mode = Vec::with_capacity(modes.len());
    for &mode in modes {
        let e = CircleFunction::mode(mode);
        let lhs = ps_op_samples(&lhs_el, chi, &e, nodes)?;
        let rhs = ps_op_samples(&rhs_el, &chi_t, &e, nodes)?;
        per_mode.push((mode, l2_samples(&lhs, &rhs)));
    }
    let residual = per_mode.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(RenormReport { residual, per_mode })
}

/// Default node count for Dooley–Rice comparisons.
pub fn dooley_rice_nodes(f: &CircleFunction) -> usize {
    min_nodes(f.bandwidth()).max(256)
}

/// `L²` (`"l2"`) and sup-norm (`"sup"`) distances between
/// `π^{t,comp}_χ(k, v, t) f` and `π_0(k, v) f` along the ladder.
pub fn dooley_rice_report(
    k: &Mat,
    v: &Mat,
    m: &MackeyParameter,
    f: &CircleFunction,
    ladder: &[f64],
) -> Result<ConvergenceReport> {
    if !m.is_regular() {
        return Err(Error::Contract(
            "Dooley–Rice limit needs a regular χ".into(),
        ));
    }
    validate_ladder(ladder)?;
    let nodes = dooley_rice_nodes(f);
    let limit = mg_op_samples(k, v, m, f, nodes)?;
    let mut l2 = Vec::with_capacity(ladder.len());
    let mut sup = Vec::with_capacity(ladder.len());
    for &t in ladder {
        let a = DeformedElement::new(k.clone(), v.clone(), t)?;
        let s = ps_op_samples(&a, &m.chi, f, nodes)?;
        l2.push(l2_samples(&s, &limit));
        sup.push(sup_samples(&s, &limit));
    }
    let mut report = ConvergenceReport::new(ladder.to_vec());
    report.insert("l2", l2)?;
    report.insert("sup", sup)?;
    Ok(report)
}

/// Split of the Dooley–Rice gap at one scale into its Iwasawa-limit terms.
///
/// At the node `u`, with `w = Ad(u⁻¹)v`, the `G_t` side reads
/// `e^{−i⟨χ, 𝕴_t(−w)⟩} e^{−t⟨ρ, 𝕴_t(−w)⟩} f(k⁻¹u·𝕶_t(−w))`. The three terms bound
/// the phase change, the modulus change and the shift of the argument of `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DooleyRiceTerms {
    pub error: f64,
    pub phase_term: f64,
    pub modulus_term: f64,
    pub translation_term: f64,
    /// Largest value over nodes of `error − (sum of the three terms)`; non-positive
    /// when the bound holds everywhere.
    pub worst_excess: f64,
}

pub fn dooley_rice_terms(
    k: &Mat,
    v: &Mat,
    m: &MackeyParameter,
    f: &CircleFunction,
    t: f64,
    nodes: usize,
) -> Result<DooleyRiceTerms> {
    let a = DeformedElement::new(k.clone(), v.clone(), t)?;
    let lhs = ps_op_samples(&a, &m.chi, f, nodes)?;
    let rhs = mg_op_samples(k, v, m, f, nodes)?;
    let rho = RootData::sl(2).rho;
    let (fmax, dfmax) = (f.sup_bound(), f.derivative_bound());
    let mut out = DooleyRiceTerms {
        error: 0.0,
        phase_term: 0.0,
        modulus_term: 0.0,
        translation_term: 0.0,
        worst_excess: f64::NEG_INFINITY,
    };
    for (j, theta) in circle_nodes(nodes).iter().enumerate() {
        let w = -ad_k(&rotation(-theta), v);
        let (ia, ik) = iw_both(&w, t)?;
        let modulus = (-t * rho.pair(&ia)).exp();
        let phase = m.chi.pair(&(&ia - proj_a(&w))).abs() * modulus * fmax;
        let modt = (modulus - 1.0).abs() * fmax;
        let trans = rotation_angle(&ik).abs() * dfmax;
        let err = (lhs[j] - rhs[j]).norm();
        out.error = out.error.max(err);
        out.phase_term = out.phase_term.max(phase);
        out.modulus_term = out.modulus_term.max(modt);
        out.translation_term = out.translation_term.max(trans);
        out.worst_excess = out.worst_excess.max(err - (phase + modt + trans));
    }
    Ok(out)
}
