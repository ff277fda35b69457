//! Small dense matrices and the structure theory of `SL(n,R)`: exponential,
//! SPD logarithm, Cartan and Iwasawa decompositions, adjoint action, the form
//! `B` and the restricted roots of the minimal parabolic.

use crate::{Error, Mat, Result};

/// Largest 1-norm accepted by [`mat_exp`]; beyond it `e^x` may overflow `f64`.
pub const MAX_EXP_NORM: f64 = 700.0;

const TAYLOR_ORDER: usize = 18;
const SCALED_NORM: f64 = 0.5;

fn one_norm(x: &Mat) -> f64 {
    (0..x.ncols())
        .map(|j| x.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring around a truncated Taylor core.
///
/// The input is scaled by `2^-s` until its 1-norm is at most `0.5`, where an
/// order-18 Taylor polynomial is accurate to far below `f64` resolution.
pub fn mat_exp(x: &Mat) -> Result<Mat> {
    if !x.is_square() {
        return Err(Error::Contract("mat_exp needs a square matrix".into()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Range("mat_exp input has non-finite entries".into()));
    }
    let norm = one_norm(x);
    if norm > MAX_EXP_NORM {
        return Err(Error::Range(format!(
            "mat_exp input norm {norm} exceeds {MAX_EXP_NORM}"
        )));
    }
    let n = x.nrows();
    let s = if norm > SCALED_NORM {
        (norm / SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let y = x * 2f64.powi(-s);
    let mut sum = Mat::identity(n, n);
    let mut term = Mat::identity(n, n);
    for k in 1..=TAYLOR_ORDER {
        term = &term * &y / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    Ok(sum)
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues and the orthogonal matrix whose columns are the
/// corresponding eigenvectors.
pub fn symmetric_eigen(s: &Mat) -> (Vec<f64>, Mat) {
    let n = s.nrows();
    let mut a = s.clone();
    let mut v = Mat::identity(n, n);
    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

/// Unique symmetric logarithm of a symmetric positive-definite matrix.
pub fn spd_log(s: &Mat) -> Result<Mat> {
    if !s.is_square() {
        return Err(Error::Domain("spd_log needs a square matrix".into()));
    }
    let scale = s.norm().max(1.0);
    let asym = (s - s.transpose()).amax();
    if !(asym <= 1e-10 * scale) {
        return Err(Error::Domain(format!(
            "spd_log input is not symmetric (asymmetry {asym:e})"
        )));
    }
    let (vals, vecs) = symmetric_eigen(&symmetrize(s));
    let mut logs = Vec::with_capacity(vals.len());
    for &l in &vals {
        if !(l > 0.0) {
            return Err(Error::Domain(format!(
                "spd_log input is not positive definite (eigenvalue {l:e})"
            )));
        }
        logs.push(l.ln());
    }
    let d = Mat::from_diagonal(&nalgebra::DVector::from_vec(logs));
    Ok(symmetrize(&(&vecs * d * vecs.transpose())))
}

fn check_det(g: &Mat) -> Result<()> {
    if !g.is_square() || g.nrows() < 2 {
        return Err(Error::Contract(
            "group elements are square of size ≥ 2".into(),
        ));
    }
    let det = g.determinant();
    let tol = 1e-10 * g.norm().max(1.0).powi(g.nrows() as i32);
    if !((det - 1.0).abs() <= tol) {
        return Err(Error::NotInGroup { det });
    }
    Ok(())
}

/// A matrix of determinant one.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement(Mat);

impl GroupElement {
    pub fn new(mat: Mat) -> Result<Self> {
        if mat.iter().any(|v| !v.is_finite()) {
            return Err(Error::Range("group element has non-finite entries".into()));
        }
        if !mat.is_square() || mat.nrows() < 2 {
            return Err(Error::Contract(
                "group elements are square of size ≥ 2".into(),
            ));
        }
        let det = mat.determinant();
        if !((det - 1.0).abs() <= 1e-10) {
            return Err(Error::NotInGroup { det });
        }
        Ok(Self(mat))
    }

    pub fn identity(n: usize) -> Self {
        Self(Mat::identity(n, n))
    }

    pub fn mat(&self) -> &Mat {
        &self.0
    }

    pub fn into_mat(self) -> Mat {
        self.0
    }
}

/// The rotation `R(θ) = [[cos θ, −sin θ], [sin θ, cos θ]]` in `SO(2)`.
pub fn rotation(theta: f64) -> Mat {
    let (s, c) = theta.sin_cos();
    Mat::from_row_slice(2, 2, &[c, -s, s, c])
}

/// Angle of a rotation matrix in `SO(2)`.
pub fn rotation_angle(k: &Mat) -> f64 {
    k[(1, 0)].atan2(k[(0, 0)])
}

/// `H = diag(1, −1)`.
pub fn h_sl2() -> Mat {
    Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

/// `X = [[0, 1], [1, 0]]`.
pub fn x_sl2() -> Mat {
    Mat::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

/// Distance of an orthogonal matrix from the identity in Frobenius norm.
pub fn distance_to_identity(k: &Mat) -> f64 {
    (k - Mat::identity(k.nrows(), k.ncols())).norm()
}

/// Polar decomposition `g = exp(x)·k` with `x ∈ p` and `k ∈ SO(n)`.
pub fn cartan_decompose(g: &Mat) -> Result<(Mat, Mat)> {
    check_det(g)?;
    let mut x = spd_log(&(g * g.transpose()))? * 0.5;
    let n = x.nrows();
    let tr = x.trace() / n as f64;
    for i in 0..n {
        x[(i, i)] -= tr;
    }
    let k = mat_exp(&(-&x))? * g;
    Ok((k, x))
}

/// The Iwasawa triple `g = κ·exp(logA)·n`.
#[derive(Debug, Clone, PartialEq)]
pub struct IwasawaData {
    pub kappa: Mat,
    pub log_a: Mat,
    pub n_part: Mat,
}

impl IwasawaData {
    pub fn reconstruct(&self) -> Result<Mat> {
        Ok(&self.kappa * mat_exp(&self.log_a)? * &self.n_part)
    }
}

/// Iwasawa decomposition by modified Gram–Schmidt with one re-orthogonalization pass.
pub fn iwasawa_decompose(g: &Mat) -> Result<IwasawaData> {
    check_det(g)?;
    let n = g.nrows();
    let mut q = g.clone();
    let mut r = Mat::zeros(n, n);
    for j in 0..n {
        for _pass in 0..2 {
            for i in 0..j {
                let proj = q.column(i).dot(&q.column(j));
                r[(i, j)] += proj;
                let qi = q.column(i).clone_owned();
                let mut qj = q.column_mut(j);
                qj.axpy(-proj, &qi, 1.0);
            }
        }
        let norm = q.column(j).norm();
        if !(norm > 0.0) {
            return Err(Error::Domain(
                "singular matrix in Iwasawa decomposition".into(),
            ));
        }
        r[(j, j)] = norm;
        q.column_mut(j).scale_mut(1.0 / norm);
    }
    let mut log_a = Mat::zeros(n, n);
    let mut n_part = Mat::zeros(n, n);
    for i in 0..n {
        log_a[(i, i)] = r[(i, i)].ln();
        n_part[(i, i)] = 1.0;
        for j in (i + 1)..n {
            n_part[(i, j)] = r[(i, j)] / r[(i, i)];
        }
    }
    let tr = log_a.trace() / n as f64;
    for i in 0..n {
        log_a[(i, i)] -= tr;
    }
    Ok(IwasawaData {
        kappa: q,
        log_a,
        n_part,
    })
}

/// An element of `g = k ⊕ p` stored through its Cartan split.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraVector {
    k_part: Mat,
    p_part: Mat,
}

impl AlgebraVector {
    /// Splits a traceless matrix into antisymmetric and symmetric parts.
    pub fn from_matrix(m: &Mat) -> Self {
        Self {
            k_part: (m - m.transpose()) * 0.5,
            p_part: symmetrize(m),
        }
    }

    pub fn from_parts(k_part: Mat, p_part: Mat) -> Result<Self> {
        let scale = k_part.norm().max(p_part.norm()).max(1.0);
        if (&k_part + k_part.transpose()).amax() > 1e-12 * scale {
            return Err(Error::Contract("k part is not antisymmetric".into()));
        }
        if (&p_part - p_part.transpose()).amax() > 1e-12 * scale
            || p_part.trace().abs() > 1e-12 * scale
        {
            return Err(Error::Contract("p part is not symmetric traceless".into()));
        }
        Ok(Self::from_matrix(&(k_part + p_part)))
    }

    pub fn from_p(p: &Mat) -> Self {
        Self::from_matrix(p)
    }

    pub fn k_part(&self) -> &Mat {
        &self.k_part
    }

    pub fn p_part(&self) -> &Mat {
        &self.p_part
    }

    pub fn to_matrix(&self) -> Mat {
        &self.k_part + &self.p_part
    }

    /// The Cartan involution `k + p ↦ k − p`.
    pub fn theta(&self) -> Self {
        Self {
            k_part: self.k_part.clone(),
            p_part: -&self.p_part,
        }
    }

    pub fn scale_p(&self, s: f64) -> Self {
        Self {
            k_part: self.k_part.clone(),
            p_part: &self.p_part * s,
        }
    }

    pub fn norm(&self) -> f64 {
        (self.k_part.norm_squared() + self.p_part.norm_squared()).sqrt()
    }
}

impl std::ops::Add for &AlgebraVector {
    type Output = AlgebraVector;
    fn add(self, rhs: &AlgebraVector) -> AlgebraVector {
        AlgebraVector {
            k_part: &self.k_part + &rhs.k_part,
            p_part: &self.p_part + &rhs.p_part,
        }
    }
}

impl std::ops::Sub for &AlgebraVector {
    type Output = AlgebraVector;
    fn sub(self, rhs: &AlgebraVector) -> AlgebraVector {
        AlgebraVector {
            k_part: &self.k_part - &rhs.k_part,
            p_part: &self.p_part - &rhs.p_part,
        }
    }
}

impl std::ops::Mul<f64> for &AlgebraVector {
    type Output = AlgebraVector;
    fn mul(self, s: f64) -> AlgebraVector {
        AlgebraVector {
            k_part: &self.k_part * s,
            p_part: &self.p_part * s,
        }
    }
}

/// `Ad(g)x = g·x·g⁻¹`, re-split.
pub fn adjoint(g: &Mat, x: &AlgebraVector) -> Result<AlgebraVector> {
    let inv = g
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Domain("adjoint by a singular matrix".into()))?;
    Ok(AlgebraVector::from_matrix(&(g * x.to_matrix() * inv)))
}

/// `Ad(k)v = k·v·kᵀ` for `k ∈ SO(n)` and `v ∈ p`, symmetrized.
pub fn ad_k(k: &Mat, v: &Mat) -> Mat {
    symmetrize(&(k * v * k.transpose()))
}

/// The commutator `xy − yx`, re-split.
pub fn bracket(x: &AlgebraVector, y: &AlgebraVector) -> AlgebraVector {
    let (a, b) = (x.to_matrix(), y.to_matrix());
    AlgebraVector::from_matrix(&(&a * &b - &b * &a))
}

/// `B(x, y) = tr(p(x)·p(y))`.
pub fn form_b(x: &AlgebraVector, y: &AlgebraVector) -> f64 {
    trace_product(x.p_part(), y.p_part())
}

/// `tr(U·V)` for matrices of equal size.
pub fn trace_product(u: &Mat, v: &Mat) -> f64 {
    u.component_mul(&v.transpose()).sum()
}

/// `B`-orthogonal projection of `v ∈ p` onto `a` (its diagonal).
pub fn proj_a(v: &Mat) -> Mat {
    Mat::from_diagonal(&v.diagonal())
}

/// Dimension of `p` for `SL(n,R)`.
pub fn p_dim(n: usize) -> usize {
    n * (n + 1) / 2 - 1
}

/// `B`-orthonormal basis of `p`: orthonormalized traceless diagonals first,
/// then `(E_ij + E_ji)/√2` for `i < j`.
pub fn p_basis(n: usize) -> Vec<Mat> {
    let mut basis = Vec::with_capacity(p_dim(n));
    for j in 1..n {
        // diag(1, ..., 1, −j, 0, ...) with j ones, normalized.
        let norm = ((j * j + j) as f64).sqrt();
        let mut d = Mat::zeros(n, n);
        for i in 0..j {
            d[(i, i)] = 1.0 / norm;
        }
        d[(j, j)] = -(j as f64) / norm;
        basis.push(d);
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut e = Mat::zeros(n, n);
            e[(i, j)] = r;
            e[(j, i)] = r;
            basis.push(e);
        }
    }
    basis
}

/// Element of `p` with the given coordinates in [`p_basis`].
pub fn p_from_coords(n: usize, coords: &[f64]) -> Mat {
    if n == 2 && coords.len() == 2 {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let (x, y) = (coords[0] * r, coords[1] * r);
        return Mat::from_row_slice(2, 2, &[x, y, y, -x]);
    }
    let mut v = Mat::zeros(n, n);
    for (c, e) in coords.iter().zip(p_basis(n)) {
        v += e * *c;
    }
    v
}

/// Coordinates of `v ∈ p` in [`p_basis`].
pub fn p_coords(v: &Mat) -> Vec<f64> {
    p_basis(v.nrows())
        .iter()
        .map(|e| trace_product(e, v))
        .collect()
}

/// `B`-norm of an element of `p`.
pub fn p_norm(v: &Mat) -> f64 {
    trace_product(v, v).max(0.0).sqrt()
}

/// Orthonormal basis of `k` for the pairing `tr(XᵀY)`: `(E_ji − E_ij)/√2`, `i < j`.
pub fn k_basis(n: usize) -> Vec<Mat> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut e = Mat::zeros(n, n);
            e[(j, i)] = r;
            e[(i, j)] = -r;
            basis.push(e);
        }
    }
    basis
}

/// A linear functional on `a`, stored by its values on the diagonal units `E_ii`.
#[derive(Debug, Clone, PartialEq)]
pub struct Covector(pub Vec<f64>);

impl Covector {
    pub fn zero(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    /// The `SL(2,R)` functional with `λ(sH) = ℓs`.
    pub fn sl2(ell: f64) -> Self {
        Self(vec![ell / 2.0, -ell / 2.0])
    }

    /// `λ(proj_a(w))`: pairs with the diagonal of any matrix.
    pub fn pair(&self, w: &Mat) -> f64 {
        self.0.iter().enumerate().map(|(i, l)| l * w[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.iter().map(|l| l * s).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// The value on `H = diag(1, −1, 0, ...)`.
    pub fn on_h(&self) -> f64 {
        self.0[0] - self.0[1]
    }
}

/// Restricted roots of the minimal parabolic with `N` upper unitriangular.
///
/// The root `α_ij = e_i − e_j` (`i < j`) has root vector `E_ij`, so
/// `[H, E_ij] = α_ij(H)·E_ij` for diagonal `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootData {
    pub n: usize,
    pub positive_roots: Vec<Covector>,
    pub root_indices: Vec<(usize, usize)>,
    pub multiplicities: Vec<u32>,
    pub rho: Covector,
}

impl RootData {
    pub fn sl(n: usize) -> Self {
        let mut positive_roots = Vec::new();
        let mut root_indices = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let mut a = vec![0.0; n];
                a[i] = 1.0;
                a[j] = -1.0;
                positive_roots.push(Covector(a));
                root_indices.push((i, j));
            }
        }
        let multiplicities = vec![1; positive_roots.len()];
        let mut rho = vec![0.0; n];
        for (alpha, m) in positive_roots.iter().zip(&multiplicities) {
            for (r, a) in rho.iter_mut().zip(&alpha.0) {
                *r += 0.5 * *m as f64 * a;
            }
        }
        Self {
            n,
            positive_roots,
            root_indices,
            multiplicities,
            rho: Covector(rho),
        }
    }

    pub fn root_vector(&self, index: usize) -> Mat {
        let (i, j) = self.root_indices[index];
        let mut e = Mat::zeros(self.n, self.n);
        e[(i, j)] = 1.0;
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, FRAC_PI_2};

    fn close(a: &Mat, b: &Mat, tol: f64) -> bool {
        (a - b).amax() <= tol
    }

    #[test]
    fn exp_examples() {
        let z = Mat::zeros(2, 2);
        assert_eq!(mat_exp(&z).unwrap(), Mat::identity(2, 2));
        let d = mat_exp(&h_sl2()).unwrap();
        assert!(close(
            &d,
            &Mat::from_row_slice(2, 2, &[E, 0.0, 0.0, 1.0 / E]),
            1e-14
        ));
        let c = 1f64.cosh();
        let s = 1f64.sinh();
        let x = mat_exp(&x_sl2()).unwrap();
        assert!(close(&x, &Mat::from_row_slice(2, 2, &[c, s, s, c]), 1e-14));
    }

    #[test]
    fn exp_flow_residual() {
        // d/ds exp(sx) = x exp(sx): compare exp(x) with exp(x/2)^2 and x·exp(x) = exp(x)·x.
        let x = Mat::from_row_slice(3, 3, &[0.3, -2.0, 1.0, 4.0, -1.0, 0.5, -3.0, 2.0, 0.7]);
        let e = mat_exp(&x).unwrap();
        let h = mat_exp(&(&x * 0.5)).unwrap();
        assert!((&e - &h * &h).norm() / e.norm() < 1e-13);
        assert!((&x * &e - &e * &x).norm() / e.norm() < 1e-12);
    }

    #[test]
    fn exp_range_error() {
        let x = Mat::from_row_slice(2, 2, &[800.0, 0.0, 0.0, -800.0]);
        assert!(matches!(mat_exp(&x), Err(Error::Range(_))));
    }

    #[test]
    fn log_examples() {
        assert!(close(
            &spd_log(&Mat::identity(2, 2)).unwrap(),
            &Mat::zeros(2, 2),
            1e-15
        ));
        let d = Mat::from_row_slice(2, 2, &[E * E, 0.0, 0.0, (-2f64).exp()]);
        assert!(close(&spd_log(&d).unwrap(), &(h_sl2() * 2.0), 1e-14));
        let s = mat_exp(&(x_sl2() * 2.0)).unwrap();
        assert!(close(&spd_log(&s).unwrap(), &(x_sl2() * 2.0), 1e-13));
    }

    #[test]
    fn log_domain_errors() {
        let neg = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let msg = spd_log(&neg).unwrap_err().to_string();
        assert!(msg.contains("eigenvalue"), "{msg}");
        let asym = Mat::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(spd_log(&asym), Err(Error::Domain(_))));
    }

    #[test]
    fn cartan_examples() {
        let (k, x) = cartan_decompose(&rotation(0.7)).unwrap();
        assert!(close(&k, &rotation(0.7), 1e-14));
        assert!(x.amax() < 1e-14);
        let g = mat_exp(&x_sl2()).unwrap() * rotation(0.3);
        let (k, x) = cartan_decompose(&g).unwrap();
        assert!(close(&k, &rotation(0.3), 1e-13));
        assert!(close(&x, &x_sl2(), 1e-13));
    }

    #[test]
    fn iwasawa_examples() {
        let s: f64 = 0.4;
        let c = 1.3;
        let g = Mat::from_row_slice(2, 2, &[s.exp(), c, 0.0, (-s).exp()]);
        let iw = iwasawa_decompose(&g).unwrap();
        assert!(close(&iw.kappa, &Mat::identity(2, 2), 1e-14));
        assert!(close(&iw.log_a, &(h_sl2() * s), 1e-14));
        assert!((iw.n_part[(0, 1)] - c * (-s).exp()).abs() < 1e-14);

        let iw = iwasawa_decompose(&rotation(1.1)).unwrap();
        assert!(close(&iw.kappa, &rotation(1.1), 1e-14));
        assert!(iw.log_a.amax() < 1e-14);

        // First column of exp(X) is (cosh 1, sinh 1) with squared norm cosh 2.
        let iw = iwasawa_decompose(&mat_exp(&x_sl2()).unwrap()).unwrap();
        let expected = 0.5 * 2f64.cosh().ln();
        assert!((iw.log_a[(0, 0)] - expected).abs() < 1e-14);
        assert!((expected - 0.6626).abs() < 1e-4);
        assert!(close(
            &iw.reconstruct().unwrap(),
            &mat_exp(&x_sl2()).unwrap(),
            1e-12
        ));
    }

    #[test]
    fn not_in_group() {
        let g = Mat::identity(2, 2) * 2.0;
        assert!(matches!(
            cartan_decompose(&g),
            Err(Error::NotInGroup { .. })
        ));
        assert!(GroupElement::new(g).is_err());
    }

    #[test]
    fn adjoint_examples() {
        let h = AlgebraVector::from_p(&h_sl2());
        assert_eq!(adjoint(&Mat::identity(2, 2), &h).unwrap(), h);
        let r = adjoint(&rotation(FRAC_PI_2), &h).unwrap();
        assert!(close(r.p_part(), &(-h_sl2()), 1e-15));
        let zero = AlgebraVector::from_matrix(&Mat::zeros(2, 2));
        assert!(adjoint(&rotation(0.4), &zero).unwrap().norm() == 0.0);
    }

    #[test]
    fn bracket_examples() {
        let h = AlgebraVector::from_p(&h_sl2());
        let e = AlgebraVector::from_matrix(&Mat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]));
        let he = bracket(&h, &e);
        assert!(close(&he.to_matrix(), &(e.to_matrix() * 2.0), 1e-15));
        assert!(bracket(&h, &h).norm() == 0.0);
        let x = AlgebraVector::from_p(&x_sl2());
        let hx = bracket(&h, &x);
        assert!(hx.p_part().amax() == 0.0);
        assert!(close(
            hx.k_part(),
            &Mat::from_row_slice(2, 2, &[0.0, 2.0, -2.0, 0.0]),
            1e-15
        ));
    }

    #[test]
    fn form_examples() {
        let h = AlgebraVector::from_p(&h_sl2());
        let x = AlgebraVector::from_p(&x_sl2());
        assert_eq!(form_b(&h, &h), 2.0);
        assert_eq!(form_b(&h, &x), 0.0);
        let k = AlgebraVector::from_matrix(&Mat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        assert_eq!(form_b(&k, &k), 0.0);
    }

    #[test]
    fn proj_examples() {
        assert_eq!(proj_a(&h_sl2()), h_sl2());
        assert_eq!(proj_a(&x_sl2()), Mat::zeros(2, 2));
        assert_eq!(proj_a(&(h_sl2() + x_sl2())), h_sl2());
    }

    #[test]
    fn basis_is_orthonormal() {
        for n in 2..=4 {
            let b = p_basis(n);
            assert_eq!(b.len(), p_dim(n));
            for (i, u) in b.iter().enumerate() {
                for (j, v) in b.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((trace_product(u, v) - want).abs() < 1e-15);
                }
            }
            let coords: Vec<f64> = (0..p_dim(n)).map(|i| 0.3 * i as f64 - 0.5).collect();
            let v = p_from_coords(n, &coords);
            let back = p_coords(&v);
            for (a, b) in coords.iter().zip(back) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn root_data() {
        let rd = RootData::sl(2);
        assert_eq!(rd.rho.pair(&h_sl2()), 1.0);
        let rd3 = RootData::sl(3);
        assert_eq!(rd3.positive_roots.len(), 3);
        assert_eq!(rd3.rho.0, vec![1.0, 0.0, -1.0]);
        let hd = Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![0.7, -0.2, -0.5]));
        let h = AlgebraVector::from_p(&hd);
        for (idx, alpha) in rd3.positive_roots.iter().enumerate() {
            let e = AlgebraVector::from_matrix(&rd3.root_vector(idx));
            let lhs = bracket(&h, &e).to_matrix();
            let rhs = e.to_matrix() * alpha.pair(&hd);
            assert!(close(&lhs, &rhs, 1e-12));
        }
    }
}
