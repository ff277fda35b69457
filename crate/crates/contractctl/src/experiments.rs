//! The named experiments, their default parameters and gates.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use contraction_core::compact_picture::{
    dooley_rice_report, renorm_check, CircleFunction, MackeyParameter, Parity,
};
use contraction_core::deformation::{action_t, coadjoint_orbit_t, metric_t, phi_t, product_t};
use contraction_core::discrete_series::{
    ds_annihilate_t, ds_combination, ds_contract_report, ds_lowest_vanishing, ds_rep, lowest_weight,
};
use contraction_core::field::GridSpec;
use contraction_core::iwasawa_limits::{ball_grid, iw_limit_report};
use contraction_core::matgroup::{
    h_sl2, p_basis, p_coords, p_from_coords, rotation, trace_product, AlgebraVector, Covector,
};
use contraction_core::quasisplit_fine::{
    compact_action_samples, outcome_singular_values, qs_contract_report, qs_rep,
    t_transform_samples, FineKTypeData,
};
use contraction_core::report::{dyadic_ladder, validate_ladder, ConvergenceReport};
use contraction_core::waves::{plane_wave_gap, wave_eval, wave_figure_data, WaveSpec};
use contraction_core::{Complex64, Mat};
use rayon::prelude::*;
use serde::Serialize;

use crate::params::Params;
use crate::report::Report;
use crate::rng::Rng;

pub const EXPERIMENTS: [&str; 11] = [
    "group-law",
    "action",
    "metric-scaling",
    "iwasawa",
    "waves",
    "principal",
    "discrete",
    "quasisplit",
    "figure-orbit",
    "figure-wave",
    "figure-wave-sequence",
];

/// Default parameters of an experiment, or `None` for an unknown name.
pub fn defaults(name: &str) -> Option<Params> {
    let base = Params {
        seed: Some(20_240_601),
        ..Default::default()
    };
    let p = match name {
        "group-law" => Params {
            t: Some(dyadic_ladder(1, 8)),
            samples: Some(200),
            radius: Some(2.0),
            ..base
        },
        "action" => Params {
            t: Some(dyadic_ladder(1, 8)),
            samples: Some(200),
            radius: Some(1.5),
            ..base
        },
        "metric-scaling" => Params {
            t: Some(dyadic_ladder(1, 3)),
            samples: Some(50),
            radius: Some(1.0),
            h: Some(1e-4),
            ..base
        },
        "iwasawa" => Params {
            t: Some(dyadic_ladder(1, 8)),
            range: Some(1.5),
            resolution: Some(13),
            ..base
        },
        "waves" => Params {
            t: Some(dyadic_ladder(0, 6)),
            lambda: Some(30.0),
            range: Some(1.5),
            resolution: Some(256),
            samples: Some(10_000),
            ..base
        },
        "principal" => Params {
            t: Some(dyadic_ladder(0, 6)),
            chi: Some(vec![1.0, 2.0]),
            samples: Some(10),
            radius: Some(1.0),
            ..base
        },
        "discrete" => Params {
            t: Some(dyadic_ladder(0, 6)),
            m: Some(2),
            samples: Some(10),
            range: Some(1.5),
            resolution: Some(33),
            h: Some(1e-3),
            ..base
        },
        "quasisplit" => Params {
            t: Some(dyadic_ladder(1, 6)),
            weight: Some(1),
            samples: Some(5),
            range: Some(1.0),
            resolution: Some(9),
            ..base
        },
        "figure-orbit" => Params {
            t: Some(vec![1.0, 0.5, 0.25, 0.0]),
            samples: Some(2000),
            radius: Some(1.0),
            ..base
        },
        "figure-wave" => Params {
            t: Some(vec![1.0]),
            lambda: Some(30.0),
            range: Some(1.5),
            resolution: Some(256),
            ..base
        },
        "figure-wave-sequence" => Params {
            t: Some(dyadic_ladder(0, 3)),
            lambda: Some(30.0),
            range: Some(1.5),
            resolution: Some(256),
            ..base
        },
        _ => return None,
    };
    Some(p)
}

/// Directory receiving reports and datasets.
pub struct Out {
    dir: PathBuf,
}

impl Out {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
        })
    }

    pub fn write(&self, report: &mut Report, file: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(file);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        report.outputs.push(file.to_string());
        Ok(())
    }

    pub fn report_path(&self, experiment: &str) -> PathBuf {
        self.dir.join(format!("{experiment}.report.json"))
    }
}

pub fn run(name: &str, p: &Params, out: &Out) -> Result<Report> {
    p.validate()?;
    match name {
        "group-law" => group_law(p),
        "action" => action(p),
        "metric-scaling" => metric_scaling(p),
        "iwasawa" => iwasawa(p),
        "waves" => waves(p),
        "principal" => principal(p),
        "discrete" => discrete(p),
        "quasisplit" => quasisplit(p),
        "figure-orbit" => figure_orbit(p, out),
        "figure-wave" | "figure-wave-sequence" => figure_wave(name, p, out),
        _ => bail!("unknown experiment {name}"),
    }
}

fn ladder(p: &Params) -> Result<Vec<f64>> {
    let t = p.t().to_vec();
    validate_ladder(&t)?;
    Ok(t)
}

fn max(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

fn par_max<T: Sync>(
    items: &[T],
    f: impl Fn(&T) -> contraction_core::Result<f64> + Sync + Send,
) -> Result<f64> {
    let v = items
        .par_iter()
        .map(f)
        .collect::<contraction_core::Result<Vec<_>>>()?;
    Ok(max(v))
}

fn group_law(p: &Params) -> Result<Report> {
    let t = ladder(p)?;
    let radius = p.f(p.radius, "radius")?;
    let mut rng = Rng::new(p.seed());
    let mut conv = ConvergenceReport::new(t.clone());
    for n in [2, 3] {
        let pairs: Vec<_> = (0..p.samples())
            .map(|_| (rng.element(n, radius, 0.0), rng.element(n, radius, 0.0)))
            .collect();
        let errs = t
            .iter()
            .map(|&s| {
                par_max(&pairs, |(a, b)| {
                    let flat = product_t(a, b)?;
                    Ok(product_t(&a.with_t(s), &b.with_t(s))?.chart_distance(&flat.with_t(s)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        conv.insert(&format!("sl{n}"), errs)?;
    }
    let mut r = Report::new("group-law", p);
    r.absorb("", &conv);
    for m in ["sl2", "sl3"] {
        r.gate_order_within("order", m, 0.9, 1.1);
        r.gate_at_most("final", m, 0.05);
    }
    Ok(r)
}

fn action(p: &Params) -> Result<Report> {
    let t = ladder(p)?;
    let radius = p.f(p.radius, "radius")?;
    let mut rng = Rng::new(p.seed());
    let mut conv = ConvergenceReport::new(t.clone());
    for n in [2, 3] {
        let cases: Vec<_> = (0..p.samples())
            .map(|_| (rng.element(n, 1.0, 0.0), rng.p_point(n, radius)))
            .collect();
        let errs = t
            .iter()
            .map(|&s| {
                par_max(&cases, |(a, x)| {
                    let flat = action_t(a, x)?;
                    Ok((action_t(&a.with_t(s), x)? - flat).amax())
                })
            })
            .collect::<Result<Vec<_>>>()?;
        conv.insert(&format!("sl{n}"), errs)?;
    }
    let mut r = Report::new("action", p);
    r.absorb("", &conv);
    for m in ["sl2", "sl3"] {
        r.gate_order_within("order", m, 0.9, 1.1);
    }
    Ok(r)
}

fn metric_scaling(p: &Params) -> Result<Report> {
    let t = ladder(p)?;
    let radius = p.f(p.radius, "radius")?;
    let h = p.f(p.h, "h")?;
    let mut rng = Rng::new(p.seed());
    let points: Vec<Mat> = (0..p.samples()).map(|_| rng.p_point(2, radius)).collect();
    let basis = p_basis(2);
    let pairs: Vec<(usize, usize)> = (0..basis.len())
        .flat_map(|i| (0..basis.len()).map(move |j| (i, j)))
        .collect();
    let mut scaling = Vec::new();
    let mut origin = Vec::new();
    for &s in &t {
        scaling.push(par_max(&points, |x| {
            let mut worst: f64 = 0.0;
            for &(i, j) in &pairs {
                let (ei, ej) = (&basis[i], &basis[j]);
                let lhs = metric_t(&(x / s), &(ei / s), &(ej / s), s, h)? * s * s;
                let rhs = metric_t(x, ei, ej, 1.0, h)?;
                worst = worst.max((lhs - rhs).abs());
            }
            Ok(worst)
        })?);
        let zero = Mat::zeros(2, 2);
        origin.push(max(pairs
            .iter()
            .map(|&(i, j)| {
                metric_t(&zero, &basis[i], &basis[j], s, h)
                    .map(|g| (g - trace_product(&basis[i], &basis[j])).abs())
            })
            .collect::<contraction_core::Result<Vec<_>>>()?));
    }
    let mut conv = ConvergenceReport::new(t);
    conv.insert("scaling", scaling)?;
    conv.insert("origin", origin)?;
    let mut r = Report::new("metric-scaling", p);
    r.absorb("", &conv);
    let (sc, or) = (
        max(r.metric("scaling").to_vec()),
        max(r.metric("origin").to_vec()),
    );
    r.check("scaling.max", sc);
    r.check("origin.max", or);
    r.gate_at_most("scaling", "scaling.max", 1e-5);
    r.gate_at_most("origin", "origin.max", 1e-6);
    Ok(r)
}

fn iwasawa(p: &Params) -> Result<Report> {
    let t = ladder(p)?;
    let range = p.f(p.range, "range")?;
    let per_axis = p.resolution.unwrap_or(13);
    let mut r = Report::new("iwasawa", p);
    for (n, per) in [(2, per_axis), (3, 5)] {
        let grid = ball_grid(n, range, per);
        r.absorb(&format!("sl{n}"), &iw_limit_report(&grid, &t)?);
    }
    let mut axis: Vec<Mat> = (0..per_axis)
        .map(|i| h_sl2() * (range * (2.0 * i as f64 / (per_axis - 1).max(1) as f64 - 1.0)))
        .collect();
    for i in 0..per_axis {
        let s = range * (2.0 * i as f64 / (per_axis - 1).max(1) as f64 - 1.0);
        axis.push(p_from_coords(3, &[s, -0.5 * s, 0.0, 0.0, 0.0]));
    }
    let (a2, a3): (Vec<Mat>, Vec<Mat>) = axis.into_iter().partition(|m| m.nrows() == 2);
    r.absorb("axis-sl2", &iw_limit_report(&a2, &t)?);
    r.absorb("axis-sl3", &iw_limit_report(&a3, &t)?);
    let axis_a = max(["axis-sl2/a", "axis-sl3/a"]
        .iter()
        .flat_map(|m| r.metric(m).to_vec()));
    let axis_k = max(["axis-sl2/k", "axis-sl3/k"]
        .iter()
        .flat_map(|m| r.metric(m).to_vec()));
    r.check("axis.maxA", axis_a);
    r.check("axis.maxK", axis_k);
    for n in [2, 3] {
        for m in ["a", "k", "da"] {
            r.gate_order_at_least("order", &format!("sl{n}/{m}"), 0.9);
        }
    }
    r.gate_at_most("axis", "axis.maxA", 1e-12);
    r.gate_at_most("axis", "axis.maxK", 1e-12);
    Ok(r)
}

fn waves(p: &Params) -> Result<Report> {
    let t = ladder(p)?;
    let lambda = p.f(p.lambda, "lambda")?;
    let grid = GridSpec::sl2(p.f(p.range, "range")?, p.resolution.unwrap_or(256))?;
    let b = rotation(0.0);
    let gaps = t
        .iter()
        .map(|&s| plane_wave_gap(&Covector::sl2(lambda), &b, s, &grid))
        .collect::<contraction_core::Result<Vec<_>>>()?;
    let mut conv = ConvergenceReport::new(t);
    conv.insert("plane", gaps)?;
    let mut rng = Rng::new(p.seed());
    let triples: Vec<(f64, f64, f64)> = (0..20)
        .map(|_| (rng.range(1.0, 40.0), rng.angle(), rng.range(0.01, 1.0)))
        .collect();
    let points: Vec<Mat> = (0..p.samples()).map(|_| rng.p_point(2, 1.5)).collect();
    let mut zoom: f64 = 0.0;
    for &(l, th, s) in &triples {
        let e = WaveSpec::sl2(l, th, 1.0)?;
        let es = WaveSpec::sl2(s * l, th, s)?;
        zoom = zoom.max(par_max(&points, |x| {
            let lhs = wave_eval(&e, &(x * s))?;
            let rhs = wave_eval(&es, x)?;
            Ok((lhs - rhs).norm() / lhs.norm().max(1.0))
        })?);
    }
    let mut r = Report::new("waves", p);
    r.absorb("", &conv);
    r.check("zoom.maxRelative", zoom);
    r.gate_decreasing("decreasing", "plane", Some(4));
    r.gate_last_over_first("ratio", "plane", 0.10);
    r.gate_at_most("zoom", "zoom.maxRelative", 1e-14);
    Ok(r)
}

fn principal(p: &Params) -> Result<Report> {
    let t = ladder(p)?;
    let chis = p.chi.clone().unwrap_or_default();
    let radius = p.f(p.radius, "radius")?;
    let mut rng = Rng::new(p.seed());
    let elements: Vec<Mat> = (0..p.samples())
        .map(|_| phi_t(&rng.element(2, radius, 1.0)))
        .collect::<contraction_core::Result<_>>()?;
    let modes = [0, 1, -1, 2, -2];
    let mut renorm: f64 = 0.0;
    for &chi in &chis {
        for &s in &[0.5, 0.25, 0.125] {
            renorm = renorm.max(par_max(&elements, |g| {
                Ok(renorm_check(g, &Covector::sl2(chi), s, &modes, 256)?.residual)
            })?);
        }
    }
    let dr = rng.element(2, radius, 1.0);
    let f_even = CircleFunction::from_pairs(
        Parity::Trivial,
        &[
            (0, Complex64::new(1.0, 0.0)),
            (2, Complex64::new(0.5, 0.0)),
            (-2, Complex64::new(0.0, 0.25)),
        ],
    )?;
    let f_odd = CircleFunction::from_pairs(
        Parity::Sign,
        &[
            (1, Complex64::new(1.0, 0.0)),
            (-1, Complex64::new(0.5, 0.0)),
            (3, Complex64::new(0.0, 0.25)),
        ],
    )?;
    let mut r = Report::new("principal", p);
    let (mut l2, mut sup) = (Default::default(), Default::default());
    let mut keys = Vec::new();
    for &chi in &chis {
        for (label, mu, f) in [("trivial", 0, &f_even), ("sign", 1, &f_odd)] {
            let key = format!("chi{chi}/{label}");
            let rep = dooley_rice_report(dr.k(), dr.v(), &MackeyParameter::sl2(chi, mu), f, &t)?;
            r.absorb(&key, &rep);
            std::collections::BTreeMap::insert(&mut l2, key.clone(), rep.metric("l2").to_vec());
            std::collections::BTreeMap::insert(&mut sup, key.clone(), rep.metric("sup").to_vec());
            keys.push(key);
        }
    }
    r.l2_errors = Some(l2);
    r.sup_errors = Some(sup);
    r.check("renorm.maxL2", renorm);
    r.gate_at_most("renorm", "renorm.maxL2", 1e-7);
    for key in &keys {
        r.gate_decreasing("decreasing", &format!("{key}/l2"), None);
        r.gate_decreasing("decreasing", &format!("{key}/sup"), None);
        r.gate_last_over_first("ratio", &format!("{key}/sup"), 0.10);
    }
    Ok(r)
}

fn discrete(p: &Params) -> Result<Report> {
    let t = ladder(p)?;
    let m = p.m.unwrap_or(2);
    let h = p.f(p.h, "h")?;
    let grid = GridSpec::sl2(p.f(p.range, "range")?, p.resolution.unwrap_or(33))?;
    let coeffs = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.5, 0.0),
        Complex64::new(0.25, 0.0),
    ];
    let f = ds_combination(&coeffs, m)?;
    let mut rng = Rng::new(p.seed());
    let kv = rng.element(2, 1.0, 1.0);
    let conv = ds_contract_report(&coeffs, m, kv.k(), kv.v(), &t, &grid)?;
    let mu_hat = lowest_weight(m);
    let off: Vec<i64> = (-3..=7).filter(|j| *j != mu_hat).collect();
    let vanishing = ds_lowest_vanishing(&f, &off, 64)?;
    let on = ds_lowest_vanishing(&f, &[mu_hat], 64)?;
    let points: Vec<Mat> = (0..20).map(|_| rng.p_point(2, 1.5)).collect();
    let mut commutation: f64 = 0.0;
    for mode in [mu_hat, mu_hat + 2, mu_hat + 4, 0] {
        let projected = f.isotypic(mode, 64)?;
        for &s in &t {
            let a = f.zoom(s)?.isotypic(mode, 64)?;
            let b = projected.zoom(s)?;
            commutation =
                commutation.max(par_max(&points, |x| Ok((a.eval(x)? - b.eval(x)?).norm()))?);
        }
    }
    let small = GridSpec::sl2(grid.range(), 9)?;
    let mut annihilator: f64 = 0.0;
    for &s in &[1.0, 0.5] {
        let fs = f.zoom(s)?;
        for _ in 0..p.samples() {
            let a = rng.element(2, 1.0, s);
            let moved = ds_rep(&a, &fs, m)?;
            annihilator =
                annihilator.max(ds_annihilate_t(&moved, m, h, s, &small)?.sup_inner(0.75));
        }
    }
    let mut r = Report::new("discrete", p);
    r.absorb("", &conv);
    r.check(
        "isotypic.maxOffMode",
        max(vanishing.iter().map(|v| v.1.norm())),
    );
    r.check("isotypic.onMode", on[0].1.norm());
    r.check("commutation.max", commutation);
    r.check("annihilator.max", annihilator);
    r.gate_decreasing("decreasing", "operator", None);
    r.gate_at_most("final", "operator", 0.02);
    r.gate_at_most("isotypic", "isotypic.maxOffMode", 1e-8);
    r.gate_at_most("commutation", "commutation.max", 1e-9);
    r.gate_at_most("annihilator", "annihilator.max", 1e-4);
    Ok(r)
}

fn quasisplit(p: &Params) -> Result<Report> {
    let t = ladder(p)?;
    let d = FineKTypeData::new(p.weight.unwrap_or(1))?;
    let grid = GridSpec::sl2(p.f(p.range, "range")?, p.resolution.unwrap_or(9))?;
    let mut rng = Rng::new(p.seed());
    let points: Vec<Mat> = (0..6).map(|_| rng.p_point(2, 1.0)).collect();
    let mut multiples = |mode: i64| -> Result<Vec<CircleFunction>> {
        (0..3)
            .map(|_| {
                let c = Complex64::from_polar(rng.range(0.5, 2.0), rng.angle());
                Ok(CircleFunction::from_pairs(Parity::Sign, &[(mode, c)])?)
            })
            .collect()
    };
    let mu_mode = d.matrix_coefficient_mode();
    let on = outcome_singular_values(&multiples(mu_mode)?, &points, &d)?;
    let mut off_first: f64 = 0.0;
    for mode in [d.mu_weight(), mu_mode + 4, mu_mode - 4] {
        off_first = off_first.max(outcome_singular_values(&multiples(mode)?, &points, &d)?[0]);
    }
    let phi = CircleFunction::from_pairs(
        Parity::Sign,
        &[
            (mu_mode, Complex64::new(1.0, 0.0)),
            (mu_mode + 2, Complex64::new(0.3, -0.2)),
        ],
    )?;
    let nodes = 256;
    let mut equivariance: f64 = 0.0;
    for &s in &[1.0, 0.5] {
        let base = t_transform_samples(phi.samples(nodes), s, &d)?;
        for _ in 0..p.samples() {
            let a = rng.element(2, 1.0, s);
            let lhs = qs_rep(&a, &base, &d)?;
            let rhs = t_transform_samples(compact_action_samples(&a, &phi, nodes)?, s, &d)?;
            equivariance = equivariance.max(par_max(&points, |x| {
                Ok((lhs.eval(x)? - rhs.eval(x)?).norm())
            })?);
        }
    }
    let kv = rng.element(2, 1.0, 1.0);
    let conv = qs_contract_report(&phi, kv.k(), kv.v(), &t, &d, &grid)?;
    let mut r = Report::new("quasisplit", p);
    r.absorb("", &conv);
    r.check("outcome.mu.first", on[0]);
    r.check(
        "outcome.mu.secondOverFirst",
        on.get(1).copied().unwrap_or(0.0) / on[0],
    );
    r.check("outcome.other.first", off_first);
    r.check("equivariance.max", equivariance);
    r.gate_at_least("rank1", "outcome.mu.first", 1e-3);
    r.gate_at_most("rank1", "outcome.mu.secondOverFirst", 1e-6);
    r.gate_at_most("rank0", "outcome.other.first", 1e-8);
    r.gate_at_most("equivariance", "equivariance.max", 1e-6);
    r.gate_at_most("zoom", "zoom", 1e-10);
    r.gate_decreasing("decreasing", "vector", None);
    r.gate_decreasing("decreasing", "operator", None);
    Ok(r)
}

fn figure_orbit(p: &Params, out: &Out) -> Result<Report> {
    use std::fmt::Write as _;
    let ts = p.t().to_vec();
    if ts.iter().any(|s| !(0.0..=1.0).contains(s)) {
        bail!("orbit scales must lie in [0, 1]");
    }
    let height = p.f(p.radius, "radius")?;
    let kz = Mat::from_row_slice(2, 2, &[0.0, -height, height, 0.0]);
    let z = AlgebraVector::from_parts(kz, Mat::zeros(2, 2))?;
    let mut r = Report::new("figure-orbit", p);
    let mut csv = String::from("t,k,x,y\n");
    let mut tau = String::from("x,y,tau_x,tau_y\n");
    let mut fit_residual: f64 = 0.0;
    for &s in &ts {
        let orbit = coadjoint_orbit_t(&z, s, p.samples())?;
        let rows: Vec<(f64, f64, f64)> = orbit
            .iter()
            .map(|o| {
                let c = p_coords(o.p_part());
                (o.k_part()[(1, 0)], c[0], c[1])
            })
            .collect();
        for &(k, x, y) in &rows {
            writeln!(csv, "{s},{k},{x},{y}")?;
        }
        if s > 0.0 {
            fit_residual = fit_residual.max(quadric_residual(&rows));
        } else {
            let spread = max(rows
                .iter()
                .map(|(k, x, y)| (k - height).abs().max(x.abs()).max(y.abs())));
            r.check("t0.spread", spread);
        }
        if s == 1.0 {
            for &(_, x, y) in &rows {
                let n = x.hypot(y);
                let f = if n > 0.0 { n.sinh() / n } else { 1.0 };
                writeln!(tau, "{x},{y},{},{}", -f * y, f * x)?;
            }
        }
    }
    out.write(&mut r, "figure-orbit-0.csv", &csv)?;
    out.write(&mut r, "figure-orbit-tau.csv", &tau)?;
    r.check("quadric.maxResidual", fit_residual);
    r.gate_at_most("quadric", "quadric.maxResidual", 1e-6);
    Ok(r)
}

/// Largest residual of the least-squares fit `k² = α + β(x² + y²)`.
fn quadric_residual(rows: &[(f64, f64, f64)]) -> f64 {
    let a = Mat::from_fn(rows.len(), 2, |i, j| {
        if j == 0 {
            1.0
        } else {
            rows[i].1.powi(2) + rows[i].2.powi(2)
        }
    });
    let b = contraction_core::Mat::from_fn(rows.len(), 1, |i, _| rows[i].0.powi(2));
    let ata = a.transpose() * &a;
    let Some(inv) = ata.try_inverse() else {
        return 0.0;
    };
    let coef = inv * a.transpose() * &b;
    (a * coef - b).amax()
}

#[derive(Serialize)]
struct Envelope {
    lambda: f64,
    t: f64,
    range: f64,
    resolution: usize,
}

fn figure_wave(name: &str, p: &Params, out: &Out) -> Result<Report> {
    let ts = p.t().to_vec();
    if ts.is_empty() || ts.iter().any(|s| !(*s > 0.0 && *s <= 1.0)) {
        bail!("wave frames need scales in (0, 1]");
    }
    let lambda = p.f(p.lambda, "lambda")?;
    let range = p.f(p.range, "range")?;
    let resolution = p.resolution.unwrap_or(256);
    let frames = wave_figure_data(lambda, &ts, range, resolution)?;
    let mut r = Report::new(name, p);
    for (i, f) in frames.iter().enumerate() {
        out.write(&mut r, &format!("{name}-{i}.csv"), &f.to_csv())?;
        let env = Envelope {
            lambda: f.lambda,
            t: f.t,
            range: f.range,
            resolution: f.resolution,
        };
        out.write(
            &mut r,
            &format!("{name}-{i}.json"),
            &(serde_json::to_string_pretty(&env)? + "\n"),
        )?;
        r.check(&format!("frame{i}.minModulus"), f.min_modulus());
        r.check(&format!("frame{i}.maxModulus"), f.max_modulus());
        r.gate_at_most("finite", &format!("frame{i}.maxModulus"), f64::MAX);
    }
    if name == "figure-wave" {
        for (i, f) in frames.iter().enumerate() {
            if f.t == 1.0 {
                r.gate_at_least("modulus", &format!("frame{i}.minModulus"), 1.0);
            }
        }
    }
    Ok(r)
}
