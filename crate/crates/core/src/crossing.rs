//! The percolation form K(z) = (−16πi/√3) η(z)⁴ ∫_{i∞}^z η(w/2)⁸η(2w)⁸η(w)⁻¹² dw
//! and the crossing probabilities it is compared against.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64 as C64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{check_point, sum_qexp, tail_estimate};
use crate::group::{is_member, theta_context, Mat2};
use crate::numerics::{gamma_real, hypergeometric, theta2_theta3, GaussLegendre};
use crate::qseries::{builtin_form, eta_quotient, FracQSeries};
use crate::report::VerificationReport;

/// Coefficients kept by default; enough for y ≥ 0.05 at double precision.
pub const DEFAULT_KZ_ORDER: usize = 2400;

/// η(z/2)⁸ η(2z)⁸ η(z)⁻¹², exponents 1/3 + n/2.
pub fn kz_integrand(order: usize) -> Result<FracQSeries> {
    if order == 0 {
        return Err(Error::InvalidArgument("order must be at least 1".into()));
    }
    Ok(builtin_form("kz", order)?.series)
}

/// The two q-series that make up K.
#[derive(Clone, Debug)]
pub struct KzForm {
    pub eta4: FracQSeries,
    pub integral: FracQSeries,
}

impl KzForm {
    pub fn new(order: usize) -> Result<Self> {
        let g = kz_integrand(order)?;
        // every exponent is positive, so ∫_{i∞}^z is termwise
        let integral = g.antiderivative(1)?;
        let eta4 = eta_quotient(&[(Rational64::from_integer(1), 4)], order)?;
        Ok(KzForm { eta4, integral })
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        check_point(z)?;
        if z.im < 0.05 {
            return Err(Error::InvalidArgument(format!("K(z) needs y >= 0.05, got {}", z.im)));
        }
        for s in [&self.eta4, &self.integral] {
            let (tail, required) = tail_estimate(s, z.im, 1e-15);
            if tail > 1e-15 {
                return Err(Error::InsufficientOrder { tail, tol: 1e-15, required });
            }
        }
        Ok(kz_constant() * sum_qexp(&self.eta4, z) * sum_qexp(&self.integral, z))
    }

    pub fn eta4(&self, z: C64) -> C64 {
        sum_qexp(&self.eta4, z)
    }
}

/// −16πi/√3.
pub fn kz_constant() -> C64 {
    C64::new(0.0, -16.0 * PI / 3f64.sqrt())
}

/// K(z) at the default order.
pub fn kz_k(z: C64) -> Result<C64> {
    KzForm::new(DEFAULT_KZ_ORDER)?.eval(z)
}

/// ρ(z) = (K(γz) j(γ,z)⁻² − K(z)) / η(z)⁴ over the samples; the residual is
/// max |ρ − mean ρ| relative to max(|mean ρ|, 1). Samples where |η⁴| < 1e-8
/// are skipped.
pub fn kz_automorphy_residual(form: &KzForm, g: &Mat2, samples: &[C64], tol: f64) -> VerificationReport {
    let t0 = Instant::now();
    let params = format!("gamma={g} samples={}", samples.len());
    let run = || -> Result<(f64, C64)> {
        if !is_member(&theta_context(), g) {
            return Err(Error::InvalidArgument(format!("{g} is not in the theta group")));
        }
        let mut rho = Vec::new();
        for &z in samples {
            let e4 = form.eta4(z);
            if e4.norm() < 1e-8 {
                continue;
            }
            let lhs = form.eval(g.act(z))? * g.j(z).powi(-2);
            rho.push((lhs - form.eval(z)?) / e4);
        }
        if rho.is_empty() {
            return Err(Error::InvalidArgument("no usable samples".into()));
        }
        let mean = rho.iter().sum::<C64>() / rho.len() as f64;
        let dev = rho.iter().map(|r| (r - mean).norm()).fold(0.0, f64::max);
        Ok((dev / mean.norm().max(1.0), mean))
    };
    match run() {
        Ok((r, mean)) => {
            let mut rep = VerificationReport::new("K automorphy", params, r, tol).with_note(&format!("mean rho = {mean}"));
            rep.timing_ms = t0.elapsed().as_secs_f64() * 1e3;
            rep
        }
        Err(e) => VerificationReport::failed("K automorphy", params, &e),
    }
}

/// Sample points z with Im(γz) = Im(z) ≥ 0.5 where possible: on the isometric
/// circle |cz + d| = 1 when c ≠ 0, otherwise on a horizontal line.
pub fn automorphy_samples(g: &Mat2, count: usize) -> Vec<C64> {
    (0..count)
        .map(|i| {
            let t = (i as f64 + 0.5) / count as f64;
            if g.c == 0 {
                C64::new(-1.0 + 2.0 * t, 0.8)
            } else {
                let c = g.c as f64;
                let centre = -(g.d as f64) / c;
                let rad = 1.0 / c.abs();
                let th = PI * (0.3 + 0.4 * t);
                C64::new(centre + rad * th.cos(), rad * th.sin())
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// oracles

/// λ(ir) = θ₂⁴/θ₃⁴ at nome e^{−πr}.
pub fn modular_lambda(r: f64) -> f64 {
    let (t2, t3) = theta2_theta3((-PI * r).exp());
    (t2 / t3).powi(4)
}

const LAMBDA_DIRECT: f64 = 0.98;

/// Cardy's left-right crossing probability of an r × 1 rectangle,
/// 3Γ(2/3)/Γ(1/3)² λ^{1/3} ₂F₁(1/3, 2/3; 4/3; λ), λ = λ(ir). For λ close
/// to 1 the duality P(r) = 1 − P(1/r) is used instead of the slow series.
pub fn cardy_oracle(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("aspect ratio must be positive, got {r}")));
    }
    let l = modular_lambda(r);
    if l > LAMBDA_DIRECT {
        return Ok(1.0 - cardy_oracle(1.0 / r)?);
    }
    let c = 3.0 * gamma_real(2.0 / 3.0) / gamma_real(1.0 / 3.0).powi(2);
    Ok(c * l.cbrt() * hypergeometric(&[1.0 / 3.0, 2.0 / 3.0], &[4.0 / 3.0], l)?)
}

/// Watts' probability of a crossing both ways,
/// π_h − (√3/2π) λ ₃F₂(1, 1, 4/3; 2, 5/3; λ); symmetric under r ↔ 1/r.
pub fn watts_oracle(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("aspect ratio must be positive, got {r}")));
    }
    let l = modular_lambda(r);
    if l > LAMBDA_DIRECT {
        return watts_oracle(1.0 / r);
    }
    let f = hypergeometric(&[1.0, 1.0, 4.0 / 3.0], &[2.0, 5.0 / 3.0], l)?;
    Ok(cardy_oracle(r)? - 3f64.sqrt() / (2.0 * PI) * l * f)
}

/// d/dr by central differences with Richardson extrapolation.
pub fn oracle_derivative<F: Fn(f64) -> Result<f64>>(f: F, r: f64) -> Result<f64> {
    let d = |h: f64| -> Result<f64> { Ok((f(r + h)? - f(r - h)?) / (2.0 * h)) };
    let h = 1e-2 * r;
    let (d0, d1, d2) = (d(h)?, d(h / 2.0)?, d(h / 4.0)?);
    let r0 = (4.0 * d1 - d0) / 3.0;
    let r1 = (4.0 * d2 - d1) / 3.0;
    Ok((16.0 * r1 - r0) / 15.0)
}

// ---------------------------------------------------------------------------
// crossing curve

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub r: f64,
    pub k: C64,
    pub p_reconstructed: f64,
    pub p_oracle: f64,
    pub abs_dev: f64,
}

/// K(ir) on a grid, the fitted constant c with c·K(ir) ≈ dP/dr, and
/// P(r) = 1/2 + c ∫₁^r K(it) dt against Cardy's formula.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingCurve {
    pub points: Vec<CurvePoint>,
    pub fitted_constant: C64,
    /// max |c K − P′| / max |P′| over the grid.
    pub proportionality_residual: f64,
    pub max_abs_dev: f64,
    /// Same protocol against Cardy minus Watts, anchored at its value at r = 1.
    pub watts_fitted_constant: C64,
    pub watts_proportionality_residual: f64,
    pub watts_max_abs_dev: f64,
}

impl CrossingCurve {
    pub fn is_monotone(&self) -> bool {
        let p: Vec<f64> = self.points.iter().map(|q| q.p_reconstructed).collect();
        p.windows(2).all(|w| w[1] <= w[0]) || p.windows(2).all(|w| w[1] >= w[0])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,re_k,im_k,p_reconstructed,p_oracle,abs_dev\n");
        for p in &self.points {
            out.push_str(&format!("{},{},{},{},{},{}\n", p.r, p.k.re, p.k.im, p.p_reconstructed, p.p_oracle, p.abs_dev));
        }
        out
    }
}

/// ∫₁^r K(it) dt by 32-node Gauss-Legendre on pieces of length ≤ 1/4.
fn integral_from_one(form: &KzForm, r: f64) -> Result<C64> {
    if r == 1.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let rule = GaussLegendre::cached(32);
    let pieces = ((r - 1.0).abs() * 4.0).ceil().max(1.0) as usize;
    let mut acc = C64::new(0.0, 0.0);
    let mut err = None;
    for p in 0..pieces {
        let a = 1.0 + (r - 1.0) * p as f64 / pieces as f64;
        let b = 1.0 + (r - 1.0) * (p + 1) as f64 / pieces as f64;
        acc += rule.segment(C64::new(a, 0.0), C64::new(b, 0.0), |t| match form.eval(C64::new(0.0, t.re)) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                C64::new(0.0, 0.0)
            }
        });
    }
    match err {
        Some(e) => Err(e),
        None => Ok(acc),
    }
}

fn fit(k: &[C64], d: &[f64]) -> (C64, f64) {
    let num: C64 = k.iter().zip(d).map(|(k, d)| k.conj() * d).sum();
    let den: f64 = k.iter().map(|k| k.norm_sqr()).sum();
    let c = num / den;
    let scale = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let res = k.iter().zip(d).map(|(k, d)| (c * k - d).norm()).fold(0.0, f64::max) / scale;
    (c, res)
}

pub fn crossing_curve(form: &KzForm, r_min: f64, r_max: f64, steps: usize) -> Result<CrossingCurve> {
    if !(0.2 <= r_min && r_min < r_max && r_max <= 5.0) {
        return Err(Error::InvalidArgument(format!("need 0.2 <= r_min < r_max <= 5, got [{r_min}, {r_max}]")));
    }
    if steps < 2 {
        return Err(Error::InvalidArgument("the grid needs at least two points".into()));
    }
    let rs: Vec<f64> = (0..steps).map(|i| r_min + (r_max - r_min) * i as f64 / (steps - 1) as f64).collect();
    let mut ks = Vec::with_capacity(steps);
    let mut ints = Vec::with_capacity(steps);
    for &r in &rs {
        ks.push(form.eval(C64::new(0.0, r))?);
        ints.push(integral_from_one(form, r)?);
    }
    let cardy_d: Vec<f64> = rs.iter().map(|&r| oracle_derivative(cardy_oracle, r)).collect::<Result<_>>()?;
    let (c, prop) = fit(&ks, &cardy_d);
    let diff = |r: f64| -> Result<f64> { Ok(cardy_oracle(r)? - watts_oracle(r)?) };
    let watts_d: Vec<f64> = rs.iter().map(|&r| oracle_derivative(diff, r)).collect::<Result<_>>()?;
    let (cw, propw) = fit(&ks, &watts_d);
    let anchor_w = diff(1.0)?;
    let mut points = Vec::with_capacity(steps);
    let mut wdev: f64 = 0.0;
    for (i, &r) in rs.iter().enumerate() {
        // the anchor is exact: no integral is taken at r = 1
        let p = if r == 1.0 { 0.5 } else { 0.5 + (c * ints[i]).re };
        let o = cardy_oracle(r)?;
        points.push(CurvePoint { r, k: ks[i], p_reconstructed: p, p_oracle: o, abs_dev: (p - o).abs() });
        let pw = anchor_w + (cw * ints[i]).re;
        wdev = wdev.max((pw - diff(r)?).abs());
    }
    let max_abs_dev = points.iter().map(|p| p.abs_dev).fold(0.0, f64::max);
    Ok(CrossingCurve {
        points,
        fitted_constant: c,
        proportionality_residual: prop,
        max_abs_dev,
        watts_fitted_constant: cw,
        watts_proportionality_residual: propw,
        watts_max_abs_dev: wdev,
    })
}

/// Reports for the curve: Cardy proportionality (which governs acceptance),
/// the fitted constant, the P(1) anchor and the Cardy-minus-Watts diagnostic.
pub fn crossing_reports(curve: &CrossingCurve, tol: f64) -> Vec<VerificationReport> {
    let grid = format!(
        "r in [{}, {}], {} points",
        curve.points.first().map_or(0.0, |p| p.r),
        curve.points.last().map_or(0.0, |p| p.r),
        curve.points.len()
    );
    let anchor = curve.points.iter().find(|p| p.r == 1.0).map_or(f64::INFINITY, |p| (p.p_reconstructed - 0.5).abs());
    vec![
        VerificationReport::new("crossing Cardy proportionality", grid.clone(), curve.proportionality_residual, tol)
            .with_note(&format!("fitted constant {}", curve.fitted_constant)),
        VerificationReport::new("crossing Cardy curve", grid.clone(), curve.max_abs_dev, tol)
            .with_note(&format!("fitted constant {}", curve.fitted_constant)),
        VerificationReport::new("crossing anchor P(1) = 1/2", grid.clone(), anchor, 0.0),
        VerificationReport::new("crossing Cardy minus Watts proportionality", grid.clone(), curve.watts_proportionality_residual, tol)
            .with_note(&format!("fitted constant {}", curve.watts_fitted_constant)),
        VerificationReport::new("crossing Cardy minus Watts curve", grid, curve.watts_max_abs_dev, tol),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{theta_word, ThetaLetter};

    fn form() -> KzForm {
        KzForm::new(DEFAULT_KZ_ORDER).unwrap()
    }

    #[test]
    fn integrand_lattice() {
        let g = kz_integrand(50).unwrap();
        assert_eq!(g.leading_exponent(), Rational64::new(1, 3));
        let phase = C64::from_polar(1.0, 4.0 * PI / 3.0);
        let z = C64::new(0.1, 0.9);
        for i in 0..10 {
            let e = g.exponent(i);
            let shift = C64::from_polar(1.0, 2.0 * PI * e * 2.0);
            assert!((shift - phase).norm() < 1e-12);
        }
        assert!((sum_qexp(&g, z + 2.0) - phase * sum_qexp(&g, z)).norm() < 1e-12);
        assert!(g.coeffs.iter().all(|c| c.im == 0.0 && c.re.fract() == 0.0));
        assert!(kz_integrand(0).is_err());
    }

    #[test]
    fn k_values() {
        let f = form();
        let k = f.eval(C64::new(0.0, 1.0)).unwrap();
        assert!((k.re + 0.520246).abs() < 1e-6 && k.im.abs() < 1e-12, "{k}");
        for z in [C64::new(0.3, 0.4), C64::new(-0.7, 1.3)] {
            assert!((f.eval(z + 2.0).unwrap() - f.eval(z).unwrap()).norm() < 1e-12);
        }
        assert!(f.eval(C64::new(0.0, 8.0)).unwrap().norm() < 1e-9);
        assert!(f.eval(C64::new(0.0, 0.01)).is_err());
    }

    #[test]
    fn rho_constancy() {
        use ThetaLetter::*;
        let f = form();
        let t2 = theta_word(&[T2]).unwrap();
        let r = kz_automorphy_residual(&f, &t2, &automorphy_samples(&t2, 5), 1e-8);
        assert!(r.pass, "{r:?}");
        for g in [Mat2::S, theta_word(&[S, T2, S]).unwrap()] {
            let r = kz_automorphy_residual(&f, &g, &automorphy_samples(&g, 5), 1e-5);
            assert!(r.pass, "{r:?}");
        }
        // an element outside the theta group is refused
        assert!(!kz_automorphy_residual(&f, &Mat2::t(1), &[C64::new(0.0, 1.0)], 1.0).pass);
    }

    #[test]
    fn oracles() {
        assert!((cardy_oracle(1.0).unwrap() - 0.5).abs() < 1e-12);
        for r in [0.3, 0.7, 1.25, 2.0, 3.0] {
            let s = cardy_oracle(r).unwrap() + cardy_oracle(1.0 / r).unwrap();
            assert!((s - 1.0).abs() < 1e-10, "r={r}");
            let w = watts_oracle(r).unwrap() - watts_oracle(1.0 / r).unwrap();
            assert!(w.abs() < 1e-10, "r={r}");
        }
        let p2 = cardy_oracle(2.0).unwrap();
        assert!(p2 > 0.0 && p2 < 0.5);
        // Watts' value for the square
        assert!((watts_oracle(1.0).unwrap() - 0.322120).abs() < 1e-5);
        // dπ_h/dr = −π 2^{4/3} Γ(2/3)/Γ(1/3)² η(ir)⁴, a closed form from Cardy's formula
        let f = form();
        for r in [0.6, 1.0, 1.7] {
            let c = PI * 2f64.powf(4.0 / 3.0) * gamma_real(2.0 / 3.0) / gamma_real(1.0 / 3.0).powi(2);
            let closed = -c * f.eta4(C64::new(0.0, r)).re;
            assert!((oracle_derivative(cardy_oracle, r).unwrap() - closed).abs() < 1e-8, "r={r}");
        }
    }

    #[test]
    fn curve_and_conventions() {
        let f = form();
        let c = crossing_curve(&f, 0.5, 2.0, 31).unwrap();
        assert_eq!(c.points[10].r, 1.0);
        assert_eq!(c.points[10].p_reconstructed, 0.5);
        assert!(c.is_monotone());
        // K(ir) is the derivative of Cardy minus Watts with constant 1 ...
        assert!((c.watts_fitted_constant - 1.0).norm() < 1e-6, "{}", c.watts_fitted_constant);
        assert!(c.watts_proportionality_residual < 1e-6);
        assert!(c.watts_max_abs_dev < 1e-6);
        // ... and not proportional to Cardy's derivative alone
        assert!(c.proportionality_residual > 0.1, "{}", c.proportionality_residual);
        assert!(c.max_abs_dev > 1e-2);
        let reps = crossing_reports(&c, 1e-4);
        assert!(reps[2].pass && reps[3].pass && reps[4].pass);
        assert!(!reps[0].pass);
        assert!(c.to_csv().lines().count() == 32);
        assert!(crossing_curve(&f, 0.1, 2.0, 5).is_err());
        assert!(crossing_curve(&f, 1.0, 2.0, 1).is_err());
    }

    #[test]
    fn reconstructed_derivative_round_trip() {
        let f = form();
        let c = crossing_curve(&f, 0.8, 1.6, 81).unwrap();
        let h = c.points[1].r - c.points[0].r;
        for i in 1..c.points.len() - 1 {
            let d = (c.points[i + 1].p_reconstructed - c.points[i - 1].p_reconstructed) / (2.0 * h);
            let k = (c.fitted_constant * c.points[i].k).re;
            assert!((d - k).abs() < 1e-3, "r={} d={d} k={k}", c.points[i].r);
        }
    }
}
