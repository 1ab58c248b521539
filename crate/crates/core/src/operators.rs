//! Maass raising and lowering operators.
//!
//! R_k = 2iy ∂/∂z + k/2 maps ε-weight k to k+2, L_k = −2iy ∂/∂z̄ − k/2 maps
//! k to k−2. Derivatives are central differences in x and y with two levels
//! of Richardson extrapolation; the closed-form checks (Whittaker ladder,
//! recurrences of U, the Q-via-U identity) are compared against them.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::autoseries::{
    direct_sum, lower_y_fbar, q_via_u_weight, u_series, IndexSet, SeriesKind, SeriesRequest,
};
use crate::error::{Error, Result};
use crate::eval::{check_point, whittaker, Evaluator, ModularForm};
use crate::group::{GroupContext, Mat2};
use crate::numerics::{factorial, I};
use crate::report::VerificationReport;

/// An evaluator together with the weight k in ψ(γz) = ε(γ,z)^k ψ(z).
#[derive(Clone, Debug)]
pub struct WeightedFunction {
    pub f: Evaluator,
    pub k: i64,
}

impl WeightedFunction {
    pub fn new(f: Evaluator, k: i64) -> Result<Self> {
        if k % 2 != 0 {
            return Err(Error::UnsupportedWeight(k));
        }
        Ok(WeightedFunction { f, k })
    }

    pub fn from_fn<F: Fn(C64) -> Result<C64> + Send + Sync + 'static>(k: i64, label: &str, f: F) -> Result<Self> {
        Self::new(Evaluator::new(k, label, f), k)
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        self.f.eval(z)
    }

    /// y^s as a function of weight k.
    pub fn y_power(s: C64, k: i64) -> Result<Self> {
        Self::from_fn(k, "y^s", move |z: C64| Ok((s * z.im.ln()).exp()))
    }

    /// W_s(mz), weight 0.
    pub fn whittaker(s: C64, m: i64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("whittaker needs m != 0".into()));
        }
        Self::from_fn(0, "W_s(mz)", move |z| whittaker(s, m, z))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Raise,
    Lower,
}

impl std::str::FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "r" | "raise" => Ok(Direction::Raise),
            "l" | "lower" => Ok(Direction::Lower),
            _ => Err(Error::InvalidArgument(format!("unknown direction '{s}'"))),
        }
    }
}

/// A numerical derivative with the gap between the last two Richardson levels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumDeriv {
    pub value: C64,
    pub error: f64,
}

fn check_step(z: C64, h: f64) -> Result<()> {
    if !(h > 1e-13 * z.norm().max(1.0)) || h >= 0.5 * z.im {
        return Err(Error::InvalidArgument(format!("step underflow or step too large: h = {h:e} at y = {}", z.im)));
    }
    Ok(())
}

// Richardson table for a symmetric stencil with even error expansion in h,
// `order` = 2 for first and second central differences.
fn richardson<F: FnMut(f64) -> Result<C64>>(h: f64, mut d: F) -> Result<NumDeriv> {
    let d0 = d(h)?;
    let d1 = d(h / 2.0)?;
    let d2 = d(h / 4.0)?;
    let r0 = (d1 * 4.0 - d0) / 3.0;
    let r1 = (d2 * 4.0 - d1) / 3.0;
    let v = (r1 * 16.0 - r0) / 15.0;
    Ok(NumDeriv { value: v, error: (v - r1).norm() })
}

fn partial_x(f: &Evaluator, z: C64, h: f64) -> Result<NumDeriv> {
    richardson(h, |t| Ok((f.eval(z + t)? - f.eval(z - t)?) / (2.0 * t)))
}

fn partial_y(f: &Evaluator, z: C64, h: f64) -> Result<NumDeriv> {
    richardson(h, |t| Ok((f.eval(z + I * t)? - f.eval(z - I * t)?) / (2.0 * t)))
}

/// ∂f/∂z and ∂f/∂z̄ at z with step h.
pub fn wirtinger(f: &Evaluator, z: C64, h: f64) -> Result<(NumDeriv, NumDeriv)> {
    check_point(z)?;
    check_step(z, h)?;
    let dx = partial_x(f, z, h)?;
    let dy = partial_y(f, z, h)?;
    let err = 0.5 * (dx.error + dy.error);
    Ok((
        NumDeriv { value: (dx.value - I * dy.value) * 0.5, error: err },
        NumDeriv { value: (dx.value + I * dy.value) * 0.5, error: err },
    ))
}

/// Default first-derivative step, 10⁻⁵·y.
pub fn default_step(z: C64) -> f64 {
    1e-5 * z.im
}

/// R_k ψ or L_k ψ at z by finite differences.
pub fn raise_lower_num(psi: &WeightedFunction, dir: Direction, z: C64, h: Option<f64>) -> Result<NumDeriv> {
    check_point(z)?;
    let h = h.unwrap_or_else(|| default_step(z));
    check_step(z, h)?;
    let dx = partial_x(&psi.f, z, h)?;
    let dy = partial_y(&psi.f, z, h)?;
    let v = psi.eval(z)?;
    let y = z.im;
    let k2 = psi.k as f64 / 2.0;
    // 2iy ∂z = iy(∂x − i∂y), −2iy ∂z̄ = −iy(∂x + i∂y)
    let value = match dir {
        Direction::Raise => I * y * (dx.value - I * dy.value) + k2 * v,
        Direction::Lower => -I * y * (dx.value + I * dy.value) - k2 * v,
    };
    Ok(NumDeriv { value, error: y * (dx.error + dy.error) })
}

/// The function R_k ψ (or L_k ψ), itself evaluated by finite differences with step h·y.
pub fn apply(psi: &WeightedFunction, dir: Direction, rel_step: f64) -> WeightedFunction {
    let inner = psi.clone();
    let k = match dir {
        Direction::Raise => psi.k + 2,
        Direction::Lower => psi.k - 2,
    };
    let label = format!("{}{}", if dir == Direction::Raise { "R" } else { "L" }, psi.f.label);
    WeightedFunction {
        f: Evaluator::new(k, &label, move |z| Ok(raise_lower_num(&inner, dir, z, Some(rel_step * z.im))?.value)),
        k,
    }
}

/// R^n or L^n by nested finite differences.
pub fn apply_n(psi: &WeightedFunction, dir: Direction, n: usize, rel_step: f64) -> WeightedFunction {
    let mut cur = psi.clone();
    for _ in 0..n {
        cur = apply(&cur, dir, rel_step);
    }
    cur
}

/// Δ = −4y² ∂z∂z̄ = −y²(∂xx + ∂yy) by second central differences.
pub fn laplacian_num(psi: &WeightedFunction, z: C64, h: Option<f64>) -> Result<NumDeriv> {
    check_point(z)?;
    let h = h.unwrap_or(1e-2 * z.im);
    check_step(z, h)?;
    let v = psi.eval(z)?;
    let f = &psi.f;
    let d = richardson(h, |t| {
        let sx = f.eval(z + t)? + f.eval(z - t)?;
        let sy = f.eval(z + I * t)? + f.eval(z - I * t)?;
        Ok((sx + sy - v * 4.0) / (t * t))
    })?;
    let y2 = z.im * z.im;
    Ok(NumDeriv { value: -d.value * y2, error: d.error * y2 })
}

// ---------------------------------------------------------------------------
// Whittaker ladder

/// The expansion coefficient exactly as printed:
/// (−4πm)^i (m/|m|)^j (2n)! / ((i+j)!(i−j)!(n−i)!).
pub fn omega(n: u32, m: i64, i: u32, j: i32) -> Result<C64> {
    if m == 0 {
        return Err(Error::InvalidArgument("omega needs m != 0".into()));
    }
    if i > n || j.unsigned_abs() > i {
        return Err(Error::IndexRange(format!("omega({n},{m},{i},{j}) needs 0 <= i <= n and |j| <= i")));
    }
    let sgn = if m < 0 && j % 2 != 0 { -1.0 } else { 1.0 };
    let ii = i as i32;
    let denom = factorial((ii + j) as u32) * factorial((ii - j) as u32) * factorial(n - i);
    Ok(C64::from((-4.0 * PI * m as f64).powi(ii) * sgn * factorial(2 * n) / denom))
}

/// Which normalization of ω to use in the ladder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OmegaConvention {
    /// As printed.
    Printed,
    /// Divided by 4ⁿ; this is what the finite differences reproduce.
    Rescaled,
}

/// Σ coef · y^i · W_{s+j}(mz).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorExpansion {
    pub n: u32,
    pub terms: Vec<(C64, u32, i32)>,
}

impl OperatorExpansion {
    pub fn respects_index_bound(&self) -> bool {
        self.terms.iter().all(|&(_, i, j)| j.unsigned_abs() <= i && i <= self.n)
    }
}

/// The ladder expansion of Rⁿ (or Lⁿ, with m replaced by −m) of W_s(mz).
pub fn ladder_expansion(n: u32, m: i64, dir: Direction, conv: OmegaConvention) -> Result<OperatorExpansion> {
    let mm = if dir == Direction::Raise { m } else { -m };
    let scale = match conv {
        OmegaConvention::Printed => 1.0,
        OmegaConvention::Rescaled => 0.25f64.powi(n as i32),
    };
    let mut terms = Vec::new();
    for i in 0..=n {
        for j in -(i as i32)..=(i as i32) {
            terms.push((omega(n, mm, i, j)? * scale, i, j));
        }
    }
    Ok(OperatorExpansion { n, terms })
}

/// Evaluate an expansion at (s, m, z).
pub fn eval_expansion(e: &OperatorExpansion, s: C64, m: i64, z: C64) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for &(c, i, j) in &e.terms {
        acc += c * z.im.powi(i as i32) * whittaker(s + j as f64, m, z)?;
    }
    Ok(acc)
}

/// Rⁿ(W_s(mz)) or Lⁿ(W_s(mz)) with ω as printed; m = 0 selects the y^s branch.
pub fn whittaker_ladder(n: u32, dir: Direction, s: C64, m: i64, z: C64) -> Result<C64> {
    whittaker_ladder_with(OmegaConvention::Printed, n, dir, s, m, z)
}

pub fn whittaker_ladder_with(conv: OmegaConvention, n: u32, dir: Direction, s: C64, m: i64, z: C64) -> Result<C64> {
    check_point(z)?;
    if m == 0 {
        return Ok(rising(s, n) * (s * z.im.ln()).exp());
    }
    eval_expansion(&ladder_expansion(n, m, dir, conv)?, s, m, z)
}

/// s(s+1)⋯(s+n−1).
pub fn rising(s: C64, n: u32) -> C64 {
    (0..n).fold(C64::new(1.0, 0.0), |acc, t| acc * (s + t as f64))
}

fn rel(a: C64, b: C64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn timed(mut r: VerificationReport, t0: Instant) -> VerificationReport {
    r.timing_ms = t0.elapsed().as_secs_f64() * 1e3;
    r
}

/// Gap between the ladder expansion and nested finite differences, relative
/// to Σ|terms| of the expansion. In the annihilating direction (R for m < 0,
/// L for m > 0) the result is many orders below the terms, so a plain relative
/// error would measure the cancellation rather than the identity.
pub fn ladder_residual(conv: OmegaConvention, n: u32, dir: Direction, s: C64, m: i64, z: C64, tol: f64) -> VerificationReport {
    let t0 = Instant::now();
    let name = if dir == Direction::Raise { "raising ladder" } else { "lowering ladder" };
    let params = format!("n={n} m={m} s={s} z={z} omega={conv:?}");
    let run = || -> Result<f64> {
        let w = WeightedFunction::whittaker(s, m)?;
        // nested differences lose digits quickly, so the step is as large as
        // the oscillation of W allows
        let step = 1.5e-2 / (m.unsigned_abs().max(1) as f64);
        let num = apply_n(&w, dir, n as usize, step).eval(z)?;
        let e = ladder_expansion(n, m, dir, OmegaConvention::Rescaled)?;
        let mut scale = w.eval(z)?.norm();
        for &(c, i, j) in &e.terms {
            scale += (c * z.im.powi(i as i32) * whittaker(s + j as f64, m, z)?).norm();
        }
        Ok((num - whittaker_ladder_with(conv, n, dir, s, m, z)?).norm() / scale)
    };
    match run() {
        Ok(r) => timed(VerificationReport::new(name, params, r, tol), t0),
        Err(e) => VerificationReport::failed(name, params, &e),
    }
}

// ---------------------------------------------------------------------------
// identity reports

/// Δψ from the direct second differences and from −L₂R₀ψ and −R₋₂L₀ψ; with
/// `eigen = Some(λ)` also |Δψ − λψ|. ψ must have weight 0.
pub fn laplacian_residual(psi: &WeightedFunction, z: C64, eigen: Option<C64>, tol: f64) -> Vec<VerificationReport> {
    let t0 = Instant::now();
    let params = format!("psi={} z={z}", psi.f.label);
    let run = || -> Result<Vec<(String, f64)>> {
        if psi.k != 0 {
            return Err(Error::InvalidArgument("the Laplacian acts on weight 0".into()));
        }
        let direct = laplacian_num(psi, z, None)?.value;
        let lr = -apply(&apply(psi, Direction::Raise, 1e-2), Direction::Lower, 1e-2).eval(z)?;
        let rl = -apply(&apply(psi, Direction::Lower, 1e-2), Direction::Raise, 1e-2).eval(z)?;
        let mut out = vec![
            ("laplacian as -L2 R0".to_string(), rel(lr, direct)),
            ("laplacian as -R-2 L0".to_string(), rel(rl, direct)),
        ];
        if let Some(l) = eigen {
            out.push(("laplacian eigenvalue".to_string(), rel(direct, l * psi.eval(z)?)));
        }
        Ok(out)
    };
    match run() {
        Ok(v) => v.into_iter().map(|(n, r)| timed(VerificationReport::new(&n, params.clone(), r, tol), t0)).collect(),
        Err(e) => vec![VerificationReport::failed("laplacian factorisation", params, &e)],
    }
}

/// U(z, s, k) as a weighted function through the complete coset sum.
pub fn u_function(req: &SeriesRequest) -> Result<WeightedFunction> {
    let r = req.clone();
    let k = req.k;
    WeightedFunction::from_fn(k, &format!("U(s={},k={k},m={})", req.s, req.m), move |z| Ok(u_series(&r.at(z))?.value))
}

/// Residuals of R_k U(s,k) = (s+k/2)U(s,k+2) − 4πm U(s+1,k+2) and
/// L_k U(s,k) = (s−k/2)U(s,k−2), both sides truncated at the same C_max.
pub fn u_recurrence_residual(req: &SeriesRequest, tol: f64) -> Vec<VerificationReport> {
    let t0 = Instant::now();
    let (s, k, m, z) = (req.s, req.k, req.m, req.z);
    let params = format!("m={m} s={s} k={k} z={z} cmax={}", req.c_max);
    let run = || -> Result<(f64, f64)> {
        let u = u_function(req)?;
        let h = Some(1e-3 * z.im);
        let r_num = raise_lower_num(&u, Direction::Raise, z, h)?.value;
        let up = u_series(&req.clone().k(k + 2))?.value;
        let up1 = u_series(&req.clone().k(k + 2).s(s + 1.0))?.value;
        let r_rhs = (s + k as f64 / 2.0) * up - 4.0 * PI * m as f64 * up1;
        let l_num = raise_lower_num(&u, Direction::Lower, z, h)?.value;
        let l_rhs = (s - k as f64 / 2.0) * u_series(&req.clone().k(k - 2))?.value;
        Ok((rel(r_num, r_rhs), rel(l_num, l_rhs)))
    };
    match run() {
        Ok((a, b)) => vec![
            timed(VerificationReport::new("U raising recurrence", params.clone(), a, tol), t0),
            timed(VerificationReport::new("U lowering recurrence", params, b, tol), t0),
        ],
        Err(e) => vec![VerificationReport::failed("U recurrences", params, &e)],
    }
}

/// ε(τ, z) = j(τ,z)/|j(τ,z)|.
pub fn epsilon(tau: &Mat2, z: C64) -> C64 {
    let j = tau.j(z);
    j / j.norm()
}

/// θ_{τ,k} ψ(z) = ψ(τz)/ε(τ,z)^k, of the same weight k.
pub fn theta(tau: Mat2, psi: &WeightedFunction) -> WeightedFunction {
    let inner = psi.clone();
    let k = psi.k;
    WeightedFunction {
        f: Evaluator::new(k, &format!("theta{tau}{}", psi.f.label), move |z| {
            Ok(inner.eval(tau.act(z))? / epsilon(&tau, z).powi(k as i32))
        }),
        k,
    }
}

/// |θL − Lθ| and |θR − Rθ| at z, relative to the size of the values.
pub fn theta_commutation_residual(tau: &Mat2, psi: &WeightedFunction, z: C64, tol: f64) -> Vec<VerificationReport> {
    let t0 = Instant::now();
    let params = format!("tau={tau} psi={} k={} z={z}", psi.f.label, psi.k);
    let run = || -> Result<(f64, f64)> {
        let th = theta(*tau, psi);
        let mut out = [0.0; 2];
        for (slot, dir) in [Direction::Lower, Direction::Raise].into_iter().enumerate() {
            let after = theta(*tau, &apply(psi, dir, 1e-3)).eval(z)?;
            let before = apply(&th, dir, 1e-3).eval(z)?;
            out[slot] = rel(after, before);
        }
        Ok((out[0], out[1]))
    };
    match run() {
        Ok((l, r)) => vec![
            timed(VerificationReport::new("theta commutes with L", params.clone(), l, tol), t0),
            timed(VerificationReport::new("theta commutes with R", params, r, tol), t0),
        ],
        Err(e) => vec![VerificationReport::failed("theta commutation", params, &e)],
    }
}

/// Q(z, s, −n; f̄) summed directly over `set`, with f^{(n)} from Cauchy
/// integrals, against the combination of L^r(y f̄) and U(z, s−n−1, 2r+2)
/// summed over the same set. The cusp is the one of `set`.
pub fn q_via_u_residual(
    ctx: &GroupContext,
    f: &Arc<ModularForm>,
    m: i64,
    n: usize,
    s: C64,
    z: C64,
    set: &IndexSet,
    tol: f64,
) -> VerificationReport {
    let t0 = Instant::now();
    let params = format!("n={n} m={m} s={s} z={z} |set|={}", set.len());
    let run = || -> Result<f64> {
        if s.re - n as f64 - 1.0 <= 1.0 {
            return Err(Error::Divergent { re_s: s.re, bound: n as f64 + 2.0 });
        }
        let req = SeriesRequest::new(ctx.clone(), z).m(m).s(s).with_form(f.clone());
        let lhs = direct_sum(&req, SeriesKind::Q, -(n as i64), set, z)?;
        let lr = lower_y_fbar(&f.series, n);
        let mut rhs = C64::new(0.0, 0.0);
        for (r, lv) in lr.iter().enumerate() {
            let ureq = req.clone().s(s - n as f64 - 1.0).k(2 * r as i64 + 2);
            rhs += q_via_u_weight(n, r) * lv.eval(z) * direct_sum(&ureq, SeriesKind::U, 0, set, z)?;
        }
        Ok(rel(lhs, rhs))
    };
    match run() {
        Ok(r) => timed(VerificationReport::new("Q via U reduction", params, r, tol), t0),
        Err(e) => VerificationReport::failed("Q via U reduction", params, &e),
    }
}
