//! Truncated coset sums for the automorphic series of the library: the
//! non-holomorphic Eisenstein and Poincaré series E and U, the holomorphic
//! Poincaré series P and P(·, L), and the Q, G, Z families built from a
//! weight 2 cusp form.
//!
//! Two summation engines share the same seeds.
//!
//! * Complete sums: every coset with frame bottom row |c| ≤ C_max, the
//!   translates along Γ_∞ summed in full. Per representative the inner sum
//!   is Σ_n κ(x₀ + h n), done directly near the centre and by midpoint
//!   Euler–Maclaurin beyond, or by its zero Poisson mode at large height.
//! * Finite sums over an explicit [`IndexSet`] of group elements. Identities
//!   that hold term by term are tested on these (matched truncation).

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{check_point, Evaluator, ModularForm};
use crate::group::{coset_reps, CosetRep, GroupContext, Mat2, ScalingMatrix};
use crate::numerics::{e, factorial, gamma, GaussLegendre, NeumaierSum, I};
use crate::symbols::Hom0Spec;

/// Reduction order for complete sums.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SumMode {
    /// Fixed serial order, bit-reproducible.
    #[default]
    Repro,
    /// Parallel compensated reduction; agrees with repro within the tail.
    Fast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesKind {
    E,
    U,
    P,
    P2,
    Q,
    G,
    Z,
}

impl std::str::FromStr for SeriesKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "E" => SeriesKind::E,
            "U" => SeriesKind::U,
            "P" => SeriesKind::P,
            "P2" => SeriesKind::P2,
            "Q" => SeriesKind::Q,
            "G" => SeriesKind::G,
            "Z" => SeriesKind::Z,
            _ => return Err(Error::InvalidArgument(format!("unknown series '{s}'"))),
        })
    }
}

#[derive(Clone, Debug)]
pub struct SeriesRequest {
    pub ctx: GroupContext,
    pub cusp: String,
    pub m: i64,
    pub z: C64,
    pub s: C64,
    pub k: i64,
    pub c_max: u64,
    pub l: Option<Hom0Spec>,
    pub form: Option<Arc<ModularForm>>,
    pub mode: SumMode,
}

impl SeriesRequest {
    pub fn new(ctx: GroupContext, z: C64) -> Self {
        SeriesRequest {
            ctx,
            cusp: "inf".into(),
            m: 0,
            z,
            s: C64::new(2.0, 0.0),
            k: 0,
            c_max: 100,
            l: None,
            form: None,
            mode: SumMode::Repro,
        }
    }
    pub fn cusp(mut self, c: &str) -> Self {
        self.cusp = c.into();
        self
    }
    pub fn m(mut self, m: i64) -> Self {
        self.m = m;
        self
    }
    pub fn s(mut self, s: C64) -> Self {
        self.s = s;
        self
    }
    pub fn s_real(self, s: f64) -> Self {
        self.s(C64::new(s, 0.0))
    }
    pub fn k(mut self, k: i64) -> Self {
        self.k = k;
        self
    }
    pub fn c_max(mut self, c: u64) -> Self {
        self.c_max = c;
        self
    }
    pub fn with_l(mut self, l: Hom0Spec) -> Self {
        self.l = Some(l);
        self
    }
    pub fn with_form(mut self, f: Arc<ModularForm>) -> Self {
        self.form = Some(f);
        self
    }
    pub fn mode(mut self, mode: SumMode) -> Self {
        self.mode = mode;
        self
    }
    pub fn at(&self, z: C64) -> Self {
        let mut r = self.clone();
        r.z = z;
        r
    }

    fn validate(&self) -> Result<()> {
        check_point(self.z)?;
        if self.c_max < 1 {
            return Err(Error::InvalidArgument("C_max must be at least 1".into()));
        }
        if self.m < 0 {
            return Err(Error::InvalidArgument("m must be non-negative".into()));
        }
        if self.k % 2 != 0 {
            return Err(Error::UnsupportedWeight(self.k));
        }
        Ok(())
    }

    fn weight2_form(&self) -> Result<&Arc<ModularForm>> {
        let f = self
            .form
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("series needs a weight 2 cusp form".into()))?;
        if f.weight != 2 {
            return Err(Error::InvalidArgument("series needs a weight 2 cusp form".into()));
        }
        if self.ctx.cusp(&self.cusp)?.label != "inf" {
            return Err(Error::UnsupportedCusp(format!("{} (Q, G and Z are summed at the cusp inf only)", self.cusp)));
        }
        Ok(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: C64,
    pub tail_estimate: f64,
    pub terms_used: usize,
}

// ---------------------------------------------------------------------------
// inner sums

fn rgamma(z: C64) -> C64 {
    if z.re <= 0.5 && z.im.abs() < 1e-14 && (z.re - z.re.round()).abs() < 1e-14 {
        return C64::zero();
    }
    gamma(z).inv()
}

/// κ(u) = (u+iy)^{−s−k/2}(u−iy)^{−s+k/2}·exp(−ib/(u+iy)).
#[derive(Clone, Copy, Debug)]
struct Kernel {
    s: C64,
    k: i64,
    b: f64,
    y: f64,
}

impl Kernel {
    #[inline]
    fn value(&self, u: f64) -> C64 {
        let v = C64::new(u, self.y);
        let theta = self.y.atan2(u);
        (-self.s * (u * u + self.y * self.y).ln() - I * (self.k as f64 * theta) - I * self.b / v).exp()
    }

    /// κ′ and κ‴ from the logarithmic derivative.
    fn derivs(&self, u: f64) -> (C64, C64) {
        let v = C64::new(u, self.y);
        let w = v.conj();
        let a = self.s + self.k as f64 / 2.0;
        let bb = self.s - self.k as f64 / 2.0;
        let ib = I * self.b;
        let (v2, w2) = (v * v, w * w);
        let l0 = -a / v - bb / w + ib / v2;
        let l1 = a / v2 + bb / w2 - 2.0 * ib / (v2 * v);
        let l2 = -2.0 * a / (v2 * v) - 2.0 * bb / (w2 * w) + 6.0 * ib / (v2 * v2);
        let k0 = self.value(u);
        (k0 * l0, k0 * (l0 * l0 * l0 + 3.0 * l0 * l1 + l2))
    }
}

/// ∫_U^∞ κ(±t) dt through t = U v^{−4}, which leaves an integrand with an
/// integrable power at v = 0 and analytic elsewhere on [0, 1].
fn tail_integral(ker: &Kernel, u0: f64, sign: f64) -> C64 {
    const P: i32 = 4;
    let rule = GaussLegendre::cached(32);
    let mut acc = C64::zero();
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let v = 0.5 * (x + 1.0);
        let t = u0 * v.powi(-P);
        acc += ker.value(sign * t) * (w * 0.5 * P as f64 * u0 * v.powi(-P - 1));
    }
    acc
}

/// ∫_ℝ κ(u) du, expanded in b.
fn zero_mode(ker: &Kernel) -> C64 {
    let a = ker.s + ker.k as f64 / 2.0;
    let bb = ker.s - ker.k as f64 / 2.0;
    let base = (-I * (PI / 2.0) * a).exp()
        * (I * (PI / 2.0) * bb).exp()
        * (2.0 * PI)
        * C64::from(2.0 * ker.y).powc(1.0 - 2.0 * ker.s)
        * rgamma(bb);
    let mut total = C64::zero();
    let mut pref = C64::new(1.0, 0.0);
    let mut g = gamma(2.0 * ker.s - 1.0);
    for j in 0..120 {
        let term = base * pref * g * rgamma(a + j as f64);
        total += term;
        if ker.b == 0.0 || (j > 2 && term.norm() <= 1e-18 * total.norm()) {
            break;
        }
        pref *= -ker.b / ((j as f64 + 1.0) * 2.0 * ker.y);
        g *= 2.0 * ker.s - 1.0 + j as f64;
    }
    total
}

/// Σ_n κ(x₀ + h n).
fn periodized(ker: &Kernel, x0: f64, h: f64) -> C64 {
    let x0 = x0 - h * (x0 / h).round();
    if ker.y >= 8.0 * h && ker.b.abs() <= 0.5 * ker.y {
        return zero_mode(ker) / h;
    }
    let n = ((10.0 * (ker.y + 0.5 * h) + 20.0) / h).ceil() as i64;
    let mut acc = NeumaierSum::new();
    for j in -n..=n {
        acc.add(ker.value(x0 + h * j as f64));
    }
    let half = h * (n as f64 + 0.5);
    let ur = x0 + half;
    let (d1, d3) = ker.derivs(ur);
    acc.add(tail_integral(ker, ur, 1.0) / h + d1 * (h / 24.0) - d3 * (7.0 * h.powi(3) / 5760.0));
    let ul = half - x0;
    let (d1, d3) = ker.derivs(-ul);
    acc.add(tail_integral(ker, ul, -1.0) / h - d1 * (h / 24.0) + d3 * (7.0 * h.powi(3) / 5760.0));
    acc.value()
}

/// Odd node count M with e^{−πyM/h} far below rounding.
fn layer_nodes(y: f64, h: f64) -> usize {
    let m = (14.0 * h / y).ceil().max(9.0) as usize;
    m | 1
}

/// Trigonometric interpolant of x₀ ↦ Σ_n κ(x₀ + hn) from M samples.
struct LayerInterp {
    h: f64,
    coeffs: Vec<C64>,
}

impl LayerInterp {
    fn new(ker: &Kernel, h: f64, m: usize) -> Self {
        let samples: Vec<C64> = (0..m).map(|j| periodized(ker, h * j as f64 / m as f64, h)).collect();
        let half = (m / 2) as i64;
        let coeffs = (-half..=half)
            .map(|kk| {
                let mut acc = C64::zero();
                for (j, v) in samples.iter().enumerate() {
                    acc += v * e(C64::from(-(kk * j as i64) as f64 / m as f64));
                }
                acc / m as f64
            })
            .collect();
        LayerInterp { h, coeffs }
    }

    fn eval(&self, x0: f64) -> C64 {
        let half = (self.coeffs.len() / 2) as f64;
        let t = x0 / self.h;
        let step = e(C64::from(t));
        let mut p = e(C64::from(-half * t));
        let mut acc = C64::zero();
        for c in &self.coeffs {
            acc += c * p;
            p *= step;
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// complete sums

#[derive(Clone, Copy, Debug)]
enum CoefBound {
    Const(f64),
    /// |coef| ≤ M (1 + ln c)
    Log(f64),
}

struct Summed {
    value: C64,
    terms: usize,
    bound: CoefBound,
}

/// Σ coef(γ) Im(σ⁻¹γz)^s e(m σ⁻¹γz) ε(σ⁻¹γ, z)^{−k} over complete cosets.
fn coset_sum<F>(req: &SeriesRequest, s: C64, k: i64, log_weighted: bool, coef: F) -> Result<Summed>
where
    F: Fn(&Mat2) -> Result<C64> + Sync,
{
    let en = coset_reps(&req.ctx, &req.cusp, req.c_max)?;
    let w = en.width as f64;
    let h = en.translation as f64;
    let z = req.z;
    let y = z.im;
    let m = req.m as f64;
    let sigma = en.scaling;
    let kernel = |c: i64| {
        let cf64 = c as f64;
        Kernel { s, k, b: 2.0 * PI * m / (w * cf64 * cf64), y }
    };
    // Layers with many cosets share one kernel: sample the periodic inner
    // sum and interpolate it (its Fourier modes decay like e^{−2πy|j|/h}).
    let nodes = layer_nodes(y, h);
    let mut counts: Vec<(i64, usize)> = Vec::new();
    for rep in &en.reps {
        match counts.last_mut() {
            Some((c, n)) if *c == rep.frame.c => *n += 1,
            _ => counts.push((rep.frame.c, 1)),
        }
    }
    let dense: Vec<i64> = counts.iter().filter(|(c, n)| *c > 0 && *n >= 2 * nodes).map(|(c, _)| *c).collect();
    let build = |c: &i64| (*c, LayerInterp::new(&kernel(*c), h, nodes));
    let interps: std::collections::HashMap<i64, LayerInterp> = match req.mode {
        SumMode::Repro => dense.iter().map(build).collect(),
        SumMode::Fast => dense.par_iter().map(build).collect(),
    };
    let term = |rep: &CosetRep| -> Result<(C64, f64)> {
        let cf = coef(&rep.gamma)?;
        let c = rep.frame.c;
        if c == 0 {
            let gz = rep.gamma.act(z);
            let wz = sigma.apply_inverse(gz);
            let jj = sigma.j_inverse(gz) * rep.gamma.j(z);
            let eps = jj / jj.norm();
            let val = cf * (s * wz.im.ln()).exp() * e(wz * m) * eps.powi(-k as i32);
            return Ok((val, 0.0));
        }
        let cf64 = c as f64;
        let scale = (s * (y / (w * cf64 * cf64)).ln()).exp() * e(C64::from(m * rep.frame.a as f64 / (cf64 * w)));
        let x0 = z.re + rep.frame.d as f64 / cf64;
        let inner = match interps.get(&c) {
            Some(li) => li.eval(x0),
            None => periodized(&kernel(c), x0, h),
        };
        Ok((cf * scale * inner, cf.norm() / (1.0 + cf64.ln())))
    };
    let (value, growth) = match req.mode {
        SumMode::Repro => {
            let mut acc = NeumaierSum::new();
            let mut g = 0.0f64;
            for rep in &en.reps {
                let (v, gr) = term(rep)?;
                acc.add(v);
                g = g.max(gr);
            }
            (acc.value(), g)
        }
        SumMode::Fast => {
            let parts: Result<Vec<(C64, f64)>> = en.reps.par_iter().map(term).collect();
            let parts = parts?;
            let acc = parts
                .par_iter()
                .fold(NeumaierSum::new, |mut a, (v, _)| {
                    a.add(*v);
                    a
                })
                .reduce(NeumaierSum::new, |mut a, b| {
                    a.merge(&b);
                    a
                });
            (acc.value(), parts.iter().fold(0.0f64, |g, p| g.max(p.1)))
        }
    };
    let bound = if log_weighted { CoefBound::Log(growth) } else { CoefBound::Const(1.0) };
    Ok(Summed { value, terms: en.reps.len(), bound })
}

fn tail_bound(ctx: &GroupContext, cusp: &str, y: f64, sigma: f64, c_max: u64, coef: CoefBound) -> Result<f64> {
    if sigma <= 1.0 {
        return Err(Error::Divergent { re_s: sigma, bound: 1.0 });
    }
    let cd = ctx.cusp(cusp)?;
    let w = cd.width as f64;
    let h = ctx.infinity_width() as f64;
    let b = PI.sqrt() * crate::numerics::gamma_real(sigma - 0.5) / crate::numerics::gamma_real(sigma);
    let per_c = w.powf(-sigma) * (y.powf(1.0 - sigma) * b + h * y.powf(-sigma));
    let c = c_max as f64;
    let q1 = 2.0 * sigma - 2.0;
    let sum = match coef {
        CoefBound::Const(k) => k * c.powf(-q1) / q1,
        CoefBound::Log(mm) => mm * c.powf(-q1) * ((1.0 + c.ln()) / q1 + 1.0 / (q1 * q1)),
    };
    Ok(per_c * sum)
}

/// Upper bound on the coset-sum tail beyond C_max for Σ Im(γz)^σ at the cusp
/// inf: each layer c has at most h·c cosets, and each complete inner sum is
/// at most the integral plus the largest term.
pub fn tail_estimate(ctx: &GroupContext, z: C64, sigma: f64, c_max: u64) -> Result<f64> {
    check_point(z)?;
    if c_max < 1 {
        return Err(Error::InvalidArgument("C_max must be at least 1".into()));
    }
    tail_bound(ctx, "inf", z.im, sigma, c_max, CoefBound::Const(1.0))
}

fn finish(req: &SeriesRequest, sm: Summed, sigma: f64, factor: C64) -> Result<SeriesValue> {
    let tail = tail_bound(&req.ctx, &req.cusp, req.z.im, sigma, req.c_max, sm.bound)? * factor.norm();
    Ok(SeriesValue { value: sm.value * factor, tail_estimate: tail, terms_used: sm.terms })
}

fn guard_s(s: C64, bound: f64) -> Result<()> {
    if s.re <= bound {
        return Err(Error::Divergent { re_s: s.re, bound });
    }
    Ok(())
}

/// E_a(z, s) = Σ Im(σ_a⁻¹γz)^s.
pub fn eisenstein(req: &SeriesRequest) -> Result<SeriesValue> {
    let mut r = req.clone();
    r.m = 0;
    r.k = 0;
    u_series(&r)
}

/// U_am(z, s, k) with weight factor ε(γ,z) = j/|j|.
pub fn u_series(req: &SeriesRequest) -> Result<SeriesValue> {
    req.validate()?;
    guard_s(req.s, 1.0)?;
    let sm = coset_sum(req, req.s, req.k, false, |_| Ok(C64::new(1.0, 0.0)))?;
    finish(req, sm, req.s.re, C64::new(1.0, 0.0))
}

fn check_holomorphic_weight(k: i64) -> Result<()> {
    if k % 2 != 0 {
        return Err(Error::UnsupportedWeight(k));
    }
    if k < 4 {
        return Err(Error::WeightTooSmall(k));
    }
    Ok(())
}

/// P_am(z)_k = Σ j(σ_a⁻¹γ, z)^{−k} e(m σ_a⁻¹γz) = y^{−k/2} U_am(z, k/2, k).
pub fn p_classical(req: &SeriesRequest) -> Result<SeriesValue> {
    req.validate()?;
    check_holomorphic_weight(req.k)?;
    let half = req.k as f64 / 2.0;
    let sm = coset_sum(req, C64::from(half), req.k, false, |_| Ok(C64::new(1.0, 0.0)))?;
    finish(req, sm, half, C64::from(req.z.im.powf(-half)))
}

/// P_am(z, L)_k = Σ L(γ) j(σ_a⁻¹γ, z)^{−k} e(m σ_a⁻¹γz).
pub fn p_second(req: &SeriesRequest) -> Result<SeriesValue> {
    req.validate()?;
    check_holomorphic_weight(req.k)?;
    let l = req.l.as_ref().ok_or_else(|| Error::InvalidArgument("P2 needs a Hom0 element L".into()))?;
    let half = req.k as f64 / 2.0;
    let sm = coset_sum(req, C64::from(half), req.k, true, |g| l.eval(g))?;
    finish(req, sm, half, C64::from(req.z.im.powf(-half)))
}

/// Q_am(z, s, n; f̄) at the cusp inf for n ≤ 1.
///
/// n = 1 uses F(γz) = F(z) + ⟨γ, f⟩ per coset, n = 0 uses
/// f(γz) = j(γ,z)² f(z). Negative n goes through the reduction to U-series.
pub fn q_series(req: &SeriesRequest, n: i64) -> Result<SeriesValue> {
    req.validate()?;
    guard_s(req.s, 1.0)?;
    let f = req.weight2_form()?.clone();
    let z = req.z;
    let y = z.im;
    match n {
        1 => {
            let fz = f.eichler(z)?;
            let sm = coset_sum(req, req.s, 0, true, |g| Ok((fz + f.symbol(g)).conj()))?;
            finish(req, sm, req.s.re, C64::new(1.0, 0.0))
        }
        0 => {
            if req.s.re - 1.0 <= 1.0 {
                return Err(Error::Divergent { re_s: req.s.re, bound: 2.0 });
            }
            let sm = coset_sum(req, req.s - 1.0, 2, false, |_| Ok(C64::new(1.0, 0.0)))?;
            finish(req, sm, req.s.re - 1.0, y * f.eval(z)?.conj())
        }
        n if n < 0 => {
            let nn = (-n) as usize;
            if req.s.re - nn as f64 - 1.0 <= 1.0 {
                return Err(Error::Divergent { re_s: req.s.re, bound: nn as f64 + 2.0 });
            }
            let lr = lower_y_fbar(&f.series, nn);
            let mut total = C64::zero();
            let mut tail = 0.0;
            let mut terms = 0;
            for (r, lv) in lr.iter().enumerate() {
                let w = q_via_u_weight(nn, r);
                let u = u_series(&req.clone().s(req.s - nn as f64 - 1.0).k(2 * r as i64 + 2))?;
                let coef = w * lv.eval(z);
                total += coef * u.value;
                tail += coef.norm() * u.tail_estimate;
                terms += u.terms_used;
            }
            Ok(SeriesValue { value: total, tail_estimate: tail, terms_used: terms })
        }
        _ => Err(Error::InvalidArgument("Q-series needs n <= 1".into())),
    }
}

/// G_am(z, s; F̄) = Σ conj(F(γz)) j(γ,z)^{−2} Im(γz)^s e(mγz).
pub fn g_series(req: &SeriesRequest) -> Result<SeriesValue> {
    req.validate()?;
    guard_s(req.s, 0.0)?;
    let f = req.weight2_form()?.clone();
    let fz = f.eichler(req.z)?;
    let sm = coset_sum(req, req.s + 1.0, 2, true, |g| Ok((fz + f.symbol(g)).conj()))?;
    finish(req, sm, req.s.re + 1.0, C64::from(1.0 / req.z.im))
}

/// Z computed from its definition and from G − F̄ y⁻¹ U(z, s+1, 2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZPair {
    pub direct: SeriesValue,
    pub decomposed: SeriesValue,
}

/// Real parts of s below this are refused; the sums converge for Re(s) > 0
/// but far too slowly to be useful near the line.
pub const Z_GUARD: f64 = 0.25;

pub fn z_series(req: &SeriesRequest) -> Result<ZPair> {
    req.validate()?;
    if req.s.re < Z_GUARD {
        return Err(Error::Divergent { re_s: req.s.re, bound: Z_GUARD });
    }
    let f = req.weight2_form()?.clone();
    let sm = coset_sum(req, req.s + 1.0, 2, true, |g| Ok(f.symbol(g).conj()))?;
    let direct = finish(req, sm, req.s.re + 1.0, C64::from(1.0 / req.z.im))?;
    let g = g_series(req)?;
    let u = u_series(&req.clone().s(req.s + 1.0).k(2))?;
    let fz = f.eichler(req.z)?.conj() / req.z.im;
    let decomposed = SeriesValue {
        value: g.value - fz * u.value,
        tail_estimate: g.tail_estimate + fz.norm() * u.tail_estimate,
        terms_used: g.terms_used + u.terms_used,
    };
    Ok(ZPair { direct, decomposed })
}

/// z ↦ f(z)·∫_{i∞}^z h, an element of the second-order space.
pub fn product_form(f: &Evaluator, h: &Arc<ModularForm>) -> Result<Evaluator> {
    if h.weight != 2 {
        return Err(Error::InvalidArgument("the integrated form must have weight 2".into()));
    }
    let fe = f.clone();
    let he = h.clone();
    Ok(Evaluator::new(f.weight, &format!("{}*int({})", f.label, h.series.label), move |z| {
        Ok(fe.eval(z)? * he.eichler(z)?)
    }))
}

// ---------------------------------------------------------------------------
// L^r(y f̄) and the weights of the Q-via-U identity

/// Σ coef · y^p · conj(f^{(q)}(z)), the closed form of L^r(y f̄).
#[derive(Clone, Debug)]
pub struct AntiholoExpansion {
    pub terms: Vec<(C64, i32, usize)>,
    pub derivs: Vec<crate::qseries::FracQSeries>,
}

impl AntiholoExpansion {
    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = C64::zero();
        for (c, p, q) in &self.terms {
            acc += c * z.im.powi(*p) * crate::eval::sum_qexp(&self.derivs[*q], z).conj();
        }
        acc
    }
}

/// [L⁰(y f̄), L¹(y f̄), …, Lⁿ(y f̄)] with y f̄ of weight −2, from
/// L_k(y^p conj(g)) = (p − k/2) y^p conj(g) − 2i y^{p+1} conj(g′).
pub fn lower_y_fbar(f: &crate::qseries::FracQSeries, n: usize) -> Vec<AntiholoExpansion> {
    let mut derivs = vec![f.clone()];
    for q in 0..n {
        derivs.push(derivs[q].derive());
    }
    let mut out = Vec::with_capacity(n + 1);
    let mut cur: Vec<(C64, i32, usize)> = vec![(C64::new(1.0, 0.0), 1, 0)];
    let mut k = -2i64;
    for _ in 0..=n {
        out.push(AntiholoExpansion { terms: cur.clone(), derivs: derivs.clone() });
        let mut next: Vec<(C64, i32, usize)> = Vec::new();
        let mut push = |c: C64, p: i32, q: usize| {
            if let Some(t) = next.iter_mut().find(|t| t.1 == p && t.2 == q) {
                t.0 += c;
            } else {
                next.push((c, p, q));
            }
        };
        for (c, p, q) in &cur {
            let a = *p as f64 - k as f64 / 2.0;
            if a != 0.0 {
                push(c * a, *p, *q);
            }
            if *q < n {
                push(c * (-2.0 * I), p + 1, q + 1);
            }
        }
        cur = next;
        k -= 2;
    }
    out
}

/// (−2i)^{−n} (−1)^{n−r} C(n, r) (n+1)!/(r+1)!.
pub fn q_via_u_weight(n: usize, r: usize) -> C64 {
    let sign = if (n - r) % 2 == 0 { 1.0 } else { -1.0 };
    let binom = crate::numerics::binomial(n as u32, r as u32);
    (C64::new(0.0, -2.0)).powi(-(n as i32)) * (sign * binom * factorial(n as u32 + 1) / factorial(r as u32 + 1))
}

// ---------------------------------------------------------------------------
// finite index sets

/// An explicit finite set of coset representatives γ ∈ Γ for the cusp a.
#[derive(Clone, Debug)]
pub struct IndexSet {
    pub scaling: ScalingMatrix,
    pub elements: Vec<Mat2>,
}

/// Cosets rep·T^{hn} with frame |c| ≤ C_max and |n| ≤ n_max.
pub fn index_set(ctx: &GroupContext, cusp: &str, c_max: u64, n_max: i64) -> Result<IndexSet> {
    let en = coset_reps(ctx, cusp, c_max)?;
    let mut elements = Vec::new();
    for rep in &en.reps {
        if rep.frame.c == 0 {
            elements.push(rep.gamma);
            continue;
        }
        for n in -n_max..=n_max {
            elements.push(rep.gamma.mul(&Mat2::t(en.translation * n)));
        }
    }
    Ok(IndexSet { scaling: en.scaling, elements })
}

impl IndexSet {
    /// {δγ : δ in the set}.
    pub fn translate(&self, g: &Mat2) -> IndexSet {
        IndexSet { scaling: self.scaling, elements: self.elements.iter().map(|d| d.mul(g)).collect() }
    }
    pub fn len(&self) -> usize {
        self.elements.len()
    }
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// n-th derivative of an evaluator by the Cauchy integral on a circle of
/// radius Im(w)/2 with 64 trapezoid nodes.
pub fn cauchy_derivative(f: &Evaluator, w: C64, n: usize) -> Result<C64> {
    if n == 0 {
        return f.eval(w);
    }
    const M: usize = 64;
    let r = 0.5 * w.im;
    let mut acc = NeumaierSum::new();
    for j in 0..M {
        let th = 2.0 * PI * j as f64 / M as f64;
        let u = C64::from_polar(1.0, th);
        acc.add(f.eval(w + u * r)? * u.powi(-(n as i32)));
    }
    Ok(acc.value() * (factorial(n as u32) / (M as f64 * r.powi(n as i32))))
}

/// One term of the series for the group element δ at z, every ingredient
/// evaluated at the actual point σ⁻¹δz. `qn` is the Q-series index n.
pub fn seed(req: &SeriesRequest, kind: SeriesKind, qn: i64, scaling: &ScalingMatrix, d: &Mat2, z: C64) -> Result<C64> {
    let dz = d.act(z);
    let w = scaling.apply_inverse(dz);
    let jj = scaling.j_inverse(dz) * d.j(z);
    let eps = jj / jj.norm();
    let im = w.im;
    let ex = e(w * req.m as f64);
    let ims = |s: C64| (s * im.ln()).exp();
    Ok(match kind {
        SeriesKind::E => ims(req.s) * ex,
        SeriesKind::U => ims(req.s) * ex * eps.powi(-(req.k as i32)),
        SeriesKind::P => jj.powi(-(req.k as i32)) * ex,
        SeriesKind::P2 => {
            let l = req.l.as_ref().ok_or_else(|| Error::InvalidArgument("P2 needs L".into()))?;
            l.eval(d)? * jj.powi(-(req.k as i32)) * ex
        }
        SeriesKind::Q => {
            let f = req.weight2_form()?;
            let iv = match qn {
                1 => f.eichler(w)?,
                n if n <= 0 => cauchy_derivative(&f.evaluator(), w, (-n) as usize)?,
                _ => return Err(Error::InvalidArgument("Q-series needs n <= 1".into())),
            };
            iv.conj() * ims(req.s) * ex
        }
        SeriesKind::G => {
            let f = req.weight2_form()?;
            f.eichler(w)?.conj() * jj.powi(-2) * ims(req.s) * ex
        }
        SeriesKind::Z => {
            let f = req.weight2_form()?;
            f.symbol(d).conj() * jj.powi(-2) * ims(req.s) * ex
        }
    })
}

/// Σ_{δ ∈ set} seed(δ, z), compensated, in set order.
pub fn direct_sum(req: &SeriesRequest, kind: SeriesKind, qn: i64, set: &IndexSet, z: C64) -> Result<C64> {
    check_point(z)?;
    let mut acc = NeumaierSum::new();
    for d in &set.elements {
        acc.add(seed(req, kind, qn, &set.scaling, d, z)?);
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::sum_qexp;
    use crate::group::gamma0_context;
    use crate::qseries::builtin_form;

    fn sl2() -> GroupContext {
        gamma0_context(1).unwrap()
    }

    fn f11() -> Arc<ModularForm> {
        Arc::new(ModularForm::new(builtin_form("f11", 600).unwrap().series, 2, 11).unwrap())
    }

    // Brute-force periodic sum with a crude power-law tail.
    fn brute_periodized(ker: &Kernel, x0: f64) -> C64 {
        let n = 200_000i64;
        let mut acc = NeumaierSum::new();
        for j in -n..=n {
            acc.add(ker.value(x0 + j as f64));
        }
        let t = n as f64 + 0.5;
        let sgn = |u: f64| ker.value(u) * u.abs() / (2.0 * ker.s.re - 1.0);
        acc.add(sgn(t) + sgn(-t));
        acc.value()
    }

    #[test]
    fn inner_sum_matches_brute_force() {
        for &(s, k, b, y, x0) in &[
            (2.0, 0, 0.0, 1.0, 0.3),
            (1.5, 2, 0.7, 0.8, -0.1),
            (1.2, -4, 2.0, 0.3, 0.45),
            (3.0, 4, 0.0, 2.5, 0.0),
        ] {
            let ker = Kernel { s: C64::from(s), k, b, y };
            let a = periodized(&ker, x0, 1.0);
            let b_ = brute_periodized(&ker, x0);
            assert!((a - b_).norm() < 1e-11 * b_.norm().max(1e-3), "{s} {k} {b} {y}: {a} vs {b_}");
            let li = LayerInterp::new(&ker, 1.0, layer_nodes(y, 1.0));
            for x in [0.0, 0.137, -0.41, 0.77] {
                let d = periodized(&ker, x, 1.0);
                assert!((li.eval(x) - d).norm() < 1e-12 * d.norm().max(1e-3));
            }
        }
    }

    #[test]
    fn zero_mode_matches_quadrature() {
        for &(s, k, b, y) in &[(2.0, 0, 0.0, 9.0), (1.5, 2, 0.9, 10.0), (2.2, -2, 0.3, 12.0)] {
            let ker = Kernel { s: C64::new(s, 0.1), k, b, y };
            let zm = zero_mode(&ker);
            // ∫ over ℝ: composite panels on [−A, A] and substituted tails
            let a = 4.0 * y;
            let rule = GaussLegendre::cached(64);
            let mid = crate::numerics::composite(rule, C64::from(-a), C64::from(a), 64, |u| ker.value(u.re));
            let q = mid + tail_integral(&ker, a, 1.0) + tail_integral(&ker, a, -1.0);
            assert!((zm - q).norm() < 1e-9 * q.norm(), "{zm} vs {q}");
        }
    }

    // Fourier expansion of E(z, s) on SL2(Z), real s.
    fn zeta(s: f64) -> f64 {
        let n = 2000;
        let mut acc = 0.0;
        for k in 1..n {
            acc += (k as f64).powf(-s);
        }
        let nf = n as f64;
        acc + nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s) + s * nf.powf(-s - 1.0) / 12.0
    }
    fn xi(s: f64) -> f64 {
        PI.powf(-s / 2.0) * crate::numerics::gamma_real(s / 2.0) * zeta(s)
    }
    fn sigma_pow(n: u64, p: f64) -> f64 {
        (1..=n).filter(|d| n % d == 0).map(|d| (d as f64).powf(p)).sum()
    }
    fn fourier_eisenstein(z: C64, s: f64) -> f64 {
        let (x, y) = (z.re, z.im);
        let phi = xi(2.0 * s - 1.0) / xi(2.0 * s);
        let mut v = y.powf(s) + phi * y.powf(1.0 - s);
        for n in 1..40u64 {
            let nf = n as f64;
            let kb = crate::numerics::bessel_k(C64::from(s - 0.5), 2.0 * PI * nf * y, 64).unwrap().re;
            v += 2.0 / xi(2.0 * s) * y.sqrt() * 2.0 * nf.powf(s - 0.5) * sigma_pow(n, 1.0 - 2.0 * s) * kb * (2.0 * PI * nf * x).cos();
        }
        v
    }

    #[test]
    fn eisenstein_vs_fourier() {
        for &(z, s, c) in &[(C64::new(0.0, 1.0), 2.0, 1000u64), (C64::new(0.3, 1.7), 2.5, 300)] {
            let req = SeriesRequest::new(sl2(), z).s_real(s).c_max(c);
            let v = eisenstein(&req).unwrap();
            let o = fourier_eisenstein(z, s);
            assert!((v.value - o).norm() < 1e-6, "{z} {s}: {} vs {o}", v.value);
            assert!(v.tail_estimate < 1e-5);
        }
    }

    #[test]
    fn eisenstein_periodic_and_guard() {
        let req = SeriesRequest::new(sl2(), C64::new(0.2, 0.9)).s_real(2.0).c_max(40);
        let a = eisenstein(&req).unwrap().value;
        let b = eisenstein(&req.at(C64::new(1.2, 0.9))).unwrap().value;
        assert!((a - b).norm() < 1e-13);
        assert!(matches!(eisenstein(&req.clone().s_real(1.0)), Err(Error::Divergent { .. })));
        // m = 0, k = 0 U-series is the Eisenstein series
        let u = u_series(&req.m(0).k(0)).unwrap().value;
        assert_eq!(u, a);
    }

    #[test]
    fn tail_estimate_properties() {
        let ctx = sl2();
        let z = C64::new(0.0, 1.0);
        let t300 = tail_estimate(&ctx, z, 2.0, 300).unwrap();
        assert!(tail_estimate(&ctx, z, 2.0, 600).unwrap() < t300);
        let big = eisenstein(&SeriesRequest::new(ctx.clone(), z).s_real(2.0).c_max(3000)).unwrap().value;
        let small = eisenstein(&SeriesRequest::new(ctx.clone(), z).s_real(2.0).c_max(300)).unwrap().value;
        assert!((big - small).norm() < t300);
        let loose = tail_estimate(&ctx, z, 1.05, 300).unwrap();
        assert!(loose.is_finite() && loose > 1.0);
        assert!(tail_estimate(&ctx, z, 1.0, 300).is_err());
    }

    #[test]
    fn poincare_checks() {
        let ctx = sl2();
        let delta = builtin_form("delta", 200).unwrap().series;
        let mut ratios = Vec::new();
        for z in [C64::new(0.0, 1.0), C64::new(0.5, 1.0), C64::new(0.0, 2.0)] {
            let p = p_classical(&SeriesRequest::new(ctx.clone(), z).k(12).m(1).c_max(60)).unwrap();
            ratios.push(p.value / sum_qexp(&delta, z));
        }
        for r in &ratios[1..] {
            assert!((r - ratios[0]).norm() < 1e-6 * ratios[0].norm());
        }
        let p4 = p_classical(&SeriesRequest::new(ctx.clone(), C64::new(0.0, 1.0)).k(4).m(1).c_max(300)).unwrap();
        assert!(p4.value.norm() < 1e-4, "{}", p4.value);
        assert!(matches!(
            p_classical(&SeriesRequest::new(ctx.clone(), C64::new(0.0, 1.0)).k(2).m(1)),
            Err(Error::WeightTooSmall(2))
        ));
        // E_12 coefficient ratio by a horocycle DFT
        let y = 0.6;
        let mm = 32;
        let mut a = [C64::zero(); 3];
        for j in 0..mm {
            let x = j as f64 / mm as f64;
            let v = p_classical(&SeriesRequest::new(ctx.clone(), C64::new(x, y)).k(12).m(0).c_max(40)).unwrap().value;
            for (n, an) in a.iter_mut().enumerate() {
                *an += v * e(C64::from(-(n as f64) * x)) / mm as f64;
            }
        }
        let c1 = a[1] * (2.0 * PI * y).exp();
        let c2 = a[2] * (4.0 * PI * y).exp();
        assert!((c2 / c1 - 2049.0).norm() < 1e-6 * 2049.0, "{}", c2 / c1);
    }

    #[test]
    fn holomorphy_of_p() {
        let ctx = gamma0_context(11).unwrap();
        let req = SeriesRequest::new(ctx, C64::new(0.1, 0.8)).k(4).m(1).c_max(60);
        let h = 1e-4;
        let f = |dz: C64| p_classical(&req.at(req.z + dz)).unwrap().value;
        let dzbar = 0.5 * ((f(C64::from(h)) - f(C64::from(-h))) / (2.0 * h) + I * (f(C64::new(0.0, h)) - f(C64::new(0.0, -h))) / (2.0 * h));
        assert!(dzbar.norm() < 1e-6, "{dzbar}");
    }

    #[test]
    fn second_order_poincare() {
        let ctx = gamma0_context(11).unwrap();
        let l = Hom0Spec::symbol_of(f11());
        let zero = Hom0Spec::default();
        let req = SeriesRequest::new(ctx.clone(), C64::new(0.0, 1.0)).k(4).m(1).c_max(40).with_l(zero);
        assert_eq!(p_second(&req).unwrap().value, C64::zero());
        // transformation law at matched truncation
        let req = req.with_l(l.clone());
        let set = index_set(&ctx, "inf", 60, 30).unwrap();
        let z = C64::new(0.0, 1.0);
        for g in [Mat2::new(4, -1, 33, -8).unwrap(), Mat2::t(1)] {
            let lhs = direct_sum(&req, SeriesKind::P2, 0, &set, g.act(z)).unwrap() * g.j(z).powi(-4);
            let sg = set.translate(&g);
            let p2 = direct_sum(&req, SeriesKind::P2, 0, &sg, z).unwrap();
            let p1 = direct_sum(&req, SeriesKind::P, 0, &sg, z).unwrap();
            let res = (lhs - p2 - l.eval(&g.inverse()).unwrap() * p1).norm();
            assert!(res < 1e-8 * (1.0 + p2.norm()), "{g:?}: {res}");
        }
    }

    #[test]
    fn product_form_automorphy() {
        let f4 = Arc::new(ModularForm::new(builtin_form("f11sq", 600).unwrap().series, 4, 11).unwrap());
        let h = f11();
        let pf = product_form(&f4.evaluator(), &h).unwrap();
        let ctx = gamma0_context(11).unwrap();
        let z = C64::new(0.13, 0.4);
        for g in crate::group::sample_elements(&ctx, 5, 3, 60) {
            let lhs = pf.eval(g.act(z)).unwrap() * g.j(z).powi(-4) - pf.eval(z).unwrap();
            let rhs = h.symbol(&g) * f4.eval(z).unwrap();
            assert!((lhs - rhs).norm() < 1e-8 * (1.0 + rhs.norm()), "{g:?}");
        }
        let t = (pf.eval(z + 1.0).unwrap() - pf.eval(z).unwrap()).norm();
        assert!(t < 1e-10);
    }

    #[test]
    fn z_decomposition_complete() {
        let ctx = gamma0_context(11).unwrap();
        let req = SeriesRequest::new(ctx, C64::new(0.0, 1.0)).s_real(1.5).m(1).c_max(200).with_form(f11());
        let zp = z_series(&req).unwrap();
        assert!((zp.direct.value - zp.decomposed.value).norm() < 1e-6);
        assert!(z_series(&req.clone().s_real(0.2)).is_err());
    }

    #[test]
    fn lowering_closed_form() {
        // L_{-2}(y f̄) = 2y f̄ - 2i y² conj(f')
        let f = builtin_form("f11", 100).unwrap().series;
        let lr = lower_y_fbar(&f, 2);
        let z = C64::new(0.1, 1.1);
        let fz = sum_qexp(&f, z);
        let fp = sum_qexp(&f.derive(), z);
        let want = 2.0 * z.im * fz.conj() - 2.0 * I * z.im * z.im * fp.conj();
        assert!((lr[1].eval(z) - want).norm() < 1e-13 * want.norm());
        assert_eq!(q_via_u_weight(0, 0), C64::new(1.0, 0.0));
    }
}
