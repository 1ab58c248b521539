//! Pointwise evaluation in the upper half-plane.
//!
//! Plain q-expansions are summed with a fitted tail bound. Forms on SL2(Z)
//! and on Γ₀(N) with N prime also get a [`ModularForm`] evaluator, which
//! reduces the point to the standard fundamental domain first. That keeps
//! the q-series at heights ≥ √3/(2N) whatever the input height is.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ext_gcd, GroupContext, Mat2};
use crate::numerics::{bessel_k, e, I};
use crate::qseries::FracQSeries;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperHalfPoint {
    pub x: f64,
    pub y: f64,
}

impl UpperHalfPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !y.is_finite() || !x.is_finite() {
            return Err(Error::NotInUpperHalfPlane(y));
        }
        Ok(Self { x, y })
    }

    pub fn from_c64(z: C64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn z(&self) -> C64 {
        C64::new(self.x, self.y)
    }
}

pub fn check_point(z: C64) -> Result<()> {
    UpperHalfPoint::from_c64(z).map(|_| ())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluated {
    pub value: C64,
    pub tail: f64,
    pub terms: usize,
}

/// Polynomial envelope |c_n| ≤ exp(log_c)·(n+1)^a fitted on the upper
/// three quarters of the stored coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthModel {
    pub log_c: f64,
    pub a: f64,
}

pub fn fit_growth(coeffs: &[C64]) -> Option<GrowthModel> {
    let n = coeffs.len();
    let block = 8usize;
    let start = n / 4;
    let mut pts = Vec::new();
    let mut i = start;
    while i < n {
        let end = (i + block).min(n);
        let (idx, m) = (i..end)
            .map(|j| (j, coeffs[j].norm()))
            .fold((i, 0.0f64), |acc, v| if v.1 > acc.1 { v } else { acc });
        if m > 0.0 {
            pts.push((((idx + 1) as f64).ln(), m.ln()));
        }
        i = end;
    }
    if pts.is_empty() {
        return None;
    }
    let a = if pts.len() >= 2 {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        if sxx > 0.0 { (sxy / sxx).max(0.0) } else { 0.0 }
    } else {
        0.0
    };
    let log_c = pts.iter().map(|p| p.1 - a * p.0).fold(f64::NEG_INFINITY, f64::max);
    Some(GrowthModel { log_c, a })
}

/// Σ_{n ≥ start} exp(log_c)(n+1)^a r^n with r = e^{−2πy·step/D} and the
/// leading factor |q^{lead/D}|.
fn model_tail(g: GrowthModel, s: &FracQSeries, y: f64, start: usize) -> f64 {
    let ln_r = -2.0 * PI * y * s.step as f64 / s.denom as f64;
    let ln_r0 = -2.0 * PI * y * s.lead as f64 / s.denom as f64;
    if ln_r >= 0.0 {
        return f64::INFINITY;
    }
    let ln_term = |n: usize| g.log_c + g.a * ((n + 1) as f64).ln() + n as f64 * ln_r + ln_r0;
    let mut n = start;
    let mut sum = 0.0f64;
    let mut iters = 0usize;
    loop {
        let ratio = (g.a * ((n + 2) as f64 / (n + 1) as f64).ln() + ln_r).exp();
        let t = ln_term(n).exp();
        if ratio < 1.0 {
            // ratio decreases in n from here on, so the geometric bound holds
            return sum + t / (1.0 - ratio);
        }
        sum += t;
        n += 1;
        iters += 1;
        if iters > 50_000_000 || !sum.is_finite() {
            return f64::INFINITY;
        }
    }
}

/// Tail bound for truncation at `start` coefficients and the order needed
/// to push the bound below `tol`.
pub fn tail_estimate(s: &FracQSeries, y: f64, tol: f64) -> (f64, usize) {
    let Some(g) = fit_growth(&s.coeffs) else {
        return (0.0, s.len());
    };
    let t = model_tail(g, s, y, s.len());
    if t <= tol {
        return (t, s.len());
    }
    let mut hi = s.len().max(1);
    while model_tail(g, s, y, hi) > tol {
        if hi > 1 << 40 {
            return (t, usize::MAX);
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if model_tail(g, s, y, mid) > tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (t, hi)
}

/// Σ c_n e(exponent_n·z) over the stored coefficients.
pub fn sum_qexp(s: &FracQSeries, z: C64) -> C64 {
    let start = e(z * (s.lead as f64 / s.denom as f64));
    let q = e(z * (s.step as f64 / s.denom as f64));
    let mut acc = C64::zero();
    for c in s.coeffs.iter().rev() {
        acc = acc * q + c;
    }
    acc * start
}

/// Truncated evaluation with a tail estimate; fails when the estimate is
/// above `tol` and names the order that would meet it.
pub fn eval_qexp(s: &FracQSeries, z: C64, tol: f64) -> Result<Evaluated> {
    check_point(z)?;
    let (tail, required) = tail_estimate(s, z.im, tol);
    if tail > tol {
        return Err(Error::InsufficientOrder { tail, tol, required });
    }
    Ok(Evaluated { value: sum_qexp(s, z), tail, terms: s.len() })
}

/// F(z) = ∫_{i∞}^z f for a cuspidal series, summed termwise.
pub fn eichler_integral(s: &FracQSeries, z: C64, tol: f64) -> Result<Evaluated> {
    eval_qexp(&s.antiderivative(1)?, z, tol)
}

pub type EvalFn = Arc<dyn Fn(C64) -> Result<C64> + Send + Sync>;

/// A function on H with a declared weight.
#[derive(Clone)]
pub struct Evaluator {
    pub weight: i64,
    pub label: String,
    f: EvalFn,
}

impl std::fmt::Debug for Evaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Evaluator({}, weight {})", self.label, self.weight)
    }
}

impl Evaluator {
    pub fn new<F: Fn(C64) -> Result<C64> + Send + Sync + 'static>(weight: i64, label: &str, f: F) -> Self {
        Evaluator { weight, label: label.into(), f: Arc::new(f) }
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        check_point(z)?;
        (self.f)(z)
    }

    /// f|_k γ.
    pub fn slash(&self, k: i64, g: Mat2) -> Evaluator {
        let inner = self.clone();
        Evaluator::new(self.weight, &format!("{}|{g}", self.label), move |z| {
            Ok(inner.eval(g.act(z))? * slash_factor(g, z, k))
        })
    }
}

/// j(γ, z)^{−k}, via (j²)^{−k/2} so odd powers of j never appear for even k.
pub fn slash_factor(g: Mat2, z: C64, k: i64) -> C64 {
    let j = g.j(z);
    if k % 2 == 0 {
        (j * j).powi(-(k / 2) as i32)
    } else {
        j.powi(-k as i32)
    }
}

/// W_s(mz) = 2(|m|y)^{1/2} K_{s−1/2}(2π|m|y) e(mx).
pub fn whittaker(s: C64, m: i64, z: C64) -> Result<C64> {
    check_point(z)?;
    if m == 0 {
        return Err(Error::InvalidArgument("whittaker needs m != 0".into()));
    }
    let am = m.unsigned_abs() as f64;
    let k = bessel_k(s - 0.5, 2.0 * PI * am * z.im, 16)?;
    Ok(k * (2.0 * (am * z.im).sqrt()) * e(C64::new(m as f64 * z.re, 0.0)))
}

/// y_F(z) = max over cusps of Im(σ_a⁻¹ z).
pub fn y_fundamental(ctx: &GroupContext, z: C64) -> f64 {
    ctx.cusps.iter().map(|c| c.scaling.apply_inverse(z).im).fold(0.0, f64::max)
}

/// Reduce to the standard fundamental domain: returns (g, u) with z = g·u.
pub fn reduce(z: C64) -> (Mat2, C64) {
    let mut g = Mat2::IDENTITY;
    let mut u = z;
    for _ in 0..10_000 {
        let n = u.re.round();
        if n != 0.0 {
            u -= n;
            g = g.mul(&Mat2::t(n as i64));
        }
        if u.norm_sqr() < 1.0 - 1e-14 {
            u = -1.0 / u;
            g = g.mul(&Mat2::S);
        } else {
            break;
        }
    }
    (g, u)
}

/// Cusp form of weight k on SL2(Z) or on Γ₀(N), N prime, with evaluation
/// at any height through modular reduction. Weight 2 forms also carry the
/// Eichler integral and the table Φ(t/N) = ∫_{i∞}^{t/N} f used for symbols.
#[derive(Clone, Debug)]
pub struct ModularForm {
    pub series: FracQSeries,
    pub integral: Option<FracQSeries>,
    pub weight: i64,
    pub level: u64,
    /// Fricke sign ε with f|_k W_N = ε f.
    pub fricke: f64,
    /// Φ(t/N) for t = 0..N (Φ(0) first).
    pub phi: Vec<C64>,
    suffix: Vec<f64>,
    int_suffix: Vec<f64>,
}

fn suffix_max(s: &FracQSeries) -> Vec<f64> {
    let mut v = vec![0.0f64; s.len() + 1];
    for i in (0..s.len()).rev() {
        v[i] = v[i + 1].max(s.coeffs[i].norm());
    }
    v
}

/// Sum with early exit once the remaining terms are below 1e-18 relative.
fn sum_cut(s: &FracQSeries, suffix: &[f64], z: C64) -> C64 {
    let q = e(z * (s.step as f64 / s.denom as f64));
    let r = q.norm();
    let mut qn = e(z * (s.lead as f64 / s.denom as f64));
    let mut acc = C64::zero();
    for (n, c) in s.coeffs.iter().enumerate() {
        acc += c * qn;
        qn *= q;
        let rest = suffix[n + 1] * qn.norm() / (1.0 - r);
        if rest < 1e-18 * acc.norm() || rest < 1e-300 {
            break;
        }
    }
    acc
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|p| p * p <= n).all(|p| n % p != 0)
}

impl ModularForm {
    pub fn new(series: FracQSeries, weight: i64, level: u64) -> Result<Self> {
        if level != 1 && !is_prime(level) {
            return Err(Error::InvalidArgument(format!(
                "modular evaluation supports level 1 or a prime level, got {level}"
            )));
        }
        if series.denom != 1 && series.step % series.denom != 0 {
            return Err(Error::InvalidArgument("modular evaluation needs integral exponents".into()));
        }
        let suffix = suffix_max(&series);
        let (integral, int_suffix) = if weight == 2 {
            let i = series.antiderivative(1)?;
            let s = suffix_max(&i);
            (Some(i), s)
        } else {
            (None, Vec::new())
        };
        let mut mf = ModularForm { series, integral, weight, level, fricke: 1.0, phi: Vec::new(), suffix, int_suffix };
        if level > 1 {
            mf.fricke = mf.measure_fricke()?;
            if weight == 2 {
                mf.phi = mf.phi_table();
            }
        }
        Ok(mf)
    }

    /// q-series value, only sensible at moderate height.
    pub fn series_value(&self, z: C64) -> C64 {
        sum_cut(&self.series, &self.suffix, z)
    }

    fn integral_series_value(&self, z: C64) -> C64 {
        sum_cut(self.integral.as_ref().expect("weight 2"), &self.int_suffix, z)
    }

    /// ε from f(−1/(Nz)) = ε N^{k/2} z^k f(z) at a point of height about 1/√N.
    fn measure_fricke(&self) -> Result<f64> {
        let n = self.level as f64;
        let z = C64::new(0.137, 1.0 / n.sqrt());
        let lhs = self.series_value(-1.0 / (z * n));
        let rhs = self.series_value(z) * z.powi(self.weight as i32) * n.powf(self.weight as f64 / 2.0);
        let eps = lhs / rhs;
        let rounded = eps.re.round();
        if (rounded.abs() - 1.0).abs() > 0.0 || (eps - rounded).norm() > 1e-6 {
            return Err(Error::InvalidArgument(format!(
                "form is not a Fricke eigenform at level {} (ratio {eps})",
                self.level
            )));
        }
        Ok(rounded)
    }

    /// Φ(t/N) for t = 0..N via a Γ₀(N) element with γ(∞) = t/N, each from
    /// the q-series at two points of height 1/N.
    fn phi_table(&self) -> Vec<C64> {
        let n = self.level as i64;
        let nf = n as f64;
        let mut out = Vec::with_capacity(n as usize);
        // Φ(0) = (1 − ε)·F(i/√N): the point is fixed by W_N.
        out.push((1.0 - self.fricke) * self.integral_series_value(C64::new(0.0, 1.0 / nf.sqrt())));
        for t in 1..n {
            // (t, b; N, d) with t·d − b·N = 1
            let (_, x, y) = ext_gcd(t, n);
            let (d, b) = (x, -y);
            let z0 = C64::new(-d as f64, 1.0) / nf;
            let g = Mat2 { a: t, b, c: n, d };
            out.push(self.integral_series_value(g.act(z0)) - self.integral_series_value(z0));
        }
        out
    }

    /// Coset of SL2(Z) modulo Γ₀(N): `None` for Γ₀(N) itself, `Some(t)` for
    /// Γ₀(N)·S·T^t.
    pub fn coset(&self, g: &Mat2) -> Option<i64> {
        let n = self.level as i64;
        if g.c.rem_euclid(n) == 0 {
            return None;
        }
        let (_, inv, _) = ext_gcd(g.c.rem_euclid(n), n);
        Some((g.d * inv).rem_euclid(n))
    }

    /// f at any point of H.
    pub fn eval(&self, z: C64) -> Result<C64> {
        check_point(z)?;
        if z.im >= 0.5 {
            return Ok(self.series_value(z));
        }
        let (g, u) = reduce(z);
        let k = self.weight as i32;
        match self.coset(&g) {
            None => Ok(g.j(u).powi(k) * self.series_value(u)),
            Some(t) => {
                let n = self.level as i64;
                let delta = g.mul(&Mat2::t(-t)).mul(&Mat2::S.inverse());
                let v = u + t as f64;
                let sv = Mat2::S.act(v);
                let nf = n as f64;
                let fsv = v.powi(k) * self.fricke * nf.powf(-(k as f64) / 2.0) * self.series_value(v / nf);
                Ok(delta.j(sv).powi(k) * fsv)
            }
        }
    }

    /// Φ(a/c) = ∫_{i∞}^{a/c} f by continued fractions; weight 2 only.
    pub fn phi_rational(&self, a: i64, c: i64) -> C64 {
        if c == 0 {
            return C64::zero();
        }
        let (mut a, mut c) = (a, c);
        if c < 0 {
            a = -a;
            c = -c;
        }
        let g = a.gcd(&c);
        let (a, c) = (a / g, c / g);
        // convergents p_j/q_j, starting from p_{-1}/q_{-1} = 1/0
        let (mut p_prev, mut q_prev) = (1i64, 0i64);
        let (mut p, mut q) = (a.div_euclid(c), 1i64);
        let (mut num, mut den) = (c, a.rem_euclid(c));
        let mut sum = C64::zero();
        let mut j = 0i64;
        loop {
            let sign = if j % 2 == 0 { -1 } else { 1 };
            let gj = Mat2 { a: p, b: sign * p_prev, c: q, d: sign * q_prev };
            sum += self.manin_increment(&gj);
            if den == 0 {
                break;
            }
            let ai = num.div_euclid(den);
            let r = num.rem_euclid(den);
            num = den;
            den = r;
            let (pn, qn) = (ai * p + p_prev, ai * q + q_prev);
            p_prev = p;
            q_prev = q;
            p = pn;
            q = qn;
            j += 1;
        }
        sum
    }

    /// ∫_{g(0)}^{g(∞)} f, which only depends on the coset of g.
    fn manin_increment(&self, g: &Mat2) -> C64 {
        if self.level == 1 {
            return C64::zero();
        }
        match self.coset(g) {
            None => -self.phi[0],
            Some(t) => -self.fricke * self.phi[t as usize],
        }
    }

    /// ⟨γ, f⟩ = Φ(γ∞) for γ ∈ Γ₀(N).
    pub fn symbol(&self, g: &Mat2) -> C64 {
        self.phi_rational(g.a, g.c)
    }

    /// Eichler integral F(z) = ∫_{i∞}^z f at any point of H; weight 2 only.
    pub fn eichler(&self, z: C64) -> Result<C64> {
        check_point(z)?;
        if self.weight != 2 {
            return Err(Error::InvalidArgument("Eichler integral evaluator needs weight 2".into()));
        }
        if z.im >= 0.5 {
            return Ok(self.integral_series_value(z));
        }
        let (g, u) = reduce(z);
        match self.coset(&g) {
            None => Ok(self.integral_series_value(u) + self.symbol(&g)),
            Some(t) => {
                let delta = g.mul(&Mat2::t(-t)).mul(&Mat2::S.inverse());
                let v = u + t as f64;
                let nf = self.level as f64;
                let fsv = self.phi[0] + self.fricke * self.integral_series_value(v / nf);
                Ok(fsv + self.symbol(&delta))
            }
        }
    }

    pub fn evaluator(self: &Arc<Self>) -> Evaluator {
        let me = self.clone();
        Evaluator::new(self.weight, &self.series.label, move |z| me.eval(z))
    }

    pub fn eichler_evaluator(self: &Arc<Self>) -> Evaluator {
        let me = self.clone();
        Evaluator::new(0, &format!("F[{}]", self.series.label), move |z| me.eichler(z))
    }
}

/// i, used by callers that want a named base point.
pub const BASE_I: C64 = I;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{gamma0_context, sample_elements};
    use crate::numerics::{integrate_doubling, GaussLegendre};
    use crate::qseries::builtin_form;
    use proptest::prelude::*;

    fn delta() -> FracQSeries {
        builtin_form("delta", 200).unwrap().series
    }

    fn f11() -> Arc<ModularForm> {
        Arc::new(ModularForm::new(builtin_form("f11", 400).unwrap().series, 2, 11).unwrap())
    }

    #[test]
    fn delta_at_i() {
        // Independent oracle: q ∏(1 − q^n)^24 as a direct product at q = e^{−2π}.
        let q = (-2.0 * PI).exp();
        let mut p = q;
        for n in 1..200 {
            p *= (1.0 - q.powi(n)).powi(24);
        }
        let v = eval_qexp(&delta(), I, 1e-15).unwrap();
        assert!((v.value.re - p).abs() < 1e-17 && v.value.im.abs() < 1e-17);
        assert!((v.value.re - 0.0017853698).abs() < 1e-10);
    }

    #[test]
    fn periodicity_and_low_height_error() {
        let f = builtin_form("f11", 512).unwrap().series;
        let z = C64::new(0.3, 0.4);
        let a = eval_qexp(&f, z, 1e-12).unwrap().value;
        let b = eval_qexp(&f, z + 1.0, 1e-12).unwrap().value;
        assert!((a - b).norm() < 1e-13);
        let d = builtin_form("delta", 512).unwrap().series;
        match eval_qexp(&d, C64::new(0.0, 1e-6), 1e-10) {
            Err(Error::InsufficientOrder { required, .. }) => assert!(required > 512),
            other => panic!("expected insufficient order, got {other:?}"),
        }
        assert!(matches!(eval_qexp(&d, C64::new(0.0, -1.0), 1e-10), Err(Error::NotInUpperHalfPlane(_))));
    }

    #[test]
    fn tail_estimate_is_sound_on_random_grid() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let full = builtin_form("f11", 1024).unwrap().series;
        let half = full.truncate(512);
        for _ in 0..20 {
            let z = C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.05..1.0));
            let (tail, _) = tail_estimate(&half, z.im, 1.0);
            let diff = (sum_qexp(&full, z) - sum_qexp(&half, z)).norm();
            assert!(diff <= tail.max(1e-15), "z={z} diff={diff} tail={tail}");
        }
    }

    #[test]
    fn eichler_integral_against_quadrature() {
        let d = delta();
        assert!(eichler_integral(&d, C64::new(0.0, 50.0), 1e-30).unwrap().value.norm() < 1e-30);
        let f = eichler_integral(&d, I, 1e-15).unwrap().value;
        // F(i) = ∫_{i∞}^{i} Δ = −∫_i^{50i} Δ − ∫_{50i}^{i∞} Δ, the last piece negligible.
        let quad = integrate_doubling(I, C64::new(0.0, 50.0), 8, 1e-15, 4096, |w| sum_qexp(&d, w)).unwrap();
        assert!((f + quad).norm() < 1e-10, "{f} vs {quad}");
        let f11 = builtin_form("f11", 400).unwrap().series;
        let z = C64::new(0.2, 0.3);
        let a = eichler_integral(&f11, z, 1e-12).unwrap().value;
        let b = eichler_integral(&f11, z + 1.0, 1e-12).unwrap().value;
        assert!((a - b).norm() < 1e-13);
    }

    #[test]
    fn slash_examples() {
        let d = Arc::new(ModularForm::new(delta(), 12, 1).unwrap());
        let ev = d.evaluator();
        let s = ev.slash(12, Mat2::S);
        assert!((s.eval(I).unwrap() - ev.eval(I).unwrap()).norm() < 1e-15);
        let id = ev.slash(12, Mat2::IDENTITY);
        let z = C64::new(0.1, 0.9);
        assert_eq!(id.eval(z).unwrap(), ev.eval(z).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn slash_is_a_right_action(seed in any::<u64>(), x in -1.0f64..1.0, y in 0.2f64..3.0) {
            let ctx = gamma0_context(1).unwrap();
            let base = Evaluator::new(6, "g", |z: C64| Ok((z * z + 3.0).exp() / (z + 2.0 * I)));
            let gs = sample_elements(&ctx, seed, 4, 6);
            let z = C64::new(x, y);
            for w in gs.windows(2) {
                let (g1, g2) = (w[0], w[1]);
                let two = base.slash(6, g1).slash(6, g2).eval(z).unwrap();
                let one = base.slash(6, g1.mul(&g2)).eval(z).unwrap();
                prop_assert!((two - one).norm() <= 1e-10 * one.norm().max(1e-300), "{} vs {}", two, one);
            }
        }
    }

    #[test]
    fn modular_evaluation_matches_series() {
        let d = Arc::new(ModularForm::new(builtin_form("delta", 600).unwrap().series, 12, 1).unwrap());
        let f = f11();
        assert_eq!(f.fricke, -1.0);
        for z in [C64::new(0.11, 0.3), C64::new(-0.37, 0.2), C64::new(0.45, 0.12)] {
            let full = builtin_form("f11", 2000).unwrap().series;
            let direct = sum_qexp(&full, z);
            let m = f.eval(z).unwrap();
            assert!((m - direct).norm() < 1e-10 * direct.norm().max(1.0), "{z}: {m} vs {direct}");
            let fi = eichler_integral(&full, z, 1e-9).unwrap().value;
            let mi = f.eichler(z).unwrap();
            assert!((mi - fi).norm() < 1e-10, "{z}: {mi} vs {fi}");
            let dd = sum_qexp(&builtin_form("delta", 2000).unwrap().series, z);
            assert!((d.eval(z).unwrap() - dd).norm() < 1e-10 * dd.norm().max(1e-12));
        }
    }

    #[test]
    fn modular_symbols_are_homomorphic_and_vanish_on_parabolics() {
        let f = f11();
        let ctx = gamma0_context(11).unwrap();
        let gs = sample_elements(&ctx, 5, 6, 60);
        for w in gs.windows(2) {
            let lhs = f.symbol(&w[0].mul(&w[1]));
            let rhs = f.symbol(&w[0]) + f.symbol(&w[1]);
            assert!((lhs - rhs).norm() < 1e-10);
        }
        assert!(f.symbol(&Mat2::t(1)).norm() < 1e-14);
        assert!(f.symbol(&Mat2 { a: 1, b: 0, c: 11, d: 1 }).norm() < 1e-10);
        // ⟨γ⟩ at one point from the q-series, far from the reduction path.
        let g = Mat2 { a: 4, b: -1, c: 33, d: -8 };
        let z0 = C64::new(8.0, 1.0) / 33.0;
        let full = builtin_form("f11", 1500).unwrap().series.antiderivative(1).unwrap();
        let direct = sum_qexp(&full, g.act(z0)) - sum_qexp(&full, z0);
        assert!((f.symbol(&g) - direct).norm() < 1e-10);
    }

    #[test]
    fn whittaker_closed_form_and_phase() {
        let y = 0.7;
        let w = whittaker(C64::new(1.0, 0.0), 1, C64::new(0.0, y)).unwrap();
        assert!((w - (-2.0 * PI * y).exp()).norm() < 1e-13);
        let s = C64::new(0.5, 2.0);
        let a = whittaker(s, 2, C64::new(0.3, 0.4)).unwrap();
        let b = whittaker(s, 2, C64::new(1.3, 0.4)).unwrap();
        assert!((a.norm() - b.norm()).abs() < 1e-14);
        assert!(whittaker(s, 0, I).is_err());
    }

    #[test]
    fn whittaker_against_series_bessel() {
        // K_ν(x) from the series of I_{±ν}: π/(2 sin νπ)·(I_{−ν} − I_ν).
        fn bessel_i(nu: C64, x: f64) -> C64 {
            let mut sum = C64::zero();
            let half = x / 2.0;
            for k in 0..40 {
                let t = C64::new(half, 0.0).powc(nu + 2.0 * k as f64)
                    / (crate::numerics::factorial(k) * crate::numerics::gamma(nu + k as f64 + 1.0));
                sum += t;
            }
            sum
        }
        let s = C64::new(0.5, 1.0);
        let nu = s - 0.5;
        let x = 2.0 * PI;
        let k = (bessel_i(-nu, x) - bessel_i(nu, x)) * PI / (2.0 * (nu * PI).sin());
        let expect = k * 2.0;
        let w = whittaker(s, 1, I).unwrap();
        assert!((w - expect).norm() < 1e-8 * expect.norm(), "{w} vs {expect}");
    }

    #[test]
    fn fundamental_height() {
        let z = C64::new(0.0, 10.0);
        assert!((y_fundamental(&gamma0_context(1).unwrap(), z) - 10.0).abs() < 1e-12);
        let g11 = gamma0_context(11).unwrap();
        assert!((y_fundamental(&g11, z) - 10.0).abs() < 1e-12);
        assert!((y_fundamental(&g11, z + 3.0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn reduction_lands_in_fundamental_domain() {
        let g = GaussLegendre::new(4);
        for (i, x) in g.nodes.iter().enumerate() {
            let z = C64::new(*x * 3.0, 0.001 * (i + 1) as f64);
            let (m, u) = reduce(z);
            assert!(u.re.abs() <= 0.5 + 1e-12 && u.norm() >= 1.0 - 1e-12);
            assert!((m.act(u) - z).norm() < 1e-12);
        }
    }
}
