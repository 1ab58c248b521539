//! Verification suites: every identity check the library knows about,
//! grouped by area and driven by a [`RunConfig`].
//!
//! Sampled group elements come from [`sample_elements`] with the configured
//! seed, so a failing report can be reproduced from its parameters alone.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64 as C64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::autoseries::{
    direct_sum, eisenstein, index_set, p_classical, p_second, product_form, q_series, tail_estimate, u_series,
    z_series, SeriesKind, SeriesRequest, SumMode,
};
use crate::crossing::{automorphy_samples, crossing_curve, crossing_reports, kz_automorphy_residual, KzForm};
use crate::dims::{bounds_report, cohomology_two_ways, dim_first_order, dim_second_order, SpaceKind};
use crate::error::{Error, Result};
use crate::eval::{sum_qexp, Evaluator, ModularForm};
use crate::group::{
    gamma0_context, is_parabolic, permutation_invariants, sample_elements, theta_word, Mat2,
    PermutationInvariants, ThetaLetter,
};
use crate::numerics::{bessel_k, e, gamma_real, I};
use crate::operators::{
    apply_n, laplacian_residual, ladder_residual, q_via_u_residual, theta_commutation_residual, u_recurrence_residual,
    whittaker_ladder, wirtinger, Direction, OmegaConvention, WeightedFunction,
};
use crate::qseries::builtin_form;
use crate::report::VerificationReport;
use crate::symbols::{
    dphi_identity_residual, modular_symbol, twisted_l_partial, z1_shriek_residual, Base, Hom0Spec, PeriodCochain,
    PeriodPolynomial, SymbolMethod,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Dims,
    Series,
    Symbols,
    Operators,
    Crossing,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [Suite::Dims, Suite::Series, Suite::Symbols, Suite::Operators, Suite::Crossing];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Dims => "dims",
            Suite::Series => "series",
            Suite::Symbols => "symbols",
            Suite::Operators => "operators",
            Suite::Crossing => "crossing",
            Suite::All => "all",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "dims" => Suite::Dims,
            "series" => Suite::Series,
            "symbols" => Suite::Symbols,
            "operators" => Suite::Operators,
            "crossing" => Suite::Crossing,
            "all" => Suite::All,
            _ => return Err(Error::InvalidArgument(format!("unknown suite '{s}'"))),
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "text" => Ok(OutputFormat::Text),
            _ => Err(Error::InvalidArgument(format!("unknown format '{s}'"))),
        }
    }
}

/// Settings shared by every suite.
///
/// `tolerance` maps a suite name to a factor applied to each of that suite's
/// default tolerances. Exact (integer) checks have tolerance 0 and detectors
/// that must fire are never scaled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub q_order: usize,
    pub mode: SumMode,
    pub format: OutputFormat,
    pub tolerance: BTreeMap<String, f64>,
    /// Wall-clock timings in reports. Off gives byte-identical output in repro mode.
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 7,
            q_order: 600,
            mode: SumMode::Repro,
            format: OutputFormat::Json,
            tolerance: BTreeMap::new(),
            timing: true,
        }
    }
}

fn bad_value(key: &str, value: &str) -> Error {
    Error::InvalidArgument(format!("config: bad value '{value}' for '{key}'"))
}

impl RunConfig {
    /// Sets one key. Keys: seed, q_order, mode, format, timing, tol.<suite>.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "seed" => self.seed = v.parse().map_err(|_| bad_value(key, v))?,
            "q_order" => {
                let n: usize = v.parse().map_err(|_| bad_value(key, v))?;
                if n < 100 {
                    return Err(Error::InvalidArgument("config: q_order must be at least 100".into()));
                }
                self.q_order = n;
            }
            "mode" => {
                self.mode = match v {
                    "repro" => SumMode::Repro,
                    "fast" => SumMode::Fast,
                    _ => return Err(bad_value(key, v)),
                }
            }
            "format" => self.format = v.parse().map_err(|_| bad_value(key, v))?,
            "timing" => self.timing = v.parse().map_err(|_| bad_value(key, v))?,
            k if k.starts_with("tol.") => {
                let suite: Suite = k[4..].parse()?;
                let t: f64 = v.parse().map_err(|_| bad_value(key, v))?;
                if !(t > 0.0 && t.is_finite()) {
                    return Err(Error::InvalidArgument(format!("config: tolerance for {} must be positive", suite.name())));
                }
                self.tolerance.insert(suite.name().to_string(), t);
            }
            other => return Err(Error::InvalidArgument(format!("config: unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Reads `key = value` lines on top of the current settings. `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("config line {}: expected key = value", no + 1)))?;
            self.set(k, v.trim().trim_matches('"'))?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        c.apply_text(text)?;
        Ok(c)
    }

    /// Default tolerance `base` scaled for `suite`.
    pub fn tol(&self, suite: Suite, base: f64) -> f64 {
        base * self.tolerance.get(suite.name()).copied().unwrap_or(1.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub reports: Vec<VerificationReport>,
    pub config: RunConfig,
    pub version: String,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> Vec<&VerificationReport> {
        self.reports.iter().filter(|r| !r.pass).collect()
    }
}

// ---------------------------------------------------------------------------
// helpers

fn block<F: FnOnce() -> Result<Vec<VerificationReport>>>(identity: &str, params: &str, f: F) -> Vec<VerificationReport> {
    let t0 = Instant::now();
    let mut out = f().unwrap_or_else(|e| vec![VerificationReport::failed(identity, params.into(), &e)]);
    let ms = t0.elapsed().as_secs_f64() * 1e3;
    for r in &mut out {
        if r.timing_ms == 0.0 {
            r.timing_ms = ms;
        }
    }
    out
}

fn rel(a: C64, b: C64) -> f64 {
    let d = (a - b).norm();
    if d == 0.0 { 0.0 } else { d / b.norm().max(f64::MIN_POSITIVE) }
}

fn form(label: &str, weight: i64, level: u64, order: usize) -> Result<Arc<ModularForm>> {
    Ok(Arc::new(ModularForm::new(builtin_form(label, order)?.series, weight, level)?))
}

fn list<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

// ---------------------------------------------------------------------------
// dimensions

/// First-order dimensions from the classical valence formula, fed by the
/// permutation-action invariants only.
pub fn classical_dims(inv: &PermutationInvariants, k: i64) -> (u64, u64) {
    let (g, p, v2, v3) = (inv.genus as i64, inv.cusps as i64, inv.nu2 as i64, inv.nu3 as i64);
    let (s, m) = match k {
        k if k < 0 => (0, 0),
        0 => (0, 1),
        2 => (g, g + p - 1),
        _ => {
            let m = (k - 1) * (g - 1) + (k / 4) * v2 + (k / 3) * v3 + (k / 2) * p;
            (m - p, m)
        }
    };
    (s.max(0) as u64, m.max(0) as u64)
}

/// Second-order dimensions in closed form from first-order data.
pub fn second_order_formula(g: u64, s: u64, m: u64, k: i64) -> (u64, u64) {
    let s2 = match k {
        k if k <= 0 => 0,
        2 if g == 0 => 0,
        2 => (2 * g + 1) * g - 1,
        _ => (2 * g + 1) * s,
    };
    let m2 = match k {
        k if k < 0 => 0,
        0 => g + 1,
        _ => (2 * g + 1) * m,
    };
    (s2, m2)
}

pub const LEVELS: std::ops::RangeInclusive<u64> = 1..=60;

fn weights() -> impl Iterator<Item = i64> {
    (-4..=24).step_by(2)
}

pub fn dimension_reports() -> Vec<VerificationReport> {
    let params = "N=1..60 k=-4..24";
    block("second-order dimensions", params, || {
        let (mut group_bad, mut first_bad, mut second_bad) = (Vec::new(), Vec::new(), Vec::new());
        for n in LEVELS {
            let ctx = gamma0_context(n)?;
            let inv = permutation_invariants(n);
            let ours = (ctx.index, ctx.genus, ctx.cusp_count, ctx.nu2() as u64, ctx.nu3() as u64);
            if ours != (inv.index, inv.genus, inv.cusps, inv.nu2, inv.nu3) {
                group_bad.push(n);
            }
            for k in weights() {
                let (s, m) = classical_dims(&inv, k);
                if (dim_first_order(&ctx, k, SpaceKind::S)?, dim_first_order(&ctx, k, SpaceKind::M)?) != (s, m) {
                    first_bad.push(format!("N={n} k={k}"));
                }
                let want = second_order_formula(inv.genus, s, m, k);
                let got = (dim_second_order(&ctx, k, SpaceKind::S2)?, dim_second_order(&ctx, k, SpaceKind::M2)?);
                if got != want {
                    second_bad.push(format!("N={n} k={k}"));
                }
            }
        }
        let rep = |name: &str, bad: Vec<String>| {
            let r = VerificationReport::new(name, params.into(), bad.len() as f64, 0.0);
            if bad.is_empty() { r } else { r.with_note(&format!("mismatch at {}", bad.join("; "))) }
        };
        Ok(vec![
            rep("group invariants vs permutation action", group_bad.iter().map(|n| format!("N={n}")).collect()),
            rep("first-order dimensions vs valence formula", first_bad),
            rep("second-order dimensions", second_bad),
        ])
    })
}

pub fn defect_reports() -> Vec<VerificationReport> {
    let params = "N=1..60 k=2";
    block("weight 2 defect", params, || {
        let mut bad = Vec::new();
        for n in LEVELS {
            let ctx = gamma0_context(n)?;
            let g = ctx.genus;
            let s2 = dim_second_order(&ctx, 2, SpaceKind::S2)?;
            let upper = bounds_report(&ctx, 2)?.s2.1;
            let ok = if g == 0 { s2 == 0 } else { s2 == (2 * g + 1) * g - 1 && upper - s2 == 1 };
            if !ok {
                bad.push(n);
            }
        }
        let r = VerificationReport::new("weight 2 defect", params.into(), bad.len() as f64, 0.0);
        Ok(vec![if bad.is_empty() { r } else { r.with_note(&format!("N = {}", list(&bad))) }])
    })
}

pub fn cohomology_reports() -> Vec<VerificationReport> {
    let params = "N=1..60 k=4..24";
    block("cohomology two ways", params, || {
        let mut bad = Vec::new();
        for n in LEVELS {
            let ctx = gamma0_context(n)?;
            let inv = permutation_invariants(n);
            for k in (4..=24).step_by(2) {
                let (s, m) = classical_dims(&inv, k);
                let independent = 2 * inv.genus * (m + s);
                match cohomology_two_ways(&ctx, k) {
                    Ok((v, Some(o))) if v == o && v == independent => {}
                    _ => bad.push(format!("N={n} k={k}")),
                }
            }
        }
        let r = VerificationReport::new("cohomology two ways", params.into(), bad.len() as f64, 0.0);
        Ok(vec![if bad.is_empty() { r } else { r.with_note(&bad.join("; ")) }])
    })
}

// ---------------------------------------------------------------------------
// series

fn zeta(s: f64) -> f64 {
    // Euler–Maclaurin after 2000 terms
    let n = 2000;
    let mut acc = 0.0;
    for k in 1..n {
        acc += (k as f64).powf(-s);
    }
    let nf = n as f64;
    acc + nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s) + s * nf.powf(-s - 1.0) / 12.0
}

fn xi(s: f64) -> f64 {
    PI.powf(-s / 2.0) * gamma_real(s / 2.0) * zeta(s)
}

fn sigma_pow(n: u64, p: f64) -> f64 {
    (1..=n).filter(|d| n % d == 0).map(|d| (d as f64).powf(p)).sum()
}

/// E(z, s) on SL₂(ℤ) from its Fourier expansion with divisor sums, real s.
pub fn fourier_eisenstein(z: C64, s: f64) -> Result<f64> {
    let (x, y) = (z.re, z.im);
    let xs = xi(2.0 * s);
    let mut v = y.powf(s) + xi(2.0 * s - 1.0) / xs * y.powf(1.0 - s);
    for n in 1..40u64 {
        let nf = n as f64;
        let kb = bessel_k(C64::from(s - 0.5), 2.0 * PI * nf * y, 64)?.re;
        v += 4.0 / xs * y.sqrt() * nf.powf(s - 0.5) * sigma_pow(n, 1.0 - 2.0 * s) * kb * (2.0 * PI * nf * x).cos();
    }
    Ok(v)
}

pub fn eisenstein_reports(cfg: &RunConfig) -> Vec<VerificationReport> {
    let tol = cfg.tol(Suite::Series, 1e-6);
    let mut out = Vec::new();
    for &(z, s, c) in &[(C64::new(0.0, 1.0), 2.0, 1000u64), (C64::new(0.3, 1.7), 2.5, 300)] {
        let params = format!("level=1 z={z} s={s} cmax={c}");
        out.extend(block("Eisenstein vs Fourier expansion", &params, || {
            let req = SeriesRequest::new(gamma0_context(1)?, z).s_real(s).c_max(c).mode(cfg.mode);
            let v = eisenstein(&req)?;
            let o = fourier_eisenstein(z, s)?;
            Ok(vec![VerificationReport::new("Eisenstein vs Fourier expansion", params.clone(), (v.value - o).norm(), tol)
                .with_note(&format!("tail estimate {:.2e}", v.tail_estimate))])
        }));
    }
    out
}

pub fn poincare_reports(cfg: &RunConfig) -> Vec<VerificationReport> {
    let tol = |b| cfg.tol(Suite::Series, b);
    let mut out = Vec::new();
    let params = "level=1 k=12 m=1 cmax=60 z=i,0.5+i,2i".to_string();
    out.extend(block("Poincare P12 proportional to Delta", &params, || {
        let ctx = gamma0_context(1)?;
        let delta = builtin_form("delta", 200)?.series;
        let mut ratios = Vec::new();
        for z in [C64::new(0.0, 1.0), C64::new(0.5, 1.0), C64::new(0.0, 2.0)] {
            let p = p_classical(&SeriesRequest::new(ctx.clone(), z).k(12).m(1).c_max(60).mode(cfg.mode))?;
            ratios.push(p.value / sum_qexp(&delta, z));
        }
        let dev = ratios[1..].iter().map(|r| (r - ratios[0]).norm()).fold(0.0, f64::max) / ratios[0].norm();
        Ok(vec![VerificationReport::new("Poincare P12 proportional to Delta", params.clone(), dev, tol(1e-6))
            .with_note(&format!("ratio {}", ratios[0]))])
    }));
    let params = "level=1 k=4 m=1 cmax=300 z=i".to_string();
    out.extend(block("Poincare P4 vanishes", &params, || {
        let p4 = p_classical(&SeriesRequest::new(gamma0_context(1)?, I).k(4).m(1).c_max(300).mode(cfg.mode))?;
        Ok(vec![VerificationReport::new("Poincare P4 vanishes", params.clone(), p4.value.norm(), tol(1e-4))])
    }));
    let params = "level=1 k=12 m=0 y=0.6 samples=32 cmax=40".to_string();
    out.extend(block("E12 coefficient ratio", &params, || {
        let ctx = gamma0_context(1)?;
        let (y, mm) = (0.6, 32);
        let mut a = [C64::zero(); 3];
        for j in 0..mm {
            let x = j as f64 / mm as f64;
            let v = p_classical(&SeriesRequest::new(ctx.clone(), C64::new(x, y)).k(12).m(0).c_max(40).mode(cfg.mode))?.value;
            for (n, an) in a.iter_mut().enumerate() {
                *an += v * e(C64::from(-(n as f64) * x)) / mm as f64;
            }
        }
        let ratio = a[2] * (4.0 * PI * y).exp() / (a[1] * (2.0 * PI * y).exp());
        Ok(vec![VerificationReport::new("E12 coefficient ratio", params.clone(), (ratio - 2049.0).norm() / 2049.0, tol(1e-6))
            .with_note(&format!("a(2)/a(1) = {ratio}"))])
    }));
    out
}

/// Transformation law of the second-order Poincaré series over an explicit
/// finite index set and its translate.
pub fn automorphy_reports(cfg: &RunConfig) -> Vec<VerificationReport> {
    let tol = cfg.tol(Suite::Series, 1e-4);
    let name = "second-order Poincare automorphy";
    let params = format!("level=11 k=4 m=1 L=<.,f11> seed={} set=index_set(60,30)", cfg.seed);
    block(name, &params, || {
        let ctx = gamma0_context(11)?;
        let l = Hom0Spec::symbol_of(form("f11", 2, 11, cfg.q_order)?);
        let req = SeriesRequest::new(ctx.clone(), I).k(4).m(1).with_l(l.clone());
        let set = index_set(&ctx, "inf", 60, 30)?;
        let z = C64::new(0.05, 0.9);
        let mut out = Vec::new();
        for g in sample_elements(&ctx, cfg.seed, 3, 50) {
            let lhs = direct_sum(&req, SeriesKind::P2, 0, &set, g.act(z))? * g.j(z).powi(-4);
            let sg = set.translate(&g);
            let p2 = direct_sum(&req, SeriesKind::P2, 0, &sg, z)?;
            let p1 = direct_sum(&req, SeriesKind::P, 0, &sg, z)?;
            let res = rel(lhs, p2 + l.eval(&g.inverse())? * p1);
            out.push(VerificationReport::new(name, format!("{params} gamma={g} z={z}"), res, tol));
        }
        Ok(out)
    })
}

/// Z, Q and G identities at s = 1.5 on Γ₀(11) with f11.
pub fn zqg_reports(cfg: &RunConfig) -> Vec<VerificationReport> {
    let tol = cfg.tol(Suite::Series, 1e-4);
    let s = C64::new(1.5, 0.0);
    let mut out = Vec::new();
    for m in [0i64, 1] {
        let base = format!("level=11 f=f11 s=1.5 m={m}");
        out.extend(block("Z decomposition", &base, || {
            let f = form("f11", 2, 11, cfg.q_order)?;
            let ctx = gamma0_context(11)?;
            let z = C64::new(0.1, 0.9);
            let req = SeriesRequest::new(ctx.clone(), z).s(s).m(m).c_max(200).with_form(f.clone()).mode(cfg.mode);
            let zp = z_series(&req)?;
            let mut v = vec![VerificationReport::new(
                "Z decomposition",
                format!("{base} z={z} cmax=200"),
                rel(zp.direct.value, zp.decomposed.value),
                tol,
            )];

            let set = index_set(&ctx, "inf", 40, 20)?;
            let pset = format!("{base} set=index_set(40,20)");
            // G evaluates F at each translate, so this does not reuse the symbol table
            let zr = req.clone();
            let zd = direct_sum(&zr, SeriesKind::Z, 0, &set, z)?;
            let gd = direct_sum(&zr, SeriesKind::G, 0, &set, z)?;
            let ud = direct_sum(&zr.clone().s(s + 1.0).k(2), SeriesKind::U, 0, &set, z)?;
            let dec = gd - f.eichler(z)?.conj() / z.im * ud;
            v.push(VerificationReport::new("Z decomposition", format!("{pset} z={z}"), rel(zd, dec), tol));
            // transformation law
            for g in sample_elements(&ctx, cfg.seed, 2, 33) {
                let lhs = direct_sum(&zr, SeriesKind::Z, 0, &set, g.act(z))? * g.j(z).powi(-2);
                let sg = set.translate(&g);
                let zz = direct_sum(&zr, SeriesKind::Z, 0, &sg, z)?;
                let u = direct_sum(&zr.clone().s(s + 1.0).k(2), SeriesKind::U, 0, &sg, z)?;
                let rhs = zz - f.symbol(&g).conj() / z.im * u;
                v.push(VerificationReport::new("Z transformation law", format!("{pset} gamma={g} z={z}"), rel(lhs, rhs), tol));
            }

            // antiholomorphic derivative
            let h = 1e-3 * z.im;
            let zs = {
                let (r, set) = (zr.clone(), set.clone());
                Evaluator::new(0, "Z", move |w| direct_sum(&r, SeriesKind::Z, 0, &set, w))
            };
            let (_, dzbar) = wirtinger(&zs, z, h)?;
            let q = direct_sum(&zr.clone().s(s + 1.0), SeriesKind::Q, 1, &set, z)?;
            let u = direct_sum(&zr.clone().s(s + 1.0).k(0), SeriesKind::U, 0, &set, z)?;
            let want = I * s / (2.0 * z.im * z.im) * (q - f.eichler(z)?.conj() * u);
            v.push(VerificationReport::new("Z antiholomorphic derivative", format!("{pset} z={z} h={h:e}"), rel(dzbar.value, want), tol));

            // G in terms of G(s+1) and the z-derivative of Q(s+1, 1)
            let qs = {
                let (r, set) = (zr.clone().s(s + 1.0), set.clone());
                Evaluator::new(0, "Q", move |w| direct_sum(&r, SeriesKind::Q, 1, &set, w))
            };
            let (dq, _) = wirtinger(&qs, z, h)?;
            let g0 = direct_sum(&zr, SeriesKind::G, 0, &set, z)?;
            let g1 = direct_sum(&zr.clone().s(s + 1.0), SeriesKind::G, 0, &set, z)?;
            let want = 4.0 * PI * m as f64 / (s + 1.0) * g1 + 2.0 * I / (s + 1.0) * dq.value;
            v.push(VerificationReport::new("G recursion via Q derivative", format!("{pset} z={z} h={h:e}"), rel(g0, want), tol));
            Ok(v)
        }));
    }
    out
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Behaviour of U and Q along the cusp at infinity, y from 10 to 1000.
pub fn growth_reports(cfg: &RunConfig) -> Vec<VerificationReport> {
    let ys: Vec<f64> = (0..5).map(|i| 10f64.powf(1.0 + 0.5 * i as f64)).collect();
    let mut out = Vec::new();
    let params = "level=11 m=1 s=1.5 k=2 cmax=100 y=10..1000".to_string();
    out.extend(block("U bounded along the cusp", &params, || {
        let req = SeriesRequest::new(gamma0_context(11)?, I).m(1).s_real(1.5).k(2).c_max(100).mode(cfg.mode);
        let mut vals = Vec::new();
        for &y in &ys {
            vals.push(u_series(&req.at(C64::new(0.0, y)))?.value.norm());
        }
        let growth = vals.iter().fold(0.0, |a: f64, &b| a.max(b)) / vals[0];
        Ok(vec![VerificationReport::new("U bounded along the cusp", params.clone(), growth, 1.0 + 1e-9)
            .with_note(&format!("max |U| relative to |U(10i)|; |U(10i)| = {:.3e}", vals[0]))])
    }));
    for sigma in [2.0, 3.0] {
        let params = format!("level=11 f=f11 m=1 s={sigma} n=1 cmax=100 y=10..1000");
        out.extend(block("Q decay along the cusp", &params, || {
            let f = form("f11", 2, 11, cfg.q_order)?;
            let req = SeriesRequest::new(gamma0_context(11)?, I).m(1).s_real(sigma).c_max(100).with_form(f).mode(cfg.mode);
            let mut ly = Vec::new();
            for &y in &ys {
                ly.push(q_series(&req.at(C64::new(0.0, y)), 1)?.value.norm().ln());
            }
            let lx: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
            let sl = slope(&lx, &ly);
            let bound = 0.5 - sigma / 2.0;
            Ok(vec![
                VerificationReport::new("Q decay along the cusp", params.clone(), (sl - bound).max(0.0), 0.05)
                    .with_note(&format!("log-log slope {sl:.3}, stated exponent {bound:.3}; residual is the excess over the bound")),
                VerificationReport::new("Q decay rate", params.clone(), (sl - (1.0 - sigma)).abs(), 0.15)
                    .with_note(&format!("log-log slope {sl:.3} against 1 - s = {:.3}", 1.0 - sigma)),
            ])
        }));
    }
    out
}

/// The second-order Poincaré series has no Fourier modes n ≤ 0 at infinity.
pub fn cuspidality_reports(cfg: &RunConfig) -> Vec<VerificationReport> {
    let mut out = Vec::new();
    for cusp in ["inf", "0"] {
        let params = format!("level=11 k=4 m=1 L=<.,f11> a={cusp} b=inf y=3 samples=32 cmax=60");
        out.extend(block("second-order Poincare cuspidality", &params, || {
            let l = Hom0Spec::symbol_of(form("f11", 2, 11, cfg.q_order)?);
            let req = SeriesRequest::new(gamma0_context(11)?, I).cusp(cusp).k(4).m(1).c_max(60).with_l(l).mode(cfg.mode);
            let (y, mm) = (3.0, 32);
            let mut a = [C64::zero(); 3];
            let mut tail: f64 = 0.0;
            for j in 0..mm {
                let x = j as f64 / mm as f64;
                let v = p_second(&req.at(C64::new(x, y)))?;
                tail = tail.max(v.tail_estimate);
                for (n, an) in a.iter_mut().enumerate() {
                    *an += v.value * e(C64::from(n as f64 * x)) / mm as f64;
                }
            }
            let worst = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
            Ok(vec![VerificationReport::new("second-order Poincare cuspidality", params.clone(), worst, 10.0 * tail + 1e-12)
                .with_note("largest horocycle coefficient with n = 0, -1, -2")])
        }));
    }
    out
}

/// Independent re-summation: twice the truncation, parallel compensated order.
pub fn resummation_reports(_cfg: &RunConfig) -> Vec<VerificationReport> {
    let params = "level=1 m=1 k=2 s=1.5 z=i cmax=200 vs 400 fast".to_string();
    block("U re-summation", &params, || {
        let req = SeriesRequest::new(gamma0_context(1)?, I).m(1).k(2).s_real(1.5).c_max(200);
        let a = u_series(&req.clone().mode(SumMode::Repro))?;
        let c = u_series(&req.clone().mode(SumMode::Fast))?;
        let b = u_series(&req.c_max(400).mode(SumMode::Fast))?;
        let t = tail_estimate(&gamma0_context(1)?, I, 1.5, 200)?;
        let t2 = tail_estimate(&gamma0_context(1)?, I, 1.5, 400)?;
        Ok(vec![
            VerificationReport::new("U re-summation", params.clone(), (a.value - b.value).norm(), a.tail_estimate + 1e-7)
                .with_note("tolerance is the tail estimate at cmax=200"),
            VerificationReport::new("U summation order", "level=1 m=1 k=2 s=1.5 z=i cmax=200 repro vs fast".into(), rel(a.value, c.value), 1e-12)
                .with_note("a one-thread pool reduces in sequential order"),
            VerificationReport::new("tail estimate decreases", "level=1 z=i s=1.5 cmax=200,400".into(), t2 / t, 1.0 - 1e-12)
                .with_note("ratio of the estimate at cmax=400 to the one at cmax=200"),
        ])
    })
}

// ---------------------------------------------------------------------------
// symbols and periods

pub fn symbol_reports(cfg: &RunConfig) -> Vec<VerificationReport> {
    let tol = cfg.tol(Suite::Symbols, 1e-8);
    let params = format!("level=11 f=f11 seed={} count=10 |c|<=60", cfg.seed);
    block("modular symbol methods agree", &params, || {
        // Height 1/|c| at the base point; 4000 terms cover |c| <= 60.
        let f = form("f11", 2, 11, cfg.q_order.max(4000))?;
        let ctx = gamma0_context(11)?;
        let gs = sample_elements(&ctx, cfg.seed, 10, 60);
        // Products leave the q-series range; quadrature reduces into the domain.
        let sym = |g: &Mat2| modular_symbol(&f, g, SymbolMethod::Quadrature);
        let mut methods: f64 = 0.0;
        let mut manin: f64 = 0.0;
        for g in &gs {
            let q = modular_symbol(&f, g, SymbolMethod::QSeries)?;
            methods = methods.max((q - sym(g)?).norm());
            manin = manin.max((q - modular_symbol(&f, g, SymbolMethod::Manin)?).norm());
        }
        let mut add: f64 = 0.0;
        for w in gs.windows(2) {
            let prod = w[0].mul(&w[1]);
            add = add.max((sym(&prod)? - sym(&w[0])? - sym(&w[1])?).norm());
        }
        let mut par: f64 = 0.0;
        let t = Mat2::t(1);
        let u = Mat2::new(1, 0, 11, 1)?;
        let mut parabolics = vec![t, u];
        for g in gs.iter().take(3) {
            parabolics.push(g.mul(&t).mul(&g.inverse()));
            parabolics.push(g.mul(&u).mul(&g.inverse()));
        }
        for p in &parabolics {
            debug_assert!(is_parabolic(p));
            par = par.max(sym(p)?.norm());
        }
        Ok(vec![
            VerificationReport::new("modular symbol methods agree", params.clone(), methods, tol),
            VerificationReport::new("modular symbol table agrees", params.clone(), manin, tol),
            VerificationReport::new("modular symbol additivity", params.clone(), add, tol),
            VerificationReport::new("modular symbol parabolic vanishing", format!("{params} parabolics={}", parabolics.len()), par, tol),
        ])
    })
}

/// Cocycle relation, the coboundary identity for a product form, and the
/// six-term membership test with a perturbed counterexample.
pub fn period_reports(cfg: &RunConfig) -> Vec<VerificationReport> {
    let tol = |b| cfg.tol(Suite::Symbols, b);
    let params = format!("level=11 k=4 f4=f11sq F=f4*int(f11) seed={}", cfg.seed);
    block("period cocycle relation", &params, || {
        let ctx = gamma0_context(11)?;
        let f4 = form("f11sq", 4, 11, cfg.q_order)?;
        let f11 = form("f11", 2, 11, cfg.q_order)?;
        let gs = sample_elements(&ctx, cfg.seed, 4, 33);
        let phi = PeriodCochain::new(f4.evaluator(), 4, Base::Interior, true);
        let mut cocycle: f64 = 0.0;
        for w in gs.windows(2) {
            let (g, d) = (w[0], w[1]);
            let lhs = phi.get(&d.mul(&g))?;
            let rhs = phi.get(&d)?.slash(&g).add(&phi.get(&g)?);
            cocycle = cocycle.max(lhs.sub(&rhs).max_abs());
        }

        let pf = product_form(&f4.evaluator(), &f11)?;
        let g0 = Mat2::new(4, -1, 33, -8)?;
        let mut dphi: f64 = 0.0;
        for (g, d) in [(g0, g0), (gs[0], gs[1]), (Mat2::t(1), g0)] {
            dphi = dphi.max(dphi_identity_residual(&pf, 4, &g, &d)?.0);
        }

        let small = sample_elements(&ctx, cfg.seed, 3, 22);
        let triples = vec![(small[0], small[1], small[2]), (small[2], small[0], small[1]), (Mat2::t(1), small[0], small[1])];
        let pairs = vec![(small[0], Mat2::t(1)), (small[1], Mat2::new(1, 0, -11, 1)?)];
        let psi = PeriodCochain::new(pf, 4, Base::Interior, false);
        let f = |g: &Mat2| psi.get(g);
        let (six, par) = z1_shriek_residual(&f, &triples, &pairs)?;
        let bumped = |g: &Mat2| -> Result<PeriodPolynomial> {
            let c = g.canonical().c as f64 / 11.0;
            Ok(psi.get(g)?.add(&PeriodPolynomial { k: 4, coeffs: vec![C64::from(0.1 * c * c), C64::zero(), C64::zero()] }))
        };
        let (six_b, _) = z1_shriek_residual(&bumped, &triples, &[])?;
        Ok(vec![
            VerificationReport::new("period cocycle relation", params.clone(), cocycle, tol(1e-5)),
            VerificationReport::new("product form coboundary identity", params.clone(), dphi, tol(1e-5)),
            VerificationReport::new("six-term membership", params.clone(), six, tol(1e-6)),
            VerificationReport::new("parabolic membership", params.clone(), par, tol(1e-6)),
            VerificationReport::expect_above("six-term membership detects a perturbed cochain", params.clone(), six_b, 1e-2),
        ])
    })
}

pub fn twisted_l_reports(_cfg: &RunConfig) -> Vec<VerificationReport> {
    let params = "f=delta k=12 s=7.5 N=10000,20000".to_string();
    block("twisted L partial sums", &params, || {
        let d = builtin_form("delta", 20_001)?.series;
        let s = C64::new(7.5, 0.0);
        let a = twisted_l_partial(&d, 12, 0.0, s, 10_000)?;
        let b = twisted_l_partial(&d, 12, 0.0, s, 20_000)?;
        let one = twisted_l_partial(&d, 12, 1.0, s, 10_000)?;
        let uncert = twisted_l_partial(&d, 12, 0.0, C64::new(6.5, 0.0), 100)?;
        Ok(vec![
            VerificationReport::new("twisted L partial sums", params.clone(), (a.value - b.value).norm(), a.tail_bound)
                .with_note(if a.certified { "certified" } else { "not certified" }),
            VerificationReport::new("twisted L integer twist", params.clone(), (one.value - a.value).norm(), 1e-12),
            VerificationReport::new(
                "twisted L certification threshold",
                "f=delta k=12 s=6.5".into(),
                if uncert.certified { 1.0 } else { 0.0 },
                0.0,
            ),
        ])
    })
}

// ---------------------------------------------------------------------------
// operators

pub fn operator_reports(cfg: &RunConfig) -> Vec<VerificationReport> {
    let tol = |b| cfg.tol(Suite::Operators, b);
    let mut out = Vec::new();
    let z = C64::new(0.1, 1.1);
    let s = C64::new(1.3, 0.0);
    out.extend(block("laplacian factorisation", "psi=y^s", || {
        let ys = WeightedFunction::y_power(s, 0)?;
        let mut v = laplacian_residual(&ys, z, Some(s * (1.0 - s)), tol(1e-6));
        for s in [C64::new(1.3, 0.0), C64::new(0.5, 2.0)] {
            v.extend(laplacian_residual(&WeightedFunction::whittaker(s, 1)?, z, Some(s * (1.0 - s)), tol(1e-5)));
        }
        Ok(v)
    }));

    let zl = C64::new(0.2, 1.0);
    for &(s, m) in &[(C64::new(1.3, 0.0), 1), (C64::new(0.5, 2.0), -2)] {
        for n in 0..=3 {
            for dir in [Direction::Raise, Direction::Lower] {
                out.push(ladder_residual(OmegaConvention::Rescaled, n, dir, s, m, zl, tol(1e-5)));
                if n > 0 {
                    let p = ladder_residual(OmegaConvention::Printed, n, dir, s, m, zl, 1e-5);
                    out.push(VerificationReport::expect_above(
                        "printed omega detector",
                        p.parameters,
                        p.residual,
                        1e-5,
                    ));
                }
            }
        }
    }
    out.extend(block("printed omega ratio", "s=1.7 m=1 z=-0.1+0.7i", || {
        let z = C64::new(-0.1, 0.7);
        let s = C64::new(1.7, 0.0);
        let w = WeightedFunction::whittaker(s, 1)?;
        let mut v = Vec::new();
        for n in 1..=3u32 {
            let num = apply_n(&w, Direction::Raise, n as usize, 1.5e-2).eval(z)?;
            let printed = whittaker_ladder(n, Direction::Raise, s, 1, z)?;
            let q = printed / num / 4f64.powi(n as i32);
            v.push(
                VerificationReport::new("printed omega ratio", format!("n={n} s=1.7 m=1 z={z}"), (q - 1.0).norm(), tol(1e-6))
                    .with_note("printed expansion divided by finite differences, over 4^n"),
            );
        }
        Ok(v)
    }));
    out.extend(block("y power ladder", "s=1.3+0.4i", || {
        let z = C64::new(-0.4, 0.9);
        let s = C64::new(1.3, 0.4);
        let mut v = Vec::new();
        for n in 0..4u32 {
            for dir in [Direction::Raise, Direction::Lower] {
                let num = apply_n(&WeightedFunction::y_power(s, 0)?, dir, n as usize, 1e-2).eval(z)?;
                let exact = whittaker_ladder(n, dir, s, 0, z)?;
                v.push(VerificationReport::new("y power ladder", format!("n={n} dir={dir:?} s={s} z={z}"), rel(num, exact), tol(1e-7)));
            }
        }
        Ok(v)
    }));

    out.extend(block("U recurrences", "level=1", || {
        let ctx = gamma0_context(1)?;
        let mut v = Vec::new();
        for &(m, k) in &[(0, 0), (1, 0), (1, 2), (0, 2)] {
            let req = SeriesRequest::new(ctx.clone(), I).m(m).s_real(1.5).k(k).c_max(60).mode(cfg.mode);
            v.extend(u_recurrence_residual(&req, tol(1e-4)));
        }
        Ok(v)
    }));

    out.extend(block("theta commutation", "", || {
        let z = C64::new(0.15, 0.8);
        let w = WeightedFunction::whittaker(C64::new(1.3, 0.0), 1)?;
        let mut v = theta_commutation_residual(&Mat2::IDENTITY, &w, z, 0.0);
        v.extend(theta_commutation_residual(&Mat2::S, &w, z, tol(1e-5)));
        // a parabolic conjugate of a translation, drawn from the seed
        let g = sample_elements(&gamma0_context(1)?, cfg.seed, 1, 6)[0];
        let par = g.mul(&Mat2::t(1 + (cfg.seed % 3) as i64)).mul(&g.inverse());
        let ys = WeightedFunction::y_power(C64::new(1.5, 0.0), 4)?;
        v.extend(theta_commutation_residual(&par, &ys, z, tol(1e-6)));
        Ok(v)
    }));

    out.extend(block("Q via U reduction", "level=11 f=f11", || {
        let ctx = gamma0_context(11)?;
        let f = form("f11", 2, 11, cfg.q_order)?;
        let z = C64::new(0.12, 0.35);
        let set = index_set(&ctx, "inf", 40, 12)?;
        let mut v = Vec::new();
        for n in 0..=2usize {
            for m in [0, 1] {
                let s = C64::new(3.5 + n as f64, 0.0);
                v.push(q_via_u_residual(&ctx, &f, m, n, s, z, &set, tol(1e-4)));
            }
        }
        Ok(v)
    }));
    out
}

// ---------------------------------------------------------------------------
// crossing

pub fn theta_samples() -> Result<Vec<(&'static str, Mat2)>> {
    use ThetaLetter::*;
    Ok(vec![("T^2", theta_word(&[T2])?), ("S", theta_word(&[S])?), ("S T^2 S", theta_word(&[S, T2, S])?)])
}

pub fn kz_reports(cfg: &RunConfig) -> Vec<VerificationReport> {
    let tol = |b| cfg.tol(Suite::Crossing, b);
    block("K automorphy", "", || {
        let form = KzForm::new(crate::crossing::DEFAULT_KZ_ORDER)?;
        let mut v = Vec::new();
        for (name, g) in theta_samples()? {
            let mut r = kz_automorphy_residual(&form, &g, &automorphy_samples(&g, 8), tol(1e-5));
            r.parameters = format!("{name} {}", r.parameters);
            v.push(r);
        }
        let curve = crossing_curve(&form, 0.5, 2.0, 31)?;
        v.extend(crossing_reports(&curve, tol(1e-4)));
        Ok(v)
    })
}

// ---------------------------------------------------------------------------
// assembly

/// Acceptance criteria 1 to 11 in order, with their runtime limits in seconds.
pub const CRITERIA: [(u8, &str, Option<f64>); 11] = [
    (1, "dimension reproduction", Some(10.0)),
    (2, "weight 2 defect", None),
    (3, "cohomology count", None),
    (4, "Eisenstein cross-check", Some(5.0)),
    (5, "Poincare sanity", Some(10.0)),
    (6, "second-order automorphy", Some(60.0)),
    (7, "modular symbol equivalence", None),
    (8, "period machinery", None),
    (9, "operator suite", Some(60.0)),
    (10, "Z, Q and G identities", None),
    (11, "crossing probability", Some(30.0)),
];

pub fn criterion_reports(n: u8, cfg: &RunConfig) -> Result<Vec<VerificationReport>> {
    Ok(match n {
        1 => dimension_reports(),
        2 => defect_reports(),
        3 => cohomology_reports(),
        4 => eisenstein_reports(cfg),
        5 => poincare_reports(cfg),
        6 => automorphy_reports(cfg),
        7 => symbol_reports(cfg),
        8 => period_reports(cfg),
        9 => operator_reports(cfg),
        10 => zqg_reports(cfg),
        11 => kz_reports(cfg),
        _ => return Err(Error::InvalidArgument(format!("no criterion {n}"))),
    })
}

/// Identities each suite must report; a missing one is itself a failure.
pub fn required_identities(suite: Suite) -> &'static [&'static str] {
    match suite {
        Suite::Dims => &[
            "group invariants vs permutation action",
            "first-order dimensions vs valence formula",
            "second-order dimensions",
            "weight 2 defect",
            "cohomology two ways",
        ],
        Suite::Series => &[
            "Eisenstein vs Fourier expansion",
            "Poincare P12 proportional to Delta",
            "Poincare P4 vanishes",
            "E12 coefficient ratio",
            "second-order Poincare automorphy",
            "second-order Poincare cuspidality",
            "Z decomposition",
            "Z transformation law",
            "Z antiholomorphic derivative",
            "G recursion via Q derivative",
            "U bounded along the cusp",
            "Q decay along the cusp",
            "U re-summation",
            "U summation order",
        ],
        Suite::Symbols => &[
            "modular symbol methods agree",
            "modular symbol additivity",
            "modular symbol parabolic vanishing",
            "period cocycle relation",
            "product form coboundary identity",
            "six-term membership",
            "six-term membership detects a perturbed cochain",
            "twisted L partial sums",
        ],
        Suite::Operators => &[
            "laplacian as -L2 R0",
            "laplacian as -R-2 L0",
            "raising ladder",
            "lowering ladder",
            "printed omega detector",
            "U raising recurrence",
            "U lowering recurrence",
            "theta commutes with L",
            "theta commutes with R",
            "Q via U reduction",
        ],
        Suite::Crossing => &["K automorphy", "crossing Cardy curve", "crossing anchor P(1) = 1/2"],
        Suite::All => &[],
    }
}

fn suite_reports(suite: Suite, cfg: &RunConfig) -> Vec<VerificationReport> {
    match suite {
        Suite::Dims => [dimension_reports(), defect_reports(), cohomology_reports()].concat(),
        Suite::Series => [
            eisenstein_reports(cfg),
            poincare_reports(cfg),
            automorphy_reports(cfg),
            cuspidality_reports(cfg),
            zqg_reports(cfg),
            growth_reports(cfg),
            resummation_reports(cfg),
        ]
        .concat(),
        Suite::Symbols => [symbol_reports(cfg), period_reports(cfg), twisted_l_reports(cfg)].concat(),
        Suite::Operators => operator_reports(cfg),
        Suite::Crossing => kz_reports(cfg),
        Suite::All => Suite::EACH.iter().flat_map(|&s| suite_reports(s, cfg)).collect(),
    }
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> SuiteReport {
    let mut reports = suite_reports(suite, cfg);
    let wanted: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    for s in wanted {
        for id in required_identities(s) {
            if !reports.iter().any(|r| r.identity == *id) {
                let mut r = VerificationReport::new(id, format!("suite={}", s.name()), f64::INFINITY, 0.0);
                r.note = "identity missing from suite".into();
                reports.push(r);
            }
        }
    }
    if !cfg.timing {
        for r in &mut reports {
            r.timing_ms = 0.0;
        }
    }
    reports.sort_by(|a, b| a.identity.cmp(&b.identity).then_with(|| a.parameters.cmp(&b.parameters)));
    SuiteReport { suite: suite.name().into(), reports, config: cfg.clone(), version: env!("CARGO_PKG_VERSION").into() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(reports: &[VerificationReport]) {
        for r in reports {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn config_parsing() {
        let c = RunConfig::parse("# comment\nseed = 11\nmode = fast\ntol.series = 2.5\nformat=csv\n").unwrap();
        assert_eq!((c.seed, c.mode, c.format), (11, SumMode::Fast, OutputFormat::Csv));
        assert_eq!(c.tol(Suite::Series, 1e-4), 2.5e-4);
        assert_eq!(c.tol(Suite::Dims, 1.0), 1.0);
        assert!(RunConfig::parse("tol.series = 0").is_err());
        assert!(RunConfig::parse("tol.series = -1").is_err());
        assert!(RunConfig::parse("colour = red").is_err());
        assert!(RunConfig::parse("seed").is_err());
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn classical_oracle_values() {
        // N = 11: g = 1, two cusps, no elliptic points
        let inv = permutation_invariants(11);
        assert_eq!(classical_dims(&inv, 4), (2, 4));
        assert_eq!(second_order_formula(1, 2, 4, 4), (6, 12));
        assert_eq!(second_order_formula(1, 1, 2, 2).0, 2);
        // level 1 has S_12 = 1, M_12 = 2
        assert_eq!(classical_dims(&permutation_invariants(1), 12), (1, 2));
    }

    #[test]
    fn dims_suite() {
        let r = run_suite(Suite::Dims, &RunConfig::default());
        check(&r.reports);
        assert_eq!(r.reports.len(), 5);
    }

    #[test]
    fn fourier_oracle_self_consistent() {
        // the expansion is even in x and periodic
        let a = fourier_eisenstein(C64::new(0.2, 1.3), 2.0).unwrap();
        let b = fourier_eisenstein(C64::new(-0.2, 1.3), 2.0).unwrap();
        let c = fourier_eisenstein(C64::new(1.2, 1.3), 2.0).unwrap();
        assert!((a - b).abs() < 1e-12 && (a - c).abs() < 1e-12);
        // invariance under S at a point off the unit circle
        let z = C64::new(0.1, 1.2);
        let w = -z.inv();
        let d = fourier_eisenstein(w, 2.0).unwrap();
        let f = fourier_eisenstein(z, 2.0).unwrap();
        assert!((d - f).abs() < 1e-8, "{d} vs {f}");
    }

    #[test]
    fn series_criteria() {
        let cfg = RunConfig::default();
        check(&eisenstein_reports(&cfg));
        check(&poincare_reports(&cfg));
        check(&resummation_reports(&cfg));
    }

    #[test]
    fn growth_and_cuspidality() {
        let cfg = RunConfig::default();
        check(&growth_reports(&cfg));
        check(&cuspidality_reports(&cfg));
    }

    #[test]
    fn periods() {
        check(&period_reports(&RunConfig::default()));
    }

    #[test]
    fn zqg() {
        check(&zqg_reports(&RunConfig::default()));
    }

    #[test]
    fn sorting_and_missing_identities() {
        let mut cfg = RunConfig::default();
        cfg.timing = false;
        let r = run_suite(Suite::Dims, &cfg);
        let ids: Vec<&str> = r.reports.iter().map(|r| r.identity.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
        assert!(r.reports.iter().all(|r| r.timing_ms == 0.0));
        assert_eq!(serde_json::to_string(&r).unwrap(), serde_json::to_string(&run_suite(Suite::Dims, &cfg)).unwrap());
    }
}
