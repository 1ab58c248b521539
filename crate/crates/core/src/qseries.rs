//! Truncated q-expansions with fractional exponents.
//!
//! A series stores coefficient `n` at exponent `(lead + n*step)/denom`, so
//! sparse lattices such as `1/3 + n/2` keep no padding zeros. Eta quotients
//! are generated exactly (i128 with a BigInt fallback) and then converted.

use std::f64::consts::PI;
use std::path::Path;

use num_bigint::BigInt;
use num_complex::Complex64 as C64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_ORDER: usize = 512;

#[derive(Clone, Debug, PartialEq)]
pub struct FracQSeries {
    pub denom: u64,
    pub lead: i64,
    pub step: u64,
    pub coeffs: Vec<C64>,
    /// Integer coefficients when the series came out of exact arithmetic.
    pub exact: Option<Vec<BigInt>>,
    pub weight: Rational64,
    pub level: u64,
    pub label: String,
}

impl FracQSeries {
    pub fn new(denom: u64, lead: i64, step: u64, coeffs: Vec<C64>) -> Result<Self> {
        if denom == 0 || step == 0 {
            return Err(Error::InvalidArgument("exponent denominator and step must be positive".into()));
        }
        Ok(FracQSeries {
            denom,
            lead,
            step,
            coeffs,
            exact: None,
            weight: Rational64::zero(),
            level: 1,
            label: String::new(),
        })
    }

    pub fn with_meta(mut self, weight: Rational64, level: u64, label: &str) -> Self {
        self.weight = weight;
        self.level = level;
        self.label = label.to_string();
        self
    }

    /// The constant series 1.
    pub fn one(order: usize) -> Self {
        let mut c = vec![C64::zero(); order.max(1)];
        c[0] = C64::one();
        FracQSeries::new(1, 0, 1, c).unwrap()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn exponent_rational(&self, n: usize) -> Rational64 {
        Rational64::new(self.lead + n as i64 * self.step as i64, self.denom as i64)
    }

    pub fn exponent(&self, n: usize) -> f64 {
        (self.lead as f64 + n as f64 * self.step as f64) / self.denom as f64
    }

    pub fn leading_exponent(&self) -> Rational64 {
        self.exponent_rational(0)
    }

    /// First exponent not covered by the stored coefficients.
    pub fn valid_until(&self) -> Rational64 {
        self.exponent_rational(self.len())
    }

    pub fn truncate(&self, n: usize) -> Self {
        let mut out = self.clone();
        out.coeffs.truncate(n);
        if let Some(e) = out.exact.as_mut() {
            e.truncate(n);
        }
        out
    }

    /// Re-express on the finer grid `(lead' + n*step')/denom'`; `denom'` must
    /// be a multiple of `denom` and `step'` must divide the old step there.
    pub fn regrid(&self, denom: u64, step: u64) -> Result<Self> {
        if denom % self.denom != 0 {
            return Err(Error::InvalidArgument(format!("cannot regrid 1/{} to 1/{denom}", self.denom)));
        }
        let f = denom / self.denom;
        let old = self.step * f;
        if old % step != 0 {
            return Err(Error::InvalidArgument(format!("step {step} does not divide {old}")));
        }
        let r = (old / step) as usize;
        let len = if self.is_empty() { 0 } else { (self.len() - 1) * r + 1 };
        let mut coeffs = vec![C64::zero(); len];
        for (n, c) in self.coeffs.iter().enumerate() {
            coeffs[n * r] = *c;
        }
        let exact = self.exact.as_ref().map(|e| {
            let mut v = vec![BigInt::zero(); len];
            for (n, c) in e.iter().enumerate() {
                v[n * r] = c.clone();
            }
            v
        });
        Ok(FracQSeries { denom, lead: self.lead * f as i64, step, coeffs, exact, ..self.clone() })
    }

    /// Copy with `step = 1`, the layout of the file schema.
    pub fn dense(&self) -> Self {
        self.regrid(self.denom, 1).expect("step 1 always divides")
    }

    fn common_grid(&self, other: &Self) -> (u64, u64) {
        let d = self.denom.lcm(&other.denom);
        let sa = self.step * (d / self.denom);
        let sb = other.step * (d / other.denom);
        let la = self.lead * (d / self.denom) as i64;
        let lb = other.lead * (d / other.denom) as i64;
        let s = sa.gcd(&sb).gcd(&(la - lb).unsigned_abs());
        (d, s.max(1))
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|x| *x *= c);
        out.exact = None;
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|x| *x = x.conj());
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let (d, s) = self.common_grid(other);
        let a = self.regrid(d, s).unwrap();
        let b = other.regrid(d, s).unwrap();
        let (lo, hi) = if a.lead <= b.lead { (a, b) } else { (b, a) };
        let off = ((hi.lead - lo.lead) / s as i64) as usize;
        let len = lo.len().min(off + hi.len());
        let mut coeffs = lo.coeffs[..len.min(lo.len())].to_vec();
        for (n, c) in hi.coeffs.iter().enumerate() {
            if off + n < len {
                coeffs[off + n] += c;
            }
        }
        let exact = match (&lo.exact, &hi.exact) {
            (Some(x), Some(y)) => {
                let mut v = x[..len].to_vec();
                for (n, c) in y.iter().enumerate() {
                    if off + n < len {
                        v[off + n] += c;
                    }
                }
                Some(v)
            }
            _ => None,
        };
        FracQSeries { denom: d, lead: lo.lead, step: s, coeffs, exact, ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut neg = other.scale(-C64::one());
        neg.exact = other.exact.as_ref().map(|e| e.iter().map(|c| -c).collect());
        self.add(&neg)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (d, s) = self.common_grid(other);
        let a = self.regrid(d, s).unwrap();
        let b = other.regrid(d, s).unwrap();
        let len = a.len().min(b.len());
        let mut coeffs = vec![C64::zero(); len];
        for (i, x) in a.coeffs.iter().enumerate().take(len) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate().take(len - i) {
                coeffs[i + j] += x * y;
            }
        }
        let exact = match (&a.exact, &b.exact) {
            (Some(x), Some(y)) => Some(mul_big(&x[..len], &y[..len], len)),
            _ => None,
        };
        FracQSeries {
            denom: d,
            lead: a.lead + b.lead,
            step: s,
            coeffs,
            exact,
            weight: self.weight + other.weight,
            level: self.level.lcm(&other.level),
            label: format!("({})*({})", self.label, other.label),
        }
    }

    /// Integer power; negative exponents invert. Uses the power recurrence
    /// n f_n = Σ_j ((e+1) j − n) g_j f_{n−j} on the normalised series.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let c0 = *self.coeffs.first().ok_or(Error::ZeroSeries)?;
        if c0.is_zero() {
            return Err(Error::ZeroSeries);
        }
        let g: Vec<C64> = self.coeffs.iter().map(|c| c / c0).collect();
        let n_max = g.len();
        let mut f = vec![C64::zero(); n_max];
        f[0] = C64::one();
        for n in 1..n_max {
            let mut acc = C64::zero();
            for j in 1..=n {
                if !g[j].is_zero() {
                    acc += g[j] * f[n - j] * (((e + 1) * j as i64 - n as i64) as f64);
                }
            }
            f[n] = acc / n as f64;
        }
        let scale = c0.powi(e as i32);
        f.iter_mut().for_each(|x| *x *= scale);
        Ok(FracQSeries {
            denom: self.denom,
            lead: self.lead * e,
            step: self.step,
            coeffs: f,
            exact: None,
            weight: self.weight * e,
            level: self.level,
            label: format!("({})^{e}", self.label),
        })
    }

    pub fn invert(&self) -> Result<Self> {
        self.pow(-1)
    }

    /// d/dz with q = e(z): coefficient times 2πi·exponent.
    pub fn derive(&self) -> Self {
        self.antiderivative(-1).expect("derivatives never fail")
    }

    /// n-th antiderivative (n ≥ 1), identity (n = 0) or |n|-th derivative.
    pub fn antiderivative(&self, n: i64) -> Result<Self> {
        let mut out = self.clone();
        if n == 0 {
            return Ok(out);
        }
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let ex = self.exponent(i);
            if n > 0 && ex <= 0.0 && !c.is_zero() {
                return Err(Error::NotCuspidal);
            }
            if ex == 0.0 {
                *c = C64::zero();
                continue;
            }
            *c *= (C64::new(0.0, 2.0 * PI * ex)).powi(-n as i32);
        }
        out.exact = None;
        out.weight = self.weight - Rational64::from_integer(2 * n);
        out.label = format!("I_{n}({})", self.label);
        Ok(out)
    }
}

fn mul_big(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            v[i + j] += x * y;
        }
    }
    v
}

/// Pentagonal coefficients of ∏(1 − y^n) up to y^{len−1}, as (index, ±1).
fn pentagonal(len: usize) -> Vec<(usize, i64)> {
    let mut out = vec![(0usize, 1i64)];
    let mut k = 1i64;
    loop {
        let mut any = false;
        let sign = if k % 2 == 0 { 1 } else { -1 };
        for p in [k * (3 * k - 1) / 2, k * (3 * k + 1) / 2] {
            if (p as usize) < len {
                out.push((p as usize, sign));
                any = true;
            }
        }
        if !any {
            break;
        }
        k += 1;
    }
    out.sort_unstable();
    out
}

/// ∏(1 − y^n)^e to `len` terms, in i128; `None` on overflow.
fn eta_power_i128(e: i64, len: usize) -> Option<Vec<i128>> {
    let g = pentagonal(len);
    let mut f = vec![0i128; len];
    f[0] = 1;
    for n in 1..len {
        let mut acc: i128 = 0;
        for &(j, gj) in g.iter().skip(1) {
            if j > n {
                break;
            }
            let w = ((e + 1) as i128).checked_mul(j as i128)?.checked_sub(n as i128)?;
            let t = w.checked_mul(gj as i128)?.checked_mul(f[n - j])?;
            acc = acc.checked_add(t)?;
        }
        f[n] = acc / n as i128;
    }
    Some(f)
}

fn eta_power_big(e: i64, len: usize) -> Vec<BigInt> {
    let g = pentagonal(len);
    let mut f = vec![BigInt::zero(); len];
    f[0] = BigInt::one();
    for n in 1..len {
        let mut acc = BigInt::zero();
        for &(j, gj) in g.iter().skip(1) {
            if j > n {
                break;
            }
            let w = ((e + 1) * j as i64 - n as i64) * gj;
            acc += &f[n - j] * w;
        }
        f[n] = acc / n as i64;
    }
    f
}

fn spread_mul_i128(acc: &[i128], f: &[i128], u: usize) -> Option<Vec<i128>> {
    let len = acc.len();
    let mut out = vec![0i128; len];
    for (i, &a) in acc.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (m, &b) in f.iter().enumerate() {
            let idx = i + m * u;
            if idx >= len {
                break;
            }
            out[idx] = out[idx].checked_add(a.checked_mul(b)?)?;
        }
    }
    Some(out)
}

fn spread_mul_big(acc: &[BigInt], f: &[BigInt], u: usize) -> Vec<BigInt> {
    let len = acc.len();
    let mut out = vec![BigInt::zero(); len];
    for (i, a) in acc.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (m, b) in f.iter().enumerate() {
            let idx = i + m * u;
            if idx >= len {
                break;
            }
            out[idx] += a * b;
        }
    }
    out
}

/// q^{t/24}·∏(1 − q^{tn}) to `order` coefficients.
pub fn eta_qexp(t: Rational64, order: usize) -> Result<FracQSeries> {
    eta_quotient(&[(t, 1)], order)
}

/// ∏ η(t_i z)^{e_i} to `order` coefficients on the lattice generated by the t_i.
pub fn eta_quotient(factors: &[(Rational64, i64)], order: usize) -> Result<FracQSeries> {
    if order == 0 {
        return Err(Error::InvalidArgument("order must be at least 1".into()));
    }
    if factors.is_empty() {
        return Err(Error::InvalidArgument("eta quotient needs at least one factor".into()));
    }
    for (t, _) in factors {
        if *t <= Rational64::zero() {
            return Err(Error::InvalidArgument(format!("eta scale must be positive, got {t}")));
        }
    }
    // Common denominator for all exponents: 24 times the lcm of scale denominators.
    let den_lcm = factors.iter().fold(1i64, |acc, (t, _)| acc.lcm(t.denom()));
    let d = 24 * den_lcm;
    let ints: Vec<(i64, i64)> = factors.iter().map(|(t, e)| ((t * 24 * den_lcm).to_integer(), *e)).collect();
    let step = ints.iter().fold(0i64, |acc, (u, e)| if *e != 0 { acc.gcd(u) } else { acc }).max(1);
    let lead: i64 = ints.iter().map(|(u, e)| u * e).sum::<i64>() / 24;
    let weight = Rational64::new(factors.iter().map(|(_, e)| e).sum::<i64>(), 2);

    let exact = match eta_product_i128(&ints, step, d, order) {
        Some(v) => v.into_iter().map(BigInt::from).collect(),
        None => eta_product_big(&ints, step, d, order),
    };
    let coeffs = exact.iter().map(|c| C64::new(c.to_f64().unwrap_or(f64::INFINITY), 0.0)).collect();
    // Reduce the grid: divide denom, lead, step by their common gcd.
    let g = (d as u64).gcd(&(step as u64)).gcd(&lead.unsigned_abs());
    let level = factors
        .iter()
        .filter(|(_, e)| *e != 0)
        .fold(1i64, |acc, (t, _)| acc.lcm(t.numer()).lcm(t.denom())) as u64;
    let label = factors.iter().map(|(t, e)| format!("eta({t}z)^{e}")).collect::<Vec<_>>().join("*");
    Ok(FracQSeries {
        denom: d as u64 / g,
        lead: lead / g as i64,
        step: step as u64 / g,
        coeffs,
        exact: Some(exact),
        weight,
        level,
        label,
    })
}

// Each factor P(x^{u_i/step})^{e_i}; the fractional prefactor lives in `lead`.
fn eta_product_i128(ints: &[(i64, i64)], step: i64, _d: i64, order: usize) -> Option<Vec<i128>> {
    let mut acc = vec![0i128; order];
    acc[0] = 1;
    for &(u, e) in ints {
        if e == 0 {
            continue;
        }
        let r = (u / step) as usize;
        let f = eta_power_i128(e, order.div_ceil(r))?;
        acc = spread_mul_i128(&acc, &f, r)?;
    }
    Some(acc)
}

fn eta_product_big(ints: &[(i64, i64)], step: i64, _d: i64, order: usize) -> Vec<BigInt> {
    let mut acc = vec![BigInt::zero(); order];
    acc[0] = BigInt::one();
    for &(u, e) in ints {
        if e == 0 {
            continue;
        }
        let r = (u / step) as usize;
        let f = eta_power_big(e, order.div_ceil(r));
        acc = spread_mul_big(&acc, &f, r);
    }
    acc
}

#[derive(Clone, Debug, PartialEq)]
pub struct FormLibraryEntry {
    pub label: String,
    pub series: FracQSeries,
    pub provenance: String,
    /// Eta-quotient recipe, when the form is one.
    pub eta_factors: Option<Vec<(Rational64, i64)>>,
}

pub const BUILTIN_LABELS: [&str; 5] = ["delta", "f11", "f11sq", "kz", "eta"];

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

pub fn builtin_recipe(label: &str) -> Result<(Vec<(Rational64, i64)>, u64, &'static str)> {
    Ok(match label {
        "delta" => (vec![(r(1, 1), 24)], 1, "eta(z)^24, weight 12 on SL2(Z)"),
        "f11" => (vec![(r(1, 1), 2), (r(11, 1), 2)], 11, "eta(z)^2 eta(11z)^2, weight 2 on Gamma0(11)"),
        "f11sq" => (vec![(r(1, 1), 4), (r(11, 1), 4)], 11, "square of f11, weight 4 cusp form on Gamma0(11)"),
        "kz" => (
            vec![(r(1, 2), 8), (r(2, 1), 8), (r(1, 1), -12)],
            2,
            "eta(z/2)^8 eta(2z)^8 eta(z)^-12, weight 2 on the theta group with character",
        ),
        "eta" => (vec![(r(1, 1), 1)], 1, "Dedekind eta, weight 1/2"),
        _ => return Err(Error::InvalidArgument(format!("unknown builtin form '{label}'"))),
    })
}

pub fn builtin_form(label: &str, order: usize) -> Result<FormLibraryEntry> {
    let (factors, level, note) = builtin_recipe(label)?;
    let mut series = eta_quotient(&factors, order)?;
    series.level = level;
    series.label = label.to_string();
    Ok(FormLibraryEntry { label: label.into(), series, provenance: note.into(), eta_factors: Some(factors) })
}

#[derive(Serialize, Deserialize)]
struct SeriesFile {
    label: String,
    weight: serde_json::Value,
    level: u64,
    exponent_denominator: u64,
    leading_numerator: i64,
    coefficients: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eta_factors: Option<Vec<(String, i64)>>,
}

fn parse_rational(s: &str) -> Result<Rational64> {
    let bad = || Error::Schema(format!("cannot parse rational '{s}'"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(p, q))
        }
        None => Ok(Rational64::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

fn weight_value(w: Rational64) -> serde_json::Value {
    if w.is_integer() {
        serde_json::Value::from(w.to_integer())
    } else {
        serde_json::Value::from(format!("{}/{}", w.numer(), w.denom()))
    }
}

pub fn to_json(entry: &FormLibraryEntry) -> Result<String> {
    let s = entry.series.dense();
    let file = SeriesFile {
        label: entry.label.clone(),
        weight: weight_value(s.weight),
        level: s.level,
        exponent_denominator: s.denom,
        leading_numerator: s.lead,
        coefficients: s.coeffs.iter().map(|c| [format!("{:?}", c.re), format!("{:?}", c.im)]).collect(),
        eta_factors: entry
            .eta_factors
            .as_ref()
            .map(|v| v.iter().map(|(t, e)| (format!("{}/{}", t.numer(), t.denom()), *e)).collect()),
    };
    serde_json::to_string_pretty(&file).map_err(|e| Error::Schema(e.to_string()))
}

pub fn from_json(text: &str) -> Result<FormLibraryEntry> {
    let file: SeriesFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let weight = match &file.weight {
        serde_json::Value::Number(n) => {
            Rational64::from_integer(n.as_i64().ok_or_else(|| Error::Schema("weight must be an integer or \"p/q\"".into()))?)
        }
        serde_json::Value::String(s) => parse_rational(s)?,
        _ => return Err(Error::Schema("weight must be an integer or \"p/q\"".into())),
    };
    if file.exponent_denominator == 0 {
        return Err(Error::Schema("exponent_denominator must be positive".into()));
    }
    if file.level == 0 {
        return Err(Error::Schema("level must be positive".into()));
    }
    let mut coeffs = Vec::with_capacity(file.coefficients.len());
    for [re, im] in &file.coefficients {
        let p = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Schema(format!("bad decimal '{s}'")));
        coeffs.push(C64::new(p(re)?, p(im)?));
    }
    let eta_factors = match &file.eta_factors {
        Some(v) => {
            let f: Vec<(Rational64, i64)> =
                v.iter().map(|(t, e)| parse_rational(t).map(|t| (t, *e))).collect::<Result<_>>()?;
            let w = Rational64::new(f.iter().map(|(_, e)| e).sum(), 2);
            if w != weight {
                return Err(Error::Schema(format!("weight {weight} does not match eta factors (weight {w})")));
            }
            let lead: Rational64 = f.iter().map(|(t, e)| t * *e).sum::<Rational64>() / 24;
            if lead != Rational64::new(file.leading_numerator, file.exponent_denominator as i64) {
                return Err(Error::Schema(format!("leading exponent does not match eta factors ({lead})")));
            }
            Some(f)
        }
        None => None,
    };
    let series = FracQSeries {
        denom: file.exponent_denominator,
        lead: file.leading_numerator,
        step: 1,
        coeffs,
        exact: None,
        weight,
        level: file.level,
        label: file.label.clone(),
    };
    Ok(FormLibraryEntry { label: file.label, series, provenance: "file".into(), eta_factors })
}

pub fn load_form(path: &Path) -> Result<FormLibraryEntry> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    from_json(&text)
}

pub fn save_form(entry: &FormLibraryEntry, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(entry)?).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Builtin label or path to a JSON file; checks the coefficient count.
pub fn resolve_form(source: &str, order: usize) -> Result<FormLibraryEntry> {
    if BUILTIN_LABELS.contains(&source) {
        return builtin_form(source, order);
    }
    let entry = load_form(Path::new(source))?;
    if entry.series.len() < order {
        return Err(Error::IndexRange(format!(
            "file '{source}' holds {} coefficients, {order} requested",
            entry.series.len()
        )));
    }
    Ok(entry)
}

/// Exact integer check used by the f11 sanity invariant.
pub fn all_integral(s: &FracQSeries) -> bool {
    match &s.exact {
        Some(e) => e.iter().zip(&s.coeffs).all(|(b, c)| c.im == 0.0 && (b.abs().bits() > 52 || b.to_f64() == Some(c.re))),
        None => s.coeffs.iter().all(|c| c.im == 0.0 && c.re.fract() == 0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force ∏_{n<len}(1 − y^n)^e by repeated dense multiplication.
    fn brute_eta_power(e: i64, len: usize) -> Vec<i128> {
        let mut p = vec![0i128; len];
        p[0] = 1;
        for n in 1..len {
            for i in (n..len).rev() {
                p[i] -= p[i - n];
            }
        }
        let mut out = vec![0i128; len];
        out[0] = 1;
        for _ in 0..e {
            let mut next = vec![0i128; len];
            for i in 0..len {
                for j in 0..len - i {
                    next[i + j] += out[i] * p[j];
                }
            }
            out = next;
        }
        out
    }

    fn re(s: &FracQSeries) -> Vec<f64> {
        s.coeffs.iter().map(|c| c.re).collect()
    }

    #[test]
    fn eta_expansions() {
        let e1 = eta_qexp(r(1, 1), 8).unwrap();
        assert_eq!(e1.leading_exponent(), r(1, 24));
        assert_eq!(&re(&e1)[..6], &[1.0, -1.0, -1.0, 0.0, 0.0, 1.0]);
        assert_eq!(eta_qexp(r(2, 1), 4).unwrap().leading_exponent(), r(1, 12));
        assert_eq!(eta_qexp(r(1, 2), 4).unwrap().leading_exponent(), r(1, 48));
        assert!(eta_qexp(r(-1, 1), 4).is_err());
    }

    #[test]
    fn delta_against_brute_force() {
        let d = builtin_form("delta", 30).unwrap().series;
        let b = brute_eta_power(24, 30);
        assert_eq!(d.leading_exponent(), r(1, 1));
        for n in 0..30 {
            assert_eq!(d.exact.as_ref().unwrap()[n], BigInt::from(b[n]));
        }
        assert_eq!(&re(&d)[..4], &[1.0, -24.0, 252.0, -1472.0]);
    }

    #[test]
    fn f11_and_kz_lattices() {
        let f = builtin_form("f11", 40).unwrap().series;
        assert_eq!(f.leading_exponent(), r(1, 1));
        assert_eq!(f.coeffs[1].re, -2.0);
        assert!(all_integral(&f));
        let k = builtin_form("kz", 60).unwrap().series;
        assert_eq!(k.leading_exponent(), r(1, 3));
        assert_eq!((k.denom, k.step), (6, 3));
        assert_eq!(k.weight, r(2, 1));
    }

    #[test]
    fn kz_exact_against_float_product() {
        // Independent route: float product of the three factors via `pow`.
        let n = 40;
        let a = eta_qexp(r(1, 2), 4 * n).unwrap().pow(8).unwrap();
        let b = eta_qexp(r(2, 1), 4 * n).unwrap().pow(8).unwrap();
        let c = eta_qexp(r(1, 1), 4 * n).unwrap().pow(-12).unwrap();
        let prod = a.mul(&b).mul(&c);
        let k = builtin_form("kz", n).unwrap().series;
        let kd = k.regrid(prod.denom.lcm(&k.denom), 1).unwrap();
        let pd = prod.regrid(kd.denom, 1).unwrap();
        assert_eq!(kd.lead, pd.lead);
        for i in 0..kd.len().min(pd.len()) {
            let x = kd.coeffs[i].re;
            assert!((x - pd.coeffs[i].re).abs() <= 1e-9 * x.abs().max(1.0), "i={i}");
        }
    }

    #[test]
    fn big_fallback_matches_i128() {
        let small = eta_power_i128(-12, 60).unwrap();
        let big = eta_power_big(-12, 60);
        assert!(eta_power_i128(-12, 400).is_none());
        for (a, b) in small.iter().zip(&big) {
            assert_eq!(BigInt::from(*a), *b);
        }
        // Large orders of the KZ integrand overflow i128.
        let k = builtin_form("kz", 700).unwrap().series;
        assert!(k.exact.as_ref().unwrap().last().unwrap().bits() > 127);
    }

    #[test]
    fn arithmetic_identities() {
        let eta = eta_qexp(r(1, 1), 50).unwrap();
        let sq = eta.mul(&eta);
        assert_eq!(sq.leading_exponent(), r(1, 12));
        let e2 = eta_quotient(&[(r(1, 1), 2)], 50).unwrap();
        let diff = sq.sub(&e2);
        assert!(diff.coeffs.iter().all(|c| c.norm() < 1e-12));
        let inv = sq.invert().unwrap();
        let one = inv.mul(&sq);
        assert_eq!(one.leading_exponent(), r(0, 1));
        assert!((one.coeffs[0] - 1.0).norm() < 1e-12);
        assert!(one.coeffs[1..].iter().all(|c| c.norm() < 1e-9));
        let zero = FracQSeries::new(1, 1, 1, vec![C64::zero(); 4]).unwrap();
        assert_eq!(zero.invert(), Err(Error::ZeroSeries));
    }

    #[test]
    fn derivatives_and_antiderivatives() {
        let d = builtin_form("delta", 20).unwrap().series;
        assert_eq!(d.antiderivative(0).unwrap(), d);
        let c1 = d.antiderivative(1).unwrap().coeffs[0];
        assert!((c1 - C64::new(0.0, -1.0 / (2.0 * PI))).norm() < 1e-15);
        assert!((d.derive().coeffs[0] - C64::new(0.0, 2.0 * PI)).norm() < 1e-12);
        let back = d.antiderivative(1).unwrap().derive();
        for (a, b) in back.coeffs.iter().zip(&d.coeffs) {
            assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0));
        }
        assert_eq!(FracQSeries::one(4).antiderivative(1), Err(Error::NotCuspidal));
    }

    #[test]
    fn file_round_trip_and_validation() {
        let entry = builtin_form("kz", 30).unwrap();
        let text = to_json(&entry).unwrap();
        let back = from_json(&text).unwrap();
        assert_eq!(to_json(&back).unwrap(), text);
        assert_eq!(back.series.coeffs, entry.series.dense().coeffs);
        let scaled = entry.series.scale(C64::new(0.1, -1.0 / 3.0));
        let e2 = FormLibraryEntry { series: scaled, eta_factors: None, ..entry.clone() };
        let b2 = from_json(&to_json(&e2).unwrap()).unwrap();
        for (a, b) in b2.series.coeffs.iter().zip(&e2.series.dense().coeffs) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        let bad = text.replacen("\"weight\": 2", "\"weight\": 4", 1);
        assert!(matches!(from_json(&bad), Err(Error::Schema(_))));
        let half = to_json(&builtin_form("eta", 5).unwrap()).unwrap();
        assert!(half.contains("\"1/2\""));
        assert_eq!(from_json(&half).unwrap().series.weight, r(1, 2));
    }

    fn random_quotient() -> impl Strategy<Value = Vec<(Rational64, i64)>> {
        prop::collection::vec((prop::sample::select(vec![r(1, 2), r(1, 1), r(2, 1), r(3, 1)]), -4i64..=4), 1..=3)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn truncation_consistency(a in random_quotient(), b in random_quotient(), order in 5usize..40) {
            let fa = eta_quotient(&a, order).unwrap();
            let fb = eta_quotient(&b, order).unwrap();
            let long = eta_quotient(&a, order + 10).unwrap().mul(&eta_quotient(&b, order + 10).unwrap());
            let short = fa.mul(&fb);
            let ld = long.regrid(long.denom, long.step.gcd(&short.step)).unwrap();
            let sd = short.regrid(ld.denom, ld.step).unwrap();
            prop_assert_eq!(sd.lead, ld.lead);
            for i in 0..sd.len() {
                prop_assert_eq!(&sd.exact.as_ref().unwrap()[i], &ld.exact.as_ref().unwrap()[i]);
            }
        }

        #[test]
        fn derive_inverts_antiderivative(a in random_quotient()) {
            let f = eta_quotient(&a, 20).unwrap();
            prop_assume!(f.lead > 0);
            let back = f.antiderivative(1).unwrap().derive();
            for (x, y) in back.coeffs.iter().zip(&f.coeffs) {
                prop_assert!((x - y).norm() <= 1e-9 * y.norm().max(1.0));
            }
        }
    }
}
