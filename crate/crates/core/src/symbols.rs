//! Modular symbols, Hom₀ elements, period polynomials and the cochain
//! calculus on P_{k−2}-valued maps.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64 as C64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{eichler_integral, Evaluator, ModularForm};
use crate::group::{is_parabolic, Mat2};
use crate::numerics::{binomial, integrate_doubling, GaussLegendre, NeumaierSum, I};
use crate::qseries::FracQSeries;
pub use crate::report::VerificationReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymbolMethod {
    /// Eichler integral at the balanced point (−d+i)/c and its image.
    QSeries,
    /// Gauss–Legendre along the straight segment between the same points.
    Quadrature,
    /// Continued fractions over the table Φ(t/N).
    Manin,
}

fn check_symbol_input(form: &ModularForm, g: &Mat2) -> Result<()> {
    if form.weight != 2 {
        return Err(Error::InvalidArgument("modular symbols need a weight 2 form".into()));
    }
    if g.c.rem_euclid(form.level as i64) != 0 {
        return Err(Error::InvalidArgument(format!("{g} is not in Gamma0({})", form.level)));
    }
    Ok(())
}

/// ⟨γ, f⟩ = F(γz₀) − F(z₀).
pub fn modular_symbol(form: &ModularForm, g: &Mat2, method: SymbolMethod) -> Result<C64> {
    check_symbol_input(form, g)?;
    if g.c == 0 {
        return Ok(C64::zero());
    }
    // ±g act identically; pick c > 0 so the base point lies in H.
    let g = &g.canonical();
    match method {
        SymbolMethod::Manin => Ok(form.symbol(g)),
        SymbolMethod::QSeries => {
            let z0 = C64::new(-g.d as f64, 1.0) / g.c as f64;
            let tol = 1e-13;
            let a = eichler_integral(&form.series, g.act(z0), tol)?.value;
            let b = eichler_integral(&form.series, z0, tol)?.value;
            Ok(a - b)
        }
        SymbolMethod::Quadrature => {
            let z0 = C64::new(-g.d as f64, 1.0) / g.c as f64;
            symbol_quadrature(form, g, z0)
        }
    }
}

/// ∫_{z₀}^{γz₀} f along the straight segment, f evaluated by modular
/// reduction.
pub fn symbol_quadrature(form: &ModularForm, g: &Mat2, z0: C64) -> Result<C64> {
    check_symbol_input(form, g)?;
    let err = Mutex::new(None);
    let v = integrate_doubling(z0, g.act(z0), 8, 1e-13, 1 << 14, |w| match form.eval(w) {
        Ok(v) => v,
        Err(e) => {
            *err.lock().unwrap() = Some(e);
            C64::zero()
        }
    })?;
    match err.into_inner().unwrap() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// One summand c·⟨γ, l⟩ (or its conjugate).
#[derive(Clone, Debug)]
pub struct Hom0Term {
    pub coef: C64,
    pub form: Arc<ModularForm>,
    pub conjugated: bool,
}

/// L(γ) = Σ cᵢ⟨γ, lᵢ⟩ with optional conjugation, the shape every element of
/// Hom₀ takes.
#[derive(Clone, Debug, Default)]
pub struct Hom0Spec {
    pub terms: Vec<Hom0Term>,
}

impl Hom0Spec {
    pub fn symbol_of(form: Arc<ModularForm>) -> Self {
        Hom0Spec { terms: vec![Hom0Term { coef: C64::new(1.0, 0.0), form, conjugated: false }] }
    }

    pub fn conjugate(&self) -> Self {
        Hom0Spec {
            terms: self
                .terms
                .iter()
                .map(|t| Hom0Term { coef: t.coef.conj(), form: t.form.clone(), conjugated: !t.conjugated })
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coef.is_zero())
    }

    pub fn eval(&self, g: &Mat2) -> Result<C64> {
        let mut acc = C64::zero();
        for t in &self.terms {
            let s = modular_symbol(&t.form, g, SymbolMethod::Manin)?;
            acc += t.coef * if t.conjugated { s.conj() } else { s };
        }
        Ok(acc)
    }
}

pub fn hom0_eval(l: &Hom0Spec, g: &Mat2) -> Result<C64> {
    l.eval(g)
}

/// Polynomial of degree ≤ k−2 in X, coefficient i at X^i.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodPolynomial {
    pub k: i64,
    pub coeffs: Vec<C64>,
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_pow(p: &[f64], n: usize) -> Vec<f64> {
    (0..n).fold(vec![1.0], |acc, _| poly_mul(&acc, p))
}

impl PeriodPolynomial {
    pub fn zero(k: i64) -> Self {
        PeriodPolynomial { k, coeffs: vec![C64::zero(); (k - 1).max(1) as usize] }
    }

    pub fn degree_bound(&self) -> usize {
        (self.k - 2).max(0) as usize
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::zero(), |acc, c| acc * x + c)
    }

    pub fn add(&self, o: &Self) -> Self {
        PeriodPolynomial { k: self.k, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        PeriodPolynomial { k: self.k, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: C64) -> Self {
        PeriodPolynomial { k: self.k, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn conj(&self) -> Self {
        PeriodPolynomial { k: self.k, coeffs: self.coeffs.iter().map(|a| a.conj()).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// (P|_{2−k}γ)(X) = P(γX)·j(γ,X)^{k−2}, expanded exactly in X.
    pub fn slash(&self, g: &Mat2) -> Self {
        let n = self.degree_bound();
        let num = [g.b as f64, g.a as f64];
        let den = [g.d as f64, g.c as f64];
        let mut out = vec![C64::zero(); n + 1];
        for (i, p) in self.coeffs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let term = poly_mul(&poly_pow(&num, i), &poly_pow(&den, n - i));
            for (j, t) in term.iter().enumerate() {
                out[j] += p * t;
            }
        }
        PeriodPolynomial { k: self.k, coeffs: out }
    }
}

/// How Γ acts on cochain values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Trivial,
    Slash,
}

fn act(p: &PeriodPolynomial, g: &Mat2, action: Action) -> PeriodPolynomial {
    match action {
        Action::Trivial => p.clone(),
        Action::Slash => p.slash(g),
    }
}

pub type Cochain1<'a> = dyn Fn(&Mat2) -> Result<PeriodPolynomial> + 'a;
pub type Cochain2<'a> = dyn Fn(&Mat2, &Mat2) -> Result<PeriodPolynomial> + 'a;

/// (dψ)(γ₁, γ₂) = ψ(γ₂).γ₁ − ψ(γ₂γ₁) + ψ(γ₁).
pub fn coboundary1(psi: &Cochain1, g1: &Mat2, g2: &Mat2, action: Action) -> Result<PeriodPolynomial> {
    Ok(act(&psi(g2)?, g1, action).sub(&psi(&g2.mul(g1))?).add(&psi(g1)?))
}

/// (dψ)(γ₁, γ₂, γ₃) = ψ(γ₂,γ₃).γ₁ − ψ(γ₂γ₁,γ₃) + ψ(γ₁,γ₃γ₂) − ψ(γ₁,γ₂).
pub fn coboundary2(psi: &Cochain2, g1: &Mat2, g2: &Mat2, g3: &Mat2, action: Action) -> Result<PeriodPolynomial> {
    Ok(act(&psi(g2, g3)?, g1, action)
        .sub(&psi(&g2.mul(g1), g3)?)
        .add(&psi(g1, &g3.mul(g2))?)
        .sub(&psi(g1, g2)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Base {
    Interior,
    Cusp,
}

/// Adaptive vector quadrature on 64-node panels: a panel is split in two
/// until the split changes no coefficient by more than its share of `tol`.
fn integrate_poly<F>(a: C64, b: C64, dim: usize, tol: f64, conj_measure: bool, f: &mut F) -> Result<Vec<C64>>
where
    F: FnMut(C64) -> Result<Vec<C64>>,
{
    let rule = GaussLegendre::cached(64);
    // Returns the panel integral and its L1 mass. Modular evaluation near the
    // real line loses digits in the reduction, so panels are accepted once the
    // disagreement falls to ~1e-11 of that mass.
    let panel = |lo: C64, hi: C64, f: &mut F| -> Result<(Vec<C64>, f64)> {
        let mid = (lo + hi) * 0.5;
        let half = (hi - lo) * 0.5;
        let h = if conj_measure { half.conj() } else { half };
        let mut acc = vec![C64::zero(); dim];
        let mut mass = 0.0;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let v = f(mid + half * *x)?;
            for (s, t) in acc.iter_mut().zip(v) {
                mass += t.norm() * w;
                *s += t * *w;
            }
        }
        Ok((acc.into_iter().map(|s| s * h).collect(), mass * h.norm()))
    };
    let mut sums: Vec<NeumaierSum> = vec![NeumaierSum::new(); dim];
    let (whole, _) = panel(a, b, f)?;
    let mut stack = vec![(a, b, whole, tol, 0usize)];
    while let Some((lo, hi, est, t, depth)) = stack.pop() {
        let m = (lo + hi) * 0.5;
        let (l, ml) = panel(lo, m, f)?;
        let (r, mr) = panel(m, hi, f)?;
        let diff = l.iter().zip(&r).zip(&est).map(|((x, y), e)| (x + y - e).norm()).fold(0.0, f64::max);
        if diff <= t.max(1e-11 * (ml + mr)) {
            for i in 0..dim {
                sums[i].add(l[i] + r[i]);
            }
        } else if depth >= 40 {
            return Err(Error::Quadrature(format!("period integral did not converge on {lo} -> {hi}")));
        } else {
            stack.push((m, hi, r, 0.5 * t, depth + 1));
            stack.push((lo, m, l, 0.5 * t, depth + 1));
        }
    }
    Ok(sums.iter().map(|s| s.value()).collect())
}

/// Coefficients of (z − X)^{k−2} (or (z̄ − X)^{k−2}) times F(z).
fn kernel(fz: C64, z: C64, n: usize) -> Vec<C64> {
    let mut zp = vec![C64::new(1.0, 0.0); n + 1];
    for i in 1..=n {
        zp[i] = zp[i - 1] * z;
    }
    (0..=n)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            fz * zp[n - j] * (binomial(n as u32, j as u32) * sign)
        })
        .collect()
}

const PERIOD_TOL: f64 = 1e-11;

// Legs of the path from a to b. A low endpoint is reached by a vertical
// descent from the height of a: a slanted segment would cross the thin
// region near many rationals, where modular evaluation loses digits.
fn legs(a: C64, b: C64) -> Vec<(C64, C64)> {
    let mut out = Vec::new();
    let (mut a, mut b, mut rev) = (a, b, false);
    if a.im < b.im {
        std::mem::swap(&mut a, &mut b);
        rev = true;
    }
    if b.im < 0.5 * a.im && (a.re - b.re).abs() > 0.0 {
        let corner = C64::new(b.re, a.im);
        out.push((a, corner));
        out.push((corner, b));
    } else {
        out.push((a, b));
    }
    if rev {
        out = out.into_iter().rev().map(|(x, y)| (y, x)).collect();
    }
    out
}

fn integrate_path<F>(a: C64, b: C64, dim: usize, conj_measure: bool, f: &mut F) -> Result<Vec<C64>>
where
    F: FnMut(C64) -> Result<Vec<C64>>,
{
    let mut total = vec![C64::zero(); dim];
    for (lo, hi) in legs(a, b) {
        for (t, v) in total.iter_mut().zip(integrate_poly(lo, hi, dim, PERIOD_TOL, conj_measure, f)?) {
            *t += v;
        }
    }
    Ok(total)
}

/// ∫_a^b F(z)(z − X)^{k−2} dz. F must be holomorphic: the path is a
/// horizontal leg followed by a vertical one when b is low.
pub fn path_integral(f: &Evaluator, k: i64, a: C64, b: C64) -> Result<PeriodPolynomial> {
    let n = (k - 2).max(0) as usize;
    let c = integrate_path(a, b, n + 1, false, &mut |z| Ok(kernel(f.eval(z)?, z, n)))?;
    Ok(PeriodPolynomial { k, coeffs: c })
}

/// ∫_a^b F(z)(z̄ − X)^{k−2} dz̄ for antiholomorphic F.
pub fn path_integral_antiholo(f: &Evaluator, k: i64, a: C64, b: C64) -> Result<PeriodPolynomial> {
    let n = (k - 2).max(0) as usize;
    let c = integrate_path(a, b, n + 1, true, &mut |z| Ok(kernel(f.eval(z)?, z.conj(), n)))?;
    Ok(PeriodPolynomial { k, coeffs: c })
}

/// Height above which a cusp form's contribution to ∫^{i∞} is negligible.
fn cusp_cutoff(k: i64) -> f64 {
    let mut y: f64 = 2.0;
    while 2.0 * PI * y - (k as f64) * y.ln() < 60.0 {
        y += 1.0;
    }
    y
}

/// φ(γ) = ∫_i^{γ⁻¹i} F(z)(z−X)^{k−2} dz; with `Base::Cusp` the base point is
/// i∞, obtained as φ_i(γ) + C − C|γ with C = ∫_{i∞}^{i}. The cusp base
/// needs a first-order cusp form (`cusp_form = true`).
pub fn period_polynomial(f: &Evaluator, k: i64, g: &Mat2, base: Base, cusp_form: bool) -> Result<PeriodPolynomial> {
    let inner = if g.is_identity() {
        PeriodPolynomial::zero(k)
    } else {
        path_integral(f, k, I, g.inverse().act(I))?
    };
    match base {
        Base::Interior => Ok(inner),
        Base::Cusp => {
            if !cusp_form {
                return Err(Error::InvalidArgument(
                    "the i-infinity base point needs a first-order cusp form".into(),
                ));
            }
            let c = cusp_constant(f, k)?;
            Ok(inner.add(&c).sub(&c.slash(g)))
        }
    }
}

/// C = ∫_{i∞}^{i} F(z)(z − X)^{k−2} dz.
pub fn cusp_constant(f: &Evaluator, k: i64) -> Result<PeriodPolynomial> {
    let top = C64::new(0.0, cusp_cutoff(k));
    Ok(path_integral(f, k, I, top)?.scale(C64::new(-1.0, 0.0)))
}

/// φ̃(γ) = ∫_i^{γ⁻¹i} F(z)(z̄−X)^{k−2} dz̄.
pub fn period_polynomial_antiholo(f: &Evaluator, k: i64, g: &Mat2) -> Result<PeriodPolynomial> {
    if g.is_identity() {
        return Ok(PeriodPolynomial::zero(k));
    }
    path_integral_antiholo(f, k, I, g.inverse().act(I))
}

/// Memoised γ ↦ φ(γ) for one evaluator.
pub struct PeriodCochain {
    pub f: Evaluator,
    pub k: i64,
    pub base: Base,
    pub cusp_form: bool,
    cache: Mutex<HashMap<(i64, i64, i64, i64), PeriodPolynomial>>,
}

impl PeriodCochain {
    pub fn new(f: Evaluator, k: i64, base: Base, cusp_form: bool) -> Self {
        PeriodCochain { f, k, base, cusp_form, cache: Mutex::new(HashMap::new()) }
    }

    pub fn get(&self, g: &Mat2) -> Result<PeriodPolynomial> {
        let c = g.canonical();
        let key = (c.a, c.b, c.c, c.d);
        if let Some(p) = self.cache.lock().unwrap().get(&key) {
            return Ok(p.clone());
        }
        let p = period_polynomial(&self.f, self.k, &c, self.base, self.cusp_form)?;
        self.cache.lock().unwrap().insert(key, p.clone());
        Ok(p)
    }
}

/// Largest residual of the six-term identity over `triples` and of
/// f(δπ) = f(δ)|π + f(π) over `pairs` (π parabolic).
pub fn z1_shriek_residual(
    f: &Cochain1,
    triples: &[(Mat2, Mat2, Mat2)],
    pairs: &[(Mat2, Mat2)],
) -> Result<(f64, f64)> {
    let mut six: f64 = 0.0;
    for (g1, g2, g3) in triples {
        let conj = g1.inverse().mul(g2).mul(g1);
        let lhs = f(&g3.mul(g2).mul(g1))?;
        let rhs = f(&g3.mul(g2))?
            .slash(g1)
            .add(&f(&g2.mul(g1))?)
            .add(&f(&g3.mul(g1))?.slash(&conj))
            .sub(&f(g3)?.slash(&g2.mul(g1)))
            .sub(&f(g2)?.slash(g1))
            .sub(&f(g1)?.slash(&conj));
        six = six.max(lhs.sub(&rhs).max_abs());
    }
    let mut par: f64 = 0.0;
    for (d, p) in pairs {
        if !is_parabolic(p) {
            return Err(Error::InvalidArgument(format!("{p} is not parabolic")));
        }
        let lhs = f(&d.mul(p))?;
        let rhs = f(d)?.slash(p).add(&f(p)?);
        par = par.max(lhs.sub(&rhs).max_abs());
    }
    Ok((six, par))
}

/// Residual between (dφ)(γ,δ) = φ(δγ) − φ(δ)|γ − φ(γ) and
/// [∫_i^{δ⁻¹i} F|_k(γ⁻¹ − 1)(w)(w−X)^{k−2} dw]|γ.
pub fn dphi_identity_residual(f: &Evaluator, k: i64, g: &Mat2, d: &Mat2) -> Result<(f64, PeriodPolynomial)> {
    let phi = |m: &Mat2| period_polynomial(f, k, m, Base::Interior, false);
    let lhs = phi(&d.mul(g))?.sub(&phi(d)?.slash(g)).sub(&phi(g)?);
    let slashed = f.slash(k, g.inverse());
    let inner = f.clone();
    let diff = Evaluator::new(k, "F|(g^-1 - 1)", move |z| Ok(slashed.eval(z)? - inner.eval(z)?));
    let rhs = if d.is_identity() {
        PeriodPolynomial::zero(k)
    } else {
        path_integral(&diff, k, I, d.inverse().act(I))?.slash(g)
    };
    Ok((lhs.sub(&rhs).max_abs(), rhs))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistedL {
    pub value: C64,
    pub tail_bound: f64,
    pub certified: bool,
}

/// Σ_{n≤N} a_n e(mn) n^{−s} for a series with integral exponents. The tail
/// bound uses |a_n| ≤ C n^{k/2} with C fitted on the stored coefficients,
/// and is only certified for Re(s) > k/2 + 1.
pub fn twisted_l_partial(f: &FracQSeries, k: i64, m: f64, s: C64, n_terms: usize) -> Result<TwistedL> {
    let dense = f.dense();
    if dense.denom != 1 {
        return Err(Error::InvalidArgument("twisted L-sums need integral exponents".into()));
    }
    let coef = |n: i64| -> C64 {
        let idx = n - dense.lead;
        if idx < 0 || idx as usize >= dense.len() {
            C64::zero()
        } else {
            dense.coeffs[idx as usize]
        }
    };
    let last = dense.lead + dense.len() as i64 - 1;
    if (n_terms as i64) > last {
        return Err(Error::IndexRange(format!("series has coefficients up to n = {last}, {n_terms} requested")));
    }
    let mut acc = NeumaierSum::new();
    let mut c_fit: f64 = 0.0;
    let half_k = k as f64 / 2.0;
    for n in 1..=n_terms as i64 {
        let a = coef(n);
        c_fit = c_fit.max(a.norm() / (n as f64).powf(half_k));
        let phase = C64::new(0.0, 2.0 * PI * m * n as f64).exp();
        acc.add(a * phase * C64::new(n as f64, 0.0).powc(-s));
    }
    let sigma = s.re;
    let certified = sigma > half_k + 1.0;
    let tail_bound = if certified {
        let e = sigma - half_k - 1.0;
        c_fit * (n_terms as f64).powf(-e) / e
    } else {
        f64::INFINITY
    };
    Ok(TwistedL { value: acc.value(), tail_bound, certified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{gamma0_context, sample_elements};
    use crate::qseries::builtin_form;
    use proptest::prelude::*;

    fn f11() -> Arc<ModularForm> {
        Arc::new(ModularForm::new(builtin_form("f11", 1024).unwrap().series, 2, 11).unwrap())
    }

    fn delta() -> Arc<ModularForm> {
        Arc::new(ModularForm::new(builtin_form("delta", 400).unwrap().series, 12, 1).unwrap())
    }

    #[test]
    fn symbol_examples() {
        let f = f11();
        for m in [SymbolMethod::QSeries, SymbolMethod::Quadrature, SymbolMethod::Manin] {
            assert_eq!(modular_symbol(&f, &Mat2::t(1), m).unwrap(), C64::zero());
            let p = modular_symbol(&f, &Mat2 { a: 1, b: 0, c: 11, d: 1 }, m).unwrap();
            assert!(p.norm() < 1e-9, "{m:?}: {p}");
        }
        let g = Mat2 { a: 4, b: -1, c: 33, d: -8 };
        let q = modular_symbol(&f, &g, SymbolMethod::QSeries).unwrap();
        let r = modular_symbol(&f, &g, SymbolMethod::Quadrature).unwrap();
        assert!(q.norm() > 1e-3);
        assert!((q - r).norm() < 1e-8, "{q} vs {r}");
        assert!(modular_symbol(&f, &Mat2::S, SymbolMethod::Manin).is_err());
    }

    #[test]
    fn base_point_independence() {
        let f = f11();
        let g = Mat2 { a: 5, b: 2, c: 22, d: 9 };
        let a = symbol_quadrature(&f, &g, C64::new(0.3, 0.8)).unwrap();
        let b = symbol_quadrature(&f, &g, C64::new(-0.1, 0.05)).unwrap();
        assert!((a - b).norm() < 1e-8);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn hom0_properties(seed in any::<u64>(), c_max in 11i64..80) {
            let ctx = gamma0_context(11).unwrap();
            let l = Hom0Spec::symbol_of(f11());
            let gs = sample_elements(&ctx, seed, 6, c_max);
            for w in gs.windows(2) {
                let lhs = l.eval(&w[0].mul(&w[1])).unwrap();
                prop_assert!((lhs - l.eval(&w[0]).unwrap() - l.eval(&w[1]).unwrap()).norm() < 1e-8);
                prop_assert!((l.conjugate().eval(&w[0]).unwrap() - l.eval(&w[0]).unwrap().conj()).norm() < 1e-15);
            }
            let t = Mat2::t(1);
            for g in &gs {
                for p in [t, Mat2 { a: 1, b: 0, c: 11, d: 1 }] {
                    let q = g.mul(&p).mul(&g.inverse());
                    prop_assert!(l.eval(&q).unwrap().norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn eichler_shimura_gram() {
        let ctx = gamma0_context(11).unwrap();
        let l = Hom0Spec::symbol_of(f11());
        let gs: Vec<Mat2> = sample_elements(&ctx, 9, 12, 80).into_iter().filter(|g| !is_parabolic(g)).collect();
        // Real vectors (Re, Im) of the symbol: rank 2 over R.
        let v: Vec<[f64; 2]> = gs.iter().map(|g| {
            let s = l.eval(g).unwrap();
            [s.re, s.im]
        }).collect();
        let mut gram = [[0.0; 2]; 2];
        for x in &v {
            for i in 0..2 {
                for j in 0..2 {
                    gram[i][j] += x[i] * x[j];
                }
            }
        }
        let tr = gram[0][0] + gram[1][1];
        let det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0];
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        let (hi, lo) = (tr / 2.0 + disc, tr / 2.0 - disc);
        assert!(lo > 0.0 && hi / lo < 1e6, "eigenvalues {hi} {lo}");
    }

    #[test]
    fn slash_poly_action() {
        let ctx = gamma0_context(1).unwrap();
        let gs = sample_elements(&ctx, 4, 6, 5);
        let p = PeriodPolynomial { k: 6, coeffs: (0..5).map(|i| C64::new(i as f64 - 1.5, 0.3 * i as f64)).collect() };
        assert_eq!(p.slash(&Mat2::IDENTITY), p);
        for w in gs.windows(2) {
            let two = p.slash(&w[0]).slash(&w[1]);
            let one = p.slash(&w[0].mul(&w[1]));
            assert!(two.sub(&one).max_abs() <= 1e-10 * one.max_abs());
            // (w − γX) j(γ,X) = (γ⁻¹w − X) j(γ⁻¹,w)
            let g = w[0];
            let (x, z) = (C64::new(0.37, -0.2), C64::new(-0.8, 1.3));
            let lhs = (z - g.act(x)) * g.j(x);
            let rhs = (g.inverse().act(z) - x) * g.inverse().j(z);
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn delta_periods() {
        let d = delta().evaluator();
        let zero = period_polynomial(&d, 12, &Mat2::IDENTITY, Base::Cusp, true).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
        let t = period_polynomial(&d, 12, &Mat2::t(1), Base::Cusp, true).unwrap();
        let r = period_polynomial(&d, 12, &Mat2::S, Base::Cusp, true).unwrap();
        assert!(t.max_abs() < 1e-10 * r.max_abs(), "{} vs {}", t.max_abs(), r.max_abs());
        assert!(r.add(&r.slash(&Mat2::S)).max_abs() < 1e-8);
        assert_eq!(r.coeffs.len(), 11);
        assert!(period_polynomial(&d, 12, &Mat2::S, Base::Cusp, false).is_err());
    }

    #[test]
    fn delta_period_against_l_values() {
        // r_Δ(S) with base i∞: ∫_0^{i∞} Δ(z) z^n dz = n!/(−2πi)^{n+1}·L(Δ, n+1)
        // for the X^{10−n} coefficient up to the binomial and sign.
        let d = delta();
        let r = period_polynomial(&d.evaluator(), 12, &Mat2::S, Base::Cusp, true).unwrap();
        let big = builtin_form("delta", 6000).unwrap().series;
        // n = 10, L(Δ, 11) converges absolutely.
        let l = twisted_l_partial(&big, 12, 0.0, C64::new(11.0, 0.0), 5000).unwrap();
        assert!(l.certified);
        let n = 10u32;
        let integral = crate::numerics::factorial(n) * l.value / (C64::new(0.0, -2.0 * PI)).powi(n as i32 + 1);
        // φ(S) = ∫_{i∞}^{S i∞ = 0} Δ(z) z^{10} dz for the X^0 coefficient.
        let c0 = r.coeffs[0];
        assert!((c0 + integral).norm() < 1e-8 * integral.norm(), "{c0} vs {}", -integral);
    }

    #[test]
    fn cocycle_and_antiholo() {
        let f = f11();
        let f4 = Arc::new(ModularForm::new(builtin_form("f11sq", 600).unwrap().series, 4, 11).unwrap());
        let ev = f4.evaluator();
        let ctx = gamma0_context(11).unwrap();
        let gs = sample_elements(&ctx, 21, 3, 33);
        let phi = PeriodCochain::new(ev.clone(), 4, Base::Interior, true);
        let (g, d) = (gs[0], gs[1]);
        let lhs = phi.get(&d.mul(&g)).unwrap();
        let rhs = phi.get(&d).unwrap().slash(&g).add(&phi.get(&g).unwrap());
        assert!(lhs.sub(&rhs).max_abs() < 1e-8);
        let conj_ev = {
            let e = ev.clone();
            Evaluator::new(4, "conj", move |z| Ok(e.eval(z)?.conj()))
        };
        let a = period_polynomial_antiholo(&conj_ev, 4, &g).unwrap();
        let b = phi.get(&g).unwrap().conj();
        assert!(a.sub(&b).max_abs() < 1e-8);
        assert_eq!(period_polynomial_antiholo(&conj_ev, 4, &Mat2::IDENTITY).unwrap().max_abs(), 0.0);
        assert!(a.coeffs.len() == 3);
        let _ = f;
    }

    #[test]
    fn coboundaries() {
        // homomorphism into C with trivial action: dψ = 0
        let l = Hom0Spec::symbol_of(f11());
        let psi = |g: &Mat2| -> Result<PeriodPolynomial> { Ok(PeriodPolynomial { k: 2, coeffs: vec![l.eval(g)?] }) };
        let ctx = gamma0_context(11).unwrap();
        let gs = sample_elements(&ctx, 1, 3, 40);
        let d = coboundary1(&psi, &gs[0], &gs[1], Action::Trivial).unwrap();
        assert!(d.max_abs() < 1e-9);
        // d∘d = 0 for an arbitrary tabulated 1-cochain, both actions.
        let arbitrary = |g: &Mat2| -> Result<PeriodPolynomial> {
            Ok(PeriodPolynomial {
                k: 4,
                coeffs: vec![
                    C64::new(g.a as f64, 0.5 * g.b as f64),
                    C64::new((g.c as f64).sin(), 0.0),
                    C64::new(0.1 * (g.d * g.a) as f64, 1.0),
                ],
            })
        };
        for action in [Action::Trivial, Action::Slash] {
            let dpsi = |a: &Mat2, b: &Mat2| coboundary1(&arbitrary, a, b, action);
            let dd = coboundary2(&dpsi, &gs[0], &gs[1], &gs[2], action).unwrap();
            assert!(dd.max_abs() < 1e-6 * (1.0 + arbitrary(&gs[0]).unwrap().max_abs()), "{action:?}: {}", dd.max_abs());
        }
        // hand expansion on a tiny table
        let g1 = Mat2::t(1);
        let g2 = Mat2::S;
        let table = |g: &Mat2| -> Result<PeriodPolynomial> {
            Ok(PeriodPolynomial { k: 2, coeffs: vec![C64::new((g.a + 2 * g.b + 3 * g.c + 5 * g.d) as f64, 0.0)] })
        };
        // ψ(S) − ψ(S·T) + ψ(T); S·T = (0,-1;1,1)
        let expect = (-2.0 + 3.0) - (-2.0 + 3.0 + 5.0) + (1.0 + 2.0 + 5.0);
        let v = coboundary1(&table, &g1, &g2, Action::Trivial).unwrap();
        assert_eq!(v.coeffs[0].re, expect);
    }

    #[test]
    fn twisted_sums() {
        let d = builtin_form("delta", 20_001).unwrap().series;
        let s = C64::new(7.5, 0.0);
        let a = twisted_l_partial(&d, 12, 0.0, s, 10_000).unwrap();
        let b = twisted_l_partial(&d, 12, 0.0, s, 20_000).unwrap();
        assert!(a.certified && (a.value - b.value).norm() < 1e-6);
        assert!((a.value - b.value).norm() <= a.tail_bound);
        let one = twisted_l_partial(&d, 12, 1.0, s, 10_000).unwrap();
        assert!((one.value - a.value).norm() < 1e-12);
        assert!(!twisted_l_partial(&d, 12, 0.0, C64::new(6.5, 0.0), 100).unwrap().certified);
    }
}
