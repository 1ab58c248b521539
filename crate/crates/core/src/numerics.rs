//! Numerical building blocks: Gauss–Legendre rules, compensated sums,
//! the complex Gamma function, Bessel K by quadrature, and a few series
//! (Jacobi theta, hypergeometric) used by the crossing oracle.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Cached rule for common sizes.
    pub fn cached(n: usize) -> &'static GaussLegendre {
        static G16: OnceLock<GaussLegendre> = OnceLock::new();
        static G32: OnceLock<GaussLegendre> = OnceLock::new();
        static G64: OnceLock<GaussLegendre> = OnceLock::new();
        match n {
            16 => G16.get_or_init(|| GaussLegendre::new(16)),
            32 => G32.get_or_init(|| GaussLegendre::new(32)),
            64 => G64.get_or_init(|| GaussLegendre::new(64)),
            _ => panic!("no cached Gauss-Legendre rule of size {n}"),
        }
    }

    /// Integral of `f` over the straight segment from `a` to `b`.
    pub fn segment<F: FnMut(C64) -> C64>(&self, a: C64, b: C64, mut f: F) -> C64 {
        let mid = (a + b) * 0.5;
        let half = (b - a) * 0.5;
        let mut acc = C64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * *x) * *w;
        }
        acc * half
    }

    /// Real integral over [a, b].
    pub fn interval<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * w;
        }
        acc * half
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre over `panels` equal pieces of a segment.
pub fn composite<F: FnMut(C64) -> C64>(
    rule: &GaussLegendre,
    a: C64,
    b: C64,
    panels: usize,
    mut f: F,
) -> C64 {
    let mut acc = NeumaierSum::new();
    let step = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + step * p as f64;
        acc.add(rule.segment(lo, lo + step, &mut f));
    }
    acc.value()
}

/// Composite rule with the panel count doubled until successive values
/// differ by less than `tol` (absolute, scaled by max(1, |I|)).
pub fn integrate_doubling<F: FnMut(C64) -> C64>(
    a: C64,
    b: C64,
    start_panels: usize,
    tol: f64,
    max_panels: usize,
    mut f: F,
) -> Result<C64> {
    let rule = GaussLegendre::cached(64);
    let mut panels = start_panels.max(1);
    let mut prev = composite(rule, a, b, panels, &mut f);
    while panels < max_panels {
        panels *= 2;
        let next = composite(rule, a, b, panels, &mut f);
        if (next - prev).norm() <= tol * next.norm().max(1.0) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature(format!(
        "no convergence with {panels} panels on segment {a} -> {b}"
    )))
}

/// Adaptive bisection on a segment using a 16-node rule per piece.
pub fn integrate_adaptive<F: FnMut(C64) -> C64>(a: C64, b: C64, tol: f64, mut f: F) -> Result<C64> {
    let rule = GaussLegendre::cached(16);
    let whole = rule.segment(a, b, &mut f);
    let mut acc = NeumaierSum::new();
    let mut ok = true;
    adapt(rule, a, b, whole, tol, 0, &mut f, &mut acc, &mut ok);
    if ok {
        Ok(acc.value())
    } else {
        Err(Error::Quadrature(format!("adaptive depth exceeded on {a} -> {b}")))
    }
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: FnMut(C64) -> C64>(
    rule: &GaussLegendre,
    a: C64,
    b: C64,
    whole: C64,
    tol: f64,
    depth: usize,
    f: &mut F,
    acc: &mut NeumaierSum,
    ok: &mut bool,
) {
    let m = (a + b) * 0.5;
    let left = rule.segment(a, m, &mut *f);
    let right = rule.segment(m, b, &mut *f);
    let both = left + right;
    if (both - whole).norm() <= tol || depth >= 48 {
        if depth >= 48 {
            *ok = false;
        }
        acc.add(both);
        return;
    }
    adapt(rule, a, m, left, 0.5 * tol, depth + 1, f, acc, ok);
    adapt(rule, m, b, right, 0.5 * tol, depth + 1, f, acc, ok);
}

/// Neumaier's compensated summation for complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    re: (f64, f64),
    im: (f64, f64),
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: C64) {
        neumaier_step(&mut self.re, z.re);
        neumaier_step(&mut self.im, z.im);
    }

    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(C64::new(other.re.0, other.im.0));
        self.add(C64::new(other.re.1, other.im.1));
    }

    pub fn value(&self) -> C64 {
        C64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

#[inline]
fn neumaier_step(state: &mut (f64, f64), x: f64) {
    let (sum, comp) = *state;
    let t = sum + x;
    let c = if sum.abs() >= x.abs() {
        (sum - t) + x
    } else {
        (x - t) + sum
    };
    *state = (t, comp + c);
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Complex Gamma function (Lanczos, with reflection).
pub fn gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return C64::from(PI) / (s * gamma(C64::new(1.0, 0.0) - z));
    }
    let z = z - 1.0;
    let mut x = C64::from(LANCZOS[0]);
    for (i, p) in LANCZOS.iter().enumerate().skip(1) {
        x += *p / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

pub fn gamma_real(x: f64) -> f64 {
    gamma(C64::from(x)).re
}

/// Modified Bessel function K_nu(x) for real x > 0 and complex order, from
/// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt on 16-node composite
/// panels; the upper limit is where the integrand drops below 1e-20.
/// The result is compared against a run with doubled panels.
pub fn bessel_k(nu: C64, x: f64, panels: usize) -> Result<C64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("bessel_k needs x > 0, got {x}")));
    }
    let a = nu.re.abs();
    // stop once exp(-x (cosh t - 1) + a t) is below about 1e-20
    let mut t_max: f64 = 1.0;
    while x * (t_max.cosh() - 1.0) - a * t_max < 47.0 && t_max < 700.0 {
        t_max *= 1.25;
    }
    let coarse = bessel_k_panels(nu, x, t_max, panels);
    let fine = bessel_k_panels(nu, x, t_max, 2 * panels);
    let scale = fine.norm().max(1e-300);
    if (fine - coarse).norm() > 1e-9 * scale {
        return Err(Error::Quadrature(format!(
            "Bessel K_{nu}({x}) unstable under panel doubling"
        )));
    }
    Ok(fine * (-x).exp())
}

fn bessel_k_panels(nu: C64, x: f64, t_max: f64, panels: usize) -> C64 {
    let rule = GaussLegendre::cached(16);
    let h = t_max / panels as f64;
    let mut acc = NeumaierSum::new();
    for p in 0..panels {
        let a = h * p as f64;
        let mid = a + 0.5 * h;
        for (u, w) in rule.nodes.iter().zip(&rule.weights) {
            let t = mid + 0.5 * h * u;
            let weight = (-x * (t.cosh() - 1.0)).exp();
            acc.add((nu * t).cosh() * (weight * w * 0.5 * h));
        }
    }
    acc.value()
}

/// Generalised hypergeometric series pFq at real argument |z| < 1,
/// summed until terms fall below 1e-17 relative.
pub fn hypergeometric(a: &[f64], b: &[f64], z: f64) -> Result<f64> {
    if z.abs() >= 1.0 {
        return Err(Error::InvalidArgument(format!("hypergeometric series needs |z| < 1, got {z}")));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut comp = 0.0;
    for n in 0..2_000_000u64 {
        let nf = n as f64;
        let mut ratio = z / (nf + 1.0);
        for ai in a {
            ratio *= ai + nf;
        }
        for bi in b {
            ratio /= bi + nf;
        }
        term *= ratio;
        let t = sum + term;
        comp += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
        sum = t;
        if term.abs() < 1e-17 * sum.abs() && n > 4 {
            return Ok(sum + comp);
        }
    }
    Err(Error::Quadrature(format!("hypergeometric series did not converge at z = {z}")))
}

/// Jacobi theta_2 and theta_3 at nome q in (0, 1).
pub fn theta2_theta3(q: f64) -> (f64, f64) {
    let mut t2 = 0.0;
    let mut t3 = 1.0;
    for n in 0..10_000 {
        let nf = n as f64;
        let a = q.powf((nf + 0.5) * (nf + 0.5));
        t2 += 2.0 * a;
        if n > 0 {
            t3 += 2.0 * q.powf(nf * nf);
        }
        if a < 1e-300 || a < 1e-18 * t2 {
            break;
        }
    }
    (t2, t3)
}

/// Binomial coefficient as f64.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// e(x) = exp(2 pi i x) for complex x.
#[inline]
pub fn e(z: C64) -> C64 {
    (z * (2.0 * PI) * I).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let g = GaussLegendre::new(16);
        let v = g.interval(0.0, 1.0, |x| x.powi(31));
        assert!((v - 1.0 / 32.0).abs() < 1e-15);
        let sum: f64 = g.weights.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gamma_known_values() {
        assert!((gamma_real(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma_real(0.5) - PI.sqrt()).abs() < 1e-14);
        let g = gamma(C64::new(0.5, 1.0));
        // reference from mpmath
        assert!((g - C64::new(0.300_694_617_260_656, -0.424_967_879_433_124)).norm() < 1e-13);
    }

    #[test]
    fn bessel_k_half_order_closed_form() {
        for &x in &[0.1, 1.0, 6.0, 40.0] {
            let k = bessel_k(C64::new(0.5, 0.0), x, 16).unwrap();
            let exact = (PI / (2.0 * x)).sqrt() * (-x).exp();
            assert!((k.re - exact).abs() < 1e-12 * exact, "x={x}: {k} vs {exact}");
        }
    }

    #[test]
    fn neumaier_recovers_cancellation() {
        let mut s = NeumaierSum::new();
        s.add(C64::new(1e16, 0.0));
        s.add(C64::new(1.0, 0.0));
        s.add(C64::new(-1e16, 0.0));
        assert_eq!(s.value().re, 1.0);
    }

    #[test]
    fn hypergeometric_matches_elementary() {
        // 2F1(1,1;2;z) = -log(1-z)/z
        let z = 0.7;
        let v = hypergeometric(&[1.0, 1.0], &[2.0], z).unwrap();
        assert!((v - (-(1.0f64 - z).ln() / z)).abs() < 1e-14);
    }

    #[test]
    fn theta_identity() {
        // theta_3^4 = theta_2^4 + theta_4^4 implies lambda(i) = 1/2
        let (t2, t3) = theta2_theta3((-PI).exp());
        assert!(((t2 / t3).powi(4) - 0.5).abs() < 1e-15);
    }
}
