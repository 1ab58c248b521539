//! Congruence-group geometry for Γ₀(N) and the theta group Γ_θ:
//! membership, invariants, cusps with scaling matrices, and enumeration of
//! coset representatives for truncated automorphic sums.

use std::fmt;

use num_complex::Complex64 as C64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer 2×2 matrix of determinant 1, identified with its negative.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl PartialEq for Mat2 {
    fn eq(&self, o: &Self) -> bool {
        (self.a == o.a && self.b == o.b && self.c == o.c && self.d == o.d)
            || (self.a == -o.a && self.b == -o.b && self.c == -o.c && self.d == -o.d)
    }
}

impl Eq for Mat2 {}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};{},{})", self.a, self.b, self.c, self.d)
    }
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1, b: 0, c: 0, d: 1 };
    pub const S: Mat2 = Mat2 { a: 0, b: -1, c: 1, d: 0 };

    /// Checked constructor: the determinant must be 1.
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let m = Mat2 { a, b, c, d };
        if m.det() != 1 {
            return Err(Error::InvalidArgument(format!("det {m} = {} != 1", m.det())));
        }
        Ok(m)
    }

    pub const fn t(n: i64) -> Mat2 {
        Mat2 { a: 1, b: n, c: 0, d: 1 }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> Mat2 {
        Mat2 { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn neg(&self) -> Mat2 {
        Mat2 { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    /// Sign-normalised representative: c > 0, or c = 0 and d > 0.
    pub fn canonical(&self) -> Mat2 {
        if self.c < 0 || (self.c == 0 && self.d < 0) {
            self.neg()
        } else {
            *self
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat2::IDENTITY
    }

    /// Möbius action on the upper half-plane.
    pub fn act(&self, z: C64) -> C64 {
        (z * self.a as f64 + self.b as f64) / (z * self.c as f64 + self.d as f64)
    }

    /// Automorphy factor j(γ, z) = cz + d.
    pub fn j(&self, z: C64) -> C64 {
        z * self.c as f64 + self.d as f64
    }

    /// Parse "a,b,c,d".
    pub fn parse(s: &str) -> Result<Mat2> {
        let parts: Vec<i64> = s
            .split(',')
            .map(|p| p.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidArgument(format!("matrix '{s}': {e}")))?;
        if parts.len() != 4 {
            return Err(Error::InvalidArgument(format!("matrix '{s}' needs four entries")));
        }
        Mat2::new(parts[0], parts[1], parts[2], parts[3])
    }
}

/// True iff |trace| = 2 and M ≠ ±I.
pub fn is_parabolic(m: &Mat2) -> bool {
    m.trace().abs() == 2 && !m.is_identity()
}

/// Cusp representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cusp {
    Infinity,
    Rational { num: i64, den: i64 },
}

/// σ = A·diag(√w, 1/√w) with A ∈ SL₂(ℤ). Stored as the integer matrix and
/// the width so membership tests stay exact; the square root only enters
/// when acting on points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingMatrix {
    pub base: Mat2,
    pub width: u64,
}

impl ScalingMatrix {
    pub fn apply(&self, z: C64) -> C64 {
        self.base.act(z * self.width as f64)
    }

    pub fn apply_inverse(&self, z: C64) -> C64 {
        self.base.inverse().act(z) / self.width as f64
    }

    /// j(σ, z).
    pub fn j(&self, z: C64) -> C64 {
        self.base.j(z * self.width as f64) / (self.width as f64).sqrt()
    }

    /// j(σ⁻¹, z).
    pub fn j_inverse(&self, z: C64) -> C64 {
        self.base.inverse().j(z) * (self.width as f64).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuspData {
    pub label: String,
    pub representative: Cusp,
    pub width: u64,
    pub scaling: ScalingMatrix,
    /// Cusps listed for bookkeeping but not usable as a series base.
    pub series_supported: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    Gamma0,
    Theta,
    Custom,
}

/// Group invariants plus cusp data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupContext {
    pub kind: GroupKind,
    pub level: u64,
    /// Index in PSL₂(ℤ); 0 for custom signatures.
    pub index: u64,
    pub genus: u64,
    pub cusp_count: u64,
    pub cusps: Vec<CuspData>,
    pub elliptic_orders: Vec<u32>,
    pub hyperbolic_generators: u64,
}

impl GroupContext {
    pub fn cusp(&self, label: &str) -> Result<&CuspData> {
        let want = normalise_label(label);
        self.cusps
            .iter()
            .find(|c| c.label == want)
            .ok_or_else(|| Error::UnsupportedCusp(label.to_string()))
    }

    pub fn nu2(&self) -> usize {
        self.elliptic_orders.iter().filter(|&&e| e == 2).count()
    }

    pub fn nu3(&self) -> usize {
        self.elliptic_orders.iter().filter(|&&e| e == 3).count()
    }

    /// Width of the cusp at infinity (translation step of Γ_∞ ∩ Γ).
    pub fn infinity_width(&self) -> u64 {
        match self.kind {
            GroupKind::Theta => 2,
            _ => 1,
        }
    }

    /// Presentation data only: genus, cusp count and elliptic orders.
    pub fn from_signature(genus: u64, cusps: u64, elliptic_orders: Vec<u32>) -> Result<Self> {
        if cusps == 0 {
            return Err(Error::CompactQuotient);
        }
        if elliptic_orders.iter().any(|&e| e < 2) {
            return Err(Error::InvalidArgument("elliptic orders must be >= 2".into()));
        }
        let chi = 2.0 * genus as f64 - 2.0
            + cusps as f64
            + elliptic_orders.iter().map(|&e| 1.0 - 1.0 / e as f64).sum::<f64>();
        if chi <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "signature (g={genus}, p={cusps}, e={elliptic_orders:?}) is not hyperbolic"
            )));
        }
        Ok(Self {
            kind: GroupKind::Custom,
            level: 0,
            index: 0,
            genus,
            cusp_count: cusps,
            cusps: Vec::new(),
            elliptic_orders,
            hyperbolic_generators: 2 * genus,
        })
    }
}

fn normalise_label(label: &str) -> String {
    match label.trim() {
        "∞" | "infinity" | "Infinity" | "oo" | "i∞" => "inf".to_string(),
        other => other.to_string(),
    }
}

pub fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    prime_factors(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Extended gcd: returns (g, x, y) with a·x + b·y = g ≥ 0.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Complete a coprime bottom row (c, d) to an element of SL₂(ℤ).
pub fn complete_row(c: i64, d: i64) -> Result<Mat2> {
    let (g, x, y) = ext_gcd(d, c);
    if g != 1 {
        return Err(Error::InvalidArgument(format!("row ({c},{d}) is not coprime")));
    }
    // x·d + y·c = 1, so (x, -y; c, d) has determinant 1
    Mat2::new(x, -y, c, d)
}

/// Invariants of Γ₀(N).
pub fn gamma0_context(n: u64) -> Result<GroupContext> {
    if n == 0 {
        return Err(Error::InvalidArgument("level must be positive".into()));
    }
    let fac = prime_factors(n);
    let index = fac.iter().fold(n, |acc, &(p, _)| acc / p * (p + 1));
    let nu2 = if n % 4 == 0 {
        0
    } else {
        fac.iter().fold(1i64, |acc, &(p, _)| {
            acc * (1 + match p {
                2 => 0,
                _ if p % 4 == 1 => 1,
                _ => -1,
            })
        })
    } as u64;
    let nu3 = if n % 9 == 0 {
        0
    } else {
        fac.iter().fold(1i64, |acc, &(p, _)| {
            acc * (1 + match p {
                3 => 0,
                _ if p % 3 == 1 => 1,
                _ => -1,
            })
        })
    } as u64;

    let mut cusps = Vec::new();
    for v in divisors(n).into_iter().rev() {
        let g = v.gcd(&(n / v));
        let width = n / (v * v).gcd(&n);
        if v == n {
            cusps.push(CuspData {
                label: "inf".into(),
                representative: Cusp::Infinity,
                width: 1,
                scaling: ScalingMatrix { base: Mat2::IDENTITY, width: 1 },
                series_supported: true,
            });
            continue;
        }
        if v == 1 {
            cusps.push(CuspData {
                label: "0".into(),
                representative: Cusp::Rational { num: 0, den: 1 },
                width,
                scaling: ScalingMatrix { base: Mat2::S, width },
                series_supported: true,
            });
            continue;
        }
        for r in 0..g {
            if r.gcd(&g) != 1 {
                continue;
            }
            // lift r to a numerator coprime to v
            let mut a = if r == 0 { g } else { r };
            while a.gcd(&v) != 1 {
                a += g;
            }
            let (_, x, y) = ext_gcd(a as i64, v as i64);
            // a·x + v·y = 1: base (a, -y; v, x)
            let base = Mat2::new(a as i64, -y, v as i64, x)?;
            cusps.push(CuspData {
                label: format!("{a}/{v}"),
                representative: Cusp::Rational { num: a as i64, den: v as i64 },
                width,
                scaling: ScalingMatrix { base, width },
                series_supported: true,
            });
        }
    }
    // infinity first, then 0, then the rest by denominator
    cusps.sort_by_key(|c| match c.representative {
        Cusp::Infinity => (0, 0, 0),
        Cusp::Rational { num, den } => (1, den, num),
    });
    let p = cusps.len() as u64;
    let twelve_g = 12 + index as i64 - 3 * nu2 as i64 - 4 * nu3 as i64 - 6 * p as i64;
    debug_assert!(twelve_g % 12 == 0 && twelve_g >= 0);
    let genus = (twelve_g / 12) as u64;
    let mut elliptic_orders = vec![2; nu2 as usize];
    elliptic_orders.extend(std::iter::repeat_n(3, nu3 as usize));
    Ok(GroupContext {
        kind: GroupKind::Gamma0,
        level: n,
        index,
        genus,
        cusp_count: p,
        cusps,
        elliptic_orders,
        hyperbolic_generators: 2 * genus,
    })
}

/// The theta group, generated by T² and S.
pub fn theta_context() -> GroupContext {
    GroupContext {
        kind: GroupKind::Theta,
        level: 2,
        index: 3,
        genus: 0,
        cusp_count: 2,
        cusps: vec![
            CuspData {
                label: "inf".into(),
                representative: Cusp::Infinity,
                width: 2,
                scaling: ScalingMatrix { base: Mat2::IDENTITY, width: 2 },
                series_supported: true,
            },
            CuspData {
                label: "1".into(),
                representative: Cusp::Rational { num: 1, den: 1 },
                width: 1,
                scaling: ScalingMatrix { base: Mat2 { a: 1, b: 0, c: 1, d: 1 }, width: 1 },
                series_supported: false,
            },
        ],
        elliptic_orders: vec![2],
        hyperbolic_generators: 0,
    }
}

/// Membership test.
pub fn is_member(ctx: &GroupContext, m: &Mat2) -> bool {
    if m.det() != 1 {
        return false;
    }
    match ctx.kind {
        GroupKind::Gamma0 => m.c.rem_euclid(ctx.level as i64) == 0,
        GroupKind::Theta => {
            let r = |x: i64| x.rem_euclid(2);
            let id = r(m.a) == 1 && r(m.b) == 0 && r(m.c) == 0 && r(m.d) == 1;
            let anti = r(m.a) == 0 && r(m.b) == 1 && r(m.c) == 1 && r(m.d) == 0;
            id || anti
        }
        GroupKind::Custom => false,
    }
}

/// Letters of words in the theta-group generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThetaLetter {
    T2,
    T2Inv,
    S,
    SInv,
}

impl ThetaLetter {
    pub fn matrix(self) -> Mat2 {
        match self {
            ThetaLetter::T2 => Mat2::t(2),
            ThetaLetter::T2Inv => Mat2::t(-2),
            ThetaLetter::S => Mat2::S,
            ThetaLetter::SInv => Mat2::S.inverse(),
        }
    }
}

pub fn theta_word(letters: &[ThetaLetter]) -> Result<Mat2> {
    if letters.is_empty() {
        return Err(Error::InvalidArgument("empty word".into()));
    }
    Ok(letters.iter().fold(Mat2::IDENTITY, |acc, l| acc.mul(&l.matrix())))
}

/// One double-coset representative: bottom row (c, d) of the frame matrix
/// M = A⁻¹γ (A the integral part of σ_a) and the group element γ = A·M.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosetRep {
    pub frame: Mat2,
    pub gamma: Mat2,
}

impl CosetRep {
    pub fn c(&self) -> i64 {
        self.frame.c
    }
    pub fn d(&self) -> i64 {
        self.frame.d
    }
}

/// Representatives of Γ_a\Γ/Γ_∞ with 0 ≤ c ≤ C_max, ordered by c then d.
/// Every left coset Γ_a γ with |c| ≤ C_max is `rep·T^{h n}` for exactly one
/// listed rep and one integer n, h being [`CosetEnumeration::translation`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosetEnumeration {
    pub cusp: String,
    pub width: u64,
    pub scaling: ScalingMatrix,
    pub translation: i64,
    pub c_max: u64,
    pub complete: bool,
    pub reps: Vec<CosetRep>,
}

pub fn coset_reps(ctx: &GroupContext, cusp: &str, c_max: u64) -> Result<CosetEnumeration> {
    let cd = ctx.cusp(cusp)?;
    if !cd.series_supported || ctx.kind == GroupKind::Custom {
        return Err(Error::UnsupportedCusp(cusp.to_string()));
    }
    let h = ctx.infinity_width() as i64;
    let base = cd.scaling.base;
    let w = cd.width as i64;
    let mut reps = Vec::new();
    for c in 0..=c_max as i64 {
        let residues: Vec<i64> = if c == 0 { vec![1] } else { (0..h * c).collect() };
        for d in residues {
            if c > 0 && c.gcd(&d) != 1 {
                continue;
            }
            let m0 = complete_row(c, d)?;
            for t in 0..w.max(1) {
                let m = Mat2::t(t).mul(&m0);
                let g = base.mul(&m);
                if is_member(ctx, &g) {
                    reps.push(CosetRep { frame: m, gamma: g });
                    break;
                }
            }
        }
    }
    Ok(CosetEnumeration {
        cusp: cd.label.clone(),
        width: cd.width,
        scaling: cd.scaling,
        translation: h,
        c_max,
        complete: true,
        reps,
    })
}

/// Group invariants recomputed from the permutation action of S and T on
/// P¹(ℤ/N) (the right cosets of Γ₀(N) in SL₂(ℤ)), with the genus from
/// Riemann–Hurwitz. Independent of the closed-form invariants above.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PermutationInvariants {
    pub index: u64,
    pub genus: u64,
    pub cusps: u64,
    pub nu2: u64,
    pub nu3: u64,
}

pub fn permutation_invariants(n: u64) -> PermutationInvariants {
    let n = n as i64;
    let units: Vec<i64> = (1..=n.max(1)).filter(|u| u.gcd(&n) == 1).map(|u| u % n.max(1)).collect();
    let mut class = vec![usize::MAX; (n * n) as usize];
    let mut count = 0usize;
    let idx = |c: i64, d: i64| (c.rem_euclid(n) * n + d.rem_euclid(n)) as usize;
    for c in 0..n {
        for d in 0..n {
            if c.gcd(&d).gcd(&n) != 1 || class[idx(c, d)] != usize::MAX {
                continue;
            }
            for &u in &units {
                class[idx(u * c, u * d)] = count;
            }
            count += 1;
        }
    }
    if n == 1 {
        count = 1;
        class = vec![0];
    }
    let perm = |f: &dyn Fn(i64, i64) -> (i64, i64)| -> Vec<usize> {
        let mut p = vec![usize::MAX; count];
        for c in 0..n {
            for d in 0..n {
                let k = class[idx(c, d)];
                if k == usize::MAX || p[k] != usize::MAX {
                    continue;
                }
                let (c2, d2) = f(c, d);
                p[k] = class[idx(c2, d2)];
            }
        }
        p
    };
    let s = perm(&|c, d| (d, -c));
    let t = perm(&|c, d| (c, c + d));
    let st: Vec<usize> = (0..count).map(|k| t[s[k]]).collect();
    let cycles = |p: &[usize]| -> (u64, u64) {
        let mut seen = vec![false; p.len()];
        let (mut cyc, mut fixed) = (0, 0);
        for i in 0..p.len() {
            if seen[i] {
                continue;
            }
            cyc += 1;
            if p[i] == i {
                fixed += 1;
            }
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = p[j];
            }
        }
        (cyc, fixed)
    };
    let (cs, fs) = cycles(&s);
    let (cst, fst) = cycles(&st);
    let (ct, _) = cycles(&t);
    let mu = count as i64;
    let two_minus_2g = cs as i64 + cst as i64 + ct as i64 - mu;
    PermutationInvariants {
        index: count as u64,
        genus: ((2 - two_minus_2g) / 2) as u64,
        cusps: ct,
        nu2: fs,
        nu3: fst,
    }
}

/// Seeded sample of group elements with 1 ≤ |c| ≤ c_bound, built from random
/// words in T^{±1,±2,±3} and S (T² and S for the theta group) and kept when
/// they land in the group.
pub fn sample_elements(ctx: &GroupContext, seed: u64, count: usize, c_bound: i64) -> Vec<Mat2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut guard = 0u64;
    while out.len() < count && guard < 50_000_000 {
        guard += 1;
        let len = rng.gen_range(2..=10);
        let mut m = Mat2::IDENTITY;
        for _ in 0..len {
            let letter = if rng.gen_bool(0.5) {
                Mat2::S
            } else {
                let e = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
                match ctx.kind {
                    GroupKind::Theta => Mat2::t(2 * e),
                    _ => Mat2::t(e),
                }
            };
            m = m.mul(&letter);
        }
        // right-multiply by a random translation to spread the top row
        if ctx.kind == GroupKind::Gamma0 {
            m = m.mul(&Mat2::t(rng.gen_range(-2..=2)));
        }
        let m = m.canonical();
        if m.c != 0 && m.c.abs() <= c_bound && is_member(ctx, &m) && !out.contains(&m) {
            out.push(m);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn level_one_eleven_two() {
        let g = gamma0_context(1).unwrap();
        assert_eq!((g.index, g.genus, g.cusp_count, g.nu2(), g.nu3()), (1, 0, 1, 1, 1));
        let g = gamma0_context(11).unwrap();
        assert_eq!((g.index, g.genus, g.cusp_count, g.nu2(), g.nu3()), (12, 1, 2, 0, 0));
        let g = gamma0_context(2).unwrap();
        assert_eq!((g.index, g.genus, g.cusp_count, g.nu2(), g.nu3()), (3, 0, 2, 1, 0));
    }

    #[test]
    fn coset_counts() {
        let g1 = gamma0_context(1).unwrap();
        let e = coset_reps(&g1, "inf", 1).unwrap();
        let rows: Vec<(i64, i64)> = e.reps.iter().map(|r| (r.c(), r.d())).collect();
        assert_eq!(rows, vec![(0, 1), (1, 0)]);
        assert_eq!(coset_reps(&g1, "inf", 10).unwrap().reps.len(), 33);
        let g11 = gamma0_context(11).unwrap();
        assert_eq!(coset_reps(&g11, "inf", 22).unwrap().reps.len(), 21);
    }

    #[test]
    fn membership_examples() {
        let g11 = gamma0_context(11).unwrap();
        assert!(is_member(&g11, &Mat2::new(4, -1, 33, -8).unwrap()));
        assert!(!is_member(&g11, &Mat2::S));
        assert!(is_member(&theta_context(), &Mat2::t(2)));
        assert!(!is_member(&theta_context(), &Mat2::t(1)));
    }

    #[test]
    fn parabolic_examples() {
        assert!(is_parabolic(&Mat2::t(1)));
        assert!(is_parabolic(&Mat2::new(1, 0, 11, 1).unwrap()));
        assert!(!is_parabolic(&Mat2::S));
        assert!(!is_parabolic(&Mat2::IDENTITY));
    }

    #[test]
    fn theta_words() {
        use ThetaLetter::*;
        assert_eq!(theta_word(&[T2]).unwrap(), Mat2::t(2));
        assert_eq!(theta_word(&[S]).unwrap(), Mat2::S);
        assert_eq!(theta_word(&[T2, S]).unwrap(), Mat2::new(2, -1, 1, 0).unwrap());
        assert!(theta_word(&[]).is_err());
    }

    #[test]
    fn theta_cusp_one_rejected() {
        let th = theta_context();
        assert!(matches!(coset_reps(&th, "1", 5), Err(Error::UnsupportedCusp(_))));
        assert!(matches!(coset_reps(&gamma0_context(11).unwrap(), "1/2", 5), Err(Error::UnsupportedCusp(_))));
    }

    #[test]
    fn scaling_matrices_conjugate_stabiliser_to_translation() {
        for n in [1u64, 4, 6, 11, 12, 18, 25, 36] {
            let ctx = gamma0_context(n).unwrap();
            for cusp in &ctx.cusps {
                let a = cusp.scaling.base;
                let w = cusp.width as i64;
                let gen = a.mul(&Mat2::t(w)).mul(&a.inverse());
                assert!(is_member(&ctx, &gen), "N={n} cusp {}", cusp.label);
                if w > 1 {
                    let smaller = a.mul(&Mat2::t(1)).mul(&a.inverse());
                    assert!(!is_member(&ctx, &smaller));
                }
                // sigma^-1 gen sigma acts as z -> z + 1
                let z = C64::new(0.3, 0.7);
                let moved = cusp.scaling.apply_inverse(gen.act(cusp.scaling.apply(z)));
                assert!((moved - (z + 1.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn genus_matches_permutation_oracle() {
        for n in 1..=60 {
            let ctx = gamma0_context(n).unwrap();
            let p = permutation_invariants(n);
            assert_eq!(p.index, ctx.index, "N={n}");
            assert_eq!(p.genus, ctx.genus, "N={n}");
            assert_eq!(p.cusps, ctx.cusp_count, "N={n}");
            assert_eq!(p.nu2 as usize, ctx.nu2(), "N={n}");
            assert_eq!(p.nu3 as usize, ctx.nu3(), "N={n}");
        }
    }

    #[test]
    fn sampled_elements_are_members() {
        let ctx = gamma0_context(11).unwrap();
        let els = sample_elements(&ctx, 7, 10, 200);
        assert_eq!(els.len(), 10);
        assert!(els.iter().all(|m| is_member(&ctx, m) && m.det() == 1));
        assert_eq!(els, sample_elements(&ctx, 7, 10, 200));
    }

    proptest! {
        #[test]
        fn reps_are_members_and_inequivalent(n in prop::sample::select(vec![1u64, 2, 5, 6, 11]), c_max in 1u64..30) {
            let ctx = gamma0_context(n).unwrap();
            for cusp in ctx.cusps.iter().map(|c| c.label.clone()) {
                let e = coset_reps(&ctx, &cusp, c_max).unwrap();
                for r in &e.reps {
                    prop_assert!(is_member(&ctx, &r.gamma));
                    prop_assert_eq!(e.scaling.base.mul(&r.frame), r.gamma);
                    prop_assert_eq!(r.frame.c.gcd(&r.frame.d), 1);
                }
                // no two reps are related by T^w on the left and T^h on the right
                for (i, x) in e.reps.iter().enumerate() {
                    for y in &e.reps[i + 1..] {
                        prop_assert!(!(x.c() == y.c() && (x.d() - y.d()).rem_euclid((e.translation * x.c()).max(1)) == 0));
                    }
                }
            }
        }

        #[test]
        fn mat_inverse_and_product(a in -20i64..20, b in -20i64..20) {
            let m = Mat2::t(a).mul(&Mat2::S).mul(&Mat2::t(b));
            prop_assert_eq!(m.det(), 1);
            prop_assert!(m.mul(&m.inverse()).is_identity());
        }
    }
}
