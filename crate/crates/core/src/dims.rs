//! Exact dimensions of first- and second-order spaces of modular forms and
//! of the associated parabolic cohomology, together with the natural bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceKind {
    S,
    M,
    E,
    S2,
    M2,
    H1Shriek,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimReport {
    pub kind: SpaceKind,
    pub weight: i64,
    pub value: u64,
    pub formula_path: String,
    pub bounds: Option<(u64, u64)>,
}

fn check(ctx: &GroupContext, k: i64) -> Result<()> {
    if k % 2 != 0 {
        return Err(Error::UnsupportedWeight(k));
    }
    if ctx.cusp_count == 0 {
        return Err(Error::CompactQuotient);
    }
    Ok(())
}

/// dim S_k for k ≥ 4, with the elliptic contribution floored term by term.
fn cusp_dim_high(ctx: &GroupContext, k: i64) -> i64 {
    let g = ctx.genus as i64;
    let p = ctx.cusp_count as i64;
    let ell: i64 = ctx
        .elliptic_orders
        .iter()
        .map(|&e| (k * (e as i64 - 1)).div_euclid(2 * e as i64))
        .sum();
    (k - 1) * (g - 1) + (k / 2 - 1) * p + ell
}

/// dim S_k, M_k or E_k.
pub fn dim_first_order(ctx: &GroupContext, k: i64, kind: SpaceKind) -> Result<u64> {
    check(ctx, k)?;
    let g = ctx.genus as i64;
    let p = ctx.cusp_count as i64;
    let (s, m) = match k {
        k if k < 0 => (0, 0),
        0 => (0, 1),
        2 => (g, g + p - 1),
        _ => {
            let s = cusp_dim_high(ctx, k);
            (s, s + p)
        }
    };
    let v = match kind {
        SpaceKind::S => s,
        SpaceKind::M => m,
        SpaceKind::E => m - s,
        _ => return Err(Error::InvalidArgument(format!("{kind:?} is not a first-order space"))),
    };
    Ok(v.max(0) as u64)
}

/// dim S²_k or M²_k.
pub fn dim_second_order(ctx: &GroupContext, k: i64, kind: SpaceKind) -> Result<u64> {
    check(ctx, k)?;
    let g = ctx.genus;
    match kind {
        SpaceKind::S2 => {
            let s = dim_first_order(ctx, k, SpaceKind::S)?;
            Ok(match k {
                k if k <= 0 => 0,
                2 if s == 0 => 0,
                2 => (2 * g + 1) * s - 1,
                _ => (2 * g + 1) * s,
            })
        }
        SpaceKind::M2 => Ok(match k {
            k if k <= -2 => 0,
            0 => g + 1,
            _ => (2 * g + 1) * dim_first_order(ctx, k, SpaceKind::M)?,
        }),
        _ => Err(Error::InvalidArgument(format!("{kind:?} is not a second-order space"))),
    }
}

/// dim H¹_! from the quotient dimensions; for k ≥ 4 the value is checked
/// against 2g(dim M_k + dim S_k).
pub fn dim_cohomology(ctx: &GroupContext, k: i64) -> Result<u64> {
    check(ctx, k)?;
    if k < 2 {
        return Err(Error::UnsupportedWeight(k));
    }
    let (v, _) = cohomology_two_ways(ctx, k)?;
    Ok(v)
}

/// (quotient sum, 2g(M+S)); the second entry is `None` for k = 2 with g = 0,
/// where only the constant summand survives.
pub fn cohomology_two_ways(ctx: &GroupContext, k: i64) -> Result<(u64, Option<u64>)> {
    check(ctx, k)?;
    if k < 2 {
        return Err(Error::UnsupportedWeight(k));
    }
    let s = dim_first_order(ctx, k, SpaceKind::S)?;
    let m = dim_first_order(ctx, k, SpaceKind::M)?;
    let s2 = dim_second_order(ctx, k, SpaceKind::S2)?;
    let m2 = dim_second_order(ctx, k, SpaceKind::M2)?;
    let mut v = (m2 - m) + (s2 - s);
    if k == 2 {
        v += 1;
    }
    let other = if k >= 4 || ctx.genus > 0 { Some(2 * ctx.genus * (m + s)) } else { None };
    if let Some(o) = other {
        if o != v {
            return Err(Error::InvalidArgument(format!(
                "cohomology mismatch at k={k}: quotient sum {v} vs 2g(M+S) {o}"
            )));
        }
    }
    Ok((v, other))
}

/// Lower (g+1)·dim and upper (2g+1)·dim bounds for S²_k and M²_k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub s2: (u64, u64),
    pub m2: (u64, u64),
}

pub fn bounds_report(ctx: &GroupContext, k: i64) -> Result<Bounds> {
    check(ctx, k)?;
    let g = ctx.genus;
    let s = if k >= 0 { dim_first_order(ctx, k, SpaceKind::S)? } else { 0 };
    let m = if k >= 0 { dim_first_order(ctx, k, SpaceKind::M)? } else { 0 };
    Ok(Bounds { s2: ((g + 1) * s, (2 * g + 1) * s), m2: ((g + 1) * m, (2 * g + 1) * m) })
}

/// Full report for one space.
pub fn dim_report(ctx: &GroupContext, k: i64, kind: SpaceKind) -> Result<DimReport> {
    check(ctx, k)?;
    let g = ctx.genus;
    let (value, path, bounds) = match kind {
        SpaceKind::S | SpaceKind::M | SpaceKind::E => {
            let path = match k {
                k if k < 0 => "negative weight: zero space",
                0 => "weight 0: constants",
                2 => "weight 2: dim S = g, dim M = g + p - 1",
                _ => "k >= 4: (k-1)(g-1) + (k/2-1)p + sum floor(k(e-1)/(2e))",
            };
            (dim_first_order(ctx, k, kind)?, path.to_string(), None)
        }
        SpaceKind::S2 => {
            let b = bounds_report(ctx, k)?.s2;
            let path = match k {
                k if k <= 0 => "k <= 0: zero",
                2 if dim_first_order(ctx, 2, SpaceKind::S)? == 0 => "k = 2, dim S_2 = 0: zero",
                2 => "k = 2: (2g+1) dim S_2 - 1, one below the upper bound",
                _ => "k >= 4: (2g+1) dim S_k, the upper bound",
            };
            (dim_second_order(ctx, k, kind)?, path.to_string(), Some(b))
        }
        SpaceKind::M2 => {
            let b = bounds_report(ctx, k)?.m2;
            let path = match k {
                k if k <= -2 => "k <= -2: zero",
                0 => "k = 0: g + 1",
                _ => "k >= 2: (2g+1) dim M_k",
            };
            let bounds = if k == 0 { None } else { Some(b) };
            (dim_second_order(ctx, k, kind)?, path.to_string(), bounds)
        }
        SpaceKind::H1Shriek => {
            let path = if k == 2 && g == 0 {
                "k = 2, g = 0: only the constant summand contributes (degenerate case, formula applied literally)"
            } else if k == 2 {
                "k = 2: (M2 - M) + (S2 - S) + 1"
            } else {
                "k >= 4: (M2 - M) + (S2 - S), equal to 2g(M + S)"
            };
            (dim_cohomology(ctx, k)?, path.to_string(), None)
        }
    };
    Ok(DimReport { kind, weight: k, value, formula_path: path, bounds })
}

/// One row of the CLI dimension table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimRow {
    #[serde(rename = "N")]
    pub level: u64,
    pub k: i64,
    #[serde(rename = "S")]
    pub s: u64,
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "E")]
    pub e: u64,
    #[serde(rename = "S2")]
    pub s2: u64,
    #[serde(rename = "M2")]
    pub m2: u64,
    #[serde(rename = "H1")]
    pub h1: Option<u64>,
    pub lower: u64,
    pub upper: u64,
}

pub fn dim_row(ctx: &GroupContext, k: i64) -> Result<DimRow> {
    let b = bounds_report(ctx, k)?;
    Ok(DimRow {
        level: ctx.level,
        k,
        s: dim_first_order(ctx, k, SpaceKind::S)?,
        m: dim_first_order(ctx, k, SpaceKind::M)?,
        e: dim_first_order(ctx, k, SpaceKind::E)?,
        s2: dim_second_order(ctx, k, SpaceKind::S2)?,
        m2: dim_second_order(ctx, k, SpaceKind::M2)?,
        h1: if k >= 2 { Some(dim_cohomology(ctx, k)?) } else { None },
        lower: b.s2.0,
        upper: b.s2.1,
    })
}
