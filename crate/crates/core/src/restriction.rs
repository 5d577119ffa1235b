//! Restriction coefficients `A_{F|Sp6}(S) = Σ_{T₁ = S} A_F(T)` for the
//! Ikeda-type lift and the Eisenstein series.
//!
//! Each named index has a closed form (counts of octonion configurations
//! weighted by a few coefficient values) and can also be summed directly
//! over the fiber `{T : T₁ = S}`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{big_pow, sigma};
use crate::coeff::{eisenstein_from_profile, eisenstein_rank1, eisenstein_rank2, ikeda_from_profile, CoeffError, DiagonalProfile};
use crate::jordan::{HalfIntegralSym3, IntegralJordan, LocalData};
use crate::lattice::{
    count_half_shifted, count_imaginary, count_pairs_by_norm_sum, count_pairs_imaginary_product_norm,
    count_pairs_shifted_integral, count_pairs_shifted_shifted, count_pairs_with_norm_sum, fiber_fold, merge_counts,
    table_diag222, FiberMember, LatticeError,
};
use crate::qseries::{eisenstein_constants, EigenvalueTable, EisensteinConstants};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RestrictionError {
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("unknown index {0:?} (expected O, u2, u4, u6, W, S1, D:a, G or H)")]
    UnknownIndex(String),
    #[error("no closed form for index {index} and the {form} form")]
    NoClosedForm { index: String, form: &'static str },
    #[error("routes disagree at {index}: closed form {closed}, enumeration {enumerated}")]
    RoutesDisagree { index: String, closed: String, enumerated: String },
}

/// The index matrices used for the restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NamedIndex {
    O,
    U2,
    U4,
    U6,
    W,
    S1,
    D(u64),
    G,
    H,
}

impl NamedIndex {
    pub fn matrix(&self) -> HalfIntegralSym3 {
        match *self {
            NamedIndex::O => HalfIntegralSym3::diagonal(0, 0, 0),
            NamedIndex::U2 => HalfIntegralSym3::diagonal(1, 0, 0),
            NamedIndex::U4 => HalfIntegralSym3::diagonal(1, 1, 0),
            NamedIndex::U6 => HalfIntegralSym3::new([1, 1, 0], [1, 0, 0]),
            NamedIndex::W => HalfIntegralSym3::new([1, 1, 1], [1, 0, 0]),
            NamedIndex::S1 => HalfIntegralSym3::new([1, 1, 1], [1, 1, 1]),
            NamedIndex::D(a) => HalfIntegralSym3::diagonal(1, 1, a as i64),
            NamedIndex::G => HalfIntegralSym3::new([1, 2, 2], [1, 0, 0]),
            NamedIndex::H => HalfIntegralSym3::diagonal(2, 2, 2),
        }
    }

    pub fn all_fixed() -> [NamedIndex; 8] {
        use NamedIndex::*;
        [O, U2, U4, U6, W, S1, G, H]
    }
}

impl fmt::Display for NamedIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedIndex::O => write!(f, "O"),
            NamedIndex::U2 => write!(f, "u2"),
            NamedIndex::U4 => write!(f, "u4"),
            NamedIndex::U6 => write!(f, "u6"),
            NamedIndex::W => write!(f, "W"),
            NamedIndex::S1 => write!(f, "S1"),
            NamedIndex::D(a) => write!(f, "D:{a}"),
            NamedIndex::G => write!(f, "G"),
            NamedIndex::H => write!(f, "H"),
        }
    }
}

impl FromStr for NamedIndex {
    type Err = RestrictionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let parsed = match t {
            "O" => Some(NamedIndex::O),
            "u2" => Some(NamedIndex::U2),
            "u4" => Some(NamedIndex::U4),
            "u6" => Some(NamedIndex::U6),
            "W" => Some(NamedIndex::W),
            "S1" | "S" => Some(NamedIndex::S1),
            "G" => Some(NamedIndex::G),
            "H" => Some(NamedIndex::H),
            _ => t
                .strip_prefix("D:")
                .or_else(|| t.strip_prefix('D'))
                .and_then(|a| a.parse::<u64>().ok())
                .filter(|&a| a > 0)
                .map(NamedIndex::D),
        };
        parsed.ok_or_else(|| RestrictionError::UnknownIndex(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Closed,
    Enum,
    Both,
}

impl FromStr for Route {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "closed" => Ok(Route::Closed),
            "enum" => Ok(Route::Enum),
            "both" => Ok(Route::Both),
            _ => Err(format!("unknown route {s:?}")),
        }
    }
}

/// A restriction coefficient with whichever routes were evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub index: NamedIndex,
    pub value: BigRational,
    pub closed: Option<BigRational>,
    pub enumerated: Option<BigRational>,
}

impl Restriction {
    pub fn routes_agree(&self) -> Option<bool> {
        match (&self.closed, &self.enumerated) {
            (Some(a), Some(b)) => Some(a == b),
            _ => None,
        }
    }
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn combine(index: NamedIndex, closed: Option<BigRational>, enumerated: Option<BigRational>) -> Result<Restriction, RestrictionError> {
    if let (Some(a), Some(b)) = (&closed, &enumerated) {
        if a != b {
            return Err(RestrictionError::RoutesDisagree { index: index.to_string(), closed: a.to_string(), enumerated: b.to_string() });
        }
    }
    let value = closed.clone().or_else(|| enumerated.clone()).expect("at least one route");
    Ok(Restriction { index, value, closed, enumerated })
}

/// True when some pair of unit diagonal entries carries a ±½ off-diagonal
/// entry; cusp forms restrict to zero there.
pub fn has_half_unit_block(s: &HalfIntegralSym3) -> bool {
    let d = s.diag();
    let o = s.off_doubled();
    [(0, 1, 0), (0, 2, 1), (1, 2, 2)]
        .iter()
        .any(|&(i, j, k)| d[i] == 1 && d[j] == 1 && o[k].abs() == 1)
}

/// Ikeda-lift restriction by its closed form.
pub fn ikeda_closed(index: NamedIndex, weight: u32, eigen: &EigenvalueTable) -> Result<BigInt, RestrictionError> {
    if eigen.weight() + 8 != weight {
        return Err(CoeffError::WeightMismatch { weight, got: eigen.weight() }.into());
    }
    let a = |n: u64| -> Result<BigInt, RestrictionError> { Ok(eigen.get(n).map_err(CoeffError::from)?.clone()) };
    let s = index.matrix();
    if !s.is_pd() || has_half_unit_block(&s) {
        return Ok(BigInt::zero());
    }
    match index {
        NamedIndex::D(n) => {
            let mut acc = BigInt::zero();
            for k in 1..=n {
                acc += a(k)? * BigInt::from(count_pairs_by_norm_sum(n, n - k));
            }
            Ok(acc)
        }
        NamedIndex::G => {
            let half = BigInt::from(count_half_shifted(1));
            let e7 = BigInt::from(count_imaginary(1));
            Ok(&half * a(2)? + &half * e7 + BigInt::from(count_pairs_shifted_integral()))
        }
        NamedIndex::H => {
            let table = table_diag222();
            let col = |k: (u64, u64, u64)| BigInt::from(table.get(&k).cloned().unwrap_or_default());
            let a2 = a(2)?;
            let s = weight - 9;
            let mut acc = &a2 * &a2 * &a2 + BigInt::from(270) * big_pow(2, s) * &a2;
            acc += col((1, 2, 4)) * (a(4)? + big_pow(2, weight - 5));
            for n in [1u64, 2, 3, 4, 6] {
                acc += col((1, 1, n)) * a(n)?;
            }
            Ok(acc)
        }
        _ => Err(RestrictionError::NoClosedForm { index: index.to_string(), form: "ikeda" }),
    }
}

/// Fiber member grouped by what its coefficient depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Rank0,
    Rank1(u64),
    Rank2(u64, u64),
    Diagonal([i64; 3]),
    Local(u64, u64, u64),
}

fn rank3_key(t: &IntegralJordan, det: i64) -> Key {
    match t.pivot_reduce() {
        Ok(d) if d.iter().all(|&v| v > 0) => Key::Diagonal(d),
        _ => Key::Local(t.content(), t.cross().content(), det as u64),
    }
}

fn member_key(m: &FiberMember) -> Key {
    if m.det != 0 {
        return rank3_key(&m.t, m.det);
    }
    match m.t.rank() {
        0 => Key::Rank0,
        1 => Key::Rank1(m.t.content()),
        _ => Key::Rank2(m.t.content(), m.t.cross().content()),
    }
}

fn key_profile(k: &Key) -> Result<DiagonalProfile, CoeffError> {
    match *k {
        Key::Diagonal(d) => DiagonalProfile::from_diagonal(d.map(|v| v as u64)),
        Key::Local(d1, d2, d3) => DiagonalProfile::from_local_data(&LocalData::new(d1, d2, d3)),
        _ => unreachable!("rank-3 keys only"),
    }
}

fn grouped_fiber(s: &HalfIntegralSym3, strict: bool) -> Result<BTreeMap<Key, u64>, RestrictionError> {
    Ok(fiber_fold(
        s,
        strict,
        1,
        BTreeMap::new,
        |mut acc, m| {
            *acc.entry(member_key(&m)).or_default() += 1;
            acc
        },
        merge_counts,
    )?)
}

/// Ikeda-lift restriction summed over the positive definite fiber.
pub fn ikeda_enum(index: NamedIndex, weight: u32, eigen: &EigenvalueTable) -> Result<BigInt, RestrictionError> {
    ikeda_enum_matrix(&index.matrix(), weight, eigen)
}

pub fn ikeda_enum_matrix(s: &HalfIntegralSym3, weight: u32, eigen: &EigenvalueTable) -> Result<BigInt, RestrictionError> {
    if eigen.weight() + 8 != weight {
        return Err(CoeffError::WeightMismatch { weight, got: eigen.weight() }.into());
    }
    let mut acc = BigInt::zero();
    for (k, n) in grouped_fiber(s, true)? {
        acc += ikeda_from_profile(&key_profile(&k)?, weight, eigen)? * BigInt::from(n);
    }
    Ok(acc)
}

pub fn restrict_ikeda(index: NamedIndex, weight: u32, eigen: &EigenvalueTable, route: Route) -> Result<Restriction, RestrictionError> {
    let closed = match route {
        Route::Closed | Route::Both => Some(rat(ikeda_closed(index, weight, eigen)?)),
        Route::Enum => None,
    };
    let enumerated = match route {
        Route::Enum | Route::Both => Some(rat(ikeda_enum(index, weight, eigen)?)),
        Route::Closed => None,
    };
    combine(index, closed, enumerated)
}

/// Eisenstein restriction by its closed form.
pub fn eisenstein_closed(index: NamedIndex, weight: u32) -> Result<BigRational, RestrictionError> {
    let EisensteinConstants { c3, c2, c1, .. } = eisenstein_constants(weight).map_err(CoeffError::from)?;
    let n = |v: u64| rat(v);
    let half = n(count_half_shifted(1));
    Ok(match index {
        NamedIndex::O => BigRational::one(),
        NamedIndex::U2 => c1,
        NamedIndex::U4 => c2 + n(count_imaginary(1)) * c1,
        NamedIndex::U6 => half * c1,
        NamedIndex::W => half * c2 + n(count_pairs_shifted_integral()) * c1,
        NamedIndex::S1 => n(count_pairs_shifted_shifted()) * c1,
        NamedIndex::D(a) => {
            let q: Vec<u64> = (0..=a).map(count_pairs_imaginary_product_norm).collect();
            let mut t1 = BigInt::zero();
            let mut t3 = BigInt::zero();
            for k in 1..=a {
                t1 += sigma(weight - 9, k) * BigInt::from(count_pairs_by_norm_sum(a, a - k));
                t3 += sigma(weight - 5, k) * BigInt::from(q[(a - k) as usize]);
            }
            let t2 = BigInt::from(count_pairs_with_norm_sum(a));
            &c3 * rat(t1) + &c2 * rat(t2) + &c2 * rat(t3) + c1 * n(q[a as usize])
        }
        NamedIndex::G | NamedIndex::H => {
            return Err(RestrictionError::NoClosedForm { index: index.to_string(), form: "eisenstein" })
        }
    })
}

/// Eisenstein restriction summed over the positive semi-definite fiber.
pub fn eisenstein_enum(index: NamedIndex, weight: u32) -> Result<BigRational, RestrictionError> {
    eisenstein_enum_matrix(&index.matrix(), weight)
}

pub fn eisenstein_enum_matrix(s: &HalfIntegralSym3, weight: u32) -> Result<BigRational, RestrictionError> {
    let c = eisenstein_constants(weight).map_err(CoeffError::from)?;
    let mut acc = BigRational::zero();
    for (k, count) in grouped_fiber(s, false)? {
        let (constant, a) = match k {
            Key::Rank0 => (BigRational::one(), BigInt::one()),
            Key::Rank1(d1) => (c.c1.clone(), eisenstein_rank1(d1, weight)),
            Key::Rank2(d1, d2) => (c.c2.clone(), eisenstein_rank2(d1, d2, weight)?),
            _ => (c.c3.clone(), eisenstein_from_profile(&key_profile(&k)?, weight)?),
        };
        acc += constant * rat(a * BigInt::from(count));
    }
    Ok(acc)
}

pub fn restrict_eisenstein(index: NamedIndex, weight: u32, route: Route) -> Result<Restriction, RestrictionError> {
    let closed = match route {
        Route::Closed | Route::Both => Some(eisenstein_closed(index, weight)?),
        Route::Enum => None,
    };
    let enumerated = match route {
        Route::Enum | Route::Both => Some(eisenstein_enum(index, weight)?),
        Route::Closed => None,
    };
    combine(index, closed, enumerated)
}

/// Collects every member of a fiber, in a deterministic order.
pub fn enumerate_fiber(s: &HalfIntegralSym3, pd_only: bool) -> Result<Vec<IntegralJordan>, RestrictionError> {
    let mut v = fiber_fold(
        s,
        pd_only,
        1,
        Vec::new,
        |mut acc, m| {
            acc.push(m.t);
            acc
        },
        |mut a, b| {
            a.extend(b);
            a
        },
    )?;
    v.sort_by_key(|t| {
        let o = t.off();
        (*o[0].doubled(), *o[1].doubled(), *o[2].doubled())
    });
    Ok(v)
}

/// Member count with the entry search radius multiplied by `scale`.
pub fn fiber_count_with_scale(s: &HalfIntegralSym3, pd_only: bool, scale: i64) -> Result<u64, RestrictionError> {
    Ok(fiber_fold(
        s,
        pd_only,
        scale,
        || 0u64,
        |n, m| {
            let ok = if pd_only { m.t.is_pd() } else { m.t.is_psd() };
            assert!(ok, "fiber member fails the positivity predicate");
            n + 1
        },
        |a, b| a + b,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::tau_table;

    #[test]
    fn parse_indices() {
        assert_eq!("D:3".parse::<NamedIndex>().unwrap(), NamedIndex::D(3));
        assert_eq!("u6".parse::<NamedIndex>().unwrap(), NamedIndex::U6);
        assert!("D:0".parse::<NamedIndex>().is_err());
        assert!("X".parse::<NamedIndex>().is_err());
        for i in NamedIndex::all_fixed() {
            assert_eq!(i.to_string().parse::<NamedIndex>().unwrap(), i);
        }
        assert_eq!(NamedIndex::G.matrix().to_string(), "[[1,1/2,0],[1/2,2,0],[0,0,2]]");
    }

    #[test]
    fn ikeda_small_indices() {
        let e = tau_table(10);
        let r = |i| restrict_ikeda(i, 20, &e, Route::Both).unwrap();
        assert_eq!(r(NamedIndex::D(1)).value, rat(1));
        assert_eq!(r(NamedIndex::D(2)).value, rat(228));
        assert_eq!(r(NamedIndex::G).value, rat(9744));
        assert_eq!(r(NamedIndex::S1).value, rat(0));
        assert_eq!(r(NamedIndex::W).value, rat(0));
        assert_eq!(r(NamedIndex::D(2)).routes_agree(), Some(true));
    }

    #[test]
    fn eisenstein_anchors() {
        let r = restrict_eisenstein(NamedIndex::D(1), 14, Route::Both).unwrap();
        assert_eq!(r.value, rat(-979776));
        assert_eq!(r.routes_agree(), Some(true));
        let r = restrict_eisenstein(NamedIndex::U2, 16, Route::Both).unwrap();
        assert_eq!(r.value, BigRational::new(16320.into(), 3617.into()));
        for i in [NamedIndex::O, NamedIndex::U4, NamedIndex::U6, NamedIndex::W, NamedIndex::S1] {
            assert_eq!(restrict_eisenstein(i, 12, Route::Both).unwrap().routes_agree(), Some(true), "{i}");
        }
    }

    #[test]
    fn vanishing_shapes() {
        let s = HalfIntegralSym3::new([1, 1, 3], [1, 0, 2]);
        assert!(has_half_unit_block(&s));
        assert!(enumerate_fiber(&s, true).unwrap().is_empty());
    }

    #[test]
    fn no_closed_form() {
        assert!(matches!(eisenstein_closed(NamedIndex::H, 12), Err(RestrictionError::NoClosedForm { .. })));
    }
}
