//! Fourier coefficients of the Eisenstein series and of the Ikeda-type lift
//! at a single index `T`.
//!
//! Rank-3 coefficients are products of local factors. Each local factor is
//! the symmetric Laurent polynomial `f̃(X) = X^d f(X^{-2})` written in the
//! basis `h_m = X^m + X^{m-2} + … + X^{-m}`; substituting a Satake pair then
//! only needs `p^{m s/2} h_m(α_p) = a_f(p^m)` (lift) or `σ_s(p^m)`
//! (Eisenstein), with `s = 2k − 9`, so nothing is ever evaluated numerically.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{big_pow, divisors, factorize, sigma, valuation};
use crate::jordan::{IntegralJordan, JordanElement, JordanError, LocalData};
use crate::qseries::{eisenstein_constants, EigenvalueTable, QSeriesError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error(transparent)]
    Jordan(#[from] JordanError),
    #[error(transparent)]
    QSeries(#[from] QSeriesError),
    #[error("local profile {tau:?} at p = {p} is not covered by the implemented local polynomials")]
    UnsupportedProfile { p: u64, tau: [u32; 3] },
    #[error("index is not positive definite")]
    NotPositiveDefinite,
    #[error("index is not positive semi-definite")]
    NotPsd,
    #[error("eigenform has weight {got}, the lift of weight {weight} needs weight {}", weight - 8)]
    WeightMismatch { weight: u32, got: u32 },
    #[error("weight {0} is not supported here (need an even weight ≥ {1})")]
    InvalidWeight(u32, u32),
    #[error("local data {0} does not come from a diagonal form")]
    InconsistentLocalData(String),
    #[error("rank-2 index with content {d1} and adjoint content {d2}: d1² does not divide d2")]
    RankTwoContent { d1: u64, d2: u64 },
}

/// Valuation triples `(τ(1) ≤ τ(2) ≤ τ(3))` for each prime dividing `det T`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiagonalProfile {
    pub det: u64,
    pub rank: u8,
    pub tau: BTreeMap<u64, [u32; 3]>,
}

impl DiagonalProfile {
    /// Profile of `diag(t1, t2, t3)` with all `t_i > 0`.
    pub fn from_diagonal(t: [u64; 3]) -> Result<Self, CoeffError> {
        if t.contains(&0) {
            return Err(CoeffError::NotPositiveDefinite);
        }
        let det = t[0] * t[1] * t[2];
        let tau = factorize(det)
            .into_iter()
            .map(|(p, _)| {
                let mut v = t.map(|ti| valuation(ti, p));
                v.sort_unstable();
                (p, v)
            })
            .collect();
        Ok(DiagonalProfile { det, rank: 3, tau })
    }

    /// Profile from `d(T)`: at each prime `(v₁, v₂ − v₁, v₃ − v₂)` with `v_i = ord_p d_i`.
    pub fn from_local_data(d: &LocalData) -> Result<Self, CoeffError> {
        if d.d3 == 0 {
            return Err(CoeffError::NotPositiveDefinite);
        }
        let mut tau = BTreeMap::new();
        for (&p, v) in &d.tau {
            if v[0] > v[1] || v[1] > v[2] {
                return Err(CoeffError::InconsistentLocalData(format!("{:?}", d.triple())));
            }
            let t = [v[0], v[1] - v[0], v[2] - v[1]];
            if t[0] > t[1] || t[1] > t[2] {
                return Err(CoeffError::InconsistentLocalData(format!("{:?}", d.triple())));
            }
            tau.insert(p, t);
        }
        Ok(DiagonalProfile { det: d.d3, rank: 3, tau })
    }
}

impl fmt::Display for DiagonalProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "det={}", self.det)?;
        for (p, t) in &self.tau {
            write!(f, " {p}:{t:?}")?;
        }
        Ok(())
    }
}

/// Profiles with an implemented local polynomial.
pub fn is_supported(tau: [u32; 3]) -> bool {
    tau[0] == 0 || tau == [1, 1, 1]
}

/// Local polynomial `f_T^p(X)` as coefficients of `X^0, X^1, …`.
pub fn katsurada_poly(tau: [u32; 3], p: u64) -> Result<Vec<BigInt>, CoeffError> {
    match tau {
        [0, t2, t3] => {
            let d = (t2 + t3) as usize;
            let mut f = vec![BigInt::zero(); d + 1];
            for l in 0..=t2 as usize {
                let c = big_pow(p, 4 * l as u32);
                for j in l..=d - l {
                    f[j] += &c;
                }
            }
            Ok(f)
        }
        [1, 1, 1] => {
            let m: BigInt = big_pow(p, 8) + big_pow(p, 4) + 1;
            Ok(vec![BigInt::one(), m.clone(), m, BigInt::one()])
        }
        _ => Err(CoeffError::UnsupportedProfile { p, tau }),
    }
}

/// Symmetric Laurent polynomial `Σ c_e X^e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentSymmetric {
    coeffs: BTreeMap<i64, BigInt>,
}

impl LaurentSymmetric {
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, BigInt)>) -> Self {
        let mut coeffs: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            *coeffs.entry(e).or_default() += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        LaurentSymmetric { coeffs }
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.coeffs.get(&e).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    /// The image under `X ↦ X^{-1}`.
    pub fn inverted(&self) -> Self {
        Self::from_terms(self.coeffs.iter().map(|(e, c)| (-e, c.clone())))
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.inverted()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .map(|(e, c)| BigRational::from_integer(c.clone()) * pow_signed(x, *e))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// Coefficients `b_m` with `self = Σ b_m h_m`.
    pub fn h_decomposition(&self) -> BTreeMap<u32, BigInt> {
        let mut rest = self.coeffs.clone();
        let mut out = BTreeMap::new();
        while let Some((&top, c)) = rest.iter().next_back() {
            if top < 0 {
                break;
            }
            let c = c.clone();
            let mut e = top;
            while e >= -top {
                *rest.entry(e).or_default() -= &c;
                e -= 2;
            }
            rest.retain(|_, v| !v.is_zero());
            out.insert(top as u32, c);
        }
        debug_assert!(rest.is_empty(), "not symmetric");
        out
    }
}

fn pow_signed(x: &BigRational, e: i64) -> BigRational {
    let p = num_traits::pow(x.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

/// `f̃(X) = X^d f(X^{-2})` for a polynomial of degree `d`.
pub fn tilde(f: &[BigInt]) -> LaurentSymmetric {
    let d = f.len() as i64 - 1;
    LaurentSymmetric::from_terms(f.iter().enumerate().map(|(j, c)| (d - 2 * j as i64, c.clone())))
}

fn check_weight(weight: u32, min: u32) -> Result<(), CoeffError> {
    if weight < min || weight % 2 != 0 {
        return Err(CoeffError::InvalidWeight(weight, min));
    }
    Ok(())
}

/// `p^{s(d−m)/2}`-weighted sum of `g(p^m)` over the `h`-expansion of `f̃`.
fn local_factor(
    tau: [u32; 3],
    p: u64,
    s: u32,
    mut g: impl FnMut(u64, u32) -> Result<BigInt, CoeffError>,
) -> Result<BigInt, CoeffError> {
    let f = katsurada_poly(tau, p)?;
    let d = (f.len() - 1) as u32;
    let mut acc = BigInt::zero();
    for (m, b) in tilde(&f).h_decomposition() {
        acc += b * big_pow(p, s * (d - m) / 2) * g(p, m)?;
    }
    Ok(acc)
}

/// `A_{F_f}` for a rank-3 profile.
pub fn ikeda_from_profile(profile: &DiagonalProfile, weight: u32, eigen: &EigenvalueTable) -> Result<BigInt, CoeffError> {
    check_weight(weight, 20)?;
    if eigen.weight() != weight - 8 {
        return Err(CoeffError::WeightMismatch { weight, got: eigen.weight() });
    }
    let s = weight - 9;
    let mut acc = BigInt::one();
    for (&p, &tau) in &profile.tau {
        acc *= local_factor(tau, p, s, |p, m| Ok(eigen.get(p.pow(m))?.clone()))?;
    }
    Ok(acc)
}

/// Un-normalized rank-3 Eisenstein coefficient for a profile.
pub fn eisenstein_from_profile(profile: &DiagonalProfile, weight: u32) -> Result<BigInt, CoeffError> {
    check_weight(weight, 10)?;
    let s = weight - 9;
    let mut acc = BigInt::one();
    for (&p, &tau) in &profile.tau {
        acc *= local_factor(tau, p, s, |p, m| Ok(sigma(s, p.pow(m))))?;
    }
    Ok(acc)
}

/// Rank-3 profile of an integral index: completing the square on a unit
/// pivot when there is one, otherwise from `d(T)`.
pub fn classify(t: &IntegralJordan) -> Result<DiagonalProfile, CoeffError> {
    if let Ok(d) = t.pivot_reduce() {
        if d.iter().all(|&v| v > 0) {
            return DiagonalProfile::from_diagonal(d.map(|v| v as u64));
        }
    }
    DiagonalProfile::from_local_data(&t.local_data()?)
}

/// `A_{F_f}(T)` for positive definite integral `T`.
pub fn ikeda_coeff(t: &JordanElement, weight: u32, eigen: &EigenvalueTable) -> Result<BigInt, CoeffError> {
    let ti = t.to_integral()?;
    if !ti.is_pd() {
        return Err(CoeffError::NotPositiveDefinite);
    }
    ikeda_from_profile(&classify(&ti)?, weight, eigen)
}

/// `A_{2k}(T)` split as rank, un-normalized value and normalizing constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EisensteinCoeff {
    pub rank: u8,
    pub a: BigInt,
    pub constant: BigRational,
}

impl EisensteinCoeff {
    /// `Ã = C·A`.
    pub fn normalized(&self) -> BigRational {
        &self.constant * BigRational::from_integer(self.a.clone())
    }
}

/// Un-normalized `A_{2k}(T)` by rank: 1 for `T = 0`, `σ_{2k−1}(ε(T))` for
/// rank 1, `Σ_{d | ε(T)} d^{2k−1} σ_{2k−5}(ε(T×T)/d²)` for rank 2 and the
/// local-factor product for rank 3.
pub fn eisenstein_value(t: &IntegralJordan, weight: u32) -> Result<(u8, BigInt), CoeffError> {
    check_weight(weight, 10)?;
    if !t.is_psd() {
        return Err(CoeffError::NotPsd);
    }
    let rank = t.rank();
    let a = match rank {
        0 => BigInt::one(),
        1 => eisenstein_rank1(t.content(), weight),
        2 => eisenstein_rank2(t.content(), t.cross().content(), weight)?,
        _ => eisenstein_from_profile(&classify(t)?, weight)?,
    };
    Ok((rank, a))
}

pub fn eisenstein_rank1(d1: u64, weight: u32) -> BigInt {
    sigma(weight - 1, d1)
}

/// Rank-2 value from the contents of `T` and `T×T`.
pub fn eisenstein_rank2(d1: u64, d2: u64, weight: u32) -> Result<BigInt, CoeffError> {
    let mut acc = BigInt::zero();
    for d in divisors(d1) {
        if d2 % (d * d) != 0 {
            return Err(CoeffError::RankTwoContent { d1, d2 });
        }
        acc += big_pow(d, weight - 1) * sigma(weight - 5, d2 / (d * d));
    }
    Ok(acc)
}

pub fn eisenstein_coeff(t: &JordanElement, weight: u32) -> Result<EisensteinCoeff, CoeffError> {
    let ti = t.to_integral()?;
    let (rank, a) = eisenstein_value(&ti, weight)?;
    let c = eisenstein_constants(weight)?;
    let constant = match rank {
        0 => BigRational::one(),
        1 => c.c1,
        2 => c.c2,
        _ => c.c3,
    };
    Ok(EisensteinCoeff { rank, a, constant })
}
