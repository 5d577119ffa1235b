//! Octonions over the rationals in doubled coordinates, with the integral
//! (Coxeter) order `o` and its imaginary sublattice `o'`.
//!
//! An [`Octonion`] stores `2·x_i` for `x = Σ x_i e_i`, so every element of
//! `½·Σ Z e_i` is represented exactly by eight machine integers. The integral
//! order is the Z-span of
//!
//! ```text
//! α0 = e0, α1 = e1, α2 = e2, α3 = -e4, α4 = ½(e1+e2+e3+e4),
//! α5 = ½(-e0-e1-e4+e5), α6 = ½(-e0+e1-e2+e6), α7 = ½(-e0+e2+e4+e7).
//! ```
//!
//! # Multiplication table
//!
//! `e0` is the identity, `e_i² = -e0` for `i ≥ 1`, and for every oriented line
//! `(a, b, c)` of [`FANO_LINES`] we have `e_a e_b = e_c`, `e_b e_c = e_a`,
//! `e_c e_a = e_b`, with the reversed products negated. The lines are the
//! classical cyclic ones `e_i e_{i+1} = e_{i+3}` (indices mod 7 on `1..=7`).
//! With this table the norm is multiplicative and the α-lattice is closed
//! under multiplication.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Oriented lines of the Fano plane: `e_a · e_b = e_c`.
pub const FANO_LINES: [(usize, usize, usize); 7] = [
    (1, 2, 4),
    (2, 3, 5),
    (3, 4, 6),
    (4, 5, 7),
    (5, 6, 1),
    (6, 7, 2),
    (7, 1, 3),
];

/// `MUL_TABLE[i][j] = (s, k)` means `e_i · e_j = s · e_k`.
pub const MUL_TABLE: [[(i32, usize); 8]; 8] = build_table();

const fn build_table() -> [[(i32, usize); 8]; 8] {
    let mut t = [[(0i32, 0usize); 8]; 8];
    let mut i = 0;
    while i < 8 {
        t[0][i] = (1, i);
        t[i][0] = (1, i);
        if i > 0 {
            t[i][i] = (-1, 0);
        }
        i += 1;
    }
    let mut l = 0;
    while l < 7 {
        let (a, b, c) = FANO_LINES[l];
        t[a][b] = (1, c);
        t[b][a] = (-1, c);
        t[b][c] = (1, a);
        t[c][b] = (-1, a);
        t[c][a] = (1, b);
        t[a][c] = (-1, b);
        l += 1;
    }
    t
}

/// Doubled e-coordinates of α0..α7.
pub const ALPHA_DOUBLED: [[i32; 8]; 8] = [
    [2, 0, 0, 0, 0, 0, 0, 0],
    [0, 2, 0, 0, 0, 0, 0, 0],
    [0, 0, 2, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, -2, 0, 0, 0],
    [0, 1, 1, 1, 1, 0, 0, 0],
    [-1, -1, 0, 0, -1, 1, 0, 0],
    [-1, 1, -1, 0, 0, 0, 1, 0],
    [-1, 0, 1, 0, 1, 0, 0, 1],
];

/// Integer matrix `M` with `α-coordinates = M · doubled / 2`.
const E_TO_ALPHA_X2: [[i32; 8]; 8] = [
    [1, 0, 0, 0, 0, 1, 1, 1],
    [0, 1, 0, -1, 0, 1, -1, 0],
    [0, 0, 1, -1, 0, 0, 1, -1],
    [0, 0, 0, 1, -1, -1, 0, 1],
    [0, 0, 0, 2, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 2, 0, 0],
    [0, 0, 0, 0, 0, 0, 2, 0],
    [0, 0, 0, 0, 0, 0, 0, 2],
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OctonionError {
    #[error("octonion {0} is not in the integral order")]
    NotIntegral(Octonion),
}

/// Element `Σ (dc_i / 2) e_i` of the octonion algebra.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Octonion {
    dc: [i32; 8],
}

impl Octonion {
    pub const ZERO: Octonion = Octonion { dc: [0; 8] };
    pub const ONE: Octonion = Octonion { dc: [2, 0, 0, 0, 0, 0, 0, 0] };

    pub const fn from_doubled(dc: [i32; 8]) -> Self {
        Octonion { dc }
    }

    /// Octonion with integer coordinates `Σ c_i e_i`.
    pub fn from_integers(c: [i32; 8]) -> Self {
        Octonion { dc: c.map(|v| 2 * v) }
    }

    /// Basis element `e_i`.
    pub fn unit(i: usize) -> Self {
        let mut dc = [0; 8];
        dc[i] = 2;
        Octonion { dc }
    }

    /// Basis element `α_i` of the integral order.
    pub fn alpha(i: usize) -> Self {
        Octonion { dc: ALPHA_DOUBLED[i] }
    }

    /// Integer multiple of `e0`.
    pub fn scalar(k: i32) -> Self {
        let mut dc = [0; 8];
        dc[0] = 2 * k;
        Octonion { dc }
    }

    /// The element `½ e0`.
    pub const HALF: Octonion = Octonion { dc: [1, 0, 0, 0, 0, 0, 0, 0] };

    #[inline]
    pub fn doubled(&self) -> &[i32; 8] {
        &self.dc
    }

    pub fn is_zero(&self) -> bool {
        self.dc == [0; 8]
    }

    #[inline]
    pub fn conj(&self) -> Self {
        let mut dc = self.dc;
        for v in &mut dc[1..] {
            *v = -*v;
        }
        Octonion { dc }
    }

    /// `4·N(x) = Σ dc_i²`.
    #[inline]
    pub fn norm4(&self) -> i64 {
        self.dc.iter().map(|&v| (v as i64) * (v as i64)).sum()
    }

    pub fn norm(&self) -> BigRational {
        BigRational::new(BigInt::from(self.norm4()), BigInt::from(4))
    }

    /// `N(x)` when it is an integer (always the case on the integral order).
    pub fn integer_norm(&self) -> Option<i64> {
        let n4 = self.norm4();
        (n4 % 4 == 0).then_some(n4 / 4)
    }

    /// `Tr(x) = 2 x_0`, which is exactly the doubled real coordinate.
    #[inline]
    pub fn trace(&self) -> i64 {
        self.dc[0] as i64
    }

    /// Doubled coefficient of `e0`.
    #[inline]
    pub fn real_doubled(&self) -> i32 {
        self.dc[0]
    }

    pub fn imaginary_part(&self) -> Self {
        let mut dc = self.dc;
        dc[0] = 0;
        Octonion { dc }
    }

    pub fn is_imaginary(&self) -> bool {
        self.dc[0] == 0
    }

    /// `Σ dx_i dy_i = 4 Σ x_i y_i = 2·tr(x ȳ)`.
    #[inline]
    pub fn dot_doubled(&self, other: &Octonion) -> i64 {
        dot_doubled(&self.dc, &other.dc)
    }

    /// `tr(x ȳ) = 2 Σ x_i y_i`.
    pub fn bilinear_trace(&self, other: &Octonion) -> BigRational {
        BigRational::new(BigInt::from(self.dot_doubled(other)), BigInt::from(2))
    }

    /// Coordinates in the α-basis, if they are all integers.
    pub fn alpha_coordinates(&self) -> Option<[i64; 8]> {
        let mut out = [0i64; 8];
        for (row, o) in E_TO_ALPHA_X2.iter().zip(out.iter_mut()) {
            let s: i64 = row
                .iter()
                .zip(self.dc.iter())
                .map(|(&m, &d)| m as i64 * d as i64)
                .sum();
            if s % 2 != 0 {
                return None;
            }
            *o = s / 2;
        }
        Some(out)
    }

    /// Membership in the integral order `o`.
    pub fn is_integral(&self) -> bool {
        is_integral_doubled(&self.dc)
    }

    /// Membership in `o'`, the imaginary integral octonions.
    pub fn is_imaginary_integral(&self) -> bool {
        self.is_imaginary() && self.is_integral()
    }

    /// Largest `g ≥ 0` with `x / g` still integral; `content(0) = 0`.
    pub fn content(&self) -> Result<u64, OctonionError> {
        let coords = self.alpha_coordinates().ok_or(OctonionError::NotIntegral(*self))?;
        Ok(coords
            .iter()
            .fold(0i64, |g, &c| g.gcd(&c))
            .unsigned_abs())
    }

    /// Product, or `None` when it leaves the half-integral lattice.
    #[inline]
    pub fn checked_mul(&self, other: &Octonion) -> Option<Octonion> {
        mul_doubled(&self.dc, &other.dc).map(Octonion::from_doubled)
    }

    pub fn scale(&self, k: i32) -> Octonion {
        Octonion { dc: self.dc.map(|v| v * k) }
    }

    /// Rational multiple, if representable.
    pub fn checked_scale(&self, c: &BigRational) -> Option<Octonion> {
        let mut dc = [0i32; 8];
        for (o, &v) in dc.iter_mut().zip(self.dc.iter()) {
            let r = c * BigInt::from(v);
            if !r.is_integer() {
                return None;
            }
            *o = i32::try_from(r.to_integer()).ok()?;
        }
        Some(Octonion { dc })
    }

    /// Coordinates `x_i` as exact rationals.
    pub fn coordinates(&self) -> [BigRational; 8] {
        self.dc
            .map(|v| BigRational::new(BigInt::from(v), BigInt::from(2)))
    }

    /// `x / g` for an integer `g` dividing every doubled coordinate.
    pub fn div_exact(&self, g: i32) -> Option<Octonion> {
        if g == 0 || self.dc.iter().any(|v| v % g != 0) {
            return None;
        }
        Some(Octonion { dc: self.dc.map(|v| v / g) })
    }
}

/// Integral-order test on raw doubled coordinates.
#[inline]
pub fn is_integral_doubled(dc: &[i32; 8]) -> bool {
    E_TO_ALPHA_X2.iter().all(|row| {
        let s: i32 = row.iter().zip(dc.iter()).map(|(&m, &d)| m * d).sum();
        s % 2 == 0
    })
}

#[inline]
pub fn dot_doubled(a: &[i32; 8], b: &[i32; 8]) -> i64 {
    let mut s = 0i32;
    for i in 0..8 {
        s += a[i] * b[i];
    }
    s as i64
}

/// Product of two octonions in doubled coordinates; `None` if the result is
/// not in `½ Z^8`.
#[inline]
pub fn mul_doubled(a: &[i32; 8], b: &[i32; 8]) -> Option<[i32; 8]> {
    let mut acc = [0i32; 8];
    for i in 0..8 {
        let ai = a[i];
        if ai == 0 {
            continue;
        }
        for j in 0..8 {
            let (s, k) = MUL_TABLE[i][j];
            acc[k] += s * ai * b[j];
        }
    }
    let mut out = [0i32; 8];
    for k in 0..8 {
        if acc[k] % 2 != 0 {
            return None;
        }
        out[k] = acc[k] / 2;
    }
    Some(out)
}

impl Add for Octonion {
    type Output = Octonion;
    fn add(self, rhs: Octonion) -> Octonion {
        let mut dc = self.dc;
        for (d, r) in dc.iter_mut().zip(rhs.dc.iter()) {
            *d += r;
        }
        Octonion { dc }
    }
}

impl Sub for Octonion {
    type Output = Octonion;
    fn sub(self, rhs: Octonion) -> Octonion {
        let mut dc = self.dc;
        for (d, r) in dc.iter_mut().zip(rhs.dc.iter()) {
            *d -= r;
        }
        Octonion { dc }
    }
}

impl Neg for Octonion {
    type Output = Octonion;
    fn neg(self) -> Octonion {
        Octonion { dc: self.dc.map(|v| -v) }
    }
}

impl Mul for Octonion {
    type Output = Octonion;
    /// Panics if the product leaves `½ Z^8`; use [`Octonion::checked_mul`]
    /// for inputs outside the integral order.
    fn mul(self, rhs: Octonion) -> Octonion {
        self.checked_mul(&rhs)
            .unwrap_or_else(|| panic!("product {self} * {rhs} leaves the half-integral lattice"))
    }
}

impl fmt::Display for Octonion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.dc.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]/2")
    }
}

impl fmt::Debug for Octonion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The α-basis as an exact rational matrix together with its inverse.
#[derive(Debug, Clone)]
pub struct BasisMatrix {
    /// Column `i` holds the e-coordinates of `α_i`.
    pub alpha_to_e: [[BigRational; 8]; 8],
    pub e_to_alpha: [[BigRational; 8]; 8],
}

impl BasisMatrix {
    pub fn coxeter() -> Self {
        let half = |v: i32| BigRational::new(BigInt::from(v), BigInt::from(2));
        let alpha_to_e = std::array::from_fn(|r| std::array::from_fn(|c| half(ALPHA_DOUBLED[c][r])));
        let e_to_alpha = std::array::from_fn(|r| std::array::from_fn(|c| half(E_TO_ALPHA_X2[r][c] * 2)));
        BasisMatrix { alpha_to_e, e_to_alpha }
    }

    /// Determinant of `alpha_to_e` by exact Gaussian elimination.
    pub fn determinant(&self) -> BigRational {
        rational_det(&self.alpha_to_e)
    }
}

fn rational_det<const N: usize>(m: &[[BigRational; N]; N]) -> BigRational {
    let mut a: Vec<Vec<BigRational>> = m.iter().map(|r| r.to_vec()).collect();
    let mut det = BigRational::one();
    for col in 0..N {
        let Some(piv) = (col..N).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..N {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &p;
            for c in col..N {
                let t = &f * &a[col][c];
                a[r][c] -= t;
            }
        }
    }
    det
}
