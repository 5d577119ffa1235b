//! The exceptional Jordan algebra of 3×3 Hermitian octonion matrices.
//!
//! A [`JordanElement`] stores only the upper triangle
//!
//! ```text
//! ( a  x  y )
//! ( x̄  b  z )
//! ( ȳ  z̄  c )
//! ```
//!
//! with rational diagonal and octonion off-diagonal entries.
//! [`IntegralJordan`] is the machine-integer variant used by the enumeration
//! kernels; it is always a member of `J(Z)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::arith::{factorize, valuation};
use crate::octonion::Octonion;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JordanError {
    #[error("element is not in J(Z)")]
    NotIntegral,
    #[error("element is not positive semi-definite")]
    NotPsd,
    #[error("no unit pivot available for reduction")]
    NoUnitPivot,
    #[error("octonion product leaves the half-integral lattice")]
    NotRepresentable,
    #[error("matrix is not half-integral symmetric: {0}")]
    NotHalfIntegral(String),
    #[error("cannot parse Jordan element: {0}")]
    Parse(String),
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rat_to_i64(r: &BigRational) -> Option<i64> {
    r.is_integer().then(|| r.to_integer().to_i64()).flatten()
}

/// Hermitian 3×3 octonion matrix with rational diagonal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct JordanElement {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    /// Entry (1,2).
    pub x: Octonion,
    /// Entry (1,3).
    pub y: Octonion,
    /// Entry (2,3).
    pub z: Octonion,
}

impl JordanElement {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, x: Octonion, y: Octonion, z: Octonion) -> Self {
        JordanElement { a, b, c, x, y, z }
    }

    pub fn from_integers(diag: [i64; 3], off: [Octonion; 3]) -> Self {
        JordanElement {
            a: rat(diag[0]),
            b: rat(diag[1]),
            c: rat(diag[2]),
            x: off[0],
            y: off[1],
            z: off[2],
        }
    }

    pub fn diagonal(a: i64, b: i64, c: i64) -> Self {
        Self::from_integers([a, b, c], [Octonion::ZERO; 3])
    }

    pub fn zero() -> Self {
        Self::diagonal(0, 0, 0)
    }

    pub fn diag(&self) -> [&BigRational; 3] {
        [&self.a, &self.b, &self.c]
    }

    /// Entry `(i, j)` for `i ≠ j` (0-based).
    pub fn off(&self, i: usize, j: usize) -> Octonion {
        match (i, j) {
            (0, 1) => self.x,
            (0, 2) => self.y,
            (1, 2) => self.z,
            (1, 0) => self.x.conj(),
            (2, 0) => self.y.conj(),
            (2, 1) => self.z.conj(),
            _ => panic!("({i},{j}) is not an off-diagonal position"),
        }
    }

    /// Simultaneous row/column permutation: new `(i,j)` = old `(perm[i], perm[j])`.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        let d = self.diag();
        JordanElement {
            a: d[perm[0]].clone(),
            b: d[perm[1]].clone(),
            c: d[perm[2]].clone(),
            x: self.off(perm[0], perm[1]),
            y: self.off(perm[0], perm[2]),
            z: self.off(perm[1], perm[2]),
        }
    }

    pub fn is_integral(&self) -> bool {
        self.diag().iter().all(|v| v.is_integer())
            && [self.x, self.y, self.z].iter().all(|o| o.is_integral())
    }

    pub fn to_integral(&self) -> Result<IntegralJordan, JordanError> {
        let d = |r: &BigRational| rat_to_i64(r).ok_or(JordanError::NotIntegral);
        IntegralJordan::new([d(&self.a)?, d(&self.b)?, d(&self.c)?], [self.x, self.y, self.z])
    }

    /// The cross product `X × X`.
    ///
    /// Panics if an entry leaves the half-integral lattice, which cannot
    /// happen for integral input.
    pub fn cross(&self) -> JordanElement {
        self.try_cross().expect("cross product leaves the half-integral lattice")
    }

    pub fn try_cross(&self) -> Result<JordanElement, JordanError> {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let (x, y, z) = (self.x, self.y, self.z);
        let mul = |p: Octonion, q: Octonion| p.checked_mul(&q).ok_or(JordanError::NotRepresentable);
        let scale = |s: &BigRational, o: Octonion| o.checked_scale(s).ok_or(JordanError::NotRepresentable);
        Ok(JordanElement {
            a: b * c - z.norm(),
            b: a * c - y.norm(),
            c: a * b - x.norm(),
            x: mul(y, z.conj())? - scale(c, x)?,
            y: mul(x, z)? - scale(b, y)?,
            z: mul(x.conj(), y)? - scale(a, z)?,
        })
    }

    /// `Tr((x z) ȳ)`.
    pub fn triple_trace(&self) -> Result<BigRational, JordanError> {
        let w = self.x.checked_mul(&self.z).ok_or(JordanError::NotRepresentable)?;
        Ok(w.bilinear_trace(&self.y))
    }

    /// `det X = abc − aN(z) − bN(y) − cN(x) + Tr((xz)ȳ)`.
    pub fn det(&self) -> BigRational {
        let t = self.triple_trace().expect("product leaves the half-integral lattice");
        &self.a * &self.b * &self.c - &self.a * self.z.norm() - &self.b * self.y.norm() - &self.c * self.x.norm() + t
    }

    pub fn trace(&self) -> BigRational {
        &self.a + &self.b + &self.c
    }

    fn minors(&self) -> [BigRational; 3] {
        [
            &self.a * &self.b - self.x.norm(),
            &self.a * &self.c - self.y.norm(),
            &self.b * &self.c - self.z.norm(),
        ]
    }

    /// Weak positivity: the seven inequalities with `≥`.
    pub fn is_psd(&self) -> bool {
        self.diag().iter().all(|v| !v.is_negative())
            && self.minors().iter().all(|m| !m.is_negative())
            && !self.det().is_negative()
    }

    /// Strict positivity: the seven inequalities with `>`.
    pub fn is_pd(&self) -> bool {
        self.diag().iter().all(|v| v.is_positive())
            && self.minors().iter().all(|m| m.is_positive())
            && self.det().is_positive()
    }

    /// `T = T₁ + T₂` with `T₁` half-integral symmetric and `T₂` the
    /// imaginary-octonion part.
    pub fn split(&self) -> Result<(HalfIntegralSym3, JordanElement), JordanError> {
        let t = self.to_integral()?;
        let t1 = HalfIntegralSym3::new(
            t.diag,
            [
                self.x.real_doubled() as i64,
                self.y.real_doubled() as i64,
                self.z.real_doubled() as i64,
            ],
        );
        let t2 = JordanElement {
            a: BigRational::zero(),
            b: BigRational::zero(),
            c: BigRational::zero(),
            x: self.x.imaginary_part(),
            y: self.y.imaginary_part(),
            z: self.z.imaginary_part(),
        };
        Ok((t1, t2))
    }

    /// `(X, Y) = Tr(X ∘ Y)`.
    pub fn trace_pairing(&self, other: &JordanElement) -> BigRational {
        &self.a * &other.a
            + &self.b * &other.b
            + &self.c * &other.c
            + self.x.bilinear_trace(&other.x)
            + self.y.bilinear_trace(&other.y)
            + self.z.bilinear_trace(&other.z)
    }

    pub fn local_data(&self) -> Result<LocalData, JordanError> {
        self.to_integral()?.local_data()
    }

    /// Completes the square on a unit diagonal entry and returns the
    /// diagonal profile `diag(1, *, *)` the element is equivalent to.
    ///
    /// After eliminating the first row the remaining 2×2 block
    /// `[[b', z'], [z̄', c']]` is reduced again when it has a unit corner.
    /// Zero entries are moved last and a unit entry is placed second.
    pub fn pivot_reduce(&self) -> Result<[BigRational; 3], JordanError> {
        let one = BigRational::one();
        let pivot = self.diag().iter().position(|v| **v == one).ok_or(JordanError::NoUnitPivot)?;
        let t = match pivot {
            0 => self.clone(),
            1 => self.permuted([1, 0, 2]),
            _ => self.permuted([2, 1, 0]),
        };
        let xy = t.x.conj().checked_mul(&t.y).ok_or(JordanError::NotRepresentable)?;
        let b1 = &t.b - t.x.norm();
        let c1 = &t.c - t.y.norm();
        let z1 = t.z - xy;
        let (p, q) = if z1.is_zero() {
            (b1, c1)
        } else if b1 == one {
            (one.clone(), c1 - z1.norm())
        } else if c1 == one {
            (one.clone(), b1 - z1.norm())
        } else if b1.is_zero() || c1.is_zero() {
            return Err(JordanError::NotPsd);
        } else {
            return Err(JordanError::NoUnitPivot);
        };
        if p.is_negative() || q.is_negative() {
            return Err(JordanError::NotPsd);
        }
        let (p, q) = if p.is_zero() || (q == one && !p.is_zero()) { (q, p) } else { (p, q) };
        Ok([one, p, q])
    }

    /// Canonical JSON form: `{"diag": [a, b, c], "x": [...8], "y": [...], "z": [...]}`
    /// with octonions in doubled coordinates. Non-integral diagonal entries
    /// are written as `"num/den"` strings.
    pub fn to_json(&self) -> Value {
        let d = |r: &BigRational| match rat_to_i64(r) {
            Some(v) => json!(v),
            None => json!(r.to_string()),
        };
        json!({
            "diag": [d(&self.a), d(&self.b), d(&self.c)],
            "x": self.x,
            "y": self.y,
            "z": self.z,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, JordanError> {
        let perr = |m: &str| JordanError::Parse(m.to_string());
        let obj = v.as_object().ok_or_else(|| perr("expected a JSON object"))?;
        let diag = obj
            .get("diag")
            .and_then(Value::as_array)
            .filter(|a| a.len() == 3)
            .ok_or_else(|| perr("\"diag\" must be an array of three entries"))?;
        let parse_diag = |v: &Value| -> Result<BigRational, JordanError> {
            if let Some(i) = v.as_i64() {
                return Ok(rat(i));
            }
            let s = v.as_str().ok_or_else(|| perr("diagonal entries must be integers or \"num/den\" strings"))?;
            parse_rational(s).ok_or_else(|| perr(&format!("bad rational {s:?}")))
        };
        let oct = |key: &str| -> Result<Octonion, JordanError> {
            match obj.get(key) {
                None => Ok(Octonion::ZERO),
                Some(v) => serde_json::from_value::<[i32; 8]>(v.clone())
                    .map(Octonion::from_doubled)
                    .map_err(|e| perr(&format!("\"{key}\": {e}"))),
            }
        };
        Ok(JordanElement {
            a: parse_diag(&diag[0])?,
            b: parse_diag(&diag[1])?,
            c: parse_diag(&diag[2])?,
            x: oct("x")?,
            y: oct("y")?,
            z: oct("z")?,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self, JordanError> {
        let v: Value = serde_json::from_str(s).map_err(|e| JordanError::Parse(e.to_string()))?;
        Self::from_json(&v)
    }
}

/// Parses `"n"` or `"n/d"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| BigRational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

impl fmt::Display for JordanElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

impl fmt::Debug for JordanElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Element of `J(Z)` with machine-integer diagonal.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct IntegralJordan {
    pub(crate) diag: [i64; 3],
    /// `[x, y, z]` at positions (1,2), (1,3), (2,3).
    pub(crate) off: [Octonion; 3],
}

impl IntegralJordan {
    pub fn new(diag: [i64; 3], off: [Octonion; 3]) -> Result<Self, JordanError> {
        if off.iter().all(Octonion::is_integral) {
            Ok(IntegralJordan { diag, off })
        } else {
            Err(JordanError::NotIntegral)
        }
    }

    pub(crate) fn new_unchecked(diag: [i64; 3], off: [Octonion; 3]) -> Self {
        IntegralJordan { diag, off }
    }

    pub fn diag(&self) -> [i64; 3] {
        self.diag
    }

    pub fn off(&self) -> [Octonion; 3] {
        self.off
    }

    fn norms(&self) -> [i64; 3] {
        self.off.map(|o| o.norm4() / 4)
    }

    pub fn cross(&self) -> IntegralJordan {
        let [a, b, c] = self.diag;
        let [x, y, z] = self.off;
        let [nx, ny, nz] = self.norms();
        IntegralJordan {
            diag: [b * c - nz, a * c - ny, a * b - nx],
            off: [
                y * z.conj() - x.scale(c as i32),
                x * z - y.scale(b as i32),
                x.conj() * y - z.scale(a as i32),
            ],
        }
    }

    /// `Tr((x z) ȳ)`.
    pub fn triple_trace(&self) -> i64 {
        let [x, y, z] = self.off;
        (x * z).dot_doubled(&y) / 2
    }

    pub fn det(&self) -> i64 {
        let [a, b, c] = self.diag;
        let [nx, ny, nz] = self.norms();
        a * b * c - a * nz - b * ny - c * nx + self.triple_trace()
    }

    pub fn is_zero(&self) -> bool {
        self.diag == [0; 3] && self.off.iter().all(Octonion::is_zero)
    }

    pub fn is_pd(&self) -> bool {
        let [a, b, c] = self.diag;
        let [nx, ny, nz] = self.norms();
        a > 0 && b > 0 && c > 0 && a * b > nx && a * c > ny && b * c > nz && self.det() > 0
    }

    pub fn is_psd(&self) -> bool {
        let [a, b, c] = self.diag;
        let [nx, ny, nz] = self.norms();
        a >= 0 && b >= 0 && c >= 0 && a * b >= nx && a * c >= ny && b * c >= nz && self.det() >= 0
    }

    /// gcd of the diagonal entries and the contents of the octonion entries.
    pub fn content(&self) -> u64 {
        let mut g = self.diag.iter().fold(0u64, |g, &d| g.gcd(&d.unsigned_abs()));
        for o in &self.off {
            if g == 1 {
                break;
            }
            // integral by construction
            g = g.gcd(&o.content().expect("integral entry"));
        }
        g
    }

    /// Rank from the adjugate characterization: 0 iff `T = 0`, 1 iff
    /// `T × T = 0`, 2 iff `det T = 0`, otherwise 3.
    pub fn rank(&self) -> u8 {
        if self.is_zero() {
            0
        } else if self.cross().is_zero() {
            1
        } else if self.det() == 0 {
            2
        } else {
            3
        }
    }

    /// Integer version of [`JordanElement::pivot_reduce`].
    pub fn pivot_reduce(&self) -> Result<[i64; 3], JordanError> {
        let pivot = self.diag.iter().position(|&d| d == 1).ok_or(JordanError::NoUnitPivot)?;
        let t = match pivot {
            0 => *self,
            1 => self.permuted([1, 0, 2]),
            _ => self.permuted([2, 1, 0]),
        };
        let [_, b, c] = t.diag;
        let [x, y, z] = t.off;
        let b1 = b - x.norm4() / 4;
        let c1 = c - y.norm4() / 4;
        let z1 = z - x.conj() * y;
        let (p, q) = if z1.is_zero() {
            (b1, c1)
        } else if b1 == 1 {
            (1, c1 - z1.norm4() / 4)
        } else if c1 == 1 {
            (1, b1 - z1.norm4() / 4)
        } else if b1 == 0 || c1 == 0 {
            return Err(JordanError::NotPsd);
        } else {
            return Err(JordanError::NoUnitPivot);
        };
        if p < 0 || q < 0 {
            return Err(JordanError::NotPsd);
        }
        let (p, q) = if p == 0 || (q == 1 && p != 0) { (q, p) } else { (p, q) };
        Ok([1, p, q])
    }

    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        let off = |i: usize, j: usize| match (i, j) {
            (0, 1) => self.off[0],
            (0, 2) => self.off[1],
            (1, 2) => self.off[2],
            (1, 0) => self.off[0].conj(),
            (2, 0) => self.off[1].conj(),
            (2, 1) => self.off[2].conj(),
            _ => unreachable!(),
        };
        IntegralJordan {
            diag: perm.map(|i| self.diag[i]),
            off: [off(perm[0], perm[1]), off(perm[0], perm[2]), off(perm[1], perm[2])],
        }
    }

    pub fn local_data(&self) -> Result<LocalData, JordanError> {
        let d3 = self.det();
        if d3 < 0 {
            return Err(JordanError::NotPsd);
        }
        Ok(LocalData::new(self.content(), self.cross().content(), d3 as u64))
    }
}

impl From<IntegralJordan> for JordanElement {
    fn from(t: IntegralJordan) -> Self {
        JordanElement::from_integers(t.diag, t.off)
    }
}

/// Content invariants `d(T) = (gcd(T), gcd(T×T), det T)` with per-prime
/// valuations `τ_p(i) = ord_p(d_i)` for every prime dividing `d₃`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalData {
    pub d1: u64,
    pub d2: u64,
    pub d3: u64,
    pub tau: BTreeMap<u64, [u32; 3]>,
}

impl LocalData {
    pub fn new(d1: u64, d2: u64, d3: u64) -> Self {
        let tau = if d3 == 0 {
            BTreeMap::new()
        } else {
            factorize(d3)
                .into_iter()
                .map(|(p, e)| {
                    let v = |d: u64| if d == 0 { u32::MAX } else { valuation(d, p) };
                    (p, [v(d1), v(d2), e])
                })
                .collect()
        };
        LocalData { d1, d2, d3, tau }
    }

    pub fn triple(&self) -> (u64, u64, u64) {
        (self.d1, self.d2, self.d3)
    }
}

/// Half-integral symmetric 3×3 matrix: integer diagonal, off-diagonal in `½Z`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct HalfIntegralSym3 {
    diag: [i64; 3],
    /// Twice the entries (1,2), (1,3), (2,3).
    off_doubled: [i64; 3],
}

impl HalfIntegralSym3 {
    pub const fn new(diag: [i64; 3], off_doubled: [i64; 3]) -> Self {
        HalfIntegralSym3 { diag, off_doubled }
    }

    pub const fn diagonal(a: i64, b: i64, c: i64) -> Self {
        Self::new([a, b, c], [0, 0, 0])
    }

    pub fn from_matrix(m: &[[BigRational; 3]; 3]) -> Result<Self, JordanError> {
        let mut diag = [0i64; 3];
        for (i, d) in diag.iter_mut().enumerate() {
            *d = rat_to_i64(&m[i][i]).ok_or_else(|| JordanError::NotHalfIntegral(format!("diagonal entry {}", m[i][i])))?;
        }
        let mut off = [0i64; 3];
        for (k, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
            if m[i][j] != m[j][i] {
                return Err(JordanError::NotHalfIntegral("matrix is not symmetric".into()));
            }
            let two = &m[i][j] * BigRational::from_integer(2.into());
            off[k] = rat_to_i64(&two).ok_or_else(|| JordanError::NotHalfIntegral(format!("entry {}", m[i][j])))?;
        }
        Ok(Self::new(diag, off))
    }

    pub fn diag(&self) -> [i64; 3] {
        self.diag
    }

    pub fn off_doubled(&self) -> [i64; 3] {
        self.off_doubled
    }

    pub fn entry(&self, i: usize, j: usize) -> BigRational {
        if i == j {
            return rat(self.diag[i]);
        }
        let k = match (i.min(j), i.max(j)) {
            (0, 1) => 0,
            (0, 2) => 1,
            _ => 2,
        };
        BigRational::new(self.off_doubled[k].into(), 2.into())
    }

    pub fn matrix(&self) -> [[BigRational; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.entry(i, j)))
    }

    pub fn det(&self) -> BigRational {
        let m = self.matrix();
        &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
            - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    }

    fn principal_minors_2(&self) -> [BigRational; 3] {
        let m = self.matrix();
        [(0, 1), (0, 2), (1, 2)].map(|(i, j)| &m[i][i] * &m[j][j] - &m[i][j] * &m[j][i])
    }

    /// All principal minors non-negative.
    pub fn is_psd(&self) -> bool {
        self.diag.iter().all(|&d| d >= 0)
            && self.principal_minors_2().iter().all(|m| !m.is_negative())
            && !self.det().is_negative()
    }

    /// Leading principal minors positive.
    pub fn is_pd(&self) -> bool {
        self.diag[0] > 0 && self.principal_minors_2()[0].is_positive() && self.det().is_positive()
    }

    /// The symmetric matrix viewed as a Jordan element with real off-diagonal entries.
    pub fn embed(&self) -> JordanElement {
        let o = |d: i64| Octonion::from_doubled([d as i32, 0, 0, 0, 0, 0, 0, 0]);
        JordanElement::from_integers(self.diag, self.off_doubled.map(o))
    }

    /// `Tr(A·B)` for symmetric matrices.
    pub fn trace_product(&self, other: &[[BigRational; 3]; 3]) -> BigRational {
        let m = self.matrix();
        let mut s = BigRational::zero();
        for i in 0..3 {
            for j in 0..3 {
                s += &m[i][j] * &other[j][i];
            }
        }
        s
    }
}

impl fmt::Display for HalfIntegralSym3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..3 {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[{},{},{}]", self.entry(i, 0), self.entry(i, 1), self.entry(i, 2))?;
        }
        write!(f, "]")
    }
}
