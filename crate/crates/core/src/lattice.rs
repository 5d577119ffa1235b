//! Enumeration over the integral octonions `o` and the imaginary lattice `o'`.
//!
//! Integral elements are exactly the vectors of doubled coordinates whose
//! parity pattern lies in a 16-word binary code (the image of the α-basis
//! mod 2), since `o` contains `Z^8` with index 16. Shells are enumerated by
//! fixing a codeword and filling coordinates of the right parity.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::jordan::{HalfIntegralSym3, IntegralJordan};
use crate::octonion::{dot_doubled, mul_doubled, Octonion, ALPHA_DOUBLED};

/// Largest norm accepted by the triple counters.
pub const MAX_TRIPLE_NORM: u64 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("norm {norm} outside the supported range 0..={max}")]
    NormOutOfRange { norm: u64, max: u64 },
    #[error("index matrix {0} is not positive semi-definite")]
    NotPsd(String),
}

fn parity_code() -> &'static [[i32; 8]] {
    static CODE: OnceLock<Vec<[i32; 8]>> = OnceLock::new();
    CODE.get_or_init(|| {
        let gens: Vec<[i32; 8]> = ALPHA_DOUBLED.iter().map(|r| r.map(|v| v.rem_euclid(2))).collect();
        let mut words = vec![[0i32; 8]];
        for g in gens {
            if words.contains(&g) {
                continue;
            }
            let extra: Vec<[i32; 8]> = words
                .iter()
                .map(|w| std::array::from_fn(|i| (w[i] + g[i]) % 2))
                .collect();
            for e in extra {
                if !words.contains(&e) {
                    words.push(e);
                }
            }
        }
        words.sort();
        words
    })
}

/// Calls `f` on every integral doubled vector with `Σ dc² = norm4`,
/// optionally with `dc₀` fixed.
pub fn visit_sphere(norm4: i64, real: Option<i32>, mut f: impl FnMut(&[i32; 8])) {
    if norm4 < 0 {
        return;
    }
    for word in parity_code() {
        let mut dc = [0i32; 8];
        let (start, rem) = match real {
            Some(r) => {
                if r.rem_euclid(2) != word[0] {
                    continue;
                }
                dc[0] = r;
                (1, norm4 - (r as i64) * (r as i64))
            }
            None => (0, norm4),
        };
        if rem < 0 {
            continue;
        }
        let odd_after: [i64; 9] = std::array::from_fn(|i| word[i.min(8)..].iter().map(|&b| b as i64).sum());
        fill(&mut dc, start, rem, word, &odd_after, &mut f);
    }
}

fn fill(dc: &mut [i32; 8], pos: usize, rem: i64, word: &[i32; 8], odd_after: &[i64; 9], f: &mut impl FnMut(&[i32; 8])) {
    if pos == 7 {
        let v = isqrt(rem);
        if v * v != rem || (v % 2) as i32 != word[7] {
            return;
        }
        if v == 0 {
            dc[7] = 0;
            f(dc);
        } else {
            dc[7] = -(v as i32);
            f(dc);
            dc[7] = v as i32;
            f(dc);
        }
        return;
    }
    let need = odd_after[pos + 1];
    let lim = isqrt(rem - need.min(rem));
    let parity = word[pos] as i64;
    let mut v = -lim;
    if (v - parity).rem_euclid(2) != 0 {
        v += 1;
    }
    while v <= lim {
        let r = rem - v * v;
        if r >= need {
            dc[pos] = v as i32;
            fill(dc, pos + 1, r, word, odd_after, f);
        }
        v += 2;
    }
}

pub(crate) fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// All lattice elements of one norm, sorted lexicographically on doubled coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shell {
    pub norm: u64,
    pub elements: Vec<Octonion>,
}

impl Shell {
    fn collect(norm: u64, real: Option<i32>, imaginary: bool) -> Shell {
        let mut elements = Vec::new();
        let real = if imaginary { Some(0) } else { real };
        visit_sphere(4 * norm as i64, real, |dc| elements.push(Octonion::from_doubled(*dc)));
        elements.sort();
        Shell { norm, elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Octonion> {
        self.elements.iter()
    }

    fn doubled(&self) -> Vec<[i32; 8]> {
        self.elements.iter().map(|o| *o.doubled()).collect()
    }
}

/// `{x ∈ o : N(x) = n}`; `n = 0` gives `{0}`.
pub fn shell_full(n: u64) -> Shell {
    Shell::collect(n, None, false)
}

/// `{x ∈ o' : N(x) = n}`.
pub fn shell_imaginary(n: u64) -> Shell {
    Shell::collect(n, None, true)
}

/// `{x ∈ o : N(x) = n, 2·x₀ = real_doubled}`.
pub fn shell_with_real(n: u64, real_doubled: i32) -> Shell {
    Shell::collect(n, Some(real_doubled), false)
}

/// `N_oc(n)` without materializing the shell.
pub fn count_full(n: u64) -> u64 {
    let mut c = 0u64;
    visit_sphere(4 * n as i64, None, |_| c += 1);
    c
}

/// `N_ioc(n)` without materializing the shell.
pub fn count_imaginary(n: u64) -> u64 {
    let mut c = 0u64;
    visit_sphere(4 * n as i64, Some(0), |_| c += 1);
    c
}

/// `[N_ioc(0), …, N_ioc(max)]` with `N_ioc(0) = 1`.
pub fn imaginary_shell_counts(max: u64) -> Vec<u64> {
    (0..=max).map(count_imaginary).collect()
}

/// Imaginary `x` with `½ + x ∈ o` and `N(½ + x) = norm`.
pub fn count_half_shifted(norm: u64) -> u64 {
    if norm == 0 {
        return 0;
    }
    shell_with_real(norm, 1).len() as u64
}

fn shifted_units() -> Vec<Octonion> {
    shell_with_real(1, 1).elements
}

/// Pairs `(x, y)` of half-shifted units with `(½ + x̄)(½ + y) = ½ + z`, `z` imaginary.
pub fn count_pairs_shifted_shifted() -> u64 {
    let h = shifted_units();
    h.iter()
        .map(|u| h.iter().filter(|v| (u.conj() * **v).real_doubled() == 1).count() as u64)
        .sum()
}

/// Pairs with `½ + x` a half-shifted unit, `y ∈ o'` of norm 1 and `(½ + x̄) y` imaginary.
pub fn count_pairs_shifted_integral() -> u64 {
    let h = shifted_units();
    let e7 = shell_imaginary(1);
    h.iter()
        .map(|u| e7.iter().filter(|y| (u.conj() * **y).is_imaginary()).count() as u64)
        .sum()
}

/// Same as [`count_pairs_shifted_integral`] with `(½ + x) y` in place of `(½ + x̄) y`.
pub fn count_pairs_shifted_integral_unconjugated() -> u64 {
    let h = shifted_units();
    let e7 = shell_imaginary(1);
    h.iter()
        .map(|u| e7.iter().filter(|y| (*u * **y).is_imaginary()).count() as u64)
        .sum()
}

/// `#{(x, y) ∈ o' × o' : N(x) = 1, N(y) = m, x̄y ∈ o'}`.
pub fn count_pairs_imaginary_product_norm(m: u64) -> u64 {
    let e7 = shell_imaginary(1).doubled();
    let ys = shell_imaginary(m).doubled();
    ys.par_iter()
        .map(|y| {
            e7.iter()
                .filter(|x| {
                    let xc = conj_doubled(x);
                    let p = mul_doubled(&xc, y).expect("integral product");
                    p[0] == 0
                })
                .count() as u64
        })
        .sum()
}

/// `#{(x, y) ∈ o' × o' : N(x) = N(y) = 1, x̄y ∈ o'}`.
pub fn count_pairs_imaginary_product() -> u64 {
    count_pairs_imaginary_product_norm(1)
}

fn conj_doubled(x: &[i32; 8]) -> [i32; 8] {
    let mut c = x.map(|v| -v);
    c[0] = x[0];
    c
}

/// `#{(y, z) ∈ o'² : N(y) + N(z) = m, N(y) < a, N(z) < a}`.
pub fn count_pairs_by_norm_sum(a: u64, m: u64) -> u64 {
    if a == 0 {
        return 0;
    }
    let counts = imaginary_shell_counts(m.min(a - 1));
    (0..=m)
        .filter(|&i| i < a && m - i < a)
        .map(|i| counts[i as usize] * counts[(m - i) as usize])
        .sum()
}

/// `#{(y, z) ∈ o'² : N(y) + N(z) = m}` with no upper bound on the parts.
pub fn count_pairs_with_norm_sum(m: u64) -> u64 {
    let counts = imaginary_shell_counts(m);
    (0..=m).map(|i| counts[i as usize] * counts[(m - i) as usize]).sum()
}

/// Count of triples in `S_{(n1,n2,n3)}(t)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TripleStat {
    pub norms: (u64, u64, u64),
    pub t: i64,
    pub count: BigUint,
}

/// Largest `t` with `t ≤ 2√(n1 n2 n3)`.
pub fn trace_bound(n1: u64, n2: u64, n3: u64) -> i64 {
    isqrt(4 * (n1 * n2 * n3) as i64)
}

fn check_norms(ns: [u64; 3]) -> Result<(), LatticeError> {
    match ns.iter().find(|&&n| n > MAX_TRIPLE_NORM) {
        Some(&norm) => Err(LatticeError::NormOutOfRange { norm, max: MAX_TRIPLE_NORM }),
        None => Ok(()),
    }
}

/// Histogram of `t = tr((xz)ȳ)` over `x, y, z ∈ o'` with `N(x) = n1`,
/// `N(y) = n2`, `N(z) = n3`.
///
/// The outer loop over `x` runs on the current rayon pool with per-worker
/// counters, so the result does not depend on the number of workers.
pub fn triple_histogram(n1: u64, n2: u64, n3: u64) -> Result<BTreeMap<i64, BigUint>, LatticeError> {
    check_norms([n1, n2, n3])?;
    let xs = shell_imaginary(n1).doubled();
    let ys = shell_imaginary(n2).doubled();
    let zs = shell_imaginary(n3).doubled();
    let bound = trace_bound(n1, n2, n3);
    let width = (2 * bound + 1) as usize;
    let hist = xs
        .par_iter()
        .fold(
            || vec![0u64; width],
            |mut acc, x| {
                for z in &zs {
                    let w = mul_doubled(x, z).expect("integral product");
                    for y in &ys {
                        let d = dot_doubled(&w, y);
                        debug_assert!(d % 2 == 0);
                        acc[(d / 2 + bound) as usize] += 1;
                    }
                }
                acc
            },
        )
        .reduce(|| vec![0u64; width], |a, b| a.iter().zip(&b).map(|(p, q)| p + q).collect());
    Ok(hist
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c > 0)
        .map(|(i, c)| (i as i64 - bound, BigUint::from(c)))
        .collect())
}

/// `|S_{(n1,n2,n3)}(t)|`; zero when `|t|` exceeds the Cauchy–Schwarz bound.
pub fn triple_count(n1: u64, n2: u64, n3: u64, t: i64) -> Result<TripleStat, LatticeError> {
    check_norms([n1, n2, n3])?;
    let count = if t.abs() > trace_bound(n1, n2, n3) {
        BigUint::zero()
    } else {
        triple_histogram(n1, n2, n3)?.remove(&t).unwrap_or_default()
    };
    Ok(TripleStat { norms: (n1, n2, n3), t, count })
}

/// `(n1, n2, n3, t, d3)` with `d3 = 8 − 2(n1+n2+n3) + t`.
pub type SEntry = (u64, u64, u64, i64, i64);

/// Norm/trace patterns admissible for a positive definite `T` with `T₁ = diag(2,2,2)`.
pub fn build_s_set() -> Vec<SEntry> {
    let mut out = Vec::new();
    for n1 in 0..=3u64 {
        for n2 in 0..=3u64 {
            for n3 in 0..=3u64 {
                let b = trace_bound(n1, n2, n3);
                for t in -b..=b {
                    let d3 = 8 - 2 * (n1 + n2 + n3) as i64 + t;
                    if d3 > 0 {
                        out.push((n1, n2, n3, t, d3));
                    }
                }
            }
        }
    }
    out
}

/// One representative per 𝔖₃-orbit (norms sorted descending) with the orbit size.
pub fn s_orbits() -> Vec<(SEntry, usize)> {
    let mut orbits: BTreeMap<SEntry, usize> = BTreeMap::new();
    for (n1, n2, n3, t, d) in build_s_set() {
        let mut ns = [n1, n2, n3];
        ns.sort_unstable_by(|a, b| b.cmp(a));
        *orbits.entry((ns[0], ns[1], ns[2], t, d)).or_default() += 1;
    }
    orbits.into_iter().collect()
}

/// `d(T)` for `T = diag(2,2,2) + T₂` as a function of the norm/trace pattern.
pub fn diag222_invariants(e: SEntry) -> (u64, u64, u64) {
    let (n1, n2, n3, _, d3) = e;
    let nonzero: Vec<u64> = [n1, n2, n3].into_iter().filter(|&n| n > 0).collect();
    match nonzero.as_slice() {
        [] => (2, 4, 8),
        [1] => (1, 1, 6),
        [2] => (1, 2, 4),
        [3] => (1, 1, 2),
        _ => (1, 1, d3 as u64),
    }
}

/// Column order of the diag(2,2,2) fiber table.
pub const TABLE1_COLUMNS: [(u64, u64, u64); 7] = [(1, 1, 1), (1, 1, 2), (1, 1, 3), (1, 1, 4), (1, 1, 6), (1, 2, 4), (2, 4, 8)];

/// Counts of `T ∈ J(Z)_{>0}` with `T₁ = diag(2,2,2)` by `d(T)`, assembled
/// from orbit representatives of the pattern set and triple histograms.
pub fn table_diag222() -> BTreeMap<(u64, u64, u64), BigUint> {
    let shells = imaginary_shell_counts(3);
    let mut hist_cache: BTreeMap<(u64, u64, u64), BTreeMap<i64, BigUint>> = BTreeMap::new();
    let mut table: BTreeMap<(u64, u64, u64), BigUint> = BTreeMap::new();
    for (rep, mult) in s_orbits() {
        let (n1, n2, n3, t, _) = rep;
        let count = if n1 == 0 || n2 == 0 || n3 == 0 {
            BigUint::from(shells[n1 as usize] * shells[n2 as usize] * shells[n3 as usize])
        } else {
            let h = hist_cache
                .entry((n1, n2, n3))
                .or_insert_with(|| triple_histogram(n1, n2, n3).expect("norms within range"));
            h.get(&t).cloned().unwrap_or_default()
        };
        *table.entry(diag222_invariants(rep)).or_default() += count * BigUint::from(mult);
    }
    table
}

/// The same table by direct enumeration of the fiber over `diag(2,2,2)`,
/// computing `d(T)` from each member.
pub fn table_diag222_direct() -> BTreeMap<(u64, u64, u64), BigUint> {
    let h = HalfIntegralSym3::diagonal(2, 2, 2);
    let counts = fiber_fold(
        &h,
        true,
        1,
        BTreeMap::<(u64, u64, u64), u64>::new,
        |mut acc, m| {
            let d1 = m.t.content();
            let d2 = m.t.cross().content();
            *acc.entry((d1, d2, m.det as u64)).or_default() += 1;
            acc
        },
        merge_counts,
    )
    .expect("diag(2,2,2) is positive definite");
    counts.into_iter().map(|(k, v)| (k, BigUint::from(v))).collect()
}

pub(crate) fn merge_counts<K: Ord>(mut a: BTreeMap<K, u64>, b: BTreeMap<K, u64>) -> BTreeMap<K, u64> {
    for (k, v) in b {
        *a.entry(k).or_default() += v;
    }
    a
}

/// One member of a fiber `{T : T₁ = S}`.
#[derive(Debug, Clone, Copy)]
pub struct FiberMember {
    pub t: IntegralJordan,
    pub det: i64,
}

struct Candidates {
    /// `(norm, elements)` grouped by norm, ascending.
    groups: Vec<(i64, Vec<[i32; 8]>)>,
}

impl Candidates {
    /// Integral octonions with `2·w₀ = real` and `N(w) ≤ bound`.
    fn new(real: i32, bound: i64) -> Self {
        let mut groups = Vec::new();
        let lo = ((real as i64) * (real as i64) + 3) / 4;
        for n in lo..=bound.max(-1) {
            let mut v = Vec::new();
            visit_sphere(4 * n, Some(real), |dc| v.push(*dc));
            if !v.is_empty() {
                v.sort();
                groups.push((n, v));
            }
        }
        Candidates { groups }
    }

    fn flat(&self) -> Vec<(i64, [i32; 8])> {
        self.groups.iter().flat_map(|(n, v)| v.iter().map(move |d| (*n, *d))).collect()
    }
}

/// Folds over every `T ∈ J(Z)` with `T₁ = S` that is positive definite
/// (`strict`) or positive semi-definite.
///
/// Each octonion entry `w_ij` has real part `s_ij` and `N(w_ij) ≤ s_ii s_jj`,
/// so the search is finite for any psd `S`. `bound_scale ≥ 1` widens the
/// norm search radius without changing the positivity filter, which is how
/// completeness is tested. The outer loop over the (1,2) entry is split
/// across the rayon pool; `fold`/`reduce` must be commutative.
pub fn fiber_fold<A, ID, F, R>(
    s: &HalfIntegralSym3,
    strict: bool,
    bound_scale: i64,
    identity: ID,
    fold: F,
    reduce: R,
) -> Result<A, LatticeError>
where
    A: Send,
    ID: Fn() -> A + Sync + Send,
    F: Fn(A, FiberMember) -> A + Sync + Send,
    R: Fn(A, A) -> A + Sync + Send,
{
    if !s.is_psd() {
        return Err(LatticeError::NotPsd(s.to_string()));
    }
    let [a, b, c] = s.diag();
    let off = s.off_doubled();
    let scale = bound_scale.max(1);
    let xs = Candidates::new(off[0] as i32, a * b * scale);
    let ys = Candidates::new(off[1] as i32, a * c * scale);
    let zs = Candidates::new(off[2] as i32, b * c * scale);
    let minor_ok = |m: i64| if strict { m > 0 } else { m >= 0 };
    let diag_ok = [a, b, c].iter().all(|&d| minor_ok(d));
    if !diag_ok {
        return Ok(identity());
    }
    let x_flat: Vec<(i64, [i32; 8])> = xs.flat().into_iter().filter(|(n, _)| minor_ok(a * b - n)).collect();
    let y_groups: Vec<&(i64, Vec<[i32; 8]>)> = ys.groups.iter().filter(|(n, _)| minor_ok(a * c - n)).collect();
    let z_groups: Vec<&(i64, Vec<[i32; 8]>)> = zs.groups.iter().filter(|(n, _)| minor_ok(b * c - n)).collect();

    let result = x_flat
        .par_iter()
        .fold(&identity, |mut acc, &(nx, x)| {
            let xo = Octonion::from_doubled(x);
            for (nz, zg) in &z_groups {
                let live: Vec<&(i64, Vec<[i32; 8]>)> = y_groups
                    .iter()
                    .copied()
                    .filter(|(ny, _)| {
                        let base = a * b * c - a * nz - b * ny - c * nx;
                        let tmax = isqrt(4 * nx * ny * nz);
                        minor_ok(base + tmax)
                    })
                    .collect();
                if live.is_empty() {
                    continue;
                }
                for z in zg {
                    let w = mul_doubled(&x, z).expect("integral product");
                    let zo = Octonion::from_doubled(*z);
                    for (ny, yg) in &live {
                        let base = a * b * c - a * nz - b * ny - c * nx;
                        for y in yg {
                            let det = base + dot_doubled(&w, y) / 2;
                            if minor_ok(det) {
                                let t = IntegralJordan::new_unchecked([a, b, c], [xo, Octonion::from_doubled(*y), zo]);
                                acc = fold(acc, FiberMember { t, det });
                            }
                        }
                    }
                }
            }
            acc
        })
        .reduce(&identity, &reduce);
    Ok(result)
}

/// Number of members of a fiber.
pub fn fiber_size(s: &HalfIntegralSym3, strict: bool) -> Result<u64, LatticeError> {
    fiber_fold(s, strict, 1, || 0u64, |n, _| n + 1, |p, q| p + q)
}
