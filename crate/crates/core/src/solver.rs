//! Basis tables of Siegel Fourier coefficients and the exact solve for the
//! expansion of a restriction in that basis.
//!
//! CSV layout: an optional `# weight: k` comment, a header
//! `label,<index>,<index>,...` with named indices (`O`, `u2`, `D:2`, `H`, ...),
//! then one row per basis form. Entries are integers, `num/den`, decimals,
//! or `decimal±radius` (also `decimal+-radius`) for inexact data.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::jordan::parse_rational;
use crate::restriction::NamedIndex;

pub const SCHEMA: &str = "header `label,<index>,...` (indices O,u2,u4,u6,W,S1,D:a,G,H), one row per form, \
entries `num/den`, decimal, or `decimal±radius`; optional `# weight: k` line";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("missing {0}; expected CSV with {SCHEMA}")]
    MissingFile(&'static str),
    #[error("malformed table at line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("duplicate form label {0:?}")]
    DuplicateLabel(String),
    #[error("table has no forms")]
    Empty,
    #[error("underdetermined: {columns} index columns for {forms} forms")]
    Underdetermined { columns: usize, forms: usize },
    #[error("weight {weight} space has dimension {expected}, table lists {got} forms")]
    FormCount { weight: u32, expected: usize, got: usize },
    #[error("basis columns have rank {rank} < {forms}; add columns such as {suggest}")]
    RankDeficient { rank: usize, forms: usize, suggest: String },
    #[error("right-hand side is missing column {0}")]
    MissingColumn(NamedIndex),
    #[error("right-hand side table must have exactly one data row, found {0}")]
    RhsRows(usize),
    #[error("inconsistent system at column {column}: residual {residual}")]
    Inconsistent { column: NamedIndex, residual: String },
    #[error("error radii too large for a certified enclosure")]
    IllConditioned,
}

/// One table entry: a midpoint and an error radius (zero when exact).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub mid: BigRational,
    pub radius: BigRational,
}

impl Entry {
    pub fn exact(v: BigRational) -> Self {
        Entry { mid: v, radius: BigRational::zero() }
    }

    pub fn is_exact(&self) -> bool {
        self.radius.is_zero()
    }

    pub fn parse(s: &str) -> Option<Entry> {
        let s = s.trim();
        let split = s.split_once('±').or_else(|| s.split_once("+-"));
        if let Some((m, r)) = split {
            let radius = parse_number(r)?;
            if radius.is_negative() {
                return None;
            }
            return Some(Entry { mid: parse_number(m)?, radius });
        }
        parse_number(s).map(Entry::exact)
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.mid)
        } else {
            write!(f, "{}±{}", self.mid, self.radius)
        }
    }
}

fn parse_number(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.contains('/') {
        return parse_rational(s);
    }
    parse_decimal(s)
}

/// Exact value of a decimal literal such as `-12.5e-3`.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("0{int}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut v = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        v = -v;
    }
    Some(v)
}

/// Dimension of the level-one degree-3 space for the weights that are used.
pub fn space_dimension(weight: u32) -> Option<usize> {
    match weight {
        12 => Some(4),
        14 => Some(3),
        16 => Some(7),
        18 => Some(8),
        20 => Some(11),
        _ => None,
    }
}

/// Fourier coefficients `A_{f_i}(S_j)` of a basis, rows = forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisTable {
    pub weight: Option<u32>,
    pub forms: Vec<String>,
    pub columns: Vec<NamedIndex>,
    pub entries: Vec<Vec<Entry>>,
}

/// Outcome of the rank check done at ingestion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankReport {
    pub rank: usize,
    pub forms: usize,
    /// Columns lying in the span of the earlier ones.
    pub dependent: Vec<NamedIndex>,
    /// Named indices not present in the table, offered when rank is short.
    pub suggest: Vec<NamedIndex>,
}

impl RankReport {
    pub fn is_full(&self) -> bool {
        self.rank == self.forms
    }
}

impl fmt::Display for RankReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rank {} of {}", self.rank, self.forms)?;
        if !self.dependent.is_empty() {
            write!(f, "; dependent columns: {}", join(&self.dependent))?;
        }
        if !self.is_full() {
            write!(f, "; add columns such as {}", join(&self.suggest))?;
        }
        Ok(())
    }
}

fn join(v: &[NamedIndex]) -> String {
    v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
}

struct Rows {
    weight: Option<u32>,
    header: Vec<String>,
    rows: Vec<(usize, Vec<String>)>,
}

fn read_rows(text: &str) -> Result<Rows, SolveError> {
    let mut weight = None;
    for (i, line) in text.lines().enumerate() {
        if let Some(c) = line.trim().strip_prefix('#') {
            if let Some(w) = c.trim().strip_prefix("weight") {
                let w = w.trim_start_matches([':', '=', ' ']).trim();
                weight = Some(w.parse().map_err(|_| SolveError::Malformed { line: i + 1, msg: format!("bad weight {w:?}") })?);
            }
        }
    }
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| SolveError::Malformed { line: 1, msg: e.to_string() })?
        .iter()
        .map(String::from)
        .collect();
    if header.first().map(|h| h.as_str()) != Some("label") {
        return Err(SolveError::Malformed { line: 1, msg: "header must start with `label`".into() });
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            SolveError::Malformed { line, msg: e.to_string() }
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        rows.push((line, rec.iter().map(String::from).collect()));
    }
    Ok(Rows { weight, header, rows })
}

fn parse_columns(header: &[String]) -> Result<Vec<NamedIndex>, SolveError> {
    header[1..]
        .iter()
        .map(|h| h.parse::<NamedIndex>().map_err(|e| SolveError::Malformed { line: 1, msg: e.to_string() }))
        .collect()
}

fn parse_row(line: usize, cells: &[String]) -> Result<Vec<Entry>, SolveError> {
    cells[1..]
        .iter()
        .map(|c| Entry::parse(c).ok_or_else(|| SolveError::Malformed { line, msg: format!("bad entry {c:?}") }))
        .collect()
}

impl BasisTable {
    pub fn from_csv_str(text: &str) -> Result<Self, SolveError> {
        let Rows { weight, header, rows } = read_rows(text)?;
        let columns = parse_columns(&header)?;
        let mut forms: Vec<String> = Vec::new();
        let mut entries = Vec::new();
        for (line, cells) in rows {
            let label = cells[0].clone();
            if forms.contains(&label) {
                return Err(SolveError::DuplicateLabel(label));
            }
            entries.push(parse_row(line, &cells)?);
            forms.push(label);
        }
        if forms.is_empty() {
            return Err(SolveError::Empty);
        }
        Ok(BasisTable { weight, forms, columns, entries })
    }

    pub fn is_exact(&self) -> bool {
        self.entries.iter().flatten().all(Entry::is_exact)
    }

    /// Column `j` as a vector over the forms (midpoints).
    fn column(&self, j: usize) -> Vec<BigRational> {
        self.entries.iter().map(|r| r[j].mid.clone()).collect()
    }

    pub fn validate(&self) -> Result<RankReport, SolveError> {
        let d = self.forms.len();
        if let Some(w) = self.weight {
            if let Some(expected) = space_dimension(w) {
                if expected != d {
                    return Err(SolveError::FormCount { weight: w, expected, got: d });
                }
            }
        }
        if self.columns.len() < d {
            return Err(SolveError::Underdetermined { columns: self.columns.len(), forms: d });
        }
        Ok(self.rank_report())
    }

    pub fn rank_report(&self) -> RankReport {
        let (independent, dependent) = self.greedy_columns();
        let mut suggest = Vec::new();
        if independent.len() < self.forms.len() {
            for i in NamedIndex::all_fixed().into_iter().chain((1..=3).map(NamedIndex::D)) {
                if !self.columns.contains(&i) {
                    suggest.push(i);
                }
            }
        }
        RankReport {
            rank: independent.len(),
            forms: self.forms.len(),
            dependent: dependent.into_iter().map(|j| self.columns[j]).collect(),
            suggest,
        }
    }

    /// Splits column positions into a maximal independent prefix-greedy set and the rest.
    fn greedy_columns(&self) -> (Vec<usize>, Vec<usize>) {
        let mut basis: Vec<(usize, Vec<BigRational>)> = Vec::new();
        let (mut ind, mut dep) = (Vec::new(), Vec::new());
        for j in 0..self.columns.len() {
            let mut v = self.column(j);
            for (p, b) in &basis {
                if !v[*p].is_zero() {
                    let f = &v[*p] / &b[*p];
                    for (x, y) in v.iter_mut().zip(b) {
                        *x -= &f * y;
                    }
                }
            }
            match v.iter().position(|x| !x.is_zero()) {
                Some(p) => {
                    basis.push((p, v));
                    ind.push(j);
                }
                None => dep.push(j),
            }
        }
        (ind, dep)
    }
}

/// Reads and validates a basis table. Rank deficiency is reported, not fatal.
pub fn ingest(path: impl AsRef<Path>) -> Result<(BasisTable, RankReport), SolveError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| SolveError::Io { path: path.display().to_string(), msg: e.to_string() })?;
    let table = BasisTable::from_csv_str(&text)?;
    let report = table.validate()?;
    Ok((table, report))
}

/// Restriction coefficients `A_{F|Sp6}(S_j)` for the columns of a basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientTable {
    pub label: String,
    pub columns: Vec<NamedIndex>,
    pub values: Vec<Entry>,
}

impl CoefficientTable {
    pub fn new(label: impl Into<String>, values: Vec<(NamedIndex, BigRational)>) -> Self {
        let (columns, values) = values.into_iter().map(|(i, v)| (i, Entry::exact(v))).unzip();
        CoefficientTable { label: label.into(), columns, values }
    }

    pub fn from_csv_str(text: &str) -> Result<Self, SolveError> {
        let Rows { header, rows, .. } = read_rows(text)?;
        let columns = parse_columns(&header)?;
        if rows.len() != 1 {
            return Err(SolveError::RhsRows(rows.len()));
        }
        let (line, cells) = &rows[0];
        Ok(CoefficientTable { label: cells[0].clone(), columns, values: parse_row(*line, cells)? })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, SolveError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| SolveError::Io { path: path.display().to_string(), msg: e.to_string() })?;
        Self::from_csv_str(&text)
    }

    pub fn get(&self, i: NamedIndex) -> Option<&Entry> {
        self.columns.iter().position(|&c| c == i).map(|p| &self.values[p])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub forms: Vec<String>,
    pub coefficients: Vec<BigRational>,
    /// Enclosure radii; `None` when every input was exact.
    pub radii: Option<Vec<BigRational>>,
    /// Columns used to determine the coefficients.
    pub pivot_columns: Vec<NamedIndex>,
    /// Remaining columns, checked for consistency.
    pub check_columns: Vec<NamedIndex>,
    /// `Σ c_i A_{f_i}(S_j) − b_j` at the midpoints, for every column.
    pub residuals: Vec<(NamedIndex, BigRational)>,
}

impl SolveResult {
    pub fn is_exact(&self) -> bool {
        self.radii.is_none()
    }
}

/// Solves `Σ_i c_i A_{f_i}(S_j) = b_j` for the `c_i`.
pub fn solve_expansion(basis: &BasisTable, rhs: &CoefficientTable) -> Result<SolveResult, SolveError> {
    let d = basis.forms.len();
    if basis.columns.len() < d {
        return Err(SolveError::Underdetermined { columns: basis.columns.len(), forms: d });
    }
    let b: Vec<Entry> = basis
        .columns
        .iter()
        .map(|&c| rhs.get(c).cloned().ok_or(SolveError::MissingColumn(c)))
        .collect::<Result<_, _>>()?;
    let (pivots, checks) = basis.greedy_columns();
    if pivots.len() < d {
        let report = basis.rank_report();
        return Err(SolveError::RankDeficient { rank: pivots.len(), forms: d, suggest: join(&report.suggest) });
    }
    // Row j of the square system is column pivots[j] of the table.
    let m: Vec<Vec<BigRational>> = pivots.iter().map(|&j| basis.column(j)).collect();
    let bm: Vec<Vec<BigRational>> = pivots.iter().map(|&j| vec![b[j].mid.clone()]).collect();
    let c: Vec<BigRational> = bareiss_solve(&m, &bm).ok_or(SolveError::IllConditioned)?.into_iter().map(|mut r| r.remove(0)).collect();

    let residual = |j: usize| -> BigRational {
        let mut s = -b[j].mid.clone();
        for (i, ci) in c.iter().enumerate() {
            s += ci * &basis.entries[i][j].mid;
        }
        s
    };
    let residuals: Vec<(NamedIndex, BigRational)> = (0..basis.columns.len()).map(|j| (basis.columns[j], residual(j))).collect();

    let exact = basis.is_exact() && b.iter().all(Entry::is_exact);
    let radii = if exact {
        for &j in &pivots {
            assert!(residuals[j].1.is_zero(), "nonzero residual on a pivot column");
        }
        for &j in &checks {
            if !residuals[j].1.is_zero() {
                return Err(SolveError::Inconsistent { column: basis.columns[j], residual: residuals[j].1.to_string() });
            }
        }
        None
    } else {
        let radii = enclosure(basis, &pivots, &m, &b, &c)?;
        for &j in &checks {
            // |Σ c_i A_ij − b_j| must fit inside the propagated uncertainty.
            let mut slack = b[j].radius.clone();
            for (i, ci) in c.iter().enumerate() {
                let e = &basis.entries[i][j];
                slack += (e.mid.abs() + &e.radius) * &radii[i] + &e.radius * ci.abs();
            }
            if residuals[j].1.abs() > slack {
                return Err(SolveError::Inconsistent { column: basis.columns[j], residual: residuals[j].1.to_string() });
            }
        }
        Some(radii)
    };
    Ok(SolveResult {
        forms: basis.forms.clone(),
        coefficients: c,
        radii,
        pivot_columns: pivots.iter().map(|&j| basis.columns[j]).collect(),
        check_columns: checks.iter().map(|&j| basis.columns[j]).collect(),
        residuals,
    })
}

/// Componentwise radii containing every solution of `(M+ΔM)c = b+Δb` with
/// `|ΔM| ≤ R`, `|Δb| ≤ r`.
fn enclosure(
    basis: &BasisTable,
    pivots: &[usize],
    m: &[Vec<BigRational>],
    b: &[Entry],
    c: &[BigRational],
) -> Result<Vec<BigRational>, SolveError> {
    let d = c.len();
    let id: Vec<Vec<BigRational>> =
        (0..d).map(|i| (0..d).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect();
    let inv = bareiss_solve(m, &id).ok_or(SolveError::IllConditioned)?;
    let abs_inv: Vec<Vec<BigRational>> = inv.iter().map(|r| r.iter().map(|x| x.abs()).collect()).collect();
    // System row k is pivot column pivots[k]; entry (k, i) = A_{f_i}(S_{pivots[k]}).
    let rad = |k: usize, i: usize| basis.entries[i][pivots[k]].radius.clone();
    let v: Vec<BigRational> = (0..d)
        .map(|k| {
            let mut s = b[pivots[k]].radius.clone();
            for (i, ci) in c.iter().enumerate() {
                s += rad(k, i) * ci.abs();
            }
            s
        })
        .collect();
    let u: Vec<BigRational> = (0..d).map(|i| dot(&abs_inv[i], &v)).collect();
    let row_r: Vec<BigRational> = (0..d).map(|k| (0..d).fold(BigRational::zero(), |s, i| s + rad(k, i))).collect();
    let p1: Vec<BigRational> = (0..d).map(|i| dot(&abs_inv[i], &row_r)).collect();
    let norm_p = p1.iter().max().cloned().unwrap_or_else(BigRational::zero);
    if norm_p >= BigRational::one() {
        return Err(SolveError::IllConditioned);
    }
    let norm_u = u.iter().max().cloned().unwrap_or_else(BigRational::zero);
    let eps = norm_u / (BigRational::one() - norm_p);
    Ok((0..d).map(|i| &u[i] + &p1[i] * &eps).collect())
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |s, (x, y)| s + x * y)
}

/// Fraction-free elimination for `M X = B` with `M` square. Returns `None`
/// when `M` is singular.
pub fn bareiss_solve(m: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let r = b.first().map_or(0, |row| row.len());
    let width = n + r;
    // Scale each augmented row to integers.
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let row: Vec<&BigRational> = m[i].iter().chain(b[i].iter()).collect();
            let l = row.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero())?;
        a.swap(k, p);
        for i in k + 1..n {
            for j in k + 1..width {
                let v = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let mut x = vec![vec![BigRational::zero(); r]; n];
    for col in 0..r {
        for i in (0..n).rev() {
            let mut s = BigRational::from_integer(a[i][n + col].clone());
            for j in i + 1..n {
                s -= BigRational::from_integer(a[i][j].clone()) * &x[j][col];
            }
            x[i][col] = s / BigRational::from_integer(a[i][i].clone());
        }
    }
    Some(x)
}
