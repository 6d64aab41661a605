//! Counting k-edge matchings of the arc diagrams `Γ(C_n)` and `Γ(D_n)`.
//!
//! Four independent routes are provided and must agree:
//! direct enumeration over the template's edges, the closed binomial sums,
//! the four-term recurrences, and coefficient extraction from the bivariate
//! generating functions.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::{build_template, Template, TemplateKind};
use crate::ring::{binomial_counted, binomial_signed, ceil_half, floor_half, BigInt, OpCounter};

/// The two Toeplitz families with closed-form matching counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// First row `0 0 1 0 … 0`.
    C,
    /// First row `0 1 1 0 … 0`.
    D,
}

impl Family {
    pub fn template(self, n: usize) -> Template {
        let kind = match self {
            Family::C => TemplateKind::C,
            Family::D => TemplateKind::D,
        };
        build_template(kind, n).expect("built-in templates are valid")
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::C => "C",
            Family::D => "D",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How a [`MatchingTable`] is filled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Closed,
    Recurrence,
    Series,
    Brute,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Closed,
        Method::Recurrence,
        Method::Series,
        Method::Brute,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::Recurrence => "recurrence",
            Method::Series => "series",
            Method::Brute => "brute",
        }
    }
}

// ---------------------------------------------------------------------------
// enumeration

fn count_rec(edges: &[(usize, usize)], used: u64, size: usize, counts: &mut [BigInt]) {
    counts[size] += 1u32;
    for (idx, &(i, j)) in edges.iter().enumerate() {
        let bits = (1u64 << i) | (1u64 << j);
        if used & bits == 0 {
            count_rec(&edges[idx + 1..], used | bits, size + 1, counts);
        }
    }
}

/// `μ_k` for every `k ≤ floor(n/2)` by enumerating all matchings of the template's graph.
///
/// Each matching is generated once, as an increasing sequence of edges.
pub fn matching_counts(t: &Template) -> Vec<BigInt> {
    let n = t.order();
    assert!(n <= 64, "enumeration supports at most 64 vertices");
    let mut counts = vec![BigInt::zero(); n / 2 + 1];
    count_rec(&t.edges(), 0, 0, &mut counts);
    counts
}

/// Number of `k`-edge matchings of `Γ(t)` by enumeration; `μ_0 = 1`.
pub fn mu_bruteforce(t: &Template, k: usize) -> BigInt {
    if k > t.order() / 2 {
        return BigInt::zero();
    }
    matching_counts(t).swap_remove(k)
}

// ---------------------------------------------------------------------------
// closed forms

/// `μ_k(Γ(C_n))` as a single binomial sum over `i`.
///
/// Zero when `k > floor(n/2)` or when `k` is odd and `n = 2k`.
pub fn mu_c_closed(n: u64, k: u64) -> BigInt {
    mu_c_closed_counted(n, k, &mut OpCounter::default())
}

pub(crate) fn mu_c_closed_counted(n: u64, k: u64, ops: &mut OpCounter) -> BigInt {
    if k > n / 2 || (k % 2 == 1 && n == 2 * k) {
        return BigInt::zero();
    }
    let (n, k) = (n as i64, k as i64);
    let lo = ceil_half(3 * k - n).max(0);
    let hi = floor_half(k);
    let mut sum = BigInt::zero();
    for i in lo..=hi {
        let term = binomial_signed(n - 2 * k + i, k - i, ops) * binomial_signed(k - i, i, ops);
        sum += term;
        ops.ring_ops += 2;
    }
    sum
}

/// `μ_k(Γ(D_n))` as a double binomial sum over `(i, p)`; zero when `k > floor(n/2)`.
pub fn mu_d_closed(n: u64, k: u64) -> BigInt {
    mu_d_closed_counted(n, k, &mut OpCounter::default())
}

pub(crate) fn mu_d_closed_counted(n: u64, k: u64, ops: &mut OpCounter) -> BigInt {
    if k > n / 2 {
        return BigInt::zero();
    }
    let (n, k) = (n as i64, k as i64);
    let mut sum = BigInt::zero();
    for i in 0..=k.min(floor_half(n - k)) {
        let p_lo = (i + 2 * k - n).max(0);
        let p_hi = i.min(k - i);
        for p in p_lo..=p_hi {
            let term = binomial_signed(n - k - i, k - p, ops)
                * binomial_signed(k - p, i, ops)
                * binomial_counted(i as u64, p, ops);
            sum += term;
            ops.ring_ops += 3;
        }
    }
    sum
}

/// `μ_k(K_n)`, the complete graph: choose `2k` vertices, then pair them.
pub fn mu_complete(n: u64, k: u64) -> BigInt {
    crate::ring::binomial(n, 2 * k as i64) * crate::ring::pairing_count(k)
}

/// Evaluates both sides of the equivalence
/// `ceil((3k-n)/2) ≤ floor(k/2)  ⇔  k ≤ floor(n/2)`,
/// which holds whenever it is not the case that `k` is odd and `n = 2k`.
pub fn bounds_equivalence(n: u64, k: u64) -> Result<(bool, bool)> {
    if k % 2 == 1 && n == 2 * k {
        return Err(Error::Hypothesis { n, k });
    }
    let (ni, ki) = (n as i64, k as i64);
    Ok((ceil_half(3 * ki - ni) <= floor_half(ki), k <= n / 2))
}

// ---------------------------------------------------------------------------
// tables and recurrences

/// `μ_k(Γ(T_n))` for `0 ≤ n ≤ n_max`, stored as ragged rows `values[n][0..=n/2]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingTable {
    pub family: Family,
    pub n_max: usize,
    values: Vec<Vec<BigInt>>,
}

impl MatchingTable {
    fn from_fn(family: Family, n_max: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let values = (0..=n_max)
            .map(|n| (0..=n / 2).map(|k| f(n, k)).collect())
            .collect();
        Self {
            family,
            n_max,
            values,
        }
    }

    /// Fills the table with the requested method.
    pub fn compute(family: Family, n_max: usize, method: Method) -> Self {
        match method {
            Method::Closed => Self::from_fn(family, n_max, |n, k| match family {
                Family::C => mu_c_closed(n as u64, k as u64),
                Family::D => mu_d_closed(n as u64, k as u64),
            }),
            Method::Recurrence => match family {
                Family::C => mu_c_recurrence(n_max),
                Family::D => mu_d_recurrence(n_max),
            },
            Method::Series => {
                let s = gf_series(family, n_max);
                Self::from_fn(family, n_max, |n, k| s.coeff(n, k))
            }
            Method::Brute => {
                let rows: Vec<Vec<BigInt>> = (0..=n_max)
                    .map(|n| matching_counts(&family.template(n)))
                    .collect();
                Self {
                    family,
                    n_max,
                    values: rows,
                }
            }
        }
    }

    /// `μ_k(Γ(T_n))`; zero outside the stored range.
    pub fn get(&self, n: usize, k: usize) -> BigInt {
        self.values
            .get(n)
            .and_then(|row| row.get(k))
            .cloned()
            .unwrap_or_default()
    }

    pub fn row(&self, n: usize) -> &[BigInt] {
        &self.values[n]
    }

    /// Number of `k` rows in the rendered table, `floor(n_max/2) + 1`.
    pub fn k_max(&self) -> usize {
        self.n_max / 2
    }

    /// Rectangular grid in display orientation: `grid[k][n]`, zero padded.
    pub fn grid(&self) -> Vec<Vec<BigInt>> {
        (0..=self.k_max())
            .map(|k| (0..=self.n_max).map(|n| self.get(n, k)).collect())
            .collect()
    }

    /// CSV with one column per `n` and one row per `k`; zero cells are left empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k\\n");
        for n in 0..=self.n_max {
            out.push_str(&format!(",{n}"));
        }
        out.push('\n');
        for (k, row) in self.grid().iter().enumerate() {
            out.push_str(&k.to_string());
            for v in row {
                out.push(',');
                if !v.is_zero() {
                    out.push_str(&v.to_string());
                }
            }
            out.push('\n');
        }
        out
    }
}

fn recurrence_table(
    family: Family,
    n_max: usize,
    first_row: impl Fn(usize) -> BigInt,
    step: impl Fn(&[Vec<BigInt>], usize, usize) -> BigInt,
) -> MatchingTable {
    let mut values: Vec<Vec<BigInt>> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut row = Vec::with_capacity(n / 2 + 1);
        for k in 0..=n / 2 {
            let v = match k {
                0 => BigInt::one(),
                1 => first_row(n),
                _ => step(&values, n, k),
            };
            row.push(v);
        }
        values.push(row);
    }
    MatchingTable {
        family,
        n_max,
        values,
    }
}

fn at(values: &[Vec<BigInt>], n: usize, k: usize) -> BigInt {
    values[n].get(k).cloned().unwrap_or_default()
}

/// `v_{n,k} = v_{n-1,k} + v_{n-3,k-1} + v_{n-4,k-2}` from `v_{n,0} = 1`, `v_{n,1} = n - 2`.
pub fn mu_c_recurrence(n_max: usize) -> MatchingTable {
    recurrence_table(
        Family::C,
        n_max,
        |n| BigInt::from(n as i64 - 2),
        // k ≥ 2 is only stored when n ≥ 4
        |v, n, k| at(v, n - 1, k) + at(v, n - 3, k - 1) + at(v, n - 4, k - 2),
    )
}

/// `w_{n,k} = w_{n-1,k} + w_{n-2,k-1} + w_{n-3,k-1} + w_{n-4,k-2}` from `w_{n,0} = 1`, `w_{n,1} = 2n - 3`.
pub fn mu_d_recurrence(n_max: usize) -> MatchingTable {
    recurrence_table(
        Family::D,
        n_max,
        |n| BigInt::from(2 * n as i64 - 3),
        |w, n, k| at(w, n - 1, k) + at(w, n - 2, k - 1) + at(w, n - 3, k - 1) + at(w, n - 4, k - 2),
    )
}

// ---------------------------------------------------------------------------
// generating functions

/// Bivariate power series in `(x, t)` truncated at `t`-degree `max_degree`.
///
/// `coeffs[n][k]` is the coefficient of `x^k t^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesTruncation {
    pub max_degree: usize,
    coeffs: Vec<Vec<BigInt>>,
}

impl SeriesTruncation {
    fn zero(max_degree: usize) -> Self {
        Self {
            max_degree,
            coeffs: vec![Vec::new(); max_degree + 1],
        }
    }

    fn one(max_degree: usize) -> Self {
        let mut s = Self::zero(max_degree);
        s.add_term(0, 0, BigInt::one());
        s
    }

    fn add_term(&mut self, n: usize, k: usize, c: BigInt) {
        if n > self.max_degree {
            return;
        }
        let row = &mut self.coeffs[n];
        if row.len() <= k {
            row.resize(k + 1, BigInt::zero());
        }
        row[k] += c;
    }

    /// Coefficient of `x^k t^n`.
    pub fn coeff(&self, n: usize, k: usize) -> BigInt {
        self.coeffs
            .get(n)
            .and_then(|row| row.get(k))
            .cloned()
            .unwrap_or_default()
    }

    fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (n, row) in rhs.coeffs.iter().enumerate() {
            for (k, c) in row.iter().enumerate() {
                out.add_term(n, k, c.clone());
            }
        }
        out
    }

    fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero(self.max_degree);
        for (n1, row1) in self.coeffs.iter().enumerate() {
            for (n2, row2) in rhs.coeffs.iter().enumerate().take(self.max_degree + 1 - n1) {
                for (k1, c1) in row1.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                    for (k2, c2) in row2.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                        out.add_term(n1 + n2, k1 + k2, c1 * c2);
                    }
                }
            }
        }
        out
    }
}

/// Expands `1 / (1 - t·s(x, t))` as `Σ_{m=0}^{N} t^m s(x, t)^m`, where the
/// stencil `s` is `1 + x t² + x² t³` for `C` and `1 + x t + x t² + x² t³` for `D`.
///
/// Every omitted term has `t`-degree above `N`, so the truncation is exact.
pub fn gf_series(family: Family, max_degree: usize) -> SeriesTruncation {
    // t · stencil, as (t-degree, x-degree) monomials with unit coefficients
    let monomials: &[(usize, usize)] = match family {
        Family::C => &[(1, 0), (3, 1), (4, 2)],
        Family::D => &[(1, 0), (2, 1), (3, 1), (4, 2)],
    };
    let mut step = SeriesTruncation::zero(max_degree);
    for &(n, k) in monomials {
        step.add_term(n, k, BigInt::one());
    }
    let mut power = SeriesTruncation::one(max_degree);
    let mut total = power.clone();
    for _ in 1..=max_degree {
        power = power.mul(&step);
        total = total.add(&power);
    }
    total
}
