//! Symmetric zero-diagonal matrices and the 0/1 templates that
//! two-parameter matrices are built from.
//!
//! Internally indices are 0-based. Everything that takes an index set from
//! a caller (submatrices, edge listings printed to users) is 1-based, since
//! vertex labels of the arc diagrams start at 1.

use std::fmt;

use crate::error::{Error, Result};
use crate::ring::Ring;

fn tri_len(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Position of `(i, j)`, `i < j`, in a row-major strict upper triangle of order `n`.
fn tri_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Dense symmetric matrix with an implicit zero diagonal.
#[derive(Clone, PartialEq)]
pub struct SymmetricMatrix<R> {
    n: usize,
    upper: Vec<R>,
    zero: R,
}

impl<R: Ring> SymmetricMatrix<R> {
    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| R::ring_zero())
    }

    /// Builds the matrix from `f(i, j)` evaluated for every `i < j` (0-based).
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut upper = Vec::with_capacity(tri_len(n));
        for i in 0..n {
            for j in i + 1..n {
                upper.push(f(i, j));
            }
        }
        Self {
            n,
            upper,
            zero: R::ring_zero(),
        }
    }

    /// `J_n(c)`: every off-diagonal entry equals `c`.
    pub fn constant(n: usize, c: &R) -> Self {
        Self::from_fn(n, |_, _| c.clone())
    }

    /// Validates a full square array: symmetric with zero diagonal.
    pub fn from_rows(rows: &[Vec<R>]) -> Result<Self> {
        let n = rows.len();
        if let Some(row) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::OrderMismatch(n, row.len()));
        }
        for (i, row) in rows.iter().enumerate() {
            if !row[i].ring_is_zero() {
                return Err(Error::NonzeroDiagonal(i + 1));
            }
            for (j, x) in row.iter().enumerate().skip(i + 1) {
                if *x != rows[j][i] {
                    return Err(Error::NotSymmetric(i + 1, j + 1));
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j].clone()))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)`, 0-based.
    pub fn get(&self, i: usize, j: usize) -> &R {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => &self.zero,
            std::cmp::Ordering::Less => &self.upper[tri_index(self.n, i, j)],
            std::cmp::Ordering::Greater => &self.upper[tri_index(self.n, j, i)],
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<R>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).clone()).collect())
            .collect()
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> SymmetricMatrix<S> {
        SymmetricMatrix {
            n: self.n,
            upper: self.upper.iter().map(f).collect(),
            zero: S::ring_zero(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.n != rhs.n {
            return Err(Error::OrderMismatch(self.n, rhs.n));
        }
        Ok(Self {
            n: self.n,
            upper: self
                .upper
                .iter()
                .zip(&rhs.upper)
                .map(|(x, y)| x.ring_add(y))
                .collect(),
            zero: R::ring_zero(),
        })
    }

    pub fn scale(&self, c: &R) -> Self {
        self.map(|x| c.ring_mul(x))
    }

    fn check_indices(&self, indices: &[usize]) -> Result<Vec<bool>> {
        let mut selected = vec![false; self.n];
        for &idx in indices {
            if idx == 0 || idx > self.n {
                return Err(Error::IndexOutOfRange {
                    index: idx,
                    order: self.n,
                });
            }
            selected[idx - 1] = true;
        }
        Ok(selected)
    }

    fn restrict(&self, selected: &[bool], keep: bool) -> Self {
        let rows: Vec<usize> = (0..self.n).filter(|&i| selected[i] == keep).collect();
        Self::from_fn(rows.len(), |i, j| self.get(rows[i], rows[j]).clone())
    }

    /// `A[α]`: rows and columns whose 1-based indices lie in `indices`.
    pub fn submatrix_keep(&self, indices: &[usize]) -> Result<Self> {
        let selected = self.check_indices(indices)?;
        Ok(self.restrict(&selected, true))
    }

    /// `A{α}`: the matrix with rows and columns in `indices` (1-based) removed.
    pub fn submatrix_drop(&self, indices: &[usize]) -> Result<Self> {
        let selected = self.check_indices(indices)?;
        Ok(self.restrict(&selected, false))
    }

    /// Keep the rows whose bit is set in `mask` (bit `i` is row `i`, 0-based).
    pub(crate) fn keep_mask(&self, mask: u64) -> Self {
        let selected: Vec<bool> = (0..self.n).map(|i| mask >> i & 1 == 1).collect();
        self.restrict(&selected, true)
    }

    pub(crate) fn drop_mask(&self, mask: u64) -> Self {
        let selected: Vec<bool> = (0..self.n).map(|i| mask >> i & 1 == 1).collect();
        self.restrict(&selected, false)
    }
}

impl<R: Ring> fmt::Debug for SymmetricMatrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

/// Which 0/1 pattern a [`Template`] follows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TemplateKind {
    /// Toeplitz, first row `0 0 1 0 … 0`: edges join vertices two apart.
    C,
    /// Toeplitz, first row `0 1 1 0 … 0`: edges join vertices one or two apart.
    D,
    /// Every off-diagonal bit set.
    J,
    /// Toeplitz with the given first row (length `n`, leading 0).
    Toeplitz(Vec<bool>),
    /// Arbitrary symmetric bit matrix with zero diagonal.
    Full(Vec<Vec<bool>>),
}

impl TemplateKind {
    pub fn name(&self) -> &'static str {
        match self {
            TemplateKind::C => "C",
            TemplateKind::D => "D",
            TemplateKind::J => "J",
            TemplateKind::Toeplitz(_) => "toeplitz",
            TemplateKind::Full(_) => "custom",
        }
    }
}

/// A validated symmetric 0/1 pattern of order `n` with zero diagonal.
///
/// The pattern doubles as the adjacency matrix of the arc diagram on
/// vertices `1..=n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Template {
    kind: TemplateKind,
    n: usize,
    bits: Vec<bool>,
}

impl Template {
    pub fn kind(&self) -> &TemplateKind {
        &self.kind
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Whether `(i, j)` is an edge, 0-based.
    pub fn bit(&self, i: usize, j: usize) -> bool {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => false,
            std::cmp::Ordering::Less => self.bits[tri_index(self.n, i, j)],
            std::cmp::Ordering::Greater => self.bits[tri_index(self.n, j, i)],
        }
    }

    /// Edges `(i, j)` with `i < j`, 0-based, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.bit(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Edges as 1-based vertex labels.
    pub fn edges_one_based(&self) -> Vec<(usize, usize)> {
        self.edges()
            .into_iter()
            .map(|(i, j)| (i + 1, j + 1))
            .collect()
    }

    /// The same family at order `n`. Custom templates only accept their own order.
    pub fn with_order(&self, n: usize) -> Result<Template> {
        match &self.kind {
            TemplateKind::C | TemplateKind::D | TemplateKind::J => {
                build_template(self.kind.clone(), n)
            }
            _ if n == self.n => Ok(self.clone()),
            _ => Err(Error::InvalidTemplate(format!(
                "cannot resize a {} template",
                self.kind.name()
            ))),
        }
    }

    /// Parses the plain-text template format: the order on the first line,
    /// then either `toeplitz: <n bits>` or `n` lines of `n` bits each.
    pub fn parse(text: &str) -> Result<Template> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line_no, first) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty input".into(),
        })?;
        let n: usize = first.parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("expected the order, got {first:?}"),
        })?;
        let rest: Vec<(usize, &str)> = lines.collect();
        if let Some((line, body)) = rest
            .first()
            .and_then(|(l, s)| s.strip_prefix("toeplitz:").map(|body| (*l, body)))
        {
            if rest.len() > 1 {
                return Err(Error::Parse {
                    line: rest[1].0,
                    msg: "unexpected content after toeplitz row".into(),
                });
            }
            let row = parse_bits(body, line)?;
            return build_template(TemplateKind::Toeplitz(row), n);
        }
        if rest.len() != n {
            return Err(Error::Parse {
                line: rest.last().map_or(line_no, |r| r.0),
                msg: format!("expected {n} matrix rows, found {}", rest.len()),
            });
        }
        let rows = rest
            .iter()
            .map(|(line, s)| parse_bits(s, *line))
            .collect::<Result<Vec<_>>>()?;
        build_template(TemplateKind::Full(rows), n)
    }
}

fn parse_bits(s: &str, line: usize) -> Result<Vec<bool>> {
    s.split_whitespace()
        .map(|tok| match tok {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(Error::Parse {
                line,
                msg: format!("expected 0 or 1, got {other:?}"),
            }),
        })
        .collect()
}

impl fmt::Debug for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Template({}, n={}, edges={:?})",
            self.kind.name(),
            self.n,
            self.edges_one_based()
        )
    }
}

fn toeplitz_bits(n: usize, offsets: &[usize]) -> Vec<bool> {
    let mut bits = Vec::with_capacity(tri_len(n));
    for i in 0..n {
        for j in i + 1..n {
            bits.push(offsets.contains(&(j - i)));
        }
    }
    bits
}

/// Builds and validates a template of order `n`.
///
/// Built-in Toeplitz families whose stencil is longer than the matrix keep
/// only the offsets that fit, so `C_2` has no edges and `D_2` has the single
/// edge `1–2`.
pub fn build_template(kind: TemplateKind, n: usize) -> Result<Template> {
    let bits = match &kind {
        TemplateKind::C => toeplitz_bits(n, &[2]),
        TemplateKind::D => toeplitz_bits(n, &[1, 2]),
        TemplateKind::J => vec![true; tri_len(n)],
        TemplateKind::Toeplitz(row) => {
            if row.len() != n {
                return Err(Error::InvalidTemplate(format!(
                    "toeplitz first row has {} entries, expected {n}",
                    row.len()
                )));
            }
            if row.first() == Some(&true) {
                return Err(Error::NonzeroDiagonal(1));
            }
            let offsets: Vec<usize> = (1..n).filter(|&d| row[d]).collect();
            toeplitz_bits(n, &offsets)
        }
        TemplateKind::Full(rows) => {
            if rows.len() != n {
                return Err(Error::OrderMismatch(n, rows.len()));
            }
            let mut bits = Vec::with_capacity(tri_len(n));
            for (i, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::OrderMismatch(n, row.len()));
                }
                if row[i] {
                    return Err(Error::NonzeroDiagonal(i + 1));
                }
                for j in i + 1..n {
                    if rows[j].len() != n || row[j] != rows[j][i] {
                        return Err(Error::NotSymmetric(i + 1, j + 1));
                    }
                    bits.push(row[j]);
                }
            }
            bits
        }
    };
    Ok(Template { kind, n, bits })
}

/// `T_n(a, b)`: `a` where the template bit is set, `b` elsewhere off the diagonal.
pub fn instantiate<R: Ring>(t: &Template, a: &R, b: &R) -> SymmetricMatrix<R> {
    SymmetricMatrix::from_fn(t.n, |i, j| if t.bit(i, j) { a.clone() } else { b.clone() })
}
