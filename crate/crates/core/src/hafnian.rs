//! Hafnians by definition, plus the scaling and sum-expansion identities.
//!
//! These routines enumerate pair-partitions directly and serve as the
//! reference every closed-form path is checked against.

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::ring::Ring;

/// Largest order accepted by [`hafnian_sum_expansion`]; the work grows like `2^n (n-1)!!`.
pub const SUM_EXPANSION_MAX_ORDER: usize = 10;

/// Unordered partition of `{1..2m}` into pairs.
///
/// Canonical form: every pair `(i, j)` has `i < j` and pairs are sorted by
/// their first element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairPartition {
    pub pairs: Vec<(usize, usize)>,
}

/// Stream of all pair-partitions of `{1..n}`.
///
/// The next pair always starts at the smallest unmatched index, so each
/// unordered partition comes out exactly once and in lexicographic order.
pub struct Pairings {
    used: Vec<bool>,
    stack: Vec<(usize, usize)>,
    started: bool,
    done: bool,
}

impl Pairings {
    fn fill(&mut self) {
        while let Some(first) = self.used.iter().position(|u| !u) {
            self.used[first] = true;
            let partner = (first + 1..self.used.len())
                .find(|&j| !self.used[j])
                .expect("even number of unmatched indices");
            self.used[partner] = true;
            self.stack.push((first, partner));
        }
    }

    fn advance(&mut self) -> bool {
        while let Some((first, partner)) = self.stack.pop() {
            self.used[partner] = false;
            if let Some(next) = (partner + 1..self.used.len()).find(|&j| !self.used[j]) {
                self.used[next] = true;
                self.stack.push((first, next));
                self.fill();
                return true;
            }
            self.used[first] = false;
        }
        false
    }
}

impl Iterator for Pairings {
    type Item = PairPartition;

    fn next(&mut self) -> Option<PairPartition> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.fill();
        } else if !self.advance() {
            self.done = true;
            return None;
        }
        Some(PairPartition {
            pairs: self.stack.iter().map(|&(i, j)| (i + 1, j + 1)).collect(),
        })
    }
}

/// Enumerates the `(n-1)!!` pair-partitions of `{1..n}`; `n = 0` yields one empty partition.
pub fn enumerate_pairings(n: usize) -> Result<Pairings> {
    if !n.is_multiple_of(2) {
        return Err(Error::OddOrder(n));
    }
    Ok(Pairings {
        used: vec![false; n],
        stack: Vec::with_capacity(n / 2),
        started: false,
        done: false,
    })
}

fn hafnian_rec<R: Ring>(m: &SymmetricMatrix<R>, unmatched: u64, acc: &R, total: &mut R) {
    if unmatched == 0 {
        *total = total.ring_add(acc);
        return;
    }
    let first = unmatched.trailing_zeros() as usize;
    let rest = unmatched & !(1u64 << first);
    let mut candidates = rest;
    while candidates != 0 {
        let j = candidates.trailing_zeros() as usize;
        candidates &= candidates - 1;
        let entry = m.get(first, j);
        if entry.ring_is_zero() {
            continue;
        }
        hafnian_rec(m, rest & !(1u64 << j), &acc.ring_mul(entry), total);
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Sum over all pair-partitions of the product of the paired entries.
///
/// Branches whose partial product hits a zero entry are pruned, which only
/// skips terms that are zero anyway. The empty matrix has hafnian 1.
pub fn hafnian_bruteforce<R: Ring>(m: &SymmetricMatrix<R>) -> Result<R> {
    let n = m.order();
    if !n.is_multiple_of(2) {
        return Err(Error::OddOrder(n));
    }
    if n > 64 {
        return Err(Error::TooLarge {
            order: n,
            limit: 64,
        });
    }
    let mut total = R::ring_zero();
    hafnian_rec(m, full_mask(n), &R::ring_one(), &mut total);
    Ok(total)
}

/// Brute-force hafnian with the work split by the partner of vertex 1.
///
/// Each first pair is expanded on its own thread; partial sums are added in
/// partner order so the result does not depend on scheduling.
pub fn hafnian_bruteforce_par<R: Ring>(m: &SymmetricMatrix<R>) -> Result<R> {
    let n = m.order();
    if !n.is_multiple_of(2) {
        return Err(Error::OddOrder(n));
    }
    if n > 64 {
        return Err(Error::TooLarge {
            order: n,
            limit: 64,
        });
    }
    if n == 0 {
        return Ok(R::ring_one());
    }
    let rest = full_mask(n) & !1;
    let partials: Vec<R> = std::thread::scope(|scope| {
        let handles: Vec<_> = (1..n)
            .map(|j| {
                scope.spawn(move || {
                    let mut part = R::ring_zero();
                    let entry = m.get(0, j);
                    if !entry.ring_is_zero() {
                        hafnian_rec(m, rest & !(1u64 << j), entry, &mut part);
                    }
                    part
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    Ok(partials
        .iter()
        .fold(R::ring_zero(), |acc, p| acc.ring_add(p)))
}

/// Right-hand side of `Hf(A + B) = Σ_α Hf(A[α]) Hf(B{α})`, summed over
/// every even-size subset `α` of the indices.
pub fn hafnian_sum_expansion<R: Ring>(a: &SymmetricMatrix<R>, b: &SymmetricMatrix<R>) -> Result<R> {
    let n = a.order();
    if n != b.order() {
        return Err(Error::OrderMismatch(n, b.order()));
    }
    if !n.is_multiple_of(2) {
        return Err(Error::OddOrder(n));
    }
    if n > SUM_EXPANSION_MAX_ORDER {
        return Err(Error::TooLarge {
            order: n,
            limit: SUM_EXPANSION_MAX_ORDER,
        });
    }
    let mut total = R::ring_zero();
    for mask in 0..(1u64 << n) {
        if mask.count_ones() % 2 != 0 {
            continue;
        }
        let left = hafnian_bruteforce(&a.keep_mask(mask))?;
        if left.ring_is_zero() {
            continue;
        }
        let right = hafnian_bruteforce(&b.drop_mask(mask))?;
        total = total.ring_add(&left.ring_mul(&right));
    }
    Ok(total)
}

/// `Hf(cM) = c^{n/2} Hf(M)`: one enumeration of `M`, then a single power of `c`.
pub fn hafnian_scaled<R: Ring>(m: &SymmetricMatrix<R>, c: &R) -> Result<R> {
    let base = hafnian_bruteforce(m)?;
    Ok(c.ring_pow((m.order() / 2) as u32).ring_mul(&base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{build_template, instantiate, TemplateKind};
    use crate::ring::{pairing_count, BiPoly, BigInt};
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn generic_symbolic(n: usize) -> (SymmetricMatrix<BiPoly>, Vec<BiPoly>) {
        // entry number t becomes a^(2^t): a product of two distinct entries
        // determines both factors, so the terms cannot merge
        let mut syms = Vec::new();
        let m = SymmetricMatrix::from_fn(n, |_, _| {
            let s = BiPoly::monomial(1, 1 << syms.len(), 0);
            syms.push(s.clone());
            s
        });
        (m, syms)
    }

    #[test]
    fn n4_pairings() {
        let all: Vec<_> = enumerate_pairings(4).unwrap().map(|p| p.pairs).collect();
        assert_eq!(
            all,
            vec![
                vec![(1, 2), (3, 4)],
                vec![(1, 3), (2, 4)],
                vec![(1, 4), (2, 3)],
            ]
        );
    }

    #[test]
    fn empty_and_odd() {
        let all: Vec<_> = enumerate_pairings(0).unwrap().collect();
        assert_eq!(all, vec![PairPartition { pairs: vec![] }]);
        assert!(matches!(enumerate_pairings(5), Err(Error::OddOrder(5))));
        let m = SymmetricMatrix::<BigInt>::zeros(3);
        assert_eq!(hafnian_bruteforce(&m), Err(Error::OddOrder(3)));
        assert_eq!(
            hafnian_bruteforce(&SymmetricMatrix::<BigInt>::zeros(0)),
            Ok(big(1))
        );
    }

    #[test]
    fn pairings_are_canonical_and_distinct() {
        for n in (0..=12).step_by(2) {
            let mut seen = HashSet::new();
            for p in enumerate_pairings(n).unwrap() {
                assert_eq!(p.pairs.len(), n / 2);
                let mut covered = vec![false; n + 1];
                for w in p.pairs.windows(2) {
                    assert!(w[0].0 < w[1].0);
                }
                for &(i, j) in &p.pairs {
                    assert!(i < j);
                    assert!(!covered[i] && !covered[j]);
                    covered[i] = true;
                    covered[j] = true;
                }
                assert!(seen.insert(p));
            }
            assert_eq!(
                BigInt::from(seen.len()),
                pairing_count(n as u64 / 2),
                "n = {n}"
            );
        }
        assert_eq!(enumerate_pairings(6).unwrap().count(), 15);
    }

    #[test]
    fn generic_4x4_expansion() {
        // s[0..6] stand for a12, a13, a14, a23, a24, a34
        let (m, s) = generic_symbolic(4);
        let expected = &(&(&s[0] * &s[5]) + &(&s[1] * &s[4])) + &(&s[2] * &s[3]);
        assert_eq!(hafnian_bruteforce(&m).unwrap(), expected);
    }

    #[test]
    fn small_known_values() {
        let j4 = SymmetricMatrix::constant(4, &big(1));
        assert_eq!(hafnian_bruteforce(&j4).unwrap(), big(3));
        let d4 = build_template(TemplateKind::D, 4).unwrap();
        let m = instantiate(&d4, &BiPoly::a(), &BiPoly::b());
        assert_eq!(hafnian_bruteforce(&m).unwrap().to_string(), "2a^2 + ab");
    }

    #[test]
    fn enumeration_matches_recursive_hafnian() {
        let m = SymmetricMatrix::from_fn(8, |i, j| big((i * 7 + j * 3) as i64 % 5 - 2));
        let via_stream = enumerate_pairings(8)
            .unwrap()
            .map(|p| {
                p.pairs
                    .iter()
                    .fold(big(1), |acc, &(i, j)| acc * m.get(i - 1, j - 1))
            })
            .fold(big(0), |acc, t| acc + t);
        assert_eq!(hafnian_bruteforce(&m).unwrap(), via_stream);
        assert_eq!(hafnian_bruteforce_par(&m).unwrap(), via_stream);
    }

    #[test]
    fn sum_expansion_examples() {
        let j4 = SymmetricMatrix::constant(4, &big(1));
        assert_eq!(hafnian_sum_expansion(&j4, &j4).unwrap(), big(12));
        let a = SymmetricMatrix::from_fn(6, |i, j| big((i + 2 * j) as i64 % 4));
        let zero = SymmetricMatrix::zeros(6);
        assert_eq!(
            hafnian_sum_expansion(&a, &zero).unwrap(),
            hafnian_bruteforce(&a).unwrap()
        );
        assert_eq!(
            hafnian_sum_expansion(&a, &SymmetricMatrix::zeros(4)),
            Err(Error::OrderMismatch(6, 4))
        );
        assert!(matches!(
            hafnian_sum_expansion(
                &SymmetricMatrix::<BigInt>::zeros(12),
                &SymmetricMatrix::zeros(12)
            ),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn scaled_examples() {
        let j4 = SymmetricMatrix::constant(4, &big(1));
        assert_eq!(hafnian_scaled(&j4, &big(2)).unwrap(), big(12));
        let m = SymmetricMatrix::from_fn(6, |i, j| big((3 * i + j) as i64 % 4 - 1));
        assert_eq!(
            hafnian_scaled(&m, &big(1)).unwrap(),
            hafnian_bruteforce(&m).unwrap()
        );
        assert_eq!(
            hafnian_scaled(&m, &big(3)).unwrap(),
            hafnian_bruteforce(&m.scale(&big(3))).unwrap()
        );
    }

    fn arb_matrix(n: usize, lo: i64, hi: i64) -> impl Strategy<Value = SymmetricMatrix<BigInt>> {
        prop::collection::vec(lo..=hi, n * n.saturating_sub(1) / 2).prop_map(move |vals| {
            let mut it = vals.into_iter();
            SymmetricMatrix::from_fn(n, |_, _| big(it.next().unwrap()))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn sum_expansion_identity(
            (a, b) in (0usize..=4).prop_flat_map(|h| (arb_matrix(2 * h, -3, 3), arb_matrix(2 * h, -3, 3)))
        ) {
            let lhs = hafnian_bruteforce(&a.add(&b).unwrap()).unwrap();
            prop_assert_eq!(hafnian_sum_expansion(&a, &b).unwrap(), lhs);
        }

        #[test]
        fn scaling_identity(
            m in (0usize..=4).prop_flat_map(|h| arb_matrix(2 * h, -4, 4)),
            c in -2i64..=3,
        ) {
            let c = big(c);
            let direct = hafnian_bruteforce(&m.scale(&c)).unwrap();
            let n = m.order() as u32;
            prop_assert_eq!(direct, c.ring_pow(n / 2) * hafnian_bruteforce(&m).unwrap());
        }

        #[test]
        fn parallel_split_is_deterministic(m in arb_matrix(8, -2, 2)) {
            prop_assert_eq!(hafnian_bruteforce_par(&m).unwrap(), hafnian_bruteforce(&m).unwrap());
        }
    }
}
