//! Exact hafnians of two-parameter matrices in polynomially many ring operations.
//!
//! Writing `T_{2m}(a, b) = J_{2m}(b) + T_{2m}(a - b, 0)` and expanding the
//! hafnian of the sum gives
//!
//! ```text
//! Hf(T_{2m}(a, b)) = Σ_{k=0}^{m} (a - b)^{m-k} · b^k · (2k-1)!! · μ_{m-k}(Γ(T_{2m}))
//! ```
//!
//! so any template whose matching counts are known reduces to a single sum.
//! The `C` and `D` families substitute their closed-form counts, giving
//! `O(m³)` and `O(m⁴)` evaluations respectively.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matchings::{matching_counts, mu_c_closed, mu_complete, mu_d_closed, Family};
use crate::matrix::{Template, TemplateKind};
use crate::ring::{
    binomial_counted, binomial_signed, ceil_half, floor_half, BigInt, OpCounter, Ring,
};

/// Powers `x^0 ..= x^m`, built incrementally.
fn powers<R: Ring>(x: &R, m: usize, ops: &mut OpCounter) -> Vec<R> {
    let mut out = Vec::with_capacity(m + 1);
    out.push(R::ring_one());
    for j in 1..=m {
        out.push(out[j - 1].ring_mul(x));
    }
    ops.ring_ops += m as u64;
    out
}

/// `Σ_{k=k_start}^{m} (a-b)^{m-k} b^k (2k-1)!! · count(k)`.
///
/// `count(k)` supplies `μ_{m-k}`. Uses `0^0 = 1`, so for `a = b` only the
/// `k = m` term survives.
fn reduce<R: Ring>(
    m: usize,
    a: &R,
    b: &R,
    k_start: usize,
    ops: &mut OpCounter,
    mut count: impl FnMut(usize, &mut OpCounter) -> BigInt,
) -> R {
    let diff = a.ring_sub(b);
    ops.ring_ops += 1;
    let diff_pow = powers(&diff, m, ops);
    let b_pow = powers(b, m, ops);
    let mut pairings = BigInt::one();
    let mut total = R::ring_zero();
    for k in 0..=m {
        if k > 0 {
            pairings *= 2 * k as u64 - 1;
            ops.ring_ops += 1;
        }
        if k < k_start {
            continue;
        }
        let mu = count(k, ops);
        if mu.is_zero() {
            continue;
        }
        let coeff = R::from_int(&(&pairings * mu));
        let term = diff_pow[m - k].ring_mul(&b_pow[k]).ring_mul(&coeff);
        total = total.ring_add(&term);
        ops.ring_ops += 4;
    }
    total
}

/// Hafnian of the instantiation `T(a, b)` of an even-order template, given
/// its matching counts: `mu(j)` must return `μ_j(Γ(T))` for `0 ≤ j ≤ m`.
pub fn hafnian_two_param_general<R: Ring>(
    t: &Template,
    a: &R,
    b: &R,
    mu: impl Fn(usize) -> BigInt,
) -> Result<R> {
    let n = t.order();
    if !n.is_multiple_of(2) {
        return Err(Error::OddOrder(n));
    }
    let m = n / 2;
    Ok(reduce(m, a, b, 0, &mut OpCounter::default(), |k, _| {
        mu(m - k)
    }))
}

/// Inner sum of the `C` formula: `μ_{m-k}(Γ(C_{2m}))` written in terms of `m` and `k`.
pub(crate) fn c_inner(m: usize, k: usize, ops: &mut OpCounter) -> BigInt {
    let (m, k) = (m as i64, k as i64);
    let lo = ceil_half(m - 3 * k).max(0);
    let hi = floor_half(m - k);
    let mut sum = BigInt::zero();
    for i in lo..=hi {
        sum += binomial_signed(2 * k + i, m - k - i, ops) * binomial_signed(m - k - i, i, ops);
        ops.ring_ops += 2;
    }
    sum
}

/// Inner double sum of the `D` formula: `μ_{m-k}(Γ(D_{2m}))` in terms of `m` and `k`.
pub(crate) fn d_inner(m: usize, k: usize, ops: &mut OpCounter) -> BigInt {
    let (m, k) = (m as i64, k as i64);
    let mut sum = BigInt::zero();
    for i in 0..=(m - k).min(floor_half(m + k)) {
        for p in (i - 2 * k).max(0)..=i.min(m - k - i) {
            sum += binomial_signed(m + k - i, m - k - p, ops)
                * binomial_signed(m - k - p, i, ops)
                * binomial_counted(i as u64, p, ops);
            ops.ring_ops += 3;
        }
    }
    sum
}

/// First `k` of the `C` formula: 0 for even `m`, 1 for odd `m`.
///
/// For odd `m` the `k = 0` inner sum is empty anyway (a perfect matching
/// of `Γ(C_{2m})` needs both halves of the graph to have even size).
fn c_start(m: usize) -> usize {
    m % 2
}

/// `Hf(C_{2m}(a, b))`, where `C_{2m}(a, b)` is the symmetric Toeplitz matrix
/// with first row `0 b a b … b`.
pub fn hafnian_c<R: Ring>(m: usize, a: &R, b: &R) -> R {
    hafnian_c_counted(m, a, b).0
}

/// [`hafnian_c`] together with the number of scalar operations spent.
pub fn hafnian_c_counted<R: Ring>(m: usize, a: &R, b: &R) -> (R, OpCounter) {
    let mut ops = OpCounter::default();
    let v = reduce(m, a, b, c_start(m), &mut ops, |k, ops| c_inner(m, k, ops));
    (v, ops)
}

/// `Hf(D_{2m}(a, b))`, where `D_{2m}(a, b)` has first row `0 a a b … b`.
pub fn hafnian_d<R: Ring>(m: usize, a: &R, b: &R) -> R {
    hafnian_d_counted(m, a, b).0
}

/// [`hafnian_d`] together with the number of scalar operations spent.
pub fn hafnian_d_counted<R: Ring>(m: usize, a: &R, b: &R) -> (R, OpCounter) {
    let mut ops = OpCounter::default();
    let v = reduce(m, a, b, 0, &mut ops, |k, ops| d_inner(m, k, ops));
    (v, ops)
}

/// `Hf(J_{2m}(b)) = b^m (2m-1)!!`.
pub fn hafnian_j<R: Ring>(m: usize, b: &R) -> R {
    b.ring_pow(m as u32)
        .ring_mul(&R::from_int(&crate::ring::pairing_count(m as u64)))
}

/// Dispatches on the family.
pub fn hafnian_family<R: Ring>(family: Family, m: usize, a: &R, b: &R) -> R {
    match family {
        Family::C => hafnian_c(m, a, b),
        Family::D => hafnian_d(m, a, b),
    }
}

/// `[Hf(T_2(a, b)), Hf(T_4(a, b)), …, Hf(T_{2 m_max}(a, b))]`.
pub fn sequence(family: Family, m_max: usize, a: &BigInt, b: &BigInt) -> Vec<BigInt> {
    (1..=m_max)
        .map(|m| hafnian_family(family, m, a, b))
        .collect()
}

/// Which template a [`TwoParamSpec`] instantiates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwoParamTemplate {
    C,
    D,
    J,
    /// An arbitrary even-order template; its matching counts are enumerated.
    Custom(Template),
}

/// A two-parameter matrix `T_{2m}(a, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoParamSpec<R> {
    pub template: TwoParamTemplate,
    pub m: usize,
    pub a: R,
    pub b: R,
}

impl<R: Ring> TwoParamSpec<R> {
    /// Matrix order, always `2m`.
    pub fn order(&self) -> usize {
        2 * self.m
    }

    /// Evaluates the hafnian by the fastest available route.
    pub fn hafnian(&self) -> Result<R> {
        let m = self.m;
        match &self.template {
            TwoParamTemplate::C => Ok(hafnian_c(m, &self.a, &self.b)),
            TwoParamTemplate::D => Ok(hafnian_d(m, &self.a, &self.b)),
            TwoParamTemplate::J => {
                let t = crate::matrix::build_template(TemplateKind::J, 2 * m)?;
                hafnian_two_param_general(&t, &self.a, &self.b, |j| {
                    mu_complete(2 * m as u64, j as u64)
                })
            }
            TwoParamTemplate::Custom(t) => {
                if t.order() != 2 * m {
                    return Err(Error::OrderMismatch(2 * m, t.order()));
                }
                let counts = matching_counts(t);
                hafnian_two_param_general(t, &self.a, &self.b, |j| counts[j].clone())
            }
        }
    }
}

/// `μ_j(Γ(C_{2m}))` and `μ_j(Γ(D_{2m}))` from the closed forms, for use with
/// [`hafnian_two_param_general`].
pub fn closed_mu(family: Family, n: usize) -> impl Fn(usize) -> BigInt {
    move |j| match family {
        Family::C => mu_c_closed(n as u64, j as u64),
        Family::D => mu_d_closed(n as u64, j as u64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hafnian::hafnian_bruteforce;
    use crate::matchings::{matching_counts, mu_bruteforce};
    use crate::matrix::{build_template, instantiate};
    use crate::ring::{pairing_count, poly_eval, BiPoly};
    use proptest::prelude::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn symbolic_oracle(family: Family, m: usize) -> BiPoly {
        let t = family.template(2 * m);
        hafnian_bruteforce(&instantiate(&t, &BiPoly::a(), &BiPoly::b())).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(hafnian_c(3, &big(0), &big(1)), big(7));
        assert_eq!(hafnian_c(2, &big(1), &big(1)), big(3));
        assert_eq!(hafnian_d(4, &big(0), &big(1)), big(10));
        assert_eq!(hafnian_d(1, &BiPoly::a(), &BiPoly::b()), BiPoly::a());
        assert_eq!(
            hafnian_d(2, &BiPoly::a(), &BiPoly::b()).to_string(),
            "2a^2 + ab"
        );
        assert_eq!(hafnian_c(0, &big(5), &big(7)), big(1));
        assert_eq!(hafnian_j(2, &big(5)), big(75));
    }

    #[test]
    fn printed_sequences() {
        let c: Vec<i64> = vec![1, 2, 7, 43, 372, 4027, 51871, 773186, 13083385, 247698481];
        let d: Vec<i64> = vec![0, 0, 1, 10, 99, 1146, 15422, 237135, 4106680, 79154927];
        assert_eq!(
            sequence(Family::C, 10, &big(0), &big(1)),
            c.into_iter().map(big).collect::<Vec<_>>()
        );
        assert_eq!(
            sequence(Family::D, 10, &big(0), &big(1)),
            d.into_iter().map(big).collect::<Vec<_>>()
        );
        assert_eq!(
            sequence(Family::C, 3, &big(1), &big(1)),
            vec![big(1), big(3), big(15)]
        );
    }

    #[test]
    fn symbolic_matches_bruteforce() {
        for m in 0..=5 {
            for family in [Family::C, Family::D] {
                let fast = hafnian_family(family, m, &BiPoly::a(), &BiPoly::b());
                assert_eq!(fast, symbolic_oracle(family, m), "{family} m={m}");
            }
        }
    }

    #[test]
    fn general_reduction_examples() {
        for m in 0..=5 {
            let j = build_template(TemplateKind::J, 2 * m).unwrap();
            let counts = matching_counts(&j);
            let v = hafnian_two_param_general(&j, &big(3), &big(3), |i| counts[i].clone()).unwrap();
            assert_eq!(v, big(3).ring_pow(m as u32) * pairing_count(m as u64));
        }
        let c6 = Family::C.template(6);
        let counts = matching_counts(&c6);
        let v = hafnian_two_param_general(&c6, &BiPoly::a(), &BiPoly::b(), |j| counts[j].clone())
            .unwrap();
        assert_eq!(v, symbolic_oracle(Family::C, 3));
        let d4 = Family::D.template(4);
        let v =
            hafnian_two_param_general(&d4, &BiPoly::a(), &BiPoly::b(), |j| mu_bruteforce(&d4, j))
                .unwrap();
        assert_eq!(v.to_string(), "2a^2 + ab");
        let odd = Family::D.template(5);
        assert_eq!(
            hafnian_two_param_general(&odd, &big(1), &big(0), |_| big(0)),
            Err(Error::OddOrder(5))
        );
    }

    #[test]
    fn reduction_consistency_to_20() {
        let (a, b) = (big(3), big(-2));
        for m in 0..=20 {
            for family in [Family::C, Family::D] {
                let t = family.template(2 * m);
                let general =
                    hafnian_two_param_general(&t, &a, &b, closed_mu(family, 2 * m)).unwrap();
                assert_eq!(hafnian_family(family, m, &a, &b), general, "{family} m={m}");
            }
        }
    }

    #[test]
    fn inner_sums_match_closed_forms() {
        let ops = &mut OpCounter::default();
        for m in 0..=30 {
            for k in 0..=m {
                assert_eq!(
                    c_inner(m, k, ops),
                    mu_c_closed(2 * m as u64, (m - k) as u64)
                );
                assert_eq!(
                    d_inner(m, k, ops),
                    mu_d_closed(2 * m as u64, (m - k) as u64)
                );
            }
        }
    }

    #[test]
    fn parity_offset_terms_vanish() {
        let ops = &mut OpCounter::default();
        for m in (1..=41).step_by(2) {
            assert!(c_inner(m, 0, ops).is_zero(), "m = {m}");
            assert_eq!(c_start(m), 1);
        }
        for m in (0..=40).step_by(2) {
            assert_eq!(c_start(m), 0);
        }
    }

    #[test]
    fn degenerate_collapse() {
        for m in 0..=20 {
            for b in [-3i64, 0, 1, 4] {
                let b = big(b);
                let expected = b.ring_pow(m as u32) * pairing_count(m as u64);
                assert_eq!(hafnian_c(m, &b, &b), expected);
                assert_eq!(hafnian_d(m, &b, &b), expected);
            }
        }
    }

    #[test]
    fn chord_diagram_semantics() {
        let c = sequence(Family::C, 6, &big(0), &big(1));
        let d = sequence(Family::D, 6, &big(0), &big(1));
        for m in 1..=6 {
            // complement graphs: chords of length other than 2, and of length at least 3
            let not_two =
                build_template(TemplateKind::Full(chord_rule(2 * m, |len| len != 2)), 2 * m)
                    .unwrap();
            let at_least_three =
                build_template(TemplateKind::Full(chord_rule(2 * m, |len| len >= 3)), 2 * m)
                    .unwrap();
            assert_eq!(mu_bruteforce(&not_two, m), c[m - 1]);
            assert_eq!(mu_bruteforce(&at_least_three, m), d[m - 1]);
        }
    }

    fn chord_rule(n: usize, allowed: impl Fn(usize) -> bool) -> Vec<Vec<bool>> {
        (0..n)
            .map(|i| (0..n).map(|j| i != j && allowed(i.abs_diff(j))).collect())
            .collect()
    }

    #[test]
    fn custom_spec_uses_enumerated_counts() {
        let t = build_template(TemplateKind::Toeplitz(vec![false, true, false, true]), 4).unwrap();
        let spec = TwoParamSpec {
            template: TwoParamTemplate::Custom(t.clone()),
            m: 2,
            a: BiPoly::a(),
            b: BiPoly::b(),
        };
        let oracle = hafnian_bruteforce(&instantiate(&t, &BiPoly::a(), &BiPoly::b())).unwrap();
        assert_eq!(spec.hafnian().unwrap(), oracle);
        let wrong = TwoParamSpec { m: 3, ..spec };
        assert!(wrong.hafnian().is_err());
        let j = TwoParamSpec {
            template: TwoParamTemplate::J,
            m: 3,
            a: big(2),
            b: big(9),
        };
        assert_eq!(j.hafnian().unwrap(), big(8 * 15));
    }

    #[test]
    fn operation_counts_grow_polynomially() {
        // ops(2m)/ops(m) stays below 2^3 (C) and 2^4 (D) plus slack
        for m in [10usize, 20, 40] {
            let (_, c1) = hafnian_c_counted(m, &big(2), &big(1));
            let (_, c2) = hafnian_c_counted(2 * m, &big(2), &big(1));
            assert!((c2.total() as f64) < 9.0 * c1.total() as f64, "C m={m}");
            let (_, d1) = hafnian_d_counted(m, &big(2), &big(1));
            let (_, d2) = hafnian_d_counted(2 * m, &big(2), &big(1));
            assert!((d2.total() as f64) < 17.0 * d1.total() as f64, "D m={m}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn symbolic_then_evaluate(m in 0usize..=8, a in -6i64..=6, b in -6i64..=6) {
            let (a, b) = (big(a), big(b));
            for family in [Family::C, Family::D] {
                let sym = hafnian_family(family, m, &BiPoly::a(), &BiPoly::b());
                prop_assert_eq!(poly_eval(&sym, &a, &b), hafnian_family(family, m, &a, &b));
            }
        }
    }
}
