//! Self-check suites run by `haftools verify`.
//!
//! Every fast path is compared against an independent route. The routines
//! under test are reached through [`Impls`] so that a deliberately broken
//! implementation can be swapped in to confirm the suites catch it.

use std::time::Instant;

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hafnian::{enumerate_pairings, hafnian_bruteforce, hafnian_sum_expansion};
use crate::matchings::{
    bounds_equivalence, gf_series, matching_counts, mu_c_recurrence, mu_d_recurrence, Family,
};
use crate::matrix::{instantiate, SymmetricMatrix};
use crate::ring::{binomial, pairing_count, BiPoly, BigInt, Ring};
use crate::twoparam::{hafnian_family, sequence};

/// Bundled reference data.
pub mod fixtures {
    pub const TABLE_C: &str = include_str!("../fixtures/table_c.csv");
    pub const TABLE_D: &str = include_str!("../fixtures/table_d.csv");
    pub const SEQUENCE_C: &str = include_str!("../fixtures/sequence_c.csv");
    pub const SEQUENCE_D: &str = include_str!("../fixtures/sequence_d.csv");

    /// Directory whose files replace the bundled ones for `--check-fixture`.
    pub const FIXTURE_DIR_ENV: &str = "HAFTOOLS_FIXTURE_DIR";

    /// Fixture `name` (e.g. `table_c.csv`), from `HAFTOOLS_FIXTURE_DIR` when set.
    pub fn load(name: &str) -> std::io::Result<String> {
        if let Some(dir) = std::env::var_os(FIXTURE_DIR_ENV) {
            return std::fs::read_to_string(std::path::Path::new(&dir).join(name));
        }
        let bundled = match name {
            "table_c.csv" => TABLE_C,
            "table_d.csv" => TABLE_D,
            "sequence_c.csv" => SEQUENCE_C,
            "sequence_d.csv" => SEQUENCE_D,
            _ => {
                return Err(std::io::Error::new(
                    std::io::ErrorKind::NotFound,
                    name.to_string(),
                ))
            }
        };
        Ok(bundled.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

/// The closed-form routines exercised by the suites.
#[derive(Clone, Copy)]
pub struct Impls {
    pub mu_c: fn(u64, u64) -> BigInt,
    pub mu_d: fn(u64, u64) -> BigInt,
}

impl Default for Impls {
    fn default() -> Self {
        Self {
            mu_c: crate::matchings::mu_c_closed,
            mu_d: crate::matchings::mu_d_closed,
        }
    }
}

fn flipped_binomial(n: i64, k: i64) -> BigInt {
    // arguments of C(n, k) deliberately swapped
    if k < 0 || n < 0 {
        return BigInt::from(0);
    }
    binomial(k as u64, n)
}

fn mu_c_flipped(n: u64, k: u64) -> BigInt {
    if k > n / 2 || (k % 2 == 1 && n == 2 * k) {
        return BigInt::from(0);
    }
    let (n, k) = (n as i64, k as i64);
    (0..=k / 2)
        .map(|i| flipped_binomial(n - 2 * k + i, k - i) * binomial((k - i) as u64, i))
        .sum()
}

impl Impls {
    /// `μ(Γ(C_n))` evaluated with the binomial arguments swapped.
    pub fn with_flipped_binomial() -> Self {
        Self {
            mu_c: mu_c_flipped,
            ..Self::default()
        }
    }

    fn mu(&self, family: Family, n: u64, k: u64) -> BigInt {
        match family {
            Family::C => (self.mu_c)(n, k),
            Family::D => (self.mu_d)(n, k),
        }
    }
}

/// Outcome of one suite.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub outcome: Result<String, String>,
    pub millis: f64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.outcome.is_ok()
    }

    /// `PASS name: detail` or `FAIL name: reason`, without timing.
    pub fn line(&self) -> String {
        match &self.outcome {
            Ok(detail) => format!("PASS {}: {detail}", self.name),
            Err(reason) => format!("FAIL {}: {reason}", self.name),
        }
    }
}

type Suite = fn(&Impls, Level) -> Result<String, String>;

const SUITES: [(&str, Suite); 10] = [
    ("pairing-enumeration", suite_pairings),
    ("perfect-matching-bridge", suite_bridge),
    ("scaling-identity", suite_scaling),
    ("sum-expansion-identity", suite_sum_expansion),
    ("matching-four-way", suite_four_way),
    ("inequality-equivalence", suite_bounds),
    ("fibonacci-diagonal", suite_fibonacci),
    ("printed-tables", suite_tables),
    ("printed-sequences", suite_sequences),
    ("symbolic-hafnian", suite_symbolic),
];

pub fn run_suites(impls: &Impls, level: Level) -> Vec<SuiteResult> {
    SUITES
        .iter()
        .map(|(name, suite)| {
            let start = Instant::now();
            let outcome = suite(impls, level);
            SuiteResult {
                name,
                outcome,
                millis: start.elapsed().as_secs_f64() * 1e3,
            }
        })
        .collect()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn max_order(level: Level) -> usize {
    match level {
        Level::Quick => 8,
        Level::Full => 14,
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64) -> SymmetricMatrix<BigInt> {
    SymmetricMatrix::from_fn(n, |_, _| BigInt::from(rng.gen_range(lo..=hi)))
}

fn suite_pairings(_: &Impls, level: Level) -> Result<String, String> {
    let top = max_order(level).min(12);
    for n in (0..=top).step_by(2) {
        let count = enumerate_pairings(n).map_err(|e| e.to_string())?.count();
        check(BigInt::from(count) == pairing_count(n as u64 / 2), || {
            format!("n = {n}: {count} pairings")
        })?;
    }
    Ok(format!("n <= {top}"))
}

fn suite_bridge(_: &Impls, level: Level) -> Result<String, String> {
    let top = max_order(level).min(12);
    for family in [Family::C, Family::D] {
        for n in (0..=top).step_by(2) {
            let t = family.template(n);
            let hf = hafnian_bruteforce(&instantiate(&t, &BigInt::from(1), &BigInt::from(0)))
                .map_err(|e| e.to_string())?;
            let perfect = matching_counts(&t).swap_remove(n / 2);
            check(hf == perfect, || {
                format!("{family}_{n}: hafnian {hf} vs {perfect} perfect matchings")
            })?;
        }
    }
    Ok(format!("n <= {top}"))
}

fn suite_scaling(_: &Impls, level: Level) -> Result<String, String> {
    let cases = if level == Level::Quick { 30 } else { 100 };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ca1e);
    for case in 0..cases {
        let n = 2 * rng.gen_range(1..=4);
        let m = random_matrix(&mut rng, n, -4, 4);
        let c = BigInt::from(rng.gen_range(-2..=3));
        let lhs = hafnian_bruteforce(&m.scale(&c)).map_err(|e| e.to_string())?;
        let rhs = c.ring_pow(n as u32 / 2) * hafnian_bruteforce(&m).map_err(|e| e.to_string())?;
        check(lhs == rhs, || format!("case {case}: {lhs} != {rhs}"))?;
    }
    Ok(format!("{cases} random cases"))
}

fn suite_sum_expansion(_: &Impls, level: Level) -> Result<String, String> {
    let (cases, n) = match level {
        Level::Quick => (40, 6),
        Level::Full => (200, 6),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e7);
    for case in 0..cases {
        let a = random_matrix(&mut rng, n, 0, 3);
        let b = random_matrix(&mut rng, n, 0, 3);
        let lhs = hafnian_bruteforce(&a.add(&b).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let rhs = hafnian_sum_expansion(&a, &b).map_err(|e| e.to_string())?;
        check(lhs == rhs, || format!("case {case}: {lhs} != {rhs}"))?;
    }
    Ok(format!("{cases} random pairs of order {n}"))
}

fn suite_four_way(impls: &Impls, level: Level) -> Result<String, String> {
    let top = max_order(level);
    for family in [Family::C, Family::D] {
        let rec = match family {
            Family::C => mu_c_recurrence(top),
            Family::D => mu_d_recurrence(top),
        };
        let series = gf_series(family, top);
        for n in 0..=top {
            let brute = matching_counts(&family.template(n));
            for (k, expected) in brute.iter().enumerate() {
                let closed = impls.mu(family, n as u64, k as u64);
                let values = [&closed, &rec.get(n, k), &series.coeff(n, k)];
                check(values.iter().all(|v| *v == expected), || {
                    format!(
                        "{family} n={n} k={k}: brute {} closed {} recurrence {} series {}",
                        expected, values[0], values[1], values[2]
                    )
                })?;
            }
        }
    }
    Ok(format!("n <= {top}"))
}

fn suite_bounds(_: &Impls, _: Level) -> Result<String, String> {
    let mut checked = 0;
    for n in 0..=60u64 {
        for k in 0..=60u64 {
            if let Ok((lhs, rhs)) = bounds_equivalence(n, k) {
                check(lhs == rhs, || format!("n={n} k={k}: {lhs} vs {rhs}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} pairs"))
}

fn suite_fibonacci(impls: &Impls, _: Level) -> Result<String, String> {
    let (mut f0, mut f1) = (BigInt::from(1), BigInt::from(1));
    for k in 0..=12u64 {
        let v = impls.mu(Family::D, 2 * k, k);
        check(v == f0, || format!("k={k}: {v} != {f0}"))?;
        let next = &f0 + &f1;
        f0 = std::mem::replace(&mut f1, next);
    }
    Ok("k <= 12".into())
}

fn suite_tables(impls: &Impls, _: Level) -> Result<String, String> {
    for (family, text) in [
        (Family::C, fixtures::TABLE_C),
        (Family::D, fixtures::TABLE_D),
    ] {
        let grid = parse_table_csv(text).map_err(|e| format!("fixture: {e}"))?;
        for (k, row) in grid.iter().enumerate() {
            for (n, expected) in row.iter().enumerate() {
                let v = impls.mu(family, n as u64, k as u64);
                check(&v == expected, || {
                    format!("{family} n={n} k={k}: {v} != {expected}")
                })?;
            }
        }
    }
    Ok("both tables, n <= 12".into())
}

fn suite_sequences(_: &Impls, _: Level) -> Result<String, String> {
    for (family, text) in [
        (Family::C, fixtures::SEQUENCE_C),
        (Family::D, fixtures::SEQUENCE_D),
    ] {
        let expected = parse_sequence_csv(text).map_err(|e| format!("fixture: {e}"))?;
        let got = sequence(family, expected.len(), &BigInt::from(0), &BigInt::from(1));
        check(got == expected, || format!("{family}: {got:?}"))?;
    }
    Ok("first 10 terms".into())
}

fn suite_symbolic(_: &Impls, level: Level) -> Result<String, String> {
    let top = if level == Level::Quick { 3 } else { 5 };
    let (a, b) = (BiPoly::a(), BiPoly::b());
    for family in [Family::C, Family::D] {
        for m in 0..=top {
            let oracle = hafnian_bruteforce(&instantiate(&family.template(2 * m), &a, &b))
                .map_err(|e| e.to_string())?;
            let fast = hafnian_family(family, m, &a, &b);
            check(fast == oracle, || {
                format!("{family} m={m}: {fast} != {oracle}")
            })?;
        }
    }
    Ok(format!("m <= {top}"))
}

/// Reads a table in the emitted CSV layout into `grid[k][n]`; empty cells are zero.
pub fn parse_table_csv(text: &str) -> Result<Vec<Vec<BigInt>>, String> {
    let mut lines = text.lines();
    lines.next().ok_or("missing header")?;
    lines
        .map(|line| {
            line.split(',')
                .skip(1)
                .map(|cell| {
                    if cell.is_empty() {
                        Ok(BigInt::from(0))
                    } else {
                        cell.parse().map_err(|_| format!("bad cell {cell:?}"))
                    }
                })
                .collect()
        })
        .collect()
}

/// Reads `m,hafnian` rows.
pub fn parse_sequence_csv(text: &str) -> Result<Vec<BigInt>, String> {
    text.lines()
        .skip(1)
        .map(|line| {
            let (_, v) = line
                .split_once(',')
                .ok_or_else(|| format!("bad row {line:?}"))?;
            v.parse().map_err(|_| format!("bad value {v:?}"))
        })
        .collect()
}
