//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::time::{Duration, Instant};

use haftools_core::cli::{self, bench_ops, log_log_slope};
use haftools_core::verify::parse_table_csv;
use haftools_core::{
    bounds_equivalence, gf_series, hafnian_bruteforce, hafnian_c, hafnian_d, hafnian_sum_expansion,
    instantiate, matching_counts, mu_c_closed, mu_c_recurrence, mu_d_closed, mu_d_recurrence,
    BiPoly, BigInt, Family, Ring, SymmetricMatrix,
};
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TABLE_C: [[u64; 13]; 7] = [
    [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
    [0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
    [0, 0, 0, 0, 1, 2, 4, 7, 11, 16, 22, 29, 37],
    [0, 0, 0, 0, 0, 0, 0, 2, 6, 13, 24, 40, 62],
    [0, 0, 0, 0, 0, 0, 0, 0, 1, 3, 9, 22, 46],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 3, 12],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1],
];

const TABLE_D: [[u64; 13]; 7] = [
    [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
    [0, 0, 1, 3, 5, 7, 9, 11, 13, 15, 17, 19, 21],
    [0, 0, 0, 0, 2, 7, 16, 29, 46, 67, 92, 121, 154],
    [0, 0, 0, 0, 0, 0, 3, 15, 43, 95, 179, 303, 475],
    [0, 0, 0, 0, 0, 0, 0, 0, 5, 30, 104, 271, 591],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 8, 58, 235],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 13],
];

const SEQ_C: [u64; 10] = [1, 2, 7, 43, 372, 4027, 51871, 773186, 13083385, 247698481];
const SEQ_D: [u64; 10] = [0, 0, 1, 10, 99, 1146, 15422, 237135, 4106680, 79154927];

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn run_cli(args: &[&str]) -> Result<String, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(
        std::iter::once("haftools").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    if code != 0 {
        return Err(format!("exit {code}: {}", String::from_utf8_lossy(&err)));
    }
    Ok(String::from_utf8(out).expect("utf-8 output"))
}

fn table_criterion(kind: &str, printed: &[[u64; 13]; 7]) -> Outcome {
    let mut compared = 0;
    for method in ["closed", "recurrence", "series", "brute"] {
        let csv = run_cli(&["table", kind, "12", "--method", method])?;
        let grid = parse_table_csv(&csv)?;
        if grid.len() != printed.len() {
            return Err(format!("{method}: {} rows", grid.len()));
        }
        for (k, row) in printed.iter().enumerate() {
            if grid[k].len() != row.len() {
                return Err(format!("{method}: row {k} has {} cells", grid[k].len()));
            }
            for (n, &v) in row.iter().enumerate() {
                if grid[k][n] != BigInt::from(v) {
                    return Err(format!(
                        "{method}: n={n} k={k} got {} expected {v}",
                        grid[k][n]
                    ));
                }
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} cells over 4 methods"))
}

fn sequence_criterion(kind: &str, printed: &[u64; 10]) -> Outcome {
    let out = run_cli(&["sequence", kind, "10", "0", "1"])?;
    let expected: String = printed.iter().map(|v| format!("{v}\n")).collect();
    if out == expected {
        Ok(out.trim().replace('\n', ", "))
    } else {
        Err(format!("got {:?}", out))
    }
}

fn symbolic_criterion() -> Outcome {
    let (a, b) = (BiPoly::a(), BiPoly::b());
    for m in 0..=5 {
        for (family, fast) in [
            (Family::C, hafnian_c(m, &a, &b)),
            (Family::D, hafnian_d(m, &a, &b)),
        ] {
            let oracle = hafnian_bruteforce(&instantiate(&family.template(2 * m), &a, &b))
                .map_err(|e| e.to_string())?;
            if fast != oracle {
                return Err(format!("{family} m={m}: {fast} vs {oracle}"));
            }
        }
    }
    Ok("m = 0..=5, both families".into())
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64) -> SymmetricMatrix<BigInt> {
    SymmetricMatrix::from_fn(n, |_, _| BigInt::from(rng.gen_range(lo..=hi)))
}

fn sum_expansion_criterion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..200 {
        let a = random_matrix(&mut rng, 6, -3, 3);
        let b = random_matrix(&mut rng, 6, -3, 3);
        let lhs = hafnian_bruteforce(&a.add(&b).unwrap()).unwrap();
        let rhs = hafnian_sum_expansion(&a, &b).unwrap();
        if lhs != rhs {
            return Err(format!("case {case}: {lhs} vs {rhs}"));
        }
    }
    Ok("200 random 6x6 pairs".into())
}

fn scaling_criterion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for case in 0..100 {
        let n = [2, 4, 6, 8][case % 4];
        let m = random_matrix(&mut rng, n, -5, 5);
        let c = BigInt::from(rng.gen_range(-3..=3));
        let lhs = hafnian_bruteforce(&m.scale(&c)).unwrap();
        let rhs = c.ring_pow(n as u32 / 2) * hafnian_bruteforce(&m).unwrap();
        if lhs != rhs {
            return Err(format!("case {case} (n={n}): {lhs} vs {rhs}"));
        }
    }
    Ok("100 random cases, n in {2,4,6,8}".into())
}

fn four_way_criterion() -> Outcome {
    let mut cells = 0;
    for family in [Family::C, Family::D] {
        let rec = match family {
            Family::C => mu_c_recurrence(14),
            Family::D => mu_d_recurrence(14),
        };
        let series = gf_series(family, 14);
        for n in 0..=14usize {
            let brute = matching_counts(&family.template(n));
            for k in 0..=n / 2 + 1 {
                let closed = match family {
                    Family::C => mu_c_closed(n as u64, k as u64),
                    Family::D => mu_d_closed(n as u64, k as u64),
                };
                let b = brute.get(k).cloned().unwrap_or_default();
                let (r, s) = (rec.get(n, k), series.coeff(n, k));
                if !(closed == b && r == b && s == b) {
                    return Err(format!(
                        "{family} n={n} k={k}: brute {b} closed {closed} rec {r} series {s}"
                    ));
                }
                cells += 1;
            }
        }
    }
    Ok(format!("{cells} (n, k) cells"))
}

fn bounds_criterion() -> Outcome {
    let mut count = 0;
    for n in 0..=60 {
        for k in 0..=60 {
            if k % 2 == 1 && n == 2 * k {
                continue;
            }
            let (lhs, rhs) = bounds_equivalence(n, k).map_err(|e| e.to_string())?;
            if lhs != rhs {
                return Err(format!("n={n} k={k}"));
            }
            count += 1;
        }
    }
    Ok(format!("{count} pairs"))
}

fn fibonacci_criterion() -> Outcome {
    let (mut f1, mut f2) = (BigInt::from(1), BigInt::from(1)); // Fib(1), Fib(2)
    for k in 0..=12u64 {
        let v = mu_d_closed(2 * k, k);
        if v != f1 {
            return Err(format!("k={k}: {v} vs Fib({}) = {f1}", k + 1));
        }
        let next = &f1 + &f2;
        f1 = std::mem::replace(&mut f2, next);
    }
    Ok("k = 0..=12".into())
}

fn slope_criterion() -> Outcome {
    let slope_of = |family: Family, ms: &[usize]| {
        let pts: Vec<(f64, f64)> = ms
            .iter()
            .map(|&m| (m as f64, bench_ops(family, m).total() as f64))
            .collect();
        log_log_slope(&pts).expect("at least two points")
    };
    let c = slope_of(Family::C, &[10, 20, 40, 80]);
    let d = slope_of(Family::D, &[10, 20, 40]);
    let detail = format!("C slope {c:.3} in [2.3, 3.7], D slope {d:.3} in [3.2, 4.8]");
    if (2.3..=3.7).contains(&c) && (3.2..=4.8).contains(&d) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1 table C reproduction", Duration::from_secs(1), || {
            table_criterion("C", &TABLE_C)
        }),
        ("2 table D reproduction", Duration::from_secs(1), || {
            table_criterion("D", &TABLE_D)
        }),
        ("3 sequence C (a=0, b=1)", Duration::from_secs(1), || {
            sequence_criterion("C", &SEQ_C)
        }),
        ("4 sequence D (a=0, b=1)", Duration::from_secs(1), || {
            sequence_criterion("D", &SEQ_D)
        }),
        (
            "5 symbolic oracle equivalence",
            Duration::from_secs(120),
            symbolic_criterion,
        ),
        (
            "6 sum-expansion identity",
            Duration::from_secs(60),
            sum_expansion_criterion,
        ),
        (
            "7 scaling identity",
            Duration::from_secs(60),
            scaling_criterion,
        ),
        (
            "8 four-way matching agreement",
            Duration::from_secs(120),
            four_way_criterion,
        ),
        (
            "9 inequality equivalence sweep",
            Duration::from_secs(60),
            bounds_criterion,
        ),
        (
            "10 Fibonacci diagonal",
            Duration::from_secs(60),
            fibonacci_criterion,
        ),
        (
            "11 complexity slopes",
            Duration::from_secs(300),
            slope_criterion,
        ),
    ];
    let mut failures = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > limit => {
                Err(format!("{detail}; took {elapsed:?}, limit {limit:?}"))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!(
                "PASS [{name}] {detail} ({:.1} ms)",
                elapsed.as_secs_f64() * 1e3
            ),
            Err(reason) => {
                failures += 1;
                println!("FAIL [{name}] {reason}");
            }
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
