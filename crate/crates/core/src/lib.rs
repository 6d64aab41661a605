//! Exact hafnians of two-parameter symmetric matrices.
//!
//! A two-parameter matrix `T_n(a, b)` is obtained from a symmetric 0/1
//! template by writing `a` on the set bits and `b` elsewhere off the
//! diagonal. Its hafnian reduces to the k-edge matching counts of the
//! template's graph; for the Toeplitz families `C` and `D` those counts have
//! closed forms, recurrences and generating functions, all implemented here
//! next to brute-force references.

pub mod cli;
pub mod error;
pub mod hafnian;
pub mod matchings;
pub mod matrix;
pub mod ring;
pub mod twoparam;
pub mod verify;

pub use error::{Error, Result};
pub use hafnian::{
    enumerate_pairings, hafnian_bruteforce, hafnian_bruteforce_par, hafnian_scaled,
    hafnian_sum_expansion, PairPartition,
};
pub use matchings::{
    bounds_equivalence, gf_series, matching_counts, mu_bruteforce, mu_c_closed, mu_c_recurrence,
    mu_d_closed, mu_d_recurrence, Family, MatchingTable, Method, SeriesTruncation,
};
pub use matrix::{build_template, instantiate, SymmetricMatrix, Template, TemplateKind};
pub use ring::{binomial, pairing_count, poly_eval, BiPoly, BigInt, OpCounter, Ring, RingElement};
pub use twoparam::{
    hafnian_c, hafnian_c_counted, hafnian_d, hafnian_d_counted, hafnian_j,
    hafnian_two_param_general, sequence, TwoParamSpec, TwoParamTemplate,
};
