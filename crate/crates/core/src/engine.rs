//! Protocol execution in the Pauli-frame picture.
//!
//! Each noisy pair carries a relative Pauli error between Alice's and Bob's
//! halves. Alice measures the starred generators, Bob the plain ones; only
//! the sum of their outcomes `a_i + b_i` is physical here, and it equals the
//! ordinary syndrome of the relative error against the extended code. Bob
//! decodes that syndrome, and the pair block survives iff the residual lies
//! in the stabilizer. Preshared pairs carry no error.

use std::ops::ControlFlow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::code::{Distance, ErrorPattern, LogicalClass, Syndrome};
use crate::eaqecc::BreedingProtocolSpec;
use crate::error::{Error, Result};
use crate::symplectic::{for_each_of_weight, SympVector};

/// Default cap on exhaustive enumerations.
pub const DEFAULT_ENUMERATION_CAP: u128 = 50_000_000;

/// Noise on each noisy pair, independently.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelModel {
    /// With probability `erasure` the pair is flagged and receives a uniform
    /// symplectic error (identity included); otherwise, with probability
    /// `depolarizing`, it receives one of the `p^2 - 1` nontrivial errors
    /// uniformly.
    Pauli { depolarizing: f64, erasure: f64 },
    /// The same pattern every trial.
    Fixed(ErrorPattern),
}

impl ChannelModel {
    pub fn depolarizing(rate: f64) -> Result<Self> {
        Self::pauli(rate, 0.0)
    }

    pub fn pauli(depolarizing: f64, erasure: f64) -> Result<Self> {
        for r in [depolarizing, erasure] {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::InvalidRate(r));
            }
        }
        Ok(ChannelModel::Pauli {
            depolarizing,
            erasure,
        })
    }

    fn validate(&self) -> Result<()> {
        if let ChannelModel::Pauli {
            depolarizing,
            erasure,
        } = *self
        {
            Self::pauli(depolarizing, erasure)?;
        }
        Ok(())
    }
}

/// Post-selection rule for the optional discard step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PostSelect {
    None,
    /// Discard whenever the combined syndrome is nonzero.
    NonzeroSyndrome,
    /// Discard when the decoded error's weight exceeds the threshold.
    DecodedWeightAbove(usize),
}

impl std::str::FromStr for PostSelect {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "none" => Ok(PostSelect::None),
            "nonzero" => Ok(PostSelect::NonzeroSyndrome),
            _ => s
                .strip_prefix("weight:")
                .and_then(|t| t.parse().ok())
                .map(PostSelect::DecodedWeightAbove)
                .ok_or_else(|| format!("unknown post-selection policy `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolOutcome {
    pub combined_syndrome: Syndrome,
    pub decoded: SympVector,
    pub logical: LogicalClass,
    pub success: bool,
    pub discarded: bool,
}

/// Run one protocol instance on a known relative error.
pub fn run_protocol(
    spec: &BreedingProtocolSpec,
    err: &ErrorPattern,
    postselect: PostSelect,
) -> Result<ProtocolOutcome> {
    let code = spec.extended_code();
    if err.error.n() != code.n() {
        return Err(Error::DimensionMismatch {
            expected: code.n(),
            found: err.error.n(),
        });
    }
    if err.error.field() != code.field() {
        return Err(Error::FieldMismatch {
            left: code.field().p(),
            right: err.error.field().p(),
        });
    }
    if let Some(&pos) = spec
        .ebit_positions()
        .iter()
        .find(|&&p| err.error.at(p) != (0, 0))
    {
        return Err(Error::Precondition(format!(
            "preshared pair at position {pos} carries an error"
        )));
    }
    if let Some(&pos) = err
        .erased
        .iter()
        .find(|&&p| spec.ebit_positions().contains(&p))
    {
        return Err(Error::Precondition(format!(
            "erased position {pos} is a preshared pair"
        )));
    }
    Ok(run_unchecked(spec, err, postselect))
}

fn run_unchecked(
    spec: &BreedingProtocolSpec,
    err: &ErrorPattern,
    postselect: PostSelect,
) -> ProtocolOutcome {
    let code = spec.extended_code();
    let combined_syndrome = code.syndrome_raw(err.error.coords());
    let decoded = spec
        .decoder()
        .decode(&combined_syndrome, &err.erased)
        .expect("every syndrome of an error on noisy positions is reachable from them");
    let residual = err.error.sub(&decoded).expect("same shape");
    let logical = code.logical_class(&residual);
    let success = logical.is_identity();
    let discarded = match postselect {
        PostSelect::None => false,
        PostSelect::NonzeroSyndrome => !combined_syndrome.is_zero(),
        PostSelect::DecodedWeightAbove(t) => decoded.weight() > t,
    };
    ProtocolOutcome {
        combined_syndrome,
        decoded,
        logical,
        success,
        discarded,
    }
}

/// Per-`(t, e)` pattern count in a guarantee certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseCount {
    pub t: usize,
    pub e: usize,
    pub patterns: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuaranteeCertificate {
    pub d: usize,
    pub patterns: u64,
    pub passed: bool,
    pub cases: Vec<CaseCount>,
    pub counterexample: Option<ErrorPattern>,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of patterns with exactly `t` unerased errors and `e` erased
/// positions, each erased position carrying a nontrivial error.
fn case_size(n: usize, p: u8, t: usize, e: usize) -> u128 {
    let q = (p as u128) * (p as u128) - 1;
    binomial(n, e) * q.pow(e as u32) * binomial(n - e, t) * q.pow(t as u32)
}

fn subsets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    fn rec(
        items: &[usize],
        size: usize,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, size, 0, &mut Vec::new(), &mut out);
    out
}

/// Exhaustively check that every pattern with `2t + e < d` on the noisy
/// positions is corrected.
///
/// Erased positions carry a nontrivial error (an identity there is the same
/// pattern with a smaller erased set). Work is split by erased set; the
/// reported counterexample is the first in enumeration order.
pub fn verify_guarantee(
    spec: &BreedingProtocolSpec,
    cap: u128,
    workers: usize,
) -> Result<GuaranteeCertificate> {
    verify_guarantee_scoped(spec, cap, workers, true)
}

/// [`verify_guarantee`], optionally restricted to patterns without erasures.
pub fn verify_guarantee_scoped(
    spec: &BreedingProtocolSpec,
    cap: u128,
    workers: usize,
    erasures: bool,
) -> Result<GuaranteeCertificate> {
    let d = match spec.params().d {
        Distance::Defined { d, .. } => d,
        Distance::Undefined => return Err(Error::DistanceUndefined),
    };
    let noisy = spec.noisy_positions().to_vec();
    let n = noisy.len();
    let f = spec.field();
    let big_n = spec.extended_code().n();

    let mut cases = Vec::new();
    let mut total: u128 = 0;
    let max_e = if erasures { d } else { 1 };
    for e in 0..max_e {
        for t in 0..=(d - 1 - e) / 2 {
            if 2 * t + e < d && e <= n && t <= n - e {
                let size = case_size(n, f.p(), t, e);
                total += size;
                cases.push((t, e, size));
            }
        }
    }
    if total > cap {
        return Err(Error::Infeasible {
            what: "guarantee enumeration",
            required: total,
            cap,
        });
    }

    let blocks: Vec<(usize, usize, Vec<usize>)> = cases
        .iter()
        .flat_map(|&(t, e, _)| subsets(&noisy, e).into_iter().map(move |s| (t, e, s)))
        .collect();

    let results = par_map(blocks, workers, |(t, e, erased)| {
        let free: Vec<usize> = noisy
            .iter()
            .copied()
            .filter(|p| erased.binary_search(p).is_err())
            .collect();
        let mut count = 0u64;
        let mut failure = None;
        let _ = for_each_of_weight(f, big_n, &erased, e, |on_erased| {
            for_each_of_weight(f, big_n, &free, t, |on_free| {
                let coords: Vec<u8> = on_erased
                    .iter()
                    .zip(on_free)
                    .map(|(&x, &y)| f.add(x, y))
                    .collect();
                let pattern = ErrorPattern {
                    error: SympVector::from_coords_unchecked(f, coords),
                    erased: erased.clone(),
                };
                count += 1;
                if !run_unchecked(spec, &pattern, PostSelect::None).success {
                    failure = Some(pattern);
                    return ControlFlow::Break(());
                }
                ControlFlow::Continue(())
            })
        });
        (count, failure)
    });

    let mut counterexample = None;
    for (_, failure) in &results {
        if let Some(fl) = failure {
            counterexample = Some(fl.clone());
            break;
        }
    }
    let passed = counterexample.is_none();
    Ok(GuaranteeCertificate {
        d,
        patterns: if passed {
            total as u64
        } else {
            results.iter().map(|(c, _)| c).sum()
        },
        passed,
        cases: cases
            .into_iter()
            .map(|(t, e, size)| CaseCount {
                t,
                e,
                patterns: size as u64,
            })
            .collect(),
        counterexample,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub trials: u64,
    pub discards: u64,
    pub successes: u64,
    /// `successes / (trials - discards)`; zero when every trial was
    /// discarded.
    pub fidelity_estimate: f64,
    /// Half-width of the 95% normal-approximation binomial interval.
    pub ci_half_width: f64,
    pub gross_k: usize,
    pub net_yield: i64,
    pub seed: u64,
    pub channel: ChannelModel,
}

/// Generator for trial `trial` under `seed`: stream `trial` of the ChaCha8
/// keystream keyed by `seed`, so trials can run in any order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draw one error pattern on the noisy positions.
pub fn sample_error(
    spec: &BreedingProtocolSpec,
    ch: &ChannelModel,
    rng: &mut impl Rng,
) -> ErrorPattern {
    let (depolarizing, erasure) = match ch {
        ChannelModel::Fixed(pattern) => return pattern.clone(),
        ChannelModel::Pauli {
            depolarizing,
            erasure,
        } => (*depolarizing, *erasure),
    };
    let f = spec.field();
    let p = f.p() as u32;
    let big_n = spec.extended_code().n();
    let mut coords = vec![0u8; 2 * big_n];
    let mut erased = Vec::new();
    for &pos in spec.noisy_positions() {
        let (x, z) = if erasure > 0.0 && rng.random::<f64>() < erasure {
            erased.push(pos);
            (rng.random_range(0..p), rng.random_range(0..p))
        } else if depolarizing > 0.0 && rng.random::<f64>() < depolarizing {
            let u = rng.random_range(1..p * p);
            (u / p, u % p)
        } else {
            (0, 0)
        };
        coords[pos] = x as u8;
        coords[big_n + pos] = z as u8;
    }
    ErrorPattern {
        error: SympVector::from_coords_unchecked(f, coords),
        erased,
    }
}

const CHUNK: u64 = 4096;

/// Monte Carlo estimate of the block success probability.
pub fn simulate(
    spec: &BreedingProtocolSpec,
    ch: &ChannelModel,
    trials: u64,
    seed: u64,
    postselect: PostSelect,
    workers: usize,
) -> Result<SimulationReport> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    ch.validate()?;
    if let ChannelModel::Fixed(pattern) = ch {
        run_protocol(spec, pattern, postselect)?;
    }
    let chunks: Vec<u64> = (0..trials.div_ceil(CHUNK)).collect();
    let counts = par_map(chunks, workers, |chunk| {
        let mut succ = 0u64;
        let mut disc = 0u64;
        for trial in chunk * CHUNK..((chunk + 1) * CHUNK).min(trials) {
            let mut rng = trial_rng(seed, trial);
            let pattern = sample_error(spec, ch, &mut rng);
            let out = run_unchecked(spec, &pattern, postselect);
            if out.discarded {
                disc += 1;
            } else if out.success {
                succ += 1;
            }
        }
        (succ, disc)
    });
    let (successes, discards) = counts
        .iter()
        .fold((0, 0), |(s, d), &(s2, d2)| (s + s2, d + d2));
    let accepted = trials - discards;
    let fidelity = if accepted == 0 {
        0.0
    } else {
        successes as f64 / accepted as f64
    };
    let ci = if accepted == 0 {
        0.0
    } else {
        1.96 * (fidelity * (1.0 - fidelity) / accepted as f64).sqrt()
    };
    Ok(SimulationReport {
        trials,
        discards,
        successes,
        fidelity_estimate: fidelity,
        ci_half_width: ci,
        gross_k: spec.params().gross_k,
        net_yield: spec.params().net_yield(),
        seed,
        channel: ch.clone(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactFidelity {
    /// Success probability conditioned on acceptance.
    pub fidelity: f64,
    /// Probability that the post-selection keeps the block.
    pub acceptance: f64,
}

/// Exact block success probability by summing over every error on the noisy
/// positions (and every erased set when erasures are on).
pub fn exact_fidelity(
    spec: &BreedingProtocolSpec,
    ch: &ChannelModel,
    postselect: PostSelect,
    cap: u128,
) -> Result<ExactFidelity> {
    ch.validate()?;
    let (depolarizing, erasure) = match ch {
        ChannelModel::Fixed(pattern) => {
            let out = run_protocol(spec, pattern, postselect)?;
            return Ok(ExactFidelity {
                fidelity: if out.success && !out.discarded {
                    1.0
                } else {
                    0.0
                },
                acceptance: if out.discarded { 0.0 } else { 1.0 },
            });
        }
        ChannelModel::Pauli {
            depolarizing,
            erasure,
        } => (*depolarizing, *erasure),
    };
    let f = spec.field();
    let p = f.p() as u128;
    let noisy = spec.noisy_positions().to_vec();
    let n = noisy.len();
    let big_n = spec.extended_code().n();
    let vectors = p.checked_pow(2 * n as u32).unwrap_or(u128::MAX);
    let erased_sets: u128 = if erasure > 0.0 {
        1u128 << n.min(127)
    } else {
        1
    };
    let total = vectors.saturating_mul(erased_sets);
    if total > cap {
        return Err(Error::Infeasible {
            what: "exact fidelity enumeration",
            required: total,
            cap,
        });
    }

    let q = (p * p) as f64;
    let nontrivial = depolarizing / (q - 1.0);
    let mut accepted = 0.0f64;
    let mut good = 0.0f64;
    let masks: u64 = if erasure > 0.0 { 1 << n } else { 1 };
    for mask in 0..masks {
        let erased: Vec<usize> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| noisy[i])
            .collect();
        let mut coords = vec![0u8; 2 * big_n];
        let mut digits = vec![0u8; 2 * n];
        for _ in 0..vectors {
            let mut prob = 1.0;
            for (i, &pos) in noisy.iter().enumerate() {
                let trivial = coords[pos] == 0 && coords[big_n + pos] == 0;
                prob *= if mask >> i & 1 == 1 {
                    erasure / q
                } else if trivial {
                    (1.0 - erasure) * (1.0 - depolarizing)
                } else {
                    (1.0 - erasure) * nontrivial
                };
            }
            if prob > 0.0 {
                let pattern = ErrorPattern {
                    error: SympVector::from_coords_unchecked(f, coords.clone()),
                    erased: erased.clone(),
                };
                let out = run_unchecked(spec, &pattern, postselect);
                if !out.discarded {
                    accepted += prob;
                    if out.success {
                        good += prob;
                    }
                }
            }
            for j in 0..2 * n {
                let c = if j < n {
                    noisy[j]
                } else {
                    big_n + noisy[j - n]
                };
                coords[c] = f.add(coords[c], 1);
                digits[j] += 1;
                if digits[j] < f.p() {
                    break;
                }
                digits[j] = 0;
            }
        }
    }
    Ok(ExactFidelity {
        fidelity: if accepted > 0.0 { good / accepted } else { 0.0 },
        acceptance: accepted,
    })
}

/// Order-preserving map, on `workers` threads when the `parallel` feature is
/// on and `workers > 1`.
pub(crate) fn par_map<T, R, F>(items: Vec<T>, workers: usize, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if workers > 1 {
        use rayon::prelude::*;
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            return pool.install(|| items.into_par_iter().map(&f).collect());
        }
    }
    let _ = workers;
    items.into_iter().map(f).collect()
}
