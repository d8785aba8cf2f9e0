//! One PASS/FAIL line per acceptance criterion.

use std::process::Command;
use std::time::{Duration, Instant};

use breeding_edp::catalog::{builtin, find};
use breeding_edp::code::ErrorPattern;
use breeding_edp::eaqecc::{convert_pure, ebit_count};
use breeding_edp::engine::{
    exact_fidelity, run_protocol, simulate, verify_guarantee, verify_guarantee_scoped,
    ChannelModel, PostSelect, DEFAULT_ENUMERATION_CAP,
};
use breeding_edp::search::{search_codes, SearchQuery, Verdict};
use breeding_edp::{BreedingProtocolSpec, FieldModulus, SympSubspace, SympVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let took = start.elapsed();
    if took <= limit {
        Ok(took)
    } else {
        Err(format!("took {took:?}, limit {limit:?}"))
    }
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let cat = builtin();
    let code = find(&cat, "6-4-2").map_err(|e| e.to_string())?.code();
    let spec = convert_pure(code, &[5]).map_err(|e| e.to_string())?;
    let p = spec.params();
    ensure((p.n, p.c, p.gross_k, p.net_yield()) == (5, 1, 4, 3), || {
        format!("params {p:?}")
    })?;
    let cert = verify_guarantee(&spec, DEFAULT_ENUMERATION_CAP, 1).map_err(|e| e.to_string())?;
    ensure(cert.passed && cert.patterns == 16, || format!("{cert:?}"))?;
    let took = within(Duration::from_secs(1), start)?;
    Ok(format!(
        "5 noisy + 1 preshared, gross 4, net 3, 16 patterns PASS in {took:?}"
    ))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let r = search_codes(&SearchQuery::new(2, 5, 3, 2), workers()).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::NotExists, || {
        format!("{:?}", r.verdict)
    })?;
    let took = within(Duration::from_secs(60), start)?;
    Ok(format!(
        "[[5,3,2]]_2 NOT EXISTS, {} nodes, in {took:?}",
        r.nodes
    ))
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let cat = builtin();
    let code = find(&cat, "5-1-3").map_err(|e| e.to_string())?.code();
    let spec = BreedingProtocolSpec::hashing(code.clone());
    let f = FieldModulus::BINARY;
    let mut corrected = 0;
    for pos in 0..5 {
        for (x, z) in [(1, 0), (0, 1), (1, 1)] {
            let e = SympVector::single(f, 5, pos, x, z).map_err(|e| e.to_string())?;
            let out = run_protocol(
                &spec,
                &ErrorPattern::errors_only(e.clone()),
                PostSelect::None,
            )
            .map_err(|e| e.to_string())?;
            ensure(out.success, || format!("{e} not corrected"))?;
            corrected += 1;
        }
    }
    let cert = verify_guarantee_scoped(&spec, DEFAULT_ENUMERATION_CAP, 1, false)
        .map_err(|e| e.to_string())?;
    ensure(cert.passed && cert.patterns == 16, || format!("{cert:?}"))?;
    let took = within(Duration::from_secs(1), start)?;
    Ok(format!("{corrected} single errors corrected in {took:?}"))
}

fn random_vector(rng: &mut ChaCha8Rng, f: FieldModulus, n: usize) -> SympVector {
    let coords = (0..2 * n).map(|_| rng.random_range(0..f.p())).collect();
    SympVector::from_coords(f, coords).unwrap()
}

/// Random isotropic subspace grown greedily.
fn random_isotropic(rng: &mut ChaCha8Rng, f: FieldModulus, n: usize) -> SympSubspace {
    let mut gens: Vec<SympVector> = Vec::new();
    for _ in 0..rng.random_range(0..=n + 1) {
        let v = random_vector(rng, f, n);
        if gens.iter().all(|g| g.symp_product(&v).unwrap() == 0) {
            gens.push(v);
        }
    }
    SympSubspace::new(f, n, &gens).unwrap()
}

fn criterion_4() -> Check {
    let mut checks = 0;
    for p in [2u32, 3, 5] {
        let f = FieldModulus::new(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5747 + p as u64);
        for i in 0..10_000 {
            let n = rng.random_range(1..=6);
            let u = random_vector(&mut rng, f, n);
            let v = random_vector(&mut rng, f, n);
            let (us, vs) = (u.star(), v.star());
            ensure(us.star() == u, || {
                format!("p={p}: star not an involution on {u}")
            })?;
            ensure(us.weight() == u.weight(), || {
                format!("p={p}: weight changed for {u}")
            })?;
            let lhs = us.symp_product(&vs).unwrap();
            let rhs = f.neg(u.symp_product(&v).unwrap());
            ensure(lhs == rhs, || {
                format!("p={p}: product of {u}, {v} not negated")
            })?;
            if i % 10 == 0 {
                let c = random_isotropic(&mut rng, f, n);
                let cs = c.star();
                ensure(cs.is_subspace_of(&cs.symp_dual()), || {
                    format!("p={p}: C* not isotropic")
                })?;
            }
            checks += 1;
        }
    }
    Ok(format!("{checks} randomized checks, zero failures"))
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xeb17);
    for i in 0..1000 {
        let f = FieldModulus::new(if i % 2 == 0 { 2 } else { 3 }).unwrap();
        let n = rng.random_range(1..=5);
        let gens: Vec<SympVector> = (0..rng.random_range(0..=2 * n))
            .map(|_| random_vector(&mut rng, f, n))
            .collect();
        let d = SympSubspace::new(f, n, &gens).unwrap();
        let ext = d.symp_extend();
        let c = ebit_count(&d);
        ensure(c == ext.added, || {
            format!("ebit count {c} vs {} added", ext.added)
        })?;
        ensure(ext.extended.is_self_orthogonal(), || {
            "extension not self-orthogonal".into()
        })?;
        let appended: Vec<usize> = (n..n + ext.added).collect();
        let back = ext.extended.puncture(&appended).unwrap();
        ensure(back == d, || "puncturing does not return D".into())?;
    }
    Ok("1000 random subspaces, zero failures".into())
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let cat = builtin();
    let spec =
        convert_pure(find(&cat, "6-4-2").unwrap().code(), &[5]).map_err(|e| e.to_string())?;
    let trials = 100_000;
    let mut worst: f64 = 0.0;
    for (i, rate) in [0.01, 0.05, 0.1, 0.3].into_iter().enumerate() {
        let ch = ChannelModel::depolarizing(rate).unwrap();
        let exact = exact_fidelity(&spec, &ch, PostSelect::None, DEFAULT_ENUMERATION_CAP)
            .map_err(|e| e.to_string())?
            .fidelity;
        let sim = simulate(&spec, &ch, trials, i as u64, PostSelect::None, workers())
            .map_err(|e| e.to_string())?;
        let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
        let z = (sim.fidelity_estimate - exact).abs() / sigma;
        ensure(z <= 3.0, || {
            format!(
                "rate {rate}: simulated {} vs exact {exact} ({z:.2} sigma)",
                sim.fidelity_estimate
            )
        })?;
        worst = worst.max(z);
    }
    let zero = ChannelModel::depolarizing(0.0).unwrap();
    let s0 = simulate(&spec, &zero, 1000, 0, PostSelect::None, 1).map_err(|e| e.to_string())?;
    let e0 = exact_fidelity(&spec, &zero, PostSelect::None, DEFAULT_ENUMERATION_CAP)
        .map_err(|e| e.to_string())?;
    ensure(s0.fidelity_estimate == 1.0 && e0.fidelity == 1.0, || {
        "rate 0 is not exactly 1".into()
    })?;
    let took = within(Duration::from_secs(30), start)?;
    Ok(format!(
        "max deviation {worst:.2} sigma, rate 0 gives 1.0, in {took:?}"
    ))
}

fn breed(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_breed"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited {}", out.status));
    }
    Ok(out.stdout)
}

fn criterion_7() -> Check {
    let base: [&[&str]; 6] = [
        &["analyze", "--code", "8-3-3"],
        &["convert", "--code", "6-4-2", "--puncture", "6"],
        &["verify", "--code", "5-1-3"],
        &[
            "simulate",
            "--code",
            "6-4-2",
            "--puncture",
            "6",
            "--rates",
            "0.01,0.1",
            "--trials",
            "20000",
            "--seed",
            "0",
        ],
        &["search", "--p", "2", "--n", "5", "--k", "3", "--dmin", "2"],
        &["compare", "--certify", "1000000"],
    ];
    let mut runs = 0;
    for cmd in base {
        for format in ["human", "tsv", "jsonl"] {
            let mut args: Vec<&str> = cmd.to_vec();
            args.extend(["--format", format]);
            let first = breed(&args)?;
            ensure(first == breed(&args)?, || {
                format!("{args:?} differs between runs")
            })?;
            runs += 2;
            if matches!(cmd[0], "verify" | "simulate" | "search" | "compare") {
                for w in ["1", "3", "8"] {
                    let mut with_workers = args.clone();
                    with_workers.extend(["--workers", w]);
                    ensure(first == breed(&with_workers)?, || {
                        format!("{with_workers:?} differs")
                    })?;
                    runs += 1;
                }
            }
        }
    }
    Ok(format!("{runs} runs byte-identical"))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 worked [[6,4,2]] breeding example", criterion_1),
        ("2 [[5,3,2]]_2 non-existence", criterion_2),
        ("3 [[5,1,3]] hashing corrects single errors", criterion_3),
        ("4 star-map properties", criterion_4),
        ("5 ebit count and minimal extension", criterion_5),
        ("6 simulator agrees with exact fidelity", criterion_6),
        ("7 CLI determinism", criterion_7),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
