//! Acceptance suite. One test per criterion; each prints a PASS/FAIL line.
//!
//! Run with `cargo test --test acceptance -- --nocapture --test-threads=1` to
//! see the lines in order.

mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Signed;
use rand::Rng;

use phi_sidon::analysis::{check_growth, g_of_n};
use phi_sidon::construct::greedy_with_steps;
use phi_sidon::perturb::{padic_abs, perturb_padic, perturb_rational, PadicSpec, PerturbationSpec};
use phi_sidon::sidon_core::{
    forbidden_values, is_extension_sidon, is_sidon_bruteforce, verify_incremental,
    IncrementalVerdict,
};
use phi_sidon::{Limits, LinearForm, Scalar, SidonSet};

use common::*;

/// Runs `check`, prints one line, and fails the test on a miss or overrun.
fn criterion(
    id: u32,
    name: &str,
    budget: Duration,
    check: impl FnOnce() -> Result<String, String>,
) {
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
        .unwrap_or_else(|_| Err("panicked".to_string()));
    let elapsed = start.elapsed();
    let outcome = match outcome {
        Ok(detail) if elapsed > budget => {
            Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}"))
        }
        other => other,
    };
    match &outcome {
        Ok(detail) => println!("PASS criterion {id:>2}: {name} ({detail}; {elapsed:.2?})"),
        Err(detail) => println!("FAIL criterion {id:>2}: {name} ({detail})"),
    }
    if let Err(detail) = outcome {
        panic!("criterion {id} failed: {detail}");
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn form(coeffs: &[i64]) -> LinearForm {
    LinearForm::from_integers(coeffs).unwrap()
}

fn scalars(values: &[i64]) -> Vec<Scalar> {
    values.iter().map(|&v| Scalar::from(v)).collect()
}

fn limits() -> Limits {
    Limits::default()
}

fn to_i64(x: &Scalar) -> i64 {
    i64::try_from(x.to_integer().expect("integer element")).expect("fits in i64")
}

/// Every form with `h <= 4` and coefficients in {-3..3} minus zero.
fn small_forms() -> Vec<Vec<i64>> {
    let digits: Vec<i64> = (-3..=3).filter(|&c| c != 0).collect();
    let mut forms = vec![];
    for h in 1..=4u32 {
        for code in 0..digits.len().pow(h) {
            let mut rest = code;
            let mut coeffs = Vec::new();
            for _ in 0..h {
                coeffs.push(digits[rest % digits.len()]);
                rest /= digits.len();
            }
            forms.push(coeffs);
        }
    }
    forms
}

/// A sweep instance: a property-N form with `h <= 3` and a nonempty set in
/// {-5..5} of size at most 4.
struct Instance {
    coeffs: Vec<i64>,
    set: Vec<i64>,
}

fn sweep_instances() -> &'static [Instance] {
    static CELL: OnceLock<Vec<Instance>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut rng = rng(0x51d0_2024);
        let mut out = Vec::new();
        while out.len() < 1000 {
            let h = rng.gen_range(1..=3);
            let coeffs: Vec<i64> = (0..h)
                .map(|_| loop {
                    let c = rng.gen_range(-5..=5);
                    if c != 0 {
                        break c;
                    }
                })
                .collect();
            if !property_n_oracle(&coeffs) {
                continue;
            }
            let size = rng.gen_range(1..=4);
            let mut set = BTreeSet::new();
            while set.len() < size {
                set.insert(rng.gen_range(-5..=5i64));
            }
            let set: Vec<i64> = set.into_iter().collect();
            if !sidon_oracle(&coeffs, &set) {
                continue;
            }
            out.push(Instance { coeffs, set });
        }
        out
    })
}

struct GreedyRun {
    coeffs: Vec<i64>,
    set: SidonSet,
    steps: Vec<phi_sidon::construct::GreedyStep>,
}

fn greedy_runs() -> &'static [GreedyRun] {
    static CELL: OnceLock<Vec<GreedyRun>> = OnceLock::new();
    CELL.get_or_init(|| {
        [(vec![1, 2], 50), (vec![2, 3], 50), (vec![1, 2, 4], 12)]
            .into_iter()
            .map(|(coeffs, n)| {
                let (set, steps) =
                    greedy_with_steps(&form(&coeffs), n, BigInt::from(1), &limits()).unwrap();
                GreedyRun { coeffs, set, steps }
            })
            .collect()
    })
}

const PADIC_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// (coefficients, targets, output)
type PadicRun = (Vec<i64>, Vec<i64>, SidonSet);

fn padic_runs() -> &'static [PadicRun] {
    static CELL: OnceLock<Vec<PadicRun>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut rng = rng(0xada1c);
        let mut target_lists = vec![vec![0; 6], vec![7, -3, 12, 0, 5, -20]];
        for _ in 0..10 {
            target_lists.push((0..6).map(|_| rng.gen_range(-30..=30)).collect());
        }
        let eps: Vec<Scalar> = PADIC_PRIMES
            .iter()
            .map(|&p| Scalar::new(1, p).unwrap())
            .collect();
        let mut out = Vec::new();
        for coeffs in [vec![1, 2], vec![2, 3]] {
            for targets in &target_lists {
                let spec = PadicSpec::new(
                    targets.iter().map(|&t| BigInt::from(t)).collect(),
                    PADIC_PRIMES.to_vec(),
                    eps.clone(),
                );
                let (set, _) = perturb_padic(&form(&coeffs), &spec, &limits()).unwrap();
                out.push((coeffs.clone(), targets.clone(), set));
            }
        }
        out
    })
}

#[test]
fn criterion_01_property_n_matches_disjoint_pair_oracle() {
    criterion(
        1,
        "property N agrees with the disjoint-pair oracle",
        Duration::from_secs(10),
        || {
            let forms = small_forms();
            let mut holding = 0;
            for coeffs in &forms {
                let expected = property_n_oracle(coeffs);
                let f = form(coeffs);
                let got = f.has_property_n(&limits()).map_err(|e| e.to_string())?;
                ensure(got == expected, || {
                    format!("{coeffs:?}: library {got}, oracle {expected}")
                })?;
                let witness = f
                    .witness_obstruction(&limits())
                    .map_err(|e| e.to_string())?;
                ensure(witness.is_some() != expected, || {
                    format!("{coeffs:?}: witness disagrees")
                })?;
                if let Some((i1, i2)) = witness {
                    ensure(
                        i1.is_disjoint(i2)
                            && !(i1.is_empty() && i2.is_empty())
                            && f.subset_sum(i1) == f.subset_sum(i2),
                        || format!("{coeffs:?}: bad witness {i1} {i2}"),
                    )?;
                }
                holding += usize::from(expected);
            }
            Ok(format!("{} forms, {holding} with property N", forms.len()))
        },
    );
}

#[test]
fn criterion_02_extension_test_matches_bruteforce() {
    criterion(
        2,
        "extension test equals brute force on A with b",
        Duration::from_secs(30),
        || {
            let mut checks = 0;
            for inst in sweep_instances() {
                let f = form(&inst.coeffs);
                let set = SidonSet::from_bruteforce(&f, scalars(&inst.set), &limits())
                    .map_err(|e| e.to_string())?;
                for b in (-20..=20i64).filter(|b| !inst.set.contains(b)) {
                    let got = is_extension_sidon(&f, &set, &Scalar::from(b), &limits())
                        .map_err(|e| e.to_string())?;
                    let mut grown = inst.set.clone();
                    grown.push(b);
                    let oracle = sidon_oracle(&inst.coeffs, &grown);
                    let library = is_sidon_bruteforce(&f, &scalars(&grown), &limits())
                        .map_err(|e| e.to_string())?
                        .is_sidon();
                    ensure(got == oracle && library == oracle, || {
                        format!(
                            "{:?} A={:?} b={b}: extension {got}, brute {library}, oracle {oracle}",
                            inst.coeffs, inst.set
                        )
                    })?;
                    checks += 1;
                }
            }
            Ok(format!(
                "{} instances, {checks} extensions, 0 discrepancies",
                sweep_instances().len()
            ))
        },
    );
}

#[test]
fn criterion_03_forbidden_values_are_exact() {
    criterion(
        3,
        "forbidden values match extension failure",
        Duration::from_secs(30),
        || {
            let mut checks = 0;
            for inst in sweep_instances() {
                let f = form(&inst.coeffs);
                let forbidden = forbidden_values(&f, &scalars(&inst.set), &limits())
                    .map_err(|e| e.to_string())?;
                for b in (-20..=20i64).filter(|b| !inst.set.contains(b)) {
                    let mut grown = inst.set.clone();
                    grown.push(b);
                    let fails = !sidon_oracle(&inst.coeffs, &grown);
                    let listed = forbidden.contains(&Scalar::from(b));
                    ensure(listed == fails, || {
                        format!(
                            "{:?} A={:?} b={b}: forbidden {listed}, extension fails {fails}",
                            inst.coeffs, inst.set
                        )
                    })?;
                    checks += 1;
                }
                // Every listed value outside A really breaks the Sidon property.
                for b in forbidden
                    .iter()
                    .filter(|b| !inst.set.iter().any(|&a| Scalar::from(a) == **b))
                {
                    let mut grown: Vec<Scalar> = scalars(&inst.set);
                    grown.push(b.clone());
                    let ok = is_sidon_bruteforce(&f, &grown, &limits())
                        .map_err(|e| e.to_string())?
                        .is_sidon();
                    ensure(!ok, || {
                        format!(
                            "{:?} A={:?}: listed value {b} extends",
                            inst.coeffs, inst.set
                        )
                    })?;
                }
            }
            Ok(format!("{checks} membership checks, both directions"))
        },
    );
}

#[test]
fn criterion_04_greedy_growth_bound() {
    criterion(
        4,
        "greedy elements stay under 4^h k^(2h-1) + k",
        Duration::from_secs(60),
        || {
            let mut steps = 0;
            for run in greedy_runs() {
                let h = run.coeffs.len() as u32;
                let elements = run.set.elements();
                for (k, element) in elements.iter().enumerate().skip(1) {
                    // Independent recomputation of the bound.
                    let bound =
                        BigInt::from(4).pow(h) * BigInt::from(k).pow(2 * h - 1) + BigInt::from(k);
                    let a = element.to_integer().unwrap();
                    ensure(a <= bound, || {
                        format!("{:?}: a_{} = {a} > {bound}", run.coeffs, k + 1)
                    })?;
                    ensure(run.steps[k - 1].bound.as_ref() == Some(&bound), || {
                        "step bound mismatch".into()
                    })?;
                    steps += 1;
                }
            }
            Ok(format!("{steps} steps over forms [1,2], [2,3], [1,2,4]"))
        },
    );
}

#[test]
fn criterion_05_greedy_prefixes_are_sidon() {
    criterion(
        5,
        "greedy prefixes pass verification",
        Duration::from_secs(60),
        || {
            for run in greedy_runs() {
                let f = form(&run.coeffs);
                let elements = run.set.elements();
                let ints: Vec<i64> = elements.iter().map(to_i64).collect();
                ensure(ints.windows(2).all(|w| w[0] < w[1]) && ints[0] == 1, || {
                    "not increasing from 1".into()
                })?;
                for len in 1..=elements.len() {
                    let prefix = &elements[..len];
                    let ok = if len <= 8 {
                        is_sidon_bruteforce(&f, prefix, &limits())
                            .map_err(|e| e.to_string())?
                            .is_sidon()
                    } else {
                        matches!(
                            verify_incremental(&f, prefix, &limits()).map_err(|e| e.to_string())?,
                            IncrementalVerdict::Sidon(_)
                        )
                    };
                    ensure(ok, || {
                        format!("{:?}: prefix of length {len} rejected", run.coeffs)
                    })?;
                }
                ensure(sidon_oracle(&run.coeffs, &ints), || {
                    format!("{:?}: oracle rejects the full run", run.coeffs)
                })?;
            }
            Ok("all prefixes accepted; full runs confirmed by the oracle".into())
        },
    );
}

#[test]
fn criterion_06_counting_bound() {
    criterion(
        6,
        "count^h <= 2 floor(Ct) + 1",
        Duration::from_secs(60),
        || {
            let ts = [1i64, 10, 100, 1000];
            let mut sets: Vec<(Vec<i64>, SidonSet)> = greedy_runs()
                .iter()
                .map(|r| (r.coeffs.clone(), r.set.clone()))
                .collect();
            sets.extend(padic_runs().iter().map(|(c, _, s)| (c.clone(), s.clone())));
            let mut samples = 0;
            for (coeffs, set) in &sets {
                let c: i64 = coeffs.iter().map(|c| c.abs()).sum();
                let h = coeffs.len() as u32;
                let tq: Vec<Scalar> = ts.iter().map(|&t| Scalar::from(t)).collect();
                let report = check_growth(&form(coeffs), set, &tq).map_err(|e| e.to_string())?;
                for (t, sample) in ts.iter().zip(&report.samples) {
                    let count = set
                        .elements()
                        .iter()
                        .filter(|a| a.abs() <= Scalar::from(*t))
                        .count();
                    let holds = BigInt::from(count).pow(h) <= BigInt::from(2 * c * t + 1);
                    ensure(holds, || {
                        format!("{coeffs:?} t={t}: {count}^{h} > {}", 2 * c * t + 1)
                    })?;
                    ensure(sample.count == count && sample.passes, || {
                        format!("{coeffs:?} t={t}: report disagrees")
                    })?;
                    samples += 1;
                }
            }
            Ok(format!(
                "{} sets, {samples} samples, 0 violations",
                sets.len()
            ))
        },
    );
}

#[test]
fn criterion_07_rational_perturbation() {
    criterion(
        7,
        "rational perturbation within 2^-k and Sidon",
        Duration::from_secs(60),
        || {
            let mut rng = rng(0xa4c1);
            let forms = [vec![1, 2], vec![2, 3], vec![1, -3], vec![1, 2, 4]];
            let eps: Vec<Scalar> = (1..=8).map(Scalar::dyadic).collect();
            for run in 0..100 {
                let coeffs = &forms[run % forms.len()];
                let f = form(coeffs);
                let targets: Vec<Scalar> = (0..8)
                    .map(|_| {
                        Scalar::new(rng.gen_range(-40..=40i64), rng.gen_range(1..=6i64)).unwrap()
                    })
                    .collect();
                let spec = PerturbationSpec::new(targets.clone(), eps.clone());
                let (set, _) = perturb_rational(&f, &spec, &limits()).map_err(|e| e.to_string())?;
                for (k, (a, b)) in set.elements().iter().zip(&targets).enumerate() {
                    let gap = (a.as_rational() - b.as_rational()).abs();
                    let bound = rational(1, 1 << (k + 1));
                    ensure(gap < bound, || {
                        format!("run {run}: |a_{} - b_{}| = {gap}", k + 1, k + 1)
                    })?;
                }
                let qcoeffs: Vec<_> = coeffs.iter().map(|&c| rational(c, 1)).collect();
                let qset: Vec<_> = set
                    .elements()
                    .iter()
                    .map(|a| a.as_rational().clone())
                    .collect();
                ensure(sidon_oracle_rational(&qcoeffs, &qset), || {
                    format!("run {run}: oracle rejects {qset:?}")
                })?;
                ensure(
                    is_sidon_bruteforce(&f, set.elements(), &limits())
                        .map_err(|e| e.to_string())?
                        .is_sidon(),
                    || format!("run {run}: brute force rejects"),
                )?;
            }
            Ok("100 sequences of length 8".into())
        },
    );
}

#[test]
fn criterion_08_padic_perturbation() {
    criterion(
        8,
        "p-adic perturbation close, increasing and Sidon",
        Duration::from_secs(30),
        || {
            for (coeffs, targets, set) in padic_runs() {
                let ints: Vec<BigInt> = set
                    .elements()
                    .iter()
                    .map(|a| a.to_integer().unwrap())
                    .collect();
                ensure(ints[0] > BigInt::from(0), || {
                    "first element not positive".into()
                })?;
                ensure(ints.windows(2).all(|w| w[0] < w[1]), || {
                    format!("{targets:?}: not increasing")
                })?;
                for (k, a) in ints.iter().enumerate() {
                    let diff = a - BigInt::from(targets[k]);
                    for &p in &PADIC_PRIMES[..=k] {
                        ensure(padic_abs_below(&diff, p, PADIC_PRIMES[k]), || {
                            format!("{targets:?}: |a_{} - b_{}|_{p} too large", k + 1, k + 1)
                        })?;
                        let lib = padic_abs(&diff, p).map_err(|e| e.to_string())?;
                        ensure(lib < Scalar::new(1, PADIC_PRIMES[k]).unwrap(), || {
                            "library p-adic value disagrees".into()
                        })?;
                    }
                }
                let qcoeffs: Vec<_> = coeffs.iter().map(|&c| rational(c, 1)).collect();
                let qset: Vec<_> = set
                    .elements()
                    .iter()
                    .map(|a| a.as_rational().clone())
                    .collect();
                ensure(sidon_oracle_rational(&qcoeffs, &qset), || {
                    format!("{targets:?}: oracle rejects")
                })?;
                ensure(
                    is_sidon_bruteforce(&form(coeffs), set.elements(), &limits())
                        .map_err(|e| e.to_string())?
                        .is_sidon(),
                    || format!("{targets:?}: brute force rejects"),
                )?;
            }
            Ok(format!(
                "{} target sequences of length 6",
                padic_runs().len()
            ))
        },
    );
}

#[test]
fn criterion_09_distinct_subset_sum_table() {
    criterion(
        9,
        "g(n) table and monotonicity",
        Duration::from_secs(120),
        || {
            let oracle: Vec<usize> = (1..=8).map(g_oracle).collect();
            ensure(oracle == [1, 2, 2, 3, 3, 3, 4, 4], || {
                format!("oracle table {oracle:?}")
            })?;
            let mut previous = 0;
            for n in 1..=18u64 {
                let result = g_of_n(n, &limits()).map_err(|e| e.to_string())?;
                if n <= 12 {
                    let expected = g_oracle(n as u32);
                    ensure(result.g == expected, || {
                        format!("g({n}) = {}, oracle {expected}", result.g)
                    })?;
                }
                ensure(result.g >= previous, || {
                    format!("g({n}) = {} < g({}) = {previous}", result.g, n - 1)
                })?;
                ensure(
                    result.witness.len() == result.g
                        && result.witness.iter().all(|&x| 1 <= x && x <= n),
                    || format!("g({n}): bad witness {:?}", result.witness),
                )?;
                previous = result.g;
            }
            Ok(format!("oracle matched through n = 12, g(18) = {previous}"))
        },
    );
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run_cli(args: &[&str]) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_phi-sidon"))
        .args(args)
        .env_remove("SIDON_MAX_TUPLES")
        .output()
        .expect("binary runs");
    (out.stdout, out.status.code().unwrap_or(-1))
}

#[test]
fn criterion_10_cli_output_is_deterministic() {
    criterion(
        10,
        "CLI JSON is byte-identical across runs",
        Duration::from_secs(120),
        || {
            let set = scratch("set.txt", "1\n2\n5\n");
            let bad = scratch("bad.txt", "1\n2\n3\n");
            let targets = scratch("targets.txt", "1/3\n-2\n7/2\n0\n");
            let ints = scratch("ints.txt", "0\n7\n-3\n5\n");
            let seed = scratch("seed.txt", "1\n2\n5\n");
            let (set, bad, targets, ints, seed) = (
                set.to_str().unwrap(),
                bad.to_str().unwrap(),
                targets.to_str().unwrap(),
                ints.to_str().unwrap(),
                seed.to_str().unwrap(),
            );
            let commands: Vec<Vec<&str>> = vec![
                vec!["check-n", "--form", "1,2,4"],
                vec!["check-n", "--form", "1,2,3"],
                vec!["check-n", "--form", ""],
                vec!["verify", "--form", "1,2", "--set", set],
                vec!["verify", "--form", "1,2", "--set", bad],
                vec![
                    "verify",
                    "--form",
                    "1,2",
                    "--set",
                    bad,
                    "--mode",
                    "incremental",
                ],
                vec!["greedy", "--form", "1,2", "--count", "20"],
                vec![
                    "greedy",
                    "--form",
                    "1,2",
                    "--count",
                    "10",
                    "--seed-file",
                    seed,
                ],
                vec!["greedy", "--form", "1,1", "--count", "3"],
                vec![
                    "perturb",
                    "--form",
                    "1,2",
                    "--targets",
                    targets,
                    "--eps",
                    "1/2,1/4,1/8,1/16",
                ],
                vec![
                    "perturb",
                    "--form",
                    "1,2",
                    "--targets",
                    ints,
                    "--eps",
                    "1/2,1/3,1/5,1/7",
                    "--padic",
                    "--primes",
                    "2,3,5,7",
                ],
                vec![
                    "growth",
                    "--form",
                    "1,2",
                    "--set",
                    set,
                    "--ts",
                    "1,10,100,1000",
                ],
                vec!["gn", "--n", "10"],
                vec!["image", "--form", "1,2", "--set", set],
                vec!["forbidden", "--form", "1,2", "--set", set],
                vec![
                    "verify",
                    "--form",
                    "1,2,4",
                    "--set",
                    set,
                    "--max-tuples",
                    "5",
                ],
            ];
            for args in &commands {
                let mut full = vec!["--json"];
                full.extend(args);
                let first = run_cli(&full);
                let second = run_cli(&full);
                ensure(first == second, || format!("{args:?}: outputs differ"))?;
                ensure(
                    serde_json::from_slice::<serde_json::Value>(&first.0).is_ok(),
                    || format!("{args:?}: stdout is not JSON"),
                )?;
            }
            Ok(format!("{} commands", commands.len()))
        },
    );
}
