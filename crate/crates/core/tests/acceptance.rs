//! Exit-gate checks. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};

use av1324::encoder::{audit, encode, MarkingMode};
use av1324::perm::{count_avoiders, count_avoiders_naive, enumerate_avoiders, Pattern};
use av1324::roots::growth_bound;
use av1324::series::{expand, gf, verify_functional_equations, CheckStatus};
use av1324::wordlang::{brute_count_pairs_multi, verify_lemma_on_avoiders, ConstraintSet, LemmaKind};

const ALPHA_H: f64 = 0.2695867676;
const ALPHA_H_TOL: f64 = 1e-9;
const BOUND_H: f64 = 13.7595074;
const BOUND_H_TOL: f64 = 1e-6;
const BOUND_K: f64 = 13.73977;
const BOUND_K_TOL: f64 = 1e-4;
const BOUND_T: f64 = 13.73718;
const BOUND_T_TOL: f64 = 1e-4;
const BASELINE_TOL: f64 = 1e-9;
const S10: u64 = 591_950;
const COUNT_BUDGET: Duration = Duration::from_secs(60);
const GF_BUDGET: Duration = Duration::from_secs(300);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn avoider_counts() -> Outcome {
    let q = Pattern::p1324();
    for n in 0..=8 {
        let fast = count_avoiders(n, &q);
        let naive = count_avoiders_naive(n, &q);
        ensure(fast == naive, || format!("n={n}: backtracking {fast} vs naive {naive}"))?;
    }
    let start = Instant::now();
    let s10 = count_avoiders(10, &q);
    let elapsed = start.elapsed();
    ensure(s10 == BigUint::from(S10), || format!("S_10 = {s10}, expected {S10}"))?;
    ensure(elapsed < COUNT_BUDGET, || format!("S_10 took {elapsed:?}"))?;
    let streamed = enumerate_avoiders(10, &q).count() as u64;
    ensure(streamed == S10, || format!("enumeration yields {streamed} at n=10"))?;
    let naive = count_avoiders_naive(10, &q);
    ensure(naive == s10, || format!("naive filter gives {naive} at n=10"))?;
    Ok(format!(
        "n<=8 match naive filter; S_10 = {s10} in {:.2}s (naive filter and stream agree)",
        elapsed.as_secs_f64()
    ))
}

fn encoder_soundness() -> Outcome {
    let mut checked = 0u64;
    for n in 1..=9 {
        for p in enumerate_avoiders(n, &Pattern::p1324()) {
            let faults = audit(&p, MarkingMode::Rule4Prime);
            ensure(faults.is_empty(), || format!("{p}: {faults:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} avoiders (n<=9), zero violations"))
}

fn injectivity() -> Outcome {
    let mut checked = 0;
    for mode in [MarkingMode::Plain, MarkingMode::Rule4Prime] {
        for n in 1..=9 {
            let mut seen = HashSet::new();
            for p in enumerate_avoiders(n, &Pattern::p1324()) {
                let image = encode(&p, mode);
                ensure(seen.insert(image.clone()), || {
                    format!("{mode}: image ({}, {}) repeated at {p}", image.w, image.z)
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} images distinct across both modes (n<=9)"))
}

fn lemma_suite() -> Outcome {
    let mut checked = 0;
    for n in 1..=9 {
        for kind in [LemmaKind::Cab, LemmaKind::CabK] {
            let r = verify_lemma_on_avoiders(n, kind).map_err(|e| e.to_string())?;
            ensure(r.passed(), || format!("n={n} {kind:?}: {:?}", r.violations.first()))?;
            checked += r.checked;
        }
    }
    Ok(format!("{checked} pair checks for (iv) and (vi), zero violations"))
}

fn gf_vs_oracle() -> Outcome {
    let start = Instant::now();
    let cs = [ConstraintSet::H, ConstraintSet::K, ConstraintSet::T];
    let series = [gf::h(), gf::k(), gf::t()]
        .map(|f| expand(&f, 14).expect("integral series"));
    for n in 2..=14 {
        let brute = brute_count_pairs_multi(n, &cs, 14).map_err(|e| e.to_string())?;
        for ((name, s), b) in ["h", "k", "t"].iter().zip(&series).zip(brute) {
            let b = BigInt::from(b);
            ensure(s[n] == b, || format!("{name}_{n}: series {} vs brute force {b}", s[n]))?;
        }
    }
    let spot: Vec<BigInt> = [1, 6, 26].map(BigInt::from).to_vec();
    ensure(series[0][2..=4] == spot[..], || format!("h_2..h_4 = {:?}", &series[0][2..=4]))?;
    let elapsed = start.elapsed();
    ensure(elapsed < GF_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "h, k, t equal brute force for 2<=n<=14 (h_14 = {}) in {:.1}s",
        series[0][14],
        elapsed.as_secs_f64()
    ))
}

fn functional_equations() -> Outcome {
    let report = verify_functional_equations();
    let mut verified = Vec::new();
    for c in &report {
        match (&c.status, c.name.as_str()) {
            (CheckStatus::Verified, _) => verified.push(c.name.clone()),
            (CheckStatus::Unverifiable { .. }, "gf.t.functional_equation") => {}
            (status, name) => return Err(format!("{name}: {status:?}")),
        }
    }
    for needed in ["gf.h.functional_equation", "gf.k.functional_equation"] {
        ensure(verified.iter().any(|v| v == needed), || format!("{needed} not verified"))?;
    }
    Ok(format!("{} zero residuals; T equation reported unverifiable as printed", verified.len()))
}

fn numeric_bounds() -> Outcome {
    let h = growth_bound(&gf::h()).map_err(|e| e.to_string())?;
    let k = growth_bound(&gf::k()).map_err(|e| e.to_string())?;
    let t = growth_bound(&gf::t()).map_err(|e| e.to_string())?;
    let base = growth_bound(&gf::nocb_words()).map_err(|e| e.to_string())?;
    for (name, g) in [("H", &h), ("K", &k), ("T", &t), ("baseline", &base)] {
        ensure(g.alpha.unique_smallest, || format!("{name}: no uniqueness certificate"))?;
    }
    let within = |v: f64, target: f64, tol: f64| (v - target).abs() <= tol;
    ensure(within(h.alpha.value, ALPHA_H, ALPHA_H_TOL), || format!("alpha_H = {}", h.alpha.value))?;
    ensure(within(h.bound, BOUND_H, BOUND_H_TOL), || format!("H bound = {}", h.bound))?;
    ensure(within(k.bound, BOUND_K, BOUND_K_TOL), || format!("K bound = {}", k.bound))?;
    ensure(within(t.bound, BOUND_T, BOUND_T_TOL), || format!("T bound = {}", t.bound))?;
    let target = 7.0 + 4.0 * 3f64.sqrt();
    ensure(within(base.bound, target, BASELINE_TOL), || format!("baseline = {}", base.bound))?;
    Ok(format!(
        "alpha_H = {:.12}; bounds H {:.9}, K {:.9}, T {:.9}, baseline {:.9}",
        h.alpha.value, h.bound, k.bound, t.bound, base.bound
    ))
}

fn inequality_chain() -> Outcome {
    let [h, k, t] = [gf::h(), gf::k(), gf::t()].map(|f| expand(&f, 20).expect("integral series"));
    for n in 1..=10 {
        let s = BigInt::from(count_avoiders(n, &Pattern::p1324()));
        let m = 2 * n;
        ensure(s <= t[m] && t[m] <= k[m] && k[m] <= h[m], || {
            format!("n={n}: S={s}, t={}, k={}, h={}", t[m], k[m], h[m])
        })?;
    }
    Ok(format!("S_10 = 591950 <= t_20 = {} <= k_20 = {} <= h_20 = {}", t[20], k[20], h[20]))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 avoider counts", avoider_counts),
        ("2 encoder soundness", encoder_soundness),
        ("3 injectivity", injectivity),
        ("4 lemma suite", lemma_suite),
        ("5 gf vs oracle", gf_vs_oracle),
        ("6 functional equations", functional_equations),
        ("7 numeric bounds", numeric_bounds),
        ("8 inequality chain", inequality_chain),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
