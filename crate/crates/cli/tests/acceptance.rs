//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::path::Path;

use qpkid_cli::commands::{averaging_check, cheat_guess_check, cheung_check, oracle_check};
use qpkid_core::adversary::{
    cheung_bound, eve_attack_round, helstrom_psucc_oracle, overlap_sum, p_pass_bound, psucc_formula, HelstromStrategy,
};
use qpkid_core::bounds::{min_security_parameter, p_break_bound};
use qpkid_core::keys::{
    averaged_key_operator_discrete, generate_private_key, symmetric_mixture, PrivateKey, ProtocolParams, Variant,
};
use qpkid_core::protocol::{run_session, Alice, Mode, Verdict};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("honest prover always passes", honest_correctness),
        ("discrete key average equals the symmetric mixture", averaging_identity),
        ("Helstrom oracle matches the closed form", oracle_vs_formula),
        ("impostor pass probability equals (1 + P_succ)/2", cheat_guess),
        ("Cheung inequality", cheung),
        ("break-probability arithmetic and advisor", security_arithmetic),
        ("Monte Carlo impostor rate at t = 2", monte_carlo),
        ("byte-identical outputs for a fixed seed", determinism),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail})", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {}: {name} ({detail})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn accept_probability(params: &ProtocolParams, key: &PrivateKey) -> Result<f64, String> {
    let mut alice = Alice::new(key.clone(), params);
    let t = run_session(params, key, &mut alice, Mode::Exact, 0, 0).map_err(err)?;
    ensure(t.verdict == Verdict::Accept, || format!("reject for key {:?}", key.indices()))?;
    t.accept_probability().ok_or_else(|| "exact transcript without probability".into())
}

/// Every key when `p^s` is small; otherwise every phase in every position
/// (rounds are independent, so this covers each per-round factor) plus
/// seeded random keys.
fn honest_correctness() -> Outcome {
    let mut sessions = 0u64;
    let mut worst = 0.0f64;
    for variant in [Variant::Standard, Variant::Hardened] {
        for r in 1..=5u64 {
            for s in 1..=8u64 {
                let params = ProtocolParams::new(r, s, variant).map_err(err)?;
                let p = params.p();
                let mut keys: Vec<Vec<u64>> = Vec::new();
                if p.checked_pow(s as u32).is_some_and(|n| n <= 512) {
                    let mut idx = vec![1u64; s as usize];
                    loop {
                        keys.push(idx.clone());
                        let Some(pos) = idx.iter().rposition(|&k| k < p) else { break };
                        idx[pos] += 1;
                        idx[pos + 1..].iter_mut().for_each(|k| *k = 1);
                    }
                } else {
                    let base = generate_private_key(&params, r * 100 + s).indices();
                    for pos in 0..s as usize {
                        for k in 1..=p {
                            let mut idx = base.clone();
                            idx[pos] = k;
                            keys.push(idx);
                        }
                    }
                    for seed in 0..16 {
                        keys.push(generate_private_key(&params, seed).indices());
                    }
                }
                for idx in keys {
                    let key = PrivateKey::from_indices(p, &idx).map_err(err)?;
                    worst = worst.max((1.0 - accept_probability(&params, &key)?).abs());
                    sessions += 1;
                }
            }
        }
    }
    ensure(worst <= 1e-12, || format!("max |1 - P_accept| = {worst:e}"))?;
    Ok(format!("{sessions} exact sessions, max |1 - P_accept| = {worst:.1e}"))
}

fn averaging_identity() -> Outcome {
    let mut worst = averaging_check(6).map_err(err)?.max_deviation;
    for n in 1..=6usize {
        let target = symmetric_mixture(n).map_err(err)?;
        for p in [n as u64 + 1, n as u64 + 2, n as u64 + 7] {
            worst = worst.max(averaged_key_operator_discrete(p, n).map_err(err)?.max_entry_deviation(&target));
        }
    }
    ensure(worst <= 1e-12, || format!("max entry deviation {worst:e}"))?;
    Ok(format!("n = 1..6, p = n+1..n+3 and n+7, max entry deviation {worst:.1e}"))
}

fn oracle_vs_formula() -> Outcome {
    let check = oracle_check(8).map_err(err)?;
    ensure(check.pass(), || format!("max |oracle - formula| = {:e}", check.max_deviation))?;
    for (t, expected) in [(1, 0.75), (2, 0.853_553_4), (3, 0.904_006_4)] {
        let oracle = helstrom_psucc_oracle(t).map_err(err)?;
        ensure((oracle - expected).abs() < 1e-7, || format!("t = {t}: oracle {oracle} vs {expected}"))?;
    }
    Ok(format!("t = 1..8, max |oracle - formula| = {:.1e}", check.max_deviation))
}

fn cheat_guess() -> Outcome {
    let check = cheat_guess_check(8).map_err(err)?;
    ensure(check.pass(), || format!("max deviation {:e}", check.max_deviation))?;
    for t in 1..=8 {
        let report = eve_attack_round(t, &HelstromStrategy::optimal(t).map_err(err)?).map_err(err)?;
        ensure(report.p_pass_exact <= p_pass_bound(t) + 1e-12, || {
            format!("t = {t}: p_pass {} above bound {}", report.p_pass_exact, p_pass_bound(t))
        })?;
    }
    Ok(format!("t = 1..8, max deviation {:.1e}, all below 1 - 1/(8(t+1))", check.max_deviation))
}

fn cheung() -> Outcome {
    let check = cheung_check(64);
    ensure(check.pass(), || format!("violation {:e}", check.max_deviation))?;
    for t in 1..=64 {
        ensure(psucc_formula(t) <= cheung_bound(t) + 1e-12, || format!("t = {t}: P_succ above 1 - 1/(4(t+1))"))?;
    }
    let gap1 = (overlap_sum(1) - 0.5).abs();
    ensure(gap1 < 1e-12, || format!("t = 1 not tight: {gap1:e}"))?;
    Ok("t = 1..64, equality at t = 1".into())
}

fn security_arithmetic() -> Outcome {
    let b83 = p_break_bound(2, 83, Variant::Standard).map_err(err)?;
    let b82 = p_break_bound(2, 82, Variant::Standard).map_err(err)?;
    ensure((b83 - 0.009_432_915_343_505_939).abs() < 1e-15, || format!("bound(2, 83) = {b83}"))?;
    ensure((b82 - 0.010_061_776_366_406_334).abs() < 1e-15, || format!("bound(2, 82) = {b82}"))?;
    let s_star = min_security_parameter(2, 0.01, Variant::Standard).map_err(err)?;
    ensure(s_star == 83, || format!("advisor gave {s_star}"))?;
    let mut cases = 0;
    for variant in [Variant::Standard, Variant::Hardened] {
        for r in 1..=32u64 {
            for exp in 1..=9 {
                let eps = 10f64.powi(-exp);
                let s = min_security_parameter(r, eps, variant).map_err(err)?;
                let at = p_break_bound(r, s, variant).map_err(err)?;
                ensure(at <= eps, || format!("r = {r}, eps = {eps}: bound({s}) = {at}"))?;
                if s > 1 {
                    let below = p_break_bound(r, s - 1, variant).map_err(err)?;
                    ensure(below > eps, || format!("r = {r}, eps = {eps}: s = {s} not minimal"))?;
                }
                cases += 1;
            }
        }
    }
    let (code, out, _) = cli(&["bounds", "--r", "2", "--epsilon", "0.01"]);
    let v: serde_json::Value = serde_json::from_str(&out).map_err(err)?;
    ensure(code == 0 && v["s_min"] == 83, || format!("cli advisor: exit {code}, {out}"))?;
    Ok(format!("bound(2, 83) = {b83:.6}, s* = 83, advisor bracketed on {cases} grid points"))
}

fn monte_carlo() -> Outcome {
    let trials = 100_000u64;
    let (code, out, errs) = cli(&[
        "run-attack", "--t", "2", "--mode", "sampled", "--trials", "100000", "--seed", "20240601", "--format", "json",
    ]);
    ensure(code == 0, || format!("exit {code}: {errs}"))?;
    let rows: serde_json::Value = serde_json::from_str(&out).map_err(err)?;
    let passes = rows[0]["passes"].as_u64().ok_or("missing passes")?;
    let rate = passes as f64 / trials as f64;
    let expected = 0.926_776_7;
    let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
    let z = (rate - expected) / sigma;
    ensure(z.abs() <= 3.0, || format!("rate {rate} is {z:.2} sigma from {expected}"))?;
    Ok(format!("{passes}/{trials} = {rate:.5}, {z:+.2} sigma"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let runs: [&[&str]; 5] = [
        &["keygen", "--r", "3", "--s", "12", "--seed", "42"],
        &["run-honest", "--r", "3", "--s", "12", "--seed", "42", "--mode", "sampled", "--trials", "3", "--sessions", "3"],
        &["run-attack", "--t-max", "3", "--mode", "sampled", "--trials", "2000", "--seed", "9"],
        &["psucc-table", "--t-max", "6", "--format", "json"],
        &["bounds", "--r", "5", "--epsilon", "1e-6", "--variant", "hardened"],
    ];
    for args in runs {
        let a = run_to_file(args, &dir.path().join("a"))?;
        let b = run_to_file(args, &dir.path().join("b"))?;
        ensure(!a.is_empty() && a == b, || format!("`{}` differs between runs", args.join(" ")))?;
    }
    Ok(format!("{} commands reproduced byte for byte", runs.len()))
}

fn run_to_file(args: &[&str], path: &Path) -> Result<Vec<u8>, String> {
    let mut full = args.to_vec();
    let p = path.to_str().ok_or("non-utf8 temp path")?;
    full.extend(["--out", p]);
    let (code, _, errs) = cli(&full);
    ensure(code == 0, || format!("`{}` exited {code}: {errs}", args.join(" ")))?;
    std::fs::read(path).map_err(err)
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut errs = Vec::new();
    let code = qpkid_cli::run(std::iter::once("qpkid").chain(args.iter().copied()), &mut out, &mut errs);
    (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&errs).into_owned())
}
