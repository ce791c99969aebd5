use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use qpkid_core::adversary::{
    cheung_bound, cheung_sum_rhs, eve_attack_round, fool_first_attempt_bound, helstrom_psucc_oracle, overlap_sum,
    p_pass_bound, psucc_formula, sample_attack_rounds, HelstromStrategy,
};
use qpkid_core::bounds::{min_security_parameter, p_break_bound, union_bound_chain};
use qpkid_core::keys::{
    averaged_key_operator_discrete, generate_private_key, phase_average_exponential_raw, symmetric_mixture, KeyFile,
    PhaseFraction, PrivateKey, ProtocolParams, PublicKeyExport,
};
use qpkid_core::protocol::{run_session, Alice, Mode, Verdict};
use qpkid_core::qsim::{c, PureState};
use qpkid_core::{seed, Error as CoreError};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Format, RunConfig};
use crate::table::{json_number, Table};
use crate::{CliError, Report, Status};

/// Largest `t` for which `psucc-table` evaluates the trace-norm oracle.
pub const ORACLE_TABLE_LIMIT: u64 = 32;
/// Default sweep for commands taking `--t-max`.
pub const DEFAULT_T_MAX: u64 = 8;

pub fn keygen(cfg: &RunConfig) -> Result<Report, CliError> {
    let params = ProtocolParams::new(cfg.require_r()?, cfg.require_s()?, cfg.variant())?;
    let seed = cfg.require_seed()?;
    if cfg.expose_phases && cfg.public_out.is_none() {
        return Err(CliError::Config("--expose-phases needs --public-out".into()));
    }
    let key = generate_private_key(&params, seed);
    if let Some(path) = &cfg.public_out {
        let public = PublicKeyExport::new(&key, cfg.expose_phases);
        write_file(path, &pretty(&public))?;
    }
    Ok(Report::ok(pretty(&KeyFile::new(&params, seed, &key))))
}

#[derive(Debug, Default, Serialize)]
struct HonestSummary {
    keys: u64,
    sessions_attempted: u64,
    accepted: u64,
    rejected: u64,
    refused: u64,
}

/// Key `i` is generated from `derive(seed, 2i)`; session `j` under it uses
/// `derive(derive(seed, 2i + 1), j)`.
pub fn run_honest(cfg: &RunConfig) -> Result<Report, CliError> {
    if cfg.sessions == 0 {
        return Err(CliError::Config("--sessions must be at least 1".into()));
    }
    let trials = cfg.trials.unwrap_or(1);
    if trials == 0 {
        return Err(CliError::Config("--trials must be at least 1".into()));
    }
    let mode = cfg.mode();

    let mut keys: Vec<(ProtocolParams, PrivateKey)> = Vec::new();
    let master = match &cfg.key {
        Some(path) => {
            if trials != 1 {
                return Err(CliError::Config("--key fixes a single key; drop --trials".into()));
            }
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let file: KeyFile =
                serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let params = file.params()?;
            check_matches("--r", cfg.r, params.r())?;
            check_matches("--s", cfg.s, params.s())?;
            keys.push((params, file.private_key()?));
            cfg.seed_for_mode()?
        }
        None => {
            let params = ProtocolParams::new(cfg.require_r()?, cfg.require_s()?, cfg.variant())?;
            let master = cfg.require_seed()?;
            for i in 0..trials {
                keys.push((params, generate_private_key(&params, seed::derive(master, 2 * i))));
            }
            master
        }
    };

    let mut out = String::new();
    let mut summary = HonestSummary { keys: trials, ..Default::default() };
    let mut session_id = 0u64;
    for (i, (params, key)) in keys.into_iter().enumerate() {
        let session_master = seed::derive(master, 2 * i as u64 + 1);
        let mut alice = Alice::new(key.clone(), &params);
        for j in 0..cfg.sessions {
            summary.sessions_attempted += 1;
            let session_seed = seed::derive(session_master, j);
            match run_session(&params, &key, &mut alice, mode, session_seed, session_id) {
                Ok(transcript) => {
                    match transcript.verdict {
                        Verdict::Accept => summary.accepted += 1,
                        Verdict::Reject => summary.rejected += 1,
                    }
                    out.push_str(&transcript.to_json_lines());
                }
                Err(CoreError::UsageExhausted { uses }) => {
                    summary.refused += 1;
                    let line = json!({
                        "session_id": session_id,
                        "refused": true,
                        "reason": format!("key already used in {uses} sessions"),
                    });
                    out.push_str(&line.to_string());
                    out.push('\n');
                }
                Err(e) => return Err(e.into()),
            }
            session_id += 1;
        }
    }
    let status = if summary.refused > 0 {
        Status::Refusal
    } else if summary.rejected > 0 {
        Status::Reject
    } else {
        Status::Success
    };
    let mut summary_text = serde_json::to_string(&summary).expect("summary serializes");
    summary_text.push('\n');
    Ok(Report { output: out, summary: Some(summary_text), status })
}

/// Optimal impostor per `t`. Sampled mode draws `--trials` rounds per `t`
/// seeded with `derive(seed, t)`.
pub fn run_attack(cfg: &RunConfig) -> Result<Report, CliError> {
    let ts = cfg.t_values(DEFAULT_T_MAX)?;
    let s = cfg.s.unwrap_or(1);
    if s == 0 {
        return Err(CliError::Config("--s must be at least 1".into()));
    }
    let sampled = match cfg.mode() {
        Mode::Exact => {
            if cfg.trials.is_some() {
                return Err(CliError::Config("--trials applies to sampled mode only".into()));
            }
            None
        }
        Mode::Sampled => match cfg.trials {
            None | Some(0) => return Err(CliError::Config("sampled mode needs --trials of at least 1".into())),
            Some(n) => Some((n, cfg.require_seed()?)),
        },
    };

    let mut table = Table::new(vec![
        "t",
        "p_pass",
        "p_pass_from_psucc",
        "p_pass_bound",
        "fool_prob_s",
        "fool_bound_s",
        "trials",
        "passes",
        "p_pass_sampled",
    ]);
    let mut status = Status::Success;
    for t in ts {
        let strategy = HelstromStrategy::optimal(t)?;
        let report = eve_attack_round(t, &strategy)?;
        let bound = p_pass_bound(t);
        if report.p_pass_exact > bound + qpkid_core::tolerance::COMPARISON {
            status = Status::Failed;
        }
        let (trials, passes, rate) = match sampled {
            Some((n, master)) => {
                let passes = sample_attack_rounds(t, &strategy, n, seed::derive(master, t))?;
                (Some(n), Some(passes), Some(passes as f64 / n as f64))
            }
            None => (None, None, None),
        };
        table.push(vec![
            t.into(),
            report.p_pass_exact.into(),
            ((1.0 + psucc_formula(t)) / 2.0).into(),
            bound.into(),
            report.p_pass_exact.powf(s as f64).into(),
            fool_first_attempt_bound(t, s).into(),
            trials.into(),
            passes.into(),
            rate.into(),
        ]);
    }
    Ok(Report { output: table.render(cfg.format_or(Format::Csv))?, summary: None, status })
}

pub fn psucc_table(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut table = Table::new(vec![
        "t",
        "formula",
        "oracle",
        "cheung",
        "overlap_sum",
        "cheung_sum_rhs",
        "p_pass",
        "p_pass_bound",
    ]);
    for t in cfg.t_values(DEFAULT_T_MAX)? {
        let formula = psucc_formula(t);
        let oracle = if t <= ORACLE_TABLE_LIMIT { Some(helstrom_psucc_oracle(t)?) } else { None };
        table.push(vec![
            t.into(),
            formula.into(),
            oracle.into(),
            cheung_bound(t).into(),
            overlap_sum(t).into(),
            cheung_sum_rhs(t).into(),
            ((1.0 + formula) / 2.0).into(),
            p_pass_bound(t).into(),
        ]);
    }
    Ok(Report::ok(table.render(cfg.format_or(Format::Csv))?))
}

/// Advisor with `--epsilon`, union-bound chain with `--t`, plain bound otherwise.
pub fn bounds(cfg: &RunConfig) -> Result<Report, CliError> {
    let r = cfg.require_r()?;
    let variant = cfg.variant();
    if let Some(epsilon) = cfg.epsilon {
        if cfg.s.is_some() || cfg.t.is_some() {
            return Err(CliError::Config("--epsilon computes s; drop --s and --t".into()));
        }
        let s_min = min_security_parameter(r, epsilon, variant)?;
        let mut table = Table::new(vec!["r", "epsilon", "variant", "s_min", "bound_at_s_min"]);
        table.push(vec![
            r.into(),
            epsilon.into(),
            variant.as_str().into(),
            s_min.into(),
            p_break_bound(r, s_min, variant)?.into(),
        ]);
        return Ok(Report::ok(render_single(&table, cfg.format_or(Format::Json))?));
    }
    let s = cfg.require_s()?;
    let format = cfg.format_or(Format::Csv);
    match cfg.t {
        Some(t) => {
            let est = union_bound_chain(t, r, s, variant)?;
            let mut table = Table::new(vec!["r", "s", "t", "variant", "chain_sum", "closed_form", "bound"]);
            table.push(vec![
                r.into(),
                s.into(),
                t.into(),
                variant.as_str().into(),
                est.chain_sum.into(),
                est.closed_form.into(),
                est.p_break_bound.into(),
            ]);
            Ok(Report::ok(render_single(&table, format)?))
        }
        None => {
            let mut table = Table::new(vec!["r", "s", "variant", "bound"]);
            table.push(vec![r.into(), s.into(), variant.as_str().into(), p_break_bound(r, s, variant)?.into()]);
            Ok(Report::ok(render_single(&table, format)?))
        }
    }
}

/// One self-check: the worst deviation found and the tolerance it must meet.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub cases: u64,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.max_deviation <= self.tolerance
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "cases": self.cases,
            "max_deviation": json_number(self.max_deviation),
            "tolerance": self.tolerance,
            "pass": self.pass(),
        })
    }
}

pub fn identity_checks() -> Result<Vec<Check>, CliError> {
    Ok(vec![
        averaging_check(6)?,
        phase_average_check(12)?,
        bell_decomposition_check(8)?,
        honest_round_check(5)?,
        oracle_check(8)?,
        cheat_guess_check(8)?,
        cheung_check(64),
    ])
}

pub fn verify_identities(_cfg: &RunConfig) -> Result<Report, CliError> {
    let checks = identity_checks()?;
    let all_pass = checks.iter().all(Check::pass);
    let report = json!({
        "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        "all_pass": all_pass,
    });
    let status = if all_pass { Status::Success } else { Status::Failed };
    Ok(Report { output: pretty(&report), summary: None, status })
}

/// Discrete phase average of `n` copies against the symmetric mixture, for
/// `p = n+1 ..= n+3`.
pub fn averaging_check(n_max: usize) -> Result<Check, CliError> {
    let mut check = Check::new("averaging_identity", 1e-12);
    for n in 1..=n_max {
        let target = symmetric_mixture(n)?;
        for p in (n as u64 + 1)..=(n as u64 + 3) {
            check.record(averaged_key_operator_discrete(p, n)?.max_entry_deviation(&target));
        }
    }
    Ok(check)
}

/// `(1/p) Σ_k e^{2πiak/p}` against the indicator of `p | a`.
pub fn phase_average_check(p_max: u64) -> Result<Check, CliError> {
    let mut check = Check::new("phase_average", 1e-12);
    for p in 2..=p_max {
        let span = 3 * p as i64;
        for a in -span..=span {
            let expected = if a.rem_euclid(p as i64) == 0 { 1.0 } else { 0.0 };
            check.record((phase_average_exponential_raw(a, p)? - c(expected, 0.0)).norm());
        }
    }
    Ok(check)
}

/// `(|01⟩ + |10⟩)/√2 = e^{−iφ}(|φ₊φ₊⟩ − |φ₋φ₋⟩)/√2` for every key phase.
pub fn bell_decomposition_check(p_max: u64) -> Result<Check, CliError> {
    let mut check = Check::new("bell_decomposition", 1e-12);
    let s = FRAC_1_SQRT_2;
    let bell = [c(0.0, 0.0), c(s, 0.0), c(s, 0.0), c(0.0, 0.0)];
    for p in 2..=p_max {
        for k in 1..=p {
            let x = PhaseFraction::new(k, p)?;
            let u = x.unit();
            let plus = PureState::qubit(c(1.0, 0.0), u)?;
            let minus = PureState::qubit(c(1.0, 0.0), -u)?;
            let pp = plus.tensor(&plus);
            let mm = minus.tensor(&minus);
            let global = qpkid_core::qsim::phase(-TAU * k as f64 / p as f64);
            for (i, b) in bell.iter().enumerate() {
                let rhs = global * (pp.amplitude(i) - mm.amplitude(i)) * s;
                check.record((rhs - b).norm());
            }
        }
    }
    Ok(check)
}

/// Honest single-round pass probability for every phase of every `r`.
pub fn honest_round_check(r_max: u64) -> Result<Check, CliError> {
    let mut check = Check::new("honest_round_passes", 1e-12);
    for r in 1..=r_max {
        let params = ProtocolParams::new(r, 1, qpkid_core::keys::Variant::Standard)?;
        for k in 1..=params.p() {
            let key = PrivateKey::from_indices(params.p(), &[k])?;
            let mut alice = Alice::new(key.clone(), &params);
            let transcript = run_session(&params, &key, &mut alice, Mode::Exact, 0, 0)?;
            let p = transcript.accept_probability().ok_or_else(|| CliError::Io("exact transcript".into()))?;
            check.record((1.0 - p).abs());
        }
    }
    Ok(check)
}

pub fn oracle_check(t_max: u64) -> Result<Check, CliError> {
    let mut check = Check::new("oracle_matches_formula", 1e-9);
    for t in 1..=t_max {
        check.record((helstrom_psucc_oracle(t)? - psucc_formula(t)).abs());
    }
    Ok(check)
}

/// Simulated impostor pass probability against `(1 + P_succ)/2`.
pub fn cheat_guess_check(t_max: u64) -> Result<Check, CliError> {
    let mut check = Check::new("cheat_guess_identity", 1e-9);
    for t in 1..=t_max {
        let report = eve_attack_round(t, &HelstromStrategy::optimal(t)?)?;
        check.record((report.p_pass_exact - (1.0 + psucc_formula(t)) / 2.0).abs());
    }
    Ok(check)
}

/// Positive part of `overlap_sum(t) − cheung_sum_rhs(t)`, plus the equality at `t = 1`.
pub fn cheung_check(t_max: u64) -> Check {
    let mut check = Check::new("cheung_inequality", 1e-12);
    for t in 1..=t_max {
        check.record((overlap_sum(t) - cheung_sum_rhs(t)).max(0.0));
    }
    check.record((overlap_sum(1) - cheung_sum_rhs(1)).abs());
    check
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Check { name, cases: 0, max_deviation: 0.0, tolerance }
    }

    fn record(&mut self, deviation: f64) {
        self.cases += 1;
        // NaN must fail the check.
        if deviation.is_nan() || deviation > self.max_deviation {
            self.max_deviation = if deviation.is_nan() { f64::INFINITY } else { deviation };
        }
    }
}

fn render_single(table: &Table, format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let rows: Value = serde_json::from_str(&table.to_json()).expect("table json parses");
            Ok(pretty(&rows[0]))
        }
    }
}

fn check_matches(flag: &str, given: Option<u64>, actual: u64) -> Result<(), CliError> {
    match given {
        Some(v) if v != actual => Err(CliError::Config(format!("{flag} {v} conflicts with the key file ({actual})"))),
        _ => Ok(()),
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn write_file(path: &std::path::Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
