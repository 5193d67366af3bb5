use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use super::params::{activity_strings, parse_params, Params};
use super::{Cli, Command, Outcome, ParamArgs, SectorArgs, TorusArgs, VerifyCommand, REPORT_SCHEMA};
use crate::dynamics::{simulate_with, write_event_csv, Generator, SimulationOptions};
use crate::enumeration::{enumerate_all_capped, enumerate_sector_capped};
use crate::error::{Error, Result};
use crate::gibbs::{measure_table, measure_table_log, write_measure_csv, GibbsParams};
use crate::lattice::{relative_height, Configuration, Sector, Torus};
use crate::scalar::{parse_rational, Scalar};
use crate::verification::{
    balance_sweep, certify, check_ergodicity, check_stationarity_capped, connect, perturbed_measure,
    random_identity_check, random_samples, replay, stationarity_residuals,
};

fn report(command: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(REPORT_SCHEMA));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("command".into(), json!(command));
    m
}

fn emit(out: &mut dyn Write, value: Map<String, Value>) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, &Value::Object(value))?;
    writeln!(out)?;
    Ok(())
}

fn torus_of(args: &TorusArgs) -> Result<Torus> {
    Torus::new(args.l, args.n, args.m1)
}

fn sector_of(args: &SectorArgs) -> Result<Sector> {
    Sector::from_torus(torus_of(&args.torus)?, args.m2)
}

fn params_of(args: &ParamArgs, n: u32) -> Result<Params> {
    let a = activity_strings(args.a.as_deref(), n);
    let params = parse_params(&args.q, &a, args.mode)?;
    match &params {
        Params::Exact(p) => p.check_rows(n)?,
        Params::Float(p) => p.check_rows(n)?,
    }
    Ok(params)
}

fn sector_json(sector: &Sector) -> Value {
    json!({"L": sector.l(), "N": sector.n(), "m1": sector.m1(), "m2": sector.m2()})
}

fn read_config(path: &Path) -> Result<Configuration> {
    let text = fs::read_to_string(path)?;
    let c = Configuration::from_json_str(&text)?;
    if !c.validate() {
        return Err(Error::InvalidConfiguration);
    }
    Ok(c)
}

fn outcome(passed: bool) -> Outcome {
    if passed {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<Outcome> {
    let cap = cli.max_candidates;
    match &cli.command {
        Command::Enumerate { torus, m2, count_only } => enumerate(torus, *m2, *count_only, cap, out),
        Command::Verify { check } => match check {
            VerifyCommand::Stationarity { sector, params, tol, perturb } => {
                let s = sector_of(sector)?;
                match params_of(params, s.n())? {
                    Params::Exact(p) => stationarity(&s, &p, *tol, *perturb, cap, out),
                    Params::Float(p) => stationarity(&s, &p, *tol, *perturb, cap, out),
                }
            }
            VerifyCommand::Identity { q, samples, max_int, seed, certify } => {
                identity(q, *samples, *max_int, *seed, *certify, out)
            }
            VerifyCommand::Balance { sector, params, tol } => {
                let s = sector_of(sector)?;
                match params_of(params, s.n())? {
                    Params::Exact(p) => balance(&s, &p, *tol, cap, out),
                    Params::Float(p) => balance(&s, &p, *tol, cap, out),
                }
            }
            VerifyCommand::Ergodicity { sector, params, pairs, seed } => {
                let s = sector_of(sector)?;
                match params_of(params, s.n())? {
                    Params::Exact(p) => ergodicity(&s, &p, *pairs, *seed, cap, out),
                    Params::Float(p) => ergodicity(&s, &p, *pairs, *seed, cap, out),
                }
            }
        },
        Command::Simulate { sector, params, t_max, seed, init, events, max_events } => {
            let s = sector_of(sector)?;
            let p = params_of(params, s.n())?;
            simulate(&s, &p, *t_max, *seed, init.as_deref(), events.as_deref(), *max_events, cap, out)
        }
        Command::Connect { from, to } => connect_cmd(from, to, out),
        Command::Info { torus, m2 } => info(torus, *m2, cap, out),
        Command::Measure { sector, params, out: path } => {
            let s = sector_of(sector)?;
            let states = enumerate_sector_capped(&s, cap)?;
            let mut buf = Vec::new();
            match params_of(params, s.n())? {
                Params::Exact(p) => write_measure_csv(&mut buf, &states, &measure_table(&states, &p)?)?,
                Params::Float(p) => write_measure_csv(&mut buf, &states, &measure_table(&states, &p)?)?,
            }
            match path {
                Some(path) => fs::write(path, buf)?,
                None => out.write_all(&buf)?,
            }
            Ok(Outcome::Pass)
        }
    }
}

fn enumerate(
    torus: &TorusArgs,
    m2: Option<u32>,
    count_only: bool,
    cap: u128,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let t = torus_of(torus)?;
    if let Some(m2) = m2 {
        Sector::from_torus(t, m2)?;
    }
    let census = enumerate_all_capped(t, cap)?;
    if count_only {
        let mut r = report("enumerate");
        r.insert("L".into(), json!(t.l()));
        r.insert("N".into(), json!(t.n()));
        r.insert("m1".into(), json!(t.m1()));
        r.insert("total".into(), json!(census.total()));
        let counts: Vec<_> = census
            .counts()
            .into_iter()
            .filter(|c| m2.is_none_or(|m| m == c.m2))
            .collect();
        r.insert("sectors".into(), serde_json::to_value(counts)?);
        emit(out, r)?;
        return Ok(Outcome::Pass);
    }
    for (&key, states) in &census.sectors {
        if m2.is_some_and(|m| m != key) {
            continue;
        }
        for s in states {
            writeln!(out, "{}", s.to_json_string())?;
        }
    }
    Ok(Outcome::Pass)
}

fn stationarity<S: Scalar>(
    sector: &Sector,
    params: &GibbsParams<S>,
    tol: f64,
    perturb: Option<usize>,
    cap: u128,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let mut r = report("verify stationarity");
    let passed = match perturb {
        None => {
            let rep = check_stationarity_capped(sector, params, tol, cap)?;
            let passed = rep.passed;
            if let Value::Object(fields) = serde_json::to_value(&rep)? {
                r.extend(fields);
            }
            passed
        }
        Some(index) => {
            let states = enumerate_sector_capped(sector, cap)?;
            if index >= states.len() {
                return Err(Error::InvalidParameter(format!(
                    "--perturb {index} is out of range for {} states",
                    states.len()
                )));
            }
            let g = Generator::build(&states, params)?;
            let pi = measure_table(&states, params)?.probabilities;
            let bad = perturbed_measure(&pi, index, S::from_i64(2));
            let res = stationarity_residuals(&g, &bad);
            let max = res.iter().map(Scalar::abs).fold(S::zero(), |a, b| if b > a { b } else { a });
            let passed = if S::EXACT { Scalar::is_zero(&max) } else { max.to_f64() <= tol };
            r.insert("sector".into(), sector_json(sector));
            r.insert("q".into(), json!(params.q().to_text()));
            r.insert("a".into(), json!(params.activities().iter().map(Scalar::to_text).collect::<Vec<_>>()));
            r.insert("mode".into(), json!(if S::EXACT { "rational" } else { "float" }));
            r.insert("perturbed_state".into(), json!(states[index].to_string()));
            r.insert("states".into(), json!(states.len()));
            r.insert("max_residual".into(), json!(max.to_text()));
            r.insert("passed".into(), json!(passed));
            passed
        }
    };
    emit(out, r)?;
    Ok(outcome(passed))
}

fn identity(
    q: &str,
    samples: usize,
    max_int: u32,
    seed: u64,
    certify_count: usize,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let qs = q
        .split(',')
        .map(|s| parse_rational(s.trim()))
        .collect::<Result<Vec<_>>>()?;
    if let Some(bad) = qs.iter().find(|q| !(q.is_positive() && **q < Scalar::one())) {
        return Err(Error::InvalidParameter(format!("q = {bad} must lie in (0, 1)")));
    }
    let rep = random_identity_check(samples, max_int, &qs, seed)?;
    let mut certified = 0usize;
    let mut certificate_failures = 0usize;
    for s in random_samples(certify_count.min(samples), max_int, &qs, seed)? {
        if certify(&s)? {
            certified += 1;
        } else {
            certificate_failures += 1;
        }
    }
    let passed = rep.passed() && certificate_failures == 0;
    let mut r = report("verify identity");
    if let Value::Object(fields) = serde_json::to_value(&rep)? {
        r.extend(fields);
    }
    r.insert("mode".into(), json!("rational"));
    r.insert("certified".into(), json!(certified));
    r.insert("certificate_failures".into(), json!(certificate_failures));
    r.insert("passed".into(), json!(passed));
    emit(out, r)?;
    Ok(outcome(passed))
}

fn balance<S: Scalar>(
    sector: &Sector,
    params: &GibbsParams<S>,
    tol: f64,
    cap: u128,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let states = enumerate_sector_capped(sector, cap)?;
    let summary = balance_sweep(&states, params, tol)?;
    let passed = summary.failures == 0;
    let mut r = report("verify balance");
    r.insert("sector".into(), sector_json(sector));
    r.insert("q".into(), json!(params.q().to_text()));
    r.insert("a".into(), json!(params.activities().iter().map(Scalar::to_text).collect::<Vec<_>>()));
    r.insert("mode".into(), json!(if S::EXACT { "rational" } else { "float" }));
    r.insert("states".into(), json!(states.len()));
    if let Value::Object(fields) = serde_json::to_value(&summary)? {
        r.extend(fields);
    }
    r.insert("passed".into(), json!(passed));
    emit(out, r)?;
    Ok(outcome(passed))
}

fn ergodicity<S: Scalar>(
    sector: &Sector,
    params: &GibbsParams<S>,
    pairs: usize,
    seed: u64,
    cap: u128,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let states = enumerate_sector_capped(sector, cap)?;
    let connected = check_ergodicity(sector, params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0usize;
    let mut lengths = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let a = &states[rng.random_range(0..states.len())];
        let b = &states[rng.random_range(0..states.len())];
        let moves = connect(a, b)?;
        let path = replay(a, &moves)?;
        let height = relative_height(a, b)?.total();
        if path.last() != Some(b) || moves.len() as i64 != height {
            failures += 1;
        }
        lengths.push(moves.len());
    }
    let passed = connected && failures == 0;
    let mut r = report("verify ergodicity");
    r.insert("sector".into(), sector_json(sector));
    r.insert("q".into(), json!(params.q().to_text()));
    r.insert("states".into(), json!(states.len()));
    r.insert("strongly_connected".into(), json!(connected));
    r.insert("pairs".into(), json!(pairs));
    r.insert("seed".into(), json!(seed));
    r.insert("connect_failures".into(), json!(failures));
    r.insert("max_path_length".into(), json!(lengths.iter().max().copied().unwrap_or(0)));
    r.insert("passed".into(), json!(passed));
    emit(out, r)?;
    Ok(outcome(passed))
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    sector: &Sector,
    params: &Params,
    t_max: f64,
    seed: u64,
    init: Option<&Path>,
    events_path: Option<&Path>,
    max_events: Option<u64>,
    cap: u128,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let start = match init {
        Some(path) => {
            let c = read_config(path)?;
            if c.torus() != sector.torus() || c.sector_index()? != sector.m2() {
                return Err(Error::MismatchedSectors);
            }
            c
        }
        None => Configuration::canonical(sector),
    };
    let fparams = params.to_f64();
    let enumerable = sector.torus().candidate_bound() <= cap;
    let options = SimulationOptions {
        t_max,
        max_events,
        record_events: events_path.is_some(),
        track_occupation: enumerable,
    };
    let n = sector.n();
    let mut jumps_per_row = vec![0u64; n as usize];
    let tr = simulate_with(&start, &fparams, &options, seed, |_, e| {
        for k in 0..e.family_size as u32 {
            jumps_per_row[((e.root_row + k) % n) as usize] += 1;
        }
        Ok(())
    })?;
    if let Some(path) = events_path {
        let mut buf = Vec::new();
        write_event_csv(&tr.events, &mut buf)?;
        fs::write(path, buf)?;
    }
    let mut r = report("simulate");
    r.insert("sector".into(), sector_json(sector));
    r.insert("q".into(), json!(fparams.q().to_text()));
    r.insert("a".into(), json!(fparams.activities().iter().map(Scalar::to_text).collect::<Vec<_>>()));
    r.insert("mode".into(), json!("float"));
    r.insert("seed".into(), json!(seed));
    r.insert("t_max".into(), json!(t_max));
    r.insert("end_time".into(), json!(tr.end_time));
    r.insert("events".into(), json!(tr.event_count));
    r.insert("initial".into(), serde_json::to_value(start.to_json())?);
    r.insert("final".into(), serde_json::to_value(tr.final_state.to_json())?);
    let currents: Vec<f64> = jumps_per_row.iter().map(|&j| j as f64 / tr.end_time).collect();
    r.insert("current_per_row".into(), json!(currents));
    if enumerable {
        let states = enumerate_sector_capped(sector, cap)?;
        let pi = measure_table_log(&states, &fparams)?;
        let mut occupation = Vec::with_capacity(states.len());
        let mut tv = 0.0;
        for (s, p) in states.iter().zip(&pi) {
            let frac = tr.time_fraction(s);
            tv += (frac - p).abs();
            occupation.push(json!({"state": s.to_string(), "time_fraction": frac, "probability": p}));
        }
        r.insert("occupation".into(), Value::Array(occupation));
        r.insert("total_variation".into(), json!(tv / 2.0));
    }
    emit(out, r)?;
    Ok(Outcome::Pass)
}

fn connect_cmd(from: &Path, to: &Path, out: &mut dyn Write) -> Result<Outcome> {
    let a = read_config(from)?;
    let b = read_config(to)?;
    let moves = connect(&a, &b)?;
    let path = replay(&a, &moves)?;
    let height = relative_height(&a, &b)?.total();
    let passed = path.last() == Some(&b) && moves.len() as i64 == height;
    let mut r = report("connect");
    r.insert("from".into(), serde_json::to_value(a.to_json())?);
    r.insert("to".into(), serde_json::to_value(b.to_json())?);
    r.insert("total_height".into(), json!(height));
    r.insert("length".into(), json!(moves.len()));
    let list: Vec<Value> = moves
        .iter()
        .map(|m| json!({"row": m.particle.row, "label": m.particle.label, "from": m.from}))
        .collect();
    r.insert("moves".into(), Value::Array(list));
    r.insert("replay_verified".into(), json!(passed));
    emit(out, r)?;
    Ok(outcome(passed))
}

fn info(torus: &TorusArgs, m2: Option<u32>, cap: u128, out: &mut dyn Write) -> Result<Outcome> {
    let t = torus_of(torus)?;
    let mut r = report("info");
    r.insert("L".into(), json!(t.l()));
    r.insert("N".into(), json!(t.n()));
    r.insert("m1".into(), json!(t.m1()));
    r.insert("n1".into(), json!(t.n1()));
    r.insert("candidate_bound".into(), json!(t.candidate_bound().to_string()));
    r.insert("enumerable".into(), json!(t.candidate_bound() <= cap));
    let admissible: Vec<u32> = (1..t.n()).filter(|&m| Sector::from_torus(t, m).is_ok()).collect();
    r.insert("admissible_m2".into(), json!(admissible));
    if let Some(m2) = m2 {
        let s = Sector::from_torus(t, m2)?;
        let w = s.winding();
        let mut sector = BTreeMap::new();
        sector.insert("m2", json!(m2));
        sector.insert("n2", json!(s.n2()));
        sector.insert("Nh", json!(w.nh));
        sector.insert("Nv", json!(w.nv));
        sector.insert("canonical", serde_json::to_value(Configuration::canonical(&s).to_json())?);
        r.insert("sector".into(), serde_json::to_value(sector)?);
    }
    emit(out, r)?;
    Ok(Outcome::Pass)
}
