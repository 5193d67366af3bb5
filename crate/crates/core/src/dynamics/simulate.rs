//! Continuous-time event loop.
//!
//! Each step computes every positive rate, draws the holding time by inverse
//! transform from a seeded ChaCha8 stream, and picks a family with
//! probability proportional to its rate.

use std::collections::BTreeMap;
use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{apply_move, enabled_rates, family_up};
use crate::error::{Error, Result};
use crate::gibbs::GibbsParams;
use crate::lattice::{Configuration, Occupation};

#[derive(Clone, Debug)]
pub struct SimulationOptions {
    pub t_max: f64,
    /// Stop after this many events even if `t_max` is not reached.
    pub max_events: Option<u64>,
    pub record_events: bool,
    /// Accumulate time spent in each visited state.
    pub track_occupation: bool,
}

impl SimulationOptions {
    pub fn new(t_max: f64) -> Self {
        SimulationOptions {
            t_max,
            max_events: None,
            record_events: false,
            track_occupation: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Event {
    pub time: f64,
    pub root_row: u32,
    /// Position of the root before the jump.
    pub root_col: u32,
    pub family_size: usize,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub seed: u64,
    pub initial: Configuration,
    pub final_state: Configuration,
    pub end_time: f64,
    pub event_count: u64,
    pub events: Vec<Event>,
    pub occupation_time: BTreeMap<Occupation, f64>,
}

impl Trajectory {
    /// Fraction of elapsed time spent in `state`.
    pub fn time_fraction(&self, state: &Configuration) -> f64 {
        if self.end_time <= 0.0 {
            return 0.0;
        }
        self.occupation_time
            .get(state.occupation())
            .copied()
            .unwrap_or(0.0)
            / self.end_time
    }
}

pub fn simulate(
    config: &Configuration,
    params: &GibbsParams<f64>,
    options: &SimulationOptions,
    seed: u64,
) -> Result<Trajectory> {
    simulate_with(config, params, options, seed, |_, _| Ok(()))
}

/// Runs the chain, calling `observer` with the new state after every event.
/// An error from the observer stops the run and is returned.
pub fn simulate_with<F>(
    config: &Configuration,
    params: &GibbsParams<f64>,
    options: &SimulationOptions,
    seed: u64,
    mut observer: F,
) -> Result<Trajectory>
where
    F: FnMut(&Configuration, &Event) -> Result<()>,
{
    if !(options.t_max > 0.0 && options.t_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "t_max = {} must be positive and finite",
            options.t_max
        )));
    }
    if !config.validate() {
        return Err(Error::InvalidConfiguration);
    }
    params.check_rows(config.torus().n())?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = config.clone();
    let mut t = 0.0f64;
    let mut event_count = 0u64;
    let mut events = Vec::new();
    let mut occupation_time: BTreeMap<Occupation, f64> = BTreeMap::new();

    loop {
        if options.max_events.is_some_and(|m| event_count >= m) {
            break;
        }
        let rates = enabled_rates(&state, params)?;
        let total: f64 = rates.iter().map(|(_, r)| r).sum();
        if rates.is_empty() || total <= 0.0 {
            return Err(Error::FrozenState);
        }
        let dt = loop {
            let u: f64 = rng.random();
            let dt = -(1.0 - u).ln() / total;
            if dt > 0.0 {
                break dt;
            }
        };
        let stop = t + dt >= options.t_max;
        let held = if stop { options.t_max - t } else { dt };
        if options.track_occupation {
            *occupation_time.entry(state.occupation().clone()).or_insert(0.0) += held;
        }
        if stop {
            t = options.t_max;
            break;
        }
        t += dt;

        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = rates[rates.len() - 1].0;
        for &(p, r) in &rates {
            acc += r;
            if target < acc {
                chosen = p;
                break;
            }
        }
        let family = family_up(&state, chosen)?;
        let event = Event {
            time: t,
            root_row: chosen.row,
            root_col: state.position(chosen)?,
            family_size: family.len(),
        };
        state = apply_move(&state, &family)?;
        event_count += 1;
        observer(&state, &event)?;
        if options.record_events {
            events.push(event);
        }
    }

    Ok(Trajectory {
        seed,
        initial: config.clone(),
        final_state: state,
        end_time: t,
        event_count,
        events,
        occupation_time,
    })
}

pub fn write_event_csv<W: io::Write>(events: &[Event], mut out: W) -> Result<()> {
    writeln!(out, "time,root-row,root-col,family-size")?;
    for e in events {
        writeln!(
            out,
            "{},{},{},{}",
            e.time, e.root_row, e.root_col, e.family_size
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Sector;

    fn setup() -> (Configuration, GibbsParams<f64>) {
        let c = Configuration::canonical(&Sector::new(5, 2, 2, 1).unwrap());
        (c, GibbsParams::homogeneous(0.5, 2).unwrap())
    }

    #[test]
    fn equal_seeds_give_equal_trajectories() {
        let (c, params) = setup();
        let mut opts = SimulationOptions::new(50.0);
        opts.record_events = true;
        let a = simulate(&c, &params, &opts, 7).unwrap();
        let b = simulate(&c, &params, &opts, 7).unwrap();
        assert_eq!(a.events, b.events);
        assert_eq!(a.final_state, b.final_state);
        assert_eq!(a.occupation_time, b.occupation_time);
        let d = simulate(&c, &params, &opts, 8).unwrap();
        assert_ne!(a.events, d.events);
    }

    #[test]
    fn times_increase_and_occupation_sums_to_t_max() {
        let (c, params) = setup();
        let mut opts = SimulationOptions::new(20.0);
        opts.record_events = true;
        let tr = simulate(&c, &params, &opts, 1).unwrap();
        assert!(tr.events.windows(2).all(|w| w[0].time < w[1].time));
        let total: f64 = tr.occupation_time.values().sum();
        assert!((total - 20.0).abs() < 1e-9);
        assert_eq!(tr.end_time, 20.0);
    }

    #[test]
    fn event_cap_stops_early() {
        let (c, params) = setup();
        let mut opts = SimulationOptions::new(1e9);
        opts.max_events = Some(25);
        let tr = simulate(&c, &params, &opts, 3).unwrap();
        assert_eq!(tr.event_count, 25);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let (c, params) = setup();
        let mut opts = SimulationOptions::new(5.0);
        opts.record_events = true;
        let tr = simulate(&c, &params, &opts, 2).unwrap();
        let mut buf = Vec::new();
        write_event_csv(&tr.events, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), tr.events.len() + 1);
        assert!(text.starts_with("time,root-row,root-col,family-size\n"));
    }
}
