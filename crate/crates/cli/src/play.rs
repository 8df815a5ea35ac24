//! Terminal play loop for the classic game.

use std::io::{self, BufRead, Write};

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use threedoors::sim::Tally;
use threedoors::{DoorDistribution, GameConfig, TeamStrategy};

use crate::commands::Report;
use crate::render::{full, grid, opt, pairs, sig, Csv};
use crate::{Failure, PlayArgs};

const DOORS: usize = 3;

/// The other side of the table: hides the car, then opens a goat door.
pub trait Host {
    fn place_car(&mut self) -> usize;
    /// A door other than `car` and `pick`.
    fn open(&mut self, car: usize, pick: usize) -> usize;
}

/// Samples the team strategy of the classic game.
pub struct SeededHost {
    rng: ChaCha8Rng,
    config: GameConfig,
    team: TeamStrategy,
}

impl SeededHost {
    pub fn new(seed: u64, host_bias: Option<f64>) -> threedoors::Result<Self> {
        let config = GameConfig::classic();
        let car = DoorDistribution::uniform(DOORS);
        let team = match host_bias {
            Some(q) => TeamStrategy::biased_host(&config, car, q)?,
            None => TeamStrategy::uniform_host(&config, car),
        };
        Ok(SeededHost { rng: ChaCha8Rng::seed_from_u64(seed), config, team })
    }
}

impl Host for SeededHost {
    fn place_car(&mut self) -> usize {
        let w = WeightedIndex::new(self.team.car().weights()).expect("car weights are valid");
        w.sample(&mut self.rng) + 1
    }

    fn open(&mut self, car: usize, pick: usize) -> usize {
        let cell = self.team.open_dist(&self.config, car, pick);
        let w = WeightedIndex::new(cell.iter().map(|(_, p)| *p)).expect("open rule is valid");
        let set = &cell[w.sample(&mut self.rng)].0;
        set.iter().next().expect("one door is opened")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaySummary {
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub host_bias: Option<f64>,
    pub plays: u64,
    pub switch: Tally,
    pub stay: Tally,
    pub exact_switch: f64,
    pub exact_stay: f64,
}

impl PlaySummary {
    pub fn new(seed: Option<u64>, host_bias: Option<f64>) -> Self {
        PlaySummary {
            seed,
            host_bias,
            plays: 0,
            switch: Tally::default(),
            stay: Tally::default(),
            exact_switch: 2.0 / 3.0,
            exact_stay: 1.0 / 3.0,
        }
    }

    fn frequency(t: &Tally) -> Option<f64> {
        (t.plays > 0).then(|| t.wins as f64 / t.plays as f64)
    }
}

impl Report for PlaySummary {
    fn table(&self) -> String {
        let row = |name: &str, t: &Tally, exact: f64| {
            vec![name.to_string(), t.plays.to_string(), t.wins.to_string(), opt(Self::frequency(t), sig), sig(exact)]
        };
        let mut out = String::from("\n");
        out.push_str(&pairs(&[("plays", self.plays.to_string())]));
        out.push_str(&grid(
            &["decision", "plays", "wins", "frequency", "exact"],
            &[row("switch", &self.switch, self.exact_switch), row("stay", &self.stay, self.exact_stay)],
        ));
        out
    }

    fn csv(&self) -> Csv {
        let mut c = Csv::new(["decision", "plays", "wins", "frequency", "exact"]);
        for (name, t, exact) in [("switch", &self.switch, self.exact_switch), ("stay", &self.stay, self.exact_stay)] {
            c.push([name.to_string(), t.plays.to_string(), t.wins.to_string(), opt(Self::frequency(t), full), full(exact)]);
        }
        c
    }
}

/// Reads one trimmed line; `None` at end of input.
fn read_line(input: &mut dyn BufRead) -> io::Result<Option<String>> {
    let mut line = String::new();
    if input.read_line(&mut line)? == 0 {
        return Ok(None);
    }
    Ok(Some(line.trim().to_ascii_lowercase()))
}

/// Prompts until `parse` accepts a line. `None` when the input ends or the
/// user quits.
fn ask<T>(
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    prompt: &str,
    retry: &str,
    parse: impl Fn(&str) -> Option<T>,
) -> io::Result<Option<T>> {
    write!(out, "{prompt}")?;
    out.flush()?;
    loop {
        let Some(line) = read_line(input)? else { return Ok(None) };
        if line == "q" || line == "quit" {
            return Ok(None);
        }
        if let Some(v) = parse(&line) {
            return Ok(Some(v));
        }
        write!(out, "{retry} ")?;
        out.flush()?;
    }
}

/// Runs rounds until the input ends or the user types `q`.
pub fn run_session(
    host: &mut dyn Host,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    mut summary: PlaySummary,
) -> io::Result<PlaySummary> {
    writeln!(out, "A car is behind one of three doors, goats behind the others. Type q to stop.")?;
    loop {
        let car = host.place_car();
        let prompt = format!("\nRound {}. Pick a door [1-3]: ", summary.plays + 1);
        let door = |s: &str| s.parse::<usize>().ok().filter(|d| (1..=DOORS).contains(d));
        let Some(pick) = ask(input, out, &prompt, "Please enter 1, 2 or 3:", door)? else { break };

        let opened = host.open(car, pick);
        let other = (1..=DOORS).find(|d| *d != pick && *d != opened).expect("three doors");
        let prompt = format!("The host opens door {opened}: a goat. Stay with {pick} or switch to {other}? [stay/switch]: ");
        let decide = |s: &str| match s {
            "stay" => Some(false),
            "switch" | "swap" => Some(true),
            _ => s.parse::<usize>().ok().and_then(|d| {
                if d == pick {
                    Some(false)
                } else if d == other {
                    Some(true)
                } else {
                    None
                }
            }),
        };
        let Some(switched) = ask(input, out, &prompt, "Please answer stay or switch:", decide)? else { break };

        let final_door = if switched { other } else { pick };
        let won = final_door == car;
        summary.plays += 1;
        let tally = if switched { &mut summary.switch } else { &mut summary.stay };
        tally.plays += 1;
        tally.wins += u64::from(won);

        let verb = if switched { "switching" } else { "staying" };
        let result = if won { "win" } else { "lose" };
        writeln!(out, "The car is behind door {car}. You {result} by {verb}.")?;
        let freq = |t: &Tally| PlaySummary::frequency(t).map_or_else(|| "-".to_string(), sig);
        writeln!(
            out,
            "switch {}/{} = {} (exact {}); stay {}/{} = {} (exact {})",
            summary.switch.wins,
            summary.switch.plays,
            freq(&summary.switch),
            sig(summary.exact_switch),
            summary.stay.wins,
            summary.stay.plays,
            freq(&summary.stay),
            sig(summary.exact_stay),
        )?;
    }
    writeln!(out)?;
    Ok(summary)
}

pub fn cmd_play(args: &PlayArgs, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<PlaySummary, Failure> {
    let seed = args.seed.unwrap_or_else(rand::random);
    let mut host = SeededHost::new(seed, args.host_bias)?;
    Ok(run_session(&mut host, input, out, PlaySummary::new(Some(seed), args.host_bias))?)
}
