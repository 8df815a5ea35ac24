use std::fmt;

use crate::doors::{check_weights, DistIssue, DoorSet, Observation, INPUT_TOLERANCE};

use super::GameModel;

/// Problem with one host cell `(c, p)`.
#[derive(Debug, Clone, PartialEq)]
pub enum OpenIssue {
    Weights(DistIssue),
    RevealsCar(DoorSet),
    OpensPick(DoorSet),
    WrongSize(DoorSet),
    OutOfRange(DoorSet),
}

/// Problem with one final-choice cell `(p, O)`.
#[derive(Debug, Clone, PartialEq)]
pub enum FinalIssue {
    Missing,
    IllegalCell,
    Weights(DistIssue),
    ChoosesOpened(usize),
    OutOfRange(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Dimension { what: &'static str, expected: usize, found: usize },
    CarPlacement(DistIssue),
    Pick(DistIssue),
    OpenRule { car: usize, pick: usize, issue: OpenIssue },
    FinalChoice { observation: Observation, issue: FinalIssue },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Dimension { what, expected, found } => {
                write!(f, "{what} has {found} entries, expected {expected}")
            }
            Violation::CarPlacement(issue) => write!(f, "car_placement normalization error: {issue}"),
            Violation::Pick(issue) => write!(f, "pick normalization error: {issue}"),
            Violation::OpenRule { car, pick, issue } => {
                let at = format!("({car},{pick})");
                match issue {
                    OpenIssue::Weights(i) => write!(f, "open rule normalization error at {at}: {i}"),
                    OpenIssue::RevealsCar(s) => write!(f, "host reveals car at {at}: opens {s}"),
                    OpenIssue::OpensPick(s) => write!(f, "host opens the pick at {at}: opens {s}"),
                    OpenIssue::WrongSize(s) => write!(f, "host opens wrong number of doors at {at}: {s}"),
                    OpenIssue::OutOfRange(s) => write!(f, "host opens a nonexistent door at {at}: {s}"),
                }
            }
            Violation::FinalChoice { observation, issue } => {
                let at = format!("({}|{})", observation.pick, observation.opened);
                match issue {
                    FinalIssue::Missing => write!(f, "final choice missing at {at}"),
                    FinalIssue::IllegalCell => write!(f, "final choice given for impossible observation {at}"),
                    FinalIssue::Weights(i) => write!(f, "final choice normalization error at {at}: {i}"),
                    FinalIssue::ChoosesOpened(d) => write!(f, "final choice picks opened door {d} at {at}"),
                    FinalIssue::OutOfRange(d) => write!(f, "final choice picks nonexistent door {d} at {at}"),
                }
            }
        }
    }
}

/// Outcome of [`validate_model`]: empty means the model passes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "pass");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every invariant of the model and lists each violated one.
pub fn validate_model(model: &GameModel) -> ValidationReport {
    let config = model.config();
    let n = config.n_doors();
    let k = config.k_opened();
    let mut violations = Vec::new();

    let car = model.team().car();
    if car.n_doors() != n {
        violations.push(Violation::Dimension { what: "car_placement", expected: n, found: car.n_doors() });
    } else if let Err(issue) = car.check(INPUT_TOLERANCE) {
        violations.push(Violation::CarPlacement(issue));
    }

    let pick = model.player().pick();
    if pick.n_doors() != n {
        violations.push(Violation::Dimension { what: "pick", expected: n, found: pick.n_doors() });
    } else if let Err(issue) = pick.check(INPUT_TOLERANCE) {
        violations.push(Violation::Pick(issue));
    }

    let cells = model.team().cells();
    if cells.len() != n * n {
        violations.push(Violation::Dimension { what: "open_rule", expected: n * n, found: cells.len() });
    } else {
        for c in config.doors() {
            for p in config.doors() {
                let dist = model.team().open_dist(config, c, p);
                let mut push = |issue| violations.push(Violation::OpenRule { car: c, pick: p, issue });
                if let Err(issue) = check_weights(dist.iter().map(|(_, w)| *w), INPUT_TOLERANCE) {
                    push(OpenIssue::Weights(issue));
                }
                for (set, w) in dist {
                    if *w <= 0.0 {
                        continue;
                    }
                    if !set.iter().all(|d| config.contains(d)) {
                        push(OpenIssue::OutOfRange(set.clone()));
                    } else if set.contains(c) {
                        push(OpenIssue::RevealsCar(set.clone()));
                    } else if set.contains(p) {
                        push(OpenIssue::OpensPick(set.clone()));
                    } else if set.len() != k {
                        push(OpenIssue::WrongSize(set.clone()));
                    }
                }
            }
        }
    }

    let player = model.player();
    for obs in config.observations() {
        let mut push = |issue| violations.push(Violation::FinalChoice { observation: obs.clone(), issue });
        let Some(dist) = player.final_dist(&obs) else {
            push(FinalIssue::Missing);
            continue;
        };
        if let Err(issue) = check_weights(dist.iter().map(|(_, w)| *w), INPUT_TOLERANCE) {
            push(FinalIssue::Weights(issue));
        }
        for &(door, w) in dist {
            if w <= 0.0 {
                continue;
            }
            if !config.contains(door) {
                push(FinalIssue::OutOfRange(door));
            } else if obs.opened.contains(door) {
                push(FinalIssue::ChoosesOpened(door));
            }
        }
    }
    for (obs, _) in player.cells() {
        if !config.is_legal_observation(obs) {
            violations.push(Violation::FinalChoice { observation: obs.clone(), issue: FinalIssue::IllegalCell });
        }
    }

    ValidationReport { violations }
}
