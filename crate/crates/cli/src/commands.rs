//! Command bodies and the reports they produce.

use serde::{Deserialize, Serialize};

use threedoors::exact::{conditional_win_prob, symmetry_conditionals, unconditional_win_prob, SymmetryTable};
use threedoors::file::load_model;
use threedoors::model::{Preset, PresetParams};
use threedoors::sim::{compare_result, simulate, simulate_sharded, ComparisonReport};
use threedoors::solver::{build_payoff_matrix, conditional_lower_bound_sweep, q_grid, Recommendation, SweepTable};
use threedoors::{GameConfig, GameModel, Observation};

use crate::render::{full, grid, opt, pairs, sig, Csv};
use crate::{exit, AnalyzeArgs, Command, Failure, ModelArgs, SimulateArgs, SolveArgs, SweepArgs};

/// Per-observation rows beyond this are left out of the text table.
const TABLE_ROW_LIMIT: usize = 60;

/// A report in every output form, plus the exit code it implies.
#[derive(Debug, Clone)]
pub struct Rendered {
    pub json: serde_json::Value,
    pub table: String,
    pub csv: Csv,
    pub code: i32,
}

pub trait Report: Serialize {
    fn table(&self) -> String;
    fn csv(&self) -> Csv;
    fn exit_code(&self) -> i32 {
        exit::SUCCESS
    }
}

impl Rendered {
    pub fn from_report<R: Report>(report: &R) -> Result<Self, Failure> {
        Ok(Rendered {
            json: serde_json::to_value(report).map_err(|e| Failure::usage(e.to_string()))?,
            table: report.table(),
            csv: report.csv(),
            code: report.exit_code(),
        })
    }
}

/// Fills in anything left to chance so the command can be replayed.
pub fn resolve(command: Command) -> Command {
    match command {
        Command::Simulate(mut args) => {
            args.seed.get_or_insert_with(rand::random);
            Command::Simulate(args)
        }
        other => other,
    }
}

pub fn execute(command: &Command) -> Result<Rendered, Failure> {
    match command {
        Command::Analyze(a) => Rendered::from_report(&cmd_analyze(a)?),
        Command::Solve(a) => Rendered::from_report(&cmd_solve(a)?),
        Command::Simulate(a) => Rendered::from_report(&cmd_simulate(a)?),
        Command::Sweep(a) => Rendered::from_report(&cmd_sweep(a)?),
        Command::Presets => Rendered::from_report(&cmd_presets()),
        Command::Replay(a) => Rendered::from_report(&crate::record::cmd_replay(&a.file)?),
        Command::Play(_) => Err(Failure::usage("play is interactive")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub source: String,
    pub n_doors: usize,
    pub k_opened: usize,
}

impl ModelSummary {
    fn describe(&self) -> String {
        format!("{} (N={}, k={})", self.source, self.n_doors, self.k_opened)
    }
}

pub fn load(args: &ModelArgs) -> Result<(GameModel, ModelSummary), Failure> {
    let (model, source) = match &args.model {
        Some(path) => (load_model(path)?, path.display().to_string()),
        None => {
            let preset: Preset = args.preset.as_deref().unwrap_or("classic").parse()?;
            let params = PresetParams { q: args.q, n_doors: args.doors };
            (preset.build(&params)?, preset.name().to_string())
        }
    };
    let model = match args.policy {
        Some(p) => model.with_policy(p.into())?,
        None => model,
    };
    let cfg = model.config();
    let summary = ModelSummary { source, n_doors: cfg.n_doors(), k_opened: cfg.k_opened() };
    Ok((model, summary))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalView {
    pub observation: Observation,
    pub win_prob: f64,
    /// Pr(C = door | observation), doors 1..=N.
    pub posterior: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub model: ModelSummary,
    pub win_prob: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditional: Option<ConditionalView>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observations: Option<SymmetryTable>,
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<AnalyzeReport, Failure> {
    let (model, summary) = load(&args.model)?;
    let conditional = match &args.observe {
        None => None,
        Some(text) => {
            let obs: Observation = text.parse()?;
            let r = conditional_win_prob(&model, &obs)?;
            match (r.win_prob, r.posterior) {
                (Some(win_prob), Some(post)) => {
                    Some(ConditionalView { observation: obs, win_prob, posterior: post.weights().to_vec() })
                }
                _ => return Err(threedoors::Error::Unreachable(obs).into()),
            }
        }
    };
    Ok(AnalyzeReport {
        model: summary,
        win_prob: unconditional_win_prob(&model),
        conditional,
        observations: args.all_observations.then(|| symmetry_conditionals(&model)),
    })
}

impl Report for AnalyzeReport {
    fn table(&self) -> String {
        let mut items = vec![("model", self.model.describe()), ("Pr(win)", sig(self.win_prob))];
        if let Some(c) = &self.conditional {
            items.push(("observation", c.observation.to_string()));
            items.push(("Pr(win | observation)", sig(c.win_prob)));
            let post = c.posterior.iter().enumerate().map(|(i, p)| format!("{}: {}", i + 1, sig(*p)));
            items.push(("posterior car door", post.collect::<Vec<_>>().join(", ")));
        }
        let mut out = pairs(&items);
        if let Some(t) = &self.observations {
            out.push('\n');
            let rows: Vec<Vec<String>> = t
                .rows
                .iter()
                .take(TABLE_ROW_LIMIT)
                .map(|r| vec![r.observation.to_string(), sig(r.weight), sig(r.win_prob)])
                .collect();
            out.push_str(&grid(&["observation", "Pr(observation)", "Pr(win | observation)"], &rows));
            if t.rows.len() > TABLE_ROW_LIMIT {
                out.push_str(&format!("... {} more rows (use --format csv)\n", t.rows.len() - TABLE_ROW_LIMIT));
            }
            out.push('\n');
            out.push_str(&pairs(&[
                ("reachable observations", t.rows.len().to_string()),
                ("weighted average", sig(t.weighted_average)),
                ("largest spread", sig(t.spread())),
            ]));
        }
        out
    }

    fn csv(&self) -> Csv {
        let mut c = Csv::new(["quantity", "observation", "door", "value"]);
        c.push(["win_prob".into(), String::new(), String::new(), full(self.win_prob)]);
        if let Some(v) = &self.conditional {
            let obs = v.observation.to_string();
            c.push(["win_prob".into(), obs.clone(), String::new(), full(v.win_prob)]);
            for (i, p) in v.posterior.iter().enumerate() {
                c.push(["posterior".into(), obs.clone(), (i + 1).to_string(), full(*p)]);
            }
        }
        if let Some(t) = &self.observations {
            for r in &t.rows {
                let obs = r.observation.to_string();
                c.push(["observation_prob".into(), obs.clone(), String::new(), full(r.weight)]);
                c.push(["win_prob".into(), obs, String::new(), full(r.win_prob)]);
            }
            c.push(["weighted_average".into(), String::new(), String::new(), full(t.weighted_average)]);
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weighted {
    pub strategy: String,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub n_doors: usize,
    pub k_opened: usize,
    pub rows: usize,
    pub cols: usize,
    pub value: f64,
    /// Worst case of the player's strategy over all team columns.
    pub player_security: f64,
    /// Best case for the player against the team's strategy.
    pub team_security: f64,
    pub duality_gap: f64,
    pub tolerance: f64,
    pub pivots: usize,
    pub player_optimal: Vec<Weighted>,
    pub team_optimal: Vec<Weighted>,
    pub stay_mass: f64,
    pub recommendation: Recommendation,
}

pub fn cmd_solve(args: &SolveArgs) -> Result<SolveReport, Failure> {
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return Err(Failure::usage(format!("--tol must be positive, got {}", args.tol)));
    }
    let cfg = GameConfig::new(args.doors, args.open)?;
    let pm = build_payoff_matrix(&cfg, args.cap)?;
    let s = pm.solve(args.tol)?;
    let support = |weights: &[f64], label: &dyn Fn(usize) -> String| {
        weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(i, w)| Weighted { strategy: label(i), prob: *w })
            .collect::<Vec<_>>()
    };
    Ok(SolveReport {
        n_doors: cfg.n_doors(),
        k_opened: cfg.k_opened(),
        rows: pm.payoffs().n_rows(),
        cols: pm.payoffs().n_cols(),
        value: s.value,
        player_security: s.lower,
        team_security: s.upper,
        duality_gap: s.duality_gap,
        tolerance: args.tol,
        pivots: s.pivots,
        player_optimal: support(s.player_optimal.weights(), &|i| pm.rows()[i].to_string()),
        team_optimal: support(s.team_optimal.weights(), &|j| pm.cols()[j].to_string()),
        stay_mass: pm.stay_mass(&s.player_optimal),
        recommendation: pm.recommendation(&s.player_optimal),
    })
}

impl Report for SolveReport {
    fn table(&self) -> String {
        let mut out = pairs(&[
            ("game", format!("N={}, k={}", self.n_doors, self.k_opened)),
            ("payoff matrix", format!("{} player plans x {} team plans", self.rows, self.cols)),
            ("value", sig(self.value)),
            ("player security", sig(self.player_security)),
            ("team security", sig(self.team_security)),
            ("duality gap", format!("{:e}", self.duality_gap)),
            ("pivots", self.pivots.to_string()),
            ("stay mass", sig(self.stay_mass)),
            ("recommendation", self.recommendation.to_string()),
        ]);
        for (title, list) in [("player optimal", &self.player_optimal), ("team optimal", &self.team_optimal)] {
            out.push('\n');
            let rows: Vec<Vec<String>> = list.iter().map(|w| vec![sig(w.prob), w.strategy.clone()]).collect();
            out.push_str(&grid(&["prob", title], &rows));
        }
        out
    }

    fn csv(&self) -> Csv {
        let mut c = Csv::new(["field", "strategy", "value"]);
        let scalars = [
            ("value", self.value),
            ("player_security", self.player_security),
            ("team_security", self.team_security),
            ("duality_gap", self.duality_gap),
            ("stay_mass", self.stay_mass),
        ];
        for (k, v) in scalars {
            c.push([k.to_string(), String::new(), full(v)]);
        }
        c.push(["recommendation".into(), String::new(), self.recommendation.to_string()]);
        for (side, list) in [("player_optimal", &self.player_optimal), ("team_optimal", &self.team_optimal)] {
            for w in list {
                c.push([side.to_string(), w.strategy.clone(), full(w.prob)]);
            }
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub model: ModelSummary,
    pub comparison: ComparisonReport,
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<SimulateReport, Failure> {
    let seed = args.seed.ok_or_else(|| Failure::usage("no seed resolved"))?;
    let (model, summary) = load(&args.model)?;
    let sim = if args.shards == 1 {
        simulate(&model, args.n, seed)?
    } else {
        simulate_sharded(&model, args.n, seed, args.shards)?
    };
    Ok(SimulateReport { model: summary, comparison: compare_result(&model, sim) })
}

impl Report for SimulateReport {
    fn table(&self) -> String {
        let c = &self.comparison;
        let z = |x: Option<f64>| opt(x, |z| format!("{z:+.3}"));
        let mut out = pairs(&[
            ("model", self.model.describe()),
            ("generator", c.sim.generator.clone()),
            ("seed", c.sim.seed.to_string()),
            ("shards", c.sim.shards.to_string()),
            ("plays", c.sim.n_plays.to_string()),
            ("wins", c.sim.wins.to_string()),
            ("estimate", sig(c.sim.estimate)),
            ("standard error", sig(c.sim.std_error)),
            ("exact", opt(c.overall.exact, sig)),
            ("z", z(c.overall.z)),
            ("flags (|z| > 4)", c.flags.to_string()),
        ]);
        out.push('\n');
        let rows: Vec<Vec<String>> = c
            .per_observation
            .iter()
            .take(TABLE_ROW_LIMIT)
            .map(|o| {
                let k = &o.check;
                let note = if k.flagged {
                    "FLAG"
                } else if k.low_sample {
                    "few plays"
                } else {
                    ""
                };
                vec![
                    o.observation.to_string(),
                    k.plays.to_string(),
                    opt(k.estimate, sig),
                    opt(k.exact, sig),
                    z(k.z),
                    note.to_string(),
                ]
            })
            .collect();
        out.push_str(&grid(&["observation", "plays", "estimate", "exact", "z", ""], &rows));
        if c.per_observation.len() > TABLE_ROW_LIMIT {
            out.push_str(&format!("... {} more rows (use --format csv)\n", c.per_observation.len() - TABLE_ROW_LIMIT));
        }
        out
    }

    fn csv(&self) -> Csv {
        let c = &self.comparison;
        let mut out = Csv::new(["observation", "plays", "wins", "estimate", "exact", "z", "low_sample", "flagged"]);
        let all = std::iter::once((String::new(), &c.overall))
            .chain(c.per_observation.iter().map(|o| (o.observation.to_string(), &o.check)));
        for (label, k) in all {
            out.push([
                label,
                k.plays.to_string(),
                k.wins.to_string(),
                opt(k.estimate, full),
                opt(k.exact, full),
                opt(k.z, full),
                k.low_sample.to_string(),
                k.flagged.to_string(),
            ]);
        }
        out
    }

    fn exit_code(&self) -> i32 {
        if self.comparison.any_flag() {
            exit::FLAGGED
        } else {
            exit::SUCCESS
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    #[serde(flatten)]
    pub table: SweepTable,
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<SweepReport, Failure> {
    let grid = q_grid(args.q_from, args.q_to, args.steps)?;
    Ok(SweepReport { table: conditional_lower_bound_sweep(&grid)? })
}

impl SweepReport {
    fn columns(&self) -> Vec<Observation> {
        let mut seen: Vec<Observation> =
            self.table.rows.iter().flat_map(|r| r.conditionals.iter().map(|c| c.observation.clone())).collect();
        seen.sort();
        seen.dedup();
        seen
    }

    fn cells(&self, f: fn(f64) -> String) -> Vec<Vec<String>> {
        let cols = self.columns();
        self.table
            .rows
            .iter()
            .map(|r| {
                let mut row = vec![f(r.q)];
                for obs in &cols {
                    row.push(opt(r.conditionals.iter().find(|c| &c.observation == obs).map(|c| c.win_prob), f));
                }
                row.push(f(r.min_conditional));
                row.push(f(r.closed_form));
                row
            })
            .collect()
    }

    fn header(&self) -> Vec<String> {
        let mut h = vec!["q".to_string()];
        h.extend(self.columns().iter().map(|o| o.to_string()));
        h.push("min".into());
        h.push("1/(1+q)".into());
        h
    }
}

impl Report for SweepReport {
    fn table(&self) -> String {
        let header = self.header();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut out = grid(&header, &self.cells(sig));
        out.push('\n');
        let at: Vec<String> = self.table.argmin.iter().map(|q| sig(*q)).collect();
        out.push_str(&pairs(&[("global minimum", sig(self.table.global_min)), ("attained at q", at.join(", "))]));
        out
    }

    fn csv(&self) -> Csv {
        let mut header = self.header();
        let n = header.len();
        header[n - 2] = "min_conditional".into();
        header[n - 1] = "closed_form".into();
        let mut c = Csv::new(header);
        for row in self.cells(full) {
            c.push(row);
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresetInfo {
    pub name: String,
    pub parameters: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PresetList(pub Vec<PresetInfo>);

pub fn cmd_presets() -> PresetList {
    PresetList(
        Preset::ALL
            .iter()
            .map(|p| PresetInfo {
                name: p.name().into(),
                parameters: p.parameters().into(),
                description: p.description().into(),
            })
            .collect(),
    )
}

impl Report for PresetList {
    fn table(&self) -> String {
        let rows: Vec<Vec<String>> =
            self.0.iter().map(|p| vec![p.name.clone(), p.parameters.clone(), p.description.clone()]).collect();
        grid(&["name", "parameters", "description"], &rows)
    }

    fn csv(&self) -> Csv {
        let mut c = Csv::new(["name", "parameters", "description"]);
        for p in &self.0 {
            c.push([p.name.clone(), p.parameters.clone(), p.description.clone()]);
        }
        c
    }
}
