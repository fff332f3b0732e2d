use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;

use super::AgentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TabularAlgo {
    QLearning,
    Sarsa,
}

impl TabularAlgo {
    pub fn name(self) -> &'static str {
        match self {
            TabularAlgo::QLearning => "q_learning",
            TabularAlgo::Sarsa => "sarsa",
        }
    }
}

impl FromStr for TabularAlgo {
    type Err = AgentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "q_learning" | "qlearning" => Ok(TabularAlgo::QLearning),
            "sarsa" => Ok(TabularAlgo::Sarsa),
            other => Err(AgentError::InvalidConfig(format!("unknown tabular algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabularConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon_initial: f64,
    pub epsilon_final: f64,
    pub epsilon_episodes: usize,
    /// State bin widths: °C for temperatures, % for humidities.
    pub temp_bin: f64,
    pub humidity_bin: f64,
    /// Value of unvisited table entries. The default sits near the worst
    /// discounted return, so untried actions rarely outrank tried ones.
    pub initial_q: f64,
}

impl Default for TabularConfig {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            gamma: 0.99,
            epsilon_initial: 1.0,
            epsilon_final: 0.05,
            epsilon_episodes: 300,
            temp_bin: 1.0,
            humidity_bin: 5.0,
            initial_q: -300.0,
        }
    }
}

impl TabularConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        if !(0.0..=1.0).contains(&self.alpha) || !(0.0..1.0).contains(&self.gamma) {
            return Err(AgentError::InvalidConfig(format!("alpha {} / gamma {}", self.alpha, self.gamma)));
        }
        if !(self.temp_bin > 0.0 && self.humidity_bin > 0.0) {
            return Err(AgentError::InvalidConfig("bin widths must be positive".into()));
        }
        if !self.initial_q.is_finite() {
            return Err(AgentError::InvalidConfig("initial_q must be finite".into()));
        }
        Ok(())
    }
}

/// Sparse action-value table over discrete state keys; unseen entries read as
/// the initial value.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    n_actions: usize,
    initial: f64,
    table: BTreeMap<Vec<i64>, Vec<f64>>,
}

impl QTable {
    pub fn new(n_actions: usize) -> Result<Self, AgentError> {
        Self::with_initial(n_actions, 0.0)
    }

    pub fn with_initial(n_actions: usize, initial: f64) -> Result<Self, AgentError> {
        if n_actions == 0 {
            return Err(AgentError::InvalidConfig("action table is empty".into()));
        }
        if !initial.is_finite() {
            return Err(AgentError::InvalidConfig("initial value must be finite".into()));
        }
        Ok(Self {
            n_actions,
            initial,
            table: BTreeMap::new(),
        })
    }

    pub fn initial_value(&self) -> f64 {
        self.initial
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn n_states(&self) -> usize {
        self.table.len()
    }

    pub fn value(&self, key: &[i64], action: usize) -> f64 {
        self.table.get(key).map_or(self.initial, |row| row[action])
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.table.values().flatten().copied()
    }

    /// Highest-valued action; ties go to the lowest index.
    pub fn greedy(&self, key: &[i64]) -> usize {
        match self.table.get(key) {
            None => 0,
            Some(row) => {
                let mut best = 0;
                for (i, &v) in row.iter().enumerate() {
                    if v > row[best] {
                        best = i;
                    }
                }
                best
            }
        }
    }

    pub fn max_value(&self, key: &[i64]) -> f64 {
        self.value(key, self.greedy(key))
    }

    pub fn epsilon_greedy<R: Rng + ?Sized>(&self, key: &[i64], epsilon: f64, rng: &mut R) -> usize {
        if rng.random::<f64>() < epsilon {
            rng.random_range(0..self.n_actions)
        } else {
            self.greedy(key)
        }
    }

    /// Moves `Q(key, action)` a fraction `alpha` toward `target`.
    pub fn update(&mut self, key: &[i64], action: usize, target: f64, alpha: f64) -> Result<(), AgentError> {
        if !target.is_finite() {
            return Err(AgentError::NonFiniteLoss("tabular target"));
        }
        if alpha == 0.0 {
            return Ok(());
        }
        let (n, init) = (self.n_actions, self.initial);
        let row = self.table.entry(key.to_vec()).or_insert_with(|| vec![init; n]);
        row[action] += alpha * (target - row[action]);
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("qtable v1 {} {}\n", self.n_actions, self.initial);
        for (key, row) in &self.table {
            let k: Vec<String> = key.iter().map(i64::to_string).collect();
            let v: Vec<String> = row.iter().map(f64::to_string).collect();
            writeln!(out, "{};{}", k.join(","), v.join(",")).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, AgentError> {
        let bad = |m: String| AgentError::Checkpoint(m);
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty q-table file".into()))?;
        let (n_actions, initial): (usize, f64) = header
            .strip_prefix("qtable v1 ")
            .and_then(|rest| rest.trim().split_once(' '))
            .and_then(|(n, init)| Some((n.parse().ok()?, init.parse().ok()?)))
            .ok_or_else(|| bad(format!("bad q-table header `{header}`")))?;
        let mut q = Self::with_initial(n_actions, initial)?;
        for (i, line) in lines.enumerate() {
            let (k, v) = line.split_once(';').ok_or_else(|| bad(format!("line {}: missing `;`", i + 2)))?;
            let key = k
                .split(',')
                .map(|x| x.parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| bad(format!("line {}: {e}", i + 2)))?;
            let row = v
                .split(',')
                .map(|x| x.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| bad(format!("line {}: {e}", i + 2)))?;
            if row.len() != n_actions {
                return Err(bad(format!("line {}: {} values, expected {n_actions}", i + 2, row.len())));
            }
            q.table.insert(key, row);
        }
        Ok(q)
    }

    pub fn save(&self, path: &Path) -> Result<(), AgentError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, AgentError> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Bootstrapped one-step target for either algorithm. `next_action` is the
/// action actually taken next (SARSA); Q-learning ignores it.
pub fn tabular_target(
    q: &QTable,
    algo: TabularAlgo,
    reward: f64,
    next_key: &[i64],
    next_action: usize,
    gamma: f64,
    terminal: bool,
) -> f64 {
    if terminal {
        return reward;
    }
    let bootstrap = match algo {
        TabularAlgo::QLearning => q.max_value(next_key),
        TabularAlgo::Sarsa => q.value(next_key, next_action),
    };
    reward + gamma * bootstrap
}
