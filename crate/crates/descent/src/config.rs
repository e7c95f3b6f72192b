//! Experiment configuration: a flat `key=value` file format, flag
//! overrides, defaults, and assembly into a runnable experiment.
//!
//! Every key is declared in [`CONFIG_KEYS`] with its default and a one-line
//! description, which is also what `--help` prints. Unknown keys are
//! rejected so a typo cannot silently fall back to a default. The
//! [`Config::echo`] output is the effective configuration (defaults plus
//! file plus overrides) in sorted order, written next to every run's
//! results for provenance.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::eval::{AdaptiveEval, HeuristicKind, TerminalEval};
use crate::game::{by_name, Game};
use crate::learning::{Capacity, DataMode, EpisodeConfig, SelectionPolicy, TrainSettings};
use crate::nnet::{Architecture, Network, TrainConfig};
use crate::search::{Algorithm, Budget};

/// Every config key: name, default (empty means "derived"), description.
pub const CONFIG_KEYS: &[(&str, &str, &str)] = &[
    ("game", "", "game to play: tictactoe, hex, othello, breakthrough, or clobber (required)"),
    ("size", "", "board side length; defaults per game (tictactoe 3, hex 5, othello 6, breakthrough 6, clobber 5)"),
    ("swap", "false", "enable the hex pie rule (second player may steal the first move)"),
    ("label", "", "combination label in tournament outputs; defaults to algorithm+data"),
    ("algorithm", "completed-descent", "search: ubfm, descent, completed-descent, ubfm-s, alphabeta-id, or uct[:c]"),
    ("budget", "it:100", "per-move search budget: it:N iterations (alpha-beta: max depth), nodes:N, or ms:N"),
    ("policy", "ordinal", "move selection during self-play: greedy, epsilon-greedy, softmax[:T], or ordinal"),
    ("data", "tree", "training pairs per episode: tree (whole search tree), root, or terminal"),
    ("heuristic", "classic", "terminal reward: classic, depth-additive, depth-multiplicative, score, mobility, or presence"),
    ("evaluator", "table", "adaptive evaluation: table (exact lookup) or network"),
    ("arch", "desk", "network architecture: desk, full, dense, or a descriptor like in:3x5x5;conv:16x3;relu;dense:32;tanh"),
    ("episodes", "1000", "self-play episodes to train for"),
    ("replay", "games:100", "replay memory capacity: games:N or pairs:N"),
    ("sigma", "1.0", "fraction of the replay memory sampled per update, in (0, 1]"),
    ("batch", "128", "samples per optimizer step"),
    ("lr", "0.001", "Adam learning rate"),
    ("l2", "0.001", "L2 regularization strength"),
    ("checkpoint-every", "100", "episodes between checkpoints; 0 keeps only the first and last"),
    ("ply-cap", "1000", "abort episodes longer than this many moves"),
    ("augment", "true", "multiply training pairs by the game's board symmetries"),
    ("seed", "0", "master seed; fixes every random draw of the run"),
];

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn is_known(key: &str) -> bool {
    CONFIG_KEYS.iter().any(|(k, _, _)| *k == key)
}

fn default_of(key: &str) -> &'static str {
    CONFIG_KEYS
        .iter()
        .find(|(k, _, _)| *k == key)
        .map(|(_, d, _)| *d)
        .unwrap_or("")
}

/// A set of explicitly provided keys; defaults are applied on read.
#[derive(Clone, Default, Debug)]
pub struct Config {
    map: BTreeMap<String, String>,
}

impl Config {
    pub fn new() -> Config {
        Config::default()
    }

    /// Parse `key=value` lines. Blank lines and `#` comments are skipped;
    /// later lines override earlier ones.
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut config = Config::new();
        for (number, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError(format!("line {}: `{line}` is not key=value", number + 1))
            })?;
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Config, ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Config::parse(&text)
    }

    /// Set one key, rejecting unknown names so typos fail loudly.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if !is_known(key) {
            return Err(ConfigError(format!(
                "unknown config key `{key}` (see --help for the full list)"
            )));
        }
        self.map.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// The explicitly set value, or the declared default, or None when the
    /// key has no usable default.
    pub fn get(&self, key: &str) -> Option<&str> {
        debug_assert!(is_known(key), "lookup of undeclared key `{key}`");
        match self.map.get(key) {
            Some(v) => Some(v),
            None => {
                let d = default_of(key);
                if d.is_empty() { None } else { Some(d) }
            }
        }
    }

    pub fn require(&self, key: &str) -> Result<&str, ConfigError> {
        self.get(key)
            .ok_or_else(|| ConfigError(format!("missing required config key `{key}`")))
    }

    fn parse_as<T: FromStr>(&self, key: &str) -> Result<T, ConfigError> {
        let text = self.require(key)?;
        text.parse().map_err(|_| {
            ConfigError(format!("config key `{key}`: `{text}` is not a valid value"))
        })
    }

    fn parse_bool(&self, key: &str) -> Result<bool, ConfigError> {
        match self.require(key)? {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(ConfigError(format!(
                "config key `{key}`: `{other}` is neither true nor false"
            ))),
        }
    }

    /// The effective configuration as sorted `key=value` lines: every
    /// declared key with its resolved value, including applied defaults.
    pub fn echo(&self) -> String {
        let mut keys: Vec<&str> = CONFIG_KEYS.iter().map(|(k, _, _)| *k).collect();
        keys.sort_unstable();
        let mut out = String::new();
        for key in keys {
            if let Some(value) = self.get(key) {
                out.push_str(key);
                out.push('=');
                out.push_str(value);
                out.push('\n');
            }
        }
        out
    }

    /// One line per key for `--help`.
    pub fn describe_keys() -> String {
        let mut out = String::new();
        for (key, default, what) in CONFIG_KEYS {
            if default.is_empty() {
                out.push_str(&format!("  {key:<17} {what}\n"));
            } else {
                out.push_str(&format!("  {key:<17} {what} [default: {default}]\n"));
            }
        }
        out
    }
}

/// A fully assembled training experiment.
pub struct Experiment {
    pub game: Box<dyn Game>,
    pub label: String,
    pub episode: EpisodeConfig,
    pub terminal: TerminalEval,
    pub adaptive: AdaptiveEval,
    pub settings: TrainSettings,
}

impl fmt::Debug for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Experiment")
            .field("game", &self.game.name())
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

fn default_size(game: &str) -> usize {
    match game {
        "tictactoe" => 3,
        "hex" => 5,
        "othello" => 6,
        "breakthrough" => 6,
        "clobber" => 5,
        _ => 0,
    }
}

/// Resolve a configuration into a runnable experiment, validating every
/// value and the game/heuristic support matrix up front.
pub fn assemble(config: &Config) -> Result<Experiment, ConfigError> {
    let game_name = config.require("game")?.to_string();
    let size = match config.get("size") {
        Some(text) => text
            .parse()
            .map_err(|_| ConfigError(format!("config key `size`: `{text}` is not a number")))?,
        None => default_size(&game_name),
    };
    let swap = config.parse_bool("swap")?;
    let game = by_name(&game_name, size, swap).map_err(|e| ConfigError(e.to_string()))?;

    let algorithm = Algorithm::parse(config.require("algorithm")?).map_err(ConfigError)?;
    let budget = Budget::parse(config.require("budget")?).map_err(ConfigError)?;
    let policy = SelectionPolicy::parse(config.require("policy")?).map_err(ConfigError)?;
    let data = DataMode::parse(config.require("data")?).map_err(ConfigError)?;

    let heuristic_name = config.require("heuristic")?;
    let kind = HeuristicKind::parse(heuristic_name)
        .ok_or_else(|| ConfigError(format!("unknown heuristic `{heuristic_name}`")))?;
    if !game.supports_heuristic(kind) {
        return Err(ConfigError(format!(
            "{} does not support the {} heuristic",
            game.name(),
            kind.label()
        )));
    }
    let terminal = TerminalEval::for_game(kind, game.as_ref());

    let seed: u64 = config.parse_as("seed")?;
    let adaptive = match config.require("evaluator")? {
        "table" => AdaptiveEval::zero_table(),
        "network" => {
            let bounded = kind.bounded_by_one();
            let shape = game.plane_shape();
            let arch = match config.require("arch")? {
                "desk" => Architecture::desk_default(shape, bounded),
                "full" => Architecture::full_default(shape, bounded),
                "dense" => Architecture::dense_default(shape, bounded),
                custom => {
                    let arch = Architecture::parse(custom)
                        .map_err(|e| ConfigError(format!("config key `arch`: {}", e.0)))?;
                    if arch.input != shape {
                        return Err(ConfigError(format!(
                            "architecture input {:?} does not match the {} planes {:?}",
                            arch.input,
                            game.name(),
                            shape
                        )));
                    }
                    arch
                }
            };
            AdaptiveEval::Network(Network::init(arch, seed))
        }
        other => {
            return Err(ConfigError(format!(
                "config key `evaluator`: `{other}` is neither table nor network"
            )));
        }
    };

    let sigma: f64 = config.parse_as("sigma")?;
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(ConfigError(format!("config key `sigma`: {sigma} is outside (0, 1]")));
    }
    let settings = TrainSettings {
        episodes: config.parse_as("episodes")?,
        replay: Capacity::parse(config.require("replay")?).map_err(ConfigError)?,
        sigma,
        train: TrainConfig {
            batch_size: config.parse_as("batch")?,
            learning_rate: config.parse_as("lr")?,
            l2: config.parse_as("l2")?,
        },
        checkpoint_every: config.parse_as("checkpoint-every")?,
        augment: config.parse_bool("augment")?,
        seed,
        wall_clock: None,
    };

    let label = match config.get("label") {
        Some(label) => label.to_string(),
        None => format!("{}-{}", algorithm.label(), data.label()),
    };

    Ok(Experiment {
        game,
        label,
        episode: EpisodeConfig {
            algorithm,
            budget,
            policy,
            data,
            ply_cap: config.parse_as("ply-cap")?,
        },
        terminal,
        adaptive,
        settings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_minimal_file_assembles_with_defaults() {
        let config = Config::parse("game=tictactoe\n").unwrap();
        let exp = assemble(&config).unwrap();
        assert_eq!(exp.game.name(), "tictactoe");
        assert_eq!(exp.settings.episodes, 1000);
        assert_eq!(exp.episode.algorithm, Algorithm::CompletedDescent);
        assert_eq!(exp.label, "completed-descent-tree");
        assert!(matches!(exp.adaptive, AdaptiveEval::Table(_)));
    }

    #[test]
    fn comments_blanks_and_overrides_are_handled() {
        let text = "# an experiment\n\ngame=hex\nsize=3\n  budget = it:7  \nbudget=it:9\n";
        let config = Config::parse(text).unwrap();
        assert_eq!(config.get("budget"), Some("it:9"), "later lines win");
        let exp = assemble(&config).unwrap();
        assert_eq!(exp.game.name(), "hex-3");
    }

    #[test]
    fn the_game_key_is_required_by_name() {
        let config = Config::parse("algorithm=descent\n").unwrap();
        let err = assemble(&config).unwrap_err();
        assert!(err.0.contains("`game`"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected_at_parse_time() {
        let err = Config::parse("game=hex\nalgorthm=descent\n").unwrap_err();
        assert!(err.0.contains("algorthm"), "{err}");
    }

    #[test]
    fn malformed_lines_name_their_line_number() {
        let err = Config::parse("game=hex\nnot a pair\n").unwrap_err();
        assert!(err.0.contains("line 2"), "{err}");
    }

    #[test]
    fn unsupported_heuristics_fail_at_assembly() {
        let config = Config::parse("game=hex\nsize=3\nheuristic=score\n").unwrap();
        let err = assemble(&config).unwrap_err();
        assert!(err.0.contains("score"), "{err}");
    }

    #[test]
    fn the_echo_is_sorted_and_complete() {
        let mut config = Config::parse("game=tictactoe\nseed=7\n").unwrap();
        config.set("budget", "it:50").unwrap();
        let echo = config.echo();
        assert!(echo.contains("game=tictactoe\n"));
        assert!(echo.contains("budget=it:50\n"));
        assert!(echo.contains("policy=ordinal\n"), "defaults are echoed too");
        let lines: Vec<&str> = echo.lines().collect();
        let mut sorted = lines.clone();
        sorted.sort_unstable();
        assert_eq!(lines, sorted);
        let reparsed = Config::parse(&echo).unwrap();
        assert_eq!(reparsed.echo(), echo, "the echo is itself a valid config");
    }

    #[test]
    fn network_experiments_build_the_right_input_shape() {
        let config =
            Config::parse("game=tictactoe\nevaluator=network\narch=dense\nseed=3\n").unwrap();
        let exp = assemble(&config).unwrap();
        let net = exp.adaptive.as_network().expect("network evaluator");
        assert_eq!(net.architecture().input, exp.game.plane_shape());
    }

    #[test]
    fn a_custom_descriptor_must_match_the_game_planes() {
        let config =
            Config::parse("game=hex\nsize=5\nevaluator=network\narch=in:3x3x3;dense:8;dense:1;tanh\n")
                .unwrap();
        let err = assemble(&config).unwrap_err();
        assert!(err.0.contains("planes"), "{err}");
    }

    #[test]
    fn every_key_description_fits_on_one_line() {
        let help = Config::describe_keys();
        assert_eq!(help.lines().count(), CONFIG_KEYS.len());
        for (key, _, _) in CONFIG_KEYS {
            assert!(help.contains(key), "help must document `{key}`");
        }
    }
}
