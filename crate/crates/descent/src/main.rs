//! Command-line front end: train evaluations, run tournaments, play against
//! an engine, run the self-check suites, and export checkpoints.
//!
//! Exit codes: 0 on success, 1 for usage and configuration mistakes, 2 when
//! an experiment or self-check fails.

use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use descent::config::{assemble, Config, ConfigError, Experiment};
use descent::eval::AdaptiveEval;
use descent::game::{render_board, Game, MatchContext, Player, State};
use descent::harness::{
    emit_curves, evaluate_marks, read_checkpoint_file, round_robin, Combination, Contender,
    MatchMode, Registry,
};
use descent::learning::{train_loop, write_training_log, TrainHooks, TrainReport};
use descent::search::{run_search, Algorithm, Budget, SearchContext, SearchTable};
use descent::verify::{
    run_completion_suite, run_distribution_suite, run_gradcheck_suite, run_oracle_suite,
    SuiteReport,
};

#[derive(Parser)]
#[command(
    name = "descent",
    about = "Self-play learning and search for two-player zero-sum board games",
    after_help = config_key_help()
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn config_key_help() -> String {
    format!("Config file keys (key=value lines):\n{}", Config::describe_keys())
}

#[derive(Subcommand)]
enum Command {
    /// Train an evaluation by self-play and checkpoint it.
    Train(TrainArgs),
    /// Train several configurations and compare them across marks.
    Tournament(TournamentArgs),
    /// Play a game against an engine, or watch two engines.
    Play(PlayArgs),
    /// Run the self-check suites.
    Verify(VerifyArgs),
    /// Export a registry checkpoint to a standalone file.
    Export(ExportArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// Experiment configuration file.
    config: PathBuf,
    /// Output directory for checkpoints, the training log, and the
    /// effective configuration.
    #[arg(short, long, default_value = "runs/train")]
    out: PathBuf,
    /// Config overrides applied after the file, e.g. --set budget=it:200.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Master seed (overrides the config file).
    #[arg(long)]
    seed: Option<u64>,
    /// Episode count (overrides the config file).
    #[arg(long)]
    episodes: Option<u64>,
}

#[derive(Args)]
struct TournamentArgs {
    /// One configuration file per combination; all must name the same game.
    #[arg(required = true, num_args = 2..)]
    configs: Vec<PathBuf>,
    /// Output directory for the curve CSV and effective configurations.
    #[arg(short, long, default_value = "runs/tournament")]
    out: PathBuf,
    /// Config overrides applied to every combination.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Episode marks at which snapshots are compared; the largest is the
    /// training length. Defaults to quarters of the configured episodes.
    #[arg(long, value_delimiter = ',')]
    marks: Vec<u64>,
    /// Color-balanced rounds per opponent per mark (2 games each).
    #[arg(long, default_value_t = 4)]
    rounds: u32,
    /// Random opening plies that vary otherwise deterministic games.
    #[arg(long, default_value_t = 2)]
    opening: u32,
    /// greedy: one-ply lookahead over the learned evaluation;
    /// full: each combination's own algorithm and budget.
    #[arg(long, default_value = "greedy", value_parser = ["greedy", "full"])]
    mode: String,
    /// Master seed for training and matches.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct PlayArgs {
    /// Game to play.
    #[arg(long, default_value = "tictactoe")]
    game: String,
    /// Board side length (defaults per game).
    #[arg(long)]
    size: Option<usize>,
    /// Enable the hex pie rule; your second move may then be `swap`.
    #[arg(long)]
    swap: bool,
    /// Checkpoint file for the engine's evaluation (see `export`);
    /// defaults to the zero table.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Engine search algorithm.
    #[arg(long, default_value = "completed-descent")]
    algorithm: String,
    /// Engine per-move budget.
    #[arg(long, default_value = "it:200")]
    budget: String,
    /// Terminal heuristic for the engine.
    #[arg(long, default_value = "classic")]
    heuristic: String,
    /// Which side you take.
    #[arg(long, default_value = "first", value_parser = ["first", "second"])]
    side: String,
    /// Let the engine play both sides.
    #[arg(long)]
    auto: bool,
    /// Seed for the engine's tie-breaking and any random openings.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suites to run (default: all).
    #[arg(value_parser = ["oracle", "gradcheck", "distributions", "completion"])]
    suites: Vec<String>,
    /// Seed for the sampled checks.
    #[arg(long, default_value_t = 17)]
    seed: u64,
}

#[derive(Args)]
struct ExportArgs {
    /// Checkpoint registry directory (a train run's `checkpoints`).
    registry: PathBuf,
    /// Checkpoint id, or `latest` for the most recent save.
    #[arg(default_value = "latest")]
    id: String,
    /// Destination file.
    #[arg(short, long)]
    out: PathBuf,
}

/// A failure with its exit code: usage mistakes exit 1, failed experiments
/// and self-checks exit 2.
enum Failure {
    Usage(String),
    Experiment(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Failure {
        Failure::Usage(e.0)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Experiment(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successful outputs, not usage errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Tournament(args) => cmd_tournament(args),
        Command::Play(args) => cmd_play(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Export(args) => cmd_export(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(Failure::Experiment(message)) => {
            eprintln!("failure: {message}");
            ExitCode::from(2)
        }
    }
}

/// Load a config file and apply `--set`, `--seed`, and `--episodes`
/// overrides, which win over the file.
fn load_config(
    path: &Path,
    set: &[String],
    seed: Option<u64>,
    episodes: Option<u64>,
) -> Result<Config, Failure> {
    let mut config = Config::from_file(path)?;
    for pair in set {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--set `{pair}` is not key=value")))?;
        config.set(key.trim(), value.trim())?;
    }
    if let Some(seed) = seed {
        config.set("seed", &seed.to_string())?;
    }
    if let Some(episodes) = episodes {
        config.set("episodes", &episodes.to_string())?;
    }
    Ok(config)
}

/// Write the effective configuration next to the run's outputs.
fn echo_config(config: &Config, exp: &Experiment, path: &Path) -> Result<String, Failure> {
    let mut resolved = config.clone();
    resolved.set("size", &exp.game.rows().to_string())?;
    resolved.set("label", &exp.label)?;
    let echo = resolved.echo();
    fs::write(path, &echo)?;
    Ok(echo)
}

fn cmd_train(args: TrainArgs) -> Result<(), Failure> {
    let config = load_config(&args.config, &args.set, args.seed, args.episodes)?;
    let mut exp = assemble(&config)?;
    fs::create_dir_all(&args.out)?;
    let echo = echo_config(&config, &exp, &args.out.join("config.txt"))?;

    let registry = Registry::open(args.out.join("checkpoints"))?;
    let mut checkpoints = 0u32;
    let mut hooks = TrainHooks::none();
    hooks.on_checkpoint = Some(Box::new(|mark, adaptive: &AdaptiveEval| {
        let saved = registry
            .save(&format!("ep{mark}"), adaptive, &echo)
            .map_err(|e| e.0)?;
        println!("checkpoint ep{mark}: {}", saved.id);
        checkpoints += 1;
        Ok(())
    }));

    let report = train_loop(
        exp.game.as_ref(),
        &mut exp.adaptive,
        &exp.terminal,
        &exp.episode,
        &exp.settings,
        &mut hooks,
    )
    .map_err(|e| Failure::Experiment(e.to_string()))?;
    drop(hooks);

    write_log(&report, &args.out.join("training-log.csv"))?;
    println!(
        "trained {} on {} for {} episodes ({} checkpoints, log in {})",
        exp.label,
        exp.game.name(),
        report.episodes_run,
        checkpoints,
        args.out.join("training-log.csv").display()
    );
    if report.aborted_episodes > 0 {
        return Err(Failure::Experiment(format!(
            "{} episodes hit the ply cap; raise ply-cap or inspect the rules",
            report.aborted_episodes
        )));
    }
    Ok(())
}

fn write_log(report: &TrainReport, path: &Path) -> Result<(), Failure> {
    let mut buf = Vec::new();
    write_training_log(report, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

fn cmd_tournament(args: TournamentArgs) -> Result<(), Failure> {
    let mode = if args.mode == "full" { MatchMode::FullSearch } else { MatchMode::GreedyEval };
    let mut experiments = Vec::new();
    let mut configs = Vec::new();
    for path in &args.configs {
        let config = load_config(path, &args.set, args.seed, None)?;
        let exp = assemble(&config)?;
        configs.push(config);
        experiments.push(exp);
    }
    let game_name = experiments[0].game.name();
    for exp in &experiments {
        if exp.game.name() != game_name {
            return Err(Failure::Usage(format!(
                "all combinations must play the same game, got {} and {}",
                game_name,
                exp.game.name()
            )));
        }
    }

    let marks = if args.marks.is_empty() {
        let episodes = experiments[0].settings.episodes.max(4);
        (1..=4).map(|q| episodes * q / 4).collect()
    } else {
        let mut marks = args.marks.clone();
        marks.sort_unstable();
        marks.dedup();
        marks
    };
    if marks.iter().any(|&m| m == 0) {
        return Err(Failure::Usage("marks must be positive episode counts".into()));
    }

    fs::create_dir_all(&args.out)?;
    let master_seed = args.seed.unwrap_or(0);
    let mut combinations = Vec::new();
    let mut game: Option<Box<dyn Game>> = None;
    for (i, mut exp) in experiments.into_iter().enumerate() {
        echo_config(
            &configs[i],
            &exp,
            &args.out.join(format!("{}.config.txt", exp.label)),
        )?;
        println!("training {} on {game_name} to episode {}", exp.label, marks[marks.len() - 1]);
        let mut settings = exp.settings.clone();
        settings.episodes = marks[marks.len() - 1];
        // Snapshots are taken by the per-episode checkpoint hook, exactly
        // at the marks.
        settings.checkpoint_every = 1;
        settings.seed = settings.seed.wrapping_add(i as u64);
        let mut at_mark = Vec::new();
        let mut hooks = TrainHooks::none();
        hooks.on_checkpoint = Some(Box::new(|mark, adaptive: &AdaptiveEval| {
            if marks.contains(&mark) {
                at_mark.push(adaptive.clone());
            }
            Ok(())
        }));
        let report = train_loop(
            exp.game.as_ref(),
            &mut exp.adaptive,
            &exp.terminal,
            &exp.episode,
            &settings,
            &mut hooks,
        )
        .map_err(|e| Failure::Experiment(format!("{}: {e}", exp.label)))?;
        drop(hooks);
        if report.aborted_episodes > 0 {
            return Err(Failure::Experiment(format!(
                "{}: {} episodes hit the ply cap",
                exp.label, report.aborted_episodes
            )));
        }
        if at_mark.len() != marks.len() {
            return Err(Failure::Experiment(format!(
                "{}: {} snapshots for {} marks",
                exp.label,
                at_mark.len(),
                marks.len()
            )));
        }
        combinations.push(Combination {
            label: exp.label,
            algorithm: exp.episode.algorithm,
            budget: exp.episode.budget,
            terminal: exp.terminal,
            at_mark,
        });
        game.get_or_insert(exp.game);
    }
    let game = game.expect("at least two combinations were trained");

    println!(
        "evaluating {} combinations at {} marks ({} rounds per opponent)",
        combinations.len(),
        marks.len(),
        args.rounds
    );
    let cells = evaluate_marks(
        game.as_ref(),
        &combinations,
        &marks,
        mode,
        args.rounds,
        args.opening,
        master_seed,
    );
    let mut csv = Vec::new();
    emit_curves(&cells, &mut csv)?;
    let csv_path = args.out.join("curves.csv");
    fs::write(&csv_path, &csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    println!("curves written to {}", csv_path.display());

    let finals: Vec<Contender> = combinations
        .iter()
        .map(|combo| Contender::Engine {
            label: combo.label.clone(),
            algorithm: match mode {
                MatchMode::GreedyEval => Algorithm::AlphaBetaId,
                MatchMode::FullSearch => combo.algorithm,
            },
            budget: match mode {
                MatchMode::GreedyEval => Budget::Iterations(1),
                MatchMode::FullSearch => combo.budget,
            },
            adaptive: combo.at_mark.last().expect("final snapshot"),
            terminal: &combo.terminal,
        })
        .collect();
    let standings = round_robin(
        game.as_ref(),
        &finals,
        args.rounds,
        args.opening,
        master_seed.wrapping_add(1),
    );
    println!("final all-play-all:");
    for standing in &standings {
        println!(
            "  {:<24} {:5.1}% +-{:.1} over {} games",
            standing.label,
            100.0 * standing.score,
            100.0 * standing.ci,
            standing.games
        );
    }

    let faults: u32 = cells.iter().map(|c| c.faults).sum();
    if faults > 0 {
        return Err(Failure::Experiment(format!(
            "{faults} games ended by diagnostic instead of on the board"
        )));
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let all = ["oracle", "gradcheck", "distributions", "completion"];
    let picked: Vec<&str> = if args.suites.is_empty() {
        all.to_vec()
    } else {
        args.suites.iter().map(|s| s.as_str()).collect()
    };
    let stdout = std::io::stdout();
    let mut failed = false;
    for suite in picked {
        let report: SuiteReport = match suite {
            "oracle" => run_oracle_suite(),
            "gradcheck" => run_gradcheck_suite(args.seed),
            "distributions" => run_distribution_suite(args.seed),
            "completion" => run_completion_suite(args.seed),
            other => return Err(Failure::Usage(format!("unknown suite `{other}`"))),
        };
        report.print(&mut stdout.lock())?;
        failed |= !report.passed();
    }
    if failed {
        return Err(Failure::Experiment("one or more self-check suites failed".into()));
    }
    Ok(())
}

fn cmd_export(args: ExportArgs) -> Result<(), Failure> {
    let registry = Registry::open(&args.registry)?;
    let entries = registry.list().map_err(|e| Failure::Experiment(e.0))?;
    let entry = if args.id == "latest" {
        entries.last().cloned().ok_or_else(|| {
            Failure::Usage(format!("registry {} is empty", args.registry.display()))
        })?
    } else {
        entries
            .iter()
            .find(|e| e.id == args.id || e.id.starts_with(&args.id))
            .cloned()
            .ok_or_else(|| Failure::Usage(format!("no checkpoint matches `{}`", args.id)))?
    };
    registry
        .export(&entry.id, &args.out)
        .map_err(|e| Failure::Experiment(e.0))?;
    println!(
        "exported {} ({}, {}) to {}",
        entry.id,
        entry.kind,
        entry.descriptor,
        args.out.display()
    );
    Ok(())
}

fn cmd_play(args: PlayArgs) -> Result<(), Failure> {
    let size = args.size.unwrap_or(match args.game.as_str() {
        "tictactoe" => 3,
        "hex" => 5,
        "othello" => 6,
        "breakthrough" => 6,
        "clobber" => 5,
        _ => 3,
    });
    let game = descent::game::by_name(&args.game, size, args.swap)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let algorithm = Algorithm::parse(&args.algorithm).map_err(Failure::Usage)?;
    let budget = Budget::parse(&args.budget).map_err(Failure::Usage)?;
    let kind = descent::eval::HeuristicKind::parse(&args.heuristic)
        .ok_or_else(|| Failure::Usage(format!("unknown heuristic `{}`", args.heuristic)))?;
    if !game.supports_heuristic(kind) {
        return Err(Failure::Usage(format!(
            "{} does not support the {} heuristic",
            game.name(),
            kind.label()
        )));
    }
    let terminal = descent::eval::TerminalEval::for_game(kind, game.as_ref());
    let adaptive = match &args.checkpoint {
        Some(path) => read_checkpoint_file(path).map_err(|e| Failure::Usage(e.0))?,
        None => AdaptiveEval::zero_table(),
    };

    let human = match args.side.as_str() {
        "second" => Player::Second,
        _ => Player::First,
    };
    let mut engine_tables = [SearchTable::new(), SearchTable::new()];
    let mut seen = MatchContext::default();
    let mut s = game.initial_state();
    let stdin = std::io::stdin();
    let mut input = stdin.lock();

    println!("{} vs {} on {}", if args.auto { "engine" } else { "you" }, "engine", game.name());
    println!("{}", render_board(game.as_ref(), &s));
    while !game.is_terminal(&s) {
        let mover = s.to_move();
        let actions = game.legal_actions(&s);
        let action = if !args.auto && mover == human {
            match prompt_move(game.as_ref(), &s, &mut input)? {
                Some(a) => a,
                None => {
                    println!("input closed, resigning");
                    return Ok(());
                }
            }
        } else {
            let table = &mut engine_tables[if mover == Player::First { 0 } else { 1 }];
            let mut ctx = SearchContext {
                game: game.as_ref(),
                adaptive: &adaptive,
                terminal: &terminal,
                table,
                trace: None,
            };
            let outcome = run_search(algorithm, &mut ctx, &s, seen, budget);
            println!(
                "engine ({mover}) plays {} (value {:+.3}{})",
                game.format_action(outcome.action),
                outcome.value,
                if outcome.resolved { format!(", proven {:+}", outcome.r) } else { String::new() }
            );
            outcome.action
        };
        seen.observe(mover, actions.len());
        s = game.apply(&s, action);
        println!("{}", render_board(game.as_ref(), &s));
    }
    let result = match game.gain(&s) {
        1 => "first player wins",
        -1 => "second player wins",
        _ => "draw",
    };
    println!("result: {result} after {} plies", s.ply());
    Ok(())
}

/// Ask for a move until a legal one arrives. `None` means stdin closed.
fn prompt_move(
    game: &dyn Game,
    s: &State,
    input: &mut impl BufRead,
) -> Result<Option<descent::game::Action>, Failure> {
    let actions = game.legal_actions(s);
    if actions.contains(&descent::game::Action::Swap) {
        println!("(you may reply `swap` to steal the opening move)");
    }
    loop {
        print!("your move ({}): ", game.format_action(actions[0]));
        std::io::stdout().flush()?;
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            return Ok(None);
        }
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        match game.parse_action(text) {
            Ok(action) if actions.contains(&action) => return Ok(Some(action)),
            Ok(_) => println!("`{text}` is not legal here, try again"),
            Err(e) => println!("{e}, try again"),
        }
    }
}
