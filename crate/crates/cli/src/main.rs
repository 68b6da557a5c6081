use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use sarhrl_core::agents::persist;
use sarhrl_core::attention::AttentionConfig;
use sarhrl_core::context::{extract_context, InformationSpace, KnowledgeBase, VerbalInput, VerbalSource};
use sarhrl_core::env::{GridWorld, RewardModel};
use sarhrl_core::experiment::{evaluate_greedy, export_results, prepare_output, run_experiment, ExperimentConfig, Resources, Variant};

#[derive(Parser)]
#[command(name = "sarhrl", version, about = "Hierarchical RL for search and rescue, steered by verbal input")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train every seed of an experiment and export curves, tables and manifest.
    Train {
        /// JSON experiment config.
        config: PathBuf,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        episodes: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output root; results go to `<out>/<variant>/<timestamp>/`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Greedy evaluation of saved tables on a map, with its scripted messages.
    Eval {
        tables: PathBuf,
        map: PathBuf,
        /// Knowledge base; the shipped one when absent.
        #[arg(long)]
        kb: Option<PathBuf>,
        /// Print the evaluation as JSON instead of a table row.
        #[arg(long)]
        json: bool,
    },
    /// Print the context records the grammar backend extracts from TEXT.
    Extract {
        text: String,
        #[arg(long)]
        kb: Option<PathBuf>,
        /// Map the knowledge base is validated against; the shipped one when absent.
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Start the HTTP steering session server.
    Serve {
        #[arg(long, env = "SARHRL_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

type Failure = Box<dyn std::error::Error>;

fn train(config: PathBuf, runs: Option<usize>, episodes: Option<usize>, seed: Option<u64>, out: Option<PathBuf>) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&config).map_err(|e| format!("cannot open {}: {e}", config.display()))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(r) = runs {
        cfg.runs = r;
    }
    if let Some(e) = episodes {
        cfg.params.episodes = e;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(o) = out {
        cfg.out = o;
    }
    cfg.validate()?;
    if !cfg.is_reference_pairing() {
        eprintln!("note: {} is usually compared under {:?} rewards", cfg.variant, cfg.variant.reference_reward_mode());
    }
    let dir = prepare_output(&cfg.out, cfg.variant)?;
    let exp = run_experiment(&cfg)?;
    let manifest = export_results(&exp, &dir)?;
    println!("{}", dir.path.display());
    println!(
        "{} ({:?}): {} runs x {} episodes, final-100 success {:.2}, mean reward {:.2}",
        cfg.variant,
        cfg.reward_mode,
        cfg.runs,
        cfg.params.episodes,
        manifest.final_success_rate,
        manifest.mean_reward
    );
    Ok(())
}

fn variant_of(kind: sarhrl_core::agents::AgentKind, attention: bool) -> Variant {
    Variant::ALL.into_iter().find(|v| v.kind() == kind && v.attention() == attention).expect("every pairing is a variant")
}

fn eval(tables: PathBuf, map: PathBuf, kb: Option<PathBuf>, json: bool) -> Result<(), Failure> {
    let world = GridWorld::load(&map)?;
    let (header, agent) = persist::load(&tables, &world)?;
    let kb = match kb {
        Some(p) => KnowledgeBase::load(p, Some(&world))?,
        None => KnowledgeBase::default_for(&world)?,
    };
    let res = Resources {
        world,
        kb: Arc::new(kb),
        rewards: RewardModel::for_mode(header.reward_mode),
        space: InformationSpace::default(),
        attention: AttentionConfig::default(),
        service: None,
    };
    let eval = evaluate_greedy(&agent, &res, header.attention)?;
    let variant = variant_of(header.kind, header.attention);
    if json {
        let doc = serde_json::json!({
            "variant": variant,
            "reward_mode": header.reward_mode,
            "steps": eval.steps,
            "collisions": eval.collisions,
            "success": eval.success,
            "total_reward": eval.total_reward,
            "trajectory": eval.trajectory,
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!("{:<10} {:>6} {:>11} {:>8} {:>13}", "variant", "steps", "collisions", "success", "total_reward");
        println!("{:<10} {:>6} {:>11} {:>8} {:>13.2}", variant.slug(), eval.steps, eval.collisions, eval.success, eval.total_reward);
    }
    Ok(())
}

fn extract(text: String, kb: Option<PathBuf>, map: Option<PathBuf>) -> Result<(), Failure> {
    let world = match map {
        Some(p) => GridWorld::load(p)?,
        None => GridWorld::default_map(),
    };
    let kb = match kb {
        Some(p) => KnowledgeBase::load(p, Some(&world))?,
        None => KnowledgeBase::default_for(&world)?,
    };
    let input = VerbalInput::new(text, VerbalSource::Human, 0).ok_or("text is empty")?;
    let ex = extract_context(&input, &kb);
    for note in &ex.notes {
        eprintln!("note: {note}");
    }
    println!("{}", serde_json::to_string_pretty(&ex.records)?);
    Ok(())
}

fn serve(host: String, port: u16) -> Result<(), Failure> {
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((host.as_str(), port)).await?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        sarhrl::server::serve(listener).await
    })?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train { config, runs, episodes, seed, out } => train(config, runs, episodes, seed, out),
        Command::Eval { tables, map, kb, json } => eval(tables, map, kb, json),
        Command::Extract { text, kb, map } => extract(text, kb, map),
        Command::Serve { port, host } => serve(host, port),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
