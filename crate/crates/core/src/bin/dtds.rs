use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use dtds::corpus::{self, CORPUS_AGENTS};
use dtds::decide::{find_countermodel, sat, SatOptions, SatResult, Verdict};
use dtds::proofkit::ProofScript;
use dtds::syntax::{closure, parse, render, render_with, Formula, RenderOptions};
use dtds::system::{LassoSystem, WindowSystem};
use dtds::transforms::{
    check_pmorphism, filtrate, to_additive, unravel, UnravelOptions, DEFAULT_REFINEMENT_BUDGET,
};
use dtds::{AuditReport, Premodel};

type Result<T> = std::result::Result<T, Box<dyn Error>>;

#[derive(Parser)]
#[command(name = "dtds", version, about = "Temporal deontic STIT logic toolkit")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print it back with its closure size.
    Parse {
        formula: String,
        #[arg(long)]
        agents: Option<usize>,
    },
    /// Audit the structural conditions of a premodel, lasso or window file.
    Audit {
        file: PathBuf,
        /// Check (D3) with equality on window files.
        #[arg(long)]
        additive: bool,
    },
    /// Evaluate a formula on a model file.
    Check {
        file: PathBuf,
        #[arg(long)]
        formula: String,
        /// Premodel state name; all states when omitted.
        #[arg(long)]
        state: Option<String>,
        /// History index for lasso and window files; all when omitted.
        #[arg(long)]
        history: Option<usize>,
        #[arg(long, default_value_t = 0)]
        time: usize,
    },
    /// Check the (XFunc) and (UFix) side conditions for a formula's closure.
    Sides {
        file: PathBuf,
        #[arg(long)]
        formula: String,
    },
    /// Unravel a premodel into a lasso system.
    Unravel {
        file: PathBuf,
        #[arg(long)]
        formula: String,
        /// Seed state names; every state when omitted.
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<String>,
        #[arg(long, default_value_t = 3)]
        horizon: usize,
        #[arg(long)]
        margin: Option<usize>,
        #[arg(long, default_value_t = 2048)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Filtrate a premodel through a formula's closure.
    Filtrate {
        file: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a super-additive window (or lasso) into an additive window.
    Additive {
        file: PathBuf,
        /// Window horizon used when the input is a lasso file.
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_REFINEMENT_BUDGET)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bounded satisfiability search. Exit 0 = SAT, 1 = UNSAT-UP-TO, 2 = error.
    Sat {
        formula: String,
        #[arg(long, default_value_t = 3)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        agents: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random premodels tried per size beyond the exhaustive range.
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        /// Write the witness as a lasso file with the premodel inline.
        #[arg(long)]
        emit_witness: Option<PathBuf>,
    },
    /// Bounded validity check. Exit 0 = no countermodel up to the bound,
    /// 1 = countermodel found, 2 = error.
    Valid {
        formula: String,
        #[arg(long, default_value_t = 3)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        agents: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long)]
        emit_witness: Option<PathBuf>,
    },
    /// Proof scripts.
    Prove {
        #[command(subcommand)]
        action: ProveAction,
    },
    /// Bundled example formulas.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Subcommand)]
enum ProveAction {
    /// Check a proof script. Exit 0 = accepted, 1 = rejected.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        agents: usize,
    },
}

#[derive(Subcommand)]
enum ExamplesAction {
    /// The legal positions; `--all` adds the general corpus.
    List {
        #[arg(long)]
        all: bool,
    },
}

enum Model {
    Premodel(Premodel),
    Lasso(LassoSystem),
    Window(WindowSystem),
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn load(path: &Path, allow_invalid: bool) -> Result<Model> {
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text)?;
    if value.get("slices").is_some() {
        Ok(Model::Window(WindowSystem::from_json(&text)?))
    } else if value.get("base").is_some() {
        Ok(Model::Lasso(LassoSystem::from_json(&text, path.parent(), allow_invalid)?))
    } else {
        Ok(Model::Premodel(Premodel::from_json(&text, allow_invalid)?))
    }
}

fn load_premodel(path: &Path) -> Result<Premodel> {
    match load(path, false)? {
        Model::Premodel(m) => Ok(m),
        _ => Err(format!("{} is not a premodel file", path.display()).into()),
    }
}

fn formula(text: &str, agents: Option<usize>) -> Result<Formula> {
    Ok(match agents {
        Some(k) => parse(text, k)?,
        None => text.parse()?,
    })
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()).into()),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn show(json_mode: bool, value: Value, text: String) {
    if json_mode {
        println!("{}", serde_json::to_string_pretty(&value).expect("plain data"));
    } else {
        print!("{text}");
    }
}

fn audit_exit(report: &AuditReport) -> u8 {
    u8::from(!report.is_clean())
}

fn truth(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "true",
        Some(false) => "false",
        None => "unknown",
    }
}

fn run(cli: Cli) -> Result<u8> {
    let js = cli.json;
    match cli.command {
        Command::Parse { formula: text, agents } => {
            let f = formula(&text, agents)?;
            let sigma = closure(&f);
            let raw = render_with(&f, RenderOptions { abbreviate: false });
            show(
                js,
                json!({
                    "formula": render(&f),
                    "raw": raw,
                    "size": f.size(),
                    "closure_size": sigma.len(),
                    "closure": sigma.iter().map(render).collect::<Vec<_>>(),
                }),
                format!(
                    "{}\nraw: {raw}\nsize: {}\nclosure: {}\n",
                    render(&f),
                    f.size(),
                    sigma.len()
                ),
            );
            Ok(0)
        }
        Command::Audit { file, additive } => {
            let report = match load(&file, true)? {
                Model::Premodel(m) => m.audit(),
                Model::Lasso(s) => s.audit_window(),
                Model::Window(w) => w.audit(additive),
            };
            show(js, serde_json::to_value(&report)?, report.to_string());
            Ok(audit_exit(&report))
        }
        Command::Check {
            file,
            formula: text,
            state,
            history,
            time,
        } => {
            let f = formula(&text, None)?;
            let rows: Vec<(String, Option<bool>)> = match load(&file, false)? {
                Model::Premodel(m) => {
                    let states: Vec<usize> = match &state {
                        Some(name) => vec![m.state(name).ok_or_else(|| format!("unknown state {name}"))?],
                        None => (0..m.len()).collect(),
                    };
                    let ext = m.extension(&f)?;
                    states
                        .into_iter()
                        .map(|s| (m.name(s).to_string(), Some(ext.contains(s))))
                        .collect()
                }
                Model::Lasso(sys) => {
                    let hs: Vec<usize> = history.map_or_else(|| (0..sys.len()).collect(), |h| vec![h]);
                    hs.into_iter()
                        .map(|h| Ok((format!("h{h}@{time}"), Some(sys.eval_at(h, time, &f)?))))
                        .collect::<Result<_>>()?
                }
                Model::Window(w) => {
                    let hs: Vec<usize> = history.map_or_else(|| (0..w.len()).collect(), |h| vec![h]);
                    hs.into_iter()
                        .map(|h| Ok((format!("{}@{time}", w.names()[h]), w.eval_window(h, time, &f)?)))
                        .collect::<Result<_>>()?
                }
            };
            let text_out: String = rows.iter().map(|(k, v)| format!("{k}: {}\n", truth(*v))).collect();
            let value = json!({
                "formula": render(&f),
                "results": rows.iter().map(|(k, v)| json!({"point": k, "value": v})).collect::<Vec<_>>(),
            });
            show(js, value, text_out);
            Ok(0)
        }
        Command::Sides { file, formula: text } => {
            let m = load_premodel(&file)?;
            let f = formula(&text, Some(m.agents()))?;
            let failures = m.check_side_conditions(&closure(&f))?;
            let text_out = if failures.is_empty() {
                "ok: side conditions hold\n".to_string()
            } else {
                failures
                    .iter()
                    .map(|x| format!("{:?} fails at {}: {}\n", x.kind, m.name(x.state), render(&x.instance)))
                    .collect()
            };
            show(js, serde_json::to_value(&failures)?, text_out);
            Ok(u8::from(!failures.is_empty()))
        }
        Command::Unravel {
            file,
            formula: text,
            seeds,
            horizon,
            margin,
            budget,
            out,
        } => {
            let m = load_premodel(&file)?;
            let f = formula(&text, Some(m.agents()))?;
            let seeds: Vec<usize> = if seeds.is_empty() {
                (0..m.len()).collect()
            } else {
                seeds
                    .iter()
                    .map(|s| m.state(s).ok_or_else(|| format!("unknown state {s}")))
                    .collect::<std::result::Result<_, _>>()?
            };
            let opts = UnravelOptions {
                horizon,
                margin,
                history_budget: budget,
            };
            let sys = unravel(&m, &closure(&f), &seeds, opts)?;
            if out.is_some() {
                eprintln!("{} histories, horizon {}", sys.len(), sys.horizon());
            }
            write_out(out.as_deref(), &sys.to_json())?;
            Ok(0)
        }
        Command::Filtrate { file, formula: text, out } => {
            let m = load_premodel(&file)?;
            let f = formula(&text, Some(m.agents()))?;
            let result = filtrate(&m, &closure(&f))?;
            if out.is_some() {
                eprintln!("{} states filtrated to {}", m.len(), result.model.len());
            }
            write_out(out.as_deref(), &result.model.to_json())?;
            Ok(0)
        }
        Command::Additive {
            file,
            horizon,
            budget,
            out,
        } => {
            let w = match load(&file, false)? {
                Model::Window(w) => w,
                Model::Lasso(s) => s.window(horizon.unwrap_or(s.horizon())),
                Model::Premodel(_) => return Err("additive expects a window or lasso file".into()),
            };
            let conv = to_additive(&w, budget)?;
            let witness = check_pmorphism(&conv.system, &w, &conv.projection)?;
            eprintln!(
                "{} histories refined to {}; p-morphism checked for {} relations, surjective: {}",
                w.len(),
                conv.system.len(),
                witness.checked_ops.len(),
                witness.surjective
            );
            write_out(out.as_deref(), &conv.system.to_json())?;
            Ok(0)
        }
        Command::Sat {
            formula: text,
            states,
            agents,
            seed,
            samples,
            emit_witness,
        } => {
            let f = formula(&text, Some(agents))?;
            let opts = search_options(states, agents, seed, samples);
            let result = sat(&f, &opts)?;
            report_search(js, "sat", &f, &result, &opts, emit_witness.as_deref())?;
            Ok(u8::from(!result.is_sat()))
        }
        Command::Valid {
            formula: text,
            states,
            agents,
            seed,
            samples,
            emit_witness,
        } => {
            let f = formula(&text, Some(agents))?;
            let opts = search_options(states, agents, seed, samples);
            let result = find_countermodel(&f, &opts)?;
            report_search(js, "valid", &f, &result, &opts, emit_witness.as_deref())?;
            Ok(u8::from(result.is_sat()))
        }
        Command::Prove {
            action: ProveAction::Check { file, agents },
        } => {
            let script = ProofScript::parse(&read(&file)?, agents)?;
            let outcome = script.check(agents);
            let conclusion = script.conclusion().map(render);
            let value = json!({
                "lines": script.len(),
                "conclusion": conclusion,
                "ok": outcome.is_ok(),
                "failure": outcome.as_ref().err(),
            });
            let text_out = match &outcome {
                Ok(()) => format!(
                    "ok: {} lines prove {}\n",
                    script.len(),
                    conclusion.as_deref().unwrap_or("nothing")
                ),
                Err(e) => format!("rejected: {e}\n"),
            };
            show(js, value, text_out);
            Ok(u8::from(outcome.is_err()))
        }
        Command::Examples {
            action: ExamplesAction::List { all },
        } => {
            let positions = corpus::hohfeld();
            let mut text_out: String = positions
                .iter()
                .map(|(p, f)| format!("{:<18} {:<40} {}\n", p.name, render(f), p.reading))
                .collect();
            let mut value = json!({
                "agents": CORPUS_AGENTS,
                "positions": positions
                    .iter()
                    .map(|(p, f)| json!({"name": p.name, "formula": render(f), "reading": p.reading}))
                    .collect::<Vec<_>>(),
            });
            if all {
                let rest: Vec<String> = corpus::FORMULAS
                    .iter()
                    .map(|s| render(&parse(s, CORPUS_AGENTS).expect("corpus parses")))
                    .collect();
                text_out.push('\n');
                text_out.extend(rest.iter().map(|s| format!("{s}\n")));
                value["formulas"] = json!(rest);
            }
            show(js, value, text_out);
            Ok(0)
        }
    }
}

fn search_options(states: usize, agents: usize, seed: u64, samples: usize) -> SatOptions {
    let mut opts = SatOptions::new(states, agents);
    opts.seed = seed;
    opts.samples = samples;
    opts
}

fn report_search(
    js: bool,
    mode: &str,
    f: &Formula,
    r: &SatResult,
    opts: &SatOptions,
    emit: Option<&Path>,
) -> Result<()> {
    let header = format!(
        "# {mode} {} states<={} agents={} seed={} samples={}\n",
        render(f),
        opts.max_states,
        opts.agents,
        r.seed,
        opts.samples
    );
    let (verdict, detail, value) = match &r.verdict {
        Verdict::Sat(w) => {
            if let Some(path) = emit {
                fs::write(path, w.system.to_json()).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            let label = if mode == "sat" { "SAT" } else { "COUNTERMODEL" };
            (
                label,
                format!(
                    "witness: {} states, satisfied at {}, {} histories unraveled\n",
                    w.model.len(),
                    w.model.name(w.state),
                    w.report.histories
                ),
                json!({
                    "states": w.model.len(),
                    "state": w.model.name(w.state),
                    "report": w.report,
                    "model": serde_json::to_value(w.model.to_file())?,
                }),
            )
        }
        Verdict::UnsatUpTo {
            bound,
            exhaustive_up_to,
        } => {
            let label = if mode == "sat" { "UNSAT-UP-TO" } else { "VALID-UP-TO" };
            (
                label,
                format!("bound {bound}, exhaustive up to {exhaustive_up_to} states\n"),
                json!({"bound": bound, "exhaustive_up_to": exhaustive_up_to}),
            )
        }
    };
    let text_out = format!("{header}{verdict}\n{detail}explored {} premodels\n", r.explored);
    show(
        js,
        json!({
            "mode": mode,
            "formula": render(f),
            "searched": render(&r.formula),
            "max_states": opts.max_states,
            "agents": opts.agents,
            "seed": r.seed,
            "samples": opts.samples,
            "verdict": verdict,
            "explored": r.explored,
            "detail": value,
        }),
        text_out,
    );
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
