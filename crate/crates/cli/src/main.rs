use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use snni_core::basis::{build_ubrg_with, Limits};
use snni_core::dot::{export_dot, GraphRef};
use snni_core::oracle::{reachability_graph, DEFAULT_CAP};
use snni_core::random::{random_verified_net, RandomNetParams};
use snni_core::verifier::{build_closed_sv_with, build_sv_with};
use snni_core::{
    build_brg, check_assumptions, fixtures, minimal_e_vectors, net::word_string, parse_net, snni_oracle,
    AnalysisReport, Boundedness, LabeledPetriNet, Marking, VerifiedNet,
};

#[derive(Parser)]
#[command(
    name = "snni",
    version,
    about = "Decide strong non-deterministic non-interference of labeled Petri nets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verifier pipeline and print the analysis report.
    Check(ReportArgs),
    /// Decide SNNI by brute-force language comparison.
    Oracle(ReportArgs),
    /// Report net statistics and the two standing assumptions.
    Info(ReportArgs),
    /// Minimal explanations of an explicit transition at a marking.
    Explain {
        #[command(flatten)]
        args: ReportArgs,
        /// Explicit transition to explain.
        #[arg(long)]
        transition: String,
        /// Marking as space- or comma-separated token counts; defaults to the initial marking.
        #[arg(long)]
        marking: Option<String>,
    },
    /// Export the basis reachability graph as DOT.
    Brg(Input),
    /// Export the unfolded basis reachability graph as DOT.
    Ubrg(Input),
    /// Export the verifier tree as DOT.
    Sv {
        #[command(flatten)]
        input: Input,
        /// Export the pairwise verifier (one low marking per node) instead.
        #[arg(long)]
        pairwise: bool,
    },
    /// Export the reachability graph as DOT.
    Reach(Input),
}

#[derive(Args)]
struct Input {
    /// Net document path, or a bundled fixture name (fig1, fig6, unbounded).
    #[arg(long, required_unless_present = "seed", conflicts_with = "seed")]
    net: Option<String>,
    /// Use the random net drawn from this seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Maximum number of markings explored when checking boundedness.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Node budget for the unfolding and verifier trees.
    #[arg(long, default_value_t = Limits::default().max_nodes)]
    max_nodes: usize,
    /// Write output to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    #[value(alias = "machine-readable")]
    Json,
}

impl Input {
    fn load(&self) -> Result<LabeledPetriNet> {
        if let Some(seed) = self.seed {
            return Ok(random_verified_net(seed, &RandomNetParams::default()).0.into_inner());
        }
        let name = self.net.as_deref().expect("clap enforces --net or --seed");
        let path = PathBuf::from(name);
        if path.exists() {
            let bytes = fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
            return parse_net(&bytes).with_context(|| format!("loading {}", path.display()));
        }
        match fixtures::by_name(name) {
            Some(net) => Ok(net),
            None => bail!("`{name}` is neither a readable file nor a bundled fixture (fig1, fig6, unbounded)"),
        }
    }

    fn verified(&self) -> Result<VerifiedNet> {
        Ok(VerifiedNet::new(self.load()?, self.cap)?)
    }

    fn limits(&self) -> Limits {
        Limits {
            max_nodes: self.max_nodes,
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn verdict_code(snni: bool) -> u8 {
    if snni {
        0
    } else {
        1
    }
}

fn pretty(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn check(args: &ReportArgs) -> Result<u8> {
    let report = AnalysisReport::run(args.input.load()?, args.input.cap, args.input.limits())?;
    let text = match args.format {
        Format::Text => report.to_string(),
        Format::Json => pretty(&report),
    };
    args.input.emit(&text)?;
    Ok(verdict_code(report.snni))
}

fn oracle(args: &ReportArgs) -> Result<u8> {
    let net = args.input.verified()?;
    let verdict = snni_oracle(&net, args.input.cap)?;
    let text = match args.format {
        Format::Text => {
            let mut s = format!("verdict: {}\n", if verdict.snni { "SNNI" } else { "NotSNNI" });
            if let Some(w) = &verdict.counterexample {
                let _ = writeln!(s, "counterexample: \"{}\"", word_string(w));
            }
            let _ = writeln!(
                s,
                "reachable markings: {}\nlow reachable markings: {}",
                verdict.reachable_markings, verdict.low_reachable_markings
            );
            s
        }
        Format::Json => pretty(&verdict),
    };
    args.input.emit(&text)?;
    Ok(verdict_code(verdict.snni))
}

fn info(args: &ReportArgs) -> Result<u8> {
    let net = args.input.load()?;
    let report = check_assumptions(&net, args.input.cap);
    let text = match args.format {
        Format::Text => {
            let mut s = String::new();
            let pn = net.net();
            let _ = writeln!(s, "places: {}", pn.place_count());
            let _ = writeln!(s, "transitions: {}", pn.transition_count());
            let _ = writeln!(s, "low: {}", net.names(net.low()).join(" "));
            let _ = writeln!(s, "high: {}", net.names(net.high()).join(" "));
            let _ = writeln!(s, "initial marking: {}", pn.initial_marking());
            let bounded = match &report.bounded {
                Boundedness::Bounded { reachable_markings } => {
                    format!("yes ({reachable_markings} reachable markings)")
                }
                Boundedness::Unbounded {
                    path,
                    dominated,
                    dominating,
                    ..
                } => format!("no ({} reaches {dominating} > {dominated})", path.join(" ")),
                Boundedness::Unknown { cap } => format!("unknown (cap {cap} exhausted)"),
            };
            let _ = writeln!(s, "bounded: {bounded}");
            let acyclic = match &report.implicit_cycle {
                None => "yes".to_owned(),
                Some(cycle) => format!("no ({})", cycle.join(" -> ")),
            };
            let _ = writeln!(s, "implicit subnet acyclic: {acyclic}");
            s
        }
        Format::Json => pretty(&report),
    };
    args.input.emit(&text)?;
    Ok(if report.holds() { 0 } else { 2 })
}

fn parse_marking(text: &str, places: usize) -> Result<Marking> {
    let tokens = text
        .trim_matches(|c| c == '[' || c == ']')
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<u32>().with_context(|| format!("bad token count `{s}`")))
        .collect::<Result<Vec<u32>>>()?;
    if tokens.len() != places {
        bail!("marking has {} entries, net has {places} places", tokens.len());
    }
    Ok(Marking::new(tokens))
}

fn explain(args: &ReportArgs, transition: &str, marking: Option<&str>) -> Result<u8> {
    let net = args.input.verified()?;
    let pn = net.net();
    let t = pn.transition_id(transition)?;
    let m = match marking {
        Some(text) => parse_marking(text, pn.place_count())?,
        None => pn.initial_marking().clone(),
    };
    let y = minimal_e_vectors(&net, &m, t)?;
    let text = match args.format {
        Format::Text => {
            let mut s = format!("Y_min({m}, {transition}) over [{}]:\n", net.names(net.high()).join(" "));
            if y.is_empty() {
                s.push_str("  (none)\n");
            }
            for (v, seq) in &y.witnesses {
                let witness = if seq.is_empty() {
                    "ε".to_owned()
                } else {
                    net.names(seq).join(" ")
                };
                let _ = writeln!(s, "  {v}  via {witness}");
            }
            s
        }
        Format::Json => {
            let entries: Vec<_> = y
                .witnesses
                .iter()
                .map(|(v, seq)| json!({ "evector": v.counts(), "witness": net.names(seq) }))
                .collect();
            pretty(&json!({
                "marking": m.tokens(),
                "transition": transition,
                "implicit": net.names(net.high()),
                "explanations": entries,
            }))
        }
    };
    args.input.emit(&text)?;
    Ok(0)
}

fn export(input: &Input, graph: impl FnOnce(&VerifiedNet) -> Result<String>) -> Result<u8> {
    let net = input.verified()?;
    input.emit(&graph(&net)?)?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match &cli.command {
        Command::Check(args) => check(args),
        Command::Oracle(args) => oracle(args),
        Command::Info(args) => info(args),
        Command::Explain {
            args,
            transition,
            marking,
        } => explain(args, transition, marking.as_deref()),
        Command::Brg(input) => export(input, |net| Ok(export_dot(net, GraphRef::Brg(&build_brg(net))))),
        Command::Ubrg(input) => export(input, |net| {
            let ubrg = build_ubrg_with(net, input.limits())?;
            Ok(export_dot(net, GraphRef::Ubrg(&ubrg)))
        }),
        Command::Sv { input, pairwise } => export(input, |net| {
            let ubrg = build_ubrg_with(net, input.limits())?;
            if *pairwise {
                let sv = build_sv_with(net, &ubrg, input.limits())?;
                Ok(export_dot(net, GraphRef::Sv(&sv, &ubrg)))
            } else {
                let sv = build_closed_sv_with(net, &ubrg, input.limits())?;
                Ok(export_dot(net, GraphRef::ClosedSv(&sv, &ubrg)))
            }
        }),
        Command::Reach(input) => export(input, |net| {
            let reach = reachability_graph(net, input.cap)?;
            Ok(export_dot(net, GraphRef::Reach(&reach)))
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
