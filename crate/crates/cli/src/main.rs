use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use sigcomp::harness::report::{status_text, CSV_HEADER};
use sigcomp::harness::{
    ex51_certificate, generate_random, named_instance, run_ratio_experiment, run_sweep, Instance,
    SweepConfig,
};
use sigcomp::rational::{self, Rational};
use sigcomp::{
    analyze_monopoly, best_response_dynamics, buyer_utility, check_monopoly_bounds, compute_opt,
    enumerate_subgame_nash, monopoly_rows, seller_utility, social_welfare, verify_spe_certificate,
    BuyerAssignment, Budget, SellerProfile, SpeCertificate, SpeSearch, Verdict, Violation,
};

#[derive(Parser)]
#[command(name = "sigcomp", version, about = "Signalling competition solver and bound checker")]
struct Cli {
    /// Largest number of seller profiles (Bell(G)^S) an exhaustive search may visit.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    budget_profiles: u128,
    /// Largest number of buyer assignments (S^B) per subgame.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    budget_assignments: u128,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run best-response dynamics in the buyer subgame of a seller profile.
    SolveSubgame {
        /// Instance file, `-` for stdin, or `named:<name>`.
        instance: String,
        /// Seller partitions, e.g. `0,1|2;0|1|2`.
        #[arg(long)]
        profile: String,
        /// Starting assignment, e.g. `0,0,1`; all buyers at seller 0 by default.
        #[arg(long)]
        start: Option<String>,
        /// List every pure Nash assignment instead.
        #[arg(long)]
        all: bool,
    },
    /// Search all pure seller profiles for subgame-perfect equilibria.
    FindSpe {
        instance: String,
        /// Write the certificate of equilibrium number `--index` here.
        #[arg(long)]
        certificate: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
    /// Check an equilibrium certificate against an instance.
    VerifyCert { instance: String, certificate: PathBuf },
    /// Single-seller landscape and welfare bounds.
    Monopoly { instance: String },
    /// Maximum social welfare.
    Opt { instance: String },
    /// Compare competition with monopoly and check every applicable bound.
    Ratio { instance: String },
    /// Print a random instance.
    Gen {
        #[arg(long)]
        buyers: usize,
        #[arg(long)]
        goods: usize,
        #[arg(long, default_value_t = 2)]
        sellers: usize,
        #[arg(long, default_value = "1/2")]
        density: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        positive_demand: bool,
    },
    /// Print a named instance, or with `--certificate` its hand-built equilibrium.
    Named {
        name: String,
        #[arg(long)]
        certificate: bool,
    },
    /// Check the bounds on every small matrix and on seeded random instances.
    Sweep {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "1/2")]
        density: String,
        /// Exhaustive part covers matrices with B*G up to this.
        #[arg(long, default_value_t = 12)]
        max_cells: usize,
        #[arg(long, default_value_t = 500)]
        random: usize,
    },
}

enum Failure {
    Input(String),
    Budget(String),
}

impl From<sigcomp::Error> for Failure {
    fn from(e: sigcomp::Error) -> Self {
        if e.is_budget() {
            Failure::Budget(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = Budget {
        profiles: cli.budget_profiles,
        assignments: cli.budget_assignments,
        ..Budget::default()
    };
    let mut out = io::stdout().lock();
    let result = run(&cli, &budget, &mut out);
    let _ = out.flush();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(message)) => {
            eprintln!("budget exceeded: {message}");
            ExitCode::from(3)
        }
    }
}

fn load(source: &str) -> Result<Instance, Failure> {
    if let Some(name) = source.strip_prefix("named:") {
        return Ok(named_instance(name)?);
    }
    let text = if source == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::Input(format!("reading stdin: {e}")))?;
        text
    } else {
        read(Path::new(source))?
    };
    Ok(Instance::parse(&text)?)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn text(r: &Rational) -> String {
    rational::to_text(r)
}

fn emit(out: &mut impl Write, s: impl AsRef<str>) -> Result<(), Failure> {
    out.write_all(s.as_ref().as_bytes())
        .map_err(|e| Failure::Input(format!("writing output: {e}")))
}

fn run(cli: &Cli, budget: &Budget, out: &mut impl Write) -> Outcome {
    match &cli.command {
        Command::SolveSubgame {
            instance,
            profile,
            start,
            all,
        } => solve_subgame(cli.format, budget, &load(instance)?, profile, start.as_deref(), *all, out),
        Command::FindSpe {
            instance,
            certificate,
            index,
        } => find_spe(cli.format, budget, &load(instance)?, certificate.as_deref(), *index, out),
        Command::VerifyCert {
            instance,
            certificate,
        } => verify_cert(cli.format, &load(instance)?, certificate, out),
        Command::Monopoly { instance } => monopoly(cli.format, budget, &load(instance)?, out),
        Command::Opt { instance } => {
            let x = load(instance)?;
            let opt = compute_opt(&x.valuation, x.sellers, budget)?;
            match cli.format {
                Format::Json => emit(out, format!("{}\n", json!({ "opt": text(&opt) })))?,
                Format::Csv => emit(out, format!("opt\n{}\n", text(&opt)))?,
                Format::Table => emit(out, format!("{}\n", text(&opt)))?,
            }
            Ok(true)
        }
        Command::Ratio { instance } => {
            let report = run_ratio_experiment(&load(instance)?, budget);
            match cli.format {
                Format::Table => emit(out, report.table())?,
                Format::Csv => emit(out, format!("{CSV_HEADER}\n{}\n", report.csv_row()))?,
                Format::Json => emit(out, format!("{}\n", report.to_json()))?,
            }
            if report.has_failure() {
                return Ok(false);
            }
            if !report.budget_skips.is_empty() {
                return Err(Failure::Budget(report.budget_skips.join("; ")));
            }
            Ok(true)
        }
        Command::Gen {
            buyers,
            goods,
            sellers,
            density,
            seed,
            positive_demand,
        } => {
            let density = rational::parse(density)?;
            let x = generate_random(*buyers, *goods, *sellers, density, *seed, *positive_demand)?;
            emit(out, x.emit())?;
            Ok(true)
        }
        Command::Named { name, certificate } => {
            let x = named_instance(name)?;
            if *certificate {
                if !x.label.as_deref().unwrap_or("").starts_with("ex51(") {
                    return Err(Failure::Input(
                        "only ex51 instances come with a hand-built certificate".into(),
                    ));
                }
                let cert = ex51_certificate(x.goods(), x.sellers)?;
                emit(out, cert.to_json(&x.hash()))?;
            } else {
                emit(out, x.emit())?;
            }
            Ok(true)
        }
        Command::Sweep {
            seed,
            density,
            max_cells,
            random,
        } => {
            let config = SweepConfig {
                max_cells: *max_cells,
                random_instances: *random,
                seed: *seed,
                density: rational::parse(density)?,
                budget: *budget,
                ..SweepConfig::default()
            };
            if cli.format == Format::Csv {
                emit(out, format!("{CSV_HEADER}\n"))?;
            }
            let mut write_error = None;
            let summary = run_sweep(&config, |report| {
                if cli.format == Format::Csv && write_error.is_none() {
                    write_error = writeln!(out, "{}", report.csv_row()).err();
                }
            })?;
            if let Some(e) = write_error {
                return Err(Failure::Input(format!("writing output: {e}")));
            }
            match cli.format {
                Format::Table => emit(out, summary.table())?,
                Format::Json => emit(
                    out,
                    format!(
                        "{}\n",
                        serde_json::to_string_pretty(&summary).expect("summary serializes")
                    ),
                )?,
                Format::Csv => eprint!("{}", summary.table()),
            }
            Ok(summary.passed())
        }
    }
}

fn solve_subgame(
    format: Format,
    budget: &Budget,
    x: &Instance,
    profile: &str,
    start: Option<&str>,
    all: bool,
    out: &mut impl Write,
) -> Outcome {
    let v = &x.valuation;
    let profile = SellerProfile::parse(profile, v.num_goods())?;
    let sellers = profile.num_sellers();
    if all {
        let list = enumerate_subgame_nash(v, &profile, budget)?;
        let rows: Vec<(String, Rational)> = list
            .iter()
            .map(|a| Ok((a.to_string(), social_welfare(v, &profile, a)?)))
            .collect::<Result<_, sigcomp::Error>>()?;
        match format {
            Format::Json => {
                let items: Vec<_> = rows
                    .iter()
                    .map(|(a, sw)| json!({ "assignment": a, "welfare": text(sw) }))
                    .collect();
                emit(out, format!("{}\n", serde_json::to_string_pretty(&items).unwrap()))?;
            }
            Format::Csv => {
                emit(out, "assignment,welfare\n")?;
                for (a, sw) in &rows {
                    emit(out, format!("\"{a}\",{}\n", text(sw)))?;
                }
            }
            Format::Table => {
                emit(out, format!("pure Nash assignments: {}\n", rows.len()))?;
                for (a, sw) in &rows {
                    emit(out, format!("{a}  sw={}\n", text(sw)))?;
                }
            }
        }
        return Ok(true);
    }
    let start = match start {
        Some(s) => BuyerAssignment::parse(s, sellers)?,
        None => BuyerAssignment::all_to(v.num_buyers(), 0),
    };
    let result = best_response_dynamics(v, &profile, &start)?;
    let a = &result.assignment;
    let sw = social_welfare(v, &profile, a)?;
    let revenue = (0..sellers)
        .map(|s| seller_utility(v, &profile, a, s).map(|r| text(&r)))
        .collect::<Result<Vec<_>, _>>()?;
    let utility = (0..v.num_buyers())
        .map(|b| buyer_utility(v, &profile, a, b).map(|u| text(&u)))
        .collect::<Result<Vec<_>, _>>()?;
    match format {
        Format::Json => {
            let doc = json!({
                "profile": profile.to_string(),
                "assignment": a.to_string(),
                "is_nash": result.is_nash,
                "steps": result.steps,
                "potential": text(&result.potential),
                "welfare": text(&sw),
                "seller_revenue": revenue,
                "buyer_utility": utility,
            });
            emit(out, format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))?;
        }
        Format::Csv => {
            emit(out, "assignment,is_nash,steps,potential,welfare\n")?;
            emit(
                out,
                format!(
                    "\"{a}\",{},{},{},{}\n",
                    result.is_nash,
                    result.steps,
                    text(&result.potential),
                    text(&sw)
                ),
            )?;
        }
        Format::Table => {
            emit(
                out,
                format!(
                    "assignment  {a}\nis_nash     {}\nsteps       {}\npotential   {}\nwelfare     {}\nrevenue     {}\nutility     {}\n",
                    result.is_nash,
                    result.steps,
                    text(&result.potential),
                    text(&sw),
                    revenue.join(" "),
                    utility.join(" ")
                ),
            )?;
        }
    }
    Ok(result.is_nash)
}

fn find_spe(
    format: Format,
    budget: &Budget,
    x: &Instance,
    certificate: Option<&Path>,
    index: usize,
    out: &mut impl Write,
) -> Outcome {
    let search = SpeSearch::run(&x.valuation, x.sellers, budget)?;
    let found = search.equilibria();
    let rows: Vec<(String, String, Rational)> = found
        .iter()
        .map(|r| {
            (
                search.profile(r.profile_index).to_string(),
                search.on_path_assignment(r.profile_index).to_string(),
                r.welfare,
            )
        })
        .collect();
    match format {
        Format::Json => {
            let items: Vec<_> = rows
                .iter()
                .map(|(p, a, sw)| json!({ "profile": p, "assignment": a, "welfare": text(sw) }))
                .collect();
            let doc = json!({ "profiles_searched": search.profile_count(), "equilibria": items });
            emit(out, format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))?;
        }
        Format::Csv => {
            emit(out, "profile,assignment,welfare\n")?;
            for (p, a, sw) in &rows {
                emit(out, format!("\"{p}\",\"{a}\",{}\n", text(sw)))?;
            }
        }
        Format::Table => {
            emit(
                out,
                format!(
                    "{} pure equilibria among {} seller profiles\n",
                    rows.len(),
                    search.profile_count()
                ),
            )?;
            for (p, a, sw) in &rows {
                emit(out, format!("{p:<24} buyers {a:<16} sw={}\n", text(sw)))?;
            }
        }
    }
    if let Some(path) = certificate {
        let Some(record) = found.get(index) else {
            return Err(Failure::Input(format!(
                "no equilibrium number {index}; {} found",
                found.len()
            )));
        };
        let cert = search.certificate(record.profile_index);
        fs::write(path, cert.to_json(&x.hash()))
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    }
    Ok(true)
}

fn verify_cert(format: Format, x: &Instance, path: &Path, out: &mut impl Write) -> Outcome {
    let (cert, hash) = SpeCertificate::from_json(&read(path)?, x.goods())?;
    if hash != x.hash() {
        return Err(Failure::Input(format!(
            "certificate is for instance {hash}, not {}",
            x.hash()
        )));
    }
    if cert.sellers() != x.sellers {
        return Err(Failure::Input(format!(
            "certificate has {} sellers, instance has {}",
            cert.sellers(),
            x.sellers
        )));
    }
    let verdict = verify_spe_certificate(&x.valuation, &cert)?;
    match format {
        Format::Json => {
            let doc = json!({ "passed": verdict.passed(), "violations": verdict.violations });
            emit(out, format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))?;
        }
        Format::Csv => {
            emit(out, "kind,profile,who,from,to,delta\n")?;
            for v in &verdict.violations {
                emit(out, format!("{}\n", violation_csv(v)))?;
            }
        }
        Format::Table => {
            if verdict.passed() {
                emit(out, format!("pass: {} table entries checked\n", cert.strategy.len()))?;
            } else {
                emit(out, format!("fail: {} violations\n", verdict.violations.len()))?;
                for v in &verdict.violations {
                    emit(out, format!("{}\n", violation_text(v)))?;
                }
            }
        }
    }
    Ok(verdict.passed())
}

fn violation_text(v: &Violation) -> String {
    match v {
        Violation::Buyer {
            profile,
            buyer,
            from,
            to,
            delta,
        } => format!("buyer {buyer} gains {} moving {from} -> {to} after {profile}", text(delta)),
        Violation::Seller {
            seller,
            deviation,
            delta,
        } => format!("seller {seller} gains {} deviating to {deviation}", text(delta)),
    }
}

fn violation_csv(v: &Violation) -> String {
    match v {
        Violation::Buyer {
            profile,
            buyer,
            from,
            to,
            delta,
        } => format!("buyer,\"{profile}\",{buyer},{from},{to},{}", text(delta)),
        Violation::Seller {
            seller,
            deviation,
            delta,
        } => format!("seller,\"{deviation}\",{seller},,,{}", text(delta)),
    }
}

fn monopoly(format: Format, budget: &Budget, x: &Instance, out: &mut impl Write) -> Outcome {
    let v = &x.valuation;
    let analysis = analyze_monopoly(v, budget)?;
    let rows = monopoly_rows(v, budget)?;
    let verdicts = check_monopoly_bounds(&analysis, &v.demand_profile());
    match format {
        Format::Json => {
            let doc = json!({ "analysis": analysis, "rows": rows, "verdicts": verdicts });
            emit(out, format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))?;
        }
        Format::Csv => {
            emit(out, "partition,revenue,welfare,revenue_optimal,welfare_best\n")?;
            for r in &rows {
                emit(
                    out,
                    format!(
                        "\"{}\",{},{},{},{}\n",
                        r.partition,
                        text(&r.revenue),
                        text(&r.welfare),
                        r.revenue_optimal,
                        r.welfare_best
                    ),
                )?;
            }
        }
        Format::Table => {
            emit(out, format!("{:<24} {:>8} {:>8}  flags\n", "partition", "revenue", "welfare"))?;
            for r in &rows {
                let flags = match (r.revenue_optimal, r.welfare_best) {
                    (true, true) => "optimal best",
                    (true, false) => "optimal",
                    _ => "",
                };
                emit(
                    out,
                    format!(
                        "{:<24} {:>8} {:>8}  {flags}\n",
                        r.partition.to_string(),
                        text(&r.revenue),
                        text(&r.welfare)
                    ),
                )?;
            }
            emit(
                out,
                format!(
                    "max revenue {}  welfare among maximizers [{}, {}]  opt {}\n",
                    text(&analysis.max_revenue),
                    text(&analysis.worst_welfare),
                    text(&analysis.best_welfare),
                    text(&analysis.opt)
                ),
            )?;
            for verdict in &verdicts {
                emit(out, format!("{}\n", verdict_line(verdict)))?;
            }
        }
    }
    Ok(!verdicts.iter().any(Verdict::failed))
}

fn verdict_line(v: &Verdict) -> String {
    match (v.lhs, v.rhs) {
        (Some(l), Some(r)) => format!(
            "{:<5} {:<24} {} {} {}",
            status_text(v.status),
            v.name,
            text(&l),
            v.relation.symbol(),
            text(&r)
        ),
        _ => format!("{:<5} {:<24} {}", status_text(v.status), v.name, v.note),
    }
}
