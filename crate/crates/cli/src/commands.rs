use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ternflip_core::io::{parse, registry_load, registry_store, serialize, Provenance};
use ternflip_core::search::{minimize_additions, run_search};
use ternflip_core::{
    compute_invariants, lift_many, BestRegistry, BinaryScheme, LiftOutcome, Mode, Scheme,
    SearchConfig, SizePerm,
};

use crate::{Command, ModeArg, OpArg, SearchArgs};

const LIFT_UNSAT: u8 = 2;
const LIFT_BUDGET: u8 = 3;

pub fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Verify { files } => verify(&files),
        Command::Search(args) => search(args),
        Command::Minimize {
            input,
            out,
            iters,
            seed,
        } => minimize(&input, out.as_deref(), iters, seed),
        Command::Lift {
            input,
            budget,
            count,
            out,
        } => lift(&input, budget, count, out.as_deref()),
        Command::Invariants { files, json } => invariants(&files, json),
        Command::Transform {
            op,
            input,
            with,
            perm,
            out,
        } => transform(op, &input, with.as_deref(), &perm, &out),
        Command::Info { dir } => info(&dir.schemes),
    }
}

fn read_scheme(path: &Path) -> Result<Scheme> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_verified(path: &Path) -> Result<Scheme> {
    let s = read_scheme(path)?;
    if let Some(f) = s.verify().failure {
        bail!("{} does not verify: {f}", path.display());
    }
    Ok(s)
}

/// The only way schemes reach disk outside the registry store.
fn write_verified(path: &Path, s: &Scheme, provenance: Provenance) -> Result<()> {
    if let Some(f) = s.verify().failure {
        bail!("refusing to write a scheme that fails verification: {f}");
    }
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, serialize(s, Some(provenance)))
        .with_context(|| format!("writing {}", path.display()))
}

fn summary(s: &Scheme) -> String {
    format!(
        "{} rank {} complexity {}",
        s.format(),
        s.rank(),
        s.additive_complexity()
    )
}

fn verify(files: &[std::path::PathBuf]) -> Result<ExitCode> {
    let mut ok = true;
    for path in files {
        match read_scheme(path) {
            Ok(s) => match s.verify().failure {
                None => {
                    let inv = compute_invariants(&s);
                    println!(
                        "{}: ok, {}, {}",
                        path.display(),
                        summary(&s),
                        inv.fingerprint()
                    );
                }
                Some(f) => {
                    ok = false;
                    println!("{}: FAILED, {}, {f}", path.display(), summary(&s));
                }
            },
            Err(e) => {
                ok = false;
                println!("{}: FAILED, {e:#}", path.display());
            }
        }
    }
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn search(args: SearchArgs) -> Result<ExitCode> {
    let mut cfg = SearchConfig {
        population_size: args.population,
        max_iterations: args.iters,
        seed: args.seed,
        mode: match args.mode {
            ModeArg::Focused => Mode::Focused,
            ModeArg::Exploratory => Mode::Exploratory,
            ModeArg::Complexity => Mode::ComplexityMin,
        },
        max_cycles: Some(args.cycles),
        time_budget: args.time_budget.map(Duration::from_secs_f64),
        target_rank: args.target_rank,
        threads: args.threads,
        ..SearchConfig::default()
    };
    if let Some(p) = args.p_reduce {
        cfg.p_reduce = p;
    }
    if let Some(p) = args.p_expand {
        cfg.p_expand = p;
    }
    if let Some(p) = args.p_resize {
        cfg.p_resize = p;
    }
    cfg.validate()?;

    let dir = &args.dir.schemes;
    let (stored, warnings) = registry_load(dir)?;
    for w in &warnings {
        eprintln!("skipped {}: {}", w.path.display(), w.reason);
    }
    let seed_registry = if args.fresh {
        BestRegistry::new()
    } else {
        stored
    };

    let mut initial = Vec::new();
    for f in &args.formats {
        match seed_registry.get(*f) {
            Some(e) => initial.push(e.scheme.clone()),
            None => initial.push(Scheme::naive(*f)),
        }
    }
    for path in &args.from {
        initial.push(read_verified(path)?);
    }
    if initial.is_empty() {
        bail!("nothing to search: give --format or --from");
    }

    let provenance = Provenance::new("search", Some(args.seed));
    let outcome = run_search(&cfg, &initial, seed_registry, |report, registry| {
        let written = registry_store(dir, registry, Some(provenance.clone()))?;
        let best: Vec<String> = initial
            .iter()
            .filter_map(|s| report.best.iter().find(|b| b.0 == s.format()))
            .map(|(f, r, c)| format!("{f}:{r} c{c}"))
            .collect();
        eprintln!(
            "cycle {} ({:.1}s): {} formats, {} | {} new files",
            report.cycle,
            report.elapsed.as_secs_f64(),
            report.best.len(),
            best.join(", "),
            written.len()
        );
        Ok(())
    })?;

    for (f, e) in outcome.registry.iter() {
        if initial.iter().any(|s| s.format() == *f) || cfg.mode == Mode::Exploratory {
            println!("{f} rank {} complexity {}", e.rank, e.complexity);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn minimize(input: &Path, out: Option<&Path>, iters: usize, seed: u64) -> Result<ExitCode> {
    let s = read_verified(input)?;
    let cfg = SearchConfig {
        max_iterations: iters,
        seed,
        ..SearchConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let best = minimize_additions(&s, &cfg, &mut rng);
    let line = format!(
        "{} rank {}: complexity {} -> {}",
        s.format(),
        s.rank(),
        s.additive_complexity(),
        best.additive_complexity()
    );
    let provenance = Provenance::new("minimize", Some(seed));
    match out {
        Some(path) => {
            write_verified(path, &best, provenance)?;
            println!("{line}");
        }
        None => {
            eprintln!("{line}");
            print!("{}", serialize(&best, Some(provenance)));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn lift(input: &Path, budget: u64, count: usize, out: Option<&Path>) -> Result<ExitCode> {
    let b = BinaryScheme::from_scheme(&read_scheme(input)?);
    let found = match lift_many(&b, budget, count)? {
        LiftOutcome::Lifted(found) => found,
        LiftOutcome::Unsat => {
            println!("{}: no ternary lift exists", input.display());
            return Ok(ExitCode::from(LIFT_UNSAT));
        }
        LiftOutcome::BudgetExhausted => {
            println!("{}: node budget of {budget} exhausted", input.display());
            return Ok(ExitCode::from(LIFT_BUDGET));
        }
    };
    let provenance = Provenance::new("lift", None);
    match out {
        Some(path) if count > 1 => {
            for (k, s) in found.iter().enumerate() {
                write_verified(&path.join(format!("lift{k}.json")), s, provenance.clone())?;
            }
            println!(
                "{}: {} lift(s) written to {}",
                input.display(),
                found.len(),
                path.display()
            );
        }
        Some(path) => {
            write_verified(path, &found[0], provenance)?;
            println!("{}: lifted, {}", input.display(), summary(&found[0]));
        }
        None => {
            for s in &found {
                if let Some(f) = s.verify().failure {
                    bail!("lift failed verification: {f}");
                }
                print!("{}", serialize(s, Some(provenance.clone())));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn invariants(files: &[std::path::PathBuf], json: bool) -> Result<ExitCode> {
    for path in files {
        let s = read_scheme(path)?;
        let report = compute_invariants(&s);
        if json {
            println!("{}", serde_json::to_string(&report)?);
        } else {
            println!(
                "{}: {} {}",
                path.display(),
                s.format(),
                report.fingerprint()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_perm(text: &str) -> Result<SizePerm> {
    let digits: Vec<usize> = text
        .chars()
        .filter(|c| !matches!(c, ',' | ' '))
        .map(|c| c.to_digit(10).map(|d| d as usize))
        .collect::<Option<_>>()
        .with_context(|| format!("bad permutation {text:?}"))?;
    let mut sorted = digits.clone();
    sorted.sort_unstable();
    if sorted != [0, 1, 2] {
        bail!("{text:?} is not a permutation of 0, 1, 2");
    }
    Ok([digits[0], digits[1], digits[2]])
}

fn transform(
    op: OpArg,
    input: &Path,
    with: Option<&Path>,
    perm: &str,
    out: &Path,
) -> Result<ExitCode> {
    let s = read_verified(input)?;
    let second = || -> Result<Scheme> {
        let path = with.context("this operator needs a second scheme (--with)")?;
        read_verified(path)
    };
    let result = match op {
        OpArg::Project => s.project()?,
        OpArg::Extend => s.extend()?,
        OpArg::Double => s.double()?,
        OpArg::Swap => s.swap_sizes(parse_perm(perm)?)?,
        OpArg::Product => s.product(&second()?)?,
        OpArg::Merge => s.merge(&second()?)?,
        OpArg::Block => s.block_compose()?,
    };
    let name = format!("{op:?}").to_lowercase();
    write_verified(
        out,
        &result,
        Provenance::new(format!("transform {name}"), None),
    )?;
    println!("{name}: {} -> {}", summary(&s), summary(&result));
    Ok(ExitCode::SUCCESS)
}

fn info(dir: &Path) -> Result<ExitCode> {
    let (registry, warnings) = registry_load(dir)?;
    println!(
        "{:<10} {:>5} {:>11} {:>6}",
        "format", "rank", "complexity", "naive"
    );
    for (f, e) in registry.iter() {
        println!(
            "{:<10} {:>5} {:>11} {:>6}",
            f.to_string(),
            e.rank,
            e.complexity,
            f.naive_rank()
        );
    }
    for w in &warnings {
        println!("skipped {}: {}", w.path.display(), w.reason);
    }
    Ok(ExitCode::SUCCESS)
}
