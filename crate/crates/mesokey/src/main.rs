use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mesokey::analysis::{eavesdropper_ber, receiver_ber};
use mesokey::config::ConfigFile;
use mesokey::entropy::OsEntropy;
use mesokey::keyfile::{format_key, parse_key, parse_seed, read_key, write_key};
use mesokey::table::{curve_csv, curve_json, format_sig12};
use mesokey::transcript::{transcript_lines, write_jsonl};
use mesokey::{parallel, CliError, CliResult};
use mesokey_core::bits::BitSequence;
use mesokey_core::channel::{BerEstimate, ChannelModel, Strategy};
use mesokey_core::helstrom::{information_balance, repetition_equivalent_pe};
use mesokey_core::mry::{
    angle_sigma, bases_within_sigma, heisenberg_min_bases, key_bits_per_basis, phase_bounds,
    repeated_bit_rate, repetition_adjusted_bases,
};
use mesokey_core::protocol::distill::{privacy_amplify, verification_digest};
use mesokey_core::protocol::{CipherMode, ProtocolConfig, ProtocolSession, SimulationSeeds, Transcript};
use mesokey_core::rng::{PhysicalRandom, SeededPhrg};
use mesokey_core::SystemParams;
use serde_json::json;

/// Photon numbers at or above this need `--allow-heavy` for error-probability
/// computations.
const HEAVY_PHOTON_NUMBER: f64 = 1000.0;

#[derive(Parser)]
#[command(name = "mesokey", version, about = "Coherent-state M-ry key distribution laboratory")]
struct Cli {
    /// Worker threads for parallel computations (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eavesdropper minimum error probability against M (CSV `M,n,pe`).
    PeCurve(CurveArgs),
    /// Same as pe-curve plus Eve's mutual information (CSV `M,n,pe,mi`).
    MiCurve(CurveArgs),
    /// Phase-resolution limits, wheel coverage and repetition cost.
    Bounds(BoundsArgs),
    /// Run the chained protocol with an eavesdropper tap.
    Simulate(SimulateArgs),
    /// Verification digest and privacy amplification of a key file.
    Distill(DistillArgs),
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Args)]
struct CurveArgs {
    /// Mean photon number per pulse.
    #[arg(long)]
    n: f64,
    /// M range `a..b` (inclusive) or a single value; overrides --m-min/--m-max.
    #[arg(long)]
    m: Option<String>,
    #[arg(long, default_value_t = 1)]
    m_min: u32,
    #[arg(long)]
    m_max: Option<u32>,
    #[arg(long, default_value_t = 1)]
    step: u32,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Permit n >= 1000 (large matrices, slow).
    #[arg(long)]
    allow_heavy: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    n: f64,
    #[arg(long)]
    m: u32,
    /// Repetitions per bit (default 1; the speed-cost section defaults to 2·K_M).
    #[arg(long)]
    r: Option<u32>,
    /// Line transmittance.
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    /// Unrepeated bit rate in GHz, for the speed-cost figure.
    #[arg(long, default_value_t = 10.0)]
    base_rate_ghz: f64,
    #[arg(long)]
    allow_heavy: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum EveChoice {
    Nearest,
    Map,
    Keyed,
    All,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum ModeChoice {
    Block,
    Lfsr,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum EntropyChoice {
    Seeded,
    Os,
}

#[derive(Args)]
struct SimulateArgs {
    /// Flat key=value file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<f64>,
    #[arg(long)]
    m: Option<u32>,
    /// Sequence length; must be a multiple of ceil(log2 M).
    #[arg(long)]
    l0: Option<usize>,
    #[arg(long)]
    cycles: Option<u64>,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long)]
    eta: Option<f64>,
    /// Master seed (hex).
    #[arg(long)]
    seed: Option<String>,
    /// Starting key as hex (`[bits:]digits`); default derived from the seed.
    #[arg(long)]
    k0: Option<String>,
    #[arg(long, value_enum)]
    eve: Option<EveChoice>,
    /// Let Eve replay her records with the key after the fact.
    #[arg(long)]
    reveal_key: bool,
    #[arg(long, value_enum)]
    mode: Option<ModeChoice>,
    /// Digest bits compared per cycle (0 disables verification).
    #[arg(long)]
    verify_bits: Option<usize>,
    /// Output length of privacy amplification as a fraction of L0.
    #[arg(long)]
    distill_ratio: Option<f64>,
    /// Remove channel noise.
    #[arg(long)]
    noiseless: bool,
    #[arg(long, value_enum)]
    entropy: Option<EntropyChoice>,
    /// Write the per-cycle transcript (JSON lines).
    #[arg(long)]
    transcript: Option<PathBuf>,
    /// Write station A's distilled key.
    #[arg(long)]
    key_out: Option<PathBuf>,
    #[arg(long)]
    allow_heavy: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
}

#[derive(Args)]
struct DistillArgs {
    /// Key file (`[bits:]hex`).
    #[arg(long)]
    input: PathBuf,
    /// Output length as a fraction of the input length.
    #[arg(long)]
    ratio: f64,
    /// Public hash seed (hex).
    #[arg(long, default_value = "0")]
    hash_seed: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 64)]
    check_bits: usize,
    /// Digest (hex) the input must reproduce; mismatch aborts.
    #[arg(long)]
    reference_digest: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::validation("--threads must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::validation(format!("cannot configure thread pool: {e}")))?;
    }
    match cli.command {
        Command::PeCurve(args) => curve(args, false),
        Command::MiCurve(args) => curve(args, true),
        Command::Bounds(args) => bounds(args),
        Command::Simulate(args) => simulate(args),
        Command::Distill(args) => distill(args),
    }
}

fn check_photon_number(n: f64) -> CliResult<()> {
    if !(n.is_finite() && n > 0.0) {
        return Err(CliError::validation(format!("n must be a positive number, got {n}")));
    }
    Ok(())
}

fn check_heavy(n: f64, allow_heavy: bool) -> CliResult<()> {
    if n >= HEAVY_PHOTON_NUMBER && !allow_heavy {
        return Err(CliError::validation(format!(
            "n = {n} needs --allow-heavy (large truncated basis)"
        )));
    }
    Ok(())
}

fn parse_m_range(text: &str) -> CliResult<(u32, u32)> {
    let bad = || CliError::validation(format!("bad M range '{text}' (expected a..b or a single value)"));
    match text.split_once("..") {
        Some((a, b)) => Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)),
        None => {
            let m = text.trim().parse().map_err(|_| bad())?;
            Ok((m, m))
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn curve(args: CurveArgs, with_mi: bool) -> CliResult<ExitCode> {
    check_photon_number(args.n)?;
    check_heavy(args.n, args.allow_heavy)?;
    let (m_min, m_max) = match &args.m {
        Some(range) => parse_m_range(range)?,
        None => (args.m_min, args.m_max.unwrap_or(args.m_min)),
    };
    if m_min < 1 {
        return Err(CliError::validation("M must be >= 1"));
    }
    if args.step < 1 {
        return Err(CliError::validation("step must be >= 1"));
    }
    if m_max < m_min {
        return Err(CliError::validation(format!("empty M range {m_min}..{m_max}")));
    }
    let ms: Vec<u32> = (m_min..=m_max).step_by(args.step as usize).collect();
    let points = parallel::pe_curve(&ms, args.n)?;
    let text = match args.format {
        Format::Csv => curve_csv(&points, with_mi),
        Format::Json => curve_json(&points, with_mi),
    };
    emit(args.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn bounds(args: BoundsArgs) -> CliResult<ExitCode> {
    check_photon_number(args.n)?;
    let r = args.r.unwrap_or(1);
    let params = SystemParams::new(args.n, args.m)?
        .with_repetition(r)?
        .with_transmittance(args.eta)?;
    if !(args.base_rate_ghz.is_finite() && args.base_rate_ghz > 0.0) {
        return Err(CliError::validation("--base-rate-ghz must be positive"));
    }
    let sigma = angle_sigma(args.n)?;
    let n_sigma = bases_within_sigma(&params);
    let limits = phase_bounds(args.n, args.m)?;
    let min_bases = heisenberg_min_bases(args.n)?;

    let speed_r = args.r.unwrap_or(2 * key_bits_per_basis(args.m).max(1));
    let m_new = repetition_adjusted_bases(args.m, speed_r);
    let m_new_int = m_new.ceil() as u64;
    let k_new = 64 - (m_new_int.max(2) - 1).leading_zeros();
    let rate = repeated_bit_rate(args.base_rate_ghz, m_new_int);

    let x = params.source_photon_number();
    let pe = if x >= HEAVY_PHOTON_NUMBER && !args.allow_heavy {
        None
    } else {
        Some(repetition_equivalent_pe(&params)?.pe)
    };

    match args.format {
        ReportFormat::Json => {
            let doc = json!({
                "n": args.n, "M": args.m, "r": r, "eta": args.eta,
                "sigma": sigma,
                "bases_within_sigma": n_sigma,
                "phase_sql": limits.standard_quantum_limit,
                "phase_squeezed": limits.squeezed,
                "phase_heisenberg": limits.heisenberg,
                "base_spacing": limits.min_interval,
                "indistinguishable": limits.indistinguishable,
                "min_indistinguishable_bases": min_bases,
                "speed_repetition": speed_r,
                "m_new": m_new,
                "k_m_new": k_new,
                "bit_rate_ghz": rate,
                "pe": pe,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        ReportFormat::Text => {
            println!("n                     {}", format_sig12(args.n));
            println!("M                     {}", args.m);
            println!("r                     {r}");
            println!("sigma                 {}", format_sig12(sigma));
            println!("bases within sigma    {}", format_sig12(n_sigma));
            println!("phase SQL             {}", format_sig12(limits.standard_quantum_limit));
            println!("phase squeezed        {}", format_sig12(limits.squeezed));
            println!("phase Heisenberg      {}", format_sig12(limits.heisenberg));
            println!("base spacing          {}", format_sig12(limits.min_interval));
            println!(
                "M > sqrt(pi n)        {} (needs M >= {min_bases})",
                if limits.indistinguishable { "satisfied" } else { "NOT satisfied" }
            );
            println!("speed cost r          {speed_r}");
            println!("M_new                 {}", format_sig12(m_new));
            println!("K_M(M_new)            {k_new}");
            println!(
                "bit rate              {} GHz (from {} GHz)",
                format_sig12(rate),
                format_sig12(args.base_rate_ghz)
            );
            match pe {
                Some(pe) => println!("pe at r*n             {}", format_sig12(pe)),
                None => println!("pe at r*n             skipped (r*n = {x} needs --allow-heavy)"),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

const SIMULATE_KEYS: &[&str] = &[
    "n",
    "m",
    "l0",
    "cycles",
    "r",
    "eta",
    "seed",
    "k0",
    "eve",
    "reveal-key",
    "mode",
    "verify-bits",
    "distill-ratio",
    "noiseless",
    "entropy",
    "allow-heavy",
];

fn pick<T: std::str::FromStr>(flag: Option<T>, file: &ConfigFile, key: &str, default: T) -> CliResult<T>
where
    T::Err: std::fmt::Display,
{
    Ok(match flag {
        Some(v) => v,
        None => file.get(key)?.unwrap_or(default),
    })
}

fn pick_enum<T: ValueEnum + Clone>(flag: Option<T>, file: &ConfigFile, key: &str, default: T) -> CliResult<T> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match file.get_str(key) {
        None => Ok(default),
        Some(raw) => T::from_str(raw, true).map_err(|e| CliError::validation(format!("config key '{key}': {e}"))),
    }
}

fn pick_switch(flag: bool, file: &ConfigFile, key: &str) -> CliResult<bool> {
    Ok(flag || file.get::<bool>(key)?.unwrap_or(false))
}

struct SimulationPlan {
    params: SystemParams,
    config: ProtocolConfig,
    cycles: u64,
    seeds: SimulationSeeds,
    k0: BitSequence,
    strategies: Vec<Strategy>,
    distill_ratio: f64,
    entropy: EntropyChoice,
    allow_heavy: bool,
}

fn plan_simulation(args: &SimulateArgs) -> CliResult<SimulationPlan> {
    let file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    file.check_known(SIMULATE_KEYS)?;

    let n = pick(args.n, &file, "n", 100.0)?;
    check_photon_number(n)?;
    let m = pick(args.m, &file, "m", 32u32)?;
    let l0 = pick(args.l0, &file, "l0", 1025usize)?;
    let cycles = pick(args.cycles, &file, "cycles", 10u64)?;
    if cycles == 0 {
        return Err(CliError::validation("cycles must be >= 1"));
    }
    let r = pick(args.r, &file, "r", 1u32)?;
    let eta = pick(args.eta, &file, "eta", 1.0f64)?;
    let seed_text = args.seed.clone().or_else(|| file.get_str("seed").map(String::from));
    let seed = parse_seed(seed_text.as_deref().unwrap_or("5eed"))?;
    let eve = pick_enum(args.eve, &file, "eve", EveChoice::All)?;
    let reveal_key = pick_switch(args.reveal_key, &file, "reveal-key")?;
    let mode = pick_enum(args.mode, &file, "mode", ModeChoice::Block)?;
    let verify_bits = pick(args.verify_bits, &file, "verify-bits", 64usize)?;
    let distill_ratio = pick(args.distill_ratio, &file, "distill-ratio", 0.5f64)?;
    if !(0.0..=1.0).contains(&distill_ratio) {
        return Err(CliError::validation(format!("distill ratio must lie in [0, 1], got {distill_ratio}")));
    }
    let noiseless = pick_switch(args.noiseless, &file, "noiseless")?;
    let entropy = pick_enum(args.entropy, &file, "entropy", EntropyChoice::Seeded)?;
    let allow_heavy = pick_switch(args.allow_heavy, &file, "allow-heavy")?;

    let params = SystemParams::new(n, m)?.with_repetition(r)?.with_transmittance(eta)?;
    let seeds = SimulationSeeds::from_master(seed);
    let k0 = match args.k0.clone().or_else(|| file.get_str("k0").map(String::from)) {
        Some(text) => {
            let key = parse_key(&text)?;
            if key.len() < l0 {
                return Err(CliError::validation(format!("K0 has {} bits, L0 needs {l0}", key.len())));
            }
            BitSequence::new(key.as_slice()[..l0].to_vec())?
        }
        None => SeededPhrg::new(seed ^ 0x6b30_6b30_6b30_6b30).fill_bits(l0),
    };

    let strategies = match eve {
        EveChoice::Nearest => vec![Strategy::Nearest],
        EveChoice::Map => vec![Strategy::Map],
        EveChoice::Keyed => vec![Strategy::Keyed],
        EveChoice::All => {
            let mut all = vec![Strategy::Nearest, Strategy::Map];
            if reveal_key {
                all.push(Strategy::Keyed);
            }
            all
        }
    };
    if strategies.contains(&Strategy::Keyed) && !reveal_key {
        return Err(CliError::validation("the keyed strategy needs --reveal-key"));
    }

    let config = ProtocolConfig {
        params,
        channel: if noiseless { ChannelModel::Noiseless } else { ChannelModel::ShotNoise },
        mode: match mode {
            ModeChoice::Block => CipherMode::Block,
            ModeChoice::Lfsr => CipherMode::Lfsr,
        },
        verify_bits,
    };
    Ok(SimulationPlan {
        params,
        config,
        cycles,
        seeds,
        k0,
        strategies,
        distill_ratio,
        entropy,
        allow_heavy,
    })
}

fn run_plan(plan: &SimulationPlan) -> CliResult<Transcript> {
    Ok(match plan.entropy {
        EntropyChoice::Seeded => ProtocolSession::new(plan.k0.clone(), plan.config, plan.seeds)?.run(plan.cycles)?,
        EntropyChoice::Os => {
            ProtocolSession::with_sources(plan.k0.clone(), plan.config, plan.seeds, OsEntropy, OsEntropy)?
                .run(plan.cycles)?
        }
    })
}

fn simulate(args: SimulateArgs) -> CliResult<ExitCode> {
    let plan = plan_simulation(&args)?;
    let transcript = run_plan(&plan)?;

    if let Some(path) = &args.transcript {
        let file = File::create(path).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        write_jsonl(BufWriter::new(file), &transcript_lines(&transcript))?;
    }

    let bob = receiver_ber(&transcript);
    let eve: Vec<(Strategy, BerEstimate)> = plan
        .strategies
        .iter()
        .map(|&s| eavesdropper_ber(&transcript, &plan.params, plan.config.mode, s).map(|e| (s, e)))
        .collect::<CliResult<_>>()?;
    let floor_photons = plan.params.source_photon_number();
    let floor = if floor_photons >= HEAVY_PHOTON_NUMBER && !plan.allow_heavy {
        None
    } else {
        Some(repetition_equivalent_pe(&plan.params)?.pe)
    };
    let l0 = plan.k0.len() as u64;
    let best_keyless = eve
        .iter()
        .filter(|(s, _)| *s != Strategy::Keyed)
        .map(|(_, e)| e.ber)
        .fold(None, |acc: Option<f64>, b| Some(acc.map_or(b, |a| a.min(b))));
    let balance_measured = best_keyless
        .map(|b| information_balance(bob.ber, b.min(0.5), l0))
        .transpose()?;
    let balance_floor = floor.map(|f| information_balance(bob.ber, f, l0)).transpose()?;

    let distilled = if transcript.abort.is_none() {
        let out_len = (plan.distill_ratio * l0 as f64).floor() as usize;
        let key = privacy_amplify(&transcript.final_key_a, out_len, plan.seeds.hash)?;
        if let Some(path) = &args.key_out {
            write_key(path, &key)?;
        }
        Some(key)
    } else {
        None
    };

    match args.format {
        ReportFormat::Json => {
            let doc = json!({
                "n": plan.params.mean_photon_number(),
                "M": plan.params.num_bases(),
                "r": plan.params.repetition(),
                "l0": l0,
                "cycles_requested": plan.cycles,
                "cycles_run": transcript.records.len(),
                "receiver_ber_per_cycle": transcript.records.iter().map(|r| r.receiver_ber).collect::<Vec<_>>(),
                "receiver_ber": bob.ber,
                "eve": eve.iter().map(|(s, e)| json!({
                    "strategy": s.id(), "ber": e.ber, "std_error": e.std_error, "trials": e.trials,
                })).collect::<Vec<_>>(),
                "helstrom_floor": floor,
                "information_balance": balance_measured,
                "information_balance_at_floor": balance_floor,
                "keys_agree": transcript.keys_agree(),
                "diverged_at": transcript.diverged_at(),
                "aborted_at": transcript.abort.as_ref().map(|a| a.cycle_index),
                "distilled_bits": distilled.as_ref().map(BitSequence::len),
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        ReportFormat::Text => {
            println!(
                "M={} n={} r={} L0={} cycles {}/{}",
                plan.params.num_bases(),
                format_sig12(plan.params.mean_photon_number()),
                plan.params.repetition(),
                l0,
                transcript.records.len(),
                plan.cycles
            );
            for rec in &transcript.records {
                println!(
                    "cycle {:>4}  sender {}  receiver ber {}{}",
                    rec.cycle_index,
                    rec.sender.label(),
                    format_sig12(rec.receiver_ber),
                    if rec.diverged() { "  DIVERGED" } else { "" }
                );
            }
            println!("receiver ber          {}", format_sig12(bob.ber));
            for (s, e) in &eve {
                println!(
                    "eve {:<8}          {} +- {} ({} bits)",
                    s.id(),
                    format_sig12(e.ber),
                    format_sig12(e.std_error),
                    e.trials
                );
            }
            match floor {
                Some(f) => println!("helstrom floor        {}", format_sig12(f)),
                None => println!("helstrom floor        skipped (needs --allow-heavy)"),
            }
            if let Some(b) = balance_measured {
                println!("info balance          {} bits/cycle (best keyless eve)", format_sig12(b));
            }
            if let Some(b) = balance_floor {
                println!("info balance floor    {} bits/cycle (eve at floor)", format_sig12(b));
            }
            println!("keys agree            {}", if transcript.keys_agree() { "yes" } else { "no" });
            match &distilled {
                Some(k) => println!("distilled key         {} bits", k.len()),
                None => println!("distilled key         none"),
            }
        }
    }

    if let Some(abort) = &transcript.abort {
        eprintln!(
            "verification failed at cycle {} ({} of {} digest bits differ); run aborted",
            abort.cycle_index,
            abort.report.differing_bits,
            abort.report.digest_a.len()
        );
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn distill(args: DistillArgs) -> CliResult<ExitCode> {
    if !(args.ratio > 0.0 && args.ratio <= 1.0) {
        return Err(CliError::validation(format!("ratio must lie in (0, 1], got {}", args.ratio)));
    }
    let hash_seed = parse_seed(&args.hash_seed)?;
    let key = read_key(&args.input)?;
    if key.is_empty() {
        return Err(CliError::validation("input key is empty"));
    }
    let digest = verification_digest(&key, args.check_bits, hash_seed)?;
    let digest_text = format_key(&digest);
    if let Some(reference) = &args.reference_digest {
        let reference = parse_key(reference)?;
        if reference.len() != digest.len() {
            return Err(CliError::validation(format!(
                "reference digest has {} bits, expected {}",
                reference.len(),
                digest.len()
            )));
        }
        if reference != digest {
            let differing = digest.hamming_distance(&reference)?;
            eprintln!("digest mismatch: {differing} of {} bits differ (got {digest_text})", digest.len());
            return Ok(ExitCode::from(1));
        }
    }
    let out_len = (args.ratio * key.len() as f64).floor() as usize;
    let amplified = privacy_amplify(&key, out_len, hash_seed)?;
    write_key(&args.out, &amplified)?;
    match args.format {
        ReportFormat::Json => {
            let doc = json!({
                "input_bits": key.len(),
                "output_bits": amplified.len(),
                "digest": digest_text,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        ReportFormat::Text => {
            println!("input bits    {}", key.len());
            println!("digest        {digest_text}");
            println!("output bits   {}", amplified.len());
        }
    }
    Ok(ExitCode::SUCCESS)
}
