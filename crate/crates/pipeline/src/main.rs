use std::path::PathBuf;

use amuse::dataset::{write_corpus, ParamChoice};
use amuse::manifest::BackendConfig;
use amuse::sweep::{run_sweep, SweepKind};
use amuse::table::emit_extract_csv;
use amuse::{attack_subset, embed_dataset, emit_csv, extract_dataset, ExperimentConfig, Manifest};
use amuse_core::channel::random_message;
use amuse_core::select::{select_params, ProtectionSpec, Ratio};
use amuse_core::BitString;
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Adaptive multi-segment dataset watermarking.
#[derive(Parser)]
#[command(name = "amuse", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pick (N, K) for a message length, coverage threshold and dataset size.
    SelectParams {
        #[arg(long)]
        length: usize,
        /// Coverage threshold: "60%", "0.6" or "3/5".
        #[arg(long)]
        tau: Ratio,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        json: bool,
    },
    /// Watermark every sample of a directory and write the manifest.
    Embed(EmbedArgs),
    /// Recover the message from the samples present in a directory.
    Extract {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        /// Reference message (hex, MSB first) for BA/WA; needs --bits.
        #[arg(long, requires = "bits")]
        message: Option<String>,
        #[arg(long)]
        bits: Option<usize>,
        /// Also write a one-row CSV report here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Simulate a leak.
    #[command(subcommand)]
    Attack(Attack),
    /// Run an experiment grid from a JSON config and write CSV.
    Sweep {
        kind: Kind,
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's "output".
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write procedural test images.
    GenCorpus {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 256)]
        size: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum Attack {
    /// Copy a random round(ratio * n) of the files.
    Subset {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// "40%", "0.4" or "2/5".
        #[arg(long)]
        ratio: Ratio,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Subset,
    Length,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendId {
    Dctdwt,
    Synthetic,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Message in hex, MSB first. Random (from --seed) when omitted.
    #[arg(long)]
    message: Option<String>,
    #[arg(long)]
    bits: usize,
    /// Coverage threshold; 60% unless --nk is given.
    #[arg(long, conflicts_with = "nk")]
    tau: Option<Ratio>,
    /// Force "N,K".
    #[arg(long, value_parser = parse_nk)]
    nk: Option<(usize, usize)>,
    #[arg(long, value_enum)]
    backend: BackendId,
    #[arg(long, default_value_t = 36.0)]
    scale: f64,
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_nk(s: &str) -> std::result::Result<(usize, usize), String> {
    let (n, k) = s.split_once(',').ok_or("expected N,K")?;
    let n = n.trim().parse().map_err(|_| format!("bad N in '{s}'"))?;
    let k = k.trim().parse().map_err(|_| format!("bad K in '{s}'"))?;
    Ok((n, k))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::SelectParams {
            length,
            tau,
            samples,
            json,
        } => {
            let s = select_params(&ProtectionSpec::new(tau, length, samples)?);
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "chunks": s.chunks,
                        "excluded": s.excluded,
                        "length": s.length,
                        "tau": s.tau.to_string(),
                    })
                );
            } else {
                println!("N={} K={} l={} tau={} ({:.4})", s.chunks, s.excluded, s.length, s.tau, s.tau.to_f64());
            }
            if s.is_pass_through() {
                eprintln!("warning: no (N, K) fits; every sample carries the full message");
            }
        }
        Command::Embed(a) => embed(a)?,
        Command::Extract {
            input,
            manifest,
            message,
            bits,
            csv,
        } => {
            let manifest = Manifest::load(&manifest)?;
            let reference = match (message, bits) {
                (Some(hex), Some(len)) => Some(BitString::from_hex(&hex, len)?),
                _ => None,
            };
            let out = extract_dataset(&input, &manifest, reference.as_ref())?;
            let d = &out.decoded;
            println!("samples used: {} of {}", out.used.len(), manifest.encoding.samples);
            if !out.ignored.is_empty() {
                println!("ignored files not in manifest: {}", out.ignored.len());
            }
            println!(
                "chunks covered: {}/{}{}",
                d.chunk_coverage.iter().filter(|&&c| c).count(),
                d.chunk_coverage.len(),
                if d.complete { "" } else { " (incomplete)" }
            );
            if d.rejected_length + d.rejected_index > 0 {
                println!("rejected sub-messages: {}", d.rejected_length + d.rejected_index);
            }
            println!("message ({} bits): {}", d.message.len(), d.message.to_hex());
            println!("digest: {}", if out.digest_match { "match" } else { "MISMATCH" });
            if let Some(r) = &out.report {
                println!("BA {:.6} WA {}", r.ba, r.wa());
            }
            if let Some(path) = csv {
                emit_extract_csv(&path, &out, &manifest)?;
            }
        }
        Command::Attack(Attack::Subset {
            input,
            out,
            ratio,
            seed,
        }) => {
            let kept = attack_subset(&input, &out, ratio.to_f64(), seed)?;
            println!("copied {} files to {}", kept.len(), out.display());
        }
        Command::Sweep { kind, config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let Some(path) = out.or_else(|| cfg.output.clone()) else {
                bail!("no output path: pass --out or set \"output\" in the config");
            };
            let kind = match kind {
                Kind::Subset => SweepKind::Subset,
                Kind::Length => SweepKind::Length,
            };
            let rows = run_sweep(&cfg, kind)?;
            emit_csv(&path, &rows)?;
            println!("wrote {} rows to {}", rows.len(), path.display());
        }
        Command::GenCorpus {
            out,
            count,
            size,
            seed,
        } => {
            let files = write_corpus(&out, count, size, seed)?;
            println!("wrote {} images to {}", files.len(), out.display());
        }
    }
    Ok(())
}

fn embed(a: EmbedArgs) -> Result<()> {
    let message = match &a.message {
        Some(hex) => BitString::from_hex(hex, a.bits).context("--message")?,
        None => {
            let m = random_message(a.bits, a.seed);
            println!("generated message: {}", m.to_hex());
            m
        }
    };
    let choice = match (a.nk, a.tau) {
        (Some((chunks, excluded)), _) => ParamChoice::Forced { chunks, excluded },
        (None, Some(t)) => ParamChoice::Tau(t),
        (None, None) => ParamChoice::Tau(Ratio::percent(60)),
    };
    let backend = match a.backend {
        BackendId::Dctdwt => BackendConfig::dctdwt(a.scale)?,
        BackendId::Synthetic => BackendConfig::Synthetic {},
    };
    let out = embed_dataset(&a.input, &a.out, &message, choice, &backend)?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    out.manifest.save(&a.manifest)?;
    let e = &out.manifest.encoding;
    println!(
        "embedded {} samples: N={} K={} p={} C={} b={} l={}",
        e.samples,
        e.chunks,
        e.excluded,
        e.padding,
        e.combinations,
        e.ordering_bits,
        e.submessage_len()
    );
    if let Some(q) = out.mean_psnr {
        println!("mean PSNR {q:.2} dB");
    }
    Ok(())
}
