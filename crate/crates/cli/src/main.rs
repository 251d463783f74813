//! `upn` — the command-line surface of the elimination toolkit.
//!
//! Exit codes form a stable contract:
//!
//! * `0` — success. For `impostor-certificate` this additionally means no
//!   candidate was left unresolved.
//! * `2` — `impostor-certificate` finished but some candidates stayed
//!   unresolved (not an error; the certificate is just incomplete).
//! * `3` — configuration or usage errors (bad flags, bad config file,
//!   unreadable inputs). Clap's own usage failures are remapped here so
//!   that `2` is never ambiguous.
//! * `4` — I/O failures while writing outputs.
//!
//! Every command writes a JSON report whose `header` block is the only part
//! that differs between identical reruns; see `upn_core::report`.

mod commands;
mod http;
mod session;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "upn", version, about = "Unitary-perfect-number elimination toolkit")]
struct Cli {
    /// JSON config file; explicit flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads for candidate-parallel phases (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify H_even membership of m = 2k over a range of odd k.
    VerifyHeven(VerifyHevenArgs),
    /// Run the Z/N/O elimination over all five impostor kernels.
    ImpostorCertificate(ImpostorArgs),
    /// Report 3-Higgs status for primes given inline or from a file.
    HiggsCheck(HiggsCheckArgs),
    /// Print the Aurifeuillean split 2^(2p)+1 = L*M for odd primes p.
    Aurifeuillean(AurifeuilleanArgs),
    /// Rebuild the open-candidate frontier TSV from a verify-heven report.
    Frontier(FrontierArgs),
    /// Enumerate source kernels inside the bounded search box.
    EnumerateKernels(EnumerateKernelsArgs),
    /// Count 3-Higgs primes up to a bound, with checkpoint subtotals.
    Pi3(Pi3Args),
}

#[derive(Args, Debug)]
struct VerifyHevenArgs {
    /// Smallest odd k to classify (m = 2k).
    #[arg(long, value_name = "K")]
    k_min: Option<u64>,
    /// Largest odd k to classify.
    #[arg(long, value_name = "K")]
    k_max: Option<u64>,
    /// Wall-clock budget in seconds for each local factoring call.
    #[arg(long, value_name = "SECS")]
    deep_secs: Option<f64>,
    /// Factor cache for 2^m+1 (default: data/factor_cache.json when present).
    #[arg(long, value_name = "FILE")]
    cache: Option<PathBuf>,
    /// Deep Pratt-closure rows (default: data/deep_closures.json when present).
    #[arg(long, value_name = "FILE")]
    deep_closures: Option<PathBuf>,
    /// Consult the remote factor database for cofactors the local ladder
    /// cannot crack. Off by default; the base URL comes from FACTORDB_URL.
    #[arg(long)]
    use_factordb: bool,
    /// Where to write the JSON report.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
    /// Where to write the frontier TSV.
    #[arg(long, value_name = "FILE")]
    frontier: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ImpostorArgs {
    /// Largest exponent a to certify (candidates run over each kernel's
    /// seed congruence class intersected with [1, max-a]).
    #[arg(long, value_name = "A")]
    max_a: Option<u64>,
    /// Trial-division bound for local factoring.
    #[arg(long, value_name = "BOUND")]
    factor_limit: Option<u64>,
    /// Wall-clock budget in seconds for each local factoring call.
    #[arg(long, value_name = "SECS")]
    factor_timeout: Option<f64>,
    /// Cascade round ceiling for filter O.
    #[arg(long, value_name = "N")]
    max_rounds: Option<u32>,
    /// Cascade base-count ceiling for filter O.
    #[arg(long, value_name = "N")]
    max_bases: Option<u32>,
    /// Cascade per-target exponent ceiling for filter O.
    #[arg(long, value_name = "N")]
    max_exp: Option<u32>,
    /// Factor cache for 2^m+1 (default: data/factor_cache.json when present).
    #[arg(long, value_name = "FILE")]
    cache: Option<PathBuf>,
    /// Consult the remote factor database (off by default; FACTORDB_URL).
    #[arg(long)]
    use_factordb: bool,
    /// Where to write the JSON report with all certificates.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct HiggsCheckArgs {
    /// Primes to check, in decimal.
    #[arg(value_name = "PRIME")]
    values: Vec<String>,
    /// File with one decimal value per line; '#' starts a comment.
    #[arg(long, value_name = "FILE")]
    file: Option<PathBuf>,
    /// Factor cache for 2^m+1 (used only for descent reuse; optional).
    #[arg(long, value_name = "FILE")]
    cache: Option<PathBuf>,
    /// Consult the remote factor database (off by default; FACTORDB_URL).
    #[arg(long)]
    use_factordb: bool,
    /// Where to write the JSON report.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AurifeuilleanArgs {
    /// Odd primes p; each yields the two halves of 2^(2p)+1.
    #[arg(value_name = "P", required = true)]
    values: Vec<u64>,
    /// Where to write the JSON report.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FrontierArgs {
    /// A verify-heven JSON report to read classifications from.
    #[arg(long, value_name = "FILE")]
    from: PathBuf,
    /// Where to write the TSV.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EnumerateKernelsArgs {
    /// Largest prime admitted into a kernel.
    #[arg(long, value_name = "P")]
    max_prime: Option<u64>,
    /// Largest exponent per kernel component.
    #[arg(long, value_name = "E")]
    max_exp: Option<u32>,
    /// Largest admitted prime power p^e.
    #[arg(long, value_name = "N")]
    max_prime_power: Option<u64>,
    /// Largest SCC size explored.
    #[arg(long, value_name = "N")]
    max_scc_size: Option<usize>,
    /// Longest dependency cycle explored.
    #[arg(long, value_name = "N")]
    max_cycle_len: Option<usize>,
    /// Where to write the JSON report.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Pi3Args {
    /// Upper bound for the 3-Higgs prime count.
    #[arg(long, value_name = "X")]
    limit: Option<u64>,
    /// Comma-separated checkpoint bounds (default: powers of 10 up to limit).
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    checkpoints: Vec<u64>,
    /// Where to write the JSON report.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Keep exit 2 reserved for unresolved certificates: clap's usage
            // failures move to 3, help/version stay successful.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let overlay = match session::ConfigOverlay::load(cli.config.as_deref()) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };

    if let Some(n) = cli.threads.or(overlay.threads) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(3);
        }
    }

    let outcome = match cli.command {
        Command::VerifyHeven(args) => commands::verify_heven(args, &overlay),
        Command::ImpostorCertificate(args) => commands::impostor_certificate(args, &overlay),
        Command::HiggsCheck(args) => commands::higgs_check(args, &overlay),
        Command::Aurifeuillean(args) => commands::aurifeuillean(args, &overlay),
        Command::Frontier(args) => commands::frontier(args, &overlay),
        Command::EnumerateKernels(args) => commands::enumerate_kernels(args, &overlay),
        Command::Pi3(args) => commands::pi3(args, &overlay),
    };

    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
