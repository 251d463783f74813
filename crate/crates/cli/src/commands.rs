//! Command implementations. Each returns the process exit code on success
//! and surfaces configuration/IO failures as [`CliError`].

use std::path::PathBuf;

use num_bigint::BigUint;
use serde_json::json;

use upn_core::arith::is_probable_prime;
use upn_core::filters::{run_certificate, CascadeLimits, FilterContext, RunConfig};
use upn_core::heven::{
    classify_range, export_frontier, load_deep_closures, HevenClassification, HevenConfig,
};
use upn_core::higgs::{enumerate_higgs_primes, higgs_height, is_higgs, HiggsStatus};
use upn_core::kernel::{
    derive_seed_constraints, enumerate_source_kernels, impostor_kernels, BoxBounds,
    SeedCongruence,
};
use upn_core::oracle::aurifeuillean_split;
use upn_core::report::Report;

use crate::session::{self, CliError, ConfigOverlay, Session};
use crate::{
    AurifeuilleanArgs, EnumerateKernelsArgs, FrontierArgs, HiggsCheckArgs, ImpostorArgs,
    Pi3Args, VerifyHevenArgs,
};

pub fn verify_heven(args: VerifyHevenArgs, overlay: &ConfigOverlay) -> Result<u8, CliError> {
    let k_min = args.k_min.or(overlay.k_min).unwrap_or(1);
    let k_max = args.k_max.or(overlay.k_max).unwrap_or(600);
    let deep_secs = args.deep_secs.or(overlay.deep_secs).unwrap_or(1.0);
    if k_min > k_max {
        return Err(CliError::Config(format!("--k-min {k_min} exceeds --k-max {k_max}")));
    }
    if !deep_secs.is_finite() || deep_secs <= 0.0 {
        return Err(CliError::Config(format!("--deep-secs {deep_secs} must be positive")));
    }
    let report_path = args.report.unwrap_or_else(|| PathBuf::from("heven_report.json"));
    let frontier_path =
        args.frontier.unwrap_or_else(|| PathBuf::from("candidate_frontier.tsv"));

    let cache_path = session::resolve_cache_path(args.cache, overlay);
    let use_remote = args.use_factordb || overlay.use_factordb.unwrap_or(false);
    let sess = Session::build(cache_path, session::deep_budget(deep_secs), use_remote)?;

    let deep_path = session::resolve_deep_closures_path(args.deep_closures, overlay);
    let config = match &deep_path {
        Some(p) => HevenConfig {
            deep_rows: load_deep_closures(p)
                .map_err(|e| CliError::Config(format!("deep closures {}: {e}", p.display())))?,
        },
        None => HevenConfig::default(),
    };

    let ctx = FilterContext { oracle: &sess.oracle, higgs: &sess.higgs };
    let run = classify_range(2 * k_min, 2 * k_max, &ctx, &config)
        .map_err(|e| CliError::Config(format!("classification failed: {e}")))?;

    let s = &run.summary;
    println!("H_even over m in [{}, {}] (odd k in [{k_min}, {k_max}])", s.m_min, s.m_max);
    println!("  members:          {:?}", s.members);
    println!("  fermat excluded:  {}", s.fermat_excluded);
    println!("  not cubefree:     {}", s.not_cubefree);
    println!("  witness excluded: {}", s.witness_excluded);
    println!("  undecided:        {} {:?}", s.undecided.len(), s.undecided);
    println!("  total classified: {}", s.total);

    export_frontier(&run.classifications, &frontier_path)
        .map_err(|e| CliError::Io(format!("frontier {}: {e}", frontier_path.display())))?;

    let mut config_echo = sess.config_echo();
    merge_into(
        &mut config_echo,
        json!({
            "k_min": k_min,
            "k_max": k_max,
            "deep_secs": deep_secs,
            "deep_closures": deep_path.map(|p| p.display().to_string()),
            "frontier_path": frontier_path.display().to_string(),
        }),
    );
    let report = Report::new(
        "verify-heven",
        session::VERSION,
        config_echo,
        serde_json::to_value(&run).expect("run serializes"),
    );
    session::write_report(&report_path, &report)?;
    println!("report: {}", report_path.display());
    println!("frontier: {}", frontier_path.display());
    Ok(0)
}

pub fn impostor_certificate(
    args: ImpostorArgs,
    overlay: &ConfigOverlay,
) -> Result<u8, CliError> {
    let max_a = args.max_a.or(overlay.max_a).unwrap_or(10_000);
    let factor_limit = args.factor_limit.or(overlay.factor_limit).unwrap_or(2_000);
    let factor_timeout = args.factor_timeout.or(overlay.factor_timeout).unwrap_or(3.0);
    let max_rounds = args.max_rounds.or(overlay.max_rounds).unwrap_or(200);
    let max_bases = args.max_bases.or(overlay.max_bases).unwrap_or(8_000);
    let max_exp = args.max_exp.or(overlay.max_exp).unwrap_or(5_000);
    if !factor_timeout.is_finite() || factor_timeout <= 0.0 {
        return Err(CliError::Config(format!(
            "--factor-timeout {factor_timeout} must be positive"
        )));
    }
    if max_rounds == 0 || max_bases == 0 || max_exp == 0 {
        return Err(CliError::Config(
            "--max-rounds, --max-bases and --max-exp must all be at least 1".into(),
        ));
    }
    let report_path = args.report.unwrap_or_else(|| PathBuf::from("impostor_report.json"));

    let cache_path = session::resolve_cache_path(args.cache, overlay);
    let use_remote = args.use_factordb || overlay.use_factordb.unwrap_or(false);
    let budget = session::certificate_budget(factor_limit, factor_timeout);
    let sess = Session::build(cache_path, budget, use_remote)?;
    let ctx = FilterContext { oracle: &sess.oracle, higgs: &sess.higgs };

    let limits = CascadeLimits { max_rounds, max_bases, max_exp };
    let mut runs = Vec::new();
    let mut total = upn_core::filters::SummarySplit::default();
    println!("kernel            Z      N      O   open  total");
    for (kernel, residue, modulus) in impostor_kernels() {
        let derived = derive_seed_constraints(&kernel)
            .map_err(|e| CliError::Config(format!("kernel {}: {e}", kernel.id())))?;
        if !derived.verify_class(residue, modulus) {
            return Err(CliError::Config(format!(
                "kernel {}: table class {residue} (mod {modulus}) violates a derived order constraint",
                kernel.id()
            )));
        }
        let seed = SeedCongruence { residue, modulus, constraints: derived.constraints };
        let run = run_certificate(&kernel, &seed, 1, max_a, &ctx, RunConfig { limits })
            .map_err(|e| CliError::Config(format!("kernel {}: {e}", kernel.id())))?;
        let s = &run.summary;
        println!(
            "{:<14} {:>5} {:>6} {:>6} {:>6} {:>6}",
            run.kernel_id, s.z, s.n, s.o, s.unresolved, s.total
        );
        total.merge(s);
        runs.push(run);
    }
    println!(
        "{:<14} {:>5} {:>6} {:>6} {:>6} {:>6}",
        "all kernels", total.z, total.n, total.o, total.unresolved, total.total
    );

    let mut config_echo = sess.config_echo();
    merge_into(
        &mut config_echo,
        json!({
            "max_a": max_a,
            "factor_limit": factor_limit,
            "factor_timeout": factor_timeout,
            "max_rounds": max_rounds,
            "max_bases": max_bases,
            "max_exp": max_exp,
        }),
    );
    let report = Report::new(
        "impostor-certificate",
        session::VERSION,
        config_echo,
        json!({
            "total": total,
            "kernels": runs,
        }),
    );
    session::write_report(&report_path, &report)?;
    println!("report: {}", report_path.display());
    Ok(if total.unresolved == 0 { 0 } else { 2 })
}

pub fn higgs_check(args: HiggsCheckArgs, overlay: &ConfigOverlay) -> Result<u8, CliError> {
    let mut inputs: Vec<String> = args.values.clone();
    if let Some(path) = &args.file {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        for line in raw.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                inputs.push(line.to_string());
            }
        }
    }
    if inputs.is_empty() {
        return Err(CliError::Config("no values given; pass primes or --file".into()));
    }

    let cache_path = args.cache.clone().or_else(|| overlay.cache.clone());
    let use_remote = args.use_factordb || overlay.use_factordb.unwrap_or(false);
    let sess = Session::build(cache_path, session::deep_budget(5.0), use_remote)?;

    let mut results = Vec::new();
    let mut parse_failures = 0u32;
    for text in &inputs {
        let Ok(n) = text.parse::<BigUint>() else {
            println!("{text}: parse error (expected a decimal integer)");
            parse_failures += 1;
            results.push(json!({ "input": text, "error": "parse" }));
            continue;
        };
        if !is_probable_prime(&n) {
            println!("{n}: not prime; the 3-Higgs predicate applies to primes");
            results.push(json!({ "input": text, "value": n.to_string(), "note": "not-prime" }));
            continue;
        }
        let verdict = is_higgs(&n, &sess.oracle, &sess.higgs)
            .map_err(|e| CliError::Config(format!("{n}: {e}")))?;
        match verdict.status {
            HiggsStatus::Higgs => {
                let height = higgs_height(&n, &sess.oracle, &sess.higgs)
                    .map_err(|e| CliError::Config(format!("{n}: {e}")))?
                    .expect("height defined for Higgs primes");
                println!("{n}: 3-Higgs (Pratt height {height})");
                results.push(json!({
                    "input": text,
                    "verdict": &*verdict,
                    "height": height,
                }));
            }
            HiggsStatus::NonHiggs => {
                let path: Vec<String> =
                    verdict.witness.iter().map(|p| p.to_string()).collect();
                let reason = verdict
                    .reason
                    .as_ref()
                    .map(describe_reason)
                    .unwrap_or_else(|| "descent failure".into());
                println!("{n}: not 3-Higgs ({reason}; descent {})", path.join(" -> "));
                results.push(json!({ "input": text, "verdict": &*verdict }));
            }
            HiggsStatus::Undecided => {
                println!("{n}: undecided (factoring budget exhausted in the descent)");
                results.push(json!({ "input": text, "verdict": &*verdict }));
            }
        }
    }

    if let Some(report_path) = &args.report {
        let report = Report::new(
            "higgs-check",
            session::VERSION,
            sess.config_echo(),
            json!({ "checks": results, "parse_failures": parse_failures }),
        );
        session::write_report(report_path, &report)?;
    }
    Ok(if parse_failures > 0 { 3 } else { 0 })
}

pub fn aurifeuillean(args: AurifeuilleanArgs, _overlay: &ConfigOverlay) -> Result<u8, CliError> {
    let mut splits = Vec::new();
    for p in &args.values {
        let split = aurifeuillean_split(*p)
            .map_err(|e| CliError::Config(format!("p = {p}: {e}")))?;
        println!(
            "2^(2*{p})+1 = L * M  (branch {:?}; {} and {} digits)",
            split.branch,
            split.l.to_string().len(),
            split.m.to_string().len(),
        );
        println!("  L = {}", split.l);
        println!("  M = {}", split.m);
        splits.push(split);
    }
    if let Some(report_path) = &args.report {
        let report = Report::new(
            "aurifeuillean",
            session::VERSION,
            json!({ "values": args.values }),
            serde_json::to_value(&splits).expect("splits serialize"),
        );
        session::write_report(report_path, &report)?;
    }
    Ok(0)
}

pub fn frontier(args: FrontierArgs, _overlay: &ConfigOverlay) -> Result<u8, CliError> {
    let raw = std::fs::read_to_string(&args.from)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.from.display())))?;
    let report: serde_json::Value = serde_json::from_str(&raw)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.from.display())))?;
    let classifications = report
        .pointer("/result/classifications")
        .cloned()
        .ok_or_else(|| {
            CliError::Config(format!(
                "{}: not a verify-heven report (missing result.classifications)",
                args.from.display()
            ))
        })?;
    let classifications: Vec<HevenClassification> =
        serde_json::from_value(classifications)
            .map_err(|e| CliError::Config(format!("{}: {e}", args.from.display())))?;
    let out = args.out.unwrap_or_else(|| PathBuf::from("candidate_frontier.tsv"));
    export_frontier(&classifications, &out)
        .map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let open = classifications
        .iter()
        .filter(|c| matches!(c.verdict, upn_core::heven::HevenVerdict::Undecided))
        .count();
    println!("{open} open candidates -> {}", out.display());
    Ok(0)
}

pub fn enumerate_kernels(
    args: EnumerateKernelsArgs,
    _overlay: &ConfigOverlay,
) -> Result<u8, CliError> {
    let defaults = BoxBounds::default();
    let bounds = BoxBounds {
        max_prime: args.max_prime.unwrap_or(defaults.max_prime),
        max_exp: args.max_exp.unwrap_or(defaults.max_exp),
        max_prime_power: args.max_prime_power.unwrap_or(defaults.max_prime_power),
        max_scc_size: args.max_scc_size.unwrap_or(defaults.max_scc_size),
        max_cycle_len: args.max_cycle_len.unwrap_or(defaults.max_cycle_len),
    };
    let kernels = enumerate_source_kernels(&bounds);
    println!("{} source kernels inside the box", kernels.len());
    for ek in &kernels {
        println!(
            "  {:<18} a = {} (mod {})",
            ek.kernel.id(),
            ek.seed.residue,
            ek.seed.modulus
        );
    }
    if let Some(report_path) = &args.report {
        let report = Report::new(
            "enumerate-kernels",
            session::VERSION,
            serde_json::to_value(&bounds).expect("bounds serialize"),
            serde_json::to_value(&kernels).expect("kernels serialize"),
        );
        session::write_report(report_path, &report)?;
    }
    Ok(0)
}

pub fn pi3(args: Pi3Args, _overlay: &ConfigOverlay) -> Result<u8, CliError> {
    let limit = args.limit.unwrap_or(1_000_000);
    if limit < 2 {
        return Err(CliError::Config(format!("--limit {limit} is below the first prime")));
    }
    let mut checkpoints = args.checkpoints.clone();
    if checkpoints.is_empty() {
        let mut c = 10u64;
        while c < limit {
            checkpoints.push(c);
            c = c.saturating_mul(10);
        }
    }
    checkpoints.retain(|c| *c <= limit);
    checkpoints.push(limit);
    checkpoints.sort_unstable();
    checkpoints.dedup();

    let primes = enumerate_higgs_primes(limit);
    let mut rows = Vec::new();
    println!("{:>14}  {:>10}", "x", "Pi_3(x)");
    for c in &checkpoints {
        let count = primes.partition_point(|p| p <= c);
        println!("{c:>14}  {count:>10}");
        rows.push(json!({ "x": c, "count": count }));
    }
    if let Some(report_path) = &args.report {
        let report = Report::new(
            "pi3",
            session::VERSION,
            json!({ "limit": limit, "checkpoints": checkpoints }),
            json!({ "rows": rows }),
        );
        session::write_report(report_path, &report)?;
    }
    Ok(0)
}

fn describe_reason(reason: &upn_core::higgs::FailureReason) -> String {
    use upn_core::higgs::FailureReason::*;
    match reason {
        V2Overflow { v2 } => format!("v2-overflow: v_2(p-1) = {v2}"),
        VqOverflow { q, v } => format!("vq-overflow: v_{q}(p-1) = {v}"),
        NonHiggsChild { q } => format!("non-Higgs child {q}"),
        IncompleteFactorization => "incomplete factorization of p-1".into(),
    }
}

/// Overlay `extra`'s keys onto the object `base` (both must be objects).
fn merge_into(base: &mut serde_json::Value, extra: serde_json::Value) {
    let (Some(base), serde_json::Value::Object(extra)) = (base.as_object_mut(), extra) else {
        unreachable!("config echoes are always JSON objects");
    };
    for (k, v) in extra {
        base.insert(k, v);
    }
}
