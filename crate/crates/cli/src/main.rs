//! `turan27`: batch front end for vanishing checks, 1/27 certificates, the
//! minimal census and palette samples.
//!
//! Exit codes: 0 positive verdict, 1 negative verdict, 2 input error,
//! 3 search bound exceeded.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use turan_core::census::{classify_catalog, enumerate_nonisomorphic, run_census, CensusOptions};
use turan_core::certify::{
    build_example8, build_example9, certify_uniform_turan_1_27, verify_turan_certificate,
    TuranCertificate,
};
use turan_core::digraph::{
    digraph_vanishing_oracle_with_bound, pair_components,
    witness_ordering,
};
use turan_core::orderings::{
    find_vanishing_ordering, roles_under_ordering, verify_vanishing_certificate,
    VanishingCertificate, VertexOrder, DEFAULT_ORDER_BOUND,
};
use turan_core::palette::{
    builtin_palette, find_palette_embedding, verify_palette_embedding, PaletteEmbedding,
    PaletteSpec,
};
use turan_core::quasirandom::{
    check_d_eps_dense, edge_density, epsilon_linear_density, sample_palette_host, MeasureMode,
    RNG_NAME,
};
use turan_core::rational::{format_rational, parse_rational};
use turan_core::{Hypergraph3, TuranError};

#[derive(Parser)]
#[command(name = "turan27", version, about = "Uniform Turán density 1/27 toolkit for 3-graphs")]
struct Cli {
    /// Human-readable transcript instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a hypergraph has a vanishing ordering.
    CheckVanishing { input: PathBuf },
    /// Search for a 1/27 certificate, or check one with --verify-only.
    Certify {
        input: PathBuf,
        #[arg(long, value_name = "CERT")]
        verify_only: Option<PathBuf>,
    },
    /// Replay a certificate (1/27, vanishing ordering, or palette embedding).
    Verify {
        input: PathBuf,
        certificate: PathBuf,
        /// Palette for embedding certificates.
        #[arg(long)]
        palette: Option<String>,
    },
    /// Search for an embedding into a palette (builtin name or JSON file).
    EmbedPalette {
        input: PathBuf,
        #[arg(long)]
        palette: String,
    },
    /// Census of minimal non-vanishing graphs, or plain class enumeration
    /// with --max-edges.
    Census(CensusArgs),
    /// Sample a random palette host.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        palette: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Linear density and (d, eps)-denseness of a hypergraph.
    Measure {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        d: Option<String>,
        /// Sampled trials; exact enumeration when omitted.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit a built-in example with its certificate.
    Examples {
        /// `example9` or `example8`.
        name: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long)]
    vertices: usize,
    #[arg(long)]
    max_edges: Option<usize>,
    #[arg(long, env = "TURAN_JOBS")]
    jobs: Option<usize>,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    resume: bool,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, default_value_t = turan_core::census::DEFAULT_SPLIT_DEPTH)]
    split_depth: usize,
    /// Stop after this many tasks, leaving the checkpoint for --resume.
    #[arg(long, hide = true)]
    stop_after_tasks: Option<usize>,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<TuranError> for Failure {
    fn from(e: TuranError) -> Self {
        let code = match e {
            TuranError::BoundExceeded { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type CmdResult<T> = Result<T, Failure>;

/// What a command produced: a verdict, a JSON result, a transcript, and
/// any files written.
struct Outcome {
    positive: bool,
    result: Value,
    text: String,
    files: BTreeMap<String, Vec<u8>>,
    seeds: Vec<u64>,
}

impl Outcome {
    fn new(positive: bool, result: Value, text: impl Into<String>) -> Self {
        Self {
            positive,
            result,
            text: text.into(),
            files: BTreeMap::new(),
            seeds: Vec::new(),
        }
    }
}

#[derive(Serialize)]
struct RunManifest {
    subcommand: String,
    args: Vec<String>,
    seeds: Vec<u64>,
    versions: BTreeMap<&'static str, &'static str>,
    wall_clock_ms: u128,
    outputs: BTreeMap<String, String>,
    digest: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read_text(path: &Path) -> CmdResult<String> {
    std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> CmdResult<Hypergraph3> {
    Hypergraph3::parse(&read_text(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_palette(name: &str) -> CmdResult<PaletteSpec> {
    if let Some(p) = builtin_palette(name) {
        return Ok(p);
    }
    let path = Path::new(name);
    if !path.is_file() {
        return Err(input_error(format!(
            "unknown palette {name:?} (builtins: vanishing, four27_a, four27_b)"
        )));
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(name);
    Ok(PaletteSpec::from_json(stem, &read_text(path)?)?)
}

fn write_files(dir: &Path, files: &BTreeMap<String, Vec<u8>>) -> CmdResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| input_error(format!("{}: {e}", dir.display())))?;
    for (name, bytes) in files {
        let p = dir.join(name);
        std::fs::write(&p, bytes).map_err(|e| input_error(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn to_json_bytes<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn check_vanishing(input: &Path) -> CmdResult<Outcome> {
    let h = read_graph(input)?;
    let connected = !h.is_empty() && pair_components(&h).len() == 1;
    if h.n() > DEFAULT_ORDER_BOUND && !connected {
        return Err(TuranError::BoundExceeded {
            what: "vanishing search vertex count",
            value: h.n(),
            bound: DEFAULT_ORDER_BOUND,
        }
        .into());
    }
    // A single pair-connected component has one forced colouring up to
    // symmetry, so the digraph criterion decides it at any size.
    let bound = if connected { usize::MAX } else { DEFAULT_ORDER_BOUND };
    let verdict = digraph_vanishing_oracle_with_bound(&h, bound)?;
    let cert = if h.n() <= DEFAULT_ORDER_BOUND {
        find_vanishing_ordering(&h)?
    } else {
        verdict.witness.as_ref().and_then(witness_ordering).map(|ord| {
            let ordering = VertexOrder::new(ord).expect("witness is a permutation");
            let roles = roles_under_ordering(&h, &ordering).expect("witness order is vanishing");
            VanishingCertificate { ordering, roles }
        })
    };
    if cert.is_some() != verdict.vanishing {
        return Err(input_error("internal disagreement between ordering search and digraph criterion"));
    }
    Ok(match cert {
        Some(c) => {
            let text = format!("vanishing: ordering {:?}", c.ordering.as_slice());
            Outcome::new(true, json!({"vanishing": true, "certificate": c}), text)
        }
        None => {
            let text = "no vanishing ordering (digraph criterion evidence attached)".to_string();
            Outcome::new(
                false,
                json!({"vanishing": false, "refutation": verdict.refutation}),
                text,
            )
        }
    })
}

fn certify(input: &Path, verify_only: Option<&Path>) -> CmdResult<Outcome> {
    let h = read_graph(input)?;
    if let Some(cp) = verify_only {
        let cert: TuranCertificate = serde_json::from_str(&read_text(cp)?)
            .map_err(|e| input_error(format!("{}: {e}", cp.display())))?;
        let ok = verify_turan_certificate(&h, &cert);
        let text = if ok { "certificate verifies" } else { "certificate REJECTED" };
        return Ok(Outcome::new(ok, json!({"kind": "turan_1_27", "valid": ok}), text));
    }
    let report = certify_uniform_turan_1_27(&h)?;
    Ok(match &report.certificate {
        Some(c) => Outcome::new(
            true,
            json!({"certified": true, "certificate": c}),
            "uniform Turán density 1/27 certified",
        ),
        None => {
            let failed = report.failed_conditions();
            let text = format!("not certified: {}", failed.join("; "));
            Outcome::new(
                false,
                json!({"certified": false, "failed": failed, "report": report}),
                text,
            )
        }
    })
}

fn verify(input: &Path, cert_path: &Path, palette: Option<&str>) -> CmdResult<Outcome> {
    let h = read_graph(input)?;
    let raw: Value = serde_json::from_str(&read_text(cert_path)?)
        .map_err(|e| input_error(format!("{}: {e}", cert_path.display())))?;
    let bad = |e: serde_json::Error| input_error(format!("{}: {e}", cert_path.display()));
    // Accept a bare certificate or one wrapped as {"certificate": ...}.
    let raw = raw.get("certificate").cloned().unwrap_or(raw);
    let (kind, ok) = if raw.get("horizontal").is_some() {
        let c: TuranCertificate = serde_json::from_value(raw).map_err(bad)?;
        ("turan_1_27", verify_turan_certificate(&h, &c))
    } else if raw.get("coloring").is_some() {
        let spec = load_palette(palette.ok_or_else(|| input_error("embedding certificates need --palette"))?)?;
        let e: PaletteEmbedding = serde_json::from_value(raw).map_err(bad)?;
        ("palette_embedding", verify_palette_embedding(&h, &spec.palette, &e))
    } else {
        let c: VanishingCertificate = serde_json::from_value(raw).map_err(bad)?;
        ("vanishing", verify_vanishing_certificate(&h, &c))
    };
    let text = format!("{kind} certificate {}", if ok { "verifies" } else { "REJECTED" });
    Ok(Outcome::new(ok, json!({"kind": kind, "valid": ok}), text))
}

fn embed_palette(input: &Path, palette: &str) -> CmdResult<Outcome> {
    let h = read_graph(input)?;
    let spec = load_palette(palette)?;
    let emb = find_palette_embedding(&h, &spec.palette)?;
    let density = format_rational(&spec.density());
    Ok(match emb {
        Some(e) => Outcome::new(
            true,
            json!({"palette": spec.name, "palette_density": density, "embeds": true, "embedding": e}),
            format!("embeds in {} (density {density})", spec.name),
        ),
        None => Outcome::new(
            false,
            json!({"palette": spec.name, "palette_density": density, "embeds": false}),
            format!("avoided by {} (density {density})", spec.name),
        ),
    })
}

fn census(a: &CensusArgs) -> CmdResult<Outcome> {
    if let Some(m) = a.max_edges {
        let mut text = String::new();
        let mut count = 0;
        for h in enumerate_nonisomorphic(a.vertices, m)? {
            text.push_str(&format!("# class {count}\n{}\n\n", h.to_text()));
            count += 1;
        }
        let mut out = Outcome::new(
            true,
            json!({"vertices": a.vertices, "max_edges": m, "classes": count}),
            format!("{count} classes on {} vertices with at most {m} edges", a.vertices),
        );
        out.files.insert("classes.txt".into(), text.into_bytes());
        return Ok(out);
    }
    let opts = CensusOptions {
        jobs: a.jobs,
        split_depth: a.split_depth,
        checkpoint: a.checkpoint.clone(),
        resume: a.resume,
        max_new_tasks: a.stop_after_tasks,
        progress: true,
    };
    let cat = run_census(a.vertices, &opts)?;
    if !cat.complete {
        let result = json!({
            "complete": false,
            "tasks_done": cat.tasks_done,
            "tasks_total": cat.tasks_total,
        });
        let text = format!("stopped after {}/{} tasks; rerun with --resume", cat.tasks_done, cat.tasks_total);
        return Ok(Outcome::new(false, result, text));
    }
    let cat = classify_catalog(cat);
    let summary = cat.summary();
    let mut out = Outcome::new(
        summary.unresolved == 0,
        json!({
            "complete": true,
            "summary": summary,
            "text": summary.to_string(),
            "catalog_digest": cat.digest(),
        }),
        summary.to_string(),
    );
    out.files.insert("catalog.txt".into(), cat.to_text().into_bytes());
    out.files.insert("catalog.json".into(), to_json_bytes(&cat));
    Ok(out)
}

fn sample(n: usize, palette: &str, seed: u64) -> CmdResult<Outcome> {
    let spec = load_palette(palette)?;
    let s = sample_palette_host(n, &spec, seed)?;
    let host = s.hypergraph.to_text();
    let transcript = to_json_bytes(&s.transcript_json());
    let density = format_rational(&spec.density());
    let observed = edge_density(&s.hypergraph);
    let result = json!({
        "n": n,
        "palette": spec.name,
        "palette_density": density,
        "seed": seed,
        "rng": RNG_NAME,
        "edges": s.hypergraph.edge_count(),
        "edge_density": format_rational(&observed),
        "edge_density_f64": turan_core::rational::to_f64(&observed),
        "host_sha256": sha256_hex(host.as_bytes()),
        "transcript_sha256": sha256_hex(&transcript),
    });
    let text = format!(
        "{} host on {n} vertices, seed {seed}: {} edges (density {:.5}; palette density {density})",
        spec.name,
        s.hypergraph.edge_count(),
        turan_core::rational::to_f64(&observed)
    );
    let mut out = Outcome::new(true, result, text);
    out.files.insert("host.txt".into(), host.into_bytes());
    out.files.insert("transcript.json".into(), transcript);
    out.seeds.push(seed);
    Ok(out)
}

fn measure(input: &Path, eps: &str, d: Option<&str>, trials: Option<usize>, seed: u64) -> CmdResult<Outcome> {
    let h = read_graph(input)?;
    let eps = parse_rational(eps)?;
    let mode = match trials {
        Some(trials) => MeasureMode::Sampled { trials, seed },
        None => MeasureMode::Exact,
    };
    let est = epsilon_linear_density(&h, &eps, mode)?;
    let mut result = json!({
        "edge_density": format_rational(&edge_density(&h)),
        "linear_density": est,
    });
    let mut text = format!(
        "eps-linear density: {}",
        turan_core::quasirandom::describe_estimate(&est)
    );
    let mut positive = true;
    if let Some(d) = d {
        let d = parse_rational(d)?;
        let v = check_d_eps_dense(&h, &d, &eps, mode)?;
        positive = v.holds;
        text.push_str(&format!(
            "\n(d, eps)-dense: {}",
            match (v.holds, v.one_sided) {
                (true, true) => "no violation found (sampled, one-sided)".to_string(),
                (true, false) => "holds".to_string(),
                (false, _) => format!("violated by {:?}", v.counterexample.as_deref().unwrap_or(&[])),
            }
        ));
        result["dense"] = serde_json::to_value(&v).expect("serializable");
    }
    let mut out = Outcome::new(positive, result, text);
    if trials.is_some() {
        out.seeds.push(seed);
    }
    Ok(out)
}

fn examples(name: &str, k: usize) -> CmdResult<Outcome> {
    let (h, cert) = match name {
        "example9" => build_example9(),
        "example8" => build_example8(k)?,
        _ => return Err(input_error(format!("unknown example {name:?} (example9, example8)"))),
    };
    let ok = verify_turan_certificate(&h, &cert);
    let base = if name == "example8" { format!("example8_k{k}") } else { name.to_string() };
    let mut out = Outcome::new(
        ok,
        json!({"name": base, "graph": h.to_text(), "certificate": cert, "verifies": ok}),
        format!("{base}: {} vertices, {} edges; certificate {}", h.n(), h.edge_count(), if ok { "verifies" } else { "REJECTED" }),
    );
    out.files.insert(format!("{base}.txt"), format!("{}\n", h.to_text()).into_bytes());
    out.files.insert(format!("{base}.cert.json"), to_json_bytes(&cert));
    Ok(out)
}

fn run(cli: &Cli) -> CmdResult<(Outcome, Option<PathBuf>)> {
    Ok(match &cli.cmd {
        Command::CheckVanishing { input } => (check_vanishing(input)?, None),
        Command::Certify { input, verify_only } => (certify(input, verify_only.as_deref())?, None),
        Command::Verify {
            input,
            certificate,
            palette,
        } => (verify(input, certificate, palette.as_deref())?, None),
        Command::EmbedPalette { input, palette } => (embed_palette(input, palette)?, None),
        Command::Census(a) => (census(a)?, a.out_dir.clone()),
        Command::Sample {
            n,
            palette,
            seed,
            out_dir,
        } => (sample(*n, palette, *seed)?, out_dir.clone()),
        Command::Measure {
            input,
            eps,
            d,
            trials,
            seed,
        } => (measure(input, eps, d.as_deref(), *trials, *seed)?, None),
        Command::Examples { name, k, out_dir } => (examples(name, *k)?, out_dir.clone()),
    })
}

fn subcommand_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::CheckVanishing { .. } => "check-vanishing",
        Command::Certify { .. } => "certify",
        Command::Verify { .. } => "verify",
        Command::EmbedPalette { .. } => "embed-palette",
        Command::Census(_) => "census",
        Command::Sample { .. } => "sample",
        Command::Measure { .. } => "measure",
        Command::Examples { .. } => "examples",
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cli = Cli::parse();
    let (out, out_dir) = match run(&cli) {
        Ok(r) => r,
        Err(f) => {
            eprintln!("turan27: {}", f.message);
            println!("{}", json!({"error": f.message, "exit_code": f.code}));
            return ExitCode::from(f.code);
        }
    };

    // The digest covers every output file, or the result itself when the
    // command writes none; it never covers timing.
    let mut outputs: BTreeMap<String, String> =
        out.files.iter().map(|(k, v)| (k.clone(), sha256_hex(v))).collect();
    let result_bytes = serde_json::to_vec(&out.result).expect("serializable");
    outputs.insert("result.json".into(), sha256_hex(&result_bytes));
    let digest = sha256_hex(
        outputs
            .iter()
            .map(|(k, v)| format!("{k} {v}\n"))
            .collect::<String>()
            .as_bytes(),
    );
    let manifest = RunManifest {
        subcommand: subcommand_name(&cli.cmd).into(),
        args: std::env::args().collect(),
        seeds: out.seeds.clone(),
        versions: BTreeMap::from([
            ("turan27", env!("CARGO_PKG_VERSION")),
            ("turan-core", turan_core::VERSION),
        ]),
        wall_clock_ms: start.elapsed().as_millis(),
        outputs,
        digest,
    };
    if let Some(dir) = &out_dir {
        let mut files = out.files.clone();
        files.insert("manifest.json".into(), to_json_bytes(&manifest));
        if let Err(f) = write_files(dir, &files) {
            eprintln!("turan27: {}", f.message);
            return ExitCode::from(f.code);
        }
    }
    let text = if cli.pretty {
        format!("{}\ndigest {}\n", out.text, manifest.digest)
    } else {
        let mut doc = out.result;
        doc["manifest"] = serde_json::to_value(&manifest).expect("serializable");
        format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializable"))
    };
    // A closed pipe (e.g. `| head`) is not an error worth a panic.
    let _ = std::io::stdout().write_all(text.as_bytes());
    ExitCode::from(if out.positive { 0 } else { 1 })
}
