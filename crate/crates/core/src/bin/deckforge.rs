use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use deckforge::abelian::{
    build_deck_presentation, build_gamma_leq_presentation, kernel_basis, present_k0, K0Presentation,
    PresentationFile,
};
use deckforge::cache::CatalogStore;
use deckforge::config::{ConfigLayer, OutputFormat, RunConfig};
use deckforge::deck::{deck_matrix, deck_of, erc_scan, DeckKind};
use deckforge::error::{Error, Result};
use deckforge::graph::CanonicalGraph;
use deckforge::kernel_search::{
    kernel_mass_search, mass_two_collisions, min_mass_exact, GercWitness, WitnessFile,
};
use deckforge::recon::{
    atomic_to_relations, check_size_reconstruction_theorem, edge_deck_decomposition, edge_deck_setting,
    is_reconstructable, validate_atomic, vertex_deck_setting, AtomicSetting, FiniteSetting,
    Reconstructability, SettingFile, SizeMap,
};
use deckforge::ring::{check_kernel_closure, parse_expression};
use deckforge::verify::{render_text, run_claim_suite, Status};

/// Exact edge-deck algebra on graph catalogs.
#[derive(Parser)]
#[command(name = "deckforge", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Catalog cache directory (also DECKFORGE_CACHE).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Never write to the cache.
    #[arg(long, global = true)]
    read_only_cache: bool,
    /// Ignore any configured cache.
    #[arg(long, global = true)]
    no_cache: bool,
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// json, csv or text.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true)]
    max_states: Option<u64>,
    #[arg(long, global = true)]
    max_matrix_cells: Option<u64>,
    #[arg(long, global = true)]
    max_mass: Option<usize>,
    #[arg(long, global = true)]
    search_budget: Option<u64>,
    #[arg(long, global = true)]
    box_bound: Option<u32>,
    #[arg(long, global = true)]
    max_box_points: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Edge,
    Vertex,
}

impl From<Kind> for DeckKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Edge => DeckKind::Edge,
            Kind::Vertex => DeckKind::Vertex,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// List the isomorphism classes with V vertices and N edges.
    Catalog { v: usize, n: usize },
    /// Deck of one graph, given in any labeling.
    Deck {
        graph: String,
        #[arg(long, value_enum, default_value = "edge")]
        kind: Kind,
    },
    /// Deck matrix of a stratum.
    Matrix {
        v: usize,
        n: usize,
        #[arg(long, value_enum, default_value = "edge")]
        kind: Kind,
    },
    /// Pairs of classes with equal edge decks.
    Erc { v: usize, n: usize },
    /// Kernel basis of the deck matrix and small kernel elements.
    Kernel { v: usize, n: usize },
    /// Smallest multiset size at which edge decks collide.
    Kmin {
        v: usize,
        n: usize,
        /// Defaults to the configured max mass.
        cap: Option<usize>,
        /// Also list every group of colliding 2-multisets.
        #[arg(long)]
        all_pairs: bool,
    },
    /// Evaluate a ring expression such as "(II-L)*(Claw-Tri)".
    Ring {
        expr: String,
        /// Also check that the result is a kernel element.
        #[arg(long)]
        kernel: bool,
        /// Check closure of the kernel under the product with this factor.
        #[arg(long)]
        times: Option<String>,
    },
    /// K0 of a presentation file or a built-in covering structure.
    K0 {
        file: Option<PathBuf>,
        /// Deck covering structure on stratum (V, N).
        #[arg(long, num_args = 2, value_names = ["V", "N"], conflicts_with = "file")]
        deck: Option<Vec<usize>>,
        /// Edge-partition covers up to V vertices and N edges.
        #[arg(long, num_args = 2, value_names = ["V", "N"], conflicts_with_all = ["file", "deck"])]
        gamma_leq: Option<Vec<usize>>,
        /// Print the presentation instead of the group.
        #[arg(long)]
        emit_presentation: bool,
    },
    /// Reconstruction framework checks.
    Recon {
        /// Setting file ({classes, data}) or atomic setting file.
        file: Option<PathBuf>,
        /// Atomic edge-deck setting on stratum (V, N).
        #[arg(long, num_args = 2, value_names = ["V", "N"], conflicts_with = "file")]
        edge_decks: Option<Vec<usize>>,
        /// Atomic vertex-deck setting on V vertices.
        #[arg(long, value_name = "V", conflicts_with_all = ["file", "edge_decks"])]
        vertex_decks: Option<usize>,
        /// Size stratification of edge decks on V vertices up to N edges.
        #[arg(long, num_args = 2, value_names = ["V", "N"], conflicts_with_all = ["file", "edge_decks", "vertex_decks"])]
        size_theorem: Option<Vec<usize>>,
        /// Edge counts that decompose in --size-theorem (default: all).
        #[arg(long, value_delimiter = ',')]
        decompose: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value = "reconstructable")]
        check: ReconCheck,
    },
    /// Re-verify published claims or a witness file.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReconCheck {
    Reconstructable,
    Atomic,
    Relations,
    K0,
}

#[derive(Subcommand)]
enum VerifyTarget {
    /// Run the claim battery.
    #[command(alias = "paper")]
    Claims {
        /// Run only these claims.
        #[arg(long = "claim")]
        claims: Vec<String>,
    },
    /// Check a witness file.
    Witness { file: PathBuf },
}

struct Ctx {
    cfg: RunConfig,
    store: CatalogStore,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors are input errors; help and version are not errors.
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("deckforge: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn resolve_config(g: &Global) -> Result<RunConfig> {
    let mut layers = Vec::new();
    if let Some(path) = &g.config {
        layers.push(ConfigLayer::from_toml_file(path)?);
    }
    layers.push(ConfigLayer::from_env(|k| std::env::var(k).ok())?);
    layers.push(ConfigLayer {
        cache_dir: g.cache_dir.clone(),
        read_only_cache: g.read_only_cache.then_some(true),
        max_states: g.max_states,
        max_matrix_cells: g.max_matrix_cells,
        max_mass: g.max_mass,
        search_budget: g.search_budget,
        box_bound: g.box_bound,
        max_box_points: g.max_box_points,
        format: g.format.clone(),
        jobs: g.jobs,
    });
    let mut cfg = RunConfig::resolve(&layers)?;
    if g.no_cache {
        cfg.cache_dir = None;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<u8> {
    let cfg = resolve_config(&cli.global)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build_global()
        .map_err(|e| Error::Input(format!("cannot start worker pool: {e}")))?;
    let store = CatalogStore::from_config(&cfg);
    let ctx = Ctx { cfg, store };
    match cli.command {
        Command::Catalog { v, n } => catalog(&ctx, v, n),
        Command::Deck { graph, kind } => deck(&ctx, &graph, kind.into()),
        Command::Matrix { v, n, kind } => matrix(&ctx, v, n, kind.into()),
        Command::Erc { v, n } => erc(&ctx, v, n),
        Command::Kernel { v, n } => kernel(&ctx, v, n),
        Command::Kmin { v, n, cap, all_pairs } => {
            kmin(&ctx, v, n, cap.unwrap_or(ctx.cfg.limits.max_mass), all_pairs)
        }
        Command::Ring { expr, kernel, times } => ring(&ctx, &expr, kernel, times.as_deref()),
        Command::K0 {
            file,
            deck,
            gamma_leq,
            emit_presentation,
        } => k0(&ctx, file.as_deref(), deck, gamma_leq, emit_presentation),
        Command::Recon {
            file,
            edge_decks,
            vertex_decks,
            size_theorem,
            decompose,
            check,
        } => recon(&ctx, file.as_deref(), edge_decks, vertex_decks, size_theorem, decompose, check),
        Command::Verify { target } => verify(&ctx, target),
    }
}

fn emit_json(value: &impl Serialize) -> Result<u8> {
    let text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        context: "writing output".into(),
        source,
    })?;
    println!("{text}");
    Ok(0)
}

fn no_csv(ctx: &Ctx, what: &str) -> Result<()> {
    if ctx.cfg.format == OutputFormat::Csv {
        return Err(Error::Input(format!("{what} has no CSV output")));
    }
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        context: path.display().to_string(),
        source,
    })
}

fn pair(args: Option<Vec<usize>>) -> Option<(usize, usize)> {
    args.map(|a| (a[0], a[1]))
}

fn catalog(ctx: &Ctx, v: usize, n: usize) -> Result<u8> {
    let cat = ctx.store.stratum(v, n)?;
    match ctx.cfg.format {
        OutputFormat::Json => emit_json(&json!({
            "v": v, "n": n, "count": cat.len(),
            "classes": cat.iter().map(|g| g.as_str()).collect::<Vec<_>>(),
        })),
        OutputFormat::Csv | OutputFormat::Text => {
            for g in cat.iter() {
                println!("{g}");
            }
            Ok(0)
        }
    }
}

fn deck(ctx: &Ctx, graph: &str, kind: DeckKind) -> Result<u8> {
    no_csv(ctx, "deck")?;
    let g = match deckforge::named::by_name(graph) {
        Some(g) => g,
        None => CanonicalGraph::parse_any(graph)?,
    };
    let d = deck_of(kind, &g)?;
    if ctx.cfg.format == OutputFormat::Text {
        for (card, m) in d.cards() {
            println!("{m} x {card}");
        }
        return Ok(0);
    }
    emit_json(&json!({ "graph": g.as_str(), "kind": kind, "cards": d.to_pairs() }))
}

fn matrix(ctx: &Ctx, v: usize, n: usize, kind: DeckKind) -> Result<u8> {
    let m = deck_matrix(v, n, kind, &ctx.store)?;
    match ctx.cfg.format {
        OutputFormat::Csv => {
            print!("{}", m.to_csv()?);
            Ok(0)
        }
        _ => emit_json(&m.to_export()),
    }
}

fn erc(ctx: &Ctx, v: usize, n: usize) -> Result<u8> {
    no_csv(ctx, "erc")?;
    let pairs = erc_scan(v, n, &ctx.store)?;
    if ctx.cfg.format == OutputFormat::Text {
        for (a, b) in &pairs {
            println!("{a} {b}");
        }
        return Ok(0);
    }
    emit_json(&json!({ "v": v, "n": n, "pairs": pairs }))
}

fn kernel(ctx: &Ctx, v: usize, n: usize) -> Result<u8> {
    no_csv(ctx, "kernel")?;
    let m = deck_matrix(v, n, DeckKind::Edge, &ctx.store)?;
    let basis = kernel_basis(m.entries());
    let elements = kernel_mass_search(&m, &basis, ctx.cfg.limits.box_bound, &ctx.cfg.limits)?;
    let as_strings = |x: &[num_bigint::BigInt]| x.iter().map(|c| c.to_string()).collect::<Vec<_>>();
    emit_json(&json!({
        "v": v,
        "n": n,
        "classes": m.cols().iter().map(|g| g.as_str()).collect::<Vec<_>>(),
        "rank": basis.len(),
        "basis": basis.iter().map(|b| as_strings(b)).collect::<Vec<_>>(),
        "box_bound": ctx.cfg.limits.box_bound,
        "elements": elements.iter().map(|x| json!({
            "mass": x.mass().to_string(),
            "element": x.to_graded(),
        })).collect::<Vec<_>>(),
    }))
}

fn kmin(ctx: &Ctx, v: usize, n: usize, cap: usize, all_pairs: bool) -> Result<u8> {
    no_csv(ctx, "kmin")?;
    let r = min_mass_exact(v, n, cap, &ctx.store)?;
    let mut out = json!({
        "v": v,
        "n": n,
        "cap": cap,
        "k": r.k,
        "exhaustive_up_to": r.exhaustive_up_to,
        "budget_exhausted": r.budget_exhausted,
        "witness": r.witness.as_ref().map(GercWitness::to_file),
    });
    if all_pairs {
        out["mass_two_collisions"] = json!(mass_two_collisions(v, n, &ctx.store)?);
    }
    emit_json(&out)
}

fn ring(ctx: &Ctx, expr: &str, kernel: bool, times: Option<&str>) -> Result<u8> {
    no_csv(ctx, "ring")?;
    let x = parse_expression(expr)?;
    if ctx.cfg.format == OutputFormat::Text && !kernel && times.is_none() {
        println!("{x}");
        return Ok(0);
    }
    let mut out = json!({
        "text": x.to_string(),
        "terms": x,
        "grade": x.grade(),
        "vertex_stratum": x.vertex_stratum(),
    });
    if kernel {
        let k = deckforge::KernelElement::from_graded(&x)?;
        out["kernel"] = json!(deckforge::kernel_search::verify_kernel_element(&k)?);
    }
    if let Some(y) = times {
        let y = parse_expression(y)?;
        out["product_in_kernel"] = json!(check_kernel_closure(&x, &y)?);
    }
    emit_json(&out)
}

fn k0(
    ctx: &Ctx,
    file: Option<&Path>,
    deck: Option<Vec<usize>>,
    gamma_leq: Option<Vec<usize>>,
    emit_presentation: bool,
) -> Result<u8> {
    no_csv(ctx, "k0")?;
    let p = match (file, pair(deck), pair(gamma_leq)) {
        (Some(path), _, _) => K0Presentation::from_file(read_json::<PresentationFile>(path)?)
            .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?,
        (None, Some((v, n)), _) => build_deck_presentation(v, n, &ctx.store)?,
        (None, None, Some((v, n))) => build_gamma_leq_presentation(v, n, &ctx.store)?,
        (None, None, None) => {
            return Err(Error::Input("k0 needs a presentation file, --deck or --gamma-leq".into()))
        }
    };
    if emit_presentation {
        return emit_json(&p.to_file());
    }
    emit_json(&present_k0(&p, &ctx.cfg.limits)?.to_export())
}

enum ReconInput {
    Plain(FiniteSetting),
    Atomic(AtomicSetting),
}

fn read_recon_file(path: &Path) -> Result<ReconInput> {
    let value: serde_json::Value = read_json(path)?;
    let as_json_err = |source| Error::Json {
        context: path.display().to_string(),
        source,
    };
    if value.get("distinguished").is_some() {
        Ok(ReconInput::Atomic(serde_json::from_value(value).map_err(as_json_err)?))
    } else {
        let file: SettingFile = serde_json::from_value(value).map_err(as_json_err)?;
        Ok(ReconInput::Plain(FiniteSetting::from_file(file)?))
    }
}

fn recon(
    ctx: &Ctx,
    file: Option<&Path>,
    edge_decks: Option<Vec<usize>>,
    vertex_decks: Option<usize>,
    size_theorem: Option<Vec<usize>>,
    decompose: Option<Vec<usize>>,
    check: ReconCheck,
) -> Result<u8> {
    no_csv(ctx, "recon")?;
    if let Some((v, n_max)) = pair(size_theorem) {
        let decomposed: BTreeSet<usize> = match decompose {
            Some(list) => list.into_iter().collect(),
            None => (0..=n_max).collect(),
        };
        let d = edge_deck_decomposition(v, n_max, &decomposed, &ctx.store)?;
        let sz = SizeMap::edge_count(&d)?;
        let holds = check_size_reconstruction_theorem(&d, &sz)?;
        return emit_json(&json!({ "v": v, "n_max": n_max, "decomposed": decomposed, "reconstructable": holds }));
    }
    let input = match (file, pair(edge_decks), vertex_decks) {
        (Some(path), _, _) => read_recon_file(path)?,
        (None, Some((v, n)), _) => ReconInput::Atomic(edge_deck_setting(v, n, &ctx.store)?),
        (None, None, Some(v)) => ReconInput::Atomic(vertex_deck_setting(v, &ctx.store)?),
        (None, None, None) => {
            return Err(Error::Input(
                "recon needs a setting file, --edge-decks, --vertex-decks or --size-theorem".into(),
            ))
        }
    };
    let atomic = |input: &ReconInput| match input {
        ReconInput::Atomic(a) => Ok(a.clone()),
        ReconInput::Plain(_) => Err(Error::Input("this check needs an atomic setting".into())),
    };
    match check {
        ReconCheck::Reconstructable => {
            let setting = match &input {
                ReconInput::Plain(s) => s.clone(),
                ReconInput::Atomic(a) => a.to_finite_setting()?,
            };
            let collision = match is_reconstructable(&setting) {
                Reconstructability::Injective => None,
                Reconstructability::Collision(a, b) => Some([a, b]),
            };
            emit_json(&json!({ "reconstructable": collision.is_none(), "collision": collision }))
        }
        ReconCheck::Atomic => {
            let violation = validate_atomic(&atomic(&input)?);
            emit_json(&json!({ "valid": violation.is_none(), "violation": violation.map(|v| v.to_string()) }))
        }
        ReconCheck::Relations => emit_json(&atomic_to_relations(&atomic(&input)?)?.to_file()),
        ReconCheck::K0 => {
            let p = atomic_to_relations(&atomic(&input)?)?;
            emit_json(&present_k0(&p, &ctx.cfg.limits)?.to_export())
        }
    }
}

fn verify(ctx: &Ctx, target: VerifyTarget) -> Result<u8> {
    no_csv(ctx, "verify")?;
    match target {
        VerifyTarget::Claims { claims } => {
            let only = (!claims.is_empty()).then_some(claims.as_slice());
            let reports = run_claim_suite(&ctx.store, only)?;
            if ctx.cfg.format == OutputFormat::Text {
                print!("{}", render_text(&reports));
            } else {
                emit_json(&reports)?;
            }
            let code = if reports.iter().any(|r| r.status == Status::Fail) {
                3
            } else if reports.iter().any(|r| r.status == Status::Capped) {
                2
            } else {
                0
            };
            Ok(code)
        }
        VerifyTarget::Witness { file } => {
            let w: WitnessFile = read_json(&file)?;
            match GercWitness::from_file(&w) {
                Ok(w) => emit_json(&json!({ "valid": true, "v": w.stratum().0, "n": w.stratum().1, "k": w.k() })),
                Err(Error::Input(reason)) => {
                    emit_json(&json!({ "valid": false, "reason": reason }))?;
                    Ok(3)
                }
                Err(e) => Err(e),
            }
        }
    }
}
