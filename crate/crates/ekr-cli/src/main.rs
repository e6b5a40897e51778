//! Batch front-end: read group/subgroup specs, run the EKR deciders or
//! witness replays, and emit JSON reports.
//!
//! Exit codes: 0 property holds / witness verified, 1 property fails
//! (witness in report), 2 verdict not computed (a cap was hit), 3 witness
//! replay failure, 64 malformed spec or usage error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use ekr_core::action::build_coset_action;
use ekr_core::ekrgraph::{check_strong_ekr, check_weak_ekr, CliqueCaps, EkrError, EkrReport, TriState};
use ekr_core::groupcore::{
    group_from_elements, subgroup_generate, Group, GroupElement, GroupError, Representation,
    Subgroup, DEFAULT_ENUMERATION_CAP,
};
use ekr_core::lattice::{all_subgroups, conjugacy_classes, minimal_generators};
use ekr_core::spec::{build_group_with_cap, element_spec, resolve_element, ElementSpec, GroupSpec};
use ekr_core::witnesses::{
    self, replay, WitnessCertificate, WitnessError,
};

const EXIT_HOLDS: u8 = 0;
const EXIT_FAILS: u8 = 1;
const EXIT_NOT_COMPUTED: u8 = 2;
const EXIT_REPLAY_FAILURE: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Weak,
    Strong,
    Witness,
    Survey,
}

#[derive(Debug, Parser)]
#[command(name = "ekr", disable_help_flag = false)]
struct Args {
    /// Group spec file (JSON)
    #[arg(long)]
    group: Option<PathBuf>,
    /// Subgroup generator file (JSON array of elements)
    #[arg(long)]
    subgroup: Option<PathBuf>,
    /// Inline subgroup generators (JSON array of elements)
    #[arg(long = "subgroup-gens")]
    subgroup_gens: Option<String>,
    #[arg(long, value_enum, default_value = "weak")]
    mode: Mode,
    /// Witness constructor name (mode = witness)
    #[arg(long)]
    witness: Option<String>,
    /// Witness parameters as K=V, repeatable
    #[arg(long = "params", value_name = "K=V")]
    params: Vec<String>,
    /// Certificate file to replay (mode = witness, instead of --witness)
    #[arg(long)]
    cert: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Seed for randomized spot-checks
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Group enumeration cap
    #[arg(long = "max-order")]
    max_order: Option<usize>,
    /// Clique search candidate-vertex cap
    #[arg(long = "max-clique-vertices")]
    max_clique_vertices: Option<usize>,
    /// Maximum-clique enumeration cap
    #[arg(long = "max-extremal")]
    max_extremal: Option<usize>,
    /// Report file (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            // clap's help/version output is not an error
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(EXIT_USAGE);
            }
            print!("{e}");
            return ExitCode::from(EXIT_HOLDS);
        }
    };
    match run(&args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cap exceeded: {0}")]
    Cap(String),
    #[error("witness replay failed: {0}")]
    Replay(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Cap(_) => EXIT_NOT_COMPUTED,
            CliError::Replay(_) => EXIT_REPLAY_FAILURE,
            CliError::Io(_) => EXIT_USAGE,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl From<ekr_core::spec::SpecError> for CliError {
    fn from(e: ekr_core::spec::SpecError) -> Self {
        match e {
            ekr_core::spec::SpecError::Group(GroupError::CapExceeded(c)) => {
                CliError::Cap(format!("group enumeration cap {c}"))
            }
            other => usage(other.to_string()),
        }
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::CapExceeded(_) | GroupError::OrderCap(_, _) => CliError::Cap(e.to_string()),
            other => usage(other.to_string()),
        }
    }
}

impl From<EkrError> for CliError {
    fn from(e: EkrError) -> Self {
        match e {
            EkrError::VertexCap(_, _) | EkrError::ExtremalCap(_) => CliError::Cap(e.to_string()),
            other => usage(other.to_string()),
        }
    }
}

impl From<WitnessError> for CliError {
    fn from(e: WitnessError) -> Self {
        match e {
            WitnessError::Unsupported(m) => usage(m),
            WitnessError::Group(g) => g.into(),
            other => CliError::Replay(other.to_string()),
        }
    }
}

fn run(args: &Args) -> Result<u8, CliError> {
    if args.threads == 0 {
        return Err(usage("--threads must be at least 1"));
    }
    let caps = CliqueCaps {
        max_vertices: args.max_clique_vertices.unwrap_or(CliqueCaps::default().max_vertices),
        max_extremal: args.max_extremal.unwrap_or(CliqueCaps::default().max_extremal),
    };
    match args.mode {
        Mode::Weak | Mode::Strong => run_check(args, &caps),
        Mode::Survey => run_survey(args, &caps),
        Mode::Witness => run_witness(args),
    }
}

fn load_group(args: &Args) -> Result<(GroupSpec, Arc<Group>), CliError> {
    let path = args.group.as_ref().ok_or_else(|| usage("--group is required for this mode"))?;
    let text = std::fs::read_to_string(path)?;
    let spec: GroupSpec = serde_json::from_str(&text).map_err(|e| usage(format!("bad group spec: {e}")))?;
    let cap = args.max_order.unwrap_or(DEFAULT_ENUMERATION_CAP);
    let group = build_group_cached(&spec, cap)?;
    Ok((spec, Arc::new(group)))
}

fn load_subgroup(args: &Args, group: &Group) -> Result<Subgroup, CliError> {
    let text = match (&args.subgroup, &args.subgroup_gens) {
        (Some(path), None) => std::fs::read_to_string(path)?,
        (None, Some(inline)) => inline.clone(),
        (Some(_), Some(_)) => return Err(usage("give either --subgroup or --subgroup-gens, not both")),
        (None, None) => return Err(usage("a subgroup is required: --subgroup FILE or --subgroup-gens JSON")),
    };
    let specs: Vec<ElementSpec> =
        serde_json::from_str(&text).map_err(|e| usage(format!("bad subgroup generators: {e}")))?;
    let gens: Vec<u32> = specs
        .iter()
        .map(|s| resolve_element(group, s))
        .collect::<Result<_, _>>()
        .map_err(|e: ekr_core::spec::SpecError| usage(e.to_string()))?;
    Ok(subgroup_generate(group, &gens))
}

fn emit(args: &Args, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    match &args.output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run_check(args: &Args, caps: &CliqueCaps) -> Result<u8, CliError> {
    let (_, group) = load_group(args)?;
    let h = load_subgroup(args, &group)?;
    let action = Arc::new(build_coset_action(Arc::clone(&group), h)?);
    let report = match args.mode {
        Mode::Weak => check_weak_ekr(action, caps)?,
        _ => check_strong_ekr(action, caps)?,
    };
    emit(args, &report)?;
    Ok(match args.mode {
        Mode::Weak => {
            if report.weak {
                EXIT_HOLDS
            } else {
                EXIT_FAILS
            }
        }
        _ => match report.strong {
            TriState::True => EXIT_HOLDS,
            TriState::False => EXIT_FAILS,
            TriState::NotComputed => EXIT_NOT_COMPUTED,
        },
    })
}

#[derive(Serialize)]
struct SurveyClassReport {
    subgroup_order: usize,
    index: usize,
    class_size: usize,
    generators: Vec<ElementSpec>,
    report: EkrReport,
}

#[derive(Serialize)]
struct SurveyReport {
    group_order: usize,
    classes: Vec<SurveyClassReport>,
    group_weak: bool,
    group_strong: TriState,
}

fn run_survey(args: &Args, caps: &CliqueCaps) -> Result<u8, CliError> {
    if args.subgroup.is_some() || args.subgroup_gens.is_some() {
        return Err(usage("survey mode takes only --group"));
    }
    let (_, group) = load_group(args)?;
    let subs = all_subgroups(&group)?;
    let classes = conjugacy_classes(&group, &subs);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()
        .map_err(|e| usage(e.to_string()))?;
    // one representative per conjugacy class; results collected in canonical
    // class order so reports are identical for any thread count
    let results: Vec<Result<SurveyClassReport, CliError>> = pool.install(|| {
        use rayon::prelude::*;
        classes
            .par_iter()
            .map(|class| {
                let rep = &class[0];
                let action = Arc::new(build_coset_action(Arc::clone(&group), rep.clone())?);
                let report = check_strong_ekr(action, caps)?;
                Ok(SurveyClassReport {
                    subgroup_order: rep.order(),
                    index: group.order() / rep.order(),
                    class_size: class.len(),
                    generators: minimal_generators(&group, &rep.members)
                        .iter()
                        .map(|&g| element_spec(&group, g))
                        .collect(),
                    report,
                })
            })
            .collect()
    });
    let mut class_reports = Vec::with_capacity(results.len());
    for r in results {
        class_reports.push(r?);
    }
    let group_weak = class_reports.iter().all(|c| c.report.weak);
    let group_strong = if class_reports.iter().any(|c| c.report.strong == TriState::False) {
        TriState::False
    } else if class_reports.iter().any(|c| c.report.strong == TriState::NotComputed) {
        TriState::NotComputed
    } else {
        TriState::True
    };
    let survey = SurveyReport {
        group_order: group.order(),
        classes: class_reports,
        group_weak,
        group_strong,
    };
    emit(args, &survey)?;
    Ok(if !group_weak || group_strong == TriState::False {
        EXIT_FAILS
    } else if group_strong == TriState::NotComputed {
        EXIT_NOT_COMPUTED
    } else {
        EXIT_HOLDS
    })
}

fn parse_params(args: &Args) -> Result<BTreeMap<String, u64>, CliError> {
    let mut map = BTreeMap::new();
    for kv in &args.params {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| usage(format!("bad --params entry {kv:?}, expected K=V")))?;
        let v: u64 = v.parse().map_err(|_| usage(format!("bad value in --params entry {kv:?}")))?;
        map.insert(k.to_string(), v);
    }
    Ok(map)
}

fn param(params: &BTreeMap<String, u64>, key: &str) -> Result<u64, CliError> {
    params.get(key).copied().ok_or_else(|| usage(format!("missing parameter {key}")))
}

fn run_witness(args: &Args) -> Result<u8, CliError> {
    if let Some(path) = &args.cert {
        let text = std::fs::read_to_string(path)?;
        let cert: WitnessCertificate =
            serde_json::from_str(&text).map_err(|e| usage(format!("bad certificate: {e}")))?;
        replay(&cert)?;
        emit(args, &serde_json::json!({"verified": true}))?;
        return Ok(EXIT_HOLDS);
    }
    let name = args
        .witness
        .as_deref()
        .ok_or_else(|| usage("--witness NAME or --cert FILE is required in witness mode"))?;
    let params = parse_params(args)?;
    let cert: WitnessCertificate = match name {
        "heisenberg" => witnesses::heisenberg_witness(param(&params, "p")?)?,
        "pgl-unipotent" => {
            witnesses::pgl_unipotent_witness(param(&params, "n")? as usize, param(&params, "q")?)?
        }
        "psl2" => witnesses::psl2_witness(param(&params, "q")?)?,
        "psl3-f3" => witnesses::psl3_f3_witness()?,
        "suzuki" => witnesses::suzuki_witness(param(&params, "n")? as u32)?,
        "alternating" => witnesses::alternating_witness(param(&params, "n")? as usize)?,
        "pgl-independent" => {
            witnesses::pgl_independent_set(param(&params, "n")? as usize, param(&params, "q")?)?
        }
        "psl-independent" => {
            witnesses::psl_independent_set(param(&params, "n")? as usize, param(&params, "q")?)?
        }
        "pgroup-strong" => {
            let (spec, _) = load_group(args)?;
            match witnesses::pgroup_strong_witness(&spec)? {
                Some(cert) => cert,
                None => {
                    emit(args, &serde_json::json!({"witness": null}))?;
                    return Ok(EXIT_FAILS);
                }
            }
        }
        "suzuki-identities" => {
            let ok = witnesses::suzuki_identity_checks(param(&params, "n")? as u32)?;
            emit(args, &serde_json::json!({"verified": ok}))?;
            return Ok(if ok { EXIT_HOLDS } else { EXIT_REPLAY_FAILURE });
        }
        "charpoly-galois" => {
            let ok = witnesses::charpoly_galois_check(
                param(&params, "n")? as usize,
                param(&params, "q")?,
                100,
                args.seed,
            )?;
            emit(args, &serde_json::json!({"verified": ok}))?;
            return Ok(if ok { EXIT_HOLDS } else { EXIT_REPLAY_FAILURE });
        }
        "unipotent-lemma" => {
            let ok = witnesses::unipotent_lemma_check(param(&params, "q")?)?;
            emit(args, &serde_json::json!({"verified": ok}))?;
            return Ok(if ok { EXIT_HOLDS } else { EXIT_REPLAY_FAILURE });
        }
        other => return Err(usage(format!("unknown witness {other:?}"))),
    };
    emit(args, &cert)?;
    Ok(EXIT_HOLDS)
}

// ---- enumeration cache ----

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum CachedRep {
    Permutation { degree: usize },
    Matrix { p: u64, k: u32, dim: usize, projective: bool },
}

#[derive(Serialize, Deserialize)]
struct CachedGroup {
    rep: CachedRep,
    elements: Vec<ElementSpec>,
    generators: Vec<ElementSpec>,
}

/// Build a group from its spec, going through the content-addressed cache in
/// EKR_CACHE_DIR when that variable is set.
fn build_group_cached(spec: &GroupSpec, cap: usize) -> Result<Group, CliError> {
    let dir = match std::env::var_os("EKR_CACHE_DIR") {
        Some(d) => PathBuf::from(d),
        None => return Ok(build_group_with_cap(spec, cap)?),
    };
    let key = {
        use sha2::{Digest, Sha256};
        let canonical = serde_json::to_string(spec).expect("spec serializes");
        let hash = Sha256::digest(canonical.as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect::<String>()
    };
    let path = dir.join(format!("{key}.json"));
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(cached) = serde_json::from_str::<CachedGroup>(&text) {
            if let Ok(group) = rebuild_cached(cached) {
                return Ok(group);
            }
        }
        // unreadable or stale cache entries fall through to a fresh build
    }
    let group = build_group_with_cap(spec, cap)?;
    let cached = CachedGroup {
        rep: match group.rep() {
            Representation::Permutation { degree } => CachedRep::Permutation { degree: *degree },
            Representation::Matrix { field, dim, projective } => CachedRep::Matrix {
                p: field.characteristic(),
                k: field.degree(),
                dim: *dim,
                projective: *projective,
            },
        },
        elements: (0..group.order() as u32).map(|i| element_spec(&group, i)).collect(),
        generators: group.generators().iter().map(|&g| element_spec(&group, g)).collect(),
    };
    let _ = std::fs::create_dir_all(&dir);
    let _ = std::fs::write(&path, serde_json::to_string(&cached).expect("cache serializes"));
    Ok(group)
}

fn rebuild_cached(cached: CachedGroup) -> Result<Group, CliError> {
    let rep = match cached.rep {
        CachedRep::Permutation { degree } => Representation::Permutation { degree },
        CachedRep::Matrix { p, k, dim, projective } => Representation::Matrix {
            field: ekr_core::finfield::FiniteField::new(p, k).map_err(|e| usage(e.to_string()))?,
            dim,
            projective,
        },
    };
    let to_element = |s: &ElementSpec| -> GroupElement {
        match s {
            ElementSpec::Perm(images) => GroupElement::Perm(images.clone()),
            ElementSpec::Matrix(rows) => {
                GroupElement::Matrix(rows.iter().flatten().copied().collect())
            }
        }
    };
    let elements: Vec<GroupElement> = cached.elements.iter().map(to_element).collect();
    let generators: Vec<GroupElement> = cached.generators.iter().map(to_element).collect();
    Ok(group_from_elements(rep, elements, &generators)?)
}
