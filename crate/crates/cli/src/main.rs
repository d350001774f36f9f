use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use silting::rational::{self, Q};
use silting::repmod::{default_dim_bound, enumerate_indecomposables, injective, is_tau_rigid, projective};
use silting::stability::{is_semistable, locate_cone, theta_from_presilting, MembershipReport, StabilityForm, TorsionPairs};
use silting::twoterm::{g_notation, parse_g_notation};
use silting::verify::{self, module_labels, parse_table, run_suite, Check, ModulePolicy, Status, VerificationPlan};
use silting::{Algebra, Catalog, Error, TwoTermComplex};

#[derive(Parser)]
#[command(name = "silting", version, about = "Two-term silting complexes, torsion pairs and King stability over F_p")]
struct Cli {
    /// Algebra definition file (JSON).
    #[arg(long, global = true)]
    algebra: Option<PathBuf>,

    /// Seed for weight draws and random samples.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Total dimension bound for module enumeration.
    #[arg(long, global = true)]
    dim_bound: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Basis, projectives and injectives of the algebra.
    Inspect,
    /// Indecomposable modules up to the dimension bound.
    Indecs,
    /// Indecomposable two-term presilting complexes.
    Presilt {
        /// Also list every basic presilting complex.
        #[arg(long)]
        faces: bool,
    },
    /// Basic two-term silting complexes with their triangle split.
    Silt,
    /// The stability form of a presilting complex with positive weights.
    Theta {
        #[arg(long)]
        presilting: String,
        #[arg(long)]
        weights: Option<String>,
    },
    /// θ-semistable indecomposable modules.
    Semistable {
        #[arg(long, conflicts_with = "presilting")]
        theta: Option<String>,
        #[arg(long)]
        presilting: Option<String>,
        #[arg(long, requires = "presilting")]
        weights: Option<String>,
        /// Include membership reports for every indecomposable.
        #[arg(long)]
        reports: bool,
    },
    /// The cone of the fan containing θ.
    Cone {
        #[arg(long)]
        theta: String,
    },
    /// The silting table in golden-file format.
    Table,
    /// Run the verification suite.
    Verify {
        /// Comma-separated subset of checks.
        #[arg(long)]
        checks: Option<String>,
        /// Golden table; defaults to `<stem>.table.json` beside the algebra.
        #[arg(long)]
        golden: Option<PathBuf>,
        #[arg(long, conflicts_with = "golden")]
        no_golden: bool,
        #[arg(long, default_value_t = 5)]
        draws: usize,
        #[arg(long, default_value_t = 1000)]
        fan_samples: usize,
        #[arg(long, default_value_t = 128)]
        pairs: usize,
        /// Test indecomposables only, without pairwise sums.
        #[arg(long)]
        indecomposables_only: bool,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Internal(_) => 1,
        Error::Malformed(_)
        | Error::NotPrime(_)
        | Error::NonAdmissible(_)
        | Error::Duplicate(_)
        | Error::UnknownVertex(_)
        | Error::UnknownArrow(_)
        | Error::NotFiniteDimensional(_)
        | Error::InvalidModule(_) => 2,
        Error::Inconclusive(_) | Error::ResourceGuard(_) | Error::EndTooLarge(_) | Error::ModuleTooLarge { .. } => 3,
        Error::Query(_)
        | Error::NonPositiveWeight(_)
        | Error::NotPresilting
        | Error::NotSilting
        | Error::NoCone(_)
        | Error::InvalidComplex(_) => 4,
    }
}

struct Session {
    alg: Algebra,
    path: PathBuf,
    dim_bound: usize,
    seed: u64,
    format: Format,
}

impl Session {
    fn catalog(&self) -> silting::Result<Catalog> {
        Catalog::build(&self.alg, self.dim_bound)
    }

    fn emit(&self, value: Value, text: String) {
        match self.format {
            Format::Json => println!("{}", serde_json::to_string_pretty(&value).expect("json")),
            Format::Text => print!("{text}"),
        }
    }

    fn vertex(&self, i: usize) -> &str {
        &self.alg.quiver().vertices[i]
    }
}

fn show_q(v: &[Q]) -> String {
    format!("({})", v.iter().map(rational::format).collect::<Vec<_>>().join(", "))
}

fn q_strings(v: &[Q]) -> Vec<String> {
    v.iter().map(rational::format).collect()
}

fn join(v: &[String]) -> String {
    if v.is_empty() {
        "-".into()
    } else {
        v.join(", ")
    }
}

/// A comma-separated list of g-vectors such as `P_2-P_3,-P_1`, or a JSON
/// file holding a list of complexes.
fn parse_presilting(s: &Session, catalog: &Catalog, spec: &str) -> silting::Result<Vec<TwoTermComplex>> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{spec}: {e}")))?;
        let value: Value = serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{spec}: {e}")))?;
        let items = value
            .as_array()
            .ok_or_else(|| Error::Malformed(format!("{spec}: expected a list of complexes")))?;
        return items.iter().map(|v| TwoTermComplex::from_json(&s.alg, v)).collect();
    }
    if spec.trim().is_empty() {
        return Ok(Vec::new());
    }
    spec.split(',')
        .map(|term| {
            let g = parse_g_notation(&s.alg, term)?;
            catalog
                .find_g(&g)
                .map(|k| catalog.entries[k].complex.clone())
                .ok_or_else(|| Error::Query(format!("`{term}` is not an indecomposable presilting complex")))
        })
        .collect()
}

fn parse_weights(spec: Option<&str>, count: usize) -> silting::Result<Vec<Q>> {
    match spec {
        None => Ok(vec![rational::int(1); count]),
        Some(w) if w.trim().is_empty() => Ok(Vec::new()),
        Some(w) => rational::parse_vector(w),
    }
}

fn cmd_inspect(s: &Session) -> silting::Result<u8> {
    let alg = &s.alg;
    let n = alg.vertex_count();
    let basis: Vec<String> = (0..alg.dim()).map(|b| alg.path_label(b)).collect();
    let proj: Vec<Vec<usize>> = (0..n).map(|i| projective(alg, i).dims().clone()).collect();
    let inj: Vec<Vec<usize>> = (0..n).map(|i| injective(alg, i).dims().clone()).collect();
    let arrows: Vec<Value> = (0..alg.arrow_count())
        .map(|a| {
            let arr = alg.arrow(a);
            json!({ "name": arr.name, "from": s.vertex(arr.source), "to": s.vertex(arr.target) })
        })
        .collect();
    let mut text = String::new();
    writeln!(text, "characteristic {}", alg.p()).unwrap();
    writeln!(text, "vertices {}", alg.quiver().vertices.join(" ")).unwrap();
    for a in &arrows {
        writeln!(text, "arrow {}: {} -> {}", a["name"].as_str().unwrap(), a["from"].as_str().unwrap(), a["to"].as_str().unwrap()).unwrap();
    }
    writeln!(text, "dim {} basis {}", alg.dim(), basis.join(" ")).unwrap();
    for i in 0..n {
        writeln!(text, "P_{0} dims {1:?}   I_{0} dims {2:?}", s.vertex(i), proj[i], inj[i]).unwrap();
    }
    writeln!(text, "default dim bound {}", default_dim_bound(alg)).unwrap();
    s.emit(
        json!({
            "characteristic": alg.p(),
            "vertices": alg.quiver().vertices,
            "arrows": arrows,
            "dim": alg.dim(),
            "basis": basis,
            "projective_dims": proj,
            "injective_dims": inj,
            "default_dim_bound": default_dim_bound(alg),
        }),
        text,
    );
    Ok(0)
}

fn cmd_indecs(s: &Session) -> silting::Result<u8> {
    let mods = enumerate_indecomposables(&s.alg, s.dim_bound)?;
    let labels = module_labels(&s.alg, &mods);
    let mut text = String::new();
    let mut rows = Vec::new();
    for (m, l) in mods.iter().zip(&labels) {
        let rigid = is_tau_rigid(&s.alg, m);
        writeln!(text, "{l:<10} {:?}{}", m.dims(), if rigid { "  tau-rigid" } else { "" }).unwrap();
        rows.push(json!({ "label": l, "dims": m.dims(), "tau_rigid": rigid, "module": m.to_json(&s.alg) }));
    }
    s.emit(json!({ "dim_bound": s.dim_bound, "indecomposables": rows }), text);
    Ok(0)
}

fn cmd_presilt(s: &Session, faces: bool) -> silting::Result<u8> {
    let catalog = s.catalog()?;
    let labels = module_labels(&s.alg, &catalog.indecomposables);
    let mut text = String::new();
    let mut entries = Vec::new();
    for (k, e) in catalog.entries.iter().enumerate() {
        let h0 = match e.kind {
            silting::twoterm::EntryKind::Presentation(m) => labels[m].clone(),
            silting::twoterm::EntryKind::Shift(_) => "0".into(),
        };
        let name = catalog.label(&s.alg, k);
        writeln!(text, "{name:<10} g = {:?}  H0 = {h0}", e.g).unwrap();
        entries.push(json!({ "g": e.g, "notation": name, "h0": h0, "complex": e.complex.to_json(&s.alg) }));
    }
    writeln!(
        text,
        "{} indecomposable, {} basic presilting, {} silting",
        catalog.entries.len(),
        catalog.faces.len(),
        catalog.siltings.len()
    )
    .unwrap();
    let mut out = json!({
        "indecomposable": entries,
        "presilting_count": catalog.faces.len(),
        "silting_count": catalog.siltings.len(),
    });
    if faces {
        let list: Vec<Vec<String>> = catalog
            .faces
            .iter()
            .map(|f| f.iter().map(|&k| catalog.label(&s.alg, k)).collect())
            .collect();
        for f in &list {
            writeln!(text, "{{{}}}", f.join(", ")).unwrap();
        }
        out["faces"] = json!(list);
    }
    s.emit(out, text);
    Ok(0)
}

fn cmd_silt(s: &Session) -> silting::Result<u8> {
    let catalog = s.catalog()?;
    let labels = module_labels(&s.alg, &catalog.indecomposables);
    let mut text = String::new();
    let mut rows = Vec::new();
    for (r, t) in catalog.siltings.iter().enumerate() {
        let tri = catalog.decompose_silting(&s.alg, t)?;
        let rho_flags: Vec<bool> = (0..t.len()).map(|k| tri.rho.contains(&k)).collect();
        let names: Vec<String> = t.iter().map(|&k| catalog.label(&s.alg, k)).collect();
        let shown: Vec<String> = names
            .iter()
            .zip(&rho_flags)
            .map(|(n, &b)| if b { format!("[{n}]") } else { n.clone() })
            .collect();
        let h0: Vec<String> = t
            .iter()
            .filter_map(|&k| match catalog.entries[k].kind {
                silting::twoterm::EntryKind::Presentation(m) => Some(labels[m].clone()),
                silting::twoterm::EntryKind::Shift(_) => None,
            })
            .collect();
        writeln!(text, "{:>3}  {:<28} H0: {}", r + 1, shown.join(", "), join(&h0)).unwrap();
        rows.push(json!({
            "summands": names,
            "g_vectors": catalog.g_vectors(t),
            "rho_flags": rho_flags,
            "h0_dims": t.iter().map(|&k| catalog.entries[k].h0.dims().clone()).collect::<Vec<_>>(),
            "h0": h0,
            "triangle": {
                "t_prime": tri.t_prime,
                "t_double_prime": tri.t_double_prime,
                "coefficients": tri.coefficients,
            },
        }));
    }
    writeln!(text, "{} two-term silting complexes; [..] marks T_rho", rows.len()).unwrap();
    s.emit(json!({ "silting": rows }), text);
    Ok(0)
}

fn cmd_theta(s: &Session, presilting: &str, weights: Option<&str>) -> silting::Result<u8> {
    let catalog = s.catalog()?;
    let parts = parse_presilting(s, &catalog, presilting)?;
    let w = parse_weights(weights, parts.len())?;
    let theta = theta_from_presilting(&s.alg, &parts, &w)?;
    let labels = module_labels(&s.alg, &catalog.indecomposables);
    let mut text = format!("theta = {}\n", show_q(theta.coeffs()));
    let mut values = Vec::new();
    for (m, l) in catalog.indecomposables.iter().zip(&labels) {
        let v = theta.value(m.dims());
        writeln!(text, "  {l:<10} {}", rational::format(&v)).unwrap();
        values.push(json!({ "label": l, "dims": m.dims(), "value": rational::format(&v) }));
    }
    s.emit(
        json!({
            "theta": theta.to_strings(),
            "summands": parts.iter().map(|x| g_notation(&s.alg, &x.g_vector(&s.alg))).collect::<Vec<_>>(),
            "weights": q_strings(&w),
            "values": values,
        }),
        text,
    );
    Ok(0)
}

fn cmd_semistable(
    s: &Session,
    theta: Option<&str>,
    presilting: Option<&str>,
    weights: Option<&str>,
    reports: bool,
) -> silting::Result<u8> {
    let catalog = s.catalog()?;
    let (form, u) = match (theta, presilting) {
        (Some(t), _) => {
            let form = StabilityForm::parse(&s.alg, t)?;
            let u = if reports {
                let loc = locate_cone(&catalog, form.coeffs())?;
                Some(catalog.sum(&s.alg, &loc.face))
            } else {
                None
            };
            (form, u)
        }
        (None, Some(p)) => {
            let parts = parse_presilting(s, &catalog, p)?;
            let w = parse_weights(weights, parts.len())?;
            let form = theta_from_presilting(&s.alg, &parts, &w)?;
            (form, Some(TwoTermComplex::direct_sum_all(&s.alg, parts)))
        }
        (None, None) => return Err(Error::Query("give --theta or --presilting".into())),
    };
    let labels = module_labels(&s.alg, &catalog.indecomposables);
    let mut members = Vec::new();
    for (m, l) in catalog.indecomposables.iter().zip(&labels) {
        if is_semistable(&s.alg, &form, m)?.holds() {
            members.push(l.clone());
        }
    }
    let mut text = format!("theta = {}\nsemistable: {}\n", show_q(form.coeffs()), join(&members));
    let mut out = json!({ "theta": form.to_strings(), "semistable": members });
    if let (true, Some(u)) = (reports, u) {
        let pairs = TorsionPairs::new(&s.alg, &u);
        let list: Vec<MembershipReport> = catalog
            .indecomposables
            .iter()
            .zip(&labels)
            .map(|(m, l)| MembershipReport::build(&s.alg, &pairs, &form, l.clone(), m))
            .collect::<silting::Result<_>>()?;
        for r in &list {
            writeln!(
                text,
                "  {:<10} T+ {} T- {} F+ {} F- {} W_U {} theta {} semistable {}",
                r.module,
                r.in_t_plus as u8,
                r.in_t_minus as u8,
                r.in_f_plus as u8,
                r.in_f_minus as u8,
                r.in_w_u as u8,
                r.theta_value,
                r.semistability.holds() as u8
            )
            .unwrap();
        }
        out["reports"] = serde_json::to_value(&list).expect("json");
    }
    s.emit(out, text);
    Ok(0)
}

fn cmd_cone(s: &Session, theta: &str) -> silting::Result<u8> {
    let catalog = s.catalog()?;
    let form = StabilityForm::parse(&s.alg, theta)?;
    let loc = locate_cone(&catalog, form.coeffs())?;
    let names: Vec<String> = loc.face.iter().map(|&k| catalog.label(&s.alg, k)).collect();
    let pairs = TorsionPairs::new(&s.alg, &catalog.sum(&s.alg, &loc.face));
    let labels = module_labels(&s.alg, &catalog.indecomposables);
    let mut wide = Vec::new();
    for (m, l) in catalog.indecomposables.iter().zip(&labels) {
        if pairs.in_wide(&s.alg, m)? {
            wide.push(l.clone());
        }
    }
    let text = format!(
        "theta = {}\nU = {{{}}}\nweights = {}\nW_U: {}\n",
        show_q(form.coeffs()),
        names.join(", "),
        show_q(&loc.weights),
        join(&wide)
    );
    s.emit(
        json!({
            "theta": form.to_strings(),
            "u": names,
            "g_vectors": catalog.g_vectors(&loc.face),
            "weights": q_strings(&loc.weights),
            "wide": wide,
        }),
        text,
    );
    Ok(0)
}

fn cmd_table(s: &Session) -> silting::Result<u8> {
    let catalog = s.catalog()?;
    let rows = verify::table(&s.alg, &catalog)?;
    let mut text = String::new();
    for (r, row) in rows.iter().enumerate() {
        writeln!(
            text,
            "{:>3}  T: {}  rho: {}  H0: {}  W: {}",
            r + 1,
            join(&row.silting),
            join(&row.rho),
            join(&row.h0),
            join(&row.wide)
        )
        .unwrap();
    }
    s.emit(verify::table_to_json(&rows), text);
    Ok(0)
}

fn default_golden(algebra: &Path) -> Option<PathBuf> {
    let stem = algebra.file_stem()?.to_str()?;
    let path = algebra.with_file_name(format!("{stem}.table.json"));
    path.is_file().then_some(path)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    s: &Session,
    checks: Option<&str>,
    golden: Option<&Path>,
    no_golden: bool,
    draws: usize,
    fan_samples: usize,
    pairs: usize,
    indecomposables_only: bool,
) -> silting::Result<u8> {
    let golden_path = match (golden, no_golden) {
        (_, true) => None,
        (Some(g), _) => Some(g.to_path_buf()),
        (None, false) => default_golden(&s.path),
    };
    let golden = match golden_path {
        Some(p) => {
            let text = std::fs::read_to_string(&p).map_err(|e| Error::Malformed(format!("{}: {e}", p.display())))?;
            Some(parse_table(&text)?)
        }
        None => None,
    };
    let plan = VerificationPlan {
        dim_bound: Some(s.dim_bound),
        seed: s.seed,
        draws,
        policy: if indecomposables_only {
            ModulePolicy::Indecomposables
        } else {
            ModulePolicy::PairwiseSums
        },
        checks: match checks {
            Some(c) => Check::parse_list(c)?,
            None => Check::ALL.to_vec(),
        },
        golden,
        fan_samples,
        pairs,
    };
    let verdict = run_suite(&s.alg, &plan);
    let mut text = String::new();
    if let Some(c) = &verdict.catalog {
        writeln!(
            text,
            "catalog: {} indecomposables, {} indecomposable presilting, {} presilting, {} silting, {} test modules",
            c.indecomposables, c.presilting_indecomposables, c.presilting, c.silting, c.test_modules
        )
        .unwrap();
    }
    for r in &verdict.checks {
        let status = serde_json::to_value(r.status).expect("json");
        writeln!(text, "{:<19} {:<13} {} cases", r.check, status.as_str().unwrap(), r.cases).unwrap();
        if let Some(note) = &r.note {
            writeln!(text, "         {note}").unwrap();
        }
        if let Some(c) = &r.counterexample {
            writeln!(text, "         counterexample: {c}").unwrap();
        }
    }
    let overall = serde_json::to_value(verdict.status).expect("json");
    writeln!(text, "verdict: {}", overall.as_str().unwrap()).unwrap();
    s.emit(verdict.to_json(), text);
    Ok(match verdict.status {
        Status::Pass | Status::Skip => 0,
        Status::Fail => 1,
        Status::Inconclusive => 3,
    })
}

fn run(cli: Cli) -> silting::Result<u8> {
    let path = cli
        .algebra
        .ok_or_else(|| Error::Malformed("--algebra is required".into()))?;
    let alg = Algebra::load(&path)?;
    let s = Session {
        dim_bound: cli.dim_bound.unwrap_or_else(|| default_dim_bound(&alg)),
        alg,
        path,
        seed: cli.seed,
        format: cli.format,
    };
    match &cli.command {
        Command::Inspect => cmd_inspect(&s),
        Command::Indecs => cmd_indecs(&s),
        Command::Presilt { faces } => cmd_presilt(&s, *faces),
        Command::Silt => cmd_silt(&s),
        Command::Theta { presilting, weights } => cmd_theta(&s, presilting, weights.as_deref()),
        Command::Semistable {
            theta,
            presilting,
            weights,
            reports,
        } => cmd_semistable(&s, theta.as_deref(), presilting.as_deref(), weights.as_deref(), *reports),
        Command::Cone { theta } => cmd_cone(&s, theta),
        Command::Table => cmd_table(&s),
        Command::Verify {
            checks,
            golden,
            no_golden,
            draws,
            fan_samples,
            pairs,
            indecomposables_only,
        } => cmd_verify(
            &s,
            checks.as_deref(),
            golden.as_deref(),
            *no_golden,
            *draws,
            *fan_samples,
            *pairs,
            *indecomposables_only,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
