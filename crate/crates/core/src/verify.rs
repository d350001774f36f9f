//! Replays the torsion-pair, wide-subcategory and stability identities on a
//! concrete algebra and records a verdict per check.
//!
//! Every check quantifies over finite, explicitly enumerated sets: the faces
//! of the presilting catalog, seeded weight draws and a list of test modules.
//! A failing check carries a counterexample of smallest module dimension.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::rational::{self, Q};
use crate::repmod::{
    default_dim_bound, fac_membership, hom_dim, simple, sub_membership, submodule_dim_vectors, DimVector, Module,
};
use crate::stability::{
    locate_cone, semistability_from_submodules, theta_from_face, SiltingWide, StabilityForm, TorsionPairs,
};
use crate::twoterm::{derived_homs, euler_form, euler_form_by_homs, Catalog, EntryKind, Triangle, TwoTermComplex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Serre,
    Euler,
    Signs,
    WideSemistable,
    TriangleTorsion,
    WideRho,
    SiltingSemistable,
    Table,
    Fan,
}

impl Check {
    pub const ALL: [Check; 9] = [
        Check::Serre,
        Check::Euler,
        Check::Signs,
        Check::WideSemistable,
        Check::TriangleTorsion,
        Check::WideRho,
        Check::SiltingSemistable,
        Check::Table,
        Check::Fan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Serre => "serre",
            Check::Euler => "euler",
            Check::Signs => "signs",
            Check::WideSemistable => "wide-semistable",
            Check::TriangleTorsion => "triangle-torsion",
            Check::WideRho => "wide-rho",
            Check::SiltingSemistable => "silting-semistable",
            Check::Table => "table",
            Check::Fan => "fan",
        }
    }

    pub fn parse(s: &str) -> Result<Check> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| Error::Query(format!("unknown check `{s}`")))
    }

    /// Parses a comma-separated list.
    pub fn parse_list(s: &str) -> Result<Vec<Check>> {
        let mut out: Vec<Check> = s.split(',').map(Check::parse).collect::<Result<_>>()?;
        out.sort();
        out.dedup();
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModulePolicy {
    Indecomposables,
    /// Indecomposables and every `M ⊕ N`, including `M ⊕ M`.
    PairwiseSums,
}

#[derive(Clone, Debug)]
pub struct VerificationPlan {
    /// Defaults to [`default_dim_bound`].
    pub dim_bound: Option<usize>,
    pub seed: u64,
    /// Weight draws per presilting complex.
    pub draws: usize,
    pub policy: ModulePolicy,
    pub checks: Vec<Check>,
    /// Expected table; the table check is skipped without one.
    pub golden: Option<Vec<TableRow>>,
    /// Random stability forms located in the fan.
    pub fan_samples: usize,
    /// Random (complex, module) pairs for the Euler form identities.
    pub pairs: usize,
}

impl Default for VerificationPlan {
    fn default() -> Self {
        VerificationPlan {
            dim_bound: None,
            seed: 0,
            draws: 5,
            policy: ModulePolicy::PairwiseSums,
            checks: Check::ALL.to_vec(),
            golden: None,
            fan_samples: 1000,
            pairs: 128,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub status: Status,
    pub cases: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogSizes {
    pub indecomposables: usize,
    pub presilting_indecomposables: usize,
    pub presilting: usize,
    pub silting: usize,
    pub test_modules: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub seed: u64,
    pub dim_bound: usize,
    pub characteristic: u32,
    pub weight_draws: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalog: Option<CatalogSizes>,
    pub checks: Vec<CheckRecord>,
}

impl Verdict {
    pub fn record(&self, check: Check) -> Option<&CheckRecord> {
        self.checks.iter().find(|r| r.check == check.name())
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("verdict serializes")
    }
}

/// One row of the silting table: summands by g-vector, the `T_ρ` part,
/// `H^0` summands and the indecomposables of `W^T`. Lists are sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRow {
    pub silting: Vec<String>,
    pub rho: Vec<String>,
    pub h0: Vec<String>,
    pub h0_rho: Vec<String>,
    pub wide: Vec<String>,
}

impl TableRow {
    fn canonical(mut self) -> TableRow {
        for v in [&mut self.silting, &mut self.rho, &mut self.h0, &mut self.h0_rho, &mut self.wide] {
            v.sort();
        }
        self
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    rows: Vec<TableRow>,
}

/// Reads `{"rows": [...]}`.
pub fn parse_table(text: &str) -> Result<Vec<TableRow>> {
    let file: TableFile = serde_json::from_str(text).map_err(|e| Error::Malformed(format!("table file: {e}")))?;
    Ok(file.rows)
}

pub fn table_to_json(rows: &[TableRow]) -> Value {
    json!({ "rows": rows })
}

/// Loewy labels, with `#k` appended when two modules share a label.
pub fn module_labels(alg: &Algebra, mods: &[Module]) -> Vec<String> {
    let raw: Vec<String> = mods.iter().map(|m| m.loewy_label(alg)).collect();
    let mut seen = std::collections::HashMap::<&str, usize>::new();
    raw.iter()
        .map(|l| {
            let total = raw.iter().filter(|x| *x == l).count();
            if total == 1 {
                return l.clone();
            }
            let k = seen.entry(l).or_insert(0);
            *k += 1;
            format!("{l}#{k}")
        })
        .collect()
}

/// The silting table of a catalog, one row per silting complex in catalog
/// order.
pub fn table(alg: &Algebra, catalog: &Catalog) -> Result<Vec<TableRow>> {
    let labels = module_labels(alg, &catalog.indecomposables);
    catalog
        .siltings
        .par_iter()
        .map(|t| {
            let triangle = catalog.decompose_silting(alg, t)?;
            Ok(table_row(alg, catalog, &labels, t, &triangle))
        })
        .collect()
}

fn table_row(alg: &Algebra, catalog: &Catalog, labels: &[String], t: &[usize], triangle: &Triangle) -> TableRow {
    let h0_label = |k: usize| match catalog.entries[k].kind {
        EntryKind::Presentation(m) => Some(labels[m].clone()),
        EntryKind::Shift(_) => None,
    };
    let rho: Vec<usize> = triangle.rho.iter().map(|&k| t[k]).collect();
    let wide = SiltingWide::from_triangle(alg, catalog, t, triangle);
    TableRow {
        silting: t.iter().map(|&k| catalog.label(alg, k)).collect(),
        rho: rho.iter().map(|&k| catalog.label(alg, k)).collect(),
        h0: t.iter().filter_map(|&k| h0_label(k)).collect(),
        h0_rho: rho.iter().filter_map(|&k| h0_label(k)).collect(),
        wide: catalog
            .indecomposables
            .iter()
            .zip(labels)
            .filter(|(m, _)| wide.contains(alg, m))
            .map(|(_, l)| l.clone())
            .collect(),
    }
    .canonical()
}

struct TestModule {
    label: String,
    module: Module,
}

#[derive(Clone, Copy)]
struct Membership {
    t_plus: bool,
    t_minus: bool,
    f_plus: bool,
    f_minus: bool,
}

struct SiltingData {
    face: Vec<usize>,
    triangle: Triangle,
    lambda: Vec<usize>,
    rho: Vec<usize>,
    wide: SiltingWide,
    pairs: TorsionPairs,
    rho_pairs: TorsionPairs,
}

struct Violation {
    size: usize,
    payload: Value,
}

#[derive(Default)]
struct Tally {
    cases: u64,
    worst: Option<Violation>,
}

impl Tally {
    fn case(&mut self) {
        self.cases += 1;
    }

    fn violate(&mut self, size: usize, payload: Value) {
        if self.worst.as_ref().is_none_or(|w| size < w.size) {
            self.worst = Some(Violation { size, payload });
        }
    }

    fn merge(&mut self, other: Tally) {
        self.cases += other.cases;
        if let Some(v) = other.worst {
            self.violate(v.size, v.payload);
        }
    }

    fn merge_all(parts: impl IntoIterator<Item = Result<Tally>>) -> Result<Tally> {
        let mut out = Tally::default();
        for t in parts {
            out.merge(t?);
        }
        Ok(out)
    }
}

const STREAM_WEIGHTS: u64 = 0;
const STREAM_PAIRS: u64 = 1 << 40;
const STREAM_FAN: u64 = 1 << 41;

struct Context<'a> {
    alg: &'a Algebra,
    plan: &'a VerificationPlan,
    catalog: Catalog,
    modules: Vec<TestModule>,
    face_pairs: OnceLock<Vec<TorsionPairs>>,
    memberships: OnceLock<Result<Vec<Vec<Membership>>>>,
    submodules: OnceLock<Vec<Result<BTreeSet<DimVector>>>>,
    siltings: OnceLock<Result<Vec<SiltingData>>>,
}

impl<'a> Context<'a> {
    fn new(alg: &'a Algebra, plan: &'a VerificationPlan, catalog: Catalog) -> Context<'a> {
        let labels = module_labels(alg, &catalog.indecomposables);
        let mut modules: Vec<TestModule> = catalog
            .indecomposables
            .iter()
            .zip(&labels)
            .map(|(m, l)| TestModule {
                label: l.clone(),
                module: m.clone(),
            })
            .collect();
        if plan.policy == ModulePolicy::PairwiseSums {
            let count = modules.len();
            for a in 0..count {
                for b in a..count {
                    modules.push(TestModule {
                        label: format!("{} ⊕ {}", labels[a], labels[b]),
                        module: catalog.indecomposables[a].direct_sum(&catalog.indecomposables[b]),
                    });
                }
            }
        }
        Context {
            alg,
            plan,
            catalog,
            modules,
            face_pairs: OnceLock::new(),
            memberships: OnceLock::new(),
            submodules: OnceLock::new(),
            siltings: OnceLock::new(),
        }
    }

    fn face_json(&self, face: &[usize]) -> Value {
        Value::from(face.iter().map(|&k| self.catalog.label(self.alg, k)).collect::<Vec<_>>())
    }

    fn module_json(&self, k: usize) -> Value {
        let m = &self.modules[k];
        json!({
            "label": m.label,
            "dims": m.module.dims(),
            "module": m.module.to_json(self.alg),
        })
    }

    fn face_pairs(&self) -> &[TorsionPairs] {
        self.face_pairs.get_or_init(|| {
            self.catalog
                .faces
                .par_iter()
                .map(|f| TorsionPairs::new(self.alg, &self.catalog.sum(self.alg, f)))
                .collect()
        })
    }

    fn memberships(&self) -> Result<&[Vec<Membership>]> {
        let stored = self.memberships.get_or_init(|| {
            self.face_pairs()
                .par_iter()
                .map(|pairs| {
                    self.modules
                        .iter()
                        .map(|m| {
                            Ok(Membership {
                                t_plus: pairs.in_t_plus(self.alg, &m.module)?,
                                t_minus: pairs.in_t_minus(self.alg, &m.module),
                                f_plus: pairs.in_f_plus(self.alg, &m.module),
                                f_minus: pairs.in_f_minus(self.alg, &m.module)?,
                            })
                        })
                        .collect()
                })
                .collect()
        });
        stored.as_deref().map_err(Clone::clone)
    }

    fn submodules(&self, k: usize) -> Result<&BTreeSet<DimVector>> {
        let all = self.submodules.get_or_init(|| {
            self.modules
                .par_iter()
                .map(|m| submodule_dim_vectors(self.alg, &m.module))
                .collect()
        });
        all[k].as_ref().map_err(Clone::clone)
    }

    fn siltings(&self) -> Result<&[SiltingData]> {
        let stored = self.siltings.get_or_init(|| {
            self.catalog
                .siltings
                .par_iter()
                .map(|t| {
                    let triangle = self.catalog.decompose_silting(self.alg, t)?;
                    let lambda: Vec<usize> = triangle.lambda.iter().map(|&k| t[k]).collect();
                    let rho: Vec<usize> = triangle.rho.iter().map(|&k| t[k]).collect();
                    Ok(SiltingData {
                        wide: SiltingWide::from_triangle(self.alg, &self.catalog, t, &triangle),
                        pairs: TorsionPairs::new(self.alg, &self.catalog.sum(self.alg, t)),
                        rho_pairs: TorsionPairs::new(self.alg, &self.catalog.sum(self.alg, &rho)),
                        face: t.clone(),
                        triangle,
                        lambda,
                        rho,
                    })
                })
                .collect()
        });
        stored.as_deref().map_err(Clone::clone)
    }

    /// Seeded positive weights for a face, `draws` vectors.
    fn weight_draws(&self, face_index: usize, len: usize) -> Vec<Vec<Q>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.plan.seed);
        rng.set_stream(STREAM_WEIGHTS + face_index as u64);
        (0..self.plan.draws)
            .map(|_| {
                (0..len)
                    .map(|_| rational::ratio(rng.gen_range(1..=16), rng.gen_range(1..=16)))
                    .collect()
            })
            .collect()
    }

    fn face_index(&self, face: &[usize]) -> usize {
        self.catalog
            .faces
            .binary_search_by(|f| (f.len(), f.as_slice()).cmp(&(face.len(), face)))
            .expect("faces of a silting complex are in the catalog")
    }

    fn thetas(&self, face_index: usize) -> Result<Vec<StabilityForm>> {
        let face = &self.catalog.faces[face_index];
        self.weight_draws(face_index, face.len())
            .into_iter()
            .map(|w| theta_from_face(self.alg, &self.catalog, face, &w))
            .collect()
    }

    fn sampled_pairs(&self) -> Vec<(usize, usize)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.plan.seed);
        rng.set_stream(STREAM_PAIRS);
        (0..self.plan.pairs)
            .map(|_| {
                (
                    rng.gen_range(0..self.catalog.faces.len()),
                    rng.gen_range(0..self.modules.len()),
                )
            })
            .collect()
    }

    fn run(&self, check: Check) -> Result<Tally> {
        match check {
            Check::Serre => self.check_serre(),
            Check::Euler => self.check_euler(),
            Check::Signs => self.check_signs(),
            Check::WideSemistable => self.check_wide_semistable(),
            Check::TriangleTorsion => self.check_triangle_torsion(),
            Check::WideRho => self.check_wide_rho(),
            Check::SiltingSemistable => self.check_silting_semistable(),
            Check::Table => unreachable!("handled by the caller"),
            Check::Fan => self.check_fan(),
        }
    }

    fn check_serre(&self) -> Result<Tally> {
        let parts = self.sampled_pairs().into_par_iter().map(|(f, k)| {
            let mut tally = Tally::default();
            let x = self.catalog.sum(self.alg, &self.catalog.faces[f]);
            let m = &self.modules[k].module;
            let dh = derived_homs(self.alg, &x, m);
            tally.case();
            if dh.to_module != dh.module_to_nu {
                tally.violate(
                    m.total_dim(),
                    json!({
                        "complex": self.face_json(&self.catalog.faces[f]),
                        "module": self.module_json(k),
                        "hom_p_m": dh.to_module,
                        "hom_m_nu_p": dh.module_to_nu,
                    }),
                );
            }
            Ok(tally)
        });
        Tally::merge_all(parts.collect::<Vec<_>>())
    }

    fn check_euler(&self) -> Result<Tally> {
        let parts = self.sampled_pairs().into_par_iter().map(|(f, k)| {
            let mut tally = Tally::default();
            let x = self.catalog.sum(self.alg, &self.catalog.faces[f]);
            let m = &self.modules[k].module;
            let dh = derived_homs(self.alg, &x, m);
            let e = euler_form(self.alg, &x, m);
            let by_homs = euler_form_by_homs(self.alg, &x, m);
            let h0_hom = hom_dim(self.alg, &x.h0(self.alg), m) as i64;
            let into_h = hom_dim(self.alg, m, &x.hminus1_nu(self.alg));
            let first = h0_hom - dh.to_shift as i64;
            let second = dh.module_to_nu as i64 - dh.module_to_nu_kernel as i64;
            tally.case();
            if e != by_homs || e != first || e != second || into_h != dh.module_to_nu_kernel {
                tally.violate(
                    m.total_dim(),
                    json!({
                        "complex": self.face_json(&self.catalog.faces[f]),
                        "module": self.module_json(k),
                        "euler_form": e,
                        "euler_form_by_homs": by_homs,
                        "hom_h0_minus_hom_shift": first,
                        "hom_nu_minus_hom_h_minus1": second,
                    }),
                );
            }
            Ok(tally)
        });
        let mut tally = Tally::merge_all(parts.collect::<Vec<_>>())?;
        let n = self.alg.vertex_count();
        for i in 0..n {
            for j in 0..n {
                let x = TwoTermComplex::stalk(i);
                let s = simple(self.alg, j);
                let expected = i64::from(i == j);
                tally.case();
                let (a, b) = (euler_form(self.alg, &x, &s), euler_form_by_homs(self.alg, &x, &s));
                if a != expected || b != expected {
                    tally.violate(
                        1,
                        json!({ "projective": i, "simple": j, "euler_form": a, "euler_form_by_homs": b }),
                    );
                }
            }
        }
        Ok(tally)
    }

    fn check_signs(&self) -> Result<Tally> {
        let memberships = self.memberships()?;
        let parts = (0..self.catalog.faces.len()).into_par_iter().map(|f| {
            let mut tally = Tally::default();
            for theta in self.thetas(f)? {
                for (k, tm) in self.modules.iter().enumerate() {
                    let mb = memberships[f][k];
                    let v = theta.value(tm.module.dims());
                    let zero = rational::int(0);
                    let nonzero = !tm.module.is_zero();
                    let rules = [
                        ("T+ implies theta >= 0", !mb.t_plus || v >= zero),
                        ("nonzero T- implies theta > 0", !(mb.t_minus && nonzero) || v > zero),
                        ("F- implies theta <= 0", !mb.f_minus || v <= zero),
                        ("nonzero F+ implies theta < 0", !(mb.f_plus && nonzero) || v < zero),
                        ("T- contained in T+", !mb.t_minus || mb.t_plus),
                        ("F+ contained in F-", !mb.f_plus || mb.f_minus),
                    ];
                    tally.case();
                    if let Some((rule, _)) = rules.iter().find(|(_, ok)| !ok) {
                        tally.violate(
                            tm.module.total_dim(),
                            json!({
                                "rule": rule,
                                "u": self.face_json(&self.catalog.faces[f]),
                                "theta": theta.to_strings(),
                                "module": self.module_json(k),
                                "theta_value": rational::format(&v),
                            }),
                        );
                    }
                }
            }
            Ok(tally)
        });
        Tally::merge_all(parts.collect::<Vec<_>>())
    }

    fn check_wide_semistable(&self) -> Result<Tally> {
        let memberships = self.memberships()?;
        let parts = (0..self.catalog.faces.len()).into_par_iter().map(|f| {
            let mut tally = Tally::default();
            let mut first_set: Option<(Vec<String>, Vec<usize>)> = None;
            for theta in self.thetas(f)? {
                let mut semistable_set = Vec::new();
                for (k, tm) in self.modules.iter().enumerate() {
                    let mb = memberships[f][k];
                    let wide = mb.t_plus && mb.f_minus;
                    let ss = semistability_from_submodules(&theta, tm.module.dims(), self.submodules(k)?);
                    if ss.holds() {
                        semistable_set.push(k);
                    }
                    tally.case();
                    if wide != ss.holds() {
                        tally.violate(
                            tm.module.total_dim(),
                            json!({
                                "u": self.face_json(&self.catalog.faces[f]),
                                "theta": theta.to_strings(),
                                "module": self.module_json(k),
                                "in_w_u": wide,
                                "semistability": ss,
                            }),
                        );
                    }
                }
                match &first_set {
                    None => first_set = Some((theta.to_strings(), semistable_set)),
                    Some((first_theta, set)) if *set != semistable_set => {
                        let k = *set
                            .iter()
                            .chain(&semistable_set)
                            .find(|k| set.contains(k) != semistable_set.contains(k))
                            .expect("sets differ");
                        tally.violate(
                            self.modules[k].module.total_dim(),
                            json!({
                                "rule": "semistable set depends on the weights",
                                "u": self.face_json(&self.catalog.faces[f]),
                                "theta": [first_theta, theta.to_strings()],
                                "module": self.module_json(k),
                            }),
                        );
                    }
                    Some(_) => {}
                }
            }
            Ok(tally)
        });
        Tally::merge_all(parts.collect::<Vec<_>>())
    }

    fn check_triangle_torsion(&self) -> Result<Tally> {
        let siltings = self.siltings()?;
        let parts = siltings.par_iter().map(|s| {
            let mut tally = Tally::default();
            let h0_lambda = self.catalog.h0(self.alg, &s.lambda);
            let h0_rho = self.catalog.h0(self.alg, &s.rho);
            let nu_rho = s.rho_pairs.hminus1_nu();
            tally.case();
            if !fac_membership(self.alg, &h0_lambda, &h0_rho) {
                tally.violate(
                    0,
                    json!({
                        "rule": "H0(T_rho) in Fac H0(T_lambda)",
                        "t": self.face_json(&s.face),
                        "rho": self.face_json(&s.rho),
                    }),
                );
            }
            for (k, tm) in self.modules.iter().enumerate() {
                let m = &tm.module;
                let torsion = [
                    s.pairs.in_t_plus(self.alg, m)?,
                    s.pairs.in_t_minus(self.alg, m),
                    fac_membership(self.alg, &h0_lambda, m),
                    hom_dim(self.alg, m, nu_rho) == 0,
                ];
                let free = [
                    s.pairs.in_f_plus(self.alg, m),
                    s.pairs.in_f_minus(self.alg, m)?,
                    hom_dim(self.alg, &h0_lambda, m) == 0,
                    sub_membership(self.alg, nu_rho, m),
                ];
                for (name, values) in [("torsion", torsion), ("torsion-free", free)] {
                    tally.case();
                    if values.iter().any(|&b| b != values[0]) {
                        tally.violate(
                            m.total_dim(),
                            json!({
                                "rule": format!("{name} descriptions agree"),
                                "t": self.face_json(&s.face),
                                "rho": self.face_json(&s.rho),
                                "module": self.module_json(k),
                                "values": values,
                            }),
                        );
                    }
                }
            }
            Ok(tally)
        });
        Tally::merge_all(parts.collect::<Vec<_>>())
    }

    fn check_wide_rho(&self) -> Result<Tally> {
        let siltings = self.siltings()?;
        let parts = siltings.par_iter().map(|s| {
            let mut tally = Tally::default();
            for (k, tm) in self.modules.iter().enumerate() {
                let a = s.wide.contains(self.alg, &tm.module);
                let b = s.rho_pairs.in_wide(self.alg, &tm.module)?;
                tally.case();
                if a != b {
                    tally.violate(
                        tm.module.total_dim(),
                        json!({
                            "t": self.face_json(&s.face),
                            "rho": self.face_json(&s.rho),
                            "module": self.module_json(k),
                            "in_w_t": a,
                            "in_w_rho": b,
                        }),
                    );
                }
            }
            Ok(tally)
        });
        Tally::merge_all(parts.collect::<Vec<_>>())
    }

    fn check_silting_semistable(&self) -> Result<Tally> {
        let siltings = self.siltings()?;
        let parts = siltings.par_iter().map(|s| {
            let mut tally = Tally::default();
            let n = self.alg.vertex_count();
            let mut assigned = vec![0; n];
            for &k in s.triangle.lambda.iter().chain(&s.triangle.rho) {
                assigned[k] += 1;
            }
            tally.case();
            if assigned.iter().any(|&c| c != 1) {
                tally.violate(
                    0,
                    json!({
                        "rule": "every summand lies in exactly one of T_lambda, T_rho",
                        "t": self.face_json(&s.face),
                        "lambda": self.face_json(&s.lambda),
                        "rho": self.face_json(&s.rho),
                    }),
                );
            }
            for theta in self.thetas(self.face_index(&s.rho))? {
                for (k, tm) in self.modules.iter().enumerate() {
                    let a = s.wide.contains(self.alg, &tm.module);
                    let ss = semistability_from_submodules(&theta, tm.module.dims(), self.submodules(k)?);
                    tally.case();
                    if a != ss.holds() {
                        tally.violate(
                            tm.module.total_dim(),
                            json!({
                                "t": self.face_json(&s.face),
                                "rho": self.face_json(&s.rho),
                                "theta": theta.to_strings(),
                                "module": self.module_json(k),
                                "in_w_t": a,
                                "semistability": ss,
                            }),
                        );
                    }
                }
            }
            Ok(tally)
        });
        Tally::merge_all(parts.collect::<Vec<_>>())
    }

    fn check_fan(&self) -> Result<Tally> {
        let n = self.alg.vertex_count();
        let mut rng = ChaCha8Rng::seed_from_u64(self.plan.seed);
        rng.set_stream(STREAM_FAN);
        let samples: Vec<Vec<Q>> = (0..self.plan.fan_samples)
            .map(|_| {
                (0..n)
                    .map(|_| rational::ratio(rng.gen_range(-16..=16), rng.gen_range(1..=16)))
                    .collect()
            })
            .collect();
        let show = |v: &[Q]| v.iter().map(rational::format).collect::<Vec<_>>();

        let located = samples.par_iter().map(|theta| {
            let mut tally = Tally::default();
            tally.case();
            match locate_cone(&self.catalog, theta) {
                Ok(_) => {}
                Err(e @ (Error::NoCone(_) | Error::Internal(_))) => {
                    tally.violate(0, json!({ "theta": show(theta), "error": e.to_string() }));
                }
                Err(e) => return Err(e),
            }
            Ok(tally)
        });
        let mut tally = Tally::merge_all(located.collect::<Vec<_>>())?;

        let round_trip = (0..self.catalog.faces.len()).into_par_iter().map(|f| {
            let mut tally = Tally::default();
            let face = &self.catalog.faces[f];
            let ones = vec![rational::int(1); face.len()];
            let theta = theta_from_face(self.alg, &self.catalog, face, &ones)?;
            tally.case();
            let found = locate_cone(&self.catalog, theta.coeffs());
            let ok = matches!(&found, Ok(loc) if loc.face == *face && loc.weights == ones);
            if !ok {
                tally.violate(
                    0,
                    json!({
                        "u": self.face_json(face),
                        "theta": theta.to_strings(),
                        "located": match found {
                            Ok(loc) => json!({ "u": self.face_json(&loc.face), "weights": show(&loc.weights) }),
                            Err(e) => Value::from(e.to_string()),
                        },
                    }),
                );
            }
            Ok(tally)
        });
        tally.merge(Tally::merge_all(round_trip.collect::<Vec<_>>())?);

        for t in &self.catalog.siltings {
            tally.case();
            let det = rational::determinant(&self.catalog.g_vectors(t));
            if det != rational::int(1) && det != rational::int(-1) {
                tally.violate(
                    0,
                    json!({ "rule": "g-vectors of a silting complex form a Z-basis", "t": self.face_json(t), "determinant": rational::format(&det) }),
                );
            }
        }
        Ok(tally)
    }

    fn check_table(&self) -> Result<CheckRecord> {
        let Some(golden) = &self.plan.golden else {
            return Ok(CheckRecord {
                check: Check::Table.name().into(),
                status: Status::Skip,
                cases: 0,
                counterexample: None,
                note: Some("no golden table supplied".into()),
            });
        };
        let mut computed = table(self.alg, &self.catalog)?;
        let mut expected: Vec<TableRow> = golden.iter().cloned().map(TableRow::canonical).collect();
        computed.sort();
        expected.sort();
        let cases = expected.len().max(computed.len()) as u64;
        let first_diff = (0..cases as usize).find(|&i| expected.get(i) != computed.get(i));
        Ok(match first_diff {
            None => CheckRecord {
                check: Check::Table.name().into(),
                status: Status::Pass,
                cases,
                counterexample: None,
                note: None,
            },
            Some(i) => CheckRecord {
                check: Check::Table.name().into(),
                status: Status::Fail,
                cases,
                counterexample: Some(json!({
                    "row": i,
                    "expected": expected.get(i),
                    "computed": computed.get(i),
                })),
                note: Some(format!(
                    "{} expected rows, {} computed rows",
                    expected.len(),
                    computed.len()
                )),
            },
        })
    }
}

fn record_error(check: Check, e: Error) -> CheckRecord {
    let status = match e {
        Error::Internal(_) => Status::Fail,
        _ => Status::Inconclusive,
    };
    CheckRecord {
        check: check.name().into(),
        status,
        cases: 0,
        counterexample: None,
        note: Some(e.to_string()),
    }
}

fn overall(records: &[CheckRecord]) -> Status {
    if records.iter().any(|r| r.status == Status::Fail) {
        Status::Fail
    } else if records.iter().any(|r| r.status == Status::Inconclusive) {
        Status::Inconclusive
    } else {
        Status::Pass
    }
}

/// Runs the requested checks. Enumeration problems are reported as
/// inconclusive records rather than errors.
pub fn run_suite(alg: &Algebra, plan: &VerificationPlan) -> Verdict {
    let dim_bound = plan.dim_bound.unwrap_or_else(|| default_dim_bound(alg));
    let mut verdict = Verdict {
        status: Status::Pass,
        seed: plan.seed,
        dim_bound,
        characteristic: alg.p(),
        weight_draws: plan.draws,
        catalog: None,
        checks: Vec::new(),
    };
    let catalog = match Catalog::build(alg, dim_bound) {
        Ok(c) => c,
        Err(e) => {
            verdict.checks = plan.checks.iter().map(|&c| record_error(c, e.clone())).collect();
            verdict.status = overall(&verdict.checks);
            return verdict;
        }
    };
    let ctx = Context::new(alg, plan, catalog);
    verdict.catalog = Some(CatalogSizes {
        indecomposables: ctx.catalog.indecomposables.len(),
        presilting_indecomposables: ctx.catalog.entries.len(),
        presilting: ctx.catalog.faces.len(),
        silting: ctx.catalog.siltings.len(),
        test_modules: ctx.modules.len(),
    });
    for &check in &plan.checks {
        let record = if check == Check::Table {
            ctx.check_table().unwrap_or_else(|e| record_error(check, e))
        } else {
            match ctx.run(check) {
                Ok(tally) => CheckRecord {
                    check: check.name().into(),
                    status: if tally.worst.is_some() { Status::Fail } else { Status::Pass },
                    cases: tally.cases,
                    counterexample: tally.worst.map(|v| v.payload),
                    note: None,
                },
                Err(e) => record_error(check, e),
            }
        };
        verdict.checks.push(record);
    }
    verdict.status = overall(&verdict.checks);
    verdict
}

#[cfg(test)]
mod tests {
    use super::*;

    const POINT: &str = r#"{"field":{"p":2},"vertices":["1"],"arrows":[]}"#;

    #[test]
    fn point_algebra_passes() {
        let alg = Algebra::parse(POINT).unwrap();
        let plan = VerificationPlan {
            fan_samples: 50,
            pairs: 20,
            ..VerificationPlan::default()
        };
        let verdict = run_suite(&alg, &plan);
        assert_eq!(verdict.status, Status::Pass, "{:#}", verdict.to_json());
        assert_eq!(verdict.record(Check::Table).unwrap().status, Status::Skip);
        let sizes = verdict.catalog.as_ref().unwrap();
        assert_eq!((sizes.presilting_indecomposables, sizes.silting), (2, 2));
    }

    #[test]
    fn deterministic() {
        let alg = Algebra::parse(POINT).unwrap();
        let plan = VerificationPlan {
            fan_samples: 20,
            pairs: 10,
            seed: 7,
            ..VerificationPlan::default()
        };
        assert_eq!(run_suite(&alg, &plan).to_json(), run_suite(&alg, &plan).to_json());
    }

    #[test]
    fn corrupted_golden_fails() {
        let alg = Algebra::parse(POINT).unwrap();
        let catalog = Catalog::build(&alg, 1).unwrap();
        let mut rows = table(&alg, &catalog).unwrap();
        rows[0].wide.push("2".into());
        let plan = VerificationPlan {
            checks: vec![Check::Table],
            golden: Some(rows),
            ..VerificationPlan::default()
        };
        let verdict = run_suite(&alg, &plan);
        assert_eq!(verdict.status, Status::Fail);
        assert!(verdict.checks[0].counterexample.is_some());
    }

    #[test]
    fn small_bound_is_inconclusive() {
        let alg = Algebra::parse(crate::repmod::tests::THREE_CYCLE).unwrap();
        let plan = VerificationPlan {
            dim_bound: Some(1),
            checks: vec![Check::Fan],
            ..VerificationPlan::default()
        };
        assert_eq!(run_suite(&alg, &plan).status, Status::Inconclusive);
    }

    #[test]
    fn labels_are_disambiguated() {
        let alg = Algebra::parse(POINT).unwrap();
        let s = simple(&alg, 0);
        assert_eq!(module_labels(&alg, &[s.clone(), s]), vec!["1#1", "1#2"]);
    }

    #[test]
    fn check_names_round_trip() {
        for c in Check::ALL {
            assert_eq!(Check::parse(c.name()).unwrap(), c);
        }
        assert_eq!(Check::parse_list("fan,serre,fan").unwrap(), vec![Check::Serre, Check::Fan]);
        assert!(Check::parse("nope").is_err());
    }
}
