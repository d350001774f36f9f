use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use silting::rational::{self, Q};
use silting::repmod::{hom_dim, simple, submodule_dim_vectors};
use silting::stability::{
    is_semistable, locate_cone, semistability_from_submodules, theta_from_face, theta_from_presilting, SiltingWide,
};
use silting::twoterm::{derived_homs, euler_form, euler_form_by_homs};
use silting::verify::{module_labels, parse_table, run_suite, Status, VerificationPlan};
use silting::{Algebra, Catalog, Module, StabilityForm, TorsionPairs, TwoTermComplex};

const SEED: u64 = 20;
const DRAWS: usize = 5;

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

struct Setup {
    alg: Algebra,
    catalog: Catalog,
    labels: Vec<String>,
    /// The indecomposables followed by all pairwise sums `M_i ⊕ M_j`, `i ≤ j`.
    tests: Vec<(String, Module)>,
}

impl Setup {
    fn new() -> Setup {
        let alg = Algebra::parse(&fixture("threecycle.json")).unwrap();
        let catalog = Catalog::build(&alg, 3).unwrap();
        let labels = module_labels(&alg, &catalog.indecomposables);
        let ind = &catalog.indecomposables;
        let mut tests: Vec<(String, Module)> = labels.iter().cloned().zip(ind.iter().cloned()).collect();
        for i in 0..ind.len() {
            for j in i..ind.len() {
                tests.push((format!("{} + {}", labels[i], labels[j]), ind[i].direct_sum(&ind[j])));
            }
        }
        Setup { alg, catalog, labels, tests }
    }

    fn entry(&self, notation: &str) -> usize {
        let g = silting::twoterm::parse_g_notation(&self.alg, notation).unwrap();
        self.catalog.find_g(&g).unwrap()
    }

    fn label_of(&self, dims: &[usize]) -> &str {
        let k = self.catalog.indecomposables.iter().position(|m| m.dims() == dims).unwrap();
        &self.labels[k]
    }
}

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion1(s: &Setup, start: Instant) -> Outcome {
    let golden = parse_table(&fixture("threecycle.table.json")).map_err(|e| e.to_string())?;
    let mut expected: Vec<(Vec<String>, Vec<String>)> =
        golden.iter().map(|r| (r.silting.clone(), r.rho.clone())).collect();
    let mut computed = Vec::new();
    for t in &s.catalog.siltings {
        let tri = s.catalog.decompose_silting(&s.alg, t).map_err(|e| e.to_string())?;
        let mut names: Vec<String> = t.iter().map(|&k| s.catalog.label(&s.alg, k)).collect();
        let mut rho: Vec<String> = tri.rho.iter().map(|&p| s.catalog.label(&s.alg, t[p])).collect();
        names.sort();
        rho.sort();
        computed.push((names, rho));
    }
    expected.sort();
    computed.sort();
    let secs = start.elapsed().as_secs_f64();
    ensure(computed.len() == 20, || format!("{} siltings", computed.len()))?;
    ensure(computed == expected, || {
        let miss = computed.iter().find(|r| !expected.contains(r));
        format!("row mismatch, first computed row not in the table: {miss:?}")
    })?;
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("20 siltings, g-vectors and T_rho match, {secs:.1} s"))
}

fn criterion2(s: &Setup) -> Outcome {
    let u1 = s.catalog.entries[s.entry("P_2-P_3")].complex.clone();
    let u2 = s.catalog.entries[s.entry("-P_1")].complex.clone();
    for (a1, a2) in [(1, 1), (1, 2)] {
        let theta = theta_from_presilting(&s.alg, &[u1.clone(), u2.clone()], &[rational::int(a1), rational::int(a2)])
            .map_err(|e| e.to_string())?;
        let (a1, a2) = (rational::int(a1), rational::int(a2));
        // rows of the picture: projectives, then length two, then simples
        let layout: [(&[usize], Q, &str); 9] = [
            (&[1, 1, 1], -a2.clone(), "3/1/2"),
            (&[1, 1, 1], -a2.clone(), "2/3/1"),
            (&[1, 1, 1], -a2.clone(), "1/2/3"),
            (&[1, 0, 1], -a1.clone() - a2.clone(), "3/1"),
            (&[0, 1, 1], rational::int(0), "2/3"),
            (&[1, 1, 0], a1.clone() - a2.clone(), "1/2"),
            (&[1, 0, 0], -a2.clone(), "1"),
            (&[0, 0, 1], -a1.clone(), "3"),
            (&[0, 1, 0], a1.clone(), "2"),
        ];
        for (dims, want, label) in layout {
            let k = s.labels.iter().position(|l| l == label).ok_or(format!("no module {label}"))?;
            let m = &s.catalog.indecomposables[k];
            ensure(m.dims() == dims, || format!("{label} has dims {:?}", m.dims()))?;
            let got = theta.value(m.dims());
            ensure(got == want, || {
                format!("theta({label}) = {} at a = ({a1}, {a2}), expected {}", rational::format(&got), rational::format(&want))
            })?;
        }
    }
    Ok("theta values on all 9 indecomposables for a = (1,1) and (1,2)".into())
}

fn draw_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<Q> {
    (0..n)
        .map(|_| rational::ratio(rng.gen_range(1..=16), rng.gen_range(1..=16)))
        .collect()
}

/// Criteria 3 and 5 share one sweep over faces, weight draws and test modules.
fn criteria3_and_5(s: &Setup) -> (Outcome, Outcome) {
    let subs: Vec<_> = s.tests.iter().map(|(_, m)| submodule_dim_vectors(&s.alg, m).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut cases, mut mismatch, mut violation) = (0usize, None, None);
    let zero = rational::int(0);
    for face in &s.catalog.faces {
        let u = s.catalog.sum(&s.alg, face);
        let pairs = TorsionPairs::new(&s.alg, &u);
        let member: Vec<_> = s
            .tests
            .iter()
            .map(|(_, m)| {
                (
                    pairs.in_wide(&s.alg, m).unwrap(),
                    pairs.in_t_plus(&s.alg, m).unwrap(),
                    pairs.in_t_minus(&s.alg, m),
                    pairs.in_f_minus(&s.alg, m).unwrap(),
                    pairs.in_f_plus(&s.alg, m),
                )
            })
            .collect();
        for _ in 0..DRAWS {
            let w = draw_weights(&mut rng, face.len());
            let theta = theta_from_face(&s.alg, &s.catalog, face, &w).unwrap();
            for (k, (label, m)) in s.tests.iter().enumerate() {
                cases += 1;
                let (wide, tp, tm, fm, fp) = member[k];
                let ss = semistability_from_submodules(&theta, m.dims(), &subs[k]).holds();
                if wide != ss && mismatch.is_none() {
                    mismatch = Some(format!("U = {face:?}, M = {label}: in W_U {wide}, semistable {ss}"));
                }
                let v = theta.value(m.dims());
                let ok = (!tp || v >= zero) && (!tm || v > zero) && (!fm || v <= zero) && (!fp || v < zero);
                if !ok && violation.is_none() {
                    violation = Some(format!("U = {face:?}, M = {label}, theta(M) = {}", rational::format(&v)));
                }
            }
        }
    }
    let expected = s.catalog.faces.len() * DRAWS * 54;
    let shape = ensure(s.tests.len() == 54 && cases == expected, || format!("{cases} cases"));
    let c3 = shape.clone().and_then(|_| match &mismatch {
        None => Ok(format!("{cases} cases ({} faces x {DRAWS} draws x 54 modules), 0 mismatches", s.catalog.faces.len())),
        Some(m) => Err(m.clone()),
    });
    let c5 = shape.and_then(|_| match &violation {
        None => Ok(format!("{cases} cases, 0 sign violations")),
        Some(m) => Err(m.clone()),
    });
    (c3, c5)
}

fn members(s: &Setup, mut test: impl FnMut(&Module) -> bool) -> Vec<String> {
    let mut out: Vec<String> = s
        .catalog
        .indecomposables
        .iter()
        .zip(&s.labels)
        .filter(|(m, _)| test(m))
        .map(|(_, l)| l.clone())
        .collect();
    out.sort();
    out
}

fn criterion4(s: &Setup) -> Outcome {
    for t in &s.catalog.siltings {
        let tri = s.catalog.decompose_silting(&s.alg, t).map_err(|e| e.to_string())?;
        let rho: Vec<usize> = tri.rho.iter().map(|&p| t[p]).collect();
        let wt = SiltingWide::new(&s.alg, &s.catalog, t).map_err(|e| e.to_string())?;
        let pairs = TorsionPairs::new(&s.alg, &s.catalog.sum(&s.alg, &rho));
        let theta = theta_from_face(&s.alg, &s.catalog, &rho, &vec![rational::int(1); rho.len()])
            .map_err(|e| e.to_string())?;
        let a = members(s, |m| wt.contains(&s.alg, m));
        let b = members(s, |m| pairs.in_wide(&s.alg, m).unwrap());
        let c = members(s, |m| is_semistable(&s.alg, &theta, m).unwrap().holds());
        ensure(a == b && b == c, || format!("T = {t:?}: W^T {a:?}, W_(T_rho) {b:?}, semistable {c:?}"))?;
    }

    let (u1, u2, u3) = (s.entry("P_2-P_3"), s.entry("-P_1"), s.entry("P_2-P_1"));
    let mut t = vec![u1, u2, u3];
    t.sort();
    ensure(s.catalog.siltings.contains(&t), || "U_1 + U_2 + U_3 is not silting".into())?;
    let wt = SiltingWide::new(&s.alg, &s.catalog, &t).map_err(|e| e.to_string())?;
    let w = members(s, |m| wt.contains(&s.alg, m));
    ensure(w == [s.label_of(&[0, 1, 1])], || format!("W^T = {w:?}"))?;
    let tri = s.catalog.decompose_silting(&s.alg, &t).map_err(|e| e.to_string())?;
    let multiset = |mult: &[usize]| -> BTreeMap<usize, usize> {
        t.iter().zip(mult).filter(|(_, &k)| k > 0).map(|(&e, &k)| (e, k)).collect()
    };
    let want_prime = BTreeMap::from([(u3, 2)]);
    let want_double = BTreeMap::from([(u1, 1), (u2, 3)]);
    ensure(multiset(&tri.t_prime) == want_prime, || format!("T' = {:?}", tri.t_prime))?;
    ensure(multiset(&tri.t_double_prime) == want_double, || format!("T'' = {:?}", tri.t_double_prime))?;
    Ok("W^T = W_(T_rho) = semistable set for all 20; example gives {2/3}, T' = 2 U_3, T'' = U_1 + 3 U_2".into())
}

fn criterion6(s: &Setup) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x6);
    let pairs = 128;
    for _ in 0..pairs {
        let face = &s.catalog.faces[rng.gen_range(0..s.catalog.faces.len())];
        let (label, m) = &s.tests[rng.gen_range(0..s.tests.len())];
        let p = s.catalog.sum(&s.alg, face);
        let dh = derived_homs(&s.alg, &p, m);
        let e = euler_form(&s.alg, &p, m);
        let first = hom_dim(&s.alg, &p.h0(&s.alg), m) as i64 - dh.to_shift as i64;
        let second = dh.module_to_nu as i64 - hom_dim(&s.alg, m, &p.hminus1_nu(&s.alg)) as i64;
        ensure(e == first && e == second && e == euler_form_by_homs(&s.alg, &p, m), || {
            format!("P = {face:?}, M = {label}: <P,M> = {e}, (3.4) side {first}, (3.5) side {second}")
        })?;
        ensure(dh.to_module == dh.module_to_nu, || {
            format!("P = {face:?}, M = {label}: Hom(P,M) {} vs Hom(M,nu P) {}", dh.to_module, dh.module_to_nu)
        })?;
    }
    let n = s.alg.vertex_count();
    for i in 0..n {
        for j in 0..n {
            let x = TwoTermComplex::stalk(i);
            let sj = simple(&s.alg, j);
            let want = i64::from(i == j);
            ensure(euler_form(&s.alg, &x, &sj) == want && euler_form_by_homs(&s.alg, &x, &sj) == want, || {
                format!("<P_{}, S_{}> != {want}", i + 1, j + 1)
            })?;
        }
    }
    Ok(format!("{pairs} random pairs satisfy both identities and Serre duality; <P_i,S_j> = delta_ij"))
}

fn criterion7(s: &Setup, start: Instant) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x7);
    let n = s.alg.vertex_count();
    let samples = 1000;
    for _ in 0..samples {
        let theta: Vec<Q> = (0..n)
            .map(|_| rational::ratio(rng.gen_range(-16..=16), rng.gen_range(1..=16)))
            .collect();
        // independent count of the faces whose open cone holds θ
        let hits = s
            .catalog
            .faces
            .iter()
            .filter(|f| {
                if f.is_empty() {
                    return theta.iter().all(|x| *x == rational::int(0));
                }
                rational::solve_independent(&s.catalog.g_vectors(f), &theta)
                    .is_some_and(|w| w.iter().all(rational::is_positive))
            })
            .count();
        let shown: Vec<String> = theta.iter().map(rational::format).collect();
        ensure(hits == 1, || format!("theta {shown:?} lies in {hits} cones"))?;
        locate_cone(&s.catalog, &theta).map_err(|e| format!("theta {shown:?}: {e}"))?;
    }
    for face in &s.catalog.faces {
        let ones = vec![rational::int(1); face.len()];
        let theta: StabilityForm = theta_from_face(&s.alg, &s.catalog, face, &ones).map_err(|e| e.to_string())?;
        let loc = locate_cone(&s.catalog, theta.coeffs()).map_err(|e| e.to_string())?;
        ensure(&loc.face == face && loc.weights == ones, || format!("round trip failed for {face:?}"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 120.0, || format!("took {secs:.1} s"))?;
    Ok(format!(
        "{samples} random theta in exactly one cone; {} faces round trip; {secs:.1} s",
        s.catalog.faces.len()
    ))
}

fn criterion8() -> Outcome {
    let mut notes = Vec::new();
    for stem in ["point", "a2"] {
        let alg = Algebra::parse(&fixture(&format!("{stem}.json"))).map_err(|e| e.to_string())?;
        let plan = VerificationPlan {
            seed: SEED,
            golden: Some(parse_table(&fixture(&format!("{stem}.table.json"))).map_err(|e| e.to_string())?),
            ..VerificationPlan::default()
        };
        let verdict = run_suite(&alg, &plan);
        ensure(verdict.status == Status::Pass, || format!("{stem}: {}", verdict.to_json()))?;
        ensure(verdict.checks.iter().all(|c| c.status == Status::Pass), || format!("{stem}: a check did not run"))?;
        notes.push(format!("{stem} {} checks", verdict.checks.len()));
    }
    Ok(format!("full suite passes: {}", notes.join(", ")))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let s = Setup::new();
    let c1 = criterion1(&s, start);
    let c2 = criterion2(&s);
    let (c3, c5) = criteria3_and_5(&s);
    let c4 = criterion4(&s);
    let c6 = criterion6(&s);
    let fan_start = Instant::now();
    let c7 = criterion7(&s, fan_start);
    let c8 = criterion8();

    let mut failed = 0;
    for (k, c) in [c1, c2, c3, c4, c5, c6, c7, c8].into_iter().enumerate() {
        match c {
            Ok(msg) => println!("criterion {}: PASS  {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL  {msg}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
