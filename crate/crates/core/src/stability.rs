//! Stability forms on `K_0(mod Λ)`, semistability, the torsion pairs of a
//! two-term presilting complex, and cone location in `K_0(proj Λ) ⊗ Q`.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::rational::{self, Q};
use crate::repmod::{
    fac_membership, hom_dim, reject_dims, sub_membership, submodule_dim_vectors, trace_dims, DimVector, Module,
};
use crate::twoterm::{derived_homs, is_presilting, summands, Catalog, Triangle, TwoTermComplex};

/// The complex and weights a form was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub summands: Vec<TwoTermComplex>,
    pub weights: Vec<Q>,
}

/// A linear form `θ` on `K_0(mod Λ) ⊗ Q`, written in the basis of simples.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityForm {
    coeffs: Vec<Q>,
    provenance: Option<Provenance>,
}

impl StabilityForm {
    pub fn new(coeffs: Vec<Q>) -> StabilityForm {
        StabilityForm {
            coeffs,
            provenance: None,
        }
    }

    /// Parses `"-1,1/2,0"` and checks the length.
    pub fn parse(alg: &Algebra, s: &str) -> Result<StabilityForm> {
        let coeffs = rational::parse_vector(s)?;
        if coeffs.len() != alg.vertex_count() {
            return Err(Error::Query(format!(
                "theta has {} entries, expected {}",
                coeffs.len(),
                alg.vertex_count()
            )));
        }
        Ok(StabilityForm::new(coeffs))
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn value(&self, v: &[usize]) -> Q {
        self.coeffs
            .iter()
            .zip(v)
            .fold(Q::zero(), |acc, (c, &x)| acc + c * rational::int(x as i64))
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rational::format).collect()
    }
}

fn check_weights(weights: &[Q], expected: usize) -> Result<()> {
    if weights.len() != expected {
        return Err(Error::Query(format!(
            "{} weights given for {expected} summands",
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_positive()) {
        return Err(Error::NonPositiveWeight(rational::format(w)));
    }
    Ok(())
}

fn weighted_sum(n: usize, gs: impl IntoIterator<Item = Vec<i64>>, weights: &[Q]) -> Vec<Q> {
    let mut coeffs = vec![Q::zero(); n];
    for (g, a) in gs.into_iter().zip(weights) {
        for (c, x) in coeffs.iter_mut().zip(g) {
            *c += a * rational::int(x);
        }
    }
    coeffs
}

/// `θ = Σ a_X ⟨X, -⟩` over the given indecomposable summands `X` of a
/// presilting complex.
pub fn theta_from_presilting(alg: &Algebra, parts: &[TwoTermComplex], weights: &[Q]) -> Result<StabilityForm> {
    check_weights(weights, parts.len())?;
    for x in parts {
        let pieces = summands(alg, x)?;
        if pieces.len() != 1 || pieces[0].1 != 1 {
            return Err(Error::Query("every listed summand must be indecomposable".into()));
        }
    }
    let total = TwoTermComplex::direct_sum_all(alg, parts.iter().cloned());
    if !is_presilting(alg, &total) {
        return Err(Error::NotPresilting);
    }
    let coeffs = weighted_sum(alg.vertex_count(), parts.iter().map(|x| x.g_vector(alg)), weights);
    Ok(StabilityForm {
        coeffs,
        provenance: Some(Provenance {
            summands: parts.to_vec(),
            weights: weights.to_vec(),
        }),
    })
}

/// [`theta_from_presilting`] for a face of the catalog.
pub fn theta_from_face(alg: &Algebra, catalog: &Catalog, face: &[usize], weights: &[Q]) -> Result<StabilityForm> {
    check_weights(weights, face.len())?;
    if !catalog.is_face(face) {
        return Err(Error::NotPresilting);
    }
    let coeffs = weighted_sum(alg.vertex_count(), catalog.g_vectors(face), weights);
    Ok(StabilityForm {
        coeffs,
        provenance: Some(Provenance {
            summands: face.iter().map(|&k| catalog.entries[k].complex.clone()).collect(),
            weights: weights.to_vec(),
        }),
    })
}

/// Outcome of a semistability test.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Semistability {
    Semistable,
    /// `θ(M) ≠ 0`.
    NonzeroValue {
        #[serde(serialize_with = "ser_q")]
        value: Q,
    },
    /// A submodule `L` with `θ(L) > 0`.
    DestabilizingSubmodule {
        dims: DimVector,
        #[serde(serialize_with = "ser_q")]
        value: Q,
    },
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational::format(x))
}

impl Semistability {
    pub fn holds(&self) -> bool {
        matches!(self, Semistability::Semistable)
    }
}

/// Semistability from a precomputed set of submodule dimension vectors.
pub fn semistability_from_submodules(theta: &StabilityForm, dims: &[usize], subs: &BTreeSet<DimVector>) -> Semistability {
    let value = theta.value(dims);
    if !value.is_zero() {
        return Semistability::NonzeroValue { value };
    }
    let worst = subs
        .iter()
        .map(|v| (theta.value(v), v))
        .filter(|(x, _)| x.is_positive())
        .fold(None::<(Q, &DimVector)>, |best, (x, v)| match best {
            Some((ref b, _)) if *b >= x => best,
            _ => Some((x, v)),
        });
    match worst {
        None => Semistability::Semistable,
        Some((value, v)) => Semistability::DestabilizingSubmodule { dims: v.clone(), value },
    }
}

/// `M` is θ-semistable when `θ(M) = 0` and `θ(L) ≤ 0` for every submodule `L`.
pub fn is_semistable(alg: &Algebra, theta: &StabilityForm, m: &Module) -> Result<Semistability> {
    let value = theta.value(m.dims());
    if !value.is_zero() {
        return Ok(Semistability::NonzeroValue { value });
    }
    let subs = submodule_dim_vectors(alg, m)?;
    Ok(semistability_from_submodules(theta, m.dims(), &subs))
}

/// Why a module fails one of the membership tests.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// A nonzero Hom space, named and with its dimension.
    Hom { space: String, dim: usize },
    /// The trace of the generator is the proper submodule with these dims.
    Trace { dims: DimVector },
    /// The joint kernel of all maps into the cogenerator has these dims.
    Reject { dims: DimVector },
}

/// The torsion pairs `(T^+, F^+) = (⊥H^{-1}(νU), Sub H^{-1}(νU))` and
/// `(T^-, F^-) = (Fac H^0(U), H^0(U)^⊥)` of a two-term presilting `U`.
#[derive(Clone, Debug)]
pub struct TorsionPairs {
    complex: TwoTermComplex,
    h0: Module,
    hminus1_nu: Module,
}

impl TorsionPairs {
    pub fn new(alg: &Algebra, u: &TwoTermComplex) -> TorsionPairs {
        TorsionPairs {
            complex: u.clone(),
            h0: u.h0(alg),
            hminus1_nu: u.hminus1_nu(alg),
        }
    }

    pub fn complex(&self) -> &TwoTermComplex {
        &self.complex
    }

    pub fn h0(&self) -> &Module {
        &self.h0
    }

    pub fn hminus1_nu(&self) -> &Module {
        &self.hminus1_nu
    }

    /// `Hom_D(U, M[1]) = 0`, checked against `Hom(M, H^{-1}(νU)) = 0`.
    pub fn t_plus(&self, alg: &Algebra, m: &Module) -> Result<std::result::Result<(), Certificate>> {
        let shift = derived_homs(alg, &self.complex, m).to_shift;
        let into = hom_dim(alg, m, &self.hminus1_nu);
        if (shift == 0) != (into == 0) {
            return Err(Error::Internal(format!(
                "T+ routes disagree: Hom_D(U, M[1]) has dimension {shift}, Hom(M, H^-1(nu U)) has dimension {into}"
            )));
        }
        Ok(if shift == 0 {
            Ok(())
        } else {
            Err(Certificate::Hom {
                space: "Hom_D(U, M[1])".into(),
                dim: shift,
            })
        })
    }

    /// `Hom(H^0(U), M) = 0`, checked against `Hom_D(M, νU) = 0`.
    pub fn f_minus(&self, alg: &Algebra, m: &Module) -> Result<std::result::Result<(), Certificate>> {
        let from = hom_dim(alg, &self.h0, m);
        let nu = derived_homs(alg, &self.complex, m).module_to_nu;
        if (from == 0) != (nu == 0) {
            return Err(Error::Internal(format!(
                "F- routes disagree: Hom(H^0(U), M) has dimension {from}, Hom_D(M, nu U) has dimension {nu}"
            )));
        }
        Ok(if from == 0 {
            Ok(())
        } else {
            Err(Certificate::Hom {
                space: "Hom(H^0(U), M)".into(),
                dim: from,
            })
        })
    }

    pub fn t_minus(&self, alg: &Algebra, m: &Module) -> std::result::Result<(), Certificate> {
        let dims = trace_dims(alg, &self.h0, m);
        if m.is_zero() || &dims == m.dims() {
            Ok(())
        } else {
            Err(Certificate::Trace { dims })
        }
    }

    pub fn f_plus(&self, alg: &Algebra, m: &Module) -> std::result::Result<(), Certificate> {
        let dims = reject_dims(alg, &self.hminus1_nu, m);
        if dims.iter().all(|&d| d == 0) {
            Ok(())
        } else {
            Err(Certificate::Reject { dims })
        }
    }

    pub fn in_t_plus(&self, alg: &Algebra, m: &Module) -> Result<bool> {
        Ok(self.t_plus(alg, m)?.is_ok())
    }

    pub fn in_f_minus(&self, alg: &Algebra, m: &Module) -> Result<bool> {
        Ok(self.f_minus(alg, m)?.is_ok())
    }

    pub fn in_t_minus(&self, alg: &Algebra, m: &Module) -> bool {
        fac_membership(alg, &self.h0, m)
    }

    pub fn in_f_plus(&self, alg: &Algebra, m: &Module) -> bool {
        sub_membership(alg, &self.hminus1_nu, m)
    }

    /// `W_U = T^+ ∩ F^-`.
    pub fn in_wide(&self, alg: &Algebra, m: &Module) -> Result<bool> {
        Ok(self.in_t_plus(alg, m)? && self.in_f_minus(alg, m)?)
    }
}

/// `W^T = Fac H^0(T) ∩ H^0(T_ρ)^⊥` for a two-term silting `T = T_λ ⊕ T_ρ`.
#[derive(Clone, Debug)]
pub struct SiltingWide {
    h0: Module,
    h0_rho: Module,
}

impl SiltingWide {
    pub fn new(alg: &Algebra, catalog: &Catalog, silting: &[usize]) -> Result<SiltingWide> {
        let triangle = catalog.decompose_silting(alg, silting)?;
        Ok(SiltingWide::from_triangle(alg, catalog, silting, &triangle))
    }

    pub fn from_triangle(alg: &Algebra, catalog: &Catalog, silting: &[usize], triangle: &Triangle) -> SiltingWide {
        let rho: Vec<usize> = triangle.rho.iter().map(|&k| silting[k]).collect();
        SiltingWide {
            h0: catalog.h0(alg, silting),
            h0_rho: catalog.h0(alg, &rho),
        }
    }

    pub fn from_parts(alg: &Algebra, parts: &[TwoTermComplex]) -> Result<SiltingWide> {
        let triangle = crate::twoterm::silting_decompose(alg, parts)?;
        let h0s: Vec<Module> = parts.iter().map(|x| x.h0(alg)).collect();
        let rho: Vec<&Module> = triangle.rho.iter().map(|&k| &h0s[k]).collect();
        Ok(SiltingWide {
            h0_rho: Module::direct_sum_all(alg, rho),
            h0: Module::direct_sum_all(alg, &h0s),
        })
    }

    pub fn contains(&self, alg: &Algebra, m: &Module) -> bool {
        fac_membership(alg, &self.h0, m) && hom_dim(alg, &self.h0_rho, m) == 0
    }
}

/// Per-module summary of all membership tests for one `U` and `θ`.
#[derive(Clone, Debug, Serialize)]
pub struct MembershipReport {
    pub module: String,
    pub dims: DimVector,
    pub in_t_plus: bool,
    pub in_t_minus: bool,
    pub in_f_plus: bool,
    pub in_f_minus: bool,
    pub in_w_u: bool,
    pub theta: Vec<String>,
    pub theta_value: String,
    pub semistability: Semistability,
    pub witnesses: Vec<(String, Certificate)>,
}

impl MembershipReport {
    pub fn build(
        alg: &Algebra,
        pairs: &TorsionPairs,
        theta: &StabilityForm,
        module: String,
        m: &Module,
    ) -> Result<MembershipReport> {
        let mut witnesses = Vec::new();
        let mut record = |name: &str, r: std::result::Result<(), Certificate>| match r {
            Ok(()) => true,
            Err(c) => {
                witnesses.push((name.to_string(), c));
                false
            }
        };
        let in_t_plus = record("t_plus", pairs.t_plus(alg, m)?);
        let in_t_minus = record("t_minus", pairs.t_minus(alg, m));
        let in_f_plus = record("f_plus", pairs.f_plus(alg, m));
        let in_f_minus = record("f_minus", pairs.f_minus(alg, m)?);
        Ok(MembershipReport {
            module,
            dims: m.dims().clone(),
            in_t_plus,
            in_t_minus,
            in_f_plus,
            in_f_minus,
            in_w_u: in_t_plus && in_f_minus,
            theta: theta.to_strings(),
            theta_value: rational::format(&theta.value(m.dims())),
            semistability: is_semistable(alg, theta, m)?,
            witnesses,
        })
    }
}

/// A point of the fan: the face `U` of the catalog and the weights with
/// `θ = Σ a_i g(U_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeLocation {
    pub face: Vec<usize>,
    pub weights: Vec<Q>,
}

/// Finds the unique face whose open cone contains `θ`.
pub fn locate_cone(catalog: &Catalog, theta: &[Q]) -> Result<ConeLocation> {
    let mut hits = catalog.faces.iter().filter_map(|face| {
        let cols = catalog.g_vectors(face);
        let weights = rational::solve_independent(&cols, theta)?;
        weights.iter().all(|w| w.is_positive()).then(|| ConeLocation {
            face: face.clone(),
            weights,
        })
    });
    let shown = || theta.iter().map(rational::format).collect::<Vec<_>>().join(",");
    let first = hits.next().ok_or_else(|| Error::NoCone(shown()))?;
    if let Some(second) = hits.next() {
        return Err(Error::Internal(format!(
            "theta = {} lies in two cones: faces {:?} and {:?}",
            shown(),
            first.face,
            second.face
        )));
    }
    Ok(first)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::repmod::tests::{three_cycle, uniserial};
    use crate::repmod::{projective, simple};

    fn example_u(catalog: &Catalog) -> Vec<usize> {
        let mut face = vec![catalog.find_g(&[0, 1, -1]).unwrap(), catalog.find_g(&[-1, 0, 0]).unwrap()];
        face.sort();
        face
    }

    #[test]
    fn theta_of_example() {
        let alg = three_cycle();
        let catalog = Catalog::build(&alg, 3).unwrap();
        let parts: Vec<TwoTermComplex> = [[0, 1, -1], [-1, 0, 0]]
            .iter()
            .map(|g| catalog.entries[catalog.find_g(g).unwrap()].complex.clone())
            .collect();
        let theta = theta_from_presilting(&alg, &parts, &[int(1), int(1)]).unwrap();
        assert_eq!(theta.coeffs(), &[int(-1), int(1), int(-1)]);
        assert_eq!(theta.value(&[1, 0, 1]), int(-2));
        assert_eq!(theta.value(&[0, 1, 0]), int(1));
        assert_eq!(theta.value(&[0, 0, 0]), int(0));
        assert_eq!(
            theta_from_presilting(&alg, &parts, &[int(1), int(0)]),
            Err(Error::NonPositiveWeight("0".into()))
        );
        let empty = theta_from_presilting(&alg, &[], &[]).unwrap();
        assert_eq!(empty.coeffs(), &[int(0), int(0), int(0)]);
        let clash = [TwoTermComplex::stalk(0), TwoTermComplex::shifted(0)];
        assert_eq!(
            theta_from_presilting(&alg, &clash, &[int(1), int(1)]),
            Err(Error::NotPresilting)
        );
    }

    #[test]
    fn semistable_modules_of_example() {
        let alg = three_cycle();
        let theta = StabilityForm::new(vec![int(-1), int(1), int(-1)]);
        assert!(is_semistable(&alg, &theta, &uniserial(&alg, &[1, 2])).unwrap().holds());
        assert_eq!(
            is_semistable(&alg, &theta, &uniserial(&alg, &[0, 1])).unwrap(),
            Semistability::DestabilizingSubmodule {
                dims: vec![0, 1, 0],
                value: int(1)
            }
        );
        assert!(is_semistable(&alg, &theta, &Module::zero(&alg)).unwrap().holds());
        let zero = StabilityForm::new(vec![int(0); 3]);
        assert!(is_semistable(&alg, &zero, &projective(&alg, 1)).unwrap().holds());
    }

    #[test]
    fn torsion_pairs_of_example() {
        let alg = three_cycle();
        let catalog = Catalog::build(&alg, 3).unwrap();
        let face = example_u(&catalog);
        let pairs = TorsionPairs::new(&alg, &catalog.sum(&alg, &face));
        let m23 = uniserial(&alg, &[1, 2]);
        assert!(pairs.in_t_plus(&alg, &m23).unwrap());
        assert!(pairs.in_f_minus(&alg, &m23).unwrap());
        assert!(!pairs.in_f_minus(&alg, &simple(&alg, 1)).unwrap());
        assert!(pairs.in_t_minus(&alg, &simple(&alg, 1)));
        let zero = Module::zero(&alg);
        assert!(pairs.in_t_plus(&alg, &zero).unwrap() && pairs.in_f_minus(&alg, &zero).unwrap());
        assert!(pairs.in_t_minus(&alg, pairs.h0()));
        assert!(pairs.in_f_plus(&alg, &pairs.hminus1_nu().clone()));
        let wide: Vec<usize> = (0..catalog.indecomposables.len())
            .filter(|&k| pairs.in_wide(&alg, &catalog.indecomposables[k]).unwrap())
            .collect();
        assert_eq!(wide.len(), 1);
        assert_eq!(catalog.indecomposables[wide[0]].dims(), &vec![0, 1, 1]);

        let trivial = TorsionPairs::new(&alg, &TwoTermComplex::zero());
        let shifted = TorsionPairs::new(&alg, &TwoTermComplex::direct_sum_all(&alg, (0..3).map(TwoTermComplex::shifted)));
        for m in &catalog.indecomposables {
            assert!(trivial.in_wide(&alg, m).unwrap());
            assert!(!shifted.in_wide(&alg, m).unwrap());
        }
    }

    #[test]
    fn wide_of_example_silting() {
        let alg = three_cycle();
        let catalog = Catalog::build(&alg, 3).unwrap();
        let mut t = example_u(&catalog);
        t.push(catalog.find_g(&[-1, 1, 0]).unwrap());
        t.sort();
        let w = SiltingWide::new(&alg, &catalog, &t).unwrap();
        let members: Vec<&DimVector> = catalog
            .indecomposables
            .iter()
            .filter(|m| w.contains(&alg, m))
            .map(|m| m.dims())
            .collect();
        assert_eq!(members, vec![&vec![0, 1, 1]]);
    }

    #[test]
    fn cones() {
        let alg = three_cycle();
        let catalog = Catalog::build(&alg, 3).unwrap();
        let loc = locate_cone(&catalog, &[int(-1), int(1), int(-1)]).unwrap();
        assert_eq!(loc.face, example_u(&catalog));
        assert_eq!(loc.weights, vec![int(1), int(1)]);
        let origin = locate_cone(&catalog, &[int(0), int(0), int(0)]).unwrap();
        assert!(origin.face.is_empty());
        let inner = locate_cone(&catalog, &[int(1), int(1), int(1)]).unwrap();
        assert_eq!(catalog.g_vectors(&inner.face), vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let ray = locate_cone(&catalog, &[ratio(0, 1), ratio(1, 2), ratio(-1, 2)]).unwrap();
        assert_eq!(catalog.g_vectors(&ray.face), vec![vec![0, 1, -1]]);
        assert_eq!(ray.weights, vec![ratio(1, 2)]);
    }
}
