//! Quivers with admissible relations over F_p and their finite-dimensional
//! quotient algebras.
//!
//! Conventions: a path `ab` is arrow `a` followed by arrow `b`. Modules are
//! right modules, so `e_i Λ e_j` is spanned by the residue paths from `i` to
//! `j` and `Hom(P_i, P_j) = e_j Λ e_i` acts by left multiplication.

use std::collections::{HashMap, HashSet};
use std::path::Path as FsPath;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, SpanBuilder};

pub const DEFAULT_PATH_CAP: usize = 10;
const MAX_PATHS: usize = 200_000;

/// Coordinates of an algebra element in the residue-path basis.
pub type Element = Vec<u32>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_index(&self, label: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v == label)
            .ok_or_else(|| Error::UnknownVertex(label.to_string()))
    }

    pub fn arrow_index(&self, name: &str) -> Result<usize> {
        self.arrows
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::UnknownArrow(name.to_string()))
    }

    /// The quiver with every arrow reversed.
    pub fn opposite(&self) -> Quiver {
        Quiver {
            vertices: self.vertices.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|a| Arrow {
                    name: a.name.clone(),
                    source: a.target,
                    target: a.source,
                })
                .collect(),
        }
    }
}

/// A path in the quiver. Trivial paths (length 0) are the vertex idempotents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub source: usize,
    pub target: usize,
    pub arrows: Vec<usize>,
}

impl Path {
    pub fn trivial(v: usize) -> Path {
        Path {
            source: v,
            target: v,
            arrows: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    /// Concatenation `self` then `other`, if the endpoints match.
    pub fn concat(&self, other: &Path) -> Option<Path> {
        if self.target != other.source {
            return None;
        }
        let mut arrows = self.arrows.clone();
        arrows.extend_from_slice(&other.arrows);
        Some(Path {
            source: self.source,
            target: other.target,
            arrows,
        })
    }

    pub fn reversed(&self) -> Path {
        Path {
            source: self.target,
            target: self.source,
            arrows: self.arrows.iter().rev().copied().collect(),
        }
    }

    pub fn names<'a>(&self, quiver: &'a Quiver) -> Vec<&'a str> {
        self.arrows
            .iter()
            .map(|&a| quiver.arrows[a].name.as_str())
            .collect()
    }
}

/// A linear combination of parallel paths of length at least two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub terms: Vec<(u32, Path)>,
}

impl Relation {
    pub fn source(&self) -> usize {
        self.terms[0].1.source
    }

    pub fn target(&self) -> usize {
        self.terms[0].1.target
    }

    pub fn max_len(&self) -> usize {
        self.terms.iter().map(|(_, p)| p.len()).max().unwrap_or(0)
    }

    pub fn min_len(&self) -> usize {
        self.terms.iter().map(|(_, p)| p.len()).min().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub field: FieldSpec,
    pub quiver: Quiver,
    pub relations: Vec<Relation>,
    pub path_cap: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraFile {
    field: FieldSpec,
    vertices: Vec<String>,
    arrows: Vec<ArrowFile>,
    #[serde(default)]
    relations: Vec<RelationFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    path_cap: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrowFile {
    name: String,
    from: String,
    to: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationFile {
    terms: Vec<TermFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermFile {
    coeff: i64,
    path: Vec<String>,
}

impl Presentation {
    /// Parses and validates the JSON algebra format.
    pub fn parse(text: &str) -> Result<Presentation> {
        let file: AlgebraFile =
            serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        Self::from_file_repr(file)
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Presentation> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| {
            Error::Malformed(format!("cannot read {}: {e}", path.as_ref().display()))
        })?;
        Self::parse(&text)
    }

    fn from_file_repr(file: AlgebraFile) -> Result<Presentation> {
        let p = file.field.p;
        if !linalg::is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if p >= 1 << 31 {
            return Err(Error::Malformed(format!("characteristic {p} is too large")));
        }
        if file.vertices.is_empty() {
            return Err(Error::Malformed("quiver has no vertices".into()));
        }
        let mut seen = HashSet::new();
        for v in &file.vertices {
            if !seen.insert(v.as_str()) {
                return Err(Error::Duplicate(v.clone()));
            }
        }
        let mut quiver = Quiver {
            vertices: file.vertices.clone(),
            arrows: Vec::new(),
        };
        let mut seen = HashSet::new();
        for a in &file.arrows {
            if !seen.insert(a.name.as_str()) {
                return Err(Error::Duplicate(a.name.clone()));
            }
            let source = quiver.vertex_index(&a.from)?;
            let target = quiver.vertex_index(&a.to)?;
            quiver.arrows.push(Arrow {
                name: a.name.clone(),
                source,
                target,
            });
        }

        let mut relations = Vec::new();
        for (k, r) in file.relations.iter().enumerate() {
            let mut combined: Vec<(u32, Path)> = Vec::new();
            for t in &r.terms {
                if t.path.is_empty() {
                    return Err(Error::NonAdmissible(format!(
                        "relation {k} has a term of length 0"
                    )));
                }
                let arrows = t
                    .path
                    .iter()
                    .map(|n| quiver.arrow_index(n))
                    .collect::<Result<Vec<_>>>()?;
                for w in arrows.windows(2) {
                    if quiver.arrows[w[0]].target != quiver.arrows[w[1]].source {
                        return Err(Error::Malformed(format!(
                            "relation {k}: path {} is not composable",
                            t.path.join("")
                        )));
                    }
                }
                let path = Path {
                    source: quiver.arrows[arrows[0]].source,
                    target: quiver.arrows[*arrows.last().unwrap()].target,
                    arrows,
                };
                let c = linalg::reduce(t.coeff, p);
                match combined.iter_mut().find(|(_, q)| *q == path) {
                    Some((acc, _)) => *acc = linalg::add(*acc, c, p),
                    None => combined.push((c, path)),
                }
            }
            combined.retain(|(c, _)| *c != 0);
            if combined.is_empty() {
                continue;
            }
            let (s, t) = (combined[0].1.source, combined[0].1.target);
            if combined
                .iter()
                .any(|(_, q)| q.source != s || q.target != t)
            {
                return Err(Error::NonAdmissible(format!(
                    "relation {k}: paths are not parallel"
                )));
            }
            if let Some((_, q)) = combined.iter().find(|(_, q)| q.len() < 2) {
                return Err(Error::NonAdmissible(format!(
                    "relation {k}: term {} has length {} < 2",
                    q.names(&quiver).join(""),
                    q.len()
                )));
            }
            relations.push(Relation { terms: combined });
        }

        let path_cap = file.path_cap.unwrap_or(DEFAULT_PATH_CAP);
        if path_cap == 0 {
            return Err(Error::Malformed("path_cap must be positive".into()));
        }
        Ok(Presentation {
            field: file.field,
            quiver,
            relations,
            path_cap,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let q = &self.quiver;
        let file = AlgebraFile {
            field: self.field,
            vertices: q.vertices.clone(),
            arrows: q
                .arrows
                .iter()
                .map(|a| ArrowFile {
                    name: a.name.clone(),
                    from: q.vertices[a.source].clone(),
                    to: q.vertices[a.target].clone(),
                })
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|r| RelationFile {
                    terms: r
                        .terms
                        .iter()
                        .map(|(c, path)| TermFile {
                            coeff: *c as i64,
                            path: path.names(q).iter().map(|s| s.to_string()).collect(),
                        })
                        .collect(),
                })
                .collect(),
            path_cap: Some(self.path_cap),
        };
        serde_json::to_value(file).expect("algebra serialises")
    }

    /// Reverses every arrow and every relation path.
    pub fn opposite(&self) -> Presentation {
        Presentation {
            field: self.field,
            quiver: self.quiver.opposite(),
            relations: self
                .relations
                .iter()
                .map(|r| Relation {
                    terms: r.terms.iter().map(|(c, q)| (*c, q.reversed())).collect(),
                })
                .collect(),
            path_cap: self.path_cap,
        }
    }
}

/// All paths of length at most `max_len`, grouped by length.
fn paths_up_to(quiver: &Quiver, max_len: usize) -> Result<Vec<Vec<Path>>> {
    let mut by_len: Vec<Vec<Path>> = vec![(0..quiver.vertex_count()).map(Path::trivial).collect()];
    let mut total = by_len[0].len();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for path in by_len.last().unwrap() {
            for (ai, a) in quiver.arrows.iter().enumerate() {
                if a.source == path.target {
                    let mut arrows = path.arrows.clone();
                    arrows.push(ai);
                    next.push(Path {
                        source: path.source,
                        target: a.target,
                        arrows,
                    });
                }
            }
        }
        total += next.len();
        if total > MAX_PATHS {
            return Err(Error::ResourceGuard(format!(
                "more than {MAX_PATHS} paths below path_cap"
            )));
        }
        by_len.push(next);
    }
    Ok(by_len)
}

/// Finite-dimensional algebra `kQ/I` with a residue-path basis and structure
/// constants.
#[derive(Clone, Debug)]
pub struct Algebra {
    presentation: Presentation,
    basis: Vec<Path>,
    // corners[i][j]: basis indices of residue paths from i to j, ascending
    corners: Vec<Vec<Vec<usize>>>,
    corner_pos: Vec<usize>,
    // table[x][y]: sparse product of basis elements x and y
    table: Vec<Vec<Vec<(usize, u32)>>>,
    limits: Limits,
    opposite: OnceLock<Box<Algebra>>,
}

/// Resource guards for the finite searches over F_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest total dimension accepted by submodule enumeration.
    pub submodule_dim: usize,
    /// Largest number of submodules visited during enumeration.
    pub submodule_count: usize,
    /// Largest End ring (number of elements) searched exhaustively.
    pub end_elements: u64,
    /// Largest number of arrow-matrix tuples tried per dimension vector.
    pub representation_tuples: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            submodule_dim: 12,
            submodule_count: 1 << 20,
            end_elements: 1 << 16,
            representation_tuples: 1 << 20,
        }
    }
}

impl Algebra {
    pub fn parse(text: &str) -> Result<Algebra> {
        Algebra::build(Presentation::parse(text)?)
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Algebra> {
        Algebra::build(Presentation::load(path)?)
    }

    /// Computes a basis of `kQ/I` and its multiplication table.
    ///
    /// Fails when some path of length `path_cap` is not in the ideal, which
    /// means either the cap is too small or the quotient is infinite.
    pub fn build(presentation: Presentation) -> Result<Algebra> {
        let p = presentation.field.p;
        let cap = presentation.path_cap;
        let quiver = &presentation.quiver;
        let by_len = paths_up_to(quiver, cap)?;

        // Coordinates ordered longest-first so that pivots land on long paths
        // and short paths survive as basis representatives.
        let mut order: Vec<&Path> = by_len.iter().rev().flatten().collect();
        let index_all: HashMap<&Path, usize> =
            order.iter().enumerate().map(|(i, q)| (*q, i)).collect();

        let ends_at = |v: usize, max: usize| -> Vec<&Path> {
            by_len
                .iter()
                .take(max + 1)
                .flatten()
                .filter(|q| q.target == v)
                .collect()
        };
        let starts_at = |v: usize, max: usize| -> Vec<&Path> {
            by_len
                .iter()
                .take(max + 1)
                .flatten()
                .filter(|q| q.source == v)
                .collect()
        };

        // 1. Every path of length `cap` must lie in the span of the exact
        //    ideal generators u r v whose terms all have length <= cap.
        let mut exact = SpanBuilder::new(p, order.len());
        for r in &presentation.relations {
            if r.max_len() > cap {
                continue;
            }
            let room = cap - r.max_len();
            for u in ends_at(r.source(), room) {
                for v in starts_at(r.target(), room - u.len()) {
                    let mut vec = vec![0u32; order.len()];
                    for (c, q) in &r.terms {
                        let full = u.concat(q).and_then(|w| w.concat(v)).unwrap();
                        let i = index_all[&full];
                        vec[i] = linalg::add(vec[i], *c, p);
                    }
                    exact.insert(&vec);
                }
            }
        }
        for q in &by_len[cap] {
            let mut e = vec![0u32; order.len()];
            e[index_all[q]] = 1;
            if !exact.contains(&e) {
                return Err(Error::NotFiniteDimensional(cap));
            }
        }

        // 2. kQ / I = kQ_{<cap} / pi(I), with pi dropping paths of length >= cap.
        order.retain(|q| q.len() < cap);
        let index: HashMap<&Path, usize> =
            order.iter().enumerate().map(|(i, q)| (*q, i)).collect();
        let mut ideal = SpanBuilder::new(p, order.len());
        for r in &presentation.relations {
            if r.min_len() >= cap {
                continue;
            }
            let room = cap - 1 - r.min_len();
            for u in ends_at(r.source(), room) {
                for v in starts_at(r.target(), room - u.len()) {
                    let mut vec = vec![0u32; order.len()];
                    for (c, q) in &r.terms {
                        let full = u.concat(q).and_then(|w| w.concat(v)).unwrap();
                        if let Some(&i) = index.get(&full) {
                            vec[i] = linalg::add(vec[i], *c, p);
                        }
                    }
                    ideal.insert(&vec);
                }
            }
        }
        let pivots: HashSet<usize> = ideal
            .basis()
            .iter()
            .map(|row| row.iter().position(|&x| x != 0).unwrap())
            .collect();
        let mut basis: Vec<Path> = order
            .iter()
            .enumerate()
            .filter(|(i, _)| !pivots.contains(i))
            .map(|(_, q)| (*q).clone())
            .collect();
        basis.sort_by(|a, b| {
            (a.len(), a.source, a.target, &a.arrows).cmp(&(b.len(), b.source, b.target, &b.arrows))
        });
        let basis_index: HashMap<usize, usize> = basis
            .iter()
            .enumerate()
            .map(|(bi, q)| (index[q], bi))
            .collect();

        let normal_form = |q: &Path| -> Vec<(usize, u32)> {
            let Some(&i) = index.get(q) else {
                return Vec::new();
            };
            let mut e = vec![0u32; order.len()];
            e[i] = 1;
            ideal
                .residue(&e)
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(k, &c)| (basis_index[&k], c))
                .collect()
        };

        let n = quiver.vertex_count();
        let mut corners = vec![vec![Vec::new(); n]; n];
        let mut corner_pos = vec![0; basis.len()];
        for (bi, q) in basis.iter().enumerate() {
            corner_pos[bi] = corners[q.source][q.target].len();
            corners[q.source][q.target].push(bi);
        }

        let table = basis
            .iter()
            .map(|x| {
                basis
                    .iter()
                    .map(|y| match x.concat(y) {
                        Some(xy) => normal_form(&xy),
                        None => Vec::new(),
                    })
                    .collect()
            })
            .collect();

        Ok(Algebra {
            presentation,
            basis,
            corners,
            corner_pos,
            table,
            limits: Limits::default(),
            opposite: OnceLock::new(),
        })
    }

    pub fn with_limits(mut self, limits: Limits) -> Algebra {
        self.limits = limits;
        self.opposite = OnceLock::new();
        self
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    /// The opposite algebra, built on first use.
    pub fn op(&self) -> &Algebra {
        self.opposite.get_or_init(|| {
            let op = Algebra::build(self.presentation.opposite())
                .expect("the opposite of a finite-dimensional admissible quotient is one too");
            Box::new(op.with_limits(self.limits))
        })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn quiver(&self) -> &Quiver {
        &self.presentation.quiver
    }

    pub fn p(&self) -> u32 {
        self.presentation.field.p
    }

    pub fn vertex_count(&self) -> usize {
        self.presentation.quiver.vertex_count()
    }

    pub fn arrow_count(&self) -> usize {
        self.presentation.quiver.arrows.len()
    }

    pub fn arrow(&self, a: usize) -> &Arrow {
        &self.presentation.quiver.arrows[a]
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Path] {
        &self.basis
    }

    /// Basis indices spanning `e_i Λ e_j` (residue paths from `i` to `j`).
    pub fn corner(&self, i: usize, j: usize) -> &[usize] {
        &self.corners[i][j]
    }

    /// Position of basis element `b` inside its own corner.
    pub fn corner_position(&self, b: usize) -> usize {
        self.corner_pos[b]
    }

    pub fn zero(&self) -> Element {
        vec![0; self.dim()]
    }

    pub fn basis_element(&self, b: usize) -> Element {
        let mut e = self.zero();
        e[b] = 1;
        e
    }

    pub fn idempotent(&self, v: usize) -> Element {
        let b = self
            .basis
            .iter()
            .position(|q| q.is_empty() && q.source == v)
            .expect("vertex idempotents are basis elements");
        self.basis_element(b)
    }

    pub fn one(&self) -> Element {
        (0..self.vertex_count()).fold(self.zero(), |acc, v| self.add(&acc, &self.idempotent(v)))
    }

    pub fn add(&self, x: &Element, y: &Element) -> Element {
        let p = self.p();
        x.iter().zip(y).map(|(&a, &b)| linalg::add(a, b, p)).collect()
    }

    pub fn scale(&self, x: &Element, c: u32) -> Element {
        let p = self.p();
        x.iter().map(|&a| linalg::mul(a, c, p)).collect()
    }

    pub fn is_zero(&self, x: &Element) -> bool {
        x.iter().all(|&c| c == 0)
    }

    /// Bilinear product via structure constants.
    pub fn multiply(&self, x: &Element, y: &Element) -> Element {
        let p = self.p();
        let mut out = self.zero();
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let ab = linalg::mul(a, b, p);
                for &(k, c) in &self.table[i][j] {
                    out[k] = linalg::add(out[k], linalg::mul(ab, c, p), p);
                }
            }
        }
        out
    }

    /// Residue class of an arbitrary path.
    pub fn path_element(&self, path: &Path) -> Element {
        path.arrows
            .iter()
            .fold(self.idempotent(path.source), |acc, &a| {
                self.multiply(&acc, &self.arrow_element(a))
            })
    }

    pub fn arrow_element(&self, a: usize) -> Element {
        let b = self
            .basis
            .iter()
            .position(|q| q.arrows == [a])
            .expect("arrows are basis elements of an admissible quotient");
        self.basis_element(b)
    }

    pub fn relation_element(&self, r: &Relation) -> Element {
        r.terms.iter().fold(self.zero(), |acc, (c, q)| {
            self.add(&acc, &self.scale(&self.path_element(q), *c))
        })
    }

    /// Restricts `x` to the coordinates of `e_i Λ e_j`.
    pub fn corner_coords(&self, x: &Element, i: usize, j: usize) -> Vec<u32> {
        self.corner(i, j).iter().map(|&b| x[b]).collect()
    }

    pub fn from_corner(&self, i: usize, j: usize, coords: &[u32]) -> Element {
        let mut e = self.zero();
        for (&b, &c) in self.corner(i, j).iter().zip(coords) {
            e[b] = c;
        }
        e
    }

    /// True when `x ∈ e_i Λ e_j`.
    pub fn in_corner(&self, x: &Element, i: usize, j: usize) -> bool {
        x.iter()
            .enumerate()
            .all(|(b, &c)| c == 0 || (self.basis[b].source == i && self.basis[b].target == j))
    }

    /// Checks the algebra axioms on all basis triples: orthogonal idempotents
    /// summing to one, associativity, and vanishing of the relations.
    pub fn check_axioms(&self) -> Result<()> {
        let n = self.vertex_count();
        let one = self.one();
        for b in 0..self.dim() {
            let x = self.basis_element(b);
            if self.multiply(&one, &x) != x || self.multiply(&x, &one) != x {
                return Err(Error::Internal(format!("1 is not a unit on basis {b}")));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let prod = self.multiply(&self.idempotent(i), &self.idempotent(j));
                let expect = if i == j { self.idempotent(i) } else { self.zero() };
                if prod != expect {
                    return Err(Error::Internal(format!("e_{i} e_{j} wrong")));
                }
            }
        }
        for x in 0..self.dim() {
            let ex = self.basis_element(x);
            for y in 0..self.dim() {
                let xy = self.multiply(&ex, &self.basis_element(y));
                for z in 0..self.dim() {
                    let ez = self.basis_element(z);
                    let left = self.multiply(&xy, &ez);
                    let right = self.multiply(&ex, &self.multiply(&self.basis_element(y), &ez));
                    if left != right {
                        return Err(Error::Internal(format!("associativity fails at ({x},{y},{z})")));
                    }
                }
            }
        }
        for r in &self.presentation.relations {
            if !self.is_zero(&self.relation_element(r)) {
                return Err(Error::Internal("relation does not vanish".into()));
            }
        }
        Ok(())
    }

    /// Transports `x ∈ Λ` to `x^op ∈ Λ^op` (reverses every path).
    pub fn to_opposite(&self, op: &Algebra, x: &Element) -> Element {
        let mut out = op.zero();
        for (b, &c) in x.iter().enumerate() {
            if c != 0 {
                let rev = op.path_element(&self.basis[b].reversed());
                out = op.add(&out, &op.scale(&rev, c));
            }
        }
        out
    }

    /// Human-readable form of a residue path, e.g. `ab` or `e_2`.
    pub fn path_label(&self, b: usize) -> String {
        let q = &self.basis[b];
        if q.is_empty() {
            format!("e_{}", self.quiver().vertices[q.source])
        } else {
            q.names(self.quiver()).concat()
        }
    }
}
