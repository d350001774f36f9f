//! Two-term complexes `P^{-1} -> P^0` of projective modules, their homotopy
//! Hom spaces, g-vectors, cohomology, and the catalog of two-term
//! (pre)silting complexes.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::algebra::{Algebra, Element, Path};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, SpanBuilder};
use crate::rational::{self, Q};
use crate::repmod::{
    decompose, enumerate_indecomposables, hom_dim, hom_space, injective_sum, is_isomorphic, is_tau_rigid,
    min_projective_presentation, nakayama_map, projective_map, projective_sum, DimVector, Module, Morphism,
    Quotient,
};

/// `[P^0] - [P^{-1}]` in the basis `P_1, ..., P_n` of `K_0(proj Λ)`.
pub type GVector = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwoTermComplex {
    p_minus1: Vec<usize>,
    p_zero: Vec<usize>,
    // d[r][c] ∈ e_{p_zero[r]} Λ e_{p_minus1[c]}
    d: Vec<Vec<Element>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexFile {
    p_minus1: Vec<String>,
    p_zero: Vec<String>,
    #[serde(default)]
    d: Vec<Vec<EntryFile>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum EntryFile {
    One(TermFile),
    Many(Vec<TermFile>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TermFile {
    #[serde(default = "one")]
    coeff: i64,
    path: Vec<String>,
}

fn one() -> i64 {
    1
}

impl TwoTermComplex {
    pub fn new(alg: &Algebra, p_minus1: Vec<usize>, p_zero: Vec<usize>, d: Vec<Vec<Element>>) -> Result<Self> {
        let n = alg.vertex_count();
        if p_minus1.iter().chain(&p_zero).any(|&i| i >= n) {
            return Err(Error::InvalidComplex("projective index out of range".into()));
        }
        if d.len() != p_zero.len() {
            return Err(Error::InvalidComplex(format!(
                "differential needs {} rows, got {}",
                p_zero.len(),
                d.len()
            )));
        }
        for (r, row) in d.iter().enumerate() {
            if row.len() != p_minus1.len() {
                return Err(Error::InvalidComplex(format!(
                    "differential row {r} needs {} entries, got {}",
                    p_minus1.len(),
                    row.len()
                )));
            }
            for (c, x) in row.iter().enumerate() {
                if x.len() != alg.dim() || !alg.in_corner(x, p_zero[r], p_minus1[c]) {
                    return Err(Error::InvalidComplex(format!(
                        "entry ({r},{c}) is not a combination of paths from vertex {} to vertex {}",
                        alg.quiver().vertices[p_zero[r]],
                        alg.quiver().vertices[p_minus1[c]]
                    )));
                }
            }
        }
        Ok(TwoTermComplex { p_minus1, p_zero, d })
    }

    pub(crate) fn from_parts(p_minus1: Vec<usize>, p_zero: Vec<usize>, d: Vec<Vec<Element>>) -> Self {
        TwoTermComplex { p_minus1, p_zero, d }
    }

    pub fn zero() -> Self {
        TwoTermComplex {
            p_minus1: Vec::new(),
            p_zero: Vec::new(),
            d: Vec::new(),
        }
    }

    /// `0 -> P_i`.
    pub fn stalk(i: usize) -> Self {
        TwoTermComplex {
            p_minus1: Vec::new(),
            p_zero: vec![i],
            d: vec![Vec::new()],
        }
    }

    /// `P_i -> 0`, that is `P_i[1]`.
    pub fn shifted(i: usize) -> Self {
        TwoTermComplex {
            p_minus1: vec![i],
            p_zero: Vec::new(),
            d: Vec::new(),
        }
    }

    /// `Λ` as a stalk complex in degree 0.
    pub fn regular(alg: &Algebra) -> Self {
        Self::direct_sum_all(alg, (0..alg.vertex_count()).map(Self::stalk))
    }

    pub fn p_minus1(&self) -> &[usize] {
        &self.p_minus1
    }

    pub fn p_zero(&self) -> &[usize] {
        &self.p_zero
    }

    pub fn differential(&self) -> &[Vec<Element>] {
        &self.d
    }

    pub fn is_zero(&self) -> bool {
        self.p_minus1.is_empty() && self.p_zero.is_empty()
    }

    pub fn g_vector(&self, alg: &Algebra) -> GVector {
        let mut g = vec![0; alg.vertex_count()];
        for &i in &self.p_zero {
            g[i] += 1;
        }
        for &i in &self.p_minus1 {
            g[i] -= 1;
        }
        g
    }

    pub fn direct_sum(&self, alg: &Algebra, other: &Self) -> Self {
        let mut d = Vec::with_capacity(self.p_zero.len() + other.p_zero.len());
        for row in &self.d {
            let mut r = row.clone();
            r.extend((0..other.p_minus1.len()).map(|_| alg.zero()));
            d.push(r);
        }
        for row in &other.d {
            let mut r: Vec<Element> = (0..self.p_minus1.len()).map(|_| alg.zero()).collect();
            r.extend(row.iter().cloned());
            d.push(r);
        }
        let mut p_minus1 = self.p_minus1.clone();
        p_minus1.extend(&other.p_minus1);
        let mut p_zero = self.p_zero.clone();
        p_zero.extend(&other.p_zero);
        TwoTermComplex { p_minus1, p_zero, d }
    }

    pub fn direct_sum_all(alg: &Algebra, parts: impl IntoIterator<Item = Self>) -> Self {
        parts.into_iter().fold(Self::zero(), |acc, x| acc.direct_sum(alg, &x))
    }

    /// The differential as a module map `⊕ P_{p_minus1} -> ⊕ P_{p_zero}`.
    pub fn differential_map(&self, alg: &Algebra) -> Morphism {
        projective_map(alg, &self.p_minus1, &self.p_zero, &self.d)
    }

    /// `H^0` with its projection from `P^0` and a linear section.
    pub fn h0_quotient(&self, alg: &Algebra) -> Quotient {
        let target = projective_sum(alg, &self.p_zero);
        self.differential_map(alg).cokernel(alg, &target)
    }

    pub fn h0(&self, alg: &Algebra) -> Module {
        self.h0_quotient(alg).module
    }

    /// `νP`: the injective modules `νP^{-1}`, `νP^0` and the map between them.
    pub fn nu(&self, alg: &Algebra) -> (Module, Module, Morphism) {
        let source = injective_sum(alg, &self.p_minus1);
        let target = injective_sum(alg, &self.p_zero);
        let map = nakayama_map(alg, &self.p_minus1, &self.p_zero, &self.d);
        (source, target, map)
    }

    pub fn hminus1_nu(&self, alg: &Algebra) -> Module {
        let (source, _, map) = self.nu(alg);
        map.kernel(alg, &source).module
    }

    pub fn to_json(&self, alg: &Algebra) -> Value {
        let names = &alg.quiver().vertices;
        let d: Vec<Vec<Value>> = self
            .d
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| {
                        let terms: Vec<Value> = x
                            .iter()
                            .enumerate()
                            .filter(|(_, &c)| c != 0)
                            .map(|(b, &c)| {
                                let path: Vec<&str> = alg.basis()[b].names(alg.quiver());
                                json!({"coeff": c, "path": path})
                            })
                            .collect();
                        Value::Array(terms)
                    })
                    .collect()
            })
            .collect();
        json!({
            "p_minus1": self.p_minus1.iter().map(|&i| names[i].clone()).collect::<Vec<_>>(),
            "p_zero": self.p_zero.iter().map(|&i| names[i].clone()).collect::<Vec<_>>(),
            "d": d,
        })
    }

    /// Parses `{"p_minus1":["3"],"p_zero":["2"],"d":[[{"path":["b"],"coeff":1}]]}`.
    /// Each entry is a term or a list of terms; an empty path is the
    /// idempotent of its vertex.
    pub fn from_json(alg: &Algebra, value: &Value) -> Result<Self> {
        let file: ComplexFile =
            serde_json::from_value(value.clone()).map_err(|e| Error::InvalidComplex(e.to_string()))?;
        let q = alg.quiver();
        let p_minus1 = file
            .p_minus1
            .iter()
            .map(|v| q.vertex_index(v))
            .collect::<Result<Vec<_>>>()?;
        let p_zero = file.p_zero.iter().map(|v| q.vertex_index(v)).collect::<Result<Vec<_>>>()?;
        if file.d.is_empty() && !p_zero.is_empty() && !p_minus1.is_empty() {
            return Err(Error::InvalidComplex("missing differential".into()));
        }
        let mut d = Vec::new();
        if file.d.is_empty() {
            d = vec![vec![alg.zero(); p_minus1.len()]; p_zero.len()];
        } else {
            if file.d.len() != p_zero.len() {
                return Err(Error::InvalidComplex("differential has the wrong number of rows".into()));
            }
            for (r, row) in file.d.iter().enumerate() {
                if row.len() != p_minus1.len() {
                    return Err(Error::InvalidComplex(format!("row {r} has the wrong length")));
                }
                let mut out = Vec::new();
                for (c, entry) in row.iter().enumerate() {
                    let terms: Vec<&TermFile> = match entry {
                        EntryFile::One(t) => vec![t],
                        EntryFile::Many(ts) => ts.iter().collect(),
                    };
                    let mut x = alg.zero();
                    for t in terms {
                        let arrows = t.path.iter().map(|a| q.arrow_index(a)).collect::<Result<Vec<_>>>()?;
                        let path = build_path(alg, p_zero[r], &arrows)?;
                        if path.target != p_minus1[c] {
                            return Err(Error::InvalidComplex(format!(
                                "entry ({r},{c}) must end at vertex {}",
                                q.vertices[p_minus1[c]]
                            )));
                        }
                        let coeff = crate::linalg::reduce(t.coeff, alg.p());
                        x = alg.add(&x, &alg.scale(&alg.path_element(&path), coeff));
                    }
                    out.push(x);
                }
                d.push(out);
            }
        }
        Self::new(alg, p_minus1, p_zero, d)
    }
}

fn build_path(alg: &Algebra, start: usize, arrows: &[usize]) -> Result<Path> {
    let mut at = start;
    for &a in arrows {
        let arrow = alg.arrow(a);
        if arrow.source != at {
            return Err(Error::InvalidComplex(format!(
                "arrow {} does not continue a path at vertex {}",
                arrow.name,
                alg.quiver().vertices[at]
            )));
        }
        at = arrow.target;
    }
    Ok(Path {
        source: start,
        target: at,
        arrows: arrows.to_vec(),
    })
}

/// Conventional notation for a g-vector, e.g. `P_2-P_3` or `-P_1`.
pub fn g_notation(alg: &Algebra, g: &[i64]) -> String {
    let names = &alg.quiver().vertices;
    let mut out = String::new();
    let term = |k: i64, i: usize| {
        let mag = k.unsigned_abs();
        let coeff = if mag == 1 { String::new() } else { mag.to_string() };
        format!("{coeff}P_{}", names[i])
    };
    let order = (0..g.len()).filter(|&i| g[i] > 0).chain((0..g.len()).filter(|&i| g[i] < 0));
    for i in order {
        if g[i] < 0 {
            out.push('-');
        } else if !out.is_empty() {
            out.push('+');
        }
        out.push_str(&term(g[i], i));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Inverse of [`g_notation`].
pub fn parse_g_notation(alg: &Algebra, s: &str) -> Result<GVector> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().replace('\u{2212}', "-");
    let bad = || Error::Query(format!("cannot read `{s}` as a g-vector"));
    let mut g = vec![0i64; alg.vertex_count()];
    if s == "0" {
        return Ok(g);
    }
    let mut rest = s.as_str();
    while !rest.is_empty() {
        let sign = match rest.as_bytes()[0] {
            b'-' => {
                rest = &rest[1..];
                -1
            }
            b'+' => {
                rest = &rest[1..];
                1
            }
            _ => 1,
        };
        let p_at = rest.find("P_").ok_or_else(bad)?;
        let coeff: i64 = if p_at == 0 { 1 } else { rest[..p_at].parse().map_err(|_| bad())? };
        rest = &rest[p_at + 2..];
        let end = rest.find(['+', '-']).unwrap_or(rest.len());
        let label = &rest[..end];
        let i = alg.quiver().vertex_index(label).map_err(|_| bad())?;
        g[i] += sign * coeff;
        rest = &rest[end..];
    }
    Ok(g)
}

// Hom(⊕ P_from, ⊕ P_to) as |to| x |from| matrices over Λ, entry (r, c) in
// e_{to[r]} Λ e_{from[c]}.
type AlgMatrix = Vec<Vec<Element>>;

fn hom_basis(alg: &Algebra, from: &[usize], to: &[usize]) -> Vec<AlgMatrix> {
    let mut out = Vec::new();
    for (r, &j) in to.iter().enumerate() {
        for (c, &i) in from.iter().enumerate() {
            for &b in alg.corner(j, i) {
                let mut m = vec![vec![alg.zero(); from.len()]; to.len()];
                m[r][c] = alg.basis_element(b);
                out.push(m);
            }
        }
    }
    out
}

fn hom_len(alg: &Algebra, from: &[usize], to: &[usize]) -> usize {
    to.iter()
        .map(|&j| from.iter().map(|&i| alg.corner(j, i).len()).sum::<usize>())
        .sum()
}

fn coords(alg: &Algebra, from: &[usize], to: &[usize], m: &AlgMatrix) -> Vec<u32> {
    let mut out = Vec::new();
    for (r, &j) in to.iter().enumerate() {
        for (c, &i) in from.iter().enumerate() {
            out.extend(alg.corner_coords(&m[r][c], j, i));
        }
    }
    out
}

/// `g ∘ f` where `f` has `cols` columns.
fn compose(alg: &Algebra, g: &AlgMatrix, f: &AlgMatrix, cols: usize) -> AlgMatrix {
    g.iter()
        .map(|grow| {
            (0..cols)
                .map(|c| {
                    grow.iter().zip(f).fold(alg.zero(), |acc, (x, frow)| {
                        let y = &frow[c];
                        if alg.is_zero(x) || alg.is_zero(y) {
                            acc
                        } else {
                            alg.add(&acc, &alg.multiply(x, y))
                        }
                    })
                })
                .collect()
        })
        .collect()
}

fn span_rank(p: u32, width: usize, vectors: impl IntoIterator<Item = Vec<u32>>) -> usize {
    let mut span = SpanBuilder::new(p, width);
    for v in vectors {
        span.insert(&v);
    }
    span.rank()
}

/// `dim Hom_{K^b(proj Λ)}(X, Y[shift])` for `shift ∈ {-1, 0, 1}`.
pub fn hom_k(alg: &Algebra, x: &TwoTermComplex, y: &TwoTermComplex, shift: i32) -> usize {
    let p = alg.p();
    let (dx, dy) = (&x.d, &y.d);
    let (xm, x0, ym, y0) = (&x.p_minus1, &x.p_zero, &y.p_minus1, &y.p_zero);
    match shift {
        1 => {
            // Hom(X^{-1}, Y^0) modulo s d_X and d_Y t
            let width = hom_len(alg, xm, y0);
            let a = hom_basis(alg, x0, y0)
                .into_iter()
                .map(|s| coords(alg, xm, y0, &compose(alg, &s, dx, xm.len())));
            let b = hom_basis(alg, xm, ym)
                .into_iter()
                .map(|t| coords(alg, xm, y0, &compose(alg, dy, &t, xm.len())));
            width - span_rank(p, width, a.chain(b))
        }
        0 => {
            // chain maps (f^{-1}, f^0) with f^0 d_X = d_Y f^{-1}, modulo
            // homotopies h: X^0 -> Y^{-1}
            let width = hom_len(alg, xm, y0);
            let minus = hom_basis(alg, xm, ym);
            let zero = hom_basis(alg, x0, y0);
            let cols: Vec<Vec<u32>> = minus
                .iter()
                .map(|f| coords(alg, xm, y0, &compose(alg, dy, f, xm.len())))
                .chain(zero.iter().map(|f| coords(alg, xm, y0, &compose(alg, f, dx, xm.len()))))
                .collect();
            let unknowns = cols.len();
            let cycles = unknowns - Matrix::from_columns(p, width, &cols).rank();
            let wm = hom_len(alg, xm, ym);
            let w0 = hom_len(alg, x0, y0);
            let homotopies = hom_basis(alg, x0, ym).into_iter().map(|h| {
                let mut v = coords(alg, xm, ym, &compose(alg, &h, dx, xm.len()));
                v.extend(coords(alg, x0, y0, &compose(alg, dy, &h, x0.len())));
                v
            });
            cycles - span_rank(p, wm + w0, homotopies)
        }
        -1 => {
            // f: X^0 -> Y^{-1} with f d_X = 0 and d_Y f = 0
            let wm = hom_len(alg, xm, ym);
            let w0 = hom_len(alg, x0, y0);
            let cols: Vec<Vec<u32>> = hom_basis(alg, x0, ym)
                .iter()
                .map(|f| {
                    let mut v = coords(alg, xm, ym, &compose(alg, f, dx, xm.len()));
                    v.extend(coords(alg, x0, y0, &compose(alg, dy, f, x0.len())));
                    v
                })
                .collect();
            cols.len() - Matrix::from_columns(p, wm + w0, &cols).rank()
        }
        _ => 0,
    }
}

pub fn is_presilting(alg: &Algebra, x: &TwoTermComplex) -> bool {
    hom_k(alg, x, x, 1) == 0
}

/// Indecomposable summands up to homotopy, with multiplicities: the minimal
/// presentations of the summands of `H^0` and the shifted projectives
/// making up the rest of the g-vector.
pub fn summands(alg: &Algebra, x: &TwoTermComplex) -> Result<Vec<(TwoTermComplex, usize)>> {
    let mut out = Vec::new();
    let mut g_pres = vec![0i64; alg.vertex_count()];
    for (m, k) in decompose(alg, &x.h0(alg))? {
        let pres = min_projective_presentation(alg, &m);
        for (acc, v) in g_pres.iter_mut().zip(pres.g_vector(alg)) {
            *acc += k as i64 * v;
        }
        out.push((pres, k));
    }
    let g = x.g_vector(alg);
    for i in 0..alg.vertex_count() {
        let q = g_pres[i] - g[i];
        if q < 0 {
            return Err(Error::Internal("negative shifted part in a two-term complex".into()));
        }
        if q > 0 {
            out.push((TwoTermComplex::shifted(i), q as usize));
        }
    }
    Ok(out)
}

/// Two-term complexes are homotopy equivalent iff they have the same
/// g-vector and isomorphic `H^0`.
pub fn homotopy_equivalent(alg: &Algebra, x: &TwoTermComplex, y: &TwoTermComplex) -> Result<bool> {
    if x.g_vector(alg) != y.g_vector(alg) {
        return Ok(false);
    }
    is_isomorphic(alg, &x.h0(alg), &y.h0(alg))
}

/// Presilting with exactly `n` pairwise non-isomorphic indecomposable
/// summands.
pub fn is_silting(alg: &Algebra, x: &TwoTermComplex) -> Result<bool> {
    if !is_presilting(alg, x) {
        return Ok(false);
    }
    Ok(summands(alg, x)?.len() == alg.vertex_count())
}

/// `⟨P, M⟩ = g(P) · dim M`.
pub fn euler_form(alg: &Algebra, x: &TwoTermComplex, m: &Module) -> i64 {
    x.g_vector(alg)
        .iter()
        .zip(m.dims())
        .map(|(&g, &d)| g * d as i64)
        .sum()
}

/// `⟨P, M⟩ = dim Hom(P^0, M) - dim Hom(P^{-1}, M)` by solving for the Hom
/// spaces.
pub fn euler_form_by_homs(alg: &Algebra, x: &TwoTermComplex, m: &Module) -> i64 {
    hom_dim(alg, &projective_sum(alg, &x.p_zero), m) as i64
        - hom_dim(alg, &projective_sum(alg, &x.p_minus1), m) as i64
}

/// `Hom(P^0, M) -> Hom(P^{-1}, M)`, precomposition with the differential,
/// written on `⊕ M_{p_zero} -> ⊕ M_{p_minus1}`.
fn precomposition(alg: &Algebra, x: &TwoTermComplex, m: &Module) -> Matrix {
    let dims = m.dims();
    let rows: usize = x.p_minus1.iter().map(|&i| dims[i]).sum();
    let cols: usize = x.p_zero.iter().map(|&j| dims[j]).sum();
    let mut out = Matrix::zeros(alg.p(), rows, cols);
    let mut c0 = 0;
    for (r, &j) in x.p_zero.iter().enumerate() {
        let mut r0 = 0;
        for (c, &i) in x.p_minus1.iter().enumerate() {
            let block = m.element_action(alg, &x.d[r][c], j, i);
            for a in 0..block.rows() {
                for b in 0..block.cols() {
                    out.set(r0 + a, c0 + b, block.get(a, b));
                }
            }
            r0 += dims[i];
        }
        c0 += dims[j];
    }
    out
}

/// Dimensions of the derived Hom spaces between a two-term complex `P` and a
/// module `M` (as a stalk complex in degree 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DerivedHoms {
    /// `Hom_D(P, M)`, the kernel of precomposition with `d`.
    pub to_module: usize,
    /// `Hom_D(P, M[1])`, its cokernel.
    pub to_shift: usize,
    /// `Hom_D(M, νP)`.
    pub module_to_nu: usize,
    /// The kernel of `Hom(M, νP^{-1}) -> Hom(M, νP^0)`, i.e. `Hom(M, H^{-1}(νP))`.
    pub module_to_nu_kernel: usize,
}

pub fn derived_homs(alg: &Algebra, x: &TwoTermComplex, m: &Module) -> DerivedHoms {
    let pre = precomposition(alg, x, m);
    let rank = pre.rank();
    let to_module = pre.cols() - rank;
    let to_shift = pre.rows() - rank;

    let (source, target, map) = x.nu(alg);
    let into_source = hom_space(alg, m, &source);
    let width: usize = m.dims().iter().zip(target.dims()).map(|(a, b)| a * b).sum();
    let post_rank = span_rank(
        alg.p(),
        width,
        into_source.iter().map(|f| map.compose(f).flatten()),
    );
    DerivedHoms {
        to_module,
        to_shift,
        module_to_nu: hom_dim(alg, m, &target) - post_rank,
        module_to_nu_kernel: into_source.len() - post_rank,
    }
}

/// How a catalog entry arises.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntryKind {
    /// The minimal presentation of the indecomposable module with this index.
    Presentation(usize),
    /// `P_i[1]`.
    Shift(usize),
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub complex: TwoTermComplex,
    pub g: GVector,
    pub h0: Module,
    pub kind: EntryKind,
}

/// Indecomposable two-term presilting complexes, their compatibility, and
/// the basic presilting and silting complexes built from them.
#[derive(Clone, Debug)]
pub struct Catalog {
    pub dim_bound: usize,
    pub indecomposables: Vec<Module>,
    pub entries: Vec<CatalogEntry>,
    pub compatible: Vec<Vec<bool>>,
    /// Every basic presilting complex, as sorted entry indices, including 0.
    pub faces: Vec<Vec<usize>>,
    /// The faces with `n` summands.
    pub siltings: Vec<Vec<usize>>,
}

impl Catalog {
    /// Enumerates indecomposables up to `dim_bound`, keeps the τ-rigid ones,
    /// and assembles the presilting catalog.
    ///
    /// The result is accepted only if every almost complete silting complex
    /// found has exactly two completions inside the catalog; otherwise the
    /// bound was too small and the enumeration is reported inconclusive.
    pub fn build(alg: &Algebra, dim_bound: usize) -> Result<Catalog> {
        let indecomposables = enumerate_indecomposables(alg, dim_bound)?;
        let rigid: Vec<bool> = indecomposables.par_iter().map(|m| is_tau_rigid(alg, m)).collect();
        let mut entries = Vec::new();
        for (k, m) in indecomposables.iter().enumerate() {
            if rigid[k] {
                let complex = min_projective_presentation(alg, m);
                entries.push(CatalogEntry {
                    g: complex.g_vector(alg),
                    complex,
                    h0: m.clone(),
                    kind: EntryKind::Presentation(k),
                });
            }
        }
        for i in 0..alg.vertex_count() {
            let complex = TwoTermComplex::shifted(i);
            entries.push(CatalogEntry {
                g: complex.g_vector(alg),
                h0: Module::zero(alg),
                complex,
                kind: EntryKind::Shift(i),
            });
        }
        entries.sort_by(|a, b| b.g.cmp(&a.g));
        let mut seen = HashSet::new();
        for e in &entries {
            if !seen.insert(e.g.clone()) {
                return Err(Error::Internal(format!(
                    "two indecomposable presilting complexes share the g-vector {:?}",
                    e.g
                )));
            }
        }

        let count = entries.len();
        let pairs: Vec<(usize, usize)> = (0..count).flat_map(|a| (a..count).map(move |b| (a, b))).collect();
        let results: Vec<bool> = pairs
            .par_iter()
            .map(|&(a, b)| {
                let (x, y) = (&entries[a].complex, &entries[b].complex);
                hom_k(alg, x, y, 1) == 0 && hom_k(alg, y, x, 1) == 0
            })
            .collect();
        let mut compatible = vec![vec![false; count]; count];
        for (&(a, b), &ok) in pairs.iter().zip(&results) {
            compatible[a][b] = ok;
            compatible[b][a] = ok;
        }
        for (a, e) in entries.iter().enumerate() {
            if !compatible[a][a] {
                return Err(Error::Internal(format!("catalog entry {:?} is not presilting", e.g)));
            }
        }

        let n = alg.vertex_count();
        let mut faces = Vec::new();
        cliques(&compatible, n, &mut Vec::new(), 0, &mut faces);
        faces.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        let siltings: Vec<Vec<usize>> = faces.iter().filter(|f| f.len() == n).cloned().collect();

        let catalog = Catalog {
            dim_bound,
            indecomposables,
            entries,
            compatible,
            faces,
            siltings,
        };
        catalog.check_closed(alg)?;
        Ok(catalog)
    }

    fn check_closed(&self, alg: &Algebra) -> Result<()> {
        let n = alg.vertex_count();
        if self.siltings.is_empty() {
            return Err(Error::Inconclusive("no silting complex found".into()));
        }
        let set: HashSet<&Vec<usize>> = self.siltings.iter().collect();
        for t in &self.siltings {
            for drop in 0..n {
                let rest: Vec<usize> = t.iter().enumerate().filter(|(k, _)| *k != drop).map(|(_, &x)| x).collect();
                let completions = (0..self.entries.len())
                    .filter(|x| !rest.contains(x))
                    .filter(|&x| {
                        let mut s = rest.clone();
                        s.push(x);
                        s.sort();
                        set.contains(&s)
                    })
                    .count();
                if completions != 2 {
                    return Err(Error::Inconclusive(format!(
                        "dimension bound {} reached with new τ-rigid modules still appearing: \
                         the almost complete silting complex {} has {completions} completion(s)",
                        self.dim_bound,
                        rest.iter()
                            .map(|&k| g_notation(alg, &self.entries[k].g))
                            .collect::<Vec<_>>()
                            .join(", ")
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn label(&self, alg: &Algebra, entry: usize) -> String {
        g_notation(alg, &self.entries[entry].g)
    }

    /// Finds the entry with this g-vector.
    pub fn find_g(&self, g: &[i64]) -> Option<usize> {
        self.entries.iter().position(|e| e.g == g)
    }

    /// Whether the entries are pairwise compatible.
    pub fn is_face(&self, entries: &[usize]) -> bool {
        entries
            .iter()
            .all(|&a| entries.iter().all(|&b| self.compatible[a][b]))
    }

    pub fn sum(&self, alg: &Algebra, entries: &[usize]) -> TwoTermComplex {
        TwoTermComplex::direct_sum_all(alg, entries.iter().map(|&k| self.entries[k].complex.clone()))
    }

    /// `H^0` of the direct sum.
    pub fn h0(&self, alg: &Algebra, entries: &[usize]) -> Module {
        Module::direct_sum_all(alg, entries.iter().map(|&k| &self.entries[k].h0))
    }

    pub fn g_vectors(&self, entries: &[usize]) -> Vec<GVector> {
        entries.iter().map(|&k| self.entries[k].g.clone()).collect()
    }

    /// Positions of the entries of a silting complex in its triangle split.
    pub fn decompose_silting(&self, alg: &Algebra, silting: &[usize]) -> Result<Triangle> {
        let parts: Vec<TwoTermComplex> = silting.iter().map(|&k| self.entries[k].complex.clone()).collect();
        silting_decompose(alg, &parts)
    }
}

fn cliques(compatible: &[Vec<bool>], max: usize, cur: &mut Vec<usize>, from: usize, out: &mut Vec<Vec<usize>>) {
    out.push(cur.clone());
    if cur.len() == max {
        return;
    }
    for x in from..compatible.len() {
        if cur.iter().all(|&y| compatible[x][y]) {
            cur.push(x);
            cliques(compatible, max, cur, x + 1, out);
            cur.pop();
        }
    }
}

/// The triangle `Λ -> T' -> T'' -> Λ[1]` of a silting complex, with `T'` a
/// minimal left `add T`-approximation of `Λ`.
#[derive(Clone, Debug)]
pub struct Triangle {
    /// Multiplicity of each summand of `T` in `T'`.
    pub t_prime: Vec<usize>,
    /// Multiplicity of each summand of `T` in `T''`.
    pub t_double_prime: Vec<usize>,
    /// Summand positions in `add T'`.
    pub lambda: Vec<usize>,
    /// Summand positions in `add T''`.
    pub rho: Vec<usize>,
    /// Coefficients of `[Λ]` in the basis of g-vectors of `T`.
    pub coefficients: Vec<i64>,
    /// The cone of the approximation, i.e. `T''` before splitting.
    pub cone: TwoTermComplex,
}

fn match_summand(
    alg: &Algebra,
    piece: &TwoTermComplex,
    parts: &[TwoTermComplex],
    gs: &[GVector],
    h0s: &[Module],
) -> Result<Option<usize>> {
    let g = piece.g_vector(alg);
    let h = piece.h0(alg);
    for k in 0..parts.len() {
        if gs[k] == g && is_isomorphic(alg, &h0s[k], &h)? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Splits a basic two-term silting complex `T = T_λ ⊕ T_ρ` along the
/// triangle `Λ -> T' -> T'' -> Λ[1]`.
///
/// `T'` is built from `Hom_K(Λ, T) = H^0(T)`: every vector of `H^0(X)_i`
/// gives a map `P_i -> X`, and generators that factor through the others
/// are discarded. The g-vector identity `[Λ] = [T'] - [T'']` is solved
/// independently and must agree.
pub fn silting_decompose(alg: &Algebra, parts: &[TwoTermComplex]) -> Result<Triangle> {
    let n = alg.vertex_count();
    let total = TwoTermComplex::direct_sum_all(alg, parts.iter().cloned());
    if parts.len() != n || !is_presilting(alg, &total) {
        return Err(Error::NotSilting);
    }
    let quotients: Vec<Quotient> = parts.iter().map(|x| x.h0_quotient(alg)).collect();
    let h0s: Vec<Module> = quotients.iter().map(|q| q.module.clone()).collect();
    let gs: Vec<GVector> = parts.iter().map(|x| x.g_vector(alg)).collect();
    for a in 0..n {
        for b in 0..a {
            if gs[a] == gs[b] {
                return Err(Error::NotSilting);
            }
        }
    }
    let homs: Vec<Vec<Vec<Morphism>>> = (0..n)
        .map(|k| (0..n).map(|j| hom_space(alg, &h0s[k], &h0s[j])).collect())
        .collect();

    // surviving generators (vertex, summand, vector in H^0(X_j)_i)
    let mut survivors: Vec<(usize, usize, Vec<u32>)> = Vec::new();
    for i in 0..n {
        let mut comps: Vec<(usize, Vec<u32>)> = Vec::new();
        for (j, h) in h0s.iter().enumerate() {
            for b in 0..h.dims()[i] {
                let mut v = vec![0; h.dims()[i]];
                v[b] = 1;
                comps.push((j, v));
            }
        }
        let mut kept = vec![true; comps.len()];
        for c in 0..comps.len() {
            let (j, ref v) = comps[c];
            let mut span = SpanBuilder::new(alg.p(), h0s[j].dims()[i]);
            for (k, (jk, w)) in comps.iter().enumerate() {
                if k == c || !kept[k] {
                    continue;
                }
                for phi in &homs[*jk][j] {
                    span.insert(&phi.blocks[i].mul_vec(w));
                }
            }
            if span.contains(v) {
                kept[c] = false;
            }
        }
        for (c, (j, v)) in comps.into_iter().enumerate() {
            if kept[c] {
                survivors.push((i, j, v));
            }
        }
    }

    let mut t_prime = vec![0usize; n];
    for (_, j, _) in &survivors {
        t_prime[*j] += 1;
    }

    // cone of Λ -> T': (Λ ⊕ T'^{-1}) -> T'^0
    let mut p_minus1: Vec<usize> = (0..n).collect();
    let mut p_zero = Vec::new();
    for (_, j, _) in &survivors {
        p_minus1.extend(&parts[*j].p_minus1);
        p_zero.extend(&parts[*j].p_zero);
    }
    let mut d = vec![vec![alg.zero(); p_minus1.len()]; p_zero.len()];
    let (mut row0, mut col0) = (0, n);
    for (i, j, v) in &survivors {
        let x = &parts[*j];
        let lift = quotients[*j].section[*i].mul_vec(v);
        let mut offset = 0;
        for (r, &t) in x.p_zero.iter().enumerate() {
            let len = alg.corner(t, *i).len();
            d[row0 + r][*i] = alg.from_corner(t, *i, &lift[offset..offset + len]);
            offset += len;
        }
        let dense = &x.d;
        for r in 0..x.p_zero.len() {
            for c in 0..x.p_minus1.len() {
                d[row0 + r][col0 + c] = dense[r][c].clone();
            }
        }
        row0 += x.p_zero.len();
        col0 += x.p_minus1.len();
    }
    let cone = TwoTermComplex::new(alg, p_minus1, p_zero, d)?;

    let mut t_double_prime = vec![0usize; n];
    for (piece, k) in summands(alg, &cone)? {
        match match_summand(alg, &piece, parts, &gs, &h0s)? {
            Some(pos) => t_double_prime[pos] += k,
            None => {
                return Err(Error::Internal(format!(
                    "the cone has a summand {} outside add T",
                    g_notation(alg, &piece.g_vector(alg))
                )))
            }
        }
    }

    let ones = vec![rational::int(1); n];
    let coeffs = rational::solve_independent(&gs, &ones).ok_or(Error::NotSilting)?;
    let mut coefficients = Vec::with_capacity(n);
    for c in &coeffs {
        if !c.is_integer() {
            return Err(Error::Internal("[Λ] has non-integral coordinates".into()));
        }
        coefficients.push(i64::try_from(c.to_integer()).map_err(|_| Error::Internal("overflow".into()))?);
    }

    let mut lambda = Vec::new();
    let mut rho = Vec::new();
    for k in 0..n {
        let (a, b) = (t_prime[k], t_double_prime[k]);
        if (a > 0) == (b > 0) {
            return Err(Error::Internal(format!(
                "summand {} appears in {} of T' and T''",
                g_notation(alg, &gs[k]),
                if a > 0 { "both" } else { "neither" }
            )));
        }
        if coefficients[k] != a as i64 - b as i64 {
            return Err(Error::Internal(format!(
                "approximation disagrees with the g-vector identity at {}",
                g_notation(alg, &gs[k])
            )));
        }
        if a > 0 {
            lambda.push(k);
        } else {
            rho.push(k);
        }
    }
    Ok(Triangle {
        t_prime,
        t_double_prime,
        lambda,
        rho,
        coefficients,
        cone,
    })
}

/// Q-valued g-vector, for cone computations.
pub fn g_rational(g: &[i64]) -> Vec<Q> {
    g.iter().map(|&x| rational::int(x)).collect()
}

/// Dimension vectors of a module list.
pub fn dims_of(mods: &[Module]) -> Vec<DimVector> {
    mods.iter().map(|m| m.dims().clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repmod::{injective, projective, simple};

    fn three_cycle() -> Algebra {
        Algebra::parse(crate::repmod::tests::THREE_CYCLE).unwrap()
    }

    fn cx(alg: &Algebra, text: &str) -> TwoTermComplex {
        TwoTermComplex::from_json(alg, &serde_json::from_str(text).unwrap()).unwrap()
    }

    fn u1(alg: &Algebra) -> TwoTermComplex {
        cx(alg, r#"{"p_minus1":["3"],"p_zero":["2"],"d":[[{"path":["b"],"coeff":1}]]}"#)
    }

    fn u3(alg: &Algebra) -> TwoTermComplex {
        cx(alg, r#"{"p_minus1":["1"],"p_zero":["2"],"d":[[{"path":["b","c"],"coeff":1}]]}"#)
    }

    #[test]
    fn g_vectors_and_notation() {
        let alg = three_cycle();
        assert_eq!(TwoTermComplex::stalk(0).g_vector(&alg), vec![1, 0, 0]);
        assert_eq!(u1(&alg).g_vector(&alg), vec![0, 1, -1]);
        assert_eq!(TwoTermComplex::shifted(0).g_vector(&alg), vec![-1, 0, 0]);
        assert_eq!(g_notation(&alg, &[0, 1, -1]), "P_2-P_3");
        assert_eq!(g_notation(&alg, &[-1, 0, 0]), "-P_1");
        assert_eq!(g_notation(&alg, &[-3, 1, -1]), "P_2-3P_1-P_3");
        for g in [vec![0, 1, -1], vec![-1, 0, 0], vec![-3, 1, -1], vec![0, 0, 0], vec![2, 1, 0]] {
            assert_eq!(parse_g_notation(&alg, &g_notation(&alg, &g)).unwrap(), g);
        }
        assert!(parse_g_notation(&alg, "P_7").is_err());
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let alg = three_cycle();
        let x = u1(&alg).direct_sum(&alg, &TwoTermComplex::shifted(0));
        let back = TwoTermComplex::from_json(&alg, &x.to_json(&alg)).unwrap();
        assert_eq!(back.g_vector(&alg), x.g_vector(&alg));
        assert_eq!(back, x);
        let wrong = serde_json::json!({"p_minus1":["3"],"p_zero":["2"],"d":[[{"path":["a"],"coeff":1}]]});
        assert!(TwoTermComplex::from_json(&alg, &wrong).is_err());
    }

    #[test]
    fn cohomology() {
        let alg = three_cycle();
        assert_eq!(TwoTermComplex::stalk(1).h0(&alg), projective(&alg, 1));
        let h = u1(&alg).h0(&alg);
        assert!(is_isomorphic(&alg, &h, &simple(&alg, 1)).unwrap());
        let nu = TwoTermComplex::shifted(0).hminus1_nu(&alg);
        assert!(is_isomorphic(&alg, &nu, &injective(&alg, 0)).unwrap());
        assert!(TwoTermComplex::zero().h0(&alg).is_zero());
    }

    #[test]
    fn homotopy_homs() {
        let alg = three_cycle();
        let (a, b) = (u1(&alg), TwoTermComplex::shifted(0));
        assert_eq!(hom_k(&alg, &a, &a, 1), 0);
        assert!(is_presilting(&alg, &a.direct_sum(&alg, &b)));
        let p1 = TwoTermComplex::stalk(0);
        assert_eq!(hom_k(&alg, &p1, &TwoTermComplex::stalk(1), 1), 0);
        assert_eq!(hom_k(&alg, &p1, &b, 1), 0);
        assert_eq!(hom_k(&alg, &b, &p1, 1), 1);
        assert!(!is_presilting(&alg, &p1.direct_sum(&alg, &b)));
        // contractible complex P_2 -> P_2
        let c = cx(&alg, r#"{"p_minus1":["2"],"p_zero":["2"],"d":[[{"path":[],"coeff":1}]]}"#);
        assert!(is_presilting(&alg, &c));
        assert_eq!(hom_k(&alg, &c, &c, 0), 0);
        assert!(summands(&alg, &c).unwrap().is_empty());
        // End_K of an indecomposable stalk
        assert_eq!(hom_k(&alg, &p1, &p1, 0), 1);
        assert_eq!(hom_k(&alg, &b, &b, 0), 1);
        assert_eq!(hom_k(&alg, &p1, &b, -1), 1);
        assert_eq!(hom_k(&alg, &b, &p1, -1), 0);
    }

    #[test]
    fn silting_checks() {
        let alg = three_cycle();
        assert!(is_silting(&alg, &TwoTermComplex::regular(&alg)).unwrap());
        let shifted = TwoTermComplex::direct_sum_all(&alg, (0..3).map(TwoTermComplex::shifted));
        assert!(is_silting(&alg, &shifted).unwrap());
        let u = u1(&alg).direct_sum(&alg, &TwoTermComplex::shifted(0));
        assert!(!is_silting(&alg, &u).unwrap());
        assert!(is_silting(&alg, &u.direct_sum(&alg, &u3(&alg))).unwrap());
    }

    #[test]
    fn euler_forms_agree() {
        let alg = three_cycle();
        let m23 = u3(&alg).h0(&alg);
        assert_eq!(euler_form(&alg, &u1(&alg), &m23), 0);
        for i in 0..3 {
            for j in 0..3 {
                let e = euler_form_by_homs(&alg, &TwoTermComplex::stalk(i), &simple(&alg, j));
                assert_eq!(e, (i == j) as i64);
            }
        }
        assert_eq!(euler_form(&alg, &u1(&alg), &Module::zero(&alg)), 0);
    }

    #[test]
    fn example_triangle() {
        let alg = three_cycle();
        let parts = vec![u1(&alg), TwoTermComplex::shifted(0), u3(&alg)];
        let t = silting_decompose(&alg, &parts).unwrap();
        assert_eq!(t.t_prime, vec![0, 0, 2]);
        assert_eq!(t.t_double_prime, vec![1, 3, 0]);
        assert_eq!(t.lambda, vec![2]);
        assert_eq!(t.rho, vec![0, 1]);
        assert_eq!(t.coefficients, vec![-1, -3, 2]);
        let lam = silting_decompose(&alg, &(0..3).map(TwoTermComplex::stalk).collect::<Vec<_>>()).unwrap();
        assert_eq!(lam.rho, Vec::<usize>::new());
        let sh = silting_decompose(&alg, &(0..3).map(TwoTermComplex::shifted).collect::<Vec<_>>()).unwrap();
        assert_eq!(sh.lambda, Vec::<usize>::new());
    }

    #[test]
    fn derived_homs_serre() {
        let alg = three_cycle();
        let m = u3(&alg).h0(&alg).direct_sum(&simple(&alg, 0));
        for x in [u1(&alg), u3(&alg), TwoTermComplex::shifted(1), TwoTermComplex::stalk(2)] {
            let h = derived_homs(&alg, &x, &m);
            assert_eq!(h.to_module, h.module_to_nu);
            assert_eq!(h.to_module, hom_dim(&alg, &x.h0(&alg), &m));
            assert_eq!(h.module_to_nu_kernel, hom_dim(&alg, &m, &x.hminus1_nu(&alg)));
            let e = euler_form(&alg, &x, &m);
            assert_eq!(e, h.to_module as i64 - h.to_shift as i64);
            assert_eq!(e, h.module_to_nu as i64 - h.module_to_nu_kernel as i64);
        }
    }

    #[test]
    fn catalogs() {
        let alg = three_cycle();
        let cat = Catalog::build(&alg, 3).unwrap();
        assert_eq!(cat.indecomposables.len(), 9);
        assert_eq!(cat.entries.len(), 12);
        assert_eq!(cat.siltings.len(), 20);
        assert_eq!(cat.faces.len(), 63);
        let row: Vec<usize> = ["P_2-P_3", "-P_1", "-P_3"]
            .iter()
            .map(|s| cat.find_g(&parse_g_notation(&alg, s).unwrap()).unwrap())
            .collect();
        let mut row = row;
        row.sort();
        assert!(cat.siltings.contains(&row));

        let a2 = Algebra::parse(crate::repmod::tests::A2).unwrap();
        let cat = Catalog::build(&a2, 2).unwrap();
        assert_eq!(cat.entries.len(), 5);
        assert_eq!(cat.siltings.len(), 5);

        let point = Algebra::parse(r#"{"field":{"p":2},"vertices":["1"],"arrows":[]}"#).unwrap();
        let cat = Catalog::build(&point, 1).unwrap();
        assert_eq!(cat.entries.len(), 2);
        assert_eq!(cat.siltings.len(), 2);
    }

    #[test]
    fn small_bound_is_inconclusive() {
        let alg = three_cycle();
        assert!(matches!(Catalog::build(&alg, 2), Err(Error::Inconclusive(_))));
    }
}
