//! Finite-dimensional right modules as quiver representations.
//!
//! A module assigns a vector space `M_i` to each vertex and a linear map
//! `M_a : M_i -> M_j` to each arrow `a : i -> j`, stored as a
//! `dims[j] x dims[i]` matrix acting on column vectors. The right action of a
//! path `a_1 ... a_k` is the composite `M_{a_k} ... M_{a_1}`.

mod decompose;
mod enumerate;
mod hom;
mod submodules;
mod tau;

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::algebra::{Algebra, Element, Path};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, SpanBuilder};

pub use decompose::{decompose, indecomposables_isomorphic, is_indecomposable, is_isomorphic};
pub use enumerate::{default_dim_bound, enumerate_indecomposables};
pub use hom::{fac_membership, hom_dim, hom_space, reject_dims, sub_membership, trace_dims};
pub use submodules::submodule_dim_vectors;
pub use tau::{is_support_tau_tilting, is_tau_rigid, min_projective_presentation, tau, tau_via_nakayama};

/// Dimension vector: the class of a module in the simple basis of K_0.
pub type DimVector = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Module {
    dims: DimVector,
    maps: Vec<Matrix>,
}

/// A family of per-vertex linear maps `f_i : M_i -> N_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Morphism {
    pub blocks: Vec<Matrix>,
}

/// Which standard module to build at a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StandardKind {
    Simple,
    Projective,
    Injective,
}

/// A submodule (or quotient) together with its structure maps.
#[derive(Clone, Debug)]
pub struct Sub {
    pub module: Module,
    /// Inclusion into the ambient module.
    pub inclusion: Morphism,
}

#[derive(Clone, Debug)]
pub struct Quotient {
    pub module: Module,
    /// Projection from the ambient module.
    pub projection: Morphism,
    /// A linear (not module) section of the projection at each vertex.
    pub section: Vec<Matrix>,
}

impl Module {
    /// Validates shapes and relations.
    pub fn new(alg: &Algebra, dims: DimVector, maps: Vec<Matrix>) -> Result<Module> {
        if dims.len() != alg.vertex_count() {
            return Err(Error::InvalidModule(format!(
                "expected {} dimensions, got {}",
                alg.vertex_count(),
                dims.len()
            )));
        }
        if maps.len() != alg.arrow_count() {
            return Err(Error::InvalidModule(format!(
                "expected {} arrow maps, got {}",
                alg.arrow_count(),
                maps.len()
            )));
        }
        for (a, m) in maps.iter().enumerate() {
            let arrow = alg.arrow(a);
            if m.rows() != dims[arrow.target] || m.cols() != dims[arrow.source] {
                return Err(Error::InvalidModule(format!(
                    "arrow {} needs a {}x{} matrix, got {}x{}",
                    arrow.name,
                    dims[arrow.target],
                    dims[arrow.source],
                    m.rows(),
                    m.cols()
                )));
            }
            if m.field() != alg.p() {
                return Err(Error::InvalidModule("matrix over the wrong field".into()));
            }
        }
        let module = Module { dims, maps };
        if !module.satisfies_relations(alg) {
            return Err(Error::InvalidModule(
                "a relation does not act as zero".into(),
            ));
        }
        Ok(module)
    }

    pub(crate) fn from_parts(dims: DimVector, maps: Vec<Matrix>) -> Module {
        Module { dims, maps }
    }

    pub fn zero(alg: &Algebra) -> Module {
        let dims = vec![0; alg.vertex_count()];
        let maps = (0..alg.arrow_count())
            .map(|_| Matrix::zeros(alg.p(), 0, 0))
            .collect();
        Module { dims, maps }
    }

    pub fn dims(&self) -> &DimVector {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn map(&self, arrow: usize) -> &Matrix {
        &self.maps[arrow]
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    /// Vertices where the module is nonzero.
    pub fn support(&self) -> Vec<usize> {
        (0..self.dims.len()).filter(|&i| self.dims[i] > 0).collect()
    }

    /// Right action of a path: `dims[target] x dims[source]`.
    pub fn path_action(&self, alg: &Algebra, path: &Path) -> Matrix {
        path.arrows.iter().fold(
            Matrix::identity(alg.p(), self.dims[path.source]),
            |acc, &a| self.maps[a].mul(&acc),
        )
    }

    /// Action of `x ∈ e_i Λ e_j` as a map `M_i -> M_j`; other corners of `x`
    /// are ignored.
    pub fn element_action(&self, alg: &Algebra, x: &Element, i: usize, j: usize) -> Matrix {
        let mut out = Matrix::zeros(alg.p(), self.dims[j], self.dims[i]);
        for &b in alg.corner(i, j) {
            if x[b] != 0 {
                let act = self.path_action(alg, &alg.basis()[b]).scale(x[b]);
                out = out.add(&act);
            }
        }
        out
    }

    pub fn satisfies_relations(&self, alg: &Algebra) -> bool {
        alg.presentation().relations.iter().all(|r| {
            let (s, t) = (r.source(), r.target());
            let mut acc = Matrix::zeros(alg.p(), self.dims[t], self.dims[s]);
            for (c, q) in &r.terms {
                acc = acc.add(&self.path_action(alg, q).scale(*c));
            }
            acc.is_zero()
        })
    }

    pub fn direct_sum(&self, other: &Module) -> Module {
        let dims: DimVector = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let maps = self
            .maps
            .iter()
            .zip(&other.maps)
            .map(|(x, y)| block_diag(x, y))
            .collect();
        Module { dims, maps }
    }

    pub fn direct_sum_all<'a>(alg: &Algebra, parts: impl IntoIterator<Item = &'a Module>) -> Module {
        parts
            .into_iter()
            .fold(Module::zero(alg), |acc, m| acc.direct_sum(m))
    }

    /// The k-dual, read as a module over the opposite quiver (or back).
    pub fn dual(&self) -> Module {
        Module {
            dims: self.dims.clone(),
            maps: self.maps.iter().map(Matrix::transpose).collect(),
        }
    }

    /// Restriction to subspaces `bases[i]` (columns, linearly independent)
    /// that are closed under every arrow.
    pub fn submodule(&self, alg: &Algebra, bases: Vec<Matrix>) -> Result<Sub> {
        let p = alg.p();
        let mut maps = Vec::with_capacity(alg.arrow_count());
        for (a, m) in self.maps.iter().enumerate() {
            let arrow = alg.arrow(a);
            let (src, dst) = (&bases[arrow.source], &bases[arrow.target]);
            let image = m.mul(src);
            let mut cols = Vec::with_capacity(src.cols());
            for c in 0..image.cols() {
                let x = dst.solve(&image.column(c)).ok_or_else(|| {
                    Error::Internal("subspace is not closed under the arrows".into())
                })?;
                cols.push(x);
            }
            maps.push(Matrix::from_columns(p, dst.cols(), &cols));
        }
        let dims = bases.iter().map(Matrix::cols).collect();
        Ok(Sub {
            module: Module { dims, maps },
            inclusion: Morphism { blocks: bases },
        })
    }

    /// Quotient by a submodule given by per-vertex column bases.
    pub fn quotient(&self, alg: &Algebra, bases: &[Matrix]) -> Result<Quotient> {
        let p = alg.p();
        let mut projection = Vec::new();
        let mut section = Vec::new();
        for (i, basis) in bases.iter().enumerate() {
            let mut span = SpanBuilder::new(p, self.dims[i]);
            for c in basis.columns() {
                span.insert(&c);
            }
            let comp = span.complement();
            let c_mat = Matrix::from_columns(p, self.dims[i], &comp);
            // [U | C] is invertible; the rows of its inverse belonging to C
            // give coordinates in the quotient.
            let full = basis.hstack(&c_mat);
            let inv = full
                .inverse()
                .ok_or_else(|| Error::Internal("quotient basis is not independent".into()))?;
            projection.push(inv.block(basis.cols()..self.dims[i], 0..self.dims[i]));
            section.push(c_mat);
        }
        let mut maps = Vec::new();
        for (a, m) in self.maps.iter().enumerate() {
            let arrow = alg.arrow(a);
            maps.push(projection[arrow.target].mul(m).mul(&section[arrow.source]));
        }
        let dims = section.iter().map(Matrix::cols).collect();
        Ok(Quotient {
            module: Module { dims, maps },
            projection: Morphism { blocks: projection },
            section,
        })
    }

    /// Radical: images of all arrows.
    pub fn radical(&self, alg: &Algebra) -> Sub {
        let p = alg.p();
        let mut spans: Vec<SpanBuilder> =
            self.dims.iter().map(|&d| SpanBuilder::new(p, d)).collect();
        for (a, m) in self.maps.iter().enumerate() {
            let t = alg.arrow(a).target;
            for c in m.columns() {
                spans[t].insert(&c);
            }
        }
        let bases = spans
            .iter()
            .zip(&self.dims)
            .map(|(s, &d)| Matrix::from_columns(p, d, &s.basis()))
            .collect();
        self.submodule(alg, bases).expect("radical is a submodule")
    }

    /// Multiplicity of each simple in the top `M / rad M`.
    pub fn top(&self, alg: &Algebra) -> DimVector {
        let rad = self.radical(alg);
        self.dims
            .iter()
            .zip(rad.module.dims())
            .map(|(a, b)| a - b)
            .collect()
    }

    /// Multiplicity of each simple in the socle.
    pub fn socle(&self, alg: &Algebra) -> DimVector {
        (0..self.dims.len())
            .map(|i| {
                let outgoing: Vec<&Matrix> = self
                    .maps
                    .iter()
                    .enumerate()
                    .filter(|(a, _)| alg.arrow(*a).source == i)
                    .map(|(_, m)| m)
                    .collect();
                let stacked = outgoing
                    .into_iter()
                    .fold(Matrix::zeros(alg.p(), 0, self.dims[i]), |acc, m| acc.vstack(m));
                self.dims[i] - stacked.rank()
            })
            .collect()
    }

    /// Radical layers written top to bottom, e.g. `2/3` for the uniserial
    /// module with top `S_2` and socle `S_3`.
    pub fn loewy_label(&self, alg: &Algebra) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let labels = &alg.quiver().vertices;
        let mut layers = Vec::new();
        let mut current = self.clone();
        while !current.is_zero() {
            let rad = current.radical(alg).module;
            let mut parts = Vec::new();
            for (i, (&a, &b)) in current.dims.iter().zip(rad.dims()).enumerate() {
                for _ in 0..a - b {
                    parts.push(labels[i].clone());
                }
            }
            layers.push(parts.join("+"));
            current = rad;
        }
        layers.join("/")
    }

    pub fn to_json(&self, alg: &Algebra) -> Value {
        let arrows: BTreeMap<String, Vec<Vec<u32>>> = self
            .maps
            .iter()
            .enumerate()
            .map(|(a, m)| {
                let rows = (0..m.rows()).map(|r| m.row(r).to_vec()).collect();
                (alg.arrow(a).name.clone(), rows)
            })
            .collect();
        json!({ "dims": self.dims, "arrows": arrows })
    }

    /// Parses `{"dims": [...], "arrows": {"a": [[...]], ...}}`. Matrices are
    /// row-major, `dims[target]` rows by `dims[source]` columns; missing
    /// arrows default to zero maps.
    pub fn from_json(alg: &Algebra, value: &Value) -> Result<Module> {
        let bad = |m: &str| Error::InvalidModule(m.to_string());
        let dims: DimVector = serde_json::from_value(value.get("dims").cloned().ok_or_else(|| bad("missing dims"))?)
            .map_err(|e| bad(&e.to_string()))?;
        if dims.len() != alg.vertex_count() {
            return Err(bad("dims has the wrong length"));
        }
        let arrows = value
            .get("arrows")
            .cloned()
            .unwrap_or_else(|| json!({}));
        let arrows: BTreeMap<String, Vec<Vec<i64>>> =
            serde_json::from_value(arrows).map_err(|e| bad(&e.to_string()))?;
        for name in arrows.keys() {
            alg.quiver().arrow_index(name)?;
        }
        let p = alg.p();
        let mut maps = Vec::new();
        for a in 0..alg.arrow_count() {
            let arrow = alg.arrow(a);
            let (r, c) = (dims[arrow.target], dims[arrow.source]);
            let m = match arrows.get(&arrow.name) {
                None => Matrix::zeros(p, r, c),
                Some(rows) => {
                    let rows: Vec<&Vec<i64>> = rows.iter().filter(|row| !row.is_empty() || c != 0).collect();
                    if rows.len() != r || rows.iter().any(|row| row.len() != c) {
                        return Err(bad(&format!("arrow {} needs a {r}x{c} matrix", arrow.name)));
                    }
                    let data = rows
                        .iter()
                        .flat_map(|row| row.iter().map(|&x| crate::linalg::reduce(x, p)))
                        .collect();
                    Matrix::from_rows(p, r, c, data)
                }
            };
            maps.push(m);
        }
        Module::new(alg, dims, maps)
    }
}

fn block_diag(x: &Matrix, y: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(x.field(), x.rows() + y.rows(), x.cols() + y.cols());
    for r in 0..x.rows() {
        for c in 0..x.cols() {
            out.set(r, c, x.get(r, c));
        }
    }
    for r in 0..y.rows() {
        for c in 0..y.cols() {
            out.set(x.rows() + r, x.cols() + c, y.get(r, c));
        }
    }
    out
}

impl Morphism {
    pub fn zero(alg: &Algebra, from: &Module, to: &Module) -> Morphism {
        Morphism {
            blocks: (0..alg.vertex_count())
                .map(|i| Matrix::zeros(alg.p(), to.dims[i], from.dims[i]))
                .collect(),
        }
    }

    pub fn identity(alg: &Algebra, m: &Module) -> Morphism {
        Morphism {
            blocks: m.dims.iter().map(|&d| Matrix::identity(alg.p(), d)).collect(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Morphism) -> Morphism {
        Morphism {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(g, f)| g.mul(f))
                .collect(),
        }
    }

    pub fn add(&self, other: &Morphism) -> Morphism {
        Morphism {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn scale(&self, c: u32) -> Morphism {
        Morphism {
            blocks: self.blocks.iter().map(|a| a.scale(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(Matrix::is_zero)
    }

    pub fn is_invertible(&self) -> bool {
        self.blocks.iter().all(Matrix::is_invertible)
    }

    pub fn is_nilpotent(&self) -> bool {
        self.blocks.iter().all(Matrix::is_nilpotent)
    }

    pub fn pow(&self, e: usize) -> Morphism {
        Morphism {
            blocks: self.blocks.iter().map(|b| b.pow(e)).collect(),
        }
    }

    /// All entries, vertex by vertex, as one coordinate vector.
    pub fn flatten(&self) -> Vec<u32> {
        self.blocks.iter().flat_map(|b| b.data().iter().copied()).collect()
    }

    /// Checks `N_a f_i = f_j M_a` for every arrow `a : i -> j`.
    pub fn is_homomorphism(&self, alg: &Algebra, from: &Module, to: &Module) -> bool {
        (0..alg.arrow_count()).all(|a| {
            let arrow = alg.arrow(a);
            to.maps[a].mul(&self.blocks[arrow.source]) == self.blocks[arrow.target].mul(&from.maps[a])
        })
    }

    pub fn kernel(&self, alg: &Algebra, from: &Module) -> Sub {
        let bases = self.blocks.iter().map(Matrix::kernel).collect();
        from.submodule(alg, bases).expect("kernel is a submodule")
    }

    pub fn image(&self, alg: &Algebra, to: &Module) -> Sub {
        let bases = self.blocks.iter().map(Matrix::column_basis).collect();
        to.submodule(alg, bases).expect("image is a submodule")
    }

    pub fn cokernel(&self, alg: &Algebra, to: &Module) -> Quotient {
        let bases: Vec<Matrix> = self.blocks.iter().map(Matrix::column_basis).collect();
        to.quotient(alg, &bases).expect("image is a submodule")
    }
}

pub fn simple(alg: &Algebra, i: usize) -> Module {
    let mut dims = vec![0; alg.vertex_count()];
    dims[i] = 1;
    let maps = (0..alg.arrow_count())
        .map(|a| {
            let arrow = alg.arrow(a);
            Matrix::zeros(alg.p(), dims[arrow.target], dims[arrow.source])
        })
        .collect();
    Module { dims, maps }
}

/// `P_i = e_i Λ`: at vertex `j` the residue paths from `i` to `j`.
pub fn projective(alg: &Algebra, i: usize) -> Module {
    let n = alg.vertex_count();
    let dims: DimVector = (0..n).map(|j| alg.corner(i, j).len()).collect();
    let maps = (0..alg.arrow_count())
        .map(|a| {
            let arrow = alg.arrow(a);
            let (j, k) = (arrow.source, arrow.target);
            let ea = alg.arrow_element(a);
            let cols: Vec<Vec<u32>> = alg
                .corner(i, j)
                .iter()
                .map(|&b| alg.corner_coords(&alg.multiply(&alg.basis_element(b), &ea), i, k))
                .collect();
            Matrix::from_columns(alg.p(), dims[k], &cols)
        })
        .collect();
    Module { dims, maps }
}

/// `I_i = D(Λ e_i)`: at vertex `k` the dual of the residue paths from `k` to `i`.
pub fn injective(alg: &Algebra, i: usize) -> Module {
    let n = alg.vertex_count();
    let dims: DimVector = (0..n).map(|k| alg.corner(k, i).len()).collect();
    let maps = (0..alg.arrow_count())
        .map(|a| {
            let arrow = alg.arrow(a);
            let (k, l) = (arrow.source, arrow.target);
            let ea = alg.arrow_element(a);
            // left multiplication by a : e_l Λ e_i -> e_k Λ e_i, then transpose
            let cols: Vec<Vec<u32>> = alg
                .corner(l, i)
                .iter()
                .map(|&b| alg.corner_coords(&alg.multiply(&ea, &alg.basis_element(b)), k, i))
                .collect();
            Matrix::from_columns(alg.p(), dims[k], &cols).transpose()
        })
        .collect();
    Module { dims, maps }
}

pub fn standard_module(alg: &Algebra, kind: StandardKind, i: usize) -> Result<Module> {
    if i >= alg.vertex_count() {
        return Err(Error::UnknownVertex(i.to_string()));
    }
    Ok(match kind {
        StandardKind::Simple => simple(alg, i),
        StandardKind::Projective => projective(alg, i),
        StandardKind::Injective => injective(alg, i),
    })
}

/// `⊕_c P_{vertices[c]}`.
pub fn projective_sum(alg: &Algebra, vertices: &[usize]) -> Module {
    Module::direct_sum_all(alg, vertices.iter().map(|&i| projective(alg, i)).collect::<Vec<_>>().iter())
}

/// `⊕_c I_{vertices[c]}`.
pub fn injective_sum(alg: &Algebra, vertices: &[usize]) -> Module {
    Module::direct_sum_all(alg, vertices.iter().map(|&i| injective(alg, i)).collect::<Vec<_>>().iter())
}

/// The map `⊕_c P_{from[c]} -> ⊕_r P_{to[r]}` given by left multiplication
/// with `d[r][c] ∈ e_{to[r]} Λ e_{from[c]}`.
pub fn projective_map(alg: &Algebra, from: &[usize], to: &[usize], d: &[Vec<Element>]) -> Morphism {
    let p = alg.p();
    let blocks = (0..alg.vertex_count())
        .map(|k| {
            let rows: usize = to.iter().map(|&j| alg.corner(j, k).len()).sum();
            let mut cols = Vec::new();
            for (c, &i) in from.iter().enumerate() {
                for &q in alg.corner(i, k) {
                    let eq = alg.basis_element(q);
                    let mut col = Vec::with_capacity(rows);
                    for (r, &j) in to.iter().enumerate() {
                        let prod = alg.multiply(&d[r][c], &eq);
                        col.extend(alg.corner_coords(&prod, j, k));
                    }
                    cols.push(col);
                }
            }
            Matrix::from_columns(p, rows, &cols)
        })
        .collect();
    Morphism { blocks }
}

/// The Nakayama image `⊕_c I_{from[c]} -> ⊕_r I_{to[r]}` of the projective
/// map with matrix `d`: each entry `x` becomes the dual of right
/// multiplication by `x`.
pub fn nakayama_map(alg: &Algebra, from: &[usize], to: &[usize], d: &[Vec<Element>]) -> Morphism {
    let p = alg.p();
    let blocks = (0..alg.vertex_count())
        .map(|k| {
            let rows: usize = to.iter().map(|&j| alg.corner(k, j).len()).sum();
            let cols: usize = from.iter().map(|&i| alg.corner(k, i).len()).sum();
            let mut m = Matrix::zeros(p, rows, cols);
            let mut r0 = 0;
            for (r, &j) in to.iter().enumerate() {
                let mut c0 = 0;
                for (c, &i) in from.iter().enumerate() {
                    // R_x : e_k Λ e_j -> e_k Λ e_i, q -> q x ; entry block is R_x^T
                    for (qi, &q) in alg.corner(k, j).iter().enumerate() {
                        let prod = alg.multiply(&alg.basis_element(q), &d[r][c]);
                        for (ti, v) in alg.corner_coords(&prod, k, i).into_iter().enumerate() {
                            m.set(r0 + qi, c0 + ti, v);
                        }
                    }
                    c0 += alg.corner(k, i).len();
                }
                r0 += alg.corner(k, j).len();
            }
            m
        })
        .collect();
    Morphism { blocks }
}

/// The map `P_i -> M` sending `e_i` to `v ∈ M_i`.
pub fn map_from_projective(alg: &Algebra, i: usize, m: &Module, v: &[u32]) -> Morphism {
    let blocks = (0..alg.vertex_count())
        .map(|k| {
            let cols: Vec<Vec<u32>> = alg
                .corner(i, k)
                .iter()
                .map(|&b| m.path_action(alg, &alg.basis()[b]).mul_vec(v))
                .collect();
            Matrix::from_columns(alg.p(), m.dims[k], &cols)
        })
        .collect();
    Morphism { blocks }
}

/// Generators of the top: at each vertex, vectors completing a basis of the
/// radical.
pub fn top_generators(alg: &Algebra, m: &Module) -> Vec<(usize, Vec<u32>)> {
    let rad = m.radical(alg);
    let mut out = Vec::new();
    for (i, basis) in rad.inclusion.blocks.iter().enumerate() {
        let mut span = SpanBuilder::new(alg.p(), m.dims[i]);
        for c in basis.columns() {
            span.insert(&c);
        }
        for v in span.complement() {
            out.push((i, v));
        }
    }
    out
}

/// Projective cover `⊕ P_i -> M` built from the top; returns the vertices of
/// the summands and the covering map.
pub fn projective_cover(alg: &Algebra, m: &Module) -> (Vec<usize>, Morphism) {
    let gens = top_generators(alg, m);
    let vertices: Vec<usize> = gens.iter().map(|(i, _)| *i).collect();
    let mut blocks: Vec<Matrix> = (0..alg.vertex_count())
        .map(|k| Matrix::zeros(alg.p(), m.dims[k], 0))
        .collect();
    for (i, v) in &gens {
        let f = map_from_projective(alg, *i, m, v);
        for (b, fb) in blocks.iter_mut().zip(&f.blocks) {
            *b = b.hstack(fb);
        }
    }
    (vertices, Morphism { blocks })
}
