use super::{DimVector, Module, Morphism};
use crate::algebra::Algebra;
use crate::linalg::{self, Matrix};

/// Offsets of each vertex block in the flattened unknowns of `Hom(M, N)`.
fn block_offsets(m: &Module, n: &Module) -> Vec<usize> {
    let mut out = Vec::with_capacity(m.dims.len() + 1);
    let mut acc = 0;
    out.push(0);
    for (a, b) in m.dims.iter().zip(&n.dims) {
        acc += a * b;
        out.push(acc);
    }
    out
}

/// The intertwiner system `N_a f_i - f_j M_a = 0`, one row per entry of
/// each arrow equation, columns indexed by the row-major entries of the
/// blocks `f_i`.
fn intertwiner_system(alg: &Algebra, m: &Module, n: &Module) -> Matrix {
    let p = alg.p();
    let offsets = block_offsets(m, n);
    let unknowns = *offsets.last().unwrap();
    let eqs: usize = (0..alg.arrow_count())
        .map(|a| {
            let arrow = alg.arrow(a);
            n.dims[arrow.target] * m.dims[arrow.source]
        })
        .sum();
    let mut sys = Matrix::zeros(p, eqs, unknowns);
    let mut row = 0;
    for a in 0..alg.arrow_count() {
        let arrow = alg.arrow(a);
        let (i, j) = (arrow.source, arrow.target);
        let (na, ma) = (&n.maps[a], &m.maps[a]);
        // f_i is n.dims[i] x m.dims[i]; f_j is n.dims[j] x m.dims[j]
        for r in 0..n.dims[j] {
            for c in 0..m.dims[i] {
                for k in 0..n.dims[i] {
                    let col = offsets[i] + k * m.dims[i] + c;
                    let v = linalg::add(sys.get(row, col), na.get(r, k), p);
                    sys.set(row, col, v);
                }
                for k in 0..m.dims[j] {
                    let col = offsets[j] + r * m.dims[j] + k;
                    let v = linalg::sub(sys.get(row, col), ma.get(k, c), p);
                    sys.set(row, col, v);
                }
                row += 1;
            }
        }
    }
    sys
}

fn unflatten(alg: &Algebra, m: &Module, n: &Module, v: &[u32]) -> Morphism {
    let offsets = block_offsets(m, n);
    let blocks = (0..m.dims.len())
        .map(|i| {
            Matrix::from_rows(
                alg.p(),
                n.dims[i],
                m.dims[i],
                v[offsets[i]..offsets[i + 1]].to_vec(),
            )
        })
        .collect();
    Morphism { blocks }
}

/// A basis of `Hom_Λ(M, N)`.
pub fn hom_space(alg: &Algebra, m: &Module, n: &Module) -> Vec<Morphism> {
    let sys = intertwiner_system(alg, m, n);
    let kernel = sys.kernel();
    (0..kernel.cols())
        .map(|c| unflatten(alg, m, n, &kernel.column(c)))
        .collect()
}

pub fn hom_dim(alg: &Algebra, m: &Module, n: &Module) -> usize {
    let sys = intertwiner_system(alg, m, n);
    sys.cols() - sys.rank()
}

/// Dimension vector of the trace of `M` in `N`, the sum of the images of
/// all maps `M -> N`.
pub fn trace_dims(alg: &Algebra, m: &Module, n: &Module) -> DimVector {
    let homs = hom_space(alg, m, n);
    (0..n.dims.len())
        .map(|i| {
            homs.iter()
                .fold(Matrix::zeros(alg.p(), n.dims[i], 0), |acc, f| acc.hstack(&f.blocks[i]))
                .rank()
        })
        .collect()
}

/// Dimension vector of the joint kernel of all maps `N -> M`.
pub fn reject_dims(alg: &Algebra, m: &Module, n: &Module) -> DimVector {
    let homs = hom_space(alg, n, m);
    (0..n.dims.len())
        .map(|i| {
            let rank = homs
                .iter()
                .fold(Matrix::zeros(alg.p(), 0, n.dims[i]), |acc, f| acc.vstack(&f.blocks[i]))
                .rank();
            n.dims[i] - rank
        })
        .collect()
}

/// `N ∈ Fac M`: the images of all maps `M -> N` together span `N`.
pub fn fac_membership(alg: &Algebra, m: &Module, n: &Module) -> bool {
    n.is_zero() || &trace_dims(alg, m, n) == n.dims()
}

/// `N ∈ Sub M`: the maps `N -> M` have zero joint kernel.
pub fn sub_membership(alg: &Algebra, m: &Module, n: &Module) -> bool {
    n.is_zero() || reject_dims(alg, m, n).iter().all(|&d| d == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repmod::tests::{three_cycle, uniserial};
    use crate::repmod::{injective, projective, simple};

    #[test]
    fn hom_from_projective_is_evaluation() {
        let alg = three_cycle();
        let mods = [
            uniserial(&alg, &[1, 2]),
            simple(&alg, 0),
            projective(&alg, 2),
            injective(&alg, 1).direct_sum(&simple(&alg, 1)),
        ];
        for m in &mods {
            for i in 0..3 {
                assert_eq!(hom_dim(&alg, &projective(&alg, i), m), m.dims()[i]);
            }
        }
    }

    #[test]
    fn hom_basis_elements_are_homomorphisms() {
        let alg = three_cycle();
        let m = projective(&alg, 0).direct_sum(&uniserial(&alg, &[1, 2]));
        let n = uniserial(&alg, &[1, 2]).direct_sum(&simple(&alg, 1));
        let basis = hom_space(&alg, &m, &n);
        assert_eq!(basis.len(), hom_dim(&alg, &m, &n));
        for f in &basis {
            assert!(f.is_homomorphism(&alg, &m, &n));
        }
    }

    #[test]
    fn socle_maps() {
        let alg = three_cycle();
        assert_eq!(hom_dim(&alg, &simple(&alg, 1), &projective(&alg, 2)), 1);
        assert_eq!(hom_dim(&alg, &simple(&alg, 0), &projective(&alg, 2)), 0);
        let p = projective(&alg, 1);
        assert_eq!(hom_dim(&alg, &p, &p), 1);
    }

    #[test]
    fn fac_and_sub() {
        let alg = three_cycle();
        let m23 = uniserial(&alg, &[1, 2]);
        let s2 = simple(&alg, 1);
        assert!(fac_membership(&alg, &m23, &s2));
        assert!(!fac_membership(&alg, &s2, &m23));
        let lam = (0..3).fold(crate::repmod::Module::zero(&alg), |acc, i| acc.direct_sum(&projective(&alg, i)));
        assert!(fac_membership(&alg, &lam, &m23));
        for i in 0..3 {
            assert!(sub_membership(&alg, &injective(&alg, i), &simple(&alg, i)));
        }
        assert!(sub_membership(&alg, &m23, &m23));
        assert!(!sub_membership(&alg, &m23, &simple(&alg, 0)));
        assert!(sub_membership(&alg, &m23, &simple(&alg, 2)));
    }
}
