use super::{
    decompose, hom_dim, injective_sum, nakayama_map, projective_cover, projective_map, projective_sum, top_generators, Module,
};
use crate::algebra::{Algebra, Element};
use crate::error::Result;
use crate::twoterm::TwoTermComplex;

/// Minimal projective presentation `P^{-1} -> P^0 -> M -> 0`.
pub fn min_projective_presentation(alg: &Algebra, m: &Module) -> TwoTermComplex {
    let (zero_verts, cover) = projective_cover(alg, m);
    let p0 = projective_sum(alg, &zero_verts);
    let kernel = cover.kernel(alg, &p0);
    // each generator of P^{-1} maps to an element of P^0 at its vertex
    let gens = top_generators(alg, &kernel.module);
    let minus_verts: Vec<usize> = gens.iter().map(|(i, _)| *i).collect();
    let mut d: Vec<Vec<Element>> = vec![Vec::with_capacity(minus_verts.len()); zero_verts.len()];
    for (i, v) in &gens {
        let image = kernel.inclusion.blocks[*i].mul_vec(v);
        let mut offset = 0;
        for (r, &j) in zero_verts.iter().enumerate() {
            let len = alg.corner(j, *i).len();
            d[r].push(alg.from_corner(j, *i, &image[offset..offset + len]));
            offset += len;
        }
    }
    TwoTermComplex::from_parts(minus_verts, zero_verts, d)
}

/// `τM = D Tr M`, with the transpose computed over the opposite algebra.
pub fn tau(alg: &Algebra, m: &Module) -> Module {
    let pres = min_projective_presentation(alg, m);
    let op = alg.op();
    // Hom(-, Λ) turns P^{-1} -> P^0 into ⊕ e_j Λ^op -> ⊕ e_i Λ^op
    let d = pres.differential();
    let transposed: Vec<Vec<Element>> = (0..pres.p_minus1().len())
        .map(|c| {
            (0..pres.p_zero().len())
                .map(|r| alg.to_opposite(op, &d[r][c]))
                .collect()
        })
        .collect();
    let map = projective_map(op, pres.p_zero(), pres.p_minus1(), &transposed);
    let target = projective_sum(op, pres.p_minus1());
    let tr = map.cokernel(op, &target).module;
    tr.dual()
}

/// `τM` as `H^{-1}` of the Nakayama functor applied to a minimal
/// presentation.
pub fn tau_via_nakayama(alg: &Algebra, m: &Module) -> Module {
    let pres = min_projective_presentation(alg, m);
    let source = injective_sum(alg, pres.p_minus1());
    let map = nakayama_map(alg, pres.p_minus1(), pres.p_zero(), pres.differential());
    map.kernel(alg, &source).module
}

pub fn is_tau_rigid(alg: &Algebra, m: &Module) -> bool {
    hom_dim(alg, m, &tau(alg, m)) == 0
}

/// τ-rigid with as many non-isomorphic summands as vertices in its support.
pub fn is_support_tau_tilting(alg: &Algebra, m: &Module) -> Result<bool> {
    if !is_tau_rigid(alg, m) {
        return Ok(false);
    }
    let summands = decompose(alg, m)?;
    Ok(summands.len() == m.support().len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repmod::tests::{three_cycle, uniserial};
    use crate::repmod::{enumerate_indecomposables, is_isomorphic, projective, simple};

    #[test]
    fn presentations() {
        let alg = three_cycle();
        let p = min_projective_presentation(&alg, &projective(&alg, 1));
        assert!(p.p_minus1().is_empty());
        assert_eq!(p.p_zero(), &[1]);
        let m23 = min_projective_presentation(&alg, &uniserial(&alg, &[1, 2]));
        assert_eq!((m23.p_minus1(), m23.p_zero()), (&[0][..], &[1][..]));
        let s1 = min_projective_presentation(&alg, &simple(&alg, 0));
        assert_eq!((s1.p_minus1(), s1.p_zero()), (&[1][..], &[0][..]));
        for m in enumerate_indecomposables(&alg, 3).unwrap() {
            let pres = min_projective_presentation(&alg, &m);
            assert!(is_isomorphic(&alg, &pres.h0(&alg), &m).unwrap());
        }
    }

    #[test]
    fn translates_on_three_cycle() {
        let alg = three_cycle();
        let cases: [(&[usize], &[usize]); 6] = [
            (&[0], &[1]),
            (&[1], &[2]),
            (&[2], &[0]),
            (&[1, 2], &[2, 0]),
            (&[0, 1], &[1, 2]),
            (&[2, 0], &[0, 1]),
        ];
        for (m, t) in cases {
            let got = tau(&alg, &uniserial(&alg, m));
            assert!(is_isomorphic(&alg, &got, &uniserial(&alg, t)).unwrap(), "{m:?}");
        }
        for i in 0..3 {
            assert!(tau(&alg, &projective(&alg, i)).is_zero());
        }
    }

    #[test]
    fn both_constructions_agree() {
        let alg = three_cycle();
        for m in enumerate_indecomposables(&alg, 3).unwrap() {
            let a = tau(&alg, &m);
            let b = tau_via_nakayama(&alg, &m);
            assert!(is_isomorphic(&alg, &a, &b).unwrap());
            assert!(a.satisfies_relations(&alg));
            assert!(is_tau_rigid(&alg, &m));
        }
    }

    #[test]
    fn support_tau_tilting() {
        let alg = three_cycle();
        let lam = projective(&alg, 0)
            .direct_sum(&projective(&alg, 1))
            .direct_sum(&projective(&alg, 2));
        assert!(is_support_tau_tilting(&alg, &lam).unwrap());
        assert!(is_support_tau_tilting(&alg, &Module::zero(&alg)).unwrap());
        // H^0 of P_1 ⊕ P_3 ⊕ (P_2 -> P_1): P_1 ⊕ P_3 ⊕ S_1
        let t = projective(&alg, 0)
            .direct_sum(&projective(&alg, 2))
            .direct_sum(&simple(&alg, 0));
        assert!(is_support_tau_tilting(&alg, &t).unwrap());
        let not = projective(&alg, 0).direct_sum(&simple(&alg, 0));
        assert!(!is_support_tau_tilting(&alg, &not).unwrap());
    }
}
