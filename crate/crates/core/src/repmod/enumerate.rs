use rayon::prelude::*;

use super::{indecomposables_isomorphic, injective, is_indecomposable, projective, DimVector, Module};
use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// The largest dimension of an indecomposable projective or injective.
pub fn default_dim_bound(alg: &Algebra) -> usize {
    (0..alg.vertex_count())
        .map(|i| projective(alg, i).total_dim().max(injective(alg, i).total_dim()))
        .max()
        .unwrap_or(0)
}

fn dim_vectors(n: usize, bound: usize) -> Vec<DimVector> {
    fn rec(n: usize, left: usize, cur: &mut DimVector, out: &mut Vec<DimVector>) {
        if cur.len() == n {
            if cur.iter().any(|&x| x > 0) {
                out.push(cur.clone());
            }
            return;
        }
        for x in 0..=left {
            cur.push(x);
            rec(n, left - x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, bound, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| (a.iter().sum::<usize>(), a).cmp(&(b.iter().sum::<usize>(), b)));
    out
}

/// The vertices of the support are linked by arrows with nonzero maps.
fn support_connected(alg: &Algebra, dims: &DimVector, maps: &[Matrix]) -> bool {
    let support: Vec<usize> = (0..dims.len()).filter(|&i| dims[i] > 0).collect();
    let Some(&start) = support.first() else {
        return false;
    };
    let mut reached = vec![false; dims.len()];
    reached[start] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for (a, m) in maps.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            let arrow = alg.arrow(a);
            for (x, y) in [(arrow.source, arrow.target), (arrow.target, arrow.source)] {
                if x == v && !reached[y] {
                    reached[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    support.iter().all(|&i| reached[i])
}

fn indecomposables_of_dim(alg: &Algebra, dims: &DimVector) -> Result<Vec<Module>> {
    let p = alg.p();
    let shapes: Vec<(usize, usize)> = (0..alg.arrow_count())
        .map(|a| {
            let arrow = alg.arrow(a);
            (dims[arrow.target], dims[arrow.source])
        })
        .collect();
    let entries: usize = shapes.iter().map(|(r, c)| r * c).sum();
    let tuples = (p as f64).powi(entries as i32);
    if tuples > alg.limits().representation_tuples as f64 {
        return Err(Error::ResourceGuard(format!(
            "{p}^{entries} arrow-matrix tuples for dimension vector {dims:?}"
        )));
    }
    let tuples = (p as u64).pow(entries as u32);
    let mut found: Vec<Module> = Vec::new();
    for code in 0..tuples {
        let mut k = code;
        let mut maps = Vec::with_capacity(shapes.len());
        for &(r, c) in &shapes {
            let data = (0..r * c)
                .map(|_| {
                    let x = (k % p as u64) as u32;
                    k /= p as u64;
                    x
                })
                .collect();
            maps.push(Matrix::from_rows(p, r, c, data));
        }
        if !support_connected(alg, dims, &maps) {
            continue;
        }
        let m = Module::from_parts(dims.clone(), maps);
        if !m.satisfies_relations(alg) || !is_indecomposable(alg, &m)? {
            continue;
        }
        if !found.iter().any(|x| indecomposables_isomorphic(alg, x, &m)) {
            found.push(m);
        }
    }
    Ok(found)
}

/// All indecomposable modules of total dimension at most `bound`, one per
/// isomorphism class, ordered by total dimension and then dimension vector.
pub fn enumerate_indecomposables(alg: &Algebra, bound: usize) -> Result<Vec<Module>> {
    let vectors = dim_vectors(alg.vertex_count(), bound);
    let per_vector: Vec<Result<Vec<Module>>> = vectors
        .par_iter()
        .map(|d| indecomposables_of_dim(alg, d))
        .collect();
    let mut out = Vec::new();
    for r in per_vector {
        out.extend(r?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repmod::tests::{three_cycle, A2};

    #[test]
    fn three_cycle_has_nine() {
        let alg = three_cycle();
        assert_eq!(default_dim_bound(&alg), 3);
        let mods = enumerate_indecomposables(&alg, 3).unwrap();
        let mut dims: Vec<DimVector> = mods.iter().map(|m| m.dims().clone()).collect();
        dims.sort();
        let mut expect = vec![
            vec![1, 1, 1],
            vec![1, 1, 1],
            vec![1, 1, 1],
            vec![1, 0, 1],
            vec![0, 1, 1],
            vec![1, 1, 0],
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
        ];
        expect.sort();
        assert_eq!(dims, expect);
        // nothing new in dimension 4
        let more = enumerate_indecomposables(&alg, 4).unwrap();
        assert_eq!(more.len(), 9);
    }

    #[test]
    fn small_algebras() {
        let point = Algebra::parse(r#"{"field":{"p":2},"vertices":["1"],"arrows":[]}"#).unwrap();
        assert_eq!(enumerate_indecomposables(&point, 3).unwrap().len(), 1);
        let a2 = Algebra::parse(A2).unwrap();
        assert_eq!(default_dim_bound(&a2), 2);
        let mods = enumerate_indecomposables(&a2, 2).unwrap();
        let dims: Vec<DimVector> = mods.iter().map(|m| m.dims().clone()).collect();
        assert_eq!(dims, vec![vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn three_cycle_over_f3() {
        let text = crate::repmod::tests::THREE_CYCLE.replace("\"p\": 2", "\"p\": 3");
        let alg = Algebra::parse(&text).unwrap();
        assert_eq!(enumerate_indecomposables(&alg, 3).unwrap().len(), 9);
    }
}
