use std::collections::{BTreeSet, HashSet, VecDeque};

use super::{DimVector, Module};
use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::linalg::SpanBuilder;

type Key = Vec<Vec<Vec<u32>>>;

/// Smallest submodule containing `spans` and the vector `v` at vertex `i`.
fn close(alg: &Algebra, m: &Module, spans: &mut [SpanBuilder], i: usize, v: Vec<u32>) {
    let mut queue = VecDeque::new();
    if spans[i].insert(&v) {
        queue.push_back((i, v));
    }
    while let Some((s, w)) = queue.pop_front() {
        for a in 0..alg.arrow_count() {
            let arrow = alg.arrow(a);
            if arrow.source != s {
                continue;
            }
            let img = m.maps[a].mul_vec(&w);
            if spans[arrow.target].insert(&img) {
                queue.push_back((arrow.target, img));
            }
        }
    }
}

fn all_vectors(p: u32, d: usize) -> impl Iterator<Item = Vec<u32>> {
    let total = (p as u64).pow(d as u32);
    (1..total).filter_map(move |mut k| {
        let mut v = vec![0u32; d];
        for x in v.iter_mut() {
            *x = (k % p as u64) as u32;
            k /= p as u64;
        }
        // one representative per line: leading nonzero coordinate equal to 1
        (v.iter().find(|&&x| x != 0) == Some(&1)).then_some(v)
    })
}

/// Dimension vectors of all submodules of `m`.
///
/// Walks the submodule lattice upward from 0, adding one cyclic submodule
/// generated by a vector at a single vertex at each step.
pub fn submodule_dim_vectors(alg: &Algebra, m: &Module) -> Result<BTreeSet<DimVector>> {
    let limits = alg.limits();
    if m.total_dim() > limits.submodule_dim {
        return Err(Error::ModuleTooLarge {
            dim: m.total_dim(),
            bound: limits.submodule_dim,
        });
    }
    let p = alg.p();
    let n = m.dims.len();
    let lines: Vec<Vec<Vec<u32>>> = (0..n).map(|i| all_vectors(p, m.dims[i]).collect()).collect();

    let empty: Vec<SpanBuilder> = m.dims.iter().map(|&d| SpanBuilder::new(p, d)).collect();
    let key = |spans: &[SpanBuilder]| -> Key { spans.iter().map(SpanBuilder::canonical).collect() };
    let mut seen: HashSet<Key> = HashSet::new();
    let mut out = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(key(&empty));
    out.insert(vec![0; n]);
    queue.push_back(empty);

    while let Some(spans) = queue.pop_front() {
        for i in 0..n {
            for v in &lines[i] {
                if spans[i].contains(v) {
                    continue;
                }
                let mut next = spans.clone();
                close(alg, m, &mut next, i, v.clone());
                if seen.insert(key(&next)) {
                    if seen.len() > limits.submodule_count {
                        return Err(Error::ResourceGuard(format!(
                            "more than {} submodules",
                            limits.submodule_count
                        )));
                    }
                    out.insert(next.iter().map(SpanBuilder::rank).collect());
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repmod::tests::{three_cycle, uniserial};
    use crate::repmod::{projective, simple};

    fn set(v: &[[usize; 3]]) -> BTreeSet<DimVector> {
        v.iter().map(|x| x.to_vec()).collect()
    }

    #[test]
    fn uniserial_submodules() {
        let alg = three_cycle();
        assert_eq!(
            submodule_dim_vectors(&alg, &uniserial(&alg, &[1, 2])).unwrap(),
            set(&[[0, 0, 0], [0, 0, 1], [0, 1, 1]])
        );
        assert_eq!(
            submodule_dim_vectors(&alg, &projective(&alg, 0)).unwrap(),
            set(&[[0, 0, 0], [0, 0, 1], [0, 1, 1], [1, 1, 1]])
        );
        assert_eq!(
            submodule_dim_vectors(&alg, &simple(&alg, 0)).unwrap(),
            set(&[[0, 0, 0], [1, 0, 0]])
        );
    }

    #[test]
    fn semisimple_sum() {
        let alg = three_cycle();
        let m = simple(&alg, 0).direct_sum(&simple(&alg, 0)).direct_sum(&simple(&alg, 2));
        let got = submodule_dim_vectors(&alg, &m).unwrap();
        assert_eq!(
            got,
            set(&[[0, 0, 0], [1, 0, 0], [2, 0, 0], [0, 0, 1], [1, 0, 1], [2, 0, 1]])
        );
    }

    #[test]
    fn guard() {
        let alg = three_cycle().with_limits(crate::algebra::Limits {
            submodule_dim: 2,
            ..Default::default()
        });
        let err = submodule_dim_vectors(&alg, &projective(&alg, 0)).unwrap_err();
        assert!(matches!(err, Error::ModuleTooLarge { dim: 3, bound: 2 }));
    }
}
