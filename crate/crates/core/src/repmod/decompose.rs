use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{hom_space, Module, Morphism};
use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::linalg::{self, SpanBuilder};

const RANDOM_TRIES: usize = 64;
const SHIFT_SCAN_LIMIT: u32 = 1024;

fn combination(basis: &[Morphism], coeffs: &[u32]) -> Morphism {
    let mut acc = basis[0].scale(coeffs[0]);
    for (b, &c) in basis.iter().zip(coeffs).skip(1) {
        if c != 0 {
            acc = acc.add(&b.scale(c));
        }
    }
    acc
}

fn splits(f: &Morphism) -> bool {
    !f.is_nilpotent() && !f.is_invertible()
}

fn shift(alg: &Algebra, m: &Module, f: &Morphism, lambda: u32) -> Morphism {
    f.add(&Morphism::identity(alg, m).scale(linalg::neg(lambda, alg.p())))
}

/// Scalars worth trying as eigenvalues of `f`.
fn shift_candidates(p: u32) -> impl Iterator<Item = u32> {
    0..p.min(SHIFT_SCAN_LIMIT)
}

/// An endomorphism that is neither nilpotent nor invertible, if one is found.
/// `Ok(None)` means End(M) was shown to be local.
fn splitting_endomorphism(alg: &Algebra, m: &Module) -> Result<Option<Morphism>> {
    let basis = hom_space(alg, m, m);
    let p = alg.p();

    // each basis element and its scalar shifts
    let mut radical_part = Vec::new();
    let mut certified = true;
    for b in &basis {
        let mut found = None;
        for lambda in shift_candidates(p) {
            let g = shift(alg, m, b, lambda);
            if splits(&g) {
                return Ok(Some(g));
            }
            if g.is_nilpotent() {
                found = Some(g);
                break;
            }
        }
        match found {
            Some(g) => radical_part.push(g),
            None => certified = false,
        }
    }

    // End = k·1 + N with N a nilpotent ideal of codimension one: local
    if certified && is_nilpotent_ideal(alg, m, &radical_part, basis.len()) {
        return Ok(None);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_e4d);
    for _ in 0..RANDOM_TRIES {
        let coeffs: Vec<u32> = (0..basis.len()).map(|_| rng.gen_range(0..p)).collect();
        let f = combination(&basis, &coeffs);
        for lambda in shift_candidates(p) {
            let g = shift(alg, m, &f, lambda);
            if splits(&g) {
                return Ok(Some(g));
            }
        }
    }

    let size = (p as f64).powi(basis.len() as i32);
    if size > alg.limits().end_elements as f64 {
        return Err(Error::EndTooLarge(basis.len()));
    }
    let mut coeffs = vec![0u32; basis.len()];
    loop {
        let f = combination(&basis, &coeffs);
        if splits(&f) {
            return Ok(Some(f));
        }
        let mut k = 0;
        loop {
            if k == coeffs.len() {
                return Ok(None);
            }
            coeffs[k] += 1;
            if coeffs[k] < p {
                break;
            }
            coeffs[k] = 0;
            k += 1;
        }
    }
}

/// Whether `gens` span a nilpotent two-sided ideal of codimension one in an
/// endomorphism ring of dimension `end_dim`.
fn is_nilpotent_ideal(alg: &Algebra, m: &Module, gens: &[Morphism], end_dim: usize) -> bool {
    let p = alg.p();
    let width = m.dims.iter().map(|d| d * d).sum();
    let mut span = SpanBuilder::new(p, width);
    let mut basis = Vec::new();
    for g in gens {
        if span.insert(&g.flatten()) {
            basis.push(g.clone());
        }
    }
    if end_dim == 0 || span.rank() + 1 != end_dim {
        return false;
    }
    // products of ideal elements stay in the ideal, and the power chain dies
    let mut power = basis.clone();
    for _ in 0..=m.total_dim() {
        if power.is_empty() {
            return true;
        }
        let mut next_span = SpanBuilder::new(p, width);
        let mut next = Vec::new();
        for x in &power {
            for y in &basis {
                let xy = x.compose(y);
                if !span.contains(&xy.flatten()) {
                    return false;
                }
                if next_span.insert(&xy.flatten()) {
                    next.push(xy);
                }
            }
        }
        power = next;
    }
    power.is_empty()
}

/// Splits `m` along an endomorphism `f` via Fitting's lemma:
/// `M = ker f^N ⊕ im f^N`.
fn fitting_split(alg: &Algebra, m: &Module, f: &Morphism) -> (Module, Module) {
    let fnn = f.pow(m.total_dim().max(1));
    let ker = fnn.kernel(alg, m).module;
    let im = fnn.image(alg, m).module;
    (ker, im)
}

fn split_all(alg: &Algebra, m: &Module, out: &mut Vec<Module>) -> Result<()> {
    if m.is_zero() {
        return Ok(());
    }
    match splitting_endomorphism(alg, m)? {
        None => out.push(m.clone()),
        Some(f) => {
            let (a, b) = fitting_split(alg, m, &f);
            split_all(alg, &a, out)?;
            split_all(alg, &b, out)?;
        }
    }
    Ok(())
}

pub fn is_indecomposable(alg: &Algebra, m: &Module) -> Result<bool> {
    if m.is_zero() {
        return Ok(false);
    }
    Ok(splitting_endomorphism(alg, m)?.is_none())
}

/// Isomorphism test for two indecomposable modules: they are isomorphic iff
/// some composite `N -> M -> N` of basis maps is not nilpotent.
pub fn indecomposables_isomorphic(alg: &Algebra, m: &Module, n: &Module) -> bool {
    if m.dims != n.dims {
        return false;
    }
    let fs = hom_space(alg, m, n);
    if fs.is_empty() {
        return false;
    }
    let gs = hom_space(alg, n, m);
    fs.iter()
        .any(|f| gs.iter().any(|g| !g.compose(f).is_nilpotent()))
}

/// Indecomposable summands with multiplicities, ordered by dimension vector.
pub fn decompose(alg: &Algebra, m: &Module) -> Result<Vec<(Module, usize)>> {
    let mut pieces = Vec::new();
    split_all(alg, m, &mut pieces)?;
    let mut groups: Vec<(Module, usize)> = Vec::new();
    for piece in pieces {
        match groups
            .iter_mut()
            .find(|(rep, _)| indecomposables_isomorphic(alg, rep, &piece))
        {
            Some((_, k)) => *k += 1,
            None => groups.push((piece, 1)),
        }
    }
    groups.sort_by(|a, b| {
        (a.0.total_dim(), &a.0.dims).cmp(&(b.0.total_dim(), &b.0.dims))
    });
    Ok(groups)
}

pub fn is_isomorphic(alg: &Algebra, m: &Module, n: &Module) -> Result<bool> {
    if m.dims != n.dims {
        return Ok(false);
    }
    let a = decompose(alg, m)?;
    let b = decompose(alg, n)?;
    if a.len() != b.len() {
        return Ok(false);
    }
    let mut used = vec![false; b.len()];
    for (x, k) in &a {
        let hit = b.iter().enumerate().find(|(j, (y, l))| {
            !used[*j] && l == k && indecomposables_isomorphic(alg, x, y)
        });
        match hit {
            Some((j, _)) => used[j] = true,
            None => return Ok(false),
        }
    }
    Ok(true)
}
