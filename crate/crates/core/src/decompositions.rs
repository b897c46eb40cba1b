//! Interval-decomposition changes at a fixed grade: which basis changes
//! are admissible, lazy enumeration of the resulting matrix family, and
//! the alternate terminal classes and bar representations they induce.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::field::FieldSpec;
use crate::persistence::{Bar, BarId, BarRepresentation, Chain, PersistenceResult};
use crate::{Error, Result};

/// The sparsity pattern of admissible basis changes among a set of bars
/// alive at one grade: entry (r, c) may be nonzero exactly when
/// β(τ_r) ≤ β(τ_c) < δ(τ_r) ≤ δ(τ_c).
#[derive(Debug, Clone)]
pub struct AdmissiblePattern {
    bars: Vec<Bar>,
    allowed: Vec<(usize, usize)>,
}

impl AdmissiblePattern {
    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    pub fn allowed(&self) -> &[(usize, usize)] {
        &self.allowed
    }

    pub fn position_of(&self, id: BarId) -> Option<usize> {
        self.bars.iter().position(|b| b.id == id)
    }
}

/// Builds the admissible pattern for a bar set. Bars are ordered by
/// (birth desc, death desc), which makes every admissible matrix
/// triangular.
pub fn admissible_pattern(bars: &[Bar]) -> Result<AdmissiblePattern> {
    let mut bars: Vec<Bar> = bars.to_vec();
    bars.sort_by(|a, b| {
        b.birth
            .cmp(&a.birth)
            .then(b.death.cmp(&a.death))
            .then(a.id.cmp(&b.id))
    });
    for w in bars.windows(2) {
        if w[0].birth == w[1].birth && w[0].death == w[1].death {
            return Err(Error::AssumptionViolated(format!(
                "bars {} and {} share the interval [{}, {})",
                w[0].id, w[1].id, w[0].birth, w[0].death
            )));
        }
    }
    let mut allowed = Vec::new();
    for r in 0..bars.len() {
        for c in 0..bars.len() {
            if r != c
                && bars[r].birth <= bars[c].birth
                && bars[c].birth < bars[r].death
                && bars[r].death <= bars[c].death
            {
                allowed.push((r, c));
            }
        }
    }
    Ok(AdmissiblePattern { bars, allowed })
}

/// One admissible basis change: nonzero diagonal plus values at the
/// pattern's allowed positions. Triangular by construction, hence
/// invertible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChangeMatrix {
    pub diag: Vec<u64>,
    /// Parallel to the pattern's allowed positions.
    pub off: Vec<u64>,
}

impl ChangeMatrix {
    pub fn entry(&self, pattern: &AdmissiblePattern, r: usize, c: usize) -> u64 {
        if r == c {
            return self.diag[r];
        }
        pattern
            .allowed
            .iter()
            .position(|&p| p == (r, c))
            .map(|i| self.off[i])
            .unwrap_or(0)
    }

    /// `L x` over the pattern's bar positions.
    pub fn apply(&self, pattern: &AdmissiblePattern, x: &[u64], field: &FieldSpec) -> Vec<u64> {
        let mut y: Vec<u64> = (0..x.len()).map(|r| field.mul(self.diag[r], x[r])).collect();
        for (i, &(r, c)) in pattern.allowed.iter().enumerate() {
            y[r] = field.add(y[r], field.mul(self.off[i], x[c]));
        }
        y
    }

    pub fn to_dense(&self, pattern: &AdmissiblePattern) -> Vec<Vec<u64>> {
        let m = pattern.bars.len();
        let mut out = vec![vec![0; m]; m];
        for r in 0..m {
            out[r][r] = self.diag[r];
        }
        for (i, &(r, c)) in pattern.allowed.iter().enumerate() {
            out[r][c] = self.off[i];
        }
        out
    }
}

/// Lazy, deterministic enumeration of every admissible change matrix:
/// (p−1)^m · p^|allowed| members, counter over the allowed positions
/// running fastest.
pub struct ChangeIter<'a> {
    pattern: &'a AdmissiblePattern,
    p: u64,
    next: u128,
    total: u128,
}

impl<'a> ChangeIter<'a> {
    pub fn total(&self) -> u128 {
        self.total
    }
}

impl<'a> Iterator for ChangeIter<'a> {
    type Item = ChangeMatrix;

    fn next(&mut self) -> Option<ChangeMatrix> {
        if self.next >= self.total {
            return None;
        }
        let m = self.pattern.bars.len();
        let a = self.pattern.allowed.len();
        let mut idx = self.next;
        self.next += 1;
        let mut off = Vec::with_capacity(a);
        for _ in 0..a {
            off.push((idx % self.p as u128) as u64);
            idx /= self.p as u128;
        }
        let radix = (self.p - 1) as u128;
        let mut diag = Vec::with_capacity(m);
        for _ in 0..m {
            diag.push(1 + (idx % radix) as u64);
            idx /= radix;
        }
        Some(ChangeMatrix { diag, off })
    }
}

pub fn enumerate_changes<'a>(pattern: &'a AdmissiblePattern, field: &FieldSpec) -> ChangeIter<'a> {
    let p = field.characteristic();
    let m = pattern.bars.len() as u32;
    let a = pattern.allowed.len() as u32;
    let total = ((p - 1) as u128)
        .checked_pow(m)
        .and_then(|d| (p as u128).checked_pow(a).and_then(|o| d.checked_mul(o)))
        .unwrap_or(u128::MAX);
    ChangeIter {
        pattern,
        p,
        next: 0,
        total,
    }
}

/// Every terminal class a bar can have across interval decompositions,
/// at ψ = δ(τ)−1, deduplicated up to homology. Bars alive at ψ that
/// share τ's death parameter make the terminal class ambiguous in a way
/// this routine rejects; without them the set is exactly the nonzero
/// scalar multiples of the stored class, and over GF(2) the single
/// stored class.
pub fn alternate_terminal_classes(
    res: &PersistenceResult,
    id: BarId,
) -> Result<(usize, Vec<Chain>)> {
    let bar = *res.bar(id);
    let (psi, rep) = res.terminal_class(id);
    let alive = res.bars_alive_at(bar.dim, psi)?;
    let clashing: Vec<BarId> = alive
        .iter()
        .filter(|b| b.id != id && b.death == bar.death)
        .map(|b| b.id)
        .collect();
    if !clashing.is_empty() {
        return Err(Error::AssumptionViolated(format!(
            "bars {clashing:?} share the death parameter of bar {id}"
        )));
    }
    let p = res.field().characteristic();
    let field = *res.field();
    let mut seen: BTreeSet<Vec<(u64, BarId)>> = BTreeSet::new();
    let mut classes = Vec::new();
    for d in 1..p {
        let z = rep.scaled(d, &field);
        let key = res.bar_representation(&z, psi)?.terms;
        if seen.insert(key) {
            classes.push(z);
        }
    }
    Ok((psi, classes))
}

/// Terminal-class enumeration at an arbitrary grade ψ where the bar is
/// alive. The class can differ from the stored one by a nonzero scalar
/// and by any combination of bars alive at ψ with earlier-or-equal birth
/// and death. Enumeration stops at `cap` chains, flagged as truncated.
pub fn terminal_classes_at(
    res: &PersistenceResult,
    id: BarId,
    psi: usize,
    cap: usize,
) -> Result<(Vec<Chain>, bool)> {
    let bar = *res.bar(id);
    if !(bar.birth <= psi && psi < bar.death) {
        return Err(Error::InvalidInput(format!(
            "bar {id} is not alive at {psi}"
        )));
    }
    let field = *res.field();
    let p = field.characteristic();
    let rows: Vec<BarId> = res
        .bars_alive_at(bar.dim, psi)?
        .iter()
        .filter(|b| b.id != id && b.birth <= bar.birth && b.death <= bar.death)
        .map(|b| b.id)
        .collect();
    let total = ((p - 1) as u128)
        .checked_mul((p as u128).checked_pow(rows.len() as u32).unwrap_or(u128::MAX))
        .unwrap_or(u128::MAX);
    let mut classes = Vec::new();
    let mut idx: u128 = 0;
    while idx < total && classes.len() < cap {
        let mut rem = idx;
        let d = 1 + (rem % (p - 1) as u128) as u64;
        rem /= (p - 1) as u128;
        let mut z = res.representative(id).scaled(d, &field);
        for &r in &rows {
            let c = (rem % p as u128) as u64;
            rem /= p as u128;
            if c != 0 {
                z = z.add_scaled(c, res.representative(r), &field);
            }
        }
        classes.push(z);
        idx += 1;
    }
    Ok((classes, idx < total))
}

/// Rebuilds a persistence result with its representatives transformed
/// by an admissible change matrix: the new representative of bar c is
/// Σ_r L[r][c] · rep(r).
pub fn apply_decomposition_change(
    res: &PersistenceResult,
    pattern: &AdmissiblePattern,
    l: &ChangeMatrix,
) -> Result<PersistenceResult> {
    let field = *res.field();
    let mut out = res.clone();
    for (c, bar_c) in pattern.bars().iter().enumerate() {
        let mut rep = Chain::zero();
        for (r, bar_r) in pattern.bars().iter().enumerate() {
            let coeff = l.entry(pattern, r, c);
            if coeff != 0 {
                rep = rep.add_scaled(coeff, res.representative(bar_r.id), &field);
            }
        }
        if rep.is_zero() {
            return Err(Error::InvalidInput("change matrix zeroes a representative".into()));
        }
        out.set_representative(bar_c.id, rep);
    }
    Ok(out)
}

/// The bar representations a fixed class takes across all decompositions
/// compatible with the pattern: one `L · d` per change matrix, where `d`
/// is the coefficient vector of `rep`.
pub fn alternate_bar_representations<'a>(
    rep: &BarRepresentation,
    pattern: &'a AdmissiblePattern,
    field: &'a FieldSpec,
) -> Result<impl Iterator<Item = BarRepresentation> + 'a> {
    let mut d = vec![0u64; pattern.bars.len()];
    for &(c, id) in &rep.terms {
        let Some(pos) = pattern.position_of(id) else {
            return Err(Error::InvalidInput(format!(
                "bar {id} of the representation is not in the pattern"
            )));
        };
        d[pos] = c;
    }
    let at = rep.at;
    Ok(enumerate_changes(pattern, field).map(move |l| {
        let y = l.apply(pattern, &d, field);
        let mut terms: Vec<(u64, BarId)> = y
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c != 0)
            .map(|(pos, &c)| (c, pattern.bars[pos].id))
            .collect();
        terms.sort_by_key(|t| t.1);
        BarRepresentation { at, terms }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{clique_complex, DissimilarityMatrix};
    use crate::linalg::{reduce_with_basis, SparseMatrix, SparseVec};
    use crate::persistence::compute_persistence;

    fn bar(id: BarId, birth: usize, death: usize) -> Bar {
        Bar {
            id,
            dim: 1,
            birth,
            death,
        }
    }

    #[test]
    fn pattern_from_overlapping_bars() {
        let p = admissible_pattern(&[bar(0, 1, 3), bar(1, 2, 4)]).unwrap();
        // Order is (birth desc, death desc): [2,4) first.
        assert_eq!(p.bars()[0].id, 1);
        // One admissible position: the [1,3) row, [2,4) column.
        assert_eq!(p.allowed(), &[(1, 0)]);
    }

    #[test]
    fn pattern_disjoint_and_nested() {
        let p = admissible_pattern(&[bar(0, 1, 2), bar(1, 3, 4)]).unwrap();
        assert!(p.allowed().is_empty());
        let p = admissible_pattern(&[bar(0, 1, 9), bar(1, 2, 3)]).unwrap();
        assert!(p.allowed().is_empty());
    }

    #[test]
    fn pattern_rejects_duplicate_intervals() {
        assert!(matches!(
            admissible_pattern(&[bar(0, 1, 3), bar(1, 1, 3)]),
            Err(Error::AssumptionViolated(_))
        ));
    }

    #[test]
    fn enumeration_counts() {
        let empty = admissible_pattern(&[bar(0, 1, 2), bar(1, 3, 4)]).unwrap();
        let gf2 = FieldSpec::GF2;
        let ms: Vec<ChangeMatrix> = enumerate_changes(&empty, &gf2).collect();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].diag, vec![1, 1]);

        let overlap = admissible_pattern(&[bar(0, 1, 3), bar(1, 2, 4)]).unwrap();
        let ms: Vec<ChangeMatrix> = enumerate_changes(&overlap, &gf2).collect();
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[0].off, vec![0]);
        assert_eq!(ms[1].off, vec![1]);

        let gf3 = FieldSpec::new(3).unwrap();
        let it = enumerate_changes(&overlap, &gf3);
        assert_eq!(it.total(), 12);
        assert_eq!(it.count(), 12);
    }

    #[test]
    fn every_change_matrix_is_invertible() {
        let gf3 = FieldSpec::new(3).unwrap();
        let pat = admissible_pattern(&[bar(0, 1, 3), bar(1, 2, 4), bar(2, 2, 5)]).unwrap();
        for l in enumerate_changes(&pat, &gf3) {
            let dense = l.to_dense(&pat);
            let m = dense.len();
            let cols: Vec<SparseVec> = (0..m)
                .map(|c| {
                    SparseVec::from_entries((0..m).map(|r| (r, dense[r][c])), &gf3)
                })
                .collect();
            let a = SparseMatrix::from_columns(m, cols).unwrap();
            let (r, _) = reduce_with_basis(&a, &gf3);
            assert!((0..m).all(|j| !r.col(j).is_zero()), "singular: {dense:?}");
        }
    }

    #[test]
    fn representation_transport() {
        let gf2 = FieldSpec::GF2;
        let pat = admissible_pattern(&[bar(0, 1, 3), bar(1, 2, 4)]).unwrap();
        let l = enumerate_changes(&pat, &gf2).last().unwrap(); // off entry = 1
        let t1 = BarRepresentation { at: 2, terms: vec![(1, 0)] };
        let t2 = BarRepresentation { at: 2, terms: vec![(1, 1)] };
        let both = BarRepresentation {
            at: 2,
            terms: vec![(1, 0), (1, 1)],
        };
        let d = |rep: &BarRepresentation| {
            let mut v = vec![0u64; 2];
            for &(c, id) in &rep.terms {
                v[pat.position_of(id).unwrap()] = c;
            }
            v
        };
        let back = |y: Vec<u64>| {
            let mut terms: Vec<(u64, BarId)> = y
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c != 0)
                .map(|(pos, &c)| (c, pat.bars()[pos].id))
                .collect();
            terms.sort_by_key(|t| t.1);
            terms
        };
        // The bar with the earlier birth is fixed, the later one picks
        // up the earlier, and their sum cancels to the later alone.
        assert_eq!(back(l.apply(&pat, &d(&t1), &gf2)), vec![(1, 0)]);
        assert_eq!(back(l.apply(&pat, &d(&t2), &gf2)), vec![(1, 0), (1, 1)]);
        assert_eq!(back(l.apply(&pat, &d(&both), &gf2)), vec![(1, 1)]);
        // Same through the public stream: identity first, then L.
        let reps: Vec<BarRepresentation> =
            alternate_bar_representations(&both, &pat, &gf2).unwrap().collect();
        assert_eq!(reps.len(), 2);
        assert_eq!(reps[0], both);
        assert_eq!(reps[1].terms, vec![(1, 1)]);
    }

    fn sq4() -> DissimilarityMatrix {
        let d = 2f64.sqrt();
        DissimilarityMatrix::new(
            4,
            vec![
                0.0, 1.0, d, 1.0, //
                1.0, 0.0, 1.0, d, //
                d, 1.0, 0.0, 1.0, //
                1.0, d, 1.0, 0.0,
            ],
        )
        .unwrap()
    }

    #[test]
    fn terminal_class_unique_over_gf2() {
        let x = clique_complex(&sq4(), 2).unwrap();
        let res = compute_persistence(&x, 1, FieldSpec::GF2).unwrap();
        let id = res.bars_of_dim(1).next().unwrap().id;
        let (psi, classes) = alternate_terminal_classes(&res, id).unwrap();
        assert_eq!(psi, 1);
        assert_eq!(classes, vec![res.representative(id).clone()]);
    }

    #[test]
    fn terminal_class_scalars_over_gf3() {
        let f = FieldSpec::new(3).unwrap();
        let x = clique_complex(&sq4(), 2).unwrap();
        let res = compute_persistence(&x, 1, f).unwrap();
        let id = res.bars_of_dim(1).next().unwrap().id;
        let (_, classes) = alternate_terminal_classes(&res, id).unwrap();
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[1], classes[0].scaled(2, &f));
    }

    #[test]
    fn terminal_class_rejects_shared_deaths() {
        // Two far-apart unit squares: two loop bars with equal lifetimes.
        let sq = sq4();
        let mut m = vec![100.0; 64];
        for i in 0..4 {
            for j in 0..4 {
                m[i * 8 + j] = sq.get(i, j);
                m[(i + 4) * 8 + (j + 4)] = sq.get(i, j);
            }
        }
        for i in 0..8 {
            m[i * 8 + i] = 0.0;
        }
        let mm = DissimilarityMatrix::new(8, m).unwrap();
        let x = clique_complex(&mm, 2).unwrap();
        let res = compute_persistence(&x, 1, FieldSpec::new(3).unwrap()).unwrap();
        let id = res.bars_of_dim(1).next().unwrap().id;
        assert!(matches!(
            alternate_terminal_classes(&res, id),
            Err(Error::AssumptionViolated(_))
        ));
    }
}
