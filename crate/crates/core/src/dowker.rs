//! Duality between the two witness complexes of one relation: barcode
//! equality checks, bar correspondence by endpoint values, and
//! chain-level duality of a cycle at a fixed parameter, certified inside
//! the cross complex.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::complex::{cross_complex_at, witness_complex, CrossDissimilarityMatrix, Simplex};
use crate::field::FieldSpec;
use crate::linalg::{solve, SparseMatrix, SparseVec};
use crate::persistence::{compute_persistence, BarId, Chain, PersistenceResult};
use crate::{Error, Result};

/// Persistence of both one-sided witness complexes and whether their
/// degree-k barcodes agree as multisets of endpoint values.
#[derive(Debug, Clone)]
pub struct BarcodeCheck {
    pub landmark: PersistenceResult,
    pub witness: PersistenceResult,
    pub equal: bool,
}

fn endpoint_values(res: &PersistenceResult, k: usize) -> Vec<(u64, Option<u64>)> {
    let mut out: Vec<(u64, Option<u64>)> = res
        .bars_of_dim(k)
        .map(|b| {
            (
                res.scale().value(b.birth).unwrap().to_bits(),
                res.scale().value(b.death).map(f64::to_bits),
            )
        })
        .collect();
    out.sort_unstable();
    out
}

/// Computes the degree-k barcodes of W(B) and W(Bᵀ) and compares them
/// by (birth value, death value) multisets.
pub fn dowker_barcode_check(
    b: &CrossDissimilarityMatrix,
    k: usize,
    field: FieldSpec,
) -> Result<BarcodeCheck> {
    let wp = witness_complex(b, k + 1)?;
    let wq = witness_complex(&b.transpose(), k + 1)?;
    let landmark = compute_persistence(&wp, k, field)?;
    let witness = compute_persistence(&wq, k, field)?;
    Ok(barcode_check_of(landmark, witness, k))
}

/// Same comparison for persistence results computed by the caller, e.g.
/// in parallel.
pub fn barcode_check_of(
    landmark: PersistenceResult,
    witness: PersistenceResult,
    k: usize,
) -> BarcodeCheck {
    let equal = endpoint_values(&landmark, k) == endpoint_values(&witness, k);
    BarcodeCheck {
        landmark,
        witness,
        equal,
    }
}

/// Matches degree-k bars of the two sides by equal (birth value, death
/// value) pairs. Duplicate endpoint pairs on either side are ambiguous
/// and rejected.
pub fn dowker_bar_correspondence(
    landmark: &PersistenceResult,
    witness: &PersistenceResult,
    k: usize,
) -> Result<Vec<(BarId, BarId)>> {
    let key = |res: &PersistenceResult, id: BarId| {
        let b = res.bar(id);
        (
            res.scale().value(b.birth).unwrap().to_bits(),
            res.scale().value(b.death).map(f64::to_bits),
        )
    };
    let mut by_key: BTreeMap<(u64, Option<u64>), BarId> = BTreeMap::new();
    for b in witness.bars_of_dim(k) {
        if by_key.insert(key(witness, b.id), b.id).is_some() {
            return Err(Error::AssumptionViolated(
                "duplicate bar endpoints on the witness side".into(),
            ));
        }
    }
    let mut seen: BTreeMap<(u64, Option<u64>), ()> = BTreeMap::new();
    let mut pairs = Vec::new();
    for b in landmark.bars_of_dim(k) {
        let kk = key(landmark, b.id);
        if seen.insert(kk, ()).is_some() {
            return Err(Error::AssumptionViolated(
                "duplicate bar endpoints on the landmark side".into(),
            ));
        }
        let Some(&other) = by_key.get(&kk) else {
            return Err(Error::InvalidInput(format!(
                "no witness-side bar matches the endpoints of bar {}",
                b.id
            )));
        };
        pairs.push((b.id, other));
    }
    if pairs.len() != witness.bars_of_dim(k).count() {
        return Err(Error::InvalidInput(
            "witness side has unmatched bars".into(),
        ));
    }
    Ok(pairs)
}

/// A chain-level duality certificate: `∂ certificate = input − dual`
/// inside the cross complex at `eps`.
#[derive(Debug, Clone)]
pub struct DowkerDualResult {
    pub eps: f64,
    /// The input cycle, landmark-side vertex ids.
    pub input: Chain,
    /// The dual cycle relabeled to witness-side ids starting at 0.
    pub dual: Chain,
    /// The dual cycle in cross-complex ids (witness vertices offset by
    /// the landmark count).
    pub dual_cross: Chain,
    /// The (k+1)-chain in the cross complex bounding input − dual.
    pub certificate: Chain,
}

fn plain_boundary(s: &Simplex, field: &FieldSpec) -> Chain {
    Chain::from_terms(
        s.facets()
            .into_iter()
            .enumerate()
            .map(|(i, f)| (f, if i % 2 == 0 { 1 } else { field.neg(1) })),
        field,
    )
}

/// Computes a witness-side cycle homologous to the landmark-side cycle
/// `z` under the Dowker isomorphism at parameter `eps`, together with a
/// chain certifying it.
pub fn dowker_dual_cycle(
    b: &CrossDissimilarityMatrix,
    eps: f64,
    z: &Chain,
    k: usize,
    field: FieldSpec,
) -> Result<DowkerDualResult> {
    let cc = cross_complex_at(b, eps, k + 1)?;
    let n = cc.landmark_count;
    let complex = &cc.complex;
    // Index every simplex of the cross complex for the row space.
    let index_of: BTreeMap<Simplex, usize> = complex
        .simplices()
        .enumerate()
        .map(|(i, (s, _))| (s.clone(), i))
        .collect();
    let chain_to_vec = |c: &Chain| -> Result<SparseVec> {
        let mut entries = Vec::new();
        for (s, v) in c.iter() {
            let Some(&i) = index_of.get(s) else {
                return Err(Error::InvalidInput(format!(
                    "simplex {:?} is not in the cross complex at eps = {eps}",
                    s.vertices()
                )));
            };
            entries.push((i, v));
        }
        Ok(SparseVec::from_entries(entries, &field))
    };
    if z.dim()? != Some(k) && !z.is_zero() {
        return Err(Error::InvalidInput(format!("input chain is not of degree {k}")));
    }
    for (s, _) in z.iter() {
        if s.vertices().iter().any(|&v| v as usize >= n) {
            return Err(Error::InvalidInput(
                "input chain must live on the landmark side".into(),
            ));
        }
    }
    let mut bz = Chain::zero();
    for (s, c) in z.iter() {
        bz = bz.add_scaled(c, &plain_boundary(s, &field), &field);
    }
    if !bz.is_zero() {
        return Err(Error::InvalidInput("input chain is not a cycle".into()));
    }

    // Unknowns: coefficients of every (k+1)-simplex (the certificate),
    // then of every pure-witness k-simplex (the dual). ∂c + y = z.
    let cofaces: Vec<&Simplex> = complex.simplices_of_dim(k + 1).map(|(s, _)| s).collect();
    let witness_faces: Vec<&Simplex> = complex
        .simplices_of_dim(k)
        .map(|(s, _)| s)
        .filter(|s| s.vertices().iter().all(|&v| v as usize >= n))
        .collect();
    let mut columns = Vec::with_capacity(cofaces.len() + witness_faces.len());
    for s in &cofaces {
        columns.push(chain_to_vec(&plain_boundary(s, &field))?);
    }
    for s in &witness_faces {
        columns.push(SparseVec::unit(index_of[*s]));
    }
    let a = SparseMatrix::from_columns(index_of.len(), columns)?;
    let rhs = chain_to_vec(z)?;
    let sol = solve(&a, &rhs, &field)?.ok_or_else(|| {
        Error::AssumptionViolated(format!(
            "no dual exists at eps = {eps} within the dimension cap; increase max_dim"
        ))
    })?;
    let mut certificate = Chain::zero();
    let mut dual_cross = Chain::zero();
    for (i, c) in sol.particular.iter() {
        if i < cofaces.len() {
            certificate = certificate.add_scaled(
                c,
                &Chain::from_terms([(cofaces[i].clone(), 1)], &field),
                &field,
            );
        } else {
            dual_cross = dual_cross.add_scaled(
                c,
                &Chain::from_terms([(witness_faces[i - cofaces.len()].clone(), 1)], &field),
                &field,
            );
        }
    }
    // ∂c = z − y by construction; verify exactly.
    let mut check = Chain::zero();
    for (s, c) in certificate.iter() {
        check = check.add_scaled(c, &plain_boundary(s, &field), &field);
    }
    let want = z.add_scaled(field.neg(1), &dual_cross, &field);
    if check != want {
        return Err(Error::InvalidInput("duality certificate failed to verify".into()));
    }
    let dual = Chain::from_terms(
        dual_cross.iter().map(|(s, c)| {
            let verts: Vec<u32> = s.vertices().iter().map(|&v| v - n as u32).collect();
            (Simplex::new(verts).expect("sorted"), c)
        }),
        &field,
    );
    Ok(DowkerDualResult {
        eps,
        input: z.clone(),
        dual,
        dual_cross,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn hex() -> CrossDissimilarityMatrix {
        CrossDissimilarityMatrix::new(3, 3, vec![0.0, 1.0, 9.0, 9.0, 0.0, 1.0, 1.0, 9.0, 0.0])
            .unwrap()
    }

    #[test]
    fn hex_barcodes_agree() {
        let chk = dowker_barcode_check(&hex(), 1, FieldSpec::GF2).unwrap();
        assert!(chk.equal);
        let bars: Vec<_> = chk.landmark.bars_of_dim(1).collect();
        assert_eq!(bars.len(), 1);
        assert_eq!(chk.landmark.scale().value(bars[0].birth), Some(1.0));
        assert_eq!(chk.landmark.scale().value(bars[0].death), Some(9.0));
    }

    #[test]
    fn symmetric_relation_is_trivially_equal() {
        let b = CrossDissimilarityMatrix::new(2, 2, vec![0.0, 3.0, 3.0, 0.0]).unwrap();
        let chk = dowker_barcode_check(&b, 0, FieldSpec::GF2).unwrap();
        assert!(chk.equal);
    }

    #[test]
    fn correspondence_matches_by_endpoints() {
        let chk = dowker_barcode_check(&hex(), 1, FieldSpec::GF2).unwrap();
        let pairs = dowker_bar_correspondence(&chk.landmark, &chk.witness, 1).unwrap();
        assert_eq!(pairs.len(), 1);
        // Empty barcodes give an empty bijection.
        let b = CrossDissimilarityMatrix::new(1, 1, vec![0.0]).unwrap();
        let chk = dowker_barcode_check(&b, 1, FieldSpec::GF2).unwrap();
        assert!(dowker_bar_correspondence(&chk.landmark, &chk.witness, 1)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn correspondence_rejects_ambiguity() {
        // Two identical independent relations produce duplicate bars.
        let b = CrossDissimilarityMatrix::new(
            6,
            6,
            vec![
                0.0, 1.0, 9.0, 9.0, 9.0, 9.0, //
                9.0, 0.0, 1.0, 9.0, 9.0, 9.0, //
                1.0, 9.0, 0.0, 9.0, 9.0, 9.0, //
                9.0, 9.0, 9.0, 0.0, 1.0, 9.0, //
                9.0, 9.0, 9.0, 9.0, 0.0, 1.0, //
                9.0, 9.0, 9.0, 1.0, 9.0, 0.0,
            ],
        )
        .unwrap();
        let chk = dowker_barcode_check(&b, 1, FieldSpec::GF2).unwrap();
        assert!(chk.equal);
        assert!(matches!(
            dowker_bar_correspondence(&chk.landmark, &chk.witness, 1),
            Err(Error::AssumptionViolated(_))
        ));
    }

    fn triangle_boundary(f: &FieldSpec) -> Chain {
        plain_boundary(&Simplex::new(vec![0, 1, 2]).unwrap(), f)
    }

    #[test]
    fn hex_dual_cycle() {
        let f = FieldSpec::GF2;
        let z = triangle_boundary(&f);
        let res = dowker_dual_cycle(&hex(), 1.0, &z, 1, f).unwrap();
        // Dual is a nontrivial cycle on the witness side.
        let chk = dowker_barcode_check(&hex(), 1, f).unwrap();
        let g = chk.witness.scale().grade_of_value(1.0).unwrap();
        let br = chk.witness.bar_representation(&res.dual, g).unwrap();
        assert!(!br.is_empty());
        // Dual of the dual lands back in the class of z.
        let back = dowker_dual_cycle(&hex().transpose(), 1.0, &res.dual, 1, f).unwrap();
        let gp = chk.landmark.scale().grade_of_value(1.0).unwrap();
        assert_eq!(
            chk.landmark.bar_representation(&back.dual, gp).unwrap(),
            chk.landmark.bar_representation(&z, gp).unwrap()
        );
    }

    #[test]
    fn dual_over_gf3_certifies() {
        let f = FieldSpec::new(3).unwrap();
        let z = triangle_boundary(&f);
        let res = dowker_dual_cycle(&hex(), 1.0, &z, 1, f).unwrap();
        assert!(!res.dual.is_zero());
        // The certificate identity is verified inside the call; sanity
        // check the chain degrees here.
        assert_eq!(res.certificate.dim().unwrap(), Some(2));
        assert_eq!(res.dual.dim().unwrap(), Some(1));
    }

    #[test]
    fn bounding_input_gets_bounding_dual() {
        // A single witness sees all landmarks: the triangle fills, so
        // its boundary bounds at eps = 0.
        let b = CrossDissimilarityMatrix::new(3, 1, vec![0.0, 0.0, 0.0]).unwrap();
        let f = FieldSpec::GF2;
        let z = triangle_boundary(&f);
        let res = dowker_dual_cycle(&b, 0.0, &z, 1, f).unwrap();
        // Witness side has one vertex and no 1-simplices, so the dual
        // must be zero.
        assert!(res.dual.is_zero());
    }

    #[test]
    fn invalid_inputs_rejected() {
        let f = FieldSpec::GF2;
        // Not a cycle.
        let e = Chain::from_terms([(Simplex::new(vec![0, 1]).unwrap(), 1)], &f);
        assert!(dowker_dual_cycle(&hex(), 1.0, &e, 1, f).is_err());
        // Simplex missing at this eps.
        let z = triangle_boundary(&f);
        assert!(dowker_dual_cycle(&hex(), 0.5, &z, 1, f).is_err());
    }
}
