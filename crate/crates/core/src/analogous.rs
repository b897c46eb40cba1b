//! The two top-level pipelines relating features of two point clouds
//! through their cross-dissimilarity: feature-centric (start from a bar
//! of one clique complex) and similarity-centric (start from a bar of
//! the witness complex).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::complex::{
    clique_complex_with, witness_complex, CrossDissimilarityMatrix, DissimilarityMatrix,
    GradedComplex, TieBreak,
};
use crate::dowker::{dowker_bar_correspondence, dowker_dual_cycle, DowkerDualResult};
use crate::extension::{
    attach_bar_representations, bar_to_bars, bar_to_cycle, cycle_to_cycles, BarMode,
    BarExtensionOutput, ExtensionResult,
};
use crate::field::FieldSpec;
use crate::persistence::{compute_persistence, Bar, BarId, PersistenceResult};
use crate::{Error, Result};

/// Everything both pipelines need: the four complexes of the triple
/// (M_Q, M_P, M_QP) and their persistence.
#[derive(Debug, Clone)]
pub struct AnalogousContext {
    pub k: usize,
    pub field: FieldSpec,
    pub m_qp: CrossDissimilarityMatrix,
    pub x_q: GradedComplex,
    pub x_p: GradedComplex,
    pub w_qp: GradedComplex,
    pub w_pq: GradedComplex,
    pub x_q_res: PersistenceResult,
    pub x_p_res: PersistenceResult,
    pub w_qp_res: PersistenceResult,
    pub w_pq_res: PersistenceResult,
}

/// Builds complexes and persistence for the triple. `m_qp` has one row
/// per point of Q and one column per point of P.
pub fn build_context(
    m_q: &DissimilarityMatrix,
    m_p: &DissimilarityMatrix,
    m_qp: &CrossDissimilarityMatrix,
    k: usize,
    field: FieldSpec,
    tie: TieBreak,
) -> Result<AnalogousContext> {
    if m_qp.rows() != m_q.size() || m_qp.cols() != m_p.size() {
        return Err(Error::InvalidInput(format!(
            "cross matrix is {}x{} but |Q| = {} and |P| = {}",
            m_qp.rows(),
            m_qp.cols(),
            m_q.size(),
            m_p.size()
        )));
    }
    let max_dim = k + 1;
    let x_q = clique_complex_with(m_q, max_dim, tie)?;
    let x_p = clique_complex_with(m_p, max_dim, tie)?;
    let w_qp = witness_complex(m_qp, max_dim)?;
    let w_pq = witness_complex(&m_qp.transpose(), max_dim)?;
    let x_q_res = compute_persistence(&x_q, k, field)?;
    let x_p_res = compute_persistence(&x_p, k, field)?;
    let w_qp_res = compute_persistence(&w_qp, k, field)?;
    let w_pq_res = compute_persistence(&w_pq, k, field)?;
    Ok(AnalogousContext {
        k,
        field,
        m_qp: m_qp.clone(),
        x_q,
        x_p,
        w_qp,
        w_pq,
        x_q_res,
        x_p_res,
        w_qp_res,
        w_pq_res,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Feature,
    Similarity,
}

/// One dual cycle of the feature pipeline and the extension of its
/// class into the other clique complex.
#[derive(Debug, Clone)]
pub struct FeatureLeg {
    /// Grade of the witness-side member cycle the dual came from.
    pub source_grade: usize,
    pub dual: DowkerDualResult,
    /// Parameter at which the dual class was extended.
    pub psi: usize,
    pub extension: ExtensionResult,
}

#[derive(Debug, Clone)]
pub struct AnalogousBarsResult {
    pub mode: Mode,
    pub k: usize,
    /// The selected input bar.
    pub bar: Bar,
    /// Feature mode: one leg per distinct dual class.
    pub legs: Vec<FeatureLeg>,
    /// Similarity mode: extension of the witness bar into X_Q.
    pub q_side: Option<BarExtensionOutput>,
    /// Similarity mode: the corresponding bar and its extension into
    /// X_P.
    pub p_side: Option<(BarId, BarExtensionOutput)>,
    /// Human-readable notes, in particular why a result is empty.
    pub diagnostics: Vec<String>,
    pub truncated: bool,
}

/// The feature-centric pipeline: extend a clique bar of Q into the
/// witness complex, carry each resulting cycle across the relation, and
/// extend the duals into the clique complex of P.
pub fn feature_centric(
    ctx: &AnalogousContext,
    tau: BarId,
    cap: usize,
) -> Result<AnalogousBarsResult> {
    let bar = *ctx.x_q_res.bar(tau);
    if bar.dim != ctx.k {
        return Err(Error::InvalidInput(format!(
            "bar {tau} has degree {}, expected {}",
            bar.dim, ctx.k
        )));
    }
    let field = ctx.field;
    let mut diagnostics = Vec::new();
    let step1 = bar_to_cycle(&ctx.x_q, &ctx.w_qp, &ctx.x_q_res, tau, None, cap)?;
    let mut truncated = step1.truncated;
    let n_w = ctx.w_qp_res.scale().len();
    let mut seen: BTreeSet<(usize, Vec<(u64, BarId)>)> = BTreeSet::new();
    let mut legs = Vec::new();
    let mut budget = cap;
    'outer: for class_res in &step1.per_class {
        diagnostics.push(format!(
            "witness-side extension: ell0 = {}, p_Y = {:?}",
            class_res.ell0, class_res.p_y
        ));
        for g in &class_res.grades {
            let l = g.extension.at;
            // Classes of members follow by linearity from the baseline
            // and offset representations, so the witness class of each
            // member costs a coefficient merge, not a solve. Only
            // distinct classes are dualized.
            let base_rep = ctx.w_qp_res.bar_representation(&g.extension.baseline, l)?;
            let offset_reps = g
                .extension
                .offsets
                .iter()
                .map(|o| ctx.w_qp_res.bar_representation(o, l))
                .collect::<Result<Vec<_>>>()?;
            let mut seen_srep: BTreeSet<Vec<(u64, BarId)>> = BTreeSet::new();
            let p = field.characteristic();
            let total = (p as u128)
                .checked_pow(g.extension.offsets.len() as u32)
                .unwrap_or(u128::MAX);
            for idx in 0..total {
                if budget == 0 {
                    truncated = true;
                    break 'outer;
                }
                budget -= 1;
                let coeffs: Vec<u64> = {
                    let mut rest = idx;
                    (0..g.extension.offsets.len())
                        .map(|_| {
                            let c = (rest % p as u128) as u64;
                            rest /= p as u128;
                            c
                        })
                        .collect()
                };
                let mut acc: BTreeMap<BarId, u64> =
                    base_rep.terms.iter().map(|&(c, id)| (id, c)).collect();
                for (off, &c) in offset_reps.iter().zip(&coeffs) {
                    if c != 0 {
                        for &(oc, id) in &off.terms {
                            let e = acc.entry(id).or_insert(0);
                            *e = field.add(*e, field.mul(c, oc));
                        }
                    }
                }
                let srep_terms: Vec<(u64, BarId)> = acc
                    .into_iter()
                    .filter(|&(_, c)| c != 0)
                    .map(|(id, c)| (c, id))
                    .collect();
                if srep_terms.is_empty() {
                    diagnostics.push(format!("a member at grade {l} bounds in the witness complex"));
                    continue;
                }
                if !seen_srep.insert(srep_terms.clone()) {
                    continue;
                }
                let mut x_q = g.extension.baseline.clone();
                for (off, &c) in g.extension.offsets.iter().zip(&coeffs) {
                    if c != 0 {
                        x_q = x_q.add_scaled(c, off, &field);
                    }
                }
                let death = srep_terms
                    .iter()
                    .map(|&(_, id)| ctx.w_qp_res.bar(id).death)
                    .max()
                    .unwrap();
                let terminal = (death - 1).min(n_w);
                let eps = ctx.w_qp_res.scale().value(terminal).unwrap();
                let dual = dowker_dual_cycle(&ctx.m_qp, eps, &x_q, ctx.k, field)?;
                if dual.dual.is_zero() {
                    diagnostics.push(format!("dual of a member at grade {l} is zero"));
                    continue;
                }
                let drep = ctx.w_pq_res.bar_representation(&dual.dual, terminal)?;
                if drep.is_empty() {
                    diagnostics.push(format!("dual of a member at grade {l} bounds"));
                    continue;
                }
                if !seen.insert((terminal, drep.terms.clone())) {
                    continue;
                }
                let (_, dual_death) = ctx.w_pq_res.class_birth_death(&drep)?;
                let psi = (dual_death - 1).min(ctx.w_pq_res.scale().len());
                let mut ext = cycle_to_cycles(&ctx.w_pq, &ctx.x_p, psi, &dual.dual, ctx.k, field)?;
                attach_bar_representations(&mut ext, &ctx.x_p_res)?;
                legs.push(FeatureLeg {
                    source_grade: l,
                    dual,
                    psi,
                    extension: ext,
                });
            }
        }
    }
    if legs.is_empty() {
        diagnostics.push("no analogous bars: every carried class trivializes".into());
    }
    Ok(AnalogousBarsResult {
        mode: Mode::Feature,
        k: ctx.k,
        bar,
        legs,
        q_side: None,
        p_side: None,
        diagnostics,
        truncated,
    })
}

/// The similarity-centric pipeline: identify the selected witness bar
/// with its counterpart on the other side, then extend both into their
/// clique complexes.
pub fn similarity_centric(
    ctx: &AnalogousContext,
    tau: BarId,
    cap: usize,
) -> Result<AnalogousBarsResult> {
    let bar = *ctx.w_qp_res.bar(tau);
    if bar.dim != ctx.k {
        return Err(Error::InvalidInput(format!(
            "bar {tau} has degree {}, expected {}",
            bar.dim, ctx.k
        )));
    }
    let pairs = dowker_bar_correspondence(&ctx.w_qp_res, &ctx.w_pq_res, ctx.k)?;
    let tau_p = pairs
        .iter()
        .find(|&&(q, _)| q == tau)
        .map(|&(_, p)| p)
        .ok_or_else(|| Error::InvalidInput(format!("bar {tau} has no counterpart")))?;
    let q_side = bar_to_bars(
        &ctx.w_qp,
        &ctx.x_q,
        &ctx.w_qp_res,
        tau,
        BarMode::General,
        None,
        cap,
    )?;
    let p_side = bar_to_bars(
        &ctx.w_pq,
        &ctx.x_p,
        &ctx.w_pq_res,
        tau_p,
        BarMode::General,
        None,
        cap,
    )?;
    let truncated = q_side.truncated || p_side.truncated;
    let mut diagnostics = Vec::new();
    let empty = q_side
        .per_class
        .iter()
        .chain(&p_side.per_class)
        .all(|r| {
            r.grades.iter().all(|g| {
                g.bars
                    .as_ref()
                    .map(|b| b.baseline.is_empty() && b.offsets.iter().all(|o| o.is_empty()))
                    .unwrap_or(true)
            })
        });
    if empty {
        diagnostics.push("no analogous bars: both extensions are trivial".into());
    }
    Ok(AnalogousBarsResult {
        mode: Mode::Similarity,
        k: ctx.k,
        bar,
        legs: Vec::new(),
        q_side: Some(q_side),
        p_side: Some((tau_p, p_side)),
        diagnostics,
        truncated,
    })
}
