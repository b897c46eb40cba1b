//! Extension methods: carrying a homology class of a fixed complex Z^ψ
//! into a second filtration Y, at the cycle and bar level, with results
//! stored as one baseline plus a set of offsets per grade.

use alloc::vec::Vec;

use crate::complex::{intersection_filtration, GradedComplex};
use crate::decompositions::{
    admissible_pattern, alternate_terminal_classes, terminal_classes_at, AdmissiblePattern,
};
use crate::field::FieldSpec;
use crate::persistence::{compute_persistence, BarId, BarRepresentation, Chain, PersistenceResult};
use crate::{Error, Result};

/// The restrictions of the input class at one grade of the auxiliary
/// filtration: every member of baseline + span(offsets) is a cycle there
/// whose image back in the fixed complex is the input class.
#[derive(Debug, Clone)]
pub struct RestrictionSet {
    pub at: usize,
    pub baseline: Chain,
    pub offsets: Vec<Chain>,
}

/// The cycle extensions at one grade of Y: the restriction chains
/// reinterpreted through the inclusion into Y.
#[derive(Debug, Clone)]
pub struct CycleExtensionSet {
    pub at: usize,
    pub baseline: Chain,
    pub offsets: Vec<Chain>,
}

/// Bar-level description of an extension set at one grade of Y, with
/// the admissible pattern needed to stream alternate representations.
#[derive(Debug, Clone)]
pub struct BarExtension {
    pub baseline: BarRepresentation,
    pub offsets: Vec<BarRepresentation>,
    pub pattern: AdmissiblePattern,
}

#[derive(Debug, Clone)]
pub struct GradeExtension {
    pub restriction: RestrictionSet,
    pub extension: CycleExtensionSet,
    pub bars: Option<BarExtension>,
}

/// Output of the cycle-level extension method for one input class.
#[derive(Debug, Clone)]
pub struct ExtensionResult {
    pub psi: usize,
    /// Smallest grade at which any restriction exists.
    pub ell0: usize,
    /// Sorted grades at which new extension behavior appears.
    pub p_y: Vec<usize>,
    /// One entry per grade of `p_y`, in order.
    pub grades: Vec<GradeExtension>,
    /// Persistence of the auxiliary filtration, kept for diagnostics and
    /// membership queries.
    pub aux: PersistenceResult,
    /// The input class as a chain.
    pub class: Chain,
}

/// Lazily enumerates baseline + span(offsets).
pub fn span_members<'a>(
    baseline: &'a Chain,
    offsets: &'a [Chain],
    field: &'a FieldSpec,
) -> impl Iterator<Item = Chain> + 'a {
    let p = field.characteristic();
    let total = (p as u128)
        .checked_pow(offsets.len() as u32)
        .unwrap_or(u128::MAX);
    (0..total).map(move |mut idx| {
        let mut z = baseline.clone();
        for off in offsets {
            let c = (idx % p as u128) as u64;
            idx /= p as u128;
            if c != 0 {
                z = z.add_scaled(c, off, field);
            }
        }
        z
    })
}

/// The cycle-to-cycles extension method. Builds the auxiliary
/// filtration of `z` at `psi` graded by `y`, and reads all cycle
/// extensions of the class of `tau` out of its barcode.
pub fn cycle_to_cycles(
    z: &GradedComplex,
    y: &GradedComplex,
    psi: usize,
    tau: &Chain,
    k: usize,
    field: FieldSpec,
) -> Result<ExtensionResult> {
    let aux = intersection_filtration(z, psi, y)?;
    let aux_res = compute_persistence(&aux, k, field)?;
    cycle_to_cycles_with_aux(&aux_res, psi, tau)
}

/// Same as `cycle_to_cycles` but over a precomputed auxiliary
/// persistence result, so callers can vary its interval decomposition.
pub fn cycle_to_cycles_with_aux(
    aux_res: &PersistenceResult,
    psi: usize,
    tau: &Chain,
) -> Result<ExtensionResult> {
    let field = *aux_res.field();
    let n = aux_res.scale().len();
    if n == 0 {
        return Err(Error::InvalidInput("empty auxiliary filtration".into()));
    }
    // The top level of the auxiliary filtration is the fixed complex, so
    // expressing the class there both validates it and starts step (2).
    let s = aux_res.bar_representation(tau, n)?;
    if s.is_empty() {
        return Err(Error::TrivialClass);
    }
    let ell0 = s
        .terms
        .iter()
        .map(|&(_, id)| aux_res.bar(id).birth)
        .max()
        .unwrap();
    let inf = aux_res.infinity_grade();
    let dim = tau.dim()?.unwrap();
    let omega_births: Vec<usize> = aux_res
        .bars_of_dim(dim)
        .filter(|b| ell0 < b.birth && b.death < inf)
        .map(|b| b.birth)
        .collect();
    let mut p_y: Vec<usize> = core::iter::once(ell0).chain(omega_births).collect();
    p_y.sort_unstable();
    p_y.dedup();

    let bars_short: Vec<BarId> = aux_res
        .bars_of_dim(dim)
        .filter(|b| ell0 < b.death && b.death < inf)
        .map(|b| b.id)
        .collect();

    let mut grades = Vec::with_capacity(p_y.len());
    for &l in &p_y {
        let mut baseline = Chain::zero();
        for &(c, id) in &s.terms {
            baseline = baseline.add_scaled(c, aux_res.representative(id), &field);
        }
        let offsets: Vec<Chain> = bars_short
            .iter()
            .filter(|&&id| {
                let b = aux_res.bar(id);
                b.birth <= l && l < b.death
            })
            .map(|&id| aux_res.representative(id).clone())
            .collect();
        grades.push(GradeExtension {
            restriction: RestrictionSet {
                at: l,
                baseline: baseline.clone(),
                offsets: offsets.clone(),
            },
            // Simplices of the auxiliary filtration at grade ℓ are
            // simplices of Y^ℓ, so the inclusion pushforward keeps the
            // chains as they are.
            extension: CycleExtensionSet {
                at: l,
                baseline,
                offsets,
            },
            bars: None,
        });
    }
    Ok(ExtensionResult {
        psi,
        ell0,
        p_y,
        grades,
        aux: aux_res.clone(),
        class: tau.clone(),
    })
}

/// Fills in bar-level representations of an extension result against a
/// persistence computation of Y.
pub fn attach_bar_representations(
    res: &mut ExtensionResult,
    y_res: &PersistenceResult,
) -> Result<()> {
    let dim = res.class.dim()?.unwrap();
    for g in &mut res.grades {
        let l = g.extension.at;
        let baseline = y_res.bar_representation(&g.extension.baseline, l)?;
        let mut offsets = Vec::with_capacity(g.extension.offsets.len());
        for off in &g.extension.offsets {
            offsets.push(y_res.bar_representation(off, l)?);
        }
        let alive: Vec<_> = y_res.bars_alive_at(dim, l)?.into_iter().copied().collect();
        let pattern = admissible_pattern(&alive)?;
        g.bars = Some(BarExtension {
            baseline,
            offsets,
            pattern,
        });
    }
    Ok(())
}

/// How bar-level extension enumerates terminal classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BarMode {
    /// Enumerate every terminal class the bar can have.
    General,
    /// GF(2) with pairwise distinct death grades: the terminal class is
    /// unique, so only the stored one is used. Validated.
    F2UniqueDeaths,
}

/// Output of the bar-level extension methods: one cycle-level result
/// per terminal class of the chosen bar.
#[derive(Debug, Clone)]
pub struct BarExtensionOutput {
    pub psi: usize,
    pub per_class: Vec<ExtensionResult>,
    pub truncated: bool,
}

fn terminal_classes_for(
    z_res: &PersistenceResult,
    tau: BarId,
    psi: usize,
    default_psi: usize,
    mode: BarMode,
    cap: usize,
) -> Result<(Vec<Chain>, bool)> {
    match mode {
        BarMode::F2UniqueDeaths => {
            if !z_res.field().is_gf2() {
                return Err(Error::InvalidInput(
                    "the unique-deaths shortcut requires GF(2)".into(),
                ));
            }
            let dim = z_res.bar(tau).dim;
            let bars: Vec<_> = z_res.bars_of_dim(dim).collect();
            let mut clashes = Vec::new();
            for i in 0..bars.len() {
                for j in (i + 1)..bars.len() {
                    if bars[i].death == bars[j].death {
                        clashes.push((bars[i].id, bars[j].id));
                    }
                }
            }
            if !clashes.is_empty() {
                return Err(Error::AssumptionViolated(format!(
                    "bars share death grades: {clashes:?}"
                )));
            }
            Ok((alloc::vec![z_res.representative(tau).clone()], false))
        }
        BarMode::General => {
            if psi == default_psi {
                let (_, classes) = alternate_terminal_classes(z_res, tau)?;
                Ok((classes, false))
            } else {
                terminal_classes_at(z_res, tau, psi, cap)
            }
        }
    }
}

use alloc::format;

/// The bar-to-bars extension method: for each terminal class of `tau`,
/// run the cycle-level extension and describe the outputs as bar
/// representations in Y, with alternate representations reachable
/// through each grade's admissible pattern.
pub fn bar_to_bars(
    z: &GradedComplex,
    y: &GradedComplex,
    z_res: &PersistenceResult,
    tau: BarId,
    mode: BarMode,
    psi_override: Option<usize>,
    cap: usize,
) -> Result<BarExtensionOutput> {
    let mut out = bar_to_cycle_inner(z, y, z_res, tau, mode, psi_override, cap)?;
    let dim = z_res.bar(tau).dim;
    let y_res = compute_persistence(y, dim, *z_res.field())?;
    for res in &mut out.per_class {
        attach_bar_representations(res, &y_res)?;
    }
    Ok(out)
}

/// The bar-to-cycle extension method: bar-to-bars without the final bar
/// representation step.
pub fn bar_to_cycle(
    z: &GradedComplex,
    y: &GradedComplex,
    z_res: &PersistenceResult,
    tau: BarId,
    psi_override: Option<usize>,
    cap: usize,
) -> Result<BarExtensionOutput> {
    bar_to_cycle_inner(z, y, z_res, tau, BarMode::General, psi_override, cap)
}

fn bar_to_cycle_inner(
    z: &GradedComplex,
    y: &GradedComplex,
    z_res: &PersistenceResult,
    tau: BarId,
    mode: BarMode,
    psi_override: Option<usize>,
    cap: usize,
) -> Result<BarExtensionOutput> {
    let bar = *z_res.bar(tau);
    let (default_psi, _) = z_res.terminal_class(tau);
    let psi = psi_override.unwrap_or(default_psi);
    if !(bar.birth <= psi && psi < bar.death) {
        return Err(Error::InvalidInput(format!(
            "psi = {psi} outside the bar's lifetime [{}, {})",
            bar.birth, bar.death
        )));
    }
    let (classes, truncated) = terminal_classes_for(z_res, tau, psi, default_psi, mode, cap)?;
    let aux = intersection_filtration(z, psi, y)?;
    let aux_res = compute_persistence(&aux, bar.dim, *z_res.field())?;
    let mut per_class = Vec::with_capacity(classes.len());
    for class in &classes {
        per_class.push(cycle_to_cycles_with_aux(&aux_res, psi, class)?);
    }
    Ok(BarExtensionOutput {
        psi,
        per_class,
        truncated,
    })
}

/// The cycle-to-bar extension method: cycle-to-cycles followed by bar
/// representation of every output in Y.
pub fn cycle_to_bar(
    z: &GradedComplex,
    y: &GradedComplex,
    psi: usize,
    tau: &Chain,
    k: usize,
    field: FieldSpec,
) -> Result<ExtensionResult> {
    let mut res = cycle_to_cycles(z, y, psi, tau, k, field)?;
    let y_res = compute_persistence(y, k, field)?;
    attach_bar_representations(&mut res, &y_res)?;
    Ok(res)
}
