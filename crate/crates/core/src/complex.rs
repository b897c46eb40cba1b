//! Filtered simplicial complexes: clique (Rips) and witness complexes,
//! the auxiliary intersection filtration, and the fixed-parameter cross
//! complex that joins a landmark set and a witness set in one ambient
//! complex.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A simplex: a nonempty, strictly increasing list of vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Simplex {
    vertices: Vec<u32>,
}

impl Simplex {
    pub fn new(vertices: Vec<u32>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidInput("empty simplex".into()));
        }
        if !vertices.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(format!(
                "vertices not strictly increasing: {vertices:?}"
            )));
        }
        Ok(Simplex { vertices })
    }

    pub fn vertex(v: u32) -> Self {
        Simplex { vertices: vec![v] }
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    /// Codimension-1 faces, in the order obtained by deleting the vertex
    /// at position 0, 1, ... (empty for a vertex).
    pub fn facets(&self) -> Vec<Simplex> {
        if self.dim() == 0 {
            return Vec::new();
        }
        (0..self.vertices.len())
            .map(|i| {
                let mut v = self.vertices.clone();
                v.remove(i);
                Simplex { vertices: v }
            })
            .collect()
    }
}

/// The parameter scale of a filtration: strictly increasing values
/// α_1 < ... < α_N. Grade indices are 1-based; grade N+1 denotes ∞.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterScale {
    values: Vec<f64>,
}

impl ParameterScale {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite scale value".into()));
        }
        if !values.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(
                "scale values not strictly increasing".into(),
            ));
        }
        Ok(ParameterScale { values })
    }

    /// Sorts and deduplicates (exact equality) arbitrary finite values.
    pub fn from_unsorted(values: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut v: Vec<f64> = values.into_iter().collect();
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite scale value".into()));
        }
        v.sort_by(|a, b| a.total_cmp(b));
        v.dedup();
        ParameterScale::new(v)
    }

    /// Number of finite levels N.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Grade index encoding ∞, i.e. N+1.
    pub fn infinity_grade(&self) -> usize {
        self.values.len() + 1
    }

    /// Value at a 1-based grade index; `None` for the ∞ grade.
    pub fn value(&self, grade: usize) -> Option<f64> {
        if grade >= 1 && grade <= self.values.len() {
            Some(self.values[grade - 1])
        } else {
            None
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// 1-based grade index of an exact member value.
    pub fn grade_of_value(&self, v: f64) -> Option<usize> {
        self.values
            .binary_search_by(|x| x.total_cmp(&v))
            .ok()
            .map(|i| i + 1)
    }
}

/// A filtered simplicial complex: each simplex carries the 1-based grade
/// index at which it enters the filtration.
#[derive(Debug, Clone)]
pub struct GradedComplex {
    scale: ParameterScale,
    max_dim: usize,
    grades: BTreeMap<Simplex, usize>,
}

impl GradedComplex {
    pub fn new(
        scale: ParameterScale,
        max_dim: usize,
        grades: BTreeMap<Simplex, usize>,
    ) -> Result<Self> {
        let n = scale.len();
        for (s, &g) in &grades {
            if g < 1 || g > n {
                return Err(Error::InvalidInput(format!(
                    "grade {g} of simplex {:?} outside 1..={n}",
                    s.vertices()
                )));
            }
            if s.dim() > max_dim {
                return Err(Error::InvalidInput(format!(
                    "simplex {:?} exceeds max_dim {max_dim}",
                    s.vertices()
                )));
            }
        }
        let c = GradedComplex {
            scale,
            max_dim,
            grades,
        };
        c.check_face_closure()?;
        Ok(c)
    }

    fn check_face_closure(&self) -> Result<()> {
        for (s, &g) in &self.grades {
            for f in s.facets() {
                match self.grades.get(&f) {
                    Some(&fg) if fg <= g => {}
                    Some(_) => {
                        return Err(Error::InvalidInput(format!(
                            "face {:?} enters after coface {:?}",
                            f.vertices(),
                            s.vertices()
                        )))
                    }
                    None => {
                        return Err(Error::InvalidInput(format!(
                            "missing face {:?} of {:?}",
                            f.vertices(),
                            s.vertices()
                        )))
                    }
                }
            }
        }
        Ok(())
    }

    pub fn scale(&self) -> &ParameterScale {
        &self.scale
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn len(&self) -> usize {
        self.grades.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grades.is_empty()
    }

    pub fn grade_of(&self, s: &Simplex) -> Option<usize> {
        self.grades.get(s).copied()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.grades.contains_key(s)
    }

    /// All simplices with their grades, in lexicographic simplex order.
    pub fn simplices(&self) -> impl Iterator<Item = (&Simplex, usize)> {
        self.grades.iter().map(|(s, &g)| (s, g))
    }

    /// Simplices of one dimension, lexicographic order.
    pub fn simplices_of_dim(&self, dim: usize) -> impl Iterator<Item = (&Simplex, usize)> {
        self.simplices().filter(move |(s, _)| s.dim() == dim)
    }

    pub fn vertex_set(&self) -> Vec<u32> {
        self.simplices_of_dim(0)
            .map(|(s, _)| s.vertices()[0])
            .collect()
    }
}

/// How to handle duplicate off-diagonal dissimilarity values in the
/// clique construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Equal values share one filtration level.
    #[default]
    Collapse,
    /// Duplicate values are rejected.
    Error,
    /// Duplicates are nudged apart deterministically, ordered by their
    /// row-major upper-triangle position, so every entry gets its own
    /// level.
    Jitter,
}

/// A square symmetric dissimilarity matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DissimilarityMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::InvalidInput(format!("nonzero diagonal at ({i},{i})")));
            }
            for j in 0..n {
                let v = data[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "entry ({i},{j}) = {v} is not finite and non-negative"
                    )));
                }
                if v != data[j * n + i] {
                    return Err(Error::InvalidInput(format!(
                        "asymmetric at ({i},{j}): {v} vs {}",
                        data[j * n + i]
                    )));
                }
            }
        }
        Ok(DissimilarityMatrix { n, data })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

/// A rectangular non-negative dissimilarity between a landmark set
/// (rows) and a witness set (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct CrossDissimilarityMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CrossDissimilarityMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidInput(format!(
                "entry {v} is not finite and non-negative"
            )));
        }
        Ok(CrossDissimilarityMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn transpose(&self) -> CrossDissimilarityMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c));
            }
        }
        CrossDissimilarityMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }
}

fn next_up(x: f64) -> f64 {
    debug_assert!(x.is_finite() && x >= 0.0);
    f64::from_bits(x.to_bits() + 1)
}

/// Per-pair effective values after tie-breaking, keyed by (i, j) with
/// i < j.
fn tie_broken_pairs(m: &DissimilarityMatrix, tie: TieBreak) -> Result<BTreeMap<(usize, usize), f64>> {
    let n = m.size();
    let mut pairs: Vec<((usize, usize), f64)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push(((i, j), m.get(i, j)));
        }
    }
    match tie {
        TieBreak::Collapse => {}
        TieBreak::Error => {
            let mut vals: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            vals.sort_by(|a, b| a.total_cmp(b));
            if let Some(w) = vals.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::AssumptionViolated(format!(
                    "duplicate dissimilarity value {}",
                    w[0]
                )));
            }
        }
        TieBreak::Jitter => {
            // Sort by (value, position) and walk upward, bumping each
            // duplicate to the next representable float above its
            // predecessor. Keeps the original order, makes all values
            // distinct, and perturbs by at most a few ulps.
            let mut order: Vec<usize> = (0..pairs.len()).collect();
            order.sort_by(|&a, &b| pairs[a].1.total_cmp(&pairs[b].1).then(a.cmp(&b)));
            let mut prev: Option<f64> = None;
            for &idx in &order {
                let mut v = pairs[idx].1;
                if let Some(p) = prev {
                    if v <= p {
                        v = next_up(p);
                    }
                }
                pairs[idx].1 = v;
                prev = Some(v);
            }
        }
    }
    Ok(pairs.into_iter().collect())
}

/// Builds the filtered clique complex of a dissimilarity matrix: a
/// simplex enters at the maximum pairwise dissimilarity of its vertices,
/// and all vertices are present from the first level.
pub fn clique_complex(m: &DissimilarityMatrix, max_dim: usize) -> Result<GradedComplex> {
    clique_complex_with(m, max_dim, TieBreak::Collapse)
}

pub fn clique_complex_with(
    m: &DissimilarityMatrix,
    max_dim: usize,
    tie: TieBreak,
) -> Result<GradedComplex> {
    let n = m.size();
    let pairs = tie_broken_pairs(m, tie)?;
    let scale = if pairs.is_empty() {
        ParameterScale::new(vec![0.0])?
    } else {
        ParameterScale::from_unsorted(pairs.values().copied())?
    };

    let mut grades: BTreeMap<Simplex, usize> = BTreeMap::new();
    // Depth-first extension over increasing vertex ids, carrying the
    // running maximum pairwise value.
    let mut stack: Vec<(Vec<u32>, f64)> = (0..n as u32).map(|v| (vec![v], 0.0)).collect();
    while let Some((verts, val)) = stack.pop() {
        let grade = if verts.len() == 1 {
            1
        } else {
            scale.grade_of_value(val).expect("value on scale")
        };
        if verts.len() <= max_dim {
            for w in (*verts.last().unwrap() + 1)..n as u32 {
                let mut v2 = val;
                for &u in &verts {
                    let pv = pairs[&(u as usize, w as usize)];
                    if pv > v2 {
                        v2 = pv;
                    }
                }
                let mut nv = verts.clone();
                nv.push(w);
                stack.push((nv, v2));
            }
        }
        grades.insert(Simplex { vertices: verts }, grade);
    }
    GradedComplex::new(scale, max_dim, grades)
}

/// Builds the filtered witness complex of a landmark/witness relation: a
/// landmark simplex σ enters at min over witnesses c of max over r ∈ σ
/// of B[r,c]. The rule applies to vertices too: a landmark enters when
/// first witnessed.
pub fn witness_complex(b: &CrossDissimilarityMatrix, max_dim: usize) -> Result<GradedComplex> {
    let n = b.rows();
    let m = b.cols();
    if m == 0 {
        return Err(Error::InvalidInput("witness complex needs at least one witness".into()));
    }
    let scale = ParameterScale::from_unsorted((0..n).flat_map(|r| (0..m).map(move |c| (r, c))).map(|(r, c)| b.get(r, c)))?;

    let mut grades: BTreeMap<Simplex, usize> = BTreeMap::new();
    // Carry per-column running maxima so extending a simplex is O(m).
    let mut stack: Vec<(Vec<u32>, Vec<f64>)> = (0..n as u32)
        .map(|v| {
            let colmax: Vec<f64> = (0..m).map(|c| b.get(v as usize, c)).collect();
            (vec![v], colmax)
        })
        .collect();
    while let Some((verts, colmax)) = stack.pop() {
        let val = colmax.iter().copied().fold(f64::INFINITY, f64::min);
        let grade = scale.grade_of_value(val).expect("value on scale");
        if verts.len() <= max_dim {
            for w in (*verts.last().unwrap() + 1)..n as u32 {
                let colmax2: Vec<f64> = (0..m)
                    .map(|c| colmax[c].max(b.get(w as usize, c)))
                    .collect();
                let mut nv = verts.clone();
                nv.push(w);
                stack.push((nv, colmax2));
            }
        }
        grades.insert(Simplex { vertices: verts }, grade);
    }
    GradedComplex::new(scale, max_dim, grades)
}

/// The auxiliary filtration: the fixed complex Z^psi filtered by the
/// grades of Y. Every simplex of Z^psi must appear somewhere in Y, and
/// the final level is then all of Z^psi.
pub fn intersection_filtration(
    z: &GradedComplex,
    psi: usize,
    y: &GradedComplex,
) -> Result<GradedComplex> {
    if psi < 1 || psi > z.scale().len() {
        return Err(Error::InvalidInput(format!(
            "psi = {psi} outside 1..={}",
            z.scale().len()
        )));
    }
    if z.vertex_set() != y.vertex_set() {
        return Err(Error::InvalidInput(
            "complexes are over different vertex sets".into(),
        ));
    }
    let max_dim = z.max_dim().min(y.max_dim());
    let mut grades: BTreeMap<Simplex, usize> = BTreeMap::new();
    for (s, g) in z.simplices() {
        if g > psi || s.dim() > max_dim {
            continue;
        }
        match y.grade_of(s) {
            Some(yg) => {
                grades.insert(s.clone(), yg);
            }
            None => {
                return Err(Error::AssumptionViolated(format!(
                    "simplex {:?} of the fixed complex never appears in the ambient filtration",
                    s.vertices()
                )))
            }
        }
    }
    GradedComplex::new(y.scale().clone(), max_dim, grades)
}

/// Which side of a cross complex a vertex id belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexSide {
    Landmark,
    Witness,
}

/// A fixed-parameter complex joining the landmark set P (vertex ids
/// 0..n) and the witness set Q (ids n..n+m). Both one-sided witness
/// complexes at the same parameter embed as the pure-P and pure-Q
/// subcomplexes.
#[derive(Debug, Clone)]
pub struct CrossComplex {
    pub complex: GradedComplex,
    pub landmark_count: usize,
    pub witness_count: usize,
}

impl CrossComplex {
    pub fn side(&self, v: u32) -> VertexSide {
        if (v as usize) < self.landmark_count {
            VertexSide::Landmark
        } else {
            VertexSide::Witness
        }
    }
}

/// Builds the cross complex of a relation at one parameter value: a
/// simplex σ_P ∪ σ_Q is present when every cross pair satisfies
/// B[p,q] ≤ eps, pure-P faces need a common witness, and pure-Q faces a
/// common landmark. Vertices unrelated to the other side are excluded.
pub fn cross_complex_at(
    b: &CrossDissimilarityMatrix,
    eps: f64,
    max_dim: usize,
) -> Result<CrossComplex> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "eps = {eps} is not finite and non-negative"
        )));
    }
    let n = b.rows();
    let m = b.cols();
    let related = |p: usize, q: usize| b.get(p, q) <= eps;
    let mut grades: BTreeMap<Simplex, usize> = BTreeMap::new();
    // Vertex ids: 0..n landmarks, n..n+m witnesses; extending in id
    // order means all landmark vertices precede all witness vertices
    // within a simplex.
    let total = n + m;
    let mut stack: Vec<Vec<u32>> = (0..total as u32).map(|v| vec![v]).collect();
    while let Some(verts) = stack.pop() {
        let split = verts.partition_point(|&v| (v as usize) < n);
        let (sp, sq) = verts.split_at(split);
        let admissible = if sp.is_empty() {
            // Pure witness face: needs a common landmark.
            (0..n).any(|p| sq.iter().all(|&q| related(p, q as usize - n)))
        } else if sq.is_empty() {
            // Pure landmark face: needs a common witness.
            (0..m).any(|q| sp.iter().all(|&p| related(p as usize, q)))
        } else {
            true
        };
        if admissible {
            grades.insert(Simplex { vertices: verts.clone() }, 1);
        }
        // Cross pair feasibility is monotone, so extensions breaking it
        // are pruned here; purity conditions are rechecked at emit.
        if verts.len() <= max_dim {
            for w in (*verts.last().unwrap() + 1)..total as u32 {
                let wq = w as usize;
                if wq >= n && !sp.iter().all(|&p| related(p as usize, wq - n)) {
                    continue;
                }
                let mut nv = verts.clone();
                nv.push(w);
                stack.push(nv);
            }
        }
    }
    let complex = GradedComplex::new(ParameterScale::new(vec![eps.max(0.0)])?, max_dim, grades)?;
    Ok(CrossComplex {
        complex,
        landmark_count: n,
        witness_count: m,
    })
}
