use crate::linalg::{projector_from_basis, range_basis, CMatrix, DEFAULT_TOL};
use crate::states::PureStateFamily;

/// Overlap above which two family members are joined in one block.
pub const OND_EDGE_TOL: f64 = 1e-8;
/// Overlaps in `(OND_WARN_TOL, edge tol]` are reported as ambiguous.
pub const OND_WARN_TOL: f64 = 1e-10;

/// Decomposition of a pure-state family into orthogonally
/// non-decomposable blocks.
#[derive(Debug, Clone)]
pub struct OndDecomposition {
    /// Member indices of each block, ordered by their smallest index.
    pub components: Vec<Vec<usize>>,
    pub projectors: Vec<CMatrix>,
    /// Orthonormal columns spanning each block.
    pub bases: Vec<CMatrix>,
    /// Pairs `(i, j, |<φ_i|φ_j>|)` whose overlap is close to the edge threshold.
    pub ambiguous_pairs: Vec<(usize, usize, f64)>,
}

impl OndDecomposition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Block index of every member.
    pub fn labels(&self) -> Vec<usize> {
        let n = self.components.iter().map(|c| c.len()).sum();
        let mut labels = vec![0; n];
        for (k, comp) in self.components.iter().enumerate() {
            for &i in comp {
                labels[i] = k;
            }
        }
        labels
    }

    /// Orthonormal basis adapted to the blocks (block bases side by side).
    pub fn adapted_basis(&self) -> CMatrix {
        let rows = self.bases.first().map(|b| b.nrows()).unwrap_or(0);
        let cols: usize = self.bases.iter().map(|b| b.ncols()).sum();
        let mut out = CMatrix::zeros(rows, cols);
        let mut at = 0;
        for b in &self.bases {
            out.columns_mut(at, b.ncols()).copy_from(b);
            at += b.ncols();
        }
        out
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Connected components of the graph joining members with
/// `|<φ_i|φ_j>| > tol`, with the projector onto each block's span.
pub fn ond_decompose(family: &PureStateFamily, tol: f64) -> OndDecomposition {
    let vectors = family.vectors();
    let n = vectors.len();
    let mut sets = DisjointSets::new(n);
    let mut ambiguous_pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let overlap = vectors[i].dotc(&vectors[j]).norm();
            if overlap > tol {
                sets.union(i, j);
            } else if overlap > OND_WARN_TOL {
                ambiguous_pairs.push((i, j, overlap));
            }
        }
    }
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut root_to_block = vec![usize::MAX; n];
    for i in 0..n {
        let root = sets.find(i);
        if root_to_block[root] == usize::MAX {
            root_to_block[root] = components.len();
            components.push(Vec::new());
        }
        components[root_to_block[root]].push(i);
    }
    let bases: Vec<CMatrix> = components
        .iter()
        .map(|comp| {
            let mut stacked = CMatrix::zeros(family.dim(), comp.len());
            for (col, &i) in comp.iter().enumerate() {
                stacked.set_column(col, &vectors[i]);
            }
            range_basis(&stacked, DEFAULT_TOL)
        })
        .collect();
    OndDecomposition {
        projectors: bases.iter().map(projector_from_basis).collect(),
        components,
        bases,
        ambiguous_pairs,
    }
}
