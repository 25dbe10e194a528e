use crate::linalg::{CMat, C64};

/// Sparse symmetric real matrix stored as a full list of `(row, col, value)`
/// entries (both triangles present).
pub(crate) type Sparse = Vec<(usize, usize, f64)>;

/// One real symmetric LMI block `F0 + Σ_i y_i F_i ⪰ 0`.
#[derive(Clone, Debug)]
pub struct RealBlock {
    pub(crate) dim: usize,
    pub(crate) constant: Sparse,
    pub(crate) terms: Vec<(usize, Sparse)>,
}

/// `maximize bᵀy` subject to real symmetric LMI blocks.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub(crate) n_vars: usize,
    pub(crate) objective: Vec<f64>,
    pub(crate) blocks: Vec<RealBlock>,
}

impl SdpProblem {
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.dim).collect()
    }
}

/// Hermitian matrix variable; its `dim²` real parameters are the
/// coefficients of `E_kk`, `E_ij + E_ji` and `i(E_ij − E_ji)`.
#[derive(Clone, Copy, Debug)]
pub struct HermitianVar {
    offset: usize,
    dim: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct ScalarVar(usize);

#[derive(Clone, Copy, Debug)]
pub struct LmiId(usize);

impl HermitianVar {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_params(&self) -> usize {
        self.dim * self.dim
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let d = self.dim;
        (0..d).flat_map(move |i| (i + 1..d).map(move |j| (i, j)))
    }

    /// Sparse complex basis element `k` as `(row, col, value)` entries.
    fn basis(&self, k: usize) -> Vec<(usize, usize, C64)> {
        let d = self.dim;
        if k < d {
            return vec![(k, k, C64::new(1.0, 0.0))];
        }
        let p = (k - d) / 2;
        let (i, j) = self.pairs().nth(p).expect("basis index in range");
        if (k - d).is_multiple_of(2) {
            vec![(i, j, C64::new(1.0, 0.0)), (j, i, C64::new(1.0, 0.0))]
        } else {
            vec![(i, j, C64::new(0.0, 1.0)), (j, i, C64::new(0.0, -1.0))]
        }
    }

    fn basis_dense(&self, k: usize) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for (r, c, v) in self.basis(k) {
            m[(r, c)] = v;
        }
        m
    }

    /// Matrix value at a solution vector.
    pub fn value(&self, y: &[f64]) -> CMat {
        let d = self.dim;
        let mut m = CMat::zeros(d, d);
        for k in 0..d {
            m[(k, k)] = C64::new(y[self.offset + k], 0.0);
        }
        for (p, (i, j)) in self.pairs().enumerate() {
            let re = y[self.offset + d + 2 * p];
            let im = y[self.offset + d + 2 * p + 1];
            m[(i, j)] = C64::new(re, im);
            m[(j, i)] = C64::new(re, -im);
        }
        m
    }
}

impl ScalarVar {
    pub fn value(&self, y: &[f64]) -> f64 {
        y[self.0]
    }
}

struct ComplexLmi {
    dim: usize,
    constant: CMat,
    terms: Vec<(usize, Vec<(usize, usize, C64)>)>,
}

/// Assembles an [`SdpProblem`] from Hermitian variables and complex LMIs;
/// complex blocks are embedded as `[[Re, −Im], [Im, Re]]`, all-real blocks
/// stay real.
pub struct SdpBuilder {
    n_vars: usize,
    objective: Vec<f64>,
    lmis: Vec<ComplexLmi>,
}

const DROP: f64 = 1e-15;

impl Default for SdpBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl SdpBuilder {
    pub fn new() -> Self {
        SdpBuilder {
            n_vars: 0,
            objective: vec![],
            lmis: vec![],
        }
    }

    pub fn hermitian(&mut self, dim: usize) -> HermitianVar {
        let v = HermitianVar {
            offset: self.n_vars,
            dim,
        };
        self.n_vars += dim * dim;
        self.objective.resize(self.n_vars, 0.0);
        v
    }

    pub fn scalar(&mut self) -> ScalarVar {
        let v = ScalarVar(self.n_vars);
        self.n_vars += 1;
        self.objective.resize(self.n_vars, 0.0);
        v
    }

    /// Objective `+= coef · Tr X`.
    pub fn maximize_trace(&mut self, v: HermitianVar, coef: f64) {
        for k in 0..v.dim {
            self.objective[v.offset + k] += coef;
        }
    }

    /// Objective `+= coef · Re Tr(W X)` for Hermitian `W`.
    pub fn maximize_inner(&mut self, v: HermitianVar, w: &CMat, coef: f64) {
        for k in 0..v.n_params() {
            let val: f64 = v
                .basis(k)
                .iter()
                .map(|&(r, c, z)| (w[(c, r)] * z).re)
                .sum();
            self.objective[v.offset + k] += coef * val;
        }
    }

    pub fn maximize_scalar(&mut self, v: ScalarVar, coef: f64) {
        self.objective[v.0] += coef;
    }

    pub fn lmi(&mut self, dim: usize) -> LmiId {
        self.lmis.push(ComplexLmi {
            dim,
            constant: CMat::zeros(dim, dim),
            terms: vec![],
        });
        LmiId(self.lmis.len() - 1)
    }

    pub fn add_constant(&mut self, lmi: LmiId, m: &CMat) {
        self.lmis[lmi.0].constant += m;
    }

    pub fn add_scalar(&mut self, lmi: LmiId, v: ScalarVar, coefficient: &CMat) {
        let entries = sparsify(coefficient);
        if !entries.is_empty() {
            self.lmis[lmi.0].terms.push((v.0, entries));
        }
    }

    /// Adds `f(X)` to the block, for a linear Hermiticity-preserving `f`.
    pub fn add_map(&mut self, lmi: LmiId, v: HermitianVar, f: impl Fn(&CMat) -> CMat) {
        for k in 0..v.n_params() {
            let img = f(&v.basis_dense(k));
            debug_assert_eq!(img.nrows(), self.lmis[lmi.0].dim);
            let entries = sparsify(&img);
            if !entries.is_empty() {
                self.lmis[lmi.0].terms.push((v.offset + k, entries));
            }
        }
    }

    /// Adds `coef · X` at the diagonal position `(at, at)` of the block.
    pub fn add_placed(&mut self, lmi: LmiId, v: HermitianVar, at: usize, coef: f64) {
        for k in 0..v.n_params() {
            let entries = v
                .basis(k)
                .into_iter()
                .map(|(r, c, z)| (r + at, c + at, z * coef))
                .collect();
            self.lmis[lmi.0].terms.push((v.offset + k, entries));
        }
    }

    pub fn build(self) -> SdpProblem {
        let blocks = self.lmis.into_iter().map(embed_block).collect();
        SdpProblem {
            n_vars: self.n_vars,
            objective: self.objective,
            blocks,
        }
    }
}

fn sparsify(m: &CMat) -> Vec<(usize, usize, C64)> {
    let mut out = vec![];
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let z = m[(r, c)];
            if z.norm() > DROP {
                out.push((r, c, z));
            }
        }
    }
    out
}

fn embed_block(lmi: ComplexLmi) -> RealBlock {
    let n = lmi.dim;
    let constant = sparsify(&lmi.constant);
    let real = constant.iter().all(|e| e.2.im.abs() <= DROP)
        && lmi
            .terms
            .iter()
            .all(|(_, es)| es.iter().all(|e| e.2.im.abs() <= DROP));
    let embed = |es: &[(usize, usize, C64)]| -> Sparse {
        let mut out = Vec::with_capacity(es.len() * if real { 1 } else { 4 });
        for &(r, c, z) in es {
            if real {
                out.push((r, c, z.re));
                continue;
            }
            if z.re.abs() > DROP {
                out.push((r, c, z.re));
                out.push((r + n, c + n, z.re));
            }
            if z.im.abs() > DROP {
                out.push((r, c + n, -z.im));
                out.push((r + n, c, z.im));
            }
        }
        out
    };
    let mut merged: std::collections::BTreeMap<usize, Sparse> = Default::default();
    for (var, es) in &lmi.terms {
        merged.entry(*var).or_default().extend(embed(es));
    }
    let mut terms: Vec<(usize, Sparse)> = merged
        .into_iter()
        .map(|(v, es)| (v, compress(es)))
        .collect();
    terms.retain(|(_, es)| !es.is_empty());
    RealBlock {
        dim: if real { n } else { 2 * n },
        constant: compress(embed(&constant)),
        terms,
    }
}

fn compress(mut es: Sparse) -> Sparse {
    es.sort_by_key(|&(r, c, _)| (c, r));
    let mut out: Sparse = Vec::with_capacity(es.len());
    for (r, c, v) in es {
        match out.last_mut() {
            Some(last) if last.0 == r && last.1 == c => last.2 += v,
            _ => out.push((r, c, v)),
        }
    }
    out.retain(|e| e.2.abs() > DROP);
    out
}
