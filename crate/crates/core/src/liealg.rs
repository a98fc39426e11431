//! Models of the classical Lie algebras and their graded setups.
//!
//! A [`LieAlgebraModel`] packages a basis with its representation matrices,
//! structure constants, trace form and dual basis. For `so_N` / `sp_N` the
//! realization is fixed once and for all: the bilinear form on `F^N` is
//! supported on the anti-diagonal, `<e_m | e_k> = -eps_m delta_{k, N+1-m}`,
//! with the sign scheme chosen so that the standard Jordan chains of
//! rectangular nilpotents lie in the algebra. The basis elements are
//!
//!   f_{m,k} = E_{m,k} - eps_m eps_k E_{k',m'},    m' = N+1-m,
//!
//! normalized by 1/(1 + delta_{k,m'}), with dual basis (1/2) f_{k,m}.
//!
//! A [`GradedSetup`] attaches an sl2-triple `(f, 2x, e)` to a model, together
//! with the ad-x grading of the basis and the X-weight decomposition of V.
//! Half-integers are stored doubled throughout.

use crate::error::{Error, Result};
use crate::matrix::QMat;
use crate::scalar::{frac, rat, Rat};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Gl,
    Sl,
    So,
    Sp,
}

impl Family {
    pub fn parse(s: &str) -> Result<Family> {
        match s {
            "gl" => Ok(Family::Gl),
            "sl" => Ok(Family::Sl),
            "so" => Ok(Family::So),
            "sp" => Ok(Family::Sp),
            other => Err(Error::InvalidFamily(format!("unknown family `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Gl => "gl",
            Family::Sl => "sl",
            Family::So => "so",
            Family::Sp => "sp",
        }
    }

    pub fn dimension(&self, n: usize) -> usize {
        match self {
            Family::Gl => n * n,
            Family::Sl => n * n - 1,
            Family::So => n * (n - 1) / 2,
            Family::Sp => n * (n + 1) / 2,
        }
    }
}

/// Structured basis label. The sort key of labels breaks ties among basis
/// elements of equal ad-x weight, so it must be stable across relabelings:
/// pair-form so/sp labels sort exactly like their flat counterparts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Label {
    /// Elementary matrix `e_{i,j}` (1-based), for gl and the off-diagonal
    /// part of sl.
    E(usize, usize),
    /// Traceless diagonal `h_k = e_{k,k} - e_{k+1,k+1}` for sl.
    H(usize),
    /// `f_{m,k}` with flat 1-based indices, for so/sp.
    F(usize, usize),
    /// `f_{(i,h),(j,k)}` with pair indices, for rectangular so/sp setups.
    /// `(i,h)` maps to flat index `(i-1)p + h`.
    FPair { p: usize, a: (usize, usize), b: (usize, usize) },
    /// Free-form label for generic models; `ord` fixes the sort position.
    Named { ord: usize, name: String },
}

impl Label {
    pub fn sort_key(&self) -> (u8, usize, usize) {
        match self {
            Label::H(k) => (0, *k, 0),
            Label::E(i, j) => (1, *i, *j),
            Label::F(m, k) => (1, *m, *k),
            Label::FPair { p, a, b } => (1, (a.0 - 1) * p + a.1, (b.0 - 1) * p + b.1),
            Label::Named { ord, .. } => (2, *ord, 0),
        }
    }

    pub fn render(&self) -> String {
        match self {
            Label::E(i, j) => format!("e[{i},{j}]"),
            Label::H(k) => format!("h[{k}]"),
            Label::F(m, k) => format!("F[{m},{k}]"),
            Label::FPair { a, b, .. } => {
                format!("F[({},{}),({},{})]", a.0, a.1, b.0, b.1)
            }
            Label::Named { name, .. } => name.clone(),
        }
    }
}

/// Bilinear form on V together with its symmetry sign.
#[derive(Debug, Clone)]
pub struct FormOnV {
    pub matrix: QMat,
    /// +1 symmetric (so), -1 skewsymmetric (sp).
    pub epsilon: i64,
}

/// A Lie algebra given by a faithful representation.
#[derive(Debug, Clone)]
pub struct LieAlgebraModel {
    pub family: Option<Family>,
    /// Dimension of the representation space V.
    pub n: usize,
    pub labels: Vec<Label>,
    /// Representation matrix per basis element.
    pub rep: Vec<QMat>,
    /// structure[i][j] = coordinates of [u_i, u_j] in the basis.
    pub structure: Vec<Vec<Vec<(usize, Rat)>>>,
    /// Trace form gram[i][j] = tr(rep_i rep_j).
    pub gram: QMat,
    /// dual_coords[i] = coordinates of the dual element u^i.
    pub dual_coords: Vec<Vec<Rat>>,
    /// rep matrices of the dual basis.
    pub dual_rep: Vec<QMat>,
    pub form_on_v: Option<FormOnV>,
}

impl LieAlgebraModel {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Bracket of two coordinate vectors.
    pub fn bracket(&self, a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        let dim = self.dim();
        let mut out = vec![Rat::zero(); dim];
        for (i, ca) in a.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (j, cb) in b.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                for (k, c) in &self.structure[i][j] {
                    out[*k] += ca * cb * c;
                }
            }
        }
        out
    }

    pub fn rep_of(&self, coords: &[Rat]) -> QMat {
        let mut m = QMat::zero(self.n, self.n);
        for (i, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                m = m.add(&self.rep[i].scale(c));
            }
        }
        m
    }

    /// Trace-form pairing of two coordinate vectors.
    pub fn pair(&self, a: &[Rat], b: &[Rat]) -> Rat {
        let mut out = Rat::zero();
        for (i, ca) in a.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (j, cb) in b.iter().enumerate() {
                if !cb.is_zero() {
                    out += ca * cb * self.gram.at(i, j);
                }
            }
        }
        out
    }

    /// Coordinates of the dual basis element `u^i`.
    pub fn dual_element(&self, i: usize) -> &[Rat] {
        &self.dual_coords[i]
    }

    /// Decomposes an N x N matrix into basis coordinates, or None if it does
    /// not lie in the span of the basis.
    pub fn decompose(&self, m: &QMat) -> Option<Vec<Rat>> {
        let coords = match self.family {
            Some(Family::Gl) => {
                let n = self.n;
                let mut coords = vec![Rat::zero(); self.dim()];
                for i in 0..n {
                    for j in 0..n {
                        coords[i * n + j] = m.at(i, j).clone();
                    }
                }
                coords
            }
            Some(Family::Sl) => {
                let mut coords = vec![Rat::zero(); self.dim()];
                for (idx, label) in self.labels.iter().enumerate() {
                    match label {
                        Label::H(k) => {
                            // coefficient on h_k is the partial sum of the diagonal
                            let mut acc = Rat::zero();
                            for t in 0..*k {
                                acc += m.at(t, t);
                            }
                            coords[idx] = acc;
                        }
                        Label::E(i, j) => coords[idx] = m.at(i - 1, j - 1).clone(),
                        _ => unreachable!(),
                    }
                }
                coords
            }
            Some(Family::So) | Some(Family::Sp) => {
                let mut coords = vec![Rat::zero(); self.dim()];
                for (idx, label) in self.labels.iter().enumerate() {
                    let (a, b) = flat_of_label(label);
                    coords[idx] = m.at(a - 1, b - 1).clone();
                }
                coords
            }
            None => {
                // solve against vectorized basis matrices
                let dim = self.dim();
                let nn = self.n * self.n;
                let sys = QMat::from_fn(nn, dim, |rc, k| {
                    self.rep[k].at(rc / self.n, rc % self.n).clone()
                });
                let rhs: Vec<Rat> = (0..nn)
                    .map(|rc| m.at(rc / self.n, rc % self.n).clone())
                    .collect();
                sys.solve(&rhs)?
            }
        };
        // verify (the structured reads above only look at carrier entries)
        if self.rep_of(&coords) == *m {
            Some(coords)
        } else {
            None
        }
    }
}

fn flat_of_label(label: &Label) -> (usize, usize) {
    match label {
        Label::F(m, k) => (*m, *k),
        Label::FPair { p, a, b } => ((a.0 - 1) * p + a.1, (b.0 - 1) * p + b.1),
        _ => panic!("not an so/sp label"),
    }
}

/// Anti-diagonal sign scheme for so/sp.
pub fn eps_signs(family: Family, n: usize) -> Vec<i64> {
    let sign = |m: usize| if m % 2 == 0 { 1i64 } else { -1 };
    match family {
        Family::Sp => (1..=n).map(sign).collect(),
        Family::So if n % 2 == 1 => (1..=n).map(sign).collect(),
        Family::So => (1..=n)
            .map(|m| if m <= n / 2 { sign(m) } else { -sign(m) })
            .collect(),
        _ => panic!("eps_signs only defined for so/sp"),
    }
}

/// Builds one of the four classical families with its standard representation.
pub fn build_algebra(family: Family, n: usize) -> Result<LieAlgebraModel> {
    if n == 0 {
        return Err(Error::InvalidFamily("n must be positive".into()));
    }
    if family == Family::Sp && n % 2 == 1 {
        return Err(Error::InvalidFamily(format!("sp requires even n, got {n}")));
    }
    if family == Family::Sl && n == 1 {
        return Err(Error::InvalidFamily("sl_1 is zero-dimensional".into()));
    }
    let (labels, rep, form_on_v) = match family {
        Family::Gl => {
            let mut labels = Vec::new();
            let mut rep = Vec::new();
            for i in 1..=n {
                for j in 1..=n {
                    labels.push(Label::E(i, j));
                    let mut m = QMat::zero(n, n);
                    m.set(i - 1, j - 1, Rat::one());
                    rep.push(m);
                }
            }
            (labels, rep, None)
        }
        Family::Sl => {
            let mut labels = Vec::new();
            let mut rep = Vec::new();
            for k in 1..n {
                labels.push(Label::H(k));
                let mut m = QMat::zero(n, n);
                m.set(k - 1, k - 1, Rat::one());
                m.set(k, k, -Rat::one());
                rep.push(m);
            }
            for i in 1..=n {
                for j in 1..=n {
                    if i != j {
                        labels.push(Label::E(i, j));
                        let mut m = QMat::zero(n, n);
                        m.set(i - 1, j - 1, Rat::one());
                        rep.push(m);
                    }
                }
            }
            (labels, rep, None)
        }
        Family::So | Family::Sp => {
            let eps = eps_signs(family, n);
            let prime = |m: usize| n + 1 - m;
            let mut labels = Vec::new();
            let mut rep = Vec::new();
            for m in 1..=n {
                for k in 1..=n {
                    let in_set = if family == Family::So {
                        k < prime(m)
                    } else {
                        k <= prime(m)
                    };
                    if !in_set {
                        continue;
                    }
                    labels.push(Label::F(m, k));
                    let c = if k == prime(m) { rat(2) } else { rat(1) };
                    let mut mat = QMat::zero(n, n);
                    mat.set(m - 1, k - 1, Rat::one());
                    let s = -rat(eps[m - 1] * eps[k - 1]);
                    let v = mat.at(prime(k) - 1, prime(m) - 1) + &s;
                    mat.set(prime(k) - 1, prime(m) - 1, v);
                    rep.push(mat.scale(&c.recip()));
                }
            }
            let mut b = QMat::zero(n, n);
            for m in 1..=n {
                b.set(m - 1, prime(m) - 1, -rat(eps[m - 1]));
            }
            let epsilon = if family == Family::So { 1 } else { -1 };
            (labels, rep, Some(FormOnV { matrix: b, epsilon }))
        }
    };

    // order sanity: construction order must agree with the label sort keys
    for w in labels.windows(2) {
        debug_assert!(w[0].sort_key() < w[1].sort_key());
    }

    let mut model = LieAlgebraModel {
        family: Some(family),
        n,
        labels,
        rep,
        structure: Vec::new(),
        gram: QMat::zero(0, 0),
        dual_coords: Vec::new(),
        dual_rep: Vec::new(),
        form_on_v,
    };
    finish_model(&mut model)?;
    if model.dim() != family.dimension(n) {
        return Err(Error::ConstructionFailed(format!(
            "dimension mismatch for {}_{n}",
            family.name()
        )));
    }
    Ok(model)
}

/// Builds a model from explicit representation matrices (generic entry point).
pub fn build_from_rep(labels: Vec<Label>, rep: Vec<QMat>) -> Result<LieAlgebraModel> {
    if labels.is_empty() || labels.len() != rep.len() {
        return Err(Error::ShapeMismatch("labels/matrices length mismatch".into()));
    }
    let n = rep[0].rows;
    if rep.iter().any(|m| m.rows != n || m.cols != n) {
        return Err(Error::ShapeMismatch("representation matrices must be square of equal size".into()));
    }
    let mut model = LieAlgebraModel {
        family: None,
        n,
        labels,
        rep,
        structure: Vec::new(),
        gram: QMat::zero(0, 0),
        dual_coords: Vec::new(),
        dual_rep: Vec::new(),
        form_on_v: None,
    };
    finish_model(&mut model)?;
    Ok(model)
}

/// Computes structure constants, gram matrix and dual basis; verifies that
/// the representation is a homomorphism and the form is non-degenerate.
fn finish_model(model: &mut LieAlgebraModel) -> Result<()> {
    let dim = model.dim();
    let mut structure = vec![vec![Vec::new(); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            if i == j {
                continue;
            }
            let comm = model.rep[i].comm(&model.rep[j]);
            let coords = model.decompose(&comm).ok_or_else(|| {
                Error::ConstructionFailed(format!(
                    "[{}, {}] is not in the span of the basis",
                    model.labels[i].render(),
                    model.labels[j].render()
                ))
            })?;
            structure[i][j] = coords
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (k, c.clone()))
                .collect();
        }
    }
    model.structure = structure;

    let gram = QMat::from_fn(dim, dim, |i, j| model.rep[i].mul(&model.rep[j]).trace());
    let gram_inv = gram
        .inverse()
        .map_err(|_| Error::DegenerateForm("trace form is degenerate".into()))?;
    // u^i = sum_j (gram^{-1})_{ji} u_j so that (u_i | u^j) = delta_{ij}
    let mut dual_coords = Vec::with_capacity(dim);
    let mut dual_rep = Vec::with_capacity(dim);
    for i in 0..dim {
        let coords: Vec<Rat> = (0..dim).map(|j| gram_inv.at(j, i).clone()).collect();
        let mat = model.rep_of(&coords);
        dual_coords.push(coords);
        dual_rep.push(mat);
    }
    model.gram = gram;
    model.dual_coords = dual_coords;
    model.dual_rep = dual_rep;

    // so/sp: every basis matrix is skew-adjoint for the form
    if let Some(form) = &model.form_on_v {
        let binv = form.matrix.inverse().map_err(|_| {
            Error::DegenerateForm("form on V is degenerate".into())
        })?;
        for (idx, m) in model.rep.iter().enumerate() {
            let adj = binv.mul(&m.transpose()).mul(&form.matrix);
            if adj != m.neg() {
                return Err(Error::ConstructionFailed(format!(
                    "{} is not skew-adjoint for the form on V",
                    model.labels[idx].render()
                )));
            }
        }
        let tsign = form.matrix.transpose();
        let expect = form.matrix.scale(&rat(form.epsilon));
        if tsign != expect {
            return Err(Error::DegenerateForm("form has wrong symmetry".into()));
        }
    }
    Ok(())
}

/// Validates antisymmetry, the Jacobi identity, invariance of the trace form
/// and the duality relations on the full basis. Cubic in the dimension; meant
/// for tests.
pub fn validate_model(model: &LieAlgebraModel) -> Result<()> {
    let dim = model.dim();
    let basis = |i: usize| {
        let mut v = vec![Rat::zero(); dim];
        v[i] = Rat::one();
        v
    };
    for i in 0..dim {
        for j in 0..dim {
            // representation is a homomorphism
            let lhs = model.rep[i].comm(&model.rep[j]);
            let rhs = model.rep_of(&model.bracket(&basis(i), &basis(j)));
            if lhs != rhs {
                return Err(Error::ConstructionFailed("rep is not a homomorphism".into()));
            }
            // duality
            let expect = if i == j { Rat::one() } else { Rat::zero() };
            if model.pair(&basis(i), &model.dual_coords[j]) != expect {
                return Err(Error::ConstructionFailed("dual basis relation fails".into()));
            }
        }
    }
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                let a = basis(i);
                let b = basis(j);
                let c = basis(k);
                // Jacobi
                let mut acc = model.bracket(&model.bracket(&a, &b), &c);
                let t2 = model.bracket(&model.bracket(&b, &c), &a);
                let t3 = model.bracket(&model.bracket(&c, &a), &b);
                for t in 0..dim {
                    acc[t] += &t2[t] + &t3[t];
                }
                if acc.iter().any(|x| !x.is_zero()) {
                    return Err(Error::ConstructionFailed("Jacobi identity fails".into()));
                }
                // invariance ([a,b]|c) + (b|[a,c]) = 0
                let inv = model.pair(&model.bracket(&a, &b), &c)
                    + model.pair(&b, &model.bracket(&a, &c));
                if !inv.is_zero() {
                    return Err(Error::ConstructionFailed("trace form is not invariant".into()));
                }
            }
        }
    }
    Ok(())
}

/// Partition of n: positive parts, stored nonincreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition(pub Vec<usize>);

impl Partition {
    pub fn parse(s: &str) -> Result<Partition> {
        let parts: Result<Vec<usize>> = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&v| v > 0)
                    .ok_or_else(|| Error::InvalidPartition(format!("bad part `{t}`")))
            })
            .collect();
        let mut parts = parts?;
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition(parts))
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn render(&self) -> String {
        self.0
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn is_rectangular(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    /// Family-specific parity constraint on Jordan types.
    pub fn valid_for(&self, family: Family) -> bool {
        match family {
            Family::Gl | Family::Sl => true,
            Family::So => (1..=self.0[0])
                .filter(|p| p % 2 == 0)
                .all(|p| self.0.iter().filter(|&&q| q == p).count() % 2 == 0),
            Family::Sp => (1..=self.0[0])
                .filter(|p| p % 2 == 1)
                .all(|p| self.0.iter().filter(|&&q| q == p).count() % 2 == 0),
        }
    }

    /// All partitions of n.
    pub fn enumerate(n: usize) -> Vec<Partition> {
        fn rec(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if n == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for p in (1..=max.min(n)).rev() {
                cur.push(p);
                rec(n - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }
}

/// Grading data attached to a model by an sl2-triple.
#[derive(Debug, Clone)]
pub struct GradedSetup {
    pub partition: Option<Partition>,
    /// Coordinates of the sl2-triple (f, x, e); the triple is (f, 2x, e).
    pub f: Vec<Rat>,
    pub x: Vec<Rat>,
    pub e: Vec<Rat>,
    /// Doubled ad-x eigenvalue per basis element.
    pub delta2: Vec<i64>,
    /// Doubled X-weight per V basis vector.
    pub v_weights2: Vec<i64>,
    /// Doubled top V-weight; the top ad-X weight of End V is d = d2.
    pub d2: i64,
    /// layout[block][pos] = flat V index (0-based); None for generic setups.
    pub layout: Option<Vec<Vec<usize>>>,
    /// Flat indices of V[d/2] and V[-d/2], in canonical (block) order.
    pub s_plus: Vec<usize>,
    pub s_minus: Vec<usize>,
}

impl GradedSetup {
    pub fn r1(&self) -> usize {
        self.s_plus.len()
    }

    /// dim V[k2/2]
    pub fn dim_weight(&self, k2: i64) -> usize {
        self.v_weights2.iter().filter(|&&w| w == k2).count()
    }

    pub fn dim_weight_ge(&self, k2: i64) -> usize {
        self.v_weights2.iter().filter(|&&w| w >= k2).count()
    }
}

/// Builds the sl2-triple and grading for a partition.
pub fn build_graded_setup(model: &LieAlgebraModel, partition: &Partition) -> Result<GradedSetup> {
    let family = model
        .family
        .ok_or_else(|| Error::InvalidFamily("generic models need an explicit triple".into()))?;
    if partition.sum() != model.n {
        return Err(Error::InvalidPartition(format!(
            "partition {} does not sum to {}",
            partition.render(),
            model.n
        )));
    }
    if !partition.valid_for(family) {
        return Err(Error::InvalidPartition(format!(
            "partition {} violates the {} parity constraint",
            partition.render(),
            family.name()
        )));
    }
    match family {
        Family::Gl | Family::Sl => chain_setup(model, partition, contiguous_layout(partition)),
        Family::So | Family::Sp => {
            if partition.is_rectangular() {
                chain_setup(model, partition, contiguous_layout(partition))
            } else {
                generic_so_sp_setup(model, partition)
            }
        }
    }
}

fn contiguous_layout(partition: &Partition) -> Vec<Vec<usize>> {
    let mut layout = Vec::new();
    let mut next = 0;
    for &p in &partition.0 {
        layout.push((next..next + p).collect());
        next += p;
    }
    layout
}

/// Weight of cell (block with part p, position h), doubled: p + 1 - 2h.
fn cell_weight2(p: usize, h: usize) -> i64 {
    p as i64 + 1 - 2 * h as i64
}

/// Standard chain construction: f is the sum of sub-diagonal steps of each
/// Jordan block, x the diagonal weight matrix, e the weighted super-diagonal.
fn chain_setup(
    model: &LieAlgebraModel,
    partition: &Partition,
    layout: Vec<Vec<usize>>,
) -> Result<GradedSetup> {
    let n = model.n;
    let mut fmat = QMat::zero(n, n);
    let mut xmat = QMat::zero(n, n);
    let mut emat = QMat::zero(n, n);
    for (bi, &p) in partition.0.iter().enumerate() {
        for h in 1..=p {
            let pos = layout[bi][h - 1];
            *xmat.at_mut(pos, pos) = frac(cell_weight2(p, h), 2);
            if h < p {
                let lo = layout[bi][h];
                *fmat.at_mut(lo, pos) += Rat::one();
                *emat.at_mut(pos, lo) += rat((h * (p - h)) as i64);
            }
        }
    }
    let f = model.decompose(&fmat).ok_or_else(|| {
        Error::ConstructionFailed("chain nilpotent does not lie in the algebra".into())
    })?;
    let x = model.decompose(&xmat).ok_or_else(|| {
        Error::ConstructionFailed("grading element does not lie in the algebra".into())
    })?;
    let e = model.decompose(&emat).ok_or_else(|| {
        Error::ConstructionFailed("raising element does not lie in the algebra".into())
    })?;
    finish_setup(model, Some(partition.clone()), f, x, e, Some(layout))
}

/// Non-rectangular so/sp: lay V out by descending weight, take the diagonal
/// grading element, and search for f in the weight -1 component with the
/// required Jordan type; e is then solved for linearly. The sign bookkeeping
/// of the rectangular case does not extend to mixed block sizes, so the
/// element is found by deterministic trial and validated a posteriori.
fn generic_so_sp_setup(model: &LieAlgebraModel, partition: &Partition) -> Result<GradedSetup> {
    let n = model.n;
    // cells sorted by descending weight, ties by (block, position)
    let mut cells: Vec<(i64, usize, usize)> = Vec::new();
    for (bi, &p) in partition.0.iter().enumerate() {
        for h in 1..=p {
            cells.push((-cell_weight2(p, h), bi, h));
        }
    }
    cells.sort();
    let mut layout = vec![vec![0usize; 0]; partition.0.len()];
    for (bi, &p) in partition.0.iter().enumerate() {
        layout[bi] = vec![0; p];
    }
    let mut xmat = QMat::zero(n, n);
    for (pos, &(negw2, bi, h)) in cells.iter().enumerate() {
        layout[bi][h - 1] = pos;
        *xmat.at_mut(pos, pos) = frac(-negw2, 2);
    }
    let x = model.decompose(&xmat).ok_or_else(|| {
        Error::ConstructionFailed("diagonal grading element not in algebra".into())
    })?;

    // grade the basis by x
    let dim = model.dim();
    let delta2 = grade_basis(model, &x)?;

    // candidate coefficients for f over the weight -1 basis elements
    let lowers: Vec<usize> = (0..dim).filter(|&i| delta2[i] == -2).collect();
    let raisers: Vec<usize> = (0..dim).filter(|&i| delta2[i] == 2).collect();
    if lowers.is_empty() {
        return Err(Error::ConstructionFailed("no weight -1 component".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x57ac1e);
    for attempt in 0..64 {
        let mut f = vec![Rat::zero(); dim];
        for &i in &lowers {
            let c = if attempt == 0 {
                Rat::one()
            } else {
                crate::scalar::small_nonzero(&mut rng)
            };
            f[i] = c;
        }
        let fmat = model.rep_of(&f);
        if fmat.jordan_type() != partition.0 {
            continue;
        }
        // solve [e, f] = 2x over the weight +1 component
        let sys = QMat::from_fn(dim, raisers.len(), |row, col| {
            let mut ecand = vec![Rat::zero(); dim];
            ecand[raisers[col]] = Rat::one();
            model.bracket(&ecand, &f)[row].clone()
        });
        let rhs: Vec<Rat> = x.iter().map(|c| c * rat(2)).collect();
        if let Some(sol) = sys.solve(&rhs) {
            let mut e = vec![Rat::zero(); dim];
            for (col, &i) in raisers.iter().enumerate() {
                e[i] = sol[col].clone();
            }
            return finish_setup(model, Some(partition.clone()), f, x, e, Some(layout));
        }
    }
    Err(Error::ConstructionFailed(format!(
        "no sl2-triple found for {} partition {}",
        model.family.map(|f| f.name()).unwrap_or("?"),
        partition.render()
    )))
}

fn grade_basis(model: &LieAlgebraModel, x: &[Rat]) -> Result<Vec<i64>> {
    let dim = model.dim();
    let mut delta2 = vec![0i64; dim];
    for i in 0..dim {
        let mut basis = vec![Rat::zero(); dim];
        basis[i] = Rat::one();
        let br = model.bracket(x, &basis);
        // br must be a multiple of basis_i
        let lambda = br[i].clone();
        for (j, c) in br.iter().enumerate() {
            let expect = if j == i { lambda.clone() } else { Rat::zero() };
            if *c != expect {
                return Err(Error::ConstructionFailed(format!(
                    "basis element {} is not an ad-x eigenvector",
                    model.labels[i].render()
                )));
            }
        }
        let doubled = &lambda * rat(2);
        delta2[i] = doubled.to_i64_integer().ok_or_else(|| {
            Error::ConstructionFailed("non-half-integer grading".into())
        })?;
    }
    Ok(delta2)
}

/// Builds a setup from explicit triple coordinates (generic entry point).
pub fn build_setup_from_triple(
    model: &LieAlgebraModel,
    f: Vec<Rat>,
    x: Vec<Rat>,
    e: Vec<Rat>,
) -> Result<GradedSetup> {
    finish_setup(model, None, f, x, e, None)
}

fn finish_setup(
    model: &LieAlgebraModel,
    partition: Option<Partition>,
    f: Vec<Rat>,
    x: Vec<Rat>,
    e: Vec<Rat>,
    layout: Option<Vec<Vec<usize>>>,
) -> Result<GradedSetup> {
    // sl2 relations: [x,e] = e, [x,f] = -f, [e,f] = 2x
    let dim = model.dim();
    let check = |got: Vec<Rat>, want: Vec<Rat>, what: &str| -> Result<()> {
        if got != want {
            return Err(Error::ConstructionFailed(format!("sl2 relation {what} fails")));
        }
        Ok(())
    };
    check(model.bracket(&x, &e), e.clone(), "[x,e]=e")?;
    check(
        model.bracket(&x, &f),
        f.iter().map(|c| -c.clone()).collect(),
        "[x,f]=-f",
    )?;
    check(
        model.bracket(&e, &f),
        x.iter().map(|c| c * rat(2)).collect(),
        "[e,f]=2x",
    )?;

    let delta2 = grade_basis(model, &x)?;

    // X must act diagonally with half-integer eigenvalues
    let xmat = model.rep_of(&x);
    let n = model.n;
    let mut v_weights2 = vec![0i64; n];
    for a in 0..n {
        for b in 0..n {
            if a != b && !xmat.at(a, b).is_zero() {
                return Err(Error::ConstructionFailed("X is not diagonal in the V basis".into()));
            }
        }
        let doubled = xmat.at(a, a) * rat(2);
        v_weights2[a] = doubled.to_i64_integer().ok_or_else(|| {
            Error::ConstructionFailed("non-half-integer V weight".into())
        })?;
    }
    let d2 = *v_weights2.iter().max().unwrap();
    let dmin = *v_weights2.iter().min().unwrap();
    if d2 + dmin != 0 {
        return Err(Error::ConstructionFailed("V weights are not symmetric".into()));
    }

    // duality flips the grading
    for i in 0..dim {
        for (j, c) in model.dual_coords[i].iter().enumerate() {
            if !c.is_zero() && delta2[j] != -delta2[i] {
                return Err(Error::ConstructionFailed("dual basis does not flip grading".into()));
            }
        }
    }

    // sum of weights is zero
    let wsum: i64 = v_weights2.iter().sum();
    if wsum != 0 {
        return Err(Error::ConstructionFailed("trace of X is nonzero".into()));
    }

    let (s_plus, s_minus) = match &layout {
        Some(rows) => {
            // block order over the maximal blocks
            let mut sp = Vec::new();
            let mut sm = Vec::new();
            for row in rows {
                if !row.is_empty() && v_weights2[row[0]] == d2 {
                    sp.push(row[0]);
                    sm.push(row[row.len() - 1]);
                }
            }
            (sp, sm)
        }
        None => {
            let sp: Vec<usize> = (0..n).filter(|&a| v_weights2[a] == d2).collect();
            let sm: Vec<usize> = (0..n).filter(|&a| v_weights2[a] == -d2).collect();
            (sp, sm)
        }
    };
    if s_plus.len() != s_minus.len() || s_plus.is_empty() {
        return Err(Error::ConstructionFailed("top and bottom weight spaces mismatch".into()));
    }

    Ok(GradedSetup {
        partition,
        f,
        x,
        e,
        delta2,
        v_weights2,
        d2,
        layout,
        s_plus,
        s_minus,
    })
}

/// sl2 with its irreducible N-dimensional representation, as a generic model
/// plus setup. Basis (e, h, f).
pub fn sl2_irrep(big_n: usize) -> Result<(LieAlgebraModel, GradedSetup)> {
    assert!(big_n >= 2);
    let n = big_n;
    let mut fmat = QMat::zero(n, n);
    let mut xmat = QMat::zero(n, n);
    let mut emat = QMat::zero(n, n);
    for i in 1..=n {
        *xmat.at_mut(i - 1, i - 1) = frac(n as i64 + 1 - 2 * i as i64, 2);
        if i < n {
            fmat.set(i, i - 1, Rat::one());
            emat.set(i - 1, i, rat((i * (n - i)) as i64));
        }
    }
    let labels = vec![
        Label::Named { ord: 0, name: "e".into() },
        Label::Named { ord: 1, name: "h".into() },
        Label::Named { ord: 2, name: "f".into() },
    ];
    let model = build_from_rep(labels, vec![emat, xmat.scale(&rat(2)), fmat])?;
    let f = vec![Rat::zero(), Rat::zero(), Rat::one()];
    let x = vec![Rat::zero(), frac(1, 2), Rat::zero()];
    let e = vec![Rat::one(), Rat::zero(), Rat::zero()];
    let setup = build_setup_from_triple(&model, f, x, e)?;
    Ok((model, setup))
}

/// sl2 in its adjoint representation (ordered basis e, h, f of the space),
/// with the principal grading.
pub fn sl2_adjoint() -> Result<(LieAlgebraModel, GradedSetup)> {
    // ad-matrices on the ordered basis (e, h, f)
    let ad = |e_c: i64, h_c: i64, f_c: i64| -> QMat {
        // brackets: [e,h] = -2e, [e,f] = h, [h,f] = -2f
        let mut m = QMat::zero(3, 3);
        // action on basis vector e: c_h [h,e] + c_f [f,e] = 2 c_h e - c_f h
        *m.at_mut(0, 0) = rat(2 * h_c);
        *m.at_mut(1, 0) = rat(-f_c);
        // action on h: c_e [e,h] + c_f [f,h] = -2 c_e e + 2 c_f f
        *m.at_mut(0, 1) = rat(-2 * e_c);
        *m.at_mut(2, 1) = rat(2 * f_c);
        // action on f: c_e [e,f] + c_h [h,f] = c_e h - 2 c_h f
        *m.at_mut(1, 2) = rat(e_c);
        *m.at_mut(2, 2) = rat(-2 * h_c);
        m
    };
    let labels = vec![
        Label::Named { ord: 0, name: "e".into() },
        Label::Named { ord: 1, name: "h".into() },
        Label::Named { ord: 2, name: "f".into() },
    ];
    let model = build_from_rep(labels, vec![ad(1, 0, 0), ad(0, 1, 0), ad(0, 0, 1)])?;
    let f = vec![Rat::zero(), Rat::zero(), Rat::one()];
    let x = vec![Rat::zero(), frac(1, 2), Rat::zero()];
    let e = vec![Rat::one(), Rat::zero(), Rat::zero()];
    let setup = build_setup_from_triple(&model, f, x, e)?;
    Ok((model, setup))
}

/// Rescales the basis by nonzero rationals; dual data is recomputed. Used by
/// basis-independence tests.
pub fn rescaled_model(model: &LieAlgebraModel, seed: u64) -> (LieAlgebraModel, Vec<Rat>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scales: Vec<Rat> = (0..model.dim())
        .map(|_| {
            let mut c = crate::scalar::small_nonzero(&mut rng);
            if c.is_negative() {
                c = -c;
            }
            c
        })
        .collect();
    let rep: Vec<QMat> = model
        .rep
        .iter()
        .zip(&scales)
        .map(|(m, c)| m.scale(c))
        .collect();
    let mut out = model.clone();
    out.rep = rep;
    out.family = None; // decomposition fast paths assume unit normalization
    finish_model(&mut out).expect("rescaled model stays valid");
    (out, scales)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl2_gram_entries() {
        let m = build_algebra(Family::Gl, 2).unwrap();
        assert_eq!(m.dim(), 4);
        let idx = |i, j| m.labels.iter().position(|l| *l == Label::E(i, j)).unwrap();
        assert_eq!(*m.gram.at(idx(1, 2), idx(2, 1)), rat(1));
        assert_eq!(*m.gram.at(idx(1, 1), idx(1, 1)), rat(1));
        assert_eq!(*m.gram.at(idx(1, 1), idx(2, 2)), rat(0));
    }

    #[test]
    fn so3_dual_is_half_transpose() {
        let m = build_algebra(Family::So, 3).unwrap();
        assert_eq!(m.dim(), 3);
        let idx = |a, b| m.labels.iter().position(|l| *l == Label::F(a, b)).unwrap();
        // dual of F[1,2] is (1/2) F[2,1]
        let dual = &m.dual_coords[idx(1, 2)];
        assert_eq!(dual[idx(2, 1)], frac(1, 2));
        for (j, c) in dual.iter().enumerate() {
            if j != idx(2, 1) {
                assert!(c.is_zero());
            }
        }
    }

    #[test]
    fn sp4_is_skew_adjoint() {
        let m = build_algebra(Family::Sp, 4).unwrap();
        assert_eq!(m.dim(), 10);
        let form = m.form_on_v.as_ref().unwrap();
        assert_eq!(form.epsilon, -1);
        let binv = form.matrix.inverse().unwrap();
        for r in &m.rep {
            let adj = binv.mul(&r.transpose()).mul(&form.matrix);
            assert_eq!(adj, r.neg());
        }
    }

    #[test]
    fn sp_odd_rejected() {
        assert!(matches!(
            build_algebra(Family::Sp, 3),
            Err(Error::InvalidFamily(_))
        ));
    }

    #[test]
    fn sl2_dual_of_h() {
        let m = build_algebra(Family::Sl, 2).unwrap();
        // independent oracle: invert the 3x3 gram matrix of (h, e, f) by hand:
        // (h|h) = 2, (e|f) = 1 => dual of h is h/2
        let hi = m.labels.iter().position(|l| *l == Label::H(1)).unwrap();
        let dual = &m.dual_coords[hi];
        assert_eq!(dual[hi], frac(1, 2));
    }

    #[test]
    fn gl2_principal_grading() {
        let m = build_algebra(Family::Gl, 2).unwrap();
        let setup = build_graded_setup(&m, &Partition(vec![2])).unwrap();
        assert_eq!(setup.d2, 1);
        assert_eq!(setup.dim_weight(1), 1);
        assert_eq!(setup.dim_weight(-1), 1);
        let idx = |i, j| m.labels.iter().position(|l| *l == Label::E(i, j)).unwrap();
        assert_eq!(setup.delta2[idx(1, 2)], 2);
        assert_eq!(setup.delta2[idx(2, 1)], -2);
    }

    #[test]
    fn gl3_zero_nilpotent() {
        let m = build_algebra(Family::Gl, 3).unwrap();
        let setup = build_graded_setup(&m, &Partition(vec![1, 1, 1])).unwrap();
        assert!(setup.f.iter().all(|c| c.is_zero()));
        assert_eq!(setup.d2, 0);
        assert!(setup.delta2.iter().all(|&d| d == 0));
        assert_eq!(setup.r1(), 3);
    }

    #[test]
    fn sp4_rect_weights() {
        let m = build_algebra(Family::Sp, 4).unwrap();
        let setup = build_graded_setup(&m, &Partition(vec![2, 2])).unwrap();
        assert_eq!(setup.d2, 1);
        assert_eq!(setup.v_weights2, vec![1, -1, 1, -1]);
        assert_eq!(setup.r1(), 2);
    }

    #[test]
    fn so_parity_enforced() {
        let m = build_algebra(Family::So, 4).unwrap();
        assert!(build_graded_setup(&m, &Partition(vec![2, 1, 1])).is_err());
        assert!(build_graded_setup(&m, &Partition(vec![2, 2])).is_ok());
        assert!(build_graded_setup(&m, &Partition(vec![3, 1])).is_ok());
    }

    #[test]
    fn so6_principal_triple_exists() {
        // (5,1) has no chain-form realization here; the generic search must find it
        let m = build_algebra(Family::So, 6).unwrap();
        let setup = build_graded_setup(&m, &Partition(vec![5, 1])).unwrap();
        assert_eq!(setup.d2, 4);
        let fmat = m.rep_of(&setup.f);
        assert_eq!(fmat.jordan_type(), vec![5, 1]);
    }

    #[test]
    fn grading_additivity() {
        for (fam, n, part) in [
            (Family::Gl, 3, vec![2, 1]),
            (Family::Sp, 4, vec![2, 2]),
            (Family::So, 5, vec![5]),
        ] {
            let m = build_algebra(fam, n).unwrap();
            let setup = build_graded_setup(&m, &Partition(part)).unwrap();
            for i in 0..m.dim() {
                for j in 0..m.dim() {
                    for (k, _) in &m.structure[i][j] {
                        assert_eq!(setup.delta2[*k], setup.delta2[i] + setup.delta2[j]);
                    }
                }
            }
        }
    }

    #[test]
    fn sl2_irrep_and_adjoint() {
        let (m, setup) = sl2_irrep(3).unwrap();
        assert_eq!(setup.v_weights2, vec![2, 0, -2]);
        assert_eq!(m.pair(&setup.e, &setup.f), rat(4)); // tr(EF) = (N^3-N)/6 = 4
        let (_, adj) = sl2_adjoint().unwrap();
        assert_eq!(adj.d2, 2);
        assert_eq!(adj.v_weights2, vec![2, 0, -2]);
    }

    #[test]
    fn validate_small_models() {
        for (fam, n) in [
            (Family::Gl, 2),
            (Family::Sl, 2),
            (Family::So, 3),
            (Family::Sp, 4),
            (Family::So, 4),
        ] {
            let m = build_algebra(fam, n).unwrap();
            validate_model(&m).unwrap();
        }
    }

    #[test]
    fn partition_parsing() {
        let p = Partition::parse("1,3,1").unwrap();
        assert_eq!(p.0, vec![3, 1, 1]);
        assert!(Partition::parse("0,2").is_err());
        assert!(Partition::parse("a").is_err());
    }
}
