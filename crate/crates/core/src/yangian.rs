//! Tensor-square operators and the generalized Yangian identity.
//!
//! For an operator-valued series A(z) on an m-dimensional space, the
//! generalized (alpha, beta, gamma)-Yangian identity is the equality
//!
//!   (z - w + a Om) (A(z) x 1) (z + w + g - b Om+) (1 x A(w))
//! = (1 x A(w)) (z + w + g - b Om+') (A(z) x 1) (z - w + a Om)
//!
//! in bivariate Laurent series with coefficients in U(g) (or, for the Lax
//! operator, in the module M after applying both sides to the cyclic
//! vector). Om is the flip of tensor factors; Om+ is its one-factor adjoint
//! with respect to a nondegenerate pairing, needed only when beta != 0.
//!
//! Tensor indices are paired row-major: (i,j) -> i*m + j.

use crate::error::{Error, Result};
use crate::laxop::{CheckReport, ResidueEntry};
use crate::matrix::QMat;
use crate::scalar::{render, render_half, Rat};
use crate::series::{prec_max, Prec, Series, SeriesMatrix};
use crate::uea::{Algebra, UeaElem};
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

/// Flip of tensor factors on an m-dimensional space.
pub fn omega(m: usize) -> QMat {
    let mut out = QMat::zero(m * m, m * m);
    for i in 0..m {
        for j in 0..m {
            out.set(i * m + j, j * m + i, Rat::one());
        }
    }
    out
}

/// One-factor adjoint of the flip for a pairing P between spaces W and U
/// (P[i][j] = <w_i | u_j>); this is the operator on W (x) U.
pub fn omega_dagger(p: &QMat) -> Result<QMat> {
    let m = p.rows;
    let pinv = p.inverse().map_err(|_| Error::DegenerateForm("pairing".into()))?;
    let mut out = QMat::zero(m * m, m * m);
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let v = p.at(c, d) * pinv.at(b, a);
                    if !v.is_zero() {
                        out.set(a * m + b, c * m + d, v);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The companion adjoint on U (x) W.
pub fn omega_dagger_flip(p: &QMat) -> Result<QMat> {
    let m = p.rows;
    let pinv = p.inverse().map_err(|_| Error::DegenerateForm("pairing".into()))?;
    let mut out = QMat::zero(m * m, m * m);
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let v = p.at(d, c) * pinv.at(a, b);
                    if !v.is_zero() {
                        out.set(a * m + b, c * m + d, v);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Adjoint of a matrix for the bilinear form `<u|v> = u^T B v`.
pub fn adjoint(a: &QMat, form: &QMat) -> Result<QMat> {
    let binv = form.inverse().map_err(|_| Error::DegenerateForm("form".into()))?;
    Ok(binv.mul(&a.transpose()).mul(form))
}

/// The pairing between V[-d/2] and V[d/2] induced by the form on V through
/// the compression maps; checks the orthogonality condition
/// `im Psi = (ker Pi)^perp` first.
pub fn induced_pairing(alg: &Algebra) -> Result<QMat> {
    let form = alg
        .model
        .form_on_v
        .as_ref()
        .ok_or(Error::FormMissing)?;
    let setup = &alg.setup;
    let n = alg.n();
    let comp_rows: Vec<usize> = (0..n).filter(|i| !setup.s_minus.contains(i)).collect();
    let cross = form.matrix.select(&comp_rows, &setup.s_plus);
    if !cross.is_zero() {
        return Err(Error::OrthogonalityViolation);
    }
    let p = form.matrix.select(&setup.s_minus, &setup.s_plus);
    if p.inverse().is_err() {
        return Err(Error::OrthogonalityViolation);
    }
    Ok(p)
}

/// Symmetry sign of the induced pairing (`phi` in the rectangular analysis).
pub fn induced_symmetry(p: &QMat) -> Option<i64> {
    if p.transpose() == *p {
        Some(1)
    } else if p.transpose() == p.neg() {
        Some(-1)
    } else {
        None
    }
}

/// Om^g = sum_i U_i (x) U^i.
pub fn omega_g(alg: &Algebra) -> QMat {
    let mut out = QMat::zero(alg.n() * alg.n(), alg.n() * alg.n());
    for i in 0..alg.dim() {
        out = out.add(&alg.model.rep[i].kron(&alg.model.dual_rep[i]));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct YangianParams {
    pub alpha: String,
    pub beta: String,
    pub gamma: String,
    pub epsilon: Option<i64>,
}

/// Numeric parameter triple.
#[derive(Debug, Clone)]
pub struct Params {
    pub alpha: Rat,
    pub beta: Rat,
    pub gamma: Rat,
    pub epsilon: Option<i64>,
}

impl Params {
    pub fn new(alpha: Rat, beta: Rat, gamma: Rat, epsilon: Option<i64>) -> Params {
        Params { alpha, beta, gamma, epsilon }
    }

    pub fn render(&self) -> YangianParams {
        YangianParams {
            alpha: render(&self.alpha),
            beta: render(&self.beta),
            gamma: render(&self.gamma),
            epsilon: self.epsilon,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IdentityMode {
    Exact,
    ModJ,
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub zexp2: i64,
    pub wexp2: i64,
    pub row: usize,
    pub col: usize,
    pub term: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct YangianReport {
    pub identity: String,
    pub params: YangianParams,
    pub mode: IdentityMode,
    /// Doubled floors (z, w) above which the residual was verified; None
    /// means the comparison was exact.
    pub zfloor2: Option<i64>,
    pub wfloor2: Option<i64>,
    pub violations: Vec<Violation>,
}

impl YangianReport {
    pub fn is_pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Bivariate truncated Laurent series; exponents doubled, floors per
/// variable, `None` meaning exact in that variable.
#[derive(Debug, Clone, PartialEq)]
pub struct BiSeries {
    pub terms: BTreeMap<(i64, i64), UeaElem>,
    pub zfloor: Prec,
    pub wfloor: Prec,
}

impl BiSeries {
    pub fn zero() -> BiSeries {
        BiSeries { terms: BTreeMap::new(), zfloor: None, wfloor: None }
    }

    pub fn monomial(ez2: i64, ew2: i64, c: UeaElem) -> BiSeries {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((ez2, ew2), c);
        }
        BiSeries { terms, zfloor: None, wfloor: None }
    }

    fn top_bound_z(&self) -> Option<i64> {
        let stored = self.terms.keys().map(|k| k.0).max();
        let unknown = self.zfloor.map(|f| f - 1);
        match (stored, unknown) {
            (None, x) => x,
            (x, None) => x,
            (Some(a), Some(b)) => Some(a.max(b)),
        }
    }

    fn top_bound_w(&self) -> Option<i64> {
        let stored = self.terms.keys().map(|k| k.1).max();
        let unknown = self.wfloor.map(|f| f - 1);
        match (stored, unknown) {
            (None, x) => x,
            (x, None) => x,
            (Some(a), Some(b)) => Some(a.max(b)),
        }
    }

    fn insert(&mut self, key: (i64, i64), c: UeaElem) {
        if !c.is_zero() {
            self.terms.insert(key, c);
        }
    }

    pub fn add(&self, other: &BiSeries) -> BiSeries {
        let mut out = self.clone();
        out.zfloor = prec_max(self.zfloor, other.zfloor);
        out.wfloor = prec_max(self.wfloor, other.wfloor);
        for (k, c) in &other.terms {
            let mut cur = out.terms.remove(k).unwrap_or_default();
            cur.add_assign(c);
            out.insert(*k, cur);
        }
        out.prune();
        out
    }

    pub fn neg(&self) -> BiSeries {
        BiSeries {
            terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect(),
            zfloor: self.zfloor,
            wfloor: self.wfloor,
        }
    }

    pub fn sub(&self, other: &BiSeries) -> BiSeries {
        self.add(&other.neg())
    }

    fn prune(&mut self) {
        let (zf, wf) = (self.zfloor, self.wfloor);
        self.terms.retain(|&(ez, ew), _| {
            zf.map_or(true, |f| ez >= f) && wf.map_or(true, |f| ew >= f)
        });
    }

    pub fn mul(&self, other: &BiSeries, alg: &Algebra) -> BiSeries {
        let zfloor = bi_mul_floor(
            self.zfloor,
            self.top_bound_z(),
            other.zfloor,
            other.top_bound_z(),
        );
        let wfloor = bi_mul_floor(
            self.wfloor,
            self.top_bound_w(),
            other.wfloor,
            other.top_bound_w(),
        );
        let mut out = BiSeries { terms: BTreeMap::new(), zfloor, wfloor };
        for ((za, wa), ca) in &self.terms {
            for ((zb, wb), cb) in &other.terms {
                let key = (za + zb, wa + wb);
                if zfloor.map_or(false, |f| key.0 < f) || wfloor.map_or(false, |f| key.1 < f) {
                    continue;
                }
                let prod = alg.mul(ca, cb);
                if prod.is_zero() {
                    continue;
                }
                let mut cur = out.terms.remove(&key).unwrap_or_default();
                cur.add_assign(&prod);
                out.insert(key, cur);
            }
        }
        out
    }

    pub fn reduce_mod_j(&self, alg: &Algebra) -> BiSeries {
        let mut out = BiSeries { terms: BTreeMap::new(), zfloor: self.zfloor, wfloor: self.wfloor };
        for (k, c) in &self.terms {
            out.insert(*k, alg.reduce_mod_j(c));
        }
        out
    }
}

fn bi_mul_floor(fa: Prec, ta: Option<i64>, fb: Prec, tb: Option<i64>) -> Prec {
    let mut out: Prec = None;
    if let (Some(f), Some(t)) = (fa, tb) {
        out = prec_max(out, Some(f + t));
    }
    if let (Some(f), Some(t)) = (fb, ta) {
        out = prec_max(out, Some(f + t));
    }
    out
}

#[derive(Debug, Clone)]
pub struct BiMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<BiSeries>,
}

impl BiMatrix {
    pub fn zero(rows: usize, cols: usize) -> BiMatrix {
        BiMatrix { rows, cols, entries: vec![BiSeries::zero(); rows * cols] }
    }

    pub fn at(&self, r: usize, c: usize) -> &BiSeries {
        &self.entries[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut BiSeries {
        &mut self.entries[r * self.cols + c]
    }

    pub fn from_qmat(q: &QMat) -> BiMatrix {
        let mut out = BiMatrix::zero(q.rows, q.cols);
        for r in 0..q.rows {
            for c in 0..q.cols {
                if !q.at(r, c).is_zero() {
                    *out.at_mut(r, c) =
                        BiSeries::monomial(0, 0, UeaElem::scalar(q.at(r, c).clone()));
                }
            }
        }
        out
    }

    /// (c_z z + c_w w + c_1) I + Q, with scalar coefficients.
    pub fn linear_factor(m: usize, c_z: &Rat, c_w: &Rat, c_1: &Rat, q: &QMat) -> BiMatrix {
        let mut out = BiMatrix::from_qmat(q);
        for i in 0..m {
            let mut s = out.at(i, i).clone();
            s = s.add(&BiSeries::monomial(2, 0, UeaElem::scalar(c_z.clone())));
            s = s.add(&BiSeries::monomial(0, 2, UeaElem::scalar(c_w.clone())));
            s = s.add(&BiSeries::monomial(0, 0, UeaElem::scalar(c_1.clone())));
            *out.at_mut(i, i) = s;
        }
        out
    }

    /// Injects a univariate series matrix, var = 0 for z, 1 for w.
    fn inject(s: &Series, var: usize) -> BiSeries {
        let mut out = BiSeries::zero();
        for (e2, c) in &s.terms {
            let key = if var == 0 { (*e2, 0) } else { (0, *e2) };
            out.insert(key, c.clone());
        }
        if var == 0 {
            out.zfloor = s.floor;
        } else {
            out.wfloor = s.floor;
        }
        out
    }

    /// A (x) 1_m with A in the given variable.
    pub fn kron_left(a: &SeriesMatrix, m: usize, var: usize) -> BiMatrix {
        let mut out = BiMatrix::zero(a.rows * m, a.cols * m);
        for i in 0..a.rows {
            for j in 0..a.cols {
                let bs = BiMatrix::inject(a.at(i, j), var);
                for k in 0..m {
                    *out.at_mut(i * m + k, j * m + k) = bs.clone();
                }
            }
        }
        out
    }

    /// 1_m (x) A with A in the given variable.
    pub fn kron_right(m: usize, a: &SeriesMatrix, var: usize) -> BiMatrix {
        let mut out = BiMatrix::zero(m * a.rows, m * a.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                let bs = BiMatrix::inject(a.at(i, j), var);
                for k in 0..m {
                    *out.at_mut(k * a.rows + i, k * a.cols + j) = bs.clone();
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &BiMatrix, alg: &Algebra) -> BiMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = BiMatrix::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = BiSeries::zero();
                for k in 0..self.cols {
                    acc = acc.add(&self.at(r, k).mul(other.at(k, c), alg));
                }
                *out.at_mut(r, c) = acc;
            }
        }
        out
    }

    pub fn sub(&self, other: &BiMatrix) -> BiMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for i in 0..self.entries.len() {
            out.entries[i] = self.entries[i].sub(&other.entries[i]);
        }
        out
    }

    pub fn reduce_mod_j(&self, alg: &Algebra) -> BiMatrix {
        let mut out = self.clone();
        for s in &mut out.entries {
            *s = s.reduce_mod_j(alg);
        }
        out
    }

    pub fn zfloor(&self) -> Prec {
        self.entries.iter().fold(None, |a, s| prec_max(a, s.zfloor))
    }

    pub fn wfloor(&self) -> Prec {
        self.entries.iter().fold(None, |a, s| prec_max(a, s.wfloor))
    }
}

/// Evaluates the difference of the two sides of the generalized Yangian
/// identity for a square operator series. In `ModJ` mode all products are
/// taken in U(g) and reduction happens once at the end.
pub fn check_identity(
    alg: &Algebra,
    op: &SeriesMatrix,
    params: &Params,
    pairing: Option<&QMat>,
    mode: IdentityMode,
    window2: Option<(i64, i64)>,
) -> Result<YangianReport> {
    if op.rows != op.cols {
        return Err(Error::ShapeMismatch("identity needs a square operator".into()));
    }
    let m = op.rows;
    let diff = identity_residual(alg, op, params, pairing)?;
    let diff = match mode {
        IdentityMode::Exact => diff,
        IdentityMode::ModJ => diff.reduce_mod_j(alg),
    };
    let zf = diff.zfloor();
    let wf = diff.wfloor();
    let (zlo, wlo) = match window2 {
        Some((a, b)) => (prec_max(zf, Some(a)), prec_max(wf, Some(b))),
        None => (zf, wf),
    };
    let mut violations = Vec::new();
    for r in 0..m * m {
        for c in 0..m * m {
            for ((ez, ew), coeff) in &diff.at(r, c).terms {
                if zlo.map_or(false, |f| *ez < f) || wlo.map_or(false, |f| *ew < f) {
                    continue;
                }
                if !coeff.is_zero() {
                    violations.push(Violation {
                        zexp2: *ez,
                        wexp2: *ew,
                        row: r,
                        col: c,
                        term: alg.render_elem(coeff),
                    });
                }
            }
        }
    }
    Ok(YangianReport {
        identity: "gener-yangian".into(),
        params: params.render(),
        mode,
        zfloor2: zlo,
        wfloor2: wlo,
        violations,
    })
}

fn identity_residual(
    alg: &Algebra,
    op: &SeriesMatrix,
    params: &Params,
    pairing: Option<&QMat>,
) -> Result<BiMatrix> {
    let m = op.rows;
    let om = omega(m);
    let zero_q = QMat::zero(m * m, m * m);
    let (mid_l_q, mid_r_q) = if params.beta.is_zero() {
        (zero_q.clone(), zero_q)
    } else {
        let p = pairing.ok_or(Error::FormMissing)?;
        (
            omega_dagger(p)?.scale(&-params.beta.clone()),
            omega_dagger_flip(p)?.scale(&-params.beta.clone()),
        )
    };
    let one = Rat::one();
    let neg_one = -Rat::one();
    // (z - w + alpha Omega)
    let flip_factor = BiMatrix::linear_factor(
        m * m,
        &one,
        &neg_one,
        &Rat::zero(),
        &om.scale(&params.alpha),
    );
    // (z + w + gamma - beta Omega+)
    let mid_l = BiMatrix::linear_factor(m * m, &one, &one, &params.gamma, &mid_l_q);
    let mid_r = BiMatrix::linear_factor(m * m, &one, &one, &params.gamma, &mid_r_q);
    let az1 = BiMatrix::kron_left(op, m, 0);
    let one_aw = BiMatrix::kron_right(m, op, 1);
    let lhs = flip_factor
        .mul(&az1, alg)
        .mul(&mid_l, alg)
        .mul(&one_aw, alg);
    let rhs = one_aw
        .mul(&mid_r, alg)
        .mul(&az1, alg)
        .mul(&flip_factor, alg);
    Ok(lhs.sub(&rhs))
}

/// Residual of the commutator form of the identity, multiplied through by
/// (z-w)(z+w+gamma). Exact-mode only; used to cross-check the four-factor
/// form.
pub fn commutator_form_residual(
    alg: &Algebra,
    op: &SeriesMatrix,
    params: &Params,
    pairing: Option<&QMat>,
) -> Result<BiMatrix> {
    let m = op.rows;
    let om = omega(m);
    let az1 = BiMatrix::kron_left(op, m, 0);
    let one_aw = BiMatrix::kron_right(m, op, 1);
    let one_az = BiMatrix::kron_right(m, op, 0);
    let aw_x_az = {
        // A(w) (x) A(z) = (A(w) x 1)(1 x A(z))
        let awl = BiMatrix::kron_left(op, m, 1);
        awl.mul(&one_az, alg)
    };
    let az_x_aw = BiMatrix::kron_left(op, m, 0).mul(&one_aw, alg);
    let comm = az1.mul(&one_aw, alg).sub(&one_aw.mul(&az1, alg));
    // (z-w)(z+w+gamma) as bivariate scalar factors
    let id = QMat::identity(m * m);
    let zmw = BiMatrix::linear_factor(m * m, &Rat::one(), &(-Rat::one()), &Rat::zero(), &QMat::zero(m * m, m * m));
    let zpw = BiMatrix::linear_factor(m * m, &Rat::one(), &Rat::one(), &params.gamma, &QMat::zero(m * m, m * m));
    let _ = id;
    let lhs = zmw.mul(&zpw, alg).mul(&comm, alg);

    let om_bi = BiMatrix::from_qmat(&om.scale(&params.alpha));
    let term1 = zpw.mul(&om_bi, alg).mul(&aw_x_az.sub(&az_x_aw), alg);

    let mut rhs = term1;
    if !params.beta.is_zero() {
        let p = pairing.ok_or(Error::FormMissing)?;
        let omd = BiMatrix::from_qmat(&omega_dagger(p)?);
        let t2a = one_aw.mul(&omd, alg).mul(&az1, alg);
        let t2b = az1.mul(&omd, alg).mul(&one_aw, alg);
        let t2 = zmw.mul(&t2a.sub(&t2b), alg);
        rhs = rhs.sub(&bi_scale(&t2, &params.beta));
        let eps = params.epsilon.ok_or(Error::FormMissing)?;
        let t3a = one_aw.mul(&omd, alg).mul(&one_az, alg);
        let t3b = one_az.mul(&omd, alg).mul(&one_aw, alg);
        let t3 = t3a.sub(&t3b);
        let coeff = &params.alpha * &params.beta * crate::scalar::rat(eps);
        rhs = rhs.sub(&bi_scale(&t3, &coeff));
    }
    Ok(lhs.sub(&rhs))
}

fn bi_scale(m: &BiMatrix, s: &Rat) -> BiMatrix {
    let mut out = m.clone();
    for e in &mut out.entries {
        let terms = std::mem::take(&mut e.terms);
        e.terms = terms
            .into_iter()
            .map(|(k, c)| (k, c.scale(s)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
    }
    out
}

/// Table parameters for A(z) over the standard representations.
pub fn table_params(alg: &Algebra) -> Result<Params> {
    use crate::liealg::Family;
    let family = alg
        .model
        .family
        .ok_or_else(|| Error::UnsupportedFamily("generic model".into()))?;
    Ok(match family {
        Family::Gl | Family::Sl => Params::new(
            Rat::one(),
            Rat::zero(),
            Rat::zero(),
            None,
        ),
        Family::So | Family::Sp => {
            let eps = alg.model.form_on_v.as_ref().unwrap().epsilon;
            Params::new(
                crate::scalar::frac(1, 2),
                crate::scalar::frac(1, 2),
                crate::scalar::frac(eps, 2),
                Some(eps),
            )
        }
    })
}

/// Parameters for the Lax operator: gl/sl keep (1,0,0); so/sp get
/// gamma = (eps - dim V + dim V[d/2]) / 2.
pub fn lax_params(alg: &Algebra) -> Result<Params> {
    use crate::liealg::Family;
    let family = alg
        .model
        .family
        .ok_or_else(|| Error::UnsupportedFamily("generic model".into()))?;
    Ok(match family {
        Family::Gl | Family::Sl => Params::new(Rat::one(), Rat::zero(), Rat::zero(), None),
        Family::So | Family::Sp => {
            let eps = alg.model.form_on_v.as_ref().unwrap().epsilon;
            let gamma = crate::scalar::frac(
                eps - alg.n() as i64 + alg.setup.r1() as i64,
                2,
            );
            Params::new(
                crate::scalar::frac(1, 2),
                crate::scalar::frac(1, 2),
                gamma,
                Some(eps),
            )
        }
    })
}

/// Checks the identity for A(z) = z + U with the table parameters; the
/// residual must vanish exactly, with no truncation anywhere.
pub fn check_a_identity(alg: &Algebra) -> Result<YangianReport> {
    let params = table_params(alg)?;
    let form = alg.model.form_on_v.as_ref().map(|f| f.matrix.clone());
    check_identity(
        alg,
        &crate::laxop::build_a(alg),
        &params,
        form.as_ref(),
        IdentityMode::Exact,
        None,
    )
}

/// Checks the identity for L~(z) mod J with the Lax parameters, comparing
/// above the joint floor (floor_L + d + 1 in each variable).
pub fn check_lax_identity(alg: &Algebra, res: &crate::laxop::LaxResult) -> Result<YangianReport> {
    let params = lax_params(alg)?;
    let pairing = if params.beta.is_zero() {
        None
    } else {
        Some(induced_pairing(alg)?)
    };
    let window = res.floor2 + 2 * (res.d2 + 1);
    check_identity(
        alg,
        &res.l_tilde,
        &params,
        pairing.as_ref(),
        IdentityMode::ModJ,
        Some((window, window)),
    )
}

/// Skewadjointness L+(-z) = -eps L(z) for the induced pairing.
pub fn check_skewadjoint(
    alg: &Algebra,
    l: &SeriesMatrix,
    pairing: &QMat,
    eps: i64,
) -> Result<CheckReport> {
    let pinv = pairing.inverse().map_err(|_| Error::DegenerateForm("pairing".into()))?;
    let pt = pairing.transpose();
    // transpose of the series matrix
    let mut lt = SeriesMatrix::zero(l.cols, l.rows);
    for r in 0..l.rows {
        for c in 0..l.cols {
            *lt.at_mut(c, r) = l.at(r, c).clone();
        }
    }
    let ldag = lt.mul_qmat_left(&pinv).mul_qmat_right(&pt);
    // substitute z -> -z
    let mut ldag_neg = ldag.clone();
    for s in &mut ldag_neg.entries {
        let terms = std::mem::take(&mut s.terms);
        s.terms = terms
            .into_iter()
            .map(|(e2, c)| {
                assert!(e2 % 2 == 0, "skewadjointness needs integer exponents");
                let sign = if (e2 / 2).rem_euclid(2) == 0 { 1 } else { -1 };
                (e2, c.scale(&crate::scalar::rat(sign)))
            })
            .collect();
    }
    let rhs = l.scale(&crate::scalar::rat(-eps));
    let from = prec_max(ldag_neg.floor(), rhs.floor()).unwrap_or(i64::MIN / 2);
    let mut residues = Vec::new();
    for (r, c, e2, d) in ldag_neg.diffs_above(&rhs, from) {
        residues.push(ResidueEntry {
            row: r,
            col: c,
            exp2: e2,
            term: alg.render_elem(&d),
            context: format!("adjoint mismatch at z^{}", render_half(e2)),
        });
    }
    Ok(CheckReport::new("skewadjoint", residues))
}
