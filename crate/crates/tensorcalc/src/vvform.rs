use std::collections::BTreeMap;
use std::fmt;

use njk_symexpr::{all_zero, Scalar, VerificationResult, VerifyConfig, Var};

use crate::chart::{Chart, SmoothMap};
use crate::combin::{binomial, rank, subsets};
use crate::form::{basis_label, ScalarForm};
use crate::linalg::{self, Matrix};
use crate::TensorError;

/// Vector-valued k-form: `table[rank(I)][i]` is the `∂ᵢ` component of
/// `K(∂_{I})`. For k = 1 this is the transpose of the usual matrix
/// `Nⁱ_j`, see [`VVForm::matrix`].
#[derive(Clone, PartialEq)]
pub struct VVForm {
    pub chart: Chart,
    pub k: usize,
    pub table: Vec<Vec<Scalar>>,
}

impl VVForm {
    pub fn zero(chart: &Chart, k: usize) -> VVForm {
        let n = chart.dim();
        VVForm { chart: chart.clone(), k, table: vec![vec![Scalar::zero(); n]; binomial(n, k)] }
    }

    pub fn vector(chart: &Chart, comps: Vec<Scalar>) -> Result<VVForm, TensorError> {
        if comps.len() != chart.dim() {
            return Err(TensorError::Shape(format!("vector field on {} needs {} components", chart.name(), chart.dim())));
        }
        Ok(VVForm { chart: chart.clone(), k: 0, table: vec![comps] })
    }

    /// `∂ᵢ`.
    pub fn coordinate_field(chart: &Chart, i: usize) -> VVForm {
        let mut v = VVForm::zero(chart, 0);
        v.table[0][i] = Scalar::one();
        v
    }

    /// (1,1) tensor from its matrix, `m[i][j] = Nⁱ_j` (row = output).
    pub fn from_matrix(chart: &Chart, m: &Matrix) -> Result<VVForm, TensorError> {
        let n = chart.dim();
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(TensorError::Shape(format!("(1,1) tensor on {} needs a {n}×{n} matrix", chart.name())));
        }
        Ok(VVForm { chart: chart.clone(), k: 1, table: linalg::transpose(m) })
    }

    pub fn identity(chart: &Chart) -> VVForm {
        VVForm::from_matrix(chart, &linalg::identity(chart.dim())).unwrap()
    }

    pub fn from_table(chart: &Chart, k: usize, table: Vec<Vec<Scalar>>) -> Result<VVForm, TensorError> {
        let n = chart.dim();
        if table.len() != binomial(n, k) || table.iter().any(|r| r.len() != n) {
            return Err(TensorError::Shape(format!("{k}-form table on {} has the wrong shape", chart.name())));
        }
        Ok(VVForm { chart: chart.clone(), k, table })
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// Matrix `Nⁱ_j` of a (1,1) tensor.
    pub fn matrix(&self) -> Matrix {
        assert_eq!(self.k, 1, "matrix() needs a (1,1) tensor");
        linalg::transpose(&self.table)
    }

    /// Components of a vector field.
    pub fn components(&self) -> &[Scalar] {
        assert_eq!(self.k, 0, "components() needs a vector field");
        &self.table[0]
    }

    /// The scalar form `dxⁱ ∘ K`.
    pub fn component_form(&self, i: usize) -> ScalarForm {
        ScalarForm { chart: self.chart.clone(), k: self.k, coeffs: self.table.iter().map(|r| r[i].clone()).collect() }
    }

    pub fn from_component_forms(chart: &Chart, k: usize, forms: &[ScalarForm]) -> VVForm {
        let n = chart.dim();
        let table = (0..binomial(n, k)).map(|r| forms.iter().map(|f| f.coeffs[r].clone()).collect()).collect();
        VVForm { chart: chart.clone(), k, table }
    }

    /// `K(∂_{i1}, …, ∂_{ik})` for indices in any order.
    pub fn value(&self, idx: &[usize]) -> Vec<Scalar> {
        match crate::combin::sort_sign(idx) {
            None => vec![Scalar::zero(); self.dim()],
            Some((s, sign)) => {
                let row = &self.table[rank(self.dim(), &s)];
                if sign < 0 {
                    row.iter().map(|c| -c).collect()
                } else {
                    row.clone()
                }
            }
        }
    }

    /// `K(X₁, …, X_k)` on arbitrary vector fields given by components.
    pub fn eval(&self, xs: &[Vec<Scalar>]) -> Vec<Scalar> {
        assert_eq!(xs.len(), self.k);
        let n = self.dim();
        let mut out = vec![Scalar::zero(); n];
        for (set, row) in subsets(n, self.k).iter().zip(&self.table) {
            if row.iter().all(|c| c.is_zero()) {
                continue;
            }
            let minor: Matrix = set.iter().map(|&i| xs.iter().map(|x| x[i].clone()).collect()).collect();
            let w = linalg::det(&minor);
            if w.is_zero() {
                continue;
            }
            for (o, c) in out.iter_mut().zip(row) {
                *o = &*o + &(&w * c);
            }
        }
        out
    }

    /// `T(X)` for a (1,1) tensor.
    pub fn apply(&self, x: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.k, 1);
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| &self.table[j][i] * &x[j]).sum()).collect()
    }

    fn zip_with(&self, o: &VVForm, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Result<VVForm, TensorError> {
        self.chart.same(&o.chart)?;
        if self.k != o.k {
            return Err(TensorError::Shape(format!("form degrees differ: {} vs {}", self.k, o.k)));
        }
        let table = self
            .table
            .iter()
            .zip(&o.table)
            .map(|(r, s)| r.iter().zip(s).map(|(a, b)| f(a, b)).collect())
            .collect();
        Ok(VVForm { chart: self.chart.clone(), k: self.k, table })
    }

    pub fn add(&self, o: &VVForm) -> Result<VVForm, TensorError> {
        self.zip_with(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &VVForm) -> Result<VVForm, TensorError> {
        self.zip_with(o, |a, b| a - b)
    }

    pub fn scale(&self, c: &Scalar) -> VVForm {
        let table = self.table.iter().map(|r| r.iter().map(|x| x * c).collect()).collect();
        VVForm { chart: self.chart.clone(), k: self.k, table }
    }

    /// `self ∘ other` for (1,1) tensors.
    pub fn compose(&self, other: &VVForm) -> Result<VVForm, TensorError> {
        self.chart.same(&other.chart)?;
        VVForm::from_matrix(&self.chart, &linalg::mat_mul(&self.matrix(), &other.matrix()))
    }

    pub fn substitute(&self, map: &BTreeMap<Var, Scalar>) -> VVForm {
        let table = self.table.iter().map(|r| r.iter().map(|x| x.substitute(map)).collect()).collect();
        VVForm { chart: self.chart.clone(), k: self.k, table }
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().flatten().all(|c| c.is_zero())
    }

    /// Every coefficient with a readable label, zero or not.
    pub fn labeled_entries(&self) -> Vec<(String, &Scalar)> {
        let n = self.dim();
        let mut out = Vec::new();
        for (set, row) in subsets(n, self.k).iter().zip(&self.table) {
            for (i, c) in row.iter().enumerate() {
                let lhs = if set.is_empty() { String::new() } else { format!("{} ", basis_label(&self.chart, set)) };
                out.push((format!("{lhs}⊗ ∂{}", self.chart.coord(i)), c));
            }
        }
        out
    }

    pub fn verify_zero(&self, cfg: &VerifyConfig) -> VerificationResult {
        all_zero(self.labeled_entries(), cfg)
    }

    pub fn verify_eq(&self, other: &VVForm, cfg: &VerifyConfig) -> Result<VerificationResult, TensorError> {
        Ok(self.sub(other)?.verify_zero(cfg))
    }
}

impl fmt::Debug for VVForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for VVForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (label, c) in self.labeled_entries() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c}) {label}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `[X, Y]ⁱ = Xʲ ∂ⱼ Yⁱ − Yʲ ∂ⱼ Xⁱ` on component vectors.
pub fn bracket_components(chart: &Chart, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
    let n = chart.dim();
    (0..n)
        .map(|i| {
            let mut acc = Scalar::zero();
            for j in 0..n {
                let v = chart.coord(j);
                if !x[j].is_zero() {
                    acc = &acc + &(&x[j] * &y[i].diff(v));
                }
                if !y[j].is_zero() {
                    acc = &acc - &(&y[j] * &x[i].diff(v));
                }
            }
            acc
        })
        .collect()
}

pub fn lie_bracket(x: &VVForm, y: &VVForm) -> Result<VVForm, TensorError> {
    x.chart.same(&y.chart)?;
    if x.k != 0 || y.k != 0 {
        return Err(TensorError::Shape("lie_bracket takes two vector fields".into()));
    }
    VVForm::vector(&x.chart, bracket_components(&x.chart, x.components(), y.components()))
}

/// `T_N(X,Y) = [NX,NY] + N²[X,Y] − N[NX,Y] − N[X,NY]` evaluated on pairs of
/// coordinate fields, where `[∂ₐ, ∂_b] = 0`.
pub fn nijenhuis_torsion(n_: &VVForm) -> Result<VVForm, TensorError> {
    if n_.k != 1 {
        return Err(TensorError::Shape("torsion needs a (1,1) tensor".into()));
    }
    let c = &n_.chart;
    let n = c.dim();
    let mut out = VVForm::zero(c, 2);
    let e = |a: usize| -> Vec<Scalar> { (0..n).map(|i| if i == a { Scalar::one() } else { Scalar::zero() }).collect() };
    for (r, set) in subsets(n, 2).iter().enumerate() {
        let (a, b) = (set[0], set[1]);
        let na = n_.table[a].clone();
        let nb = n_.table[b].clone();
        let t1 = bracket_components(c, &na, &nb);
        let t2 = n_.apply(&bracket_components(c, &na, &e(b)));
        let t3 = n_.apply(&bracket_components(c, &e(a), &nb));
        out.table[r] = (0..n).map(|i| &(&t1[i] - &t2[i]) - &t3[i]).collect();
    }
    Ok(out)
}

/// Frölicher–Nijenhuis bracket, expanded over the decomposables
/// `Kⁱ ⊗ ∂ᵢ`, `Lʲ ⊗ ∂ⱼ`. Coordinate fields commute, so the
/// `α∧β ⊗ [X,Y]` term drops and Lie derivatives along `∂ᵢ` differentiate
/// coefficients.
pub fn fn_bracket(kf: &VVForm, lf: &VVForm) -> Result<VVForm, TensorError> {
    kf.chart.same(&lf.chart)?;
    let c = &kf.chart;
    let n = c.dim();
    let deg = kf.k + lf.k;
    if deg > n {
        return Ok(VVForm::zero(c, deg));
    }
    let sign_k = if kf.k % 2 == 0 { Scalar::one() } else { Scalar::int(-1) };
    let alphas: Vec<ScalarForm> = (0..n).map(|i| kf.component_form(i)).collect();
    let betas: Vec<ScalarForm> = (0..n).map(|j| lf.component_form(j)).collect();
    let d_alpha: Vec<ScalarForm> = alphas.iter().map(|a| a.d()).collect();
    let d_beta: Vec<ScalarForm> = betas.iter().map(|b| b.d()).collect();
    let unit = |i: usize| -> Vec<Scalar> { (0..n).map(|j| if j == i { Scalar::one() } else { Scalar::zero() }).collect() };
    let mut out: Vec<ScalarForm> = (0..n).map(|_| ScalarForm::zero(c, deg)).collect();
    for i in 0..n {
        if alphas[i].is_zero() {
            continue;
        }
        for j in 0..n {
            if betas[j].is_zero() {
                continue;
            }
            let (a, b) = (&alphas[i], &betas[j]);
            // α ∧ L_{∂ᵢ}β ⊗ ∂ⱼ + (−1)^k dα ∧ ι_{∂ᵢ}β ⊗ ∂ⱼ
            let mut to_j = a.wedge(&b.lie_coord(c.coord(i)));
            if lf.k > 0 {
                to_j = to_j.add(&d_alpha[i].wedge(&b.interior(&unit(i))).scale(&sign_k));
            }
            // −L_{∂ⱼ}α ∧ β ⊗ ∂ᵢ + (−1)^k ι_{∂ⱼ}α ∧ dβ ⊗ ∂ᵢ
            let mut to_i = a.lie_coord(c.coord(j)).wedge(b).scale(&Scalar::int(-1));
            if kf.k > 0 {
                to_i = to_i.add(&a.interior(&unit(j)).wedge(&d_beta[j]).scale(&sign_k));
            }
            out[j] = out[j].add(&to_j);
            out[i] = out[i].add(&to_i);
        }
    }
    Ok(VVForm::from_component_forms(c, deg, &out))
}

/// `L_X T = [X, T]^fn`.
pub fn lie_derivative(x: &VVForm, t: &VVForm) -> Result<VVForm, TensorError> {
    if x.k != 0 {
        return Err(TensorError::Shape("lie_derivative needs a vector field".into()));
    }
    fn_bracket(x, t)
}

/// `φ_* T = dφ ∘ T ∘ dφ⁻¹`, written in target coordinates. The inverse is
/// checked on both sides first.
pub fn pushforward(
    phi: &SmoothMap,
    t: &VVForm,
    phi_inv: &SmoothMap,
    cfg: &VerifyConfig,
) -> Result<VVForm, TensorError> {
    phi.source.same(&t.chart)?;
    phi_inv.source.same(&phi.target)?;
    phi_inv.target.same(&phi.source)?;
    check_inverse(phi, phi_inv, cfg)?;
    let back = phi_inv.pullback_map();
    let t_at = t.substitute(&back);
    let j_at: Matrix = phi.jacobian().iter().map(|r| r.iter().map(|x| x.substitute(&back)).collect()).collect();
    let j_inv = phi_inv.jacobian();
    let tgt = &phi.target;
    let n = tgt.dim();
    let mut out = VVForm::zero(tgt, t.k);
    for (r, set) in subsets(n, t.k).iter().enumerate() {
        let vecs: Vec<Vec<Scalar>> = set.iter().map(|&c| j_inv.iter().map(|row| row[c].clone()).collect()).collect();
        let v = t_at.eval(&vecs);
        out.table[r] = linalg::mat_vec(&j_at, &v);
    }
    Ok(out)
}

pub fn check_inverse(phi: &SmoothMap, phi_inv: &SmoothMap, cfg: &VerifyConfig) -> Result<(), TensorError> {
    for (name, comp) in [("φ⁻¹∘φ", phi_inv.after(phi)?), ("φ∘φ⁻¹", phi.after(phi_inv)?)] {
        let id = SmoothMap::identity(&comp.source);
        let diffs: Vec<(String, Scalar)> = comp
            .comps
            .iter()
            .zip(&id.comps)
            .enumerate()
            .map(|(i, (a, b))| (format!("{name} component {i}"), a - b))
            .collect();
        let r = all_zero(diffs.iter().map(|(l, e)| (l.clone(), e)), cfg);
        if !r.is_zero() {
            return Err(TensorError::InverseCheck(r.to_string()));
        }
    }
    Ok(())
}

/// Entries of `dφ ∘ T_src − (T_tgt ∘ φ) ∘ dφ`, which vanish exactly when
/// the two tensors are φ-related.
pub fn relatedness_defect(phi: &SmoothMap, t_src: &VVForm, t_tgt: &VVForm) -> Result<Matrix, TensorError> {
    phi.source.same(&t_src.chart)?;
    phi.target.same(&t_tgt.chart)?;
    if t_src.k != 1 || t_tgt.k != 1 {
        return Err(TensorError::Shape("relatedness is checked for (1,1) tensors".into()));
    }
    let j = phi.jacobian();
    let tgt_at = t_tgt.substitute(&phi.pullback_map()).matrix();
    Ok(linalg::mat_sub(&linalg::mat_mul(&j, &t_src.matrix()), &linalg::mat_mul(&tgt_at, &j)))
}

pub fn related_check(
    phi: &SmoothMap,
    t_src: &VVForm,
    t_tgt: &VVForm,
    cfg: &VerifyConfig,
) -> Result<VerificationResult, TensorError> {
    let d = relatedness_defect(phi, t_src, t_tgt)?;
    let mut entries = Vec::new();
    for (i, row) in d.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            entries.push((format!("d{} ⊗ ∂{}", phi.source.coord(j), phi.target.coord(i)), e));
        }
    }
    Ok(all_zero(entries.into_iter().map(|(l, e)| (l, e)), cfg))
}
