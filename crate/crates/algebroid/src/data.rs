use njk_symexpr::{all_zero, Check, Report, Scalar, VerificationResult, VerifyConfig};
use njk_tensorcalc::combin::{binomial, rank, subsets};
use njk_tensorcalc::linalg::{self, Matrix};
use njk_tensorcalc::{Chart, VVForm};

use crate::AlgebroidError;

/// Components of a section in the trivializing frame `u_α`.
pub type Section = Vec<Scalar>;

/// Lie algebroid structure on the trivial rank-`r` bundle over a chart.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebroidData {
    pub chart: Chart,
    pub rank: usize,
    /// `anchor[i][α] = ρⁱ_α`.
    pub anchor: Matrix,
    /// `structure[rank(α,β)][γ] = c^γ_{αβ}` for `α < β`.
    pub structure: Vec<Vec<Scalar>>,
    /// Frame names used in reports, e.g. `u1, u2`.
    pub frame_names: Vec<String>,
}

impl AlgebroidData {
    pub fn new(chart: &Chart, rank: usize, anchor: Matrix, structure: Vec<Vec<Scalar>>) -> Result<AlgebroidData, AlgebroidError> {
        let n = chart.dim();
        if anchor.len() != n || anchor.iter().any(|r| r.len() != rank) {
            return Err(AlgebroidError::Shape(format!("anchor must be {n}×{rank}")));
        }
        if structure.len() != binomial(rank, 2) || structure.iter().any(|c| c.len() != rank) {
            return Err(AlgebroidError::Shape(format!(
                "structure functions must list {} pairs of {rank} components",
                binomial(rank, 2)
            )));
        }
        let frame_names = (1..=rank).map(|a| format!("u{a}")).collect();
        Ok(AlgebroidData { chart: chart.clone(), rank, anchor, structure, frame_names })
    }

    /// `TM` with the identity anchor and coordinate frame.
    pub fn tangent(chart: &Chart) -> AlgebroidData {
        let n = chart.dim();
        let mut a = AlgebroidData::new(chart, n, linalg::identity(n), vec![vec![Scalar::zero(); n]; binomial(n, 2)]).unwrap();
        a.frame_names = chart.coords().iter().map(|v| format!("∂{v}")).collect();
        a
    }

    pub fn with_frame_names(mut self, names: Vec<String>) -> AlgebroidData {
        assert_eq!(names.len(), self.rank);
        self.frame_names = names;
        self
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// `c^·_{αβ}` with antisymmetry applied.
    pub fn c(&self, a: usize, b: usize) -> Section {
        use std::cmp::Ordering::*;
        match a.cmp(&b) {
            Equal => vec![Scalar::zero(); self.rank],
            Less => self.structure[rank(self.rank, &[a, b])].clone(),
            Greater => self.structure[rank(self.rank, &[b, a])].iter().map(|x| -x).collect(),
        }
    }

    pub fn frame(&self, a: usize) -> Section {
        (0..self.rank).map(|b| if a == b { Scalar::one() } else { Scalar::zero() }).collect()
    }

    /// `ρ(a)` as a vector field's components.
    pub fn anchor_of(&self, a: &[Scalar]) -> Vec<Scalar> {
        linalg::mat_vec(&self.anchor, a)
    }

    /// Derivative of a function along `ρ(a)`.
    pub fn act(&self, a: &[Scalar], f: &Scalar) -> Scalar {
        let v = self.anchor_of(a);
        v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| x * &f.diff(self.chart.coord(i))).sum()
    }

    /// `[a,b]^γ = a^α b^β c^γ_{αβ} + ρ(a)(b^γ) − ρ(b)(a^γ)`.
    pub fn bracket(&self, a: &[Scalar], b: &[Scalar]) -> Section {
        let r = self.rank;
        let mut out: Section = (0..r).map(|g| &self.act(a, &b[g]) - &self.act(b, &a[g])).collect();
        for (p, pair) in subsets(r, 2).iter().enumerate() {
            let (al, be) = (pair[0], pair[1]);
            let w = &(&a[al] * &b[be]) - &(&a[be] * &b[al]);
            if w.is_zero() {
                continue;
            }
            for g in 0..r {
                if !self.structure[p][g].is_zero() {
                    out[g] = &out[g] + &(&w * &self.structure[p][g]);
                }
            }
        }
        out
    }

    pub fn anchor_tensor(&self) -> Result<VVForm, AlgebroidError> {
        if self.rank != self.dim() {
            return Err(AlgebroidError::Shape("anchor is a (1,1) tensor only when rank = dim".into()));
        }
        Ok(VVForm::from_matrix(&self.chart, &self.anchor)?)
    }

    fn section_entries<'a>(&self, label: &str, s: &'a [Scalar]) -> Vec<(String, &'a Scalar)> {
        s.iter().enumerate().map(|(g, e)| (format!("{label} {}", self.frame_names[g]), e)).collect()
    }

    pub fn verify_section_zero(&self, s: &[Scalar], cfg: &VerifyConfig) -> VerificationResult {
        all_zero(self.section_entries("component", s), cfg)
    }
}

/// Bundle map `U: TM → A`, `u[α][i] = U^α_i`. The same shape stores
/// A-valued 1-forms.
#[derive(Clone, Debug, PartialEq)]
pub struct BundleMapU {
    pub chart: Chart,
    pub rank: usize,
    pub u: Matrix,
}

impl BundleMapU {
    pub fn new(chart: &Chart, rank: usize, u: Matrix) -> Result<BundleMapU, AlgebroidError> {
        if u.len() != rank || u.iter().any(|r| r.len() != chart.dim()) {
            return Err(AlgebroidError::Shape(format!("bundle map must be {rank}×{}", chart.dim())));
        }
        Ok(BundleMapU { chart: chart.clone(), rank, u })
    }

    pub fn zero(chart: &Chart, rank: usize) -> BundleMapU {
        BundleMapU { chart: chart.clone(), rank, u: linalg::zeros(rank, chart.dim()) }
    }

    pub fn identity(chart: &Chart) -> BundleMapU {
        BundleMapU { chart: chart.clone(), rank: chart.dim(), u: linalg::identity(chart.dim()) }
    }

    /// `U(∂ᵢ)`.
    pub fn column(&self, i: usize) -> Section {
        self.u.iter().map(|r| r[i].clone()).collect()
    }

    pub fn apply(&self, x: &[Scalar]) -> Section {
        linalg::mat_vec(&self.u, x)
    }

    pub fn sub(&self, o: &BundleMapU) -> BundleMapU {
        BundleMapU { chart: self.chart.clone(), rank: self.rank, u: linalg::mat_sub(&self.u, &o.u) }
    }

    pub fn is_zero(&self) -> bool {
        self.u.iter().flatten().all(|e| e.is_zero())
    }

    pub fn verify_zero(&self, cfg: &VerifyConfig) -> VerificationResult {
        let mut entries = Vec::new();
        for (a, row) in self.u.iter().enumerate() {
            for (i, e) in row.iter().enumerate() {
                entries.push((format!("d{} ⊗ u{}", self.chart.coord(i), a + 1), e));
            }
        }
        all_zero(entries, cfg)
    }
}

/// A-valued 2-form: `table[rank(i,j)]` is the section assigned to
/// `(∂ᵢ, ∂ⱼ)`, `i < j`.
#[derive(Clone, Debug, PartialEq)]
pub struct AValued2Form {
    pub chart: Chart,
    pub rank: usize,
    pub table: Vec<Section>,
}

impl AValued2Form {
    pub fn value(&self, i: usize, j: usize) -> Section {
        use std::cmp::Ordering::*;
        let n = self.chart.dim();
        match i.cmp(&j) {
            Equal => vec![Scalar::zero(); self.rank],
            Less => self.table[rank(n, &[i, j])].clone(),
            Greater => self.table[rank(n, &[j, i])].iter().map(|x| -x).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().flatten().all(|e| e.is_zero())
    }

    pub fn verify_zero(&self, cfg: &VerifyConfig) -> VerificationResult {
        let n = self.chart.dim();
        let mut entries = Vec::new();
        for (p, pair) in subsets(n, 2).iter().enumerate() {
            for (g, e) in self.table[p].iter().enumerate() {
                let c = &self.chart;
                entries.push((format!("d{}∧d{} ⊗ u{}", c.coord(pair[0]), c.coord(pair[1]), g + 1), e));
            }
        }
        all_zero(entries, cfg)
    }
}

/// Jacobi on frame triples and bracket preservation by the anchor on frame
/// pairs. Both defects are tensorial once the anchor preserves brackets,
/// so frame checks decide the axioms.
pub fn check_lie_algebroid(a: &AlgebroidData, cfg: &VerifyConfig) -> Report {
    let mut rep = Report::new("Lie algebroid axioms");
    let r = a.rank;
    for pair in subsets(r, 2) {
        let (x, y) = (pair[0], pair[1]);
        let lhs = a.anchor_of(&a.bracket(&a.frame(x), &a.frame(y)));
        let rhs = njk_tensorcalc::bracket_components(&a.chart, &a.anchor_of(&a.frame(x)), &a.anchor_of(&a.frame(y)));
        let diff: Vec<Scalar> = lhs.iter().zip(&rhs).map(|(p, q)| p - q).collect();
        let entries = diff.iter().enumerate().map(|(i, e)| (format!("∂{}", a.chart.coord(i)), e));
        rep.push(Check::identity(
            format!("anchor({},{})", a.frame_names[x], a.frame_names[y]),
            all_zero(entries, cfg),
        ));
    }
    for t in subsets(r, 3) {
        let (x, y, z) = (a.frame(t[0]), a.frame(t[1]), a.frame(t[2]));
        let j1 = a.bracket(&x, &a.bracket(&y, &z));
        let j2 = a.bracket(&y, &a.bracket(&z, &x));
        let j3 = a.bracket(&z, &a.bracket(&x, &y));
        let sum: Section = (0..r).map(|g| &(&j1[g] + &j2[g]) + &j3[g]).collect();
        rep.push(Check::identity(
            format!("jacobi({},{},{})", a.frame_names[t[0]], a.frame_names[t[1]], a.frame_names[t[2]]),
            a.verify_section_zero(&sum, cfg),
        ));
    }
    if r < 3 {
        rep.note(format!("rank {r}: Jacobi is automatic on frame triples"));
    }
    rep
}

/// `(TM)_N`: anchor `N`, coordinate frame, `c^k_{ij} = ∂ᵢNᵏ_j − ∂ⱼNᵏ_i`.
pub fn deformed_structure(n_: &VVForm) -> Result<AlgebroidData, AlgebroidError> {
    if n_.k != 1 {
        return Err(AlgebroidError::Shape("deformed structure needs a (1,1) tensor".into()));
    }
    let c = &n_.chart;
    let n = c.dim();
    let m = n_.matrix();
    let structure = subsets(n, 2)
        .iter()
        .map(|p| {
            let (i, j) = (p[0], p[1]);
            (0..n).map(|k| &m[k][j].diff(c.coord(i)) - &m[k][i].diff(c.coord(j))).collect()
        })
        .collect();
    let a = AlgebroidData::new(c, n, m, structure)?;
    let names = c.coords().iter().map(|v| format!("∂{v}")).collect();
    Ok(a.with_frame_names(names))
}

/// `(L^A_a ω)(X) = [a, ωX]_A − ω[ρ(a), X]` on coordinate fields, for an
/// A-valued 1-form ω (a bundle map `U` is the case ω = U).
pub fn algebroid_lie_derivative(a: &AlgebroidData, s: &[Scalar], w: &BundleMapU) -> Result<BundleMapU, AlgebroidError> {
    shapes(a, w)?;
    let n = a.dim();
    let ra = a.anchor_of(s);
    // [ρ(a), ∂ᵢ] = −∂ᵢ ρ(a)
    let mut out = linalg::zeros(a.rank, n);
    for i in 0..n {
        let br = a.bracket(s, &w.column(i));
        let dra: Vec<Scalar> = ra.iter().map(|x| x.diff(a.chart.coord(i))).collect();
        let corr = w.apply(&dra);
        for g in 0..a.rank {
            out[g][i] = &br[g] + &corr[g];
        }
    }
    Ok(BundleMapU { chart: a.chart.clone(), rank: a.rank, u: out })
}

/// `T^A_U(X,Y) = [UX,UY]_A + Uρ_AU[X,Y] − U[ρ_AUX,Y] − U[X,ρ_AUY]` on
/// coordinate pairs.
pub fn a_torsion(a: &AlgebroidData, u: &BundleMapU) -> Result<AValued2Form, AlgebroidError> {
    shapes(a, u)?;
    let c = &a.chart;
    let n = a.dim();
    let rho_u: Vec<Vec<Scalar>> = (0..n).map(|i| a.anchor_of(&u.column(i))).collect();
    let table = subsets(n, 2)
        .iter()
        .map(|p| {
            let (i, j) = (p[0], p[1]);
            let b = a.bracket(&u.column(i), &u.column(j));
            // −U[ρUX, ∂ⱼ] = U(∂ⱼ ρUX),  −U[∂ᵢ, ρUY] = −U(∂ᵢ ρUY)
            let t2: Vec<Scalar> = rho_u[i].iter().map(|x| x.diff(c.coord(j))).collect();
            let t3: Vec<Scalar> = rho_u[j].iter().map(|x| x.diff(c.coord(i))).collect();
            let (v2, v3) = (u.apply(&t2), u.apply(&t3));
            (0..a.rank).map(|g| &(&b[g] + &v2[g]) - &v3[g]).collect()
        })
        .collect();
    Ok(AValued2Form { chart: c.clone(), rank: a.rank, table })
}

pub(crate) fn shapes(a: &AlgebroidData, w: &BundleMapU) -> Result<(), AlgebroidError> {
    if w.chart != a.chart || w.rank != a.rank {
        return Err(AlgebroidError::Shape(format!(
            "bundle map on {:?} rank {} does not match algebroid on {:?} rank {}",
            w.chart, w.rank, a.chart, a.rank
        )));
    }
    Ok(())
}
