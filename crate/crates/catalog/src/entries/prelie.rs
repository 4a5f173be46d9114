use njk_algebroid::{AlgebroidData, BundleMapU};
use njk_groupoid::{GroupoidPresentation, TripleChart};
use njk_symexpr::Scalar;
use njk_tensorcalc::linalg::{self, Matrix};
use njk_tensorcalc::{Chart, VVForm};

use crate::build::{add, chart, map, names, neg, vars, zeros};
use crate::{CatalogEntry, CatalogError, Expected, Polarity, Quantity, SideCondition};

/// Structure constants of a product `▷` on `ℝᵈ`: `c[i][j][k]` is the
/// `e_k` component of `e_i ▷ e_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct PreLie {
    pub dim: usize,
    pub c: Vec<Vec<Vec<Scalar>>>,
}

impl PreLie {
    pub fn new(dim: usize, c: Vec<Vec<Vec<Scalar>>>) -> Result<PreLie, CatalogError> {
        if c.len() != dim || c.iter().any(|r| r.len() != dim || r.iter().any(|v| v.len() != dim)) {
            return Err(CatalogError::Parameter(format!("structure constants must be {dim}×{dim}×{dim}")));
        }
        Ok(PreLie { dim, c })
    }

    /// `e₁ ▷ e₁ = e₂`, all other products zero.
    pub fn nilpotent_2d() -> PreLie {
        let mut c = vec![vec![vec![Scalar::zero(); 2]; 2]; 2];
        c[0][0][1] = Scalar::one();
        PreLie { dim: 2, c }
    }

    pub fn product(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        (0..self.dim)
            .map(|k| {
                let mut acc = Scalar::zero();
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        if !self.c[i][j][k].is_zero() {
                            acc = &acc + &(&(&a[i] * &b[j]) * &self.c[i][j][k]);
                        }
                    }
                }
                acc
            })
            .collect()
    }

    fn basis(&self, i: usize) -> Vec<Scalar> {
        (0..self.dim).map(|k| if k == i { Scalar::one() } else { Scalar::zero() }).collect()
    }

    /// `(a▷b)▷c − a▷(b▷c)`.
    pub fn associator(&self, a: &[Scalar], b: &[Scalar], c: &[Scalar]) -> Vec<Scalar> {
        let l = self.product(&self.product(a, b), c);
        let r = self.product(a, &self.product(b, c));
        l.iter().zip(&r).map(|(x, y)| x - y).collect()
    }

    /// Commutator constants `[e_i, e_j]_▷` for `i < j`, in pair order.
    pub fn commutator(&self) -> Vec<Vec<Scalar>> {
        let d = self.dim;
        let mut out = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                out.push((0..d).map(|k| &self.c[i][j][k] - &self.c[j][i][k]).collect());
            }
        }
        out
    }

    /// Matrix of `L(a) = a ▷ −`.
    pub fn left_mult(&self, a: &[Scalar]) -> Matrix {
        let d = self.dim;
        (0..d)
            .map(|k| (0..d).map(|j| (0..d).map(|i| &a[i] * &self.c[i][j][k]).sum()).collect())
            .collect()
    }
}

/// Linear Nijenhuis operator `N a↑_x = −a ▷ x` on `𝔞`, the action
/// algebroid `𝔞_Lie ⋉ 𝔞` and, when `𝔞_Lie` is abelian and `L` nilpotent,
/// the action groupoid with the polynomial action `𝓛_g = exp(−L(g))`.
pub fn prelie(alg: &PreLie) -> Result<CatalogEntry, CatalogError> {
    let d = alg.dim;
    if d == 0 {
        return Err(CatalogError::Parameter("dimension must be at least 1".into()));
    }
    let mut side_conditions = Vec::new();
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let (ea, eb, ec) = (alg.basis(a), alg.basis(b), alg.basis(c));
                let l = alg.associator(&ea, &eb, &ec);
                let r = alg.associator(&eb, &ea, &ec);
                for k in 0..d {
                    let defect = &l[k] - &r[k];
                    if !defect.is_zero() && defect.free_vars().is_empty() {
                        return Err(CatalogError::Rejected(format!(
                            "associator not symmetric at (e{}, e{}, e{}), component e{}: {defect}",
                            a + 1,
                            b + 1,
                            c + 1,
                            k + 1
                        )));
                    }
                    side_conditions.push(SideCondition {
                        name: format!("pre-Lie axiom (e{}, e{}, e{}) e{}", a + 1, b + 1, c + 1, k + 1),
                        expr: defect,
                    });
                }
            }
        }
    }

    let xn = names("x", d);
    let x = vars(&xn);
    let m = Chart::new("a", &xn)?;
    // N(∂_a) = −e_a ▷ x
    let mut nm = linalg::zeros(d, d);
    for a in 0..d {
        let col = alg.product(&alg.basis(a), &x);
        for k in 0..d {
            nm[k][a] = -&col[k];
        }
    }
    let n = VVForm::from_matrix(&m, &nm)?;
    let structure = alg.commutator();
    let action = AlgebroidData::new(&m, d, nm.clone(), structure.clone())?
        .with_frame_names((1..=d).map(|a| format!("c{a}")).collect());

    let mut entry = CatalogEntry {
        name: "prelie".into(),
        summary: "linear Nijenhuis operator of a pre-Lie algebra and its action algebroid".into(),
        params: vec![("dim".into(), d.to_string()), ("products".into(), describe(alg))],
        generic: vec![],
        polarity: Polarity::Positive,
        presentation: None,
        algebroid: Some(action),
        u: Some(BundleMapU::identity(&m)),
        nijenhuis: Some(n.clone()),
        expected: vec![Expected { quantity: Quantity::Nijenhuis, tensor: n.clone() }],
        side_conditions,
        sampled: false,
    };

    let abelian = structure.iter().flatten().all(Scalar::is_zero);
    let gn = names("g", d);
    let g = vars(&gn);
    let lg = alg.left_mult(&g);
    let Some(action_map) = exp_neg_nilpotent(&lg) else { return Ok(entry) };
    if !abelian {
        return Ok(entry);
    }
    let (hn, kn) = (names("h", d), names("k", d));
    let (h, k) = (vars(&hn), vars(&kn));
    let act = |mat: &Matrix, v: &[Scalar]| linalg::mat_vec(mat, v);
    let subst = |mat: &Matrix, from: &[String], to: &[Scalar]| -> Matrix {
        let sub = from.iter().zip(to).map(|(n, v)| (njk_symexpr::Var::new(n), v.clone())).collect();
        mat.iter().map(|r| r.iter().map(|e| e.substitute(&sub)).collect()).collect()
    };
    let l_h = subst(&action_map, &gn, &h);
    let l_k = subst(&action_map, &gn, &k);
    let lx = act(&action_map, &x);
    let o = zeros(d);

    let big = chart("Gxa", &[&gn, &xn])?;
    let g2 = chart("Gxa2", &[&gn, &hn, &xn])?;
    let g3 = chart("Gxa3", &[&gn, &hn, &kn, &xn])?;
    let pres = GroupoidPresentation {
        name: format!("action groupoid G ⋉ 𝔞, {}", describe(alg)),
        s: map(&big, &m, &[&x])?,
        t: map(&big, &m, &[&lx])?,
        u: map(&m, &big, &[&o, &x])?,
        i: map(&big, &big, &[&neg(&g), &lx])?,
        p1: map(&g2, &big, &[&g, &act(&l_h, &x)])?,
        p2: map(&g2, &big, &[&h, &x])?,
        mult: map(&g2, &big, &[&add(&g, &h), &x])?,
        left_unit: map(&big, &g2, &[&o, &g, &x])?,
        right_unit: map(&big, &g2, &[&g, &o, &x])?,
        inverse_pair: map(&big, &g2, &[&g, &neg(&g), &lx])?,
        g3: Some(TripleChart {
            q12: map(&g3, &g2, &[&g, &h, &act(&l_k, &x)])?,
            q23: map(&g3, &g2, &[&h, &k, &x])?,
            left: map(&g3, &g2, &[&add(&g, &h), &k, &x])?,
            right: map(&g3, &g2, &[&g, &add(&h, &k), &x])?,
            chart: g3,
        }),
        g: big.clone(),
        m: m.clone(),
        g2,
    };

    // tangent vectors (→ξ, a↑) at (g, x); →ξ = ∂_ξ for an abelian group and
    // ad_g = 𝕀. →U = (𝓛_g a − ξ ▷ 𝓛_g x, 0), ←U = (−a, −a ▷ x).
    let mut right = linalg::zeros(2 * d, 2 * d);
    let mut left = linalg::zeros(2 * d, 2 * d);
    for b in 0..d {
        let xi_col = alg.product(&alg.basis(b), &lx);
        for r in 0..d {
            right[r][b] = -&xi_col[r];
            right[r][d + b] = action_map[r][b].clone();
            left[r][d + b] = if r == b { Scalar::int(-1) } else { Scalar::zero() };
            left[d + r][d + b] = nm[r][b].clone();
        }
    }
    let right = VVForm::from_matrix(&big, &right)?;
    let left = VVForm::from_matrix(&big, &left)?;
    let delta = right.add(&left)?;

    // 𝓛_g(e_i ▷ e_j) = e_i ▷ 𝓛_g e_j
    for i in 0..d {
        for j in 0..d {
            let lhs = act(&action_map, &alg.product(&alg.basis(i), &alg.basis(j)));
            let rhs = alg.product(&alg.basis(i), &act(&action_map, &alg.basis(j)));
            for c in 0..d {
                entry.side_conditions.push(SideCondition {
                    name: format!("equivariance (e{}, e{}) e{}", i + 1, j + 1, c + 1),
                    expr: &lhs[c] - &rhs[c],
                });
            }
        }
    }
    entry.presentation = Some(pres);
    entry.expected = vec![
        Expected { quantity: Quantity::RightLift, tensor: right },
        Expected { quantity: Quantity::LeftLift, tensor: left },
        Expected { quantity: Quantity::DeltaU, tensor: delta },
        Expected { quantity: Quantity::Nijenhuis, tensor: n },
    ];
    entry.summary = "linear Nijenhuis operator of a pre-Lie algebra, its action algebroid and action groupoid".into();
    Ok(entry)
}

/// `exp(−L)` when `L` is nilpotent, by the finite series.
fn exp_neg_nilpotent(l: &Matrix) -> Option<Matrix> {
    let d = l.len();
    let mut out = linalg::identity(d);
    let mut power = linalg::identity(d);
    let mut fact = 1i64;
    for m in 1..=d {
        power = linalg::mat_mul(&power, &linalg::mat_scale(l, &Scalar::int(-1)));
        fact *= m as i64;
        out = linalg::mat_add(&out, &linalg::mat_scale(&power, &Scalar::ratio(1, fact)));
    }
    let next = linalg::mat_mul(&power, l);
    next.iter().flatten().all(Scalar::is_zero).then_some(out)
}

fn describe(alg: &PreLie) -> String {
    let mut parts = Vec::new();
    for i in 0..alg.dim {
        for j in 0..alg.dim {
            let v: Vec<Scalar> = (0..alg.dim).map(|k| alg.c[i][j][k].clone()).collect();
            if v.iter().all(Scalar::is_zero) {
                continue;
            }
            let terms: Vec<String> = v
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| if c.is_one() { format!("e{}", k + 1) } else { format!("({c})*e{}", k + 1) })
                .collect();
            parts.push(format!("e{}▷e{} = {}", i + 1, j + 1, terms.join(" + ")));
        }
    }
    if parts.is_empty() {
        "all products zero".into()
    } else {
        parts.join(", ")
    }
}
