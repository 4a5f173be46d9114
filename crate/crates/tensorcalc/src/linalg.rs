//! Dense linear algebra over the field of symbolic scalars.
//!
//! Pivots are chosen by asking whether an entry vanishes identically, so
//! results hold generically: on the complement of the zero sets of the
//! pivots. Those pivots are returned so callers can report the locus.

use njk_symexpr::{is_zero, Scalar, VerifyConfig};

pub type Matrix = Vec<Vec<Scalar>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Scalar::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Scalar::one();
    }
    m
}

pub fn cols(m: &Matrix) -> usize {
    m.first().map_or(0, |r| r.len())
}

pub fn transpose(m: &Matrix) -> Matrix {
    (0..cols(m)).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let c = cols(b);
    a.iter()
        .map(|row| {
            (0..c)
                .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &Matrix, v: &[Scalar]) -> Vec<Scalar> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

pub fn mat_sub(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect()).collect()
}

pub fn mat_add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

pub fn mat_scale(a: &Matrix, c: &Scalar) -> Matrix {
    a.iter().map(|r| r.iter().map(|x| x * c).collect()).collect()
}

/// Whether `e` should be treated as a nonzero pivot. Rational entries are
/// decided exactly; entries with opaque atoms go through the configured
/// zero test and count as zero when the test says so.
pub fn nonzero(e: &Scalar, cfg: &VerifyConfig) -> bool {
    if e.is_zero() {
        return false;
    }
    if e.is_rational_fragment() {
        return true;
    }
    !is_zero(e, cfg).is_zero()
}

#[derive(Clone, Debug)]
pub struct Rref {
    pub m: Matrix,
    pub pivots: Vec<usize>,
    /// Non-constant pivot values met during elimination.
    pub pivot_values: Vec<Scalar>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Human-readable list of the pivot values that must not vanish.
    pub fn locus(&self) -> Vec<String> {
        let mut out: Vec<String> = self.pivot_values.iter().map(|p| p.to_string()).collect();
        out.sort();
        out.dedup();
        out
    }
}

pub fn rref(m: &Matrix, cfg: &VerifyConfig) -> Rref {
    let mut m = m.clone();
    let rows = m.len();
    let ncols = cols(&m);
    let mut pivots = Vec::new();
    let mut pivot_values = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows {
            break;
        }
        // prefer constant pivots, then the first usable one
        let cands: Vec<usize> = (r..rows).filter(|&i| nonzero(&m[i][c], cfg)).collect();
        let Some(&p) = cands.iter().find(|&&i| m[i][c].as_rational().is_some()).or(cands.first()) else {
            continue;
        };
        m.swap(r, p);
        let piv = m[r][c].clone();
        if piv.as_rational().is_none() {
            pivot_values.push(piv.clone());
        }
        let inv = piv.recip().expect("pivot is nonzero");
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..ncols {
                    let sub = &f * &m[r][j];
                    m[i][j] = &m[i][j] - &sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    Rref { m, pivots, pivot_values }
}

pub fn rank(m: &Matrix, cfg: &VerifyConfig) -> usize {
    rref(m, cfg).rank()
}

/// Basis of the right kernel, one vector per free column.
pub fn nullspace(m: &Matrix, cfg: &VerifyConfig) -> (Vec<Vec<Scalar>>, Rref) {
    let red = rref(m, cfg);
    let n = cols(m);
    let mut basis = Vec::new();
    for f in (0..n).filter(|c| !red.pivots.contains(c)) {
        let mut v = vec![Scalar::zero(); n];
        v[f] = Scalar::one();
        for (row, &pc) in red.pivots.iter().enumerate() {
            v[pc] = -&red.m[row][f];
        }
        basis.push(v);
    }
    (basis, red)
}

/// Solves `a · x = b` for a matrix right-hand side; `None` when the system
/// is inconsistent or underdetermined.
pub fn solve(a: &Matrix, b: &Matrix, cfg: &VerifyConfig) -> Option<Matrix> {
    let n = cols(a);
    let k = cols(b);
    let aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(r, s)| r.iter().chain(s.iter()).cloned().collect())
        .collect();
    let red = rref(&aug, cfg);
    if red.pivots.iter().any(|&p| p >= n) || red.pivots.len() != n {
        return None;
    }
    Some((0..n).map(|i| red.m[i][n..n + k].to_vec()).collect())
}

pub fn inverse(a: &Matrix, cfg: &VerifyConfig) -> Option<Matrix> {
    if a.len() != cols(a) {
        return None;
    }
    solve(a, &identity(a.len()), cfg)
}

/// Determinant by cofactor expansion along the first row; chart
/// dimensions are small.
pub fn det(a: &Matrix) -> Scalar {
    let n = a.len();
    match n {
        0 => Scalar::one(),
        1 => a[0][0].clone(),
        _ => {
            let mut acc = Scalar::zero();
            for j in 0..n {
                if a[0][j].is_zero() {
                    continue;
                }
                let minor: Matrix = a[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let t = &a[0][j] * &det(&minor);
                acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use njk_symexpr::parse;

    fn m(rows: &[&[&str]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|s| parse(s).unwrap()).collect()).collect()
    }

    #[test]
    fn inverse_of_symbolic_matrix() {
        let cfg = VerifyConfig::default();
        let a = m(&[&["x", "1"], &["0", "y"]]);
        let inv = inverse(&a, &cfg).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
        assert_eq!(det(&a), parse("x*y").unwrap());
    }

    #[test]
    fn nullspace_and_locus() {
        let cfg = VerifyConfig::default();
        let a = m(&[&["x", "y", "0"]]);
        let (ns, red) = nullspace(&a, &cfg);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(mat_vec(&a, v)[0].is_zero());
        }
        assert_eq!(red.locus(), vec!["x".to_string()]);
    }

    #[test]
    fn singular_has_no_inverse() {
        let cfg = VerifyConfig::default();
        assert!(inverse(&m(&[&["x", "x"], &["1", "1"]]), &cfg).is_none());
    }
}
