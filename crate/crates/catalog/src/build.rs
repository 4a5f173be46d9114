use njk_symexpr::Scalar;
use njk_tensorcalc::linalg::Matrix;
use njk_tensorcalc::{Chart, SmoothMap, TensorError, VVForm};

/// `prefix1, …, prefixN`.
pub fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn vars(names: &[String]) -> Vec<Scalar> {
    names.iter().map(|n| Scalar::named(n)).collect()
}

pub fn zeros(n: usize) -> Vec<Scalar> {
    vec![Scalar::zero(); n]
}

pub fn neg(v: &[Scalar]) -> Vec<Scalar> {
    v.iter().map(|x| -x).collect()
}

pub fn add(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn cat(parts: &[&[Scalar]]) -> Vec<Scalar> {
    parts.iter().flat_map(|p| p.iter().cloned()).collect()
}

pub fn chart(name: &str, groups: &[&[String]]) -> Result<Chart, TensorError> {
    let all: Vec<&String> = groups.iter().flat_map(|g| g.iter()).collect();
    Chart::new(name, &all)
}

pub fn map(src: &Chart, tgt: &Chart, parts: &[&[Scalar]]) -> Result<SmoothMap, TensorError> {
    SmoothMap::new(src, tgt, cat(parts))
}

/// Sum of `c · d(from)⊗∂(to)` terms given by coordinate indices.
pub fn tensor(chart: &Chart, terms: &[(usize, usize, Scalar)]) -> Result<VVForm, TensorError> {
    let n = chart.dim();
    let mut m: Matrix = vec![vec![Scalar::zero(); n]; n];
    for (from, to, c) in terms {
        m[*to][*from] = &m[*to][*from] + c;
    }
    VVForm::from_matrix(chart, &m)
}
