//! Coordinate formulas written once over a scalar type.
//!
//! [`Scalar`] is implemented for [`Expr`] (exact symbolic components) and for
//! [`Jet`] (Taylor expansions at a point). Christoffel symbols, curvature,
//! covariant and Lie derivatives below are shared by both.

use crate::jet::Jet;
use crate::symexpr::{rational_from_f64, Expr};

pub trait Scalar: Clone + Send + Sync {
    fn zero_like(&self) -> Self;
    fn constant_like(&self, x: f64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, x: f64) -> Self;
    fn recip(&self) -> Option<Self>;
    fn partial(&self, i: usize) -> Self;
    /// Exact (structural) zero.
    fn is_zero(&self) -> bool;
}

impl Scalar for Expr {
    fn zero_like(&self) -> Self {
        Expr::zero()
    }
    fn constant_like(&self, x: f64) -> Self {
        Expr::real(x)
    }
    fn add(&self, o: &Self) -> Self {
        Expr::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Expr::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Expr::mul(self, o)
    }
    fn neg(&self) -> Self {
        Expr::neg(self)
    }
    fn scale(&self, x: f64) -> Self {
        Expr::scale(self, rational_from_f64(x).expect("finite scale"))
    }
    fn recip(&self) -> Option<Self> {
        if Expr::is_zero(self) {
            None
        } else {
            Some(self.powi(-1))
        }
    }
    fn partial(&self, i: usize) -> Self {
        self.diff(i)
    }
    fn is_zero(&self) -> bool {
        Expr::is_zero(self)
    }
}

impl Scalar for Jet {
    fn zero_like(&self) -> Self {
        Jet::constant(self.space(), 0.0, self.order())
    }
    fn constant_like(&self, x: f64) -> Self {
        Jet::constant(self.space(), x, self.order())
    }
    fn add(&self, o: &Self) -> Self {
        Jet::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Jet::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Jet::mul(self, o)
    }
    fn neg(&self) -> Self {
        Jet::neg(self)
    }
    fn scale(&self, x: f64) -> Self {
        Jet::scale(self, x)
    }
    fn recip(&self) -> Option<Self> {
        Jet::recip(self)
    }
    fn partial(&self, i: usize) -> Self {
        Jet::partial(self, i)
    }
    fn is_zero(&self) -> bool {
        self.is_exact_zero()
    }
}

pub type Mat<S> = Vec<Vec<S>>;

fn sum<S: Scalar>(proto: &S, terms: impl IntoIterator<Item = S>) -> S {
    let mut acc: Option<S> = None;
    for t in terms {
        if t.is_zero() {
            continue;
        }
        acc = Some(match acc {
            None => t,
            Some(a) => a.add(&t),
        });
    }
    acc.unwrap_or_else(|| proto.zero_like())
}

fn product<S: Scalar>(a: &S, b: &S) -> S {
    if a.is_zero() || b.is_zero() {
        a.zero_like()
    } else {
        a.mul(b)
    }
}

/// Index groups that decouple: `i` and `j` share a group when `m[i][j]` is nonzero.
pub fn blocks<S: Scalar>(m: &Mat<S>) -> Vec<Vec<usize>> {
    let n = m.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in 0..n {
            if !m[i][j].is_zero() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups
}

/// Blockwise Gauss-Jordan inverse and determinant.
///
/// `weight` ranks candidate pivots (larger is better) and returns `None` for
/// entries that must not be used as pivots.
pub fn inverse_and_det<S: Scalar>(m: &Mat<S>, weight: &dyn Fn(&S) -> Option<f64>) -> Option<(Mat<S>, S)> {
    let n = m.len();
    let proto = m[0][0].clone();
    let mut inv: Mat<S> = vec![vec![proto.zero_like(); n]; n];
    let mut det = proto.constant_like(1.0);
    for group in blocks(m) {
        let k = group.len();
        let mut a: Mat<S> = group
            .iter()
            .map(|&i| group.iter().map(|&j| m[i][j].clone()).collect())
            .collect();
        let mut b: Mat<S> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| proto.constant_like(if i == j { 1.0 } else { 0.0 }))
                    .collect()
            })
            .collect();
        for col in 0..k {
            let mut best: Option<(usize, f64)> = None;
            for row in col..k {
                if a[row][col].is_zero() {
                    continue;
                }
                if let Some(w) = weight(&a[row][col]) {
                    if best.is_none_or(|(_, bw)| w > bw) {
                        best = Some((row, w));
                    }
                }
            }
            let (p, _) = best?;
            if p != col {
                a.swap(p, col);
                b.swap(p, col);
                det = det.neg();
            }
            let pivot = a[col][col].clone();
            det = det.mul(&pivot);
            let r = pivot.recip()?;
            for j in 0..k {
                a[col][j] = product(&a[col][j], &r);
                b[col][j] = product(&b[col][j], &r);
            }
            for row in 0..k {
                if row == col || a[row][col].is_zero() {
                    continue;
                }
                let f = a[row][col].clone();
                for j in 0..k {
                    if !a[col][j].is_zero() {
                        a[row][j] = a[row][j].sub(&f.mul(&a[col][j]));
                    }
                    if !b[col][j].is_zero() {
                        b[row][j] = b[row][j].sub(&f.mul(&b[col][j]));
                    }
                }
            }
        }
        for (bi, &i) in group.iter().enumerate() {
            for (bj, &j) in group.iter().enumerate() {
                inv[i][j] = b[bi][bj].clone();
            }
        }
    }
    Some((inv, det))
}

/// Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij), indexed `[k][i][j]`.
pub fn christoffel<S: Scalar>(g: &Mat<S>, ginv: &Mat<S>) -> Vec<Mat<S>> {
    let n = g.len();
    let proto = g[0][0].clone();
    let dg: Vec<Mat<S>> = (0..n)
        .map(|l| (0..n).map(|i| (0..n).map(|j| g[i][j].partial(l)).collect()).collect())
        .collect();
    // Lowered symbols Γ_{l,ij}.
    let mut low: Vec<Mat<S>> = vec![vec![vec![proto.zero_like(); n]; n]; n];
    for l in 0..n {
        for i in 0..n {
            for j in i..n {
                let v = dg[i][j][l].add(&dg[j][i][l]).sub(&dg[l][i][j]).scale(0.5);
                low[l][i][j] = v.clone();
                low[l][j][i] = v;
            }
        }
    }
    let mut gamma: Vec<Mat<S>> = vec![vec![vec![proto.zero_like(); n]; n]; n];
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let v = sum(&proto, (0..n).map(|l| product(&ginv[k][l], &low[l][i][j])));
                gamma[k][i][j] = v.clone();
                gamma[k][j][i] = v;
            }
        }
    }
    gamma
}

/// R^l_ijk = ∂_iΓ^l_jk − ∂_jΓ^l_ik + Γ^l_imΓ^m_jk − Γ^l_jmΓ^m_ik, indexed `[l][i][j][k]`.
pub fn riemann<S: Scalar>(gamma: &[Mat<S>]) -> Vec<Vec<Mat<S>>> {
    let n = gamma.len();
    let proto = gamma[0][0][0].clone();
    let dgamma: Vec<Vec<Mat<S>>> = (0..n)
        .map(|d| {
            (0..n)
                .map(|l| {
                    (0..n)
                        .map(|j| (0..n).map(|k| gamma[l][j][k].partial(d)).collect())
                        .collect()
                })
                .collect()
        })
        .collect();
    let zero = proto.partial_zero();
    let mut r = vec![vec![vec![vec![zero.clone(); n]; n]; n]; n];
    for l in 0..n {
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let quad = sum(
                        &zero,
                        (0..n).flat_map(|m| {
                            [
                                product(&gamma[l][i][m], &gamma[m][j][k]),
                                product(&gamma[l][j][m], &gamma[m][i][k]).neg(),
                            ]
                        }),
                    );
                    let v = dgamma[i][l][j][k].sub(&dgamma[j][l][i][k]).add(&quad);
                    r[l][j][i][k] = v.neg();
                    r[l][i][j][k] = v;
                }
            }
        }
    }
    r
}

/// Ric_jk = R^i_ijk.
pub fn ricci<S: Scalar>(riem: &[Vec<Mat<S>>]) -> Mat<S> {
    let n = riem.len();
    let zero = riem[0][0][0][0].zero_like();
    (0..n)
        .map(|j| {
            (0..n)
                .map(|k| sum(&zero, (0..n).map(|i| riem[i][i][j][k].clone())))
                .collect()
        })
        .collect()
}

pub fn trace<S: Scalar>(ginv: &Mat<S>, t: &Mat<S>) -> S {
    let n = t.len();
    let zero = t[0][0].zero_like();
    sum(
        &zero,
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| product(&ginv[i][j], &t[i][j])),
    )
}

/// Flat index of a multi-index in a tensor of rank `idx.len()`.
pub fn flat_index(n: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

pub fn multi_index(n: usize, rank: usize, mut flat: usize) -> Vec<usize> {
    let mut out = vec![0; rank];
    for slot in (0..rank).rev() {
        out[slot] = flat % n;
        flat /= n;
    }
    out
}

/// Covariant derivative of a tensor with `contra` upper indices followed by
/// `co` lower ones; the new lower index is appended last.
pub fn covariant_derivative<S: Scalar>(comps: &[S], n: usize, contra: usize, co: usize, gamma: &[Mat<S>]) -> Vec<S> {
    let rank = contra + co;
    let size = comps.len();
    let zero = gamma[0][0][0].zero_like();
    let mut out = Vec::with_capacity(size * n);
    for flat in 0..size {
        let idx = multi_index(n, rank, flat);
        for k in 0..n {
            let mut terms = vec![comps[flat].partial(k)];
            let mut probe = idx.clone();
            for slot in 0..rank {
                let orig = idx[slot];
                for m in 0..n {
                    probe[slot] = m;
                    let t = &comps[flat_index(n, &probe)];
                    if slot < contra {
                        terms.push(product(&gamma[orig][k][m], t));
                    } else {
                        terms.push(product(&gamma[m][k][orig], t).neg());
                    }
                }
                probe[slot] = orig;
            }
            out.push(sum(&zero, terms));
        }
    }
    out
}

/// (L_v g)_ij = v^k ∂_k g_ij + g_kj ∂_i v^k + g_ik ∂_j v^k.
pub fn lie_derivative_metric<S: Scalar>(v: &[S], g: &Mat<S>) -> Mat<S> {
    let n = g.len();
    let zero = g[0][0].zero_like();
    let dv: Mat<S> = (0..n).map(|k| (0..n).map(|i| v[k].partial(i)).collect()).collect();
    let mut out = vec![vec![zero.clone(); n]; n];
    for i in 0..n {
        for j in i..n {
            let terms = (0..n).flat_map(|k| {
                [
                    product(&v[k], &g[i][j].partial(k)),
                    product(&g[k][j], &dv[k][i]),
                    product(&g[i][k], &dv[k][j]),
                ]
            });
            let s = sum(&zero, terms);
            out[i][j] = s.clone();
            out[j][i] = s;
        }
    }
    out
}

trait PartialZero {
    fn partial_zero(&self) -> Self;
}

impl<S: Scalar> PartialZero for S {
    /// A zero of the order produced by one differentiation.
    fn partial_zero(&self) -> Self {
        self.partial(0).zero_like()
    }
}
