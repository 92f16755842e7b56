use crate::error::{Error, Result};

/// ϑ(u) = Σ_{α<β} u_α(u_β + 1) mod 2.
pub fn theta_sign(u: &[usize]) -> bool {
    let mut s = 0usize;
    for b in 1..u.len() {
        let w = u[b] + 1;
        for a in &u[..b] {
            s += a * w;
        }
    }
    s & 1 == 1
}

/// Compositions of `n` into exactly `k` positive parts, in lexicographic order.
pub fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fill(n, k, &mut cur, &mut out);
    out
}

fn fill(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k == 0 {
        if n == 0 {
            out.push(cur.clone());
        }
        return;
    }
    if n < k {
        return;
    }
    for first in 1..=n - k + 1 {
        cur.push(first);
        fill(n - first, k - 1, cur, out);
        cur.pop();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexKind {
    A,
    B,
    C,
    D,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum IndexTuple {
    /// k + l = n + 1, slot i.
    A { k: usize, l: usize, i: usize },
    /// A composition r of n into k = r.len() ≥ 2 parts.
    B { r: Vec<usize> },
    /// Outer arity k, branch position i, block sizes r₁…r_i with Σr + k − i = n.
    C { k: usize, i: usize, r: Vec<usize> },
    /// Outer arity k; r is a composition of i − 1 into k − (n − i + 1) parts.
    D { k: usize, r: Vec<usize> },
}

/// Exact enumeration of the four index sets, in lexicographic order.
pub fn enumerate_index_set(kind: IndexKind, n: usize, i: Option<usize>) -> Result<Vec<IndexTuple>> {
    if n == 0 {
        return Err(Error::Input("index sets need n ≥ 1".into()));
    }
    match (kind, i) {
        (IndexKind::D, None) => return Err(Error::Input("set D needs the fixed integer i".into())),
        (IndexKind::D, Some(i)) if i == 0 || i > n => {
            return Err(Error::Input(format!("i = {i} outside 1..={n}")))
        }
        (IndexKind::A | IndexKind::B | IndexKind::C, Some(_)) => {
            return Err(Error::Input("only set D takes i".into()))
        }
        _ => {}
    }
    let mut out = Vec::new();
    match kind {
        IndexKind::A => {
            for k in 2..=n.saturating_sub(1) {
                let l = n + 1 - k;
                if l < 2 {
                    continue;
                }
                for i in 1..=k {
                    out.push(IndexTuple::A { k, l, i });
                }
            }
        }
        IndexKind::B => {
            for k in 2..=n {
                for r in compositions(n, k) {
                    out.push(IndexTuple::B { r });
                }
            }
        }
        IndexKind::C => {
            for k in 2..=n {
                for i in 1..=k {
                    for r in compositions(n - (k - i), i) {
                        out.push(IndexTuple::C { k, i, r });
                    }
                }
            }
        }
        IndexKind::D => {
            let i = i.expect("checked above");
            let tail = n - i + 1;
            for c in 0..i {
                let k = c + tail;
                if k < 2 {
                    continue;
                }
                for r in compositions(i - 1, c) {
                    out.push(IndexTuple::D { k, r });
                }
            }
        }
    }
    Ok(out)
}

/// Set A extended by the k = 1 terms (l = n), used where a morphism or homotopy
/// component precomposes with μ_n.
pub fn index_set_a_with_unary(n: usize) -> Vec<(usize, usize, usize)> {
    let mut out: Vec<(usize, usize, usize)> = Vec::new();
    if n >= 2 {
        out.push((1, n, 1));
    }
    for t in enumerate_index_set(IndexKind::A, n, None).unwrap_or_default() {
        if let IndexTuple::A { k, l, i } = t {
            out.push((k, l, i));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_values() {
        assert!(!theta_sign(&[3, 1, 3]));
        assert!(theta_sign(&[1, 2]));
        assert!(!theta_sign(&[]));
        assert!(!theta_sign(&[5]));
        assert!(!theta_sign(&[2, 1]));
        assert!(!theta_sign(&[1, 1, 1]));
    }

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(4, 2), vec![vec![1, 3], vec![2, 2], vec![3, 1]]);
        assert_eq!(compositions(0, 0), vec![Vec::<usize>::new()]);
        assert!(compositions(2, 3).is_empty());
    }

    #[test]
    fn index_set_sizes() {
        let a = |n| enumerate_index_set(IndexKind::A, n, None).unwrap().len();
        let b = |n| enumerate_index_set(IndexKind::B, n, None).unwrap().len();
        let c = |n| enumerate_index_set(IndexKind::C, n, None).unwrap().len();
        assert_eq!((a(3), a(4)), (2, 5));
        assert_eq!((b(3), b(4)), (3, 7));
        assert_eq!(c(2), 2);
        assert!(enumerate_index_set(IndexKind::D, 3, None).is_err());
        assert!(enumerate_index_set(IndexKind::D, 3, Some(4)).is_err());
    }

    #[test]
    fn set_d_small_cases() {
        let d = |n, i| enumerate_index_set(IndexKind::D, n, Some(i)).unwrap();
        assert_eq!(d(2, 1), vec![IndexTuple::D { k: 2, r: vec![] }]);
        assert_eq!(d(2, 2), vec![IndexTuple::D { k: 2, r: vec![1] }]);
        assert_eq!(d(3, 3), vec![IndexTuple::D { k: 2, r: vec![2] }, IndexTuple::D { k: 3, r: vec![1, 1] }]);
    }
}
