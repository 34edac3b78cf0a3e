//! Dense F₂ linear algebra on bit-packed rows.
//!
//! Everything here is exact arithmetic mod 2: rank and kernel by Gaussian
//! elimination, linear solves, and homology of a two-map complex
//! `V_in --d_in--> V --d_out--> V_out` as dim ker(d_out) − rank(d_in)
//! together with coset representatives.

use crate::error::{Error, Result};

/// A bit vector of fixed length, packed into 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> BitVec {
        BitVec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if v {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len);
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    /// Index of the lowest set bit, if any.
    pub fn leading(&self) -> Option<usize> {
        for (k, w) in self.words.iter().enumerate() {
            if *w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|i| self.get(*i))
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, iter: I) -> BitVec {
        let mut v = BitVec::zeros(len);
        for i in iter {
            let cur = v.get(i);
            v.set(i, !cur); // mod-2 semantics
        }
        v
    }
}

/// A rows × cols matrix over F₂. Rows index the output space of the linear
/// map, columns the input space, so the matrix acts on column vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>, // one BitVec per row
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> F2Matrix {
        F2Matrix {
            rows,
            cols,
            data: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> F2Matrix {
        let mut m = F2Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.data[r].set(c, v);
    }

    pub fn toggle(&mut self, r: usize, c: usize) {
        let cur = self.get(r, c);
        self.set(r, c, !cur);
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.data[r].ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.cols);
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            let mut parity = 0u64;
            for (w, o) in self.data[r].words.iter().zip(&v.words) {
                parity ^= w & o;
            }
            out.set(r, parity.count_ones() % 2 == 1);
        }
        out
    }

    pub fn compose(&self, inner: &F2Matrix) -> F2Matrix {
        assert_eq!(self.cols, inner.rows);
        let mut out = F2Matrix::zeros(self.rows, inner.cols);
        let inner_t = inner.transpose();
        for r in 0..self.rows {
            for c in 0..inner.cols {
                let mut parity = 0u64;
                for (w, o) in self.data[r].words.iter().zip(&inner_t.data[c].words) {
                    parity ^= w & o;
                }
                if parity.count_ones() % 2 == 1 {
                    out.set(r, c, true);
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_zero())
    }

    /// Row-reduce a copy; returns (pivot column per reduced row, reduced rows).
    fn eliminate(&self) -> (Vec<usize>, Vec<BitVec>) {
        let mut rows: Vec<BitVec> = self.data.clone();
        let mut pivots: Vec<usize> = Vec::new();
        let mut reduced: Vec<BitVec> = Vec::new();
        for col in 0..self.cols {
            let mut pivot_row = None;
            for (i, row) in rows.iter().enumerate() {
                if row.get(col) && row.leading() == Some(col) {
                    pivot_row = Some(i);
                    break;
                }
            }
            // If no row leads at this column, skip (rows were kept reduced so
            // leading() is accurate).
            let Some(i) = pivot_row else { continue };
            let piv = rows.swap_remove(i);
            for row in rows.iter_mut() {
                if row.get(col) {
                    row.xor_assign(&piv);
                }
            }
            for row in reduced.iter_mut() {
                if row.get(col) {
                    row.xor_assign(&piv);
                }
            }
            pivots.push(col);
            reduced.push(piv);
        }
        (pivots, reduced)
    }
}

/// Rank over F₂.
pub fn f2_rank(m: &F2Matrix) -> usize {
    m.eliminate().0.len()
}

/// A basis of the kernel (null space) of the matrix, acting on column vectors.
pub fn f2_kernel(m: &F2Matrix) -> Vec<BitVec> {
    // Eliminate the transpose: rows of m^T are columns of m, so column
    // relations of m are row relations of m^T tracked with an augmented
    // identity block.
    let t = m.transpose();
    let n = m.cols;
    let mut rows: Vec<(BitVec, BitVec)> = (0..n)
        .map(|i| {
            let mut tag = BitVec::zeros(n);
            tag.set(i, true);
            (t.data[i].clone(), tag)
        })
        .collect();
    let mut kernel = Vec::new();
    let mut reduced: Vec<(BitVec, BitVec)> = Vec::new();
    for (mut row, mut tag) in rows.drain(..) {
        loop {
            let Some(lead) = row.leading() else {
                kernel.push(tag);
                break;
            };
            if let Some((prow, ptag)) = reduced.iter().find(|(p, _)| p.leading() == Some(lead)) {
                let (prow, ptag) = (prow.clone(), ptag.clone());
                row.xor_assign(&prow);
                tag.xor_assign(&ptag);
            } else {
                reduced.push((row, tag));
                break;
            }
        }
    }
    kernel
}

/// Solve `m x = b`; returns one solution if consistent.
pub fn f2_solve(m: &F2Matrix, b: &BitVec) -> Option<BitVec> {
    assert_eq!(b.len(), m.rows);
    // Eliminate rows of [m^T | e_i]-style augmented system in column space:
    // work with rows (column vectors of m) to express b as a combination.
    let t = m.transpose();
    let n = m.cols;
    let mut reduced: Vec<(BitVec, BitVec)> = Vec::new(); // (column vector, combination tag)
    for i in 0..n {
        let mut row = t.data[i].clone();
        let mut tag = BitVec::zeros(n);
        tag.set(i, true);
        while let Some(lead) = row.leading() {
            if let Some((prow, ptag)) = reduced.iter().find(|(p, _)| p.leading() == Some(lead)) {
                let (prow, ptag) = (prow.clone(), ptag.clone());
                row.xor_assign(&prow);
                tag.xor_assign(&ptag);
            } else {
                reduced.push((row, tag));
                break;
            }
        }
    }
    let mut rem = b.clone();
    let mut sol = BitVec::zeros(n);
    loop {
        let Some(lead) = rem.leading() else {
            return Some(sol);
        };
        let (prow, ptag) = reduced.iter().find(|(p, _)| p.leading() == Some(lead))?;
        let (prow, ptag) = (prow.clone(), ptag.clone());
        rem.xor_assign(&prow);
        sol.xor_assign(&ptag);
    }
}

/// Homology of `V_in --d_in--> V --d_out--> V_out`: dimension and coset
/// representatives (cycles completing a basis of the boundary space).
///
/// Rejects inputs whose composite is nonzero.
pub fn f2_homology(d_in: &F2Matrix, d_out: &F2Matrix) -> Result<(usize, Vec<BitVec>)> {
    if d_out.cols() != d_in.rows() {
        return Err(Error::Invalid(format!(
            "homology: middle dimensions disagree ({} vs {})",
            d_out.cols(),
            d_in.rows()
        )));
    }
    if !d_out.compose(d_in).is_zero() {
        return Err(Error::Invalid(
            "homology: d_out ∘ d_in is nonzero".to_string(),
        ));
    }
    // Boundary space: image of d_in, kept as a reduced row set.
    let mut reduced: Vec<BitVec> = Vec::new();
    let insert = |mut v: BitVec, reduced: &mut Vec<BitVec>| -> bool {
        loop {
            let Some(lead) = v.leading() else {
                return false;
            };
            if let Some(p) = reduced.iter().find(|p| p.leading() == Some(lead)) {
                let p = p.clone();
                v.xor_assign(&p);
            } else {
                reduced.push(v);
                return true;
            }
        }
    };
    let d_in_t = d_in.transpose();
    for c in 0..d_in.cols() {
        insert(d_in_t.data[c].clone(), &mut reduced);
    }
    let boundary_rank = reduced.len();
    // Cycles: kernel of d_out; keep those independent modulo boundaries.
    let mut reps = Vec::new();
    for k in f2_kernel(d_out) {
        if insert(k.clone(), &mut reduced) {
            reps.push(k);
        }
    }
    debug_assert_eq!(reps.len(), reduced.len() - boundary_rank);
    Ok((reps.len(), reps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(rows: usize, cols: usize, entries: &[&[usize]]) -> F2Matrix {
        let mut m = F2Matrix::zeros(rows, cols);
        for (r, cs) in entries.iter().enumerate() {
            for &c in cs.iter() {
                m.set(r, c, true);
            }
        }
        m
    }

    #[test]
    fn rank_of_identity_and_zero() {
        assert_eq!(f2_rank(&F2Matrix::identity(3)), 3);
        assert_eq!(f2_rank(&F2Matrix::zeros(2, 5)), 0);
    }

    #[test]
    fn rank_with_dependent_rows() {
        // rows: e1+e2, e2+e3, e1+e3 (sum is zero) -> rank 2
        let m = from_rows(3, 3, &[&[0, 1], &[1, 2], &[0, 2]]);
        assert_eq!(f2_rank(&m), 2);
    }

    #[test]
    fn kernel_annihilates() {
        let m = from_rows(3, 4, &[&[0, 1], &[1, 2], &[0, 2, 3]]);
        let ker = f2_kernel(&m);
        assert_eq!(ker.len(), 4 - f2_rank(&m));
        for k in &ker {
            assert!(m.apply(k).is_zero());
        }
    }

    #[test]
    fn solve_round_trip_and_inconsistency() {
        let m = from_rows(3, 3, &[&[0, 1], &[1, 2], &[0, 2]]);
        // b in the column space:
        let b = m.apply(&BitVec::from_indices(3, [0, 2]));
        let x = f2_solve(&m, &b).expect("consistent");
        assert_eq!(m.apply(&x), b);
        // b outside the column space: columns all have even weight, so e1 is
        // unreachable.
        let b_bad = BitVec::from_indices(3, [0]);
        assert!(f2_solve(&m, &b_bad).is_none());
    }

    #[test]
    fn homology_trivial_cases() {
        let z33 = F2Matrix::zeros(3, 3);
        let (dim, reps) = f2_homology(&z33, &z33).unwrap();
        assert_eq!(dim, 3);
        assert_eq!(reps.len(), 3);
        // Acyclic two-step complex: F2 --id--> F2 at the middle spot.
        let id1 = F2Matrix::identity(1);
        let z01 = F2Matrix::zeros(0, 1);
        let (dim, _) = f2_homology(&id1, &z01).unwrap();
        assert_eq!(dim, 0);
        // Nonzero composite rejected.
        assert!(f2_homology(&id1, &id1).is_err());
    }

    #[test]
    fn homology_reps_are_cycles_not_boundaries() {
        // d_in: image spanned by e0+e1; d_out: kernel = {e0+e1, e2}.
        let d_in = from_rows(3, 1, &[&[0], &[0]]);
        let d_out = from_rows(1, 3, &[&[0, 1]]);
        let (dim, reps) = f2_homology(&d_in, &d_out).unwrap();
        assert_eq!(dim, 1);
        for r in &reps {
            assert!(d_out.apply(r).is_zero());
            assert_ne!(r, &BitVec::from_indices(3, [0, 1]));
        }
    }

    #[test]
    fn rank_equals_rank_of_transpose_on_seeded_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..10 {
            let mut m = F2Matrix::zeros(20, 20);
            for r in 0..20 {
                for c in 0..20 {
                    if rng.gen_bool(0.5) {
                        m.set(r, c, true);
                    }
                }
            }
            assert_eq!(f2_rank(&m), f2_rank(&m.transpose()));
        }
    }
}
