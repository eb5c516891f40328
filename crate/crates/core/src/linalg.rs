//! Exact sparse linear algebra over a Euclidean ring: column echelon forms,
//! kernel bases, Smith normal form with row transforms, and the homology
//! solver built from them.
//!
//! Pivots are chosen by minimal Euclidean norm (then minimal fill), which
//! keeps integer entries small and, over F2\[H\], keeps every entry a single
//! monomial on graded input.

use std::collections::{BTreeMap, BTreeSet};

use crate::ring::EucRing;

/// Sparse column vector.
pub type Col<R> = BTreeMap<usize, R>;

pub fn col_add_scaled<R: EucRing>(target: &mut Col<R>, f: &R, src: &Col<R>) {
    if f.is_zero() {
        return;
    }
    for (r, v) in src {
        let add = f.mul(v);
        if add.is_zero() {
            continue;
        }
        match target.get_mut(r) {
            Some(t) => {
                *t = t.add(&add);
                if t.is_zero() {
                    target.remove(r);
                }
            }
            None => {
                target.insert(*r, add);
            }
        }
    }
}

pub fn col_scale<R: EucRing>(target: &mut Col<R>, f: &R) {
    if f.is_one() {
        return;
    }
    let old = std::mem::take(target);
    for (r, v) in old {
        let w = f.mul(&v);
        if !w.is_zero() {
            target.insert(r, w);
        }
    }
}

/// Sparse matrix stored column-major.
#[derive(Clone, Debug)]
pub struct ColMat<R> {
    pub rows: usize,
    pub cols: Vec<Col<R>>,
}

impl<R: EucRing> ColMat<R> {
    pub fn zero(rows: usize, ncols: usize) -> Self {
        ColMat { rows, cols: vec![Col::new(); ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for (i, c) in m.cols.iter_mut().enumerate() {
            c.insert(i, R::one());
        }
        m
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn apply(&self, v: &Col<R>) -> Col<R> {
        let mut out = Col::new();
        for (j, f) in v {
            col_add_scaled(&mut out, f, &self.cols[*j]);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }
}

/// Column echelon form of a matrix, with the column transform and the list
/// of pivot positions: `original * transform = echelon`, where the columns
/// listed in `free_cols` are zero in the echelon.
pub struct Echelon<R> {
    pub rows: usize,
    pub cols: Vec<Col<R>>,
    /// (pivot row, column index) in production order; the echelon restricted
    /// to pivot rows and pivot columns is triangular in this order.
    pub pivots: Vec<(usize, usize)>,
    pub transform: Vec<Col<R>>,
    pub free_cols: Vec<usize>,
}

/// Bring `mat` to column echelon form by euclidean column operations.
pub fn col_echelon<R: EucRing>(mat: &ColMat<R>) -> Echelon<R> {
    let ncols = mat.ncols();
    let mut cols = mat.cols.clone();
    let mut transform: Vec<Col<R>> = (0..ncols)
        .map(|j| {
            let mut c = Col::new();
            c.insert(j, R::one());
            c
        })
        .collect();

    // row -> live columns with a nonzero entry there
    let mut occ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); mat.rows];
    for (j, c) in cols.iter().enumerate() {
        for r in c.keys() {
            occ[*r].insert(j);
        }
    }

    let mut live: BTreeSet<usize> = (0..ncols).collect();
    let mut pivots = Vec::new();

    for r in 0..mat.rows {
        loop {
            let here: Vec<usize> = occ[r].iter().copied().collect();
            if here.is_empty() {
                break;
            }
            if here.len() == 1 {
                let j = here[0];
                pivots.push((r, j));
                live.remove(&j);
                for (rr, _) in &cols[j] {
                    occ[*rr].remove(&j);
                }
                break;
            }
            // reduce against the entry of minimal norm (fewest nonzeros breaks ties)
            let j = *here
                .iter()
                .min_by_key(|j| (cols[**j][&r].norm(), cols[**j].len()))
                .unwrap();
            let piv = cols[j][&r].clone();
            let src_col = cols[j].clone();
            let src_tr = transform[j].clone();
            for k in here {
                if k == j {
                    continue;
                }
                let (q, _) = cols[k][&r].div_rem(&piv);
                if q.is_zero() {
                    continue;
                }
                let neg_q = q.neg();
                for (rr, v) in &src_col {
                    let add = neg_q.mul(v);
                    if add.is_zero() {
                        continue;
                    }
                    match cols[k].get_mut(rr) {
                        Some(t) => {
                            *t = t.add(&add);
                            if t.is_zero() {
                                cols[k].remove(rr);
                                occ[*rr].remove(&k);
                            }
                        }
                        None => {
                            cols[k].insert(*rr, add);
                            occ[*rr].insert(k);
                        }
                    }
                }
                col_add_scaled(&mut transform[k], &neg_q, &src_tr);
            }
        }
    }

    let free_cols: Vec<usize> = live.into_iter().collect();
    Echelon { rows: mat.rows, cols, pivots, transform, free_cols }
}

impl<R: EucRing> Echelon<R> {
    /// Kernel basis of the original matrix, as columns.
    pub fn kernel_basis(&self) -> Vec<Col<R>> {
        self.free_cols.iter().map(|j| self.transform[*j].clone()).collect()
    }

    /// Solve `original * x = b`. Returns None when `b` is not in the span.
    pub fn solve(&self, b: &Col<R>) -> Option<Col<R>> {
        let mut residual = b.clone();
        let mut z: Col<R> = Col::new();
        for (r, j) in &self.pivots {
            let Some(val) = residual.get(r) else { continue };
            let piv = &self.cols[*j][r];
            let (q, rem) = val.div_rem(piv);
            if !rem.is_zero() {
                return None;
            }
            if q.is_zero() {
                continue;
            }
            let neg_q = q.neg();
            col_add_scaled(&mut residual, &neg_q, &self.cols[*j]);
            z.insert(*j, q);
        }
        if !residual.is_empty() {
            return None;
        }
        let mut x = Col::new();
        for (j, f) in &z {
            col_add_scaled(&mut x, f, &self.transform[*j]);
        }
        Some(x)
    }
}

/// Smith normal form `U * A * V = D`, tracking the row transform `U` (stored
/// as rows of `u`) and its inverse (stored as columns of `u_inv`). The column
/// transform is not needed by any caller and is dropped. The diagonal is not
/// forced into a divisibility chain; torsion is reported via prime-power
/// factors instead.
pub struct Smith<R> {
    pub rank: usize,
    pub diag: Vec<R>,
    pub u: Vec<Col<R>>,
    pub u_inv: Vec<Col<R>>,
}

pub fn smith<R: EucRing>(mat: &ColMat<R>, nrows: usize) -> Smith<R> {
    let ncols = mat.ncols();
    let mut rows: Vec<Col<R>> = vec![Col::new(); nrows];
    let mut colocc: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncols];
    for (j, c) in mat.cols.iter().enumerate() {
        for (r, v) in c {
            rows[*r].insert(j, v.clone());
            colocc[j].insert(*r);
        }
    }
    let mut u: Vec<Col<R>> = (0..nrows)
        .map(|i| {
            let mut c = Col::new();
            c.insert(i, R::one());
            c
        })
        .collect();
    let mut u_inv = u.clone();

    let swap_rows = |rows: &mut Vec<Col<R>>,
                     colocc: &mut Vec<BTreeSet<usize>>,
                     u: &mut Vec<Col<R>>,
                     u_inv: &mut Vec<Col<R>>,
                     a: usize,
                     b: usize| {
        if a == b {
            return;
        }
        let affected: BTreeSet<usize> = rows[a].keys().chain(rows[b].keys()).copied().collect();
        rows.swap(a, b);
        for j in affected {
            for i in [a, b] {
                if rows[i].contains_key(&j) {
                    colocc[j].insert(i);
                } else {
                    colocc[j].remove(&i);
                }
            }
        }
        u.swap(a, b);
        u_inv.swap(a, b);
    };

    let swap_cols = |rows: &mut Vec<Col<R>>, colocc: &mut Vec<BTreeSet<usize>>, a: usize, b: usize| {
        if a == b {
            return;
        }
        let affected: BTreeSet<usize> = colocc[a].union(&colocc[b]).copied().collect();
        for i in affected {
            let va = rows[i].remove(&a);
            let vb = rows[i].remove(&b);
            if let Some(v) = va {
                rows[i].insert(b, v);
            }
            if let Some(v) = vb {
                rows[i].insert(a, v);
            }
        }
        colocc.swap(a, b);
    };

    let mut diag: Vec<R> = Vec::new();
    let mut k = 0usize;
    'outer: while k < nrows.min(ncols) {
        // global pivot: minimal norm, then minimal fill product
        let mut best: Option<(u128, usize, usize, usize)> = None;
        for i in k..nrows {
            for (j, v) in &rows[i] {
                if *j < k {
                    continue;
                }
                let cand = (v.norm(), (rows[i].len() - 1) * (colocc[*j].len() - 1), i, *j);
                if best.as_ref().map_or(true, |b| (cand.0, cand.1) < (b.0, b.1)) {
                    best = Some(cand);
                }
            }
        }
        let Some((_, _, pi, pj)) = best else { break 'outer };
        swap_rows(&mut rows, &mut colocc, &mut u, &mut u_inv, pi, k);
        swap_cols(&mut rows, &mut colocc, pj, k);

        loop {
            // clear column k by row ops
            let piv = rows[k][&k].clone();
            let below: Vec<usize> = colocc[k].iter().filter(|i| **i != k).copied().collect();
            let mut dirty = false;
            for i in below {
                let val = rows[i][&k].clone();
                let (q, rem) = val.div_rem(&piv);
                if !q.is_zero() {
                    let neg_q = q.neg();
                    let src = rows[k].clone();
                    for (j, v) in &src {
                        let add = neg_q.mul(v);
                        if add.is_zero() {
                            continue;
                        }
                        let newv = match rows[i].remove(j) {
                            Some(e) => e.add(&add),
                            None => add,
                        };
                        if newv.is_zero() {
                            colocc[*j].remove(&i);
                        } else {
                            rows[i].insert(*j, newv);
                            colocc[*j].insert(i);
                        }
                    }
                    let src = u[k].clone();
                    col_add_scaled(&mut u[i], &neg_q, &src);
                    let src = u_inv[i].clone();
                    col_add_scaled(&mut u_inv[k], &q, &src);
                }
                if !rem.is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                let i = *colocc[k]
                    .iter()
                    .filter(|i| **i != k)
                    .min_by_key(|i| rows[**i][&k].norm())
                    .unwrap();
                swap_rows(&mut rows, &mut colocc, &mut u, &mut u_inv, i, k);
                continue;
            }

            // clear row k by column ops
            let piv = rows[k][&k].clone();
            let right: Vec<usize> = rows[k].keys().filter(|j| **j != k).copied().collect();
            let mut dirty = false;
            for j in right {
                let val = rows[k][&j].clone();
                let (q, rem) = val.div_rem(&piv);
                if !q.is_zero() {
                    let neg_q = q.neg();
                    let targets: Vec<usize> = colocc[k].iter().copied().collect();
                    for i in targets {
                        let add = neg_q.mul(&rows[i][&k]);
                        if add.is_zero() {
                            continue;
                        }
                        let newv = match rows[i].remove(&j) {
                            Some(e) => e.add(&add),
                            None => add,
                        };
                        if newv.is_zero() {
                            colocc[j].remove(&i);
                        } else {
                            rows[i].insert(j, newv);
                            colocc[j].insert(i);
                        }
                    }
                }
                if !rem.is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                let j = *rows[k].keys().filter(|j| **j != k).min_by_key(|j| rows[k][*j].norm()).unwrap();
                swap_cols(&mut rows, &mut colocc, j, k);
                continue;
            }
            break;
        }

        let (canon, unit) = rows[k][&k].unit_normalize();
        if !unit.is_one() {
            let unit_inv = R::one().div_exact(&unit);
            rows[k].insert(k, canon.clone());
            col_scale(&mut u[k], &unit_inv);
            col_scale(&mut u_inv[k], &unit);
        }
        diag.push(rows[k][&k].clone());
        k += 1;
    }

    let rank = diag.len();
    Smith { rank, diag, u, u_inv }
}

// ---------------------------------------------------------------- homology

/// One indecomposable summand of a homology module over an euclidean ring.
#[derive(Clone, Debug)]
pub struct Summand<R> {
    /// Representative cycle in block coordinates.
    pub chain: Col<R>,
    /// None for a free summand, Some(d) for R/(d).
    pub order: Option<R>,
}

/// Homology of one block `C_in --d_in--> C --d_out--> C_next`, with enough
/// retained data to express arbitrary cycles in the summand basis.
pub struct BlockHomology<R: EucRing> {
    pub dim: usize,
    pub summands: Vec<Summand<R>>,
    kernel_ech: Echelon<R>,
    u: Vec<Col<R>>,
    /// per kernel-coordinate: None = unit summand (dropped), Some(idx)
    slot: Vec<Option<usize>>,
    orders: Vec<Option<R>>,
}

pub fn block_homology<R: EucRing>(d_out: &ColMat<R>, d_in: &ColMat<R>) -> BlockHomology<R> {
    let dim = d_out.ncols();
    assert_eq!(d_in.rows, dim, "block dimension mismatch");

    let ech_out = col_echelon(d_out);
    let kernel = ech_out.kernel_basis();
    let k = kernel.len();
    let kernel_mat = ColMat { rows: dim, cols: kernel };
    let kernel_ech = col_echelon(&kernel_mat);

    // boundaries in kernel coordinates
    let mut y = ColMat::zero(k, 0);
    for b in &d_in.cols {
        if b.is_empty() {
            continue;
        }
        let x = kernel_ech.solve(b).expect("boundary not in kernel: d^2 != 0?");
        y.cols.push(x);
    }
    let sm = smith(&y, k);

    let mut summands = Vec::new();
    let mut slot = vec![None; k];
    let mut orders = vec![None; k];
    for i in 0..k {
        let order = if i < sm.rank { Some(sm.diag[i].clone()) } else { None };
        if let Some(d) = &order {
            if d.is_unit() {
                orders[i] = Some(d.clone());
                continue;
            }
        }
        let chain = kernel_mat.apply(&sm.u_inv[i]);
        slot[i] = Some(summands.len());
        orders[i] = order.clone();
        summands.push(Summand { chain, order });
    }

    BlockHomology { dim, summands, kernel_ech, u: sm.u, slot, orders }
}

impl<R: EucRing> BlockHomology<R> {
    /// Express a cycle in the summand basis (torsion coordinates reduced to
    /// normal form). Returns None when the vector is not a cycle.
    pub fn coords(&self, z: &Col<R>) -> Option<Vec<R>> {
        let w = self.kernel_ech.solve(z)?;
        let mut out = vec![R::zero(); self.summands.len()];
        for (i, urow) in self.u.iter().enumerate() {
            let mut mu = R::zero();
            for (j, f) in urow {
                if let Some(v) = w.get(j) {
                    mu = mu.add(&f.mul(v));
                }
            }
            match (&self.slot[i], &self.orders[i]) {
                (Some(s), Some(d)) => out[*s] = mu.div_rem(d).1,
                (Some(s), None) => out[*s] = mu,
                (None, _) => {} // unit summand: any value is a boundary
            }
        }
        Some(out)
    }

    pub fn is_zero_class(&self, z: &Col<R>) -> Option<bool> {
        self.coords(z).map(|c| c.iter().all(|v| v.is_zero()))
    }

    pub fn free_rank(&self) -> usize {
        self.summands.iter().filter(|s| s.order.is_none()).count()
    }
}
