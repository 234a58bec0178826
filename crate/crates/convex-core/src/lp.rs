//! Dense two-phase simplex for the small linear programs that come up in
//! halfspace intersection.

use crate::geom::Vec3;
use crate::Halfspace;

const EPS: f64 = 1e-12;
const MAX_PIVOTS: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

/// maximize `c·x` subject to `A x ≤ b`, `x ≥ 0`.
pub(crate) struct Simplex {
    m: usize,
    n: usize,
    basis: Vec<isize>,
    nonbasis: Vec<isize>,
    d: Vec<Vec<f64>>,
}

impl Simplex {
    pub(crate) fn new(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Self {
        let m = b.len();
        let n = c.len();
        let mut d = vec![vec![0.0; n + 2]; m + 2];
        let mut basis = vec![0isize; m];
        let mut nonbasis = vec![0isize; n + 1];
        for i in 0..m {
            d[i][..n].copy_from_slice(&a[i][..n]);
            basis[i] = (n + i) as isize;
            d[i][n] = -1.0;
            d[i][n + 1] = b[i];
        }
        for j in 0..n {
            nonbasis[j] = j as isize;
            d[m][j] = -c[j];
        }
        nonbasis[n] = -1;
        d[m + 1][n] = 1.0;
        Self { m, n, basis, nonbasis, d }
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let inv = 1.0 / self.d[r][s];
        let row_r = self.d[r].clone();
        for i in 0..self.m + 2 {
            if i == r {
                continue;
            }
            let f = self.d[i][s] * inv;
            if f != 0.0 {
                for j in 0..self.n + 2 {
                    if j != s {
                        self.d[i][j] -= row_r[j] * f;
                    }
                }
            }
        }
        for j in 0..self.n + 2 {
            if j != s {
                self.d[r][j] *= inv;
            }
        }
        for i in 0..self.m + 2 {
            if i != r {
                self.d[i][s] *= -inv;
            }
        }
        self.d[r][s] = inv;
        std::mem::swap(&mut self.basis[r], &mut self.nonbasis[s]);
    }

    /// Returns `Some(true)` at optimum, `Some(false)` if unbounded, `None` if
    /// the pivot cap was hit.
    fn run(&mut self, phase: usize) -> Option<bool> {
        let x = if phase == 1 { self.m + 1 } else { self.m };
        for _ in 0..MAX_PIVOTS {
            let mut s: Option<usize> = None;
            for j in 0..=self.n {
                if phase == 2 && self.nonbasis[j] == -1 {
                    continue;
                }
                s = match s {
                    None => Some(j),
                    Some(k) => {
                        let (dj, dk) = (self.d[x][j], self.d[x][k]);
                        if dj < dk || (dj == dk && self.nonbasis[j] < self.nonbasis[k]) {
                            Some(j)
                        } else {
                            Some(k)
                        }
                    }
                };
            }
            let s = s?;
            if self.d[x][s] > -EPS {
                return Some(true);
            }
            let mut r: Option<usize> = None;
            for i in 0..self.m {
                if self.d[i][s] < EPS {
                    continue;
                }
                r = match r {
                    None => Some(i),
                    Some(k) => {
                        let qi = self.d[i][self.n + 1] / self.d[i][s];
                        let qk = self.d[k][self.n + 1] / self.d[k][s];
                        if qi < qk || (qi == qk && self.basis[i] < self.basis[k]) {
                            Some(i)
                        } else {
                            Some(k)
                        }
                    }
                };
            }
            match r {
                None => return Some(false),
                Some(r) => self.pivot(r, s),
            }
        }
        None
    }

    pub(crate) fn solve(mut self) -> (LpOutcome, Vec<f64>) {
        let (m, n) = (self.m, self.n);
        let mut x = vec![0.0; n];
        if m > 0 {
            let mut r = 0;
            for i in 1..m {
                if self.d[i][n + 1] < self.d[r][n + 1] {
                    r = i;
                }
            }
            if self.d[r][n + 1] < -EPS {
                self.pivot(r, n);
                match self.run(1) {
                    Some(true) if self.d[m + 1][n + 1] >= -EPS => {}
                    _ => return (LpOutcome::Infeasible, x),
                }
                for i in 0..m {
                    if self.basis[i] == -1 {
                        let mut s = 0;
                        for j in 1..=n {
                            if self.d[i][j] < self.d[i][s]
                                || (self.d[i][j] == self.d[i][s] && self.nonbasis[j] < self.nonbasis[s])
                            {
                                s = j;
                            }
                        }
                        self.pivot(i, s);
                    }
                }
            }
        }
        match self.run(2) {
            Some(true) => {}
            Some(false) => return (LpOutcome::Unbounded, x),
            None => return (LpOutcome::Infeasible, x),
        }
        for i in 0..m {
            if self.basis[i] >= 0 && (self.basis[i] as usize) < n {
                x[self.basis[i] as usize] = self.d[i][n + 1];
            }
        }
        (LpOutcome::Optimal(self.d[m][n + 1]), x)
    }
}

fn split_rows(hs: &[Halfspace], with_radius: bool) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut a = Vec::with_capacity(hs.len());
    let mut b = Vec::with_capacity(hs.len());
    for h in hs {
        let n = h.normal;
        let mut row = vec![n.x, n.y, n.z, -n.x, -n.y, -n.z];
        if with_radius {
            row.push(n.norm());
        }
        a.push(row);
        b.push(h.offset);
    }
    (a, b)
}

/// Center and radius of the largest ball inside `⋂ {x : n·x ≤ c}`.
///
/// The radius is capped at `cap`; a capped result means the intersection may
/// be unbounded. Returns `None` when the intersection is empty.
pub fn chebyshev_center(hs: &[Halfspace], cap: f64) -> Option<(Vec3, f64)> {
    let (mut a, mut b) = split_rows(hs, true);
    a.push(vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    b.push(cap);
    let c = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0];
    match Simplex::new(&a, &b, &c).solve() {
        (LpOutcome::Optimal(r), x) => Some((Vec3::new(x[0] - x[3], x[1] - x[4], x[2] - x[5]), r)),
        _ => None,
    }
}

/// Whether `⋂ {x : n·x ≤ c}` is bounded in every coordinate direction.
pub(crate) fn is_bounded(hs: &[Halfspace]) -> bool {
    let (a, b) = split_rows(hs, false);
    for k in 0..6 {
        // x = x⁺ − x⁻, so the objective is ±(x⁺ₖ − x⁻ₖ)
        let sign = if k < 3 { 1.0 } else { -1.0 };
        let mut c = [0.0; 6];
        c[k % 3] = sign;
        c[k % 3 + 3] = -sign;
        if let (LpOutcome::Unbounded, _) = Simplex::new(&a, &b, &c).solve() {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_instance() {
        // max 3x + 2y, x + y ≤ 4, x + 3y ≤ 6, x ≤ 3
        let a = vec![vec![1.0, 1.0], vec![1.0, 3.0], vec![1.0, 0.0]];
        let (out, x) = Simplex::new(&a, &[4.0, 6.0, 3.0], &[3.0, 2.0]).solve();
        assert_eq!(out, LpOutcome::Optimal(11.0));
        assert!((x[0] - 3.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_rhs_needs_phase_one() {
        // max -x, x ≥ 2 written as -x ≤ -2
        let (out, x) = Simplex::new(&[vec![-1.0]], &[-2.0], &[-1.0]).solve();
        assert_eq!(out, LpOutcome::Optimal(-2.0));
        assert!((x[0] - 2.0).abs() < 1e-12);
        let (out, _) = Simplex::new(&[vec![-1.0], vec![1.0]], &[-2.0, 1.0], &[1.0]).solve();
        assert_eq!(out, LpOutcome::Infeasible);
    }

    #[test]
    fn cube_chebyshev_center() {
        let hs: Vec<Halfspace> = [
            (Vec3::x(), 1.0),
            (-Vec3::x(), 0.0),
            (Vec3::y(), 1.0),
            (-Vec3::y(), 0.0),
            (Vec3::z(), 1.0),
            (-Vec3::z(), 0.0),
        ]
        .iter()
        .map(|(n, c)| Halfspace::new(*n, *c))
        .collect();
        let (p, r) = chebyshev_center(&hs, 1e6).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
        assert!((p - Vec3::new(0.5, 0.5, 0.5)).norm() < 1e-12);
        assert!(is_bounded(&hs));
        assert!(!is_bounded(&hs[..5]));
    }
}
