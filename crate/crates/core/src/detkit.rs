//! Determinants of complex matrices and the two determinant identities the
//! closed-form chain formulas rest on.
//!
//! * Sylvester's identity: for `A` of size `p + q` with leading `p × p` block
//!   `a`, the `q × q` matrix `M` of embordering minors satisfies
//!   `|M| = |a|^{q-1} |A|`.
//! * The two-row lemma: with `a` bordered by two extra rows `b_1, b_2`,
//!   `|a| m_{jk}^{ts} = |a^{ts}| m_{jk} - |a^{js}| m_{tk}`.
//!
//! All indices in this module are zero-based.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::CMatrix;

/// Relative threshold for [`is_numerically_singular`].
pub const SINGULAR_RTOL: f64 = 1e-12;

/// Determinant by LU factorization with partial (row) pivoting.
///
/// A zero pivot column yields exactly zero. Panics if `m` is not square.
pub fn det(m: &CMatrix) -> Complex64 {
    assert!(m.is_square(), "det of a {}x{} matrix", m.nrows(), m.ncols());
    let n = m.nrows();
    let mut a: Vec<Complex64> = m.transpose().as_slice().to_vec(); // row-major
    let mut acc = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mut piv = k;
        let mut best = a[k * n + k].norm();
        for r in k + 1..n {
            let v = a[r * n + k].norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != k {
            for c in 0..n {
                a.swap(k * n + c, piv * n + c);
            }
            acc = -acc;
        }
        let p = a[k * n + k];
        acc *= p;
        for r in k + 1..n {
            let f = a[r * n + k] / p;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in k + 1..n {
                let t = a[k * n + c];
                a[r * n + c] -= f * t;
            }
        }
    }
    acc
}

/// `|det| ≤ 1e-12 · Π_rows max_j |m_ij|`. Invariant under row scaling.
pub fn is_numerically_singular(m: &CMatrix, det: Complex64) -> bool {
    let scale: f64 = m
        .row_iter()
        .map(|row| row.iter().fold(0.0_f64, |a, z| a.max(z.norm())))
        .product();
    det.norm() <= SINGULAR_RTOL * scale
}

/// A `(p + r) × (p + c)` array with a distinguished leading `p × p` block,
/// plus a choice of one bordering row and one bordering column.
#[derive(Debug, Clone, Copy)]
pub struct BorderLayout<'a> {
    pub full: &'a CMatrix,
    pub p: usize,
    /// Index into the bordering rows, `0..r`.
    pub row: usize,
    /// Index into the bordering columns, `0..c`.
    pub col: usize,
}

impl BorderLayout<'_> {
    fn validate(&self) -> Result<()> {
        let (rows, cols) = self.full.shape();
        if self.p == 0 || self.p > rows || self.p > cols {
            return Err(Error::IndexOutOfRange(format!(
                "leading block size {} for a {rows}x{cols} array",
                self.p
            )));
        }
        if self.p + self.row >= rows {
            return Err(Error::IndexOutOfRange(format!(
                "bordering row {} (only {} available)",
                self.row,
                rows - self.p
            )));
        }
        if self.p + self.col >= cols {
            return Err(Error::IndexOutOfRange(format!(
                "bordering column {} (only {} available)",
                self.col,
                cols - self.p
            )));
        }
        Ok(())
    }

    /// The `(p+1) × (p+1)` bordered matrix itself.
    pub fn matrix(&self) -> Result<CMatrix> {
        self.validate()?;
        let p = self.p;
        let (r, c) = (p + self.row, p + self.col);
        Ok(CMatrix::from_fn(p + 1, p + 1, |i, j| {
            let src_i = if i < p { i } else { r };
            let src_j = if j < p { j } else { c };
            self.full[(src_i, src_j)]
        }))
    }
}

/// Determinant of the leading block embordered by one row and one column.
pub fn embordering_minor(layout: &BorderLayout<'_>) -> Result<Complex64> {
    Ok(det(&layout.matrix()?))
}

/// Outcome of one Sylvester-identity evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SylvesterCheck {
    /// `||M| - |a|^{q-1}|A|| / max(1, ||a|^{q-1}|A||)`
    pub residual: f64,
    pub det_minors: Complex64,
    pub rhs: Complex64,
    /// The leading block was numerically singular (the identity still holds).
    pub leading_singular: bool,
}

pub fn sylvester_residual(a: &CMatrix, p: usize) -> Result<SylvesterCheck> {
    sylvester_with_rhs_scale(a, p, 1.0)
}

/// Same as [`sylvester_residual`] with the right-hand side multiplied by
/// `scale`; anything other than 1 is a negative control.
pub(crate) fn sylvester_with_rhs_scale(a: &CMatrix, p: usize, scale: f64) -> Result<SylvesterCheck> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", a.nrows(), a.ncols())));
    }
    let dim = a.nrows();
    if p == 0 || p >= dim {
        return Err(Error::Precondition(format!("need 1 <= p < {dim}, got p = {p}")));
    }
    let q = dim - p;
    let minors = CMatrix::from_fn(q, q, |k, l| {
        embordering_minor(&BorderLayout { full: a, p, row: k, col: l }).expect("indices in range")
    });
    let block = a.view((0, 0), (p, p)).into_owned();
    let det_block = det(&block);
    let det_minors = det(&minors);
    let rhs = det_block.powu((q - 1) as u32) * det(a) * scale;
    Ok(SylvesterCheck {
        residual: (det_minors - rhs).norm() / rhs.norm().max(1.0),
        det_minors,
        rhs,
        leading_singular: is_numerically_singular(&block, det_block),
    })
}

/// Inputs of the two-row lemma: the `(p + 2) × (p + n)` array
/// `[[a, a_cols], [b_rows]]`.
#[derive(Debug, Clone)]
pub struct LemmaInput {
    /// `p × p`
    pub a: CMatrix,
    /// `2 × (p + n)`
    pub b_rows: CMatrix,
    /// `p × n`
    pub a_cols: CMatrix,
}

/// Which minor of the lemma to check.
#[derive(Debug, Clone, Copy)]
pub struct LemmaIndices {
    /// Bordering column, `0..n`.
    pub k: usize,
    /// Replaced row of `a`, `0..p`.
    pub s: usize,
    /// The two bordering rows, distinct, each in `{0, 1}`.
    pub j: usize,
    pub t: usize,
}

impl LemmaInput {
    fn p(&self) -> usize {
        self.a.nrows()
    }

    fn n(&self) -> usize {
        self.a_cols.ncols()
    }

    fn validate(&self, idx: &LemmaIndices) -> Result<()> {
        let (p, n) = (self.p(), self.n());
        if !self.a.is_square() || p == 0 {
            return Err(Error::DimensionMismatch("a must be a non-empty square matrix".into()));
        }
        if self.b_rows.shape() != (2, p + n) || self.a_cols.nrows() != p {
            return Err(Error::DimensionMismatch(format!(
                "expected b_rows 2x{} and a_cols {p}x{n}",
                p + n
            )));
        }
        if idx.k >= n || idx.s >= p || idx.j > 1 || idx.t > 1 {
            return Err(Error::IndexOutOfRange(format!("{idx:?} for p = {p}, n = {n}")));
        }
        if idx.j == idx.t {
            return Err(Error::Precondition("the two bordering rows must differ (t != j)".into()));
        }
        Ok(())
    }

    /// Row `r` of the full array `[[a, a_cols], [b_rows]]`, restricted to the
    /// first `p` columns plus column `p + k`.
    fn row_with(&self, r: usize, k: usize) -> Vec<Complex64> {
        let p = self.p();
        let mut out: Vec<Complex64> = Vec::with_capacity(p + 1);
        if r < p {
            out.extend((0..p).map(|c| self.a[(r, c)]));
            out.push(self.a_cols[(r, k)]);
        } else {
            out.extend((0..p).map(|c| self.b_rows[(r - p, c)]));
            out.push(self.b_rows[(r - p, p + k)]);
        }
        out
    }

    /// `m_{jk}`: `a` embordered by bordering row `j` and column `k`.
    pub fn minor(&self, j: usize, k: usize) -> Complex64 {
        let p = self.p();
        let rows: Vec<Vec<Complex64>> = (0..p).chain(std::iter::once(p + j)).map(|r| self.row_with(r, k)).collect();
        det(&CMatrix::from_fn(p + 1, p + 1, |i, c| rows[i][c]))
    }

    /// `m_{jk}^{ts}`: `m_{jk}` with row `s` replaced by bordering row `t`.
    pub fn replaced_minor(&self, j: usize, k: usize, t: usize, s: usize) -> Complex64 {
        let p = self.p();
        let rows: Vec<Vec<Complex64>> = (0..p)
            .map(|r| if r == s { p + t } else { r })
            .chain(std::iter::once(p + j))
            .map(|r| self.row_with(r, k))
            .collect();
        det(&CMatrix::from_fn(p + 1, p + 1, |i, c| rows[i][c]))
    }

    /// `|a^{ts}|`: `a` with row `s` replaced by the first `p` entries of
    /// bordering row `t`.
    pub fn replaced_block_det(&self, t: usize, s: usize) -> Complex64 {
        let p = self.p();
        let m = CMatrix::from_fn(p, p, |i, c| if i == s { self.b_rows[(t, c)] } else { self.a[(i, c)] });
        det(&m)
    }
}

/// Normalized residual of `|a| m_{jk}^{ts} = |a^{ts}| m_{jk} - |a^{js}| m_{tk}`,
/// divided by the largest of 1 and the moduli of the three products.
pub fn lemma_residual(input: &LemmaInput, idx: LemmaIndices) -> Result<f64> {
    input.validate(&idx)?;
    let det_a = det(&input.a);
    if is_numerically_singular(&input.a, det_a) {
        return Err(Error::Precondition("|a| = 0".into()));
    }
    let LemmaIndices { k, s, j, t } = idx;
    let lhs = det_a * input.replaced_minor(j, k, t, s);
    let r1 = input.replaced_block_det(t, s) * input.minor(j, k);
    let r2 = input.replaced_block_det(j, s) * input.minor(t, k);
    let scale = [1.0, lhs.norm(), r1.norm(), r2.norm()].into_iter().fold(0.0, f64::max);
    Ok((lhs - (r1 - r2)).norm() / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn real(rows: usize, cols: usize, v: &[f64]) -> CMatrix {
        CMatrix::from_row_slice(rows, cols, &v.iter().map(|&x| c(x)).collect::<Vec<_>>())
    }

    /// Laplace expansion along the first row; independent of the LU path.
    fn cofactor_det(m: &CMatrix) -> Complex64 {
        let n = m.nrows();
        if n == 1 {
            return m[(0, 0)];
        }
        let mut acc = c(0.0);
        for col in 0..n {
            let minor = m.clone().remove_row(0).remove_column(col);
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            acc += m[(0, col)] * cofactor_det(&minor) * sign;
        }
        acc
    }

    #[test]
    fn small_determinants() {
        assert_eq!(det(&CMatrix::identity(3, 3)), c(1.0));
        assert_eq!(det(&real(2, 2, &[1.0, 2.0, 3.0, 4.0])), c(-2.0));
        assert_eq!(det(&real(2, 2, &[0.0, 0.0, 3.0, 4.0])), c(0.0));
    }

    #[test]
    fn integer_matrix_matches_cofactor_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let m = CMatrix::from_fn(6, 6, |_, _| c(rng.gen_range(-5..=5) as f64));
            let lu = det(&m);
            let cof = cofactor_det(&m);
            // Integer determinants of this size are exact in f64 up to rounding
            // of the LU quotients.
            assert!((lu - cof).norm() <= 1e-9 * cof.norm().max(1.0), "{lu} vs {cof}");
            assert_eq!(cof.im, 0.0);
            assert_eq!(cof.re, cof.re.round());
        }
    }

    #[test]
    fn row_swap_flips_sign_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m = CMatrix::from_fn(5, 5, |_, _| c(rng.gen_range(-4..=4) as f64));
            let mut s = m.clone();
            s.swap_rows(0, 3);
            assert_eq!(cofactor_det(&s), -cofactor_det(&m));
            assert!((det(&s) + det(&m)).norm() <= 1e-10 * det(&m).norm().max(1.0));
        }
    }

    #[test]
    fn singularity_is_scale_invariant() {
        let m = real(2, 2, &[1.0, 2.0, 2.0, 4.0 + 1e-14]);
        assert!(is_numerically_singular(&m, det(&m)));
        let mut big = m.clone();
        big.row_mut(0).scale_mut(1e8);
        assert!(is_numerically_singular(&big, det(&big)));
        let ok = real(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert!(!is_numerically_singular(&ok, det(&ok)));
    }

    #[test]
    fn embordering_examples() {
        let a = real(2, 2, &[2.0, 1.0, 5.0, 3.0]);
        let m = embordering_minor(&BorderLayout { full: &a, p: 1, row: 0, col: 0 }).unwrap();
        assert_eq!(m, det(&a));

        let id = CMatrix::identity(4, 4);
        let m = embordering_minor(&BorderLayout { full: &id, p: 2, row: 1, col: 1 }).unwrap();
        assert_eq!(m, c(1.0));

        assert!(embordering_minor(&BorderLayout { full: &id, p: 2, row: 2, col: 0 }).is_err());
        assert!(embordering_minor(&BorderLayout { full: &id, p: 0, row: 0, col: 0 }).is_err());
    }

    #[test]
    fn embordering_matches_direct_assembly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = CMatrix::from_fn(4, 4, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        for k in 0..2 {
            for l in 0..2 {
                let direct = CMatrix::from_fn(3, 3, |i, j| {
                    let r = if i < 2 { i } else { 2 + k };
                    let col = if j < 2 { j } else { 2 + l };
                    a[(r, col)]
                });
                let m = embordering_minor(&BorderLayout { full: &a, p: 2, row: k, col: l }).unwrap();
                assert_eq!(m, det(&direct));
            }
        }
    }

    #[test]
    fn sylvester_trivial_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = CMatrix::from_fn(5, 5, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        // q = 1: M is the single minor |A|.
        assert_eq!(sylvester_residual(&a, 4).unwrap().residual, 0.0);
        for p in 1..5 {
            assert_eq!(sylvester_residual(&CMatrix::identity(5, 5), p).unwrap().residual, 0.0);
        }
        assert!(sylvester_residual(&a, 0).is_err());
        assert!(sylvester_residual(&a, 5).is_err());
    }

    #[test]
    fn sylvester_random_6x6() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut a = CMatrix::from_fn(6, 6, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        a += CMatrix::identity(6, 6) * c(2.0);
        let chk = sylvester_residual(&a, 3).unwrap();
        assert!(chk.residual <= 1e-10, "{chk:?}");
        assert!(!chk.leading_singular);
    }

    #[test]
    fn sylvester_reports_singular_leading_block() {
        let mut a = CMatrix::identity(4, 4);
        a[(0, 0)] = c(0.0);
        a[(0, 3)] = c(1.0);
        a[(3, 0)] = c(1.0);
        let chk = sylvester_residual(&a, 2).unwrap();
        assert!(chk.leading_singular);
        assert!(chk.residual <= 1e-12);
    }

    #[test]
    fn lemma_scalar_integer_case() {
        // p = 1, n = 1: all determinants are 1x1 or 2x2.
        let input = LemmaInput {
            a: real(1, 1, &[3.0]),
            b_rows: real(2, 2, &[2.0, -1.0, 5.0, 4.0]),
            a_cols: real(1, 1, &[7.0]),
        };
        let r = lemma_residual(&input, LemmaIndices { k: 0, s: 0, j: 0, t: 1 }).unwrap();
        assert_eq!(r, 0.0);
        // Both sides by hand: |a| = 3, m_{0} = 3·(-1) - 7·2 = -17, m_{1} = 3·4 - 7·5 = -23,
        // |a^{1,0}| = 5, |a^{0,0}| = 2, m^{1,0}_{0} = det[[5,4],[2,-1]] = -13.
        assert_eq!(3.0 * -13.0, 5.0 * -17.0 - 2.0 * -23.0);
    }

    #[test]
    fn lemma_rejects_degenerate_inputs() {
        let input = LemmaInput {
            a: real(1, 1, &[0.0]),
            b_rows: real(2, 2, &[2.0, -1.0, 5.0, 4.0]),
            a_cols: real(1, 1, &[7.0]),
        };
        assert!(matches!(
            lemma_residual(&input, LemmaIndices { k: 0, s: 0, j: 0, t: 1 }),
            Err(Error::Precondition(_))
        ));
        let input = LemmaInput { a: real(1, 1, &[1.0]), ..input };
        assert!(matches!(
            lemma_residual(&input, LemmaIndices { k: 0, s: 0, j: 1, t: 1 }),
            Err(Error::Precondition(_))
        ));
        assert!(lemma_residual(&input, LemmaIndices { k: 1, s: 0, j: 0, t: 1 }).is_err());
    }

    #[test]
    fn lemma_random_complex_p3_n2() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut z = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let mut a = CMatrix::from_fn(3, 3, |_, _| z());
        a += CMatrix::identity(3, 3) * c(2.0);
        let input = LemmaInput {
            a,
            b_rows: CMatrix::from_fn(2, 5, |_, _| z()),
            a_cols: CMatrix::from_fn(3, 2, |_, _| z()),
        };
        for k in 0..2 {
            for s in 0..3 {
                for (j, t) in [(0, 1), (1, 0)] {
                    let r = lemma_residual(&input, LemmaIndices { k, s, j, t }).unwrap();
                    assert!(r <= 1e-10, "k={k} s={s} j={j}: {r}");
                }
            }
        }
    }
}
