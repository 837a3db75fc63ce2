//! Dot products accurate to about twice the working precision, via error-free
//! transformations (TwoSum / FMA-based TwoProduct).
//!
//! Used where the terms are ~10⁷ and cancel down to O(1): the Lyapunov
//! residual that drives refinement, and Rayleigh quotients of `V + iΩ/2`.

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let z = s - a;
    (s, (a - (s - z)) + (b - z))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Running sum of products kept as an unevaluated pair `hi + lo`.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Accumulator {
    hi: f64,
    lo: f64,
}

impl Accumulator {
    #[inline]
    pub(crate) fn add_prod(&mut self, a: f64, b: f64) {
        let (p, e) = two_prod(a, b);
        let (s, f) = two_sum(self.hi, p);
        self.hi = s;
        self.lo += e + f;
    }

    #[inline]
    pub(crate) fn add(&mut self, a: f64) {
        let (s, f) = two_sum(self.hi, a);
        self.hi = s;
        self.lo += f;
    }

    pub(crate) fn parts(self) -> (f64, f64) {
        two_sum(self.hi, self.lo)
    }

    pub(crate) fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// `ad − bc` as an unevaluated pair.
fn det2(a: f64, b: f64, c: f64, d: f64) -> (f64, f64) {
    let mut acc = Accumulator::default();
    acc.add_prod(a, d);
    acc.add_prod(-b, c);
    acc.parts()
}

/// Adds `s · x · y` for pairs `x`, `y`, dropping the `lo·lo` term.
fn add_pair_prod(acc: &mut Accumulator, s: f64, x: (f64, f64), y: (f64, f64)) {
    acc.add_prod(s * x.0, y.0);
    acc.add_prod(s * x.0, y.1);
    acc.add_prod(s * x.1, y.0);
}

/// Determinant of a 4×4 matrix by Laplace expansion along the first two
/// rows, every 2×2 minor and product kept to twice the working precision.
pub(crate) fn det4(m: &nalgebra::Matrix4<f64>) -> (f64, f64) {
    const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut acc = Accumulator::default();
    for &(a, b) in &PAIRS {
        let (c, d) = (0..4)
            .filter(|&k| k != a && k != b)
            .fold((usize::MAX, 0), |(c, d), k| {
                if c == usize::MAX {
                    (k, d)
                } else {
                    (c, k)
                }
            });
        // sign of the permutation (a, b, c, d) relative to rows (0, 1, 2, 3)
        let sign = if (a + b) % 2 == 1 { 1.0 } else { -1.0 };
        let top = det2(m[(0, a)], m[(0, b)], m[(1, a)], m[(1, b)]);
        let bottom = det2(m[(2, c)], m[(2, d)], m[(3, c)], m[(3, d)]);
        add_pair_prod(&mut acc, sign, top, bottom);
    }
    acc.parts()
}

/// `Σ_k s_k det(B_k)` for 2×2 blocks.
pub(crate) fn det2_sum(blocks: &[(f64, &nalgebra::Matrix2<f64>)]) -> (f64, f64) {
    let mut acc = Accumulator::default();
    for (s, b) in blocks {
        acc.add_prod(*s * b[(0, 0)], b[(1, 1)]);
        acc.add_prod(-*s * b[(0, 1)], b[(1, 0)]);
    }
    acc.parts()
}

/// `x² − 4y` for pairs.
pub(crate) fn discriminant(x: (f64, f64), y: (f64, f64)) -> f64 {
    let mut acc = Accumulator::default();
    add_pair_prod(&mut acc, 1.0, x, x);
    acc.add(-4.0 * y.0);
    acc.add(-4.0 * y.1);
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_terms() {
        // plain summation returns 0 here
        let mut acc = Accumulator::default();
        acc.add_prod(1e8, 1e8);
        acc.add(1.0);
        acc.add_prod(-1e8, 1e8);
        assert_eq!(acc.value(), 1.0);
        assert_eq!(1e16 + 1.0 - 1e16, 0.0);
    }

    #[test]
    fn det4_matches_lu_on_a_generic_matrix() {
        let m = nalgebra::Matrix4::new(
            2.0, -1.0, 0.5, 3.0, //
            0.1, 4.0, -2.0, 1.0, //
            1.5, 0.0, 1.0, -1.0, //
            -0.5, 2.5, 0.3, 0.7,
        );
        let (hi, lo) = det4(&m);
        assert!(((hi + lo) / m.determinant() - 1.0).abs() < 1e-14);
        assert_eq!(det4(&nalgebra::Matrix4::identity()), (1.0, 0.0));
    }

    #[test]
    fn det4_survives_heavy_cancellation() {
        // entries ~10⁷, determinant ~10¹²; reference from exact rational arithmetic
        let m = nalgebra::Matrix4::new(
            5.104387989070048e5,
            -2.552191494535024e6,
            -5.107278648304851e5,
            -2.552133510372856e6,
            -2.552191494535024e6,
            1.732551172850762e7,
            2.5551451379319946e6,
            1.732522095280942e7,
            -5.107278648304851e5,
            2.5551451379319946e6,
            5.110179307539654e5,
            2.555087153769827e6,
            -2.552133510372856e6,
            1.732522095280942e7,
            2.555087153769827e6,
            1.7324931177111223e7,
        );
        let (hi, lo) = det4(&m);
        assert!(
            ((hi + lo) / 779523663843.66 - 1.0).abs() < 1e-15,
            "{hi} {lo}"
        );
    }

    #[test]
    fn product_error_is_exact() {
        let a = 1.0 + f64::EPSILON;
        let mut acc = Accumulator::default();
        acc.add_prod(a, a);
        acc.add(-1.0);
        acc.add(-2.0 * f64::EPSILON);
        assert_eq!(acc.value(), f64::EPSILON * f64::EPSILON);
    }
}
