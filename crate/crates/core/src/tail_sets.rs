//! Tail sets 𝒜 with a dominating point x₀, together with the closed-form
//! normalization c(n, θ*, x₀) = ∫_{√n(𝒜−x₀)} e^{−√n θ*·y} dy and the
//! conjugate characteristic function ρₙ(t) of the density
//! r(y) = e^{−√n θ*·y}/c on that set.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::real::Real;
use crate::saddlepoint::SaddlePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TailSet<T> {
    /// x₀ + ℝ₊ᵈ.
    FullOrthant { x0: Vec<T> },
    /// x₀ + Q⁺_{d′}: only the first `dims` coordinates are constrained.
    PartialOrthant { x0: Vec<T>, dims: usize },
    /// x₀ + B·ℝ₊ᵈ with B nonsingular.
    AffineOrthant { x0: Vec<T>, matrix: Matrix<T> },
    /// ∏ [x₀ᵢ, x₀ᵢ + Dᵢ]; infinite widths are allowed.
    Rectangle { x0: Vec<T>, widths: Vec<T> },
    /// Σ ±𝟙_{𝒜ₖ}. Each term has its own dominating point and is estimated
    /// separately.
    SignedCombination(Vec<(Sign, TailSet<T>)>),
}

impl<T: Real> TailSet<T> {
    pub fn full_orthant(x0: Vec<T>) -> Self {
        Self::FullOrthant { x0 }
    }

    pub fn partial_orthant(x0: Vec<T>, dims: usize) -> Result<Self> {
        if dims > x0.len() {
            return Err(Error::Dimension {
                expected: x0.len(),
                got: dims,
            });
        }
        Ok(Self::PartialOrthant { x0, dims })
    }

    pub fn affine_orthant(x0: Vec<T>, matrix: Matrix<T>) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != x0.len() {
            return Err(Error::Dimension {
                expected: x0.len(),
                got: matrix.rows(),
            });
        }
        if matrix.lu().is_none() {
            return Err(Error::Parameter("affine orthant matrix is singular".into()));
        }
        Ok(Self::AffineOrthant { x0, matrix })
    }

    pub fn rectangle(x0: Vec<T>, widths: Vec<T>) -> Result<Self> {
        if widths.len() != x0.len() {
            return Err(Error::Dimension {
                expected: x0.len(),
                got: widths.len(),
            });
        }
        if let Some(i) = widths.iter().position(|w| !(*w > T::zero())) {
            return Err(Error::Parameter(format!("rectangle width {i} must be positive")));
        }
        Ok(Self::Rectangle { x0, widths })
    }

    pub fn signed(terms: Vec<(Sign, TailSet<T>)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Parameter("signed combination needs at least one term".into()));
        }
        let d = terms[0].1.dim();
        if let Some(t) = terms.iter().find(|t| t.1.dim() != d) {
            return Err(Error::Dimension {
                expected: d,
                got: t.1.dim(),
            });
        }
        Ok(Self::SignedCombination(terms))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::FullOrthant { x0 }
            | Self::PartialOrthant { x0, .. }
            | Self::AffineOrthant { x0, .. }
            | Self::Rectangle { x0, .. } => x0.len(),
            Self::SignedCombination(terms) => terms[0].1.dim(),
        }
    }

    /// Number of constrained coordinates: d′ for a partial orthant, d otherwise.
    pub fn effective_dim(&self) -> usize {
        match self {
            Self::PartialOrthant { dims, .. } => *dims,
            _ => self.dim(),
        }
    }

    /// The dominating point; `None` for a signed combination.
    pub fn x0(&self) -> Option<&[T]> {
        match self {
            Self::FullOrthant { x0 }
            | Self::PartialOrthant { x0, .. }
            | Self::AffineOrthant { x0, .. }
            | Self::Rectangle { x0, .. } => Some(x0),
            Self::SignedCombination(_) => None,
        }
    }

    pub fn is_signed(&self) -> bool {
        matches!(self, Self::SignedCombination(_))
    }

    /// 𝟙_𝒜(x), or Σ ±𝟙_{𝒜ₖ}(x) for a signed combination.
    pub fn indicator(&self, x: &[T]) -> T {
        match self {
            Self::SignedCombination(terms) => terms.iter().map(|(s, set)| s.value::<T>() * set.indicator(x)).sum(),
            _ => {
                if self.contains(x) {
                    T::one()
                } else {
                    T::zero()
                }
            }
        }
    }

    pub fn contains(&self, x: &[T]) -> bool {
        match self {
            Self::FullOrthant { x0 } => x.iter().zip(x0).all(|(a, b)| a >= b),
            Self::PartialOrthant { x0, dims } => x.iter().zip(x0).take(*dims).all(|(a, b)| a >= b),
            Self::AffineOrthant { x0, matrix } => {
                let diff: Vec<T> = x.iter().zip(x0).map(|(&a, &b)| a - b).collect();
                matrix
                    .lu()
                    .map(|lu| lu.solve(&diff).iter().all(|z| *z >= T::zero()))
                    .unwrap_or(false)
            }
            Self::Rectangle { x0, widths } => x
                .iter()
                .zip(x0)
                .zip(widths)
                .all(|((&a, &lo), &w)| a >= lo && a - lo <= w),
            Self::SignedCombination(_) => self.indicator(x) > T::lit(0.5),
        }
    }

    /// Rates in the coordinates where the set is a product of half-lines:
    /// θ*ᵢ (i < d′) or (Bᵀθ*)ᵢ. Errors when a rate is not positive, or
    /// when a partial orthant has nonzero θ* on a free coordinate.
    pub fn rates(&self, sp: &SaddlePoint<T>) -> Result<Vec<T>> {
        if sp.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: sp.dim(),
            });
        }
        let (rates, label) = match self {
            Self::FullOrthant { .. } | Self::Rectangle { .. } => (sp.theta.clone(), "theta"),
            Self::PartialOrthant { dims, .. } => {
                let scale = T::one() + crate::linalg::norm(&sp.theta);
                for (i, &t) in sp.theta.iter().enumerate().skip(*dims) {
                    if t.abs() > T::tol(1e-8) * scale {
                        return Err(Error::DominatingPoint {
                            coordinate: i,
                            detail: format!(
                                "theta_{i} = {t} must vanish on an unconstrained coordinate; \
                                 choose x0_{i} at the conditional mean"
                            ),
                        });
                    }
                }
                (sp.theta[..*dims].to_vec(), "theta")
            }
            Self::AffineOrthant { matrix, .. } => (matrix.tr_mul_vec(&sp.theta), "(B^T theta)"),
            Self::SignedCombination(_) => {
                return Err(Error::Unsupported(
                    "a signed combination has no single dominating point; evaluate each term".into(),
                ))
            }
        };
        for (i, &r) in rates.iter().enumerate() {
            if !(r > T::zero()) {
                let hint = if r == T::zero() {
                    "c(n, theta*, x0) is infinite; use a partial orthant on the remaining coordinates"
                } else {
                    "x0 is not a dominating point; rewrite the set as a signed combination \
                     (e.g. P[Z1>=a, Z2>=b] = P[Z1>=a] - P[Z1>=a, Z2<b])"
                };
                return Err(Error::DominatingPoint {
                    coordinate: i,
                    detail: format!("{label}_{i} = {r} is not positive; {hint}"),
                });
            }
        }
        Ok(rates)
    }

    /// The saddle point in the constrained coordinates (leading block for a
    /// partial orthant, unchanged otherwise).
    pub fn effective_saddle(&self, sp: &SaddlePoint<T>) -> Result<SaddlePoint<T>> {
        match self {
            Self::PartialOrthant { dims, .. } => {
                self.rates(sp)?;
                sp.leading(*dims)
            }
            _ => Ok(sp.clone()),
        }
    }

    /// Closed-form c(n, θ*, x₀).
    pub fn c_constant(&self, sp: &SaddlePoint<T>, n: usize) -> Result<T> {
        let rates = self.rates(sp)?;
        let nn = T::from_usize_lossy(n);
        let sqrt_n = nn.sqrt();
        let base = rates.iter().fold(T::one(), |acc, &r| acc / (sqrt_n * r));
        let c = match self {
            Self::AffineOrthant { matrix, .. } => matrix.determinant().abs() * base,
            Self::Rectangle { widths, .. } => rates
                .iter()
                .zip(widths)
                .fold(base, |acc, (&r, &w)| acc * (T::one() - (-nn * r * w).exp())),
            _ => base,
        };
        if !(c.is_finite() && c > T::zero()) {
            return Err(Error::InfiniteTailConstant(format!("c = {c}")));
        }
        Ok(c)
    }

    /// ρₙ(t) = ∫ e^{−it·y} r(y) dy; `t` has the effective dimension.
    pub fn rho(&self, sp: &SaddlePoint<T>, n: usize, t: &[T]) -> Result<Complex<T>> {
        let rates = self.rates(sp)?;
        if t.len() != rates.len() {
            return Err(Error::Dimension {
                expected: rates.len(),
                got: t.len(),
            });
        }
        Ok(self.rho_with_rates(&rates, n, t))
    }

    /// `rho` with the rates already validated; used in the sampling loop.
    pub(crate) fn rho_with_rates(&self, rates: &[T], n: usize, t: &[T]) -> Complex<T> {
        let nn = T::from_usize_lossy(n);
        let sqrt_n = nn.sqrt();
        let one = Complex::new(T::one(), T::zero());
        let half_line = |r: T, s: T| one / Complex::new(T::one(), s / (sqrt_n * r));
        match self {
            Self::AffineOrthant { matrix, .. } => {
                let bt = matrix.tr_mul_vec(t);
                rates.iter().zip(&bt).fold(one, |acc, (&r, &s)| acc * half_line(r, s))
            }
            Self::Rectangle { widths, .. } => {
                rates.iter().zip(t).zip(widths).fold(one, |acc, ((&r, &s), &w)| {
                    let mut f = half_line(r, s);
                    if w.is_finite() {
                        // (1 − e^{−nθD(1 + is/(√nθ))}) / (1 − e^{−nθD})
                        let decay = -nn * r * w;
                        let z = Complex::new(decay, -sqrt_n * w * s);
                        f = f * (one - z.exp()) / (T::one() - decay.exp());
                    }
                    acc * f
                })
            }
            _ => rates.iter().zip(t).fold(one, |acc, (&r, &s)| acc * half_line(r, s)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgf::{CumulantModel, Family};
    use crate::saddlepoint::{exact_asymptotic_tail, solve_saddle_point};
    use approx::assert_relative_eq;

    fn exp_saddle(x0: f64) -> SaddlePoint<f64> {
        solve_saddle_point(&Family::exponential(1.0).unwrap(), &[x0], None).unwrap()
    }

    #[test]
    fn full_orthant_constant_and_rho() {
        let sp = exp_saddle(1.5);
        let set = TailSet::full_orthant(vec![1.5]);
        assert_relative_eq!(
            set.c_constant(&sp, 50).unwrap(),
            0.424_264_068_711_928_5,
            max_relative = 1e-12
        );
        assert_eq!(set.rho(&sp, 50, &[0.0]).unwrap(), Complex::new(1.0, 0.0));
        let r = set.rho(&sp, 50, &[1.0]).unwrap();
        let want = Complex::new(1.0, 0.0) / Complex::new(1.0, 0.424_264_068_711_928_5);
        assert!((r - want).norm() < 1e-14);
        let rm = set.rho(&sp, 50, &[-1.0]).unwrap();
        assert!((rm - r.conj()).norm() < 1e-15);
        assert!(r.norm() <= 1.0);
    }

    #[test]
    fn wide_rectangle_matches_orthant() {
        let sp = exp_saddle(1.5);
        let orth = TailSet::full_orthant(vec![1.5]);
        let inf = TailSet::rectangle(vec![1.5], vec![f64::INFINITY]).unwrap();
        let wide = TailSet::rectangle(vec![1.5], vec![1e3]).unwrap();
        for set in [&inf, &wide] {
            assert_relative_eq!(
                set.c_constant(&sp, 50).unwrap(),
                orth.c_constant(&sp, 50).unwrap(),
                max_relative = 1e-12
            );
            let a = set.rho(&sp, 50, &[0.7]).unwrap();
            let b = orth.rho(&sp, 50, &[0.7]).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn identity_affine_matches_orthant() {
        let m = Family::iid(Family::exponential(1.0).unwrap(), 2).unwrap();
        let sp = solve_saddle_point(&m, &[1.5, 2.0], None).unwrap();
        let orth = TailSet::full_orthant(vec![1.5, 2.0]);
        let aff = TailSet::affine_orthant(vec![1.5, 2.0], Matrix::identity(2)).unwrap();
        assert_relative_eq!(
            orth.c_constant(&sp, 20).unwrap(),
            aff.c_constant(&sp, 20).unwrap(),
            max_relative = 1e-12
        );
        for t in [[0.3, -1.0], [2.0, 0.5]] {
            let a = orth.rho(&sp, 20, &t).unwrap();
            let b = aff.rho(&sp, 20, &t).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn table2_constant_reproduces_prefactor() {
        let b = Matrix::from_row_major(3, 3, vec![0.5, 0.5, 0.0, 0.0, 0.5, 0.5, 0.5, 0.0, 0.5]).unwrap();
        let m = Family::linear_map(Family::iid(Family::exponential(1.0).unwrap(), 3).unwrap(), b).unwrap();
        let x0 = vec![1.4, 1.5, 1.4];
        let sp = solve_saddle_point(&m, &x0, None).unwrap();
        let set = TailSet::full_orthant(x0);
        let c = set.c_constant(&sp, 10).unwrap();
        let th: f64 = sp.theta.iter().product();
        assert_relative_eq!(c, 1.0 / (10f64.powf(1.5) * th), max_relative = 1e-12);
        let p = exact_asymptotic_tail(&sp, &set, 10).unwrap();
        assert!((p - 0.012_256_2).abs() / 0.012_256_2 < 5e-5);
    }

    #[test]
    fn dominating_point_failures() {
        let sp = exp_saddle(0.5); // θ* < 0
        let err = TailSet::full_orthant(vec![0.5]).c_constant(&sp, 10).unwrap_err();
        match err {
            Error::DominatingPoint { coordinate: 0, detail } => assert!(detail.contains("signed")),
            other => panic!("{other:?}"),
        }
        let at_mean = exp_saddle(1.0);
        assert!(matches!(
            TailSet::full_orthant(vec![1.0]).c_constant(&at_mean, 10),
            Err(Error::DominatingPoint { .. })
        ));
        // Partial orthant needs θ* = 0 on the free coordinate.
        let m = Family::iid(Family::exponential(1.0).unwrap(), 2).unwrap();
        let sp = solve_saddle_point(&m, &[1.5, 1.2], None).unwrap();
        let set = TailSet::partial_orthant(vec![1.5, 1.2], 1).unwrap();
        assert!(matches!(
            set.c_constant(&sp, 10),
            Err(Error::DominatingPoint { coordinate: 1, .. })
        ));
        let sp = solve_saddle_point(&m, &[1.5, 1.0], None).unwrap();
        assert_relative_eq!(
            set.c_constant(&sp, 16).unwrap(),
            1.0 / (4.0 / 3.0),
            max_relative = 1e-12
        );
        let signed = TailSet::signed(vec![(Sign::Plus, TailSet::full_orthant(vec![1.5, 1.0]))]).unwrap();
        assert!(matches!(signed.c_constant(&sp, 10), Err(Error::Unsupported(_))));
    }

    #[test]
    fn membership() {
        let aff = TailSet::affine_orthant(vec![1.0, 1.0], Matrix::diagonal(&[1.0, -1.0])).unwrap();
        assert!(aff.contains(&[1.5, 0.5]));
        assert!(!aff.contains(&[1.5, 1.5]));
        let rect = TailSet::rectangle(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap();
        assert!(rect.contains(&[0.5, 1.9]));
        assert!(!rect.contains(&[0.5, 2.1]));
        let whole = TailSet::partial_orthant(vec![0.0, 0.0], 0).unwrap();
        assert!(whole.contains(&[-5.0, -5.0]));
        let signed = TailSet::signed(vec![
            (Sign::Plus, TailSet::partial_orthant(vec![1.0, 0.0], 1).unwrap()),
            (Sign::Minus, aff.clone()),
        ])
        .unwrap();
        // {z1 ≥ 1} − {z1 ≥ 1, z2 ≤ 1} = {z1 ≥ 1, z2 > 1}
        assert_eq!(signed.indicator(&[1.5, 2.0]), 1.0);
        assert_eq!(signed.indicator(&[1.5, 0.0]), 0.0);
        assert_eq!(signed.indicator(&[0.5, 2.0]), 0.0);
    }

    fn simpson(f: impl Fn(f64) -> Complex<f64>, a: f64, b: f64, intervals: usize) -> Complex<f64> {
        let h = (b - a) / intervals as f64;
        let mut acc = f(a) + f(b);
        for i in 1..intervals {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += f(a + i as f64 * h) * w;
        }
        acc * (h / 3.0)
    }

    // ρ(t) against ∫ e^{−ity} r(y) dy computed by quadrature.
    #[test]
    fn fourier_oracle_one_dimensional() {
        let sp = exp_saddle(1.5);
        let n = 50;
        let lambda = (n as f64).sqrt() * sp.theta[0];
        let neg = Family::exponential(1.0).unwrap();
        let sp_low: SaddlePoint<f64> = solve_saddle_point(&neg, &[0.6], None).unwrap();
        let lambda_low = (n as f64).sqrt() * sp_low.theta[0].abs();
        let cases: Vec<(TailSet<f64>, &SaddlePoint<f64>, f64, f64)> = vec![
            (TailSet::full_orthant(vec![1.5]), &sp, 0.0, 40.0),
            (
                TailSet::rectangle(vec![1.5], vec![0.1]).unwrap(),
                &sp,
                0.0,
                (n as f64).sqrt() * 0.1,
            ),
            // x₀ − ℝ₊: lower tail through B = [−1].
            (
                TailSet::affine_orthant(vec![0.6], Matrix::diagonal(&[-1.0])).unwrap(),
                &sp_low,
                -40.0,
                0.0,
            ),
        ];
        for (set, sp, lo, hi) in cases {
            let c = set.c_constant(sp, n).unwrap();
            let lam = if lo < 0.0 { lambda_low } else { lambda };
            let r = |y: f64| (-lam * y.abs()).exp() / c;
            for t in [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0] {
                let q = simpson(|y| Complex::new(0.0, -t * y).exp() * r(y), lo, hi, 40_000);
                let rho = set.rho(sp, n, &[t]).unwrap();
                assert!((q - rho).norm() < 1e-6, "{set:?} t={t}: {q} vs {rho}");
            }
        }
    }

    #[test]
    fn rho_tends_to_one() {
        let sp = exp_saddle(1.5);
        for set in [
            TailSet::full_orthant(vec![1.5]),
            TailSet::rectangle(vec![1.5], vec![0.5]).unwrap(),
        ] {
            let devs: Vec<f64> = [10, 100, 1000, 10_000]
                .iter()
                .map(|&n| (set.rho(&sp, n, &[1.3]).unwrap() - 1.0).norm())
                .collect();
            for w in devs.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "{set:?}: {devs:?}");
            }
        }
    }

    #[test]
    fn effective_dimension() {
        let m = Family::iid(Family::exponential(1.0).unwrap(), 3).unwrap();
        let set = TailSet::partial_orthant(vec![1.5, 1.0, 1.0], 1).unwrap();
        let sp = solve_saddle_point(&m, &[1.5, 1.0, 1.0], None).unwrap();
        assert_eq!(set.effective_dim(), 1);
        let red = set.effective_saddle(&sp).unwrap();
        assert_eq!(red.dim(), 1);
        assert_relative_eq!(red.det, m.hess(&sp.theta)[(0, 0)], max_relative = 1e-12);
    }
}
