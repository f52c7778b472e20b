//! Dense real bivariate polynomials, homogenization to three variables, the
//! `H` operator and the 3×3 Hessian determinant.
//!
//! Coefficients are stored on a rectangular grid `c[i][j]` for the monomial
//! `x^i y^j`. Degrees stay small here (≤ 12), so dense storage and plain
//! convolution products are adequate; all downstream checks are
//! residual-based in double precision.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AlgebraError {
    #[error("hessian needs degree ≥ 2, got {0}")]
    DegreeTooLow(usize),
}

/// A real polynomial in two variables, dense rectangular coefficient grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariatePoly {
    // coeffs[i][j] multiplies x^i y^j; rows all have equal length.
    coeffs: Vec<Vec<f64>>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self { coeffs: vec![] }
    }

    pub fn constant(c: f64) -> Self {
        if c == 0.0 {
            Self::zero()
        } else {
            Self {
                coeffs: vec![vec![c]],
            }
        }
    }

    /// Builds from `(i, j, coefficient)` triples for `x^i y^j`; repeated
    /// monomials accumulate.
    pub fn from_triples(terms: &[(usize, usize, f64)]) -> Self {
        let ni = terms.iter().map(|t| t.0 + 1).max().unwrap_or(0);
        let nj = terms.iter().map(|t| t.1 + 1).max().unwrap_or(0);
        let mut coeffs = vec![vec![0.0; nj]; ni];
        for &(i, j, c) in terms {
            coeffs[i][j] += c;
        }
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn to_triples(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c != 0.0 {
                    out.push((i, j, c));
                }
            }
        }
        out
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.coeffs
            .get(i)
            .and_then(|row| row.get(j))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|r| r.iter().all(|&c| c == 0.0))
    }

    /// Total degree: `max{i+j : c[i][j] ≠ 0}`; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        let mut d = 0;
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c != 0.0 {
                    d = d.max(i + j);
                }
            }
        }
        d
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        // Horner in x of Horner-in-y row values.
        let mut acc = 0.0;
        for row in self.coeffs.iter().rev() {
            let mut row_val = 0.0;
            for &c in row.iter().rev() {
                row_val = row_val * y + c;
            }
            acc = acc * x + row_val;
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        let ni = self.coeffs.len().max(other.coeffs.len());
        let nj = self
            .coeffs
            .first()
            .map_or(0, |r| r.len())
            .max(other.coeffs.first().map_or(0, |r| r.len()));
        let mut coeffs = vec![vec![0.0; nj]; ni];
        for (i, row) in coeffs.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.coeff(i, j) + other.coeff(i, j);
            }
        }
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut p = Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|r| r.iter().map(|c| c * s).collect())
                .collect(),
        };
        p.trim();
        p
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let ni = self.coeffs.len() + other.coeffs.len() - 1;
        let nj = self.coeffs[0].len() + other.coeffs[0].len() - 1;
        let mut coeffs = vec![vec![0.0; nj]; ni];
        for (i1, r1) in self.coeffs.iter().enumerate() {
            for (j1, &c1) in r1.iter().enumerate() {
                if c1 == 0.0 {
                    continue;
                }
                for (i2, r2) in other.coeffs.iter().enumerate() {
                    for (j2, &c2) in r2.iter().enumerate() {
                        coeffs[i1 + i2][j1 + j2] += c1 * c2;
                    }
                }
            }
        }
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn partial_x(&self) -> Self {
        let mut coeffs: Vec<Vec<f64>> = Vec::new();
        for (i, row) in self.coeffs.iter().enumerate().skip(1) {
            coeffs.push(row.iter().map(|&c| c * i as f64).collect());
        }
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn partial_y(&self) -> Self {
        let coeffs: Vec<Vec<f64>> = self
            .coeffs
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .skip(1)
                    .map(|(j, &c)| c * j as f64)
                    .collect()
            })
            .collect();
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    /// Mixed partial `∂_x^i ∂_y^j`; over-differentiation yields zero.
    pub fn partials(&self, i: usize, j: usize) -> Self {
        let mut p = self.clone();
        for _ in 0..i {
            p = p.partial_x();
        }
        for _ in 0..j {
            p = p.partial_y();
        }
        p
    }

    /// Gradient `(f_x, f_y)` evaluated at a point.
    pub fn gradient_at(&self, x: f64, y: f64) -> (f64, f64) {
        (self.partial_x().eval(x, y), self.partial_y().eval(x, y))
    }

    fn trim(&mut self) {
        while let Some(last) = self.coeffs.last() {
            if last.iter().all(|&c| c == 0.0) {
                self.coeffs.pop();
            } else {
                break;
            }
        }
        let tail = self
            .coeffs
            .iter()
            .map(|r| {
                let mut n = r.len();
                while n > 0 && r[n - 1] == 0.0 {
                    n -= 1;
                }
                n
            })
            .max()
            .unwrap_or(0);
        for row in &mut self.coeffs {
            row.truncate(tail);
            row.resize(tail, 0.0);
        }
    }
}

/// `H(f) = f_xx f_y² − 2 f_xy f_x f_y + f_yy f_x²`.
///
/// Vanishing of `H(f)` on `{f = 0}` marks the inflection points of the real
/// curve; `deg H(f) ≤ 3 deg f − 4`.
pub fn h_operator(f: &BivariatePoly) -> BivariatePoly {
    let fx = f.partial_x();
    let fy = f.partial_y();
    let fxx = fx.partial_x();
    let fxy = fx.partial_y();
    let fyy = fy.partial_y();
    fxx.mul(&fy).mul(&fy)
        .sub(&fxy.mul(&fx).mul(&fy).scale(2.0))
        .add(&fyy.mul(&fx).mul(&fx))
}

/// A homogeneous real polynomial in `(x, y, z)` of fixed total degree.
///
/// Coefficient `c[i][j]` multiplies `x^i y^j z^{d−i−j}`, so the grid plus the
/// degree determines every monomial.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousPoly3 {
    coeffs: Vec<Vec<f64>>,
    degree: usize,
}

impl HomogeneousPoly3 {
    pub fn zero(degree: usize) -> Self {
        Self {
            coeffs: vec![],
            degree,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.coeffs
            .get(i)
            .and_then(|row| row.get(j))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|r| r.iter().all(|&c| c == 0.0))
    }

    pub fn eval(&self, x: f64, y: f64, z: f64) -> f64 {
        let mut acc = 0.0;
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c != 0.0 {
                    acc += c * x.powi(i as i32) * y.powi(j as i32)
                        * z.powi((self.degree - i - j) as i32);
                }
            }
        }
        acc
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|r| r.iter().map(|c| c * s).collect())
                .collect(),
            degree: self.degree,
        }
    }

    /// Sum; both operands must share the degree.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "degree mismatch in sum");
        let ni = self.coeffs.len().max(other.coeffs.len());
        let nj = self
            .coeffs
            .first()
            .map_or(0, |r| r.len())
            .max(other.coeffs.first().map_or(0, |r| r.len()));
        let mut coeffs = vec![vec![0.0; nj]; ni];
        for (i, row) in coeffs.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.coeff(i, j) + other.coeff(i, j);
            }
        }
        Self {
            coeffs,
            degree: self.degree,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let degree = self.degree + other.degree;
        if self.is_zero() || other.is_zero() {
            return Self::zero(degree);
        }
        let ni = self.coeffs.len() + other.coeffs.len() - 1;
        let nj = self.coeffs[0].len() + other.coeffs[0].len() - 1;
        let mut coeffs = vec![vec![0.0; nj]; ni];
        for (i1, r1) in self.coeffs.iter().enumerate() {
            for (j1, &c1) in r1.iter().enumerate() {
                if c1 == 0.0 {
                    continue;
                }
                for (i2, r2) in other.coeffs.iter().enumerate() {
                    for (j2, &c2) in r2.iter().enumerate() {
                        coeffs[i1 + i2][j1 + j2] += c1 * c2;
                    }
                }
            }
        }
        Self { coeffs, degree }
    }

    pub fn partial_x(&self) -> Self {
        let mut coeffs: Vec<Vec<f64>> = Vec::new();
        for (i, row) in self.coeffs.iter().enumerate().skip(1) {
            coeffs.push(row.iter().map(|&c| c * i as f64).collect());
        }
        Self {
            coeffs,
            degree: self.degree.saturating_sub(1),
        }
    }

    pub fn partial_y(&self) -> Self {
        let coeffs: Vec<Vec<f64>> = self
            .coeffs
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .skip(1)
                    .map(|(j, &c)| c * j as f64)
                    .collect()
            })
            .collect();
        Self {
            coeffs,
            degree: self.degree.saturating_sub(1),
        }
    }

    pub fn partial_z(&self) -> Self {
        let coeffs: Vec<Vec<f64>> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, &c)| {
                        // padded grid slots beyond the degree are always zero
                        if i + j >= self.degree {
                            0.0
                        } else {
                            c * (self.degree - i - j) as f64
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            coeffs,
            degree: self.degree.saturating_sub(1),
        }
    }

    /// Restriction to the chart `z = 1`.
    pub fn dehomogenize(&self) -> BivariatePoly {
        let mut triples = Vec::new();
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c != 0.0 {
                    triples.push((i, j, c));
                }
            }
        }
        BivariatePoly::from_triples(&triples)
    }
}

/// Homogenize `f(x, y)` to `f̃(x, y, z)` of the same total degree, so that
/// `f̃(x, y, 1) = f(x, y)`.
pub fn homogenize(f: &BivariatePoly) -> HomogeneousPoly3 {
    let degree = f.degree();
    let mut coeffs = Vec::new();
    for (i, j, c) in f.to_triples() {
        if coeffs.len() <= i {
            coeffs.resize(i + 1, Vec::new());
        }
        let row: &mut Vec<f64> = &mut coeffs[i];
        if row.len() <= j {
            row.resize(j + 1, 0.0);
        }
        row[j] = c;
    }
    let nj = coeffs.iter().map(|r| r.len()).max().unwrap_or(0);
    for row in &mut coeffs {
        row.resize(nj, 0.0);
    }
    HomogeneousPoly3 { coeffs, degree }
}

/// 3×3 Hessian determinant `Hess(f̃) = det(∂²f̃)`, homogeneous of degree
/// `3(d − 2)`.
pub fn hessian3(f: &HomogeneousPoly3) -> Result<HomogeneousPoly3, AlgebraError> {
    let d = f.degree();
    if d < 2 {
        return Err(AlgebraError::DegreeTooLow(d));
    }
    let fx = f.partial_x();
    let fy = f.partial_y();
    let fz = f.partial_z();
    let fxx = fx.partial_x();
    let fxy = fx.partial_y();
    let fxz = fx.partial_z();
    let fyy = fy.partial_y();
    let fyz = fy.partial_z();
    let fzz = fz.partial_z();
    // det of [[fxx, fxy, fxz], [fxy, fyy, fyz], [fxz, fyz, fzz]]
    let det = fxx
        .mul(&fyy.mul(&fzz).sub(&fyz.mul(&fyz)))
        .sub(&fxy.mul(&fxy.mul(&fzz).sub(&fyz.mul(&fxz))))
        .add(&fxz.mul(&fxy.mul(&fyz).sub(&fyy.mul(&fxz))));
    Ok(det)
}
