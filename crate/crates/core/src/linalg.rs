//! Small dense kernels: real 3x3 matrices, the scaling-and-squaring matrix
//! exponential, closed-form cubic roots, and Gauss-Legendre nodes.
//!
//! Everything here is sized for the per-mode 3x3 systems; no general linear
//! algebra dependency is warranted.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real 3x3 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3 {
    pub m: [[f64; 3]; 3],
}

impl Mat3 {
    pub const ZERO: Mat3 = Mat3 { m: [[0.0; 3]; 3] };

    pub fn identity() -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Mat3 { m }
    }

    pub fn scale(&self, s: f64) -> Mat3 {
        let mut out = *self;
        for row in &mut out.m {
            for v in row {
                *v *= s;
            }
        }
        out
    }

    pub fn add(&self, other: &Mat3) -> Mat3 {
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] += other.m[i][j];
            }
        }
        out
    }

    pub fn sub(&self, other: &Mat3) -> Mat3 {
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] -= other.m[i][j];
            }
        }
        out
    }

    pub fn mul(&self, other: &Mat3) -> Mat3 {
        let mut out = Mat3::ZERO;
        for i in 0..3 {
            for k in 0..3 {
                let a = self.m[i][k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..3 {
                    out.m[i][j] += a * other.m[k][j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = self.m[i][0] * v[0] + self.m[i][1] * v[1] + self.m[i][2] * v[2];
        }
        out
    }

    /// Apply to a complex vector (real matrix, complex state).
    pub fn matvec_c(&self, v: [Complex64; 3]) -> [Complex64; 3] {
        let mut out = [Complex64::default(); 3];
        for i in 0..3 {
            out[i] = v[0] * self.m[i][0] + v[1] * self.m[i][1] + v[2] * self.m[i][2];
        }
        out
    }

    pub fn det(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn inverse(&self) -> Result<Mat3> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return Err(Error::numerical(format!("singular 3x3 matrix, det = {d}")));
        }
        let m = &self.m;
        let adj = [
            [
                m[1][1] * m[2][2] - m[1][2] * m[2][1],
                m[0][2] * m[2][1] - m[0][1] * m[2][2],
                m[0][1] * m[1][2] - m[0][2] * m[1][1],
            ],
            [
                m[1][2] * m[2][0] - m[1][0] * m[2][2],
                m[0][0] * m[2][2] - m[0][2] * m[2][0],
                m[0][2] * m[1][0] - m[0][0] * m[1][2],
            ],
            [
                m[1][0] * m[2][1] - m[1][1] * m[2][0],
                m[0][1] * m[2][0] - m[0][0] * m[2][1],
                m[0][0] * m[1][1] - m[0][1] * m[1][0],
            ],
        ];
        let mut out = Mat3 { m: adj };
        out = out.scale(1.0 / d);
        Ok(out)
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let mut best = 0.0f64;
        for j in 0..3 {
            let s = self.m[0][j].abs() + self.m[1][j].abs() + self.m[2][j].abs();
            best = best.max(s);
        }
        best
    }

    pub fn transpose(&self) -> Mat3 {
        let mut out = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = self.m[j][i];
            }
        }
        out
    }
}

/// Matrix exponential by scaling and squaring with the order-13 Pade
/// approximant (Higham's thresholds, specialized to 3x3).
pub fn expm(a: &Mat3) -> Mat3 {
    const THETA13: f64 = 5.371920351148152;
    let norm = a.one_norm();
    let squarings = if norm <= THETA13 {
        0
    } else {
        (norm / THETA13).log2().ceil() as u32
    };
    let a_scaled = a.scale(0.5f64.powi(squarings as i32));
    let mut e = pade13(&a_scaled);
    for _ in 0..squarings {
        e = e.mul(&e);
    }
    e
}

fn pade13(a: &Mat3) -> Mat3 {
    // Higham's coefficients, normalized by b0 to keep the solve well scaled
    const RAW: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let mut b = [0.0; 14];
    for (dst, src) in b.iter_mut().zip(RAW.iter()) {
        *dst = src / RAW[0];
    }
    let id = Mat3::identity();
    let a2 = a.mul(a);
    let a4 = a2.mul(&a2);
    let a6 = a4.mul(&a2);
    let u_inner = a6
        .scale(b[13])
        .add(&a4.scale(b[11]))
        .add(&a2.scale(b[9]));
    let u = a.mul(
        &a6.mul(&u_inner)
            .add(&a6.scale(b[7]))
            .add(&a4.scale(b[5]))
            .add(&a2.scale(b[3]))
            .add(&id.scale(b[1])),
    );
    let v_inner = a6
        .scale(b[12])
        .add(&a4.scale(b[10]))
        .add(&a2.scale(b[8]));
    let v = a6
        .mul(&v_inner)
        .add(&a6.scale(b[6]))
        .add(&a4.scale(b[4]))
        .add(&a2.scale(b[2]))
        .add(&id.scale(b[0]));
    // (V - U)^-1 (V + U)
    let denom = v.sub(&u);
    let numer = v.add(&u);
    denom
        .inverse()
        .expect("Pade denominator is nonsingular for scaled input")
        .mul(&numer)
}

fn eval_cubic(c: [f64; 4], z: Complex64) -> Complex64 {
    ((z * c[0] + c[1]) * z + c[2]) * z + c[3]
}

fn eval_cubic_deriv(c: [f64; 4], z: Complex64) -> Complex64 {
    (z * 3.0 * c[0] + 2.0 * c[1]) * z + c[2]
}

/// Roots of `a z^3 + b z^2 + c z + d` with `a != 0`, by the trigonometric /
/// Cardano closed form followed by two Newton polish steps. Sorted by real
/// part, then imaginary part.
pub fn cubic_roots(a: f64, b: f64, c: f64, d: f64) -> [Complex64; 3] {
    assert!(a != 0.0, "leading cubic coefficient must be nonzero");
    let coeffs = [a, b, c, d];
    // depressed cubic y^3 + p y + q with z = y - b/(3a)
    let b_n = b / a;
    let c_n = c / a;
    let d_n = d / a;
    let shift = b_n / 3.0;
    let p = c_n - b_n * b_n / 3.0;
    let q = 2.0 * b_n.powi(3) / 27.0 - b_n * c_n / 3.0 + d_n;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);

    let mut roots = if disc > 0.0 {
        // one real root, a conjugate pair
        let sq = disc.sqrt();
        let u = (-q / 2.0 + sq).cbrt();
        let v = (-q / 2.0 - sq).cbrt();
        let y1 = u + v;
        let re = -y1 / 2.0;
        let im = (u - v) * 3.0f64.sqrt() / 2.0;
        [
            Complex64::new(y1 - shift, 0.0),
            Complex64::new(re - shift, im),
            Complex64::new(re - shift, -im),
        ]
    } else {
        // three real roots (trigonometric form)
        let r = (-p / 3.0).max(0.0).sqrt();
        let arg = if r == 0.0 {
            0.0
        } else {
            (3.0 * q / (2.0 * p * r)).clamp(-1.0, 1.0)
        };
        let phi = arg.acos();
        let mut out = [Complex64::default(); 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let y = 2.0 * r * ((phi - 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos();
            *slot = Complex64::new(y - shift, 0.0);
        }
        out
    };

    for z in &mut roots {
        for _ in 0..2 {
            let f = eval_cubic(coeffs, *z);
            let df = eval_cubic_deriv(coeffs, *z);
            if df.norm() > 1e-300 {
                let step = f / df;
                if step.norm().is_finite() {
                    *z -= step;
                }
            }
        }
        // real roots of real cubics stay real under polish
        if z.im.abs() < 1e-14 * (1.0 + z.re.abs()) {
            *z = Complex64::new(z.re, 0.0);
        }
    }
    sort_roots(&mut roots);
    roots
}

/// Independent root finder (Durand-Kerner iteration); used as an oracle
/// against the closed form.
pub fn durand_kerner_roots(a: f64, b: f64, c: f64, d: f64) -> [Complex64; 3] {
    assert!(a != 0.0);
    let coeffs = [a, b, c, d];
    let radius = 1.0
        + [b, c, d]
            .iter()
            .map(|v| (v / a).abs())
            .fold(0.0f64, f64::max);
    let mut z = [
        Complex64::new(0.4, 0.9) * radius,
        (Complex64::new(0.4, 0.9) * radius).powu(2) / radius,
        (Complex64::new(0.4, 0.9) * radius).powu(3) / (radius * radius),
    ];
    for _ in 0..200 {
        let mut next = z;
        let mut delta = 0.0f64;
        for i in 0..3 {
            let mut denom = Complex64::new(a, 0.0);
            for j in 0..3 {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() < 1e-300 {
                continue;
            }
            let step = eval_cubic(coeffs, z[i]) / denom;
            next[i] = z[i] - step;
            delta = delta.max(step.norm());
        }
        z = next;
        if delta < 1e-15 * radius {
            break;
        }
    }
    for v in &mut z {
        if v.im.abs() < 1e-12 * (1.0 + v.re.abs()) {
            *v = Complex64::new(v.re, 0.0);
        }
    }
    sort_roots(&mut z);
    z
}

fn sort_roots(roots: &mut [Complex64; 3]) {
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
}

/// Eigenvalues of the symmetric pencil `(A, B)` with `B` positive definite:
/// the roots of `det(A - lambda B) = 0`, always real. Returned ascending.
pub fn generalized_sym_eigs(a: &Mat3, b: &Mat3) -> [f64; 3] {
    // det(A - t B) expanded via column substitutions
    let det_mixed = |cols: [usize; 3]| -> f64 {
        // cols[j] = 0 takes column j from A, 1 from B
        let col = |j: usize| -> [f64; 3] {
            let src = if cols[j] == 0 { a } else { b };
            [src.m[0][j], src.m[1][j], src.m[2][j]]
        };
        let (c0, c1, c2) = (col(0), col(1), col(2));
        c0[0] * (c1[1] * c2[2] - c1[2] * c2[1]) - c1[0] * (c0[1] * c2[2] - c0[2] * c2[1])
            + c2[0] * (c0[1] * c1[2] - c0[2] * c1[1])
    };
    let c0 = det_mixed([0, 0, 0]); // det A
    let c1 = -(det_mixed([1, 0, 0]) + det_mixed([0, 1, 0]) + det_mixed([0, 0, 1]));
    let c2 = det_mixed([1, 1, 0]) + det_mixed([1, 0, 1]) + det_mixed([0, 1, 1]);
    let c3 = -det_mixed([1, 1, 1]); // -det B
    let roots = cubic_roots(c3, c2, c1, c0);
    let mut out = [roots[0].re, roots[1].re, roots[2].re];
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Nodes/weights for `Int_a^b f`, mapped from [`gauss_legendre`].
pub fn gauss_legendre_on(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    gauss_legendre(n)
        .into_iter()
        .map(|(x, w)| (mid + half * x, half * w))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Taylor-series exponential; independent oracle for `expm`. Squarings
    /// are kept minimal (each one doubles accumulated rounding).
    fn expm_series(a: &Mat3) -> Mat3 {
        let norm = a.one_norm();
        let s = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as i32
        } else {
            0
        };
        let scaled = a.scale(0.5f64.powi(s));
        let mut term = Mat3::identity();
        let mut sum = Mat3::identity();
        for k in 1..40 {
            term = term.mul(&scaled).scale(1.0 / k as f64);
            sum = sum.add(&term);
        }
        let mut e = sum;
        for _ in 0..s {
            e = e.mul(&e);
        }
        e
    }

    fn mat_dist(a: &Mat3, b: &Mat3) -> f64 {
        a.sub(b).one_norm()
    }

    #[test]
    fn expm_of_zero_is_identity() {
        assert_eq!(expm(&Mat3::ZERO), Mat3::identity());
    }

    #[test]
    fn expm_matches_series_oracle() {
        let a = Mat3 {
            m: [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [-2.0, -4.0, -2.0]],
        };
        for dt in [0.01, 0.3, 2.0, 11.0] {
            let e = expm(&a.scale(dt));
            let o = expm_series(&a.scale(dt));
            assert!(
                mat_dist(&e, &o) <= 1e-11 * (1.0 + o.one_norm()),
                "dt = {dt}: dist = {:.3e}",
                mat_dist(&e, &o)
            );
        }
    }

    #[test]
    fn cubic_roots_match_durand_kerner() {
        let cases = [
            (1.0, 1.0, 2.0, 1.0),
            (0.5, 1.0, 1.0, 1.0),
            (2.0, -3.0, 0.5, -7.0),
            (1.0, 0.0, 0.0, -1.0),
            (1.0, -6.0, 11.0, -6.0), // roots 1, 2, 3
        ];
        for (a, b, c, d) in cases {
            let r1 = cubic_roots(a, b, c, d);
            let r2 = durand_kerner_roots(a, b, c, d);
            for (x, y) in r1.iter().zip(&r2) {
                assert!((x - y).norm() < 1e-10, "{a} {b} {c} {d}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn repeated_real_roots_are_resolved() {
        // (z-1)^2 (z+2) = z^3 - 3z + 2
        let r = cubic_roots(1.0, 0.0, -3.0, 2.0);
        assert!((r[0].re + 2.0).abs() < 1e-8);
        assert!((r[1].re - 1.0).abs() < 1e-6);
        assert!((r[2].re - 1.0).abs() < 1e-6);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        // n nodes are exact through degree 2n-1
        let nodes = gauss_legendre_on(0.0, 2.0, 6);
        for deg in 0..=11usize {
            let got: f64 = nodes.iter().map(|(x, w)| w * x.powi(deg as i32)).sum();
            let exact = 2.0f64.powi(deg as i32 + 1) / (deg as f64 + 1.0);
            assert!((got - exact).abs() < 1e-12 * exact.max(1.0), "deg {deg}");
        }
    }

    #[test]
    fn generalized_eigs_bound_rayleigh_quotients() {
        let a = Mat3 {
            m: [[2.0, 0.3, 0.1], [0.3, 1.0, -0.2], [0.1, -0.2, 0.5]],
        };
        let b = Mat3 {
            m: [[1.0, 0.1, 0.0], [0.1, 2.0, 0.0], [0.0, 0.0, 0.4]],
        };
        let eigs = generalized_sym_eigs(&a, &b);
        // random Rayleigh quotients x'Ax / x'Bx must lie within [min, max]
        let mut state = 123456789u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
        };
        for _ in 0..500 {
            let x = [next(), next(), next()];
            let num: f64 = (0..3)
                .map(|i| x[i] * (0..3).map(|j| a.m[i][j] * x[j]).sum::<f64>())
                .sum();
            let den: f64 = (0..3)
                .map(|i| x[i] * (0..3).map(|j| b.m[i][j] * x[j]).sum::<f64>())
                .sum();
            if den.abs() < 1e-12 {
                continue;
            }
            let q = num / den;
            assert!(q >= eigs[0] - 1e-9 && q <= eigs[2] + 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn expm_semigroup_property(t1 in 0.01f64..3.0, t2 in 0.01f64..3.0,
                                   xi in 0.0f64..20.0, tau in 0.1f64..1.5, beta in 0.2f64..2.5) {
            let a = Mat3 {
                m: [
                    [0.0, 1.0, 0.0],
                    [0.0, 0.0, 1.0],
                    [-xi * xi / tau, -beta * xi * xi / tau, -1.0 / tau],
                ],
            };
            let lhs = expm(&a.scale(t1)).mul(&expm(&a.scale(t2)));
            let rhs = expm(&a.scale(t1 + t2));
            let scale = rhs.one_norm().max(1.0);
            prop_assert!(mat_dist(&lhs, &rhs) <= 1e-12 * scale * (1.0 + a.one_norm() * (t1 + t2)));
        }

        #[test]
        fn cubic_vieta_relations(a in 0.2f64..2.0, b in -3.0f64..3.0, c in -3.0f64..3.0, d in -3.0f64..3.0) {
            let r = cubic_roots(a, b, c, d);
            let sum = r[0] + r[1] + r[2];
            let prod = r[0] * r[1] * r[2];
            prop_assert!((sum + b / a).norm() < 1e-8 * (1.0 + (b / a).abs()));
            prop_assert!((prod + d / a).norm() < 1e-8 * (1.0 + (d / a).abs()));
        }
    }
}
