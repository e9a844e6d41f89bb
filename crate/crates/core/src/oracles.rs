//! Independent closed-form ground truth on the concentric annulus
//! R < |z| < 1, used to certify the numerical modules.
//!
//! For boundary data Re(zⁿ·conj z) — that is, cos((n−1)θ) on the unit
//! circle and R^{n+1}cos((n−1)θ) on the inner circle — the harmonic
//! extension is known in closed form for every integer n ≠ 1, and its
//! conjugate is single valued. The n = 1 data (1 and R²) is radial; the
//! extension picks up a log term and the conjugate period is
//! 2π(R²−1)/ln R. A Hardy-space series gives the Szegő kernel of the
//! annulus independently of any integral equation.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Closed-form harmonic extension of the annulus boundary data
/// Re(zⁿ·conj z) for modulus `r` and integer `n`.
#[derive(Clone, Copy, Debug)]
pub struct AnnulusOracle {
    r: f64,
    n: i32,
}

impl AnnulusOracle {
    pub fn new(r: f64, n: i32) -> Self {
        assert!(r > 0.0 && r < 1.0, "annulus modulus must be in (0, 1)");
        Self { r, n }
    }

    pub fn modulus(&self) -> f64 {
        self.r
    }

    pub fn power(&self) -> i32 {
        self.n
    }

    /// C_n = (R^{n+1} − R^{n−1})/(R^{n−1} − R^{1−n}); undefined for n = 1.
    pub fn coefficient(&self) -> Option<f64> {
        if self.n == 1 {
            return None;
        }
        let r = self.r;
        Some((r.powi(self.n + 1) - r.powi(self.n - 1)) / (r.powi(self.n - 1) - r.powi(1 - self.n)))
    }

    /// The boundary data itself: Re(zⁿ·conj z).
    pub fn boundary_data(&self, z: Complex64) -> f64 {
        (z.powi(self.n) * z.conj()).re
    }

    /// Harmonic extension u(z), valid on the punctured plane for n ≠ 1 and
    /// on the annulus for n = 1.
    pub fn u(&self, z: Complex64) -> f64 {
        match self.coefficient() {
            Some(c) => {
                let zn1 = z.powi(self.n - 1);
                let z1n = z.powi(1 - self.n);
                (c * (zn1 - z1n) + zn1).re
            }
            None => 1.0 + (self.r * self.r - 1.0) * z.norm().ln() / self.r.ln(),
        }
    }

    /// A conjugate u*(z). Single valued for n ≠ 1; for n = 1 this is the
    /// principal branch (R²−1)·arg(z)/ln R of a multivalued conjugate.
    pub fn u_conjugate(&self, z: Complex64) -> f64 {
        match self.coefficient() {
            Some(c) => {
                let zn1 = z.powi(self.n - 1);
                let z1n = z.powi(1 - self.n);
                (c * (zn1 - z1n) + zn1).im
            }
            None => (self.r * self.r - 1.0) * z.arg() / self.r.ln(),
        }
    }

    /// Conjugate period along a CCW loop around the hole.
    pub fn period(&self) -> f64 {
        if self.n == 1 {
            TAU * (self.r * self.r - 1.0) / self.r.ln()
        } else {
            0.0
        }
    }
}

/// Szegő kernel of the annulus r < |z| < 1 from the orthonormal monomial
/// basis of the Hardy space with arclength measure on both circles:
///
/// ```text
/// S(z, a) = Σ_{n ∈ ℤ} zⁿ·conj(a)ⁿ / (2π(1 + r^{2n+1}))
/// ```
///
/// truncated at |n| ≤ `truncation`. Errors when the last included term is
/// still above 1e-14 in modulus.
pub fn annulus_szego_series(
    r: f64,
    z: Complex64,
    a: Complex64,
    truncation: usize,
) -> Result<Complex64> {
    assert!(r > 0.0 && r < 1.0, "annulus modulus must be in (0, 1)");
    assert!(truncation >= 50, "truncation must be at least 50");
    let q = z * a.conj();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut last: f64 = 0.0;
    for n in -(truncation as i32)..=truncation as i32 {
        let term = q.powi(n) / (TAU * (1.0 + r.powi(2 * n + 1)));
        sum += term;
        if n.unsigned_abs() as usize == truncation {
            last = last.max(term.norm());
        }
    }
    if last > 1e-14 {
        return Err(Error::TruncationInsufficient {
            order: truncation,
            last,
        });
    }
    Ok(sum)
}
