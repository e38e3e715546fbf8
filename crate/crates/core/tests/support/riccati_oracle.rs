//! Closed form of `Q' = a + b Q + g Q²`, `Q(0) = 0`, with constant
//! `a = gγ/2`, `b = -γ + iω` (no control field).
//!
//! `Q = -u'/(g u)` turns it into `u'' - b u' + a g u = 0` with `u(0) = 1`,
//! `u'(0) = 0`. With roots `r₁` (slow) and `r₂`:
//!
//! ```text
//! Q(t)        = -r₁ r₂ (1 - e^{(r₂-r₁)t}) / (g (r₂ - r₁ e^{(r₂-r₁)t}))
//! ∫₀ᵗ Re Q ds = -ln|u(t)| / g
//! u(t)        = e^{r₁t} (r₂ - r₁ e^{(r₂-r₁)t}) / (r₂ - r₁)
//! ```

use num_complex::Complex64;

pub struct RiccatiOracle {
    pub g: f64,
    slow: Complex64,
    fast: Complex64,
}

impl RiccatiOracle {
    pub fn new(omega: f64, g: f64, gamma: f64) -> Self {
        assert!(g > 0.0);
        let a = g * gamma / 2.0;
        let b = Complex64::new(-gamma, omega);
        let disc = (b * b - 4.0 * a * g).sqrt();
        let (r1, r2) = ((b + disc) / 2.0, (b - disc) / 2.0);
        let (slow, fast) = if r1.re >= r2.re { (r1, r2) } else { (r2, r1) };
        Self { g, slow, fast }
    }

    pub fn roots(&self) -> (Complex64, Complex64) {
        (self.slow, self.fast)
    }

    fn decay(&self, t: f64) -> Complex64 {
        ((self.fast - self.slow) * t).exp()
    }

    pub fn q(&self, t: f64) -> Complex64 {
        let (r1, r2) = (self.slow, self.fast);
        let e = self.decay(t);
        -(r1 * r2) * (1.0 - e) / (self.g * (r2 - r1 * e))
    }

    /// `ln|u(t)|`.
    fn log_abs_u(&self, t: f64) -> f64 {
        let (r1, r2) = (self.slow, self.fast);
        r1.re * t + ((r2 - r1 * self.decay(t)) / (r2 - r1)).norm().ln()
    }

    /// `∫₀ᵗ Re Q ds`.
    pub fn exponent(&self, t: f64) -> f64 {
        -self.log_abs_u(t) / self.g
    }

    /// `exp(-∫₀ᵗ Re Q ds)`.
    pub fn fidelity(&self, t: f64) -> f64 {
        (-self.exponent(t)).exp()
    }

    /// Residual of the Riccati equation by central differences (checks the
    /// closed form itself).
    pub fn residual(&self, omega: f64, gamma: f64, t: f64, h: f64) -> f64 {
        let dq = (self.q(t + h) - self.q(t - h)) / (2.0 * h);
        let q = self.q(t);
        let rhs = self.g * gamma / 2.0 + Complex64::new(-gamma, omega) * q + self.g * q * q;
        (dq - rhs).norm()
    }
}
