use alloc::string::String;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use crate::{Error, Result};

/// Parameters of the Gaussian-hole density
///
/// ```text
///          exp(−x²/2λ₀²) − K·exp(−x²/2λ₁²)
/// f(x) = ─────────────────────────────────,   λ₀ = σ_O,  λ₁ = σ_Oσ_I / √(σ_O² + σ_I²)
///            √(2π)·(λ₀ − K·λ₁)
/// ```
///
/// `K` sets the depth of the hole at the origin and `σ_I` its width inside
/// an outer Gaussian of scale `σ_O`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianHoleParams {
    k: f64,
    sigma_i_sq: f64,
    sigma_o_sq: f64,
}

/// Second and fourth moments (the odd ones vanish).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub variance: f64,
    pub fourth: f64,
}

impl GaussianHoleParams {
    pub fn new(k: f64, sigma_i_sq: f64, sigma_o_sq: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&k) {
            return Err(Error::Params("K must lie in [0, 1]"));
        }
        if !(sigma_o_sq > 0.0 && sigma_o_sq.is_finite()) {
            return Err(Error::Params("sigma_O^2 must be positive"));
        }
        if !(sigma_i_sq >= 0.0 && sigma_i_sq < sigma_o_sq) {
            return Err(Error::Params("sigma_I^2 must satisfy 0 <= sigma_I^2 < sigma_O^2"));
        }
        let p = GaussianHoleParams {
            k,
            sigma_i_sq,
            sigma_o_sq,
        };
        if p.k * p.lambda1() >= p.lambda0() {
            return Err(Error::Params("degenerate normalization: K·λ1 >= λ0"));
        }
        Ok(p)
    }

    /// Zero-mean Gaussian with variance `sigma_o_sq`.
    pub fn gaussian(sigma_o_sq: f64) -> Result<Self> {
        GaussianHoleParams::new(0.0, 0.0, sigma_o_sq)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn sigma_i_sq(&self) -> f64 {
        self.sigma_i_sq
    }

    pub fn sigma_o_sq(&self) -> f64 {
        self.sigma_o_sq
    }

    pub fn lambda0(&self) -> f64 {
        libm::sqrt(self.sigma_o_sq)
    }

    pub fn lambda1(&self) -> f64 {
        libm::sqrt(self.sigma_o_sq * self.sigma_i_sq / (self.sigma_o_sq + self.sigma_i_sq))
    }

    /// True when the hole term vanishes and the density is Gaussian.
    pub fn is_gaussian(&self) -> bool {
        self.k == 0.0 || self.sigma_i_sq == 0.0
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let l0 = self.lambda0();
        let outer = libm::exp(-x * x / (2.0 * l0 * l0));
        if self.is_gaussian() {
            return outer / (libm::sqrt(2.0 * PI) * l0);
        }
        let l1 = self.lambda1();
        let inner = libm::exp(-x * x / (2.0 * l1 * l1));
        (outer - self.k * inner) / (libm::sqrt(2.0 * PI) * (l0 - self.k * l1))
    }

    /// Product density of independent, identically distributed real and
    /// imaginary parts.
    pub fn complex_pdf(&self, x: f64, y: f64) -> f64 {
        self.pdf(x) * self.pdf(y)
    }

    pub fn moments(&self) -> Moments {
        let l0 = self.lambda0();
        let (k, l1) = if self.is_gaussian() { (0.0, 0.0) } else { (self.k, self.lambda1()) };
        let den = l0 - k * l1;
        let (l0_3, l1_3) = (l0 * l0 * l0, l1 * l1 * l1);
        Moments {
            variance: (l0_3 - k * l1_3) / den,
            fourth: 3.0 * (l0_3 * l0 * l0 - k * l1_3 * l1 * l1) / den,
        }
    }

    /// Acceptance probability of the rejection sampler, `(λ₀ − Kλ₁)/λ₀`.
    pub fn acceptance_rate(&self) -> f64 {
        if self.is_gaussian() {
            1.0
        } else {
            (self.lambda0() - self.k * self.lambda1()) / self.lambda0()
        }
    }
}

impl fmt::Display for GaussianHoleParams {
    /// Plain key-value text, one `key = value` per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "K = {:e}", self.k)?;
        writeln!(f, "sigma_I_sq = {:e}", self.sigma_i_sq)?;
        writeln!(f, "sigma_O_sq = {:e}", self.sigma_o_sq)
    }
}

impl FromStr for GaussianHoleParams {
    type Err = Error;

    /// Parses the format written by `Display`. Blank lines and `#` comments
    /// are ignored; all three keys are required.
    fn from_str(s: &str) -> Result<Self> {
        let mut k = None;
        let mut si = None;
        let mut so = None;
        for line in s.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(Error::Params("expected `key = value`"))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Params("value is not a number"))?;
            let slot = match key.trim() {
                "K" => &mut k,
                "sigma_I_sq" => &mut si,
                "sigma_O_sq" => &mut so,
                _ => return Err(Error::Params("unknown key")),
            };
            *slot = Some(value);
        }
        match (k, si, so) {
            (Some(k), Some(si), Some(so)) => GaussianHoleParams::new(k, si, so),
            _ => Err(Error::Params("missing key; need K, sigma_I_sq and sigma_O_sq")),
        }
    }
}

impl GaussianHoleParams {
    pub fn to_text(&self) -> String {
        alloc::format!("{self}")
    }
}
