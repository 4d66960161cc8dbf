//! The L_p maximum-entropy family.
//!
//! For an exponent `p >= 1` and scale `mu > 0` the density
//!
//! ```text
//! f(x) = exp(-|x|^p / (p mu^p)) / (2 Γ((p+1)/p) p^{1/p} mu)
//! ```
//!
//! has L_p norm `mu` and the largest differential entropy among all
//! densities with that L_p norm. `p = 1` is the Laplace density, `p = 2` the
//! Gaussian with standard deviation `mu`, and the `p = ∞` member is the
//! uniform density on `[-mu, mu]`, which is handled as its own case rather
//! than as a large finite exponent.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::error::{Error, Result};
use crate::estimators::SampleSet;
use crate::rng;

/// Exponent of an L_p norm: a finite `p >= 1` or `∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PExponent {
    Finite(f64),
    Infinity,
}

impl PExponent {
    pub fn finite(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(PExponent::Finite(p))
        } else {
            Err(Error::invalid(format!("exponent p must be finite and >= 1, got {p}")))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, PExponent::Infinity)
    }

    /// The finite value, or `None` for `∞`.
    pub fn value(&self) -> Option<f64> {
        match *self {
            PExponent::Finite(p) => Some(p),
            PExponent::Infinity => None,
        }
    }

    /// `p` as a float, with `∞` mapped to `f64::INFINITY`. For display and plotting only.
    pub fn as_f64(&self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            PExponent::Finite(p) => Self::finite(p).map(|_| ()),
            PExponent::Infinity => Ok(()),
        }
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PExponent::Finite(p) => write!(f, "{p}"),
            PExponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for PExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "Inf" | "INF" | "infinity" | "∞" => Ok(PExponent::Infinity),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("cannot parse exponent `{other}`")))
                .and_then(PExponent::finite),
        }
    }
}

impl Serialize for PExponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PExponent::Finite(p) => serializer.serialize_f64(*p),
            PExponent::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for PExponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Num(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(deserializer)? {
            Raw::Int(p) => PExponent::finite(p as f64),
            Raw::Num(p) => PExponent::finite(p),
            Raw::Text(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// Natural log of `2 Γ((p+1)/p) (p e)^{1/p}`; `ln 2` for `p = ∞`.
pub(crate) fn ln_norm_constant(p: PExponent) -> f64 {
    match p {
        PExponent::Finite(p) => LN_2 + ln_gamma(1.0 + 1.0 / p) + (p.ln() + 1.0) / p,
        PExponent::Infinity => LN_2,
    }
}

/// `log2` of the constant relating entropy and L_p norm for the
/// maximum-entropy member: `h = log2(C_p) + log2(mu)`.
pub fn log2_norm_constant(p: PExponent) -> f64 {
    ln_norm_constant(p) / LN_2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MaxEntParams")]
pub struct MaxEntDensity {
    p: PExponent,
    mu: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MaxEntParams {
    p: PExponent,
    mu: f64,
}

impl TryFrom<MaxEntParams> for MaxEntDensity {
    type Error = Error;

    fn try_from(raw: MaxEntParams) -> Result<Self> {
        MaxEntDensity::new(raw.p, raw.mu)
    }
}

impl MaxEntDensity {
    pub fn new(p: PExponent, mu: f64) -> Result<Self> {
        p.validate()?;
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::invalid(format!("scale mu must be finite and > 0, got {mu}")));
        }
        Ok(MaxEntDensity { p, mu })
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::new(PExponent::Finite(2.0), sigma)
    }

    pub fn laplace(mu: f64) -> Result<Self> {
        Self::new(PExponent::Finite(1.0), mu)
    }

    pub fn uniform(half_width: f64) -> Result<Self> {
        Self::new(PExponent::Infinity, half_width)
    }

    pub fn p(&self) -> PExponent {
        self.p
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn is_gaussian(&self) -> bool {
        self.p == PExponent::Finite(2.0)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self.p {
            PExponent::Finite(p) => {
                let ln_c = LN_2 + ln_gamma(1.0 + 1.0 / p) + p.ln() / p + self.mu.ln();
                (-(x.abs() / self.mu).powf(p) / p - ln_c).exp()
            }
            PExponent::Infinity => {
                if x.abs() <= self.mu {
                    0.5 / self.mu
                } else {
                    0.0
                }
            }
        }
    }

    /// CDF via the regularized lower incomplete gamma function:
    /// `|x|^p / (p mu^p)` is Gamma(1/p, 1) distributed.
    pub fn cdf(&self, x: f64) -> f64 {
        match self.p {
            PExponent::Finite(p) => {
                if x == 0.0 {
                    return 0.5;
                }
                let t = (x.abs() / self.mu).powf(p) / p;
                let half_mass = 0.5 * gamma_lr(1.0 / p, t);
                if x > 0.0 {
                    0.5 + half_mass
                } else {
                    0.5 - half_mass
                }
            }
            PExponent::Infinity => ((x + self.mu) / (2.0 * self.mu)).clamp(0.0, 1.0),
        }
    }

    /// Differential entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        log2_norm_constant(self.p) + self.mu.log2()
    }

    pub fn variance(&self) -> f64 {
        match self.p {
            // E|x|^2 = (p mu^p)^{2/p} Γ(3/p) / Γ(1/p)
            PExponent::Finite(p) => {
                let ln_var = 2.0 / p * (p.ln() + p * self.mu.ln()) + ln_gamma(3.0 / p)
                    - ln_gamma(1.0 / p);
                ln_var.exp()
            }
            PExponent::Infinity => self.mu * self.mu / 3.0,
        }
    }

    /// The L_p norm of the variate; equal to `mu` by construction.
    pub fn lp_norm(&self) -> f64 {
        self.mu
    }

    pub fn sampler(&self) -> MaxEntSampler {
        let magnitude = match self.p {
            PExponent::Finite(p) => {
                Some(Gamma::new(1.0 / p, 1.0).expect("shape 1/p is positive and finite"))
            }
            PExponent::Infinity => None,
        };
        MaxEntSampler { density: *self, magnitude }
    }

    /// `n` i.i.d. draws, reproducible from `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<SampleSet> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let sampler = self.sampler();
        let mut rng = rng::stream(seed, 0);
        SampleSet::new((0..n).map(|_| sampler.sample(&mut rng)).collect())
    }
}

/// Exact sampler for [`MaxEntDensity`].
///
/// Finite `p`: draw `G ~ Gamma(1/p, 1)`, set `|x| = mu (p G)^{1/p}` and attach
/// a fair random sign. `p = ∞`: uniform on `[-mu, mu]`.
#[derive(Debug, Clone)]
pub struct MaxEntSampler {
    density: MaxEntDensity,
    magnitude: Option<Gamma<f64>>,
}

impl Distribution<f64> for MaxEntSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mu = self.density.mu;
        match (self.density.p, &self.magnitude) {
            (PExponent::Finite(p), Some(gamma)) => {
                let g: f64 = gamma.sample(rng);
                let magnitude = mu * (p * g).powf(1.0 / p);
                if rng.random::<bool>() {
                    magnitude
                } else {
                    -magnitude
                }
            }
            _ => rng.random_range(-mu..=mu),
        }
    }
}

pub fn entropy_closed_form(d: &MaxEntDensity) -> f64 {
    d.entropy_bits()
}

/// Scale of the maximum-entropy member whose entropy is `h` bits. This is
/// also the value of the L_p lower bound for an error of entropy `h`.
pub fn mu_from_entropy(h: f64, p: PExponent) -> f64 {
    (h - log2_norm_constant(p)).exp2()
}
