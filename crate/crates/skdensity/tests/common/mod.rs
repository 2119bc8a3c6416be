//! Closed-form pricing oracles and deterministic sampling helpers shared by
//! the integration suites. Everything here is independent of the library's
//! computation paths.

/// Standard normal CDF via the Zelen and Severo rational approximation of
/// the error function; absolute error below 7.5e-8, far inside the pricing
/// tolerances it backs.
pub fn norm_cdf(x: f64) -> f64 {
    if x < 0.0 {
        return 1.0 - norm_cdf(-x);
    }
    let t = 1.0 / (1.0 + 0.2316419 * x);
    let poly = t
        * (0.319381530
            + t * (-0.356563782 + t * (1.781477937 + t * (-1.821255978 + t * 1.330274429))));
    let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    1.0 - pdf * poly
}

pub fn black_scholes_call(spot: f64, strike: f64, rate: f64, vol: f64, maturity: f64) -> f64 {
    let d1 = ((spot / strike).ln() + (rate + vol * vol / 2.0) * maturity) / (vol * maturity.sqrt());
    let d2 = d1 - vol * maturity.sqrt();
    spot * norm_cdf(d1) - strike * (-rate * maturity).exp() * norm_cdf(d2)
}

pub fn black_scholes_put(spot: f64, strike: f64, rate: f64, vol: f64, maturity: f64) -> f64 {
    let call = black_scholes_call(spot, strike, rate, vol, maturity);
    call - spot + strike * (-rate * maturity).exp()
}

/// Exchange option on two lognormal assets with correlation `rho`.
pub fn margrabe_exchange(
    spot1: f64,
    spot2: f64,
    vol1: f64,
    vol2: f64,
    rho: f64,
    maturity: f64,
) -> f64 {
    let vol = (vol1 * vol1 + vol2 * vol2 - 2.0 * rho * vol1 * vol2).sqrt();
    let d1 = ((spot1 / spot2).ln() + vol * vol * maturity / 2.0) / (vol * maturity.sqrt());
    let d2 = d1 - vol * maturity.sqrt();
    spot1 * norm_cdf(d1) - spot2 * norm_cdf(d2)
}

/// Deterministic xorshift generator so sampled test points never drift.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_f64(&mut self) -> f64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

pub fn standard_normal_pdf(x: f64) -> f64 {
    (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

#[allow(dead_code)]
pub fn cauchy_pdf(x: f64) -> f64 {
    1.0 / (std::f64::consts::PI * (1.0 + x * x))
}
