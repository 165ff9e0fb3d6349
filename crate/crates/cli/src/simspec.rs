//! TOML spec for `spreadfit simulate`.
//!
//! ```toml
//! n_states = 20
//! start_date = "2024-01-02"
//! coupon_freq = 2           # optional, default 2
//!
//! [issuer]
//! issuer_id = "ACME"
//! bond_terms = [1, 2, 3, 5, 7, 10, 20, 30]
//! coupon_rate = 0.05
//! noise_sd = 0.1
//! seed = 42
//!
//! [issuer.spread]
//! kind = "flat"             # flat | linear | widening
//! value = 0.02
//!
//! [treasury]
//! kind = "flat"             # flat | knots
//! yield = 0.04
//! ```

use chrono::NaiveDate;
use serde::Deserialize;

use spreadfit::curves::TreasuryCurve;
use spreadfit::synth::{SpreadModel, SyntheticIssuerSpec};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    pub n_states: usize,
    pub start_date: String,
    #[serde(default = "default_freq")]
    pub coupon_freq: u32,
    pub issuer: IssuerSection,
    pub treasury: TreasurySection,
}

fn default_freq() -> u32 {
    2
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IssuerSection {
    pub issuer_id: String,
    pub spread: SpreadModel,
    pub bond_terms: Vec<f64>,
    pub coupon_rate: f64,
    #[serde(default)]
    pub noise_sd: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TreasurySection {
    Flat {
        #[serde(rename = "yield")]
        value: f64,
    },
    Knots {
        knots: Vec<(f64, f64)>,
    },
}

impl SimSpec {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("spec file: {e}"))
    }

    pub fn start(&self) -> Result<NaiveDate, String> {
        self.start_date
            .parse()
            .map_err(|e| format!("start_date '{}': {e}", self.start_date))
    }

    pub fn issuer_spec(&self, seed_override: Option<u64>) -> SyntheticIssuerSpec {
        SyntheticIssuerSpec {
            issuer_id: self.issuer.issuer_id.clone(),
            spread: self.issuer.spread,
            bond_terms: self.issuer.bond_terms.clone(),
            coupon_rate: self.issuer.coupon_rate,
            noise_sd: self.issuer.noise_sd,
            seed: seed_override.unwrap_or(self.issuer.seed),
        }
    }

    pub fn treasury_curve(&self, as_of: NaiveDate) -> Result<TreasuryCurve<f64>, String> {
        let knots = match &self.treasury {
            TreasurySection::Flat { value } => {
                (1..=30).map(|i| (i as f64, *value)).collect()
            }
            TreasurySection::Knots { knots } => knots.clone(),
        };
        TreasuryCurve::tabulated(as_of, knots).map_err(|e| e.to_string())
    }
}
