//! Campaign configuration: JSON-loadable, fully overridable from flags.

use anyhow::{bail, Context, Result};
use oqtest::oracle::OracleSpec;
use oqtest::prum::{compute_ncb, compute_ntv, min_delta_theta, CheckMode};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// A repetition count: a fixed integer, derived from a parameter
/// (`auto(0.5)` reads as "derive from parameter 0.5"), or derived by
/// scanning the target's phase table for its minimum gap
/// (`auto(min-scan)`, superposition checks only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CountSpecRepr", into = "CountSpecRepr")]
pub enum CountSpec {
    Fixed(u64),
    Auto(f64),
    AutoMinScan,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CountSpecRepr {
    Int(u64),
    Str(String),
}

impl TryFrom<CountSpecRepr> for CountSpec {
    type Error = String;

    fn try_from(repr: CountSpecRepr) -> Result<Self, String> {
        match repr {
            CountSpecRepr::Int(v) => Ok(CountSpec::Fixed(v)),
            CountSpecRepr::Str(s) => s.parse().map_err(|e: anyhow::Error| e.to_string()),
        }
    }
}

impl From<CountSpec> for CountSpecRepr {
    fn from(spec: CountSpec) -> Self {
        match spec {
            CountSpec::Fixed(v) => CountSpecRepr::Int(v),
            other => CountSpecRepr::Str(other.to_string()),
        }
    }
}

impl fmt::Display for CountSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountSpec::Fixed(v) => write!(f, "{v}"),
            CountSpec::Auto(p) => write!(f, "auto({p})"),
            CountSpec::AutoMinScan => write!(f, "auto(min-scan)"),
        }
    }
}

impl FromStr for CountSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(v) = s.parse::<u64>() {
            return Ok(CountSpec::Fixed(v));
        }
        if let Some(inner) = s.strip_prefix("auto(").and_then(|r| r.strip_suffix(')')) {
            if inner == "min-scan" {
                return Ok(CountSpec::AutoMinScan);
            }
            let p: f64 = inner
                .parse()
                .with_context(|| format!("bad auto parameter {inner:?}"))?;
            return Ok(CountSpec::Auto(p));
        }
        bail!("expected an integer, auto(<param>), or auto(min-scan), got {s:?}")
    }
}

/// Pairing criterion by flag name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairingChoice {
    All,
    Tree,
    Each,
}

impl PairingChoice {
    pub fn criterion(self) -> oqtest::classes::PairingCriterion {
        match self {
            PairingChoice::All => oqtest::classes::PairingCriterion::AllCoverage,
            PairingChoice::Tree => oqtest::classes::PairingCriterion::TreeCoverage,
            PairingChoice::Each => oqtest::classes::PairingCriterion::EachChoice,
        }
    }
}

impl fmt::Display for PairingChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PairingChoice::All => "all",
            PairingChoice::Tree => "tree",
            PairingChoice::Each => "each",
        };
        f.write_str(s)
    }
}

impl FromStr for PairingChoice {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(PairingChoice::All),
            "tree" => Ok(PairingChoice::Tree),
            "each" => Ok(PairingChoice::Each),
            other => bail!("unknown pairing criterion {other:?} (expected all, tree, or each)"),
        }
    }
}

/// Output-checking mode by flag name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModeChoice {
    #[serde(rename = "DM")]
    Dm,
    #[serde(rename = "IM")]
    Im,
}

impl ModeChoice {
    pub fn mode(self) -> CheckMode {
        match self {
            ModeChoice::Dm => CheckMode::DirectMeasure,
            ModeChoice::Im => CheckMode::InverseAndMeasure,
        }
    }
}

impl fmt::Display for ModeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeChoice::Dm => "dm",
            ModeChoice::Im => "im",
        })
    }
}

impl FromStr for ModeChoice {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dm" => Ok(ModeChoice::Dm),
            "im" => Ok(ModeChoice::Im),
            other => bail!("unknown check mode {other:?} (expected im or dm)"),
        }
    }
}

/// One full campaign description. Serializes to plain JSON; every field
/// has a default so config files only need to state what they change.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    /// Benchmark or mutant name, e.g. `QAdder` or `Parity_P_AddZ`.
    pub target: String,
    pub criterion: PairingChoice,
    pub alpha: f64,
    pub n_cb: CountSpec,
    pub n_tv: CountSpec,
    pub samples_per_class: usize,
    pub seed: u64,
    pub check_mode: ModeChoice,
    pub fail_fast: bool,
    pub rounds: u64,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            target: String::new(),
            criterion: PairingChoice::All,
            alpha: 0.01,
            n_cb: CountSpec::Fixed(1),
            n_tv: CountSpec::Fixed(100),
            samples_per_class: 10,
            seed: 2024,
            check_mode: ModeChoice::Im,
            fail_fast: true,
            rounds: 1,
        }
    }
}

impl CampaignConfig {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: CampaignConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.target.is_empty() {
            bail!("no target program given");
        }
        if self.samples_per_class == 0 || self.rounds == 0 {
            bail!("samples_per_class and rounds must be at least 1");
        }
        if let CountSpec::Fixed(0) = self.n_cb {
            bail!("n_cb must be at least 1");
        }
        if let CountSpec::Fixed(0) = self.n_tv {
            bail!("n_tv must be at least 1");
        }
        if let CountSpec::AutoMinScan = self.n_cb {
            bail!("auto(min-scan) applies only to n_tv");
        }
        Ok(())
    }

    /// Resolves both repetition counts against the target's reference
    /// function: `Auto` parameters are the worst-case basis pass
    /// probability (`n_cb`) or the phase gap in radians (`n_tv`), and
    /// `auto(min-scan)` scans the phase table for its minimum gap.
    pub fn resolve_counts(&self, spec: &OracleSpec) -> Result<(u64, u64)> {
        let n_cb = match self.n_cb {
            CountSpec::Fixed(v) => v,
            CountSpec::Auto(a_sq) => compute_ncb(self.alpha, a_sq)?,
            CountSpec::AutoMinScan => bail!("auto(min-scan) applies only to n_tv"),
        };
        let n_tv = match self.n_tv {
            CountSpec::Fixed(v) => v,
            CountSpec::Auto(delta) => compute_ntv(self.alpha, delta)?,
            CountSpec::AutoMinScan => {
                let gap = min_delta_theta(spec)?.ok_or_else(|| {
                    anyhow::anyhow!(
                        "the target's phase function has no distinguishable gap; \
                         give n_tv explicitly"
                    )
                })?;
                compute_ntv(self.alpha, gap)?
            }
        };
        Ok((n_cb, n_tv))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_spec_parses_all_forms() {
        assert_eq!("7".parse::<CountSpec>().unwrap(), CountSpec::Fixed(7));
        assert_eq!("auto(0.5)".parse::<CountSpec>().unwrap(), CountSpec::Auto(0.5));
        assert_eq!("auto(min-scan)".parse::<CountSpec>().unwrap(), CountSpec::AutoMinScan);
        assert!("seven".parse::<CountSpec>().is_err());
        assert!("auto(maybe)".parse::<CountSpec>().is_err());
    }

    #[test]
    fn count_spec_round_trips_through_json() {
        for spec in [CountSpec::Fixed(30), CountSpec::Auto(0.25), CountSpec::AutoMinScan] {
            let json = serde_json::to_string(&spec).unwrap();
            let back: CountSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(back, spec, "via {json}");
        }
        assert_eq!(serde_json::to_string(&CountSpec::Fixed(30)).unwrap(), "30");
        assert_eq!(
            serde_json::to_string(&CountSpec::AutoMinScan).unwrap(),
            "\"auto(min-scan)\""
        );
    }

    #[test]
    fn config_json_defaults_and_overrides() {
        let cfg: CampaignConfig =
            serde_json::from_str(r#"{"target": "QAdder", "n_tv": "auto(min-scan)"}"#).unwrap();
        assert_eq!(cfg.target, "QAdder");
        assert_eq!(cfg.alpha, 0.01);
        assert_eq!(cfg.n_tv, CountSpec::AutoMinScan);
        assert_eq!(cfg.criterion, PairingChoice::All);
        assert!(cfg.fail_fast);
        assert!(serde_json::from_str::<CampaignConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn validation_rejects_degenerate_settings() {
        let mut cfg = CampaignConfig { target: "QAdder".into(), ..Default::default() };
        cfg.validate().unwrap();
        cfg.n_cb = CountSpec::Fixed(0);
        assert!(cfg.validate().is_err());
        cfg.n_cb = CountSpec::AutoMinScan;
        assert!(cfg.validate().is_err());
        cfg.n_cb = CountSpec::Fixed(1);
        cfg.target.clear();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn auto_counts_resolve_through_the_published_bounds() {
        let cfg = CampaignConfig {
            target: "Parity_P".into(),
            n_cb: CountSpec::Auto(0.5),
            n_tv: CountSpec::AutoMinScan,
            ..Default::default()
        };
        let bench = oqtest::bench::benchmark("Parity_P").unwrap();
        // Parity's phases are 0 and pi, so the scanned gap is pi.
        assert_eq!(cfg.resolve_counts(&bench.spec).unwrap(), (7, 1));

        let cfg = CampaignConfig {
            n_tv: CountSpec::Auto(std::f64::consts::FRAC_PI_4),
            ..cfg
        };
        assert_eq!(cfg.resolve_counts(&bench.spec).unwrap().1, 30);
    }
}
