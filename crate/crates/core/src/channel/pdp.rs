use crate::ofdm::OfdmConfig;
use crate::{Error, Result};

/// Delays and average path gains of one channel family.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDelayProfile {
    pub name: String,
    /// Path delays in seconds, strictly ascending.
    pub delays: Vec<f64>,
    /// Average path gains in dB.
    pub gains_db: Vec<f64>,
}

impl PowerDelayProfile {
    pub fn new(name: impl Into<String>, delays: Vec<f64>, gains_db: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if delays.is_empty() || delays.len() != gains_db.len() {
            return Err(Error::InvalidPdp(format!(
                "{name}: {} delays vs {} gains",
                delays.len(),
                gains_db.len()
            )));
        }
        if !(delays[0] >= 0.0) || delays.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidPdp(format!(
                "{name}: delays must start at >= 0 and be strictly ascending"
            )));
        }
        if gains_db.iter().chain(&delays).any(|g| !g.is_finite()) {
            return Err(Error::InvalidPdp(format!("{name}: non-finite entry")));
        }
        Ok(Self {
            name,
            delays,
            gains_db,
        })
    }

    /// Build from `(delay_us, gain_db)` pairs.
    pub fn from_us(name: &str, pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            name,
            pairs.iter().map(|p| p.0 * 1e-6).collect(),
            pairs.iter().map(|p| p.1).collect(),
        )
    }

    /// Build from unsorted pairs, sorting by delay first.
    pub(crate) fn from_unsorted(name: &str, mut pairs: Vec<(f64, f64)>) -> Result<Self> {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self::new(
            name,
            pairs.iter().map(|p| p.0).collect(),
            pairs.iter().map(|p| p.1).collect(),
        )
    }

    /// Parse a text profile: one `<delay_us> <gain_db>` pair per line.
    /// Blank lines and `#` comments are skipped.
    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace().map(str::parse::<f64>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(d)), Some(Ok(g)), None) => pairs.push((d, g)),
                _ => {
                    return Err(Error::InvalidPdp(format!(
                        "{name}: line {} is not `<delay_us> <gain_db>`",
                        i + 1
                    )))
                }
            }
        }
        Self::from_us(name, &pairs)
    }

    pub fn n_paths(&self) -> usize {
        self.delays.len()
    }

    /// Linear average path powers `A_m`.
    pub fn linear_gains(&self) -> Vec<f64> {
        self.gains_db.iter().map(|g| 10f64.powf(g / 10.0)).collect()
    }

    pub fn total_power(&self) -> f64 {
        self.linear_gains().iter().sum()
    }

    pub fn max_delay(&self) -> f64 {
        *self.delays.last().expect("non-empty")
    }

    /// Delays normalized by the sample period.
    pub fn delays_in_samples(&self, cfg: &OfdmConfig) -> Vec<f64> {
        self.delays.iter().map(|d| d / cfg.sample_period).collect()
    }

    /// Same shape scaled to unit total power.
    pub fn normalized(&self) -> Self {
        let offset = 10.0 * self.total_power().log10();
        Self {
            name: format!("{} (unit power)", self.name),
            delays: self.delays.clone(),
            gains_db: self.gains_db.iter().map(|g| g - offset).collect(),
        }
    }

    /// RMS delay spread in seconds.
    pub fn rms_delay_spread(&self) -> f64 {
        let a = self.linear_gains();
        let p: f64 = a.iter().sum();
        let mean = a.iter().zip(&self.delays).map(|(a, d)| a * d).sum::<f64>() / p;
        let second = a.iter().zip(&self.delays).map(|(a, d)| a * d * d).sum::<f64>() / p;
        (second - mean * mean).max(0.0).sqrt()
    }
}

/// Scale a unit-delay-spread TDL profile to `ds_desired` seconds.
pub fn scale_tdl(model: &PowerDelayProfile, ds_desired: f64) -> Result<PowerDelayProfile> {
    if !(ds_desired >= 0.0) {
        return Err(Error::Config(format!(
            "desired delay spread must be >= 0, got {ds_desired}"
        )));
    }
    let name = format!("{}({:.0}ns)", model.name, ds_desired * 1e9);
    if ds_desired == 0.0 {
        // Every tap collapses onto delay 0; the powers add.
        let total = model.total_power();
        return PowerDelayProfile::new(name, vec![0.0], vec![10.0 * total.log10()]);
    }
    PowerDelayProfile::new(
        name,
        model.delays.iter().map(|d| d * ds_desired).collect(),
        model.gains_db.clone(),
    )
}

/// `1 / (3 f_space (N_f - 1))`, about 0.3129 us for the default numerology.
pub fn default_ce_spacing(cfg: &OfdmConfig) -> f64 {
    1.0 / (3.0 * cfg.subcarrier_spacing * (cfg.n_subcarriers as f64 - 1.0))
}

/// Uniform 0 dB paths every `zeta` seconds across the CP: `floor(T_CP / zeta)` paths.
pub fn ce_channel(cfg: &OfdmConfig, zeta: f64) -> Result<PowerDelayProfile> {
    if !(zeta > 0.0) {
        return Err(Error::Config(format!("CE spacing must be > 0, got {zeta}")));
    }
    let ratio = cfg.cp_duration() / zeta;
    let n = ((ratio * (1.0 + 1e-12)).floor() as usize).max(1);
    PowerDelayProfile::new(
        format!("CE({:.4}us)", zeta * 1e6),
        (0..n).map(|i| i as f64 * zeta).collect(),
        vec![0.0; n],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::registry;

    #[test]
    fn invariants_enforced() {
        assert!(PowerDelayProfile::new("x", vec![], vec![]).is_err());
        assert!(PowerDelayProfile::new("x", vec![0.0, 0.0], vec![0.0, 0.0]).is_err());
        assert!(PowerDelayProfile::new("x", vec![-1.0], vec![0.0]).is_err());
        assert!(PowerDelayProfile::new("x", vec![0.0], vec![f64::NAN]).is_err());
        assert!(PowerDelayProfile::new("x", vec![0.0, 1.0], vec![0.0]).is_err());
    }

    #[test]
    fn parse_text_profile() {
        let p = PowerDelayProfile::parse("f", "# comment\n0 0\n\n0.5 -3.0 # tail\n").unwrap();
        assert_eq!(p.n_paths(), 2);
        assert!((p.delays[1] - 0.5e-6).abs() < 1e-18);
        assert!(PowerDelayProfile::parse("f", "0 0 0\n").is_err());
        assert!(PowerDelayProfile::parse("f", "abc 1\n").is_err());
    }

    #[test]
    fn ce_spacing_and_count() {
        let cfg = OfdmConfig::default();
        let zeta = default_ce_spacing(&cfg);
        assert!((zeta - 0.3129e-6).abs() < 1e-10);
        let ce = ce_channel(&cfg, zeta).unwrap();
        assert_eq!(ce.n_paths(), 30);
        assert!(ce.gains_db.iter().all(|&g| g == 0.0));
        assert!(ce.max_delay() <= cfg.cp_duration());
        let single = ce_channel(&cfg, cfg.cp_duration()).unwrap();
        assert_eq!(single.delays, vec![0.0]);
        assert!(ce_channel(&cfg, 0.0).is_err());
    }

    #[test]
    fn tdl_scaling() {
        let model = registry::tdl_a_normalized();
        let s = scale_tdl(&model, 30e-9).unwrap();
        assert!((s.max_delay() - 30e-9 * 9.6586).abs() < 1e-15);
        let zero = scale_tdl(&model, 0.0).unwrap();
        assert_eq!(zero.delays, vec![0.0]);
        let s2 = scale_tdl(&model, 60e-9).unwrap();
        for (a, b) in s.delays.iter().zip(&s2.delays) {
            assert!((2.0 * a - b).abs() < 1e-18);
        }
        assert_eq!(s.gains_db, model.gains_db);
        assert!(scale_tdl(&model, -1e-9).is_err());
    }

    #[test]
    fn tdl_tables_have_unit_delay_spread() {
        for model in [registry::tdl_a_normalized(), registry::tdl_b_normalized()] {
            let ds = model.rms_delay_spread();
            assert!((ds - 1.0).abs() < 0.05, "{} spread {ds}", model.name);
        }
    }
}
