use crate::channel::PowerDelayProfile;

/// Piecewise-linear (in dB) envelope through a profile's `(delay, gain)`
/// knots. No power outside the first and last knot.
#[derive(Debug, Clone, PartialEq)]
pub struct PdpEnvelope {
    /// `(delay_s, gain_db)`, sorted by delay.
    pub knots: Vec<(f64, f64)>,
}

impl PdpEnvelope {
    pub fn first_delay(&self) -> f64 {
        self.knots[0].0
    }

    pub fn last_delay(&self) -> f64 {
        self.knots[self.knots.len() - 1].0
    }

    /// `Theta(tau)` in dB; `-inf` outside the knot span.
    pub fn eval(&self, tau: f64) -> f64 {
        let tol = 1e-15 * self.last_delay().abs().max(1e-12);
        let (lo, hi) = (self.first_delay(), self.last_delay());
        if tau < lo - tol || tau > hi + tol {
            return f64::NEG_INFINITY;
        }
        if self.knots.len() == 1 {
            return self.knots[0].1;
        }
        let j = self
            .knots
            .windows(2)
            .position(|w| tau <= w[1].0)
            .unwrap_or(self.knots.len() - 2);
        let ((d0, g0), (d1, g1)) = (self.knots[j], self.knots[j + 1]);
        let w = ((tau - d0) / (d1 - d0)).clamp(0.0, 1.0);
        g0 + (g1 - g0) * w
    }
}

pub fn envelope(pdp: &PowerDelayProfile) -> PdpEnvelope {
    PdpEnvelope {
        knots: pdp.delays.iter().copied().zip(pdp.gains_db.iter().copied()).collect(),
    }
}

/// Outcome of checking whether a filter designed on one profile covers another.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Applicable,
    /// The actual envelope rises above the designed one at this delay (s).
    ViolatesC1(f64),
    /// The actual profile is longer or has more paths than the designed one.
    ViolatesC2,
}

impl Verdict {
    pub fn is_applicable(&self) -> bool {
        matches!(self, Verdict::Applicable)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Applicable => write!(f, "applicable"),
            Verdict::ViolatesC1(t) => write!(f, "violates_C1({:.4}us)", t * 1e6),
            Verdict::ViolatesC2 => write!(f, "violates_C2"),
        }
    }
}

const GRID_POINTS: usize = 1000;
const DB_TOL: f64 = 1e-9;

/// Check the path-count/maximum-delay condition first, then the envelope
/// condition on the union of knots plus a uniform grid over the actual span.
pub fn is_applicable(actual: &PowerDelayProfile, designed: &PowerDelayProfile) -> Verdict {
    let time_tol = 1e-12 * designed.max_delay().max(1e-9);
    if actual.max_delay() > designed.max_delay() + time_tol || actual.n_paths() > designed.n_paths() {
        return Verdict::ViolatesC2;
    }
    let (ea, ed) = (envelope(actual), envelope(designed));
    let (lo, hi) = (ea.first_delay(), ea.last_delay());
    let mut taus: Vec<f64> = ea
        .knots
        .iter()
        .chain(&ed.knots)
        .map(|k| k.0)
        .filter(|&t| t >= lo && t <= hi)
        .collect();
    taus.extend((0..GRID_POINTS).map(|i| lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64));
    taus.sort_by(f64::total_cmp);
    for t in taus {
        if ea.eval(t) > ed.eval(t) + DB_TOL {
            return Verdict::ViolatesC1(t);
        }
    }
    Verdict::Applicable
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::registry;
    use crate::ofdm::OfdmConfig;

    fn get(name: &str) -> PowerDelayProfile {
        registry::lookup(name, &OfdmConfig::default()).unwrap()
    }

    #[test]
    fn designed_envelope_values() {
        let e = envelope(&get("designed"));
        assert_eq!(e.eval(1.0e-6), 0.0);
        assert!((e.eval(8.0e-6) + 2.5).abs() < 1e-12);
        assert_eq!(e.eval(9.5e-6), f64::NEG_INFINITY);
    }

    #[test]
    fn single_path_envelope_is_a_point() {
        let e = envelope(&get("flat"));
        assert_eq!(e.eval(0.0), 0.0);
        assert_eq!(e.eval(1e-9), f64::NEG_INFINITY);
    }

    #[test]
    fn hand_checked_verdicts() {
        assert_eq!(is_applicable(&get("DC1"), &get("designed")), Verdict::Applicable);
        assert_eq!(is_applicable(&get("designed"), &get("DC1")), Verdict::ViolatesC2);
        assert_eq!(is_applicable(&get("designed"), &get("DC3")), Verdict::ViolatesC2);
        for p in registry::fixed_profiles().into_iter().chain([get("CE"), get("TDL-A:300")]) {
            assert_eq!(is_applicable(&p, &p), Verdict::Applicable, "{}", p.name);
        }
    }

    #[test]
    fn envelope_violation_reports_delay() {
        let d = PowerDelayProfile::from_us("d", &[(0.0, 0.0), (1.0, -10.0)]).unwrap();
        let a = PowerDelayProfile::from_us("a", &[(0.0, -1.0), (0.5, -2.0)]).unwrap();
        // Designed is -5 dB at 0.5 us; actual rises above it somewhere in (0.1, 0.5].
        match is_applicable(&a, &d) {
            Verdict::ViolatesC1(t) => assert!(t > 0.1e-6 && t <= 0.5e-6 + 1e-15, "{t}"),
            v => panic!("{v:?}"),
        }
    }
}
