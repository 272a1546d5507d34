//! Built-in profiles by name.
//!
//! Names are matched case-insensitively. Parameterized entries take their
//! parameter after a colon: `CE` or `CE:<zeta_us>`, `TDL-A:<ds_ns>`,
//! `TDL-B:<ds_ns>`. Fixed-profile delays are in microseconds.

use super::pdp::{ce_channel, default_ce_spacing, scale_tdl, PowerDelayProfile};
use crate::ofdm::OfdmConfig;
use crate::{Error, Result};

/// Fixed profiles as `(name, [(delay_us, gain_db)])`.
const FIXED: &[(&str, &[(f64, f64)])] = &[
    ("flat", &[(0.0, 0.0)]),
    (
        "EPA",
        &[
            (0.0, 0.0),
            (0.03, -1.0),
            (0.07, -2.0),
            (0.09, -3.0),
            (0.11, -8.0),
            (0.19, -17.2),
            (0.41, -20.8),
        ],
    ),
    (
        "EVA",
        &[
            (0.0, 0.0),
            (0.03, -1.5),
            (0.15, -1.4),
            (0.31, -3.6),
            (0.37, -0.6),
            (0.71, -9.1),
            (1.09, -7.0),
            (1.73, -12.0),
            (2.51, -16.9),
        ],
    ),
    (
        "ETU",
        &[
            (0.0, -1.0),
            (0.05, -1.0),
            (0.12, -1.0),
            (0.2, 0.0),
            (0.23, 0.0),
            (0.5, 0.0),
            (1.6, -3.0),
            (2.3, -5.0),
            (5.0, -7.0),
        ],
    ),
    (
        "DC1",
        &[(0.0, 0.0), (0.05, -2.0), (0.1, -4.0), (0.2, -8.0), (0.4, -16.0)],
    ),
    (
        "DC2",
        &[
            (0.0, -7.0),
            (0.03, 0.0),
            (0.2, 0.0),
            (0.3, -1.0),
            (0.5, -2.0),
            (1.5, -1.0),
            (2.5, -1.0),
            (5.0, -5.5),
        ],
    ),
    (
        "DC3",
        &[
            (0.0, 0.0),
            (0.05, -1.0),
            (0.12, -1.0),
            (0.2, -1.0),
            (0.23, -1.0),
            (0.5, -1.5),
            (1.6, -1.5),
            (2.3, -1.5),
            (5.0, -3.0),
            (7.0, -5.0),
        ],
    ),
    ("two-path", &[(0.05, -3.0), (5.0, -3.0)]),
    (
        "designed",
        &[
            (0.0, 0.0),
            (0.03, 0.0),
            (0.2, 0.0),
            (0.3, 0.0),
            (0.5, 0.0),
            (1.5, 0.0),
            (2.5, -1.0),
            (5.0, -1.0),
            (7.0, -2.0),
            (9.0, -3.0),
        ],
    ),
    (
        "additional-1",
        &[
            (0.0, -7.0),
            (0.05, -3.0),
            (0.12, -14.0),
            (0.2, 0.0),
            (0.5, -12.0),
            (1.0, -5.0),
            (1.6, -9.0),
        ],
    ),
    (
        "additional-2",
        &[
            (0.0, 0.0),
            (0.05, -14.0),
            (0.12, -15.0),
            (0.2, -1.0),
            (0.23, -5.0),
            (0.5, -1.0),
            (1.6, -15.0),
            (2.3, -10.0),
            (5.0, -10.0),
            (7.0, -5.0),
        ],
    ),
];

/// TDL-A normalized delays (unit delay spread) and powers, tap order as tabulated.
const TDL_A: &[(f64, f64)] = &[
    (0.0000, -13.4),
    (0.3819, 0.0),
    (0.4025, -2.2),
    (0.5868, -4.0),
    (0.4610, -6.0),
    (0.5375, -8.2),
    (0.6708, -9.9),
    (0.5750, -10.5),
    (0.7618, -7.5),
    (1.5375, -15.9),
    (1.8978, -6.6),
    (2.2242, -16.7),
    (2.1718, -12.4),
    (2.4942, -15.2),
    (2.5119, -10.8),
    (3.0582, -11.3),
    (4.0810, -12.7),
    (4.4579, -16.2),
    (4.5695, -18.3),
    (4.7966, -18.9),
    (5.0066, -16.6),
    (5.3043, -19.9),
    (9.6586, -29.7),
];

const TDL_B: &[(f64, f64)] = &[
    (0.0000, 0.0),
    (0.1072, -2.2),
    (0.2155, -4.0),
    (0.2095, -3.2),
    (0.2870, -9.8),
    (0.2986, -1.2),
    (0.3752, -3.4),
    (0.5055, -5.2),
    (0.3681, -7.6),
    (0.3697, -3.0),
    (0.5700, -8.9),
    (0.5283, -9.0),
    (1.1021, -4.8),
    (1.2756, -5.7),
    (1.5474, -7.5),
    (1.7842, -1.9),
    (2.0169, -7.6),
    (2.8294, -12.2),
    (3.0219, -9.8),
    (3.6187, -11.4),
    (4.1067, -14.9),
    (4.2790, -9.2),
    (4.7834, -11.3),
];

/// TDL-A with delays in units of the RMS delay spread, sorted by delay.
pub fn tdl_a_normalized() -> PowerDelayProfile {
    PowerDelayProfile::from_unsorted("TDL-A", TDL_A.to_vec()).expect("static table")
}

pub fn tdl_b_normalized() -> PowerDelayProfile {
    PowerDelayProfile::from_unsorted("TDL-B", TDL_B.to_vec()).expect("static table")
}

/// Every accepted name, parameterized ones shown with their parameter.
pub fn names() -> Vec<String> {
    FIXED
        .iter()
        .map(|(n, _)| n.to_string())
        .chain(["CE[:zeta_us]".into(), "TDL-A:<ds_ns>".into(), "TDL-B:<ds_ns>".into()])
        .collect()
}

/// Fixed profiles in registry order.
pub fn fixed_profiles() -> Vec<PowerDelayProfile> {
    FIXED
        .iter()
        .map(|(n, p)| PowerDelayProfile::from_us(n, p).expect("static table"))
        .collect()
}

fn unknown(name: &str) -> Error {
    Error::UnknownPdp {
        name: name.to_string(),
        valid: names().join(", "),
    }
}

/// Resolve a registry name. `CE` needs the OFDM numerology for its span.
pub fn lookup(name: &str, cfg: &OfdmConfig) -> Result<PowerDelayProfile> {
    let (base, param) = match name.split_once(':') {
        Some((b, p)) => (b.trim(), Some(p.trim())),
        None => (name.trim(), None),
    };
    let parse_param = |p: &str| p.parse::<f64>().map_err(|_| unknown(name));
    if base.eq_ignore_ascii_case("CE") {
        let zeta = match param {
            Some(p) => parse_param(p)? * 1e-6,
            None => default_ce_spacing(cfg),
        };
        let mut pdp = ce_channel(cfg, zeta)?;
        if param.is_none() {
            pdp.name = "CE".into();
        }
        return Ok(pdp);
    }
    for (tdl, model) in [("TDL-A", TDL_A), ("TDL-B", TDL_B)] {
        if base.eq_ignore_ascii_case(tdl) {
            let ds_ns = parse_param(param.ok_or_else(|| unknown(name))?)?;
            let model = PowerDelayProfile::from_unsorted(tdl, model.to_vec())?;
            return scale_tdl(&model, ds_ns * 1e-9);
        }
    }
    if param.is_some() {
        return Err(unknown(name));
    }
    FIXED
        .iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(base))
        .map(|(n, p)| PowerDelayProfile::from_us(n, p).expect("static table"))
        .ok_or_else(|| unknown(name))
}

/// Registry name, or a path to a `<delay_us> <gain_db>` text file.
pub fn resolve(spec: &str, cfg: &OfdmConfig) -> Result<PowerDelayProfile> {
    match lookup(spec, cfg) {
        Ok(p) => Ok(p),
        Err(e @ Error::UnknownPdp { .. }) => {
            let path = std::path::Path::new(spec);
            if path.is_file() {
                let text = std::fs::read_to_string(path)?;
                let name = path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or(spec);
                PowerDelayProfile::parse(name, &text)
            } else {
                Err(e)
            }
        }
        Err(e) => Err(e),
    }
}
