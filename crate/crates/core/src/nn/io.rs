//! `CEMD` model files, little-endian throughout.
//!
//! ```text
//! "CEMD" u16 version
//! u8 n_layers, per layer: u16 in_channels, u16 out_channels, u8 kh, u8 kw
//! u8 placement (0 resize-first, 1 resize-last)
//! u32 param_count
//! u32 N_f, u32 N_s, u8 pattern_id, u32 L_s, u32 subcarrier_offset,
//! u32 N_pilot, N_pilot x u32 pilot symbol index
//! param_count x f64: conv1 weights [out][in][kh][kw], conv1 biases,
//!   conv2 weights, conv2 biases, conv3 weights, conv3 biases
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{param_count, ModelParams, Net, Placement, K, LAYERS};
use crate::binio::{dim, Reader};
use crate::dataset::pattern_from_parts;
use crate::ofdm::{OfdmConfig, PilotPattern};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"CEMD";
const VERSION: u16 = 1;

/// Weights plus the grid layout they were trained for.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub params: ModelParams,
    pub n_f: usize,
    pub n_s: usize,
    pub pattern: PilotPattern,
}

impl ModelFile {
    pub fn new(params: ModelParams, cfg: &OfdmConfig) -> Self {
        Self {
            params,
            n_f: cfg.n_subcarriers,
            n_s: cfg.n_symbols,
            pattern: cfg.pattern.clone(),
        }
    }

    pub fn ofdm_config(&self) -> OfdmConfig {
        OfdmConfig {
            n_subcarriers: self.n_f,
            n_symbols: self.n_s,
            pattern: self.pattern.clone(),
            ..OfdmConfig::default()
        }
    }

    pub fn net(&self) -> Result<Net> {
        Net::new(self.params.clone(), &self.ofdm_config())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut b = Vec::with_capacity(64 + 8 * self.params.theta.len());
        b.extend_from_slice(MAGIC);
        b.extend_from_slice(&VERSION.to_le_bytes());
        b.push(LAYERS.len() as u8);
        for &(cin, cout) in &LAYERS {
            b.extend_from_slice(&(cin as u16).to_le_bytes());
            b.extend_from_slice(&(cout as u16).to_le_bytes());
            b.extend_from_slice(&[K as u8, K as u8]);
        }
        b.push(self.params.placement.code());
        b.extend_from_slice(&(self.params.theta.len() as u32).to_le_bytes());
        b.extend_from_slice(&(self.n_f as u32).to_le_bytes());
        b.extend_from_slice(&(self.n_s as u32).to_le_bytes());
        b.push(self.pattern.id.code());
        b.extend_from_slice(&(self.pattern.stride as u32).to_le_bytes());
        b.extend_from_slice(&(self.pattern.offset as u32).to_le_bytes());
        b.extend_from_slice(&(self.pattern.symbols.len() as u32).to_le_bytes());
        for &s in &self.pattern.symbols {
            b.extend_from_slice(&(s as u32).to_le_bytes());
        }
        for x in &self.params.theta {
            b.extend_from_slice(&x.to_le_bytes());
        }
        b
    }

    pub fn from_reader(inner: impl Read) -> Result<Self> {
        let mut r = Reader { inner, what: "model" };
        let magic = r.bytes::<4>()?;
        if &magic != MAGIC {
            return Err(Error::Format(format!(
                "not a model: expected magic \"CEMD\", found {:?}",
                String::from_utf8_lossy(&magic)
            )));
        }
        let version = r.u16()?;
        if version != VERSION {
            return Err(Error::Format(format!("model version {version} unsupported (expected {VERSION})")));
        }
        let n_layers = r.u8()? as usize;
        let mut layers = Vec::with_capacity(n_layers);
        for _ in 0..n_layers {
            layers.push((r.u16()? as usize, r.u16()? as usize, r.u8()? as usize, r.u8()? as usize));
        }
        let expect: Vec<_> = LAYERS.iter().map(|&(i, o)| (i, o, K, K)).collect();
        if layers != expect {
            return Err(Error::Format(format!("unsupported architecture {layers:?}")));
        }
        let placement = Placement::from_code(r.u8()?).ok_or_else(|| Error::Format("unknown placement code".into()))?;
        let count = r.u32()? as usize;
        if count != param_count() {
            return Err(Error::Format(format!("parameter count {count}, expected {}", param_count())));
        }
        let n_f = dim(r.u32()?, "N_f")?;
        let n_s = dim(r.u32()?, "N_s")?;
        let pid = r.u8()?;
        let stride = dim(r.u32()?, "L_s")?;
        let offset = r.u32()? as usize;
        let n_pilot = dim(r.u32()?, "N_pilot")?;
        let symbols = (0..n_pilot).map(|_| r.u32().map(|v| v as usize)).collect::<Result<Vec<_>>>()?;
        let pattern = pattern_from_parts(pid, symbols, stride, offset)?;
        let theta = (0..count).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
        let mut rest = [0u8; 1];
        if r.inner.read(&mut rest)? != 0 {
            return Err(Error::Format("trailing bytes after model parameters".into()));
        }
        let file = Self {
            params: ModelParams { placement, theta },
            n_f,
            n_s,
            pattern,
        };
        file.ofdm_config().validate().map_err(|e| Error::Format(e.to_string()))?;
        file.params.check_finite()?;
        Ok(file)
    }
}

pub fn save_model(model: &ModelFile, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&model.to_bytes())?;
    w.flush()?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelFile> {
    ModelFile::from_reader(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ChannelMatrix;
    use crate::C64;
    use rand::{Rng, SeedableRng};

    fn sample() -> ModelFile {
        ModelFile::new(ModelParams::glorot(Placement::ResizeFirst, 21), &OfdmConfig::default())
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.cemd");
        let m = sample();
        save_model(&m, &path).unwrap();
        let back = load_model(&path).unwrap();
        assert_eq!(back, m);

        let (a, b) = (m.net().unwrap(), back.net().unwrap());
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let f = ChannelMatrix::from_fn(36, 4, |_, _| C64::new(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5));
            assert_eq!(a.forward(&f).unwrap(), b.forward(&f).unwrap());
        }
    }

    #[test]
    fn header_fields() {
        let bytes = sample().to_bytes();
        assert_eq!(&bytes[..4], b"CEMD");
        // magic, version, layer count, three 6-byte layer records, placement
        let at = 4 + 2 + 1 + 18 + 1;
        let count = u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
        assert_eq!(count, 882);
    }

    #[test]
    fn rejects_bad_files() {
        let mut bytes = sample().to_bytes();
        bytes[4] = 9;
        let err = ModelFile::from_reader(&bytes[..]).unwrap_err().to_string();
        assert!(err.contains("version 9"), "{err}");

        let good = sample().to_bytes();
        let err = ModelFile::from_reader(&good[..good.len() - 3]).unwrap_err().to_string();
        assert!(err.contains("truncated"), "{err}");

        let err = ModelFile::from_reader(&b"CEDS\x01\x00"[..]).unwrap_err().to_string();
        assert!(err.contains("CEMD"), "{err}");
    }
}
