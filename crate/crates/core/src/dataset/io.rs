//! `CEDS` binary format, little-endian throughout.
//!
//! ```text
//! "CEDS" u16 version
//! u64 n_samples
//! u32 N_f, u32 N_s, u32 L_s, u32 N_pilot, u8 pattern_id
//! u32 subcarrier_offset, N_pilot x u32 pilot symbol index (0-based)
//! f64 snr_min, f64 snr_max, f64 doppler_min, f64 doppler_max
//! u64 master_seed, f64 train_fraction, u8 normalize_power
//! u32 n_components, then per component u16 byte length + UTF-8 name
//! records:
//!   feature f32 (re, im) row-major [pilot subcarrier][pilot symbol]
//!   label   f32 (re, im) row-major [subcarrier][symbol]
//!   f32 snr_db, f32 doppler_hz, u32 pdp_id, u64 seed
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;


use super::{pattern_from_parts, Dataset, DatasetHeader, DatasetSample, Grid32};
use crate::binio::{dim, truncated, Reader};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"CEDS";
const VERSION: u16 = 1;

/// Bytes per record for a header's dimensions.
pub fn record_len(h: &DatasetHeader) -> usize {
    let feat = h.n_pilot_subcarriers() * h.pattern.n_pilot_symbols();
    8 * feat + 8 * h.n_f * h.n_s + 4 + 4 + 4 + 8
}

fn header_bytes(h: &DatasetHeader, n: u64) -> Vec<u8> {
    let mut b = Vec::new();
    b.extend_from_slice(MAGIC);
    b.extend_from_slice(&VERSION.to_le_bytes());
    b.extend_from_slice(&n.to_le_bytes());
    for v in [h.n_f, h.n_s, h.pattern.stride, h.pattern.n_pilot_symbols()] {
        b.extend_from_slice(&(v as u32).to_le_bytes());
    }
    b.push(h.pattern.id.code());
    b.extend_from_slice(&(h.pattern.offset as u32).to_le_bytes());
    for &s in &h.pattern.symbols {
        b.extend_from_slice(&(s as u32).to_le_bytes());
    }
    for v in [h.snr_range_db.0, h.snr_range_db.1, h.doppler_range_hz.0, h.doppler_range_hz.1] {
        b.extend_from_slice(&v.to_le_bytes());
    }
    b.extend_from_slice(&h.master_seed.to_le_bytes());
    b.extend_from_slice(&h.train_fraction.to_le_bytes());
    b.push(h.normalize_power as u8);
    b.extend_from_slice(&(h.components.len() as u32).to_le_bytes());
    for name in &h.components {
        b.extend_from_slice(&(name.len() as u16).to_le_bytes());
        b.extend_from_slice(name.as_bytes());
    }
    b
}

fn put_grid(b: &mut Vec<u8>, g: &Grid32) {
    for r in 0..g.nrows() {
        for c in 0..g.ncols() {
            let x = g[(r, c)];
            b.extend_from_slice(&x.re.to_le_bytes());
            b.extend_from_slice(&x.im.to_le_bytes());
        }
    }
}

pub fn save_dataset(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let h = &ds.header;
    let (fr, fc) = (h.n_pilot_subcarriers(), h.pattern.n_pilot_symbols());
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&header_bytes(h, ds.samples.len() as u64))?;
    let mut rec = Vec::with_capacity(record_len(h));
    for s in &ds.samples {
        if s.feature.shape() != (fr, fc) || s.label.shape() != (h.n_f, h.n_s) {
            return Err(Error::Dimension(format!(
                "sample feature {:?} / label {:?} do not match the header",
                s.feature.shape(),
                s.label.shape()
            )));
        }
        rec.clear();
        put_grid(&mut rec, &s.feature);
        put_grid(&mut rec, &s.label);
        rec.extend_from_slice(&s.snr_db.to_le_bytes());
        rec.extend_from_slice(&s.doppler_hz.to_le_bytes());
        rec.extend_from_slice(&s.pdp_id.to_le_bytes());
        rec.extend_from_slice(&s.seed.to_le_bytes());
        w.write_all(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let mut r = Reader {
        inner: BufReader::new(File::open(path)?),
        what: "dataset",
    };
    let magic = r.bytes::<4>()?;
    if &magic != MAGIC {
        return Err(Error::Format(format!(
            "not a dataset: expected magic \"CEDS\", found {:?}",
            String::from_utf8_lossy(&magic)
        )));
    }
    let version = r.u16()?;
    if version != VERSION {
        return Err(Error::Format(format!(
            "dataset version {version} unsupported (expected {VERSION})"
        )));
    }
    let n = r.u64()?;
    let n_f = dim(r.u32()?, "N_f")?;
    let n_s = dim(r.u32()?, "N_s")?;
    let stride = dim(r.u32()?, "L_s")?;
    let n_pilot = dim(r.u32()?, "N_pilot")?;
    let pid = r.u8()?;
    let offset = r.u32()? as usize;
    let symbols = (0..n_pilot).map(|_| r.u32().map(|v| v as usize)).collect::<Result<Vec<_>>>()?;
    let pattern = pattern_from_parts(pid, symbols, stride, offset)?;
    let snr_range_db = (r.f64()?, r.f64()?);
    let doppler_range_hz = (r.f64()?, r.f64()?);
    let master_seed = r.u64()?;
    let train_fraction = r.f64()?;
    let normalize_power = match r.u8()? {
        0 => false,
        1 => true,
        v => return Err(Error::Format(format!("bad power normalization flag {v}"))),
    };
    let n_comp = r.u32()?;
    let mut components = Vec::with_capacity(n_comp.min(1024) as usize);
    for _ in 0..n_comp {
        let len = r.u16()? as usize;
        let mut buf = vec![0u8; len];
        r.inner.read_exact(&mut buf).map_err(|e| truncated(e, "dataset"))?;
        components.push(String::from_utf8(buf).map_err(|_| Error::Format("component name is not UTF-8".into()))?);
    }
    let header = DatasetHeader {
        n_f,
        n_s,
        pattern,
        snr_range_db,
        doppler_range_hz,
        master_seed,
        train_fraction,
        normalize_power,
        components,
    };
    let (fr, fc) = (header.n_pilot_subcarriers(), n_pilot);
    let mut samples = Vec::with_capacity(n.min(1 << 20) as usize);
    for _ in 0..n {
        let feature = r.grid(fr, fc)?;
        let label = r.grid(n_f, n_s)?;
        let snr_db = r.f32()?;
        let doppler_hz = r.f32()?;
        let pdp_id = r.u32()?;
        if pdp_id as usize >= header.components.len() {
            return Err(Error::Format(format!("record names component {pdp_id}, header has {}", header.components.len())));
        }
        let seed = r.u64()?;
        samples.push(DatasetSample {
            feature,
            label,
            snr_db,
            doppler_hz,
            pdp_id,
            seed,
        });
    }
    let mut extra = [0u8; 1];
    if r.inner.read(&mut extra)? != 0 {
        return Err(Error::Format("trailing bytes after the last dataset record".into()));
    }
    Ok(Dataset { header, samples })
}

/// Header size in bytes.
pub fn header_len(h: &DatasetHeader) -> usize {
    header_bytes(h, 0).len()
}
