//! Little-endian readers shared by the binary file formats.

use std::io::{self, Read};

use num_complex::Complex32;

use crate::dataset::Grid32;
use crate::{Error, Result};

pub(crate) struct Reader<R> {
    pub inner: R,
    pub what: &'static str,
}

impl<R: Read> Reader<R> {
    pub fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.inner.read_exact(&mut b).map_err(|e| truncated(e, self.what))?;
        Ok(b)
    }
    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes::<1>()?[0])
    }
    pub fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.bytes()?))
    }
    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }
    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }
    pub fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.bytes()?))
    }
    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }
    pub fn grid(&mut self, rows: usize, cols: usize) -> Result<Grid32> {
        let mut buf = vec![0u8; rows * cols * 8];
        self.inner.read_exact(&mut buf).map_err(|e| truncated(e, self.what))?;
        let mut g = Grid32::zeros(rows, cols);
        for (i, ch) in buf.chunks_exact(8).enumerate() {
            let re = f32::from_le_bytes(ch[..4].try_into().unwrap());
            let im = f32::from_le_bytes(ch[4..].try_into().unwrap());
            g[(i / cols, i % cols)] = Complex32::new(re, im);
        }
        Ok(g)
    }
}

pub(crate) fn truncated(e: io::Error, what: &str) -> Error {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        Error::Format(format!("{what} file is truncated"))
    } else {
        Error::Io(e)
    }
}

pub(crate) fn dim(v: u32, name: &str) -> Result<usize> {
    if v == 0 || v > 1 << 16 {
        return Err(Error::Format(format!("implausible {name} = {v}")));
    }
    Ok(v as usize)
}

