//! Binary matrix format: `EMBM` magic, then little-endian `u32` version, dim
//! and vocab size, followed by one record per TID: `u32` TID and `dim` `f32`s.

use std::io::{Read, Write};

use super::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::text::Lexicon;

pub const MATRIX_MAGIC: [u8; 4] = *b"EMBM";
pub const MATRIX_VERSION: u32 = 1;

pub fn write_matrix(matrix: &EmbeddingMatrix, mut w: impl Write) -> Result<()> {
    w.write_all(&MATRIX_MAGIC)?;
    w.write_all(&MATRIX_VERSION.to_le_bytes())?;
    w.write_all(&(matrix.dim() as u32).to_le_bytes())?;
    w.write_all(&(matrix.len() as u32).to_le_bytes())?;
    for (tid, v) in matrix.iter() {
        w.write_all(&tid.to_le_bytes())?;
        for x in v {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_u32(r: &mut impl Read, what: &str) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)
        .map_err(|_| Error::Corrupt(format!("embedding file truncated reading {what}")))?;
    Ok(u32::from_le_bytes(buf))
}

pub fn read_matrix(mut r: impl Read) -> Result<EmbeddingMatrix> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Corrupt("embedding file too short".into()))?;
    if magic != MATRIX_MAGIC {
        return Err(Error::Corrupt("bad embedding file magic".into()));
    }
    let version = read_u32(&mut r, "version")?;
    if version != MATRIX_VERSION {
        return Err(Error::Corrupt(format!("unsupported embedding file version {version}")));
    }
    let dim = read_u32(&mut r, "dim")? as usize;
    if dim == 0 {
        return Err(Error::Corrupt("embedding dim is zero".into()));
    }
    let count = read_u32(&mut r, "vocab size")?;
    let mut matrix = EmbeddingMatrix::new(dim);
    let mut row = vec![0u8; dim * 4];
    for _ in 0..count {
        let tid = read_u32(&mut r, "tid")?;
        r.read_exact(&mut row)
            .map_err(|_| Error::Corrupt(format!("embedding file truncated in tid {tid}")))?;
        let v = row
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        matrix
            .insert(tid, v)
            .map_err(|e| Error::Corrupt(e.to_string()))?;
    }
    if matrix.len() != count as usize {
        return Err(Error::Corrupt("duplicate tid in embedding file".into()));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Corrupt("trailing bytes after embedding records".into()));
    }
    Ok(matrix)
}

/// Plain-text `tid<TAB>token` listing for debugging.
pub fn write_token_sidecar(matrix: &EmbeddingMatrix, lexicon: &Lexicon, mut w: impl Write) -> Result<()> {
    for (tid, _) in matrix.iter() {
        writeln!(w, "{tid}\t{}", lexicon.token(tid).unwrap_or("?"))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> EmbeddingMatrix {
        let mut m = EmbeddingMatrix::new(3);
        m.insert(2, vec![0.5, -1.25, 3.0e-7]).unwrap();
        m.insert(9, vec![f32::MAX, f32::MIN_POSITIVE, 0.0]).unwrap();
        m
    }

    #[test]
    fn round_trip_is_exact() {
        let mut bytes = Vec::new();
        write_matrix(&sample(), &mut bytes).unwrap();
        assert_eq!(bytes.len(), 16 + 2 * (4 + 3 * 4));
        assert_eq!(read_matrix(bytes.as_slice()).unwrap(), sample());
    }

    #[test]
    fn corrupt_inputs_are_rejected() {
        let mut bytes = Vec::new();
        write_matrix(&sample(), &mut bytes).unwrap();
        let mut bad_magic = bytes.clone();
        bad_magic[0] = b'X';
        assert!(matches!(read_matrix(bad_magic.as_slice()), Err(Error::Corrupt(_))));
        assert!(matches!(read_matrix(&bytes[..bytes.len() - 1]), Err(Error::Corrupt(_))));
        let mut trailing = bytes.clone();
        trailing.push(0);
        assert!(matches!(read_matrix(trailing.as_slice()), Err(Error::Corrupt(_))));
    }
}
