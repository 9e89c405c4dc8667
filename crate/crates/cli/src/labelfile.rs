//! On-disk label store.
//!
//! Layout (little endian): magic `FTCL`, format version `u16`, build
//! parameters, graph fingerprint, record count `u32`, then one record per
//! vertex: `u32` byte length followed by the encoded label.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use ftconn_core::labeling::FinalLabel;
use ftconn_core::scheme::PartitionMode;

use crate::CliError;

pub const MAGIC: &[u8; 4] = b"FTCL";
pub const FORMAT_VERSION: u16 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct LabelFileHeader {
    pub n: u32,
    pub f: u32,
    pub seed: u64,
    pub c: f64,
    pub c_sparse: f64,
    pub uid_bits: u32,
    pub partition: PartitionMode,
    pub fingerprint: [u8; 32],
}

impl LabelFileHeader {
    fn write_to(&self, w: &mut impl Write) -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&self.n.to_le_bytes())?;
        w.write_all(&self.f.to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        w.write_all(&self.c.to_le_bytes())?;
        w.write_all(&self.c_sparse.to_le_bytes())?;
        w.write_all(&self.uid_bits.to_le_bytes())?;
        w.write_all(&[partition_code(self.partition)])?;
        w.write_all(&self.fingerprint)
    }

    fn read_from(r: &mut impl Read) -> Result<Self, String> {
        let mut magic = [0u8; 4];
        read_exact(r, &mut magic)?;
        if &magic != MAGIC {
            return Err("not a label file (bad magic)".into());
        }
        let version = u16::from_le_bytes(read_array(r)?);
        if version != FORMAT_VERSION {
            return Err(format!("unsupported label file version {version}"));
        }
        let n = u32::from_le_bytes(read_array(r)?);
        let f = u32::from_le_bytes(read_array(r)?);
        let seed = u64::from_le_bytes(read_array(r)?);
        let c = f64::from_le_bytes(read_array(r)?);
        let c_sparse = f64::from_le_bytes(read_array(r)?);
        let uid_bits = u32::from_le_bytes(read_array(r)?);
        let [mode] = read_array(r)?;
        let partition = match mode {
            0 => PartitionMode::Random,
            1 => PartitionMode::Derandomized,
            m => return Err(format!("unknown partition mode {m}")),
        };
        let fingerprint = read_array(r)?;
        Ok(LabelFileHeader { n, f, seed, c, c_sparse, uid_bits, partition, fingerprint })
    }
}

fn partition_code(p: PartitionMode) -> u8 {
    match p {
        PartitionMode::Random => 0,
        PartitionMode::Derandomized => 1,
    }
}

fn read_exact(r: &mut impl Read, buf: &mut [u8]) -> Result<(), String> {
    r.read_exact(buf).map_err(|e| format!("truncated label file: {e}"))
}

fn read_array<const N: usize>(r: &mut impl Read) -> Result<[u8; N], String> {
    let mut b = [0u8; N];
    read_exact(r, &mut b)?;
    Ok(b)
}

/// Writes all labels; returns the file size in bytes.
pub fn write_label_file(path: &Path, header: &LabelFileHeader, labels: &[FinalLabel]) -> Result<u64, CliError> {
    let io = |e| CliError::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    header.write_to(&mut w).map_err(io)?;
    w.write_all(&(labels.len() as u32).to_le_bytes()).map_err(io)?;
    for l in labels {
        let bytes = l.to_bytes();
        let len = u32::try_from(bytes.len()).map_err(|_| CliError::Invariant("label exceeds 4 GiB".into()))?;
        w.write_all(&len.to_le_bytes()).map_err(io)?;
        w.write_all(&bytes).map_err(io)?;
    }
    w.flush().map_err(io)?;
    let size = w.get_ref().metadata().map_err(io)?.len();
    Ok(size)
}

/// An open label file; labels are decoded on demand.
pub struct LabelFile {
    pub header: LabelFileHeader,
    path: PathBuf,
    reader: BufReader<File>,
    /// Byte offset and length of each record's payload.
    index: Vec<(u64, u32)>,
}

impl LabelFile {
    pub fn open(path: &Path) -> Result<Self, CliError> {
        let mut reader = BufReader::new(File::open(path).map_err(|e| CliError::io(path, e))?);
        let bad = |m: String| CliError::Input(format!("{}: {m}", path.display()));
        let header = LabelFileHeader::read_from(&mut reader).map_err(bad)?;
        let count = u32::from_le_bytes(read_array(&mut reader).map_err(bad)?);
        if count != header.n {
            return Err(bad(format!("record count {count} differs from n = {}", header.n)));
        }
        let end = reader.get_ref().metadata().map_err(|e| CliError::io(path, e))?.len();
        let mut pos = reader.stream_position().map_err(|e| CliError::io(path, e))?;
        let mut index = Vec::with_capacity(count as usize);
        for v in 0..count {
            let len = u32::from_le_bytes(read_array(&mut reader).map_err(bad)?);
            pos += 4;
            if pos + len as u64 > end {
                return Err(bad(format!("record {v} runs past end of file")));
            }
            index.push((pos, len));
            pos += len as u64;
            reader.seek_relative(len as i64).map_err(|e| CliError::io(path, e))?;
        }
        if pos != end {
            return Err(bad("trailing bytes after last record".into()));
        }
        Ok(LabelFile { header, path: path.to_path_buf(), reader, index })
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn read_label(&mut self, v: usize) -> Result<FinalLabel, CliError> {
        let &(off, len) = self
            .index
            .get(v)
            .ok_or_else(|| CliError::Usage(format!("vertex {v} out of range (n = {})", self.index.len())))?;
        let io = |e| CliError::io(&self.path, e);
        self.reader.seek(SeekFrom::Start(off)).map_err(io)?;
        let mut buf = vec![0u8; len as usize];
        self.reader.read_exact(&mut buf).map_err(|e| CliError::io(&self.path, e))?;
        let label = FinalLabel::from_bytes(&buf).map_err(|e| CliError::Input(format!("{}: label {v}: {e}", self.path.display())))?;
        if label.vertex() != v || label.header.params.n != self.header.n as usize || label.header.params.f != self.header.f as usize {
            return Err(CliError::Input(format!("{}: label {v} does not match the file header", self.path.display())));
        }
        Ok(label)
    }

    pub fn read_all(&mut self) -> Result<Vec<FinalLabel>, CliError> {
        (0..self.len()).map(|v| self.read_label(v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ftconn_core::graph::{generate, Model};
    use ftconn_core::{build_scheme, BuildConfig};

    #[test]
    fn roundtrip_and_corruption() {
        let g = generate(&Model::Cycle { k: 6 }, 0).unwrap();
        let sc = build_scheme(&g, &BuildConfig { f: 2, seed: 3, ..Default::default() }).unwrap();
        let header = LabelFileHeader {
            n: 6,
            f: 2,
            seed: 3,
            c: 8.0,
            c_sparse: 4.0,
            uid_bits: 64,
            partition: PartitionMode::Random,
            fingerprint: crate::source::fingerprint(&g),
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.bin");
        write_label_file(&path, &header, &sc.labels).unwrap();
        let mut lf = LabelFile::open(&path).unwrap();
        assert_eq!(lf.header, header);
        assert_eq!(lf.read_all().unwrap(), sc.labels);
        assert!(matches!(lf.read_label(6), Err(CliError::Usage(_))));

        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 1]).unwrap();
        assert!(matches!(LabelFile::open(&path), Err(CliError::Input(_))));
        std::fs::write(&path, b"nope").unwrap();
        assert!(matches!(LabelFile::open(&path), Err(CliError::Input(_))));
    }
}
