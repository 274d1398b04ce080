use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Seek, Write};
use std::path::{Path, PathBuf};

use zip::write::SimpleFileOptions;
use zip::{CompressionMethod, DateTime, ZipArchive, ZipWriter};

use super::npy::{encode_npy, read_npy};
use super::{DenseArray, Result, SparseMatrix, TensorError};

const SUFFIX: &str = ".npy";

fn container_err(path: &Path, err: zip::result::ZipError) -> TensorError {
    match err {
        zip::result::ZipError::Io(e) => TensorError::Io(e),
        other => TensorError::BadContainer(format!("{}: {other}", path.display())),
    }
}

/// Random access to the arrays of an `.npz` container.
pub struct NpzReader<R: Read + Seek = BufReader<File>> {
    archive: ZipArchive<R>,
    path: PathBuf,
}

impl NpzReader {
    pub fn open(path: &Path) -> Result<Self> {
        let file = File::open(path)?;
        Self::new(BufReader::new(file), path)
    }
}

impl<R: Read + Seek> NpzReader<R> {
    pub fn new(reader: R, path: &Path) -> Result<Self> {
        let archive = ZipArchive::new(reader).map_err(|e| container_err(path, e))?;
        Ok(NpzReader {
            archive,
            path: path.to_path_buf(),
        })
    }

    /// Entry names with the `.npy` suffix removed, in archive order.
    pub fn keys(&self) -> Vec<String> {
        self.archive
            .file_names()
            .filter_map(|name| name.ok())
            .map(|name| name.strip_suffix(SUFFIX).unwrap_or(&name).to_string())
            .collect()
    }

    pub fn contains(&self, key: &str) -> bool {
        self.archive.index_for_name(&format!("{key}{SUFFIX}")).is_some()
            || self.archive.index_for_name(key).is_some()
    }

    fn entry_name(&self, key: &str) -> Result<String> {
        let with_suffix = format!("{key}{SUFFIX}");
        if self.archive.index_for_name(&with_suffix).is_some() {
            Ok(with_suffix)
        } else if self.archive.index_for_name(key).is_some() {
            Ok(key.to_string())
        } else {
            Err(TensorError::MissingKey(key.to_string()))
        }
    }

    pub fn read(&mut self, key: &str) -> Result<DenseArray> {
        let name = self.entry_name(key)?;
        let path = self.path.clone();
        let mut entry = self.archive.by_name(&name).map_err(|e| container_err(&path, e))?;
        if entry.compression() != CompressionMethod::Stored {
            return Err(TensorError::BadContainer(format!(
                "{}: entry {name:?} is compressed; only stored entries are supported",
                path.display()
            )));
        }
        let size = entry.size();
        read_npy(&mut entry, Some(size))
    }

    /// The undecoded `.npy` image of an entry.
    pub fn read_raw(&mut self, key: &str) -> Result<Vec<u8>> {
        let name = self.entry_name(key)?;
        let path = self.path.clone();
        let mut entry = self.archive.by_name(&name).map_err(|e| container_err(&path, e))?;
        let mut bytes = Vec::with_capacity(entry.size() as usize);
        entry.read_to_end(&mut bytes)?;
        Ok(bytes)
    }

    /// Reads a sparse matrix from the entries `<prefix>.shape` plus either
    /// `.indptr`/`.indices`/`.data` (CSR) or `.row`/`.col`/`.data` (COO).
    pub fn read_sparse(&mut self, prefix: &str) -> Result<SparseMatrix> {
        let key = |suffix: &str| format!("{prefix}.{suffix}");
        let shape = self.read(&key("shape"))?;
        let dims = shape
            .to_i64_vec()
            .filter(|d| d.len() == 2 && d.iter().all(|&x| x >= 0))
            .ok_or_else(|| {
                TensorError::InconsistentSparse(format!(
                    "{}: shape must hold two non-negative integers",
                    key("shape")
                ))
            })?;
        let shape = [dims[0] as usize, dims[1] as usize];
        if self.contains(&key("indptr")) {
            let indptr = self.read(&key("indptr"))?;
            let indices = self.read(&key("indices"))?;
            let data = self.read(&key("data"))?;
            SparseMatrix::csr(shape, indptr, indices, data)
        } else if self.contains(&key("row")) {
            let row = self.read(&key("row"))?;
            let col = self.read(&key("col"))?;
            let data = self.read(&key("data"))?;
            SparseMatrix::coo(shape, row, col, data)
        } else {
            Err(TensorError::MissingKey(key("indptr")))
        }
    }
}

/// Streams arrays into a new uncompressed `.npz` container.
pub struct NpzWriter<W: Write + Seek = BufWriter<File>> {
    zip: ZipWriter<W>,
}

impl NpzWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path)?;
        Ok(Self::new(BufWriter::new(file)))
    }
}

impl<W: Write + Seek> NpzWriter<W> {
    pub fn new(writer: W) -> Self {
        NpzWriter {
            zip: ZipWriter::new(writer),
        }
    }

    fn options() -> SimpleFileOptions {
        // Fixed timestamp keeps containers byte-identical across rewrites.
        SimpleFileOptions::default()
            .compression_method(CompressionMethod::Stored)
            .last_modified_time(DateTime::default())
            .unix_permissions(0o644)
    }

    pub fn add(&mut self, key: &str, array: &DenseArray) -> Result<()> {
        self.add_raw(key, &encode_npy(array))
    }

    pub fn add_raw(&mut self, key: &str, npy_bytes: &[u8]) -> Result<()> {
        let options = Self::options().large_file(npy_bytes.len() as u64 >= u32::MAX as u64);
        self.zip
            .start_file(format!("{key}{SUFFIX}"), options)
            .map_err(|e| container_err(Path::new(key), e))?;
        self.zip.write_all(npy_bytes)?;
        Ok(())
    }

    pub fn add_sparse(&mut self, prefix: &str, matrix: &SparseMatrix) -> Result<()> {
        for (suffix, array) in matrix.components() {
            self.add(&format!("{prefix}.{suffix}"), &array)?;
        }
        Ok(())
    }

    pub fn finish(self) -> Result<()> {
        let mut inner = self
            .zip
            .finish()
            .map_err(|e| container_err(Path::new("<npz>"), e))?;
        inner.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use std::io::Cursor;

    use super::*;
    use crate::tensor::DType;

    #[test]
    fn in_memory_round_trip() {
        let mut buf = Cursor::new(Vec::new());
        {
            let mut w = NpzWriter::new(&mut buf);
            w.add("a", &DenseArray::vector(vec![1i64, 2, 3])).unwrap();
            w.add("b", &DenseArray::zeros(DType::Float32, vec![2, 3]).unwrap())
                .unwrap();
            w.finish().unwrap();
        }
        buf.set_position(0);
        let mut r = NpzReader::new(buf, Path::new("mem.npz")).unwrap();
        assert_eq!(r.keys(), vec!["a", "b"]);
        assert_eq!(r.read("a").unwrap().to_vec::<i64>().unwrap(), vec![1, 2, 3]);
        assert_eq!(r.read("b").unwrap().shape(), &[2, 3]);
        assert!(matches!(r.read("c"), Err(TensorError::MissingKey(_))));
    }

    #[test]
    fn not_a_zip() {
        let err = NpzReader::new(Cursor::new(b"JUNK".to_vec()), Path::new("x.npz"))
            .err()
            .unwrap();
        assert!(matches!(err, TensorError::BadContainer(_)));
    }
}
