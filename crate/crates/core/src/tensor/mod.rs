//! Dense and sparse tensors stored in the NumPy binary formats.
//!
//! Single arrays live in `.npy` files (format version 1.0, little-endian,
//! C order). Several arrays can share one uncompressed `.npz` container, in
//! which case a [`DataRef`] names the entry through its `key`.

mod npy;
mod npz;
mod sparse;

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Component, Path};

use serde::{Deserialize, Serialize};

pub use npy::{decode_npy, encode_npy, read_npy, write_npy};
pub use npz::{NpzReader, NpzWriter};
pub use sparse::{SparseLayout, SparseMatrix};

/// Errors raised while decoding or encoding tensors.
#[derive(Debug, thiserror::Error)]
pub enum TensorError {
    #[error("bad magic: not an NPY array")]
    BadMagic,
    #[error("unsupported NPY format version {0}.{1}")]
    UnsupportedVersion(u8, u8),
    #[error("unsupported dtype {0:?}")]
    UnsupportedDtype(String),
    #[error("unsupported layout: fortran_order arrays are not accepted")]
    UnsupportedLayout,
    #[error("malformed NPY header: {0}")]
    MalformedHeader(String),
    #[error("truncated payload: expected {expected} bytes, found {actual}")]
    TruncatedPayload { expected: u64, actual: u64 },
    #[error("missing key {0:?} in container")]
    MissingKey(String),
    #[error("inconsistent sparse matrix: {0}")]
    InconsistentSparse(String),
    #[error("bad container: {0}")]
    BadContainer(String),
    #[error("element count {actual} does not match shape {shape:?}")]
    ElementCount { shape: Vec<usize>, actual: usize },
    #[error("dtype mismatch: array holds {actual}, requested {requested}")]
    DtypeMismatch { actual: DType, requested: DType },
    #[error("invalid data reference {0:?}: must be a relative path inside the dataset")]
    InvalidRef(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl TensorError {
    /// Stable identifier of the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            TensorError::BadMagic => "BadMagic",
            TensorError::UnsupportedVersion(..) => "UnsupportedVersion",
            TensorError::UnsupportedDtype(_) => "UnsupportedDtype",
            TensorError::UnsupportedLayout => "UnsupportedLayout",
            TensorError::MalformedHeader(_) => "MalformedHeader",
            TensorError::TruncatedPayload { .. } => "TruncatedPayload",
            TensorError::MissingKey(_) => "MissingKey",
            TensorError::InconsistentSparse(_) => "InconsistentSparse",
            TensorError::BadContainer(_) => "BadContainer",
            TensorError::ElementCount { .. } => "ElementCount",
            TensorError::DtypeMismatch { .. } => "DtypeMismatch",
            TensorError::InvalidRef(_) => "InvalidRef",
            TensorError::Io(_) => "IoError",
        }
    }
}

pub type Result<T, E = TensorError> = std::result::Result<T, E>;

/// Element type of a tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DType {
    Int8,
    Int16,
    Int32,
    Int64,
    UInt8,
    Float32,
    Float64,
    Bool,
}

impl DType {
    pub const ALL: [DType; 8] = [
        DType::Int8,
        DType::Int16,
        DType::Int32,
        DType::Int64,
        DType::UInt8,
        DType::Float32,
        DType::Float64,
        DType::Bool,
    ];

    /// Size of one element in bytes.
    pub fn size(self) -> usize {
        match self {
            DType::Int8 | DType::UInt8 | DType::Bool => 1,
            DType::Int16 => 2,
            DType::Int32 | DType::Float32 => 4,
            DType::Int64 | DType::Float64 => 8,
        }
    }

    /// NPY type descriptor, as NumPy writes it.
    pub fn descr(self) -> &'static str {
        match self {
            DType::Int8 => "|i1",
            DType::Int16 => "<i2",
            DType::Int32 => "<i4",
            DType::Int64 => "<i8",
            DType::UInt8 => "|u1",
            DType::Float32 => "<f4",
            DType::Float64 => "<f8",
            DType::Bool => "|b1",
        }
    }

    /// Parses an NPY type descriptor. Big-endian descriptors are rejected.
    pub fn from_descr(descr: &str) -> Result<Self> {
        let unsupported = || TensorError::UnsupportedDtype(descr.to_string());
        let mut chars = descr.chars();
        let order = chars.next().ok_or_else(unsupported)?;
        let dtype = match chars.as_str() {
            "b1" => DType::Bool,
            "i1" => DType::Int8,
            "u1" => DType::UInt8,
            "i2" => DType::Int16,
            "i4" => DType::Int32,
            "i8" => DType::Int64,
            "f4" => DType::Float32,
            "f8" => DType::Float64,
            _ => return Err(unsupported()),
        };
        match order {
            '<' => Ok(dtype),
            '|' if dtype.size() == 1 => Ok(dtype),
            _ => Err(unsupported()),
        }
    }

    /// Human-readable name used in metadata files (`"int64"`, `"float32"`, ...).
    pub fn name(self) -> &'static str {
        match self {
            DType::Int8 => "int8",
            DType::Int16 => "int16",
            DType::Int32 => "int32",
            DType::Int64 => "int64",
            DType::UInt8 => "uint8",
            DType::Float32 => "float32",
            DType::Float64 => "float64",
            DType::Bool => "bool",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        DType::ALL.into_iter().find(|d| d.name() == name)
    }

    pub fn is_integer(self) -> bool {
        matches!(
            self,
            DType::Int8 | DType::Int16 | DType::Int32 | DType::Int64 | DType::UInt8
        )
    }

    pub fn is_float(self) -> bool {
        matches!(self, DType::Float32 | DType::Float64)
    }
}

impl fmt::Display for DType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

mod sealed {
    pub trait Sealed {}
}

/// Rust scalar types that map one-to-one onto a [`DType`].
pub trait Element: Copy + sealed::Sealed {
    const DTYPE: DType;
    fn write_le(self, out: &mut Vec<u8>);
    fn read_le(bytes: &[u8]) -> Self;
}

macro_rules! numeric_element {
    ($($ty:ty => $dtype:ident),* $(,)?) => {$(
        impl sealed::Sealed for $ty {}
        impl Element for $ty {
            const DTYPE: DType = DType::$dtype;
            fn write_le(self, out: &mut Vec<u8>) {
                out.extend_from_slice(&self.to_le_bytes());
            }
            fn read_le(bytes: &[u8]) -> Self {
                <$ty>::from_le_bytes(bytes.try_into().expect("element width"))
            }
        }
    )*};
}

numeric_element!(
    i8 => Int8,
    i16 => Int16,
    i32 => Int32,
    i64 => Int64,
    u8 => UInt8,
    f32 => Float32,
    f64 => Float64,
);

impl sealed::Sealed for bool {}
impl Element for bool {
    const DTYPE: DType = DType::Bool;
    fn write_le(self, out: &mut Vec<u8>) {
        out.push(self as u8);
    }
    fn read_le(bytes: &[u8]) -> Self {
        bytes[0] != 0
    }
}

/// A row-major dense array. The payload is kept as the exact little-endian
/// bytes found on disk, so equality is bit-exact (NaN payloads included).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DenseArray {
    dtype: DType,
    shape: Vec<usize>,
    bytes: Vec<u8>,
}

impl DenseArray {
    pub fn from_raw(dtype: DType, shape: Vec<usize>, bytes: Vec<u8>) -> Result<Self> {
        let count = element_count(&shape)
            .ok_or_else(|| TensorError::MalformedHeader(format!("shape {shape:?} overflows")))?;
        if bytes.len() != count * dtype.size() {
            return Err(TensorError::ElementCount {
                shape,
                actual: bytes.len() / dtype.size(),
            });
        }
        Ok(DenseArray {
            dtype,
            shape,
            bytes,
        })
    }

    pub fn from_vec<T: Element>(shape: Vec<usize>, values: Vec<T>) -> Result<Self> {
        let mut bytes = Vec::with_capacity(values.len() * T::DTYPE.size());
        for v in values {
            v.write_le(&mut bytes);
        }
        Self::from_raw(T::DTYPE, shape, bytes)
    }

    /// One-dimensional array holding `values`.
    pub fn vector<T: Element>(values: Vec<T>) -> Self {
        let n = values.len();
        Self::from_vec(vec![n], values).expect("length matches shape")
    }

    pub fn zeros(dtype: DType, shape: Vec<usize>) -> Result<Self> {
        let count = element_count(&shape)
            .ok_or_else(|| TensorError::MalformedHeader(format!("shape {shape:?} overflows")))?;
        Self::from_raw(dtype, shape, vec![0; count * dtype.size()])
    }

    pub fn dtype(&self) -> DType {
        self.dtype
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn ndim(&self) -> usize {
        self.shape.len()
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.bytes.len() / self.dtype.size()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    /// Size of the leading dimension (1 for a 0-d array).
    pub fn first_dim(&self) -> usize {
        self.shape.first().copied().unwrap_or(1)
    }

    /// Product of all trailing dimensions.
    pub fn row_width(&self) -> usize {
        self.shape.iter().skip(1).product()
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    /// Decodes the payload as `T`; the dtype must match exactly.
    pub fn to_vec<T: Element>(&self) -> Result<Vec<T>> {
        if T::DTYPE != self.dtype {
            return Err(TensorError::DtypeMismatch {
                actual: self.dtype,
                requested: T::DTYPE,
            });
        }
        Ok(self
            .bytes
            .chunks_exact(self.dtype.size())
            .map(T::read_le)
            .collect())
    }

    /// Element `i` (flat, row-major) widened to `f64`.
    pub fn get_f64(&self, i: usize) -> f64 {
        let w = self.dtype.size();
        let b = &self.bytes[i * w..(i + 1) * w];
        match self.dtype {
            DType::Int8 => i8::read_le(b) as f64,
            DType::Int16 => i16::read_le(b) as f64,
            DType::Int32 => i32::read_le(b) as f64,
            DType::Int64 => i64::read_le(b) as f64,
            DType::UInt8 => u8::read_le(b) as f64,
            DType::Float32 => f32::read_le(b) as f64,
            DType::Float64 => f64::read_le(b),
            DType::Bool => bool::read_le(b) as u8 as f64,
        }
    }

    /// Element `i` as an integer; `None` for floating-point dtypes.
    pub fn get_i64(&self, i: usize) -> Option<i64> {
        let w = self.dtype.size();
        let b = &self.bytes[i * w..(i + 1) * w];
        Some(match self.dtype {
            DType::Int8 => i8::read_le(b) as i64,
            DType::Int16 => i16::read_le(b) as i64,
            DType::Int32 => i32::read_le(b) as i64,
            DType::Int64 => i64::read_le(b),
            DType::UInt8 => u8::read_le(b) as i64,
            DType::Bool => bool::read_le(b) as i64,
            DType::Float32 | DType::Float64 => return None,
        })
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.get_f64(i)).collect()
    }

    /// All elements as integers, or `None` if the dtype is floating point.
    pub fn to_i64_vec(&self) -> Option<Vec<i64>> {
        (0..self.len()).map(|i| self.get_i64(i)).collect()
    }
}

pub(crate) fn element_count(shape: &[usize]) -> Option<usize> {
    shape.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d))
}

/// Either kind of tensor an attribute may hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tensor {
    Dense(DenseArray),
    Sparse(SparseMatrix),
}

impl Tensor {
    pub fn dtype(&self) -> DType {
        match self {
            Tensor::Dense(a) => a.dtype(),
            Tensor::Sparse(m) => m.values().dtype(),
        }
    }

    pub fn shape(&self) -> Vec<usize> {
        match self {
            Tensor::Dense(a) => a.shape().to_vec(),
            Tensor::Sparse(m) => m.shape().to_vec(),
        }
    }

    /// Size of the leading dimension.
    pub fn first_dim(&self) -> usize {
        match self {
            Tensor::Dense(a) => a.first_dim(),
            Tensor::Sparse(m) => m.rows(),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, Tensor::Sparse(_))
    }

    pub fn as_dense(&self) -> Option<&DenseArray> {
        match self {
            Tensor::Dense(a) => Some(a),
            Tensor::Sparse(_) => None,
        }
    }
}

/// Location of a tensor relative to the dataset directory.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DataRef {
    pub file: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
}

impl DataRef {
    pub fn new(file: impl Into<String>, key: Option<&str>) -> Result<Self> {
        let r = DataRef {
            file: file.into(),
            key: key.map(str::to_string),
        };
        r.check()?;
        Ok(r)
    }

    /// Ensures the file path is relative and never leaves the dataset directory.
    pub fn check(&self) -> Result<()> {
        let path = Path::new(&self.file);
        let safe = !self.file.is_empty()
            && !self.file.contains('\\')
            && path
                .components()
                .all(|c| matches!(c, Component::Normal(_) | Component::CurDir));
        if safe {
            Ok(())
        } else {
            Err(TensorError::InvalidRef(self.file.clone()))
        }
    }
}

impl fmt::Display for DataRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.key {
            Some(key) => write!(f, "{}:{}", self.file, key),
            None => f.write_str(&self.file),
        }
    }
}

/// Reads a dense array from an `.npy` file, or from entry `key` of an `.npz`
/// container.
pub fn read_array(path: impl AsRef<Path>, key: Option<&str>) -> Result<DenseArray> {
    let path = path.as_ref();
    match key {
        Some(key) => NpzReader::open(path)?.read(key),
        None => {
            let file = File::open(path)?;
            let available = file.metadata()?.len();
            read_npy(&mut BufReader::new(file), Some(available))
        }
    }
}

/// Writes a dense array. With a `key`, the array is stored as an entry of the
/// `.npz` container at `path`; other entries already present are preserved.
pub fn write_array(array: &DenseArray, path: impl AsRef<Path>, key: Option<&str>) -> Result<()> {
    let path = path.as_ref();
    match key {
        None => {
            let mut w = BufWriter::new(File::create(path)?);
            write_npy(&mut w, array)?;
            w.flush()?;
            Ok(())
        }
        Some(key) => {
            let mut kept = Vec::new();
            if path.exists() {
                let mut reader = NpzReader::open(path)?;
                for existing in reader.keys() {
                    if existing != key {
                        let bytes = reader.read_raw(&existing)?;
                        kept.push((existing, bytes));
                    }
                }
            }
            let mut writer = NpzWriter::create(path)?;
            for (k, bytes) in kept {
                writer.add_raw(&k, &bytes)?;
            }
            writer.add(key, array)?;
            writer.finish()
        }
    }
}

/// Reads a sparse matrix stored under `key_prefix` in an `.npz` container.
pub fn read_sparse(path: impl AsRef<Path>, key_prefix: &str) -> Result<SparseMatrix> {
    NpzReader::open(path.as_ref())?.read_sparse(key_prefix)
}

/// Writes a sparse matrix as a fresh `.npz` container.
pub fn write_sparse(matrix: &SparseMatrix, path: impl AsRef<Path>, key_prefix: &str) -> Result<()> {
    let mut writer = NpzWriter::create(path.as_ref())?;
    writer.add_sparse(key_prefix, matrix)?;
    writer.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descr_round_trip() {
        for d in DType::ALL {
            assert_eq!(DType::from_descr(d.descr()).unwrap(), d);
            assert_eq!(DType::from_name(d.name()), Some(d));
        }
    }

    #[test]
    fn big_endian_is_rejected() {
        assert!(matches!(
            DType::from_descr(">i8"),
            Err(TensorError::UnsupportedDtype(_))
        ));
        assert!(matches!(
            DType::from_descr("<U8"),
            Err(TensorError::UnsupportedDtype(_))
        ));
        assert!(DType::from_descr("|i8").is_err());
        assert_eq!(DType::from_descr("<i1").unwrap(), DType::Int8);
    }

    #[test]
    fn dense_accessors() {
        let a = DenseArray::from_vec(vec![2, 2], vec![1i32, -2, 3, 4]).unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(a.row_width(), 2);
        assert_eq!(a.get_f64(1), -2.0);
        assert_eq!(a.to_i64_vec().unwrap(), vec![1, -2, 3, 4]);
        assert!(a.to_vec::<i64>().is_err());
        assert!(DenseArray::from_vec(vec![3], vec![1.0f64]).is_err());
    }

    #[test]
    fn nan_payloads_compare_bitwise() {
        let a = DenseArray::vector(vec![f64::NAN]);
        assert_eq!(a, a.clone());
    }

    #[test]
    fn data_ref_rejects_traversal() {
        assert!(DataRef::new("a/b.npz", None).is_ok());
        assert!(DataRef::new("../x.npy", None).is_err());
        assert!(DataRef::new("a/../../x.npy", None).is_err());
        assert!(DataRef::new("/etc/passwd", None).is_err());
        assert!(DataRef::new("", None).is_err());
    }
}
