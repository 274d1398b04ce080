//! NPY format version 1.0.
//!
//! Layout: magic `\x93NUMPY`, version bytes `(1, 0)`, little-endian `u16`
//! header length, then an ASCII Python dict literal with the keys `descr`,
//! `fortran_order` and `shape`, space padded and newline terminated so the
//! payload starts on a 64-byte boundary.

use std::io::{Read, Write};

use super::{element_count, DType, DenseArray, Result, TensorError};

const MAGIC: &[u8; 6] = b"\x93NUMPY";
const PREAMBLE_LEN: usize = 10;
const ARRAY_ALIGN: usize = 64;
// NumPy reserves room in the header so the first axis can grow in place.
const GROWTH_AXIS_MAX_DIGITS: usize = 21;

/// Decodes one array. When `available` is known (file or entry size), a
/// header that declares more payload than exists is rejected before any
/// allocation.
pub fn read_npy<R: Read>(reader: &mut R, available: Option<u64>) -> Result<DenseArray> {
    let mut preamble = [0u8; PREAMBLE_LEN];
    let got = read_up_to(reader, &mut preamble)?;
    if got < MAGIC.len() || &preamble[..6] != MAGIC {
        return Err(TensorError::BadMagic);
    }
    if got < PREAMBLE_LEN {
        return Err(TensorError::MalformedHeader("preamble cut short".into()));
    }
    let (major, minor) = (preamble[6], preamble[7]);
    if (major, minor) != (1, 0) {
        return Err(TensorError::UnsupportedVersion(major, minor));
    }
    let header_len = u16::from_le_bytes([preamble[8], preamble[9]]) as usize;
    let mut header = vec![0u8; header_len];
    if read_up_to(reader, &mut header)? < header_len {
        return Err(TensorError::MalformedHeader("header cut short".into()));
    }
    let header = std::str::from_utf8(&header)
        .map_err(|_| TensorError::MalformedHeader("header is not ASCII".into()))?;
    let (dtype, shape) = parse_header(header)?;

    let count = element_count(&shape)
        .ok_or_else(|| TensorError::MalformedHeader(format!("shape {shape:?} overflows")))?;
    let expected = (count as u64)
        .checked_mul(dtype.size() as u64)
        .ok_or_else(|| TensorError::MalformedHeader(format!("shape {shape:?} overflows")))?;
    if let Some(available) = available {
        let payload = available.saturating_sub((PREAMBLE_LEN + header_len) as u64);
        if payload < expected {
            return Err(TensorError::TruncatedPayload {
                expected,
                actual: payload,
            });
        }
    }
    let mut bytes = Vec::with_capacity(expected as usize);
    reader.take(expected).read_to_end(&mut bytes)?;
    if (bytes.len() as u64) < expected {
        return Err(TensorError::TruncatedPayload {
            expected,
            actual: bytes.len() as u64,
        });
    }
    DenseArray::from_raw(dtype, shape, bytes)
}

/// Decodes an in-memory `.npy` image.
pub fn decode_npy(bytes: &[u8]) -> Result<DenseArray> {
    read_npy(&mut &bytes[..], Some(bytes.len() as u64))
}

pub fn write_npy<W: Write>(writer: &mut W, array: &DenseArray) -> Result<()> {
    writer.write_all(&header_bytes(array))?;
    writer.write_all(array.as_bytes())?;
    Ok(())
}

/// Encodes an array into the byte image NumPy's `np.save` would produce.
pub fn encode_npy(array: &DenseArray) -> Vec<u8> {
    let mut out = header_bytes(array);
    out.extend_from_slice(array.as_bytes());
    out
}

fn header_bytes(array: &DenseArray) -> Vec<u8> {
    let shape = match array.shape() {
        [] => "()".to_string(),
        [n] => format!("({n},)"),
        dims => {
            let parts: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
            format!("({})", parts.join(", "))
        }
    };
    let mut dict = format!(
        "{{'descr': '{}', 'fortran_order': False, 'shape': {}, }}",
        array.dtype().descr(),
        shape
    );
    if let Some(first) = array.shape().first() {
        let digits = first.to_string().len();
        dict.extend(std::iter::repeat_n(' ', GROWTH_AXIS_MAX_DIGITS.saturating_sub(digits)));
    }
    let pad = ARRAY_ALIGN - (PREAMBLE_LEN + dict.len() + 1) % ARRAY_ALIGN;
    dict.extend(std::iter::repeat_n(' ', pad));
    dict.push('\n');

    let mut out = Vec::with_capacity(PREAMBLE_LEN + dict.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&[1, 0]);
    out.extend_from_slice(&(dict.len() as u16).to_le_bytes());
    out.extend_from_slice(dict.as_bytes());
    out
}

fn read_up_to<R: Read>(reader: &mut R, buf: &mut [u8]) -> std::io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match reader.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}

/// The subset of Python literals that appears in NPY headers.
#[derive(Debug)]
enum Literal {
    Str(String),
    Bool(bool),
    Int(u64),
    Seq(Vec<Literal>),
}

fn parse_header(text: &str) -> Result<(DType, Vec<usize>)> {
    let mut parser = LiteralParser {
        src: text.as_bytes(),
        pos: 0,
    };
    let entries = parser.dict()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(malformed("trailing characters after header dict"));
    }

    let (mut descr, mut fortran, mut shape) = (None, None, None);
    for (key, value) in entries {
        match (key.as_str(), value) {
            ("descr", Literal::Str(s)) => descr = Some(DType::from_descr(&s)?),
            ("descr", other) => return Err(TensorError::UnsupportedDtype(format!("{other:?}"))),
            ("fortran_order", Literal::Bool(b)) => fortran = Some(b),
            ("shape", Literal::Seq(items)) => {
                let dims = items
                    .into_iter()
                    .map(|item| match item {
                        Literal::Int(n) => usize::try_from(n).map_err(|_| malformed("dimension overflows")),
                        _ => Err(malformed("shape entries must be integers")),
                    })
                    .collect::<Result<Vec<_>>>()?;
                shape = Some(dims);
            }
            (other, _) => return Err(malformed(&format!("unexpected header key or value for {other:?}"))),
        }
    }
    let dtype = descr.ok_or_else(|| malformed("missing 'descr'"))?;
    let fortran = fortran.ok_or_else(|| malformed("missing 'fortran_order'"))?;
    let shape = shape.ok_or_else(|| malformed("missing 'shape'"))?;
    if fortran {
        return Err(TensorError::UnsupportedLayout);
    }
    Ok((dtype, shape))
}

fn malformed(msg: &str) -> TensorError {
    TensorError::MalformedHeader(msg.to_string())
}

struct LiteralParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl LiteralParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, byte: u8) -> Result<()> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(malformed(&format!("expected '{}' at offset {}", byte as char, self.pos)))
        }
    }

    fn dict(&mut self) -> Result<Vec<(String, Literal)>> {
        self.expect(b'{')?;
        let mut entries = Vec::new();
        loop {
            if self.peek() == Some(b'}') {
                self.pos += 1;
                return Ok(entries);
            }
            let key = match self.value()? {
                Literal::Str(s) => s,
                _ => return Err(malformed("dict keys must be strings")),
            };
            if entries.iter().any(|(k, _)| *k == key) {
                return Err(malformed(&format!("duplicate key {key:?}")));
            }
            self.expect(b':')?;
            let value = self.value()?;
            entries.push((key, value));
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b'}') => {}
                _ => return Err(malformed("expected ',' or '}'")),
            }
        }
    }

    fn seq(&mut self, close: u8) -> Result<Literal> {
        self.pos += 1;
        let mut items = Vec::new();
        loop {
            if self.peek() == Some(close) {
                self.pos += 1;
                return Ok(Literal::Seq(items));
            }
            items.push(self.value()?);
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(c) if c == close => {}
                _ => return Err(malformed("unterminated sequence")),
            }
        }
    }

    fn value(&mut self) -> Result<Literal> {
        match self.peek() {
            Some(q @ (b'\'' | b'"')) => {
                let start = self.pos + 1;
                let end = self.src[start..]
                    .iter()
                    .position(|&c| c == q)
                    .ok_or_else(|| malformed("unterminated string"))?;
                self.pos = start + end + 1;
                Ok(Literal::Str(
                    String::from_utf8_lossy(&self.src[start..start + end]).into_owned(),
                ))
            }
            Some(b'(') => self.seq(b')'),
            Some(b'[') => self.seq(b']'),
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                // NumPy on some platforms writes long dimensions as `3L`.
                if self.src.get(self.pos) == Some(&b'L') {
                    self.pos += 1;
                }
                digits
                    .parse()
                    .map(Literal::Int)
                    .map_err(|_| malformed("integer overflows"))
            }
            Some(_) => {
                for (word, value) in [("True", true), ("False", false)] {
                    if self.src[self.pos..].starts_with(word.as_bytes()) {
                        self.pos += word.len();
                        return Ok(Literal::Bool(value));
                    }
                }
                Err(malformed(&format!("unexpected token at offset {}", self.pos)))
            }
            None => Err(malformed("unexpected end of header")),
        }
    }
}
