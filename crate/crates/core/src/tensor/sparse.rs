use super::{DenseArray, Result, TensorError};

/// Index arrays of a sparse matrix. Index arrays keep their on-disk dtype so
/// a read/write cycle reproduces the payload exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SparseLayout {
    Csr {
        indptr: DenseArray,
        indices: DenseArray,
    },
    Coo {
        row: DenseArray,
        col: DenseArray,
    },
}

/// A validated two-dimensional sparse matrix in CSR or COO form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    shape: [usize; 2],
    layout: SparseLayout,
    values: DenseArray,
}

fn inconsistent(msg: String) -> TensorError {
    TensorError::InconsistentSparse(msg)
}

fn index_vec(name: &str, array: &DenseArray) -> Result<Vec<i64>> {
    if array.ndim() != 1 {
        return Err(inconsistent(format!("{name} must be one-dimensional")));
    }
    if !array.dtype().is_integer() {
        return Err(inconsistent(format!(
            "{name} must have an integer dtype, found {}",
            array.dtype()
        )));
    }
    Ok(array.to_i64_vec().expect("integer dtype"))
}

fn check_bound(name: &str, ids: &[i64], bound: usize) -> Result<()> {
    match ids.iter().find(|&&i| i < 0 || i as u64 >= bound as u64) {
        Some(bad) => Err(inconsistent(format!("{name} entry {bad} outside [0, {bound})"))),
        None => Ok(()),
    }
}

impl SparseMatrix {
    pub fn csr(
        shape: [usize; 2],
        indptr: DenseArray,
        indices: DenseArray,
        values: DenseArray,
    ) -> Result<Self> {
        Self::new(shape, SparseLayout::Csr { indptr, indices }, values)
    }

    pub fn coo(shape: [usize; 2], row: DenseArray, col: DenseArray, values: DenseArray) -> Result<Self> {
        Self::new(shape, SparseLayout::Coo { row, col }, values)
    }

    pub fn new(shape: [usize; 2], layout: SparseLayout, values: DenseArray) -> Result<Self> {
        if values.ndim() != 1 {
            return Err(inconsistent("data must be one-dimensional".into()));
        }
        let nnz = values.len();
        let [rows, cols] = shape;
        match &layout {
            SparseLayout::Csr { indptr, indices } => {
                let ptr = index_vec("indptr", indptr)?;
                let idx = index_vec("indices", indices)?;
                if ptr.len() != rows + 1 {
                    return Err(inconsistent(format!(
                        "indptr has length {}, expected rows + 1 = {}",
                        ptr.len(),
                        rows + 1
                    )));
                }
                if ptr[0] != 0 {
                    return Err(inconsistent(format!("indptr[0] is {}, expected 0", ptr[0])));
                }
                if let Some(w) = ptr.windows(2).position(|w| w[1] < w[0]) {
                    return Err(inconsistent(format!(
                        "indptr decreases at position {}: {} > {}",
                        w + 1,
                        ptr[w],
                        ptr[w + 1]
                    )));
                }
                if ptr[rows] as u64 != nnz as u64 || idx.len() != nnz {
                    return Err(inconsistent(format!(
                        "indptr[rows] = {}, indices length {}, data length {nnz} disagree",
                        ptr[rows],
                        idx.len()
                    )));
                }
                check_bound("indices", &idx, cols)?;
            }
            SparseLayout::Coo { row, col } => {
                let r = index_vec("row", row)?;
                let c = index_vec("col", col)?;
                if r.len() != nnz || c.len() != nnz {
                    return Err(inconsistent(format!(
                        "row ({}), col ({}) and data ({nnz}) lengths disagree",
                        r.len(),
                        c.len()
                    )));
                }
                check_bound("row", &r, rows)?;
                check_bound("col", &c, cols)?;
            }
        }
        Ok(SparseMatrix {
            shape,
            layout,
            values,
        })
    }

    pub fn shape(&self) -> [usize; 2] {
        self.shape
    }

    pub fn rows(&self) -> usize {
        self.shape[0]
    }

    pub fn cols(&self) -> usize {
        self.shape[1]
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn layout(&self) -> &SparseLayout {
        &self.layout
    }

    pub fn values(&self) -> &DenseArray {
        &self.values
    }

    pub fn is_csr(&self) -> bool {
        matches!(self.layout, SparseLayout::Csr { .. })
    }

    /// `(row, col, value index)` for every stored entry, in storage order.
    pub fn entries(&self) -> Vec<(usize, usize, usize)> {
        match &self.layout {
            SparseLayout::Csr { indptr, indices } => {
                let ptr = indptr.to_i64_vec().expect("validated");
                let idx = indices.to_i64_vec().expect("validated");
                let mut out = Vec::with_capacity(idx.len());
                for r in 0..self.rows() {
                    for k in ptr[r] as usize..ptr[r + 1] as usize {
                        out.push((r, idx[k] as usize, k));
                    }
                }
                out
            }
            SparseLayout::Coo { row, col } => {
                let r = row.to_i64_vec().expect("validated");
                let c = col.to_i64_vec().expect("validated");
                (0..r.len()).map(|k| (r[k] as usize, c[k] as usize, k)).collect()
            }
        }
    }

    /// Column ids of the stored entries of each row.
    pub fn row_lists(&self) -> Vec<Vec<usize>> {
        let mut rows = vec![Vec::new(); self.rows()];
        for (r, c, _) in self.entries() {
            rows[r].push(c);
        }
        rows
    }

    /// Named component arrays, as stored in a container.
    pub fn components(&self) -> Vec<(&'static str, DenseArray)> {
        let shape = DenseArray::vector(vec![self.shape[0] as i64, self.shape[1] as i64]);
        match &self.layout {
            SparseLayout::Csr { indptr, indices } => vec![
                ("data", self.values.clone()),
                ("indices", indices.clone()),
                ("indptr", indptr.clone()),
                ("shape", shape),
            ],
            SparseLayout::Coo { row, col } => vec![
                ("row", row.clone()),
                ("col", col.clone()),
                ("data", self.values.clone()),
                ("shape", shape),
            ],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> DenseArray {
        DenseArray::vector(v.to_vec())
    }

    #[test]
    fn identity_csr() {
        let m = SparseMatrix::csr([2, 2], ints(&[0, 1, 2]), ints(&[0, 1]), DenseArray::vector(vec![1.0f64, 1.0]))
            .unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.entries(), vec![(0, 0, 0), (1, 1, 1)]);
    }

    #[test]
    fn non_monotone_indptr() {
        let err = SparseMatrix::csr([2, 3], ints(&[0, 3, 2]), ints(&[0, 1, 2]), ints(&[1, 1, 1])).unwrap_err();
        assert!(matches!(err, TensorError::InconsistentSparse(_)));
    }

    #[test]
    fn empty_csr() {
        let m = SparseMatrix::csr([3, 3], ints(&[0, 0, 0, 0]), ints(&[]), DenseArray::vector(Vec::<f32>::new()))
            .unwrap();
        assert_eq!(m.nnz(), 0);
        assert_eq!(m.row_lists(), vec![Vec::<usize>::new(); 3]);
    }

    #[test]
    fn coo_bounds() {
        assert!(SparseMatrix::coo([2, 2], ints(&[0, 1]), ints(&[1, 0]), ints(&[5, 6])).is_ok());
        assert!(SparseMatrix::coo([2, 2], ints(&[0, 2]), ints(&[1, 0]), ints(&[5, 6])).is_err());
        assert!(SparseMatrix::coo([2, 2], ints(&[0]), ints(&[1, 0]), ints(&[5, 6])).is_err());
    }

    #[test]
    fn csr_index_out_of_range() {
        assert!(SparseMatrix::csr([1, 2], ints(&[0, 1]), ints(&[2]), ints(&[1])).is_err());
        assert!(SparseMatrix::csr([1, 2], ints(&[1, 1]), ints(&[]), ints(&[])).is_err());
        let float_idx = DenseArray::vector(vec![0.0f64]);
        assert!(SparseMatrix::csr([1, 2], ints(&[0, 1]), float_idx, ints(&[1])).is_err());
    }
}
