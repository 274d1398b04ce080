//! Reader/writer checks against arrays produced by NumPy itself
//! (`tests/data/npy/make_fixtures.py`).

use std::path::PathBuf;

use gli_core::tensor::{
    encode_npy, read_array, read_sparse, write_array, write_sparse, DType, DenseArray, NpzReader,
    SparseLayout, SparseMatrix, TensorError,
};
use proptest::prelude::*;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/npy").join(name)
}

#[test]
fn reads_numpy_int64_vector() {
    let a = read_array(fixture("int64_123.npy"), None).unwrap();
    assert_eq!(a.dtype(), DType::Int64);
    assert_eq!(a.shape(), &[3]);
    assert_eq!(a.to_vec::<i64>().unwrap(), vec![1, 2, 3]);
}

#[test]
fn reads_empty_float_vector() {
    let a = read_array(fixture("float64_empty.npy"), None).unwrap();
    assert_eq!(a.dtype(), DType::Float64);
    assert_eq!(a.shape(), &[0]);
    assert!(a.is_empty());
}

#[test]
fn reads_every_supported_dtype() {
    let scalar = read_array(fixture("int8_scalar.npy"), None).unwrap();
    assert_eq!(scalar.shape(), &[] as &[usize]);
    assert_eq!(scalar.to_vec::<i8>().unwrap(), vec![-5]);

    let mask = read_array(fixture("bool_mask.npy"), None).unwrap();
    assert_eq!(mask.to_vec::<bool>().unwrap(), vec![true, false, true]);

    let u8s = read_array(fixture("uint8_2x2.npy"), None).unwrap();
    assert_eq!(u8s.to_vec::<u8>().unwrap(), vec![0, 255, 7, 8]);

    let ramp = read_array(fixture("int16_ramp.npy"), None).unwrap();
    assert_eq!(ramp.to_vec::<i16>().unwrap(), (-3..4).collect::<Vec<i16>>());

    let cube = read_array(fixture("int32_3d.npy"), None).unwrap();
    assert_eq!(cube.shape(), &[2, 3, 4]);
    assert_eq!(cube.to_vec::<i32>().unwrap()[23], 23);

    let zeros = read_array(fixture("float32_2x3_zeros.npy"), None).unwrap();
    assert_eq!(zeros.to_vec::<f32>().unwrap(), vec![0.0; 6]);

    let specials = read_array(fixture("float64_specials.npy"), None).unwrap();
    let v = specials.to_vec::<f64>().unwrap();
    assert_eq!(v[1].to_bits(), (-0.0f64).to_bits());
    assert!(v[2].is_infinite() && v[3].is_nan());
}

#[test]
fn writer_output_is_byte_identical_to_numpy() {
    for name in [
        "int64_123.npy",
        "float64_empty.npy",
        "float32_2x3_zeros.npy",
        "int8_scalar.npy",
        "bool_mask.npy",
        "uint8_2x2.npy",
        "int16_ramp.npy",
        "int32_3d.npy",
        "float64_specials.npy",
    ] {
        let original = std::fs::read(fixture(name)).unwrap();
        let array = read_array(fixture(name), None).unwrap();
        assert_eq!(encode_npy(&array), original, "{name}");
    }
}

#[test]
fn rejects_layouts_and_dtypes_outside_the_contract() {
    assert!(matches!(
        read_array(fixture("fortran_2x2.npy"), None),
        Err(TensorError::UnsupportedLayout)
    ));
    assert!(matches!(
        read_array(fixture("bigendian_i4.npy"), None),
        Err(TensorError::UnsupportedDtype(_))
    ));
    assert!(matches!(
        read_array(fixture("unicode.npy"), None),
        Err(TensorError::UnsupportedDtype(_))
    ));
}

#[test]
fn junk_file_is_bad_magic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("junk.npy");
    std::fs::write(&path, b"JUNK and more bytes").unwrap();
    assert!(matches!(read_array(&path, None), Err(TensorError::BadMagic)));
}

#[test]
fn reads_numpy_savez_container() {
    let mut r = NpzReader::open(&fixture("multi.npz")).unwrap();
    let mut keys = r.keys();
    keys.sort();
    assert_eq!(keys, vec!["a", "b"]);
    assert_eq!(r.read("a").unwrap().to_vec::<i64>().unwrap(), vec![1, 2, 3]);
    assert_eq!(r.read("b").unwrap().to_vec::<f32>().unwrap(), vec![1.0; 4]);
    assert!(matches!(
        read_array(fixture("multi.npz"), Some("zzz")),
        Err(TensorError::MissingKey(_))
    ));
}

#[test]
fn reads_sparse_fixtures() {
    let eye = read_sparse(fixture("sparse.npz"), "eye").unwrap();
    assert_eq!(eye.shape(), [2, 2]);
    assert_eq!(eye.nnz(), 2);
    assert!(eye.is_csr());
    assert_eq!(eye.values().to_vec::<f64>().unwrap(), vec![1.0, 1.0]);

    let empty = read_sparse(fixture("sparse.npz"), "empty").unwrap();
    assert_eq!(empty.nnz(), 0);
    assert_eq!(empty.shape(), [3, 3]);

    assert!(matches!(
        read_sparse(fixture("sparse.npz"), "bad"),
        Err(TensorError::InconsistentSparse(_))
    ));
    let coo = read_sparse(fixture("sparse.npz"), "tri").unwrap();
    assert!(matches!(coo.layout(), SparseLayout::Coo { .. }));
    assert_eq!(coo.entries(), vec![(0, 1, 0), (1, 2, 1), (2, 0, 2)]);
    assert!(matches!(
        read_sparse(fixture("sparse.npz"), "nothing"),
        Err(TensorError::MissingKey(_))
    ));
}

#[test]
fn write_then_read_examples() {
    let dir = tempfile::tempdir().unwrap();
    let ints = DenseArray::vector(vec![1i64, 2, 3]);
    write_array(&ints, dir.path().join("a.npy"), None).unwrap();
    assert_eq!(read_array(dir.path().join("a.npy"), None).unwrap(), ints);

    let zeros = DenseArray::zeros(DType::Float32, vec![2, 3]).unwrap();
    let npz = dir.path().join("c.npz");
    write_array(&zeros, &npz, Some("z")).unwrap();
    write_array(&ints, &npz, Some("i")).unwrap();
    // replacing an entry keeps the others
    write_array(&ints, &npz, Some("z")).unwrap();
    assert_eq!(read_array(&npz, Some("z")).unwrap(), ints);
    assert_eq!(read_array(&npz, Some("i")).unwrap(), ints);
}

#[test]
fn write_into_unwritable_location_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("plain-file");
    std::fs::write(&blocker, b"x").unwrap();
    let err = write_array(&DenseArray::vector(vec![1u8]), blocker.join("a.npy"), None).unwrap_err();
    assert!(matches!(err, TensorError::Io(_)));
}

fn arb_dense() -> impl Strategy<Value = DenseArray> {
    let dtype = prop::sample::select(DType::ALL.to_vec());
    let shape = prop::collection::vec(0usize..5, 0..4);
    (dtype, shape).prop_flat_map(|(dtype, shape)| {
        let n: usize = shape.iter().product::<usize>() * dtype.size();
        prop::collection::vec(any::<u8>(), n).prop_map(move |mut bytes| {
            if dtype == DType::Bool {
                bytes.iter_mut().for_each(|b| *b &= 1);
            }
            DenseArray::from_raw(dtype, shape.clone(), bytes).unwrap()
        })
    })
}

fn arb_csr() -> impl Strategy<Value = SparseMatrix> {
    (1usize..6, 1usize..6).prop_flat_map(|(rows, cols)| {
        prop::collection::vec(prop::collection::btree_set(0..cols as i32, 0..=cols), rows).prop_map(
            move |row_sets| {
                let mut indptr = vec![0i32];
                let mut indices = Vec::new();
                for set in &row_sets {
                    indices.extend(set.iter().copied());
                    indptr.push(indices.len() as i32);
                }
                let values: Vec<f32> = (0..indices.len()).map(|i| i as f32 * 0.5).collect();
                SparseMatrix::csr(
                    [rows, cols],
                    DenseArray::vector(indptr),
                    DenseArray::vector(indices),
                    DenseArray::vector(values),
                )
                .unwrap()
            },
        )
    })
}

proptest! {
    #[test]
    fn dense_round_trip_is_identity(array in arb_dense()) {
        let dir = tempfile::tempdir().unwrap();
        write_array(&array, dir.path().join("x.npy"), None).unwrap();
        prop_assert_eq!(&read_array(dir.path().join("x.npy"), None).unwrap(), &array);
        write_array(&array, dir.path().join("x.npz"), Some("k")).unwrap();
        prop_assert_eq!(read_array(dir.path().join("x.npz"), Some("k")).unwrap(), array);
    }

    #[test]
    fn sparse_round_trip_is_identity(matrix in arb_csr()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.npz");
        write_sparse(&matrix, &path, "m").unwrap();
        prop_assert_eq!(read_sparse(&path, "m").unwrap(), matrix);
    }
}
