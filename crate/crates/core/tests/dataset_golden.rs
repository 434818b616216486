use reachop::data::{decode_dataset, encode_dataset, read_dataset, DataError, Sample};

fn expected() -> Vec<Sample> {
    vec![
        Sample {
            dims: vec![3, 2],
            bounds: vec![(-1.0, 1.0), (0.0, 2.0)],
            c_in: 4,
            c_out: 1,
            h: vec![0.5],
            experiment: 1,
            seed: 0x0102_0304_0506_0708,
            input: (0..24).map(|k| k as f32 * 0.25 - 1.0).collect(),
            target: (0..6).map(|k| -0.5 * k as f32).collect(),
        },
        Sample {
            dims: vec![2, 2, 2],
            bounds: vec![(0.0, 1.0), (-2.0, 2.0), (0.0, 6.25)],
            c_in: 3,
            c_out: 1,
            h: vec![],
            experiment: 6,
            seed: 42,
            input: (0..24).map(|k| k as f32).collect(),
            target: vec![1.5; 8],
        },
    ]
}

fn golden_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/golden.hjrd")
}

#[test]
fn golden_file_decodes_to_known_samples() {
    assert_eq!(read_dataset(&golden_path()).unwrap(), expected());
}

#[test]
fn encoder_reproduces_golden_bytes() {
    let bytes = std::fs::read(golden_path()).unwrap();
    assert_eq!(encode_dataset(&expected()).unwrap(), bytes);
}

#[test]
fn every_truncation_is_a_structured_error() {
    let bytes = std::fs::read(golden_path()).unwrap();
    for cut in 0..bytes.len() {
        match decode_dataset(&bytes[..cut]) {
            Err(DataError::Format { offset, .. }) => assert!(offset <= cut, "cut {cut} offset {offset}"),
            other => panic!("cut {cut}: {other:?}"),
        }
    }
}

#[test]
fn header_errors_name_offsets() {
    let mut bytes = std::fs::read(golden_path()).unwrap();
    bytes[4] = 9;
    assert!(matches!(decode_dataset(&bytes), Err(DataError::Format { offset: 4, .. })));
    bytes[0] = b'h';
    assert!(matches!(decode_dataset(&bytes), Err(DataError::Format { offset: 0, .. })));
}
