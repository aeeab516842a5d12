use lmnet::io::{parse_samples, read_samples, write_samples, write_samples_to};
use lmnet_core::{sample_er, ErModel, Graph, RngStream};
use proptest::prelude::*;

#[test]
fn file_round_trip_preserves_bits() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.jsonl");
    let mut rng = RngStream::new(3, 0);
    let graphs: Vec<Graph> = (1..30).map(|m| sample_er(&ErModel::new(m, 0.4).unwrap(), &mut rng)).collect();
    write_samples(&path, &graphs).unwrap();
    assert_eq!(read_samples(&path).unwrap(), graphs);
}

#[test]
fn missing_file_is_io_error() {
    let err = read_samples(std::path::Path::new("/nonexistent/x.jsonl")).unwrap_err();
    assert!(matches!(err, lmnet::Error::Io { .. }));
    assert_eq!(err.exit_code(), 2);
}

proptest! {
    #[test]
    fn emit_then_ingest_is_identity(m in 1usize..40, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let g = sample_er(&ErModel::new(m, p).unwrap(), &mut RngStream::new(seed, 0));
        let mut buf = Vec::new();
        write_samples_to(&mut buf, std::slice::from_ref(&g)).unwrap();
        let back = parse_samples(buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), 1);
        prop_assert_eq!(back[0].bits(), g.bits());
    }
}
