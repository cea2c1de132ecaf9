use tdlab::container::{
    container_from_params, export_weights, import_weights, names, params_from_container, DType, ImportOptions,
    Tensor, TensorContainer,
};
use tdlab::embedding::{EmbeddingConfig, EmbeddingParams};
use tdlab::encoder::{init_params, EncoderConfig, MapVariant};
use tdlab::Error;

fn model(variant: MapVariant) -> (EncoderConfig, tdlab::encoder::EncoderParams, EmbeddingParams) {
    let config = EncoderConfig::new(8, 2).unwrap().with_variant(variant);
    let params = init_params(&config, 3).unwrap();
    let emb = EmbeddingParams::random(
        &EmbeddingConfig { vocab_size: 11, embedding_dim: 4, hidden_dim: 8, max_positions: 5, use_positional: true },
        4,
    )
    .unwrap();
    (config, params, emb)
}

fn options() -> ImportOptions {
    ImportOptions { num_heads: Some(2), ..Default::default() }
}

#[test]
fn export_then_import_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    for variant in [MapVariant::StandardAlbert, MapVariant::PaperLiteral] {
        let (config, params, emb) = model(variant);
        let path = dir.path().join("w.tdlab");
        export_weights(&path, &params, &emb, DType::F64).unwrap();
        let m = import_weights(&path, &options()).unwrap();
        assert_eq!(m.encoder.params, params);
        assert_eq!(m.encoder.config, config);
        assert_eq!(m.embedding, emb);
        let again = dir.path().join("again.tdlab");
        export_weights(&again, &m.encoder.params, &m.embedding, DType::F64).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
    }
}

#[test]
fn single_precision_payloads_are_widened() {
    let (_, params, emb) = model(MapVariant::StandardAlbert);
    let bytes = container_from_params(&params, &emb, DType::F32).to_bytes();
    let c = TensorContainer::from_bytes(&bytes).unwrap();
    let m = params_from_container(&c, &options()).unwrap();
    let expected = params.w_q.mapv(|v| v as f32 as f64);
    assert_eq!(m.encoder.params.w_q, expected);
    assert_eq!(container_from_params(&m.encoder.params, &m.embedding, DType::F32).to_bytes(), bytes);
}

#[test]
fn corrupt_magic_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.tdlab");
    let mut bytes = b"XXXX0000".to_vec();
    bytes.extend_from_slice(&0u32.to_le_bytes());
    std::fs::write(&path, bytes).unwrap();
    let err = import_weights(&path, &options()).unwrap_err();
    assert!(matches!(err, Error::Format(_)), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn missing_tensor_is_named() {
    let (_, params, emb) = model(MapVariant::StandardAlbert);
    let full = container_from_params(&params, &emb, DType::F64);
    for drop in names::COMMON.iter().chain(&names::STANDARD_FFN) {
        let mut c = TensorContainer::new();
        for n in full.names().filter(|n| n != drop) {
            c.insert(n, full.get(n).unwrap().clone()).unwrap();
        }
        match params_from_container(&c, &options()) {
            Err(Error::MissingTensor(name)) => assert_eq!(&name, drop),
            other => panic!("dropping {drop}: {other:?}"),
        }
    }
}

#[test]
fn inconsistent_shape_reports_both_dims() {
    let (_, params, emb) = model(MapVariant::StandardAlbert);
    let full = container_from_params(&params, &emb, DType::F64);
    let mut c = TensorContainer::new();
    for n in full.names() {
        let t = if n == names::KEY_B {
            Tensor { dtype: DType::F64, dims: vec![7], data: vec![0.0; 7] }
        } else {
            full.get(n).unwrap().clone()
        };
        c.insert(n, t).unwrap();
    }
    match params_from_container(&c, &options()) {
        Err(Error::Shape { name, expected, actual }) => {
            assert_eq!(name, names::KEY_B);
            assert_eq!(expected, vec![8]);
            assert_eq!(actual, vec![7]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn row_major_order_on_asymmetric_tensor() {
    let mut c = TensorContainer::new();
    c.insert("m", Tensor { dtype: DType::F64, dims: vec![2, 3], data: vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0] }).unwrap();
    let bytes = c.to_bytes();
    let header = 8 + 4 + 4 + 1 + 1 + 4 + 2 * 8;
    let payload: Vec<f64> = bytes[header..]
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect();
    assert_eq!(payload, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    assert_eq!(bytes.len(), header + 6 * 8);
}

#[test]
fn missing_file_is_io_error() {
    let err = import_weights(std::path::Path::new("/nonexistent/w.tdlab"), &options()).unwrap_err();
    assert_eq!(err.exit_code(), 3);
}
