//! Cross-platform golden-file check of the binary field format. The blob
//! under `tests/golden/` was produced by this test (it writes the file
//! when absent) and is committed; any byte-level format drift fails here.

use jmgt_core::field::RealField;
use jmgt_core::fieldio::{deserialize_field, serialize_field};
use jmgt_core::grid::GridSpec;

fn reference_field() -> RealField {
    let spec = GridSpec::new(2, 8, 2.0 * std::f64::consts::PI).unwrap();
    RealField::from_fn(&spec, |x| {
        (x[0]).sin() + 0.5 * (2.0 * x[1]).cos() + 0.25 * (x[0] + x[1]).sin()
    })
}

#[test]
fn golden_blob_rereads_bit_exactly() {
    let field = reference_field();
    let bytes = serialize_field(&field);
    let golden = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/field_2d_8.bin");
    if !golden.exists() {
        std::fs::create_dir_all(golden.parent().unwrap()).unwrap();
        std::fs::write(&golden, &bytes).unwrap();
    }
    let committed = std::fs::read(&golden).unwrap();
    assert_eq!(bytes, committed, "field serialization drifted from the golden blob");

    let back = deserialize_field(&committed).unwrap();
    assert_eq!(back.spec(), field.spec());
    for (a, b) in back.data().iter().zip(field.data()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
