mod field_arithmetic {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/field_arithmetic.rs"
    ));
}

mod construction_matrices {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/construction_matrices.rs"
    ));
}

mod encode_decode {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/encode_decode.rs"
    ));
}

mod optimal_access_repair {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/optimal_access_repair.rs"
    ));
}

mod group_repair {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/group_repair.rs"
    ));
}

mod mds_certificate {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/mds_certificate.rs"
    ));
}

mod file_roundtrip {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/file_roundtrip.rs"
    ));
}

#[test]
fn field_arithmetic_example_runs() {
    field_arithmetic::run_example().expect("field_arithmetic example should run");
}

#[test]
fn construction_matrices_example_runs() {
    construction_matrices::run_example().expect("construction_matrices example should run");
}

#[test]
fn encode_decode_example_runs() {
    encode_decode::run_example().expect("encode_decode example should run");
}

#[test]
fn optimal_access_repair_example_runs() {
    optimal_access_repair::run_example().expect("optimal_access_repair example should run");
}

#[test]
fn group_repair_example_runs() {
    group_repair::run_example().expect("group_repair example should run");
}

#[test]
fn mds_certificate_example_runs() {
    mds_certificate::run_example().expect("mds_certificate example should run");
}

#[test]
fn file_roundtrip_example_runs() {
    file_roundtrip::run_example().expect("file_roundtrip example should run");
}
