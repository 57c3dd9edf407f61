// Encodes a file into chunk files, loses r of them, repairs one, decodes the rest.

use std::fs;

use oamds::code::CodeSpec;
use oamds::field::FieldSpec;
use oamds::repair::plan_full_repair;
use oamds::storage::{chunk_path, decode_dir, encode_to_dir, repair_in_dir};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = CodeSpec::grouped(4, 4, 2, FieldSpec::gf256()).build()?;
    let mut data = vec![0u8; 64 * 1024 + 3];
    ChaCha8Rng::seed_from_u64(3).fill_bytes(&mut data);

    let dir = tempfile::tempdir()?;
    encode_to_dir(&params, &data, dir.path())?;
    let original = fs::read(chunk_path(dir.path(), 6))?;

    fs::remove_file(chunk_path(dir.path(), 6))?;
    let outcome = repair_in_dir(dir.path(), &params, &plan_full_repair(&params, 6)?, 4096)?;
    assert_eq!(fs::read(&outcome.path)?, original);
    for (start, report) in &outcome.batches {
        println!("stripes from {start}: {}", report.to_json());
    }

    for i in [1, 3, 5, 8] {
        fs::remove_file(chunk_path(dir.path(), i))?;
    }
    let (decoded, scan) = decode_dir(dir.path())?;
    assert_eq!(decoded, data);
    println!(
        "decoded {} bytes from nodes {:?}",
        decoded.len(),
        scan.present.keys().collect::<Vec<_>>()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
