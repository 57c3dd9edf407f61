// Systematic encoding, then recovery from every pattern of r erasures.

use oamds::code::CodeSpec;
use oamds::codec::{decode, encode, is_codeword, random_data, ErasurePattern};
use oamds::field::FieldSpec;
use oamds::verify::subsets;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = CodeSpec::grouped(2, 3, 3, FieldSpec::prime(7)?).build()?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let data = random_data(&params, &mut rng);
    let codeword = encode(&params, &data)?;
    assert!(is_codeword(&params, &codeword)?);
    assert_eq!(codeword.data(params.k()), data.as_slice());

    let patterns = subsets(params.n(), params.r());
    for erased in &patterns {
        let pattern = ErasurePattern::erase(&codeword, erased);
        assert_eq!(decode(&params, &pattern)?, codeword);
    }
    println!(
        "(n={}, k={}, l={}) recovered from all {} patterns of {} erasures",
        params.n(),
        params.k(),
        params.l(),
        patterns.len(),
        params.r()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
