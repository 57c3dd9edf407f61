// Certifies the MDS property by rank-testing every r-subset, then inspects
// the strip structure of one row-permuted block system.

use oamds::code::CodeSpec;
use oamds::field::FieldSpec;
use oamds::verify::{
    check_mds, check_subpacketization, full_rank_strips, strip_analysis, MdsCertificate,
    DEFAULT_BUDGET,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = CodeSpec::grouped(3, 3, 2, FieldSpec::prime(7)?).build()?;
    let cert = check_mds(&params, DEFAULT_BUDGET)?;
    assert!(cert.pass());
    let text = cert.to_text();
    print!("{text}");
    assert_eq!(MdsCertificate::parse(&text)?, cert);
    assert!(check_subpacketization(&params));

    let strip = strip_analysis(&params, &[1, 2, 5], 0)?;
    println!(
        "strip 0: labels {:?} columns {:?}",
        strip.labels, strip.nonzero
    );
    println!(
        "strips with exactly r labels: {:?}",
        full_rank_strips(&params, &[1, 2, 5])?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
