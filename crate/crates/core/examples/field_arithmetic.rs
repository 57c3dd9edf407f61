// Arithmetic in GF(7), GF(2^8) and GF(2^16).

use oamds::field::{Field, FieldElement, FieldSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let gf7 = Field::new(FieldSpec::prime(7)?);
    let (three, five) = (gf7.element(3)?, gf7.element(5)?);
    assert_eq!(gf7.mul(three, five), gf7.element(1)?);
    assert_eq!(gf7.inv(three)?, five);
    println!(
        "GF(7): 3*5 = {}, 3^-1 = {}",
        gf7.mul(three, five),
        gf7.inv(three)?
    );

    let gf256 = Field::new(FieldSpec::gf256());
    let x = FieldElement::from_raw(0x53);
    let y = gf256.inv(x)?;
    assert_eq!(gf256.mul(x, y), gf256.one());
    println!("{}: 0x53^-1 = {:#04x}", gf256.spec(), y.value());

    let gf16 = Field::new(FieldSpec::gf2_16());
    let z = FieldElement::from_raw(0xBEEF);
    assert_eq!(gf16.pow(z, 65535), gf16.one());
    println!("{}: 0xbeef^(2^16-1) = {}", gf16.spec(), gf16.pow(z, 65535));

    // pow(0, 0) is 1 by convention
    assert_eq!(gf7.pow(gf7.zero(), 0), gf7.one());

    // elements outside the field are rejected by the checked operations
    assert!(gf7.try_add(FieldElement::from_raw(9), three).is_err());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
