// Prints the sparse parity matrices `A_{t,i}` of a small grouped code.

use oamds::code::CodeSpec;
use oamds::field::FieldSpec;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = CodeSpec::grouped(3, 3, 2, FieldSpec::prime(7)?).build()?;
    println!(
        "n={} k={} l={} lambda={:?} gamma={}",
        params.n(),
        params.k(),
        params.l(),
        params
            .lambdas()
            .iter()
            .map(|x| x.value())
            .collect::<Vec<_>>(),
        params.gamma()
    );

    for i in [1, 4] {
        let pos = params.position(i)?;
        println!("A_(1,{i})  (axis {}, digit {})", pos.axis, pos.digit);
        let block = params.dense_block(1, i)?;
        for a in 0..params.l() {
            let row: Vec<String> = block.row(a).iter().map(|x| x.to_string()).collect();
            println!("  a={a} [{}]", row.join(" "));
        }
    }

    // row a of A_{t,i} has s nonzeros when a's digit on i's axis equals i's digit
    let support = params.row_support(2, 1, 3)?;
    assert_eq!(support.len(), 3);
    assert_eq!(params.row_support(2, 1, 1)?.len(), 1);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
