// Rebuilds each node from l/r symbols of every other node and audits the reads.

use oamds::code::CodeSpec;
use oamds::codec::{encode, random_data};
use oamds::field::FieldSpec;
use oamds::repair::{
    audit_access, plan_full_repair, CodewordSource, HelperReads, Repairer, TracingSource,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for spec in [
        CodeSpec::grouped(3, 3, 2, FieldSpec::prime(7)?),
        CodeSpec::shortened(3, 1, 2, FieldSpec::prime(7)?),
    ] {
        let params = spec.build()?;
        let codeword = encode(&params, &random_data(&params, &mut rng))?;
        for failed in 1..=params.n() {
            let plan = plan_full_repair(&params, failed)?;
            let mut source = TracingSource::new(CodewordSource::new(&codeword, failed));
            let reads = HelperReads::gather(&plan, &mut source)?;
            let column = Repairer::new(&params, plan.clone())?.repair(&params, &reads)?;
            assert_eq!(column, codeword.node(failed));

            let report = audit_access(&params, &plan, source.trace())?;
            assert!(report.optimal);
            println!(
                "{spec}: node {failed} coords {:?} accessed {} (bound {})",
                plan.coords(),
                report.accessed,
                report.bound.as_f64()
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
