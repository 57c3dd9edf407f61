// Repair from d = s + k - 1 helpers: the group mates plus any k outside nodes.

use oamds::code::CodeSpec;
use oamds::codec::{encode, random_data};
use oamds::field::FieldSpec;
use oamds::repair::{
    audit_access, make_annihilator, plan_group_repair, CodewordSource, HelperReads, Repairer,
    TracingSource,
};
use oamds::verify::subsets;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = CodeSpec::grouped(2, 3, 3, FieldSpec::prime(7)?).build()?;
    let ann = make_annihilator(&params, 1)?;
    println!(
        "g_0 coefficients for group 1: {:?}",
        ann.g0().iter().map(|x| x.value()).collect::<Vec<_>>()
    );

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let codeword = encode(&params, &random_data(&params, &mut rng))?;
    let failed = 1;
    let v = params.position(failed)?.axis;
    let outside: Vec<usize> = (1..=params.n())
        .filter(|i| !params.group(v).contains(i))
        .collect();
    for pick in subsets(outside.len(), params.k()) {
        let m: Vec<usize> = pick.iter().map(|&j| outside[j - 1]).collect();
        let plan = plan_group_repair(&params, failed, &m)?;
        let mut source = TracingSource::new(CodewordSource::new(&codeword, failed));
        let reads = HelperReads::gather(&plan, &mut source)?;
        let column = Repairer::new(&params, plan.clone())?.repair(&params, &reads)?;
        assert_eq!(column, codeword.node(failed));
        let report = audit_access(&params, &plan, source.trace())?;
        println!(
            "M={m:?} helpers={:?} accessed={} optimal={}",
            plan.helpers(),
            report.accessed,
            report.optimal
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
