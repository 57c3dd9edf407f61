use oamds::code::CodeSpec;
use oamds::codec::{decode, encode, is_codeword, ErasurePattern};
use oamds::field::{Field, FieldElement, FieldSpec};
use oamds::repair::{plan_group_repair, CodewordSource, HelperReads, Repairer};
use oamds::storage::{stripe_file, unstripe};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn fields() -> Vec<Field> {
    vec![
        Field::new(FieldSpec::prime(5).unwrap()),
        Field::new(FieldSpec::prime(7).unwrap()),
        Field::new(FieldSpec::prime(65521).unwrap()),
        Field::new(FieldSpec::gf256()),
        Field::new(FieldSpec::binary(8, 0x11B).unwrap()),
        Field::new(FieldSpec::gf2_16()),
    ]
}

fn elem(f: &Field, raw: u64) -> FieldElement {
    f.element(raw % f.order()).unwrap()
}

proptest! {
    #[test]
    fn field_axioms(which in 0usize..6, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let f = &fields()[which];
        let (a, b, c) = (elem(f, a), elem(f, b), elem(f, c));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), f.zero());
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            prop_assert_eq!(f.div(f.mul(a, b), a).unwrap(), b);
        }
    }

    #[test]
    fn stripe_roundtrip(bytes in proptest::collection::vec(any::<u8>(), 0..600), wide in any::<bool>()) {
        let field = if wide { FieldSpec::gf2_16() } else { FieldSpec::gf256() };
        let params = CodeSpec::grouped(2, 3, 2, field).build().unwrap();
        let stripes = stripe_file(&params, &bytes).unwrap();
        prop_assert_eq!(unstripe(&params, &stripes, bytes.len() as u64).unwrap(), bytes);
    }

    #[test]
    fn encode_is_linear(seed_x in proptest::collection::vec(0u32..7, 27), seed_y in proptest::collection::vec(0u32..7, 27), scale in 0u32..7) {
        let params = CodeSpec::grouped(3, 3, 2, FieldSpec::prime(7).unwrap()).build().unwrap();
        let f = params.field();
        let cols = |v: &[u32]| -> Vec<Vec<FieldElement>> {
            v.chunks(9).map(|c| c.iter().map(|&x| FieldElement::from_raw(x)).collect()).collect()
        };
        let (x, y) = (cols(&seed_x), cols(&seed_y));
        let a = FieldElement::from_raw(scale);
        let combo: Vec<Vec<FieldElement>> = x.iter().zip(&y)
            .map(|(cx, cy)| cx.iter().zip(cy).map(|(&p, &q)| f.add(f.mul(a, p), q)).collect())
            .collect();
        let (ex, ey, ec) = (encode(&params, &x).unwrap(), encode(&params, &y).unwrap(), encode(&params, &combo).unwrap());
        for i in 1..=params.n() {
            for j in 0..params.l() {
                prop_assert_eq!(ec.cell(i, j), f.add(f.mul(a, ex.cell(i, j)), ey.cell(i, j)));
            }
        }
        prop_assert!(is_codeword(&params, &ec).unwrap());
    }

    #[test]
    fn decode_any_erasures(data in proptest::collection::vec(0u32..7, 24), erased in subsequence((1usize..=6).collect::<Vec<_>>(), 0..=3)) {
        let params = CodeSpec::grouped(2, 3, 3, FieldSpec::prime(7).unwrap()).build().unwrap();
        let data: Vec<Vec<FieldElement>> = data.chunks(8).map(|c| c.iter().map(|&x| FieldElement::from_raw(x)).collect()).collect();
        let cw = encode(&params, &data).unwrap();
        prop_assert_eq!(decode(&params, &ErasurePattern::erase(&cw, &erased)).unwrap(), cw);
    }

    #[test]
    fn expansion_independent_of_helper_choice(data in proptest::collection::vec(0u32..7, 24), failed in 1usize..=6) {
        let params = CodeSpec::grouped(2, 3, 3, FieldSpec::prime(7).unwrap()).build().unwrap();
        let data: Vec<Vec<FieldElement>> = data.chunks(8).map(|c| c.iter().map(|&x| FieldElement::from_raw(x)).collect()).collect();
        let cw = encode(&params, &data).unwrap();
        let v = params.position(failed).unwrap().axis;
        let outside: Vec<usize> = (1..=6).filter(|i| !params.group(v).contains(i)).collect();
        let mut expanded = Vec::new();
        for skip in 0..outside.len() {
            let m: Vec<usize> = outside.iter().copied().enumerate().filter(|&(j, _)| j != skip).map(|(_, i)| i).collect();
            let plan = plan_group_repair(&params, failed, &m).unwrap();
            let reads = HelperReads::gather(&plan, &mut CodewordSource::new(&cw, failed)).unwrap();
            let all = Repairer::new(&params, plan).unwrap().expand(&params, &reads).unwrap();
            expanded.push(all);
        }
        for pair in expanded.windows(2) {
            prop_assert_eq!(&pair[0], &pair[1]);
        }
    }
}
