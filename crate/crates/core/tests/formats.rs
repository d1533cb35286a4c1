use fockdual::duality::CoefficientSequence;
use fockdual::moments::{MomentTable, MultiIndex};
use fockdual::weights::make_fock;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn moment_table_csv_round_trip_is_exact() {
    let phi = make_fock(2).unwrap();
    let table = MomentTable::build(&phi, 4).unwrap();
    let mut buf = Vec::new();
    table.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("alpha_1,alpha_2,value,ln_value,rel_error\n"));
    assert!(!text.contains('\r'));
    let back = MomentTable::read_csv(&buf[..], phi.label()).unwrap();
    for alpha in MultiIndex::all_up_to(2, 4) {
        assert_eq!(table.get(&alpha).unwrap().value.to_bits(), back.get(&alpha).unwrap().value.to_bits());
    }
}

#[test]
fn moment_table_json_round_trip_is_exact() {
    let table = MomentTable::build(&make_fock(1).unwrap(), 6).unwrap();
    let back = MomentTable::from_json(&table.to_json().unwrap()).unwrap();
    assert_eq!(back.len(), 7);
    for alpha in MultiIndex::all_up_to(1, 6) {
        assert_eq!(table.get(&alpha).unwrap().ln_value.to_bits(), back.get(&alpha).unwrap().ln_value.to_bits());
    }
}

#[test]
fn coefficient_sequence_json_round_trip_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let s = CoefficientSequence::random(2, 5, &mut rng).unwrap();
    let back = CoefficientSequence::from_json(&s.to_json().unwrap()).unwrap();
    assert_eq!(s.len(), back.len());
    for ((a, x), (b, y)) in s.iter().zip(back.iter()) {
        assert_eq!(a, b);
        assert_eq!(x.re.to_bits(), y.re.to_bits());
        assert_eq!(x.im.to_bits(), y.im.to_bits());
    }
}

#[test]
fn malformed_inputs_are_rejected() {
    assert!(MomentTable::from_json("{\"entries\": 3}").is_err());
    assert!(CoefficientSequence::from_json("{\"n\": 1, \"degree\": 1, \"terms\": [{\"alpha\": [4], \"re\": 1.0, \"im\": 0.0}]}").is_err());
    assert!(MomentTable::read_csv("alpha_1,value\n1,2\n".as_bytes(), "x").is_err());
}
