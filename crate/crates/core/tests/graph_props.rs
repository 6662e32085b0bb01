use ontokg_core::graph::{decode_attributes, encode_attributes};
use proptest::prelude::*;

proptest! {
    #[test]
    fn attribute_column_round_trips(pairs in prop::collection::vec(("[a-z_][a-z0-9 _\\\\]{0,6}", "(\\PC|[|=\\\\])*"), 0..5)) {
        let mut seen = std::collections::BTreeSet::new();
        let pairs: Vec<(String, String)> = pairs.into_iter().filter(|(k, _)| seen.insert(k.clone())).collect();
        let encoded = encode_attributes(&pairs);
        prop_assert_eq!(decode_attributes(&encoded).unwrap(), pairs);
    }
}
