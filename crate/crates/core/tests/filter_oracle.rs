mod common;

use common::{all_sequences, oracle_count, oracle_filter, oracle_pipeline};
use rehab_core::repcount::{apply_filter_pipeline, count_rising_edges, filter_runs};
use rehab_core::{BinarySequence, FilterConfig, FilterOrder};

#[test]
fn pipeline_matches_oracle_exhaustively() {
    let configs: Vec<FilterConfig> = FilterConfig::grid().collect();
    let mut checked = 0usize;
    for len in 0..=12 {
        for bits in all_sequences(len) {
            let seq = BinarySequence::from(bits.clone());
            for c in &configs {
                let got = apply_filter_pipeline(&seq, c);
                let want = oracle_pipeline(&bits, c.fil1_max_len(), c.fil0_max_len());
                assert_eq!(got.as_slice(), want.as_slice(), "{bits:?} {c}");
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 8191 * 49);
}

#[test]
fn zeros_first_matches_oracle() {
    for len in 0..=10 {
        for bits in all_sequences(len) {
            let seq = BinarySequence::from(bits.clone());
            for c in FilterConfig::grid() {
                let got = apply_filter_pipeline(&seq, &c.with_order(FilterOrder::ZerosFirst));
                let want = oracle_filter(
                    &oracle_filter(&bits, false, c.fil0_max_len()),
                    true,
                    c.fil1_max_len(),
                );
                assert_eq!(got.as_slice(), want.as_slice());
            }
        }
    }
}

#[test]
fn single_filter_and_counter_match_oracle() {
    for len in 0..=11 {
        for bits in all_sequences(len) {
            let seq = BinarySequence::from(bits.clone());
            assert_eq!(count_rising_edges(&seq).count, oracle_count(&bits));
            for max_len in 0..=7 {
                for value in [false, true] {
                    assert_eq!(
                        filter_runs(&seq, value, max_len).as_slice(),
                        oracle_filter(&bits, value, max_len).as_slice()
                    );
                }
            }
        }
    }
}

#[test]
fn worked_examples_agree_with_oracle() {
    let b = |v: &[u8]| v.iter().map(|&x| x == 1).collect::<Vec<bool>>();
    assert_eq!(oracle_filter(&b(&[1, 1, 0, 1, 1, 1]), false, 1), b(&[1, 1, 1, 1, 1, 1]));
    assert_eq!(
        oracle_filter(&b(&[1, 1, 1, 0, 0, 0, 1, 1]), true, 2),
        b(&[1, 1, 1, 0, 0, 0, 0, 0])
    );
    assert_eq!(
        oracle_pipeline(&b(&[0, 1, 0, 0, 1, 1, 1, 1, 1, 1, 0]), 5, 3),
        b(&[0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1])
    );
}
