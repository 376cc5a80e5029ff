mod support;

use katanpipe_core::katan::{decrypt_block, encrypt_block, expand_key, Key80};
use katanpipe_core::present::{present_decrypt_block, present_encrypt_block, present_key_schedule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::katan_oracle::KatanOracle;
use support::present_ref;

#[test]
fn katan_scalar_matches_reference_oracle() {
    let oracle = KatanOracle::build().expect("C oracle must build");
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0de);
    let mut cases: Vec<(Key80, u32)> = vec![
        (Key80::from_bytes([0; 10]), 0),
        (Key80::from_bytes([0xff; 10]), 0),
        (Key80::from_bytes([0; 10]), u32::MAX),
    ];
    cases.extend((0..1000).map(|_| (Key80::from_bytes(rng.random()), rng.random())));
    let input: Vec<(String, u32)> = cases.iter().map(|(k, b)| (k.to_hex(), *b)).collect();
    let expected = oracle.run(&input);
    for ((key, block), (enc, dec)) in cases.iter().zip(expected) {
        assert_eq!(encrypt_block(*block, key), enc, "encrypt {key:?} {block:08x}");
        assert_eq!(decrypt_block(*block, key), dec, "decrypt {key:?} {block:08x}");
    }
}

#[test]
fn katan_reference_oracle_reproduces_published_vectors() {
    let oracle = KatanOracle::build().unwrap();
    let out = oracle.run(&[("ffffffffffffffffffff".into(), 0), ("00000000000000000000".into(), u32::MAX)]);
    assert_eq!(out[0].0, 0x7e1f_f945);
    assert_eq!(out[1].0, 0x432e_61da);
}

#[test]
fn katan_schedule_recurrence_on_random_keys() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..100 {
        let key = Key80::from_bytes(rng.random());
        let s = expand_key(&key);
        for i in 0..80 {
            assert_eq!(s.bit(i), key.bit(i));
        }
        // Forward form of the LFSR: k_{i+80} = k_i ^ k_{i+19} ^ k_{i+30} ^ k_{i+67}.
        for i in 0..(508 - 80) {
            assert_eq!(s.bit(i + 80), s.bit(i) ^ s.bit(i + 19) ^ s.bit(i + 30) ^ s.bit(i + 67));
        }
    }
}

#[test]
fn present_published_vectors_via_bit_level_oracle() {
    let published = [
        (0u64, [0u8; 10], 0x5579_c138_7b22_8445u64),
        (0, [0xff; 10], 0xe72c_46c0_f594_5049),
        (u64::MAX, [0; 10], 0xa112_ffc7_2f68_417b),
        (u64::MAX, [0xff; 10], 0x3333_dcd3_2132_10d2),
    ];
    for (pt, key, ct) in published {
        assert_eq!(present_ref::encrypt(pt, &key), ct);
        assert_eq!(present_encrypt_block(pt, &key), ct);
        assert_eq!(present_decrypt_block(ct, &key), pt);
    }
}

#[test]
fn present_matches_bit_level_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(78);
    for _ in 0..300 {
        let key: [u8; 10] = rng.random();
        let pt: u64 = rng.random();
        assert_eq!(present_key_schedule(&key).to_vec(), present_ref::round_keys(&key));
        assert_eq!(present_encrypt_block(pt, &key), present_ref::encrypt(pt, &key));
    }
}
