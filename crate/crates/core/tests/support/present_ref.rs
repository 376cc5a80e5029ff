//! Bit-by-bit PRESENT-80 written from the design description, kept apart
//! from the word-level implementation it checks. Bit 0 is the least
//! significant bit everywhere.

const SBOX: [u8; 16] = [12, 5, 6, 11, 9, 0, 10, 13, 3, 14, 15, 8, 4, 7, 1, 2];

fn to_bits(x: u64) -> [u8; 64] {
    std::array::from_fn(|i| ((x >> i) & 1) as u8)
}

fn from_bits(bits: &[u8]) -> u64 {
    bits.iter().enumerate().map(|(i, &b)| (b as u64) << i).sum()
}

fn substitute(bits: &mut [u8], nibble: usize) {
    let v = (0..4).map(|j| bits[4 * nibble + j] << j).sum::<u8>();
    let s = SBOX[v as usize];
    for j in 0..4 {
        bits[4 * nibble + j] = (s >> j) & 1;
    }
}

/// Round keys 1..=32 for a key given most significant byte first.
pub fn round_keys(key: &[u8; 10]) -> Vec<u64> {
    let mut reg = [0u8; 80];
    for (byte_idx, byte) in key.iter().enumerate() {
        for j in 0..8 {
            reg[79 - (8 * byte_idx + (7 - j))] = (byte >> j) & 1;
        }
    }
    let mut keys = Vec::with_capacity(32);
    for counter in 1..=32u32 {
        keys.push(from_bits(&reg[16..80]));
        if counter == 32 {
            break;
        }
        let mut rotated = [0u8; 80];
        for i in 0..80 {
            rotated[(i + 61) % 80] = reg[i];
        }
        reg = rotated;
        substitute(&mut reg, 19);
        for j in 0..5 {
            reg[15 + j] ^= ((counter >> j) & 1) as u8;
        }
    }
    keys
}

pub fn encrypt(block: u64, key: &[u8; 10]) -> u64 {
    let keys = round_keys(key);
    let mut state = to_bits(block);
    for rk in &keys[..31] {
        let k = to_bits(*rk);
        for i in 0..64 {
            state[i] ^= k[i];
        }
        for n in 0..16 {
            substitute(&mut state, n);
        }
        let mut permuted = [0u8; 64];
        for i in 0..64 {
            let dest = if i == 63 { 63 } else { (16 * i) % 63 };
            permuted[dest] = state[i];
        }
        state = permuted;
    }
    from_bits(&state) ^ keys[31]
}
