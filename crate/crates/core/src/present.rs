//! PRESENT-80: 64-bit SPN, 31 rounds, 80-bit key.
//!
//! Blocks and keys are big-endian: bit 63 of the block is the leftmost bit,
//! and the first key byte holds key bits 79..72.

pub const ROUNDS: usize = 31;
pub const ROUND_KEYS: usize = ROUNDS + 1;

const SBOX: [u8; 16] = [
    0xc, 0x5, 0x6, 0xb, 0x9, 0x0, 0xa, 0xd, 0x3, 0xe, 0xf, 0x8, 0x4, 0x7, 0x1, 0x2,
];
const SBOX_INV: [u8; 16] = [
    0x5, 0xe, 0xf, 0x8, 0xc, 0x1, 0x2, 0xd, 0xb, 0x4, 0x6, 0x3, 0x0, 0x7, 0x9, 0xa,
];

const KEY_MASK: u128 = (1 << 80) - 1;

pub fn present_key_schedule(key: &[u8; 10]) -> [u64; ROUND_KEYS] {
    let mut reg = key.iter().fold(0u128, |acc, &b| (acc << 8) | b as u128);
    let mut keys = [0u64; ROUND_KEYS];
    for (i, rk) in keys.iter_mut().enumerate() {
        *rk = (reg >> 16) as u64;
        let counter = (i + 1) as u128;
        reg = ((reg << 61) | (reg >> 19)) & KEY_MASK;
        let top = SBOX[(reg >> 76) as usize] as u128;
        reg = (reg & !(0xf << 76)) | (top << 76);
        reg ^= counter << 15;
    }
    keys
}

fn sbox_layer(state: u64, table: &[u8; 16]) -> u64 {
    (0..16).fold(0, |acc, i| {
        let nibble = (state >> (4 * i)) & 0xf;
        acc | (table[nibble as usize] as u64) << (4 * i)
    })
}

#[inline]
fn p_index(i: u32) -> u32 {
    if i == 63 {
        63
    } else {
        (16 * i) % 63
    }
}

fn p_layer(state: u64) -> u64 {
    (0..64).fold(0, |acc, i| acc | ((state >> i) & 1) << p_index(i))
}

fn p_layer_inv(state: u64) -> u64 {
    (0..64).fold(0, |acc, i| acc | ((state >> p_index(i)) & 1) << i)
}

pub fn encrypt_with(block: u64, round_keys: &[u64; ROUND_KEYS]) -> u64 {
    let mut state = block;
    for rk in &round_keys[..ROUNDS] {
        state ^= rk;
        state = p_layer(sbox_layer(state, &SBOX));
    }
    state ^ round_keys[ROUNDS]
}

pub fn decrypt_with(block: u64, round_keys: &[u64; ROUND_KEYS]) -> u64 {
    let mut state = block ^ round_keys[ROUNDS];
    for rk in round_keys[..ROUNDS].iter().rev() {
        state = sbox_layer(p_layer_inv(state), &SBOX_INV);
        state ^= rk;
    }
    state
}

pub fn present_encrypt_block(block: u64, key: &[u8; 10]) -> u64 {
    encrypt_with(block, &present_key_schedule(key))
}

pub fn present_decrypt_block(block: u64, key: &[u8; 10]) -> u64 {
    decrypt_with(block, &present_key_schedule(key))
}
