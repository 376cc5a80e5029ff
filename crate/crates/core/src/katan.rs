//! KATAN32: 32-bit blocks, 80-bit keys, 254 rounds of two nonlinear
//! feedback shift registers (L1: 13 bits, L2: 19 bits).
//!
//! Two forms live here. The scalar path (`encrypt_block`/`decrypt_block`)
//! shifts real registers one block at a time and serves as the correctness
//! oracle for the bitsliced path. The bitsliced path works on
//! [`BitslicedBatch`]: 32 lane-words, where bit `j` of word `b` is bit `b`
//! of block `j`, so one call advances 64 blocks (256 bytes). The key is
//! handed to it as 80 broadcast lane-words ([`BitslicedKey`]).

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

pub const ROUNDS: usize = 254;
pub const KEY_BITS: usize = 80;
pub const SUBKEY_BITS: usize = 2 * ROUNDS;
pub const BLOCK_BITS: usize = 32;
pub const LANES: usize = 64;
/// Bytes covered by one bitsliced call.
pub const BATCH_BYTES: usize = LANES * BLOCK_BITS / 8;

const L1_BITS: usize = 13;
const L2_BITS: usize = 19;
const L1_MASK: u32 = (1 << L1_BITS) - 1;
const L2_MASK: u32 = (1 << L2_BITS) - 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KatanError {
    #[error("malformed key: {0}")]
    MalformedKey(String),
    #[error("lane {0} out of range (expected 0..64)")]
    LaneOutOfRange(usize),
}

impl KatanError {
    pub fn kind(&self) -> &'static str {
        match self {
            KatanError::MalformedKey(_) => "MalformedKey",
            KatanError::LaneOutOfRange(_) => "LaneOutOfRange",
        }
    }
}

/// An 80-bit key. Bit `k_0` is the most significant bit of byte 0, which is
/// also the most significant bit of the first hex digit.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Key80([u8; 10]);

impl Key80 {
    pub const fn from_bytes(bytes: [u8; 10]) -> Self {
        Key80(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; 10] {
        &self.0
    }

    /// Key bit `k_i`, `i < 80`.
    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        (self.0[i / 8] >> (7 - i % 8)) & 1 == 1
    }

    /// Returns a copy with bit `k_i` flipped.
    pub fn with_bit_flipped(mut self, i: usize) -> Self {
        self.0[i / 8] ^= 1 << (7 - i % 8);
        self
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Debug for Key80 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Key80({})", self.to_hex())
    }
}

impl fmt::Display for Key80 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FromStr for Key80 {
    type Err = KatanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_key(s)
    }
}

/// Parses the 20-hex-digit text form. Surrounding whitespace is ignored.
pub fn parse_key(text: &str) -> Result<Key80, KatanError> {
    let hex = text.trim();
    if hex.len() != 20 {
        return Err(KatanError::MalformedKey(format!(
            "expected 20 hex characters, got {}",
            hex.chars().count()
        )));
    }
    let mut out = [0u8; 10];
    for (i, c) in hex.chars().enumerate() {
        let nibble = c
            .to_digit(16)
            .ok_or_else(|| KatanError::MalformedKey(format!("non-hex character {c:?}")))?;
        out[i / 2] |= (nibble as u8) << if i % 2 == 0 { 4 } else { 0 };
    }
    Ok(Key80(out))
}

/// Lowercase hex form; inverse of [`parse_key`].
pub fn format_key(key: &Key80) -> String {
    key.to_hex()
}

/// The 508 subkey bits consumed two per round.
#[derive(Clone, PartialEq, Eq)]
pub struct SubkeySchedule {
    bits: [bool; SUBKEY_BITS],
}

impl SubkeySchedule {
    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    /// `(ka, kb)` for round `r`.
    #[inline]
    pub fn round_keys(&self, r: usize) -> (bool, bool) {
        (self.bits[2 * r], self.bits[2 * r + 1])
    }

    pub fn bits(&self) -> &[bool; SUBKEY_BITS] {
        &self.bits
    }
}

impl fmt::Debug for SubkeySchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubkeySchedule").finish_non_exhaustive()
    }
}

/// Runs the 80-bit key LFSR: `sk_i = sk_{i-80} ^ sk_{i-61} ^ sk_{i-50} ^ sk_{i-13}`.
pub fn expand_key(key: &Key80) -> SubkeySchedule {
    let mut bits = [false; SUBKEY_BITS];
    for (i, b) in bits.iter_mut().enumerate().take(KEY_BITS) {
        *b = key.bit(i);
    }
    for i in KEY_BITS..SUBKEY_BITS {
        bits[i] = bits[i - 80] ^ bits[i - 61] ^ bits[i - 50] ^ bits[i - 13];
    }
    SubkeySchedule { bits }
}

/// The irregular-update round constants `T_0..T_253`.
#[derive(Clone, PartialEq, Eq)]
pub struct IrSequence {
    bits: [bool; ROUNDS],
}

impl IrSequence {
    #[inline]
    pub fn bit(&self, round: usize) -> bool {
        self.bits[round]
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bits(&self) -> &[bool; ROUNDS] {
        &self.bits
    }
}

impl fmt::Debug for IrSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        write!(f, "IrSequence({s})")
    }
}

/// 8-bit LFSR started at all-ones, feedback from bits 7, 6, 4, 2 into bit 0.
/// `T_r` is the top bit after the `(r+1)`-th clock.
fn generate_ir() -> IrSequence {
    let mut state: u8 = 0xff;
    let mut bits = [false; ROUNDS];
    for t in bits.iter_mut() {
        let feedback = ((state >> 7) ^ (state >> 6) ^ (state >> 4) ^ (state >> 2)) & 1;
        state = (state << 1) | feedback;
        *t = state >> 7 == 1;
    }
    IrSequence { bits }
}

pub fn ir_sequence() -> &'static IrSequence {
    static IR: OnceLock<IrSequence> = OnceLock::new();
    IR.get_or_init(generate_ir)
}

/// The two registers of a single block. Block bits 0..18 are L2, bits
/// 19..31 are L1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalarState {
    pub l1: u32,
    pub l2: u32,
}

impl ScalarState {
    pub fn load(block: u32) -> Self {
        ScalarState {
            l1: block >> L2_BITS,
            l2: block & L2_MASK,
        }
    }

    pub fn store(&self) -> u32 {
        (self.l1 << L2_BITS) | self.l2
    }
}

#[inline(always)]
fn bit(reg: u32, i: u32) -> u32 {
    (reg >> i) & 1
}

pub fn encrypt_block(block: u32, key: &Key80) -> u32 {
    encrypt_block_with(block, &expand_key(key))
}

pub fn decrypt_block(block: u32, key: &Key80) -> u32 {
    decrypt_block_with(block, &expand_key(key))
}

pub fn encrypt_block_with(block: u32, schedule: &SubkeySchedule) -> u32 {
    let ir = ir_sequence();
    let mut s = ScalarState::load(block);
    for r in 0..ROUNDS {
        let (ka, kb) = schedule.round_keys(r);
        let t = ir.bit(r) as u32;
        let fa = bit(s.l1, 12) ^ bit(s.l1, 7) ^ (bit(s.l1, 8) & bit(s.l1, 5)) ^ (bit(s.l1, 3) & t) ^ ka as u32;
        let fb = bit(s.l2, 18)
            ^ bit(s.l2, 7)
            ^ (bit(s.l2, 12) & bit(s.l2, 10))
            ^ (bit(s.l2, 8) & bit(s.l2, 3))
            ^ kb as u32;
        s.l1 = ((s.l1 << 1) | fb) & L1_MASK;
        s.l2 = ((s.l2 << 1) | fa) & L2_MASK;
    }
    s.store()
}

pub fn decrypt_block_with(block: u32, schedule: &SubkeySchedule) -> u32 {
    let ir = ir_sequence();
    let mut s = ScalarState::load(block);
    for r in (0..ROUNDS).rev() {
        let (ka, kb) = schedule.round_keys(r);
        let t = ir.bit(r) as u32;
        // Bit 0 of each register is the feedback written by round r.
        let fb = s.l1 & 1;
        let fa = s.l2 & 1;
        let l1 = s.l1 >> 1;
        let l2 = s.l2 >> 1;
        let l1_top = fa ^ bit(l1, 7) ^ (bit(l1, 8) & bit(l1, 5)) ^ (bit(l1, 3) & t) ^ ka as u32;
        let l2_top = fb ^ bit(l2, 7) ^ (bit(l2, 12) & bit(l2, 10)) ^ (bit(l2, 8) & bit(l2, 3)) ^ kb as u32;
        s.l1 = l1 | (l1_top << 12);
        s.l2 = l2 | (l2_top << 18);
    }
    s.store()
}

/// Key bit `k_i` broadcast to all 64 lanes of word `i`.
#[derive(Clone, PartialEq, Eq)]
pub struct BitslicedKey {
    words: [u64; KEY_BITS],
}

impl BitslicedKey {
    pub fn words(&self) -> &[u64; KEY_BITS] {
        &self.words
    }

    /// Accepts raw words; each must be all-zeros or all-ones.
    pub fn from_words(words: [u64; KEY_BITS]) -> Result<Self, KatanError> {
        if let Some(i) = words.iter().position(|&w| w != 0 && w != u64::MAX) {
            return Err(KatanError::MalformedKey(format!("key word {i} is not a lane broadcast")));
        }
        Ok(BitslicedKey { words })
    }

    fn schedule(&self) -> [u64; SUBKEY_BITS] {
        let mut k = [0u64; SUBKEY_BITS];
        k[..KEY_BITS].copy_from_slice(&self.words);
        for i in KEY_BITS..SUBKEY_BITS {
            k[i] = k[i - 80] ^ k[i - 61] ^ k[i - 50] ^ k[i - 13];
        }
        k
    }
}

impl fmt::Debug for BitslicedKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BitslicedKey").finish_non_exhaustive()
    }
}

pub fn broadcast_key(key: &Key80) -> BitslicedKey {
    let mut words = [0u64; KEY_BITS];
    for (i, w) in words.iter_mut().enumerate() {
        *w = if key.bit(i) { u64::MAX } else { 0 };
    }
    BitslicedKey { words }
}

/// 64 blocks in transposed form: bit `j` of word `b` is bit `b` of block `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BitslicedBatch {
    pub words: [u64; BLOCK_BITS],
}

impl BitslicedBatch {
    pub const fn new(words: [u64; BLOCK_BITS]) -> Self {
        BitslicedBatch { words }
    }

    pub fn from_blocks(blocks: &[u32; LANES]) -> Self {
        let mut batch = BitslicedBatch::default();
        for (lane, &block) in blocks.iter().enumerate() {
            batch.set_lane(lane, block);
        }
        batch
    }

    pub fn to_blocks(&self) -> [u32; LANES] {
        let mut out = [0u32; LANES];
        for (lane, o) in out.iter_mut().enumerate() {
            *o = self.lane(lane);
        }
        out
    }

    pub fn extract_lane(&self, lane: usize) -> Result<u32, KatanError> {
        if lane >= LANES {
            return Err(KatanError::LaneOutOfRange(lane));
        }
        Ok(self.lane(lane))
    }

    pub fn insert_lane(&mut self, lane: usize, block: u32) -> Result<(), KatanError> {
        if lane >= LANES {
            return Err(KatanError::LaneOutOfRange(lane));
        }
        self.set_lane(lane, block);
        Ok(())
    }

    fn lane(&self, lane: usize) -> u32 {
        self.words
            .iter()
            .enumerate()
            .fold(0u32, |acc, (b, w)| acc | ((((w >> lane) & 1) as u32) << b))
    }

    fn set_lane(&mut self, lane: usize, block: u32) {
        let mask = 1u64 << lane;
        for (b, w) in self.words.iter_mut().enumerate() {
            if (block >> b) & 1 == 1 {
                *w |= mask;
            } else {
                *w &= !mask;
            }
        }
    }
}

pub fn extract_lane(batch: &BitslicedBatch, lane: usize) -> Result<u32, KatanError> {
    batch.extract_lane(lane)
}

// The bitsliced rounds keep each register's whole history in one buffer so
// a round is a single append instead of a 32-word shift. At round r,
// L1[j] = h1[r + 12 - j] and L2[j] = h2[r + 18 - j]; round r writes
// h1[r + 13] (fb) and h2[r + 19] (fa).
const H1_LEN: usize = L1_BITS + ROUNDS;
const H2_LEN: usize = L2_BITS + ROUNDS;

pub fn encrypt_batch(batch: &BitslicedBatch, key: &BitslicedKey) -> BitslicedBatch {
    let k = key.schedule();
    let ir = ir_sequence();
    let mut h1 = [0u64; H1_LEN];
    let mut h2 = [0u64; H2_LEN];
    for j in 0..L2_BITS {
        h2[18 - j] = batch.words[j];
    }
    for j in 0..L1_BITS {
        h1[12 - j] = batch.words[L2_BITS + j];
    }
    for r in 0..ROUNDS {
        let t = if ir.bit(r) { u64::MAX } else { 0 };
        let fa = h1[r] ^ h1[r + 5] ^ (h1[r + 4] & h1[r + 7]) ^ (h1[r + 9] & t) ^ k[2 * r];
        let fb = h2[r] ^ h2[r + 11] ^ (h2[r + 6] & h2[r + 8]) ^ (h2[r + 10] & h2[r + 15]) ^ k[2 * r + 1];
        h1[r + 13] = fb;
        h2[r + 19] = fa;
    }
    let mut out = [0u64; BLOCK_BITS];
    for j in 0..L2_BITS {
        out[j] = h2[H2_LEN - 1 - j];
    }
    for j in 0..L1_BITS {
        out[L2_BITS + j] = h1[H1_LEN - 1 - j];
    }
    BitslicedBatch::new(out)
}

pub fn decrypt_batch(batch: &BitslicedBatch, key: &BitslicedKey) -> BitslicedBatch {
    let k = key.schedule();
    let ir = ir_sequence();
    let mut h1 = [0u64; H1_LEN];
    let mut h2 = [0u64; H2_LEN];
    for j in 0..L2_BITS {
        h2[H2_LEN - 1 - j] = batch.words[j];
    }
    for j in 0..L1_BITS {
        h1[H1_LEN - 1 - j] = batch.words[L2_BITS + j];
    }
    for r in (0..ROUNDS).rev() {
        let t = if ir.bit(r) { u64::MAX } else { 0 };
        let fa = h2[r + 19];
        let fb = h1[r + 13];
        h1[r] = fa ^ h1[r + 5] ^ (h1[r + 4] & h1[r + 7]) ^ (h1[r + 9] & t) ^ k[2 * r];
        h2[r] = fb ^ h2[r + 11] ^ (h2[r + 6] & h2[r + 8]) ^ (h2[r + 10] & h2[r + 15]) ^ k[2 * r + 1];
    }
    let mut out = [0u64; BLOCK_BITS];
    for j in 0..L2_BITS {
        out[j] = h2[18 - j];
    }
    for j in 0..L1_BITS {
        out[L2_BITS + j] = h1[12 - j];
    }
    BitslicedBatch::new(out)
}
