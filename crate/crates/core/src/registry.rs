//! Block ciphers behind one trait, registered by name.
//!
//! The benchmark harness and the envelope decoder only see
//! `dyn BlockCipher`; which implementation runs is picked at runtime by
//! name (`KATAN32`, `PRESENT`, `AES-128`).

use std::sync::OnceLock;

use aes::cipher::generic_array::GenericArray;
use aes::cipher::{BlockDecrypt, BlockEncrypt, KeyInit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::katan::{self, BitslicedBatch, BitslicedKey, Key80, SubkeySchedule, LANES};
use crate::present;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegistryError {
    #[error("cipher {name:?} has unsupported shape: {block_bits}-bit block, {key_bits}-bit key")]
    UnsupportedShape {
        name: String,
        block_bits: usize,
        key_bits: usize,
    },
    #[error("cipher {0:?} is already registered")]
    DuplicateName(String),
    #[error("cipher {0:?} failed its encrypt/decrypt round-trip self-test")]
    SelfTestFailed(String),
    #[error("expected a {expected}-byte key, got {got} bytes")]
    BadKeyLength { expected: usize, got: usize },
    #[error("unknown cipher {0:?}")]
    UnknownCipher(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CipherDescriptor {
    pub name: &'static str,
    pub block_bits: usize,
    pub key_bits: usize,
}

impl CipherDescriptor {
    pub fn block_bytes(&self) -> usize {
        self.block_bits / 8
    }

    pub fn key_bytes(&self) -> usize {
        self.key_bits / 8
    }
}

/// A cipher family member; produces a keyed instance.
pub trait BlockCipher: Send + Sync {
    fn descriptor(&self) -> CipherDescriptor;

    fn keyed(&self, key: &[u8]) -> Result<Box<dyn KeyedCipher>, RegistryError>;
}

/// A cipher with its key schedule already expanded.
pub trait KeyedCipher: Send + Sync {
    fn block_bytes(&self) -> usize;

    fn encrypt_one(&self, block: &mut [u8]);

    fn decrypt_one(&self, block: &mut [u8]);

    /// `data.len()` must be a multiple of the block size; a trailing partial
    /// block is left untouched.
    fn encrypt_blocks(&self, data: &mut [u8]) {
        for block in data.chunks_exact_mut(self.block_bytes()) {
            self.encrypt_one(block);
        }
    }

    fn decrypt_blocks(&self, data: &mut [u8]) {
        for block in data.chunks_exact_mut(self.block_bytes()) {
            self.decrypt_one(block);
        }
    }
}

fn check_key_len(key: &[u8], expected: usize) -> Result<(), RegistryError> {
    if key.len() != expected {
        return Err(RegistryError::BadKeyLength {
            expected,
            got: key.len(),
        });
    }
    Ok(())
}

pub struct Katan32;

struct KeyedKatan32 {
    schedule: SubkeySchedule,
    sliced: BitslicedKey,
}

impl BlockCipher for Katan32 {
    fn descriptor(&self) -> CipherDescriptor {
        CipherDescriptor {
            name: "KATAN32",
            block_bits: 32,
            key_bits: 80,
        }
    }

    fn keyed(&self, key: &[u8]) -> Result<Box<dyn KeyedCipher>, RegistryError> {
        check_key_len(key, 10)?;
        let key = Key80::from_bytes(key.try_into().expect("length checked"));
        Ok(Box::new(KeyedKatan32 {
            schedule: katan::expand_key(&key),
            sliced: katan::broadcast_key(&key),
        }))
    }
}

impl KeyedKatan32 {
    // Full runs of 64 blocks go through the bitsliced kernel, the rest
    // through the scalar one.
    fn apply(
        &self,
        data: &mut [u8],
        batch_fn: fn(&BitslicedBatch, &BitslicedKey) -> BitslicedBatch,
        block_fn: fn(u32, &SubkeySchedule) -> u32,
    ) {
        let mut batches = data.chunks_exact_mut(4 * LANES);
        for chunk in &mut batches {
            let mut blocks = [0u32; LANES];
            for (b, bytes) in blocks.iter_mut().zip(chunk.chunks_exact(4)) {
                *b = u32::from_le_bytes(bytes.try_into().unwrap());
            }
            let out = batch_fn(&BitslicedBatch::from_blocks(&blocks), &self.sliced).to_blocks();
            for (b, bytes) in out.iter().zip(chunk.chunks_exact_mut(4)) {
                bytes.copy_from_slice(&b.to_le_bytes());
            }
        }
        for block in batches.into_remainder().chunks_exact_mut(4) {
            let x = u32::from_le_bytes(block.try_into().unwrap());
            block.copy_from_slice(&block_fn(x, &self.schedule).to_le_bytes());
        }
    }
}

impl KeyedCipher for KeyedKatan32 {
    fn block_bytes(&self) -> usize {
        4
    }

    fn encrypt_one(&self, block: &mut [u8]) {
        let x = u32::from_le_bytes(block[..4].try_into().unwrap());
        block[..4].copy_from_slice(&katan::encrypt_block_with(x, &self.schedule).to_le_bytes());
    }

    fn decrypt_one(&self, block: &mut [u8]) {
        let x = u32::from_le_bytes(block[..4].try_into().unwrap());
        block[..4].copy_from_slice(&katan::decrypt_block_with(x, &self.schedule).to_le_bytes());
    }

    fn encrypt_blocks(&self, data: &mut [u8]) {
        self.apply(data, katan::encrypt_batch, katan::encrypt_block_with);
    }

    fn decrypt_blocks(&self, data: &mut [u8]) {
        self.apply(data, katan::decrypt_batch, katan::decrypt_block_with);
    }
}

pub struct Present80;

struct KeyedPresent80 {
    round_keys: [u64; present::ROUND_KEYS],
}

impl BlockCipher for Present80 {
    fn descriptor(&self) -> CipherDescriptor {
        CipherDescriptor {
            name: "PRESENT",
            block_bits: 64,
            key_bits: 80,
        }
    }

    fn keyed(&self, key: &[u8]) -> Result<Box<dyn KeyedCipher>, RegistryError> {
        check_key_len(key, 10)?;
        Ok(Box::new(KeyedPresent80 {
            round_keys: present::present_key_schedule(key.try_into().expect("length checked")),
        }))
    }
}

impl KeyedCipher for KeyedPresent80 {
    fn block_bytes(&self) -> usize {
        8
    }

    fn encrypt_one(&self, block: &mut [u8]) {
        let x = u64::from_be_bytes(block[..8].try_into().unwrap());
        block[..8].copy_from_slice(&present::encrypt_with(x, &self.round_keys).to_be_bytes());
    }

    fn decrypt_one(&self, block: &mut [u8]) {
        let x = u64::from_be_bytes(block[..8].try_into().unwrap());
        block[..8].copy_from_slice(&present::decrypt_with(x, &self.round_keys).to_be_bytes());
    }
}

/// AES-128 from the RustCrypto `aes` crate.
pub struct Aes128;

struct KeyedAes128(aes::Aes128);

impl BlockCipher for Aes128 {
    fn descriptor(&self) -> CipherDescriptor {
        CipherDescriptor {
            name: "AES-128",
            block_bits: 128,
            key_bits: 128,
        }
    }

    fn keyed(&self, key: &[u8]) -> Result<Box<dyn KeyedCipher>, RegistryError> {
        check_key_len(key, 16)?;
        Ok(Box::new(KeyedAes128(aes::Aes128::new(GenericArray::from_slice(key)))))
    }
}

impl KeyedCipher for KeyedAes128 {
    fn block_bytes(&self) -> usize {
        16
    }

    fn encrypt_one(&self, block: &mut [u8]) {
        self.0.encrypt_block(GenericArray::from_mut_slice(&mut block[..16]));
    }

    fn decrypt_one(&self, block: &mut [u8]) {
        self.0.decrypt_block(GenericArray::from_mut_slice(&mut block[..16]));
    }
}

const SELF_TEST_TRIALS: usize = 16;

fn self_test(cipher: &dyn BlockCipher) -> bool {
    let d = cipher.descriptor();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b61_7461_6e);
    (0..SELF_TEST_TRIALS).all(|_| {
        let key: Vec<u8> = (0..d.key_bytes()).map(|_| rng.random()).collect();
        let Ok(keyed) = cipher.keyed(&key) else {
            return false;
        };
        let original: Vec<u8> = (0..d.block_bytes()).map(|_| rng.random()).collect();
        let mut block = original.clone();
        keyed.encrypt_one(&mut block);
        keyed.decrypt_one(&mut block);
        block == original
    })
}

#[derive(Default)]
pub struct Registry {
    ciphers: Vec<Box<dyn BlockCipher>>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_defaults() -> Self {
        let mut reg = Registry::new();
        for c in [
            Box::new(Katan32) as Box<dyn BlockCipher>,
            Box::new(Present80),
            Box::new(Aes128),
        ] {
            reg.register(c).expect("built-in cipher failed registration");
        }
        reg
    }

    /// Adds a cipher after checking its shape and running a round-trip
    /// self-test.
    pub fn register(&mut self, cipher: Box<dyn BlockCipher>) -> Result<(), RegistryError> {
        let d = cipher.descriptor();
        if ![32, 64, 128].contains(&d.block_bits) || ![80, 128].contains(&d.key_bits) {
            return Err(RegistryError::UnsupportedShape {
                name: d.name.to_string(),
                block_bits: d.block_bits,
                key_bits: d.key_bits,
            });
        }
        if self.get(d.name).is_some() {
            return Err(RegistryError::DuplicateName(d.name.to_string()));
        }
        if !self_test(cipher.as_ref()) {
            return Err(RegistryError::SelfTestFailed(d.name.to_string()));
        }
        self.ciphers.push(cipher);
        Ok(())
    }

    /// Case-insensitive lookup.
    pub fn get(&self, name: &str) -> Option<&dyn BlockCipher> {
        self.ciphers
            .iter()
            .find(|c| c.descriptor().name.eq_ignore_ascii_case(name))
            .map(|c| c.as_ref())
    }

    pub fn lookup(&self, name: &str) -> Result<&dyn BlockCipher, RegistryError> {
        self.get(name)
            .ok_or_else(|| RegistryError::UnknownCipher(name.to_string()))
    }

    pub fn list(&self) -> Vec<CipherDescriptor> {
        self.ciphers.iter().map(|c| c.descriptor()).collect()
    }
}

pub fn default_registry() -> &'static Registry {
    static REGISTRY: OnceLock<Registry> = OnceLock::new();
    REGISTRY.get_or_init(Registry::with_defaults)
}

pub fn list_ciphers() -> Vec<CipherDescriptor> {
    default_registry().list()
}
