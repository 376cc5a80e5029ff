/*
 * KATAN32 bitsliced reference, 64 blocks per call.
 *
 * Layout follows the original C reference: plaintext words 0..18 load L2,
 * words 19..31 load L1, the key is 80 broadcast words, the subkey stream is
 * k[i] = k[i-80] ^ k[i-61] ^ k[i-50] ^ k[i-13].
 *
 * Test driver: reads lines "KEYHEX BLOCKHEX" (20 + 8 hex digits) from stdin
 * and prints "ENC DEC" per line, where ENC = E_k(block) and DEC = D_k(block).
 * Key hex: first digit's most significant bit is k_0.
 * Block bit b (b = 0 least significant) sits in word b.
 */
#include <stdio.h>
#include <stdint.h>
#include <string.h>

typedef uint64_t u64;
#define ONES 0xFFFFFFFFFFFFFFFFULL

static const unsigned char IR[254] = {
  1, 1, 1, 1, 1, 1, 1, 0, 0, 0,
  1, 1, 0, 1, 0, 1, 0, 1, 0, 1,
  1, 1, 1, 0, 1, 1, 0, 0, 1, 1,
  0, 0, 1, 0, 1, 0, 0, 1, 0, 0,
  0, 1, 0, 0, 0, 1, 1, 0, 0, 0,
  1, 1, 1, 1, 0, 0, 0, 0, 1, 0,
  0, 0, 0, 1, 0, 1, 0, 0, 0, 0,
  0, 1, 1, 1, 1, 1, 0, 0, 1, 1,
  1, 1, 1, 1, 0, 1, 0, 1, 0, 0,
  0, 1, 0, 1, 0, 1, 0, 0, 1, 1,
  0, 0, 0, 0, 1, 1, 0, 0, 1, 1,
  1, 0, 1, 1, 1, 1, 1, 0, 1, 1,
  1, 0, 1, 0, 0, 1, 0, 1, 0, 1,
  1, 0, 1, 0, 0, 1, 1, 1, 0, 0,
  1, 1, 0, 1, 1, 0, 0, 0, 1, 0,
  1, 1, 1, 0, 1, 1, 0, 1, 1, 1,
  1, 0, 0, 1, 0, 1, 1, 0, 1, 1,
  0, 1, 0, 1, 1, 1, 0, 0, 1, 0,
  0, 1, 0, 0, 1, 1, 0, 1, 0, 0,
  0, 1, 1, 1, 0, 0, 0, 1, 0, 0,
  1, 1, 1, 1, 0, 1, 0, 0, 0, 0,
  1, 1, 1, 0, 1, 0, 1, 1, 0, 0,
  0, 0, 0, 1, 0, 1, 1, 0, 0, 1,
  0, 0, 0, 0, 0, 0, 1, 1, 0, 1,
  1, 1, 0, 0, 0, 0, 0, 0, 0, 1,
  0, 0, 1, 0,
};

static void katan32_encrypt(const u64 plain[32], u64 cipher[32], const u64 key[80], int rounds)
{
    u64 L1[13], L2[19], k[2 * 254], fa, fb, ir;
    int i, j;

    for (i = 0; i < 19; ++i) L2[i] = plain[i];
    for (i = 0; i < 13; ++i) L1[i] = plain[i + 19];
    for (i = 0; i < 80; ++i) k[i] = key[i];
    for (i = 80; i < 2 * rounds; ++i) k[i] = k[i - 80] ^ k[i - 61] ^ k[i - 50] ^ k[i - 13];

    for (i = 0; i < rounds; ++i) {
        ir = IR[i] ? ONES : 0;
        fa = L1[12] ^ L1[7] ^ (L1[8] & L1[5]) ^ (L1[3] & ir) ^ k[2 * i];
        fb = L2[18] ^ L2[7] ^ (L2[12] & L2[10]) ^ (L2[8] & L2[3]) ^ k[2 * i + 1];
        for (j = 12; j > 0; --j) L1[j] = L1[j - 1];
        for (j = 18; j > 0; --j) L2[j] = L2[j - 1];
        L1[0] = fb;
        L2[0] = fa;
    }
    for (i = 0; i < 19; ++i) cipher[i] = L2[i];
    for (i = 0; i < 13; ++i) cipher[i + 19] = L1[i];
}

static void katan32_decrypt(const u64 cipher[32], u64 plain[32], const u64 key[80], int rounds)
{
    u64 L1[13], L2[19], k[2 * 254], fa, fb, ir;
    int i, j;

    for (i = 0; i < 19; ++i) L2[i] = cipher[i];
    for (i = 0; i < 13; ++i) L1[i] = cipher[i + 19];
    for (i = 0; i < 80; ++i) k[i] = key[i];
    for (i = 80; i < 2 * rounds; ++i) k[i] = k[i - 80] ^ k[i - 61] ^ k[i - 50] ^ k[i - 13];

    for (i = rounds - 1; i >= 0; --i) {
        ir = IR[i] ? ONES : 0;
        fb = L1[0];
        fa = L2[0];
        for (j = 0; j < 12; ++j) L1[j] = L1[j + 1];
        for (j = 0; j < 18; ++j) L2[j] = L2[j + 1];
        /* L1[12] and L2[18] now hold stale values; recover the shifted-out bits */
        L1[12] = fa ^ L1[7] ^ (L1[8] & L1[5]) ^ (L1[3] & ir) ^ k[2 * i];
        L2[18] = fb ^ L2[7] ^ (L2[12] & L2[10]) ^ (L2[8] & L2[3]) ^ k[2 * i + 1];
    }
    for (i = 0; i < 19; ++i) plain[i] = L2[i];
    for (i = 0; i < 13; ++i) plain[i + 19] = L1[i];
}

static int hexval(char c)
{
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

static uint32_t lane0(const u64 w[32])
{
    uint32_t out = 0;
    int b;
    for (b = 0; b < 32; ++b) out |= (uint32_t)(w[b] & 1) << b;
    return out;
}

int main(void)
{
    char keyhex[64];
    unsigned int block;
    u64 key[80], in[32], enc[32], dec[32];
    int i, d;

    while (scanf("%63s %x", keyhex, &block) == 2) {
        if (strlen(keyhex) != 20) return 2;
        for (i = 0; i < 80; ++i) {
            d = hexval(keyhex[i / 4]);
            if (d < 0) return 2;
            key[i] = ((d >> (3 - i % 4)) & 1) ? ONES : 0;
        }
        for (i = 0; i < 32; ++i) in[i] = ((block >> i) & 1) ? ONES : 0;
        katan32_encrypt(in, enc, key, 254);
        katan32_decrypt(in, dec, key, 254);
        printf("%08x %08x\n", lane0(enc), lane0(dec));
    }
    return 0;
}
