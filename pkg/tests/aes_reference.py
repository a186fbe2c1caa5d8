"""Independent AES for cross-checking the package's cipher calls.

Everything is derived from the field arithmetic up: the S-box comes
from GF(2^8) inversion plus the affine transform rather than a pasted
table, so agreement with the packaged AES is two implementations
meeting, not one table copied twice. Encrypt-only: CBC/CTR cross-checks
never need the inverse cipher.
"""

from __future__ import annotations


def _xtime(a: int) -> int:
    a <<= 1
    return (a ^ 0x11B) & 0xFF if a & 0x100 else a


def gf_mul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a = _xtime(a)
        b >>= 1
    return out


def _gf_inv(a: int) -> int:
    if a == 0:
        return 0
    # a^254 = a^-1 in GF(2^8); square-and-multiply keeps it honest
    result, power, exp = 1, a, 254
    while exp:
        if exp & 1:
            result = gf_mul(result, power)
        power = gf_mul(power, power)
        exp >>= 1
    return result


def _build_sbox() -> list[int]:
    box = []
    for value in range(256):
        c = _gf_inv(value)
        s = c
        for _ in range(4):
            c = ((c << 1) | (c >> 7)) & 0xFF
            s ^= c
        box.append(s ^ 0x63)
    return box


SBOX = _build_sbox()
RCON = [0x01]
while len(RCON) < 14:
    RCON.append(_xtime(RCON[-1]))


def _expand_key(key: bytes) -> list[list[int]]:
    nk = len(key) // 4
    nr = nk + 6
    words = [list(key[4 * i:4 * i + 4]) for i in range(nk)]
    for i in range(nk, 4 * (nr + 1)):
        temp = list(words[i - 1])
        if i % nk == 0:
            temp = temp[1:] + temp[:1]
            temp = [SBOX[b] for b in temp]
            temp[0] ^= RCON[i // nk - 1]
        elif nk > 6 and i % nk == 4:
            temp = [SBOX[b] for b in temp]
        words.append([w ^ t for w, t in zip(words[i - nk], temp)])
    return words


def aes_encrypt_block(key: bytes, block: bytes) -> bytes:
    assert len(key) in (16, 32) and len(block) == 16
    nr = len(key) // 4 + 6
    words = _expand_key(key)
    # state[r + 4c] per the column-major layout, which block order already is
    state = list(block)

    def add_round_key(rnd):
        for c in range(4):
            for r in range(4):
                state[r + 4 * c] ^= words[4 * rnd + c][r]

    def sub_shift():
        nonlocal state
        state = [SBOX[b] for b in state]
        out = state[:]
        for r in range(1, 4):
            for c in range(4):
                out[r + 4 * c] = state[r + 4 * ((c + r) % 4)]
        state = out

    def mix_columns():
        for c in range(4):
            col = state[4 * c:4 * c + 4]
            state[4 * c + 0] = gf_mul(col[0], 2) ^ gf_mul(col[1], 3) ^ col[2] ^ col[3]
            state[4 * c + 1] = col[0] ^ gf_mul(col[1], 2) ^ gf_mul(col[2], 3) ^ col[3]
            state[4 * c + 2] = col[0] ^ col[1] ^ gf_mul(col[2], 2) ^ gf_mul(col[3], 3)
            state[4 * c + 3] = gf_mul(col[0], 3) ^ col[1] ^ col[2] ^ gf_mul(col[3], 2)

    add_round_key(0)
    for rnd in range(1, nr):
        sub_shift()
        mix_columns()
        add_round_key(rnd)
    sub_shift()
    add_round_key(nr)
    return bytes(state)


def cbc_encrypt(key: bytes, iv: bytes, plaintext: bytes) -> bytes:
    pad = 16 - len(plaintext) % 16
    padded = plaintext + bytes([pad]) * pad
    out, prev = [], iv
    for i in range(0, len(padded), 16):
        block = bytes(a ^ b for a, b in zip(padded[i:i + 16], prev))
        prev = aes_encrypt_block(key, block)
        out.append(prev)
    return b"".join(out)


def ctr_stream(key: bytes, nonce: bytes, length: int, byte_offset: int = 0) -> bytes:
    out = []
    counter = int.from_bytes(nonce, "big") + byte_offset // 16
    skip = byte_offset % 16
    while len(out) < skip + length:
        out.extend(aes_encrypt_block(key, (counter % (1 << 128)).to_bytes(16, "big")))
        counter += 1
    return bytes(out[skip:skip + length])


def ctr_xor(key: bytes, nonce: bytes, data: bytes, byte_offset: int = 0) -> bytes:
    stream = ctr_stream(key, nonce, len(data), byte_offset)
    return bytes(a ^ b for a, b in zip(data, stream))
