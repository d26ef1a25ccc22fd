#!/usr/bin/env python3
"""Search Type A pairing parameters: q = h*r - 1 prime, q = 3 mod 4, r prime.

The curve is y^2 = x^3 + x over F_q; #E(F_q) = q + 1 = h*r.
Prints hex constants for src/abe/type_a_params.cpp.
"""
import hashlib
import sys

import gmpy2


def stream(label):
    counter = 0
    while True:
        block = hashlib.sha256(f"{label}/{counter}".encode()).digest()
        counter += 1
        yield from block


def random_bits(gen, bits):
    nbytes = (bits + 7) // 8
    v = int.from_bytes(bytes(next(gen) for _ in range(nbytes)), "big")
    v &= (1 << bits) - 1
    v |= 1 << (bits - 1)
    return v


def search(rbits, qbits):
    gen = stream(f"hab-type-a-{rbits}-{qbits}")
    while True:
        r = gmpy2.next_prime(random_bits(gen, rbits))
        if r.bit_length() != rbits:
            continue
        for _ in range(20000):
            h = random_bits(gen, qbits - rbits) & ~3
            q = h * r - 1
            if q.bit_length() != qbits or q % 4 != 3:
                continue
            if gmpy2.is_prime(q, 50):
                return int(q), int(r), int(h)


LEVELS = {80: (160, 512), 112: (224, 1024), 128: (256, 1536)}

if __name__ == "__main__":
    for level, (rbits, qbits) in LEVELS.items():
        q, r, h = search(rbits, qbits)
        assert (q + 1) == h * r and q % 4 == 3
        assert ((q + 1) // r) % r != 0
        print(f"level {level}")
        print(f"  q = {q:x}")
        print(f"  r = {r:x}")
        print(f"  h = {h:x}")
        sys.stdout.flush()
