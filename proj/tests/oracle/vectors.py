"""Independent reference values for the frozen test vectors.

Run with python3; prints C++-ready constants.
"""
import hashlib
import hmac
import struct

P = (1 << 61) - 1
U, T, TAG = 32, 16, 0xA55A


def from_seed(n):
    return hashlib.sha256(struct.pack(">Q", n)).digest()[:16]


def mac(key, msg):
    return hmac.new(key, msg, hashlib.sha256).digest()


def derive(key, idx):
    return mac(key, b"\x01" + struct.pack(">Q", idx) + b"\x00")[:16]


def prf(key, idx, retry=0, p=P):
    d = mac(key, b"\x02" + struct.pack(">Q", idx) + bytes([retry]))[:16]
    return int.from_bytes(d, "big") % p


def prf_nonzero(key, idx, p=P):
    for r in range(256):
        v = prf(key, idx, r, p)
        if v:
            return v
    raise ValueError


def encode(s):
    return s * (1 << T) + TAG


def valid(v):
    return (v & ((1 << T) - 1)) == TAG and (v >> T) < (1 << U)


def assign_bin(e, h):
    return int.from_bytes(hashlib.sha256(struct.pack(">Q", e)).digest(), "big") % h + 1


def sample_xs(n, seed):
    out, c = [], 0
    while len(out) < n:
        c += 1
        x = prf(seed, c)
        if valid(x) or x in out:
            continue
        out.append(x)
    return out


def random_poly(seed, deg):
    return [prf(seed, k) for k in range(deg)] + [prf_nonzero(seed, deg)]


def from_roots(roots):
    c = [1]
    for r in roots:
        nxt = [0] * (len(c) + 1)
        for i, a in enumerate(c):
            nxt[i + 1] = (nxt[i + 1] + a) % P
            nxt[i] = (nxt[i] - a * r) % P
        c = nxt
    return c


def ev(c, x):
    acc = 0
    for a in reversed(c):
        acc = (acc * x + a) % P
    return acc


def table(s, h, d, pad, xs):
    bins = [[] for _ in range(h)]
    for v in s:
        bins[assign_bin(encode(v), h) - 1].append(encode(v))
    for j in range(1, h + 1):
        k = derive(pad, j)
        c = 0
        while len(bins[j - 1]) < d:
            c += 1
            r = prf(k, c)
            if valid(r) or r in xs:
                continue
            bins[j - 1].append(r)
    return bins


def blinding(mk, h, n, nonzero):
    f = prf_nonzero if nonzero else prf
    return [[f(derive(mk, j), i) for i in range(1, n + 1)] for j in range(1, h + 1)]


if __name__ == "__main__":
    k0 = from_seed(0)
    print("from_seed(0)", k0.hex())
    print("derive(from_seed(0),1)", derive(k0, 1).hex())
    print("prf(from_seed(0),5)", prf(k0, 5))
    print("prf(from_seed(0),5) mod 101", prf(k0, 5, p=101))
    print("encode(7)", encode(7), "bin h=88", assign_bin(encode(7), 88))
    print("bins h=88 of 0..9", [assign_bin(encode(s), 88) for s in range(10)])
    print("xs(5, from_seed(0))", sample_xs(5, k0))
    print("random_poly(from_seed(3),3)", random_poly(from_seed(3), 3))

    # Improved-scheme outsourcing of {1, 2, 3} with h=2, d=3.
    h, d = 2, 3
    n = 2 * d + 1
    xs = sample_xs(n, from_seed(12))
    bins = table([1, 2, 3], h, d, from_seed(11), xs)
    z = blinding(from_seed(10), h, n, True)
    o_mul = [[ev(from_roots(bins[j]), xs[i]) * pow(z[j][i], P - 2, P) % P for i in range(n)] for j in range(h)]
    za = blinding(from_seed(10), h, n, False)
    o_add = [[(ev(from_roots(bins[j]), xs[i]) + za[j][i]) % P for i in range(n)] for j in range(h)]
    print("o_mul row0", o_mul[0])
    print("o_mul row1", o_mul[1])
    print("o_add row0", o_add[0])
