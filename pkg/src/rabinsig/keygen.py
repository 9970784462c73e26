"""Key generation for the signature schemes, plus the text key-file format.

Key kinds:
  general  -- any pair of distinct odd primes; carries a four-element
              padding set covering all Jacobi classes
  blum     -- both primes congruent to 3 mod 4
  rw       -- one prime congruent to 3 and the other to 7 mod 8
"""

import math
import random
from dataclasses import dataclass

from .errors import KeyFormatError
from .hashing import IDENTITY, RedundancySpec
from .numtheory import Idempotents, Modulus, crt_idempotents, is_probable_prime, jacobi

_SYSTEM_RNG = random.SystemRandom()

KINDS = ("general", "blum", "rw")

_CONSTRAINTS = {
    "none": (1, 2),
    "3mod4": (3, 4),
    "3mod8": (3, 8),
    "7mod8": (7, 8),
}

# Padding multipliers a, b only matter through their residue classes, so
# small values are enough and keep generation cheap.
_MULTIPLIER_BOUND = 1 << 16


def gen_prime(bits: int, constraint: str = "none", rng=None) -> int:
    """A random probable prime of exactly `bits` bits meeting the congruence constraint."""
    if bits < 8:
        raise ValueError("need at least 8 bits per prime factor")
    residue, modulus = _CONSTRAINTS[constraint]
    rng = rng or _SYSTEM_RNG
    while True:
        cand = (1 << (bits - 1)) | rng.getrandbits(bits - 1)
        cand += (residue - cand) % modulus
        if cand.bit_length() != bits:
            continue
        if is_probable_prime(cand, rng):
            return cand


@dataclass(frozen=True)
class PaddingSet:
    """Four public multipliers covering the four Jacobi classes.

    `classes` lists ((u/p), (u/q)) per element and is only populated on the
    private side; the published form is the bare elements in a randomised
    order.
    """

    elements: tuple[int, int, int, int]
    classes: tuple[tuple[int, int], ...] | None = None


def padding_set_flaws(elements, p: int, q: int) -> list[str]:
    """Safety checks a padding set must pass before publication.

    Returns human-readable descriptions of every violated condition:
    elements must be units, must not be square roots of unity, must cover
    all four Jacobi classes, and no pairwise difference may share a factor
    with the modulus.
    """
    n = p * q
    flaws = []
    classes = set()
    for u in elements:
        if math.gcd(u, n) != 1:
            flaws.append(f"element {u} is not a unit")
            continue
        if u * u % n == 1:
            flaws.append(f"element {u} is a square root of unity")
        classes.add((jacobi(u, p), jacobi(u, q)))
    if len(classes) != 4:
        flaws.append("elements do not cover all four Jacobi classes")
    for i in range(4):
        for j in range(i + 1, 4):
            if math.gcd(elements[i] - elements[j], n) != 1:
                flaws.append(f"difference of elements {i} and {j} shares a factor with the modulus")
    return flaws


def _sample_with_jacobi(p: int, target: int, rng) -> int:
    while True:
        a = rng.randrange(2, _MULTIPLIER_BOUND)
        if jacobi(a, p) == target:
            return a


def compose_padding_set(a1, a2, b1, b2, rs, p, q, psi1, psi2):
    """Form the four products r**2 * (a*psi1 + b*psi2) with their class labels."""
    n = p * q
    elements, classes = [], []
    for (a, b), r in zip(((a1, b1), (a1, b2), (a2, b1), (a2, b2)), rs):
        u = r * r * (a * psi1 + b * psi2) % n
        elements.append(u)
        classes.append((jacobi(u, p), jacobi(u, q)))
    return tuple(elements), tuple(classes)


def build_padding_set(p: int, q: int, psi1: int, psi2: int, rng=None) -> PaddingSet:
    """Build a safe padding set by rejection sampling.

    Draws class representatives a1, a2 (residue / non-residue mod p) and
    b1, b2 (mod q), then four distinct random units r_i; the r_i are
    re-drawn until every safety check passes, with fresh multipliers after
    64 failed rounds.
    """
    rng = rng or _SYSTEM_RNG
    n = p * q
    for _ in range(64):
        a1 = _sample_with_jacobi(p, 1, rng)
        a2 = _sample_with_jacobi(p, -1, rng)
        b1 = _sample_with_jacobi(q, 1, rng)
        b2 = _sample_with_jacobi(q, -1, rng)
        for _ in range(64):
            rs: list[int] = []
            while len(rs) < 4:
                r = rng.randrange(1, n)
                if math.gcd(r, n) == 1 and r not in rs:
                    rs.append(r)
            elements, classes = compose_padding_set(a1, a2, b1, b2, rs, p, q, psi1, psi2)
            if not padding_set_flaws(elements, p, q):
                order = list(range(4))
                rng.shuffle(order)  # publication order must not hint at the classes
                return PaddingSet(
                    tuple(elements[i] for i in order),
                    tuple(classes[i] for i in order),
                )
    raise RuntimeError("could not build a safe padding set for this modulus")


@dataclass(frozen=True)
class PublicKey:
    kind: str
    n: int
    redundancy: RedundancySpec
    padding: PaddingSet | None = None


@dataclass(frozen=True)
class KeyPair:
    kind: str
    p: int
    q: int
    n: int
    psi1: int
    psi2: int
    redundancy: RedundancySpec
    padding: PaddingSet | None = None

    @property
    def idem(self) -> Idempotents:
        return Idempotents(self.psi1, self.psi2)

    @property
    def is_blum(self) -> bool:
        return self.p % 4 == 3 and self.q % 4 == 3

    @property
    def is_rw(self) -> bool:
        return {self.p % 8, self.q % 8} == {3, 7}

    def public(self) -> PublicKey:
        padding = None
        if self.padding is not None:
            padding = PaddingSet(self.padding.elements)  # classes stay private
        return PublicKey(self.kind, self.n, self.redundancy, padding)

    @classmethod
    def from_primes(cls, kind, p, q, redundancy=IDENTITY, padding=None, rng=None) -> "KeyPair":
        if kind not in KINDS:
            raise ValueError(f"unknown key kind {kind!r}")
        mod = Modulus.create(p, q, rng)
        if kind == "blum" and (p % 4 != 3 or q % 4 != 3):
            raise ValueError("blum keys need both primes congruent to 3 mod 4")
        if kind == "rw" and {p % 8, q % 8} != {3, 7}:
            raise ValueError("rw keys need primes congruent to 3 and 7 mod 8")
        idem = crt_idempotents(p, q)
        return cls(kind, p, q, mod.n, idem.psi1, idem.psi2, redundancy, padding)


def gen_keypair(kind: str, bits: int, redundancy=IDENTITY, rng=None) -> KeyPair:
    """Generate a key pair of the requested kind with `bits`-bit prime factors."""
    rng = rng or _SYSTEM_RNG
    if kind == "general":
        p = gen_prime(bits, "none", rng)
        q = gen_prime(bits, "none", rng)
        while q == p:
            q = gen_prime(bits, "none", rng)
    elif kind == "blum":
        p = gen_prime(bits, "3mod4", rng)
        q = gen_prime(bits, "3mod4", rng)
        while q == p:
            q = gen_prime(bits, "3mod4", rng)
    elif kind == "rw":
        p = gen_prime(bits, "3mod8", rng)
        q = gen_prime(bits, "7mod8", rng)
    else:
        raise ValueError(f"unknown key kind {kind!r}")
    padding = None
    if kind == "general":
        idem = crt_idempotents(p, q)
        padding = build_padding_set(p, q, idem.psi1, idem.psi2, rng)
    return KeyPair.from_primes(kind, p, q, redundancy, padding, rng)


# ---------------------------------------------------------------------------
# Key file format: line-oriented text, "name = decimal-value" per line.

KEY_MAGIC = "rabin-key v1"


def dump_public(pub: PublicKey | KeyPair) -> str:
    lines = [KEY_MAGIC, f"kind = {pub.kind}", f"hash = {pub.redundancy.token}", f"N = {pub.n}"]
    if pub.padding is not None:
        for i, u in enumerate(pub.padding.elements, start=1):
            lines.append(f"u{i} = {u}")
    return "\n".join(lines) + "\n"


def dump_private(key: KeyPair) -> str:
    lines = dump_public(key).splitlines()
    lines += [f"p = {key.p}", f"q = {key.q}", f"psi1 = {key.psi1}", f"psi2 = {key.psi2}"]
    return "\n".join(lines) + "\n"


def _parse_fields(lines: list[str], path_hint: str) -> dict[str, str]:
    fields: dict[str, str] = {}
    for line in lines:
        if not line.strip():
            continue
        name, sep, value = line.partition("=")
        if not sep:
            raise KeyFormatError(f"malformed line {line!r} in {path_hint}")
        name, value = name.strip(), value.strip()
        if name in fields:
            raise KeyFormatError(f"duplicate field {name!r} in {path_hint}")
        fields[name] = value
    return fields


def _int_field(fields: dict[str, str], name: str, path_hint: str) -> int:
    try:
        raw = fields.pop(name)
    except KeyError:
        raise KeyFormatError(f"missing field {name!r} in {path_hint}") from None
    try:
        return int(raw)
    except ValueError:
        raise KeyFormatError(f"field {name!r} is not a decimal integer in {path_hint}") from None


def parse_key(text: str, path_hint: str = "key file") -> KeyPair | PublicKey:
    """Parse a public or private key file; private files carry p, q, psi1, psi2."""
    lines = text.splitlines()
    if not lines or lines[0] != KEY_MAGIC:
        raise KeyFormatError(f"{path_hint} does not start with {KEY_MAGIC!r}")
    fields = _parse_fields(lines[1:], path_hint)

    kind = fields.pop("kind", None)
    if kind not in KINDS:
        raise KeyFormatError(f"unknown or missing kind in {path_hint}")
    try:
        redundancy = RedundancySpec.from_token(fields.pop("hash", ""))
    except ValueError as exc:
        raise KeyFormatError(f"bad hash field in {path_hint}: {exc}") from None
    n = _int_field(fields, "N", path_hint)

    padding = None
    if kind == "general":
        elements = tuple(_int_field(fields, f"u{i}", path_hint) for i in range(1, 5))
        padding = PaddingSet(elements)

    if "p" not in fields:
        if fields:
            raise KeyFormatError(f"unexpected fields {sorted(fields)} in {path_hint}")
        return PublicKey(kind, n, redundancy, padding)

    p = _int_field(fields, "p", path_hint)
    q = _int_field(fields, "q", path_hint)
    psi1 = _int_field(fields, "psi1", path_hint)
    psi2 = _int_field(fields, "psi2", path_hint)
    if fields:
        raise KeyFormatError(f"unexpected fields {sorted(fields)} in {path_hint}")
    if p * q != n:
        raise KeyFormatError(f"N does not equal p*q in {path_hint}")
    if padding is not None:
        padding = PaddingSet(
            padding.elements,
            tuple((jacobi(u, p), jacobi(u, q)) for u in padding.elements),
        )
    try:
        key = KeyPair.from_primes(kind, p, q, redundancy, padding)
    except ValueError as exc:
        raise KeyFormatError(f"invalid key material in {path_hint}: {exc}") from None
    if (key.psi1, key.psi2) != (psi1, psi2):
        raise KeyFormatError(f"idempotents do not match the prime factors in {path_hint}")
    return key
