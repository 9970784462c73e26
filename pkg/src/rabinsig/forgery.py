"""Executable attacks against the signature schemes.

Two families:

* Scaling forgeries.  Under identity redundancy every scheme's verifier is
  (pseudo-)homogeneous: raising a free factor to fixed per-component powers
  maps valid signatures to valid signatures on a different message.  The
  per-scheme exponents live in TRANSFORMS.

* Oracle attacks.  The classic scheme admits outright substitution
  (choose the message, solve for the padding), and a naive blind signer
  that returns bare roots can be milked to extract square roots of chosen
  ciphertexts, which decrypts them or factors the modulus.
"""

import math
import random
from dataclasses import dataclass
from typing import Callable

from .blind import BlindSignature
from .numtheory import mod_inv
from .schemes import (
    ClassicSignature,
    GeneralSignature,
    RWSignature,
    Signature,
    Variant1Signature,
    Variant2Signature,
)

_SYSTEM_RNG = random.SystemRandom()


@dataclass(frozen=True)
class ForgeryTransform:
    """Scaling exponents: message power n0, per-component powers, verifier degrees.

    Scaling a valid tuple by (lam**n0, lam**n1, ...) multiplies the i-th
    verifier component by lam**t_i, so equalities with zero right-hand
    side survive for every unit lam.
    """

    message_power: int
    component_powers: tuple[int, ...]
    verifier_degrees: tuple[int, ...]


TRANSFORMS = {
    "classic": ForgeryTransform(2, (0, 1), (2,)),
    "general": ForgeryTransform(2, (0, 1), (2,)),
    "variant1": ForgeryTransform(4, (0, 2, 1), (2, 4)),
    "variant2": ForgeryTransform(2, (1, 0), (12,)),
    "rw": ForgeryTransform(2, (0, 0, 1), (2,)),
    "blind": ForgeryTransform(2, (1, 0), (12,)),
}

_COMPONENT_NAMES = {
    ClassicSignature: ("U", "S"),
    GeneralSignature: ("u", "S"),
    Variant1Signature: ("U", "S", "T"),
    Variant2Signature: ("F", "R3"),
    RWSignature: ("e", "f", "S"),
}


def apply_scaling(sig: Signature | BlindSignature, lam: int, n: int):
    """Scale every component of sig by the registered power of lam (mod n)."""
    if isinstance(sig, BlindSignature):
        tf = TRANSFORMS["blind"]
        disguised = sig.disguised * pow(lam, tf.message_power, n) % n
        f_val = sig.F * pow(lam, tf.component_powers[0], n) % n
        return BlindSignature(disguised, f_val, sig.R3)
    tf = TRANSFORMS[sig.scheme]
    if not isinstance(sig.m, int):
        raise TypeError("scaling forgeries only apply to integer messages")
    m = sig.m * pow(lam, tf.message_power, n) % n
    components = []
    for name, power in zip(_COMPONENT_NAMES[type(sig)], tf.component_powers):
        value = getattr(sig, name)
        if power:  # untouched components (e.g. multiplier flags) keep their sign
            value = value * pow(lam, power, n) % n
        components.append(value)
    return type(sig)(m, *components)


def forge_classic(sig: ClassicSignature, m_target: int, n: int) -> ClassicSignature:
    """Substitution forgery: keep S, solve the padding as S**2 / m_target."""
    padding = sig.S * sig.S % n * mod_inv(m_target, n) % n
    return ClassicSignature(m_target % n, padding, sig.S)


def forge_general_scaled(sig: GeneralSignature, r: int, n: int) -> GeneralSignature:
    """Scaled forgery [r**2 m, u, r S]; valid under identity redundancy."""
    return apply_scaling(sig, r, n)


def forge_variant1_scaled(sig: Variant1Signature, w: int, n: int) -> Variant1Signature:
    """Scaled forgery [w**4 m, U, w**2 S, w T]; valid under identity redundancy."""
    return apply_scaling(sig, w, n)


def forge_variant2_scaled(sig: Variant2Signature, lam: int, n: int) -> Variant2Signature:
    """Scaled forgery [lam**2 m, lam F, R3]; valid under identity redundancy."""
    return apply_scaling(sig, lam, n)


def forge_blind_scaled(bsig: BlindSignature, t: int, n: int) -> BlindSignature:
    """Scaled blind signature [t**2 d, t F, R3]; keeps the blind invariant."""
    return apply_scaling(bsig, t, n)


@dataclass(frozen=True)
class AttackOutcome:
    kind: str  # "decrypted" | "factored" | "failed"
    value: int | None = None
    trials: int = 0


def rsa_blinding_attack(
    oracle: Callable[[int], int],
    c: int,
    n: int,
    rng=None,
    trials: int = 1,
    known_root: int | None = None,
) -> AttackOutcome:
    """Milk a blind-signing oracle for square roots of the ciphertext c.

    Each trial blinds c with a fresh r, submits r**2 * c and divides the
    oracle's answer by r.  Against a signer that hands out bare uniformly
    random roots, every trial yields a root y of c: either y is the
    (negated) plaintext or gcd(y - x, n) splits the modulus.  Pass the
    plaintext root as known_root to classify a trial immediately;
    otherwise roots are combined across trials and two inequivalent ones
    factor n.  A hardened signer never releases a usable root, so every
    trial fails the y**2 == c check.
    """
    rng = rng or _SYSTEM_RNG
    c %= n
    first = None
    trial = 0
    for trial in range(1, trials + 1):
        r = _sample_blinder(n, rng)
        answer = oracle(r * r * c % n)
        y = answer * mod_inv(r, n) % n
        if y * y % n != c:
            continue
        if known_root is not None:
            x = known_root % n
            if y == x or y == n - x:
                return AttackOutcome("decrypted", y, trial)
            return AttackOutcome("factored", math.gcd((y - x) % n, n), trial)
        if first is None:
            first = y
        elif y != first and y != n - first:
            return AttackOutcome("factored", math.gcd((y - first) % n, n), trial)
    if first is not None:
        return AttackOutcome("decrypted", first, trial)
    return AttackOutcome("failed", None, trial)


def _sample_blinder(n: int, rng) -> int:
    while True:
        r = rng.randrange(1, n)
        if math.gcd(r, n) == 1:
            return r
