"""Command-line front end.

Subcommands: keygen, sign, verify, blind-demo, attack, selfcheck.
Exit codes: 0 success / valid, 1 invalid or failed operation, 2 bad
invocation, 3 unreadable or malformed key/signature file.
"""

import argparse
import math
import os
import random
import sys
from pathlib import Path

from . import oracle, schemes
from .blind import blind_sign, disguise, naive_blind_sign, run_blind_session
from .errors import KeyFormatError, NonResidueError, RabinError, SignatureFormatError
from .forgery import apply_scaling, forge_classic, rsa_blinding_attack
from .hashing import IDENTITY, QUADRATIC, DigestRef, RedundancySpec, apply_redundancy, digest_int
from .keygen import KeyPair, dump_private, dump_public, gen_keypair, parse_key
from .numtheory import jacobi, mod_inv, sqrt_mod_pq


def _rng(seed):
    return random.Random(seed) if seed is not None else random.SystemRandom()


def _load_key(path):
    return parse_key(Path(path).read_text(), path_hint=str(path))


def _load_signature(path):
    return schemes.parse_signature(Path(path).read_text(), path_hint=str(path))


def _ops_line(report: schemes.VerifyReport) -> str:
    squares, products = report.op_counts
    return "ops: {} square{}, {} product{}".format(
        squares, "" if squares == 1 else "s", products, "" if products == 1 else "s"
    )


def _print_report(report: schemes.VerifyReport):
    if report.valid:
        print("VALID")
    else:
        print(f"INVALID ({report.failed_check})")
    print(_ops_line(report))


# ---------------------------------------------------------------------------
# subcommands


def cmd_keygen(args):
    try:
        redundancy = RedundancySpec.from_token(args.hash)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    key = gen_keypair(args.kind, args.bits, redundancy, _rng(args.seed))
    priv_path = Path(args.out)
    pub_path = Path(str(args.out) + ".pub")
    priv_path.write_text(dump_private(key))
    os.chmod(priv_path, 0o600)
    pub_path.write_text(dump_public(key.public()))
    print(f"wrote private key to {priv_path}")
    print(f"wrote public key to {pub_path}")
    return 0


def _message_from_args(args, key):
    if args.message is not None:
        if args.message < 0:
            print("error: messages are non-negative integers", file=sys.stderr)
            return None
        if key.redundancy.tag != "digest" and args.message >= key.n:
            print("error: identity/quadratic redundancy needs m < N; use a digest key for long messages",
                  file=sys.stderr)
            return None
        return args.message
    data = Path(args.message_file).read_bytes()
    if key.redundancy.tag != "digest":
        print("error: byte-stream messages need a key with digest redundancy", file=sys.stderr)
        return None
    return data


def cmd_sign(args):
    key = _load_key(args.key)
    if not isinstance(key, KeyPair):
        print("error: signing needs a private key file", file=sys.stderr)
        return 2
    if args.scheme == "general" and key.padding is None:
        print("error: the general scheme needs a key with a padding set", file=sys.stderr)
        return 2
    if args.scheme in ("variant1", "variant2") and not key.is_blum:
        print("error: this scheme needs a key with both primes 3 mod 4", file=sys.stderr)
        return 2
    if args.scheme == "rw" and not key.is_rw:
        print("error: the rw scheme needs primes congruent to 3 and 7 mod 8", file=sys.stderr)
        return 2
    m = _message_from_args(args, key)
    if m is None:
        return 2
    sig = schemes.sign(key, m, args.scheme, rng=_rng(args.seed))
    Path(args.out).write_text(schemes.dump_signature(sig, key))
    print(f"wrote {args.scheme} signature to {args.out}")
    return 0


def cmd_verify(args):
    pub = _load_key(args.pub)
    sig = _load_signature(args.sig)
    if args.message_file is not None:
        if pub.redundancy.tag != "digest":
            print("error: --message-file needs a key with digest redundancy", file=sys.stderr)
            return 2
        expected = digest_int(pub.redundancy, Path(args.message_file).read_bytes())
        if not isinstance(sig.m, DigestRef) or sig.m.digest_int != expected:
            print("INVALID (message digest mismatch)")
            return 1
    report = schemes.verify(pub, sig)
    _print_report(report)
    return 0 if report.valid else 1


def cmd_blind_demo(args):
    key = _load_key(args.key)
    if not isinstance(key, KeyPair):
        print("error: the demo needs a private key file", file=sys.stderr)
        return 2
    rng = _rng(args.seed)
    if args.naive:
        return _naive_blind_demo(key, args.message, rng)

    session = run_blind_session(key, args.message, rng)
    report = schemes.verify(key.public(), session.published)
    print("rabin-blind-demo v1")
    print(f"N = {key.n}")
    print(f"hash = {key.redundancy.token}")
    print(f"message = {session.m}")
    print(f"blinding = {session.r}")
    print(f"disguised = {session.disguised}")
    print(f"blind-F = {session.blind_sig.F}")
    print(f"blind-R3 = {session.blind_sig.R3}")
    print(f"signed-F = {session.published.F}")
    print(f"signed-R3 = {session.published.R3}")
    print(f"verification = {'VALID' if report.valid else 'INVALID'}")
    print(_ops_line(report))
    return 0 if report.valid else 1


def _naive_blind_demo(key, m, rng):
    pub = key.public()
    r = 1
    while math.gcd(r, key.n) != 1 or r == 1:
        r = rng.randrange(2, key.n)
    disguised = disguise(m, r, pub)
    print("rabin-blind-demo v1 (naive)")
    print(f"N = {key.n}")
    print(f"message = {m}")
    print(f"blinding = {r}")
    print(f"disguised = {disguised}")
    try:
        root = naive_blind_sign(key, disguised, rng)
    except NonResidueError:
        print("signer-refused = 1")
        print("note: the naive signer only handles quadratic residues; pick a square message")
        return 1
    unblinded = root * mod_inv(r, key.n) % key.n
    h = apply_redundancy(key.redundancy, m, key.n)
    ok = unblinded * unblinded % key.n == h
    print(f"returned-root = {root}")
    print(f"unblinded-root = {unblinded}")
    print(f"verification = {'VALID' if ok else 'INVALID'}")
    print("warning: the unblinded value is a bare square root of the message;")
    print("warning: such a signer is an oracle for decryption and factoring")
    return 0 if ok else 1


def cmd_attack(args):
    if args.kind == "classic-forge":
        return _attack_classic(args)
    if args.kind == "scale":
        return _attack_scale(args)
    return _attack_blinding(args)


def _require(args, names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        print(f"error: attack --kind {args.kind} needs {', '.join(missing)}", file=sys.stderr)
        return False
    return True


def _attack_classic(args):
    if not _require(args, ("pub", "sig", "target")):
        return 2
    pub = _load_key(args.pub)
    sig = _load_signature(args.sig)
    if not isinstance(sig, schemes.ClassicSignature):
        print("error: the substitution forgery targets classic signatures", file=sys.stderr)
        return 2
    forged = forge_classic(sig, args.target, pub.n)
    report = schemes.classic_verify(pub, forged)
    print(f"forged: message = {forged.m}, U = {forged.U}, S = {forged.S}")
    _print_report(report)
    if args.out:
        Path(args.out).write_text(schemes.dump_signature(forged, pub))
        print(f"wrote forged signature to {args.out}")
    return 0 if report.valid else 1


def _attack_scale(args):
    if not _require(args, ("pub", "sig", "factor")):
        return 2
    pub = _load_key(args.pub)
    sig = _load_signature(args.sig)
    forged = apply_scaling(sig, args.factor, pub.n)
    report = schemes.verify(pub, forged)
    print(f"scaled {sig.scheme} signature by {args.factor}: message = {forged.m}")
    _print_report(report)
    if args.out:
        Path(args.out).write_text(schemes.dump_signature(forged, pub))
        print(f"wrote scaled signature to {args.out}")
    return 0 if report.valid else 1


def _attack_blinding(args):
    if not _require(args, ("key", "ciphertext")):
        return 2
    key = _load_key(args.key)
    if not isinstance(key, KeyPair):
        print("error: the blinding attack drives a local signing oracle; pass a private key", file=sys.stderr)
        return 2
    rng = _rng(args.seed)
    if args.hardened:
        oracle_fn = lambda d: blind_sign(key, d, rng).F
    else:
        oracle_fn = lambda d: naive_blind_sign(key, d, rng)
    outcome = rsa_blinding_attack(oracle_fn, args.ciphertext, key.n, rng, trials=args.trials)
    print(f"oracle = {'hardened' if args.hardened else 'naive'}")
    print(f"trials = {outcome.trials}")
    print(f"outcome = {outcome.kind}")
    if outcome.kind == "decrypted":
        print(f"root = {outcome.value}")
    elif outcome.kind == "factored":
        print(f"factor = {outcome.value}")
    return 0 if outcome.kind != "failed" else 1


# ---------------------------------------------------------------------------
# selfcheck

_NUM_RINGS = ((3, 5), (3, 7), (7, 11))
_SCHEME_CHECKS = (
    ("classic", (7, 11)),
    ("classic", (13, 17)),
    ("general", (7, 11)),
    ("general", (13, 17)),
    ("variant1", (7, 11)),
    ("variant1", (11, 19)),
    ("variant2", (7, 11)),
    ("variant2", (11, 19)),
    ("rw", (7, 11)),
    ("rw", (19, 23)),
)


def _numtheory_failures(ring: oracle.SmallRing) -> list[str]:
    failures = []
    residues = oracle.qr_set(ring)
    for a in oracle.units(ring):
        predicted = jacobi(a, ring.p) == 1 and jacobi(a, ring.q) == 1
        if predicted != (a in residues):
            failures.append(f"a={a}: residue classification disagrees with brute force")
        if predicted:
            mine = tuple(r.value for r in sqrt_mod_pq(a, ring.p, ring.q))
            if mine != oracle.all_roots(a, ring):
                failures.append(f"a={a}: root set disagrees with brute force")
    return failures


def cmd_selfcheck(args):
    rng = _rng(args.seed)
    failed = 0
    for p, q in _NUM_RINGS:
        ring = oracle.SmallRing(p, q)
        failures = _numtheory_failures(ring)
        _print_check(f"numtheory n={ring.n}", failures)
        failed += bool(failures)
    for scheme, (p, q) in _SCHEME_CHECKS:
        ring = oracle.SmallRing(p, q)
        for redundancy in (IDENTITY, QUADRATIC):
            report = oracle.check_scheme_exhaustive(scheme, ring, redundancy, rng)
            label = f"{scheme} n={ring.n} hash={redundancy.token}"
            _print_check(f"{label} ({report.signed} signed)", report.failures)
            failed += bool(report.failures)
    print("selfcheck:", "all checks passed" if not failed else f"{failed} check(s) FAILED")
    return 0 if not failed else 1


def _print_check(label, failures):
    if failures:
        print(f"FAIL {label}: {failures[0]} (+{len(failures) - 1} more)" if len(failures) > 1 else f"FAIL {label}: {failures[0]}")
    else:
        print(f"ok   {label}")


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rabinsig",
        description="Rabin-style signatures: keys, signing, verification, blind signing and attack demos.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate a key pair")
    p.add_argument("--kind", choices=("general", "blum", "rw"), required=True)
    p.add_argument("--bits", type=int, default=512, help="bits per prime factor")
    p.add_argument("--hash", default="identity", help="identity | quadratic | digest[:NAME]")
    p.add_argument("--out", required=True, help="private key path; public key gets a .pub suffix")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("sign", help="sign a message")
    p.add_argument("--key", required=True, help="private key file")
    p.add_argument("--scheme", choices=schemes.SCHEME_TAGS, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--message", type=int, help="message as a decimal integer")
    group.add_argument("--message-file", help="byte-stream message (digest redundancy only)")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_sign)

    p = sub.add_parser("verify", help="verify a signature file")
    p.add_argument("--pub", required=True, help="public (or private) key file")
    p.add_argument("--sig", required=True)
    p.add_argument("--message-file", help="cross-check the stored message digest")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("blind-demo", help="run a full blind-signing session")
    p.add_argument("--key", required=True, help="private key file (plays both roles)")
    p.add_argument("--message", type=int, required=True)
    p.add_argument("--naive", action="store_true", help="use the broken bare-root signer")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_blind_demo)

    p = sub.add_parser("attack", help="run a forgery or oracle attack")
    p.add_argument("--kind", choices=("classic-forge", "scale", "blinding"), required=True)
    p.add_argument("--pub", help="public key file (classic-forge, scale)")
    p.add_argument("--sig", help="signature file (classic-forge, scale)")
    p.add_argument("--target", type=int, help="message to forge (classic-forge)")
    p.add_argument("--factor", type=int, help="scaling factor (scale)")
    p.add_argument("--key", help="private key driving the signing oracle (blinding)")
    p.add_argument("--ciphertext", type=int, help="square of the unknown plaintext (blinding)")
    p.add_argument("--trials", type=int, default=40)
    p.add_argument("--hardened", action="store_true", help="attack the hardened blind signer")
    p.add_argument("--out", help="write the forged signature here")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("selfcheck", help="exhaustive checks on built-in small moduli")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_selfcheck)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except (KeyFormatError, SignatureFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except RabinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
