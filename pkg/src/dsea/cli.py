"""Command-line front end.

Exit status: 0 on success, 1 when an attack does not produce a key, 2 on
argument or I/O errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bruteforce, chaos, fileio, keyrecovery, maskattack
from .chaos import PrecisionMode, Scheme
from .cipher import decrypt, encrypt
from .errors import DSEAError, IterationCapExceededError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _fmt(path, fmt):
    if fmt == "auto":
        return "pgm" if str(path).lower().endswith(".pgm") else "raw"
    return fmt


def _read(path, fmt="auto", width=None):
    if _fmt(path, fmt) == "pgm":
        return fileio.read_pgm(path)
    return fileio.read_raw(path, width)


def _write(path, data, fmt="auto"):
    if _fmt(path, fmt) == "pgm":
        fileio.write_pgm(path, data)
    else:
        fileio.write_raw(path, data)


def _range(text: str, lo: int, hi: int) -> range:
    try:
        if ":" in text:
            a, b = (int(v) for v in text.split(":", 1))
        else:
            a = b = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}, expected N or LO:HI") from None
    if a > b or a < lo or b > hi:
        raise argparse.ArgumentTypeError(f"range {text!r} outside [{lo}, {hi}]")
    return range(a, b + 1)


def _key_and_mode(args):
    kf = fileio.load_key(args.key)
    mode = args.mode or kf.mode or PrecisionMode.FIXED8_TRUNC
    return kf.key, PrecisionMode(mode)


def cmd_crypt(args, out, err):
    key, mode = _key_and_mode(args)
    data = _read(args.inp, args.format, args.width)
    fn = encrypt if args.command == "encrypt" else decrypt
    result = fn(data, key, mode, args.scheme)
    out_fmt = args.format
    if out_fmt == "auto":
        out_fmt = "pgm" if data.ndim == 2 and _fmt(args.out, "auto") == "pgm" else "raw"
    _write(args.out, result, out_fmt)
    return EXIT_OK


def _as_image(seq, width):
    if seq.ndim == 2:
        return seq
    if not width:
        raise UsageError("a 1-D input needs --width to be rendered as an image")
    flat = seq.ravel()
    height = -(-flat.size // width)
    img = np.zeros(height * width, dtype=np.uint8)
    img[: flat.size] = flat
    return img.reshape(height, width)


def cmd_attack_co(args, out, err):
    cipher = _read(args.cipher, args.format, args.width)
    width = cipher.shape[1] if cipher.ndim == 2 else args.width
    if not width:
        raise UsageError("--width is required for raw ciphertexts")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    masks = maskattack.build_mask_texts(cipher)
    outputs = {
        "mask_g0.pgm": masks.g0,
        "mask_g1.pgm": masks.g1,
        "diff_g0.pgm": maskattack.differential(masks.g0),
        "diff_g1.pgm": maskattack.differential(masks.g1),
    }
    for name, seq in outputs.items():
        fileio.write_pgm(out_dir / name, _as_image(seq, width))
    m = cipher.size
    L_max = args.L_max or min(256, (m - 1) // 2)
    est = maskattack.estimate_period_co(cipher, args.L_min, L_max, statistic=args.statistic)
    text = est.to_text()
    fileio.write_text(out_dir / "period_estimate.txt", text)
    print(text, file=out)
    return EXIT_OK


def cmd_attack_kp(args, out, err):
    plain = _read(args.plain, args.format, args.width)
    cipher = _read(args.cipher, args.format, args.width)
    if plain.size != cipher.size:
        if not args.prefix:
            raise UsageError(f"lengths differ ({plain.size} vs {cipher.size}); pass --prefix to "
                             "attack the overlapping prefix")
        n = min(plain.size, cipher.size)
        plain, cipher = plain.ravel()[:n], cipher.ravel()[:n]
    mode = PrecisionMode(args.mode or PrecisionMode.FIXED8_TRUNC)
    report = keyrecovery.full_known_plaintext_attack(plain, cipher, mode, args.scheme)
    text = report.to_text()
    print(text, file=out)
    if args.report:
        fileio.write_text(args.report, text)
    if args.enhanced_out:
        width = cipher.shape[1] if cipher.ndim == 2 else args.width
        fileio.write_pgm(args.enhanced_out,
                         _as_image(keyrecovery.enhanced_differential(plain, cipher), width))
    if report.status is not keyrecovery.Status.SUCCESS:
        return EXIT_FAIL
    if args.key_out:
        fileio.write_key(args.key_out, report.recovered_key, mode)
    if args.decrypt:
        if not args.out:
            raise UsageError("--decrypt needs --out")
        data = _read(args.decrypt, args.format, args.width)
        _write(args.out, decrypt(data, report.recovered_key, mode, args.scheme),
               "pgm" if data.ndim == 2 and _fmt(args.out, "auto") == "pgm" else "raw")
    return EXIT_OK


def cmd_attack_brute(args, out, err):
    plain = _read(args.plain, args.format, args.width)
    cipher = _read(args.cipher, args.format, args.width)
    m = plain.size
    space = bruteforce.KeySpace(
        args.L_range or range(1, m + 1),
        args.key_range or range(256),
        args.mu_range or range(256),
        args.x0_range or range(256),
    )
    mode = PrecisionMode(args.mode or PrecisionMode.FIXED8_TRUNC)
    found, summary = bruteforce.search_with_summary(space, plain, cipher, mode, args.scheme,
                                                    budget=args.budget, workers=args.workers)
    for key in found:
        print(f"match: {key}", file=out)
    print(summary.to_text(), file=out)
    if args.key_out and found:
        fileio.write_key(args.key_out, found[0], mode)
    return EXIT_OK if found else EXIT_FAIL


def cmd_prbs(args, out, err):
    key, mode = _key_and_mode(args)
    bits = chaos.generate_prbs(key.x0, key.mu, args.nbits, mode, args.scheme)
    if args.out_image:
        fileio.write_pgm(args.out_image, chaos.prbs_to_image(bits, args.width))
    if args.cycle_report:
        try:
            rep = chaos.detect_cycle(key.x0, key.mu, mode, args.scheme)
            print(f"mode: {mode.value}", file=out)
            print(f"scheme: {Scheme(args.scheme).value}", file=out)
            print(f"tail_length: {rep.tail_length}", file=out)
            print(f"period: {rep.period}", file=out)
            print(f"prbs_cycle: {rep.prbs_cycle}", file=out)
        except IterationCapExceededError as exc:
            print(f"mode: {mode.value}", file=out)
            print(f"no cycle: {exc}", file=out)
    if args.survey:
        print(chaos.format_survey(chaos.survey_quantization(key.x0, key.mu)), file=out)
    if not (args.out_image or args.cycle_report or args.survey):
        print("".join(map(str, bits.tolist())), file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dsea", description="DSEA cipher and cryptanalysis workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, key=False):
        p.add_argument("--format", choices=["auto", "raw", "pgm"], default="auto",
                       help="file format (auto: .pgm extension means PGM)")
        p.add_argument("--width", type=int, help="row width for raw data")
        p.add_argument("--mode", choices=[m.value for m in PrecisionMode],
                       help="arithmetic (default: key file's mode, else fixed8_trunc)")
        p.add_argument("--scheme", choices=[s.value for s in Scheme], default=Scheme.FUSED.value,
                       help=argparse.SUPPRESS)
        if key:
            p.add_argument("--key", required=True, help="key file")

    for name in ("encrypt", "decrypt"):
        p = sub.add_parser(name, help=f"{name} a file")
        common(p, key=True)
        p.add_argument("--in", dest="inp", required=True)
        p.add_argument("--out", required=True)
        p.set_defaults(func=cmd_crypt)

    attack = sub.add_parser("attack", help="run an attack").add_subparsers(dest="attack", required=True)

    p = attack.add_parser("co", help="ciphertext-only: mask texts, differentials, estimate of L")
    common(p)
    p.add_argument("--cipher", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--L-min", type=int, default=2)
    p.add_argument("--L-max", type=int)
    p.add_argument("--statistic", choices=sorted(maskattack.STATISTICS), default="folded")
    p.set_defaults(func=cmd_attack_co)

    p = attack.add_parser("kp", help="known-plaintext recovery of the whole key")
    common(p)
    p.add_argument("--plain", required=True)
    p.add_argument("--cipher", required=True)
    p.add_argument("--key-out", help="write the recovered key file here")
    p.add_argument("--report", help="write the text report here")
    p.add_argument("--enhanced-out", help="write the enhanced differential image here")
    p.add_argument("--decrypt", help="ciphertext to decrypt with the recovered key")
    p.add_argument("--out", help="output for --decrypt")
    p.add_argument("--prefix", action="store_true", help="attack the overlapping prefix of unequal files")
    p.set_defaults(func=cmd_attack_kp)

    p = attack.add_parser("brute", help="exhaustive key search")
    common(p)
    p.add_argument("--plain", required=True)
    p.add_argument("--cipher", required=True)
    p.add_argument("--L-range", type=lambda t: _range(t, 1, 2**31))
    p.add_argument("--key-range", type=lambda t: _range(t, 0, 255))
    p.add_argument("--mu-range", type=lambda t: _range(t, 0, 255))
    p.add_argument("--x0-range", type=lambda t: _range(t, 0, 255))
    p.add_argument("--budget", type=int, default=bruteforce.DEFAULT_BUDGET)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--key-out")
    p.set_defaults(func=cmd_attack_brute)

    p = sub.add_parser("prbs", help="chaotic bit sequence, pseudo-image and cycle analysis")
    p.add_argument("--key", required=True)
    p.add_argument("--nbits", type=int, default=65536)
    p.add_argument("--mode", choices=[m.value for m in PrecisionMode])
    p.add_argument("--scheme", choices=[s.value for s in Scheme], default=Scheme.FUSED.value)
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--out-image")
    p.add_argument("--cycle-report", action="store_true")
    p.add_argument("--survey", action="store_true", help="cycle survey over all rounding variants")
    p.set_defaults(func=cmd_prbs)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args, out, err)
    except (UsageError, DSEAError, OSError, ValueError) as exc:
        print(f"dsea: error: {exc}", file=err)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
