"""Command line interface.

Subcommands: keygen (draw and store a key), sign (make the fixed point
image), verify (check one and write mask/overlay), attack (run a layout of
simulated attacks against a freshly signed image), eval (transparency and
fragility sweep over an image corpus).

Exit codes: 0 success / image clean, 3 image tampered, 1 any error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .attacks import apply_attack, attack_battery, parse_layout
from .authenticate import (
    generate,
    predicted_detection_probability,
    psnr,
    single_tamper_detected,
    verify,
)
from .imageio import overlay_mask, read_image, write_image, write_mask
from .keyschedule import (
    MODES,
    MODE_FORWARD,
    expand_key,
    key_space_size,
    load_key,
    random_key,
    save_key,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_TAMPERED = 3

LAYOUT_GRAMMAR = """\
attack layout: one attack per line, blank lines and '#' comments ignored:

    kind row0 col0 rows cols [name=value ...]

with 0-based integer region fields and kinds:
    tamper-pixel   [value=INT]          (default flips each pixel to 255-v)
    salt-pepper    [density=F seed=N]
    gaussian-noise [sigma=F seed=N]
    median-filter  [size=N]
    gaussian-filter [size=N sigma=F]
    enhance                              (linear contrast stretch to [0,255])
    copy-external  [src_row0=N src_col0=N]   (donor = --aux image)
    copy-self      src_row0=N src_col0=N
    cover-constant [value=INT]
    collage                              (same region from --aux image)
    logo           [value=INT]           (stamp shape from --aux image)
    rewrite        key=KEYFILE           (re-sign whole image; only line)
"""


def _fmt_db(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.4f}"


def cmd_keygen(args) -> int:
    lo, hi = args.range
    key = random_key(args.seed, mode=args.mode, ub_h=args.ub,
                     param_range=(lo, hi))
    save_key(key, args.out)
    n = hi - lo + 1
    print(f"wrote {args.out}")
    print(f"key space: {n}^36 = {key_space_size((lo, hi))} "
          f"(about 2^{36 * math.log2(n):.1f})")
    return EXIT_OK


def cmd_sign(args) -> int:
    key = load_key(args.key)
    image = read_image(args.input)
    signed = generate(image, key)
    write_image(signed, args.out)
    print(f"wrote {args.out}")
    print(f"PSNR: {_fmt_db(psnr(image, signed))} dB")
    return EXIT_OK


def cmd_verify(args) -> int:
    key = load_key(args.key)
    image = read_image(args.input)
    mask = verify(image, key)
    if args.mask_out:
        write_mask(mask, args.mask_out)
    if args.overlay_out:
        write_image(overlay_mask(image, mask), args.overlay_out)
    count = int(mask.sum())
    if count == 0:
        print("clean")
        return EXIT_OK
    print(f"suspicious pixels: {count}")
    return EXIT_TAMPERED


def cmd_attack(args) -> int:
    key = load_key(args.key)
    image = read_image(args.input)
    specs = parse_layout(Path(args.layout).read_text())
    aux = read_image(args.aux) if args.aux else None
    for spec in specs:
        if isinstance(spec.params.get("key"), str):
            spec.params["key"] = load_key(spec.params["key"])

    if any(s.kind == "rewrite" for s in specs):
        if len(specs) != 1:
            raise ValueError("rewrite must be the only line in its layout")
        spec = specs[0]
        signed = generate(image, key)
        attacked = apply_attack(signed, spec, aux=image)
        mask = verify(attacked, key)
        flagged = int(mask.sum())
        fraction = flagged / mask.size
        verdict = "detected" if flagged else "missed"
        report = (f"rewrite under foreign key: flagged {flagged} of {mask.size} "
                  f"pixels ({fraction:.4f}), {verdict}\n")
    else:
        battery = attack_battery(image, key, specs, aux=aux)
        attacked = battery.attacked
        report = battery.to_text()

    write_image(attacked, args.out)
    if args.report:
        Path(args.report).write_text(report)
    sys.stdout.write(report)
    return EXIT_OK


def cmd_eval(args) -> int:
    corpus_dir = Path(args.corpus)
    paths = sorted(p for p in corpus_dir.iterdir()
                   if p.suffix.lower() in (".pgm", ".png"))
    if not paths:
        raise ValueError(f"no .pgm or .png images in {corpus_dir}")
    ubs = [float(v) for v in args.ubs.split(",") if v.strip()]
    if not ubs:
        raise ValueError("empty ub_h sweep")
    lo, hi = args.range
    images = [(p, read_image(p)) for p in paths]

    lines = ["path,ub_h,psnr_db"]
    summaries = []
    for ub in ubs:
        key = random_key(args.seed, mode=args.mode, ub_h=ub,
                         param_range=(lo, hi))
        fields = {}
        values = []
        first_signed = None
        for path, img in images:
            shape = img.shape
            if shape not in fields:
                fields[shape] = expand_key(key, *shape)
            signed = generate(img, fields[shape])
            if first_signed is None:
                first_signed = signed
            value = psnr(img, signed)
            values.append(value)
            lines.append(f"{path},{ub},{_fmt_db(value)}")
        summaries.append(
            f"# summary ub_h={ub} min={_fmt_db(min(values))} "
            f"mean={_fmt_db(sum(values) / len(values))} "
            f"max={_fmt_db(max(values))} images={len(values)}"
        )
        if args.trials > 0:
            field = fields[first_signed.shape]
            rng = np.random.default_rng(args.seed)
            rows, cols = first_signed.shape
            hits = 0
            predicted = []
            for _ in range(args.trials):
                s = int(rng.integers(2, rows))
                t = int(rng.integers(2, cols))
                old = int(first_signed[s - 1, t - 1])
                value = int(rng.integers(0, 255))
                if value >= old:
                    value += 1
                hits += single_tamper_detected(first_signed, field, (s, t), value)
                predicted.append(
                    predicted_detection_probability(first_signed, field, (s, t))
                )
            summaries.append(
                f"# fragility ub_h={ub} trials={args.trials} "
                f"empirical={hits / args.trials:.4f} "
                f"predicted={sum(predicted) / len(predicted):.4f}"
            )
    report = "\n".join(lines + summaries) + "\n"
    Path(args.report).write_text(report)
    sys.stdout.write("\n".join(summaries) + "\n")
    print(f"wrote {args.report}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpauth",
        description="Keyed fixed point images: fragile authentication of "
                    "8-bit grayscale images with pixel-level tamper localization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="draw a random key and write it to a file")
    p.add_argument("--out", required=True, help="key file to write")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--mode", choices=MODES, default=MODE_FORWARD)
    p.add_argument("--ub", type=float, default=0.52,
                   help="residual amplitude upper bound in (0.5, 1] (default 0.52)")
    p.add_argument("--range", type=int, nargs=2, default=(10, 90),
                   metavar=("LO", "HI"),
                   help="inclusive range for key entries (default 10 90)")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("sign", help="write the fixed point image and report PSNR")
    p.add_argument("--key", required=True, help="key file")
    p.add_argument("--in", dest="input", required=True, help="input image (PGM/PNG)")
    p.add_argument("--out", required=True, help="output image")
    p.set_defaults(func=cmd_sign)

    p = sub.add_parser("verify",
                       help="check integrity; exit 0 if clean, 3 if tampered")
    p.add_argument("--key", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--mask-out", help="write the tamper mask as an image")
    p.add_argument("--overlay-out", help="write the input with flags painted white")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser(
        "attack",
        help="sign an image, run an attack layout, verify, and report",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=LAYOUT_GRAMMAR,
    )
    p.add_argument("--key", required=True)
    p.add_argument("--in", dest="input", required=True, help="original image")
    p.add_argument("--layout", required=True, help="attack layout file")
    p.add_argument("--out", required=True, help="attacked image to write")
    p.add_argument("--report", help="per-attack text report to write")
    p.add_argument("--aux", help="donor image for copy-external/collage/logo")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("eval",
                       help="PSNR and fragility sweep over an image corpus")
    p.add_argument("--corpus", required=True, help="directory of PGM/PNG images")
    p.add_argument("--report", required=True, help="CSV report to write")
    p.add_argument("--ubs", default="0.52,0.6,0.7,0.85,1.0",
                   help="comma-separated ub_h sweep (default 0.52,0.6,0.7,0.85,1.0)")
    p.add_argument("--range", type=int, nargs=2, default=(10, 90),
                   metavar=("LO", "HI"))
    p.add_argument("--mode", choices=MODES, default=MODE_FORWARD)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=200,
                   help="random single-pixel tampers per ub_h for the "
                        "fragility section; 0 disables (default 200)")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
