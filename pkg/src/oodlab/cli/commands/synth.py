import logging
from pathlib import Path

from pydantic import ValidationError

from ...config import RunConfig
from ...errors import DataError, UsageError
from ...synthgen import (LANGUAGES, MANIFEST_NAME, STYLE_NAME, BitmapFont, StyleParams,
                         make_domain, sample_lines)
from .. import output
from ..workspace import Workspace

logger = logging.getLogger(__name__)

NAME = "synth"
DEFAULT_LINES = 200


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        NAME, help="render a synthetic domain",
        description="Render text lines into <workspace>/domains/<name>/ (PGM images, "
                    "manifest.jsonl, style.json) and register the domain.")
    parser.add_argument("--name", required=True, help="domain name")
    parser.add_argument("--language", default="en", choices=LANGUAGES)
    parser.add_argument("--lines", type=int, default=DEFAULT_LINES,
                        help="number of sampled lines (ignored with --text-file)")
    parser.add_argument("--text-file", type=Path,
                        help="UTF-8 file with one text line per line")
    parser.add_argument("--text-seed", type=int, help="seed for sampled lines (default: --seed)")
    style = parser.add_argument_group("style")
    style.add_argument("--scale", type=float, default=1.0)
    style.add_argument("--slant", type=float, default=0.0)
    style.add_argument("--ink", type=int, default=0, choices=(0, 1, 2))
    style.add_argument("--noise", type=float, default=0.0, dest="noise_sigma")
    style.add_argument("--jitter", type=int, default=0, dest="baseline_jitter")
    style.add_argument("--paper", type=float, default=1.0)
    style.add_argument("--ink-level", type=float, default=0.0)
    style.add_argument("--height", type=int, default=32)
    style.add_argument("--upscale", type=int, default=2, help="font pixel size")
    parser.set_defaults(handler=run)


def _read_lines(path: Path) -> list:
    if not path.is_file():
        raise DataError(f"text file not found: {path}")
    lines = [line.rstrip("\r\n") for line in path.read_text(encoding="utf-8").splitlines()]
    return [line for line in lines if line.strip()]


def run(args, config: RunConfig) -> int:
    output.banner(f"Synthetic domain {args.name}")
    workspace = Workspace.from_config(config)
    if args.text_file is not None:
        corpus = _read_lines(args.text_file)
    else:
        seed = config.seed if args.text_seed is None else args.text_seed
        corpus = sample_lines(args.language, args.lines, seed)

    try:
        style = StyleParams(scale=args.scale, slant=args.slant, ink=args.ink,
                            noise_sigma=args.noise_sigma, baseline_jitter=args.baseline_jitter,
                            paper=args.paper, ink_level=args.ink_level, height=args.height,
                            seed=config.seed)
    except ValidationError as e:
        raise UsageError(f"invalid style: {e.errors()[0]['msg']}")
    out_dir = workspace.path("domains", args.name)
    manifest = make_domain(corpus, BitmapFont.default(args.upscale), style, out_dir,
                           name=args.name, language=args.language,
                           max_workers=config.workers, show_progress=True)
    workspace.register(manifest, out_dir / MANIFEST_NAME)

    output.ok(f"Rendered {len(corpus)} lines: {manifest.split_sizes()}")
    output.wrote([out_dir / MANIFEST_NAME, out_dir / STYLE_NAME])
    output.footer()
    return 0
