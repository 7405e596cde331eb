import json
import logging
from pathlib import Path

from ...config import RunConfig, Split
from ...corpus import build_alphabet, load_image, load_manifest
from ...errors import DataError
from .. import output
from ..workspace import Workspace

logger = logging.getLogger(__name__)

NAME = "ingest"


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        NAME, help="validate manifests, build the shared alphabet and register domains",
        description="Validate dataset manifests, write alphabet.json and register every "
                    "domain in domains.csv (columns: name, language, manifest).")
    parser.add_argument("manifests", nargs="*", type=Path,
                        help="manifest files (default: --manifest / config)")
    parser.add_argument("--check-images", action="store_true",
                        help="decode every image referenced by the manifests")
    parser.set_defaults(handler=run)


def run(args, config: RunConfig) -> int:
    output.banner("Ingest")
    workspace = Workspace.from_config(config)
    paths = list(args.manifests) or workspace.manifest_paths(config)

    manifests = []
    for path in paths:
        manifest = load_manifest(path)
        if args.check_images:
            for split in Split:
                for sample in manifest.split(split):
                    load_image(sample.image_path)
        manifests.append(manifest)
        ok_sizes = ", ".join(f"{k}={v}" for k, v in manifest.split_sizes().items())
        output.ok(f"{manifest.name} ({manifest.language}): {ok_sizes}")

    names = [m.name for m in manifests]
    duplicates = sorted({n for n in names if names.count(n) > 1})
    if duplicates:
        raise DataError(f"duplicate domain name(s): {', '.join(duplicates)}")

    alphabet = build_alphabet(manifests)
    alphabet_file = workspace.directory() / "alphabet.json"
    with open(alphabet_file, "w", encoding="utf-8", newline="\n") as f:
        json.dump(alphabet.to_dict(), f, ensure_ascii=False, indent=2)
        f.write("\n")
    for manifest, path in zip(manifests, paths):
        workspace.register(manifest, path)

    output.ok(f"Alphabet of {len(alphabet)} symbols")
    output.wrote([alphabet_file, workspace.registry_file])
    output.footer()
    return 0
