import logging
from typing import Dict, List, Sequence

import numpy as np
import pandas as pd

from ...batch import run_units
from ...config import OutputFormat, RunConfig, Split
from ...corpus import DatasetManifest, build_alphabet, normalize_text
from ...errors import DataError
from ...reports import write_heatmap, write_matrix_csv
from ...synthgen import WORDS, sample_lines
from ...textdiv import divergence_matrix, normalize_matrix, textual_divergence
from .. import output
from ..workspace import Workspace

logger = logging.getLogger(__name__)

NAME = "textdiv"


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        NAME, help="textual divergence matrix between domains",
        description="Average KL divergence of character n-gram distributions. Writes "
                    "textdiv/textual.csv (rows: source, columns: target); with --normalize "
                    "also textual_normalized.csv; with --synthetic-lines N also "
                    "textual_synthetic.csv (source vs. a synthetic corpus in the target's "
                    "language).")
    parser.add_argument("--split", type=Split, default=Split.TRAIN, choices=list(Split))
    parser.add_argument("--nmax", type=int, help="highest n-gram order (1..5)")
    parser.add_argument("--alpha", type=float, help="additive smoothing mass")
    parser.add_argument("--normalize", action="store_true",
                        help="also write the matrix rescaled onto [0, 100]")
    parser.add_argument("--pgm", action="store_true", help="write PGM heatmaps")
    parser.add_argument("--synthetic-lines", type=int, default=0,
                        help="size of the synthetic corpus per target language (0: skip)")
    parser.set_defaults(handler=run)


def domain_corpora(manifests: Sequence[DatasetManifest], split: Split) -> Dict[str, List[tuple]]:
    """Transcripts of a split per domain, normalized onto the shared alphabet"""
    alphabet = build_alphabet(manifests)
    corpora = {}
    for manifest in manifests:
        texts = manifest.texts(split)
        if not texts:
            raise DataError(f"domain {manifest.name} has no {split.value} transcripts")
        corpora[manifest.name] = [normalize_text(text, alphabet) for text in texts]
    return corpora


def synthetic_matrix(manifests: Sequence[DatasetManifest], corpora: Dict[str, List[tuple]],
                     num_lines: int, config: RunConfig) -> pd.DataFrame:
    """Entry (S, T): divergence from S's text to a synthetic corpus in T's language"""
    alphabet = build_alphabet(manifests)
    languages = sorted({m.language for m in manifests})
    unknown = [lang for lang in languages if lang not in WORDS]
    if unknown:
        raise DataError(f"no synthetic word list for language(s): {', '.join(unknown)}")
    synthetic = {
        lang: [normalize_text(line, alphabet)
               for line in sample_lines(lang, num_lines, config.seed)]
        for lang in languages
    }
    names = [m.name for m in manifests]
    language_of = {m.name: m.language for m in manifests}
    cells = [(s, t) for s in names for t in names]
    values = run_units(
        lambda cell: textual_divergence(corpora[cell[0]], synthetic[language_of[cell[1]]],
                                        config.nmax, config.alpha),
        cells, max_workers=config.workers, desc="Synthetic divergence")
    matrix = np.array(values, dtype=np.float64).reshape(len(names), len(names))
    return pd.DataFrame(matrix, index=names, columns=names)


def run(args, config: RunConfig) -> int:
    output.banner("Textual divergence")
    workspace = Workspace.from_config(config)
    manifests = workspace.manifests(config)
    corpora = domain_corpora(manifests, args.split)
    output.ok(f"{len(corpora)} domains, {args.split.value} split, "
              f"n <= {config.nmax}, alpha = {config.alpha:g}")

    matrix = divergence_matrix(list(corpora.values()), names=list(corpora),
                               nmax=config.nmax, alpha=config.alpha,
                               max_workers=config.workers)
    out_dir = workspace.directory("textdiv")
    written = [write_matrix_csv(matrix, out_dir / "textual.csv")]
    if args.normalize:
        written.append(write_matrix_csv(normalize_matrix(matrix),
                                        out_dir / "textual_normalized.csv"))
    if config.wants(OutputFormat.PGM):
        written.append(write_heatmap(normalize_matrix(matrix), out_dir / "textual.pgm"))

    if args.synthetic_lines > 0:
        synthetic = synthetic_matrix(manifests, corpora, args.synthetic_lines, config)
        written.append(write_matrix_csv(synthetic, out_dir / "textual_synthetic.csv"))

    output.table(matrix)
    output.wrote(written)
    output.footer()
    return 0
