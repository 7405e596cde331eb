import logging
from pathlib import Path

from ...config import RunConfig
from ...errmetrics import corpus_cer, corpus_wer, ece, load_predictions, mce, reliability_table
from ...errors import DataError
from ...models import EvalReport
from ...reports import write_json
from .. import output
from ..workspace import Workspace

logger = logging.getLogger(__name__)

NAME = "eval"


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        NAME, help="CER, WER and calibration of prediction logs",
        description="Score TSV prediction logs (sample_id, reference, hypothesis[, "
                    "confidences]). Writes eval/<log name>.json and, with --ece, "
                    "eval/<log name>_reliability.csv (bin, lower, upper, count, "
                    "confidence, accuracy, gap).")
    parser.add_argument("predictions", nargs="+", type=Path)
    parser.add_argument("--ece", action="store_true",
                        help="also compute ECE/MCE (needs the confidences column)")
    parser.add_argument("--bins", type=int, dest="ece_bins", help="number of ECE bins")
    parser.set_defaults(handler=run)


def evaluate_log(path: Path, with_ece: bool, bins: int) -> tuple:
    """(EvalReport, reliability table or None) for one prediction log"""
    records = load_predictions(path)
    if not records:
        raise DataError(f"{path}: no predictions")
    report = EvalReport(predictions=str(path), num_records=len(records),
                        cer=corpus_cer(records), wer=corpus_wer(records))
    reliability = None
    if with_ece:
        if not all(record.has_confidences for record in records):
            raise DataError(f"{path}: --ece needs a confidences column on every record")
        reliability = reliability_table(records, bins)
        report.ece = ece(records, bins)
        report.mce = mce(records, bins)
        report.bins = bins
    return report, reliability


def run(args, config: RunConfig) -> int:
    output.banner("Recognition metrics")
    out_dir = Workspace.from_config(config).directory("eval")
    written = []
    for path in args.predictions:
        report, reliability = evaluate_log(path, args.ece, config.ece_bins)
        written.append(write_json(report, out_dir / f"{path.stem}.json"))
        if reliability is not None:
            reliability_file = out_dir / f"{path.stem}_reliability.csv"
            reliability.to_csv(reliability_file, index=False, float_format="%.17g")
            written.append(reliability_file)
        line = f"{path.name}: CER {report.cer:.2f}%  WER {report.wer:.2f}%"
        if report.ece is not None:
            line += f"  ECE {report.ece:.4f}  MCE {report.mce:.4f}"
        output.ok(line)
    output.wrote(written)
    output.footer()
    return 0
