"""
Desk-scale OOD study: 4 synthetic domains (en/fr × clean/inverted), textual and visual
divergence, a nearest-neighbour stand-in recognizer, the metrics table and the
leave-one-domain-out regression.

    uv run python scripts/desk_study.py --workspace desk --lines 200 --epochs 5
"""

import argparse
import sys
from pathlib import Path

from oodlab.cli.logging_setup import LOG_LEVELS, setup_logging
from oodlab.config import DEFAULT_SEED
from oodlab.errors import OodlabError
from oodlab.study import run_desk_study


def print_checks(result) -> bool:
    """Print the three study checks and return whether all of them hold."""
    same_lang, cross_lang = result.pairs(result.textual, "language")
    same_style, cross_style = result.pairs(result.visual, "style")
    cumulative = result.residuals.cumulative_percent
    checks = [
        ("textual: same-language < cross-language", max(same_lang) < min(cross_lang)),
        ("visual: same-style < cross-style", max(same_style) < min(cross_style)),
        ("residuals: cumulative share ends at 100% and never decreases",
         abs(cumulative[-1] - 100.0) < 1e-9 and bool((cumulative[1:] >= cumulative[:-1]).all())),
    ]
    for label, passed in checks:
        print(f"{'✅' if passed else '❌'} {label}")
    return all(passed for _, passed in checks)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.strip().splitlines()[0])
    parser.add_argument("--workspace", type=Path, default=Path("desk_study"))
    parser.add_argument("--lines", type=int, default=200, help="lines per domain")
    parser.add_argument("--epochs", type=int, default=5, help="autoencoder epochs")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--log-level", default="INFO", choices=LOG_LEVELS)
    args = parser.parse_args()
    setup_logging(args.log_level)

    print(f"\n{'=' * 80}")
    print("🔬 oodlab - Desk-scale OOD study")
    print(f"{'=' * 80}\n")
    try:
        result = run_desk_study(args.workspace, num_lines=args.lines, epochs=args.epochs,
                                seed=args.seed, max_workers=args.workers)
    except OodlabError as e:
        print(f"❌ {e}", file=sys.stderr)
        return e.exit_code

    print("📊 Textual divergence (nats)")
    print(result.textual.round(4).to_string())
    print("\n📊 Visual divergence (MSE)")
    print(result.visual.round(5).to_string())
    print(f"\n📈 Regression MAE {result.evaluation.mae:.2f}, MSE {result.evaluation.mse:.2f}")
    print(result.residuals.to_frame().to_string(index=False))
    print()
    passed = print_checks(result)
    for path in result.files:
        print(f"   {path}")
    print(f"{'=' * 80}\n")
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
