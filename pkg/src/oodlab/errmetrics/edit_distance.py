"""
Unit-cost edit distance and alignment.

Distances come from editdistance; the alignment keeps its own table because it needs
the traceback.

The alignment traceback prefers, at every cell, match/substitution over insertion over
deletion, which makes the per-character correctness labels used by ECE deterministic.
"""

from enum import Enum
from typing import List, NamedTuple, Optional, Sequence

import editdistance


class EditOp(str, Enum):
    MATCH = "match"
    SUBSTITUTE = "sub"
    INSERT = "ins"        # hypothesis symbol with no reference counterpart
    DELETE = "del"        # reference symbol missing from the hypothesis


class AlignedPair(NamedTuple):
    op: EditOp
    ref_index: Optional[int]
    hyp_index: Optional[int]


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Minimal number of unit-cost substitutions, insertions and deletions turning a into b"""
    return int(editdistance.eval(a, b))


def align(reference: Sequence, hypothesis: Sequence) -> List[AlignedPair]:
    """
    Optimal alignment of a hypothesis against a reference.

    Returns:
        Aligned pairs in reading order; the number of non-match pairs equals
        levenshtein(reference, hypothesis)
    """
    n, m = len(reference), len(hypothesis)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        table[i][0] = i
    for j in range(m + 1):
        table[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            table[i][j] = min(table[i - 1][j] + 1,
                              table[i][j - 1] + 1,
                              table[i - 1][j - 1] + (reference[i - 1] != hypothesis[j - 1]))

    pairs: List[AlignedPair] = []
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            same = reference[i - 1] == hypothesis[j - 1]
            if table[i][j] == table[i - 1][j - 1] + (not same):
                pairs.append(AlignedPair(EditOp.MATCH if same else EditOp.SUBSTITUTE, i - 1, j - 1))
                i, j = i - 1, j - 1
                continue
        if j > 0 and table[i][j] == table[i][j - 1] + 1:
            pairs.append(AlignedPair(EditOp.INSERT, None, j - 1))
            j -= 1
        else:
            pairs.append(AlignedPair(EditOp.DELETE, i - 1, None))
            i -= 1
    pairs.reverse()
    return pairs
