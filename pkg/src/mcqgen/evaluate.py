"""Training-free baselines for answering the generated questions.

The sliding-window scorer slides a window the size of the combined
question-plus-option token set over the context and takes the best sum of
inverse-count weights; the random baseline guesses uniformly.  Both report
overall and per-question-type accuracy.
"""

from __future__ import annotations

import math
import random
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ResourceError
from .pipeline import QTYPE_ORDER, McqaSample, parse_sample

_TOKEN_RE = re.compile(r"[0-9a-z]+")

EVAL_METHODS = ("sw", "random")


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric tokens, the shared unit for scoring."""
    return _TOKEN_RE.findall(text.lower())


def sw_score(context_tokens: Sequence[str], question: str, option: str) -> float:
    """Best window sum of inverse-count weights for one answer option.

    Tokens in the question-or-option set S score ``ln(1 + N / count)``
    (N = context length, count = occurrences in the context); other tokens
    score zero.  The window width is ``|S|`` capped at N, and every
    position inside the window contributes, duplicates included.  Empty
    contexts or option sets score 0.
    """
    target = set(tokenize(question)) | set(tokenize(option))
    n = len(context_tokens)
    if n == 0 or not target:
        return 0.0
    counts = Counter(context_tokens)
    weights = {
        token: math.log(1.0 + n / counts[token]) for token in target if token in counts
    }
    if not weights:
        return 0.0
    width = min(len(target), n)
    values = [weights.get(token, 0.0) for token in context_tokens]
    # Summing each window fresh keeps float results independent of window
    # position, so rankings are reproducible against a naive recount.
    return max(sum(values[i : i + width]) for i in range(n - width + 1))


def sw_predict(sample: McqaSample) -> int:
    """Index of the option with the highest window score (ties: lowest)."""
    context_tokens = tokenize(sample.context)
    scores = [sw_score(context_tokens, sample.question, opt) for opt in sample.choices]
    return max(range(len(scores)), key=lambda i: (scores[i], -i))


@dataclass
class EvalResult:
    """Accuracy of one method over one dataset file."""

    method: str
    total: int = 0
    correct: int = 0
    excluded: int = 0
    by_qtype: dict[str, dict[str, int]] = field(
        default_factory=lambda: {q: {"total": 0, "correct": 0} for q in QTYPE_ORDER}
    )

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    def to_dict(self) -> dict:
        out = {
            "method": self.method,
            "total": self.total,
            "correct": self.correct,
            "accuracy": self.accuracy,
            "excluded": self.excluded,
            "by_qtype": {},
        }
        for qtype, bucket in self.by_qtype.items():
            accuracy = bucket["correct"] / bucket["total"] if bucket["total"] else 0.0
            out["by_qtype"][qtype] = {**bucket, "accuracy": accuracy}
        return out


def evaluate(dataset_path: str, method: str = "sw", seed: int = 0) -> EvalResult:
    """Score a dataset file with a baseline method.

    ``method`` is ``"sw"`` (sliding window) or ``"random"`` (uniform guess
    seeded by ``seed``).  Records that fail to parse are excluded and
    counted, not fatal.
    """
    if method not in EVAL_METHODS:
        raise ValueError(f"method must be one of {EVAL_METHODS}")
    rng = random.Random(seed)
    result = EvalResult(method=method)
    try:
        fh = open(dataset_path, encoding="utf-8")
    except OSError as exc:
        raise ResourceError(f"cannot read dataset: {exc}") from exc
    with fh:
        for line in fh:
            if not line.strip():
                continue
            try:
                sample = parse_sample(line)
            except ValueError:
                result.excluded += 1
                continue
            if method == "sw":
                prediction = sw_predict(sample)
            else:
                prediction = rng.randrange(len(sample.choices))
            result.total += 1
            bucket = result.by_qtype[sample.qtype]
            bucket["total"] += 1
            if prediction == sample.answer_index:
                result.correct += 1
                bucket["correct"] += 1
    return result
