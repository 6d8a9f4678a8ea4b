# correlation/sp_form.py
#
# Lags of the form h_{j1} ± h_{j2} ± ... ± h_{jp} + s with j1 > j2 > ... > jp.

from bisect import bisect_left
from itertools import combinations, product
from typing import Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

EXHAUSTIVE_TERMS = 3


class SpForm(BaseModel):
    model_config = ConfigDict(frozen=True)

    # 1-based stage indices, strictly decreasing
    indices: Tuple[int, ...]
    # +1 / -1 per term, the leading term is always +1
    signs: Tuple[int, ...]
    residual: int

    @model_validator(mode="after")
    def _shape(self):
        if not self.indices or len(self.indices) != len(self.signs):
            raise ValueError("an sp form needs one sign per index")
        if self.signs[0] != 1 or any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +1/-1 with a leading +1")
        if any(a <= b for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly decreasing")
        return self

    @property
    def p(self) -> int:
        return len(self.indices)

    def reconstruct(self, heights: Sequence[int]) -> int:
        return sum(s * heights[j - 1] for s, j in zip(self.signs, self.indices)) + self.residual

    def format(self) -> str:
        parts = []
        for k, (s, j) in enumerate(zip(self.signs, self.indices)):
            term = f"h{j}"
            parts.append(term if k == 0 else ("+ " if s > 0 else "- ") + term)
        if self.residual:
            parts.append(("+ " if self.residual > 0 else "- ") + str(abs(self.residual)))
        return " ".join(parts)


def _nearest(heights: Sequence[int], target: int, below: int) -> Optional[int]:
    """0-based index < below whose height is nearest target; ties go to the larger."""
    if below <= 0:
        return None
    k = bisect_left(heights, target, 0, below)
    best = None
    for i in (k - 1, k):
        if 0 <= i < below:
            if best is None or abs(heights[i] - target) <= abs(heights[best] - target):
                best = i
    return best


def _greedy(m, heights, s_max, p_max) -> Optional[SpForm]:
    first = _nearest(heights, m, len(heights))
    indices, signs = [first], [1]
    rem = m - heights[first]
    while abs(rem) > s_max:
        if len(indices) >= p_max:
            return None
        nxt = _nearest(heights, abs(rem), indices[-1])
        if nxt is None or abs(abs(rem) - heights[nxt]) >= abs(rem):
            return None
        sign = 1 if rem > 0 else -1
        indices.append(nxt)
        signs.append(sign)
        rem -= sign * heights[nxt]
    return SpForm(indices=tuple(i + 1 for i in indices), signs=tuple(signs), residual=rem)


def _exhaustive(m, heights, s_max, p_max) -> Optional[SpForm]:
    best = None
    best_key = None
    order = range(len(heights) - 1, -1, -1)
    for p in range(1, min(EXHAUSTIVE_TERMS, p_max) + 1):
        for chosen in combinations(order, p):
            for tail in product((1, -1), repeat=p - 1):
                signs = (1,) + tail
                rem = m - sum(s * heights[i] for s, i in zip(signs, chosen))
                if abs(rem) > s_max:
                    continue
                key = (p, abs(rem))
                if best_key is None or key < best_key:
                    best_key = key
                    best = SpForm(indices=tuple(i + 1 for i in chosen), signs=signs, residual=rem)
        if best is not None:
            return best
    return None


def sp_decompose(m: int, heights: Sequence[int], s_max: int, p_max: int) -> Optional[SpForm]:
    """
    Greedy decomposition with an exhaustive fallback over at most three terms.
    Returns None when no form within (s_max, p_max) is found.
    """
    if m <= 0:
        raise ValueError(f"lag must be positive, got {m}")
    heights = list(heights)
    if not heights or any(a >= b for a, b in zip(heights, heights[1:])):
        raise ValueError("heights must be a nonempty strictly increasing sequence")
    if s_max < 0 or p_max < 1:
        raise ValueError("s_max must be nonnegative and p_max positive")

    form = _greedy(m, heights, s_max, p_max) or _exhaustive(m, heights, s_max, p_max)
    if form is not None and form.reconstruct(heights) != m:
        raise AssertionError(f"sp form {form.format()} does not reconstruct {m}")
    return form
