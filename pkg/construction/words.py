# construction/words.py
#
# Positional decoding of the level-word recursion
#   W_{j+1} = W_j s^{s_j(1)} W_j s^{s_j(2)} ... W_j s^{s_j(r_j)}

import numpy as np

from construction.schedule import ConstructionSchedule
from tools.errors import ScheduleError, WordTooLong

SPACER = -1

DEFAULT_MAX_LEN = 1_000_000


def format_label(label: int) -> str:
    return "s" if label == SPACER else f"l{label}"


def level_label(schedule: ConstructionSchedule, J: int, p: int, n: int) -> int:
    """
    Stage-n level index occupied by position p of the stage-J tower,
    or SPACER if that position was added after stage n.
    """
    if n > J:
        raise ScheduleError(f"reference stage {n} lies above query stage {J}")
    h_J = schedule.height(J)
    schedule.height(n)
    if not 0 <= p < h_J:
        raise ScheduleError(f"position {p} outside stage {J} (height {h_J})")

    for j in range(J - 1, n - 1, -1):
        k = schedule.copy_index(j, p)
        p -= schedule.offsets(j)[k]
        if p >= schedule.height(j):
            return SPACER
    return p


def materialize_word(
    schedule: ConstructionSchedule, J: int, n: int, max_len: int = DEFAULT_MAX_LEN
) -> np.ndarray:
    """Full label word of stage J relative to stage n (SPACER = -1)."""
    if n > J:
        raise ScheduleError(f"reference stage {n} lies above query stage {J}")
    h_J = schedule.height(J)
    if h_J > max_len:
        raise WordTooLong(h_J, max_len)

    word = np.arange(schedule.height(n), dtype=np.int64)
    for j in range(n, J):
        pieces = []
        for s in schedule.record(j).spacer_values:
            pieces.append(word)
            if s:
                pieces.append(np.full(s, SPACER, dtype=np.int64))
        word = np.concatenate(pieces)
    return word
