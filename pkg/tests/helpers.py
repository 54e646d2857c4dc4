"""Independent reference computations used as test oracles.

Nothing here calls into the package's utility or ledger code.
"""

import math
from functools import lru_cache


def brute_max_accrual(tokens_by_player, horizon, discount=1.0):
    """Largest discounted accrual obtainable from other players' engagement tokens.

    ``tokens_by_player`` maps each other player to a list of
    (weight, introduced_round) tokens they may spend, one per round, each at
    most once, strictly after the token's introduction round.
    """
    total = 0.0
    for tokens in tokens_by_player.values():
        tokens = tuple(tokens)

        @lru_cache(maxsize=None)
        def best(r, used):
            if r > horizon:
                return 0.0
            value = best(r + 1, used)
            for i, (w, intro) in enumerate(tokens):
                if used & (1 << i) or r <= intro:
                    continue
                value = max(value, w * discount ** (horizon - r) + best(r + 1, used | (1 << i)))
            return value

        total += best(1, 0)
    return total


def recount(history):
    """(content, sharer) -> {"like": n, "reshare": n} straight from the action list."""
    out = {}
    for a in history:
        if a.kind.value in ("like", "reshare"):
            slot = out.setdefault((a.content, a.source), {"like": 0, "reshare": 0})
            slot[a.kind.value] += 1
    return out


def euclid(a, b):
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))
